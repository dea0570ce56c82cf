//! Reference particles described by their support functions.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix6, Vector2, Vector6};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{e, perp};
use crate::error::{Error, Result};

/// Number of grid points used to validate and integrate support-Fourier bodies.
pub const FOURIER_GRID: usize = 4096;

/// Mass `m` and centroidal moment of inertia `J` of one particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassInertia {
    pub m: f64,
    pub j: f64,
}

impl MassInertia {
    pub fn new(m: f64, j: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidInput(format!("mass must be positive and finite, got {m}")));
        }
        if !(j.is_finite() && j > 0.0) {
            return Err(Error::InvalidInput(format!(
                "moment of inertia must be positive and finite, got {j}"
            )));
        }
        Ok(Self { m, j })
    }

    /// `diag(√m, √m, √m, √m, √J, √J)`.
    pub fn diag(&self) -> Vector6<f64> {
        let (a, b) = (self.m.sqrt(), self.j.sqrt());
        Vector6::new(a, a, a, a, b, b)
    }

    pub fn matrix(&self) -> Matrix6<f64> {
        Matrix6::from_diagonal(&self.diag())
    }

    pub fn inverse_matrix(&self) -> Matrix6<f64> {
        Matrix6::from_diagonal(&self.diag().map(|x| 1.0 / x))
    }

    /// `M V` without forming the matrix.
    pub fn scale(&self, v: &Vector6<f64>) -> Vector6<f64> {
        v.component_mul(&self.diag())
    }

    /// Kinetic energy `|M V|²` of a concatenated velocity.
    pub fn energy(&self, v: &Vector6<f64>) -> f64 {
        self.scale(v).norm_squared()
    }
}

/// Shape part of a body descriptor file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ShapeDescriptor {
    Disk {
        r: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    /// `h(φ) = cos[0] + Σ_k (cos[k] cos kφ + sin[k-1] sin kφ)`.
    SupportFourier {
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

/// Body descriptor as read from JSON, with optional mass and inertia overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDescriptor {
    #[serde(flatten)]
    pub shape: ShapeDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
}

impl BodyDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Value and first two derivatives of a support function at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
}

/// Trigonometric polynomial with `c[k]` multiplying `cos kφ` and `s[k]` multiplying `sin kφ`.
#[derive(Debug, Clone, PartialEq)]
struct TrigPoly {
    c: Vec<f64>,
    s: Vec<f64>,
}

impl TrigPoly {
    fn new(cos: &[f64], sin: &[f64]) -> Self {
        let n = cos.len().max(sin.len() + 1);
        let mut c = vec![0.0; n];
        let mut s = vec![0.0; n];
        c[..cos.len()].copy_from_slice(cos);
        s[1..=sin.len()].copy_from_slice(sin);
        Self { c, s }
    }

    fn jet(&self, phi: f64) -> Jet {
        let mut j = Jet { h: self.c[0], dh: 0.0, d2h: 0.0 };
        for k in 1..self.c.len() {
            let kf = k as f64;
            let (sn, cs) = (kf * phi).sin_cos();
            let (a, b) = (self.c[k], self.s[k]);
            j.h += a * cs + b * sn;
            j.dh += kf * (b * cs - a * sn);
            j.d2h -= kf * kf * (a * cs + b * sn);
        }
        j
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Disk(f64),
    Polygon(Vec<Vector2<f64>>),
    Fourier(TrigPoly),
}

/// A compact convex reference particle, centred at its centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody2D {
    shape: Shape,
    mass_inertia: MassInertia,
    descriptor: BodyDescriptor,
}

impl ConvexBody2D {
    pub fn disk(r: f64) -> Result<Self> {
        Self::from_descriptor(&BodyDescriptor {
            shape: ShapeDescriptor::Disk { r },
            mass: None,
            inertia: None,
        })
    }

    /// Counterclockwise, strictly convex polygon whose centroid is the origin.
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        Self::from_descriptor(&BodyDescriptor {
            shape: ShapeDescriptor::Polygon { vertices: vertices.to_vec() },
            mass: None,
            inertia: None,
        })
    }

    /// Body with support function `cos[0] + Σ cos[k] cos kφ + sin[k-1] sin kφ`.
    ///
    /// The body is translated so that its centroid sits at the origin; this only
    /// changes the first-order coefficients.
    pub fn support_fourier(cos: &[f64], sin: &[f64]) -> Result<Self> {
        Self::from_descriptor(&BodyDescriptor {
            shape: ShapeDescriptor::SupportFourier { cos: cos.to_vec(), sin: sin.to_vec() },
            mass: None,
            inertia: None,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_descriptor(&BodyDescriptor::from_json(text)?)
    }

    pub fn from_descriptor(desc: &BodyDescriptor) -> Result<Self> {
        let (shape, computed) = match &desc.shape {
            ShapeDescriptor::Disk { r } => build_disk(*r)?,
            ShapeDescriptor::Polygon { vertices } => build_polygon(vertices)?,
            ShapeDescriptor::SupportFourier { cos, sin } => build_fourier(cos, sin)?,
        };
        let mass_inertia = MassInertia::new(
            desc.mass.unwrap_or(computed.m),
            desc.inertia.unwrap_or(computed.j),
        )?;
        Ok(Self { shape, mass_inertia, descriptor: desc.clone() })
    }

    /// Same shape with mass and inertia replaced.
    pub fn with_mass_inertia(mut self, mi: MassInertia) -> Self {
        self.mass_inertia = mi;
        self.descriptor.mass = Some(mi.m);
        self.descriptor.inertia = Some(mi.j);
        self
    }

    pub fn mass_inertia(&self) -> MassInertia {
        self.mass_inertia
    }

    pub fn descriptor(&self) -> &BodyDescriptor {
        &self.descriptor
    }

    pub fn hash(&self) -> String {
        self.descriptor.hash()
    }

    /// Disks and support-Fourier bodies have a differentiable support function.
    pub fn is_strictly_convex(&self) -> bool {
        !matches!(self.shape, Shape::Polygon(_))
    }

    pub fn is_disk(&self) -> bool {
        matches!(self.shape, Shape::Disk(_))
    }

    pub fn disk_radius(&self) -> Option<f64> {
        match self.shape {
            Shape::Disk(r) => Some(r),
            _ => None,
        }
    }

    pub fn polygon_vertices(&self) -> Option<&[Vector2<f64>]> {
        match &self.shape {
            Shape::Polygon(v) => Some(v),
            _ => None,
        }
    }

    pub(crate) fn require_smooth(&self, what: &str) -> Result<()> {
        if self.is_strictly_convex() {
            Ok(())
        } else {
            Err(Error::UnsupportedBody(format!(
                "{what} needs a strictly convex body with differentiable boundary; polygons are not admitted"
            )))
        }
    }

    /// Support value `h(e(φ))` of the reference body.
    pub fn support_value(&self, phi: f64) -> f64 {
        match &self.shape {
            Shape::Disk(r) => *r,
            Shape::Polygon(v) => {
                let u = e(phi);
                v.iter().map(|x| x.dot(&u)).fold(f64::NEG_INFINITY, f64::max)
            }
            Shape::Fourier(p) => p.jet(phi).h,
        }
    }

    /// `h, h′, h″` at angle `φ`; `None` for polygons.
    pub fn support_jet(&self, phi: f64) -> Option<Jet> {
        match &self.shape {
            Shape::Disk(r) => Some(Jet { h: *r, dh: 0.0, d2h: 0.0 }),
            Shape::Polygon(_) => None,
            Shape::Fourier(p) => Some(p.jet(phi)),
        }
    }

    /// Boundary point with outward normal `e(φ)`; the midpoint of the supporting edge on ties.
    pub fn support_point(&self, phi: f64) -> Vector2<f64> {
        match &self.shape {
            Shape::Disk(r) => *r * e(phi),
            Shape::Polygon(v) => {
                let u = e(phi);
                let h = v.iter().map(|x| x.dot(&u)).fold(f64::NEG_INFINITY, f64::max);
                let scale = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
                let tied: Vec<_> =
                    v.iter().filter(|x| h - x.dot(&u) <= 1e-12 * scale).collect();
                tied.iter().fold(Vector2::zeros(), |acc, x| acc + *x) / tied.len() as f64
            }
            Shape::Fourier(p) => {
                let j = p.jet(phi);
                j.h * e(phi) + j.dh * perp(&e(phi))
            }
        }
    }

    /// Support value and support point for direction `u` (normalized internally).
    pub fn support(&self, u: &Vector2<f64>) -> Result<(f64, Vector2<f64>)> {
        let len = u.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::InvalidInput("support direction must be nonzero and finite".into()));
        }
        let phi = u.y.atan2(u.x);
        Ok((self.support_value(phi), self.support_point(phi)))
    }

    /// Largest distance from the centroid to the boundary.
    pub fn circumradius(&self) -> f64 {
        match &self.shape {
            Shape::Disk(r) => *r,
            Shape::Polygon(v) => v.iter().map(|x| x.norm()).fold(0.0, f64::max),
            Shape::Fourier(_) => (0..FOURIER_GRID)
                .map(|i| self.support_value(TAU * i as f64 / FOURIER_GRID as f64))
                .fold(0.0, f64::max),
        }
    }
}

fn build_disk(r: f64) -> Result<(Shape, MassInertia)> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidInput(format!("disk radius must be positive and finite, got {r}")));
    }
    Ok((Shape::Disk(r), MassInertia { m: PI * r * r, j: 0.5 * PI * r.powi(4) }))
}

fn build_polygon(raw: &[[f64; 2]]) -> Result<(Shape, MassInertia)> {
    if raw.len() < 3 {
        return Err(Error::InvalidInput("polygon needs at least three vertices".into()));
    }
    if raw.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("polygon vertices must be finite".into()));
    }
    let v: Vec<Vector2<f64>> = raw.iter().map(|p| Vector2::new(p[0], p[1])).collect();
    let n = v.len();
    let diameter = v
        .iter()
        .flat_map(|a| v.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    if diameter <= 0.0 {
        return Err(Error::InvalidInput("degenerate polygon".into()));
    }
    for i in 0..n {
        let a = v[(i + 1) % n] - v[i];
        let b = v[(i + 2) % n] - v[(i + 1) % n];
        if a.perp(&b) <= 1e-12 * diameter * diameter {
            return Err(Error::InvalidInput(format!(
                "polygon must be strictly convex and counterclockwise (turn at vertex {} is not positive)",
                (i + 1) % n
            )));
        }
    }
    // A convex polygon whose turns are all left can still wind more than once.
    let total_turn: f64 = (0..n)
        .map(|i| {
            let a = v[(i + 1) % n] - v[i];
            let b = v[(i + 2) % n] - v[(i + 1) % n];
            a.perp(&b).atan2(a.dot(&b))
        })
        .sum();
    if (total_turn - TAU).abs() > 1e-6 {
        return Err(Error::InvalidInput("polygon vertex sequence winds more than once".into()));
    }

    let (mut area2, mut cx, mut cy, mut inertia) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let cr = a.perp(&b);
        area2 += cr;
        cx += (a.x + b.x) * cr;
        cy += (a.y + b.y) * cr;
        inertia += cr * (a.x * a.x + a.x * b.x + b.x * b.x + a.y * a.y + a.y * b.y + b.y * b.y);
    }
    let area = 0.5 * area2;
    let centroid = Vector2::new(cx, cy) / (3.0 * area2);
    if centroid.norm() > 1e-9 * diameter {
        return Err(Error::InvalidInput(format!(
            "polygon centroid ({:.3e}, {:.3e}) must coincide with the origin",
            centroid.x, centroid.y
        )));
    }
    Ok((Shape::Polygon(v), MassInertia { m: area, j: inertia / 12.0 }))
}

/// Area, inertia about the origin and centroid by trapezoidal quadrature.
fn fourier_moments(p: &TrigPoly) -> (f64, f64, Vector2<f64>) {
    let dphi = TAU / FOURIER_GRID as f64;
    let (mut area, mut inertia, mut first) = (0.0, 0.0, Vector2::zeros());
    for i in 0..FOURIER_GRID {
        let phi = i as f64 * dphi;
        let j = p.jet(phi);
        let w = j.h * (j.h + j.d2h);
        let x = j.h * e(phi) + j.dh * perp(&e(phi));
        area += 0.5 * w;
        inertia += 0.25 * x.norm_squared() * w;
        first += x * (w / 3.0);
    }
    let area = area * dphi;
    (area, inertia * dphi, first * dphi / area)
}

fn build_fourier(cos: &[f64], sin: &[f64]) -> Result<(Shape, MassInertia)> {
    if cos.is_empty() {
        return Err(Error::InvalidInput("support-Fourier body needs at least the constant term".into()));
    }
    if cos.iter().chain(sin).any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("support-Fourier coefficients must be finite".into()));
    }
    if cos.len().max(sin.len() + 1) > 512 {
        return Err(Error::InvalidInput("support-Fourier order is limited to 511".into()));
    }
    let mut p = TrigPoly::new(cos, sin);
    if p.c.len() < 2 {
        p.c.push(0.0);
        p.s.push(0.0);
    }
    let curvature_ok = |p: &TrigPoly| {
        (0..FOURIER_GRID).all(|i| {
            let j = p.jet(TAU * i as f64 / FOURIER_GRID as f64);
            j.h + j.d2h > 0.0
        })
    };
    if !curvature_ok(&p) {
        return Err(Error::InvalidInput(
            "support function must satisfy h + h'' > 0 (strict convexity)".into(),
        ));
    }
    // Translating the body by -c subtracts c·e(φ) from h.
    let (_, _, c) = fourier_moments(&p);
    p.c[1] -= c.x;
    p.s[1] -= c.y;
    let positive = (0..FOURIER_GRID).all(|i| p.jet(TAU * i as f64 / FOURIER_GRID as f64).h > 0.0);
    if !positive {
        return Err(Error::InvalidInput("support function must be positive about the centroid".into()));
    }
    let (area, inertia, _) = fourier_moments(&p);
    if !(area.is_finite() && area > 0.0 && inertia.is_finite() && inertia > 0.0) {
        return Err(Error::InvalidInput("support-Fourier body has degenerate area".into()));
    }
    Ok((Shape::Fourier(p), MassInertia { m: area, j: inertia }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_inertia_matrix() {
        let mi = MassInertia::new(4.0, 9.0).unwrap();
        let m = mi.matrix();
        assert_eq!(m, m.transpose());
        assert!((m.determinant() - 16.0 * 9.0).abs() < 1e-12);
        assert!(MassInertia::new(0.0, 1.0).is_err());
        assert!(MassInertia::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn disk_support_and_moments() {
        let b = ConvexBody2D::disk(0.5).unwrap();
        let (h, s) = b.support(&Vector2::new(1.0, 0.0)).unwrap();
        assert_eq!(h, 0.5);
        assert!((s - Vector2::new(0.5, 0.0)).norm() < 1e-15);
        let mi = b.mass_inertia();
        assert!((mi.m - PI * 0.25).abs() < 1e-15);
        assert!((mi.j - PI / 32.0).abs() < 1e-15);
        assert!(ConvexBody2D::disk(-1.0).is_err());
    }

    #[test]
    fn square_support_ties_resolve_to_edge_midpoint() {
        let b = ConvexBody2D::polygon(&[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]).unwrap();
        let (h, s) = b.support(&Vector2::new(1.0, 0.0)).unwrap();
        assert!((h - 0.5).abs() < 1e-15);
        assert!((s - Vector2::new(0.5, 0.0)).norm() < 1e-15);
        let mi = b.mass_inertia();
        assert!((mi.m - 1.0).abs() < 1e-15);
        assert!((mi.j - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn polygon_validation() {
        // clockwise
        assert!(ConvexBody2D::polygon(&[[-0.5, -0.5], [-0.5, 0.5], [0.5, 0.5], [0.5, -0.5]]).is_err());
        // off-centre
        assert!(ConvexBody2D::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).is_err());
        // collinear vertex
        assert!(ConvexBody2D::polygon(&[[-0.5, -0.5], [0.0, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])
            .is_err());
        assert!(ConvexBody2D::polygon(&[[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn fourier_support_point_matches_parametrization() {
        let b = ConvexBody2D::support_fourier(&[1.0, 0.0, 0.1], &[]).unwrap();
        let (h, s) = b.support(&Vector2::new(1.0, 0.0)).unwrap();
        assert!((h - 1.1).abs() < 1e-14);
        assert!((s - Vector2::new(1.1, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn fourier_constant_is_a_disk() {
        let b = ConvexBody2D::support_fourier(&[0.7], &[]).unwrap();
        let d = ConvexBody2D::disk(0.7).unwrap();
        assert!((b.mass_inertia().m - d.mass_inertia().m).abs() < 1e-12);
        assert!((b.mass_inertia().j - d.mass_inertia().j).abs() < 1e-12);
    }

    #[test]
    fn fourier_bodies_are_recentred() {
        // A disk of radius 1 centred at (0.2, -0.1).
        let b = ConvexBody2D::support_fourier(&[1.0, 0.2], &[-0.1]).unwrap();
        for i in 0..16 {
            let phi = i as f64 * 0.4;
            assert!((b.support_value(phi) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_validation() {
        assert!(ConvexBody2D::support_fourier(&[1.0, 0.0, 0.5], &[]).is_err());
        assert!(ConvexBody2D::support_fourier(&[], &[]).is_err());
        assert!(ConvexBody2D::support_fourier(&[-1.0], &[]).is_err());
    }

    #[test]
    fn descriptor_round_trip_and_overrides() {
        let text = r#"{"type":"support_fourier","cos":[1.0,0.0,0.1],"sin":[0.0,0.02],"mass":2.0}"#;
        let d = BodyDescriptor::from_json(text).unwrap();
        assert_eq!(BodyDescriptor::from_json(&d.to_json()).unwrap(), d);
        let b = ConvexBody2D::from_descriptor(&d).unwrap();
        assert_eq!(b.mass_inertia().m, 2.0);
        assert!(BodyDescriptor::from_json(r#"{"type":"blob"}"#).is_err());
        assert!(ConvexBody2D::from_json(r#"{"type":"disk","r":0.5,"inertia":-1}"#).is_err());
        assert_eq!(d.hash().len(), 64);
    }
}

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry2d::{CollisionParam2D, ConvexBody2D, MassInertia};
use crate::scattering2d::{sigma, Family, VelocityState2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FourierTerm {
    One,
    Cos(u32),
    Sin(u32),
}

impl FourierTerm {
    pub fn eval(&self, theta: f64) -> f64 {
        match *self {
            FourierTerm::One => 1.0,
            FourierTerm::Cos(k) => (k as f64 * theta).cos(),
            FourierTerm::Sin(k) => (k as f64 * theta).sin(),
        }
    }

    fn name(&self) -> String {
        match self {
            FourierTerm::One => "1".into(),
            FourierTerm::Cos(k) => format!("cos({k}θ)"),
            FourierTerm::Sin(k) => format!("sin({k}θ)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monomial {
    V1,
    V2,
    W,
    V1V1,
    V2V2,
    WW,
    V1V2,
    V1W,
    V2W,
}

impl Monomial {
    pub const ALL: [Monomial; 9] = [
        Monomial::V1,
        Monomial::V2,
        Monomial::W,
        Monomial::V1V1,
        Monomial::V2V2,
        Monomial::WW,
        Monomial::V1V2,
        Monomial::V1W,
        Monomial::V2W,
    ];

    pub fn eval(&self, v: &Vector2<f64>, w: f64) -> f64 {
        match self {
            Monomial::V1 => v.x,
            Monomial::V2 => v.y,
            Monomial::W => w,
            Monomial::V1V1 => v.x * v.x,
            Monomial::V2V2 => v.y * v.y,
            Monomial::WW => w * w,
            Monomial::V1V2 => v.x * v.y,
            Monomial::V1W => v.x * w,
            Monomial::V2W => v.y * w,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Monomial::V1 => "v1",
            Monomial::V2 => "v2",
            Monomial::W => "ω",
            Monomial::V1V1 => "v1²",
            Monomial::V2V2 => "v2²",
            Monomial::WW => "ω²",
            Monomial::V1V2 => "v1·v2",
            Monomial::V1W => "v1·ω",
            Monomial::V2W => "v2·ω",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisFunction {
    Fourier(FourierTerm),
    Monomial(Monomial),
    Cross(FourierTerm, Monomial),
}

impl BasisFunction {
    pub fn eval(&self, v: &Vector2<f64>, w: f64, theta: f64) -> f64 {
        match self {
            BasisFunction::Fourier(f) => f.eval(theta),
            BasisFunction::Monomial(m) => m.eval(v, w),
            BasisFunction::Cross(f, m) => f.eval(theta) * m.eval(v, w),
        }
    }

    pub fn name(&self) -> String {
        match self {
            BasisFunction::Fourier(f) => f.name(),
            BasisFunction::Monomial(m) => m.name().into(),
            BasisFunction::Cross(f, m) => format!("{}·{}", f.name(), m.name()),
        }
    }
}

/// Fourier modes up to `fourier_order` in `ϑ`, the nine velocity monomials of
/// degree one and two, and optionally every product of a non-constant mode
/// with a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub fourier_order: u32,
    pub cross_terms: bool,
}

impl BasisSpec {
    pub fn fourier_terms(&self) -> Vec<FourierTerm> {
        let mut out = vec![FourierTerm::One];
        for k in 1..=self.fourier_order {
            out.push(FourierTerm::Cos(k));
            out.push(FourierTerm::Sin(k));
        }
        out
    }

    pub fn functions(&self) -> Vec<BasisFunction> {
        let fourier = self.fourier_terms();
        let mut out: Vec<_> = fourier.iter().map(|f| BasisFunction::Fourier(*f)).collect();
        out.extend(Monomial::ALL.iter().map(|m| BasisFunction::Monomial(*m)));
        if self.cross_terms {
            for f in &fourier[1..] {
                out.extend(Monomial::ALL.iter().map(|m| BasisFunction::Cross(*f, *m)));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        let modes = 2 * self.fourier_order as usize + 1;
        modes + 9 + if self.cross_terms { 9 * (modes - 1) } else { 0 }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(2K + 1) + 3`: orientation modes, two momentum components and energy.
    pub fn expected_dimension(&self) -> usize {
        2 * self.fourier_order as usize + 1 + 3
    }
}

/// Linear combination of basis functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateInvariant {
    pub functions: Vec<BasisFunction>,
    pub coefficients: Vec<f64>,
}

impl CandidateInvariant {
    pub fn new(functions: Vec<BasisFunction>, coefficients: Vec<f64>) -> Result<Self> {
        if functions.len() != coefficients.len() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for {} basis functions",
                coefficients.len(),
                functions.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(Self { functions, coefficients })
    }

    pub fn single(f: BasisFunction) -> Self {
        Self { functions: vec![f], coefficients: vec![1.0] }
    }

    pub fn evaluate(&self, v: &Vector2<f64>, w: f64, theta: f64) -> f64 {
        self.functions.iter().zip(&self.coefficients).map(|(f, c)| c * f.eval(v, w, theta)).sum()
    }
}

/// `a(ϑ) + b·v + c (m|v|² + Jω²)` with `a` given by Fourier coefficients
/// `[a₀, a_cos1, a_sin1, a_cos2, …]`.
pub fn characterized_family(
    mi: &MassInertia,
    a_coeffs: &[f64],
    b: Vector2<f64>,
    c: f64,
) -> Result<CandidateInvariant> {
    if a_coeffs.len() % 2 == 0 {
        return Err(Error::InvalidInput(
            "orientation coefficients must be [a0, cos1, sin1, …] (odd length)".into(),
        ));
    }
    let spec = BasisSpec { fourier_order: (a_coeffs.len() / 2) as u32, cross_terms: false };
    let mut coeffs = a_coeffs.to_vec();
    coeffs.extend([b.x, b.y, 0.0, c * mi.m, c * mi.m, c * mi.j, 0.0, 0.0, 0.0]);
    CandidateInvariant::new(spec.functions(), coeffs)
}

/// Residual of the pair functional under the chosen family at `(V, β)`.
pub fn residual(
    phi: &CandidateInvariant,
    family: Family,
    mi: &MassInertia,
    body: &ConvexBody2D,
    v: &VelocityState2D,
    beta: &CollisionParam2D,
) -> Result<f64> {
    let out = sigma(family, mi, body, beta)?.apply(v);
    Ok((phi.evaluate(&out.v, out.omega, beta.theta) - phi.evaluate(&v.v, v.omega, beta.theta))
        + (phi.evaluate(&out.v_bar, out.omega_bar, beta.theta_bar)
            - phi.evaluate(&v.v_bar, v.omega_bar, beta.theta_bar)))
}

/// Monomials of degree at most two in a 3D velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SphereMonomial {
    One,
    V(usize),
    Square(usize),
    Product(usize, usize),
}

impl SphereMonomial {
    pub fn all() -> Vec<SphereMonomial> {
        let mut out = vec![SphereMonomial::One];
        out.extend((0..3).map(SphereMonomial::V));
        out.extend((0..3).map(SphereMonomial::Square));
        out.extend([(0, 1), (0, 2), (1, 2)].map(|(i, j)| SphereMonomial::Product(i, j)));
        out
    }

    pub fn eval(&self, v: &Vector3<f64>) -> f64 {
        match *self {
            SphereMonomial::One => 1.0,
            SphereMonomial::V(i) => v[i],
            SphereMonomial::Square(i) => v[i] * v[i],
            SphereMonomial::Product(i, j) => v[i] * v[j],
        }
    }

    pub fn name(&self) -> String {
        match *self {
            SphereMonomial::One => "1".into(),
            SphereMonomial::V(i) => format!("v{}", i + 1),
            SphereMonomial::Square(i) => format!("v{}²", i + 1),
            SphereMonomial::Product(i, j) => format!("v{}·v{}", i + 1, j + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn fourier() -> ConvexBody2D {
        ConvexBody2D::support_fourier(&[1.0, 0.0, 0.15, 0.0, 0.0, 0.01], &[0.0, 0.03]).unwrap()
    }

    #[test]
    fn basis_sizes() {
        let s = BasisSpec { fourier_order: 1, cross_terms: false };
        assert_eq!(s.functions().len(), 12);
        assert_eq!(s.len(), 12);
        let s = BasisSpec { fourier_order: 2, cross_terms: true };
        assert_eq!(s.functions().len(), 5 + 9 + 36);
        assert_eq!(s.len(), 50);
        assert_eq!(s.expected_dimension(), 8);
    }

    #[test]
    fn classical_invariants_have_zero_residual() {
        let b = fourier();
        let mi = b.mass_inertia();
        let mut rng = sampling::sample_rng(41, 0);
        let momentum = characterized_family(&mi, &[0.0], Vector2::new(1.0, 0.0), 0.0).unwrap();
        let energy = characterized_family(&mi, &[0.0], Vector2::zeros(), 1.0).unwrap();
        let orient = characterized_family(&mi, &[0.0, 1.0, 0.0], Vector2::zeros(), 0.0).unwrap();
        for _ in 0..100 {
            let beta = sampling::collision_param(&mut rng);
            let v = sampling::velocity(&mut rng);
            for f in Family::ALL {
                assert!(residual(&momentum, f, &mi, &b, &v, &beta).unwrap().abs() < 1e-12);
                assert!(residual(&energy, f, &mi, &b, &v, &beta).unwrap().abs() < 1e-10);
                assert_eq!(residual(&orient, f, &mi, &b, &v, &beta).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn spin_is_not_invariant() {
        let b = fourier();
        let mi = b.mass_inertia();
        let spin = CandidateInvariant::single(BasisFunction::Monomial(Monomial::W));
        let mut rng = sampling::sample_rng(42, 0);
        let worst = (0..100)
            .map(|_| {
                let beta = sampling::collision_param(&mut rng);
                let v = sampling::velocity(&mut rng);
                residual(&spin, Family::NonCanonical, &mi, &b, &v, &beta).unwrap().abs()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn candidate_validation() {
        assert!(CandidateInvariant::new(vec![BasisFunction::Fourier(FourierTerm::One)], vec![]).is_err());
        assert!(characterized_family(&MassInertia::new(1.0, 1.0).unwrap(), &[0.0, 1.0], Vector2::zeros(), 0.0)
            .is_err());
        assert_eq!(SphereMonomial::all().len(), 10);
    }
}

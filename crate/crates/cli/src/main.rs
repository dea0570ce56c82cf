//! `hardscatter` command-line runner.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on invalid input.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardscatter::dynamics::{self, ParticleState, Trajectory};
use hardscatter::geometry2d::docd;
use hardscatter::invariants::{nullspace_solve, sphere_nullspace_solve, BasisSpec};
use hardscatter::liealg::lie_probe;
use hardscatter::scattering2d::{verify_family, Tolerances};
use hardscatter::spheres3d::sphere_suite;
use hardscatter::{CollisionParam2D, ConvexBody2D, Family, VERSION};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "hardscatter", version, about = "Scattering maps and collision invariants for convex hard particles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Distance of closest approach over a grid of ψ at fixed orientations.
    Docd {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 360)]
        grid: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_bar: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Certify a scattering family over random velocities and collision parameters.
    Verify {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value = "canonical")]
        family: Family,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Replace every residual bound by this value.
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Span ranks of the reduced generator curves and the so(3) probe.
    Lie {
        #[arg(long)]
        body: PathBuf,
        /// ψ samples per orientation pair.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Orientation grid size per axis.
        #[arg(long, default_value_t = 8)]
        orientations: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Solve for the collision invariants spanned by a polynomial-Fourier basis.
    Invariants {
        #[arg(long, required_unless_present = "sphere")]
        body: Option<PathBuf>,
        #[arg(long, default_value = "noncanonical")]
        family: Family,
        /// Fourier order in the orientation.
        #[arg(long, default_value_t = 1)]
        fourier: u32,
        /// Include orientation-velocity products.
        #[arg(long)]
        cross: bool,
        /// Hard spheres instead of the 2D body.
        #[arg(long)]
        sphere: bool,
        /// Defaults to 20 samples per basis function.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        validation_samples: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// All hard-sphere checks.
    SphereSuite {
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Drop the 1/√2 normalization of the collision normal; the suite must fail.
        #[arg(long)]
        negative_control: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Event-driven free flight of a particle pair.
    Simulate {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value = "canonical")]
        family: Family,
        #[arg(long, value_enum, conflicts_with = "init")]
        preset: Option<Preset>,
        /// JSON particle state `{x, x_bar, theta, theta_bar, v: {v, v_bar, omega, omega_bar}, t}`.
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 100)]
        max_events: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    HeadOn,
    Miss,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Check,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Context {
    command_line: String,
    seed: u64,
    out: Option<PathBuf>,
}

impl Context {
    fn write(&self, text: &str) -> Outcome {
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn envelope(&self, body_hash: Option<String>, report: impl Serialize) -> Result<String, Failure> {
        let v = json!({
            "tool": "hardscatter",
            "version": VERSION,
            "command_line": self.command_line,
            "seed": self.seed,
            "body_hash": body_hash,
            "report": report,
        });
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    fn csv_header(&self, body_hash: &str) -> String {
        format!(
            "# tool hardscatter {VERSION}\n# command_line {}\n# seed {}\n# body_hash {body_hash}\n",
            self.command_line, self.seed
        )
    }

    fn json(&self, body_hash: Option<String>, report: impl Serialize, passed: bool) -> Outcome {
        self.write(&self.envelope(body_hash, report)?)?;
        if passed {
            Ok(())
        } else {
            Err(Failure::Check)
        }
    }
}

fn load_body(path: &PathBuf) -> Result<ConvexBody2D, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(ConvexBody2D::from_json(&text)?)
}

fn json_only(common: &Common) -> Outcome {
    match common.format {
        Some(Format::Csv) => Err(Failure::Input("this command only writes JSON".into())),
        _ => Ok(()),
    }
}

fn positive(name: &str, n: u64) -> Outcome {
    if n == 0 {
        return Err(Failure::Input(format!("--{name} must be positive")));
    }
    Ok(())
}

fn cmd_docd(ctx: &Context, body: &ConvexBody2D, grid: usize, theta: f64, theta_bar: f64, common: &Common) -> Outcome {
    positive("grid", grid as u64)?;
    if !(theta.is_finite() && theta_bar.is_finite()) {
        return Err(Failure::Input("orientations must be finite".into()));
    }
    let rows: Vec<(f64, f64)> = (0..grid)
        .map(|k| {
            let psi = TAU * k as f64 / grid as f64;
            (psi, docd(body, &CollisionParam2D::new(psi, theta, theta_bar)))
        })
        .collect();
    if common.format == Some(Format::Json) {
        let report = json!({
            "theta": theta,
            "theta_bar": theta_bar,
            "psi": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
            "d": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
        });
        return ctx.json(Some(body.hash()), report, true);
    }
    let mut text = ctx.csv_header(&body.hash());
    writeln!(text, "# theta {theta:.16e} theta_bar {theta_bar:.16e}").unwrap();
    text.push_str("psi,d\n");
    for (psi, d) in rows {
        writeln!(text, "{psi:.16e},{d:.16e}").unwrap();
    }
    ctx.write(&text)
}

fn cmd_simulate(ctx: &Context, body: &ConvexBody2D, family: Family, init: &ParticleState, horizon: f64, max_events: usize, common: &Common) -> Outcome {
    if !(horizon.is_finite() && horizon > init.t) {
        return Err(Failure::Input("--horizon must be finite and after the initial time".into()));
    }
    if !init.is_finite() {
        return Err(Failure::Input("initial state must be finite".into()));
    }
    let tr = dynamics::simulate(body, &body.mass_inertia(), init, family, horizon, max_events)?;
    let passed = tr.conserves();
    if common.format == Some(Format::Json) {
        return ctx.json(Some(body.hash()), &tr, passed);
    }
    ctx.write(&event_csv(ctx, body, family, &tr))?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn event_csv(ctx: &Context, body: &ConvexBody2D, family: Family, tr: &Trajectory) -> String {
    let mut text = ctx.csv_header(&body.hash());
    writeln!(
        text,
        "# family {family} events {} truncated {} min_sampled_gap {:.16e}",
        tr.events.len(),
        tr.truncated,
        tr.min_sampled_gap
    )
    .unwrap();
    text.push_str(
        "event,t,psi,theta,theta_bar,v1,v2,vb1,vb2,omega,omega_bar,gap,rate_pre,rate_post,grazing,\
         momentum_residual,angular_residual,energy_residual\n",
    );
    for (i, e) in tr.events.iter().enumerate() {
        let b = e.beta_at_contact;
        let v = e.v_post;
        let cols = [
            e.t_event, b.psi, b.theta, b.theta_bar, v.v.x, v.v.y, v.v_bar.x, v.v_bar.y, v.omega, v.omega_bar,
            e.gap_at_event, e.rate_pre, e.rate_post,
        ];
        write!(text, "{i}").unwrap();
        for c in cols {
            write!(text, ",{c:.16e}").unwrap();
        }
        writeln!(
            text,
            ",{},{:.16e},{:.16e},{:.16e}",
            e.grazing, e.momentum_residual, e.angular_residual, e.energy_residual
        )
        .unwrap();
    }
    text
}

fn run(command: Command, command_line: String) -> Outcome {
    let common = match &command {
        Command::Docd { common, .. }
        | Command::Verify { common, .. }
        | Command::Lie { common, .. }
        | Command::Invariants { common, .. }
        | Command::SphereSuite { common, .. }
        | Command::Simulate { common, .. } => common.clone(),
    };
    let ctx = Context { command_line, seed: common.seed, out: common.out.clone() };
    match command {
        Command::Docd { body, grid, theta, theta_bar, .. } => {
            cmd_docd(&ctx, &load_body(&body)?, grid, theta, theta_bar, &common)
        }
        Command::Verify { body, family, samples, tolerance, .. } => {
            json_only(&common)?;
            positive("samples", samples)?;
            let tol = match tolerance {
                Some(t) if t.is_finite() && t > 0.0 => Tolerances::uniform(t),
                Some(_) => return Err(Failure::Input("--tolerance must be positive".into())),
                None => Tolerances::default(),
            };
            let body = load_body(&body)?;
            let r = verify_family(family, &body.mass_inertia(), &body, samples, common.seed)?;
            let passed = r.passed(&tol);
            ctx.json(Some(body.hash()), json!({ "tolerances": tol, "passed": passed, "verification": r }), passed)
        }
        Command::Lie { body, grid, orientations, .. } => {
            json_only(&common)?;
            positive("grid", grid as u64)?;
            positive("orientations", orientations as u64)?;
            let body = load_body(&body)?;
            let r = lie_probe(&body.mass_inertia(), &body, orientations, grid)?;
            let passed = r.passed();
            let summary = json!({
                "passed": passed,
                "k_rank": r.k_rank_min,
                "gamma_span_rank": r.gamma_span_rank_min,
                "gamma_direction_rank": r.gamma_direction_rank_min,
                "so3_rank": r.so3_rank,
                "gap_min": r.gap_min,
                "flagged": r.flagged,
                "so3_singular_values": r.so3.span.singular_values,
                "probe": r,
            });
            ctx.json(Some(body.hash()), summary, passed)
        }
        Command::Invariants { body, family, fourier, cross, sphere, samples, validation_samples, .. } => {
            json_only(&common)?;
            if let Some(n) = samples {
                positive("samples", n)?;
            }
            if let Some(n) = validation_samples {
                positive("validation-samples", n)?;
            }
            if sphere {
                let n = samples.unwrap_or(200);
                let r = sphere_nullspace_solve(n, validation_samples.unwrap_or(n), common.seed)?;
                let passed = r.passed();
                return ctx.json(None, json!({ "passed": passed, "nullspace": r }), passed);
            }
            let body = load_body(body.as_ref().expect("clap requires --body"))?;
            let spec = BasisSpec { fourier_order: fourier, cross_terms: cross };
            let n = samples.unwrap_or(20 * spec.len() as u64);
            let r = nullspace_solve(family, &body.mass_inertia(), &body, &spec, n, validation_samples.unwrap_or(n), common.seed)?;
            let passed = r.passed();
            ctx.json(Some(body.hash()), json!({ "passed": passed, "nullspace": r }), passed)
        }
        Command::SphereSuite { samples, negative_control, .. } => {
            json_only(&common)?;
            positive("samples", samples)?;
            let r = sphere_suite(samples, common.seed, negative_control)?;
            let passed = r.passed;
            ctx.json(None, r, passed)
        }
        Command::Simulate { body, family, preset, init, horizon, max_events, .. } => {
            let body = load_body(&body)?;
            let state = match (preset, init) {
                (_, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<ParticleState>(&text)?
                }
                (Some(Preset::Miss), None) => dynamics::offset_miss(),
                (Some(Preset::HeadOn) | None, None) => dynamics::head_on_disks(),
            };
            cmd_simulate(&ctx, &body, family, &state, horizon, max_events, &common)
        }
    }
}

fn main() -> ExitCode {
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    let cli = Cli::parse();
    match run(cli.command, command_line) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn failure_from_library_error_is_input() {
        let e: Failure = hardscatter::Error::InvalidInput("x".into()).into();
        assert!(matches!(e, Failure::Input(_)));
    }
}

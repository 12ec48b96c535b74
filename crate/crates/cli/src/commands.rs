use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Subcommand, ValueEnum};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use nlse_gauge::dynamics::{
    boost_check, commuting_diagram, continuity_at, ehrenfest_check, run, EvolutionSpec, Status,
};
use nlse_gauge::gauge_algebra::sampling::{
    random_coefficients, random_gauge, random_nonlinear_gauge, Ranges, SAMPLE_TIMES,
};
use nlse_gauge::gauge_algebra::{
    act_on_coefficients, classify, invariants, mat3_mul, Classification, CoefficientVector, GaugeElement,
};
use nlse_gauge::wavefield::io::{write_csv, write_json as write_state};
use nlse_gauge::wavefield::{apply_gauge, apply_gauge_two, product_state, WaveFunction};

use crate::config::{RunConfig, StateSpec};
use crate::reports::{
    read_json, write_json, AlgebraReport, ClassifyReport, ContinuityReport, EvolveReport, InvariantsReport,
    SeparationReport, TransformReport, Verdict, VerifyReport,
};
use crate::CliError;

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Apply the configured gauge element to the configured state.
    Transform,
    /// Act with the configured gauge element on the equation's coefficients.
    Act,
    /// Gauge invariants of the equation, symbolic and sampled on the window.
    Invariants,
    /// Family of the equation, or of an invariants report given with --input.
    Classify {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Coefficient vector of the configured equation.
    Preset,
    /// Evolve the configured state and write its trajectory.
    Evolve,
    /// Run one verification scenario.
    Verify { scenario: VerifyScenario },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyScenario {
    CommutingDiagram,
    Ehrenfest,
    Continuity,
    Separation,
    Boost,
    Algebra,
}

impl VerifyScenario {
    fn file_name(self) -> String {
        let name = self.to_possible_value().expect("no skipped variants");
        format!("{}.json", name.get_name())
    }
}

/// Runs one subcommand and returns a one-line summary for stdout.
///
/// `base` resolves relative paths inside the config.
pub fn dispatch(cmd: &Command, cfg: &RunConfig, base: &Path) -> Result<String, CliError> {
    let out = &cfg.out_dir;
    match cmd {
        Command::Transform => transform(cfg, base),
        Command::Act => {
            let c = cfg.equation.coefficients(cfg.units)?;
            let g = cfg.require_gauge()?;
            let acted = act_on_coefficients(&g, &c)?;
            write_json(out, "coefficients.json", &c)?;
            write_json(out, "acted.json", &acted)?;
            Ok(format!("wrote {}", out.join("acted.json").display()))
        }
        Command::Invariants => {
            let c = cfg.equation.coefficients(cfg.units)?;
            let window = cfg.window();
            let iv = invariants(&c)?;
            let samples = window
                .times()
                .into_iter()
                .map(|t| iv.sample(t))
                .collect::<Result<Vec<_>, _>>()?;
            write_json(out, "invariants.json", &InvariantsReport { window, invariants: iv, samples })?;
            Ok(format!("wrote {}", out.join("invariants.json").display()))
        }
        Command::Classify { input } => {
            let input = input.clone().or_else(|| cfg.input.as_ref().map(|p| base.join(p)));
            let report = match input {
                Some(path) => {
                    let r: InvariantsReport = read_json(&path)?;
                    ClassifyReport {
                        family: classify(&r.invariants, &r.window)?,
                        restricted: None,
                        zero: None,
                        window: r.window,
                    }
                }
                None => {
                    let window = cfg.window();
                    let c = cfg.equation.coefficients(cfg.units)?;
                    let k = Classification::of(&c, &window)?;
                    ClassifyReport {
                        family: k.family,
                        restricted: Some(k.restricted),
                        zero: Some(k.zero),
                        window,
                    }
                }
            };
            write_json(out, "classification.json", &report)?;
            Ok(report.family.to_string())
        }
        Command::Preset => {
            let c = cfg.equation.coefficients(cfg.units)?;
            write_json(out, "coefficients.json", &c)?;
            Ok(format!("wrote {}", out.join("coefficients.json").display()))
        }
        Command::Evolve => evolve(cfg, base),
        Command::Verify { scenario } => verify(*scenario, cfg, base),
    }
}

fn write_state_files(dir: &Path, stem: &str, psi: &WaveFunction) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    write_csv(psi, BufWriter::new(File::create(dir.join(format!("{stem}.csv")))?))?;
    write_state(psi, BufWriter::new(File::create(dir.join(format!("{stem}.json")))?))?;
    Ok(())
}

fn evolution_spec(cfg: &RunConfig, coefficients: CoefficientVector) -> Result<EvolutionSpec, CliError> {
    Ok(EvolutionSpec {
        coefficients,
        potential: cfg.potential.clone(),
        t0: cfg.t0,
        t1: cfg.t_final,
        dt: cfg.dt,
        grid: cfg.grid()?,
        floors: cfg.floors,
        stride: cfg.stride,
        snapshot_stride: cfg.snapshot_stride,
        form: cfg.form,
        dealias: cfg.dealias,
    })
}

fn initial_state(state: &StateSpec, cfg: &RunConfig, base: &Path) -> Result<WaveFunction, CliError> {
    Ok(state.build(cfg.grid()?, base)?.with_time(cfg.t0))
}

fn transform(cfg: &RunConfig, base: &Path) -> Result<String, CliError> {
    let g = cfg.require_gauge()?;
    let psi = initial_state(&cfg.state, cfg, base)?;
    let moved = apply_gauge(&g, &psi, cfg.t0, &cfg.floors)?;
    let (gamma, lambda) = g.params_at(cfg.t0)?;
    let report = TransformReport {
        t: cfg.t0,
        gamma,
        lambda,
        norm: moved.norm(),
        max_density_change: moved.max_density_diff(&psi)?,
    };
    write_state_files(&cfg.out_dir, "state", &psi)?;
    write_state_files(&cfg.out_dir, "transformed", &moved)?;
    write_json(&cfg.out_dir, "transform.json", &report)?;
    Ok(format!("max density change {:e}", report.max_density_change))
}

fn evolve(cfg: &RunConfig, base: &Path) -> Result<String, CliError> {
    let c = cfg.equation.coefficients(cfg.units)?;
    let family = Classification::of(&c, &cfg.window())?.family;
    let spec = evolution_spec(cfg, c)?;
    let psi0 = initial_state(&cfg.state, cfg, base)?;
    let out = run(&spec, &psi0)?;
    info!("evolve: {} steps of dt = {}", out.steps, out.dt);
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir)?;
    out.trajectory
        .write_csv(BufWriter::new(File::create(dir.join("trajectory.csv"))?))?;
    write_state_files(dir, "final", &out.final_state)?;
    let report = EvolveReport {
        status: out.status,
        family,
        t0: spec.t0,
        t_final: out.final_state.time_tag,
        dt: out.dt,
        steps: out.steps,
        regularized: out.regularized,
        max_norm_drift: out.trajectory.max_norm_drift(),
        edge_mass: out.final_state.edge_mass(),
    };
    write_json(dir, "report.json", &report)?;
    match out.status {
        Status::Ok => Ok(format!("{} steps, max norm drift {:e}", out.steps, report.max_norm_drift)),
        _ => Err(CliError::Numerical(format!("run diverged at t = {}", report.t_final))),
    }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn finish<T: Serialize>(cfg: &RunConfig, r: VerifyReport<T>, detail: String) -> Result<String, CliError> {
    write_json(&cfg.out_dir.join("verify"), &r.scenario.file_name(), &r)?;
    match r.verdict {
        Verdict::Fail => Err(CliError::Numerical(format!("verification failed: {detail}"))),
        Verdict::Pass => Ok(format!("pass: {detail}")),
        Verdict::NotApplicable => Ok(format!("not applicable: {detail}")),
    }
}

fn verify(scenario: VerifyScenario, cfg: &RunConfig, base: &Path) -> Result<String, CliError> {
    let tol = cfg.tolerances;
    match scenario {
        VerifyScenario::CommutingDiagram => {
            let g = cfg.gauge_or(GaugeElement::constant(0.5, 1.0)?);
            let psi0 = initial_state(&cfg.state, cfg, base)?;
            let r = commuting_diagram(cfg.linear, &g, &psi0, cfg.t0, cfg.t_final, cfg.dt, cfg.floors)?;
            let m = r.max_density_mismatch;
            let detail = format!("{:?}, max density mismatch {m:?}", r.status);
            let ok = r.status == Status::Ok && m.is_some_and(|m| m <= tol.commuting);
            let r = VerifyReport { scenario, verdict: verdict(ok), threshold: tol.commuting, report: r };
            finish(cfg, r, detail)
        }
        VerifyScenario::Ehrenfest => {
            let c = cfg.equation.coefficients(cfg.units)?;
            let spec = evolution_spec(cfg, c.clone())?;
            let out = run(&spec, &initial_state(&cfg.state, cfg, base)?)?;
            if out.status != Status::Ok {
                return Err(CliError::Numerical(format!("run diverged at t = {}", out.final_state.time_tag)));
            }
            let r = ehrenfest_check(&out.trajectory, &c)?;
            let detail = format!("first relation residual {:e}", r.first_max_resid);
            let ok = r.first_max_resid <= tol.ehrenfest;
            let r = VerifyReport { scenario, verdict: verdict(ok), threshold: tol.ehrenfest, report: r };
            finish(cfg, r, detail)
        }
        VerifyScenario::Continuity => {
            let c = cfg.equation.coefficients(cfg.units)?;
            let spec = EvolutionSpec {
                stride: 1,
                snapshot_stride: Some(1),
                ..evolution_spec(cfg, c.clone())?
            };
            let r = continuity(&spec, &c, &initial_state(&cfg.state, cfg, base)?)?;
            let detail = format!("observed orders {:?}", r.orders);
            let ok = r.min_order >= tol.continuity_order;
            let r = VerifyReport { scenario, verdict: verdict(ok), threshold: tol.continuity_order, report: r };
            finish(cfg, r, detail)
        }
        VerifyScenario::Separation => {
            let g = cfg.gauge_or(GaugeElement::constant(1.0, 1.0)?);
            let a = initial_state(&cfg.state, cfg, base)?;
            let partner = cfg.partner.clone().unwrap_or(StateSpec::Gaussian {
                x0: 2.0,
                sigma: 0.7,
                k0: -1.0,
            });
            let b = initial_state(&partner, cfg, base)?;
            let t = cfg.t0;
            let joint = apply_gauge_two(&g, &product_state(&a, &b)?, t, &cfg.floors)?;
            let split = product_state(&apply_gauge(&g, &a, t, &cfg.floors)?, &apply_gauge(&g, &b, t, &cfg.floors)?)?;
            let m = joint.max_abs_diff(&split)?;
            let r = VerifyReport {
                scenario,
                verdict: verdict(m <= tol.separation),
                threshold: tol.separation,
                report: SeparationReport { max_abs_diff: m },
            };
            finish(cfg, r, format!("max pointwise mismatch {m:e}"))
        }
        VerifyScenario::Boost => {
            let c = cfg.equation.coefficients(cfg.units)?;
            let spec = evolution_spec(cfg, c)?;
            let r = boost_check(&spec, &initial_state(&cfg.state, cfg, base)?, cfg.velocity)?;
            let (v, detail) = match r.status {
                Status::NotApplicable => (Verdict::NotApplicable, r.reason.clone().unwrap_or_default()),
                st => {
                    let m = r.max_density_mismatch;
                    let ok = st == Status::Ok && m.is_some_and(|m| m <= tol.boost);
                    (verdict(ok), format!("{st:?}, max density mismatch {m:?}"))
                }
            };
            let r = VerifyReport { scenario, verdict: v, threshold: tol.boost, report: r };
            finish(cfg, r, detail)
        }
        VerifyScenario::Algebra => {
            let r = algebra(cfg)?;
            let ok = r.associativity <= tol.algebra
                && r.inverse <= tol.algebra
                && r.homomorphism <= tol.algebra
                && r.invariance <= tol.invariance;
            let detail = format!(
                "assoc {:e}, inverse {:e}, homomorphism {:e}, invariance {:e}",
                r.associativity, r.inverse, r.homomorphism, r.invariance
            );
            let r = VerifyReport { scenario, verdict: verdict(ok), threshold: tol.algebra, report: r };
            finish(cfg, r, detail)
        }
    }
}

/// Centred continuity residuals at the middle snapshot for half-widths
/// m, m/2, m/4 steps, and the orders between consecutive ones.
fn continuity(spec: &EvolutionSpec, c: &CoefficientVector, psi0: &WaveFunction) -> Result<ContinuityReport, CliError> {
    let out = run(spec, psi0)?;
    if out.status != Status::Ok {
        return Err(CliError::Numerical(format!("run diverged at t = {}", out.final_state.time_tag)));
    }
    let snaps = &out.trajectory.snapshots;
    let centre = out.steps / 2;
    let m = (out.steps / 4) / 4 * 4;
    if m < 4 {
        return Err(CliError::Config(format!(
            "continuity check needs at least 16 steps, got {}; lower dt or raise t_final",
            out.steps
        )));
    }
    let d = spec.grid.spectral();
    let mid = &snaps[centre];
    let cs = c.sample(mid.time_tag)?;
    let spacings = vec![m, m / 2, m / 4];
    let residuals: Vec<f64> = spacings
        .iter()
        .map(|&k| continuity_at(&snaps[centre - k], mid, &snaps[centre + k], k as f64 * out.dt, &cs, &d))
        .collect();
    let orders: Vec<f64> = residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(ContinuityReport {
        status: out.status,
        dt: out.dt,
        centre: mid.time_tag,
        spacings,
        min_order: orders.iter().cloned().fold(f64::INFINITY, f64::min),
        residuals,
        orders,
    })
}

fn max_entry_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Group laws on the matrix representation and invariance of the
/// invariants, over `cfg.samples` seeded random draws.
fn algebra(cfg: &RunConfig) -> Result<AlgebraReport, CliError> {
    let identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ranges = Ranges {
        gamma: 2.0,
        lambda_lo: 0.5,
        lambda_hi: 2.0,
        allow_tables: true,
        ..Default::default()
    };
    let xs = [-1.5, 0.0, 0.7, 2.0];
    let (mut assoc, mut inv, mut hom): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..cfg.samples {
        let (a, b, c) = (
            random_gauge(&mut rng, &ranges),
            random_gauge(&mut rng, &ranges),
            random_gauge(&mut rng, &ranges),
        );
        let ab = a.compose(&b)?;
        let left = ab.compose(&c)?;
        let right = a.compose(&b.compose(&c)?)?;
        let round = a.compose(&a.inverse()?)?;
        for &t in &SAMPLE_TIMES {
            for &x in &xs {
                let (ma, mb) = (a.matrix_rep(x, t)?, b.matrix_rep(x, t)?);
                assoc = assoc.max(max_entry_diff(&left.matrix_rep(x, t)?, &right.matrix_rep(x, t)?));
                inv = inv.max(max_entry_diff(&round.matrix_rep(x, t)?, &identity));
                hom = hom.max(max_entry_diff(&ab.matrix_rep(x, t)?, &mat3_mul(&ma, &mb)));
            }
        }
    }

    let ranges = Ranges::default();
    let mut change: f64 = 0.0;
    for _ in 0..cfg.samples {
        let c = random_coefficients(&mut rng, &ranges);
        let g = random_nonlinear_gauge(&mut rng, &ranges);
        let acted = act_on_coefficients(&g, &c)?.coefficients;
        let (before, after) = (invariants(&c)?, invariants(&acted)?);
        for &t in &SAMPLE_TIMES {
            let (p, q) = (before.sample(t)?, after.sample(t)?);
            for (u, v) in p.as_array().iter().zip(q.as_array()) {
                change = change.max((u - v).abs() / u.abs().max(1.0));
            }
        }
    }
    Ok(AlgebraReport {
        seed: cfg.seed,
        samples: cfg.samples,
        associativity: assoc,
        inverse: inv,
        homomorphism: hom,
        invariance: change,
        invariance_threshold: cfg.tolerances.invariance,
    })
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nlse_gauge::dynamics::{Potential, RhsForm};
use nlse_gauge::gauge_algebra::{
    closure_coefficients, preset, CoefficientVector, GaugeElement, LinearParams, PresetName, PresetParams, Units,
    Window,
};
use nlse_gauge::wavefield::io::{read_csv, read_json};
use nlse_gauge::wavefield::{Floors, GridSpec, WaveFunction};

use crate::CliError;

/// Which equation a run uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Equation {
    Preset {
        name: PresetName,
        #[serde(default)]
        params: PresetParams,
    },
    Coefficients(CoefficientVector),
    /// The linear member moved by a gauge element.
    Closure {
        #[serde(default)]
        linear: LinearParams,
        gauge: GaugeElement,
    },
}

impl Default for Equation {
    fn default() -> Self {
        Equation::Preset {
            name: PresetName::Linear,
            params: PresetParams::default(),
        }
    }
}

impl Equation {
    pub fn coefficients(&self, units: Units) -> Result<CoefficientVector, CliError> {
        let c = match self {
            Equation::Preset { name, params } => preset(*name, units, params)?,
            Equation::Coefficients(c) => c.clone(),
            Equation::Closure { linear, gauge } => closure_coefficients(*linear, gauge)?.coefficients,
        };
        c.validate()?;
        Ok(c)
    }
}

/// Initial or input wavefunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Gaussian {
        #[serde(default)]
        x0: f64,
        #[serde(default = "one")]
        sigma: f64,
        #[serde(default)]
        k0: f64,
    },
    PeriodicGaussian {
        #[serde(default)]
        x0: f64,
        #[serde(default = "one")]
        sigma: f64,
    },
    /// Gaussian on a constant floor with phase `amplitude · sin(2πx/L)`; never vanishes.
    Floored {
        #[serde(default = "one")]
        sigma: f64,
        #[serde(default = "default_floor")]
        floor: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// CSV (`x,re,im` with header line) or JSON snapshot.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn default_floor() -> f64 {
    1e-3
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Gaussian {
            x0: 0.0,
            sigma: 1.0,
            k0: 0.0,
        }
    }
}

impl StateSpec {
    pub fn build(&self, grid: GridSpec, base: &Path) -> Result<WaveFunction, CliError> {
        let check = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("state.{name} must be positive, got {v}")))
            }
        };
        Ok(match self {
            StateSpec::Gaussian { x0, sigma, k0 } => {
                check("sigma", *sigma)?;
                WaveFunction::gaussian(grid, *x0, *sigma, *k0)
            }
            StateSpec::PeriodicGaussian { x0, sigma } => {
                check("sigma", *sigma)?;
                WaveFunction::periodic_gaussian(grid, *x0, *sigma)
            }
            StateSpec::Floored {
                sigma,
                floor,
                amplitude,
            } => {
                check("sigma", *sigma)?;
                check("floor", *floor)?;
                let q = 2.0 * std::f64::consts::PI / grid.length();
                WaveFunction::from_fn(grid, 0.0, |x| {
                    let r = (-x * x / (4.0 * sigma * sigma)).exp() + floor;
                    num_complex::Complex64::from_polar(r, amplitude * (q * x).sin())
                })
                .normalized()
            }
            StateSpec::File { path } => {
                let path = base.join(path);
                let file = std::fs::File::open(&path)
                    .map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
                let psi = if path.extension().is_some_and(|x| x == "json") {
                    read_json(std::io::BufReader::new(file))?
                } else {
                    read_csv(std::io::BufReader::new(file))?
                };
                if psi.grid != grid {
                    return Err(CliError::Config(format!(
                        "state file grid {} differs from configured grid {}",
                        psi.grid, grid
                    )));
                }
                psi
            }
        })
    }
}

/// Pass thresholds for the `verify` scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub commuting: f64,
    pub ehrenfest: f64,
    pub continuity_order: f64,
    pub separation: f64,
    pub boost: f64,
    pub algebra: f64,
    pub invariance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            commuting: 1e-6,
            ehrenfest: 1e-6,
            continuity_order: 1.9,
            separation: 1e-12,
            boost: 1e-6,
            algebra: 1e-12,
            invariance: 1e-10,
        }
    }
}

/// Grid as written in a config file; validated after flag overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 256, length: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub units: Units,
    pub equation: Equation,
    pub potential: Potential,
    pub state: StateSpec,
    /// Second wavefunction for two-particle scenarios.
    pub partner: Option<StateSpec>,
    pub gauge: Option<GaugeElement>,
    /// Linear reference for the commuting diagram.
    pub linear: LinearParams,
    pub t0: f64,
    pub t_final: f64,
    pub dt: Option<f64>,
    pub stride: usize,
    pub snapshot_stride: Option<usize>,
    pub form: RhsForm,
    pub dealias: bool,
    pub floors: Floors,
    pub window: Option<Window>,
    /// Boost velocity.
    pub velocity: f64,
    /// Number of random draws for `verify algebra`.
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Invariants report to classify instead of the configured equation.
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: GridConfig::default(),
            units: Units::default(),
            equation: Equation::default(),
            potential: Potential::Zero,
            state: StateSpec::default(),
            partner: None,
            gauge: None,
            linear: LinearParams::default(),
            t0: 0.0,
            t_final: 1.0,
            dt: None,
            stride: 1,
            snapshot_stride: None,
            form: RhsForm::default(),
            dealias: true,
            floors: Floors::default(),
            window: None,
            velocity: 1.0,
            samples: 1000,
            seed: 0,
            tolerances: Tolerances::default(),
            input: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid_n: Option<usize>,
    pub box_l: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
}

impl RunConfig {
    /// Parses JSON text; errors name the offending path, e.g. `gauge.lambda.params`.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: Option<&Path>) -> Result<(Self, PathBuf), CliError> {
        match path {
            None => Ok((RunConfig::default(), PathBuf::from("."))),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                Ok((RunConfig::from_json(&text)?, base))
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out_dir {
            self.out_dir = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.grid_n {
            self.grid.n = v;
        }
        if let Some(v) = o.box_l {
            self.grid.length = v;
        }
        if let Some(v) = o.dt {
            self.dt = Some(v);
        }
        if let Some(v) = o.t_final {
            self.t_final = v;
        }
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        GridSpec::new(self.grid.n, self.grid.length).map_err(|e| CliError::Config(format!("at `grid`: {e}")))
    }

    pub fn window(&self) -> Window {
        self.window
            .unwrap_or_else(|| Window::new(self.t0, self.t_final.max(self.t0), 21))
    }

    pub fn gauge_or(&self, fallback: GaugeElement) -> GaugeElement {
        self.gauge.clone().unwrap_or(fallback)
    }

    pub fn require_gauge(&self) -> Result<GaugeElement, CliError> {
        self.gauge
            .clone()
            .ok_or_else(|| CliError::Config("at `gauge`: this command needs a gauge element".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gets_defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.grid().unwrap().n(), 256);
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let err = RunConfig::from_json(r#"{"grid": {"n": 64, "size": 3}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("grid") && msg.contains("size"), "{msg}");
    }

    #[test]
    fn tabulated_lambda_without_step_is_a_schema_error() {
        let text = r#"{"gauge": {"gamma": {"kind": "constant", "params": {"value": 0.5}},
            "lambda": {"kind": "tabulated", "params": {"t0": 0.0, "values": [1.0, 1.1, 1.2]}}}}"#;
        let msg = RunConfig::from_json(text).unwrap_err().to_string();
        assert!(msg.contains("gauge.lambda"), "{msg}");
        assert!(msg.contains("step"), "{msg}");
    }

    #[test]
    fn dg_preset_from_config() {
        let text = r#"{"equation": {"preset": {"name": "dg", "params": {"d": 0.05, "d_prime": 0.1, "c": [0, 0.3, 0, 0, 0]}}}}"#;
        let c = RunConfig::from_json(text).unwrap();
        let v = c.equation.coefficients(Units::default()).unwrap();
        assert_eq!(v.nu2.eval(0.0).unwrap(), 0.025);
        assert!((v.mu2.eval(0.0).unwrap() - (0.1 * 0.3 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::default();
        c.apply(&Overrides {
            grid_n: Some(64),
            box_l: Some(8.0),
            dt: Some(1e-3),
            t_final: Some(0.5),
            seed: Some(9),
            out_dir: Some("x".into()),
        });
        assert_eq!((c.grid.n, c.grid.length, c.dt, c.t_final, c.seed), (64, 8.0, Some(1e-3), 0.5, 9));
        let mut bad = RunConfig::default();
        bad.grid.n = 100;
        assert!(matches!(bad.grid(), Err(CliError::Config(_))));
    }
}

//! Run configuration: JSON file and command-line flags share one set of
//! field names, flags win over the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Extension,
    Spectrum,
    Eigenfunction,
    Evolve,
    Dephase,
    Verify,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Extension => "extension",
            Self::Spectrum => "spectrum",
            Self::Eigenfunction => "eigenfunction",
            Self::Evolve => "evolve",
            Self::Dephase => "dephase",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    TwoPoint,
    DeltaPrime,
    Delta,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TwoPoint => "two-point",
            Self::DeltaPrime => "delta-prime",
            Self::Delta => "delta",
        }
    }
}

/// Which closed-form state to sample or start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StateChoice {
    Even,
    Odd,
    /// Even plus odd.
    Left,
    /// Even minus odd.
    Right,
}

impl StateChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Even => "even",
            Self::Odd => "odd",
            Self::Left => "left",
            Self::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    Default,
}

/// Every settable field, all optional. Used for both sources before merging.
#[derive(Debug, Clone, Default, PartialEq, clap::Args)]
pub struct Params {
    /// JSON config file; flags given here override its fields
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Interaction kind; inferred from the given parameters when omitted
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Grid half-width
    #[arg(long = "L", allow_negative_numbers = true)]
    pub l: Option<f64>,
    /// Grid points (or sample points for `eigenfunction`)
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<i64>,
    #[arg(long = "kappa-min", allow_negative_numbers = true)]
    pub kappa_min: Option<f64>,
    #[arg(long = "kappa-max", allow_negative_numbers = true)]
    pub kappa_max: Option<f64>,
    #[arg(long)]
    pub ensemble: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Dephasing kicks amplitudes with x > threshold
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub state: Option<StateChoice>,
    #[arg(long, value_enum)]
    pub sweep: Option<Sweep>,
    /// JSON report path (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// CSV output: samples for `eigenfunction`, trajectory for `evolve`
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Final-state CSV for `evolve`
    #[arg(long, value_name = "PATH")]
    pub snapshot: Option<PathBuf>,
    #[arg(skip)]
    pub mode: Option<Mode>,
}

/// Keys accepted in a config file.
pub const FIELDS: &[&str] = &[
    "mode", "kind", "alpha", "beta", "h", "c", "L", "n", "dt", "steps", "kappa-min", "kappa-max",
    "ensemble", "seed", "tol", "threshold", "state", "sweep", "out", "csv", "snapshot",
];

fn field<T: DeserializeOwned>(name: &str, value: &Value, expected: &str) -> Result<Option<T>, CliError> {
    if value.is_null() {
        return Ok(None);
    }
    serde_json::from_value(value.clone())
        .map(Some)
        .map_err(|_| CliError::invalid(name, format!("expected {expected}, got {value}")))
}

impl Params {
    /// Parses a config document. Unknown keys and ill-typed values are
    /// rejected with the offending field named.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| CliError::invalid("config", format!("not valid JSON: {e}")))?;
        let Value::Object(map) = doc else {
            return Err(CliError::invalid("config", "top level must be an object"));
        };
        let map: BTreeMap<String, Value> = map.into_iter().collect();
        let mut p = Params::default();
        for (key, v) in &map {
            let k = key.as_str();
            match k {
                "mode" => p.mode = field(k, v, "one of extension|spectrum|eigenfunction|evolve|dephase|verify")?,
                "kind" => p.kind = field(k, v, "one of two-point|delta-prime|delta")?,
                "alpha" => p.alpha = field(k, v, "a number")?,
                "beta" => p.beta = field(k, v, "a number")?,
                "h" => p.h = field(k, v, "a number")?,
                "c" => p.c = field(k, v, "a number")?,
                "L" => p.l = field(k, v, "a number")?,
                "n" => p.n = field(k, v, "an integer")?,
                "dt" => p.dt = field(k, v, "a number")?,
                "steps" => p.steps = field(k, v, "an integer")?,
                "kappa-min" => p.kappa_min = field(k, v, "a number")?,
                "kappa-max" => p.kappa_max = field(k, v, "a number")?,
                "ensemble" => p.ensemble = field(k, v, "an integer")?,
                "seed" => p.seed = field(k, v, "a non-negative integer")?,
                "tol" => p.tol = field(k, v, "a number")?,
                "threshold" => p.threshold = field(k, v, "a number")?,
                "state" => p.state = field(k, v, "one of even|odd|left|right")?,
                "sweep" => p.sweep = field(k, v, "\"default\"")?,
                "out" => p.out = field(k, v, "a path")?,
                "csv" => p.csv = field(k, v, "a path")?,
                "snapshot" => p.snapshot = field(k, v, "a path")?,
                _ => return Err(CliError::invalid(k, "unknown field")),
            }
        }
        Ok(p)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `self` replace those in `base`.
    pub fn over(self, base: Params) -> Params {
        macro_rules! pick {
            ($($f:ident),*) => { Params { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            config, kind, alpha, beta, h, c, l, n, dt, steps, kappa_min, kappa_max, ensemble, seed, tol, threshold,
            state, sweep, out, csv, snapshot, mode
        )
    }
}

pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_SAMPLES: usize = 1001;
pub const DEFAULT_DT: f64 = 0.005;
pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_ENSEMBLE: usize = 10_000;
pub const MAX_STEPS: usize = 10_000_000;
pub const MAX_POINTS: usize = 1 << 22;

/// Interaction with validated parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interaction {
    TwoPoint { alpha: f64, beta: f64, h: f64 },
    DeltaPrime { alpha: f64, beta: f64 },
    Delta { c: f64 },
}

impl Interaction {
    pub fn kind(&self) -> Kind {
        match self {
            Self::TwoPoint { .. } => Kind::TwoPoint,
            Self::DeltaPrime { .. } => Kind::DeltaPrime,
            Self::Delta { .. } => Kind::Delta,
        }
    }

    /// Smallest bound-state decay rate, if there is a bound state.
    pub fn slowest_decay(&self) -> Option<f64> {
        match *self {
            Self::TwoPoint { alpha, beta, .. } | Self::DeltaPrime { alpha, beta } => Some(alpha.min(beta)),
            Self::Delta { c } => (c < 0.0).then_some(-0.5 * c),
        }
    }

    pub fn reach(&self) -> f64 {
        match *self {
            Self::TwoPoint { h, .. } => h,
            _ => 0.0,
        }
    }
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// `None` only for `verify` over the default sweep.
    pub interaction: Option<Interaction>,
    pub half_width: f64,
    pub points: usize,
    pub dt: f64,
    pub steps: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub ensemble: usize,
    pub seed: u64,
    pub tol: f64,
    pub threshold: f64,
    pub state: StateChoice,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, CliError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(CliError::invalid(name, format!("must be positive and finite, got {x}"))),
        other => Ok(other),
    }
}

fn count(name: &str, v: Option<i64>, min: usize, max: usize, default: usize) -> Result<usize, CliError> {
    match v {
        None => Ok(default),
        Some(x) if x < min as i64 || x > max as i64 => {
            Err(CliError::invalid(name, format!("must lie in [{min}, {max}], got {x}")))
        }
        Some(x) => Ok(x as usize),
    }
}

fn require(name: &str, v: Option<f64>, kind: Kind) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::invalid(name, format!("required for the {} interaction", kind.as_str())))
}

fn forbid(name: &str, v: Option<f64>, kind: Kind) -> Result<(), CliError> {
    match v {
        Some(_) => Err(CliError::invalid(name, format!("not used by the {} interaction", kind.as_str()))),
        None => Ok(()),
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| CliError::invalid("mode", format!("unknown mode {s:?}")))
    }
}

impl RunConfig {
    /// Checks every field and fills defaults.
    pub fn validate(p: &Params) -> Result<RunConfig, CliError> {
        let mode = p.mode.ok_or_else(|| CliError::invalid("mode", "no mode given"))?;
        let alpha = positive("alpha", p.alpha)?;
        let beta = positive("beta", p.beta)?;
        let h = positive("h", p.h)?;
        if let Some(c) = p.c {
            if !c.is_finite() {
                return Err(CliError::invalid("c", format!("must be finite, got {c}")));
            }
        }
        let explicit_l = positive("L", p.l)?;
        let dt = positive("dt", p.dt)?.unwrap_or(DEFAULT_DT);
        let kappa_min = positive("kappa-min", p.kappa_min)?.unwrap_or(1e-2);
        let kappa_max = positive("kappa-max", p.kappa_max)?.unwrap_or(1e2);
        if kappa_max <= kappa_min {
            return Err(CliError::invalid(
                "kappa-max",
                format!("must exceed kappa-min = {kappa_min}, got {kappa_max}"),
            ));
        }
        let tol = positive("tol", p.tol)?.unwrap_or(pointspec::VERIFY_TOL);
        let threshold = match p.threshold {
            Some(t) if !t.is_finite() => return Err(CliError::invalid("threshold", "must be finite")),
            Some(t) => t,
            None => 0.0,
        };
        let default_points = if mode == Mode::Eigenfunction { DEFAULT_SAMPLES } else { DEFAULT_POINTS };
        let min_points = if mode == Mode::Eigenfunction { 2 } else { pointspec::dynamics::MIN_POINTS };
        let points = count("n", p.n, min_points, MAX_POINTS, default_points)?;
        let steps = count("steps", p.steps, 1, MAX_STEPS, DEFAULT_STEPS)?;
        let ensemble = count("ensemble", p.ensemble, 1, 10_000_000, DEFAULT_ENSEMBLE)?;

        let sweep = p.sweep.is_some();
        if sweep && mode != Mode::Verify {
            return Err(CliError::invalid("sweep", "only used by verify"));
        }
        let any_param = alpha.is_some() || beta.is_some() || h.is_some() || p.c.is_some() || p.kind.is_some();
        let interaction = if sweep || (mode == Mode::Verify && !any_param) {
            if any_param {
                return Err(CliError::invalid("sweep", "cannot be combined with interaction parameters"));
            }
            None
        } else {
            let kind = p.kind.unwrap_or(if p.c.is_some() {
                Kind::Delta
            } else if h.is_some() {
                Kind::TwoPoint
            } else {
                Kind::DeltaPrime
            });
            Some(match kind {
                Kind::TwoPoint => {
                    forbid("c", p.c, kind)?;
                    Interaction::TwoPoint {
                        alpha: require("alpha", alpha, kind)?,
                        beta: require("beta", beta, kind)?,
                        h: require("h", h, kind)?,
                    }
                }
                Kind::DeltaPrime => {
                    forbid("c", p.c, kind)?;
                    forbid("h", h, kind)?;
                    Interaction::DeltaPrime {
                        alpha: require("alpha", alpha, kind)?,
                        beta: require("beta", beta, kind)?,
                    }
                }
                Kind::Delta => {
                    forbid("alpha", alpha, kind)?;
                    forbid("beta", beta, kind)?;
                    forbid("h", h, kind)?;
                    Interaction::Delta {
                        c: require("c", p.c, kind)?,
                    }
                }
            })
        };

        let default_state = match mode {
            Mode::Evolve => StateChoice::Left,
            _ => StateChoice::Even,
        };
        let state = p.state.unwrap_or(default_state);
        if let Some(Interaction::Delta { c }) = interaction {
            if matches!(mode, Mode::Eigenfunction | Mode::Evolve | Mode::Dephase) {
                if c >= 0.0 {
                    return Err(CliError::invalid("c", "the delta interaction has no bound state for c >= 0"));
                }
                if state != StateChoice::Even {
                    return Err(CliError::invalid("state", "the delta interaction only has an even bound state"));
                }
            }
        }

        if mode == Mode::Eigenfunction && matches!(state, StateChoice::Left | StateChoice::Right) {
            let degenerate = match interaction {
                Some(Interaction::TwoPoint { alpha, beta, .. }) | Some(Interaction::DeltaPrime { alpha, beta }) => {
                    alpha == beta
                }
                _ => false,
            };
            if !degenerate {
                return Err(CliError::invalid(
                    "state",
                    "left and right are eigenfunctions only when alpha = beta",
                ));
            }
        }

        let half_width = match interaction {
            Some(i) => {
                let reach = i.reach();
                let decay = i.slowest_decay().unwrap_or(1.0);
                let need = reach + 5.0 / decay;
                match explicit_l {
                    Some(l) if matches!(mode, Mode::Evolve | Mode::Dephase) && l <= need => {
                        return Err(CliError::invalid(
                            "L",
                            format!("must exceed {need} so bound states vanish at the walls, got {l}"),
                        ));
                    }
                    Some(l) => l,
                    None => reach + 12.0 / decay,
                }
            }
            None => explicit_l.unwrap_or(1.0),
        };

        Ok(RunConfig {
            mode,
            interaction,
            half_width,
            points,
            dt,
            steps,
            kappa_min,
            kappa_max,
            ensemble,
            seed: p.seed.unwrap_or(0),
            tol,
            threshold,
            state,
            out: p.out.clone(),
            csv: p.csv.clone(),
            snapshot: p.snapshot.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        RunConfig::validate(&Params::from_json(text)?)
    }

    #[test]
    fn kind_is_inferred() {
        let c = parse(r#"{"mode":"spectrum","alpha":2,"beta":1,"h":0.3}"#).unwrap();
        assert_eq!(c.interaction, Some(Interaction::TwoPoint { alpha: 2.0, beta: 1.0, h: 0.3 }));
        let c = parse(r#"{"mode":"spectrum","c":-2}"#).unwrap();
        assert_eq!(c.interaction, Some(Interaction::Delta { c: -2.0 }));
        let c = parse(r#"{"mode":"spectrum","alpha":1,"beta":2}"#).unwrap();
        assert_eq!(c.interaction.unwrap().kind(), Kind::DeltaPrime);
        let c = parse(r#"{"mode":"verify"}"#).unwrap();
        assert!(c.interaction.is_none());
    }

    #[test]
    fn errors_name_the_field() {
        for (text, field) in [
            (r#"{"mode":"spectrum","alpha":-2,"beta":1,"h":0.3}"#, "alpha"),
            (r#"{"mode":"spectrum","alpha":2,"beta":1,"h":0.3,"bogus":1}"#, "bogus"),
            (r#"{"mode":"spectrum","alpha":"x","beta":1,"h":0.3}"#, "alpha"),
            (r#"{"mode":"evolve","alpha":2,"beta":1,"h":0.3,"n":100}"#, "n"),
            (r#"{"mode":"spectrum","alpha":2,"h":0.3}"#, "beta"),
            (r#"{"mode":"evolve","alpha":2,"beta":1,"h":0.3,"L":1}"#, "L"),
            (r#"{"mode":"spectrum","kind":"delta","alpha":1,"c":-1}"#, "alpha"),
            (r#"{"mode":"spectrum","alpha":1,"beta":1,"kappa-min":2,"kappa-max":1}"#, "kappa-max"),
        ] {
            let err = parse(text).unwrap_err();
            assert_eq!(err.field(), Some(field), "{text}: {err}");
        }
    }

    #[test]
    fn flags_override_file() {
        let file = Params::from_json(r#"{"mode":"spectrum","alpha":2,"beta":1,"h":0.3}"#).unwrap();
        let flags = Params {
            alpha: Some(3.0),
            ..Params::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.alpha, Some(3.0));
        assert_eq!(merged.beta, Some(1.0));
    }
}

//! Flat TOML run configuration. Every key is optional; the defaults are the
//! bundled French case study.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use backcast_core::choice::{BassParams, LogitParams};
use backcast_core::ocp::{SolverOptions, DEFAULT_U_MAX};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Where the terminal emission target comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Explicit(f64),
    /// E(T) of a named reference scenario.
    FromScenario(ScenarioChoice),
}

impl FromStr for TargetSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(name) = s.strip_prefix("from-scenario:") {
            let choice: ScenarioChoice = name.parse()?;
            if choice == ScenarioChoice::Optimal {
                return Err(CliError::Config("the target cannot come from the optimal scenario itself".into()));
            }
            return Ok(TargetSpec::FromScenario(choice));
        }
        let mt: f64 = s
            .parse()
            .map_err(|_| CliError::Config(format!("target '{s}' is neither a number of Mt nor from-scenario:<name>")))?;
        if !(mt > 0.0 && mt.is_finite()) {
            return Err(CliError::Config(format!("target must be a positive number of Mt, got {s}")));
        }
        Ok(TargetSpec::Explicit(mt))
    }
}

/// Scenarios known to `compare` and `from-scenario:`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioChoice {
    I0,
    IC,
    IP,
    BI,
    Optimal,
}

impl ScenarioChoice {
    pub const DEFAULT_SET: [ScenarioChoice; 5] = [
        ScenarioChoice::I0,
        ScenarioChoice::IC,
        ScenarioChoice::IP,
        ScenarioChoice::BI,
        ScenarioChoice::Optimal,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            ScenarioChoice::I0 => "i0",
            ScenarioChoice::IC => "ic",
            ScenarioChoice::IP => "ip",
            ScenarioChoice::BI => "bi",
            ScenarioChoice::Optimal => "optimal",
        }
    }
}

impl FromStr for ScenarioChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i0" => Ok(ScenarioChoice::I0),
            "ic" => Ok(ScenarioChoice::IC),
            "ip" => Ok(ScenarioChoice::IP),
            "bi" => Ok(ScenarioChoice::BI),
            "optimal" | "opt" => Ok(ScenarioChoice::Optimal),
            other => Err(CliError::Config(format!(
                "unknown scenario '{other}' (expected i0, ic, ip, bi or optimal)"
            ))),
        }
    }
}

/// A policy law as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum LawSpec {
    ZeroIncentive,
    /// `None` takes the configured IC level.
    Constant(Option<f64>),
    FullPrice,
    BanThermal,
    Custom(PathBuf),
}

impl FromStr for LawSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head.to_ascii_lowercase().as_str(), arg) {
            ("i0", None) => Ok(LawSpec::ZeroIncentive),
            ("ic", None) => Ok(LawSpec::Constant(None)),
            ("ic", Some(level)) => {
                let level: f64 = level
                    .parse()
                    .map_err(|_| CliError::Config(format!("constant incentive '{level}' is not a number")))?;
                if !(level >= 0.0 && level.is_finite()) {
                    return Err(CliError::Config(format!("constant incentive must be non-negative, got {level}")));
                }
                Ok(LawSpec::Constant(Some(level)))
            }
            ("ip", None) => Ok(LawSpec::FullPrice),
            ("bi", None) => Ok(LawSpec::BanThermal),
            ("custom", Some(path)) if !path.is_empty() => Ok(LawSpec::Custom(PathBuf::from(path))),
            _ => Err(CliError::Config(format!(
                "unknown law '{s}' (expected i0, ic, ic:<k€>, ip, bi or custom:<file.csv>)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileSource {
    /// The bundled (or configured) initial fleet CSV.
    File,
    /// Each type's total spread over ages in proportion to cumulative survival.
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdoptionSource {
    /// The `cA_ev` column of the exogenous inputs.
    Exogenous,
    /// Recomputed from the Bass parameters.
    Bass,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawTarget {
    Mt(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    start_year: i32,
    end_year: i32,
    exogenous: Option<PathBuf>,
    initial_fleet: Option<PathBuf>,
    initial_totals: Option<PathBuf>,
    emission_factors: Option<PathBuf>,
    survival: Option<PathBuf>,
    historical_dir: Option<PathBuf>,
    ban_reference: Option<PathBuf>,
    initial_profile: ProfileSource,
    profile_smoothing: f64,
    purchase_weight: f64,
    operating_weight: f64,
    infrastructure_weight: f64,
    mu: f64,
    adoption: AdoptionSource,
    bass_p: f64,
    bass_q: f64,
    bass_epoch: i32,
    ic_level: f64,
    target: RawTarget,
    u_max: f64,
    max_outer: usize,
    max_inner: usize,
    stationarity_tol: f64,
    feasibility_tol: f64,
    output_dir: PathBuf,
}

impl Default for RawConfig {
    fn default() -> Self {
        let logit = LogitParams::default();
        let bass = BassParams::default();
        let solver = SolverOptions::default();
        Self {
            start_year: 2022,
            end_year: 2050,
            exogenous: None,
            initial_fleet: None,
            initial_totals: None,
            emission_factors: None,
            survival: None,
            historical_dir: None,
            ban_reference: None,
            initial_profile: ProfileSource::File,
            profile_smoothing: 0.03,
            purchase_weight: logit.purchase,
            operating_weight: logit.operating,
            infrastructure_weight: logit.infrastructure,
            mu: logit.mu,
            adoption: AdoptionSource::Exogenous,
            bass_p: bass.p,
            bass_q: bass.q,
            bass_epoch: 2018,
            ic_level: 5.0,
            target: RawTarget::Text("from-scenario:ic".into()),
            u_max: DEFAULT_U_MAX,
            max_outer: solver.max_outer,
            max_inner: solver.max_inner,
            stationarity_tol: solver.stationarity_tol,
            feasibility_tol: solver.feasibility_tol,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Resolved run configuration. Input paths of `None` mean the bundled data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub start_year: i32,
    pub end_year: i32,
    pub exogenous: Option<PathBuf>,
    pub initial_fleet: Option<PathBuf>,
    pub initial_totals: Option<PathBuf>,
    pub emission_factors: Option<PathBuf>,
    pub survival: Option<PathBuf>,
    pub historical_dir: Option<PathBuf>,
    pub ban_reference: Option<PathBuf>,
    pub initial_profile: ProfileSource,
    pub profile_smoothing: f64,
    pub logit: LogitParams,
    pub adoption: AdoptionSource,
    pub bass: BassParams,
    pub bass_epoch: i32,
    pub ic_level: f64,
    pub target: TargetSpec,
    pub u_max: f64,
    pub solver: SolverOptions,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_raw(RawConfig::default(), None).expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        RunConfig::from_raw(raw, base_dir)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        RunConfig::from_toml(&text, path.parent())
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn from_raw(raw: RawConfig, base_dir: Option<&Path>) -> Result<Self> {
        let resolve = |p: Option<PathBuf>| match (p, base_dir) {
            (Some(p), Some(base)) if p.is_relative() => Some(base.join(p)),
            (p, _) => p,
        };
        let target = match raw.target {
            RawTarget::Mt(mt) => TargetSpec::from_str(&mt.to_string())?,
            RawTarget::Text(s) => s.parse()?,
        };
        let logit = LogitParams {
            purchase: raw.purchase_weight,
            operating: raw.operating_weight,
            infrastructure: raw.infrastructure_weight,
            mu: raw.mu,
        };
        let cfg = RunConfig {
            start_year: raw.start_year,
            end_year: raw.end_year,
            exogenous: resolve(raw.exogenous),
            initial_fleet: resolve(raw.initial_fleet),
            initial_totals: resolve(raw.initial_totals),
            emission_factors: resolve(raw.emission_factors),
            survival: resolve(raw.survival),
            historical_dir: resolve(raw.historical_dir),
            ban_reference: resolve(raw.ban_reference),
            initial_profile: raw.initial_profile,
            profile_smoothing: raw.profile_smoothing,
            logit,
            adoption: raw.adoption,
            bass: BassParams {
                p: raw.bass_p,
                q: raw.bass_q,
                chi0: 0.0,
            },
            bass_epoch: raw.bass_epoch,
            ic_level: raw.ic_level,
            target,
            u_max: raw.u_max,
            solver: SolverOptions {
                max_outer: raw.max_outer,
                max_inner: raw.max_inner,
                stationarity_tol: raw.stationarity_tol,
                feasibility_tol: raw.feasibility_tol,
                ..SolverOptions::default()
            },
            output_dir: match base_dir {
                Some(base) if raw.output_dir.is_relative() => base.join(raw.output_dir),
                _ => raw.output_dir,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_year >= self.end_year {
            return Err(CliError::Config(format!(
                "start_year ({}) must precede end_year ({})",
                self.start_year, self.end_year
            )));
        }
        if !self.logit.is_valid() {
            return Err(CliError::Config("logit weights must be non-positive and mu positive".into()));
        }
        if !(self.ic_level >= 0.0) {
            return Err(CliError::Config("ic_level must be non-negative".into()));
        }
        if !(self.u_max >= 0.0 && self.u_max.is_finite()) {
            return Err(CliError::Config("u_max must be a non-negative number".into()));
        }
        if !(self.bass.p >= 0.0 && self.bass.q >= 0.0) {
            return Err(CliError::Config("Bass coefficients must be non-negative".into()));
        }
        if !(self.profile_smoothing >= 0.0) {
            return Err(CliError::Config("profile_smoothing must be non-negative".into()));
        }
        if self.solver.max_outer == 0 || self.solver.max_inner == 0 {
            return Err(CliError::Config("iteration limits must be positive".into()));
        }
        if !(self.solver.stationarity_tol > 0.0 && self.solver.feasibility_tol > 0.0) {
            return Err(CliError::Config("solver tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_case_study() {
        let cfg = RunConfig::from_toml("", None).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!((cfg.start_year, cfg.end_year), (2022, 2050));
        assert_eq!(cfg.target, TargetSpec::FromScenario(ScenarioChoice::IC));
        assert_eq!(cfg.u_max, 50.0);
        assert_eq!(cfg.ic_level, 5.0);
        assert_eq!(cfg.logit, LogitParams::default());
    }

    #[test]
    fn keys_override_defaults() {
        let cfg = RunConfig::from_toml(
            "end_year = 2030\ntarget = 12.5\nmu = 5.0\ninitial_profile = \"geometric\"\nexogenous = \"x.csv\"\n",
            Some(Path::new("/tmp/run")),
        )
        .unwrap();
        assert_eq!(cfg.end_year, 2030);
        assert_eq!(cfg.target, TargetSpec::Explicit(12.5));
        assert_eq!(cfg.logit.mu, 5.0);
        assert_eq!(cfg.initial_profile, ProfileSource::Geometric);
        assert_eq!(cfg.exogenous, Some(PathBuf::from("/tmp/run/x.csv")));
        assert_eq!(cfg.output_dir, PathBuf::from("/tmp/run/out"));
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(RunConfig::from_toml("horizon = 3\n", None), Err(CliError::Config(_))));
    }

    #[test]
    fn inverted_horizon_is_rejected() {
        assert!(RunConfig::from_toml("start_year = 2050\nend_year = 2022\n", None).is_err());
    }

    #[test]
    fn target_forms() {
        assert_eq!("12.28".parse::<TargetSpec>().unwrap(), TargetSpec::Explicit(12.28));
        assert_eq!(
            "from-scenario:bi".parse::<TargetSpec>().unwrap(),
            TargetSpec::FromScenario(ScenarioChoice::BI)
        );
        assert!("from-scenario:optimal".parse::<TargetSpec>().is_err());
        assert!("-1".parse::<TargetSpec>().is_err());
        assert!("soon".parse::<TargetSpec>().is_err());
    }

    #[test]
    fn law_forms() {
        assert_eq!("i0".parse::<LawSpec>().unwrap(), LawSpec::ZeroIncentive);
        assert_eq!("ic".parse::<LawSpec>().unwrap(), LawSpec::Constant(None));
        assert_eq!("ic:7.5".parse::<LawSpec>().unwrap(), LawSpec::Constant(Some(7.5)));
        assert_eq!("IP".parse::<LawSpec>().unwrap(), LawSpec::FullPrice);
        assert_eq!("bi".parse::<LawSpec>().unwrap(), LawSpec::BanThermal);
        assert_eq!(
            "custom:u.csv".parse::<LawSpec>().unwrap(),
            LawSpec::Custom(PathBuf::from("u.csv"))
        );
        for bad in ["ic:-1", "ic:x", "custom:", "ban", "i0:3"] {
            assert!(bad.parse::<LawSpec>().is_err(), "{bad}");
        }
    }
}

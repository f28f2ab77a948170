//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # lines starting with '#' are ignored
//! experiment = recovery_sweep
//! m = 100
//! n = 256
//! t_values = 4..52:4        # or an explicit list: 4, 8, 12
//! trials = 100
//! algorithms = omp, komp:2, hybrid:0.2, cosamp:2t, cosamp:t, iht
//! noise = none              # or gaussian, with noise_sigma
//! master_seed = 1
//! ```
//!
//! Unlisted keys keep the defaults of the chosen experiment.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::baselines::{BaselineConfig, CosampConfig, CosampWidth, IhtConfig};
use crate::error::{Error, Result};
use crate::model::{NoiseKind, NoiseSpec, PRNG_NAME};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    RecoverySweep,
    DecaySweep,
    RipProbe,
}

impl Experiment {
    pub fn tag(&self) -> &'static str {
        match self {
            Experiment::RecoverySweep => "recovery_sweep",
            Experiment::DecaySweep => "decay_sweep",
            Experiment::RipProbe => "rip_probe",
        }
    }

    pub(crate) fn id(&self) -> u64 {
        match self {
            Experiment::RecoverySweep => 1,
            Experiment::DecaySweep => 2,
            Experiment::RipProbe => 3,
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recovery_sweep" | "recovery" => Ok(Experiment::RecoverySweep),
            "decay_sweep" | "decay" => Ok(Experiment::DecaySweep),
            "rip_probe" | "rip" => Ok(Experiment::RipProbe),
            _ => Err(Error::InvalidArgument(format!("unknown experiment {s:?}"))),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One benchmarked algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    Omp,
    Komp(usize),
    Hybrid(f64),
    Cosamp(CosampWidth),
    Iht,
}

/// Tag reserved for externally computed ℓ₁ results merged into trial CSVs.
pub const EXTERNAL_L1_TAG: &str = "bp_external";

impl AlgorithmSpec {
    /// Column value used in CSVs, e.g. `komp2` or `cosamp_2t`.
    pub fn tag(&self) -> String {
        match self {
            AlgorithmSpec::Omp => "omp".into(),
            AlgorithmSpec::Komp(k) => format!("komp{k}"),
            AlgorithmSpec::Hybrid(a) => format!("hybrid{a}"),
            AlgorithmSpec::Cosamp(CosampWidth::Single) => "cosamp_t".into(),
            AlgorithmSpec::Cosamp(CosampWidth::Double) => "cosamp_2t".into(),
            AlgorithmSpec::Iht => "iht".into(),
        }
    }

    /// Spelling accepted in config files, e.g. `komp:2`.
    pub fn config_name(&self) -> String {
        match self {
            AlgorithmSpec::Omp => "omp".into(),
            AlgorithmSpec::Komp(k) => format!("komp:{k}"),
            AlgorithmSpec::Hybrid(a) => format!("hybrid:{a}"),
            AlgorithmSpec::Cosamp(CosampWidth::Single) => "cosamp:t".into(),
            AlgorithmSpec::Cosamp(CosampWidth::Double) => "cosamp:2t".into(),
            AlgorithmSpec::Iht => "iht".into(),
        }
    }

    /// Members of the OMP family: they select atoms and re-project.
    pub fn is_pursuit(&self) -> bool {
        matches!(self, AlgorithmSpec::Omp | AlgorithmSpec::Komp(_) | AlgorithmSpec::Hybrid(_))
    }

    /// Pursuits that may select more than `T` atoms, whose estimates are also
    /// reported truncated to `T` terms.
    pub fn over_selects(&self) -> bool {
        matches!(self, AlgorithmSpec::Komp(k) if *k > 1) || matches!(self, AlgorithmSpec::Hybrid(_))
    }

    pub(crate) fn baseline(&self, cfg: &ExperimentConfig) -> Option<BaselineConfig> {
        match *self {
            AlgorithmSpec::Cosamp(width) => Some(BaselineConfig::Cosamp(CosampConfig {
                width,
                iterations: cfg.cosamp_iterations,
            })),
            AlgorithmSpec::Iht => Some(BaselineConfig::Iht(cfg.iht)),
            _ => None,
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown algorithm {s:?}"));
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let spec = match (name, arg) {
            ("omp", None) => AlgorithmSpec::Omp,
            ("iht", None) => AlgorithmSpec::Iht,
            ("cosamp_t", None) | ("cosamp", Some("t")) => AlgorithmSpec::Cosamp(CosampWidth::Single),
            ("cosamp_2t", None) | ("cosamp", Some("2t")) | ("cosamp", None) => {
                AlgorithmSpec::Cosamp(CosampWidth::Double)
            }
            ("komp", Some(k)) => AlgorithmSpec::Komp(k.parse().map_err(|_| bad())?),
            ("hybrid", Some(a)) => AlgorithmSpec::Hybrid(a.parse().map_err(|_| bad())?),
            (other, None) if other.starts_with("komp") => {
                AlgorithmSpec::Komp(other["komp".len()..].parse().map_err(|_| bad())?)
            }
            (other, None) if other.starts_with("hybrid") => {
                AlgorithmSpec::Hybrid(other["hybrid".len()..].parse().map_err(|_| bad())?)
            }
            _ => return Err(bad()),
        };
        match spec {
            AlgorithmSpec::Komp(0) => Err(Error::InvalidArgument("komp needs K >= 1".into())),
            AlgorithmSpec::Hybrid(a) if !(a > 0.0 && a <= 1.0) => {
                Err(Error::InvalidArgument(format!("hybrid alpha must lie in (0, 1], got {a}")))
            }
            spec => Ok(spec),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub m: usize,
    pub n: usize,
    pub t_values: Vec<usize>,
    pub trials: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    /// Noise kind and level; the seed is replaced per trial.
    pub noise: NoiseSpec,
    pub master_seed: u64,
    pub success_tolerance: f64,
    pub column_normalized: bool,
    /// With `false` every runtime is written as zero, which makes output files
    /// byte-for-byte reproducible.
    pub record_timing: bool,
    pub cosamp_iterations: usize,
    pub iht: IhtConfig,
    /// Sampled subsets per order for the RIP probe.
    pub rip_samples: u64,
}

fn default_algorithms() -> Vec<AlgorithmSpec> {
    vec![
        AlgorithmSpec::Omp,
        AlgorithmSpec::Komp(2),
        AlgorithmSpec::Hybrid(0.2),
        AlgorithmSpec::Cosamp(CosampWidth::Double),
        AlgorithmSpec::Cosamp(CosampWidth::Single),
        AlgorithmSpec::Iht,
    ]
}

impl ExperimentConfig {
    /// The desk-scale grid: M = 100, N = 256, T = 4, 8, …, 52.
    pub fn default_for(experiment: Experiment) -> Self {
        let trials = match experiment {
            Experiment::RecoverySweep => 100,
            Experiment::DecaySweep => 20,
            Experiment::RipProbe => 5,
        };
        let (t_values, algorithms) = match experiment {
            Experiment::RipProbe => (vec![1, 2, 3, 4], Vec::new()),
            _ => ((1..=13).map(|i| 4 * i).collect(), default_algorithms()),
        };
        Self {
            experiment,
            m: 100,
            n: 256,
            t_values,
            trials,
            algorithms,
            noise: NoiseSpec::none(),
            master_seed: 1,
            success_tolerance: 0.01,
            column_normalized: false,
            record_timing: true,
            cosamp_iterations: CosampConfig::default().iterations,
            iht: IhtConfig::default(),
            rip_samples: 20_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.m == 0 || self.n == 0 {
            return bad(format!("dimensions must be positive, got {}x{}", self.m, self.n));
        }
        if self.t_values.is_empty() {
            return bad("t_values is empty".into());
        }
        if self.t_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("t_values must be strictly ascending, got {:?}", self.t_values));
        }
        let (lo, hi) = (self.t_values[0], *self.t_values.last().unwrap());
        if lo == 0 || hi > self.m || hi > self.n {
            return bad(format!(
                "t_values must lie in 1..={}, got {:?}",
                self.m.min(self.n),
                self.t_values
            ));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.experiment != Experiment::RipProbe && self.algorithms.is_empty() {
            return bad("no algorithms configured".into());
        }
        if !(self.success_tolerance >= 0.0 && self.success_tolerance.is_finite()) {
            return bad(format!("success_tolerance must be non-negative, got {}", self.success_tolerance));
        }
        if self.experiment == Experiment::RipProbe && self.rip_samples == 0 {
            return bad("rip_samples must be at least 1".into());
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_named(text, Path::new("<config>"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_named(&text, path)
    }

    fn parse_named(text: &str, path: &Path) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(path, format!("line {}: expected key = value", lineno + 1))
            })?;
            pairs.push((lineno + 1, key.trim().to_string(), value.trim().to_string()));
        }
        let experiment = match pairs.iter().find(|(_, k, _)| k == "experiment") {
            Some((_, _, v)) => v.parse()?,
            None => return Err(Error::parse(path, "missing key: experiment")),
        };
        let mut cfg = Self::default_for(experiment);
        let mut noise_kind = NoiseKind::None;
        let mut sigma = 0.0;
        for (lineno, key, value) in &pairs {
            let at = |e: Error| Error::parse(path, format!("line {lineno}: {key}: {e}"));
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("not a number: {v:?}")))
            };
            match key.as_str() {
                "experiment" => {}
                "m" => cfg.m = parse_count(value).map_err(at)?,
                "n" => cfg.n = parse_count(value).map_err(at)?,
                "t_values" => cfg.t_values = parse_t_values(value).map_err(at)?,
                "trials" => cfg.trials = parse_count(value).map_err(at)?,
                "algorithms" => {
                    cfg.algorithms = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()
                        .map_err(at)?
                }
                "noise" => {
                    noise_kind = match value.as_str() {
                        "none" => NoiseKind::None,
                        "gaussian" => NoiseKind::Gaussian,
                        _ => return Err(at(Error::InvalidArgument(format!("unknown noise {value:?}")))),
                    }
                }
                "noise_sigma" => sigma = num(value).map_err(at)?,
                "master_seed" => cfg.master_seed = parse_u64(value).map_err(at)?,
                "success_tolerance" => cfg.success_tolerance = num(value).map_err(at)?,
                "column_normalized" => cfg.column_normalized = parse_bool(value).map_err(at)?,
                "record_timing" => cfg.record_timing = parse_bool(value).map_err(at)?,
                "cosamp_iterations" => cfg.cosamp_iterations = parse_count(value).map_err(at)?,
                "iht_iterations" => cfg.iht.iterations = parse_count(value).map_err(at)?,
                "iht_step_size" => cfg.iht.step_size = num(value).map_err(at)?,
                "rip_samples" => cfg.rip_samples = parse_u64(value).map_err(at)?,
                _ => return Err(Error::parse(path, format!("line {lineno}: unknown key {key:?}"))),
            }
        }
        cfg.noise = match noise_kind {
            NoiseKind::None => NoiseSpec::none(),
            NoiseKind::Gaussian => NoiseSpec::gaussian(sigma, 0)?,
        };
        cfg.validate().map_err(|e| Error::parse(path, e.to_string()))?;
        Ok(cfg)
    }

    /// Every setting spelled out, in a form [`ExperimentConfig::parse`] reads back.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# resolved configuration");
        let _ = writeln!(s, "# prng: {PRNG_NAME}");
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "n = {}", self.n);
        let ts: Vec<String> = self.t_values.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "t_values = {}", ts.join(", "));
        let _ = writeln!(s, "trials = {}", self.trials);
        let algs: Vec<String> = self.algorithms.iter().map(|a| a.config_name()).collect();
        let _ = writeln!(s, "algorithms = {}", algs.join(", "));
        match self.noise.kind() {
            NoiseKind::None => {
                let _ = writeln!(s, "noise = none");
            }
            NoiseKind::Gaussian => {
                let _ = writeln!(s, "noise = gaussian");
                let _ = writeln!(s, "noise_sigma = {}", self.noise.sigma());
            }
        }
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        let _ = writeln!(s, "success_tolerance = {}", self.success_tolerance);
        let _ = writeln!(s, "column_normalized = {}", self.column_normalized);
        let _ = writeln!(s, "record_timing = {}", self.record_timing);
        let _ = writeln!(s, "cosamp_iterations = {}", self.cosamp_iterations);
        let _ = writeln!(s, "iht_iterations = {}", self.iht.iterations);
        let _ = writeln!(s, "iht_step_size = {}", self.iht.step_size);
        let _ = writeln!(s, "rip_samples = {}", self.rip_samples);
        s
    }
}

fn parse_u64(v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| Error::InvalidArgument(format!("not a non-negative integer: {v:?}")))
}

fn parse_count(v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::InvalidArgument(format!("not a non-negative integer: {v:?}")))
}

fn parse_bool(v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::InvalidArgument(format!("not a boolean: {v:?}"))),
    }
}

/// `4, 8, 12` or `start..end:step` (inclusive end).
fn parse_t_values(v: &str) -> Result<Vec<usize>> {
    if let Some((range, step)) = v.split_once(':') {
        let (a, b) = range
            .split_once("..")
            .ok_or_else(|| Error::InvalidArgument(format!("bad range {v:?}")))?;
        let (a, b, step) = (parse_count(a.trim())?, parse_count(b.trim())?, parse_count(step.trim())?);
        if step == 0 {
            return Err(Error::InvalidArgument("range step must be positive".into()));
        }
        return Ok((a..=b).step_by(step).collect());
    }
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_count(s.trim()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_desk_grid() {
        let cfg = ExperimentConfig::default_for(Experiment::RecoverySweep);
        assert_eq!(cfg.t_values, vec![4, 8, 12, 16, 20, 24, 28, 32, 36, 40, 44, 48, 52]);
        assert_eq!((cfg.m, cfg.n, cfg.trials), (100, 256, 100));
        assert_eq!(ExperimentConfig::default_for(Experiment::DecaySweep).trials, 20);
        cfg.validate().unwrap();
    }

    #[test]
    fn algorithm_names() {
        for (name, tag) in [
            ("omp", "omp"),
            ("komp:2", "komp2"),
            ("komp3", "komp3"),
            ("hybrid:0.2", "hybrid0.2"),
            ("cosamp:t", "cosamp_t"),
            ("cosamp:2t", "cosamp_2t"),
            ("cosamp_t", "cosamp_t"),
            ("iht", "iht"),
        ] {
            let spec: AlgorithmSpec = name.parse().unwrap();
            assert_eq!(spec.tag(), tag);
            assert_eq!(spec.config_name().parse::<AlgorithmSpec>().unwrap(), spec);
        }
        assert!("komp:0".parse::<AlgorithmSpec>().is_err());
        assert!("hybrid:1.5".parse::<AlgorithmSpec>().is_err());
        assert!("bp".parse::<AlgorithmSpec>().is_err());
    }

    #[test]
    fn parse_overrides_and_roundtrips() {
        let text = "experiment = decay\n# comment\nm = 40\nn = 80\nt_values = 2..10:4 # trailing\n\
                    algorithms = omp, komp:2\nnoise = gaussian\nnoise_sigma = 0.05\nrecord_timing = false\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.experiment, Experiment::DecaySweep);
        assert_eq!(cfg.t_values, vec![2, 6, 10]);
        assert_eq!(cfg.trials, 20);
        assert_eq!(cfg.noise.sigma(), 0.05);
        assert!(!cfg.record_timing);
        let again = ExperimentConfig::parse(&cfg.to_config_string()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn parse_rejects_bad_input() {
        for text in [
            "m = 10",
            "experiment = recovery\nbogus = 1",
            "experiment = recovery\nt_values = 8, 4",
            "experiment = recovery\nt_values = 4, 200",
            "experiment = recovery\nm",
            "experiment = recovery\ntrials = -1",
        ] {
            let err = ExperimentConfig::parse(text).unwrap_err();
            assert_eq!(err.kind(), "parse", "{text}");
        }
    }
}

//! Experiment configuration (TOML).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qmcis::isampling::{GaussianProblem, ProposalKind, TScale};
use qmcis::lattice::{make_pod_weights, PodWeights};
use qmcis::models::{GlmmInstance, RbInstance, Synthetic};
use qmcis::rkhs::WeightScheme;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Largest lattice size the CBC driver accepts.
pub const MAX_LATTICE_N: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    Mc,
    Rqmc,
}

impl Sampler {
    pub fn as_str(self) -> &'static str {
        match self {
            Sampler::Mc => "mc",
            Sampler::Rqmc => "rqmc",
        }
    }
}

/// A point-set / proposal pair, written `rqmc+lapis` or `mc+student_t:20`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Method {
    pub sampler: Sampler,
    pub proposal: ProposalKind,
}

impl Method {
    pub fn new(sampler: Sampler, proposal: ProposalKind) -> Self {
        Self { sampler, proposal }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.sampler.as_str(), self.proposal)
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (sampler, proposal) = s
            .split_once('+')
            .ok_or_else(|| format!("method {s:?} is not of the form <mc|rqmc>+<proposal>"))?;
        let sampler = match sampler {
            "mc" => Sampler::Mc,
            "rqmc" => Sampler::Rqmc,
            other => return Err(format!("unknown sampler {other:?}")),
        };
        let proposal = proposal.parse().map_err(|e| format!("{e}"))?;
        Ok(Self { sampler, proposal })
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Method {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemConfig {
    /// Poisson GLMM; `y_path` is a one-column CSV of counts.
    Glmm {
        y_path: PathBuf,
        beta: f64,
        kappa: f64,
        sigma: f64,
    },
    RandlemanBartter {
        d: usize,
        #[serde(default = "default_r0")]
        r0: f64,
        #[serde(default = "default_rb_sigma")]
        sigma: f64,
    },
    Synthetic(Synthetic),
}

fn default_r0() -> f64 {
    0.1
}

fn default_rb_sigma() -> f64 {
    0.01
}

/// Resolved model behind a [`ProblemConfig`].
#[derive(Debug, Clone)]
pub enum Model {
    Glmm(GlmmInstance),
    RandlemanBartter(RbInstance),
    Synthetic(Synthetic),
}

impl Model {
    pub fn problem(&self) -> qmcis::Result<GaussianProblem> {
        match self {
            Model::Glmm(g) => g.problem(),
            Model::RandlemanBartter(m) => m.problem(),
            Model::Synthetic(s) => s.problem(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Glmm(g) => g.y.len(),
            Model::RandlemanBartter(m) => m.d,
            Model::Synthetic(s) => s.problem().map(|p| p.dim()).unwrap_or(0),
        }
    }
}

impl ProblemConfig {
    pub fn build(&self) -> Result<Model, CliError> {
        match self {
            ProblemConfig::Glmm {
                y_path,
                beta,
                kappa,
                sigma,
            } => {
                let y = read_counts(y_path)?;
                Ok(Model::Glmm(GlmmInstance::new(y, *beta, *kappa, *sigma)?))
            }
            ProblemConfig::RandlemanBartter { d, r0, sigma } => {
                Ok(Model::RandlemanBartter(RbInstance::new(*d, *r0, *sigma)?))
            }
            ProblemConfig::Synthetic(s) => {
                s.problem()?;
                Ok(Model::Synthetic(s.clone()))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ProblemConfig::Glmm { .. } => "glmm".into(),
            ProblemConfig::RandlemanBartter { .. } => "randleman_bartter".into(),
            ProblemConfig::Synthetic(s) => {
                let name = match s {
                    Synthetic::GaussianMgf { .. } => "gaussian_mgf",
                    Synthetic::ConstantOne { .. } => "constant_one",
                    Synthetic::SinQuadratic => "sin_quadratic",
                };
                format!("synthetic:{name}")
            }
        }
    }
}

/// Reads a one-column CSV of non-negative integer counts. A non-numeric
/// first row is taken as a header.
pub fn read_counts(path: &Path) -> Result<Vec<u64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut y = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if rec.len() != 1 {
            return Err(CliError::Config(format!(
                "{}: row {} has {} columns, expected 1",
                path.display(),
                row + 1,
                rec.len()
            )));
        }
        match rec[0].parse::<u64>() {
            Ok(v) => y.push(v),
            Err(_) if row == 0 => continue,
            Err(_) => {
                return Err(CliError::Config(format!(
                    "{}: row {}: {:?} is not a non-negative integer",
                    path.display(),
                    row + 1,
                    &rec[0]
                )))
            }
        }
    }
    if y.is_empty() {
        return Err(CliError::Config(format!("{}: no observations", path.display())));
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PodConfig {
    pub kappa: f64,
    pub eta: f64,
    pub lambda: f64,
}

impl Default for PodConfig {
    fn default() -> Self {
        Self {
            kappa: 0.1,
            eta: 3.1,
            lambda: 0.51,
        }
    }
}

impl PodConfig {
    pub fn weights(&self, d: usize) -> qmcis::Result<PodWeights> {
        make_pod_weights(d, self.kappa, self.eta, self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CbcConfig {
    pub n: u64,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub n: u64,
    /// Pre-built generating vector; constructed (and cached) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierConfig {
    pub h_max: i64,
}

impl Default for FourierConfig {
    fn default() -> Self {
        Self { h_max: 128 }
    }
}

/// Default output locations; `--out` overrides the one for the command run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cbc: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier_check: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumptions: Option<PathBuf>,
}

fn default_replications() -> usize {
    16
}

fn default_scheme() -> WeightScheme {
    WeightScheme::Gaussian { alpha_sq: 4.0 }
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_list: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<Method>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub t_scale: TScale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemConfig>,
    #[serde(default = "default_scheme")]
    pub scheme: WeightScheme,
    #[serde(default)]
    pub pod: PodConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cbc: Option<CbcConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateConfig>,
    #[serde(default)]
    pub fourier: FourierConfig,
    #[serde(default, skip_serializing_if = "is_default")]
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            replications: default_replications(),
            n_list: Vec::new(),
            methods: Vec::new(),
            t_scale: TScale::default(),
            problem: None,
            scheme: default_scheme(),
            pod: PodConfig::default(),
            cbc: None,
            estimate: None,
            fourier: FourierConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

fn check_lattice_n(n: u64, what: &str) -> Result<(), CliError> {
    if n < 8 || !n.is_power_of_two() {
        return Err(CliError::Config(format!("{what}: N = {n} is not a power of two >= 8")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads and validates a config; relative data paths are taken relative
    /// to the config file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(ProblemConfig::Glmm { y_path, .. }) = &mut cfg.problem {
            rebase(y_path);
        }
        if let Some(EstimateConfig { vector: Some(v), .. }) = &mut cfg.estimate {
            rebase(v);
        }
        cfg.validate()?;
        cfg.check_files()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.replications < 2 {
            return Err(CliError::Config(format!(
                "replications must be at least 2, got {}",
                self.replications
            )));
        }
        for w in self.n_list.windows(2) {
            if w[1] <= w[0] {
                return Err(CliError::Config(format!(
                    "n_list must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        let any_rqmc = self.methods.iter().any(|m| m.sampler == Sampler::Rqmc);
        for &n in &self.n_list {
            check_lattice_n(n, "n_list")?;
            if any_rqmc && n > MAX_LATTICE_N {
                return Err(CliError::Config(format!(
                    "n_list: N = {n} exceeds the lattice limit {MAX_LATTICE_N}"
                )));
            }
        }
        self.scheme.validate().map_err(|e| CliError::Config(format!("scheme: {e}")))?;
        if !self.scheme.is_well_defined() {
            return Err(CliError::Config(format!(
                "scheme {} does not define a reproducing kernel",
                self.scheme.label()
            )));
        }
        self.pod
            .weights(1)
            .map_err(|e| CliError::Config(format!("pod: {e}")))?;
        if let Some(c) = &self.cbc {
            check_lattice_n(c.n, "cbc")?;
            if c.n > MAX_LATTICE_N || c.d == 0 {
                return Err(CliError::Config(format!(
                    "cbc: need N <= {MAX_LATTICE_N} and d >= 1, got N = {}, d = {}",
                    c.n, c.d
                )));
            }
        }
        if let Some(e) = &self.estimate {
            check_lattice_n(e.n, "estimate")?;
        }
        if self.fourier.h_max < 1 {
            return Err(CliError::Config("fourier.h_max must be positive".into()));
        }
        Ok(())
    }

    fn check_files(&self) -> Result<(), CliError> {
        let mut files = Vec::new();
        if let Some(ProblemConfig::Glmm { y_path, .. }) = &self.problem {
            files.push(y_path);
        }
        if let Some(EstimateConfig { vector: Some(v), .. }) = &self.estimate {
            files.push(v);
        }
        for f in files {
            if !f.is_file() {
                return Err(CliError::Config(format!("{} does not exist", f.display())));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<Model, CliError> {
        self.problem
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no [problem] section".into()))?
            .build()
    }

    pub fn require_methods(&self) -> Result<&[Method], CliError> {
        if self.methods.is_empty() {
            return Err(CliError::Config("config lists no methods".into()));
        }
        Ok(&self.methods)
    }

    /// Distinct proposals in first-appearance order.
    pub fn proposals(&self) -> Vec<ProposalKind> {
        let mut out: Vec<ProposalKind> = Vec::new();
        for m in &self.methods {
            if !out.contains(&m.proposal) {
                out.push(m.proposal);
            }
        }
        out
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> Result<String, CliError> {
        Ok(crate::cache::sha256_hex(self.to_toml()?.as_bytes()))
    }
}

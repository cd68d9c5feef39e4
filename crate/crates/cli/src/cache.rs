//! On-disk cache of CBC generating vectors keyed by (N, d, pod, scheme).

use std::fs;
use std::path::{Path, PathBuf};

use qmcis::lattice::{cbc_construct, parse_vector, write_vector_file, CbcProvenance, GeneratingVector};
use qmcis::rkhs::{ThetaGrid, WeightScheme};
use sha2::{Digest, Sha256};

use crate::config::PodConfig;
use crate::error::CliError;

pub const CACHE_ENV: &str = "QMCIS_CACHE_DIR";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Cache key; floats are written in round-trip form so distinct parameters
/// never collide.
pub fn vector_key(n: u64, d: usize, pod: &PodConfig, scheme: &WeightScheme) -> String {
    let scheme = match *scheme {
        WeightScheme::Gaussian { alpha_sq } => format!("gaussian:{alpha_sq:?}"),
        WeightScheme::Rational { lambda, nu } => format!("rational:{lambda:?}:{nu:?}"),
    };
    let text = format!(
        "cbc-v1 n={n} d={d} kappa={:?} eta={:?} lambda={:?} scheme={scheme}",
        pod.kappa, pod.eta, pod.lambda
    );
    sha256_hex(text.as_bytes())
}

#[derive(Debug, Clone, Default)]
pub struct VectorCache {
    dir: Option<PathBuf>,
}

impl VectorCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    /// Uses `$QMCIS_CACHE_DIR` when set and non-empty; otherwise nothing is stored.
    pub fn from_env() -> Self {
        Self::new(
            std::env::var_os(CACHE_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
        )
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, n: u64, d: usize, pod: &PodConfig, scheme: &WeightScheme) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|dir| dir.join(format!("{}.lat", vector_key(n, d, pod, scheme))))
    }

    fn lookup(path: &Path, n: u64, d: usize, want: &CbcProvenance) -> Option<GeneratingVector> {
        let text = fs::read_to_string(path).ok()?;
        let gen = parse_vector(&text).ok()?;
        // a stale or foreign file is rebuilt
        (gen.n == n && gen.dim() == d && gen.provenance.as_ref() == Some(want)).then_some(gen)
    }

    /// Returns the cached vector or runs CBC and stores the result.
    pub fn get_or_build(
        &self,
        n: u64,
        d: usize,
        pod: &PodConfig,
        scheme: &WeightScheme,
    ) -> Result<GeneratingVector, CliError> {
        let want = CbcProvenance {
            kappa: pod.kappa,
            eta: pod.eta,
            lambda_w: pod.lambda,
            scheme: *scheme,
        };
        let path = self.path_for(n, d, pod, scheme);
        if let Some(gen) = path.as_deref().and_then(|p| Self::lookup(p, n, d, &want)) {
            return Ok(gen);
        }
        let grid = ThetaGrid::new(scheme, n as usize)?;
        let gen = cbc_construct(n, d, &pod.weights(d)?, &grid)?;
        if let (Some(dir), Some(path)) = (&self.dir, &path) {
            fs::create_dir_all(dir)?;
            // write-then-rename so concurrent readers never see a partial file
            let tmp = path.with_extension(format!("lat.tmp{}", std::process::id()));
            write_vector_file(&tmp, &gen)?;
            fs::rename(&tmp, path)?;
        }
        Ok(gen)
    }
}

//! Plain-text generating vector files.
//!
//! ```text
//! 1024 4
//! 1 433 229 305
//! # pod kappa=0.1 eta=3.1 lambda=0.51 scheme=gaussian:4
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so reading a
//! written file reproduces the vector exactly.

use std::fs;
use std::path::Path;

use super::{CbcProvenance, GeneratingVector};
use crate::error::{Error, Result};
use crate::rkhs::WeightScheme;

fn format_scheme(s: &WeightScheme) -> String {
    match *s {
        WeightScheme::Gaussian { alpha_sq } => format!("gaussian:{alpha_sq:?}"),
        WeightScheme::Rational { lambda, nu } => format!("rational:{lambda:?}:{nu:?}"),
    }
}

fn parse_scheme(text: &str) -> Result<WeightScheme> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?} in scheme")));
    match parts.as_slice() {
        ["gaussian", a] => Ok(WeightScheme::Gaussian { alpha_sq: num(a)? }),
        ["rational", l, n] => Ok(WeightScheme::Rational {
            lambda: num(l)?,
            nu: num(n)?,
        }),
        _ => Err(Error::Parse(format!("unknown scheme {text:?}"))),
    }
}

pub fn format_vector(gen: &GeneratingVector) -> String {
    let z: Vec<String> = gen.z.iter().map(u64::to_string).collect();
    let mut out = format!("{} {}\n{}\n", gen.n, gen.dim(), z.join(" "));
    if let Some(p) = &gen.provenance {
        out.push_str(&format!(
            "# pod kappa={:?} eta={:?} lambda={:?} scheme={}\n",
            p.kappa,
            p.eta,
            p.lambda_w,
            format_scheme(&p.scheme)
        ));
    }
    out
}

pub fn parse_vector(text: &str) -> Result<GeneratingVector> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty vector file".into()))?;
    let head: Vec<u64> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
        .collect::<Result<_>>()?;
    let [n, d] = head[..] else {
        return Err(Error::Parse(format!("header must be \"N d\", got {header:?}")));
    };
    let zline = lines.next().ok_or_else(|| Error::Parse("missing z line".into()))?;
    let z: Vec<u64> = zline
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad component {t:?}"))))
        .collect::<Result<_>>()?;
    if z.len() as u64 != d {
        return Err(Error::Parse(format!("header says d = {d}, found {} components", z.len())));
    }
    let mut gen = GeneratingVector::new(n, z)?;
    if let Some(meta) = lines.next() {
        let rest = meta
            .trim()
            .strip_prefix("# pod")
            .ok_or_else(|| Error::Parse(format!("unexpected line {meta:?}")))?;
        let (mut kappa, mut eta, mut lambda_w, mut scheme) = (None, None, None, None);
        for kv in rest.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad field {kv:?}")))?;
            let num = || v.parse::<f64>().map_err(|_| Error::Parse(format!("bad value in {kv:?}")));
            match k {
                "kappa" => kappa = Some(num()?),
                "eta" => eta = Some(num()?),
                "lambda" => lambda_w = Some(num()?),
                "scheme" => scheme = Some(parse_scheme(v)?),
                _ => return Err(Error::Parse(format!("unknown field {k:?}"))),
            }
        }
        match (kappa, eta, lambda_w, scheme) {
            (Some(kappa), Some(eta), Some(lambda_w), Some(scheme)) => {
                gen.provenance = Some(CbcProvenance {
                    kappa,
                    eta,
                    lambda_w,
                    scheme,
                })
            }
            _ => return Err(Error::Parse("incomplete pod line".into())),
        }
    }
    Ok(gen)
}

pub fn write_vector_file(path: &Path, gen: &GeneratingVector) -> Result<()> {
    fs::write(path, format_vector(gen))
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

pub fn read_vector_file(path: &Path) -> Result<GeneratingVector> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_vector(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut g = GeneratingVector::new(1024, vec![1, 433, 229, 305]).unwrap();
        assert_eq!(parse_vector(&format_vector(&g)).unwrap(), g);
        g.provenance = Some(CbcProvenance {
            kappa: 0.1,
            eta: 3.1,
            lambda_w: 0.51,
            scheme: WeightScheme::Rational {
                lambda: 2.0,
                nu: 1.0 / 3.0 + 20.0,
            },
        });
        let text = format_vector(&g);
        assert!(text.lines().nth(2).unwrap().starts_with("# pod kappa=0.1 eta=3.1 lambda=0.51 scheme=rational:2.0:"));
        assert_eq!(parse_vector(&text).unwrap(), g);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_vector("").is_err());
        assert!(parse_vector("16 2\n1\n").is_err());
        assert!(parse_vector("16 1\n2\n").is_err());
        assert!(parse_vector("16 1\n1\n# pod kappa=0.1\n").is_err());
        assert!(parse_vector("16 1\n1\nextra\n").is_err());
    }
}

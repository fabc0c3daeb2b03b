//! Sequence and parameter parsing shared by the subcommands.

use std::io::Read;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use hausdorff_core::seqcore::DiscreteMeasure;
use hausdorff_core::{Scalar, ScalarKind, Sequence};

/// A sequence given inline or as a file with one value per line. Rationals
/// are written `a/b`; `--file -` reads standard input.
#[derive(Args, Debug, Clone, Default)]
pub struct SeqInput {
    /// Comma-separated terms c_0,c_1,...
    #[arg(long, allow_hyphen_values = true, conflicts_with = "file")]
    pub terms: Option<String>,
    /// File with one term per line (`#` comments allowed).
    #[arg(long)]
    pub file: Option<PathBuf>,
}

impl SeqInput {
    pub fn is_given(&self) -> bool {
        self.terms.is_some() || self.file.is_some()
    }

    pub fn load(&self, kind: ScalarKind) -> Result<Sequence> {
        if let Some(terms) = &self.terms {
            return Ok(Sequence::parse_list(terms, kind)?);
        }
        if let Some(path) = &self.file {
            return Ok(Sequence::parse_lines(&read_source(path)?, kind)?);
        }
        bail!("no sequence given; pass --terms or --file")
    }
}

/// Second operand of the binary sequence operations.
#[derive(Args, Debug, Clone, Default)]
pub struct OtherSeq {
    /// Comma-separated terms of the second sequence.
    #[arg(
        long = "with",
        allow_hyphen_values = true,
        conflicts_with = "with_file"
    )]
    pub with: Option<String>,
    /// File holding the second sequence.
    #[arg(long = "with-file")]
    pub with_file: Option<PathBuf>,
}

impl OtherSeq {
    pub fn load(&self, kind: ScalarKind) -> Result<Sequence> {
        SeqInput {
            terms: self.with.clone(),
            file: self.with_file.clone(),
        }
        .load(kind)
        .context("second sequence (--with or --with-file)")
    }
}

pub fn read_source(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn scalar(s: &str, kind: ScalarKind, name: &str) -> Result<Scalar> {
    Scalar::parse(s, kind).with_context(|| format!("--{name}"))
}

/// Clap value parser for float parameters; `a/b` is accepted too.
pub fn real(s: &str) -> std::result::Result<f64, String> {
    Scalar::parse(s, ScalarKind::Float)
        .or_else(|_| Scalar::parse(s, ScalarKind::Exact))
        .map(|v| v.to_f64())
        .map_err(|e| e.to_string())
}

/// `RE,IM` (or a single real value).
pub fn complex(s: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok((real(re)?, 0.0)),
        [re, im] => Ok((real(re)?, real(im)?)),
        _ => Err(format!("expected RE,IM, got '{s}'")),
    }
}

/// Comma-separated reals.
pub fn reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| real(t).map_err(anyhow::Error::msg))
        .collect()
}

/// `t:mass,t:mass,...` on `[0, 1]`; a bare `t` carries mass 1.
pub fn measure(s: &str, kind: ScalarKind) -> Result<DiscreteMeasure> {
    let atoms = s
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| {
            let (t, m) = a.split_once(':').unwrap_or((a, "1"));
            Ok((scalar(t, kind, "atoms")?, scalar(m, kind, "atoms")?))
        })
        .collect::<Result<Vec<_>>>()?;
    if atoms.is_empty() {
        bail!("--atoms needs at least one atom");
    }
    Ok(DiscreteMeasure::on_unit(atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_reals_and_complex() {
        assert_eq!(real("3/4"), Ok(0.75));
        assert_eq!(real("-2.5e-1"), Ok(-0.25));
        assert!(real("abc").is_err());
        assert_eq!(complex("0.1,-2"), Ok((0.1, -2.0)));
        assert_eq!(complex("3"), Ok((3.0, 0.0)));
        assert!(complex("1,2,3").is_err());
    }

    #[test]
    fn parses_measures() {
        let m = measure("0:1/2, 1:1/2", ScalarKind::Exact).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert!(measure("2:1", ScalarKind::Exact).is_err());
        assert!(measure("", ScalarKind::Exact).is_err());
    }

    #[test]
    fn inline_terms() {
        let s = SeqInput {
            terms: Some("1, 1/2, 1/3".into()),
            file: None,
        };
        assert_eq!(s.load(ScalarKind::Exact).unwrap()[2], Scalar::ratio(1, 3));
        assert!(SeqInput::default().load(ScalarKind::Exact).is_err());
    }
}

//! Run configuration: TOML, or JSON when the file ends in `.json`.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sscd_core::{FistaConfig, SolverConfig, TvConfig};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub penalty: PenaltyConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    #[default]
    Radon,
    Identity,
}

/// Exactly one of `phantom`, `image` or `sinogram` names the data source.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// `shepp`, `blocks` or `spikes`.
    pub phantom: Option<String>,
    /// Ground-truth image as CSV.
    pub image: Option<PathBuf>,
    /// Measured sinogram as `theta,sigma,value` CSV.
    pub sinogram: Option<PathBuf>,
    /// Matrix Market file; defaults to the Radon matrix of the sinogram geometry.
    pub matrix: Option<PathBuf>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    #[serde(default)]
    pub operator: OperatorKind,
    pub angles: Option<usize>,
    /// Detector bins; defaults to `⌈√2 max(n1, n2)⌉`.
    pub offsets: Option<usize>,
    /// Number of point sources of the `spikes` phantom.
    pub spikes: Option<usize>,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltyConfig {
    Lp {
        p: f64,
        alpha: f64,
        #[serde(default)]
        weights: Weights,
        #[serde(default)]
        basis: Basis,
    },
    Tv {
        alpha: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weights {
    #[default]
    Constant,
    /// One weight per line or comma separated.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    #[default]
    Identity,
    /// Haar synthesis with this many levels.
    Wavelet(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    BasGssn,
    Pgm,
    Fista,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::BasGssn => "bas_gssn",
            Method::Pgm => "pgm",
            Method::Fista => "fista",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub method: Method,
    /// Used by `bas_gssn`, `pgm` and the TV inner solves.
    pub bas_gssn: SolverConfig,
    pub fista: FistaConfig,
    pub tv: TvConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Pgm,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Image formats for the reconstruction.
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("sscd-out"),
            formats: vec![Format::Pgm, Format::Csv],
        }
    }
}

impl RunConfig {
    /// Parses `path` and resolves relative file references against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut cfg = if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
        .with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let pr = &mut self.problem;
        pr.image.iter_mut().chain(pr.sinogram.iter_mut()).chain(pr.matrix.iter_mut()).for_each(fix);
        if let PenaltyConfig::Lp { weights: Weights::File(p), .. } = &mut self.penalty {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pr = &self.problem;
        let sources = [pr.phantom.is_some(), pr.image.is_some(), pr.sinogram.is_some()];
        match sources.iter().filter(|s| **s).count() {
            1 => {}
            0 => bail!("problem needs one of the keys `phantom`, `image` or `sinogram`"),
            _ => bail!("problem keys `phantom`, `image` and `sinogram` are mutually exclusive"),
        }
        if pr.phantom.is_some() && (pr.n1.is_none() || pr.n2.is_none()) {
            bail!("problem.phantom requires the keys `n1` and `n2`");
        }
        if pr.sinogram.is_some() && (pr.n1.is_none() || pr.n2.is_none()) {
            bail!("problem.sinogram requires the keys `n1` and `n2`");
        }
        if pr.matrix.is_some() && pr.sinogram.is_none() {
            bail!("problem.matrix is only used together with `sinogram`");
        }
        if pr.sinogram.is_none() && pr.operator == OperatorKind::Radon && pr.angles.is_none() {
            bail!("the radon operator requires the key `problem.angles`");
        }
        if !(pr.noise >= 0.0 && pr.noise.is_finite()) {
            bail!("problem.noise must be nonnegative, got {}", pr.noise);
        }
        for path in [&pr.image, &pr.sinogram, &pr.matrix].into_iter().flatten() {
            if !path.is_file() {
                bail!("referenced file {} does not exist", path.display());
            }
        }
        match &self.penalty {
            PenaltyConfig::Lp { weights: Weights::File(p), .. } if !p.is_file() => {
                bail!("weights file {} does not exist", p.display())
            }
            PenaltyConfig::Tv { .. } if self.solver.method != Method::BasGssn => {
                bail!("the tv penalty is solved with method = \"bas_gssn\" only")
            }
            PenaltyConfig::Lp { p, .. } if self.solver.method == Method::Fista && *p != 1.0 => {
                bail!("method = \"fista\" requires penalty.p = 1, got {p}")
            }
            _ => {}
        }
        self.solver.bas_gssn.validate()?;
        self.solver.tv.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [problem]
        phantom = "blocks"
        n1 = 16
        n2 = 16
        angles = 8

        [penalty]
        kind = "lp"
        p = 1.0
        alpha = 0.1
    "#;

    #[test]
    fn minimal_toml_fills_defaults() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        c.validate().unwrap();
        assert_eq!(c.solver.method, Method::BasGssn);
        assert_eq!(c.output.formats, vec![Format::Pgm, Format::Csv]);
        assert!(matches!(c.penalty, PenaltyConfig::Lp { basis: Basis::Identity, .. }));
    }

    #[test]
    fn json_mirror_round_trips() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back = RunConfig::from_json(&json).unwrap();
        assert_eq!(back.problem.angles, Some(8));
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn missing_exponent_is_named() {
        let text = MINIMAL.replace("p = 1.0", "");
        let err = format!("{:#}", RunConfig::from_toml(&text).unwrap_err());
        assert!(err.contains("`p`"), "{err}");
    }

    #[test]
    fn tagged_options_parse() {
        let text = MINIMAL.replace("alpha = 0.1", "alpha = 0.1\nbasis = { wavelet = 2 }\nweights = { file = \"w.csv\" }");
        let c = RunConfig::from_toml(&text).unwrap();
        let PenaltyConfig::Lp { basis, weights, .. } = c.penalty else { panic!() };
        assert_eq!(basis, Basis::Wavelet(2));
        assert_eq!(weights, Weights::File("w.csv".into()));
    }

    #[test]
    fn rejects_conflicting_sources_and_unknown_keys() {
        let two = MINIMAL.replace("phantom = \"blocks\"", "phantom = \"blocks\"\nsinogram = \"s.csv\"");
        assert!(RunConfig::from_toml(&two).unwrap().validate().is_err());
        assert!(RunConfig::from_toml(&MINIMAL.replace("angles", "angels")).is_err());
        let fista_lp = MINIMAL.replace("p = 1.0", "p = 0.5") + "\n[solver]\nmethod = \"fista\"\n";
        assert!(RunConfig::from_toml(&fista_lp).unwrap().validate().is_err());
    }
}

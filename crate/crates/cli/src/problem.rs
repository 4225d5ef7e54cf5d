//! Builds the operator, data and penalty described by a [`RunConfig`].

use crate::config::{Basis, OperatorKind, PenaltyConfig, ProblemConfig, RunConfig, Weights};
use anyhow::{bail, Context, Result};
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sscd_core::linops::{mtx, Composed, Identity};
use sscd_core::tomo::io::{read_image_csv, read_sinogram_csv_file};
use sscd_core::tomo::{add_noise, Phantom, RadonGeometry, WaveletSynthesis};
use sscd_core::{ImageGrid, LinearOperator, LpPenalty};
use std::path::Path;

pub type Operator = Box<dyn LinearOperator>;

pub struct Assembled {
    pub n1: usize,
    pub n2: usize,
    /// Maps the unknowns to the data; includes the wavelet synthesis when one is configured.
    pub op: Operator,
    pub y: Vec<f64>,
    pub truth: Option<ImageGrid>,
    pub penalty: PenaltySetup,
}

pub enum PenaltySetup {
    Lp { penalty: LpPenalty, synthesis: Option<WaveletSynthesis> },
    Tv { alpha: f64 },
}

impl Assembled {
    /// The image represented by a solution vector.
    pub fn image(&self, solution: &[f64]) -> Result<ImageGrid> {
        let values = match &self.penalty {
            PenaltySetup::Lp { synthesis: Some(s), .. } => s.apply(solution),
            _ => solution.to_vec(),
        };
        Ok(ImageGrid::new(self.n1, self.n2, values)?)
    }
}

pub fn assemble(cfg: &RunConfig) -> Result<Assembled> {
    let pr = &cfg.problem;
    let (n1, n2, op, y, truth) = match &pr.sinogram {
        Some(path) => measured(pr, path)?,
        None => {
            let truth = ground_truth(pr)?;
            let (n1, n2) = (truth.n1(), truth.n2());
            let op: Operator = match pr.operator {
                OperatorKind::Identity => Box::new(Identity::new(n1 * n2)),
                OperatorKind::Radon => {
                    let angles = pr.angles.context("missing key `problem.angles`")?;
                    let offsets = pr.offsets.unwrap_or_else(|| default_offsets(n1, n2));
                    Box::new(RadonGeometry::new(n1, n2, angles, offsets)?.matrix())
                }
            };
            let clean = op.apply(truth.values());
            let y = add_noise(&clean, pr.noise, pr.seed.wrapping_add(1));
            (n1, n2, op, y, Some(truth))
        }
    };
    let n = n1 * n2;
    let (op, penalty) = match &cfg.penalty {
        PenaltyConfig::Lp { p, alpha, weights, basis } => {
            let w = match weights {
                Weights::Constant => vec![1.0; n],
                Weights::File(path) => read_weights(path, n)?,
            };
            let penalty = LpPenalty::new(*p, w, *alpha).context("invalid lp penalty")?;
            match basis {
                Basis::Identity => (op, PenaltySetup::Lp { penalty, synthesis: None }),
                Basis::Wavelet(levels) => {
                    let s = WaveletSynthesis::new(n1, n2, *levels).context("invalid wavelet basis")?;
                    let op: Operator = Box::new(Composed::new(op, s)?);
                    (op, PenaltySetup::Lp { penalty, synthesis: Some(s) })
                }
            }
        }
        PenaltyConfig::Tv { alpha } => {
            if !(*alpha >= 0.0 && alpha.is_finite()) {
                bail!("penalty.alpha must be nonnegative, got {alpha}");
            }
            (op, PenaltySetup::Tv { alpha: *alpha })
        }
    };
    Ok(Assembled { n1, n2, op, y, truth, penalty })
}

pub fn default_offsets(n1: usize, n2: usize) -> usize {
    (n1.max(n2) as f64 * std::f64::consts::SQRT_2).ceil() as usize
}

fn ground_truth(pr: &ProblemConfig) -> Result<ImageGrid> {
    if let Some(path) = &pr.image {
        let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let img = read_image_csv(f).with_context(|| format!("reading {}", path.display()))?;
        for (key, given, actual) in [("n1", pr.n1, img.n1()), ("n2", pr.n2, img.n2())] {
            if given.is_some_and(|g| g != actual) {
                bail!("problem.{key} = {} disagrees with the image file ({actual})", given.unwrap());
            }
        }
        return Ok(img);
    }
    let name = pr.phantom.as_deref().context("missing key `problem.phantom`")?;
    let (n1, n2) = (pr.n1.context("missing key `problem.n1`")?, pr.n2.context("missing key `problem.n2`")?);
    if name.eq_ignore_ascii_case("spikes") {
        return spikes(n1, n2, pr.spikes.unwrap_or((n1 * n2 / 64).max(1)), pr.seed);
    }
    Ok(name.parse::<Phantom>()?.render(n1, n2)?)
}

/// Nonnegative point sources with values in `[1, 2]` at seeded positions.
pub fn spikes(n1: usize, n2: usize, k: usize, seed: u64) -> Result<ImageGrid> {
    if n1 < 2 || n2 < 2 {
        bail!("the spikes phantom needs at least 2x2 pixels");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; n1 * n2];
    for i in sample(&mut rng, n1 * n2, k.min(n1 * n2)) {
        values[i] = rng.random_range(1.0..2.0);
    }
    Ok(ImageGrid::new(n1, n2, values)?)
}

type Measured = (usize, usize, Operator, Vec<f64>, Option<ImageGrid>);

fn measured(pr: &ProblemConfig, path: &Path) -> Result<Measured> {
    let sino = read_sinogram_csv_file(path)?;
    let (n1, n2) = (pr.n1.context("missing key `problem.n1`")?, pr.n2.context("missing key `problem.n2`")?);
    let op = match &pr.matrix {
        Some(m) => mtx::read_file(m)?,
        None => RadonGeometry {
            n1,
            n2,
            angles: sino.angles().to_vec(),
            offsets: sino.offsets().to_vec(),
        }
        .matrix(),
    };
    if op.shape() != (sino.values().len(), n1 * n2) {
        bail!(
            "matrix is {}x{}, expected {}x{} for the sinogram and grid",
            op.nrows(),
            op.ncols(),
            sino.values().len(),
            n1 * n2
        );
    }
    let y = add_noise(sino.values(), pr.noise, pr.seed.wrapping_add(1));
    Ok((n1, n2, Box::new(op), y, None))
}

fn read_weights(path: &Path, n: usize) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let w: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad weight {t:?} in {}", path.display())))
        .collect::<Result<_>>()?;
    if w.len() != n {
        bail!("{} holds {} weights, the grid has {n} pixels", path.display(), w.len());
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spikes_are_seeded_and_counted() {
        let a = spikes(8, 8, 5, 3).unwrap();
        assert_eq!(a, spikes(8, 8, 5, 3).unwrap());
        assert_eq!(a.values().iter().filter(|v| **v != 0.0).count(), 5);
        assert!(a.values().iter().all(|v| *v == 0.0 || (1.0..2.0).contains(v)));
    }

    #[test]
    fn identity_problem_without_noise_reproduces_phantom() {
        let cfg = RunConfig::from_toml(
            "[problem]\nphantom = \"blocks\"\nn1 = 16\nn2 = 16\noperator = \"identity\"\n[penalty]\nkind = \"tv\"\nalpha = 1.0\n",
        )
        .unwrap();
        let a = assemble(&cfg).unwrap();
        assert_eq!(a.y, a.truth.unwrap().values());
        assert_eq!(a.op.shape(), (256, 256));
    }
}

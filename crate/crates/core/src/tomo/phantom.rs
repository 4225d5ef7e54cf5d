use super::ImageGrid;
use crate::error::{Error, Result};
use std::str::FromStr;

/// The distinct pixel values of [`blocks_phantom`].
pub const BLOCKS_VALUES: [f64; 4] = [0.0, 0.4, 0.7, 1.0];

/// Named synthetic test images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phantom {
    Shepp,
    Blocks,
}

impl Phantom {
    pub fn render(self, n1: usize, n2: usize) -> Result<ImageGrid> {
        match self {
            Phantom::Shepp => shepp_phantom(n1, n2),
            Phantom::Blocks => blocks_phantom(n1, n2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phantom::Shepp => "shepp",
            Phantom::Blocks => "blocks",
        }
    }
}

impl FromStr for Phantom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shepp" | "shepp-logan" | "shepp_logan" => Ok(Phantom::Shepp),
            "blocks" => Ok(Phantom::Blocks),
            other => Err(Error::invalid(format!(
                "unknown phantom {other:?} (expected \"shepp\" or \"blocks\")"
            ))),
        }
    }
}

fn check_size(n1: usize, n2: usize) -> Result<()> {
    if n1 < 16 || n2 < 16 {
        return Err(Error::invalid(format!(
            "phantoms need at least 16x16 pixels, got {n1}x{n2}"
        )));
    }
    Ok(())
}

/// Nested rectangles with values in [`BLOCKS_VALUES`]. All edges lie on
/// pixel boundaries, away from the image border.
pub fn blocks_phantom(n1: usize, n2: usize) -> Result<ImageGrid> {
    check_size(n1, n2)?;
    let mut values = vec![0.0; n1 * n2];
    let mut fill = |rows: (usize, usize), cols: (usize, usize), v: f64| {
        for r in rows.0..rows.1 {
            for c in cols.0..cols.1 {
                values[r * n1 + c] = v;
            }
        }
    };
    fill((n2 / 8, 7 * n2 / 8), (n1 / 8, 7 * n1 / 8), 0.4);
    fill((n2 / 4, n2 / 2), (n1 / 4, n1 / 2), 0.7);
    fill((5 * n2 / 8, 3 * n2 / 4), (9 * n1 / 16, 13 * n1 / 16), 1.0);
    fill((n2 / 4, 3 * n2 / 8), (5 * n1 / 8, 3 * n1 / 4), 1.0);
    ImageGrid::new(n1, n2, values)
}

/// Modified Shepp-Logan head phantom, sampled at pixel centers and clamped to [0, 1].
pub fn shepp_phantom(n1: usize, n2: usize) -> Result<ImageGrid> {
    check_size(n1, n2)?;
    // (intensity, semi-axis a, semi-axis b, x0, y0, rotation in degrees)
    const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
        (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
        (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
        (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
        (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
        (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
        (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
        (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
        (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
        (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
        (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
    ];
    let hx = 2.0 / n1 as f64;
    let hy = 2.0 / n2 as f64;
    let mut values = Vec::with_capacity(n1 * n2);
    for row in 0..n2 {
        let y = 1.0 - (row as f64 + 0.5) * hy;
        for col in 0..n1 {
            let x = -1.0 + (col as f64 + 0.5) * hx;
            let mut v = 0.0;
            for &(intensity, a, b, x0, y0, deg) in &ELLIPSES {
                let (s, c) = deg.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let u = c * dx + s * dy;
                let w = -s * dx + c * dy;
                if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
                    v += intensity;
                }
            }
            values.push(v.clamp(0.0, 1.0));
        }
    }
    ImageGrid::new(n1, n2, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn distinct(img: &ImageGrid) -> Vec<f64> {
        let mut v: Vec<f64> = img.values().to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    #[test]
    fn blocks_value_set() {
        assert_eq!(distinct(&blocks_phantom(16, 16).unwrap()), BLOCKS_VALUES.to_vec());
        assert_eq!(distinct(&blocks_phantom(32, 24).unwrap()), BLOCKS_VALUES.to_vec());
    }

    #[test]
    fn shepp_in_unit_interval_and_deterministic() {
        let a = shepp_phantom(64, 48).unwrap();
        assert!(a.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(a.values().iter().any(|&v| v > 0.0));
        assert_eq!(a, shepp_phantom(64, 48).unwrap());
    }

    #[test]
    fn size_and_name_validation() {
        assert!(blocks_phantom(15, 16).is_err());
        assert!(shepp_phantom(16, 8).is_err());
        assert_eq!("Blocks".parse::<Phantom>().unwrap(), Phantom::Blocks);
        assert!("walnut".parse::<Phantom>().is_err());
    }
}

use super::{ImageGrid, Sinogram};
use crate::error::{Error, Result};
use crate::linops::{CsrMatrix, LinearOperator};
use std::f64::consts::PI;

/// `num_angles` angles uniform on `[0, π)`.
pub fn radon_angles(num_angles: usize) -> Vec<f64> {
    (0..num_angles)
        .map(|k| PI * k as f64 / num_angles as f64)
        .collect()
}

/// `num_offsets` detector-bin centers uniform on `[-1, 1]`.
pub fn radon_offsets(num_offsets: usize) -> Vec<f64> {
    (0..num_offsets)
        .map(|j| -1.0 + (2 * j + 1) as f64 / num_offsets as f64)
        .collect()
}

/// Image size plus the ray set of a parallel-beam scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonGeometry {
    pub n1: usize,
    pub n2: usize,
    pub angles: Vec<f64>,
    pub offsets: Vec<f64>,
}

impl RadonGeometry {
    pub fn new(n1: usize, n2: usize, num_angles: usize, num_offsets: usize) -> Result<Self> {
        for (name, v) in [
            ("n1", n1),
            ("n2", n2),
            ("num_angles", num_angles),
            ("num_offsets", num_offsets),
        ] {
            if v < 2 {
                return Err(Error::invalid(format!("{name} must be at least 2, got {v}")));
            }
        }
        Ok(RadonGeometry {
            n1,
            n2,
            angles: radon_angles(num_angles),
            offsets: radon_offsets(num_offsets),
        })
    }

    pub fn num_rays(&self) -> usize {
        self.angles.len() * self.offsets.len()
    }

    pub fn matrix(&self) -> CsrMatrix {
        let mut offsets = Vec::with_capacity(self.num_rays() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for &theta in &self.angles {
            for &sigma in &self.offsets {
                for (pixel, len) in trace_ray(self.n1, self.n2, theta, sigma) {
                    indices.push(pixel);
                    values.push(len);
                }
                offsets.push(indices.len());
            }
        }
        CsrMatrix::new(self.num_rays(), self.n1 * self.n2, offsets, indices, values)
            .expect("ray tracing yields sorted, in-range columns")
    }

    /// Projects an image with a prebuilt matrix of this geometry.
    pub fn project(&self, matrix: &CsrMatrix, image: &ImageGrid) -> Result<Sinogram> {
        if image.n1() != self.n1 || image.n2() != self.n2 {
            return Err(Error::invalid(format!(
                "image is {}x{}, geometry expects {}x{}",
                image.n1(),
                image.n2(),
                self.n1,
                self.n2
            )));
        }
        let values = matrix.apply(image.values());
        Sinogram::new(self.angles.clone(), self.offsets.clone(), values)
    }
}

/// Discrete Radon matrix: one row per (angle, offset) ray, angle-major; entry
/// (ray, pixel) is the intersection length of the ray with the pixel square.
pub fn build_radon(n1: usize, n2: usize, num_angles: usize, num_offsets: usize) -> Result<CsrMatrix> {
    Ok(RadonGeometry::new(n1, n2, num_angles, num_offsets)?.matrix())
}

/// Siddon ray tracing of the line `{σω(θ) + tω(θ)^⊥ : t ∈ R}` through the
/// `n1 × n2` pixel grid on `[-1,1]^2`. Returns (pixel index, chord length)
/// pairs sorted by pixel index.
pub fn trace_ray(n1: usize, n2: usize, theta: f64, sigma: f64) -> Vec<(usize, f64)> {
    let (s, c) = theta.sin_cos();
    let origin = [sigma * c, sigma * s];
    let dir = [-s, c];

    // clip against the bounding box
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for a in 0..2 {
        if dir[a] == 0.0 {
            if origin[a] <= -1.0 || origin[a] >= 1.0 {
                return Vec::new();
            }
        } else {
            let t1 = (-1.0 - origin[a]) / dir[a];
            let t2 = (1.0 - origin[a]) / dir[a];
            t_lo = t_lo.max(t1.min(t2));
            t_hi = t_hi.min(t1.max(t2));
        }
    }
    if t_hi <= t_lo {
        return Vec::new();
    }

    let hx = 2.0 / n1 as f64;
    let hy = 2.0 / n2 as f64;
    let mut ts = vec![t_lo, t_hi];
    if dir[0] != 0.0 {
        for k in 1..n1 {
            let t = (-1.0 + k as f64 * hx - origin[0]) / dir[0];
            if t > t_lo && t < t_hi {
                ts.push(t);
            }
        }
    }
    if dir[1] != 0.0 {
        for k in 1..n2 {
            let t = (-1.0 + k as f64 * hy - origin[1]) / dir[1];
            if t > t_lo && t < t_hi {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);

    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(ts.len());
    for w in ts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let tm = 0.5 * (w[0] + w[1]);
        let x = origin[0] + tm * dir[0];
        let y = origin[1] + tm * dir[1];
        let col = (((x + 1.0) / hx).floor() as isize).clamp(0, n1 as isize - 1) as usize;
        let row = (((1.0 - y) / hy).floor() as isize).clamp(0, n2 as isize - 1) as usize;
        entries.push((row * n1 + col, len));
    }
    entries.sort_by_key(|e| e.0);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for (p, len) in entries {
        match merged.last_mut() {
            Some(last) if last.0 == p => last.1 += len,
            _ => merged.push((p, len)),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::testing::adjoint_defect;

    #[test]
    fn vertical_ray_through_pixel_centers_has_side_length_chords() {
        // θ = 0: the ray is the vertical line x = σ
        let chords = trace_ray(2, 2, 0.0, -0.5);
        assert_eq!(chords.len(), 2);
        assert_eq!(chords[0].0, 0);
        assert_eq!(chords[1].0, 2);
        for (_, len) in chords {
            assert!((len - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ray_missing_the_box_is_empty() {
        assert!(trace_ray(4, 4, 0.0, 1.2).is_empty());
        assert!(trace_ray(4, 4, PI / 4.0, 1.5).is_empty());
    }

    #[test]
    fn diagonal_chord_total_is_box_diagonal() {
        let total: f64 = trace_ray(7, 5, PI / 4.0, 0.0).iter().map(|e| e.1).sum();
        assert!((total - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_image_projects_to_zero() {
        let geo = RadonGeometry::new(8, 6, 5, 9).unwrap();
        let a = geo.matrix();
        let sino = geo.project(&a, &ImageGrid::zeros(8, 6).unwrap()).unwrap();
        assert!(sino.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matrix_shape_and_adjoint() {
        let a = build_radon(12, 10, 7, 15).unwrap();
        assert_eq!(a.shape(), (7 * 15, 120));
        assert!(adjoint_defect(&a, 100, 11) <= 1e-10);
        assert!(build_radon(1, 10, 7, 15).is_err());
    }

    #[test]
    fn disk_projection_matches_analytic_chord() {
        let n = 64;
        let r = 0.6;
        let h = 2.0 / n as f64;
        let values = (0..n * n)
            .map(|p| {
                let (row, col) = (p / n, p % n);
                let x = -1.0 + (col as f64 + 0.5) * h;
                let y = 1.0 - (row as f64 + 0.5) * h;
                if x * x + y * y <= r * r { 1.0 } else { 0.0 }
            })
            .collect();
        let img = ImageGrid::new(n, n, values).unwrap();
        for theta in [0.0, 0.3, PI / 4.0, 2.0] {
            let row: f64 = trace_ray(n, n, theta, 0.0)
                .iter()
                .map(|&(p, len)| len * img.values()[p])
                .sum();
            assert!((row - 2.0 * r).abs() <= 2.0 * h, "theta={theta}: {row}");
        }
    }

    #[test]
    fn axis_aligned_shift_shifts_sinogram() {
        let n = 16;
        // num_offsets = n places the θ=0 and θ=π/2 rays on pixel centers
        let geo = RadonGeometry::new(n, n, 4, n).unwrap();
        let a = geo.matrix();
        let mut base = vec![0.0; n * n];
        let mut shifted = vec![0.0; n * n];
        for (row, col, v) in [(3, 4, 1.0), (7, 9, 0.5), (10, 2, 0.25)] {
            base[row * n + col] = v;
            shifted[(row + 1) * n + (col + 1)] = v;
        }
        let sb = a.apply(&base);
        let ss = a.apply(&shifted);
        // θ = 0 measures x: one column right is one offset up
        for j in 0..n - 1 {
            assert!((ss[j + 1] - sb[j]).abs() < 1e-12);
        }
        // θ = π/2 measures y (σω = (0, σ)); one row down is one offset down, with
        // the ray direction flipped the offsets run the same way as y
        let k = 2 * n;
        for j in 1..n {
            assert!((ss[k + j - 1] - sb[k + j]).abs() < 1e-12);
        }
    }
}

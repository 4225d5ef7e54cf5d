//! Small dense vector helpers on slices. Reductions run sequentially so results are reproducible.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// y += a * x
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| a * v).collect()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// `a + b` as an unevaluated pair `(s, e)` with `s = fl(a + b)`.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `a · b` as an unevaluated pair.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Double-double accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Compensated {
    pub hi: f64,
    pub lo: f64,
}

impl Compensated {
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Compensated { hi, lo }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let (s, e) = two_sum(self.hi, v);
        self.hi = s;
        self.lo += e;
    }

    #[inline]
    pub fn add_pair(&mut self, other: Compensated) {
        self.add(other.hi);
        self.lo += other.lo;
    }

    #[inline]
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, pe) = two_prod(a, b);
        self.add(p);
        self.lo += pe;
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

pub fn sum_compensated(terms: impl IntoIterator<Item = f64>) -> Compensated {
    let mut acc = Compensated::default();
    terms.into_iter().for_each(|t| acc.add(t));
    acc
}

pub fn dot_compensated(a: &[f64], b: &[f64]) -> Compensated {
    let mut acc = Compensated::default();
    a.iter().zip(b).for_each(|(x, y)| acc.add_product(*x, *y));
    acc
}

/// `Σ (hi_i + lo_i)²` for residuals held as pairs.
pub fn norm_sq_pairs(hi: &[f64], lo: &[f64]) -> Compensated {
    let mut acc = Compensated::default();
    for (h, l) in hi.iter().zip(lo) {
        acc.add_product(*h, *h);
        acc.lo += 2.0 * h * l + l * l;
    }
    acc
}

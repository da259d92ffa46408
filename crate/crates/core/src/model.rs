//! Random instance synthesis for `Y = Π X B + W`.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::permutation::Permutation;
use crate::rng::{derive_seed, rng_from_seed, Stream};
use crate::scalar::Real;

/// Entry distribution of the design matrix. Entries are i.i.d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DistributionKind {
    /// N(0, 1)
    Gaussian,
    /// U[-1, 1], variance 1/3
    Uniform,
    /// ±1 with equal probability
    Rademacher,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 3] =
        [DistributionKind::Gaussian, DistributionKind::Uniform, DistributionKind::Rademacher];

    pub fn is_log_concave(self) -> bool {
        matches!(self, DistributionKind::Gaussian | DistributionKind::Uniform)
    }

    pub fn variance(self) -> f64 {
        match self {
            DistributionKind::Uniform => 1.0 / 3.0,
            DistributionKind::Gaussian | DistributionKind::Rademacher => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::Gaussian => "gaussian",
            DistributionKind::Uniform => "uniform",
            DistributionKind::Rademacher => "rademacher",
        }
    }

    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            DistributionKind::Gaussian => StandardNormal.sample(rng),
            DistributionKind::Uniform => rng.random_range(-1.0..=1.0),
            DistributionKind::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(DistributionKind::Gaussian),
            "uniform" => Ok(DistributionKind::Uniform),
            "rademacher" => Ok(DistributionKind::Rademacher),
            other => Err(Error::invalid(format!("unknown distribution `{other}`"))),
        }
    }
}

/// n×p design with i.i.d. entries from `dist`, as-is (uniform keeps variance 1/3).
pub fn sample_design_matrix<T: Real>(n: usize, p: usize, dist: DistributionKind, seed: u64) -> Result<DenseMatrix<T>> {
    sample_design_matrix_with(n, p, dist, seed, false)
}

/// Like [`sample_design_matrix`]; `unit_variance` rescales entries to variance one.
pub fn sample_design_matrix_with<T: Real>(
    n: usize,
    p: usize,
    dist: DistributionKind,
    seed: u64,
    unit_variance: bool,
) -> Result<DenseMatrix<T>> {
    if n == 0 || p == 0 {
        return Err(Error::invalid(format!("design dimensions must be positive, got {n}x{p}")));
    }
    let scale = if unit_variance { dist.variance().sqrt().recip() } else { 1.0 };
    let mut rng = rng_from_seed(seed);
    let data = (0..n * p).map(|_| T::lit(scale * dist.draw(&mut rng))).collect();
    DenseMatrix::from_vec(n, p, data)
}

/// Uniformly random permutation of `0..n` displacing exactly `h` points.
///
/// The displaced set is a uniform `h`-subset; its arrangement is a uniform
/// derangement obtained by rejection (fewer than e shuffles on average).
pub fn sample_permutation_with_hamming_weight(n: usize, h: usize, seed: u64) -> Result<Permutation> {
    if h > n {
        return Err(Error::invalid(format!("cannot displace {h} of {n} points")));
    }
    if h == 1 {
        return Err(Error::invalid("no permutation displaces exactly one point"));
    }
    let mut rng = rng_from_seed(seed);
    let mut map: Vec<usize> = (0..n).collect();
    if h == 0 {
        return Ok(Permutation::from_map_unchecked(map));
    }
    let mut support = index::sample(&mut rng, n, h).into_vec();
    support.sort_unstable();
    let mut targets = support.clone();
    loop {
        targets.shuffle(&mut rng);
        if support.iter().zip(&targets).all(|(a, b)| a != b) {
            break;
        }
    }
    for (&i, &j) in support.iter().zip(&targets) {
        map[i] = j;
    }
    Ok(Permutation::from_map_unchecked(map))
}

/// p×m signal whose column `i < min(p, m)` is `scale·eᵢ`; remaining columns are zero.
pub fn build_canonical_signal<T: Real>(p: usize, m: usize, scale: T) -> Result<DenseMatrix<T>> {
    if p == 0 || m == 0 {
        return Err(Error::invalid(format!("signal dimensions must be positive, got {p}x{m}")));
    }
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::invalid(format!("signal scale must be positive and finite, got {scale}")));
    }
    let mut b = DenseMatrix::zeros(p, m);
    for i in 0..p.min(m) {
        b[(i, i)] = scale;
    }
    Ok(b)
}

/// A synthesized observation together with its ground truth.
#[derive(Clone, Debug)]
pub struct ProblemInstance<T> {
    pub x: DenseMatrix<T>,
    pub b_true: DenseMatrix<T>,
    pub perm_true: Permutation,
    pub noise_sigma: T,
    pub y: DenseMatrix<T>,
    pub seed: u64,
    pub dist: DistributionKind,
    pub h: usize,
}

impl<T: Real> ProblemInstance<T> {
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    pub fn m(&self) -> usize {
        self.y.cols()
    }

    /// `Π X B` without noise.
    pub fn clean_signal(&self) -> DenseMatrix<T> {
        self.perm_true
            .apply(&self.x.matmul(&self.b_true).expect("shapes checked at synthesis"))
            .expect("shapes checked at synthesis")
    }
}

/// Draws `X`, `Π` and `W` from independent sub-streams of `seed` and forms `Y = Π X B + W`.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_instance<T: Real>(
    n: usize,
    p: usize,
    m: usize,
    h: usize,
    dist: DistributionKind,
    b_true: &DenseMatrix<T>,
    sigma: T,
    seed: u64,
) -> Result<ProblemInstance<T>> {
    synthesize_instance_with(n, p, m, h, dist, false, b_true, sigma, seed)
}

#[allow(clippy::too_many_arguments)]
pub fn synthesize_instance_with<T: Real>(
    n: usize,
    p: usize,
    m: usize,
    h: usize,
    dist: DistributionKind,
    unit_variance: bool,
    b_true: &DenseMatrix<T>,
    sigma: T,
    seed: u64,
) -> Result<ProblemInstance<T>> {
    if b_true.shape() != (p, m) {
        return Err(Error::invalid(format!("signal is {}x{}, expected {p}x{m}", b_true.rows(), b_true.cols())));
    }
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return Err(Error::invalid(format!("noise level must be finite and non-negative, got {sigma}")));
    }
    let x = sample_design_matrix_with(n, p, dist, derive_seed(seed, Stream::Design as u64), unit_variance)?;
    let perm_true = sample_permutation_with_hamming_weight(n, h, derive_seed(seed, Stream::Permutation as u64))?;
    let mut y = perm_true.apply(&x.matmul(b_true)?)?;
    if sigma > T::zero() {
        let mut rng = rng_from_seed(derive_seed(seed, Stream::Noise as u64));
        for i in 0..n {
            for v in y.row_mut(i) {
                let w: f64 = StandardNormal.sample(&mut rng);
                *v += sigma * T::lit(w);
            }
        }
    }
    Ok(ProblemInstance { x, b_true: b_true.clone(), perm_true, noise_sigma: sigma, y, seed, dist, h })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn rademacher_support() {
        let x = sample_design_matrix::<f64>(2, 2, DistributionKind::Rademacher, 3).unwrap();
        assert!(x.as_slice().iter().all(|&v| v == 1.0 || v == -1.0));
        let x = sample_design_matrix::<f64>(200, 3, DistributionKind::Rademacher, 4).unwrap();
        assert!(x.as_slice().iter().all(|&v| v == 1.0 || v == -1.0));
    }

    #[test]
    fn gaussian_and_uniform_moments() {
        let g = sample_design_matrix::<f64>(10_000, 1, DistributionKind::Gaussian, 11).unwrap();
        let (mean, var) = moments(g.as_slice());
        assert!((-0.05..=0.05).contains(&mean), "mean {mean}");
        assert!((0.9..=1.1).contains(&var), "var {var}");

        let u = sample_design_matrix::<f64>(10_000, 1, DistributionKind::Uniform, 11).unwrap();
        let (_, var) = moments(u.as_slice());
        assert!((0.30..=0.37).contains(&var), "var {var}");
        assert!(u.as_slice().iter().all(|v| v.abs() <= 1.0));

        let un = sample_design_matrix_with::<f64>(10_000, 1, DistributionKind::Uniform, 11, true).unwrap();
        let (_, var) = moments(un.as_slice());
        assert!((0.9..=1.1).contains(&var), "var {var}");
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(sample_design_matrix::<f64>(0, 2, DistributionKind::Gaussian, 0).is_err());
        assert!(sample_design_matrix::<f64>(2, 0, DistributionKind::Gaussian, 0).is_err());
    }

    #[test]
    fn hamming_weight_edge_cases() {
        assert!(sample_permutation_with_hamming_weight(5, 0, 1).unwrap().is_identity());
        let swap = sample_permutation_with_hamming_weight(5, 2, 1).unwrap();
        assert_eq!(swap.displaced(), 2);
        let moved: Vec<usize> = (0..5).filter(|&i| swap.get(i) != i).collect();
        assert_eq!(swap.get(moved[0]), moved[1]);
        assert_eq!(swap.get(moved[1]), moved[0]);
        assert!(sample_permutation_with_hamming_weight(5, 1, 1).is_err());
        assert!(sample_permutation_with_hamming_weight(5, 6, 1).is_err());
        assert_eq!(sample_permutation_with_hamming_weight(5, 5, 1).unwrap().displaced(), 5);
    }

    #[test]
    fn canonical_signal_shapes() {
        let b = build_canonical_signal(3, 2, 1.0).unwrap();
        assert_eq!(b, DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap());
        assert_eq!(b.frobenius_norm_sq(), 2.0);
        let b = build_canonical_signal(2, 5, 2.0).unwrap();
        assert_eq!(b.frobenius_norm_sq(), 8.0);
        for j in 2..5 {
            assert!(b.column(j).iter().all(|&v| v == 0.0));
        }
        assert!(build_canonical_signal(2, 2, 0.0).is_err());
        assert!(build_canonical_signal(0, 2, 1.0).is_err());
    }

    #[test]
    fn noiseless_instance_is_exact_and_deterministic() {
        let b = build_canonical_signal(4, 3, 1.0).unwrap();
        let a = synthesize_instance(30, 4, 3, 10, DistributionKind::Gaussian, &b, 0.0, 9).unwrap();
        assert!(a.y.sub(&a.clean_signal()).unwrap().is_zero());
        assert_eq!(a.perm_true.displaced(), 10);

        let b1 = synthesize_instance(30, 4, 3, 10, DistributionKind::Uniform, &b, 0.5, 9).unwrap();
        let b2 = synthesize_instance(30, 4, 3, 10, DistributionKind::Uniform, &b, 0.5, 9).unwrap();
        assert_eq!(b1.y, b2.y);
        assert_eq!(b1.x, b2.x);
        assert_eq!(b1.perm_true, b2.perm_true);
    }

    #[test]
    fn synthesis_validates_shapes() {
        let b = build_canonical_signal(4, 3, 1.0).unwrap();
        assert!(synthesize_instance(30, 5, 3, 10, DistributionKind::Gaussian, &b, 0.0, 9).is_err());
        assert!(synthesize_instance(30, 4, 3, 1, DistributionKind::Gaussian, &b, 0.0, 9).is_err());
        assert!(synthesize_instance(30, 4, 3, 2, DistributionKind::Gaussian, &b, -1.0, 9).is_err());
    }
}

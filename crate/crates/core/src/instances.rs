//! Seeded kernel generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, so a given
//! `(generator, parameters, seed)` triple always yields the same kernel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Scalar>(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        T::of(z)
    })
}

/// `GᵀG / m + (H − Hᵀ)·scale/2` for Gaussian `G` (m×m) and `H`; nPSD by construction.
fn npsd_square<T: Scalar>(m: usize, skew_scale: f64, rng: &mut ChaCha8Rng) -> Matrix<T> {
    let g = gaussian::<T>(m, m, rng);
    let sym = g.transpose().matmul(&g).scale(T::one() / T::of_usize(m));
    let h = gaussian::<T>(m, m, rng);
    let skew = h.sub(&h.transpose()).scale(T::of(0.5 * skew_scale));
    sym.add(&skew)
}

/// Dense nPSD kernel: symmetric PSD part plus a skew-symmetric part.
pub fn random_npsd<T: Scalar>(n: usize, skew_scale: f64, seed: u64) -> Kernel<T> {
    let mut r = rng(seed);
    Kernel::new(npsd_square(n, skew_scale, &mut r)).expect("generated kernel is square")
}

/// Symmetric PSD kernel `B Bᵀ` with Gaussian `B` of the given rank.
pub fn sym_psd<T: Scalar>(n: usize, rank: usize, seed: u64) -> Kernel<T> {
    let mut r = rng(seed);
    let b = gaussian::<T>(n, rank, &mut r);
    Kernel::new(b.matmul(&b.transpose())).expect("generated kernel is square")
}

/// `L = B C Bᵀ` with Gaussian `B` (n×d) and nPSD `C` (d×d).
pub fn lowrank_npsd<T: Scalar>(n: usize, d: usize, seed: u64) -> Kernel<T> {
    let mut r = rng(seed);
    let b = gaussian::<T>(n, d, &mut r);
    let c = npsd_square(d, 1.0, &mut r);
    Kernel::from_lowrank(b, c).expect("factor shapes agree")
}

/// Block-diagonal kernel with blocks `[[c_i, x_i], [-x_i, c_i]]`.
///
/// Requires `c` strictly decreasing and `> 1`, `x` strictly increasing, and
/// `min x >= 10 max c`.
pub fn skew_block<T: Scalar>(c: &[f64], x: &[f64]) -> Result<Kernel<T>> {
    if c.is_empty() || c.len() != x.len() {
        return Err(Error::Domain(
            "skew-block needs equally many c and x values (at least one)".into(),
        ));
    }
    if c.iter().any(|&v| v <= 1.0) || c.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Domain(
            "c must be strictly decreasing and > 1".into(),
        ));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("x must be strictly increasing".into()));
    }
    let max_c = c.iter().copied().fold(f64::MIN, f64::max);
    let min_x = x.iter().copied().fold(f64::MAX, f64::min);
    if min_x < 10.0 * max_c {
        return Err(Error::Domain(format!(
            "min x ({min_x}) must be at least 10 * max c ({max_c})"
        )));
    }
    let n = 2 * c.len();
    let mut m = Matrix::<T>::zeros(n, n);
    for (b, (&ci, &xi)) in c.iter().zip(x).enumerate() {
        let i = 2 * b;
        m[(i, i)] = T::of(ci);
        m[(i + 1, i + 1)] = T::of(ci);
        m[(i, i + 1)] = T::of(xi);
        m[(i + 1, i)] = T::of(-xi);
    }
    Kernel::new(m)
}

/// Item 0 is isolated with diagonal `c0 > 0`; items `1..` form zero-diagonal
/// skew blocks `[[0, x_i], [-x_i, 0]]`. Every principal minor containing item 0
/// with even size vanishes.
pub fn skew_single_diagonal<T: Scalar>(c0: f64, x: &[f64]) -> Result<Kernel<T>> {
    if c0 <= 0.0 || x.is_empty() {
        return Err(Error::Domain("need c0 > 0 and at least one block".into()));
    }
    let n = 1 + 2 * x.len();
    let mut m = Matrix::<T>::zeros(n, n);
    m[(0, 0)] = T::of(c0);
    for (b, &xi) in x.iter().enumerate() {
        let i = 1 + 2 * b;
        m[(i, i + 1)] = T::of(xi);
        m[(i + 1, i)] = T::of(-xi);
    }
    Kernel::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::NPSD_TOL;

    #[test]
    fn generators_are_npsd_and_deterministic() {
        let a: Kernel<f64> = random_npsd(6, 1.0, 42);
        let b: Kernel<f64> = random_npsd(6, 1.0, 42);
        assert_eq!(a, b);
        assert!(a.is_npsd(NPSD_TOL));
        assert!(sym_psd::<f64>(6, 3, 1).is_npsd(NPSD_TOL));
        let lr: Kernel<f64> = lowrank_npsd(8, 3, 1);
        assert!(lr.is_npsd(NPSD_TOL));
        let f = lr.lowrank().unwrap();
        let rebuilt = f.b.matmul(&f.c).matmul(&f.b.transpose());
        assert!(rebuilt.sub(lr.entries()).max_abs() < 1e-12);
    }

    #[test]
    fn skew_block_layout_and_validation() {
        let k: Kernel<f64> = skew_block(&[4.0, 3.0, 2.0], &[100.0, 200.0, 300.0]).unwrap();
        assert_eq!(k.n(), 6);
        assert_eq!(k.principal_minor(&[0, 1]).unwrap(), 10016.0);
        assert!(k.is_npsd(NPSD_TOL));
        assert!(skew_block::<f64>(&[2.0, 3.0], &[100.0, 200.0]).is_err());
        assert!(skew_block::<f64>(&[3.0, 2.0], &[200.0, 100.0]).is_err());
        assert!(skew_block::<f64>(&[3.0, 2.0], &[20.0, 100.0]).is_err());
        assert!(skew_block::<f64>(&[1.0], &[100.0]).is_err());
    }
}

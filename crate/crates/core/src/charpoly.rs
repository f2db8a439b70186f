//! Superset marginals `μ(Y) = Σ_{S ⊇ Y, |S| = k} det(L_S)`.
//!
//! `μ(Y)` is the coefficient of `λ^{n-k}` in `g(λ) = det(L + λ·diag(𝟙_Ỹ))`.
//! The dense path recovers the coefficients of `g` by interpolation at
//! Chebyshev nodes. The low-rank path works with the `d×d` matrix
//! `F_Y = (C − C D_Y C) B_Ỹᵀ B_Ỹ`, whose nonzero spectrum equals that of the
//! conditioned kernel, and turns power sums into elementary symmetric
//! polynomials with Newton's identities.

use num_complex::Complex;

use crate::combin::{complement, is_valid_set};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Imaginary residue allowed on `e_t`, relative to `1 + |e_t|`.
pub const IMAG_TOL: f64 = 1e-7;

/// Relative residual allowed when checking an interpolant at probe points.
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Coefficients `c₀, …, c_m` of `Σ cᵢ λⁱ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCoeffs<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> PolyCoeffs<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        PolyCoeffs { coeffs }
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        PolyCoeffs {
            coeffs: coeffs.iter().map(|&c| T::of(c)).collect(),
        }
    }

    /// Nominal degree (`len - 1`), without trimming.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn get(&self, i: usize) -> T {
        self.coeffs.get(i).copied().unwrap_or(T::zero())
    }

    /// Drops leading coefficients with magnitude at most `threshold`.
    pub fn trimmed(&self, threshold: T) -> Self {
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().is_some_and(|x| x.abs() <= threshold) {
            c.pop();
        }
        PolyCoeffs { coeffs: c }
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
    }

    /// `Σ |cᵢ| |x|ⁱ`, the natural scale for evaluation error at `x`.
    fn abs_eval(&self, x: T) -> T {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * ax + c.abs())
    }
}

/// Roots of a polynomial together with its leading coefficient.
#[derive(Clone, Debug)]
pub struct RootMultiset<T> {
    pub roots: Vec<Complex<T>>,
    pub leading: T,
}

impl<T: Scalar> RootMultiset<T> {
    /// Aberth–Ehrlich simultaneous iteration on a polynomial whose leading
    /// coefficient is nonzero (trim first).
    pub fn from_poly(p: &PolyCoeffs<T>) -> Result<Self> {
        let m = p.degree();
        let leading = p.get(m);
        if leading == T::zero() {
            return Err(Error::Domain(
                "leading coefficient is zero; trim first".into(),
            ));
        }
        if m == 0 {
            return Ok(RootMultiset {
                roots: Vec::new(),
                leading,
            });
        }
        let monic: Vec<T> = p.coeffs.iter().map(|&c| c / leading).collect();
        let bound = T::one() + monic[..m].iter().fold(T::zero(), |acc, c| acc.max(c.abs()));
        let deriv = PolyCoeffs::new(
            (1..=m)
                .map(|i| T::of_usize(i) * monic[i])
                .collect::<Vec<T>>(),
        );
        let monic = PolyCoeffs::new(monic);
        let two_pi = T::of(2.0 * std::f64::consts::PI);
        let mut z: Vec<Complex<T>> = (0..m)
            .map(|j| {
                let ang = two_pi * T::of_usize(j) / T::of_usize(m) + T::of(0.4);
                Complex::from_polar(bound * T::of(0.5), ang)
            })
            .collect();
        let tol = T::epsilon() * T::of(8.0);
        for _ in 0..1000 {
            let mut max_step = T::zero();
            for i in 0..m {
                let pz = monic.eval_complex(z[i]);
                if pz.norm() == T::zero() {
                    continue;
                }
                let ratio = pz / deriv.eval_complex(z[i]);
                let repulse: Complex<T> = (0..m)
                    .filter(|&j| j != i)
                    .map(|j| Complex::new(T::one(), T::zero()) / (z[i] - z[j]))
                    .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
                let step = ratio / (Complex::new(T::one(), T::zero()) - ratio * repulse);
                if step.re.is_finite() && step.im.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (T::one() + z[i].norm()));
                }
            }
            if max_step <= tol {
                break;
            }
        }
        Ok(RootMultiset { roots: z, leading })
    }

    /// `p_t = Σ λᵢᵗ` for `t = 1..=t_max`.
    pub fn power_sums(&self, t_max: usize) -> Vec<Complex<T>> {
        let mut acc: Vec<Complex<T>> = self.roots.clone();
        let mut out = Vec::with_capacity(t_max);
        for t in 0..t_max {
            if t > 0 {
                for (a, r) in acc.iter_mut().zip(&self.roots) {
                    *a *= r;
                }
            }
            out.push(
                acc.iter()
                    .fold(Complex::new(T::zero(), T::zero()), |s, &x| s + x),
            );
        }
        out
    }

    /// `c · Π (λ − λᵢ)` evaluated at a real point.
    pub fn eval(&self, x: T) -> Complex<T> {
        self.roots
            .iter()
            .fold(Complex::new(self.leading, T::zero()), |acc, &r| {
                acc * (Complex::new(x, T::zero()) - r)
            })
    }

    /// Roots are closed under conjugation within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let t = T::of(tol);
        self.roots.iter().all(|r| {
            self.roots
                .iter()
                .any(|s| (s.conj() - r).norm() <= t * (T::one() + r.norm()))
        })
    }
}

/// Newton's identities: `t e_t = Σ_{i=1..t} (−1)^{i−1} e_{t−i} p_i`.
///
/// `power_sums[i]` is `p_{i+1}`. Returns `e₀ = 1, e₁, …, e_{t_max}`.
pub fn elementary_symmetric<T: Scalar>(power_sums: &[Complex<T>], t_max: usize) -> Result<Vec<T>> {
    if power_sums.len() < t_max {
        return Err(Error::Domain(format!(
            "need {t_max} power sums, got {}",
            power_sums.len()
        )));
    }
    let mut e: Vec<Complex<T>> = vec![Complex::new(T::one(), T::zero())];
    for t in 1..=t_max {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 1..=t {
            let term = e[t - i] * power_sums[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / T::of_usize(t));
    }
    e.into_iter()
        .enumerate()
        .map(|(t, z)| {
            if z.im.abs() > T::of(IMAG_TOL) * (T::one() + z.re.abs()) {
                Err(Error::Conditioning(format!(
                    "e_{t} has imaginary part {} (real part {})",
                    z.im, z.re
                )))
            } else {
                Ok(z.re)
            }
        })
        .collect()
}

fn check_subset<T: Scalar>(kernel: &Kernel<T>, y: &[usize]) -> Result<()> {
    if !is_valid_set(y, kernel.n()) {
        return Err(Error::Domain(format!(
            "{y:?} is not a strictly increasing subset of [0, {})",
            kernel.n()
        )));
    }
    Ok(())
}

/// Interpolation radius `2·max|L|·n` (1 for the zero matrix).
fn radius<T: Scalar>(kernel: &Kernel<T>) -> T {
    let r = T::of(2.0) * kernel.max_abs() * T::of_usize(kernel.n());
    if r > T::zero() {
        r
    } else {
        T::one()
    }
}

fn shifted<T: Scalar>(kernel: &Kernel<T>, free: &[usize], lambda: T) -> Matrix<T> {
    let mut m = kernel.entries().clone();
    for &i in free {
        m[(i, i)] += lambda;
    }
    m
}

fn g_at<T: Scalar>(kernel: &Kernel<T>, free: &[usize], lambda: T) -> T {
    shifted(kernel, free, lambda).det()
}

/// Rounding floor for `det` of the shifted matrix: `n²·ε` times its Hadamard bound.
fn det_noise<T: Scalar>(kernel: &Kernel<T>, free: &[usize], lambda: T) -> T {
    let m = shifted(kernel, free, lambda);
    let hadamard = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| *x * *x).sum::<T>().sqrt())
        .fold(T::one(), |a, b| a * b);
    let n = T::of_usize(m.rows());
    n * n * T::epsilon() * hadamard
}

/// Coefficients of `g(λ) = det(L + λ·diag(𝟙_Ỹ))`, of nominal degree `n − |Y|`.
///
/// `g` is sampled at `n − |Y| + 1` Chebyshev nodes on `[−ρ, ρ]`,
/// `ρ = 2·max|L|·n`, and the Vandermonde system is solved in the scaled
/// variable `λ/ρ`. The interpolant is checked against `g` at three off-node
/// probes.
pub fn charpoly_coeffs<T: Scalar>(kernel: &Kernel<T>, y: &[usize]) -> Result<PolyCoeffs<T>> {
    charpoly_with_error(kernel, y).map(|(p, _)| p)
}

/// [`charpoly_coeffs`] together with a per-coefficient rounding bound:
/// `err_j = ρ^{−j} Σ_i |V⁻¹_{ji}| · noise_i`, where `noise_i` bounds the
/// error of the determinant sampled at node `i`.
pub fn charpoly_with_error<T: Scalar>(
    kernel: &Kernel<T>,
    y: &[usize],
) -> Result<(PolyCoeffs<T>, Vec<T>)> {
    check_subset(kernel, y)?;
    let free = complement(kernel.n(), y);
    let m = free.len();
    if m == 0 {
        let noise = det_noise(kernel, &free, T::zero());
        return Ok((PolyCoeffs::new(vec![kernel.entries().det()]), vec![noise]));
    }
    let rho = radius(kernel);
    let pi = std::f64::consts::PI;
    let nodes: Vec<T> = (0..=m)
        .map(|j| T::of(((2 * j + 1) as f64 * pi / (2 * (m + 1)) as f64).cos()))
        .collect();
    let vander = Matrix::from_fn(m + 1, m + 1, |j, i| nodes[j].powi(i as i32));
    let values: Vec<T> = nodes
        .iter()
        .map(|&u| g_at(kernel, &free, u * rho))
        .collect();
    let noise: Vec<T> = nodes
        .iter()
        .map(|&u| det_noise(kernel, &free, u * rho))
        .collect();
    let lu = vander.lu();
    let scaled = lu
        .solve_vec(&values)
        .ok_or_else(|| Error::Conditioning("singular interpolation system".into()))?;
    let vinv = lu
        .inverse()
        .ok_or_else(|| Error::Conditioning("singular interpolation system".into()))?;
    let coeffs: Vec<T> = scaled
        .iter()
        .enumerate()
        .map(|(i, &a)| a / rho.powi(i as i32))
        .collect();
    let errors: Vec<T> = (0..=m)
        .map(|j| {
            let e: T = (0..=m).map(|i| vinv[(j, i)].abs() * noise[i]).sum();
            e / rho.powi(j as i32)
        })
        .collect();
    let poly = PolyCoeffs::new(coeffs);

    for probe in [0.37, -0.61, 0.83] {
        let x = T::of(probe) * rho;
        let want = g_at(kernel, &free, x);
        let got = poly.eval(x);
        let scale = poly.abs_eval(x).max(want.abs());
        let floor = det_noise(kernel, &free, x).max(det_noise(kernel, &free, rho));
        if (got - want).abs() > T::of(RESIDUAL_TOL) * scale + floor {
            return Err(Error::Conditioning(format!(
                "interpolant residual {} at λ = {x} exceeds tolerance",
                (got - want).abs()
            )));
        }
    }
    Ok((poly, errors))
}

fn check_sizes(n: usize, y: &[usize], k: usize) -> Result<()> {
    if y.len() > k || k > n {
        return Err(Error::Domain(format!(
            "need |Y| <= k <= n, got |Y| = {}, k = {k}, n = {n}",
            y.len()
        )));
    }
    Ok(())
}

/// `Σ_{S ⊇ Y, |S| = k} det(L_S)`: the coefficient of `λ^{n−k}` in `g`.
///
/// A coefficient within its rounding bound of zero is returned as 0.
pub fn superset_marginal<T: Scalar>(kernel: &Kernel<T>, y: &[usize], k: usize) -> Result<T> {
    check_sizes(kernel.n(), y, k)?;
    let (poly, err) = charpoly_with_error(kernel, y)?;
    let j = kernel.n() - k;
    let v = poly.get(j);
    Ok(if v.abs() <= err[j] { T::zero() } else { v })
}

/// Same quantity as [`superset_marginal`], through the roots of `g`:
/// `g = c Π (λ − λᵢ)`, power sums of the roots, Newton's identities, and the
/// coefficient `c (−1)^j e_j` with `j = deg g − (n − k)`.
pub fn superset_marginal_roots<T: Scalar>(kernel: &Kernel<T>, y: &[usize], k: usize) -> Result<T> {
    check_sizes(kernel.n(), y, k)?;
    let poly = charpoly_coeffs(kernel, y)?;
    let lead_tol = kernel.zero_threshold(y.len());
    let poly = poly.trimmed(lead_tol);
    let deg = poly.degree();
    let target = kernel.n() - k;
    if target > deg {
        return Ok(T::zero());
    }
    let j = deg - target;
    let roots = RootMultiset::from_poly(&poly)?;
    let e = elementary_symmetric(&roots.power_sums(j), j)?;
    let sign = if j.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    };
    Ok(roots.leading * sign * e[j])
}

/// The `d×d` matrix `F_Y = (C − C D_Y C) B_Ỹᵀ B_Ỹ` with `D_Y = B_Yᵀ L_Y⁻¹ B_Y`,
/// and `det(L_Y)`. `None` when `L_Y` is numerically singular.
pub fn lowrank_reduced<T: Scalar>(
    kernel: &Kernel<T>,
    y: &[usize],
) -> Result<Option<(Matrix<T>, T)>> {
    check_subset(kernel, y)?;
    let lr = kernel
        .lowrank()
        .ok_or_else(|| Error::Precondition("kernel has no low-rank factors".into()))?;
    let rest = complement(kernel.n(), y);
    let b_rest = lr.b.select_rows(&rest);
    let gram = b_rest.transpose().matmul(&b_rest);
    if y.is_empty() {
        return Ok(Some((lr.c.matmul(&gram), T::one())));
    }
    let b_y = lr.b.select_rows(y);
    let l_y = b_y.matmul(&lr.c).matmul(&b_y.transpose());
    let lu = l_y.lu();
    let det_y = lu.det();
    if kernel.snap(det_y, y.len()) == T::zero() {
        return Ok(None);
    }
    let Some(inv) = lu.inverse() else {
        return Ok(None);
    };
    let d_y = b_y.transpose().matmul(&inv).matmul(&b_y);
    let inner = lr.c.sub(&lr.c.matmul(&d_y).matmul(&lr.c));
    Ok(Some((inner.matmul(&gram), det_y)))
}

/// Low-rank superset marginal: `det(L_Y) · e_{k−|Y|}(spec F_Y)`.
///
/// The power sums of the spectrum of `F_Y` are taken as `tr(F_Yᵗ)`. Falls back
/// to [`superset_marginal`] when `L_Y` is singular.
pub fn lowrank_marginal<T: Scalar>(kernel: &Kernel<T>, y: &[usize], k: usize) -> Result<T> {
    check_sizes(kernel.n(), y, k)?;
    let Some((f, det_y)) = lowrank_reduced(kernel, y)? else {
        return superset_marginal(kernel, y, k);
    };
    let j = k - y.len();
    if j == 0 {
        return Ok(det_y);
    }
    if j > f.rows() {
        return Ok(T::zero());
    }
    let mut power = f.clone();
    let mut sums = Vec::with_capacity(j);
    for t in 0..j {
        if t > 0 {
            power = power.matmul(&f);
        }
        sums.push(Complex::new(power.trace(), T::zero()));
    }
    let e = elementary_symmetric(&sums, j)?;
    Ok(det_y * e[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::{combinations, union_sorted};
    use crate::instances;
    use proptest::prelude::*;

    fn brute(kernel: &Kernel<f64>, y: &[usize], k: usize) -> f64 {
        let rest = complement(kernel.n(), y);
        combinations(&rest, k - y.len())
            .map(|extra| kernel.principal_minor(&union_sorted(y, &extra)).unwrap())
            .sum()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-10
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn newton_examples() {
        // roots {1, 2, 3}
        let p = [c(6.0, 0.0), c(14.0, 0.0), c(36.0, 0.0)];
        let e = elementary_symmetric(&p, 3).unwrap();
        assert_eq!(e, vec![1.0, 6.0, 11.0, 6.0]);
        let e = elementary_symmetric(&[c(0.0, 0.0); 4], 4).unwrap();
        assert_eq!(e, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        // roots {i, -i}
        let e = elementary_symmetric(&[c(0.0, 0.0), c(-2.0, 0.0)], 2).unwrap();
        assert_eq!(e, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn newton_rejects_complex_residue() {
        let p = [c(1.0, 1.0)];
        assert!(matches!(
            elementary_symmetric(&p, 1),
            Err(Error::Conditioning(_))
        ));
    }

    #[test]
    fn identity_charpoly_is_binomial() {
        let k = Kernel::<f64>::new(Matrix::identity(5)).unwrap();
        let p = charpoly_coeffs(&k, &[]).unwrap();
        for (i, want) in [1.0, 5.0, 10.0, 10.0, 5.0, 1.0].iter().enumerate() {
            assert!(close(p.coeffs[i], *want, 1e-10), "c{i} = {}", p.coeffs[i]);
        }
    }

    #[test]
    fn diagonal_charpoly() {
        let k = Kernel::<f64>::from_f64_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let p = charpoly_coeffs(&k, &[0]).unwrap();
        assert_eq!(p.coeffs.len(), 2);
        assert!(close(p.coeffs[0], 6.0, 1e-12) && close(p.coeffs[1], 2.0, 1e-12));
    }

    #[test]
    fn seeded_charpoly_coefficients_match_enumeration() {
        let kern: Kernel<f64> = instances::random_npsd(5, 1.0, 21);
        let p = charpoly_coeffs(&kern, &[2]).unwrap();
        for k in 1..=5 {
            assert!(close(p.get(5 - k), brute(&kern, &[2], k), 1e-9), "k = {k}");
        }
    }

    #[test]
    fn marginal_examples() {
        let id = Kernel::<f64>::new(Matrix::identity(3)).unwrap();
        assert!(close(superset_marginal(&id, &[], 1).unwrap(), 3.0, 1e-12));
        let kern: Kernel<f64> = instances::random_npsd(6, 1.0, 8);
        let full = superset_marginal(&kern, &[], 6).unwrap();
        assert!(close(full, kern.entries().det(), 1e-9));
        let m = superset_marginal(&kern, &[0, 3], 3).unwrap();
        assert!(close(m, brute(&kern, &[0, 3], 3), 1e-9));
        assert!(superset_marginal(&kern, &[0, 1, 2], 2).is_err());
    }

    #[test]
    fn roots_route_agrees() {
        let kern: Kernel<f64> = instances::random_npsd(6, 1.0, 13);
        for (y, k) in [(vec![], 2), (vec![1], 3), (vec![0, 4], 4)] {
            let a = superset_marginal_roots(&kern, &y, k).unwrap();
            assert!(close(a, brute(&kern, &y, k), 1e-7), "{y:?} {k}: {a}");
        }
    }

    #[test]
    fn root_multiset_reconstructs_polynomial() {
        let kern: Kernel<f64> = instances::random_npsd(5, 2.0, 4);
        let p = charpoly_coeffs(&kern, &[]).unwrap();
        let roots = RootMultiset::from_poly(&p).unwrap();
        assert!(roots.is_conjugate_closed(1e-7));
        for x in [-1.3, 0.2, 2.7] {
            let want = p.eval(x);
            let got = roots.eval(x);
            assert!((got.re - want).abs() <= 1e-6 * want.abs().max(1.0));
            assert!(got.im.abs() <= 1e-6 * want.abs().max(1.0));
        }
    }

    #[test]
    fn lowrank_examples() {
        let n = 5;
        let ones = Matrix::<f64>::from_fn(n, 1, |_, _| 1.0);
        let kern = Kernel::from_lowrank(ones, Matrix::identity(1)).unwrap();
        assert!(close(lowrank_marginal(&kern, &[], 1).unwrap(), 5.0, 1e-12));
        assert_eq!(lowrank_marginal(&kern, &[], 2).unwrap(), 0.0);

        let kern: Kernel<f64> = instances::lowrank_npsd(8, 3, 1);
        let a = lowrank_marginal(&kern, &[1], 3).unwrap();
        let b = superset_marginal(&kern, &[1], 3).unwrap();
        assert!(close(a, b, 1e-6));
        assert!(close(a, brute(&kern, &[1], 3), 1e-8));
    }

    #[test]
    fn lowrank_requires_factors() {
        let kern = Kernel::<f64>::new(Matrix::identity(3)).unwrap();
        assert!(matches!(
            lowrank_marginal(&kern, &[], 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lowrank_singular_conditioning_falls_back() {
        // |Y| = 3 > d = 2 makes L_Y singular.
        let kern: Kernel<f64> = instances::lowrank_npsd(6, 2, 3);
        assert!(lowrank_reduced(&kern, &[0, 1, 2]).unwrap().is_none());
        assert!(lowrank_marginal(&kern, &[0, 1, 2], 3).unwrap().abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn newton_round_trip_reproduces_vieta(roots in proptest::collection::vec(-3.0f64..3.0, 1..7)) {
            let m = roots.len();
            let sums: Vec<Complex<f64>> = (1..=m)
                .map(|t| c(roots.iter().map(|r| r.powi(t as i32)).sum(), 0.0))
                .collect();
            let e = elementary_symmetric(&sums, m).unwrap();
            // Vieta by expanding Π (z + rᵢ): coefficient of z^{m−t} is e_t.
            let mut poly = vec![1.0];
            for r in &roots {
                let mut next = vec![0.0; poly.len() + 1];
                for (i, &a) in poly.iter().enumerate() {
                    next[i] += a * r;
                    next[i + 1] += a;
                }
                poly = next;
            }
            let scale: f64 = roots.iter().map(|r| 1.0 + r.abs()).product();
            for t in 0..=m {
                let vieta = poly[m - t];
                prop_assert!((e[t] - vieta).abs() <= 1e-9 * scale, "t={} {} vs {}", t, e[t], vieta);
            }
        }
    }
}

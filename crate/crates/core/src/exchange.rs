//! Exchange inequalities checked by enumeration, plus the Hurwitz-matrix
//! facts behind the two-step exchange bound for nonsymmetric DPPs.
//!
//! For equal-size sets `S, T`, an `i`-exchange is a set `U ⊆ S Δ T` with
//! `|U ∩ S| = |U ∩ T| = i`; `S Δ U` is `S` with `i` elements swapped toward `T`.

use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::PolyCoeffs;
use crate::combin::{
    binomial, combinations, difference, distance, intersection, k_subsets, sym_diff, union_sorted,
};
use crate::distribution::{SetDistribution, ENUMERATION_LIMIT};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{leq_rel, Scalar};

/// Relative slack used when testing exchange inequalities.
pub const EXCHANGE_REL_TOL: f64 = 1e-9;

/// Exact `argmax μ` over all `k`-subsets; lexicographically first on ties.
pub fn brute_force_map<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
) -> Result<(Vec<usize>, T)> {
    let (n, k) = (mu.ground_size(), mu.k());
    let needed = binomial(n, k);
    if needed > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "brute-force MAP",
            needed,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut best: Option<(Vec<usize>, T)> = None;
    for s in k_subsets(n, k) {
        let v = mu.mass(&s);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((s, v));
        }
    }
    best.ok_or_else(|| Error::Domain("empty state space".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeVariant {
    Weak,
    PairExchange,
    StrongBasis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Applied to `S`.
    SToT,
    /// Applied to `T`.
    TToS,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Exchange size `s = |U ∩ S| = |U ∩ T|`.
    pub size: usize,
    pub exchange: Vec<usize>,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExchangeReport<T> {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
    pub variant: ExchangeVariant,
    pub distance: usize,
    /// `d(S, T) = 0`: nothing to exchange.
    pub vacuous: bool,
    #[serde(rename = "witness")]
    pub witnesses: Vec<Witness>,
    /// Smallest `β` for which the inequality holds (`∞` when none does).
    pub measured_beta: T,
    pub passed: bool,
}

impl<T: Scalar> ExchangeReport<T> {
    fn vacuous(s: &[usize], t: &[usize], variant: ExchangeVariant) -> Self {
        ExchangeReport {
            s: s.to_vec(),
            t: t.to_vec(),
            variant,
            distance: 0,
            vacuous: true,
            witnesses: Vec::new(),
            measured_beta: T::one(),
            passed: true,
        }
    }
}

/// All `i`-exchanges between `S` and `T`.
pub fn exchanges(s: &[usize], t: &[usize], i: usize) -> Vec<Vec<usize>> {
    let only_s = difference(s, t);
    let only_t = difference(t, s);
    let mut out = Vec::new();
    for a in combinations(&only_s, i) {
        for b in combinations(&only_t, i) {
            out.push(union_sorted(&a, &b));
        }
    }
    out
}

/// `M^i(from → to) = max_{U ∈ E^i} μ(from Δ U)` with its argmax; `(0, None)` when `E^i` is empty.
fn best_exchange<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    from: &[usize],
    to: &[usize],
    i: usize,
) -> (T, Option<Vec<usize>>) {
    let mut best = (T::zero(), None);
    for u in exchanges(from, to, i) {
        let v = mu.mass(&sym_diff(from, &u));
        if best.1.is_none() || v > best.0 {
            best = (v, Some(u));
        }
    }
    best
}

/// `(num / den)^{1/p}` with `0/0 = 0` and `x/0 = ∞`.
fn root_ratio<T: Scalar>(num: T, den: T, p: usize) -> T {
    if num <= T::zero() {
        T::zero()
    } else if den <= T::zero() {
        T::infinity()
    } else {
        (num / den).powf(T::one() / T::of_usize(p))
    }
}

fn check_sets(s: &[usize], t: &[usize]) -> Result<()> {
    if s.len() != t.len() {
        return Err(Error::Domain(format!(
            "sets differ in size: {} vs {}",
            s.len(),
            t.len()
        )));
    }
    Ok(())
}

/// `(r, β)`-approximate exchange for one pair:
/// `μ(S)μ(T) <= max_{i<=r} β^i M^i(S→T) M^i(T→S)`.
///
/// `measured_beta = min_i (μ(S)μ(T) / (M^i(S→T) M^i(T→S)))^{1/i}`; `passed`
/// tests the inequality at `β = k⁴`.
pub fn check_pair_exchange<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    s: &[usize],
    t: &[usize],
    r: usize,
) -> Result<ExchangeReport<T>> {
    check_sets(s, t)?;
    let d = distance(s, t);
    if d == 0 {
        return Ok(ExchangeReport::vacuous(s, t, ExchangeVariant::PairExchange));
    }
    let k = s.len();
    let beta0 = T::of_usize(k).powi(4);
    let prod = mu.mass(s) * mu.mass(t);
    let mut measured = T::infinity();
    let mut rhs_max = T::zero();
    let mut witnesses = Vec::new();
    for i in 1..=r.min(d) {
        let (m_st, u_st) = best_exchange(mu, s, t, i);
        let (m_ts, u_ts) = best_exchange(mu, t, s, i);
        let rhs = m_st * m_ts;
        measured = measured.min(root_ratio(prod, rhs, i));
        rhs_max = rhs_max.max(beta0.powi(i as i32) * rhs);
        for (u, dir) in [(u_st, Direction::SToT), (u_ts, Direction::TToS)] {
            if let Some(u) = u {
                witnesses.push(Witness {
                    size: i,
                    exchange: u,
                    direction: dir,
                });
            }
        }
    }
    Ok(ExchangeReport {
        s: s.to_vec(),
        t: t.to_vec(),
        variant: ExchangeVariant::PairExchange,
        distance: d,
        vacuous: false,
        witnesses,
        measured_beta: measured,
        passed: leq_rel(prod, rhs_max, EXCHANGE_REL_TOL),
    })
}

/// `μ(S)μ(T) <= max_{i∈{1,2}} (Σ_{E^i} μ(S Δ U))(Σ_{E^i} μ(T Δ U))`.
pub fn summed_exchange_holds<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    s: &[usize],
    t: &[usize],
) -> bool {
    let d = distance(s, t);
    if d == 0 {
        return true;
    }
    let prod = mu.mass(s) * mu.mass(t);
    let rhs = (1..=2.min(d))
        .map(|i| {
            let us = exchanges(s, t, i);
            let a: T = us.iter().map(|u| mu.mass(&sym_diff(s, u))).sum();
            let b: T = us.iter().map(|u| mu.mass(&sym_diff(t, u))).sum();
            a * b
        })
        .fold(T::zero(), T::max);
    leq_rel(prod, rhs, EXCHANGE_REL_TOL)
}

/// Weak `(r, β)` exchange: the smallest `β` with
/// `μ(S) <= β μ(S Δ U) (μ(S)/μ(T))^{s/d(S,T)}` over `s <= r`, `U ∈ E^s`.
///
/// `passed` only records that some finite `β` works.
pub fn check_weak_exchange<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    s: &[usize],
    t: &[usize],
    r: usize,
) -> Result<ExchangeReport<T>> {
    check_sets(s, t)?;
    let d = distance(s, t);
    if d == 0 {
        return Err(Error::Precondition(
            "weak exchange needs d(S, T) >= 1".into(),
        ));
    }
    let mu_s = mu.mass(s);
    let mu_t = mu.mass(t);
    if mu_t <= T::zero() {
        return Err(Error::UndefinedRatio(format!("μ(T) = 0 at T = {t:?}")));
    }
    let ratio = mu_s / mu_t;
    let mut best = (T::infinity(), None::<Witness>);
    for size in 1..=r.min(d) {
        let damp = ratio.powf(T::of_usize(size) / T::of_usize(d));
        for u in exchanges(s, t, size) {
            let beta = if mu_s <= T::zero() {
                T::zero()
            } else {
                let den = mu.mass(&sym_diff(s, &u)) * damp;
                if den <= T::zero() {
                    T::infinity()
                } else {
                    mu_s / den
                }
            };
            if best.1.is_none() || beta < best.0 {
                best = (
                    beta,
                    Some(Witness {
                        size,
                        exchange: u,
                        direction: Direction::SToT,
                    }),
                );
            }
        }
    }
    Ok(ExchangeReport {
        s: s.to_vec(),
        t: t.to_vec(),
        variant: ExchangeVariant::Weak,
        distance: d,
        vacuous: false,
        witnesses: best.1.into_iter().collect(),
        measured_beta: best.0,
        passed: best.0.is_finite(),
    })
}

/// Strong basis exchange: for every `j ∈ T \ S` some `i ∈ S \ T` with
/// `μ(S)μ(T) <= β μ(S − i + j) μ(T + i − j)`.
///
/// `measured_beta = max_j min_i μ(S)μ(T) / (μ(S−i+j) μ(T+i−j))`.
pub fn check_strong_basis_exchange<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    s: &[usize],
    t: &[usize],
) -> Result<ExchangeReport<T>> {
    check_sets(s, t)?;
    let d = distance(s, t);
    if d == 0 {
        return Ok(ExchangeReport::vacuous(s, t, ExchangeVariant::StrongBasis));
    }
    let prod = mu.mass(s) * mu.mass(t);
    let only_s = difference(s, t);
    let only_t = difference(t, s);
    let mut measured = T::zero();
    let mut witnesses = Vec::with_capacity(only_t.len());
    for &j in &only_t {
        let mut best = (T::infinity(), only_s[0]);
        for &i in &only_s {
            let s2 = sym_diff(s, &[i, j]);
            let t2 = sym_diff(t, &[i, j]);
            let beta = root_ratio(prod, mu.mass(&s2) * mu.mass(&t2), 1);
            if beta < best.0 {
                best = (beta, i);
            }
        }
        measured = measured.max(best.0);
        witnesses.push(Witness {
            size: 1,
            exchange: union_sorted(&[best.1], &[j]),
            direction: Direction::SToT,
        });
    }
    Ok(ExchangeReport {
        s: s.to_vec(),
        t: t.to_vec(),
        variant: ExchangeVariant::StrongBasis,
        distance: d,
        vacuous: false,
        witnesses,
        measured_beta: measured,
        passed: measured.is_finite(),
    })
}

/// Coefficients `b₀, …, b_{2t}` of `z^t f(z, …, z, z⁻¹, …, z⁻¹)` restricted to
/// `S ∩ T ⊆ W ⊆ S ∪ T`: `b_{2i} = Σ_{|W ∩ (S\T)| = i} μ(W)`, odd terms zero.
///
/// `b_{2t} = μ(S)` and `b₀ = μ(T)`.
pub fn exchange_polynomial<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    s: &[usize],
    t: &[usize],
) -> Result<PolyCoeffs<T>> {
    check_sets(s, t)?;
    let common = intersection(s, t);
    let only_s = difference(s, t);
    let only_t = difference(t, s);
    let d = only_s.len();
    let mut b = vec![T::zero(); 2 * d + 1];
    for i in 0..=d {
        let mut acc = T::zero();
        for a in combinations(&only_s, i) {
            for bb in combinations(&only_t, d - i) {
                let w = union_sorted(&union_sorted(&common, &a), &bb);
                acc += mu.mass(&w);
            }
        }
        b[2 * i] = acc;
    }
    Ok(PolyCoeffs::new(b))
}

fn check_nonnegative<T: Scalar>(coeffs: &PolyCoeffs<T>) -> Result<()> {
    if let Some((i, c)) = coeffs
        .coeffs
        .iter()
        .enumerate()
        .find(|(_, c)| **c < T::zero())
    {
        return Err(Error::Domain(format!(
            "coefficient a_{i} = {c} is negative"
        )));
    }
    Ok(())
}

/// `a_n a₀ <= max{a₁ a_{n−1}, a₂ a_{n−2}}` (trivially true for `n <= 2`).
///
/// With `even_only`, the input is read as `Σ a_{2i} z^{2i}` and the test is
/// `a₀ a_{2t} <= max{a₂ a_{2t−2}, a₄ a_{2t−4}}`.
pub fn hurwitz_coeff_check<T: Scalar>(coeffs: &PolyCoeffs<T>, even_only: bool) -> Result<bool> {
    check_nonnegative(coeffs)?;
    let a: Vec<T> = if even_only {
        coeffs.coeffs.iter().step_by(2).copied().collect()
    } else {
        coeffs.coeffs.clone()
    };
    let n = a.len().saturating_sub(1);
    if n <= 2 {
        return Ok(true);
    }
    let lhs = a[n] * a[0];
    let rhs = (a[1] * a[n - 1]).max(a[2] * a[n - 2]);
    Ok(leq_rel(lhs, rhs, EXCHANGE_REL_TOL))
}

/// Hurwitz matrix `H ∈ R^{n×n}`, `h_{ij} = a_{2j−i}` (1-based) when
/// `0 <= 2j − i <= n`, else 0.
pub fn hurwitz_matrix<T: Scalar>(coeffs: &PolyCoeffs<T>) -> Result<Matrix<T>> {
    check_nonnegative(coeffs)?;
    let n = coeffs.degree();
    Ok(Matrix::from_fn(n, n, |i0, j0| {
        let idx = 2 * (j0 as isize + 1) - (i0 as isize + 1);
        if idx >= 0 && idx as usize <= n {
            coeffs.get(idx as usize)
        } else {
            T::zero()
        }
    }))
}

/// Smallest 2×2 minor of `h` (`+∞` when there are none).
pub fn min_2x2_minor<T: Scalar>(h: &Matrix<T>) -> T {
    let mut best = T::infinity();
    for r in combinations(&(0..h.rows()).collect::<Vec<_>>(), 2) {
        for c in combinations(&(0..h.cols()).collect::<Vec<_>>(), 2) {
            let m = h[(r[0], c[0])] * h[(r[1], c[1])] - h[(r[0], c[1])] * h[(r[1], c[0])];
            best = best.min(m);
        }
    }
    best
}

/// Totals of an all-pairs exchange sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExchangeSummary {
    pub pairs: usize,
    /// `(2, k⁴)` exchange failures.
    pub failures: usize,
    /// Failures of the summed form.
    pub summed_failures: usize,
    /// Failures of the even-coefficient Hurwitz inequality.
    pub hurwitz_failures: usize,
    /// Largest finite measured `β`.
    pub max_beta: f64,
    /// `max_beta / k⁴`.
    pub max_beta_over_bound: f64,
    pub first_failure: Option<(Vec<usize>, Vec<usize>)>,
}

/// Checks every ordered pair `(S, T)` of `k`-subsets at radius 2.
pub fn verify_all_pairs<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
) -> Result<ExchangeSummary> {
    let (n, k) = (mu.ground_size(), mu.k());
    let needed = binomial(n, k).pow(2);
    if needed > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "all-pairs exchange check",
            needed,
            limit: ENUMERATION_LIMIT,
        });
    }
    let sets = k_subsets(n, k);
    let bound = (k as f64).powi(4);
    let rows: Vec<ExchangeSummary> = sets
        .par_iter()
        .map(|s| {
            let mut acc = ExchangeSummary::default();
            for t in &sets {
                acc.pairs += 1;
                let rep = check_pair_exchange(mu, s, t, 2).expect("equal sizes");
                let mut failed = false;
                if !rep.passed {
                    acc.failures += 1;
                    failed = true;
                }
                if rep.measured_beta.is_finite() {
                    acc.max_beta = acc.max_beta.max(rep.measured_beta.as_f64());
                }
                if !summed_exchange_holds(mu, s, t) {
                    acc.summed_failures += 1;
                    failed = true;
                }
                let poly = exchange_polynomial(mu, s, t).expect("equal sizes");
                if !hurwitz_coeff_check(&poly, true).unwrap_or(false) {
                    acc.hurwitz_failures += 1;
                    failed = true;
                }
                if failed && acc.first_failure.is_none() {
                    acc.first_failure = Some((s.clone(), t.clone()));
                }
            }
            acc.max_beta_over_bound = acc.max_beta / bound;
            acc
        })
        .collect();
    Ok(rows
        .into_iter()
        .fold(ExchangeSummary::default(), |mut a, b| {
            a.pairs += b.pairs;
            a.failures += b.failures;
            a.summed_failures += b.summed_failures;
            a.hurwitz_failures += b.hurwitz_failures;
            a.max_beta = a.max_beta.max(b.max_beta);
            a.max_beta_over_bound = a.max_beta_over_bound.max(b.max_beta_over_bound);
            if a.first_failure.is_none() {
                a.first_failure = b.first_failure;
            }
            a
        }))
}

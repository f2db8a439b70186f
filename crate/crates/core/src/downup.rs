//! The k↔ℓ down-up walk on supported `k`-sets, external fields, and the
//! spectral quantities used to certify mixing at desk scale.
//!
//! One step drops to a uniform `ℓ`-subset `R ⊆ S`, then moves to a superset
//! `S' ⊇ R` with probability `∝ μ(S')`. The walk is reversible with respect
//! to `μ` and its transition matrix has nonnegative spectrum.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::combin::{binomial, combinations, complement, is_valid_set, k_subsets, union_sorted};
use crate::distribution::SetDistribution;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::scalar::Scalar;

/// Largest number of `k`-sets a chain may enumerate.
pub const STATE_LIMIT: u128 = 20_000;

/// Largest chain on which conductance is minimized over every cut.
pub const EXACT_CONDUCTANCE_LIMIT: usize = 22;

pub const ROW_SUM_TOL: f64 = 1e-12;
pub const REVERSIBILITY_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-9;
pub const STATIONARY_TOL: f64 = 1e-10;

/// Per-element field `λ ∈ [0, ∞]^n`: 0 deletes an element, `∞` forces it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldVector<T> {
    pub lambda: Vec<T>,
}

impl<T: Scalar> FieldVector<T> {
    pub fn new(lambda: Vec<T>) -> Result<Self> {
        if let Some((i, l)) = lambda
            .iter()
            .enumerate()
            .find(|(_, l)| l.is_nan() || **l < T::zero())
        {
            return Err(Error::Domain(format!(
                "field entry λ_{i} = {l} is not in [0, ∞]"
            )));
        }
        Ok(FieldVector { lambda })
    }

    pub fn ones(n: usize) -> Self {
        FieldVector {
            lambda: vec![T::one(); n],
        }
    }

    /// Log-uniform entries in `[e^{-spread}, e^{spread}]`.
    pub fn random(n: usize, spread: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FieldVector {
            lambda: (0..n)
                .map(|_| T::of(rng.random_range(-spread..=spread).exp()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }
}

/// `λ ∗ μ`: `S ↦ μ(S) Π_{i∈S} λ_i`, with `∞` entries realized by conditioning.
pub struct Fielded<'a, T, D: ?Sized> {
    inner: &'a D,
    lambda: Vec<T>,
}

impl<T: Scalar, D: SetDistribution<T> + ?Sized> SetDistribution<T> for Fielded<'_, T, D> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn k(&self) -> usize {
        self.inner.k()
    }

    fn mass(&self, set: &[usize]) -> T {
        let mut w = T::one();
        let mut hit = 0usize;
        for &i in set {
            let l = self.lambda[i];
            if l == T::zero() {
                return T::zero();
            }
            if l.is_infinite() {
                hit += 1;
            } else {
                w *= l;
            }
        }
        let forced = self.lambda.iter().filter(|l| l.is_infinite()).count();
        if hit < forced {
            return T::zero();
        }
        w * self.inner.mass(set)
    }
}

/// Applies `λ` to `μ`. Fails when no `k`-set can keep positive mass.
pub fn apply_field<'a, T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &'a D,
    lambda: &FieldVector<T>,
) -> Result<Fielded<'a, T, D>> {
    let (n, k) = (mu.ground_size(), mu.k());
    if lambda.len() != n {
        return Err(Error::Domain(format!(
            "field has {} entries for a ground set of size {n}",
            lambda.len()
        )));
    }
    let forced = lambda.lambda.iter().filter(|l| l.is_infinite()).count();
    let alive = lambda.lambda.iter().filter(|l| **l > T::zero()).count();
    if forced > k || alive < k {
        return Err(Error::Infeasible(format!(
            "field forces {forced} and keeps {alive} elements with k = {k}"
        )));
    }
    Ok(Fielded {
        inner: mu,
        lambda: lambda.lambda.clone(),
    })
}

/// Transition matrix of a chain on enumerated states, with its stationary density.
#[derive(Clone, Debug)]
pub struct ChainMatrix<T> {
    pub states: Vec<Vec<usize>>,
    pub p: Matrix<T>,
    pub pi: Vec<T>,
}

impl<T: Scalar> ChainMatrix<T> {
    /// `pi` is normalized here.
    pub fn from_parts(states: Vec<Vec<usize>>, p: Matrix<T>, pi: Vec<T>) -> Result<Self> {
        if !p.is_square() || p.rows() != states.len() || pi.len() != states.len() {
            return Err(Error::Domain("chain dimensions disagree".into()));
        }
        let z: T = pi.iter().copied().sum();
        if z <= T::zero() {
            return Err(Error::Domain("stationary density has no mass".into()));
        }
        let pi = pi.into_iter().map(|x| x / z).collect();
        Ok(ChainMatrix { states, p, pi })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, set: &[usize]) -> Option<usize> {
        self.states.iter().position(|s| s == set)
    }

    /// Checks the structural invariants of a reversible, positive-spectrum chain.
    pub fn validate(&self) -> ChainValidity {
        let m = self.len();
        let p = &self.p;
        let row_sum_err = (0..m)
            .map(|i| {
                (p.row(i).iter().copied().sum::<T>() - T::one())
                    .abs()
                    .as_f64()
            })
            .fold(0.0, f64::max);
        let mut reversibility_err: f64 = 0.0;
        for i in 0..m {
            for j in 0..i {
                let a = self.pi[i] * p[(i, j)];
                let b = self.pi[j] * p[(j, i)];
                reversibility_err = reversibility_err.max((a - b).abs().as_f64());
            }
        }
        let stationary_err = (0..m)
            .map(|j| {
                let v: T = (0..m).map(|i| self.pi[i] * p[(i, j)]).sum();
                (v - self.pi[j]).abs().as_f64()
            })
            .fold(0.0, f64::max);
        let min_eigenvalue = self.eigenvalues().last().map_or(1.0, |v| v.as_f64());
        ChainValidity {
            row_sum_err,
            reversibility_err,
            stationary_err,
            min_eigenvalue,
            ok: row_sum_err <= ROW_SUM_TOL
                && reversibility_err <= REVERSIBILITY_TOL
                && stationary_err <= STATIONARY_TOL
                && min_eigenvalue >= -EIGEN_TOL,
        }
    }

    /// Eigenvalues of `P`, descending, via the symmetrization
    /// `A_{xy} = sqrt(π_x/π_y) P_{xy}` (similar to `P` when reversible).
    pub fn eigenvalues(&self) -> Vec<T> {
        let m = self.len();
        let sq: Vec<T> = self.pi.iter().map(|x| x.sqrt()).collect();
        let a = Matrix::from_fn(m, m, |i, j| {
            let aij = sq[i] * self.p[(i, j)] / sq[j];
            let aji = sq[j] * self.p[(j, i)] / sq[i];
            (aij + aji) * T::of(0.5)
        });
        symmetric_eigenvalues(&a)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainValidity {
    pub row_sum_err: f64,
    pub reversibility_err: f64,
    pub stationary_err: f64,
    pub min_eigenvalue: f64,
    pub ok: bool,
}

/// `P = D_{k→ℓ} U_{ℓ→k}` on the `k`-sets of positive mass.
pub fn build_downup<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    l: usize,
) -> Result<ChainMatrix<T>> {
    let (n, k) = (mu.ground_size(), mu.k());
    if l > k {
        return Err(Error::Domain(format!("ℓ = {l} exceeds k = {k}")));
    }
    let needed = binomial(n, k);
    if needed > STATE_LIMIT {
        return Err(Error::Capacity {
            what: "down-up chain states",
            needed,
            limit: STATE_LIMIT,
        });
    }
    let (states, masses): (Vec<Vec<usize>>, Vec<T>) = k_subsets(n, k)
        .into_par_iter()
        .map(|s| {
            let m = mu.mass(&s);
            (s, m)
        })
        .filter(|(_, m)| *m > T::zero())
        .unzip();
    if states.is_empty() {
        return Err(Error::Infeasible("density has empty support".into()));
    }
    // ℓ-set → supported supersets; Z_R is their total mass.
    let mut uppers: HashMap<Vec<usize>, (T, Vec<usize>)> = HashMap::new();
    for (idx, s) in states.iter().enumerate() {
        for r in combinations(s, l) {
            let e = uppers.entry(r).or_insert((T::zero(), Vec::new()));
            e.0 += masses[idx];
            e.1.push(idx);
        }
    }
    let down = T::one() / T::of(binomial(k, l) as f64);
    let m = states.len();
    let rows: Vec<Vec<T>> = states
        .par_iter()
        .map(|s| {
            let mut row = vec![T::zero(); m];
            for r in combinations(s, l) {
                let (z, ups) = &uppers[&r];
                for &j in ups {
                    row[j] += down * masses[j] / *z;
                }
            }
            row
        })
        .collect();
    let p = Matrix::from_fn(m, m, |i, j| rows[i][j]);
    ChainMatrix::from_parts(states, p, masses)
}

/// `1 − λ₂`; a single-state chain has gap 1.
pub fn spectral_gap<T: Scalar>(chain: &ChainMatrix<T>) -> T {
    let ev = chain.eigenvalues();
    match ev.get(1) {
        Some(&l2) => T::one() - l2,
        None => T::one(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Conductance {
    pub lower: f64,
    pub upper: f64,
    /// `lower == upper` is the exact bottleneck ratio.
    pub exact: bool,
}

impl Conductance {
    pub fn value(&self) -> Option<f64> {
        self.exact.then_some(self.lower)
    }
}

/// `Φ = min_{π(A) <= 1/2} Q(A, Aᶜ)/π(A)`. Exact for at most
/// [`EXACT_CONDUCTANCE_LIMIT`] states (Gray-code sweep over every cut);
/// otherwise the interval `[gap/2, sqrt(2 gap)]` from the Cheeger inequality.
pub fn conductance<T: Scalar>(chain: &ChainMatrix<T>) -> Conductance {
    let m = chain.len();
    if m > EXACT_CONDUCTANCE_LIMIT {
        let gap = spectral_gap(chain).as_f64().max(0.0);
        return Conductance {
            lower: gap / 2.0,
            upper: (2.0 * gap).sqrt(),
            exact: false,
        };
    }
    if m == 1 {
        return Conductance {
            lower: 1.0,
            upper: 1.0,
            exact: true,
        };
    }
    let pi: Vec<f64> = chain.pi.iter().map(|x| x.as_f64()).collect();
    let flow: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| pi[i] * chain.p[(i, j)].as_f64()).collect())
        .collect();
    let mut member = vec![false; m];
    let (mut mass, mut q) = (0.0, 0.0);
    let mut best = f64::INFINITY;
    for step in 1u64..(1u64 << m) {
        let x = step.trailing_zeros() as usize;
        let out_x: f64 = (0..m)
            .filter(|&y| y != x && !member[y])
            .map(|y| flow[x][y])
            .sum();
        let in_x: f64 = (0..m)
            .filter(|&a| a != x && member[a])
            .map(|a| flow[a][x])
            .sum();
        if member[x] {
            member[x] = false;
            mass -= pi[x];
            q += in_x - out_x;
        } else {
            member[x] = true;
            mass += pi[x];
            q += out_x - in_x;
        }
        if mass > 0.0 && mass <= 0.5 + 1e-12 {
            best = best.min(q.max(0.0) / mass);
        }
    }
    Conductance {
        lower: best,
        upper: best,
        exact: true,
    }
}

/// `Φ²/2 <= gap <= 2Φ`, checked against both ends of the conductance interval.
pub fn cheeger_ok(gap: f64, phi: &Conductance) -> bool {
    let tol = 1e-9;
    phi.lower * phi.lower / 2.0 <= gap + tol && gap <= 2.0 * phi.upper + tol
}

/// Runs the down-up walk for `steps` steps from `s0` (ChaCha8, seeded).
///
/// The returned trajectory has `steps + 1` sets, starting with `s0`.
pub fn sample_walk<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    s0: &[usize],
    l: usize,
    steps: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    let (n, k) = (mu.ground_size(), mu.k());
    if s0.len() != k || !is_valid_set(s0, n) {
        return Err(Error::Domain(format!(
            "{s0:?} is not a {k}-subset of [{n}]"
        )));
    }
    if l > k {
        return Err(Error::Domain(format!("ℓ = {l} exceeds k = {k}")));
    }
    if mu.mass(s0) <= T::zero() {
        return Err(Error::TrappedState { from: s0.to_vec() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traj = Vec::with_capacity(steps + 1);
    let mut cur = s0.to_vec();
    traj.push(cur.clone());
    for _ in 0..steps {
        let mut pick = rand::seq::index::sample(&mut rng, k, l).into_vec();
        pick.sort_unstable();
        let r: Vec<usize> = pick.into_iter().map(|i| cur[i]).collect();
        let ups: Vec<Vec<usize>> = combinations(&complement(n, &r), k - l)
            .map(|extra| union_sorted(&r, &extra))
            .collect();
        let weights: Vec<f64> = ups.iter().map(|s| mu.mass(s).as_f64()).collect();
        let dist =
            WeightedIndex::new(&weights).map_err(|_| Error::TrappedState { from: r.clone() })?;
        cur = ups[dist.sample(&mut rng)].clone();
        traj.push(cur.clone());
    }
    Ok(traj)
}

/// Visit frequencies of `traj` over the chain's states (unvisited or foreign sets are dropped).
pub fn empirical<T: Scalar>(chain: &ChainMatrix<T>, traj: &[Vec<usize>]) -> Vec<T> {
    let index: HashMap<&[usize], usize> = chain
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let mut counts = vec![0usize; chain.len()];
    for s in traj {
        if let Some(&i) = index.get(s.as_slice()) {
            counts[i] += 1;
        }
    }
    let total = T::of_usize(traj.len().max(1));
    counts.into_iter().map(|c| T::of_usize(c) / total).collect()
}

/// `½ Σ |p − q|`.
pub fn tv_distance<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::Domain(format!(
            "densities have {} and {} entries",
            p.len(),
            q.len()
        )));
    }
    Ok(p.iter().zip(q).map(|(a, b)| (*a - *b).abs()).sum::<T>() * T::of(0.5))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub num_states: usize,
    pub gap: f64,
    pub conductance: Conductance,
    pub cheeger_ok: bool,
    pub validity: ChainValidity,
}

/// Builds the chain and collects every diagnostic.
pub fn chain_report<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    l: usize,
) -> Result<ChainReport> {
    let chain = build_downup(mu, l)?;
    let gap = spectral_gap(&chain).as_f64();
    let phi = conductance(&chain);
    Ok(ChainReport {
        n: mu.ground_size(),
        k: mu.k(),
        l,
        num_states: chain.len(),
        gap,
        conductance: phi,
        cheeger_ok: cheeger_ok(gap, &phi),
        validity: chain.validate(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{DppDistribution, Tabulated};
    use crate::instances;
    use crate::kernel::Kernel;

    fn dpp(n: usize, k: usize, seed: u64) -> DppDistribution<f64> {
        DppDistribution::new(instances::random_npsd(n, 1.0, seed), k).unwrap()
    }

    #[test]
    fn unit_field_is_identity_and_zero_field_deletes() {
        let mu = dpp(6, 3, 1);
        let one = apply_field(&mu, &FieldVector::ones(6)).unwrap();
        let mut zero0 = vec![1.0; 6];
        zero0[0] = 0.0;
        let z = FieldVector::new(zero0).unwrap();
        let del = apply_field(&mu, &z).unwrap();
        for s in k_subsets(6, 3) {
            assert_eq!(one.mass(&s), mu.mass(&s));
            if s.contains(&0) {
                assert_eq!(del.mass(&s), 0.0);
            }
        }
    }

    #[test]
    fn field_scales_by_product() {
        let mu = dpp(6, 3, 2);
        let f = FieldVector::<f64>::random(6, 1.0, 9);
        let w = apply_field(&mu, &f).unwrap();
        for s in k_subsets(6, 3) {
            let prod: f64 = s.iter().map(|&i| f.lambda[i]).product();
            let m = mu.mass(&s);
            assert!((w.mass(&s) - m * prod).abs() <= 1e-14 * m * prod + 1e-300);
        }
    }

    #[test]
    fn infinite_field_forces_membership() {
        let mu = Tabulated::<f64>::uniform(5, 2);
        let mut l = vec![1.0; 5];
        l[3] = f64::INFINITY;
        let w = apply_field(&mu, &FieldVector::new(l).unwrap()).unwrap();
        assert_eq!(w.mass(&[0, 1]), 0.0);
        assert_eq!(w.mass(&[1, 3]), 1.0);
        let dead = FieldVector::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(apply_field(&mu, &dead), Err(Error::Infeasible(_))));
        assert!(FieldVector::new(vec![-1.0]).is_err());
    }

    #[test]
    fn uniform_three_state_chain() {
        let mu = Tabulated::<f64>::uniform(3, 2);
        let c = build_downup(&mu, 1).unwrap();
        assert_eq!(c.states, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.5 } else { 0.25 };
                assert!((c.p[(i, j)] - want).abs() < 1e-15);
            }
            assert!((c.pi[i] - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(c.validate().ok);
    }

    #[test]
    fn k_equals_l_is_identity() {
        let c = build_downup(&dpp(5, 2, 3), 2).unwrap();
        for i in 0..c.len() {
            for j in 0..c.len() {
                assert_eq!(c.p[(i, j)], if i == j { 1.0 } else { 0.0 });
            }
        }
        assert!(spectral_gap(&c).abs() < 1e-12);
        let traj = sample_walk(&dpp(5, 2, 3), &[1, 3], 2, 20, 0).unwrap();
        assert!(traj.iter().all(|s| s == &[1, 3]));
    }

    #[test]
    fn npsd_chain_is_valid() {
        let c = build_downup(&dpp(6, 3, 4), 1).unwrap();
        let v = c.validate();
        assert!(v.ok, "{v:?}");
        let gap = spectral_gap(&c);
        assert!(gap > 0.0);
        let phi = conductance(&c);
        assert!(phi.exact);
        assert!(cheeger_ok(gap, &phi));
    }

    #[test]
    fn two_state_chain() {
        let (p, q) = (0.3, 0.2);
        let c = ChainMatrix::from_parts(
            vec![vec![0], vec![1]],
            Matrix::from_f64_rows(&[vec![1.0 - p, p], vec![q, 1.0 - q]]).unwrap(),
            vec![q, p],
        )
        .unwrap();
        assert!((spectral_gap(&c) - (p + q)).abs() < 1e-12);

        let half = ChainMatrix::from_parts(
            vec![vec![0], vec![1]],
            Matrix::from_f64_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(conductance(&half).value(), Some(0.5));
    }

    #[test]
    fn gap_matches_independent_eigensolver() {
        let mu = Tabulated::<f64>::uniform(4, 2);
        let c = build_downup(&mu, 1).unwrap();
        let m = c.len();
        let p = nalgebra::DMatrix::from_fn(m, m, |i, j| c.p[(i, j)]);
        let mut ev: Vec<f64> = p.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((spectral_gap(&c) - (1.0 - ev[1])).abs() < 1e-10);

        let c = build_downup(&dpp(6, 3, 8), 1).unwrap();
        let m = c.len();
        let p = nalgebra::DMatrix::from_fn(m, m, |i, j| c.p[(i, j)]);
        let mut ev: Vec<f64> = p.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((spectral_gap(&c) - (1.0 - ev[1])).abs() < 1e-9);
    }

    #[test]
    fn disconnected_support() {
        let mu =
            Tabulated::<f64>::from_fn(4, 2, |s| if s == [0, 1] || s == [2, 3] { 1.0 } else { 0.0 });
        let c = build_downup(&mu, 1).unwrap();
        assert_eq!(c.len(), 2);
        assert!(spectral_gap(&c).abs() < 1e-12);
        assert_eq!(conductance(&c).value(), Some(0.0));
    }

    #[test]
    fn capacity_and_empty_support() {
        let big = Tabulated::<f64>::uniform(3, 1);
        assert!(build_downup(&big, 2).is_err());
        let mu = crate::distribution::FnDistribution::new(30, 5, |_: &[usize]| 1.0f64);
        assert!(matches!(build_downup(&mu, 3), Err(Error::Capacity { .. })));
        let zero = Tabulated::<f64>::from_fn(4, 2, |_| 0.0);
        assert!(matches!(build_downup(&zero, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn field_commutes_with_chain() {
        let mu = dpp(6, 3, 5);
        let f = FieldVector::<f64>::random(6, 1.0, 6);
        let c = build_downup(&apply_field(&mu, &f).unwrap(), 1).unwrap();
        let raw: Vec<f64> = c
            .states
            .iter()
            .map(|s| mu.mass(s) * s.iter().map(|&i| f.lambda[i]).product::<f64>())
            .collect();
        let z: f64 = raw.iter().sum();
        for (a, b) in c.pi.iter().zip(&raw) {
            assert!((a - b / z).abs() < 1e-12);
        }
        assert!(c.validate().ok);
    }

    #[test]
    fn sampler_is_reproducible_and_converges() {
        let mu = Tabulated::<f64>::uniform(5, 2);
        let a = sample_walk(&mu, &[0, 1], 1, 100_000, 42).unwrap();
        let b = sample_walk(&mu, &[0, 1], 1, 100_000, 42).unwrap();
        assert_eq!(a, b);
        let c = build_downup(&mu, 1).unwrap();
        assert!(tv_distance(&empirical(&c, &a), &c.pi).unwrap() < 0.05);
    }

    #[test]
    fn trapped_states() {
        let mu = Tabulated::<f64>::from_fn(4, 2, |s| if s == [0, 1] { 1.0 } else { 0.0 });
        assert!(matches!(
            sample_walk(&mu, &[2, 3], 1, 5, 0),
            Err(Error::TrappedState { .. })
        ));
        let k: Kernel<f64> = Kernel::new(Matrix::identity(4)).unwrap();
        let ok = DppDistribution::new(k, 2).unwrap();
        assert_eq!(sample_walk(&ok, &[0, 3], 1, 10, 1).unwrap().len(), 11);
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.75, 0.25]).unwrap(), 0.25);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }
}

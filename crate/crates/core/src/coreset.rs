//! Composable core-sets from 1-neighborhood local maxima.
//!
//! Each part `P_i` is summarized by a `(1, ζ)`-local maximum `C_i` of `μ`
//! restricted to `P_i`. If `μ` has the strong basis exchange property with
//! constant `β`, then `OPT(∪P_i) <= (β/ζ)^k OPT(∪C_i)`, witnessed by a chain
//! of single swaps that moves the global optimum into `∪C_i`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::combin::{difference, intersection, is_valid_set, k_subsets, sym_diff, union_sorted};
use crate::distribution::{Restricted, SetDistribution};
use crate::error::{Error, Result};
use crate::exchange::{brute_force_map, check_strong_basis_exchange, EXCHANGE_REL_TOL};
use crate::greedy::induced_greedy;
use crate::localsearch::{local_search, SearchConfig};
use crate::scalar::{leq_rel, Scalar};

/// Disjoint parts of a ground subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionPlan {
    pub parts: Vec<Vec<usize>>,
}

impl PartitionPlan {
    /// Parts are sorted; fails if they overlap or leave `[0, n)`.
    pub fn new(parts: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut parts = parts;
        let mut seen = vec![false; n];
        for p in &mut parts {
            p.sort_unstable();
            if !is_valid_set(p, n) {
                return Err(Error::Domain(format!(
                    "part {p:?} is not a subset of [{n}]"
                )));
            }
            for &x in p.iter() {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Domain(format!("element {x} appears in two parts")));
                }
            }
        }
        Ok(PartitionPlan { parts })
    }

    /// Shuffles `[0, n)` with ChaCha8 and deals it into `m` parts whose sizes differ by at most one.
    pub fn random_balanced(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::Domain(format!(
                "cannot split {n} elements into {m} parts"
            )));
        }
        let mut items: Vec<usize> = (0..n).collect();
        items.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut parts = vec![Vec::new(); m];
        for (i, x) in items.into_iter().enumerate() {
            parts[i % m].push(x);
        }
        Self::new(parts, n)
    }

    pub fn union(&self) -> Vec<usize> {
        self.parts
            .iter()
            .fold(Vec::new(), |acc, p| union_sorted(&acc, p))
    }
}

/// A `(1, ζ)`-local maximum of `μ` restricted to `part`, in global indices.
pub fn coreset_map<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    part: &[usize],
    zeta: f64,
) -> Result<Vec<usize>> {
    let k = mu.k();
    let local = Restricted::new(mu, part);
    if local.ground_size() < k {
        return Err(Error::Precondition(format!(
            "part of size {} cannot hold a {k}-set",
            local.ground_size()
        )));
    }
    if local.ground_size() == k {
        return Ok(local.items().to_vec());
    }
    let start = induced_greedy(&local, 1.0)?.final_set;
    let cfg = SearchConfig {
        r: 1,
        zeta,
        max_iters: usize::MAX,
    };
    let (set, _) = local_search(&local, &start, &cfg)?;
    Ok(local.to_global(&set))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLink<T> {
    pub set: Vec<usize>,
    pub value: T,
    /// The part whose core-set supplied the swap.
    pub part: usize,
    pub removed: usize,
    pub added: usize,
    /// `μ(W_{j−1}) / μ(W_j)` (0 when both vanish).
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoresetReport<T> {
    pub k: usize,
    pub zeta: f64,
    pub parts: Vec<Vec<usize>>,
    pub coresets: Vec<Vec<usize>>,
    pub opt_union: (Vec<usize>, T),
    pub opt_coreset: (Vec<usize>, T),
    /// `OPT(∪P_i) / OPT(C)`.
    pub ratio: T,
    /// Largest strong-exchange constant over `(C_i, W)`, at least 1.
    pub beta_hat: T,
    /// `(β̂/ζ)^k`.
    pub bound: T,
    pub bound_ok: bool,
    /// `W₀ = OPT(∪P_i), W₁, …, W_s ⊆ C`.
    pub chain: Vec<ChainLink<T>>,
    pub chain_ok: bool,
}

/// Builds every core-set, brute-forces both optima, measures `β̂`, and
/// replays the swap chain from the global optimum into `C = ∪C_i`.
pub fn compose_and_report<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    plan: &PartitionPlan,
    zeta: f64,
) -> Result<CoresetReport<T>> {
    let k = mu.k();
    let coresets: Vec<Vec<usize>> = plan
        .parts
        .par_iter()
        .map(|p| coreset_map(mu, p, zeta))
        .collect::<Result<_>>()?;
    let union = plan.union();
    let merged = coresets
        .iter()
        .fold(Vec::new(), |acc, c| union_sorted(&acc, c));

    let on_union = Restricted::new(mu, &union);
    let (w, opt_u) = brute_force_map(&on_union)?;
    let opt_union = (on_union.to_global(&w), opt_u);
    let on_c = Restricted::new(mu, &merged);
    let (w, opt_c) = brute_force_map(&on_c)?;
    let opt_coreset = (on_c.to_global(&w), opt_c);

    let candidates: Vec<Vec<usize>> = k_subsets(union.len(), k)
        .into_iter()
        .map(|s| on_union.to_global(&s))
        .collect();
    let beta_hat = coresets
        .par_iter()
        .map(|c| {
            candidates
                .iter()
                .map(|w| check_strong_basis_exchange(mu, c, w).map(|r| r.measured_beta))
                .try_fold(T::one(), |m, b| b.map(|b| m.max(b)))
        })
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .fold(T::one(), T::max);
    let zeta_t = T::of(zeta);
    let step_bound = beta_hat / zeta_t;
    let bound = step_bound.powi(k as i32);
    let ratio = if opt_coreset.1 > T::zero() {
        opt_union.1 / opt_coreset.1
    } else if opt_union.1 > T::zero() {
        T::infinity()
    } else {
        T::one()
    };
    let bound_ok = leq_rel(opt_union.1, bound * opt_coreset.1, EXCHANGE_REL_TOL);

    let (chain, chain_ok) = replay_chain(mu, plan, &coresets, &merged, &opt_union.0, step_bound);
    Ok(CoresetReport {
        k,
        zeta,
        parts: plan.parts.clone(),
        coresets,
        opt_union,
        opt_coreset,
        ratio,
        beta_hat,
        bound,
        bound_ok,
        chain,
        chain_ok,
    })
}

/// Swaps `j ∈ (W ∩ P_i) \ C_i` for the `e ∈ C_i \ W` maximizing `μ(W − j + e)`
/// until `W ⊆ C`; each link must satisfy `μ(W_{j−1}) <= (β̂/ζ) μ(W_j)`.
fn replay_chain<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    plan: &PartitionPlan,
    coresets: &[Vec<usize>],
    merged: &[usize],
    start: &[usize],
    step_bound: T,
) -> (Vec<ChainLink<T>>, bool) {
    let mut w = start.to_vec();
    let mut value = mu.mass(&w);
    let mut links = Vec::new();
    let mut ok = true;
    while let Some(j) = difference(&w, merged).first().copied() {
        let part = plan
            .parts
            .iter()
            .position(|p| p.binary_search(&j).is_ok())
            .expect("W lies in the union");
        let c = &coresets[part];
        let best = difference(c, &w)
            .into_iter()
            .map(|e| {
                let next = sym_diff(&w, &[j.min(e), j.max(e)]);
                let v = mu.mass(&next);
                (e, next, v)
            })
            .reduce(|a, b| if b.2 > a.2 { b } else { a });
        let Some((e, next, v)) = best else {
            ok = false;
            break;
        };
        let ratio = if value <= T::zero() {
            T::zero()
        } else if v <= T::zero() {
            T::infinity()
        } else {
            value / v
        };
        ok &= leq_rel(value, step_bound * v, EXCHANGE_REL_TOL);
        links.push(ChainLink {
            set: next.clone(),
            value: v,
            part,
            removed: j,
            added: e,
            ratio,
        });
        w = next;
        value = v;
    }
    ok &= links.len() <= mu.k() && intersection(&w, merged).len() == w.len();
    (links, ok)
}

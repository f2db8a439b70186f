//! Greedy initializers.
//!
//! [`induced_greedy`] grows `S` by the element maximizing the superset
//! marginal `μ(S ∪ {i})`; its output satisfies `C(n,k)·μ(S) >= OPT`.
//! [`standard_greedy`] is the classical `det(L_{S∪{i}})` rule, kept as a
//! baseline because it can be arbitrarily bad on nonsymmetric kernels.

use rayon::prelude::*;
use serde::Serialize;

use crate::combin::union_sorted;
use crate::distribution::SetDistribution;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyTrace<T> {
    /// `(chosen index, value that won the step)` in pick order.
    pub picks: Vec<(usize, T)>,
    pub final_set: Vec<usize>,
    pub final_value: T,
}

/// First index whose value reaches `threshold` (ties go to the smallest index).
fn pick<T: Scalar>(cands: &[(usize, T)], zeta: T) -> Option<(usize, T)> {
    let best = cands.iter().fold(T::zero(), |m, &(_, v)| m.max(v));
    if best <= T::zero() {
        return None;
    }
    let threshold = if zeta >= T::one() { best } else { best * zeta };
    cands.iter().copied().find(|&(_, v)| v >= threshold)
}

/// INDUCED-GREEDY with exact (`zeta_g = 1`) or `zeta_g`-approximate picks.
///
/// At each step the candidate marginals are evaluated in parallel; the pick is
/// the smallest index whose marginal is at least `zeta_g` times the best one.
pub fn induced_greedy<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    zeta_g: f64,
) -> Result<GreedyTrace<T>> {
    if !(zeta_g > 0.0 && zeta_g <= 1.0) {
        return Err(Error::Precondition(format!(
            "zeta_g = {zeta_g} must lie in (0, 1]"
        )));
    }
    let (n, k) = (mu.ground_size(), mu.k());
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    let mut set: Vec<usize> = Vec::with_capacity(k);
    let mut picks = Vec::with_capacity(k);
    for step in 0..k {
        let cands: Vec<usize> = (0..n).filter(|i| !set.contains(i)).collect();
        let values: Vec<(usize, T)> = cands
            .par_iter()
            .map(|&i| mu.superset_mass(&union_sorted(&set, &[i])).map(|v| (i, v)))
            .collect::<Result<_>>()?;
        let (i, v) = pick(&values, T::of(zeta_g)).ok_or_else(|| {
            Error::Infeasible(format!(
                "every extension of {set:?} has zero marginal at step {step}"
            ))
        })?;
        picks.push((i, v));
        set = union_sorted(&set, &[i]);
    }
    let final_value = mu.mass(&set);
    Ok(GreedyTrace {
        picks,
        final_set: set,
        final_value,
    })
}

/// Standard GREEDY: maximize `det(L_{S∪{i}})`, smallest index on ties.
///
/// When every extension has zero determinant the smallest remaining index is
/// taken, so the result can have zero determinant.
pub fn standard_greedy<T: Scalar>(kernel: &Kernel<T>, k: usize) -> Result<GreedyTrace<T>> {
    let n = kernel.n();
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    let mut set: Vec<usize> = Vec::with_capacity(k);
    let mut picks = Vec::with_capacity(k);
    for _ in 0..k {
        let values: Vec<(usize, T)> = (0..n)
            .filter(|i| !set.contains(i))
            .map(|i| {
                let s = union_sorted(&set, &[i]);
                let v = kernel.snap(kernel.entries().principal(&s).det(), s.len());
                (i, v)
            })
            .collect();
        let (i, v) = pick(&values, T::one()).unwrap_or(values[0]);
        picks.push((i, v));
        set = union_sorted(&set, &[i]);
    }
    let final_value = kernel.snap(kernel.principal_minor(&set)?, k);
    Ok(GreedyTrace {
        picks,
        final_set: set,
        final_value,
    })
}

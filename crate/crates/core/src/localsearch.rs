//! LOCAL-SEARCH-r and the full MAP pipeline.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::combin::{combinations, complement, distance, union_sorted};
use crate::distribution::{DppDistribution, SetDistribution};
use crate::error::{Error, Result};
use crate::greedy::induced_greedy;
use crate::kernel::{Kernel, NPSD_TOL};
use crate::scalar::Scalar;

/// Largest supported swap radius.
pub const MAX_RADIUS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Swap radius.
    pub r: usize,
    /// Moves must improve `μ` by a factor greater than `1/zeta`.
    pub zeta: f64,
    pub max_iters: usize,
}

impl SearchConfig {
    /// `max_iters = 64·k·(1 + log₂(1 + scale))`; pass `max|L|·n` as `scale`
    /// for kernels.
    pub fn new(r: usize, zeta: f64, k: usize, scale: f64) -> Self {
        let iters = 64.0 * k.max(1) as f64 * (1.0 + (1.0 + scale.max(0.0)).log2());
        SearchConfig {
            r,
            zeta,
            max_iters: iters.ceil() as usize,
        }
    }

    /// The defaults `r = 2`, `ζ = 1/2` sized for `kernel`.
    pub fn for_kernel<T: Scalar>(kernel: &Kernel<T>, k: usize) -> Self {
        Self::new(2, 0.5, k, kernel.max_abs().as_f64() * kernel.n() as f64)
    }

    pub fn with(mut self, r: usize, zeta: f64) -> Self {
        self.r = r;
        self.zeta = zeta;
        self
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.r == 0 || self.r > k || self.r > MAX_RADIUS {
            return Err(Error::Precondition(format!(
                "radius r = {} must satisfy 1 <= r <= min(k = {k}, {MAX_RADIUS})",
                self.r
            )));
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return Err(Error::Precondition(format!(
                "zeta = {} must lie in (0, 1)",
                self.zeta
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchStep<T> {
    pub set: Vec<usize>,
    pub value: T,
    /// `value / previous value`; the start has factor 1.
    pub factor: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchTrace<T> {
    /// The start followed by every accepted move.
    pub steps: Vec<SearchStep<T>>,
    pub certified_local_max: bool,
    pub neighborhood_evals: usize,
}

impl<T> SearchTrace<T> {
    /// Number of accepted moves.
    pub fn moves(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }
}

/// All `T` with `|T| = k` and `|S \ T| <= r`, each once, `S` first.
///
/// Ordered by distance from `S`, then lexicographically. The count is
/// `Σ_{s=0}^{r} C(k,s)·C(n−k,s)`.
pub fn neighborhood(set: &[usize], r: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let outside = complement(n, set);
    let mut layers: Vec<Vec<usize>> = vec![set.to_vec()];
    for s in 1..=r.min(set.len()).min(outside.len()) {
        let mut layer: Vec<Vec<usize>> = Vec::new();
        for removed in combinations(set, s) {
            let kept: Vec<usize> = set
                .iter()
                .copied()
                .filter(|x| !removed.contains(x))
                .collect();
            for added in combinations(&outside, s) {
                layer.push(union_sorted(&kept, &added));
            }
        }
        layer.sort();
        layers.extend(layer);
    }
    layers.into_iter()
}

/// Best member of a scored neighborhood: highest value, lexicographically
/// smallest set among ties.
fn best_of<T: Scalar>(scored: &[(Vec<usize>, T)]) -> Option<&(Vec<usize>, T)> {
    scored.iter().reduce(|a, b| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    })
}

/// Scores the `r`-neighborhood; `DppDistribution` uses its Schur-complement path.
fn scored_neighborhood<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    set: &[usize],
    r: usize,
) -> Vec<(Vec<usize>, T)> {
    mu.neighborhood_masses(set, r)
}

/// LOCAL-SEARCH-r from `start`: while some `T ∈ N_r(S)` has `μ(S) < ζ μ(T)`,
/// move to the argmax of `μ` over `N_r(S)`.
pub fn local_search<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    start: &[usize],
    cfg: &SearchConfig,
) -> Result<(Vec<usize>, SearchTrace<T>)> {
    let k = mu.k();
    if start.len() != k || !crate::combin::is_valid_set(start, mu.ground_size()) {
        return Err(Error::Domain(format!(
            "start {start:?} is not a sorted {k}-subset of [0, {})",
            mu.ground_size()
        )));
    }
    cfg.validate(k)?;
    let zeta = T::of(cfg.zeta);
    let mut current = start.to_vec();
    let mut value = mu.mass(&current);
    if value <= T::zero() {
        return Err(Error::Precondition(format!(
            "local search needs μ(S0) > 0, got {value} at {start:?}"
        )));
    }
    let mut trace = SearchTrace {
        steps: vec![SearchStep {
            set: current.clone(),
            value,
            factor: T::one(),
        }],
        certified_local_max: false,
        neighborhood_evals: 0,
    };
    for _ in 0..cfg.max_iters {
        let scored = scored_neighborhood(mu, &current, cfg.r);
        trace.neighborhood_evals += scored.len();
        let (best_set, best_val) = best_of(&scored).cloned().expect("neighborhood contains S");
        if value >= zeta * best_val {
            trace.certified_local_max = true;
            return Ok((current, trace));
        }
        trace.steps.push(SearchStep {
            set: best_set.clone(),
            value: best_val,
            factor: best_val / value,
        });
        current = best_set;
        value = best_val;
    }
    Err(Error::IncompleteSearch {
        iters: cfg.max_iters,
        best: current,
        value: value.as_f64(),
    })
}

/// Re-scans `N_r(S)` and returns the members violating `μ(S) >= ζ μ(T)`.
pub fn local_max_violations<T: Scalar, D: SetDistribution<T> + ?Sized>(
    mu: &D,
    set: &[usize],
    r: usize,
    zeta: f64,
) -> Vec<Vec<usize>> {
    let v = mu.mass(set);
    let z = T::of(zeta);
    let cands: Vec<Vec<usize>> = neighborhood(set, r, mu.ground_size()).collect();
    cands
        .into_par_iter()
        .filter(|t| v < z * mu.mass(t))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MapReport<T> {
    pub set: Vec<usize>,
    pub value: T,
    pub initial_set: Vec<usize>,
    pub initial_value: T,
    pub iterations: usize,
    pub neighborhood_evals: usize,
    pub certified_local_max: bool,
    /// Not serialized, so reports stay reproducible.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

/// INDUCED-GREEDY followed by LOCAL-SEARCH-r on `S ↦ det(L_S)`.
pub fn map_inference<T: Scalar>(
    kernel: &Kernel<T>,
    k: usize,
    cfg: &SearchConfig,
) -> Result<(Vec<usize>, MapReport<T>)> {
    cfg.validate(k)?;
    if !kernel.is_npsd(NPSD_TOL) {
        return Err(Error::Precondition("kernel is not nPSD".into()));
    }
    let t0 = Instant::now();
    let mu = DppDistribution::new(kernel.clone(), k)?;
    let init = induced_greedy(&mu, 1.0)?;
    let (set, trace) = local_search(&mu, &init.final_set, cfg)?;
    let value = trace
        .steps
        .last()
        .map(|s| s.value)
        .unwrap_or(init.final_value);
    let report = MapReport {
        set: set.clone(),
        value,
        initial_set: init.final_set,
        initial_value: init.final_value,
        iterations: trace.moves(),
        neighborhood_evals: trace.neighborhood_evals,
        certified_local_max: trace.certified_local_max,
        wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
    };
    Ok((set, report))
}

/// `Σ_{s=0}^{r} C(k,s)·C(n−k,s)`.
pub fn neighborhood_size(n: usize, k: usize, r: usize) -> u128 {
    use crate::combin::binomial;
    (0..=r).map(|s| binomial(k, s) * binomial(n - k, s)).sum()
}

/// Checks `d(S, T) <= r` for every member of a sequence of moves.
pub fn moves_within_radius(trace: &SearchTrace<impl Scalar>, r: usize) -> bool {
    trace
        .steps
        .windows(2)
        .all(|w| distance(&w[0].set, &w[1].set) <= r)
}

//! Unnormalized densities over the size-`k` subsets of a ground set `{0, …, n-1}`.

use rayon::prelude::*;

use crate::charpoly;
use crate::combin::{
    binomial, colex_rank, combinations, complement, distance, k_subsets, union_sorted,
};
use crate::error::{Error, Result};
use crate::kernel::{incremental_minor, Kernel, SubsetState};
use crate::localsearch::neighborhood;
use crate::scalar::Scalar;

/// Largest state space the brute-force helpers will enumerate.
pub const ENUMERATION_LIMIT: u128 = 2_000_000;

/// Evaluation oracle for a density `μ : C([n], k) → R≥0`.
///
/// Sets passed to [`SetDistribution::mass`] are strictly increasing and have
/// exactly `k` elements.
pub trait SetDistribution<T: Scalar>: Sync {
    fn ground_size(&self) -> usize;

    fn k(&self) -> usize;

    fn mass(&self, set: &[usize]) -> T;

    /// `μ(Y) = Σ_{S ⊇ Y, |S| = k} μ(S)`. The default enumerates supersets.
    fn superset_mass(&self, subset: &[usize]) -> Result<T> {
        let (n, k) = (self.ground_size(), self.k());
        if subset.len() > k {
            return Err(Error::Domain(format!(
                "subset of size {} exceeds k = {k}",
                subset.len()
            )));
        }
        let rest = complement(n, subset);
        let needed = binomial(rest.len(), k - subset.len());
        if needed > ENUMERATION_LIMIT {
            return Err(Error::Capacity {
                what: "superset enumeration",
                needed,
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(combinations(&rest, k - subset.len())
            .map(|extra| self.mass(&union_sorted(subset, &extra)))
            .sum())
    }

    /// Every member of the `r`-neighborhood of `set` with its mass, in the
    /// order produced by [`neighborhood`].
    fn neighborhood_masses(&self, set: &[usize], r: usize) -> Vec<(Vec<usize>, T)> {
        neighborhood(set, r, self.ground_size())
            .map(|t| {
                let m = self.mass(&t);
                (t, m)
            })
            .collect()
    }
}

impl<T: Scalar, D: SetDistribution<T> + ?Sized> SetDistribution<T> for &D {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn k(&self) -> usize {
        (**self).k()
    }
    fn mass(&self, set: &[usize]) -> T {
        (**self).mass(set)
    }
    fn superset_mass(&self, subset: &[usize]) -> Result<T> {
        (**self).superset_mass(subset)
    }
    fn neighborhood_masses(&self, set: &[usize], r: usize) -> Vec<(Vec<usize>, T)> {
        (**self).neighborhood_masses(set, r)
    }
}

/// The k-DPP density `S ↦ det(L_S)` of a kernel.
///
/// Minors below the kernel's zero threshold (and negative noise) are reported as 0.
#[derive(Clone, Debug)]
pub struct DppDistribution<T> {
    kernel: Kernel<T>,
    k: usize,
}

impl<T: Scalar> DppDistribution<T> {
    pub fn new(kernel: Kernel<T>, k: usize) -> Result<Self> {
        if k == 0 || k > kernel.n() {
            return Err(Error::Domain(format!(
                "k = {k} must lie in [1, n = {}]",
                kernel.n()
            )));
        }
        Ok(DppDistribution { kernel, k })
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    fn clean(&self, v: T, size: usize) -> T {
        self.kernel.snap(v.max(T::zero()), size)
    }
}

impl<T: Scalar> SetDistribution<T> for DppDistribution<T> {
    fn ground_size(&self) -> usize {
        self.kernel.n()
    }

    fn k(&self) -> usize {
        self.k
    }

    fn mass(&self, set: &[usize]) -> T {
        let v = self.kernel.entries().principal(set).det();
        self.clean(v, set.len())
    }

    fn superset_mass(&self, subset: &[usize]) -> Result<T> {
        let v = if self.kernel.lowrank().is_some() {
            charpoly::lowrank_marginal(&self.kernel, subset, self.k)?
        } else {
            charpoly::superset_marginal(&self.kernel, subset, self.k)?
        };
        Ok(self.clean(v, self.k))
    }

    /// Groups the neighborhood by the kept part `Y = S \ U₁`, caches `L_Y⁻¹`
    /// once per `Y`, and evaluates every completion `Y ∪ D` by a Schur complement.
    fn neighborhood_masses(&self, set: &[usize], r: usize) -> Vec<(Vec<usize>, T)> {
        let n = self.kernel.n();
        let k = set.len();
        let outside = complement(n, set);
        let removals: Vec<Vec<usize>> = (1..=r.min(k).min(outside.len()))
            .flat_map(|s| combinations(set, s))
            .collect();
        let mut out: Vec<(Vec<usize>, T)> = removals
            .par_iter()
            .flat_map_iter(|removed| {
                let kept: Vec<usize> = set
                    .iter()
                    .copied()
                    .filter(|x| !removed.contains(x))
                    .collect();
                let state = SubsetState::new(&self.kernel, &kept).expect("kept set is valid");
                combinations(&outside, removed.len())
                    .map(|added| {
                        let t = union_sorted(&kept, &added);
                        let v = match incremental_minor(&state, &self.kernel, &added) {
                            Ok((v, _)) => v,
                            Err(_) => self.kernel.entries().principal(&t).det(),
                        };
                        let v = self.clean(v, k);
                        (t, v)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        out.push((set.to_vec(), self.mass(set)));
        // Same order as `neighborhood`.
        let order = |t: &Vec<usize>| distance(set, t);
        out.sort_by(|a, b| order(&a.0).cmp(&order(&b.0)).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

/// Density backed by a closure.
pub struct FnDistribution<F> {
    n: usize,
    k: usize,
    f: F,
}

impl<F> FnDistribution<F> {
    pub fn new(n: usize, k: usize, f: F) -> Self {
        FnDistribution { n, k, f }
    }
}

impl<T: Scalar, F: Fn(&[usize]) -> T + Sync> SetDistribution<T> for FnDistribution<F> {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn mass(&self, set: &[usize]) -> T {
        (self.f)(set)
    }
}

/// All `C(n, k)` values precomputed, addressed by colexicographic rank.
#[derive(Clone, Debug)]
pub struct Tabulated<T> {
    n: usize,
    k: usize,
    values: Vec<T>,
}

impl<T: Scalar> Tabulated<T> {
    pub fn from_distribution<D: SetDistribution<T> + ?Sized>(mu: &D) -> Result<Self> {
        let (n, k) = (mu.ground_size(), mu.k());
        let needed = binomial(n, k);
        if needed > ENUMERATION_LIMIT {
            return Err(Error::Capacity {
                what: "tabulated density",
                needed,
                limit: ENUMERATION_LIMIT,
            });
        }
        let mut values = vec![T::zero(); needed as usize];
        for s in k_subsets(n, k) {
            values[colex_rank(&s)] = mu.mass(&s);
        }
        Ok(Tabulated { n, k, values })
    }

    pub fn uniform(n: usize, k: usize) -> Self {
        Tabulated {
            n,
            k,
            values: vec![T::one(); binomial(n, k) as usize],
        }
    }

    pub fn from_fn(n: usize, k: usize, f: impl Fn(&[usize]) -> T) -> Self {
        let mut values = vec![T::zero(); binomial(n, k) as usize];
        for s in k_subsets(n, k) {
            values[colex_rank(&s)] = f(&s);
        }
        Tabulated { n, k, values }
    }

    pub fn total(&self) -> T {
        self.values.iter().copied().sum()
    }
}

impl<T: Scalar> SetDistribution<T> for Tabulated<T> {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn mass(&self, set: &[usize]) -> T {
        self.values[colex_rank(set)]
    }
}

/// `μ` restricted to subsets of `items`, re-indexed to `{0, …, |items|-1}`.
pub struct Restricted<'a, D: ?Sized> {
    inner: &'a D,
    items: Vec<usize>,
}

impl<'a, D: ?Sized> Restricted<'a, D> {
    /// `items` is sorted and deduplicated.
    pub fn new(inner: &'a D, items: &[usize]) -> Self {
        let mut items = items.to_vec();
        items.sort_unstable();
        items.dedup();
        Restricted { inner, items }
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn to_global(&self, local: &[usize]) -> Vec<usize> {
        local.iter().map(|&i| self.items[i]).collect()
    }

    pub fn to_local(&self, global: &[usize]) -> Option<Vec<usize>> {
        global
            .iter()
            .map(|g| self.items.binary_search(g).ok())
            .collect()
    }
}

impl<T: Scalar, D: SetDistribution<T> + ?Sized> SetDistribution<T> for Restricted<'_, D> {
    fn ground_size(&self) -> usize {
        self.items.len()
    }
    fn k(&self) -> usize {
        self.inner.k()
    }
    fn mass(&self, set: &[usize]) -> T {
        self.inner.mass(&self.to_global(set))
    }
}

//! DPP kernels: principal minors, the nPSD test, Schur-complement conditioning
//! and cached incremental minors.
//!
//! A kernel `L` defines the unnormalized density `S ↦ det(L_S)` over index
//! sets. Kernels may additionally carry a low-rank factorization `L = B C Bᵀ`.

use std::fmt::Write as _;

use crate::combin::{complement, is_valid_set, union_sorted};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::scalar::Scalar;

/// Default tolerance for [`Kernel::is_npsd`].
pub const NPSD_TOL: f64 = 1e-9;

/// Relative factor of the zero-determinant threshold.
pub const ZERO_REL: f64 = 1e-12;

/// Factors `B` (n×d) and `C` (d×d) with `L = B C Bᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRank<T> {
    pub b: Matrix<T>,
    pub c: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T> {
    entries: Matrix<T>,
    lowrank: Option<LowRank<T>>,
}

impl<T: Scalar> Kernel<T> {
    pub fn new(entries: Matrix<T>) -> Result<Self> {
        if !entries.is_square() || entries.rows() == 0 {
            return Err(Error::Domain(format!(
                "kernel must be square with n >= 1, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        if entries.to_rows().iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Domain("kernel entries must be finite".into()));
        }
        Ok(Kernel {
            entries,
            lowrank: None,
        })
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_f64_rows(rows)?)
    }

    /// Builds `L = B C Bᵀ`, keeping the factors.
    pub fn from_lowrank(b: Matrix<T>, c: Matrix<T>) -> Result<Self> {
        if !c.is_square() || b.cols() != c.rows() {
            return Err(Error::Domain(format!(
                "low-rank factors have incompatible shapes B {}x{}, C {}x{}",
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols()
            )));
        }
        let dense = b.matmul(&c).matmul(&b.transpose());
        let mut k = Self::new(dense)?;
        k.lowrank = Some(LowRank { b, c });
        Ok(k)
    }

    /// Attaches factors to an existing dense kernel after checking
    /// `max |L - BCBᵀ| <= 1e-8 (1 + max |L|)`.
    pub fn with_lowrank(mut self, b: Matrix<T>, c: Matrix<T>) -> Result<Self> {
        let other = Self::from_lowrank(b, c)?;
        if other.n() != self.n() {
            return Err(Error::Domain(
                "low-rank factors do not match kernel size".into(),
            ));
        }
        let gap = self.entries.sub(&other.entries).max_abs();
        if gap > T::of(1e-8) * (T::one() + self.max_abs()) {
            return Err(Error::Domain(format!(
                "low-rank factors disagree with dense entries by {gap}"
            )));
        }
        self.lowrank = other.lowrank;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn lowrank(&self) -> Option<&LowRank<T>> {
        self.lowrank.as_ref()
    }

    pub fn max_abs(&self) -> T {
        self.entries.max_abs()
    }

    /// Magnitude below which a size-`size` minor counts as zero:
    /// `1e-12 (1 + max |L|)^size`.
    pub fn zero_threshold(&self, size: usize) -> T {
        T::of(ZERO_REL) * (T::one() + self.max_abs()).powi(size as i32)
    }

    /// Snaps minors below the zero threshold to exactly zero.
    pub fn snap(&self, value: T, size: usize) -> T {
        if value.abs() < self.zero_threshold(size) {
            T::zero()
        } else {
            value
        }
    }

    fn check_set(&self, set: &[usize]) -> Result<()> {
        if let Some(&bad) = set.iter().find(|&&i| i >= self.n()) {
            return Err(Error::Domain(format!(
                "index {bad} out of range for kernel of size {}",
                self.n()
            )));
        }
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("repeated index in {set:?}")));
        }
        Ok(())
    }

    /// `det(L_S)`; the empty minor is 1.
    pub fn principal_minor(&self, set: &[usize]) -> Result<T> {
        self.check_set(set)?;
        Ok(self.entries.principal(set).det())
    }

    /// `det(B_S C B_Sᵀ)` when factors are present.
    pub fn principal_minor_lowrank(&self, set: &[usize]) -> Result<Option<T>> {
        self.check_set(set)?;
        Ok(self.lowrank.as_ref().map(|lr| {
            let bs = lr.b.select_rows(set);
            bs.matmul(&lr.c).matmul(&bs.transpose()).det()
        }))
    }

    /// Minimum eigenvalue of the symmetric part `(L + Lᵀ)/2`.
    pub fn min_symmetric_eigenvalue(&self) -> T {
        let eig = symmetric_eigenvalues(&self.entries.symmetric_part());
        eig.last().copied().unwrap_or(T::zero())
    }

    /// True iff `λ_min((L + Lᵀ)/2) >= -tol (1 + ‖L‖₂)`.
    pub fn is_npsd(&self, tol: f64) -> bool {
        let norm = self.entries.spectral_norm();
        self.min_symmetric_eigenvalue() >= -T::of(tol) * (T::one() + norm)
    }

    /// Schur complement `L^Y = L_Ỹ − L_{Ỹ,Y} L_Y⁻¹ L_{Y,Ỹ}` over `Ỹ = [n] \ Y`.
    pub fn condition_on(&self, y: &[usize]) -> Result<Conditioned<T>> {
        self.check_set(y)?;
        let rest = complement(self.n(), y);
        if y.is_empty() {
            return Ok(Conditioned {
                kernel: self.clone(),
                remaining: rest,
                det_y: T::one(),
            });
        }
        let ly = self.entries.principal(y);
        let lu = ly.lu();
        let det_y = lu.det();
        if self.snap(det_y, y.len()) == T::zero() {
            return Err(Error::SingularConditioning {
                det: det_y.as_f64(),
            });
        }
        if rest.is_empty() {
            return Err(Error::Domain("conditioning on the whole ground set".into()));
        }
        let inv = lu.inverse().ok_or(Error::SingularConditioning {
            det: det_y.as_f64(),
        })?;
        let l_ry = self.entries.select(&rest, y);
        let l_yr = self.entries.select(y, &rest);
        let schur = self
            .entries
            .principal(&rest)
            .sub(&l_ry.matmul(&inv).matmul(&l_yr));
        Ok(Conditioned {
            kernel: Kernel::new(schur)?,
            remaining: rest,
            det_y,
        })
    }

    /// Dense text form: `n` then `n` rows; low-rank kernels write `n d`, `B`, `C`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let write_rows = |out: &mut String, m: &Matrix<T>| {
            for i in 0..m.rows() {
                let row: Vec<String> = m.row(i).iter().map(|x| format!("{x}")).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        };
        match &self.lowrank {
            Some(lr) => {
                let _ = writeln!(out, "{} {}", self.n(), lr.c.rows());
                write_rows(&mut out, &lr.b);
                write_rows(&mut out, &lr.c);
            }
            None => {
                let _ = writeln!(out, "{}", self.n());
                write_rows(&mut out, &self.entries);
            }
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty kernel file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad header token {t:?}")))
            })
            .collect::<Result<_>>()?;
        let mut read_block = |rows: usize, cols: usize, what: &str| -> Result<Matrix<T>> {
            let mut data = Vec::with_capacity(rows);
            for r in 0..rows {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::Parse(format!("{what}: missing row {r}")))?;
                let vals: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| {
                        t.parse()
                            .map_err(|_| Error::Parse(format!("{what}: bad number {t:?}")))
                    })
                    .collect::<Result<_>>()?;
                if vals.len() != cols {
                    return Err(Error::Parse(format!(
                        "{what}: row {r} has {} values, expected {cols}",
                        vals.len()
                    )));
                }
                data.push(vals);
            }
            Matrix::from_f64_rows(&data)
        };
        match dims.as_slice() {
            [n] => Kernel::new(read_block(*n, *n, "kernel")?),
            [n, d] => {
                let b = read_block(*n, *d, "B")?;
                let c = read_block(*d, *d, "C")?;
                Kernel::from_lowrank(b, c)
            }
            _ => Err(Error::Parse(format!(
                "header must be `n` or `n d`, got {header:?}"
            ))),
        }
    }
}

/// Result of [`Kernel::condition_on`].
#[derive(Clone, Debug)]
pub struct Conditioned<T> {
    /// Schur complement, indexed by position in `remaining`.
    pub kernel: Kernel<T>,
    /// Original indices of the rows of `kernel`.
    pub remaining: Vec<usize>,
    pub det_y: T,
}

impl<T: Scalar> Conditioned<T> {
    /// Positions in the conditioned kernel of the original indices `set`.
    pub fn local(&self, set: &[usize]) -> Option<Vec<usize>> {
        set.iter()
            .map(|x| self.remaining.iter().position(|r| r == x))
            .collect()
    }
}

/// A sorted index set with its cached minor and inverse.
#[derive(Clone, Debug)]
pub struct SubsetState<T> {
    pub indices: Vec<usize>,
    pub det_value: T,
    pub inv_cache: Option<Matrix<T>>,
}

impl<T: Scalar> SubsetState<T> {
    /// Computes `det(L_S)` and, when the minor is above the zero threshold, `L_S⁻¹`.
    pub fn new(kernel: &Kernel<T>, indices: &[usize]) -> Result<Self> {
        if !is_valid_set(indices, kernel.n()) {
            return Err(Error::Domain(format!(
                "subset {indices:?} is not strictly increasing within [0, {})",
                kernel.n()
            )));
        }
        let sub = kernel.entries().principal(indices);
        let lu = sub.lu();
        let det_value = lu.det();
        let inv_cache = if kernel.snap(det_value, indices.len()) != T::zero() {
            lu.inverse()
        } else {
            None
        };
        Ok(SubsetState {
            indices: indices.to_vec(),
            det_value,
            inv_cache,
        })
    }
}

/// How [`incremental_minor`] produced its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    Cached,
    /// No inverse was cached; computed directly on `S ∪ D`.
    Direct,
}

/// `det(L_{S∪D}) = det(L_S) · det(L_D − L_{D,S} L_S⁻¹ L_{S,D})`.
pub fn incremental_minor<T: Scalar>(
    state: &SubsetState<T>,
    kernel: &Kernel<T>,
    d: &[usize],
) -> Result<(T, EvalPath)> {
    if d.iter().any(|x| state.indices.contains(x)) {
        return Err(Error::Domain(format!(
            "added set {d:?} overlaps {:?}",
            state.indices
        )));
    }
    if d.is_empty() {
        return Ok((state.det_value, EvalPath::Cached));
    }
    match &state.inv_cache {
        Some(inv) => {
            let s = &state.indices;
            let ld = kernel.entries().principal(d);
            let lds = kernel.entries().select(d, s);
            let lsd = kernel.entries().select(s, d);
            let schur = ld.sub(&lds.matmul(inv).matmul(&lsd));
            Ok((state.det_value * schur.det(), EvalPath::Cached))
        }
        None => {
            let all = union_sorted(&state.indices, d);
            Ok((kernel.principal_minor(&all)?, EvalPath::Direct))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn cofactor_det(m: &Matrix<f64>) -> f64 {
        let n = m.rows();
        if n == 0 {
            return 1.0;
        }
        (0..n)
            .map(|j| {
                let rest: Vec<usize> = (1..n).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, j)] * cofactor_det(&m.select(&rest, &cols))
            })
            .sum()
    }

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-12
    }

    #[test]
    fn identity_minor() {
        let k = Kernel::<f64>::new(Matrix::identity(3)).unwrap();
        assert_eq!(k.principal_minor(&[0, 1]).unwrap(), 1.0);
        assert_eq!(k.principal_minor(&[]).unwrap(), 1.0);
    }

    #[test]
    fn skew_block_pair_minor() {
        let k = Kernel::<f64>::from_f64_rows(&[vec![2.0, 10.0], vec![-10.0, 2.0]]).unwrap();
        assert!(rel_close(k.principal_minor(&[0, 1]).unwrap(), 104.0, 1e-14));
        let k: Kernel<f64> =
            instances::skew_block(&[4.0, 3.0, 2.0], &[100.0, 200.0, 300.0]).unwrap();
        assert!(rel_close(
            k.principal_minor(&[0, 1]).unwrap(),
            10016.0,
            1e-14
        ));
    }

    #[test]
    fn minor_matches_cofactor_oracle() {
        let k: Kernel<f64> = instances::random_npsd(4, 1.0, 7);
        let s = [0, 2, 3];
        let direct = k.principal_minor(&s).unwrap();
        let oracle = cofactor_det(&k.entries().principal(&s));
        assert!(rel_close(direct, oracle, 1e-12));
    }

    #[test]
    fn out_of_range_is_domain_error() {
        let k = Kernel::<f64>::new(Matrix::identity(3)).unwrap();
        assert!(matches!(k.principal_minor(&[0, 3]), Err(Error::Domain(_))));
        assert!(matches!(k.principal_minor(&[1, 1]), Err(Error::Domain(_))));
    }

    #[test]
    fn npsd_examples() {
        let skew = Kernel::<f64>::from_f64_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(skew.is_npsd(NPSD_TOL));
        assert!(Kernel::<f64>::new(Matrix::identity(4))
            .unwrap()
            .is_npsd(NPSD_TOL));
        let bad = Kernel::<f64>::from_f64_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert!(!bad.is_npsd(NPSD_TOL));
        assert!(instances::random_npsd::<f64>(7, 1.0, 3).is_npsd(NPSD_TOL));
    }

    #[test]
    fn condition_on_empty_and_diagonal() {
        let k = Kernel::<f64>::from_f64_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 3.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ])
        .unwrap();
        let c = k.condition_on(&[]).unwrap();
        assert_eq!(c.kernel, k);
        assert_eq!(c.det_y, 1.0);
        let c = k.condition_on(&[0]).unwrap();
        assert_eq!(c.det_y, 2.0);
        assert_eq!(c.remaining, vec![1, 2]);
        assert_eq!(
            c.kernel.entries().to_rows(),
            vec![vec![3.0, 0.0], vec![0.0, 5.0]]
        );
    }

    #[test]
    fn condition_on_seeded_schur_identity() {
        let k: Kernel<f64> = instances::random_npsd(5, 1.0, 11);
        let c = k.condition_on(&[1, 3]).unwrap();
        let local = c.local(&[0]).unwrap();
        let via = c.det_y * c.kernel.principal_minor(&local).unwrap();
        let direct = k.principal_minor(&[0, 1, 3]).unwrap();
        assert!(rel_close(via, direct, 1e-10));
    }

    #[test]
    fn condition_on_singular_errors() {
        let k = Kernel::<f64>::from_f64_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(matches!(
            k.condition_on(&[0]),
            Err(Error::SingularConditioning { .. })
        ));
    }

    #[test]
    fn incremental_examples() {
        let k: Kernel<f64> = instances::random_npsd(6, 1.0, 5);
        let st = SubsetState::new(&k, &[0, 1]).unwrap();
        assert_eq!(incremental_minor(&st, &k, &[]).unwrap().0, st.det_value);
        let (v, path) = incremental_minor(&st, &k, &[4, 5]).unwrap();
        assert_eq!(path, EvalPath::Cached);
        assert!(rel_close(
            v,
            k.principal_minor(&[0, 1, 4, 5]).unwrap(),
            1e-8
        ));

        let id = Kernel::<f64>::new(Matrix::identity(5)).unwrap();
        let st = SubsetState::new(&id, &[1, 3]).unwrap();
        assert_eq!(incremental_minor(&st, &id, &[0, 4]).unwrap().0, 1.0);
    }

    #[test]
    fn incremental_without_cache_falls_back() {
        let k = Kernel::<f64>::from_f64_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let st = SubsetState::new(&k, &[0]).unwrap();
        assert!(st.inv_cache.is_none());
        let (v, path) = incremental_minor(&st, &k, &[1]).unwrap();
        assert_eq!(path, EvalPath::Direct);
        assert!(rel_close(v, 1.0, 1e-14));
    }

    #[test]
    fn inverse_cache_is_accurate() {
        let k: Kernel<f64> = instances::random_npsd(6, 1.0, 9);
        let st = SubsetState::new(&k, &[0, 2, 3, 5]).unwrap();
        let ls = k.entries().principal(&st.indices);
        let err = ls
            .matmul(st.inv_cache.as_ref().unwrap())
            .sub(&Matrix::identity(4))
            .max_abs();
        assert!(err <= 1e-7);
    }

    #[test]
    fn text_roundtrip_dense_and_lowrank() {
        let k: Kernel<f64> = instances::random_npsd(4, 1.0, 2);
        let back = Kernel::<f64>::parse_text(&k.to_text()).unwrap();
        assert_eq!(back, k);
        let lr: Kernel<f64> = instances::lowrank_npsd(6, 2, 4);
        let back = Kernel::<f64>::parse_text(&lr.to_text()).unwrap();
        assert_eq!(back.lowrank(), lr.lowrank());
        assert!(back.entries().sub(lr.entries()).max_abs() < 1e-12);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Kernel::<f64>::parse_text(""),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Kernel::<f64>::parse_text("2\n1 0\n0"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Kernel::<f64>::parse_text("2\n1 x\n0 1"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn with_lowrank_rejects_mismatch() {
        let lr: Kernel<f64> = instances::lowrank_npsd(5, 2, 1);
        let f = lr.lowrank().unwrap().clone();
        let dense = Kernel::new(lr.entries().clone()).unwrap();
        assert!(dense.clone().with_lowrank(f.b.clone(), f.c.clone()).is_ok());
        let off = Kernel::new(lr.entries().add(&Matrix::identity(5))).unwrap();
        assert!(off.with_lowrank(f.b, f.c).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let k = Kernel::<f32>::from_f64_rows(&[vec![2.0, 1.0], vec![-1.0, 3.0]]).unwrap();
        assert!((k.principal_minor(&[0, 1]).unwrap() - 7.0).abs() < 1e-5);
        assert!(k.is_npsd(1e-6));
    }
}

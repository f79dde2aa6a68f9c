//! Coupling/field tables and the one-excitation Jacobi matrix.
//!
//! Indexing follows the chain: fields `B_0..B_N` live on sites, couplings
//! `J_1..J_N` on bonds, `J_n` joining sites `n - 1` and `n`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ChainParams, Variant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    fields: Vec<f64>,
    couplings: Vec<f64>,
    variant: Option<Variant>,
}

impl CouplingTable {
    /// Table from raw arrays: `fields` is `B_0..B_N`, `couplings` is
    /// `J_1..J_N`. No positivity is required, so deformed or hand-edited
    /// tables can be represented.
    pub fn new(fields: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::Table("a chain needs at least one site".into()));
        }
        if couplings.len() + 1 != fields.len() {
            return Err(Error::Table(format!(
                "{} fields need {} couplings, got {}",
                fields.len(),
                fields.len() - 1,
                couplings.len()
            )));
        }
        if fields.iter().chain(&couplings).any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite entry".into()));
        }
        Ok(CouplingTable {
            fields,
            couplings,
            variant: None,
        })
    }

    pub(crate) fn generated(fields: Vec<f64>, couplings: Vec<f64>, variant: Variant) -> Self {
        CouplingTable {
            fields,
            couplings,
            variant: Some(variant),
        }
    }

    /// Chain length `N`; the chain has `N + 1` sites.
    pub fn n(&self) -> usize {
        self.fields.len() - 1
    }

    /// `B_0..B_N`.
    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// `J_1..J_N`; `couplings()[k]` is `J_{k+1}`.
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// `J_n` for `1 <= n <= N`.
    pub fn coupling(&self, n: usize) -> f64 {
        self.couplings[n - 1]
    }

    pub fn field(&self, n: usize) -> f64 {
        self.fields[n]
    }

    /// The family the table was generated from, if any.
    pub fn variant(&self) -> Option<Variant> {
        self.variant
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.fields, self.couplings)
    }

    /// Largest entrywise difference to another table of the same length.
    pub fn max_abs_diff(&self, other: &CouplingTable) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        self.fields
            .iter()
            .zip(&other.fields)
            .chain(self.couplings.iter().zip(&other.couplings))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Real symmetric tridiagonal matrix: `diag` on the diagonal, `off` on both
/// first off-diagonals.
///
/// Tables from the analytic families have strictly positive `off`;
/// deformed tables may have zero or negative entries (see
/// [`JacobiMatrix::is_jacobi`]).
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Table(format!(
                "tridiagonal matrix of order {} needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len().saturating_sub(1),
                off.len()
            )));
        }
        Ok(JacobiMatrix { diag, off })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Infinity norm, an upper bound on the spectral radius.
    pub fn norm(&self) -> f64 {
        (0..self.order())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |v| v.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// All off-diagonal entries strictly positive.
    pub fn is_jacobi(&self) -> bool {
        self.off.iter().all(|&v| v > 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.order();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &v) in self.off.iter().enumerate() {
            m[(i, i + 1)] = v;
            m[(i + 1, i)] = v;
        }
        m
    }

    /// Tridiagonal part of a dense symmetric matrix, plus the largest
    /// absolute entry outside the band.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<(Self, f64)> {
        let n = m.nrows();
        if n == 0 || m.ncols() != n {
            return Err(Error::Table("expected a non-empty square matrix".into()));
        }
        let diag = (0..n).map(|i| m[(i, i)]).collect();
        let off = (0..n - 1).map(|i| 0.5 * (m[(i, i + 1)] + m[(i + 1, i)])).collect();
        let mut residual = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                if i.abs_diff(k) > 1 {
                    residual = residual.max(m[(i, k)].abs());
                }
            }
        }
        Ok((JacobiMatrix { diag, off }, residual))
    }

    pub fn to_table(&self) -> CouplingTable {
        CouplingTable {
            fields: self.diag.clone(),
            couplings: self.off.clone(),
            variant: None,
        }
    }

    /// `max(max_n |J_n - J_{N+1-n}|, max_n |B_n - B_{N-n}|)`.
    pub fn persymmetry_deviation(&self) -> f64 {
        let d = self
            .diag
            .iter()
            .zip(self.diag.iter().rev())
            .map(|(x, y)| (x - y).abs());
        let o = self.off.iter().zip(self.off.iter().rev()).map(|(x, y)| (x - y).abs());
        d.chain(o).fold(0.0, f64::max)
    }
}

pub fn assemble_jacobi(table: &CouplingTable) -> JacobiMatrix {
    JacobiMatrix {
        diag: table.fields.clone(),
        off: table.couplings.clone(),
    }
}

/// Mirror symmetry about the anti-diagonal, `R M R = M`, within `tol`.
pub fn check_persymmetry(m: &JacobiMatrix, tol: f64) -> bool {
    m.persymmetry_deviation() <= tol
}

/// Square root of a product evaluated first, so a bad parameter range
/// surfaces as an error instead of NaN.
pub(crate) fn checked_sqrt(n: usize, radicand: f64) -> Result<f64> {
    if radicand > 0.0 && radicand.is_finite() {
        Ok(radicand.sqrt())
    } else {
        Err(Error::NegativeRadicand { n, value: radicand })
    }
}

fn require_variant(params: &ChainParams, expected: Variant) -> Result<()> {
    if params.variant() != expected {
        return Err(Error::WrongVariant {
            expected,
            got: params.variant(),
        });
    }
    Ok(())
}

/// Odd-`N` para-Racah chain (`alpha = 1/2`), `N = 2j + 1`.
pub fn couplings_odd(params: &ChainParams) -> Result<CouplingTable> {
    require_variant(params, Variant::OddN)?;
    let (a, c) = (params.a_f64(), params.c_f64());
    let big_n = params.n() as f64;
    let j = params.j();

    let fields = (0..=params.n())
        .map(|n| {
            let n = n as f64;
            0.5 * (a * (a + j) + c * (c + j) + n * (big_n - n))
        })
        .collect();

    let couplings = (1..=params.n())
        .map(|idx| {
            let n = idx as f64;
            let num = n
                * (big_n + 1.0 - n)
                * (big_n - n + a + c)
                * (n - 1.0 + a + c)
                * ((n - j - 1.0).powi(2) - (a - c).powi(2));
            let den = 4.0 * (big_n - 2.0 * n) * (big_n - 2.0 * n + 2.0);
            checked_sqrt(idx, num / den)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CouplingTable::generated(fields, couplings, Variant::OddN))
}

/// Even-`N` chain, `N = 2j`. The denominators `N - 2n + 1` and
/// `1 + 2n - N` are odd, hence never zero.
pub fn couplings_even(params: &ChainParams) -> Result<CouplingTable> {
    require_variant(params, Variant::EvenN)?;
    let (a, c) = (params.a_f64(), params.c_f64());
    let big_n = params.n() as f64;
    let j = params.j();
    let shift = 1.0 + 2.0 * a - 2.0 * c;

    let fields = (0..=params.n())
        .map(|n| {
            let n = n as f64;
            0.5 * (a * a + c * c + n - n * n)
                + 0.25 * (2.0 * n + a + c) * (big_n - 1.0)
                + (n + 1.0) * (n + a + c) * shift / (4.0 * (1.0 + 2.0 * n - big_n))
                + n * (n - 1.0 + a + c) * shift / (4.0 * (1.0 - 2.0 * n + big_n))
        })
        .collect();

    let couplings = (1..=params.n())
        .map(|idx| {
            let n = idx as f64;
            let num = n
                * (big_n + 1.0 - n)
                * (n - 1.0 + a + c)
                * (big_n - n + a + c)
                * (n - j + a - c)
                * (n - j + c - a - 1.0);
            let den = 4.0 * (big_n - 2.0 * n + 1.0).powi(2);
            checked_sqrt(idx, num / den)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CouplingTable::generated(fields, couplings, Variant::EvenN))
}

/// Dual-Hahn chain, `c = a + 1/2`, any `N >= 1`.
///
/// Fields come from substituting `c = a + 1/2` into the odd-`N` expression
/// with `j = (N - 1) / 2`; the same expression also matches the even-`N`
/// family at `c = a + 1/2`.
pub fn couplings_dual_hahn(params: &ChainParams) -> Result<CouplingTable> {
    require_variant(params, Variant::DualHahn)?;
    let a = params.a_f64();
    let c = a + 0.5;
    let big_n = params.n() as f64;
    let j = params.j();

    let fields = (0..=params.n())
        .map(|n| {
            let n = n as f64;
            0.5 * (a * (a + j) + c * (c + j) + n * (big_n - n))
        })
        .collect();

    let couplings = (1..=params.n())
        .map(|idx| {
            let n = idx as f64;
            let num = n * (n + 2.0 * a - 0.5) * (big_n - n + 2.0 * a + 0.5) * (big_n + 1.0 - n);
            checked_sqrt(idx, num / 16.0)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CouplingTable::generated(fields, couplings, Variant::DualHahn))
}

/// Dispatches on the variant.
pub fn couplings(params: &ChainParams) -> Result<CouplingTable> {
    match params.variant() {
        Variant::OddN => couplings_odd(params),
        Variant::EvenN => couplings_even(params),
        Variant::DualHahn => couplings_dual_hahn(params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{validate_params, Rational};
    use approx::assert_relative_eq;

    fn params(a: (i64, i64), c: (i64, i64), n: usize, v: Variant) -> ChainParams {
        validate_params(Rational::new(a.0, a.1), Rational::new(c.0, c.1), n, v).unwrap()
    }

    fn reference(n: usize) -> CouplingTable {
        let v = if n % 2 == 1 { Variant::OddN } else { Variant::EvenN };
        couplings(&params((7, 6), (4, 3), n, v)).unwrap()
    }

    /// Sum of the bi-lattice points, enumerated directly.
    fn lattice_sum(a: f64, c: f64, n: usize) -> f64 {
        let even_count = n / 2 + 1;
        let odd_count = (n + 1) / 2;
        (0..even_count).map(|s| (s as f64 + a).powi(2)).sum::<f64>()
            + (0..odd_count).map(|s| (s as f64 + c).powi(2)).sum::<f64>()
    }

    #[test]
    fn odd_first_field() {
        let t = reference(5);
        assert_relative_eq!(t.field(0), 293.0 / 72.0, epsilon = 1e-13);
        assert_relative_eq!(t.fields().iter().sum::<f64>(), 1239.0 / 36.0, epsilon = 1e-12);
    }

    #[test]
    fn odd_is_persymmetric() {
        let t = reference(5);
        assert_relative_eq!(t.coupling(1), t.coupling(5), epsilon = 1e-13);
        assert_relative_eq!(t.coupling(2), t.coupling(4), epsilon = 1e-13);
        assert!(check_persymmetry(&assemble_jacobi(&t), 1e-12));
    }

    /// The coupling profile is not smooth in the middle: the two bonds next
    /// to the central one are the strongest, the central bond itself is a
    /// local dip.
    #[test]
    fn odd_profile_has_mid_chain_feature() {
        for n in [5usize, 7, 9, 11, 21] {
            let t = reference(n);
            let mid = (n + 1) / 2;
            let max = t.couplings().iter().cloned().fold(f64::MIN, f64::max);
            assert_relative_eq!(t.coupling(mid - 1), max, epsilon = 1e-12);
            assert_relative_eq!(t.coupling(mid + 1), max, epsilon = 1e-12);
            assert!(t.coupling(mid) < t.coupling(mid - 1));
        }
    }

    #[test]
    fn even_is_persymmetric_with_central_bump() {
        for n in [6usize, 8, 10] {
            let t = reference(n);
            assert!(check_persymmetry(&assemble_jacobi(&t), 1e-12));
            // fields peak at the central site
            let mid = n / 2;
            let max = t.fields().iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(t.field(mid), max);
            // couplings peak off-centre, not at the ends
            let jmax = t.couplings().iter().cloned().fold(f64::MIN, f64::max);
            assert!(t.coupling(1) < jmax && t.coupling(mid) < jmax);
        }
    }

    #[test]
    fn trace_identity_all_variants() {
        for n in [5usize, 6, 7, 8, 9, 12, 31] {
            let t = reference(n);
            let want = lattice_sum(7.0 / 6.0, 4.0 / 3.0, n);
            assert_relative_eq!(t.fields().iter().sum::<f64>(), want, max_relative = 1e-10);
        }
        for n in [1usize, 2, 5, 6, 9] {
            let t = couplings(&params((1, 4), (3, 4), n, Variant::DualHahn)).unwrap();
            let want: f64 = (0..=n).map(|s| (s as f64 / 2.0 + 0.25).powi(2)).sum();
            assert_relative_eq!(t.fields().iter().sum::<f64>(), want, max_relative = 1e-10);
        }
    }

    #[test]
    fn dual_hahn_agrees_with_both_families() {
        for a in [(0, 1), (1, 4), (1, 1)] {
            let c = (2 * a.0 + a.1, 2 * a.1);
            for n in [5usize, 6, 9] {
                let dh = couplings(&params(a, c, n, Variant::DualHahn)).unwrap();
                let v = if n % 2 == 1 { Variant::OddN } else { Variant::EvenN };
                let family = couplings(&params(a, c, n, v)).unwrap();
                assert!(dh.max_abs_diff(&family) <= 1e-12, "a={a:?} n={n}");
                assert_relative_eq!(dh.coupling(1), dh.coupling(n), epsilon = 1e-13);
            }
        }
    }

    /// The printed closed form for the dual-Hahn fields,
    /// `B_n = N + 4N(a + n) + a^2 - n^2/2`, breaks the trace identity while
    /// the substituted form satisfies it.
    #[test]
    fn printed_dual_hahn_fields_are_inconsistent() {
        let printed = |a: f64, big_n: usize, n: usize| {
            let (big_n, n) = (big_n as f64, n as f64);
            big_n + 4.0 * big_n * (a + n) + a * a - n * n / 2.0
        };
        for (a, n) in [(0.0, 5usize), (0.25, 6), (1.0, 9)] {
            let p = validate_params(
                Rational::approximate_float(a).unwrap(),
                Rational::approximate_float(a + 0.5).unwrap(),
                n,
                Variant::DualHahn,
            )
            .unwrap();
            let t = couplings(&p).unwrap();
            let lattice: f64 = (0..=n).map(|s| (s as f64 / 2.0 + a).powi(2)).sum();
            let printed_trace: f64 = (0..=n).map(|k| printed(a, n, k)).sum();
            assert_relative_eq!(t.fields().iter().sum::<f64>(), lattice, max_relative = 1e-12);
            assert!((printed_trace - lattice).abs() > 1.0);
        }
    }

    #[test]
    fn wrong_variant_is_rejected() {
        let p = params((7, 6), (4, 3), 5, Variant::OddN);
        assert!(matches!(couplings_even(&p), Err(Error::WrongVariant { .. })));
        assert!(matches!(couplings_dual_hahn(&p), Err(Error::WrongVariant { .. })));
    }

    #[test]
    fn assemble_two_site() {
        let t = CouplingTable::new(vec![1.5, -0.5], vec![2.0]).unwrap();
        let m = assemble_jacobi(&t).to_dense();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.5, 2.0, 2.0, -0.5]));
    }

    #[test]
    fn assembled_matrix_commutes_with_reversal() {
        let m = assemble_jacobi(&reference(5)).to_dense();
        let n = m.nrows();
        let r = DMatrix::from_fn(n, n, |i, k| if i + k == n - 1 { 1.0 } else { 0.0 });
        assert!((&r * &m * &r - &m).amax() <= 1e-12);
        assert_relative_eq!(m.trace(), 1239.0 / 36.0, epsilon = 1e-12);
    }

    #[test]
    fn table_shape_checks() {
        assert!(CouplingTable::new(vec![], vec![]).is_err());
        assert!(CouplingTable::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(CouplingTable::new(vec![1.0, f64::NAN], vec![1.0]).is_err());
        assert!(JacobiMatrix::new(vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn persymmetry_detects_asymmetry() {
        let t = CouplingTable::new(vec![1.0, 2.0, 1.0], vec![1.0, 1.0 + 1e-6]).unwrap();
        let m = assemble_jacobi(&t);
        assert!(!check_persymmetry(&m, 1e-8));
        assert!(check_persymmetry(&m, 1e-5));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::params::{validate_params, Rational};
    use num_traits::Signed;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn couplings_positive_in_range(an in -49i64..200, cn in 1i64..100, k in 0usize..20) {
            // a in (-1/2, 2), c strictly between |a| and |a + 1|
            let a = Rational::new(an, 100);
            let lo = a.abs();
            let hi = (a + Rational::from_integer(1)).abs();
            let c = lo + (hi - lo) * Rational::new(cn, 101);
            let odd = 2 * k + 1;
            let even = 2 * k + 2;
            if let Ok(p) = validate_params(a, c, odd, Variant::OddN) {
                let t = couplings(&p).unwrap();
                prop_assert!(t.couplings().iter().all(|&v| v > 0.0));
                prop_assert!(assemble_jacobi(&t).persymmetry_deviation() <= 1e-13 * assemble_jacobi(&t).norm());
            }
            if let Ok(p) = validate_params(a, c, even, Variant::EvenN) {
                let t = couplings(&p).unwrap();
                prop_assert!(t.couplings().iter().all(|&v| v > 0.0));
                prop_assert!(assemble_jacobi(&t).persymmetry_deviation() <= 1e-13 * assemble_jacobi(&t).norm());
            }
        }
    }
}

//! Spectra of chain matrices and the orthonormal polynomials attached to a
//! coupling table.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::{CouplingTable, JacobiMatrix};
use crate::error::{Error, Result};
use crate::params::{to_f64, ChainParams, Rational, Variant};

/// Which family of squares a spectral point belongs to: `(s + a)^2` or
/// `(s + c)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sublattice {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "c")]
    C,
}

/// Sorted spectral points with their sublattice labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub sublattice: Vec<Sublattice>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest gap between consecutive points.
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the labels alternate `a, c, a, c, ...`.
    pub fn alternates(&self) -> bool {
        self.sublattice
            .iter()
            .enumerate()
            .all(|(i, &l)| l == if i % 2 == 0 { Sublattice::A } else { Sublattice::C })
    }
}

/// The quadratic (bi-)lattice on which the chain's polynomials are
/// orthogonal.
///
/// * odd `N = 2j + 1`: `(s + a)^2` and `(s + c)^2` for `s = 0..=j`
/// * even `N = 2j`: `(s + a)^2` for `s = 0..=j`, `(s + c)^2` for `s < j`
/// * dual-Hahn: `(s/2 + a)^2` for `s = 0..=N`
///
/// Points are ordered exactly in rational arithmetic. For valid parameters
/// the two families never coincide (`0 < c - a < 1`).
pub fn bilattice(params: &ChainParams) -> Spectrum {
    let n = params.n();
    let (a, c) = (params.a(), params.c());
    let mut points: Vec<(Rational, Sublattice)> = match params.variant() {
        Variant::DualHahn => (0..=n)
            .map(|s| {
                let x = Rational::new(s as i64, 2) + a;
                let label = if s % 2 == 0 { Sublattice::A } else { Sublattice::C };
                (x * x, label)
            })
            .collect(),
        Variant::OddN | Variant::EvenN => {
            let a_count = n / 2 + 1;
            let c_count = (n + 1) / 2;
            let sq = |s: usize, off: Rational| {
                let x = Rational::from_integer(s as i64) + off;
                x * x
            };
            (0..a_count)
                .map(|s| (sq(s, a), Sublattice::A))
                .chain((0..c_count).map(|s| (sq(s, c), Sublattice::C)))
                .collect()
        }
    };
    points.sort_by(|x, y| x.0.cmp(&y.0));
    Spectrum {
        values: points.iter().map(|p| to_f64(p.0)).collect(),
        sublattice: points.iter().map(|p| p.1).collect(),
    }
}

/// Full eigendecomposition of a symmetric tridiagonal matrix.
///
/// Column `s` of `eigenvectors` belongs to `eigenvalues[s]`; eigenvalues are
/// ascending and each eigenvector's first significant component is
/// positive, so that column `s` equals `sqrt(w_s) chi_n(x_s)`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub weights: Vec<f64>,
}

impl EigenSystem {
    /// `max_s ||M v_s - x_s v_s||`.
    pub fn max_residual(&self, m: &JacobiMatrix) -> f64 {
        let dense = m.to_dense();
        (0..self.eigenvalues.len())
            .map(|s| {
                let v = self.eigenvectors.column(s);
                (&dense * v - v * self.eigenvalues[s]).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.eigenvalues
    }
}

const MAX_SWEEPS: usize = 60;
// components below this are treated as zero when fixing eigenvector signs
const SIGN_FLOOR: f64 = 1e-9;

/// Implicit-shift QL iteration on the tridiagonal matrix, accumulating the
/// rotations into the eigenvector matrix.
pub fn eigensystem(m: &JacobiMatrix) -> Result<EigenSystem> {
    let n = m.order();
    let mut d = m.diag().to_vec();
    let mut e = m.off().to_vec();
    e.push(0.0);
    let mut z = DMatrix::<f64>::identity(n, n);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut split = l;
            while split + 1 < n {
                let scale = d[split].abs() + d[split + 1].abs();
                if e[split].abs() <= f64::EPSILON * scale {
                    break;
                }
                split += 1;
            }
            if split == l {
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::ConvergenceFailure {
                    index: l,
                    iterations: sweeps,
                });
            }
            sweeps += 1;

            // Wilkinson-style shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let r = g.hypot(1.0);
            g = d[split] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut deflated = false;
            for i in (l..split).rev() {
                let f = s * e[i];
                let b = c * e[i];
                let r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[split] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
                for k in 0..n {
                    let zk1 = z[(k, i + 1)];
                    let zk = z[(k, i)];
                    z[(k, i + 1)] = s * zk + c * zk1;
                    z[(k, i)] = c * zk - s * zk1;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[split] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let v = z.column(src);
        let sign = v
            .iter()
            .find(|x| x.abs() > SIGN_FLOOR)
            .map_or(1.0, |x| x.signum());
        eigenvectors.set_column(col, &(v * sign));
    }
    let weights = (0..n).map(|s| eigenvectors[(0, s)].powi(2)).collect();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        weights,
    })
}

/// `chi_0(x) ..= chi_upto(x)` from the three-term recurrence
/// `x chi_n = J_{n+1} chi_{n+1} + B_n chi_n + J_n chi_{n-1}`,
/// `chi_{-1} = 0`, `chi_0 = 1`. `upto` is clamped to `N`.
pub fn eval_orthonormal(table: &CouplingTable, x: f64, upto: usize) -> Vec<f64> {
    let upto = upto.min(table.n());
    let mut out = Vec::with_capacity(upto + 1);
    out.push(1.0);
    let mut prev = 0.0;
    let mut cur = 1.0;
    for n in 0..upto {
        let back = if n == 0 { 0.0 } else { table.coupling(n) };
        let next = ((x - table.field(n)) * cur - back * prev) / table.coupling(n + 1);
        out.push(next);
        prev = cur;
        cur = next;
    }
    out
}

/// `max_s |chi_N(x_s) - (-1)^(N+s)|` over sorted spectral points.
pub fn mirror_deviation(table: &CouplingTable, values: &[f64]) -> f64 {
    let n = table.n();
    values
        .iter()
        .enumerate()
        .map(|(s, &x)| {
            let chi = *eval_orthonormal(table, x, n).last().unwrap_or(&f64::NAN);
            let want = if (n + s) % 2 == 0 { 1.0 } else { -1.0 };
            let dev = (chi - want).abs();
            if dev.is_nan() {
                f64::INFINITY
            } else {
                dev
            }
        })
        .fold(0.0, f64::max)
}

/// Whether `chi_N(x_s) = (-1)^(N+s)` holds within `tol` at every point,
/// which characterises persymmetric tables.
pub fn mirror_signature(table: &CouplingTable, values: &[f64], tol: f64) -> bool {
    values.len() == table.n() + 1 && mirror_deviation(table, values) <= tol
}

//! Isospectral deformation `J~ = V J V` by the involution `V(sigma)`.
//!
//! `V` has `sin sigma` on the upper half of the diagonal, `-sin sigma` on
//! the lower half, `cos sigma` on the anti-diagonal and, for even `N`, a
//! fixed 1 at the centre.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{assemble_jacobi, CouplingTable, JacobiMatrix};
use crate::error::{Error, Result};
use crate::params::Parity;

/// Default persymmetry tolerance for [`conjugate`].
pub const PERSYMMETRY_TOL: f64 = 1e-10;

/// Deformation angle with the para-Racah `alpha` it corresponds to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationAngle {
    pub sigma: f64,
    pub alpha: f64,
    pub parity: Parity,
}

impl DeformationAngle {
    pub fn from_sigma(sigma: f64, parity: Parity) -> Self {
        DeformationAngle {
            sigma,
            alpha: alpha_from_sigma(sigma, parity),
            parity,
        }
    }

    pub fn from_alpha(alpha: f64, parity: Parity) -> Result<Self> {
        Ok(DeformationAngle {
            sigma: sigma_from_alpha(alpha, parity)?,
            alpha,
            parity,
        })
    }
}

/// Principal-branch inverse of `sin 2 sigma = 1 - 2 alpha` (odd `N`) and
/// `sin sigma = (sqrt(alpha) - sqrt(1 - alpha)) / sqrt 2` (even `N`);
/// `sigma` lands in `[-pi/4, pi/4]`.
pub fn sigma_from_alpha(alpha: f64, parity: Parity) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            value: alpha,
            range: "[0, 1]",
        });
    }
    Ok(match parity {
        Parity::OddN => 0.5 * (1.0 - 2.0 * alpha).asin(),
        Parity::EvenN => ((alpha.sqrt() - (1.0 - alpha).sqrt()) / std::f64::consts::SQRT_2).asin(),
    })
}

/// Forward map. The even relation reduces to `alpha = (1 + sin 2 sigma) / 2`
/// on the principal branch.
pub fn alpha_from_sigma(sigma: f64, parity: Parity) -> f64 {
    match parity {
        Parity::OddN => 0.5 * (1.0 - (2.0 * sigma).sin()),
        Parity::EvenN => 0.5 * (1.0 + (2.0 * sigma).sin()),
    }
}

/// `V(sigma)` of order `n + 1`.
pub fn deformation_matrix(n: usize, sigma: f64) -> DMatrix<f64> {
    let order = n + 1;
    let (s, c) = sigma.sin_cos();
    let mut v = DMatrix::zeros(order, order);
    for i in 0..order {
        let mirror = order - 1 - i;
        if i == mirror {
            v[(i, i)] = 1.0;
        } else {
            v[(i, i)] = if i < mirror { s } else { -s };
            v[(i, mirror)] = c;
        }
    }
    v
}

/// `max |V^2 - I|`.
pub fn involution_defect(n: usize, sigma: f64) -> f64 {
    let v = deformation_matrix(n, sigma);
    (&v * &v - DMatrix::<f64>::identity(n + 1, n + 1)).amax()
}

/// Reversal matrix `R`.
pub fn reversal(order: usize) -> DMatrix<f64> {
    DMatrix::from_fn(order, order, |i, k| if i + k + 1 == order { 1.0 } else { 0.0 })
}

/// `V J V` as a dense matrix, without the persymmetry check.
pub fn conjugate_dense(m: &DMatrix<f64>, sigma: f64) -> DMatrix<f64> {
    let v = deformation_matrix(m.nrows() - 1, sigma);
    &v * m * &v
}

/// `V J V` together with the largest entry outside the tridiagonal band.
pub fn conjugate_with_residual(m: &JacobiMatrix, sigma: f64) -> Result<(JacobiMatrix, f64)> {
    let deviation = m.persymmetry_deviation();
    if deviation > PERSYMMETRY_TOL * (1.0 + m.norm()) {
        return Err(Error::NotPersymmetric { deviation });
    }
    JacobiMatrix::from_dense(&conjugate_dense(&m.to_dense(), sigma))
}

/// `V J V` for a persymmetric `J`.
pub fn conjugate(m: &JacobiMatrix, sigma: f64) -> Result<JacobiMatrix> {
    Ok(conjugate_with_residual(m, sigma)?.0)
}

/// `max |J~ - Q J~ Q|` with `Q = V R V`.
pub fn q_symmetry_defect(deformed: &JacobiMatrix, sigma: f64) -> f64 {
    let order = deformed.order();
    let v = deformation_matrix(order - 1, sigma);
    let q = &v * reversal(order) * &v;
    let d = deformed.to_dense();
    (&d - &q * &d * &q).amax()
}

/// Closed-form entries of `V J V` for a persymmetric table.
///
/// Odd `N`: `J~_{(N+1)/2} = J cos 2 sigma`,
/// `B~_{(N-+1)/2} = B_{(N-1)/2} +- J_{(N+1)/2} sin 2 sigma`.
/// Even `N`: `J~_{N/2} = J_{N/2} (cos sigma + sin sigma)`,
/// `J~_{N/2+1} = J_{N/2} (cos sigma - sin sigma)`.
pub fn deformed_entries(table: &CouplingTable, sigma: f64) -> Result<CouplingTable> {
    let n = table.n();
    let (mut fields, mut couplings) = table.clone().into_parts();
    let (s, c) = sigma.sin_cos();
    if n == 0 {
        return CouplingTable::new(fields, couplings);
    }
    if n % 2 == 1 {
        let mid = (n + 1) / 2;
        let j = table.coupling(mid);
        couplings[mid - 1] = j * (2.0 * sigma).cos();
        fields[mid - 1] = table.field(mid - 1) + j * (2.0 * sigma).sin();
        fields[mid] = table.field(mid) - j * (2.0 * sigma).sin();
    } else {
        let mid = n / 2;
        couplings[mid - 1] = table.coupling(mid) * (c + s);
        couplings[mid] = table.coupling(mid + 1) * (c - s);
    }
    CouplingTable::new(fields, couplings)
}

/// Deformed revival amplitudes
/// `xi = e^{i phi} (sin 2 theta + 2 i cos 2 theta cos sigma sin sigma)`,
/// `eta = i e^{i phi} cos 2 theta (cos^2 sigma - sin^2 sigma)`.
pub fn predicted_amplitudes(theta: f64, sigma: f64, phi: f64) -> (Complex64, Complex64) {
    let g = Complex64::from_polar(1.0, phi);
    let (s2, c2) = (2.0 * theta).sin_cos();
    let (ss, cs) = sigma.sin_cos();
    let xi = g * Complex64::new(s2, 2.0 * c2 * cs * ss);
    let eta = Complex64::i() * g * (c2 * (cs * cs - ss * ss));
    (xi, eta)
}

/// Deformed table built from an undeformed one, checked against the full
/// conjugation. Returns the table and the residual
/// `max(off-band of V J V, |closed form - band of V J V|)`.
pub fn deform_checked(table: &CouplingTable, sigma: f64) -> Result<(CouplingTable, f64)> {
    let (band, off_band) = conjugate_with_residual(&assemble_jacobi(table), sigma)?;
    let closed = deformed_entries(table, sigma)?;
    Ok((closed.clone(), off_band.max(closed.max_abs_diff(&band.to_table()))))
}

//! Spectral surgery: removing the largest eigenvalue of an odd chain.
//!
//! The result keeps mirror symmetry and is the even chain of length
//! `N - 1` with the same `(a, c)`.

use serde::{Deserialize, Serialize};

use crate::chain::{checked_sqrt, couplings_odd, CouplingTable};
use crate::error::{Error, Result};
use crate::params::{ChainParams, Variant};

/// `A_0..A_N`; the last entry is always 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryRatios {
    pub values: Vec<f64>,
}

impl SurgeryRatios {
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }
}

fn odd_params(params: &ChainParams) -> Result<ChainParams> {
    match params.variant() {
        Variant::OddN => Ok(params.clone()),
        Variant::DualHahn if params.n() % 2 == 1 => params.with_variant(Variant::OddN),
        _ => Err(Error::DivisionByZero { n: params.n() / 2 }),
    }
}

/// `A_n = (N-n)(n-j+a-c)(N-n-1+a+c) / (2(2n-N))` for odd `N`.
pub fn surgery_ratios(params: &ChainParams) -> Result<SurgeryRatios> {
    let params = odd_params(params)?;
    let (a, c) = (params.a_f64(), params.c_f64());
    let big_n = params.n() as f64;
    let j = params.j();
    let values = (0..=params.n())
        .map(|n| {
            let n = n as f64;
            (big_n - n) * (n - j + a - c) * (big_n - n - 1.0 + a + c) / (2.0 * (2.0 * n - big_n))
        })
        .collect();
    Ok(SurgeryRatios { values })
}

/// Removes the top level `x_N` from the odd chain of `params`:
/// `B^_n = B_{n+1} + A_{n+1} - A_n`, `J^_n = J_n (A_n / A_{n-1})^{1/2}`.
pub fn remove_top_level(params: &ChainParams) -> Result<CouplingTable> {
    let params = odd_params(params)?;
    let table = couplings_odd(&params)?;
    let ratios = surgery_ratios(&params)?;
    let a = &ratios.values;
    let n = params.n();

    let fields = (0..n)
        .map(|k| table.field(k + 1) + a[k + 1] - a[k])
        .collect();
    let couplings = (1..n)
        .map(|k| {
            if a[k - 1] == 0.0 {
                return Err(Error::DivisionByZero { n: k });
            }
            Ok(table.coupling(k) * checked_sqrt(k, a[k] / a[k - 1])?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CouplingTable::generated(fields, couplings, Variant::EvenN))
}

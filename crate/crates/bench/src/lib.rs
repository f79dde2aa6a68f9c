//! Fixtures shared by the criterion benches.

use fracrev::chain::{assemble_jacobi, couplings};
use fracrev::{ChainParams, JacobiMatrix, Rational};

/// The `a = 7/6, c = 4/3` chain of length `n`.
pub fn reference_matrix(n: usize) -> JacobiMatrix {
    let p = ChainParams::for_length(Rational::new(7, 6), Rational::new(4, 3), n)
        .expect("reference parameters are valid for every length");
    assemble_jacobi(&couplings(&p).expect("reference couplings are real"))
}

//! Chain parameters and the integer search for fractional-revival models.
//!
//! A chain is fixed by two bi-lattice offsets `a`, `c`, the length `N`
//! (`N + 1` sites) and a [`Variant`]. Fractional revival at time `T` needs
//!
//! ```text
//! T = pi * alpha1,  a = beta1 / (2 alpha1),  c = beta2 / (2 alpha1),
//! (beta2 - beta1)(beta2 + beta1) / 4 = [2 (gamma2 - gamma1) - 1 + 4 theta / pi] * alpha1
//! ```
//!
//! with `alpha1, beta1, beta2` integers of equal parity. Everything here is
//! exact rational arithmetic; floats only appear in the `f64` accessors.

use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Which closed-form family a chain belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    OddN,
    EvenN,
    /// `c = a + 1/2`; the bi-lattice collapses to a single quadratic lattice.
    DualHahn,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::OddN => "odd-n",
            Variant::EvenN => "even-n",
            Variant::DualHahn => "dual-hahn",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    OddN,
    EvenN,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 1 {
            Parity::OddN
        } else {
            Parity::EvenN
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::OddN => "odd-n",
            Parity::EvenN => "even-n",
        })
    }
}

/// A validated `(a, c, N, variant)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainParams {
    a: Rational,
    c: Rational,
    n: usize,
    variant: Variant,
}

/// Smallest `N` for which the fractional-revival classification is complete
/// (`j > 1` for odd chains, `j > 2` for even chains).
pub const MIN_CLASSIFIED_ODD_N: usize = 5;
pub const MIN_CLASSIFIED_EVEN_N: usize = 6;

pub fn validate_params(a: Rational, c: Rational, n: usize, variant: Variant) -> Result<ChainParams> {
    if n == 0 {
        return Err(Error::RangeViolation("N must be at least 1".into()));
    }
    let half = Rational::new(1, 2);
    if a <= -half {
        return Err(Error::RangeViolation(format!("a = {a} must exceed -1/2")));
    }
    if c <= a.abs() {
        return Err(Error::RangeViolation(format!("c = {c} must exceed |a| = {}", a.abs())));
    }
    let upper = (a + Rational::from_integer(1)).abs();
    if c >= upper {
        return Err(Error::RangeViolation(format!("c = {c} must be below |a + 1| = {upper}")));
    }
    match variant {
        Variant::OddN if n % 2 == 0 => {
            return Err(Error::ParityMismatch {
                variant,
                expected: "odd",
                n,
            })
        }
        Variant::EvenN if n % 2 == 1 => {
            return Err(Error::ParityMismatch {
                variant,
                expected: "even",
                n,
            })
        }
        Variant::DualHahn if c != a + half => {
            return Err(Error::RangeViolation(format!(
                "dual-Hahn chains need c = a + 1/2, got a = {a}, c = {c}"
            )))
        }
        _ => {}
    }
    Ok(ChainParams { a, c, n, variant })
}

impl ChainParams {
    pub fn new(a: Rational, c: Rational, n: usize, variant: Variant) -> Result<Self> {
        validate_params(a, c, n, variant)
    }

    /// Picks `OddN` or `EvenN` from the parity of `n`.
    pub fn for_length(a: Rational, c: Rational, n: usize) -> Result<Self> {
        let variant = match Parity::of(n) {
            Parity::OddN => Variant::OddN,
            Parity::EvenN => Variant::EvenN,
        };
        validate_params(a, c, n, variant)
    }

    pub fn a(&self) -> Rational {
        self.a
    }

    pub fn c(&self) -> Rational {
        self.c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n)
    }

    pub fn a_f64(&self) -> f64 {
        to_f64(self.a)
    }

    pub fn c_f64(&self) -> f64 {
        to_f64(self.c)
    }

    /// Half-length `j`: `N = 2j + 1` for odd chains, `N = 2j` for even
    /// ones. Dual-Hahn chains always use `(N - 1) / 2`, which is a
    /// half-integer when `N` is even.
    pub fn j(&self) -> f64 {
        match self.variant {
            Variant::OddN | Variant::DualHahn => (self.n as f64 - 1.0) / 2.0,
            Variant::EvenN => (self.n / 2) as f64,
        }
    }

    /// Same `(a, c, N)` with another variant, re-validated.
    pub fn with_variant(&self, variant: Variant) -> Result<Self> {
        validate_params(self.a, self.c, self.n, variant)
    }

    pub fn with_length(&self, n: usize) -> Result<Self> {
        validate_params(self.a, self.c, n, self.variant)
    }

    /// Errors with [`Error::TooSmall`] when `N` is below the size for which
    /// the integer classification of FR models is complete.
    pub fn require_classifiable(&self) -> Result<()> {
        let min = match self.parity() {
            Parity::OddN => MIN_CLASSIFIED_ODD_N,
            Parity::EvenN => MIN_CLASSIFIED_EVEN_N,
        };
        if self.n < min {
            return Err(Error::TooSmall {
                variant: self.variant,
                n: self.n,
                min,
            });
        }
        Ok(())
    }
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("{s:?} is not a rational p/q: {e}")))
}

/// Formats as `"p/q"` with `q >= 1`, even for integers.
pub fn format_rational(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// An integer solution of the FR condition together with the model it
/// defines.
///
/// `theta` stores `4 theta / pi = p / q` in lowest terms, normalised to
/// `[0, 2)`, i.e. the FR angle itself lies in `[0, pi/2)`. `gamma1` is
/// always 0, so `gamma2` is the difference `gamma2 - gamma1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrSolution {
    pub alpha1: i64,
    pub beta1: i64,
    pub beta2: i64,
    pub gamma1: i64,
    pub gamma2: i64,
    pub a: Rational,
    pub c: Rational,
    pub theta: Rational,
    /// Global phase divided by pi, reduced to `[0, 2)`.
    pub phi_over_pi: Rational,
    pub pst_multiple: Option<u32>,
}

impl FrSolution {
    /// Builds the solution attached to `(alpha1, beta1, beta2)`.
    ///
    /// For fixed betas the difference `gamma2 - gamma1` and the angle are
    /// unique once theta is restricted to `[0, pi/2)`.
    pub fn from_betas(alpha1: i64, beta1: i64, beta2: i64) -> Result<Self> {
        if alpha1 < 1 {
            return Err(Error::RangeViolation(format!("alpha1 = {alpha1} must be positive")));
        }
        if alpha1.is_even() != beta1.is_even() || alpha1.is_even() != beta2.is_even() {
            return Err(Error::RangeViolation(format!(
                "alpha1, beta1, beta2 = {alpha1}, {beta1}, {beta2} must share parity"
            )));
        }
        if !beta_window_ok(alpha1, beta1, beta2) {
            return Err(Error::RangeViolation(format!(
                "betas ({beta1}, {beta2}) outside the window for alpha1 = {alpha1}"
            )));
        }
        let lhs = Rational::new((beta2 - beta1) * (beta2 + beta1), 4);
        // lhs / alpha1 + 1 = 2 dgamma + 4 theta / pi
        let r = lhs / Rational::from_integer(alpha1) + Rational::from_integer(1);
        let dgamma = (r / Rational::from_integer(2)).floor().to_integer();
        let theta = r - Rational::from_integer(2 * dgamma);
        let phi_over_pi = reduce_mod2(
            Rational::from_integer(dgamma) - Rational::new(beta1 * beta1 + beta2 * beta2, 8 * alpha1),
        );
        let sol = FrSolution {
            alpha1,
            beta1,
            beta2,
            gamma1: 0,
            gamma2: dgamma,
            a: Rational::new(beta1, 2 * alpha1),
            c: Rational::new(beta2, 2 * alpha1),
            theta,
            phi_over_pi,
            pst_multiple: pst_schedule(theta),
        };
        debug_assert!(sol.satisfies_condition());
        Ok(sol)
    }

    pub fn dgamma(&self) -> i64 {
        self.gamma2 - self.gamma1
    }

    /// Revival time `pi * alpha1`.
    pub fn t(&self) -> f64 {
        PI * self.alpha1 as f64
    }

    pub fn theta_radians(&self) -> f64 {
        PI * to_f64(self.theta) / 4.0
    }

    pub fn phi(&self) -> f64 {
        PI * to_f64(self.phi_over_pi)
    }

    /// FR angle realised by a chain of the given parity.
    ///
    /// Even chains carry the opposite sign of `chi_N` on the spectrum, which
    /// flips `eta`; with the same global phase the angle becomes
    /// `pi/2 - theta`.
    pub fn fr_angle(&self, parity: Parity) -> f64 {
        match parity {
            Parity::OddN => self.theta_radians(),
            Parity::EvenN => PI / 2.0 - self.theta_radians(),
        }
    }

    /// Exact check of the FR condition and the solution invariants.
    pub fn satisfies_condition(&self) -> bool {
        let lhs = Rational::new((self.beta2 - self.beta1) * (self.beta1 + self.beta2), 4);
        let rhs = (Rational::from_integer(2 * self.dgamma() - 1) + self.theta)
            * Rational::from_integer(self.alpha1);
        let parity = self.alpha1.is_even() == self.beta1.is_even()
            && self.alpha1.is_even() == self.beta2.is_even();
        let q_divides = self.alpha1 % self.theta.denom() == 0;
        lhs == rhs
            && parity
            && q_divides
            && beta_window_ok(self.alpha1, self.beta1, self.beta2)
            && self.a == Rational::new(self.beta1, 2 * self.alpha1)
            && self.c == Rational::new(self.beta2, 2 * self.alpha1)
    }

    /// Chain parameters for this solution at length `n`.
    pub fn chain_params(&self, n: usize) -> Result<ChainParams> {
        ChainParams::for_length(self.a, self.c, n)
    }
}

fn beta_window_ok(alpha1: i64, beta1: i64, beta2: i64) -> bool {
    beta1 > -alpha1 && beta1.abs() < beta2 && beta2 < (beta1 + 2 * alpha1).abs()
}

fn reduce_mod2(r: Rational) -> Rational {
    let two = Rational::from_integer(2);
    let k = (r / two).floor();
    r - k * two
}

/// Returns `q` when PST follows FR at time `q T`, `None` otherwise.
///
/// `theta` is `p/q = 4 theta / pi` in lowest terms (`Ratio` keeps it
/// reduced). `p = 0` means the revival at `T` is already a transfer.
pub fn pst_schedule(theta: Rational) -> Option<u32> {
    let p = *theta.numer();
    let q = *theta.denom();
    if p == 0 {
        return Some(1);
    }
    if q.is_even() || p.is_even() {
        u32::try_from(q).ok()
    } else {
        None
    }
}

/// Every FR solution with `alpha1 <= alpha1_max`, using the default
/// `beta1 <= 8 alpha1` window.
pub fn solve_diophantine(alpha1_max: u32) -> Vec<FrSolution> {
    solve_diophantine_with(alpha1_max, None)
}

/// Every FR solution with `alpha1 <= alpha1_max` and `beta1` in
/// `(-alpha1, beta1_max]`. Without `beta1_max` the bound is `8 alpha1`.
///
/// The `beta2` range is finite for each `beta1`, and each `(alpha1, beta1,
/// beta2)` yields exactly one normalised solution, so the output is
/// duplicate-free. Sorted by `(alpha1, beta1, beta2)`.
pub fn solve_diophantine_with(alpha1_max: u32, beta1_max: Option<i64>) -> Vec<FrSolution> {
    let mut out = Vec::new();
    for alpha1 in 1..=i64::from(alpha1_max) {
        let hi = beta1_max.unwrap_or(8 * alpha1);
        // beta1 shares the parity of alpha1
        let mut beta1 = -alpha1 + 2;
        while beta1 <= hi {
            let mut beta2 = beta1.abs() + 2;
            while beta2 < (beta1 + 2 * alpha1).abs() {
                if let Ok(sol) = FrSolution::from_betas(alpha1, beta1, beta2) {
                    out.push(sol);
                }
                beta2 += 2;
            }
            beta1 += 2;
        }
    }
    out.sort_by(|x, y| sort_key(x).cmp(&sort_key(y)));
    out.dedup_by(|x, y| same_model(x, y));
    out
}

fn sort_key(s: &FrSolution) -> (i64, i64, i64) {
    (s.alpha1, s.beta1, s.beta2)
}

fn same_model(x: &FrSolution, y: &FrSolution) -> bool {
    x.alpha1 == y.alpha1 && x.a == y.a && x.c == y.c && x.theta == y.theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn accepts_reference_model() {
        let p = validate_params(r(7, 6), r(4, 3), 5, Variant::OddN).unwrap();
        assert_eq!(p.j(), 2.0);
        p.require_classifiable().unwrap();
    }

    #[test]
    fn accepts_dual_hahn_interior() {
        validate_params(r(0, 1), r(1, 2), 5, Variant::DualHahn).unwrap();
        validate_params(r(0, 1), r(1, 2), 1, Variant::DualHahn).unwrap();
    }

    #[test]
    fn rejects_c_below_abs_a() {
        let e = validate_params(r(1, 1), r(1, 2), 5, Variant::OddN).unwrap_err();
        assert!(matches!(e, Error::RangeViolation(_)));
    }

    #[test]
    fn rejects_boundaries() {
        assert!(validate_params(r(-1, 2), r(3, 4), 5, Variant::OddN).is_err());
        assert!(validate_params(r(1, 3), r(1, 3), 5, Variant::OddN).is_err());
        assert!(validate_params(r(1, 3), r(4, 3), 5, Variant::OddN).is_err());
        // c = a + 1 boundary for negative a: |a + 1| = 3/4
        assert!(validate_params(r(-1, 4), r(3, 4), 5, Variant::OddN).is_err());
        assert!(validate_params(r(-1, 4), r(1, 2), 5, Variant::OddN).is_ok());
    }

    #[test]
    fn parity_mismatch() {
        assert!(matches!(
            validate_params(r(7, 6), r(4, 3), 6, Variant::OddN),
            Err(Error::ParityMismatch { .. })
        ));
        assert!(matches!(
            validate_params(r(7, 6), r(4, 3), 5, Variant::EvenN),
            Err(Error::ParityMismatch { .. })
        ));
        assert!(validate_params(r(7, 6), r(4, 3), 5, Variant::DualHahn).is_err());
    }

    #[test]
    fn too_small_for_classification() {
        let odd = validate_params(r(7, 6), r(4, 3), 3, Variant::OddN).unwrap();
        assert!(matches!(odd.require_classifiable(), Err(Error::TooSmall { min: 5, .. })));
        let even = validate_params(r(7, 6), r(4, 3), 4, Variant::EvenN).unwrap();
        assert!(matches!(even.require_classifiable(), Err(Error::TooSmall { min: 6, .. })));
        validate_params(r(7, 6), r(4, 3), 6, Variant::EvenN)
            .unwrap()
            .require_classifiable()
            .unwrap();
    }

    #[test]
    fn reference_solution_is_found() {
        let sols = solve_diophantine(6);
        let s = sols
            .iter()
            .find(|s| (s.alpha1, s.beta1, s.beta2) == (6, 14, 16))
            .expect("(6, 14, 16) missing");
        assert_eq!(s.dgamma(), 1);
        assert_eq!(s.a, r(7, 6));
        assert_eq!(s.c, r(8, 6));
        assert_eq!(s.theta, r(3, 2));
        assert_eq!(s.pst_multiple, Some(2));
        // both sides of the condition equal 15
        assert_eq!((s.beta2 - s.beta1) * (s.beta1 + s.beta2) / 4, 15);
    }

    #[test]
    fn small_alpha_solutions() {
        let sols = solve_diophantine(2);
        let s = sols.iter().find(|s| (s.alpha1, s.beta1, s.beta2) == (2, 0, 2)).unwrap();
        assert_eq!((s.dgamma(), s.a, s.c, s.theta), (0, r(0, 1), r(1, 2), r(3, 2)));
        assert_eq!(s.t(), 2.0 * PI);

        let sols = solve_diophantine(4);
        let s = sols.iter().find(|s| (s.alpha1, s.beta1, s.beta2) == (4, 0, 4)).unwrap();
        assert_eq!((s.dgamma(), s.a, s.c, s.theta), (1, r(0, 1), r(1, 2), r(0, 1)));
        assert_eq!(s.pst_multiple, Some(1));
    }

    #[test]
    fn phase_formula() {
        // phi = pi (gamma1 + gamma2) - T (a^2 + c^2) / 2 = pi - 6 pi (113/72)
        let s = FrSolution::from_betas(6, 14, 16).unwrap();
        let expected = PI - 6.0 * PI * (49.0 + 64.0) / 72.0;
        let d = (s.phi() - expected).rem_euclid(2.0 * PI);
        assert!(d.min(2.0 * PI - d) < 1e-12);
        assert!(s.phi_over_pi >= r(0, 1) && s.phi_over_pi < r(2, 1));
    }

    #[test]
    fn pst_schedule_rules() {
        assert_eq!(pst_schedule(r(3, 2)), Some(2));
        assert_eq!(pst_schedule(r(0, 1)), Some(1));
        assert_eq!(pst_schedule(r(1, 3)), None);
        assert_eq!(pst_schedule(r(2, 3)), Some(3));
        assert_eq!(pst_schedule(r(1, 4)), Some(4));
    }

    #[test]
    fn rejects_bad_betas() {
        assert!(FrSolution::from_betas(0, 0, 2).is_err());
        assert!(FrSolution::from_betas(6, 13, 16).is_err());
        assert!(FrSolution::from_betas(6, 14, 14).is_err());
        assert!(FrSolution::from_betas(6, -6, 4).is_err());
    }

    #[test]
    fn emitted_solutions_validate_for_both_parities() {
        for s in solve_diophantine(8) {
            assert!(s.satisfies_condition(), "{s:?}");
            validate_params(s.a, s.c, 7, Variant::OddN).unwrap();
            validate_params(s.a, s.c, 8, Variant::EvenN).unwrap();
            assert_eq!(s.alpha1 % s.theta.denom(), 0);
            assert!(s.theta >= r(0, 1) && s.theta < r(2, 1));
        }
    }

    /// Independent enumeration over every integer in the window, including
    /// the angle numerator, checked against the condition in integer form.
    #[test]
    fn brute_force_window_matches_solver() {
        let mut brute = BTreeSet::new();
        for alpha1 in 1i64..=3 {
            for beta1 in -10i64..=10 {
                for beta2 in 0i64..=12 {
                    for dgamma in -5i64..=5 {
                        // 4 theta / pi = k / alpha1 with 0 <= k < 2 alpha1
                        for k in 0..2 * alpha1 {
                            let same_parity = (alpha1 - beta1) % 2 == 0 && (alpha1 - beta2) % 2 == 0;
                            let window = beta1 > -alpha1
                                && beta1.abs() < beta2
                                && beta2 < (beta1 + 2 * alpha1).abs();
                            let eq = beta2 * beta2 - beta1 * beta1
                                == 4 * (2 * dgamma - 1) * alpha1 + 4 * k;
                            if same_parity && window && eq {
                                brute.insert((alpha1, beta1, beta2, dgamma, Rational::new(k, alpha1)));
                            }
                        }
                    }
                }
            }
        }
        let solved: BTreeSet<_> = solve_diophantine(3)
            .into_iter()
            .filter(|s| s.beta1.abs() <= 10 && s.beta2 <= 12 && s.dgamma().abs() <= 5)
            .map(|s| (s.alpha1, s.beta1, s.beta2, s.dgamma(), s.theta))
            .collect();
        assert!(!brute.is_empty());
        assert_eq!(brute, solved);
    }

    #[test]
    fn custom_beta_bound() {
        let narrow = solve_diophantine_with(6, Some(4));
        assert!(narrow.iter().all(|s| s.beta1 <= 4));
        assert!(!narrow.iter().any(|s| s.beta1 == 14));
        assert!(solve_diophantine(0).is_empty());
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(r(8, 6)), "4/3");
        assert_eq!(format_rational(r(0, 5)), "0/1");
        assert_eq!(parse_rational("7/6").unwrap(), r(7, 6));
        assert_eq!(parse_rational("-2").unwrap(), r(-2, 1));
        assert!(parse_rational("x").is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn condition_holds_exactly(alpha1 in 1i64..40, b1 in 0i64..200, db in 1i64..200) {
            let beta1 = -alpha1 + 2 * (b1 % (5 * alpha1)) + 2;
            let beta2 = beta1.abs() + 2 * db;
            if let Ok(s) = FrSolution::from_betas(alpha1, beta1, beta2) {
                prop_assert!(s.satisfies_condition());
                prop_assert!(s.theta >= Rational::from_integer(0) && s.theta < Rational::from_integer(2));
                prop_assert_eq!(s.alpha1 % s.theta.denom(), 0);
            }
        }
    }
}

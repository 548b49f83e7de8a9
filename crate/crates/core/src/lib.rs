//! Exact-arithmetic engine for p-adic divisibility of Chern classes and
//! non-existence certificates for almost complex structures on the total
//! spaces of even sphere bundles over complex projective space.
//!
//! The crate is organised bottom-up:
//!
//! - [`padic`]: valuations of integers, rationals and factorials, base-p digit
//!   sums, the Adams function φ(t) and prime enumeration.
//! - [`symfunc`]: weighted partitions, multinomials, and the two directions of
//!   the Newton correspondence between elementary symmetric polynomials and
//!   power sums, with a brute-force polynomial oracle.
//! - [`cherndiv`]: valuations of `(q+t-1)!/φ(t)`, per-term lower bounds for the
//!   expansion of `c_k` in integral classes, and the guaranteed divisibility
//!   ranges.
//! - [`acs`]: the threshold `a(n)`, witness conditions (a)/(b), witness-prime
//!   search and grid scans.
//! - [`verify`]: brute-force verification suites over parameter grids.

pub mod acs;
pub mod cherndiv;
mod error;
pub mod padic;
pub mod symfunc;
pub mod verify;

pub use acs::{
    a_of_n, canonical_check, condition_a, condition_b, corollary_threshold, euler_total,
    find_witness, scan_grid, theorem_main_check, BundleParams, Condition, ScanRow,
    WitnessCertificate,
};
pub use cherndiv::{
    ck_divisibility_bound, ck_divisibility_report, dchern_ranges, lemma_vp1_check,
    lemma_vp2_check, lemma_vp_lhs, term_valuation, DivisibilityRange, LemmaCheck,
    TermValuationReport,
};
pub use error::{Error, Result};
pub use padic::{
    digit_sum, phi, primes_up_to, vp_factorial, vp_int, vp_phi, vp_rat, ExactRational, Prime,
    PrimeFactorization, Valuation,
};
pub use symfunc::{
    enumerate_partitions, multinomial, oracle_eval, powersums_from_sigma, sigma_from_powersums,
    PartitionVector, RootMultiset, SymbolicCombination,
};

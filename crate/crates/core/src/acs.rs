//! Non-existence certificates for almost complex structures on the total space
//! `E` of a sectioned `S^{2q}`-bundle over a closed oriented `2n`-manifold `M`.
//!
//! A prime `p` is a witness when either
//!
//! - (a) `p > n + 1` and `v_p((q-1)!) >= v_p(χ(M)) + δ_p + 1`, or
//! - (b) `p^e - q > n` with `e = ⌊(q-1)/(p-1)⌋ - v_p(χ(M)) - δ_p`, relaxed to
//!   `>= n` when `(p-1) ∤ (q-1)`.
//!
//! The search is sound only: no witness means "no certificate", never that an
//! almost complex structure exists.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cherndiv::boundary_inclusive;
use crate::error::{Error, Result};
use crate::padic::{big_pow, is_prime, primes_up_to, vp_factorial, vp_u64, Prime};

/// Threshold beyond which every `S^{2q}`-bundle over `CP^n` has a total space
/// without almost complex structure.
pub fn a_of_n(n: u64) -> Result<u64> {
    match n {
        0 => Err(Error::InvalidArgument("n must be positive".into())),
        1..=2 => Ok(n + 3),
        3..=5 => Ok(n + 2),
        _ => Ok(n),
    }
}

/// `χ(E) = χ(S^{2q}) · χ(M) = 2 χ(M)`.
pub fn euler_total(chi_base: u64) -> u64 {
    2 * chi_base
}

/// Smallest `q` for which the `p = 2` bound `2^(q-ν-2) - q > n` is assured,
/// `⌊log_2((n+1)/2^ν)⌋ + 2ν + 4` with `ν = v_2(n+1)`.
pub fn corollary_threshold(n: u64) -> u64 {
    let m = n + 1;
    let nu = u64::from(m.trailing_zeros());
    let odd = m >> nu;
    let log2_odd = u64::from(odd.ilog2());
    log2_odd + 2 * nu + 4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundleParams {
    /// Complex dimension of the base (real dimension `2n`).
    pub n: u64,
    /// The fibre is `S^{2q}`.
    pub q: u64,
    /// Euler characteristic of the base.
    pub chi: u64,
    /// Whether the bundle is assumed to admit a cross section. Recorded, not
    /// checked.
    pub section_assumed: bool,
}

impl BundleParams {
    pub fn new(n: u64, q: u64, chi: u64) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::InvalidArgument("n and q must be positive".into()));
        }
        if chi == 0 {
            return Err(Error::ZeroArgument("Euler characteristic"));
        }
        Ok(Self {
            n,
            q,
            chi,
            section_assumed: true,
        })
    }

    /// Base `CP^n`, so `χ = n + 1`.
    pub fn cpn(n: u64, q: u64) -> Result<Self> {
        Self::new(n, q, n + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    A,
    B,
}

/// A prime together with the evaluated inequality that rules out an almost
/// complex structure for one `(n, q, χ)`.
///
/// For condition A, `lhs = v_p((q-1)!)`, `rhs = v_p(χ) + δ_p + 1` and the
/// comparison is `>=`. For condition B, `exponent = e`, `lhs = p^e - q`,
/// `rhs = n` and the comparison is `>` when `strict`, `>=` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub n: u64,
    pub q: u64,
    pub chi: u64,
    pub prime: u64,
    pub condition: Condition,
    pub exponent: Option<i64>,
    #[serde(serialize_with = "ser_decimal", deserialize_with = "de_decimal")]
    pub lhs: BigInt,
    pub rhs: i64,
    pub strict: bool,
    pub delta_p: u64,
    pub section_assumed: bool,
}

fn ser_decimal<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn de_decimal<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl WitnessCertificate {
    /// Re-evaluates the recorded inequality from the stored fields alone.
    pub fn check_fields(&self) -> bool {
        if !is_prime(self.prime) || self.delta_p != u64::from(self.prime == 2) {
            return false;
        }
        match self.condition {
            Condition::A => {
                self.exponent.is_none()
                    && !self.strict
                    && self.prime > self.n + 1
                    && self.lhs >= BigInt::from(self.rhs)
            }
            Condition::B => {
                let Some(e) = self.exponent else {
                    return false;
                };
                if e < 0 || self.rhs != self.n as i64 {
                    return false;
                }
                let p = Prime::new(self.prime).expect("checked above");
                let lhs = big_pow(p, e as u64) - BigInt::from(self.q);
                if lhs != self.lhs {
                    return false;
                }
                let rhs = BigInt::from(self.rhs);
                if self.strict {
                    lhs > rhs
                } else {
                    lhs >= rhs
                }
            }
        }
    }

    /// Recomputes the certificate from `(n, q, χ, prime, condition)` and
    /// checks every stored field against it.
    pub fn audit(&self) -> bool {
        let Ok(p) = Prime::new(self.prime) else {
            return false;
        };
        let Ok(mut params) = BundleParams::new(self.n, self.q, self.chi) else {
            return false;
        };
        params.section_assumed = self.section_assumed;
        let fresh = match self.condition {
            Condition::A => condition_a(p, &params),
            Condition::B => condition_b(p, &params),
        };
        matches!(fresh, Ok(Some(c)) if c == *self)
    }
}

/// Condition (a) at prime `p`.
pub fn condition_a(p: Prime, params: &BundleParams) -> Result<Option<WitnessCertificate>> {
    let BundleParams { n, q, chi, .. } = *params;
    if chi == 0 {
        return Err(Error::ZeroArgument("Euler characteristic"));
    }
    if p.get() <= n + 1 {
        return Ok(None);
    }
    let lhs = vp_factorial(p, q - 1) as i64;
    let rhs = chi_valuation(p, chi) + p.delta() as i64 + 1;
    Ok((lhs >= rhs).then(|| WitnessCertificate {
        n,
        q,
        chi,
        prime: p.get(),
        condition: Condition::A,
        exponent: None,
        lhs: lhs.into(),
        rhs,
        strict: false,
        delta_p: p.delta(),
        section_assumed: params.section_assumed,
    }))
}

/// Condition (b) at prime `p`. A negative exponent is a plain miss.
pub fn condition_b(p: Prime, params: &BundleParams) -> Result<Option<WitnessCertificate>> {
    let BundleParams { n, q, chi, .. } = *params;
    if chi == 0 {
        return Err(Error::ZeroArgument("Euler characteristic"));
    }
    let e = ((q - 1) / (p.get() - 1)) as i64 - chi_valuation(p, chi) - p.delta() as i64;
    if e < 0 {
        return Ok(None);
    }
    let lhs = big_pow(p, e as u64) - BigInt::from(q);
    let rhs = BigInt::from(n);
    let strict = !boundary_inclusive(p, q);
    let fires = if strict { lhs > rhs } else { lhs >= rhs };
    Ok(fires.then(|| WitnessCertificate {
        n,
        q,
        chi,
        prime: p.get(),
        condition: Condition::B,
        exponent: Some(e),
        lhs,
        rhs: n as i64,
        strict,
        delta_p: p.delta(),
        section_assumed: params.section_assumed,
    }))
}

fn chi_valuation(p: Prime, chi: u64) -> i64 {
    vp_u64(p, chi).finite().expect("chi is nonzero")
}

/// Witness search over primes `<= max(q, 2)`, ascending, trying (b) before
/// (a) at each prime. No larger prime can witness: for `p > q` the exponent in
/// (b) is at most 0 so `p^e - q < 1 <= n`, and `v_p((q-1)!) = 0` defeats (a).
pub fn find_witness(params: &BundleParams) -> Result<Option<WitnessCertificate>> {
    find_witness_up_to(params, params.q.max(2))
}

/// [`find_witness`] with an explicit prime bound.
pub fn find_witness_up_to(
    params: &BundleParams,
    prime_bound: u64,
) -> Result<Option<WitnessCertificate>> {
    if params.chi == 0 {
        return Err(Error::ZeroArgument("Euler characteristic"));
    }
    for p in primes_up_to(prime_bound) {
        if let Some(cert) = condition_b(p, params)? {
            return Ok(Some(cert));
        }
        if let Some(cert) = condition_a(p, params)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// The canonical-bundle criterion: witness search with `χ = n + 1`.
pub fn canonical_check(n: u64, q: u64) -> Result<Option<WitnessCertificate>> {
    find_witness(&BundleParams::cpn(n, q)?)
}

/// One cell of the `(n, q)` grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub q: u64,
    pub a_n: u64,
    #[serde(rename = "expected")]
    pub expected_by_theorem: bool,
    pub witness: Option<WitnessCertificate>,
}

impl ScanRow {
    /// `q >= a(n)` but no witness was found.
    pub fn is_violation(&self) -> bool {
        self.expected_by_theorem && self.witness.is_none()
    }
}

pub fn theorem_main_check(n: u64, q: u64) -> Result<ScanRow> {
    let a_n = a_of_n(n)?;
    Ok(ScanRow {
        n,
        q,
        a_n,
        expected_by_theorem: q >= a_n,
        witness: canonical_check(n, q)?,
    })
}

/// [`theorem_main_check`] over `1..=n_max × 1..=q_max`, in `(n, q)` order.
pub fn scan_grid(n_max: u64, q_max: u64) -> Result<Vec<ScanRow>> {
    let cells: Vec<(u64, u64)> = (1..=n_max)
        .flat_map(|n| (1..=q_max).map(move |q| (n, q)))
        .collect();
    cells
        .into_par_iter()
        .map(|(n, q)| theorem_main_check(n, q))
        .collect()
}

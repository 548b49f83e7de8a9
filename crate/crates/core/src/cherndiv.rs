//! Divisibility of Chern classes of a complex bundle trivial over the
//! `(2q-1)`-skeleton.
//!
//! No cohomology is represented. For such a bundle `s_i = 0` for `i < q` and
//! the Adams integrality gives `s_{q+t} / (q+t) = (q+t-1)!/φ(t) · z_{q+t}` with
//! integral `z`. Substituting into the expansion of `σ_k` writes `(-1)^k c_k`
//! as a sum over partitions of `k` into parts `>= q` of
//!
//! ```text
//! multinomial(m) · (-1)^{Σm} / (Σm)! · ∏_t ((q+t-1)!/φ(t))^{m_{q+t}} · ∏ z_{q+t}^{m_{q+t}}
//! ```
//!
//! Since the multinomial is an integer, the p-adic valuation of the rational
//! factor `∏(...)/(Σm)!` bounds the divisibility of that term "modulo
//! torsion". This module computes those valuations exactly, and the
//! guaranteed ranges they are compared against.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{
    big_pow, digits_big, vp_factorial, vp_factorial_big, vp_phi, ExactRational, Prime,
};
use crate::symfunc::{enumerate_partitions, PartitionVector};

/// Ranges of `t` up to this length are minimized by direct evaluation.
const BRUTE_FORCE_SPAN: u64 = 1 << 16;

/// Largest `k` accepted by [`divisibility_bound_table`].
pub const MAX_TABLE_WEIGHT: u64 = 8192;

/// `v_p((q+t-1)! / φ(t))`.
///
/// Panics if `q == 0`.
pub fn lemma_vp_lhs(p: Prime, q: u64, t: u64) -> i64 {
    assert!(q >= 1, "q must be positive");
    vp_factorial(p, q + t - 1) as i64 - vp_phi(p, t) as i64
}

/// [`lemma_vp_lhs`] for an arbitrarily large `t`.
pub fn lemma_vp_lhs_big(p: Prime, q: u64, t: &BigUint) -> i64 {
    assert!(q >= 1, "q must be positive");
    let n = t + BigUint::from(q - 1);
    let fact = BigInt::from(vp_factorial_big(p, &n));
    let phi = BigInt::from(t / BigUint::from(p.get() - 1));
    (fact - phi).to_i64().expect("lemma valuation fits in i64")
}

/// Whether `(p - 1)` fails to divide `(q - 1)`, which makes the boundary of
/// the lemma and theorem ranges inclusive.
pub fn boundary_inclusive(p: Prime, q: u64) -> bool {
    !(q - 1).is_multiple_of(p.get() - 1)
}

/// `⌊(q-1)/(p-1)⌋ - l + 1`.
pub fn range_exponent(p: Prime, q: u64, l: u64) -> i64 {
    ((q - 1) / (p.get() - 1)) as i64 - l as i64 + 1
}

/// `p^e` for the range exponent when the hypothesis `p^e > q` holds.
fn range_power(p: Prime, q: u64, l: u64) -> Option<BigUint> {
    let e = range_exponent(p, q, l);
    if e < 0 {
        return None;
    }
    let pow = big_pow(p, e as u64).to_biguint().expect("positive power");
    (pow > BigUint::from(q)).then_some(pow)
}

/// Largest `t` covered by the second lemma estimate, or `None` when its
/// hypothesis `p^e > q` fails.
pub fn lemma2_t_max(p: Prime, q: u64, l: u64) -> Option<BigUint> {
    let pow = range_power(p, q, l)?;
    let span = pow - BigUint::from(q);
    Some(if boundary_inclusive(p, q) {
        span
    } else {
        span - 1u32
    })
}

/// Minimum of [`lemma_vp_lhs`] over `0 <= t <= t_max` by direct evaluation.
pub fn lemma_lhs_min_brute(p: Prime, q: u64, t_max: u64) -> i64 {
    (0..=t_max)
        .map(|t| lemma_vp_lhs(p, q, t))
        .min()
        .expect("nonempty range")
}

/// Minimum of [`lemma_vp_lhs`] over `0 <= t <= t_max` by a base-p digit
/// dynamic program.
///
/// With `m = q + t - 1` and `r = t mod (p-1)`, Legendre's formula gives
/// `v_p(m!/φ(t)) = (q - 1 + r - S_p(m)) / (p - 1)`, and `m ≡ S_p(m)` mod
/// `p - 1`, so `r` depends only on `S_p(m) mod (p-1)`. The minimum is found by
/// maximizing `S_p(m)` within each residue class over `m ∈ [q-1, q-1+t_max]`.
pub fn lemma_lhs_min_digits(p: Prime, q: u64, t_max: &BigUint) -> i64 {
    assert!(q >= 1, "q must be positive");
    let base = p.get();
    let modulus = (base - 1) as usize;
    let c = q - 1;
    let lo = BigUint::from(c);
    let hi = &lo + t_max;

    let mut hi_digits = digits_big(base, &hi);
    hi_digits.reverse();
    let len = hi_digits.len();
    let mut lo_digits = digits_big(base, &lo);
    lo_digits.resize(len, 0);
    lo_digits.reverse();

    // best[residue][tight_lo][tight_hi] = largest digit sum of a prefix.
    const NONE: i64 = -1;
    let mut best = vec![[[NONE; 2]; 2]; modulus];
    best[0][1][1] = 0;
    for pos in 0..len {
        let mut next = vec![[[NONE; 2]; 2]; modulus];
        for (res, row) in best.iter().enumerate() {
            for (tlo, pair) in row.iter().enumerate() {
                for (thi, &sum) in pair.iter().enumerate() {
                    if sum == NONE {
                        continue;
                    }
                    let d_min = if tlo == 1 { lo_digits[pos] } else { 0 };
                    let d_max = if thi == 1 { hi_digits[pos] } else { base - 1 };
                    for d in d_min..=d_max {
                        let ntlo = usize::from(tlo == 1 && d == lo_digits[pos]);
                        let nthi = usize::from(thi == 1 && d == hi_digits[pos]);
                        let nres = (res + d as usize) % modulus;
                        let slot = &mut next[nres][ntlo][nthi];
                        *slot = (*slot).max(sum + d as i64);
                    }
                }
            }
        }
        best = next;
    }
    let m1 = modulus as i64;
    let best_gain = best
        .iter()
        .enumerate()
        .filter_map(|(res, row)| {
            let s = row.iter().flatten().copied().max()?;
            (s != NONE).then(|| {
                let r = (res as i64 - c as i64).rem_euclid(m1);
                s - r
            })
        })
        .max()
        .expect("range is nonempty");
    let num = c as i64 - best_gain;
    debug_assert_eq!(num % m1, 0);
    num / m1
}

/// Minimum of [`lemma_vp_lhs`] over `0 <= t <= t_max`.
pub fn lemma_lhs_min(p: Prime, q: u64, t_max: &BigUint) -> i64 {
    match t_max.to_u64() {
        Some(t) if t < BRUTE_FORCE_SPAN => lemma_lhs_min_brute(p, q, t),
        _ => lemma_lhs_min_digits(p, q, t_max),
    }
}

/// Outcome of checking one of the lemma estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LemmaCheck {
    Holds { min_valuation: i64 },
    Fails { min_valuation: i64 },
    NotApplicable,
}

impl LemmaCheck {
    pub fn holds(self) -> bool {
        matches!(self, LemmaCheck::Holds { .. })
    }
}

/// First estimate: `v_p((q+t-1)!/φ(t)) >= v_p((q-1)!)` for `0 <= t < p - 1`.
pub fn lemma_vp1_check(p: Prime, q: u64) -> bool {
    let target = vp_factorial(p, q - 1) as i64;
    (0..p.get() - 1).all(|t| lemma_vp_lhs(p, q, t) >= target)
}

/// Second estimate: `v_p((q+t-1)!/φ(t)) >= l` for `0 <= t < p^e - q` (or
/// `<=` when `(p-1) ∤ (q-1)`), where `e = ⌊(q-1)/(p-1)⌋ - l + 1`. The whole
/// range is checked exactly.
pub fn lemma_vp2_check(p: Prime, q: u64, l: u64) -> LemmaCheck {
    if q == 0 || l == 0 {
        return LemmaCheck::NotApplicable;
    }
    let Some(t_max) = lemma2_t_max(p, q, l) else {
        return LemmaCheck::NotApplicable;
    };
    let min_valuation = lemma_lhs_min(p, q, &t_max);
    if min_valuation >= l as i64 {
        LemmaCheck::Holds { min_valuation }
    } else {
        LemmaCheck::Fails { min_valuation }
    }
}

/// The boundary point `t = p^e - q` of the inclusive case, with
/// `v_p((q+t-1)!/φ(t))` there. `None` unless the hypothesis holds and
/// `(p-1) ∤ (q-1)`.
pub fn lemma2_boundary(p: Prime, q: u64, l: u64) -> Option<(BigUint, i64)> {
    if !boundary_inclusive(p, q) {
        return None;
    }
    let t = lemma2_t_max(p, q, l)?;
    let v = lemma_vp_lhs_big(p, q, &t);
    Some((t, v))
}

/// `{(q-1)/(p-1)} + {t/(p-1)}`, the sum of fractional parts.
pub fn fractional_part_sum(p: Prime, q: u64, t: &BigUint) -> ExactRational {
    let den = BigInt::from(p.get() - 1);
    let frac = |x: BigInt| {
        let r = ExactRational::new(x, den.clone());
        &r - r.floor()
    };
    frac(BigInt::from(q - 1)) + frac(BigInt::from(t.clone()))
}

/// One factor `((q+t-1)!/φ(t))^m` of a term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorValuation {
    pub part: u64,
    pub multiplicity: u64,
    pub factor_valuation: i64,
}

/// Exact p-adic valuation of the rational coefficient of one partition's term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermValuationReport {
    pub partition: PartitionVector,
    /// `Σ m_{q+t} · v_p((q+t-1)!/φ(t)) - v_p((Σm)!)`.
    pub term_valuation: i64,
    pub breakdown: Vec<FactorValuation>,
    /// The subtracted `v_p((Σm)!)`.
    pub parts_factorial_valuation: i64,
}

impl Serialize for TermValuationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TermValuationReport", 5)?;
        st.serialize_field("partition", self.partition.multiplicities())?;
        st.serialize_field("lowest_part", &self.partition.lowest_part())?;
        st.serialize_field("valuation", &self.term_valuation)?;
        st.serialize_field("breakdown", &self.breakdown)?;
        st.serialize_field("parts_factorial_valuation", &self.parts_factorial_valuation)?;
        st.end()
    }
}

pub fn term_valuation(p: Prime, q: u64, partition: &PartitionVector) -> Result<TermValuationReport> {
    if partition.lowest_part() != q {
        return Err(Error::InvalidArgument(format!(
            "partition lowest part {} does not match q = {q}",
            partition.lowest_part()
        )));
    }
    let breakdown: Vec<FactorValuation> = partition
        .parts()
        .map(|(part, multiplicity)| FactorValuation {
            part,
            multiplicity,
            factor_valuation: lemma_vp_lhs(p, q, part - q),
        })
        .collect();
    let parts_factorial_valuation = vp_factorial(p, partition.total_parts()) as i64;
    let term_valuation = breakdown
        .iter()
        .map(|f| f.multiplicity as i64 * f.factor_valuation)
        .sum::<i64>()
        - parts_factorial_valuation;
    Ok(TermValuationReport {
        partition: partition.clone(),
        term_valuation,
        breakdown,
        parts_factorial_valuation,
    })
}

/// The term of smallest valuation among all partitions of `k` into parts
/// `>= q`, by exhaustive enumeration. Ties go to the first partition in
/// enumeration order.
pub fn ck_divisibility_report(p: Prime, q: u64, k: u64) -> Result<TermValuationReport> {
    if q == 0 || k < q {
        return Err(Error::InvalidArgument(format!("need 1 <= q <= k, got q={q}, k={k}")));
    }
    let mut best: Option<TermValuationReport> = None;
    for m in enumerate_partitions(k, q)? {
        let report = term_valuation(p, q, &m)?;
        if best
            .as_ref()
            .is_none_or(|b| report.term_valuation < b.term_valuation)
        {
            best = Some(report);
        }
    }
    Ok(best.expect("k >= q has the single-part partition"))
}

/// Sharp lower bound on the p-adic valuation of every coefficient in the
/// expansion of `c_k`, by exhaustive enumeration.
pub fn ck_divisibility_bound(p: Prime, q: u64, k: u64) -> Result<i64> {
    ck_divisibility_report(p, q, k).map(|r| r.term_valuation)
}

/// The same minimum as [`ck_divisibility_bound`] for every `k` in
/// `q..=k_max` at once, by dynamic programming over the number of parts
/// instead of enumeration. Entry `i` is the bound for `k = q + i`.
pub fn divisibility_bound_table(p: Prime, q: u64, k_max: u64) -> Result<Vec<i64>> {
    if q == 0 || k_max < q {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= q <= k_max, got q={q}, k_max={k_max}"
        )));
    }
    if k_max > MAX_TABLE_WEIGHT {
        return Err(Error::ResourceLimit {
            what: "k_max",
            value: k_max,
            limit: MAX_TABLE_WEIGHT,
        });
    }
    const UNREACHABLE: i64 = i64::MAX / 4;
    let kmax = k_max as usize;
    let q_us = q as usize;
    let weight: Vec<i64> = (0..=k_max - q).map(|t| lemma_vp_lhs(p, q, t)).collect();

    // layer[w] = least Σ m·v over partitions of w into exactly `parts` parts.
    let mut layer = vec![UNREACHABLE; kmax + 1];
    layer[q_us..].copy_from_slice(&weight);
    let mut result = vec![UNREACHABLE; kmax + 1];
    let mut parts = 1u64;
    loop {
        let correction = vp_factorial(p, parts) as i64;
        for w in 0..=kmax {
            if layer[w] < UNREACHABLE {
                result[w] = result[w].min(layer[w] - correction);
            }
        }
        let lowest = (parts as usize + 1) * q_us;
        if lowest > kmax {
            break;
        }
        let mut next = vec![UNREACHABLE; kmax + 1];
        for w in lowest..=kmax {
            let mut best = UNREACHABLE;
            // Last part i, remainder w - i >= parts * q.
            for i in q_us..=w - parts as usize * q_us {
                let prev = layer[w - i];
                if prev < UNREACHABLE {
                    best = best.min(prev + weight[i - q_us]);
                }
            }
            next[w] = best;
        }
        layer = next;
        parts += 1;
    }
    Ok(result.split_off(q_us))
}

/// A range of Chern class indices `k` on which `c_k` is divisible by
/// `p^exponent` modulo torsion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityRange {
    pub exponent: i64,
    pub k_min: u64,
    pub k_max: BigUint,
    /// Whether `k_max` itself belongs to the range.
    pub inclusive: bool,
}

impl DivisibilityRange {
    pub fn contains(&self, k: u64) -> bool {
        let k_big = BigUint::from(k);
        k >= self.k_min && (k_big < self.k_max || (self.inclusive && k_big == self.k_max))
    }

    /// Largest covered index, if it fits in `u64`.
    pub fn last(&self) -> Option<u64> {
        let last = if self.inclusive {
            self.k_max.clone()
        } else {
            &self.k_max - 1u32
        };
        last.to_u64()
    }
}

impl Serialize for DivisibilityRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DivisibilityRange", 4)?;
        st.serialize_field("k_min", &self.k_min)?;
        // Larger than u64 only for extreme q; falls back to a decimal string.
        match self.k_max.to_u64() {
            Some(v) => st.serialize_field("k_max", &v)?,
            None => st.serialize_field("k_max", &self.k_max.to_string())?,
        }
        st.serialize_field("inclusive", &self.inclusive)?;
        st.serialize_field("exponent", &self.exponent)?;
        st.end()
    }
}

/// The two guaranteed ranges:
///
/// - (i) `q <= k < q + p - 1` with exponent `v_p((q-1)!)`;
/// - (ii) `q <= k < p^e` (or `<=` if `(p-1) ∤ (q-1)`) with exponent `l`, where
///   `e = ⌊(q-1)/(p-1)⌋ - l + 1`; `None` when `p^e <= q`, including `e < 0`.
pub fn dchern_ranges(p: Prime, q: u64, l: u64) -> Result<(DivisibilityRange, Option<DivisibilityRange>)> {
    if q == 0 || l == 0 {
        return Err(Error::InvalidArgument("q and l must be positive".into()));
    }
    let first = DivisibilityRange {
        exponent: vp_factorial(p, q - 1) as i64,
        k_min: q,
        k_max: BigUint::from(q + p.get() - 2),
        inclusive: true,
    };
    let second = range_power(p, q, l).map(|pow| DivisibilityRange {
        exponent: l as i64,
        k_min: q,
        k_max: pow,
        inclusive: boundary_inclusive(p, q),
    });
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::primes_up_to;
    use num_traits::One;
    use proptest::prelude::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn lemma_lhs_examples() {
        assert_eq!(lemma_vp_lhs(p(2), 5, 0), 3);
        assert_eq!(lemma_vp_lhs(p(3), 1, 0), 0);
        assert_eq!(lemma_vp_lhs(p(2), 3, 2), 1);
        assert_eq!(lemma_vp_lhs_big(p(2), 3, &BigUint::from(2u32)), 1);
    }

    #[test]
    fn lemma1_examples() {
        assert!(lemma_vp1_check(p(2), 4));
        assert!(lemma_vp1_check(p(5), 7));
        assert!(lemma_vp1_check(p(3), 10));
    }

    #[test]
    fn lemma2_examples() {
        // e = 3, t ∈ [0, 3): valuations 3, 2, 2.
        let direct: Vec<i64> = (0..3).map(|t| lemma_vp_lhs(p(2), 5, t)).collect();
        assert_eq!(direct, vec![3, 2, 2]);
        assert_eq!(lemma_vp2_check(p(2), 5, 2), LemmaCheck::Holds { min_valuation: 2 });
        assert_eq!(lemma_vp2_check(p(2), 2, 1), LemmaCheck::NotApplicable);
        assert_eq!(lemma_vp2_check(p(3), 6, 2), LemmaCheck::NotApplicable);
    }

    #[test]
    fn digit_dp_matches_brute_force() {
        for prime in primes_up_to(13) {
            for q in 1..=40u64 {
                for t_max in (0..300u64).step_by(7).chain([1, 2, 3, 1023, 1024, 2186, 2187]) {
                    assert_eq!(
                        lemma_lhs_min_digits(prime, q, &BigUint::from(t_max)),
                        lemma_lhs_min_brute(prime, q, t_max),
                        "p={prime}, q={q}, t_max={t_max}"
                    );
                }
            }
        }
    }

    #[test]
    fn term_valuation_examples() {
        let single = PartitionVector::from_parts(5, 5, &[5]).unwrap();
        assert_eq!(term_valuation(p(2), 5, &single).unwrap().term_valuation, 3);
        let double = PartitionVector::from_parts(10, 5, &[5, 5]).unwrap();
        let report = term_valuation(p(2), 5, &double).unwrap();
        assert_eq!(report.term_valuation, 5);
        assert_eq!(report.parts_factorial_valuation, 1);
        let one = PartitionVector::from_parts(1, 1, &[1]).unwrap();
        assert_eq!(term_valuation(p(3), 1, &one).unwrap().term_valuation, 0);
        assert!(term_valuation(p(3), 2, &one).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(ck_divisibility_bound(p(2), 5, 5).unwrap(), 3);
        assert_eq!(ck_divisibility_bound(p(2), 5, 6).unwrap(), 2);
        assert_eq!(ck_divisibility_bound(p(3), 1, 1).unwrap(), 0);
        assert!(ck_divisibility_bound(p(3), 4, 3).is_err());
    }

    #[test]
    fn bound_table_matches_enumeration() {
        for prime in [p(2), p(3), p(5), p(7)] {
            for q in 1..=12u64 {
                let k_max = q + 40;
                let table = divisibility_bound_table(prime, q, k_max).unwrap();
                for k in q..=k_max {
                    assert_eq!(
                        table[(k - q) as usize],
                        ck_divisibility_bound(prime, q, k).unwrap(),
                        "p={prime}, q={q}, k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn ranges_examples() {
        let (first, second) = dchern_ranges(p(2), 5, 2).unwrap();
        assert_eq!((first.k_min, first.last(), first.exponent), (5, Some(5), 3));
        let second = second.unwrap();
        assert_eq!((second.k_min, second.k_max.clone(), second.inclusive), (5, BigUint::from(8u32), false));
        assert_eq!(second.exponent, 2);
        for k in 5..8 {
            assert!(ck_divisibility_bound(p(2), 5, k).unwrap() >= 2);
        }

        let (_, none) = dchern_ranges(p(3), 2, 1).unwrap();
        assert!(none.is_none());

        let (first, _) = dchern_ranges(p(2), 1, 1).unwrap();
        assert_eq!((first.k_min, first.last(), first.exponent), (1, Some(1), 0));
    }

    #[test]
    fn range_json() {
        let (first, second) = dchern_ranges(p(2), 5, 2).unwrap();
        assert_eq!(
            serde_json::to_value(&second).unwrap(),
            serde_json::json!({"k_min": 5, "k_max": 8, "inclusive": false, "exponent": 2})
        );
        assert_eq!(
            serde_json::to_value(&first).unwrap(),
            serde_json::json!({"k_min": 5, "k_max": 5, "inclusive": true, "exponent": 3})
        );
        let report = ck_divisibility_report(p(2), 5, 10).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["valuation"], report.term_valuation);
        assert!(json["partition"].is_array());
        assert!(json["breakdown"].is_array());
    }

    #[test]
    fn huge_range_exponent_serializes_as_string() {
        let (_, second) = dchern_ranges(p(2), 200, 1).unwrap();
        let json = serde_json::to_value(second.unwrap()).unwrap();
        assert_eq!(json["k_max"], serde_json::json!(BigUint::from(2u32).pow(199).to_string()));
    }

    #[test]
    fn boundary_equality_small_grid() {
        for prime in [p(3), p(5), p(7)] {
            for q in 1..=30u64 {
                for l in 1..=4u64 {
                    if let Some((t, v)) = lemma2_boundary(prime, q, l) {
                        assert_eq!(v, l as i64, "p={prime}, q={q}, l={l}");
                        assert_eq!(fractional_part_sum(prime, q, &t), ExactRational::one());
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn digit_dp_matches_brute_force_random(pi in 0usize..6, q in 1u64..80, t_max in 0u64..5000) {
            let prime = primes_up_to(13)[pi];
            prop_assert_eq!(
                lemma_lhs_min_digits(prime, q, &BigUint::from(t_max)),
                lemma_lhs_min_brute(prime, q, t_max)
            );
        }
    }
}

//! Brute-force verification suites. Each suite sweeps a parameter grid,
//! counts the cases it checked, and collects counterexamples rather than
//! stopping at the first one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::acs::{a_of_n, condition_a, condition_b, corollary_threshold, find_witness, BundleParams};
use crate::cherndiv::{
    ck_divisibility_bound, dchern_ranges, divisibility_bound_table, fractional_part_sum,
    lemma2_boundary, lemma_vp1_check, lemma_vp2_check, LemmaCheck, MAX_TABLE_WEIGHT,
};
use crate::error::{Error, Result};
use crate::padic::{
    big_pow, digit_sum, digit_sum_bound, ilog, legendre_digit_form, legendre_floor_sum,
    primes_up_to, ExactRational, Prime,
};
use crate::symfunc::{
    oracle_eval, powersums_from_sigma, sigma_from_powersums, RootMultiset,
    MAX_PARTITION_SPAN,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LemmaSp,
    LemmaVp,
    Newton,
    Legendre,
    Dchern,
    Corollary,
    MainTheorem,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::LemmaSp,
        Suite::LemmaVp,
        Suite::Newton,
        Suite::Legendre,
        Suite::Dchern,
        Suite::Corollary,
        Suite::MainTheorem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaSp => "lemma-sp",
            Suite::LemmaVp => "lemma-vp",
            Suite::Newton => "newton",
            Suite::Legendre => "legendre",
            Suite::Dchern => "dchern",
            Suite::Corollary => "corollary",
            Suite::MainTheorem => "main-theorem",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

/// Grid bounds. Unset fields take per-suite defaults matching the
/// acceptance grids.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bounds {
    pub n_max: Option<u64>,
    pub p_max: Option<u64>,
    pub q_max: Option<u64>,
    pub q_span: Option<u64>,
    pub l_max: Option<u64>,
    pub k_max: Option<u64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub case: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub bounds: BTreeMap<String, u64>,
    pub cases_checked: u64,
    pub failures: Vec<Counterexample>,
    pub anomalies: Vec<String>,
}

impl VerifyReport {
    fn new(suite: Suite, bounds: &[(&str, u64)]) -> Self {
        Self {
            suite,
            bounds: bounds.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            cases_checked: 0,
            failures: Vec::new(),
            anomalies: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn absorb(&mut self, (cases, failures): (u64, Vec<Counterexample>)) {
        self.cases_checked += cases;
        self.failures.extend(failures);
    }
}

fn fail(case: String, detail: impl Into<String>) -> Counterexample {
    Counterexample {
        case,
        detail: detail.into(),
    }
}

/// Runs and merges in a deterministic order.
fn par_collect<T, F>(items: Vec<T>, f: F) -> (u64, Vec<Counterexample>)
where
    T: Send,
    F: Fn(T) -> (u64, Vec<Counterexample>) + Sync + Send,
{
    let parts: Vec<_> = items.into_par_iter().map(f).collect();
    parts
        .into_iter()
        .fold((0, Vec::new()), |(c, mut f), (c2, f2)| {
            f.extend(f2);
            (c + c2, f)
        })
}

pub fn run(suite: Suite, bounds: &Bounds) -> Result<VerifyReport> {
    match suite {
        Suite::LemmaSp => Ok(lemma_sp(bounds.p_max.unwrap_or(50), bounds.n_max.unwrap_or(100_000))),
        Suite::LemmaVp => Ok(lemma_vp(
            bounds.p_max.unwrap_or(13),
            bounds.q_max.unwrap_or(60),
            bounds.l_max.unwrap_or(6),
        )),
        Suite::Newton => newton(
            bounds.k_max.unwrap_or(12),
            bounds.samples.unwrap_or(200),
            bounds.seed.unwrap_or(0x5eed),
        ),
        Suite::Legendre => Ok(legendre(bounds.p_max.unwrap_or(100), bounds.n_max.unwrap_or(100_000))),
        Suite::Dchern => dchern(
            bounds.p_max.unwrap_or(5),
            bounds.q_max.unwrap_or(12),
            bounds.l_max.unwrap_or(4),
        ),
        Suite::Corollary => corollary(bounds.n_max.unwrap_or(10_000)),
        Suite::MainTheorem => main_theorem(bounds.n_max.unwrap_or(50), bounds.q_span.unwrap_or(150)),
    }
}

/// Digit-sum bound `S_p(n) <= (p-1)(⌊log_p n⌋ + 1)` and its equality set.
pub fn lemma_sp(p_max: u64, n_max: u64) -> VerifyReport {
    let mut report = VerifyReport::new(Suite::LemmaSp, &[("p_max", p_max), ("n_max", n_max)]);
    let primes = primes_up_to(p_max);
    report.absorb(par_collect(primes.clone(), |p| {
        let mut failures = Vec::new();
        for n in 1..=n_max {
            let bound = digit_sum_bound(p, n).expect("n >= 1");
            let s = digit_sum(p.get(), n);
            if s > bound {
                failures.push(fail(format!("p={p}, n={n}"), format!("S_p(n)={s} > {bound}")));
            }
            // Equality exactly at n = p^d - 1 with d = ⌊log_p n⌋ + 1.
            let d = ilog(p.get(), n).expect("n >= 1") + 1;
            let is_top = p.get().checked_pow(d).is_some_and(|pd| pd - 1 == n);
            if (s == bound) != is_top {
                failures.push(fail(
                    format!("p={p}, n={n}"),
                    format!("equality={} but n = p^d - 1 is {is_top}", s == bound),
                ));
            }
        }
        (n_max, failures)
    }));

    // p^⌊log_p n⌋ <= n, so the form p^⌊log_p n⌋ - 1 can never equal n.
    let equality_cases: u64 = primes
        .iter()
        .map(|&p| {
            (1..)
                .map_while(|d| p.get().checked_pow(d))
                .take_while(|&pd| pd - 1 <= n_max)
                .count() as u64
        })
        .sum();
    let literal_hits: u64 = primes
        .iter()
        .map(|&p| {
            (1..=n_max)
                .filter(|&n| {
                    let e = ilog(p.get(), n).expect("n >= 1");
                    p.get().pow(e) - 1 == n && digit_sum(p.get(), n) == digit_sum_bound(p, n).unwrap()
                })
                .count() as u64
        })
        .sum();
    report.anomalies.push(format!(
        "equality holds exactly at n = p^d - 1 with d = floor(log_p n) + 1 ({equality_cases} cases); \
         the form n = p^floor(log_p n) - 1 matches {literal_hits} of them, since floor(log_p(p^d - 1)) = d - 1"
    ));
    report
}

/// Both estimates on `v_p((q+t-1)!/φ(t))` over their full `t`-ranges, the
/// boundary equality, and the fractional-part identity at the boundary.
pub fn lemma_vp(p_max: u64, q_max: u64, l_max: u64) -> VerifyReport {
    let mut report = VerifyReport::new(
        Suite::LemmaVp,
        &[("p_max", p_max), ("q_max", q_max), ("l_max", l_max)],
    );
    let cells: Vec<(Prime, u64)> = primes_up_to(p_max)
        .into_iter()
        .flat_map(|p| (1..=q_max).map(move |q| (p, q)))
        .collect();
    report.absorb(par_collect(cells, |(p, q)| {
        let mut cases = 1;
        let mut failures = Vec::new();
        if !lemma_vp1_check(p, q) {
            failures.push(fail(format!("p={p}, q={q}"), "first estimate fails"));
        }
        for l in 1..=l_max {
            let case = format!("p={p}, q={q}, l={l}");
            match lemma_vp2_check(p, q, l) {
                LemmaCheck::NotApplicable => continue,
                LemmaCheck::Fails { min_valuation } => failures.push(fail(
                    case.clone(),
                    format!("min valuation {min_valuation} < {l}"),
                )),
                LemmaCheck::Holds { .. } => {}
            }
            cases += 1;
            if let Some((t, v)) = lemma2_boundary(p, q, l) {
                cases += 1;
                if v != l as i64 {
                    failures.push(fail(case.clone(), format!("boundary t={t}: valuation {v} != {l}")));
                }
                if fractional_part_sum(p, q, &t) != ExactRational::one() {
                    failures.push(fail(case, format!("boundary t={t}: fractional parts do not sum to 1")));
                }
            }
        }
        (cases, failures)
    }));
    report
}

/// Newton recurrence and the closed-form expansion against direct
/// polynomial evaluation at random integer roots.
pub fn newton(k_max: u64, samples: u64, seed: u64) -> Result<VerifyReport> {
    if k_max > MAX_PARTITION_SPAN {
        return Err(Error::ResourceLimit {
            what: "k_max",
            value: k_max,
            limit: MAX_PARTITION_SPAN,
        });
    }
    let mut report = VerifyReport::new(
        Suite::Newton,
        &[("k_max", k_max), ("samples", samples), ("seed", seed)],
    );
    let expansions: Vec<_> = (1..=k_max)
        .map(|k| sigma_from_powersums(k, 1))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let multisets: Vec<(usize, RootMultiset)> = (0..samples as usize)
        .map(|i| {
            let len = rng.gen_range(1..=8);
            let roots = (0..len).map(|_| rng.gen_range(-5..=5)).collect();
            (i, RootMultiset::new(roots).expect("nonempty"))
        })
        .collect();
    report.absorb(par_collect(multisets, |(i, roots)| {
        let mut failures = Vec::new();
        let (sigma, s): (Vec<_>, Vec<_>) = (1..=k_max)
            .map(|k| {
                let (a, b) = oracle_eval(&roots, k);
                (ExactRational::from_integer(a), ExactRational::from_integer(b))
            })
            .unzip();
        for k in 1..=k_max {
            let idx = (k - 1) as usize;
            let case = format!("sample={i}, roots={:?}, k={k}", roots.roots());
            let newton = powersums_from_sigma(k, &sigma).expect("k >= 1");
            if newton != s[idx] {
                failures.push(fail(case.clone(), format!("Newton s_k={newton}, direct {}", s[idx])));
            }
            let expanded = expansions[idx].evaluate(&s);
            if expanded != sigma[idx] {
                failures.push(fail(case, format!("expansion σ_k={expanded}, direct {}", sigma[idx])));
            }
        }
        (2 * k_max, failures)
    }));
    Ok(report)
}

/// `Σ ⌊n/p^k⌋ = (n - S_p(n))/(p - 1)`.
pub fn legendre(p_max: u64, n_max: u64) -> VerifyReport {
    let mut report = VerifyReport::new(Suite::Legendre, &[("p_max", p_max), ("n_max", n_max)]);
    report.absorb(par_collect(primes_up_to(p_max), |p| {
        let failures = (0..=n_max)
            .filter_map(|n| {
                let floor_sum = legendre_floor_sum(p, n);
                let digit_form = legendre_digit_form(p, n);
                (Some(floor_sum) != digit_form).then(|| {
                    fail(format!("p={p}, n={n}"), format!("{floor_sum} vs {digit_form:?}"))
                })
            })
            .collect();
        (n_max + 1, failures)
    }));
    report
}

/// Every `k` in the guaranteed ranges has a computed bound at least the
/// guaranteed exponent. Bounds come from the part-count dynamic program;
/// wherever enumeration is within its cap, the exhaustive minimum is
/// computed too and must agree.
pub fn dchern(p_max: u64, q_max: u64, l_max: u64) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(
        Suite::Dchern,
        &[("p_max", p_max), ("q_max", q_max), ("l_max", l_max)],
    );
    let cells: Vec<(Prime, u64)> = primes_up_to(p_max)
        .into_iter()
        .flat_map(|p| (1..=q_max).map(move |q| (p, q)))
        .collect();
    for (p, q) in &cells {
        for l in 1..=l_max {
            let (first, second) = dchern_ranges(*p, *q, l)?;
            for r in std::iter::once(&first).chain(second.as_ref()) {
                match r.last() {
                    Some(last) if last <= MAX_TABLE_WEIGHT => {}
                    _ => {
                        return Err(Error::ResourceLimit {
                            what: "range end",
                            value: r.last().unwrap_or(u64::MAX),
                            limit: MAX_TABLE_WEIGHT,
                        })
                    }
                }
            }
        }
    }
    report.absorb(par_collect(cells, |(p, q)| {
        let mut cases = 0;
        let mut failures = Vec::new();
        let ranges: Vec<_> = (1..=l_max)
            .map(|l| dchern_ranges(p, q, l).expect("valid arguments"))
            .collect();
        let k_top = ranges
            .iter()
            .flat_map(|(a, b)| std::iter::once(a).chain(b.as_ref()))
            .filter_map(|r| r.last())
            .max()
            .expect("range (i) is never empty");
        let table = divisibility_bound_table(p, q, k_top).expect("checked above");
        for k in q..=k_top {
            if k - q + 1 > MAX_PARTITION_SPAN {
                break;
            }
            let exhaustive = ck_divisibility_bound(p, q, k).expect("within cap");
            cases += 1;
            if exhaustive != table[(k - q) as usize] {
                failures.push(fail(
                    format!("p={p}, q={q}, k={k}"),
                    format!("enumeration {exhaustive} vs table {}", table[(k - q) as usize]),
                ));
            }
        }
        for (l, (first, second)) in (1..=l_max).zip(&ranges) {
            for (label, r) in std::iter::once(("i", first)).chain(second.iter().map(|r| ("ii", r))) {
                let last = r.last().expect("bounded");
                for k in r.k_min..=last {
                    cases += 1;
                    let bound = table[(k - q) as usize];
                    if bound < r.exponent {
                        failures.push(fail(
                            format!("p={p}, q={q}, l={l}, range ({label}), k={k}"),
                            format!("bound {bound} < guaranteed {}", r.exponent),
                        ));
                    }
                }
            }
        }
        (cases, failures)
    }));
    Ok(report)
}

/// `q = corollary_threshold(n)` gives `2^(q-ν-2) - q > n`.
pub fn corollary(n_max: u64) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(Suite::Corollary, &[("n_max", n_max)]);
    let ns: Vec<u64> = (1..=n_max).collect();
    report.absorb(par_collect(ns, |n| {
        let q = corollary_threshold(n);
        let nu = u64::from((n + 1).trailing_zeros());
        let case = format!("n={n}, q={q}");
        let mut failures = Vec::new();
        let lhs = big_pow(Prime::TWO, q - nu - 2) - BigInt::from(q);
        if lhs <= BigInt::from(n) {
            failures.push(fail(case.clone(), format!("2^(q-ν-2) - q = {lhs} <= n")));
        }
        let params = BundleParams::cpn(n, q).expect("positive");
        match condition_b(Prime::TWO, &params) {
            Ok(Some(cert)) if cert.lhs == lhs => {}
            other => failures.push(fail(case, format!("condition (b) at 2 gave {other:?}"))),
        }
        (1, failures)
    }));
    Ok(report)
}

/// Witnesses for every `q >= a(n)` on `CP^n`, already at `p ∈ {2, 3}`, and no
/// witness at `q ∈ {1, 3}`.
pub fn main_theorem(n_max: u64, q_span: u64) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(Suite::MainTheorem, &[("n_max", n_max), ("q_span", q_span)]);
    let mut cells = Vec::new();
    for n in 1..=n_max {
        let a = a_of_n(n)?;
        cells.extend((a..=a + q_span).map(|q| (n, q, true)));
        cells.extend([1, 3].map(|q| (n, q, false)));
    }
    report.absorb(par_collect(cells, |(n, q, expect)| {
        let params = BundleParams::cpn(n, q).expect("positive");
        let case = format!("n={n}, q={q}");
        let witness = find_witness(&params).expect("chi > 0");
        let mut failures = Vec::new();
        if expect {
            match &witness {
                None => failures.push(fail(case.clone(), "no witness although q >= a(n)")),
                Some(cert) if !cert.check_fields() => {
                    failures.push(fail(case.clone(), "certificate does not re-verify"))
                }
                Some(_) => {}
            }
            let small = [Prime::TWO, Prime::THREE].into_iter().any(|p| {
                matches!(condition_b(p, &params), Ok(Some(_)))
                    || matches!(condition_a(p, &params), Ok(Some(_)))
            });
            if !small {
                failures.push(fail(case, "no witness among p = 2, 3"));
            }
        } else if let Some(cert) = witness {
            failures.push(fail(case, format!("negative control produced a witness at p={}", cert.prime)));
        }
        (1, failures)
    }));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_grids_pass() {
        let b = Bounds {
            n_max: Some(300),
            p_max: Some(7),
            q_max: Some(8),
            q_span: Some(10),
            l_max: Some(3),
            k_max: Some(6),
            samples: Some(10),
            seed: None,
        };
        for suite in Suite::ALL {
            let report = run(suite, &b).unwrap();
            assert!(report.passed(), "{suite}: {:?}", report.failures);
            assert!(report.cases_checked > 0, "{suite}");
        }
    }

    #[test]
    fn lemma_sp_reports_anomaly() {
        let report = lemma_sp(5, 200);
        assert!(report.passed());
        assert_eq!(report.anomalies.len(), 1);
        assert!(report.anomalies[0].contains("matches 0 of them"));
    }
}

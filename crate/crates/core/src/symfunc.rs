//! Exact symmetric-function algebra in the variables `t_1, ..., t_n`.
//!
//! `σ_k` is the k-th elementary symmetric polynomial and `s_k = Σ t_i^k` the
//! k-th power sum. The two bases are related by the Newton recurrence
//!
//! ```text
//! s_k - σ_1 s_{k-1} + σ_2 s_{k-2} - ... + (-1)^{k-1} σ_{k-1} s_1 + (-1)^k k σ_k = 0
//! ```
//!
//! and inverted in closed form by
//!
//! ```text
//! (-1)^k σ_k = Σ_{m_1 + 2 m_2 + ... + k m_k = k} (-1)^{Σ m_i} / ∏ m_i! · ∏ (s_i / i)^{m_i}
//! ```
//!
//! [`oracle_eval`] computes both quantities by direct expansion so the other
//! routines can be checked against something that never uses either formula.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::ExactRational;

/// Largest number of multiplicity slots (`k - lowest_part + 1`) the
/// enumerator accepts.
pub const MAX_PARTITION_SPAN: u64 = 64;

/// Multiplicities `(m_q, m_{q+1}, ..., m_k)` of a partition of `k` into parts
/// no smaller than `q`. Index `i` holds the multiplicity of part `q + i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionVector {
    lowest_part: u64,
    multiplicities: Vec<u64>,
}

impl PartitionVector {
    pub fn new(lowest_part: u64, multiplicities: Vec<u64>) -> Result<Self> {
        if lowest_part == 0 {
            return Err(Error::InvalidArgument("lowest part must be positive".into()));
        }
        Ok(Self {
            lowest_part,
            multiplicities,
        })
    }

    /// Builds the vector for weight `k` from a list of parts.
    pub fn from_parts(k: u64, lowest_part: u64, parts: &[u64]) -> Result<Self> {
        if lowest_part == 0 || lowest_part > k {
            return Err(Error::InvalidArgument(format!(
                "lowest part {lowest_part} outside 1..={k}"
            )));
        }
        let mut m = vec![0; (k - lowest_part + 1) as usize];
        for &part in parts {
            if part < lowest_part || part > k {
                return Err(Error::InvalidArgument(format!(
                    "part {part} outside {lowest_part}..={k}"
                )));
            }
            m[(part - lowest_part) as usize] += 1;
        }
        let v = Self::new(lowest_part, m)?;
        if v.weight() != k {
            return Err(Error::InvalidArgument(format!(
                "parts sum to {}, expected {k}",
                v.weight()
            )));
        }
        Ok(v)
    }

    pub fn lowest_part(&self) -> u64 {
        self.lowest_part
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    /// Multiplicity of `part`; zero outside the stored window.
    pub fn multiplicity(&self, part: u64) -> u64 {
        part.checked_sub(self.lowest_part)
            .and_then(|i| self.multiplicities.get(i as usize))
            .copied()
            .unwrap_or(0)
    }

    /// `(part, multiplicity)` for every part that occurs.
    pub fn parts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.multiplicities
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(move |(i, &m)| (self.lowest_part + i as u64, m))
    }

    /// `Σ i · m_i`.
    pub fn weight(&self) -> u64 {
        self.parts().map(|(i, m)| i * m).sum()
    }

    /// `Σ m_i`.
    pub fn total_parts(&self) -> u64 {
        self.multiplicities.iter().sum()
    }

    /// Re-indexes to a larger lowest part, or `None` if a smaller part occurs.
    pub fn restrict_lowest(&self, lowest_part: u64) -> Option<Self> {
        if lowest_part < self.lowest_part {
            return None;
        }
        let skip = (lowest_part - self.lowest_part) as usize;
        if self.multiplicities.iter().take(skip).any(|&m| m > 0) {
            return None;
        }
        Some(Self {
            lowest_part,
            multiplicities: self.multiplicities.iter().skip(skip).copied().collect(),
        })
    }
}

/// All partitions of `k` into parts `>= lowest_part`.
///
/// Order: the descending part lists are produced in lexicographically
/// decreasing order, so `{k}` comes first. Returns an empty list when
/// `lowest_part > k`, and a resource error when the multiplicity window
/// `k - lowest_part + 1` exceeds [`MAX_PARTITION_SPAN`].
pub fn enumerate_partitions(k: u64, lowest_part: u64) -> Result<Vec<PartitionVector>> {
    if k == 0 || lowest_part == 0 {
        return Err(Error::InvalidArgument(
            "weight and lowest part must be positive".into(),
        ));
    }
    if lowest_part > k {
        return Ok(Vec::new());
    }
    let span = k - lowest_part + 1;
    if span > MAX_PARTITION_SPAN {
        return Err(Error::ResourceLimit {
            what: "partition span k - lowest_part + 1",
            value: span,
            limit: MAX_PARTITION_SPAN,
        });
    }

    fn walk(
        remaining: u64,
        max_part: u64,
        lowest: u64,
        m: &mut Vec<u64>,
        out: &mut Vec<PartitionVector>,
    ) {
        if remaining == 0 {
            out.push(PartitionVector {
                lowest_part: lowest,
                multiplicities: m.clone(),
            });
            return;
        }
        let mut part = max_part.min(remaining);
        while part >= lowest {
            m[(part - lowest) as usize] += 1;
            walk(remaining - part, part, lowest, m, out);
            m[(part - lowest) as usize] -= 1;
            part -= 1;
        }
    }

    let mut out = Vec::new();
    let mut m = vec![0; span as usize];
    walk(k, k, lowest_part, &mut m, &mut out);
    Ok(out)
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `(Σ m_i)! / ∏ m_i!`.
pub fn multinomial(m: &PartitionVector) -> BigUint {
    let num = factorial(m.total_parts());
    let den = m
        .multiplicities
        .iter()
        .fold(BigUint::one(), |acc, &mi| acc * factorial(mi));
    let (quot, rem) = num.div_rem(&den);
    assert!(rem.is_zero(), "multinomial division left a remainder");
    quot
}

/// `σ_k` as a rational combination of the monomials `∏ (s_i / i)^{m_i}`.
///
/// Coefficients are stored against the `∏ (s_i / i)^{m_i}` grouping, not raw
/// `∏ s_i^{m_i}`; see [`SymbolicCombination::to_raw_s_basis`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicCombination {
    weight: u64,
    lowest_part: u64,
    terms: Vec<(PartitionVector, ExactRational)>,
}

impl SymbolicCombination {
    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn lowest_part(&self) -> u64 {
        self.lowest_part
    }

    pub fn terms(&self) -> &[(PartitionVector, ExactRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates at power-sum values, `s[i - 1] = s_i`.
    pub fn evaluate(&self, s: &[ExactRational]) -> ExactRational {
        self.terms
            .iter()
            .map(|(m, coeff)| {
                m.parts().fold(coeff.clone(), |acc, (i, mi)| {
                    let base = &s[(i - 1) as usize] / ExactRational::from_integer(i.into());
                    acc * num_traits::pow(base, mi as usize)
                })
            })
            .fold(ExactRational::zero(), |acc, x| acc + x)
    }

    /// Coefficients against raw `∏ s_i^{m_i}`, i.e. divided by `∏ i^{m_i}`.
    pub fn to_raw_s_basis(&self) -> Vec<(PartitionVector, ExactRational)> {
        self.terms
            .iter()
            .map(|(m, coeff)| {
                let scale = m
                    .parts()
                    .fold(BigInt::one(), |acc, (i, mi)| acc * num_traits::pow(BigInt::from(i), mi as usize));
                (m.clone(), coeff / ExactRational::from_integer(scale))
            })
            .collect()
    }

    /// Drops every term using a part below `q` and re-indexes the rest to
    /// lowest part `q`. This is the specialization `s_1 = ... = s_{q-1} = 0`.
    pub fn vanish_below(&self, q: u64) -> SymbolicCombination {
        SymbolicCombination {
            weight: self.weight,
            lowest_part: q.max(self.lowest_part),
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| m.restrict_lowest(q.max(self.lowest_part)).map(|m| (m, c.clone())))
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct TermRecord<'a> {
    multiplicities: &'a [u64],
    lowest_part: u64,
    coefficient: String,
}

impl Serialize for SymbolicCombination {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&TermRecord {
                multiplicities: &m.multiplicities,
                lowest_part: m.lowest_part,
                coefficient: format!("{}/{}", c.numer(), c.denom()),
            })?;
        }
        seq.end()
    }
}

/// `σ_k` in terms of `s_lowest_part, ..., s_k`, with every lower power sum
/// set to zero. `lowest_part = 1` is the full expansion.
pub fn sigma_from_powersums(k: u64, lowest_part: u64) -> Result<SymbolicCombination> {
    let terms = enumerate_partitions(k, lowest_part)?
        .into_iter()
        .map(|m| {
            let sign_exp = k + m.total_parts();
            let den = m
                .multiplicities
                .iter()
                .fold(BigInt::one(), |acc, &mi| acc * BigInt::from(factorial(mi)));
            let num = if sign_exp.is_multiple_of(2) {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            (m, ExactRational::new(num, den))
        })
        .collect();
    Ok(SymbolicCombination {
        weight: k,
        lowest_part,
        terms,
    })
}

/// Power sums `s_1, ..., s_k` from `σ_1, σ_2, ...` by the Newton recurrence.
/// Missing `σ_j` are zero.
pub fn powersums_upto(k: u64, sigma: &[ExactRational]) -> Vec<ExactRational> {
    let sigma_at = |j: usize| sigma.get(j - 1).cloned().unwrap_or_else(ExactRational::zero);
    let mut s: Vec<ExactRational> = Vec::with_capacity(k as usize);
    for j in 1..=k as usize {
        let mut acc = ExactRational::zero();
        for i in 1..j {
            let term = sigma_at(i) * &s[j - i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let last = sigma_at(j) * ExactRational::from_integer(BigInt::from(j));
        if j % 2 == 1 {
            acc += last;
        } else {
            acc -= last;
        }
        s.push(acc);
    }
    s
}

/// `s_k` from `σ_1, ..., σ_k` by the Newton recurrence.
pub fn powersums_from_sigma(k: u64, sigma: &[ExactRational]) -> Result<ExactRational> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    Ok(powersums_upto(k, sigma).pop().expect("k >= 1"))
}

/// Integer evaluation points `t_1, ..., t_n`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootMultiset {
    roots: Vec<i64>,
}

impl RootMultiset {
    pub fn new(roots: Vec<i64>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidArgument("root multiset must be nonempty".into()));
        }
        Ok(Self { roots })
    }

    pub fn roots(&self) -> &[i64] {
        &self.roots
    }
}

/// `(σ_k, s_k)` by direct expansion: `σ_k` sums the products of all size-k
/// sub-multisets (zero when `k > n`), `s_k` sums k-th powers.
pub fn oracle_eval(roots: &RootMultiset, k: u64) -> (BigInt, BigInt) {
    fn subsets(roots: &[i64], k: usize, acc: BigInt, out: &mut BigInt) {
        if k == 0 {
            *out += acc;
            return;
        }
        if roots.len() < k {
            return;
        }
        subsets(&roots[1..], k - 1, &acc * roots[0], out);
        subsets(&roots[1..], k, acc, out);
    }

    let mut sigma = BigInt::zero();
    subsets(&roots.roots, k as usize, BigInt::one(), &mut sigma);
    let power_sum = roots
        .roots
        .iter()
        .map(|&t| num_traits::pow(BigInt::from(t), k as usize))
        .sum();
    (sigma, power_sum)
}

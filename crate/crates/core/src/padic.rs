//! Exact p-adic valuation arithmetic.
//!
//! Everything here works on exact integers. Floors of logarithms are computed
//! by integer comparison, never through floating point, and φ(t) is kept in
//! factored form because its expanded value grows super-exponentially.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

/// A prime number, checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub const TWO: Prime = Prime(2);
    pub const THREE: Prime = Prime(3);

    pub fn new(value: u64) -> Result<Self> {
        if is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `δ_p = v_p(2)`: 1 for p = 2, 0 otherwise.
    #[inline]
    pub fn delta(self) -> u64 {
        u64::from(self.0 == 2)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

/// A p-adic valuation. The valuation of zero is [`Valuation::Infinite`],
/// which absorbs addition and compares above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl From<i64> for Valuation {
    fn from(v: i64) -> Self {
        Valuation::Finite(v)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => v.fmt(f),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_none(),
        }
    }
}

/// A positive integer stored as `prime -> exponent`. The empty map is 1.
///
/// Serializes as a JSON object with decimal string keys, e.g. `{"2": 3, "5": 1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PrimeFactorization {
    factors: BTreeMap<u64, u64>,
}

impl PrimeFactorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization, dropping zero exponents.
    pub fn from_factors(factors: impl IntoIterator<Item = (Prime, u64)>) -> Self {
        let mut map = BTreeMap::new();
        for (p, e) in factors {
            if e > 0 {
                *map.entry(p.get()).or_insert(0) += e;
            }
        }
        Self { factors: map }
    }

    pub fn exponent(&self, p: Prime) -> u64 {
        self.factors.get(&p.get()).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Prime, u64)> + '_ {
        self.factors.iter().map(|(&p, &e)| (Prime(p), e))
    }

    /// Expands to the represented integer. Only sensible for small values.
    pub fn to_biguint(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (&p, &e)| {
                acc * BigUint::from(p).pow(e as u32)
            })
    }
}

/// Deterministic primality for all of `u64` (Miller-Rabin with a base set
/// known to be exact below 2^64).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for &a in &SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= bound`, ascending (sieve of Eratosthenes).
pub fn primes_up_to(bound: u64) -> Vec<Prime> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(Prime(i as u64));
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// `v_p(m)`; `Infinite` for `m = 0`.
pub fn vp_int(p: Prime, m: &BigInt) -> Valuation {
    if m.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigUint::from(p.get());
    let mut mag = m.magnitude().clone();
    let mut e = 0i64;
    loop {
        let (quot, rem) = mag.div_rem(&p);
        if !rem.is_zero() {
            return Valuation::Finite(e);
        }
        mag = quot;
        e += 1;
    }
}

/// `v_p(m)` for a machine integer.
pub fn vp_u64(p: Prime, mut m: u64) -> Valuation {
    if m == 0 {
        return Valuation::Infinite;
    }
    let mut e = 0;
    while m.is_multiple_of(p.get()) {
        m /= p.get();
        e += 1;
    }
    Valuation::Finite(e)
}

/// `v_p(r) = v_p(num) - v_p(den)`; `Infinite` for `r = 0`.
pub fn vp_rat(p: Prime, r: &ExactRational) -> Valuation {
    match (vp_int(p, r.numer()), vp_int(p, r.denom())) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        _ => Valuation::Infinite,
    }
}

/// Sum of the base-`base` digits of `n`. `base` need not be prime.
///
/// Panics if `base < 2`.
pub fn digit_sum(base: u64, mut n: u64) -> u64 {
    assert!(base >= 2, "digit base must be at least 2");
    let mut s = 0;
    while n > 0 {
        s += n % base;
        n /= base;
    }
    s
}

/// Base-`base` digits of `n`, least significant first. Zero has no digits.
pub fn digits_big(base: u64, n: &BigUint) -> Vec<u64> {
    assert!(base >= 2, "digit base must be at least 2");
    let b = BigUint::from(base);
    let mut out = Vec::new();
    let mut n = n.clone();
    while !n.is_zero() {
        let (quot, rem) = n.div_rem(&b);
        out.push(rem.to_u64().expect("digit fits in u64"));
        n = quot;
    }
    out
}

/// Largest `e` with `base^e <= n`, by integer comparison. `None` for `n = 0`.
pub fn ilog(base: u64, n: u64) -> Option<u32> {
    assert!(base >= 2, "log base must be at least 2");
    if n == 0 {
        return None;
    }
    let mut e = 0;
    let mut pow = 1u64;
    while let Some(next) = pow.checked_mul(base) {
        if next > n {
            break;
        }
        pow = next;
        e += 1;
    }
    Some(e)
}

/// Upper bound `(p - 1)(⌊log_p n⌋ + 1)` on the base-p digit sum of `n >= 1`.
pub fn digit_sum_bound(p: Prime, n: u64) -> Option<u64> {
    ilog(p.get(), n).map(|e| (p.get() - 1) * (u64::from(e) + 1))
}

/// `Σ_{k≥1} ⌊n / p^k⌋`.
pub fn legendre_floor_sum(p: Prime, n: u64) -> u64 {
    let mut sum = 0;
    let mut m = n;
    while m > 0 {
        m /= p.get();
        sum += m;
    }
    sum
}

/// `(n - S_p(n)) / (p - 1)`, or `None` if the division is inexact.
pub fn legendre_digit_form(p: Prime, n: u64) -> Option<u64> {
    let num = n - digit_sum(p.get(), n);
    let den = p.get() - 1;
    num.is_multiple_of(den).then_some(num / den)
}

/// `v_p(n!)`. Both forms of Legendre's formula are evaluated; a disagreement
/// is an arithmetic bug and panics.
pub fn vp_factorial(p: Prime, n: u64) -> u64 {
    let floor_sum = legendre_floor_sum(p, n);
    let digit_form = legendre_digit_form(p, n);
    assert_eq!(
        Some(floor_sum),
        digit_form,
        "Legendre forms disagree for p={p}, n={n}"
    );
    floor_sum
}

/// `v_p(n!)` for a big `n`, by the floor sum.
pub fn vp_factorial_big(p: Prime, n: &BigUint) -> BigUint {
    let b = BigUint::from(p.get());
    let mut sum = BigUint::zero();
    let mut m = n / &b;
    while !m.is_zero() {
        sum += &m;
        m /= &b;
    }
    sum
}

/// `v_p(φ(t)) = ⌊t / (p - 1)⌋`.
#[inline]
pub fn vp_phi(p: Prime, t: u64) -> u64 {
    t / (p.get() - 1)
}

/// `φ(t) = ∏_p p^⌊t/(p-1)⌋`. Only primes `p <= t + 1` contribute.
pub fn phi(t: u64) -> PrimeFactorization {
    PrimeFactorization::from_factors(
        primes_up_to(t.saturating_add(1))
            .into_iter()
            .map(|p| (p, vp_phi(p, t))),
    )
}

/// `p^e` as a big integer.
pub fn big_pow(p: Prime, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(p.get()), e as usize)
}

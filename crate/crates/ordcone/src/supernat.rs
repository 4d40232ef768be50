//! Supernatural numbers (generalized integers) and membership in the
//! subgroups of ℚ they determine.
//!
//! A supernatural number is a formal product `∏ p^e(p)` over primes with
//! exponents in `{0, 1, 2, …, ∞}`. It encodes the additive subgroup
//! `Z_n = { a/b : b divides n }` of the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exponent of a prime in a supernatural number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

impl Exponent {
    fn add(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a + b),
            _ => Exponent::Infinite,
        }
    }
}

/// A supernatural number in canonical form: a finite map from primes to
/// nonzero exponents, `∞` allowed. The empty map is the unit `1`.
///
/// Values are immutable after construction and safe to share across tasks.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Supernatural {
    exponents: BTreeMap<u64, Exponent>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Supernatural {
    /// The unit `1` (empty product).
    pub fn one() -> Self {
        Supernatural::default()
    }

    /// Builds a supernatural number from explicit `(prime, exponent)` pairs.
    /// Zero exponents are dropped; repeated primes accumulate.
    pub fn from_parts(parts: &[(u64, Exponent)]) -> Result<Self> {
        let mut exponents = BTreeMap::new();
        for &(p, e) in parts {
            if !is_prime(p) {
                return Err(Error::Precondition(format!("{p} is not prime")));
            }
            if e == Exponent::Finite(0) {
                continue;
            }
            let entry = exponents.entry(p).or_insert(Exponent::Finite(0));
            *entry = entry.add(e);
        }
        Ok(Supernatural { exponents })
    }

    /// Factors a positive integer into a (finite) supernatural number.
    pub fn from_integer(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("0 has no factorization".into()));
        }
        let mut rest = n;
        let mut exponents = BTreeMap::new();
        let mut d = 2u64;
        while d.saturating_mul(d) <= rest {
            while rest % d == 0 {
                rest /= d;
                exponents
                    .entry(d)
                    .and_modify(|e: &mut Exponent| *e = e.add(Exponent::Finite(1)))
                    .or_insert(Exponent::Finite(1));
            }
            d += 1;
        }
        if rest > 1 {
            exponents
                .entry(rest)
                .and_modify(|e: &mut Exponent| *e = e.add(Exponent::Finite(1)))
                .or_insert(Exponent::Finite(1));
        }
        Ok(Supernatural { exponents })
    }

    /// The product of a finite prefix of a multiplier sequence. Infinite
    /// sequences are supplied symbolically through [`Supernatural::from_parts`]
    /// with `Exponent::Infinite` declarations instead.
    pub fn from_sequence(prefix: &[u64]) -> Result<Self> {
        let mut acc = Supernatural::one();
        for &a in prefix {
            acc = acc.mul(&Supernatural::from_integer(a)?);
        }
        Ok(acc)
    }

    /// Declares every prime of `primes` to occur with exponent `∞`.
    pub fn infinite_over(primes: &[u64]) -> Result<Self> {
        let parts: Vec<(u64, Exponent)> =
            primes.iter().map(|&p| (p, Exponent::Infinite)).collect();
        Supernatural::from_parts(&parts)
    }

    pub fn exponent(&self, p: u64) -> Exponent {
        self.exponents.get(&p).copied().unwrap_or(Exponent::Finite(0))
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.exponents.keys().copied()
    }

    pub fn is_finite(&self) -> bool {
        self.exponents.values().all(|e| *e != Exponent::Infinite)
    }

    /// Componentwise sum of exponents; `∞` absorbs.
    pub fn mul(&self, other: &Supernatural) -> Supernatural {
        let mut exponents = self.exponents.clone();
        for (&p, &e) in &other.exponents {
            let entry = exponents.entry(p).or_insert(Exponent::Finite(0));
            *entry = entry.add(e);
        }
        exponents.retain(|_, e| *e != Exponent::Finite(0));
        Supernatural { exponents }
    }

    /// `self` divides `other` iff every exponent of `self` is dominated.
    pub fn divides(&self, other: &Supernatural) -> bool {
        self.exponents
            .iter()
            .all(|(&p, &e)| e <= other.exponent(p))
    }

    /// True iff the supports are disjoint.
    pub fn coprime(&self, other: &Supernatural) -> bool {
        self.exponents.keys().all(|p| !other.exponents.contains_key(p))
    }

    /// Membership of a rational in the subgroup `Z_n = { a/b : b | n }`.
    ///
    /// The denominator is stripped prime by prime against the support of
    /// `self`, so the input never needs to be factored.
    pub fn subgroup_contains(&self, x: &BigRational) -> bool {
        let mut den = x.denom().abs().to_biguint().expect("positive denominator");
        for (&p, &e) in &self.exponents {
            let pb = BigUint::from(p);
            match e {
                Exponent::Infinite => {
                    while (&den % &pb).is_zero() {
                        den /= &pb;
                    }
                }
                Exponent::Finite(k) => {
                    let mut budget = k;
                    while budget > 0 && (&den % &pb).is_zero() {
                        den /= &pb;
                        budget -= 1;
                    }
                }
            }
        }
        den.is_one()
    }
}

impl fmt::Display for Supernatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (&p, &e) in &self.exponents {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match e {
                Exponent::Finite(1) => write!(f, "{p}")?,
                Exponent::Finite(k) => write!(f, "{p}^{k}")?,
                Exponent::Infinite => write!(f, "{p}^inf")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Supernatural {
    type Err = Error;

    /// Parses the textual form `"2^inf*3^2*5"`: factors `p^e` joined by `*`,
    /// `e` a decimal or `inf`, `^1` optional. `"1"` denotes the unit.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Supernatural::one());
        }
        let mut parts = Vec::new();
        for factor in s.split('*') {
            let factor = factor.trim();
            let (p_str, e) = match factor.split_once('^') {
                None => (factor, Exponent::Finite(1)),
                Some((p, "inf")) => (p, Exponent::Infinite),
                Some((p, e_str)) => {
                    let e: u32 = e_str
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent {e_str:?}")))?;
                    (p, Exponent::Finite(e))
                }
            };
            let p: u64 = p_str
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime {p_str:?}")))?;
            if !is_prime(p) {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
            parts.push((p, e));
        }
        Supernatural::from_parts(&parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sn(s: &str) -> Supernatural {
        s.parse().unwrap()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn mul_adds_exponents() {
        assert_eq!(sn("2^3*5").mul(&sn("2*7")), sn("2^4*5*7"));
        assert_eq!(sn("2^inf").mul(&sn("2^5")), sn("2^inf"));
        assert_eq!(sn("1").mul(&sn("2^inf*3")), sn("2^inf*3"));
    }

    #[test]
    fn divides_is_pointwise_domination() {
        assert!(sn("2*3").divides(&sn("2^2*3*5")));
        assert!(!sn("2^inf").divides(&sn("2^9")));
        assert!(sn("1").divides(&sn("7^inf")));
        assert!(sn("2^3").divides(&sn("2^inf")));
    }

    #[test]
    fn coprime_means_disjoint_support() {
        assert!(sn("2^inf*3").coprime(&sn("5^inf")));
        assert!(!sn("2*7").coprime(&sn("7^3")));
        assert!(sn("1").coprime(&sn("1")));
    }

    #[test]
    fn subgroup_membership_checks_denominator() {
        assert!(sn("2^inf").subgroup_contains(&rat(7, 8)));
        assert!(!sn("2^inf").subgroup_contains(&rat(1, 6)));
        assert!(sn("3^2*7").subgroup_contains(&rat(5, 1)));
        assert!(sn("3^2").subgroup_contains(&rat(1, 9)));
        assert!(!sn("3^2").subgroup_contains(&rat(1, 27)));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["1", "2", "2^inf", "2^inf*3^2*5", "7^4"] {
            assert_eq!(sn(s).to_string(), s);
        }
        assert_eq!(sn("2^1*3"), sn("2*3"));
        assert!("4^2".parse::<Supernatural>().is_err());
        assert!("2^".parse::<Supernatural>().is_err());
    }

    #[test]
    fn from_sequence_multiplies_prefix() {
        let n = Supernatural::from_sequence(&[6, 10, 15]).unwrap();
        assert_eq!(n, sn("2^2*3^2*5^2"));
    }

    #[test]
    fn canonical_form_strips_zero_exponents() {
        let n = Supernatural::from_parts(&[(2, Exponent::Finite(0)), (3, Exponent::Finite(1))])
            .unwrap();
        assert_eq!(n, sn("3"));
    }
}

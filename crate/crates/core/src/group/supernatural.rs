//! Supernatural numbers, scales, and the multibase description of odometers.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Prime exponent of a supernatural number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

impl Exponent {
    fn covers(self, e: u32) -> bool {
        match self {
            Exponent::Finite(k) => e <= k,
            Exponent::Infinite => true,
        }
    }
}

/// Whether a value computed from a finite scale prefix is the true answer
/// for the infinite object or only what the prefix determines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    PrefixExact,
    PrefixPartial,
}

/// `N = ∏ p^{ε_p}` with `ε_p ∈ {0, 1, …, ∞}`; only nonzero exponents stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupernaturalNumber {
    exponents: BTreeMap<u64, Exponent>,
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Trial-division factorization, ascending primes.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl SupernaturalNumber {
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Exponent)>,
    {
        let mut exponents = BTreeMap::new();
        for (p, e) in pairs {
            if !is_prime(p) {
                return Err(Error::InvalidSupernatural(format!("{p} is not prime")));
            }
            if e == Exponent::Finite(0) {
                return Err(Error::InvalidSupernatural(format!("zero exponent stored for {p}")));
            }
            if exponents.insert(p, e).is_some() {
                return Err(Error::InvalidSupernatural(format!("prime {p} listed twice")));
            }
        }
        Ok(SupernaturalNumber { exponents })
    }

    pub fn from_integer(n: u64) -> Self {
        let exponents = factorize(n)
            .into_iter()
            .map(|(p, e)| (p, Exponent::Finite(e)))
            .collect();
        SupernaturalNumber { exponents }
    }

    /// `p^∞`.
    pub fn prime_power_infinite(p: u64) -> Result<Self> {
        Self::new([(p, Exponent::Infinite)])
    }

    pub fn exponent(&self, p: u64) -> Exponent {
        self.exponents.get(&p).copied().unwrap_or(Exponent::Finite(0))
    }

    pub fn exponents(&self) -> impl Iterator<Item = (u64, Exponent)> + '_ {
        self.exponents.iter().map(|(&p, &e)| (p, e))
    }

    pub fn is_infinite(&self) -> bool {
        self.exponents.values().any(|e| *e == Exponent::Infinite)
    }

    /// `n | N` for a positive integer `n`.
    pub fn is_divisible_by(&self, n: u64) -> bool {
        n > 0 && factorize(n).into_iter().all(|(p, e)| self.exponent(p).covers(e))
    }

    /// `self | other`.
    pub fn divides(&self, other: &SupernaturalNumber) -> bool {
        self.exponents.iter().all(|(&p, &e)| match (e, other.exponent(p)) {
            (_, Exponent::Infinite) => true,
            (Exponent::Infinite, Exponent::Finite(_)) => false,
            (Exponent::Finite(a), Exponent::Finite(b)) => a <= b,
        })
    }

    /// Exponent-wise maximum.
    pub fn lcm(&self, other: &SupernaturalNumber) -> SupernaturalNumber {
        let mut exponents = self.exponents.clone();
        for (&p, &e) in &other.exponents {
            let slot = exponents.entry(p).or_insert(e);
            *slot = (*slot).max(e);
        }
        SupernaturalNumber { exponents }
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|(p, e)| match e {
                Exponent::Finite(1) => format!("{p}"),
                Exponent::Finite(k) => format!("{p}^{k}"),
                Exponent::Infinite => format!("{p}^inf"),
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A finite prefix `s_1 < s_2 < … < s_m` of a scale, `s_i | s_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scale {
    terms: Vec<u64>,
}

impl Scale {
    pub fn new(terms: Vec<u64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidScale("empty scale".into()));
        }
        if terms[0] < 2 {
            return Err(Error::InvalidScale(format!("s_1 = {} must be at least 2", terms[0])));
        }
        for (i, w) in terms.windows(2).enumerate() {
            if w[1] % w[0] != 0 {
                return Err(Error::InvalidScale(format!(
                    "s_m divides s_{{m+1}} violated at m={}: {} does not divide {}",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
            if w[1] <= w[0] {
                return Err(Error::InvalidScale(format!(
                    "s_m < s_{{m+1}} violated at m={}: {} >= {}",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(Scale { terms })
    }

    /// `(p, p^2, …, p^len)`.
    pub fn powers(p: u64, len: usize) -> Result<Self> {
        let mut terms = Vec::with_capacity(len);
        let mut s = 1u64;
        for _ in 0..len {
            s = s
                .checked_mul(p)
                .ok_or_else(|| Error::InvalidScale("scale term overflows u64".into()))?;
            terms.push(s);
        }
        Scale::new(terms)
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `s_m` with the convention `s_0 = 1`.
    pub fn term(&self, m: usize) -> Option<u64> {
        if m == 0 {
            Some(1)
        } else {
            self.terms.get(m - 1).copied()
        }
    }

    pub fn last(&self) -> u64 {
        *self.terms.last().expect("scale is nonempty")
    }

    /// Smallest stored index `i ≥ 1` with `modulus | s_i`.
    pub fn resolving_index(&self, modulus: u64) -> Option<usize> {
        self.terms.iter().position(|s| s % modulus == 0).map(|i| i + 1)
    }
}

/// The supernatural limit of a scale: `ε_p(N) = sup_m ε_p(s_m)`.
///
/// Only a prefix is stored, so the result is always prefix-partial: a
/// prime whose exponent keeps growing in the infinite scale shows up with
/// its last stored exponent.
pub fn scale_limit(scale: &Scale) -> (SupernaturalNumber, Exactness) {
    let n = scale
        .terms
        .iter()
        .map(|&s| SupernaturalNumber::from_integer(s))
        .fold(SupernaturalNumber::default(), |acc, s| acc.lcm(&s));
    (n, Exactness::PrefixPartial)
}

/// `s_1 = b_1`, `s_n = b_n s_{n-1}`.
pub fn multibase_to_scale(bases: &[u64]) -> Result<Scale> {
    let mut terms = Vec::with_capacity(bases.len());
    let mut s = 1u64;
    for &b in bases {
        if b < 2 {
            return Err(Error::InvalidMultibase(b));
        }
        s = s
            .checked_mul(b)
            .ok_or_else(|| Error::InvalidScale("scale term overflows u64".into()))?;
        terms.push(s);
    }
    Scale::new(terms)
}

/// `(k_1, k_2, …) ↦ (k_1, k_1 + k_2 b_1, k_1 + k_2 b_1 + k_3 b_1 b_2, …)`.
pub fn multibase_point_to_scale_point(digits: &[u64], bases: &[u64]) -> Result<Vec<u64>> {
    if digits.len() != bases.len() {
        return Err(Error::IncompatiblePoints(format!(
            "{} digits for {} bases",
            digits.len(),
            bases.len()
        )));
    }
    let mut out = Vec::with_capacity(digits.len());
    let mut place = 1u64;
    let mut acc = 0u64;
    for (&k, &b) in digits.iter().zip(bases) {
        if b < 2 {
            return Err(Error::InvalidMultibase(b));
        }
        if k >= b {
            return Err(Error::DigitOutOfRange { digit: k, base: b });
        }
        acc += k * place;
        out.push(acc);
        place *= b;
    }
    Ok(out)
}

/// Carry addition in `G(b)` on a finite prefix; the carry out of the last
/// stored digit is dropped.
pub fn multibase_add(a: &[u64], b: &[u64], bases: &[u64]) -> Result<Vec<u64>> {
    if a.len() != bases.len() || b.len() != bases.len() {
        return Err(Error::IncompatiblePoints("digit/base length mismatch".into()));
    }
    let mut carry = 0u64;
    let mut out = Vec::with_capacity(bases.len());
    for ((&x, &y), &base) in a.iter().zip(b).zip(bases) {
        let (q, r) = (x + y + carry).div_rem(&base);
        out.push(r);
        carry = q;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limit_of(terms: &[u64]) -> String {
        scale_limit(&Scale::new(terms.to_vec()).unwrap()).0.to_string()
    }

    #[test]
    fn scale_limit_takes_exponent_maximum() {
        assert_eq!(limit_of(&[2, 4, 8, 16]), "2^4");
        assert_eq!(limit_of(&[6, 12, 24]), "2^3*3");
        assert_eq!(limit_of(&[2, 6, 30]), "2*3*5");
        let (_, exact) = scale_limit(&Scale::new(vec![2, 4]).unwrap());
        assert_eq!(exact, Exactness::PrefixPartial);
    }

    #[test]
    fn multibase_cumulative_product() {
        assert_eq!(multibase_to_scale(&[2, 2, 2]).unwrap().terms(), &[2, 4, 8]);
        assert_eq!(multibase_to_scale(&[2, 3, 5]).unwrap().terms(), &[2, 6, 30]);
        assert_eq!(multibase_to_scale(&[10, 10]).unwrap().terms(), &[10, 100]);
        assert!(matches!(multibase_to_scale(&[2, 1]), Err(Error::InvalidMultibase(1))));
    }

    #[test]
    fn multibase_points_map_to_inverse_limit() {
        assert_eq!(multibase_point_to_scale_point(&[1, 1, 0], &[2, 2, 2]).unwrap(), vec![1, 3, 3]);
        assert_eq!(multibase_point_to_scale_point(&[0, 0, 0], &[2, 2, 2]).unwrap(), vec![0, 0, 0]);
        assert_eq!(multibase_point_to_scale_point(&[1, 2], &[2, 3]).unwrap(), vec![1, 5]);
        assert!(matches!(
            multibase_point_to_scale_point(&[2, 0], &[2, 3]),
            Err(Error::DigitOutOfRange { digit: 2, base: 2 })
        ));
    }

    #[test]
    fn scale_validation_messages() {
        let err = Scale::new(vec![3, 5]).unwrap_err().to_string();
        assert!(err.contains("s_m divides s_{m+1} violated"), "{err}");
        assert!(Scale::new(vec![4, 4]).is_err());
        assert!(Scale::new(vec![1, 2]).is_err());
        assert!(Scale::new(vec![]).is_err());
    }

    #[test]
    fn supernatural_divisibility() {
        let two_inf = SupernaturalNumber::prime_power_infinite(2).unwrap();
        assert!(two_inf.is_infinite());
        assert!(two_inf.is_divisible_by(1 << 40));
        assert!(!two_inf.is_divisible_by(6));
        let n = SupernaturalNumber::new([(2, Exponent::Finite(3)), (3, Exponent::Infinite)]).unwrap();
        assert!(n.is_divisible_by(8 * 243));
        assert!(!n.is_divisible_by(16));
        assert!(SupernaturalNumber::from_integer(12).divides(&n));
        assert!(!two_inf.divides(&n));
        assert!(SupernaturalNumber::new([(4, Exponent::Finite(1))]).is_err());
        assert!(SupernaturalNumber::new([(2, Exponent::Finite(0))]).is_err());
    }

    #[test]
    fn carry_addition() {
        // 1 + 1 = 2 in base (2,2,2): digits little-endian
        assert_eq!(multibase_add(&[1, 0, 0], &[1, 0, 0], &[2, 2, 2]).unwrap(), vec![0, 1, 0]);
        assert_eq!(multibase_add(&[1, 1, 1], &[1, 0, 0], &[2, 2, 2]).unwrap(), vec![0, 0, 0]);
    }
}

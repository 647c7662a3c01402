//! Trigonometric polynomials on a monothetic group: finite sums of
//! characters.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Character, GroupPoint, GroupSpec};

/// Coefficients at or below this modulus are dropped after arithmetic.
pub const PRUNE: f64 = 1e-15;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigPoly {
    terms: BTreeMap<Character, Complex64>,
}

impl TrigPoly {
    pub fn zero() -> TrigPoly {
        TrigPoly::default()
    }

    pub fn from_terms<I>(terms: I) -> TrigPoly
    where
        I: IntoIterator<Item = (Character, Complex64)>,
    {
        let mut p = TrigPoly::zero();
        for (chi, c) in terms {
            *p.terms.entry(chi).or_default() += c;
        }
        p.prune();
        p
    }

    pub fn monomial(chi: Character, c: Complex64) -> TrigPoly {
        TrigPoly::from_terms([(chi, c)])
    }

    pub fn constant(g: &GroupSpec, c: Complex64) -> TrigPoly {
        TrigPoly::monomial(g.trivial_character(), c)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > PRUNE);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Character, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, chi: &Character) -> Complex64 {
        self.terms.get(chi).copied().unwrap_or_default()
    }

    pub fn evaluate(&self, g: &GroupSpec, x: &GroupPoint) -> Result<Complex64> {
        let mut acc = Complex64::default();
        for (chi, c) in &self.terms {
            acc += c * g.character_eval(chi, x)?;
        }
        Ok(acc)
    }

    /// `f(x_k)`.
    pub fn eval_orbit(&self, g: &GroupSpec, k: i64) -> Result<Complex64> {
        let mut acc = Complex64::default();
        for (chi, c) in &self.terms {
            acc += c * g.character_at_orbit(chi, k)?;
        }
        Ok(acc)
    }

    /// `(f(x_start), …, f(x_{start+len-1}))`.
    pub fn eval_orbit_range(&self, g: &GroupSpec, start: i64, len: usize) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::default(); len];
        for (chi, c) in &self.terms {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot += c * g.character_at_orbit(chi, start + i as i64)?;
            }
        }
        Ok(out)
    }

    /// Haar integral: the trivial coefficient.
    pub fn mean(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|(chi, _)| chi.is_trivial())
            .map(|(_, c)| *c)
            .unwrap_or_default()
    }

    /// `f∘φⁿ`: each coefficient picks up `χ(x_n)`.
    pub fn compose_phi(&self, g: &GroupSpec, n: i64) -> Result<TrigPoly> {
        if n == 0 {
            return Ok(self.clone());
        }
        let mut out = TrigPoly::zero();
        for (chi, c) in &self.terms {
            out.terms.insert(chi.clone(), c * g.character_at_orbit(chi, n)?);
        }
        out.prune();
        Ok(out)
    }

    /// The `g` with `g∘φ − g = f`, normalized to mean zero.
    pub fn cocycle_solve(&self, g: &GroupSpec) -> Result<TrigPoly> {
        let m = self.mean();
        if m.norm() > 1e-14 {
            return Err(Error::MeanNotZero(m));
        }
        let mut out = TrigPoly::zero();
        for (chi, c) in &self.terms {
            if chi.is_trivial() {
                continue;
            }
            let step = g.character_at_orbit(chi, 1)? - 1.0;
            if step.norm() < 1e-14 {
                return Err(Error::DegenerateCharacter(chi.clone()));
            }
            out.terms.insert(chi.clone(), c / step);
        }
        out.prune();
        Ok(out)
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        TrigPoly::from_terms(self.terms.iter().chain(&other.terms).map(|(k, v)| (k.clone(), *v)))
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> TrigPoly {
        TrigPoly::from_terms(self.terms.iter().map(|(k, v)| (k.clone(), v * s)))
    }

    pub fn mul(&self, other: &TrigPoly) -> Result<TrigPoly> {
        let mut out: BTreeMap<Character, Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *out.entry(a.mul(b)?).or_default() += ca * cb;
            }
        }
        Ok(TrigPoly::from_terms(out))
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &TrigPoly) -> f64 {
        self.sub(other).terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn validate(&self, g: &GroupSpec) -> Result<()> {
        self.terms.keys().try_for_each(|chi| g.validate_character(chi))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum CharJson {
    Odometer {
        #[serde(rename = "M")]
        modulus: u64,
        j: i64,
    },
    Torus {
        m: Vec<i64>,
    },
}

impl CharJson {
    pub(crate) fn from_character(chi: &Character) -> CharJson {
        match chi {
            Character::Odometer { modulus, index } => CharJson::Odometer { modulus: *modulus, j: *index as i64 },
            Character::Torus { freq } => CharJson::Torus { m: freq.clone() },
        }
    }

    pub(crate) fn into_character(self) -> Result<Character> {
        match self {
            CharJson::Odometer { modulus, j } => Character::odometer(modulus, j),
            CharJson::Torus { m } => Ok(Character::torus(m)),
        }
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharJson::from_character(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Character {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Character, D::Error> {
        CharJson::deserialize(d)?.into_character().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    char: Character,
    re: f64,
    im: f64,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(chi, c)| TermJson { char: chi.clone(), re: c.re, im: c.im })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<TrigPoly, D::Error> {
        let terms = Vec::<TermJson>::deserialize(d)?;
        Ok(TrigPoly::from_terms(
            terms.into_iter().map(|t| (t.char, Complex64::new(t.re, t.im))),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn chi(m: u64, j: i64) -> Character {
        Character::odometer(m, j).unwrap()
    }

    fn g() -> GroupSpec {
        GroupSpec::p_adic(2, 8).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let g = g();
        let three = TrigPoly::constant(&g, c(3.0, 0.0));
        assert_eq!(three.eval_orbit(&g, 11).unwrap(), c(3.0, 0.0));
        let alt = TrigPoly::monomial(chi(2, 1), c(1.0, 0.0));
        assert_eq!(alt.evaluate(&g, &g.orbit_point(5)).unwrap(), c(-1.0, 0.0));
        let sum = alt.add(&TrigPoly::constant(&g, c(1.0, 0.0)));
        assert_eq!(sum.eval_orbit(&g, 2).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn mean_examples() {
        let g = g();
        let f = TrigPoly::from_terms([(g.trivial_character(), c(3.0, 0.0)), (chi(4, 1), c(2.0, 0.0))]);
        assert_eq!(f.mean(), c(3.0, 0.0));
        assert_eq!(TrigPoly::monomial(chi(4, 1), c(1.0, 0.0)).mean(), c(0.0, 0.0));
        assert_eq!(TrigPoly::zero().mean(), c(0.0, 0.0));
    }

    #[test]
    fn compose_examples() {
        let g = g();
        let f = TrigPoly::monomial(chi(4, 1), c(1.0, 0.0));
        assert_eq!(f.compose_phi(&g, 1).unwrap(), TrigPoly::monomial(chi(4, 1), c(0.0, 1.0)));
        assert_eq!(f.compose_phi(&g, 0).unwrap(), f);
        let one = TrigPoly::constant(&g, c(1.0, 0.0));
        assert_eq!(one.compose_phi(&g, 17).unwrap(), one);
    }

    fn check_cocycle(g: &GroupSpec, f: &TrigPoly, sol: &TrigPoly) {
        for k in 0..8 {
            let lhs = sol.eval_orbit(g, k + 1).unwrap() - sol.eval_orbit(g, k).unwrap();
            assert!((lhs - f.eval_orbit(g, k).unwrap()).norm() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn cocycle_examples() {
        let g = g();
        let f = TrigPoly::monomial(chi(2, 1), c(1.0, 0.0));
        let sol = f.cocycle_solve(&g).unwrap();
        assert_eq!(sol, TrigPoly::monomial(chi(2, 1), c(-0.5, 0.0)));
        check_cocycle(&g, &f, &sol);

        assert!(TrigPoly::zero().cocycle_solve(&g).unwrap().is_zero());

        let f = TrigPoly::monomial(chi(4, 1), c(1.0, 0.0));
        let sol = f.cocycle_solve(&g).unwrap();
        let expect = c(1.0, 0.0) / (c(0.0, 1.0) - 1.0);
        assert!((sol.coeff(&chi(4, 1)) - expect).norm() < 1e-16);
        check_cocycle(&g, &f, &sol);

        let bad = TrigPoly::constant(&g, c(1.0, 0.0));
        assert!(matches!(bad.cocycle_solve(&g), Err(Error::MeanNotZero(_))));
    }

    #[test]
    fn products_canonicalize() {
        let g = g();
        let a = TrigPoly::monomial(chi(4, 1), c(1.0, 0.0));
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, TrigPoly::monomial(chi(2, 1), c(1.0, 0.0)));
        let b = TrigPoly::monomial(chi(4, 3), c(1.0, 0.0));
        assert_eq!(a.mul(&b).unwrap(), TrigPoly::constant(&g, c(1.0, 0.0)));
    }

    #[test]
    fn json_shape() {
        let f = TrigPoly::monomial(chi(4, 1), c(1.0, -2.0));
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"[{"char":{"M":4,"j":1},"re":1.0,"im":-2.0}]"#);
        let back: TrigPoly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let t: TrigPoly = serde_json::from_str(r#"[{"char":{"m":[1,0]},"re":0.5,"im":0}]"#).unwrap();
        assert_eq!(t.coeff(&Character::torus(vec![1, 0])), c(0.5, 0.0));
    }
}

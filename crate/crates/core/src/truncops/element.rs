//! Elements of the polynomial algebras in normal form.
//!
//! Band `n` of an element carries a symbol `S_n(k) = seq(k) + f(x_k)` and
//! stands for the operator whose `(r, c)` entry with `r − c = n` is
//! `S_n(min(r, c))`. On `ℓ²(Z≥0)` this is `Uⁿ S_n(𝕂)` for `n ≥ 0` and
//! `S_n(𝕂)(U*)^{−n}` for `n < 0`; on `ℓ²(Z)` it is `VⁿM_f` for `n ≥ 0`
//! and `M_f Vⁿ` for `n < 0`, with no finitely supported part.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{Character, GroupSpec};
use crate::trigpoly::{TrigPoly, PRUNE};

use super::{Space, SpaceKind, TruncatedOperator};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Symbol {
    /// Finitely supported part, indexed by `k ≥ 0`.
    pub seq: Vec<Complex64>,
    pub poly: TrigPoly,
}

impl Symbol {
    pub fn poly(poly: TrigPoly) -> Symbol {
        Symbol { seq: Vec::new(), poly }
    }

    pub fn seq(seq: Vec<Complex64>) -> Symbol {
        let mut s = Symbol { seq, poly: TrigPoly::zero() };
        s.trim();
        s
    }

    pub fn is_zero(&self) -> bool {
        self.seq.is_empty() && self.poly.is_zero()
    }

    fn trim(&mut self) {
        while self.seq.last().is_some_and(|v| v.norm() <= PRUNE) {
            self.seq.pop();
        }
    }

    fn seq_at(&self, k: i64) -> Complex64 {
        if k < 0 {
            return Complex64::default();
        }
        self.seq.get(k as usize).copied().unwrap_or_default()
    }

    pub fn value(&self, g: &GroupSpec, k: i64) -> Result<Complex64> {
        Ok(self.seq_at(k) + self.poly.eval_orbit(g, k)?)
    }

    fn add(&self, other: &Symbol) -> Symbol {
        let n = self.seq.len().max(other.seq.len());
        let seq = (0..n)
            .map(|k| self.seq_at(k as i64) + other.seq_at(k as i64))
            .collect();
        let mut s = Symbol { seq, poly: self.poly.add(&other.poly) };
        s.trim();
        s
    }

    fn scale(&self, c: Complex64) -> Symbol {
        let mut s = Symbol {
            seq: self.seq.iter().map(|v| v * c).collect(),
            poly: self.poly.scale(c),
        };
        s.trim();
        s
    }
}

/// Generators of the polynomial algebras.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    U,
    Ustar,
    V,
    Vinv,
    MChar(Character),
}

impl Generator {
    /// Degree under the circle action.
    pub fn degree(&self) -> i64 {
        match self {
            Generator::U | Generator::V => 1,
            Generator::Ustar | Generator::Vinv => -1,
            Generator::MChar(_) => 0,
        }
    }

    pub fn kind(&self) -> Option<SpaceKind> {
        match self {
            Generator::U | Generator::Ustar => Some(SpaceKind::Plus),
            Generator::V | Generator::Vinv => Some(SpaceKind::Full),
            Generator::MChar(_) => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Generator::U => "U".into(),
            Generator::Ustar => "U*".into(),
            Generator::V => "V".into(),
            Generator::Vinv => "V^-1".into(),
            Generator::MChar(chi) => format!("M[{chi}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    kind: SpaceKind,
    bands: BTreeMap<i64, Symbol>,
}

impl AlgebraElement {
    pub fn zero(kind: SpaceKind) -> AlgebraElement {
        AlgebraElement { kind, bands: BTreeMap::new() }
    }

    pub fn from_bands<I>(kind: SpaceKind, bands: I) -> Result<AlgebraElement>
    where
        I: IntoIterator<Item = (i64, Symbol)>,
    {
        let mut out = AlgebraElement::zero(kind);
        for (n, s) in bands {
            if kind == SpaceKind::Full && !s.seq.is_empty() {
                return Err(Error::SpaceMismatch(
                    "finitely supported symbols only live on the half-line space".into(),
                ));
            }
            out.add_band(n, s);
        }
        Ok(out)
    }

    /// A single band with symbol `seq(𝕂) + M_f`.
    pub fn term(kind: SpaceKind, n: i64, seq: Vec<Complex64>, poly: TrigPoly) -> Result<AlgebraElement> {
        AlgebraElement::from_bands(kind, [(n, Symbol { seq, poly })])
    }

    pub fn scalar(g: &GroupSpec, kind: SpaceKind, c: Complex64) -> AlgebraElement {
        AlgebraElement::shift(g, kind, 0).scale(c)
    }

    pub fn identity(g: &GroupSpec, kind: SpaceKind) -> AlgebraElement {
        AlgebraElement::shift(g, kind, 0)
    }

    /// `Uⁿ`, `(U*)^{−n}`, or `Vⁿ`.
    pub fn shift(g: &GroupSpec, kind: SpaceKind, n: i64) -> AlgebraElement {
        let one = TrigPoly::constant(g, Complex64::new(1.0, 0.0));
        AlgebraElement::term(kind, n, Vec::new(), one).expect("no finite part")
    }

    pub fn mult(kind: SpaceKind, f: TrigPoly) -> AlgebraElement {
        AlgebraElement::term(kind, 0, Vec::new(), f).expect("no finite part")
    }

    /// The diagonal `a(𝕂)` for finitely supported `a`.
    pub fn diag(seq: Vec<Complex64>) -> AlgebraElement {
        AlgebraElement::term(SpaceKind::Plus, 0, seq, TrigPoly::zero()).expect("plus space")
    }

    /// `E_to⟨E_from, ·⟩`.
    pub fn matrix_unit(k_from: usize, k_to: usize) -> AlgebraElement {
        let mut seq = vec![Complex64::default(); k_from.min(k_to) + 1];
        seq[k_from.min(k_to)] = Complex64::new(1.0, 0.0);
        let n = k_to as i64 - k_from as i64;
        AlgebraElement::term(SpaceKind::Plus, n, seq, TrigPoly::zero()).expect("plus space")
    }

    pub fn generator(g: &GroupSpec, gen: &Generator) -> AlgebraElement {
        match gen {
            Generator::U => AlgebraElement::shift(g, SpaceKind::Plus, 1),
            Generator::Ustar => AlgebraElement::shift(g, SpaceKind::Plus, -1),
            Generator::V => AlgebraElement::shift(g, SpaceKind::Full, 1),
            Generator::Vinv => AlgebraElement::shift(g, SpaceKind::Full, -1),
            Generator::MChar(chi) => {
                AlgebraElement::mult(SpaceKind::Plus, TrigPoly::monomial(chi.clone(), Complex64::new(1.0, 0.0)))
            }
        }
    }

    /// Diagonal character generator on a chosen space.
    pub fn char_mult(kind: SpaceKind, chi: &Character) -> AlgebraElement {
        AlgebraElement::mult(kind, TrigPoly::monomial(chi.clone(), Complex64::new(1.0, 0.0)))
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn bands(&self) -> impl Iterator<Item = (i64, &Symbol)> {
        self.bands.iter().map(|(n, s)| (*n, s))
    }

    pub fn band_symbol(&self, n: i64) -> Option<&Symbol> {
        self.bands.get(&n)
    }

    pub fn is_zero(&self) -> bool {
        self.bands.is_empty()
    }

    /// Widest band offset, 0 for the zero element.
    pub fn width(&self) -> usize {
        self.bands.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Largest coefficient: a cheap zero test for symbolic identities.
    pub fn max_coeff(&self) -> f64 {
        self.bands
            .values()
            .flat_map(|s| s.seq.iter().copied().chain(s.poly.terms().map(|(_, c)| *c)))
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Longest finitely supported part.
    pub fn support(&self) -> usize {
        self.bands.values().map(|s| s.seq.len()).max().unwrap_or(0)
    }

    fn add_band(&mut self, n: i64, s: Symbol) {
        let merged = match self.bands.remove(&n) {
            Some(old) => old.add(&s),
            None => s,
        };
        if !merged.is_zero() {
            self.bands.insert(n, merged);
        }
    }

    fn check_kind(&self, other: &AlgebraElement) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::SpaceMismatch(format!("{} element with {} element", self.kind, other.kind)));
        }
        Ok(())
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_kind(other)?;
        let mut out = self.clone();
        for (n, s) in &other.bands {
            out.add_band(*n, s.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.kind);
        for (n, s) in &self.bands {
            out.add_band(*n, s.scale(c));
        }
        out
    }

    /// Only band `n`.
    pub fn band(&self, n: i64) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.kind);
        if let Some(s) = self.bands.get(&n) {
            out.bands.insert(n, s.clone());
        }
        out
    }

    /// Band `n` multiplied by `w(n)`.
    pub fn weight_bands(&self, w: impl Fn(i64) -> Complex64) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.kind);
        for (n, s) in &self.bands {
            out.add_band(*n, s.scale(w(*n)));
        }
        out
    }

    /// `ρ_θ(a)`: band `n` picks up `e^{inθ}`.
    pub fn rotate(&self, theta: f64) -> AlgebraElement {
        self.weight_bands(|n| Complex64::from_polar(1.0, n as f64 * theta))
    }

    /// Image in the quotient by the compacts, as an element on `ℓ²(Z)`.
    pub fn quotient(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(SpaceKind::Full);
        for (n, s) in &self.bands {
            out.add_band(*n, Symbol::poly(s.poly.clone()));
        }
        out
    }

    /// `T(b)` for `b` on `ℓ²(Z)`: same symbols on the half line.
    pub fn toeplitz(&self) -> Result<AlgebraElement> {
        if self.kind != SpaceKind::Full {
            return Err(Error::SpaceMismatch("toeplitz map expects a full-space element".into()));
        }
        Ok(AlgebraElement { kind: SpaceKind::Plus, bands: self.bands.clone() })
    }

    /// Applies `h` to every trig-poly factor, leaving finite parts alone.
    pub fn map_polys(&self, h: impl Fn(&TrigPoly) -> Result<TrigPoly>) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(self.kind);
        for (n, s) in &self.bands {
            out.add_band(*n, Symbol { seq: Vec::new(), poly: h(&s.poly)? });
        }
        Ok(out)
    }

    /// Product in normal form.
    ///
    /// For bands `n` of `a` and `m` of `b` the result lives in band `n+m`;
    /// with `k = min(r, c)` the product entry is `A(k+s₁)·B(k+s₂)`, where
    /// the intermediate index `t = c+m` must stay in the space. On the
    /// half line `t ≥ 0` cuts off the first few `k`, which is absorbed
    /// into the finitely supported part.
    pub fn mul(&self, g: &GroupSpec, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_kind(other)?;
        let mut out = AlgebraElement::zero(self.kind);
        for (&n, a) in &self.bands {
            for (&m, b) in &other.bands {
                let p = n + m;
                let base = -p.min(0);
                let s1 = base + m + n.min(0);
                let s2 = base + m.min(0);
                let poly = a.poly.compose_phi(g, s1)?.mul(&b.poly.compose_phi(g, s2)?)?;
                let mut seq = Vec::new();
                if self.kind == SpaceKind::Plus {
                    // t = k + base + m must be ≥ 0
                    let k0 = (-(base + m)).max(0);
                    let reach = k0
                        .max(a.seq.len() as i64 - s1)
                        .max(b.seq.len() as i64 - s2)
                        .max(0);
                    seq.reserve(reach as usize);
                    for k in 0..reach {
                        let pk = poly.eval_orbit(g, k)?;
                        let total = if k < k0 {
                            Complex64::default()
                        } else {
                            a.value(g, k + s1)? * b.value(g, k + s2)?
                        };
                        seq.push(total - pk);
                    }
                }
                let mut sym = Symbol { seq, poly };
                sym.trim();
                out.add_band(p, sym);
            }
        }
        Ok(out)
    }

    /// `[self, other]`.
    pub fn commutator(&self, g: &GroupSpec, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.mul(g, other)?.sub(&other.mul(g, self)?)
    }

    /// Exact compression to the window: every entry is read from the
    /// symbols, never from products of truncated matrices.
    pub fn realize(&self, g: &GroupSpec, l: usize) -> Result<TruncatedOperator> {
        let space = Space { kind: self.kind, l };
        let d = space.dim();
        let mut m = Array2::<Complex64>::zeros((d, d));
        for (&n, s) in &self.bands {
            if n.unsigned_abs() as usize >= d {
                continue;
            }
            // k = min(r, c) runs over the window minus |n|
            let count = d - n.unsigned_abs() as usize;
            let start = space.first();
            let polys = s.poly.eval_orbit_range(g, start, count)?;
            for (i, pv) in polys.into_iter().enumerate() {
                let k = start + i as i64;
                let (r, c) = if n >= 0 { (k + n, k) } else { (k, k - n) };
                let (r, c) = (space.pos(r).expect("in window"), space.pos(c).expect("in window"));
                m[[r, c]] = pv + s.seq_at(k);
            }
        }
        TruncatedOperator::from_matrix(space, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truncops::{make_mult, make_projection, make_shift};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn g() -> GroupSpec {
        GroupSpec::p_adic(2, 6).unwrap()
    }

    fn chi(m: u64, j: i64) -> Character {
        Character::odometer(m, j).unwrap()
    }

    #[test]
    fn realize_examples() {
        let g = g();
        let l = 8;
        let u = AlgebraElement::shift(&g, SpaceKind::Plus, 1);
        assert_eq!(u.realize(&g, l).unwrap(), make_shift(SpaceKind::Plus, 1, l).unwrap());
        let p0 = AlgebraElement::diag(vec![c(1.0)]);
        assert_eq!(p0.realize(&g, l).unwrap(), make_projection(0, 0, l).unwrap());
        let f = TrigPoly::monomial(chi(4, 1), c(1.0));
        let vm = AlgebraElement::term(SpaceKind::Full, 1, vec![], f.clone()).unwrap();
        let direct = &make_shift(SpaceKind::Full, 1, l).unwrap() * &make_mult(&g, &f, SpaceKind::Full, l).unwrap();
        assert!((&vm.realize(&g, l).unwrap() - &direct).max_abs() < 1e-15);
        let e = AlgebraElement::matrix_unit(1, 2);
        assert_eq!(e.realize(&g, 3).unwrap(), make_projection(1, 2, 3).unwrap());
    }

    #[test]
    fn uu_star_is_one_minus_p0() {
        let g = g();
        let u = AlgebraElement::shift(&g, SpaceKind::Plus, 1);
        let us = AlgebraElement::shift(&g, SpaceKind::Plus, -1);
        let prod = u.mul(&g, &us).unwrap();
        let expect = AlgebraElement::identity(&g, SpaceKind::Plus)
            .sub(&AlgebraElement::diag(vec![c(1.0)]))
            .unwrap();
        assert_eq!(prod, expect);
        assert_eq!(us.mul(&g, &u).unwrap(), AlgebraElement::identity(&g, SpaceKind::Plus));
    }

    #[test]
    fn symbolic_products_match_matrices() {
        let g = g();
        let l = 24;
        let a = AlgebraElement::from_bands(
            SpaceKind::Plus,
            [
                (2, Symbol { seq: vec![c(1.0), c(-2.0)], poly: TrigPoly::monomial(chi(4, 1), c(0.5)) }),
                (-1, Symbol { seq: vec![c(0.0), c(3.0), c(1.0)], poly: TrigPoly::monomial(chi(8, 3), c(1.0)) }),
            ],
        )
        .unwrap();
        let b = AlgebraElement::from_bands(
            SpaceKind::Plus,
            [
                (-3, Symbol { seq: vec![c(2.0)], poly: TrigPoly::monomial(chi(2, 1), c(1.0)) }),
                (1, Symbol { seq: vec![], poly: TrigPoly::constant(&g, c(1.5)) }),
            ],
        )
        .unwrap();
        let sym = a.mul(&g, &b).unwrap().realize(&g, l).unwrap();
        let mat = &a.realize(&g, l).unwrap() * &b.realize(&g, l).unwrap();
        let w = a.width();
        assert!(sym.interior_max_diff(&mat, w).unwrap() < 1e-14);
        // with enough room the truncated product is the exact compression
        let big = &a.realize(&g, l + 8).unwrap() * &b.realize(&g, l + 8).unwrap();
        let sym_big = a.mul(&g, &b).unwrap().realize(&g, l + 8).unwrap();
        assert!(sym_big.interior_max_diff(&big, 8).unwrap() < 1e-14);
    }

    #[test]
    fn full_products_match_matrices() {
        let g = GroupSpec::golden_torus();
        let l = 20;
        let f = TrigPoly::monomial(Character::torus(vec![1]), c(1.0));
        let h = TrigPoly::monomial(Character::torus(vec![-2]), Complex64::new(0.0, 1.0));
        let a = AlgebraElement::term(SpaceKind::Full, 2, vec![], f).unwrap();
        let b = AlgebraElement::term(SpaceKind::Full, -3, vec![], h).unwrap();
        for (x, y) in [(&a, &b), (&b, &a)] {
            let sym = x.mul(&g, y).unwrap().realize(&g, l).unwrap();
            let mat = &x.realize(&g, l).unwrap() * &y.realize(&g, l).unwrap();
            assert!(sym.interior_max_diff(&mat, 3).unwrap() < 1e-13);
        }
    }

    #[test]
    fn quotient_and_toeplitz() {
        let g = g();
        let f = TrigPoly::monomial(chi(4, 1), c(1.0));
        let a = AlgebraElement::term(SpaceKind::Plus, 1, vec![c(2.0)], f.clone()).unwrap();
        let q = a.quotient();
        assert_eq!(q.kind(), SpaceKind::Full);
        assert_eq!(q.band_symbol(1).unwrap().poly, f);
        assert!(q.band_symbol(1).unwrap().seq.is_empty());
        let t = q.toeplitz().unwrap();
        let corner = crate::truncops::toeplitz_map(&q.realize(&g, 10).unwrap()).unwrap();
        assert_eq!(t.realize(&g, 10).unwrap(), corner);
    }

    #[test]
    fn full_rejects_finite_parts() {
        assert!(AlgebraElement::term(SpaceKind::Full, 0, vec![c(1.0)], TrigPoly::zero()).is_err());
    }
}

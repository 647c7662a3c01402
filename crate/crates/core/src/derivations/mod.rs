//! Derivations on the polynomial algebras, in two representations:
//! symbolic specs (`c₀`, a `∂`-part, and commutator data) and generator
//! tables for derivations that are only limits of commutators.

mod analysis;
mod table;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Character, GroupSpec};
use crate::trigpoly::TrigPoly;
use crate::truncops::{AlgebraElement, Generator, SpaceKind, TruncatedOperator};

pub use analysis::{
    cesaro_sum, cesaro_weight, check_compact_preservation, classify_invariant, component_apply,
    covariant_beta, fourier_component, quotient_derivation, Classification, CompactEntry,
    CompactReport,
};
pub use table::GeneratorTable;

/// Anything that maps polynomial elements to (symbolic) operators and
/// obeys the Leibniz rule.
pub trait Derivation {
    fn apply(&self, g: &GroupSpec, a: &AlgebraElement) -> Result<AlgebraElement>;

    /// Image of a generator; diagonal characters are taken on `kind`.
    fn image(&self, g: &GroupSpec, gen: &Generator, kind: SpaceKind) -> Result<AlgebraElement> {
        self.apply(g, &generator_on(g, gen, kind))
    }
}

/// A generator as an element of the algebra on `kind`.
pub fn generator_on(g: &GroupSpec, gen: &Generator, kind: SpaceKind) -> AlgebraElement {
    match gen {
        Generator::MChar(chi) => AlgebraElement::char_mult(kind, chi),
        other => AlgebraElement::generator(g, other),
    }
}

/// `D(a)` compressed to the window.
pub fn apply_truncated(d: &dyn Derivation, g: &GroupSpec, a: &AlgebraElement, l: usize) -> Result<TruncatedOperator> {
    d.apply(g, a)?.realize(g, l)
}

/// One band of commutator data: the symbol `β_{n,0}(𝕂) + M_{f_n}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InnerTerm {
    pub f: TrigPoly,
    pub beta0: Vec<Complex64>,
}

/// `d = c₀·[𝕂, ·] + δ_∂ + [Σ_n band_n(β_{n,0} + f_n), ·]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DerivationSpec {
    pub c0: Complex64,
    /// `∂χ_{e_j} = coeff_j·χ_{e_j}` on the coordinate characters of a torus.
    pub partial: BTreeMap<Character, Complex64>,
    pub inner: BTreeMap<i64, InnerTerm>,
}

impl DerivationSpec {
    pub fn zero() -> DerivationSpec {
        DerivationSpec::default()
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == Complex64::default() && self.partial.is_empty() && self.inner.is_empty()
    }

    /// Sum of two specs, band by band.
    pub fn add(&self, other: &DerivationSpec) -> DerivationSpec {
        let mut out = self.clone();
        out.c0 += other.c0;
        for (chi, c) in &other.partial {
            *out.partial.entry(chi.clone()).or_default() += c;
        }
        out.partial.retain(|_, c| c.norm() > 0.0);
        for (n, t) in &other.inner {
            let slot = out.inner.entry(*n).or_default();
            slot.f = slot.f.add(&t.f);
            let len = slot.beta0.len().max(t.beta0.len());
            slot.beta0.resize(len, Complex64::default());
            for (a, b) in slot.beta0.iter_mut().zip(&t.beta0) {
                *a += b;
            }
        }
        out.inner.retain(|_, t| !(t.f.is_zero() && t.beta0.iter().all(|v| v.norm() == 0.0)));
        out
    }

    pub fn scale(&self, s: Complex64) -> DerivationSpec {
        DerivationSpec {
            c0: self.c0 * s,
            partial: self.partial.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
            inner: self
                .inner
                .iter()
                .map(|(n, t)| {
                    (*n, InnerTerm { f: t.f.scale(s), beta0: t.beta0.iter().map(|v| v * s).collect() })
                })
                .collect(),
        }
    }

    /// Only the band-`n` commutator data (plus `c₀` and `∂` when `n = 0`).
    pub fn component(&self, n: i64) -> DerivationSpec {
        let mut out = DerivationSpec::zero();
        if n == 0 {
            out.c0 = self.c0;
            out.partial = self.partial.clone();
        }
        if let Some(t) = self.inner.get(&n) {
            out.inner.insert(n, t.clone());
        }
        out
    }

    /// `Σ_j m_j·coeff_j`: the eigenvalue of `∂` on `χ_m`.
    pub fn partial_factor(&self, chi: &Character) -> Result<Complex64> {
        if self.partial.is_empty() {
            return Ok(Complex64::default());
        }
        let Character::Torus { freq } = chi else {
            return Err(Error::NoInvariantDerivation);
        };
        let mut acc = Complex64::default();
        for (basis, c) in &self.partial {
            let Character::Torus { freq: e } = basis else {
                return Err(Error::NoInvariantDerivation);
            };
            let j = unit_axis(e).ok_or_else(|| {
                Error::InvalidDerivation(format!("partial part listed on non-coordinate character {basis}"))
            })?;
            if e.len() != freq.len() {
                return Err(Error::ForeignCharacter(chi.clone()));
            }
            acc += c * freq[j] as f64;
        }
        Ok(acc)
    }

    pub fn validate(&self, g: &GroupSpec) -> Result<()> {
        if !self.partial.is_empty() {
            if g.is_odometer() {
                return Err(Error::NoInvariantDerivation);
            }
            for chi in self.partial.keys() {
                g.validate_character(chi)?;
                if let Character::Torus { freq } = chi {
                    if unit_axis(freq).is_none() {
                        return Err(Error::InvalidDerivation(format!(
                            "partial part listed on non-coordinate character {chi}"
                        )));
                    }
                }
            }
        }
        for t in self.inner.values() {
            t.f.validate(g)?;
        }
        Ok(())
    }

    /// `Σ_n band_n(β_{n,0} + f_n)` on the given space.
    pub fn generator_element(&self, kind: SpaceKind) -> Result<AlgebraElement> {
        let mut x = AlgebraElement::zero(kind);
        for (&n, t) in &self.inner {
            let seq = match kind {
                SpaceKind::Plus => t.beta0.clone(),
                SpaceKind::Full => {
                    if t.beta0.iter().any(|v| v.norm() != 0.0) {
                        return Err(Error::InvalidDerivation(
                            "finitely supported symbols have no meaning on the full line; apply the quotient first"
                                .into(),
                        ));
                    }
                    Vec::new()
                }
            };
            x = x.add(&AlgebraElement::term(kind, n, seq, t.f.clone())?)?;
        }
        Ok(x)
    }
}

fn unit_axis(freq: &[i64]) -> Option<usize> {
    let mut axis = None;
    for (j, &m) in freq.iter().enumerate() {
        match (m, axis) {
            (0, _) => {}
            (1, None) => axis = Some(j),
            _ => return None,
        }
    }
    axis
}

impl Derivation for DerivationSpec {
    fn apply(&self, g: &GroupSpec, a: &AlgebraElement) -> Result<AlgebraElement> {
        let kind = a.kind();
        let c0 = self.c0;
        let mut out = a.weight_bands(|n| c0 * n as f64);
        if !self.partial.is_empty() {
            if kind == SpaceKind::Plus {
                return Err(Error::Obstructed);
            }
            let d = a.map_polys(|f| {
                let mut terms = Vec::new();
                for (chi, c) in f.terms() {
                    terms.push((chi.clone(), c * self.partial_factor(chi)?));
                }
                Ok(TrigPoly::from_terms(terms))
            })?;
            out = out.add(&d)?;
        }
        if !self.inner.is_empty() {
            let x = self.generator_element(kind)?;
            out = out.add(&x.commutator(g, a)?)?;
        }
        Ok(out)
    }
}

/// A finite sum of derivations.
#[derive(Default)]
pub struct DerivationSum<'a> {
    parts: Vec<&'a dyn Derivation>,
}

impl<'a> DerivationSum<'a> {
    pub fn new(parts: Vec<&'a dyn Derivation>) -> DerivationSum<'a> {
        DerivationSum { parts }
    }
}

impl Derivation for DerivationSum<'_> {
    fn apply(&self, g: &GroupSpec, a: &AlgebraElement) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(a.kind());
        for p in &self.parts {
            acc = acc.add(&p.apply(g, a)?)?;
        }
        Ok(acc)
    }

    fn image(&self, g: &GroupSpec, gen: &Generator, kind: SpaceKind) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(gen.kind().unwrap_or(kind));
        for p in &self.parts {
            acc = acc.add(&p.image(g, gen, kind)?)?;
        }
        Ok(acc)
    }
}

/// `d_𝕂 = [𝕂, ·]` on the half line, `δ_𝕃 = [𝕃, ·]` on the full line.
pub fn make_d_k() -> DerivationSpec {
    DerivationSpec { c0: Complex64::new(1.0, 0.0), ..DerivationSpec::default() }
}

/// `[band_n(β₀(𝕂) + M_f), ·]`.
pub fn make_inner(n: i64, beta0: Vec<Complex64>, f: TrigPoly) -> DerivationSpec {
    let mut d = DerivationSpec::zero();
    d.inner.insert(n, InnerTerm { f, beta0 });
    d
}

/// `δ_∂` with `∂ = coeff·Σ_j ∂/∂x_j`, so `δ(M_{χ_m}) = 2πi·coeff·(Σ m_j)·M_{χ_m}`.
pub fn make_delta_partial(coeff: Complex64, g: &GroupSpec) -> Result<DerivationSpec> {
    let GroupSpec::Torus { theta } = g else {
        return Err(Error::NoInvariantDerivation);
    };
    let mut d = DerivationSpec::zero();
    if coeff.norm() == 0.0 {
        return Ok(d);
    }
    for j in 0..theta.len() {
        let mut e = vec![0; theta.len()];
        e[j] = 1;
        d.partial.insert(Character::torus(e), Complex64::new(0.0, TAU) * coeff);
    }
    Ok(d)
}

/// `d_α(U) = U α(𝕂)`, zero on diagonals, together with the inner
/// approximants `[β^N(𝕂), ·]`, `β^N(k) = Σ_{j<k} α^N(j)`, one per cutoff.
pub fn make_d_alpha(
    g: &GroupSpec,
    alpha: &[Complex64],
    cutoffs: &[usize],
) -> Result<(GeneratorTable, Vec<(usize, DerivationSpec)>)> {
    let du = AlgebraElement::term(SpaceKind::Plus, 1, alpha.to_vec(), TrigPoly::zero())?;
    let table = GeneratorTable::plus_killing_diagonals(g, du)?;
    let approximants = cutoffs
        .iter()
        .map(|&n| {
            let a = &alpha[..n.min(alpha.len())];
            let total: Complex64 = a.iter().sum();
            // β^N minus its terminal constant, which commutes with everything
            let mut acc = Complex64::default();
            let beta: Vec<Complex64> = (0..a.len())
                .map(|k| {
                    let v = acc - total;
                    acc += a[k];
                    v
                })
                .collect();
            (n, make_inner(0, beta, TrigPoly::zero()))
        })
        .collect();
    Ok((table, approximants))
}

/// `d_f(U) = U M_f` (or `δ_f(V) = V M_f`), zero on diagonals, with its
/// exact inner form `[M_g, ·]`, `g∘φ − g = f`.
pub fn make_d_f(g: &GroupSpec, f: &TrigPoly, kind: SpaceKind) -> Result<(GeneratorTable, DerivationSpec)> {
    let m = f.mean();
    if m.norm() > 1e-14 {
        return Err(Error::MeanNotZero(m));
    }
    let sol = f.cocycle_solve(g)?;
    let dv = AlgebraElement::term(kind, 1, Vec::new(), f.clone())?;
    let table = match kind {
        SpaceKind::Plus => GeneratorTable::plus_killing_diagonals(g, dv)?,
        SpaceKind::Full => GeneratorTable::full_killing_diagonals(g, dv)?,
    };
    Ok((table, make_inner(0, Vec::new(), sol)))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarJson {
    Pair([f64; 2]),
    Real(f64),
}

impl ScalarJson {
    fn value(&self) -> Complex64 {
        match self {
            ScalarJson::Pair([re, im]) => Complex64::new(*re, *im),
            ScalarJson::Real(re) => Complex64::new(*re, 0.0),
        }
    }
}

fn pair(c: Complex64) -> ScalarJson {
    ScalarJson::Pair([c.re, c.im])
}

#[derive(Serialize, Deserialize)]
struct PartialJson {
    char: Character,
    coeff: ScalarJson,
}

#[derive(Serialize, Deserialize)]
struct InnerJson {
    n: i64,
    #[serde(default)]
    f: TrigPoly,
    #[serde(default)]
    beta0: Vec<ScalarJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    #[serde(default = "zero_scalar")]
    c0: ScalarJson,
    #[serde(default)]
    partial: Vec<PartialJson>,
    #[serde(default)]
    inner: Vec<InnerJson>,
}

fn zero_scalar() -> ScalarJson {
    ScalarJson::Real(0.0)
}

impl Serialize for DerivationSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson {
            c0: pair(self.c0),
            partial: self
                .partial
                .iter()
                .map(|(chi, c)| PartialJson { char: chi.clone(), coeff: pair(*c) })
                .collect(),
            inner: self
                .inner
                .iter()
                .map(|(n, t)| InnerJson { n: *n, f: t.f.clone(), beta0: t.beta0.iter().map(|v| pair(*v)).collect() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DerivationSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<DerivationSpec, D::Error> {
        let raw = SpecJson::deserialize(d)?;
        let mut spec = DerivationSpec { c0: raw.c0.value(), ..DerivationSpec::default() };
        for p in raw.partial {
            *spec.partial.entry(p.char).or_default() += p.coeff.value();
        }
        for t in raw.inner {
            let term = InnerTerm { f: t.f, beta0: t.beta0.iter().map(ScalarJson::value).collect() };
            spec = spec.add(&make_inner(t.n, term.beta0, term.f));
        }
        Ok(spec)
    }
}

impl DerivationSpec {
    pub fn from_json(text: &str) -> Result<DerivationSpec> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDerivation(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("derivation serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truncops::{make_projection, make_shift};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn g() -> GroupSpec {
        GroupSpec::p_adic(2, 8).unwrap()
    }

    fn chi(m: u64, j: i64) -> Character {
        Character::odometer(m, j).unwrap()
    }

    #[test]
    fn d_k_examples() {
        let g = g();
        let d = make_d_k();
        let l = 16;
        let du = apply_truncated(&d, &g, &AlgebraElement::generator(&g, &Generator::U), l).unwrap();
        assert_eq!(du, make_shift(SpaceKind::Plus, 1, l).unwrap());
        let m = AlgebraElement::char_mult(SpaceKind::Plus, &chi(4, 1));
        assert!(d.apply(&g, &m).unwrap().is_zero());
        assert!(d.apply(&g, &AlgebraElement::diag(vec![c(1.0)])).unwrap().is_zero());
        let u = AlgebraElement::generator(&g, &Generator::U);
        let us = AlgebraElement::generator(&g, &Generator::Ustar);
        assert!(d.apply(&g, &u.mul(&g, &us).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn inner_on_character() {
        // [U P₀, M_χ] has the single entry (χ(x₀) − χ(x₁)) at (1, 0)
        let g = g();
        let d = make_inner(1, vec![c(1.0)], TrigPoly::zero());
        let x = chi(4, 1);
        let out = apply_truncated(&d, &g, &AlgebraElement::char_mult(SpaceKind::Plus, &x), 8).unwrap();
        let expect = c(1.0) - Complex64::new(0.0, 1.0);
        assert!((out.get(1, 0) - expect).norm() < 1e-15);
        let mut rest = out.clone();
        rest.set(1, 0, c(0.0)).unwrap();
        assert_eq!(rest.max_abs(), 0.0);
    }

    #[test]
    fn zero_inner_is_zero() {
        let g = g();
        let d = make_inner(2, vec![], TrigPoly::zero());
        let a = AlgebraElement::term(SpaceKind::Plus, 1, vec![c(2.0)], TrigPoly::monomial(chi(2, 1), c(1.0))).unwrap();
        assert!(d.apply(&g, &a).unwrap().is_zero());
    }

    #[test]
    fn inner_two_on_u() {
        let g = g();
        let l = 12;
        let d = make_inner(2, vec![c(1.0)], TrigPoly::zero());
        let out = apply_truncated(&d, &g, &AlgebraElement::generator(&g, &Generator::U), l).unwrap();
        let u = make_shift(SpaceKind::Plus, 1, l).unwrap();
        let x = &make_shift(SpaceKind::Plus, 2, l).unwrap() * &make_projection(0, 0, l).unwrap();
        assert!(out.interior_max_diff(&x.commutator(&u).unwrap(), 3).unwrap() < 1e-15);
    }

    #[test]
    fn delta_partial_examples() {
        let t = GroupSpec::golden_torus();
        let d = make_delta_partial(c(1.0), &t).unwrap();
        let w = AlgebraElement::char_mult(SpaceKind::Full, &Character::torus(vec![1]));
        let dw = d.apply(&t, &w).unwrap();
        assert_eq!(dw, w.scale(Complex64::new(0.0, TAU)));
        let v = AlgebraElement::generator(&t, &Generator::V);
        assert!(d.apply(&t, &v).unwrap().is_zero());
        let w2 = AlgebraElement::char_mult(SpaceKind::Full, &Character::torus(vec![2]));
        assert_eq!(d.apply(&t, &w2).unwrap(), w2.scale(Complex64::new(0.0, 2.0 * TAU)));
        assert!(matches!(make_delta_partial(c(1.0), &g()), Err(Error::NoInvariantDerivation)));
        let plus_w = AlgebraElement::char_mult(SpaceKind::Plus, &Character::torus(vec![1]));
        assert!(matches!(d.apply(&t, &plus_w), Err(Error::Obstructed)));
    }

    #[test]
    fn d_alpha_examples() {
        let g = g();
        let (table, approx) = make_d_alpha(&g, &[c(1.0)], &[1]).unwrap();
        let du = table.image(&g, &Generator::U, SpaceKind::Plus).unwrap().realize(&g, 6).unwrap();
        assert_eq!(du.get(1, 0), c(1.0));
        assert_eq!(du.hs_norm_sq(), 1.0);
        let p0 = AlgebraElement::diag(vec![c(1.0)]);
        assert!(table.apply(&g, &p0).unwrap().max_coeff() < 1e-15);
        let (_, spec) = &approx[0];
        assert!(spec.apply(&g, &p0).unwrap().is_zero());
    }

    #[test]
    fn d_alpha_approximants_converge() {
        let g = g();
        let l = 64;
        let alpha: Vec<Complex64> = (0..l).map(|k| c(1.0 / (k as f64 + 1.0))).collect();
        let (table, approx) = make_d_alpha(&g, &alpha, &[8, 16, 32]).unwrap();
        let u = AlgebraElement::generator(&g, &Generator::U);
        let exact = table.apply(&g, &u).unwrap().realize(&g, l).unwrap();
        let mut last = f64::INFINITY;
        for (_, spec) in &approx {
            let err = (&spec.apply(&g, &u).unwrap().realize(&g, l).unwrap() - &exact).op_norm_estimate();
            assert!(err < last, "{err} !< {last}");
            last = err;
        }
    }

    #[test]
    fn d_f_examples() {
        let g = g();
        let l = 32;
        let f = TrigPoly::monomial(chi(2, 1), c(1.0));
        let (table, inner) = make_d_f(&g, &f, SpaceKind::Plus).unwrap();
        let u = AlgebraElement::generator(&g, &Generator::U);
        let du = table.apply(&g, &u).unwrap().realize(&g, l).unwrap();
        for k in 0..(l as i64 - 1) {
            assert_eq!(du.get(k + 1, k), c(if k % 2 == 0 { 1.0 } else { -1.0 }));
        }
        assert_eq!(inner.inner[&0].f, TrigPoly::monomial(chi(2, 1), c(-0.5)));
        let via_inner = inner.apply(&g, &u).unwrap().realize(&g, l).unwrap();
        assert!(via_inner.interior_max_diff(&du, 1).unwrap() < 1e-15);
        let h = AlgebraElement::char_mult(SpaceKind::Plus, &chi(8, 3));
        assert!(table.apply(&g, &h).unwrap().is_zero());
        assert!(matches!(
            make_d_f(&g, &TrigPoly::constant(&g, c(1.0)), SpaceKind::Plus),
            Err(Error::MeanNotZero(_))
        ));
    }

    #[test]
    fn derivation_json_round_trip() {
        let text = r#"{"c0":[2,0],"partial":[],"inner":[{"n":1,"f":[{"char":{"M":2,"j":1},"re":1,"im":0}],"beta0":[0.5,[0,1]]}]}"#;
        let spec = DerivationSpec::from_json(text).unwrap();
        assert_eq!(spec.c0, c(2.0));
        assert_eq!(spec.inner[&1].beta0, vec![c(0.5), Complex64::new(0.0, 1.0)]);
        assert_eq!(DerivationSpec::from_json(&spec.to_json()).unwrap(), spec);
        assert!(DerivationSpec::from_json(r#"{"c0":[1,0],"bogus":1}"#).is_err());
    }
}

/// `‖D(ab) − aD(b) − D(a)b‖_F` computed from compressed matrices, on rows
/// and columns clear of the truncation edge.
pub fn leibniz_defect(
    d: &dyn Derivation,
    g: &GroupSpec,
    a: &AlgebraElement,
    b: &AlgebraElement,
    l: usize,
) -> Result<f64> {
    let ab = a.mul(g, b)?;
    let (da, db, dab) = (d.apply(g, a)?, d.apply(g, b)?, d.apply(g, &ab)?);
    let width = a.width().max(b.width()).max(da.width()).max(db.width()) + 1;
    let (am, bm) = (a.realize(g, l)?, b.realize(g, l)?);
    let (dam, dbm, dabm) = (da.realize(g, l)?, db.realize(g, l)?, dab.realize(g, l)?);
    let diff = dabm.try_sub(&am.try_mul(&dbm)?)?.try_sub(&dam.try_mul(&bm)?)?;
    Ok(diff.interior(width).hs_norm())
}

//! Fourier decomposition, Cesàro summation, and classification.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Character, GroupSpec};
use crate::trigpoly::TrigPoly;
use crate::truncops::{AlgebraElement, Generator, SpaceKind, TruncatedOperator};

use super::{make_inner, Derivation, DerivationSpec, GeneratorTable, InnerTerm};

/// `d_n(g) = band_{n+deg g}(D(g))` on each listed generator.
pub fn fourier_component(
    d: &dyn Derivation,
    g: &GroupSpec,
    n: i64,
    gens: &[Generator],
    kind: SpaceKind,
) -> Result<GeneratorTable> {
    let mut images = BTreeMap::new();
    for gen in gens {
        let img = d.image(g, gen, kind)?;
        images.insert(gen.clone(), img.band(n + gen.degree()));
    }
    GeneratorTable::new(kind, images)
}

/// `d_n(a)`: band `n+m` of `D(a_m)` summed over the bands `m` of `a`.
pub fn component_apply(d: &dyn Derivation, g: &GroupSpec, n: i64, a: &AlgebraElement) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero(a.kind());
    for (m, _) in a.bands() {
        out = out.add(&d.apply(g, &a.band(m))?.band(n + m))?;
    }
    Ok(out)
}

/// `max(0, M+1−|n|)/(M+1)`.
pub fn cesaro_weight(n: i64, m_max: usize) -> f64 {
    let top = m_max as f64 + 1.0;
    (top - n.unsigned_abs() as f64).max(0.0) / top
}

/// `(1/(M+1)) Σ_{j=0}^{M} Σ_{|n|≤j} d_n(a)`.
pub fn cesaro_sum(d: &dyn Derivation, g: &GroupSpec, a: &AlgebraElement, m_max: usize) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero(a.kind());
    for (m, _) in a.bands() {
        let img = d.apply(g, &a.band(m))?;
        out = out.add(&img.weight_bands(|p| Complex64::new(cesaro_weight(p - m, m_max), 0.0)))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub c0: Complex64,
    /// `D(M_χ) = coeff·M_χ` for each nontrivial dictionary character.
    pub partial: BTreeMap<Character, Complex64>,
    /// Decaying part of `U*D(U)`; empty on the full line.
    pub alpha0: Vec<Complex64>,
    /// Fitted trig-poly part of `U*D(U)` (or `V⁻¹D(V)`).
    pub f0: TrigPoly,
    pub fit_residual: f64,
    /// `D − c₀d_𝕂 − δ_∂` as an inner invariant spec.
    pub residual: DerivationSpec,
}

const INVARIANCE_TOL: f64 = 1e-10;
const FIT_TOL: f64 = 1e-6;

fn off_band_mass(img: &AlgebraElement, keep: i64, g: &GroupSpec, l: usize) -> Result<f64> {
    let mut acc = 0.0;
    for (p, _) in img.bands() {
        if p != keep {
            acc += img.band(p).realize(g, l)?.hs_norm_sq();
        }
    }
    Ok(acc.sqrt())
}

/// Least squares `min ‖A x − b‖` via SVD; returns `(x, residual norm)`.
fn least_squares(a: DMatrix<Complex64>, b: DVector<Complex64>) -> Result<(DVector<Complex64>, f64)> {
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-12)
        .map_err(|e| Error::InvalidParameter(format!("least squares failed: {e}")))?;
    let r = (&a * &x - &b).norm();
    Ok((x, r))
}

/// Splits an invariant derivation into `c₀·d_𝕂`, a `∂`-part on the
/// dictionary characters, and an inner invariant remainder.
///
/// The diagonal of `U*D(U)` is fitted to the dictionary (the trivial
/// character is always included) on the tail window `[L/2, L−1)` of the
/// half line, or on the whole window of the full line.
pub fn classify_invariant(
    d: &dyn Derivation,
    g: &GroupSpec,
    kind: SpaceKind,
    dictionary: &[Character],
    l: usize,
) -> Result<Classification> {
    if l < 8 {
        return Err(Error::TruncationTooSmall { needed: 8, got: l });
    }
    let (fwd, back) = match kind {
        SpaceKind::Plus => (Generator::U, Generator::Ustar),
        SpaceKind::Full => (Generator::V, Generator::Vinv),
    };
    let mut chars: Vec<Character> = vec![g.trivial_character()];
    for chi in dictionary {
        g.validate_character(chi)?;
        if !chars.contains(chi) {
            chars.push(chi.clone());
        }
    }

    let d_fwd = d.image(g, &fwd, kind)?;
    let mut worst = off_band_mass(&d_fwd, 1, g, l)?;
    worst = worst.max(off_band_mass(&d.image(g, &back, kind)?, -1, g, l)?);
    let mut diag_images = Vec::new();
    for chi in chars.iter().skip(1) {
        let img = d.image(g, &Generator::MChar(chi.clone()), kind)?;
        worst = worst.max(off_band_mass(&img, 0, g, l)?);
        diag_images.push((chi.clone(), img));
    }
    if worst > INVARIANCE_TOL {
        return Err(Error::NotInvariant(worst));
    }

    let sym = d_fwd.band_symbol(1).cloned().unwrap_or_default();
    let (range, window): (Vec<i64>, Vec<i64>) = match kind {
        SpaceKind::Plus => ((0..l as i64 - 1).collect(), (l as i64 / 2..l as i64 - 1).collect()),
        SpaceKind::Full => {
            let all: Vec<i64> = (-(l as i64)..l as i64).collect();
            (all.clone(), all)
        }
    };
    let h: BTreeMap<i64, Complex64> = range
        .iter()
        .map(|&k| Ok((k, sym.value(g, k)?)))
        .collect::<Result<_>>()?;

    let a = DMatrix::from_fn(window.len(), chars.len(), |i, j| {
        g.character_at_orbit(&chars[j], window[i]).expect("validated")
    });
    let b = DVector::from_iterator(window.len(), window.iter().map(|k| h[k]));
    let (x, fit_residual) = least_squares(a, b)?;
    if fit_residual > FIT_TOL {
        return Err(Error::FitResidualTooLarge(fit_residual));
    }
    let f0 = TrigPoly::from_terms(chars.iter().cloned().zip(x.iter().copied()));
    let c0 = x[0];

    let mut alpha0 = Vec::new();
    if kind == SpaceKind::Plus {
        for &k in &range {
            alpha0.push(h[&k] - f0.eval_orbit(g, k)?);
        }
        while alpha0.last().is_some_and(|v| v.norm() <= 1e-13) {
            alpha0.pop();
        }
    }

    let mut partial = BTreeMap::new();
    for (chi, img) in diag_images {
        let s = img.band_symbol(0).cloned().unwrap_or_default();
        let mut acc = Complex64::default();
        for &k in &window {
            acc += s.value(g, k)? / g.character_at_orbit(&chi, k)?;
        }
        partial.insert(chi, acc / window.len() as f64);
    }

    // α₀(k) = β(k+1) − β(k) with β(k) = −Σ_{j≥k} α₀(j)
    let mut beta0 = vec![Complex64::default(); alpha0.len()];
    let mut tail = Complex64::default();
    for k in (0..alpha0.len()).rev() {
        tail += alpha0[k];
        beta0[k] = -tail;
    }
    let f_tilde = f0.sub(&TrigPoly::constant(g, c0));
    let residual = make_inner(0, beta0, f_tilde.cocycle_solve(g)?);
    let residual = if residual.inner.get(&0).is_some_and(|t| t.f.is_zero() && t.beta0.is_empty()) {
        DerivationSpec::zero()
    } else {
        residual
    };

    Ok(Classification { c0, partial, alpha0, f0, fit_residual, residual })
}

/// Recovers `β` from an `n`-covariant derivation, `n ≠ 0`, so that
/// `D_n = [band_n(β(𝕂)), ·]` on the half line.
pub fn covariant_beta(d: &dyn Derivation, g: &GroupSpec, n: i64, l: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("covariant_beta needs n != 0".into()));
    }
    let du = d.image(g, &Generator::U, SpaceKind::Plus)?;
    let dus = d.image(g, &Generator::Ustar, SpaceKind::Plus)?;
    let mass = off_band_mass(&du, n + 1, g, l)?.max(off_band_mass(&dus, n - 1, g, l)?);
    if mass > INVARIANCE_TOL {
        return Err(Error::NotCovariant { n, mass });
    }
    let du = du.realize(g, l)?;
    let mut beta = Vec::new();
    if n > 0 {
        // column c of band n+1 holds β(c+1) − β(c); U* pins β(0)
        let dus = dus.realize(g, l)?;
        let mut b = -dus.get(n - 1, 0);
        beta.push(b);
        let mut c = 0i64;
        while c + n + 1 < l as i64 {
            b += du.get(c + n + 1, c);
            beta.push(b);
            c += 1;
        }
    } else {
        // row r of band n+1 holds β(r) − β(r−1)
        let mut b = Complex64::default();
        let mut r = 0i64;
        while r - n - 1 < l as i64 {
            b += du.get(r, r - n - 1);
            beta.push(b);
            r += 1;
        }
    }
    Ok(beta)
}

/// `[d]`: the derivation induced on the quotient by the compacts. Keeps
/// `c₀`, `∂` and every `f_n`, drops the finitely supported symbols.
pub fn quotient_derivation(d: &DerivationSpec) -> DerivationSpec {
    let mut out = DerivationSpec { c0: d.c0, partial: d.partial.clone(), inner: BTreeMap::new() };
    for (n, t) in &d.inner {
        if !t.f.is_zero() {
            out.inner.insert(*n, InnerTerm { f: t.f.clone(), beta0: Vec::new() });
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CompactEntry {
    pub label: String,
    pub rank: usize,
    pub hs_norm: f64,
    pub tail_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompactReport {
    #[serde(rename = "L")]
    pub l: usize,
    pub corner: usize,
    pub entries: Vec<CompactEntry>,
}

impl CompactReport {
    pub fn worst_tail(&self) -> f64 {
        self.entries.iter().map(|e| e.tail_mass).fold(0.0, f64::max)
    }
}

/// Numerical rank: singular values above `1e-10·max(1, σ_max)`.
pub fn numerical_rank(a: &TruncatedOperator) -> usize {
    let m = a.matrix();
    let (r, c) = m.dim();
    let dm = DMatrix::from_fn(r, c, |i, j| m[[i, j]]);
    let sv = dm.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let cut = 1e-10 * top.max(1.0);
    sv.iter().filter(|s| **s > cut).count()
}

/// `D(P_{k,l})` for a few matrix units: rank and mass outside the leading
/// `corner×corner` block.
pub fn check_compact_preservation(
    d: &dyn Derivation,
    g: &GroupSpec,
    l: usize,
    corner: usize,
) -> Result<CompactReport> {
    let units = [(0usize, 0usize), (0, 1), (1, 0), (2, 3)];
    let mut entries = Vec::new();
    for (from, to) in units {
        if from.max(to) >= l {
            continue;
        }
        let img = d.apply(g, &AlgebraElement::matrix_unit(from, to))?.realize(g, l)?;
        let label = if (from, to) == (0, 0) { "P0".to_string() } else { format!("P[{from}->{to}]") };
        entries.push(CompactEntry {
            label,
            rank: numerical_rank(&img),
            hs_norm: img.hs_norm(),
            tail_mass: img.tail_mass(corner),
        });
    }
    Ok(CompactReport { l, corner, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::{make_d_alpha, make_d_f, make_d_k, make_delta_partial, DerivationSum};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn g() -> GroupSpec {
        GroupSpec::p_adic(2, 10).unwrap()
    }

    fn chi(m: u64, j: i64) -> Character {
        Character::odometer(m, j).unwrap()
    }

    fn plus_gens(chars: &[Character]) -> Vec<Generator> {
        let mut v = vec![Generator::U, Generator::Ustar];
        v.extend(chars.iter().cloned().map(Generator::MChar));
        v
    }

    #[test]
    fn d_k_is_invariant() {
        let g = g();
        let d = make_d_k();
        let gens = plus_gens(&[chi(4, 1)]);
        let d0 = fourier_component(&d, &g, 0, &gens, SpaceKind::Plus).unwrap();
        for gen in &gens {
            assert_eq!(d0.image(&g, gen, SpaceKind::Plus).unwrap(), d.image(&g, gen, SpaceKind::Plus).unwrap());
        }
        let d1 = fourier_component(&d, &g, 1, &gens, SpaceKind::Plus).unwrap();
        assert!(d1.images().all(|(_, img)| img.is_zero()));
    }

    #[test]
    fn two_band_inner_splits() {
        let g = g();
        let l = 64;
        let a = make_inner(1, vec![c(1.0), c(2.0)], TrigPoly::monomial(chi(4, 1), c(1.0)));
        let b = make_inner(-3, vec![c(0.5)], TrigPoly::monomial(chi(8, 3), c(-1.0)));
        let sum = a.add(&b);
        let gens = plus_gens(&[chi(4, 1), chi(8, 3)]);
        for (n, part) in [(1, &a), (-3, &b)] {
            let comp = fourier_component(&sum, &g, n, &gens, SpaceKind::Plus).unwrap();
            for gen in &gens {
                let x = comp.image(&g, gen, SpaceKind::Plus).unwrap().realize(&g, l).unwrap();
                let y = part.image(&g, gen, SpaceKind::Plus).unwrap().realize(&g, l).unwrap();
                assert!((&x - &y).max_abs() < 1e-14, "n={n} {}", gen.label());
            }
        }
    }

    #[test]
    fn cesaro_single_band_weight() {
        let g = g();
        let d = make_inner(1, vec![c(1.0)], TrigPoly::monomial(chi(2, 1), c(1.0)));
        let a = AlgebraElement::char_mult(SpaceKind::Plus, &chi(4, 1));
        let full = d.apply(&g, &a).unwrap().realize(&g, 16).unwrap();
        let ces = cesaro_sum(&d, &g, &a, 3).unwrap().realize(&g, 16).unwrap();
        assert!((&ces - &full.scale(c(0.75))).max_abs() < 1e-15);
        let dk = make_d_k();
        let u = AlgebraElement::generator(&g, &Generator::U);
        assert_eq!(cesaro_sum(&dk, &g, &u, 5).unwrap(), dk.apply(&g, &u).unwrap());
    }

    #[test]
    fn classify_dk_plus_df() {
        let g = g();
        let l = 256;
        let f = TrigPoly::monomial(chi(2, 1), c(1.0));
        let (df, _) = make_d_f(&g, &f, SpaceKind::Plus).unwrap();
        let two_dk = make_d_k().scale(c(2.0));
        let d = DerivationSum::new(vec![&two_dk, &df]);
        let cl = classify_invariant(&d, &g, SpaceKind::Plus, &[chi(2, 1)], l).unwrap();
        assert!((cl.c0 - c(2.0)).norm() < 1e-12);
        assert!(cl.partial.values().all(|v| v.norm() < 1e-12));
        assert!((cl.f0.coeff(&chi(2, 1)) - c(1.0)).norm() < 1e-12);
        assert!(cl.alpha0.is_empty());
    }

    #[test]
    fn classify_d_alpha() {
        let g = g();
        let alpha: Vec<Complex64> = (0..20).map(|k| c(0.5f64.powi(k))).collect();
        let (t, _) = make_d_alpha(&g, &alpha, &[]).unwrap();
        let cl = classify_invariant(&t, &g, SpaceKind::Plus, &[chi(2, 1)], 128).unwrap();
        assert!(cl.c0.norm() < 1e-12);
        assert_eq!(cl.alpha0.len(), 20);
        // the residual is the inner form of d_α
        let u = AlgebraElement::generator(&g, &Generator::U);
        let x = cl.residual.apply(&g, &u).unwrap().realize(&g, 64).unwrap();
        let y = t.apply(&g, &u).unwrap().realize(&g, 64).unwrap();
        assert!((&x - &y).max_abs() < 1e-14);
    }

    #[test]
    fn classify_torus_partial() {
        let t = GroupSpec::golden_torus();
        let d = make_delta_partial(c(1.0), &t).unwrap();
        let cl = classify_invariant(&d, &t, SpaceKind::Full, &[Character::torus(vec![1])], 64).unwrap();
        assert!(cl.c0.norm() < 1e-12);
        let p = cl.partial[&Character::torus(vec![1])];
        assert!((p - Complex64::new(0.0, std::f64::consts::TAU)).norm() < 1e-12);
    }

    #[test]
    fn classify_rejects_non_invariant() {
        let g = g();
        let d = make_inner(1, vec![c(1.0)], TrigPoly::zero());
        assert!(matches!(
            classify_invariant(&d, &g, SpaceKind::Plus, &[], 32),
            Err(Error::NotInvariant(_))
        ));
    }

    #[test]
    fn classify_small_dictionary_fails() {
        let g = g();
        let f = TrigPoly::monomial(chi(4, 1), c(1.0));
        let (df, _) = make_d_f(&g, &f, SpaceKind::Plus).unwrap();
        assert!(matches!(
            classify_invariant(&df, &g, SpaceKind::Plus, &[chi(2, 1)], 64),
            Err(Error::FitResidualTooLarge(_))
        ));
    }

    #[test]
    fn covariant_round_trip() {
        let g = g();
        let l = 64;
        for n in [1i64, 2, -1, -3] {
            let beta: Vec<Complex64> = (0..l).map(|k| c(1.0 + 0.1 * (k as f64).sin())).collect();
            let d = make_inner(n, beta.clone(), TrigPoly::zero());
            let got = covariant_beta(&d, &g, n, l).unwrap();
            for (k, v) in got.iter().enumerate() {
                assert!((v - beta[k]).norm() < 1e-12, "n={n} k={k}");
            }
        }
        let ones = vec![c(1.0); l];
        let d = make_inner(1, ones, TrigPoly::zero());
        assert!(covariant_beta(&d, &g, 1, l).unwrap().iter().all(|v| (v - c(1.0)).norm() < 1e-15));
        let zero = DerivationSpec::zero();
        assert!(covariant_beta(&zero, &g, 2, l).unwrap().iter().all(|v| v.norm() == 0.0));
        assert!(matches!(covariant_beta(&make_d_k(), &g, 1, l), Err(Error::NotCovariant { .. })));
    }

    #[test]
    fn quotient_examples() {
        let g = g();
        let q = quotient_derivation(&make_d_k());
        assert_eq!(q, make_d_k());
        let (_, approx) = make_d_alpha(&g, &[c(1.0), c(0.5)], &[2]).unwrap();
        assert!(quotient_derivation(&approx[0].1).is_zero());
    }

    #[test]
    fn compact_preservation_examples() {
        let g = g();
        let l = 64;
        let r = check_compact_preservation(&make_d_k(), &g, l, 32).unwrap();
        assert_eq!(r.entries[0].rank, 0);
        let d = make_inner(1, vec![c(1.0), c(1.0), c(1.0)], TrigPoly::zero());
        let r = check_compact_preservation(&d, &g, l, 32).unwrap();
        assert!(r.entries[0].rank <= 2 && r.entries[0].rank > 0);
        let f = TrigPoly::monomial(chi(2, 1), c(1.0));
        let (df, _) = make_d_f(&g, &f, SpaceKind::Plus).unwrap();
        let r = check_compact_preservation(&df, &g, l, 32).unwrap();
        assert_eq!(r.entries[0].rank, 0);
        assert!(r.worst_tail() < 1e-10);
    }
}

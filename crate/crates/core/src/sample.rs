//! Seeded random inputs for property suites and sampled reports.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivations::{make_inner, DerivationSpec};
use crate::group::{Character, GroupSpec};
use crate::trigpoly::TrigPoly;
use crate::truncops::{AlgebraElement, SpaceKind, Symbol};

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Nontrivial character of modest modulus or frequency.
pub fn character(rng: &mut impl Rng, g: &GroupSpec) -> Character {
    match g {
        GroupSpec::Odometer { scale, .. } => {
            let top = scale.len().min(4);
            let m = scale.terms()[rng.gen_range(0..top)];
            let j = rng.gen_range(1..m) as i64;
            Character::odometer(m, j).expect("modulus from the scale")
        }
        GroupSpec::Torus { theta } => loop {
            let freq: Vec<i64> = (0..theta.len()).map(|_| rng.gen_range(-3..=3)).collect();
            if freq.iter().any(|&m| m != 0) {
                return Character::torus(freq);
            }
        },
    }
}

/// Up to `max_terms` characters, constants allowed.
pub fn trig_poly(rng: &mut impl Rng, g: &GroupSpec, max_terms: usize) -> TrigPoly {
    let count = rng.gen_range(1..=max_terms.max(1));
    let terms: Vec<(Character, Complex64)> = (0..count)
        .map(|_| {
            let chi = if rng.gen_bool(0.2) { g.trivial_character() } else { character(rng, g) };
            (chi, complex(rng))
        })
        .collect();
    TrigPoly::from_terms(terms)
}

pub fn seq(rng: &mut impl Rng, max_len: usize) -> Vec<Complex64> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| complex(rng)).collect()
}

/// A polynomial element with bands in `[-max_band, max_band]`; finite
/// parts only on the half line.
pub fn element(rng: &mut impl Rng, g: &GroupSpec, kind: SpaceKind, max_band: i64, max_seq: usize) -> AlgebraElement {
    let mut bands: Vec<i64> = (-max_band..=max_band).collect();
    bands.shuffle(rng);
    let count = rng.gen_range(1..=3.min(bands.len()));
    let mut out = AlgebraElement::zero(kind);
    for &n in &bands[..count] {
        let s = match kind {
            SpaceKind::Plus => seq(rng, max_seq),
            SpaceKind::Full => Vec::new(),
        };
        let sym = Symbol { seq: s, poly: trig_poly(rng, g, 3) };
        let term = AlgebraElement::from_bands(kind, [(n, sym)]).expect("kind-compatible symbol");
        out = out.add(&term).expect("same kind");
    }
    out
}

/// `c₀`, a few commutator bands, and a `∂`-part when the target allows one.
pub fn spec(rng: &mut impl Rng, g: &GroupSpec, kind: SpaceKind) -> DerivationSpec {
    let mut d = DerivationSpec { c0: complex(rng), ..DerivationSpec::default() };
    for _ in 0..rng.gen_range(1..=3) {
        let n = rng.gen_range(-3..=3);
        let beta0 = match kind {
            SpaceKind::Plus => seq(rng, 6),
            SpaceKind::Full => Vec::new(),
        };
        d = d.add(&make_inner(n, beta0, trig_poly(rng, g, 2)));
    }
    if let (SpaceKind::Full, GroupSpec::Torus { theta }) = (kind, g) {
        for j in 0..theta.len() {
            let mut e = vec![0; theta.len()];
            e[j] = 1;
            d.partial.insert(Character::torus(e), complex(rng));
        }
    }
    d
}

/// A finite-support derivation of the crossed product: up to `max_terms`
/// bands `0 < |n| ≤ max_n`, each `f_n = c·χ` for a single character.
pub fn lift_source(rng: &mut impl Rng, g: &GroupSpec, max_n: i64, max_terms: usize) -> DerivationSpec {
    let mut ns: Vec<i64> = (-max_n..=max_n).filter(|&n| n != 0).collect();
    ns.shuffle(rng);
    let count = rng.gen_range(1..=max_terms.min(ns.len()));
    let mut d = DerivationSpec { c0: Complex64::new(rng.gen_range(-1.0..1.0), 0.0), ..DerivationSpec::default() };
    for &n in &ns[..count] {
        let c = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
        d = d.add(&make_inner(n, Vec::new(), TrigPoly::monomial(character(rng, g), c)));
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let g = GroupSpec::p_adic(2, 8).unwrap();
        let a = spec(&mut rng(7), &g, SpaceKind::Plus);
        let b = spec(&mut rng(7), &g, SpaceKind::Plus);
        assert_eq!(a, b);
        let t = GroupSpec::golden_torus();
        let e = element(&mut rng(3), &t, SpaceKind::Full, 2, 4);
        assert!(e.bands().all(|(_, s)| s.seq.is_empty()));
    }

    #[test]
    fn lift_sources_are_finite_support() {
        let g = GroupSpec::p_adic(2, 8).unwrap();
        let mut r = rng(1);
        for _ in 0..20 {
            let d = lift_source(&mut r, &g, 8, 4);
            assert!(!d.inner.is_empty() && d.inner.len() <= 4);
            for (n, t) in &d.inner {
                assert!(*n != 0 && n.abs() <= 8 && t.f.len() == 1 && t.beta0.is_empty());
            }
        }
    }
}

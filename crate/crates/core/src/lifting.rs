//! Lifting derivations of the crossed product to the Toeplitz extension
//! over odometers, with Hilbert-Schmidt control of the defects.
//!
//! A source `δ = c₀δ_𝕃 + Σ_n [V^n M_{f_n}, ·]` lifts to
//! `d = c₀d_𝕂 + Σ_n [U^n(β_{n,0}(𝕂) + M⁺_{f_n}), ·]` where the ramp
//! `β_{n,0}(k) = −f_n(x_{−1})(N_n−k)/N_n` cancels the boundary term at
//! the corner and spreads it over `N_n` diagonal steps.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::derivations::{
    classify_invariant, make_delta_partial, make_inner, quotient_derivation, Derivation, DerivationSpec, InnerTerm,
};
use crate::error::{Error, Result};
use crate::group::{Character, GroupSpec, Scale};
use crate::report::{ser_c64, ser_f64};
use crate::sample;
use crate::truncops::{toeplitz_map, AlgebraElement, Generator, SpaceKind, Symbol, TruncatedOperator};

/// Absolute tolerance for matrix vs closed-form defect norms.
pub const AGREEMENT_TOL: f64 = 1e-9;

/// Largest `m` with `s_m | n` (`s₀ = 1`).
pub fn scale_index(n: i64, scale: &Scale) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("scale index of 0".into()));
    }
    let a = n.unsigned_abs();
    let m = scale.terms().iter().take_while(|&&s| a % s == 0).count();
    if m == scale.len() {
        return Err(Error::PrefixExhausted { n });
    }
    Ok(m)
}

/// `β(k) = −fval·(N−k)/N` for `k < N`.
pub fn ramp_beta(cutoff: u64, fval: Complex64) -> Result<Vec<Complex64>> {
    if cutoff < 1 {
        return Err(Error::InvalidParameter("ramp cutoff must be at least 1".into()));
    }
    if fval == Complex64::default() {
        return Ok(Vec::new());
    }
    let n = cutoff as f64;
    Ok((0..cutoff).map(|k| -fval * ((n - k as f64) / n)).collect())
}

fn odometer_scale(g: &GroupSpec) -> Result<&Scale> {
    g.scale().ok_or(Error::UnsupportedGroup)
}

/// `f_n(x_{−1})` for every nonzero band of a source.
pub fn boundary_values(delta: &DerivationSpec, g: &GroupSpec) -> Result<BTreeMap<i64, Complex64>> {
    let mut out = BTreeMap::new();
    for (&n, t) in &delta.inner {
        if n != 0 {
            out.insert(n, t.f.eval_orbit(g, -1)?);
        }
    }
    Ok(out)
}

/// `tail_m = Σ_{scale_index(n)=m} |f_n(x_{−1})|²` for `m = 0..len`.
pub fn scale_tails(delta: &DerivationSpec, g: &GroupSpec) -> Result<BTreeMap<usize, f64>> {
    let scale = odometer_scale(g)?;
    let mut tails: BTreeMap<usize, f64> = (0..scale.len()).map(|m| (m, 0.0)).collect();
    for (n, v) in boundary_values(delta, g)? {
        *tails.get_mut(&scale_index(n, scale)?).expect("index below len") += v.norm_sqr();
    }
    Ok(tails)
}

/// Smallest power of two `C_m` with `tail_m/C_m ≤ target/2^{m+1}`.
pub fn choose_cutoffs(delta: &DerivationSpec, g: &GroupSpec, target: f64) -> Result<BTreeMap<usize, u64>> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidParameter(format!("target must be positive, got {target}")));
    }
    let mut out = BTreeMap::new();
    for (m, tail) in scale_tails(delta, g)? {
        let budget = target / 2f64.powi(m as i32 + 1);
        let mut c: u64 = 1;
        while tail / c as f64 > budget {
            c = c.checked_mul(2).ok_or_else(|| Error::InvalidParameter("cutoff overflow".into()))?;
        }
        out.insert(m, c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftPlan {
    pub scale: Scale,
    pub cutoffs: BTreeMap<usize, u64>,
    /// `N_n` for each nonzero band of the source.
    pub band_cutoffs: BTreeMap<i64, u64>,
    pub fvals: BTreeMap<i64, Complex64>,
    pub ramps: BTreeMap<i64, Vec<Complex64>>,
    pub source: DerivationSpec,
    pub target_defect: f64,
}

impl LiftPlan {
    pub fn new(delta: &DerivationSpec, g: &GroupSpec, target: f64) -> Result<LiftPlan> {
        check_source(delta, g)?;
        let cutoffs = choose_cutoffs(delta, g, target)?;
        LiftPlan::with_cutoffs(delta, g, cutoffs, target)
    }

    pub fn with_cutoffs(
        delta: &DerivationSpec,
        g: &GroupSpec,
        cutoffs: BTreeMap<usize, u64>,
        target: f64,
    ) -> Result<LiftPlan> {
        check_source(delta, g)?;
        let scale = odometer_scale(g)?.clone();
        let fvals = boundary_values(delta, g)?;
        let mut band_cutoffs = BTreeMap::new();
        let mut ramps = BTreeMap::new();
        for (&n, &v) in &fvals {
            let m = scale_index(n, &scale)?;
            let c = *cutoffs.get(&m).ok_or_else(|| Error::InvalidParameter(format!("no cutoff for scale index {m}")))?;
            band_cutoffs.insert(n, c);
            ramps.insert(n, ramp_beta(c, v)?);
        }
        Ok(LiftPlan { scale, cutoffs, band_cutoffs, fvals, ramps, source: delta.clone(), target_defect: target })
    }

    /// Same source with every `C_m` multiplied by `factor`.
    pub fn rescaled(&self, g: &GroupSpec, factor: u64) -> Result<LiftPlan> {
        let cutoffs = self.cutoffs.iter().map(|(m, c)| (*m, c * factor)).collect();
        LiftPlan::with_cutoffs(&self.source, g, cutoffs, self.target_defect)
    }

    pub fn max_cutoff(&self) -> u64 {
        self.band_cutoffs.values().copied().max().unwrap_or(1)
    }

    fn max_band(&self) -> u64 {
        self.source.inner.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    /// The lifted derivation: ramps added to the source's commutator data.
    pub fn lift(&self) -> DerivationSpec {
        let mut d = self.source.clone();
        for (n, ramp) in &self.ramps {
            if let Some(t) = d.inner.get_mut(n) {
                t.beta0 = ramp.clone();
            }
        }
        d
    }
}

fn check_source(delta: &DerivationSpec, g: &GroupSpec) -> Result<()> {
    if !delta.partial.is_empty() {
        return Err(Error::Obstructed);
    }
    if !g.is_odometer() {
        return Err(Error::UnsupportedGroup);
    }
    if delta.inner.values().any(|t| !t.beta0.is_empty()) {
        return Err(Error::InvalidDerivation(
            "source carries finitely supported symbols; give the crossed-product derivation".into(),
        ));
    }
    delta.validate(g)
}

/// `II = Σ_n |f_n(x_{−1})|²/N_n`.
#[allow(non_snake_case)]
pub fn defect_II(plan: &LiftPlan) -> f64 {
    plan.fvals.iter().map(|(n, v)| v.norm_sqr() / plan.band_cutoffs[n] as f64).sum()
}

/// `I(χ) = Σ_n Σ_{k=0}^{N_n} |f_n(x_{−1})|²((N_n−k)/N_n)²|1−χ(x_n)|²`.
#[allow(non_snake_case)]
pub fn defect_I(plan: &LiftPlan, g: &GroupSpec, chi: &Character) -> Result<f64> {
    let mut total = 0.0;
    for (&n, v) in &plan.fvals {
        let big_n = plan.band_cutoffs[&n];
        let factor = (Complex64::new(1.0, 0.0) - g.character_at_orbit(chi, n)?).norm_sqr();
        let ramp_sq: f64 = (0..=big_n)
            .map(|k| {
                let w = (big_n - k) as f64 / big_n as f64;
                w * w
            })
            .sum();
        total += v.norm_sqr() * ramp_sq * factor;
    }
    Ok(total)
}

/// Builds the lifting plan and the lifted derivation.
pub fn build_lift(delta: &DerivationSpec, g: &GroupSpec, target: f64) -> Result<(LiftPlan, DerivationSpec)> {
    let plan = LiftPlan::new(delta, g, target)?;
    let d = plan.lift();
    Ok((plan, d))
}

#[derive(Clone, Debug, Serialize)]
pub struct CharDefect {
    pub char: Character,
    #[serde(serialize_with = "ser_f64")]
    pub closed: f64,
    #[serde(serialize_with = "ser_f64")]
    pub matrix: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    #[serde(serialize_with = "ser_f64")]
    pub agreement: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tail: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HsCondition {
    pub requested: u64,
    pub modulus: u64,
    pub scale_index: usize,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
}

/// Matrix and closed-form defect norms of a lift. Squared HS norms
/// throughout.
#[derive(Clone, Debug, Serialize)]
pub struct DefectReport {
    #[serde(rename = "II", serialize_with = "ser_f64")]
    pub ii: f64,
    #[serde(rename = "I")]
    pub i: Vec<CharDefect>,
    pub cutoffs: BTreeMap<String, u64>,
    #[serde(rename = "L")]
    pub l: usize,
    pub tolerances: Tolerances,
    #[serde(serialize_with = "ser_f64")]
    pub target: f64,
    /// `‖d(U) − T(δ(V))‖²_HS` on the window.
    #[serde(serialize_with = "ser_f64")]
    pub matrix_u: f64,
    /// `‖d(U*) − T(δ(V⁻¹))‖²_HS` on the window.
    #[serde(serialize_with = "ser_f64")]
    pub matrix_ustar: f64,
    /// Mass of the defects outside the ramp supports.
    #[serde(serialize_with = "ser_f64")]
    pub tail: f64,
    pub support_radius: usize,
    pub hs_condition: Vec<HsCondition>,
    pub agreement: bool,
    pub notes: Vec<String>,
}

/// `d(s) − T(δ(s_B))` on `Plus(L)`, with `δ` realized on `Full(L)` and
/// compressed.
pub fn generator_defect(
    d: &dyn Derivation,
    delta: &dyn Derivation,
    g: &GroupSpec,
    gen_a: &Generator,
    gen_b: &Generator,
    l: usize,
) -> Result<TruncatedOperator> {
    let lifted = d.image(g, gen_a, SpaceKind::Plus)?.realize(g, l)?;
    let below = toeplitz_map(&delta.image(g, gen_b, SpaceKind::Full)?.realize(g, l)?)?;
    lifted.try_sub(&below)
}

/// `Σ_{M∤n}|f_n(x_{−1})|²` with `M` replaced by the smallest scale term it
/// divides.
pub fn hs_condition(delta: &DerivationSpec, g: &GroupSpec, modulus: u64) -> Result<HsCondition> {
    let scale = odometer_scale(g)?;
    let q = scale
        .terms()
        .iter()
        .position(|s| s % modulus == 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{modulus} divides no stored scale term")))?;
    let s_q = scale.terms()[q];
    let mut value = 0.0;
    for (n, v) in boundary_values(delta, g)? {
        if n.unsigned_abs() % s_q != 0 {
            value += v.norm_sqr();
        }
    }
    Ok(HsCondition { requested: modulus, modulus: s_q, scale_index: q + 1, value })
}

/// Default test characters `χ(M, 1)` for `M ∈ {2, 4, 8}`.
pub fn default_characters() -> Vec<Character> {
    [2u64, 4, 8].iter().map(|&m| Character::odometer(m, 1).expect("positive modulus")).collect()
}

/// Compares matrix defects of `plan.lift()` against the closed forms.
pub fn verify_lift(plan: &LiftPlan, g: &GroupSpec, l: usize, chars: &[Character]) -> Result<DefectReport> {
    let max_c = plan.max_cutoff() as usize;
    let radius = max_c + plan.max_band() as usize + 2;
    let needed = (2 * max_c).max(radius).max(8);
    if l < needed {
        return Err(Error::TruncationTooSmall { needed, got: l });
    }
    let d = plan.lift();
    let delta = &plan.source;
    let du = generator_defect(&d, delta, g, &Generator::U, &Generator::V, l)?;
    let dus = generator_defect(&d, delta, g, &Generator::Ustar, &Generator::Vinv, l)?;
    let mut tail = du.tail_mass(radius).max(dus.tail_mass(radius));
    let mut i = Vec::new();
    for chi in chars {
        g.validate_character(chi)?;
        let gen = Generator::MChar(chi.clone());
        let dm = generator_defect(&d, delta, g, &gen, &gen, l)?;
        tail = tail.max(dm.tail_mass(radius));
        i.push(CharDefect { char: chi.clone(), closed: defect_I(plan, g, chi)?, matrix: dm.hs_norm_sq() });
    }
    let ii = defect_II(plan);
    let (matrix_u, matrix_ustar) = (du.hs_norm_sq(), dus.hs_norm_sq());
    let agreement = (matrix_u - ii).abs() <= AGREEMENT_TOL
        && (matrix_ustar - ii).abs() <= AGREEMENT_TOL
        && i.iter().all(|c| (c.matrix - c.closed).abs() <= AGREEMENT_TOL)
        && tail <= AGREEMENT_TOL;

    let mut hs = Vec::new();
    let mut notes = vec!["finitely many nonzero f_n: the summability condition holds automatically".to_string()];
    for q in 1..=plan.scale.len().min(4) {
        let s = plan.scale.terms()[q - 1];
        hs.push(hs_condition(delta, g, s)?);
    }
    for chi in chars {
        if let Character::Odometer { modulus, .. } = chi {
            if !plan.scale.terms().contains(modulus) {
                let c = hs_condition(delta, g, *modulus)?;
                notes.push(format!("modulus {modulus} reduced to the scale term {}", c.modulus));
            }
        }
    }
    Ok(DefectReport {
        ii,
        i,
        cutoffs: plan.cutoffs.iter().map(|(m, c)| (m.to_string(), *c)).collect(),
        l,
        tolerances: Tolerances { agreement: AGREEMENT_TOL, tail: AGREEMENT_TOL },
        target: plan.target_defect,
        matrix_u,
        matrix_ustar,
        tail,
        support_radius: radius,
        hs_condition: hs,
        agreement,
        notes,
    })
}

/// Defects of the lift without ramps, `d = δ` read on the half line.
#[derive(Clone, Debug, Serialize)]
pub struct NaiveWitness {
    #[serde(rename = "L")]
    pub l: usize,
    /// `‖d(U) − T(δ(V))‖²_HS`.
    #[serde(serialize_with = "ser_f64")]
    pub matrix_u: f64,
    /// `‖d(U*) − T(δ(V⁻¹))‖²_HS`.
    #[serde(serialize_with = "ser_f64")]
    pub matrix_ustar: f64,
    /// `Σ_{n<0}|f_n(x_{−1})|²`: the corner term `P₀M⁺_{f_n∘φ⁻¹}(U*)^{−n−1}`.
    #[serde(serialize_with = "ser_f64")]
    pub closed_u: f64,
    /// `Σ_{n>0}|f_n(x_{−1})|²`, the matching corner term of `U*`.
    #[serde(serialize_with = "ser_f64")]
    pub closed_ustar: f64,
    /// Mass outside the leading `(max|n|+1)²` corner.
    #[serde(serialize_with = "ser_f64")]
    pub tail: f64,
}

impl NaiveWitness {
    /// `Σ_n |f_n(x_{−1})|²` over both generators.
    pub fn total(&self) -> f64 {
        self.matrix_u + self.matrix_ustar
    }
}

pub fn naive_lift_witness(delta: &DerivationSpec, g: &GroupSpec, l: usize) -> Result<NaiveWitness> {
    check_source(delta, g)?;
    let width = delta.inner.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0) + 1;
    if l < 2 * width + 8 {
        return Err(Error::TruncationTooSmall { needed: 2 * width + 8, got: l });
    }
    let du = generator_defect(delta, delta, g, &Generator::U, &Generator::V, l)?;
    let dus = generator_defect(delta, delta, g, &Generator::Ustar, &Generator::Vinv, l)?;
    let fv = boundary_values(delta, g)?;
    Ok(NaiveWitness {
        l,
        matrix_u: du.hs_norm_sq(),
        matrix_ustar: dus.hs_norm_sq(),
        closed_u: fv.iter().filter(|(n, _)| **n < 0).map(|(_, v)| v.norm_sqr()).sum(),
        closed_ustar: fv.iter().filter(|(n, _)| **n > 0).map(|(_, v)| v.norm_sqr()).sum(),
        tail: du.tail_mass(width).max(dus.tail_mass(width)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartialEntry {
    pub char: Character,
    #[serde(serialize_with = "ser_c64")]
    pub value: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub obstructed: bool,
    #[serde(serialize_with = "ser_c64")]
    pub c0: Complex64,
    pub partial: Vec<PartialEntry>,
    pub samples: usize,
    /// `max ‖[β(𝕂) + M⁺_g, M⁺_χ]‖` over the sampled invariant symbols.
    #[serde(serialize_with = "ser_f64")]
    pub max_commutator: f64,
    #[serde(rename = "L")]
    pub l: usize,
}

/// Classifies `δ_∂` with `∂ = coeff·d/dx` and samples inner invariant
/// derivations of the Toeplitz algebra on diagonal generators.
pub fn torus_obstruction_demo(g: &GroupSpec, coeff: Complex64, l: usize, rng: &mut impl Rng) -> Result<ObstructionReport> {
    let GroupSpec::Torus { theta } = g else {
        return Err(Error::InvalidGroup("the obstruction demo runs on a torus".into()));
    };
    let delta = make_delta_partial(coeff, g)?;
    let coords: Vec<Character> = (0..theta.len())
        .map(|j| {
            let mut e = vec![0; theta.len()];
            e[j] = 1;
            Character::torus(e)
        })
        .collect();
    let cl = classify_invariant(&delta, g, SpaceKind::Full, &coords, l)?;
    let partial: Vec<PartialEntry> =
        cl.partial.iter().map(|(chi, v)| PartialEntry { char: chi.clone(), value: *v }).collect();
    let obstructed = partial.iter().any(|p| p.value.norm() > 1e-12);

    let samples = 20;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let sym = Symbol { seq: sample::seq(rng, 12), poly: sample::trig_poly(rng, g, 3) };
        let x = AlgebraElement::from_bands(SpaceKind::Plus, [(0, sym)])?;
        let chi = sample::character(rng, g);
        let c = x.commutator(g, &AlgebraElement::char_mult(SpaceKind::Plus, &chi))?;
        worst = worst.max(c.realize(g, l)?.max_abs());
    }
    Ok(ObstructionReport { obstructed, c0: cl.c0, partial, samples, max_commutator: worst, l })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRow {
    pub cutoff: u64,
    #[serde(serialize_with = "ser_f64")]
    pub matrix_u: f64,
    #[serde(serialize_with = "ser_f64")]
    pub matrix_ustar: f64,
    #[serde(serialize_with = "ser_f64")]
    pub closed: f64,
}

/// Torus ramps `β_{n,0}(k) = −f_n(x_{−1})(N−k)/N` with one common `N`:
/// measured defect norms for each proposed cutoff. No convergence claim.
pub fn torus_experiment(delta: &DerivationSpec, g: &GroupSpec, cutoffs: &[u64], l: usize) -> Result<Vec<ExperimentRow>> {
    if g.is_odometer() {
        return Err(Error::InvalidGroup("the ramp experiment is for tori; use lift on odometers".into()));
    }
    if !delta.partial.is_empty() {
        return Err(Error::Obstructed);
    }
    delta.validate(g)?;
    let fv = boundary_values(delta, g)?;
    let mut rows = Vec::new();
    for &c in cutoffs {
        let width = delta.inner.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0);
        if (c + width + 2) as usize > l {
            return Err(Error::TruncationTooSmall { needed: (c + width + 2) as usize, got: l });
        }
        let mut d = delta.clone();
        for (n, v) in &fv {
            d.inner.insert(*n, InnerTerm { f: delta.inner[n].f.clone(), beta0: ramp_beta(c, *v)? });
        }
        let du = generator_defect(&d, delta, g, &Generator::U, &Generator::V, l)?;
        let dus = generator_defect(&d, delta, g, &Generator::Ustar, &Generator::Vinv, l)?;
        let closed = fv.values().map(|v| v.norm_sqr()).sum::<f64>() / c as f64;
        rows.push(ExperimentRow { cutoff: c, matrix_u: du.hs_norm_sq(), matrix_ustar: dus.hs_norm_sq(), closed });
    }
    Ok(rows)
}

/// `quotient_derivation(lift) == source` on the source data.
pub fn quotient_matches(plan: &LiftPlan) -> bool {
    quotient_derivation(&plan.lift()) == plan.source
}

/// A single-band source `[V^n M_f, ·]` with `f = c·χ`.
pub fn single_band_source(n: i64, chi: Character, c: Complex64) -> DerivationSpec {
    make_inner(n, Vec::new(), crate::trigpoly::TrigPoly::monomial(chi, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::make_d_k;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn g() -> GroupSpec {
        GroupSpec::p_adic(2, 8).unwrap()
    }

    fn chi2() -> Character {
        Character::odometer(2, 1).unwrap()
    }

    #[test]
    fn scale_index_examples() {
        let s = Scale::new(vec![2, 4, 8]).unwrap();
        assert_eq!(scale_index(4, &s).unwrap(), 2);
        assert_eq!(scale_index(1, &s).unwrap(), 0);
        assert_eq!(scale_index(-6, &s).unwrap(), 1);
        assert!(matches!(scale_index(16, &s), Err(Error::PrefixExhausted { n: 16 })));
    }

    #[test]
    fn ramp_examples() {
        assert_eq!(ramp_beta(4, c(1.0)).unwrap(), vec![c(-1.0), c(-0.75), c(-0.5), c(-0.25)]);
        assert_eq!(ramp_beta(1, Complex64::new(0.0, 2.0)).unwrap(), vec![Complex64::new(-0.0, -2.0)]);
        assert!(ramp_beta(3, c(0.0)).unwrap().is_empty());
        assert!(ramp_beta(0, c(1.0)).is_err());
    }

    #[test]
    fn cutoff_examples() {
        let g = g();
        // χ(2,1)(x_{-1}) = −1, so |f₁(x_{−1})| = 1
        let one = single_band_source(1, chi2(), c(1.0));
        assert_eq!(choose_cutoffs(&one, &g, 0.25).unwrap()[&0], 8);
        let two = one.add(&single_band_source(3, chi2(), c(1.0)));
        assert_eq!(choose_cutoffs(&two, &g, 0.25).unwrap()[&0], 16);
        assert!(choose_cutoffs(&DerivationSpec::zero(), &g, 0.25).unwrap().values().all(|&v| v == 1));
    }

    #[test]
    fn closed_forms() {
        let g = g();
        let plan = LiftPlan::with_cutoffs(
            &single_band_source(1, chi2(), c(1.0)),
            &g,
            (0..8).map(|m| (m, 4)).collect(),
            1.0,
        )
        .unwrap();
        assert_eq!(defect_II(&plan), 0.25);
        assert!((defect_I(&plan, &g, &chi2()).unwrap() - 7.5).abs() < 1e-14);
        let two = single_band_source(1, chi2(), c(1.0)).add(&single_band_source(2, chi2(), c(2.0)));
        let mut cut: BTreeMap<usize, u64> = (0..8).map(|m| (m, 4)).collect();
        cut.insert(1, 8);
        let plan = LiftPlan::with_cutoffs(&two, &g, cut, 1.0).unwrap();
        assert_eq!(defect_II(&plan), 0.75);
        // χ(2,1) is fixed by even translations
        let even = single_band_source(2, chi2(), c(1.0));
        let plan = LiftPlan::new(&even, &g, 0.5).unwrap();
        assert_eq!(defect_I(&plan, &g, &chi2()).unwrap(), 0.0);
    }

    #[test]
    fn lift_of_delta_l_is_d_k() {
        let g = g();
        let (plan, d) = build_lift(&make_d_k(), &g, 0.25).unwrap();
        assert_eq!(d, make_d_k());
        let r = verify_lift(&plan, &g, 64, &default_characters()).unwrap();
        assert_eq!(r.ii, 0.0);
        assert_eq!(r.matrix_u, 0.0);
        assert!(r.i.iter().all(|x| x.matrix == 0.0));
        assert!(r.agreement);
    }

    #[test]
    fn single_coefficient_pipeline() {
        let g = g();
        let delta = single_band_source(1, chi2(), c(1.0));
        let (plan, _) = build_lift(&delta, &g, 0.25).unwrap();
        assert_eq!(plan.cutoffs[&0], 8);
        let r = verify_lift(&plan, &g, 256, &default_characters()).unwrap();
        assert!((r.matrix_u - 0.125).abs() < 1e-10, "{}", r.matrix_u);
        assert!((r.matrix_ustar - 0.125).abs() < 1e-10, "{}", r.matrix_ustar);
        assert!(r.agreement, "{r:?}");
        assert!(quotient_matches(&plan));
    }

    #[test]
    fn negative_band_pipeline() {
        let g = g();
        let delta = single_band_source(-3, Character::odometer(8, 3).unwrap(), Complex64::new(0.3, -0.7))
            .add(&single_band_source(2, Character::odometer(4, 1).unwrap(), c(0.9)));
        let (plan, _) = build_lift(&delta, &g, 0.1).unwrap();
        let l = 4 * plan.max_cutoff() as usize + 16;
        let r = verify_lift(&plan, &g, l, &default_characters()).unwrap();
        assert!(r.agreement, "{r:?}");
    }

    #[test]
    fn doubling_halves_ii() {
        let g = g();
        let delta = single_band_source(-1, chi2(), c(1.0)).add(&single_band_source(2, chi2(), c(0.5)));
        let (plan, _) = build_lift(&delta, &g, 0.5).unwrap();
        let twice = plan.rescaled(&g, 2).unwrap();
        assert_eq!(defect_II(&twice), defect_II(&plan) / 2.0);
        let l = 4 * twice.max_cutoff() as usize;
        let a = verify_lift(&plan, &g, l, &[]).unwrap();
        let b = verify_lift(&twice, &g, l, &[]).unwrap();
        assert!(b.matrix_u < a.matrix_u + 1e-9);
    }

    #[test]
    fn naive_lift_leaves_corner() {
        let g = g();
        let delta = single_band_source(-2, chi2(), c(1.0)).add(&single_band_source(3, chi2(), c(2.0)));
        let w = naive_lift_witness(&delta, &g, 64).unwrap();
        assert!((w.matrix_u - w.closed_u).abs() < 1e-12, "{w:?}");
        assert!((w.matrix_ustar - w.closed_ustar).abs() < 1e-12, "{w:?}");
        assert!((w.total() - 5.0).abs() < 1e-12);
        assert_eq!(w.tail, 0.0);
    }

    #[test]
    fn obstruction_cases() {
        let t = GroupSpec::golden_torus();
        let d = make_delta_partial(c(1.0), &t).unwrap();
        assert!(matches!(build_lift(&d, &t, 0.25), Err(Error::Obstructed)));
        let inner = make_inner(1, Vec::new(), crate::trigpoly::TrigPoly::monomial(Character::torus(vec![1]), c(1.0)));
        assert!(matches!(build_lift(&inner, &t, 0.25), Err(Error::UnsupportedGroup)));
        let mut r = sample::rng(5);
        let rep = torus_obstruction_demo(&t, c(1.0), 64, &mut r).unwrap();
        assert!(rep.obstructed);
        assert!((rep.partial[0].value - Complex64::new(0.0, std::f64::consts::TAU)).norm() < 1e-12);
        assert_eq!(rep.max_commutator, 0.0);
        let rep = torus_obstruction_demo(&t, c(0.0), 64, &mut r).unwrap();
        assert!(!rep.obstructed);
    }

    #[test]
    fn hs_condition_matches_tails() {
        let g = g();
        let delta = single_band_source(1, chi2(), c(1.0))
            .add(&single_band_source(2, chi2(), c(2.0)))
            .add(&single_band_source(-4, chi2(), c(3.0)));
        let tails = scale_tails(&delta, &g).unwrap();
        assert_eq!(tails[&0], 1.0);
        assert_eq!(tails[&1], 4.0);
        assert_eq!(tails[&2], 9.0);
        for q in 1..=3 {
            let s = 1u64 << q;
            let want: f64 = (0..q).map(|m| tails[&m]).sum();
            assert_eq!(hs_condition(&delta, &g, s).unwrap().value, want);
        }
        let c3 = hs_condition(&delta, &g, 2).unwrap();
        assert_eq!((c3.modulus, c3.scale_index), (2, 1));
    }

    #[test]
    fn torus_experiment_runs() {
        let t = GroupSpec::golden_torus();
        let inner = make_inner(1, Vec::new(), crate::trigpoly::TrigPoly::monomial(Character::torus(vec![1]), c(1.0)));
        let rows = torus_experiment(&inner, &t, &[4, 8, 16], 64).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.matrix_u.is_finite()));
    }
}

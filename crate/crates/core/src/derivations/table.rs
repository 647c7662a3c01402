use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::truncops::{AlgebraElement, Generator, SpaceKind};

use super::Derivation;

/// A derivation given by its values on generators, extended by Leibniz.
///
/// Finitely supported diagonals on the half line are reached through
/// `P_kk = U^k(U*)^k − U^{k+1}(U*)^{k+1}`, so only `U`, `U*` and the
/// characters that actually occur need entries.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorTable {
    kind: SpaceKind,
    images: BTreeMap<Generator, AlgebraElement>,
    kills_diagonals: bool,
}

impl GeneratorTable {
    pub fn new(kind: SpaceKind, images: BTreeMap<Generator, AlgebraElement>) -> Result<GeneratorTable> {
        for (gen, img) in &images {
            if gen.kind().is_some_and(|k| k != kind) {
                return Err(Error::SpaceMismatch(format!("generator {} in a {kind} table", gen.label())));
            }
            if img.kind() != kind {
                return Err(Error::SpaceMismatch(format!("image of {} lives on the wrong space", gen.label())));
            }
        }
        Ok(GeneratorTable { kind, images, kills_diagonals: false })
    }

    /// Table with `d(U)` given, `d(U*) = −U* d(U) U*` and all character
    /// multipliers annihilated.
    pub fn plus_killing_diagonals(g: &GroupSpec, du: AlgebraElement) -> Result<GeneratorTable> {
        let us = AlgebraElement::generator(g, &Generator::Ustar);
        let dus = us.mul(g, &du)?.mul(g, &us)?.scale(Complex64::new(-1.0, 0.0));
        let mut t = GeneratorTable::new(
            SpaceKind::Plus,
            BTreeMap::from([(Generator::U, du), (Generator::Ustar, dus)]),
        )?;
        t.kills_diagonals = true;
        Ok(t)
    }

    /// Full-line analogue: `d(V)` given, `d(V⁻¹) = −V⁻¹ d(V) V⁻¹`.
    pub fn full_killing_diagonals(g: &GroupSpec, dv: AlgebraElement) -> Result<GeneratorTable> {
        let vi = AlgebraElement::generator(g, &Generator::Vinv);
        let dvi = vi.mul(g, &dv)?.mul(g, &vi)?.scale(Complex64::new(-1.0, 0.0));
        let mut t = GeneratorTable::new(
            SpaceKind::Full,
            BTreeMap::from([(Generator::V, dv), (Generator::Vinv, dvi)]),
        )?;
        t.kills_diagonals = true;
        Ok(t)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn kills_diagonals(&self) -> bool {
        self.kills_diagonals
    }

    pub fn images(&self) -> impl Iterator<Item = (&Generator, &AlgebraElement)> {
        self.images.iter()
    }

    fn lookup(&self, gen: &Generator) -> Result<AlgebraElement> {
        if let Generator::MChar(chi) = gen {
            if chi.is_trivial() {
                return Ok(AlgebraElement::zero(self.kind));
            }
        }
        match self.images.get(gen) {
            Some(img) => Ok(img.clone()),
            None if self.kills_diagonals && matches!(gen, Generator::MChar(_)) => {
                Ok(AlgebraElement::zero(self.kind))
            }
            None => Err(Error::UncoveredGenerator(gen.label())),
        }
    }

    fn shift_gens(&self) -> (Generator, Generator) {
        match self.kind {
            SpaceKind::Plus => (Generator::U, Generator::Ustar),
            SpaceKind::Full => (Generator::V, Generator::Vinv),
        }
    }

    /// Size of the violation of the relations that pin down the adjoint
    /// shift: `d(U*)U + U*d(U) = 0` on the half line, both
    /// `d(V⁻¹)V + V⁻¹d(V)` and `d(V)V⁻¹ + V d(V⁻¹)` on the full line.
    pub fn consistency_defect(&self, g: &GroupSpec) -> Result<f64> {
        let (fwd, back) = self.shift_gens();
        let (s, si) = (AlgebraElement::generator(g, &fwd), AlgebraElement::generator(g, &back));
        let (ds, dsi) = (self.lookup(&fwd)?, self.lookup(&back)?);
        let left = dsi.mul(g, &s)?.add(&si.mul(g, &ds)?)?;
        let mut worst = left.max_coeff();
        if self.kind == SpaceKind::Full {
            let right = ds.mul(g, &si)?.add(&s.mul(g, &dsi)?)?;
            worst = worst.max(right.max_coeff());
        }
        Ok(worst)
    }

    /// `d(s^k)` for `k = 0..=max` by `d(s^{k+1}) = d(s^k)s + s^k d(s)`.
    fn powers(&self, g: &GroupSpec, gen: &Generator, max: usize) -> Result<Vec<AlgebraElement>> {
        let s = AlgebraElement::generator(g, gen);
        let ds = self.lookup(gen)?;
        let mut out = vec![AlgebraElement::zero(self.kind)];
        let mut pow = AlgebraElement::identity(g, self.kind);
        for _ in 0..max {
            let last = out.last().expect("nonempty");
            let next = last.mul(g, &s)?.add(&pow.mul(g, &ds)?)?;
            out.push(next);
            pow = pow.mul(g, &s)?;
        }
        Ok(out)
    }
}

impl Derivation for GeneratorTable {
    fn apply(&self, g: &GroupSpec, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.kind() != self.kind {
            return Err(Error::SpaceMismatch(format!("{} element for a {} table", a.kind(), self.kind)));
        }
        let (fwd, back) = self.shift_gens();
        let max_shift = a.width().max(a.support());
        let d_fwd = self.powers(g, &fwd, max_shift)?;
        let d_back = self.powers(g, &back, max_shift)?;
        let fwd_el = AlgebraElement::generator(g, &fwd);
        let back_el = AlgebraElement::generator(g, &back);
        let pow = |base: &AlgebraElement, k: usize| -> Result<AlgebraElement> {
            let mut p = AlgebraElement::identity(g, self.kind);
            for _ in 0..k {
                p = p.mul(g, base)?;
            }
            Ok(p)
        };

        // d(Q_k) for Q_k = s^k (s*)^k
        let support = a.support();
        let mut d_q = Vec::with_capacity(support + 1);
        if support > 0 {
            for k in 0..=support {
                let dq = d_fwd[k]
                    .mul(g, &pow(&back_el, k)?)?
                    .add(&pow(&fwd_el, k)?.mul(g, &d_back[k])?)?;
                d_q.push(dq);
            }
        }

        let mut out = AlgebraElement::zero(self.kind);
        for (n, sym) in a.bands() {
            let s_el = AlgebraElement::from_bands(self.kind, [(0, sym.clone())])?;
            let mut ds = AlgebraElement::zero(self.kind);
            for (chi, c) in sym.poly.terms() {
                ds = ds.add(&self.lookup(&Generator::MChar(chi.clone()))?.scale(*c))?;
            }
            // Σ_k seq(k) d(P_kk) = Σ_k (seq(k) − seq(k−1)) d(Q_k)
            for k in 0..=sym.seq.len() {
                let cur = sym.seq.get(k).copied().unwrap_or_default();
                let prev = if k == 0 { Complex64::default() } else { sym.seq[k - 1] };
                let w = cur - prev;
                if w != Complex64::default() && k > 0 {
                    ds = ds.add(&d_q[k].scale(w))?;
                }
            }
            let m = n.unsigned_abs() as usize;
            let term = if n >= 0 {
                let sh = pow(&fwd_el, m)?;
                d_fwd[m].mul(g, &s_el)?.add(&sh.mul(g, &ds)?)?
            } else {
                let sh = pow(&back_el, m)?;
                ds.mul(g, &sh)?.add(&s_el.mul(g, &d_back[m])?)?
            };
            out = out.add(&term)?;
        }
        Ok(out)
    }

    fn image(&self, _g: &GroupSpec, gen: &Generator, _kind: SpaceKind) -> Result<AlgebraElement> {
        match gen.kind() {
            Some(k) if k != self.kind => {
                Err(Error::SpaceMismatch(format!("generator {} for a {} table", gen.label(), self.kind)))
            }
            _ => self.lookup(gen),
        }
    }
}

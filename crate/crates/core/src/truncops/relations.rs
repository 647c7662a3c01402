//! Defining relations of the two algebras, checked on truncated matrices.

use serde::Serialize;

use crate::error::Result;
use crate::group::GroupSpec;
use crate::report::ser_f64;
use crate::trigpoly::TrigPoly;

use super::{make_mult, make_projection, make_shift, toeplitz_map, AlgebraElement, Space, SpaceKind, TruncatedOperator};

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub name: String,
    #[serde(serialize_with = "ser_f64")]
    pub max_error: f64,
}

fn check(name: &str, a: &TruncatedOperator, b: &TruncatedOperator, width: usize) -> Result<RelationCheck> {
    Ok(RelationCheck { name: name.to_string(), max_error: a.interior_max_diff(b, width)? })
}

/// Shift/multiplier relations for `f` and the Toeplitz identities for a
/// full-line element `b` and shift power `n ≥ 0`, all interior-masked.
///
/// With `V E_l = E_{l+1}` and `M_f E_l = f(x_l)E_l` one has
/// `V M_f V⁻¹ = M_{f∘φ⁻¹}` and `U M⁺_f = M⁺_{f∘φ⁻¹} U`.
pub fn relation_suite(g: &GroupSpec, f: &TrigPoly, b: &AlgebraElement, n: i64, l: usize) -> Result<Vec<RelationCheck>> {
    let n = n.abs();
    let mut out = Vec::new();
    let f_back = f.compose_phi(g, -1)?;

    let v = make_shift(SpaceKind::Full, 1, l)?;
    let vi = make_shift(SpaceKind::Full, -1, l)?;
    let mf = make_mult(g, f, SpaceKind::Full, l)?;
    out.push(check("V M_f V^-1 = M_(f∘φ^-1)", &(&(&v * &mf) * &vi), &make_mult(g, &f_back, SpaceKind::Full, l)?, 2)?);

    let u = make_shift(SpaceKind::Plus, 1, l)?;
    let us = make_shift(SpaceKind::Plus, -1, l)?;
    let mf_plus = make_mult(g, f, SpaceKind::Plus, l)?;
    let mb_plus = make_mult(g, &f_back, SpaceKind::Plus, l)?;
    out.push(check("U M+_f = M+_(f∘φ^-1) U", &(&u * &mf_plus), &(&mb_plus * &u), 2)?);

    let p0 = make_projection(0, 0, l)?;
    out.push(check("[U*, U] = P0", &(&(&us * &u) - &(&u * &us)), &p0, 2)?);
    let f0p0 = p0.scale(f.eval_orbit(g, 0)?);
    out.push(check("M+_f P0 = f(x0) P0", &(&mf_plus * &p0), &f0p0, 1)?);
    out.push(check("P0 M+_f = f(x0) P0", &(&p0 * &mf_plus), &f0p0, 1)?);

    let eye = TruncatedOperator::identity(Space::full(l));
    out.push(check("T(I) = I", &toeplitz_map(&eye)?, &TruncatedOperator::identity(Space::plus(l)), 0)?);

    let width = b.width() + n as usize + 2;
    let bm = b.realize(g, l)?;
    let tb = toeplitz_map(&bm)?;
    let vn = make_shift(SpaceKind::Full, n, l)?;
    let vmn = make_shift(SpaceKind::Full, -n, l)?;
    let un = make_shift(SpaceKind::Plus, n, l)?;
    let usn = make_shift(SpaceKind::Plus, -n, l)?;
    out.push(check("T(b V^n) = T(b) U^n", &toeplitz_map(&(&bm * &vn))?, &(&tb * &un), width)?);
    out.push(check("T(V^-n b) = (U*)^n T(b)", &toeplitz_map(&(&vmn * &bm))?, &(&usn * &tb), width)?);
    out.push(check("T(b M_f) = T(b) M+_f", &toeplitz_map(&(&bm * &mf))?, &(&tb * &mf_plus), width)?);
    Ok(out)
}

/// `max_k |f(x_k)|` on the window, a cheap scale for relative checks.
pub fn sup_on_window(g: &GroupSpec, f: &TrigPoly, l: usize) -> Result<f64> {
    Ok(f.eval_orbit_range(g, -(l as i64), 2 * l + 1)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Character;
    use num_complex::Complex64;

    #[test]
    fn suite_holds_on_both_groups() {
        let one = Complex64::new(1.0, 0.0);
        for g in [GroupSpec::p_adic(2, 8).unwrap(), GroupSpec::golden_torus()] {
            let chi = match &g {
                GroupSpec::Odometer { .. } => Character::odometer(8, 3).unwrap(),
                GroupSpec::Torus { .. } => Character::torus(vec![2]),
            };
            let f = TrigPoly::from_terms([(chi.clone(), one), (g.trivial_character(), Complex64::new(0.0, 0.5))]);
            let b = AlgebraElement::term(SpaceKind::Full, -2, Vec::new(), f.clone())
                .unwrap()
                .add(&AlgebraElement::shift(&g, SpaceKind::Full, 1))
                .unwrap();
            let checks = relation_suite(&g, &f, &b, 3, 32).unwrap();
            assert_eq!(checks.len(), 9);
            for c in checks {
                assert!(c.max_error <= 1e-12, "{}: {}", c.name, c.max_error);
            }
        }
    }

    #[test]
    fn stated_direction_fails_for_generic_f() {
        let g = GroupSpec::p_adic(2, 8).unwrap();
        let f = TrigPoly::monomial(Character::odometer(4, 1).unwrap(), Complex64::new(1.0, 0.0));
        let l = 16;
        let v = make_shift(SpaceKind::Full, 1, l).unwrap();
        let vi = make_shift(SpaceKind::Full, -1, l).unwrap();
        let lhs = &(&v * &make_mult(&g, &f, SpaceKind::Full, l).unwrap()) * &vi;
        let fwd = make_mult(&g, &f.compose_phi(&g, 1).unwrap(), SpaceKind::Full, l).unwrap();
        assert!(lhs.interior_max_diff(&fwd, 2).unwrap() > 1.0);
        assert!(sup_on_window(&g, &f, l).unwrap() == 1.0);
    }
}

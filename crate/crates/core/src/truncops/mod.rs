//! Compressions of operators on `ℓ²(Z≥0)` (the `Plus` space, indices
//! `0..L`) and `ℓ²(Z)` (the `Full` space, indices `−L..=L`).
//!
//! Every matrix here is the compression of an infinite operator to the
//! index window. Products of compressions agree with compressions of
//! products only away from the window edge; see [`TruncatedOperator::interior_max_diff`].

mod element;
mod relations;
mod symbol;

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use ndarray::{s, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::trigpoly::TrigPoly;

pub use element::{AlgebraElement, Generator, Symbol};
pub use relations::{relation_suite, sup_on_window, RelationCheck};
pub use symbol::{operator_to_symbol, symbol_to_operator, BandSymbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Plus,
    Full,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Plus => write!(f, "plus"),
            SpaceKind::Full => write!(f, "full"),
        }
    }
}

/// A truncation window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub kind: SpaceKind,
    pub l: usize,
}

impl Space {
    pub fn plus(l: usize) -> Space {
        Space { kind: SpaceKind::Plus, l }
    }

    pub fn full(l: usize) -> Space {
        Space { kind: SpaceKind::Full, l }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::Plus => self.l,
            SpaceKind::Full => 2 * self.l + 1,
        }
    }

    /// Smallest basis index in the window.
    pub fn first(&self) -> i64 {
        match self.kind {
            SpaceKind::Plus => 0,
            SpaceKind::Full => -(self.l as i64),
        }
    }

    /// Largest basis index in the window.
    pub fn last(&self) -> i64 {
        self.first() + self.dim() as i64 - 1
    }

    pub fn pos(&self, index: i64) -> Option<usize> {
        let p = index - self.first();
        (p >= 0 && (p as usize) < self.dim()).then_some(p as usize)
    }

    pub fn index(&self, pos: usize) -> i64 {
        self.first() + pos as i64
    }

    /// Whether `index` is at least `width` steps from every window edge
    /// that is a truncation (the edge at 0 of `Plus` is genuine).
    pub fn is_interior(&self, index: i64, width: usize) -> bool {
        let w = width as i64;
        match self.kind {
            SpaceKind::Plus => index >= 0 && index < self.l as i64 - w,
            SpaceKind::Full => index.abs() <= self.l as i64 - w,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    space: Space,
    m: Array2<Complex64>,
}

impl TruncatedOperator {
    pub fn zeros(space: Space) -> TruncatedOperator {
        let d = space.dim();
        TruncatedOperator { space, m: Array2::zeros((d, d)) }
    }

    pub fn identity(space: Space) -> TruncatedOperator {
        let d = space.dim();
        TruncatedOperator { space, m: Array2::eye(d) }
    }

    pub fn from_matrix(space: Space, m: Array2<Complex64>) -> Result<TruncatedOperator> {
        if m.dim() != (space.dim(), space.dim()) {
            return Err(Error::SpaceMismatch(format!(
                "{:?} matrix for a window of dimension {}",
                m.dim(),
                space.dim()
            )));
        }
        Ok(TruncatedOperator { space, m })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.m
    }

    /// `⟨E_row, a E_col⟩`, zero outside the window.
    pub fn get(&self, row: i64, col: i64) -> Complex64 {
        match (self.space.pos(row), self.space.pos(col)) {
            (Some(r), Some(c)) => self.m[[r, c]],
            _ => Complex64::default(),
        }
    }

    pub fn set(&mut self, row: i64, col: i64, v: Complex64) -> Result<()> {
        let l = self.space.l;
        let r = self.space.pos(row).ok_or(Error::IndexOutOfRange { index: row, l })?;
        let c = self.space.pos(col).ok_or(Error::IndexOutOfRange { index: col, l })?;
        self.m[[r, c]] = v;
        Ok(())
    }

    fn check_same(&self, other: &TruncatedOperator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(format!("{:?} vs {:?}", self.space, other.space)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.check_same(other)?;
        Ok(TruncatedOperator { space: self.space, m: &self.m + &other.m })
    }

    pub fn try_sub(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.check_same(other)?;
        Ok(TruncatedOperator { space: self.space, m: &self.m - &other.m })
    }

    /// Matrix product; skips zero entries of `self` and multiplies only the
    /// nonzero span of each row of `other`, so banded products stay cheap.
    pub fn try_mul(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.check_same(other)?;
        let d = self.space.dim();
        let spans: Vec<Option<(usize, usize)>> = (0..d)
            .map(|k| {
                let row = other.m.row(k);
                let lo = row.iter().position(|v| *v != Complex64::default())?;
                let hi = row.iter().rposition(|v| *v != Complex64::default())?;
                Some((lo, hi))
            })
            .collect();
        let mut out = Array2::<Complex64>::zeros((d, d));
        for i in 0..d {
            for k in 0..d {
                let a = self.m[[i, k]];
                if a == Complex64::default() {
                    continue;
                }
                if let Some((lo, hi)) = spans[k] {
                    let src = other.m.slice(s![k, lo..=hi]);
                    let mut dst = out.slice_mut(s![i, lo..=hi]);
                    dst.zip_mut_with(&src, |o, b| *o += a * b);
                }
            }
        }
        Ok(TruncatedOperator { space: self.space, m: out })
    }

    pub fn scale(&self, c: Complex64) -> TruncatedOperator {
        TruncatedOperator { space: self.space, m: self.m.mapv(|v| v * c) }
    }

    pub fn adjoint(&self) -> TruncatedOperator {
        TruncatedOperator { space: self.space, m: self.m.t().mapv(|v| v.conj()) }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// Frobenius norm.
    pub fn hs_norm(&self) -> f64 {
        self.hs_norm_sq().sqrt()
    }

    pub fn hs_norm_sq(&self) -> f64 {
        self.m.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry difference over rows and columns at least `width`
    /// away from the truncation edge.
    pub fn interior_max_diff(&self, other: &TruncatedOperator, width: usize) -> Result<f64> {
        self.check_same(other)?;
        let sp = self.space;
        let mut worst = 0.0f64;
        for ((r, c), v) in self.m.indexed_iter() {
            if sp.is_interior(sp.index(r), width) && sp.is_interior(sp.index(c), width) {
                worst = worst.max((v - other.m[[r, c]]).norm());
            }
        }
        Ok(worst)
    }

    /// Restriction to interior rows and columns (others zeroed).
    pub fn interior(&self, width: usize) -> TruncatedOperator {
        let sp = self.space;
        let mut out = self.clone();
        for ((r, c), v) in out.m.indexed_iter_mut() {
            if !(sp.is_interior(sp.index(r), width) && sp.is_interior(sp.index(c), width)) {
                *v = Complex64::default();
            }
        }
        out
    }

    /// Column `a E_col` as a vector over the window.
    pub fn column(&self, col: i64) -> Vec<Complex64> {
        match self.space.pos(col) {
            Some(c) => self.m.column(c).to_vec(),
            None => vec![Complex64::default(); self.space.dim()],
        }
    }

    /// Frobenius mass outside the leading `r×r` corner of a `Plus` window.
    pub fn tail_mass(&self, r: usize) -> f64 {
        let mut acc = 0.0;
        for ((i, j), v) in self.m.indexed_iter() {
            if i >= r || j >= r {
                acc += v.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Largest singular value by power iteration on `a*a`.
    pub fn op_norm_estimate(&self) -> f64 {
        let d = self.space.dim();
        if d == 0 {
            return 0.0;
        }
        let mut x: Vec<Complex64> = (0..d)
            .map(|i| Complex64::new(1.0 + (i as f64 * 0.618).sin() * 0.5, 0.0))
            .collect();
        let mut est = 0.0;
        for _ in 0..200 {
            let nx: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if nx == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let y: Vec<Complex64> = (0..d)
                .map(|i| (0..d).map(|j| self.m[[i, j]] * x[j]).sum())
                .collect();
            let z: Vec<Complex64> = (0..d)
                .map(|j| (0..d).map(|i| self.m[[i, j]].conj() * y[i]).sum())
                .collect();
            let next = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().sqrt();
            let done = (next - est).abs() <= 1e-13 * next.max(1e-300);
            est = next;
            x = z;
            if done {
                break;
            }
        }
        est
    }

    /// Row-major dump with a `{space, L}` header.
    pub fn to_dump_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            space: SpaceKind,
            #[serde(rename = "L")]
            l: usize,
            first_index: i64,
            data: &'a [(f64, f64)],
        }
        let data: Vec<(f64, f64)> = self.m.iter().map(|v| (v.re, v.im)).collect();
        serde_json::to_string(&Dump {
            space: self.space.kind,
            l: self.space.l,
            first_index: self.space.first(),
            data: &data,
        })
        .expect("dump serializes")
    }
}

impl Add for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn add(self, rhs: &TruncatedOperator) -> TruncatedOperator {
        self.try_add(rhs).expect("operands share a window")
    }
}

impl Sub for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn sub(self, rhs: &TruncatedOperator) -> TruncatedOperator {
        self.try_sub(rhs).expect("operands share a window")
    }
}

impl Mul for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn mul(self, rhs: &TruncatedOperator) -> TruncatedOperator {
        self.try_mul(rhs).expect("operands share a window")
    }
}

/// `U^power` (negative powers are `(U*)^{|power|}`) or `V^power`.
pub fn make_shift(kind: SpaceKind, power: i64, l: usize) -> Result<TruncatedOperator> {
    if power.unsigned_abs() as usize > l {
        return Err(Error::PowerOutOfRange { power, l });
    }
    let space = Space { kind, l };
    let mut a = TruncatedOperator::zeros(space);
    for c in space.first()..=space.last() {
        if let (Some(r), Some(cp)) = (space.pos(c + power), space.pos(c)) {
            a.m[[r, cp]] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(a)
}

/// Diagonal `f(x_k)` over the window.
pub fn make_mult(g: &GroupSpec, f: &TrigPoly, kind: SpaceKind, l: usize) -> Result<TruncatedOperator> {
    let space = Space { kind, l };
    let vals = f.eval_orbit_range(g, space.first(), space.dim())?;
    Ok(TruncatedOperator { space, m: Array2::from_diag(&ndarray::Array1::from(vals)) })
}

/// `𝕂` or `𝕃`.
pub fn make_label(kind: SpaceKind, l: usize) -> TruncatedOperator {
    let space = Space { kind, l };
    let vals: Vec<Complex64> = (0..space.dim())
        .map(|p| Complex64::new(space.index(p) as f64, 0.0))
        .collect();
    TruncatedOperator { space, m: Array2::from_diag(&ndarray::Array1::from(vals)) }
}

/// Diagonal operator from explicit values on a `Plus` window.
pub fn make_diag(values: &[Complex64], l: usize) -> TruncatedOperator {
    let mut a = TruncatedOperator::zeros(Space::plus(l));
    for (k, v) in values.iter().take(l).enumerate() {
        a.m[[k, k]] = *v;
    }
    a
}

/// Matrix unit `E_to⟨E_from, ·⟩` on `Plus(L)`; `(0, 0)` is `P₀`.
pub fn make_projection(k_from: i64, k_to: i64, l: usize) -> Result<TruncatedOperator> {
    for k in [k_from, k_to] {
        if k < 0 || k >= l as i64 {
            return Err(Error::IndexOutOfRange { index: k, l });
        }
    }
    let mut a = TruncatedOperator::zeros(Space::plus(l));
    a.m[[k_to as usize, k_from as usize]] = Complex64::new(1.0, 0.0);
    Ok(a)
}

/// `T(b) = P₊ b` restricted to `ℓ²(Z≥0)`: the nonnegative corner.
pub fn toeplitz_map(b: &TruncatedOperator) -> Result<TruncatedOperator> {
    if b.space.kind != SpaceKind::Full {
        return Err(Error::SpaceMismatch("toeplitz map expects a full-space operator".into()));
    }
    let l = b.space.l;
    let m = b.m.slice(s![l..2 * l, l..2 * l]).to_owned();
    Ok(TruncatedOperator { space: Space::plus(l), m })
}

/// `ρ_θ(a) = e^{iθ𝕂} a e^{−iθ𝕂}`: entry `(j,k)` times `e^{iθ(j−k)}`.
pub fn rho_theta(a: &TruncatedOperator, theta: f64) -> TruncatedOperator {
    let mut out = a.clone();
    for ((r, c), v) in out.m.indexed_iter_mut() {
        let d = r as f64 - c as f64;
        *v *= Complex64::from_polar(1.0, theta * d);
    }
    out
}

/// Keeps only the band `row − col = n`.
pub fn band_extract(a: &TruncatedOperator, n: i64) -> TruncatedOperator {
    let mut out = TruncatedOperator::zeros(a.space);
    let d = a.space.dim() as i64;
    for c in 0..d {
        let r = c + n;
        if (0..d).contains(&r) {
            out.m[[r as usize, c as usize]] = a.m[[r as usize, c as usize]];
        }
    }
    out
}

/// `(1/2π)∫₀^{2π} e^{inθ} ρ_θ^{−1}(a) dθ` by the trapezoid rule.
pub fn band_by_quadrature(a: &TruncatedOperator, n: i64, points: usize) -> TruncatedOperator {
    let mut acc = Array2::<Complex64>::zeros(a.m.dim());
    for p in 0..points {
        let theta = TAU * p as f64 / points as f64;
        let w = Complex64::from_polar(1.0 / points as f64, n as f64 * theta);
        let rot = rho_theta(a, -theta);
        acc.zip_mut_with(&rot.m, |o, v| *o += w * v);
    }
    TruncatedOperator { space: a.space, m: acc }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Character;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn shift_examples() {
        let u = make_shift(SpaceKind::Plus, 1, 3).unwrap();
        assert_eq!(u.get(1, 0), one());
        assert_eq!(u.get(2, 1), one());
        assert_eq!(u.hs_norm_sq(), 2.0);
        let v = make_shift(SpaceKind::Full, -1, 1).unwrap();
        assert_eq!(v.get(-1, 0), one());
        assert_eq!(v.get(0, 1), one());
        assert_eq!(v.hs_norm_sq(), 2.0);
        assert!(matches!(make_shift(SpaceKind::Plus, 4, 3), Err(Error::PowerOutOfRange { .. })));
    }

    #[test]
    fn shift_relations() {
        let l = 16;
        let u = make_shift(SpaceKind::Plus, 1, l).unwrap();
        let us = make_shift(SpaceKind::Plus, -1, l).unwrap();
        let i = TruncatedOperator::identity(Space::plus(l));
        let p0 = make_projection(0, 0, l).unwrap();
        assert!((&us * &u).interior_max_diff(&i, 1).unwrap() == 0.0);
        assert!((&u * &us).interior_max_diff(&(&i - &p0), 1).unwrap() == 0.0);
        assert_eq!((&(&us * &u) - &(&u * &us)).interior_max_diff(&p0, 1).unwrap(), 0.0);
    }

    #[test]
    fn label_and_mult() {
        assert_eq!(make_label(SpaceKind::Plus, 3).get(2, 2), Complex64::new(2.0, 0.0));
        let lf = make_label(SpaceKind::Full, 1);
        assert_eq!(lf.get(-1, -1), Complex64::new(-1.0, 0.0));
        let g = GroupSpec::p_adic(2, 4).unwrap();
        let f = TrigPoly::monomial(Character::odometer(2, 1).unwrap(), one());
        let m = make_mult(&g, &f, SpaceKind::Plus, 4).unwrap();
        let diag: Vec<f64> = (0..4).map(|k| m.get(k, k).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
        let id = make_mult(&g, &TrigPoly::constant(&g, one()), SpaceKind::Full, 3).unwrap();
        assert_eq!(id, TruncatedOperator::identity(Space::full(3)));
    }

    #[test]
    fn projection_examples() {
        let p = make_projection(1, 2, 3).unwrap();
        assert_eq!(p.get(2, 1), one());
        assert_eq!(p.hs_norm(), 1.0);
        assert!(make_projection(0, 3, 3).is_err());
    }

    #[test]
    fn toeplitz_corner() {
        let v = make_shift(SpaceKind::Full, 1, 5).unwrap();
        assert_eq!(toeplitz_map(&v).unwrap(), make_shift(SpaceKind::Plus, 1, 5).unwrap());
        let i = TruncatedOperator::identity(Space::full(5));
        assert_eq!(toeplitz_map(&i).unwrap(), TruncatedOperator::identity(Space::plus(5)));
        assert!(toeplitz_map(&make_label(SpaceKind::Plus, 3)).is_err());
    }

    #[test]
    fn rotation_and_bands() {
        let l = 6;
        let u = make_shift(SpaceKind::Plus, 1, l).unwrap();
        let p0 = make_projection(0, 0, l).unwrap();
        let th = 0.7;
        let ru = rho_theta(&u, th);
        assert!((&ru - &u.scale(Complex64::from_polar(1.0, th))).max_abs() < 1e-15);
        let k = make_label(SpaceKind::Plus, l);
        assert_eq!(rho_theta(&k, th), k);
        let twice = rho_theta(&rho_theta(&u, std::f64::consts::PI), std::f64::consts::PI);
        assert!((&twice - &u).max_abs() < 1e-15);
        let a = &u + &p0;
        assert_eq!(band_extract(&a, 1), u);
        assert_eq!(band_extract(&a, 0), p0);
        assert_eq!(band_extract(&k, 2).max_abs(), 0.0);
    }

    #[test]
    fn hs_examples() {
        for l in [3, 10] {
            let u = make_shift(SpaceKind::Plus, 1, l).unwrap();
            assert!((u.hs_norm() - ((l - 1) as f64).sqrt()).abs() < 1e-15);
        }
        assert_eq!(make_projection(0, 0, 4).unwrap().hs_norm(), 1.0);
        let d = make_diag(&[Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)], 2);
        assert_eq!(d.hs_norm(), 5.0);
    }

    #[test]
    fn op_norm_of_shift() {
        let u = make_shift(SpaceKind::Plus, 1, 20).unwrap();
        assert!((u.op_norm_estimate() - 1.0).abs() < 1e-9);
        let d = make_diag(&[Complex64::new(3.0, 0.0), Complex64::new(-4.0, 0.0)], 2);
        assert!((d.op_norm_estimate() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn dump_header() {
        let u = make_shift(SpaceKind::Full, 1, 1).unwrap();
        let text = u.to_dump_json();
        assert!(text.starts_with(r#"{"space":"full","L":1,"first_index":-1,"data":[[0.0,0.0]"#), "{text}");
    }
}

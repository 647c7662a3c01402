//! Compact monothetic groups: odometers `Z/NZ` and tori `T^n`, their
//! orbit points `x_k = k·x_1` and characters.

pub mod angle;
pub mod supernatural;

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use angle::Angle;
pub use supernatural::{
    multibase_add, multibase_point_to_scale_point, multibase_to_scale, scale_limit, Exactness,
    Exponent, Scale, SupernaturalNumber,
};

/// Inverse-limit coordinates `(y_1, …, y_m)`, `y_i ∈ Z/s_iZ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdometerPoint {
    pub residues: Vec<u64>,
}

/// A point of `T^n = R^n/Z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    pub coords: Vec<Angle>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupPoint {
    Odometer(OdometerPoint),
    Torus(TorusPoint),
}

/// `e^{2πi p/q}`, exact at quarter turns.
pub fn root_of_unity(p: u64, q: u64) -> Complex64 {
    let p = p % q;
    let g = p.gcd(&q);
    let (p, q) = (p / g, q / g);
    match (p, q) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        _ => {
            let t = p as f64 / q as f64;
            let t = if t > 0.5 { t - 1.0 } else { t };
            let (s, c) = (std::f64::consts::TAU * t).sin_cos();
            Complex64::new(c, s)
        }
    }
}

/// A character of an odometer (`x_k ↦ e^{2πijk/M}`) or of a torus
/// (`x ↦ e^{2πi⟨m,x⟩}`), always stored in reduced form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Character {
    Odometer { modulus: u64, index: u64 },
    Torus { freq: Vec<i64> },
}

impl Character {
    /// `(j mod M)` reduced by `gcd(j, M)`; the trivial character is `(1, 0)`.
    pub fn odometer(modulus: u64, index: i64) -> Result<Character> {
        if modulus == 0 {
            return Err(Error::InvalidGroup("character modulus must be positive".into()));
        }
        let j = index.rem_euclid(modulus as i64) as u64;
        if j == 0 {
            return Ok(Character::Odometer { modulus: 1, index: 0 });
        }
        let g = j.gcd(&modulus);
        Ok(Character::Odometer { modulus: modulus / g, index: j / g })
    }

    pub fn torus(freq: Vec<i64>) -> Character {
        Character::Torus { freq }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Character::Odometer { modulus, .. } => *modulus == 1,
            Character::Torus { freq } => freq.iter().all(|&m| m == 0),
        }
    }

    pub fn mul(&self, other: &Character) -> Result<Character> {
        match (self, other) {
            (
                Character::Odometer { modulus: m1, index: j1 },
                Character::Odometer { modulus: m2, index: j2 },
            ) => {
                let l = m1.lcm(m2);
                let j = ((*j1 as u128 * (l / m1) as u128 + *j2 as u128 * (l / m2) as u128)
                    % l as u128) as i64;
                Character::odometer(l, j)
            }
            (Character::Torus { freq: a }, Character::Torus { freq: b }) => {
                if a.len() != b.len() {
                    return Err(Error::IncompatiblePoints(format!(
                        "frequency dimensions {} and {}",
                        a.len(),
                        b.len()
                    )));
                }
                Ok(Character::Torus { freq: a.iter().zip(b).map(|(x, y)| x + y).collect() })
            }
            _ => Err(Error::IncompatiblePoints(
                "cannot multiply odometer and torus characters".into(),
            )),
        }
    }

    pub fn inv(&self) -> Character {
        match self {
            Character::Odometer { modulus, index } => {
                Character::odometer(*modulus, -(*index as i64)).expect("modulus is positive")
            }
            Character::Torus { freq } => Character::Torus { freq: freq.iter().map(|m| -m).collect() },
        }
    }
}

impl PartialOrd for Character {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Character {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (
                Character::Odometer { modulus: m1, index: j1 },
                Character::Odometer { modulus: m2, index: j2 },
            ) => (m1, j1).cmp(&(m2, j2)),
            (Character::Torus { freq: a }, Character::Torus { freq: b }) => {
                let na: i64 = a.iter().map(|m| m.abs()).sum();
                let nb: i64 = b.iter().map(|m| m.abs()).sum();
                (na, a).cmp(&(nb, b))
            }
            (Character::Odometer { .. }, Character::Torus { .. }) => Ordering::Less,
            (Character::Torus { .. }, Character::Odometer { .. }) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Character::Odometer { modulus, index } => write!(f, "chi(M={modulus},j={index})"),
            Character::Torus { freq } => {
                let parts: Vec<String> = freq.iter().map(|m| m.to_string()).collect();
                write!(f, "chi(m=[{}])", parts.join(","))
            }
        }
    }
}

/// A monothetic group with its distinguished generator `x_1`: the odometer
/// `(1,1,…)` or the torus rotation vector `θ`.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupSpec {
    Odometer { modulus: SupernaturalNumber, scale: Scale },
    Torus { theta: Vec<Angle> },
}

impl GroupSpec {
    pub fn odometer(modulus: SupernaturalNumber, scale: Scale) -> Result<GroupSpec> {
        for &s in scale.terms() {
            if !modulus.is_divisible_by(s) {
                return Err(Error::InvalidScale(format!("scale term {s} does not divide N = {modulus}")));
            }
        }
        Ok(GroupSpec::Odometer { modulus, scale })
    }

    /// `Z/p^∞` with scale `(p, p², …, p^len)`.
    pub fn p_adic(p: u64, len: usize) -> Result<GroupSpec> {
        GroupSpec::odometer(SupernaturalNumber::prime_power_infinite(p)?, Scale::powers(p, len)?)
    }

    pub fn torus(theta: Vec<Angle>) -> Result<GroupSpec> {
        if theta.is_empty() {
            return Err(Error::InvalidGroup("torus needs at least one rotation number".into()));
        }
        Ok(GroupSpec::Torus { theta })
    }

    /// `T¹` rotated by the golden mean `(√5−1)/2`.
    pub fn golden_torus() -> GroupSpec {
        let theta = Angle::parse_decimal("0.61803398874989484820458683436563811772")
            .expect("literal parses");
        GroupSpec::Torus { theta: vec![theta] }
    }

    pub fn is_odometer(&self) -> bool {
        matches!(self, GroupSpec::Odometer { .. })
    }

    pub fn scale(&self) -> Option<&Scale> {
        match self {
            GroupSpec::Odometer { scale, .. } => Some(scale),
            GroupSpec::Torus { .. } => None,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            GroupSpec::Odometer { scale, .. } => scale.len(),
            GroupSpec::Torus { theta } => theta.len(),
        }
    }

    pub fn trivial_character(&self) -> Character {
        match self {
            GroupSpec::Odometer { .. } => Character::Odometer { modulus: 1, index: 0 },
            GroupSpec::Torus { theta } => Character::Torus { freq: vec![0; theta.len()] },
        }
    }

    /// Human-readable caveats: scale/N mismatch, near-rational rotations.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            GroupSpec::Odometer { modulus, scale } => {
                let (limit, _) = scale_limit(scale);
                for (p, e) in modulus.exponents() {
                    let reached = limit.exponent(p);
                    if reached != e {
                        let shown = match reached {
                            Exponent::Finite(k) => k.to_string(),
                            Exponent::Infinite => "inf".into(),
                        };
                        out.push(format!(
                            "scale prefix reaches exponent {shown} of prime {p}; characters with larger {p}-power modulus are unresolvable"
                        ));
                    }
                }
            }
            GroupSpec::Torus { theta } => {
                for (i, t) in theta.iter().enumerate() {
                    if let Some((p, q)) = t.near_rational(1_000_000, 1e-12) {
                        out.push(format!(
                            "theta[{i}] = {t} lies within 1e-12 of {p}/{q}; the rotation may not be minimal"
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn zero(&self) -> GroupPoint {
        self.orbit_point(0)
    }

    /// `x_k = k·x_1`.
    pub fn orbit_point(&self, k: i64) -> GroupPoint {
        match self {
            GroupSpec::Odometer { scale, .. } => GroupPoint::Odometer(OdometerPoint {
                residues: scale
                    .terms()
                    .iter()
                    .map(|&s| k.rem_euclid(s as i64) as u64)
                    .collect(),
            }),
            GroupSpec::Torus { theta } => GroupPoint::Torus(TorusPoint {
                coords: theta.iter().map(|t| t.mul_int(k)).collect(),
            }),
        }
    }

    fn check_point(&self, p: &GroupPoint) -> Result<()> {
        match (self, p) {
            (GroupSpec::Odometer { scale, .. }, GroupPoint::Odometer(q)) => {
                if q.residues.len() != scale.len() {
                    return Err(Error::IncompatiblePoints(format!(
                        "point has {} residues, scale prefix has {} terms",
                        q.residues.len(),
                        scale.len()
                    )));
                }
                for (i, (&y, &s)) in q.residues.iter().zip(scale.terms()).enumerate() {
                    if y >= s {
                        return Err(Error::IncompatiblePoints(format!("residue {y} >= s_{} = {s}", i + 1)));
                    }
                    if i > 0 && y % scale.terms()[i - 1] != q.residues[i - 1] {
                        return Err(Error::IncompatiblePoints(format!(
                            "residues {} and {y} are not compatible",
                            q.residues[i - 1]
                        )));
                    }
                }
                Ok(())
            }
            (GroupSpec::Torus { theta }, GroupPoint::Torus(q)) => {
                if q.coords.len() != theta.len() {
                    return Err(Error::IncompatiblePoints(format!(
                        "point has {} coordinates, torus has dimension {}",
                        q.coords.len(),
                        theta.len()
                    )));
                }
                Ok(())
            }
            _ => Err(Error::IncompatiblePoints("point and group are of different kinds".into())),
        }
    }

    pub fn add(&self, p: &GroupPoint, q: &GroupPoint) -> Result<GroupPoint> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(match (self, p, q) {
            (GroupSpec::Odometer { scale, .. }, GroupPoint::Odometer(a), GroupPoint::Odometer(b)) => {
                GroupPoint::Odometer(OdometerPoint {
                    residues: a
                        .residues
                        .iter()
                        .zip(&b.residues)
                        .zip(scale.terms())
                        .map(|((&x, &y), &s)| ((x as u128 + y as u128) % s as u128) as u64)
                        .collect(),
                })
            }
            (_, GroupPoint::Torus(a), GroupPoint::Torus(b)) => GroupPoint::Torus(TorusPoint {
                coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x.add(*y)).collect(),
            }),
            _ => unreachable!("checked above"),
        })
    }

    pub fn neg(&self, p: &GroupPoint) -> Result<GroupPoint> {
        self.check_point(p)?;
        Ok(match (self, p) {
            (GroupSpec::Odometer { scale, .. }, GroupPoint::Odometer(a)) => {
                GroupPoint::Odometer(OdometerPoint {
                    residues: a
                        .residues
                        .iter()
                        .zip(scale.terms())
                        .map(|(&x, &s)| (s - x) % s)
                        .collect(),
                })
            }
            (_, GroupPoint::Torus(a)) => {
                GroupPoint::Torus(TorusPoint { coords: a.coords.iter().map(|x| x.neg()).collect() })
            }
            _ => unreachable!("checked above"),
        })
    }

    /// Checks that `chi` belongs to this group and, for odometers, returns
    /// the stored scale index that resolves its modulus.
    fn resolve(&self, chi: &Character) -> Result<Option<usize>> {
        match (self, chi) {
            (GroupSpec::Odometer { modulus: n, scale }, Character::Odometer { modulus, .. }) => {
                if *modulus == 1 {
                    return Ok(None);
                }
                if !n.is_divisible_by(*modulus) {
                    return Err(Error::ForeignCharacter(chi.clone()));
                }
                scale
                    .resolving_index(*modulus)
                    .map(Some)
                    .ok_or_else(|| Error::UnresolvableCharacter(chi.clone()))
            }
            (GroupSpec::Torus { theta }, Character::Torus { freq }) => {
                if freq.len() != theta.len() {
                    return Err(Error::ForeignCharacter(chi.clone()));
                }
                Ok(None)
            }
            _ => Err(Error::ForeignCharacter(chi.clone())),
        }
    }

    pub fn validate_character(&self, chi: &Character) -> Result<()> {
        self.resolve(chi).map(|_| ())
    }

    pub fn character_eval(&self, chi: &Character, x: &GroupPoint) -> Result<Complex64> {
        self.check_point(x)?;
        let slot = self.resolve(chi)?;
        match (chi, x) {
            (Character::Odometer { modulus, index }, GroupPoint::Odometer(p)) => {
                let Some(i) = slot else {
                    return Ok(Complex64::new(1.0, 0.0));
                };
                let r = p.residues[i - 1] % modulus;
                let phase = ((*index as u128 * r as u128) % *modulus as u128) as u64;
                Ok(root_of_unity(phase, *modulus))
            }
            (Character::Torus { freq }, GroupPoint::Torus(p)) => Ok(torus_phase(freq, &p.coords).unit()),
            _ => Err(Error::ForeignCharacter(chi.clone())),
        }
    }

    /// `χ(x_k)` without building the point; the odometer phase `jk mod M`
    /// is computed in integers.
    pub fn character_at_orbit(&self, chi: &Character, k: i64) -> Result<Complex64> {
        self.resolve(chi)?;
        match (self, chi) {
            (GroupSpec::Odometer { .. }, Character::Odometer { modulus, index }) => {
                let m = *modulus as i128;
                let phase = ((*index as i128 * k as i128).rem_euclid(m)) as u64;
                Ok(root_of_unity(phase, *modulus))
            }
            (GroupSpec::Torus { theta }, Character::Torus { freq }) => {
                let coords: Vec<Angle> = theta.iter().map(|t| t.mul_int(k)).collect();
                Ok(torus_phase(freq, &coords).unit())
            }
            _ => Err(Error::ForeignCharacter(chi.clone())),
        }
    }

    /// A character with `χ(x_n) ≠ 1`.
    pub fn separating_character(&self, n: i64) -> Result<Character> {
        if n == 0 {
            return Err(Error::InvalidParameter("separating character needs n != 0".into()));
        }
        match self {
            GroupSpec::Odometer { scale, .. } => scale
                .terms()
                .iter()
                .find(|&&s| n.unsigned_abs() % s != 0)
                .map(|&s| Character::Odometer { modulus: s, index: 1 })
                .ok_or(Error::PrefixExhausted { n }),
            GroupSpec::Torus { theta } => {
                let mut freq = vec![0; theta.len()];
                freq[0] = 1;
                Ok(Character::Torus { freq })
            }
        }
    }
}

fn torus_phase(freq: &[i64], coords: &[Angle]) -> Angle {
    freq.iter()
        .zip(coords)
        .fold(Angle::ZERO, |acc, (&m, x)| acc.add(x.mul_int(m)))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentJson {
    Finite(u32),
    Named(String),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum GroupJson {
    Odometer {
        primes: Vec<(u64, ExponentJson)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<Vec<u64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        multibase: Option<Vec<u64>>,
    },
    Torus {
        theta: Vec<String>,
    },
}

/// Default prefix: `s_i = ∏_p p^{min(i, ε_p)}`, up to 16 terms.
fn default_scale(n: &SupernaturalNumber) -> Result<Scale> {
    let mut terms: Vec<u64> = Vec::new();
    for i in 1..=16u32 {
        let mut s = 1u64;
        for (p, e) in n.exponents() {
            let k = match e {
                Exponent::Finite(k) => k.min(i),
                Exponent::Infinite => i,
            };
            match p.checked_pow(k).and_then(|q| s.checked_mul(q)) {
                Some(v) => s = v,
                None => return Scale::new(terms),
            }
        }
        if terms.last().is_some_and(|&l| l == s) {
            break;
        }
        terms.push(s);
    }
    Scale::new(terms)
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<GroupSpec> {
        let raw: GroupJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidGroup(e.to_string()))?;
        match raw {
            GroupJson::Odometer { primes, scale, multibase } => {
                let mut pairs = Vec::with_capacity(primes.len());
                for (p, e) in primes {
                    let e = match e {
                        ExponentJson::Finite(k) => Exponent::Finite(k),
                        ExponentJson::Named(s) if s == "inf" => Exponent::Infinite,
                        ExponentJson::Named(s) => {
                            return Err(Error::InvalidSupernatural(format!("bad exponent {s:?}")))
                        }
                    };
                    pairs.push((p, e));
                }
                let n = SupernaturalNumber::new(pairs)?;
                let scale = match (scale, multibase) {
                    (Some(_), Some(_)) => {
                        return Err(Error::InvalidGroup("give either scale or multibase, not both".into()))
                    }
                    (Some(s), None) => Scale::new(s)?,
                    (None, Some(b)) => multibase_to_scale(&b)?,
                    (None, None) => default_scale(&n)?,
                };
                GroupSpec::odometer(n, scale)
            }
            GroupJson::Torus { theta } => {
                let theta = theta
                    .iter()
                    .map(|t| Angle::parse_decimal(t))
                    .collect::<Result<Vec<_>>>()?;
                GroupSpec::torus(theta)
            }
        }
    }

    pub fn to_json(&self) -> String {
        let raw = match self {
            GroupSpec::Odometer { modulus, scale } => GroupJson::Odometer {
                primes: modulus
                    .exponents()
                    .map(|(p, e)| {
                        let e = match e {
                            Exponent::Finite(k) => ExponentJson::Finite(k),
                            Exponent::Infinite => ExponentJson::Named("inf".into()),
                        };
                        (p, e)
                    })
                    .collect(),
                scale: Some(scale.terms().to_vec()),
                multibase: None,
            },
            GroupSpec::Torus { theta } => GroupJson::Torus {
                theta: theta.iter().map(|t| format!("{:.17}", t.value())).collect(),
            },
        };
        serde_json::to_string(&raw).expect("group json serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_adic() -> GroupSpec {
        GroupSpec::p_adic(2, 3).unwrap()
    }

    fn residues(p: &GroupPoint) -> Vec<u64> {
        match p {
            GroupPoint::Odometer(o) => o.residues.clone(),
            _ => panic!("not an odometer point"),
        }
    }

    #[test]
    fn orbit_points() {
        let g = two_adic();
        assert_eq!(residues(&g.orbit_point(3)), vec![1, 3, 3]);
        assert_eq!(residues(&g.orbit_point(0)), vec![0, 0, 0]);
        assert_eq!(residues(&g.orbit_point(-1)), vec![1, 3, 7]);
    }

    #[test]
    fn addition_examples() {
        let g = two_adic();
        let p = GroupPoint::Odometer(OdometerPoint { residues: vec![1, 1, 1] });
        assert_eq!(residues(&g.add(&p, &p).unwrap()), vec![0, 2, 2]);
        assert_eq!(g.add(&p, &g.zero()).unwrap(), p);
        let t = GroupSpec::torus(vec![Angle::from_f64(0.1)]).unwrap();
        let a = GroupPoint::Torus(TorusPoint { coords: vec![Angle::from_f64(0.75)] });
        let b = GroupPoint::Torus(TorusPoint { coords: vec![Angle::from_f64(0.5)] });
        match t.add(&a, &b).unwrap() {
            GroupPoint::Torus(q) => assert_eq!(q.coords[0].value(), 0.25),
            _ => unreachable!(),
        }
        let short = GroupPoint::Odometer(OdometerPoint { residues: vec![1, 1] });
        assert!(g.add(&p, &short).is_err());
    }

    #[test]
    fn incompatible_residues_rejected() {
        let g = two_adic();
        let bad = GroupPoint::Odometer(OdometerPoint { residues: vec![1, 2, 2] });
        assert!(matches!(g.add(&bad, &g.zero()), Err(Error::IncompatiblePoints(_))));
    }

    #[test]
    fn character_examples() {
        let g = two_adic();
        let chi = Character::odometer(4, 1).unwrap();
        let v = g.character_eval(&chi, &g.orbit_point(3)).unwrap();
        assert_eq!(v, Complex64::new(0.0, -1.0));
        let triv = g.trivial_character();
        assert_eq!(g.character_eval(&triv, &g.orbit_point(5)).unwrap(), Complex64::new(1.0, 0.0));
        let t = GroupSpec::golden_torus();
        let x = GroupPoint::Torus(TorusPoint { coords: vec![Angle::from_f64(0.25)] });
        let v = t.character_eval(&Character::torus(vec![1]), &x).unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-16);
    }

    #[test]
    fn characters_canonical() {
        assert_eq!(Character::odometer(8, 2).unwrap(), Character::odometer(4, 1).unwrap());
        assert_eq!(Character::odometer(4, -1).unwrap(), Character::odometer(4, 3).unwrap());
        assert!(Character::odometer(6, 6).unwrap().is_trivial());
        let a = Character::odometer(4, 1).unwrap();
        let b = Character::odometer(2, 1).unwrap();
        assert_eq!(a.mul(&b).unwrap(), Character::odometer(4, 3).unwrap());
        assert!(a.mul(&a.inv()).unwrap().is_trivial());
    }

    #[test]
    fn unresolvable_and_foreign() {
        let g = two_adic();
        let deep = Character::odometer(16, 1).unwrap();
        assert!(matches!(g.character_at_orbit(&deep, 1), Err(Error::UnresolvableCharacter(_))));
        let three = Character::odometer(3, 1).unwrap();
        assert!(matches!(g.character_at_orbit(&three, 1), Err(Error::ForeignCharacter(_))));
    }

    #[test]
    fn separating_characters() {
        let g = two_adic();
        assert_eq!(g.separating_character(2).unwrap(), Character::odometer(4, 1).unwrap());
        assert_eq!(g.separating_character(1).unwrap(), Character::odometer(2, 1).unwrap());
        let chi = g.separating_character(2).unwrap();
        assert_eq!(g.character_at_orbit(&chi, 2).unwrap(), Complex64::new(-1.0, 0.0));
        assert!(matches!(g.separating_character(8), Err(Error::PrefixExhausted { n: 8 })));
        let t = GroupSpec::golden_torus();
        assert_eq!(t.separating_character(5).unwrap(), Character::torus(vec![1]));
    }

    #[test]
    fn json_round_trip() {
        let g = GroupSpec::from_json(r#"{"kind":"odometer","primes":[[2,"inf"]],"scale":[2,4,8]}"#).unwrap();
        assert_eq!(g, two_adic());
        assert_eq!(GroupSpec::from_json(&g.to_json()).unwrap(), g);
        let t = GroupSpec::from_json(r#"{"kind":"torus","theta":["0.6180339887498949"]}"#).unwrap();
        assert!(t.warnings().is_empty());
        let bad = GroupSpec::from_json(r#"{"kind":"odometer","primes":[[3,"inf"]],"scale":[3,5]}"#)
            .unwrap_err()
            .to_string();
        assert!(bad.contains("s_m divides s_{m+1} violated"), "{bad}");
        let mb = GroupSpec::from_json(r#"{"kind":"odometer","primes":[[2,1],[3,1],[5,1]],"multibase":[2,3,5]}"#)
            .unwrap();
        assert_eq!(mb.scale().unwrap().terms(), &[2, 6, 30]);
        let def = GroupSpec::from_json(r#"{"kind":"odometer","primes":[[2,"inf"],[3,1]]}"#).unwrap();
        assert_eq!(&def.scale().unwrap().terms()[..3], &[6, 12, 24]);
    }

    #[test]
    fn near_rational_torus_warns() {
        let t = GroupSpec::from_json(r#"{"kind":"torus","theta":["0.25"]}"#).unwrap();
        assert_eq!(t.warnings().len(), 1);
    }

    #[test]
    fn scale_mismatch_warns() {
        let n = SupernaturalNumber::new([(2, Exponent::Infinite), (3, Exponent::Finite(1))]).unwrap();
        let g = GroupSpec::odometer(n, Scale::new(vec![2, 4]).unwrap()).unwrap();
        assert_eq!(g.warnings().len(), 2);
        let n = SupernaturalNumber::from_integer(8);
        assert!(GroupSpec::odometer(n, Scale::new(vec![2, 16]).unwrap()).is_err());
    }
}

//! Band symbols `{a_n(k)}` on the half line: the operator with kernel
//! `κ(r, c) = a_{r−c}(min(r, c))`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Space, TruncatedOperator};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BandSymbol {
    pub bands: BTreeMap<i64, Vec<Complex64>>,
}

impl BandSymbol {
    pub fn new(bands: BTreeMap<i64, Vec<Complex64>>) -> BandSymbol {
        BandSymbol { bands }
    }

    /// `a_n(k)`, zero past the stored range.
    pub fn get(&self, n: i64, k: usize) -> Complex64 {
        self.bands
            .get(&n)
            .and_then(|v| v.get(k))
            .copied()
            .unwrap_or_default()
    }

    pub fn to_operator(&self, l: usize) -> TruncatedOperator {
        let mut a = TruncatedOperator::zeros(Space::plus(l));
        for (&n, vals) in &self.bands {
            let span = n.unsigned_abs() as usize;
            if span >= l {
                continue;
            }
            for (k, v) in vals.iter().enumerate().take(l - span) {
                let (r, c) = if n >= 0 { (k + span, k) } else { (k, k + span) };
                a.m[[r, c]] = *v;
            }
        }
        a
    }

    /// Reads bands `−max_band..=max_band` back from a matrix.
    pub fn from_operator(a: &TruncatedOperator, max_band: usize) -> BandSymbol {
        let l = a.space.dim();
        let mut bands = BTreeMap::new();
        for n in -(max_band as i64)..=max_band as i64 {
            let span = n.unsigned_abs() as usize;
            if span >= l {
                continue;
            }
            let vals: Vec<Complex64> = (0..l - span)
                .map(|k| if n >= 0 { a.m[[k + span, k]] } else { a.m[[k, k + span]] })
                .collect();
            if vals.iter().any(|v| *v != Complex64::default()) {
                bands.insert(n, vals);
            }
        }
        BandSymbol { bands }
    }

    /// `Σ_n Σ_{k < L−|n|} |a_n(k)|²`.
    pub fn hs_sq_closed_form(&self, l: usize) -> f64 {
        self.bands
            .iter()
            .map(|(n, vals)| {
                let keep = l.saturating_sub(n.unsigned_abs() as usize);
                vals.iter().take(keep).map(|v| v.norm_sqr()).sum::<f64>()
            })
            .sum()
    }
}

/// Matrix-to-symbol conversion.
pub fn operator_to_symbol(a: &TruncatedOperator, max_band: usize) -> BandSymbol {
    BandSymbol::from_operator(a, max_band)
}

/// Symbol-to-matrix conversion.
pub fn symbol_to_operator(s: &BandSymbol, l: usize) -> TruncatedOperator {
    s.to_operator(l)
}

//! The four conserved quantities of `T_3` and their drift along orbits.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polygon::CornerInvariants;
use crate::scalar::{ExtReal, Scalar};

/// Value of one conserved quantity.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity<S = f64> {
    Value(S),
    /// A denominator factor vanished with a nonzero numerator.
    Infinite,
    /// A `0/0` factor, or an infinite corner invariant.
    Undefined,
}

impl<S: Scalar> Quantity<S> {
    pub fn value(&self) -> Option<&S> {
        match self {
            Quantity::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Quantity::Value(v) => v.to_f64_lossy(),
            Quantity::Infinite => f64::INFINITY,
            Quantity::Undefined => f64::NAN,
        }
    }
}

impl<S: Scalar> Serialize for Quantity<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        match self {
            Quantity::Value(v) => s.serialize_f64(v.to_f64_lossy()),
            Quantity::Infinite => s.serialize_str("inf"),
            Quantity::Undefined => s.serialize_str("undefined"),
        }
    }
}

/// `[F1, F2, F3, F4]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedQuantities<S = f64> {
    pub f: [Quantity<S>; 4],
}

impl<S: Scalar> ConservedQuantities<S> {
    pub fn to_f64(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.f[i].to_f64())
    }
}

fn product_of_ratios<S: Scalar>(pairs: Vec<(S, S)>) -> Quantity<S> {
    if pairs.iter().any(|(_, d)| d.is_zero()) {
        return if pairs.iter().any(|(n, _)| n.is_zero()) { Quantity::Undefined } else { Quantity::Infinite };
    }
    Quantity::Value(S::product(pairs.into_iter().map(|(n, d)| n / d)))
}

/// `F1 = Π x_e/(x_e-1)`, `F2 = Π x_o/(x_o-1)`, `F3 = Π x_e/x_o`, `F4 = Π (1-x_e)/(1-x_o)`
/// over even entries `x_e` and odd entries `x_o`.
pub fn f_invariants<S: Scalar>(x: &CornerInvariants<S>) -> ConservedQuantities<S> {
    let Ok(v) = x.finite_values() else {
        return ConservedQuantities { f: [Quantity::Undefined, Quantity::Undefined, Quantity::Undefined, Quantity::Undefined] };
    };
    let one = S::one;
    let ev: Vec<S> = v.iter().step_by(2).cloned().collect();
    let od: Vec<S> = v.iter().skip(1).step_by(2).cloned().collect();
    let f1 = product_of_ratios(ev.iter().map(|e| (e.clone(), e.clone() - one())).collect());
    let f2 = product_of_ratios(od.iter().map(|o| (o.clone(), o.clone() - one())).collect());
    let f3 = product_of_ratios(ev.iter().zip(&od).map(|(e, o)| (e.clone(), o.clone())).collect());
    let f4 = product_of_ratios(ev.iter().zip(&od).map(|(e, o)| (one() - e.clone(), one() - o.clone())).collect());
    ConservedQuantities { f: [f1, f2, f3, f4] }
}

/// Relative-drift floor guarding against division by a vanishing initial value.
pub const DRIFT_FLOOR: f64 = 1e-300;

/// Per-quantity `max_m |F(m) - F(0)| / max(|F(0)|, floor)`.
pub fn invariant_drift<S: Scalar>(quantities: &[ConservedQuantities<S>]) -> Result<[f64; 4]> {
    let mut drift = [0.0; 4];
    let Some(first) = quantities.first() else {
        return Ok(drift);
    };
    for (step, q) in quantities.iter().enumerate() {
        for i in 0..4 {
            let (Quantity::Value(a), Quantity::Value(b)) = (&first.f[i], &q.f[i]) else {
                let bad = if first.f[i].value().is_none() { 0 } else { step };
                return Err(Error::UndefinedQuantity { step: bad, quantity: i + 1 });
            };
            let d = (b.clone() - a.clone()).abs().to_f64_lossy() / a.abs().to_f64_lossy().max(DRIFT_FLOOR);
            drift[i] = f64::max(drift[i], d);
        }
    }
    Ok(drift)
}

/// True iff every `x_e/(x_e - 1)` exceeds 1 (the sign structure on even entries in `K`).
pub fn even_factors_exceed_one<S: Scalar>(x: &CornerInvariants<S>) -> bool {
    x.even().all(|e| match e {
        ExtReal::Finite(e) => {
            let d = e.clone() - S::one();
            !d.is_zero() && e.clone() / d > S::one()
        }
        ExtReal::Infinite => false,
    })
}

//! The southeast cone order on `(x, y)` pairs: `K = R^n_+ x R^n_-`.

use crate::dynamics::StateD;

/// Comparisons in the southeast order; `slack` loosens every inequality.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConeOrder;

impl ConeOrder {
    /// `a <=_K b`: `a.x <= b.x` and `a.y >= b.y` componentwise.
    pub fn le(a: &StateD, b: &StateD, slack: f64) -> bool {
        a.x.iter().zip(b.x.iter()).all(|(p, q)| p <= &(q + slack))
            && a.y.iter().zip(b.y.iter()).all(|(p, q)| p + slack >= *q)
    }

    /// `a <_K b`: `a <=_K b` and `a != b`.
    pub fn lt(a: &StateD, b: &StateD, slack: f64) -> bool {
        Self::le(a, b, slack) && a != b
    }

    /// `a <<_K b`: `a.x < b.x` and `a.y > b.y` in every component.
    pub fn ll(a: &StateD, b: &StateD) -> bool {
        a.x.iter().zip(b.x.iter()).all(|(p, q)| p < q) && a.y.iter().zip(b.y.iter()).all(|(p, q)| p > q)
    }

    /// Largest violation of `a <=_K b`; zero or negative when ordered.
    pub fn gap(a: &StateD, b: &StateD) -> f64 {
        let gx = a.x.iter().zip(b.x.iter()).map(|(p, q)| p - q);
        let gy = a.y.iter().zip(b.y.iter()).map(|(p, q)| q - p);
        gx.chain(gy).fold(f64::NEG_INFINITY, f64::max)
    }
}

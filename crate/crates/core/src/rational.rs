//! Exact scalars, extended distances and squared norms.

use core::cmp::Ordering;
use core::fmt;

use num_integer::Roots;
use num_traits::{Signed, Zero};

pub type Rational = num_rational::Ratio<i128>;

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn frac(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

/// A distance in `[0, +∞]`. `Finite` sorts before `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dist {
    Finite(Rational),
    Infinite,
}

impl Dist {
    pub const ZERO: Dist = Dist::Finite(Rational::new_raw(0, 1));

    pub fn finite(value: Rational) -> Self {
        Dist::Finite(value)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Dist::Infinite)
    }

    pub fn as_finite(&self) -> Option<Rational> {
        match self {
            Dist::Finite(v) => Some(*v),
            Dist::Infinite => None,
        }
    }

    /// `self >= threshold` for a finite threshold.
    pub fn at_least(&self, threshold: Rational) -> bool {
        match self {
            Dist::Finite(v) => *v >= threshold,
            Dist::Infinite => true,
        }
    }
}

impl From<Rational> for Dist {
    fn from(value: Rational) -> Self {
        Dist::Finite(value)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
            Dist::Infinite => f.write_str("inf"),
        }
    }
}

/// Exact square root of a non-negative rational, when it is rational.
pub fn sqrt_exact(value: Rational) -> Option<Rational> {
    if value.is_negative() {
        return None;
    }
    let n = *value.numer();
    let d = *value.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    (rn * rn == n && rd * rd == d).then(|| Rational::new(rn, rd))
}

/// A squared norm. ℓ² norms of finitely supported rational vectors are
/// generally irrational, so every comparison is carried out on squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NormSq(pub Rational);

impl NormSq {
    pub const ZERO: NormSq = NormSq(Rational::new_raw(0, 1));

    pub fn of_scalar(x: Rational) -> Self {
        NormSq(x * x)
    }

    pub fn value(&self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The norm itself when it is rational (always the case for scalars).
    pub fn sqrt(&self) -> Option<Rational> {
        sqrt_exact(self.0)
    }

    pub fn max(self, other: NormSq) -> NormSq {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Decides `sqrt(obs) <= c1*sqrt(a1) + c2*sqrt(a2)` exactly, for
/// non-negative coefficients.
pub fn root_le_sum(obs: NormSq, c1: Rational, a1: NormSq, c2: Rational, a2: NormSq) -> bool {
    debug_assert!(!c1.is_negative() && !c2.is_negative());
    // Square once: obs <= c1²a1 + c2²a2 + 2 c1 c2 sqrt(a1 a2).
    let rest = obs.0 - c1 * c1 * a1.0 - c2 * c2 * a2.0;
    if !rest.is_positive() {
        return true;
    }
    let cross = int(2) * c1 * c2;
    match (rest * rest).cmp(&(cross * cross * a1.0 * a2.0)) {
        Ordering::Greater => false,
        _ => true,
    }
}

/// Decides `sqrt(obs) <= c * sqrt(a)`.
pub fn root_le_scaled(obs: NormSq, c: Rational, a: NormSq) -> bool {
    obs.0 <= c * c * a.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_order_places_infinity_last() {
        assert!(Dist::Finite(int(1_000_000)) < Dist::Infinite);
        assert!(Dist::ZERO < Dist::Finite(frac(1, 4)));
        assert!(Dist::Infinite.at_least(int(7)));
        assert!(!Dist::Finite(int(1)).at_least(int(2)));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(sqrt_exact(frac(9, 4)), Some(frac(3, 2)));
        assert_eq!(sqrt_exact(int(2)), None);
        assert_eq!(NormSq::of_scalar(frac(-5, 3)).sqrt(), Some(frac(5, 3)));
    }

    #[test]
    fn sum_of_roots_comparison() {
        // sqrt(8) = 2 sqrt(2) <= 1*sqrt(2) + 1*sqrt(2)
        assert!(root_le_sum(NormSq(int(8)), int(1), NormSq(int(2)), int(1), NormSq(int(2))));
        assert!(!root_le_sum(NormSq(frac(801, 100)), int(1), NormSq(int(2)), int(1), NormSq(int(2))));
        // 3 <= 1 + 2
        assert!(root_le_sum(NormSq(int(9)), int(1), NormSq(int(1)), int(2), NormSq(int(1))));
        assert!(!root_le_sum(NormSq(int(10)), int(1), NormSq(int(1)), int(2), NormSq(int(1))));
        assert!(root_le_scaled(NormSq(int(36)), int(3), NormSq(int(4))));
        assert!(!root_le_scaled(NormSq(int(37)), int(3), NormSq(int(4))));
    }
}

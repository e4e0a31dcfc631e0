//! Exact coordinates.
//!
//! All fold coordinates are rationals over `i128`. Folds and clasps only
//! ever add, subtract and double, so denominators never grow past the
//! inputs' common denominator. Plane geometry runs in binary64 and is
//! brought back onto the fixed dyadic grid [`GRID_BITS`] before it touches
//! a fold, which keeps deep chains on a single denominator.
//!
//! [`Q`] wraps `Ratio<i128>` with fast paths for that common case: equal
//! or power-of-two denominators compare and add without any gcd work.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational coordinate, always in lowest terms with positive denominator.
#[derive(Clone, Copy, Default)]
pub struct Q(Ratio<i128>);

impl Q {
    pub fn new(num: i128, den: i128) -> Q {
        if is_pow2(den) {
            Q::dyadic(num, den)
        } else {
            Q(Ratio::new(num, den))
        }
    }

    pub fn from_integer(n: i128) -> Q {
        Q(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> &i128 {
        self.0.numer()
    }

    pub fn denom(&self) -> &i128 {
        self.0.denom()
    }

    pub fn floor(&self) -> Q {
        Q(self.0.floor())
    }

    pub fn ceil(&self) -> Q {
        Q(self.0.ceil())
    }

    pub fn round(&self) -> Q {
        Q(self.0.round())
    }

    pub fn to_integer(&self) -> i128 {
        self.0.to_integer()
    }

    pub fn abs(&self) -> Q {
        Q(self.0.abs())
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.0.to_f64()
    }

    /// Reduced `n / 2^k` for a power-of-two `d = 2^k`.
    fn dyadic(n: i128, d: i128) -> Q {
        if n == 0 {
            return Q::zero();
        }
        let shift = n.trailing_zeros().min(d.trailing_zeros());
        Q(Ratio::new_raw(n >> shift, d >> shift))
    }

    /// `self + sign * rhs` without gcd work when both denominators are powers of two.
    fn add_signed(self, rhs: Q, negate: bool) -> Q {
        let (na, da) = (*self.numer(), *self.denom());
        let (nb, db) = (*rhs.numer(), *rhs.denom());
        let nb = if negate { nb.checked_neg() } else { Some(nb) };
        if let Some(nb) = nb {
            if is_pow2(da) && is_pow2(db) {
                let sum = if da == db {
                    na.checked_add(nb).map(|n| Q::dyadic(n, da))
                } else if da > db {
                    // odd numerator over the larger denominator stays odd
                    nb.checked_mul(da / db).and_then(|nb| na.checked_add(nb)).map(|n| Q(Ratio::new_raw(n, da)))
                } else {
                    na.checked_mul(db / da).and_then(|na| na.checked_add(nb)).map(|n| Q(Ratio::new_raw(n, db)))
                };
                if let Some(out) = sum {
                    return out;
                }
            }
        }
        if negate {
            Q(self.0 - rhs.0)
        } else {
            Q(self.0 + rhs.0)
        }
    }
}

fn is_pow2(d: i128) -> bool {
    d > 0 && d & (d - 1) == 0
}

impl PartialEq for Q {
    fn eq(&self, other: &Q) -> bool {
        // lowest terms make the representation canonical
        self.numer() == other.numer() && self.denom() == other.denom()
    }
}

impl Eq for Q {}

impl std::hash::Hash for Q {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.numer().hash(state);
        self.denom().hash(state);
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        let (na, da) = (*self.numer(), *self.denom());
        let (nb, db) = (*other.numer(), *other.denom());
        if da == db {
            return na.cmp(&nb);
        }
        match (na.checked_mul(db), nb.checked_mul(da)) {
            (Some(x), Some(y)) => x.cmp(&y),
            _ => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_exact(self))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_exact(self))
    }
}

impl Zero for Q {
    fn zero() -> Q {
        Q(Ratio::zero())
    }

    fn is_zero(&self) -> bool {
        self.numer().is_zero()
    }
}

impl One for Q {
    fn one() -> Q {
        Q(Ratio::one())
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait<Q> for Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $trait<&Q> for Q {
            type Output = Q;
            fn $method(self, rhs: &Q) -> Q {
                let ($a, $b) = (self, *rhs);
                $body
            }
        }
        impl $trait<Q> for &Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                let ($a, $b) = (*self, rhs);
                $body
            }
        }
        impl $trait<&Q> for &Q {
            type Output = Q;
            fn $method(self, rhs: &Q) -> Q {
                let ($a, $b) = (*self, *rhs);
                $body
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_signed(b, false));
binop!(Sub, sub, |a, b| a.add_signed(b, true));
binop!(Mul, mul, |a, b| Q(a.0 * b.0));
binop!(Div, div, |a, b| Q(a.0 / b.0));

impl AddAssign for Q {
    fn add_assign(&mut self, rhs: Q) {
        *self = *self + rhs;
    }
}

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        *self = *self + rhs;
    }
}

impl SubAssign for Q {
    fn sub_assign(&mut self, rhs: Q) {
        *self = *self - rhs;
    }
}

impl std::iter::Sum for Q {
    fn sum<I: Iterator<Item = Q>>(iter: I) -> Q {
        iter.fold(Q::zero(), |acc, x| acc + x)
    }
}

/// Plane-derived coordinates are snapped to multiples of `2^-GRID_BITS`.
/// Values with magnitude below 8 on this grid are exact binary64 numbers.
pub const GRID_BITS: u32 = 50;

#[inline]
pub fn q(num: i128, den: i128) -> Q {
    Q::new(num, den)
}

#[inline]
pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

/// Nearest grid point to a finite float.
pub fn snap(x: f64) -> Q {
    assert!(x.is_finite(), "cannot snap non-finite value {x}");
    let scaled = (x * (1u64 << GRID_BITS) as f64).round();
    Q::new(scaled as i128, 1i128 << GRID_BITS)
}

/// Largest grid point not exceeding `x`.
pub fn snap_floor(x: &Q) -> Q {
    let den = 1i128 << GRID_BITS;
    let scaled = x * qi(den);
    Q::new(scaled.floor().to_integer(), den)
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // i128 pairs that overflow the fast path
        *x.numer() as f64 / *x.denom() as f64
    })
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn half() -> Q {
    q(1, 2)
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}

/// `p/q` when the denominator is not 1, integer otherwise.
pub fn fmt_exact(x: &Q) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Shortest round-trip decimal of the nearest binary64.
pub fn fmt_decimal(x: &Q) -> String {
    format!("{:?}", to_f64(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_is_exact_in_f64() {
        let x = 0.123_456_789_012_345_f64;
        let s = snap(x);
        assert_eq!(to_f64(&s), (x * 2f64.powi(50)).round() / 2f64.powi(50));
        assert!((to_f64(&s) - x).abs() <= 2f64.powi(-51));
    }

    #[test]
    fn snap_floor_bounds() {
        let third = q(1, 3);
        let f = snap_floor(&third);
        assert!(f <= third);
        assert!(third - f < q(1, 1 << GRID_BITS));
    }

    #[test]
    fn exact_formatting() {
        assert_eq!(fmt_exact(&q(-1, 3)), "-1/3");
        assert_eq!(fmt_exact(&qi(2)), "2");
        assert_eq!(fmt_decimal(&q(1, 4)), "0.25");
    }
}

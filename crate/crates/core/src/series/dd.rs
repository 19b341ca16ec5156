//! Double-double arithmetic (an unevaluated sum `hi + lo` of two `f64`s,
//! ~106 bits of significand). Only the handful of operations the Bell
//! closed form needs are provided.

use std::ops::{Add, Mul};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub(crate) const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub(crate) const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub(crate) fn from_f64(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub(crate) fn scale(self, b: f64) -> Self {
        let (p, mut e) = two_prod(self.hi, b);
        e = self.lo.mul_add(b, e);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub(crate) fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, mut e) = two_sum(self.hi, -p1);
        e -= p2;
        e += self.lo;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captures_bits_below_f64_resolution() {
        let tiny = DoubleDouble::from_f64(1e-20);
        let x = DoubleDouble::ONE + tiny;
        assert_eq!(x.to_f64(), 1.0);
        let back = x + DoubleDouble::from_f64(-1.0);
        assert_eq!(back.to_f64(), 1e-20);
    }

    #[test]
    fn division_is_accurate() {
        let third = DoubleDouble::ONE.div_f64(3.0);
        let residual = third.scale(3.0) + DoubleDouble::from_f64(-1.0);
        assert!(residual.to_f64().abs() < 1e-31);
    }

    #[test]
    fn product_is_accurate() {
        let a = DoubleDouble::ONE.div_f64(7.0);
        let b = DoubleDouble::from_f64(7.0);
        let r = a * b + DoubleDouble::from_f64(-1.0);
        assert!(r.to_f64().abs() < 1e-31);
    }
}

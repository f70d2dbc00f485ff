//! Closed intervals with outward rounding.
//!
//! Rounding direction is emulated: each operation is performed in round to
//! nearest, the exact rounding error is recovered with an error-free
//! transform, and the result is nudged one ulp outward only when the error
//! points that way. Exact results therefore stay exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

// below this magnitude fma residuals may be inexact, so we widen blindly
const TINY: f64 = 1e-290;

fn down(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::MAX
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        -f64::MAX
    } else {
        x.next_up()
    }
}

/// `a + b` as `(sum, sign of the rounding error)`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    if !s.is_finite() {
        return (s, 0.0);
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

pub fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if s == f64::INFINITY && a.is_finite() && b.is_finite() {
        return f64::MAX;
    }
    if e < 0.0 {
        down(s)
    } else {
        s
    }
}

pub fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if s == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
        return -f64::MAX;
    }
    if e > 0.0 {
        up(s)
    } else {
        s
    }
}

fn mul_err(a: f64, b: f64) -> (f64, Option<f64>) {
    let p = a * b;
    if a == 0.0 || b == 0.0 {
        return (0.0, Some(0.0));
    }
    if !p.is_finite() || p.abs() < TINY {
        return (p, None);
    }
    (p, Some(a.mul_add(b, -p)))
}

pub fn mul_down(a: f64, b: f64) -> f64 {
    match mul_err(a, b) {
        (p, Some(e)) if e >= 0.0 => p,
        (p, _) => down(p),
    }
}

pub fn mul_up(a: f64, b: f64) -> f64 {
    match mul_err(a, b) {
        (p, Some(e)) if e <= 0.0 => p,
        (p, _) => up(p),
    }
}

/// Sign of `a/b − fl(a/b)`, or `None` when it cannot be trusted.
fn div_err(a: f64, b: f64) -> (f64, Option<f64>) {
    let q = a / b;
    if a == 0.0 {
        return (0.0, Some(0.0));
    }
    if !q.is_finite() || q.abs() < TINY || b.abs() < TINY {
        return (q, None);
    }
    let r = (-q).mul_add(b, a);
    (q, Some(if r == 0.0 { 0.0 } else { r.signum() * b.signum() }))
}

pub fn div_down(a: f64, b: f64) -> f64 {
    match div_err(a, b) {
        (q, Some(e)) if e >= 0.0 => q,
        (q, _) => down(q),
    }
}

pub fn div_up(a: f64, b: f64) -> f64 {
    match div_err(a, b) {
        (q, Some(e)) if e <= 0.0 => q,
        (q, _) => up(q),
    }
}

fn sqrt_err(x: f64) -> (f64, f64) {
    let s = x.sqrt();
    if x == 0.0 || !s.is_finite() {
        return (s, 0.0);
    }
    (s, (-s).mul_add(s, x))
}

pub fn sqrt_down(x: f64) -> f64 {
    let (s, r) = sqrt_err(x.max(0.0));
    if r < 0.0 {
        down(s).max(0.0)
    } else {
        s
    }
}

pub fn sqrt_up(x: f64) -> f64 {
    let (s, r) = sqrt_err(x.max(0.0));
    if r > 0.0 {
        up(s)
    } else {
        s
    }
}

impl Interval {
    /// Panics when `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "bad interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    /// Tightest enclosure of `num / den`.
    pub fn ratio(num: f64, den: f64) -> Self {
        Interval::new(div_down(num, den), div_up(num, den))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid(&self) -> f64 {
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn min(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    pub fn max(self, other: Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval::new(0.0, (-self.lo).max(self.hi))
        }
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval::new(mul_down(a.lo, a.lo), mul_up(a.hi, a.hi))
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(self) -> Interval {
        Interval::new(sqrt_down(self.lo), sqrt_up(self.hi.max(0.0)))
    }

    /// Division by an interval not containing zero.
    pub fn div(self, other: Interval) -> Interval {
        assert!(!other.contains(0.0), "division by an interval containing zero");
        let cands = [(self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi)];
        let lo = cands.iter().map(|&(a, b)| div_down(a, b)).fold(f64::INFINITY, f64::min);
        let hi = cands.iter().map(|&(a, b)| div_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new(add_down(self.lo, o.lo), add_up(self.hi, o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        self + (-o)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let cands = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let lo = cands.iter().map(|&(a, b)| mul_down(a, b)).fold(f64::INFINITY, f64::min);
        let hi = cands.iter().map(|&(a, b)| mul_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_operations_stay_exact() {
        let a = Interval::point(0.5);
        assert_eq!(a + Interval::point(0.25), Interval::point(0.75));
        assert_eq!(a * Interval::point(4.0), Interval::point(2.0));
        assert_eq!(Interval::point(9.0).sqrt(), Interval::point(3.0));
        assert_eq!(Interval::ratio(1.0, 4.0), Interval::point(0.25));
        assert_eq!(a - a, Interval::point(0.0));
    }

    #[test]
    fn inexact_operations_widen() {
        let third = Interval::ratio(1.0, 3.0);
        assert!(third.lo < third.hi);
        let s = Interval::point(0.1) + Interval::point(0.2);
        assert!(s.lo < s.hi);
        assert!(s.contains(0.1 + 0.2));
        let r = Interval::point(2.0).sqrt();
        assert!(r.lo * r.lo <= 2.0 && r.hi * r.hi >= 2.0);
    }

    #[test]
    fn abs_and_sqr_of_straddling_interval() {
        let x = Interval::new(-2.0, 1.0);
        assert_eq!(x.abs(), Interval::new(0.0, 2.0));
        assert_eq!(x.sqr(), Interval::new(0.0, 4.0));
        assert_eq!(x * x, Interval::new(-2.0, 4.0));
    }

    fn exact_sum_sign(a: f64, b: f64, s: f64) -> std::cmp::Ordering {
        // compare a + b with s in extended precision via two_sum on the residual
        let (t, e) = two_sum(a, b);
        let (d, e2) = two_sum(t, -s);
        (d + (e + e2)).partial_cmp(&0.0).unwrap()
    }

    proptest! {
        #[test]
        fn add_bounds_enclose(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let lo = add_down(a, b);
            let hi = add_up(a, b);
            prop_assert!(exact_sum_sign(a, b, lo) != std::cmp::Ordering::Less);
            prop_assert!(exact_sum_sign(a, b, hi) != std::cmp::Ordering::Greater);
            prop_assert!(hi.next_down() <= lo || hi == lo);
        }

        #[test]
        fn mul_bounds_enclose(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let lo = mul_down(a, b);
            let hi = mul_up(a, b);
            prop_assert!(a.mul_add(b, -lo) >= 0.0);
            prop_assert!(a.mul_add(b, -hi) <= 0.0);
        }

        #[test]
        fn interval_ops_contain_point_results(
            x in -10.0f64..10.0, y in -10.0f64..10.0, w in 0.0f64..1.0, v in 0.0f64..1.0
        ) {
            let a = Interval::new(x, x + w);
            let b = Interval::new(y, y + v);
            let (px, py) = (x + w / 2.0, y + v / 2.0);
            // round to nearest is monotone, so rounded point results stay inside
            prop_assert!((a * b).contains(px * py));
            prop_assert!((a + b).contains(px + py));
            prop_assert!(a.abs().contains(px.abs()));
            prop_assert!(a.min(b).contains(px.min(py)));
        }
    }
}

//! Closed rational intervals. Exact values are degenerate intervals, so
//! shapes with irrational parameters and shapes with rational ones share
//! one representation, and every comparison is either certified or `None`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::numeric::{fmt_ratio, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Self { lo, hi }
    }

    pub fn exact(v: Q) -> Self {
        Self {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero() -> Self {
        Self::exact(Q::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact_value(&self) -> Option<&Q> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self.clone()
        } else {
            let m = if -&self.lo > self.hi {
                -&self.lo
            } else {
                self.hi.clone()
            };
            Interval::new(Q::zero(), m)
        }
    }

    pub fn scale(&self, k: &Q) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn contains_value(&self, v: &Q) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// Certified ordering: `Some` only when every pair of members compares the
    /// same way (`Equal` only for two identical exact values).
    pub fn cmp_certified(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// `Some(true)` if certainly `<`, `Some(false)` if certainly `>=`.
    pub fn lt(&self, other: &Interval) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }

    /// `Some(true)` if certainly `<=`, `Some(false)` if certainly `>`.
    pub fn le(&self, other: &Interval) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn gt(&self, other: &Interval) -> Option<bool> {
        other.lt(self)
    }

    pub fn ge(&self, other: &Interval) -> Option<bool> {
        other.le(self)
    }
}

impl From<Q> for Interval {
    fn from(v: Q) -> Self {
        Interval::exact(v)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", fmt_ratio(&self.lo))
        } else {
            write!(f, "[{}, {}]", fmt_ratio(&self.lo), fmt_ratio(&self.hi))
        }
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let c = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = c.iter().min().expect("four products").clone();
        let hi = c.iter().max().expect("four products").clone();
        Interval::new(lo, hi)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

//! Shapes and strict (open-set) membership.
//!
//! Every parameter is an [`Interval`]; membership is three-valued and only
//! answers when the answer holds for every value in the brackets.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numeric::{fmt_ratio, to_f64, Q};

/// Relative tolerance for `ρ`-norm comparisons with non-integer `ρ`.
pub const FLOAT_NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    Max,
    /// `ρ`-norm, `ρ > 0` rational.
    P(Q),
}

impl Norm {
    pub fn p(rho: Q) -> Result<Self> {
        if !rho.is_positive() {
            return Err(Error::InvalidParameter(format!("norm exponent {rho} must be positive")));
        }
        Ok(Norm::P(rho))
    }

    pub fn l1() -> Self {
        Norm::P(Q::one())
    }

    pub fn l2() -> Self {
        Norm::P(Q::from_integer(2.into()))
    }

    /// Integer exponent, if this is a `ρ`-norm with integer `ρ`.
    pub fn integer_exponent(&self) -> Option<u32> {
        match self {
            Norm::P(r) if r.is_integer() => r.to_integer().to_u32(),
            _ => None,
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Max => f.write_str("inf"),
            Norm::P(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Norm::P(r) => f.write_str(&fmt_ratio(r)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Open ball in the given norm.
    Ball { center: Vec<Interval>, radius: Interval, norm: Norm },
    /// Open axis-parallel box with half-widths `radii`.
    Rect { center: Vec<Interval>, radii: Vec<Interval> },
    /// Max-norm annulus `r_in < ‖x-c‖ < r_out`.
    Annulus { center: Vec<Interval>, r_out: Interval, r_in: Interval },
    /// Open outer box minus the closed inner box.
    RectAnnulus { center: Vec<Interval>, outer: Vec<Interval>, inner: Vec<Interval> },
    /// `‖x-c‖_∞ < r` and `‖x-c‖_ρ > r`.
    QuasiAnnulus { center: Vec<Interval>, r: Interval, inner_norm: Norm },
}

fn certainly_positive(v: &Interval) -> bool {
    v.lo.is_positive()
}

fn certainly_nonneg(v: &Interval) -> bool {
    !v.lo.is_negative()
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

impl Shape {
    pub fn ball(center: Vec<Interval>, radius: Interval, norm: Norm) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidParameter("empty center".into()));
        }
        if !certainly_positive(&radius) {
            return Err(Error::InvalidParameter(format!("ball radius {radius} must be positive")));
        }
        Ok(Shape::Ball { center, radius, norm })
    }

    pub fn rect(center: Vec<Interval>, radii: Vec<Interval>) -> Result<Self> {
        check_len(center.len(), radii.len())?;
        if center.is_empty() {
            return Err(Error::InvalidParameter("empty center".into()));
        }
        if let Some(r) = radii.iter().find(|r| !certainly_nonneg(r)) {
            return Err(Error::InvalidParameter(format!("rect radius {r} is negative")));
        }
        Ok(Shape::Rect { center, radii })
    }

    pub fn annulus(center: Vec<Interval>, r_out: Interval, r_in: Interval) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidParameter("empty center".into()));
        }
        if !certainly_positive(&r_out) || !certainly_nonneg(&r_in) || r_in.hi >= r_out.lo {
            return Err(Error::InvalidParameter(format!(
                "annulus needs 0 <= r_in < r_out, got r_in={r_in}, r_out={r_out}"
            )));
        }
        Ok(Shape::Annulus { center, r_out, r_in })
    }

    pub fn rect_annulus(center: Vec<Interval>, outer: Vec<Interval>, inner: Vec<Interval>) -> Result<Self> {
        check_len(center.len(), outer.len())?;
        check_len(center.len(), inner.len())?;
        if center.is_empty() {
            return Err(Error::InvalidParameter("empty center".into()));
        }
        for (o, i) in outer.iter().zip(&inner) {
            if !certainly_positive(o) || !certainly_nonneg(i) || i.hi >= o.lo {
                return Err(Error::InvalidParameter(format!(
                    "rectangular annulus needs 0 <= inner < outer, got inner={i}, outer={o}"
                )));
            }
        }
        Ok(Shape::RectAnnulus { center, outer, inner })
    }

    pub fn quasi_annulus(center: Vec<Interval>, r: Interval, inner_norm: Norm) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidParameter("empty center".into()));
        }
        if inner_norm == Norm::Max {
            return Err(Error::InvalidParameter("quasi-annulus inner norm must be finite".into()));
        }
        if !certainly_positive(&r) {
            return Err(Error::InvalidParameter(format!("radius {r} must be positive")));
        }
        Ok(Shape::QuasiAnnulus { center, r, inner_norm })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Ball { .. } => "ball",
            Shape::Rect { .. } => "rect",
            Shape::Annulus { .. } => "annulus",
            Shape::RectAnnulus { .. } => "rect_annulus",
            Shape::QuasiAnnulus { .. } => "quasi_annulus",
        }
    }

    pub fn center(&self) -> &[Interval] {
        match self {
            Shape::Ball { center, .. }
            | Shape::Rect { center, .. }
            | Shape::Annulus { center, .. }
            | Shape::RectAnnulus { center, .. }
            | Shape::QuasiAnnulus { center, .. } => center,
        }
    }

    pub fn dim(&self) -> usize {
        self.center().len()
    }

    /// Per-coordinate half-widths of the axis-parallel bounding box.
    pub fn half_extent(&self) -> Vec<Interval> {
        let n = self.dim();
        match self {
            Shape::Ball { radius, .. } => vec![radius.clone(); n],
            Shape::Rect { radii, .. } => radii.clone(),
            Shape::Annulus { r_out, .. } => vec![r_out.clone(); n],
            Shape::RectAnnulus { outer, .. } => outer.clone(),
            Shape::QuasiAnnulus { r, .. } => vec![r.clone(); n],
        }
    }

    /// Whether the bounding box may stick out of `[0,1]^n`.
    pub fn may_exit_unit_cube(&self) -> bool {
        self.center().iter().zip(self.half_extent()).any(|(c, h)| {
            let lo = c - &h;
            let hi = c + &h;
            lo.lo.is_negative() || hi.hi > Q::one()
        })
    }

    /// Three-valued strict membership: `None` when the brackets are too wide
    /// to decide.
    pub fn membership(&self, x: &[Q]) -> Result<Option<bool>> {
        check_len(self.dim(), x.len())?;
        let d: Vec<Interval> = self
            .center()
            .iter()
            .zip(x)
            .map(|(c, xi)| (&Interval::exact(xi.clone()) - c).abs())
            .collect();
        Ok(match self {
            Shape::Ball { radius, norm, .. } => norm_lt(&d, norm, radius),
            Shape::Rect { radii, .. } => all(d.iter().zip(radii).map(|(di, r)| di.lt(r))),
            Shape::Annulus { r_out, r_in, .. } => and(
                all(d.iter().map(|di| di.lt(r_out))),
                any(d.iter().map(|di| di.gt(r_in))),
            ),
            Shape::RectAnnulus { outer, inner, .. } => and(
                all(d.iter().zip(outer).map(|(di, r)| di.lt(r))),
                any(d.iter().zip(inner).map(|(di, r)| di.gt(r))),
            ),
            Shape::QuasiAnnulus { r, inner_norm, .. } => and(
                all(d.iter().map(|di| di.lt(r))),
                norm_gt(&d, inner_norm, r),
            ),
        })
    }

    /// Strict membership; an undecidable bracket is an error.
    pub fn contains(&self, x: &[Q]) -> Result<bool> {
        self.membership(x)?
            .ok_or_else(|| Error::Indeterminate(format!("{} membership of {:?}", self.kind(), x.iter().map(fmt_ratio).collect::<Vec<_>>())))
    }
}

pub(crate) fn and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

pub(crate) fn all(it: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    it.fold(Some(true), and)
}

pub(crate) fn any(it: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    let mut unknown = false;
    for v in it {
        match v {
            Some(true) => return Some(true),
            None => unknown = true,
            Some(false) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

fn pow_nonneg(v: &Interval, k: u32) -> Interval {
    Interval::new(num_traits::pow(v.lo.clone(), k as usize), num_traits::pow(v.hi.clone(), k as usize))
}

/// `Σ d_i^ρ` vs `r^ρ`, exact for integer `ρ`; float with tolerance otherwise.
fn norm_cmp(d: &[Interval], norm: &Norm, r: &Interval) -> Option<std::cmp::Ordering> {
    use std::cmp::Ordering;
    match norm {
        Norm::Max => {
            let m = d.iter().fold(Interval::zero(), |acc, di| {
                Interval::new(acc.lo.max(di.lo.clone()), acc.hi.max(di.hi.clone()))
            });
            m.cmp_certified(r)
        }
        _ => {
            if let Some(k) = norm.integer_exponent() {
                let s = d.iter().fold(Interval::zero(), |acc, di| &acc + &pow_nonneg(di, k));
                s.cmp_certified(&pow_nonneg(r, k))
            } else {
                let Norm::P(rho) = norm else { unreachable!() };
                let rho = to_f64(rho);
                // bracket widths sit far below the float tolerance
                let s: f64 = d.iter().map(|di| to_f64(&di.midpoint()).powf(rho)).sum();
                let rr = to_f64(&r.midpoint()).powf(rho);
                let diff = s - rr;
                if diff.abs() <= FLOAT_NORM_TOL * rr.max(1.0) {
                    None
                } else if diff < 0.0 {
                    Some(Ordering::Less)
                } else {
                    Some(Ordering::Greater)
                }
            }
        }
    }
}

fn norm_lt(d: &[Interval], norm: &Norm, r: &Interval) -> Option<bool> {
    if *norm == Norm::Max {
        return all(d.iter().map(|di| di.lt(r)));
    }
    norm_cmp(d, norm, r).map(|o| o == std::cmp::Ordering::Less)
}

fn norm_gt(d: &[Interval], norm: &Norm, r: &Interval) -> Option<bool> {
    if *norm == Norm::Max {
        return any(d.iter().map(|di| di.gt(r)));
    }
    norm_cmp(d, norm, r).map(|o| o == std::cmp::Ordering::Greater)
}

/// Convenience: an exact-parameter point vector.
pub fn exact_vec(v: &[Q]) -> Vec<Interval> {
    v.iter().cloned().map(Interval::exact).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q, qi};

    fn ex(v: Q) -> Interval {
        Interval::exact(v)
    }

    fn origin(n: usize) -> Vec<Interval> {
        vec![Interval::zero(); n]
    }

    #[test]
    fn annulus_membership() {
        let a = Shape::annulus(origin(2), ex(qi(1)), ex(q(1, 2))).unwrap();
        assert!(a.contains(&[q(3, 4), qi(0)]).unwrap());
        assert!(!a.contains(&[qi(0), qi(0)]).unwrap());
        // both boundaries excluded
        assert!(!a.contains(&[q(1, 2), qi(0)]).unwrap());
        assert!(!a.contains(&[qi(1), qi(0)]).unwrap());
        assert!(!a.contains(&[q(3, 4), q(-1, 1)]).unwrap());
    }

    #[test]
    fn quasi_annulus_membership() {
        let s = Shape::quasi_annulus(origin(2), ex(qi(1)), Norm::l2()).unwrap();
        assert!(s.contains(&[q(9, 10), q(9, 10)]).unwrap());
        assert!(!s.contains(&[q(1, 2), q(1, 2)]).unwrap());
        // on the circle: ‖x‖_2 = 1 exactly, not strictly outside
        assert!(!s.contains(&[q(3, 5), q(4, 5)]).unwrap());
        let s = Shape::quasi_annulus(origin(2), ex(qi(1)), Norm::l1()).unwrap();
        assert!(s.contains(&[q(3, 5), q(1, 2)]).unwrap());
        assert!(Shape::quasi_annulus(origin(2), ex(qi(1)), Norm::Max).is_err());
    }

    #[test]
    fn non_integer_norm_uses_tolerance() {
        let s = Shape::ball(origin(2), ex(qi(1)), Norm::p(q(3, 2)).unwrap()).unwrap();
        assert!(s.contains(&[q(1, 2), q(1, 2)]).unwrap());
        assert!(!s.contains(&[q(9, 10), q(9, 10)]).unwrap());
        assert!(s.contains(&[qi(1), qi(0)]).is_err());
    }

    #[test]
    fn rect_annulus_membership() {
        let s = Shape::rect_annulus(origin(2), vec![ex(q(1, 2)); 2], vec![ex(q(3, 8)); 2]).unwrap();
        assert!(s.contains(&[q(7, 16), qi(0)]).unwrap());
        assert!(!s.contains(&[q(1, 4), q(1, 4)]).unwrap());
        assert!(!s.contains(&[q(3, 8), qi(0)]).unwrap());
        assert!(!s.contains(&[q(1, 2), qi(0)]).unwrap());
    }

    #[test]
    fn errors() {
        let s = Shape::ball(origin(2), ex(qi(1)), Norm::Max).unwrap();
        assert!(matches!(s.contains(&[qi(0)]), Err(Error::DimensionMismatch { .. })));
        assert!(Shape::ball(origin(2), ex(qi(0)), Norm::Max).is_err());
        assert!(Shape::annulus(origin(1), ex(q(1, 2)), ex(q(1, 2))).is_err());
        assert!(Shape::rect_annulus(origin(1), vec![ex(qi(1))], vec![ex(qi(2))]).is_err());
        assert!(Shape::rect(origin(1), vec![ex(qi(-1))]).is_err());
        assert!(Shape::rect(origin(1), vec![ex(qi(0))]).is_ok());
    }

    #[test]
    fn bracketed_parameters_are_conservative() {
        // radius known only to lie in [1/2, 3/4]
        let r = Interval::new(q(1, 2), q(3, 4));
        let s = Shape::ball(origin(1), r, Norm::Max).unwrap();
        assert_eq!(s.membership(&[q(1, 4)]).unwrap(), Some(true));
        assert_eq!(s.membership(&[q(5, 8)]).unwrap(), None);
        assert_eq!(s.membership(&[q(3, 4)]).unwrap(), Some(false));
        assert!(matches!(s.contains(&[q(5, 8)]), Err(Error::Indeterminate(_))));
    }
}

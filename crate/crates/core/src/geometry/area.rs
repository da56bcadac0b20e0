//! Exact volumes of boxes and of unions of boxes.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::Q;

use super::shape::Shape;

/// Closed axis-parallel box `[lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxQ {
    pub lo: Vec<Q>,
    pub hi: Vec<Q>,
}

impl BoxQ {
    pub fn from_center(center: &[Q], half: &[Q]) -> Self {
        Self {
            lo: center.iter().zip(half).map(|(c, h)| c - h).collect(),
            hi: center.iter().zip(half).map(|(c, h)| c + h).collect(),
        }
    }

    /// Exact box of a `Rect` shape.
    pub fn from_rect(shape: &Shape) -> Result<Self> {
        let Shape::Rect { center, radii } = shape else {
            return Err(Error::InvalidParameter(format!("expected rect, got {}", shape.kind())));
        };
        let exact = |v: &[crate::Interval]| -> Result<Vec<Q>> {
            v.iter()
                .map(|i| i.exact_value().cloned())
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Unsupported("exact area needs exact radii".into()))
        };
        Ok(Self::from_center(&exact(center)?, &exact(radii)?))
    }

    pub fn volume(&self) -> Q {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| if h > l { h - l } else { Q::zero() })
            .product()
    }

    pub fn intersect(&self, other: &BoxQ) -> BoxQ {
        BoxQ {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(b).clone()).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(b).clone()).collect(),
        }
    }
}

/// Volume of a union by inclusion–exclusion over all subsets. Limited to 20
/// boxes.
pub fn union_volume(boxes: &[BoxQ]) -> Result<Q> {
    if boxes.len() > 20 {
        return Err(Error::Unsupported(format!("inclusion-exclusion over {} boxes", boxes.len())));
    }
    let mut total = Q::zero();
    for mask in 1u32..(1 << boxes.len()) {
        let mut it = (0..boxes.len()).filter(|i| mask >> i & 1 == 1);
        let first = it.next().expect("nonempty mask");
        let inter = it.fold(boxes[first].clone(), |acc, i| acc.intersect(&boxes[i]));
        let v = inter.volume();
        if mask.count_ones() % 2 == 1 {
            total += v;
        } else {
            total -= v;
        }
    }
    Ok(total)
}

/// `Π 2·outer_i − Π 2·inner_i` for an exact rectangular annulus.
pub fn rect_annulus_volume(shape: &Shape) -> Result<Q> {
    let Shape::RectAnnulus { outer, inner, .. } = shape else {
        return Err(Error::InvalidParameter(format!("expected rect_annulus, got {}", shape.kind())));
    };
    let two = Q::from_integer(2.into());
    let prod = |v: &[crate::Interval]| -> Result<Q> {
        v.iter().try_fold(Q::one(), |acc, i| {
            i.exact_value()
                .map(|x| acc * x * &two)
                .ok_or_else(|| Error::Unsupported("exact area needs exact radii".into()))
        })
    };
    Ok(prod(outer)? - prod(inner)?)
}

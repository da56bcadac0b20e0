//! Shapes attached to a rational centre `p/q` with power-law radii.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formulas::ExponentProfile;
use crate::interval::Interval;
use crate::numeric::{pow_bracket, Q, DEFAULT_BITS, MAX_BITS};

use super::shape::{Norm, Shape};

/// A rational point `p/q` of `[0,1]^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub q: u64,
    pub p: Vec<u64>,
}

impl RationalPoint {
    pub fn new(p: Vec<u64>, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("q must be >= 1".into()));
        }
        if p.is_empty() {
            return Err(Error::InvalidParameter("p must have at least one coordinate".into()));
        }
        if let Some(pi) = p.iter().find(|&&pi| pi > q) {
            return Err(Error::InvalidParameter(format!("p_i = {pi} exceeds q = {q}")));
        }
        Ok(Self { q, p })
    }

    pub fn origin(n: usize, q: u64) -> Result<Self> {
        Self::new(vec![0; n], q)
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn coords(&self) -> Vec<Q> {
        self.p.iter().map(|&pi| Q::new(pi.into(), self.q.into())).collect()
    }

    pub fn center(&self) -> Vec<Interval> {
        self.coords().into_iter().map(Interval::exact).collect()
    }

    /// `gcd(p_1, …, p_n, q) == 1`.
    pub fn is_primitive(&self) -> bool {
        self.p.iter().fold(self.q, |g, &pi| g.gcd(&pi)) == 1
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.p.iter().map(|v| v.to_string()).collect();
        write!(f, "({})/{}", p.join(","), self.q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ShapeMeta {
    pub point: Option<RationalPoint>,
    /// Inner radius collapsed to zero (`φ(q) = 1`).
    pub degenerate: bool,
    /// Bounding box may leave `[0,1]^n`.
    pub clipped: bool,
    /// Bracket precision when some parameter is irrational.
    pub bits: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeRecord {
    pub shape: Shape,
    pub meta: ShapeMeta,
}

impl ShapeRecord {
    fn new(shape: Shape, point: &RationalPoint, degenerate: bool, bits: u32) -> Self {
        let exact = shape_is_exact(&shape);
        let clipped = shape.may_exit_unit_cube();
        Self {
            shape,
            meta: ShapeMeta {
                point: Some(point.clone()),
                degenerate,
                clipped,
                bits: (!exact).then_some(bits),
            },
        }
    }
}

fn shape_is_exact(s: &Shape) -> bool {
    let all_exact = |v: &[Interval]| v.iter().all(Interval::is_exact);
    all_exact(s.center())
        && match s {
            Shape::Ball { radius, .. } => radius.is_exact(),
            Shape::Rect { radii, .. } => all_exact(radii),
            Shape::Annulus { r_out, r_in, .. } => r_out.is_exact() && r_in.is_exact(),
            Shape::RectAnnulus { outer, inner, .. } => all_exact(outer) && all_exact(inner),
            Shape::QuasiAnnulus { r, .. } => r.is_exact(),
        }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_q(self) -> Q {
        match self {
            Sign::Plus => Q::one(),
            Sign::Minus => -Q::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// `ψ(q)/q = q^{-1-τψ}`.
pub fn outer_radius(q: u64, tau_psi: &Q, bits: u32) -> Result<Interval> {
    pow_bracket(q, &-(Q::one() + tau_psi), bits)
}

/// `φ(q) = q^{-τφ}`.
pub fn thickness(q: u64, tau_phi: &Q, bits: u32) -> Result<Interval> {
    pow_bracket(q, &-tau_phi.clone(), bits)
}

fn inner_from(outer: &Interval, phi: &Interval) -> Interval {
    let one = Interval::exact(Q::one());
    let v = &(&one - phi) * outer;
    // brackets of 1-φ may dip below zero at q = 1
    Interval::new(v.lo.max(Q::zero()), v.hi.max(Q::zero()))
}

/// Max-norm annulus `A(p/q; ψ(q)/q, (1-φ(q))ψ(q)/q)`.
pub fn annulus_family(p: &RationalPoint, tau_psi: &Q, tau_phi: &Q, bits: u32) -> Result<ShapeRecord> {
    let r_out = outer_radius(p.q, tau_psi, bits)?;
    let phi = thickness(p.q, tau_phi, bits)?;
    let r_in = inner_from(&r_out, &phi);
    let degenerate = r_in.is_exact() && r_in.lo.is_zero();
    let shape = Shape::annulus(p.center(), r_out, r_in)?;
    Ok(ShapeRecord::new(shape, p, degenerate, bits))
}

/// Rectangular annulus `A_{p,q}(Ψ,Φ)`.
pub fn rect_annulus(p: &RationalPoint, profile: &ExponentProfile, bits: u32) -> Result<ShapeRecord> {
    check_dim(p, profile)?;
    let mut outer = Vec::with_capacity(p.n());
    let mut inner = Vec::with_capacity(p.n());
    for (tp, tf) in profile.tau_psi().iter().zip(profile.tau_phi()) {
        let o = outer_radius(p.q, tp, bits)?;
        let phi = thickness(p.q, tf, bits)?;
        inner.push(inner_from(&o, &phi));
        outer.push(o);
    }
    let degenerate = inner.iter().all(|i| i.is_exact() && i.lo.is_zero());
    let shape = Shape::rect_annulus(p.center(), outer, inner)?;
    Ok(ShapeRecord::new(shape, p, degenerate, bits))
}

/// Shifted rectangle `R^{j,±}_{p,q}`: the closed slab
/// `(1-φ_j)ψ_j/q <= ±(x_j - p_j/q) <= ψ_j/q` times the full outer box in the
/// remaining coordinates. `j` is 0-based.
pub fn shifted_rect(p: &RationalPoint, profile: &ExponentProfile, j: usize, sign: Sign, bits: u32) -> Result<ShapeRecord> {
    check_dim(p, profile)?;
    profile.check_index(j)?;
    let half = Q::new(1.into(), 2.into());
    let mut center = p.center();
    let mut radii = Vec::with_capacity(p.n());
    for (i, tp) in profile.tau_psi().iter().enumerate() {
        let o = outer_radius(p.q, tp, bits)?;
        if i == j {
            let phi = thickness(p.q, &profile.tau_phi()[j], bits)?;
            let two = Interval::exact(Q::from_integer(2.into()));
            let offset = (&(&two - &phi) * &o).scale(&(&half * sign.as_q()));
            center[j] = &center[j] + &offset;
            radii.push((&phi * &o).scale(&half));
        } else {
            radii.push(o);
        }
    }
    let shape = Shape::rect(center, radii)?;
    Ok(ShapeRecord::new(shape, p, false, bits))
}

/// The `2n` shifted rectangles covering `A_{p,q}(Ψ,Φ)`, ordered by `j`
/// ascending, `+` before `-`.
pub fn rect_annulus_decompose(p: &RationalPoint, profile: &ExponentProfile, bits: u32) -> Result<Vec<ShapeRecord>> {
    let mut out = Vec::with_capacity(2 * profile.n());
    for j in 0..profile.n() {
        for sign in [Sign::Plus, Sign::Minus] {
            out.push(shifted_rect(p, profile, j, sign, bits)?);
        }
    }
    Ok(out)
}

/// Quasi-annulus `B_∞(p/q, ψ(q)/q) \ B_ρ(p/q, ψ(q)/q)`.
pub fn quasi_annulus(p: &RationalPoint, tau_psi: &Q, rho: &Q, bits: u32) -> Result<ShapeRecord> {
    let r = outer_radius(p.q, tau_psi, bits)?;
    let shape = Shape::quasi_annulus(p.center(), r, Norm::p(rho.clone())?)?;
    Ok(ShapeRecord::new(shape, p, false, bits))
}

/// Ball `B(p/q, ψ(q)/q)` in the given norm.
pub fn ball(p: &RationalPoint, tau_psi: &Q, norm: Norm, bits: u32) -> Result<ShapeRecord> {
    let r = outer_radius(p.q, tau_psi, bits)?;
    let shape = Shape::ball(p.center(), r, norm)?;
    Ok(ShapeRecord::new(shape, p, false, bits))
}

fn check_dim(p: &RationalPoint, profile: &ExponentProfile) -> Result<()> {
    if p.n() != profile.n() {
        return Err(Error::DimensionMismatch { expected: profile.n(), got: p.n() });
    }
    Ok(())
}

/// Runs `f` at increasing precision until it returns a definite answer.
pub fn decide<T>(mut f: impl FnMut(u32) -> Result<Option<T>>) -> Result<T> {
    let mut bits = DEFAULT_BITS;
    loop {
        if let Some(v) = f(bits)? {
            return Ok(v);
        }
        if bits >= MAX_BITS {
            return Err(Error::Indeterminate(format!("undecided at {bits} bits")));
        }
        bits = (bits * 2).min(MAX_BITS);
    }
}

/// Every `(p, q)` with `q <= q_max` whose rectangular annulus contains `x`,
/// ordered by `(q, p)`. `coprime` keeps only primitive points.
pub fn membership_scan(x: &[Q], profile: &ExponentProfile, q_max: u64, coprime: bool) -> Result<Vec<RationalPoint>> {
    if x.len() != profile.n() {
        return Err(Error::DimensionMismatch { expected: profile.n(), got: x.len() });
    }
    if x.iter().any(|xi| *xi < Q::zero() || *xi > Q::one()) {
        return Err(Error::InvalidParameter("x must lie in [0,1]^n".into()));
    }
    let mut out = Vec::new();
    for q in 1..=q_max {
        // outer radii are below 1/q, so only the nearest grid points matter
        let ranges: Vec<Vec<u64>> = x
            .iter()
            .map(|xi| {
                let f = (xi * Q::from_integer(q.into())).floor().to_integer();
                let f: i64 = i64::try_from(f).unwrap_or(0);
                ((f - 1).max(0)..=(f + 1).min(q as i64)).map(|v| v as u64).collect()
            })
            .collect();
        let mut idx = vec![0usize; ranges.len()];
        'outer: loop {
            let pt = RationalPoint { q, p: idx.iter().zip(&ranges).map(|(&k, r)| r[k]).collect() };
            if !coprime || pt.is_primitive() {
                let hit = decide(|bits| rect_annulus(&pt, profile, bits)?.shape.membership(x))?;
                if hit {
                    out.push(pt);
                }
            }
            for d in (0..idx.len()).rev() {
                idx[d] += 1;
                if idx[d] < ranges[d].len() {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q, qi};

    fn iso(n: usize, a: Q, b: Q) -> ExponentProfile {
        ExponentProfile::isotropic(n, a, b).unwrap()
    }

    #[test]
    fn annulus_family_examples() {
        let p = RationalPoint::new(vec![1], 2).unwrap();
        let rec = annulus_family(&p, &qi(1), &qi(1), DEFAULT_BITS).unwrap();
        let expected = Shape::annulus(vec![q(1, 2).into()], q(1, 4).into(), q(1, 8).into()).unwrap();
        assert_eq!(rec.shape, expected);
        assert!(!rec.meta.degenerate);
        assert_eq!(rec.meta.bits, None);

        let p = RationalPoint::origin(2, 3).unwrap();
        let rec = annulus_family(&p, &qi(1), &qi(2), DEFAULT_BITS).unwrap();
        let Shape::Annulus { r_out, r_in, .. } = rec.shape else { panic!() };
        assert_eq!(r_out, q(1, 9).into());
        assert_eq!(r_in, q(8, 81).into());
        assert!(rec.meta.clipped);

        let p = RationalPoint::new(vec![0], 1).unwrap();
        let rec = annulus_family(&p, &qi(1), &qi(1), DEFAULT_BITS).unwrap();
        assert!(rec.meta.degenerate);
    }

    #[test]
    fn irrational_radii_bracket_the_true_value() {
        let p = RationalPoint::new(vec![1], 2).unwrap();
        let rec = annulus_family(&p, &q(1, 2), &q(1, 3), DEFAULT_BITS).unwrap();
        let Shape::Annulus { r_out, r_in, .. } = rec.shape else { panic!() };
        let out = 2f64.powf(-1.5);
        let inn = (1.0 - 2f64.powf(-1.0 / 3.0)) * out;
        assert!(crate::numeric::to_f64(&r_out.lo) <= out && out <= crate::numeric::to_f64(&r_out.hi));
        assert!(crate::numeric::to_f64(&r_in.lo) <= inn + 1e-15);
        assert_eq!(rec.meta.bits, Some(DEFAULT_BITS));
    }

    #[test]
    fn shifted_rect_examples() {
        let p = RationalPoint::origin(1, 2).unwrap();
        let rec = shifted_rect(&p, &iso(1, qi(1), qi(1)), 0, Sign::Plus, DEFAULT_BITS).unwrap();
        assert_eq!(rec.shape, Shape::rect(vec![q(3, 16).into()], vec![q(1, 16).into()]).unwrap());

        let p = RationalPoint::origin(2, 2).unwrap();
        let rec = shifted_rect(&p, &iso(2, qi(1), qi(1)), 1, Sign::Minus, DEFAULT_BITS).unwrap();
        let expected =
            Shape::rect(vec![qi(0).into(), q(-3, 16).into()], vec![q(1, 4).into(), q(1, 16).into()]).unwrap();
        assert_eq!(rec.shape, expected);
        assert!(shifted_rect(&p, &iso(2, qi(1), qi(1)), 2, Sign::Plus, DEFAULT_BITS).is_err());
    }

    #[test]
    fn decomposition_order_and_one_dimensional_case() {
        let p = RationalPoint::new(vec![1], 2).unwrap();
        let prof = iso(1, qi(1), qi(1));
        let parts = rect_annulus_decompose(&p, &prof, DEFAULT_BITS).unwrap();
        let centers: Vec<Interval> = parts.iter().map(|r| r.shape.center()[0].clone()).collect();
        assert_eq!(centers, vec![q(11, 16).into(), q(5, 16).into()]);
        let p2 = RationalPoint::origin(3, 2).unwrap();
        assert_eq!(rect_annulus_decompose(&p2, &iso(3, qi(1), qi(1)), DEFAULT_BITS).unwrap().len(), 6);
    }

    #[test]
    fn scan_examples() {
        let prof = iso(1, qi(1), qi(1));
        let hits = membership_scan(&[q(3, 16)], &prof, 2, false).unwrap();
        // q = 1 has φ(1) = 1, so its annuli are full balls of radius 1
        assert_eq!(
            hits,
            vec![
                RationalPoint::new(vec![0], 1).unwrap(),
                RationalPoint::new(vec![1], 1).unwrap(),
                RationalPoint::new(vec![0], 2).unwrap(),
            ]
        );
        let hits = membership_scan(&[q(3, 16)], &iso(1, qi(1), qi(1)), 2, false).unwrap();
        assert!(hits.iter().filter(|pt| pt.q == 2).eq([&RationalPoint::new(vec![0], 2).unwrap()]));
        assert!(membership_scan(&[q(3, 16)], &prof, 0, false).unwrap().is_empty());
        // a centre is never its own witness
        let hits = membership_scan(&[q(1, 2)], &prof, 6, false).unwrap();
        assert!(hits.iter().all(|pt| Q::new((pt.p[0]).into(), pt.q.into()) != q(1, 2)));
    }

    #[test]
    fn scan_coprime_filter() {
        let prof = iso(1, qi(1), qi(1));
        let x = [q(1, 2) + q(7, 128)];
        let all = membership_scan(&x, &prof, 4, false).unwrap();
        let prim = membership_scan(&x, &prof, 4, true).unwrap();
        assert!(all.contains(&RationalPoint::new(vec![2], 4).unwrap()));
        assert!(!prim.contains(&RationalPoint::new(vec![2], 4).unwrap()));
        assert!(prim.iter().all(RationalPoint::is_primitive));
    }

    #[test]
    fn point_validation() {
        assert!(RationalPoint::new(vec![3], 2).is_err());
        assert!(RationalPoint::new(vec![0], 0).is_err());
        assert!(!RationalPoint::new(vec![2, 4], 4).unwrap().is_primitive());
    }
}

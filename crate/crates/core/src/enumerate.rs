//! Deterministic streams of shapes centred at `p/q`, ordered by `(q, p)`
//! with `p` lexicographic over `{0..q}^n`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formulas::ExponentProfile;
use crate::geometry::json::record_to_json;
use crate::geometry::{annulus_family, ball, quasi_annulus, rect_annulus, shifted_rect, Norm, RationalPoint, ShapeRecord, Sign};
use crate::numeric::{Q, DEFAULT_BITS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Annulus,
    RectAnnulus,
    QuasiAnnulus,
    /// 0-based coordinate index.
    ShiftedRect { j: usize, sign: Sign },
    Ball,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub profile: ExponentProfile,
    /// Inner norm for quasi-annuli, norm for balls (`None` = max norm).
    pub rho: Option<Q>,
    pub coprime: bool,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, profile: ExponentProfile, rho: Option<Q>) -> Result<Self> {
        match (&kind, &rho) {
            (FamilyKind::QuasiAnnulus, None) => {
                return Err(Error::InvalidParameter("quasi-annulus family needs rho".into()))
            }
            (FamilyKind::QuasiAnnulus | FamilyKind::Ball, Some(_)) => {}
            (_, Some(_)) => {
                return Err(Error::InvalidParameter("rho applies only to quasi-annulus and ball families".into()))
            }
            _ => {}
        }
        if matches!(kind, FamilyKind::Annulus | FamilyKind::QuasiAnnulus | FamilyKind::Ball) && !profile.is_isotropic() {
            return Err(Error::InvalidParameter("this family needs an isotropic profile".into()));
        }
        if let FamilyKind::ShiftedRect { j, .. } = kind {
            profile.check_index(j)?;
        }
        Ok(Self { kind, profile, rho, coprime: false })
    }

    pub fn coprime(mut self, on: bool) -> Self {
        self.coprime = on;
        self
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    pub fn build(&self, p: &RationalPoint) -> Result<ShapeRecord> {
        let tp = &self.profile.tau_psi()[0];
        let tf = &self.profile.tau_phi()[0];
        match &self.kind {
            FamilyKind::Annulus => annulus_family(p, tp, tf, DEFAULT_BITS),
            FamilyKind::RectAnnulus => rect_annulus(p, &self.profile, DEFAULT_BITS),
            FamilyKind::QuasiAnnulus => quasi_annulus(p, tp, self.rho.as_ref().expect("checked in new"), DEFAULT_BITS),
            FamilyKind::ShiftedRect { j, sign } => shifted_rect(p, &self.profile, *j, *sign, DEFAULT_BITS),
            FamilyKind::Ball => {
                let norm = match &self.rho {
                    Some(r) => Norm::p(r.clone())?,
                    None => Norm::Max,
                };
                ball(p, tp, norm, DEFAULT_BITS)
            }
        }
    }
}

fn check_range(q_lo: u64, q_hi: u64) -> Result<()> {
    if q_lo < 1 || q_lo > q_hi {
        return Err(Error::InvalidParameter(format!("need 1 <= q_lo <= q_hi, got [{q_lo}, {q_hi}]")));
    }
    Ok(())
}

/// `Σ_{q=q_lo}^{q_hi} (q+1)^n` without enumerating; ignores the coprime flag.
pub fn count(n: usize, q_lo: u64, q_hi: u64) -> Result<u64> {
    check_range(q_lo, q_hi)?;
    let overflow = || Error::Overflow(format!("shape count for n={n}, q in [{q_lo}, {q_hi}]"));
    let n32 = u32::try_from(n).map_err(|_| overflow())?;
    let mut total: u64 = 0;
    for q in q_lo..=q_hi {
        let term = (q.checked_add(1).ok_or_else(overflow)?).checked_pow(n32).ok_or_else(overflow)?;
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    Ok(total)
}

/// Centres `p/q` for one `q`, lexicographic in `p`.
pub fn points_for_q(n: usize, q: u64) -> impl Iterator<Item = RationalPoint> {
    let mut next = Some(vec![0u64; n]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        for d in (0..n).rev() {
            if succ[d] < q {
                succ[d] += 1;
                next = Some(succ);
                break;
            }
            succ[d] = 0;
        }
        Some(RationalPoint { q, p: cur })
    })
}

/// Shapes for one denominator, in order.
pub fn shapes_for_q(spec: &FamilySpec, q: u64) -> Result<Vec<ShapeRecord>> {
    points_for_q(spec.n(), q)
        .filter(|p| !spec.coprime || p.is_primitive())
        .map(|p| spec.build(&p))
        .collect()
}

/// Ordered stream over `q ∈ [q_lo, q_hi]`. Denominators are built in parallel
/// chunks and yielded in order.
pub fn stream(spec: &FamilySpec, q_lo: u64, q_hi: u64) -> Result<impl Iterator<Item = Result<ShapeRecord>> + '_> {
    count(spec.n(), q_lo, q_hi)?;
    const CHUNK: u64 = 16;
    let mut next_q = q_lo;
    let mut buf: std::vec::IntoIter<Result<ShapeRecord>> = Vec::new().into_iter();
    Ok(std::iter::from_fn(move || loop {
        if let Some(r) = buf.next() {
            return Some(r);
        }
        if next_q > q_hi {
            return None;
        }
        let end = (next_q + CHUNK - 1).min(q_hi);
        let chunks: Vec<Result<Vec<ShapeRecord>>> =
            (next_q..=end).into_par_iter().map(|q| shapes_for_q(spec, q)).collect();
        next_q = end + 1;
        let mut flat = Vec::new();
        for c in chunks {
            match c {
                Ok(v) => flat.extend(v.into_iter().map(Ok)),
                Err(e) => {
                    flat.push(Err(e));
                    next_q = q_hi + 1;
                    break;
                }
            }
        }
        buf = flat.into_iter();
    }))
}

/// Newline-delimited JSON dump; returns the number of shapes written.
pub fn dump_ndjson<W: Write>(spec: &FamilySpec, q_lo: u64, q_hi: u64, mut out: W) -> Result<u64> {
    let mut written = 0;
    for rec in stream(spec, q_lo, q_hi)? {
        let line = serde_json::to_string(&record_to_json(&rec?)).expect("json values serialize");
        writeln!(out, "{line}").map_err(|e| Error::Io(format!("write failed: {e}")))?;
        written += 1;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use crate::numeric::{q, qi};

    fn iso(n: usize) -> ExponentProfile {
        ExponentProfile::isotropic(n, qi(1), qi(1)).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(count(2, 1, 10).unwrap(), 505);
        assert_eq!(count(1, 1, 1).unwrap(), 2);
        assert_eq!(count(3, 2, 2).unwrap(), 27);
        assert!(matches!(count(8, 1, u64::MAX / 2), Err(Error::Overflow(_))));
        assert!(count(2, 0, 3).is_err());
        assert!(count(2, 4, 3).is_err());
    }

    #[test]
    fn stream_matches_count_and_order() {
        let spec = FamilySpec::new(FamilyKind::Annulus, iso(1), None).unwrap();
        let v: Vec<_> = stream(&spec, 1, 2).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(v.len(), 5);
        let spec = FamilySpec::new(FamilyKind::RectAnnulus, iso(2), None).unwrap();
        let v: Vec<_> = stream(&spec, 3, 3).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(v.len(), 16);
        let pts: Vec<_> = v.iter().map(|r| r.meta.point.clone().unwrap()).collect();
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted);
        let spec = FamilySpec::new(FamilyKind::RectAnnulus, iso(2), None).unwrap();
        assert_eq!(stream(&spec, 1, 40).unwrap().count() as u64, count(2, 1, 40).unwrap());
    }

    #[test]
    fn shifted_rect_stream() {
        let spec = FamilySpec::new(FamilyKind::ShiftedRect { j: 0, sign: Sign::Plus }, iso(1), None).unwrap();
        let v: Vec<_> = stream(&spec, 2, 2).unwrap().collect::<Result<_>>().unwrap();
        for (k, rec) in v.iter().enumerate() {
            let Shape::Rect { center, radii } = &rec.shape else { panic!() };
            let pq = Q::new((k as i64).into(), 2.into());
            assert_eq!(center[0].lo.clone() - &radii[0].lo, &pq + q(1, 8));
            assert_eq!(center[0].lo.clone() + &radii[0].lo, &pq + q(1, 4));
        }
        let clipped: Vec<bool> = v.iter().map(|r| r.meta.clipped).collect();
        assert_eq!(clipped, vec![false, false, true]);
    }

    #[test]
    fn spec_validation() {
        assert!(FamilySpec::new(FamilyKind::QuasiAnnulus, iso(2), None).is_err());
        assert!(FamilySpec::new(FamilyKind::Annulus, iso(2), Some(qi(2))).is_err());
        let aniso = ExponentProfile::new(vec![qi(1), qi(2)], vec![qi(1), qi(1)]).unwrap();
        assert!(FamilySpec::new(FamilyKind::Annulus, aniso.clone(), None).is_err());
        assert!(FamilySpec::new(FamilyKind::RectAnnulus, aniso, None).is_ok());
        assert!(FamilySpec::new(FamilyKind::ShiftedRect { j: 2, sign: Sign::Minus }, iso(2), None).is_err());
    }

    #[test]
    fn coprime_mode_and_dump() {
        let spec = FamilySpec::new(FamilyKind::Annulus, iso(1), None).unwrap().coprime(true);
        let v: Vec<_> = stream(&spec, 4, 4).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(v.len(), 2);
        let spec = FamilySpec::new(FamilyKind::QuasiAnnulus, iso(2), Some(qi(2))).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        assert_eq!(dump_ndjson(&spec, 1, 3, &mut a).unwrap(), 29);
        dump_ndjson(&spec, 1, 3, &mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(String::from_utf8(a).unwrap().lines().count(), 29);
    }
}

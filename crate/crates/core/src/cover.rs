//! Covering counts for shifted rectangles and the critical exponent of the
//! resulting `s`-cost.
//!
//! Covers use the grid of cubes of side `2r` anchored at the origin instead
//! of balls of radius `r`; the two counts differ by a factor depending only
//! on `n`.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formulas::{ExponentProfile, Hypotheses};
use crate::geometry::{shifted_rect, RationalPoint, Shape, Sign};
use crate::numeric::{fmt_sig, pow_bracket, to_f64, Q, DEFAULT_BITS};

fn pos(x: Q) -> Q {
    if x.is_positive() {
        x
    } else {
        Q::zero()
    }
}

/// `Σ_axes (τ_k − τ_axis)^+`, where the `j` axis has exponent `τψ_j + τφ_j`.
pub fn predicted_exponent(profile: &ExponentProfile, j: usize, k: usize) -> Result<Q> {
    profile.check_index(j)?;
    profile.check_index(k)?;
    let tk = profile.tau_k(j, k);
    let mut e = pos(&tk - &profile.tau_psi()[j] - &profile.tau_phi()[j]);
    for (i, t) in profile.tau_psi().iter().enumerate() {
        if i != j {
            e += pos(&tk - t);
        }
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Predicted {
    pub exponent: Q,
    /// `q^exponent`.
    pub value: f64,
    /// Set when `q^exponent` is an integer power.
    pub exact: Option<BigInt>,
}

/// Number of radius-`q^{-(1+τ_k)}` balls comparable with what it takes to
/// cover `R^{j,±}_{p,q}`.
pub fn predicted_cover_count(profile: &ExponentProfile, q: u64, j: usize, k: usize) -> Result<Predicted> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be >= 1".into()));
    }
    let exponent = predicted_exponent(profile, j, k)?;
    let exact = exponent
        .is_integer()
        .then(|| exponent.to_integer().to_u32())
        .flatten()
        .map(|e| BigInt::from(q).pow(e));
    let value = match &exact {
        Some(v) => v.to_f64().unwrap_or(f64::INFINITY),
        None => (q as f64).powf(to_f64(&exponent)),
    };
    Ok(Predicted { exponent, value, exact })
}

/// Grid cells of side `2r` (anchored at 0) meeting the closed rectangle.
pub fn measured_cover_count(rect: &Shape, r: &Q) -> Result<BigInt> {
    if !r.is_positive() {
        return Err(Error::InvalidParameter(format!("cell radius {r} must be positive")));
    }
    let Shape::Rect { center, radii } = rect else {
        return Err(Error::InvalidParameter(format!("expected rect, got {}", rect.kind())));
    };
    let side = r * Q::from_integer(2.into());
    let mut total = BigInt::one();
    for (c, h) in center.iter().zip(radii) {
        let (Some(c), Some(h)) = (c.exact_value(), h.exact_value()) else {
            return Err(Error::Unsupported("cover counts need an exact rectangle".into()));
        };
        let hi = ((c + h) / &side).floor().to_integer();
        let lo = ((c - h) / &side).floor().to_integer();
        total *= hi - lo + 1;
    }
    Ok(total)
}

/// `(j, k, s_{j,k})` with the `s` solving the cost balance for that pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalEntry {
    pub j: usize,
    pub k: usize,
    pub s: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalExponent {
    pub value: Q,
    pub witness_j: usize,
    pub witness_k: usize,
    pub table: Vec<CriticalEntry>,
    pub hypotheses: Hypotheses,
}

/// Solves `n + cover_exponent(j,k) − (1+τ_k)s = −1` for each `(j,k)` and
/// takes `max_j min_k`.
pub fn critical_exponent(profile: &ExponentProfile) -> Result<CriticalExponent> {
    let n = profile.n();
    let mut table = Vec::with_capacity(n * n);
    let mut best: Option<(Q, usize, usize)> = None;
    for j in 0..n {
        let mut row_min: Option<(Q, usize)> = None;
        for k in 0..n {
            let tk = profile.tau_k(j, k);
            let e = predicted_exponent(profile, j, k)?;
            let s = (Q::from_integer((n as i64 + 1).into()) + e) / (Q::one() + tk);
            if row_min.as_ref().is_none_or(|(m, _)| s < *m) {
                row_min = Some((s.clone(), k));
            }
            table.push(CriticalEntry { j, k, s });
        }
        let (m, k) = row_min.expect("n >= 1");
        if best.as_ref().is_none_or(|(b, _, _)| m > *b) {
            best = Some((m, j, k));
        }
    }
    let (value, witness_j, witness_k) = best.expect("n >= 1");
    let hypotheses = if profile.sum_condition_holds() {
        Hypotheses::Satisfied
    } else {
        Hypotheses::Outside("sum of tau_psi below 1".into())
    };
    Ok(CriticalExponent { value, witness_j, witness_k, table, hypotheses })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverReport {
    pub q: u64,
    pub j: usize,
    pub k: usize,
    pub predicted: f64,
    pub measured: BigInt,
    pub ratio: f64,
    /// Ball radius `q^{-(1+τ_k)}` (lower dyadic bound when irrational).
    pub scale: Q,
}

/// Reports for every `(q, j, k)`, using `R^{j,+}` at `p = 0`. Ordered by
/// `q`, then `j`, then `k`.
pub fn cover_reports(profile: &ExponentProfile, qs: &[u64]) -> Result<Vec<CoverReport>> {
    let n = profile.n();
    let per_q: Vec<Result<Vec<CoverReport>>> = qs
        .par_iter()
        .map(|&q| {
            let p = RationalPoint::origin(n, q)?;
            let mut out = Vec::with_capacity(n * n);
            for j in 0..n {
                let rect = shifted_rect(&p, profile, j, Sign::Plus, DEFAULT_BITS)?.shape;
                for k in 0..n {
                    let tk = profile.tau_k(j, k);
                    let scale = pow_bracket(q, &-(Q::one() + tk), DEFAULT_BITS)?.lo;
                    let measured = measured_cover_count(&rect, &scale)?;
                    let predicted = predicted_cover_count(profile, q, j, k)?.value;
                    let ratio = measured.to_f64().unwrap_or(f64::INFINITY) / predicted;
                    out.push(CoverReport { q, j, k, predicted, measured, ratio, scale });
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_q {
        all.extend(r?);
    }
    Ok(all)
}

pub const COVER_CSV_HEADER: [&str; 8] = ["q", "j", "k", "predicted", "measured", "ratio", "scale_num", "scale_den"];

/// CSV with 1-based `j`, `k`.
pub fn write_cover_csv<W: Write>(reports: &[CoverReport], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(format!("csv write failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COVER_CSV_HEADER).map_err(io)?;
    for r in reports {
        w.write_record([
            r.q.to_string(),
            (r.j + 1).to_string(),
            (r.k + 1).to_string(),
            fmt_sig(r.predicted, 12),
            r.measured.to_string(),
            fmt_sig(r.ratio, 12),
            r.scale.numer().to_string(),
            r.scale.denom().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(format!("csv flush failed: {e}")))?;
    Ok(())
}

//! Seeded Monte Carlo checks of the rectangular-annulus split.
//!
//! Chunk `c` of a run with seed `s` samples from ChaCha8 stream `c` of `s`;
//! counts do not depend on how chunks are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::formulas::ExponentProfile;
use crate::numeric::{Q, DEFAULT_BITS};

use super::area::{rect_annulus_volume, union_volume, BoxQ};
use super::family::{rect_annulus, rect_annulus_decompose, RationalPoint};
use super::sample::sample_interior;
use super::shape::Shape;

const CHUNK: u64 = 4096;
/// Violating points kept for the report.
pub const MAX_ITEMS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub x: Vec<Q>,
    /// What failed, e.g. `"annulus point in no rectangle"`.
    pub what: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub samples: u64,
    pub violations: u64,
    pub items: Vec<Violation>,
}

fn run_chunks(
    samples: u64,
    seed: u64,
    what: &'static str,
    check: impl Fn(&mut ChaCha8Rng) -> Result<(bool, Vec<Q>)> + Sync,
) -> Result<SampleReport> {
    let chunks = samples.div_ceil(CHUNK);
    let per: Vec<Result<(u64, Vec<Violation>)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut bad = 0;
            let mut items = Vec::new();
            for _ in 0..len {
                let (ok, x) = check(&mut rng)?;
                if !ok {
                    bad += 1;
                    if items.len() < MAX_ITEMS {
                        items.push(Violation { x, what });
                    }
                }
            }
            Ok((bad, items))
        })
        .collect();
    let mut report = SampleReport { samples, violations: 0, items: Vec::new() };
    for r in per {
        let (bad, items) = r?;
        report.violations += bad;
        report.items.extend(items);
    }
    report.items.truncate(MAX_ITEMS);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    /// Annulus samples covered by some rectangle.
    pub forward: SampleReport,
    /// Rectangle samples inside the annulus.
    pub backward: SampleReport,
    /// `(union area, annulus area)`, exact, when `n <= 3` and radii are rational.
    pub areas: Option<(Q, Q)>,
}

impl DecompositionReport {
    pub fn clean(&self) -> bool {
        self.forward.violations == 0
            && self.backward.violations == 0
            && self.areas.as_ref().is_none_or(|(a, b)| a == b)
    }
}

fn parts(p: &RationalPoint, profile: &ExponentProfile) -> Result<(Shape, Vec<Shape>)> {
    let ann = rect_annulus(p, profile, DEFAULT_BITS)?.shape;
    let rects = rect_annulus_decompose(p, profile, DEFAULT_BITS)?.into_iter().map(|r| r.shape).collect();
    Ok((ann, rects))
}

/// Shifted-rectangle interiors lie strictly inside the rectangular annulus.
pub fn check_sandwich(p: &RationalPoint, profile: &ExponentProfile, samples: u64, seed: u64) -> Result<SampleReport> {
    let (ann, rects) = parts(p, profile)?;
    run_chunks(samples, seed, "rectangle point outside annulus", |rng| {
        let r = &rects[rng.gen_range(0..rects.len())];
        let x = sample_interior(r, rng, 1)?;
        Ok((ann.contains(&x)?, x))
    })
}

/// Both inclusions between the annulus and the union of its `2n` shifted
/// rectangles, plus exact area equality for `n <= 3`.
pub fn check_decomposition(p: &RationalPoint, profile: &ExponentProfile, samples: u64, seed: u64) -> Result<DecompositionReport> {
    let (ann, rects) = parts(p, profile)?;
    let forward = run_chunks(samples, seed, "annulus point in no rectangle", |rng| {
        let x = sample_interior(&ann, rng, 100_000)?;
        for r in &rects {
            if r.contains(&x)? {
                return Ok((true, x));
            }
        }
        Ok((false, x))
    })?;
    let backward = check_sandwich(p, profile, samples, seed ^ 0x5bd1_e995)?;
    let areas = if p.n() <= 3 {
        let boxes: Option<Vec<BoxQ>> = rects.iter().map(|r| BoxQ::from_rect(r).ok()).collect();
        match (boxes, rect_annulus_volume(&ann)) {
            (Some(b), Ok(a)) => Some((union_volume(&b)?, a)),
            _ => None,
        }
    } else {
        None
    };
    Ok(DecompositionReport { forward, backward, areas })
}

//! Seeded interior samples on the dyadic grid `k/2^32`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numeric::Q;

use super::shape::Shape;

const GRID_BITS: u32 = 32;

fn unit<R: Rng>(rng: &mut R) -> Q {
    // strictly inside (0, 1)
    let k: u64 = rng.gen_range(1..(1u64 << GRID_BITS));
    Q::new(k.into(), (1u64 << GRID_BITS).into())
}

/// Uniform point of the open box `center ± half`.
pub fn sample_box<R: Rng>(center: &[Q], half: &[Q], rng: &mut R) -> Vec<Q> {
    let two = Q::from_integer(2.into());
    center
        .iter()
        .zip(half)
        .map(|(c, h)| c - h + &two * h * unit(rng))
        .collect()
}

fn exact_all(v: &[Interval]) -> Result<Vec<Q>> {
    v.iter()
        .map(|i| i.exact_value().cloned())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Unsupported("interior sampling needs exact shape parameters".into()))
}

/// Uniform sample from the interior of an exact shape, by rejection from its
/// bounding box. Gives up after `max_tries` rejections.
pub fn sample_interior<R: Rng>(shape: &Shape, rng: &mut R, max_tries: usize) -> Result<Vec<Q>> {
    let center = exact_all(shape.center())?;
    let half = exact_all(&shape.half_extent())?;
    if half.iter().any(|h| *h == Q::from_integer(0.into())) {
        return Err(Error::InvalidParameter(format!("{} has empty interior", shape.kind())));
    }
    for _ in 0..max_tries {
        let x = sample_box(&center, &half, rng);
        if shape.contains(&x)? {
            return Ok(x);
        }
    }
    Err(Error::Indeterminate(format!("no interior sample of {} after {max_tries} tries", shape.kind())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q, qi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_interior_and_reproducible() {
        let s = Shape::rect_annulus(
            vec![qi(0).into(); 2],
            vec![q(1, 2).into(); 2],
            vec![q(3, 8).into(); 2],
        )
        .unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = sample_interior(&s, &mut a, 1000).unwrap();
            assert!(s.contains(&x).unwrap());
            assert_eq!(x, sample_interior(&s, &mut b, 1000).unwrap());
        }
    }

    #[test]
    fn flat_rect_rejected() {
        let s = Shape::rect(vec![qi(0).into()], vec![qi(0).into()]).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_interior(&s, &mut r, 10).is_err());
    }
}

//! Max-norm cube inscribed in the quasi-annulus `B_∞(c, r) \ B_ρ(c, r)`.
//!
//! Corner checks are exact: every quantity lives in `Q(s)` with
//! `s = n^{-1/ρ}`, represented modulo the minimal polynomial of `s`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numeric::{pow_bracket, Q, DEFAULT_BITS, MAX_BITS};

use super::family::{RationalPoint, Sign};
use super::shape::{Norm, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CubeConstants {
    /// Offset `(1+n^{-1/ρ})/2`, radius `(1-n^{-1/ρ})/2`, both times `r`.
    Corrected,
    /// Offset `(n^{1/ρ}+n^{-1/ρ})/2`, radius `n^{1/ρ}-n^{-1/ρ}`.
    Printed,
}

impl fmt::Display for CubeConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CubeConstants::Corrected => "corrected",
            CubeConstants::Printed => "printed",
        })
    }
}

/// `Q(s)` with `s^d = 1/m`, where `x^d - 1/m` is irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootField {
    m: u64,
    d: u32,
}

/// Element `Σ c_i s^i`, `i < d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alg(Vec<Q>);

fn perfect_root(n: u64, k: u32) -> Option<u64> {
    let r = BigUint::from(n).nth_root(k);
    (r.pow(k) == BigUint::from(n)).then(|| r.to_u64().expect("root of a u64 fits"))
}

impl RootField {
    /// Field generated by `n^{-1/ρ}` for integer `ρ >= 1`.
    pub fn for_root(n: u64, rho: u32) -> Result<Self> {
        if n == 0 || rho == 0 {
            return Err(Error::InvalidParameter("root field needs n >= 1, rho >= 1".into()));
        }
        if u64::from(rho) > crate::numeric::MAX_ROOT_DEGREE {
            return Err(Error::Unsupported(format!("root degree {rho} too large")));
        }
        // strip the largest g | rho with n a perfect g-th power
        let mut best = (n, rho);
        for g in (1..=rho).rev() {
            if rho.is_multiple_of(g) {
                if let Some(m) = perfect_root(n, g) {
                    best = (m, rho / g);
                    break;
                }
            }
        }
        let (m, d) = best;
        Ok(if m == 1 { Self { m: 1, d: 1 } } else { Self { m, d } })
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn rational(&self, v: Q) -> Alg {
        let mut c = vec![Q::zero(); self.d as usize];
        c[0] = v;
        Alg(c)
    }

    /// The generator `s`.
    pub fn gen(&self) -> Alg {
        if self.d == 1 {
            return self.rational(Q::new(1.into(), self.m.into()));
        }
        let mut c = vec![Q::zero(); self.d as usize];
        c[1] = Q::one();
        Alg(c)
    }

    /// `1/s = m s^{d-1}`.
    pub fn gen_inv(&self) -> Alg {
        if self.d == 1 {
            return self.rational(Q::from_integer(self.m.into()));
        }
        let mut c = vec![Q::zero(); self.d as usize];
        c[self.d as usize - 1] = Q::from_integer(self.m.into());
        Alg(c)
    }

    pub fn add(&self, a: &Alg, b: &Alg) -> Alg {
        Alg(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &Alg, b: &Alg) -> Alg {
        Alg(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, a: &Alg, k: &Q) -> Alg {
        Alg(a.0.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, a: &Alg, b: &Alg) -> Alg {
        let d = self.d as usize;
        let inv_m = Q::new(1.into(), self.m.into());
        let mut c = vec![Q::zero(); d];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                let t = x * y;
                if i + j >= d {
                    c[i + j - d] += t * &inv_m;
                } else {
                    c[i + j] += t;
                }
            }
        }
        Alg(c)
    }

    pub fn pow(&self, a: &Alg, k: u32) -> Alg {
        (0..k).fold(self.rational(Q::one()), |acc, _| self.mul(&acc, a))
    }

    pub fn bracket(&self, a: &Alg, bits: u32) -> Result<Interval> {
        if self.d == 1 {
            return Ok(Interval::exact(a.0[0].clone()));
        }
        let s = pow_bracket(self.m, &Q::new((-1).into(), self.d.into()), bits)?;
        let mut acc = Interval::zero();
        let mut sp = Interval::exact(Q::one());
        for c in &a.0 {
            acc = &acc + &sp.scale(c);
            sp = &sp * &s;
        }
        Ok(acc)
    }

    /// Exact sign; a nonzero element never vanishes, so refinement ends.
    pub fn signum(&self, a: &Alg) -> Result<i8> {
        if a.0.iter().all(Q::is_zero) {
            return Ok(0);
        }
        let mut bits = DEFAULT_BITS;
        loop {
            let b = self.bracket(a, bits)?;
            if b.lo.is_positive() {
                return Ok(1);
            }
            if b.hi.is_negative() {
                return Ok(-1);
            }
            if bits >= MAX_BITS {
                return Err(Error::Indeterminate(format!("sign of algebraic number at {bits} bits")));
            }
            bits *= 2;
        }
    }

    pub fn abs(&self, a: &Alg) -> Result<Alg> {
        Ok(if self.signum(a)? < 0 { self.scale(a, &-Q::one()) } else { a.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InscribedCube {
    pub center: Vec<Q>,
    pub r: Q,
    pub rho: Q,
    pub signs: Vec<Sign>,
    pub constants: CubeConstants,
}

/// Outcome of one corner: `far[i]` says whether coordinate `i` sits at
/// `offset + radius` (else `offset - radius`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerCheck {
    pub far: Vec<bool>,
    /// `‖y-c‖_∞ <= r`.
    pub in_outer: bool,
    pub outer_tight: bool,
    /// `‖y-c‖_ρ >= r`.
    pub outside_inner: bool,
    pub inner_tight: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerCertificate {
    pub corners: Vec<CornerCheck>,
    pub outer_ok: bool,
    pub inner_ok: bool,
    /// Equalities occur exactly on the designated corners: `∞`-norm on
    /// corners with a far coordinate, `ρ`-norm on the all-near corner.
    pub tight_as_designed: bool,
}

impl CornerCertificate {
    pub fn passed(&self) -> bool {
        self.outer_ok && self.inner_ok
    }
}

impl InscribedCube {
    pub fn n(&self) -> usize {
        self.center.len()
    }

    fn integer_rho(&self) -> Result<u32> {
        if !self.rho.is_integer() {
            return Err(Error::Unsupported(format!(
                "exact corner certificate needs an integer norm exponent, got {}",
                self.rho
            )));
        }
        self.rho
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::Unsupported(format!("norm exponent {} too large", self.rho)))
    }

    fn field(&self) -> Result<RootField> {
        RootField::for_root(self.n() as u64, self.integer_rho()?)
    }

    /// Offset and radius factors (multiples of `r`) in `Q(n^{-1/ρ})`.
    fn factors(&self, f: &RootField) -> (Alg, Alg) {
        let s = f.gen();
        let half = Q::new(1.into(), 2.into());
        let one = f.rational(Q::one());
        match self.constants {
            CubeConstants::Corrected => (f.scale(&f.add(&one, &s), &half), f.scale(&f.sub(&one, &s), &half)),
            CubeConstants::Printed => {
                let big = f.gen_inv();
                (f.scale(&f.add(&big, &s), &half), f.sub(&big, &s))
            }
        }
    }

    /// Exact check of all `2^n` corners. Integer `ρ` only.
    pub fn corner_certificate(&self) -> Result<CornerCertificate> {
        let f = self.field()?;
        let rho = self.integer_rho()?;
        let n = self.n();
        let (off, rad) = self.factors(&f);
        let far_mag = f.abs(&f.add(&off, &rad))?;
        let near_mag = f.abs(&f.sub(&off, &rad))?;
        let one = f.rational(Q::one());
        // distances are r times these factors; r > 0 cancels
        let far_pow = f.pow(&far_mag, rho);
        let near_pow = f.pow(&near_mag, rho);
        let far_cmp = f.signum(&f.sub(&far_mag, &one))?;
        let near_cmp = f.signum(&f.sub(&near_mag, &one))?;
        let mut corners = Vec::with_capacity(1 << n);
        let (mut outer_ok, mut inner_ok, mut tight) = (true, true, true);
        for mask in 0..(1u64 << n) {
            let far: Vec<bool> = (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect();
            let nf = far.iter().filter(|&&b| b).count();
            let max_cmp = match (nf > 0, nf < n) {
                (true, true) => far_cmp.max(near_cmp),
                (true, false) => far_cmp,
                _ => near_cmp,
            };
            let sum = f.add(
                &f.scale(&far_pow, &Q::from_integer(nf.into())),
                &f.scale(&near_pow, &Q::from_integer((n - nf).into())),
            );
            let rho_cmp = f.signum(&f.sub(&sum, &one))?;
            let c = CornerCheck {
                far,
                in_outer: max_cmp <= 0,
                outer_tight: max_cmp == 0,
                outside_inner: rho_cmp >= 0,
                inner_tight: rho_cmp == 0,
            };
            outer_ok &= c.in_outer;
            inner_ok &= c.outside_inner;
            tight &= c.outer_tight == (nf > 0) && c.inner_tight == (nf == 0);
            corners.push(c);
        }
        Ok(CornerCertificate { corners, outer_ok, inner_ok, tight_as_designed: tight })
    }

    /// Bracketed offset and radius factors, for any rational `ρ`.
    fn factor_brackets(&self, bits: u32) -> Result<(Interval, Interval)> {
        let n = self.n() as u64;
        let s = pow_bracket(n, &-(Q::one() / &self.rho), bits)?;
        let half = Q::new(1.into(), 2.into());
        let one = Interval::exact(Q::one());
        Ok(match self.constants {
            CubeConstants::Corrected => ((&one + &s).scale(&half), (&one - &s).scale(&half)),
            CubeConstants::Printed => {
                let big = pow_bracket(n, &(Q::one() / &self.rho), bits)?;
                ((&big + &s).scale(&half), &big - &s)
            }
        })
    }

    /// The cube as a max-norm ball with bracketed parameters.
    pub fn to_shape(&self, bits: u32) -> Result<Shape> {
        let (off, rad) = self.factor_brackets(bits)?;
        let center = self
            .center
            .iter()
            .zip(&self.signs)
            .map(|(c, s)| &Interval::exact(c.clone()) + &off.scale(&(&self.r * s.as_q())))
            .collect();
        Shape::ball(center, rad.scale(&self.r), Norm::Max)
    }

    /// Per-coordinate closed extent `[lo, hi]` of the cube, bracketed.
    pub fn extent(&self, bits: u32) -> Result<Vec<(Interval, Interval)>> {
        let (off, rad) = self.factor_brackets(bits)?;
        let a = (&off - &rad).scale(&self.r);
        let b = (&off + &rad).scale(&self.r);
        Ok(self
            .center
            .iter()
            .zip(&self.signs)
            .map(|(c, s)| {
                let c = Interval::exact(c.clone());
                match s {
                    Sign::Plus => (&c + &a, &c + &b),
                    Sign::Minus => (&c - &b, &c - &a),
                }
            })
            .collect())
    }

    /// `Some(true)` when the cube certainly lies in `[0,1]^n`.
    pub fn inside_unit_cube(&self, bits: u32) -> Result<Option<bool>> {
        let zero = Interval::zero();
        let one = Interval::exact(Q::one());
        let mut verdict = Some(true);
        for (lo, hi) in self.extent(bits)? {
            verdict = super::shape::and(verdict, super::shape::and(zero.le(&lo), hi.le(&one)));
        }
        Ok(verdict)
    }
}

fn validate(center: &[Q], r: &Q, rho: &Q) -> Result<()> {
    if center.is_empty() {
        return Err(Error::InvalidParameter("empty center".into()));
    }
    if !r.is_positive() {
        return Err(Error::InvalidParameter(format!("radius {r} must be positive")));
    }
    if !rho.is_positive() {
        return Err(Error::InvalidParameter(format!("norm exponent {rho} must be positive")));
    }
    Ok(())
}

/// Cube at an arbitrary centre, no `[0,1]^n` requirement.
pub fn inscribed_cube_at(center: Vec<Q>, r: Q, rho: Q, signs: Vec<Sign>, constants: CubeConstants) -> Result<InscribedCube> {
    validate(&center, &r, &rho)?;
    if signs.len() != center.len() {
        return Err(Error::DimensionMismatch { expected: center.len(), got: signs.len() });
    }
    Ok(InscribedCube { center, r, rho, signs, constants })
}

/// Per coordinate, `+` if that keeps the cube inside `[0,1]`, else `-`.
pub fn auto_signs(center: &[Q], r: &Q, rho: &Q, constants: CubeConstants) -> Result<Vec<Sign>> {
    validate(center, r, rho)?;
    let mut signs = Vec::with_capacity(center.len());
    for i in 0..center.len() {
        let mut chosen = None;
        for s in [Sign::Plus, Sign::Minus] {
            let probe = InscribedCube {
                center: center.to_vec(),
                r: r.clone(),
                rho: rho.clone(),
                signs: vec![s; center.len()],
                constants,
            };
            let (lo, hi) = probe.extent(DEFAULT_BITS)?.swap_remove(i);
            if lo.lo >= Q::zero() && hi.hi <= Q::one() {
                chosen = Some(s);
                break;
            }
        }
        signs.push(chosen.ok_or_else(|| {
            Error::CubeOutsideUnitCube(format!("coordinate {} admits no sign", i + 1))
        })?);
    }
    Ok(signs)
}

/// Cube inside the quasi-annulus around `p/q` with radius `r`. With no signs
/// given they are chosen to keep the cube inside `[0,1]^n`.
pub fn inscribed_cube(p: &RationalPoint, r: &Q, rho: &Q, signs: Option<Vec<Sign>>, constants: CubeConstants) -> Result<InscribedCube> {
    let center = p.coords();
    let signs = match signs {
        Some(s) => s,
        None => auto_signs(&center, r, rho, constants)?,
    };
    let cube = inscribed_cube_at(center, r.clone(), rho.clone(), signs, constants)?;
    if cube.inside_unit_cube(DEFAULT_BITS)? != Some(true) {
        return Err(Error::CubeOutsideUnitCube(format!("signs {:?}", cube.signs)));
    }
    Ok(cube)
}

//! Closed-form Hausdorff dimensions of limsup sets of annuli centred at
//! rational points, for power-law outer radii `q^-τψ` and thicknesses
//! `q^-τφ`.
//!
//! All evaluation is exact over `Q`. Results whose inputs fall outside the
//! hypotheses under which the formula is proven are still computed and come
//! back tagged [`Hypotheses::Outside`].

use std::fmt;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mtp::Partition;
use crate::numeric::{fmt_ratio, qi, Q};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Ambient dimension plus per-coordinate decay exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentProfile {
    tau_psi: Vec<Q>,
    tau_phi: Vec<Q>,
}

impl ExponentProfile {
    pub fn new(tau_psi: Vec<Q>, tau_phi: Vec<Q>) -> Result<Self> {
        if tau_psi.is_empty() {
            return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
        }
        if tau_psi.len() != tau_phi.len() {
            return Err(Error::DimensionMismatch {
                expected: tau_psi.len(),
                got: tau_phi.len(),
            });
        }
        if let Some(t) = tau_psi.iter().chain(&tau_phi).find(|t| !t.is_positive()) {
            return Err(Error::InvalidParameter(format!(
                "exponents must be positive, got {t}"
            )));
        }
        Ok(Self { tau_psi, tau_phi })
    }

    /// The same pair of exponents in every coordinate.
    pub fn isotropic(n: usize, tau_psi: Q, tau_phi: Q) -> Result<Self> {
        Self::new(vec![tau_psi; n], vec![tau_phi; n])
    }

    pub fn n(&self) -> usize {
        self.tau_psi.len()
    }

    pub fn tau_psi(&self) -> &[Q] {
        &self.tau_psi
    }

    pub fn tau_phi(&self) -> &[Q] {
        &self.tau_phi
    }

    pub fn is_isotropic(&self) -> bool {
        self.tau_psi.windows(2).all(|w| w[0] == w[1]) && self.tau_phi.windows(2).all(|w| w[0] == w[1])
    }

    /// `Σ τψ_i >= 1`, required by the weighted formula.
    pub fn sum_condition_holds(&self) -> bool {
        self.tau_psi.iter().sum::<Q>() >= Q::one()
    }

    /// Every `τψ_i >= 1/n`.
    pub fn all_large(&self) -> bool {
        let floor = Q::new(1.into(), (self.n() as i64).into());
        self.tau_psi.iter().all(|t| *t >= floor)
    }

    /// `τ_{k(j)}`: `τψ_j + τφ_j` when `k == j`, `τψ_k` otherwise.
    pub fn tau_k(&self, j: usize, k: usize) -> Q {
        if k == j {
            &self.tau_psi[j] + &self.tau_phi[j]
        } else {
            self.tau_psi[k].clone()
        }
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.n() {
            Err(Error::IndexOutOfRange { index: j, n: self.n() })
        } else {
            Ok(())
        }
    }
}

impl Serialize for ExponentProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExponentProfile", 3)?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("tau_psi", &self.tau_psi.iter().map(fmt_ratio).collect::<Vec<_>>())?;
        st.serialize_field("tau_phi", &self.tau_phi.iter().map(fmt_ratio).collect::<Vec<_>>())?;
        st.end()
    }
}

/// Which branch of a min/max formula produced the value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `(n+1)/(1+τψ)`.
    First,
    /// `(n+1+(n-1)τφ)/(1+τψ+τφ)`.
    Second,
    /// Both isotropic branches agree.
    Boundary,
    /// Weighted max-min formula; see the witnesses.
    MaxMin,
    /// Minimum over a single index.
    Min,
    /// Wang–Wu rectangle bound, minimised at `a_star`.
    WangWu { a_star: Q, partition: Partition },
    /// Perturbed-approximation corollary.
    Corollary,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::First => f.write_str("first"),
            Branch::Second => f.write_str("second"),
            Branch::Boundary => f.write_str("boundary"),
            Branch::MaxMin => f.write_str("max-min"),
            Branch::Min => f.write_str("min"),
            Branch::WangWu { a_star, .. } => write!(f, "wang-wu(A*={})", fmt_ratio(a_star)),
            Branch::Corollary => f.write_str("corollary"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypotheses {
    Satisfied,
    /// Value computed from the formula, but outside its proven range.
    Outside(String),
}

impl Hypotheses {
    pub fn satisfied(&self) -> bool {
        matches!(self, Hypotheses::Satisfied)
    }
}

/// A dimension value with the indices that witness it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionResult {
    pub value: Q,
    pub branch: Branch,
    /// Maximising `j` (0-based) for max-min formulas.
    pub witness_j: Option<usize>,
    /// Minimising `k(j)` (0-based) for every `j`.
    pub witness_k: Option<Vec<usize>>,
    /// Set when the reported witness was chosen among several optimisers.
    pub tie: bool,
    pub hypotheses: Hypotheses,
}

impl DimensionResult {
    fn plain(value: Q, branch: Branch, hypotheses: Hypotheses) -> Self {
        Self {
            value,
            branch,
            witness_j: None,
            witness_k: None,
            tie: false,
            hypotheses,
        }
    }
}

// ---------------------------------------------------------------------------
// Isotropic annuli
// ---------------------------------------------------------------------------

fn check_positive(name: &str, v: &Q) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("dimension n must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// `(n+1)/(1+τψ)`: the Jarník–Besicovitch value.
pub fn jarnik_value(n: usize, tau_psi: &Q) -> Q {
    qi(n as i64 + 1) / (Q::one() + tau_psi)
}

fn isotropic_second(n: usize, tau_psi: &Q, tau_phi: &Q) -> Q {
    let n1 = qi(n as i64 - 1);
    (qi(n as i64 + 1) + n1 * tau_phi) / (Q::one() + tau_psi + tau_phi)
}

fn min_of_branches(first: Q, second: Q, hypotheses: Hypotheses) -> DimensionResult {
    use std::cmp::Ordering::*;
    match first.cmp(&second) {
        Less => DimensionResult::plain(first, Branch::First, hypotheses),
        Greater => DimensionResult::plain(second, Branch::Second, hypotheses),
        Equal => DimensionResult {
            tie: true,
            ..DimensionResult::plain(first, Branch::Boundary, hypotheses)
        },
    }
}

fn isotropic_hypotheses(n: usize, tau_psi: &Q) -> Hypotheses {
    if *tau_psi >= Q::new(1.into(), (n as i64).into()) {
        Hypotheses::Satisfied
    } else {
        Hypotheses::Outside(format!("tau_psi = {tau_psi} < 1/n"))
    }
}

/// Dimension of the limsup set of max-norm annuli with outer radius
/// `q^{-1-τψ}` and inner radius `(1-q^{-τφ}) q^{-1-τψ}`.
pub fn dim_isotropic(n: usize, tau_psi: &Q, tau_phi: &Q) -> Result<DimensionResult> {
    check_dim(n)?;
    check_positive("tau_psi", tau_psi)?;
    check_positive("tau_phi", tau_phi)?;
    Ok(min_of_branches(
        jarnik_value(n, tau_psi),
        isotropic_second(n, tau_psi, tau_phi),
        isotropic_hypotheses(n, tau_psi),
    ))
}

/// Limits of the thickness exponent that are not admissible inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiLimit {
    /// `τφ -> 0`: the annuli become full balls.
    Zero,
    /// `τφ -> ∞`: the annuli become arbitrarily thin shells.
    Infinity,
}

pub fn dim_isotropic_limit(n: usize, tau_psi: &Q, limit: PhiLimit) -> Result<DimensionResult> {
    check_dim(n)?;
    check_positive("tau_psi", tau_psi)?;
    let first = jarnik_value(n, tau_psi);
    let second = match limit {
        PhiLimit::Zero => first.clone(),
        PhiLimit::Infinity => qi(n as i64 - 1),
    };
    Ok(min_of_branches(first, second, isotropic_hypotheses(n, tau_psi)))
}

// ---------------------------------------------------------------------------
// Weighted (rectangular) annuli
// ---------------------------------------------------------------------------

/// The `(j, k)` entry of the weighted max-min formula.
pub fn weighted_entry(profile: &ExponentProfile, j: usize, k: usize) -> Q {
    let n = profile.n();
    let tk = profile.tau_k(j, k);
    let psi = profile.tau_psi();
    let mut num = qi(n as i64 + 1);
    for (i, t) in psi.iter().enumerate() {
        if i != j && *t < tk {
            num += &tk - t;
        }
    }
    let inner = &tk - &psi[j] - &profile.tau_phi()[j];
    if inner.is_positive() {
        num += inner;
    }
    num / (Q::one() + tk)
}

/// Dimension of the limsup set of rectangular annuli; reduces to
/// [`dim_isotropic`] on isotropic profiles.
pub fn dim_weighted(profile: &ExponentProfile) -> Result<DimensionResult> {
    let n = profile.n();
    let mut mins: Vec<(Q, usize, bool)> = Vec::with_capacity(n);
    for j in 0..n {
        let mut best: Option<(Q, usize)> = None;
        let mut tie = false;
        for k in 0..n {
            let v = weighted_entry(profile, j, k);
            match &best {
                Some((b, _)) if v > *b => {}
                Some((b, _)) if v == *b => tie = true,
                _ => {
                    best = Some((v, k));
                    tie = false;
                }
            }
        }
        let (v, k) = best.expect("n >= 1");
        mins.push((v, k, tie));
    }
    let mut wj = 0;
    let mut tie_j = false;
    for j in 1..n {
        if mins[j].0 > mins[wj].0 {
            wj = j;
            tie_j = false;
        } else if mins[j].0 == mins[wj].0 {
            tie_j = true;
        }
    }
    let hypotheses = if profile.sum_condition_holds() {
        Hypotheses::Satisfied
    } else {
        Hypotheses::Outside("sum of tau_psi < 1".into())
    };
    Ok(DimensionResult {
        value: mins[wj].0.clone(),
        branch: Branch::MaxMin,
        witness_j: Some(wj),
        witness_k: Some(mins.iter().map(|m| m.1).collect()),
        tie: tie_j || mins[wj].2,
        hypotheses,
    })
}

// ---------------------------------------------------------------------------
// Threshold and exact-order bound
// ---------------------------------------------------------------------------

/// The outer exponent `2/(n-1)` above which the thickness stops mattering.
pub fn threshold(n: usize) -> Result<Q> {
    check_dim(n)?;
    if n == 1 {
        return Err(Error::NoThresholdInDimensionOne);
    }
    Ok(Q::new(2.into(), (n as i64 - 1).into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `τψ < 2/(n-1)`: thin annuli lower the dimension.
    InnerSensitive,
    /// `τψ > 2/(n-1)`: the dimension is `(n+1)/(1+τψ)` for every `τφ`.
    Insensitive,
    Boundary,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::InnerSensitive => "inner-sensitive",
            Regime::Insensitive => "insensitive",
            Regime::Boundary => "boundary",
        })
    }
}

pub fn regime(n: usize, tau_psi: &Q) -> Result<Regime> {
    let t = threshold(n)?;
    check_positive("tau_psi", tau_psi)?;
    Ok(match tau_psi.cmp(&t) {
        std::cmp::Ordering::Less => Regime::InnerSensitive,
        std::cmp::Ordering::Greater => Regime::Insensitive,
        std::cmp::Ordering::Equal => Regime::Boundary,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactOrderBound {
    /// `(n+1+(n-1)ε)/(1+τψ+ε)`.
    pub bound: Q,
    /// `(n+1)/(1+τψ)`, strictly larger than `bound`.
    pub comparison: Q,
}

/// Upper bound on the dimension of points of exact order `1 - q^{-ε}`.
pub fn exact_order_upper_bound(n: usize, tau_psi: &Q, eps: &Q) -> Result<ExactOrderBound> {
    check_positive("tau_psi", tau_psi)?;
    check_positive("eps", eps)?;
    let t = threshold(n)?;
    if *tau_psi >= t {
        return Err(Error::RegimeNotCovered(format!(
            "tau_psi = {tau_psi} >= 2/(n-1) = {t}"
        )));
    }
    let bound = isotropic_second(n, tau_psi, eps);
    let comparison = jarnik_value(n, tau_psi);
    assert!(bound < comparison, "bound must sit strictly below (n+1)/(1+tau_psi)");
    Ok(ExactOrderBound { bound, comparison })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    fn profile(psi: &[(i64, i64)], phi: &[(i64, i64)]) -> ExponentProfile {
        ExponentProfile::new(
            psi.iter().map(|&(a, b)| q(a, b)).collect(),
            phi.iter().map(|&(a, b)| q(a, b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn isotropic_examples() {
        let r = dim_isotropic(2, &qi(1), &qi(1)).unwrap();
        assert_eq!(r.value, q(4, 3));
        assert_eq!(r.branch, Branch::Second);
        assert!(!r.tie);

        let r = dim_isotropic(2, &qi(2), &qi(7)).unwrap();
        assert_eq!(r.value, qi(1));
        assert_eq!(r.branch, Branch::Boundary);
        assert!(r.tie);

        let r = dim_isotropic(1, &qi(1), &qi(1)).unwrap();
        assert_eq!(r.value, q(2, 3));
        assert_eq!(r.branch, Branch::Second);
    }

    #[test]
    fn isotropic_zero_thickness_limit_recovers_jarnik() {
        let r = dim_isotropic_limit(3, &q(1, 3), PhiLimit::Zero).unwrap();
        assert_eq!(r.value, qi(3));
        assert_eq!(r.branch, Branch::Boundary);
        assert!(r.hypotheses.satisfied());
    }

    #[test]
    fn isotropic_infinite_thickness_limit() {
        let r = dim_isotropic_limit(3, &q(1, 2), PhiLimit::Infinity).unwrap();
        assert_eq!(r.value, qi(2));
        assert_eq!(r.branch, Branch::Second);
        let r = dim_isotropic_limit(3, &qi(3), PhiLimit::Infinity).unwrap();
        assert_eq!(r.value, qi(1));
        assert_eq!(r.branch, Branch::First);
    }

    #[test]
    fn isotropic_rejects_nonpositive() {
        assert!(matches!(dim_isotropic(2, &qi(0), &qi(1)), Err(Error::InvalidParameter(_))));
        assert!(matches!(dim_isotropic(2, &qi(1), &q(-1, 2)), Err(Error::InvalidParameter(_))));
        assert!(dim_isotropic(0, &qi(1), &qi(1)).is_err());
    }

    #[test]
    fn isotropic_outside_hypotheses_is_flagged_not_fatal() {
        let r = dim_isotropic(3, &q(1, 4), &qi(1)).unwrap();
        assert!(matches!(r.hypotheses, Hypotheses::Outside(_)));
        assert_eq!(r.value, q(4 + 2, 1) / (q(9, 4)));
    }

    #[test]
    fn weighted_examples() {
        let r = dim_weighted(&profile(&[(1, 1), (1, 1)], &[(1, 1), (1, 1)])).unwrap();
        assert_eq!(r.value, q(4, 3));
        assert_eq!(r.witness_j, Some(0));
        assert_eq!(r.witness_k, Some(vec![0, 1]));
        assert!(r.tie);

        let r = dim_weighted(&profile(&[(2, 1), (1, 1)], &[(1, 1), (1, 1)])).unwrap();
        assert_eq!(r.value, q(5, 4));
        assert_eq!(r.witness_j, Some(0));
        assert!(!r.tie);

        let p = profile(&[(2, 1), (2, 1)], &[(5, 1), (5, 1)]);
        let r = dim_weighted(&p).unwrap();
        assert_eq!(r.value, qi(1));
        assert_eq!(r.value, dim_isotropic(2, &qi(2), &qi(5)).unwrap().value);
    }

    #[test]
    fn weighted_entries_for_second_example() {
        let p = profile(&[(2, 1), (1, 1)], &[(1, 1), (1, 1)]);
        assert_eq!(weighted_entry(&p, 0, 0), q(5, 4));
        assert_eq!(weighted_entry(&p, 0, 1), q(3, 2));
        assert_eq!(weighted_entry(&p, 1, 0), qi(1));
        assert_eq!(weighted_entry(&p, 1, 1), qi(1));
    }

    #[test]
    fn weighted_flags_small_sum() {
        let p = profile(&[(1, 4), (1, 4)], &[(1, 1), (1, 1)]);
        let r = dim_weighted(&p).unwrap();
        assert!(matches!(r.hypotheses, Hypotheses::Outside(_)));
    }

    #[test]
    fn profile_validation() {
        assert!(ExponentProfile::new(vec![], vec![]).is_err());
        assert!(ExponentProfile::new(vec![qi(1)], vec![qi(1), qi(1)]).is_err());
        assert!(ExponentProfile::new(vec![qi(0)], vec![qi(1)]).is_err());
        let p = profile(&[(1, 2), (1, 2)], &[(1, 1), (1, 1)]);
        assert!(p.is_isotropic());
        assert!(p.sum_condition_holds());
        let p = profile(&[(1, 2), (1, 3)], &[(1, 1), (1, 1)]);
        assert!(!p.is_isotropic());
        assert!(!p.sum_condition_holds());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold(2).unwrap(), qi(2));
        assert_eq!(threshold(3).unwrap(), qi(1));
        assert_eq!(threshold(1), Err(Error::NoThresholdInDimensionOne));
        assert_eq!(regime(2, &qi(1)).unwrap(), Regime::InnerSensitive);
        assert_eq!(regime(2, &qi(2)).unwrap(), Regime::Boundary);
        assert_eq!(regime(3, &qi(2)).unwrap(), Regime::Insensitive);

        let big = qi(1_000_000);
        let r = dim_isotropic(2, &qi(1), &big).unwrap();
        assert_eq!(r.value, q(1_000_003, 1_000_002));
        assert!((crate::numeric::to_f64(&r.value) - 1.0000010).abs() < 1e-7);
    }

    #[test]
    fn exact_order_examples() {
        let b = exact_order_upper_bound(2, &qi(1), &qi(1)).unwrap();
        assert_eq!(b.bound, q(4, 3));
        assert_eq!(b.comparison, q(3, 2));

        let b = exact_order_upper_bound(2, &qi(1), &q(1, 1_000_000_000)).unwrap();
        assert!((crate::numeric::to_f64(&b.bound) - 1.5).abs() < 1e-9);
        assert!(b.bound < b.comparison);

        let b = exact_order_upper_bound(3, &q(1, 2), &qi(2)).unwrap();
        assert_eq!(b.bound, q(16, 7));

        assert!(matches!(
            exact_order_upper_bound(2, &qi(2), &qi(1)),
            Err(Error::RegimeNotCovered(_))
        ));
        assert!(exact_order_upper_bound(1, &qi(1), &qi(1)).is_err());
    }
}

//! Mass-transference machinery for rectangles: the Wang–Wu lower bound,
//! the exponent selection that feeds it from an [`ExponentProfile`], the
//! shift and series conditions, and the perturbed-approximation dimension.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::formulas::{jarnik_value, Branch, DimensionResult, ExponentProfile, Hypotheses};
use crate::interval::Interval;
use crate::numeric::{pow_bracket, qi, Q};

// ---------------------------------------------------------------------------
// Wang–Wu bound
// ---------------------------------------------------------------------------

/// Index partition `(K1, K2, K3)` of `{0..n}` at one candidate `A`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    pub k1: Vec<usize>,
    pub k2: Vec<usize>,
    pub k3: Vec<usize>,
}

impl Partition {
    /// `K1 = {a_j >= A}`, `K2 = {a_j + t_j <= A} \ K1`, `K3` the rest.
    pub fn at(a: &[Q], t: &[Q], big_a: &Q) -> Self {
        let mut p = Partition::default();
        for j in 0..a.len() {
            if a[j] >= *big_a {
                p.k1.push(j);
            } else if &a[j] + &t[j] <= *big_a {
                p.k2.push(j);
            } else {
                p.k3.push(j);
            }
        }
        p
    }

    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for &j in self.k1.iter().chain(&self.k2).chain(&self.k3) {
            if j >= n || seen[j] {
                return false;
            }
            seen[j] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[usize]| {
            v.iter()
                .map(|j| (j + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "K1={{{}}} K2={{{}}} K3={{{}}}", show(&self.k1), show(&self.k2), show(&self.k3))
    }
}

/// Inputs of the rectangles-to-rectangles transference bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MtpInstance {
    delta: Vec<Q>,
    a: Vec<Q>,
    t: Vec<Q>,
    kappa: Q,
}

impl MtpInstance {
    pub fn new(delta: Vec<Q>, a: Vec<Q>, t: Vec<Q>, kappa: Q) -> Result<Self> {
        let n = delta.len();
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
        }
        for v in [&a, &t] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        if delta.iter().any(|d| !d.is_positive()) {
            return Err(Error::InvalidParameter("delta_i must be positive".into()));
        }
        if a.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidParameter("a_i must be positive".into()));
        }
        if t.iter().any(|x| x.is_negative()) {
            return Err(Error::InvalidParameter("t_i must be nonnegative".into()));
        }
        if kappa.is_negative() || kappa > Q::one() {
            return Err(Error::InvalidParameter(format!("kappa = {kappa} not in [0,1]")));
        }
        Ok(Self { delta, a, t, kappa })
    }

    /// Lebesgue-like coordinates (`δ_i = 1`) and `κ = 0`.
    pub fn lebesgue(a: Vec<Q>, t: Vec<Q>) -> Result<Self> {
        let n = a.len();
        Self::new(vec![Q::one(); n], a, t, Q::zero())
    }

    pub fn n(&self) -> usize {
        self.delta.len()
    }

    pub fn delta(&self) -> &[Q] {
        &self.delta
    }

    pub fn a(&self) -> &[Q] {
        &self.a
    }

    pub fn t(&self) -> &[Q] {
        &self.t
    }

    pub fn kappa(&self) -> &Q {
        &self.kappa
    }

    /// Distinct candidates `A = {a_i + t_i}` ascending, each with the
    /// smallest index attaining it.
    pub fn candidates(&self) -> Vec<(Q, usize)> {
        let mut c: Vec<(Q, usize)> = (0..self.n()).map(|i| (&self.a[i] + &self.t[i], i)).collect();
        c.sort();
        c.dedup_by(|x, y| x.0 == y.0);
        c
    }

    /// Value of the bound's bracket at one candidate `A`.
    pub fn evaluate_at(&self, big_a: &Q) -> (Q, Partition) {
        let p = Partition::at(&self.a, &self.t, big_a);
        let sum = |ix: &[usize], f: &dyn Fn(usize) -> Q| ix.iter().map(|&j| f(j)).sum::<Q>();
        let d = |j: usize| self.delta[j].clone();
        let mut v = sum(&p.k1, &d) + sum(&p.k2, &d) + &self.kappa * sum(&p.k3, &d);
        let frac = (sum(&p.k3, &|j| &self.a[j] * &self.delta[j]) - sum(&p.k2, &|j| &self.t[j] * &self.delta[j]))
            / big_a;
        v += (Q::one() - &self.kappa) * frac;
        (v, p)
    }
}

/// One row of the minimisation in [`ww_lower_bound`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WwTerm {
    pub big_a: Q,
    pub index: usize,
    pub value: Q,
    pub partition: Partition,
}

pub fn ww_terms(inst: &MtpInstance) -> Vec<WwTerm> {
    inst.candidates()
        .into_iter()
        .map(|(big_a, index)| {
            let (value, partition) = inst.evaluate_at(&big_a);
            WwTerm { big_a, index, value, partition }
        })
        .collect()
}

/// Lower bound for the dimension of the limsup set of shrunk rectangles.
/// `witness_j` is the coordinate whose `a_j + t_j` realises `A*`.
pub fn ww_lower_bound(inst: &MtpInstance) -> DimensionResult {
    let mut terms = ww_terms(inst);
    let mut best = 0;
    let mut tie = false;
    for (i, term) in terms.iter().enumerate().skip(1) {
        if term.value < terms[best].value {
            best = i;
            tie = false;
        } else if term.value == terms[best].value {
            tie = true;
        }
    }
    let w = terms.swap_remove(best);
    DimensionResult {
        value: w.value,
        branch: Branch::WangWu { a_star: w.big_a, partition: w.partition },
        witness_j: Some(w.index),
        witness_k: None,
        tie,
        hypotheses: Hypotheses::Satisfied,
    }
}

// ---------------------------------------------------------------------------
// Weighted simultaneous approximation oracle
// ---------------------------------------------------------------------------

/// Closed-form dimension of weighted simultaneously `τ`-approximable points:
/// `min_j (n+1+Σ_{τ_i<τ_j}(τ_j-τ_i))/(1+τ_j)`. Cross-check only.
pub fn rynne_oracle(tau: &[Q]) -> Result<DimensionResult> {
    let n = tau.len();
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
    }
    if tau.iter().any(|t| !t.is_positive()) {
        return Err(Error::InvalidParameter("tau_i must be positive".into()));
    }
    let mut best: Option<(Q, usize)> = None;
    let mut tie = false;
    for (j, tj) in tau.iter().enumerate() {
        let excess: Q = tau.iter().filter(|ti| *ti < tj).map(|ti| tj - ti).sum();
        let v = (qi(n as i64 + 1) + excess) / (Q::one() + tj);
        match &best {
            Some((b, _)) if v > *b => {}
            Some((b, _)) if v == *b => tie = true,
            _ => {
                best = Some((v, j));
                tie = false;
            }
        }
    }
    let (value, j) = best.expect("n >= 1");
    let hypotheses = if tau.iter().sum::<Q>() >= Q::one() {
        Hypotheses::Satisfied
    } else {
        Hypotheses::Outside("sum of tau < 1".into())
    };
    Ok(DimensionResult {
        value,
        branch: Branch::Min,
        witness_j: Some(j),
        witness_k: None,
        tie,
        hypotheses,
    })
}

// ---------------------------------------------------------------------------
// Exponent selection
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionCase {
    /// Every `τψ_i >= 1/n`: uniform weights `b_i = 1/n`.
    AllLarge,
    /// Some `τψ_i < 1/n`: the `ℓ` largest exponents share a common weight.
    EllSplit,
}

impl fmt::Display for SelectionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionCase::AllLarge => "all-large",
            SelectionCase::EllSplit => "ell-split",
        })
    }
}

/// Full-measure weights `b` (summing to one) with `b_i <= τψ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weights {
    pub b: Vec<Q>,
    pub case_tag: SelectionCase,
    /// Number of coordinates sharing the common weight (ell-split only).
    pub ell: Option<usize>,
    /// `order[r]` is the original index of the `r`-th largest `τψ`.
    pub order: Vec<usize>,
    /// Set when no `ℓ` satisfied the strict inequality and the non-strict
    /// one was used instead (only when `Σ τψ_i = 1` exactly).
    pub nonstrict: bool,
}

/// `a = 1 + b` and stretch `t` for the lower bound of one fixed `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentSelection {
    pub j: usize,
    pub b: Vec<Q>,
    pub a: Vec<Q>,
    pub t: Vec<Q>,
    pub case_tag: SelectionCase,
    pub ell: Option<usize>,
    pub nonstrict: bool,
}

impl ExponentSelection {
    pub fn instance(&self) -> MtpInstance {
        MtpInstance::lebesgue(self.a.clone(), self.t.clone()).expect("selection yields a valid instance")
    }
}

pub fn select_weights(tau_psi: &[Q]) -> Result<Weights> {
    let n = tau_psi.len();
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
    }
    let total: Q = tau_psi.iter().sum();
    if total < Q::one() {
        return Err(Error::SelectionUndefined(format!("sum of tau_psi = {total} < 1")));
    }
    // Stable descending sort, remembering where each coordinate came from.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| tau_psi[y].cmp(&tau_psi[x]));
    let sorted: Vec<&Q> = order.iter().map(|&i| &tau_psi[i]).collect();

    let inv_n = Q::new(1.into(), (n as i64).into());
    if tau_psi.iter().all(|t| *t >= inv_n) {
        return Ok(Weights {
            b: vec![inv_n; n],
            case_tag: SelectionCase::AllLarge,
            ell: None,
            order,
            nonstrict: false,
        });
    }

    let level = |ell: usize| -> Q {
        let tail: Q = sorted[ell..].iter().copied().sum();
        (Q::one() - tail) / qi(ell as i64)
    };
    let largest = |strict: bool| {
        (1..n).rev().find(|&ell| {
            let lv = level(ell);
            if strict {
                *sorted[ell - 1] > lv
            } else {
                *sorted[ell - 1] >= lv
            }
        })
    };
    let (ell, nonstrict) = match largest(true) {
        Some(ell) => (ell, false),
        None => match largest(false) {
            Some(ell) => (ell, true),
            None => {
                return Err(Error::SelectionUndefined(format!(
                    "no ell in 1..{} for tau_psi = {:?}",
                    n - 1,
                    tau_psi.iter().map(|t| t.to_string()).collect::<Vec<_>>()
                )))
            }
        },
    };
    let common = level(ell);
    let mut b = vec![Q::zero(); n];
    for (rank, &orig) in order.iter().enumerate() {
        b[orig] = if rank < ell { common.clone() } else { tau_psi[orig].clone() };
    }
    Ok(Weights {
        b,
        case_tag: SelectionCase::EllSplit,
        ell: Some(ell),
        order,
        nonstrict,
    })
}

/// Exponents `(a, t)` realising the lower bound for the shifted-rectangle
/// family in coordinate `j`.
pub fn select_exponents(profile: &ExponentProfile, j: usize) -> Result<ExponentSelection> {
    profile.check_index(j)?;
    let w = select_weights(profile.tau_psi())?;
    let t: Vec<Q> = (0..profile.n())
        .map(|i| {
            let target = if i == j {
                &profile.tau_psi()[i] + &profile.tau_phi()[i]
            } else {
                profile.tau_psi()[i].clone()
            };
            target - &w.b[i]
        })
        .collect();
    let sum_b: Q = w.b.iter().sum();
    if sum_b != Q::one() || t.iter().any(|x| x.is_negative()) || w.b.iter().any(|x| !x.is_positive()) {
        return Err(Error::SelectionUndefined(format!(
            "selection invariants violated: sum b = {sum_b}, t = {:?}",
            t.iter().map(|x| x.to_string()).collect::<Vec<_>>()
        )));
    }
    let a = w.b.iter().map(|bi| Q::one() + bi).collect();
    Ok(ExponentSelection {
        j,
        b: w.b,
        a,
        t,
        case_tag: w.case_tag,
        ell: w.ell,
        nonstrict: w.nonstrict,
    })
}

/// Weighted simultaneous approximation with exponents `τ`: the same weights,
/// stretched by `τ` alone (no thickness exponent anywhere).
pub fn weighted_instance(tau: &[Q]) -> Result<MtpInstance> {
    let w = select_weights(tau)?;
    let t: Vec<Q> = tau.iter().zip(&w.b).map(|(ti, bi)| ti - bi).collect();
    if t.iter().any(|x| x.is_negative()) || w.b.iter().any(|x| !x.is_positive()) {
        return Err(Error::SelectionUndefined("weights exceed tau".into()));
    }
    MtpInstance::lebesgue(w.b.iter().map(|bi| Q::one() + bi).collect(), t)
}

/// `max_j` of the Wang–Wu bound over the selections for each `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MtpLowerBound {
    pub value: Q,
    pub witness_j: usize,
    pub per_j: Vec<DimensionResult>,
    pub selections: Vec<ExponentSelection>,
}

pub fn mtp_lower_bound(profile: &ExponentProfile) -> Result<MtpLowerBound> {
    let selections = (0..profile.n())
        .map(|j| select_exponents(profile, j))
        .collect::<Result<Vec<_>>>()?;
    let per_j: Vec<DimensionResult> = selections.iter().map(|s| ww_lower_bound(&s.instance())).collect();
    let mut wj = 0;
    for j in 1..per_j.len() {
        if per_j[j].value > per_j[wj].value {
            wj = j;
        }
    }
    Ok(MtpLowerBound {
        value: per_j[wj].value.clone(),
        witness_j: wj,
        per_j,
        selections,
    })
}

// ---------------------------------------------------------------------------
// Shift vectors and conditions
// ---------------------------------------------------------------------------

/// Centre shift moving the `j`-th slab of a rectangular annulus onto a
/// rectangle: `(2-φ_j(q))ψ_j(q)/(2q)` in coordinate `j`, zero elsewhere.
pub fn shifted_rect_gamma(profile: &ExponentProfile, j: usize, q: u64, bits: u32) -> Result<Vec<Interval>> {
    profile.check_index(j)?;
    if q == 0 {
        return Err(Error::InvalidParameter("q must be >= 1".into()));
    }
    let psi_over_q = pow_bracket(q, &-(Q::one() + &profile.tau_psi()[j]), bits)?;
    let phi = pow_bracket(q, &-profile.tau_phi()[j].clone(), bits)?;
    let two = Interval::exact(qi(2));
    let g = (&(&two - &phi) * &psi_over_q).scale(&Q::new(1.into(), 2.into()));
    Ok((0..profile.n())
        .map(|i| if i == j { g.clone() } else { Interval::zero() })
        .collect())
}

/// Decay of a shift sequence, `|γ(q)| <= C q^{-g}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecayDescriptor {
    Zero,
    PowerLaw { constant: Q, exponent: Q },
    /// Anything not of power-law form; conditions cannot be decided.
    Other(String),
}

impl DecayDescriptor {
    pub fn power_law(exponent: Q) -> Self {
        DecayDescriptor::PowerLaw { constant: Q::one(), exponent }
    }
}

/// `limsup |γ(q)| q^{req} < ∞` for a power-law shift; equality of exponents
/// is allowed (the limsup is then the constant).
pub fn check_shift_condition(decay: &DecayDescriptor, exponent_req: &Q) -> Result<bool> {
    match decay {
        DecayDescriptor::Zero => Ok(true),
        DecayDescriptor::PowerLaw { exponent, .. } => Ok(exponent >= exponent_req),
        DecayDescriptor::Other(what) => Err(Error::Unsupported(format!(
            "shift condition needs a power-law decay, got {what}"
        ))),
    }
}

/// Per-coordinate shift conditions for the shifted-rectangle family of a
/// selection: radii `r = q^{-1}`, so the requirement in coordinate `i` is
/// decay exponent `a_i = 1 + b_i`.
pub fn selection_shift_conditions(profile: &ExponentProfile, sel: &ExponentSelection) -> Result<Vec<bool>> {
    (0..profile.n())
        .map(|i| {
            let decay = if i == sel.j {
                DecayDescriptor::power_law(Q::one() + &profile.tau_psi()[i])
            } else {
                DecayDescriptor::Zero
            };
            check_shift_condition(&decay, &sel.a[i])
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Perturbed approximation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesClass {
    Divergent,
    Convergent,
}

impl fmt::Display for SeriesClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesClass::Divergent => "divergent",
            SeriesClass::Convergent => "convergent",
        })
    }
}

/// Classifies `Σ_q q^n f(ψ(q)/q)` for `f(r) = r^s`, `ψ(q) = q^{-τψ}`: the
/// summand is `q^{n-(1+τψ)s}`, divergent iff that exponent is `>= -1`.
pub fn classify_hf_series(n: usize, tau_psi: &Q, s: &Q) -> Result<SeriesClass> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
    }
    if !s.is_positive() {
        return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
    }
    let exponent = qi(n as i64) - (Q::one() + tau_psi) * s;
    Ok(if exponent >= qi(-1) {
        SeriesClass::Divergent
    } else {
        SeriesClass::Convergent
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PerturbedDimension {
    Known(Box<DimensionResult>),
    /// Outside the hypotheses of the perturbed corollary.
    Unknown(String),
}

impl PerturbedDimension {
    pub fn value(&self) -> Option<&Q> {
        match self {
            PerturbedDimension::Known(r) => Some(&r.value),
            PerturbedDimension::Unknown(_) => None,
        }
    }
}

/// Dimension of points approximable by rationals whose centres are shifted
/// by `γ(p,q)/q`, when `|γ|` decays at least like `q^{-1/n}`.
pub fn dim_perturbed(n: usize, tau_psi: &Q, decay: &DecayDescriptor) -> Result<PerturbedDimension> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
    }
    if !tau_psi.is_positive() {
        return Err(Error::InvalidParameter("tau_psi must be positive".into()));
    }
    let inv_n = Q::new(1.into(), (n as i64).into());
    if *tau_psi < inv_n {
        return Ok(PerturbedDimension::Unknown(format!("tau_psi = {tau_psi} < 1/n")));
    }
    match check_shift_condition(decay, &inv_n) {
        Ok(true) => Ok(PerturbedDimension::Known(Box::new(DimensionResult {
            value: jarnik_value(n, tau_psi),
            branch: Branch::Corollary,
            witness_j: None,
            witness_k: None,
            tie: false,
            hypotheses: Hypotheses::Satisfied,
        }))),
        Ok(false) => Ok(PerturbedDimension::Unknown(
            "shift decays slower than q^(-1/n)".into(),
        )),
        Err(e) => Ok(PerturbedDimension::Unknown(e.to_string())),
    }
}

//! Directional derivatives along field increments, and the sublinearity test
//! for the derivative as a function of direction.
//!
//! The derivative at x0 in direction h is the limit of difference quotients
//! q(t) = (f(x0+th) - f(x0))/t as t ↓ 0 through the field. For convex f the
//! quotient is nondecreasing in t, so probing along t = 2^{-k} (dyadics lie
//! in every supported field) yields a monotone, self-validating sequence:
//! any increase along the way refutes convexity of the oracle.

use serde::Serialize;

use crate::convexity::{CheckReport, Verdict, Witness};
use crate::error::{Error, Result};
use crate::field::{dyadic_probes, FieldSpec};
use crate::geom::{BoxDomain, Point};
use crate::oracle::FunctionOracle;
use crate::scalar::{Scalar, ScalarMode};

/// A directional-derivative estimate with its convergence bracket.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeResult {
    /// The final (smallest-t) difference quotient; an upper bound for the
    /// true derivative of a convex oracle.
    pub value: Scalar,
    /// [q(t_last), q(t_prev)]: the last two quotients. Their gap measures
    /// convergence; it collapses to zero width when the quotient has
    /// stabilized (kinks stabilize exactly).
    pub bracket: (Scalar, Scalar),
    /// Linear extrapolation 2·q(t_last) - q(t_prev): a lower estimate that
    /// is exact whenever the quotient is affine in t (true for quadratic
    /// oracles and, trivially, for stabilized kinks).
    pub extrapolated: Scalar,
    /// The smallest scale actually probed.
    pub t_min: Scalar,
    /// How many quotients were evaluated.
    pub probes: u32,
}

/// Either a converged derivative estimate or the first monotonicity break:
/// the scale where the quotient rose and the offending pair of values.
pub(crate) enum QuotientWalk {
    Derivative(DerivativeResult),
    MonotoneViolation {
        t: Scalar,
        q_new: Scalar,
        q_prev: Scalar,
    },
}

/// Walks the difference quotients and reports either the derivative estimate
/// or the first violation of quotient monotonicity, leaving the caller to
/// decide whether a violation is an error or a refutation witness.
pub(crate) fn quotient_walk(
    f: &FunctionOracle,
    dom: &BoxDomain,
    x0: &Point,
    h: &Point,
    field: &FieldSpec,
    k_max: u32,
    tau: f64,
) -> Result<QuotientWalk> {
    let mode = dom.mode();
    dom.validate()?;
    f.validate(mode, dom.dim())?;
    if x0.dim() != dom.dim() || h.dim() != dom.dim() {
        return Err(Error::DimensionMismatch {
            expected: dom.dim(),
            got: x0.dim().max(h.dim()),
        });
    }
    if !dom.contains(x0) {
        return Err(Error::OutsideDomain(x0.render()));
    }
    let skippable = f.carrier().is_some();
    let f0 = f.eval(x0)?;

    let mut quotients: Vec<(Scalar, Scalar)> = Vec::new(); // (t, q(t))
    let mut any_probe_in_domain = false;
    for t in dyadic_probes(k_max, mode) {
        if !field.contains(&t) {
            continue;
        }
        let x = x0.add(&h.scale(&t));
        if !dom.contains(&x) {
            continue;
        }
        any_probe_in_domain = true;
        let fx = match f.eval(&x) {
            Ok(v) => v,
            Err(Error::OffCarrier(_)) if skippable => continue,
            Err(e) => return Err(e),
        };
        let q = &(&fx - &f0) / &t;
        if let Some((_, prev)) = quotients.last() {
            if !q.le_tol(prev, tau) {
                return Ok(QuotientWalk::MonotoneViolation {
                    t,
                    q_new: q,
                    q_prev: prev.clone(),
                });
            }
        }
        quotients.push((t, q));
    }
    if !any_probe_in_domain {
        return Err(Error::NoProbeInDomain);
    }
    if quotients.is_empty() {
        return Err(Error::EmptySample(
            "no derivative probe evaluable on the tabulated carrier".into(),
        ));
    }
    let (t_last, q_last) = quotients.last().expect("nonempty").clone();
    let q_prev = if quotients.len() >= 2 {
        quotients[quotients.len() - 2].1.clone()
    } else {
        q_last.clone()
    };
    let two = Scalar::from_int(2, mode);
    let extrapolated = &(&two * &q_last) - &q_prev;
    Ok(QuotientWalk::Derivative(DerivativeResult {
        value: q_last.clone(),
        bracket: (q_last, q_prev),
        extrapolated,
        t_min: t_last,
        probes: quotients.len() as u32,
    }))
}

/// Difference quotients along t = 2^{-k}, k ≤ k_max, intersected with the
/// field and the domain. Quotients must be nonincreasing as t shrinks
/// (within τ in Float mode); an increase is reported as a non-convex oracle.
///
/// Probes falling off a tabulated oracle's carrier are skipped; the result
/// then reflects the carrier's finest available scale.
pub fn directional_derivative(
    f: &FunctionOracle,
    dom: &BoxDomain,
    x0: &Point,
    h: &Point,
    field: &FieldSpec,
    k_max: u32,
    tau: f64,
) -> Result<DerivativeResult> {
    match quotient_walk(f, dom, x0, h, field, k_max, tau)? {
        QuotientWalk::Derivative(r) => Ok(r),
        QuotientWalk::MonotoneViolation { t, .. } => Err(Error::NonConvexOracle(t.render())),
    }
}

/// The plausible range for the true derivative backing a result: between the
/// linear extrapolation and the final quotient.
fn estimate_interval(r: &DerivativeResult) -> (Scalar, Scalar) {
    (r.extrapolated.clone(), r.value.clone())
}

fn intervals_overlap(a: &(Scalar, Scalar), b: &(Scalar, Scalar), tau: f64) -> bool {
    let lo = if a.0.cmp_same_mode(&b.0) == std::cmp::Ordering::Greater {
        &a.0
    } else {
        &b.0
    };
    let hi = if a.1.cmp_same_mode(&b.1) == std::cmp::Ordering::Less {
        &a.1
    } else {
        &b.1
    };
    lo.le_tol(hi, tau)
}

/// Checks that h ↦ f'(x0, h) is sublinear on the sampled directions:
/// subadditive over all direction pairs, and positively homogeneous over the
/// field's sampled positive scalars (within bracket error).
///
/// Witness slots on failure: subadditivity stores the two directions in
/// (x, y) with t = 1 and the two quotient values in (lhs, rhs); homogeneity
/// stores (h, λh) with t = λ and the disjoint interval endpoints.
pub fn sublinearity_test(
    f: &FunctionOracle,
    dom: &BoxDomain,
    x0: &Point,
    directions: &[Point],
    field: &FieldSpec,
    k_max: u32,
    tau: f64,
) -> Result<CheckReport> {
    if directions.is_empty() {
        return Err(Error::InvalidSpec(
            "sublinearity needs at least one direction".into(),
        ));
    }
    let mode = dom.mode();
    let mut checked: u64 = 0;
    let derive = |h: &Point| directional_derivative(f, dom, x0, h, field, k_max, tau);

    // Subadditivity over unordered direction pairs (including h with itself).
    for (i, h1) in directions.iter().enumerate() {
        for h2 in directions.iter().skip(i) {
            let d1 = derive(h1)?;
            let d2 = derive(h2)?;
            let d12 = derive(&h1.add(h2))?;
            checked += 1;
            // The sum's lower estimate must not exceed the parts' final
            // quotients: extrapolation below, finals above.
            let lhs = d12.extrapolated;
            let rhs = &d1.value + &d2.value;
            if !lhs.le_tol(&rhs, tau) {
                return Ok(fail_report(
                    h1.clone(),
                    h2.clone(),
                    Scalar::one(mode),
                    lhs,
                    rhs,
                    checked,
                    mode,
                    tau,
                ));
            }
        }
    }

    // Positive homogeneity over the field's unit-interval scalars.
    let lambdas: Vec<Scalar> = field
        .enumerate_unit_interval(mode)?
        .into_iter()
        .filter(|l| !l.is_zero())
        .collect();
    for h in directions {
        let base = derive(h)?;
        let base_iv = estimate_interval(&base);
        for lambda in &lambdas {
            let scaled = derive(&h.scale(lambda))?;
            let scaled_iv = estimate_interval(&scaled);
            let expected = (&base_iv.0 * lambda, &base_iv.1 * lambda);
            checked += 1;
            if !intervals_overlap(&scaled_iv, &expected, tau) {
                return Ok(fail_report(
                    h.clone(),
                    h.scale(lambda),
                    lambda.clone(),
                    scaled_iv.0,
                    expected.1,
                    checked,
                    mode,
                    tau,
                ));
            }
        }
    }

    Ok(CheckReport {
        verdict: Verdict::Pass,
        witness: None,
        samples_checked: checked,
        mode,
        tolerance: tau,
    })
}

#[allow(clippy::too_many_arguments)]
fn fail_report(
    x: Point,
    y: Point,
    t: Scalar,
    lhs: Scalar,
    rhs: Scalar,
    checked: u64,
    mode: ScalarMode,
    tau: f64,
) -> CheckReport {
    CheckReport {
        verdict: Verdict::Fail,
        witness: Some(Witness { x, y, t, lhs, rhs }),
        samples_checked: checked,
        mode,
        tolerance: tau,
    }
}

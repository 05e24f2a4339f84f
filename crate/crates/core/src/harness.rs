//! Joint harness for the three faces of strong convexity: the combination
//! inequality, the strengthened subgradient inequality through directional
//! derivatives, and the existence of supporting functionals.
//!
//! In exact arithmetic on a common grid the three verdicts coincide for
//! honest inputs; the report carries an agreement flag and a caveat because
//! each check samples differently (the combination check evaluates between
//! grid points, the support search only constrains on them), so disagreement
//! at a fixed resolution is possible and meaningful.

use serde::Serialize;

use crate::convexity::{check_points, check_strong_convexity, CheckReport, Verdict, Witness};
use crate::derivative::{quotient_walk, QuotientWalk};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, TSet};
use crate::geom::BoxDomain;
use crate::modulus::Modulus;
use crate::oracle::FunctionOracle;
use crate::scalar::Scalar;
use crate::support::{support_search, SupportResult, SupportStatus};

/// Fixed wording embedded in every report.
pub const SAMPLING_CAVEAT: &str = "verdicts are sampled on a finite grid and a truncated field; \
     Pass means not refuted at this resolution, and the three checks probe \
     different points, so they can disagree off-sample";

/// Aggregate of the per-point support searches.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportSummary {
    pub verdict: Verdict,
    /// Base points searched.
    pub searched: usize,
    /// Searches that produced a functional.
    pub found: usize,
    /// Searches with no informative constraints.
    pub unbounded: usize,
    /// The first base point where no functional exists, if any.
    pub first_infeasible: Option<SupportResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// Combination inequality over field-restricted weights.
    pub convexity: CheckReport,
    /// f(x) ≥ f(x0) + f'(x0, x-x0) + α(x-x0) over ordered grid pairs.
    pub subgradient: CheckReport,
    /// Supporting-functional existence at every grid point.
    pub support: SupportSummary,
    /// Whether all three verdicts agree.
    pub consistent: bool,
    pub caveat: &'static str,
}

/// Runs all three checks on a shared grid and reports their agreement.
///
/// The subgradient check uses the extrapolated derivative estimate; pairs
/// whose derivative cannot be probed on a tabulated carrier are skipped. A
/// quotient-monotonicity violation found along the way already refutes
/// convexity and is reported as a failure witness (the offending quotient
/// pair in the value slots).
pub fn equivalence_suite(
    f: &FunctionOracle,
    alpha: &Modulus,
    dom: &BoxDomain,
    field: &FieldSpec,
    grid: usize,
    k_max: u32,
    tau: f64,
) -> Result<EquivalenceReport> {
    let mode = dom.mode();
    let convexity = check_strong_convexity(
        f,
        alpha,
        dom,
        &TSet::FieldRestricted {
            field: field.clone(),
        },
        grid,
        tau,
    )?;

    let pts = check_points(f, dom, grid)?;
    let one = Scalar::one(mode);

    // Strengthened subgradient inequality at ordered grid pairs.
    let mut subgradient: Option<CheckReport> = None;
    let mut pairs_checked: u64 = 0;
    'outer: for x0 in &pts {
        let f0 = f.eval(x0)?;
        for x in &pts {
            if x == x0 {
                continue;
            }
            let h = x.sub(x0);
            let walk = match quotient_walk(f, dom, x0, &h, field, k_max, tau) {
                Ok(w) => w,
                Err(Error::EmptySample(_)) => continue,
                Err(e) => return Err(e),
            };
            pairs_checked += 1;
            let witness = match walk {
                QuotientWalk::Derivative(d) => {
                    let lhs = &(&f0 + &d.extrapolated) + &alpha.eval(&h)?;
                    let fx = f.eval(x)?;
                    if lhs.le_tol(&fx, tau) {
                        continue;
                    }
                    Witness {
                        x: x0.clone(),
                        y: x.clone(),
                        t: one.clone(),
                        lhs,
                        rhs: fx,
                    }
                }
                QuotientWalk::MonotoneViolation { t, q_new, q_prev } => Witness {
                    x: x0.clone(),
                    y: x.clone(),
                    t,
                    lhs: q_new,
                    rhs: q_prev,
                },
            };
            subgradient = Some(CheckReport {
                verdict: Verdict::Fail,
                witness: Some(witness),
                samples_checked: pairs_checked,
                mode,
                tolerance: tau,
            });
            break 'outer;
        }
    }
    let subgradient = match subgradient {
        Some(r) => r,
        None if pairs_checked == 0 => {
            return Err(Error::EmptySample(
                "no grid pair admits a derivative probe".into(),
            ))
        }
        None => CheckReport {
            verdict: Verdict::Pass,
            witness: None,
            samples_checked: pairs_checked,
            mode,
            tolerance: tau,
        },
    };

    // Supporting functional at every grid point, constrained by the grid.
    let mut found = 0usize;
    let mut unbounded = 0usize;
    let mut first_infeasible: Option<SupportResult> = None;
    for x0 in &pts {
        let r = support_search(f, alpha, dom, x0, &pts, tau)?;
        match r.status {
            SupportStatus::Found { .. } => found += 1,
            SupportStatus::Unbounded => unbounded += 1,
            SupportStatus::Infeasible { .. } => {
                if first_infeasible.is_none() {
                    first_infeasible = Some(r);
                }
            }
        }
    }
    let support = SupportSummary {
        verdict: if first_infeasible.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        searched: pts.len(),
        found,
        unbounded,
        first_infeasible,
    };

    let consistent =
        convexity.verdict == subgradient.verdict && subgradient.verdict == support.verdict;
    Ok(EquivalenceReport {
        convexity,
        subgradient,
        support,
        consistent,
        caveat: SAMPLING_CAVEAT,
    })
}

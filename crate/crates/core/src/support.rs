//! Search for a supporting linear functional: some φ with
//! f(x) ≥ f(x0) + φ(x-x0) + α(x-x0) across a sample of the domain.
//!
//! Each sample point contributes one linear constraint on the coefficients
//! of φ. Dimension 1 intersects the slope intervals directly; higher
//! dimensions run exact Fourier–Motzkin elimination with redundancy pruning,
//! acceptable at desk scale (d ≤ 4, a few hundred samples). Infeasibility
//! comes with a certificate — the sample points whose constraints combine to
//! an impossible 0 ≤ negative — which refutes strong convexity on the sample.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{BoxDomain, LinearFunctional, Point};
use crate::modulus::Modulus;
use crate::oracle::FunctionOracle;
use crate::scalar::{Scalar, ScalarMode};

/// Outcome of the search at one base point.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum SupportStatus {
    /// A functional satisfying every sampled constraint.
    Found { phi: LinearFunctional },
    /// No functional exists; the certificate lists the sample points whose
    /// constraints are jointly unsatisfiable (a pair in dimension 1).
    Infeasible { certificate: Vec<Point> },
    /// Nothing constrains the functional (no informative sample).
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportResult {
    pub status: SupportStatus,
    pub x0: Point,
    pub constraints_used: usize,
}

impl SupportResult {
    pub fn found(&self) -> bool {
        matches!(self.status, SupportStatus::Found { .. })
    }
}

/// One linear constraint Σ coefs[i]·φ_i ≤ rhs, remembering which original
/// sample constraints it was combined from.
#[derive(Clone, Debug)]
struct Row {
    coefs: Vec<Scalar>,
    rhs: Scalar,
    provenance: BTreeSet<usize>,
}

impl Row {
    fn is_trivial(&self) -> bool {
        self.coefs.iter().all(Scalar::is_zero)
    }

    /// Scales so the first nonzero coefficient is ±1, for deduplication.
    fn normalized_key(&self) -> String {
        let lead = self.coefs.iter().find(|c| !c.is_zero());
        match lead {
            None => format!("!{}", self.rhs.render()),
            Some(lead) => {
                let scale = lead.abs();
                let parts: Vec<String> = self
                    .coefs
                    .iter()
                    .map(|c| (c / &scale).render())
                    .chain(std::iter::once((&self.rhs / &scale).render()))
                    .collect();
                parts.join("|")
            }
        }
    }
}

/// Searches for a functional supporting f at x0 over the sampled constraints
/// { φ·(x-x0) ≤ f(x) - f(x0) - α(x-x0) : x ∈ sample }.
///
/// Dimension ≥ 2 requires Exact mode: the elimination has no pivoting
/// tolerance, so float coefficients would make certificates meaningless.
pub fn support_search(
    f: &FunctionOracle,
    alpha: &Modulus,
    dom: &BoxDomain,
    x0: &Point,
    sample: &[Point],
    tau: f64,
) -> Result<SupportResult> {
    let mode = dom.mode();
    dom.validate()?;
    f.validate(mode, dom.dim())?;
    alpha.validate(mode)?;
    if !dom.contains(x0) {
        return Err(Error::OutsideDomain(x0.render()));
    }
    for x in sample {
        if !dom.contains(x) {
            return Err(Error::OutsideDomain(x.render()));
        }
    }
    let d = dom.dim();
    if d >= 2 && mode != ScalarMode::Exact {
        return Err(Error::InvalidSpec(
            "support search in dimension ≥ 2 requires exact mode".into(),
        ));
    }

    let f0 = f.eval(x0)?;
    let mut rows: Vec<Row> = Vec::with_capacity(sample.len());
    for (idx, x) in sample.iter().enumerate() {
        let c = x.sub(x0);
        let rhs = &(&f.eval(x)? - &f0) - &alpha.eval(&c)?;
        rows.push(Row {
            coefs: c.0,
            rhs,
            provenance: BTreeSet::from([idx]),
        });
    }
    let constraints_used = rows.len();

    // Trivial rows (zero coefficients) are pure consistency conditions.
    let zero = Scalar::zero(mode);
    for row in &rows {
        if row.is_trivial() && zero.gt_margin(&row.rhs, tau) {
            return Ok(SupportResult {
                status: SupportStatus::Infeasible {
                    certificate: certificate_points(sample, &row.provenance),
                },
                x0: x0.clone(),
                constraints_used,
            });
        }
    }
    if rows.iter().all(Row::is_trivial) {
        return Ok(SupportResult {
            status: SupportStatus::Unbounded,
            x0: x0.clone(),
            constraints_used,
        });
    }

    let phi = if d == 1 {
        match solve_interval(&rows, 0, &[], mode, tau)? {
            IntervalOutcome::Value(v) => vec![v],
            IntervalOutcome::Conflict(prov) => {
                return Ok(SupportResult {
                    status: SupportStatus::Infeasible {
                        certificate: certificate_points(sample, &prov),
                    },
                    x0: x0.clone(),
                    constraints_used,
                })
            }
        }
    } else {
        match eliminate(rows, d, mode, tau)? {
            EliminationOutcome::Assignment(phi) => phi,
            EliminationOutcome::Conflict(prov) => {
                return Ok(SupportResult {
                    status: SupportStatus::Infeasible {
                        certificate: certificate_points(sample, &prov),
                    },
                    x0: x0.clone(),
                    constraints_used,
                })
            }
        }
    };

    // Re-verify before reporting: Found must satisfy every constraint.
    let functional = LinearFunctional(phi);
    for (idx, x) in sample.iter().enumerate() {
        let c = x.sub(x0);
        let lhs = functional.apply(&c);
        let bound = &(&f.eval(x)? - &f0) - &alpha.eval(&c)?;
        if !lhs.le_tol(&bound, tau) {
            return Err(Error::OracleMismatch(format!(
                "support functional fails re-verification at sample {idx}"
            )));
        }
    }
    Ok(SupportResult {
        status: SupportStatus::Found { phi: functional },
        x0: x0.clone(),
        constraints_used,
    })
}

fn certificate_points(sample: &[Point], provenance: &BTreeSet<usize>) -> Vec<Point> {
    provenance.iter().map(|&i| sample[i].clone()).collect()
}

enum IntervalOutcome {
    Value(Scalar),
    Conflict(BTreeSet<usize>),
}

/// Bounds variable `var` from rows whose other variables are already fixed
/// by `known` (values for variables 0..known.len(), all below `var`), then
/// picks the interval's representative: midpoint when bounded both sides,
/// the finite bound when half-infinite, zero when free.
fn solve_interval(
    rows: &[Row],
    var: usize,
    known: &[Scalar],
    mode: ScalarMode,
    tau: f64,
) -> Result<IntervalOutcome> {
    let mut lower: Option<(Scalar, &Row)> = None;
    let mut upper: Option<(Scalar, &Row)> = None;
    for row in rows {
        let a = &row.coefs[var];
        if a.is_zero() {
            continue;
        }
        // residual = rhs - Σ_{j<var} coef_j·known_j
        let mut residual = row.rhs.clone();
        for (j, v) in known.iter().enumerate() {
            residual = &residual - &(&row.coefs[j] * v);
        }
        let bound = &residual / a;
        if a.is_negative() {
            if lower
                .as_ref()
                .is_none_or(|(b, _)| bound.cmp_same_mode(b) == std::cmp::Ordering::Greater)
            {
                lower = Some((bound, row));
            }
        } else if upper
            .as_ref()
            .is_none_or(|(b, _)| bound.cmp_same_mode(b) == std::cmp::Ordering::Less)
        {
            upper = Some((bound, row));
        }
    }
    match (lower, upper) {
        (Some((lo, lo_row)), Some((hi, hi_row))) => {
            if lo.gt_margin(&hi, tau) {
                let mut prov = lo_row.provenance.clone();
                prov.extend(hi_row.provenance.iter().copied());
                return Ok(IntervalOutcome::Conflict(prov));
            }
            let two = Scalar::from_int(2, mode);
            Ok(IntervalOutcome::Value(&(&lo + &hi) / &two))
        }
        (Some((lo, _)), None) => Ok(IntervalOutcome::Value(lo)),
        (None, Some((hi, _))) => Ok(IntervalOutcome::Value(hi)),
        (None, None) => Ok(IntervalOutcome::Value(Scalar::zero(mode))),
    }
}

enum EliminationOutcome {
    Assignment(Vec<Scalar>),
    Conflict(BTreeSet<usize>),
}

/// Fourier–Motzkin: eliminates variables d-1 down to 1, keeping the system
/// before each elimination for back-substitution, then walks the variables
/// back up picking interval representatives.
fn eliminate(rows: Vec<Row>, d: usize, mode: ScalarMode, tau: f64) -> Result<EliminationOutcome> {
    let mut stages: Vec<Vec<Row>> = vec![rows];
    for var in (1..d).rev() {
        let current = stages.last().expect("at least the original system");
        let mut pos: Vec<&Row> = Vec::new();
        let mut neg: Vec<&Row> = Vec::new();
        let mut next: Vec<Row> = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for row in current {
            let a = &row.coefs[var];
            if a.is_zero() {
                let mut passed = row.clone();
                passed.coefs.truncate(var);
                if seen.insert(passed.normalized_key()) {
                    next.push(passed);
                }
            } else if a.is_negative() {
                neg.push(row);
            } else {
                pos.push(row);
            }
        }
        for up in &pos {
            let up_scale = &up.coefs[var];
            for lo in &neg {
                let lo_scale = lo.coefs[var].abs();
                // up/up_scale + lo/lo_scale cancels the eliminated variable.
                let coefs: Vec<Scalar> = (0..var)
                    .map(|j| &(&up.coefs[j] / up_scale) + &(&lo.coefs[j] / &lo_scale))
                    .collect();
                let rhs = &(&up.rhs / up_scale) + &(&lo.rhs / &lo_scale);
                let mut provenance = up.provenance.clone();
                provenance.extend(lo.provenance.iter().copied());
                let row = Row {
                    coefs,
                    rhs,
                    provenance,
                };
                if row.is_trivial() {
                    // 0 ≤ negative: the combination itself is the certificate.
                    if Scalar::zero(mode).gt_margin(&row.rhs, tau) {
                        return Ok(EliminationOutcome::Conflict(row.provenance));
                    }
                    continue;
                }
                if seen.insert(row.normalized_key()) {
                    next.push(row);
                }
            }
        }
        stages.push(next);
    }

    // Solve the single remaining variable, then substitute back upward.
    let mut assignment: Vec<Scalar> = Vec::with_capacity(d);
    for var in 0..d {
        let stage = &stages[d - 1 - var];
        match solve_interval(stage, var, &assignment, mode, tau)? {
            IntervalOutcome::Value(v) => assignment.push(v),
            IntervalOutcome::Conflict(prov) => return Ok(EliminationOutcome::Conflict(prov)),
        }
    }
    Ok(EliminationOutcome::Assignment(assignment))
}

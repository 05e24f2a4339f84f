//! Modulus amplification: the two sup-constructions that strengthen a
//! modulus without losing convexity, plus the feasibility and validity
//! screens derived from them.
//!
//! Divergence is decided by catalog closed form whenever one exists (exact);
//! otherwise a growth heuristic is applied and the result is labeled
//! `numerical` — a sup over an infinite index set is not computable from
//! samples, so honesty beats false certainty.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{dyadic_probes, FieldSpec};
use crate::geom::{sample_domain, BoxDomain, Point};
use crate::modulus::Modulus;
use crate::scalar::{sort_dedup, tolerance_value, Scalar, ScalarMode};

/// Catalog-free divergence heuristic: a brute-force max beyond this bound,
/// still growing over the tail of the scan, is reported as divergent.
pub const GROWTH_THRESHOLD: f64 = 1e12;

/// Grid resolution per axis used when feasibility scans sample directions.
const FEASIBILITY_GRID: usize = 5;

/// Which amplification operator an [`AmplifiedModulus`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplifyOperator {
    /// max over n of n²·α(u/n).
    JensenTilde,
    /// max over field scalars t ∈ (0,1] of α(tu)/t.
    ScalingHat,
}

/// Whether a result came from an exact closed form or a truncated scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Catalog,
    Numerical,
}

/// A finite amplified value, or divergence of the underlying supremum.
#[derive(Clone, Debug, PartialEq)]
pub enum AmplifyValue {
    Finite(Scalar),
    Diverges,
}

impl AmplifyValue {
    pub fn is_divergent(&self) -> bool {
        matches!(self, AmplifyValue::Diverges)
    }

    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            AmplifyValue::Finite(s) => Some(s),
            AmplifyValue::Diverges => None,
        }
    }
}

impl Serialize for AmplifyValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AmplifyValue::Finite(s) => s.serialize(serializer),
            AmplifyValue::Diverges => serializer.serialize_str("DIVERGES"),
        }
    }
}

/// Where a finite maximum was attained. Absent when the supremum is only
/// approached in the limit (e.g. the sine-squared catalog form).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AmplifyWitness {
    Index { n: u64 },
    Scale { t: Scalar },
}

/// Result of evaluating an amplified modulus at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplifyResult {
    pub value: AmplifyValue,
    pub witness: Option<AmplifyWitness>,
    pub truncation: u64,
    pub decided_by: Decision,
}

/// A modulus composed with one of the two amplification operators. The
/// closed form is precomputed from the catalog when the operator admits one;
/// evaluation falls back to a truncated scan otherwise.
#[derive(Clone, Debug)]
pub struct AmplifiedModulus {
    pub base: Modulus,
    pub operator: AmplifyOperator,
    /// Max index n for the Jensen operator; ceil(1/t_min) for scaling.
    pub truncation: u64,
    pub closed_form: Option<Modulus>,
    /// Scaling operator only: the enumerated t-sample, descending.
    t_samples: Option<Vec<Scalar>>,
}

impl AmplifiedModulus {
    /// The Jensen amplifier truncated at index `n_max`.
    pub fn jensen(base: Modulus, n_max: u64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::ZeroTruncation);
        }
        let closed_form = jensen_closed_form(&base);
        Ok(AmplifiedModulus {
            base,
            operator: AmplifyOperator::JensenTilde,
            truncation: n_max,
            closed_form,
            t_samples: None,
        })
    }

    /// The scaling amplifier over the field's unit-interval sample. For
    /// everywhere-evaluatable moduli the sample is augmented with the dyadic
    /// probes 2^{-k}, k ≤ 40, which lie in every supported field and probe
    /// the t → 0 behaviour; tabulated moduli keep only the field sample,
    /// since a finite table has no t → 0 behaviour to probe.
    pub fn scaling(base: Modulus, field: &FieldSpec, mode: ScalarMode) -> Result<Self> {
        let mut ts = field.enumerate_unit_interval(mode)?;
        if !matches!(base, Modulus::Tabulated { .. }) {
            ts.extend(dyadic_probes(40, mode));
        }
        ts.retain(|t| !t.is_zero());
        sort_dedup(&mut ts);
        ts.reverse();
        if ts.is_empty() {
            return Err(Error::EmptyTSample);
        }
        let t_min = ts.last().expect("nonempty").to_f64();
        let closed_form = scaling_closed_form(&base);
        Ok(AmplifiedModulus {
            base,
            operator: AmplifyOperator::ScalingHat,
            truncation: (1.0 / t_min).ceil() as u64,
            closed_form,
            t_samples: Some(ts),
        })
    }

    pub fn eval(&self, u: &Point) -> Result<AmplifyResult> {
        match self.operator {
            AmplifyOperator::JensenTilde => self.eval_jensen(u),
            AmplifyOperator::ScalingHat => self.eval_scaling(u),
        }
    }

    fn eval_jensen(&self, u: &Point) -> Result<AmplifyResult> {
        let mode = u.mode();
        // Divergent catalog case: power laws below the quadratic threshold.
        if let Modulus::PowerNorm { p, .. } = &self.base {
            let two = Scalar::from_int(2, mode);
            if p.cmp_same_mode(&two) == std::cmp::Ordering::Less && !u.is_zero() {
                return Ok(AmplifyResult {
                    value: AmplifyValue::Diverges,
                    witness: None,
                    truncation: self.truncation,
                    decided_by: Decision::Catalog,
                });
            }
        }
        if let Some(cf) = &self.closed_form {
            let value = cf.eval(u)?;
            // The sine-squared supremum is attained only in the limit.
            let witness = match self.base {
                Modulus::SinSq => None,
                _ => Some(AmplifyWitness::Index { n: 1 }),
            };
            return Ok(AmplifyResult {
                value: AmplifyValue::Finite(value),
                witness,
                truncation: self.truncation,
                decided_by: Decision::Catalog,
            });
        }
        // Brute-force truncated scan.
        let mut values = Vec::with_capacity(self.truncation as usize);
        let mut best: Option<(u64, Scalar)> = None;
        for n in 1..=self.truncation {
            let inv = Scalar::from_ratio(1, n as i64, mode);
            let v = self.base.eval(&u.scale(&inv))?;
            let scaled = &Scalar::from_int((n * n) as i64, mode) * &v;
            if best
                .as_ref()
                .is_none_or(|(_, b)| scaled.cmp_same_mode(b) == std::cmp::Ordering::Greater)
            {
                best = Some((n, scaled.clone()));
            }
            values.push(scaled);
        }
        let (n_best, max) = best.expect("truncation >= 1");
        if exceeds_growth_threshold(&max) && sustained_growth(&values) {
            return Ok(AmplifyResult {
                value: AmplifyValue::Diverges,
                witness: Some(AmplifyWitness::Index { n: n_best }),
                truncation: self.truncation,
                decided_by: Decision::Numerical,
            });
        }
        Ok(AmplifyResult {
            value: AmplifyValue::Finite(max),
            witness: Some(AmplifyWitness::Index { n: n_best }),
            truncation: self.truncation,
            decided_by: Decision::Numerical,
        })
    }

    fn eval_scaling(&self, u: &Point) -> Result<AmplifyResult> {
        let mode = u.mode();
        let one = Scalar::one(mode);
        if let Modulus::PowerNorm { p, .. } = &self.base {
            if p.cmp_same_mode(&one) == std::cmp::Ordering::Less && !u.is_zero() {
                return Ok(AmplifyResult {
                    value: AmplifyValue::Diverges,
                    witness: None,
                    truncation: self.truncation,
                    decided_by: Decision::Catalog,
                });
            }
        }
        if let Some(cf) = &self.closed_form {
            return Ok(AmplifyResult {
                value: AmplifyValue::Finite(cf.eval(u)?),
                witness: Some(AmplifyWitness::Scale { t: one }),
                truncation: self.truncation,
                decided_by: Decision::Catalog,
            });
        }
        let ts = self
            .t_samples
            .as_ref()
            .expect("scaling operator carries samples");
        let mut values = Vec::with_capacity(ts.len());
        let mut best: Option<(Scalar, Scalar)> = None;
        for t in ts {
            let v = self.base.eval(&u.scale(t))?;
            let ratio = &v / t;
            if best
                .as_ref()
                .is_none_or(|(_, b)| ratio.cmp_same_mode(b) == std::cmp::Ordering::Greater)
            {
                best = Some((t.clone(), ratio.clone()));
            }
            values.push(ratio);
        }
        let (t_best, max) = best.expect("nonempty sample");
        // Growth toward t = 0: the samples are descending in t, so a tail
        // that keeps growing past the threshold suggests divergence.
        if exceeds_growth_threshold(&max) && sustained_growth(&values) {
            return Ok(AmplifyResult {
                value: AmplifyValue::Diverges,
                witness: Some(AmplifyWitness::Scale { t: t_best }),
                truncation: self.truncation,
                decided_by: Decision::Numerical,
            });
        }
        Ok(AmplifyResult {
            value: AmplifyValue::Finite(max),
            witness: Some(AmplifyWitness::Scale { t: t_best }),
            truncation: self.truncation,
            decided_by: Decision::Numerical,
        })
    }
}

/// max over n of n²·α(u/n), truncated at `n_max`.
pub fn amplify_jensen(base: &Modulus, u: &Point, n_max: u64) -> Result<AmplifyResult> {
    AmplifiedModulus::jensen(base.clone(), n_max)?.eval(u)
}

/// max over enumerated t ∈ (0,1] in the field of α(tu)/t.
pub fn amplify_scaling(base: &Modulus, u: &Point, field: &FieldSpec) -> Result<AmplifyResult> {
    AmplifiedModulus::scaling(base.clone(), field, u.mode())?.eval(u)
}

fn jensen_closed_form(base: &Modulus) -> Option<Modulus> {
    match base {
        Modulus::Zero => Some(Modulus::Zero),
        Modulus::Quadratic { c } => Some(Modulus::Quadratic { c: c.clone() }),
        // n²·ε‖u/n‖ᵖ = n^{2-p}·ε‖u‖ᵖ: constant at p = 2, maximal at n = 1
        // for p > 2, unbounded for p < 2 (handled before the closed form).
        Modulus::PowerNorm { epsilon, p } => {
            let two = Scalar::from_int(2, p.mode());
            (p.cmp_same_mode(&two) != std::cmp::Ordering::Less).then(|| Modulus::PowerNorm {
                epsilon: epsilon.clone(),
                p: p.clone(),
            })
        }
        // n²·sin²(u/n) increases to u² as n grows: sin²x ≤ x² everywhere and
        // sin(u/n)/(u/n) → 1, so the supremum is exactly the square.
        Modulus::SinSq => Some(Modulus::Quadratic {
            c: Scalar::Float(1.0),
        }),
        Modulus::Tabulated { .. } => None,
    }
}

fn scaling_closed_form(base: &Modulus) -> Option<Modulus> {
    match base {
        Modulus::Zero => Some(Modulus::Zero),
        // α(tu)/t = t·c‖u‖²: maximal at t = 1.
        Modulus::Quadratic { c } => Some(Modulus::Quadratic { c: c.clone() }),
        // α(tu)/t = t^{p-1}·ε‖u‖ᵖ: maximal at t = 1 for p ≥ 1, unbounded as
        // t → 0 for p < 1 (handled before the closed form).
        Modulus::PowerNorm { epsilon, p } => {
            let one = Scalar::one(p.mode());
            (p.cmp_same_mode(&one) != std::cmp::Ordering::Less).then(|| Modulus::PowerNorm {
                epsilon: epsilon.clone(),
                p: p.clone(),
            })
        }
        // sin²(tu)/t has no simple closed form; scanned numerically.
        Modulus::SinSq => None,
        Modulus::Tabulated { .. } => None,
    }
}

fn exceeds_growth_threshold(v: &Scalar) -> bool {
    v.to_f64() > GROWTH_THRESHOLD
}

/// True when the scan tail (its last half, at least two steps) never
/// decreases. Scans too short to have a tail yield no divergence evidence.
fn sustained_growth(values: &[Scalar]) -> bool {
    if values.len() < 4 {
        return false;
    }
    let start = values.len() / 2;
    values[start..]
        .windows(2)
        .all(|w| w[1].cmp_same_mode(&w[0]) != std::cmp::Ordering::Less)
}

/// Verdict of the non-existence screen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityVerdict {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityWitness {
    pub u: Point,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub verdict: FeasibilityVerdict,
    pub witness: Option<FeasibilityWitness>,
    pub scanned: usize,
    pub truncation: u64,
    pub decided_by: Decision,
}

/// Scans sampled directions u in half the difference set (origin excluded)
/// for divergence of n²·α(u/n): divergence at any u rules out every strongly
/// α-Jensen-convex function on the domain.
///
/// `Feasible` means "no divergence detected at this truncation" — the true
/// condition is a limsup over all n, so this is a semi-decision.
pub fn feasibility_check(
    base: &Modulus,
    dom: &BoxDomain,
    n_max: u64,
    threshold: &Scalar,
) -> Result<FeasibilityReport> {
    if n_max == 0 {
        return Err(Error::ZeroTruncation);
    }
    if !threshold.gt_margin(&Scalar::zero(threshold.mode()), 0.0) {
        return Err(Error::InvalidSpec("threshold must be positive".into()));
    }
    let mode = dom.mode();
    if threshold.mode() != mode {
        return Err(Error::MixedModes("feasibility threshold".into()));
    }
    let half_diff = dom.difference_bound().halved();
    let sample: Vec<Point> = sample_domain(&half_diff, FEASIBILITY_GRID)?
        .into_iter()
        .filter(|u| !u.is_zero())
        .collect();
    if sample.is_empty() {
        return Err(Error::EmptySample("no nonzero direction in scan".into()));
    }
    let scanned = sample.len();

    // Catalog classification: exact, uniform over all nonzero directions.
    match base {
        Modulus::PowerNorm { p, .. } => {
            let two = Scalar::from_int(2, mode);
            if p.cmp_same_mode(&two) == std::cmp::Ordering::Less {
                return Ok(FeasibilityReport {
                    verdict: FeasibilityVerdict::Infeasible,
                    witness: Some(FeasibilityWitness {
                        u: sample[0].clone(),
                        n: n_max,
                    }),
                    scanned,
                    truncation: n_max,
                    decided_by: Decision::Catalog,
                });
            }
            return Ok(feasible_report(scanned, n_max, Decision::Catalog));
        }
        // Constant (Quadratic), decreasing (p ≥ 2 handled above), zero, and
        // bounded-by-square (SinSq) sequences never diverge.
        Modulus::Zero | Modulus::Quadratic { .. } | Modulus::SinSq => {
            return Ok(feasible_report(scanned, n_max, Decision::Catalog));
        }
        Modulus::Tabulated { .. } => {}
    }

    // Numerical scan for tabulated moduli.
    for u in &sample {
        let mut values = Vec::with_capacity(n_max as usize);
        let mut best: Option<(u64, Scalar)> = None;
        for n in 1..=n_max {
            let inv = Scalar::from_ratio(1, n as i64, mode);
            let v = base.eval(&u.scale(&inv))?;
            let scaled = &Scalar::from_int((n * n) as i64, mode) * &v;
            if best
                .as_ref()
                .is_none_or(|(_, b)| scaled.cmp_same_mode(b) == std::cmp::Ordering::Greater)
            {
                best = Some((n, scaled.clone()));
            }
            values.push(scaled);
        }
        let (n_best, max) = best.expect("n_max >= 1");
        if max.gt_margin(threshold, 0.0) && sustained_growth(&values) {
            return Ok(FeasibilityReport {
                verdict: FeasibilityVerdict::Infeasible,
                witness: Some(FeasibilityWitness {
                    u: u.clone(),
                    n: n_best,
                }),
                scanned,
                truncation: n_max,
                decided_by: Decision::Numerical,
            });
        }
    }
    Ok(feasible_report(scanned, n_max, Decision::Numerical))
}

fn feasible_report(scanned: usize, n_max: u64, decided_by: Decision) -> FeasibilityReport {
    FeasibilityReport {
        verdict: FeasibilityVerdict::Feasible,
        witness: None,
        scanned,
        truncation: n_max,
        decided_by,
    }
}

/// Verdict of the necessary-condition test on a modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityVerdict {
    Valid,
    Invalid,
}

/// Why a modulus failed the validity test.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ValidityFailure {
    OriginNotZero {
        value: Scalar,
    },
    QuotientNotVanishing {
        direction: Point,
        final_quotient: Scalar,
        /// True when the quotient was still strictly decreasing at the last
        /// probe — deeper probing might yet validate the modulus.
        still_descending: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityReport {
    pub verdict: ValidityVerdict,
    pub failure: Option<ValidityFailure>,
    pub k_max: u32,
}

/// Necessary condition for a modulus to admit any strongly convex function
/// over a field: α(0) = 0 and α(th)/t vanishes as t ↓ 0 along each probed
/// direction. The quotient is probed at t = 2^{-k}, k ≤ k_max, and must fall
/// to the tolerance by the last probe; `Invalid` with `still_descending`
/// set means the truncated probe was inconclusive rather than divergent.
pub fn modulus_validity(
    base: &Modulus,
    directions: &[Point],
    k_max: u32,
    tau: f64,
) -> Result<ValidityReport> {
    if directions.is_empty() {
        return Err(Error::InvalidSpec(
            "validity needs at least one direction".into(),
        ));
    }
    if k_max < 4 {
        return Err(Error::InvalidSpec("validity needs k_max >= 4".into()));
    }
    let mode = directions[0].mode();
    let origin = Point::zero(directions[0].dim(), mode);
    let at_zero = base.eval(&origin)?;
    if !at_zero.eq_tol(&Scalar::zero(mode), tau) {
        return Ok(ValidityReport {
            verdict: ValidityVerdict::Invalid,
            failure: Some(ValidityFailure::OriginNotZero { value: at_zero }),
            k_max,
        });
    }
    let cutoff = tolerance_value(tau, mode);
    for h in directions {
        h.validate()?;
        let mut quotients = Vec::with_capacity(k_max as usize + 1);
        for t in dyadic_probes(k_max, mode) {
            let v = base.eval(&h.scale(&t))?;
            quotients.push(&v / &t);
        }
        let last = quotients.last().expect("k_max >= 4");
        if last.cmp_same_mode(&cutoff) == std::cmp::Ordering::Greater {
            let prev = &quotients[quotients.len() - 2];
            return Ok(ValidityReport {
                verdict: ValidityVerdict::Invalid,
                failure: Some(ValidityFailure::QuotientNotVanishing {
                    direction: h.clone(),
                    final_quotient: last.clone(),
                    still_descending: last.cmp_same_mode(prev) == std::cmp::Ordering::Less,
                }),
                k_max,
            });
        }
    }
    Ok(ValidityReport {
        verdict: ValidityVerdict::Valid,
        failure: None,
        k_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldKind;
    use crate::modulus::InterpolationRule;
    use crate::scalar::DEFAULT_TOLERANCE;

    fn ex(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d, ScalarMode::Exact)
    }

    fn pt1(n: i64, d: i64) -> Point {
        Point(vec![ex(n, d)])
    }

    fn fpt(v: f64) -> Point {
        Point(vec![Scalar::Float(v)])
    }

    #[test]
    fn jensen_quadratic_is_fixed_point() {
        let base = Modulus::Quadratic { c: ex(3, 1) };
        let r = amplify_jensen(&base, &pt1(1, 2), 7).unwrap();
        assert_eq!(r.value, AmplifyValue::Finite(ex(3, 4)));
        assert_eq!(r.decided_by, Decision::Catalog);
    }

    #[test]
    fn jensen_cubic_power_attains_at_one() {
        let base = Modulus::PowerNorm {
            epsilon: ex(1, 1),
            p: ex(3, 1),
        };
        let r = amplify_jensen(&base, &pt1(2, 1), 50).unwrap();
        assert_eq!(r.value, AmplifyValue::Finite(ex(8, 1)));
        assert_eq!(r.witness, Some(AmplifyWitness::Index { n: 1 }));
    }

    #[test]
    fn jensen_subquadratic_power_diverges() {
        let base = Modulus::PowerNorm {
            epsilon: ex(1, 1),
            p: ex(1, 1),
        };
        let r = amplify_jensen(&base, &pt1(1, 1), 10).unwrap();
        assert_eq!(r.value, AmplifyValue::Diverges);
        assert_eq!(r.decided_by, Decision::Catalog);
        // ... but the origin still maps to zero.
        let r = amplify_jensen(&base, &pt1(0, 1), 10).unwrap();
        assert_eq!(r.value, AmplifyValue::Finite(ex(0, 1)));
    }

    #[test]
    fn jensen_sine_squared_reaches_the_square() {
        let r = amplify_jensen(&Modulus::SinSq, &fpt(1.0), 1000).unwrap();
        let v = r.value.finite().unwrap().to_f64();
        assert!((v - 1.0).abs() <= 1e-5);
        assert!(r.witness.is_none());
    }

    #[test]
    fn jensen_tabulated_brute_force() {
        // α(x) = x² tabulated on ±1, ±1/2, ±1/3, 0: n²·α(1/n) = 1 for all n.
        let pts: Vec<Point> = [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2), (1, 3), (-1, 3)]
            .iter()
            .map(|&(a, b)| pt1(a, b))
            .collect();
        let vals: Vec<Scalar> = pts.iter().map(|p| &p.0[0] * &p.0[0]).collect();
        let base = Modulus::Tabulated {
            points: pts,
            values: vals,
            interpolation: InterpolationRule::None,
        };
        let r = amplify_jensen(&base, &pt1(1, 1), 3).unwrap();
        assert_eq!(r.value, AmplifyValue::Finite(ex(1, 1)));
        assert_eq!(r.witness, Some(AmplifyWitness::Index { n: 1 }));
        assert_eq!(r.decided_by, Decision::Numerical);

        // n = 4 needs α(1/4), which the table lacks.
        let err = amplify_jensen(&base, &pt1(1, 1), 4).unwrap_err();
        assert!(err.to_string().starts_with("grid refinement insufficient"));
    }

    #[test]
    fn jensen_rejects_zero_truncation() {
        let base = Modulus::Zero;
        assert!(matches!(
            amplify_jensen(&base, &pt1(1, 1), 0),
            Err(Error::ZeroTruncation)
        ));
    }

    #[test]
    fn scaling_quadratic_maximal_at_one() {
        let base = Modulus::Quadratic { c: ex(1, 1) };
        let field = FieldSpec::new(FieldKind::Dyadics, 5).unwrap();
        let r = amplify_scaling(&base, &pt1(2, 1), &field).unwrap();
        assert_eq!(r.value, AmplifyValue::Finite(ex(4, 1)));
        assert_eq!(r.witness, Some(AmplifyWitness::Scale { t: ex(1, 1) }));
    }

    #[test]
    fn scaling_power_classification() {
        let field = FieldSpec::new(FieldKind::Reals, 9).unwrap();
        let sesqui = Modulus::PowerNorm {
            epsilon: Scalar::Float(1.0),
            p: Scalar::Float(1.5),
        };
        let r = amplify_scaling(&sesqui, &fpt(1.0), &field).unwrap();
        assert_eq!(r.value.finite().unwrap().to_f64(), 1.0);

        let sqrt = Modulus::PowerNorm {
            epsilon: Scalar::Float(1.0),
            p: Scalar::Float(0.5),
        };
        let r = amplify_scaling(&sqrt, &fpt(1.0), &field).unwrap();
        assert!(r.value.is_divergent());
        assert_eq!(r.decided_by, Decision::Catalog);
    }

    #[test]
    fn scaling_sine_squared_scans_numerically() {
        let field = FieldSpec::new(FieldKind::Reals, 5).unwrap();
        let r = amplify_scaling(&Modulus::SinSq, &fpt(1.0), &field).unwrap();
        // sin²(t)/t is increasing on (0,1], so the max sits at t = 1.
        let expected = 1f64.sin().powi(2);
        assert!((r.value.finite().unwrap().to_f64() - expected).abs() < 1e-12);
        assert_eq!(
            r.witness,
            Some(AmplifyWitness::Scale {
                t: Scalar::Float(1.0)
            })
        );
        assert_eq!(r.decided_by, Decision::Numerical);
    }

    #[test]
    fn feasibility_power_boundary() {
        let dom = BoxDomain::new(fpt(-1.0), fpt(1.0)).unwrap();
        let thr = Scalar::Float(1e12);
        for (p, expect) in [
            (1.0, FeasibilityVerdict::Infeasible),
            (1.5, FeasibilityVerdict::Infeasible),
            (1.9, FeasibilityVerdict::Infeasible),
            (2.0, FeasibilityVerdict::Feasible),
            (2.5, FeasibilityVerdict::Feasible),
            (3.0, FeasibilityVerdict::Feasible),
        ] {
            let base = Modulus::PowerNorm {
                epsilon: Scalar::Float(1.0),
                p: Scalar::Float(p),
            };
            let r = feasibility_check(&base, &dom, 1000, &thr).unwrap();
            assert_eq!(r.verdict, expect, "p = {p}");
            assert_eq!(r.decided_by, Decision::Catalog);
        }
    }

    #[test]
    fn feasibility_witness_is_first_scan_point() {
        let dom = BoxDomain::new(pt1(-1, 1), pt1(1, 1)).unwrap();
        let base = Modulus::PowerNorm {
            epsilon: ex(1, 1),
            p: ex(1, 1),
        };
        let r = feasibility_check(&base, &dom, 100, &ex(1, 1)).unwrap();
        assert_eq!(r.verdict, FeasibilityVerdict::Infeasible);
        let w = r.witness.unwrap();
        assert_eq!(w.u, pt1(-4, 5));
        assert!(r.scanned > 0);
    }

    #[test]
    fn validity_catalog_verdicts() {
        let dirs = [pt1(1, 1)];
        let quad = Modulus::Quadratic { c: ex(7, 1) };
        let r = modulus_validity(&quad, &dirs, 40, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.verdict, ValidityVerdict::Valid);

        let lin = Modulus::PowerNorm {
            epsilon: ex(1, 1),
            p: ex(1, 1),
        };
        let r = modulus_validity(&lin, &dirs, 40, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.verdict, ValidityVerdict::Invalid);
        match r.failure.unwrap() {
            ValidityFailure::QuotientNotVanishing {
                final_quotient,
                still_descending,
                ..
            } => {
                assert_eq!(final_quotient, ex(1, 1));
                assert!(!still_descending);
            }
            other => panic!("unexpected failure {other:?}"),
        }

        let fdirs = [fpt(1.0)];
        let r = modulus_validity(&Modulus::SinSq, &fdirs, 40, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.verdict, ValidityVerdict::Valid);
    }

    #[test]
    fn validity_flags_nonzero_origin() {
        let table = Modulus::Tabulated {
            points: vec![pt1(0, 1)],
            values: vec![ex(1, 1)],
            interpolation: InterpolationRule::None,
        };
        let r = modulus_validity(&table, &[pt1(0, 1)], 4, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.verdict, ValidityVerdict::Invalid);
        assert!(matches!(
            r.failure,
            Some(ValidityFailure::OriginNotZero { .. })
        ));
    }

    #[test]
    fn amplified_dominates_base_and_is_monotone_in_truncation() {
        let pts: Vec<Point> = [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2)]
            .iter()
            .map(|&(a, b)| pt1(a, b))
            .collect();
        // An uneven-looking but even table: α(±1) = 1/3, α(±1/2) = 1/4.
        let vals = vec![ex(0, 1), ex(1, 3), ex(1, 3), ex(1, 4), ex(1, 4)];
        let base = Modulus::Tabulated {
            points: pts,
            values: vals,
            interpolation: InterpolationRule::None,
        };
        let u = pt1(1, 1);
        let r1 = amplify_jensen(&base, &u, 1).unwrap();
        let r2 = amplify_jensen(&base, &u, 2).unwrap();
        let v1 = r1.value.finite().unwrap();
        let v2 = r2.value.finite().unwrap();
        // n = 2 term: 4·α(1/2) = 1 > 1/3.
        assert_eq!(v1, &ex(1, 3));
        assert_eq!(v2, &ex(1, 1));
        assert!(base.eval(&u).unwrap().cmp_same_mode(v1) != std::cmp::Ordering::Greater);
    }
}

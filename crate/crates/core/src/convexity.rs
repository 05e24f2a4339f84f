//! Checkers for the defining strong-convexity inequalities and the
//! subdivision certificate that re-derives the midpoint conclusion from
//! first principles.
//!
//! Universal quantifiers over the domain and the parameter set are relaxed
//! to deterministic finite samples: Pass means "not refuted on the sample",
//! and every report carries the sample count. Scan order is lexicographic in
//! (x, y, t) so failures are reproducible byte for byte.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{enumerate_t, TSet};
use crate::geom::{sample_domain, BoxDomain, Point};
use crate::modulus::Modulus;
use crate::oracle::FunctionOracle;
use crate::scalar::{Scalar, ScalarMode};

/// Outcome of a sampled inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// The first sampled violation, in scan order. For pairwise convexity checks
/// the coordinates are the pair (x, y) and parameter t; direction-based
/// checks (sublinearity, support inequalities) reuse the slots for their own
/// operands, documented at each call site.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub x: Point,
    pub y: Point,
    pub t: Scalar,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

/// Report of a sampled check: verdict, first violation if any, and how many
/// inequality instances were actually evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub samples_checked: u64,
    pub mode: ScalarMode,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn pass(samples_checked: u64, mode: ScalarMode, tolerance: f64) -> Self {
        CheckReport {
            verdict: Verdict::Pass,
            witness: None,
            samples_checked,
            mode,
            tolerance,
        }
    }

    fn fail(witness: Witness, samples_checked: u64, mode: ScalarMode, tolerance: f64) -> Self {
        CheckReport {
            verdict: Verdict::Fail,
            witness: Some(witness),
            samples_checked,
            mode,
            tolerance,
        }
    }
}

/// The sample of domain points a check runs over: a tabulated oracle is
/// checked on its own carrier (validated to sit inside the domain), anything
/// else on the deterministic interior grid.
pub(crate) fn check_points(f: &FunctionOracle, dom: &BoxDomain, grid: usize) -> Result<Vec<Point>> {
    match f.carrier() {
        Some(carrier) => {
            for p in &carrier {
                if !dom.contains(p) {
                    return Err(Error::OutsideDomain(p.render()));
                }
            }
            Ok(carrier)
        }
        None => sample_domain(dom, grid),
    }
}

/// Verifies f(tx+(1-t)y) <= t·f(x) + (1-t)·f(y) - t·α((1-t)(x-y)) -
/// (1-t)·α(t(y-x)) over all grid pairs (x, y) and enumerated t, returning
/// the first violation in lexicographic (x, y, t) scan order.
///
/// For a tabulated f, combinations falling off the carrier are skipped (the
/// carrier is the only place the inequality is decidable); the report counts
/// the instances actually checked, and an entirely unevaluable scan is an
/// error rather than a hollow Pass.
pub fn check_strong_convexity(
    f: &FunctionOracle,
    alpha: &Modulus,
    dom: &BoxDomain,
    tset: &TSet,
    grid: usize,
    tau: f64,
) -> Result<CheckReport> {
    let mode = dom.mode();
    dom.validate()?;
    f.validate(mode, dom.dim())?;
    alpha.validate(mode)?;
    let ts = enumerate_t(tset, mode)?;
    let pts = check_points(f, dom, grid)?;
    let skippable = f.carrier().is_some();

    let f_vals: Vec<Scalar> = pts.iter().map(|p| f.eval(p)).collect::<Result<_>>()?;
    let one = Scalar::one(mode);
    let mut checked: u64 = 0;

    for (xi, x) in pts.iter().enumerate() {
        for (yi, y) in pts.iter().enumerate() {
            let x_minus_y = x.sub(y);
            for t in &ts {
                let s = &one - t;
                let z = Point::combine(t, x, y);
                let lhs = match f.eval(&z) {
                    Ok(v) => v,
                    Err(Error::OffCarrier(_)) if skippable => continue,
                    Err(e) => return Err(e),
                };
                let gap_a = alpha.eval(&x_minus_y.scale(&s))?;
                let gap_b = alpha.eval(&x_minus_y.scale(t).neg())?;
                let rhs =
                    &(&(t * &f_vals[xi]) + &(&s * &f_vals[yi])) - &(&(t * &gap_a) + &(&s * &gap_b));
                checked += 1;
                if !lhs.le_tol(&rhs, tau) {
                    return Ok(CheckReport::fail(
                        Witness {
                            x: x.clone(),
                            y: y.clone(),
                            t: t.clone(),
                            lhs,
                            rhs,
                        },
                        checked,
                        mode,
                        tau,
                    ));
                }
            }
        }
    }
    if checked == 0 {
        return Err(Error::EmptySample(
            "no convex combination evaluable on the tabulated carrier".into(),
        ));
    }
    Ok(CheckReport::pass(checked, mode, tau))
}

/// The midpoint specialization: strong convexity with T = {1/2}.
pub fn check_jensen(
    f: &FunctionOracle,
    alpha: &Modulus,
    dom: &BoxDomain,
    grid: usize,
    tau: f64,
) -> Result<CheckReport> {
    check_strong_convexity(f, alpha, dom, &TSet::JensenPoint, grid, tau)
}

/// Re-derives and checks the subdivision conclusion
/// f((x+y)/2) <= (f(x)+f(y))/2 - n²·α((x-y)/(2n))
/// by the chain it follows from: subdivide [x, y] into 2n pieces, check the
/// midpoint inequality on every interior triple, form the weighted sum with
/// weights i (left half) and 2n-i (right half), and confirm the telescoped
/// coefficients — 0 on interior nodes, 1 at the center, 1/2 at the
/// endpoints, n² on the error term — before checking the conclusion itself.
///
/// The coefficient bookkeeping is recomputed from the weights at runtime and
/// asserted (exactly in Exact mode); a mismatch would be an arithmetic bug,
/// reported as an error rather than a verdict.
pub fn subdivision_certificate(
    f: &FunctionOracle,
    alpha: &Modulus,
    dom: &BoxDomain,
    x: &Point,
    y: &Point,
    n: u64,
    tau: f64,
) -> Result<CheckReport> {
    if n == 0 {
        return Err(Error::ZeroTruncation);
    }
    let mode = dom.mode();
    dom.validate()?;
    f.validate(mode, dom.dim())?;
    alpha.validate(mode)?;
    for p in [x, y] {
        if !dom.contains(p) {
            return Err(Error::OutsideDomain(p.render()));
        }
    }

    let two_n = 2 * n;
    let step = y.sub(x);
    let nodes: Vec<Point> = (0..=two_n)
        .map(|i| {
            let frac = Scalar::from_ratio(i as i64, two_n as i64, mode);
            x.add(&step.scale(&frac))
        })
        .collect();
    let values: Vec<Scalar> = nodes.iter().map(|p| f.eval(p)).collect::<Result<_>>()?;

    // The common error term α((x-y)/(2n)).
    let delta = x.sub(y).scale(&Scalar::from_ratio(1, two_n as i64, mode));
    let gap = alpha.eval(&delta)?;

    let two = Scalar::from_int(2, mode);
    let mut checked: u64 = 0;

    // Midpoint inequality on every interior triple.
    for i in 1..two_n {
        let lhs = values[i as usize].clone();
        let avg = &(&values[(i - 1) as usize] + &values[(i + 1) as usize]) / &two;
        let rhs = &avg - &gap;
        checked += 1;
        if !lhs.le_tol(&rhs, tau) {
            return Ok(CheckReport::fail(
                Witness {
                    x: nodes[(i - 1) as usize].clone(),
                    y: nodes[(i + 1) as usize].clone(),
                    t: Scalar::from_ratio(1, 2, mode),
                    lhs,
                    rhs,
                },
                checked,
                mode,
                tau,
            ));
        }
    }

    // Telescoped coefficients, recomputed from the weights w_i = i (left) and
    // 2n-i (right): c_i = w_i - (w_{i-1} + w_{i+1})/2, error coefficient Σw_i.
    let weight = |i: u64| -> i64 {
        if i == 0 || i >= two_n {
            0
        } else if i <= n {
            i as i64
        } else {
            (two_n - i) as i64
        }
    };
    let mut error_coef: i64 = 0;
    for i in 0..=two_n {
        let left = if i == 0 { 0 } else { weight(i - 1) };
        let c = Scalar::from_ratio(2 * weight(i) - left - weight(i + 1), 2, mode);
        let expected = if i == 0 || i == two_n {
            Scalar::from_ratio(-1, 2, mode)
        } else if i == n {
            Scalar::one(mode)
        } else {
            Scalar::zero(mode)
        };
        if c != expected {
            return Err(Error::OracleMismatch(format!(
                "subdivision coefficient bookkeeping at node {i}: {} vs {}",
                c.render(),
                expected.render()
            )));
        }
        if 1 <= i && i < two_n {
            error_coef += weight(i);
        }
    }
    if error_coef != (n * n) as i64 {
        return Err(Error::OracleMismatch(format!(
            "subdivision error coefficient: {error_coef} vs {}",
            n * n
        )));
    }

    // The telescoped conclusion.
    let lhs = values[n as usize].clone();
    let avg = &(&values[0] + &values[two_n as usize]) / &two;
    let rhs = &avg - &(&Scalar::from_int((n * n) as i64, mode) * &gap);
    checked += 1;
    if !lhs.le_tol(&rhs, tau) {
        return Ok(CheckReport::fail(
            Witness {
                x: x.clone(),
                y: y.clone(),
                t: Scalar::from_ratio(1, 2, mode),
                lhs,
                rhs,
            },
            checked,
            mode,
            tau,
        ));
    }
    Ok(CheckReport::pass(checked, mode, tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DEFAULT_TOLERANCE;

    fn ex(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d, ScalarMode::Exact)
    }

    fn pt1(n: i64, d: i64) -> Point {
        Point(vec![ex(n, d)])
    }

    fn square() -> FunctionOracle {
        FunctionOracle::parabola(ex(1, 1), ex(0, 1), ex(0, 1))
    }

    #[test]
    fn square_with_matching_modulus_passes_identically() {
        let dom = BoxDomain::new(pt1(-2, 1), pt1(2, 1)).unwrap();
        let r = check_strong_convexity(
            &square(),
            &Modulus::Quadratic { c: ex(1, 1) },
            &dom,
            &TSet::FullInterval { m: 11 },
            4,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.samples_checked, 4 * 4 * 11);
    }

    #[test]
    fn square_with_doubled_modulus_fails_with_pinned_witness() {
        let dom = BoxDomain::new(pt1(-1, 2), pt1(3, 2)).unwrap();
        let r = check_strong_convexity(
            &square(),
            &Modulus::Quadratic { c: ex(2, 1) },
            &dom,
            &TSet::JensenPoint,
            2,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.x, pt1(0, 1));
        assert_eq!(w.y, pt1(1, 1));
        assert_eq!(w.t, ex(1, 2));
        assert_eq!(w.lhs, ex(1, 4));
        assert_eq!(w.rhs, ex(0, 1));
    }

    #[test]
    fn square_is_plainly_convex() {
        let dom = BoxDomain::new(pt1(-2, 1), pt1(2, 1)).unwrap();
        let r = check_strong_convexity(
            &square(),
            &Modulus::Zero,
            &dom,
            &TSet::FullInterval { m: 5 },
            3,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn abs_fails_sine_squared_jensen() {
        let dom = BoxDomain::new(
            Point(vec![Scalar::Float(-1.0)]),
            Point(vec![Scalar::Float(1.0)]),
        )
        .unwrap();
        let r = check_jensen(
            &FunctionOracle::AbsVal,
            &Modulus::SinSq,
            &dom,
            4,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.x.0[0].to_f64(), -0.75);
        assert_eq!(w.y.0[0].to_f64(), -0.25);
    }

    #[test]
    fn tabulated_oracle_checks_on_carrier_only() {
        let f = FunctionOracle::Tabulated {
            points: vec![pt1(0, 1), pt1(1, 2), pt1(1, 1)],
            values: vec![ex(0, 1), ex(1, 4), ex(1, 1)],
        };
        let dom = BoxDomain::new(pt1(-1, 1), pt1(2, 1)).unwrap();
        let r = check_strong_convexity(
            &f,
            &Modulus::Quadratic { c: ex(1, 1) },
            &dom,
            &TSet::FullInterval { m: 5 },
            4,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        // Only combinations landing back on {0, 1/2, 1} are countable:
        // every (x, y) pair contributes its t ∈ {0, 1} endpoints, and the
        // (0, 1)-type pairs contribute t ∈ {1/4, 1/2, 3/4} hits as well.
        assert!(r.samples_checked > 0 && r.samples_checked < 9 * 5);
    }

    #[test]
    fn carrier_outside_domain_is_an_error() {
        let f = FunctionOracle::Tabulated {
            points: vec![pt1(0, 1), pt1(5, 1)],
            values: vec![ex(0, 1), ex(25, 1)],
        };
        let dom = BoxDomain::new(pt1(-1, 1), pt1(2, 1)).unwrap();
        let err = check_jensen(&f, &Modulus::Zero, &dom, 2, DEFAULT_TOLERANCE).unwrap_err();
        assert!(err.to_string().contains("outside domain"));
    }

    #[test]
    fn subdivision_passes_with_equality_for_square() {
        let dom = BoxDomain::new(pt1(-1, 1), pt1(3, 1)).unwrap();
        let r = subdivision_certificate(
            &square(),
            &Modulus::Quadratic { c: ex(1, 1) },
            &dom,
            &pt1(0, 1),
            &pt1(2, 1),
            2,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.samples_checked, 4); // 3 midpoint triples + conclusion
    }

    #[test]
    fn subdivision_base_case_is_jensen() {
        let dom = BoxDomain::new(pt1(-1, 1), pt1(2, 1)).unwrap();
        // |x| is not strongly Jensen convex with a quadratic modulus across 0.
        let r = subdivision_certificate(
            &FunctionOracle::AbsVal,
            &Modulus::Quadratic { c: ex(1, 1) },
            &dom,
            &pt1(0, 1),
            &pt1(1, 1),
            1,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.lhs, ex(1, 2));
        assert_eq!(w.rhs, ex(1, 4));
    }

    #[test]
    fn subdivision_rejects_zero_pieces() {
        let dom = BoxDomain::new(pt1(-1, 1), pt1(1, 1)).unwrap();
        assert!(matches!(
            subdivision_certificate(
                &square(),
                &Modulus::Zero,
                &dom,
                &pt1(0, 1),
                &pt1(1, 2),
                0,
                DEFAULT_TOLERANCE,
            ),
            Err(Error::ZeroTruncation)
        ));
    }

    #[test]
    fn quartic_certificates_across_scales() {
        // x⁴ is convex on (-1,1); with the zero modulus every n certifies.
        let quartic = FunctionOracle::Sum {
            terms: vec![FunctionOracle::PowerAbs {
                epsilon: ex(1, 1),
                p: ex(4, 1),
            }],
        };
        let dom = BoxDomain::new(pt1(-1, 1), pt1(1, 1)).unwrap();
        for n in [1u64, 2, 3, 5, 10] {
            let r = subdivision_certificate(
                &quartic,
                &Modulus::Zero,
                &dom,
                &pt1(-1, 2),
                &pt1(3, 4),
                n,
                DEFAULT_TOLERANCE,
            )
            .unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "n = {n}");
        }
    }
}

//! The modulus catalog: nonnegative even error functions on the difference
//! set, with exact evaluation wherever the arithmetic allows it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scalar::{Scalar, ScalarMode};

/// How a tabulated modulus behaves off its stored grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationRule {
    /// Off-grid evaluation is an error.
    None,
    /// The exact midpoint of two adjacent stored abscissae (d = 1 only)
    /// evaluates to the average of their values; anything else is an error.
    Midpoint,
}

/// A modulus: a nonnegative even function quantifying the convexity gap.
///
/// Closed forms are even and nonnegative structurally; tabulated data is
/// validated for both properties at load time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Modulus {
    /// u ↦ ε·‖u‖ᵖ with the Euclidean norm; ε > 0, p > 0.
    PowerNorm { epsilon: Scalar, p: Scalar },
    /// u ↦ c·‖u‖²; exact in both modes.
    Quadratic { c: Scalar },
    /// u ↦ sin²(u); one-dimensional and Float-mode only.
    SinSq,
    /// u ↦ 0, recovering plain convexity.
    Zero,
    /// Values stored on a finite symmetric grid.
    Tabulated {
        points: Vec<Point>,
        values: Vec<Scalar>,
        interpolation: InterpolationRule,
    },
}

impl Modulus {
    /// Validates parameters and (for tables) evenness and nonnegativity.
    /// `mode` is the ambient scalar mode of the problem.
    pub fn validate(&self, mode: ScalarMode) -> Result<()> {
        match self {
            Modulus::PowerNorm { epsilon, p } => {
                for (name, s) in [("epsilon", epsilon), ("p", p)] {
                    if s.mode() != mode {
                        return Err(Error::MixedModes(format!("PowerNorm {name}")));
                    }
                    if !s.gt_margin(&Scalar::zero(mode), 0.0) {
                        return Err(Error::InvalidSpec(format!(
                            "PowerNorm requires {name} > 0, got {}",
                            s.render()
                        )));
                    }
                }
                if mode == ScalarMode::Exact && !p.is_positive_integer() {
                    return Err(Error::InvalidSpec(format!(
                        "PowerNorm exponent must be a positive integer in Exact mode, got {}",
                        p.render()
                    )));
                }
                Ok(())
            }
            Modulus::Quadratic { c } => {
                if c.mode() != mode {
                    return Err(Error::MixedModes("Quadratic coefficient".into()));
                }
                if !c.gt_margin(&Scalar::zero(mode), 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "Quadratic requires c > 0, got {}",
                        c.render()
                    )));
                }
                Ok(())
            }
            Modulus::SinSq => {
                if mode != ScalarMode::Float {
                    return Err(Error::InvalidSpec(
                        "SinSq modulus requires Float mode".into(),
                    ));
                }
                Ok(())
            }
            Modulus::Zero => Ok(()),
            Modulus::Tabulated {
                points,
                values,
                interpolation: _,
            } => {
                if points.is_empty() {
                    return Err(Error::InvalidSpec("tabulated modulus has no points".into()));
                }
                if points.len() != values.len() {
                    return Err(Error::InvalidSpec(format!(
                        "tabulated modulus has {} points but {} values",
                        points.len(),
                        values.len()
                    )));
                }
                let dim = points[0].dim();
                for p in points {
                    p.validate()?;
                    if p.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: p.dim(),
                        });
                    }
                    if p.mode() != mode {
                        return Err(Error::MixedModes("tabulated modulus points".into()));
                    }
                }
                crate::scalar::require_mode(mode, values, "tabulated modulus values")?;
                let zero = Scalar::zero(mode);
                for (p, v) in points.iter().zip(values) {
                    if v.cmp_same_mode(&zero) == std::cmp::Ordering::Less {
                        return Err(Error::InvalidSpec(format!(
                            "tabulated modulus is negative at {}: {}",
                            p.render(),
                            v.render()
                        )));
                    }
                    // Evenness: -p must be stored with the same value.
                    let neg = p.neg();
                    match lookup(points, values, &neg) {
                        Some(w) if w == v => {}
                        Some(w) => {
                            return Err(Error::InvalidSpec(format!(
                                "tabulated modulus is not even: value {} at {} vs {} at {}",
                                v.render(),
                                p.render(),
                                w.render(),
                                neg.render()
                            )))
                        }
                        None => {
                            return Err(Error::InvalidSpec(format!(
                                "tabulated modulus grid is not symmetric: {} has no mirror",
                                p.render()
                            )))
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Evaluates α(u). Exactness: Quadratic, Zero, and Tabulated are exact in
    /// Exact mode; PowerNorm is exact for integer p when d = 1 or p is even.
    pub fn eval(&self, u: &Point) -> Result<Scalar> {
        let mode = u.mode();
        match self {
            Modulus::Zero => Ok(Scalar::zero(mode)),
            Modulus::Quadratic { c } => {
                if c.mode() != mode {
                    return Err(Error::MixedModes("Quadratic coefficient vs point".into()));
                }
                Ok(c * &u.norm_sq())
            }
            Modulus::PowerNorm { epsilon, p } => {
                if epsilon.mode() != mode || p.mode() != mode {
                    return Err(Error::MixedModes("PowerNorm parameters vs point".into()));
                }
                match mode {
                    ScalarMode::Float => {
                        let val = epsilon.to_f64() * u.norm_f64().powf(p.to_f64());
                        Ok(Scalar::Float(val))
                    }
                    ScalarMode::Exact => {
                        let k = p.as_positive_integer().ok_or_else(|| {
                            Error::InvalidSpec(format!(
                                "PowerNorm exponent must be a positive integer in Exact mode, got {}",
                                p.render()
                            ))
                        })?;
                        if u.dim() == 1 {
                            Ok(epsilon * &u.0[0].abs().powi(k))
                        } else if k % 2 == 0 {
                            Ok(epsilon * &u.norm_sq().powi(k / 2))
                        } else {
                            Err(Error::InvalidSpec(
                                "PowerNorm with odd exponent in dimension ≥ 2 requires Float mode"
                                    .into(),
                            ))
                        }
                    }
                }
            }
            Modulus::SinSq => {
                if mode != ScalarMode::Float {
                    return Err(Error::InvalidSpec(
                        "SinSq modulus requires Float mode".into(),
                    ));
                }
                if u.dim() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: u.dim(),
                    });
                }
                let s = u.0[0].to_f64().sin();
                Ok(Scalar::Float(s * s))
            }
            Modulus::Tabulated {
                points,
                values,
                interpolation,
            } => {
                if let Some(v) = lookup(points, values, u) {
                    return Ok(v.clone());
                }
                if *interpolation == InterpolationRule::Midpoint && u.dim() == 1 {
                    if let Some(v) = midpoint_value(points, values, &u.0[0]) {
                        return Ok(v);
                    }
                }
                Err(Error::GridRefinementInsufficient(u.render()))
            }
        }
    }

    /// Dimension the modulus is pinned to, if any (tables pin it; SinSq is 1).
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            Modulus::SinSq => Some(1),
            Modulus::Tabulated { points, .. } => points.first().map(Point::dim),
            _ => None,
        }
    }
}

fn lookup<'a>(points: &[Point], values: &'a [Scalar], u: &Point) -> Option<&'a Scalar> {
    points.iter().position(|p| p == u).map(|i| &values[i])
}

/// Midpoint rule: u = (a+b)/2 for adjacent stored abscissae a < b.
fn midpoint_value(points: &[Point], values: &[Scalar], x: &Scalar) -> Option<Scalar> {
    let mut pairs: Vec<(&Scalar, &Scalar)> =
        points.iter().map(|p| &p.0[0]).zip(values.iter()).collect();
    pairs.sort_by(|a, b| a.0.cmp_same_mode(b.0));
    let two = Scalar::from_int(2, x.mode());
    for w in pairs.windows(2) {
        let ((a, va), (b, vb)) = (w[0], w[1]);
        let mid = &(a + b) / &two;
        if &mid == x {
            return Some(&(va + vb) / &two);
        }
    }
    None
}

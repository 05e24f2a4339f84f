//! Candidate functions f : D → R, drawn from a fixed evaluatable catalog.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scalar::{Scalar, ScalarMode};

/// A deterministic function oracle. Tabulated oracles evaluate only on their
/// stored carrier — off-carrier evaluation is an error, never extrapolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum FunctionOracle {
    /// x ↦ xᵀAx + bᵀx + c0 with A symmetric.
    QuadraticForm {
        a: Vec<Vec<Scalar>>,
        b: Point,
        c0: Scalar,
    },
    /// x ↦ ε·|x|ᵖ in dimension 1. ε may be negative (useful as a
    /// deliberately non-convex candidate).
    PowerAbs { epsilon: Scalar, p: Scalar },
    /// x ↦ |x| in dimension 1.
    AbsVal,
    /// Values on a finite carrier; no interpolation of any kind.
    Tabulated {
        points: Vec<Point>,
        values: Vec<Scalar>,
    },
    /// Pointwise sum of other oracles.
    Sum { terms: Vec<FunctionOracle> },
}

impl FunctionOracle {
    pub fn validate(&self, mode: ScalarMode, dim: usize) -> Result<()> {
        match self {
            FunctionOracle::QuadraticForm { a, b, c0 } => {
                if a.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: a.len(),
                    });
                }
                for row in a {
                    if row.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: row.len(),
                        });
                    }
                    crate::scalar::require_mode(mode, row, "quadratic form matrix")?;
                }
                for (i, row) in a.iter().enumerate() {
                    for (j, v) in row.iter().enumerate().skip(i + 1) {
                        if *v != a[j][i] {
                            return Err(Error::InvalidSpec(format!(
                                "quadratic form matrix is not symmetric at ({i},{j})"
                            )));
                        }
                    }
                }
                b.validate()?;
                if b.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: b.dim(),
                    });
                }
                if b.mode() != mode || c0.mode() != mode {
                    return Err(Error::MixedModes("quadratic form coefficients".into()));
                }
                Ok(())
            }
            FunctionOracle::PowerAbs { epsilon, p } => {
                if dim != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: dim,
                    });
                }
                if epsilon.mode() != mode || p.mode() != mode {
                    return Err(Error::MixedModes("PowerAbs parameters".into()));
                }
                if !p.gt_margin(&Scalar::zero(mode), 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "PowerAbs requires p > 0, got {}",
                        p.render()
                    )));
                }
                if mode == ScalarMode::Exact && !p.is_positive_integer() {
                    return Err(Error::InvalidSpec(format!(
                        "PowerAbs exponent must be a positive integer in Exact mode, got {}",
                        p.render()
                    )));
                }
                Ok(())
            }
            FunctionOracle::AbsVal => {
                if dim != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: dim,
                    });
                }
                Ok(())
            }
            FunctionOracle::Tabulated { points, values } => {
                if points.is_empty() {
                    return Err(Error::InvalidSpec("tabulated oracle has no points".into()));
                }
                if points.len() != values.len() {
                    return Err(Error::InvalidSpec(format!(
                        "tabulated oracle has {} points but {} values",
                        points.len(),
                        values.len()
                    )));
                }
                for p in points {
                    p.validate()?;
                    if p.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: p.dim(),
                        });
                    }
                    if p.mode() != mode {
                        return Err(Error::MixedModes("tabulated oracle points".into()));
                    }
                }
                crate::scalar::require_mode(mode, values, "tabulated oracle values")?;
                Ok(())
            }
            FunctionOracle::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidSpec("sum oracle has no terms".into()));
                }
                for t in terms {
                    t.validate(mode, dim)?;
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: &Point) -> Result<Scalar> {
        let mode = x.mode();
        match self {
            FunctionOracle::QuadraticForm { a, b, c0 } => {
                let mut acc = c0.clone();
                for ((row, bi), xi) in a.iter().zip(&b.0).zip(&x.0) {
                    acc = &acc + &(bi * xi);
                    for (aij, xj) in row.iter().zip(&x.0) {
                        acc = &acc + &(&(aij * xi) * xj);
                    }
                }
                Ok(acc)
            }
            FunctionOracle::PowerAbs { epsilon, p } => {
                let ax = x.0[0].abs();
                match mode {
                    ScalarMode::Float => Ok(Scalar::Float(
                        epsilon.to_f64() * ax.to_f64().powf(p.to_f64()),
                    )),
                    ScalarMode::Exact => {
                        let k = p.as_positive_integer().ok_or_else(|| {
                            Error::InvalidSpec(format!(
                                "PowerAbs exponent must be a positive integer in Exact mode, got {}",
                                p.render()
                            ))
                        })?;
                        Ok(epsilon * &ax.powi(k))
                    }
                }
            }
            FunctionOracle::AbsVal => Ok(x.0[0].abs()),
            FunctionOracle::Tabulated { points, values } => points
                .iter()
                .position(|p| p == x)
                .map(|i| values[i].clone())
                .ok_or_else(|| Error::OffCarrier(x.render())),
            FunctionOracle::Sum { terms } => {
                let mut acc = Scalar::zero(mode);
                for t in terms {
                    acc = &acc + &t.eval(x)?;
                }
                Ok(acc)
            }
        }
    }

    /// The carrier of a tabulated oracle (including one buried in a Sum);
    /// None for everywhere-evaluatable oracles.
    pub fn carrier(&self) -> Option<Vec<Point>> {
        match self {
            FunctionOracle::Tabulated { points, .. } => Some(points.clone()),
            FunctionOracle::Sum { terms } => {
                let mut found: Option<Vec<Point>> = None;
                for t in terms {
                    if let Some(c) = t.carrier() {
                        match &found {
                            // Intersecting distinct carriers is out of scope;
                            // keep the first and let eval surface misses.
                            Some(_) => {}
                            None => found = Some(c),
                        }
                    }
                }
                found
            }
            _ => None,
        }
    }

    /// Convenience constructor for the one-dimensional parabola a·x² + b·x + c.
    pub fn parabola(a: Scalar, b: Scalar, c: Scalar) -> FunctionOracle {
        FunctionOracle::QuadraticForm {
            a: vec![vec![a]],
            b: Point(vec![b]),
            c0: c,
        }
    }
}

//! Points, open box domains, and linear functionals on R^d.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode};

/// A point of R^d with all coordinates in one scalar mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<Scalar>);

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        let p = Point(coords);
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::InvalidSpec("zero-dimensional point".into()));
        }
        let mode = self.0[0].mode();
        crate::scalar::require_mode(mode, &self.0, "point coordinates")?;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn mode(&self) -> ScalarMode {
        self.0[0].mode()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn zero(dim: usize, mode: ScalarMode) -> Self {
        Point(vec![Scalar::zero(mode); dim])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: &Scalar) -> Point {
        Point(self.0.iter().map(|a| a * factor).collect())
    }

    pub fn neg(&self) -> Point {
        Point(self.0.iter().map(|a| -a).collect())
    }

    /// The convex combination `t*x + (1-t)*y`.
    pub fn combine(t: &Scalar, x: &Point, y: &Point) -> Point {
        let one_minus = &Scalar::one(t.mode()) - t;
        x.scale(t).add(&y.scale(&one_minus))
    }

    /// Squared Euclidean norm; exact in exact mode.
    pub fn norm_sq(&self) -> Scalar {
        let mut acc = Scalar::zero(self.mode());
        for c in &self.0 {
            acc = &acc + &(c * c);
        }
        acc
    }

    /// Euclidean norm as a float (the only place a square root appears).
    pub fn norm_f64(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(Scalar::render).collect();
        format!("({})", parts.join(", "))
    }
}

/// An open axis-aligned box, the only domain representation. Open boxes are
/// convex and algebraically open with respect to every subfield, so the
/// standing assumptions on the domain hold by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Point,
    pub hi: Point,
}

impl BoxDomain {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        let b = BoxDomain { lo, hi };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        self.lo.validate()?;
        self.hi.validate()?;
        if self.lo.dim() != self.hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.lo.dim(),
                got: self.hi.dim(),
            });
        }
        if self.lo.mode() != self.hi.mode() {
            return Err(Error::MixedModes("box corners".into()));
        }
        for (l, h) in self.lo.0.iter().zip(&self.hi.0) {
            if !matches!(l.cmp_same_mode(h), std::cmp::Ordering::Less) {
                return Err(Error::InvalidSpec(format!(
                    "box requires lo < hi strictly, got lo = {}, hi = {}",
                    l.render(),
                    h.render()
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn mode(&self) -> ScalarMode {
        self.lo.mode()
    }

    /// Strict interior membership.
    pub fn contains(&self, x: &Point) -> bool {
        x.dim() == self.dim()
            && x.mode() == self.mode()
            && self
                .lo
                .0
                .iter()
                .zip(&x.0)
                .zip(&self.hi.0)
                .all(|((l, c), h)| {
                    l.cmp_same_mode(c) == std::cmp::Ordering::Less
                        && c.cmp_same_mode(h) == std::cmp::Ordering::Less
                })
    }

    /// The box `[lo - hi, hi - lo]`, which contains the difference set D - D.
    pub fn difference_bound(&self) -> BoxDomain {
        BoxDomain {
            lo: self.lo.sub(&self.hi),
            hi: self.hi.sub(&self.lo),
        }
    }

    /// The box scaled by 1/2 around the origin of its coordinates.
    pub fn halved(&self) -> BoxDomain {
        let half = Scalar::from_ratio(1, 2, self.mode());
        BoxDomain {
            lo: self.lo.scale(&half),
            hi: self.hi.scale(&half),
        }
    }
}

/// A linear functional represented by its coefficient vector; application is
/// the inner product, so additivity and homogeneity hold by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearFunctional(pub Vec<Scalar>);

impl LinearFunctional {
    pub fn new(coefs: Vec<Scalar>) -> Result<Self> {
        let f = LinearFunctional(coefs);
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::InvalidSpec("zero-dimensional functional".into()));
        }
        crate::scalar::require_mode(self.0[0].mode(), &self.0, "functional coefficients")?;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn mode(&self) -> ScalarMode {
        self.0[0].mode()
    }

    pub fn apply(&self, h: &Point) -> Scalar {
        debug_assert_eq!(self.dim(), h.dim());
        let mut acc = Scalar::zero(self.mode());
        for (v, c) in self.0.iter().zip(&h.0) {
            acc = &acc + &(v * c);
        }
        acc
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(Scalar::render).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// Hard cap on the total number of grid points produced by `sample_domain`.
const GRID_BUDGET: u64 = 1_000_000;

/// Deterministic interior grid: `n_per_axis` points per axis, offset half a
/// cell from each face so every point is strictly inside the open box.
pub fn sample_domain(dom: &BoxDomain, n_per_axis: usize) -> Result<Vec<Point>> {
    if n_per_axis < 2 {
        return Err(Error::InvalidSpec(
            "sample_domain requires n_per_axis >= 2".into(),
        ));
    }
    let d = dom.dim();
    let mut total: u64 = 1;
    for _ in 0..d {
        total = total.saturating_mul(n_per_axis as u64);
        if total > GRID_BUDGET {
            return Err(Error::GridBudgetExceeded);
        }
    }
    let mode = dom.mode();
    // Per-axis coordinate lists: lo + (hi - lo) * (2k + 1) / (2n).
    let mut axes: Vec<Vec<Scalar>> = Vec::with_capacity(d);
    for i in 0..d {
        let lo = &dom.lo.0[i];
        let span = &dom.hi.0[i] - lo;
        let mut coords = Vec::with_capacity(n_per_axis);
        for k in 0..n_per_axis {
            let frac = Scalar::from_ratio(2 * k as i64 + 1, 2 * n_per_axis as i64, mode);
            coords.push(lo + &(&span * &frac));
        }
        axes.push(coords);
    }
    // Row-major cartesian product, axis 0 outermost.
    let mut points = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; d];
    loop {
        points.push(Point(
            idx.iter()
                .enumerate()
                .map(|(i, &k)| axes[i][k].clone())
                .collect(),
        ));
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(points);
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < n_per_axis {
                break;
            }
            idx[axis] = 0;
        }
    }
}

//! Subfield sampling and the parameter set T for convexity checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sort_dedup, Scalar, ScalarMode};

/// Which subfield of the reals the scaling parameters are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Rationals,
    Dyadics,
    Reals,
}

/// A subfield together with a budget bounding how many samples of its unit
/// interval are enumerated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub sample_budget: usize,
}

impl FieldSpec {
    pub fn new(kind: FieldKind, sample_budget: usize) -> Result<Self> {
        let f = FieldSpec {
            kind,
            sample_budget,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_budget < 2 {
            return Err(Error::InvalidSpec(
                "field sample_budget must be at least 2 (the endpoints 0 and 1)".into(),
            ));
        }
        Ok(())
    }

    /// Deterministic sample of the field's unit interval, sorted ascending,
    /// always containing 0 and 1.
    ///
    /// - Rationals: the fractions p/q with q <= R, where R is the largest
    ///   order whose fraction count stays within the budget.
    /// - Dyadics: k/2^n for the largest depth n with 2^n + 1 <= budget.
    /// - Reals: a uniform grid of exactly `budget` points (any real grid is a
    ///   sample; uniform is the deterministic choice).
    pub fn enumerate_unit_interval(&self, mode: ScalarMode) -> Result<Vec<Scalar>> {
        self.validate()?;
        let budget = self.sample_budget;
        let mut out: Vec<Scalar> = match self.kind {
            FieldKind::Rationals => {
                let order = farey_order(budget);
                let mut v = Vec::new();
                for q in 1..=order {
                    for p in 0..=q {
                        if num::integer::gcd(p, q) == 1 {
                            v.push(Scalar::from_ratio(p as i64, q as i64, mode));
                        }
                    }
                }
                v
            }
            FieldKind::Dyadics => {
                let mut depth = 0u32;
                while (1u64 << (depth + 1)) < budget as u64 && depth < 40 {
                    depth += 1;
                }
                let den = 1i64 << depth;
                (0..=den)
                    .map(|k| Scalar::from_ratio(k, den, mode))
                    .collect()
            }
            FieldKind::Reals => (0..budget)
                .map(|k| Scalar::from_ratio(k as i64, budget as i64 - 1, mode))
                .collect(),
        };
        sort_dedup(&mut out);
        if out.is_empty() {
            return Err(Error::EmptyTSample);
        }
        Ok(out)
    }

    /// Field membership for a scalar value. Exact dyadic membership means a
    /// power-of-two denominator; every binary64 float is a dyadic rational,
    /// so in Float mode all three fields contain every finite value.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self.kind, s) {
            (FieldKind::Dyadics, Scalar::Exact(r)) => {
                let mut d = r.denom().clone();
                let two = num::BigInt::from(2);
                while (&d % &two) == num::BigInt::from(0) {
                    d /= &two;
                }
                d == num::BigInt::from(1)
            }
            _ => true,
        }
    }
}

/// Largest Farey order R with |F_R| = 1 + sum of totients <= budget.
fn farey_order(budget: usize) -> u64 {
    let mut count: u64 = 2; // order 1 holds 0/1 and 1/1
    let mut order = 1;
    loop {
        let next = order + 1;
        let grown = count + totient(next);
        if grown > budget as u64 {
            return order;
        }
        count = grown;
        order = next;
        if order > 1 << 20 {
            return order; // budget absurdly large; F_R already past 3e11 samples
        }
    }
}

fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The parameter set T intersected with [0,1], as supplied by the caller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum TSet {
    /// The singleton {1/2}: midpoint (Jensen) convexity.
    JensenPoint,
    /// A uniform grid of m points on [0,1], standing in for T = [0,1].
    FullInterval { m: usize },
    /// The subfield's unit interval, sampled per its budget.
    FieldRestricted { field: FieldSpec },
    /// A caller-supplied finite set; values outside [0,1] are rejected.
    ExplicitList { values: Vec<Scalar> },
}

/// Enumerates the finite sample of T∩[0,1] in the given scalar mode, sorted
/// ascending and deduplicated.
pub fn enumerate_t(tset: &TSet, mode: ScalarMode) -> Result<Vec<Scalar>> {
    let out = match tset {
        TSet::JensenPoint => vec![Scalar::from_ratio(1, 2, mode)],
        TSet::FullInterval { m } => {
            if *m < 2 {
                return Err(Error::InvalidSpec(
                    "FullInterval grid resolution must be at least 2".into(),
                ));
            }
            (0..*m)
                .map(|k| Scalar::from_ratio(k as i64, *m as i64 - 1, mode))
                .collect()
        }
        TSet::FieldRestricted { field } => field.enumerate_unit_interval(mode)?,
        TSet::ExplicitList { values } => {
            crate::scalar::require_mode(mode, values, "explicit t-list")?;
            let zero = Scalar::zero(mode);
            let one = Scalar::one(mode);
            for v in values {
                if v.cmp_same_mode(&zero) == std::cmp::Ordering::Less
                    || v.cmp_same_mode(&one) == std::cmp::Ordering::Greater
                {
                    return Err(Error::InvalidSpec(format!(
                        "explicit t value {} outside [0,1]",
                        v.render()
                    )));
                }
            }
            let mut v = values.clone();
            sort_dedup(&mut v);
            v
        }
    };
    if out.is_empty() {
        return Err(Error::EmptyTSample);
    }
    Ok(out)
}

/// Dyadic probe scales 1, 1/2, 1/4, ..., 2^{-k_max}, in decreasing order.
/// These lie in every supported subfield.
pub fn dyadic_probes(k_max: u32, mode: ScalarMode) -> Vec<Scalar> {
    (0..=k_max.min(62))
        .map(|k| Scalar::from_ratio(1, 1i64 << k, mode))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn renders(v: &[Scalar]) -> Vec<String> {
        v.iter().map(Scalar::render).collect()
    }

    #[test]
    fn jensen_point_is_one_half() {
        let t = enumerate_t(&TSet::JensenPoint, ScalarMode::Exact).unwrap();
        assert_eq!(renders(&t), ["1/2"]);
    }

    #[test]
    fn full_interval_grid() {
        let t = enumerate_t(&TSet::FullInterval { m: 5 }, ScalarMode::Exact).unwrap();
        assert_eq!(renders(&t), ["0", "1/4", "1/2", "3/4", "1"]);
    }

    #[test]
    fn dyadics_depth_two_for_budgets_five_through_eight() {
        for budget in 5..=8 {
            let field = FieldSpec::new(FieldKind::Dyadics, budget).unwrap();
            let t = field.enumerate_unit_interval(ScalarMode::Exact).unwrap();
            assert_eq!(
                renders(&t),
                ["0", "1/4", "1/2", "3/4", "1"],
                "budget {budget}"
            );
        }
    }

    #[test]
    fn rationals_farey_orders() {
        // |F_3| = 5, |F_4| = 7.
        let f3 = FieldSpec::new(FieldKind::Rationals, 6).unwrap();
        let t = f3.enumerate_unit_interval(ScalarMode::Exact).unwrap();
        assert_eq!(renders(&t), ["0", "1/3", "1/2", "2/3", "1"]);

        let f4 = FieldSpec::new(FieldKind::Rationals, 7).unwrap();
        let t = f4.enumerate_unit_interval(ScalarMode::Exact).unwrap();
        assert_eq!(renders(&t), ["0", "1/4", "1/3", "1/2", "2/3", "3/4", "1"]);
    }

    #[test]
    fn reals_uniform_grid_spends_whole_budget() {
        let f = FieldSpec::new(FieldKind::Reals, 5).unwrap();
        let t = f.enumerate_unit_interval(ScalarMode::Float).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t[0].to_f64(), 0.0);
        assert_eq!(t[2].to_f64(), 0.5);
        assert_eq!(t[4].to_f64(), 1.0);
    }

    #[test]
    fn explicit_list_sorts_and_dedups() {
        let values = vec![Scalar::Float(0.3), Scalar::Float(0.3), Scalar::Float(1.0)];
        let t = enumerate_t(&TSet::ExplicitList { values }, ScalarMode::Float).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].to_f64(), 0.3);
        assert_eq!(t[1].to_f64(), 1.0);
    }

    #[test]
    fn explicit_list_rejects_out_of_range_and_empty() {
        let bad = TSet::ExplicitList {
            values: vec![Scalar::Float(1.5)],
        };
        assert!(enumerate_t(&bad, ScalarMode::Float).is_err());

        let empty = TSet::ExplicitList { values: vec![] };
        let err = enumerate_t(&empty, ScalarMode::Float).unwrap_err();
        assert_eq!(err.to_string(), "empty T∩[0,1]");
    }

    #[test]
    fn dyadic_membership_in_exact_mode() {
        let f = FieldSpec::new(FieldKind::Dyadics, 8).unwrap();
        assert!(f.contains(&Scalar::from_ratio(3, 8, ScalarMode::Exact)));
        assert!(!f.contains(&Scalar::from_ratio(1, 3, ScalarMode::Exact)));
    }

    #[test]
    fn probes_are_descending_powers_of_two() {
        let p = dyadic_probes(3, ScalarMode::Exact);
        assert_eq!(renders(&p), ["1", "1/2", "1/4", "1/8"]);
    }
}

//! Properties of the monotone-map machinery: the chain graph, the two cycle
//! deciders, reconstruction, and the subdifferential — each claim recomputed
//! here from first principles rather than trusted.

use std::cmp::Ordering;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strongconv::{
    alpha_cyclic_monotone, alpha_monotone, check_jensen, check_strong_convexity, reconstruct,
    subdiff_1d, BoxDomain, ChainGraph, FieldKind, FieldSpec, FunctionOracle, LinearFunctional,
    Modulus, MultiMap, Point, Scalar, ScalarMode, TSet, Verdict, DEFAULT_TOLERANCE,
};

fn ex(n: i64, d: i64) -> Scalar {
    Scalar::from_ratio(n, d, ScalarMode::Exact)
}

/// A random one-dimensional map: 2..=max_n distinct rational carrier points,
/// one or two random linear functionals at each.
fn random_map(rng: &mut ChaCha8Rng, max_n: usize) -> MultiMap {
    let n = rng.gen_range(2..=max_n);
    let mut xs: Vec<Scalar> = Vec::new();
    while xs.len() < n {
        let v = ex(rng.gen_range(-8..=8), rng.gen_range(1..=3));
        if xs.iter().all(|u| u.cmp_same_mode(&v) != Ordering::Equal) {
            xs.push(v);
        }
    }
    let carrier: Vec<Point> = xs.into_iter().map(|v| Point(vec![v])).collect();
    let values = carrier
        .iter()
        .map(|_| {
            (0..rng.gen_range(1..=2))
                .map(|_| LinearFunctional(vec![ex(rng.gen_range(-6..=6), rng.gen_range(1..=2))]))
                .collect()
        })
        .collect();
    MultiMap { carrier, values }
}

/// The gradient map of x ↦ a·x² on a random distinct carrier: Φ(x) = {2a·x}.
fn gradient_map(rng: &mut ChaCha8Rng, a: &Scalar, max_n: usize) -> MultiMap {
    let n = rng.gen_range(2..=max_n);
    let mut xs: Vec<Scalar> = Vec::new();
    while xs.len() < n {
        let v = ex(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        if xs.iter().all(|u| u.cmp_same_mode(&v) != Ordering::Equal) {
            xs.push(v);
        }
    }
    let two_a = &ex(2, 1) * a;
    let values = xs
        .iter()
        .map(|x| vec![LinearFunctional(vec![&two_a * x])])
        .collect();
    MultiMap {
        carrier: xs.into_iter().map(|v| Point(vec![v])).collect(),
        values,
    }
}

/// Every simple cycle over n nodes, each listed once, starting at its
/// minimum index (self-loops included, U-turns included).
fn enumerate_cycles(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn extend(
        seq: &mut Vec<usize>,
        used: &mut [bool],
        n: usize,
        max_len: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(seq.clone());
        if seq.len() == max_len {
            return;
        }
        for j in (seq[0] + 1)..n {
            if !used[j] {
                used[j] = true;
                seq.push(j);
                extend(seq, used, n, max_len, out);
                seq.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut used = vec![false; n];
        used[s] = true;
        extend(&mut vec![s], &mut used, n, max_len, &mut out);
    }
    out
}

/// Literal maximum of Σᵢ φᵢ(x_{i+1}-xᵢ) + α(x_{i+1}-xᵢ) over every joint
/// choice of one functional per visited node, by odometer.
fn joint_cycle_max(map: &MultiMap, alpha: &Modulus, cycle: &[usize]) -> Scalar {
    let l = cycle.len();
    let mut choice = vec![0usize; l];
    let mut best: Option<Scalar> = None;
    loop {
        let mut total = Scalar::zero(map.mode());
        for e in 0..l {
            let i = cycle[e];
            let j = cycle[(e + 1) % l];
            let step = map.carrier[j].sub(&map.carrier[i]);
            let phi = &map.values[i][choice[e]];
            total = &total + &(&phi.apply(&step) + &alpha.eval(&step).unwrap());
        }
        if best
            .as_ref()
            .is_none_or(|b| total.cmp_same_mode(b) == Ordering::Greater)
        {
            best = Some(total);
        }
        let mut e = 0;
        loop {
            if e == l {
                return best.unwrap();
            }
            choice[e] += 1;
            if choice[e] < map.values[cycle[e]].len() {
                break;
            }
            choice[e] = 0;
            e += 1;
        }
    }
}

fn float_twin(map: &MultiMap) -> MultiMap {
    MultiMap {
        carrier: map
            .carrier
            .iter()
            .map(|p| Point(p.0.iter().map(|v| Scalar::Float(v.to_f64())).collect()))
            .collect(),
        values: map
            .values
            .iter()
            .map(|fs| {
                fs.iter()
                    .map(|f| {
                        LinearFunctional(f.0.iter().map(|v| Scalar::Float(v.to_f64())).collect())
                    })
                    .collect()
            })
            .collect(),
    }
}

/// The chain graph's per-edge maxima lose nothing: summing them along any
/// cycle equals the literal joint maximum over per-node functional choices.
#[test]
fn edge_maxima_separate_joint_cycle_maxima() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let moduli = [
        Modulus::Zero,
        Modulus::Quadratic { c: ex(1, 1) },
        Modulus::Quadratic { c: ex(1, 2) },
    ];
    for round in 0..40 {
        let map = random_map(&mut rng, 5);
        let alpha = &moduli[round % moduli.len()];
        let graph = ChainGraph::build(&map, alpha).unwrap();
        for cycle in enumerate_cycles(map.carrier.len(), map.carrier.len()) {
            let mut edge_sum = Scalar::zero(ScalarMode::Exact);
            for e in 0..cycle.len() {
                edge_sum = &edge_sum + &graph.weights[cycle[e]][cycle[(e + 1) % cycle.len()]];
            }
            let joint = joint_cycle_max(&map, alpha, &cycle);
            assert_eq!(
                edge_sum.cmp_same_mode(&joint),
                Ordering::Equal,
                "cycle {cycle:?}: edge sum {} vs joint max {}",
                edge_sum.render(),
                joint.render()
            );
        }
    }
}

/// Length-two cycles subsume the pairwise criterion: a cyclic Pass forces a
/// pairwise Pass on the same map and modulus.
#[test]
fn cyclic_passes_imply_pairwise_passes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut passes = 0usize;
    for round in 0..60 {
        let map = if round % 2 == 0 {
            random_map(&mut rng, 5)
        } else {
            // Gradient maps of a·x² with c ≤ a: guaranteed cyclic Pass.
            let a = ex(rng.gen_range(1..=6), rng.gen_range(1..=2));
            gradient_map(&mut rng, &a, 5)
        };
        let alpha = Modulus::Quadratic {
            c: ex(rng.gen_range(1..=4), 4),
        };
        let alpha = if round % 2 == 0 { alpha } else { Modulus::Zero };
        let n = map.carrier.len();
        let cyclic = alpha_cyclic_monotone(&map, &alpha, n, DEFAULT_TOLERANCE).unwrap();
        if cyclic.verdict == Verdict::Pass {
            passes += 1;
            let pairwise = alpha_monotone(&map, &alpha, DEFAULT_TOLERANCE).unwrap();
            assert_eq!(
                pairwise.verdict,
                Verdict::Pass,
                "cyclic Pass but pairwise Fail on {map:?}"
            );
        }
    }
    assert!(
        passes >= 10,
        "only {passes} cyclic passes: generator too weak"
    );
}

/// The modulus only tightens the pairwise criterion: a Pass against a
/// nonnegative modulus implies a Pass against the zero modulus.
#[test]
fn modulus_monotonicity_implies_plain_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut passes = 0usize;
    for round in 0..60 {
        let map = if round % 2 == 0 {
            random_map(&mut rng, 6)
        } else {
            let a = ex(rng.gen_range(1..=6), rng.gen_range(1..=2));
            gradient_map(&mut rng, &a, 6)
        };
        let c = if round % 2 == 0 {
            ex(rng.gen_range(1..=4), 4)
        } else {
            ex(1, 4) // below every generated a ≥ 1/2
        };
        let with_gap = alpha_monotone(&map, &Modulus::Quadratic { c }, DEFAULT_TOLERANCE).unwrap();
        if with_gap.verdict == Verdict::Pass {
            passes += 1;
            let plain = alpha_monotone(&map, &Modulus::Zero, DEFAULT_TOLERANCE).unwrap();
            assert_eq!(plain.verdict, Verdict::Pass);
        }
    }
    assert!(passes >= 10, "only {passes} passes: generator too weak");
}

/// The relaxation decider's verdict matches a literal enumeration of every
/// simple cycle, in both arithmetic modes.
#[test]
fn relaxation_agrees_with_literal_cycle_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let moduli = [
        Modulus::Zero,
        Modulus::Quadratic { c: ex(1, 1) },
        Modulus::Quadratic { c: ex(3, 2) },
    ];
    for round in 0..40 {
        let map = random_map(&mut rng, 6);
        let alpha = &moduli[round % moduli.len()];
        let n = map.carrier.len();
        let zero = Scalar::zero(ScalarMode::Exact);
        let brute_fail = enumerate_cycles(n, n)
            .iter()
            .any(|cy| joint_cycle_max(&map, alpha, cy).gt_margin(&zero, DEFAULT_TOLERANCE));
        let report = alpha_cyclic_monotone(&map, alpha, n, DEFAULT_TOLERANCE).unwrap();
        let expected = if brute_fail {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        assert_eq!(
            report.verdict, expected,
            "exact verdict mismatch on {map:?}"
        );

        // Same map and modulus pushed through f64 arithmetic.
        let fmap = float_twin(&map);
        let falpha = match alpha {
            Modulus::Zero => Modulus::Zero,
            Modulus::Quadratic { c } => Modulus::Quadratic {
                c: Scalar::Float(c.to_f64()),
            },
            other => other.clone(),
        };
        let fzero = Scalar::zero(ScalarMode::Float);
        let fbrute = enumerate_cycles(n, n)
            .iter()
            .any(|cy| joint_cycle_max(&fmap, &falpha, cy).gt_margin(&fzero, DEFAULT_TOLERANCE));
        let freport = alpha_cyclic_monotone(&fmap, &falpha, n, DEFAULT_TOLERANCE).unwrap();
        let fexpected = if fbrute { Verdict::Fail } else { Verdict::Pass };
        assert_eq!(
            freport.verdict, fexpected,
            "float verdict mismatch on {fmap:?}"
        );
    }
}

proptest! {
    /// Reconstructed tables anchor the base value at zero and satisfy the
    /// strengthened subgradient inequality for every datum — re-substituted
    /// literally over all carrier pairs.
    #[test]
    fn reconstructions_satisfy_their_subgradient_data(
        an in 1i64..=8, ad in 1i64..=2,
        ck in 1i64..=10,
        seed in 0u64..4096,
        base_pick in 0usize..8,
    ) {
        let a = ex(an, ad);
        let c = &(&a * &ex(ck, 1)) / &ex(10, 1); // c = a·k/10 ≤ a
        let alpha = Modulus::Quadratic { c };
        let mut rng = ChaCha8Rng::seed_from_u64(0xba5e_0000 + seed);
        let map = gradient_map(&mut rng, &a, 6);
        let base = base_pick % map.carrier.len();
        let f = reconstruct(&map, &alpha, base, DEFAULT_TOLERANCE).unwrap();
        let FunctionOracle::Tabulated { points, values } = &f else {
            panic!("reconstruction is tabulated by construction");
        };
        prop_assert_eq!(points.len(), map.carrier.len());
        prop_assert!(values[base].is_zero(), "base value {} ≠ 0", values[base].render());
        for i in 0..points.len() {
            for j in 0..points.len() {
                let step = points[j].sub(&points[i]);
                let gap = alpha.eval(&step).unwrap();
                for phi in &map.values[i] {
                    let floor = &(&values[i] + &phi.apply(&step)) + &gap;
                    prop_assert!(
                        floor.le_tol(&values[j], 0.0),
                        "table violates its datum at {} → {}",
                        points[i].render(), points[j].render()
                    );
                }
            }
        }
    }

    /// On a uniform dyadic carrier the reconstruction of the gradient map of
    /// a·x² against a·u² recovers the parabola exactly, and the tabulated
    /// subdifferential at interior carrier points collapses to the true
    /// slope — containing the generating datum.
    #[test]
    fn subdifferentials_contain_the_generating_slopes(an in 1i64..=8, ad in 1i64..=2) {
        let a = ex(an, ad);
        let two_a = &ex(2, 1) * &a;
        let carrier: Vec<Point> = (-8..=8).map(|j| Point(vec![ex(j, 8)])).collect();
        let values = carrier
            .iter()
            .map(|p| vec![LinearFunctional(vec![&two_a * &p.0[0]])])
            .collect();
        let map = MultiMap { carrier, values };
        let alpha = Modulus::Quadratic { c: a.clone() };
        let f = reconstruct(&map, &alpha, 8, DEFAULT_TOLERANCE).unwrap();
        let FunctionOracle::Tabulated { points, values } = &f else {
            panic!("reconstruction is tabulated by construction");
        };
        for (p, v) in points.iter().zip(values) {
            let expect = &a * &p.0[0].powi(2);
            prop_assert_eq!(
                v.cmp_same_mode(&expect), Ordering::Equal,
                "table {} ≠ {} at {}", v.render(), expect.render(), p.render()
            );
        }
        let dom = BoxDomain::new(Point(vec![ex(-2, 1)]), Point(vec![ex(2, 1)])).unwrap();
        let field = FieldSpec::new(FieldKind::Dyadics, 5).unwrap();
        for num in [-4i64, -2, 0, 2, 4] {
            let x0 = Point(vec![ex(num, 8)]);
            let slope = &two_a * &x0.0[0];
            let iv = subdiff_1d(&f, &dom, &x0, &field, 8, DEFAULT_TOLERANCE).unwrap();
            prop_assert_eq!(iv.lo.as_ref(), Some(&slope));
            prop_assert_eq!(iv.hi.as_ref(), Some(&slope));
        }
    }
}

/// Reconstructed tables pass the sampled convexity checks on their own
/// carrier: collinear combinations that land on tabulated points satisfy
/// the strong inequality.
#[test]
fn reconstructions_pass_the_midpoint_check_on_their_carrier() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_000a);
    let dom = BoxDomain::new(Point(vec![ex(-2, 1)]), Point(vec![ex(2, 1)])).unwrap();
    for _ in 0..10 {
        let a = ex(rng.gen_range(1..=6), rng.gen_range(1..=2));
        let c = &(&a * &ex(rng.gen_range(1..=10), 1)) / &ex(10, 1);
        let alpha = Modulus::Quadratic { c };
        let carrier: Vec<Point> = (-4..=4).map(|j| Point(vec![ex(j, 4)])).collect();
        let two_a = &ex(2, 1) * &a;
        let values = carrier
            .iter()
            .map(|p| vec![LinearFunctional(vec![&two_a * &p.0[0]])])
            .collect();
        let map = MultiMap { carrier, values };
        let base = rng.gen_range(0..9);
        let f = reconstruct(&map, &alpha, base, DEFAULT_TOLERANCE).unwrap();

        let jensen = check_jensen(&f, &alpha, &dom, 4, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(
            jensen.verdict,
            Verdict::Pass,
            "midpoint Fail: {:?}",
            jensen.witness
        );
        assert!(jensen.samples_checked > 0, "no evaluable midpoint triple");

        let full = check_strong_convexity(
            &f,
            &alpha,
            &dom,
            &TSet::FullInterval { m: 4 },
            4,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(
            full.verdict,
            Verdict::Pass,
            "interval Fail: {:?}",
            full.witness
        );
        assert!(full.samples_checked > 0);
    }
}

//! Invariant battery: cross-checks between independent routes (walk closure
//! vs chain enumeration, original vs conjugate, classifier vs decay lemma)
//! on the shipped fixtures and seeded random instances.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quasifix_core::admissibility::{
    check_c1_c2, check_contraction, find_seed_points, AdmissiblePair, ContractionForm,
    SeedProfile, SelfMap,
};
use quasifix_core::certifier::{certify, Certificate, Problem, Profile};
use quasifix_core::io;
use quasifix_core::picard::{iterate, verify_chain_bound, verify_decay, Termination};
use quasifix_core::search::{gen_instance, gen_space, min_chain_total, GenConfig};
use quasifix_core::sequence::{CauchyKind, SeqPrefix};
use quasifix_core::space::{CompletenessFlag, KBound, QPSpace};
use quasifix_core::Rat;

fn r(s: &str) -> Rat {
    s.parse().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn p3() -> QPSpace {
    io::load_space(&fixture("P3.json")).unwrap()
}

fn t3() -> QPSpace {
    io::load_space(&fixture("T3.json")).unwrap()
}

fn space_cfg(points: usize, seed: u64) -> GenConfig {
    GenConfig::new(points, GenConfig::default_grid(), seed, 1).unwrap()
}

/// Random spaces of 2..=5 points, deterministic per index.
fn random_spaces(count: usize, seed: u64) -> Vec<QPSpace> {
    (0..count)
        .map(|i| gen_space(&space_cfg(2 + i % 4, seed + i as u64)).unwrap())
        .collect()
}

fn random_sequence(rng: &mut ChaCha8Rng, space: &QPSpace) -> Vec<usize> {
    let len = rng.gen_range(3..15);
    (0..len).map(|_| rng.gen_range(0..space.len())).collect()
}

// ---------------------------------------------------------------------------
// space axioms
// ---------------------------------------------------------------------------

#[test]
fn fixtures_reproduce_frozen_values() {
    let p3 = p3();
    assert_eq!(p3.minimal_k().unwrap(), KBound::Finite(r("10/9")));
    assert!(p3.check_d2(&r("2")).unwrap().is_none());
    let witness = p3.check_d2(&r("1")).unwrap().unwrap();
    assert_eq!(witness.lhs, r("1/2"));
    assert_eq!(witness.chain.total, r("9/20"));
    assert!(p3.has_flag(CompletenessFlag::LeftComplete));

    let t3 = t3();
    assert_eq!(t3.minimal_k().unwrap(), KBound::Finite(r("15/11")));
    let walk = t3.shortest_walk().unwrap();
    assert_eq!(walk[0][2], r("11/10"));
    // Independent enumeration oracle agrees with the walk closure.
    assert_eq!(min_chain_total(&t3, "p", "r", 3).unwrap(), r("11/10"));
    for (i, from) in t3.points().iter().enumerate() {
        for (j, to) in t3.points().iter().enumerate() {
            assert_eq!(min_chain_total(&t3, from, to, t3.len()).unwrap(), walk[i][j]);
        }
    }
}

#[test]
fn walk_never_exceeds_direct_distance() {
    for space in random_spaces(100, 100) {
        let walk = space.shortest_walk().unwrap();
        for i in 0..space.len() {
            for j in 0..space.len() {
                assert!(walk[i][j] <= *space.d(i, j));
            }
        }
    }
}

#[test]
fn minimal_k_is_at_least_one_for_positive_pairs() {
    for space in random_spaces(100, 200) {
        let has_positive = (0..space.len())
            .any(|i| (0..space.len()).any(|j| space.d(i, j).is_positive()));
        match space.minimal_k().unwrap() {
            KBound::Finite(k) if has_positive => assert!(k >= Rat::one()),
            KBound::Finite(k) => assert!(k.is_zero()),
            KBound::Infinite => panic!("generated spaces always admit a finite coefficient"),
        }
    }
}

#[test]
fn d2_holds_exactly_above_minimal_k() {
    let delta = r("1/1000");
    for space in random_spaces(100, 300) {
        let KBound::Finite(k_min) = space.minimal_k().unwrap() else {
            panic!("finite by construction")
        };
        if k_min.is_zero() {
            assert!(space.check_d2(&Rat::one()).unwrap().is_none());
            continue;
        }
        assert!(space.check_d2(&k_min).unwrap().is_none());
        assert!(space.check_d2(&(&k_min + &delta)).unwrap().is_none());
        assert!(space.check_d2(&(&k_min - &delta)).unwrap().is_some());
    }
}

#[test]
fn oracle_agrees_with_check_d2_at_random_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(350);
    for space in random_spaces(40, 351) {
        for _ in 0..20 {
            let k = Rat::new(rng.gen_range(1..40), rng.gen_range(1..12));
            assert_eq!(
                space.check_d2(&k).unwrap().is_none(),
                quasifix_core::search::d2_oracle(&space, &k, space.len()),
                "disagreement at k = {k}"
            );
        }
    }
}

#[test]
fn conjugate_preserves_axiom_verdicts() {
    for space in random_spaces(100, 400) {
        let conj = space.conjugate();
        assert_eq!(space.check_d1().is_none(), conj.check_d1().is_none());
        assert_eq!(space.check_t0().is_none(), conj.check_t0().is_none());
        let KBound::Finite(k_min) = space.minimal_k().unwrap() else { unreachable!() };
        assert_eq!(conj.minimal_k().unwrap(), KBound::Finite(k_min.clone()));
        for k in [&k_min + &Rat::one(), space.coeff_k().clone()] {
            assert_eq!(
                space.check_d2(&k).unwrap().is_none(),
                conj.check_d2(&k).unwrap().is_none()
            );
        }
    }
}

#[test]
fn symmetrize_dominates_and_is_metric_type() {
    for space in random_spaces(100, 500) {
        let sym = space.symmetrize();
        for i in 0..space.len() {
            for j in 0..space.len() {
                assert!(sym.d(i, j) >= space.d(i, j));
                assert!(sym.d(i, j) >= space.d(j, i));
            }
        }
        // Generated spaces satisfy D2 at their declared coefficient; when T0
        // also holds the symmetrization is a metric-type at the same one.
        if space.check_t0().is_none() {
            assert!(sym.check_metric_type(space.coeff_k()));
        }
    }
}

#[test]
fn coefficient_one_recovers_classical_triangle() {
    // Line embeddings satisfy the plain triangle inequality exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    for _ in 0..50 {
        let n = rng.gen_range(2..6);
        let coords: Vec<i64> = (0..n).map(|_| rng.gen_range(0..40)).collect();
        let points: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let dist: Vec<Vec<Rat>> = coords
            .iter()
            .map(|&a| coords.iter().map(|&b| Rat::new((a - b).abs(), 4)).collect())
            .collect();
        let space = QPSpace::new(points, dist, Rat::one(), BTreeSet::new()).unwrap();
        assert!(space.check_d2(&Rat::one()).unwrap().is_none());
        let has_positive = coords.iter().any(|&c| c != coords[0]);
        if has_positive {
            assert_eq!(space.minimal_k().unwrap(), KBound::Finite(Rat::one()));
        }
    }
}

// ---------------------------------------------------------------------------
// sequence classification
// ---------------------------------------------------------------------------

#[test]
fn cauchy_duality_and_ds_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let mut corpus: Vec<(QPSpace, Vec<usize>)> = vec![
        (p3(), vec![0, 1, 2, 2, 2]),
        (t3(), vec![0, 1, 2, 2, 2]),
        (t3(), vec![0, 1, 0, 1, 0, 1]),
    ];
    for space in random_spaces(100, 701) {
        let seq = random_sequence(&mut rng, &space);
        corpus.push((space, seq));
    }
    let epsilons = [r("1/10"), r("1/2"), r("2")];
    for (space, entries) in &corpus {
        let conj = space.conjugate();
        let seq = SeqPrefix::from_indices(space, entries.clone()).unwrap();
        let conj_seq = SeqPrefix::from_indices(&conj, entries.clone()).unwrap();
        for eps in &epsilons {
            let left = seq.classify_cauchy(CauchyKind::LeftK, eps).unwrap();
            let right = seq.classify_cauchy(CauchyKind::RightK, eps).unwrap();
            let ds = seq.classify_cauchy(CauchyKind::Ds, eps).unwrap();

            // Left with respect to D is right with respect to the conjugate.
            let conj_right = conj_seq.classify_cauchy(CauchyKind::RightK, eps).unwrap();
            assert_eq!(left.holds_on_prefix, conj_right.holds_on_prefix);
            assert_eq!(left.witness_n0, conj_right.witness_n0);
            assert_eq!(
                left.violation.as_ref().map(|v| (v.k, v.n, v.distance.clone())),
                conj_right.violation.as_ref().map(|v| (v.k, v.n, v.distance.clone()))
            );

            // Ds holds exactly when both one-sided kinds hold.
            assert_eq!(ds.holds_on_prefix, left.holds_on_prefix && right.holds_on_prefix);
            if ds.holds_on_prefix {
                assert_eq!(
                    ds.witness_n0.unwrap(),
                    left.witness_n0.unwrap().max(right.witness_n0.unwrap())
                );
            }
        }
    }
}

#[test]
fn cauchy_verdicts_are_monotone_in_epsilon() {
    let mut rng = ChaCha8Rng::seed_from_u64(800);
    for space in random_spaces(60, 801) {
        let entries = random_sequence(&mut rng, &space);
        let seq = SeqPrefix::from_indices(&space, entries).unwrap();
        for kind in [CauchyKind::LeftK, CauchyKind::RightK, CauchyKind::Ds] {
            for eps in [r("1/20"), r("1/4"), r("1")] {
                let at = seq.classify_cauchy(kind, &eps).unwrap();
                let above = seq.classify_cauchy(kind, &(&eps * &r("2"))).unwrap();
                if at.holds_on_prefix {
                    assert!(above.holds_on_prefix);
                }
            }
        }
    }
}

/// Builds a symmetric line space whose consecutive gaps shrink by `lambda`,
/// together with the successor map; the Picard orbit from the first point
/// realizes an exactly geometric distance trace.
fn geometric_line(m: usize, lambda: &Rat, d0: &Rat) -> (QPSpace, SelfMap) {
    let mut positions = vec![Rat::zero()];
    let mut gap = d0.clone();
    for _ in 1..m {
        positions.push(positions.last().unwrap() + &gap);
        gap = &gap * lambda;
    }
    let points: Vec<String> = (0..m).map(|i| format!("v{i}")).collect();
    let dist: Vec<Vec<Rat>> = positions
        .iter()
        .map(|a| {
            positions
                .iter()
                .map(|b| if a >= b { a - b } else { b - a })
                .collect()
        })
        .collect();
    let space = QPSpace::new(points, dist, Rat::one(), BTreeSet::new()).unwrap();
    let mut images: Vec<usize> = (1..m).collect();
    images.push(m - 1);
    let map = SelfMap::from_indices(images, m).unwrap();
    (space, map)
}

#[test]
fn geometric_decay_implies_left_cauchy_on_long_prefixes() {
    for lambda in [r("1/10"), r("1/3"), r("1/2")] {
        let (space, f) = geometric_line(6, &lambda, &r("2"));
        let orbit = iterate(&space, &f, "v0", 10).unwrap();
        assert_eq!(verify_decay(&orbit, &lambda).unwrap(), None);

        // Extend to the infinite orbit's prefix by repeating the fixed point.
        let mut entries = orbit.entries().to_vec();
        let fp = orbit.fixed_point().unwrap();
        while entries.len() < 24 {
            entries.push(fp);
        }
        for len in [20, 22, 24] {
            let prefix = SeqPrefix::from_indices(&space, entries[..len].to_vec()).unwrap();
            for eps in [r("1/10"), r("1/100")] {
                let verdict = prefix.classify_cauchy(CauchyKind::LeftK, &eps).unwrap();
                assert!(verdict.holds_on_prefix, "lambda {lambda}, len {len}, eps {eps}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// admissibility
// ---------------------------------------------------------------------------

#[test]
fn constant_matrices_always_satisfy_c1_c2() {
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    for trial in 0..100 {
        let space = gen_space(&space_cfg(2 + trial % 5, 900 + trial as u64)).unwrap();
        let n = space.len();
        let f = SelfMap::from_indices((0..n).map(|_| rng.gen_range(0..n)).collect(), n).unwrap();
        let pair = AdmissiblePair::constant(n, r("1"), r("1/10")).unwrap();
        assert_eq!(check_c1_c2(&space, &f, &pair).unwrap(), None);
        assert_eq!(find_seed_points(&space, &f, &pair, SeedProfile::Left).unwrap().len(), n);
    }
}

#[test]
fn verified_contraction_bounds_orbit_decay() {
    let cfg = GenConfig::new(4, GenConfig::default_grid(), 1000, 400).unwrap();
    let mut checked = 0;
    for trial in 0..cfg.trials {
        let problem = gen_instance(&cfg, trial).unwrap();
        if check_contraction(&problem.space, &problem.map, &problem.pair, ContractionForm::D)
            .unwrap()
            .is_some()
        {
            continue;
        }
        let lambda = problem.pair.lambda();
        // Thresholds must actually bind on the orbit pairs for the per-step
        // inequality to follow; constant matrices guarantee it.
        for x0 in problem.space.points() {
            let orbit = iterate(&problem.space, &problem.map, x0, problem.space.len() + 1).unwrap();
            let binding = orbit.entries().windows(2).all(|w| {
                problem.pair.alpha(w[0], w[1]) >= problem.pair.c_alpha()
                    && problem.pair.beta(w[0], w[1]) <= problem.pair.c_beta()
            });
            if !binding {
                continue;
            }
            checked += 1;
            for w in orbit.step_dists().windows(2) {
                assert!(w[1] <= &lambda * &w[0]);
            }
            for ratio in orbit.decay_ratios() {
                assert!(ratio <= &lambda);
            }
        }
    }
    assert!(checked >= 100, "only {checked} binding orbits exercised");
}

#[test]
fn contraction_is_monotone_under_beta_scaling() {
    let cfg = GenConfig::new(4, GenConfig::default_grid(), 1100, 200).unwrap();
    let mut scaled_checked = 0;
    for trial in 0..cfg.trials {
        let problem = gen_instance(&cfg, trial).unwrap();
        if check_contraction(&problem.space, &problem.map, &problem.pair, ContractionForm::D)
            .unwrap()
            .is_some()
        {
            continue;
        }
        for factor in [r("1"), r("2"), r("5/2")] {
            let beta = problem
                .pair
                .beta_matrix()
                .iter()
                .map(|row| row.iter().map(|v| v * &factor).collect())
                .collect();
            let scaled = AdmissiblePair::new(
                problem.pair.alpha_matrix().to_vec(),
                beta,
                problem.pair.c_alpha().clone(),
                problem.pair.c_beta().clone(),
            )
            .unwrap();
            assert_eq!(
                check_contraction(&problem.space, &problem.map, &scaled, ContractionForm::D)
                    .unwrap(),
                None
            );
            scaled_checked += 1;
        }
    }
    assert!(scaled_checked > 0);
}

// ---------------------------------------------------------------------------
// picard
// ---------------------------------------------------------------------------

#[test]
fn chain_bound_slacks_are_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(1200);
    for trial in 0..100 {
        // Generated spaces satisfy D2 at their declared coefficient.
        let space = gen_space(&space_cfg(2 + trial % 5, 1200 + trial as u64)).unwrap();
        let n = space.len();
        let f = SelfMap::from_indices((0..n).map(|_| rng.gen_range(0..n)).collect(), n).unwrap();
        let x0 = space.point(rng.gen_range(0..n)).to_string();
        let orbit = iterate(&space, &f, &x0, n + 1).unwrap();
        for row in verify_chain_bound(&space, &orbit) {
            assert!(!row.slack.is_negative(), "negative slack at n={}", row.n);
            assert_eq!(row.slack, &row.rhs - &row.lhs);
        }
    }
}

#[test]
fn iteration_terminates_within_point_count_plus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1300);
    for trial in 0..100 {
        let space = gen_space(&space_cfg(2 + trial % 5, 1300 + trial as u64)).unwrap();
        let n = space.len();
        let f = SelfMap::from_indices((0..n).map(|_| rng.gen_range(0..n)).collect(), n).unwrap();
        let orbit = iterate(&space, &f, space.point(0), n + 1).unwrap();
        assert!(orbit.entries().len() <= n);
        assert!(!matches!(orbit.terminated(), Termination::BudgetExhausted));
    }
}

#[test]
fn right_decay_is_left_decay_on_the_conjugate() {
    let mut rng = ChaCha8Rng::seed_from_u64(1400);
    for trial in 0..100 {
        let space = gen_space(&space_cfg(2 + trial % 5, 1400 + trial as u64)).unwrap();
        let n = space.len();
        let f = SelfMap::from_indices((0..n).map(|_| rng.gen_range(0..n)).collect(), n).unwrap();
        let conj = space.conjugate();
        let orbit = iterate(&space, &f, space.point(0), n + 1).unwrap();
        let conj_orbit = iterate(&conj, &f, space.point(0), n + 1).unwrap();
        assert_eq!(orbit.entries(), conj_orbit.entries());

        // Conjugate steps are the reversed-direction distances.
        for (i, w) in orbit.entries().windows(2).enumerate() {
            assert_eq!(conj_orbit.step_dists()[i], *space.d(w[1], w[0]));
        }
        for lambda in [r("1/10"), r("1/2"), r("1")] {
            let mirrored = orbit.entries().windows(2).collect::<Vec<_>>().windows(2).all(|pair| {
                let prev = space.d(pair[0][1], pair[0][0]);
                let next = space.d(pair[1][1], pair[1][0]);
                *next <= &lambda * prev
            });
            assert_eq!(verify_decay(&conj_orbit, &lambda).unwrap().is_none(), mirrored);
        }
    }
}

// ---------------------------------------------------------------------------
// certifier
// ---------------------------------------------------------------------------

fn verdicts(cert: &Certificate) -> Vec<(String, quasifix_core::certifier::Verdict)> {
    cert.hypothesis_results.iter().map(|h| (h.name.clone(), h.verdict)).collect()
}

#[test]
fn profile_duality_on_fixtures_and_random_instances() {
    let t3 = t3();
    let map = SelfMap::new(&t3, [("p", "q"), ("q", "r"), ("r", "r")]).unwrap();
    let pair = AdmissiblePair::constant(3, r("1"), r("1/10")).unwrap();
    let mut problems =
        vec![Problem { space: t3, map, pair, seed: Some("p".into()) }];
    let cfg = GenConfig::new(4, GenConfig::default_grid(), 1500, 100).unwrap();
    for trial in 0..cfg.trials {
        problems.push(gen_instance(&cfg, trial).unwrap());
    }

    for problem in &problems {
        let right = certify(problem, Profile::Fix1Right).unwrap();
        let dual = certify(&problem.conjugate(), Profile::Fix1).unwrap();
        assert_eq!(verdicts(&right), verdicts(&dual));
        assert_eq!(right.fixed_point, dual.fixed_point);
        assert_eq!(right.lambda, dual.lambda);
        match (&right.orbit, &dual.orbit) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                assert_eq!(a.entries, b.entries);
                assert_eq!(a.terminated, b.terminated);
                // Dual step distances are the reversed-direction originals.
                let entries: Vec<usize> = a
                    .entries
                    .iter()
                    .map(|p| problem.space.index_of(p).unwrap())
                    .collect();
                for (i, w) in entries.windows(2).enumerate() {
                    assert_eq!(b.step_dists[i], *problem.space.d(w[1], w[0]));
                }
            }
            other => panic!("orbit presence must match, got {other:?}"),
        }
    }
}

#[test]
fn min_seed_profile_coincides_with_left_for_symmetric_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1600);
    for trial in 0..100 {
        let space = gen_space(&space_cfg(2 + trial % 5, 1600 + trial as u64)).unwrap();
        let n = space.len();
        let f = SelfMap::from_indices((0..n).map(|_| rng.gen_range(0..n)).collect(), n).unwrap();
        // Random symmetric threshold matrices.
        let mut alpha = vec![vec![Rat::zero(); n]; n];
        let mut beta = vec![vec![Rat::zero(); n]; n];
        let choices = [r("1/2"), r("1"), r("2")];
        for i in 0..n {
            for j in i..n {
                let a = choices[rng.gen_range(0..3)].clone();
                let b = choices[rng.gen_range(0..3)].clone();
                alpha[i][j] = a.clone();
                alpha[j][i] = a;
                beta[i][j] = b.clone();
                beta[j][i] = b;
            }
        }
        let pair = AdmissiblePair::new(alpha, beta, r("1"), r("1")).unwrap();
        assert!(pair.is_symmetric());
        assert_eq!(
            find_seed_points(&space, &f, &pair, SeedProfile::Left).unwrap(),
            find_seed_points(&space, &f, &pair, SeedProfile::Min).unwrap()
        );
    }
}

#[test]
fn certified_lambda_stays_below_one_over_k() {
    let cfg = GenConfig::new(4, GenConfig::default_grid(), 1700, 200).unwrap();
    for trial in 0..cfg.trials {
        let problem = gen_instance(&cfg, trial).unwrap();
        let cert = certify(&problem, Profile::Fix1).unwrap();
        let c3_verified = cert
            .hypothesis_results
            .iter()
            .any(|h| h.name == "c3" && h.verdict == quasifix_core::certifier::Verdict::Verified);
        if c3_verified {
            assert!(&cert.lambda * problem.space.coeff_k() < Rat::one());
        }
    }
}

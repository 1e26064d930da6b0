use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softopt_core::nsga2::{run, select_survivors, RankedIndividual};
use softopt_core::{
    dominates, hypervolume_2d, non_dominated_sort, oat_analysis, pareto_front, DesignSpace, DesignVector, Executor,
    ObjectiveVector, Outcome, Param, SolverConfig, Trial,
};

fn ov(v: Vec<f64>) -> ObjectiveVector {
    ObjectiveVector::new(v).unwrap()
}

fn points(m: usize, max_n: usize) -> impl Strategy<Value = Vec<ObjectiveVector>> {
    // Small integer grid so ties and duplicates are common.
    prop::collection::vec(prop::collection::vec(0u8..12, m), 1..max_n).prop_map(|rows| {
        rows.into_iter()
            .map(|r| ov(r.into_iter().map(f64::from).collect()))
            .collect()
    })
}

/// Fronts by repeatedly peeling the points no remaining point dominates.
fn brute_force_fronts(p: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..p.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&p[j], &p[i]).unwrap()))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn trial(id: u64, objectives: ObjectiveVector) -> Trial {
    Trial {
        trial_id: id,
        generation: 0,
        design: DesignVector::from_unchecked(vec![id as f64]),
        outcome: Outcome::Ok { objectives },
        rng_seed: 0,
        tag: String::new(),
        eval_seconds: 0.0,
    }
}

proptest! {
    #[test]
    fn dominance_is_antisymmetric(a in prop::collection::vec(-3i8..3, 3), b in prop::collection::vec(-3i8..3, 3)) {
        let a = ov(a.into_iter().map(f64::from).collect());
        let b = ov(b.into_iter().map(f64::from).collect());
        prop_assert!(!(dominates(&a, &b).unwrap() && dominates(&b, &a).unwrap()));
    }

    #[test]
    fn dominance_is_transitive(p in points(2, 4).prop_filter("three points", |p| p.len() == 3)) {
        if dominates(&p[0], &p[1]).unwrap() && dominates(&p[1], &p[2]).unwrap() {
            prop_assert!(dominates(&p[0], &p[2]).unwrap());
        }
    }

    #[test]
    fn sort_matches_brute_force_two_objectives(p in points(2, 120)) {
        prop_assert_eq!(non_dominated_sort(&p).unwrap(), brute_force_fronts(&p));
    }

    #[test]
    fn sort_matches_brute_force_three_objectives(p in points(3, 120)) {
        prop_assert_eq!(non_dominated_sort(&p).unwrap(), brute_force_fronts(&p));
    }

    #[test]
    fn hypervolume_is_permutation_invariant(p in points(2, 30), seed in any::<u64>()) {
        let reference = ov(vec![20.0, 20.0]);
        let mut shuffled = p.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        prop_assert_eq!(hypervolume_2d(&p, &reference).unwrap(), hypervolume_2d(&shuffled, &reference).unwrap());
    }

    #[test]
    fn hypervolume_is_monotone_under_insertion(p in points(2, 30), extra in (0u8..12, 0u8..12)) {
        let reference = ov(vec![20.0, 20.0]);
        let before = hypervolume_2d(&p, &reference).unwrap();
        let mut more = p.clone();
        more.push(ov(vec![f64::from(extra.0), f64::from(extra.1)]));
        prop_assert!(hypervolume_2d(&more, &reference).unwrap() >= before);
    }

    #[test]
    fn negation_round_trip_keeps_front_membership(p in points(2, 40)) {
        // A maximized objective stored negated, then negated again by a
        // second boundary, must select the same trials.
        let direct: Vec<Trial> = p.iter().enumerate().map(|(i, o)| trial(i as u64, o.clone())).collect();
        let twice: Vec<Trial> = p.iter().enumerate().map(|(i, o)| trial(i as u64, o.negated().negated())).collect();
        let ids = |f: Vec<Trial>| f.into_iter().map(|t| t.trial_id).collect::<Vec<_>>();
        prop_assert_eq!(ids(pareto_front(&direct).trials), ids(pareto_front(&twice).trials));
    }

    #[test]
    fn pareto_front_members_are_never_dominated(p in points(2, 60)) {
        let trials: Vec<Trial> = p.iter().enumerate().map(|(i, o)| trial(i as u64, o.clone())).collect();
        for member in pareto_front(&trials).trials {
            for t in &trials {
                prop_assert!(!dominates(t.objectives().unwrap(), member.objectives().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn survivors_never_skip_a_better_front(ranks in prop::collection::vec(0usize..4, 2..40), keep in 1usize..40) {
        let ranked: Vec<RankedIndividual> = ranks
            .iter()
            .enumerate()
            .map(|(i, &rank)| RankedIndividual {
                design: DesignVector::from_unchecked(vec![i as f64]),
                objectives: None,
                rank,
                crowding: (i % 5) as f64,
                trial_index: i,
            })
            .collect();
        let kept = select_survivors(ranked.clone(), keep);
        let worst_kept = kept.iter().map(|r| r.rank).max().unwrap();
        for r in &ranked {
            if r.rank < worst_kept {
                prop_assert!(kept.iter().any(|k| k.trial_index == r.trial_index));
            }
        }
    }
}

fn schaffer(x: &DesignVector) -> Outcome {
    let v = x.values()[0];
    Outcome::Ok {
        objectives: ov(vec![v * v, (v - 2.0) * (v - 2.0)]),
    }
}

fn two_d_problem(x: &DesignVector) -> Outcome {
    let v = x.values();
    Outcome::Ok {
        objectives: ov(vec![v[0], (1.0 + v[1]) * (1.0 - v[0].sqrt())]),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_spends_exactly_the_budget_inside_the_box(
        seed in any::<u64>(),
        pop in 2usize..20,
        extra in 0usize..70,
    ) {
        let space = DesignSpace::new(vec![Param::new("a", 0.0, 1.0, ""), Param::new("b", 0.0, 1.0, "")]).unwrap();
        let config = SolverConfig { population_size: pop, budget: pop + extra, seed, ..SolverConfig::default() };
        let study = run(&space, two_d_problem, &config).unwrap();
        prop_assert_eq!(study.trials.len(), config.budget);
        for (k, t) in study.trials.iter().enumerate() {
            prop_assert_eq!(t.trial_id, k as u64);
            prop_assert!(space.contains(&t.design));
        }
    }

    #[test]
    fn solver_is_a_pure_function_of_the_seed(seed in any::<u64>()) {
        let space = DesignSpace::new(vec![Param::new("x", -5.0, 5.0, "")]).unwrap();
        let config = SolverConfig { population_size: 10, budget: 60, seed, ..SolverConfig::default() };
        let a = run(&space, schaffer, &config).unwrap();
        let b = run(&space, schaffer, &config).unwrap();
        prop_assert_eq!(serde_json::to_string(&a.trials).unwrap(), serde_json::to_string(&b.trials).unwrap());
    }

    #[test]
    fn archive_hypervolume_is_non_decreasing(seed in any::<u64>()) {
        let space = DesignSpace::new(vec![Param::new("x", -5.0, 5.0, "")]).unwrap();
        let config = SolverConfig { population_size: 10, budget: 100, seed, ..SolverConfig::default() };
        let study = run(&space, schaffer, &config).unwrap();
        let reference = ov(vec![50.0, 50.0]);
        let mut last = 0.0;
        for g in 0..study.generations() {
            let front: Vec<ObjectiveVector> = pareto_front(study.up_to_generation(g))
                .trials
                .iter()
                .map(|t| t.objectives().unwrap().clone())
                .collect();
            let hv = hypervolume_2d(&front, &reference).unwrap();
            prop_assert!(hv >= last);
            last = hv;
        }
    }

    #[test]
    fn oat_normalized_values_are_scale_free(weights in prop::collection::vec(-4.0f64..4.0, 3), scale in 0.01f64..100.0) {
        let space = DesignSpace::new((0..3).map(|i| Param::new(format!("x{i}"), 0.0, 1.0, "")).collect()).unwrap();
        let baseline = space.center();
        let names = vec!["f".to_string()];
        let eval = |s: f64| {
            let w = weights.clone();
            move |x: &DesignVector| Outcome::Ok {
                objectives: ov(vec![s * x.values().iter().zip(&w).map(|(a, b)| a * a * b).sum::<f64>()]),
            }
        };
        let a = oat_analysis(&space, &baseline, eval(1.0), &names, &Executor::sequential()).unwrap();
        let b = oat_analysis(&space, &baseline, eval(scale), &names, &Executor::sequential()).unwrap();
        prop_assert_eq!(a.evaluations, 7);
        for (p, q) in a.column(0).iter().zip(b.column(0)) {
            prop_assert!((0.0..=1.0).contains(&p.normalized));
            prop_assert!((p.normalized - q.normalized).abs() < 1e-12);
        }
    }
}

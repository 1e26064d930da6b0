//! NSGA-II: uniform crossover, polynomial mutation, binary crowded
//! tournaments and elitist survivor selection over parents and offspring.

use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::moo::{crowding_distance, non_dominated_sort};
use crate::{
    pareto_front, DesignSpace, DesignVector, Error, Executor, ObjectiveVector, Outcome, ParetoFront, Result, Trial,
};

/// Distribution index of the polynomial mutation.
pub const POLYNOMIAL_ETA: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub population_size: usize,
    pub crossover_prob: f64,
    /// Per-gene probability of taking the second parent's value.
    pub swap_prob: f64,
    /// Per-gene mutation probability; `None` means `1 / d`.
    pub mutation_prob: Option<f64>,
    pub mutation_eta: f64,
    /// Total evaluator calls, initial population included.
    pub budget: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            crossover_prob: 0.9,
            swap_prob: 0.5,
            mutation_prob: None,
            mutation_eta: POLYNOMIAL_ETA,
            budget: 1500,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.population_size < 2 {
            return bad(format!("population_size must be >= 2, got {}", self.population_size));
        }
        if self.budget < self.population_size {
            return bad(format!(
                "budget ({}) must be >= population_size ({})",
                self.budget, self.population_size
            ));
        }
        for (name, p) in [
            ("crossover_prob", Some(self.crossover_prob)),
            ("swap_prob", Some(self.swap_prob)),
            ("mutation_prob", self.mutation_prob),
        ] {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("{name} must lie in [0, 1], got {p}"));
                }
            }
        }
        if !(self.mutation_eta > 0.0) {
            return bad(format!("mutation_eta must be positive, got {}", self.mutation_eta));
        }
        Ok(())
    }

    pub fn mutation_prob_for(&self, dim: usize) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / dim.max(1) as f64)
    }
}

/// A population member with its non-domination rank and crowding distance.
/// Failed evaluations carry no objectives and sit in the last rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedIndividual {
    pub design: DesignVector,
    pub objectives: Option<ObjectiveVector>,
    pub rank: usize,
    pub crowding: f64,
    /// Position of the source trial inside the study.
    pub trial_index: usize,
}

/// Every evaluation performed by one solver run, in `trial_id` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub trials: Vec<Trial>,
    /// Trial ids of the last surviving population.
    pub final_population: Vec<u64>,
}

impl Study {
    pub fn pareto_front(&self) -> ParetoFront {
        pareto_front(&self.trials)
    }

    pub fn generations(&self) -> usize {
        self.trials.last().map_or(0, |t| t.generation + 1)
    }

    /// Trials evaluated in generations `0..=generation`.
    pub fn up_to_generation(&self, generation: usize) -> &[Trial] {
        let end = self.trials.partition_point(|t| t.generation <= generation);
        &self.trials[..end]
    }

    /// Front 0 of the final population.
    pub fn final_front(&self) -> Vec<&Trial> {
        let members: Vec<&Trial> = self
            .final_population
            .iter()
            .filter_map(|id| self.trials.get(*id as usize))
            .filter(|t| t.outcome.is_ok())
            .collect();
        let points: Vec<ObjectiveVector> = members.iter().filter_map(|t| t.objectives().cloned()).collect();
        match non_dominated_sort(&points) {
            Ok(fronts) if !fronts.is_empty() => fronts[0].iter().map(|&i| members[i]).collect(),
            _ => Vec::new(),
        }
    }
}

/// Child takes each gene from `pb` with probability `swap_prob`, else from `pa`.
pub fn uniform_crossover<R: Rng + ?Sized>(
    pa: &DesignVector,
    pb: &DesignVector,
    swap_prob: f64,
    rng: &mut R,
) -> Result<DesignVector> {
    if pa.len() != pb.len() {
        return Err(Error::LengthMismatch {
            expected: pa.len(),
            found: pb.len(),
        });
    }
    let genes = pa
        .values()
        .iter()
        .zip(pb.values())
        .map(|(&a, &b)| if rng.gen::<f64>() < swap_prob { b } else { a })
        .collect();
    Ok(DesignVector::from_unchecked(genes))
}

/// Polynomial mutation with the default distribution index.
pub fn mutate<R: Rng + ?Sized>(x: &DesignVector, space: &DesignSpace, mutation_prob: f64, rng: &mut R) -> DesignVector {
    polynomial_mutation(x, space, mutation_prob, POLYNOMIAL_ETA, rng)
}

/// Perturbation drawn from the polynomial distribution on `[-1, 1]` with
/// density `(eta + 1) / 2 * (1 - |d|)^eta`.
pub fn polynomial_delta(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u < 0.5 {
        (2.0 * u).powf(e) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(e)
    }
}

pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &DesignVector,
    space: &DesignSpace,
    mutation_prob: f64,
    eta: f64,
    rng: &mut R,
) -> DesignVector {
    let genes = x
        .values()
        .iter()
        .zip(space.params())
        .map(|(&v, p)| {
            if rng.gen::<f64>() < mutation_prob {
                let d = polynomial_delta(rng.gen::<f64>(), eta);
                (v + d * p.range()).clamp(p.lower, p.upper)
            } else {
                v
            }
        })
        .collect();
    DesignVector::from_unchecked(genes)
}

/// Binary tournament with the crowded-comparison operator.
pub fn tournament_select<'a, R: Rng + ?Sized>(pool: &'a [RankedIndividual], rng: &mut R) -> &'a RankedIndividual {
    assert!(!pool.is_empty(), "tournament over an empty pool");
    if pool.len() == 1 {
        return &pool[0];
    }
    let i = rng.gen_range(0..pool.len());
    let mut j = rng.gen_range(0..pool.len() - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = (&pool[i], &pool[j]);
    if a.rank != b.rank {
        return if a.rank < b.rank { a } else { b };
    }
    if a.crowding != b.crowding {
        return if a.crowding > b.crowding { a } else { b };
    }
    if rng.gen::<bool>() {
        a
    } else {
        b
    }
}

/// Ranks the given trials. Failed trials get rank `fronts.len()` and zero
/// crowding.
pub fn rank_population(trials: &[Trial], members: &[usize]) -> Vec<RankedIndividual> {
    let ok: Vec<usize> = members.iter().copied().filter(|&i| trials[i].outcome.is_ok()).collect();
    let points: Vec<ObjectiveVector> = ok.iter().filter_map(|&i| trials[i].objectives().cloned()).collect();
    let fronts = non_dominated_sort(&points).expect("objective vectors of one study share a length");
    let mut ranked = Vec::with_capacity(members.len());
    for (rank, front) in fronts.iter().enumerate() {
        let pts: Vec<ObjectiveVector> = front.iter().map(|&k| points[k].clone()).collect();
        let crowd = crowding_distance(&pts);
        for (&k, c) in front.iter().zip(crowd) {
            let t = &trials[ok[k]];
            ranked.push(RankedIndividual {
                design: t.design.clone(),
                objectives: Some(points[k].clone()),
                rank,
                crowding: c,
                trial_index: ok[k],
            });
        }
    }
    let last = fronts.len();
    for &i in members.iter().filter(|&&i| !trials[i].outcome.is_ok()) {
        ranked.push(RankedIndividual {
            design: trials[i].design.clone(),
            objectives: None,
            rank: last,
            crowding: 0.0,
            trial_index: i,
        });
    }
    ranked
}

/// Keeps the best `size` individuals by (rank, descending crowding); ties
/// keep their order in `ranked`.
pub fn select_survivors(mut ranked: Vec<RankedIndividual>, size: usize) -> Vec<RankedIndividual> {
    ranked.sort_by(|a, b| a.rank.cmp(&b.rank).then_with(|| b.crowding.total_cmp(&a.crowding)));
    ranked.truncate(size);
    ranked
}

#[derive(Default)]
pub struct RunOptions<'a> {
    pub executor: Executor,
    /// Previously logged trials, `trial_id` order. Matching trials are
    /// reused instead of re-evaluated.
    pub replay: &'a [Trial],
}

pub fn run<F>(space: &DesignSpace, evaluator: F, config: &SolverConfig) -> Result<Study>
where
    F: Fn(&DesignVector) -> Outcome + Sync + Send,
{
    run_with(space, evaluator, config, RunOptions::default(), &mut |_| Ok(()))
}

/// Full solver loop. `on_trial` sees every newly evaluated trial in
/// `trial_id` order, once per generation barrier; replayed trials are not
/// reported again.
pub fn run_with<F>(
    space: &DesignSpace,
    evaluator: F,
    config: &SolverConfig,
    options: RunOptions<'_>,
    on_trial: &mut dyn FnMut(&Trial) -> std::result::Result<(), String>,
) -> Result<Study>
where
    F: Fn(&DesignVector) -> Outcome + Sync + Send,
{
    config.validate()?;
    let dim = space.dim();
    let pm = config.mutation_prob_for(dim);
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trials: Vec<Trial> = Vec::with_capacity(config.budget);

    let n0 = config.population_size.min(config.budget);
    let seeds: Vec<u64> = (0..n0).map(|_| master.next_u64()).collect();
    let designs: Vec<DesignVector> = seeds
        .iter()
        .map(|&s| space.sample_uniform(&mut ChaCha8Rng::seed_from_u64(s)))
        .collect();
    evaluate_generation(&mut trials, 0, designs, seeds, &evaluator, &options, on_trial)?;
    let mut population: Vec<usize> = (0..trials.len()).collect();

    let mut generation = 0;
    while trials.len() < config.budget {
        generation += 1;
        let ranked = rank_population(&trials, &population);
        let n = config.population_size.min(config.budget - trials.len());
        let seeds: Vec<u64> = (0..n).map(|_| master.next_u64()).collect();
        let designs: Vec<DesignVector> = seeds
            .iter()
            .map(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let pa = tournament_select(&ranked, &mut rng);
                let child = if rng.gen::<f64>() < config.crossover_prob {
                    let pb = tournament_select(&ranked, &mut rng);
                    uniform_crossover(&pa.design, &pb.design, config.swap_prob, &mut rng)
                        .expect("population members share the design space")
                } else {
                    pa.design.clone()
                };
                polynomial_mutation(&child, space, pm, config.mutation_eta, &mut rng)
            })
            .collect();
        let start = trials.len();
        evaluate_generation(&mut trials, generation, designs, seeds, &evaluator, &options, on_trial)?;

        let combined: Vec<usize> = population.iter().copied().chain(start..trials.len()).collect();
        let ranked = rank_population(&trials, &combined);
        population = select_survivors(ranked, config.population_size)
            .into_iter()
            .map(|r| r.trial_index)
            .collect();
    }

    let mut final_population: Vec<u64> = population.iter().map(|&i| trials[i].trial_id).collect();
    final_population.sort_unstable();
    Ok(Study {
        trials,
        final_population,
    })
}

fn evaluate_generation<F>(
    trials: &mut Vec<Trial>,
    generation: usize,
    designs: Vec<DesignVector>,
    seeds: Vec<u64>,
    evaluator: &F,
    options: &RunOptions<'_>,
    on_trial: &mut dyn FnMut(&Trial) -> std::result::Result<(), String>,
) -> Result<()>
where
    F: Fn(&DesignVector) -> Outcome + Sync + Send,
{
    let first_id = trials.len() as u64;
    let mut cached: Vec<Option<Outcome>> = Vec::with_capacity(designs.len());
    for (k, design) in designs.iter().enumerate() {
        let id = first_id + k as u64;
        match options.replay.get(id as usize) {
            Some(t) if t.trial_id == id => {
                if !t.design.bitwise_eq(design) || t.rng_seed != seeds[k] {
                    return Err(Error::ReplayMismatch { trial_id: id });
                }
                cached.push(Some(t.outcome.clone()));
            }
            _ => cached.push(None),
        }
    }
    let todo: Vec<usize> = (0..designs.len()).filter(|&k| cached[k].is_none()).collect();
    let fresh: Vec<(Outcome, f64)> = options.executor.map(&todo, |&k| {
        let t0 = Instant::now();
        let out = evaluator(&designs[k]);
        (out, t0.elapsed().as_secs_f64())
    });
    let mut fresh = fresh.into_iter();

    let mut any_ok = false;
    let mut first_failure = None;
    for (k, (design, seed)) in designs.into_iter().zip(seeds).enumerate() {
        let (outcome, secs, is_new) = match cached[k].take() {
            Some(o) => (o, 0.0, false),
            None => {
                let (o, s) = fresh.next().expect("one result per pending design");
                (o, s, true)
            }
        };
        match &outcome {
            Outcome::Ok { .. } => any_ok = true,
            Outcome::Failed { reason } => {
                first_failure.get_or_insert_with(|| reason.clone());
            }
        }
        let trial = Trial {
            trial_id: first_id + k as u64,
            generation,
            design,
            outcome,
            rng_seed: seed,
            tag: format!("gen-{generation}"),
            eval_seconds: secs,
        };
        if is_new {
            on_trial(&trial).map_err(Error::Observer)?;
        }
        trials.push(trial);
    }
    if !any_ok {
        return Err(Error::GenerationFailed {
            generation,
            reason: first_failure.unwrap_or_default(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{hypervolume_2d, Param};

    fn space_1d(lo: f64, hi: f64) -> DesignSpace {
        DesignSpace::new(vec![Param::new("x", lo, hi, "")]).unwrap()
    }

    fn schaffer(x: &DesignVector) -> Outcome {
        let v = x[0];
        Outcome::Ok {
            objectives: ObjectiveVector::new(vec![v * v, (v - 2.0) * (v - 2.0)]).unwrap(),
        }
    }

    fn ind(rank: usize, crowding: f64, tag: f64) -> RankedIndividual {
        RankedIndividual {
            design: DesignVector::from_unchecked(vec![tag]),
            objectives: None,
            rank,
            crowding,
            trial_index: 0,
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let c = SolverConfig {
            population_size: 1,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = SolverConfig {
            budget: 10,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = SolverConfig {
            swap_prob: 1.5,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn crossover_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DesignVector::from_unchecked(vec![1.0, 2.0, 3.0]);
        let b = DesignVector::from_unchecked(vec![4.0, 5.0, 6.0]);
        assert_eq!(uniform_crossover(&a, &b, 0.0, &mut rng).unwrap(), a);
        assert_eq!(uniform_crossover(&a, &b, 1.0, &mut rng).unwrap(), b);
        let short = DesignVector::from_unchecked(vec![1.0]);
        assert!(uniform_crossover(&a, &short, 0.5, &mut rng).is_err());
    }

    #[test]
    fn crossover_swap_fraction_concentrates() {
        // 10^4 Bernoulli(0.5) genes: sd of the fraction is 0.005, so 0.02 is 4 sd.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = DesignVector::from_unchecked(vec![0.0; 10_000]);
        let b = DesignVector::from_unchecked(vec![1.0; 10_000]);
        let child = uniform_crossover(&a, &b, 0.5, &mut rng).unwrap();
        let frac = child.values().iter().sum::<f64>() / 10_000.0;
        assert!((frac - 0.5).abs() <= 0.02, "swapped fraction {frac}");
    }

    #[test]
    fn mutation_zero_rate_is_identity_and_output_in_bounds() {
        let space = DesignSpace::new(vec![Param::new("a", -1.0, 1.0, ""), Param::new("b", 0.0, 10.0, "")]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = space.vector(vec![0.99, 0.01]).unwrap();
        assert_eq!(mutate(&x, &space, 0.0, &mut rng), x);
        for _ in 0..10_000 {
            let y = mutate(&x, &space, 1.0, &mut rng);
            assert!(space.contains(&y));
        }
    }

    /// E[clamp(x + d * range)] for the polynomial density, by composite
    /// Simpson quadrature over d in [-1, 1].
    fn analytic_mutated_mean(x: f64, lo: f64, hi: f64, eta: f64) -> f64 {
        let density = |d: f64| 0.5 * (eta + 1.0) * (1.0 - d.abs()).powf(eta);
        let n = 200_000;
        let h = 2.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let d = -1.0 + i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * density(d) * (x + d * (hi - lo)).clamp(lo, hi);
        }
        acc * h / 3.0
    }

    #[test]
    fn mutation_mean_matches_polynomial_density() {
        let (lo, hi) = (0.0, 10.0);
        let space = space_1d(lo, hi);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for x0 in [0.05, 5.0, 9.9] {
            let x = space.vector(vec![x0]).unwrap();
            let n = 100_000;
            let mean = (0..n).map(|_| mutate(&x, &space, 1.0, &mut rng)[0]).sum::<f64>() / n as f64;
            let expected = analytic_mutated_mean(x0, lo, hi, POLYNOMIAL_ETA);
            assert!(
                (mean - expected).abs() <= 0.01 * (hi - lo),
                "x0 = {x0}: empirical {mean} vs analytic {expected}"
            );
        }
    }

    #[test]
    fn tournament_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let single = [ind(3, 0.0, 7.0)];
        assert_eq!(tournament_select(&single, &mut rng).design[0], 7.0);
        let pair = [ind(1, 9.0, 1.0), ind(0, 0.0, 0.0)];
        for _ in 0..50 {
            assert_eq!(tournament_select(&pair, &mut rng).rank, 0);
        }
        let pair = [ind(0, 1.3, 1.0), ind(0, f64::INFINITY, 0.0)];
        for _ in 0..50 {
            assert!(tournament_select(&pair, &mut rng).crowding.is_infinite());
        }
        let tie = [ind(0, 1.0, 0.0), ind(0, 1.0, 1.0)];
        let wins = (0..2000)
            .filter(|_| tournament_select(&tie, &mut rng).design[0] == 1.0)
            .count();
        assert!((800..1200).contains(&wins), "coin is biased: {wins}");
    }

    #[test]
    fn survivors_prefer_lower_fronts() {
        let ranked = vec![
            ind(1, f64::INFINITY, 0.0),
            ind(0, 0.1, 1.0),
            ind(2, 5.0, 2.0),
            ind(0, 0.5, 3.0),
        ];
        let kept = select_survivors(ranked, 3);
        let tags: Vec<f64> = kept.iter().map(|r| r.design[0]).collect();
        assert_eq!(tags, vec![3.0, 1.0, 0.0]);
    }

    #[test]
    fn budget_equal_to_population_gives_one_generation() {
        let space = space_1d(-5.0, 5.0);
        let cfg = SolverConfig {
            population_size: 20,
            budget: 20,
            seed: 9,
            ..Default::default()
        };
        let study = run(&space, schaffer, &cfg).unwrap();
        assert_eq!(study.trials.len(), 20);
        assert!(study.trials.iter().all(|t| t.generation == 0));
    }

    #[test]
    fn budget_not_divisible_truncates_last_generation() {
        let space = space_1d(-5.0, 5.0);
        let cfg = SolverConfig {
            population_size: 10,
            budget: 35,
            seed: 1,
            ..Default::default()
        };
        let study = run(&space, schaffer, &cfg).unwrap();
        assert_eq!(study.trials.len(), 35);
        assert_eq!(study.generations(), 4);
        assert_eq!(study.trials.iter().filter(|t| t.generation == 3).count(), 5);
    }

    #[test]
    fn schaffer_front_converges_and_is_deterministic() {
        let space = space_1d(-5.0, 5.0);
        let cfg = SolverConfig {
            seed: 42,
            ..Default::default()
        };
        let study = run(&space, schaffer, &cfg).unwrap();
        assert_eq!(study.trials.len(), 1500);
        assert!(study.trials.iter().all(|t| space.contains(&t.design)));
        let front = study.final_front();
        let inside = front.iter().filter(|t| (-0.05..=2.05).contains(&t.design[0])).count();
        assert!(inside as f64 >= 0.9 * front.len() as f64);

        let again = run(&space, schaffer, &cfg).unwrap();
        assert_eq!(study, again);
    }

    #[test]
    fn archive_hypervolume_never_decreases() {
        let space = space_1d(-5.0, 5.0);
        let cfg = SolverConfig {
            seed: 3,
            budget: 600,
            ..Default::default()
        };
        let study = run(&space, schaffer, &cfg).unwrap();
        let reference = ObjectiveVector::new(vec![50.0, 50.0]).unwrap();
        let mut last = 0.0;
        for g in 0..study.generations() {
            let front = pareto_front(study.up_to_generation(g));
            let pts: Vec<_> = front.trials.iter().filter_map(|t| t.objectives().cloned()).collect();
            let hv = hypervolume_2d(&pts, &reference).unwrap();
            assert!(hv >= last);
            last = hv;
        }
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let space = space_1d(-5.0, 5.0);
        let cfg = SolverConfig {
            population_size: 10,
            budget: 60,
            seed: 5,
            ..Default::default()
        };
        let eval = |x: &DesignVector| {
            if x[0] > 3.0 {
                Outcome::Failed {
                    reason: "too big".into(),
                }
            } else {
                schaffer(x)
            }
        };
        let study = run(&space, eval, &cfg).unwrap();
        assert_eq!(study.trials.len(), 60);
        let front = study.pareto_front();
        assert!(front.trials.iter().all(|t| t.design[0] <= 3.0));
    }

    #[test]
    fn all_failed_generation_aborts() {
        let space = space_1d(0.0, 1.0);
        let cfg = SolverConfig {
            population_size: 4,
            budget: 8,
            ..Default::default()
        };
        let err = run(
            &space,
            |_: &DesignVector| Outcome::Failed {
                reason: "mesher".into(),
            },
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::GenerationFailed { generation: 0, .. }));
    }

    #[test]
    fn replay_reuses_logged_trials() {
        let space = space_1d(-5.0, 5.0);
        let cfg = SolverConfig {
            population_size: 10,
            budget: 50,
            seed: 8,
            ..Default::default()
        };
        let full = run(&space, schaffer, &cfg).unwrap();
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let counting = |x: &DesignVector| {
            calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            schaffer(x)
        };
        let mut seen = Vec::new();
        let resumed = run_with(
            &space,
            counting,
            &cfg,
            RunOptions {
                executor: Executor::sequential(),
                replay: &full.trials[..23],
            },
            &mut |t| {
                seen.push(t.trial_id);
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(resumed, full);
        assert_eq!(calls.into_inner(), 27);
        assert_eq!(seen, (23..50).collect::<Vec<u64>>());
    }

    #[test]
    fn worker_count_does_not_change_the_study() {
        let space = space_1d(-5.0, 5.0);
        let cfg = SolverConfig {
            budget: 300,
            seed: 12,
            ..Default::default()
        };
        let seq = run(&space, schaffer, &cfg).unwrap();
        let par = run_with(
            &space,
            schaffer,
            &cfg,
            RunOptions {
                executor: Executor::with_workers(4),
                replay: &[],
            },
            &mut |_| Ok(()),
        )
        .unwrap();
        assert_eq!(seq, par);
    }
}

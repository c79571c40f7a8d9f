//! The generational loop and the baselines it is measured against.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{random_chromosome, Chromosome};
use crate::error::{invalid_param, Error, Result};
use crate::fitness::{EvaluatedIndividual, Evaluator, FitnessParams, FitnessSettings};
use crate::operators::{
    blend_crossover, lexicase_select, mean_pairwise_similarity, mutate, CaseScores,
    CrossoverConfig, LexicaseConfig, MutationConfig,
};
use crate::workload::Workload;

/// Largest view count [`exhaustive_oracle`] will enumerate.
pub const EXHAUSTIVE_MAX_VIEWS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub population_size: usize,
    pub generations: usize,
    pub pilot_samples: usize,
    pub pilot_view_min: usize,
    pub pilot_view_max: usize,
    pub seed_fraction: f64,
    pub elitism_count: usize,
    pub rng_seed: u64,
    /// Keep every individual's fitness in the trajectory.
    pub record_all_fitness: bool,
    pub fitness: FitnessSettings,
    pub lexicase: LexicaseConfig,
    pub crossover: CrossoverConfig,
    pub mutation: MutationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 200,
            pilot_samples: 500,
            pilot_view_min: 5,
            pilot_view_max: 10,
            seed_fraction: 0.05,
            elitism_count: 2,
            rng_seed: 0,
            record_all_fitness: false,
            fitness: FitnessSettings::default(),
            lexicase: LexicaseConfig::default(),
            crossover: CrossoverConfig::default(),
            mutation: MutationConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(invalid_param("population_size must be at least 2"));
        }
        if self.generations < 1 {
            return Err(invalid_param("generations must be at least 1"));
        }
        if self.pilot_samples < 1 {
            return Err(invalid_param("pilot_samples must be at least 1"));
        }
        if self.pilot_view_min > self.pilot_view_max {
            return Err(invalid_param(
                "pilot_view_min must not exceed pilot_view_max",
            ));
        }
        if !(self.seed_fraction > 0.0 && self.seed_fraction <= 1.0) {
            return Err(invalid_param(format!(
                "seed_fraction must be in (0, 1], got {}",
                self.seed_fraction
            )));
        }
        if self.elitism_count >= self.population_size {
            return Err(invalid_param(
                "elitism_count must be smaller than population_size",
            ));
        }
        self.lexicase.validate()?;
        self.crossover.validate()?;
        self.mutation.validate()
    }

    /// Number of pilot elites injected into the initial population.
    pub fn pilot_elite_count(&self) -> usize {
        let n = (self.seed_fraction * self.pilot_samples as f64).ceil() as usize;
        n.min(self.pilot_samples).min(self.population_size)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub population_similarity: f64,
    pub mutation_rate_used: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub all_fitness: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub workload_name: String,
    pub config: RunConfig,
    pub fitness_params: FitnessParams,
    /// Lowest-fitness feasible individual seen, possibly after repair.
    pub best: EvaluatedIndividual,
    /// True when no feasible individual was found and `best` is a repaired one.
    pub repaired: bool,
    pub trajectory: Vec<GenerationRecord>,
    pub evaluations: usize,
    pub wall_time_seconds: f64,
}

/// Output of the pilot study.
#[derive(Clone, Debug)]
pub struct PilotSeed {
    /// The initial population; the first `elite_count` entries are pilot elites.
    pub population: Vec<Chromosome>,
    pub elite_count: usize,
    /// Every pilot sample, in draw order.
    pub samples: Vec<EvaluatedIndividual>,
}

fn pilot_draw<R: Rng + ?Sized>(v: usize, cfg: &RunConfig, rng: &mut R) -> Result<Chromosome> {
    let hi = cfg.pilot_view_max.min(v);
    let lo = cfg.pilot_view_min.min(hi);
    let k = rng.gen_range(lo..=hi);
    random_chromosome(v, k, rng)
}

fn by_fitness(a: &EvaluatedIndividual, b: &EvaluatedIndividual) -> std::cmp::Ordering {
    a.fitness.total_cmp(&b.fitness)
}

/// Evaluates `pilot_samples` random small configurations and seeds the
/// population with the best fraction of them, filling the rest with fresh
/// draws from the same distribution.
pub fn pilot_seed<R: Rng + ?Sized>(
    evaluator: &Evaluator<'_>,
    cfg: &RunConfig,
    rng: &mut R,
) -> Result<PilotSeed> {
    cfg.validate()?;
    let v = evaluator.workload().num_views();
    if v == 0 {
        return Err(invalid_param("workload has no candidate views"));
    }
    let draws = (0..cfg.pilot_samples)
        .map(|_| pilot_draw(v, cfg, rng))
        .collect::<Result<Vec<_>>>()?;
    let samples = evaluate_all(evaluator, &draws)?;

    // random keys make ties independent of draw order
    let keys: Vec<u64> = (0..samples.len()).map(|_| rng.gen()).collect();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| by_fitness(&samples[i], &samples[j]).then(keys[i].cmp(&keys[j])));

    let elite_count = cfg.pilot_elite_count();
    let mut population: Vec<Chromosome> = order[..elite_count]
        .iter()
        .map(|&i| samples[i].chromosome.clone())
        .collect();
    while population.len() < cfg.population_size {
        population.push(pilot_draw(v, cfg, rng)?);
    }
    Ok(PilotSeed {
        population,
        elite_count,
        samples,
    })
}

fn evaluate_all(evaluator: &Evaluator<'_>, pop: &[Chromosome]) -> Result<Vec<EvaluatedIndividual>> {
    pop.par_iter().map(|c| evaluator.evaluate(c)).collect()
}

/// Runs the full search.
pub fn evolve(workload: &Workload, cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    let params = cfg.fitness.resolve(workload)?;
    let evaluator = Evaluator::new(workload, params.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let PilotSeed { mut population, .. } = pilot_seed(&evaluator, cfg, &mut rng)?;
    let mut evaluations = cfg.pilot_samples;
    let mut trajectory = Vec::with_capacity(cfg.generations);
    let mut best_feasible: Option<EvaluatedIndividual> = None;
    let mut best_any: Option<EvaluatedIndividual> = None;

    for generation in 0..cfg.generations {
        let evaluated = evaluate_all(&evaluator, &population)?;
        evaluations += evaluated.len();

        for ind in &evaluated {
            if best_any.as_ref().is_none_or(|b| ind.fitness < b.fitness) {
                best_any = Some(ind.clone());
            }
            if ind.feasible
                && best_feasible
                    .as_ref()
                    .is_none_or(|b| ind.fitness < b.fitness)
            {
                best_feasible = Some(ind.clone());
            }
        }

        let fits: Vec<f64> = evaluated.iter().map(|e| e.fitness).collect();
        let best_fitness = fits.iter().copied().fold(f64::INFINITY, f64::min);
        let mean_fitness = fits.iter().sum::<f64>() / fits.len() as f64;
        let similarity = mean_pairwise_similarity(&population)?;
        let rate = cfg.mutation.rate_for_similarity(similarity);
        trajectory.push(GenerationRecord {
            generation,
            best_fitness,
            // rounding in the sum can put the mean a hair below a uniform best
            mean_fitness: mean_fitness.max(best_fitness),
            population_similarity: similarity,
            mutation_rate_used: rate,
            all_fitness: cfg.record_all_fitness.then(|| fits.clone()),
        });

        if generation + 1 == cfg.generations {
            break;
        }

        let keys: Vec<u64> = (0..evaluated.len()).map(|_| rng.gen()).collect();
        let mut order: Vec<usize> = (0..evaluated.len()).collect();
        order
            .sort_by(|&i, &j| by_fitness(&evaluated[i], &evaluated[j]).then(keys[i].cmp(&keys[j])));

        let scored: Vec<Scored<'_>> = evaluated
            .iter()
            .map(|ind| Scored {
                ind,
                cases: case_scores(workload, &params, ind),
            })
            .collect();
        let offspring_seeds: Vec<u64> = (cfg.elitism_count..cfg.population_size)
            .map(|_| rng.gen())
            .collect();
        let offspring = offspring_seeds
            .par_iter()
            .map(|&seed| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                breed(&scored, cfg, rate, &mut r)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut next: Vec<Chromosome> = order[..cfg.elitism_count]
            .iter()
            .map(|&i| evaluated[i].chromosome.clone())
            .collect();
        next.extend(offspring);
        population = next;
    }

    let (best, repaired) = match best_feasible {
        Some(b) => (b, false),
        None => {
            let fallback = best_any.expect("at least one generation was evaluated");
            (repair(&evaluator, &fallback.chromosome)?, true)
        }
    };

    Ok(RunReport {
        workload_name: workload.name.clone(),
        config: cfg.clone(),
        fitness_params: params,
        best,
        repaired,
        trajectory,
        evaluations,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Lexicase view of an individual: one case per query, each holding that
/// query's weighted response-time share of the fitness plus an equal share
/// of the remaining (maintenance, memory, penalty) terms. The cases sum to
/// the individual's fitness.
struct Scored<'a> {
    ind: &'a EvaluatedIndividual,
    cases: Vec<f64>,
}

impl CaseScores for Scored<'_> {
    fn case_scores(&self) -> &[f64] {
        &self.cases
    }
}

fn case_scores(w: &Workload, params: &FitnessParams, ind: &EvaluatedIndividual) -> Vec<f64> {
    let q = w.num_queries() as f64;
    let rt_terms: Vec<f64> = w
        .queries
        .iter()
        .zip(&ind.per_query_costs)
        .map(|(query, cost)| params.w1 * query.weight * cost / params.max_response_time_norm)
        .collect();
    let shared = (ind.fitness - rt_terms.iter().sum::<f64>()) / q;
    rt_terms.into_iter().map(|t| t + shared).collect()
}

fn breed<R: Rng>(
    evaluated: &[Scored<'_>],
    cfg: &RunConfig,
    rate: f64,
    rng: &mut R,
) -> Result<Chromosome> {
    let k = cfg.crossover.num_parents;
    let mut parents = Vec::with_capacity(k);
    while parents.len() < k {
        parents.extend(lexicase_select(evaluated, &cfg.lexicase, rng)?);
    }
    parents.truncate(k);
    let refs: Vec<&Chromosome> = parents
        .iter()
        .map(|&i| &evaluated[i].ind.chromosome)
        .collect();
    let child = blend_crossover(&refs, &cfg.crossover, rng)?;
    mutate(&child, rate, rng)
}

/// Drops materialized views, least response-time benefit per byte first,
/// until the storage budget holds. Fails if the result still violates a
/// response-time cap.
pub fn repair(evaluator: &Evaluator<'_>, chromosome: &Chromosome) -> Result<EvaluatedIndividual> {
    let w = evaluator.workload();
    let mut c = chromosome.clone();
    let mut current = w.compute_objectives(&c)?;
    while current.memory_usage > w.constraints.storage_budget {
        let mut worst: Option<(f64, usize)> = None;
        for v in c.iter_ones() {
            let mut without = c.clone();
            without.set(v, false);
            let loss = w.compute_objectives(&without)?.response_time - current.response_time;
            let per_byte = loss / w.views[v].storage_size;
            if worst.is_none_or(|(b, _)| per_byte < b) {
                worst = Some((per_byte, v));
            }
        }
        let (_, v) = worst.expect("over budget implies a materialized view");
        c.set(v, false);
        current = w.compute_objectives(&c)?;
    }
    let ind = evaluator.evaluate(&c)?;
    if !ind.feasible {
        return Err(Error::Infeasible(format!(
            "repaired configuration still has response time {} above the cap {:?}",
            ind.objectives.response_time, w.constraints.max_response_time
        )));
    }
    Ok(ind)
}

/// Bit `i` of configuration number `m` in lexicographic bitstring order.
fn lex_chromosome(v: usize, m: u64) -> Chromosome {
    Chromosome::from_bits((0..v).map(|i| (m >> (v - 1 - i)) & 1 == 1).collect())
}

/// Enumerates every configuration and returns the feasible one with minimum
/// fitness, ties going to the lexicographically smallest bitstring.
pub fn exhaustive_oracle(
    workload: &Workload,
    params: &FitnessParams,
) -> Result<EvaluatedIndividual> {
    let v = workload.num_views();
    if v > EXHAUSTIVE_MAX_VIEWS {
        return Err(invalid_param(format!(
            "exhaustive enumeration limited to {EXHAUSTIVE_MAX_VIEWS} views, workload has {v}"
        )));
    }
    let evaluator = Evaluator::new(workload, params.clone())?;
    let best = (0..1u64 << v)
        .into_par_iter()
        .map(|m| -> Result<Option<(f64, u64)>> {
            let ind = evaluator.evaluate(&lex_chromosome(v, m))?;
            Ok(ind.feasible.then_some((ind.fitness, m)))
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(x), Some(y)) => Some(if (y.0, y.1) < (x.0, x.1) { y } else { x }),
                    (x, None) => x,
                    (None, y) => y,
                })
            },
        )?;
    match best {
        Some((_, m)) => evaluator.evaluate(&lex_chromosome(v, m)),
        None => Err(Error::Infeasible(
            "no configuration satisfies the response-time cap within the storage budget".into(),
        )),
    }
}

/// Adds the single best storage-feasible view until no addition lowers fitness.
pub fn greedy_baseline(workload: &Workload, params: &FitnessParams) -> Result<EvaluatedIndividual> {
    let evaluator = Evaluator::new(workload, params.clone())?;
    let mut current = evaluator.evaluate(&Chromosome::zeros(workload.num_views()))?;
    loop {
        let mut step: Option<EvaluatedIndividual> = None;
        for v in 0..workload.num_views() {
            if current.chromosome.get(v) {
                continue;
            }
            let mut c = current.chromosome.clone();
            c.set(v, true);
            let cand = evaluator.evaluate(&c)?;
            if cand.objectives.memory_usage > workload.constraints.storage_budget {
                continue;
            }
            if cand.fitness < current.fitness
                && step.as_ref().is_none_or(|s| cand.fitness < s.fitness)
            {
                step = Some(cand);
            }
        }
        match step {
            Some(next) => current = next,
            None => return Ok(current),
        }
    }
}

/// Best of `samples` uniformly random configurations, preferring feasible ones.
pub fn random_baseline<R: Rng + ?Sized>(
    workload: &Workload,
    params: &FitnessParams,
    samples: usize,
    rng: &mut R,
) -> Result<EvaluatedIndividual> {
    if samples == 0 {
        return Err(invalid_param("random baseline needs at least one sample"));
    }
    let evaluator = Evaluator::new(workload, params.clone())?;
    let v = workload.num_views();
    let mut best: Option<EvaluatedIndividual> = None;
    for _ in 0..samples {
        let c = Chromosome::from_bits((0..v).map(|_| rng.gen_bool(0.5)).collect());
        let ind = evaluator.evaluate(&c)?;
        let better = match &best {
            None => true,
            Some(b) => (ind.feasible, -ind.fitness) > (b.feasible, -b.fitness),
        };
        if better {
            best = Some(ind);
        }
    }
    Ok(best.expect("samples >= 1"))
}

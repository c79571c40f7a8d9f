//! Parent selection, recombination and mutation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{hamming_similarity, Chromosome};
use crate::error::{invalid_param, Error, Result};
use crate::fitness::EvaluatedIndividual;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    /// Keep only individuals tied with the pool best on each case.
    Exact,
    /// Keep individuals within one median absolute deviation of the pool best.
    #[default]
    Mad,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexicaseConfig {
    pub epsilon_mode: EpsilonMode,
    pub target_survivors: usize,
}

impl Default for LexicaseConfig {
    fn default() -> Self {
        Self {
            epsilon_mode: EpsilonMode::Mad,
            target_survivors: 2,
        }
    }
}

impl LexicaseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_survivors < 2 {
            return Err(invalid_param(
                "lexicase target_survivors must be at least 2",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossoverConfig {
    /// Blend interval expansion.
    pub alpha: f64,
    pub num_parents: usize,
}

impl Default for CrossoverConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            num_parents: 2,
        }
    }
}

impl CrossoverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(invalid_param(format!(
                "crossover alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if self.num_parents < 2 {
            return Err(invalid_param("crossover num_parents must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationConfig {
    pub rate_min: f64,
    pub rate_max: f64,
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self {
            rate_min: 0.01,
            rate_max: 0.1,
        }
    }
}

impl MutationConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(unit(self.rate_min) && unit(self.rate_max) && self.rate_min <= self.rate_max) {
            return Err(invalid_param(format!(
                "mutation bounds must satisfy 0 <= rate_min <= rate_max <= 1, got [{}, {}]",
                self.rate_min, self.rate_max
            )));
        }
        Ok(())
    }

    /// Linear map from mean similarity to a rate, clamped to the bounds.
    pub fn rate_for_similarity(&self, similarity: f64) -> f64 {
        (self.rate_min + (self.rate_max - self.rate_min) * similarity)
            .clamp(self.rate_min, self.rate_max)
    }
}

/// Anything carrying a vector of per-test-case errors (lower is better).
pub trait CaseScores {
    fn case_scores(&self) -> &[f64];
}

impl CaseScores for EvaluatedIndividual {
    fn case_scores(&self) -> &[f64] {
        &self.per_query_costs
    }
}

impl CaseScores for Vec<f64> {
    fn case_scores(&self) -> &[f64] {
        self
    }
}

impl CaseScores for &[f64] {
    fn case_scores(&self) -> &[f64] {
        self
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn median_absolute_deviation(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let m = median(&mut v);
    let mut dev: Vec<f64> = values.iter().map(|x| (x - m).abs()).collect();
    median(&mut dev)
}

/// Lexicase selection with a caller-supplied case order. Returns population
/// indices, `cfg.target_survivors` of them.
pub fn lexicase_select_with_order<T: CaseScores, R: Rng + ?Sized>(
    population: &[T],
    case_order: &[usize],
    cfg: &LexicaseConfig,
    rng: &mut R,
) -> Result<Vec<usize>> {
    cfg.validate()?;
    let Some(first) = population.first() else {
        return Err(invalid_param(
            "lexicase selection needs a nonempty population",
        ));
    };
    let num_cases = first.case_scores().len();
    if let Some(bad) = population
        .iter()
        .find(|p| p.case_scores().len() != num_cases)
    {
        return Err(Error::LengthMismatch {
            expected: num_cases,
            actual: bad.case_scores().len(),
        });
    }
    if let Some(&c) = case_order.iter().find(|&&c| c >= num_cases) {
        return Err(invalid_param(format!(
            "case index {c} out of range for {num_cases} cases"
        )));
    }

    let target = cfg.target_survivors;
    let mut pool: Vec<usize> = (0..population.len()).collect();
    let mut scores = Vec::with_capacity(pool.len());
    for &case in case_order {
        if pool.len() <= target {
            break;
        }
        scores.clear();
        scores.extend(pool.iter().map(|&i| population[i].case_scores()[case]));
        let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let eps = match cfg.epsilon_mode {
            EpsilonMode::Exact => 0.0,
            EpsilonMode::Mad => median_absolute_deviation(&scores),
        };
        let mut kept = 0;
        for j in 0..pool.len() {
            if scores[j] <= best + eps {
                pool[kept] = pool[j];
                kept += 1;
            }
        }
        pool.truncate(kept);
    }

    pool.shuffle(rng);
    if pool.len() >= target {
        pool.truncate(target);
    } else {
        let survivors = pool.len();
        while pool.len() < target {
            pool.push(pool[rng.gen_range(0..survivors)]);
        }
    }
    Ok(pool)
}

/// Lexicase selection over a uniformly shuffled case order.
pub fn lexicase_select<T: CaseScores, R: Rng + ?Sized>(
    population: &[T],
    cfg: &LexicaseConfig,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let num_cases = population.first().map_or(0, |p| p.case_scores().len());
    let mut order: Vec<usize> = (0..num_cases).collect();
    order.shuffle(rng);
    lexicase_select_with_order(population, &order, cfg, rng)
}

/// Localized blend crossover. Loci on which all parents agree are copied; at
/// every other locus a value is drawn from the blend interval
/// `[-alpha, 1 + alpha]` and thresholded at 0.5.
pub fn blend_crossover<R: Rng + ?Sized>(
    parents: &[&Chromosome],
    cfg: &CrossoverConfig,
    rng: &mut R,
) -> Result<Chromosome> {
    cfg.validate()?;
    if parents.len() < 2 {
        return Err(invalid_param("blend crossover needs at least two parents"));
    }
    let len = parents[0].len();
    if let Some(p) = parents.iter().find(|p| p.len() != len) {
        return Err(Error::LengthMismatch {
            expected: len,
            actual: p.len(),
        });
    }
    let mut child = parents[0].clone();
    for i in 0..len {
        let first = parents[0].get(i);
        if parents[1..].iter().all(|p| p.get(i) == first) {
            continue;
        }
        // lo = 0, hi = 1 at any differing binary locus
        let u = rng.gen_range(-cfg.alpha..=1.0 + cfg.alpha);
        child.set(i, u > 0.5);
    }
    Ok(child)
}

/// Mean Hamming similarity over all unordered pairs; 1.0 for a single individual.
pub fn mean_pairwise_similarity(population: &[Chromosome]) -> Result<f64> {
    if population.is_empty() {
        return Err(invalid_param(
            "similarity of an empty population is undefined",
        ));
    }
    let n = population.len();
    if n == 1 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += hamming_similarity(&population[i], &population[j])?;
        }
    }
    Ok(total / (n * (n - 1) / 2) as f64)
}

/// Mutation rate that rises with population homogeneity.
pub fn adaptive_mutation_rate(population: &[Chromosome], cfg: &MutationConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(cfg.rate_for_similarity(mean_pairwise_similarity(population)?))
}

/// Independent per-bit flips.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, rate: f64, rng: &mut R) -> Result<Chromosome> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(invalid_param(format!(
            "mutation rate must be in [0, 1], got {rate}"
        )));
    }
    let mut out = c.clone();
    for i in 0..out.len() {
        if rng.gen_bool(rate) {
            out.flip(i);
        }
    }
    Ok(out)
}

//! Materialized view selection with a genetic algorithm.
//!
//! A [`Workload`] describes queries, candidate views and constraints. A view
//! configuration is a [`Chromosome`], one bit per candidate view. The search
//! in [`evolve`] seeds its population from a pilot sample, picks parents with
//! epsilon-lexicase selection over per-query costs, recombines them with a
//! localized blend crossover and mutates at a rate driven by population
//! similarity. [`exhaustive_oracle`], [`greedy_baseline`] and
//! [`random_baseline`] serve as reference points.
//!
//! ```no_run
//! use mvsel::{evolve, generate_workload, GeneratorSpec, RunConfig};
//!
//! let w = generate_workload(&GeneratorSpec::new(22, 40, 0.3, 7)).unwrap();
//! let report = evolve(&w, &RunConfig::default()).unwrap();
//! println!("{} -> {}", report.best.chromosome, report.best.fitness);
//! ```

pub mod cli;
pub mod encoding;
pub mod engine;
pub mod error;
pub mod fitness;
pub mod operators;
pub mod report;
pub mod workload;

pub use encoding::{hamming_similarity, random_chromosome, Chromosome};
pub use engine::{
    evolve, exhaustive_oracle, greedy_baseline, pilot_seed, random_baseline, GenerationRecord,
    PilotSeed, RunConfig, RunReport,
};
pub use error::{Error, Result};
pub use fitness::{
    default_normalizers, fitness, shape_maintenance, shape_memory, shape_response,
    EvaluatedIndividual, Evaluator, FitnessParams, FitnessSettings, Objectives, SigmoidOrientation,
};
pub use operators::{
    adaptive_mutation_rate, blend_crossover, lexicase_select, mutate, CrossoverConfig, EpsilonMode,
    LexicaseConfig, MutationConfig,
};
pub use workload::{
    generate_workload, load_workload, save_workload, CandidateView, Constraints, GeneratorSpec,
    Query, Workload,
};

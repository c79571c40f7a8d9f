//! A full run on a 22-query, 40-view workload, printing the fitness
//! trajectory every 20 generations and the recommended view set.
//!
//! cargo run --release -p mvsel --example evolve

use mvsel::report::trajectory_csv;
use mvsel::{evolve, generate_workload, GeneratorSpec, RunConfig};

fn main() -> mvsel::Result<()> {
    let w = generate_workload(&GeneratorSpec::new(22, 40, 0.3, 1))?;
    let cfg = RunConfig {
        generations: 300,
        rng_seed: 1,
        ..Default::default()
    };
    let report = evolve(&w, &cfg)?;

    println!("gen    best       mean       similarity  rate");
    for r in report.trajectory.iter().step_by(20) {
        println!(
            "{:<6} {:<10.6} {:<10.6} {:<11.4} {:.4}",
            r.generation,
            r.best_fitness,
            r.mean_fitness,
            r.population_similarity,
            r.mutation_rate_used
        );
    }

    let best = &report.best;
    println!();
    println!("best      {}", best.chromosome);
    println!("views     {:?}", best.chromosome.decode());
    println!("fitness   {:.6}", best.fitness);
    println!(
        "total     {:.1} (response {:.1} + maintenance {:.1})",
        best.objectives.total_cost(),
        best.objectives.response_time,
        best.objectives.maintenance_cost
    );
    println!(
        "memory    {:.3e} of {:.3e} bytes",
        best.objectives.memory_usage, w.constraints.storage_budget
    );
    println!(
        "{} evaluations in {:.2}s",
        report.evaluations, report.wall_time_seconds
    );

    let path = std::env::temp_dir().join("mvsel-example-trajectory.csv");
    std::fs::write(&path, trajectory_csv(&report))?;
    println!("trajectory written to {}", path.display());
    Ok(())
}

//! GA against greedy, random sampling and (for small instances) exhaustive
//! enumeration.
//!
//! cargo run --release -p mvsel --example compare_baselines

use mvsel::cli::compare_methods;
use mvsel::{generate_workload, GeneratorSpec, RunConfig};

fn main() -> mvsel::Result<()> {
    for (queries, views) in [(10, 12), (22, 40)] {
        let w = generate_workload(&GeneratorSpec::new(queries, views, 0.3, 5))?;
        let rows = compare_methods(
            &w,
            &RunConfig {
                rng_seed: 5,
                ..Default::default()
            },
            1000,
        )?;
        println!("{} queries, {} views", queries, views);
        println!(
            "  {:<11} {:>10} {:>14} {:>9}",
            "method", "fitness", "total_cost", "seconds"
        );
        for r in rows {
            println!(
                "  {:<11} {:>10.6} {:>14.1} {:>9.3}",
                r.method,
                r.best.fitness,
                r.best.objectives.total_cost(),
                r.wall_time_seconds
            );
        }
    }
    Ok(())
}

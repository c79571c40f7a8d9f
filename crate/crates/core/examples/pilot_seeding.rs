//! The pilot study: 500 small random configurations, the best 5% seed the
//! initial population.
//!
//! cargo run -p mvsel --example pilot_seeding

use mvsel::{generate_workload, pilot_seed, Evaluator, FitnessParams, GeneratorSpec, RunConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mvsel::Result<()> {
    let w = generate_workload(&GeneratorSpec::new(22, 40, 0.3, 3))?;
    let ev = Evaluator::new(&w, FitnessParams::for_workload(&w))?;
    let cfg = RunConfig::default();
    let seed = pilot_seed(&ev, &cfg, &mut ChaCha8Rng::seed_from_u64(3))?;

    let mut fits: Vec<f64> = seed.samples.iter().map(|s| s.fitness).collect();
    fits.sort_by(f64::total_cmp);
    println!("pilot samples: {}", seed.samples.len());
    println!(
        "pilot fitness: best {:.5}  median {:.5}  worst {:.5}",
        fits[0],
        fits[fits.len() / 2],
        fits[fits.len() - 1]
    );
    println!(
        "elites seeded: {} of population {}",
        seed.elite_count,
        seed.population.len()
    );
    for c in &seed.population[..5] {
        println!("  {c}  fitness {:.5}", ev.evaluate(c)?.fitness);
    }
    Ok(())
}

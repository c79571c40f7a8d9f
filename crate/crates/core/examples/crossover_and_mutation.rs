//! Localized blend crossover and similarity-driven mutation rates.
//!
//! cargo run -p mvsel --example crossover_and_mutation

use mvsel::operators::mean_pairwise_similarity;
use mvsel::{
    adaptive_mutation_rate, blend_crossover, mutate, Chromosome, CrossoverConfig, MutationConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mvsel::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let a: Chromosome = "1100110000".parse()?;
    let b: Chromosome = "1010100001".parse()?;
    let cfg = CrossoverConfig::default();

    println!("parent a {a}");
    println!("parent b {b}");
    for _ in 0..5 {
        println!("child    {}", blend_crossover(&[&a, &b], &cfg, &mut rng)?);
    }

    let mutation = MutationConfig::default();
    let populations: [(&str, Vec<Chromosome>); 3] = [
        ("identical", vec![a.clone(); 4]),
        ("mixed", vec![a.clone(), b.clone(), "0001011110".parse()?]),
        ("complementary", vec![a.clone(), a.complement()]),
    ];
    for (label, pop) in &populations {
        let s = mean_pairwise_similarity(pop)?;
        let rate = adaptive_mutation_rate(pop, &mutation)?;
        println!("{label:>13}: similarity {s:.3} -> mutation rate {rate:.4}");
    }

    let mutated = mutate(&a, 0.2, &mut rng)?;
    println!("a mutated at 0.2: {mutated}");
    Ok(())
}

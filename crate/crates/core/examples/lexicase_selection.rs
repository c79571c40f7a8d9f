//! Lexicase selection on a three-individual population where two are
//! specialists and one is a generalist.
//!
//! cargo run -p mvsel --example lexicase_selection

use mvsel::{lexicase_select, EpsilonMode, LexicaseConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mvsel::Result<()> {
    // per-query costs: A is best on query 0, B on query 1, C is middling on both
    let population = vec![vec![1.0, 9.0], vec![9.0, 1.0], vec![5.0, 5.0]];
    let names = ["A", "B", "C"];
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    for mode in [EpsilonMode::Exact, EpsilonMode::Mad] {
        let cfg = LexicaseConfig {
            epsilon_mode: mode,
            target_survivors: 2,
        };
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            for i in lexicase_select(&population, &cfg, &mut rng)? {
                counts[i] += 1;
            }
        }
        let total: usize = counts.iter().sum();
        print!("{mode:?}:");
        for (name, c) in names.iter().zip(counts) {
            print!("  {name} {:.3}", c as f64 / total as f64);
        }
        println!();
    }
    Ok(())
}

//! Score one configuration: raw objectives, the three shaped terms and the
//! penalized fitness, for a feasible and an over-budget bitstring.
//!
//! cargo run -p mvsel --example evaluate_configuration

use mvsel::fitness::shaped_terms;
use mvsel::{generate_workload, Chromosome, Evaluator, FitnessParams, GeneratorSpec};

fn main() -> mvsel::Result<()> {
    let w = generate_workload(&GeneratorSpec::new(10, 12, 0.3, 1))?;
    let params = FitnessParams::for_workload(&w);
    let ev = Evaluator::new(&w, params)?;

    for bits in ["000000000000", "100010010000", "111111111111"] {
        let c: Chromosome = bits.parse()?;
        let ind = ev.evaluate(&c)?;
        let (f1, f2, f3) = shaped_terms(&ind.objectives, ev.params());
        let o = &ind.objectives;
        println!("{bits}  views {:?}", c.decode());
        println!(
            "  response {:.1}  maintenance {:.1}  memory {:.3e} (budget {:.3e})",
            o.response_time, o.maintenance_cost, o.memory_usage, w.constraints.storage_budget
        );
        println!(
            "  f1 {f1:.4}  f2 {f2:.4}  f3 {f3:.4}  fitness {:.5}  feasible {}",
            ind.fitness, ind.feasible
        );
    }
    Ok(())
}

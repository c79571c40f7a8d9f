//! Build a small instance by hand, with a response-time cap, and solve it
//! exactly.
//!
//! cargo run -p mvsel --example hand_built_workload

use mvsel::{
    exhaustive_oracle, greedy_baseline, CandidateView, Constraints, FitnessParams, Query, Workload,
};

fn main() -> mvsel::Result<()> {
    let queries = vec![
        Query {
            id: 0,
            weight: 3.0,
            base_cost: 1200.0,
        },
        Query {
            id: 1,
            weight: 1.0,
            base_cost: 800.0,
        },
        Query {
            id: 2,
            weight: 2.0,
            base_cost: 450.0,
        },
    ];
    let views = vec![
        CandidateView {
            id: 0,
            storage_size: 4.0e6,
            maintenance_cost: 90.0,
            answer_costs: vec![(0, 150.0), (2, 300.0)],
        },
        CandidateView {
            id: 1,
            storage_size: 1.5e6,
            maintenance_cost: 40.0,
            answer_costs: vec![(1, 60.0)],
        },
        CandidateView {
            id: 2,
            storage_size: 6.0e6,
            maintenance_cost: 30.0,
            answer_costs: vec![(0, 400.0), (1, 200.0), (2, 50.0)],
        },
        CandidateView {
            id: 3,
            storage_size: 0.5e6,
            maintenance_cost: 10.0,
            answer_costs: vec![(2, 120.0)],
        },
    ];
    let constraints = Constraints {
        storage_budget: 8.0e6,
        max_response_time: Some(2500.0),
    };
    let w = Workload::new("hand-built", queries, views, constraints)?;
    let params = FitnessParams::for_workload(&w);

    let exact = exhaustive_oracle(&w, &params)?;
    let greedy = greedy_baseline(&w, &params)?;
    for (name, ind) in [("exhaustive", exact), ("greedy", greedy)] {
        println!(
            "{name:<10} {}  fitness {:.5}  response {:.0}  memory {:.1e}  feasible {}",
            ind.chromosome,
            ind.fitness,
            ind.objectives.response_time,
            ind.objectives.memory_usage,
            ind.feasible
        );
    }
    Ok(())
}

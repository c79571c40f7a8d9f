//! Generate a synthetic 22-query workload, save it, and load it back.
//!
//! cargo run -p mvsel --example generate_workload

use mvsel::{generate_workload, load_workload, save_workload, GeneratorSpec};

fn main() -> mvsel::Result<()> {
    let mut spec = GeneratorSpec::new(22, 40, 0.3, 7);
    spec.budget_fraction = 0.4;
    let w = generate_workload(&spec)?;

    let path = std::env::temp_dir().join("mvsel-example-workload.json");
    save_workload(&w, &path)?;
    let back = load_workload(&path)?;
    assert_eq!(back, w);

    let coverage: usize = w.views.iter().map(|v| v.answer_costs.len()).sum();
    println!("{}", w.name);
    println!("  queries:        {}", w.num_queries());
    println!("  views:          {}", w.num_views());
    println!(
        "  mean coverage:  {:.2} queries per view",
        coverage as f64 / w.num_views() as f64
    );
    println!("  total storage:  {:.0} bytes", w.total_storage());
    println!(
        "  storage budget: {:.0} bytes",
        w.constraints.storage_budget
    );
    println!("  written to {}", path.display());
    Ok(())
}

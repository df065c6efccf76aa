//! Shared helpers for the criterion benchmarks.

use pickroute_core::datagen::{default_catalog, generate_instance, synthetic_base, GenSpec};
use pickroute_core::model::{Family, Instance};

/// Deterministic benchmark instance: a synthetic warehouse base of the
/// given size, expanded into the requested family.
pub fn bench_instance(tasks: usize, robots: usize, family: Family, seed: u64) -> Instance {
    let extent = (((tasks * 8) as f64).sqrt().ceil() as i32).max(20);
    let base = synthetic_base(tasks, robots, 100, extent, 30, seed)
        .expect("synthetic base parameters are valid");
    let catalog = default_catalog();
    let spec = GenSpec::new(&base, family, seed, &catalog);
    generate_instance(&spec).expect("benchmark instance generates")
}

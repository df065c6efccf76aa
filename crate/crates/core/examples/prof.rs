use pickroute_core::baseline::{solve_ancar, BaselineConfig};
use pickroute_core::datagen::{default_catalog, generate_instance, synthetic_base, GenSpec};
use pickroute_core::model::Family;
use pickroute_core::rng::derive_seed;
use pickroute_core::scheduler::{solve, SchedulerConfig};

fn grid_extent(tasks: usize) -> i32 {
    (((tasks * 8) as f64).sqrt().ceil() as i32).max(20)
}

fn fleet_size(tasks: usize) -> usize {
    (tasks / 20).clamp(3, 25)
}

fn main() {
    for (fi, family) in Family::ALL.iter().enumerate() {
        for rep in 0..5u64 {
            let checked = fi * 50 + 45 + rep as usize;
            let seed = derive_seed(1001, (checked as u64) << 8 | rep) ^ 9;
            let base = synthetic_base(
                500,
                fleet_size(500),
                100,
                grid_extent(500),
                30,
                derive_seed(seed, 0xBA5E),
            )
            .unwrap();
            let catalog = default_catalog();
            let spec = GenSpec::new(&base, *family, seed, &catalog);
            let instance = generate_instance(&spec).unwrap();

            let t0 = std::time::Instant::now();
            let done = solve(&instance, &SchedulerConfig::default()).unwrap();
            let t_done = t0.elapsed().as_secs_f64();
            let t0 = std::time::Instant::now();
            let ancar = solve_ancar(&instance, &BaselineConfig::default()).unwrap();
            let t_ancar = t0.elapsed().as_secs_f64();
            println!(
                "{:?} rep{rep}: done={:.2}ms ancar={:.2}ms ratio={:.2} (costs {:.0}/{:.0})",
                family,
                t_done * 1e3,
                t_ancar * 1e3,
                t_ancar / t_done,
                done.total_cost,
                ancar.total_cost
            );
        }
    }
}

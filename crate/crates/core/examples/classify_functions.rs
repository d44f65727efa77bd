//! Classify the built-in auxiliary functions and locate their jumps.

use contraction_kit::auxfn::AuxFn;
use contraction_kit::classify::{
    check_f2, check_f3, check_monotone, default_schedule, dyadic_probe, estimate_right_limit, Monotonicity,
};

fn main() -> contraction_kit::error::Result<()> {
    let grid: Vec<f64> = (1..=500).map(|k| k as f64 / 100.0).collect();
    let probe = dyadic_probe(40);
    for name in ["log", "log+t", "neginvroot:2", "step:1,1", "example42F"] {
        let f: AuxFn = name.parse()?;
        let inc = check_monotone(&f, &grid, Monotonicity::Strict)?;
        let f2 = check_f2(&f, &probe, 20.0)?;
        let f3 = check_f3(&f, 0.5, &probe, 1e-4)?;
        println!("{name:<14} increasing={:<13} f2={:<13} f3={}", inc.verdict, f2.verdict, f3.verdict);
        if let Some(w) = inc.witness {
            println!("{:<14} non-monotone witness {w:?}", "");
        }
    }

    let step: AuxFn = "step:1,1".parse()?;
    let jump = estimate_right_limit(&step, 1.0, &default_schedule(), 1e-6)?;
    println!("step:1,1 at t=1: F(1)={} F(1+)={} tau={}", jump.value_at, jump.right_limit, jump.tau);
    Ok(())
}

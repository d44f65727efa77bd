//! Picard iteration on a finite space and on the real line.

use contraction_kit::auxfn::AuxFn;
use contraction_kit::counterexample::CounterexampleFamily;
use contraction_kit::picard::{picard_iterate, picard_iterate_real};

fn main() -> contraction_kit::error::Result<()> {
    let t = CounterexampleFamily::build(AuxFn::step_linear(1, 1)?, 1)?.enumerate_points(4)?;
    let labels = t.space.labels();
    for x0 in 0..t.space.len() {
        let trace = picard_iterate(&t.space, &t.map, x0, 0.0, 100)?;
        let path: Vec<&str> = trace.iterates.iter().map(|&i| labels[i].as_str()).collect();
        println!("{:<4} {:?}: {}", labels[x0], trace.termination, path.join(" -> "));
    }

    let trace = picard_iterate_real(f64::cos, 1.0, 1e-12, 1000);
    println!("cos: {} iterations to {:.12} ({:?})", trace.iterations(), trace.last(), trace.termination);
    Ok(())
}

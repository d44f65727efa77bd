//! The literal epsilon-delta audit, class by class, on a small random space.

use contraction_kit::certify::meir_keeler_direct;
use contraction_kit::real::Tolerance;
use contraction_kit::sampling::{random_banach_instance, random_line_space, random_self_map, seeded};

fn main() -> contraction_kit::error::Result<()> {
    let mut rng = seeded(2024);
    let inst = random_banach_instance(&mut rng, 6);
    let audit = meir_keeler_direct(&inst.space, &inst.map, Tolerance::default())?;
    println!("banach instance, lambda = {}: {:?}", inst.lambda, audit.verdict.status);
    for c in &audit.classes {
        println!(
            "  eps={:<8} delta={:<8} pairs={} max d(Tx,Ty)={} {:?}",
            c.epsilon, c.delta, c.pairs, c.max_image, c.status
        );
    }

    let space = random_line_space(&mut rng, 5, 2, 20);
    let map = random_self_map(&mut rng, 5);
    let audit = meir_keeler_direct(&space, &map, Tolerance::default())?;
    println!("uniform random map {:?} on {:?}: {:?}", map.image(), space.labels(), audit.verdict.status);
    if let Some(w) = &audit.verdict.witness {
        println!("  witness pair ({}, {}): d(Tx,Ty)={} >= eps={}", w.i, w.j, w.lhs, w.rhs);
    }
    Ok(())
}

//! An F-contraction that is not Meir-Keeler: build, verify, and falsify.

use contraction_kit::auxfn::AuxFn;
use contraction_kit::certify::meir_keeler_finite;
use contraction_kit::counterexample::{CounterexampleFamily, GammaSchedule};
use contraction_kit::real::{Real, Tolerance};

fn main() -> contraction_kit::error::Result<()> {
    let fam = CounterexampleFamily::build(AuxFn::step_linear(1, 1)?, 1)?;
    println!("F = {}, t0 = {}, tau = {}, k = {}, gamma = {}", fam.f, fam.t0, fam.tau, fam.k, fam.gamma);

    let t = fam.enumerate_points(3)?;
    println!("X_3 = {:?}", t.space.labels());
    println!("T   = {:?}", t.map.image());

    for n in [10, 100, 1000] {
        let v = fam.verify_f_contraction(n)?;
        let t = fam.enumerate_points(n)?;
        let mk = meir_keeler_finite(&t.space, &t.map, Tolerance::default())?;
        println!(
            "N={n:<5} F-contraction {:?} (margin {}), {} eligible pairs, truncation MK {:?}",
            v.verdict.status,
            v.verdict.margin_exact.as_deref().unwrap_or("-"),
            v.eligible_pairs,
            mk.status
        );
    }

    for delta in ["1", "0.1", "0.01", "1e-6"] {
        let w = fam.mk_falsification_witness(delta.parse::<Real>()?)?;
        println!("delta={delta:<5} n={:<7} x={} y={} d={} d(Tx,Ty)={}", w.n, w.x, w.y, w.d_xy, w.d_txy);
    }

    let geometric = GammaSchedule::Geometric { first: "0.5".parse()?, ratio: "0.5".parse()? };
    let fam = CounterexampleFamily::build_with(AuxFn::step_linear(1, 1)?, 1, Some(geometric))?;
    let w = fam.mk_falsification_witness("0.1".parse::<Real>()?)?;
    println!("geometric gamma, delta=0.1: n={} pair ({}, {})", w.n, w.x, w.y);

    let audit = fam.audit_distance_claims(5)?;
    for c in &audit.claims {
        println!("claim {}: {:?} over {} instances", c.id, c.status, c.instances);
    }
    Ok(())
}

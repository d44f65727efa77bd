//! Certify the contraction conditions on the two fixed example spaces.

use contraction_kit::auxfn::AuxFn;
use contraction_kit::certify::{certify_banach, certify_ef, certify_f_contraction, certify_phi_f, max_admissible_tau};
use contraction_kit::metric::is_contractive;
use contraction_kit::real::{Rational, Tolerance};
use contraction_kit::sampling::{ef_example, halving_example};

fn main() -> contraction_kit::error::Result<()> {
    let tol = Tolerance::default();

    let (space, map) = halving_example();
    println!("halving space {:?}", space.labels());
    println!("  banach      {}", certify_banach(&space, &map, tol)?.status_line());
    println!("  contractive {}", is_contractive(&space, &map, tol)?.status_line());

    // ln(1/2) is irrational, so log-based checks run in float mode
    let fspace = space.to_f64();
    let tau = max_admissible_tau(&fspace, &map, &AuxFn::log())?;
    println!("  largest tau for F=log: {tau:.12} (ln 2 = {:.12})", 2f64.ln());
    let v = certify_f_contraction(&fspace, &map, &AuxFn::log(), &0.69, tol)?;
    println!("  F=log, tau=0.69 {}", v.status_line());
    let phi: AuxFn = "const:0.5".parse()?;
    println!("  (phi,F) phi=0.5 {}", certify_phi_f(&fspace, &map, &phi, &AuxFn::log(), tol)?.status_line());

    let (space, map) = ef_example();
    let f = AuxFn::example42f();
    for lambda in ["0.7", "0.5"] {
        let e: AuxFn = format!("scale:{lambda},example42F").parse()?;
        println!("(E,F) with E = {lambda} F: {}", certify_ef(&space, &map, &e, &f, tol)?.status_line());
    }
    let step = AuxFn::step_linear(1, 1)?;
    let exact_tau: Rational = max_admissible_tau(&space, &map, &step)?;
    println!("largest tau for F=step:1,1 on the (E,F) space: {exact_tau}");
    Ok(())
}

trait StatusLine {
    fn status_line(&self) -> String;
}

impl StatusLine for contraction_kit::verdict::Verdict {
    fn status_line(&self) -> String {
        let margin = self.margin_exact.clone().or(self.margin.map(|m| format!("{m:.3e}")));
        format!("{:?} margin={}", self.status, margin.unwrap_or_else(|| "vacuous".into()))
    }
}

//! Seeded random instances and the JSON report format.

use contraction_kit::certify::{certify_banach, meir_keeler_finite};
use contraction_kit::metric::is_contractive;
use contraction_kit::real::{Mode, Tolerance};
use contraction_kit::report::{Payload, Report};
use contraction_kit::sampling::{random_banach_instance, seeded};

fn main() -> contraction_kit::error::Result<()> {
    let seed = 7;
    let mut rng = seeded(seed);
    let inst = random_banach_instance(&mut rng, 5);
    let tol = Tolerance::default();
    let verdicts = vec![
        Payload::Verdict(certify_banach(&inst.space, &inst.map, tol)?),
        Payload::Verdict(is_contractive(&inst.space, &inst.map, tol)?),
        Payload::Verdict(meir_keeler_finite(&inst.space, &inst.map, tol)?),
    ];
    let inputs = serde_json::json!({ "space": inst.space.to_file(), "map": inst.map.image() });
    let mut report = Report::new("example", inputs, Mode::Exact, verdicts);
    report.seed = Some(seed);

    print!("{}", report.to_text());
    let json = report.to_json();
    let back: Report = serde_json::from_str(&json)?;
    back.validate().expect("a fresh report is well formed");
    println!("json round-trip ok, {} bytes", json.len());
    Ok(())
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines reach stdout directly.

use std::process::ExitCode;
use std::time::Instant;

use contraction_kit::auxfn::{AuxFn, Piece, PieceKind, PiecewiseTable};
use contraction_kit::certify::{certify_ef, certify_f_contraction, meir_keeler_direct, meir_keeler_finite};
use contraction_kit::classify::{c1_scale_supremum, check_c1, check_jump_dominance, LimitOptions, Outcome};
use contraction_kit::counterexample::CounterexampleFamily;
use contraction_kit::metric::{brute_force_fixed_points, is_contractive, FiniteMetricSpace, SelfMap};
use contraction_kit::picard::picard_iterate;
use contraction_kit::real::{parse_exact, rational_to_f64, Mode, Rational, Real, Tolerance};
use contraction_kit::report::{Payload, Report};
use contraction_kit::sampling::{ef_example, random_banach_instance, random_line_space, random_self_map, seeded};
use contraction_kit::volterra::{observed_order, picard_solve, Kernel, TimeFn, VolterraProblem};
use num_traits::{One, Signed, Zero};
use rand::seq::index::sample;
use rand::Rng;

type Outcome_ = Result<String, String>;

fn cli(args: &[&str]) -> (i32, Option<Report>, String) {
    let argv = std::iter::once("contraction-kit").chain(args.iter().copied()).map(std::ffi::OsString::from);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = contraction_kit::cli::run(argv, &mut out, &mut err);
    let report = serde_json::from_slice::<Report>(&out).ok();
    (code, report, String::from_utf8_lossy(&err).into_owned())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(s: &str) -> Rational {
    parse_exact(s).expect("literal")
}

fn family() -> CounterexampleFamily {
    CounterexampleFamily::build(AuxFn::step_linear(1, 1).unwrap(), 1).unwrap()
}

fn criterion_1() -> Outcome_ {
    let mut notes = Vec::new();
    for n in [10usize, 100, 1000] {
        let start = Instant::now();
        let (code, report, err) = cli(&["--mode", "exact", "counterexample", "verify", "--N", &n.to_string()]);
        let secs = start.elapsed().as_secs_f64();
        let report = report.ok_or_else(|| format!("N={n}: no report ({err})"))?;
        report.validate()?;
        let Some(Payload::FamilyVerification(v)) = report.verdicts.first() else {
            return Err(format!("N={n}: unexpected payload"));
        };
        ensure(code == 0 && report.pass && v.pass(), || format!("N={n}: exit {code}"))?;
        ensure(report.mode == Mode::Exact && v.verdict.mode == Mode::Exact, || format!("N={n}: not exact"))?;
        ensure(v.tau.exact() == &Rational::one(), || format!("N={n}: tau {}", v.tau))?;
        let margin = v.verdict.margin_exact.as_deref().map(q);
        ensure(margin.as_ref().is_some_and(|m| !m.is_negative()), || format!("N={n}: margin {margin:?}"))?;
        if n == 1000 {
            ensure(secs < 5.0, || format!("N=1000 took {secs:.2}s"))?;
        }
        notes.push(format!("N={n} margin={} pairs={} {secs:.2}s", margin.unwrap(), v.verdict.pairs_checked));
    }
    Ok(notes.join("; "))
}

fn criterion_2() -> Outcome_ {
    let (code, report, err) = cli(&["--mode", "exact", "counterexample", "witness", "--delta", "1,0.5,0.1,0.01,1e-6"]);
    let report = report.ok_or_else(|| format!("no report ({err})"))?;
    report.validate()?;
    ensure(code == 0, || format!("exit {code}"))?;
    let t0 = Rational::one();
    let mut ns = Vec::new();
    for (p, delta) in report.verdicts.iter().zip(["1", "0.5", "0.1", "0.01", "1e-6"]) {
        let Payload::MkWitness(w) = p else { return Err("unexpected payload".into()) };
        let (d, dt, del) = (w.d_xy.exact(), w.d_txy.exact(), q(delta));
        ensure(w.delta.exact() == &del, || format!("delta {} != {delta}", w.delta))?;
        ensure(&t0 < d && d < &(&t0 + &del), || format!("delta={delta}: d={d} outside (t0, t0+delta)"))?;
        ensure(dt == &t0, || format!("delta={delta}: d(Tx,Ty)={dt}"))?;
        ensure(w.holds(), || format!("delta={delta}: witness does not hold"))?;
        if delta == "0.1" {
            ensure(w.n == 6, || format!("delta=0.1: n={}", w.n))?;
            ensure(w.x.exact() == &q("18") && w.y.exact() == &q("229/12"), || {
                format!("delta=0.1: pair ({}, {})", w.x, w.y)
            })?;
        }
        ns.push(format!("n={}", w.n));
    }
    ensure(ns.len() == 5, || format!("{} witnesses", ns.len()))?;
    Ok(format!("{}; delta=0.1 pair (18, 229/12)", ns.join(" ")))
}

fn criterion_3() -> Outcome_ {
    let fam = family();
    let mut notes = Vec::new();
    for n in [10u64, 100, 1000] {
        let t = fam.enumerate_points(n).map_err(|e| e.to_string())?;
        let v = meir_keeler_finite(&t.space, &t.map, Tolerance::default()).map_err(|e| e.to_string())?;
        ensure(v.pass && v.mode == Mode::Exact, || format!("N={n}: {:?}", v.status))?;
        notes.push(format!("N={n} pass"));
    }
    Ok(notes.join(", "))
}

fn criterion_4() -> Outcome_ {
    let mut rng = seeded(4);
    let (mut disagreements, mut passes) = (0, 0);
    for case in 0..1000 {
        let n = rng.gen_range(2..=12);
        let space = random_line_space(&mut rng, n, 4, 48);
        // half the maps draw images from a small subset so passing maps occur
        let map = if case % 2 == 0 {
            random_self_map(&mut rng, n)
        } else {
            let size = rng.gen_range(1..=2);
            let pool: Vec<usize> = sample(&mut rng, n, size).into_vec();
            SelfMap::new((0..n).map(|_| pool[rng.gen_range(0..pool.len())]).collect()).unwrap()
        };
        let direct = meir_keeler_direct(&space, &map, Tolerance::default()).map_err(|e| e.to_string())?.verdict;
        let contractive = is_contractive(&space, &map, Tolerance::default()).map_err(|e| e.to_string())?;
        if direct.status != contractive.status {
            disagreements += 1;
        }
        passes += usize::from(direct.pass);
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements"))?;
    Ok(format!("1000 spaces, 0 disagreements ({passes} MK, {} not)", 1000 - passes))
}

fn criterion_5() -> Outcome_ {
    let mut rng = seeded(5);
    let tol = Tolerance::default();
    let mut worst = f64::INFINITY;
    for case in 0..500 {
        let n = rng.gen_range(2..=12);
        let inst = random_banach_instance(&mut rng, n);
        ensure(inst.lambda < Rational::one(), || format!("case {case}: lambda {}", inst.lambda))?;
        let space = inst.space.to_f64();
        let lambda = rational_to_f64(&inst.lambda);
        // λ = 0 leaves no eligible pair, so any τ > 0 is admissible
        let tau = if lambda > 0.0 { -lambda.ln() * (1.0 - 1e-6) } else { 1.0 };
        let f = certify_f_contraction(&space, &inst.map, &AuxFn::log(), &tau, tol).map_err(|e| e.to_string())?;
        let c = is_contractive(&space, &inst.map, tol).map_err(|e| e.to_string())?;
        let mk = meir_keeler_finite(&space, &inst.map, tol).map_err(|e| e.to_string())?;
        ensure(f.pass && c.pass && mk.pass, || {
            format!("case {case}: F {:?} contractive {:?} MK {:?} (lambda {lambda})", f.status, c.status, mk.status)
        })?;
        worst = worst.min(f.margin.unwrap_or(f64::INFINITY));
    }
    Ok(format!("500 instances; smallest F-margin {worst:.3e}"))
}

fn criterion_6() -> Outcome_ {
    let grid: Vec<f64> = (1..=16).map(|k| k as f64 * 0.25).collect();
    let opts = LimitOptions::default();
    let step = AuxFn::step_linear(1, 1).unwrap();
    let err = |e: contraction_kit::error::Error| e.to_string();

    let log = check_jump_dominance(&AuxFn::constant(1), &AuxFn::log(), &grid, &opts).map_err(err)?;
    ensure(log.iter().all(|e| e.verdict == Outcome::Pass), || "(1, log) failed somewhere".into())?;

    let one = check_jump_dominance(&AuxFn::constant(1), &step, &grid, &opts).map_err(err)?;
    let failing: Vec<f64> = one.iter().filter(|e| e.verdict != Outcome::Pass).filter_map(|e| e.at).collect();
    ensure(failing == [1.0], || format!("(1, step) fails at {failing:?}"))?;
    let at1 = one.iter().find(|e| e.at == Some(1.0)).expect("t=1 is on the grid");
    ensure(at1.verdict == Outcome::Fail, || format!("t=1 verdict {}", at1.verdict))?;
    let (l, j) = (at1.values["limsup_phi"], at1.values["jump"]);
    ensure(l == 1.0 && j == 1.0, || format!("L={l} J={j}"))?;

    let two = check_jump_dominance(&AuxFn::constant(2), &step, &[1.0], &opts).map_err(err)?;
    ensure(two[0].verdict == Outcome::Pass, || format!("(2, step) at t=1: {}", two[0].verdict))?;

    let (code, report, e) =
        cli(&["fn-class", "--fn", "step:1,1", "--phi", "const:1", "--check", "jump-dominance", "--reproducible"]);
    let report = report.ok_or_else(|| format!("no report ({e})"))?;
    report.validate()?;
    let noted = report.to_json().contains("counterexample build --fn step:1,1 --t0 1");
    ensure(code == 1 && noted, || format!("exit {code}, cross-reference present: {noted}"))?;
    Ok("(1,log) pass on 16 points; (1,step) fails only at t=1 with L=J=1; (2,step) passes; note present".into())
}

fn criterion_7() -> Outcome_ {
    let f = AuxFn::example42f();
    let grid: Vec<Rational> = (1..=500).map(|k| Rational::new(k.into(), 100.into())).collect();
    let mut notes = Vec::new();
    for (lambda, expect) in [("0.5", true), ("0.7", true), ("0.79", true), ("0.8", false), ("0.9", false)] {
        let e = AuxFn::scaled(f.clone(), lambda.parse::<Real>().unwrap()).unwrap();
        let entry = check_c1(&e, &f, &grid, &Rational::zero()).map_err(|e| e.to_string())?;
        let pass = entry.verdict == Outcome::Pass;
        ensure(pass == expect, || format!("lambda={lambda}: {}", entry.verdict))?;
        ensure(pass || entry.witness.is_some(), || format!("lambda={lambda}: no witness"))?;
        notes.push(format!("{lambda}:{}", if pass { "pass" } else { "fail" }));
    }
    let fgrid: Vec<f64> = (1..=500).map(|k| k as f64 / 100.0).collect();
    let (sup, at) = c1_scale_supremum(&f, &f, &fgrid).map_err(|e| e.to_string())?;
    ensure((sup - 1.25).abs() <= 0.01, || format!("supremum {sup} at s={at}"))?;
    Ok(format!("{}; supremum {sup:.6} at s={at}", notes.join(" ")))
}

fn identity_fn() -> AuxFn {
    let piece = Piece { from: 0.into(), to: None, kind: PieceKind::Affine, params: vec![0.into(), 1.into()] };
    AuxFn::table(PiecewiseTable::new(vec![piece]).unwrap())
}

fn criterion_8() -> Outcome_ {
    let tol = Tolerance::default();
    let (mut certified, mut violations) = (0usize, 0usize);
    let mut check = |space: &FiniteMetricSpace<Rational>, map: &SelfMap, e: &AuxFn, f: &AuxFn| -> Result<(), String> {
        match certify_ef(space, map, e, f, tol) {
            Ok(v) if v.pass => {
                certified += 1;
                if !is_contractive(space, map, tol).map_err(|e| e.to_string())?.pass {
                    violations += 1;
                }
                Ok(())
            }
            Ok(_) | Err(contraction_kit::error::Error::C1Violated { .. }) => Ok(()),
            Err(e) => Err(e.to_string()),
        }
    };

    // linear pair E = μt, F = t on Banach instances
    let mut rng = seeded(8);
    let id = identity_fn();
    for _ in 0..300 {
        let n = rng.gen_range(2..=10);
        let inst = random_banach_instance(&mut rng, n);
        let mu = Rational::new(rng.gen_range(50..100).into(), 100.into());
        let e = AuxFn::scaled(id.clone(), Real::from_rational(mu)).unwrap();
        check(&inst.space, &inst.map, &e, &id)?;
    }
    // the nonmonotone pair on small random spaces
    let f = AuxFn::example42f();
    for lambda in ["0.5", "0.7", "0.79"] {
        let e = AuxFn::scaled(f.clone(), lambda.parse::<Real>().unwrap()).unwrap();
        let (space, map) = ef_example();
        check(&space, &map, &e, &f)?;
        for _ in 0..400 {
            let n = rng.gen_range(2..=5);
            let space = random_line_space(&mut rng, n, 4, 40);
            let map = random_self_map(&mut rng, n);
            check(&space, &map, &e, &f)?;
        }
    }
    ensure(violations == 0, || format!("{violations} of {certified} certified maps are not contractive"))?;
    ensure(certified >= 100, || format!("only {certified} certified maps generated"))?;
    Ok(format!("{certified} certified maps, 0 violations"))
}

fn criterion_9() -> Outcome_ {
    let start = Instant::now();
    let kernel: Kernel = "linear:0.5".parse().map_err(|e: contraction_kit::error::Error| e.to_string())?;
    let problem = VolterraProblem::new(kernel, TimeFn::Const(1.0), 1.0, 1e-3).map_err(|e| e.to_string())?;
    let sol = picard_solve(&problem, None, 1e-10, 200).map_err(|e| e.to_string())?;
    let exact = problem.sample(|t| (t / 2.0).exp());
    let err = contraction_kit::volterra::sup_distance(&sol.solution, &exact).map_err(|e| e.to_string())?;
    let order = observed_order(&problem, 1e-10, 200).map_err(|e| e.to_string())?.order;
    let secs = start.elapsed().as_secs_f64();
    let iters = sol.iterations();
    ensure(sol.converged && iters <= 60, || format!("{iters} iterations, converged={}", sol.converged))?;
    ensure(err < 1e-5, || format!("sup error {err:.3e}"))?;
    ensure(order >= 1.8, || format!("order {order:.3}"))?;
    ensure(secs < 10.0, || format!("{secs:.2}s"))?;
    Ok(format!("{iters} iterations, sup error {err:.3e}, order {order:.3}, {secs:.2}s"))
}

fn criterion_10() -> Outcome_ {
    let t = family().enumerate_points(100).map_err(|e| e.to_string())?;
    let zero = t.space.index_of("0").ok_or("no point 0")?;
    let fixed = brute_force_fixed_points(&t.map);
    ensure(fixed == [zero], || format!("fixed points {fixed:?}"))?;
    let mut longest = 0;
    for x in 0..t.space.len() {
        let trace = picard_iterate(&t.space, &t.map, x, 0.0, 10).map_err(|e| e.to_string())?;
        let hit = trace.first_hit(&zero).ok_or_else(|| format!("orbit of {} misses 0", t.space.labels()[x]))?;
        ensure(hit <= 2, || format!("orbit of {} needs {hit} steps", t.space.labels()[x]))?;
        longest = longest.max(hit);
    }
    Ok(format!("{} orbits reach 0 within {longest} steps; fixed points {{0}}", t.space.len()))
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome_); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        match run() {
            Ok(detail) => println!("criterion {id}: PASS {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id}: FAIL {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Picard iteration for x(t) = h(t) + int_0^t K(t, s, x(s)) ds.

use contraction_kit::volterra::{observed_order, picard_solve, sup_distance, Kernel, TimeFn, VolterraProblem};

fn main() -> contraction_kit::error::Result<()> {
    let kernel: Kernel = "linear:0.5".parse()?;
    let problem = VolterraProblem::new(kernel, TimeFn::Const(1.0), 1.0, 1e-3)?;
    println!("contraction factor L*sup|a|*T = {}", problem.contraction_factor());

    let sol = picard_solve(&problem, None, 1e-10, 200)?;
    for (k, step) in sol.trace.iter().enumerate() {
        println!("  iteration {:>2}: sup step {step:.3e}", k + 1);
    }
    let exact = problem.sample(|t| (t / 2.0).exp());
    println!("sup error vs e^(t/2): {:.3e}", sup_distance(&sol.solution, &exact)?);

    let order = observed_order(&problem, 1e-12, 200)?;
    println!("observed order {:.3} from steps {:?}", order.order, order.steps);

    // an x-independent kernel is solved by a single application
    let separable: Kernel = "separable:exp:1,-1|poly:0,0.3".parse()?;
    let problem = VolterraProblem::new(separable, "poly:1,1".parse()?, 2.0, 1e-2)?;
    let sol = picard_solve(&problem, None, 1e-10, 200)?;
    println!("separable kernel: steps {:?}, residual {:.3e}", sol.trace, problem.residual(&sol.solution)?);
    Ok(())
}

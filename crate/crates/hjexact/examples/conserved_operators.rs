//! Time-dependent operators with constant eigenvalues.
//!
//! Each family carries first-order operators `O(t) = a(t) p + b(t) x + c(t)`
//! that act on the exact state as `O psi = P psi` with the *same* eigenvalue
//! at every time — e.g. `p - F t` for the uniform force, or the
//! exponentially weighted pair of the repulsive oscillator.  The analytic
//! route substitutes `p -> dS/dx` and closes to round-off; the
//! finite-difference route actually applies `-i hbar d/dx` and converges at
//! stencil order.

use hjexact::grid::{GridSpec, StencilOrder};
use hjexact::model::{HarmonicFamily, PhysConsts};
use hjexact::verify::{
    operator_eigencheck, predefined_operators, refinement_study, EigenRoute, OrderWindow,
};

fn main() -> hjexact::Result<()> {
    let consts = PhysConsts::default();
    let order = StencilOrder::Two;

    let families = [
        HarmonicFamily::free(1.0),
        HarmonicFamily::constant_force(1.0, 0.5),
        HarmonicFamily::growing_force(0.5, 1.0),
        HarmonicFamily::repulsive_oscillator(1.0, 0.3, -0.2),
    ];

    for family in &families {
        println!("{family}");
        let grid = GridSpec::uniform(
            family.dim(),
            -2.0,
            2.0,
            if family.dim() == 1 { 257 } else { 65 },
        )?;
        for op in predefined_operators(family, &consts) {
            print!("  {:<24} eigenvalue {:>6}", op.label, op.eigenvalue);
            for &t in &[0.0, 0.7, 2.0] {
                let r = operator_eigencheck(
                    &op,
                    family,
                    &consts,
                    &grid,
                    t,
                    order,
                    EigenRoute::Analytic,
                )?;
                print!("  rel(t={t}) = {:.1e}", r.rel);
            }
            println!();
        }

        // Finite-difference route for the first operator: a refinement
        // study instead of an absolute bound.
        if let Some(op) = predefined_operators(family, &consts).into_iter().next() {
            let mut grids = vec![grid.clone()];
            for _ in 0..2 {
                grids.push(grids.last().unwrap().refine());
            }
            let study = refinement_study(&grids, OrderWindow::for_order(order), |g| {
                operator_eigencheck(
                    &op,
                    family,
                    &consts,
                    g,
                    0.7,
                    order,
                    EigenRoute::FiniteDifference,
                )
            })?;
            match study.order_estimate {
                Some(o) => println!(
                    "  finite-difference route: measured order {o:.3}, pass = {}",
                    study.pass
                ),
                None => println!(
                    "  finite-difference route: round-off limited, pass = {}",
                    study.pass
                ),
            }
        }
        println!();
    }

    Ok(())
}

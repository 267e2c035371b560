//! Check harmonicity by finite differences.
//!
//! Every catalog action has `lap S = 0` analytically.  The discrete
//! Laplacian sees that differently depending on the action: per-axis
//! polynomials of degree <= 2 cancel the stencil *exactly* (residual is
//! round-off), while `ln(x^2 + y^2)` leaves genuine truncation error that
//! must shrink at the stencil's order as the grid refines.

use hjexact::grid::{GridSpec, StencilOrder};
use hjexact::model::{HarmonicFamily, PhysConsts};
use hjexact::verify::laplace_residual;

fn main() -> hjexact::Result<()> {
    let consts = PhysConsts::default();

    println!("stencil-exact families (residual = round-off on any grid):");
    let quadratics = [
        HarmonicFamily::constant_force(1.0, 0.5),
        HarmonicFamily::repulsive_oscillator(1.0, 0.3, -0.2),
    ];
    for family in &quadratics {
        let grid = GridSpec::uniform(family.dim(), -2.0, 2.0, 65)?;
        let report = laplace_residual(family, &consts, &grid, 0.7, StencilOrder::Two)?;
        println!(
            "  {:<46} rel = {:9.2e}  pass = {}",
            format!("{family}"),
            report.rel,
            report.pass
        );
    }

    println!();
    println!("log-central action (truncation-limited, converges at stencil order):");
    let family = HarmonicFamily::log_central(1.0);
    for order in [StencilOrder::Two, StencilOrder::Four] {
        println!("  order-{} stencil:", order.value());
        println!("    {:>9} {:>12} {:>12} {:>8}", "n", "l2", "rel", "order");
        let mut previous: Option<f64> = None;
        for n in [33usize, 65, 129, 257] {
            let axes = GridSpec::uniform(2, 1.0, 3.0, n)?;
            let report = laplace_residual(&family, &consts, &axes, 0.0, order)?;
            let measured = previous.map(|p| (p / report.l2).log2());
            previous = Some(report.l2);
            match measured {
                Some(o) => println!(
                    "    {:>7}^2 {:>12.4e} {:>12.4e} {:>8.3}",
                    n, report.l2, report.rel, o
                ),
                None => {
                    println!(
                        "    {:>7}^2 {:>12.4e} {:>12.4e} {:>8}",
                        n, report.l2, report.rel, "-"
                    )
                }
            }
        }
    }

    Ok(())
}

//! Build the potential from an action.
//!
//! The whole construction in one screen: pick a harmonic action S, define
//! `V = -dS/dt - |grad S|^2 / 2m`, and the pair (S, V) solves the
//! Hamilton-Jacobi equation exactly — no expansion, no approximation.  For
//! the catalog families V also lands on a closed form; this prints both
//! side by side.

use hjexact::model::{HarmonicFamily, PhysConsts};
use hjexact::synth::{synth_potential, CatalogPotential, GaugeField};

fn main() -> hjexact::Result<()> {
    let consts = PhysConsts::default();
    let gauge = GaugeField::Zero;

    let cases: Vec<(HarmonicFamily, CatalogPotential, Vec<f64>)> = vec![
        (
            HarmonicFamily::constant_force(1.0, 0.5),
            CatalogPotential::uniform_force(1.0),
            vec![-1.5, 0.0, 2.0],
        ),
        (
            HarmonicFamily::growing_force(0.5, 0.0),
            CatalogPotential::growing_force(0.5),
            vec![-1.0, 1.0, 3.0],
        ),
    ];

    for (family, closed_form, xs) in &cases {
        println!("{family}");
        println!(
            "  {:>6} {:>6} {:>14} {:>14}",
            "x", "t", "synthesized V", "closed form"
        );
        for &t in &[0.0, 0.7] {
            for &x in xs {
                let v = synth_potential(family, &gauge, &consts, &[x], t)?;
                let reference = closed_form.eval(&consts, &[x], t)?;
                println!("  {x:>6} {t:>6} {v:>14.8} {reference:>14.8}");
            }
        }
        println!();
    }

    // The same move works in 2D, where harmonic actions are real parts of
    // analytic functions.  Here: the repulsive oscillator.
    let family = HarmonicFamily::repulsive_oscillator(1.0, 0.3, -0.2);
    let closed_form = CatalogPotential::repulsive_osc(1.0);
    println!("{family}");
    println!(
        "  {:>6} {:>6} {:>6} {:>14} {:>14}",
        "x", "y", "t", "synthesized V", "closed form"
    );
    for &(x, y) in &[(0.5, 0.5), (-1.0, 2.0), (1.5, -0.5)] {
        let v = synth_potential(&family, &gauge, &consts, &[x, y], 1.3)?;
        let reference = closed_form.eval(&consts, &[x, y], 1.3)?;
        println!("  {x:>6} {y:>6} {:>6} {v:>14.8} {reference:>14.8}", 1.3);
    }

    Ok(())
}

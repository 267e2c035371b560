//! Dynamics against a moving exact answer.
//!
//! The unit-modulus states can't live on a finite grid, but a Gaussian
//! quadrature over their momentum parameter can: it is normalizable, still
//! exactly known at every time, and under the uniform-force potential it
//! accelerates as a bundle.  A Crank-Nicolson integrator started from the
//! packet at t = 0 must land on the closed form at t = T up to its own
//! O(h^2 + dt^2) error — and halving (h, dt) together must cut that error
//! by about 4.

use hjexact::evolve::{
    build_packet, compare_exact, crank_nicolson_1d, GaussianWeight, PQuadrature, PacketFamily,
    PacketSpec, PropagatorConfig, Region1D,
};
use hjexact::grid::GridSpec;
use hjexact::model::PhysConsts;
use hjexact::synth::{CatalogPotential, PotentialSpec};

fn main() -> hjexact::Result<()> {
    let consts = PhysConsts::default();
    let spec = PacketSpec {
        family: PacketFamily::constant_force(1.0),
        weight: GaussianWeight {
            p0: 0.0,
            sigma_p: 0.5,
        },
        quadrature: PQuadrature::new(-3.0, 3.0, 257),
    };
    spec.validate()?;
    let potential = PotentialSpec::catalog(CatalogPotential::uniform_force(1.0));
    let region = Region1D::new(-20.0, 20.0);
    let t_final = 1.0;

    println!(
        "uniform-force packet, T = {t_final}, compared over [{}, {}]:",
        region.xmin, region.xmax
    );
    println!(
        "  {:>6} {:>10} {:>12} {:>12} {:>8}",
        "n", "dt", "l2_rel", "norm drift", "ratio"
    );

    let mut grid = GridSpec::line(-60.0, 60.0, 2049)?;
    let mut dt = 1e-3;
    let mut previous: Option<f64> = None;
    for _ in 0..3 {
        let psi0 = build_packet(&spec, &consts, &grid, 0.0)?;
        let run = crank_nicolson_1d(
            &psi0,
            &potential,
            &consts,
            &PropagatorConfig::new(dt, t_final),
        )?;
        let report = compare_exact(&run.psi, &spec, &consts, t_final, region, run.norm_drift)?;
        let ratio = previous.map(|p| p / report.l2_rel);
        previous = Some(report.l2_rel);
        let n = grid.axes()[0].n;
        match ratio {
            Some(r) => println!(
                "  {:>6} {:>10.1e} {:>12.4e} {:>12.1e} {:>8.2}",
                n, dt, report.l2_rel, report.norm_drift, r
            ),
            None => println!(
                "  {:>6} {:>10.1e} {:>12.4e} {:>12.1e} {:>8}",
                n, dt, report.l2_rel, report.norm_drift, "-"
            ),
        }
        grid = grid.refine();
        dt *= 0.5;
    }
    println!("  (a joint halving of h and dt should give ratios near 4)");

    Ok(())
}

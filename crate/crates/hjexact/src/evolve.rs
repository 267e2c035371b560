//! Dynamical cross-checks.
//!
//! The exact states `exp(iS/hbar)` have unit modulus everywhere, so they are
//! not normalizable and cannot be propagated on a finite grid directly.
//! What *can* be propagated is a Gaussian-weighted quadrature over the free
//! momentum parameter `P`:
//!
//! ```text
//! psi(x, t) = sum_i  w_i · g(P_i) · exp(i S(x, t; P_i) / hbar)
//! ```
//!
//! Such a packet is normalizable, solves the same Schrödinger equation by
//! linearity, and is known in closed form at *every* time — so an
//! independent Crank-Nicolson integrator starting from the packet at `t = 0`
//! must reproduce the closed form at `t = T` up to its own truncation error.
//! That comparison, plus expansion of arbitrary states in the `psi_P` basis,
//! lives here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norms, ComplexField, GridSpec, InteriorMask};
use crate::model::{HarmonicFamily, PhysConsts};
use crate::synth::{exact_wavefunction, PotentialSpec};
use crate::verify::relative_error;

/// Initial states with boundary amplitude above this times the peak cannot
/// honestly satisfy Dirichlet walls.
const START_BOUNDARY_REL: f64 = 1e-8;

/// Amplitude (relative to the current peak) at the first interior node that
/// counts as probability reaching the wall.
const LEAK_REL: f64 = 1e-4;

// ---------------------------------------------------------------------------
// Packet construction.
// ---------------------------------------------------------------------------

/// One-dimensional family template with the momentum parameter `P` left
/// free, to be filled in per quadrature node.
///
/// JSON form mirrors the full family schema minus `P`:
/// `{"family": "ConstantForce1D", "params": {"F": 1.0}}`, with `params`
/// omitted entirely for `Free1D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", content = "params")]
pub enum PacketFamily {
    Free1D,
    ConstantForce1D(ConstantForceTemplate),
    GrowingForce1D(GrowingForceTemplate),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantForceTemplate {
    #[serde(rename = "F")]
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowingForceTemplate {
    pub k: f64,
}

impl PacketFamily {
    pub fn free() -> Self {
        Self::Free1D
    }

    pub fn constant_force(f: f64) -> Self {
        Self::ConstantForce1D(ConstantForceTemplate { f })
    }

    pub fn growing_force(k: f64) -> Self {
        Self::GrowingForce1D(GrowingForceTemplate { k })
    }

    /// Instantiate the template at a concrete momentum.
    pub fn with_p(&self, p: f64) -> HarmonicFamily {
        match self {
            Self::Free1D => HarmonicFamily::free(p),
            Self::ConstantForce1D(t) => HarmonicFamily::constant_force(t.f, p),
            Self::GrowingForce1D(t) => HarmonicFamily::growing_force(t.k, p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        // Instantiating at P = 0 exercises the family's own invariants
        // (finite and nonzero force, finite growth rate).
        self.with_p(0.0).validate()
    }
}

impl std::fmt::Display for PacketFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Free1D => write!(f, "Free1D{{P free}}"),
            Self::ConstantForce1D(t) => write!(f, "ConstantForce1D{{F={}, P free}}", t.f),
            Self::GrowingForce1D(t) => write!(f, "GrowingForce1D{{k={}, P free}}", t.k),
        }
    }
}

// Same strictness rationale as the full family schema: adjacently-tagged
// derives tolerate unknown sibling keys, so this is spelled out by hand.
impl<'de> Deserialize<'de> for PacketFamily {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Tagged {
            family: String,
            #[serde(default)]
            params: Option<serde_json::Value>,
        }

        let tagged = Tagged::deserialize(de)?;
        let detail = |e: serde_json::Error| {
            D::Error::custom(format!("packet family `{}`: {e}", tagged.family))
        };
        let fam = match (tagged.family.as_str(), tagged.params) {
            ("Free1D", None) => Self::Free1D,
            ("Free1D", Some(_)) => {
                return Err(D::Error::custom(
                    "packet family `Free1D` takes no params (P is the free parameter)",
                ))
            }
            ("ConstantForce1D", Some(p)) => {
                Self::ConstantForce1D(serde_json::from_value(p).map_err(detail)?)
            }
            ("GrowingForce1D", Some(p)) => {
                Self::GrowingForce1D(serde_json::from_value(p).map_err(detail)?)
            }
            ("ConstantForce1D" | "GrowingForce1D", None) => {
                return Err(D::Error::custom(format!(
                    "packet family `{}` requires params",
                    tagged.family
                )))
            }
            (other, _) => {
                return Err(D::Error::custom(format!(
                    "unknown packet family `{other}`; expected one of Free1D, ConstantForce1D, \
                     GrowingForce1D"
                )))
            }
        };
        fam.validate().map_err(D::Error::custom)?;
        Ok(fam)
    }
}

/// Gaussian weight `g(P) = exp(-(P - P0)^2 / 2 sigmaP^2)` (not normalized;
/// the packet as a whole is normalized by its caller if needed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianWeight {
    #[serde(rename = "P0")]
    pub p0: f64,
    #[serde(rename = "sigmaP")]
    pub sigma_p: f64,
}

impl GaussianWeight {
    pub fn eval(&self, p: f64) -> f64 {
        let d = (p - self.p0) / self.sigma_p;
        (-0.5 * d * d).exp()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p0.is_finite() && self.sigma_p.is_finite() && self.sigma_p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian weight needs finite P0 and sigmaP > 0, got P0={}, sigmaP={}",
                self.p0, self.sigma_p
            )));
        }
        Ok(())
    }
}

/// Trapezoid quadrature nodes over `[Pmin, Pmax]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PQuadrature {
    #[serde(rename = "Pmin")]
    pub p_min: f64,
    #[serde(rename = "Pmax")]
    pub p_max: f64,
    pub npts: usize,
}

impl PQuadrature {
    pub fn new(p_min: f64, p_max: f64, npts: usize) -> Self {
        Self { p_min, p_max, npts }
    }

    pub fn spacing(&self) -> f64 {
        if self.npts < 2 {
            0.0
        } else {
            (self.p_max - self.p_min) / (self.npts - 1) as f64
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        if self.npts < 2 {
            self.p_min
        } else {
            self.p_min + self.spacing() * i as f64
        }
    }

    /// Trapezoid weight for node `i`; a single-node quadrature degenerates
    /// to weight one (a bare sample, not an integral).
    pub fn weight(&self, i: usize) -> f64 {
        if self.npts < 2 {
            1.0
        } else if i == 0 || i == self.npts - 1 {
            0.5 * self.spacing()
        } else {
            self.spacing()
        }
    }

    /// Structural sanity only; see [`PacketSpec::validate`] for the
    /// propagation-grade requirements.
    pub fn validate_structure(&self) -> Result<()> {
        if !(self.p_min.is_finite() && self.p_max.is_finite()) || self.npts == 0 {
            return Err(Error::InvalidParameter(format!(
                "P quadrature needs finite bounds and npts >= 1, got [{}, {}] npts={}",
                self.p_min, self.p_max, self.npts
            )));
        }
        if self.npts == 1 {
            if self.p_min != self.p_max {
                return Err(Error::InvalidParameter(
                    "single-node P quadrature must have Pmin == Pmax".into(),
                ));
            }
        } else if self.p_max <= self.p_min {
            return Err(Error::InvalidParameter(format!(
                "P quadrature needs Pmax > Pmin, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }
}

/// A normalizable wave packet: Gaussian weight over the family's free
/// momentum parameter, summed by trapezoid quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub family: PacketFamily,
    pub weight: GaussianWeight,
    pub quadrature: PQuadrature,
}

impl PacketSpec {
    /// Full propagation-grade validation: at least 51 quadrature nodes and
    /// `[Pmin, Pmax]` covering `P0 ± 5 sigmaP` (weight tail below `4e-6` of
    /// the peak outside).  [`build_packet`] itself accepts degenerate
    /// single-node quadratures for testing; runs must not.
    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        self.weight.validate()?;
        self.quadrature.validate_structure()?;
        if self.quadrature.npts < 51 {
            return Err(Error::InvalidParameter(format!(
                "packet quadrature needs npts >= 51, got {}",
                self.quadrature.npts
            )));
        }
        let (lo, hi) = (
            self.weight.p0 - 5.0 * self.weight.sigma_p,
            self.weight.p0 + 5.0 * self.weight.sigma_p,
        );
        if self.quadrature.p_min > lo || self.quadrature.p_max < hi {
            return Err(Error::InvalidParameter(format!(
                "P quadrature [{}, {}] must cover P0 +- 5 sigmaP = [{lo}, {hi}]",
                self.quadrature.p_min, self.quadrature.p_max
            )));
        }
        Ok(())
    }
}

/// Evaluate the packet on a one-dimensional grid at time `t`.
///
/// Not normalized.  Errors with [`Error::QuadratureTooCoarse`] when the
/// momentum spacing violates `dP · (xmax - xmin) / hbar <= pi` — beyond
/// that the quadrature sum develops ghost copies inside the domain.
pub fn build_packet(
    spec: &PacketSpec,
    consts: &PhysConsts,
    grid: &GridSpec,
    t: f64,
) -> Result<ComplexField> {
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: grid.dim(),
        });
    }
    spec.family.validate()?;
    spec.weight.validate()?;
    spec.quadrature.validate_structure()?;
    let q = &spec.quadrature;
    if q.npts > 1 {
        let extent = grid.axes()[0].max - grid.axes()[0].min;
        let ratio = q.spacing() * extent / consts.hbar;
        if ratio > std::f64::consts::PI {
            return Err(Error::QuadratureTooCoarse(format!(
                "dP * x-extent / hbar = {ratio:.3} > pi; increase npts or shrink the domain"
            )));
        }
    }

    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i in 0..q.npts {
        let p = q.node(i);
        let wg = q.weight(i) * spec.weight.eval(p);
        let family = spec.family.with_p(p);
        for (j, value) in values.iter_mut().enumerate() {
            let x = grid.coord(0, j);
            *value += exact_wavefunction(&family, consts, &[x], t)? * wg;
        }
    }
    for (j, v) in values.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite {
                index: j,
                context: "packet sum".into(),
            });
        }
    }
    ComplexField::new(grid.clone(), values)
}

// ---------------------------------------------------------------------------
// Crank-Nicolson propagation.
// ---------------------------------------------------------------------------

/// Time-stepping parameters.  Boundary condition is Dirichlet (`psi = 0` at
/// both ends) and the potential is sampled at the step midpoint `t + dt/2`,
/// which keeps the scheme second-order for time-dependent potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
}

impl PropagatorConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final }
    }

    /// Number of steps; `T/dt` must be a positive integer (to round-off).
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0 && self.t_final.is_finite() && self.t_final > 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "propagator needs dt > 0 and T > 0, got dt={}, T={}",
                self.dt, self.t_final
            )));
        }
        let ratio = self.t_final / self.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) || steps < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "T/dt must be a positive integer, got {ratio}"
            )));
        }
        Ok(steps as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.steps().map(|_| ())
    }
}

/// Final state plus the run diagnostics the comparison step needs.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub psi: ComplexField,
    /// `| ||psi_T|| - ||psi_0|| | / ||psi_0||` — Crank-Nicolson is unitary,
    /// so this is solver round-off, at most ~1e-10 on honest runs.
    pub norm_drift: f64,
    pub steps: usize,
    /// Largest `|psi|` seen at the first interior nodes, relative to the
    /// concurrent peak; the leak guard trips at `1e-4`.
    pub max_boundary_frac: f64,
}

fn l2_norm(field: &ComplexField) -> f64 {
    norms(field, InteriorMask::new(0))
        .expect("margin-0 mask is never empty")
        .l2
}

/// Callback receiving `(step, t, psi)` after selected steps.
pub type StepObserver<'a> = &'a mut dyn FnMut(usize, f64, &ComplexField) -> Result<()>;

/// One tridiagonal Crank-Nicolson run; `dt` may be negative (backward
/// evolution), `steps` may be zero (returns the input unchanged, bitwise).
///
/// Scheme per step, with `H(t) = -(hbar^2/2m) d2/dx2 + V(x, t)`:
/// `(I + (i dt/2hbar) H(t+dt/2)) psi_next = (I - (i dt/2hbar) H(t+dt/2)) psi`.
pub fn propagate_steps(
    psi0: &ComplexField,
    potential: &PotentialSpec,
    consts: &PhysConsts,
    t0: f64,
    dt: f64,
    steps: usize,
    mut observer: Option<StepObserver<'_>>,
) -> Result<PropagationResult> {
    let grid = psi0.grid().clone();
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: grid.dim(),
        });
    }
    if potential.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: potential.dim(),
        });
    }
    if !dt.is_finite() || dt == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step size must be finite and nonzero, got {dt}"
        )));
    }
    let n = grid.len();
    if n < 3 {
        return Err(Error::GridTooSmall {
            axis: 0,
            n,
            order: 2,
            min: 3,
        });
    }

    let mut psi = psi0.values().to_vec();
    let peak = psi.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let edge = psi[0].norm().max(psi[n - 1].norm());
    if edge > START_BOUNDARY_REL * peak {
        return Err(Error::InvalidParameter(format!(
            "initial state has |psi| = {edge:.3e} at the boundary (peak {peak:.3e}); \
             Dirichlet walls need a negligible start there"
        )));
    }
    // Project the (negligible) boundary values to exact zeros once; the
    // boundary rows of the solve keep them there.
    psi[0] = Complex64::new(0.0, 0.0);
    psi[n - 1] = Complex64::new(0.0, 0.0);

    if steps == 0 {
        let psi = ComplexField::new(grid, psi)?;
        if let Some(obs) = observer.as_mut() {
            obs(0, t0, &psi)?;
        }
        return Ok(PropagationResult {
            psi,
            norm_drift: 0.0,
            steps: 0,
            max_boundary_frac: 0.0,
        });
    }

    let h = grid.spacing(0);
    let hbar = consts.hbar;
    let m = consts.m;
    // H off-diagonal and the kinetic part of its diagonal.
    let off_h = -hbar * hbar / (2.0 * m * h * h);
    let diag_kin = hbar * hbar / (m * h * h);
    // A = I + i*alpha*H, B = I - i*alpha*H with alpha = dt/(2 hbar).
    let alpha = dt / (2.0 * hbar);
    let a_off = Complex64::new(0.0, alpha * off_h);
    let b_off = -a_off;

    let norm0 = {
        let f = ComplexField::new(grid.clone(), psi.clone())?;
        l2_norm(&f)
    };
    if norm0 == 0.0 {
        return Err(Error::InvalidParameter(
            "initial state is identically zero".into(),
        ));
    }

    let mut v_mid = vec![0.0f64; n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
    let mut max_boundary_frac = 0.0f64;

    if let Some(obs) = observer.as_mut() {
        let f = ComplexField::new(grid.clone(), psi.clone())?;
        obs(0, t0, &f)?;
    }

    for step in 0..steps {
        let t_mid = t0 + dt * (step as f64 + 0.5);
        for (j, v) in v_mid.iter_mut().enumerate() {
            *v = potential.eval(consts, &[grid.coord(0, j)], t_mid)?;
        }

        // rhs = B psi, with Dirichlet rows pinned to zero.
        rhs[0] = Complex64::new(0.0, 0.0);
        rhs[n - 1] = Complex64::new(0.0, 0.0);
        for j in 1..n - 1 {
            let b_diag = Complex64::new(1.0, -alpha * (diag_kin + v_mid[j]));
            rhs[j] = b_off * (psi[j - 1] + psi[j + 1]) + b_diag * psi[j];
        }

        // Thomas sweep for A psi_next = rhs over the interior.  A's rows are
        // diagonally dominant (|1 + i(...)| >= 1 > 2|alpha off_h| for the
        // step sizes this tool runs), so no pivoting is needed.
        let a_diag = |j: usize| Complex64::new(1.0, alpha * (diag_kin + v_mid[j]));
        c_prime[1] = a_off / a_diag(1);
        rhs[1] /= a_diag(1);
        for j in 2..n - 1 {
            let denom = a_diag(j) - a_off * c_prime[j - 1];
            c_prime[j] = a_off / denom;
            rhs[j] = (rhs[j] - a_off * rhs[j - 1]) / denom;
        }
        psi[n - 2] = rhs[n - 2];
        for j in (1..n - 2).rev() {
            psi[j] = rhs[j] - c_prime[j] * psi[j + 1];
        }
        psi[0] = Complex64::new(0.0, 0.0);
        psi[n - 1] = Complex64::new(0.0, 0.0);

        let peak = psi.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let near_edge = psi[1].norm().max(psi[n - 2].norm());
        if peak > 0.0 {
            max_boundary_frac = max_boundary_frac.max(near_edge / peak);
        }
        if near_edge > LEAK_REL * peak {
            return Err(Error::BoundaryLeak {
                step: step + 1,
                amplitude: near_edge,
                limit: LEAK_REL * peak,
            });
        }

        if let Some(obs) = observer.as_mut() {
            let f = ComplexField::new(grid.clone(), psi.clone())?;
            obs(step + 1, t0 + dt * (step + 1) as f64, &f)?;
        }
    }

    let psi = ComplexField::new(grid, psi)?;
    let norm_t = l2_norm(&psi);
    let norm_drift = (norm_t - norm0).abs() / norm0;
    Ok(PropagationResult {
        psi,
        norm_drift,
        steps,
        max_boundary_frac,
    })
}

/// Forward Crank-Nicolson run from `t = 0` through `t = T`.
pub fn crank_nicolson_1d(
    psi0: &ComplexField,
    potential: &PotentialSpec,
    consts: &PhysConsts,
    config: &PropagatorConfig,
) -> Result<PropagationResult> {
    let steps = config.steps()?;
    propagate_steps(psi0, potential, consts, 0.0, config.dt, steps, None)
}

/// Forward run that hands every `stride`-th state (plus the initial and
/// final ones) to `observer` for snapshot output.
pub fn crank_nicolson_1d_observed(
    psi0: &ComplexField,
    potential: &PotentialSpec,
    consts: &PhysConsts,
    config: &PropagatorConfig,
    stride: usize,
    mut observer: impl FnMut(usize, f64, &ComplexField) -> Result<()>,
) -> Result<PropagationResult> {
    let steps = config.steps()?;
    if stride == 0 {
        return Err(Error::InvalidParameter(
            "snapshot stride must be >= 1".into(),
        ));
    }
    let mut cb = |step: usize, t: f64, f: &ComplexField| {
        if step.is_multiple_of(stride) || step == steps {
            observer(step, t, f)
        } else {
            Ok(())
        }
    };
    propagate_steps(
        psi0,
        potential,
        consts,
        0.0,
        config.dt,
        steps,
        Some(&mut cb),
    )
}

// ---------------------------------------------------------------------------
// Comparison against the exact packet.
// ---------------------------------------------------------------------------

/// Interior window over which numeric and exact states are compared; walls
/// are excluded so the comparison tests the physics, not the boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region1D {
    pub xmin: f64,
    pub xmax: f64,
}

impl Region1D {
    pub fn new(xmin: f64, xmax: f64) -> Self {
        Self { xmin, xmax }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.xmin && x <= self.xmax
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xmin.is_finite() && self.xmax.is_finite() && self.xmax > self.xmin) {
            return Err(Error::InvalidParameter(format!(
                "region needs finite xmax > xmin, got [{}, {}]",
                self.xmin, self.xmax
            )));
        }
        Ok(())
    }
}

/// Outcome of comparing a propagated state against the closed-form packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareReport {
    pub l2_rel: f64,
    pub linf_rel: f64,
    pub norm_drift: f64,
    pub region: Region1D,
}

/// Compare `numeric` to the exact packet at time `t` over `region`, after
/// multiplying `numeric` by the unit global phase that minimizes the L2
/// difference (an x-independent phase is physically irrelevant and
/// Crank-Nicolson accumulates a benign one).
pub fn compare_exact(
    numeric: &ComplexField,
    spec: &PacketSpec,
    consts: &PhysConsts,
    t: f64,
    region: Region1D,
    norm_drift: f64,
) -> Result<CompareReport> {
    region.validate()?;
    let grid = numeric.grid();
    let reference = build_packet(spec, consts, grid, t)?;

    let in_region: Vec<usize> = (0..grid.len())
        .filter(|&j| region.contains(grid.coord(0, j)))
        .collect();
    if in_region.is_empty() {
        return Err(Error::EmptyInterior { margin: 0 });
    }

    // Optimal unit phase: e^{i phi} = z / |z| with z = <numeric, reference>.
    let mut z = Complex64::new(0.0, 0.0);
    for &j in &in_region {
        z += numeric.values()[j].conj() * reference.values()[j];
    }
    let phase = if z.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / z.norm()
    };

    let h = grid.spacing(0);
    let (mut diff_sq, mut ref_sq) = (0.0f64, 0.0f64);
    let (mut diff_linf, mut ref_linf) = (0.0f64, 0.0f64);
    for &j in &in_region {
        let aligned = numeric.values()[j] * phase;
        let d = (aligned - reference.values()[j]).norm();
        let r = reference.values()[j].norm();
        diff_sq += d * d * h;
        ref_sq += r * r * h;
        diff_linf = diff_linf.max(d);
        ref_linf = ref_linf.max(r);
    }
    let l2_rel = relative_error(diff_sq.sqrt(), ref_sq.sqrt());
    let linf_rel = relative_error(diff_linf, ref_linf);
    let report = CompareReport {
        l2_rel,
        linf_rel,
        norm_drift,
        region,
    };
    if !(l2_rel.is_finite() && linf_rel.is_finite() && norm_drift.is_finite()) {
        return Err(Error::NonFinite {
            index: 0,
            context: "comparison report".into(),
        });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Expansion in the psi_P basis.
// ---------------------------------------------------------------------------

/// Coefficients and reconstruction of a target state in the family basis.
#[derive(Debug, Clone)]
pub struct ExpansionResult {
    pub p_nodes: Vec<f64>,
    pub coeffs: Vec<Complex64>,
    pub reconstruction: ComplexField,
    pub l2_rel_error: f64,
}

/// Expand `target` over the family states and rebuild it:
///
/// `c(P_i) = (1/2 pi hbar) * trapz_x conj(psi_Pi(x,t)) target(x)`,
/// `reconstruction = sum_i w_i c(P_i) psi_Pi(·,t)`.
///
/// The momentum spacing must satisfy `dP · max|x| / hbar <= pi`, else the
/// periodic images of the discrete-P resolvent land inside the domain.
pub fn expand_and_reconstruct(
    target: &ComplexField,
    template: &PacketFamily,
    consts: &PhysConsts,
    t: f64,
    quadrature: &PQuadrature,
) -> Result<ExpansionResult> {
    let grid = target.grid();
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: grid.dim(),
        });
    }
    template.validate()?;
    quadrature.validate_structure()?;
    if quadrature.npts > 1 {
        let x_max = grid.axes()[0].min.abs().max(grid.axes()[0].max.abs());
        let ratio = quadrature.spacing() * x_max / consts.hbar;
        if ratio > std::f64::consts::PI {
            return Err(Error::QuadratureTooCoarse(format!(
                "dP * max|x| / hbar = {ratio:.3} > pi; increase npts or shrink the domain"
            )));
        }
    }

    let n = grid.len();
    let h = grid.spacing(0);
    let x_weight = |j: usize| if j == 0 || j == n - 1 { 0.5 * h } else { h };
    let two_pi_hbar = 2.0 * std::f64::consts::PI * consts.hbar;

    let mut p_nodes = Vec::with_capacity(quadrature.npts);
    let mut coeffs = Vec::with_capacity(quadrature.npts);
    let mut rec = vec![Complex64::new(0.0, 0.0); n];
    let mut basis = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..quadrature.npts {
        let p = quadrature.node(i);
        let family = template.with_p(p);
        for (j, b) in basis.iter_mut().enumerate() {
            *b = exact_wavefunction(&family, consts, &[grid.coord(0, j)], t)?;
        }
        let mut c = Complex64::new(0.0, 0.0);
        for (j, b) in basis.iter().enumerate() {
            c += b.conj() * target.values()[j] * x_weight(j);
        }
        c /= two_pi_hbar;
        let cw = c * quadrature.weight(i);
        for (j, b) in basis.iter().enumerate() {
            rec[j] += b * cw;
        }
        p_nodes.push(p);
        coeffs.push(c);
    }

    let reconstruction = ComplexField::new(grid.clone(), rec)?;
    let mut diff_sq = 0.0f64;
    let mut ref_sq = 0.0f64;
    for j in 0..n {
        let d = (reconstruction.values()[j] - target.values()[j]).norm();
        let r = target.values()[j].norm();
        diff_sq += d * d * x_weight(j);
        ref_sq += r * r * x_weight(j);
    }
    let l2_rel_error = relative_error(diff_sq.sqrt(), ref_sq.sqrt());
    Ok(ExpansionResult {
        p_nodes,
        coeffs,
        reconstruction,
        l2_rel_error,
    })
}

//! Families of actions `S(x, t)` that are harmonic in the spatial
//! coordinates (`∇²S = 0`).  Each family evaluates `S`, its spatial
//! gradient, its time derivative, and its (identically zero) Laplacian in
//! closed form; the synthesis layer turns those into potentials and exact
//! wavefunctions.

pub mod timecoeff;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use timecoeff::{Term, TimeCoefficient};

/// Physical constants carried symbolically through every formula.  The
/// defaults pick natural units, but nothing in the crate assumes them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPhysConsts")]
pub struct PhysConsts {
    pub hbar: f64,
    pub m: f64,
    /// Charge entering the minimal-coupling term; only used with a gauge field.
    pub e: f64,
    /// Speed-of-light constant dividing the vector potential.
    pub c: f64,
}

impl Default for PhysConsts {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            m: 1.0,
            e: 1.0,
            c: 1.0,
        }
    }
}

impl PhysConsts {
    pub fn new(hbar: f64, m: f64, e: f64, c: f64) -> Result<Self> {
        let raw = RawPhysConsts { hbar, m, e, c };
        Self::try_from(raw).map_err(Error::InvalidParameter)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawPhysConsts {
    hbar: f64,
    m: f64,
    e: f64,
    c: f64,
}

impl Default for RawPhysConsts {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            m: 1.0,
            e: 1.0,
            c: 1.0,
        }
    }
}

impl TryFrom<RawPhysConsts> for PhysConsts {
    type Error = String;

    fn try_from(raw: RawPhysConsts) -> std::result::Result<Self, String> {
        if !(raw.hbar.is_finite() && raw.m.is_finite() && raw.e.is_finite() && raw.c.is_finite()) {
            return Err("constants must be finite".into());
        }
        if raw.hbar <= 0.0 {
            return Err(format!("hbar must be positive, got {}", raw.hbar));
        }
        if raw.m <= 0.0 {
            return Err(format!("m must be positive, got {}", raw.m));
        }
        if raw.c == 0.0 {
            return Err("c must be nonzero".into());
        }
        Ok(Self {
            hbar: raw.hbar,
            m: raw.m,
            e: raw.e,
            c: raw.c,
        })
    }
}

/// `S`, `∇S`, `∂S/∂t`, and `∇²S` at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionEval {
    pub s: f64,
    grad: [f64; 3],
    dim: usize,
    pub ds_dt: f64,
    /// Spatial Laplacian.  Exactly `0.0` for every valid family — the
    /// per-axis second derivatives cancel term by term — but kept explicit
    /// so tests can assert it.
    pub lap: f64,
}

impl ActionEval {
    /// Assemble an evaluation from explicit parts (`grad` holds one entry
    /// per spatial axis, at most three).
    pub fn new(s: f64, grad: &[f64], ds_dt: f64, lap: f64) -> Self {
        assert!(grad.len() <= 3, "at most three spatial axes");
        let mut g = [0.0; 3];
        g[..grad.len()].copy_from_slice(grad);
        Self {
            s,
            grad: g,
            dim: grad.len(),
            ds_dt,
            lap,
        }
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

// ---------------------------------------------------------------------------
// Family parameter blocks.  Each is its own struct so the JSON form can
// reject unknown keys per family.
// ---------------------------------------------------------------------------

/// `S = P x - P² t / 2m`: a free plane wave with momentum `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Free1DParams {
    #[serde(rename = "P")]
    pub p: f64,
}

/// `S = (F t + P) x - (F t + P)³ / 6 m F`, the uniform-force action.
/// `F = 0` is rejected (the closed form divides by `F`); use `Free1D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantForce1DParams {
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

/// `S = (k t²/2 + P) x - (k² t⁵/20 + k P t³/3 + P² t) / 2m`,
/// the action for a force growing linearly in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowingForce1DParams {
    pub k: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

/// `S = α(t) x + β(t)` with a caller-supplied real time profile `α`.
/// `β` is fixed by `β' = -α²/2m` (so the synthesized potential carries no
/// spatially constant term), anchored at `β(0) = beta0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralLinear1DParams {
    pub alpha: TimeCoefficient,
    #[serde(default)]
    pub beta0: f64,
}

/// `S = Re f(z, t)` for a polynomial `f(z, t) = Σ_j c_j(t) z^j` in
/// `z = x + i y`.  Harmonic automatically, by the Cauchy-Riemann relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticPoly2DParams {
    pub coeffs: Vec<TimeCoefficient>,
}

/// The two-dimensional repulsive ("inverted") oscillator:
/// `S = (mω/2)(x² - y²) + P₁ e^{-ωt} x + P₂ e^{ωt} y
///      + (1/4mω)(P₁² e^{-2ωt} - P₂² e^{2ωt})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepulsiveOscillator2DParams {
    pub omega: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "P2")]
    pub p2: f64,
}

/// `S = sqrt(mk/2) ln(x² + y²)`: the time-independent action of the
/// attractive inverse-square potential `V = -k/(x²+y²)`.  Single-valued
/// everywhere except the origin, where it is singular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogCentral2DParams {
    pub k: f64,
}

/// One block of a [`Composite`](HarmonicFamily::Composite) family: a
/// primitive family acting on the coordinate slice starting at `axis_offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeBlock {
    pub family: HarmonicFamily,
    pub axis_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeParams {
    pub blocks: Vec<CompositeBlock>,
}

/// The families of harmonic actions the crate knows how to evaluate.
///
/// Additivity over independent coordinate slices is what `Composite`
/// captures: each block contributes its own `S`, and the total potential is
/// the sum of the per-block potentials.
///
/// The JSON form is `{"family": "<tag>", "params": {...}}`; deserialization
/// is strict (unknown keys anywhere are rejected) and runs
/// [`validate`](Self::validate), so an ill-formed family never survives
/// config parsing.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", content = "params")]
pub enum HarmonicFamily {
    Free1D(Free1DParams),
    ConstantForce1D(ConstantForce1DParams),
    GrowingForce1D(GrowingForce1DParams),
    GeneralLinear1D(GeneralLinear1DParams),
    AnalyticPoly2D(AnalyticPoly2DParams),
    RepulsiveOscillator2D(RepulsiveOscillator2DParams),
    LogCentral2D(LogCentral2DParams),
    Composite(CompositeParams),
}

impl std::fmt::Display for HarmonicFamily {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Free1D(p) => write!(fm, "Free1D{{P={}}}", p.p),
            Self::ConstantForce1D(p) => write!(fm, "ConstantForce1D{{F={}, P={}}}", p.f, p.p),
            Self::GrowingForce1D(p) => write!(fm, "GrowingForce1D{{k={}, P={}}}", p.k, p.p),
            Self::GeneralLinear1D(p) => {
                write!(
                    fm,
                    "GeneralLinear1D{{{} terms, beta0={}}}",
                    p.alpha.terms().len(),
                    p.beta0
                )
            }
            Self::AnalyticPoly2D(p) => write!(
                fm,
                "AnalyticPoly2D{{deg={}}}",
                p.coeffs.len().saturating_sub(1)
            ),
            Self::RepulsiveOscillator2D(p) => {
                write!(
                    fm,
                    "RepulsiveOscillator2D{{omega={}, P1={}, P2={}}}",
                    p.omega, p.p1, p.p2
                )
            }
            Self::LogCentral2D(p) => write!(fm, "LogCentral2D{{k={}}}", p.k),
            Self::Composite(p) => {
                write!(fm, "Composite[")?;
                for (i, b) in p.blocks.iter().enumerate() {
                    if i > 0 {
                        write!(fm, " + ")?;
                    }
                    write!(fm, "{}@{}", b.family, b.axis_offset)?;
                }
                write!(fm, "]")
            }
        }
    }
}

impl HarmonicFamily {
    pub fn free(p: f64) -> Self {
        Self::Free1D(Free1DParams { p })
    }

    pub fn constant_force(f: f64, p: f64) -> Self {
        Self::ConstantForce1D(ConstantForce1DParams { f, p })
    }

    pub fn growing_force(k: f64, p: f64) -> Self {
        Self::GrowingForce1D(GrowingForce1DParams { k, p })
    }

    pub fn general_linear(alpha: TimeCoefficient, beta0: f64) -> Self {
        Self::GeneralLinear1D(GeneralLinear1DParams { alpha, beta0 })
    }

    pub fn analytic_poly(coeffs: Vec<TimeCoefficient>) -> Self {
        Self::AnalyticPoly2D(AnalyticPoly2DParams { coeffs })
    }

    pub fn repulsive_oscillator(omega: f64, p1: f64, p2: f64) -> Self {
        Self::RepulsiveOscillator2D(RepulsiveOscillator2DParams { omega, p1, p2 })
    }

    pub fn log_central(k: f64) -> Self {
        Self::LogCentral2D(LogCentral2DParams { k })
    }

    pub fn composite(blocks: Vec<(HarmonicFamily, usize)>) -> Self {
        Self::Composite(CompositeParams {
            blocks: blocks
                .into_iter()
                .map(|(family, axis_offset)| CompositeBlock {
                    family,
                    axis_offset,
                })
                .collect(),
        })
    }

    /// Number of spatial coordinates the family acts on.
    pub fn dim(&self) -> usize {
        match self {
            Self::Free1D(_)
            | Self::ConstantForce1D(_)
            | Self::GrowingForce1D(_)
            | Self::GeneralLinear1D(_) => 1,
            Self::AnalyticPoly2D(_) | Self::RepulsiveOscillator2D(_) | Self::LogCentral2D(_) => 2,
            Self::Composite(p) => p.blocks.iter().map(|b| b.family.dim()).sum(),
        }
    }

    /// True when `S` restricted to any single axis is a polynomial of degree
    /// at most two, so centered second-difference stencils reproduce its
    /// Laplacian exactly and the discrete residual sits at round-off level.
    pub fn stencil_exact(&self) -> bool {
        match self {
            Self::Free1D(_)
            | Self::ConstantForce1D(_)
            | Self::GrowingForce1D(_)
            | Self::GeneralLinear1D(_)
            | Self::RepulsiveOscillator2D(_) => true,
            Self::AnalyticPoly2D(p) => p.coeffs.len() <= 3,
            Self::LogCentral2D(_) => false,
            Self::Composite(p) => p.blocks.iter().all(|b| b.family.stencil_exact()),
        }
    }

    /// Check the family's parameter invariants.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{what} must be finite, got {v}"
                )))
            }
        };
        match self {
            Self::Free1D(p) => finite(p.p, "P"),
            Self::ConstantForce1D(p) => {
                finite(p.f, "F")?;
                finite(p.p, "P")?;
                if p.f == 0.0 {
                    return Err(Error::InvalidParameter(
                        "ConstantForce1D needs F != 0 (the closed form divides by F); use Free1D"
                            .into(),
                    ));
                }
                Ok(())
            }
            Self::GrowingForce1D(p) => {
                finite(p.k, "k")?;
                finite(p.p, "P")
            }
            Self::GeneralLinear1D(p) => {
                finite(p.beta0, "beta0")?;
                if !p.alpha.is_real() {
                    return Err(Error::InvalidParameter(
                        "GeneralLinear1D alpha must be real-valued".into(),
                    ));
                }
                Ok(())
            }
            Self::AnalyticPoly2D(p) => {
                if p.coeffs.is_empty() {
                    return Err(Error::InvalidParameter(
                        "AnalyticPoly2D needs at least one coefficient".into(),
                    ));
                }
                Ok(())
            }
            Self::RepulsiveOscillator2D(p) => {
                finite(p.omega, "omega")?;
                finite(p.p1, "P1")?;
                finite(p.p2, "P2")?;
                if p.omega <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "RepulsiveOscillator2D needs omega > 0, got {}",
                        p.omega
                    )));
                }
                Ok(())
            }
            Self::LogCentral2D(p) => {
                finite(p.k, "k")?;
                if p.k <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "LogCentral2D needs k > 0, got {}",
                        p.k
                    )));
                }
                Ok(())
            }
            Self::Composite(p) => {
                if p.blocks.is_empty() {
                    return Err(Error::InvalidParameter(
                        "Composite needs at least one block".into(),
                    ));
                }
                let mut sorted: Vec<&CompositeBlock> = p.blocks.iter().collect();
                sorted.sort_by_key(|b| b.axis_offset);
                let mut next = 0usize;
                for block in sorted {
                    if matches!(block.family, Self::Composite(_)) {
                        return Err(Error::InvalidParameter(
                            "Composite blocks must be primitive families".into(),
                        ));
                    }
                    block.family.validate()?;
                    if block.axis_offset != next {
                        return Err(Error::InvalidParameter(format!(
                            "Composite blocks must tile the axes contiguously: expected offset {next}, got {}",
                            block.axis_offset
                        )));
                    }
                    next += block.family.dim();
                }
                if next > 3 {
                    return Err(Error::InvalidParameter(format!(
                        "Composite total dimension {next} exceeds 3"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Evaluate `S`, `∇S`, `∂S/∂t`, and `∇²S` at the point `x` and time `t`.
    pub fn eval_action(&self, consts: &PhysConsts, x: &[f64], t: f64) -> Result<ActionEval> {
        let dim = self.dim();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        let m = consts.m;
        match self {
            Self::Free1D(p) => {
                let s = p.p * x[0] - p.p * p.p * t / (2.0 * m);
                Ok(ActionEval::new(s, &[p.p], -p.p * p.p / (2.0 * m), 0.0))
            }
            Self::ConstantForce1D(p) => {
                if p.f == 0.0 {
                    return Err(Error::InvalidParameter("ConstantForce1D with F = 0".into()));
                }
                let a = p.f * t + p.p;
                let s = a * x[0] - a * a * a / (6.0 * m * p.f);
                let ds_dt = p.f * x[0] - a * a / (2.0 * m);
                Ok(ActionEval::new(s, &[a], ds_dt, 0.0))
            }
            Self::GrowingForce1D(p) => {
                let a = 0.5 * p.k * t * t + p.p;
                let drift =
                    (p.k * p.k * t.powi(5) / 20.0 + p.k * p.p * t.powi(3) / 3.0 + p.p * p.p * t)
                        / (2.0 * m);
                let s = a * x[0] - drift;
                let ds_dt = p.k * t * x[0] - a * a / (2.0 * m);
                Ok(ActionEval::new(s, &[a], ds_dt, 0.0))
            }
            Self::GeneralLinear1D(p) => {
                let alpha = p.alpha.eval_real(t);
                let alpha_dot = p.alpha.eval_derivative(t).re;
                let beta = linear1d_beta(&p.alpha, m, p.beta0).eval_real(t);
                let s = alpha * x[0] + beta;
                // beta' = -alpha^2 / 2m by construction.
                let ds_dt = alpha_dot * x[0] - alpha * alpha / (2.0 * m);
                Ok(ActionEval::new(s, &[alpha], ds_dt, 0.0))
            }
            Self::AnalyticPoly2D(p) => {
                let d = analytic2d_derivatives(&p.coeffs, x[0], x[1], t);
                // S = Re f.  Cauchy-Riemann: S_x = Re f', S_y = -Im f',
                // S_xx = Re f'', S_yy = -Re f'' — the Laplacian cancels exactly.
                let sxx = d.fpp.re;
                let syy = -d.fpp.re;
                Ok(ActionEval::new(
                    d.f.re,
                    &[d.fp.re, -d.fp.im],
                    d.dfdt.re,
                    sxx + syy,
                ))
            }
            Self::RepulsiveOscillator2D(p) => {
                let (xx, yy) = (x[0], x[1]);
                let w = p.omega;
                let ep = (-w * t).exp(); // e^{-ωt}
                let en = (w * t).exp(); // e^{+ωt}
                let s = 0.5 * m * w * (xx * xx - yy * yy)
                    + p.p1 * ep * xx
                    + p.p2 * en * yy
                    + (p.p1 * p.p1 * ep * ep - p.p2 * p.p2 * en * en) / (4.0 * m * w);
                let gx = m * w * xx + p.p1 * ep;
                let gy = -(m * w * yy) + p.p2 * en;
                let ds_dt = -w * p.p1 * ep * xx + w * p.p2 * en * yy
                    - (p.p1 * p.p1 * ep * ep + p.p2 * p.p2 * en * en) / (2.0 * m);
                let sxx = m * w;
                let syy = -(m * w);
                Ok(ActionEval::new(s, &[gx, gy], ds_dt, sxx + syy))
            }
            Self::LogCentral2D(p) => {
                let (xx, yy) = (x[0], x[1]);
                let r2 = xx * xx + yy * yy;
                if r2 == 0.0 {
                    return Err(Error::SingularPoint { x: xx, y: yy });
                }
                let coef = (m * p.k / 2.0).sqrt();
                let s = coef * r2.ln();
                let gx = 2.0 * coef * xx / r2;
                let gy = 2.0 * coef * yy / r2;
                // Second derivatives 2c(y²-x²)/r⁴ and 2c(x²-y²)/r⁴ are exact
                // negations of one another.
                let sxx = 2.0 * coef * (yy * yy - xx * xx) / (r2 * r2);
                let syy = 2.0 * coef * (xx * xx - yy * yy) / (r2 * r2);
                Ok(ActionEval::new(s, &[gx, gy], 0.0, sxx + syy))
            }
            Self::Composite(p) => {
                let mut s = 0.0;
                let mut ds_dt = 0.0;
                let mut lap = 0.0;
                let mut grad = [0.0; 3];
                for block in &p.blocks {
                    let d = block.family.dim();
                    let slice = &x[block.axis_offset..block.axis_offset + d];
                    let part = block.family.eval_action(consts, slice, t)?;
                    s += part.s;
                    ds_dt += part.ds_dt;
                    lap += part.lap;
                    grad[block.axis_offset..block.axis_offset + d].copy_from_slice(part.grad());
                }
                Ok(ActionEval::new(s, &grad[..dim], ds_dt, lap))
            }
        }
    }
}

// Adjacently-tagged derives tolerate unknown sibling keys, which would let
// config typos slip through, so deserialization is spelled out by hand.
impl<'de> Deserialize<'de> for HarmonicFamily {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Tagged {
            family: String,
            params: serde_json::Value,
        }

        let tagged = Tagged::deserialize(de)?;
        let detail =
            |e: serde_json::Error| D::Error::custom(format!("family `{}`: {e}", tagged.family));
        let fam = match tagged.family.as_str() {
            "Free1D" => Self::Free1D(serde_json::from_value(tagged.params).map_err(detail)?),
            "ConstantForce1D" => {
                Self::ConstantForce1D(serde_json::from_value(tagged.params).map_err(detail)?)
            }
            "GrowingForce1D" => {
                Self::GrowingForce1D(serde_json::from_value(tagged.params).map_err(detail)?)
            }
            "GeneralLinear1D" => {
                Self::GeneralLinear1D(serde_json::from_value(tagged.params).map_err(detail)?)
            }
            "AnalyticPoly2D" => {
                Self::AnalyticPoly2D(serde_json::from_value(tagged.params).map_err(detail)?)
            }
            "RepulsiveOscillator2D" => {
                Self::RepulsiveOscillator2D(serde_json::from_value(tagged.params).map_err(detail)?)
            }
            "LogCentral2D" => {
                Self::LogCentral2D(serde_json::from_value(tagged.params).map_err(detail)?)
            }
            "Composite" => Self::Composite(serde_json::from_value(tagged.params).map_err(detail)?),
            other => {
                return Err(D::Error::custom(format!(
                    "unknown family `{other}`; expected one of Free1D, ConstantForce1D, \
                     GrowingForce1D, GeneralLinear1D, AnalyticPoly2D, RepulsiveOscillator2D, \
                     LogCentral2D, Composite"
                )))
            }
        };
        fam.validate().map_err(D::Error::custom)?;
        Ok(fam)
    }
}

/// Value, `z`-derivative, second `z`-derivative, and time derivative of the
/// polynomial `f(z, t) = Σ_j c_j(t) z^j` at `z = x + i y`.
#[derive(Debug, Clone, Copy)]
pub struct Analytic2DDerivatives {
    pub f: Complex64,
    pub fp: Complex64,
    pub fpp: Complex64,
    pub dfdt: Complex64,
}

/// Evaluate `f`, `f'`, `f''`, and `∂f/∂t` by Horner recursion on the
/// coefficient values at time `t`.
pub fn analytic2d_derivatives(
    coeffs: &[TimeCoefficient],
    x: f64,
    y: f64,
    t: f64,
) -> Analytic2DDerivatives {
    let z = Complex64::new(x, y);
    let zero = Complex64::new(0.0, 0.0);
    let (mut f, mut fp, mut fpp, mut dfdt) = (zero, zero, zero, zero);
    for (j, coeff) in coeffs.iter().enumerate().rev() {
        let cj = coeff.eval(t);
        f = f * z + cj;
        dfdt = dfdt * z + coeff.eval_derivative(t);
        if j >= 1 {
            fp = fp * z + cj * j as f64;
        }
        if j >= 2 {
            fpp = fpp * z + cj * (j * (j - 1)) as f64;
        }
    }
    Analytic2DDerivatives { f, fp, fpp, dfdt }
}

/// The drift term for a linear action `S = α(t) x + β(t)`:
/// `β(t) = beta0 - (1/2m) ∫_0^t α(s)² ds`, the unique choice (up to the
/// constant `beta0`) for which the synthesized potential has no
/// `x`-independent part.
pub fn linear1d_beta(alpha: &TimeCoefficient, m: f64, beta0: f64) -> TimeCoefficient {
    TimeCoefficient::constant(beta0).add(
        &alpha
            .mul(alpha)
            .integral_from_zero()
            .scale(-1.0 / (2.0 * m)),
    )
}

/// A self-contained, serializable description of a family plus the constants
/// it is meant to be evaluated with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescription {
    #[serde(flatten)]
    pub family: HarmonicFamily,
    #[serde(default)]
    pub consts: PhysConsts,
}

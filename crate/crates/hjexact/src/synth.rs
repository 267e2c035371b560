//! Potential synthesis.  Given a harmonic action `S`, the potential
//!
//! ```text
//! V = -dS/dt - (1/2m) |grad S - (e/c) A|^2
//! ```
//!
//! is precisely the one that makes `S` solve the Hamilton-Jacobi equation
//! and `psi = exp(i S / hbar)` solve the Schrödinger equation exactly.
//! This module also carries the closed-form catalog the synthesized
//! potentials are checked against, and the exact wavefunction itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HarmonicFamily, PhysConsts};

/// Vector potential entering through minimal coupling.  Only divergence-free
/// gauges are offered, so no `div A` term appears anywhere.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(tag = "kind", content = "params")]
pub enum GaugeField {
    #[default]
    Zero,
    /// Uniform magnetic field along the third axis in the symmetric gauge
    /// `A = (-B y / 2, B x / 2, 0)`.  Needs at least two coordinates.
    UniformB(UniformBParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformBParams {
    #[serde(rename = "B")]
    pub b: f64,
}

impl GaugeField {
    pub fn uniform_b(b: f64) -> Self {
        Self::UniformB(UniformBParams { b })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    /// Components of `A` at `x`, zero-padded to three entries.
    pub fn vector_potential(&self, x: &[f64]) -> Result<[f64; 3]> {
        match self {
            Self::Zero => Ok([0.0; 3]),
            Self::UniformB(p) => {
                if x.len() < 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        got: x.len(),
                    });
                }
                Ok([-0.5 * p.b * x[1], 0.5 * p.b * x[0], 0.0])
            }
        }
    }
}

impl<'de> Deserialize<'de> for GaugeField {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Tagged {
            kind: String,
            #[serde(default)]
            params: Option<serde_json::Value>,
        }

        let tagged = Tagged::deserialize(de)?;
        match tagged.kind.as_str() {
            "Zero" => match tagged.params {
                None | Some(serde_json::Value::Null) => Ok(Self::Zero),
                Some(_) => Err(D::Error::custom("gauge `Zero` takes no params")),
            },
            "UniformB" => {
                let params = tagged
                    .params
                    .ok_or_else(|| D::Error::custom("gauge `UniformB` needs params"))?;
                let p: UniformBParams = serde_json::from_value(params)
                    .map_err(|e| D::Error::custom(format!("gauge `UniformB`: {e}")))?;
                if !p.b.is_finite() {
                    return Err(D::Error::custom("gauge `UniformB`: B must be finite"));
                }
                Ok(Self::UniformB(p))
            }
            other => Err(D::Error::custom(format!(
                "unknown gauge `{other}`; expected Zero or UniformB"
            ))),
        }
    }
}

/// Closed-form reference potentials.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "params")]
pub enum CatalogPotential {
    /// `V = -F x`
    UniformForce(UniformForceParams),
    /// `V = -k t x`
    GrowingForce(GrowingForceParams),
    /// `V = -(m omega^2 / 2)(x^2 + y^2)`
    RepulsiveOsc(RepulsiveOscParams),
    /// `V = -k / (x^2 + y^2)`
    InverseSquare(InverseSquareParams),
    /// Sum of catalog potentials over disjoint coordinate slices.
    CompositeSum(CompositeSumParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformForceParams {
    #[serde(rename = "F")]
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowingForceParams {
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepulsiveOscParams {
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseSquareParams {
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogBlock {
    pub potential: CatalogPotential,
    pub axis_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeSumParams {
    pub blocks: Vec<CatalogBlock>,
}

impl CatalogPotential {
    pub fn uniform_force(f: f64) -> Self {
        Self::UniformForce(UniformForceParams { f })
    }

    pub fn growing_force(k: f64) -> Self {
        Self::GrowingForce(GrowingForceParams { k })
    }

    pub fn repulsive_osc(omega: f64) -> Self {
        Self::RepulsiveOsc(RepulsiveOscParams { omega })
    }

    pub fn inverse_square(k: f64) -> Self {
        Self::InverseSquare(InverseSquareParams { k })
    }

    pub fn composite_sum(blocks: Vec<(CatalogPotential, usize)>) -> Self {
        Self::CompositeSum(CompositeSumParams {
            blocks: blocks
                .into_iter()
                .map(|(potential, axis_offset)| CatalogBlock {
                    potential,
                    axis_offset,
                })
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::UniformForce(_) | Self::GrowingForce(_) => 1,
            Self::RepulsiveOsc(_) | Self::InverseSquare(_) => 2,
            Self::CompositeSum(p) => p.blocks.iter().map(|b| b.potential.dim()).sum(),
        }
    }

    pub fn eval(&self, consts: &PhysConsts, x: &[f64], t: f64) -> Result<f64> {
        let dim = self.dim();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        match self {
            Self::UniformForce(p) => Ok(-p.f * x[0]),
            Self::GrowingForce(p) => Ok(-p.k * t * x[0]),
            Self::RepulsiveOsc(p) => {
                Ok(-0.5 * consts.m * p.omega * p.omega * (x[0] * x[0] + x[1] * x[1]))
            }
            Self::InverseSquare(p) => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    return Err(Error::SingularPoint { x: x[0], y: x[1] });
                }
                Ok(-p.k / r2)
            }
            Self::CompositeSum(p) => {
                let mut v = 0.0;
                for block in &p.blocks {
                    let d = block.potential.dim();
                    let slice = &x[block.axis_offset..block.axis_offset + d];
                    v += block.potential.eval(consts, slice, t)?;
                }
                Ok(v)
            }
        }
    }
}

impl<'de> Deserialize<'de> for CatalogPotential {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Tagged {
            kind: String,
            params: serde_json::Value,
        }

        let tagged = Tagged::deserialize(de)?;
        let detail =
            |e: serde_json::Error| D::Error::custom(format!("catalog `{}`: {e}", tagged.kind));
        match tagged.kind.as_str() {
            "UniformForce" => Ok(Self::UniformForce(
                serde_json::from_value(tagged.params).map_err(detail)?,
            )),
            "GrowingForce" => Ok(Self::GrowingForce(
                serde_json::from_value(tagged.params).map_err(detail)?,
            )),
            "RepulsiveOsc" => Ok(Self::RepulsiveOsc(
                serde_json::from_value(tagged.params).map_err(detail)?,
            )),
            "InverseSquare" => Ok(Self::InverseSquare(
                serde_json::from_value(tagged.params).map_err(detail)?,
            )),
            "CompositeSum" => Ok(Self::CompositeSum(
                serde_json::from_value(tagged.params).map_err(detail)?,
            )),
            other => Err(D::Error::custom(format!(
                "unknown catalog potential `{other}`; expected one of UniformForce, \
                 GrowingForce, RepulsiveOsc, InverseSquare, CompositeSum"
            ))),
        }
    }
}

/// A potential a job can evaluate: either synthesized from a family (the
/// construction this crate exists for) or taken from the closed-form catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialSpec {
    Synthesized(SynthesizedSpec),
    Catalog(CatalogPotential),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizedSpec {
    pub family: HarmonicFamily,
    #[serde(default)]
    pub gauge: GaugeField,
}

impl PotentialSpec {
    pub fn synthesized(family: HarmonicFamily) -> Self {
        Self::Synthesized(SynthesizedSpec {
            family,
            gauge: GaugeField::Zero,
        })
    }

    pub fn synthesized_with_gauge(family: HarmonicFamily, gauge: GaugeField) -> Self {
        Self::Synthesized(SynthesizedSpec { family, gauge })
    }

    pub fn catalog(potential: CatalogPotential) -> Self {
        Self::Catalog(potential)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Synthesized(s) => s.family.dim(),
            Self::Catalog(c) => c.dim(),
        }
    }

    pub fn eval(&self, consts: &PhysConsts, x: &[f64], t: f64) -> Result<f64> {
        match self {
            Self::Synthesized(s) => synth_potential(&s.family, &s.gauge, consts, x, t),
            Self::Catalog(c) => c.eval(consts, x, t),
        }
    }
}

/// The potential under which the family's action solves the
/// Hamilton-Jacobi equation exactly:
/// `V = -dS/dt - (1/2m) |grad S - (e/c) A|^2`.
pub fn synth_potential(
    family: &HarmonicFamily,
    gauge: &GaugeField,
    consts: &PhysConsts,
    x: &[f64],
    t: f64,
) -> Result<f64> {
    let action = family.eval_action(consts, x, t)?;
    let a = gauge.vector_potential(x)?;
    let mut kinetic = 0.0;
    for (axis, g) in action.grad().iter().enumerate() {
        let v = g - consts.e / consts.c * a[axis];
        kinetic += v * v;
    }
    Ok(-action.ds_dt - kinetic / (2.0 * consts.m))
}

/// `psi = exp(i S / hbar)`: unit modulus everywhere, exact solution of the
/// Schrödinger equation under the synthesized potential.
pub fn exact_wavefunction(
    family: &HarmonicFamily,
    consts: &PhysConsts,
    x: &[f64],
    t: f64,
) -> Result<Complex64> {
    let action = family.eval_action(consts, x, t)?;
    Ok(Complex64::from_polar(1.0, action.s / consts.hbar))
}

//! Uniform tensor-product grids (1-3 axes), sampled fields, and the
//! finite-difference machinery used by every verification check: centered
//! stencils of order 2 and 4, interior masks, and discrete norms.
//!
//! Layout is row-major with the **last axis fastest**: for shape
//! `[n0, n1, n2]` the flat index of `(i0, i1, i2)` is `(i0*n1 + i1)*n2 + i2`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    /// Node count, endpoints included.
    pub n: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridSpec")]
pub struct GridSpec {
    axes: Vec<AxisSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGridSpec {
    axes: Vec<AxisSpec>,
}

impl TryFrom<RawGridSpec> for GridSpec {
    type Error = String;

    fn try_from(raw: RawGridSpec) -> std::result::Result<Self, String> {
        GridSpec::new(raw.axes).map_err(|e| e.to_string())
    }
}

impl GridSpec {
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::InvalidParameter(format!(
                "grid must have 1 to 3 axes, got {}",
                axes.len()
            )));
        }
        for (i, ax) in axes.iter().enumerate() {
            if !(ax.min.is_finite() && ax.max.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "axis {i} has non-finite bounds"
                )));
            }
            if ax.max <= ax.min {
                return Err(Error::InvalidParameter(format!(
                    "axis {i}: max ({}) must exceed min ({})",
                    ax.max, ax.min
                )));
            }
            if ax.n < 2 {
                return Err(Error::InvalidParameter(format!(
                    "axis {i}: need at least 2 nodes, got {}",
                    ax.n
                )));
            }
        }
        Ok(Self { axes })
    }

    /// Convenience 1D constructor.
    pub fn line(min: f64, max: f64, n: usize) -> Result<Self> {
        Self::new(vec![AxisSpec::new(min, max, n)])
    }

    /// Convenience constructor for a square/cube with equal axes.
    pub fn uniform(dim: usize, min: f64, max: f64, n: usize) -> Result<Self> {
        Self::new(vec![AxisSpec::new(min, max, n); dim])
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false // a valid grid always has nodes
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.axes[axis].spacing()
    }

    pub fn min_spacing(&self) -> f64 {
        self.axes
            .iter()
            .map(AxisSpec::spacing)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(AxisSpec::spacing).fold(0.0, f64::max)
    }

    /// Product of the per-axis spacings: the volume element for quadrature.
    pub fn volume_element(&self) -> f64 {
        self.axes.iter().map(AxisSpec::spacing).product()
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let ax = &self.axes[axis];
        ax.min + i as f64 * ax.spacing()
    }

    /// Flat-index stride of one step along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.n).product()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        let mut flat = 0;
        for (axis, &i) in multi.iter().enumerate() {
            flat = flat * self.axes[axis].n + i;
        }
        flat
    }

    pub fn multi_index(&self, flat: usize, out: &mut [usize; 3]) {
        let mut rest = flat;
        for axis in (0..self.dim()).rev() {
            let n = self.axes[axis].n;
            out[axis] = rest % n;
            rest /= n;
        }
    }

    pub fn node_coords(&self, flat: usize, out: &mut [f64; 3]) {
        let mut multi = [0usize; 3];
        self.multi_index(flat, &mut multi);
        for axis in 0..self.dim() {
            out[axis] = self.coord(axis, multi[axis]);
        }
    }

    /// Grid with every axis refined so `n - 1` doubles (shared endpoints).
    pub fn refine(&self) -> Self {
        Self {
            axes: self
                .axes
                .iter()
                .map(|a| AxisSpec::new(a.min, a.max, 2 * (a.n - 1) + 1))
                .collect(),
        }
    }

    /// Short human-readable summary for reports, e.g. `129x129 [-2,2]x[-2,2]`.
    pub fn summary(&self) -> String {
        let ns: Vec<String> = self.axes.iter().map(|a| a.n.to_string()).collect();
        let spans: Vec<String> = self
            .axes
            .iter()
            .map(|a| format!("[{},{}]", a.min, a.max))
            .collect();
        format!("{} {}", ns.join("x"), spans.join("x"))
    }
}

/// Scalar types a field can hold: real samples and complex wavefunctions.
pub trait FieldScalar:
    Copy
    + std::fmt::Debug
    + PartialEq
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl FieldScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl FieldScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Values attached to every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: GridSpec,
    values: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: FieldScalar> Field<T> {
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![T::zero(); n],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn linf(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.magnitude())
            .fold(0.0, f64::max)
    }
}

/// Sample `f(x, t)` on every node.  Any non-finite sample aborts with
/// [`Error::NonFinite`]; singular evaluators abort with their own error.
pub fn sample<T: FieldScalar>(
    grid: &GridSpec,
    t: f64,
    mut f: impl FnMut(&[f64], f64) -> Result<T>,
) -> Result<Field<T>> {
    let mut values = Vec::with_capacity(grid.len());
    let mut coords = [0.0; 3];
    let dim = grid.dim();
    for flat in 0..grid.len() {
        grid.node_coords(flat, &mut coords);
        let v = f(&coords[..dim], t)?;
        if !v.finite() {
            return Err(Error::NonFinite {
                index: flat,
                context: "sampled field".into(),
            });
        }
        values.push(v);
    }
    Ok(Field {
        grid: grid.clone(),
        values,
    })
}

/// Centered-stencil order: truncation error `O(h^2)` or `O(h^4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum StencilOrder {
    Two,
    Four,
}

impl StencilOrder {
    pub fn half_width(self) -> usize {
        match self {
            Self::Two => 1,
            Self::Four => 2,
        }
    }

    pub fn value(self) -> usize {
        match self {
            Self::Two => 2,
            Self::Four => 4,
        }
    }
}

impl TryFrom<u8> for StencilOrder {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(Self::Two),
            4 => Ok(Self::Four),
            other => Err(format!("stencil order must be 2 or 4, got {other}")),
        }
    }
}

impl From<StencilOrder> for u8 {
    fn from(o: StencilOrder) -> u8 {
        o.value() as u8
    }
}

/// Margin of excluded nodes on every side of every axis.  Nodes outside the
/// interior carry value 0 in derivative outputs and are skipped by norms —
/// no one-sided stencils anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteriorMask {
    pub margin: usize,
}

impl InteriorMask {
    pub fn new(margin: usize) -> Self {
        Self { margin }
    }

    pub fn for_order(order: StencilOrder) -> Self {
        Self {
            margin: order.half_width(),
        }
    }

    /// Error when the margin leaves no interior node on some axis.
    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        for ax in grid.axes() {
            if ax.n < 2 * self.margin + 1 {
                return Err(Error::EmptyInterior {
                    margin: self.margin,
                });
            }
        }
        Ok(())
    }

    pub fn is_interior(&self, grid: &GridSpec, multi: &[usize]) -> bool {
        multi
            .iter()
            .zip(grid.axes())
            .all(|(&i, ax)| i >= self.margin && i + self.margin < ax.n)
    }

    pub fn interior_len(&self, grid: &GridSpec) -> usize {
        grid.axes()
            .iter()
            .map(|ax| ax.n.saturating_sub(2 * self.margin))
            .product()
    }
}

fn check_stencil_fits(grid: &GridSpec, order: StencilOrder) -> Result<()> {
    let min = 2 * order.half_width() + 1;
    for (axis, ax) in grid.axes().iter().enumerate() {
        if ax.n < min {
            return Err(Error::GridTooSmall {
                axis,
                n: ax.n,
                order: order.value(),
                min,
            });
        }
    }
    Ok(())
}

/// Apply one centered second-derivative stencil along `axis` at flat index
/// `flat`.  Caller guarantees the node is interior.
#[inline]
fn second_diff<T: FieldScalar>(
    values: &[T],
    flat: usize,
    stride: usize,
    inv_h2: f64,
    order: StencilOrder,
) -> T {
    match order {
        StencilOrder::Two => {
            (values[flat - stride] - values[flat] * 2.0 + values[flat + stride]) * inv_h2
        }
        StencilOrder::Four => {
            (values[flat - stride] * 16.0 + values[flat + stride] * 16.0
                - values[flat - 2 * stride]
                - values[flat + 2 * stride]
                - values[flat] * 30.0)
                * (inv_h2 / 12.0)
        }
    }
}

#[inline]
fn first_diff<T: FieldScalar>(
    values: &[T],
    flat: usize,
    stride: usize,
    inv_h: f64,
    order: StencilOrder,
) -> T {
    match order {
        StencilOrder::Two => (values[flat + stride] - values[flat - stride]) * (0.5 * inv_h),
        StencilOrder::Four => {
            (values[flat - 2 * stride] - values[flat + 2 * stride]
                + (values[flat + stride] - values[flat - stride]) * 8.0)
                * (inv_h / 12.0)
        }
    }
}

fn map_interior<T: FieldScalar>(
    field: &Field<T>,
    order: StencilOrder,
    mut f: impl FnMut(usize) -> T,
) -> Result<Field<T>> {
    check_stencil_fits(field.grid(), order)?;
    let mask = InteriorMask::for_order(order);
    mask.check(field.grid())?;
    let grid = field.grid();
    let mut out = Field::zeros(grid.clone());
    let mut multi = [0usize; 3];
    for flat in 0..grid.len() {
        grid.multi_index(flat, &mut multi);
        if mask.is_interior(grid, &multi[..grid.dim()]) {
            let v = f(flat);
            if !v.finite() {
                return Err(Error::NonFinite {
                    index: flat,
                    context: "stencil output".into(),
                });
            }
            out.values_mut()[flat] = v;
        }
    }
    Ok(out)
}

/// Second derivative along one axis; zero outside the interior.
pub fn fd_second_derivative<T: FieldScalar>(
    field: &Field<T>,
    axis: usize,
    order: StencilOrder,
) -> Result<Field<T>> {
    let stride = field.grid().stride(axis);
    let inv_h2 = 1.0 / (field.grid().spacing(axis) * field.grid().spacing(axis));
    map_interior(field, order, |flat| {
        second_diff(field.values(), flat, stride, inv_h2, order)
    })
}

/// Sum of per-axis second derivatives; zero outside the interior.
pub fn fd_laplacian<T: FieldScalar>(field: &Field<T>, order: StencilOrder) -> Result<Field<T>> {
    let grid = field.grid();
    let per_axis: Vec<(usize, f64)> = (0..grid.dim())
        .map(|a| (grid.stride(a), 1.0 / (grid.spacing(a) * grid.spacing(a))))
        .collect();
    map_interior(field, order, |flat| {
        let mut acc = T::zero();
        for &(stride, inv_h2) in &per_axis {
            acc = acc + second_diff(field.values(), flat, stride, inv_h2, order);
        }
        acc
    })
}

/// Centered first derivative along each axis; zero outside the interior.
pub fn fd_gradient<T: FieldScalar>(field: &Field<T>, order: StencilOrder) -> Result<Vec<Field<T>>> {
    (0..field.grid().dim())
        .map(|axis| {
            let stride = field.grid().stride(axis);
            let inv_h = 1.0 / field.grid().spacing(axis);
            map_interior(field, order, |flat| {
                first_diff(field.values(), flat, stride, inv_h, order)
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// `sqrt( sum |v|^2 * volume_element )` over interior nodes.
    pub l2: f64,
    /// `max |v|` over interior nodes.
    pub linf: f64,
}

pub fn norms<T: FieldScalar>(field: &Field<T>, mask: InteriorMask) -> Result<Norms> {
    mask.check(field.grid())?;
    let grid = field.grid();
    let vol = grid.volume_element();
    let mut sum2 = 0.0;
    let mut linf = 0.0_f64;
    let mut multi = [0usize; 3];
    for flat in 0..grid.len() {
        grid.multi_index(flat, &mut multi);
        if mask.is_interior(grid, &multi[..grid.dim()]) {
            let mag = field.values()[flat].magnitude();
            sum2 += mag * mag;
            linf = linf.max(mag);
        }
    }
    Ok(Norms {
        l2: (sum2 * vol).sqrt(),
        linf,
    })
}

const AXIS_LABELS: [&str; 3] = ["x", "y", "z"];

fn write_csv_header<W: Write>(w: &mut W, dim: usize, value_cols: &str) -> std::io::Result<()> {
    let coords = AXIS_LABELS[..dim].join(",");
    writeln!(w, "{coords},t,{value_cols}")
}

fn write_coords<W: Write>(w: &mut W, coords: &[f64]) -> std::io::Result<()> {
    for c in coords {
        write!(w, "{c},")?;
    }
    Ok(())
}

/// CSV dump of real fields: `x[,y[,z]],t,<label>`, one block per time,
/// nodes in flat order (last axis fastest).
pub fn write_scalar_csv<W: Write>(
    w: &mut W,
    series: &[(f64, &ScalarField)],
    label: &str,
) -> Result<()> {
    let Some((_, first)) = series.first() else {
        return Err(Error::InvalidParameter("empty dump series".into()));
    };
    let grid = first.grid();
    write_csv_header(w, grid.dim(), label)?;
    let mut coords = [0.0; 3];
    for (t, field) in series {
        if field.grid() != grid {
            return Err(Error::InconsistentGrids("dump series mixes grids".into()));
        }
        for flat in 0..grid.len() {
            grid.node_coords(flat, &mut coords);
            write_coords(w, &coords[..grid.dim()])?;
            writeln!(w, "{t},{}", field.values()[flat])?;
        }
    }
    Ok(())
}

/// CSV dump of complex fields: `x[,y[,z]],t,re,im`.
pub fn write_complex_csv<W: Write>(w: &mut W, series: &[(f64, &ComplexField)]) -> Result<()> {
    let Some((_, first)) = series.first() else {
        return Err(Error::InvalidParameter("empty dump series".into()));
    };
    let grid = first.grid();
    write_csv_header(w, grid.dim(), "re,im")?;
    let mut coords = [0.0; 3];
    for (t, field) in series {
        if field.grid() != grid {
            return Err(Error::InconsistentGrids("dump series mixes grids".into()));
        }
        for flat in 0..grid.len() {
            grid.node_coords(flat, &mut coords);
            write_coords(w, &coords[..grid.dim()])?;
            let v = field.values()[flat];
            writeln!(w, "{t},{},{}", v.re, v.im)?;
        }
    }
    Ok(())
}

//! Geometry, frames, wavenumber and sampling grids, and source descriptors.
//!
//! Everything here is an immutable value once constructed; the constructors
//! enforce the invariants so downstream code can rely on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or displacement in R^3 (length units).
pub type Point3 = [f64; 3];

/// Small helpers for `[f64; 3]` arithmetic.
pub mod vec3 {
    use super::Point3;

    #[inline]
    pub fn dot(a: &Point3, b: &Point3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[inline]
    pub fn cross(a: &Point3, b: &Point3) -> Point3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[inline]
    pub fn norm(a: &Point3) -> f64 {
        dot(a, a).sqrt()
    }

    #[inline]
    pub fn add(a: &Point3, b: &Point3) -> Point3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    #[inline]
    pub fn sub(a: &Point3, b: &Point3) -> Point3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    #[inline]
    pub fn scale(a: &Point3, s: f64) -> Point3 {
        [a[0] * s, a[1] * s, a[2] * s]
    }
}

const UNIT_TOL: f64 = 1e-12;

/// A direction on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVector3([f64; 3]);

impl UnitVector3 {
    pub const E1: UnitVector3 = UnitVector3([1.0, 0.0, 0.0]);
    pub const E2: UnitVector3 = UnitVector3([0.0, 1.0, 0.0]);
    pub const E3: UnitVector3 = UnitVector3([0.0, 0.0, 1.0]);

    /// Accepts `v` only if it already has unit length (within 1e-12).
    pub fn new(v: [f64; 3]) -> Result<Self> {
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite direction {v:?}")));
        }
        let n = vec3::norm(&v);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "direction {v:?} has norm {n}, expected 1"
            )));
        }
        Ok(Self(v))
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalize(v: [f64; 3]) -> Result<Self> {
        let n = vec3::norm(&v);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidArgument(format!("cannot normalize {v:?}")));
        }
        Ok(Self(vec3::scale(&v, 1.0 / n)))
    }

    pub fn as_array(&self) -> &[f64; 3] {
        &self.0
    }

    pub fn dot(&self, p: &Point3) -> f64 {
        vec3::dot(&self.0, p)
    }

    pub fn cross(&self, other: &UnitVector3) -> Point3 {
        vec3::cross(&self.0, &other.0)
    }
}

impl TryFrom<[f64; 3]> for UnitVector3 {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        UnitVector3::new(v)
    }
}

impl From<UnitVector3> for [f64; 3] {
    fn from(u: UnitVector3) -> Self {
        u.0
    }
}

impl std::ops::Index<usize> for UnitVector3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A complex 3-vector (field values, far field patterns).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ComplexVec3(pub [Complex64; 3]);

impl ComplexVec3 {
    pub const ZERO: ComplexVec3 = ComplexVec3([Complex64::new(0.0, 0.0); 3]);

    /// Bilinear (non-conjugated) product with a real vector.
    pub fn dot_real(&self, e: &Point3) -> Complex64 {
        self.0[0] * e[0] + self.0[1] * e[1] + self.0[2] * e[2]
    }

    /// Hermitian norm `sqrt(a . conj(a))`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, s: Complex64) -> ComplexVec3 {
        ComplexVec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Componentwise moduli.
    pub fn abs(&self) -> [f64; 3] {
        [self.0[0].norm(), self.0[1].norm(), self.0[2].norm()]
    }
}

impl std::ops::Add for ComplexVec3 {
    type Output = ComplexVec3;
    fn add(self, rhs: ComplexVec3) -> ComplexVec3 {
        ComplexVec3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl std::ops::Sub for ComplexVec3 {
    type Output = ComplexVec3;
    fn sub(self, rhs: ComplexVec3) -> ComplexVec3 {
        ComplexVec3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

/// Tangential projection used for scalar data: `l` or `m` of a [`TangentFrame`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    L,
    M,
}

impl Projection {
    pub fn as_str(&self) -> &'static str {
        match self {
            Projection::L => "l",
            Projection::M => "m",
        }
    }
}

impl std::str::FromStr for Projection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l" => Ok(Projection::L),
            "m" => Ok(Projection::M),
            other => Err(Error::Format(format!("unknown projection '{other}'"))),
        }
    }
}

/// Orthonormal triple `(xhat, l, m)` attached to an observation direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentFrame {
    pub xhat: UnitVector3,
    pub l: UnitVector3,
    pub m: UnitVector3,
}

/// Threshold below which `|xhat x q|` is treated as zero.
pub const FRAME_DEGENERACY_TOL: f64 = 1e-9;

/// Builds `l = xhat x q / |xhat x q|` and `m = xhat x l`.
pub fn build_tangent_frame(xhat: UnitVector3, q: UnitVector3) -> Result<TangentFrame> {
    let c = xhat.cross(&q);
    let n = vec3::norm(&c);
    if n <= FRAME_DEGENERACY_TOL {
        return Err(Error::DegenerateFrame(n));
    }
    let l = UnitVector3(vec3::scale(&c, 1.0 / n));
    let m = UnitVector3(xhat.cross(&l));
    Ok(TangentFrame { xhat, l, m })
}

/// `e3` unless the direction is within ~5.7 degrees of the pole, then `e1`.
pub fn default_q(xhat: UnitVector3) -> UnitVector3 {
    if vec3::norm(&xhat.cross(&UnitVector3::E3)) >= 0.1 {
        UnitVector3::E3
    } else {
        UnitVector3::E1
    }
}

impl TangentFrame {
    /// Frame built with [`default_q`]; never degenerate.
    pub fn for_direction(xhat: UnitVector3) -> TangentFrame {
        build_tangent_frame(xhat, default_q(xhat))
            .expect("default_q keeps |xhat x q| >= 0.1")
    }

    /// Rebuilds a frame from `xhat` and a known `l` (`m = xhat x l`).
    pub fn from_l(xhat: UnitVector3, l: UnitVector3) -> Result<TangentFrame> {
        if xhat.dot(l.as_array()).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "l = {:?} is not orthogonal to xhat = {:?}",
                l.as_array(),
                xhat.as_array()
            )));
        }
        let m = UnitVector3::normalize(xhat.cross(&l))?;
        Ok(TangentFrame { xhat, l, m })
    }

    pub fn projection(&self, e: Projection) -> UnitVector3 {
        match e {
            Projection::L => self.l,
            Projection::M => self.m,
        }
    }
}

/// Sampling plane for indicator evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xy,
    Yz,
}

impl Plane {
    pub fn as_str(&self) -> &'static str {
        match self {
            Plane::Xy => "xy",
            Plane::Yz => "yz",
        }
    }
}

/// Observation directions `theta_j = (j-1) pi / n` in the given plane.
pub fn direction_fan(plane: Plane, n: usize) -> Vec<UnitVector3> {
    (0..n)
        .map(|j| {
            let theta = j as f64 * std::f64::consts::PI / n as f64;
            let (s, c) = theta.sin_cos();
            let v = match plane {
                Plane::Xy => [c, s, 0.0],
                Plane::Yz => [0.0, c, s],
            };
            UnitVector3(v)
        })
        .collect()
}

/// Uniform wavenumber grid on the closed interval `[k_min, k_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WaveGridParams", into = "WaveGridParams")]
pub struct WaveGrid {
    k_min: f64,
    k_max: f64,
    values: Vec<f64>,
}

/// Serialized form of a [`WaveGrid`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveGridParams {
    pub kmin: f64,
    pub kmax: f64,
    #[serde(rename = "M")]
    pub count: usize,
}

impl WaveGrid {
    pub fn new(k_min: f64, k_max: f64, count: usize) -> Result<Self> {
        if !(k_min.is_finite() && k_max.is_finite() && 0.0 < k_min && k_min < k_max) {
            return Err(Error::InvalidArgument(format!(
                "wave grid needs 0 < k_min < k_max, got [{k_min}, {k_max}]"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidArgument(format!(
                "wave grid needs at least 2 wavenumbers, got {count}"
            )));
        }
        let dk = (k_max - k_min) / (count - 1) as f64;
        let mut values: Vec<f64> = (0..count).map(|j| k_min + j as f64 * dk).collect();
        values[count - 1] = k_max;
        Ok(Self { k_min, k_max, values })
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn params(&self) -> WaveGridParams {
        WaveGridParams { kmin: self.k_min, kmax: self.k_max, count: self.values.len() }
    }

    /// Composite trapezoid weights on the grid nodes.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.values.len();
        let mut w = vec![0.0; n];
        for j in 0..n - 1 {
            let h = self.values[j + 1] - self.values[j];
            w[j] += 0.5 * h;
            w[j + 1] += 0.5 * h;
        }
        w
    }
}

impl Default for WaveGrid {
    /// `M = 30` wavenumbers from 9.5 to 24 (step 0.5).
    fn default() -> Self {
        WaveGrid::new(9.5, 24.0, 30).expect("valid default grid")
    }
}

impl TryFrom<WaveGridParams> for WaveGrid {
    type Error = Error;
    fn try_from(p: WaveGridParams) -> Result<Self> {
        WaveGrid::new(p.kmin, p.kmax, p.count)
    }
}

impl From<WaveGrid> for WaveGridParams {
    fn from(g: WaveGrid) -> Self {
        g.params()
    }
}

/// Cuboid or ball carrying one piece of a source density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PrimitiveSupport {
    Cuboid { lower: Point3, upper: Point3 },
    Ball { center: Point3, radius: f64 },
}

impl PrimitiveSupport {
    pub fn cuboid(lower: Point3, upper: Point3) -> Result<Self> {
        let s = PrimitiveSupport::Cuboid { lower, upper };
        s.validate()?;
        Ok(s)
    }

    pub fn ball(center: Point3, radius: f64) -> Result<Self> {
        let s = PrimitiveSupport::Ball { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PrimitiveSupport::Cuboid { lower, upper } => {
                let ok = (0..3).all(|i| lower[i].is_finite() && upper[i].is_finite() && lower[i] < upper[i]);
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "cuboid needs lower < upper componentwise, got {lower:?} / {upper:?}"
                    )));
                }
            }
            PrimitiveSupport::Ball { center, radius } => {
                if !(center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "ball needs a finite center and radius > 0, got {center:?} / {radius}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Support moved by `d`.
    pub fn translated(&self, d: &Point3) -> PrimitiveSupport {
        match *self {
            PrimitiveSupport::Cuboid { lower, upper } => PrimitiveSupport::Cuboid {
                lower: vec3::add(&lower, d),
                upper: vec3::add(&upper, d),
            },
            PrimitiveSupport::Ball { center, radius } => {
                PrimitiveSupport::Ball { center: vec3::add(&center, d), radius }
            }
        }
    }

    /// True when `x` lies in the closed support.
    pub fn contains_closed(&self, x: &Point3) -> bool {
        match self {
            PrimitiveSupport::Cuboid { lower, upper } => {
                (0..3).all(|i| lower[i] <= x[i] && x[i] <= upper[i])
            }
            PrimitiveSupport::Ball { center, radius } => {
                vec3::norm(&vec3::sub(x, center)) <= *radius
            }
        }
    }

    pub fn bounding_box(&self) -> (Point3, Point3) {
        match *self {
            PrimitiveSupport::Cuboid { lower, upper } => (lower, upper),
            PrimitiveSupport::Ball { center, radius } => (
                [center[0] - radius, center[1] - radius, center[2] - radius],
                [center[0] + radius, center[1] + radius, center[2] + radius],
            ),
        }
    }

    /// Minimum and maximum of `xhat . y` over the support.
    pub fn extent_along(&self, xhat: &UnitVector3) -> (f64, f64) {
        match *self {
            PrimitiveSupport::Cuboid { lower, upper } => {
                let (mut lo, mut hi) = (0.0, 0.0);
                for i in 0..3 {
                    let a = xhat[i] * lower[i];
                    let b = xhat[i] * upper[i];
                    lo += a.min(b);
                    hi += a.max(b);
                }
                (lo, hi)
            }
            PrimitiveSupport::Ball { center, radius } => {
                let c = xhat.dot(&center);
                (c - radius, c + radius)
            }
        }
    }

    /// Whether two supports share a set of positive volume.
    pub fn overlaps(&self, other: &PrimitiveSupport) -> bool {
        use PrimitiveSupport::*;
        match (*self, *other) {
            (Cuboid { lower: a0, upper: a1 }, Cuboid { lower: b0, upper: b1 }) => {
                (0..3).all(|i| a0[i] < b1[i] && b0[i] < a1[i])
            }
            (Ball { center: c1, radius: r1 }, Ball { center: c2, radius: r2 }) => {
                vec3::norm(&vec3::sub(&c1, &c2)) < r1 + r2
            }
            (Cuboid { lower, upper }, Ball { center, radius })
            | (Ball { center, radius }, Cuboid { lower, upper }) => {
                let nearest: Point3 =
                    std::array::from_fn(|i| center[i].clamp(lower[i], upper[i]));
                vec3::norm(&vec3::sub(&nearest, &center)) < radius
            }
        }
    }
}

/// Linear part `coeff * y[axis]` of an affine density component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearTerm {
    pub axis: usize,
    pub coeff: Complex64,
}

/// One Cartesian component of a piecewise density: `constant + coeff * y[axis]`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Density {
    pub constant: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearTerm>,
}

impl Density {
    pub const ZERO: Density = Density { constant: Complex64::new(0.0, 0.0), linear: None };

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Density { constant: c.into(), linear: None }
    }

    /// `coeff * y[axis]`.
    pub fn linear(axis: usize, coeff: impl Into<Complex64>) -> Self {
        Density {
            constant: Complex64::new(0.0, 0.0),
            linear: Some(LinearTerm { axis, coeff: coeff.into() }),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.linear.is_none_or(|t| t.coeff == Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.constant == Complex64::new(0.0, 0.0)
    }

    pub fn eval(&self, y: &Point3) -> Complex64 {
        let lin = self.linear.map_or(Complex64::new(0.0, 0.0), |t| t.coeff * y[t.axis]);
        self.constant + lin
    }

    /// Density of `y -> J(y + h)`.
    pub fn shifted(&self, h: &Point3) -> Density {
        match self.linear {
            None => *self,
            Some(t) => Density { constant: self.constant + t.coeff * h[t.axis], linear: Some(t) },
        }
    }

    pub fn scaled(&self, c: Complex64) -> Density {
        Density {
            constant: self.constant * c,
            linear: self.linear.map(|t| LinearTerm { axis: t.axis, coeff: t.coeff * c }),
        }
    }
}

/// A support with its three density components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourcePiece {
    pub support: PrimitiveSupport,
    pub density: [Density; 3],
}

impl SourcePiece {
    /// Piece with the same constant vector density everywhere on the support.
    pub fn uniform(support: PrimitiveSupport, j: [f64; 3]) -> Self {
        SourcePiece { support, density: j.map(Density::constant) }
    }

    pub fn eval(&self, y: &Point3) -> [Complex64; 3] {
        [self.density[0].eval(y), self.density[1].eval(y), self.density[2].eval(y)]
    }
}

/// A current density: a union of non-overlapping primitive pieces.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SourcePiece>", into = "Vec<SourcePiece>")]
pub struct SourceSpec {
    pieces: Vec<SourcePiece>,
}

impl SourceSpec {
    pub fn new(pieces: Vec<SourcePiece>) -> Result<Self> {
        for (i, p) in pieces.iter().enumerate() {
            p.support.validate()?;
            for (c, d) in p.density.iter().enumerate() {
                if let Some(t) = d.linear {
                    if t.axis > 2 {
                        return Err(Error::InvalidArgument(format!(
                            "piece {i} component {c}: axis {} out of range", t.axis
                        )));
                    }
                }
                let finite = [d.constant, d.linear.map_or(Complex64::new(0.0, 0.0), |t| t.coeff)]
                    .iter()
                    .all(|z| z.re.is_finite() && z.im.is_finite());
                if !finite {
                    return Err(Error::InvalidArgument(format!("piece {i}: non-finite density")));
                }
            }
            if matches!(p.support, PrimitiveSupport::Ball { .. })
                && !p.density.iter().all(Density::is_constant)
            {
                return Err(Error::UnsupportedDensity(format!(
                    "piece {i}: ball supports carry constant densities only"
                )));
            }
            for (j, q) in pieces.iter().enumerate().take(i) {
                if p.support.overlaps(&q.support) {
                    return Err(Error::InvalidArgument(format!("pieces {j} and {i} overlap")));
                }
            }
        }
        Ok(Self { pieces })
    }

    pub fn empty() -> Self {
        Self { pieces: Vec::new() }
    }

    pub fn pieces(&self) -> &[SourcePiece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// The shifted source `J_h(y) = J(y + h)`: supports move by `-h`.
    pub fn shifted(&self, h: &Point3) -> SourceSpec {
        let minus_h = vec3::scale(h, -1.0);
        let pieces = self
            .pieces
            .iter()
            .map(|p| SourcePiece {
                support: p.support.translated(&minus_h),
                density: p.density.map(|d| d.shifted(h)),
            })
            .collect();
        SourceSpec { pieces }
    }

    /// The source `c J`.
    pub fn scaled(&self, c: Complex64) -> SourceSpec {
        let pieces = self
            .pieces
            .iter()
            .map(|p| SourcePiece { support: p.support, density: p.density.map(|d| d.scaled(c)) })
            .collect();
        SourceSpec { pieces }
    }

    /// Evaluates `J(y)`; zero outside every support.
    pub fn eval(&self, y: &Point3) -> [Complex64; 3] {
        self.pieces
            .iter()
            .find(|p| p.support.contains_closed(y))
            .map_or([Complex64::new(0.0, 0.0); 3], |p| p.eval(y))
    }

    /// Extent of the support along `xhat` (the strip bounds), if nonempty.
    pub fn strip_along(&self, xhat: &UnitVector3) -> Option<(f64, f64)> {
        self.pieces.iter().map(|p| p.support.extent_along(xhat)).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }
}

impl TryFrom<Vec<SourcePiece>> for SourceSpec {
    type Error = Error;
    fn try_from(pieces: Vec<SourcePiece>) -> Result<Self> {
        SourceSpec::new(pieces)
    }
}

impl From<SourceSpec> for Vec<SourcePiece> {
    fn from(s: SourceSpec) -> Self {
        s.pieces
    }
}

/// Planar sampling lattice `u_i = u_min + i h`, `v_j = v_min + j h`.
///
/// For the xy plane a lattice point is `(u, v, offset)`; for yz it is
/// `(offset, u, v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlaneGrid {
    pub plane: Plane,
    pub offset: f64,
    pub u_range: [f64; 2],
    pub v_range: [f64; 2],
    pub spacing: f64,
}

impl SamplingPlaneGrid {
    pub fn new(plane: Plane, offset: f64, u_range: [f64; 2], v_range: [f64; 2], spacing: f64) -> Result<Self> {
        let g = SamplingPlaneGrid { plane, offset, u_range, v_range, spacing };
        g.validate()?;
        Ok(g)
    }

    /// `[-2, 6]^2` at spacing 0.05 through the origin.
    pub fn standard(plane: Plane) -> Self {
        SamplingPlaneGrid { plane, offset: 0.0, u_range: [-2.0, 6.0], v_range: [-2.0, 6.0], spacing: 0.05 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.offset, self.u_range[0], self.u_range[1], self.v_range[0], self.v_range[1], self.spacing]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.spacing <= 0.0 {
            return Err(Error::InvalidArgument("sampling grid needs finite values and spacing > 0".into()));
        }
        if self.u_range[0] > self.u_range[1] || self.v_range[0] > self.v_range[1] {
            return Err(Error::InvalidArgument("sampling grid extent is empty".into()));
        }
        Ok(())
    }

    fn axis_count(range: [f64; 2], h: f64) -> usize {
        let steps = (range[1] - range[0]) / h;
        // tolerate representation error in e.g. 8 / 0.05
        (steps + 1e-9).floor() as usize + 1
    }

    pub fn nu(&self) -> usize {
        Self::axis_count(self.u_range, self.spacing)
    }

    pub fn nv(&self) -> usize {
        Self::axis_count(self.v_range, self.spacing)
    }

    pub fn len(&self) -> usize {
        self.nu() * self.nv()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u_range[0] + i as f64 * self.spacing
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v_range[0] + j as f64 * self.spacing
    }

    /// Embeds in-plane coordinates into R^3.
    pub fn embed(&self, u: f64, v: f64) -> Point3 {
        match self.plane {
            Plane::Xy => [u, v, self.offset],
            Plane::Yz => [self.offset, u, v],
        }
    }

    /// Lattice point for the row-major index `j * nu + i`.
    pub fn point(&self, index: usize) -> Point3 {
        let nu = self.nu();
        self.embed(self.u(index % nu), self.v(index / nu))
    }

    pub fn points(&self) -> Vec<Point3> {
        (0..self.len()).map(|n| self.point(n)).collect()
    }

    /// In-plane coordinates of a 3-D point.
    pub fn project(&self, x: &Point3) -> (f64, f64) {
        match self.plane {
            Plane::Xy => (x[0], x[1]),
            Plane::Yz => (x[1], x[2]),
        }
    }

    /// Same plane, extent, and spacing.
    pub fn same_lattice(&self, other: &SamplingPlaneGrid) -> bool {
        self == other
    }
}

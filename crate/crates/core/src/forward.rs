//! Forward model: far field patterns of current sources and magnetic
//! dipoles, the near field via the dyadic Green's function, and the energy
//! flux through the sphere at infinity.
//!
//! The far field of a source `J` is
//!
//! ```text
//! E_inf(xhat, k; J) = i omega mu (I - xhat xhat^T) int e^{-i k xhat.y} J(y) dy
//! ```
//!
//! and the Fourier integral is evaluated in closed form on every cuboid
//! or ball piece.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{vec3, ComplexVec3, Density, Point3, PrimitiveSupport, SourceSpec, UnitVector3};
use crate::quadrature::{sphere_nodes, support_nodes, LegendreRule};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Homogeneous, non-conducting background medium.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub eps: f64,
    pub mu: f64,
}

impl Default for MediumParams {
    fn default() -> Self {
        MediumParams { eps: 1.0, mu: 1.0 }
    }
}

impl MediumParams {
    pub fn new(eps: f64, mu: f64) -> Result<Self> {
        if !(eps > 0.0 && mu > 0.0 && eps.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("medium needs eps, mu > 0, got {eps}, {mu}")));
        }
        Ok(MediumParams { eps, mu })
    }

    /// Angular frequency for wavenumber `k`.
    pub fn omega(&self, k: f64) -> f64 {
        k / (self.eps * self.mu).sqrt()
    }

    /// The factor `i omega mu`.
    pub fn source_factor(&self, k: f64) -> Complex64 {
        I * (self.omega(k) * self.mu)
    }
}

/// Magnetic dipole at `z0` with strength `tau` and polarization `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipoleConfig {
    pub z0: Point3,
    pub tau: Complex64,
    pub p: UnitVector3,
}

// sin(x)/x
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

// (sin x - x cos x) / x^3, smooth with value 1/3 at the origin.
fn ball_kernel(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // sum_{n>=1} (-1)^{n+1} 2n / (2n+1)! x^{2n-2}
        let x2 = x * x;
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for n in 2..=10u32 {
            let n = f64::from(n);
            term *= -x2 * n / ((n - 1.0) * (2.0 * n) * (2.0 * n + 1.0));
            sum += term;
        }
        sum
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// `int_a^b e^{-i kappa y} dy`.
fn interval_transform(kappa: f64, a: f64, b: f64) -> Complex64 {
    let len = b - a;
    let mid = 0.5 * (a + b);
    Complex64::from_polar(len * sinc(0.5 * kappa * len), -kappa * mid)
}

/// `int_a^b y e^{-i kappa y} dy`.
fn interval_moment_transform(kappa: f64, a: f64, b: f64) -> Complex64 {
    let h = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let x = kappa * h;
    // int_{-h}^{h} t e^{-i kappa t} dt = -2i int_0^h t sin(kappa t) dt
    let odd = -2.0 * I * (kappa * h * h * h * ball_kernel(x));
    let even = Complex64::new(mid * 2.0 * h * sinc(x), 0.0);
    Complex64::from_polar(1.0, -kappa * mid) * (even + odd)
}

/// Closed form of `int_support w(y) e^{-i kvec.y} dy` for one density component.
pub fn shape_fourier(support: &PrimitiveSupport, density: &Density, kvec: &Point3) -> Result<Complex64> {
    match *support {
        PrimitiveSupport::Cuboid { lower, upper } => {
            let f0: [Complex64; 3] = std::array::from_fn(|i| interval_transform(kvec[i], lower[i], upper[i]));
            let mut total = density.constant * f0[0] * f0[1] * f0[2];
            if let Some(t) = density.linear {
                let mut prod = t.coeff;
                for i in 0..3 {
                    prod *= if i == t.axis {
                        interval_moment_transform(kvec[i], lower[i], upper[i])
                    } else {
                        f0[i]
                    };
                }
                total += prod;
            }
            Ok(total)
        }
        PrimitiveSupport::Ball { center, radius } => {
            if !density.is_constant() {
                return Err(Error::UnsupportedDensity("affine density on a ball".into()));
            }
            let kappa = vec3::norm(kvec);
            let vol_factor = 4.0 * PI * radius.powi(3) * ball_kernel(kappa * radius);
            Ok(density.constant * Complex64::from_polar(vol_factor, -vec3::dot(kvec, &center)))
        }
    }
}

/// Fourier integral `int e^{-i kvec.y} J(y) dy` of the whole source.
pub fn source_transform(source: &SourceSpec, kvec: &Point3) -> Result<[Complex64; 3]> {
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for piece in source.pieces() {
        for (c, d) in piece.density.iter().enumerate() {
            if !d.is_zero() {
                acc[c] += shape_fourier(&piece.support, d, kvec)?;
            }
        }
    }
    Ok(acc)
}

// (I - xhat xhat^T) v
fn tangential(xhat: &UnitVector3, v: [Complex64; 3]) -> [Complex64; 3] {
    let x = xhat.as_array();
    let radial = v[0] * x[0] + v[1] * x[1] + v[2] * x[2];
    [v[0] - radial * x[0], v[1] - radial * x[1], v[2] - radial * x[2]]
}

/// Electric far field pattern of the source at direction `xhat`, wavenumber `k`.
pub fn far_field(source: &SourceSpec, medium: &MediumParams, xhat: &UnitVector3, k: f64) -> Result<ComplexVec3> {
    check_wavenumber(k)?;
    let kvec = vec3::scale(xhat.as_array(), k);
    let v = tangential(xhat, source_transform(source, &kvec)?);
    Ok(ComplexVec3(v).scale(medium.source_factor(k)))
}

/// `i k tau e^{-i k xhat.z0} (xhat x p)`.
pub fn dipole_far_field(d: &DipoleConfig, xhat: &UnitVector3, k: f64) -> ComplexVec3 {
    let c = xhat.cross(&d.p);
    let amp = I * k * d.tau * Complex64::from_polar(1.0, -k * xhat.dot(&d.z0));
    ComplexVec3([amp * c[0], amp * c[1], amp * c[2]])
}

/// Far field of the source plus the reference dipole.
pub fn total_far_field(
    source: &SourceSpec,
    medium: &MediumParams,
    d: &DipoleConfig,
    xhat: &UnitVector3,
    k: f64,
) -> Result<ComplexVec3> {
    Ok(far_field(source, medium, xhat, k)? + dipole_far_field(d, xhat, k))
}

fn check_wavenumber(k: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {k}")));
    }
    Ok(())
}

/// Quadrature settings for volume integrals over source pieces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeRule {
    /// Gauss-Legendre points per panel and axis.
    pub order: usize,
    /// Longest panel edge before an axis is subdivided.
    pub max_panel: f64,
}

impl Default for VolumeRule {
    fn default() -> Self {
        VolumeRule { order: 32, max_panel: f64::INFINITY }
    }
}

/// `G_k(x, y) J` for the dyadic Green's function
/// `Phi_k I + k^{-2} grad_y grad_y Phi_k`.
fn dyadic_green_apply(x: &Point3, y: &Point3, k: f64, j: &[Complex64; 3]) -> [Complex64; 3] {
    let r_vec = vec3::sub(x, y);
    let r = vec3::norm(&r_vec);
    let rhat = vec3::scale(&r_vec, 1.0 / r);
    let kr = k * r;
    let kr2 = kr * kr;
    let phi = Complex64::from_polar(1.0 / (4.0 * PI * r), kr);
    let a = 1.0 + (I * kr - 1.0) / kr2;
    let b = (3.0 - 3.0 * I * kr - kr2) / kr2;
    let rj = j[0] * rhat[0] + j[1] * rhat[1] + j[2] * rhat[2];
    std::array::from_fn(|c| phi * (a * j[c] + b * rhat[c] * rj))
}

/// Radiated field `E(x) = i omega mu int G_k(x, y) J(y) dy` at a point outside
/// every support, by tensor-product quadrature.
pub fn near_field(
    source: &SourceSpec,
    medium: &MediumParams,
    x: &Point3,
    k: f64,
    rule: VolumeRule,
) -> Result<ComplexVec3> {
    check_wavenumber(k)?;
    if source.pieces().iter().any(|p| p.support.contains_closed(x)) {
        return Err(Error::PointInsideSupport(*x));
    }
    let gl = LegendreRule::new(rule.order);
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for piece in source.pieces() {
        for (y, w) in support_nodes(&piece.support, &gl, rule.max_panel) {
            let j = piece.eval(&y);
            let g = dyadic_green_apply(x, &y, k, &j);
            for c in 0..3 {
                acc[c] += g[c] * w;
            }
        }
    }
    Ok(ComplexVec3(acc).scale(medium.source_factor(k)))
}

/// Far field computed by brute-force quadrature of the Fourier integral.
/// Independent of the closed forms in [`shape_fourier`].
pub fn far_field_by_quadrature(
    source: &SourceSpec,
    medium: &MediumParams,
    xhat: &UnitVector3,
    k: f64,
    rule: VolumeRule,
) -> Result<ComplexVec3> {
    check_wavenumber(k)?;
    let gl = LegendreRule::new(rule.order);
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for piece in source.pieces() {
        for (y, w) in support_nodes(&piece.support, &gl, rule.max_panel) {
            let phase = Complex64::from_polar(w, -k * xhat.dot(&y));
            let j = piece.eval(&y);
            for c in 0..3 {
                acc[c] += phase * j[c];
            }
        }
    }
    Ok(ComplexVec3(tangential(xhat, acc)).scale(medium.source_factor(k)))
}

/// Default number of polar nodes for [`energy_flux`] (64 x 128 rule).
pub const DEFAULT_FLUX_ORDER: usize = 64;

/// Energy flux `F = (1 / 16 pi^2) sqrt(eps / mu) int_{S^2} |E_inf|^2 ds`.
///
/// Uses `order` Gauss-Legendre nodes in `cos(theta)` and `2 * order`
/// azimuths. Panics if `order < 8`.
pub fn energy_flux<F>(far_field_on_sphere: F, medium: &MediumParams, order: usize) -> f64
where
    F: Fn(&UnitVector3) -> ComplexVec3,
{
    assert!(order >= 8, "sphere quadrature order must be at least 8");
    let integral: f64 = sphere_nodes(order)
        .into_iter()
        .map(|(x, w)| {
            // nodes are unit length up to rounding
            let xhat = UnitVector3::normalize(x).expect("sphere node");
            w * far_field_on_sphere(&xhat).norm_sqr()
        })
        .sum();
    (medium.eps / medium.mu).sqrt() * integral / (16.0 * PI * PI)
}

//! Phase retrieval from three moduli.
//!
//! With reference points `z_j = -i k tau_j e^{-i k z0.xhat}` the phaseless
//! data are the distances `r_j = |z - z_j|` of the unknown phased datum
//! `z = m . E_inf(xhat, k; J)` to three known, non-collinear points. The
//! point is recovered by rotating the point `M` on the ray `z2 -> z1` about
//! `z2` by the law-of-cosines angle and keeping the candidate whose distance
//! to `z3` matches `r3` best.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measurement::{DataKind, Dataset, PhasedSeries};
use crate::model::{Point3, Projection, UnitVector3};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Moduli at or below this value are treated as exact zeros.
pub const ZERO_MODULUS: f64 = 1e-14;

const COLLINEAR_TOL: f64 = 1e-12;

/// Parameters the reference points were built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripleProvenance {
    pub k: f64,
    pub z0: Point3,
    pub xhat: UnitVector3,
    pub taus: [Complex64; 3],
}

/// Three distinct, non-collinear reference points in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceTriple {
    points: [Complex64; 3],
    pub provenance: Option<TripleProvenance>,
}

// |Im((b - a) conj(c - a))| relative to |b - a||c - a|
fn independent(a: Complex64, b: Complex64, c: Complex64) -> bool {
    let u = b - a;
    let v = c - a;
    (u * v.conj()).im.abs() > COLLINEAR_TOL * u.norm() * v.norm()
}

impl ReferenceTriple {
    pub fn new(points: [Complex64; 3]) -> Result<Self> {
        let [z1, z2, z3] = points;
        if z1 == z2 || z1 == z3 || z2 == z3 || !independent(z1, z2, z3) {
            return Err(Error::CollinearReferences(format!("{z1}, {z2}, {z3}")));
        }
        Ok(ReferenceTriple { points, provenance: None })
    }

    pub fn points(&self) -> &[Complex64; 3] {
        &self.points
    }
}

/// `z_j = -i k tau_j e^{-i k z0.xhat}` for three dipole strengths.
pub fn reference_points(k: f64, z0: &Point3, xhat: &UnitVector3, taus: [Complex64; 3]) -> Result<ReferenceTriple> {
    let [t1, t2, t3] = taus;
    if t1 == t2 || t1 == t3 || t2 == t3 || !independent(t1, t2, t3) {
        return Err(Error::CollinearReferences(format!(
            "tau2 - tau1 and tau3 - tau1 must be linearly independent over R (taus {t1}, {t2}, {t3})"
        )));
    }
    let factor = -I * k * Complex64::from_polar(1.0, -k * xhat.dot(z0));
    let mut triple = ReferenceTriple::new(taus.map(|t| factor * t))?;
    triple.provenance = Some(TripleProvenance { k, z0: *z0, xhat: *xhat, taus });
    Ok(triple)
}

/// Point at distance `r2` from `z2` on the ray from `z2` through `z1`.
pub fn point_m(z1: Complex64, z2: Complex64, r2: f64) -> Result<Complex64> {
    let d12 = (z1 - z2).norm();
    if d12 < ZERO_MODULUS {
        return Err(Error::DegenerateReferences(d12));
    }
    Ok(z1 * (r2 / d12) + z2 * ((d12 - r2) / d12))
}

/// Angle at `z2` between the rays to `z1` and to the unknown point, from the
/// law of cosines. The cosine is clamped to [-1, 1].
///
/// For a feasible triangle the angle is taken as `atan2(sin, cos)` with the
/// sine from Kahan's area formula, which keeps full precision near 0 and pi
/// where `acos` loses half the digits.
pub fn rotation_angle(r1: f64, r2: f64, d12: f64) -> f64 {
    let num = r2 * r2 + d12 * d12 - r1 * r1;
    let mut s = [r1, r2, d12];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let radicand = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if radicand >= 0.0 {
        // 4 * area = sqrt(radicand); sin = 2 area / (r2 d12), cos = num / (2 r2 d12)
        radicand.sqrt().atan2(num)
    } else {
        (num / (2.0 * r2 * d12)).clamp(-1.0, 1.0).acos()
    }
}

/// Recovered point with the step-4 selection margin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Retrieval {
    pub value: Complex64,
    /// `| ||z_A - z3| - r3| - ||z_B - z3| - r3| |`; zero when a modulus vanished.
    pub margin: f64,
}

/// Recovers `z` from `r_j = |z - z_j|`.
pub fn retrieve_point(refs: &ReferenceTriple, r: [f64; 3]) -> Result<Complex64> {
    retrieve_point_with_margin(refs, r).map(|x| x.value)
}

pub fn retrieve_point_with_margin(refs: &ReferenceTriple, r: [f64; 3]) -> Result<Retrieval> {
    let [z1, z2, z3] = refs.points;
    if let Some(j) = r.iter().position(|&rj| rj <= ZERO_MODULUS) {
        return Ok(Retrieval { value: refs.points[j], margin: 0.0 });
    }
    let [r1, r2, r3] = r;
    let m = point_m(z1, z2, r2)?;
    let alpha = rotation_angle(r1, r2, (z1 - z2).norm());
    let arm = m - z2;
    let z_a = z2 + arm * Complex64::from_polar(1.0, -alpha);
    let z_b = z2 + arm * Complex64::from_polar(1.0, alpha);
    let miss_a = ((z_a - z3).norm() - r3).abs();
    let miss_b = ((z_b - z3).norm() - r3).abs();
    let value = if miss_a <= miss_b { z_a } else { z_b };
    Ok(Retrieval { value, margin: (miss_a - miss_b).abs() })
}

/// Phased series recovered from a three-strength phaseless dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct RetrievedSeries {
    pub series: PhasedSeries,
    /// Step-4 selection margin per wavenumber.
    pub margins: Vec<f64>,
}

/// Estimates `m . E_inf(xhat, k_j; J)` for every wavenumber of the dataset.
pub fn retrieve_series(d: &Dataset) -> Result<RetrievedSeries> {
    if d.kind != DataKind::Phaseless {
        return Err(Error::InvalidArgument("phase retrieval needs a phaseless dataset".into()));
    }
    let taus: [Complex64; 3] = d.strengths.as_slice().try_into().map_err(|_| {
        Error::InvalidArgument(format!("phase retrieval needs exactly three strengths, got {}", d.strengths.len()))
    })?;
    let moduli: Vec<Vec<Complex64>> = taus
        .iter()
        .map(|&t| d.series(Projection::M, t))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(d.grid.len());
    let mut margins = Vec::with_capacity(d.grid.len());
    for (j, &k) in d.grid.values().iter().enumerate() {
        let refs = reference_points(k, &d.z0, &d.frame.xhat, taus)?;
        let r = [moduli[0][j].re, moduli[1][j].re, moduli[2][j].re];
        let out = retrieve_point_with_margin(&refs, r)?;
        values.push(out.value);
        margins.push(out.margin);
    }
    Ok(RetrievedSeries {
        series: PhasedSeries { xhat: d.frame.xhat, projection: Projection::M, wave: d.grid.clone(), values },
        margins,
    })
}

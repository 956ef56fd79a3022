//! Direct sampling indicators for strip reconstruction.
//!
//! * Scheme one: `I(z) = |int_K e . E_inf(xhat, k) e^{i k xhat.z} dk|` from
//!   phased data.
//! * Scheme two: `I(z) = |int_K H(k) cos(k xhat.(z - z0)) dk|` from the
//!   phaseless data at strengths `{0, tau1}`.
//! * Scheme three: phase retrieval followed by scheme one.
//!
//! All `k` integrals use the composite trapezoid rule on the wave grid.
//! Per-direction grids are combined with [`superpose`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{sidecar_path, DataKind, Dataset, PhasedSeries};
use crate::model::{vec3, Point3, Projection, SamplingPlaneGrid, UnitVector3, WaveGrid};
use crate::retrieval::retrieve_series;

/// Which indicator produced a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    One,
    Two,
    Three,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Raw,
    #[default]
    PerDirectionMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuperposeMode {
    #[default]
    Sum,
    Max,
}

/// Indicator values on a planar lattice (row-major, `v` rows of `u` columns).
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorGrid {
    pub grid: SamplingPlaneGrid,
    pub values: Vec<f64>,
    pub scheme: Scheme,
    pub directions: Vec<UnitVector3>,
    pub normalization: Normalization,
}

impl IndicatorGrid {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Values divided by the grid maximum (unchanged if the grid is zero).
    pub fn normalized_values(&self) -> Vec<f64> {
        let max = self.max();
        if max > 0.0 {
            self.values.iter().map(|v| v / max).collect()
        } else {
            self.values.clone()
        }
    }

    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nu() + i]
    }
}

fn trapezoid_phases(wave: &WaveGrid, t: f64) -> impl Iterator<Item = (f64, Complex64)> + '_ {
    wave.trapezoid_weights()
        .into_iter()
        .zip(wave.values())
        .map(move |(w, &k)| (w, Complex64::from_polar(1.0, k * t)))
}

/// `|int_K s(k) e^{i k xhat.z} dk|` for one sampling point.
pub fn indicator_phased(series: &[Complex64], wave: &WaveGrid, xhat: &UnitVector3, z: &Point3) -> f64 {
    let t = xhat.dot(z);
    trapezoid_phases(wave, t)
        .zip(series)
        .map(|((w, e), s)| s * e * w)
        .sum::<Complex64>()
        .norm()
}

/// Profile evaluator shared by the grid schemes: precomputes weights once.
struct PhasedKernel<'a> {
    weighted: Vec<Complex64>,
    ks: &'a [f64],
}

impl<'a> PhasedKernel<'a> {
    fn new(series: &[Complex64], wave: &'a WaveGrid) -> Self {
        let weighted = wave.trapezoid_weights().into_iter().zip(series).map(|(w, s)| s * w).collect();
        PhasedKernel { weighted, ks: wave.values() }
    }

    fn eval(&self, t: f64) -> f64 {
        self.ks
            .iter()
            .zip(&self.weighted)
            .map(|(&k, s)| s * Complex64::from_polar(1.0, k * t))
            .sum::<Complex64>()
            .norm()
    }
}

fn evaluate_on_lattice<F>(plane: &SamplingPlaneGrid, f: F) -> Vec<f64>
where
    F: Fn(&Point3) -> f64 + Sync,
{
    (0..plane.len()).into_par_iter().map(|n| f(&plane.point(n))).collect()
}

/// Scheme one on a lattice from a phased series.
pub fn scheme_one(series: &PhasedSeries, plane: &SamplingPlaneGrid) -> Result<IndicatorGrid> {
    if series.values.len() != series.wave.len() {
        return Err(Error::InvalidArgument(format!(
            "series has {} values for {} wavenumbers",
            series.values.len(),
            series.wave.len()
        )));
    }
    let kernel = PhasedKernel::new(&series.values, &series.wave);
    let xhat = series.xhat;
    let values = evaluate_on_lattice(plane, |z| kernel.eval(xhat.dot(z)));
    Ok(IndicatorGrid {
        grid: plane.clone(),
        values,
        scheme: Scheme::One,
        directions: vec![xhat],
        normalization: Normalization::Raw,
    })
}

/// Scheme one from a phased dataset and projection.
pub fn scheme_one_from_dataset(d: &Dataset, e: Projection, plane: &SamplingPlaneGrid) -> Result<IndicatorGrid> {
    scheme_one(&d.phased_series(e)?, plane)
}

fn zero_and_nonzero_strength(d: &Dataset) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if !d.strengths.contains(&zero) {
        return Err(Error::MissingRecord("no records with tau = 0".into()));
    }
    d.strengths
        .iter()
        .copied()
        .find(|t| *t != zero)
        .ok_or_else(|| Error::MissingRecord("no records with tau != 0".into()))
}

/// `H(k) = (|v(tau1)|^2 - |v(0)|^2 - |k tau1|^2) / k` at one wavenumber.
pub fn phaseless_h(d: &Dataset, k: f64) -> Result<f64> {
    let j = d
        .grid
        .values()
        .iter()
        .position(|&g| (g - k).abs() <= 1e-12 * d.grid.k_max())
        .ok_or_else(|| Error::MissingRecord(format!("wavenumber {k} is not on the grid")))?;
    Ok(phaseless_h_series(d)?[j])
}

/// [`phaseless_h`] for every wavenumber of the dataset.
pub fn phaseless_h_series(d: &Dataset) -> Result<Vec<f64>> {
    if d.kind != DataKind::Phaseless {
        return Err(Error::InvalidArgument("scheme two needs a phaseless dataset".into()));
    }
    let tau1 = zero_and_nonzero_strength(d)?;
    let without = d.series(Projection::M, Complex64::new(0.0, 0.0))?;
    let with = d.series(Projection::M, tau1)?;
    Ok(d.grid
        .values()
        .iter()
        .zip(without.iter().zip(&with))
        .map(|(&k, (v0, v1))| (v1.re * v1.re - v0.re * v0.re - (k * tau1).norm_sqr()) / k)
        .collect())
}

/// Scheme two indicator at a single point.
pub fn indicator_phaseless(h: &[f64], wave: &WaveGrid, xhat: &UnitVector3, z0: &Point3, z: &Point3) -> f64 {
    let t = xhat.dot(&vec3::sub(z, z0));
    wave.trapezoid_weights()
        .iter()
        .zip(wave.values())
        .zip(h)
        .map(|((w, &k), hk)| w * hk * (k * t).cos())
        .sum::<f64>()
        .abs()
}

/// Scheme two on a lattice; the dipole position is taken from the dataset.
pub fn scheme_two(d: &Dataset, plane: &SamplingPlaneGrid) -> Result<IndicatorGrid> {
    let h = phaseless_h_series(d)?;
    let weighted: Vec<f64> = d.grid.trapezoid_weights().iter().zip(&h).map(|(w, h)| w * h).collect();
    let ks = d.grid.values();
    let xhat = d.frame.xhat;
    let z0 = d.z0;
    let values = evaluate_on_lattice(plane, |z| {
        let t = xhat.dot(&vec3::sub(z, &z0));
        ks.iter().zip(&weighted).map(|(&k, w)| w * (k * t).cos()).sum::<f64>().abs()
    });
    Ok(IndicatorGrid {
        grid: plane.clone(),
        values,
        scheme: Scheme::Two,
        directions: vec![xhat],
        normalization: Normalization::Raw,
    })
}

/// Phase retrieval on a three-strength phaseless dataset, then scheme one.
pub fn scheme_three(d: &Dataset, plane: &SamplingPlaneGrid) -> Result<IndicatorGrid> {
    let retrieved = retrieve_series(d)?;
    let mut grid = scheme_one(&retrieved.series, plane)?;
    grid.scheme = Scheme::Three;
    Ok(grid)
}

/// Combines per-direction grids point by point.
pub fn superpose(grids: &[IndicatorGrid], mode: SuperposeMode, normalization: Normalization) -> Result<IndicatorGrid> {
    let first = grids.first().ok_or_else(|| Error::InvalidArgument("nothing to superpose".into()))?;
    if grids.iter().any(|g| !g.grid.same_lattice(&first.grid) || g.values.len() != first.values.len()) {
        return Err(Error::LatticeMismatch);
    }
    let mut acc = vec![0.0; first.values.len()];
    for g in grids {
        let vals = match normalization {
            Normalization::Raw => g.values.clone(),
            Normalization::PerDirectionMax => g.normalized_values(),
        };
        for (a, v) in acc.iter_mut().zip(vals) {
            *a = match mode {
                SuperposeMode::Sum => *a + v,
                SuperposeMode::Max => a.max(v),
            };
        }
    }
    Ok(IndicatorGrid {
        grid: first.grid.clone(),
        values: acc,
        scheme: first.scheme,
        directions: grids.iter().flat_map(|g| g.directions.iter().copied()).collect(),
        normalization,
    })
}

/// Pointwise minimum of two max-normalized grids: keeps ridges present in
/// both, e.g. scheme two runs with two dipole positions along `xhat`.
pub fn common_ridge(a: &IndicatorGrid, b: &IndicatorGrid) -> Result<IndicatorGrid> {
    if !a.grid.same_lattice(&b.grid) {
        return Err(Error::LatticeMismatch);
    }
    let values = a.normalized_values().iter().zip(b.normalized_values()).map(|(x, y)| x.min(y)).collect();
    Ok(IndicatorGrid {
        grid: a.grid.clone(),
        values,
        scheme: a.scheme,
        directions: a.directions.clone(),
        normalization: Normalization::PerDirectionMax,
    })
}

/// Ridge level: points whose normalized value is at least this fraction of the maximum.
pub const RIDGE_LEVEL: f64 = 0.9;

/// Lattice indices in the top-10% level set.
pub fn ridge_indices(g: &IndicatorGrid) -> Vec<usize> {
    let max = g.max();
    if max <= 0.0 {
        return Vec::new();
    }
    g.values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= RIDGE_LEVEL * max)
        .map(|(n, _)| n)
        .collect()
}

/// Minimum and maximum of `xhat . z` over the ridge.
pub fn ridge_slab(g: &IndicatorGrid, xhat: &UnitVector3) -> Option<(f64, f64)> {
    ridge_indices(g)
        .into_iter()
        .map(|n| xhat.dot(&g.grid.point(n)))
        .fold(None, |acc, t| match acc {
            None => Some((t, t)),
            Some((lo, hi)) => Some((lo.min(t), hi.max(t))),
        })
}

/// In-plane bounding box `([u_min, u_max], [v_min, v_max])` of the ridge.
pub fn ridge_bbox(g: &IndicatorGrid) -> Option<([f64; 2], [f64; 2])> {
    let nu = g.grid.nu();
    ridge_indices(g)
        .into_iter()
        .map(|n| (g.grid.u(n % nu), g.grid.v(n / nu)))
        .fold(None, |acc, (u, v)| match acc {
            None => Some(([u, u], [v, v])),
            Some((bu, bv)) => Some(([bu[0].min(u), bu[1].max(u)], [bv[0].min(v), bv[1].max(v)])),
        })
}

#[derive(Serialize, Deserialize)]
struct GridSidecar {
    plane: SamplingPlaneGrid,
    directions: Vec<UnitVector3>,
    scheme: Scheme,
    normalization: Normalization,
    ridge_level: f64,
}

/// Writes `u,v,value` rows and the JSON sidecar.
pub fn save_grid(g: &IndicatorGrid, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["u", "v", "value"])?;
    let nu = g.grid.nu();
    for (n, v) in g.values.iter().enumerate() {
        w.write_record([g.grid.u(n % nu).to_string(), g.grid.v(n / nu).to_string(), v.to_string()])?;
    }
    w.flush()?;
    let sidecar = GridSidecar {
        plane: g.grid.clone(),
        directions: g.directions.clone(),
        scheme: g.scheme,
        normalization: g.normalization,
        ridge_level: RIDGE_LEVEL,
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(sidecar_path(path))?), &sidecar)?;
    Ok(())
}

/// Reads a grid written by [`save_grid`].
pub fn load_grid(path: &Path) -> Result<IndicatorGrid> {
    let sidecar: GridSidecar = serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))
        .map_err(|e| Error::Format(format!("grid sidecar: {e}")))?;
    sidecar.plane.validate()?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let mut values = Vec::with_capacity(sidecar.plane.len());
    for (n, row) in rdr.records().enumerate() {
        let row = row?;
        let v: f64 = row
            .get(2)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("row {}: bad value", n + 2)))?;
        values.push(v);
    }
    if values.len() != sidecar.plane.len() {
        return Err(Error::Format(format!("expected {} grid values, found {}", sidecar.plane.len(), values.len())));
    }
    Ok(IndicatorGrid {
        grid: sidecar.plane,
        values,
        scheme: sidecar.scheme,
        directions: sidecar.directions,
        normalization: sidecar.normalization,
    })
}

/// 8-bit gray levels scaled to `[0, max]`, top row at the largest `v`.
pub fn gray_levels(g: &IndicatorGrid) -> Vec<u8> {
    let (nu, nv) = (g.grid.nu(), g.grid.nv());
    let max = g.max();
    let mut out = Vec::with_capacity(nu * nv);
    for j in (0..nv).rev() {
        out.extend(g.values[j * nu..(j + 1) * nu].iter().map(|&v| {
            if max > 0.0 {
                (255.0 * v / max).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        }));
    }
    out
}

/// Binary PGM (P5) heatmap.
pub fn write_pgm(g: &IndicatorGrid, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n255\n", g.grid.nu(), g.grid.nv())?;
    out.write_all(&gray_levels(g))?;
    out.flush()?;
    Ok(())
}

/// Grayscale PNG heatmap with the same pixels as [`write_pgm`].
#[cfg(feature = "png")]
pub fn write_png(g: &IndicatorGrid, path: &Path) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    let mut enc = png::Encoder::new(out, g.grid.nu() as u32, g.grid.nv() as u32);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    let encode_err = |e: png::EncodingError| Error::Format(format!("png: {e}"));
    let mut writer = enc.write_header().map_err(encode_err)?;
    writer.write_image_data(&gray_levels(g)).map_err(encode_err)?;
    writer.finish().map_err(encode_err)?;
    Ok(())
}

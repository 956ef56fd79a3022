//! Synthetic phased and phaseless multi-frequency data, noise models, and
//! the dataset file format.
//!
//! A dataset file is a CSV with header
//! `xhat_x,xhat_y,xhat_z,k,tau_re,tau_im,projection,value_re,value_im`
//! plus a JSON sidecar (same stem, `.json` extension) holding the source
//! label, noise model, dipole position and polarization, and wave grid.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{dipole_far_field, far_field, DipoleConfig, MediumParams};
use crate::model::{Point3, Projection, SourceSpec, TangentFrame, UnitVector3, WaveGrid, WaveGridParams};

/// How measured values are perturbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    None,
    /// `v (1 + delta eps)`
    Relative,
    /// `max(0, v + delta eps)`
    Absolute,
}

/// Noise kind, level `delta`, and the seed of its deterministic generator.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseModel {
    pub fn none() -> Self {
        NoiseModel::default()
    }

    pub fn relative(delta: f64, seed: u64) -> Self {
        NoiseModel { kind: NoiseKind::Relative, delta, seed }
    }

    pub fn absolute(delta: f64, seed: u64) -> Self {
        NoiseModel { kind: NoiseKind::Absolute, delta, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("noise level must be >= 0, got {}", self.delta)));
        }
        Ok(())
    }

    fn is_identity(&self) -> bool {
        self.kind == NoiseKind::None || self.delta == 0.0
    }

    /// Independent model for the `index`-th data stream (e.g. direction).
    pub fn for_stream(&self, index: u64) -> NoiseModel {
        let seed = self.seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        NoiseModel { seed, ..*self }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Uniform draw from the open interval (-1, 1).
fn open_unit_draw(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let x: f64 = rng.random_range(-1.0..1.0);
        if x != -1.0 {
            return x;
        }
    }
}

fn perturb(v: f64, kind: NoiseKind, delta: f64, eps: f64) -> f64 {
    match kind {
        NoiseKind::None => v,
        NoiseKind::Relative => v * (1.0 + delta * eps),
        NoiseKind::Absolute => (v + delta * eps).max(0.0),
    }
}

/// Perturbs nonnegative (phaseless) values, one independent draw per sample.
pub fn apply_noise(values: &[f64], model: &NoiseModel) -> Vec<f64> {
    if model.is_identity() {
        return values.to_vec();
    }
    let mut rng = model.rng();
    values
        .iter()
        .map(|&v| perturb(v, model.kind, model.delta, open_unit_draw(&mut rng)))
        .collect()
}

/// Perturbs complex (phased) values: the rule is applied to the real and
/// imaginary parts with independent draws. The absolute rule is not clamped.
pub fn apply_noise_complex(values: &[Complex64], model: &NoiseModel) -> Vec<Complex64> {
    if model.is_identity() {
        return values.to_vec();
    }
    let mut rng = model.rng();
    values
        .iter()
        .map(|z| {
            let (er, ei) = (open_unit_draw(&mut rng), open_unit_draw(&mut rng));
            match model.kind {
                NoiseKind::Absolute => Complex64::new(z.re + model.delta * er, z.im + model.delta * ei),
                kind => Complex64::new(perturb(z.re, kind, model.delta, er), perturb(z.im, kind, model.delta, ei)),
            }
        })
        .collect()
}

/// Description of how phased values are perturbed, stored in sidecars.
pub const PHASED_NOISE_RULE: &str = "rule applied independently to real and imaginary parts";

/// A projected far field series `e . E_inf(xhat, k_j)` over a wave grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasedSeries {
    pub xhat: UnitVector3,
    pub projection: Projection,
    pub wave: WaveGrid,
    pub values: Vec<Complex64>,
}

/// `e . E_inf(xhat, k_j; J)` for every wavenumber of the grid.
pub fn synth_phased(
    source: &SourceSpec,
    medium: &MediumParams,
    frame: &TangentFrame,
    grid: &WaveGrid,
    e: Projection,
) -> Result<Vec<Complex64>> {
    let dir = frame.projection(e);
    grid.values()
        .iter()
        .map(|&k| Ok(far_field(source, medium, &frame.xhat, k)?.dot_real(dir.as_array())))
        .collect()
}

/// Phased or phaseless measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Phased,
    Phaseless,
}

/// One measured sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub xhat: UnitVector3,
    pub k: f64,
    pub tau: Complex64,
    pub projection: Projection,
    /// Modulus (imaginary part zero) for phaseless data.
    pub value: Complex64,
}

/// Multi-frequency measurements at one observation direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub kind: DataKind,
    pub frame: TangentFrame,
    pub grid: WaveGrid,
    /// Dipole position; the polarization is always `frame.l`.
    pub z0: Point3,
    pub strengths: Vec<Complex64>,
    pub records: Vec<MeasurementRecord>,
    pub source_label: String,
    pub noise: NoiseModel,
}

/// Phaseless data `|m . E_inf_{z0}(xhat, k; J, tau, l)|` for every `k` and `tau`.
///
/// Records are ordered by strength, then wavenumber. The result is
/// noise-free; see [`Dataset::with_noise`].
pub fn synth_phaseless(
    source: &SourceSpec,
    medium: &MediumParams,
    frame: &TangentFrame,
    grid: &WaveGrid,
    z0: Point3,
    strengths: &[Complex64],
) -> Result<Dataset> {
    if strengths.is_empty() {
        return Err(Error::InvalidArgument("at least one dipole strength is required".into()));
    }
    let m = frame.m.as_array();
    let source_part: Vec<Complex64> = grid
        .values()
        .iter()
        .map(|&k| Ok(far_field(source, medium, &frame.xhat, k)?.dot_real(m)))
        .collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(strengths.len() * grid.len());
    for &tau in strengths {
        let dipole = DipoleConfig { z0, tau, p: frame.l };
        for (&k, &s) in grid.values().iter().zip(&source_part) {
            let total = s + dipole_far_field(&dipole, &frame.xhat, k).dot_real(m);
            records.push(MeasurementRecord {
                xhat: frame.xhat,
                k,
                tau,
                projection: Projection::M,
                value: Complex64::new(total.norm(), 0.0),
            });
        }
    }
    Ok(Dataset {
        kind: DataKind::Phaseless,
        frame: *frame,
        grid: grid.clone(),
        z0,
        strengths: strengths.to_vec(),
        records,
        source_label: "inline".into(),
        noise: NoiseModel::none(),
    })
}

/// Phased data for the requested projections, stored with `tau = 0`.
pub fn synth_phased_dataset(
    source: &SourceSpec,
    medium: &MediumParams,
    frame: &TangentFrame,
    grid: &WaveGrid,
    projections: &[Projection],
) -> Result<Dataset> {
    let mut records = Vec::with_capacity(projections.len() * grid.len());
    for &e in projections {
        for (&k, value) in grid.values().iter().zip(synth_phased(source, medium, frame, grid, e)?) {
            records.push(MeasurementRecord { xhat: frame.xhat, k, tau: Complex64::new(0.0, 0.0), projection: e, value });
        }
    }
    Ok(Dataset {
        kind: DataKind::Phased,
        frame: *frame,
        grid: grid.clone(),
        z0: [0.0; 3],
        strengths: vec![Complex64::new(0.0, 0.0)],
        records,
        source_label: "inline".into(),
        noise: NoiseModel::none(),
    })
}

impl Dataset {
    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.source_label = label.into();
        self
    }

    /// Applies the noise model record by record (in storage order) and
    /// stores it in the metadata.
    pub fn with_noise(mut self, model: NoiseModel) -> Result<Self> {
        model.validate()?;
        match self.kind {
            DataKind::Phaseless => {
                let values: Vec<f64> = self.records.iter().map(|r| r.value.re).collect();
                for (r, v) in self.records.iter_mut().zip(apply_noise(&values, &model)) {
                    r.value = Complex64::new(v, 0.0);
                }
            }
            DataKind::Phased => {
                let values: Vec<Complex64> = self.records.iter().map(|r| r.value).collect();
                for (r, v) in self.records.iter_mut().zip(apply_noise_complex(&values, &model)) {
                    r.value = v;
                }
            }
        }
        self.noise = model;
        Ok(self)
    }

    fn projections(&self) -> Vec<Projection> {
        let mut out = Vec::new();
        for r in &self.records {
            if !out.contains(&r.projection) {
                out.push(r.projection);
            }
        }
        out
    }

    fn grid_index(&self, k: f64) -> Option<usize> {
        let tol = 1e-12 * self.grid.k_max();
        self.grid.values().iter().position(|&g| (g - k).abs() <= tol)
    }

    /// Values for one projection and strength, ordered by wavenumber.
    pub fn series(&self, projection: Projection, tau: Complex64) -> Result<Vec<Complex64>> {
        let mut out: Vec<Option<Complex64>> = vec![None; self.grid.len()];
        for r in self.records.iter().filter(|r| r.projection == projection && r.tau == tau) {
            if let Some(j) = self.grid_index(r.k) {
                out[j] = Some(r.value);
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(j, v)| {
                v.ok_or_else(|| {
                    Error::MissingRecord(format!(
                        "projection {} tau {} k {}",
                        projection.as_str(),
                        tau,
                        self.grid.values()[j]
                    ))
                })
            })
            .collect()
    }

    /// Phased series for a projection of a phased dataset.
    pub fn phased_series(&self, projection: Projection) -> Result<PhasedSeries> {
        if self.kind != DataKind::Phased {
            return Err(Error::InvalidArgument("dataset holds phaseless data".into()));
        }
        let values = self.series(projection, Complex64::new(0.0, 0.0))?;
        Ok(PhasedSeries { xhat: self.frame.xhat, projection, wave: self.grid.clone(), values })
    }

    /// Checks that every `(k, tau)` pair appears exactly once per projection.
    pub fn validate(&self) -> Result<()> {
        let projections = self.projections();
        let expected = self.grid.len() * self.strengths.len() * projections.len().max(1);
        if self.records.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} records ({} wavenumbers x {} strengths x {} projections), found {}",
                self.grid.len(),
                self.strengths.len(),
                projections.len(),
                self.records.len()
            )));
        }
        let mut seen = HashSet::new();
        for r in &self.records {
            let j = self
                .grid_index(r.k)
                .ok_or_else(|| Error::Format(format!("wavenumber {} is not on the grid", r.k)))?;
            let t = self
                .strengths
                .iter()
                .position(|&s| s == r.tau)
                .ok_or_else(|| Error::Format(format!("strength {} is not listed", r.tau)))?;
            if !seen.insert((r.projection, j, t)) {
                return Err(Error::Format(format!(
                    "duplicate record for projection {} k {} tau {}",
                    r.projection.as_str(),
                    r.k,
                    r.tau
                )));
            }
            if r.xhat != self.frame.xhat {
                return Err(Error::Format("records disagree on the observation direction".into()));
            }
            if self.kind == DataKind::Phaseless && (r.value.im != 0.0 || r.value.re.is_nan() || r.value.re < 0.0) {
                return Err(Error::Format(format!("phaseless value {} must be real and >= 0", r.value)));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    xhat_x: f64,
    xhat_y: f64,
    xhat_z: f64,
    k: f64,
    tau_re: f64,
    tau_im: f64,
    projection: Projection,
    value_re: f64,
    value_im: f64,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    source_label: String,
    kind: DataKind,
    noise: NoiseModel,
    z0: Point3,
    p: UnitVector3,
    grid: WaveGridParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phased_noise_rule: Option<String>,
}

/// Sidecar path for a dataset or grid CSV: same stem, `.json` extension.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes the CSV and its JSON sidecar.
pub fn save_dataset(d: &Dataset, path: &Path) -> Result<()> {
    d.validate()?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for r in &d.records {
        let x = r.xhat.as_array();
        w.serialize(CsvRow {
            xhat_x: x[0],
            xhat_y: x[1],
            xhat_z: x[2],
            k: r.k,
            tau_re: r.tau.re,
            tau_im: r.tau.im,
            projection: r.projection,
            value_re: r.value.re,
            value_im: r.value.im,
        })?;
    }
    w.flush()?;
    let sidecar = Sidecar {
        source_label: d.source_label.clone(),
        kind: d.kind,
        noise: d.noise,
        z0: d.z0,
        p: d.frame.l,
        grid: d.grid.params(),
        phased_noise_rule: (d.kind == DataKind::Phased && d.noise.kind != NoiseKind::None)
            .then(|| PHASED_NOISE_RULE.to_string()),
    };
    let f = BufWriter::new(File::create(sidecar_path(path))?);
    serde_json::to_writer_pretty(f, &sidecar)?;
    Ok(())
}

/// Reads a dataset written by [`save_dataset`].
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let sidecar: Sidecar = serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))
        .map_err(|e| Error::Format(format!("sidecar: {e}")))?;
    let grid = WaveGrid::try_from(sidecar.grid)?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = rdr.headers()?.clone();
    let expected = ["xhat_x", "xhat_y", "xhat_z", "k", "tau_re", "tau_im", "projection", "value_re", "value_im"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Format(format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let mut records = Vec::new();
    let mut strengths: Vec<Complex64> = Vec::new();
    for (line, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(|e| Error::Format(format!("row {}: {e}", line + 2)))?;
        let xhat = UnitVector3::new([row.xhat_x, row.xhat_y, row.xhat_z])
            .map_err(|e| Error::Format(format!("row {}: {e}", line + 2)))?;
        let tau = Complex64::new(row.tau_re, row.tau_im);
        if !strengths.contains(&tau) {
            strengths.push(tau);
        }
        records.push(MeasurementRecord {
            xhat,
            k: row.k,
            tau,
            projection: row.projection,
            value: Complex64::new(row.value_re, row.value_im),
        });
    }
    let first = records.first().ok_or_else(|| Error::Format("dataset has no records".into()))?;
    let frame = TangentFrame::from_l(first.xhat, sidecar.p).map_err(|e| Error::Format(e.to_string()))?;
    let d = Dataset {
        kind: sidecar.kind,
        frame,
        grid,
        z0: sidecar.z0,
        strengths,
        records,
        source_label: sidecar.source_label,
        noise: sidecar.noise,
    };
    d.validate()?;
    Ok(d)
}

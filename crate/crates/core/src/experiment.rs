//! Config-driven experiments: synthesize data for a fan of directions, run a
//! strip scheme per direction, superpose, and write grids, heatmaps and a log.
//!
//! Configs are JSON. Every field except `source` and `scheme` has a default
//! matching the standard setup: 20 directions in the xy plane, wavenumbers
//! 9.5..24 at 30 points, 10% relative noise, `[-2, 6]^2` at spacing 0.05.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsm::{
    common_ridge, ridge_bbox, ridge_slab, save_grid, scheme_one_from_dataset, scheme_three, scheme_two, superpose,
    write_pgm, IndicatorGrid, Normalization, Scheme, SuperposeMode, RIDGE_LEVEL,
};
use crate::error::{Error, Result};
use crate::forward::MediumParams;
use crate::measurement::{
    save_dataset, synth_phased, synth_phased_dataset, synth_phaseless, Dataset, NoiseModel,
};
use crate::model::{
    direction_fan, Plane, Point3, Projection, SamplingPlaneGrid, SourcePiece, SourceSpec, TangentFrame, UnitVector3,
    WaveGrid,
};
use crate::retrieval::{retrieve_series, ReferenceTriple};
use crate::sources;

/// A named standard source or an inline list of pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceChoice {
    Label(String),
    Inline { pieces: Vec<SourcePiece> },
}

/// Reference dipole position and strengths (the polarization is always `l`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleSettings {
    pub z0: Point3,
    pub strengths: Vec<Complex64>,
    /// Scheme two only: a second position along the same direction. The
    /// per-direction grid becomes the pointwise minimum of both runs, which
    /// suppresses the mirrored strip.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_z0: Option<Point3>,
}

impl DipoleSettings {
    /// `tau = 0.1` with `z0 = (4, 4, 0)` for scheme two; `tau = 0.1, -0.1, 0.1i`
    /// with `z0 = (2, 2, 0)` otherwise.
    pub fn standard(scheme: Scheme) -> Self {
        let c = Complex64::new;
        match scheme {
            Scheme::Two => DipoleSettings {
                z0: [4.0, 4.0, 0.0],
                strengths: vec![c(0.0, 0.0), c(0.1, 0.0)],
                second_z0: None,
            },
            _ => DipoleSettings {
                z0: [2.0, 2.0, 0.0],
                strengths: vec![c(0.1, 0.0), c(-0.1, 0.0), c(0.0, 0.1)],
                second_z0: None,
            },
        }
    }
}

/// Sampling region inside the chosen plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingRegion {
    #[serde(default)]
    pub offset: f64,
    pub u_range: [f64; 2],
    pub v_range: [f64; 2],
    pub spacing: f64,
}

impl Default for SamplingRegion {
    fn default() -> Self {
        let g = SamplingPlaneGrid::standard(Plane::Xy);
        SamplingRegion { offset: g.offset, u_range: g.u_range, v_range: g.v_range, spacing: g.spacing }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperposeSettings {
    #[serde(default)]
    pub mode: SuperposeMode,
    #[serde(default)]
    pub normalization: Normalization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// File stem; defaults to the experiment name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings { dir: default_out_dir(), stem: None }
    }
}

fn default_name() -> String {
    "experiment".into()
}

fn default_directions() -> usize {
    20
}

fn default_noise() -> NoiseModel {
    NoiseModel::relative(0.1, 0)
}

/// One experiment, as read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub source: SourceChoice,
    pub scheme: Scheme,
    #[serde(default = "default_plane")]
    pub plane: Plane,
    #[serde(default = "default_directions")]
    pub directions: usize,
    #[serde(default)]
    pub wave_grid: WaveGrid,
    #[serde(default = "default_noise")]
    pub noise: NoiseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole: Option<DipoleSettings>,
    #[serde(default = "default_projection")]
    pub projection: Projection,
    #[serde(default)]
    pub sampling: SamplingRegion,
    #[serde(default)]
    pub superpose: SuperposeSettings,
    #[serde(default)]
    pub medium: MediumParams,
    #[serde(default)]
    pub output: OutputSettings,
}

fn default_plane() -> Plane {
    Plane::Xy
}

fn default_projection() -> Projection {
    Projection::M
}

/// 1-based line of the first occurrence of `"key"` in `text`, or 1.
fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1)
}

impl ExperimentConfig {
    /// A config with all defaults for the given source and scheme.
    pub fn new(source: SourceChoice, scheme: Scheme) -> Self {
        ExperimentConfig {
            name: default_name(),
            source,
            scheme,
            plane: Plane::Xy,
            directions: default_directions(),
            wave_grid: WaveGrid::default(),
            noise: default_noise(),
            dipole: None,
            projection: Projection::M,
            sampling: SamplingRegion::default(),
            superpose: SuperposeSettings::default(),
            medium: MediumParams::default(),
            output: OutputSettings::default(),
        }
    }

    /// Parses and validates; errors carry the offending line.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config { line: e.line().max(1), message: e.to_string() })?;
        cfg.validate_at(|key| line_of(text, key))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Semantic checks without line information.
    pub fn validate(&self) -> Result<()> {
        self.validate_at(|_| 1)
    }

    fn validate_at(&self, line: impl Fn(&str) -> usize) -> Result<()> {
        let fail = |key: &str, message: String| Error::Config { line: line(key), message };
        if self.directions == 0 {
            return Err(fail("directions", "at least one observation direction is required".into()));
        }
        self.noise.validate().map_err(|e| fail("noise", e.to_string()))?;
        self.sampling_grid().validate().map_err(|e| fail("sampling", e.to_string()))?;
        MediumParams::new(self.medium.eps, self.medium.mu).map_err(|e| fail("medium", e.to_string()))?;
        let source = self.source_spec().map_err(|e| fail("source", e.to_string()))?;
        let dipole = self.dipole_settings();
        let zero = Complex64::new(0.0, 0.0);
        match self.scheme {
            Scheme::One => {}
            Scheme::Two => {
                let s = &dipole.strengths;
                if s.len() != 2 || !s.contains(&zero) || s.iter().all(|t| *t == zero) {
                    return Err(fail(
                        "strengths",
                        format!("scheme two needs strengths {{0, tau1}} with tau1 != 0, got {} values", s.len()),
                    ));
                }
            }
            Scheme::Three => {
                let s = &dipole.strengths;
                if s.len() != 3 {
                    return Err(fail("strengths", format!("scheme three needs three strengths, got {}", s.len())));
                }
                ReferenceTriple::new([s[0], s[1], s[2]]).map_err(|e| fail("strengths", e.to_string()))?;
            }
        }
        if self.scheme != Scheme::One {
            for (key, z) in [("z0", Some(dipole.z0)), ("second_z0", dipole.second_z0)] {
                if let Some(z) = z {
                    if !z.iter().all(|c| c.is_finite()) {
                        return Err(fail(key, "dipole position must be finite".into()));
                    }
                    if source.pieces().iter().any(|p| p.support.contains_closed(&z)) {
                        return Err(fail(key, format!("dipole position {z:?} lies in the source support")));
                    }
                }
            }
            if dipole.second_z0.is_some() && self.scheme != Scheme::Two {
                return Err(fail("second_z0", "second_z0 is only used by scheme two".into()));
            }
        }
        Ok(())
    }

    pub fn source_spec(&self) -> Result<SourceSpec> {
        match &self.source {
            SourceChoice::Label(label) => sources::by_label(label),
            SourceChoice::Inline { pieces } => SourceSpec::new(pieces.clone()),
        }
    }

    pub fn source_label(&self) -> String {
        match &self.source {
            SourceChoice::Label(label) => label.to_uppercase(),
            SourceChoice::Inline { .. } => "inline".into(),
        }
    }

    pub fn dipole_settings(&self) -> DipoleSettings {
        self.dipole.clone().unwrap_or_else(|| DipoleSettings::standard(self.scheme))
    }

    pub fn sampling_grid(&self) -> SamplingPlaneGrid {
        let s = self.sampling;
        SamplingPlaneGrid { plane: self.plane, offset: s.offset, u_range: s.u_range, v_range: s.v_range, spacing: s.spacing }
    }

    pub fn observation_directions(&self) -> Vec<UnitVector3> {
        direction_fan(self.plane, self.directions)
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.name.clone())
    }

    /// Noisy measurements at the `index`-th direction, as the scheme needs them.
    pub fn direction_dataset(&self, source: &SourceSpec, index: usize, xhat: UnitVector3) -> Result<Dataset> {
        self.dataset_at(source, index, xhat, None)
    }

    fn dataset_at(&self, source: &SourceSpec, index: usize, xhat: UnitVector3, z0: Option<Point3>) -> Result<Dataset> {
        let frame = TangentFrame::for_direction(xhat);
        let mut noise = self.noise.for_stream(index as u64);
        let d = match self.scheme {
            Scheme::One => synth_phased_dataset(source, &self.medium, &frame, &self.wave_grid, &[self.projection])?,
            Scheme::Two | Scheme::Three => {
                let dipole = self.dipole_settings();
                if let Some(z) = z0 {
                    noise = noise.for_stream(1);
                    synth_phaseless(source, &self.medium, &frame, &self.wave_grid, z, &dipole.strengths)?
                } else {
                    synth_phaseless(source, &self.medium, &frame, &self.wave_grid, dipole.z0, &dipole.strengths)?
                }
            }
        };
        d.labelled(self.source_label()).with_noise(noise)
    }
}

/// Ridge extent of one direction's indicator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectionSummary {
    pub xhat: UnitVector3,
    /// `[min, max]` of `xhat . z` over the ridge.
    pub ridge_slab: Option<(f64, f64)>,
}

/// Result of a reconstruction before anything is written.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub grid: IndicatorGrid,
    pub directions: Vec<DirectionSummary>,
    pub ridge_bbox: Option<([f64; 2], [f64; 2])>,
}

fn direction_grid(cfg: &ExperimentConfig, source: &SourceSpec, index: usize, xhat: UnitVector3) -> Result<IndicatorGrid> {
    let plane = cfg.sampling_grid();
    let d = cfg.direction_dataset(source, index, xhat)?;
    match cfg.scheme {
        Scheme::One => scheme_one_from_dataset(&d, cfg.projection, &plane),
        Scheme::Two => {
            let g = scheme_two(&d, &plane)?;
            match cfg.dipole_settings().second_z0 {
                Some(z1) => {
                    let d1 = cfg.dataset_at(source, index, xhat, Some(z1))?;
                    let mut both = common_ridge(&g, &scheme_two(&d1, &plane)?)?;
                    both.scheme = Scheme::Two;
                    Ok(both)
                }
                None => Ok(g),
            }
        }
        Scheme::Three => scheme_three(&d, &plane),
    }
}

/// Runs the configured scheme for every direction and superposes.
pub fn reconstruct(cfg: &ExperimentConfig) -> Result<Reconstruction> {
    cfg.validate()?;
    let source = cfg.source_spec()?;
    let fan = cfg.observation_directions();
    let grids: Vec<IndicatorGrid> = fan
        .par_iter()
        .enumerate()
        .map(|(j, &xhat)| direction_grid(cfg, &source, j, xhat))
        .collect::<Result<_>>()?;
    let directions = grids
        .iter()
        .zip(&fan)
        .map(|(g, &xhat)| DirectionSummary { xhat, ridge_slab: ridge_slab(g, &xhat) })
        .collect();
    let grid = superpose(&grids, cfg.superpose.mode, cfg.superpose.normalization)?;
    let ridge_bbox = ridge_bbox(&grid);
    Ok(Reconstruction { grid, directions, ridge_bbox })
}

/// Paths produced by [`run_experiment`].
#[derive(Clone, Debug)]
pub struct RunOutputs {
    pub grid_csv: PathBuf,
    pub heatmap: PathBuf,
    pub log: PathBuf,
    pub reconstruction: Reconstruction,
}

fn format_pair(p: Option<(f64, f64)>) -> String {
    p.map_or_else(|| "none".into(), |(a, b)| format!("[{a:.4}, {b:.4}]"))
}

fn run_log(cfg: &ExperimentConfig, r: &Reconstruction) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name = {}", cfg.name);
    let _ = writeln!(s, "source = {}", cfg.source_label());
    let _ = writeln!(s, "config = {}", serde_json::to_string(cfg).expect("config serializes"));
    let _ = writeln!(s, "lattice = {} x {}", r.grid.grid.nu(), r.grid.grid.nv());
    let _ = writeln!(s, "ridge_level = {RIDGE_LEVEL} of max");
    for (j, d) in r.directions.iter().enumerate() {
        let x = d.xhat.as_array();
        let _ = writeln!(
            s,
            "direction {j}: xhat = [{:.6}, {:.6}, {:.6}] ridge_slab = {}",
            x[0],
            x[1],
            x[2],
            format_pair(d.ridge_slab)
        );
    }
    match r.ridge_bbox {
        Some((u, v)) => {
            let _ = writeln!(s, "superposed ridge_bbox: u = {} v = {}", format_pair(Some((u[0], u[1]))), format_pair(Some((v[0], v[1]))));
        }
        None => {
            let _ = writeln!(s, "superposed ridge_bbox: none");
        }
    }
    s
}

/// Reconstructs and writes `<stem>.csv`, `<stem>.json`, `<stem>.pgm`
/// (plus `<stem>.png` with the `png` feature) and `<stem>.log` into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutputs> {
    let r = reconstruct(cfg)?;
    fs::create_dir_all(out)?;
    let stem = cfg.stem();
    let grid_csv = out.join(format!("{stem}.csv"));
    save_grid(&r.grid, &grid_csv)?;
    let heatmap = out.join(format!("{stem}.pgm"));
    write_pgm(&r.grid, &heatmap)?;
    #[cfg(feature = "png")]
    crate::dsm::write_png(&r.grid, &out.join(format!("{stem}.png")))?;
    let text = run_log(cfg, &r);
    for line in text.lines() {
        log::info!("{line}");
    }
    let log = out.join(format!("{stem}.log"));
    fs::write(&log, text)?;
    Ok(RunOutputs { grid_csv, heatmap, log, reconstruction: r })
}

/// Writes one dataset per direction as `<stem>_d<j>.csv` (plus sidecars).
pub fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let source = cfg.source_spec()?;
    let datasets: Vec<Dataset> = cfg
        .observation_directions()
        .into_par_iter()
        .enumerate()
        .map(|(j, xhat)| cfg.direction_dataset(&source, j, xhat))
        .collect::<Result<_>>()?;
    fs::create_dir_all(out)?;
    let stem = cfg.stem();
    datasets
        .iter()
        .enumerate()
        .map(|(j, d)| {
            let path = out.join(format!("{stem}_d{j:02}.csv"));
            save_dataset(d, &path)?;
            Ok(path)
        })
        .collect()
}

/// Retrieved and exact `m . E_inf` at one wavenumber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetrievalRow {
    pub direction: usize,
    pub k: f64,
    pub truth: Complex64,
    pub retrieved: Complex64,
    pub margin: f64,
}

/// Phase retrieval against the noise-free phased truth, per direction.
///
/// Requires a scheme-three config (three strengths).
pub fn retrieval_comparison(cfg: &ExperimentConfig) -> Result<Vec<RetrievalRow>> {
    if cfg.scheme != Scheme::Three {
        return Err(Error::Config { line: 1, message: "retrieval needs a scheme three config".into() });
    }
    cfg.validate()?;
    let source = cfg.source_spec()?;
    let per_direction: Vec<Vec<RetrievalRow>> = cfg
        .observation_directions()
        .into_par_iter()
        .enumerate()
        .map(|(j, xhat)| {
            let d = cfg.direction_dataset(&source, j, xhat)?;
            let got = retrieve_series(&d)?;
            let truth = synth_phased(&source, &cfg.medium, &d.frame, &cfg.wave_grid, Projection::M)?;
            Ok(cfg
                .wave_grid
                .values()
                .iter()
                .zip(truth.iter().zip(got.series.values.iter().zip(&got.margins)))
                .map(|(&k, (&truth, (&retrieved, &margin)))| RetrievalRow { direction: j, k, truth, retrieved, margin })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_direction.into_iter().flatten().collect())
}

pub fn write_retrieval_rows(rows: &[RetrievalRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["direction", "k", "truth_re", "truth_im", "retrieved_re", "retrieved_im", "margin"])?;
    for r in rows {
        w.write_record([
            r.direction.to_string(),
            r.k.to_string(),
            r.truth.re.to_string(),
            r.truth.im.to_string(),
            r.retrieved.re.to_string(),
            r.retrieved.im.to_string(),
            r.margin.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Retrieves the phased series of a three-strength phaseless dataset and
/// writes `k,re,im,margin`.
pub fn write_retrieved_dataset(d: &Dataset, path: &Path) -> Result<()> {
    let got = retrieve_series(d)?;
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "k,re,im,margin")?;
    for ((k, z), m) in d.grid.values().iter().zip(&got.series.values).zip(&got.margins) {
        writeln!(w, "{k},{},{},{m}", z.re, z.im)?;
    }
    w.flush()?;
    Ok(())
}

//! Acceptance criteria 1-12. Each test prints one `criterion N: PASS|FAIL`
//! line to stdout (bypassing capture) and then asserts.
//!
//! Oracles are built here from first principles: Gauss-Legendre nodes by
//! Newton iteration, source geometry written out by hand, the dyadic Green's
//! function, and ridge extraction from raw grid values.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use emsrc::dsm::{scheme_one, scheme_three, scheme_two, IndicatorGrid};
use emsrc::experiment::{reconstruct, run_experiment, simulate, ExperimentConfig, SourceChoice};
use emsrc::forward::{dipole_far_field, energy_flux, far_field, DipoleConfig, DEFAULT_FLUX_ORDER};
use emsrc::measurement::{synth_phased, synth_phaseless, NoiseModel, PhasedSeries};
use emsrc::model::{direction_fan, SourcePiece};
use emsrc::retrieval::{reference_points, retrieve_point, ReferenceTriple};
use emsrc::{
    sources, Complex64, MediumParams, Plane, PrimitiveSupport, Projection, SamplingPlaneGrid, SourceSpec,
    TangentFrame, UnitVector3, WaveGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, title: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {n:>2}: {verdict}  {title}  [{detail}]\n");
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---- hand-rolled oracles ---------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn panels(a: f64, b: f64, count: usize, rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let h = (b - a) / count as f64;
    (0..count)
        .flat_map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            rule.iter().map(move |&(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Shape {
    Box([f64; 3], [f64; 3]),
    Ball([f64; 3], f64),
}

const J: [f64; 3] = [1.5, 1.5 * 1.732_050_807_568_877_2, 1.5];

/// The five supports, written out independently of the library.
fn shapes(label: &str) -> Vec<Shape> {
    match label {
        "S1" => vec![Shape::Box([0.0; 3], [1.0; 3])],
        "S2" => vec![Shape::Ball([0.0; 3], 1.0)],
        "S3" => vec![Shape::Box([0.0; 3], [1.0; 3]), Shape::Ball([3.0, 3.0, 0.0], 1.0)],
        "S4" => vec![
            Shape::Box([0.0, 0.0, 0.0], [1.0, 4.0, 1.0]),
            Shape::Box([1.0, 0.0, 0.0], [4.0, 1.0, 1.0]),
        ],
        "S5" => vec![Shape::Box([0.0; 3], [2.0, 1.0, 1.0])],
        _ => unreachable!(),
    }
}

/// Volume nodes: panels of length <= 0.5 with 16 points per axis for boxes;
/// spherical coordinates for balls.
fn nodes(shape: Shape) -> Vec<([f64; 3], f64)> {
    let gl16 = gauss_legendre(16);
    match shape {
        Shape::Box(lo, hi) => {
            let axes: Vec<Vec<(f64, f64)>> = (0..3)
                .map(|i| panels(lo[i], hi[i], ((hi[i] - lo[i]) / 0.5).ceil() as usize, &gl16))
                .collect();
            let mut out = Vec::new();
            for &(x, wx) in &axes[0] {
                for &(y, wy) in &axes[1] {
                    for &(z, wz) in &axes[2] {
                        out.push(([x, y, z], wx * wy * wz));
                    }
                }
            }
            out
        }
        Shape::Ball(center, radius) => {
            let gl24 = gauss_legendre(24);
            let rs = panels(0.0, radius, 2, &gl24);
            let ts = panels(-1.0, 1.0, 4, &gl16);
            let nphi = 96;
            let dphi = 2.0 * PI / nphi as f64;
            let mut out = Vec::new();
            for &(r, wr) in &rs {
                for &(t, wt) in &ts {
                    let s = (1.0 - t * t).sqrt();
                    for j in 0..nphi {
                        let (sp, cp) = (j as f64 * dphi).sin_cos();
                        let y = [center[0] + r * s * cp, center[1] + r * s * sp, center[2] + r * t];
                        out.push((y, wr * r * r * wt * dphi));
                    }
                }
            }
            out
        }
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `i k (I - x x^T) int e^{-i k x.y} J dy` (eps = mu = 1) by quadrature.
fn far_field_oracle(shape: Shape, x: &[f64; 3], k: f64) -> [Complex64; 3] {
    let mut s = c(0.0, 0.0);
    for (y, w) in nodes(shape) {
        s += Complex64::from_polar(w, -k * dot(x, &y));
    }
    let v: [Complex64; 3] = std::array::from_fn(|i| s * J[i]);
    let xv = v[0] * x[0] + v[1] * x[1] + v[2] * x[2];
    std::array::from_fn(|i| c(0.0, k) * (v[i] - xv * x[i]))
}

/// `E(x) = i k int G(x, y) J dy` with the dyadic Green's function.
fn near_field_oracle(shape: Shape, x: &[f64; 3], k: f64) -> [Complex64; 3] {
    let mut acc = [c(0.0, 0.0); 3];
    for (y, w) in nodes(shape) {
        let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        let r = dot(&d, &d).sqrt();
        let u = [d[0] / r, d[1] / r, d[2] / r];
        let kr = k * r;
        let phi = Complex64::from_polar(1.0 / (4.0 * PI * r), kr);
        let a = 1.0 + (c(0.0, kr) - 1.0) / (kr * kr);
        let b = (c(3.0, -3.0 * kr) - kr * kr) / (kr * kr);
        let uj = dot(&u, &J);
        for i in 0..3 {
            acc[i] += phi * (a * J[i] + b * u[i] * uj) * w;
        }
    }
    acc.map(|v| c(0.0, k) * v)
}

fn norm3(v: &[Complex64; 3]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn lib_vec(e: emsrc::ComplexVec3) -> [Complex64; 3] {
    e.0
}

fn medium() -> MediumParams {
    MediumParams::default()
}

// ---- criteria ----------------------------------------------------------------

#[test]
fn criterion_01_forward_oracle_equivalence() {
    let start = Instant::now();
    let x = [0.36, -0.48, 0.8];
    let xhat = UnitVector3::new(x).unwrap();
    let mut worst: f64 = 0.0;
    for label in ["S1", "S2", "S3", "S4", "S5"] {
        let src = sources::by_label(label).unwrap();
        for k in [9.5, 24.0] {
            // piecewise: each support on its own, then the whole source
            let mut total = [c(0.0, 0.0); 3];
            for (shape, piece) in shapes(label).into_iter().zip(src.pieces()) {
                let oracle = far_field_oracle(shape, &x, k);
                let single = SourceSpec::new(vec![*piece]).unwrap();
                let got = lib_vec(far_field(&single, &medium(), &xhat, k).unwrap());
                let diff: [Complex64; 3] = std::array::from_fn(|i| got[i] - oracle[i]);
                worst = worst.max(norm3(&diff) / norm3(&oracle));
                for i in 0..3 {
                    total[i] += oracle[i];
                }
            }
            let got = lib_vec(far_field(&src, &medium(), &xhat, k).unwrap());
            let diff: [Complex64; 3] = std::array::from_fn(|i| got[i] - total[i]);
            worst = worst.max(norm3(&diff) / norm3(&total));
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-7 && elapsed < Duration::from_secs(60);
    report(1, "closed form vs quadrature, S1-S5, k in {9.5, 24}", pass, format!("max rel err {worst:.2e} <= 1e-7, {elapsed:.2?}"));
    assert!(pass);
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    // uniform on the sphere
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

fn translated(src: &SourceSpec, h: [f64; 3]) -> SourceSpec {
    // J_h(y) = J(y + h): supports move by -h
    let pieces = src
        .pieces()
        .iter()
        .map(|p| {
            let support = match p.support {
                PrimitiveSupport::Cuboid { lower, upper } => PrimitiveSupport::cuboid(
                    std::array::from_fn(|i| lower[i] - h[i]),
                    std::array::from_fn(|i| upper[i] - h[i]),
                ),
                PrimitiveSupport::Ball { center, radius } => {
                    PrimitiveSupport::ball(std::array::from_fn(|i| center[i] - h[i]), radius)
                }
            }
            .unwrap();
            SourcePiece { support, density: p.density }
        })
        .collect();
    SourceSpec::new(pieces).unwrap()
}

#[test]
fn criterion_02_tangentiality_and_translation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let src = sources::s3();
    let (mut tang, mut law, mut modulus) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let x = random_unit(&mut rng);
        let xhat = UnitVector3::normalize(x).unwrap();
        let k = rng.random_range(9.5..=24.0);
        let h: [f64; 3] = std::array::from_fn(|_| rng.random_range(-5.0..5.0));
        let e = lib_vec(far_field(&src, &medium(), &xhat, k).unwrap());
        let eh = lib_vec(far_field(&translated(&src, h), &medium(), &xhat, k).unwrap());
        let xa = xhat.as_array();
        tang = tang.max((e[0] * xa[0] + e[1] * xa[1] + e[2] * xa[2]).norm());
        let phase = Complex64::from_polar(1.0, k * dot(xa, &h));
        let diff: [Complex64; 3] = std::array::from_fn(|i| eh[i] - phase * e[i]);
        law = law.max(norm3(&diff));
        modulus = modulus.max((norm3(&eh) - norm3(&e)).abs());
    }
    let pass = tang <= 1e-10 && law <= 1e-10 && modulus <= 1e-10;
    report(
        2,
        "tangentiality and translation law, 100 random (xhat, k, h)",
        pass,
        format!("|x.E| {tang:.1e}, law {law:.1e}, modulus {modulus:.1e}; all <= 1e-10"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_far_field_asymptotics() {
    let start = Instant::now();
    let k = 9.5;
    let x = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
    let xhat = UnitVector3::normalize(x).unwrap();
    let x = *xhat.as_array();
    let src = sources::s1();
    let einf = lib_vec(far_field(&src, &medium(), &xhat, k).unwrap());
    let residual = |r: f64| {
        let e = near_field_oracle(shapes("S1")[0], &[r * x[0], r * x[1], r * x[2]], k);
        let lead = Complex64::from_polar(1.0 / (4.0 * PI * r), k * r);
        let d: [Complex64; 3] = std::array::from_fn(|i| e[i] - lead * einf[i]);
        norm3(&d)
    };
    let (r100, r200) = (residual(100.0), residual(200.0));
    let ratio = r200 / r100;
    // the library's quadrature near field agrees with the oracle
    let lib = lib_vec(emsrc::forward::near_field(&src, &medium(), &[100.0 * x[0], 100.0 * x[1], 100.0 * x[2]], k, Default::default()).unwrap());
    let oracle = near_field_oracle(shapes("S1")[0], &[100.0 * x[0], 100.0 * x[1], 100.0 * x[2]], k);
    let d: [Complex64; 3] = std::array::from_fn(|i| lib[i] - oracle[i]);
    let near_agree = norm3(&d) / norm3(&oracle);
    let elapsed = start.elapsed();
    let pass = (0.15..=0.35).contains(&ratio) && near_agree < 1e-10 && elapsed < Duration::from_secs(120);
    report(
        3,
        "near field approaches e^{ikR}/(4 pi R) E_inf at O(1/R^2)",
        pass,
        format!("residual(200)/residual(100) = {ratio:.4} in [0.15, 0.35]; lib near field rel dev {near_agree:.1e}; {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_energy_flux() {
    let (k, tau) = (9.5, c(0.1, 0.0));
    let expected = k * k * tau.norm_sqr() / (6.0 * PI);
    let d = DipoleConfig { z0: [2.0, 2.0, 0.0], tau, p: UnitVector3::normalize([1.0, -2.0, 0.5]).unwrap() };
    let f = energy_flux(|x| dipole_far_field(&d, x, k), &medium(), DEFAULT_FLUX_ORDER);
    let dipole_err = (f - expected).abs() / expected;
    let src = sources::s3();
    let moved = translated(&src, [2.5, -1.0, 3.0]);
    let f0 = energy_flux(|x| far_field(&src, &medium(), x, k).unwrap(), &medium(), DEFAULT_FLUX_ORDER);
    let f1 = energy_flux(|x| far_field(&moved, &medium(), x, k).unwrap(), &medium(), DEFAULT_FLUX_ORDER);
    let shift_err = (f1 - f0).abs() / f0;
    let pass = dipole_err <= 1e-6 && shift_err <= 1e-8;
    report(
        4,
        "dipole flux k^2|tau|^2/(6 pi) and translation-invariant flux",
        pass,
        format!("dipole rel err {dipole_err:.1e} <= 1e-6; shift rel err {shift_err:.1e} <= 1e-8"),
    );
    assert!(pass);
}

#[test]
fn criterion_05_counterexample_pair() {
    let frame = TangentFrame::for_direction(UnitVector3::E2);
    let wave = WaveGrid::default();
    let mut worst: f64 = 0.0;
    let mut smallest: f64 = f64::INFINITY;
    for e in [Projection::L, Projection::M] {
        let a = synth_phased(&sources::j1(), &medium(), &frame, &wave, e).unwrap();
        let b = synth_phased(&sources::j2(), &medium(), &frame, &wave, e).unwrap();
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).norm());
        }
    }
    // the pair differs elsewhere, so the equality is specific to (0, 1, 0)
    let other = UnitVector3::normalize([1.0, 1.0, 0.0]).unwrap();
    for &k in wave.values() {
        let a = far_field(&sources::j1(), &medium(), &other, k).unwrap();
        let b = far_field(&sources::j2(), &medium(), &other, k).unwrap();
        smallest = smallest.min((a - b).norm());
    }
    let pass = worst <= 1e-9 && smallest > 1e-3;
    report(
        5,
        "J1 and J2 share tangential far fields at xhat = (0, 1, 0)",
        pass,
        format!("max |e.(E1 - E2)| = {worst:.1e} <= 1e-9 over 30 k and e in {{l, m}}; differ by >= {smallest:.2e} at (1,1,0)/sqrt2"),
    );
    assert!(pass);
}

/// Shape regularity of a triangle: 4 sqrt(3) area / (sum of squared sides), 1 for equilateral.
fn regularity(p: &[Complex64; 3]) -> f64 {
    let area = 0.5 * ((p[1] - p[0]) * (p[2] - p[0]).conj()).im.abs();
    let s = (p[1] - p[0]).norm_sqr() + (p[2] - p[1]).norm_sqr() + (p[0] - p[2]).norm_sqr();
    4.0 * 3f64.sqrt() * area / s
}

#[test]
fn criterion_06_phase_retrieval_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 10_000 {
        // half the triples come from dipole strengths, half are arbitrary points
        let refs = if done % 2 == 0 {
            let taus: [Complex64; 3] = std::array::from_fn(|_| c(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)));
            let k = rng.random_range(9.5..=24.0);
            let z0: [f64; 3] = std::array::from_fn(|_| rng.random_range(-5.0..5.0));
            let xhat = UnitVector3::normalize(random_unit(&mut rng)).unwrap();
            match reference_points(k, &z0, &xhat, taus) {
                Ok(r) => r,
                Err(_) => continue,
            }
        } else {
            let pts: [Complex64; 3] = std::array::from_fn(|_| c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)));
            match ReferenceTriple::new(pts) {
                Ok(r) => r,
                Err(_) => continue,
            }
        };
        if regularity(refs.points()) < 0.05 {
            continue;
        }
        let z = c(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let r = refs.points().map(|p| (z - p).norm());
        worst = worst.max((retrieve_point(&refs, r).unwrap() - z).norm());
        done += 1;
    }
    let pass = worst <= 1e-9;
    report(6, "phase retrieval round trip, 10^4 random (z, triple)", pass, format!("max |z_hat - z| = {worst:.2e} <= 1e-9"));
    assert!(pass);
}

#[test]
fn criterion_07_phase_retrieval_stability() {
    // realistic data: S1 over the 20-direction fan and the full wave grid,
    // reference strengths 0.1, -0.1, 0.1i at z0 = (2, 2, 0)
    let wave = WaveGrid::default();
    let taus = [c(0.1, 0.0), c(-0.1, 0.0), c(0.0, 0.1)];
    let z0 = [2.0, 2.0, 0.0];
    let mut cases = Vec::new();
    for xhat in direction_fan(Plane::Xy, 20) {
        let frame = TangentFrame::for_direction(xhat);
        let truth = synth_phased(&sources::s1(), &medium(), &frame, &wave, Projection::M).unwrap();
        for (&k, &z) in wave.values().iter().zip(&truth) {
            cases.push((reference_points(k, &z0, &xhat, taus).unwrap(), z));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut median = |eps: f64| {
        let mut errs = Vec::new();
        for _ in 0..4 {
            for (refs, z) in &cases {
                let r = refs.points().map(|p| (z - p).norm() + eps * rng.random_range(-1.0..1.0));
                errs.push((retrieve_point(refs, r).unwrap() - z).norm());
            }
        }
        errs.sort_by(|a, b| a.total_cmp(b));
        errs[errs.len() / 2]
    };
    let (m3, m2) = (median(1e-3), median(1e-2));
    let ratio = m2 / m3;
    let c_fit = 0.5 * (m3 / 1e-3 + m2 / 1e-2);
    let pass = (8.0..=12.0).contains(&ratio) && m3 <= c_fit * 1e-3 * 1.25 && m2 <= c_fit * 1e-2 * 1.25;
    report(
        7,
        "phase retrieval error grows linearly in the data error",
        pass,
        format!("median(1e-3) = {m3:.3e}, median(1e-2) = {m2:.3e}, ratio {ratio:.2} in [8, 12], fitted c = {c_fit:.2}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_scheme_equivalence() {
    let wave = WaveGrid::default();
    let plane = SamplingPlaneGrid::standard(Plane::Xy);
    let taus = [c(0.1, 0.0), c(-0.1, 0.0), c(0.0, 0.1)];
    let mut worst: f64 = 0.0;
    for xhat in direction_fan(Plane::Xy, 20) {
        let frame = TangentFrame::for_direction(xhat);
        let values = synth_phased(&sources::s1(), &medium(), &frame, &wave, Projection::M).unwrap();
        let one = scheme_one(&PhasedSeries { xhat, projection: Projection::M, wave: wave.clone(), values }, &plane).unwrap();
        let d = synth_phaseless(&sources::s1(), &medium(), &frame, &wave, [2.0, 2.0, 0.0], &taus).unwrap();
        let three = scheme_three(&d, &plane).unwrap();
        let max = one.values.iter().copied().fold(0.0, f64::max);
        let diff = one.values.iter().zip(&three.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff / max);
    }
    let pass = worst <= 1e-8;
    report(8, "noise-free scheme three grid equals scheme one grid (S1, 20 directions)", pass, format!("max rel diff {worst:.1e} <= 1e-8"));
    assert!(pass);
}

#[test]
fn criterion_09_scheme_two_symmetries() {
    let wave = WaveGrid::default();
    let plane = SamplingPlaneGrid::standard(Plane::Xy);
    let z0 = [2.0, 2.0, 0.0];
    let (nu, nv) = (plane.nu(), plane.nv());
    // (2 z0 - z) on the lattice [-2, 6]^2, h = 0.05: index i -> 160 - i
    let mirror = |i: usize| 2 * 80 - i;
    let (mut sym, mut shift, mut peak) = (0.0f64, 0.0f64, 0.0f64);
    for xhat in [UnitVector3::E1, UnitVector3::E2] {
        let frame = TangentFrame::for_direction(xhat);
        let d = synth_phaseless(&sources::s1(), &medium(), &frame, &wave, z0, &[c(0.0, 0.0), c(0.1, 0.0)]).unwrap();
        let g = scheme_two(&d, &plane).unwrap();
        peak = peak.max(g.values.iter().copied().fold(0.0, f64::max));
        for j in 0..nv {
            for i in 0..nu {
                sym = sym.max((g.value_at(i, j) - g.value_at(mirror(i), mirror(j))).abs());
                // moves orthogonal to xhat: along v for e1, along u for e2
                let base = if xhat == UnitVector3::E1 { g.value_at(i, 0) } else { g.value_at(0, j) };
                shift = shift.max((g.value_at(i, j) - base).abs());
            }
        }
    }
    let pass = sym <= 1e-12 && shift <= 1e-12;
    report(
        9,
        "scheme two point symmetry about z0 and in-plane invariance",
        pass,
        format!("|I(2z0-z) - I(z)| = {sym:.1e}, |I(z+d) - I(z)| = {shift:.1e}, both <= 1e-12 (peak {peak:.3})"),
    );
    assert!(pass);
}

/// Top-10% level set of a grid as plane coordinates.
fn ridge_points(g: &IndicatorGrid) -> Vec<(f64, f64)> {
    let max = g.values.iter().copied().fold(0.0, f64::max);
    let nu = g.grid.nu();
    g.values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= 0.9 * max)
        .map(|(n, _)| (g.grid.u_range[0] + (n % nu) as f64 * g.grid.spacing, g.grid.v_range[0] + (n / nu) as f64 * g.grid.spacing))
        .collect()
}

fn bbox_center(pts: &[(f64, f64)]) -> (f64, f64) {
    let (mut ul, mut uh, mut vl, mut vh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(u, v) in pts {
        ul = ul.min(u);
        uh = uh.max(u);
        vl = vl.min(v);
        vh = vh.max(v);
    }
    (0.5 * (ul + uh), 0.5 * (vl + vh))
}

/// Unit disk dilated by 0.3 in each coordinate (Minkowski sum with a square):
/// pull each coordinate 0.3 towards the origin and test the disk.
fn in_dilated_disk(u: f64, v: f64) -> bool {
    let pull = |x: f64| x.signum() * (x.abs() - 0.3).max(0.0);
    pull(u).hypot(pull(v)) <= 1.0 + LATTICE_EPS
}

/// Lattice coordinates `u_min + i h` carry rounding of a few ulps.
const LATTICE_EPS: f64 = 1e-9;

#[test]
fn criterion_10_strip_localization() {
    let mut details = Vec::new();
    let mut pass = true;
    for (label, inside, center) in [
        ("S1", Box::new(|u: f64, v: f64| [u, v].iter().all(|x| (-0.3 - LATTICE_EPS..=1.3 + LATTICE_EPS).contains(x))) as Box<dyn Fn(f64, f64) -> bool>, (0.5, 0.5)),
        ("S2", Box::new(|u: f64, v: f64| in_dilated_disk(u, v)), (0.0, 0.0)),
    ] {
        let start = Instant::now();
        let cfg = ExperimentConfig::new(SourceChoice::Label(label.into()), emsrc::dsm::Scheme::One);
        assert_eq!(cfg.directions, 20);
        assert_eq!(cfg.noise, NoiseModel::relative(0.1, 0));
        let r = reconstruct(&cfg).unwrap();
        let elapsed = start.elapsed();
        let ridge = ridge_points(&r.grid);
        let outside = ridge.iter().filter(|&&(u, v)| !inside(u, v)).count();
        let (cu, cv) = bbox_center(&ridge);
        let radius = ridge.iter().map(|&(u, v)| (u - center.0).hypot(v - center.1)).fold(0.0, f64::max);
        let off = ((cu - center.0).powi(2) + (cv - center.1).powi(2)).sqrt();
        let ok = !ridge.is_empty() && outside == 0 && off <= 0.2 && elapsed < Duration::from_secs(300);
        pass &= ok;
        details.push(format!(
            "{label}: {} ridge pts, {outside} outside dilated support, max radius {radius:.3}, center ({cu:.3}, {cv:.3}) off by {off:.3} <= 0.2, {elapsed:.2?}",
            ridge.len()
        ));
    }
    report(10, "20-direction superposed ridge localizes S1 and S2", pass, details.join("; "));
    assert!(pass);
}

#[test]
fn criterion_11_mirror_artifact() {
    // xhat0 = (0, 1, 0): the true strip is 0 <= y <= 1 and the mirror strip is
    // 2 z0.y - [0, 1]. Peaks are taken inside the standard window [-2, 6]^2.
    let wave = WaveGrid::default();
    let plane = SamplingPlaneGrid::standard(Plane::Xy);
    let frame = TangentFrame::for_direction(UnitVector3::E2);
    let noise = NoiseModel::relative(0.1, 11);
    let ratio = |z0: [f64; 3]| {
        let d = synth_phaseless(&sources::s1(), &medium(), &frame, &wave, z0, &[c(0.0, 0.0), c(0.1, 0.0)])
            .unwrap()
            .with_noise(noise)
            .unwrap();
        let g = scheme_two(&d, &plane).unwrap();
        let nu = plane.nu();
        let (mut true_peak, mut other_peak) = (0.0f64, 0.0f64);
        for (n, &v) in g.values.iter().enumerate() {
            let y = plane.v_range[0] + (n / nu) as f64 * plane.spacing;
            if (-0.3..=1.3).contains(&y) {
                true_peak = true_peak.max(v);
            } else {
                other_peak = other_peak.max(v);
            }
        }
        other_peak / true_peak
    };
    let near = ratio([0.5, 2.0, 0.0]);
    let far = ratio([4.0, 4.0, 0.0]);
    let pass = far < near;
    report(
        11,
        "scheme two mirror ridge fades as z0 recedes",
        pass,
        format!("mirror/true peak ratio {near:.3} at z0 = (0.5, 2, 0) > {far:.3} at z0 = (4, 4, 0)"),
    );
    assert!(pass);
}

#[test]
fn criterion_12_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(SourceChoice::Label("S3".into()), emsrc::dsm::Scheme::Three);
    cfg.name = "det".into();
    cfg.directions = 4;
    cfg.noise = NoiseModel::relative(0.1, 12345);
    let mut same = true;
    let mut files = 0;
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        simulate(&cfg, &out).unwrap();
        run_experiment(&cfg, &out).unwrap();
    }
    let mut names: Vec<_> = std::fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in &names {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        same &= a == b;
        files += 1;
    }
    // a different seed changes the data
    let mut other = cfg.clone();
    other.noise.seed = 54321;
    let out = dir.path().join("c");
    simulate(&other, &out).unwrap();
    let changed = std::fs::read(out.join("det_d00.csv")).unwrap() != std::fs::read(dir.path().join("a/det_d00.csv")).unwrap();
    let pass = same && files >= 12 && changed;
    report(12, "fixed seed gives bit-identical datasets and grids", pass, format!("{files} files compared, identical = {same}; other seed differs = {changed}"));
    assert!(pass);
}

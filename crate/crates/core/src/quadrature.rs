//! Tensor-product quadrature over primitive supports and the unit sphere.
//!
//! Gauss-Legendre nodes come from `gauss-quad`; this module only maps them
//! onto cuboids (composite, per-axis panels), balls (spherical coordinates),
//! and S^2.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::model::{Point3, PrimitiveSupport};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct LegendreRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LegendreRule {
    pub fn new(order: usize) -> Self {
        let order = NonZeroUsize::new(order.max(1)).unwrap();
        let rule = GaussLegendre::new(order);
        let (nodes, weights) = rule.as_node_weight_pairs().iter().copied().unzip();
        LegendreRule { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[a, b]`, split into `panels` equal pieces.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.order());
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
        out
    }
}

/// Quadrature nodes `(y, weight)` covering a primitive support.
///
/// Cuboid axes are split into panels no longer than `max_panel`; balls use
/// Gauss-Legendre in `r` and `cos(theta)` and the periodic trapezoid rule in
/// `phi`.
pub fn support_nodes(support: &PrimitiveSupport, rule: &LegendreRule, max_panel: f64) -> Vec<(Point3, f64)> {
    match *support {
        PrimitiveSupport::Cuboid { lower, upper } => {
            let axes: Vec<Vec<(f64, f64)>> = (0..3)
                .map(|i| {
                    let len = upper[i] - lower[i];
                    let panels = (len / max_panel).ceil().max(1.0) as usize;
                    rule.composite(lower[i], upper[i], panels)
                })
                .collect();
            let mut out = Vec::with_capacity(axes[0].len() * axes[1].len() * axes[2].len());
            for &(x, wx) in &axes[0] {
                for &(y, wy) in &axes[1] {
                    for &(z, wz) in &axes[2] {
                        out.push(([x, y, z], wx * wy * wz));
                    }
                }
            }
            out
        }
        PrimitiveSupport::Ball { center, radius } => {
            let panels = (radius / max_panel).ceil().max(1.0) as usize;
            let radial = rule.composite(0.0, radius, panels);
            let polar = rule.composite(-1.0, 1.0, 2 * panels);
            let n_phi = 2 * polar.len();
            let dphi = 2.0 * PI / n_phi as f64;
            let mut out = Vec::with_capacity(radial.len() * polar.len() * n_phi);
            for &(r, wr) in &radial {
                for &(t, wt) in &polar {
                    let s = (1.0 - t * t).max(0.0).sqrt();
                    for j in 0..n_phi {
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

/// Product rule on S^2: Gauss-Legendre in `cos(theta)` times `2 * order`
/// uniform azimuths. Returns `(direction, weight)`; weights sum to `4 pi`.
pub fn sphere_nodes(order: usize) -> Vec<(Point3, f64)> {
    let rule = LegendreRule::new(order);
    let n_phi = 2 * order;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut out = Vec::with_capacity(order * n_phi);
    for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for j in 0..n_phi {
            let (sp, cp) = (j as f64 * dphi).sin_cos();
            out.push(([s * cp, s * sp, *t], wt * dphi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_volume_and_moment() {
        let rule = LegendreRule::new(4);
        let cube = PrimitiveSupport::cuboid([0.0, -1.0, 2.0], [1.0, 1.0, 5.0]).unwrap();
        let nodes = support_nodes(&cube, &rule, 0.7);
        let vol: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((vol - 6.0).abs() < 1e-12);
        let m: f64 = nodes.iter().map(|(y, w)| y[2] * y[2] * w).sum();
        // int_2^5 z^2 dz * 2 = (125 - 8) / 3 * 2
        assert!((m - 78.0).abs() < 1e-11);
    }

    #[test]
    fn ball_volume() {
        let rule = LegendreRule::new(8);
        let ball = PrimitiveSupport::ball([1.0, 2.0, 3.0], 1.5).unwrap();
        let vol: f64 = support_nodes(&ball, &rule, 2.0).iter().map(|(_, w)| w).sum();
        assert!((vol - 4.0 / 3.0 * PI * 1.5f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn sphere_area_and_sin_squared() {
        let nodes = sphere_nodes(8);
        let area: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let s2: f64 = nodes.iter().map(|(x, w)| (1.0 - x[2] * x[2]) * w).sum();
        assert!((s2 - 8.0 * PI / 3.0).abs() < 1e-12);
    }
}

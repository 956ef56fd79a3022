//! Named test sources: the five supports S1-S5 with the density
//! `J = (3/2, 3 sqrt(3)/2, 3/2)`, and the pair J1/J2 whose far fields agree
//! at `xhat = e2` although their strips differ.

use crate::error::{Error, Result};
use crate::model::{Density, PrimitiveSupport, SourcePiece, SourceSpec};

/// Constant density used by all named supports.
pub const SOURCE_DENSITY: [f64; 3] = [1.5, 1.5 * SQRT_3, 1.5];

const SQRT_3: f64 = 1.732_050_807_568_877_2;

fn cuboid(lower: [f64; 3], upper: [f64; 3]) -> SourcePiece {
    SourcePiece::uniform(PrimitiveSupport::Cuboid { lower, upper }, SOURCE_DENSITY)
}

fn ball(center: [f64; 3], radius: f64) -> SourcePiece {
    SourcePiece::uniform(PrimitiveSupport::Ball { center, radius }, SOURCE_DENSITY)
}

fn build(pieces: Vec<SourcePiece>) -> SourceSpec {
    SourceSpec::new(pieces).expect("named sources are valid")
}

/// Cube `[0,1]^3`.
pub fn s1() -> SourceSpec {
    build(vec![cuboid([0.0; 3], [1.0; 3])])
}

/// Unit ball at the origin.
pub fn s2() -> SourceSpec {
    build(vec![ball([0.0; 3], 1.0)])
}

/// Cube `[0,1]^3` and the unit ball at `(3, 3, 0)`.
pub fn s3() -> SourceSpec {
    build(vec![cuboid([0.0; 3], [1.0; 3]), ball([3.0, 3.0, 0.0], 1.0)])
}

/// L-shaped slab `[0,4]x[0,4]x[0,1]` minus `[1,4]x[1,4]x[0,1]`.
pub fn s4() -> SourceSpec {
    build(vec![
        cuboid([0.0, 0.0, 0.0], [1.0, 4.0, 1.0]),
        cuboid([1.0, 0.0, 0.0], [4.0, 1.0, 1.0]),
    ])
}

/// Cuboid `[0,2]x[0,1]x[0,1]`.
pub fn s5() -> SourceSpec {
    build(vec![cuboid([0.0; 3], [2.0, 1.0, 1.0])])
}

// (1,0,0) on the two slabs 1 <= |y2| < 2 of the box (-1,1)x(-2,2)x(-1,1).
fn outer_slabs() -> Vec<SourcePiece> {
    let unit_x = |lower, upper| SourcePiece {
        support: PrimitiveSupport::Cuboid { lower, upper },
        density: [Density::constant(1.0), Density::ZERO, Density::ZERO],
    };
    vec![unit_x([-1.0, -2.0, -1.0], [1.0, -1.0, 1.0]), unit_x([-1.0, 1.0, -1.0], [1.0, 2.0, 1.0])]
}

/// Outer slabs plus `(y1, 0, 0)` on the cube `(-1,1)^3`.
pub fn j1() -> SourceSpec {
    let mut pieces = outer_slabs();
    pieces.push(SourcePiece {
        support: PrimitiveSupport::Cuboid { lower: [-1.0; 3], upper: [1.0; 3] },
        density: [Density::linear(0, 1.0), Density::ZERO, Density::ZERO],
    });
    build(pieces)
}

/// Outer slabs only.
pub fn j2() -> SourceSpec {
    build(outer_slabs())
}

/// Looks up a source by label (`S1`..`S5`, `J1`, `J2`; case-insensitive).
pub fn by_label(label: &str) -> Result<SourceSpec> {
    match label.to_ascii_uppercase().as_str() {
        "S1" => Ok(s1()),
        "S2" => Ok(s2()),
        "S3" => Ok(s3()),
        "S4" => Ok(s4()),
        "S5" => Ok(s5()),
        "J1" => Ok(j1()),
        "J2" => Ok(j2()),
        other => Err(Error::InvalidArgument(format!("unknown source label '{other}'"))),
    }
}

pub const LABELS: [&str; 7] = ["S1", "S2", "S3", "S4", "S5", "J1", "J2"];

//! Exact geometry of the shapes behind the dimension formulas.

pub mod area;
pub mod cube;
pub mod family;
pub mod json;
pub mod sample;
pub mod shape;
pub mod verify;

pub use cube::{auto_signs, inscribed_cube, inscribed_cube_at, CornerCertificate, CubeConstants, InscribedCube};
pub use family::{
    annulus_family, ball, decide, membership_scan, quasi_annulus, rect_annulus, rect_annulus_decompose, shifted_rect,
    RationalPoint, ShapeMeta, ShapeRecord, Sign,
};
pub use shape::{Norm, Shape};

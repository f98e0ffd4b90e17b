//! Floating-point projective geometry for the pentagram map and its inverse.
//!
//! The crate answers one question numerically: which convex polygons stay
//! convex forever under the inverse pentagram map `S`? The answer is the
//! codimension-two set where `d_P = Σ d_i / A_i` vanishes, equivalently where
//! Glick's operator `G_P` is affine, and for pentagons where the inscribed and
//! circumscribed conics are concentric.
//!
//! Modules, bottom up:
//! - [`projective`]: homogeneous points, lines and maps.
//! - [`polygon`]: polygons, convexity, duality, normalization and sampling.
//! - [`maps`]: the pentagram map `D`, its inverse `S`, orbits and horizons.
//! - [`glick`]: `d_P`, Glick's operator and its interior fixed point.
//! - [`conics`]: inscribed and circumscribed conics of pentagons, `I` and `R_P`.
//! - [`variety`]: Newton projection onto `d_P = 0`.
//! - [`io`]: the polygon JSON file format.

pub mod conics;
pub mod error;
pub mod glick;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod polygon;
pub mod projective;
pub mod variety;

pub use error::{Error, Result};
pub use polygon::{AffinePolygon, Polygon};
pub use projective::{join, meet, HomLine, HomPoint, ProjMap, DEFAULT_TOL};

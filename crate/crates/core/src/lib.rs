//! Geometry of the Lorentzian Berger sphere and its constant-angle surfaces.

pub mod ambient;
pub mod error;
pub mod export;
pub mod helix;
pub mod isometry;

pub use ambient::{AmbientPoint, BergerMetric, BergerParams, Causality, TangentVector};
pub use error::{Error, Result};
pub use helix::{HelixConstants, HelixSpec, Preset, PresetKind, Surface, SurfaceJet};
pub use isometry::{IsometryFamily, NamedCurve, ScalarCurve};
pub mod verify;

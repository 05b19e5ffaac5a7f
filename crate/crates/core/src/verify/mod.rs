//! Numerical certification of helix surfaces.

pub mod checks;
pub mod curve;
pub mod normal;
pub mod report;
pub mod shape;

pub use curve::{curve_metrics, measure_curve, CurveMetrics, MeasuredCurve};
pub use checks::{check_helix_conditions, check_ode, check_products, PRODUCT_NAMES};
pub use normal::{angle_function, hyperbolic_angle, unit_normal, NormalData};
pub use shape::{check_mu_pde, check_normal_phase, gauss_curvature, shape_operator, FdOptions, MuPde, ShapeData};
pub use report::{full_report, full_report_with, grid_report, spec_checks, CheckRecord, GridSpec, ResidualReport, Tolerances};

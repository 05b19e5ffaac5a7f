use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters outside the admissible set of the surface family.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("point is not on the unit 3-sphere (|x| = {norm})")]
    NotOnSphere { norm: f64 },

    #[error("vector is not tangent to the 3-sphere (|<v,p>| = {defect})")]
    NotTangent { defect: f64 },

    #[error("tangent vectors are attached to different base points")]
    BasePointMismatch,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation error: {0}")]
    Validation(String),

    /// The candidate normal is (numerically) null: the surface changes causal type.
    #[error("degenerate normal: |-N1^2 + N2^2 + N3^2| relative size {measure:e}")]
    DegenerateNormal { measure: f64 },

    /// F_u and F_v are (numerically) parallel.
    #[error("parametrization is not an immersion here: rank defect {measure:e}")]
    Rank { measure: f64 },

    #[error("v = {v} lies outside the family domain [{lo}, {hi}]")]
    OutsideDomain { v: f64, lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for the per-point failures that `full_report` records instead of aborting.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateNormal { .. } | Error::Rank { .. })
    }
}

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors must have at least one entry")]
    EmptyVector,

    #[error("non-finite value in input")]
    NonFinite,

    #[error("zero vector has no polar decomposition")]
    ZeroVector,

    #[error("matrix is not Hermitian (relative defect {0:e})")]
    NotHermitian(f64),

    #[error("bilinear-degenerate point: ⟨ζ,ζ⟩ = 0")]
    BilinearDegenerate,

    #[error("Levi closed form singular on CR^N")]
    OnCrN,

    #[error("point is not on CR^N (residual {0:e})")]
    NotOnCrN(f64),

    #[error("point lies in the degeneracy set A_Φ")]
    InDegeneracySet,

    #[error("map must avoid the origin")]
    MapHitsOrigin,

    #[error("map must avoid the origin (hit at sample point {point:?})")]
    MapHitsOriginAt { point: alloc::vec::Vec<f64> },

    #[error("pivot coordinate a_m vanishes")]
    PivotVanishes,

    #[error("|β| must be smaller than |a|")]
    OutsideLTilde,

    #[error("frame is not tangent to M (imaginary part {0:e})")]
    FrameNotTangent(f64),

    #[error("identity ill-conditioned: roots too close (gap {0:e})")]
    IllConditioned(f64),

    #[error("too close to discriminant locus (|Δ| = {0:e})")]
    NearDiscriminantLocus(f64),

    #[error("density singular or outside K interior")]
    DensitySingular,

    #[error("point outside the chart domain")]
    OutsideChart,

    #[error("point outside K")]
    OutsideK,

    #[error("Joukovski inverse requires s >= 1 (got {0})")]
    JoukovskiDomain(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("method {method} cannot integrate set {set}")]
    IncompatibleMethod {
        method: &'static str,
        set: &'static str,
    },

    #[error("non-finite evaluation at stencil point")]
    NonFiniteEvaluation,

    #[error("eigensolver did not converge")]
    NoConvergence,
}

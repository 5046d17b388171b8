//! Rank-one projections as points of projective space, their incidence and
//! orthogonality relations, semilinear reconstruction, and frame-function
//! fitting.

mod gleason;
mod point;
mod semilinear;

pub use gleason::{frame_sample_from_density, gleason_fit, tomography_family, FrameSample};
pub use point::{
    collinear, cosp_check, is_projection, orthogonal, projector_of, transition_probability,
    ProjectivePoint, Projection,
};
pub use semilinear::{
    optimal_wigner_reconstruct, semilinear_reconstruct, OptimalWignerFit, ProbeConfig,
    SemilinearFit, SemilinearOperator,
};

pub(crate) use semilinear::induced_operator;

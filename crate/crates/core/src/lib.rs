//! Miniversal deformations of pairs of skew-symmetric complex matrices under
//! congruence `(A, B) ↦ (SᵀAS, SᵀBS)`.
//!
//! * [`canonical`] — canonical summands `H_n(λ)`, `K_n`, `L_n` and pairs.
//! * [`pattern`] — the `(0,*)` deformation pattern of a canonical structure.
//! * [`tangent`] — tangent map of the orbit and the direct-sum test.
//! * [`reduction`] — iterative reduction of nearby pairs to pattern form.

pub mod canonical;
pub mod corpus;
pub mod error;
pub mod json;
pub mod linalg;
pub mod matrix;
pub mod pattern;
pub mod reduction;
pub mod scalar;
pub mod tangent;

pub use canonical::{
    direct_sum, make_block, make_f, make_g, make_jordan, BlockKind, CanonicalBlock,
    CanonicalStructure, SkewPair,
};
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use pattern::{
    assemble, assemble_with, codimension, diag_block, offdiag_block, render_shape, LambdaMatch,
    PairSlot, PatternBlockShape, ShapeTag, StarMask, StarParam, StarPattern,
};
pub use reduction::{
    correction_step, reduce, schedule_for, IterationSchedule, Linearization, ReduceOptions,
    ReductionTrace,
};
pub use scalar::{Backend, GaussRational, Scalar};
pub use tangent::{
    project_to_pattern, tangent_map, verify_direct_sum, verify_pairwise, DecompositionReport,
    PairwiseReport, Projection, Projector, TangentMap,
};

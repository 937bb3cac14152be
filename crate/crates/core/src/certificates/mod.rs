//! Checkers that turn moments and comparison solutions into verdicts about
//! loss of smoothness.

pub mod bounds;
pub mod phantom;
pub mod theorem1;
pub mod theorem3;

pub use bounds::{
    theorem2_certificate, theorem4_certificate, BoundKind, BoundViolation, DensityBoundTrack, DensityObservation,
    Theorem2Certificate, Theorem4Certificate,
};
pub use phantom::{phantom_check, PhantomWitness};
pub use theorem1::{check_theorem1, default_delta1, geometric_times, RadiusEntry, Theorem1Report, Theorem1Verdict};
pub use theorem3::{theorem3_verdict, NBranch, Theorem3Verdict};

/// Relative margin by which an observed density must cross a bound before a
/// violation is reported.
pub const DETECTOR_TOLERANCE: f64 = 1e-6;

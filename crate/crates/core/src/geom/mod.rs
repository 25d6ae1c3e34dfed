//! Geometry of constraints: Ad-invariance classification, the Finsler
//! fundamental tensor and geodesic-vector checks.

mod geodesic;
mod invariance;
mod tensor;

pub use geodesic::{
    gate_geodesic_check, gate_geodesic_sweep, geodesic_vector_check, is_generic, sample_generic,
    survey_geodesic_vectors, GeodesicReport, GeodesicSurvey, GENERIC_GAP,
};
pub use invariance::{check_ad_invariance, check_ad_invariance_with, InvarianceReport, TableCell};
pub use tensor::{fundamental_tensor, fundamental_tensor_estimate, TensorEstimate, TensorProbe};

//! Stick-breaking weight sequences for every supported prior, plus moments
//! and regularity checks of the iid stick laws.

mod conditions;
mod densities;
mod family;
mod latent;
mod model;
mod tabulated;

pub use conditions::{check_clt_conditions, ConditionReport, ConditionStatus, RatioEvidence};
pub use densities::{
    conditional_density_nggp, conditional_density_nigp, ln_conditional_density_nggp, ln_conditional_density_nigp,
    nggp_series_density,
};
pub(crate) use family::open01;
pub use family::{iid_moment, sample_iid_sequence, IidFamily, IidLaw, RhoFn, TableSource, TabulatedDensity};
pub use model::{
    sample_weight_sequence, sample_weight_sequence_with, ModelEcho, SamplerMode, Truncation, WeightModel, WeightSequence,
};
pub use tabulated::{InverseCdfSampler, StickTable};

//! Evidential c-means clustering with arbitrary differentiable semi-metrics.
//!
//! The crate is `no_std` and needs only `alloc`. Enable the `std` feature to
//! route transcendental functions through the standard library.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod categorical;
pub mod datasets;
pub mod ecm;
pub mod error;
pub mod eval;
pub mod focal;
pub mod linalg;
pub mod mass;
mod math;
pub mod metric;
pub mod object;
pub mod rng;
pub mod softdtw;
pub mod softecm;
pub mod sweep;

pub use categorical::{encode_categorical, Attribute, CategoricalSchema};
pub use datasets::{DataKind, Dataset};
pub use ecm::{ecm_fit, ecm_fit_from, ecm_objective, meta_centroid, EcmConfig, EcmResult};
pub use error::{Error, Result};
pub use eval::{matched_accuracy, rand_index};
pub use focal::{
    hard_assign, normalized_specificity, parse_focal_label, pignistic, CredalPartition,
    FocalFamily, FocalSet, Pignistic,
};
pub use mass::{MassUpdate, MassWeights};
pub use metric::{clamp_distance, SemiMetric, DISTANCE_FLOOR};
pub use object::{DataObject, Prototype};
pub use softecm::{
    fit, fit_best_of, fit_from, objective_terms, prototype_gradient, soft_objective, update_masses,
    update_prototypes, FitResult, ObjectiveTerms, PrototypeSet, SoftEcmConfig,
};
pub use sweep::{sweep, SweepCell, SweepResult};

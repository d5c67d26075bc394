//! Barrier classification toolkit for event-grouped news headlines.
//!
//! The crate covers the full pipeline: loading and event-grouping articles,
//! labeling each event against five spreading barriers from publisher and
//! country metadata, rule-based headline sentiment, commonsense-inference
//! augmentation, TF-IDF featurization, from-scratch classifiers, and
//! stratified F1 evaluation.
//!
//! Data-parallel stages (scoring, transforming, annotating, predicting) run
//! on rayon when the `parallel` feature is enabled (the default) and fall back
//! to plain iterators otherwise. See [`exec::Execution`].

pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod features;
pub mod inference;
pub mod labeler;
pub mod models;
pub mod pipeline;
pub mod profiles;
pub mod sentiment;
pub mod synth;

pub use error::{Error, Result};

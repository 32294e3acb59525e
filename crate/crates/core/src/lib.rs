//! Builds an indicator knowledge graph from scholarly qualification corpora and
//! runs two analyses on top of it: tiered correlation matrices among citation
//! and altmetric indicators, and automatic prediction of qualification outcomes
//! from indicator features.
//!
//! The crate is organised as a pipeline:
//!
//! * [`model`] — shared domain types (profiles, publications, indicator values)
//!   and their validation; no I/O.
//! * [`ingest`] — parses record streams, bibliographic lines and outcome files
//!   into profiles.
//! * [`enrich`] — resolves DOIs and attaches citation counts and altmetrics via
//!   pluggable providers, with on-disk caching and an offline fixture mode.
//! * [`graph`] — materialises enriched profiles as a triple store with
//!   deterministic N-Triples export.
//! * [`sampling`] — representative-field selection from per-field
//!   application/publication counts.
//! * [`stats`] — indicator vectors, Pearson correlation with significance, and
//!   per-field/averaged correlation matrices.
//! * [`scholar`] — author-level indicators (h-index and altmetric h-indexes)
//!   and per-candidate feature extraction.
//! * [`classify`] — Gaussian Naive Bayes over twelve feature configurations,
//!   evaluated by repeated stratified cross-validation.
//! * [`synth`] — deterministic synthetic corpus generation for demos and tests.

pub mod classify;
pub mod enrich;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod sampling;
pub mod scholar;
pub mod stats;
pub mod synth;

//! Emotion-gradient paraphrasing toolkit: emotion taxonomy and transition
//! graph, task-prefix codec, classifier and generator gateways, corpus
//! preparation, evaluation metrics and the evaluation harness.

pub mod classifier;
pub mod corpus;
pub mod eval;
pub mod gateway;
pub mod generator;
pub mod graph;
pub mod metrics;
pub mod prefix;
pub mod taxonomy;

//! Runtime for the landing-coach experiment: session service, HTTP API,
//! file formats, dataset export and the analysis tooling around them.

pub mod config;
pub mod export;
pub mod formats;
pub mod frames;
pub mod http;
pub mod provider;
pub mod replay;
pub mod report;
pub mod service;
pub mod session;
pub mod store;
pub mod synth;

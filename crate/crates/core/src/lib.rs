//! Adaptive user interface engine driven by task models.
//!
//! The crate derives abstract user interfaces from a W3C-style [task model](task_model),
//! learns the Longest Repeating Subsequences of the user's actions and a k-th order Markov
//! model over them ([`sequence`]), searches for the best fractional layouts
//! ([`aui`]), computes widget enablement from temporal operators ([`dialog`]), and drives
//! adaptation across interactive sessions ([`engine`]). [`service`] exposes the engine over
//! HTTP/JSON, and [`bench`] measures the combinatorics of layout generation.

pub mod action_set;
pub mod aui;
pub mod bench;
pub mod cli;
pub mod dialog;
pub mod engine;
pub mod fixtures;
pub mod sequence;
pub mod service;
pub mod task_model;

pub use action_set::{ActionId, ActionSet};

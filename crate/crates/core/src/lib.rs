//! Threat evaluation and weapon assignment for ground-based air defence.
//!
//! Each decision cycle pairs threats with defended assets by weighted
//! deferred acceptance, then pairs them with weapon systems whose sectors
//! they will cross. `sim` drives the cycle over time and adjudicates shots;
//! `baseline_greedy` is the one-pass comparison policy.

pub mod baseline_greedy;
pub mod catalog;
pub mod compare;
pub mod config;
pub mod diag;
pub mod fuzzy;
pub mod gen;
pub mod geometry;
pub mod ids;
pub mod matching;
pub mod scenario;
pub mod sim;
pub mod threat_eval;
pub mod weapon_assign;

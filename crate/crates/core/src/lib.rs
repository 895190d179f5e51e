//! Exact verification of Keller-map frameworks: labelled trees of curves at
//! infinity, their intersection forms, Picard maps between them and the
//! Belyi maps they induce.

pub mod arith;
pub mod belyi;
pub mod format;
pub mod intersection;
pub mod picard;
pub mod report;
pub mod surface;
pub mod verify;

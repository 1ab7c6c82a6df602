//! Runs every code block of the mdbook guide as a doctest.
//!
//! mdbook renders `book/` on its own, but it does not execute the snippets;
//! including each chapter as module documentation makes `cargo test --doc`
//! compile and run them against the real `trkal` crate, so the book cannot
//! drift from the library. One module per chapter keeps failures
//! attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/getting-started.md")]
pub mod getting_started {}

#[doc = include_str!("../../../book/src/beltrami-modes.md")]
pub mod beltrami_modes {}

#[doc = include_str!("../../../book/src/slow-modulations.md")]
pub mod slow_modulations {}

#[doc = include_str!("../../../book/src/streamlines.md")]
pub mod streamlines {}

#[doc = include_str!("../../../book/src/torus-topology.md")]
pub mod torus_topology {}

#[doc = include_str!("../../../book/src/phase-instability.md")]
pub mod phase_instability {}

#[doc = include_str!("../../../book/src/late-time.md")]
pub mod late_time {}

#[doc = include_str!("../../../book/src/vorticity-strings.md")]
pub mod vorticity_strings {}

#[doc = include_str!("../../../book/src/spectral-validator.md")]
pub mod spectral_validator {}

#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}

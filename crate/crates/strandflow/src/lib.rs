//! Circulating currents in parallel-stranded electric-machine windings.
//!
//! When a winding turn is built from many thin strands connected in
//! parallel, the strands bound slightly different slot flux, so on top of
//! the share of the bundle current each strand carries, a circulating
//! current flows between strands. This crate models one phase of such a
//! winding with a per-harmonic impedance network: the active (in-slot)
//! part carries resistance and position-dependent mutual inductances,
//! while the end-winding part contributes a per-strand series impedance
//! scaled by the end-winding ratio `alpha_w` — the ratio of total
//! conductor length to active length. For every supply harmonic the crate
//! solves a bordered linear system that enforces the common strand
//! voltage and the bundle-current constraint simultaneously, then splits
//! the resistive losses into the unavoidable share term and the
//! circulating excess. Sweeping `alpha_w` exposes the design law the
//! model predicts: the circulating excess falls off as `1 / alpha_w^2`.
//!
//! # Modules
//!
//! - [`winding`] — geometry, materials, strand maps, validation
//! - [`assembly`] — slot matrices, phase-level impedance, bordered systems
//! - [`flux`] — vector-potential spectra, synthetic fields, flux files
//! - [`solver`] — per-harmonic solves, current decomposition, detection
//! - [`losses`] — loss split, RMS bookkeeping, waveform reconstruction
//! - [`sweep`] — end-winding-ratio sweeps, line fits, verdicts
//! - [`scenario`] — TOML scenario files and the end-to-end pipeline
//! - [`presets`] — ready-made machines for examples and tests
//! - [`report`] — deterministic CSV/text output
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run -p strandflow --example synthetic_solve    # end-to-end solve of the demo machine
//! cargo run -p strandflow --example alpha_sweep        # inverse-square law across alpha_w
//! cargo run -p strandflow --example closed_form_inverse # analytic vs LU solve, uniform impedance
//! cargo run -p strandflow --example no_load            # circulation with zero bundle current
//! cargo run -p strandflow --example flux_file          # round-trip an external flux spectrum
//! cargo run -p strandflow --example waveforms          # time-domain reconstruction and RMS checks
//! cargo run -p strandflow --example write_scenario     # generate and re-load a scenario file
//! ```
//!
//! The `strandflow` binary wraps the same pipeline as a CLI with `solve`,
//! `sweep`, and `check` subcommands.
//!
//! # Quick start
//!
//! ```
//! use strandflow::presets::demo_machine;
//! use strandflow::scenario::solve_scenario;
//!
//! let out = solve_scenario(&demo_machine()).unwrap();
//! assert!(out.report.p_cc >= out.report.p_cc0);
//! println!("circulating excess: {} W", out.report.p_cc - out.report.p_cc0);
//! ```

pub mod assembly;
pub mod error;
pub mod flux;
pub mod losses;
pub mod presets;
pub mod report;
pub mod scenario;
pub mod solver;
pub mod sweep;
pub mod winding;

pub use assembly::Regime;
pub use error::{Error, Result};
pub use scenario::{solve_scenario, sweep_scenario, Scenario};
pub use winding::AlphaW;

/// Validation predicate for physical constants: strictly positive and
/// finite, with NaN failing (a plain `> 0.0` rewrite would let NaN pass
/// a negated check).
pub(crate) fn is_positive_finite(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

//! Self-calibration of planar TDOA sensor networks.
//!
//! Receivers at unknown positions hear transmitters at unknown positions
//! whose clocks carry unknown offsets; the measurements are pseudoranges
//! `f_ij = ‖r_i − s_j‖ + o_j`. This crate recovers positions and offsets
//! jointly for the 9-receiver/3-transmitter and 6-receiver/4-transmitter
//! configurations:
//!
//! * [`scene`] — synthetic scenes, measurement synthesis, gauge fixing,
//!   error metrics.
//! * [`compaction`] — double-differenced squared-distance matrices, their
//!   rank-2 structure and 3×3 minors.
//! * [`polyform`] — polynomial arithmetic over real, complex, rational and
//!   prime-field coefficients; assembly of the equation systems.
//! * [`groebner`] — finite-field Gröbner bases and standard-monomial counts
//!   (the algebraic complexity of each formulation).
//! * [`solver`] — homotopy-continuation solving of the square systems.
//! * [`upgrade`] — from algebraic unknowns (H, b, offsets) to positions.
//! * [`refine`] — Levenberg-Marquardt refinement of a full scene.
//! * [`pipeline`] — end-to-end calibration and the experiment harness.

pub mod compaction;
pub mod groebner;
pub mod polyform;
pub mod refine;
pub mod scene;
pub mod solver;
pub mod upgrade;

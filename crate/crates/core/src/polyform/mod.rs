//! Sparse multivariate polynomials over pluggable coefficient domains and
//! the builders that assemble the calibration equation systems.

pub mod build;
pub mod poly;
pub mod ring;

pub use build::{
    build_6r4s_system, build_6r4s_variant, build_abc_equations, build_formulation_system,
    parse_system_text, pseudorange_square, rational_to_prime, rational_to_real, real_to_complex,
    var_names, BuildError, EquationTag, Formulation, PolySystem, UnknownVector, NUM_SHAPE_VARS,
};
pub use poly::{Mono, MonomialOrder, MultiPoly, MAX_VARS};
pub use ring::{is_prime_u64, CoeffRing, Complexes, PrimeField, Rationals, Reals};

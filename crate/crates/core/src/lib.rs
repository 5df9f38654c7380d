//! Exact arithmetic on the smooth locus of semistable degenerate elliptic
//! fibers.
//!
//! The smooth part of a cycle of m rational curves carries the group
//! structure of C* x Z/m; this crate models it over cyclotomic fields with
//! no floating point anywhere:
//!
//! - [`cyclotomic`]: elements of Q(zeta_N) in canonical reduced form,
//! - [`fiber`]: points, the group law, divisors, and coordinate twists,
//! - [`function_group`]: component-wise rational functions, their divisor
//!   map, and a constructive principality test,
//! - [`weil`]: the limit torsion pairing, computed both from its definition
//!   and from the closed form,
//! - [`modular_surface`]: cusp tables, component and root-of-unity numbers,
//!   and their equidistribution fractions for the universal family over the
//!   prime-level modular curve.

pub mod cyclotomic;
pub mod fiber;
pub mod function_group;
pub mod modular_surface;
pub mod weil;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub use cyclotomic::{CycloElem, CycloError};
pub use fiber::{Divisor, FiberError, FiberPoint, FiberShape};
pub use function_group::{
    abel_check, abel_witness, AbelError, FuncError, KElement, KError, RationalFunc,
};
pub use modular_surface::{
    component_number, cusps, duality_check, involution, m_fraction, m_fraction_closed,
    quotient_component_numbers, r_fraction, r_fraction_closed, r_fraction_small_prime,
    root_of_unity_number, weil_cross_check, z_matrix, CrossCheckReport, CuspData, DualityReport,
    FiberKind, GpClass, QuotientEntry, SurfaceError,
};
pub use weil::{
    w_star, weil_bilinearity_suite, weil_definitional, weil_formula, PairingEngine, SuiteReport,
    TorsionLabel, WeilError,
};

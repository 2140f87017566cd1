//! Exact arithmetic for Clifford-cyclotomic gate groups.
//!
//! The crate provides, entirely in exact rational arithmetic:
//!
//! * the cyclotomic fields Q(zeta_n) with membership tests for
//!   R_n = Z[zeta_n, 1/2] and its totally real subring ([`cyclotomic`]);
//! * rigorous real-embedding enclosures, total positivity, and certified
//!   squareness decisions in the real subfield ([`embed`], [`squares`]);
//! * 2x2 unitary and 3x3 orthogonal matrix groups over those rings, the
//!   adjoint map SU2 -> SO3 and its extension to U2 ([`matrix`]);
//! * the square-class obstruction to lifting SO3 elements back to SU2,
//!   with constructive lifts when the obstruction vanishes ([`selmer`]);
//! * Dedekind zeta values at -1 via generalized Bernoulli numbers, prime
//!   splitting data above 2, and Euler-Poincare characteristics of the
//!   arithmetic groups involved ([`zeta`]);
//! * gate words in H and T_n, exact synthesis over R_8, and the amalgam
//!   normal form for the rotation group generated by an order-4 and an
//!   order-n rotation about perpendicular axes ([`words`], [`amalgam`]).

pub mod amalgam;
pub mod cyclotomic;
pub mod embed;
pub mod error;
pub mod matrix;
pub mod selmer;
pub mod squares;
pub mod words;
pub mod zeta;

mod poly;

pub use cyclotomic::{cyclotomic_poly, euler_phi, CycElem, Rat};
pub use error::{Error, Result};
pub use matrix::{OMat, PauliVec, UMat};
pub use selmer::{PhiProfile, SelmerTable, SquareClass};
pub use squares::{SquareVerdict, SquarenessCertificate};
pub use words::{GateWord, HzWord};
pub use zeta::ChiTable;

//! Twisted Alexander polynomials of knots under finite-group regular
//! representations, the TAV-group classifier, and TAV-order search with
//! machine-checkable certificates.
//!
//! The polynomial layer is generic over the coefficient ring through
//! [`coeff::Coeff`]; the concrete instantiations used throughout the
//! toolkit are exported as type aliases below.

pub mod coeff;
pub mod word;
pub mod perm;
pub mod group;
pub mod coset;
pub mod knot;
pub mod catalog;
pub mod cert;
pub mod epi;
pub mod fox;
pub mod search;
pub mod det;
pub mod laurent;

/// Integer Laurent polynomial — the value ring of every invariant.
pub type IntLaurent = laurent::LaurentPoly<num_bigint::BigInt>;
/// Matrix over integer Laurent polynomials (Alexander/Wada matrices).
pub type IntPolyMatrix = laurent::PolyMatrix<num_bigint::BigInt>;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

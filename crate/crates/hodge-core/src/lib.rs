//! Exact computation of linear Hodge integrals, psi-class intersection
//! numbers, and simple Hurwitz numbers.
//!
//! The centerpiece is a polynomial recursion: for each stable (g, l) there
//! is a polynomial H_{g,l} in l variables whose expansion in the basis of
//! xi-products carries every linear Hodge integral
//! <tau_{n_1} ... tau_{n_l} lambda_j> of that genus and arity, and whose
//! values encode simple Hurwitz numbers through the ELSV formula. The
//! recursion is solved exactly over arbitrary-precision rationals.
//!
//! Everything the recursion produces is cross-checkable against
//! independent routes, all implemented here: direct monodromy enumeration
//! in symmetric groups ([`hurwitz::hurwitz_oracle`]), the cut-and-join
//! equation, the Witten-Kontsevich recursion for psi-classes
//! ([`dvv::PsiTable`]), the lambda_g factorization, and floating-point
//! series on the Lambert curve ([`lambert`]).

pub mod dvv;
pub mod error;
pub mod hurwitz;
pub mod lambert;
pub mod partition;
pub mod poly;
pub mod recursion;
pub mod scalar;
pub mod xi;

pub use error::{Error, Result};
pub use scalar::Rational;

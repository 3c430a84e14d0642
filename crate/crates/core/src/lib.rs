//! Mod-p solutions of A-hypergeometric systems and Hasse invariants of
//! families of exponential sums over finite fields.
//!
//! The crate is organized bottom-up:
//!
//! * [`lattice`]: semigroup membership, weights, minimal representations and
//!   the good / very good classification of lattice points relative to `A`.
//! * [`gfpoly`]: sparse polynomials over F_p in the parameters `lambda`.
//! * [`solutions`]: the polynomials `F_gamma`, `G_gamma` and the Euler and box
//!   operators that annihilate them.
//! * [`pweight`]: base-p digit decompositions, the sets `U_M`, and the
//!   decomposition of their p-weight minimizers into sequences of good points.
//! * [`hasse`]: Hasse invariants of toric and affine exponential sums.
//! * [`series`]: the characteristic-zero truncated series and its reduction.
//! * [`oracle`]: brute-force finite-field checks (point counts, Legendre curves).
//! * [`problem`] and [`corpus`]: input descriptions and the acceptance corpus.
//!
//! ```
//! use hasse_gkz::problem::ProblemSpec;
//! use hasse_gkz::hasse::hasse;
//!
//! // twisted Kloosterman sums over F_7 with e = 2
//! let spec = ProblemSpec::toric(7, 1, vec![vec![1], vec![-1]], vec![2]).unwrap();
//! let h = hasse(&spec).unwrap();
//! assert_eq!(h.h.to_string(), "3*l1^2");
//! assert_eq!(h.c, Some(2));
//! ```

pub mod corpus;
pub mod error;
pub mod gfpoly;
pub mod hasse;
pub mod lattice;
mod linalg;
pub mod modp;
pub mod oracle;
pub mod problem;
pub mod pweight;
pub mod series;
pub mod solutions;
mod vector;

pub use error::{Error, Result};
pub use gfpoly::GfPoly;
pub use lattice::ASet;
pub use vector::{ExponentVector, LatticeVector};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/solutions.md")]
    mod solutions {}
    #[doc = include_str!("../../../book/src/pweight.md")]
    mod pweight {}
    #[doc = include_str!("../../../book/src/hasse.md")]
    mod hasse {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

//! Exact jet computations for nilpotent singular points of polynomial vector
//! fields in three dimensions: center manifolds, monodromy on the center
//! manifold, Poincaré–Lyapunov style obstruction constants, normal forms and
//! a numerical return-map check.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assume;
pub mod cmanifold;
pub mod coef;
pub mod error;
pub mod linalg;
pub mod linops;
pub mod monodromy;
pub mod normalform;
pub mod numerics;
pub mod obstruction;
pub mod poly;
pub mod system;

pub use coef::{Coef, ParamMonomial, ParamPoly, Sign, Symbol};
pub use error::{Error, Result};
pub use poly::{Exps, Jet, Jet1, Jet2, Jet3, Poly1, Poly2, Poly3, SparsePoly};

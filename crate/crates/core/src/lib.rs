//! Numerical laboratory for mod-* convergence: renormalized characteristic
//! functions, the i.i.d. cumulant limit, the `g_{P,sigma}` density family and
//! two arithmetic mod-Cauchy ensembles (Dedekind sums over Farey pairs, and
//! Rademacher values of primitive hyperbolic classes in `PSL(2, Z)`).

pub mod charfn;
pub mod cumulants;
pub mod density;
pub mod error;
pub mod geodesic;
pub mod numeric;
pub mod specialfn;
pub mod vardi;

pub use error::{Error, Result};

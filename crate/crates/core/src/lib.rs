//! Finite k-linear categories, colax functors over finite index categories,
//! the Grothendieck construction, bounded homotopy categories of projectives,
//! and certified gluing of derived equivalences.

pub mod colax;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod format;
pub mod grothendieck;
pub mod homotopy;
pub mod fincat;
pub mod glue;
pub mod index;
pub mod local;
pub mod pseudo;
pub mod quiver;
pub mod report;
pub mod rng;
pub mod tilting;

pub use colax::{check_colax, ColaxFunctor, LeftTransformation, TwoMorphism};
pub use error::{Error, Result};
pub use field::{FieldSpec, LinearSolution, Matrix, Scalar};
pub use fincat::{compose_functors, Elem, FinKCat, KFunctor, NatTransf};
pub use grothendieck::{grothendieck, GrCategory};
pub use index::IndexCat;
pub use quiver::{build_category, Arrow, QuiverPresentation};
pub use report::Report;

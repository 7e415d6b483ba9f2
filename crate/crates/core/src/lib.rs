//! Numerical laboratory for Ulam stability of groups: quasi-representations
//! of finite and free groups, their defects and distances to genuine
//! representations, correction by averaging, induction, explicit
//! non-stability witnesses and a Fock-space deformation.

pub mod correct;
pub mod deformation;
pub mod error;
pub mod group;
pub mod experiment;
pub mod induction;
pub mod io;
pub mod linalg;
pub mod quasirep;
pub mod random;
pub mod reps;
pub mod witnesses;
pub mod word;

pub use error::{Error, Result};
pub use group::{CosetSystem, FiniteGroup, GroupHom, GroupSpec};
pub use linalg::{CMatrix, UnitaryMatrix};
pub use quasirep::{Domain, QuasiRep};
pub use word::{FreeWord, WordBall};

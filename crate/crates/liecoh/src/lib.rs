//! Exact graded cohomology of finite-window Lie algebras and superalgebras.
//!
//! The crate computes `H^k_g` of a graded Lie (super)algebra in the trivial
//! module over exact rationals or a prime field, either on the full cochain
//! complex or by splitting it into minimal subcomplexes (connected components
//! of the differential's incidence structure) and solving each block
//! independently.

pub mod algebra;
pub mod cli;
pub mod cochain;
pub mod engine;
pub mod field;
pub mod linalg;
pub mod report;
pub mod subcomplex;

pub use algebra::{make_algebra, parse_structure_constants, Algebra, AlgebraKind, AlgebraSpec};
pub use engine::{compute_split, compute_straightforward, grid_report, AlgebraSource, Mode};
pub use field::{FieldKind, PrimeField, Rationals};

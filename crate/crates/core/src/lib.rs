//! Computing with finite quasigroups and loops given by Cayley tables.
//!
//! The crate provides:
//!
//! - [`table`]: validated Latin-square tables with O(1) multiplication and
//!   division, plus loops (tables with a neutral element);
//! - [`laws`]: exhaustive checkers for the named identities (F-laws, the
//!   four Moufang identities, mediality and friends) with deterministic
//!   first counterexamples;
//! - [`structure`]: nuclei, Moufang centers, commutants, centers, M-sets,
//!   congruences, quotients, regular permutation pairs and isomorphism
//!   testing;
//! - [`forms`]: loop isotopes of F-quasigroups and their arithmetic forms
//!   `x*y = f(x) + e + g(y)`, with basepoint shifting and the round-trip
//!   between pointed F-quasigroups and forms;
//! - [`gen`]: exhaustive enumeration of small Latin squares and loops, a
//!   zoo of named example tables, direct products and seeded random forms.

pub mod forms;
pub mod gen;
pub mod laws;
pub mod perm;
pub mod structure;
pub mod table;

pub use laws::{LawId, LawReport, LawsError};
pub use perm::Permutation;
pub use structure::{Congruence, RegularFamily, RegularPair, StructureError, SubsetKind, SubsetReport};
pub use table::{CayleyTable, FiniteLoop, Side, TableError};

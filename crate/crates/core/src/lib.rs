//! Finite order theory for point-free connectivity: posets, complete
//! lattices with their connected elements, chainmails, the constructions
//! between them, and isomorph-free enumeration.

pub mod bitset;
pub mod budget;
pub mod canon;
pub mod category;
pub mod chainmail;
pub mod enumeration;
pub mod error;
pub mod interchange;
pub mod lattice;
pub mod poset;
pub mod sources;
pub mod verify;

pub use bitset::ElementSet;
pub use budget::Budget;
pub use canon::{canonical_code, canonical_form, is_isomorphic, CanonicalCode, CanonicalForm};
pub use category::{PosetMap, Role};
pub use chainmail::{as_chainmail, d_lattice, Chainmail, DLattice, Subchainmail, TotallyDisconnectedSet};
pub use enumeration::{EnumerationTask, Filter};
pub use error::{Error, Result};
pub use lattice::{as_complete_lattice, CompleteLattice, Condition, SeparatedSet};
pub use poset::{validate_poset, Poset, RelationMode};

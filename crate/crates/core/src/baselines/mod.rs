//! Classical derived horizontal fragmentation: predicate construction
//! (minterms) and affinity-based grouping, plus the satisfiability engine
//! both of them and query routing rely on.

mod ab;
mod implication;
mod pc;

pub use ab::{ab_fragments, AffinityMatrix};
pub use implication::{predicate_implication, satisfiable, Implication, Polarity, SignedPredicate};
pub use pc::{pc_fragments, Minterm, DEFAULT_PC_CAP};

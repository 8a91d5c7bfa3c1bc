//! First-quadrant spectral-sequence bookkeeping: `E_2` pages, constraint
//! propagation, duality and ordinary-parts checks on cohomology tables, and
//! cohomology of `Z_p^n`.

pub mod page;
pub mod propagate;
pub mod table;
pub mod torus;

pub use page::{Bound, E2Page, EntryValue, Op, Target};
pub use propagate::{ss_propagate, Contradiction, Fact, FactKind, Propagation, Rule};
pub use table::{duality_shift_check, k_candidates, ordinary_check, poincare_check, CohomologyTable, TableEntry};
pub use torus::{koszul_cohomology, torus_cohomology};

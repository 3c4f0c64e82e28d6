//! Kernel for the Catt and Catt_su type theories of weak ω-categories.
//!
//! Terms are checked, reduced to normal form, compared, and rehydrated back
//! into Catt. The [`frontend`] module reads `.catt` source files.

pub mod frontend;
pub mod pasting;
pub mod reduction;
pub mod rehydrate;
pub mod subst;
pub mod syntax;
pub mod typing;

pub use pasting::{check_pasting, DyckWord, PastingError, Peak, Sign};
pub use subst::SubstError;
pub use syntax::{Context, Entry, Name, Sub, Term, Type, Var};

//! Partial combinatory algebras with fuel-bounded application.

pub mod k1;
pub mod morphisms;
pub mod nat;
pub mod oracle;
pub mod parse;
pub mod pca;
pub mod s19;
pub mod strictify;
pub mod toolkit;

pub use nat::Nat;
pub use pca::{apply, eval_term, kleene_refines, laws_check, Element, Eval, Fuel, NoValue, Outcome, Pca, PcaRef, Term};

//! A canonically complete four-valued logic for attribute-based access
//! control.
//!
//! The crate covers the Belnap decision lattices ([`lattice`]), operator
//! tables and permutation synthesis ([`algebra`]), completeness checks for
//! operator sets ([`completeness`]), a compiler from decision tables to
//! normal-form formulas ([`nf_compiler`]), PTaCL4 policy evaluation
//! ([`policy`]) and text formats ([`interop`]).
//!
//! ```
//! use ptacl4::{compile, parse_table, Basis, Decision};
//!
//! let table = parse_table("a b -> out\n1 0 -> top\n").unwrap();
//! let f = compile(&table, Basis::ConfCyc);
//! assert_eq!(f.eval(&[Decision::Allow, Decision::Deny]).unwrap(), Decision::Conflict);
//! assert_eq!(f.eval(&[Decision::Deny, Decision::Deny]).unwrap(), Decision::Bottom);
//! ```

pub mod algebra;
pub mod completeness;
pub mod interop;
pub mod lattice;
pub mod nf_compiler;
pub mod policy;

pub use algebra::{GeneratorWord, OpRegistry, OpTable, Permutation};
pub use completeness::{analyze, CompletenessReport};
pub use interop::{
    combine_kand, emit_policy, emit_table, parse_policy, parse_request, parse_table, ParseError, XacmlDecision,
};
pub use lattice::{Decision, FiniteLattice};
pub use nf_compiler::{compile, Basis, DecisionTable, Formula};
pub use policy::{eval_policy, eval_policy_ind, DecisionSet, PolicyNode, Request, Strategy};

//! Stellar subdivision of simplicial complexes built from hereditarily finite
//! sets, weld-division maps between them, a constructive projective
//! amalgamation engine, and finite-stage approximations of the canonical
//! quotient of the resulting projective Fraïssé limit.

pub mod amalgam;
pub mod complex;
pub mod gen;
pub mod hfset;
pub mod limit;
pub mod seqcalc;
pub mod simap;

pub use amalgam::{amalgamate, coinitiality, main_lemma_certificate, AmalgamError, AmalgamationResult};
pub use complex::{Complex, ComplexError, Guardrails};
pub use hfset::{HfError, HfSet, Ur};
pub use limit::{build_tower, export_mesh, quotient_report, LimitError, RealizingAssignment, Schedule, Tower};
pub use seqcalc::{AdditiveFamily, DivSeq, Equivalence, SeqError};
pub use simap::{Classes, Grounded, IsoKind, MapError, MapExpr, SimplicialMap};

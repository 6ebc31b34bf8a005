//! Grounded simplicial maps and their provenance trees.

mod constructions;
mod expr;
mod iso;
mod map;

pub use constructions::{commut_i, commut_ii, org6, Org6Group};
pub use expr::{Classes, ExprJson, Kind, MapExpr};
pub use iso::{vertex_existence, IsoKind, VertexExistence};
pub use map::{Grounded, SimplicialMap, Violation};

use crate::complex::ComplexError;
use crate::hfset::{HfError, HfSet};
use crate::seqcalc::SeqError;

#[derive(Debug, thiserror::Error)]
pub enum MapError {
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("vertex {0} has no image or is not a domain vertex")]
    NotTotal(HfSet),
    #[error("image {image} of {vertex} is not a codomain vertex")]
    NotAVertex { vertex: HfSet, image: HfSet },
    #[error("apex {p} is not an element of {t}")]
    BadApex { p: HfSet, t: HfSet },
    #[error("{0} is already a vertex of the base complex")]
    VertexClash(HfSet),
    #[error("iota({s}) is missing or not an element of {s}")]
    BadIota { s: HfSet },
    #[error("domain of the left map differs from codomain of the right map")]
    DomainMismatch,
    #[error("side condition failed: {0}")]
    SideConditionFailed(String),
    #[error("assignment does not give a ground isomorphism: {0}")]
    IsoFailed(String),
    #[error("map is not grounded: {0}")]
    NotGrounded(Violation),
    #[error("map has no inverse in the expression language")]
    NotInvertible,
}

#[cfg(test)]
mod tests;

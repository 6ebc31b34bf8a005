use serde::{Deserialize, Serialize};

use super::{MapError, SimplicialMap};
use crate::complex::Complex;
use crate::hfset::HfSet;

/// The four families of combinatorial isomorphisms.
///
/// Type 1 and 2 are stated relative to a context complex `A`; their domain and
/// codomain are the subdivisions listed in [`IsoKind::ends`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum IsoKind {
    /// `α_{r,s,t}`: `t → s∪{t}`, `r∪{t} → t`.
    #[serde(rename = "1")]
    Type1 {
        #[serde(default)]
        r: Vec<HfSet>,
        #[serde(default)]
        s: Vec<HfSet>,
        t: HfSet,
    },
    /// `β_{s,t}`: `(s∖t)∪{t} → (t∖s)∪{s}`.
    #[serde(rename = "2")]
    Type2 { s: HfSet, t: HfSet },
    /// `x → {x}`.
    #[serde(rename = "3a")]
    Type3a { x: HfSet },
    /// `{x} → x`.
    #[serde(rename = "3b")]
    Type3b { x: HfSet },
}

fn set_of(items: &[HfSet]) -> Option<HfSet> {
    if items.is_empty() {
        None
    } else {
        Some(HfSet::from_elems(items.iter().cloned()).unwrap())
    }
}

fn plus(items: &[HfSet], x: &HfSet) -> HfSet {
    HfSet::from_elems(items.iter().cloned().chain(std::iter::once(x.clone()))).unwrap()
}

fn fail(msg: impl Into<String>) -> MapError {
    MapError::SideConditionFailed(msg.into())
}

impl IsoKind {
    /// The inverse isomorphism of the same family.
    pub fn inverse(&self) -> IsoKind {
        match self {
            IsoKind::Type1 { r, s, t } => IsoKind::Type1 {
                r: s.clone(),
                s: r.clone(),
                t: t.clone(),
            },
            IsoKind::Type2 { s, t } => IsoKind::Type2 { s: t.clone(), t: s.clone() },
            IsoKind::Type3a { x } => IsoKind::Type3b { x: x.clone() },
            IsoKind::Type3b { x } => IsoKind::Type3a { x: x.clone() },
        }
    }

    /// Checks the side conditions against the context.
    pub fn check(&self, ctx: &Complex) -> Result<(), MapError> {
        match self {
            IsoKind::Type1 { r, s, t } => {
                if t.is_atom() {
                    return Err(fail("t must be a set"));
                }
                for x in r.iter().chain(s) {
                    if !t.is_member(x) {
                        return Err(fail(format!("{x} is not an element of t={t}")));
                    }
                }
                if r.is_empty() && s.is_empty() {
                    return Err(fail("r ∪ s is empty"));
                }
                if let Some(x) = r.iter().find(|x| s.contains(x)) {
                    return Err(fail(format!("r and s share {x}")));
                }
                if ctx.is_vertex(t) {
                    return Err(fail(format!("t={t} is a vertex of the context")));
                }
                Ok(())
            }
            IsoKind::Type2 { s, t } => {
                if s.is_atom() || t.is_atom() {
                    return Err(fail("s and t must be sets"));
                }
                if t.is_member(s) {
                    return Err(fail("s ∈ t"));
                }
                if s.is_member(t) {
                    return Err(fail("t ∈ s"));
                }
                for v in [s, t] {
                    if ctx.is_vertex(v) {
                        return Err(fail(format!("{v} is a vertex of the context")));
                    }
                }
                Ok(())
            }
            IsoKind::Type3a { x } | IsoKind::Type3b { x } => {
                let sx = HfSet::singleton(x.clone());
                if ctx.is_vertex(&sx) {
                    return Err(fail(format!("{sx} is a vertex of the context")));
                }
                Ok(())
            }
        }
    }

    /// Domain and codomain over the context.
    pub fn ends(&self, ctx: &Complex) -> (Complex, Complex) {
        match self {
            IsoKind::Type1 { r, s, t } => {
                let rs: Vec<HfSet> = r.iter().chain(s).cloned().collect();
                let rs = set_of(&rs).expect("r ∪ s nonempty");
                let b1 = ctx.subdivide_seq(&[plus(r, t), rs.clone(), t.clone()]);
                let b2 = ctx.subdivide_seq(&[plus(s, t), rs, t.clone()]);
                (b1, b2)
            }
            IsoKind::Type2 { s, t } => {
                let (a, b) = type2_vertices(s, t);
                let b1 = ctx.subdivide_seq(&[a, s.clone(), t.clone()]);
                let b2 = ctx.subdivide_seq(&[b, t.clone(), s.clone()]);
                (b1, b2)
            }
            IsoKind::Type3a { x } => (ctx.clone(), ctx.subdivide(&HfSet::singleton(x.clone()))),
            IsoKind::Type3b { x } => (ctx.subdivide(&HfSet::singleton(x.clone())), ctx.clone()),
        }
    }

    /// The defining assignment.
    pub fn assignment(&self) -> Vec<(HfSet, HfSet)> {
        match self {
            IsoKind::Type1 { r, s, t } => vec![(t.clone(), plus(s, t)), (plus(r, t), t.clone())],
            IsoKind::Type2 { s, t } => {
                let (a, b) = type2_vertices(s, t);
                vec![(a, b)]
            }
            IsoKind::Type3a { x } => vec![(x.clone(), HfSet::singleton(x.clone()))],
            IsoKind::Type3b { x } => vec![(HfSet::singleton(x.clone()), x.clone())],
        }
    }

    /// Builds and verifies the isomorphism over `ctx`.
    pub fn evaluate(&self, ctx: &Complex) -> Result<SimplicialMap, MapError> {
        self.check(ctx)?;
        let (dom, cod) = self.ends(ctx);
        let map = SimplicialMap::from_assignment(dom, cod, &self.assignment())
            .map_err(|e| MapError::IsoFailed(e.to_string()))?;
        if !map.is_grounded_iso() {
            return Err(MapError::IsoFailed(format!("{self:?}")));
        }
        Ok(map)
    }
}

fn type2_vertices(s: &HfSet, t: &HfSet) -> (HfSet, HfSet) {
    (plus(&s.minus(t), t), plus(&t.minus(s), s))
}

/// Which of the special vertices of a typed isomorphism occur in its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VertexExistence {
    /// Type 1: `t`. Type 2: `(s∖t)∪{t}`. Type 3: `x`.
    pub first: bool,
    /// Type 1: `r∪{t}`. Always false for the other types.
    pub second: bool,
}

/// Predicts special-vertex occurrence from the context alone.
pub fn vertex_existence(kind: &IsoKind, ctx: &Complex) -> Result<VertexExistence, MapError> {
    kind.check(ctx)?;
    Ok(match kind {
        IsoKind::Type1 { r, s, t } => {
            let face = ctx.contains(t);
            VertexExistence {
                first: face && !r.is_empty(),
                second: face && !s.is_empty(),
            }
        }
        IsoKind::Type2 { s, t } => VertexExistence {
            first: ctx.contains(&s.union(t)) && !s.intersection(t).is_empty(),
            second: false,
        },
        IsoKind::Type3a { x } => VertexExistence {
            first: ctx.is_vertex(x),
            second: false,
        },
        IsoKind::Type3b { x } => VertexExistence {
            first: ctx.is_vertex(x),
            second: false,
        },
    })
}

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{IsoKind, MapError, SimplicialMap};
use crate::complex::{Complex, ComplexJson};
use crate::hfset::{HfSet, Ur};
use crate::seqcalc::AdditiveFamily;

/// Class membership derived from the shape of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classes {
    /// A composition of weld maps.
    pub weld: bool,
    /// A composition of neat welds.
    pub neat: bool,
    /// A weld-division map.
    pub division: bool,
    /// A pure weld-division map.
    pub pure: bool,
    /// A combinatorial isomorphism.
    pub iso: bool,
}

impl Classes {
    const NONE: Classes = Classes {
        weld: false,
        neat: false,
        division: false,
        pure: false,
        iso: false,
    };
    const ALL: Classes = Classes {
        weld: true,
        neat: true,
        division: true,
        pure: true,
        iso: true,
    };

    fn and(self, o: Classes) -> Classes {
        Classes {
            weld: self.weld && o.weld,
            neat: self.neat && o.neat,
            division: self.division && o.division,
            pure: self.pure && o.pure,
            iso: self.iso && o.iso,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Kind {
    Identity,
    Weld { p: HfSet, t: HfSet },
    PiIota { family: AdditiveFamily, iota: BTreeMap<HfSet, HfSet> },
    Iso { kind: IsoKind, context: Complex },
    Divide { child: MapExpr, s: HfSet },
    DivideFamily { child: MapExpr, family: AdditiveFamily },
    Compose { left: MapExpr, right: MapExpr },
    /// A vertex function with no recorded provenance.
    Raw,
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    map: SimplicialMap,
    classes: Classes,
}

/// An evaluated map expression.
#[derive(Clone)]
pub struct MapExpr(Arc<Node>);

impl fmt::Debug for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl MapExpr {
    fn node(kind: Kind, map: SimplicialMap, classes: Classes) -> MapExpr {
        MapExpr(Arc::new(Node { kind, map, classes }))
    }

    pub fn identity(a: &Complex) -> MapExpr {
        MapExpr::node(Kind::Identity, SimplicialMap::identity(a), Classes::ALL)
    }

    /// `π^A_{p,t}: tA → A`, sending `t` to `p`.
    pub fn weld(a: &Complex, p: &HfSet, t: &HfSet) -> Result<MapExpr, MapError> {
        if t.is_atom() || !t.is_member(p) {
            return Err(MapError::BadApex { p: p.clone(), t: t.clone() });
        }
        if a.is_vertex(t) {
            return Err(MapError::VertexClash(t.clone()));
        }
        let dom = a.subdivide(t);
        let vmap = dom
            .vertices()
            .iter()
            .map(|v| (v.clone(), if v == t { p.clone() } else { v.clone() }))
            .collect();
        let map = SimplicialMap::new_unchecked(dom, a.clone(), vmap);
        let face = a.contains(t);
        let maximal = face && !a.faces().iter().any(|u| u != t && t.is_subset(u));
        let classes = Classes {
            weld: true,
            neat: !face || maximal,
            division: true,
            pure: true,
            iso: !face || t.len() == 1,
        };
        Ok(MapExpr::node(Kind::Weld { p: p.clone(), t: t.clone() }, map, classes))
    }

    /// `π_ι: SA → A`, sending each member `s` to `ι(s) ∈ s`.
    pub fn pi_iota(a: &Complex, family: &AdditiveFamily, iota: &BTreeMap<HfSet, HfSet>) -> Result<MapExpr, MapError> {
        let family = AdditiveFamily::new(family.members().iter().cloned(), a)?;
        let mut iota_fixed = BTreeMap::new();
        for s in family.members() {
            match iota.get(s) {
                Some(v) if s.is_member(v) => {
                    iota_fixed.insert(s.clone(), v.clone());
                }
                _ => return Err(MapError::BadIota { s: s.clone() }),
            }
        }
        let dom = crate::seqcalc::divide_by_family(a, &family);
        let vmap = dom
            .vertices()
            .iter()
            .map(|v| (v.clone(), iota_fixed.get(v).cloned().unwrap_or_else(|| v.clone())))
            .collect();
        let map = SimplicialMap::new_unchecked(dom, a.clone(), vmap);
        let classes = Classes {
            weld: true,
            neat: family.is_upward_closed(a),
            division: true,
            pure: true,
            iso: family.members().iter().all(|s| s.len() == 1),
        };
        Ok(MapExpr::node(
            Kind::PiIota {
                family,
                iota: iota_fixed,
            },
            map,
            classes,
        ))
    }

    /// `π_ι` with `ι(s)` the least element of `s` in canonical order.
    pub fn pi_iota_default(a: &Complex, family: &AdditiveFamily) -> Result<MapExpr, MapError> {
        MapExpr::pi_iota(a, family, &default_iota(family))
    }

    /// `π_{p,T}`: every member of `T` goes to `p`.
    pub fn pi_pt(a: &Complex, p: &HfSet, family: &AdditiveFamily) -> Result<MapExpr, MapError> {
        let iota = family.members().iter().map(|s| (s.clone(), p.clone())).collect();
        MapExpr::pi_iota(a, family, &iota)
    }

    pub fn typed_iso(kind: IsoKind, context: &Complex) -> Result<MapExpr, MapError> {
        let map = kind.evaluate(context)?;
        let (weld, neat) = match &kind {
            IsoKind::Type3b { x } => (true, !context.is_vertex(x) || isolated(context, x)),
            _ => (false, false),
        };
        let classes = Classes {
            weld,
            neat,
            ..Classes::ALL
        };
        Ok(MapExpr::node(
            Kind::Iso {
                kind,
                context: context.clone(),
            },
            map,
            classes,
        ))
    }

    /// A vertex function with no provenance; only grounded maps are accepted.
    pub fn raw(map: SimplicialMap) -> Result<MapExpr, MapError> {
        if let super::Grounded::Violation(v) = map.check_grounded() {
            return Err(MapError::NotGrounded(v));
        }
        let classes = Classes {
            division: map.is_grounded_iso(),
            ..Classes::NONE
        };
        Ok(MapExpr::node(Kind::Raw, map, classes))
    }

    /// `s·self`.
    pub fn divide(&self, s: &HfSet) -> MapExpr {
        let child = self.map();
        if !child.cod().contains(s) {
            return MapExpr::node(
                Kind::Divide {
                    child: self.clone(),
                    s: s.clone(),
                },
                child.clone(),
                self.classes(),
            );
        }
        let u = child.unique_cover();
        let pure_step = s.iter().all(|v| u.contains(v));
        let c = self.classes();
        let classes = Classes {
            weld: false,
            neat: false,
            division: c.division,
            pure: c.pure && pure_step,
            iso: c.iso,
        };
        MapExpr::node(
            Kind::Divide {
                child: self.clone(),
                s: s.clone(),
            },
            child.divide(s),
            classes,
        )
    }

    /// Iterated division by the entries of a sequence, rightmost first.
    pub fn divide_seq(&self, seq: &[HfSet]) -> MapExpr {
        seq.iter().rev().fold(self.clone(), |f, s| f.divide(s))
    }

    /// `S·self` along the canonical enumeration.
    pub fn divide_family(&self, family: &AdditiveFamily) -> Result<MapExpr, MapError> {
        let family = AdditiveFamily::new(family.members().iter().cloned(), self.map().cod())?;
        let mut f = self.map().clone();
        let mut all_pure = true;
        let mut changed = false;
        for s in family.enumeration().iter().rev() {
            if f.cod().contains(s) {
                let u = f.unique_cover();
                all_pure &= s.iter().all(|v| u.contains(v));
                changed = true;
            }
            f = f.divide(s);
        }
        let c = self.classes();
        let classes = if changed {
            Classes {
                weld: false,
                neat: false,
                division: c.division,
                pure: c.pure && all_pure,
                iso: c.iso,
            }
        } else {
            c
        };
        Ok(MapExpr::node(
            Kind::DivideFamily {
                child: self.clone(),
                family,
            },
            f,
            classes,
        ))
    }

    /// `self ∘ right`.
    pub fn compose(&self, right: &MapExpr) -> Result<MapExpr, MapError> {
        let map = self.map().compose(right.map())?;
        let classes = self.classes().and(right.classes());
        Ok(MapExpr::node(
            Kind::Compose {
                left: self.clone(),
                right: right.clone(),
            },
            map,
            classes,
        ))
    }

    /// Composes a chain listed outermost first: `fs[0] ∘ fs[1] ∘ ⋯`.
    pub fn compose_all(fs: &[MapExpr]) -> Result<MapExpr, MapError> {
        let mut it = fs.iter().rev();
        let mut acc = it.next().expect("nonempty chain").clone();
        for f in it {
            acc = f.compose(&acc)?;
        }
        Ok(acc)
    }

    /// A structural inverse for combinatorial isomorphisms and grounded raw isomorphisms.
    pub fn inverse(&self) -> Result<MapExpr, MapError> {
        match &self.0.kind {
            Kind::Identity => Ok(self.clone()),
            Kind::Iso { kind, context } => MapExpr::typed_iso(kind.inverse(), context),
            Kind::Weld { p, t } => {
                let base = self.map().cod();
                if !base.contains(t) {
                    Ok(self.clone())
                } else if t.len() == 1 {
                    MapExpr::typed_iso(IsoKind::Type3a { x: p.clone() }, base)
                } else {
                    Err(MapError::NotInvertible)
                }
            }
            Kind::PiIota { .. } | Kind::Raw => {
                let inv = self.map().inverse().ok_or(MapError::NotInvertible)?;
                if !inv.is_grounded_iso() {
                    return Err(MapError::NotInvertible);
                }
                MapExpr::raw(inv)
            }
            Kind::Divide { child, s } => {
                let inv = child.inverse()?;
                if !child.map().cod().contains(s) {
                    return Ok(inv);
                }
                let pre = child.map().preimage(s);
                let t = pre.into_iter().next().ok_or(MapError::NotInvertible)?;
                Ok(inv.divide(&t))
            }
            Kind::DivideFamily { child, family } => {
                let inv = child.inverse()?;
                let pre = child.map().preimage_family(family);
                inv.divide_family(&pre)
            }
            Kind::Compose { left, right } => right.inverse()?.compose(&left.inverse()?),
        }
    }

    pub fn map(&self) -> &SimplicialMap {
        &self.0.map
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn classes(&self) -> Classes {
        self.0.classes
    }

    pub fn dom(&self) -> &Complex {
        self.0.map.dom()
    }

    pub fn cod(&self) -> &Complex {
        self.0.map.cod()
    }

    /// For π_ι leaves, the weld factors along the canonical enumeration, outermost first.
    pub fn expand_welds(&self) -> Result<Vec<MapExpr>, MapError> {
        match &self.0.kind {
            Kind::PiIota { family, iota } => {
                let order = family.enumeration();
                let base = self.cod();
                let mut out = Vec::new();
                for (i, s) in order.iter().enumerate() {
                    let ctx = base.subdivide_seq(&order[i + 1..]);
                    out.push(MapExpr::weld(&ctx, &iota[s], s)?);
                }
                out.reverse();
                Ok(out)
            }
            Kind::Compose { left, right } => {
                let mut v = left.expand_welds()?;
                v.extend(right.expand_welds()?);
                Ok(v)
            }
            Kind::Weld { .. } => Ok(vec![self.clone()]),
            Kind::Identity => Ok(vec![]),
            Kind::Iso {
                kind: IsoKind::Type3b { x },
                context,
            } => Ok(vec![MapExpr::weld(context, x, &HfSet::singleton(x.clone()))?]),
            Kind::Divide { child, s } if !child.cod().contains(s) => child.expand_welds(),
            _ => Err(MapError::SideConditionFailed("not a weld composition".into())),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match &self.0.kind {
            Kind::Divide { child, .. } | Kind::DivideFamily { child, .. } => 1 + child.size(),
            Kind::Compose { left, right } => 1 + left.size() + right.size(),
            _ => 1,
        }
    }

    pub fn to_json(&self) -> ExprJson {
        let base = |c: &Complex| BaseJson::Faces(c.to_json());
        match &self.0.kind {
            Kind::Identity => ExprJson::Identity { complex: base(self.dom()) },
            Kind::Weld { p, t } => ExprJson::Weld {
                base: base(self.cod()),
                p: p.clone(),
                t: t.clone(),
            },
            Kind::PiIota { family, iota } => ExprJson::PiIota {
                base: base(self.cod()),
                family: family.enumeration(),
                iota: Some(iota.iter().map(|(a, b)| (a.clone(), b.clone())).collect()),
            },
            Kind::Iso { kind, context } => ExprJson::Iso {
                context: base(context),
                kind: kind.clone(),
            },
            Kind::Divide { child, s } => ExprJson::Divide {
                map: Box::new(child.to_json()),
                by: s.clone(),
            },
            Kind::DivideFamily { child, family } => ExprJson::DivideFamily {
                map: Box::new(child.to_json()),
                by: family.enumeration(),
            },
            Kind::Compose { left, right } => ExprJson::Compose {
                left: Box::new(left.to_json()),
                right: Box::new(right.to_json()),
            },
            Kind::Raw => ExprJson::Raw {
                domain: base(self.dom()),
                codomain: base(self.cod()),
                assignment: self.map().moved(),
            },
        }
    }
}

fn isolated(a: &Complex, x: &HfSet) -> bool {
    !a.faces().iter().any(|u| u.len() > 1 && u.is_member(x))
}

pub(crate) fn default_iota(family: &AdditiveFamily) -> BTreeMap<HfSet, HfSet> {
    family
        .members()
        .iter()
        .map(|s| (s.clone(), s.elems()[0].clone()))
        .collect()
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Identity => write!(f, "id"),
            Kind::Weld { p, t } => write!(f, "π[{p},{t}]"),
            Kind::PiIota { family, .. } => {
                write!(f, "π_ι[")?;
                for (i, s) in family.enumeration().iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
            Kind::Iso { kind, .. } => match kind {
                IsoKind::Type1 { r, s, t } => write!(f, "α[{r:?},{s:?},{t}]"),
                IsoKind::Type2 { s, t } => write!(f, "β[{s},{t}]"),
                IsoKind::Type3a { x } => write!(f, "δ[{x}→{{{x}}}]"),
                IsoKind::Type3b { x } => write!(f, "δ[{{{x}}}→{x}]"),
            },
            Kind::Divide { child, s } => write!(f, "{s}·({child})"),
            Kind::DivideFamily { child, family } => write!(f, "S{}·({child})", family.len()),
            Kind::Compose { left, right } => write!(f, "{left} ∘ {right}"),
            Kind::Raw => write!(f, "raw"),
        }
    }
}

/// A base complex in map files: explicit faces, or a sequence of divisions of
/// the full simplex on the urelements.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseJson {
    Faces(ComplexJson),
    Seq {
        urelements: Vec<String>,
        #[serde(default)]
        seq: Vec<HfSet>,
    },
}

impl BaseJson {
    pub fn into_complex(self) -> Result<Complex, MapError> {
        match self {
            BaseJson::Faces(c) => Ok(c.into_complex()?),
            BaseJson::Seq { urelements, seq } => {
                let ur = Ur::new(&urelements)?;
                for s in &seq {
                    ur.check(s)?;
                }
                Ok(Complex::full(&ur).subdivide_seq(&seq))
            }
        }
    }
}

/// Wire format of a map expression.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ExprJson {
    Identity {
        complex: BaseJson,
    },
    Weld {
        base: BaseJson,
        p: HfSet,
        t: HfSet,
    },
    PiIota {
        base: BaseJson,
        family: Vec<HfSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        iota: Option<Vec<(HfSet, HfSet)>>,
    },
    Iso {
        context: BaseJson,
        kind: IsoKind,
    },
    Divide {
        map: Box<ExprJson>,
        by: HfSet,
    },
    DivideFamily {
        map: Box<ExprJson>,
        by: Vec<HfSet>,
    },
    Compose {
        left: Box<ExprJson>,
        right: Box<ExprJson>,
    },
    Raw {
        domain: BaseJson,
        codomain: BaseJson,
        assignment: Vec<(HfSet, HfSet)>,
    },
}

impl ExprJson {
    pub fn build(self) -> Result<MapExpr, MapError> {
        match self {
            ExprJson::Identity { complex } => Ok(MapExpr::identity(&complex.into_complex()?)),
            ExprJson::Weld { base, p, t } => MapExpr::weld(&base.into_complex()?, &p, &t),
            ExprJson::PiIota { base, family, iota } => {
                let a = base.into_complex()?;
                let fam = AdditiveFamily::new(family, &a)?;
                match iota {
                    Some(pairs) => MapExpr::pi_iota(&a, &fam, &pairs.into_iter().collect()),
                    None => MapExpr::pi_iota_default(&a, &fam),
                }
            }
            ExprJson::Iso { context, kind } => MapExpr::typed_iso(kind, &context.into_complex()?),
            ExprJson::Divide { map, by } => Ok(map.build()?.divide(&by)),
            ExprJson::DivideFamily { map, by } => {
                let f = map.build()?;
                let fam = AdditiveFamily::new(by, f.cod())?;
                f.divide_family(&fam)
            }
            ExprJson::Compose { left, right } => left.build()?.compose(&right.build()?),
            ExprJson::Raw {
                domain,
                codomain,
                assignment,
            } => {
                let map = SimplicialMap::from_assignment(domain.into_complex()?, codomain.into_complex()?, &assignment)?;
                MapExpr::raw(map)
            }
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use super::MapError;
use crate::complex::Complex;
use crate::hfset::HfSet;
use crate::seqcalc::{divide_by_family, AdditiveFamily};

/// A vertex function between two complexes.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialMap {
    dom: Complex,
    cod: Complex,
    vmap: Arc<BTreeMap<HfSet, HfSet>>,
}

impl std::fmt::Debug for SimplicialMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.vmap.iter()).finish()
    }
}

/// Outcome of checking the two groundedness conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Grounded {
    Certificate { faces_checked: usize },
    Violation(Violation),
}

impl Grounded {
    pub fn is_ok(&self) -> bool {
        matches!(self, Grounded::Certificate { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// (S1): the image of a face is not a face.
    ImageNotFace { face: HfSet, image: HfSet },
    /// (S1): the image has support outside the support of the face.
    SupportGrows { face: HfSet, image: HfSet },
    /// (S2): a codomain face has no preimage face with the same support.
    NoGroundedPreimage { face: HfSet },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ImageNotFace { face, image } => {
                write!(f, "(S1) image {image} of face {face} is not a face")
            }
            Violation::SupportGrows { face, image } => {
                write!(f, "(S1) sp({image}) ⊄ sp({face})")
            }
            Violation::NoGroundedPreimage { face } => {
                write!(f, "(S2) no face with the support of {face} maps onto it")
            }
        }
    }
}

impl SimplicialMap {
    /// Checks that `vmap` is a total function `Vr(dom) → Vr(cod)`.
    pub fn new(dom: Complex, cod: Complex, vmap: BTreeMap<HfSet, HfSet>) -> Result<Self, MapError> {
        for v in dom.vertices() {
            match vmap.get(v) {
                None => return Err(MapError::NotTotal(v.clone())),
                Some(w) if !cod.is_vertex(w) => {
                    return Err(MapError::NotAVertex {
                        vertex: v.clone(),
                        image: w.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        if vmap.len() != dom.vertices().len() {
            let extra = vmap.keys().find(|k| !dom.is_vertex(k)).cloned().unwrap();
            return Err(MapError::NotTotal(extra));
        }
        Ok(SimplicialMap {
            dom,
            cod,
            vmap: Arc::new(vmap),
        })
    }

    pub(crate) fn new_unchecked(dom: Complex, cod: Complex, vmap: BTreeMap<HfSet, HfSet>) -> Self {
        debug_assert!(dom.vertices().iter().all(|v| vmap.contains_key(v)));
        SimplicialMap {
            dom,
            cod,
            vmap: Arc::new(vmap),
        }
    }

    /// A partial assignment completed by the identity on the remaining vertices.
    pub fn from_assignment(dom: Complex, cod: Complex, pairs: &[(HfSet, HfSet)]) -> Result<Self, MapError> {
        let mut vmap = BTreeMap::new();
        for v in dom.vertices() {
            vmap.insert(v.clone(), v.clone());
        }
        for (a, b) in pairs {
            if dom.is_vertex(a) {
                vmap.insert(a.clone(), b.clone());
            }
        }
        SimplicialMap::new(dom, cod, vmap)
    }

    pub fn identity(a: &Complex) -> Self {
        let vmap = a.vertices().iter().map(|v| (v.clone(), v.clone())).collect();
        SimplicialMap::new_unchecked(a.clone(), a.clone(), vmap)
    }

    pub fn dom(&self) -> &Complex {
        &self.dom
    }

    pub fn cod(&self) -> &Complex {
        &self.cod
    }

    pub fn vertex_map(&self) -> &BTreeMap<HfSet, HfSet> {
        &self.vmap
    }

    pub fn apply(&self, v: &HfSet) -> &HfSet {
        &self.vmap[v]
    }

    pub fn get(&self, v: &HfSet) -> Option<&HfSet> {
        self.vmap.get(v)
    }

    /// `f(t)` for a set of domain vertices.
    pub fn image(&self, t: &HfSet) -> HfSet {
        HfSet::from_elems(t.iter().map(|v| self.vmap[v].clone())).expect("nonempty face")
    }

    /// `f⁻¹(s)`: domain faces mapped onto `s`.
    pub fn preimage(&self, s: &HfSet) -> BTreeSet<HfSet> {
        self.dom
            .faces()
            .iter()
            .filter(|t| t.len() >= s.len() && &self.image(t) == s)
            .cloned()
            .collect()
    }

    /// `f⁻¹(S)`, the union of the preimages of the members of `S`.
    pub fn preimage_family(&self, family: &AdditiveFamily) -> AdditiveFamily {
        let members = self
            .dom
            .faces()
            .iter()
            .filter(|t| family.contains(&self.image(t)))
            .cloned()
            .collect();
        AdditiveFamily::trusted(members)
    }

    /// `u(f)`: codomain vertices hit by exactly one domain vertex.
    pub fn unique_cover(&self) -> BTreeSet<HfSet> {
        let mut count: BTreeMap<&HfSet, usize> = BTreeMap::new();
        for w in self.vmap.values() {
            *count.entry(w).or_default() += 1;
        }
        count
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(w, _)| w.clone())
            .collect()
    }

    /// Exhaustive check of (S1) and (S2).
    pub fn check_grounded(&self) -> Grounded {
        let mut hit: BTreeSet<HfSet> = BTreeSet::new();
        for t in self.dom.faces() {
            let img = self.image(t);
            if !self.cod.contains(&img) {
                return Grounded::Violation(Violation::ImageNotFace {
                    face: t.clone(),
                    image: img,
                });
            }
            let (sp_t, sp_i) = (t.support_set(), img.support_set());
            if !sp_i.is_subset(&sp_t) {
                return Grounded::Violation(Violation::SupportGrows {
                    face: t.clone(),
                    image: img,
                });
            }
            if sp_i == sp_t {
                hit.insert(img);
            }
        }
        for s in self.cod.faces() {
            if !hit.contains(s) {
                return Grounded::Violation(Violation::NoGroundedPreimage { face: s.clone() });
            }
        }
        Grounded::Certificate {
            faces_checked: self.dom.len() + self.cod.len(),
        }
    }

    /// A bijection on vertices that matches faces exactly and preserves supports.
    pub fn is_grounded_iso(&self) -> bool {
        let inj: BTreeSet<&HfSet> = self.vmap.values().collect();
        if inj.len() != self.vmap.len() || inj.len() != self.cod.vertices().len() {
            return false;
        }
        if self.dom.len() != self.cod.len() {
            return false;
        }
        self.dom.faces().iter().all(|t| {
            let img = self.image(t);
            self.cod.contains(&img) && img.support_set() == t.support_set()
        })
    }

    /// The inverse vertex function of a bijection.
    pub fn inverse(&self) -> Option<SimplicialMap> {
        let mut inv = BTreeMap::new();
        for (a, b) in self.vmap.iter() {
            if inv.insert(b.clone(), a.clone()).is_some() {
                return None;
            }
        }
        if inv.len() != self.cod.vertices().len() {
            return None;
        }
        Some(SimplicialMap::new_unchecked(self.cod.clone(), self.dom.clone(), inv))
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &SimplicialMap) -> Result<SimplicialMap, MapError> {
        if g.cod != self.dom {
            return Err(MapError::DomainMismatch);
        }
        let vmap = g
            .vmap
            .iter()
            .map(|(v, w)| (v.clone(), self.vmap[w].clone()))
            .collect();
        Ok(SimplicialMap::new_unchecked(g.dom.clone(), self.cod.clone(), vmap))
    }

    /// The division `sf: f⁻¹(s)·dom → s·cod`; `f` itself when `s` is not a codomain face.
    pub fn divide(&self, s: &HfSet) -> SimplicialMap {
        if !self.cod.contains(s) {
            return self.clone();
        }
        let fam = AdditiveFamily::trusted(self.preimage(s));
        let dom = divide_by_family(&self.dom, &fam);
        let cod = self.cod.subdivide(s);
        let vmap = dom
            .vertices()
            .iter()
            .map(|v| {
                let w = if fam.contains(v) { s.clone() } else { self.vmap[v].clone() };
                (v.clone(), w)
            })
            .collect();
        SimplicialMap::new_unchecked(dom, cod, vmap)
    }

    /// `Sf` along the canonical non-decreasing enumeration, largest member first.
    pub fn divide_family(&self, family: &AdditiveFamily) -> SimplicialMap {
        let mut f = self.clone();
        for s in family.enumeration().iter().rev() {
            f = f.divide(s);
        }
        f
    }

    /// Vertex functions agree and the end complexes coincide.
    pub fn same_as(&self, other: &SimplicialMap) -> bool {
        self.dom == other.dom && self.cod == other.cod && self.vmap == other.vmap
    }

    /// Assignment pairs that are not identities.
    pub fn moved(&self) -> Vec<(HfSet, HfSet)> {
        self.vmap
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect()
    }
}

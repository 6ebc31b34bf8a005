//! Finite simplicial complexes whose faces are hereditarily finite sets, and
//! stellar subdivision.
//!
//! Subdividing `A` by a face `s` uses the set `s` itself as the new vertex:
//! every face `u ⊇ s` is replaced by the faces `y ∪ {s}` with `y ∪ s = u` and
//! `s ⊄ y`. Dividing by a non-face leaves the complex unchanged.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hfset::{HfError, HfSet, Ur};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error("face {face} is an atom, not a set")]
    AtomFace { face: HfSet },
    #[error("not subset-closed: {missing} is missing below {face}")]
    NotSubsetClosed { face: HfSet, missing: HfSet },
    #[error("self-membership: face {member} lies in the transitive closure of face {face}")]
    SelfMembership { member: HfSet, face: HfSet },
    #[error("complex exceeds guardrails: {what}")]
    TooLarge { what: String },
}

/// A finite subset-closed family of faces with `s ∉ tc(t)` for all faces `s`, `t`.
#[derive(Clone)]
pub struct Complex {
    ur: Ur,
    faces: Arc<BTreeSet<HfSet>>,
    vertices: Arc<BTreeSet<HfSet>>,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.faces, &other.faces) || self.faces == other.faces
    }
}

impl Eq for Complex {}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.faces.iter()).finish()
    }
}

impl Complex {
    /// Checks every invariant and returns the complex.
    pub fn validate<I: IntoIterator<Item = HfSet>>(ur: &Ur, faces: I) -> Result<Complex, ComplexError> {
        let faces: BTreeSet<HfSet> = faces.into_iter().collect();
        for f in &faces {
            if f.is_atom() {
                return Err(ComplexError::AtomFace { face: f.clone() });
            }
            ur.check(f)?;
            if f.len() > 1 {
                for x in f.iter() {
                    let sub = f.without(x).expect("face has two or more members");
                    if !faces.contains(&sub) {
                        return Err(ComplexError::NotSubsetClosed {
                            face: f.clone(),
                            missing: sub,
                        });
                    }
                }
            }
        }
        for t in &faces {
            for x in t.iter() {
                if faces.contains(x) {
                    return Err(ComplexError::SelfMembership {
                        member: x.clone(),
                        face: t.clone(),
                    });
                }
                for y in x.transitive_closure() {
                    if faces.contains(&y) {
                        return Err(ComplexError::SelfMembership {
                            member: y,
                            face: t.clone(),
                        });
                    }
                }
            }
        }
        Ok(Complex::from_faces(ur.clone(), faces))
    }

    /// Trusted constructor for face sets produced by the crate's own operations.
    pub(crate) fn from_faces(ur: Ur, faces: BTreeSet<HfSet>) -> Complex {
        let mut vertices = BTreeSet::new();
        for f in &faces {
            if f.len() == 1 {
                vertices.insert(f.elems()[0].clone());
            }
        }
        Complex {
            ur,
            faces: Arc::new(faces),
            vertices: Arc::new(vertices),
        }
    }

    /// The empty complex.
    pub fn empty(ur: &Ur) -> Complex {
        Complex::from_faces(ur.clone(), BTreeSet::new())
    }

    /// All nonempty subsets of `Ur`.
    pub fn full(ur: &Ur) -> Complex {
        let atoms: Vec<HfSet> = ur.atoms().cloned().collect();
        Complex::from_faces(ur.clone(), nonempty_subsets(&atoms).collect())
    }

    /// The full simplex on the given vertices.
    pub fn simplex(ur: &Ur, vertices: &HfSet) -> Complex {
        Complex::from_faces(ur.clone(), nonempty_subsets(vertices.elems()).collect())
    }

    /// Downward closure of the given generating faces (no validation of self-membership).
    pub fn closure<'a, I: IntoIterator<Item = &'a HfSet>>(ur: &Ur, generators: I) -> Result<Complex, ComplexError> {
        let mut faces = BTreeSet::new();
        for g in generators {
            for f in nonempty_subsets(g.elems()) {
                faces.insert(f);
            }
        }
        Complex::validate(ur, faces)
    }

    pub fn ur(&self) -> &Ur {
        &self.ur
    }

    pub fn faces(&self) -> &BTreeSet<HfSet> {
        &self.faces
    }

    pub fn vertices(&self) -> &BTreeSet<HfSet> {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, s: &HfSet) -> bool {
        self.faces.contains(s)
    }

    pub fn is_vertex(&self, v: &HfSet) -> bool {
        self.vertices.contains(v)
    }

    /// Faces not strictly contained in another face.
    pub fn maximal_faces(&self) -> Vec<HfSet> {
        let mut by_len: Vec<&HfSet> = self.faces.iter().collect();
        by_len.sort_by_key(|f| std::cmp::Reverse(f.len()));
        let mut out: Vec<HfSet> = Vec::new();
        for f in by_len {
            if !out.iter().any(|m| f.is_subset(m)) {
                out.push(f.clone());
            }
        }
        out.sort();
        out
    }

    pub fn dimension(&self) -> Option<usize> {
        self.faces.iter().map(|f| f.len() - 1).max()
    }

    /// Every face is a set of atoms.
    pub fn is_grounded(&self) -> bool {
        self.faces.iter().all(HfSet::is_ground)
    }

    /// The stellar subdivision `sA`.
    pub fn subdivide(&self, s: &HfSet) -> Complex {
        if !self.faces.contains(s) {
            return self.clone();
        }
        let mut faces = (*self.faces).clone();
        subdivide_in_place(&mut faces, s);
        Complex::from_faces(self.ur.clone(), faces)
    }

    /// `s_0(s_1(⋯(s_l A)))`: the rightmost entry is applied first.
    pub fn subdivide_seq(&self, seq: &[HfSet]) -> Complex {
        let mut faces: Option<BTreeSet<HfSet>> = None;
        for s in seq.iter().rev() {
            let cur = faces.as_ref().unwrap_or(&self.faces);
            if cur.contains(s) {
                let f = faces.get_or_insert_with(|| (*self.faces).clone());
                subdivide_in_place(f, s);
            }
        }
        match faces {
            Some(f) => Complex::from_faces(self.ur.clone(), f),
            None => self.clone(),
        }
    }

    /// The supports of all faces.
    pub fn ground_of(&self) -> Complex {
        Complex::from_faces(
            self.ur.clone(),
            self.faces.iter().map(HfSet::support_set).collect(),
        )
    }

    /// Whether `s` lies over the ground face `sigma`, i.e. `sp(s) ⊆ sigma`.
    pub fn in_face_structure(&self, s: &HfSet, sigma: &HfSet) -> bool {
        self.faces.contains(s) && s.support_set().is_subset(sigma)
    }

    pub fn check_guardrails(&self, limits: &Guardrails) -> Result<(), ComplexError> {
        if self.ur.len() > limits.max_ur {
            return Err(ComplexError::TooLarge {
                what: format!("|Ur| = {} > {}", self.ur.len(), limits.max_ur),
            });
        }
        if self.len() > limits.max_faces {
            return Err(ComplexError::TooLarge {
                what: format!("{} faces > {}", self.len(), limits.max_faces),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            urelements: self.ur.names(),
            faces: self.faces.iter().cloned().collect(),
        }
    }
}

/// In-place `sA` on a raw face set; returns whether anything changed.
pub(crate) fn subdivide_in_place(faces: &mut BTreeSet<HfSet>, s: &HfSet) -> bool {
    if !faces.contains(s) {
        return false;
    }
    let containing: Vec<HfSet> = faces.iter().filter(|u| s.is_subset(u)).cloned().collect();
    let k = s.len();
    for u in &containing {
        faces.remove(u);
    }
    for u in &containing {
        let base = u.minus(s);
        for mask in 0..(1u64 << k) - 1 {
            let mut y: Vec<HfSet> = base.clone();
            for (i, x) in s.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    y.push(x.clone());
                }
            }
            y.push(s.clone());
            faces.insert(HfSet::from_elems(y).expect("contains s"));
        }
    }
    true
}

/// All nonempty subsets of a sorted slice, as sets.
pub fn nonempty_subsets(items: &[HfSet]) -> impl Iterator<Item = HfSet> + '_ {
    assert!(items.len() < 64);
    (1u64..(1u64 << items.len())).map(move |mask| {
        let v: Vec<HfSet> = items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, x)| x.clone())
            .collect();
        HfSet::from_sorted(v)
    })
}

/// All subsets (including the empty one) of a sorted slice, as vectors.
pub fn all_subsets(items: &[HfSet]) -> impl Iterator<Item = Vec<HfSet>> + '_ {
    assert!(items.len() < 64);
    (0u64..(1u64 << items.len())).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, x)| x.clone())
            .collect()
    })
}

/// Size limits applied to user-facing inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guardrails {
    pub max_ur: usize,
    pub max_faces: usize,
}

impl Default for Guardrails {
    fn default() -> Self {
        Guardrails {
            max_ur: 5,
            max_faces: 200,
        }
    }
}

impl Guardrails {
    /// Defaults, with `STELLAR_MAX_FACES` overriding the face limit.
    pub fn from_env() -> Guardrails {
        let mut g = Guardrails::default();
        if let Some(n) = std::env::var("STELLAR_MAX_FACES")
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            g.max_faces = n;
        }
        g
    }
}

/// Wire format: `{"urelements": [...], "faces": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub urelements: Vec<String>,
    pub faces: Vec<HfSet>,
}

impl ComplexJson {
    pub fn into_complex(self) -> Result<Complex, ComplexError> {
        let ur = Ur::new(&self.urelements)?;
        Complex::validate(&ur, self.faces)
    }
}

impl Serialize for Complex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        ComplexJson::deserialize(deserializer)?
            .into_complex()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hfset::parse;

    fn p(s: &str) -> HfSet {
        parse(s).unwrap()
    }

    fn tri() -> Complex {
        Complex::full(&Ur::letters(3))
    }

    #[test]
    fn validate_examples() {
        let ur = Ur::letters(2);
        assert!(Complex::validate(&ur, [p("{a}"), p("{b}"), p("{a,b}")]).is_ok());
        assert_eq!(
            Complex::validate(&ur, [p("{a,b}"), p("{b}")]),
            Err(ComplexError::NotSubsetClosed {
                face: p("{a,b}"),
                missing: p("{a}")
            })
        );
        assert!(matches!(
            Complex::validate(&ur, [p("{a}"), p("{{a}}")]),
            Err(ComplexError::SelfMembership { .. })
        ));
    }

    #[test]
    fn midpoint_subdivision() {
        let ab = Complex::full(&Ur::letters(2));
        let m = p("{a,b}");
        let sub = ab.subdivide(&m);
        let expect: BTreeSet<HfSet> = [
            p("{a}"),
            p("{b}"),
            HfSet::singleton(m.clone()),
            p("{a}").with(m.clone()),
            p("{b}").with(m.clone()),
        ]
        .into_iter()
        .collect();
        assert_eq!(sub.faces(), &expect);
    }

    #[test]
    fn coning_the_triangle() {
        let sub = tri().subdivide(&p("{a,b,c}"));
        assert_eq!(sub.len(), 13);
        assert_eq!(sub.vertices().len(), 4);
        assert_eq!(sub.ground_of(), tri());
    }

    #[test]
    fn non_face_divisor_is_identity() {
        let ur = Ur::new(["a", "b", "c", "d"]).unwrap();
        let delta = Complex::simplex(&ur, &p("{a,b,c}"));
        assert_eq!(delta.subdivide(&p("{a,d}")), delta);
    }

    #[test]
    fn edge_subdivision_of_triangle_has_eleven_faces() {
        assert_eq!(tri().subdivide(&p("{a,b}")).len(), 11);
    }

    #[test]
    fn face_structure() {
        let a = tri().subdivide(&p("{a,b,c}"));
        let am = p("{a,{a,b,c}}");
        assert!(a.in_face_structure(&am, &p("{a,b,c}")));
        assert!(!a.in_face_structure(&am, &p("{a,b}")));
        assert!(tri().in_face_structure(&p("{a}"), &p("{a}")));
    }

    #[test]
    fn json_round_trip() {
        let a = tri().subdivide(&p("{a,b}"));
        let j = serde_json::to_string(&a).unwrap();
        let back: Complex = serde_json::from_str(&j).unwrap();
        assert_eq!(a, back);
    }
}

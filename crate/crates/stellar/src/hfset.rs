//! Hereditarily finite sets over a declared alphabet of urelements.
//!
//! An [`HfSet`] is either an atom or a nonempty, duplicate-free set of
//! `HfSet`s kept in canonical order, so structural equality is extensional
//! equality. The canonical order compares rank (nesting depth) first, then
//! cardinality, then the children lexicographically; atoms compare by name.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HfError {
    #[error("atom `{0}` is not declared in Ur")]
    UndeclaredAtom(String),
    #[error("the empty set is not a member of Fin+")]
    EmptyResult,
    #[error("`{0}` is not a valid atom name")]
    InvalidAtomName(String),
    #[error("atom `{0}` declared twice")]
    DuplicateAtom(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A hereditarily finite set, or an urelement.
#[derive(Clone)]
pub enum HfSet {
    Atom(Arc<str>),
    Set(Arc<Node>),
}

#[doc(hidden)]
pub struct Node {
    rank: u32,
    elems: Box<[HfSet]>,
}

impl HfSet {
    /// An atom with the given name, without checking it against any `Ur`.
    pub fn atom(name: &str) -> HfSet {
        HfSet::Atom(Arc::from(name))
    }

    /// Builds a set from its members; fails on an empty input.
    pub fn from_elems<I: IntoIterator<Item = HfSet>>(elems: I) -> Result<HfSet, HfError> {
        let mut v: Vec<HfSet> = elems.into_iter().collect();
        if v.is_empty() {
            return Err(HfError::EmptyResult);
        }
        v.sort();
        v.dedup();
        Ok(HfSet::from_sorted(v))
    }

    /// Builds a set from a sorted, deduplicated, nonempty vector.
    pub(crate) fn from_sorted(v: Vec<HfSet>) -> HfSet {
        debug_assert!(!v.is_empty());
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        let rank = 1 + v.iter().map(HfSet::rank).max().unwrap_or(0);
        HfSet::Set(Arc::new(Node {
            rank,
            elems: v.into_boxed_slice(),
        }))
    }

    pub fn singleton(x: HfSet) -> HfSet {
        HfSet::from_sorted(vec![x])
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, HfSet::Atom(_))
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self {
            HfSet::Atom(n) => Some(n),
            HfSet::Set(_) => None,
        }
    }

    /// Nesting depth: 0 for atoms, one more than the deepest member for sets.
    pub fn rank(&self) -> u32 {
        match self {
            HfSet::Atom(_) => 0,
            HfSet::Set(n) => n.rank,
        }
    }

    /// Members in canonical order; empty for atoms.
    pub fn elems(&self) -> &[HfSet] {
        match self {
            HfSet::Atom(_) => &[],
            HfSet::Set(n) => &n.elems,
        }
    }

    pub fn len(&self) -> usize {
        self.elems().len()
    }

    /// True only for atoms, which have no members.
    pub fn is_empty(&self) -> bool {
        self.elems().is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HfSet> {
        self.elems().iter()
    }

    pub fn is_member(&self, x: &HfSet) -> bool {
        self.elems().binary_search(x).is_ok()
    }

    /// Extensional inclusion. Atoms are not sets, so they are subsets of nothing.
    pub fn is_subset(&self, other: &HfSet) -> bool {
        if self.is_atom() || other.is_atom() {
            return false;
        }
        sorted_subset(self.elems(), other.elems())
    }

    pub fn union(&self, other: &HfSet) -> HfSet {
        let v = merge_union(self.elems(), other.elems());
        HfSet::from_sorted(v)
    }

    pub fn intersection(&self, other: &HfSet) -> Vec<HfSet> {
        let (a, b) = (self.elems(), other.elems());
        let (mut i, mut j, mut out) = (0, 0, Vec::new());
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Members of `self` not in `other`, possibly empty.
    pub fn minus(&self, other: &HfSet) -> Vec<HfSet> {
        self.elems()
            .iter()
            .filter(|x| !other.is_member(x))
            .cloned()
            .collect()
    }

    /// `self ∖ other` as a Fin+ value.
    pub fn difference(&self, other: &HfSet) -> Result<HfSet, HfError> {
        HfSet::from_elems(self.minus(other))
    }

    pub fn with(&self, x: HfSet) -> HfSet {
        let mut v = self.elems().to_vec();
        if let Err(i) = v.binary_search(&x) {
            v.insert(i, x);
        }
        HfSet::from_sorted(v)
    }

    pub fn without(&self, x: &HfSet) -> Result<HfSet, HfError> {
        HfSet::from_elems(self.elems().iter().filter(|y| *y != x).cloned())
    }

    /// All atoms occurring anywhere inside; `{a}` for an atom `a`.
    pub fn support(&self) -> BTreeSet<HfSet> {
        let mut out = BTreeSet::new();
        self.collect_support(&mut out);
        out
    }

    fn collect_support(&self, out: &mut BTreeSet<HfSet>) {
        match self {
            HfSet::Atom(_) => {
                out.insert(self.clone());
            }
            HfSet::Set(n) => {
                for x in n.elems.iter() {
                    x.collect_support(out);
                }
            }
        }
    }

    /// The support as a set of atoms.
    pub fn support_set(&self) -> HfSet {
        HfSet::from_sorted(self.support().into_iter().collect())
    }

    /// Members, members of members, and so on.
    pub fn transitive_closure(&self) -> BTreeSet<HfSet> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<&HfSet> = self.elems().iter().collect();
        while let Some(x) = stack.pop() {
            if out.insert(x.clone()) {
                stack.extend(x.elems().iter());
            }
        }
        out
    }

    /// Whether `x` belongs to the transitive closure, without building it.
    pub fn tc_contains(&self, x: &HfSet) -> bool {
        if x.rank() >= self.rank() {
            return false;
        }
        self.elems()
            .iter()
            .any(|y| y == x || (y.rank() > x.rank() && y.tc_contains(x)))
    }

    /// True when every member is an atom.
    pub fn is_ground(&self) -> bool {
        !self.is_atom() && self.rank() == 1
    }
}

pub(crate) fn sorted_subset(a: &[HfSet], b: &[HfSet]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for x in a {
        loop {
            if j == b.len() {
                return false;
            }
            match b[j].cmp(x) {
                Ordering::Less => j += 1,
                Ordering::Equal => {
                    j += 1;
                    break;
                }
                Ordering::Greater => return false,
            }
        }
    }
    true
}

pub(crate) fn merge_union(a: &[HfSet], b: &[HfSet]) -> Vec<HfSet> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl PartialEq for HfSet {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HfSet {}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HfSet {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (HfSet::Atom(a), HfSet::Atom(b)) => a.cmp(b),
            (HfSet::Atom(_), HfSet::Set(_)) => Ordering::Less,
            (HfSet::Set(_), HfSet::Atom(_)) => Ordering::Greater,
            (HfSet::Set(a), HfSet::Set(b)) => {
                if Arc::ptr_eq(a, b) {
                    return Ordering::Equal;
                }
                a.rank
                    .cmp(&b.rank)
                    .then(a.elems.len().cmp(&b.elems.len()))
                    .then_with(|| a.elems.iter().cmp(b.elems.iter()))
            }
        }
    }
}

impl Hash for HfSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            HfSet::Atom(a) => {
                0u8.hash(state);
                a.hash(state);
            }
            HfSet::Set(n) => {
                1u8.hash(state);
                n.elems.len().hash(state);
                for x in n.elems.iter() {
                    x.hash(state);
                }
            }
        }
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HfSet::Atom(a) => f.write_str(a),
            HfSet::Set(n) => {
                f.write_str("{")?;
                for (i, x) in n.elems.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for HfSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            HfSet::Atom(a) => serializer.serialize_str(a),
            HfSet::Set(n) => {
                let mut seq = serializer.serialize_seq(Some(n.elems.len()))?;
                for x in n.elems.iter() {
                    seq.serialize_element(x)?;
                }
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for HfSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = HfSet;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an atom name, set text, or a nonempty array of sets")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<HfSet, E> {
                if v.trim_start().starts_with('{') {
                    return parse(v).map_err(E::custom);
                }
                if !valid_atom_name(v) {
                    return Err(E::custom(HfError::InvalidAtomName(v.to_string())));
                }
                Ok(HfSet::atom(v))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<HfSet, A::Error> {
                let mut v = Vec::new();
                while let Some(x) = seq.next_element::<HfSet>()? {
                    v.push(x);
                }
                HfSet::from_elems(v).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

pub fn valid_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The declared finite alphabet of urelements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ur {
    atoms: Arc<BTreeSet<HfSet>>,
}

impl Ur {
    pub fn new<I, S>(names: I) -> Result<Ur, HfError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut atoms = BTreeSet::new();
        for n in names {
            let n = n.as_ref();
            if !valid_atom_name(n) {
                return Err(HfError::InvalidAtomName(n.to_string()));
            }
            if !atoms.insert(HfSet::atom(n)) {
                return Err(HfError::DuplicateAtom(n.to_string()));
            }
        }
        Ok(Ur {
            atoms: Arc::new(atoms),
        })
    }

    /// `Ur` on the first `n` letters `a`, `b`, ... (at most 26).
    pub fn letters(n: usize) -> Ur {
        assert!(n <= 26);
        Ur::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string())).unwrap()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &HfSet> {
        self.atoms.iter()
    }

    pub fn names(&self) -> Vec<String> {
        self.atoms.iter().map(|a| a.to_string()).collect()
    }

    pub fn atom(&self, name: &str) -> Result<HfSet, HfError> {
        let a = HfSet::atom(name);
        if self.atoms.contains(&a) {
            Ok(a)
        } else {
            Err(HfError::UndeclaredAtom(name.to_string()))
        }
    }

    pub fn contains(&self, a: &HfSet) -> bool {
        self.atoms.contains(a)
    }

    /// Checks that every atom inside `s` is declared.
    pub fn check(&self, s: &HfSet) -> Result<(), HfError> {
        for a in s.support() {
            if !self.atoms.contains(&a) {
                return Err(HfError::UndeclaredAtom(a.to_string()));
            }
        }
        Ok(())
    }

    /// Parses the bracket notation, e.g. `{c,{a,b}}`, rejecting undeclared atoms.
    pub fn parse(&self, text: &str) -> Result<HfSet, HfError> {
        let s = parse(text)?;
        self.check(&s)?;
        Ok(s)
    }
}

impl fmt::Debug for Ur {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms.iter()).finish()
    }
}

/// Parses the bracket notation without an alphabet check.
pub fn parse(text: &str) -> Result<HfSet, HfError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.ws();
    let v = p.value()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> HfError {
        HfError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn value(&mut self) -> Result<HfSet, HfError> {
        match self.src.get(self.pos) {
            Some(b'{') => {
                self.pos += 1;
                self.ws();
                if self.src.get(self.pos) == Some(&b'}') {
                    return Err(HfError::EmptyResult);
                }
                let mut elems = Vec::new();
                loop {
                    self.ws();
                    elems.push(self.value()?);
                    self.ws();
                    match self.src.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("expected `,` or `}`")),
                    }
                }
                HfSet::from_elems(elems)
            }
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(HfSet::atom(name))
            }
            _ => Err(self.err("expected an atom or `{`")),
        }
    }
}

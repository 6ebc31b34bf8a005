//! Division sequences: their faces and vertices, combinatorial equivalence,
//! additive families and division by a family.
//!
//! A sequence `s_0 ⋯ s_m` acts on a complex by iterated subdivision with the
//! rightmost entry applied first.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::Complex;
use crate::hfset::{merge_union, sorted_subset, HfSet, Ur};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("{0} is not a face of the context")]
    NotAFace(HfSet),
    #[error("family is not additive: {a} ∪ {b} is a face but not a member")]
    NotAdditive { a: HfSet, b: HfSet },
}

/// A finite sequence of Fin+ sets, leftmost applied last.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivSeq(pub Vec<HfSet>);

impl DivSeq {
    pub fn new(entries: Vec<HfSet>) -> DivSeq {
        DivSeq(entries)
    }

    pub fn entries(&self) -> &[HfSet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s ⃗t`: prepends an entry.
    pub fn prefixed(&self, s: HfSet) -> DivSeq {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(s);
        v.extend(self.0.iter().cloned());
        DivSeq(v)
    }

    /// Concatenation `self other`.
    pub fn then(&self, other: &DivSeq) -> DivSeq {
        DivSeq(self.0.iter().chain(other.0.iter()).cloned().collect())
    }
}

impl std::fmt::Display for DivSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

/// Evaluates the recursive face predicate of a fixed sequence.
struct SeqFaces<'a> {
    seq: &'a [HfSet],
    ur: &'a Ur,
    /// `entry_face[j]`: `s_j` is a face of `s_{j+1} ⋯ s_m`.
    entry_face: Vec<bool>,
}

impl<'a> SeqFaces<'a> {
    fn new(seq: &'a [HfSet], ur: &'a Ur) -> Self {
        let mut sf = SeqFaces {
            seq,
            ur,
            entry_face: vec![false; seq.len()],
        };
        for j in (0..seq.len()).rev() {
            sf.entry_face[j] = sf.face_from(&seq[j], j + 1);
        }
        sf
    }

    fn blocked(&self, t: &HfSet, from: usize, to: usize) -> bool {
        (from..to).any(|j| self.entry_face[j] && self.seq[j].is_subset(t))
    }

    /// Whether `t` is a face of the suffix starting at `k`.
    fn face_from(&self, t: &HfSet, k: usize) -> bool {
        let m = self.seq.len();
        if t.is_atom() {
            return false;
        }
        if t.iter().all(|x| self.ur.contains(x)) && !self.blocked(t, k, m) {
            return true;
        }
        for i in k..m {
            let si = &self.seq[i];
            if t.is_member(si) && !self.blocked(t, k, i + 1) {
                let rest = t.without(si).ok();
                let inner = match rest {
                    Some(r) => r.union(si),
                    None => si.clone(),
                };
                if self.face_from(&inner, i + 1) {
                    return true;
                }
            }
        }
        false
    }
}

/// The internal face predicate of a sequence over the declared `Ur`.
pub fn is_face_of_seq(t: &HfSet, seq: &DivSeq, ur: &Ur) -> bool {
    SeqFaces::new(&seq.0, ur).face_from(t, 0)
}

/// For each entry, whether it is a face of the part of the sequence to its right.
pub fn entry_is_face(seq: &DivSeq, ur: &Ur) -> Vec<bool> {
    SeqFaces::new(&seq.0, ur).entry_face
}

/// All faces of the sequence: the sequence applied to the full complex on `Ur`.
pub fn faces_of_seq(seq: &DivSeq, ur: &Ur) -> Complex {
    Complex::full(ur).subdivide_seq(&seq.0)
}

/// `vr(⃗s)`: the union of all faces.
pub fn vr(seq: &DivSeq, ur: &Ur) -> BTreeSet<HfSet> {
    faces_of_seq(seq, ur).vertices().clone()
}

/// The face complex, used as the operational equality on sequences.
pub fn equiv_fingerprint(seq: &DivSeq, ur: &Ur) -> Complex {
    faces_of_seq(seq, ur)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Equivalence {
    /// A chain of rule applications of the given total length joins the two sequences.
    Proven { depth: usize, path: Vec<DivSeq> },
    Unknown,
}

/// One-step moves from rules (a) and (b), applied at any position (rule (c)).
fn moves(seq: &DivSeq, ur: &Ur) -> Vec<DivSeq> {
    let v = &seq.0;
    let mut out = Vec::new();
    for i in 0..v.len() {
        let tail = DivSeq(v[i + 1..].to_vec());
        if !is_face_of_seq(&v[i], &tail, ur) {
            let mut w = v.clone();
            w.remove(i);
            out.push(DivSeq(w));
        }
        if i + 1 < v.len() {
            let (s, t) = (&v[i], &v[i + 1]);
            if s != t && !s.is_member(t) && !t.is_member(s) {
                let tail2 = DivSeq(v[i + 2..].to_vec());
                let ok = s.intersection(t).is_empty() || !is_face_of_seq(&s.union(t), &tail2, ur);
                if ok {
                    let mut w = v.clone();
                    w.swap(i, i + 1);
                    out.push(DivSeq(w));
                }
            }
        }
    }
    out
}

/// Bounded bidirectional search for a chain of rule applications between two sequences.
///
/// Both sides only drop non-face entries and swap admissible neighbours; a
/// drop seen from the other side is an insertion. `Unknown` is not a
/// disproof.
pub fn rewrite_equiv(seq1: &DivSeq, seq2: &DivSeq, ur: &Ur, depth_limit: usize) -> Equivalence {
    if seq1 == seq2 {
        return Equivalence::Proven {
            depth: 0,
            path: vec![seq1.clone()],
        };
    }
    let mut parents: [HashMap<DivSeq, Option<DivSeq>>; 2] = [HashMap::new(), HashMap::new()];
    let mut dist: [HashMap<DivSeq, usize>; 2] = [HashMap::new(), HashMap::new()];
    let mut frontier: [VecDeque<DivSeq>; 2] = [VecDeque::new(), VecDeque::new()];
    for (k, s) in [seq1, seq2].into_iter().enumerate() {
        parents[k].insert(s.clone(), None);
        dist[k].insert(s.clone(), 0);
        frontier[k].push_back(s.clone());
    }
    let mut radius = [0usize; 2];
    while radius[0] + radius[1] < depth_limit {
        let side = match (frontier[0].is_empty(), frontier[1].is_empty()) {
            (true, true) => break,
            (false, true) => 0,
            (true, false) => 1,
            (false, false) => usize::from(frontier[1].len() < frontier[0].len()),
        };
        let mut next = VecDeque::new();
        let mut best: Option<(usize, DivSeq)> = None;
        for cur in std::mem::take(&mut frontier[side]) {
            for n in moves(&cur, ur) {
                if parents[side].contains_key(&n) {
                    continue;
                }
                parents[side].insert(n.clone(), Some(cur.clone()));
                dist[side].insert(n.clone(), radius[side] + 1);
                if let Some(d) = dist[1 - side].get(&n) {
                    let total = radius[side] + 1 + d;
                    if best.as_ref().is_none_or(|(b, _)| total < *b) {
                        best = Some((total, n.clone()));
                    }
                }
                next.push_back(n);
            }
        }
        radius[side] += 1;
        if let Some((depth, meet)) = best {
            if depth <= depth_limit {
                let path = join_path(&parents, &meet);
                return Equivalence::Proven { depth, path };
            }
        }
        frontier[side] = next;
    }
    Equivalence::Unknown
}

fn join_path(parents: &[HashMap<DivSeq, Option<DivSeq>>; 2], meet: &DivSeq) -> Vec<DivSeq> {
    let mut left = vec![meet.clone()];
    let mut cur = meet.clone();
    while let Some(Some(p)) = parents[0].get(&cur) {
        left.push(p.clone());
        cur = p.clone();
    }
    left.reverse();
    let mut cur = meet.clone();
    while let Some(Some(p)) = parents[1].get(&cur) {
        left.push(p.clone());
        cur = p.clone();
    }
    left
}

/// An additive family of faces of a context complex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdditiveFamily {
    members: BTreeSet<HfSet>,
}

impl AdditiveFamily {
    pub fn new<I: IntoIterator<Item = HfSet>>(members: I, ctx: &Complex) -> Result<Self, SeqError> {
        let members: BTreeSet<HfSet> = members.into_iter().collect();
        for s in &members {
            if !ctx.contains(s) {
                return Err(SeqError::NotAFace(s.clone()));
            }
        }
        let v: Vec<&HfSet> = members.iter().collect();
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                let u = a.union(b);
                if ctx.contains(&u) && !members.contains(&u) {
                    return Err(SeqError::NotAdditive {
                        a: (*a).clone(),
                        b: (*b).clone(),
                    });
                }
            }
        }
        Ok(AdditiveFamily { members })
    }

    /// Wraps a family already known to be additive.
    pub(crate) fn trusted(members: BTreeSet<HfSet>) -> Self {
        AdditiveFamily { members }
    }

    pub fn empty() -> Self {
        AdditiveFamily {
            members: BTreeSet::new(),
        }
    }

    pub fn members(&self) -> &BTreeSet<HfSet> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &HfSet) -> bool {
        self.members.contains(s)
    }

    /// Every face of `ctx` above a member is a member.
    pub fn is_upward_closed(&self, ctx: &Complex) -> bool {
        ctx.faces()
            .iter()
            .all(|t| self.members.contains(t) || !self.members.iter().any(|s| s.is_subset(t)))
    }

    /// The lexicographically least non-decreasing enumeration (canonical order extends `⊊`).
    pub fn enumeration(&self) -> Vec<HfSet> {
        self.members.iter().cloned().collect()
    }

    pub fn enumerations(&self) -> Enumerations {
        nondecreasing_enumerations(&self.enumeration())
    }
}

/// Whether `s_i ⊆ s_j` implies `i ≤ j` along the list.
pub fn is_nondecreasing(seq: &[HfSet]) -> bool {
    for i in 0..seq.len() {
        for j in 0..i {
            if seq[i] != seq[j] && seq[i].is_subset(&seq[j]) {
                return false;
            }
        }
    }
    true
}

/// Lazily lists every injective ordering of `items` in which `⊆`-smaller sets come first,
/// starting with the lexicographically least.
pub fn nondecreasing_enumerations(items: &[HfSet]) -> Enumerations {
    let mut items = items.to_vec();
    items.sort();
    items.dedup();
    let n = items.len();
    assert!(n < 64, "family too large to enumerate");
    let below = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && items[j].is_subset(&items[i]))
                .fold(0u64, |m, j| m | 1 << j)
        })
        .collect();
    Enumerations {
        items,
        below,
        stack: Vec::new(),
        used: 0,
        started: false,
        done: false,
    }
}

pub struct Enumerations {
    items: Vec<HfSet>,
    below: Vec<u64>,
    stack: Vec<usize>,
    used: u64,
    started: bool,
    done: bool,
}

impl Enumerations {
    fn available(&self, i: usize) -> bool {
        self.used >> i & 1 == 0 && self.below[i] & !self.used == 0
    }

    fn fill(&mut self) {
        while self.stack.len() < self.items.len() {
            let i = (0..self.items.len())
                .find(|&i| self.available(i))
                .expect("an available minimal element");
            self.stack.push(i);
            self.used |= 1 << i;
        }
    }

    fn current(&self) -> Vec<HfSet> {
        self.stack.iter().map(|&i| self.items[i].clone()).collect()
    }
}

impl Iterator for Enumerations {
    type Item = Vec<HfSet>;

    fn next(&mut self) -> Option<Vec<HfSet>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill();
            return Some(self.current());
        }
        while let Some(last) = self.stack.pop() {
            self.used &= !(1 << last);
            if let Some(i) = (last + 1..self.items.len()).find(|&i| self.available(i)) {
                self.stack.push(i);
                self.used |= 1 << i;
                self.fill();
                return Some(self.current());
            }
        }
        self.done = true;
        None
    }
}

/// `SA` along the canonical non-decreasing enumeration.
pub fn divide_by_family(ctx: &Complex, family: &AdditiveFamily) -> Complex {
    ctx.subdivide_seq(&family.enumeration())
}

/// `S ⃗t` for a sequence context.
pub fn divide_seq_by_family(seq: &DivSeq, family: &AdditiveFamily) -> DivSeq {
    DivSeq(family.enumeration()).then(seq)
}

/// Direct description of the faces of `TA` of the form `x ∪ X` with `x ⊆ Vr(A)`, `X ⊆ T`.
pub fn linear_face_predicate(x: &[HfSet], xs: &[HfSet], t: &AdditiveFamily, a: &Complex) -> bool {
    let mut x = x.to_vec();
    x.sort();
    x.dedup();
    // (a)
    if t.members().iter().any(|m| sorted_subset(m.elems(), &x)) {
        return false;
    }
    // (b)
    let mut big = x.clone();
    for s in xs {
        big = merge_union(&big, s.elems());
    }
    if big.is_empty() || !a.contains(&HfSet::from_sorted(big)) {
        return false;
    }
    // (c)
    for (i, s) in xs.iter().enumerate() {
        for r in &xs[i + 1..] {
            if !s.is_subset(r) && !r.is_subset(s) {
                return false;
            }
        }
    }
    // (d)
    for s in xs {
        let xs_union = merge_union(&x, s.elems());
        for m in t.members() {
            if sorted_subset(m.elems(), &xs_union) && !m.is_subset(s) {
                return false;
            }
        }
    }
    true
}

/// Number of linear extensions by brute force over all permutations; a test oracle.
pub fn count_linear_extensions_brute(items: &[HfSet]) -> usize {
    fn rec(items: &[HfSet], used: &mut Vec<bool>, order: &mut Vec<usize>, count: &mut usize) {
        if order.len() == items.len() {
            let ok = (0..order.len()).all(|i| {
                (i + 1..order.len()).all(|j| !items[order[j]].is_subset(&items[order[i]]))
            });
            if ok {
                *count += 1;
            }
            return;
        }
        for i in 0..items.len() {
            if !used[i] {
                used[i] = true;
                order.push(i);
                rec(items, used, order, count);
                order.pop();
                used[i] = false;
            }
        }
    }
    let mut count = 0;
    rec(items, &mut vec![false; items.len()], &mut Vec::new(), &mut count);
    count
}

/// Distinct members of a list, preserving the first occurrence.
pub fn dedup_preserving(v: &[HfSet]) -> Vec<HfSet> {
    let mut seen = HashSet::new();
    v.iter().filter(|x| seen.insert((*x).clone())).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hfset::parse;

    fn p(s: &str) -> HfSet {
        parse(s).unwrap()
    }

    fn seq(items: &[&str]) -> DivSeq {
        DivSeq(items.iter().map(|s| p(s)).collect())
    }

    #[test]
    fn face_of_seq_examples() {
        let ur = Ur::letters(3);
        assert!(is_face_of_seq(&p("{a,b}"), &seq(&["{a,b,c}"]), &ur));
        assert!(!is_face_of_seq(&p("{a,b,c}"), &seq(&["{a,b,c}"]), &ur));
        let am = p("{a,{a,b,c}}");
        assert!(is_face_of_seq(&am, &seq(&["{a,b,c}"]), &ur));
        assert!(faces_of_seq(&seq(&["{a,b,c}"]), &ur).contains(&am));
    }

    #[test]
    fn faces_and_vertices() {
        let ur2 = Ur::letters(2);
        assert_eq!(faces_of_seq(&DivSeq::default(), &ur2).len(), 3);
        assert_eq!(faces_of_seq(&seq(&["{a,b}"]), &ur2).len(), 5);
        let ur = Ur::letters(3);
        assert_eq!(vr(&DivSeq::default(), &ur).len(), 3);
        assert_eq!(vr(&seq(&["{a,b,c}"]), &ur).len(), 4);
        assert_eq!(vr(&seq(&["{a,b,c}", "{a,b,c}"]), &ur).len(), 4);
    }

    #[test]
    fn fingerprints() {
        let ur = Ur::letters(3);
        let f = |s: &[&str]| equiv_fingerprint(&seq(s), &ur);
        assert_eq!(f(&["{a}", "{b}"]), f(&["{b}", "{a}"]));
        assert_eq!(f(&["{a,b}", "{a,b}"]), f(&["{a,b}"]));
        assert_ne!(f(&["{a,b}", "{a,c}"]), f(&["{a,c}", "{a,b}"]));
    }

    #[test]
    fn rewrite_examples() {
        let ur = Ur::letters(2);
        let r = rewrite_equiv(&seq(&["{a}", "{b}"]), &seq(&["{b}", "{a}"]), &ur, 12);
        assert!(matches!(r, Equivalence::Proven { depth: 1, .. }));
        let s = seq(&["{a,b}"]);
        assert!(matches!(rewrite_equiv(&s, &s, &ur, 0), Equivalence::Proven { depth: 0, .. }));
        let ur3 = Ur::letters(3);
        let r = rewrite_equiv(&seq(&["{a,b}", "{a,c}"]), &seq(&["{a,c}", "{a,b}"]), &ur3, 6);
        assert_eq!(r, Equivalence::Unknown);
    }

    #[test]
    fn enumeration_examples() {
        let chain: Vec<Vec<HfSet>> = nondecreasing_enumerations(&[p("{a,b,c}"), p("{a,b}")]).collect();
        assert_eq!(chain, vec![vec![p("{a,b}"), p("{a,b,c}")]]);
        assert_eq!(nondecreasing_enumerations(&[p("{a,b}"), p("{a,c}")]).count(), 2);
        let bary = [p("{a,b}"), p("{a,c}"), p("{b,c}"), p("{a,b,c}")];
        assert_eq!(nondecreasing_enumerations(&bary).count(), count_linear_extensions_brute(&bary));
        assert_eq!(nondecreasing_enumerations(&bary).count(), 6);
        assert_eq!(nondecreasing_enumerations(&[]).count(), 1);
    }

    #[test]
    fn barycentric_family_division() {
        let tri = Complex::full(&Ur::letters(3));
        let fam = AdditiveFamily::new(
            tri.faces().iter().filter(|f| f.len() >= 2).cloned(),
            &tri,
        )
        .unwrap();
        let results: BTreeSet<Vec<HfSet>> = fam
            .enumerations()
            .map(|e| tri.subdivide_seq(&e).faces().iter().cloned().collect())
            .collect();
        assert_eq!(results.len(), 1);
        assert_eq!(divide_by_family(&tri, &fam).len(), 25);
        assert_eq!(divide_by_family(&tri, &AdditiveFamily::empty()), tri);
    }

    #[test]
    fn not_additive() {
        let tri = Complex::full(&Ur::letters(3));
        assert!(matches!(
            AdditiveFamily::new([p("{a,b}"), p("{a,c}")], &tri),
            Err(SeqError::NotAdditive { .. })
        ));
        assert!(matches!(
            AdditiveFamily::new([p("{a,d}")], &tri),
            Err(SeqError::NotAFace(_))
        ));
    }

    #[test]
    fn linear_predicate_examples() {
        let tri = Complex::full(&Ur::letters(3));
        let t = AdditiveFamily::new([p("{a,b}"), p("{a,b,c}")], &tri).unwrap();
        let ta = divide_by_family(&tri, &t);
        // {a,b,c} is divided first, so c and {a,b} no longer span a face
        assert!(!linear_face_predicate(&[p("c")], &[p("{a,b}")], &t, &tri));
        assert!(!ta.contains(&p("{c}").with(p("{a,b}"))));
        assert!(linear_face_predicate(&[p("c")], &[p("{a,b,c}")], &t, &tri));
        assert!(ta.contains(&p("{c}").with(p("{a,b,c}"))));
        assert!(!linear_face_predicate(&[p("a"), p("b")], &[], &t, &tri));
        assert!(linear_face_predicate(&[], &[p("{a,b}"), p("{a,b,c}")], &t, &tri));
    }
}

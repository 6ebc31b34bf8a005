use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{precondition, unverified, AmalgamError};
use crate::hfset::HfSet;

/// A linear order on `S ∪ T` extending inclusion, with
/// `t ≺ t_s ⟺ t ≺ s ⟺ s^t ≺ s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatingOrder {
    order: Vec<HfSet>,
    #[serde(skip)]
    rank: BTreeMap<HfSet, usize>,
}

impl SeparatingOrder {
    /// Elements from smallest to largest.
    pub fn order(&self) -> &[HfSet] {
        &self.order
    }

    pub fn rank(&self, x: &HfSet) -> usize {
        self.rank[x]
    }

    pub fn precedes(&self, a: &HfSet, b: &HfSet) -> bool {
        self.rank(a) < self.rank(b)
    }

    /// Checks inclusion-compatibility and the three-way equivalence for every pair.
    pub fn verify(&self, s: &BTreeSet<HfSet>, t: &BTreeSet<HfSet>) -> Result<(), AmalgamError> {
        let all: BTreeSet<&HfSet> = s.iter().chain(t).collect();
        if all.len() != self.order.len() || self.order.iter().any(|x| !all.contains(x)) {
            return Err(unverified("order is not a permutation of S ∪ T"));
        }
        for a in &self.order {
            for b in &self.order {
                if a != b && a.is_subset(b) && !self.precedes(a, b) {
                    return Err(unverified(format!("{a} ⊂ {b} but not {a} ≺ {b}")));
                }
            }
        }
        for sv in s {
            let ts = least_cover(self, t, sv).ok_or_else(|| unverified(format!("no t above {sv}")))?;
            for tv in t {
                let st = top_below(s, tv).ok_or_else(|| unverified(format!("no s below {tv}")))?;
                let a = self.precedes(tv, &ts);
                let b = self.precedes(tv, sv);
                let c = self.precedes(&st, sv);
                if a != b || b != c {
                    return Err(unverified(format!("equivalence fails at s={sv}, t={tv}")));
                }
            }
        }
        Ok(())
    }
}

/// `s^t`: the union of all members of `S` inside `t`, when that union is a member.
pub(crate) fn top_below(s: &BTreeSet<HfSet>, t: &HfSet) -> Option<HfSet> {
    let below: Vec<&HfSet> = s.iter().filter(|x| x.is_subset(t)).collect();
    let first = below.first()?;
    let u = below.iter().fold((*first).clone(), |acc, x| acc.union(x));
    s.contains(&u).then_some(u)
}

/// `t_s`: the least member of `T` above `s`.
pub(crate) fn least_cover(ord: &SeparatingOrder, t: &BTreeSet<HfSet>, s: &HfSet) -> Option<HfSet> {
    t.iter().filter(|x| s.is_subset(x)).min_by_key(|x| ord.rank(x)).cloned()
}

/// Builds the order from the blocks `B_s ∖ {s}, s, A_s ∖ {s}` for `s ∈ S_1`
/// in canonical order, canonical order inside each block.
pub fn separating_order(s: &BTreeSet<HfSet>, t: &BTreeSet<HfSet>) -> Result<SeparatingOrder, AmalgamError> {
    let mut a_blocks: BTreeMap<HfSet, Vec<HfSet>> = BTreeMap::new();
    for tv in t {
        if !s.iter().any(|x| x.is_subset(tv)) {
            return Err(precondition("(IV)", format!("no member of S lies in {tv}")));
        }
        let st = top_below(s, tv).ok_or_else(|| precondition("(I)", format!("S is not additive below {tv}")))?;
        a_blocks.entry(st).or_default().push(tv.clone());
    }
    let s1: Vec<HfSet> = a_blocks.keys().cloned().collect();
    let mut b_blocks: BTreeMap<HfSet, Vec<HfSet>> = BTreeMap::new();
    for sv in s {
        let home = s1
            .iter()
            .find(|x| sv.is_subset(x))
            .ok_or_else(|| precondition("(V)", format!("no member of T contains {sv}")))?;
        b_blocks.entry(home.clone()).or_default().push(sv.clone());
    }
    let mut order = Vec::new();
    for head in &s1 {
        let b = b_blocks.remove(head).unwrap_or_default();
        order.extend(b.into_iter().filter(|x| x != head));
        order.push(head.clone());
        order.extend(a_blocks[head].iter().filter(|x| *x != head).cloned());
    }
    let rank = order.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
    let ord = SeparatingOrder { order, rank };
    ord.verify(s, t)?;
    Ok(ord)
}

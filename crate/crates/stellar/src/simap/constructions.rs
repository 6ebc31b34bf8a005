//! Derived isomorphisms and collapse maps built from the typed generators.

use serde::{Deserialize, Serialize};

use super::{IsoKind, MapError, MapExpr};
use crate::complex::Complex;
use crate::hfset::HfSet;
use crate::seqcalc::is_nondecreasing;

fn fail(msg: impl Into<String>) -> MapError {
    MapError::SideConditionFailed(msg.into())
}

fn plus(items: &[HfSet], x: &HfSet) -> HfSet {
    HfSet::from_elems(items.iter().cloned().chain(std::iter::once(x.clone()))).unwrap()
}

/// `s t q → ((t∖s)∪{s}) s q`, `t ↦ (t∖s)∪{s}`, as `β_{s,t} ∘ δ^t`.
pub fn commut_i(q: &Complex, s: &HfSet, t: &HfSet) -> Result<MapExpr, MapError> {
    if !q.contains(t) {
        return Err(fail(format!("{t} is not a face")));
    }
    if !s.is_subset(t) {
        return Err(fail(format!("{s} ⊄ {t}")));
    }
    let ctx = q.subdivide_seq(&[s.clone(), t.clone()]);
    let delta = MapExpr::typed_iso(IsoKind::Type3a { x: t.clone() }, &ctx)?;
    let beta = MapExpr::typed_iso(IsoKind::Type2 { s: s.clone(), t: t.clone() }, q)?;
    beta.compose(&delta)
}

/// `(r∪{t}) s t q → ((t∖s)∪{s}) ((t∖r)∪{s}) s q` with
/// `t ↦ (t∖r)∪{s}` and `r∪{t} ↦ (t∖s)∪{s}`.
pub fn commut_ii(q: &Complex, r: &[HfSet], s: &HfSet, t: &HfSet) -> Result<MapExpr, MapError> {
    if let Some(x) = r.iter().find(|x| !s.is_member(x)) {
        return Err(fail(format!("{x} ∉ {s}")));
    }
    let g = commut_i(q, s, t)?;
    if r.is_empty() {
        let ctx = q.subdivide_seq(&[s.clone(), t.clone()]);
        let d = MapExpr::typed_iso(IsoKind::Type3b { x: t.clone() }, &ctx)?;
        return g.compose(&d);
    }
    let s_minus_r = s.minus(&HfSet::from_elems(r.iter().cloned())?);
    let f = MapExpr::typed_iso(
        IsoKind::Type1 {
            r: r.to_vec(),
            s: s_minus_r.clone(),
            t: t.clone(),
        },
        q,
    )?;
    let v = plus(&t.minus(s), s);
    let g2 = g.divide(&plus(&s_minus_r, &v));
    let t_minus_r = t.minus(&HfSet::from_elems(r.iter().cloned())?);
    let h = commut_i(&q.subdivide(s), &v, &plus(&t_minus_r, s))?;
    MapExpr::compose_all(&[h.inverse()?, g2, f])
}

/// One block `r_i s_i1 ⋯ s_in` of the collapse data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Org6Group {
    pub r: HfSet,
    pub s: Vec<HfSet>,
}

/// `p (r_1 s_11⋯) ⋯ (r_m s_m1⋯) q → p r_1⋯r_m q`, `s_ij ↦ r_i`, built from
/// divisions of derived isomorphisms and welds.
pub fn org6(q: &Complex, p: &[HfSet], groups: &[Org6Group]) -> Result<MapExpr, MapError> {
    let mut full: Vec<HfSet> = p.to_vec();
    for g in groups {
        full.push(g.r.clone());
        full.extend(g.s.iter().cloned());
    }
    for x in &full {
        if !q.contains(x) {
            return Err(fail(format!("{x} is not a face")));
        }
    }
    for g in groups {
        if let Some(s) = g.s.iter().find(|s| !g.r.is_subset(s)) {
            return Err(fail(format!("{} ⊄ {s}", g.r)));
        }
    }
    if !is_nondecreasing(&full) {
        return Err(fail("sequence is not nondecreasing"));
    }
    let mut steps: Vec<MapExpr> = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        let mut p1: Vec<HfSet> = p.to_vec();
        p1.extend(groups[..i].iter().map(|g| g.r.clone()));
        let tail: Vec<HfSet> = groups[i + 1..]
            .iter()
            .flat_map(|g| std::iter::once(g.r.clone()).chain(g.s.iter().cloned()))
            .collect();
        let q1 = q.subdivide_seq(&tail);
        let primed: Vec<HfSet> = g.s.iter().map(|s| plus(&s.minus(&g.r), &g.r)).collect();
        for j in 0..g.s.len() {
            let ctx = q1.subdivide_seq(&g.s[j + 1..]);
            let f = commut_i(&ctx, &g.r, &g.s[j])?;
            let mut prefix = p1.clone();
            prefix.extend(primed[..j].iter().cloned());
            steps.push(f.divide_seq(&prefix));
        }
        for j in 0..g.s.len() {
            let mut rest: Vec<HfSet> = primed[j + 1..].to_vec();
            rest.push(g.r.clone());
            let ctx = q1.subdivide_seq(&rest);
            let w = MapExpr::weld(&ctx, &g.r, &primed[j])?;
            steps.push(w.divide_seq(&p1));
        }
    }
    if steps.is_empty() {
        return Ok(MapExpr::identity(&q.subdivide_seq(&full)));
    }
    steps.reverse();
    MapExpr::compose_all(&steps)
}

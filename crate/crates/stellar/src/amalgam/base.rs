use std::collections::{BTreeMap, BTreeSet};

use super::{unverified, AmalgamError};
use crate::hfset::HfSet;
use crate::seqcalc::AdditiveFamily;
use crate::simap::{org6, Kind, MapExpr, Org6Group};

/// A commuting square `π ∘ f = g' ∘ g`.
#[derive(Debug, Clone)]
pub struct AmalgamationResult {
    pub f: MapExpr,
    pub g: MapExpr,
    /// Factors of `g`, outermost first; each is a neat `π_ι`, a weld or an identity.
    pub neat_factors: Vec<MapExpr>,
}

impl AmalgamationResult {
    /// Checks `left ∘ f = right ∘ g` pointwise.
    pub fn verify(&self, left: &MapExpr, right: &MapExpr) -> Result<(), AmalgamError> {
        let a = left.map().compose(self.f.map())?;
        let b = right.map().compose(self.g.map())?;
        if a.same_as(&b) {
            Ok(())
        } else {
            Err(unverified("square does not commute"))
        }
    }
}

/// Amalgamates a single weld `π` against `g'` with the same codomain.
pub fn amalgamate_base(pi: &MapExpr, g_prime: &MapExpr) -> Result<AmalgamationResult, AmalgamError> {
    let (p, s0) = match pi.kind() {
        Kind::Weld { p, t } => (p.clone(), t.clone()),
        _ => return Err(AmalgamError::UnsupportedProvenance("base case needs a weld".into())),
    };
    if pi.cod() != g_prime.cod() {
        return Err(unverified("maps have different codomains"));
    }
    let q = g_prime.dom().clone();
    if !g_prime.cod().contains(&s0) {
        let res = AmalgamationResult {
            f: g_prime.clone(),
            g: MapExpr::identity(&q),
            neat_factors: Vec::new(),
        };
        res.verify(pi, g_prime)?;
        return Ok(res);
    }
    let s: BTreeSet<HfSet> = g_prime.map().preimage(&s0);
    let f1 = g_prime.divide(&s0);
    let t: BTreeSet<HfSet> = q
        .faces().iter()
        .filter(|x| s.iter().any(|y| y.is_subset(x)))
        .cloned()
        .collect();
    let mut s_sorted: Vec<HfSet> = s.iter().cloned().collect();
    s_sorted.sort();
    let groups: Vec<Org6Group> = s_sorted
        .iter()
        .map(|si| {
            let above: Vec<HfSet> = t
                .iter()
                .filter(|x| *x != si && super::order::top_below(&s, x).as_ref() == Some(si))
                .cloned()
                .collect();
            Org6Group { r: si.clone(), s: above }
        })
        .collect();
    let f2 = org6(&q, &[], &groups)?;
    let mut iota = BTreeMap::new();
    for tv in &t {
        let st = super::order::top_below(&s, tv).ok_or_else(|| unverified("preimage is not additive"))?;
        let x = st
            .iter()
            .filter(|x| g_prime.map().apply(x) == &p)
            .min()
            .cloned()
            .ok_or_else(|| unverified(format!("no vertex of {st} lands on {p}")))?;
        iota.insert(tv.clone(), x);
    }
    let fam = AdditiveFamily::new(t, &q)?;
    let g = MapExpr::pi_iota(&q, &fam, &iota)?;
    let f = f1.compose(&f2)?;
    let res = AmalgamationResult {
        f,
        g: g.clone(),
        neat_factors: vec![g],
    };
    res.verify(pi, g_prime)?;
    Ok(res)
}

/// Amalgamates a composition of welds against `g'`.
pub fn amalgamate_over_welds(f_prime: &MapExpr, g_prime: &MapExpr) -> Result<AmalgamationResult, AmalgamError> {
    let chain = f_prime
        .expand_welds()
        .map_err(|e| AmalgamError::UnsupportedProvenance(format!("not a composition of welds: {e}")))?;
    if chain.is_empty() {
        if f_prime.cod() != g_prime.cod() {
            return Err(unverified("maps have different codomains"));
        }
        return Ok(AmalgamationResult {
            f: g_prime.clone(),
            g: MapExpr::identity(g_prime.dom()),
            neat_factors: Vec::new(),
        });
    }
    amalgamate_over_chain(&chain, g_prime)
}

/// Amalgamates a chain of welds (outermost first) against `g'`.
pub(crate) fn amalgamate_over_chain(chain: &[MapExpr], g_prime: &MapExpr) -> Result<AmalgamationResult, AmalgamError> {
    let mut f = g_prime.clone();
    let mut gs: Vec<MapExpr> = Vec::new();
    let mut neat = Vec::new();
    for w in chain {
        let step = amalgamate_base(w, &f)?;
        f = step.f;
        neat.extend(step.neat_factors);
        gs.push(step.g);
    }
    let g = if gs.is_empty() {
        MapExpr::identity(g_prime.dom())
    } else {
        MapExpr::compose_all(&gs)?
    };
    let res = AmalgamationResult { f, g, neat_factors: neat };
    if let Some(first) = chain.first() {
        let whole = MapExpr::compose_all(chain)?;
        if first.cod() != g_prime.cod() {
            return Err(unverified("chain and map have different codomains"));
        }
        res.verify(&whole, g_prime)?;
    }
    Ok(res)
}

/// A weld chain `g` and a map `f` with `chain ∘ f = g' ∘ g`, using the
/// preimage family itself rather than its upward closure.
pub(crate) fn lean_over_welds(chain: &[MapExpr], g_prime: &MapExpr) -> Result<(MapExpr, Vec<MapExpr>), AmalgamError> {
    let mut f = g_prime.clone();
    let mut welds = Vec::new();
    for w in chain {
        let Kind::Weld { p, t } = w.kind() else {
            return Err(AmalgamError::UnsupportedProvenance("chain entry is not a weld".into()));
        };
        if !w.cod().contains(t) {
            continue;
        }
        let q = f.dom().clone();
        let pre = f.map().preimage(t);
        let mut iota = BTreeMap::new();
        for s in &pre {
            let x = s
                .iter()
                .filter(|x| f.map().apply(x) == p)
                .min()
                .cloned()
                .ok_or_else(|| unverified(format!("no vertex of {s} lands on {p}")))?;
            iota.insert(s.clone(), x);
        }
        let fam = AdditiveFamily::new(pre, &q)?;
        welds.extend(MapExpr::pi_iota(&q, &fam, &iota)?.expand_welds()?);
        f = f.divide(t);
    }
    Ok((f, welds))
}

use std::collections::BTreeSet;

use super::base::{amalgamate_over_chain, lean_over_welds};
use super::{main_lemma_certificate, unverified, AmalgamError, AmalgamationResult};
use crate::complex::Complex;
use crate::hfset::HfSet;
use crate::seqcalc::AdditiveFamily;
use crate::simap::{org6, IsoKind, Kind, MapExpr, Org6Group};

/// A composition of welds, outermost first; the identity on `dom` when empty.
#[derive(Debug, Clone)]
pub struct WeldChain {
    pub dom: Complex,
    pub welds: Vec<MapExpr>,
}

impl WeldChain {
    fn empty(dom: &Complex) -> WeldChain {
        WeldChain {
            dom: dom.clone(),
            welds: Vec::new(),
        }
    }

    pub fn compose(&self) -> Result<MapExpr, AmalgamError> {
        if self.welds.is_empty() {
            Ok(MapExpr::identity(&self.dom))
        } else {
            Ok(MapExpr::compose_all(&self.welds)?)
        }
    }
}

/// `h ∘ f` equals a composition of welds.
#[derive(Debug, Clone)]
pub struct Coinitial {
    pub f: MapExpr,
    pub chain: WeldChain,
}

impl Coinitial {
    pub fn verify(&self, h: &MapExpr) -> Result<(), AmalgamError> {
        let lhs = h.map().compose(self.f.map())?;
        if !lhs.same_as(self.chain.compose()?.map()) {
            return Err(unverified("h ∘ f differs from the weld chain"));
        }
        Ok(())
    }
}

/// A map `f` with `h ∘ f` a composition of welds.
pub fn coinitiality(h: &MapExpr) -> Result<Coinitial, AmalgamError> {
    let w = witness(h)?;
    w.verify(h)?;
    Ok(w)
}

/// Amalgamates `f'` and `g'` over their common codomain: `f' ∘ f = g' ∘ g`.
pub fn amalgamate(f_prime: &MapExpr, g_prime: &MapExpr) -> Result<AmalgamationResult, AmalgamError> {
    if f_prime.cod() != g_prime.cod() {
        return Err(unverified("maps have different codomains"));
    }
    let c = coinitiality(f_prime)?;
    let res = if c.chain.welds.is_empty() {
        AmalgamationResult {
            f: g_prime.clone(),
            g: MapExpr::identity(g_prime.dom()),
            neat_factors: Vec::new(),
        }
    } else {
        amalgamate_over_chain(&c.chain.welds, g_prime)?
    };
    let out = AmalgamationResult {
        f: c.f.compose(&res.f)?,
        g: res.g,
        neat_factors: res.neat_factors,
    };
    out.verify(f_prime, g_prime)?;
    Ok(out)
}

fn iso_witness(h: &MapExpr) -> Result<Coinitial, AmalgamError> {
    Ok(Coinitial {
        f: h.inverse()?,
        chain: WeldChain::empty(h.cod()),
    })
}

fn witness(h: &MapExpr) -> Result<Coinitial, AmalgamError> {
    match h.kind() {
        Kind::Identity => Ok(Coinitial {
            f: MapExpr::identity(h.dom()),
            chain: WeldChain::empty(h.dom()),
        }),
        Kind::Weld { .. } => Ok(Coinitial {
            f: MapExpr::identity(h.dom()),
            chain: WeldChain {
                dom: h.dom().clone(),
                welds: vec![h.clone()],
            },
        }),
        Kind::PiIota { .. } => Ok(Coinitial {
            f: MapExpr::identity(h.dom()),
            chain: WeldChain {
                dom: h.dom().clone(),
                welds: h.expand_welds()?,
            },
        }),
        Kind::Iso { .. } => iso_witness(h),
        Kind::Raw => Err(AmalgamError::UnsupportedProvenance(
            "a raw vertex function carries no weld-division provenance".into(),
        )),
        Kind::Compose { left, right } => compose_witness(&witness(left)?, &witness(right)?),
        Kind::Divide { child, s } => divide_witness(child, witness(child)?, s),
        Kind::DivideFamily { child, family } => {
            let mut cur = child.clone();
            let mut w = witness(child)?;
            for s in family.enumeration().iter().rev() {
                w = divide_witness(&cur, w, s)?;
                cur = cur.divide(s);
            }
            Ok(w)
        }
    }
}

/// From witnesses of `L` and `R`, a witness of `L ∘ R`.
fn compose_witness(left: &Coinitial, right: &Coinitial) -> Result<Coinitial, AmalgamError> {
    let (x, ys) = lean_over_welds(&right.chain.welds, &left.f)?;
    let dom = x.dom().clone();
    let mut welds: Vec<MapExpr> = left.chain.welds.clone();
    welds.extend(ys);
    welds.retain(|w| !matches!(w.kind(), Kind::Weld { t, .. } if !w.cod().contains(t)));
    Ok(Coinitial {
        f: right.f.compose(&x)?,
        chain: WeldChain { dom, welds },
    })
}

fn fold_witnesses(ws: Vec<Coinitial>, dom: &Complex) -> Result<Coinitial, AmalgamError> {
    let mut it = ws.into_iter().rev();
    let Some(mut acc) = it.next() else {
        return Ok(Coinitial {
            f: MapExpr::identity(dom),
            chain: WeldChain::empty(dom),
        });
    };
    for w in it {
        acc = compose_witness(&w, &acc)?;
    }
    Ok(acc)
}

/// From a witness of `child`, a witness of `s·child`.
fn divide_witness(child: &MapExpr, w: Coinitial, s: &HfSet) -> Result<Coinitial, AmalgamError> {
    if !child.cod().contains(s) {
        return Ok(w);
    }
    let top = AdditiveFamily::new([s.clone()], child.cod())?;
    let mut fam = top.clone();
    let mut parts = Vec::with_capacity(w.chain.welds.len());
    for pi in &w.chain.welds {
        parts.push(divided_weld_witness(pi, &fam)?);
        fam = pi.map().preimage_family(&fam);
    }
    let dom = w.chain.dom.clone();
    let folded = fold_witnesses(parts, &crate::seqcalc::divide_by_family(&dom, &fam))?;
    let pulled = child.map().preimage_family(&top);
    let lifted = w.f.divide_family(&pulled)?;
    debug_assert!(
        child.map().compose(w.f.map())?.divide_family(&top).same_as(&child.divide(s).map().compose(lifted.map())?),
        "division does not distribute over the composition"
    );
    let f = lifted.compose(&folded.f)?;
    Ok(Coinitial { f, chain: folded.chain })
}

/// A witness of `S·π` for a weld `π`.
fn divided_weld_witness(pi: &MapExpr, family: &AdditiveFamily) -> Result<Coinitial, AmalgamError> {
    let divided = pi.divide_family(family)?;
    let Kind::Weld { p, t } = pi.kind() else {
        return Err(unverified("expected a weld"));
    };
    if pi.classes().iso {
        return iso_witness(&divided);
    }
    let q = pi.cod();
    let mut tt: BTreeSet<HfSet> = BTreeSet::new();
    tt.insert(t.clone());
    for s in family.members() {
        let u = s.union(t);
        if q.contains(&u) {
            tt.insert(u);
        }
    }
    let t_fam = AdditiveFamily::new(tt.iter().cloned(), q)?;
    let rest: Vec<HfSet> = tt.iter().filter(|x| *x != t).cloned().collect();
    let rho = org6(q, &[], &[Org6Group { r: t.clone(), s: rest }])?;
    let cert = main_lemma_certificate(family, &t_fam, p, q)?;
    let inner = pure_witness(&cert.generators)?;
    let pulled = pi.map().preimage_family(family);
    let f = rho.divide_family(&pulled)?.compose(&inner.f)?;
    Ok(Coinitial { f, chain: inner.chain })
}

/// A factor of a pure map: an isomorphism or `divs·π` for a weld `π`.
enum Factor {
    Iso(MapExpr),
    DivWeld { weld: MapExpr, divs: Vec<HfSet> },
}

impl Factor {
    fn expr(&self) -> MapExpr {
        match self {
            Factor::Iso(e) => e.clone(),
            Factor::DivWeld { weld, divs } => weld.divide_seq(divs),
        }
    }

    fn divide(self, s: &HfSet) -> Factor {
        match self {
            Factor::Iso(e) => Factor::Iso(e.divide(s)),
            Factor::DivWeld { weld, mut divs } => {
                divs.insert(0, s.clone());
                Factor::DivWeld { weld, divs }
            }
        }
    }
}

fn unique_preimage(f: &MapExpr, s: &HfSet) -> Result<HfSet, AmalgamError> {
    let pre = f.map().preimage(s);
    if pre.len() != 1 {
        return Err(unverified(format!("division by {s} is not pure")));
    }
    Ok(pre.into_iter().next().unwrap())
}

/// Distributes a pure division over factors listed outermost first.
fn distribute(factors: Vec<Factor>, s: &HfSet) -> Result<Vec<Factor>, AmalgamError> {
    let mut cur = s.clone();
    let mut out = Vec::with_capacity(factors.len());
    for fac in factors {
        let e = fac.expr();
        if !e.cod().contains(&cur) {
            return Err(unverified(format!("{cur} is not a face")));
        }
        let next = unique_preimage(&e, &cur)?;
        out.push(fac.divide(&cur));
        cur = next;
    }
    Ok(out)
}

fn normalize(e: &MapExpr) -> Result<Vec<Factor>, AmalgamError> {
    if e.classes().iso {
        return Ok(vec![Factor::Iso(e.clone())]);
    }
    match e.kind() {
        Kind::Identity | Kind::Iso { .. } => Ok(vec![Factor::Iso(e.clone())]),
        Kind::Weld { .. } => Ok(vec![Factor::DivWeld {
            weld: e.clone(),
            divs: Vec::new(),
        }]),
        Kind::PiIota { .. } => {
            let mut out = Vec::new();
            for w in e.expand_welds()? {
                out.extend(normalize(&w)?);
            }
            Ok(out)
        }
        Kind::Compose { left, right } => {
            let mut out = normalize(left)?;
            out.extend(normalize(right)?);
            Ok(out)
        }
        Kind::Divide { child, s } => {
            let inner = normalize(child)?;
            if child.cod().contains(s) {
                distribute(inner, s)
            } else {
                Ok(inner)
            }
        }
        Kind::DivideFamily { child, family } => {
            let mut cur = child.clone();
            let mut out = normalize(child)?;
            for s in family.enumeration().iter().rev() {
                if cur.cod().contains(s) {
                    out = distribute(out, s)?;
                }
                cur = cur.divide(s);
            }
            Ok(out)
        }
        Kind::Raw => Err(AmalgamError::UnsupportedProvenance("raw factor in a pure map".into())),
    }
}

/// A witness for a composition of pure maps listed outermost first.
pub(crate) fn pure_witness(gens: &[MapExpr]) -> Result<Coinitial, AmalgamError> {
    let mut factors = Vec::new();
    for g in gens {
        factors.extend(normalize(g)?);
    }
    let dom = gens.last().expect("nonempty chain").dom().clone();
    let ws = factors.iter().map(factor_witness).collect::<Result<Vec<_>, _>>()?;
    fold_witnesses(ws, &dom)
}

fn factor_witness(fac: &Factor) -> Result<Coinitial, AmalgamError> {
    match fac {
        Factor::Iso(e) => iso_witness(e),
        Factor::DivWeld { weld, divs } => div_weld_witness(weld, divs),
    }
}

/// Sequence of preimages of `seq` under `g`, rightmost first, for pure divisions.
fn pull(g: &MapExpr, seq: &[HfSet]) -> Result<Vec<HfSet>, AmalgamError> {
    let mut cur = g.clone();
    let mut out = Vec::with_capacity(seq.len());
    for d in seq.iter().rev() {
        if cur.cod().contains(d) {
            out.push(unique_preimage(&cur, d)?);
        }
        cur = cur.divide(d);
    }
    out.reverse();
    Ok(out)
}

fn div_weld_witness(weld: &MapExpr, divs: &[HfSet]) -> Result<Coinitial, AmalgamError> {
    let Kind::Weld { p, t } = weld.kind() else {
        return Err(unverified("expected a weld"));
    };
    let q = weld.cod();
    let mut ctx = q.clone();
    let mut kept = Vec::new();
    for d in divs.iter().rev() {
        if ctx.contains(d) {
            if d.is_member(p) {
                return Err(unverified(format!("division by {d} meets the apex {p}")));
            }
            kept.push(d.clone());
            ctx = ctx.subdivide(d);
        }
    }
    kept.reverse();
    let Some((s, rest)) = kept.split_last() else {
        return Ok(Coinitial {
            f: MapExpr::identity(weld.dom()),
            chain: WeldChain {
                dom: weld.dom().clone(),
                welds: vec![weld.clone()],
            },
        });
    };
    let sq = q.subdivide(s);
    let (f, chain) = if !q.contains(&s.union(t)) {
        let w = MapExpr::weld(&sq, p, t)?;
        (MapExpr::identity(w.dom()), vec![w])
    } else {
        let h = MapExpr::typed_iso(IsoKind::Type2 { s: t.clone(), t: s.clone() }, q)?;
        let s_t = set(s.minus(t).into_iter().chain([t.clone()]));
        let pi0 = MapExpr::weld(&q.subdivide_seq(&[s.clone(), t.clone()]), t, &s_t)?;
        let t_s = set(t.minus(s).into_iter().chain([s.clone()]));
        let pi1 = MapExpr::weld(&sq, p, t)?;
        let pi2 = MapExpr::weld(&sq.subdivide(t), p, &t_s)?;
        (pi0.compose(&h)?, vec![pi1, pi2])
    };
    let head = Coinitial {
        chain: WeldChain {
            dom: f.dom().clone(),
            welds: chain,
        },
        f,
    };
    if rest.is_empty() {
        return Ok(head);
    }
    let sw = weld.divide(s);
    let pulled = pull(&sw, rest)?;
    let tail = pure_witness(&[head.chain.compose()?.divide_seq(rest)])?;
    let f = head.f.divide_seq(&pulled).compose(&tail.f)?;
    Ok(Coinitial { f, chain: tail.chain })
}

fn set(items: impl IntoIterator<Item = HfSet>) -> HfSet {
    HfSet::from_elems(items).expect("nonempty set")
}

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::order::{least_cover, top_below};
use super::{precondition, separating_order, unverified, AmalgamError, SeparatingOrder};
use crate::complex::Complex;
use crate::hfset::HfSet;
use crate::seqcalc::AdditiveFamily;
use crate::simap::{commut_ii, org6, ExprJson, IsoKind, MapExpr, Org6Group, SimplicialMap};

/// An ordered list of generators, outermost first, whose composition is claimed
/// to equal a target map.
#[derive(Debug, Clone)]
pub struct PureCertificate {
    pub generators: Vec<MapExpr>,
    pub target: SimplicialMap,
}

#[derive(Debug, Clone, Serialize)]
pub struct PureCertificateJson {
    pub generators: Vec<ExprJson>,
    pub all_pure: bool,
    pub composes_to_target: bool,
}

impl PureCertificate {
    pub fn compose(&self) -> Result<MapExpr, AmalgamError> {
        Ok(MapExpr::compose_all(&self.generators)?)
    }

    /// Every generator is in the pure class and the chain equals the target.
    pub fn verify(&self) -> Result<(), AmalgamError> {
        if let Some(g) = self.generators.iter().find(|g| !g.classes().pure) {
            return Err(unverified(format!("generator is not pure: {g}")));
        }
        if !self.compose()?.map().same_as(&self.target) {
            return Err(unverified("certificate does not compose to the target"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> PureCertificateJson {
        PureCertificateJson {
            generators: self.generators.iter().map(MapExpr::to_json).collect(),
            all_pure: self.generators.iter().all(|g| g.classes().pure),
            composes_to_target: self.compose().map(|c| c.map().same_as(&self.target)).unwrap_or(false),
        }
    }
}

fn set<I: IntoIterator<Item = HfSet>>(items: I) -> HfSet {
    HfSet::from_elems(items).expect("nonempty set")
}

/// `r ∪ X`.
fn extend(r: &[HfSet], xs: &[HfSet]) -> HfSet {
    set(r.iter().chain(xs).cloned())
}

/// Nonempty chains of `t` with least element `min`.
fn chains_from(t: &BTreeSet<HfSet>, min: &HfSet) -> Vec<Vec<HfSet>> {
    let above: Vec<&HfSet> = t.iter().filter(|x| *x != min && min.is_subset(x)).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<HfSet>)> = vec![(0, vec![min.clone()])];
    while let Some((i, chain)) = stack.pop() {
        if i == above.len() {
            out.push(chain);
            continue;
        }
        let x = above[i];
        if chain.iter().all(|c| c.is_subset(x) || x.is_subset(c)) {
            let mut with = chain.clone();
            with.push(x.clone());
            stack.push((i + 1, with));
        }
        stack.push((i + 1, chain));
    }
    out
}

/// The three-part description of `π_{p,T}⁻¹(S)`.
pub fn describe_preimage(s: &BTreeSet<HfSet>, t: &BTreeSet<HfSet>, p: &HfSet) -> BTreeSet<HfSet> {
    let mut out: BTreeSet<HfSet> = s.difference(t).cloned().collect();
    for sv in s.iter().filter(|x| x.is_member(p)) {
        let under = sv.minus(&HfSet::singleton(p.clone()));
        for m in t.iter().filter(|m| sv.is_subset(m)) {
            for x in chains_from(t, m) {
                if !t.contains(sv) {
                    out.insert(extend(sv.elems(), &x));
                }
                out.insert(extend(&under, &x));
            }
        }
    }
    out
}

fn check_conditions(s: &AdditiveFamily, t: &AdditiveFamily, p: &HfSet, ctx: &Complex) -> Result<(), AmalgamError> {
    AdditiveFamily::new(s.members().iter().cloned(), ctx).map_err(|e| precondition("(I)", format!("S: {e}")))?;
    AdditiveFamily::new(t.members().iter().cloned(), ctx).map_err(|e| precondition("(I)", format!("T: {e}")))?;
    for sv in s.members() {
        for tv in t.members() {
            let u = sv.union(tv);
            if ctx.contains(&u) && !t.contains(&u) {
                return Err(precondition("(II)", format!("{sv} ∪ {tv} is a face outside T")));
            }
        }
    }
    if let Some(tv) = t.members().iter().find(|x| !x.is_member(p)) {
        return Err(precondition("(III)", format!("{p} ∉ {tv}")));
    }
    Ok(())
}

/// A certificate that `S·π_{p,T}` is a pure weld-division map.
pub fn main_lemma_certificate(
    s: &AdditiveFamily,
    t: &AdditiveFamily,
    p: &HfSet,
    ctx: &Complex,
) -> Result<PureCertificate, AmalgamError> {
    check_conditions(s, t, p, ctx)?;
    let pi = MapExpr::pi_pt(ctx, p, t)?;
    let target = pi.map().divide_family(s);
    let generators = certify(s.members(), t.members(), p, ctx)?;
    let cert = PureCertificate { generators, target };
    cert.verify()?;
    Ok(cert)
}

/// The reductions, applied until (IV), (V) and (VI) hold.
fn certify(
    s: &BTreeSet<HfSet>,
    t: &BTreeSet<HfSet>,
    p: &HfSet,
    q: &Complex,
) -> Result<Vec<MapExpr>, AmalgamError> {
    if t.is_empty() {
        let fam = AdditiveFamily::new(s.iter().cloned(), q)?;
        return Ok(vec![MapExpr::identity(&crate::seqcalc::divide_by_family(q, &fam))]);
    }
    let s0: BTreeSet<HfSet> = s.iter().filter(|x| !x.is_member(p)).cloned().collect();
    if !s0.is_empty() {
        let rest: BTreeSet<HfSet> = s.difference(&s0).cloned().collect();
        let inner = certify(&rest, t, p, q)?;
        return divide_chain(&inner, &AdditiveFamily::new(s0, inner[0].cod())?);
    }
    let t_bare: BTreeSet<HfSet> = t.iter().filter(|x| !s.iter().any(|y| y.is_subset(x))).cloned().collect();
    if !t_bare.is_empty() {
        let rest: BTreeSet<HfSet> = t.difference(&t_bare).cloned().collect();
        let mut out = certify(s, &rest, p, q)?;
        let top = out.last().expect("nonempty chain").dom().clone();
        let fam = AdditiveFamily::new(t_bare, &top)?;
        let bridge = MapExpr::pi_pt(&top, p, &fam)?;
        out.extend(bridge.expand_welds()?);
        return Ok(out);
    }
    let s_free: BTreeSet<HfSet> = s.iter().filter(|x| !t.iter().any(|y| x.is_subset(y))).cloned().collect();
    if !s_free.is_empty() {
        let rest: BTreeSet<HfSet> = s.difference(&s_free).cloned().collect();
        let q2 = crate::seqcalc::divide_by_family(q, &AdditiveFamily::new(s_free, q)?);
        AdditiveFamily::new(t.iter().cloned(), &q2)?;
        return certify(&rest, t, p, &q2);
    }
    Core::new(s, t, p, q)?.run()
}

/// Pure division of a chain (outermost first) by an additive family of its codomain.
pub(crate) fn divide_chain(chain: &[MapExpr], family: &AdditiveFamily) -> Result<Vec<MapExpr>, AmalgamError> {
    let mut fam = family.clone();
    let mut out = Vec::with_capacity(chain.len());
    for g in chain {
        let next = g.map().preimage_family(&fam);
        out.push(g.divide_family(&fam)?);
        fam = next;
    }
    Ok(out)
}

/// Rewrites `vr(B) ∪ X` by the vertex map of a local isomorphism, right to left.
fn rename(left: &[HfSet], f: &SimplicialMap) -> Vec<HfSet> {
    let mut seen: BTreeMap<HfSet, HfSet> = BTreeMap::new();
    let mut out: Vec<HfSet> = left
        .iter()
        .rev()
        .map(|x| {
            let y = if x.is_atom() {
                x.clone()
            } else {
                set(x.iter().map(|v| seen.get(v).or_else(|| f.get(v)).cloned().unwrap_or_else(|| v.clone())))
            };
            seen.insert(x.clone(), y.clone());
            y
        })
        .collect();
    out.reverse();
    out
}

/// A sequence over a fixed base together with the maps applied so far.
struct Tracker<'a> {
    base: &'a Complex,
    cur: Vec<HfSet>,
    steps: Vec<MapExpr>,
}

impl<'a> Tracker<'a> {
    fn complex_of(&self, seq: &[HfSet]) -> Complex {
        self.base.subdivide_seq(seq)
    }

    fn after(&self, idx: usize) -> Complex {
        self.complex_of(&self.cur[idx..])
    }

    /// Replaces the sequence by one denoting the same complex.
    fn rewrite(&mut self, next: Vec<HfSet>, what: &str) -> Result<(), AmalgamError> {
        if self.complex_of(&next) != self.complex_of(&self.cur) {
            return Err(unverified(format!("rewrite {what} changes the complex")));
        }
        self.cur = next;
        Ok(())
    }

    fn push(&mut self, step: MapExpr, next: Vec<HfSet>, what: &str) -> Result<(), AmalgamError> {
        if step.dom() != &self.complex_of(&self.cur) {
            return Err(unverified(format!("{what}: domain mismatch")));
        }
        if step.cod() != &self.complex_of(&next) {
            return Err(unverified(format!("{what}: codomain mismatch")));
        }
        self.steps.push(step);
        self.cur = next;
        Ok(())
    }

    /// Collapses `cur[start..start+len]`, listed as `groups`, onto the group heads.
    fn collapse(&mut self, start: usize, len: usize, groups: Vec<Org6Group>) -> Result<(), AmalgamError> {
        let flat: Vec<HfSet> = groups
            .iter()
            .flat_map(|g| std::iter::once(g.r.clone()).chain(g.s.iter().cloned()))
            .collect();
        if flat[..] != self.cur[start..start + len] {
            return Err(unverified("collapse block does not match the sequence"));
        }
        let ctx = self.after(start + len);
        let prefix = self.cur[..start].to_vec();
        let step = org6(&ctx, &prefix, &groups)?;
        let mut next = prefix;
        next.extend(groups.iter().map(|g| g.r.clone()));
        next.extend(self.cur[start + len..].iter().cloned());
        self.push(step, next, "collapse")
    }

    /// Applies a local isomorphism on `cur[start..start+len]` divided by everything to its left.
    fn iso(&mut self, start: usize, len: usize, local: MapExpr, local_cod: Vec<HfSet>) -> Result<(), AmalgamError> {
        let left = rename(&self.cur[..start], local.map());
        let step = local.divide_seq(&left);
        let mut next = left;
        next.extend(local_cod);
        next.extend(self.cur[start + len..].iter().cloned());
        self.push(step, next, "isomorphism")
    }

    /// Welds the leftmost entry onto `p`.
    fn weld_head(&mut self, p: &HfSet) -> Result<(), AmalgamError> {
        let ctx = self.after(1);
        let head = self.cur[0].clone();
        let step = MapExpr::weld(&ctx, p, &head)?;
        let next = self.cur[1..].to_vec();
        self.push(step, next, "weld")
    }
}

/// The core case: (IV), (V), (VI) hold and `S`, `T` are nonempty.
struct Core<'a> {
    s: &'a BTreeSet<HfSet>,
    t: &'a BTreeSet<HfSet>,
    p: &'a HfSet,
    q: &'a Complex,
    ord: SeparatingOrder,
    s_sorted: Vec<HfSet>,
    t_sorted: Vec<HfSet>,
    t_of: BTreeMap<HfSet, HfSet>,
    s_of: BTreeMap<HfSet, HfSet>,
}

impl<'a> Core<'a> {
    fn new(s: &'a BTreeSet<HfSet>, t: &'a BTreeSet<HfSet>, p: &'a HfSet, q: &'a Complex) -> Result<Self, AmalgamError> {
        let ord = separating_order(s, t)?;
        let by_rank = |xs: &BTreeSet<HfSet>| {
            let mut v: Vec<HfSet> = xs.iter().cloned().collect();
            v.sort_by_key(|x| ord.rank(x));
            v
        };
        let s_sorted = by_rank(s);
        let t_sorted = by_rank(t);
        let t_of = s.iter().map(|x| (x.clone(), least_cover(&ord, t, x).unwrap())).collect();
        let s_of = t.iter().map(|x| (x.clone(), top_below(s, x).unwrap())).collect();
        Ok(Core {
            s,
            t,
            p,
            q,
            ord,
            s_sorted,
            t_sorted,
            t_of,
            s_of,
        })
    }

    fn under(&self, s: &HfSet) -> Vec<HfSet> {
        s.minus(&HfSet::singleton(self.p.clone()))
    }

    /// `r(τ) = r ∪ {τ}`.
    fn at(&self, r: &[HfSet], tau: &HfSet) -> HfSet {
        extend(r, std::slice::from_ref(tau))
    }

    /// Members of `T` above `s`, largest first.
    fn covers_desc(&self, s: &HfSet) -> Vec<HfSet> {
        self.t_sorted.iter().rev().filter(|x| s.is_subset(x)).cloned().collect()
    }

    /// `r[τ]` in canonical order; its first entry is `r(τ)`.
    fn bracket(&self, r: &[HfSet], tau: &HfSet) -> Vec<HfSet> {
        let v: BTreeSet<HfSet> = chains_from(self.t, tau).iter().map(|x| extend(r, x)).collect();
        v.into_iter().collect()
    }

    /// `⌈r⌉` for `r ∈ {s, s̲}`.
    fn ceil(&self, r: &[HfSet], s: &HfSet) -> Vec<HfSet> {
        self.covers_desc(s).iter().flat_map(|tau| self.bracket(r, tau)).collect()
    }

    /// `⌊s̲⌋`, or `⌊s̲⌋_t` / `⌊s̲⌋_{≻t}` when `from` is given.
    fn floor(&self, s: &HfSet, from: Option<(&HfSet, bool)>) -> Vec<HfSet> {
        let r = self.under(s);
        self.covers_desc(s)
            .iter()
            .filter(|tau| match from {
                None => true,
                Some((t, strict)) => {
                    let (a, b) = (self.ord.rank(tau), self.ord.rank(t));
                    if strict {
                        a > b
                    } else {
                        a >= b
                    }
                }
            })
            .map(|tau| self.at(&r, tau))
            .collect()
    }

    fn free_s(&self, t: &HfSet) -> Vec<HfSet> {
        self.s_sorted
            .iter()
            .filter(|x| !self.t.contains(*x) && &self.t_of[*x] == t)
            .cloned()
            .collect()
    }

    fn p_block(&self, t: &HfSet) -> Vec<HfSet> {
        let mut v = Vec::new();
        for x in self.s_sorted.iter().filter(|x| &self.t_of[*x] == t) {
            v.extend(self.floor(x, None));
            v.push(x.clone());
        }
        v
    }

    fn run(&self) -> Result<Vec<MapExpr>, AmalgamError> {
        let mut tr = Tracker {
            base: self.q,
            cur: Vec::new(),
            steps: Vec::new(),
        };
        self.hath(&mut tr)?;
        let blocks = self.cruc(&mut tr)?;
        for (block, t_hat) in blocks {
            for (entry, to) in block {
                debug_assert_eq!(tr.cur[0], entry);
                tr.weld_head(&to)?;
            }
            debug_assert_eq!(tr.cur[0], t_hat);
            tr.weld_head(self.p)?;
        }
        let mut steps = tr.steps;
        steps.reverse();
        Ok(steps)
    }

    /// `π⁻¹(S) T q → (∏_t P_t t) q`, by collapses processed from the largest `t` down.
    fn hath(&self, tr: &mut Tracker) -> Result<(), AmalgamError> {
        enum Sub {
            Under(HfSet),
            Upper(HfSet),
        }
        let mut layout: Vec<Vec<(Sub, usize)>> = Vec::new();
        let mut seq = Vec::new();
        for t in &self.t_sorted {
            let mut subs = Vec::new();
            for x in self.free_s(t) {
                let c = self.ceil(&self.under(&x), &x);
                subs.push((Sub::Under(x.clone()), c.len()));
                seq.extend(c);
                let c = self.ceil(x.elems(), &x);
                subs.push((Sub::Upper(x.clone()), c.len() + 1));
                seq.push(x.clone());
                seq.extend(c);
            }
            if self.s.contains(t) {
                let c = self.ceil(&self.under(t), t);
                subs.push((Sub::Under(t.clone()), c.len()));
                seq.extend(c);
            }
            layout.push(subs);
        }
        let t_len = seq.len();
        seq.extend(self.t_sorted.iter().cloned());
        tr.cur = seq;
        let pre = MapExpr::pi_pt(self.q, self.p, &AdditiveFamily::new(self.t.iter().cloned(), self.q)?)?;
        let fam = AdditiveFamily::new(self.s.iter().cloned(), self.q)?;
        let dom = pre.map().preimage_family(&fam);
        let expected = crate::seqcalc::divide_by_family(pre.dom(), &dom);
        if tr.complex_of(&tr.cur) != expected {
            return Err(unverified("preimage enumeration does not reproduce the domain"));
        }
        let _ = t_len;
        let mut offsets: Vec<usize> = Vec::new();
        let mut acc = 0;
        for subs in &layout {
            offsets.push(acc);
            acc += subs.iter().map(|(_, n)| n).sum::<usize>();
        }
        for (ti, subs) in layout.iter().enumerate().rev() {
            let mut starts = Vec::new();
            let mut o = offsets[ti];
            for (_, n) in subs {
                starts.push(o);
                o += n;
            }
            for ((sub, n), start) in subs.iter().zip(starts).rev() {
                match sub {
                    Sub::Upper(x) => {
                        let s_list = self.ceil(x.elems(), x);
                        tr.collapse(start, *n, vec![Org6Group { r: x.clone(), s: s_list }])?;
                    }
                    Sub::Under(x) => {
                        if *n == 0 {
                            continue;
                        }
                        let r = self.under(x);
                        let groups = self
                            .covers_desc(x)
                            .iter()
                            .map(|tau| {
                                let b = self.bracket(&r, tau);
                                Org6Group {
                                    r: b[0].clone(),
                                    s: b[1..].to_vec(),
                                }
                            })
                            .collect();
                        tr.collapse(start, *n, groups)?;
                    }
                }
            }
        }
        let mut target = Vec::new();
        for t in &self.t_sorted {
            target.extend(self.p_block(t));
            target.push(t.clone());
        }
        tr.rewrite(target, "to ∏ P_t t")
    }

    fn t_bar(&self, t: &HfSet) -> HfSet {
        let st = &self.s_of[t];
        let mut v = t.minus(st);
        v.push(st.clone());
        set(v)
    }

    fn t_hat(&self, t: &HfSet) -> HfSet {
        let st = &self.s_of[t];
        let under = self.under(st);
        let mut v: Vec<HfSet> = t.iter().filter(|x| !under.contains(x)).cloned().collect();
        v.push(st.clone());
        set(v)
    }

    /// `(∏_t P_t t) q → (∏_t Q_t t̂) S q`, one `t` at a time. Returns the blocks
    /// `Q_t` with their weld targets, and `t̂`.
    #[allow(clippy::type_complexity)]
    fn cruc(&self, tr: &mut Tracker) -> Result<Vec<(Vec<(HfSet, HfSet)>, HfSet)>, AmalgamError> {
        let mut outer: Vec<HfSet> = Vec::new();
        let mut blocks = Vec::new();
        for (ti, t) in self.t_sorted.iter().enumerate() {
            let mut b_seq = Vec::new();
            for tau in &self.t_sorted[ti + 1..] {
                b_seq.extend(self.p_block(tau));
                b_seq.push(tau.clone());
            }
            let st = self.s_of[t].clone();
            let rank_t = self.ord.rank(t);
            let below: Vec<HfSet> = self
                .s_sorted
                .iter()
                .filter(|x| self.ord.rank(x) < self.ord.rank(&st))
                .cloned()
                .collect();
            debug_assert!(self.s_sorted.iter().all(|x| (self.ord.rank(x) <= rank_t) == (self.ord.rank(x) <= self.ord.rank(&st))));
            let strict = |x: &HfSet| self.floor(x, Some((t, true)));
            let t_bar = self.t_bar(t);
            let t_hat = self.t_hat(t);
            let under_st = self.under(&st);

            // (∏_{s≺s^t} ⌊s̲⌋_{≻t} M_s) ⌊s̲^t⌋_{≻t} s̲^t(t) s^t t
            let mut seq = outer.clone();
            for x in &below {
                seq.extend(strict(x));
                if x.is_subset(t) {
                    seq.push(self.at(&self.under(x), t));
                }
                seq.push(x.clone());
            }
            seq.extend(strict(&st));
            let start = seq.len();
            seq.push(self.at(&under_st, t));
            seq.push(st.clone());
            seq.push(t.clone());
            seq.extend(b_seq.iter().cloned());
            tr.rewrite(seq, "before the commutation")?;
            let ctx = tr.after(start + 3);
            let local = commut_ii(&ctx, &under_st, &st, t)?;
            tr.iso(start, 3, local, vec![t_bar.clone(), t_hat.clone(), st.clone()])?;

            let pre_block = |x: &HfSet| {
                let mut v = strict(x);
                if x.is_subset(t) {
                    v.push(self.at(&self.under(x), &t_hat));
                }
                v.push(x.clone());
                v
            };
            let post_block = |x: &HfSet| {
                let mut v = strict(x);
                v.push(x.clone());
                v
            };
            let mut placed: Vec<HfSet> = Vec::new();
            let mut targets: Vec<(HfSet, HfSet)> = vec![(t_bar.clone(), st.clone())];
            let assemble = |placed: &[HfSet], upto: usize, hat_moved: &[HfSet]| {
                let mut v = outer.clone();
                v.push(t_bar.clone());
                v.extend(placed.iter().cloned());
                for x in &below[..upto] {
                    v.extend(pre_block(x));
                }
                v.push(t_hat.clone());
                v.extend(hat_moved.iter().cloned());
                v.extend(strict(&st));
                v.push(st.clone());
                v.extend(b_seq.iter().cloned());
                v
            };
            let mut tail: Vec<HfSet> = Vec::new();
            tr.rewrite(assemble(&placed, below.len(), &tail), "t̄ to the front")?;
            for i in (0..below.len()).rev() {
                let x = &below[i];
                if x.is_subset(t) {
                    let mut start = outer.len() + 1 + placed.len();
                    for y in &below[..i] {
                        start += pre_block(y).len();
                    }
                    start += strict(x).len();
                    let ctx = tr.after(start + 3);
                    let local = MapExpr::typed_iso(
                        IsoKind::Type2 {
                            s: x.clone(),
                            t: t_hat.clone(),
                        },
                        &ctx,
                    )?;
                    let tx = t_bar.with(x.clone());
                    tr.iso(start, 3, local, vec![tx.clone(), t_hat.clone(), x.clone()])?;
                    placed.push(tx.clone());
                    targets.push((tx, x.clone()));
                }
                let mut moved = post_block(x);
                moved.extend(tail);
                tail = moved;
                tr.rewrite(assemble(&placed, i, &tail), "t̂ moves left")?;
            }
            outer.push(t_bar.clone());
            outer.extend(placed.iter().cloned());
            outer.push(t_hat.clone());
            blocks.push((targets, t_hat));
        }
        let mut fin = outer;
        fin.extend(self.s_sorted.iter().cloned());
        tr.rewrite(fin, "to (∏ Q_t t̂) S")?;
        Ok(blocks)
    }
}

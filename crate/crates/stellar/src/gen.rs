//! Seeded random corpora of complexes, families and maps.

use std::collections::BTreeSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{nonempty_subsets, Complex};
use crate::hfset::{HfSet, Ur};
use crate::seqcalc::{AdditiveFamily, DivSeq};
use crate::simap::{IsoKind, MapExpr};

pub const DEFAULT_SEED: u64 = 0x5e11a;

/// Every subset-closed family of nonempty subsets of `Ur`, the empty complex included.
pub fn all_ground_complexes(ur: &Ur) -> Vec<Complex> {
    let atoms: Vec<HfSet> = ur.atoms().cloned().collect();
    let simplices: Vec<HfSet> = nonempty_subsets(&atoms).collect();
    assert!(simplices.len() < 32, "too many simplices to enumerate");
    let mut out = Vec::new();
    for mask in 0u32..1 << simplices.len() {
        let chosen: BTreeSet<&HfSet> = (0..simplices.len()).filter(|i| mask >> i & 1 == 1).map(|i| &simplices[i]).collect();
        let closed = chosen.iter().all(|s| {
            s.len() == 1 || s.iter().all(|x| chosen.contains(&s.without(x).unwrap()))
        });
        if closed {
            out.push(Complex::validate(ur, chosen.into_iter().cloned()).unwrap());
        }
    }
    out
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A random nonempty ground complex: the closure of a few random simplices.
    pub fn ground(&mut self, ur: &Ur) -> Complex {
        let atoms: Vec<HfSet> = ur.atoms().cloned().collect();
        let k = self.rng.gen_range(1..=3);
        let gens: Vec<HfSet> = (0..k)
            .map(|_| {
                let size = self.rng.gen_range(1..=atoms.len());
                HfSet::from_elems(atoms.choose_multiple(&mut self.rng, size).cloned()).unwrap()
            })
            .collect();
        Complex::closure(ur, &gens).unwrap()
    }

    pub fn face(&mut self, c: &Complex) -> HfSet {
        c.faces().iter().choose(&mut self.rng).unwrap().clone()
    }

    /// A sequence of `len` divisions by faces of the current complex.
    pub fn divided(&mut self, c: &Complex, len: usize) -> (DivSeq, Complex) {
        let mut cur = c.clone();
        let mut seq = Vec::new();
        for _ in 0..len {
            let s = self.face(&cur);
            cur = cur.subdivide(&s);
            seq.insert(0, s);
        }
        (DivSeq::new(seq), cur)
    }

    /// Up to `max` random faces closed under unions that stay faces.
    pub fn additive_family(&mut self, c: &Complex, max: usize) -> AdditiveFamily {
        let k = self.rng.gen_range(1..=max);
        let mut fam: BTreeSet<HfSet> = (0..k).map(|_| self.face(c)).collect();
        close_under_unions(&mut fam, c, max);
        AdditiveFamily::new(fam, c).unwrap()
    }

    /// `π_{p,t}` for a random face `t` and `p ∈ t`.
    pub fn weld(&mut self, c: &Complex) -> MapExpr {
        let t = self.face(c);
        let p = t.elems().choose(&mut self.rng).unwrap().clone();
        MapExpr::weld(c, &p, &t).unwrap()
    }

    pub fn pi_iota(&mut self, c: &Complex) -> MapExpr {
        let fam = self.additive_family(c, 3);
        let iota = fam
            .members()
            .iter()
            .map(|s| (s.clone(), s.elems().choose(&mut self.rng).unwrap().clone()))
            .collect();
        MapExpr::pi_iota(c, &fam, &iota).unwrap()
    }

    /// A random typed isomorphism whose side conditions hold over `c`.
    pub fn typed_iso(&mut self, c: &Complex) -> Option<MapExpr> {
        for _ in 0..20 {
            let kind = match self.rng.gen_range(0..4) {
                0 => {
                    let t = self.face(c);
                    let mut elems = t.elems().to_vec();
                    elems.shuffle(&mut self.rng);
                    let cut = self.rng.gen_range(0..=elems.len());
                    let r_len = self.rng.gen_range(0..=cut);
                    IsoKind::Type1 {
                        r: elems[..r_len].to_vec(),
                        s: elems[r_len..cut].to_vec(),
                        t,
                    }
                }
                1 => IsoKind::Type2 {
                    s: self.face(c),
                    t: self.face(c),
                },
                2 => IsoKind::Type3a {
                    x: c.vertices().iter().choose(&mut self.rng).unwrap().clone(),
                },
                _ => IsoKind::Type3b {
                    x: c.vertices().iter().choose(&mut self.rng).unwrap().clone(),
                },
            };
            if let Ok(m) = MapExpr::typed_iso(kind, c) {
                return Some(m);
            }
        }
        None
    }

    /// A weld, `π_ι` or typed isomorphism over `c`; its codomain is not always `c` for isomorphisms.
    pub fn generator(&mut self, c: &Complex) -> MapExpr {
        match self.rng.gen_range(0..3) {
            0 => self.weld(c),
            1 => self.pi_iota(c),
            _ => self.typed_iso(c).unwrap_or_else(|| self.weld(c)),
        }
    }

    /// A generator with codomain exactly `c`.
    pub fn generator_into(&mut self, c: &Complex) -> MapExpr {
        for _ in 0..10 {
            let g = self.generator(c);
            if g.cod() == c {
                return g;
            }
        }
        self.weld(c)
    }

    /// A composition of up to `n` welds ending at `c`, outermost first.
    pub fn weld_chain(&mut self, c: &Complex, n: usize) -> MapExpr {
        let mut acc = self.weld(c);
        for _ in 1..self.rng.gen_range(1..=n) {
            let w = self.weld(&acc.dom().clone());
            acc = acc.compose(&w).unwrap();
        }
        acc
    }

    /// A map into `c` built from up to `budget` generators, with divisions
    /// placed under a matching weld so that the codomain stays `c`.
    pub fn map_into(&mut self, c: &Complex, budget: usize) -> MapExpr {
        let g = self.generator_into(c);
        if budget <= 1 {
            return g;
        }
        match self.rng.gen_range(0..3) {
            0 => g,
            1 => {
                let rest = self.map_into(&g.dom().clone(), budget - 1);
                g.compose(&rest).unwrap()
            }
            _ => {
                let inner = self.map_into(c, budget - 1);
                let fam = self.additive_family(c, 2);
                let pi = MapExpr::pi_iota_default(c, &fam).unwrap();
                pi.compose(&inner.divide_family(&fam).unwrap()).unwrap()
            }
        }
    }

    /// A provenance tree of depth at most `depth` with codomain unconstrained.
    pub fn tree(&mut self, c: &Complex, depth: usize) -> MapExpr {
        if depth <= 1 {
            return self.generator(c);
        }
        match self.rng.gen_range(0..4) {
            0 => self.generator(c),
            1 => {
                let g = self.tree(c, depth - 1);
                let f = self.map_into(&g.dom().clone(), depth - 1);
                g.compose(&f).unwrap()
            }
            2 => {
                let g = self.tree(c, depth - 1);
                let s = self.face(&g.cod().clone());
                g.divide(&s)
            }
            _ => {
                let g = self.tree(c, depth - 1);
                let fam = self.additive_family(&g.cod().clone(), 3);
                g.divide_family(&fam).unwrap()
            }
        }
    }

    /// `(S, T, p)` satisfying (I), (II) and (III) over `c`.
    pub fn main_lemma_input(&mut self, c: &Complex) -> (AdditiveFamily, AdditiveFamily, HfSet) {
        let p = c.vertices().iter().choose(&mut self.rng).unwrap().clone();
        let star: Vec<HfSet> = c.faces().iter().filter(|t| t.is_member(&p)).cloned().collect();
        let s = self.additive_family(c, 3);
        let k = self.rng.gen_range(0..=3.min(star.len()));
        let mut t: BTreeSet<HfSet> = star.choose_multiple(&mut self.rng, k).cloned().collect();
        loop {
            let before = t.len();
            close_under_unions(&mut t, c, usize::MAX);
            let extra: Vec<HfSet> = s
                .members()
                .iter()
                .flat_map(|a| t.iter().map(move |b| a.union(b)))
                .filter(|u| c.contains(u))
                .collect();
            t.extend(extra);
            if t.len() == before {
                break;
            }
        }
        (s, AdditiveFamily::new(t, c).unwrap(), p)
    }
}

fn close_under_unions(fam: &mut BTreeSet<HfSet>, c: &Complex, max: usize) {
    loop {
        let items: Vec<HfSet> = fam.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in items.iter().enumerate() {
            for b in &items[i + 1..] {
                let u = a.union(b);
                if c.contains(&u) && fam.len() < max && fam.insert(u) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    // A capped closure may be incomplete; drop members until the rest is additive.
    while AdditiveFamily::new(fam.iter().cloned(), c).is_err() {
        let last = fam.iter().next_back().unwrap().clone();
        fam.remove(&last);
    }
}

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::geometry::{distance, hull_contains, tol};
use super::tower::{r_related, related_at, Thread, ThreadStrategy, TowerOf};
use super::LimitError;
use crate::complex::Complex;
use crate::hfset::HfSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    /// Endpoints of a final-stage edge.
    Neighbor,
    /// Two uniformly drawn final-stage vertices.
    Uniform,
    /// Threads through distinct ground vertices.
    Corner,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub from: usize,
    pub to: usize,
    pub before: f64,
    pub after: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportRow {
    pub seed: HfSet,
    pub frozen: HfSet,
    pub geometric: Option<HfSet>,
    pub monotone: bool,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRow {
    pub kind: PairKind,
    pub x: HfSet,
    pub y: HfSet,
    /// Distance of the `g_n` images at every stage.
    pub distances: Vec<f64>,
    /// Largest `n` with the pair related through `n`.
    pub related_through: Option<usize>,
    pub related_final: bool,
    /// No final-stage face meets both closed stars.
    pub stars_disjoint: bool,
    /// Related stages all have `d_n ≤ ε_n`.
    pub related_ok: bool,
    /// For unrelated pairs, `d_N > ε_N`.
    pub separated: Option<bool>,
    /// For unrelated pairs, `d_N > 2ε_N`.
    pub certified: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleSummary {
    pub tested: usize,
    pub persistent: usize,
    /// Triples with `{x,y}` and `{y,z}` related but `{x,y,z}` in no face at some stage.
    pub non_persistent: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HullUnion {
    pub grid_points: usize,
    pub stage_centroids: usize,
    pub mismatches: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub invariant: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientReport {
    pub seed: u64,
    pub stages: usize,
    pub block_stages: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub decay: Vec<DecayRow>,
    pub supports: Vec<SupportRow>,
    pub pairs: Vec<PairRow>,
    pub triples: TripleSummary,
    pub hull_union: HullUnion,
    pub checks: Vec<Check>,
}

impl QuotientReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, invariant: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.invariant == invariant)
    }
}

pub const CONTAINMENT: &str = "Containment";
pub const DECAY: &str = "ε decay";
pub const HULL_UNION: &str = "Hull-union stability";
pub const SUPPORT: &str = "Support monotonicity of threads and equality Sp_fr = Sp_go";
pub const TRANSITIVITY: &str = "Transitivity evidence";
pub const RELATED: &str = "dist(g_n(x), g_n(y)) ≤ ε_n";
pub const SEPARATED: &str = "unrelated pairs separate";
pub const SEPARATED_STARS: &str = "unrelated pairs with disjoint stars separate";

fn f<F: Float>(x: F) -> f64 {
    x.to_f64().unwrap()
}

struct Graph {
    adj: BTreeMap<HfSet, BTreeSet<HfSet>>,
}

impl Graph {
    fn new(c: &Complex) -> Self {
        let mut adj: BTreeMap<HfSet, BTreeSet<HfSet>> = c.vertices().iter().map(|v| (v.clone(), BTreeSet::new())).collect();
        for e in c.faces().iter().filter(|t| t.len() == 2) {
            let (a, b) = (&e.elems()[0], &e.elems()[1]);
            adj.get_mut(a).unwrap().insert(b.clone());
            adj.get_mut(b).unwrap().insert(a.clone());
        }
        Graph { adj }
    }

    /// Closed stars are disjoint exactly when the graph distance is at least 3.
    fn stars_disjoint(&self, a: &HfSet, b: &HfSet) -> bool {
        a != b && !self.adj[a].contains(b) && self.adj[a].is_disjoint(&self.adj[b])
    }
}

/// Samples thread pairs and triples at the final stage and checks the limit invariants on them.
pub fn quotient_report<F: Float>(tower: &TowerOf<F>, samples: usize, seed: u64) -> Result<QuotientReport, LimitError> {
    let blocks = tower.block_levels();
    if blocks.is_empty() {
        return Err(LimitError::ScheduleInvalid("the report needs at least one block".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = tower.top_index();
    let ground = tower.complex(0);
    let final_c = tower.complex(top);
    let verts: Vec<HfSet> = final_c.vertices().iter().cloned().collect();
    let graph = Graph::new(final_c);
    let eps: Vec<F> = tower.epsilons();
    let mut checks = Vec::new();

    let mut containment_fail = None;
    for n in 0..top {
        if let Err(e) = tower.check_containment(n) {
            containment_fail = Some(e.to_string());
            break;
        }
    }
    checks.push(Check {
        invariant: CONTAINMENT.into(),
        passed: containment_fail.is_none(),
        detail: containment_fail.unwrap_or_else(|| format!("all vertices of stages 1..={top}")),
    });

    let d = ground.faces().iter().map(HfSet::len).max().unwrap_or(1);
    let ratio = F::from(d - 1).unwrap() / F::from(d).unwrap();
    let decay: Vec<DecayRow> = blocks
        .iter()
        .map(|&to| {
            let bound = ratio * eps[to - 1];
            DecayRow {
                from: to - 1,
                to,
                before: f(eps[to - 1]),
                after: f(eps[to]),
                bound: f(bound),
                ok: eps[to] <= bound + tol(),
            }
        })
        .collect();
    let monotone_eps = eps.windows(2).all(|w| w[1] <= w[0] + tol());
    checks.push(Check {
        invariant: DECAY.into(),
        passed: decay.iter().all(|r| r.ok) && monotone_eps,
        detail: format!("d = {d}, {} blocks, non-increasing: {monotone_eps}", decay.len()),
    });

    let hull_union = hull_union(tower);
    checks.push(Check {
        invariant: HULL_UNION.into(),
        passed: hull_union.mismatches == 0,
        detail: format!(
            "{} grid points and {} stage centroids, {} mismatches",
            hull_union.grid_points, hull_union.stage_centroids, hull_union.mismatches
        ),
    });

    let mut threads: BTreeMap<HfSet, Thread> = BTreeMap::new();
    let mut thread = |v: &HfSet| -> Result<Thread, LimitError> {
        if let Some(t) = threads.get(v) {
            return Ok(t.clone());
        }
        let t = tower.thread_from(v)?;
        threads.insert(v.clone(), t.clone());
        Ok(t)
    };

    let mut pairs = Vec::new();
    let corners: Vec<Thread> = ground
        .vertices()
        .iter()
        .map(|v| tower.thread_through(0, v, ThreadStrategy::Stay))
        .collect::<Result<_, _>>()?;
    for (i, x) in corners.iter().enumerate() {
        for y in &corners[i + 1..] {
            pairs.push((PairKind::Corner, x.clone(), y.clone()));
        }
    }
    for i in 0..samples {
        let x = verts.choose(&mut rng).unwrap();
        let y = if i % 2 == 0 {
            match graph.adj[x].iter().collect::<Vec<_>>().choose(&mut rng) {
                Some(y) => ((*y).clone(), PairKind::Neighbor),
                None => (verts.choose(&mut rng).unwrap().clone(), PairKind::Uniform),
            }
        } else {
            (verts.choose(&mut rng).unwrap().clone(), PairKind::Uniform)
        };
        pairs.push((y.1, thread(x)?, thread(&y.0)?));
    }

    let pair_rows: Vec<PairRow> = pairs
        .into_iter()
        .map(|(kind, x, y)| pair_row(tower, &graph, &eps, kind, &x, &y))
        .collect();
    let related_ok = pair_rows.iter().all(|r| r.related_ok);
    checks.push(Check {
        invariant: RELATED.into(),
        passed: related_ok,
        detail: format!(
            "{} pairs, {} related at the final stage",
            pair_rows.len(),
            pair_rows.iter().filter(|r| r.related_final).count()
        ),
    });
    let unrelated: Vec<&PairRow> = pair_rows.iter().filter(|r| !r.related_final).collect();
    let sep = unrelated.iter().filter(|r| r.separated == Some(true)).count();
    checks.push(Check {
        invariant: SEPARATED.into(),
        passed: sep == unrelated.len(),
        detail: format!("{sep} of {} unrelated pairs have d_N > ε_N", unrelated.len()),
    });
    let disjoint: Vec<&&PairRow> = unrelated.iter().filter(|r| r.stars_disjoint).collect();
    let sep_d = disjoint.iter().filter(|r| r.separated == Some(true)).count();
    let cert = disjoint.iter().filter(|r| r.certified == Some(true)).count();
    checks.push(Check {
        invariant: SEPARATED_STARS.into(),
        passed: sep_d == disjoint.len(),
        detail: format!(
            "{sep_d} of {} pairs with disjoint stars have d_N > ε_N, {cert} have d_N > 2ε_N",
            disjoint.len()
        ),
    });

    let mut seeds: BTreeSet<HfSet> = threads.keys().cloned().collect();
    let mut support_threads: Vec<Thread> = threads.values().cloned().collect();
    for c in &corners {
        if seeds.insert(c.at(top).clone()) {
            support_threads.push(c.clone());
        }
    }
    let supports: Vec<SupportRow> = support_threads.iter().map(|t| support_row(tower, t)).collect();
    let bad = supports.iter().filter(|r| !r.equal || !r.monotone).count();
    checks.push(Check {
        invariant: SUPPORT.into(),
        passed: bad == 0,
        detail: format!("{} threads, {bad} failures", supports.len()),
    });

    let triples = triples(tower, &graph, &verts, samples, &mut rng)?;
    checks.push(Check {
        invariant: TRANSITIVITY.into(),
        passed: true,
        detail: format!(
            "{} triples, {} persistent, {} non-persistent",
            triples.tested, triples.persistent, triples.non_persistent
        ),
    });

    Ok(QuotientReport {
        seed,
        stages: top + 1,
        block_stages: blocks,
        epsilons: eps.iter().map(|e| f(*e)).collect(),
        decay,
        supports,
        pairs: pair_rows,
        triples,
        hull_union,
        checks,
    })
}

fn pair_row<F: Float>(tower: &TowerOf<F>, graph: &Graph, eps: &[F], kind: PairKind, x: &Thread, y: &Thread) -> PairRow {
    let top = tower.top_index();
    let dist: Vec<F> = (0..=top).map(|n| distance(tower.image(x, n), tower.image(y, n))).collect();
    let related_through = (0..=top).take_while(|&n| related_at(tower.complex(n), x.at(n), y.at(n))).last();
    let related_ok = (0..related_through.map_or(0, |n| n + 1)).all(|n| dist[n] <= eps[n] + tol());
    let related_final = r_related(tower, x, y, top);
    let (separated, certified) = if related_final {
        (None, None)
    } else {
        let two = F::one() + F::one();
        (Some(dist[top] > eps[top] + tol()), Some(dist[top] > two * eps[top] + tol()))
    };
    PairRow {
        kind,
        x: x.at(top).clone(),
        y: y.at(top).clone(),
        distances: dist.iter().map(|d| f(*d)).collect(),
        related_through,
        related_final,
        stars_disjoint: graph.stars_disjoint(x.at(top), y.at(top)),
        related_ok,
        separated,
        certified,
    }
}

fn support_row<F: Float>(tower: &TowerOf<F>, t: &Thread) -> SupportRow {
    let top = tower.top_index();
    let frozen = t.frozen_support();
    let geometric = tower.realization(0).support_of(tower.complex(0), tower.image(t, top));
    SupportRow {
        seed: t.at(top).clone(),
        equal: geometric.as_ref() == Some(&frozen),
        frozen,
        geometric,
        monotone: t.supports_monotone(),
    }
}

fn triples<F: Float>(
    tower: &TowerOf<F>,
    graph: &Graph,
    verts: &[HfSet],
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TripleSummary, LimitError> {
    let top = tower.top_index();
    let mut summary = TripleSummary {
        tested: 0,
        persistent: 0,
        non_persistent: 0,
    };
    for _ in 0..samples {
        let y = verts.choose(rng).unwrap();
        let nbrs: Vec<&HfSet> = graph.adj[y].iter().collect();
        if nbrs.len() < 2 {
            continue;
        }
        let i = rng.gen_range(0..nbrs.len());
        let j = (i + rng.gen_range(1..nbrs.len())) % nbrs.len();
        let (tx, ty, tz) = (tower.thread_from(nbrs[i])?, tower.thread_from(y)?, tower.thread_from(nbrs[j])?);
        summary.tested += 1;
        let ok = (0..=top).all(|n| {
            let s = HfSet::from_elems([tx.at(n).clone(), ty.at(n).clone(), tz.at(n).clone()]).unwrap();
            tower.complex(n).contains(&s)
        });
        if ok {
            summary.persistent += 1;
        } else {
            summary.non_persistent += 1;
        }
    }
    Ok(summary)
}

/// Grid points of the ground hulls must lie in some stage hull, and centroids of stage faces in some ground hull.
fn hull_union<F: Float>(tower: &TowerOf<F>) -> HullUnion {
    const RES: usize = 7;
    let ground = tower.complex(0);
    let r0 = tower.realization(0);
    let mut grid = Vec::new();
    for t in ground.maximal_faces() {
        let pts = r0.face_points(&t);
        for w in compositions(pts.len(), RES) {
            let mut x = vec![F::zero(); r0.dim()];
            for (p, k) in pts.iter().zip(&w) {
                let c = F::from(*k).unwrap() / F::from(RES).unwrap();
                for (xi, pi) in x.iter_mut().zip(p.iter()) {
                    *xi = *xi + c * *pi;
                }
            }
            grid.push(x);
        }
    }
    let mut out = HullUnion {
        grid_points: grid.len(),
        stage_centroids: 0,
        mismatches: 0,
    };
    let ground_max = ground.maximal_faces();
    for n in 1..=tower.top_index() {
        let c = tower.complex(n);
        let r = tower.realization(n);
        let maxf = c.maximal_faces();
        for x in &grid {
            if !maxf.iter().any(|t| hull_contains(&r.face_points(t), x)) {
                out.mismatches += 1;
            }
        }
        for t in &maxf {
            let x = super::geometry::centroid(&r.face_points(t));
            out.stage_centroids += 1;
            if !ground_max.iter().any(|g| hull_contains(&r0.face_points(g), &x)) {
                out.mismatches += 1;
            }
        }
    }
    out
}

/// All `k`-tuples of non-negative integers summing to `total`.
fn compositions(k: usize, total: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(k - 1, total - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

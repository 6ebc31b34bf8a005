use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::geometry::{hull_contains, Realization};
use super::LimitError;
use crate::complex::Complex;
use crate::hfset::HfSet;
use crate::seqcalc::AdditiveFamily;
use crate::simap::MapExpr;

/// A user weld `π_{p,t}` inserted into the tower.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeldSpec {
    pub p: HfSet,
    pub t: HfSet,
}

/// `before_block[i]` is applied just before barycentric block `i`; index
/// `blocks` runs after the last block.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(default)]
    pub before_block: Vec<Vec<WeldSpec>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Weld,
    Block,
}

/// The map from a level down to the previous one.
#[derive(Debug, Clone)]
pub struct Step {
    pub kind: StepKind,
    pub map: MapExpr,
}

#[derive(Debug, Clone)]
pub struct Level<F> {
    pub complex: Complex,
    pub realization: Realization<F>,
    /// `None` at level 0.
    pub step: Option<Step>,
}

/// Levels `A_0 ← A_1 ← ⋯`, each with its realizing assignment.
#[derive(Debug, Clone)]
pub struct TowerOf<F> {
    levels: Vec<Level<F>>,
}

/// How a thread is extended to higher levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreadStrategy {
    /// Keep the same point: `v` itself, or `{v}` after a block.
    Stay,
    /// The largest preimage.
    Deepest,
}

/// `(x_0, …, x_N)` with `π_n(x_{n+1}) = x_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Thread {
    pub vertices: Vec<HfSet>,
}

impl Thread {
    pub fn at(&self, n: usize) -> &HfSet {
        &self.vertices[n]
    }

    pub fn supports(&self) -> Vec<HfSet> {
        self.vertices
            .iter()
            .map(|v| HfSet::singleton(v.clone()).support_set())
            .collect()
    }

    /// `⋃_n sp({x_n})`.
    pub fn frozen_support(&self) -> HfSet {
        let s = self.supports();
        s.iter().skip(1).fold(s[0].clone(), |acc, x| acc.union(x))
    }

    pub fn supports_monotone(&self) -> bool {
        self.supports().windows(2).all(|w| w[0].is_subset(&w[1]))
    }
}

impl<F: Float> TowerOf<F> {
    /// Alternates scheduled welds with full barycentric blocks `π_ι`, `ι(s)` the least element of `s`.
    pub fn build(ground: &Complex, blocks: usize, schedule: &Schedule) -> Result<Self, LimitError> {
        if schedule.before_block.len() > blocks + 1 {
            return Err(LimitError::ScheduleInvalid(format!(
                "{} weld groups for {blocks} blocks",
                schedule.before_block.len()
            )));
        }
        let mut tower = TowerOf {
            levels: vec![Level {
                complex: ground.clone(),
                realization: Realization::standard(ground),
                step: None,
            }],
        };
        for i in 0..=blocks {
            for w in schedule.before_block.get(i).into_iter().flatten() {
                tower.push_weld(w)?;
            }
            if i < blocks {
                tower.push_block()?;
            }
        }
        Ok(tower)
    }

    fn top(&self) -> &Level<F> {
        self.levels.last().unwrap()
    }

    pub fn push_weld(&mut self, w: &WeldSpec) -> Result<(), LimitError> {
        let top = self.top();
        if !top.complex.contains(&w.t) {
            return Err(LimitError::ScheduleInvalid(format!("{} is not a face of level {}", w.t, self.levels.len() - 1)));
        }
        let map = MapExpr::weld(&top.complex, &w.p, &w.t).map_err(|e| LimitError::ScheduleInvalid(e.to_string()))?;
        let realization = top.realization.refine(&w.t);
        self.levels.push(Level {
            complex: map.dom().clone(),
            realization,
            step: Some(Step {
                kind: StepKind::Weld,
                map,
            }),
        });
        Ok(())
    }

    pub fn push_block(&mut self) -> Result<(), LimitError> {
        let top = self.top();
        let fam = AdditiveFamily::new(top.complex.faces().iter().cloned(), &top.complex)?;
        let map = MapExpr::pi_iota_default(&top.complex, &fam)?;
        let realization = top.realization.barycentric(top.complex.faces().iter().cloned());
        self.levels.push(Level {
            complex: map.dom().clone(),
            realization,
            step: Some(Step {
                kind: StepKind::Block,
                map,
            }),
        });
        Ok(())
    }

    pub fn levels(&self) -> &[Level<F>] {
        &self.levels
    }

    /// Index of the last level.
    pub fn top_index(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn complex(&self, n: usize) -> &Complex {
        &self.levels[n].complex
    }

    pub fn realization(&self, n: usize) -> &Realization<F> {
        &self.levels[n].realization
    }

    fn check_level(&self, n: usize) -> Result<(), LimitError> {
        if n >= self.levels.len() {
            return Err(LimitError::BadLevel {
                level: n,
                levels: self.levels.len(),
            });
        }
        Ok(())
    }

    pub fn epsilon(&self, n: usize) -> Result<F, LimitError> {
        self.check_level(n)?;
        Ok(self.levels[n].realization.epsilon(&self.levels[n].complex))
    }

    pub fn epsilons(&self) -> Vec<F> {
        self.levels.iter().map(|l| l.realization.epsilon(&l.complex)).collect()
    }

    /// Levels reached right after a barycentric block.
    pub fn block_levels(&self) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, l)| matches!(&l.step, Some(s) if s.kind == StepKind::Block))
            .map(|(i, _)| i)
            .collect()
    }

    /// The tower as single welds `A_N → ⋯ → A_0`, outermost first.
    pub fn weld_steps(&self) -> Result<Vec<MapExpr>, LimitError> {
        let mut out = Vec::new();
        for l in &self.levels[1..] {
            let step = l.step.as_ref().unwrap();
            out.extend(step.map.expand_welds()?);
        }
        Ok(out)
    }

    /// `pr^m_n(v)` for `n ≤ m`.
    pub fn project(&self, m: usize, n: usize, v: &HfSet) -> HfSet {
        let mut cur = v.clone();
        for k in (n + 1..=m).rev() {
            cur = self.levels[k].step.as_ref().unwrap().map.map().apply(&cur).clone();
        }
        cur
    }

    /// The thread through a top-level vertex.
    pub fn thread_from(&self, seed: &HfSet) -> Result<Thread, LimitError> {
        self.thread_through(self.top_index(), seed, ThreadStrategy::Stay)
    }

    /// The thread through `v` at level `n`: projected below, extended above by `strategy`.
    pub fn thread_through(&self, n: usize, v: &HfSet, strategy: ThreadStrategy) -> Result<Thread, LimitError> {
        self.check_level(n)?;
        if !self.levels[n].complex.is_vertex(v) {
            return Err(LimitError::BadThread(format!("{v} is not a vertex of level {n}")));
        }
        let mut vertices: Vec<HfSet> = (0..=n).map(|k| self.project(n, k, v)).collect();
        for k in n + 1..self.levels.len() {
            let prev = vertices.last().unwrap().clone();
            let map = self.levels[k].step.as_ref().unwrap().map.map();
            let pre: Vec<&HfSet> = map.vertex_map().iter().filter(|(_, w)| **w == prev).map(|(u, _)| u).collect();
            let pick = match strategy {
                ThreadStrategy::Stay => {
                    let single = HfSet::singleton(prev.clone());
                    pre.iter().find(|u| ***u == prev || ***u == single).copied()
                }
                ThreadStrategy::Deepest => pre.iter().max_by_key(|u| (u.len(), std::cmp::Reverse((**u).clone()))).copied(),
            };
            let next = pick.ok_or_else(|| LimitError::BadThread(format!("no preimage of {prev} at level {k}")))?;
            vertices.push(next.clone());
        }
        Ok(Thread { vertices })
    }

    /// `g_n(x) = r_n(x_n)`.
    pub fn image(&self, x: &Thread, n: usize) -> &[F] {
        self.levels[n].realization.point(x.at(n))
    }

    /// Every level-`(n+1)` vertex lies in the hull of a level-`n` face containing its projection.
    pub fn check_containment(&self, n: usize) -> Result<(), LimitError> {
        self.check_level(n + 1)?;
        let (lo, hi) = (&self.levels[n], &self.levels[n + 1]);
        let map = hi.step.as_ref().unwrap().map.map();
        for v in hi.complex.vertices() {
            let pv = map.apply(v);
            let x = hi.realization.point(v);
            let ok = lo
                .complex
                .faces()
                .iter()
                .filter(|t| t.is_member(pv))
                .any(|t| hull_contains(&lo.realization.face_points(t), x));
            if !ok {
                return Err(LimitError::InvariantFailed(format!(
                    "containment: vertex {v} of level {} escapes every face at {pv}",
                    n + 1
                )));
            }
        }
        Ok(())
    }
}

/// Whether `{x_k, y_k}` lies in a face of `A_k` for every `k ≤ n`.
pub fn r_related<F: Float>(tower: &TowerOf<F>, x: &Thread, y: &Thread, n: usize) -> bool {
    (0..=n).all(|k| related_at(tower.complex(k), x.at(k), y.at(k)))
}

pub(crate) fn related_at(c: &Complex, a: &HfSet, b: &HfSet) -> bool {
    a == b || c.contains(&HfSet::from_elems([a.clone(), b.clone()]).unwrap())
}

/// The assignment for `sA`.
pub fn refine_assignment<F: Float>(r: &Realization<F>, s: &HfSet) -> Realization<F> {
    r.refine(s)
}

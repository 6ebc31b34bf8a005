use std::collections::BTreeMap;

use num_traits::Float;

use crate::complex::Complex;
use crate::hfset::HfSet;

pub(crate) fn tol<F: Float>() -> F {
    F::from(1e-9).unwrap()
}

pub fn distance<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
        .sqrt()
}

pub fn centroid<F: Float>(points: &[&[F]]) -> Vec<F> {
    let n = F::from(points.len()).unwrap();
    let dim = points[0].len();
    (0..dim)
        .map(|i| points.iter().fold(F::zero(), |acc, p| acc + p[i]) / n)
        .collect()
}

/// Largest pairwise distance.
pub fn diameter<F: Float>(points: &[&[F]]) -> F {
    let mut d = F::zero();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(distance(a, b));
        }
    }
    d
}

/// Barycentric coordinates of `x` against affinely independent `points`, when
/// `x` lies in their affine hull within tolerance.
pub fn barycentric_coords<F: Float>(points: &[&[F]], x: &[F]) -> Option<Vec<F>> {
    let k = points.len() - 1;
    let p0 = points[0];
    let diff = |p: &[F]| -> Vec<F> { p.iter().zip(p0).map(|(a, b)| *a - *b).collect() };
    let dirs: Vec<Vec<F>> = points[1..].iter().map(|p| diff(p)).collect();
    let rhs = diff(x);
    let dot = |a: &[F], b: &[F]| a.iter().zip(b).fold(F::zero(), |acc, (u, v)| acc + *u * *v);
    let mut m: Vec<Vec<F>> = (0..k)
        .map(|i| {
            let mut row: Vec<F> = (0..k).map(|j| dot(&dirs[i], &dirs[j])).collect();
            row.push(dot(&dirs[i], &rhs));
            row
        })
        .collect();
    for c in 0..k {
        let piv = (c..k).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap())?;
        if m[piv][c].abs() < F::epsilon() {
            return None;
        }
        m.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    let v = m[c][j];
                    m[r][j] = m[r][j] - f * v;
                }
            }
        }
    }
    let lam: Vec<F> = (0..k).map(|i| m[i][k] / m[i][i]).collect();
    let mut fit = p0.to_vec();
    for (l, d) in lam.iter().zip(&dirs) {
        for (f, v) in fit.iter_mut().zip(d) {
            *f = *f + *l * *v;
        }
    }
    if distance(&fit, x) > tol() {
        return None;
    }
    let first = lam.iter().fold(F::one(), |acc, l| acc - *l);
    Some(std::iter::once(first).chain(lam).collect())
}

/// Whether `x` lies in the convex hull of affinely independent `points`.
pub fn hull_contains<F: Float>(points: &[&[F]], x: &[F]) -> bool {
    if points.len() == 1 {
        return distance(points[0], x) <= tol();
    }
    barycentric_coords(points, x).is_some_and(|c| c.iter().all(|l| *l >= -tol::<F>()))
}

/// A point for every vertex of a complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization<F> {
    points: BTreeMap<HfSet, Vec<F>>,
}

impl<F: Float> Realization<F> {
    /// `v ↦ x^v`, the standard basis over the vertices in canonical order.
    pub fn standard(ground: &Complex) -> Self {
        let n = ground.vertices().len();
        let points = ground
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut x = vec![F::zero(); n];
                x[i] = F::one();
                (v.clone(), x)
            })
            .collect();
        Realization { points }
    }

    pub fn from_points(points: BTreeMap<HfSet, Vec<F>>) -> Self {
        Realization { points }
    }

    pub fn points(&self) -> &BTreeMap<HfSet, Vec<F>> {
        &self.points
    }

    pub fn point(&self, v: &HfSet) -> &[F] {
        &self.points[v]
    }

    pub fn dim(&self) -> usize {
        self.points.values().next().map_or(0, Vec::len)
    }

    pub fn face_points(&self, t: &HfSet) -> Vec<&[F]> {
        t.iter().map(|v| self.point(v)).collect()
    }

    /// The assignment for `sA`: `s` at the centroid of its vertices, `x` dropped when `s = {x}`.
    pub fn refine(&self, s: &HfSet) -> Self {
        let c = centroid(&self.face_points(s));
        let mut points = self.points.clone();
        if s.len() == 1 {
            points.remove(&s.elems()[0]);
        }
        points.insert(s.clone(), c);
        Realization { points }
    }

    /// Division by every face at once, largest first.
    pub fn barycentric(&self, faces: impl IntoIterator<Item = HfSet>) -> Self {
        let points = faces
            .into_iter()
            .map(|s| {
                let c = centroid(&self.face_points(&s));
                (s, c)
            })
            .collect();
        Realization { points }
    }

    pub fn diameter(&self, t: &HfSet) -> F {
        diameter(&self.face_points(t))
    }

    /// `max_t diam(r(t))`.
    pub fn epsilon(&self, complex: &Complex) -> F {
        complex
            .faces()
            .iter()
            .filter(|t| t.len() == 2)
            .fold(F::zero(), |acc, t| acc.max(self.diameter(t)))
    }

    pub fn hull_contains(&self, t: &HfSet, x: &[F]) -> bool {
        hull_contains(&self.face_points(t), x)
    }

    /// The least face of `complex` whose hull contains `x`.
    pub fn support_of(&self, complex: &Complex, x: &[F]) -> Option<HfSet> {
        complex.faces().iter().find(|t| self.hull_contains(t, x)).cloned()
    }

    /// ε after each of `blocks` barycentric subdivisions, computed on point simplices only.
    pub fn barycentric_epsilons(&self, complex: &Complex, blocks: usize) -> Vec<F> {
        let mut eps = vec![F::zero(); blocks + 1];
        for t in complex.maximal_faces() {
            let simplex: Vec<Vec<F>> = t.iter().map(|v| self.point(v).to_vec()).collect();
            descend(&simplex, 0, blocks, &mut eps);
        }
        eps
    }
}

fn descend<F: Float>(simplex: &[Vec<F>], depth: usize, blocks: usize, eps: &mut [F]) {
    let refs: Vec<&[F]> = simplex.iter().map(Vec::as_slice).collect();
    eps[depth] = eps[depth].max(diameter(&refs));
    if depth == blocks {
        return;
    }
    let k = simplex.len();
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let child: Vec<Vec<F>> = (1..=k)
            .map(|j| centroid(&perm[..j].iter().map(|&i| refs[i]).collect::<Vec<_>>()))
            .collect();
        descend(&child, depth + 1, blocks, eps);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

use std::collections::BTreeSet;

use super::*;
use crate::complex::Complex;
use crate::hfset::{HfSet, Ur};
use crate::simap::MapExpr;

fn tri() -> (Ur, Complex) {
    let ur = Ur::letters(3);
    let d = Complex::full(&ur);
    (ur, d)
}

fn p(ur: &Ur, s: &str) -> HfSet {
    ur.parse(s).unwrap()
}

/// Nonempty chains of faces under inclusion, the classical barycentric subdivision.
fn chains(c: &Complex) -> BTreeSet<HfSet> {
    fn grow(c: &Complex, chain: &mut Vec<HfSet>, out: &mut BTreeSet<HfSet>) {
        out.insert(HfSet::from_elems(chain.iter().cloned()).unwrap());
        let top = chain.last().unwrap().clone();
        for f in c.faces() {
            if f != &top && top.is_subset(f) {
                chain.push(f.clone());
                grow(c, chain, out);
                chain.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for f in c.faces() {
        grow(c, &mut vec![f.clone()], &mut out);
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn zero_blocks_is_the_ground() {
    let (_, d) = tri();
    let t = build_tower(&d, 0, &Schedule::default()).unwrap();
    assert_eq!(t.levels().len(), 1);
    assert_eq!(t.complex(0), &d);
    assert!(t.weld_steps().unwrap().is_empty());
}

#[test]
fn one_block_is_the_chain_complex() {
    let (_, d) = tri();
    let t = build_tower(&d, 1, &Schedule::default()).unwrap();
    let a1 = t.complex(1);
    assert_eq!(a1.len(), 25);
    assert_eq!(a1.faces(), &chains(&d));
}

#[test]
fn two_blocks_subdivide_the_first() {
    let (_, d) = tri();
    let t = build_tower(&d, 2, &Schedule::default()).unwrap();
    let expected = chains(t.complex(1));
    assert_eq!(t.complex(2).faces(), &expected);
    assert_eq!(expected.len(), 121);
}

#[test]
fn block_expands_into_one_weld_per_face() {
    let (_, d) = tri();
    let t = build_tower(&d, 1, &Schedule::default()).unwrap();
    let welds = t.weld_steps().unwrap();
    assert_eq!(welds.len(), d.len());
    let block = &t.levels()[1].step.as_ref().unwrap().map;
    assert!(MapExpr::compose_all(&welds).unwrap().map().same_as(block.map()));
}

#[test]
fn refine_examples() {
    let (ur, d) = tri();
    let r = RealizingAssignment::standard(&d);
    let abc = p(&ur, "{a,b,c}");
    let r1 = refine_assignment(&r, &abc);
    let third = 1.0 / 3.0;
    assert!(r1.point(&abc).iter().all(|x| close(*x, third)));
    let ab = p(&ur, "{a,b}");
    assert_eq!(refine_assignment(&r, &ab).point(&ab), &[0.5, 0.5, 0.0]);
    let a = p(&ur, "a");
    let ra = refine_assignment(&r, &p(&ur, "{a}"));
    assert!(!ra.points().contains_key(&a));
    assert_eq!(ra.point(&p(&ur, "{a}")), &[1.0, 0.0, 0.0]);
}

#[test]
fn block_places_classical_barycentric_points() {
    let (ur, d) = tri();
    let t = build_tower(&d, 1, &Schedule::default()).unwrap();
    let r = t.realization(1);
    assert_eq!(r.points().len(), 7);
    for s in d.faces() {
        let k = s.len() as f64;
        let x = r.point(s);
        for (i, v) in ["a", "b", "c"].iter().enumerate() {
            let want = if s.is_member(&p(&ur, v)) { 1.0 / k } else { 0.0 };
            assert!(close(x[i], want));
        }
    }
}

#[test]
fn epsilon_examples() {
    let (_, d) = tri();
    let t = build_tower(&d, 3, &Schedule::default()).unwrap();
    let eps = t.epsilons();
    assert!(close(eps[0], 2f64.sqrt()));
    assert!(eps[1] <= 2.0 / 3.0 * 2f64.sqrt() + 1e-9);
    assert!(eps.windows(2).all(|w| w[1] <= w[0]));
    assert!(matches!(epsilon(&t, 9), Err(LimitError::BadLevel { .. })));
}

#[test]
fn fast_epsilons_match_the_tower() {
    let (ur, d) = tri();
    let t = build_tower(&d, 3, &Schedule::default()).unwrap();
    let fast = t.realization(0).barycentric_epsilons(&d, 3);
    for (a, b) in fast.iter().zip(t.epsilons()) {
        assert!(close(*a, b), "{a} vs {b}");
    }
    let square = Complex::closure(&Ur::letters(4), [&p(&Ur::letters(4), "{a,b,c}"), &p(&Ur::letters(4), "{b,c,d}")]).unwrap();
    let t = build_tower(&square, 2, &Schedule::default()).unwrap();
    let fast = t.realization(0).barycentric_epsilons(&square, 2);
    for (a, b) in fast.iter().zip(t.epsilons()) {
        assert!(close(*a, b));
    }
    let _ = ur;
}

#[test]
fn scheduled_welds() {
    let (ur, d) = tri();
    let sched = Schedule {
        before_block: vec![vec![WeldSpec {
            p: p(&ur, "a"),
            t: p(&ur, "{a,b}"),
        }]],
    };
    let t = build_tower(&d, 1, &sched).unwrap();
    assert_eq!(t.levels().len(), 3);
    assert_eq!(t.levels()[1].step.as_ref().unwrap().kind, StepKind::Weld);
    assert_eq!(t.block_levels(), vec![2]);
    assert_eq!(t.complex(1).len(), 11);
    assert_eq!(t.weld_steps().unwrap().len(), 1 + 11);
    for n in 0..2 {
        t.check_containment(n).unwrap();
    }

    let bad = Schedule {
        before_block: vec![vec![WeldSpec {
            p: p(&ur, "c"),
            t: p(&ur, "{a,b}"),
        }]],
    };
    assert!(matches!(build_tower(&d, 1, &bad), Err(LimitError::ScheduleInvalid(_))));
    let too_many = Schedule {
        before_block: vec![vec![], vec![], vec![]],
    };
    assert!(matches!(build_tower(&d, 1, &too_many), Err(LimitError::ScheduleInvalid(_))));
}

#[test]
fn relation_examples() {
    let (ur, d) = tri();
    let t = build_tower(&d, 1, &Schedule::default()).unwrap();
    let a = t.thread_through(0, &p(&ur, "a"), ThreadStrategy::Stay).unwrap();
    let b = t.thread_through(0, &p(&ur, "b"), ThreadStrategy::Stay).unwrap();
    assert_eq!(a.at(1), &p(&ur, "{a}"));
    assert!(r_related(&t, &a, &a, 1));
    assert!(r_related(&t, &a, &b, 0));
    assert!(!r_related(&t, &a, &b, 1));
    let mid = t.thread_through(1, &p(&ur, "{a,b}"), ThreadStrategy::Stay).unwrap();
    assert!(r_related(&t, &a, &mid, 1));
}

#[test]
fn thread_supports() {
    let (ur, d) = tri();
    let t = build_tower(&d, 2, &Schedule::default()).unwrap();
    let a = t.thread_through(0, &p(&ur, "a"), ThreadStrategy::Stay).unwrap();
    assert_eq!(a.frozen_support(), p(&ur, "{a}"));
    let bary = t.thread_through(1, &p(&ur, "{a,b,c}"), ThreadStrategy::Stay).unwrap();
    assert_eq!(bary.frozen_support(), p(&ur, "{a,b,c}"));
    assert!(bary.supports_monotone());
    let go = t.realization(0).support_of(&d, t.image(&bary, 2)).unwrap();
    assert_eq!(go, p(&ur, "{a,b,c}"));
    let deep = t.thread_through(0, &p(&ur, "b"), ThreadStrategy::Deepest).unwrap();
    assert_eq!(deep.at(0), &p(&ur, "b"));
    assert!(t.thread_from(&p(&ur, "a")).is_err());
}

#[test]
fn containment_through_blocks() {
    let (_, d) = tri();
    let t = build_tower(&d, 3, &Schedule::default()).unwrap();
    for n in 0..3 {
        t.check_containment(n).unwrap();
    }
}

#[test]
fn report_on_two_blocks() {
    let (_, d) = tri();
    let t = build_tower(&d, 2, &Schedule::default()).unwrap();
    let rep = quotient_report(&t, 40, 7).unwrap();
    for inv in [report::CONTAINMENT, report::DECAY, report::HULL_UNION, report::SUPPORT, report::RELATED] {
        assert!(rep.check(inv).unwrap().passed, "{inv}");
    }
    assert!(rep.pairs.len() >= 40);
    let again = quotient_report(&t, 40, 7).unwrap();
    assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&again).unwrap());
    let flat = build_tower(&d, 0, &Schedule::default()).unwrap();
    assert!(quotient_report(&flat, 10, 0).is_err());
}

#[test]
fn mesh_examples() {
    let (_, d) = tri();
    let t = build_tower(&d, 1, &Schedule::default()).unwrap();
    let (m0, off) = export_mesh(&t, 0, MeshFormat::Off).unwrap();
    assert_eq!((m0.vertices.len(), m0.triangles()), (3, 1));
    assert!(off.starts_with("OFF\n3 1 0\n"));
    let (m1, off) = export_mesh(&t, 1, MeshFormat::Off).unwrap();
    assert_eq!((m1.vertices.len(), m1.faces.len(), m1.triangles()), (7, 6, 6));
    assert!(off.starts_with("OFF\n7 6 0\n"));
    let (_, json) = export_mesh(&t, 1, MeshFormat::Json).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["faces"].as_array().unwrap().len(), 6);
}

#[test]
fn tetrahedron_mesh_is_3d() {
    let ur = Ur::letters(4);
    let d = Complex::full(&ur);
    let t = build_tower(&d, 1, &Schedule::default()).unwrap();
    let (m, _) = export_mesh(&t, 0, MeshFormat::Off).unwrap();
    assert_eq!((m.vertices.len(), m.faces.len()), (4, 4));
    let (m, _) = export_mesh(&t, 1, MeshFormat::Off).unwrap();
    assert_eq!(m.vertices.len(), 15);
    // 24 tetrahedra, each inner triangle shared by two.
    assert_eq!(m.faces.len(), 24 * 4 - (24 * 4 - 24) / 2);
    let zs: BTreeSet<u64> = m.vertices.iter().map(|v| v[2].to_bits()).collect();
    assert!(zs.len() > 1);

    let five = Complex::full(&Ur::letters(5));
    let t = build_tower(&five, 0, &Schedule::default()).unwrap();
    assert!(matches!(export_mesh(&t, 0, MeshFormat::Off), Err(LimitError::DimensionTooHigh(4))));
}

#[test]
fn unrelated_midpoints_sit_closer_than_epsilon() {
    let (ur, d) = tri();
    let t = build_tower(&d, 1, &Schedule::default()).unwrap();
    let x = t.thread_through(1, &p(&ur, "{a,b}"), ThreadStrategy::Stay).unwrap();
    let y = t.thread_through(1, &p(&ur, "{a,c}"), ThreadStrategy::Stay).unwrap();
    assert!(!r_related(&t, &x, &y, 1));
    let dist = distance(t.image(&x, 1), t.image(&y, 1));
    assert!(close(dist, 0.5f64.sqrt()));
    assert!(close(t.epsilon(1).unwrap(), (2.0f64 / 3.0).sqrt()));
    assert!(dist < t.epsilon(1).unwrap());
}

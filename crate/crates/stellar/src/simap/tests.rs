use std::collections::{BTreeMap, BTreeSet};

use super::*;
use crate::complex::Complex;
use crate::hfset::{HfSet, Ur};
use crate::seqcalc::AdditiveFamily;

fn setup() -> (Ur, Complex) {
    let ur = Ur::letters(3);
    let d = Complex::full(&ur);
    (ur, d)
}

fn p(ur: &Ur, s: &str) -> HfSet {
    ur.parse(s).unwrap()
}

#[test]
fn weld_is_grounded_and_fixes_corners() {
    let (ur, d) = setup();
    let m = p(&ur, "{a,b,c}");
    let w = MapExpr::weld(&d, &p(&ur, "b"), &m).unwrap();
    assert!(w.map().check_grounded().is_ok());
    assert_eq!(w.map().apply(&m), &p(&ur, "b"));
    for v in ["a", "b", "c"] {
        assert_eq!(w.map().apply(&p(&ur, v)), &p(&ur, v));
    }
    let c = w.classes();
    assert!(c.weld && c.neat && c.division && c.pure && !c.iso);
}

#[test]
fn arbitrary_collapse_is_not_grounded() {
    let (ur, d) = setup();
    let f = SimplicialMap::from_assignment(d.clone(), d.clone(), &[(p(&ur, "a"), p(&ur, "b"))]).unwrap();
    assert!(!f.check_grounded().is_ok());
    assert!(SimplicialMap::identity(&d).check_grounded().is_ok());
}

#[test]
fn weld_degenerate_cases() {
    let ur = Ur::letters(4);
    let d = Complex::simplex(&ur, &p(&ur, "{a,b,c}"));
    let w = MapExpr::weld(&d, &p(&ur, "b"), &p(&ur, "{b,d}")).unwrap();
    assert!(w.map().same_as(&SimplicialMap::identity(&d)));
    assert!(w.classes().iso);

    let e = Complex::simplex(&ur, &p(&ur, "{a,b}"));
    let ab = p(&ur, "{a,b}");
    let w = MapExpr::weld(&e, &p(&ur, "a"), &ab).unwrap();
    assert_eq!(w.dom().len(), 5);
    assert_eq!(w.map().apply(&ab), &p(&ur, "a"));

    assert!(matches!(MapExpr::weld(&d, &p(&ur, "d"), &p(&ur, "{a,b}")), Err(MapError::BadApex { .. })));
    let sd = d.subdivide(&ab);
    assert!(matches!(MapExpr::weld(&sd, &p(&ur, "a"), &ab), Err(MapError::VertexClash(_))));
}

#[test]
fn pi_iota_single_member_is_a_weld() {
    let (ur, d) = setup();
    let m = p(&ur, "{a,b,c}");
    let fam = AdditiveFamily::new([m.clone()], &d).unwrap();
    let pi = MapExpr::pi_iota(&d, &fam, &BTreeMap::from([(m.clone(), p(&ur, "a"))])).unwrap();
    let w = MapExpr::weld(&d, &p(&ur, "a"), &m).unwrap();
    assert!(pi.map().same_as(w.map()));
}

#[test]
fn barycentric_pi_iota_matches_weld_chain() {
    let (_, d) = setup();
    let fam = AdditiveFamily::new(d.faces().iter().filter(|s| s.len() > 1).cloned(), &d).unwrap();
    let pi = MapExpr::pi_iota_default(&d, &fam).unwrap();
    assert!(pi.map().check_grounded().is_ok());
    let chain = MapExpr::compose_all(&pi.expand_welds().unwrap()).unwrap();
    assert!(chain.map().same_as(pi.map()));
    assert!(pi.classes().neat);
}

#[test]
fn upward_closure_flag() {
    let (ur, d) = setup();
    let s = AdditiveFamily::new([p(&ur, "{a,b}")], &d).unwrap();
    let s2 = AdditiveFamily::new([p(&ur, "{a,b}"), p(&ur, "{a,b,c}")], &d).unwrap();
    assert!(!MapExpr::pi_iota_default(&d, &s).unwrap().classes().neat);
    assert!(MapExpr::pi_iota_default(&d, &s2).unwrap().classes().neat);
}

#[test]
fn division_of_weld_matches_picture() {
    let (ur, d) = setup();
    let m = p(&ur, "{a,b,c}");
    let w = MapExpr::weld(&d, &p(&ur, "b"), &m).unwrap();
    let ab = p(&ur, "{a,b}");
    let sw = w.divide(&ab);
    let f = sw.map();
    assert!(f.check_grounded().is_ok());
    for v in ["{a,b}", "{a,{a,b,c}}", "{a,b,{a,b,c}}"] {
        let v = p(&ur, v);
        assert!(f.dom().is_vertex(&v), "{v}");
        assert_eq!(f.apply(&v), &ab);
    }
    assert_eq!(f.apply(&m), &p(&ur, "b"));
    assert_eq!(f.dom().vertices().len(), 7);
    let moved: BTreeSet<HfSet> = f.moved().into_iter().map(|(a, _)| a).collect();
    assert_eq!(moved.len(), 3);
}

#[test]
fn unique_cover_and_pure_steps() {
    let (ur, d) = setup();
    let w = MapExpr::weld(&d, &p(&ur, "b"), &p(&ur, "{a,b,c}")).unwrap();
    let u: Vec<HfSet> = w.map().unique_cover().into_iter().collect();
    assert_eq!(u, vec![p(&ur, "a"), p(&ur, "c")]);
    assert!(w.divide(&p(&ur, "{a,c}")).classes().pure);
    assert!(!w.divide(&p(&ur, "{a,b}")).classes().pure);
}

#[test]
fn divide_identity_is_identity() {
    let (ur, d) = setup();
    let ab = p(&ur, "{a,b}");
    let f = MapExpr::identity(&d).divide(&ab);
    assert!(f.map().same_as(&SimplicialMap::identity(&d.subdivide(&ab))));
}

#[test]
fn family_division_is_enumeration_independent() {
    let (ur, d) = setup();
    let w = MapExpr::weld(&d, &p(&ur, "b"), &p(&ur, "{a,b,c}")).unwrap();
    let fam = AdditiveFamily::new([p(&ur, "{a,b}"), p(&ur, "{a,b,c}")], &d).unwrap();
    let canon = w.divide_family(&fam).unwrap();
    let mut n = 0;
    for e in fam.enumerations() {
        let f = w.divide_seq(&e);
        assert!(f.map().same_as(canon.map()));
        n += 1;
    }
    assert!(n >= 1);
    assert!(w.divide_family(&AdditiveFamily::empty()).unwrap().map().same_as(w.map()));
}

#[test]
fn division_distributes_over_composition() {
    let (ur, d) = setup();
    let f = MapExpr::weld(&d, &p(&ur, "b"), &p(&ur, "{a,b,c}")).unwrap();
    let g = MapExpr::weld(f.dom(), &p(&ur, "c"), &p(&ur, "{b,c}")).unwrap();
    let fg = f.compose(&g).unwrap();
    let fam = AdditiveFamily::new([p(&ur, "{a,b}"), p(&ur, "{a,b,c}")], &d).unwrap();
    let lhs = fg.divide_family(&fam).unwrap();
    let sf = f.divide_family(&fam).unwrap();
    let pre = f.map().preimage_family(&fam);
    let rhs = sf.compose(&g.divide_family(&pre).unwrap()).unwrap();
    assert!(lhs.map().same_as(rhs.map()));
}

#[test]
fn typed_isos_round_trip() {
    let (ur, d) = setup();
    let a = p(&ur, "a");
    let b = p(&ur, "b");
    let t = p(&ur, "{a,b,c}");
    let k = IsoKind::Type1 {
        r: vec![a.clone()],
        s: vec![b.clone()],
        t: t.clone(),
    };
    let al = MapExpr::typed_iso(k.clone(), &d).unwrap();
    let back = MapExpr::typed_iso(k.inverse(), &d).unwrap();
    let id = al.compose(&back).unwrap();
    assert!(id.map().same_as(&SimplicialMap::identity(back.dom())));
    assert!(al.map().check_grounded().is_ok());
    assert_eq!(al.map().apply(&t), &p(&ur, "{b,{a,b,c}}"));
    assert_eq!(al.map().apply(&p(&ur, "{a,{a,b,c}}")), &t);

    let k2 = IsoKind::Type2 {
        s: p(&ur, "{a,c}"),
        t: p(&ur, "{b,c}"),
    };
    let be = MapExpr::typed_iso(k2.clone(), &d).unwrap();
    let back = MapExpr::typed_iso(k2.inverse(), &d).unwrap();
    assert!(be.compose(&back).unwrap().map().same_as(&SimplicialMap::identity(back.dom())));
    assert_eq!(be.map().apply(&p(&ur, "{a,{b,c}}")), &p(&ur, "{b,{a,c}}"));

    let d3 = MapExpr::typed_iso(IsoKind::Type3a { x: a.clone() }, &d).unwrap();
    let d3b = MapExpr::typed_iso(IsoKind::Type3b { x: a.clone() }, &d).unwrap();
    assert!(d3b.compose(&d3).unwrap().map().same_as(&SimplicialMap::identity(&d)));
}

#[test]
fn structural_inverse_of_divided_iso() {
    let (ur, d) = setup();
    let k = IsoKind::Type2 {
        s: p(&ur, "{a,c}"),
        t: p(&ur, "{b,c}"),
    };
    let be = MapExpr::typed_iso(k, &d).unwrap();
    let face = be.cod().faces().iter().find(|f| f.len() == 2 && f.rank() == 2).unwrap().clone();
    let div = be.divide(&face);
    assert!(div.classes().iso && div.classes().pure);
    let inv = div.inverse().unwrap();
    assert!(inv.compose(&div).unwrap().map().same_as(&SimplicialMap::identity(div.dom())));
}

fn direct(dom: &Complex, cod: &Complex, pairs: &[(HfSet, HfSet)]) -> SimplicialMap {
    SimplicialMap::from_assignment(dom.clone(), cod.clone(), pairs).unwrap()
}

#[test]
fn commutation_isomorphisms_match_assignments() {
    let ur = Ur::letters(4);
    let q = Complex::full(&ur);
    let t = p(&ur, "{a,b,c}");
    for s in ["{a}", "{a,b}", "{a,b,c}"] {
        let s = p(&ur, s);
        let f = commut_i(&q, &s, &t).unwrap();
        let v = HfSet::from_elems(t.minus(&s).into_iter().chain([s.clone()])).unwrap();
        assert!(f.map().is_grounded_iso());
        assert!(f.map().same_as(&direct(f.dom(), f.cod(), &[(t.clone(), v.clone())])));
        assert_eq!(f.cod(), &q.subdivide_seq(&[v, s.clone()]));
        assert!(f.classes().iso);
    }
    let s = p(&ur, "{a,b}");
    for r in [vec![], vec![p(&ur, "a")], vec![p(&ur, "a"), p(&ur, "b")]] {
        let f = commut_ii(&q, &r, &s, &t).unwrap();
        let t_r = HfSet::from_elems(t.iter().filter(|x| !r.contains(x)).cloned().chain([s.clone()])).unwrap();
        let v = HfSet::from_elems(t.minus(&s).into_iter().chain([s.clone()])).unwrap();
        let rt = HfSet::from_elems(r.iter().cloned().chain([t.clone()])).unwrap();
        let want = direct(f.dom(), f.cod(), &[(t.clone(), t_r.clone()), (rt.clone(), v.clone())]);
        assert!(f.map().same_as(&want), "r={r:?}");
        assert_eq!(f.dom(), &q.subdivide_seq(&[rt, s.clone(), t.clone()]));
        assert_eq!(f.cod(), &q.subdivide_seq(&[v, t_r, s.clone()]));
        assert!(f.map().is_grounded_iso());
    }
}

#[test]
fn org6_collapse_matches_assignment_and_is_pure() {
    let ur = Ur::letters(4);
    let q = Complex::full(&ur);
    let pre = vec![p(&ur, "{c,d}")];
    let groups = vec![
        Org6Group {
            r: p(&ur, "{a}"),
            s: vec![p(&ur, "{a,b}"), p(&ur, "{a,b,c}")],
        },
        Org6Group {
            r: p(&ur, "{b,d}"),
            s: vec![p(&ur, "{a,b,d}")],
        },
    ];
    let f = org6(&q, &pre, &groups).unwrap();
    let mut seq = pre.clone();
    seq.extend(groups.iter().map(|g| g.r.clone()));
    assert_eq!(f.cod(), &q.subdivide_seq(&seq));
    let pairs: Vec<(HfSet, HfSet)> = groups
        .iter()
        .flat_map(|g| g.s.iter().map(move |s| (s.clone(), g.r.clone())))
        .collect();
    assert!(f.map().same_as(&direct(f.dom(), f.cod(), &pairs)));
    assert!(f.classes().pure && f.classes().division);
    assert!(f.map().check_grounded().is_ok());
}

#[test]
fn expr_json_round_trip() {
    let (ur, d) = setup();
    let w = MapExpr::weld(&d, &p(&ur, "b"), &p(&ur, "{a,b,c}")).unwrap();
    let e = w.divide(&p(&ur, "{a,b}"));
    let text = serde_json::to_string(&e.to_json()).unwrap();
    let back: ExprJson = serde_json::from_str(&text).unwrap();
    let e2 = back.build().unwrap();
    assert!(e2.map().same_as(e.map()));
    assert_eq!(e2.classes(), e.classes());

    let src = r#"{"op":"weld","base":{"urelements":["a","b","c"]},"p":"b","t":["a","b","c"]}"#;
    let w2 = serde_json::from_str::<ExprJson>(src).unwrap().build().unwrap();
    assert!(w2.map().same_as(w.map()));
}

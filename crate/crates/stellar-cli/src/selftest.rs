use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;
use stellar::amalgam::describe_preimage;
use stellar::complex::nonempty_subsets;
use stellar::gen::Gen;
use stellar::seqcalc::{divide_by_family, is_face_of_seq};
use stellar::{amalgamate, build_tower, coinitiality, main_lemma_certificate, Complex, MapExpr, Schedule, SimplicialMap, Ur};

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

type Case = fn(&mut Gen) -> Result<(), String>;

fn ur(g: &mut Gen) -> Ur {
    Ur::letters(g.rng().gen_range(2..=4))
}

fn divided(g: &mut Gen, max: usize) -> Complex {
    let u = ur(g);
    let ground = g.ground(&u);
    let k = g.rng().gen_range(0..=max);
    g.divided(&ground, k).1
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn shatter_count(g: &mut Gen) -> Result<(), String> {
    let a = divided(g, 2);
    let s = g.face(&a);
    let above = a.faces().iter().filter(|t| s.is_subset(t)).count();
    let expected = a.len() + above * ((1usize << s.len()) - 2);
    let got = a.subdivide(&s).len();
    ensure(got == expected, || format!("{s}: {got} faces, expected {expected}"))
}

fn commutation(g: &mut Gen) -> Result<(), String> {
    let a = divided(g, 1);
    let (s, t) = (g.face(&a), g.face(&a));
    if s.is_member(&t) || t.is_member(&s) || (a.contains(&s.union(&t)) && !s.intersection(&t).is_empty()) {
        return Ok(());
    }
    ensure(a.subdivide(&t).subdivide(&s) == a.subdivide(&s).subdivide(&t), || format!("{s} and {t}"))
}

fn conservativity(g: &mut Gen) -> Result<(), String> {
    let u = ur(g);
    let a = g.ground(&u);
    let len = g.rng().gen_range(0..=3);
    let (seq, sa) = g.divided(&a, len);
    let pool: Vec<_> = u.atoms().cloned().chain(seq.entries().iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    for t in nonempty_subsets(&pool).filter(|t| t.len() <= 4) {
        let predicted = is_face_of_seq(&t, &seq, &u) && a.contains(&t.support_set());
        ensure(predicted == sa.contains(&t), || format!("{t} in {seq}"))?;
    }
    Ok(())
}

fn enumeration_invariance(g: &mut Gen) -> Result<(), String> {
    let a = divided(g, 2);
    let fam = g.additive_family(&a, 5);
    let expected = divide_by_family(&a, &fam);
    for e in fam.enumerations() {
        ensure(a.subdivide_seq(&e) == expected, || format!("enumeration {e:?}"))?;
    }
    Ok(())
}

fn groundedness(g: &mut Gen) -> Result<(), String> {
    let a = divided(g, 1);
    let m = g.tree(&a, 3);
    ensure(m.map().check_grounded().is_ok(), || format!("{m}"))
}

fn iso_round_trip(g: &mut Gen) -> Result<(), String> {
    let a = divided(g, 2);
    let Some(iso) = g.typed_iso(&a) else { return Ok(()) };
    let back = iso.inverse().map_err(|e| e.to_string())?;
    let there = iso.map().compose(back.map()).map_err(|e| e.to_string())?;
    ensure(there.same_as(&SimplicialMap::identity(iso.cod())), || format!("{iso}"))
}

fn functoriality(g: &mut Gen) -> Result<(), String> {
    let u = ur(g);
    let a = g.ground(&u);
    let f = g.map_into(&a, 2);
    let h = g.map_into(&f.dom().clone(), 2);
    let s = g.additive_family(&a, 3);
    let (fm, hm) = (f.map(), h.map());
    let lhs = fm.compose(hm).map_err(|e| e.to_string())?.divide_family(&s);
    let rhs = fm
        .divide_family(&s)
        .compose(&hm.divide_family(&fm.preimage_family(&s)))
        .map_err(|e| e.to_string())?;
    ensure(lhs.same_as(&rhs), || format!("{f} and {h}"))
}

fn preimage_description(g: &mut Gen) -> Result<(), String> {
    let u = ur(g);
    let a = g.ground(&u);
    let (s, t, p) = g.main_lemma_input(&a);
    let pi = MapExpr::pi_pt(&a, &p, &t).map_err(|e| e.to_string())?;
    let engine = pi.map().preimage_family(&s);
    ensure(&describe_preimage(s.members(), t.members(), &p) == engine.members(), || format!("p={p}"))
}

fn pure_certificates(g: &mut Gen) -> Result<(), String> {
    let u = ur(g);
    let a = g.ground(&u);
    let (s, t, p) = g.main_lemma_input(&a);
    let cert = main_lemma_certificate(&s, &t, &p, &a).map_err(|e| e.to_string())?;
    let j = cert.to_json();
    ensure(j.all_pure && j.composes_to_target, || format!("p={p}"))
}

fn amalgamation(g: &mut Gen) -> Result<(), String> {
    let u = Ur::letters(g.rng().gen_range(2..=3));
    let c = g.ground(&u);
    let fp = g.weld_chain(&c, 2);
    let gp = g.map_into(&c, 2);
    let res = amalgamate(&fp, &gp).map_err(|e| e.to_string())?;
    res.verify(&fp, &gp).map_err(|e| e.to_string())?;
    ensure(res.neat_factors.iter().all(|m| m.classes().neat), || format!("{fp} and {gp}"))
}

fn coinitial(g: &mut Gen) -> Result<(), String> {
    let u = Ur::letters(g.rng().gen_range(2..=3));
    let c = g.ground(&u);
    let h = g.tree(&c, 3);
    let w = coinitiality(&h).map_err(|e| e.to_string())?;
    w.verify(&h).map_err(|e| e.to_string())
}

fn tower(g: &mut Gen) -> Result<(), String> {
    let u = Ur::letters(g.rng().gen_range(2..=3));
    let c = g.ground(&u);
    let t = build_tower(&c, 2, &Schedule::default()).map_err(|e| e.to_string())?;
    for n in 0..t.top_index() {
        t.check_containment(n).map_err(|e| e.to_string())?;
    }
    let eps = t.epsilons();
    ensure(eps.windows(2).all(|w| w[1] <= w[0] + 1e-9), || format!("{eps:?}"))
}

const CHECKS: &[(&str, Case, usize)] = &[
    ("subdivision face count", shatter_count, 1),
    ("commutation", commutation, 1),
    ("conservativity of sequence faces", conservativity, 1),
    ("enumeration independence", enumeration_invariance, 1),
    ("groundedness", groundedness, 1),
    ("typed iso round trip", iso_round_trip, 1),
    ("functoriality", functoriality, 1),
    ("preimage description", preimage_description, 1),
    ("pure certificates", pure_certificates, 1),
    ("amalgamation squares", amalgamation, 8),
    ("coinitiality", coinitial, 4),
    ("tower containment and decay", tower, 8),
];

/// Runs every check `cases / divisor` times, one worker thread per check.
pub fn run(seed: u64, cases: usize) -> SelftestReport {
    let checks: Vec<CheckResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = CHECKS
            .iter()
            .enumerate()
            .map(|(i, &(name, case, divisor))| {
                scope.spawn(move || {
                    let mut g = Gen::new(seed.wrapping_add(i as u64));
                    let n = (cases / divisor).max(1);
                    let mut failures = Vec::new();
                    for _ in 0..n {
                        if let Err(e) = case(&mut g) {
                            if failures.len() < 5 {
                                failures.push(e);
                            }
                        }
                    }
                    CheckResult {
                        name,
                        cases: n,
                        passed: failures.is_empty(),
                        failures,
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
    });
    SelftestReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

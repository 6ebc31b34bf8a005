//! Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
//!
//! Criterion 10 is known to fail on its separation clause; the process exits
//! non-zero only when any other criterion, or another clause of 10, fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use stellar::amalgam::amalgamate;
use stellar::complex::nonempty_subsets;
use stellar::gen::{all_ground_complexes, Gen};
use stellar::limit::report::{RELATED, SEPARATED, SUPPORT};
use stellar::seqcalc::{divide_by_family, is_face_of_seq, DivSeq};
use stellar::simap::{Kind, SimplicialMap};
use stellar::{build_tower, coinitiality, main_lemma_certificate, quotient_report, Complex, HfSet, MapExpr, Schedule, Ur};

const SEED: u64 = 20_240_601;
const KNOWN_RED: &[usize] = &[10];

struct Outcome {
    passed: bool,
    detail: String,
    /// Clauses that must hold even when the criterion is known to fail.
    required_ok: bool,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Outcome {
            passed,
            detail,
            required_ok: passed,
        }
    }
}

/// All sequences of at most `len` divisions, each entry a face of the complex divided so far.
fn sequences(a: &Complex, len: usize, suffix: &mut Vec<HfSet>, cur: &Complex, out: &mut Vec<(Vec<HfSet>, Complex)>) {
    out.push((suffix.clone(), cur.clone()));
    if suffix.len() == len {
        return;
    }
    for s in cur.faces() {
        suffix.insert(0, s.clone());
        sequences(a, len, suffix, &cur.subdivide(s), out);
        suffix.remove(0);
    }
}

fn c1_subdivision_oracle() -> Outcome {
    let ur = Ur::letters(3);
    let atoms: Vec<HfSet> = ur.atoms().cloned().collect();
    let (mut checked, mut seqs, mut bad) = (0usize, 0usize, Vec::new());
    let complexes = all_ground_complexes(&ur);
    for a in &complexes {
        let mut all = Vec::new();
        sequences(a, 3, &mut Vec::new(), a, &mut all);
        for (seq, divided) in all {
            seqs += 1;
            assert_eq!(divided, a.subdivide_seq(&seq));
            let pool: Vec<HfSet> = atoms.iter().chain(&seq).cloned().collect::<BTreeSet<_>>().into_iter().collect();
            let ds = DivSeq::new(seq.clone());
            for t in nonempty_subsets(&pool).filter(|t| t.len() <= 4) {
                checked += 1;
                let predicted = is_face_of_seq(&t, &ds, &ur) && a.contains(&t.support_set());
                if predicted != divided.contains(&t) && bad.len() < 3 {
                    bad.push(format!("{t} in {ds}"));
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("{} complexes, {seqs} sequences, {checked} memberships, mismatches {bad:?}", complexes.len()),
    )
}

fn c2_enumeration_independence() -> Outcome {
    let mut g = Gen::new(SEED + 2);
    let (mut families, mut enumerations, mut bad) = (0, 0usize, 0);
    while families < 500 {
        let ur = Ur::letters(g.rng_range(2, 4));
        let ground = g.ground(&ur);
        let divs = g.rng_range(0, 2);
        let (_, c) = g.divided(&ground, divs);
        let fam = g.additive_family(&c, 5);
        let expected = divide_by_family(&c, &fam);
        for e in fam.enumerations() {
            enumerations += 1;
            if c.subdivide_seq(&e) != expected {
                bad += 1;
            }
        }
        families += 1;
    }
    Outcome::new(bad == 0, format!("{families} families, {enumerations} enumerations, {bad} differ"))
}

fn c3_commutation() -> Outcome {
    let ur = Ur::letters(3);
    let (mut pairs, mut bad, mut witnessed) = (0, 0, 0);
    let mut contexts = Vec::new();
    for a in all_ground_complexes(&ur) {
        for s in a.faces() {
            contexts.push(a.subdivide(s));
        }
        contexts.push(a);
    }
    for a in &contexts {
        for s in a.faces() {
            for t in a.faces() {
                pairs += 1;
                let apart = !a.contains(&s.union(t)) || s.intersection(t).is_empty();
                let same = a.subdivide(t).subdivide(s) == a.subdivide(s).subdivide(t);
                if apart && !same {
                    bad += 1;
                }
                if !apart && !same {
                    witnessed += 1;
                }
            }
        }
    }
    Outcome::new(
        bad == 0 && witnessed > 0,
        format!("{} contexts, {pairs} pairs, {bad} failures, {witnessed} witnessed inequalities", contexts.len()),
    )
}

fn c4_groundedness() -> Outcome {
    let mut g = Gen::new(SEED + 4);
    let (mut maps, mut bad, mut isos, mut bad_iso) = (0, 0, 0, 0);
    let mut kinds = BTreeSet::new();
    while maps < 1200 {
        let ur = Ur::letters(g.rng_range(2, 4));
        let ground = g.ground(&ur);
        let divs = g.rng_range(0, 2);
        let (_, c) = g.divided(&ground, divs);
        let base = g.generator(&c);
        let mut batch = vec![("weld", g.weld(&c)), ("pi_iota", g.pi_iota(&c))];
        if let Some(iso) = g.typed_iso(&c) {
            isos += 1;
            let back = iso.inverse().unwrap();
            let there = iso.map().compose(back.map()).unwrap();
            let again = back.map().compose(iso.map()).unwrap();
            if !there.same_as(&SimplicialMap::identity(iso.cod())) || !again.same_as(&SimplicialMap::identity(iso.dom())) {
                bad_iso += 1;
            }
            batch.push(("typed_iso", iso));
        }
        let s = g.face(&base.cod().clone());
        batch.push(("divide_map", base.divide(&s)));
        let fam = g.additive_family(&base.cod().clone(), 4);
        batch.push(("divide_map_by_family", base.divide_family(&fam).unwrap()));
        let inner = g.generator_into(&base.dom().clone());
        batch.push(("compose", base.compose(&inner).unwrap()));
        for (kind, m) in batch {
            kinds.insert(kind);
            maps += 1;
            if !m.map().check_grounded().is_ok() {
                bad += 1;
            }
        }
    }
    Outcome::new(
        bad == 0 && bad_iso == 0 && kinds.len() == 6,
        format!("{maps} maps over {} constructors, {bad} ungrounded, {isos} iso round trips, {bad_iso} failed", kinds.len()),
    )
}

fn c5_functoriality() -> Outcome {
    let mut g = Gen::new(SEED + 5);
    let mut bad = 0;
    let n = 250;
    for _ in 0..n {
        let ur = Ur::letters(g.rng_range(2, 4));
        let a = g.ground(&ur);
        let f = g.map_into(&a, 2);
        let h = g.map_into(&f.dom().clone(), 2);
        let s = g.additive_family(&a, 3);
        let (f, h) = (f.map(), h.map());
        let lhs = f.compose(h).unwrap().divide_family(&s);
        let rhs = f.divide_family(&s).compose(&h.divide_family(&f.preimage_family(&s))).unwrap();
        if !lhs.same_as(&rhs) {
            bad += 1;
        }
    }
    Outcome::new(bad == 0, format!("{n} triples, {bad} failures"))
}

fn c6_amalgamation() -> Outcome {
    let mut g = Gen::new(SEED + 6);
    let (mut pairs, mut bad, mut not_neat) = (0, Vec::new(), 0);
    for (atoms, count) in [(3, 80), (4, 40)] {
        let c = Complex::full(&Ur::letters(atoms));
        for _ in 0..count {
            let fp = g.weld_chain(&c, 3);
            let gp = g.map_into(&c, 3);
            pairs += 1;
            match amalgamate(&fp, &gp) {
                Ok(res) => {
                    if res.verify(&fp, &gp).is_err() {
                        bad.push("square".to_string());
                    }
                    let neat = res.neat_factors.iter().all(|m| m.classes().neat)
                        && (res.neat_factors.is_empty()
                            || MapExpr::compose_all(&res.neat_factors).unwrap().map().same_as(res.g.map()));
                    if !neat {
                        not_neat += 1;
                    }
                }
                Err(e) => bad.push(e.to_string()),
            }
        }
    }
    bad.truncate(3);
    Outcome::new(
        bad.is_empty() && not_neat == 0,
        format!("{pairs} pairs, failures {bad:?}, {not_neat} without a neat certificate"),
    )
}

fn c7_main_lemma() -> Outcome {
    let mut g = Gen::new(SEED + 7);
    let (mut n, mut nontrivial, mut bad) = (0, 0, Vec::new());
    while nontrivial < 60 {
        let ur = Ur::letters(g.rng_range(2, 5));
        let c = g.ground(&ur);
        let (s, t, p) = g.main_lemma_input(&c);
        n += 1;
        if !t.is_empty() && !s.is_empty() {
            nontrivial += 1;
        }
        match main_lemma_certificate(&s, &t, &p, &c) {
            Ok(cert) => {
                let json = cert.to_json();
                if !json.all_pure || !json.composes_to_target {
                    bad.push(format!("S={:?} T={:?} p={p}", s.members(), t.members()));
                }
            }
            Err(e) => bad.push(e.to_string()),
        }
    }
    bad.truncate(3);
    Outcome::new(bad.is_empty(), format!("{n} inputs ({nontrivial} with S, T nonempty), failures {bad:?}"))
}

fn c8_coinitiality() -> Outcome {
    let mut g = Gen::new(SEED + 8);
    let (mut n, mut bad) = (0, Vec::new());
    for i in 0..80 {
        let c = match i % 3 {
            0 => Complex::full(&Ur::letters(3)),
            1 => Complex::full(&Ur::letters(4)),
            _ => g.ground(&Ur::letters(3)),
        };
        let h = g.tree(&c, 3);
        n += 1;
        match coinitiality(&h) {
            Ok(w) => {
                let welds = w.chain.welds.iter().all(|m| matches!(m.kind(), Kind::Weld { .. }));
                if w.verify(&h).is_err() || !welds {
                    bad.push(format!("tree of size {}", h.size()));
                }
            }
            Err(e) => bad.push(e.to_string()),
        }
    }
    bad.truncate(3);
    Outcome::new(bad.is_empty(), format!("{n} trees, failures {bad:?}"))
}

fn c9_diameter_decay() -> Outcome {
    let d = Complex::full(&Ur::letters(3));
    let exact = build_tower(&d, 3, &Schedule::default()).unwrap();
    let eps = exact.realization(0).barycentric_epsilons(&d, 8);
    let agree = exact.epsilons().iter().zip(&eps).all(|(a, b)| (a - b).abs() < 1e-12);
    let step_ok = eps.windows(2).all(|w| w[1] <= 2.0 / 3.0 * w[0] + 1e-9);
    let bound = (2.0f64 / 3.0).powi(8) * 2f64.sqrt();
    let final_ok = eps[8] <= bound + 1e-6;
    Outcome::new(
        agree && step_ok && final_ok,
        format!("ε_8 = {:.6} ≤ {bound:.6}, per-block ratio ≤ 2/3: {step_ok}, matches exact tower for 3 blocks: {agree}", eps[8]),
    )
}

fn c10_quotient_report() -> Outcome {
    let d = Complex::full(&Ur::letters(3));
    let tower = build_tower(&d, 4, &Schedule::default()).unwrap();
    let rep = quotient_report(&tower, 200, SEED).unwrap();
    let related = rep.check(RELATED).unwrap();
    let supports = rep.check(SUPPORT).unwrap();
    let separated = rep.check(SEPARATED).unwrap();
    let enough = rep.pairs.len() >= 100;
    let required_ok = related.passed && supports.passed && enough;
    Outcome {
        passed: required_ok && separated.passed,
        detail: format!(
            "{} pairs; related d_n ≤ ε_n: {} ({}); Sp_fr = Sp_go: {} ({}); separation d_N > ε_N: {} ({})",
            rep.pairs.len(),
            related.passed,
            related.detail,
            supports.passed,
            supports.detail,
            separated.passed,
            separated.detail
        ),
        required_ok,
    }
}

trait RangeExt {
    fn rng_range(&mut self, lo: usize, hi: usize) -> usize;
}

impl RangeExt for Gen {
    fn rng_range(&mut self, lo: usize, hi: usize) -> usize {
        use rand::Rng;
        self.rng().gen_range(lo..=hi)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("subdivision oracle equivalence", c1_subdivision_oracle, Duration::from_secs(60)),
        ("enumeration independence", c2_enumeration_independence, Duration::from_secs(120)),
        ("commutation", c3_commutation, Duration::MAX),
        ("groundedness preservation", c4_groundedness, Duration::MAX),
        ("functoriality", c5_functoriality, Duration::MAX),
        ("amalgamation", c6_amalgamation, Duration::from_secs(600)),
        ("main lemma certificates", c7_main_lemma, Duration::MAX),
        ("coinitiality", c8_coinitiality, Duration::MAX),
        ("diameter decay", c9_diameter_decay, Duration::from_secs(60)),
        ("quotient report", c10_quotient_report, Duration::MAX),
    ];
    let mut unexpected = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let mut out = run();
        let took = start.elapsed();
        if took > *budget {
            out.passed = false;
            out.required_ok = false;
            out.detail.push_str(&format!("; over the {budget:?} budget"));
        }
        let status = if out.passed { "PASS" } else { "FAIL" };
        println!("{status} {id:>2} {name} [{:.2}s]: {}", took.as_secs_f64(), out.detail);
        let tolerated = KNOWN_RED.contains(&id) && out.required_ok;
        if !out.passed && !tolerated {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed unexpectedly");
        ExitCode::FAILURE
    }
}

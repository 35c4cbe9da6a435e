//! Acceptance run. Prints one PASS/FAIL line per criterion with its runtime
//! and budget, and exits nonzero if any criterion fails. All checks are
//! exact: tolerance is zero throughout.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bctorus::bitquad::{find_isometry, general_linear_group, isometry_classes, orthogonal_group, pointed_orbits, QuadForm};
use bctorus::eala::{Eala, EalaElem, ExportScope, Sector};
use bctorus::hermitian::{HalfDeg, HermitianData};
use bctorus::identities::{run_suite, SuiteConfig};
use bctorus::lietorus::*;
use bctorus::roots;
use bctorus::torus::Torus;
use bctorus::unitary::Unitary;
use common::sampler::Sampler;
use common::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TABLE_ROWS: [&str; 5] = ["0", "l3", "l2 + l3 + l2l3", "l2l3", "l3 + l1l2"];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn criterion(id: u32, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_time = budget.is_none_or(|b| took < b);
    let ok = o.ok && in_time;
    let budget = budget.map_or("none".to_string(), |b| format!("{} s", b.as_secs()));
    println!(
        "{} [{id}] {title}: {} ({:.2} s, budget {budget})",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
    ok
}

fn classify_three() -> Outcome {
    let reps = isometry_classes(3).unwrap();
    if reps.len() != 5 {
        return outcome(false, format!("{} classes", reps.len()));
    }
    for (rep, row) in reps.iter().zip(TABLE_ROWS) {
        let target = QuadForm::parse(3, row).unwrap();
        if find_isometry(rep, &target, &[0], &[0]).unwrap().is_none() {
            return outcome(false, format!("{rep} not isometric to {row}"));
        }
        pointed_orbits(rep).unwrap();
    }
    outcome(true, "5 classes, each isometric to its table row")
}

fn kappa_b_orbits() -> Outcome {
    let k = QuadForm::parse(3, "l3 + l1l2").unwrap();
    let rad = k.radical();
    let iso = k.iso_set();
    let orbits = pointed_orbits(&k).unwrap();
    let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
    let ok = rad == [0] && iso == [0, 1, 2, 7] && sizes == [1, 2, 3, 4];
    outcome(ok, format!("rad={rad:?} iso={iso:?} orbit sizes={sizes:?}"))
}

fn full_report(u: &Unitary) -> Outcome {
    let slice = Slice::build(u, Window::new(2));
    let aniso = u.data().check_anisotropic();
    let axioms = check_lt_axioms_on(u, &slice);
    let lemmas = check_support_lemmas_on(u, &slice);
    let centre = centre_window_check_on(u, &slice);
    let failed: Vec<&str> =
        axioms.checks.iter().chain(&lemmas.checks).filter(|c| !c.passed || c.checked == 0).map(|c| c.name.as_str()).collect();
    let ok = aniso.passed && failed.is_empty() && centre == 0;
    outcome(ok, format!("anisotropy={} failed checks={failed:?} centre dim={centre}", aniso.passed))
}

fn identity_suites() -> Outcome {
    let mut details = Vec::new();
    for (name, u) in [("A", setup_a()), ("B", setup_b())] {
        let report = run_suite(&u, SuiteConfig::default());
        let min = report.results.iter().map(|r| r.instances).min().unwrap_or(0);
        let failures: usize = report.results.iter().map(|r| r.failures).sum();
        if !report.passed() || min < 1000 || report.results.len() != 7 {
            return outcome(false, format!("setup {name}: {} identities, min {min} instances, {failures} failures", report.results.len()));
        }
        details.push(format!("{name}: 7 identities x {min}"));
    }
    outcome(true, format!("{}, 0 failures", details.join("; ")))
}

fn eala_checks() -> Outcome {
    let mut triples = 0;
    for (seed, e, w) in [(5u64, Eala::new(&data(3, 3, "l3 + l1l2", &[0, 1, 2])).unwrap(), 2), (6, Eala::new(&data(3, 1, "0", &[0])).unwrap(), 4)] {
        let sampler = Sampler::new(&e, w, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = |a: &EalaElem, c: &EalaElem| e.bracket(a, c).unwrap();
        for _ in 0..300 {
            let (x, y, z) = (sampler.elem(&mut rng), sampler.elem(&mut rng), sampler.elem(&mut rng));
            let jac = b(&x, &b(&y, &z)).add(&b(&y, &b(&z, &x))).add(&b(&z, &b(&x, &y)));
            if !jac.is_zero() {
                return outcome(false, format!("Jacobi fails on {x:?} {y:?} {z:?}"));
            }
            let inv = e.form(&b(&x, &y), &z).unwrap() + e.form(&y, &b(&x, &z)).unwrap();
            if inv != num_traits::Zero::zero() {
                return outcome(false, "form not invariant");
            }
            triples += 1;
        }
        let n = e.n();
        for sigma in e.gamma_m_in(Window::new(6)) {
            let expected = if sigma.iter().all(|&x| x == 0) { n } else { n - 1 };
            if e.der_basis(&sigma).len() != expected {
                return outcome(false, format!("dim D at {sigma:?} is {}", e.der_basis(&sigma).len()));
            }
        }
        let cartan = e.export(ExportScope::Cartan);
        let count = |s: Sector| cartan.basis.iter().filter(|x| x.sector == s).count();
        if !cartan.brackets.is_empty() || count(Sector::D) != n || count(Sector::C) != n {
            return outcome(false, "H is not abelian of the expected size");
        }
    }
    outcome(true, format!("{triples} triples exact; dim D matches; H abelian"))
}

fn graded_dimensions() -> Outcome {
    let u = setup_b();
    let slice = Slice::build(&u, Window::new(2));
    let kappa = u.data().torus().kappa().clone();
    let e1 = roots::eps(3, 1, 1);
    let long = roots::add(&e1, &roots::eps(3, 2, 1));
    let extra = roots::add(&e1, &e1);
    let m = u.data().subset();
    let degs = Window::new(2).degrees(3);
    for d in &degs {
        let lattice = d.in_lattice();
        let minus = lattice && kappa.at(d.to_lattice().map(|s| HalfDeg::half_of(&s).mask()).unwrap()) == 1;
        let half_m = m.contains(&d.mask());
        let got = (slice.dim(&long, d), slice.dim(&extra, d), slice.dim(&e1, d));
        if got != (usize::from(lattice), usize::from(minus), usize::from(half_m)) {
            return outcome(false, format!("at {d}: dims {got:?}"));
        }
    }
    outcome(true, format!("{} degrees, three tables match", degs.len()))
}

fn signatures() -> Outcome {
    let w = Window::new(2);
    let integer: BTreeSet<HalfDeg> = [-2, 0, 2].iter().map(|&x| hd(&[x])).collect();
    let odd: BTreeSet<HalfDeg> = [-2, 2].iter().map(|&x| hd(&[x])).collect();
    let all: BTreeSet<HalfDeg> = w.degrees(1).into_iter().collect();
    let cases: [(&str, &str, &[u32], &BTreeSet<HalfDeg>, Option<&BTreeSet<HalfDeg>>); 3] = [
        ("A_2r^(2)", "l1", &[0], &integer, Some(&odd)),
        ("B_r^(1)", "0", &[0], &integer, None),
        ("D_r+1^(2)", "0", &[0, 1], &all, None),
    ];
    for (name, kappa, m, short, extra) in cases {
        let slice = Slice::build(&Unitary::new(data(3, 1, kappa, m)), w);
        let got_short = slice.support(&roots::eps(3, 1, 1));
        let got_long = slice.support(&roots::add(&roots::eps(3, 1, 1), &roots::eps(3, 2, 1)));
        let got_extra = slice.support(&roots::eps(3, 1, 2));
        let ok = &got_short == short && got_long == integer && extra.map_or(got_extra.is_empty(), |x| &got_extra == x);
        if !ok {
            return outcome(false, format!("{name}: short {got_short:?} extra {got_extra:?}"));
        }
    }
    outcome(true, "A_2r^(2), B_r^(1), D_r+1^(2) patterns")
}

fn centroid() -> Outcome {
    let mut details = Vec::new();
    for (name, u) in [("A", setup_a()), ("B", setup_b())] {
        let report = centroid_window_oracle(&u, Window::new(2)).unwrap();
        if !report.passed() {
            return outcome(false, format!("setup {name}: {:?}", report.shifts));
        }
        let hits = report.shifts.iter().filter(|s| s.nullity == 1).count();
        details.push(format!("{name}: {} shifts, {hits} central", report.shifts.len()));
    }
    outcome(true, details.join("; "))
}

fn decision_procedure() -> Outcome {
    let mut catalog = Vec::new();
    for k in isometry_classes(3).unwrap() {
        for m in pointed_orbits(&k).unwrap() {
            catalog.push((k.clone(), m));
        }
    }
    let build = |k: &QuadForm, m: &[u32]| HermitianData::build(3, Torus::from_form(k.clone()), m).unwrap();
    let reps: Vec<HermitianData> = catalog.iter().map(|(k, m)| build(k, m)).collect();
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            if biisomorphic(a, b).unwrap().equivalent {
                return outcome(false, format!("{:?} ~ {:?}", a.subset(), b.subset()));
            }
        }
    }
    let gl = general_linear_group(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x05c4_ab1e);
    let mut copies = 0;
    for (idx, (k, m)) in catalog.iter().enumerate() {
        let o = orthogonal_group(k).unwrap();
        for _ in 0..4 {
            let h = o.choose(&mut rng).unwrap();
            let g = gl.choose(&mut rng).unwrap();
            // κ′ = κ ∘ g⁻¹ and M′ = g h M, so κ′ vanishes on M′.
            let k2 = k.pullback(&g.inverse().unwrap());
            let m2 = g.image_of_set(&h.image_of_set(m));
            let copy = build(&k2, &m2);
            let matches: Vec<usize> =
                reps.iter().enumerate().filter(|(_, r)| biisomorphic(&copy, r).unwrap().equivalent).map(|(j, _)| j).collect();
            if matches != [idx] {
                return outcome(false, format!("copy of {idx} matched {matches:?}"));
            }
            let v = biisomorphic(&copy, &reps[idx]).unwrap();
            let iso = v.isometry.unwrap();
            let mut image = iso.image_of_set(copy.subset());
            image.sort_unstable();
            if image != reps[idx].subset() || k.pullback(&iso) != k2 {
                return outcome(false, "returned isometry does not carry the data");
            }
            copies += 1;
        }
    }
    outcome(true, format!("{} representatives pairwise inequivalent; {copies} scrambled copies recovered", reps.len()))
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let results = [
        criterion(1, "isometry classes for n=3", secs(1), classify_three),
        criterion(2, "radical, iso set and orbits of l3 + l1l2", secs(1), kappa_b_orbits),
        criterion(3, "full report, Setup A, w=2", secs(60), || full_report(&setup_a())),
        criterion(3, "full report, Setup B, w=2", secs(60), || full_report(&setup_b())),
        criterion(4, "identity suite", None, identity_suites),
        criterion(5, "EALA Jacobi, invariance, dim D, H abelian", None, eala_checks),
        criterion(6, "graded dimensions in Setup B, w=2", None, graded_dimensions),
        criterion(7, "rank one affine signatures, w=2", None, signatures),
        criterion(8, "centroid window oracle, w=2", secs(120), centroid),
        criterion(9, "bi-isomorphism decision on the n=3 catalog", secs(30), decision_procedure),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria lines passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

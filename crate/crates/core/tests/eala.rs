mod common;

use std::collections::BTreeMap;

use bctorus::eala::*;
use bctorus::lietorus::Window;
use bctorus::rational::{frac, int, Q};
use bctorus::unitary::Mat;
use common::sampler::Sampler;
use common::*;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn eala_a() -> Eala {
    Eala::new(&data(3, 1, "0", &[0])).unwrap()
}

fn eala_b() -> Eala {
    Eala::new(&data(3, 3, "l3 + l1l2", &[0, 1, 2])).unwrap()
}

fn q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| int(x)).collect()
}

fn jacobi_and_invariance(e: &Eala, sampler: &Sampler, seed: u64, count: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let (x, y, z) = (sampler.elem(&mut rng), sampler.elem(&mut rng), sampler.elem(&mut rng));
        let b = |a: &EalaElem, b: &EalaElem| e.bracket(a, b).unwrap();
        let jac = b(&x, &b(&y, &z)).add(&b(&y, &b(&z, &x))).add(&b(&z, &b(&x, &y)));
        assert!(jac.is_zero(), "Jacobi fails: {x:?} {y:?} {z:?}");
        let inv = e.form(&b(&x, &y), &z).unwrap() + e.form(&y, &b(&x, &z)).unwrap();
        assert!(inv.is_zero(), "invariance fails");
        assert_eq!(e.form(&x, &y).unwrap(), e.form(&y, &x).unwrap());
    }
}

#[test]
fn jacobi_and_invariance_setup_b() {
    let e = eala_b();
    let sampler = Sampler::new(&e, 2, 4);
    jacobi_and_invariance(&e, &sampler, 7, 300);
}

#[test]
fn jacobi_and_invariance_setup_a() {
    let e = eala_a();
    let sampler = Sampler::new(&e, 4, 4);
    jacobi_and_invariance(&e, &sampler, 11, 300);
}

#[test]
fn jacobi_in_non_standard_coordinates() {
    let e = Eala::new(&data(3, 3, "l3 + l1l2", &[0, 1, 7])).unwrap();
    assert!(!e.original_basis().is_standard());
    let sampler = Sampler::new(&e, 2, 4);
    jacobi_and_invariance(&e, &sampler, 13, 100);
}

#[test]
fn derivations_are_skew_centroidal() {
    let e = eala_b();
    let u = e.unitary();
    let sampler = Sampler::new(&e, 2, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let d = sampler.d(&mut rng);
        let (t1, t2) = (sampler.s(&mut rng), sampler.s(&mut rng));
        let dt1 = e.d_act(&d, &t1).unwrap();
        let dt2 = e.d_act(&d, &t2).unwrap();
        assert!(u.in_s(&dt1));
        assert_eq!(e.d_act(&d, &u.mul(&t1, &t2)).unwrap(), u.mul(&dt1, &t2).add(&u.mul(&t1, &dt2)));
        assert!((u.trace_form(&dt1, &t2) + u.trace_form(&t1, &dt2)).is_zero());
    }
}

#[test]
fn cocycle_properties() {
    let e = eala_b();
    let u = e.unitary();
    let sampler = Sampler::new(&e, 2, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let (t1, t2, t3) = (sampler.s(&mut rng), sampler.s(&mut rng), sampler.s(&mut rng));
        let c12 = e.cocycle(&t1, &t2).unwrap();
        assert_eq!(c12.add(&e.cocycle(&t2, &t1).unwrap()), DualElem::zero());
        let cyc = e
            .cocycle(&u.bracket(&t1, &t2), &t3)
            .unwrap()
            .add(&e.cocycle(&u.bracket(&t2, &t3), &t1).unwrap())
            .add(&e.cocycle(&u.bracket(&t3, &t1), &t2).unwrap());
        assert!(cyc.is_zero());
        // ς(T₁,T₂)(d) = (dT₁ | T₂) on every D basis element of the right degree.
        for (sigma, v) in &c12.terms {
            let minus: Vec<i64> = sigma.iter().map(|x| -x).collect();
            for r in e.der_basis(&minus) {
                let d = e.der(&minus, &r).unwrap();
                let lhs = e.pair(&DualElem { terms: BTreeMap::from([(sigma.clone(), v.clone())]) }, &d);
                assert_eq!(lhs, u.trace_form(&e.d_act(&d, &t1).unwrap(), &t2));
            }
        }
    }
}

#[test]
fn cocycle_matches_closed_form_on_units() {
    for e in [eala_a(), eala_b()] {
        let u = e.unitary();
        let n = e.n();
        let l = e.l();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..400 {
            let (i, j) = (rng.gen_range(1..=l), rng.gen_range(1..=l));
            let (p, qq) = if rng.gen_bool(0.7) { (j, i) } else { (rng.gen_range(1..=l), rng.gen_range(1..=l)) };
            let sigma: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            let tau: Vec<i64> = if rng.gen_bool(0.6) {
                // Land in Γ_m often: σ + τ ∈ 2Λ.
                sigma.iter().map(|x| -x + 2 * rng.gen_range(-1i64..=1)).collect()
            } else {
                (0..n).map(|_| rng.gen_range(-2..=2)).collect()
            };
            let x = u.e(i, j, &t(&sigma)).unwrap();
            let y = u.e(p, qq, &t(&tau)).unwrap();
            assert_eq!(e.cocycle(&x, &y).unwrap(), e.cocycle_units(i, j, &sigma, p, qq, &tau));
        }
    }
}

#[test]
fn cocycle_examples() {
    let e = eala_a();
    let u = e.unitary();
    let c = e.cocycle(&u.e(1, 2, &t(&[1])).unwrap(), &u.e(2, 1, &t(&[-1])).unwrap()).unwrap();
    assert_eq!(c, e.dual(&[0], &q(&[1])).unwrap());
    assert!(e.cocycle(&u.e(1, 2, &t(&[1])).unwrap(), &u.e(3, 4, &t(&[0])).unwrap()).unwrap().is_zero());
    let e = eala_b();
    let u = e.unitary();
    // σ + τ = σ₃ is not in Γ_m.
    let c = e.cocycle(&u.e(1, 2, &t(&[0, 0, 1])).unwrap(), &u.e(2, 1, &t(&[0, 0, 0])).unwrap()).unwrap();
    assert!(c.is_zero());
}

#[test]
fn derivation_action_examples() {
    let e = eala_b();
    let u = e.unitary();
    let d = e.der(&[0, 0, 0], &q(&[1, 0, 0])).unwrap();
    let x = u.e(1, 8, &t(&[0, 0, 0])).unwrap();
    assert_eq!(e.d_act(&d, &x).unwrap(), x.neg());
    // Degree derivation scales by s·(τ + ½τᵢ − ½τⱼ)^#.
    let d = e.der(&[0, 0, 0], &q(&[1, 2, 3])).unwrap();
    let y = u.e(8, 9, &t(&[0, 0, 1])).unwrap();
    // ext = σ₃ + ½σ₁ − ½σ₂ ↦ (1, −1, 1).
    assert_eq!(e.d_act(&d, &y).unwrap(), y.scale(&int(1 - 2 + 3)));
    // Orthogonal s annihilates.
    let d = e.der(&[0, 0, 0], &q(&[1, 1, 0])).unwrap();
    assert!(e.d_act(&d, &y).unwrap().is_zero());
    // Constraint violations.
    assert!(e.der(&[2, 0, 0], &q(&[1, 0, 0])).is_err());
    assert!(e.der(&[1, 0, 0], &q(&[0, 1, 0])).is_err());
    assert!(e.der(&[2, 0, 0], &q(&[0, 1, 0])).is_ok());
}

#[test]
fn derivation_brackets() {
    let e = eala_b();
    let s = q(&[1, 2, 0]);
    let r = q(&[0, 1, 5]);
    let d0 = e.der(&[0, 0, 0], &s).unwrap();
    let rho = [2, 0, 0];
    let dr = e.der(&rho, &r).unwrap();
    // ρ^# = (4, 0, 0), ρ^#·s = 4.
    assert_eq!(e.d_bracket(&d0, &dr), dr.scale(&int(4)));
    assert!(e.d_bracket(&d0, &e.der(&[0, 0, 0], &r).unwrap()).is_zero());
    // Opposite degrees land in D⁰: r, s ⟂ ρ^# gives zero.
    let a = e.der(&rho, &q(&[0, 1, 0])).unwrap();
    let b = e.der(&[-2, 0, 0], &q(&[0, 0, 1])).unwrap();
    assert!(e.d_bracket(&a, &b).is_zero());
    let b = e.der(&[-2, 0, 2], &q(&[1, 0, 2])).unwrap();
    // σ^# = (−4, 0, 2): the result is −(ρ^#·s) t^{ρ+σ}∂_r.
    let expected = e.der(&[0, 0, 2], &q(&[0, -4, 0])).unwrap();
    assert_eq!(e.d_bracket(&a, &b), expected);
}

#[test]
fn dual_action_is_contragredient() {
    let e = eala_b();
    let sampler = Sampler::new(&e, 0, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let d = sampler.d(&mut rng);
        let c = sampler.c(&mut rng);
        let dc = e.c_act(&d, &c);
        for sigma in &sampler.degrees {
            for v in e.der_basis(sigma) {
                let x = e.der(sigma, &v).unwrap();
                assert_eq!(e.pair(&dc, &x), -e.pair(&c, &e.d_bracket(&d, &x)));
            }
        }
    }
    // ρ = 0 and σ = 0 special cases.
    let r = q(&[1, 0, 2]);
    let d0 = e.der(&[0, 0, 0], &r).unwrap();
    let c = e.dual(&[2, 0, 0], &q(&[0, 1, 0])).unwrap();
    assert_eq!(e.c_act(&d0, &c), c.scale(&int(4)));
    let dr = e.der(&[2, 0, 0], &q(&[0, 1, 0])).unwrap();
    let c0 = e.dual(&[0, 0, 0], &q(&[0, 3, 0])).unwrap();
    assert!(e.c_act(&dr, &c0).is_zero());
}

#[test]
fn form_examples() {
    let e = eala_b();
    let l = e.l();
    let c = EalaElem::from_c(l, e.dual(&[0, 0, 0], &q(&[1, 2, 3])).unwrap());
    let d = EalaElem::from_d(l, e.der(&[0, 0, 0], &q(&[1, 0, -1])).unwrap());
    assert_eq!(e.form(&c, &d).unwrap(), int(-2));
    let d2 = EalaElem::from_d(l, e.der(&[0, 0, 0], &q(&[5, 0, 1])).unwrap());
    assert!(e.form(&d, &d2).unwrap().is_zero());
    let s = EalaElem::from_s(e.unitary().h(1));
    assert!(e.form(&s, &d).unwrap().is_zero());
    assert_eq!(e.form(&s, &s).unwrap(), e.unitary().trace_form(&s.s, &s.s));
    // C pairs with nothing but D.
    let z = EalaElem::from_s(e.unitary().h(2));
    assert!(e.bracket(&c, &z).unwrap().is_zero());
    assert!(e.bracket(&c, &c).unwrap().is_zero());
    assert!(e.bracket(&EalaElem::zero(l), &EalaElem::zero(l + 1)).is_err());
}

#[test]
fn derivation_space_dimensions() {
    let e = eala_b();
    let n = e.n();
    assert_eq!(e.der_basis(&[0, 0, 0]).len(), n);
    assert_eq!(e.dual_basis(&[0, 0, 0]).len(), n);
    assert!(e.der_basis(&[1, 0, 0]).is_empty());
    for sigma in e.gamma_m_in(Window::new(8)) {
        if sigma.iter().all(|&x| x == 0) {
            continue;
        }
        let basis = e.der_basis(&sigma);
        assert_eq!(basis.len(), n - 1);
        let minus: Vec<i64> = sigma.iter().map(|x| -x).collect();
        assert_eq!(e.dual_basis(&sigma).len(), e.der_basis(&minus).len());
        let mut ech = bctorus::linalg::Echelon::new();
        for v in &basis {
            let sp: BTreeMap<usize, Q> = v.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            assert!(ech.insert(&sp));
            e.der(&sigma, v).unwrap();
        }
    }
    let a = eala_a();
    assert_eq!(a.der_basis(&[1]).len(), 0);
    assert_eq!(a.der_basis(&[0]).len(), 1);
}

#[test]
fn cartan_subalgebra_is_abelian() {
    for e in [eala_a(), eala_b()] {
        let doc = e.export(ExportScope::Cartan);
        let count = |s: Sector| doc.basis.iter().filter(|b| b.sector == s).count();
        assert_eq!(count(Sector::S), 3);
        assert_eq!(count(Sector::C), e.n());
        assert_eq!(count(Sector::D), e.n());
        assert!(doc.brackets.is_empty());
        // h ⊕ C⁰ ⊕ D⁰ pairs nondegenerately.
        assert!(!doc.form.is_empty());
    }
}

#[test]
fn export_round_trip() {
    let e = eala_a();
    let doc = e.export(ExportScope::Window(Window::new(1)));
    let json = doc.to_json();
    let back = StructureConstants::from_json(&json).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.to_json(), json);
    let text = serde_json::to_string(&json).unwrap();
    let reparsed = StructureConstants::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(reparsed, doc);
}

#[test]
fn export_dimensions() {
    let e = eala_b();
    let dims = e.graded_dimensions(Window::new(2));
    let e1 = vec![1, 0, 0];
    let short: Vec<&GradedDim> = dims.iter().filter(|d| d.sector == Sector::S && d.root == e1).collect();
    assert!(short.iter().all(|d| d.dim == 1));
    assert!(dims.iter().any(|d| d.sector == Sector::D && d.dim == 3));
}

// Dense Laurent-polynomial matrices for an independent so₇ ⊗ F[t^{±1}] check.
type Laurent = BTreeMap<i64, Q>;
type Dense = Vec<Vec<Laurent>>;

fn dense(m: &Mat, l: usize) -> Dense {
    let mut out = vec![vec![Laurent::new(); l]; l];
    for ((i, j), a) in m.entries() {
        for (e, c) in a.terms() {
            *out[i - 1][j - 1].entry(e[0]).or_insert_with(Q::zero) += c;
        }
    }
    out
}

fn clean(m: &mut Dense) {
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            x.retain(|_, c| !c.is_zero());
        }
    }
}

fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let l = a.len();
    let mut out = vec![vec![Laurent::new(); l]; l];
    for i in 0..l {
        for k in 0..l {
            for j in 0..l {
                for (ea, ca) in &a[i][k] {
                    for (eb, cb) in &b[k][j] {
                        *out[i][j].entry(ea + eb).or_insert_with(Q::zero) += ca * cb;
                    }
                }
            }
        }
    }
    clean(&mut out);
    out
}

fn dense_lin(a: &Dense, ca: &Q, b: &Dense, cb: &Q) -> Dense {
    let l = a.len();
    let mut out = vec![vec![Laurent::new(); l]; l];
    for i in 0..l {
        for j in 0..l {
            for (e, c) in &a[i][j] {
                *out[i][j].entry(*e).or_insert_with(Q::zero) += c * ca;
            }
            for (e, c) in &b[i][j] {
                *out[i][j].entry(*e).or_insert_with(Q::zero) += c * cb;
            }
        }
    }
    clean(&mut out);
    out
}

fn transpose(a: &Dense) -> Dense {
    let l = a.len();
    (0..l).map(|i| (0..l).map(|j| a[j][i].clone()).collect()).collect()
}

#[test]
fn setup_a_matches_loop_so7() {
    let e = eala_a();
    let l = 7;
    // Gram matrix: antidiagonal ones on the hyperbolic block, 1 on the last index.
    let mut g: Dense = vec![vec![Laurent::new(); l]; l];
    for i in 0..6 {
        g[i][5 - i].insert(0, Q::one());
    }
    g[6][6].insert(0, Q::one());
    let zero: Dense = vec![vec![Laurent::new(); l]; l];

    let doc = e.export(ExportScope::Window(Window::new(2)));
    let s_ids: Vec<usize> = doc.basis.iter().filter(|b| b.sector == Sector::S).map(|b| b.id).collect();
    assert_eq!(doc.basis.iter().filter(|b| b.sector == Sector::S && b.ext == [0]).count(), 21);
    let mats: BTreeMap<usize, Dense> =
        s_ids.iter().map(|&id| (id, dense(doc.basis[id].matrix.as_ref().unwrap(), l))).collect();
    for x in mats.values() {
        // x^t G + G x = 0.
        assert_eq!(dense_lin(&dense_mul(&transpose(x), &g), &Q::one(), &dense_mul(&g, x), &Q::one()), zero);
    }
    let c0 = doc.basis.iter().find(|b| b.sector == Sector::C && b.ext == [0]).unwrap().id;
    let mut checked = 0;
    for &a in &s_ids {
        for &b in &s_ids {
            let (x, y) = (&mats[&a], &mats[&b]);
            let ext = doc.basis[a].ext[0] + doc.basis[b].ext[0];
            if ext.abs() > 2 {
                continue;
            }
            let comm = dense_lin(&dense_mul(x, y), &Q::one(), &dense_mul(y, x), &-Q::one());
            let listed = doc.bracket_of(a, b);
            let mut rebuilt = zero.clone();
            for (id, c) in &listed {
                if doc.basis[*id].sector == Sector::S {
                    rebuilt = dense_lin(&rebuilt, &Q::one(), &mats[id], c);
                }
            }
            assert_eq!(rebuilt, comm, "bracket of {a} and {b}");
            // Affine cocycle: loop degree of x times tr(xy) at t⁰.
            let deg_x = frac(doc.basis[a].ext[0], 2);
            let xy = dense_mul(x, y);
            let tr: Q = (0..l).map(|i| xy[i][i].get(&0).cloned().unwrap_or_else(Q::zero)).sum();
            let expected = if ext == 0 { deg_x * tr } else { Q::zero() };
            assert_eq!(listed.get(&c0).cloned().unwrap_or_else(Q::zero), expected);
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

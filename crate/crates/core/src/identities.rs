//! Seeded random checks of the bracket identities for the operators
//! `U(x, y)`, the trace congruence and the splitting `A = Z(A) ⊕ [A, A]`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::hermitian::XVec;
use crate::rational::{self, Q};
use crate::torus::{lattice_mask, lattice_unit, Lattice, TorusElem};
use crate::unitary::{Mat, Unitary};

pub const DEFAULT_SEED: u64 = 0x5eed_b0c5;
pub const DEFAULT_COUNT: usize = 1000;
pub const DEFAULT_BOUND: i64 = 2;

/// Sampling parameters. Exponent coordinates are drawn from `[-bound, bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    pub bound: i64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, count: DEFAULT_COUNT, bound: DEFAULT_BOUND }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub results: Vec<IdentityResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.failures == 0 && r.instances > 0)
    }
}

struct Sampler<'a> {
    u: &'a Unitary,
    rng: ChaCha8Rng,
    bound: i64,
}

impl Sampler<'_> {
    fn exp(&mut self) -> Lattice {
        (0..self.u.n()).map(|_| self.rng.gen_range(-self.bound..=self.bound)).collect()
    }

    fn coef(&mut self) -> Q {
        let num = *[-3i64, -2, -1, 1, 2, 3].choose(&mut self.rng).expect("nonempty");
        let den = self.rng.gen_range(1i64..=2);
        rational::frac(num, den)
    }

    fn monomial(&mut self) -> TorusElem {
        let e = self.exp();
        TorusElem::monomial(e, self.coef())
    }

    fn hyperbolic(&mut self) -> usize {
        self.rng.gen_range(1..=2 * self.u.r())
    }

    fn anisotropic_vec(&mut self) -> XVec {
        let range: Vec<usize> = self.u.data().anisotropic().collect();
        let terms = self.rng.gen_range(1..=2);
        let mut v = XVec::default();
        for _ in 0..terms {
            let k = *range.choose(&mut self.rng).expect("anisotropic part is nonempty");
            let a = self.monomial();
            let slot = v.coords.entry(k).or_default();
            slot.add_assign_ref(&a);
        }
        v.coords.retain(|_, a| !a.is_zero());
        v
    }

    fn matrix(&mut self) -> Mat {
        let l = self.u.l();
        let mut m = Mat::zero(l);
        for _ in 0..self.rng.gen_range(1..=4) {
            let (i, j) = (self.rng.gen_range(1..=l), self.rng.gen_range(1..=l));
            let a = self.monomial();
            m.add_entry(i, j, &a);
        }
        m
    }
}

struct Tally {
    result: IdentityResult,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self { result: IdentityResult { name: name.into(), instances: 0, failures: 0, first_failure: None } }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.result.instances += 1;
        if !ok {
            self.result.failures += 1;
            if self.result.first_failure.is_none() {
                self.result.first_failure = Some(describe());
            }
        }
    }
}

/// Runs every identity `config.count` times on random monomial data.
pub fn run_suite(u: &Unitary, config: SuiteConfig) -> SuiteReport {
    let mut s = Sampler { u, rng: ChaCha8Rng::seed_from_u64(config.seed), bound: config.bound };
    let data = u.data();
    let a = data.torus();
    let x = |i: usize, alpha: TorusElem| XVec::basis(i, alpha);
    let uv = |v: &XVec, w: &XVec| u.u_vec(v, w).expect("indices are valid");
    let r = u.r();
    let mut results = Vec::new();

    let mut t = Tally::new("U skew symmetry");
    for _ in 0..config.count {
        let (i, j) = (s.rng.gen_range(1..=u.l()), s.rng.gen_range(1..=u.l()));
        let alpha = s.monomial();
        let lhs = uv(&x(i, alpha.clone()), &x(j, a.one()));
        let rhs = uv(&x(j, a.involute(&alpha)), &x(i, a.one())).neg();
        t.record(lhs == rhs, || format!("i={i} j={j} alpha={alpha}"));
    }
    results.push(t.result);

    let mut t = Tally::new("U hyperbolic composition");
    let mut done = 0;
    while done < config.count {
        let (i, j, k) = (s.hyperbolic(), s.hyperbolic(), s.hyperbolic());
        // With j = i the left side is U(xᵢ.(α − ᾱ)β, x_k), so i ≠ j is needed too.
        if k == data.bar(i) || k == data.bar(j) || i == j {
            continue;
        }
        done += 1;
        let (alpha, beta) = (s.monomial(), s.monomial());
        let lhs = u.bracket(&uv(&x(i, alpha.clone()), &x(j, a.one())), &uv(&x(data.bar(j), beta.clone()), &x(k, a.one())));
        let rhs = uv(&x(i, a.mul(&alpha, &beta)), &x(k, a.one()));
        t.record(lhs == rhs, || format!("i={i} j={j} k={k} alpha={alpha} beta={beta}"));
    }
    results.push(t.result);

    let mut t = Tally::new("U anisotropic action");
    let mut done = 0;
    while done < config.count {
        let (i, j) = (s.hyperbolic(), s.hyperbolic());
        if i == j {
            continue;
        }
        done += 1;
        let alpha = s.monomial();
        let v = s.anisotropic_vec();
        let lhs = u.bracket(&uv(&x(i, alpha.clone()), &x(j, a.one())), &uv(&v, &x(data.bar(i), a.one())));
        let rhs = uv(&v.act(a, &alpha), &x(j, a.one())).neg();
        t.record(lhs == rhs, || format!("i={i} j={j} alpha={alpha} v={:?}", v.coords));
    }
    results.push(t.result);

    let mut t = Tally::new("U anisotropic pair");
    let mut done = 0;
    while done < config.count {
        let (i, j) = (s.hyperbolic(), s.hyperbolic());
        if j == data.bar(i) {
            continue;
        }
        done += 1;
        let (v, w) = (s.anisotropic_vec(), s.anisotropic_vec());
        let lhs = u.bracket(&uv(&v, &x(i, a.one())), &uv(&w, &x(j, a.one())));
        let rhs = uv(&x(i, data.xi_vec(&v, &w)), &x(j, a.one())).neg();
        t.record(lhs == rhs, || format!("i={i} j={j} v={:?} w={:?}", v.coords, w.coords));
    }
    results.push(t.result);

    let mut t = Tally::new("coroot h_i");
    let v0 = 2 * r + 1;
    for _ in 0..config.count {
        let i = s.rng.gen_range(1..=r);
        let lhs = u.bracket(&uv(&x(i, a.one()), &x(v0, a.one())), &uv(&x(v0, a.one()), &x(data.bar(i), a.one())));
        t.record(lhs == u.h(i), || format!("i={i}"));
    }
    results.push(t.result);

    let mut t = Tally::new("trace congruence");
    for _ in 0..config.count {
        let (t1, t2) = (s.matrix(), s.matrix());
        let diff = &u.trace(&u.mul(&t1, &t2)) - &u.trace(&u.mul(&t2, &t1));
        t.record(a.center_project(&diff).is_zero(), || format!("T1={t1} T2={t2}"));
    }
    results.push(t.result);

    // A = Z(A) ⊕ [A, A] on each graded component: t^σ is central, or
    // t^σ = ½[t^σ tⱼ⁻¹, tⱼ] for any j with κ_p(σ̃, σ̃ⱼ) = 1.
    let mut t = Tally::new("centre-commutator split");
    for _ in 0..config.count {
        let sigma = s.exp();
        let c = s.coef();
        let m = TorusElem::monomial(sigma.clone(), c);
        let mask = lattice_mask(&sigma);
        let partner = (0..u.n()).find(|&j| a.kappa().polar_at(mask, 1 << j) == 1);
        let ok = match partner {
            None => a.is_central(&m) && a.commutator_part(&m).is_zero() && a.center_project(&m) == m,
            Some(j) => {
                let tj = TorusElem::t(&lattice_unit(u.n(), j));
                let tj_inv = a.inverse(&tj).expect("monomials are invertible");
                let half = a.commutator(&a.mul(&m, &tj_inv), &tj).scale(&rational::frac(1, 2));
                !a.is_central(&m) && half == m && a.center_project(&m).is_zero()
            }
        };
        t.record(ok, || format!("sigma={sigma:?}"));
    }
    results.push(t.result);

    SuiteReport { config, results }
}

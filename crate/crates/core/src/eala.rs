//! The maximal extended affine Lie algebra `E = S ⊕ C ⊕ D` built on the
//! centreless Lie torus `S`: skew-centroidal derivations `D`, their graded
//! dual `C`, the 2-cocycle, the bracket, the invariant form and a
//! structure-constant export over a window.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::bitquad::{echelon_basis, BitMatrix};
use crate::error::{Error, Result};
use crate::hermitian::{HalfDeg, HermitianData};
use crate::lietorus::{Slice, Window};
use crate::linalg::{Echelon, SparseVec};
use crate::rational::{self, Q};
use crate::torus::{lattice_add, lattice_mask, lattice_neg, lattice_zero, mask_lift, Lattice, Torus, TorusElem};
use crate::unitary::{Mat, MatKey, Unitary};

/// A basis `σ'₁…σ'ₙ` of `Λ` such that `σ'₁…σ'_{n₁}, 2σ'_{n₁+1}…2σ'ₙ` is a
/// basis of `⟨M⟩`, and the matching basis `λ` of `Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedBasis {
    pub n1: usize,
    /// Columns are the `σ'ₖ` in standard coordinates.
    pub change: Vec<Vec<i64>>,
    pub lambda_basis: Vec<HalfDeg>,
    inverse: Vec<Vec<Q>>,
}

/// Reduced echelon basis of `span M̃` lifted to `{0,1}` vectors, completed by
/// the standard vectors at non-pivot positions.
pub fn adapt_basis(data: &HermitianData) -> AdaptedBasis {
    let n = data.n();
    let span = echelon_basis(data.subset());
    let pivots: Vec<u32> = span.iter().map(|b| b.trailing_zeros()).collect();
    let mut columns: Vec<Lattice> = span.iter().map(|&b| mask_lift(n, b)).collect();
    for q in 0..n as u32 {
        if !pivots.contains(&q) {
            columns.push(mask_lift(n, 1 << q));
        }
    }
    let n1 = span.len();
    let change: Vec<Vec<i64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let lambda_basis = columns
        .iter()
        .enumerate()
        .map(|(k, c)| if k < n1 { HalfDeg::half_of(c) } else { HalfDeg::of_lattice(c) })
        .collect();
    AdaptedBasis { n1, inverse: invert(&change), change, lambda_basis }
}

fn invert(m: &[Vec<i64>]) -> Vec<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Q> = row.iter().map(|&x| rational::int(x)).collect();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero()).expect("change of basis is invertible");
        a.swap(col, p);
        let inv = a[col][col].recip();
        a[col].iter_mut().for_each(|x| *x *= &inv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

impl AdaptedBasis {
    pub fn n(&self) -> usize {
        self.change.len()
    }

    pub fn is_standard(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.change[i][j] == i64::from(i == j)))
    }

    /// Coordinates of `d` in the `λ` basis.
    pub fn sharp(&self, d: &HalfDeg) -> Vec<Q> {
        let doubled = d.doubled();
        (0..self.n())
            .map(|k| {
                let y: Q = self.inverse[k].iter().zip(doubled).map(|(c, &x)| c * rational::int(x)).sum();
                if k < self.n1 {
                    y
                } else {
                    y / rational::int(2)
                }
            })
            .collect()
    }

    pub fn sharp_lattice(&self, sigma: &[i64]) -> Vec<Q> {
        self.sharp(&HalfDeg::of_lattice(sigma))
    }

    /// The change matrix reduced mod 2.
    pub fn change_mod2(&self) -> BitMatrix {
        let columns: Vec<u32> = (0..self.n()).map(|k| lattice_mask(&self.change.iter().map(|r| r[k]).collect::<Vec<_>>())).collect();
        BitMatrix::from_columns(&columns).expect("change of basis has at most 5 columns")
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn add_scaled(acc: &mut [Q], c: &Q, v: &[Q]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += c * x;
    }
}

/// `Σ t^σ ∂_{s_σ}` over `σ ∈ Γ_m`, with `σ^#·s_σ = 0` for `σ ≠ 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerElem {
    pub terms: BTreeMap<Lattice, Vec<Q>>,
}

impl DerElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, sigma: Lattice, s: &[Q], c: &Q) {
        if c.is_zero() || is_zero_vec(s) {
            return;
        }
        let n = s.len();
        let slot = self.terms.entry(sigma.clone()).or_insert_with(|| vec![Q::zero(); n]);
        add_scaled(slot, c, s);
        if is_zero_vec(slot) {
            self.terms.remove(&sigma);
        }
    }

    pub fn add(&self, other: &DerElem) -> DerElem {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v, &Q::one());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> DerElem {
        let mut out = DerElem::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v, c);
        }
        out
    }
}

/// `Σ c_σ(s_σ)` with `s_σ` taken modulo `Q·σ^#`; the stored representative
/// is orthogonal to `σ^#`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualElem {
    pub terms: BTreeMap<Lattice, Vec<Q>>,
}

impl DualElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &DualElem) -> DualElem {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let n = v.len();
            let slot = out.terms.entry(k.clone()).or_insert_with(|| vec![Q::zero(); n]);
            add_scaled(slot, &Q::one(), v);
            if is_zero_vec(slot) {
                out.terms.remove(k);
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> DualElem {
        if c.is_zero() {
            return DualElem::zero();
        }
        DualElem { terms: self.terms.iter().map(|(k, v)| (k.clone(), v.iter().map(|x| x * c).collect())).collect() }
    }
}

/// An element `T + c + d` of `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EalaElem {
    pub s: Mat,
    pub c: DualElem,
    pub d: DerElem,
}

impl EalaElem {
    pub fn zero(l: usize) -> Self {
        Self { s: Mat::zero(l), c: DualElem::zero(), d: DerElem::zero() }
    }

    pub fn from_s(s: Mat) -> Self {
        Self { c: DualElem::zero(), d: DerElem::zero(), s }
    }

    pub fn from_c(l: usize, c: DualElem) -> Self {
        Self { s: Mat::zero(l), c, d: DerElem::zero() }
    }

    pub fn from_d(l: usize, d: DerElem) -> Self {
        Self { s: Mat::zero(l), c: DualElem::zero(), d }
    }

    pub fn is_zero(&self) -> bool {
        self.s.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn add(&self, other: &EalaElem) -> EalaElem {
        EalaElem { s: self.s.add(&other.s), c: self.c.add(&other.c), d: self.d.add(&other.d) }
    }

    pub fn sub(&self, other: &EalaElem) -> EalaElem {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> EalaElem {
        EalaElem { s: self.s.scale(c), c: self.c.scale(c), d: self.d.scale(c) }
    }
}

/// The maximal EALA over the data, in adapted coordinates.
#[derive(Clone, Debug)]
pub struct Eala {
    u: Unitary,
    basis: AdaptedBasis,
    original: AdaptedBasis,
}

impl Eala {
    /// Moves the data to adapted coordinates when needed and rebuilds it with
    /// the deterministic parameters and the compatible bilinear form that
    /// vanishes on the radical.
    pub fn new(data: &HermitianData) -> Result<Self> {
        let original = adapt_basis(data);
        let g = original.change_mod2();
        let kappa = data.torus().kappa().pullback(&g);
        let inv = g.inverse().expect("change of basis is invertible mod 2");
        let subset = inv.image_of_set(data.subset());
        let working = HermitianData::build(data.r(), Torus::from_form(kappa), &subset)?;
        let basis = adapt_basis(&working);
        debug_assert!(basis.is_standard());
        Ok(Self { u: Unitary::new(working), basis, original })
    }

    pub fn unitary(&self) -> &Unitary {
        &self.u
    }

    pub fn data(&self) -> &HermitianData {
        self.u.data()
    }

    /// The adapted basis of the working coordinates.
    pub fn adapted(&self) -> &AdaptedBasis {
        &self.basis
    }

    /// The adapted basis of the input data.
    pub fn original_basis(&self) -> &AdaptedBasis {
        &self.original
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    pub fn l(&self) -> usize {
        self.u.l()
    }

    fn torus(&self) -> &Torus {
        self.u.data().torus()
    }

    pub fn sharp(&self, d: &HalfDeg) -> Vec<Q> {
        self.basis.sharp(d)
    }

    pub fn in_gamma_m(&self, sigma: &[i64]) -> bool {
        sigma.len() == self.n() && self.torus().in_gamma_m(sigma)
    }

    /// `t^σ ∂_s`, checking `σ ∈ Γ_m` and `σ^#·s = 0`.
    pub fn der(&self, sigma: &[i64], s: &[Q]) -> Result<DerElem> {
        self.check_vec(s)?;
        if !self.in_gamma_m(sigma) {
            return Err(Error::DerivationConstraint(format!("{sigma:?} is not in the central symmetric support")));
        }
        let sh = self.basis.sharp_lattice(sigma);
        if !dot(&sh, s).is_zero() {
            return Err(Error::DerivationConstraint(format!("{sigma:?}^# · s ≠ 0")));
        }
        let mut out = DerElem::zero();
        out.add_term(Lattice::from_slice(sigma), s, &Q::one());
        Ok(out)
    }

    /// `c_σ(s)`.
    pub fn dual(&self, sigma: &[i64], s: &[Q]) -> Result<DualElem> {
        self.check_vec(s)?;
        if !self.in_gamma_m(sigma) {
            return Err(Error::DerivationConstraint(format!("{sigma:?} is not in the central symmetric support")));
        }
        let mut terms = BTreeMap::new();
        let v = self.canonical(sigma, s);
        if !is_zero_vec(&v) {
            terms.insert(Lattice::from_slice(sigma), v);
        }
        Ok(DualElem { terms })
    }

    fn check_vec(&self, s: &[Q]) -> Result<()> {
        if s.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: s.len() });
        }
        Ok(())
    }

    /// Removes the `σ^#` component of `s`.
    fn canonical(&self, sigma: &[i64], s: &[Q]) -> Vec<Q> {
        let sh = self.basis.sharp_lattice(sigma);
        let norm = dot(&sh, &sh);
        if norm.is_zero() {
            return s.to_vec();
        }
        let f = dot(&sh, s) / norm;
        s.iter().zip(&sh).map(|(x, y)| x - &f * y).collect()
    }

    fn dual_add(&self, out: &mut DualElem, sigma: Lattice, s: &[Q]) {
        let v = self.canonical(&sigma, s);
        if is_zero_vec(&v) {
            return;
        }
        *out = out.add(&DualElem { terms: BTreeMap::from([(sigma, v)]) });
    }

    /// Basis of `D^σ`: all of `Qⁿ` for `σ = 0`, otherwise
    /// `σ^#_p eⱼ − σ^#ⱼ e_p` for `j ≠ p`, `p` the first nonzero coordinate.
    pub fn der_basis(&self, sigma: &[i64]) -> Vec<Vec<Q>> {
        let n = self.n();
        if !self.in_gamma_m(sigma) {
            return Vec::new();
        }
        let unit = |k: usize| -> Vec<Q> { (0..n).map(|i| if i == k { Q::one() } else { Q::zero() }).collect() };
        let sh = self.basis.sharp_lattice(sigma);
        let Some(p) = sh.iter().position(|x| !x.is_zero()) else {
            return (0..n).map(unit).collect();
        };
        (0..n)
            .filter(|&j| j != p)
            .map(|j| {
                let mut v = vec![Q::zero(); n];
                v[j] = sh[p].clone();
                v[p] = -sh[j].clone();
                v
            })
            .collect()
    }

    /// Basis of `C^σ`, dual to `D^{−σ}` under the pairing.
    pub fn dual_basis(&self, sigma: &[i64]) -> Vec<Vec<Q>> {
        self.der_basis(&lattice_neg(sigma)).into_iter().map(|v| self.canonical(sigma, &v)).collect()
    }

    /// `(t^σ ∂_s)(e_ij(t^τ)) = s·(τ + ½τᵢ − ½τⱼ)^# e_ij(t^σ t^τ)`.
    pub fn d_act(&self, d: &DerElem, t: &Mat) -> Result<Mat> {
        if t.l() != self.l() {
            return Err(Error::DataMismatch);
        }
        let a = self.torus();
        let mut out = self.u.zero();
        for (sigma, s) in &d.terms {
            let z = TorusElem::t(sigma);
            for ((i, j), alpha) in t.entries() {
                for (tau, c) in alpha.terms() {
                    let ext = self.u.bidegree(*i, *j, tau).ext;
                    let k = dot(s, &self.sharp(&ext));
                    if k.is_zero() {
                        continue;
                    }
                    out.add_entry(*i, *j, &a.mul(&z, &TorusElem::monomial(tau.clone(), c * &k)));
                }
            }
        }
        Ok(out)
    }

    /// `[t^σ∂_s, t^ρ∂_r] = t^{σ+ρ}((ρ^#·s)∂_r − (σ^#·r)∂_s)`.
    pub fn d_bracket(&self, d1: &DerElem, d2: &DerElem) -> DerElem {
        let mut out = DerElem::zero();
        for (sigma, s) in &d1.terms {
            let ss = self.basis.sharp_lattice(sigma);
            for (rho, r) in &d2.terms {
                let rs = self.basis.sharp_lattice(rho);
                let sum = lattice_add(sigma, rho);
                out.add_term(sum.clone(), r, &dot(&rs, s));
                out.add_term(sum, s, &-dot(&ss, r));
            }
        }
        out
    }

    /// `(t^ρ∂_r) ∗ c_σ(s) = c_{σ+ρ}((σ^#·r)s + (s·r)ρ^#)`.
    pub fn c_act(&self, d: &DerElem, c: &DualElem) -> DualElem {
        let mut out = DualElem::zero();
        for (rho, r) in &d.terms {
            let rs = self.basis.sharp_lattice(rho);
            for (sigma, s) in &c.terms {
                let ss = self.basis.sharp_lattice(sigma);
                let mut v: Vec<Q> = s.iter().map(|x| x * dot(&ss, r)).collect();
                add_scaled(&mut v, &dot(s, r), &rs);
                self.dual_add(&mut out, lattice_add(sigma, rho), &v);
            }
        }
        out
    }

    /// `c(d) = Σ_σ s_σ · r_{−σ}`.
    pub fn pair(&self, c: &DualElem, d: &DerElem) -> Q {
        c.terms
            .iter()
            .filter_map(|(sigma, s)| d.terms.get(&lattice_neg(sigma)).map(|r| dot(s, r)))
            .sum()
    }

    /// `ς(T₁, T₂)(d) = (dT₁ | T₂)`, evaluated on the monomial terms directly.
    pub fn cocycle(&self, t1: &Mat, t2: &Mat) -> Result<DualElem> {
        if t1.l() != self.l() || t2.l() != self.l() {
            return Err(Error::DataMismatch);
        }
        let a = self.torus();
        let n = self.n();
        let mut acc: BTreeMap<Lattice, Vec<Q>> = BTreeMap::new();
        for ((i, j), x) in t1.entries() {
            let Some(y) = t2.get(*j, *i) else { continue };
            for (ex, cx) in x.terms() {
                let sh = self.sharp(&self.u.bidegree(*i, *j, ex).ext);
                for (ey, cy) in y.terms() {
                    let rho = lattice_add(ex, ey);
                    if !a.in_gamma_m(&rho) {
                        continue;
                    }
                    // t^{−ρ} t^{ex} t^{ey} = ± 1.
                    let (neg1, rest) = a.monomial_product(&lattice_neg(&rho), ex);
                    let (neg2, _) = a.monomial_product(&rest, ey);
                    let mut coef = cx * cy;
                    if neg1 != neg2 {
                        coef = -coef;
                    }
                    add_scaled(acc.entry(rho).or_insert_with(|| vec![Q::zero(); n]), &coef, &sh);
                }
            }
        }
        let mut out = DualElem::zero();
        for (rho, v) in acc {
            self.dual_add(&mut out, rho, &v);
        }
        Ok(out)
    }

    /// `ς(e_ij(t^σ), e_pq(t^τ))`: zero unless `i = q`, `j = p` and
    /// `σ + τ ∈ Γ_m`, in which case it is
    /// `(−1)^{κ_b(τ̃,τ̃)} c_{σ+τ}((σ + ½τᵢ − ½τⱼ)^#)`.
    pub fn cocycle_units(&self, i: usize, j: usize, sigma: &[i64], p: usize, q: usize, tau: &[i64]) -> DualElem {
        let mut out = DualElem::zero();
        let rho = lattice_add(sigma, tau);
        if i != q || j != p || !self.in_gamma_m(&rho) {
            return out;
        }
        let mask = lattice_mask(tau);
        let mut v = self.sharp(&self.u.bidegree(i, j, sigma).ext);
        if self.torus().kappa_b().at(mask, mask) == 1 {
            v.iter_mut().for_each(|x| *x = -x.clone());
        }
        self.dual_add(&mut out, rho, &v);
        out
    }

    fn check_elem(&self, x: &EalaElem) -> Result<()> {
        let n = self.n();
        let ok = x.s.l() == self.l()
            && x.c.terms.iter().all(|(k, v)| k.len() == n && v.len() == n)
            && x.d.terms.iter().all(|(k, v)| k.len() == n && v.len() == n);
        if ok {
            Ok(())
        } else {
            Err(Error::DataMismatch)
        }
    }

    /// `([T₁,T₂] + d₁T₂ − d₂T₁) + (d₁∗c₂ − d₂∗c₁ + ς(T₁,T₂)) + [d₁,d₂]`.
    pub fn bracket(&self, x: &EalaElem, y: &EalaElem) -> Result<EalaElem> {
        self.check_elem(x)?;
        self.check_elem(y)?;
        let s = self.u.bracket(&x.s, &y.s).add(&self.d_act(&x.d, &y.s)?).sub(&self.d_act(&y.d, &x.s)?);
        let c = self
            .c_act(&x.d, &y.c)
            .add(&self.c_act(&y.d, &x.c).scale(&-Q::one()))
            .add(&self.cocycle(&x.s, &y.s)?);
        let d = self.d_bracket(&x.d, &y.d);
        Ok(EalaElem { s, c, d })
    }

    /// `(T₁|T₂) + c₁(d₂) + c₂(d₁)`.
    pub fn form(&self, x: &EalaElem, y: &EalaElem) -> Result<Q> {
        self.check_elem(x)?;
        self.check_elem(y)?;
        Ok(self.u.trace_form(&x.s, &y.s) + self.pair(&x.c, &y.d) + self.pair(&y.c, &x.d))
    }

    /// `Γ_m` intersected with a window.
    pub fn gamma_m_in(&self, window: Window) -> Vec<Lattice> {
        window
            .degrees(self.n())
            .into_iter()
            .filter_map(|d| d.to_lattice())
            .filter(|l| self.in_gamma_m(l))
            .collect()
    }

    /// Dimensions of the nonzero homogeneous spaces of `E` in the window.
    pub fn graded_dimensions(&self, window: Window) -> Vec<GradedDim> {
        let slice = Slice::build(&self.u, window);
        graded_dimensions_of(self, &slice, &self.gamma_m_in(window))
    }

    /// The structure constants of `E` on a windowed homogeneous basis.
    pub fn export(&self, scope: ExportScope) -> StructureConstants {
        let n = self.n();
        let zero_root = vec![0i64; self.u.r()];
        let (slice, degrees) = match scope {
            ExportScope::Window(w) => (Slice::build(&self.u, w), self.gamma_m_in(w)),
            ExportScope::Cartan => {
                let zero = HalfDeg::zero(n);
                let mut slice = Slice::build_for_roots(&self.u, Window::new(0), std::slice::from_ref(&zero_root));
                slice.cells.retain(|d, _| d.ext == zero);
                (slice, vec![lattice_zero(n)])
            }
        };
        let window = slice.window;
        let dimensions = graded_dimensions_of(self, &slice, &degrees);

        let mut basis = Vec::new();
        let mut elems = Vec::new();
        // Spans of each homogeneous space, keyed by sector and degree.
        let mut spans: BTreeMap<(Sector, Vec<i64>, Vec<i64>), (Echelon<MatKey>, Vec<usize>)> = BTreeMap::new();
        let mut dual_spans: BTreeMap<(Sector, Lattice), (Echelon<usize>, Vec<usize>)> = BTreeMap::new();
        for (deg, mats) in &slice.cells {
            let key = (Sector::S, deg.root.clone(), deg.ext.doubled().to_vec());
            let entry = spans.entry(key).or_insert_with(|| (Echelon::new(), Vec::new()));
            for m in mats {
                entry.0.insert(&m.to_sparse());
                entry.1.push(basis.len());
                elems.push(EalaElem::from_s(m.clone()));
                basis.push(BasisEntry {
                    id: basis.len(),
                    sector: Sector::S,
                    root: deg.root.clone(),
                    ext: deg.ext.doubled().to_vec(),
                    matrix: Some(m.clone()),
                    vector: None,
                });
            }
        }
        for sector in [Sector::C, Sector::D] {
            for sigma in &degrees {
                let vectors = match sector {
                    Sector::C => self.dual_basis(sigma),
                    _ => self.der_basis(sigma),
                };
                let entry = dual_spans.entry((sector, sigma.clone())).or_insert_with(|| (Echelon::new(), Vec::new()));
                for v in vectors {
                    entry.0.insert(&dense_to_sparse(&v));
                    entry.1.push(basis.len());
                    let mut terms = BTreeMap::new();
                    terms.insert(sigma.clone(), v.clone());
                    elems.push(match sector {
                        Sector::C => EalaElem::from_c(self.l(), DualElem { terms }),
                        _ => EalaElem::from_d(self.l(), DerElem { terms }),
                    });
                    basis.push(BasisEntry {
                        id: basis.len(),
                        sector,
                        root: zero_root.clone(),
                        ext: HalfDeg::of_lattice(sigma).doubled().to_vec(),
                        matrix: None,
                        vector: Some(v),
                    });
                }
            }
        }

        let express = |x: &EalaElem| -> Option<Vec<(usize, Q)>> {
            let mut out = Vec::new();
            for (deg, part) in self.u.decompose(&x.s) {
                let (ech, ids) = spans.get(&(Sector::S, deg.root.clone(), deg.ext.doubled().to_vec()))?;
                for (k, c) in ech.solve(&part.to_sparse())? {
                    out.push((ids[k], c));
                }
            }
            for (sector, terms) in [(Sector::C, &x.c.terms), (Sector::D, &x.d.terms)] {
                for (sigma, v) in terms {
                    let (ech, ids) = dual_spans.get(&(sector, sigma.clone()))?;
                    for (k, c) in ech.solve(&dense_to_sparse(v))? {
                        out.push((ids[k], c));
                    }
                }
            }
            out.sort_by_key(|(id, _)| *id);
            Some(out)
        };

        let exts: Vec<HalfDeg> = basis.iter().map(|b| HalfDeg::from_doubled(&b.ext)).collect();
        let mut brackets = Vec::new();
        let mut form = Vec::new();
        for a in 0..elems.len() {
            for b in a..elems.len() {
                let total = &exts[a] + &exts[b];
                if total.is_zero() {
                    let v = self.form(&elems[a], &elems[b]).expect("basis elements share the data");
                    if !v.is_zero() {
                        form.push(FormEntry { a, b, value: v });
                    }
                }
                if a == b || !window.contains(&total) {
                    continue;
                }
                let br = self.bracket(&elems[a], &elems[b]).expect("basis elements share the data");
                if br.is_zero() {
                    continue;
                }
                if let Some(terms) = express(&br) {
                    brackets.push(BracketEntry { a, b, terms });
                }
            }
        }
        StructureConstants { basis, brackets, form, dimensions }
    }
}

fn dense_to_sparse(v: &[Q]) -> SparseVec<usize> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

fn graded_dimensions_of(e: &Eala, slice: &Slice, degrees: &[Lattice]) -> Vec<GradedDim> {
    let mut out: Vec<GradedDim> = slice
        .cells
        .iter()
        .map(|(d, b)| GradedDim { sector: Sector::S, root: d.root.clone(), ext: d.ext.doubled().to_vec(), dim: b.len() })
        .collect();
    let zero_root = vec![0i64; e.u.r()];
    for sigma in degrees {
        let ext = HalfDeg::of_lattice(sigma).doubled().to_vec();
        out.push(GradedDim { sector: Sector::C, root: zero_root.clone(), ext: ext.clone(), dim: e.dual_basis(sigma).len() });
        out.push(GradedDim { sector: Sector::D, root: zero_root.clone(), ext, dim: e.der_basis(sigma).len() });
    }
    out
}

/// What to export: a window, or only the Cartan part `h ⊕ C⁰ ⊕ D⁰`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportScope {
    Window(Window),
    Cartan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    S,
    C,
    D,
}

impl Sector {
    pub fn as_str(self) -> &'static str {
        match self {
            Sector::S => "S",
            Sector::C => "C",
            Sector::D => "D",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "S" => Ok(Sector::S),
            "C" => Ok(Sector::C),
            "D" => Ok(Sector::D),
            other => Err(Error::Parse(format!("unknown sector {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDim {
    pub sector: Sector,
    pub root: Vec<i64>,
    /// Doubled coordinates.
    pub ext: Vec<i64>,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisEntry {
    pub id: usize,
    pub sector: Sector,
    pub root: Vec<i64>,
    /// Doubled coordinates.
    pub ext: Vec<i64>,
    pub matrix: Option<Mat>,
    pub vector: Option<Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketEntry {
    pub a: usize,
    pub b: usize,
    pub terms: Vec<(usize, Q)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormEntry {
    pub a: usize,
    pub b: usize,
    pub value: Q,
}

/// Brackets are listed for `a < b` whose degree sum stays in the window;
/// form values for `a ≤ b`. Zero entries are omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    pub basis: Vec<BasisEntry>,
    pub brackets: Vec<BracketEntry>,
    pub form: Vec<FormEntry>,
    pub dimensions: Vec<GradedDim>,
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn int_list(v: &Value) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an integer list".into()))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| Error::Parse("expected an integer".into())))
        .collect()
}

fn index(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("{key:?} must be an index")))
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?.as_array().ok_or_else(|| Error::Parse(format!("{key:?} must be an array")))
}

impl StructureConstants {
    pub fn to_json(&self) -> Value {
        let basis: Vec<Value> = self
            .basis
            .iter()
            .map(|b| {
                let mut v = json!({"id": b.id, "sector": b.sector.as_str(), "root": b.root, "ext": b.ext});
                if let Some(m) = &b.matrix {
                    v["matrix"] = m.to_json();
                }
                if let Some(s) = &b.vector {
                    v["vector"] = Value::Array(s.iter().map(rational::to_json).collect());
                }
                v
            })
            .collect();
        let brackets: Vec<Value> = self
            .brackets
            .iter()
            .map(|e| {
                json!({
                    "a": e.a,
                    "b": e.b,
                    "terms": e.terms.iter().map(|(c, q)| json!({"c": c, "coef": rational::to_json(q)})).collect::<Vec<_>>(),
                })
            })
            .collect();
        let form: Vec<Value> =
            self.form.iter().map(|e| json!({"a": e.a, "b": e.b, "value": rational::to_json(&e.value)})).collect();
        let dimensions: Vec<Value> = self
            .dimensions
            .iter()
            .map(|d| json!({"sector": d.sector.as_str(), "root": d.root, "ext": d.ext, "dim": d.dim}))
            .collect();
        json!({"basis": basis, "brackets": brackets, "form": form, "dimensions": dimensions})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let mut basis = Vec::new();
        for b in array(v, "basis")? {
            let sector = Sector::parse(field(b, "sector")?.as_str().unwrap_or_default())?;
            let matrix = b.get("matrix").map(Mat::from_json).transpose()?;
            let vector = b
                .get("vector")
                .map(|s| {
                    s.as_array()
                        .ok_or_else(|| Error::Parse("vector must be an array".into()))?
                        .iter()
                        .map(rational::from_json)
                        .collect::<Result<Vec<Q>>>()
                })
                .transpose()?;
            basis.push(BasisEntry {
                id: index(b, "id")?,
                sector,
                root: int_list(field(b, "root")?)?,
                ext: int_list(field(b, "ext")?)?,
                matrix,
                vector,
            });
        }
        let mut brackets = Vec::new();
        for e in array(v, "brackets")? {
            let terms = array(e, "terms")?
                .iter()
                .map(|t| Ok((index(t, "c")?, rational::from_json(field(t, "coef")?)?)))
                .collect::<Result<Vec<_>>>()?;
            brackets.push(BracketEntry { a: index(e, "a")?, b: index(e, "b")?, terms });
        }
        let form = array(v, "form")?
            .iter()
            .map(|e| Ok(FormEntry { a: index(e, "a")?, b: index(e, "b")?, value: rational::from_json(field(e, "value")?)? }))
            .collect::<Result<Vec<_>>>()?;
        let dimensions = match v.get("dimensions") {
            Some(_) => array(v, "dimensions")?
                .iter()
                .map(|d| {
                    Ok(GradedDim {
                        sector: Sector::parse(field(d, "sector")?.as_str().unwrap_or_default())?,
                        root: int_list(field(d, "root")?)?,
                        ext: int_list(field(d, "ext")?)?,
                        dim: index(d, "dim")?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        Ok(Self { basis, brackets, form, dimensions })
    }

    /// The bracket of two basis elements as a coordinate map, if listed or
    /// implied by antisymmetry.
    pub fn bracket_of(&self, a: usize, b: usize) -> BTreeMap<usize, Q> {
        let (lo, hi, sign) = if a <= b { (a, b, Q::one()) } else { (b, a, -Q::one()) };
        self.brackets
            .iter()
            .find(|e| e.a == lo && e.b == hi)
            .map(|e| e.terms.iter().map(|(c, q)| (*c, q * &sign)).collect())
            .unwrap_or_default()
    }
}

//! Matrices over the torus, the involution `T ↦ T*` determined by the
//! hermitian form, and the Lie algebras `F` (skew matrices) and `S` (skew
//! matrices whose trace has no central part).
//!
//! `e_ij(α)` is the matrix unit with entry `α` at `(i, j)`, and
//! `e_ij(α)* = e_{ȷ̄ī}(γⱼ⁻¹ ᾱ γᵢ)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hermitian::{HalfDeg, HermitianData, XVec};
use crate::linalg::SparseVec;
use crate::rational::{self, Q};
use crate::roots;
use crate::torus::{Lattice, TorusElem};

/// A sparse `ℓ × ℓ` matrix with 1-based indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    l: usize,
    entries: BTreeMap<(usize, usize), TorusElem>,
}

/// Coordinates used when a matrix is flattened into a vector over `Q`.
pub type MatKey = (usize, usize, Lattice);

impl Mat {
    pub fn zero(l: usize) -> Self {
        Self { l, entries: BTreeMap::new() }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&TorusElem> {
        self.entries.get(&(i, j))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &TorusElem)> {
        self.entries.iter()
    }

    pub fn add_entry(&mut self, i: usize, j: usize, a: &TorusElem) {
        if a.is_zero() {
            return;
        }
        let slot = self.entries.entry((i, j)).or_default();
        slot.add_assign_ref(a);
        if slot.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        let mut out = self.clone();
        for ((i, j), a) in &other.entries {
            out.add_entry(*i, *j, a);
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Mat {
        Mat { l: self.l, entries: self.entries.iter().map(|(k, a)| (*k, -a)).collect() }
    }

    pub fn scale(&self, c: &Q) -> Mat {
        if c.is_zero() {
            return Mat::zero(self.l);
        }
        Mat { l: self.l, entries: self.entries.iter().map(|(k, a)| (*k, a.scale(c))).collect() }
    }

    pub fn to_sparse(&self) -> SparseVec<MatKey> {
        let mut out = SparseVec::new();
        for ((i, j), a) in &self.entries {
            for (e, c) in a.terms() {
                out.insert((*i, *j, e.clone()), c.clone());
            }
        }
        out
    }

    pub fn from_sparse(l: usize, v: &SparseVec<MatKey>) -> Mat {
        let mut out = Mat::zero(l);
        for ((i, j, e), c) in v {
            out.add_entry(*i, *j, &TorusElem::monomial(e.clone(), c.clone()));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "l": self.l,
            "entries": self.entries.iter().map(|((i, j), a)| json!({"i": i, "j": j, "value": a.to_json()})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Mat> {
        let l = v.get("l").and_then(Value::as_u64).ok_or_else(|| Error::Parse("matrix needs 'l'".into()))? as usize;
        let mut out = Mat::zero(l);
        for item in v.get("entries").and_then(Value::as_array).into_iter().flatten() {
            let i = item.get("i").and_then(Value::as_u64).unwrap_or(0) as usize;
            let j = item.get("j").and_then(Value::as_u64).unwrap_or(0) as usize;
            if i == 0 || j == 0 || i > l || j > l {
                return Err(Error::IndexOutOfRange { i, j, l });
            }
            out.add_entry(i, j, &TorusElem::from_json(item.get("value").unwrap_or(&Value::Null))?);
        }
        Ok(out)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.entries.iter().map(|((i, j), a)| format!("e{i},{j}[{a}]")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// A `(Q × Γ)`-degree: root in the `ε`-basis and external degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiDegree {
    pub root: Vec<i64>,
    pub ext: HalfDeg,
}

impl fmt::Display for BiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.root, self.ext)
    }
}

/// Coefficients of a skew matrix in the normal form
/// `Σ_{i<ȷ̄} u_ij(α_ij) + Σ_i u_{iī}(bᵢγᵢ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CanonicalForm {
    pub alpha: BTreeMap<(usize, usize), TorusElem>,
    pub b: BTreeMap<usize, TorusElem>,
}

/// An `sl₂`-triple `(e, h, f)` with `[e, f] = h = μ^∨`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Pair {
    pub e: Mat,
    pub f: Mat,
    pub h: Mat,
}

/// The unitary Lie algebra attached to hermitian data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unitary {
    data: HermitianData,
}

impl Unitary {
    pub fn new(data: HermitianData) -> Self {
        Self { data }
    }

    pub fn data(&self) -> &HermitianData {
        &self.data
    }

    pub fn l(&self) -> usize {
        self.data.l()
    }

    pub fn r(&self) -> usize {
        self.data.r()
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        let l = self.l();
        if i == 0 || j == 0 || i > l || j > l {
            return Err(Error::IndexOutOfRange { i, j, l });
        }
        Ok(())
    }

    fn check_mat(&self, t: &Mat) -> Result<()> {
        if t.l != self.l() {
            return Err(Error::DataMismatch);
        }
        Ok(())
    }

    pub fn zero(&self) -> Mat {
        Mat::zero(self.l())
    }

    pub fn e(&self, i: usize, j: usize, alpha: &TorusElem) -> Result<Mat> {
        self.check_index(i, j)?;
        let mut m = self.zero();
        m.add_entry(i, j, alpha);
        Ok(m)
    }

    /// `γⱼ⁻¹ ᾱ γᵢ`, the entry of `e_ij(α)*` at `(ȷ̄, ī)`.
    fn star_entry(&self, i: usize, j: usize, alpha: &TorusElem) -> TorusElem {
        let a = self.data.torus();
        a.mul(&a.mul(self.data.gamma_inv(j), &a.involute(alpha)), self.data.gamma(i))
    }

    pub fn star(&self, t: &Mat) -> Mat {
        let mut out = self.zero();
        for ((i, j), a) in &t.entries {
            out.add_entry(self.data.bar(*j), self.data.bar(*i), &self.star_entry(*i, *j, a));
        }
        out
    }

    /// `u_ij(α) = e_ij(α) − e_ij(α)*`.
    pub fn u(&self, i: usize, j: usize, alpha: &TorusElem) -> Result<Mat> {
        let e = self.e(i, j, alpha)?;
        Ok(e.sub(&self.star(&e)))
    }

    fn u_unchecked(&self, i: usize, j: usize, alpha: &TorusElem) -> Mat {
        self.u(i, j, alpha).expect("indices in range")
    }

    /// `U(xᵢ.α, xⱼ.β) = u_{iȷ̄}(α β̄ γⱼ)`.
    pub fn u_op(&self, i: usize, alpha: &TorusElem, j: usize, beta: &TorusElem) -> Result<Mat> {
        self.check_index(i, j)?;
        let a = self.data.torus();
        let coef = a.mul(&a.mul(alpha, &a.involute(beta)), self.data.gamma(j));
        self.u(i, self.data.bar(j), &coef)
    }

    /// `U(v, w)` for module elements, extended sesquilinearly.
    pub fn u_vec(&self, v: &XVec, w: &XVec) -> Result<Mat> {
        let mut out = self.zero();
        for (&i, a) in &v.coords {
            for (&j, b) in &w.coords {
                out = out.add(&self.u_op(i, a, j, b)?);
            }
        }
        Ok(out)
    }

    /// `hᵢ = U(xᵢ, x_ī) = e_ii(1) − e_īī(1)` for `1 ≤ i ≤ r`.
    pub fn h(&self, i: usize) -> Mat {
        self.u_unchecked(i, i, &self.data.torus().one())
    }

    pub fn mul(&self, t1: &Mat, t2: &Mat) -> Mat {
        let a = self.data.torus();
        let mut by_row: BTreeMap<usize, Vec<(usize, &TorusElem)>> = BTreeMap::new();
        for ((k, j), b) in &t2.entries {
            by_row.entry(*k).or_default().push((*j, b));
        }
        let mut out = Mat::zero(t1.l);
        for ((i, k), x) in &t1.entries {
            if let Some(row) = by_row.get(k) {
                for (j, y) in row {
                    out.add_entry(*i, *j, &a.mul(x, y));
                }
            }
        }
        out
    }

    pub fn checked_mul(&self, t1: &Mat, t2: &Mat) -> Result<Mat> {
        self.check_mat(t1)?;
        self.check_mat(t2)?;
        Ok(self.mul(t1, t2))
    }

    pub fn bracket(&self, t1: &Mat, t2: &Mat) -> Mat {
        self.mul(t1, t2).sub(&self.mul(t2, t1))
    }

    pub fn checked_bracket(&self, t1: &Mat, t2: &Mat) -> Result<Mat> {
        self.check_mat(t1)?;
        self.check_mat(t2)?;
        Ok(self.bracket(t1, t2))
    }

    pub fn trace(&self, t: &Mat) -> TorusElem {
        let mut out = TorusElem::zero();
        for ((i, j), a) in &t.entries {
            if i == j {
                out.add_assign_ref(a);
            }
        }
        out
    }

    pub fn in_f(&self, t: &Mat) -> bool {
        self.star(t) == t.neg()
    }

    pub fn in_s(&self, t: &Mat) -> bool {
        self.in_f(t) && self.data.torus().center_project(&self.trace(t)).is_zero()
    }

    pub fn canonical_form(&self, t: &Mat) -> Result<CanonicalForm> {
        let mut cf = CanonicalForm::default();
        let a = self.data.torus();
        let half = rational::frac(1, 2);
        for ((i, j), x) in &t.entries {
            let jb = self.data.bar(*j);
            if *i < jb {
                cf.alpha.insert((*i, *j), x.clone());
            } else if *i == jb {
                let b = a.mul(x, self.data.gamma_inv(*i)).scale(&half);
                cf.b.insert(*i, b);
            }
        }
        if !cf.b.values().all(|b| a.skew_part(b) == *b) || self.reassemble(&cf) != *t {
            return Err(Error::NotInF);
        }
        Ok(cf)
    }

    pub fn reassemble(&self, cf: &CanonicalForm) -> Mat {
        let a = self.data.torus();
        let mut out = self.zero();
        for ((i, j), x) in &cf.alpha {
            out = out.add(&self.u_unchecked(*i, *j, x));
        }
        for (i, b) in &cf.b {
            out = out.add(&self.u_unchecked(*i, self.data.bar(*i), &a.mul(b, self.data.gamma(*i))));
        }
        out
    }

    /// Degree of `e_ij(t^λ)`: root `wt(i) − wt(j)`, external `½τᵢ − ½τⱼ + λ`.
    pub fn bidegree(&self, i: usize, j: usize, lambda: &[i64]) -> BiDegree {
        let wi = self.data.weight(i);
        let wj = self.data.weight(j);
        let root = wi.iter().zip(&wj).map(|(a, b)| a - b).collect();
        let ti = self.data.tau(i);
        let tj = self.data.tau(j);
        let ext = HalfDeg((0..self.n()).map(|k| ti[k] - tj[k] + 2 * lambda[k]).collect());
        BiDegree { root, ext }
    }

    /// Splits `T` into its homogeneous components.
    pub fn decompose(&self, t: &Mat) -> BTreeMap<BiDegree, Mat> {
        let mut out: BTreeMap<BiDegree, Mat> = BTreeMap::new();
        for ((i, j), a) in &t.entries {
            for (e, c) in a.terms() {
                let d = self.bidegree(*i, *j, e);
                out.entry(d).or_insert_with(|| self.zero()).add_entry(*i, *j, &TorusElem::monomial(e.clone(), c.clone()));
            }
        }
        out
    }

    /// The degree of a nonzero homogeneous matrix.
    pub fn degree_of(&self, t: &Mat) -> Option<BiDegree> {
        let parts = self.decompose(t);
        if parts.len() == 1 {
            parts.into_keys().next()
        } else {
            None
        }
    }

    /// Basis of `S_μ^σ` for any `μ` in the root lattice (including 0).
    ///
    /// Candidates are `u_ij(t^λ)` over positions with `i ≤ ȷ̄`; in degree 0
    /// the central part of the trace is cut out when `t^λ` is central.
    pub fn homogeneous_basis(&self, mu: &[i64], sigma: &HalfDeg) -> Vec<Mat> {
        let l = self.l();
        let a = self.data.torus();
        let mut basis = Vec::new();
        let mut traces = Vec::new();
        for i in 1..=l {
            let wi = self.data.weight(i);
            for j in 1..=l {
                if i > self.data.bar(j) {
                    continue;
                }
                let wj = self.data.weight(j);
                if wi.iter().zip(&wj).zip(mu).any(|((x, y), m)| x - y != *m) {
                    continue;
                }
                let ti = self.data.tau(i);
                let tj = self.data.tau(j);
                let d: Vec<i64> = (0..self.n()).map(|k| sigma.0[k] - ti[k] + tj[k]).collect();
                if d.iter().any(|x| x % 2 != 0) {
                    continue;
                }
                let lambda: Lattice = d.iter().map(|x| x / 2).collect();
                let m = self.u_unchecked(i, j, &TorusElem::t(&lambda));
                if m.is_zero() {
                    continue;
                }
                let tr = self.trace(&m);
                traces.push(if a.is_central_exp(&lambda) { a.center_project(&tr).coeff(&lambda) } else { Q::zero() });
                basis.push(m);
            }
        }
        match traces.iter().position(|c| !c.is_zero()) {
            None => basis,
            Some(p) => {
                let cp = traces[p].clone();
                basis
                    .iter()
                    .enumerate()
                    .filter(|(q, _)| *q != p)
                    .map(|(q, m)| m.sub(&basis[p].scale(&(&traces[q] / &cp))))
                    .collect()
            }
        }
    }

    /// Basis of the root space `S_μ^σ`, `μ ∈ BC_r`.
    pub fn root_space_basis(&self, mu: &[i64], sigma: &HalfDeg) -> Result<Vec<Mat>> {
        if mu.len() != self.r() || !roots::is_root(mu) {
            return Err(Error::NotARoot(format!("{mu:?}")));
        }
        Ok(self.homogeneous_basis(mu, sigma))
    }

    /// `μ^∨ = Σ (2cₐ/(μ,μ)) hₐ`, with `hₐ = e_aa(1) − e_āā(1)`.
    pub fn coroot(&self, mu: &[i64]) -> Result<Mat> {
        if mu.len() != self.r() || !roots::is_root(mu) {
            return Err(Error::NotARoot(format!("{mu:?}")));
        }
        let norm = roots::inner(mu, mu);
        let mut out = self.zero();
        for (a, &c) in mu.iter().enumerate() {
            if c != 0 {
                out = out.add(&self.h(a + 1).scale(&rational::frac(2 * c, norm)));
            }
        }
        Ok(out)
    }

    /// `e ∈ S_μ^σ`, `f ∈ S_{−μ}^{−σ}` with `[e, f] = μ^∨`.
    pub fn sl2_pair(&self, mu: &[i64], sigma: &HalfDeg) -> Result<Sl2Pair> {
        let h = self.coroot(mu)?;
        let e = self.root_space_basis(mu, sigma)?.into_iter().next().ok_or(Error::EmptyRootSpace)?;
        let f0 = self
            .root_space_basis(&roots::neg(mu), &-sigma)?
            .into_iter()
            .next()
            .ok_or(Error::EmptyRootSpace)?;
        let ef = self.bracket(&e, &f0);
        let (&(i, j), hij) = h.entries().next().expect("coroots are nonzero");
        let ratio = match (ef.get(i, j), hij.as_monomial()) {
            (Some(x), Some((exp, c))) => x.coeff(exp) / c,
            _ => Q::zero(),
        };
        if ratio.is_zero() || h.scale(&ratio) != ef {
            return Err(Error::Sl2(format!("[e, f] is not a multiple of the coroot at {mu:?}, {sigma}")));
        }
        let f = f0.scale(&ratio.recip());
        Ok(Sl2Pair { e, f, h })
    }

    /// `(T₁ | T₂) = ϖ(tr(T₁T₂))`.
    pub fn trace_form(&self, t1: &Mat, t2: &Mat) -> Q {
        let a = self.data.torus();
        let mut acc = Q::zero();
        for ((i, j), x) in &t1.entries {
            if let Some(y) = t2.get(*j, *i) {
                for (ex, cx) in x.terms() {
                    let target: Lattice = ex.iter().map(|v| -v).collect();
                    let cy = y.coeff(&target);
                    if !cy.is_zero() {
                        let (neg, _) = a.monomial_product(ex, &target);
                        let v = cx * cy;
                        acc += if neg { -v } else { v };
                    }
                }
            }
        }
        acc
    }

    /// Entrywise left multiplication by `z ∈ Z(A, −)`.
    pub fn centroid_act(&self, z: &TorusElem, t: &Mat) -> Result<Mat> {
        let a = self.data.torus();
        a.check(z)?;
        if !a.is_central_symmetric(z) {
            return Err(Error::NotCentralSymmetric);
        }
        let mut out = self.zero();
        for ((i, j), x) in &t.entries {
            out.add_entry(*i, *j, &a.mul(z, x));
        }
        Ok(out)
    }
}

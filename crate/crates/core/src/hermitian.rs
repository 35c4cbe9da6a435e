//! Graded hermitian form data: the index set `1..=ℓ` with `ℓ = 2r + m`, the
//! involution `i ↦ ī`, the degrees `τᵢ`, the diagonal parameters `γᵢ` and
//! the Gram matrix.
//!
//! Indices are 1-based throughout. For `i ≤ 2r`, `ī = 2r + 1 − i`; the
//! anisotropic indices `2r+1..=ℓ` are fixed by the bar map.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::torus::{lattice_mask, lattice_zero, mask_lift, Lattice, Torus, TorusElem};

/// A degree in `½Λ`, stored as twice its `Λ`-coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfDeg(pub Lattice);

impl HalfDeg {
    pub fn zero(n: usize) -> Self {
        HalfDeg(lattice_zero(n))
    }

    pub fn from_doubled(coords: &[i64]) -> Self {
        HalfDeg(Lattice::from_slice(coords))
    }

    /// The degree `σ` of a lattice vector.
    pub fn of_lattice(sigma: &[i64]) -> Self {
        HalfDeg(sigma.iter().map(|x| 2 * x).collect())
    }

    /// The degree `½σ`.
    pub fn half_of(sigma: &[i64]) -> Self {
        HalfDeg(Lattice::from_slice(sigma))
    }

    pub fn doubled(&self) -> &[i64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// `Some(σ)` when the degree lies in `Λ`.
    pub fn to_lattice(&self) -> Option<Lattice> {
        if self.0.iter().all(|x| x % 2 == 0) {
            Some(self.0.iter().map(|x| x / 2).collect())
        } else {
            None
        }
    }

    pub fn in_lattice(&self) -> bool {
        self.0.iter().all(|x| x % 2 == 0)
    }

    /// Image in `½Λ/Λ ≅ Z₂ⁿ`.
    pub fn mask(&self) -> u32 {
        lattice_mask(&self.0)
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for HalfDeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&x| if x % 2 == 0 { format!("{}", x / 2) } else { format!("{x}/2") })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Add for &HalfDeg {
    type Output = HalfDeg;

    fn add(self, rhs: &HalfDeg) -> HalfDeg {
        HalfDeg(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &HalfDeg {
    type Output = HalfDeg;

    fn sub(self, rhs: &HalfDeg) -> HalfDeg {
        HalfDeg(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &HalfDeg {
    type Output = HalfDeg;

    fn neg(self) -> HalfDeg {
        HalfDeg(self.0.iter().map(|a| -a).collect())
    }
}

/// Result of the anisotropy check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnisotropyReport {
    pub passed: bool,
    /// Pairs of anisotropic indices whose degrees agree modulo `Λ`.
    pub duplicates: Vec<(usize, usize)>,
    /// Anisotropic indices `k` with `2ρₖ ∉ Λ₊` or `γₖ` not of degree `τₖ`.
    pub bad_degrees: Vec<usize>,
}

/// `supp_Γ(X)` as cosets of `Λ` together with the anisotropic rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Supports {
    /// Coset representatives `½τₖ` of the anisotropic support, one per index.
    pub cosets: Vec<HalfDeg>,
    /// `Γ_an / Λ` as masks in `Z₂ⁿ`.
    pub gamma_an: Vec<u32>,
    pub anisotropic_rank: usize,
}

/// The data `(r, A, M̃, τ, γ)` defining the hermitian form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianData {
    r: usize,
    torus: Torus,
    subset: Vec<u32>,
    tau: Vec<Lattice>,
    gamma: Vec<TorusElem>,
    gamma_inv: Vec<TorusElem>,
}

impl HermitianData {
    /// Builds the data with `τ` the `{0,1}` lifts of `M̃` in increasing mask
    /// order and `γᵢ = t^{τᵢ}`.
    pub fn build(r: usize, torus: Torus, subset: &[u32]) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidData("Witt index must be at least 1".into()));
        }
        let n = torus.n();
        let mut m: Vec<u32> = subset.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.first() != Some(&0) {
            return Err(Error::InvalidSubset("the subset must contain 0".into()));
        }
        for &v in &m {
            if n < 32 && v >> n != 0 {
                return Err(Error::InvalidSubset(format!("{v} is not a vector of Z2^{n}")));
            }
            if torus.kappa().at(v) != 0 {
                return Err(Error::InvalidSubset(format!(
                    "{v} is not isotropic for {}",
                    torus.kappa()
                )));
            }
        }
        let mut tau = vec![lattice_zero(n); 2 * r];
        let mut gamma = vec![TorusElem::one(n); 2 * r];
        for &v in &m {
            let t = mask_lift(n, v);
            gamma.push(TorusElem::t(&t));
            tau.push(t);
        }
        Self::with_parameters(r, torus, &m, tau, gamma)
    }

    /// Builds data from explicit parameters without checking the
    /// compatibility conditions; used to probe the checks with bad input.
    pub fn with_parameters(
        r: usize,
        torus: Torus,
        subset: &[u32],
        tau: Vec<Lattice>,
        gamma: Vec<TorusElem>,
    ) -> Result<Self> {
        let l = 2 * r + subset.len();
        if tau.len() != l || gamma.len() != l {
            return Err(Error::InvalidData(format!(
                "expected {l} parameters, got {} degrees and {} gammas",
                tau.len(),
                gamma.len()
            )));
        }
        let n = torus.n();
        if let Some(t) = tau.iter().find(|t| t.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: t.len() });
        }
        let mut gamma_inv = Vec::with_capacity(l);
        for (i, g) in gamma.iter().enumerate() {
            torus.check(g)?;
            let inv = torus
                .inverse(g)
                .ok_or_else(|| Error::InvalidData(format!("gamma_{} is not an invertible monomial", i + 1)))?;
            gamma_inv.push(inv);
        }
        Ok(Self { r, torus, subset: subset.to_vec(), tau, gamma, gamma_inv })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.torus.n()
    }

    pub fn m(&self) -> usize {
        self.subset.len()
    }

    pub fn l(&self) -> usize {
        2 * self.r + self.subset.len()
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    /// `M̃`, sorted.
    pub fn subset(&self) -> &[u32] {
        &self.subset
    }

    pub fn bar(&self, i: usize) -> usize {
        if i <= 2 * self.r {
            2 * self.r + 1 - i
        } else {
            i
        }
    }

    pub fn is_hyperbolic(&self, i: usize) -> bool {
        i <= 2 * self.r
    }

    /// Anisotropic indices `2r+1..=ℓ`.
    pub fn anisotropic(&self) -> std::ops::RangeInclusive<usize> {
        2 * self.r + 1..=self.l()
    }

    pub fn tau(&self, i: usize) -> &Lattice {
        &self.tau[i - 1]
    }

    pub fn gamma(&self, i: usize) -> &TorusElem {
        &self.gamma[i - 1]
    }

    pub fn gamma_inv(&self, i: usize) -> &TorusElem {
        &self.gamma_inv[i - 1]
    }

    /// `ρᵢ = ½τᵢ`.
    pub fn rho(&self, i: usize) -> HalfDeg {
        HalfDeg::half_of(&self.tau[i - 1])
    }

    /// The weight of `xᵢ` in the basis `ε₁..ε_r`: `εᵢ`, `−ε_ī` or 0.
    pub fn weight(&self, i: usize) -> Vec<i64> {
        let mut w = vec![0; self.r];
        if i <= self.r {
            w[i - 1] = 1;
        } else if i <= 2 * self.r {
            w[self.bar(i) - 1] = -1;
        }
        w
    }

    /// `ξ(xᵢ.α, xⱼ.β) = δ_{iȷ̄} ᾱ γᵢ β`.
    pub fn xi(&self, i: usize, alpha: &TorusElem, j: usize, beta: &TorusElem) -> TorusElem {
        if self.bar(j) != i {
            return TorusElem::zero();
        }
        let a = &self.torus;
        a.mul(&a.mul(&a.involute(alpha), self.gamma(i)), beta)
    }

    /// `G[i][j] = δ_{iȷ̄} γᵢ`, as an `ℓ × ℓ` array (0-based storage).
    pub fn gram(&self) -> Vec<Vec<TorusElem>> {
        let l = self.l();
        (1..=l)
            .map(|i| {
                (1..=l)
                    .map(|j| if self.bar(j) == i { self.gamma(i).clone() } else { TorusElem::zero() })
                    .collect()
            })
            .collect()
    }

    pub fn check_anisotropic(&self) -> AnisotropyReport {
        let an: Vec<usize> = self.anisotropic().collect();
        let mut duplicates = Vec::new();
        for (a, &k) in an.iter().enumerate() {
            for &k2 in &an[a + 1..] {
                if lattice_mask(self.tau(k)) == lattice_mask(self.tau(k2)) {
                    duplicates.push((k, k2));
                }
            }
        }
        let mut bad_degrees = Vec::new();
        for &k in &an {
            let t = self.tau(k);
            let homogeneous = self.gamma(k).as_monomial().is_some_and(|(e, _)| e == t);
            if !self.torus.in_supp_plus(t) || !homogeneous || !self.torus.is_symmetric(self.gamma(k)) {
                bad_degrees.push(k);
            }
        }
        AnisotropyReport { passed: duplicates.is_empty() && bad_degrees.is_empty(), duplicates, bad_degrees }
    }

    pub fn supports(&self) -> Supports {
        let cosets: Vec<HalfDeg> = self.anisotropic().map(|k| self.rho(k)).collect();
        let mut gamma_an: Vec<u32> = cosets.iter().map(HalfDeg::mask).collect();
        gamma_an.sort_unstable();
        gamma_an.dedup();
        Supports { cosets, gamma_an, anisotropic_rank: self.m() }
    }

    /// `σ ∈ Γ`: the mod-2 image of the doubled coordinates lies in `span M̃`.
    pub fn in_gamma(&self, d: &HalfDeg) -> bool {
        crate::bitquad::in_span(&self.subset, d.mask())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "n": self.n(),
            "l": self.l(),
            "M": self.subset,
            "bar": (1..=self.l()).map(|i| self.bar(i)).collect::<Vec<_>>(),
            "tau": self.tau.iter().map(|t| t.to_vec()).collect::<Vec<_>>(),
            "gamma": self.gamma.iter().map(TorusElem::to_json).collect::<Vec<_>>(),
        })
    }
}

/// `Σ_k xₖ.αₖ`, an element of the right `A`-module `X`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct XVec {
    pub coords: std::collections::BTreeMap<usize, TorusElem>,
}

impl XVec {
    /// `xᵢ.α`.
    pub fn basis(i: usize, alpha: TorusElem) -> Self {
        let mut coords = std::collections::BTreeMap::new();
        if !alpha.is_zero() {
            coords.insert(i, alpha);
        }
        Self { coords }
    }

    /// `v.β` (right action).
    pub fn act(&self, torus: &Torus, beta: &TorusElem) -> Self {
        let mut coords = std::collections::BTreeMap::new();
        for (&i, a) in &self.coords {
            let c = torus.mul(a, beta);
            if !c.is_zero() {
                coords.insert(i, c);
            }
        }
        Self { coords }
    }
}

impl HermitianData {
    /// `ξ(v, w)` for module elements.
    pub fn xi_vec(&self, v: &XVec, w: &XVec) -> TorusElem {
        let mut out = TorusElem::zero();
        for (&i, a) in &v.coords {
            for (&j, b) in &w.coords {
                out.add_assign_ref(&self.xi(i, a, j, b));
            }
        }
        out
    }
}

//! The quantum torus with involution determined by a mod-2 quadratic form κ
//! and a compatible bilinear form κ_b:
//!
//! ```text
//! t^σ t^τ = (-1)^{κ_b(σ̃,τ̃)} t^{σ+τ},      conj(t^σ) = (-1)^{κ(σ̃)} t^σ.
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use smallvec::SmallVec;

use crate::bitquad::{BilForm, QuadForm};
use crate::error::{Error, Result};
use crate::rational::{self, Q};

/// A vector of the lattice `Λ = Zⁿ`.
pub type Lattice = SmallVec<[i64; 4]>;

pub fn lattice_zero(n: usize) -> Lattice {
    SmallVec::from_elem(0, n)
}

/// The basis vector `σᵢ` (0-based `i`).
pub fn lattice_unit(n: usize, i: usize) -> Lattice {
    let mut v = lattice_zero(n);
    v[i] = 1;
    v
}

pub fn lattice_add(a: &[i64], b: &[i64]) -> Lattice {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn lattice_sub(a: &[i64], b: &[i64]) -> Lattice {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn lattice_neg(a: &[i64]) -> Lattice {
    a.iter().map(|x| -x).collect()
}

/// `σ̃`, the image of `σ` in `Z₂ⁿ` as a bitmask.
pub fn lattice_mask(a: &[i64]) -> u32 {
    a.iter()
        .enumerate()
        .fold(0, |acc, (i, &x)| acc | (((x.rem_euclid(2)) as u32) << i))
}

/// The `{0,1}` lift of a mask.
pub fn mask_lift(n: usize, mask: u32) -> Lattice {
    (0..n).map(|i| ((mask >> i) & 1) as i64).collect()
}

/// A finite linear combination of monomials `t^σ` with rational coefficients.
///
/// Zero coefficients are never stored, so equality is structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusElem {
    terms: BTreeMap<Lattice, Q>,
}

impl TorusElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(lattice_zero(n), rational::one())
    }

    pub fn monomial(exp: impl Into<Lattice>, coef: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(exp.into(), coef);
        }
        Self { terms }
    }

    /// `t^σ` with coefficient 1.
    pub fn t(exp: &[i64]) -> Self {
        Self::monomial(Lattice::from_slice(exp), rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Lattice, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[i64]) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    /// The unique term, if the element is a nonzero monomial.
    pub fn as_monomial(&self) -> Option<(&Lattice, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, exp: Lattice, coef: Q) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &TorusElem) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Q) -> TorusElem {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    /// Keeps the terms whose exponent satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Lattice) -> bool) -> TorusElem {
        Self {
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    serde_json::json!({
                        "exp": e.to_vec(),
                        "num": rational::bigint_to_json(c.numer()),
                        "den": rational::bigint_to_json(c.denom()),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let items = v.as_array().ok_or_else(|| Error::Parse("torus element must be a list".into()))?;
        let mut out = Self::zero();
        for item in items {
            let exp: Vec<i64> = serde_json::from_value(item.get("exp").cloned().unwrap_or(Value::Null))?;
            let num = rational::bigint_from_json(item.get("num").unwrap_or(&Value::Null))?;
            let den = match item.get("den") {
                Some(d) => rational::bigint_from_json(d)?,
                None => 1.into(),
            };
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            out.add_term(Lattice::from_vec(exp), Q::new(num, den));
        }
        Ok(out)
    }
}

impl Serialize for TorusElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        TorusElem::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for TorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("({c})t^{e:?}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Add for &TorusElem {
    type Output = TorusElem;

    fn add(self, rhs: &TorusElem) -> TorusElem {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &TorusElem {
    type Output = TorusElem;

    fn sub(self, rhs: &TorusElem) -> TorusElem {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &TorusElem {
    type Output = TorusElem;

    fn neg(self) -> TorusElem {
        TorusElem { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }
}

/// The torus `A = ATI(κ, κ_b)` over `Λ = Zⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Torus {
    kappa: QuadForm,
    kappa_b: BilForm,
}

impl Torus {
    pub fn new(kappa: QuadForm, kappa_b: BilForm) -> Result<Self> {
        if !kappa_b.is_compatible_with(&kappa) {
            return Err(Error::IncompatibleBilinear);
        }
        Ok(Self { kappa, kappa_b })
    }

    /// Uses the deterministic compatible bilinear form of `κ`.
    pub fn from_form(kappa: QuadForm) -> Self {
        let kappa_b = kappa.compatible_bilinear();
        Self { kappa, kappa_b }
    }

    pub fn n(&self) -> usize {
        self.kappa.dim()
    }

    pub fn kappa(&self) -> &QuadForm {
        &self.kappa
    }

    pub fn kappa_b(&self) -> &BilForm {
        &self.kappa_b
    }

    pub fn one(&self) -> TorusElem {
        TorusElem::one(self.n())
    }

    pub fn monomial(&self, exp: &[i64], coef: Q) -> TorusElem {
        TorusElem::monomial(Lattice::from_slice(exp), coef)
    }

    /// Fails unless every exponent has length `n`.
    pub fn check(&self, a: &TorusElem) -> Result<()> {
        for e in a.terms.keys() {
            if e.len() != self.n() {
                return Err(Error::DimensionMismatch { expected: self.n(), got: e.len() });
            }
        }
        Ok(())
    }

    #[inline]
    fn sign_bit(&self, s: &[i64], t: &[i64]) -> u8 {
        self.kappa_b.at(lattice_mask(s), lattice_mask(t))
    }

    /// Product `t^σ t^τ` as (sign, exponent).
    pub fn monomial_product(&self, s: &[i64], t: &[i64]) -> (bool, Lattice) {
        (self.sign_bit(s, t) == 1, lattice_add(s, t))
    }

    pub fn mul(&self, a: &TorusElem, b: &TorusElem) -> TorusElem {
        let mut out = TorusElem::zero();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let (neg, e) = self.monomial_product(ea, eb);
                let c = ca * cb;
                out.add_term(e, if neg { -c } else { c });
            }
        }
        out
    }

    pub fn checked_mul(&self, a: &TorusElem, b: &TorusElem) -> Result<TorusElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn commutator(&self, a: &TorusElem, b: &TorusElem) -> TorusElem {
        &self.mul(a, b) - &self.mul(b, a)
    }

    pub fn involute(&self, a: &TorusElem) -> TorusElem {
        TorusElem {
            terms: a
                .terms
                .iter()
                .map(|(e, c)| {
                    let c = if self.kappa.at(lattice_mask(e)) == 1 { -c.clone() } else { c.clone() };
                    (e.clone(), c)
                })
                .collect(),
        }
    }

    /// Inverse of the monomial `c·t^σ`: `(t^σ)^{-1} = (-1)^{κ_b(σ̃,σ̃)} t^{-σ}`.
    pub fn monomial_inverse(&self, exp: &[i64], coef: &Q) -> TorusElem {
        let inv = coef.recip();
        let c = if self.sign_bit(exp, exp) == 1 { -inv } else { inv };
        TorusElem::monomial(lattice_neg(exp), c)
    }

    /// Inverse of a nonzero monomial element.
    pub fn inverse(&self, a: &TorusElem) -> Option<TorusElem> {
        a.as_monomial().map(|(e, c)| self.monomial_inverse(e, c))
    }

    /// `t^σ` is central iff `κ_p(σ̃, ·) = 0`.
    pub fn is_central_exp(&self, exp: &[i64]) -> bool {
        self.kappa.in_polar_radical(lattice_mask(exp))
    }

    pub fn center_project(&self, a: &TorusElem) -> TorusElem {
        a.filter(|e| self.is_central_exp(e))
    }

    pub fn commutator_part(&self, a: &TorusElem) -> TorusElem {
        a.filter(|e| !self.is_central_exp(e))
    }

    pub fn symmetric_part(&self, a: &TorusElem) -> TorusElem {
        a.filter(|e| self.kappa.at(lattice_mask(e)) == 0)
    }

    pub fn skew_part(&self, a: &TorusElem) -> TorusElem {
        a.filter(|e| self.kappa.at(lattice_mask(e)) == 1)
    }

    /// `σ ∈ Λ₊`, i.e. `κ(σ̃) = 0`.
    pub fn in_supp_plus(&self, exp: &[i64]) -> bool {
        self.kappa.at(lattice_mask(exp)) == 0
    }

    /// `σ ∈ Λ₋`, i.e. `κ(σ̃) = 1`.
    pub fn in_supp_minus(&self, exp: &[i64]) -> bool {
        !self.in_supp_plus(exp)
    }

    /// `σ ∈ Γ_m`, i.e. `σ̃ ∈ rad κ`: the support of `Z(A,−)`.
    pub fn in_gamma_m(&self, exp: &[i64]) -> bool {
        self.kappa.in_radical(lattice_mask(exp))
    }

    pub fn is_central(&self, a: &TorusElem) -> bool {
        a.terms.keys().all(|e| self.is_central_exp(e))
    }

    pub fn is_symmetric(&self, a: &TorusElem) -> bool {
        a.terms.keys().all(|e| self.in_supp_plus(e))
    }

    /// Membership in `Z(A,−)`, the central symmetric elements.
    pub fn is_central_symmetric(&self, a: &TorusElem) -> bool {
        a.terms.keys().all(|e| self.in_gamma_m(e))
    }

    /// Coefficient of `t⁰`.
    pub fn varpi(&self, a: &TorusElem) -> Q {
        a.coeff(&lattice_zero(self.n()))
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "n": self.n(),
            "kappa": crate::io::quad_form_to_json(&self.kappa),
            "kappa_b": self.kappa_b.to_matrix(),
        })
    }
}

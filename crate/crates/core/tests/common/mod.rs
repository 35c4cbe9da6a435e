#![allow(dead_code)]

use bctorus::bitquad::QuadForm;
use bctorus::hermitian::{HalfDeg, HermitianData};
use bctorus::torus::{Torus, TorusElem};
use bctorus::unitary::Unitary;

pub fn data(r: usize, n: usize, kappa: &str, m: &[u32]) -> HermitianData {
    let torus = Torus::from_form(QuadForm::parse(n, kappa).unwrap());
    HermitianData::build(r, torus, m).unwrap()
}

/// r = 3, n = 1, κ = 0, M̃ = {0}.
pub fn setup_a() -> Unitary {
    Unitary::new(data(3, 1, "0", &[0]))
}

/// r = 3, n = 3, κ = ℓ₃ + ℓ₁ℓ₂, M̃ = {0, σ̃₁, σ̃₂}.
pub fn setup_b() -> Unitary {
    Unitary::new(data(3, 3, "l3 + l1l2", &[0, 1, 2]))
}

pub fn t(exp: &[i64]) -> TorusElem {
    TorusElem::t(exp)
}

pub fn hd(doubled: &[i64]) -> HalfDeg {
    HalfDeg::from_doubled(doubled)
}
pub mod sampler;

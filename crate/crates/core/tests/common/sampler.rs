use bctorus::eala::{DerElem, DualElem, Eala, EalaElem};
use bctorus::lietorus::{Slice, Window};
use bctorus::rational::{int, Q};
use bctorus::unitary::Mat;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random homogeneous elements of S, C and D over windowed slices.
pub struct Sampler<'a> {
    pub e: &'a Eala,
    pub cells: Vec<Vec<Mat>>,
    pub degrees: Vec<Vec<i64>>,
}

impl<'a> Sampler<'a> {
    pub fn new(e: &'a Eala, w: i64, dw: i64) -> Self {
        let slice = Slice::build(e.unitary(), Window::new(w));
        let degrees = e
            .gamma_m_in(Window::new(dw))
            .into_iter()
            .filter(|l| !e.der_basis(l).is_empty())
            .map(|l| l.to_vec())
            .collect();
        Self { e, cells: slice.cells.into_values().collect(), degrees }
    }

    pub fn coef(rng: &mut ChaCha8Rng) -> Q {
        let mut c = rng.gen_range(-3i64..=3);
        if c == 0 {
            c = 1;
        }
        int(c)
    }

    pub fn s(&self, rng: &mut ChaCha8Rng) -> Mat {
        let cell = self.cells.choose(rng).unwrap();
        cell.choose(rng).unwrap().scale(&Self::coef(rng))
    }

    pub fn c(&self, rng: &mut ChaCha8Rng) -> DualElem {
        let sigma = self.degrees.choose(rng).unwrap();
        let v = self.e.dual_basis(sigma).choose(rng).unwrap().clone();
        self.e.dual(sigma, &v).unwrap().scale(&Self::coef(rng))
    }

    pub fn d(&self, rng: &mut ChaCha8Rng) -> DerElem {
        let sigma = self.degrees.choose(rng).unwrap();
        let v = self.e.der_basis(sigma).choose(rng).unwrap().clone();
        self.e.der(sigma, &v).unwrap().scale(&Self::coef(rng))
    }

    /// A homogeneous element from a random sector, or a mix of all three.
    pub fn elem(&self, rng: &mut ChaCha8Rng) -> EalaElem {
        let l = self.e.l();
        match rng.gen_range(0..4) {
            0 => EalaElem::from_s(self.s(rng)),
            1 => EalaElem::from_c(l, self.c(rng)),
            2 => EalaElem::from_d(l, self.d(rng)),
            _ => EalaElem { s: self.s(rng), c: self.c(rng), d: self.d(rng) },
        }
    }
}

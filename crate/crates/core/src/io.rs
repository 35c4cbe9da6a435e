//! JSON encodings of forms, tori and hermitian data specifications.
//!
//! A specification file looks like
//!
//! ```json
//! {"r": 3,
//!  "torus": {"n": 3,
//!            "kappa": {"n": 3, "diag": [0,0,1],
//!                      "polar_upper": [[0,1,0],[0,0,0],[0,0,0]]}},
//!  "M": [0, 1, 2]}
//! ```
//!
//! `torus.kappa_b` (an `n×n` bit matrix) is optional; when absent the
//! deterministic compatible form is used.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bitquad::{BilForm, QuadForm};
use crate::error::{Error, Result};
use crate::hermitian::HermitianData;
use crate::torus::Torus;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadFormJson {
    pub n: usize,
    pub diag: Vec<u8>,
    pub polar_upper: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusSpecJson {
    pub n: usize,
    pub kappa: QuadFormJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_b: Option<Vec<Vec<u8>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSpecJson {
    pub r: usize,
    pub torus: TorusSpecJson,
    #[serde(rename = "M")]
    pub m: Vec<u32>,
}

pub fn quad_form_to_json(k: &QuadForm) -> Value {
    serde_json::to_value(QuadFormJson::from(k)).expect("plain data serializes")
}

impl From<&QuadForm> for QuadFormJson {
    fn from(k: &QuadForm) -> Self {
        Self { n: k.dim(), diag: k.diag_bits(), polar_upper: k.polar_upper_bits() }
    }
}

impl QuadFormJson {
    pub fn to_form(&self) -> Result<QuadForm> {
        if self.diag.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: self.diag.len() });
        }
        QuadForm::from_bits(&self.diag, &self.polar_upper)
    }
}

impl TorusSpecJson {
    pub fn from_torus(t: &Torus) -> Self {
        Self { n: t.n(), kappa: t.kappa().into(), kappa_b: Some(t.kappa_b().to_matrix()) }
    }

    pub fn to_torus(&self) -> Result<Torus> {
        let kappa = self.kappa.to_form()?;
        if kappa.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: kappa.dim() });
        }
        match &self.kappa_b {
            Some(rows) => Torus::new(kappa, BilForm::from_matrix(rows)?),
            None => Ok(Torus::from_form(kappa)),
        }
    }
}

impl DataSpecJson {
    pub fn new(r: usize, torus: &Torus, subset: &[u32]) -> Self {
        Self { r, torus: TorusSpecJson::from_torus(torus), m: subset.to_vec() }
    }

    pub fn build(&self) -> Result<HermitianData> {
        HermitianData::build(self.r, self.torus.to_torus()?, &self.m)
    }
}

/// Parses a specification document and builds the hermitian data.
pub fn parse_spec(text: &str) -> Result<HermitianData> {
    let spec: DataSpecJson = serde_json::from_str(text)?;
    spec.build()
}

pub fn parse_quad_form(text: &str) -> Result<QuadForm> {
    let k: QuadFormJson = serde_json::from_str(text)?;
    k.to_form()
}

pub fn spec_to_json(data: &HermitianData) -> Value {
    json!(DataSpecJson::new(data.r(), data.torus(), data.subset()))
}

//! Linear algebra over Z₂: quadratic forms, their polar and compatible
//! bilinear forms, radicals, isotropic sets, orthogonal groups, orbits of
//! pointed subsets and isometry classification.
//!
//! Vectors of `Z₂ⁿ` are stored as bitmasks: bit `i` is the coordinate on the
//! `(i+1)`-th basis vector, so `σ̃₁ = 0b001`, `σ̃₂ = 0b010`, `σ̃₃ = 0b100`.
//! Subsets are sorted lists of such masks, and "minimal" always means
//! lexicographically minimal as a sorted list.
//!
//! The enumeration routines (orthogonal groups, orbits, isometry search) are
//! exact brute force and are bounded to small dimensions.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// Largest dimension for which forms can be evaluated.
pub const MAX_DIM: usize = 16;
/// Largest dimension for group enumeration and isometry search.
pub const ENUM_MAX_DIM: usize = 5;
/// Largest dimension for the brute-force isometry classification.
pub const CLASSIFY_MAX_DIM: usize = 4;
/// Orbit enumeration keeps a visited bitmap over subsets of the nonzero
/// isotropic vectors; this caps that bitmap at 2^20 entries.
pub const ORBIT_MAX_NONZERO_ISO: usize = 20;

#[inline]
pub(crate) fn parity(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// A vector of `Z₂ⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    dim: usize,
    bits: u32,
}

impl BitVec {
    pub fn new(dim: usize, bits: u32) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DimensionMismatch { expected: MAX_DIM, got: dim });
        }
        if dim < 32 && bits >> dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: 32 - bits.leading_zeros() as usize,
            });
        }
        Ok(Self { dim, bits })
    }

    pub fn from_coords(coords: &[u8]) -> Result<Self> {
        let mut bits = 0;
        for (i, &c) in coords.iter().enumerate() {
            if c > 1 {
                return Err(Error::Parse(format!("bit value {c}")));
            }
            bits |= (c as u32) << i;
        }
        Self::new(coords.len(), bits)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..self.dim).map(|i| ((self.bits >> i) & 1) as u8).collect()
    }
}

impl std::ops::Add for BitVec {
    type Output = BitVec;

    fn add(self, rhs: BitVec) -> BitVec {
        debug_assert_eq!(self.dim, rhs.dim);
        BitVec { dim: self.dim, bits: self.bits ^ rhs.bits }
    }
}

/// A bilinear form on `Z₂ⁿ`; `rows[i]` has bit `j` set iff `B(eᵢ, eⱼ) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BilForm {
    dim: usize,
    rows: Vec<u32>,
}

impl BilForm {
    pub fn zero(dim: usize) -> Self {
        Self { dim, rows: vec![0; dim] }
    }

    pub fn from_rows(dim: usize, rows: Vec<u32>) -> Result<Self> {
        if rows.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
        }
        if dim > MAX_DIM || rows.iter().any(|&r| r >> dim != 0) {
            return Err(Error::InvalidForm("bilinear form row out of range".into()));
        }
        Ok(Self { dim, rows })
    }

    pub fn from_matrix(matrix: &[Vec<u8>]) -> Result<Self> {
        let dim = matrix.len();
        let mut rows = Vec::with_capacity(dim);
        for row in matrix {
            rows.push(BitVec::from_coords(row)?.bits);
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
        }
        Self::from_rows(dim, rows)
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|&r| (0..self.dim).map(|j| ((r >> j) & 1) as u8).collect())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        ((self.rows[i] >> j) & 1) as u8
    }

    #[inline]
    pub fn at(&self, u: u32, v: u32) -> u8 {
        let mut acc = 0u8;
        let mut rest = u;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            acc ^= parity(self.rows[i] & v);
            rest &= rest - 1;
        }
        acc
    }

    pub fn eval(&self, u: &BitVec, v: &BitVec) -> Result<u8> {
        for w in [u, v] {
            if w.dim != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: w.dim });
            }
        }
        Ok(self.at(u.bits, v.bits))
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![0u32; self.dim];
        for (i, &r) in self.rows.iter().enumerate() {
            for (j, row) in rows.iter_mut().enumerate() {
                if (r >> j) & 1 == 1 {
                    *row |= 1 << i;
                }
            }
        }
        Self { dim: self.dim, rows }
    }

    /// `B(u,v) + B(v,u) = κ_p(u,v)` for all `u, v`.
    pub fn is_compatible_with(&self, kappa: &QuadForm) -> bool {
        if self.dim != kappa.dim {
            return false;
        }
        let t = self.transpose();
        (0..self.dim).all(|i| (self.rows[i] ^ t.rows[i]) == kappa.polar_row(i))
    }

    /// Renders the form as a polynomial in `ℓᵢ` and `ℓ′ⱼ`, e.g. `l1l'2`.
    pub fn to_polynomial(&self) -> String {
        let mut terms = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.entry(i, j) == 1 {
                    terms.push(format!("l{}l'{}", i + 1, j + 1));
                }
            }
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// A quadratic form `κ(v) = Σ cᵢℓᵢ + Σ_{i<j} pᵢⱼℓᵢℓⱼ` on `Z₂ⁿ`.
///
/// `polar[i]` only carries bits `j > i`; the full polar matrix is symmetric
/// with zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    dim: usize,
    diag: u32,
    polar: Vec<u32>,
}

impl QuadForm {
    pub fn zero(dim: usize) -> Self {
        Self { dim, diag: 0, polar: vec![0; dim] }
    }

    /// Builds a form from its diagonal bits and strictly-upper polar rows.
    pub fn new(dim: usize, diag: u32, polar_upper: Vec<u32>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::InvalidForm(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        if polar_upper.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: polar_upper.len() });
        }
        if dim < 32 && diag >> dim != 0 {
            return Err(Error::InvalidForm("diagonal has bits beyond the dimension".into()));
        }
        for (i, &row) in polar_upper.iter().enumerate() {
            let allowed = if i + 1 >= dim { 0 } else { ((1u32 << dim) - 1) & !((1u32 << (i + 1)) - 1) };
            if row & !allowed != 0 {
                return Err(Error::InvalidForm(format!(
                    "polar row {} is not strictly upper triangular",
                    i + 1
                )));
            }
        }
        Ok(Self { dim, diag, polar: polar_upper })
    }

    /// Builds a form from coordinate lists: `diag[i] = cᵢ`, `polar[i][j] = pᵢⱼ`
    /// (an `n×n` matrix that must vanish on and below the diagonal).
    pub fn from_bits(diag: &[u8], polar_upper: &[Vec<u8>]) -> Result<Self> {
        let dim = diag.len();
        let d = BitVec::from_coords(diag)?.bits;
        if polar_upper.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: polar_upper.len() });
        }
        let mut rows = Vec::with_capacity(dim);
        for row in polar_upper {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            rows.push(BitVec::from_coords(row)?.bits);
        }
        Self::new(dim, d, rows)
    }

    /// Parses a polynomial such as `l3 + l1l2` or `l2*l3`. Squares reduce to
    /// the linear term since `ℓ² = ℓ` over Z₂.
    pub fn parse(dim: usize, text: &str) -> Result<Self> {
        let mut form = Self::zero(dim);
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() || cleaned == "0" {
            return Ok(form);
        }
        for term in cleaned.split('+') {
            let mut vars = Vec::new();
            for factor in term.split(['*', 'l']).filter(|s| !s.is_empty()) {
                let idx: usize = factor
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad factor '{factor}' in '{text}'")))?;
                if idx == 0 || idx > dim {
                    return Err(Error::Parse(format!("variable l{idx} outside dimension {dim}")));
                }
                vars.push(idx - 1);
            }
            vars.sort_unstable();
            vars.dedup();
            match vars.as_slice() {
                [i] => form.diag ^= 1 << i,
                [i, j] => form.polar[*i] ^= 1 << j,
                _ => return Err(Error::Parse(format!("term '{term}' is not quadratic"))),
            }
        }
        Ok(form)
    }

    /// Builds the quadratic form whose values are given by `f`; `f` must be a
    /// quadratic function on `Z₂ⁿ` (for example a form composed with a linear map).
    pub fn from_values(dim: usize, f: impl Fn(u32) -> u8) -> Self {
        let mut form = Self::zero(dim);
        for i in 0..dim {
            if f(1 << i) & 1 == 1 {
                form.diag |= 1 << i;
            }
        }
        for i in 0..dim {
            for j in i + 1..dim {
                let p = f((1 << i) | (1 << j)) ^ f(1 << i) ^ f(1 << j);
                if p & 1 == 1 {
                    form.polar[i] |= 1 << j;
                }
            }
        }
        form
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diag_bits(&self) -> Vec<u8> {
        (0..self.dim).map(|i| ((self.diag >> i) & 1) as u8).collect()
    }

    /// Strictly upper-triangular polar matrix as `n×n` bits.
    pub fn polar_upper_bits(&self) -> Vec<Vec<u8>> {
        self.polar
            .iter()
            .map(|&r| (0..self.dim).map(|j| ((r >> j) & 1) as u8).collect())
            .collect()
    }

    /// Value at a raw bitmask (no dimension check).
    #[inline]
    pub fn at(&self, v: u32) -> u8 {
        let mut acc = parity(self.diag & v);
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            acc ^= parity(self.polar[i] & v);
            rest &= rest - 1;
        }
        acc
    }

    pub fn eval(&self, v: &BitVec) -> Result<u8> {
        if v.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.dim });
        }
        Ok(self.at(v.bits))
    }

    /// Row `i` of the symmetric polar matrix.
    pub(crate) fn polar_row(&self, i: usize) -> u32 {
        let mut row = self.polar[i];
        for k in 0..i {
            if (self.polar[k] >> i) & 1 == 1 {
                row |= 1 << k;
            }
        }
        row
    }

    #[inline]
    pub fn polar_at(&self, u: u32, v: u32) -> u8 {
        self.at(u ^ v) ^ self.at(u) ^ self.at(v)
    }

    pub fn polar(&self) -> BilForm {
        BilForm { dim: self.dim, rows: (0..self.dim).map(|i| self.polar_row(i)).collect() }
    }

    /// `true` iff `κ_p(v, ·) = 0`.
    pub fn in_polar_radical(&self, v: u32) -> bool {
        (0..self.dim).all(|i| self.polar_at(v, 1 << i) == 0)
    }

    pub fn in_radical(&self, v: u32) -> bool {
        self.at(v) == 0 && self.in_polar_radical(v)
    }

    fn all_vectors(&self) -> impl Iterator<Item = u32> {
        0..(1u32 << self.dim)
    }

    /// `{v : κ(v) = 0, κ_p(v, ·) = 0}`, sorted.
    pub fn radical(&self) -> Vec<u32> {
        self.all_vectors().filter(|&v| self.in_radical(v)).collect()
    }

    /// `{v : κ(v) = 0}`, sorted.
    pub fn iso_set(&self) -> Vec<u32> {
        self.all_vectors().filter(|&v| self.at(v) == 0).collect()
    }

    /// Cheap isometry invariants: `(dim rad κ, |iso κ|)`.
    pub fn signature(&self) -> (usize, usize) {
        let rad = self.radical().len();
        (rad.trailing_zeros() as usize, self.iso_set().len())
    }

    /// Deterministic compatible bilinear form that vanishes against the
    /// radical.
    ///
    /// The radical is complemented by the first standard basis vectors
    /// independent of it; on that complement the form is the strictly upper
    /// part of the polar form, and it is zero whenever an argument lies in the
    /// radical.
    pub fn compatible_bilinear(&self) -> BilForm {
        let n = self.dim;
        let radical_basis = echelon_basis(&self.radical());
        let mut spanning = radical_basis.clone();
        let mut complement = Vec::new();
        for i in 0..n {
            let e = 1u32 << i;
            if !in_span(&spanning, e) {
                spanning = echelon_basis(&[spanning.as_slice(), &[e]].concat());
                complement.push(e);
            }
        }
        // Coordinates of each standard vector in the basis (complement ++ radical).
        let mut basis = complement.clone();
        basis.extend(radical_basis.iter().copied());
        let coords: Vec<u32> = (0..n).map(|i| solve_coordinates(&basis, 1 << i)).collect();
        let k = complement.len();
        let mut rows = vec![0u32; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..n {
                let mut acc = 0u8;
                for a in 0..k {
                    if (coords[i] >> a) & 1 == 0 {
                        continue;
                    }
                    for c in a + 1..k {
                        if (coords[j] >> c) & 1 == 1 {
                            acc ^= self.polar_at(complement[a], complement[c]);
                        }
                    }
                }
                if acc == 1 {
                    *row |= 1 << j;
                }
            }
        }
        BilForm { dim: n, rows }
    }

    /// `κ ∘ g`.
    pub fn pullback(&self, g: &BitMatrix) -> QuadForm {
        QuadForm::from_values(self.dim, |v| self.at(g.apply(v)))
    }

    /// Key realising the lexicographic order on the bit sequence
    /// `(c₁, …, cₙ, p₁₂, p₁₃, …, p_{n-1,n})`.
    pub fn sort_key(&self) -> u64 {
        let mut key = 0u64;
        for i in 0..self.dim {
            key = (key << 1) | ((self.diag >> i) & 1) as u64;
        }
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                key = (key << 1) | ((self.polar[i] >> j) & 1) as u64;
            }
        }
        key
    }

    fn from_sort_key(dim: usize, key: u64) -> Self {
        let mut form = Self::zero(dim);
        let pairs = dim * dim.saturating_sub(1) / 2;
        let total = dim + pairs;
        let mut pos = total;
        let mut next = || {
            pos -= 1;
            ((key >> pos) & 1) as u32
        };
        for i in 0..dim {
            form.diag |= next() << i;
        }
        for i in 0..dim {
            for j in i + 1..dim {
                form.polar[i] |= next() << j;
            }
        }
        form
    }

    pub fn to_polynomial(&self) -> String {
        let mut terms = Vec::new();
        for i in 0..self.dim {
            if (self.diag >> i) & 1 == 1 {
                terms.push(format!("l{}", i + 1));
            }
        }
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if (self.polar[i] >> j) & 1 == 1 {
                    terms.push(format!("l{}l{}", i + 1, j + 1));
                }
            }
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_polynomial())
    }
}

/// An `n×n` matrix over Z₂ for `n ≤ ENUM_MAX_DIM`, stored by columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    dim: u8,
    cols: [u8; ENUM_MAX_DIM],
}

impl BitMatrix {
    pub fn identity(dim: usize) -> Self {
        assert!(dim <= ENUM_MAX_DIM);
        let mut cols = [0u8; ENUM_MAX_DIM];
        for (j, c) in cols.iter_mut().enumerate().take(dim) {
            *c = 1 << j;
        }
        Self { dim: dim as u8, cols }
    }

    pub fn from_columns(columns: &[u32]) -> Result<Self> {
        let dim = columns.len();
        if dim > ENUM_MAX_DIM {
            return Err(Error::EnumerationBound(format!("matrix dimension {dim} > {ENUM_MAX_DIM}")));
        }
        let mut cols = [0u8; ENUM_MAX_DIM];
        for (j, &c) in columns.iter().enumerate() {
            if c >> dim != 0 {
                return Err(Error::DimensionMismatch { expected: dim, got: 32 - c.leading_zeros() as usize });
            }
            cols[j] = c as u8;
        }
        Ok(Self { dim: dim as u8, cols })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn column(&self, j: usize) -> u32 {
        self.cols[j] as u32
    }

    pub fn columns(&self) -> Vec<u32> {
        (0..self.dim()).map(|j| self.column(j)).collect()
    }

    /// Row-major bit matrix.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| (self.cols[j] >> i) & 1).collect())
            .collect()
    }

    #[inline]
    pub fn apply(&self, v: u32) -> u32 {
        let mut out = 0u32;
        let mut rest = v;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            out ^= self.cols[j] as u32;
            rest &= rest - 1;
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BitMatrix) -> BitMatrix {
        let mut cols = [0u8; ENUM_MAX_DIM];
        for (j, c) in cols.iter_mut().enumerate().take(self.dim()) {
            *c = self.apply(other.column(j)) as u8;
        }
        BitMatrix { dim: self.dim, cols }
    }

    pub fn is_invertible(&self) -> bool {
        echelon_basis(&self.columns()).len() == self.dim()
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        if !self.is_invertible() {
            return None;
        }
        let cols = self.columns();
        let inv: Vec<u32> = (0..self.dim()).map(|i| solve_coordinates(&cols, 1 << i)).collect();
        BitMatrix::from_columns(&inv).ok()
    }

    pub fn image_of_set(&self, set: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = set.iter().map(|&v| self.apply(v)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Reduced echelon basis of the span of `vectors` (pivot = lowest set bit).
pub fn echelon_basis(vectors: &[u32]) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for &v in vectors {
        let mut w = v;
        for &b in &basis {
            if w & (b & b.wrapping_neg()) != 0 {
                w ^= b;
            }
        }
        if w != 0 {
            let pivot = w & w.wrapping_neg();
            for b in basis.iter_mut() {
                if *b & pivot != 0 {
                    *b ^= w;
                }
            }
            basis.push(w);
        }
    }
    basis.sort_unstable_by_key(|b| b.trailing_zeros());
    basis
}

pub fn in_span(basis: &[u32], v: u32) -> bool {
    let reduced = echelon_basis(basis);
    let mut w = v;
    for &b in &reduced {
        if w & (b & b.wrapping_neg()) != 0 {
            w ^= b;
        }
    }
    w == 0
}

/// All vectors of the span of `vectors`, sorted.
pub fn span_set(vectors: &[u32]) -> Vec<u32> {
    let mut set = vec![0u32];
    for b in echelon_basis(vectors) {
        let extra: Vec<u32> = set.iter().map(|&s| s ^ b).collect();
        set.extend(extra);
    }
    set.sort_unstable();
    set
}

/// Coordinates (as a bitmask over indices of `basis`) of `v` in a linearly
/// independent list `basis`; `v` must lie in the span.
pub(crate) fn solve_coordinates(basis: &[u32], v: u32) -> u32 {
    // Gaussian elimination tracking combinations.
    let mut rows: Vec<(u32, u32)> = basis.iter().enumerate().map(|(k, &b)| (b, 1u32 << k)).collect();
    let mut pivots: Vec<(u32, u32)> = Vec::new();
    for (mut vec, mut combo) in rows.drain(..) {
        for &(p, pc) in &pivots {
            if vec & (p & p.wrapping_neg()) != 0 {
                vec ^= p;
                combo ^= pc;
            }
        }
        if vec != 0 {
            let low = vec & vec.wrapping_neg();
            for (p, pc) in pivots.iter_mut() {
                if *p & low != 0 {
                    *p ^= vec;
                    *pc ^= combo;
                }
            }
            pivots.push((vec, combo));
        }
    }
    let mut w = v;
    let mut combo = 0u32;
    for &(p, pc) in &pivots {
        if w & (p & p.wrapping_neg()) != 0 {
            w ^= p;
            combo ^= pc;
        }
    }
    debug_assert_eq!(w, 0, "vector not in span");
    combo
}

fn require_enum_dim(dim: usize) -> Result<()> {
    if dim > ENUM_MAX_DIM {
        return Err(Error::EnumerationBound(format!(
            "dimension {dim} exceeds the enumeration bound {ENUM_MAX_DIM}"
        )));
    }
    Ok(())
}

/// Backtracking enumeration of all `g ∈ GL(n,2)` with `dst ∘ g = src`, in
/// lexicographic order of the column sequence. `prune(cols)` is consulted
/// after each column is fixed and may reject the partial assignment.
fn search_isometries(
    src: &QuadForm,
    dst: &QuadForm,
    prune: &dyn Fn(&[u32]) -> bool,
    visit: &mut dyn FnMut(BitMatrix) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = src.dim;
    let mut cols = Vec::with_capacity(n);
    // `span` is the set of vectors spanned so far, as a bitset over Z₂ⁿ.
    fn rec(
        src: &QuadForm,
        dst: &QuadForm,
        cols: &mut Vec<u32>,
        span: u64,
        prune: &dyn Fn(&[u32]) -> bool,
        visit: &mut dyn FnMut(BitMatrix) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let n = src.dim;
        let i = cols.len();
        if i == n {
            return visit(BitMatrix::from_columns(cols).expect("dimension checked"));
        }
        let target = src.at(1 << i);
        for c in 1..(1u32 << n) {
            if (span >> c) & 1 == 1 || dst.at(c) != target {
                continue;
            }
            if cols
                .iter()
                .enumerate()
                .any(|(j, &cj)| dst.polar_at(c, cj) != src.polar_at(1 << i, 1 << j))
            {
                continue;
            }
            cols.push(c);
            if prune(cols) {
                let mut next = span;
                for s in 0..(1u32 << n) {
                    if (span >> s) & 1 == 1 {
                        next |= 1u64 << (s ^ c);
                    }
                }
                rec(src, dst, cols, next, prune, visit)?;
            }
            cols.pop();
        }
        ControlFlow::Continue(())
    }
    rec(src, dst, &mut cols, 1, prune, visit)
}

/// All isometries of `κ` (all `g ∈ GL(n,2)` with `κ ∘ g = κ`), in a fixed
/// lexicographic order of their columns.
pub fn orthogonal_group(kappa: &QuadForm) -> Result<Vec<BitMatrix>> {
    require_enum_dim(kappa.dim)?;
    let mut out = Vec::new();
    let _ = search_isometries(kappa, kappa, &|_| true, &mut |g| {
        out.push(g);
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// `GL(n,2)` in the same order as [`orthogonal_group`] of the zero form.
pub fn general_linear_group(dim: usize) -> Result<Vec<BitMatrix>> {
    orthogonal_group(&QuadForm::zero(dim))
}

fn normalize_subset(set: &[u32]) -> Vec<u32> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// One representative per `O(κ)`-orbit on subsets of `iso(κ)` containing 0.
///
/// Each representative is the lexicographically minimal sorted list in its
/// orbit; the output is sorted.
pub fn pointed_orbits(kappa: &QuadForm) -> Result<Vec<Vec<u32>>> {
    require_enum_dim(kappa.dim)?;
    let iso = kappa.iso_set();
    let nonzero: Vec<u32> = iso.iter().copied().filter(|&v| v != 0).collect();
    let k = nonzero.len();
    if k > ORBIT_MAX_NONZERO_ISO {
        return Err(Error::EnumerationBound(format!(
            "{k} nonzero isotropic vectors exceed the orbit bound {ORBIT_MAX_NONZERO_ISO}"
        )));
    }
    let mut index_of = vec![usize::MAX; 1 << kappa.dim];
    for (idx, &v) in nonzero.iter().enumerate() {
        index_of[v as usize] = idx;
    }
    let group = orthogonal_group(kappa)?;
    let perms: Vec<Vec<usize>> = group
        .iter()
        .map(|g| nonzero.iter().map(|&v| index_of[g.apply(v) as usize]).collect())
        .collect();
    let to_list = |mask: u32| -> Vec<u32> {
        let mut list = vec![0u32];
        list.extend((0..k).filter(|&b| (mask >> b) & 1 == 1).map(|b| nonzero[b]));
        list
    };
    let total = 1usize << k;
    let mut seen = vec![false; total];
    let mut reps = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let mut best: Option<Vec<u32>> = None;
        for perm in &perms {
            let mut image = 0u32;
            for (b, &target) in perm.iter().enumerate() {
                if (start >> b) & 1 == 1 {
                    image |= 1 << target;
                }
            }
            if !seen[image as usize] {
                seen[image as usize] = true;
                let list = to_list(image);
                if best.as_ref().is_none_or(|b| list < *b) {
                    best = Some(list);
                }
            }
        }
        reps.push(best.expect("identity maps the start subset to itself"));
    }
    reps.sort();
    Ok(reps)
}

/// Minimal image of a pointed subset under a group of isometries.
pub fn canonical_subset(group: &[BitMatrix], set: &[u32]) -> Vec<u32> {
    let base = normalize_subset(set);
    group
        .iter()
        .map(|g| g.image_of_set(&base))
        .min()
        .unwrap_or(base)
}

/// One representative per isometry class of quadratic forms on `Z₂ⁿ`.
///
/// Representatives are minimal for the lexicographic order of
/// `(c₁…cₙ, p₁₂…p_{n-1,n})`. The output is ordered by radical dimension
/// descending, then `|iso|` ascending, then the key. For `n = 3` the
/// classes come out in the order `0, ℓ₃, ℓ₂+ℓ₃+ℓ₂ℓ₃, ℓ₂ℓ₃, ℓ₁ℓ₂+ℓ₁ℓ₃+ℓ₂ℓ₃`,
/// the last being isometric to `ℓ₃+ℓ₁ℓ₂`.
pub fn isometry_classes(dim: usize) -> Result<Vec<QuadForm>> {
    if dim > CLASSIFY_MAX_DIM {
        return Err(Error::EnumerationBound(format!(
            "classification is brute force for n <= {CLASSIFY_MAX_DIM}, got {dim}"
        )));
    }
    let gl = general_linear_group(dim)?;
    let bits = dim + dim * dim.saturating_sub(1) / 2;
    let total = 1usize << bits;
    let mut seen = vec![false; total];
    let mut reps = Vec::new();
    for key in 0..total {
        if seen[key] {
            continue;
        }
        let rep = QuadForm::from_sort_key(dim, key as u64);
        let mut orbit = BTreeSet::new();
        for g in &gl {
            orbit.insert(rep.pullback(g).sort_key());
        }
        for k in orbit {
            seen[k as usize] = true;
        }
        reps.push(rep);
    }
    reps.sort_by_key(|q| {
        let (rad, iso) = q.signature();
        (std::cmp::Reverse(rad), iso, q.sort_key())
    });
    Ok(reps)
}

/// Finds `g` with `κ′ ∘ g = κ` and `g(M̃) = M̃′`, if one exists.
pub fn find_isometry(
    kappa: &QuadForm,
    kappa2: &QuadForm,
    subset: &[u32],
    subset2: &[u32],
) -> Result<Option<BitMatrix>> {
    if kappa.dim != kappa2.dim {
        return Err(Error::DimensionMismatch { expected: kappa.dim, got: kappa2.dim });
    }
    require_enum_dim(kappa.dim)?;
    let m1 = normalize_subset(subset);
    let m2 = normalize_subset(subset2);
    if m1.len() != m2.len() || kappa.signature() != kappa2.signature() {
        return Ok(None);
    }
    let in_m2 = |v: u32| m2.binary_search(&v).is_ok();
    let prune = |cols: &[u32]| {
        let fixed = (1u32 << cols.len()) - 1;
        m1.iter().filter(|&&v| v & !fixed == 0).all(|&v| {
            let mut image = 0;
            for (j, &c) in cols.iter().enumerate() {
                if (v >> j) & 1 == 1 {
                    image ^= c;
                }
            }
            in_m2(image)
        })
    };
    let mut found = None;
    let _ = search_isometries(kappa, kappa2, &prune, &mut |g| {
        found = Some(g);
        ControlFlow::Break(())
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: usize, s: &str) -> QuadForm {
        QuadForm::parse(n, s).unwrap()
    }

    fn brute_radical(k: &QuadForm) -> Vec<u32> {
        let n = k.dim();
        (0..1u32 << n)
            .filter(|&v| {
                k.at(v) == 0 && (0..1u32 << n).all(|u| (k.at(u ^ v) ^ k.at(u) ^ k.at(v)) == 0)
            })
            .collect()
    }

    #[test]
    fn evaluates_table_rows() {
        let k = q(3, "l3 + l1l2");
        assert_eq!(k.eval(&BitVec::from_coords(&[1, 1, 0]).unwrap()).unwrap(), 1);
        assert_eq!(k.at(0), 0);
        let k = q(3, "l2l3");
        assert_eq!(k.eval(&BitVec::from_coords(&[0, 1, 1]).unwrap()).unwrap(), 1);
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        let k = q(3, "l3");
        let v = BitVec::from_coords(&[1, 0]).unwrap();
        assert!(matches!(k.eval(&v), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn polar_and_compatible_forms_match_table() {
        let k = q(3, "l3 + l1l2");
        assert_eq!(k.polar().to_polynomial(), "l1l'2 + l2l'1");
        assert_eq!(k.compatible_bilinear().to_polynomial(), "l1l'2");
        assert_eq!(q(3, "l3").polar(), BilForm::zero(3));
        assert_eq!(QuadForm::zero(3).compatible_bilinear(), BilForm::zero(3));
        assert_eq!(q(3, "l2l3").compatible_bilinear().to_polynomial(), "l2l'3");
        assert_eq!(q(3, "l2 + l3 + l2l3").compatible_bilinear().to_polynomial(), "l2l'3");
    }

    #[test]
    fn radical_and_isotropic_sets() {
        assert_eq!(q(3, "l3 + l1l2").radical(), vec![0]);
        assert_eq!(QuadForm::zero(3).radical().len(), 8);
        assert_eq!(q(3, "l2l3").radical(), vec![0, 0b001]);
        for form in ["l2l3", "l3 + l1l2", "l1 + l2 + l1l3", "0"] {
            let k = q(3, form);
            assert_eq!(k.radical(), brute_radical(&k));
        }
        assert_eq!(q(3, "l3 + l1l2").iso_set(), vec![0, 0b001, 0b010, 0b111]);
        assert_eq!(QuadForm::zero(2).iso_set(), vec![0, 1, 2, 3]);
        let iso = q(3, "l2l3").iso_set();
        assert_eq!(iso.len(), 6);
        assert!(iso.iter().all(|&v| v & 0b110 != 0b110));
    }

    #[test]
    fn parse_and_encode_round_trip() {
        let k = q(4, "l1 + l4 + l1l2 + l3l4");
        assert_eq!(k.to_polynomial(), "l1 + l4 + l1l2 + l3l4");
        let again = QuadForm::from_bits(&k.diag_bits(), &k.polar_upper_bits()).unwrap();
        assert_eq!(again, k);
        assert_eq!(QuadForm::from_sort_key(4, k.sort_key()), k);
        assert!(QuadForm::parse(2, "l1l2l3").is_err());
        assert!(QuadForm::from_bits(&[0, 0], &[vec![0, 0], vec![1, 0]]).is_err());
    }

    #[test]
    fn small_groups() {
        assert_eq!(orthogonal_group(&QuadForm::zero(1)).unwrap(), vec![BitMatrix::identity(1)]);
        assert_eq!(orthogonal_group(&q(1, "l1")).unwrap().len(), 1);
        assert_eq!(general_linear_group(2).unwrap().len(), 6);
        assert_eq!(general_linear_group(3).unwrap().len(), 168);
        assert_eq!(general_linear_group(4).unwrap().len(), 20160);
        assert!(orthogonal_group(&QuadForm::zero(6)).is_err());
    }

    #[test]
    fn orthogonal_group_matches_brute_force_and_is_a_group() {
        let k = q(3, "l3 + l1l2");
        let group = orthogonal_group(&k).unwrap();
        let brute: Vec<BitMatrix> = general_linear_group(3)
            .unwrap()
            .into_iter()
            .filter(|g| (0..8).all(|v| k.at(g.apply(v)) == k.at(v)))
            .collect();
        assert_eq!(group, brute);
        let set: BTreeSet<BitMatrix> = group.iter().copied().collect();
        assert!(set.contains(&BitMatrix::identity(3)));
        for a in &group {
            assert!(set.contains(&a.inverse().unwrap()));
            for b in &group {
                assert!(set.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn pointed_orbits_examples() {
        let orbits = pointed_orbits(&q(3, "l3 + l1l2")).unwrap();
        assert_eq!(orbits.len(), 4);
        let mut sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
        assert_eq!(
            pointed_orbits(&QuadForm::zero(1)).unwrap(),
            vec![vec![0], vec![0, 1]]
        );
        assert_eq!(pointed_orbits(&q(1, "l1")).unwrap(), vec![vec![0]]);
        for form in ["0", "l3", "l2l3"] {
            assert!(pointed_orbits(&q(3, form)).unwrap().contains(&vec![0]));
        }
    }

    #[test]
    fn orbit_representatives_are_complete_and_minimal() {
        // Brute force for n = 3: every pointed subset maps onto exactly one
        // representative, and no orbit element is smaller than it.
        for form in ["0", "l3", "l2l3", "l2 + l3 + l2l3", "l3 + l1l2"] {
            let k = q(3, form);
            let group = orthogonal_group(&k).unwrap();
            let reps = pointed_orbits(&k).unwrap();
            let nonzero: Vec<u32> = k.iso_set().into_iter().filter(|&v| v != 0).collect();
            for mask in 0u32..(1 << nonzero.len()) {
                let mut subset = vec![0];
                subset.extend((0..nonzero.len()).filter(|b| (mask >> b) & 1 == 1).map(|b| nonzero[b]));
                let hits: Vec<_> = reps
                    .iter()
                    .filter(|r| group.iter().any(|g| g.image_of_set(&subset) == **r))
                    .collect();
                assert_eq!(hits.len(), 1, "{form}: {subset:?}");
                assert!(*hits[0] <= canonical_subset(&group, &subset));
            }
        }
    }

    #[test]
    fn classification_counts() {
        let one = isometry_classes(1).unwrap();
        assert_eq!(one, vec![QuadForm::zero(1), q(1, "l1")]);
        assert_eq!(isometry_classes(2).unwrap().len(), 4);
        let three: Vec<String> = isometry_classes(3).unwrap().iter().map(|k| k.to_polynomial()).collect();
        assert_eq!(three, vec!["0", "l3", "l2 + l3 + l2l3", "l2l3", "l1l2 + l1l3 + l2l3"]);
        let reps = isometry_classes(3).unwrap();
        for (rep, row) in reps.iter().zip(["0", "l3", "l2 + l3 + l2l3", "l2l3", "l3 + l1l2"]) {
            assert!(find_isometry(rep, &q(3, row), &[0], &[0]).unwrap().is_some(), "{row}");
        }
        assert!(isometry_classes(5).is_err());
    }

    #[test]
    fn find_isometry_examples() {
        let k = q(3, "l3 + l1l2");
        let m = [0, 0b001, 0b010];
        let g = find_isometry(&k, &k, &m, &m).unwrap().unwrap();
        assert_eq!(g.image_of_set(&m), m.to_vec());
        let m2 = [0, 0b001, 0b111];
        let g = find_isometry(&k, &k, &m, &m2).unwrap().unwrap();
        assert_eq!(k.pullback(&g), k);
        assert_eq!(g.image_of_set(&m), m2.to_vec());
        assert!(find_isometry(&QuadForm::zero(3), &q(3, "l3"), &[0], &[0]).unwrap().is_none());
    }

    #[test]
    fn find_isometry_maps_kappa_to_target() {
        // κ′ ∘ g = κ with κ′ a different-looking member of the same class.
        let k = q(3, "l2l3");
        let k2 = q(3, "l1l2");
        let g = find_isometry(&k, &k2, &[0], &[0]).unwrap().unwrap();
        assert_eq!(k2.pullback(&g), k);
    }
}

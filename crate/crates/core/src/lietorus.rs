//! Windowed verification of the Lie torus axioms and support lemmas for
//! `S`, the centre and centroid checks, and the combinatorial
//! bi-isomorphism invariants.
//!
//! A [`Window`] of size `w` is the set of degrees whose doubled coordinates
//! all have absolute value at most `w`. Every check is exact on the slice of
//! `S` spanned by the homogeneous spaces with external degree in the window.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bitquad::{self, find_isometry, isometry_classes, orthogonal_group, BitMatrix};
use crate::error::{Error, Result};
use crate::hermitian::{HalfDeg, HermitianData};
use crate::linalg::{coordinates, Echelon, SparseVec};
use crate::rational::Q;
use crate::roots::{self, RootLength};
use crate::unitary::{BiDegree, Mat, MatKey, Unitary};

/// Degrees with all doubled coordinates in `[-w, w]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub w: i64,
}

impl Window {
    pub const DEFAULT: Window = Window { w: 2 };

    pub fn new(w: i64) -> Self {
        Self { w: w.max(0) }
    }

    pub fn contains(&self, d: &HalfDeg) -> bool {
        d.max_abs() <= self.w
    }

    pub fn scaled(&self, k: i64) -> Window {
        Window { w: self.w * k }
    }

    /// All degrees in the window, in lexicographic order.
    pub fn degrees(&self, n: usize) -> Vec<HalfDeg> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * (2 * self.w as usize + 1));
            for prefix in &out {
                for x in -self.w..=self.w {
                    let mut v: Vec<i64> = prefix.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(|v| HalfDeg::from_doubled(&v)).collect()
    }
}

/// The nonzero homogeneous spaces of `S` with external degree in a window.
#[derive(Clone, Debug)]
pub struct Slice {
    pub window: Window,
    pub cells: BTreeMap<BiDegree, Vec<Mat>>,
}

impl Slice {
    /// Bases of `S_μ^σ` for `μ ∈ BC_r ∪ {0}` and `σ` in the window.
    pub fn build(u: &Unitary, window: Window) -> Self {
        Self::build_for_roots(u, window, &roots_and_zero(u.r()))
    }

    pub fn build_for_roots(u: &Unitary, window: Window, roots: &[Vec<i64>]) -> Self {
        let mut cells = BTreeMap::new();
        for sigma in window.degrees(u.n()) {
            for mu in roots {
                let basis = u.homogeneous_basis(mu, &sigma);
                if !basis.is_empty() {
                    cells.insert(BiDegree { root: mu.clone(), ext: sigma.clone() }, basis);
                }
            }
        }
        Self { window, cells }
    }

    pub fn get(&self, root: &[i64], ext: &HalfDeg) -> Option<&Vec<Mat>> {
        self.cells.get(&BiDegree { root: root.to_vec(), ext: ext.clone() })
    }

    pub fn dim(&self, root: &[i64], ext: &HalfDeg) -> usize {
        self.get(root, ext).map_or(0, Vec::len)
    }

    /// `Γ_μ ∩ W`.
    pub fn support(&self, root: &[i64]) -> BTreeSet<HalfDeg> {
        self.cells.keys().filter(|d| d.root == root).map(|d| d.ext.clone()).collect()
    }

    pub fn root_support(&self) -> BTreeSet<Vec<i64>> {
        self.cells.keys().map(|d| d.root.clone()).collect()
    }

    pub fn basis_len(&self) -> usize {
        self.cells.values().map(Vec::len).sum()
    }
}

fn roots_and_zero(r: usize) -> Vec<Vec<i64>> {
    let mut all = roots::all_roots(r);
    all.push(vec![0; r]);
    all
}

fn short_roots(r: usize) -> Vec<Vec<i64>> {
    roots::all_roots(r).into_iter().filter(|m| roots::length(m) == Some(RootLength::Short)).collect()
}

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<Value>,
}

const MAX_WITNESSES: usize = 8;

impl CheckResult {
    fn new(name: &str) -> Self {
        Self { name: name.into(), passed: true, checked: 0, failures: Vec::new() }
    }

    fn tick(&mut self) {
        self.checked += 1;
    }

    fn fail(&mut self, witness: Value) {
        self.passed = false;
        if self.failures.len() < MAX_WITNESSES {
            self.failures.push(witness);
        }
    }

    fn expect(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.tick();
        if !ok {
            self.fail(witness());
        }
    }
}

fn witness(deg: &BiDegree, m: Option<&Mat>, note: &str) -> Value {
    json!({
        "root": deg.root,
        "ext": deg.ext.doubled(),
        "matrix": m.map(Mat::to_json),
        "note": note,
    })
}

/// Report of a batch of checks.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub window: i64,
    pub checks: Vec<CheckResult>,
    /// `supp_Q(S)` restricted to the window.
    pub root_support: Vec<Vec<i64>>,
    /// `supp_Q(S) ∩ W = B_r ∪ {0}`: the slice has no `±2εᵢ` spaces.
    pub type_b: bool,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Integer row-echelon basis of the lattice spanned by `gens`.
pub fn hermite_basis(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(n) = gens.first().map(Vec::len) else { return Vec::new() };
    let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).collect();
    let mut basis = Vec::new();
    for col in 0..n {
        loop {
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&p) = nz.first() {
                    let mut row = rows.swap_remove(p);
                    if row[col] < 0 {
                        row.iter_mut().for_each(|x| *x = -*x);
                    }
                    basis.push(row);
                }
                break;
            }
            nz.sort_by_key(|&i| rows[i][col].abs());
            let p = nz[0];
            let pivot = rows[p].clone();
            for &i in &nz[1..] {
                let q = rows[i][col] / pivot[col];
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x -= q * y;
                }
            }
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    basis.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect()
}

/// Membership of `v` in the lattice with echelon basis `basis`.
pub fn lattice_contains(basis: &[Vec<i64>], v: &[i64]) -> bool {
    let mut rest: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for row in basis {
        let col = row.iter().position(|&x| x != 0).expect("basis rows are nonzero");
        if rest[..col].iter().any(|&x| x != 0) {
            return false;
        }
        let p = row[col] as i128;
        if rest[col] % p != 0 {
            return false;
        }
        let q = rest[col] / p;
        for (x, y) in rest.iter_mut().zip(row) {
            *x -= q * (*y as i128);
        }
    }
    rest.iter().all(|&x| x == 0)
}

/// Whether the degrees generate `Γ = ⟨½M⟩`: the lattice they span must
/// contain `Λ` and reduce mod `Λ` onto `span M̃`.
pub fn generates_gamma(data: &HermitianData, degs: &[HalfDeg]) -> bool {
    let n = data.n();
    let masks: Vec<u32> = degs.iter().map(HalfDeg::mask).collect();
    let spans_m = bitquad::span_set(&masks) == bitquad::span_set(data.subset());
    let gens: Vec<Vec<i64>> = degs.iter().map(|d| d.doubled().to_vec()).collect();
    let basis = hermite_basis(&gens);
    let contains_lambda = (0..n).all(|i| {
        let mut v = vec![0; n];
        v[i] = 2;
        lattice_contains(&basis, &v)
    });
    spans_m && contains_lambda && degs.iter().all(|d| data.in_gamma(d))
}

/// Checks LT1–LT4 on the windowed slice.
pub fn check_lt_axioms(u: &Unitary, window: Window) -> Report {
    let slice = Slice::build(u, window);
    check_lt_axioms_on(u, &slice)
}

pub fn check_lt_axioms_on(u: &Unitary, slice: &Slice) -> Report {
    let r = u.r();
    let zero_root = vec![0; r];
    let zero_ext = HalfDeg::zero(u.n());

    let mut lt1 = CheckResult::new("LT1");
    for (deg, basis) in &slice.cells {
        for m in basis {
            let parts = u.decompose(m);
            let ok = u.in_s(m)
                && parts.len() == 1
                && parts.keys().all(|d| d == deg && (d.root == zero_root || roots::is_root(&d.root)));
            lt1.expect(ok, || witness(deg, Some(m), "not a homogeneous element of S of this degree"));
        }
    }

    let mut lt2i = CheckResult::new("LT2(i)");
    for mu in roots::all_roots(r).into_iter().filter(|m| roots::is_indivisible(m)) {
        let deg = BiDegree { root: mu.clone(), ext: zero_ext.clone() };
        lt2i.expect(slice.dim(&mu, &zero_ext) > 0, || witness(&deg, None, "zero root space in degree 0"));
    }

    let mut lt2ii = CheckResult::new("LT2(ii)");
    let mut coroot_checked: BTreeSet<Vec<i64>> = BTreeSet::new();
    for (deg, basis) in &slice.cells {
        if deg.root == zero_root {
            continue;
        }
        if basis.len() != 1 {
            lt2ii.expect(false, || witness(deg, None, &format!("dimension {}", basis.len())));
            continue;
        }
        let pair = match u.sl2_pair(&deg.root, &deg.ext) {
            Ok(p) => p,
            Err(e) => {
                lt2ii.expect(false, || witness(deg, Some(&basis[0]), &e.to_string()));
                continue;
            }
        };
        let neg = BiDegree { root: roots::neg(&deg.root), ext: -&deg.ext };
        let homogeneous = u.degree_of(&pair.e).as_ref() == Some(deg) && u.degree_of(&pair.f).as_ref() == Some(&neg);
        lt2ii.expect(homogeneous, || witness(deg, Some(&pair.e), "sl2 pair is not homogeneous"));
        // [e, f] = μ^∨ for every σ, so the adjoint check only depends on μ.
        if coroot_checked.insert(deg.root.clone()) {
            for (xdeg, xs) in &slice.cells {
                let k = roots::pairing(&xdeg.root, &deg.root);
                for x in xs {
                    let ok = u.bracket(&pair.h, x) == x.scale(&Q::from_integer(k.into()));
                    lt2ii.expect(ok, || witness(xdeg, Some(x), &format!("ad coroot of {:?}", deg.root)));
                }
            }
        }
    }

    let lt3 = check_generation(u, slice);

    let mut lt4 = CheckResult::new("LT4");
    let supports: Vec<HalfDeg> = slice.cells.keys().map(|d| d.ext.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    lt4.expect(generates_gamma(u.data(), &supports), || json!({"note": "windowed support does not generate Γ"}));

    let root_support: Vec<Vec<i64>> = slice.root_support().into_iter().collect();
    let type_b = root_support.iter().all(|m| m == &zero_root || roots::is_indivisible(m));
    Report { window: slice.window.w, checks: vec![lt1, lt2i, lt2ii, lt3, lt4], root_support, type_b }
}

/// Every windowed basis element lies in the span of one-level brackets of
/// short root spaces with degrees in the doubled window. Short root spaces
/// are generators themselves.
fn check_generation(u: &Unitary, slice: &Slice) -> CheckResult {
    let r = u.r();
    let mut lt3 = CheckResult::new("LT3");
    let wide = slice.window.scaled(2);
    let shorts = short_roots(r);
    let gen = Slice::build_for_roots(u, wide, &shorts);
    let gen_cells: Vec<(&BiDegree, &Mat)> = gen.cells.iter().map(|(d, b)| (d, &b[0])).collect();
    for (deg, basis) in &slice.cells {
        if roots::length(&deg.root) == Some(RootLength::Short) {
            lt3.checked += basis.len();
            continue;
        }
        let mut span: Echelon<MatKey> = Echelon::new();
        let mut pending: Vec<SparseVec<MatKey>> = basis.iter().map(Mat::to_sparse).collect();
        'outer: for (d1, x1) in &gen_cells {
            let root2 = roots::add(&deg.root, &roots::neg(&d1.root));
            if roots::length(&root2) != Some(RootLength::Short) {
                continue;
            }
            let ext2 = &deg.ext - &d1.ext;
            if !wide.contains(&ext2) {
                continue;
            }
            if let Some(b2) = gen.get(&root2, &ext2) {
                if span.insert(&u.bracket(x1, &b2[0]).to_sparse()) {
                    pending.retain(|v| !span.contains(v));
                    if pending.is_empty() {
                        break 'outer;
                    }
                }
            }
        }
        lt3.checked += basis.len();
        if !pending.is_empty() {
            lt3.fail(witness(deg, Some(&Mat::from_sparse(u.l(), &pending[0])), "not generated by short root spaces"));
        }
    }
    lt3
}

/// Windowed checks of the support facts for root spaces.
pub fn check_support_lemmas(u: &Unitary, window: Window) -> Report {
    let slice = Slice::build(u, window);
    check_support_lemmas_on(u, &slice)
}

pub fn check_support_lemmas_on(u: &Unitary, slice: &Slice) -> Report {
    let r = u.r();
    let all = roots::all_roots(r);
    let zero_ext = HalfDeg::zero(u.n());

    let mut same_length = CheckResult::new("support depends on length");
    for len in [RootLength::Short, RootLength::Long, RootLength::ExtraLong] {
        let group: Vec<&Vec<i64>> = all.iter().filter(|m| roots::length(m) == Some(len)).collect();
        let first = slice.support(group[0]);
        for mu in &group[1..] {
            same_length.expect(slice.support(mu) == first, || json!({"root": mu, "compared_with": group[0]}));
        }
    }

    let mut symmetric = CheckResult::new("support symmetric and pointed");
    for mu in all.iter().filter(|m| roots::is_indivisible(m)) {
        let supp = slice.support(mu);
        symmetric.expect(supp.contains(&zero_ext), || json!({"root": mu, "note": "0 not in support"}));
        let negated: BTreeSet<HalfDeg> = supp.iter().map(|d| -d).collect();
        symmetric.expect(negated == supp, || json!({"root": mu, "note": "support not symmetric"}));
    }

    let mut generating = CheckResult::new("short support generates");
    for mu in short_roots(r) {
        let supp: Vec<HalfDeg> = slice.support(&mu).into_iter().collect();
        generating.expect(generates_gamma(u.data(), &supp), || json!({"root": mu}));
    }

    let mut brackets = CheckResult::new("bracket of root spaces");
    let cells: Vec<(&BiDegree, &Mat)> =
        slice.cells.iter().filter(|(d, _)| roots::is_root(&d.root)).map(|(d, b)| (d, &b[0])).collect();
    for (d1, x1) in &cells {
        for (d2, x2) in &cells {
            let root = roots::add(&d1.root, &d2.root);
            if !roots::is_root(&root) {
                continue;
            }
            let ext = &d1.ext + &d2.ext;
            if !slice.window.contains(&ext) {
                continue;
            }
            let Some(target) = slice.get(&root, &ext) else { continue };
            let b = u.bracket(x1, x2);
            let ok = !b.is_zero() && coordinates(&[target[0].to_sparse()], &b.to_sparse()).is_some();
            brackets.expect(ok, || {
                json!({"left": witness(d1, Some(x1), ""), "right": witness(d2, Some(x2), ""), "bracket": b.to_json()})
            });
        }
    }

    let root_support: Vec<Vec<i64>> = slice.root_support().into_iter().collect();
    let type_b = root_support.iter().all(|m| m.iter().all(|&x| x == 0) || roots::is_indivisible(m));
    Report {
        window: slice.window.w,
        checks: vec![same_length, symmetric, generating, brackets],
        root_support,
        type_b,
    }
}

/// Dimension of `{T ∈ S₀ ∩ slice : [T, g] = 0 for all windowed root vectors g}`.
pub fn centre_window_check(u: &Unitary, window: Window) -> usize {
    let slice = Slice::build(u, window);
    centre_window_check_on(u, &slice)
}

pub fn centre_window_check_on(u: &Unitary, slice: &Slice) -> usize {
    let zero_root = vec![0; u.r()];
    let generators: Vec<&Mat> =
        slice.cells.iter().filter(|(d, _)| d.root != zero_root).flat_map(|(_, b)| b.iter()).collect();
    let mut nullity = 0;
    for (deg, basis) in &slice.cells {
        if deg.root != zero_root {
            continue;
        }
        let k = basis.len();
        // Column a of the system is ⊕_g [basis[a], g].
        let mut columns: Vec<SparseVec<(usize, MatKey)>> = vec![SparseVec::new(); k];
        let mut rank = 0;
        for (chunk_start, chunk) in generators.chunks(32).enumerate() {
            for (offset, g) in chunk.iter().enumerate() {
                let gi = chunk_start * 32 + offset;
                for (a, b) in basis.iter().enumerate() {
                    for (key, c) in u.bracket(b, g).to_sparse() {
                        columns[a].insert((gi, key), c);
                    }
                }
            }
            let mut ech = Echelon::new();
            rank = columns.iter().filter(|c| ech.insert(c)).count();
            if rank == k {
                break;
            }
        }
        nullity += k - rank;
    }
    nullity
}

/// Per-shift outcome of the centroid oracle.
#[derive(Clone, Debug, Serialize)]
pub struct CentroidShift {
    pub lambda: Vec<i64>,
    pub unknowns: usize,
    pub nullity: usize,
    pub expected: usize,
    pub action_solves: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentroidReport {
    pub window: i64,
    pub shifts: Vec<CentroidShift>,
}

impl CentroidReport {
    pub fn passed(&self) -> bool {
        self.shifts.iter().all(|s| s.nullity == s.expected && s.action_solves)
    }
}

/// Solves for linear maps on the windowed slice that shift degrees by `λ`,
/// preserve root degrees and commute with `ad x` for every windowed short
/// root vector `x`, and compares the solution space with the action of
/// `t^λ ∈ Z(A, −)`.
pub fn centroid_window_oracle(u: &Unitary, window: Window) -> Result<CentroidReport> {
    if u.r() < 3 {
        return Err(Error::WittIndexTooSmall(u.r()));
    }
    let slice = Slice::build(u, window);
    let cell_list: Vec<(&BiDegree, &Vec<Mat>)> = slice.cells.iter().collect();
    let cell_index: HashMap<&BiDegree, usize> = cell_list.iter().enumerate().map(|(i, (d, _))| (*d, i)).collect();
    let sparse_bases: Vec<Vec<SparseVec<MatKey>>> =
        cell_list.iter().map(|(_, b)| b.iter().map(Mat::to_sparse).collect()).collect();

    let generators: Vec<(&BiDegree, &Mat)> = cell_list
        .iter()
        .filter(|(d, _)| roots::length(&d.root) == Some(RootLength::Short))
        .flat_map(|(d, b)| b.iter().map(move |m| (*d, m)))
        .collect();

    // consts[(g, cell, q)] = (target cell, coordinates of [x_g, b_q]).
    let mut consts: HashMap<(usize, usize, usize), Option<(usize, Vec<Q>)>> = HashMap::new();
    let mut structure = |g: usize, cell: usize, q: usize| -> Option<(usize, Vec<Q>)> {
        consts
            .entry((g, cell, q))
            .or_insert_with(|| {
                let (gd, gm) = generators[g];
                let (cd, cb) = cell_list[cell];
                let target = BiDegree { root: roots::add(&gd.root, &cd.root), ext: &gd.ext + &cd.ext };
                let t = *cell_index.get(&target)?;
                let b = u.bracket(gm, &cb[q]);
                let coords = coordinates(&sparse_bases[t], &b.to_sparse()).expect("bracket lies in its homogeneous space");
                Some((t, coords))
            })
            .clone()
    };

    let torus = u.data().torus();
    let mut shifts = Vec::new();
    for lambda in window.degrees(u.n()) {
        if !u.data().in_gamma(&lambda) {
            continue;
        }
        // Unknown blocks: cell c ↦ cell c + λ.
        let mut block_of: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut unknowns = 0usize;
        for (ci, (d, b)) in cell_list.iter().enumerate() {
            let target = BiDegree { root: d.root.clone(), ext: &d.ext + &lambda };
            if let Some(&ti) = cell_index.get(&target) {
                block_of.insert(ci, (ti, unknowns));
                unknowns += b.len() * cell_list[ti].1.len();
            }
        }
        // Variable for χ_c(b_k) coordinate p in the target basis.
        let var = |ci: usize, k: usize, p: usize| -> Option<usize> {
            block_of.get(&ci).map(|&(ti, off)| off + k * cell_list[ti].1.len() + p)
        };

        let mut rows: Vec<SparseVec<usize>> = Vec::new();
        for g in 0..generators.len() {
            for (ci, (_, b)) in cell_list.iter().enumerate() {
                for q in 0..b.len() {
                    // χ([x, y_q]) − [x, χ(y_q)] in cell (root_x + root_c, ext_x + ext_c + λ).
                    // Terms leaving the window are unknown; the equation is
                    // dropped. Zero spaces inside the window force zeros.
                    let (gd, _) = generators[g];
                    let (cd, _) = cell_list[ci];
                    let mid_ext = &gd.ext + &cd.ext;
                    let target_ext = &mid_ext + &lambda;
                    if !window.contains(&mid_ext)
                        || !window.contains(&target_ext)
                        || !window.contains(&(&cd.ext + &lambda))
                    {
                        continue;
                    }
                    let target = BiDegree { root: roots::add(&gd.root, &cd.root), ext: target_ext };
                    let Some(&tc) = cell_index.get(&target) else { continue };
                    let lhs = structure(g, ci, q);
                    let shifted = block_of.get(&ci).copied();
                    let dim_t = cell_list[tc].1.len();
                    let mut eq: Vec<SparseVec<usize>> = vec![SparseVec::new(); dim_t];
                    if let Some((mid, coords)) = &lhs {
                        for (k, c) in coords.iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            for (p, row) in eq.iter_mut().enumerate() {
                                let v = var(*mid, k, p).expect("block exists");
                                *row.entry(v).or_insert_with(Q::zero) += c;
                            }
                        }
                    }
                    if let Some((sc, _)) = shifted {
                        for j in 0..cell_list[sc].1.len() {
                            if let Some((t2, coords)) = structure(g, sc, j) {
                                debug_assert_eq!(t2, tc);
                                let v = var(ci, q, j).expect("block exists");
                                for (p, c) in coords.iter().enumerate() {
                                    if !c.is_zero() {
                                        *eq[p].entry(v).or_insert_with(Q::zero) -= c;
                                    }
                                }
                            }
                        }
                    }
                    for mut row in eq {
                        row.retain(|_, c| !c.is_zero());
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }

        // The expected solution: χ = left multiplication by t^λ.
        let mut action = vec![Q::zero(); unknowns];
        let mut action_ok = true;
        let mut action_nonzero = false;
        let central = lambda.to_lattice().filter(|l| torus.in_gamma_m(l));
        if let Some(lam) = &central {
            let z = crate::torus::TorusElem::t(lam);
            for (&ci, &(ti, _)) in &block_of {
                for (k, b) in cell_list[ci].1.iter().enumerate() {
                    let image = u.centroid_act(&z, b).expect("t^λ is central and symmetric");
                    match coordinates(&sparse_bases[ti], &image.to_sparse()) {
                        Some(c) => {
                            for (p, v) in c.into_iter().enumerate() {
                                if !v.is_zero() {
                                    action_nonzero = true;
                                }
                                action[var(ci, k, p).expect("block exists")] = v;
                            }
                        }
                        None => action_ok = false,
                    }
                }
            }
            action_ok &= rows.iter().all(|row| row.iter().map(|(v, c)| c * &action[*v]).sum::<Q>().is_zero());
        }
        let mut ech: Echelon<usize> = Echelon::new();
        let mut rank = 0;
        for row in &rows {
            if ech.insert(row) {
                rank += 1;
                if rank == unknowns {
                    break;
                }
            }
        }
        shifts.push(CentroidShift {
            lambda: lambda.doubled().to_vec(),
            unknowns,
            nullity: unknowns - rank,
            expected: usize::from(central.is_some() && action_nonzero),
            action_solves: action_ok,
        });
    }
    Ok(CentroidReport { window: window.w, shifts })
}

/// The bi-isomorphism invariants of the torus built from `data`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusInvariants {
    /// Index into `isometry_classes(n)`.
    pub kappa_class: usize,
    pub anisotropic_rank: usize,
    /// Canonical orbit representative of `M̃`, in the coordinates of the
    /// class representative.
    pub orbit_id: Vec<u32>,
}

pub fn invariants(data: &HermitianData) -> Result<TorusInvariants> {
    let kappa = data.torus().kappa();
    let reps = isometry_classes(kappa.dim())?;
    for (idx, rep) in reps.iter().enumerate() {
        if let Some(g) = find_isometry(kappa, rep, &[0], &[0])? {
            let group = orthogonal_group(rep)?;
            let moved = g.image_of_set(data.subset());
            return Ok(TorusInvariants {
                kappa_class: idx,
                anisotropic_rank: data.m(),
                orbit_id: bitquad::canonical_subset(&group, &moved),
            });
        }
    }
    Err(Error::InvalidForm("form matches no class representative".into()))
}

/// Outcome of the bi-isomorphism decision procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub equivalent: bool,
    pub reason: String,
    pub isometry: Option<BitMatrix>,
}

/// Decides whether the two constructions give bi-isomorphic Lie tori, by
/// searching for an isometry of the forms carrying one subset onto the other.
pub fn biisomorphic(d1: &HermitianData, d2: &HermitianData) -> Result<Verdict> {
    if d1.r() != d2.r() {
        return Ok(Verdict { equivalent: false, reason: format!("Witt index {} vs {}", d1.r(), d2.r()), isometry: None });
    }
    if d1.n() != d2.n() {
        return Ok(Verdict { equivalent: false, reason: format!("rank {} vs {}", d1.n(), d2.n()), isometry: None });
    }
    if d1.m() != d2.m() {
        return Ok(Verdict {
            equivalent: false,
            reason: format!("anisotropic rank {} vs {}", d1.m(), d2.m()),
            isometry: None,
        });
    }
    let g = find_isometry(d1.torus().kappa(), d2.torus().kappa(), d1.subset(), d2.subset())?;
    Ok(match g {
        Some(g) => Verdict { equivalent: true, reason: "isometry carries M onto M'".into(), isometry: Some(g) },
        None => Verdict { equivalent: false, reason: "no isometry carries M onto M'".into(), isometry: None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_enumeration() {
        let w = Window::new(1);
        let d = w.degrees(2);
        assert_eq!(d.len(), 9);
        assert!(d.iter().all(|x| w.contains(x) && w.contains(&-x)));
        assert!(d.contains(&HalfDeg::zero(2)));
        assert_eq!(Window::new(0).degrees(3).len(), 1);
    }

    #[test]
    fn hermite_membership() {
        let basis = hermite_basis(&[vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert!(lattice_contains(&basis, &[1, 1]));
        assert!(lattice_contains(&basis, &[2, 0]));
        assert!(lattice_contains(&basis, &[3, 1]));
        assert!(!lattice_contains(&basis, &[1, 0]));
        let b = hermite_basis(&[vec![4, 6], vec![6, 9]]);
        assert!(lattice_contains(&b, &[2, 3]));
        assert!(!lattice_contains(&b, &[1, 1]));
    }
}

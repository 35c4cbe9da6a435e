//! The root system `BC_r` in the basis `ε₁, …, ε_r` with the standard inner
//! product `(εᵢ, εⱼ) = δᵢⱼ`.

/// Root lengths of `BC_r`, by squared length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootLength {
    /// `±εᵢ`
    Short,
    /// `±εᵢ ± εⱼ`
    Long,
    /// `±2εᵢ`
    ExtraLong,
}

pub fn inner(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn length(mu: &[i64]) -> Option<RootLength> {
    let nz: Vec<i64> = mu.iter().copied().filter(|&x| x != 0).collect();
    match nz.as_slice() {
        [x] if x.abs() == 1 => Some(RootLength::Short),
        [x] if x.abs() == 2 => Some(RootLength::ExtraLong),
        [x, y] if x.abs() == 1 && y.abs() == 1 => Some(RootLength::Long),
        _ => None,
    }
}

pub fn is_root(mu: &[i64]) -> bool {
    length(mu).is_some()
}

/// Membership in the reduced subsystem `B_r` of indivisible roots.
pub fn is_indivisible(mu: &[i64]) -> bool {
    matches!(length(mu), Some(RootLength::Short | RootLength::Long))
}

/// `⟨ν | μ^∨⟩ = 2(ν, μ)/(μ, μ)`; always an integer for roots `μ`.
pub fn pairing(nu: &[i64], mu: &[i64]) -> i64 {
    2 * inner(nu, mu) / inner(mu, mu)
}

pub fn neg(mu: &[i64]) -> Vec<i64> {
    mu.iter().map(|x| -x).collect()
}

pub fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `±εᵢ`, `i` 1-based.
pub fn eps(r: usize, i: usize, sign: i64) -> Vec<i64> {
    let mut v = vec![0; r];
    v[i - 1] = sign;
    v
}

/// All roots of `BC_r`, sorted.
pub fn all_roots(r: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 0..r {
        for s in [-2, -1, 1, 2] {
            let mut v = vec![0; r];
            v[i] = s;
            out.push(v);
        }
        for j in i + 1..r {
            for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = vec![0; r];
                v[i] = a;
                v[j] = b;
                out.push(v);
            }
        }
    }
    out.sort();
    out
}

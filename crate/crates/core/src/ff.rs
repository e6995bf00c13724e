//! Small finite fields `F_{p^r}` (table driven) and dense linear algebra
//! over them.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order supported by the table representation.
pub const MAX_FIELD_ORDER: u64 = 256;

pub fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// `F_q` with `q = p^r`; elements are `0..q`, encoding base-`p` coefficient
/// vectors of polynomials modulo a fixed irreducible of degree `r`.
#[derive(Debug)]
pub struct Field {
    p: u64,
    r: u32,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

pub type FieldRef = Arc<Field>;

impl Field {
    pub fn prime(p: u64) -> Result<FieldRef> {
        Self::extension(p, 1)
    }

    pub fn extension(p: u64, r: u32) -> Result<FieldRef> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = p
            .checked_pow(r)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| {
                Error::TooLarge(format!("field of order {p}^{r} exceeds {MAX_FIELD_ORDER}"))
            })? as usize;
        let modulus = irreducible(p, r);
        let pu = p as usize;
        let digits = |x: usize| -> Vec<usize> {
            let mut v = vec![0; r as usize];
            let mut x = x;
            for d in v.iter_mut() {
                *d = x % pu;
                x /= pu;
            }
            v
        };
        let encode = |v: &[usize]| v.iter().rev().fold(0, |acc, &d| acc * pu + d);
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % pu).collect();
                add[a * q + b] = encode(&s) as u8;
                // schoolbook product then reduce by the monic modulus
                let mut prod = vec![0usize; 2 * r as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % pu;
                    }
                }
                for k in (r as usize..prod.len()).rev() {
                    let c = prod[k];
                    if c == 0 {
                        continue;
                    }
                    prod[k] = 0;
                    for (j, m) in modulus.iter().take(r as usize).enumerate() {
                        let idx = k - r as usize + j;
                        prod[idx] = (prod[idx] + pu * pu - c * m % pu) % pu;
                    }
                }
                mul[a * q + b] = encode(&prod[..r as usize]) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as u8;
                }
                if mul[a * q + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        Ok(Arc::new(Field {
            p,
            r,
            q,
            add,
            mul,
            neg,
            inv,
        }))
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }
}

/// Monic irreducible polynomial of degree `r` over `F_p`, ascending
/// coefficients including the leading 1.
fn irreducible(p: u64, r: u32) -> Vec<usize> {
    let p = p as usize;
    let r = r as usize;
    if r == 1 {
        return vec![0, 1];
    }
    let total = p.pow(r as u32);
    for code in 0..total {
        let mut f: Vec<usize> = (0..r).map(|k| code / p.pow(k as u32) % p).collect();
        f.push(1);
        if f[0] == 0 {
            continue;
        }
        let has_factor = (1..=r / 2).any(|d| {
            (0..p.pow(d as u32)).any(|gc| {
                let mut g: Vec<usize> = (0..d).map(|k| gc / p.pow(k as u32) % p).collect();
                g.push(1);
                poly_rem_mod(&f, &g, p).iter().all(|&c| c == 0)
            })
        });
        if !has_factor {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_rem_mod(f: &[usize], g: &[usize], p: usize) -> Vec<usize> {
    let mut rem = f.to_vec();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let c = *rem.last().unwrap();
        let shift = rem.len() - 1 - dg;
        for (j, gc) in g.iter().enumerate() {
            rem[shift + j] = (rem[shift + j] + p * p - c * gc % p) % p;
        }
        rem.pop();
    }
    rem
}

/// Dense row-major matrix over a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, f: &Field, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn add(&self, f: &Field, other: &Mat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, f: &Field, other: &Mat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        }
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, f: &Field, v: &[u8]) -> Vec<u8> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0u8, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j]))))
            .collect()
    }

    pub fn rank(&self, f: &Field) -> usize {
        let mut m = self.clone();
        rref(f, &mut m).len()
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self, f: &Field) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = rref(f, &mut aug);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Some(out)
    }

    /// Basis of the right null space `{x : M x = 0}`.
    pub fn nullspace(&self, f: &Field) -> Vec<Vec<u8>> {
        let mut m = self.clone();
        let pivots = rref(f, &mut m);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u8; self.cols];
                v[fc] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(row, fc));
                }
                v
            })
            .collect()
    }
}

/// In-place reduced row echelon form; returns pivot columns by row.
pub fn rref(f: &Field, m: &mut Mat) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
            continue;
        };
        if pr != row {
            for j in 0..m.cols {
                m.data.swap(pr * m.cols + j, row * m.cols + j);
            }
        }
        let inv = f.inv(m.get(row, col));
        for j in 0..m.cols {
            let v = m.get(row, j);
            m.set(row, j, f.mul(v, inv));
        }
        for r in 0..m.rows {
            if r == row {
                continue;
            }
            let c = m.get(r, col);
            if c == 0 {
                continue;
            }
            for j in 0..m.cols {
                let v = f.sub(m.get(r, j), f.mul(c, m.get(row, j)));
                m.set(r, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Subspace of `F^n` stored as its reduced row echelon basis, so equal
/// subspaces have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Vec<Vec<u8>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient)
                .map(|i| {
                    let mut v = vec![0; ambient];
                    v[i] = 1;
                    v
                })
                .collect(),
        }
    }

    pub fn span(f: &Field, ambient: usize, vectors: &[Vec<u8>]) -> Self {
        let mut m = Mat::zeros(vectors.len(), ambient);
        for (i, v) in vectors.iter().enumerate() {
            m.data[i * ambient..(i + 1) * ambient].copy_from_slice(v);
        }
        let r = rref(f, &mut m).len();
        Subspace {
            ambient,
            basis: (0..r)
                .map(|i| m.data[i * ambient..(i + 1) * ambient].to_vec())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn sum(&self, f: &Field, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(f, self.ambient, &vs)
    }

    /// Image under a linear map `F^ambient -> F^{m.rows}`.
    pub fn image(&self, f: &Field, m: &Mat) -> Subspace {
        let vs: Vec<Vec<u8>> = self.basis.iter().map(|v| m.apply(f, v)).collect();
        Subspace::span(f, m.rows, &vs)
    }

    pub fn contains_space(&self, f: &Field, other: &Subspace) -> bool {
        self.sum(f, other).dim() == self.dim()
    }

    /// Every subspace of `F^n`.
    pub fn all(f: &Field, n: usize) -> Vec<Subspace> {
        let q = f.order();
        let vectors: Vec<Vec<u8>> = (0..q.pow(n as u32))
            .map(|code| (0..n).map(|k| (code / q.pow(k as u32) % q) as u8).collect())
            .collect();
        let mut found = vec![Subspace::zero(n)];
        let mut frontier = vec![Subspace::zero(n)];
        while let Some(s) = frontier.pop() {
            for v in &vectors {
                let t = s.sum(f, &Subspace::span(f, n, std::slice::from_ref(v)));
                if !found.contains(&t) {
                    found.push(t.clone());
                    frontier.push(t);
                }
            }
        }
        found
    }
}

/// All `n x n` invertible matrices together with their inverses.
pub fn general_linear_group(f: &Field, n: usize) -> Vec<(Mat, Mat)> {
    let q = f.order();
    let total = q.pow((n * n) as u32);
    (0..total)
        .filter_map(|code| {
            let m = Mat::from_data(n, n, decode(code as u64, q, n * n));
            m.inverse(f).map(|inv| (m, inv))
        })
        .collect()
}

/// Base-`q` digits of `code`, least significant first.
pub fn decode(mut code: u64, q: usize, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for d in out.iter_mut() {
        *d = (code % q as u64) as u8;
        code /= q as u64;
    }
    out
}

pub fn encode(digits: &[u8], q: usize) -> u64 {
    digits
        .iter()
        .rev()
        .fold(0u64, |acc, &d| acc * q as u64 + d as u64)
}

/// `|GL_n(F_q)|`.
pub fn gl_order(n: u32, q: u64) -> u128 {
    let qn = (q as u128).pow(n);
    (0..n).map(|k| qn - (q as u128).pow(k)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small_fields() {
        for (p, r) in [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (5, 1)] {
            let f = Field::extension(p, r).unwrap();
            let q = f.order() as u8;
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        let lhs = f.mul(a, f.add(b, c));
                        assert_eq!(lhs, f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn group_orders() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(general_linear_group(&f2, 2).len(), 6);
        assert_eq!(general_linear_group(&f2, 3).len(), 168);
        let f4 = Field::extension(2, 2).unwrap();
        assert_eq!(general_linear_group(&f4, 2).len() as u128, gl_order(2, 4));
    }

    #[test]
    fn subspace_counts() {
        // Gaussian binomials: F_2^2 has 5 subspaces, F_3^2 has 6
        assert_eq!(Subspace::all(&Field::prime(2).unwrap(), 2).len(), 5);
        assert_eq!(Subspace::all(&Field::prime(3).unwrap(), 2).len(), 6);
    }

    #[test]
    fn nullspace_and_rank() {
        let f = Field::prime(3).unwrap();
        let m = Mat::from_data(2, 3, vec![1, 2, 0, 0, 1, 1]);
        assert_eq!(m.rank(&f), 2);
        let ns = m.nullspace(&f);
        assert_eq!(ns.len(), 1);
        assert!(m.apply(&f, &ns[0]).iter().all(|&x| x == 0));
        assert!(Field::prime(4).is_err());
    }
}

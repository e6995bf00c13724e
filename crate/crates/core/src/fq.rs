//! Point counts over finite fields: moment-map fibers of the double quiver,
//! stack counts, seminilpotency, and interpolation of polynomial counts.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num::{BigInt, BigRational, One};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{MotiveRat, Poly};
use crate::error::{Error, Result};
use crate::ff::{decode, gl_order, is_prime, Field, FieldRef, Mat, Subspace};
use crate::kac::{hua_term, partitions, RepSpace, ENUMERATION_GUARD};
use crate::quiver::{DimVector, DoubleQuiver, Quiver};
use crate::series::mobius;

/// Ceiling on `q^{2N}` for the full enumeration over pairs `(x, x*)`.
pub const EXHAUSTIVE_GUARD: u64 = 1 << 30;

/// `|G_gamma(F_q)| = prod_i |GL(gamma_i, F_q)|`.
pub fn group_order(g: &DimVector, q: u64) -> u128 {
    g.0.iter().map(|&n| gl_order(n, q)).product()
}

/// `[G_gamma] = prod_i [GL(gamma_i)]`.
pub fn group_motive(g: &DimVector) -> MotiveRat {
    g.0.iter().fold(MotiveRat::one(), |acc, &n| {
        &acc * &MotiveRat::gl(n as usize)
    })
}

fn prime_field(q: u64) -> Result<FieldRef> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    Field::prime(q)
}

/// Matrix of `x* -> mu(x, x*)`, with rows indexed by the entries of
/// `(End V_i)_i` and columns by the entries of `x*` (one `gamma_s x gamma_t`
/// block per arrow, in arrow order).
fn moment_matrix(space: &RepSpace, f: &Field, x: &[u8]) -> Mat {
    let q = space.quiver;
    let d: Vec<usize> = space.dim.0.iter().map(|&c| c as usize).collect();
    let mut row_off = vec![0; d.len()];
    let mut rows = 0;
    for i in 0..d.len() {
        row_off[i] = rows;
        rows += d[i] * d[i];
    }
    let mut col_off = Vec::new();
    let mut cols = 0;
    for a in q.arrows() {
        col_off.push(cols);
        cols += d[a.source] * d[a.target];
    }
    let mut m = Mat::zeros(rows, cols);
    for (k, a) in q.arrows().iter().enumerate() {
        let (s, t) = (a.source, a.target);
        let xa = space.block(x, k);
        // y = x_{a*} has shape d_s x d_t; y[r][c] is column col_off[k] + r*d_t + c
        let ycol = |r: usize, c: usize| col_off[k] + r * d[t] + c;
        // + x_a y at vertex t
        for r in 0..d[t] {
            for c in 0..d[t] {
                let row = row_off[t] + r * d[t] + c;
                for mm in 0..d[s] {
                    let v = xa.get(r, mm);
                    let col = ycol(mm, c);
                    m.set(row, col, f.add(m.get(row, col), v));
                }
            }
        }
        // - y x_a at vertex s
        for r in 0..d[s] {
            for c in 0..d[s] {
                let row = row_off[s] + r * d[s] + c;
                for mm in 0..d[t] {
                    let v = xa.get(mm, c);
                    let col = ycol(r, mm);
                    m.set(row, col, f.sub(m.get(row, col), v));
                }
            }
        }
    }
    m
}

/// `|mu_gamma^{-1}(0)(F_q)|`. For fixed `x` the fiber condition is linear in
/// `x*`, so each `x` contributes `q^{N - rank}`.
pub fn count_moment_fiber(q: &Quiver, g: &DimVector, p: u64) -> Result<u64> {
    let f = prime_field(p)?;
    let space = RepSpace::new(q, g)?;
    let total = space.checked_size(f.order(), ENUMERATION_GUARD)?;
    let n = space.entries() as u32;
    let sum: u128 = (0..total)
        .into_par_iter()
        .map(|code| {
            let x = decode(code, f.order(), space.entries());
            let rank = moment_matrix(&space, &f, &x).rank(&f) as u32;
            (p as u128).pow(n - rank)
        })
        .sum();
    u64::try_from(sum).map_err(|_| Error::TooLarge(format!("count {sum} overflows")))
}

/// Full enumeration over pairs `(x, x*)`; the oracle for
/// [`count_moment_fiber`].
pub fn count_moment_fiber_exhaustive(q: &Quiver, g: &DimVector, p: u64) -> Result<u64> {
    let f = prime_field(p)?;
    let dq = q.make_double();
    let space = RepSpace::new(&dq.quiver, g)?;
    let total = space.checked_size(f.order(), EXHAUSTIVE_GUARD)?;
    let hits = (0..total)
        .into_par_iter()
        .filter(|&code| {
            let blocks = split_blocks(&space, &decode(code, f.order(), space.entries()));
            moment_map(&f, &dq, g, &blocks).iter().all(Mat::is_zero)
        })
        .count();
    Ok(hits as u64)
}

/// `|mu^{-1}(0)(F_q)| / |G_gamma(F_q)|`.
pub fn stack_count(q: &Quiver, g: &DimVector, p: u64) -> Result<BigRational> {
    let raw = count_moment_fiber(q, g, p)?;
    Ok(BigRational::new(
        BigInt::from(raw),
        BigInt::from(group_order(g, p)),
    ))
}

/// A representation of the double quiver: one block per arrow, `x_{a*}`
/// at index `k + |Omega|` for original arrow `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqRep {
    pub dim: DimVector,
    pub blocks: Vec<Mat>,
}

impl FqRep {
    pub fn zero(dq: &DoubleQuiver, dim: &DimVector) -> Self {
        let blocks = dq
            .quiver
            .arrows()
            .iter()
            .map(|a| Mat::zeros(dim.0[a.target] as usize, dim.0[a.source] as usize))
            .collect();
        FqRep {
            dim: dim.clone(),
            blocks,
        }
    }
}

fn split_blocks(space: &RepSpace, x: &[u8]) -> Vec<Mat> {
    (0..space.quiver.arrows().len())
        .map(|k| space.block(x, k))
        .collect()
}

/// `mu_i = sum_{t(a)=i} x_a x_{a*} - sum_{s(a)=i} x_{a*} x_a`.
fn moment_map(f: &Field, dq: &DoubleQuiver, g: &DimVector, blocks: &[Mat]) -> Vec<Mat> {
    let mut mu: Vec<Mat> =
        g.0.iter()
            .map(|&n| Mat::zeros(n as usize, n as usize))
            .collect();
    for (k, a) in dq.quiver.arrows()[..dq.original].iter().enumerate() {
        let x = &blocks[k];
        let y = &blocks[dq.star(k)];
        mu[a.target] = mu[a.target].add(f, &x.mul(f, y));
        mu[a.source] = mu[a.source].sub(f, &y.mul(f, x));
    }
    mu
}

/// Graded subspace `(U_i)_i` of `V = (F^{gamma_i})_i`.
type Graded = Vec<Subspace>;

fn graded_zero(g: &DimVector) -> Graded {
    g.0.iter().map(|&n| Subspace::zero(n as usize)).collect()
}

fn graded_full(g: &DimVector) -> Graded {
    g.0.iter().map(|&n| Subspace::full(n as usize)).collect()
}

/// Images of `u` under the given arrows, summed per target vertex.
fn push(
    f: &Field,
    dq: &DoubleQuiver,
    rep: &FqRep,
    u: &Graded,
    arrows: std::ops::Range<usize>,
) -> Graded {
    let mut out = graded_zero(&rep.dim);
    for k in arrows {
        let a = dq.quiver.arrows()[k];
        let img = u[a.source].image(f, &rep.blocks[k]);
        out[a.target] = out[a.target].sum(f, &img);
    }
    out
}

fn graded_sum(f: &Field, a: &Graded, b: &Graded) -> Graded {
    a.iter().zip(b).map(|(x, y)| x.sum(f, y)).collect()
}

fn graded_contains(f: &Field, a: &Graded, b: &Graded) -> bool {
    a.iter().zip(b).all(|(x, y)| x.contains_space(f, y))
}

fn is_stable(f: &Field, dq: &DoubleQuiver, rep: &FqRep, u: &Graded) -> bool {
    graded_contains(f, u, &push(f, dq, rep, u, 0..dq.original))
}

/// Smallest subrepresentation for the original arrows containing `u`.
fn stable_closure(f: &Field, dq: &DoubleQuiver, rep: &FqRep, mut u: Graded) -> Graded {
    loop {
        let next = graded_sum(f, &u, &push(f, dq, rep, &u, 0..dq.original));
        if next == u {
            return u;
        }
        u = next;
    }
}

/// The greedy chain `U_0 = V`, `U_{k+1}` = stable closure of
/// `sum_a x_{a*}(U_k)`, up to the point where it stops shrinking.
pub fn greedy_chain(f: &Field, dq: &DoubleQuiver, rep: &FqRep) -> Vec<Graded> {
    let n = dq.original;
    let mut chain = vec![graded_full(&rep.dim)];
    loop {
        let last = chain.last().unwrap();
        let next = stable_closure(f, dq, rep, push(f, dq, rep, last, n..2 * n));
        if next == *last {
            return chain;
        }
        chain.push(next);
    }
}

/// True iff a filtration `V = W_0 ⊇ W_1 ⊇ ... ⊇ W_r = 0` exists with
/// `x_a(W_k) ⊆ W_k` and `x_{a*}(W_k) ⊆ W_{k+1}`.
pub fn is_seminilpotent(f: &Field, dq: &DoubleQuiver, rep: &FqRep) -> bool {
    greedy_chain(f, dq, rep)
        .last()
        .unwrap()
        .iter()
        .all(Subspace::is_zero)
}

/// Search over every stable graded subspace for a filtration reaching 0.
pub fn is_seminilpotent_exhaustive(f: &Field, dq: &DoubleQuiver, rep: &FqRep) -> bool {
    let per_vertex: Vec<Vec<Subspace>> = rep
        .dim
        .0
        .iter()
        .map(|&n| Subspace::all(f, n as usize))
        .collect();
    let mut stable: Vec<Graded> = vec![Vec::new()];
    for choices in &per_vertex {
        stable = stable
            .into_iter()
            .flat_map(|u| {
                choices.iter().map(move |s| {
                    let mut w = u.clone();
                    w.push(s.clone());
                    w
                })
            })
            .collect();
    }
    stable.retain(|u| is_stable(f, dq, rep, u));
    let n = dq.original;
    let start = graded_full(&rep.dim);
    let goal = graded_zero(&rep.dim);
    let mut seen: HashSet<Graded> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(w) = queue.pop_front() {
        if w == goal {
            return true;
        }
        let star = push(f, dq, rep, &w, n..2 * n);
        for next in &stable {
            if graded_contains(f, &w, next)
                && graded_contains(f, next, &star)
                && seen.insert(next.clone())
            {
                queue.push_back(next.clone());
            }
        }
    }
    false
}

/// Points of `mu^{-1}(0)(F_q)` that are seminilpotent; enumerates the kernel
/// of the fiber condition for each `x`.
pub fn count_seminilpotent(q: &Quiver, g: &DimVector, p: u64) -> Result<u64> {
    let f = prime_field(p)?;
    let space = RepSpace::new(q, g)?;
    let total = space.checked_size(f.order(), ENUMERATION_GUARD)?;
    if g.is_zero() {
        return Ok(1);
    }
    let raw = count_moment_fiber(q, g, p)?;
    if raw > EXHAUSTIVE_GUARD {
        return Err(Error::TooLarge(format!(
            "{raw} fiber points for dimension {g} exceed the guard {EXHAUSTIVE_GUARD}"
        )));
    }
    let dq = q.make_double();
    let n = q.arrows().len();
    let count = (0..total)
        .into_par_iter()
        .map(|code| {
            let x = decode(code, f.order(), space.entries());
            let kernel = moment_matrix(&space, &f, &x).nullspace(&f);
            let xs = split_blocks(&space, &x);
            let mut hits = 0u64;
            for c in 0..(p).pow(kernel.len() as u32) {
                let coeffs = decode(c, f.order(), kernel.len());
                let mut y = vec![0u8; space.entries()];
                for (cf, v) in coeffs.iter().zip(&kernel) {
                    for (slot, &e) in y.iter_mut().zip(v) {
                        *slot = f.add(*slot, f.mul(*cf, e));
                    }
                }
                let mut blocks = xs.clone();
                for (k, a) in q.arrows().iter().enumerate() {
                    let (rows, cols) = (g.0[a.source] as usize, g.0[a.target] as usize);
                    let off = space_offset(&space, k);
                    blocks.push(Mat::from_data(
                        rows,
                        cols,
                        y[off..off + rows * cols].to_vec(),
                    ));
                }
                debug_assert_eq!(blocks.len(), 2 * n);
                let rep = FqRep {
                    dim: g.clone(),
                    blocks,
                };
                if is_seminilpotent(&f, &dq, &rep) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(count)
}

/// Offset of arrow `k`'s block; the `x*` layout mirrors the `x` layout with
/// transposed shapes, which have the same size.
fn space_offset(space: &RepSpace, k: usize) -> usize {
    space.quiver.arrows()[..k]
        .iter()
        .map(|a| (space.dim.0[a.source] * space.dim.0[a.target]) as usize)
        .sum()
}

/// Serialized record of one fiber count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentFiberCount {
    pub quiver_hash: String,
    pub gamma: DimVector,
    pub q: u64,
    pub raw: u64,
    #[serde(with = "rational_string")]
    pub stack: BigRational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seminilpotent: Option<u64>,
}

pub fn moment_fiber_record(
    q: &Quiver,
    g: &DimVector,
    p: u64,
    with_seminilpotent: bool,
) -> Result<MomentFiberCount> {
    let raw = count_moment_fiber(q, g, p)?;
    let seminilpotent = if with_seminilpotent {
        Some(count_seminilpotent(q, g, p)?)
    } else {
        None
    };
    Ok(MomentFiberCount {
        quiver_hash: q.canonical_hash(),
        gamma: g.clone(),
        q: p,
        raw,
        stack: BigRational::new(raw.into(), BigInt::from(group_order(g, p))),
        seminilpotent,
    })
}

pub mod rational_string {
    use num::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Polynomial in `L` through `(q, value)` samples. The first
/// `degree_bound + 1` samples determine it; any further samples are held
/// out and must agree.
pub fn interpolate_motive(
    samples: &[(u64, BigRational)],
    degree_bound: usize,
) -> Result<MotiveRat> {
    interpolate_with_denominator(samples, degree_bound, &Poly::one())
}

/// As [`interpolate_motive`] for values of the form `P(q) / den(q)`.
pub fn interpolate_with_denominator(
    samples: &[(u64, BigRational)],
    degree_bound: usize,
    den: &Poly,
) -> Result<MotiveRat> {
    let mut xs: Vec<u64> = samples.iter().map(|s| s.0).collect();
    xs.sort_unstable();
    xs.dedup();
    if xs.len() != samples.len() {
        return Err(Error::NotPolynomialCount("repeated sample point".into()));
    }
    if samples.len() < degree_bound + 1 {
        return Err(Error::NotPolynomialCount(format!(
            "{} samples cannot determine degree {degree_bound}",
            samples.len()
        )));
    }
    let pts: Vec<(BigRational, BigRational)> = samples
        .iter()
        .map(|(q, v)| {
            let x = BigRational::from_integer((*q).into());
            let y = v * den.eval(&x);
            (x, y)
        })
        .collect();
    let (fit, held) = pts.split_at(degree_bound + 1);
    let p = Poly::interpolate(fit);
    for (x, y) in held {
        if p.eval(x) != *y {
            return Err(Error::NotPolynomialCount(format!(
                "held-out sample at q = {x} disagrees"
            )));
        }
    }
    Ok(&MotiveRat::from_l_poly(&p) / &MotiveRat::from_l_poly(den))
}

/// Number of monic irreducible polynomials of degree `d` over `F_q`, as a
/// polynomial in `q`.
pub fn irreducible_count(d: u32) -> Poly {
    let mut acc = Poly::zero();
    for e in 1..=d {
        if d.is_multiple_of(e) {
            let mu = mobius((d / e) as u64);
            if mu != 0 {
                acc = &acc + &Poly::monomial(BigRational::from_integer(mu.into()), e as usize);
            }
        }
    }
    acc.scale(&BigRational::new(BigInt::one(), d.into()))
}

/// `L^{chi(gamma,gamma)} [mu^{-1}(0)] / [G_gamma]` in closed form.
///
/// Since `|mu^{-1}(0)| = sum_x q^{N - sum gamma_i^2 + dim End x}`, the
/// quantity equals `#{(x, z) : z in End(x)} / |G|`. Summing over `z` first,
/// grouped by the joint primary decomposition of the `z_i`, gives a sum over
/// types: each irreducible of degree `d` carries an I-tuple of partitions.
pub fn class_sum_motive(q: &Quiver, g: &DimVector) -> Result<MotiveRat> {
    if g.len() != q.num_vertices() {
        return Err(Error::VertexMismatch {
            expected: q.num_vertices(),
            got: g.len(),
        });
    }
    if g.is_zero() {
        return Ok(MotiveRat::one());
    }
    // blocks (d, Lambda) with d * |Lambda| <= gamma
    let mut blocks: Vec<(u32, DimVector, MotiveRat)> = Vec::new();
    for k in g.sub_vectors() {
        if k.is_zero() {
            continue;
        }
        for d in 1..=g.height() {
            if !(&k * d).le(g) {
                break;
            }
            let choices: Vec<Vec<Vec<u32>>> = k.0.iter().map(|&n| partitions(n)).collect();
            for tuple in cartesian(&choices) {
                let w = hua_term(q, &tuple).adams(d as usize);
                blocks.push((d, &k * d, w));
            }
        }
    }
    let mut acc = MotiveRat::zero();
    let mut counts = vec![0u32; blocks.len()];
    type_sum(&blocks, 0, g.clone(), &mut counts, &mut acc);
    Ok(acc)
}

fn cartesian(choices: &[Vec<Vec<u32>>]) -> Vec<Vec<&Vec<u32>>> {
    let mut out: Vec<Vec<&Vec<u32>>> = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|t| {
                c.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push(p);
                    t
                })
            })
            .collect();
    }
    out
}

fn type_sum(
    blocks: &[(u32, DimVector, MotiveRat)],
    idx: usize,
    left: DimVector,
    counts: &mut Vec<u32>,
    acc: &mut MotiveRat,
) {
    if left.is_zero() {
        *acc = &*acc + &type_weight(blocks, counts);
        return;
    }
    if idx == blocks.len() {
        return;
    }
    let mut rest = left.clone();
    let mut c = 0;
    loop {
        counts[idx] = c;
        type_sum(blocks, idx + 1, rest.clone(), counts, acc);
        match rest.checked_sub(&blocks[idx].1) {
            Some(r) => {
                rest = r;
                c += 1;
            }
            None => break,
        }
    }
    counts[idx] = 0;
}

/// `prod_d (N_d)_{k_d} / prod_b c_b! * prod_b w_b^{c_b}`.
fn type_weight(blocks: &[(u32, DimVector, MotiveRat)], counts: &[u32]) -> MotiveRat {
    let mut per_degree: BTreeMap<u32, u32> = BTreeMap::new();
    let mut w = MotiveRat::one();
    let mut fact = BigInt::one();
    for ((d, _, wb), &c) in blocks.iter().zip(counts) {
        if c == 0 {
            continue;
        }
        *per_degree.entry(*d).or_default() += c;
        w = &w * &wb.pow(c as i64);
        for j in 1..=c {
            fact *= j;
        }
    }
    for (d, k) in per_degree {
        let nd = irreducible_count(d);
        for j in 0..k {
            let falling = &nd - &Poly::from_int(j as i64);
            w = &w * &MotiveRat::from_l_poly(&falling);
        }
    }
    w.scale(&BigRational::new(BigInt::one(), fact))
}

/// `[mu^{-1}(0)]` as a polynomial motive, from [`class_sum_motive`].
pub fn moment_fiber_motive(q: &Quiver, g: &DimVector) -> Result<MotiveRat> {
    let chi = q.euler_form_dim(g, g)?;
    Ok(&(&class_sum_motive(q, g)? * &group_motive(g)) * &MotiveRat::lefschetz_pow(-chi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector(v.to_vec())
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn fiber_counts() {
        let j = Quiver::jordan();
        assert_eq!(count_moment_fiber(&j, &dv(&[1]), 3).unwrap(), 9);
        assert_eq!(count_moment_fiber(&j, &dv(&[2]), 2).unwrap(), 88);
        let a2 = Quiver::a2();
        for p in [2, 3, 5] {
            assert_eq!(count_moment_fiber(&a2, &dv(&[1, 1]), p).unwrap(), 2 * p - 1);
        }
        assert_eq!(count_moment_fiber(&a2, &dv(&[0, 0]), 2).unwrap(), 1);
        assert!(matches!(
            count_moment_fiber(&j, &dv(&[1]), 4),
            Err(Error::NotPrime(4))
        ));
    }

    #[test]
    fn shortcut_matches_exhaustive() {
        let cases: [(Quiver, &[u32], u64); 5] = [
            (Quiver::jordan(), &[2], 2),
            (Quiver::a2(), &[1, 1], 3),
            (Quiver::a2(), &[2, 1], 2),
            (Quiver::kronecker(), &[1, 1], 3),
            (Quiver::loops(2), &[1], 5),
        ];
        for (q, g, p) in cases {
            let g = dv(g);
            assert_eq!(
                count_moment_fiber(&q, &g, p).unwrap(),
                count_moment_fiber_exhaustive(&q, &g, p).unwrap(),
                "{g} at q={p}"
            );
        }
    }

    #[test]
    fn orbit_decomposition_reproduces_counts() {
        use crate::kac::orbit_decomposition;
        for (q, g, p) in [
            (Quiver::jordan(), dv(&[2]), 3u64),
            (Quiver::kronecker(), dv(&[1, 2]), 2),
        ] {
            let f = Field::prime(p).unwrap();
            let d = orbit_decomposition(&q, &g, &f, ENUMERATION_GUARD).unwrap();
            let n = RepSpace::new(&q, &g).unwrap().entries() as u32;
            let sq: u32 = g.0.iter().map(|c| c * c).sum();
            let total: u64 = d
                .orbits
                .iter()
                .map(|o| o.size * p.pow(n + o.end_dim as u32 - sq))
                .sum();
            assert_eq!(total, count_moment_fiber(&q, &g, p).unwrap());
        }
    }

    #[test]
    fn stack_counts() {
        assert_eq!(
            stack_count(&Quiver::jordan(), &dv(&[1]), 2).unwrap(),
            r(4, 1)
        );
        assert_eq!(
            stack_count(&Quiver::jordan(), &dv(&[2]), 2).unwrap(),
            r(44, 3)
        );
        assert_eq!(
            stack_count(&Quiver::a2(), &dv(&[1, 1]), 3).unwrap(),
            r(5, 4)
        );
    }

    #[test]
    fn seminilpotency_examples() {
        let f = Field::prime(2).unwrap();
        let j = Quiver::jordan().make_double();
        let one = dv(&[1]);
        assert!(is_seminilpotent(&f, &j, &FqRep::zero(&j, &one)));
        let mut rep = FqRep::zero(&j, &one);
        rep.blocks[1] = Mat::identity(1);
        assert!(!is_seminilpotent(&f, &j, &rep));
        let a2 = Quiver::a2().make_double();
        let mut rep = FqRep::zero(&a2, &dv(&[1, 1]));
        rep.blocks[0] = Mat::identity(1);
        assert!(is_seminilpotent(&f, &a2, &rep));
    }

    #[test]
    fn seminilpotent_counts() {
        for p in [2, 3] {
            assert_eq!(
                count_seminilpotent(&Quiver::jordan(), &dv(&[1]), p).unwrap(),
                p
            );
            assert_eq!(
                count_seminilpotent(&Quiver::a2(), &dv(&[1, 1]), p).unwrap(),
                2 * p - 1
            );
        }
        assert_eq!(
            count_seminilpotent(&Quiver::a2(), &dv(&[0, 0]), 2).unwrap(),
            1
        );
    }

    #[test]
    fn interpolation() {
        let sq: Vec<_> = [2, 3, 5]
            .iter()
            .map(|&q| (q, r(q as i64 * q as i64, 1)))
            .collect();
        assert_eq!(interpolate_motive(&sq, 2).unwrap().to_string(), "L^2");
        let lin: Vec<_> = [(2, 3), (3, 5), (5, 9)]
            .iter()
            .map(|&(q, v)| (q, r(v, 1)))
            .collect();
        assert_eq!(interpolate_motive(&lin, 1).unwrap().to_string(), "2*L - 1");
        let bad: Vec<_> = [(2, 3), (3, 5), (5, 10)]
            .iter()
            .map(|&(q, v)| (q, r(v, 1)))
            .collect();
        assert!(matches!(
            interpolate_motive(&bad, 1),
            Err(Error::NotPolynomialCount(_))
        ));
        assert!(interpolate_motive(&bad[..1], 1).is_err());
    }

    #[test]
    fn irreducible_counts() {
        let at = |d, q: i64| irreducible_count(d).eval(&r(q, 1));
        assert_eq!(at(1, 2), r(2, 1));
        assert_eq!(at(2, 2), r(1, 1));
        assert_eq!(at(3, 2), r(2, 1));
        assert_eq!(at(2, 3), r(3, 1));
    }

    #[test]
    fn class_sum_matches_brute_force() {
        let cases: [(Quiver, &[u32], &[u64]); 5] = [
            (Quiver::jordan(), &[1], &[2, 3]),
            (Quiver::jordan(), &[2], &[2, 3, 5]),
            (Quiver::a2(), &[1, 1], &[2, 3]),
            (Quiver::kronecker(), &[1, 2], &[2, 3]),
            (Quiver::loops(2), &[2], &[2, 3]),
        ];
        for (q, g, primes) in cases {
            let g = dv(g);
            let m = moment_fiber_motive(&q, &g).unwrap();
            for &p in primes {
                let raw = count_moment_fiber(&q, &g, p).unwrap();
                assert_eq!(
                    m.evaluate_at_prime(p).unwrap(),
                    r(raw as i64, 1),
                    "{g} at q={p}"
                );
            }
        }
        let j1 = class_sum_motive(&Quiver::jordan(), &dv(&[1])).unwrap();
        assert_eq!(j1, "L^2/(L - 1)".parse().unwrap());
    }

    #[test]
    fn record_json() {
        let rec = moment_fiber_record(&Quiver::a2(), &dv(&[1, 1]), 3, true).unwrap();
        assert_eq!(rec.raw, 5);
        assert_eq!(rec.seminilpotent, Some(5));
        let s = serde_json::to_string(&rec).unwrap();
        assert!(s.contains("\"stack\":\"5/4\""));
        let back: MomentFiberCount = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rec);
    }
}

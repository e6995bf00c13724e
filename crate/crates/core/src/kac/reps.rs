//! Representation spaces of a quiver over a finite field, endomorphism
//! algebras, and orbit enumeration under the base-change group.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::{decode, general_linear_group, Field, Mat};
use crate::quiver::{DimVector, Quiver};

/// Largest number of configurations a brute-force enumeration may visit.
pub const ENUMERATION_GUARD: u64 = 1 << 24;

/// Layout of `Rep(Q, gamma)(F)`: one `gamma_t x gamma_s` block per arrow,
/// flattened row-major and concatenated in arrow order.
#[derive(Clone, Debug)]
pub struct RepSpace<'a> {
    pub quiver: &'a Quiver,
    pub dim: DimVector,
    offsets: Vec<usize>,
    len: usize,
}

impl<'a> RepSpace<'a> {
    pub fn new(quiver: &'a Quiver, dim: &DimVector) -> Result<Self> {
        if dim.len() != quiver.num_vertices() {
            return Err(Error::VertexMismatch {
                expected: quiver.num_vertices(),
                got: dim.len(),
            });
        }
        let mut offsets = Vec::with_capacity(quiver.arrows().len());
        let mut len = 0;
        for a in quiver.arrows() {
            offsets.push(len);
            len += (dim.0[a.target] * dim.0[a.source]) as usize;
        }
        Ok(RepSpace {
            quiver,
            dim: dim.clone(),
            offsets,
            len,
        })
    }

    /// Number of field entries in one configuration.
    pub fn entries(&self) -> usize {
        self.len
    }

    /// `q^entries`, or an error when it exceeds `guard`.
    pub fn checked_size(&self, q: usize, guard: u64) -> Result<u64> {
        (q as u64)
            .checked_pow(self.len as u32)
            .filter(|&n| n <= guard)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "{}^{} configurations for dimension {} exceed the guard {}",
                    q, self.len, self.dim, guard
                ))
            })
    }

    pub fn block(&self, x: &[u8], arrow: usize) -> Mat {
        let a = self.quiver.arrows()[arrow];
        let rows = self.dim.0[a.target] as usize;
        let cols = self.dim.0[a.source] as usize;
        let off = self.offsets[arrow];
        Mat::from_data(rows, cols, x[off..off + rows * cols].to_vec())
    }

    /// `x_a -> g_t x_a g_s^{-1}` for a group element given per vertex.
    pub fn act(&self, f: &Field, x: &[u8], g: &[&Mat], g_inv: &[&Mat]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len);
        for (k, a) in self.quiver.arrows().iter().enumerate() {
            let m = self.block(x, k);
            let y = g[a.target].mul(f, &m).mul(f, g_inv[a.source]);
            out.extend_from_slice(&y.data);
        }
        out
    }

    /// Basis of `End(x)` as tuples of per-vertex square matrices.
    pub fn endomorphisms(&self, f: &Field, x: &[u8]) -> Vec<Vec<Mat>> {
        let n = self.quiver.num_vertices();
        let d: Vec<usize> = self.dim.0.iter().map(|&c| c as usize).collect();
        let mut var_off = vec![0; n];
        let mut nvars = 0;
        for i in 0..n {
            var_off[i] = nvars;
            nvars += d[i] * d[i];
        }
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (k, a) in self.quiver.arrows().iter().enumerate() {
            let (s, t) = (a.source, a.target);
            let xa = self.block(x, k);
            // (z_t x_a - x_a z_s)[r][c] = 0
            for r in 0..d[t] {
                for c in 0..d[s] {
                    let mut eq = vec![0u8; nvars];
                    for m in 0..d[t] {
                        let v = var_off[t] + r * d[t] + m;
                        eq[v] = f.add(eq[v], xa.get(m, c));
                    }
                    for m in 0..d[s] {
                        let v = var_off[s] + m * d[s] + c;
                        eq[v] = f.sub(eq[v], xa.get(r, m));
                    }
                    rows.push(eq);
                }
            }
        }
        let basis = if rows.is_empty() {
            (0..nvars)
                .map(|i| {
                    let mut v = vec![0u8; nvars];
                    v[i] = 1;
                    v
                })
                .collect()
        } else {
            let mut m = Mat::zeros(rows.len(), nvars);
            for (i, r) in rows.iter().enumerate() {
                m.data[i * nvars..(i + 1) * nvars].copy_from_slice(r);
            }
            m.nullspace(f)
        };
        basis
            .into_iter()
            .map(|v| {
                (0..n)
                    .map(|i| {
                        Mat::from_data(d[i], d[i], v[var_off[i]..var_off[i] + d[i] * d[i]].to_vec())
                    })
                    .collect()
            })
            .collect()
    }

    /// True when `End(x)` has no idempotents other than 0 and 1 (and
    /// `gamma != 0`), i.e. `x` is indecomposable.
    pub fn is_indecomposable(&self, f: &Field, x: &[u8]) -> bool {
        if self.dim.is_zero() {
            return false;
        }
        let basis = self.endomorphisms(f, x);
        let q = f.order();
        let n = self.quiver.num_vertices();
        let total = (q as u64).pow(basis.len() as u32);
        let identity: Vec<Mat> = self
            .dim
            .0
            .iter()
            .map(|&c| Mat::identity(c as usize))
            .collect();
        for code in 0..total {
            let coeffs = decode(code, q, basis.len());
            let e: Vec<Mat> = (0..n)
                .map(|i| {
                    let mut m = Mat::zeros(self.dim.0[i] as usize, self.dim.0[i] as usize);
                    for (c, b) in coeffs.iter().zip(&basis) {
                        if *c != 0 {
                            for (slot, &val) in m.data.iter_mut().zip(&b[i].data) {
                                *slot = f.add(*slot, f.mul(*c, val));
                            }
                        }
                    }
                    m
                })
                .collect();
            if e.iter().all(Mat::is_zero) || e == identity {
                continue;
            }
            if e.iter().all(|m| m.mul(f, m) == *m) {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    /// Lexicographically least configuration (as a base-q code) in the orbit.
    pub representative: u64,
    pub size: u64,
    pub end_dim: usize,
    pub indecomposable: bool,
}

/// Isomorphism classes of `Rep(Q, gamma)(F)` with orbit sizes.
#[derive(Clone, Debug)]
pub struct OrbitDecomposition {
    pub field_order: usize,
    pub group_order: u64,
    pub orbits: Vec<OrbitRecord>,
}

impl OrbitDecomposition {
    pub fn indecomposable_count(&self) -> u64 {
        self.orbits.iter().filter(|o| o.indecomposable).count() as u64
    }

    pub fn total_points(&self) -> u64 {
        self.orbits.iter().map(|o| o.size).sum()
    }
}

/// Enumerates orbits by scanning codes in increasing order; the first
/// unvisited code of each orbit is its least element.
pub fn orbit_decomposition(
    quiver: &Quiver,
    dim: &DimVector,
    f: &Field,
    guard: u64,
) -> Result<OrbitDecomposition> {
    let space = RepSpace::new(quiver, dim)?;
    let q = f.order();
    let total = space.checked_size(q, guard)?;
    let groups: Vec<Vec<(Mat, Mat)>> = dim
        .0
        .iter()
        .map(|&c| general_linear_group(f, c as usize))
        .collect();
    let group_order: u64 = groups.iter().map(|g| g.len() as u64).product();

    let mut visited = vec![false; total as usize];
    let mut reps: Vec<(u64, u64)> = Vec::new();
    let n = quiver.num_vertices();
    let mut idx = vec![0usize; n];
    for code in 0..total {
        if visited[code as usize] {
            continue;
        }
        let x = decode(code, q, space.entries());
        let mut size = 0;
        idx.iter_mut().for_each(|i| *i = 0);
        loop {
            let g: Vec<&Mat> = (0..n).map(|i| &groups[i][idx[i]].0).collect();
            let gi: Vec<&Mat> = (0..n).map(|i| &groups[i][idx[i]].1).collect();
            let y = space.act(f, &x, &g, &gi);
            let yc = crate::ff::encode(&y, q) as usize;
            if !visited[yc] {
                visited[yc] = true;
                size += 1;
            }
            // odometer over the product of groups
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < groups[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        reps.push((code, size));
    }

    let orbits = reps
        .into_par_iter()
        .map(|(code, size)| {
            let x = decode(code, q, space.entries());
            OrbitRecord {
                representative: code,
                size,
                end_dim: space.endomorphisms(f, &x).len(),
                indecomposable: space.is_indecomposable(f, &x),
            }
        })
        .collect();
    Ok(OrbitDecomposition {
        field_order: q,
        group_order,
        orbits,
    })
}

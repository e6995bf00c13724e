//! Quivers, dimension vectors, derived quivers and lattice-level operations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
}

impl Arrow {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }

    pub fn reversed(&self) -> Arrow {
        Arrow {
            source: self.target,
            target: self.source,
        }
    }
}

/// A finite quiver. Vertices are indexed `0..n` in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    names: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(names: Vec<String>, arrows: Vec<Arrow>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidQuiver("no vertices".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidQuiver(format!("duplicate vertex {n:?}")));
            }
        }
        for a in &arrows {
            if a.source >= names.len() || a.target >= names.len() {
                return Err(Error::InvalidQuiver(format!(
                    "arrow {}->{} references an undeclared vertex",
                    a.source, a.target
                )));
            }
        }
        Ok(Quiver { names, arrows })
    }

    /// Builds from vertex names and arrows given by endpoint names.
    pub fn from_named(vertices: &[&str], arrows: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let idx = |v: &str| {
            names
                .iter()
                .position(|n| n == v)
                .ok_or_else(|| Error::UnknownVertex(v.to_string()))
        };
        let arrows = arrows
            .iter()
            .map(|(s, t)| {
                Ok(Arrow {
                    source: idx(s)?,
                    target: idx(t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Quiver::new(names, arrows)
    }

    /// Quiver with unnamed vertices `"1".."n"` and arrows by index.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Quiver::new(
            (1..=n).map(|i| i.to_string()).collect(),
            edges
                .iter()
                .map(|&(source, target)| Arrow { source, target })
                .collect(),
        )
    }

    /// Single vertex with `g` loops (`g = 0` is A1, `g = 1` the Jordan quiver).
    pub fn loops(g: usize) -> Self {
        Quiver::from_edges(1, &vec![(0, 0); g]).unwrap()
    }

    pub fn jordan() -> Self {
        Self::loops(1)
    }

    pub fn a1() -> Self {
        Self::loops(0)
    }

    pub fn a2() -> Self {
        Quiver::from_edges(2, &[(0, 1)]).unwrap()
    }

    pub fn kronecker() -> Self {
        Quiver::from_edges(2, &[(0, 1), (0, 1)]).unwrap()
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// Number of arrows `i -> j`.
    pub fn arrow_count(&self, i: usize, j: usize) -> usize {
        self.arrows
            .iter()
            .filter(|a| a.source == i && a.target == j)
            .count()
    }

    /// Number of loops at `i`.
    pub fn loop_count(&self, i: usize) -> usize {
        self.arrow_count(i, i)
    }

    pub fn is_real(&self, i: usize) -> bool {
        self.loop_count(i) == 0
    }

    pub fn is_imaginary(&self, i: usize) -> bool {
        !self.is_real(i)
    }

    pub fn is_loop_free(&self) -> bool {
        self.arrows.iter().all(|a| !a.is_loop())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.num_vertices() {
            return Err(Error::VertexMismatch {
                expected: self.num_vertices(),
                got: len,
            });
        }
        Ok(())
    }

    /// Euler form `chi(a, b) = sum_i a_i b_i - sum_{arrows i->j} a_i b_j`.
    pub fn euler_form(&self, a: &[i64], b: &[i64]) -> Result<i64> {
        self.check_dim(a.len())?;
        self.check_dim(b.len())?;
        let diag: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let off: i64 = self.arrows.iter().map(|e| a[e.source] * b[e.target]).sum();
        Ok(diag - off)
    }

    /// Symmetrized Euler form `(a, b) = chi(a, b) + chi(b, a)`.
    pub fn sym_euler_form(&self, a: &[i64], b: &[i64]) -> Result<i64> {
        Ok(self.euler_form(a, b)? + self.euler_form(b, a)?)
    }

    /// `(e_i, e_j) = 2 delta_ij - a_ij - a_ji`.
    pub fn cartan_entry(&self, i: usize, j: usize) -> i64 {
        let d = if i == j { 2 } else { 0 };
        d - self.arrow_count(i, j) as i64 - self.arrow_count(j, i) as i64
    }

    /// `chi(gamma, gamma)` for a dimension vector.
    pub fn euler_form_dim(&self, a: &DimVector, b: &DimVector) -> Result<i64> {
        self.euler_form(&a.to_i64(), &b.to_i64())
    }

    /// Lattice reflection `s_i(x) = x - (x, e_i) e_i` at a loop-free vertex.
    pub fn reflect_class(&self, x: &[i64], i: usize) -> Result<Vec<i64>> {
        self.check_dim(x.len())?;
        if i >= self.num_vertices() {
            return Err(Error::UnknownVertex(i.to_string()));
        }
        if self.is_imaginary(i) {
            return Err(Error::NonReflectableVertex(i));
        }
        let pairing: i64 = (0..x.len()).map(|j| x[j] * self.cartan_entry(j, i)).sum();
        let mut out = x.to_vec();
        out[i] -= pairing;
        Ok(out)
    }

    pub fn make_double(&self) -> DoubleQuiver {
        let mut arrows = self.arrows.clone();
        arrows.extend(self.arrows.iter().map(Arrow::reversed));
        DoubleQuiver {
            quiver: Quiver {
                names: self.names.clone(),
                arrows,
            },
            original: self.arrows.len(),
        }
    }

    /// Triple quiver with the cubic potential `sum_a [a, a*] l`.
    pub fn make_triple(&self) -> (TripleQuiver, Potential) {
        let double = self.make_double();
        let n = self.arrows.len();
        let mut arrows = double.quiver.arrows.clone();
        let loop_base = arrows.len();
        arrows.extend((0..self.num_vertices()).map(|i| Arrow {
            source: i,
            target: i,
        }));
        let quiver = Quiver {
            names: self.names.clone(),
            arrows,
        };
        let mut terms = Vec::with_capacity(2 * n);
        for (k, a) in self.arrows.iter().enumerate() {
            terms.push(PotentialTerm {
                sign: 1,
                word: vec![k, k + n, loop_base + a.target],
            });
            terms.push(PotentialTerm {
                sign: -1,
                word: vec![k + n, k, loop_base + a.source],
            });
        }
        (
            TripleQuiver {
                quiver,
                original: n,
                loop_base,
            },
            Potential { terms },
        )
    }

    /// Canonical text form: vertex order kept, arrows sorted.
    pub fn canonical_form(&self) -> String {
        let mut arrows = self.arrows.clone();
        arrows.sort();
        let mut s = format!("vertices={}", self.names.join(","));
        s.push_str(";arrows=");
        let parts: Vec<String> = arrows
            .iter()
            .map(|a| format!("{}>{}", a.source, a.target))
            .collect();
        s.push_str(&parts.join(","));
        s
    }

    /// Hex SHA-256 of [`Self::canonical_form`].
    pub fn canonical_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_form().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// All nonzero dimension vectors with height at most `bound`.
    pub fn dims_up_to(&self, bound: u32) -> Vec<DimVector> {
        DimVector::all_up_to(self.num_vertices(), bound)
            .into_iter()
            .filter(|d| !d.is_zero())
            .collect()
    }
}

/// Double quiver: arrows `0..original` are those of `Q`, arrow `k + original`
/// is the reverse `a*` of arrow `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleQuiver {
    pub quiver: Quiver,
    pub original: usize,
}

impl DoubleQuiver {
    pub fn star(&self, k: usize) -> usize {
        if k < self.original {
            k + self.original
        } else {
            k - self.original
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleQuiver {
    pub quiver: Quiver,
    pub original: usize,
    /// Index of the added loop at vertex 0; loop at `i` is `loop_base + i`.
    pub loop_base: usize,
}

impl TripleQuiver {
    pub fn is_added_loop(&self, k: usize) -> bool {
        k >= self.loop_base
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialTerm {
    pub sign: i8,
    /// Arrow indices, composed right to left.
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Potential {
    pub terms: Vec<PotentialTerm>,
}

impl Potential {
    /// Checks that every word is a closed path of the triple quiver of
    /// length 3 containing exactly one added loop.
    pub fn validate(&self, triple: &TripleQuiver) -> Result<()> {
        let arrows = triple.quiver.arrows();
        for t in &self.terms {
            if t.word.len() != 3 {
                return Err(Error::InvalidQuiver("potential term is not cubic".into()));
            }
            let n = t.word.len();
            for k in 0..n {
                let a = arrows[t.word[k]];
                let b = arrows[t.word[(k + 1) % n]];
                if a.source != b.target {
                    return Err(Error::InvalidQuiver("potential word is not closed".into()));
                }
            }
            let loops = t.word.iter().filter(|&&k| triple.is_added_loop(k)).count();
            if loops != 1 {
                return Err(Error::InvalidQuiver(
                    "potential word must contain exactly one added loop".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Element of `Z_{>=0}^I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(pub Vec<u32>);

impl DimVector {
    pub fn zero(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DimVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn height(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c as i64).collect()
    }

    pub fn checked_sub(&self, other: &DimVector) -> Option<DimVector> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(DimVector)
    }

    /// Component-wise `self <= other`.
    pub fn le(&self, other: &DimVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Largest `d` with `self = d * base` for some integer vector `base`.
    pub fn gcd(&self) -> u32 {
        self.0.iter().fold(0, |g, &c| num::integer::gcd(g, c))
    }

    /// `self / d`; the caller guarantees divisibility.
    pub fn divide(&self, d: u32) -> DimVector {
        DimVector(self.0.iter().map(|c| c / d).collect())
    }

    /// All vectors `0 <= x <= self`, graded order.
    pub fn sub_vectors(&self) -> Vec<DimVector> {
        let mut out = vec![DimVector(Vec::new())];
        for &c in &self.0 {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..=c).map(move |k| {
                        let mut w = v.0.clone();
                        w.push(k);
                        DimVector(w)
                    })
                })
                .collect();
        }
        out.sort();
        out
    }

    /// All vectors in `Z_{>=0}^n` of height at most `bound`, graded order.
    pub fn all_up_to(n: usize, bound: u32) -> Vec<DimVector> {
        fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<DimVector>) {
            if cur.len() == n {
                out.push(DimVector(cur.clone()));
                return;
            }
            for k in 0..=left {
                cur.push(k);
                rec(n, left - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, bound, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// Graded order: by height, then reverse lexicographic on components, so
/// `e_1` precedes `e_2`.
impl Ord for DimVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.height()
            .cmp(&other.height())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for DimVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &DimVector {
    type Output = DimVector;
    fn add(self, rhs: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Mul<u32> for &DimVector {
    type Output = DimVector;
    fn mul(self, k: u32) -> DimVector {
        DimVector(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `sqrt(-1)^k`, stored as `k mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FourthRoot(u8);

impl FourthRoot {
    pub const ONE: FourthRoot = FourthRoot(0);
    pub const I: FourthRoot = FourthRoot(1);
    pub const MINUS_ONE: FourthRoot = FourthRoot(2);
    pub const MINUS_I: FourthRoot = FourthRoot(3);

    pub fn from_exponent(k: i64) -> Self {
        FourthRoot(k.rem_euclid(4) as u8)
    }

    /// `(-1)^n`.
    pub fn sign(n: i64) -> Self {
        Self::from_exponent(2 * n)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }
}

impl Mul for FourthRoot {
    type Output = FourthRoot;
    fn mul(self, rhs: FourthRoot) -> FourthRoot {
        FourthRoot((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for FourthRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["1", "i", "-1", "-i"][self.0 as usize])
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Twist `sqrt(-1)^{gamma . gamma}` of the modified reduction map.
pub fn ks_twist(gamma: &[i64]) -> FourthRoot {
    FourthRoot::from_exponent(dot(gamma, gamma))
}

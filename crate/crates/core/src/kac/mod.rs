//! Kac polynomials: Hua's generating function, finite-field brute force for
//! (absolutely) indecomposable classes, root multiplicities and Kac-Moody
//! weight multiplicities.

mod reps;

use std::collections::{BTreeMap, HashMap};

use num::{BigRational, One};
use serde::{Deserialize, Serialize};

use crate::algebra::{MotiveRat, Poly};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldRef};
use crate::quiver::{DimVector, Quiver};
use crate::series::{mobius, TorusSeries, Truncation};

pub use reps::{orbit_decomposition, OrbitDecomposition, OrbitRecord, RepSpace, ENUMERATION_GUARD};

/// Polynomial in `q` with integer coefficients, ascending powers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly(pub Vec<i64>);

impl IntPoly {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn constant(&self) -> i64 {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn eval(&self, q: i64) -> i128 {
        self.0
            .iter()
            .rev()
            .fold(0i128, |acc, &c| acc * q as i128 + c as i128)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_ints(&self.0)
    }

    /// The same polynomial with `q` read as `L`.
    pub fn to_motive(&self) -> MotiveRat {
        MotiveRat::from_l_poly(&self.to_poly())
    }

    fn from_poly(p: &Poly) -> Option<IntPoly> {
        p.coeffs()
            .iter()
            .map(|c| {
                if c.is_integer() {
                    i64::try_from(c.to_integer()).ok()
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()
            .map(IntPoly)
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m = self.to_motive();
        write!(f, "{}", m.to_string().replace('L', "q"))
    }
}

/// `gamma -> a_gamma(q)` for every nonzero `gamma` with `ht(gamma) <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KacTable {
    pub quiver_hash: String,
    pub bound: u32,
    pub entries: BTreeMap<DimVector, IntPoly>,
}

#[derive(Serialize, Deserialize)]
struct KacTableJson {
    quiver_hash: String,
    bound: u32,
    entries: Vec<(Vec<u32>, Vec<i64>)>,
}

impl Serialize for KacTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KacTableJson {
            quiver_hash: self.quiver_hash.clone(),
            bound: self.bound,
            entries: self
                .entries
                .iter()
                .map(|(g, p)| (g.0.clone(), p.0.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KacTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = KacTableJson::deserialize(d)?;
        Ok(KacTable {
            quiver_hash: j.quiver_hash,
            bound: j.bound,
            entries: j
                .entries
                .into_iter()
                .map(|(g, p)| (DimVector(g), IntPoly(p)))
                .collect(),
        })
    }
}

impl KacTable {
    pub fn get(&self, g: &DimVector) -> Result<&IntPoly> {
        self.entries
            .get(g)
            .ok_or_else(|| Error::OutsideBound(g.0.clone()))
    }
}

/// Partitions of `n` as weakly decreasing part lists.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=left.min(max)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn partition_count(n: u32) -> u64 {
    partitions(n).len() as u64
}

/// Conjugate partition.
pub fn conjugate(lambda: &[u32]) -> Vec<u32> {
    let w = lambda.first().copied().unwrap_or(0);
    (1..=w)
        .map(|k| lambda.iter().filter(|&&p| p >= k).count() as u32)
        .collect()
}

/// `<lambda, mu> = sum_k lambda'_k mu'_k`.
pub fn partition_pairing(lambda: &[u32], mu: &[u32]) -> i64 {
    conjugate(lambda)
        .iter()
        .zip(conjugate(mu).iter())
        .map(|(a, b)| (*a as i64) * (*b as i64))
        .sum()
}

/// Part multiplicities `m_k` for `k >= 1` (zeros skipped).
fn multiplicities(lambda: &[u32]) -> Vec<u32> {
    let mut m: BTreeMap<u32, u32> = BTreeMap::new();
    for &p in lambda {
        *m.entry(p).or_default() += 1;
    }
    m.into_values().collect()
}

/// One term of Hua's sum for an I-tuple of partitions.
pub(crate) fn hua_term(q: &Quiver, tuple: &[&Vec<u32>]) -> MotiveRat {
    let mut exp: i64 = 0;
    for a in q.arrows() {
        exp += partition_pairing(tuple[a.source], tuple[a.target]);
    }
    let mut den = Poly::one();
    for lambda in tuple {
        exp -= partition_pairing(lambda, lambda);
        for m in multiplicities(lambda) {
            for j in 1..=m as usize {
                // 1 - L^{-j} = (L^j - 1) / L^j
                exp += j as i64;
                den = &den * &(&Poly::monomial(BigRational::one(), j) - &Poly::one());
            }
        }
    }
    &MotiveRat::lefschetz_pow(exp) / &MotiveRat::from_l_poly(&den)
}

fn hua_coefficient(q: &Quiver, g: &DimVector) -> MotiveRat {
    let choices: Vec<Vec<Vec<u32>>> = g.0.iter().map(|&n| partitions(n)).collect();
    let mut acc = MotiveRat::zero();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let tuple: Vec<&Vec<u32>> = idx.iter().zip(&choices).map(|(&i, c)| &c[i]).collect();
        acc = &acc + &hua_term(q, &tuple);
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return acc;
        }
    }
}

/// Hua's formula: `a_gamma = (q - 1) Log(P)_gamma` where `P` is the sum over
/// I-tuples of partitions.
pub fn hua_kac(q: &Quiver, bound: u32) -> Result<KacTable> {
    let n = q.num_vertices();
    let trunc = Truncation::height(bound);
    let terms: Vec<(DimVector, MotiveRat)> = {
        use rayon::prelude::*;
        trunc
            .vectors(n)
            .into_par_iter()
            .map(|g| {
                let c = hua_coefficient(q, &g);
                (g, c)
            })
            .collect()
    };
    let p = TorusSeries::from_terms(n, trunc.clone(), terms);
    let log = p.plethystic_log()?;
    let lm1 = &MotiveRat::lefschetz() - &MotiveRat::one();
    let mut entries = BTreeMap::new();
    for g in trunc.vectors(n) {
        if g.is_zero() {
            continue;
        }
        let c = &log.coeff(&g).unwrap() * &lm1;
        let poly = c
            .as_l_function()
            .filter(|(_, d)| d.is_one())
            .and_then(|(num, _)| IntPoly::from_poly(&num))
            .ok_or_else(|| Error::DenominatorNotCleared(format!("{g}: {c}")))?;
        if poly.0.iter().any(|&c| c < 0) {
            return Err(Error::Positivity(format!("{g}: {poly}")));
        }
        entries.insert(g, poly);
    }
    Ok(KacTable {
        quiver_hash: q.canonical_hash(),
        bound,
        entries,
    })
}

/// Constant term of `a_gamma`.
pub fn root_multiplicity(table: &KacTable, g: &DimVector) -> Result<u64> {
    Ok(table.get(g)?.constant() as u64)
}

/// `[t^gamma] prod_{alpha > 0} (1 - t^alpha)^{-mult(alpha)}`.
pub fn km_weight_dim(q: &Quiver, g: &DimVector) -> Result<u64> {
    if !q.is_loop_free() {
        return Err(Error::ImaginaryUnsupported);
    }
    if g.len() != q.num_vertices() {
        return Err(Error::VertexMismatch {
            expected: q.num_vertices(),
            got: g.len(),
        });
    }
    let table = hua_kac(q, g.height().max(1))?;
    km_weight_dim_from(&table, g)
}

/// As [`km_weight_dim`], reusing a table that covers `gamma`.
pub fn km_weight_dim_from(table: &KacTable, g: &DimVector) -> Result<u64> {
    let trunc = Truncation::boxed(g.clone());
    let terms = trunc
        .vectors(g.len())
        .into_iter()
        .filter(|a| !a.is_zero())
        .map(|a| {
            let m = root_multiplicity(table, &a)?;
            Ok((a, MotiveRat::from_int(m as i64)))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = TorusSeries::from_terms(g.len(), trunc, terms);
    let c = f.plethystic_exp()?.coeff(g).unwrap();
    c.as_constant()
        .filter(|c| c.is_integer())
        .map(|c| c.to_integer().try_into().unwrap())
        .ok_or_else(|| Error::OracleDisagreement(format!("non-integral weight multiplicity {c}")))
}

/// Indecomposable isomorphism classes over the prime field `F_q`.
pub fn brute_indecomposable_classes(q: &Quiver, g: &DimVector, p: u64) -> Result<u64> {
    let f = Field::prime(p)?;
    Ok(orbit_decomposition(q, g, &f, ENUMERATION_GUARD)?.indecomposable_count())
}

/// Absolutely indecomposable classes over `F_q`, by Galois descent from
/// indecomposable counts over `F_q` and its extensions.
pub fn brute_abs_indec(q: &Quiver, g: &DimVector, p: u64) -> Result<u64> {
    Field::prime(p)?;
    if g.len() != q.num_vertices() {
        return Err(Error::VertexMismatch {
            expected: q.num_vertices(),
            got: g.len(),
        });
    }
    if g.is_zero() {
        return Ok(0);
    }
    let mut d = Descent {
        quiver: q,
        p,
        fields: HashMap::new(),
        indec: HashMap::new(),
        abs: HashMap::new(),
    };
    let a = d.abs(g, 1)?;
    u64::try_from(a).map_err(|_| Error::OracleDisagreement(format!("negative count {a} at {g}")))
}

struct Descent<'a> {
    quiver: &'a Quiver,
    p: u64,
    fields: HashMap<u32, FieldRef>,
    indec: HashMap<(DimVector, u32), i128>,
    abs: HashMap<(DimVector, u32), i128>,
}

impl Descent<'_> {
    fn field(&mut self, r: u32) -> Result<FieldRef> {
        if let Some(f) = self.fields.get(&r) {
            return Ok(f.clone());
        }
        let f = Field::extension(self.p, r)?;
        self.fields.insert(r, f.clone());
        Ok(f)
    }

    fn indec(&mut self, g: &DimVector, r: u32) -> Result<i128> {
        if let Some(&v) = self.indec.get(&(g.clone(), r)) {
            return Ok(v);
        }
        let f = self.field(r)?;
        let v = orbit_decomposition(self.quiver, g, &f, ENUMERATION_GUARD)?.indecomposable_count()
            as i128;
        self.indec.insert((g.clone(), r), v);
        Ok(v)
    }

    /// `A_gamma(p^r)` from
    /// `I_gamma(Q) = sum_{d | gamma} 1/d sum_{e | d} mu(d/e) A_{gamma/d}(Q^e)`.
    fn abs(&mut self, g: &DimVector, r: u32) -> Result<i128> {
        if let Some(&v) = self.abs.get(&(g.clone(), r)) {
            return Ok(v);
        }
        let mut v = self.indec(g, r)?;
        let gcd = g.gcd();
        for d in 2..=gcd {
            if !gcd.is_multiple_of(d) {
                continue;
            }
            let base = g.divide(d);
            let mut inner = 0i128;
            for e in 1..=d {
                if d % e == 0 {
                    let mu = mobius((d / e) as u64) as i128;
                    if mu != 0 {
                        inner += mu * self.abs(&base, r * e)?;
                    }
                }
            }
            if inner % d as i128 != 0 {
                return Err(Error::OracleDisagreement(format!(
                    "descent term for {g} over F_{}^{} not divisible by {d}",
                    self.p, r
                )));
            }
            v -= inner / d as i128;
        }
        self.abs.insert((g.clone(), r), v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector(v.to_vec())
    }

    #[test]
    fn partition_helpers() {
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(conjugate(&[3, 1]), vec![2, 1, 1]);
        assert_eq!(partition_pairing(&[2], &[1, 1]), 2);
        assert_eq!(partition_pairing(&[], &[2]), 0);
    }

    #[test]
    fn jordan_kac_polynomials_are_q() {
        let t = hua_kac(&Quiver::jordan(), 3).unwrap();
        for n in 1..=3 {
            assert_eq!(t.get(&dv(&[n])).unwrap(), &IntPoly(vec![0, 1]));
        }
    }

    #[test]
    fn a1_and_kronecker_tables() {
        let t = hua_kac(&Quiver::a1(), 2).unwrap();
        assert_eq!(t.get(&dv(&[1])).unwrap(), &IntPoly(vec![1]));
        assert!(t.get(&dv(&[2])).unwrap().is_zero());
        let k = hua_kac(&Quiver::kronecker(), 2).unwrap();
        assert_eq!(k.get(&dv(&[1, 1])).unwrap(), &IntPoly(vec![1, 1]));
        assert_eq!(k.get(&dv(&[1, 0])).unwrap(), &IntPoly(vec![1]));
    }

    #[test]
    fn loop_vertices_have_a_equal_q_to_the_loops() {
        let t = hua_kac(&Quiver::loops(3), 1).unwrap();
        assert_eq!(t.get(&dv(&[1])).unwrap(), &IntPoly(vec![0, 0, 0, 1]));
    }

    #[test]
    fn brute_force_spot_values() {
        assert_eq!(
            brute_indecomposable_classes(&Quiver::a1(), &dv(&[1]), 2).unwrap(),
            1
        );
        assert_eq!(
            brute_indecomposable_classes(&Quiver::kronecker(), &dv(&[1, 1]), 2).unwrap(),
            3
        );
        assert_eq!(
            brute_indecomposable_classes(&Quiver::jordan(), &dv(&[2]), 2).unwrap(),
            3
        );
        assert_eq!(
            brute_abs_indec(&Quiver::kronecker(), &dv(&[1, 1]), 2).unwrap(),
            3
        );
        assert_eq!(
            brute_abs_indec(&Quiver::kronecker(), &dv(&[1, 1]), 3).unwrap(),
            4
        );
        assert_eq!(brute_abs_indec(&Quiver::jordan(), &dv(&[2]), 2).unwrap(), 2);
        assert_eq!(brute_abs_indec(&Quiver::a1(), &dv(&[2]), 3).unwrap(), 0);
    }

    #[test]
    fn root_multiplicities_and_weights() {
        let a2 = Quiver::a2();
        let t = hua_kac(&a2, 3).unwrap();
        assert_eq!(root_multiplicity(&t, &dv(&[1, 1])).unwrap(), 1);
        assert_eq!(root_multiplicity(&t, &dv(&[2, 1])).unwrap(), 0);
        let k = hua_kac(&Quiver::kronecker(), 2).unwrap();
        assert_eq!(root_multiplicity(&k, &dv(&[1, 1])).unwrap(), 1);
        assert_eq!(km_weight_dim(&a2, &dv(&[1, 1])).unwrap(), 2);
        assert_eq!(km_weight_dim(&a2, &dv(&[1, 0])).unwrap(), 1);
        assert_eq!(km_weight_dim(&a2, &dv(&[2, 1])).unwrap(), 2);
        assert_eq!(
            km_weight_dim(&Quiver::jordan(), &dv(&[1])),
            Err(Error::ImaginaryUnsupported)
        );
    }

    #[test]
    fn table_json_round_trip() {
        let t = hua_kac(&Quiver::kronecker(), 2).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("[[1,1],[1,1]]"));
        let back: KacTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}

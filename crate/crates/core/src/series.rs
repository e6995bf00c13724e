//! Truncated series over the commutative quantum torus `ê_a ê_b = ê_{a+b}`,
//! with plethystic exponential and logarithm, plus central charges.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::MotiveRat;
use crate::error::{Error, Result};
use crate::quiver::DimVector;

/// Downward-closed truncation region: a height cutoff, a box, or both.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub height: Option<u32>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none", default)]
    pub boxed: Option<DimVector>,
}

impl Truncation {
    pub fn height(n: u32) -> Self {
        Truncation {
            height: Some(n),
            boxed: None,
        }
    }

    pub fn boxed(b: DimVector) -> Self {
        Truncation {
            height: None,
            boxed: Some(b),
        }
    }

    pub fn contains(&self, g: &DimVector) -> bool {
        self.height.is_none_or(|h| g.height() <= h) && self.boxed.as_ref().is_none_or(|b| g.le(b))
    }

    pub fn meet(&self, other: &Truncation) -> Truncation {
        let height = match (self.height, other.height) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let boxed = match (&self.boxed, &other.boxed) {
            (Some(a), Some(b)) => Some(DimVector(
                a.0.iter().zip(&b.0).map(|(x, y)| *x.min(y)).collect(),
            )),
            (a, b) => a.clone().or(b.clone()),
        };
        Truncation { height, boxed }
    }

    /// Every vector in the region, graded order (zero first).
    pub fn vectors(&self, n: usize) -> Vec<DimVector> {
        match (&self.boxed, self.height) {
            (Some(b), _) => b
                .sub_vectors()
                .into_iter()
                .filter(|g| self.contains(g))
                .collect(),
            (None, Some(h)) => DimVector::all_up_to(n, h),
            (None, None) => panic!("unbounded truncation"),
        }
    }
}

/// `sum c_gamma ê_gamma` known for every `gamma` inside the truncation.
/// Coefficients inside the region that are not stored are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusSeries {
    rank: usize,
    bound: Truncation,
    coeffs: BTreeMap<DimVector, MotiveRat>,
}

impl TorusSeries {
    pub fn zero(rank: usize, bound: Truncation) -> Self {
        TorusSeries {
            rank,
            bound,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize, bound: Truncation) -> Self {
        let mut s = Self::zero(rank, bound);
        s.set(DimVector::zero(rank), MotiveRat::one());
        s
    }

    /// Builds from explicit terms; terms outside the region are dropped.
    pub fn from_terms<I>(rank: usize, bound: Truncation, terms: I) -> Self
    where
        I: IntoIterator<Item = (DimVector, MotiveRat)>,
    {
        let mut s = Self::zero(rank, bound);
        for (g, c) in terms {
            assert_eq!(g.len(), rank);
            if s.bound.contains(&g) {
                let cur = s.get(&g);
                s.set(g, &cur + &c);
            }
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bound(&self) -> &Truncation {
        &self.bound
    }

    /// Coefficient of `ê_g`, or `None` outside the truncation.
    pub fn coeff(&self, g: &DimVector) -> Option<MotiveRat> {
        self.bound.contains(g).then(|| self.get(g))
    }

    fn get(&self, g: &DimVector) -> MotiveRat {
        self.coeffs.get(g).cloned().unwrap_or_else(MotiveRat::zero)
    }

    fn set(&mut self, g: DimVector, c: MotiveRat) {
        if c.is_zero() {
            self.coeffs.remove(&g);
        } else {
            self.coeffs.insert(g, c);
        }
    }

    pub fn constant_term(&self) -> MotiveRat {
        self.get(&DimVector::zero(self.rank))
    }

    /// Nonzero terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&DimVector, &MotiveRat)> {
        self.coeffs.iter()
    }

    pub fn vectors(&self) -> Vec<DimVector> {
        self.bound.vectors(self.rank)
    }

    fn check_compatible(&self, other: &TorusSeries) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::VertexMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TorusSeries) -> Result<TorusSeries> {
        self.check_compatible(other)?;
        let bound = self.bound.meet(&other.bound);
        let terms = self
            .terms()
            .chain(other.terms())
            .map(|(g, c)| (g.clone(), c.clone()));
        Ok(TorusSeries::from_terms(self.rank, bound, terms))
    }

    pub fn neg(&self) -> TorusSeries {
        self.map_coeffs(|c| -c)
    }

    pub fn map_coeffs(&self, f: impl Fn(&MotiveRat) -> MotiveRat) -> TorusSeries {
        TorusSeries::from_terms(
            self.rank,
            self.bound.clone(),
            self.terms().map(|(g, c)| (g.clone(), f(c))),
        )
    }

    /// Keeps the terms whose exponent satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&DimVector) -> bool) -> TorusSeries {
        TorusSeries::from_terms(
            self.rank,
            self.bound.clone(),
            self.terms()
                .filter(|(g, _)| keep(g))
                .map(|(g, c)| (g.clone(), c.clone())),
        )
    }

    /// Cauchy product; the result lives on the intersection of the regions.
    pub fn mul(&self, other: &TorusSeries) -> Result<TorusSeries> {
        self.check_compatible(other)?;
        let bound = self.bound.meet(&other.bound);
        let out: Vec<(DimVector, MotiveRat)> = bound
            .vectors(self.rank)
            .into_par_iter()
            .map(|g| {
                let mut acc = MotiveRat::zero();
                for (b, cb) in self.terms() {
                    if let Some(d) = g.checked_sub(b) {
                        if let Some(cd) = other.coeffs.get(&d) {
                            acc = &acc + &(cb * cd);
                        }
                    }
                }
                (g, acc)
            })
            .collect();
        Ok(TorusSeries::from_terms(self.rank, bound, out))
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn inverse(&self) -> Result<TorusSeries> {
        let c0 = self.constant_term();
        let c0_inv = c0.checked_inv().ok_or(Error::NonUnitConstant)?;
        let mut inv = TorusSeries::zero(self.rank, self.bound.clone());
        for g in self.vectors() {
            if g.is_zero() {
                inv.set(g, c0_inv.clone());
                continue;
            }
            let mut acc = MotiveRat::zero();
            for (b, cb) in self.terms() {
                if b.is_zero() {
                    continue;
                }
                if let Some(d) = g.checked_sub(b) {
                    if let Some(cd) = inv.coeffs.get(&d) {
                        acc = &acc + &(cb * cd);
                    }
                }
            }
            inv.set(g, -(&acc * &c0_inv));
        }
        Ok(inv)
    }

    /// `psi_k`: coefficients by Adams operations, exponents scaled by `k`.
    pub fn adams(&self, k: usize) -> TorusSeries {
        TorusSeries::from_terms(
            self.rank,
            self.bound.clone(),
            self.terms().map(|(g, c)| (g * k as u32, c.adams(k))),
        )
    }

    fn max_height(&self) -> u32 {
        self.vectors()
            .iter()
            .map(DimVector::height)
            .max()
            .unwrap_or(0)
    }

    /// `exp` of a series with zero constant term, via the height derivation
    /// `D(E) = D(H) E`.
    fn exp_series(h: &TorusSeries) -> TorusSeries {
        let mut e = TorusSeries::one(h.rank, h.bound.clone());
        for g in h.vectors() {
            if g.is_zero() {
                continue;
            }
            let mut acc = MotiveRat::zero();
            for (b, cb) in h.terms() {
                if let Some(d) = g.checked_sub(b) {
                    if let Some(cd) = e.coeffs.get(&d) {
                        let w = BigRational::from_integer(b.height().into());
                        acc = &acc + &(cb * cd).scale(&w);
                    }
                }
            }
            let ht = BigRational::from_integer(g.height().into());
            e.set(g, acc.scale(&ht.recip()));
        }
        e
    }

    /// `log` of a series with constant term 1, via `D(A) = D(H) A`.
    fn log_series(a: &TorusSeries) -> TorusSeries {
        let mut h = TorusSeries::zero(a.rank, a.bound.clone());
        for g in a.vectors() {
            if g.is_zero() {
                continue;
            }
            let ht = BigRational::from_integer(g.height().into());
            let mut acc = a.get(&g).scale(&ht);
            for (b, cb) in h.terms() {
                if let Some(d) = g.checked_sub(b) {
                    if d.is_zero() {
                        continue;
                    }
                    if let Some(cd) = a.coeffs.get(&d) {
                        let w = BigRational::from_integer(b.height().into());
                        acc = &acc - &(cb * cd).scale(&w);
                    }
                }
            }
            h.set(g, acc.scale(&ht.recip()));
        }
        h
    }

    /// Plethystic exponential `Exp(f) = exp(sum_k psi_k(f) / k)`.
    pub fn plethystic_exp(&self) -> Result<TorusSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::BadConstantTerm { expected: "0" });
        }
        let top = self.max_height() as usize;
        let mut h = TorusSeries::zero(self.rank, self.bound.clone());
        for k in 1..=top.max(1) {
            let scale = BigRational::new(BigInt::one(), BigInt::from(k));
            h = h.add(&self.adams(k).map_coeffs(|c| c.scale(&scale)))?;
        }
        Ok(Self::exp_series(&h))
    }

    /// Plethystic logarithm, inverse to [`Self::plethystic_exp`].
    pub fn plethystic_log(&self) -> Result<TorusSeries> {
        if !self.constant_term().is_one() {
            return Err(Error::BadConstantTerm { expected: "1" });
        }
        let h = Self::log_series(self);
        let top = self.max_height() as usize;
        let mut f = TorusSeries::zero(self.rank, self.bound.clone());
        for k in 1..=top.max(1) {
            let mu = mobius(k as u64);
            if mu == 0 {
                continue;
            }
            let scale = BigRational::new(BigInt::from(mu), BigInt::from(k));
            f = f.add(&h.adams(k).map_coeffs(|c| c.scale(&scale)))?;
        }
        Ok(f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeriesJson::from(self)).unwrap()
    }
}

/// Möbius function.
pub fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Wire form: ordered `[gamma, value]` pairs.
#[derive(Serialize, Deserialize)]
pub struct SeriesJson {
    pub rank: usize,
    pub bound: Truncation,
    pub coefficients: Vec<(Vec<u32>, MotiveRat)>,
}

impl From<&TorusSeries> for SeriesJson {
    fn from(s: &TorusSeries) -> Self {
        SeriesJson {
            rank: s.rank,
            bound: s.bound.clone(),
            coefficients: s.terms().map(|(g, c)| (g.0.clone(), c.clone())).collect(),
        }
    }
}

impl From<SeriesJson> for TorusSeries {
    fn from(j: SeriesJson) -> Self {
        TorusSeries::from_terms(
            j.rank,
            j.bound,
            j.coefficients.into_iter().map(|(g, c)| (DimVector(g), c)),
        )
    }
}

impl Serialize for TorusSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SeriesJson::deserialize(d).map(TorusSeries::from)
    }
}

/// Central charge `Z(e_i) = z_i` with every `Im z_i > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, String)>", into = "Vec<(String, String)>")]
pub struct CentralCharge {
    /// `(Re z_i, Im z_i)` per vertex.
    pub z: Vec<(BigRational, BigRational)>,
}

impl CentralCharge {
    pub fn new(z: Vec<(BigRational, BigRational)>) -> Result<Self> {
        if let Some(i) = z.iter().position(|(_, im)| !im.is_positive()) {
            return Err(Error::InvalidCharge(format!(
                "imaginary part of z_{} must be positive",
                i + 1
            )));
        }
        Ok(CentralCharge { z })
    }

    pub fn from_ints(z: &[(i64, i64)]) -> Result<Self> {
        Self::new(
            z.iter()
                .map(|&(re, im)| {
                    (
                        BigRational::from_integer(re.into()),
                        BigRational::from_integer(im.into()),
                    )
                })
                .collect(),
        )
    }

    /// `z_i = sqrt(-1)` for every vertex: all classes share one ray.
    pub fn standard(rank: usize) -> Self {
        Self::from_ints(&vec![(0, 1); rank]).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.z.len()
    }

    pub fn eval(&self, g: &DimVector) -> (BigRational, BigRational) {
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for (c, (zr, zi)) in g.0.iter().zip(&self.z) {
            let c = BigRational::from_integer((*c).into());
            re += &c * zr;
            im += &c * zi;
        }
        (re, im)
    }

    /// Compares `arg Z(a)` with `arg Z(b)` for nonzero classes in the upper
    /// half plane; `Greater` means `a` has the larger phase.
    pub fn cmp_phase(&self, a: &DimVector, b: &DimVector) -> Ordering {
        let (ar, ai) = self.eval(a);
        let (br, bi) = self.eval(b);
        // arg a > arg b  iff  cross(b, a) > 0
        let cross = &br * &ai - &bi * &ar;
        cross.cmp(&BigRational::zero())
    }

    pub fn same_ray(&self, a: &DimVector, b: &DimVector) -> bool {
        self.cmp_phase(a, b) == Ordering::Equal
    }

    /// Verifies that non-proportional classes in the region have distinct rays.
    pub fn check_generic(&self, bound: &Truncation) -> Result<()> {
        let vs: Vec<DimVector> = bound
            .vectors(self.rank())
            .into_iter()
            .filter(|g| !g.is_zero())
            .collect();
        for (i, a) in vs.iter().enumerate() {
            for b in &vs[i + 1..] {
                if self.same_ray(a, b) && !proportional(a, b) {
                    return Err(Error::DegenerateCharge(format!("{a} and {b} share a ray")));
                }
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<(String, String)>> for CentralCharge {
    type Error = Error;
    fn try_from(v: Vec<(String, String)>) -> Result<Self> {
        let parse = |s: &str| {
            s.parse::<BigRational>()
                .map_err(|_| Error::InvalidCharge(format!("bad rational {s:?}")))
        };
        CentralCharge::new(
            v.iter()
                .map(|(re, im)| Ok((parse(re)?, parse(im)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl From<CentralCharge> for Vec<(String, String)> {
    fn from(c: CentralCharge) -> Self {
        c.z.iter()
            .map(|(re, im)| (re.to_string(), im.to_string()))
            .collect()
    }
}

pub fn proportional(a: &DimVector, b: &DimVector) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| a.0[i] as u64 * b.0[j] as u64 == a.0[j] as u64 * b.0[i] as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> MotiveRat {
        s.parse().unwrap()
    }

    fn t1(coeffs: &[&str], n: u32) -> TorusSeries {
        TorusSeries::from_terms(
            1,
            Truncation::height(n),
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (DimVector(vec![k as u32]), m(c))),
        )
    }

    #[test]
    fn product_examples() {
        let a = t1(&["1", "1"], 4);
        assert_eq!(a.mul(&a).unwrap(), t1(&["1", "2", "1"], 4));
        let one = TorusSeries::one(1, Truncation::height(4));
        assert_eq!(a.mul(&one).unwrap(), a);

        let b = Truncation::height(3);
        let x = TorusSeries::from_terms(
            2,
            b.clone(),
            [
                (DimVector(vec![0, 0]), m("1")),
                (DimVector(vec![1, 0]), m("1")),
            ],
        );
        let y = TorusSeries::from_terms(
            2,
            b.clone(),
            [
                (DimVector(vec![0, 0]), m("1")),
                (DimVector(vec![0, 1]), m("1")),
            ],
        );
        let expect = TorusSeries::from_terms(
            2,
            b,
            [
                (DimVector(vec![0, 0]), m("1")),
                (DimVector(vec![1, 0]), m("1")),
                (DimVector(vec![0, 1]), m("1")),
                (DimVector(vec![1, 1]), m("1")),
            ],
        );
        assert_eq!(x.mul(&y).unwrap(), expect);
    }

    #[test]
    fn product_truncates_to_common_bound() {
        let a = t1(&["1", "1"], 4);
        let b = t1(&["1", "1"], 2);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.bound(), &Truncation::height(2));
        assert_eq!(p.coeff(&DimVector(vec![3])), None);
    }

    #[test]
    fn inverse_examples() {
        let a = t1(&["1", "-1"], 5);
        assert_eq!(a.inverse().unwrap(), t1(&["1"; 6], 5));
        let one = TorusSeries::one(1, Truncation::height(3));
        assert_eq!(one.inverse().unwrap(), one);
        assert_eq!(t1(&["0", "1"], 3).inverse(), Err(Error::NonUnitConstant));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(
            t1(&["0", "1"], 5).plethystic_exp().unwrap(),
            t1(&["1"; 6], 5)
        );
        assert_eq!(
            t1(&["0", "L"], 4).plethystic_exp().unwrap(),
            t1(&["1", "L", "L^2", "L^3", "L^4"], 4)
        );
        // coefficient of t^2 in Exp(c t) is psi_2(c)/2 + c^2/2
        let c = m("(2*L - 1)/(L + 3)");
        let e =
            TorusSeries::from_terms(1, Truncation::height(2), [(DimVector(vec![1]), c.clone())])
                .plethystic_exp()
                .unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let expect = (&c.adams(2) + &(&c * &c)).scale(&half);
        assert_eq!(e.coeff(&DimVector(vec![2])).unwrap(), expect);
        assert!(t1(&["1", "1"], 2).plethystic_exp().is_err());
    }

    #[test]
    fn log_examples() {
        assert_eq!(
            t1(&["1"; 6], 5).plethystic_log().unwrap(),
            t1(&["0", "1"], 5)
        );
        assert_eq!(
            TorusSeries::one(1, Truncation::height(3))
                .plethystic_log()
                .unwrap(),
            TorusSeries::zero(1, Truncation::height(3))
        );
        let f = t1(&["0", "L", "L^2"], 4);
        assert_eq!(f.plethystic_exp().unwrap().plethystic_log().unwrap(), f);
        assert!(t1(&["2", "1"], 2).plethystic_log().is_err());
    }

    #[test]
    fn mobius_values() {
        let got: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(got, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }

    #[test]
    fn charge_validation_and_phase() {
        assert!(CentralCharge::from_ints(&[(1, 0)]).is_err());
        let z = CentralCharge::from_ints(&[(-1, 1), (1, 1)]).unwrap();
        let e1 = DimVector(vec![1, 0]);
        let e2 = DimVector(vec![0, 1]);
        assert_eq!(z.cmp_phase(&e1, &e2), Ordering::Greater);
        z.check_generic(&Truncation::height(3)).unwrap();
        assert!(matches!(
            CentralCharge::standard(2).check_generic(&Truncation::height(2)),
            Err(Error::DegenerateCharge(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let f = t1(&["1", "L^2/(L - 1)", "s"], 3);
        let text = serde_json::to_string(&f).unwrap();
        let back: TorusSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }
}

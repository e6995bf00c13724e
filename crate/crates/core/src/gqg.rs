//! Bozec's generalized quantum group: the free algebra on `E_(i,l)` over
//! `Q(v)`, its twisted coproduct and bilinear form, the Serre-type and
//! commutator relations, and Gram-rank dimensions of `U^+`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Poly, RatV};
use crate::error::{Error, Result};
use crate::kac::{km_weight_dim, partition_count};
use crate::quiver::{DimVector, Quiver};

/// Largest height accepted by word enumeration.
pub const MAX_HEIGHT: u32 = 6;

/// `E_(i,l)`; `l = 1` at real vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneratorIndex {
    pub vertex: usize,
    pub l: u32,
}

impl GeneratorIndex {
    pub fn weight(&self, n: usize) -> DimVector {
        let mut g = DimVector::zero(n);
        g.0[self.vertex] = self.l;
        g
    }
}

impl fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E({},{})", self.vertex + 1, self.l)
    }
}

pub type Word = Vec<GeneratorIndex>;

fn word_weight(w: &[GeneratorIndex], n: usize) -> DimVector {
    let mut g = DimVector::zero(n);
    for e in w {
        g.0[e.vertex] += e.l;
    }
    g
}

/// Generators of weight at most `g`.
pub fn generators(q: &Quiver, g: &DimVector) -> Vec<GeneratorIndex> {
    let mut out = Vec::new();
    for (i, &c) in g.0.iter().enumerate() {
        let top = if q.is_real(i) { c.min(1) } else { c };
        out.extend((1..=top).map(|l| GeneratorIndex { vertex: i, l }));
    }
    out
}

/// All words of weight `g`, in lexicographic order of generator sequences.
pub fn graded_words(q: &Quiver, g: &DimVector) -> Result<Vec<Word>> {
    if g.len() != q.num_vertices() {
        return Err(Error::VertexMismatch {
            expected: q.num_vertices(),
            got: g.len(),
        });
    }
    if g.height() > MAX_HEIGHT {
        return Err(Error::TooLarge(format!(
            "height {} exceeds the word limit {MAX_HEIGHT}",
            g.height()
        )));
    }
    let gens = generators(q, g);
    let mut out = Vec::new();
    fn rec(gens: &[GeneratorIndex], left: &mut DimVector, cur: &mut Word, out: &mut Vec<Word>) {
        if left.is_zero() {
            out.push(cur.clone());
            return;
        }
        for e in gens {
            if left.0[e.vertex] >= e.l {
                left.0[e.vertex] -= e.l;
                cur.push(*e);
                rec(gens, left, cur, out);
                cur.pop();
                left.0[e.vertex] += e.l;
            }
        }
    }
    rec(&gens, &mut g.clone(), &mut Vec::new(), &mut out);
    Ok(out)
}

/// `Q(v)`-linear combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GqgElement {
    pub terms: BTreeMap<Word, RatV>,
}

impl GqgElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, RatV::one())
    }

    pub fn term(w: Word, c: RatV) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn add_term(&mut self, w: Word, c: RatV) {
        let cur = self.terms.remove(&w).unwrap_or_else(RatV::zero);
        let next = &cur + &c;
        if !next.is_zero() {
            self.terms.insert(w, next);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &GqgElement) -> GqgElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RatV) -> GqgElement {
        let mut out = GqgElement::zero();
        for (w, d) in &self.terms {
            out.add_term(w.clone(), d * c);
        }
        out
    }

    pub fn mul(&self, other: &GqgElement) -> GqgElement {
        let mut out = GqgElement::zero();
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, c * d);
            }
        }
        out
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, other: &GqgElement) -> GqgElement {
        self.mul(other)
            .add(&other.mul(self).scale(&RatV::from_int(-1)))
    }
}

impl fmt::Display for GqgElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for e in w {
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

/// Sign of the twist in `(a⊗b)(c⊗d) = v^{eps (|b|,|c|)} ac⊗bd`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Twist {
    Plus,
    Minus,
}

impl Twist {
    pub fn sign(self) -> i64 {
        match self {
            Twist::Plus => 1,
            Twist::Minus => -1,
        }
    }
}

/// Twist used by [`pairing`] and [`u_plus_dim`]. The radical test does not
/// separate the two signs (see [`calibrate_twist`]); `Plus` is Lusztig's
/// convention, and dimensions agree under either sign.
pub const DEFAULT_TWIST: Twist = Twist::Plus;

/// Element of `F ⊗ F`.
pub type Tensor = BTreeMap<(Word, Word), RatV>;

/// `v_i = v^{(i,i)/2} = v^{1 - omega_i}`.
fn v_vertex_exp(q: &Quiver, i: usize) -> i64 {
    q.cartan_entry(i, i) / 2
}

fn sym_form(q: &Quiver, a: &DimVector, b: &DimVector) -> i64 {
    q.sym_euler_form(&a.to_i64(), &b.to_i64())
        .expect("matching ranks")
}

/// `delta(x)` as an element of the twisted tensor square.
pub fn coproduct(q: &Quiver, x: &GqgElement, twist: Twist) -> Tensor {
    let mut out = Tensor::new();
    for (w, c) in &x.terms {
        for ((a, b), d) in coproduct_word(q, w, twist) {
            let e = out
                .remove(&(a.clone(), b.clone()))
                .unwrap_or_else(RatV::zero);
            let s = &e + &(c * &d);
            if !s.is_zero() {
                out.insert((a, b), s);
            }
        }
    }
    out
}

/// `delta` of a single word, expanded as the twisted product of the
/// generator coproducts.
fn coproduct_word(q: &Quiver, w: &[GeneratorIndex], twist: Twist) -> Tensor {
    let n = q.num_vertices();
    // (left word, right word, exponent of v)
    let mut acc: Vec<(Word, Word, i64)> = vec![(Vec::new(), Vec::new(), 0)];
    for e in w {
        let vi = v_vertex_exp(q, e.vertex);
        let mut next = Vec::new();
        for (a, b, k) in &acc {
            let bw = word_weight(b, n);
            for l1 in 0..=e.l {
                let l2 = e.l - l1;
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                if l1 > 0 {
                    a2.push(GeneratorIndex {
                        vertex: e.vertex,
                        l: l1,
                    });
                }
                if l2 > 0 {
                    b2.push(GeneratorIndex {
                        vertex: e.vertex,
                        l: l2,
                    });
                }
                let cw = GeneratorIndex {
                    vertex: e.vertex,
                    l: l1,
                }
                .weight(n);
                let tw = twist.sign() * sym_form(q, &bw, &cw);
                next.push((a2, b2, k + tw + vi * (l1 * l2) as i64));
            }
        }
        acc = next;
    }
    let mut out = Tensor::new();
    for (a, b, k) in acc {
        let e = out
            .remove(&(a.clone(), b.clone()))
            .unwrap_or_else(RatV::zero);
        let s = &e + &RatV::var_pow(k);
        if !s.is_zero() {
            out.insert((a, b), s);
        }
    }
    out
}

/// Choice of the values `v_iota = {E_iota, E_iota}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct FormParams {
    /// `v_(i,l)` for imaginary vertices: `1/(1 - v^{-2})` by default, or
    /// `1/(1 - v^{-2l})` when perturbed.
    pub perturbed: bool,
    #[serde(default)]
    pub overrides: BTreeMap<String, RatV>,
}

impl FormParams {
    pub fn perturbed() -> Self {
        FormParams {
            perturbed: true,
            overrides: BTreeMap::new(),
        }
    }

    fn key(e: &GeneratorIndex) -> String {
        format!("{},{}", e.vertex + 1, e.l)
    }

    pub fn set(&mut self, e: GeneratorIndex, value: RatV) -> Result<()> {
        if value.is_zero() {
            return Err(Error::InvalidFormParam(format!("{e} must be nonzero")));
        }
        self.overrides.insert(Self::key(&e), value);
        Ok(())
    }

    pub fn value(&self, q: &Quiver, e: &GeneratorIndex) -> Result<RatV> {
        if let Some(v) = self.overrides.get(&Self::key(e)) {
            if v.is_zero() {
                return Err(Error::InvalidFormParam(format!("{e} is zero")));
            }
            return Ok(v.clone());
        }
        let one = RatV::one();
        let denom = if q.is_real(e.vertex) {
            // 1 - v_i^{-2}
            &one - &RatV::var_pow(-2 * v_vertex_exp(q, e.vertex))
        } else if self.perturbed {
            &one - &RatV::var_pow(-2 * e.l as i64)
        } else {
            &one - &RatV::var_pow(-2)
        };
        Ok(denom.inv())
    }
}

/// Memoized evaluator of `{x, y}` on words.
pub struct Pairing<'a> {
    quiver: &'a Quiver,
    params: &'a FormParams,
    twist: Twist,
    memo: Mutex<HashMap<(Word, Word), RatV>>,
}

impl<'a> Pairing<'a> {
    pub fn new(quiver: &'a Quiver, params: &'a FormParams, twist: Twist) -> Self {
        Pairing {
            quiver,
            params,
            twist,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn words(&self, x: &[GeneratorIndex], y: &[GeneratorIndex]) -> Result<RatV> {
        let n = self.quiver.num_vertices();
        if word_weight(x, n) != word_weight(y, n) {
            return Ok(RatV::zero());
        }
        if x.is_empty() {
            return Ok(RatV::one());
        }
        if x.len() == 1 && y.len() == 1 {
            return if x == y {
                self.params.value(self.quiver, &x[0])
            } else {
                Ok(RatV::zero())
            };
        }
        let key = (x.to_vec(), y.to_vec());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = if x.len() == 1 {
            self.words(y, x)?
        } else {
            // {g x', y} = sum {g, y1} {x', y2} over delta(y) = sum y1 ⊗ y2
            let (g, rest) = x.split_at(1);
            let gw = word_weight(g, n);
            let mut acc = RatV::zero();
            for ((y1, y2), c) in coproduct_word(self.quiver, y, self.twist) {
                if word_weight(&y1, n) != gw {
                    continue;
                }
                let a = self.words(g, &y1)?;
                if a.is_zero() {
                    continue;
                }
                let b = self.words(rest, &y2)?;
                acc = &acc + &(&(&c * &a) * &b);
            }
            acc
        };
        self.memo.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    pub fn elements(&self, x: &GqgElement, y: &GqgElement) -> Result<RatV> {
        let mut acc = RatV::zero();
        for (a, c) in &x.terms {
            for (b, d) in &y.terms {
                let p = self.words(a, b)?;
                if !p.is_zero() {
                    acc = &acc + &(&(c * d) * &p);
                }
            }
        }
        Ok(acc)
    }
}

/// `{x, y}` with the calibrated twist.
pub fn pairing(q: &Quiver, x: &GqgElement, y: &GqgElement, params: &FormParams) -> Result<RatV> {
    Pairing::new(q, params, DEFAULT_TWIST).elements(x, y)
}

/// Normalization of `E^l / l!` in the Serre-type elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DividedPowers {
    /// `E^l / l!`.
    Classical,
    /// `E^l / [l]_{v_j}!`.
    Quantum,
}

fn power(e: GeneratorIndex, k: u32) -> Word {
    vec![e; k as usize]
}

/// `sum_{l1+l2 = 1-(iota,j)} (-1)^{l1} E_j^{l1}/l1! E_iota E_j^{l2}/l2!`.
pub fn serre_element(
    q: &Quiver,
    iota: GeneratorIndex,
    j: usize,
    dp: DividedPowers,
) -> Option<GqgElement> {
    let n = q.num_vertices();
    if !q.is_real(j) || iota.vertex == j {
        return None;
    }
    let pair = sym_form(q, &iota.weight(n), &DimVector::unit(n, j));
    let top = 1 - pair;
    if top < 0 {
        return None;
    }
    let ej = GeneratorIndex { vertex: j, l: 1 };
    let fact = |k: u32| match dp {
        DividedPowers::Classical => RatV::quantum_factorial(k, 0),
        DividedPowers::Quantum => RatV::quantum_factorial(k, v_vertex_exp(q, j)),
    };
    let mut out = GqgElement::zero();
    for l1 in 0..=top as u32 {
        let l2 = top as u32 - l1;
        let mut w = power(ej, l1);
        w.push(iota);
        w.extend(power(ej, l2));
        let sign = if l1 % 2 == 0 {
            RatV::one()
        } else {
            RatV::from_int(-1)
        };
        out.add_term(w, &sign / &(&fact(l1) * &fact(l2)));
    }
    Some(out)
}

/// Generating relations of weight at most `g`: Serre-type elements and the
/// commutators `[E_(i,l), E_(i,k)]` at vertices with one loop.
pub fn relation_generators(q: &Quiver, g: &DimVector, dp: DividedPowers) -> Vec<GqgElement> {
    let n = q.num_vertices();
    let mut out = Vec::new();
    for iota in generators(q, g) {
        for j in 0..n {
            if let Some(s) = serre_element(q, iota, j, dp) {
                let some_word = s.terms.keys().next().unwrap();
                if word_weight(some_word, n).le(g) {
                    out.push(s);
                }
            }
        }
    }
    for i in 0..n {
        if q.loop_count(i) == 1 {
            for l in 1..=g.0[i] {
                for k in l + 1..=g.0[i] - l {
                    let a = GqgElement::word(vec![GeneratorIndex { vertex: i, l }]);
                    let b = GqgElement::word(vec![GeneratorIndex { vertex: i, l: k }]);
                    out.push(a.commutator(&b));
                }
            }
        }
    }
    out
}

/// Spanning set of the weight-`g` slice of the two-sided ideal generated by
/// [`relation_generators`], with quantum divided powers.
pub fn relation_ideal(q: &Quiver, g: &DimVector) -> Result<Vec<GqgElement>> {
    relation_ideal_with(q, g, DividedPowers::Quantum)
}

pub fn relation_ideal_with(
    q: &Quiver,
    g: &DimVector,
    dp: DividedPowers,
) -> Result<Vec<GqgElement>> {
    graded_words(q, g)?;
    let n = q.num_vertices();
    let mut out = Vec::new();
    for r in relation_generators(q, g, dp) {
        let beta = word_weight(r.terms.keys().next().unwrap(), n);
        let rest = g.checked_sub(&beta).unwrap();
        for left in rest.sub_vectors() {
            let right = rest.checked_sub(&left).unwrap();
            for u in graded_words(q, &left)? {
                for w in graded_words(q, &right)? {
                    let e = GqgElement::word(u.clone())
                        .mul(&r)
                        .mul(&GqgElement::word(w));
                    out.push(e);
                }
            }
        }
    }
    Ok(out)
}

/// Clears denominators row by row, turning a matrix over `Q(v)` into one
/// over `Q[v]` with the same row space.
fn clear_rows(rows: &[Vec<RatV>]) -> Vec<Vec<Poly>> {
    rows.iter()
        .map(|row| {
            let mut lcm = Poly::one();
            for c in row {
                let d = c.denom();
                let g = Poly::gcd(&lcm, d);
                lcm = (&lcm * d).exact_div(&g);
            }
            row.iter()
                .map(|c| (c.numer() * &lcm).exact_div(c.denom()))
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) elimination over `Q[v]`; returns pivot columns,
/// whose count is the rank over `Q(v)`.
pub fn bareiss_pivots(rows: &[Vec<RatV>]) -> Vec<usize> {
    let mut m = clear_rows(rows);
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = Poly::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let t = &(&m[r][c] * &m[i][j]) - &(&m[i][c] * &m[r][j]);
                m[i][j] = t.exact_div(&prev);
            }
            m[i][c] = Poly::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    pivots
}

pub fn rank_over_qv(rows: &[Vec<RatV>]) -> usize {
    bareiss_pivots(rows).len()
}

fn coordinates(e: &GqgElement, index: &HashMap<&Word, usize>, len: usize) -> Vec<RatV> {
    let mut row = vec![RatV::zero(); len];
    for (w, c) in &e.terms {
        row[index[w]] = c.clone();
    }
    row
}

/// Words spanning `F[g] / relation slice`: those that are not pivots after
/// eliminating the relations (columns taken in reverse word order, so later
/// words are eliminated first).
pub fn quotient_basis(q: &Quiver, g: &DimVector) -> Result<Vec<Word>> {
    let words = graded_words(q, g)?;
    let rev: Vec<&Word> = words.iter().rev().collect();
    let index: HashMap<&Word, usize> = rev.iter().enumerate().map(|(k, w)| (*w, k)).collect();
    let rows: Vec<Vec<RatV>> = relation_ideal(q, g)?
        .iter()
        .map(|e| coordinates(e, &index, words.len()))
        .collect();
    let pivots = bareiss_pivots(&rows);
    Ok(rev
        .into_iter()
        .enumerate()
        .filter(|(k, _)| !pivots.contains(k))
        .map(|(_, w)| w.clone())
        .rev()
        .collect())
}

pub fn gram_matrix(
    q: &Quiver,
    basis: &[Word],
    params: &FormParams,
    twist: Twist,
) -> Result<Vec<Vec<RatV>>> {
    let p = Pairing::new(q, params, twist);
    basis
        .iter()
        .map(|a| basis.iter().map(|b| p.words(a, b)).collect())
        .collect()
}

/// `dim U^+[g]`: rank of the Gram matrix on a basis of the quotient by the
/// relation slice.
pub fn u_plus_dim(q: &Quiver, g: &DimVector, params: &FormParams) -> Result<u64> {
    u_plus_dim_with(q, g, params, DEFAULT_TWIST)
}

pub fn u_plus_dim_with(
    q: &Quiver,
    g: &DimVector,
    params: &FormParams,
    twist: Twist,
) -> Result<u64> {
    if g.is_zero() {
        return Ok(1);
    }
    for e in generators(q, g) {
        params.value(q, &e)?;
    }
    let basis = quotient_basis(q, g)?;
    Ok(rank_over_qv(&gram_matrix(q, &basis, params, twist)?) as u64)
}

/// Rank of the Gram matrix on all of `F[g]`, ignoring the relations.
pub fn free_gram_rank(q: &Quiver, g: &DimVector, params: &FormParams) -> Result<u64> {
    let words = graded_words(q, g)?;
    Ok(rank_over_qv(&gram_matrix(q, &words, params, DEFAULT_TWIST)?) as u64)
}

/// True when `x` pairs to zero with every word of its weight.
pub fn in_radical(pairing: &Pairing, q: &Quiver, x: &GqgElement) -> Result<bool> {
    let Some(w) = x.terms.keys().next() else {
        return Ok(true);
    };
    let g = word_weight(w, q.num_vertices());
    for y in graded_words(q, &g)? {
        if !pairing.elements(x, &GqgElement::word(y))?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of testing whether the Serre-type elements lie in the radical,
/// per twist sign and divided-power normalization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub twist: Twist,
    pub divided_powers: DividedPowers,
    pub serre_in_radical: bool,
    /// Pairing symmetric on all word pairs of the probe weights.
    pub symmetric: bool,
}

/// Probes A2 and the Kronecker quiver up to height 3, plus the 2-loop
/// quiver for symmetry, and returns every combination's outcome.
pub fn calibration_table() -> Result<Vec<CalibrationRow>> {
    let probes = [Quiver::a2(), Quiver::kronecker()];
    let params = FormParams::default();
    let mut rows = Vec::new();
    for twist in [Twist::Plus, Twist::Minus] {
        for dp in [DividedPowers::Classical, DividedPowers::Quantum] {
            let mut serre = true;
            let mut symmetric = true;
            for q in probes
                .iter()
                .chain([Quiver::loops(2), Quiver::jordan()].iter())
            {
                let p = Pairing::new(q, &params, twist);
                let g0 = DimVector(vec![3; q.num_vertices()]);
                for g in DimVector::all_up_to(q.num_vertices(), 3) {
                    if !g.le(&g0) || g.is_zero() {
                        continue;
                    }
                    let words = graded_words(q, &g)?;
                    for a in &words {
                        for b in &words {
                            if p.words(a, b)? != p.words(b, a)? {
                                symmetric = false;
                            }
                        }
                    }
                }
                for r in relation_generators(q, &DimVector(vec![3; q.num_vertices()]), dp) {
                    if r.terms
                        .keys()
                        .next()
                        .unwrap()
                        .iter()
                        .map(|e| e.l)
                        .sum::<u32>()
                        > 3
                    {
                        continue;
                    }
                    if !in_radical(&p, q, &r)? {
                        serre = false;
                    }
                }
            }
            rows.push(CalibrationRow {
                twist,
                divided_powers: dp,
                serre_in_radical: serre,
                symmetric,
            });
        }
    }
    Ok(rows)
}

/// The unique twist whose Serre elements (with the given normalization) lie
/// in the radical; an error if neither or both do.
pub fn calibrate_twist(dp: DividedPowers) -> Result<Twist> {
    let rows = calibration_table()?;
    let ok: Vec<Twist> = rows
        .iter()
        .filter(|r| r.divided_powers == dp && r.serre_in_radical && r.symmetric)
        .map(|r| r.twist)
        .collect();
    match ok.as_slice() {
        [one] => Ok(*one),
        [] => Err(Error::Calibration(format!(
            "no twist puts the {dp:?} Serre elements in the radical"
        ))),
        _ => Err(Error::Calibration(format!(
            "both twists put the {dp:?} Serre elements in the radical"
        ))),
    }
}

/// Which oracle produced a component count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleTag {
    ClosedForm,
    KmWeight,
    UPlus,
    Seminilpotent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrCount {
    pub gamma: DimVector,
    pub count: u64,
    pub oracles: Vec<(OracleTag, u64)>,
}

/// `1`, `p(l)` or `2^{l-1}` for `g = l e_i` at a vertex with 0, 1 or more
/// loops.
pub fn closed_form_count(q: &Quiver, g: &DimVector) -> Option<u64> {
    let support: Vec<usize> = (0..g.len()).filter(|&i| g.0[i] > 0).collect();
    let [i] = support.as_slice() else {
        return None;
    };
    let l = g.0[*i];
    Some(match q.loop_count(*i) {
        0 => 1,
        1 => partition_count(l),
        _ => 1 << (l - 1),
    })
}

/// Upper limit on `sum_p p^{2N}` for the seminilpotent oracle.
const SEMINILPOTENT_WORK: u64 = 1 << 22;

/// Leading coefficient at degree `dim G - chi(g,g)` of the interpolated
/// seminilpotent count, for instances small enough to enumerate.
pub fn seminilpotent_leading(q: &Quiver, g: &DimVector) -> Result<Option<u64>> {
    use crate::fq::{count_seminilpotent, interpolate_motive};
    let entries: u32 = q
        .arrows()
        .iter()
        .map(|a| g.0[a.source] * g.0[a.target])
        .sum();
    let degree = 2 * entries as usize;
    let primes: Vec<u64> = (2u64..)
        .filter(|&p| crate::ff::is_prime(p))
        .take(degree + 2)
        .collect();
    let work = primes.iter().fold(0u64, |acc, p| {
        acc.saturating_add(p.saturating_pow(2 * entries))
    });
    if work > SEMINILPOTENT_WORK {
        return Ok(None);
    }
    let samples = primes
        .iter()
        .map(|&p| {
            Ok((
                p,
                BigRational::from_integer(count_seminilpotent(q, g, p)?.into()),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = interpolate_motive(&samples, degree)?;
    let (num, _) = m.as_l_function().unwrap();
    let dim_g: u32 = g.0.iter().map(|c| c * c).sum();
    let chi = q.euler_form_dim(g, g)?;
    let d = (dim_g as i64 - chi) as usize;
    if num.degree() != Some(d) {
        return Err(Error::OracleDisagreement(format!(
            "seminilpotent count at {g} has degree {:?}, expected {d}",
            num.degree()
        )));
    }
    let lead = num.coeff(d);
    if !lead.is_integer() || lead < BigRational::zero() {
        return Err(Error::OracleDisagreement(format!(
            "leading coefficient {lead} at {g}"
        )));
    }
    Ok(Some(lead.to_integer().try_into().unwrap()))
}

/// Predicted number of irreducible components of the seminilpotent
/// Lagrangian at `g`, with every applicable oracle required to agree.
pub fn predicted_irr_count(q: &Quiver, g: &DimVector) -> Result<IrrCount> {
    let mut oracles = Vec::new();
    if let Some(c) = closed_form_count(q, g) {
        oracles.push((OracleTag::ClosedForm, c));
    }
    if q.is_loop_free() && !g.is_zero() {
        oracles.push((OracleTag::KmWeight, km_weight_dim(q, g)?));
    }
    if g.height() <= 4 {
        oracles.push((OracleTag::UPlus, u_plus_dim(q, g, &FormParams::default())?));
    }
    if let Some(c) = seminilpotent_leading(q, g)? {
        oracles.push((OracleTag::Seminilpotent, c));
    }
    let Some(&(_, count)) = oracles.first() else {
        return Err(Error::NoOracle(g.0.clone()));
    };
    if oracles.iter().any(|&(_, c)| c != count) {
        let detail: Vec<String> = oracles.iter().map(|(t, c)| format!("{t:?}={c}")).collect();
        return Err(Error::OracleDisagreement(format!(
            "{g}: {}",
            detail.join(", ")
        )));
    }
    Ok(IrrCount {
        gamma: g.clone(),
        count,
        oracles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector(v.to_vec())
    }

    fn e(vertex: usize, l: u32) -> GeneratorIndex {
        GeneratorIndex { vertex, l }
    }

    fn rv(s: &str) -> RatV {
        s.parse().unwrap()
    }

    #[test]
    fn words() {
        let a2 = Quiver::a2();
        assert_eq!(
            graded_words(&a2, &dv(&[1, 1])).unwrap(),
            vec![vec![e(0, 1), e(1, 1)], vec![e(1, 1), e(0, 1)]]
        );
        assert_eq!(
            graded_words(&Quiver::jordan(), &dv(&[2])).unwrap(),
            vec![vec![e(0, 1), e(0, 1)], vec![e(0, 2)]]
        );
        assert_eq!(
            graded_words(&a2, &dv(&[0, 1])).unwrap(),
            vec![vec![e(1, 1)]]
        );
        assert!(graded_words(&a2, &dv(&[4, 3])).is_err());
    }

    #[test]
    fn coproduct_of_generators() {
        let j = Quiver::loops(2);
        let d1 = coproduct(&j, &GqgElement::word(vec![e(0, 1)]), Twist::Plus);
        assert_eq!(d1.len(), 2);
        assert!(d1[&(vec![e(0, 1)], vec![])].is_one());
        assert!(d1[&(vec![], vec![e(0, 1)])].is_one());
        let d2 = coproduct(&j, &GqgElement::word(vec![e(0, 2)]), Twist::Plus);
        assert_eq!(d2.len(), 3);
        // v_i = v^{(i,i)/2} = v^{-1} for two loops
        assert_eq!(d2[&(vec![e(0, 1)], vec![e(0, 1)])], rv("v^-1"));
        let d0 = coproduct(&j, &GqgElement::word(vec![]), Twist::Plus);
        assert!(d0[&(vec![], vec![])].is_one());
    }

    #[test]
    fn pairing_axioms() {
        let a2 = Quiver::a2();
        let params = FormParams::default();
        let x = |w: Word| GqgElement::word(w);
        let v1 = params.value(&a2, &e(0, 1)).unwrap();
        let v2 = params.value(&a2, &e(1, 1)).unwrap();
        assert_eq!(v1, rv("1/(1 - v^-2)"));
        assert_eq!(
            pairing(&a2, &x(vec![e(0, 1)]), &x(vec![e(0, 1)]), &params).unwrap(),
            v1
        );
        assert!(pairing(&a2, &x(vec![e(0, 1)]), &x(vec![e(1, 1)]), &params)
            .unwrap()
            .is_zero());
        let w = vec![e(0, 1), e(1, 1)];
        assert_eq!(
            pairing(&a2, &x(w.clone()), &x(w), &params).unwrap(),
            &v1 * &v2
        );
    }

    #[test]
    fn pairing_by_direct_expansion() {
        // {E1 E2, E2 E1} = {E1 ⊗ E2, delta(E2 E1)}; the only term of delta(E2E1)
        // with left weight e1 is v^{(e2,e1)} E1 ⊗ E2 = v^{-1} E1 ⊗ E2
        let a2 = Quiver::a2();
        let params = FormParams::default();
        let v1 = params.value(&a2, &e(0, 1)).unwrap();
        let p = Pairing::new(&a2, &params, Twist::Plus);
        let got = p.words(&[e(0, 1), e(1, 1)], &[e(1, 1), e(0, 1)]).unwrap();
        assert_eq!(got, &(&rv("v^-1") * &v1) * &v1);
    }

    #[test]
    fn serre_elements() {
        let a2 = Quiver::a2();
        let s = serre_element(&a2, e(1, 1), 0, DividedPowers::Classical).unwrap();
        assert_eq!(s.terms.len(), 3);
        assert_eq!(s.terms[&vec![e(0, 1), e(0, 1), e(1, 1)]], rv("1/2"));
        assert_eq!(s.terms[&vec![e(0, 1), e(1, 1), e(0, 1)]], rv("-1"));
        assert_eq!(s.terms[&vec![e(1, 1), e(0, 1), e(0, 1)]], rv("1/2"));
        let rel = relation_ideal(&Quiver::jordan(), &dv(&[3])).unwrap();
        let c = GqgElement::word(vec![e(0, 1)]).commutator(&GqgElement::word(vec![e(0, 2)]));
        assert_eq!(rel, vec![c]);
        assert!(relation_ideal(&Quiver::a1(), &dv(&[3])).unwrap().is_empty());
    }

    #[test]
    fn bareiss_rank() {
        let rows = vec![
            vec![rv("v"), rv("1")],
            vec![rv("v^2"), rv("v")],
            vec![rv("1"), rv("1/(v - 1)")],
        ];
        assert_eq!(rank_over_qv(&rows), 2);
        assert_eq!(rank_over_qv(&rows[..2]), 1);
    }

    #[test]
    fn dimensions() {
        let params = FormParams::default();
        assert_eq!(u_plus_dim(&Quiver::a2(), &dv(&[1, 1]), &params).unwrap(), 2);
        assert_eq!(u_plus_dim(&Quiver::a2(), &dv(&[2, 1]), &params).unwrap(), 2);
        assert_eq!(
            u_plus_dim(&Quiver::jordan(), &dv(&[2]), &params).unwrap(),
            2
        );
        assert_eq!(
            u_plus_dim(&Quiver::loops(2), &dv(&[2]), &params).unwrap(),
            2
        );
    }

    #[test]
    fn irr_counts() {
        let one_real = Quiver::a1();
        assert_eq!(closed_form_count(&one_real, &dv(&[3])), Some(1));
        assert_eq!(closed_form_count(&Quiver::jordan(), &dv(&[3])), Some(3));
        assert_eq!(closed_form_count(&Quiver::loops(2), &dv(&[3])), Some(4));
        let c = predicted_irr_count(&Quiver::a2(), &dv(&[1, 1])).unwrap();
        assert_eq!(c.count, 2);
        assert!(c
            .oracles
            .iter()
            .any(|(t, _)| *t == OracleTag::Seminilpotent));
    }

    #[test]
    fn twist_is_not_determined_by_the_radical() {
        let rows = calibration_table().unwrap();
        for r in &rows {
            assert!(r.symmetric);
            assert_eq!(
                r.serre_in_radical,
                r.divided_powers == DividedPowers::Quantum
            );
        }
        assert!(calibrate_twist(DividedPowers::Quantum).is_err());
        assert!(calibrate_twist(DividedPowers::Classical).is_err());
    }

    #[test]
    fn dimensions_do_not_depend_on_twist() {
        let params = FormParams::default();
        for (q, g) in [
            (Quiver::a2(), dv(&[2, 1])),
            (Quiver::kronecker(), dv(&[2, 1])),
            (Quiver::loops(2), dv(&[3])),
        ] {
            assert_eq!(
                u_plus_dim_with(&q, &g, &params, Twist::Plus).unwrap(),
                u_plus_dim_with(&q, &g, &params, Twist::Minus).unwrap()
            );
        }
    }

    #[test]
    fn relations_lie_in_radical() {
        let params = FormParams::default();
        for (q, g) in [
            (Quiver::a2(), dv(&[2, 2])),
            (Quiver::kronecker(), dv(&[3, 1])),
            (Quiver::jordan(), dv(&[4])),
        ] {
            let p = Pairing::new(&q, &params, DEFAULT_TWIST);
            for r in relation_ideal(&q, &g).unwrap() {
                assert!(in_radical(&p, &q, &r).unwrap(), "{r}");
            }
        }
    }

    #[test]
    fn pairing_is_symmetric() {
        let params = FormParams::default();
        for q in [
            Quiver::a2(),
            Quiver::kronecker(),
            Quiver::jordan(),
            Quiver::loops(2),
        ] {
            let p = Pairing::new(&q, &params, DEFAULT_TWIST);
            for g in DimVector::all_up_to(q.num_vertices(), 4) {
                if g.is_zero() || g.height() > 4 {
                    continue;
                }
                let words = graded_words(&q, &g).unwrap();
                for a in &words {
                    for b in &words {
                        assert_eq!(p.words(a, b).unwrap(), p.words(b, a).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn closed_forms_match_u_plus() {
        for params in [FormParams::default(), FormParams::perturbed()] {
            for l in 1..=4u32 {
                for q in [
                    Quiver::a1(),
                    Quiver::jordan(),
                    Quiver::loops(2),
                    Quiver::loops(3),
                ] {
                    let g = dv(&[l]);
                    assert_eq!(
                        u_plus_dim(&q, &g, &params).unwrap(),
                        closed_form_count(&q, &g).unwrap(),
                        "{l} {q:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_param_rejected() {
        let mut params = FormParams::default();
        assert!(params.set(e(0, 2), RatV::zero()).is_err());
        params.overrides.insert("1,2".into(), RatV::zero());
        assert!(matches!(
            u_plus_dim(&Quiver::jordan(), &dv(&[2]), &params),
            Err(Error::InvalidFormParam(_))
        ));
    }

    #[test]
    fn km_dimensions() {
        for q in [Quiver::a2(), Quiver::kronecker()] {
            for g in DimVector::all_up_to(2, 4) {
                if g.is_zero() || g.height() > 4 {
                    continue;
                }
                assert_eq!(
                    u_plus_dim(&q, &g, &FormParams::default()).unwrap(),
                    km_weight_dim(&q, &g).unwrap(),
                    "{g}"
                );
            }
        }
    }
}

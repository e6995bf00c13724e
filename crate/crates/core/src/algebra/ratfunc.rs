//! Reduced rational functions in one formal variable with rational
//! coefficients, with a canonical text form.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use super::poly::Poly;
use crate::error::Error;

/// Naming and rendering of the formal variable of a [`RatFunc`].
pub trait Variable: Clone + Copy + Default + Send + Sync + 'static {
    /// Renders `coefficient-free` power `x^e` of the variable (e ≠ 0).
    fn render_power(e: i64) -> String;
    /// Resolves a symbol appearing in text to a power of the variable.
    fn symbol_power(name: &str) -> Option<i64>;
}

type Terms = Vec<(i64, BigRational)>;

/// `num / den`, coprime, `den` monic. Equality is structural on this form.
pub struct RatFunc<V: Variable> {
    num: Poly,
    den: Poly,
    _var: PhantomData<V>,
}

impl<V: Variable> Clone for RatFunc<V> {
    fn clone(&self) -> Self {
        RatFunc {
            num: self.num.clone(),
            den: self.den.clone(),
            _var: PhantomData,
        }
    }
}

impl<V: Variable> PartialEq for RatFunc<V> {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}
impl<V: Variable> Eq for RatFunc<V> {}

impl<V: Variable> Hash for RatFunc<V> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl<V: Variable> Default for RatFunc<V> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<V: Variable> RatFunc<V> {
    /// Builds and reduces `num / den`. Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        let lc = den.leading().unwrap().clone();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc {
            num,
            den,
            _var: PhantomData,
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
            _var: PhantomData,
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(Poly::from_int(c))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The variable raised to an integer power.
    pub fn var_pow(e: i64) -> Self {
        if e >= 0 {
            Self::from_poly(Poly::monomial(BigRational::one(), e as usize))
        } else {
            RatFunc {
                num: Poly::one(),
                den: Poly::monomial(BigRational::one(), (-e) as usize),
                _var: PhantomData,
            }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value is a polynomial in the variable.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// True when the value is a Laurent polynomial (denominator a monomial).
    pub fn is_laurent(&self) -> bool {
        self.den.is_monomial()
    }

    /// Constant value, if the function is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    /// Laurent expansion `(exponent, coefficient)` when [`Self::is_laurent`].
    pub fn laurent_terms(&self) -> Option<Vec<(i64, BigRational)>> {
        if !self.is_laurent() {
            return None;
        }
        let shift = self.den.degree().unwrap() as i64;
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 - shift, c.clone()))
                .collect(),
        )
    }

    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::new(self.den.clone(), self.num.clone()))
        }
    }

    pub fn inv(&self) -> Self {
        self.checked_inv().expect("inverse of zero")
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        RatFunc {
            num: base.num.pow(e),
            den: base.den.pow(e),
            _var: PhantomData,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
            _var: PhantomData,
        }
    }

    /// Substitutes `x -> x^k`. Monic coprime pairs stay monic and coprime.
    pub fn substitute_power(&self, k: usize) -> Self {
        RatFunc {
            num: self.num.substitute_power(k),
            den: self.den.substitute_power(k),
            _var: PhantomData,
        }
    }

    /// Evaluates at a rational point; `None` on a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Canonical pieces for rendering: Laurent numerator terms and a
    /// denominator polynomial with nonzero constant term.
    fn render_parts(&self) -> (Terms, Terms) {
        let dval = self.den.valuation().unwrap_or(0);
        let den = self.den.unshift(dval);
        let num_terms = self
            .num
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64 - dval as i64, c.clone()))
            .collect();
        let den_terms = den
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64, c.clone()))
            .collect();
        (num_terms, den_terms)
    }
}

fn render_terms<V: Variable>(terms: &[(i64, BigRational)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (e, c)) in terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if *e == 0 {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&V::render_power(*e));
        } else {
            out.push_str(&format!("{}*{}", mag, V::render_power(*e)));
        }
    }
    out
}

impl<V: Variable> fmt::Display for RatFunc<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.render_parts();
        let num_s = render_terms::<V>(&num);
        if den.len() == 1 && den[0].1.is_one() {
            return f.write_str(&num_s);
        }
        let num_s = if num.len() > 1 {
            format!("({num_s})")
        } else {
            num_s
        };
        let den_s = render_terms::<V>(&den);
        if den.len() > 1 {
            write!(f, "{num_s}/({den_s})")
        } else {
            write!(f, "{num_s}/{den_s}")
        }
    }
}

impl<V: Variable> fmt::Debug for RatFunc<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<V: Variable> Add for &RatFunc<V> {
    type Output = RatFunc<V>;
    fn add(self, rhs: &RatFunc<V>) -> RatFunc<V> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return RatFunc::from_poly(&self.num + &rhs.num);
            }
            return RatFunc::new(&self.num + &rhs.num, self.den.clone());
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<V: Variable> Sub for &RatFunc<V> {
    type Output = RatFunc<V>;
    fn sub(self, rhs: &RatFunc<V>) -> RatFunc<V> {
        self + &(-rhs)
    }
}

impl<V: Variable> Mul for &RatFunc<V> {
    type Output = RatFunc<V>;
    fn mul(self, rhs: &RatFunc<V>) -> RatFunc<V> {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        // cross-cancel before multiplying to keep degrees small
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n1 = self.num.exact_div(&g1);
        let d2 = rhs.den.exact_div(&g1);
        let n2 = rhs.num.exact_div(&g2);
        let d1 = self.den.exact_div(&g2);
        RatFunc::new(&n1 * &n2, &d1 * &d2)
    }
}

impl<V: Variable> Div for &RatFunc<V> {
    type Output = RatFunc<V>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RatFunc<V>) -> RatFunc<V> {
        self * &rhs.inv()
    }
}

impl<V: Variable> Neg for &RatFunc<V> {
    type Output = RatFunc<V>;
    fn neg(self) -> RatFunc<V> {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
            _var: PhantomData,
        }
    }
}

macro_rules! forward_owned_rf {
    ($tr:ident, $m:ident) => {
        impl<V: Variable> $tr for RatFunc<V> {
            type Output = RatFunc<V>;
            fn $m(self, rhs: RatFunc<V>) -> RatFunc<V> {
                (&self).$m(&rhs)
            }
        }
        impl<V: Variable> $tr<&RatFunc<V>> for RatFunc<V> {
            type Output = RatFunc<V>;
            fn $m(self, rhs: &RatFunc<V>) -> RatFunc<V> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned_rf!(Add, add);
forward_owned_rf!(Sub, sub);
forward_owned_rf!(Mul, mul);
forward_owned_rf!(Div, div);

impl<V: Variable> Neg for RatFunc<V> {
    type Output = RatFunc<V>;
    fn neg(self) -> RatFunc<V> {
        -&self
    }
}

impl<V: Variable> From<i64> for RatFunc<V> {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Sym(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, Error> {
    let mut toks = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            toks.push(Tok::Int(digits.parse().unwrap()));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Sym(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            toks.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(toks)
}

struct Parser<'a, V: Variable> {
    toks: &'a [Tok],
    pos: usize,
    _var: PhantomData<V>,
}

impl<V: Variable> Parser<'_, V> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc<V>, Error> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = &acc + &self.term()?;
            } else if self.eat_op('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc<V>, Error> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat_op('/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(Error::Parse("division by zero".into()));
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc<V>, Error> {
        if self.eat_op('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RatFunc<V>, Error> {
        let base = self.atom()?;
        if self.eat_op('^') {
            let neg = self.eat_op('-');
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let e: i64 = n
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    if base.is_zero() && neg {
                        return Err(Error::Parse("negative power of zero".into()));
                    }
                    Ok(base.pow(if neg { -e } else { e }))
                }
                _ => Err(Error::Parse("expected integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RatFunc<V>, Error> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(RatFunc::from_rational(BigRational::from_integer(n)))
            }
            Some(Tok::Sym(name)) => {
                self.pos += 1;
                V::symbol_power(&name)
                    .map(RatFunc::var_pow)
                    .ok_or_else(|| Error::Parse(format!("unknown symbol {name:?}")))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat_op(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl<V: Variable> FromStr for RatFunc<V> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let toks = tokenize(s)?;
        let mut p = Parser::<V> {
            toks: &toks,
            pos: 0,
            _var: PhantomData,
        };
        let v = p.expr()?;
        if p.pos != toks.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }
}

impl<V: Variable> serde::Serialize for RatFunc<V> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, V: Variable> serde::Deserialize<'de> for RatFunc<V> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

//! Motives of polynomial-count stacks as rational functions in `s = L^{1/2}`.

use num::{BigInt, BigRational, One, Zero};

use super::poly::Poly;
use super::ratfunc::{RatFunc, Variable};
use crate::error::Error;

/// The square root `s` of the Lefschetz motive; `s^2 = L`.
#[derive(Clone, Copy, Default, Debug, PartialEq, Eq, Hash)]
pub struct HalfLefschetz;

impl Variable for HalfLefschetz {
    fn render_power(e: i64) -> String {
        match (e.rem_euclid(2), e.div_euclid(2)) {
            (0, 1) => "L".to_string(),
            (0, k) => format!("L^{k}"),
            (_, 0) => "s".to_string(),
            (_, 1) => "s*L".to_string(),
            (_, k) => format!("s*L^{k}"),
        }
    }

    fn symbol_power(name: &str) -> Option<i64> {
        match name {
            "L" => Some(2),
            "s" => Some(1),
            _ => None,
        }
    }
}

pub type MotiveRat = RatFunc<HalfLefschetz>;

impl MotiveRat {
    /// The Lefschetz motive `L = s^2`.
    pub fn lefschetz() -> Self {
        Self::var_pow(2)
    }

    /// `L^k` for any integer `k`.
    pub fn lefschetz_pow(k: i64) -> Self {
        Self::var_pow(2 * k)
    }

    /// Embeds a polynomial in `L` (coefficients ascending in `L`).
    pub fn from_l_poly(p: &Poly) -> Self {
        Self::from_poly(p.substitute_power(2))
    }

    /// Motive of `GL(n)`: `prod_{k<n} (L^n - L^k)`.
    pub fn gl(n: usize) -> Self {
        let mut acc = Poly::one();
        for k in 0..n {
            let mut f = Poly::monomial(BigRational::one(), 2 * n);
            f = &f - &Poly::monomial(BigRational::one(), 2 * k);
            acc = &acc * &f;
        }
        Self::from_poly(acc)
    }

    /// Adams operation: `s -> s^k`, hence `L -> L^k`.
    pub fn adams(&self, k: usize) -> Self {
        assert!(k >= 1, "Adams operations are indexed by k >= 1");
        self.substitute_power(k)
    }

    /// Rewrites as a rational function of `L` when every power of `s`
    /// in the reduced form is even.
    pub fn as_l_function(&self) -> Option<(Poly, Poly)> {
        let even = |p: &Poly| {
            p.coeffs()
                .iter()
                .enumerate()
                .all(|(i, c)| i % 2 == 0 || c.is_zero())
        };
        if !even(self.numer()) || !even(self.denom()) {
            return None;
        }
        let halve = |p: &Poly| Poly::from_coeffs(p.coeffs().iter().step_by(2).cloned().collect());
        Some((halve(self.numer()), halve(self.denom())))
    }

    /// Evaluates at `L = q`.
    pub fn evaluate_at_prime(&self, q: u64) -> Result<BigRational, Error> {
        let qr = BigRational::from_integer(BigInt::from(q));
        match self.as_l_function() {
            Some((n, d)) => {
                let dv = d.eval(&qr);
                if dv.is_zero() {
                    return Err(Error::Pole(q));
                }
                Ok(n.eval(&qr) / dv)
            }
            None => {
                let root = q.isqrt();
                if root * root != q {
                    return Err(Error::NonIntegralTateWeight(self.to_string()));
                }
                self.eval(&BigRational::from_integer(root.into()))
                    .ok_or(Error::Pole(q))
            }
        }
    }
}

/// `psi_k` on motives.
pub fn adams_psi(k: usize, f: &MotiveRat) -> MotiveRat {
    f.adams(k)
}

/// `f(L = q)`; see [`MotiveRat::evaluate_at_prime`].
pub fn evaluate_at_prime(f: &MotiveRat, q: u64) -> Result<BigRational, Error> {
    f.evaluate_at_prime(q)
}

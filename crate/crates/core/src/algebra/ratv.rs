//! Rational functions in the quantum parameter `v`.

use super::ratfunc::{RatFunc, Variable};

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq, Hash)]
pub struct QuantumV;

impl Variable for QuantumV {
    fn render_power(e: i64) -> String {
        if e == 1 {
            "v".to_string()
        } else {
            format!("v^{e}")
        }
    }

    fn symbol_power(name: &str) -> Option<i64> {
        (name == "v").then_some(1)
    }
}

pub type RatV = RatFunc<QuantumV>;

impl RatV {
    pub fn v() -> Self {
        Self::var_pow(1)
    }

    /// Quantum integer `[n]_x = (x^n - x^{-n}) / (x - x^{-1})` at `x = v^e`.
    pub fn quantum_int(n: u32, e: i64) -> Self {
        if e == 0 {
            return Self::from_int(n as i64);
        }
        // sum_{k=0}^{n-1} x^{n-1-2k}
        (0..n as i64).fold(Self::zero(), |acc, k| {
            &acc + &Self::var_pow(e * (n as i64 - 1 - 2 * k))
        })
    }

    /// Quantum factorial `[n]_x!` at `x = v^e`.
    pub fn quantum_factorial(n: u32, e: i64) -> Self {
        (1..=n).fold(Self::one(), |acc, k| &acc * &Self::quantum_int(k, e))
    }

    /// Value at `v = 1`, when defined.
    pub fn at_one(&self) -> Option<num::BigRational> {
        self.eval(&num::BigRational::from_integer(1.into()))
    }
}

//! Exact integer and rational scalar layer: factorial-type combinatorics and
//! the coefficients of (s/2)/sin(s/2).

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};

/// Exact rational scalar used throughout the crate. Always stored reduced,
/// denominator positive; prints as `p/q`, or `p` when the denominator is 1,
/// and parses the same grammar.
pub type Rational = BigRational;

/// Shorthand for a rational from machine integers.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Parse the `p/q` (or bare `p`) grammar used in all serialized output.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.parse::<Rational>()
        .map_err(|e| Error::InvalidInput(format!("bad rational {s:?}: {e}")))
}

/// n! as a big integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Double factorial n!! = n(n-2)(n-4)..., with (-1)!! = 0!! = 1 so that the
/// DVV recursion can evaluate (2n_j - 1)!! at n_j = 0. Anything below -1 is
/// rejected rather than extended.
pub fn double_factorial(n: i64) -> Result<BigInt> {
    if n < -1 {
        return Err(Error::InvalidInput(format!(
            "double factorial undefined for {n}"
        )));
    }
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    Ok(acc)
}

/// Multinomial coefficient total! / (parts_1! ... parts_r!). The parts must
/// sum to `total`.
pub fn multinomial(total: u64, parts: &[u64]) -> Result<BigInt> {
    let sum: u64 = parts.iter().sum();
    if sum != total {
        return Err(Error::InvalidInput(format!(
            "multinomial parts sum to {sum}, expected {total}"
        )));
    }
    let mut acc = factorial(total);
    for &p in parts {
        acc /= factorial(p);
    }
    Ok(acc)
}

/// Coefficients b_j of the even power series (s/2)/sin(s/2) = sum b_j s^{2j}.
/// b_1 = 1/24 and b_2 = 7/5760 are the constants of the lambda_g formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSeries {
    coeffs: Vec<Rational>,
}

impl BSeries {
    /// b_j, for j within the computed range.
    pub fn get(&self, j: usize) -> &Rational {
        &self.coeffs[j]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.coeffs
    }
}

/// b_0..b_{g_max} by exact power-series inversion of
/// sin(s/2)/(s/2) = sum_k (-1)^k (s/2)^{2k} / (2k+1)!.
pub fn b_coefficients(g_max: usize) -> BSeries {
    // u_k = coefficient of s^{2k} in sin(s/2)/(s/2)
    let mut u = Vec::with_capacity(g_max + 1);
    for k in 0..=g_max {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let denom = BigInt::from(4u32).pow(k as u32) * factorial(2 * k as u64 + 1);
        u.push(Rational::new(BigInt::from(sign), denom));
    }
    // invert: sum_{j<=m} b_j u_{m-j} = [m == 0]
    let mut b: Vec<Rational> = Vec::with_capacity(g_max + 1);
    b.push(Rational::one());
    for m in 1..=g_max {
        let mut s = Rational::zero();
        for j in 0..m {
            s += &b[j] * &u[m - j];
        }
        b.push(-s);
    }
    BSeries { coeffs: b }
}

/// Bernoulli numbers B_0..B_{n_max} by the classical recurrence
/// sum_{k<=m} C(m+1,k) B_k = 0 (convention B_1 = -1/2). Serves as an
/// independent oracle for the b-series closed form.
pub fn bernoulli_numbers(n_max: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n_max + 1);
    b.push(Rational::one());
    for m in 1..=n_max {
        let mut s = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += Rational::from(binomial(m as u64 + 1, k as u64)) * bk;
        }
        b.push(-s / Rational::from(BigInt::from(m as u64 + 1)));
    }
    b
}

/// Closed form (2^{2g-1}-1)/2^{2g-1} * |B_{2g}|/(2g)! for b_g, g >= 1,
/// evaluated from an independently computed Bernoulli number.
pub fn b_closed_form(g: usize, bernoulli: &[Rational]) -> Rational {
    let p = BigInt::from(2u32).pow(2 * g as u32 - 1);
    let front = Rational::new(&p - BigInt::one(), p);
    front * bernoulli[2 * g].abs() / Rational::from(factorial(2 * g as u64))
}

//! Sparse multivariate polynomials over exact rationals, with the
//! differential operator D_i = t_i^2(t_i - 1) d/dt_i and the exact divided
//! difference the topological recursion is built from.

use crate::error::{Error, Result};
use crate::scalar::{binomial, Rational};
use num::{BigInt, One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector of one term. Ordered graded-lexicographically (total
/// degree first, then lex), so a BTreeMap keyed by Monomial iterates in
/// graded-lex ascending order and its last entry is the leading term.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in variables t_1..t_arity with rational coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; arity]), c);
        }
        p
    }

    /// The variable t_i (0-based index) as a polynomial.
    pub fn var(arity: usize, i: usize) -> Result<Self> {
        let mut exps = vec![0; arity];
        *exps
            .get_mut(i)
            .ok_or_else(|| Error::InvalidInput(format!("variable index {i} out of range")))? = 1;
        Ok(Self::from_terms(arity, vec![(exps, Rational::one())]))
    }

    /// Build from (exponents, coefficient) pairs; repeated exponent vectors
    /// accumulate, zeros are pruned.
    pub fn from_terms(arity: usize, terms: Vec<(Vec<u32>, Rational)>) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent vector length must equal arity");
            p.accumulate(Monomial(e), c);
        }
        p
    }

    fn accumulate(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in graded-lex ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Total degree, or None for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Coefficient at an exponent vector (zero if absent).
    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.last_key_value()
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        MultiPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let exps: Vec<u32> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                out.accumulate(Monomial(exps), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Partial derivative with respect to t_i.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if i >= self.arity {
            return Err(Error::InvalidInput(format!(
                "variable index {i} out of range for arity {}",
                self.arity
            )));
        }
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            if m.0[i] > 0 {
                let mut e = m.0.clone();
                let k = e[i];
                e[i] -= 1;
                out.accumulate(Monomial(e), c * Rational::from(BigInt::from(k)));
            }
        }
        Ok(out)
    }

    /// The operator D_i = t_i^2 (t_i - 1) d/dt_i.
    pub fn apply_d(&self, i: usize) -> Result<Self> {
        let d = self.partial(i)?;
        let mut out = Self::zero(self.arity);
        for (m, c) in &d.terms {
            let mut up3 = m.0.clone();
            up3[i] += 3;
            let mut up2 = m.0.clone();
            up2[i] += 2;
            out.accumulate(Monomial(up3), c.clone());
            out.accumulate(Monomial(up2), -c.clone());
        }
        Ok(out)
    }

    /// Exact quotient by (t_i - t_j). The recursion only ever divides
    /// numerators that vanish on t_i = t_j, so a nonzero remainder is an
    /// implementation bug and fails loudly.
    pub fn divided_difference(&self, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= self.arity || j >= self.arity {
            return Err(Error::InvalidInput(format!(
                "divided difference needs two distinct valid indices, got {i}, {j}"
            )));
        }
        if self.is_zero() {
            return Ok(Self::zero(self.arity));
        }
        // Synthetic division in t_i: write p = sum_k p_k(t_hat) t_i^k and run
        // carry_k = p_k + t_j * carry_{k+1}; the carry at k = 0 is the
        // remainder (a polynomial without t_i), which must vanish.
        let deg_i = self.terms.keys().map(|m| m.0[i]).max().unwrap() as usize;
        let mut slices: Vec<BTreeMap<Monomial, Rational>> = vec![BTreeMap::new(); deg_i + 1];
        for (m, c) in &self.terms {
            let k = m.0[i] as usize;
            let mut e = m.0.clone();
            e[i] = 0;
            slices[k].insert(Monomial(e), c.clone());
        }
        let mut quotient = Self::zero(self.arity);
        let mut carry: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for k in (0..=deg_i).rev() {
            for (m, c) in std::mem::take(&mut slices[k]) {
                merge_term(&mut carry, m, c);
            }
            if k > 0 {
                let mut next: BTreeMap<Monomial, Rational> = BTreeMap::new();
                for (m, c) in &carry {
                    let mut e = m.0.clone();
                    e[i] = k as u32 - 1;
                    quotient.accumulate(Monomial(e), c.clone());
                    let mut ej = m.0.clone();
                    ej[j] += 1;
                    merge_term(&mut next, Monomial(ej), c.clone());
                }
                carry = next;
            } else if !carry.is_empty() {
                return Err(Error::NonzeroRemainder { i, j });
            }
        }
        Ok(quotient)
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.arity {
            return Err(Error::InvalidInput(format!(
                "point length {} != arity {}",
                point.len(),
                self.arity
            )));
        }
        let powers = self.power_tables(point, |b, e| {
            let mut acc = Rational::one();
            for _ in 0..e {
                acc *= b;
            }
            acc
        });
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                v *= &powers[i][e as usize];
            }
            total += v;
        }
        Ok(total)
    }

    /// Floating-point evaluation at an f64 point.
    pub fn evaluate_f64(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.arity {
            return Err(Error::InvalidInput(format!(
                "point length {} != arity {}",
                point.len(),
                self.arity
            )));
        }
        let powers = self.power_tables(point, |b, e| b.powi(e as i32));
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut v = rational_to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                v *= powers[i][e as usize];
            }
            total += v;
        }
        Ok(total)
    }

    fn power_tables<T: Clone>(&self, point: &[T], pow: impl Fn(&T, u32) -> T) -> Vec<Vec<T>> {
        let mut max_exp = vec![0u32; self.arity];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        point
            .iter()
            .enumerate()
            .map(|(i, b)| (0..=max_exp[i]).map(|e| pow(b, e)).collect())
            .collect()
    }

    /// True iff invariant under every adjacent variable transposition.
    pub fn is_symmetric(&self) -> bool {
        for k in 0..self.arity.saturating_sub(1) {
            let swapped: BTreeMap<Monomial, Rational> = self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.swap(k, k + 1);
                    (Monomial(e), c.clone())
                })
                .collect();
            if swapped != self.terms {
                return false;
            }
        }
        true
    }

    /// Substitute t_i -> t_i + c simultaneously in every variable.
    pub fn shift_all(&self, c: i64) -> Self {
        if c == 0 {
            return self.clone();
        }
        let shift = Rational::from(BigInt::from(c));
        let mut out = Self::zero(self.arity);
        for (m, coeff) in &self.terms {
            // expand prod_i (t_i + c)^{e_i} one variable at a time
            let mut partial: Vec<(Vec<u32>, Rational)> = vec![(Vec::new(), coeff.clone())];
            for &e in &m.0 {
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (exps, acc) in &partial {
                    let mut cpow = Rational::one();
                    // k descending so c^(e-k) builds up incrementally
                    for k in (0..=e).rev() {
                        let coef = Rational::from(binomial(e as u64, k as u64)) * &cpow * acc;
                        let mut ex = exps.clone();
                        ex.push(k);
                        next.push((ex, coef));
                        cpow *= &shift;
                    }
                }
                partial = next;
            }
            for (exps, v) in partial {
                out.accumulate(Monomial(exps), v);
            }
        }
        out
    }

    /// Re-index variables into a possibly larger arity: variable k of self
    /// becomes variable vmap[k]. Repeated targets merge exponents, which is
    /// how the recursion realizes the u_1 = u_2 = t_i diagonal substitution.
    pub fn embed(&self, arity: usize, vmap: &[usize]) -> Result<Self> {
        if vmap.len() != self.arity {
            return Err(Error::InvalidInput(format!(
                "variable map length {} != arity {}",
                vmap.len(),
                self.arity
            )));
        }
        if let Some(&bad) = vmap.iter().find(|&&v| v >= arity) {
            return Err(Error::InvalidInput(format!(
                "variable map target {bad} out of range for arity {arity}"
            )));
        }
        let mut out = Self::zero(arity);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; arity];
            for (k, &a) in m.0.iter().enumerate() {
                e[vmap[k]] += a;
            }
            out.accumulate(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Canonical text form: terms in graded-lex descending order, each as
    /// `coeff*t1^a1 t2^a2 ...` (variable named `t` when arity is 1), joined
    /// by " + ". The zero polynomial prints as "0".
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.iter().rev() {
            let mut vars = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if self.arity == 1 {
                    "t".to_string()
                } else {
                    format!("t{}", i + 1)
                };
                if e == 1 {
                    vars.push(name);
                } else {
                    vars.push(format!("{name}^{e}"));
                }
            }
            if vars.is_empty() {
                parts.push(c.to_string());
            } else {
                parts.push(format!("{c}*{}", vars.join(" ")));
            }
        }
        parts.join(" + ")
    }

    /// JSON form: list of {exponents, coeff} in graded-lex descending order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                serde_json::json!({
                    "exponents": m.0,
                    "coeff": c.to_string(),
                })
            })
            .collect();
        serde_json::Value::Array(terms)
    }
}

fn merge_term(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Lossy conversion for the numeric validation layer only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().expect("rational out of f64 range")
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn tvar(arity: usize, i: usize) -> MultiPoly {
        MultiPoly::var(arity, i).unwrap()
    }

    fn uni(terms: &[(u32, i64)]) -> MultiPoly {
        MultiPoly::from_terms(
            1,
            terms.iter().map(|&(e, c)| (vec![e], rat_int(c))).collect(),
        )
    }

    #[test]
    fn ring_ops() {
        let t = tvar(1, 0);
        let one = MultiPoly::constant(1, rat_int(1));
        let p = t.sub(&one).unwrap().mul(&t.add(&one).unwrap()).unwrap();
        assert_eq!(p, uni(&[(2, 1), (0, -1)]));
        let zero = MultiPoly::zero(1);
        assert_eq!(p.add(&zero).unwrap(), p);
        assert_eq!(
            tvar(1, 0).mul(&tvar(1, 0)).unwrap().scale(&rat(3, 2)),
            MultiPoly::from_terms(1, vec![(vec![2], rat(3, 2))])
        );
    }

    #[test]
    fn arity_mismatch_rejected() {
        let p = tvar(1, 0);
        let q = tvar(2, 0);
        assert!(matches!(p.add(&q), Err(Error::ArityMismatch(1, 2))));
    }

    #[test]
    fn apply_d_examples() {
        // D(t - 1) = t^3 - t^2
        let p = uni(&[(1, 1), (0, -1)]);
        assert_eq!(p.apply_d(0).unwrap(), uni(&[(3, 1), (2, -1)]));
        // D(constant) = 0
        assert!(MultiPoly::constant(1, rat_int(5))
            .apply_d(0)
            .unwrap()
            .is_zero());
        // D(t^3 - t^2) = 3t^5 - 5t^4 + 2t^3
        let q = uni(&[(3, 1), (2, -1)]);
        assert_eq!(q.apply_d(0).unwrap(), uni(&[(5, 3), (4, -5), (3, 2)]));
    }

    #[test]
    fn divided_difference_examples() {
        // (t1^2 - t2^2)/(t1 - t2) = t1 + t2
        let p = MultiPoly::from_terms(2, vec![(vec![2, 0], rat_int(1)), (vec![0, 2], rat_int(-1))]);
        let q = p.divided_difference(0, 1).unwrap();
        assert_eq!(q, tvar(2, 0).add(&tvar(2, 1)).unwrap());
        // (t1 - t2)/(t1 - t2) = 1
        let lin = tvar(2, 0).sub(&tvar(2, 1)).unwrap();
        assert_eq!(
            lin.divided_difference(0, 1).unwrap(),
            MultiPoly::constant(2, rat_int(1))
        );
        // non-divisible numerator fails loudly
        assert!(matches!(
            tvar(2, 0).divided_difference(0, 1),
            Err(Error::NonzeroRemainder { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let p = uni(&[(1, 1), (0, -1)]);
        assert_eq!(p.evaluate(&[rat_int(2)]).unwrap(), rat_int(1));
        let q = uni(&[(3, 1), (2, -1)]);
        assert_eq!(q.evaluate(&[rat_int(1)]).unwrap(), rat_int(0));
        assert_eq!(q.evaluate(&[rat(3, 2)]).unwrap(), rat(9, 8));
    }

    #[test]
    fn symmetry_detection() {
        let sym = tvar(2, 0).add(&tvar(2, 1)).unwrap();
        assert!(sym.is_symmetric());
        let asym = tvar(2, 0).sub(&tvar(2, 1)).unwrap();
        assert!(!asym.is_symmetric());
    }

    #[test]
    fn shift_all_roundtrip() {
        let p = MultiPoly::from_terms(
            2,
            vec![
                (vec![3, 1], rat(5, 3)),
                (vec![0, 2], rat_int(-2)),
                (vec![0, 0], rat_int(7)),
            ],
        );
        assert_eq!(p.shift_all(1).shift_all(-1), p);
        // (t+1)^2 expands correctly
        let sq = tvar(1, 0).mul(&tvar(1, 0)).unwrap();
        assert_eq!(sq.shift_all(1), uni(&[(2, 1), (1, 2), (0, 1)]));
    }

    #[test]
    fn embed_merges_variables() {
        // t1*t2 with both variables mapped to variable 0 of arity 2 gives t1^2
        let p = tvar(2, 0).mul(&tvar(2, 1)).unwrap();
        let merged = p.embed(2, &[0, 0]).unwrap();
        assert_eq!(
            merged,
            MultiPoly::from_terms(2, vec![(vec![2, 0], rat_int(1))])
        );
    }

    #[test]
    fn canonical_text() {
        assert_eq!(
            uni(&[(5, 3), (4, -5), (3, 2)]).to_text(),
            "3*t^5 + -5*t^4 + 2*t^3"
        );
        assert_eq!(MultiPoly::zero(3).to_text(), "0");
        let p = MultiPoly::from_terms(2, vec![(vec![1, 1], rat_int(2)), (vec![0, 0], rat(-1, 2))]);
        assert_eq!(p.to_text(), "2*t1 t2 + -1/2");
    }

    #[test]
    fn graded_lex_order() {
        // total degree dominates, then lex
        let a = Monomial(vec![1, 2]);
        let b = Monomial(vec![3, 0]);
        assert!(a < b);
        let c = Monomial(vec![0, 4]);
        assert!(b < c);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly(arity: usize) -> impl Strategy<Value = MultiPoly> {
            proptest::collection::vec(
                (
                    proptest::collection::vec(0u32..5, arity),
                    (-20i64..20, 1i64..8),
                ),
                0..8,
            )
            .prop_map(move |terms| {
                MultiPoly::from_terms(
                    arity,
                    terms
                        .into_iter()
                        .map(|(e, (n, d))| (e, rat(n, d)))
                        .collect(),
                )
            })
        }

        fn arb_point(arity: usize) -> impl Strategy<Value = Vec<Rational>> {
            proptest::collection::vec((-9i64..9, 1i64..5).prop_map(|(n, d)| rat(n, d)), arity)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(96))]

            #[test]
            fn apply_d_is_a_derivation(p in arb_poly(2), q in arb_poly(2)) {
                for i in 0..2 {
                    let lhs = p.mul(&q).unwrap().apply_d(i).unwrap();
                    let rhs = p.apply_d(i).unwrap().mul(&q).unwrap()
                        .add(&p.mul(&q.apply_d(i).unwrap()).unwrap()).unwrap();
                    prop_assert_eq!(lhs, rhs);
                }
            }

            #[test]
            fn divided_difference_inverts_multiplication(p in arb_poly(2)) {
                let t1 = MultiPoly::var(2, 0).unwrap();
                let t2 = MultiPoly::var(2, 1).unwrap();
                let num = p.mul(&t1.sub(&t2).unwrap()).unwrap();
                prop_assert_eq!(num.divided_difference(0, 1).unwrap(), p);
            }

            #[test]
            fn evaluate_is_a_homomorphism(p in arb_poly(2), q in arb_poly(2), pt in arb_point(2)) {
                let sum = p.add(&q).unwrap().evaluate(&pt).unwrap();
                prop_assert_eq!(sum, p.evaluate(&pt).unwrap() + q.evaluate(&pt).unwrap());
                let prod = p.mul(&q).unwrap().evaluate(&pt).unwrap();
                prop_assert_eq!(prod, p.evaluate(&pt).unwrap() * q.evaluate(&pt).unwrap());
            }

            #[test]
            fn shift_roundtrip(p in arb_poly(3)) {
                prop_assert_eq!(p.shift_all(1).shift_all(-1), p);
            }
        }
    }
}

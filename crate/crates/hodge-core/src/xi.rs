//! The polynomial family xi_0 = t - 1, xi_{n+1} = D xi_n that spans the
//! Hodge generating polynomials, plus conversion between the monomial and
//! xi-product bases.

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::scalar::{double_factorial, rat_int, Rational};
use num::{BigInt, One, Zero};
use std::collections::BTreeMap;
use std::sync::Mutex;

/// Memoized xi_n cache. Cheap to share; fill is idempotent.
pub struct XiFamily {
    cache: Mutex<Vec<MultiPoly>>,
}

impl XiFamily {
    pub fn new() -> Self {
        let xi0 = MultiPoly::from_terms(1, vec![(vec![1], rat_int(1)), (vec![0], rat_int(-1))]);
        XiFamily {
            cache: Mutex::new(vec![xi0]),
        }
    }

    /// xi_n as a univariate polynomial (degree 2n + 1).
    pub fn xi(&self, n: usize) -> MultiPoly {
        let mut cache = self.cache.lock().unwrap();
        while cache.len() <= n {
            let next = cache
                .last()
                .unwrap()
                .apply_d(0)
                .expect("univariate apply_d cannot fail");
            cache.push(next);
        }
        cache[n].clone()
    }

    /// prod_i xi_{indices[i]}(t_i), a polynomial of arity indices.len().
    pub fn xi_product(&self, indices: &[usize]) -> MultiPoly {
        let arity = indices.len();
        let mut out = MultiPoly::constant(arity, rat_int(1));
        for (i, &n) in indices.iter().enumerate() {
            let factor = self
                .xi(n)
                .embed(arity, &[i])
                .expect("embedding a univariate factor cannot fail");
            out = out.mul(&factor).expect("arities match by construction");
        }
        out
    }

    /// The subleading coefficients a_n = [t^{n+2}] xi_n for n = 1..n_max,
    /// from the recurrence a_n = -((n+1) a_{n-1} + (-1)^n n!), seeded by
    /// reading a_1 off xi_1 itself.
    pub fn a_sequence(&self, n_max: usize) -> Vec<BigInt> {
        if n_max == 0 {
            return Vec::new();
        }
        let a1 = self.xi(1).coeff(&[3]);
        assert!(a1.is_integer(), "xi coefficients are integers");
        let mut a = vec![a1.to_integer()];
        let mut fact = BigInt::one(); // n! running product
        for n in 2..=n_max as i64 {
            fact *= n;
            let sign = if n % 2 == 0 {
                fact.clone()
            } else {
                -fact.clone()
            };
            let prev = a.last().unwrap();
            a.push(-(BigInt::from(n + 1) * prev + sign));
        }
        a
    }
}

impl Default for XiFamily {
    fn default() -> Self {
        Self::new()
    }
}

/// A polynomial written in the basis of xi-products: the key lists the xi
/// index used in each variable slot.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct XiExpansion {
    arity: usize,
    coeffs: BTreeMap<Vec<usize>, Rational>,
}

impl XiExpansion {
    pub fn new(arity: usize) -> Self {
        XiExpansion {
            arity,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(arity: usize, coeffs: Vec<(Vec<usize>, Rational)>) -> Self {
        let mut exp = Self::new(arity);
        for (n, c) in coeffs {
            assert_eq!(n.len(), arity, "index vector length must equal arity");
            if !c.is_zero() {
                *exp.coeffs.entry(n).or_insert_with(Rational::zero) += c;
            }
        }
        exp.coeffs.retain(|_, c| !c.is_zero());
        exp
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, indices: &[usize]) -> Rational {
        self.coeffs
            .get(indices)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Iterate (index vector, coefficient) pairs in lexicographic key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.coeffs.iter()
    }
}

/// Rewrite p as a combination of xi-products by graded-lex leading-term
/// elimination. The leading monomial of prod_i xi_{n_i}(t_i) is
/// prod_i t_i^{2 n_i + 1} with coefficient prod_i (2 n_i - 1)!!, so each
/// elimination step strictly lowers the leading monomial; an even exponent
/// anywhere in a leading monomial means p is outside the span.
pub fn to_xi_basis(p: &MultiPoly, family: &XiFamily) -> Result<XiExpansion> {
    let arity = p.arity();
    let mut expansion = XiExpansion::new(arity);
    let mut residual = p.clone();
    while let Some((monomial, coeff)) = residual.leading() {
        let lead_monomial = monomial.clone();
        let exps = monomial.0.clone();
        let coeff = coeff.clone();
        let mut indices = Vec::with_capacity(arity);
        for &e in &exps {
            if e % 2 == 0 {
                return Err(Error::NotInXiSpan(format!(
                    "leading monomial {:?} has an even exponent",
                    exps
                )));
            }
            indices.push(((e - 1) / 2) as usize);
        }
        let mut lead = Rational::one();
        for &n in &indices {
            lead *= Rational::from(
                double_factorial(2 * n as i64 - 1).expect("argument is >= -1 by construction"),
            );
        }
        let c = coeff / lead;
        residual = residual.sub(&family.xi_product(&indices).scale(&c))?;
        if let Some((m, _)) = residual.leading() {
            assert!(
                *m < lead_monomial,
                "leading monomial must strictly decrease during elimination"
            );
        }
        expansion.coeffs.insert(indices, c);
    }
    Ok(expansion)
}

/// Inverse of to_xi_basis: assemble sum c_n prod_i xi_{n_i}(t_i).
pub fn from_xi_basis(expansion: &XiExpansion, family: &XiFamily) -> MultiPoly {
    let mut out = MultiPoly::zero(expansion.arity());
    for (indices, c) in expansion.iter() {
        out = out
            .add(&family.xi_product(indices).scale(c))
            .expect("arities match by construction");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn uni(terms: &[(u32, i64)]) -> MultiPoly {
        MultiPoly::from_terms(
            1,
            terms.iter().map(|&(e, c)| (vec![e], rat_int(c))).collect(),
        )
    }

    #[test]
    fn first_members() {
        let fam = XiFamily::new();
        assert_eq!(fam.xi(0), uni(&[(1, 1), (0, -1)]));
        assert_eq!(fam.xi(1), uni(&[(3, 1), (2, -1)]));
        assert_eq!(fam.xi(2), uni(&[(5, 3), (4, -5), (3, 2)]));
        assert_eq!(fam.xi(3), uni(&[(7, 15), (6, -35), (5, 26), (4, -6)]));
    }

    #[test]
    fn coefficient_structure() {
        let fam = XiFamily::new();
        let a = fam.a_sequence(10);
        for n in 0..=10usize {
            let p = fam.xi(n);
            let deg = (2 * n + 1) as u32;
            assert_eq!(p.total_degree(), Some(deg));
            // leading coefficient (2n - 1)!!
            assert_eq!(
                p.coeff(&[deg]),
                Rational::from(double_factorial(2 * n as i64 - 1).unwrap())
            );
            // coefficient of t^{2n} is -(2n + 1)!!/3
            if n >= 1 {
                let dfac = Rational::from(double_factorial(2 * n as i64 + 1).unwrap());
                assert_eq!(p.coeff(&[2 * n as u32]), -dfac / rat_int(3));
            }
            // coefficient of t^{n+2} is a_n once the slot is clear of the
            // leading and t^{2n} slots
            if n >= 3 {
                assert_eq!(p.coeff(&[n as u32 + 2]), Rational::from(a[n - 1].clone()));
            }
            // lowest term (-1)^n n! t^{n+1}; xi_0 = t - 1 alone also has a
            // constant term below it
            let mut fact = BigInt::one();
            for k in 2..=n {
                fact *= k;
            }
            let low = if n % 2 == 0 { fact.clone() } else { -fact };
            assert_eq!(p.coeff(&[n as u32 + 1]), Rational::from(low));
            if n >= 1 {
                for e in 0..=n as u32 {
                    assert!(p.coeff(&[e]).is_zero());
                }
                assert!(p.evaluate(&[rat_int(0)]).unwrap().is_zero());
            }
            // every xi_n vanishes at t = 1
            assert!(p.evaluate(&[rat_int(1)]).unwrap().is_zero());
        }
    }

    #[test]
    fn a_sequence_values() {
        let fam = XiFamily::new();
        let expect: Vec<i64> = vec![1, -5, 26, -154, 1044, -8028, 69264];
        assert_eq!(
            fam.a_sequence(7),
            expect.into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
    }

    #[test]
    fn xi_product_leading_term() {
        let fam = XiFamily::new();
        let p = fam.xi_product(&[2, 1]);
        assert_eq!(p.arity(), 2);
        assert_eq!(p.coeff(&[5, 3]), rat_int(3)); // 3!! * 1!!
        assert_eq!(p.total_degree(), Some(8));
    }

    #[test]
    fn h11_expansion() {
        // (1/24)(t^3 - t^2 - t + 1) = (1/24) xi_1 - (1/24) xi_0
        let fam = XiFamily::new();
        let p = MultiPoly::from_terms(
            1,
            vec![
                (vec![3], rat(1, 24)),
                (vec![2], rat(-1, 24)),
                (vec![1], rat(-1, 24)),
                (vec![0], rat(1, 24)),
            ],
        );
        let exp = to_xi_basis(&p, &fam).unwrap();
        assert_eq!(exp.num_terms(), 2);
        assert_eq!(exp.get(&[1]), rat(1, 24));
        assert_eq!(exp.get(&[0]), rat(-1, 24));
        assert_eq!(from_xi_basis(&exp, &fam), p);
    }

    #[test]
    fn even_exponent_rejected() {
        let fam = XiFamily::new();
        let p = MultiPoly::from_terms(1, vec![(vec![2], rat_int(1))]);
        assert!(matches!(to_xi_basis(&p, &fam), Err(Error::NotInXiSpan(_))));
        let q = MultiPoly::constant(1, rat_int(1));
        assert!(matches!(to_xi_basis(&q, &fam), Err(Error::NotInXiSpan(_))));
    }

    #[test]
    fn concurrent_fill_is_idempotent() {
        use std::sync::Arc;
        let fam = Arc::new(XiFamily::new());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let fam = Arc::clone(&fam);
                std::thread::spawn(move || fam.xi(6))
            })
            .collect();
        let results: Vec<MultiPoly> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for p in &results[1..] {
            assert_eq!(p, &results[0]);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_expansion() -> impl Strategy<Value = XiExpansion> {
            (1usize..=3).prop_flat_map(|arity| {
                proptest::collection::vec(
                    (
                        proptest::collection::vec(0usize..=4, arity),
                        (-12i64..12, 1i64..6),
                    ),
                    1..5,
                )
                .prop_map(move |coeffs| {
                    XiExpansion::from_coeffs(
                        arity,
                        coeffs
                            .into_iter()
                            .map(|(n, (p, q))| (n, rat(p, q)))
                            .collect(),
                    )
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn round_trip(exp in arb_expansion()) {
                let fam = XiFamily::new();
                let p = from_xi_basis(&exp, &fam);
                let back = to_xi_basis(&p, &fam).unwrap();
                prop_assert_eq!(back, exp);
            }
        }
    }
}

//! psi-class intersection numbers from the Witten-Kontsevich recursion
//! (DVV form), and the two consistency checks that tie them to the Hodge
//! polynomials: the top-degree comparison and the lambda_g factorization.

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::recursion::{is_stable, HodgeTable};
use crate::scalar::{binomial, double_factorial, multinomial, rat, BSeries, Rational};
use crate::xi::{to_xi_basis, XiFamily};
use num::Zero;
use std::collections::BTreeMap;
use std::sync::Mutex;

/// Memoized <tau_{n_1} ... tau_{n_l}>_g computed by the DVV recursion.
pub struct PsiTable {
    memo: Mutex<BTreeMap<(u32, Vec<usize>), Rational>>,
}

impl PsiTable {
    pub fn new() -> Self {
        PsiTable {
            memo: Mutex::new(BTreeMap::new()),
        }
    }

    /// The intersection number <tau_{n_1} ... tau_{n_l}>_g. Unstable or
    /// dimensionally impossible inputs give zero.
    pub fn psi_intersection(&self, g: u32, indices: &[usize]) -> Rational {
        let mut n = indices.to_vec();
        n.sort_unstable_by(|a, b| b.cmp(a));
        self.eval(g, n)
    }

    fn eval(&self, g: u32, n: Vec<usize>) -> Rational {
        let ell = n.len();
        if ell == 0 || !is_stable(g, ell) {
            return Rational::zero();
        }
        let dim = 3 * g as i64 - 3 + ell as i64;
        let weight: i64 = n.iter().map(|&x| x as i64).sum();
        if weight != dim {
            return Rational::zero();
        }
        if g == 0 && ell == 3 {
            return rat(1, 1);
        }
        if g == 1 && ell == 1 {
            return rat(1, 24);
        }
        let key = (g, n.clone());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return v.clone();
        }
        let value = self.recurse(g, &n);
        self.memo.lock().unwrap().insert(key, value.clone());
        value
    }

    /// One step of the DVV recursion, pivoting on the largest index (which
    /// is at least 1 here: an all-zero stable key is the (0,3) seed).
    fn recurse(&self, g: u32, n: &[usize]) -> Rational {
        let n1 = n[0];
        debug_assert!(n1 >= 1);
        let rest = &n[1..];
        let df = |k: i64| Rational::from(double_factorial(k).expect("argument >= -1"));
        let mut total = Rational::zero();
        // transfer terms against each remaining insertion
        for (idx, &nj) in rest.iter().enumerate() {
            let mut next: Vec<usize> = rest.to_vec();
            next.remove(idx);
            next.push(n1 + nj - 1);
            next.sort_unstable_by(|a, b| b.cmp(a));
            let factor = df(2 * (n1 + nj) as i64 - 1) / df(2 * nj as i64 - 1);
            total += factor * self.eval(g, next);
        }
        // cut terms: split the pivot as a + b = n1 - 2
        if n1 >= 2 {
            let half = rat(1, 2);
            for a in 0..=(n1 - 2) {
                let b = n1 - 2 - a;
                let w = df(2 * a as i64 + 1) * df(2 * b as i64 + 1);
                if g >= 1 {
                    let mut next: Vec<usize> = rest.to_vec();
                    next.push(a);
                    next.push(b);
                    next.sort_unstable_by(|x, y| y.cmp(x));
                    total += &half * &w * self.eval(g - 1, next);
                }
                for g1 in 0..=g {
                    let g2 = g - g1;
                    for mask in 0u32..(1 << rest.len()) {
                        let mut left = vec![a];
                        let mut right = vec![b];
                        for (bit, &m) in rest.iter().enumerate() {
                            if mask & (1 << bit) != 0 {
                                left.push(m);
                            } else {
                                right.push(m);
                            }
                        }
                        if !is_stable(g1, left.len()) || !is_stable(g2, right.len()) {
                            continue;
                        }
                        left.sort_unstable_by(|x, y| y.cmp(x));
                        right.sort_unstable_by(|x, y| y.cmp(x));
                        total += &half * &w * self.eval(g1, left) * self.eval(g2, right);
                    }
                }
            }
        }
        total / df(2 * n1 as i64 + 1)
    }
}

impl Default for PsiTable {
    fn default() -> Self {
        Self::new()
    }
}

/// One disagreement between a polynomial-derived value and its independent
/// counterpart.
#[derive(Clone, PartialEq, Debug)]
pub struct Mismatch {
    pub indices: Vec<usize>,
    pub got: Option<Rational>,
    pub expected: Option<Rational>,
    pub context: String,
}

/// Result of a batch comparison.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct MismatchReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl MismatchReport {
    pub fn holds(&self) -> bool {
        self.checked > 0 && self.mismatches.is_empty()
    }
}

fn compositions(total: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn go(total: usize, len: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() + 1 == len {
            current.push(total);
            out.push(current.clone());
            current.pop();
            return;
        }
        for v in 0..=total {
            current.push(v);
            go(total - v, len, current, out);
            current.pop();
        }
    }
    if len == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(total, len, &mut current, &mut out);
    out
}

/// Compare the top-degree xi-coefficients of H_{g,l} against the DVV
/// values: the coefficient at index vector n with |n| = 3g - 3 + l must be
/// <tau_{n_1} ... tau_{n_l}>_g. Every composition of the dimension is
/// checked, so a missing monomial counts as a zero coefficient.
pub fn check_top_degree(
    g: u32,
    ell: usize,
    poly: &MultiPoly,
    family: &XiFamily,
    psi: &PsiTable,
) -> Result<MismatchReport> {
    let dim = 3 * g as i64 - 3 + ell as i64;
    if dim < 0 {
        return Err(Error::InvalidInput(format!(
            "(g, l) = ({g}, {ell}) has negative dimension"
        )));
    }
    let expansion = to_xi_basis(poly, family)?;
    let mut report = MismatchReport::default();
    for n in compositions(dim as usize, ell) {
        let got = expansion.get(&n);
        let expected = psi.psi_intersection(g, &n);
        report.checked += 1;
        if got != expected {
            report.mismatches.push(Mismatch {
                indices: n,
                got: Some(got),
                expected: Some(expected),
                context: "top-degree coefficient vs DVV".to_string(),
            });
        }
    }
    Ok(report)
}

/// Verify the lambda_g layer of the Hodge table at (g, l): every value
/// <tau_{n_1} ... tau_{n_l} lambda_g> must factor as
/// multinomial(2g - 3 + l; n) * b_g, and for l >= 2 the layer must satisfy
/// the one-point-removal recursion
/// (l - 1) <tau_n lambda_g> = sum_{i<j} C(n_i + n_j, n_i)
/// <tau_{n_i + n_j - 1} tau_{n minus i,j} lambda_g>, where a tau with
/// index -1 is zero. The (g, l - 1) layer must already be in the table
/// when l >= 2.
pub fn check_lambda_g(
    g: u32,
    ell: usize,
    table: &HodgeTable,
    b: &BSeries,
) -> Result<MismatchReport> {
    let s = 2 * g as i64 - 3 + ell as i64;
    if s < 0 || !is_stable(g, ell) {
        return Err(Error::InvalidInput(format!(
            "(g, l) = ({g}, {ell}) has no lambda_g layer"
        )));
    }
    let s = s as usize;
    if b.len() <= g as usize {
        return Err(Error::InvalidInput(format!(
            "b series too short for g = {g}"
        )));
    }
    let bg = b.get(g as usize);
    let mut report = MismatchReport::default();
    for mu in crate::partition::enumerate_partitions(s as u32) {
        if mu.len() > ell {
            continue;
        }
        let mut n: Vec<usize> = mu.parts().iter().map(|&p| p as usize).collect();
        n.resize(ell, 0);
        let parts_u64: Vec<u64> = n.iter().map(|&x| x as u64).collect();
        let expected = Rational::from(multinomial(s as u64, &parts_u64)?) * bg.clone();
        report.checked += 1;
        match table.get(g, ell, &n, g) {
            None => report.mismatches.push(Mismatch {
                indices: n.clone(),
                got: None,
                expected: Some(expected.clone()),
                context: "lambda_g entry missing from table".to_string(),
            }),
            Some(got) => {
                if got != expected {
                    report.mismatches.push(Mismatch {
                        indices: n.clone(),
                        got: Some(got.clone()),
                        expected: Some(expected.clone()),
                        context: "lambda_g multinomial factorization".to_string(),
                    });
                }
                if ell >= 2 {
                    check_removal_recursion(g, ell, &n, &got, table, &mut report);
                }
            }
        }
    }
    Ok(report)
}

fn check_removal_recursion(
    g: u32,
    ell: usize,
    n: &[usize],
    value: &Rational,
    table: &HodgeTable,
    report: &mut MismatchReport,
) {
    let lhs = Rational::from(num::BigInt::from(ell as i64 - 1)) * value;
    let mut rhs = Rational::zero();
    for i in 0..ell {
        for j in (i + 1)..ell {
            if n[i] + n[j] == 0 {
                continue; // the merged tau has index -1, contributing zero
            }
            let mut merged: Vec<usize> = n
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, &v)| v)
                .collect();
            merged.push(n[i] + n[j] - 1);
            let coeff = Rational::from(binomial((n[i] + n[j]) as u64, n[i] as u64));
            match table.get(g, ell - 1, &merged, g) {
                Some(v) => rhs += coeff * v,
                None => {
                    report.mismatches.push(Mismatch {
                        indices: n.to_vec(),
                        got: None,
                        expected: None,
                        context: format!(
                            "removal recursion needs missing entry ({g}, {}, {merged:?})",
                            ell - 1
                        ),
                    });
                    return;
                }
            }
        }
    }
    report.checked += 1;
    if lhs != rhs {
        report.mismatches.push(Mismatch {
            indices: n.to_vec(),
            got: Some(lhs),
            expected: Some(rhs),
            context: "lambda_g removal recursion".to_string(),
        });
    }
}

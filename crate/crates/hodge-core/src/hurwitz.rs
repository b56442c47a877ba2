//! Simple Hurwitz numbers by direct monodromy enumeration in the symmetric
//! group, closed forms for small genus-zero cases, and the cut-and-join
//! consistency check. The oracle is deliberately independent of the
//! polynomial recursion so the two can cross-validate each other.

use crate::error::{Error, Result};
use crate::partition::{multiset_splits, Partition};
use crate::scalar::{factorial, Rational};
use num::{BigInt, Zero};

/// Where a Hurwitz value came from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    Oracle,
    ClosedForm,
    Elsv,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Oracle => "oracle",
            Provenance::ClosedForm => "closed_form",
            Provenance::Elsv => "elsv",
        }
    }
}

/// A computed simple Hurwitz number h_{g, mu} with its origin.
#[derive(Clone, PartialEq, Debug)]
pub struct HurwitzValue {
    pub g: u32,
    pub mu: Partition,
    pub value: Rational,
    pub provenance: Provenance,
}

/// Count tuples of r transpositions in S_d whose product is the fixed
/// permutation sigma0 and which generate a transitive subgroup together
/// with it, by exhaustive depth-first search. The count is exactly
/// T^r leaf visits with T = d(d-1)/2; `budget` caps that up front.
pub fn hurwitz_oracle(g: u32, mu: &Partition, budget: u64) -> Result<HurwitzValue> {
    if mu.is_empty() {
        return Err(Error::InvalidInput(
            "hurwitz numbers need a nonempty ramification profile".to_string(),
        ));
    }
    let d = mu.size() as usize;
    let r = mu.rh_count(g)?;
    let sigma0 = canonical_permutation(mu);
    let count = count_factorizations(d, r, &sigma0, budget)?;
    // h = |C_mu| * count / d!
    let value = Rational::new(
        mu.conjugacy_class_size() * BigInt::from(count),
        factorial(d as u64),
    );
    Ok(HurwitzValue {
        g,
        mu: mu.clone(),
        value,
        provenance: Provenance::Oracle,
    })
}

/// The canonical permutation of cycle type mu: consecutive blocks of
/// 0..d arranged into cycles, one per part.
fn canonical_permutation(mu: &Partition) -> Vec<usize> {
    let d = mu.size() as usize;
    let mut perm = vec![0usize; d];
    let mut start = 0;
    for &part in mu.parts() {
        let len = part as usize;
        for k in 0..len {
            perm[start + k] = start + (k + 1) % len;
        }
        start += len;
    }
    perm
}

fn count_factorizations(d: usize, r: u64, sigma0: &[usize], budget: u64) -> Result<u64> {
    let t_count = d * (d - 1) / 2;
    if t_count == 0 {
        // no transpositions exist; the empty product is the identity
        let ok = r == 0 && sigma0.iter().enumerate().all(|(i, &v)| i == v);
        return Ok(if ok { 1 } else { 0 });
    }
    let mut needed: u128 = 1;
    for _ in 0..r {
        needed = needed.saturating_mul(t_count as u128);
    }
    if needed > budget as u128 {
        return Err(Error::OracleInfeasible { needed, budget });
    }
    let transpositions: Vec<(usize, usize)> = (0..d)
        .flat_map(|a| ((a + 1)..d).map(move |b| (a, b)))
        .collect();
    let mut cur: Vec<usize> = (0..d).collect();
    let mut path: Vec<(usize, usize)> = Vec::with_capacity(r as usize);
    let mut count = 0u64;
    dfs(
        r as usize,
        &mut cur,
        &mut path,
        &transpositions,
        sigma0,
        &mut count,
    );
    Ok(count)
}

fn dfs(
    remaining: usize,
    cur: &mut Vec<usize>,
    path: &mut Vec<(usize, usize)>,
    transpositions: &[(usize, usize)],
    sigma0: &[usize],
    count: &mut u64,
) {
    if remaining == 0 {
        if cur.as_slice() == sigma0 && transitive(cur.len(), path) {
            *count += 1;
        }
        return;
    }
    for &(a, b) in transpositions {
        // right-multiplying by (a b) swaps the images at a and b
        cur.swap(a, b);
        path.push((a, b));
        dfs(remaining - 1, cur, path, transpositions, sigma0, count);
        path.pop();
        cur.swap(a, b);
    }
}

/// Transitivity of the monodromy group. sigma0 is the product of the
/// transpositions on the path, so the group they generate together is
/// generated by the transpositions alone; the cover is connected iff the
/// union-find over the swapped pairs has a single component. Checked only
/// at leaves: pruning on partial products would discard tuples that
/// reconnect later.
fn transitive(d: usize, path: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = d;
    for &(a, b) in path {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

/// Genus-zero closed forms: h_{0,(k)} = k^{k-3} and, for two parts,
/// h_{0,(m1,m2)} = [d!/d * prod_i m_i^{m_i}/m_i!] / |Aut(mu)| with
/// d = m1 + m2.
pub fn hurwitz_closed_form(g: u32, mu: &Partition) -> Result<HurwitzValue> {
    if g != 0 || mu.is_empty() || mu.len() > 2 {
        return Err(Error::InvalidInput(format!(
            "no closed form for g = {g}, mu = {mu}; need g = 0 and one or two parts"
        )));
    }
    let value = if mu.len() == 1 {
        let k = mu.parts()[0] as i64;
        // k^(k-3) as an exact rational, negative exponents included
        if k >= 3 {
            Rational::from(BigInt::from(k).pow(k as u32 - 3))
        } else {
            Rational::new(BigInt::from(1), BigInt::from(k).pow(3 - k as u32))
        }
    } else {
        let d = mu.size();
        let mut v = Rational::new(factorial(d), BigInt::from(d));
        for &m in mu.parts() {
            v *= Rational::new(BigInt::from(m).pow(m), factorial(m as u64));
        }
        v / Rational::from(mu.aut_order())
    };
    Ok(HurwitzValue {
        g,
        mu: mu.clone(),
        value,
        provenance: Provenance::ClosedForm,
    })
}

/// The generating-function normalization H_g(mu) = |Aut(mu)| h_{g,mu} / r!.
pub fn h_function(g: u32, mu: &Partition, h: &Rational) -> Result<Rational> {
    let r = mu.rh_count(g)?;
    Ok(Rational::from(mu.aut_order()) * h / Rational::from(factorial(r)))
}

/// Outcome of checking one cut-and-join instance.
#[derive(Clone, PartialEq, Debug)]
pub enum CajReport {
    /// Both sides were computable; holds iff residual is zero.
    Checked {
        holds: bool,
        lhs: Rational,
        rhs: Rational,
        residual: Rational,
    },
    /// Some H values the equation needs were not supplied.
    Missing { needed: Vec<(u32, Partition)> },
}

impl CajReport {
    pub fn holds(&self) -> bool {
        matches!(self, CajReport::Checked { holds: true, .. })
    }
}

/// Check the cut-and-join equation at (g, mu):
///
///   r H_g(mu) = sum_{i<j} (mu_i + mu_j) H_g(join)
///             + (1/2) sum_i sum_{a+b = mu_i} a b [ H_{g-1}(mu-hat, a, b)
///               + sum_{g1+g2=g} sum_{nu1 + nu2 = mu-hat} w(nu1)
///                 H_{g1}(nu1, a) H_{g2}(nu2, b) ]
///
/// where the (a, b) sum is over ordered positive pairs, the inner split sum
/// is over ordered sub-multiset pairs, and w is the labeled-cycle count
/// prod_k C(m_k(mu-hat), m_k(nu1)). The lookup supplies H values (the
/// normalization of `h_function`); any missing value makes the check
/// inconclusive rather than failed.
pub fn cut_and_join_verify<F>(g: u32, mu: &Partition, lookup: F) -> Result<CajReport>
where
    F: Fn(u32, &Partition) -> Option<Rational>,
{
    if mu.is_empty() {
        return Err(Error::InvalidInput(
            "cut-and-join needs a nonempty profile".to_string(),
        ));
    }
    let r = mu.rh_count(g)?;
    let mut missing: Vec<(u32, Partition)> = Vec::new();
    let mut fetch = |g: u32, nu: &Partition| -> Rational {
        match lookup(g, nu) {
            Some(v) => v,
            None => {
                if !missing.contains(&(g, nu.clone())) {
                    missing.push((g, nu.clone()));
                }
                Rational::zero()
            }
        }
    };

    let lhs = Rational::from(BigInt::from(r)) * fetch(g, mu);

    let mut rhs = Rational::zero();
    // join terms
    for i in 0..mu.len() {
        for j in (i + 1)..mu.len() {
            let joined = mu.join_parts(i, j)?;
            let weight = Rational::from(BigInt::from(mu.parts()[i] + mu.parts()[j]));
            rhs += weight * fetch(g, &joined);
        }
    }
    // cut terms
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    for i in 0..mu.len() {
        let part = mu.parts()[i];
        let rest = mu.remove_part(i)?;
        for a in 1..part {
            let b = part - a;
            let ab = Rational::from(BigInt::from(a as u64 * b as u64));
            // connected cut: genus drops
            if g >= 1 {
                let cut = rest.with_part(a)?.with_part(b)?;
                rhs += &half * &ab * fetch(g - 1, &cut);
            }
            // disconnected cut: ordered genus and multiset splittings,
            // weighted by the number of labeled-cycle realizations
            for g1 in 0..=g {
                let g2 = g - g1;
                for (nu1, nu2, w) in multiset_splits(&rest) {
                    let left = fetch(g1, &nu1.with_part(a)?);
                    let right = fetch(g2, &nu2.with_part(b)?);
                    rhs += &half * &ab * Rational::from(w) * left * right;
                }
            }
        }
    }

    if !missing.is_empty() {
        return Ok(CajReport::Missing { needed: missing });
    }
    let residual = lhs.clone() - rhs.clone();
    Ok(CajReport::Checked {
        holds: residual.is_zero(),
        lhs,
        rhs,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use std::collections::BTreeMap;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    const BUDGET: u64 = 10_000_000;

    #[test]
    fn base_cases() {
        assert_eq!(
            hurwitz_oracle(0, &p(&[1]), BUDGET).unwrap().value,
            rat(1, 1)
        );
        assert_eq!(
            hurwitz_oracle(0, &p(&[2]), BUDGET).unwrap().value,
            rat(1, 2)
        );
        assert_eq!(
            hurwitz_oracle(1, &p(&[1, 1]), BUDGET).unwrap().value,
            rat(1, 2)
        );
        assert_eq!(
            hurwitz_oracle(1, &p(&[1]), BUDGET).unwrap().value,
            rat(0, 1)
        );
    }

    #[test]
    fn oracle_table() {
        // frozen values, recomputable by hand from the monodromy definition
        let cases: &[(u32, &[u32], (i64, i64))] = &[
            (0, &[1], (1, 1)),
            (0, &[1, 1], (1, 2)),
            (0, &[1, 1, 1], (4, 1)),
            (0, &[1, 1, 1, 1], (120, 1)),
            (0, &[2], (1, 2)),
            (0, &[2, 1], (4, 1)),
            (0, &[2, 1, 1], (120, 1)),
            (0, &[2, 2], (12, 1)),
            (0, &[3], (1, 1)),
            (0, &[3, 1], (27, 1)),
            (0, &[4], (4, 1)),
            (1, &[1], (0, 1)),
            (1, &[1, 1], (1, 2)),
            (1, &[1, 1, 1], (40, 1)),
            (1, &[2], (1, 2)),
            (1, &[2, 1], (40, 1)),
            (1, &[2, 2], (480, 1)),
            (1, &[3], (9, 1)),
            (1, &[3, 1], (1215, 1)),
            (1, &[4], (160, 1)),
            (2, &[1], (0, 1)),
            (2, &[1, 1], (1, 2)),
            (2, &[2], (1, 2)),
            (2, &[3], (81, 1)),
            (3, &[1], (0, 1)),
            (3, &[2], (1, 2)),
        ];
        for &(g, parts, (n, d)) in cases {
            let got = hurwitz_oracle(g, &p(parts), BUDGET).unwrap();
            assert_eq!(got.value, rat(n, d), "h_{{{g}, {}}}", p(parts));
            assert_eq!(got.provenance, Provenance::Oracle);
        }
    }

    #[test]
    fn oracle_budget() {
        // (2, (4)): T = 6, r = 7, needs 6^7 = 279936 leaves
        let err = hurwitz_oracle(2, &p(&[4]), 1000).unwrap_err();
        match err {
            Error::OracleInfeasible { needed, budget } => {
                assert_eq!(needed, 279936);
                assert_eq!(budget, 1000);
            }
            other => panic!("expected OracleInfeasible, got {other:?}"),
        }
        assert_eq!(
            hurwitz_oracle(2, &p(&[4]), BUDGET).unwrap().value,
            rat(5824, 1)
        );
    }

    #[test]
    fn closed_forms() {
        assert_eq!(hurwitz_closed_form(0, &p(&[4])).unwrap().value, rat(4, 1));
        assert_eq!(hurwitz_closed_form(0, &p(&[1])).unwrap().value, rat(1, 1));
        assert_eq!(hurwitz_closed_form(0, &p(&[2])).unwrap().value, rat(1, 2));
        assert_eq!(
            hurwitz_closed_form(0, &p(&[1, 1])).unwrap().value,
            rat(1, 2)
        );
        assert_eq!(
            hurwitz_closed_form(0, &p(&[2, 1])).unwrap().value,
            rat(4, 1)
        );
        assert!(hurwitz_closed_form(1, &p(&[2])).is_err());
        assert!(hurwitz_closed_form(0, &p(&[1, 1, 1])).is_err());
    }

    #[test]
    fn closed_forms_match_oracle() {
        for size in 1..=5u32 {
            for mu in crate::partition::enumerate_partitions(size) {
                if mu.len() > 2 || (mu.len() == 1 && size > 4) {
                    continue;
                }
                let closed = hurwitz_closed_form(0, &mu).unwrap().value;
                let oracle = hurwitz_oracle(0, &mu, BUDGET).unwrap().value;
                assert_eq!(closed, oracle, "mu = {mu}");
            }
        }
    }

    #[test]
    fn h_function_values() {
        // H_0(1,1): |Aut| = 2, r = 2, so 2 * (1/2) / 2! = 1/2
        assert_eq!(h_function(0, &p(&[1, 1]), &rat(1, 2)).unwrap(), rat(1, 2));
        // H_0(3): |Aut| = 1, r = 2, so 1 / 2! = 1/2
        assert_eq!(h_function(0, &p(&[3]), &rat(1, 1)).unwrap(), rat(1, 2));
        // H_1(2): |Aut| = 1, r = 3, so (1/2) / 3! = 1/12
        assert_eq!(h_function(1, &p(&[2]), &rat(1, 2)).unwrap(), rat(1, 12));
    }

    fn h_table(g_max: u32, size_max: u32, r_max: u64) -> BTreeMap<(u32, Partition), Rational> {
        let mut table = BTreeMap::new();
        for g in 0..=g_max {
            for size in 1..=size_max {
                for mu in crate::partition::enumerate_partitions(size) {
                    let r = mu.rh_count(g).unwrap();
                    if r > r_max {
                        continue;
                    }
                    let h = hurwitz_oracle(g, &mu, BUDGET).unwrap().value;
                    let hf = h_function(g, &mu, &h).unwrap();
                    table.insert((g, mu), hf);
                }
            }
        }
        table
    }

    #[test]
    fn cut_and_join_holds() {
        let table = h_table(2, 4, 7);
        let mut checked = 0;
        for ((g, mu), _) in table.clone() {
            if mu.rh_count(g).unwrap() == 0 {
                continue;
            }
            let report =
                cut_and_join_verify(g, &mu, |g2, nu| table.get(&(g2, nu.clone())).cloned())
                    .unwrap();
            match report {
                CajReport::Checked {
                    holds,
                    ref residual,
                    ..
                } => {
                    assert!(
                        holds,
                        "cut-and-join fails at ({g}, {mu}): residual {residual}"
                    );
                    checked += 1;
                }
                CajReport::Missing { .. } => {}
            }
        }
        assert!(checked >= 15, "only {checked} instances were checkable");
    }

    #[test]
    fn cut_and_join_weighted_split_case() {
        // (0, (2,1,1)) needs the binomial weight on identical parts:
        // without it the right side comes up 1/8 short
        let table = h_table(0, 4, 7);
        let report = cut_and_join_verify(0, &p(&[2, 1, 1]), |g2, nu| {
            table.get(&(g2, nu.clone())).cloned()
        })
        .unwrap();
        match report {
            CajReport::Checked { holds, lhs, .. } => {
                assert!(holds);
                // r = 5, H = 2 * 120 / 5! = 2
                assert_eq!(lhs, rat(10, 1));
            }
            CajReport::Missing { needed } => panic!("missing {needed:?}"),
        }
    }

    #[test]
    fn cut_and_join_reports_missing() {
        let report = cut_and_join_verify(1, &p(&[2, 2]), |_, _| None).unwrap();
        match report {
            CajReport::Missing { needed } => assert!(!needed.is_empty()),
            other => panic!("expected missing report, got {other:?}"),
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        // counting against a conjugated base permutation gives the same
        // factorization count: the class, not the representative, matters
        fn relabeled_count(mu: &Partition, g: u32, relabel: &[usize]) -> u64 {
            let d = mu.size() as usize;
            let base = canonical_permutation(mu);
            let mut sigma = vec![0usize; d];
            for x in 0..d {
                sigma[relabel[x]] = relabel[base[x]];
            }
            let r = mu.rh_count(g).unwrap();
            count_factorizations(d, r, &sigma, 10_000_000).unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn conjugation_invariance(
                parts in proptest::collection::vec(1u32..=3, 1..=3),
                g in 0u32..=1,
                shuffle_seed in any::<u64>(),
            ) {
                let mu = Partition::new(parts).unwrap();
                let d = mu.size() as usize;
                prop_assume!(mu.rh_count(g).unwrap() <= 5);
                // derive a permutation of 0..d from the seed
                let mut relabel: Vec<usize> = (0..d).collect();
                let mut s = shuffle_seed;
                for k in (1..d).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    relabel.swap(k, (s >> 33) as usize % (k + 1));
                }
                let canonical = relabeled_count(&mu, g, &(0..d).collect::<Vec<_>>());
                let conjugated = relabeled_count(&mu, g, &relabel);
                prop_assert_eq!(canonical, conjugated);
            }
        }
    }
}

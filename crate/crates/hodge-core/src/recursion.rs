//! The polynomial recursion for the generating polynomials H_{g,l} of
//! linear Hodge integrals, in two algebraically equivalent assemblies, with
//! the triangular solve that inverts the first-order operator on the left
//! side, extraction of Hodge integrals from xi-coefficients, and the ELSV
//! evaluation of Hurwitz numbers from the recursion output.

use crate::error::{Error, Result};
use crate::hurwitz::{HurwitzValue, Provenance};
use crate::partition::Partition;
use crate::poly::{Monomial, MultiPoly};
use crate::scalar::{factorial, rat, rat_int, Rational};
use crate::xi::{from_xi_basis, to_xi_basis, XiExpansion, XiFamily};
use num::{BigInt, Zero};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

/// (g, l) indexes a stable curve class: 2g - 2 + l > 0.
pub fn is_stable(g: u32, ell: usize) -> bool {
    2 * (g as i64) - 2 + ell as i64 > 0
}

/// Demand-driven computer and cache for the polynomials H_{g,l}.
pub struct Engine {
    xi: XiFamily,
    cache: Mutex<BTreeMap<(u32, usize), MultiPoly>>,
    fresh: AtomicU64,
}

impl Engine {
    pub fn new() -> Self {
        let mut cache = BTreeMap::new();
        cache.insert((0u32, 3usize), seed_h03());
        cache.insert((1u32, 1usize), seed_h11());
        Engine {
            xi: XiFamily::new(),
            cache: Mutex::new(cache),
            fresh: AtomicU64::new(0),
        }
    }

    pub fn xi_family(&self) -> &XiFamily {
        &self.xi
    }

    /// Number of polynomials computed by recursion in this engine (seeded
    /// and cache-loaded entries do not count).
    pub fn fresh_computations(&self) -> u64 {
        self.fresh.load(Ordering::Relaxed)
    }

    /// The polynomial H_{g,l}, computing and caching dependencies as needed.
    pub fn hodge_poly(&self, g: u32, ell: usize) -> Result<MultiPoly> {
        if !is_stable(g, ell) {
            return Err(Error::InvalidInput(format!(
                "H_{{{g},{ell}}} is unstable; the recursion only covers 2g - 2 + l > 0"
            )));
        }
        if let Some(p) = self.cache.lock().unwrap().get(&(g, ell)) {
            return Ok(p.clone());
        }
        let rhs = self.assemble_rhs(g, ell, Form::Main)?;
        let poly = self.solve_and_check(g, ell, &rhs)?;
        self.cache.lock().unwrap().insert((g, ell), poly.clone());
        self.fresh.fetch_add(1, Ordering::Relaxed);
        Ok(poly)
    }

    /// H_{g,l} computed through the alternative assembly of the right side.
    /// Sub-polynomials come from the shared cache (they are unique), but the
    /// pair terms are assembled along a different algebraic route, so
    /// agreement with `hodge_poly` exercises genuinely different code.
    pub fn hodge_poly_alt(&self, g: u32, ell: usize) -> Result<MultiPoly> {
        if !is_stable(g, ell) {
            return Err(Error::InvalidInput(format!("H_{{{g},{ell}}} is unstable")));
        }
        if let Some(seed) = seed_for(g, ell) {
            return Ok(seed);
        }
        let rhs = self.assemble_rhs(g, ell, Form::Alt)?;
        self.solve_and_check(g, ell, &rhs)
    }

    /// The xi-expansion of H_{g,l}.
    pub fn hodge_xi_expansion(&self, g: u32, ell: usize) -> Result<XiExpansion> {
        let poly = self.hodge_poly(g, ell)?;
        to_xi_basis(&poly, &self.xi)
    }

    fn solve_and_check(&self, g: u32, ell: usize, rhs: &MultiPoly) -> Result<MultiPoly> {
        let c = euler_weight(g, ell);
        let poly = solve_lhs(rhs, c)?;
        let back = apply_lhs(&poly, c)?;
        if back != *rhs {
            return Err(Error::InvariantViolation(format!(
                "H_{{{g},{ell}}}: solution does not satisfy the defining equation"
            )));
        }
        if !poly.is_symmetric() {
            return Err(Error::InvariantViolation(format!(
                "H_{{{g},{ell}}} is not symmetric"
            )));
        }
        let expect_deg = 3 * c as u32;
        if poly.total_degree() != Some(expect_deg) {
            return Err(Error::InvariantViolation(format!(
                "H_{{{g},{ell}}} has degree {:?}, expected {expect_deg}",
                poly.total_degree()
            )));
        }
        Ok(poly)
    }

    fn assemble_rhs(&self, g: u32, ell: usize, form: Form) -> Result<MultiPoly> {
        let mut rhs = MultiPoly::zero(ell);
        // pair terms, consuming H_{g, l-1}
        if ell >= 2 {
            let sub = self.hodge_poly(g, ell - 1)?;
            for i in 0..ell {
                for j in 0..ell {
                    if i == j {
                        continue;
                    }
                    let term = match form {
                        Form::Main => {
                            if i < j {
                                pair_term_main(&sub, ell, i, j)?
                            } else {
                                continue;
                            }
                        }
                        Form::Alt => pair_term_alt(&sub, ell, i, j)?,
                    };
                    rhs = rhs.add(&term)?;
                }
            }
        }
        let half = rat(1, 2);
        // genus-reducing term, consuming H_{g-1, l+1} on the diagonal
        if g >= 1 {
            let sub = self.hodge_poly(g - 1, ell + 1)?;
            let dd = sub.apply_d(0)?.apply_d(1)?;
            for i in 0..ell {
                let mut vmap = vec![i, i];
                vmap.extend((0..ell).filter(|&k| k != i));
                rhs = rhs.add(&dd.embed(ell, &vmap)?.scale(&half))?;
            }
        }
        // stable splittings of genus and marked points
        for i in 0..ell {
            let others: Vec<usize> = (0..ell).filter(|&k| k != i).collect();
            for mask in 0u32..(1 << others.len()) {
                let jset: Vec<usize> = others
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &s)| s)
                    .collect();
                let kset: Vec<usize> = others
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| mask & (1 << b) == 0)
                    .map(|(_, &s)| s)
                    .collect();
                for g1 in 0..=g {
                    let g2 = g - g1;
                    if !is_stable(g1, jset.len() + 1) || !is_stable(g2, kset.len() + 1) {
                        continue;
                    }
                    let f1 = self.split_factor(g1, i, &jset, ell)?;
                    let f2 = self.split_factor(g2, i, &kset, ell)?;
                    rhs = rhs.add(&f1.mul(&f2)?.scale(&half))?;
                }
            }
        }
        Ok(rhs)
    }

    /// D H_{g1} applied in the variable that lands on slot i, with the
    /// remaining variables embedded on `slots`.
    fn split_factor(&self, g1: u32, i: usize, slots: &[usize], ell: usize) -> Result<MultiPoly> {
        let sub = self.hodge_poly(g1, slots.len() + 1)?;
        let mut vmap = vec![i];
        vmap.extend_from_slice(slots);
        sub.apply_d(0)?.embed(ell, &vmap)
    }

    /// Hurwitz number through the ELSV formula, with the stable integrals
    /// read off the recursion output and the two unstable cases supplied by
    /// their standard values 1/k^2 and 1/(m1 + m2).
    pub fn elsv(&self, g: u32, mu: &Partition) -> Result<HurwitzValue> {
        if mu.is_empty() {
            return Err(Error::InvalidInput(
                "ELSV needs a nonempty ramification profile".to_string(),
            ));
        }
        let ell = mu.len();
        let r = mu.rh_count(g)?;
        let mut prefactor = Rational::from(factorial(r)) / Rational::from(mu.aut_order());
        for &m in mu.parts() {
            prefactor *= Rational::new(BigInt::from(m).pow(m), factorial(m as u64));
        }
        let integral = if is_stable(g, ell) {
            let expansion = self.hodge_xi_expansion(g, ell)?;
            let mut total = Rational::zero();
            for (indices, c) in expansion.iter() {
                let mut term = c.clone();
                for (i, &n) in indices.iter().enumerate() {
                    term *= Rational::from(BigInt::from(mu.parts()[i]).pow(n as u32));
                }
                total += term;
            }
            total
        } else if ell == 1 {
            // g = 0, one part: integral is 1/k^2
            let k = mu.parts()[0];
            Rational::new(BigInt::from(1), BigInt::from(k as u64 * k as u64))
        } else {
            // g = 0, two parts: integral is 1/(m1 + m2)
            Rational::new(BigInt::from(1), BigInt::from(mu.size()))
        };
        Ok(HurwitzValue {
            g,
            mu: mu.clone(),
            value: prefactor * integral,
            provenance: Provenance::Elsv,
        })
    }

    /// Serialize every cached polynomial as its xi-expansion. The output is
    /// deterministic: entries sorted by (g, l), coefficients by index
    /// vector, keys alphabetically.
    pub fn save_cache<W: Write>(&self, mut writer: W) -> Result<()> {
        let cache = self.cache.lock().unwrap();
        let mut entries = Vec::with_capacity(cache.len());
        for (&(g, ell), poly) in cache.iter() {
            let expansion = to_xi_basis(poly, &self.xi)?;
            let coeffs: Vec<serde_json::Value> = expansion
                .iter()
                .map(|(n, c)| {
                    serde_json::json!({
                        "n": n,
                        "value": c.to_string(),
                    })
                })
                .collect();
            entries.push(serde_json::json!({
                "g": g,
                "ell": ell,
                "xi_coeffs": coeffs,
            }));
        }
        let doc = serde_json::json!({
            "version": 1,
            "entries": entries,
        });
        let mut text =
            serde_json::to_string_pretty(&doc).map_err(|e| Error::CacheFormat(e.to_string()))?;
        text.push('\n');
        writer.write_all(text.as_bytes())?;
        Ok(())
    }

    /// Load previously saved polynomials. Loaded entries count as cached,
    /// not fresh, so later requests for them do no recursion work.
    pub fn load_cache<R: Read>(&self, mut reader: R) -> Result<usize> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let doc: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::CacheFormat(e.to_string()))?;
        let version = doc
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::CacheFormat("missing version".to_string()))?;
        if version != 1 {
            return Err(Error::CacheFormat(format!(
                "unsupported cache version {version}"
            )));
        }
        let entries = doc
            .get("entries")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::CacheFormat("missing entries array".to_string()))?;
        let mut loaded = 0;
        for entry in entries {
            let g = entry
                .get("g")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::CacheFormat("entry missing g".to_string()))?
                as u32;
            let ell = entry
                .get("ell")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::CacheFormat("entry missing ell".to_string()))?
                as usize;
            let coeffs = entry
                .get("xi_coeffs")
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::CacheFormat("entry missing xi_coeffs".to_string()))?;
            let mut pairs = Vec::with_capacity(coeffs.len());
            for item in coeffs {
                let n: Vec<usize> = item
                    .get("n")
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| Error::CacheFormat("coefficient missing n".to_string()))?
                    .iter()
                    .map(|v| v.as_u64().map(|x| x as usize))
                    .collect::<Option<Vec<usize>>>()
                    .ok_or_else(|| Error::CacheFormat("bad index vector".to_string()))?;
                if n.len() != ell {
                    return Err(Error::CacheFormat(format!(
                        "index vector length {} != ell {ell}",
                        n.len()
                    )));
                }
                let value = item
                    .get("value")
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| Error::CacheFormat("coefficient missing value".to_string()))?;
                let c = crate::scalar::parse_rational(value)?;
                pairs.push((n, c));
            }
            let expansion = XiExpansion::from_coeffs(ell, pairs);
            let poly = from_xi_basis(&expansion, &self.xi);
            self.cache.lock().unwrap().insert((g, ell), poly);
            loaded += 1;
        }
        Ok(loaded)
    }
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Form {
    Main,
    Alt,
}

/// c = 2g - 2 + l, the weight on H_{g,l} on the left side of the recursion.
pub fn euler_weight(g: u32, ell: usize) -> i64 {
    2 * g as i64 - 2 + ell as i64
}

fn seed_h03() -> MultiPoly {
    let mut p = MultiPoly::constant(3, rat_int(1));
    for i in 0..3 {
        let factor = MultiPoly::from_terms(
            3,
            vec![(unit_exp(3, i, 1), rat_int(1)), (vec![0; 3], rat_int(-1))],
        );
        p = p.mul(&factor).unwrap();
    }
    p
}

fn seed_h11() -> MultiPoly {
    MultiPoly::from_terms(
        1,
        vec![
            (vec![3], rat(1, 24)),
            (vec![2], rat(-1, 24)),
            (vec![1], rat(-1, 24)),
            (vec![0], rat(1, 24)),
        ],
    )
}

fn seed_for(g: u32, ell: usize) -> Option<MultiPoly> {
    match (g, ell) {
        (0, 3) => Some(seed_h03()),
        (1, 1) => Some(seed_h11()),
        _ => None,
    }
}

fn unit_exp(arity: usize, i: usize, e: u32) -> Vec<u32> {
    let mut v = vec![0; arity];
    v[i] = e;
    v
}

/// t_i^a * (t_j - 1)^b style helper: the quadratic prefactors in the pair
/// terms, as explicit polynomials.
fn mono(arity: usize, pairs: &[(usize, u32)]) -> MultiPoly {
    let mut e = vec![0u32; arity];
    for &(i, a) in pairs {
        e[i] += a;
    }
    MultiPoly::from_terms(arity, vec![(e, rat_int(1))])
}

/// Main-form pair term for i < j:
/// [t_i^2 (t_j - 1) D_i H(t without j) - t_j^2 (t_i - 1) D_j H(t without i)]
/// divided exactly by (t_i - t_j).
fn pair_term_main(sub: &MultiPoly, ell: usize, i: usize, j: usize) -> Result<MultiPoly> {
    let slots_no_j: Vec<usize> = (0..ell).filter(|&k| k != j).collect();
    let slots_no_i: Vec<usize> = (0..ell).filter(|&k| k != i).collect();
    let da = sub.embed(ell, &slots_no_j)?.apply_d(i)?;
    let db = sub.embed(ell, &slots_no_i)?.apply_d(j)?;
    let pre_a = mono(ell, &[(i, 2), (j, 1)]).sub(&mono(ell, &[(i, 2)]))?;
    let pre_b = mono(ell, &[(j, 2), (i, 1)]).sub(&mono(ell, &[(j, 2)]))?;
    let numerator = pre_a.mul(&da)?.sub(&pre_b.mul(&db)?)?;
    numerator.divided_difference(i, j)
}

/// Alt-form pair contribution for an ordered pair i != j: for i < j the
/// divided-difference part
/// t_i t_j [t_i^2 (t_i - 1)^2 d_i H(t without j) - t_j^2 (t_j - 1)^2 d_j
/// H(t without i)] / (t_i - t_j), and for every ordered pair the transfer
/// part -t_i^3 (t_i - 1) d_i H(t without j).
fn pair_term_alt(sub: &MultiPoly, ell: usize, i: usize, j: usize) -> Result<MultiPoly> {
    let slots_no_j: Vec<usize> = (0..ell).filter(|&k| k != j).collect();
    let emb_no_j = sub.embed(ell, &slots_no_j)?;
    // transfer part, present for every ordered pair
    let cubic = mono(ell, &[(i, 4)]).sub(&mono(ell, &[(i, 3)]))?;
    let mut term = cubic.mul(&emb_no_j.partial(i)?)?.neg();
    // divided-difference part, counted once per unordered pair
    if i < j {
        let slots_no_i: Vec<usize> = (0..ell).filter(|&k| k != i).collect();
        let emb_no_i = sub.embed(ell, &slots_no_i)?;
        let sq = |v: usize| -> Result<MultiPoly> {
            // t_v^2 (t_v - 1)^2 = t_v^4 - 2 t_v^3 + t_v^2
            mono(ell, &[(v, 4)])
                .sub(&mono(ell, &[(v, 3)]).scale(&rat_int(2)))?
                .add(&mono(ell, &[(v, 2)]))
        };
        let lead = mono(ell, &[(i, 1), (j, 1)]);
        let numerator = sq(i)?
            .mul(&emb_no_j.partial(i)?)?
            .sub(&sq(j)?.mul(&emb_no_i.partial(j)?)?)?;
        let dd = numerator.divided_difference(i, j)?;
        term = term.add(&lead.mul(&dd)?)?;
    }
    Ok(term)
}

/// Apply the left-side operator c + sum_i (t_i^2 - t_i) d_i.
pub fn apply_lhs(p: &MultiPoly, c: i64) -> Result<MultiPoly> {
    let arity = p.arity();
    let mut out = p.scale(&rat_int(c));
    for i in 0..arity {
        let d = p.partial(i)?;
        let quad = mono(arity, &[(i, 2)]).sub(&mono(arity, &[(i, 1)]))?;
        out = out.add(&quad.mul(&d)?)?;
    }
    Ok(out)
}

/// Solve (c + sum_i (t_i^2 - t_i) d_i) X = R for polynomial X. Substituting
/// s = t - 1 makes the operator triangular on monomials:
///   T(s^e) = (c + |e|) s^e + sum_i e_i s^(e + delta_i),
/// so X is determined degree by degree from the smallest exponent up. The
/// solution must close off at degree 3c; a forced coefficient above that
/// bound means R was not in the image and the assembly is wrong.
pub fn solve_lhs(r_t: &MultiPoly, c: i64) -> Result<MultiPoly> {
    let arity = r_t.arity();
    if c <= 0 {
        return Err(Error::InvalidInput(format!(
            "left-side weight c = {c} must be positive"
        )));
    }
    let deg_bound = 3 * c;
    let r_s = r_t.shift_all(1);
    let mut pending: BTreeMap<Monomial, Rational> =
        r_s.terms().map(|(m, v)| (m.clone(), v.clone())).collect();
    let mut solution: Vec<(Vec<u32>, Rational)> = Vec::new();
    while let Some((e, v)) = pending.pop_first() {
        if v.is_zero() {
            continue;
        }
        let deg = e.total_degree() as i64;
        if deg > deg_bound {
            return Err(Error::InvariantViolation(format!(
                "solve forced a coefficient at degree {deg} > {deg_bound}"
            )));
        }
        let xe = v / rat_int(c + deg);
        for i in 0..arity {
            let exp = e.0[i];
            if exp == 0 {
                continue;
            }
            let mut up = e.0.clone();
            up[i] += 1;
            let delta = &xe * rat_int(exp as i64);
            use std::collections::btree_map::Entry;
            match pending.entry(Monomial(up)) {
                Entry::Vacant(slot) => {
                    slot.insert(-delta);
                }
                Entry::Occupied(mut o) => {
                    *o.get_mut() -= delta;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        solution.push((e.0, xe));
    }
    let x_s = MultiPoly::from_terms(arity, solution);
    Ok(x_s.shift_all(-1))
}

/// Table of linear Hodge integrals <tau_{n_1} ... tau_{n_l} lambda_j>,
/// keyed by (g, l, indices sorted descending, j). Inserts from different
/// variable orderings must agree, which doubles as a symmetry check.
#[derive(Clone, Default, Debug)]
pub struct HodgeTable {
    entries: BTreeMap<(u32, usize, Vec<usize>, u32), Rational>,
}

impl HodgeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        g: u32,
        ell: usize,
        indices: &[usize],
        j: u32,
        value: Rational,
    ) -> Result<()> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let key = (g, ell, sorted, j);
        if let Some(existing) = self.entries.get(&key) {
            if *existing != value {
                return Err(Error::InvariantViolation(format!(
                    "inconsistent Hodge integral at {key:?}: {existing} vs {value}"
                )));
            }
            return Ok(());
        }
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn get(&self, g: u32, ell: usize, indices: &[usize], j: u32) -> Option<Rational> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        self.entries.get(&(g, ell, sorted, j)).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, usize, Vec<usize>, u32), &Rational)> {
        self.entries.iter()
    }
}

/// Read the linear Hodge integrals out of the xi-expansion of H_{g,l}:
/// the coefficient of the xi-product indexed by n is
/// (-1)^j <tau_{n_1} ... tau_{n_l} lambda_j> with j = 3g - 3 + l - |n|.
/// A nonzero coefficient with j outside 0..=g violates the dimension
/// constraints and is reported as an error.
pub fn extract_hodge(
    g: u32,
    ell: usize,
    poly: &MultiPoly,
    family: &XiFamily,
    table: &mut HodgeTable,
) -> Result<()> {
    let expansion = to_xi_basis(poly, family)?;
    for (indices, coeff) in expansion.iter() {
        let weight: i64 = indices.iter().map(|&n| n as i64).sum();
        let j = 3 * g as i64 - 3 + ell as i64 - weight;
        if j < 0 || j > g as i64 {
            return Err(Error::InvariantViolation(format!(
                "xi-coefficient at {indices:?} of H_{{{g},{ell}}} implies lambda index {j} outside 0..={g}"
            )));
        }
        let sign = if j % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        table.insert(g, ell, indices, j as u32, sign * coeff)?;
    }
    Ok(())
}

//! Command-line front end for the hodge-core library.
//!
//! Subcommands compute xi-polynomials, Hodge generating polynomials,
//! psi-class intersection numbers, and simple Hurwitz numbers, and run the
//! cross-verification suites (cut-and-join, DVV, lambda_g, Lambert-curve
//! numerics, oracle cross-checks, dual recursion forms).
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage error,
//! 3 the requested oracle enumeration exceeds its budget.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hodge_core::dvv::{check_lambda_g, check_top_degree, PsiTable};
use hodge_core::hurwitz::{
    cut_and_join_verify, h_function, hurwitz_closed_form, hurwitz_oracle, CajReport,
};
use hodge_core::lambert::{t_of_w, unstable_eval, xi_series_check, UnstableKind};
use hodge_core::partition::{enumerate_partitions, Partition};
use hodge_core::recursion::{extract_hodge, is_stable, Engine, HodgeTable};
use hodge_core::scalar::b_coefficients;
use hodge_core::xi::XiFamily;
use hodge_core::{Error, Rational, Result};

#[derive(Parser)]
#[command(
    name = "hodge",
    version,
    about = "Exact linear Hodge integrals, psi-class intersections, and simple Hurwitz numbers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print xi_n as a polynomial in t
    Xi {
        /// Index of the family member
        n: usize,
    },
    /// Print the xi-expansion of the generating polynomial H_{g,l}
    Hodge {
        /// Genus
        g: u32,
        /// Number of marked points (must be stable: 2g - 2 + l > 0)
        ell: usize,
        #[arg(long, value_enum, default_value_t = HodgeFormat::Text)]
        format: HodgeFormat,
        /// Cache file to load before and save after the run
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Print <tau_{n_1} ... tau_{n_l}>_g from the DVV recursion
    Psi {
        /// Genus
        g: u32,
        /// Indices n_1 .. n_l
        #[arg(required = true)]
        indices: Vec<usize>,
    },
    /// Print a simple Hurwitz number h_{g,mu} as JSON
    Hurwitz {
        /// Genus
        g: u32,
        /// Ramification profile mu_1 .. mu_l (positive integers)
        #[arg(required = true)]
        mu: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Method::Elsv)]
        method: Method,
        /// Leaf budget for the monodromy oracle (at least 1000)
        #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1_000..))]
        budget: u64,
    },
    /// Print every linear Hodge integral with Euler weight 2g - 2 + l up to a bound
    Table {
        /// Largest Euler weight to include (at least 1)
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        max_euler: i64,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
        /// Cache file to load before and save after the run
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run a verification suite; exits 0 only if every check passes
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
}

#[derive(Subcommand)]
enum VerifySuite {
    /// Cut-and-join equation over a table of oracle Hurwitz numbers
    Caj {
        /// Largest profile size |mu|
        #[arg(long, default_value_t = 4)]
        size_max: u32,
        /// Largest transposition count r = 2g - 2 + l + |mu|
        #[arg(long, default_value_t = 7)]
        r_max: u64,
        /// Leaf budget for the monodromy oracle (at least 1000)
        #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1_000..))]
        budget: u64,
    },
    /// Top-degree xi-coefficients of H_{g,l} against the DVV recursion
    Dvv {
        /// Largest Euler weight 2g - 2 + l to check (at least 1)
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(1..))]
        max_euler: i64,
    },
    /// lambda_g layer of the Hodge table against the b-series
    LambdaG {
        /// Largest genus (at least 1)
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        gmax: u32,
        /// Largest number of marked points
        #[arg(long, default_value_t = 3)]
        ell_max: usize,
    },
    /// Exact xi-polynomials and unstable closed forms against Lambert-curve series
    Lambert {
        /// Largest xi index to compare (at most 6)
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Sample points on the w-axis (each at least 1/2)
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
        w: Vec<f64>,
        /// Series index cap
        #[arg(long, default_value_t = 400)]
        k_max: usize,
    },
    /// ELSV-side Hurwitz numbers against the monodromy oracle and closed forms
    Cross {
        /// Largest profile size |mu|
        #[arg(long, default_value_t = 4)]
        size_max: u32,
        /// Largest transposition count r = 2g - 2 + l + |mu|
        #[arg(long, default_value_t = 7)]
        r_max: u64,
        /// Leaf budget for the monodromy oracle (at least 1000)
        #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1_000..))]
        budget: u64,
    },
    /// Agreement of the two assembled forms of the recursion right-hand side
    Dual {
        /// Largest Euler weight 2g - 2 + l to check (at least 1)
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(1..))]
        max_euler: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HodgeFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Elsv,
    Oracle,
    Closed,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::OracleInfeasible { .. } => 3,
                Error::InvalidInput(_) => 2,
                _ => 1,
            }
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Xi { n } => {
            println!("{}", XiFamily::new().xi(n));
            Ok(true)
        }
        Command::Hodge {
            g,
            ell,
            format,
            cache,
        } => cmd_hodge(g, ell, format, cache.as_deref()),
        Command::Psi { g, indices } => {
            println!("{}", PsiTable::new().psi_intersection(g, &indices));
            Ok(true)
        }
        Command::Hurwitz {
            g,
            mu,
            method,
            budget,
        } => cmd_hurwitz(g, mu, method, budget),
        Command::Table {
            max_euler,
            format,
            cache,
        } => cmd_table(max_euler, format, cache.as_deref()),
        Command::Verify { suite } => match suite {
            VerifySuite::Caj {
                size_max,
                r_max,
                budget,
            } => verify_caj(size_max, r_max, budget),
            VerifySuite::Dvv { max_euler } => verify_dvv(max_euler),
            VerifySuite::LambdaG { gmax, ell_max } => verify_lambda_g(gmax, ell_max),
            VerifySuite::Lambert { n_max, w, k_max } => verify_lambert(n_max, &w, k_max),
            VerifySuite::Cross {
                size_max,
                r_max,
                budget,
            } => verify_cross(size_max, r_max, budget),
            VerifySuite::Dual { max_euler } => verify_dual(max_euler),
        },
    }
}

fn cmd_hodge(g: u32, ell: usize, format: HodgeFormat, cache: Option<&Path>) -> Result<bool> {
    let engine = Engine::new();
    load_cache_if_present(&engine, cache)?;
    let expansion = engine.hodge_xi_expansion(g, ell)?;
    match format {
        HodgeFormat::Text => {
            for (n, c) in expansion.iter() {
                let factors: Vec<String> = n
                    .iter()
                    .enumerate()
                    .map(|(i, &ni)| format!("xi_{ni}(t_{})", i + 1))
                    .collect();
                println!("{c} * {}", factors.join(" "));
            }
        }
        HodgeFormat::Json => {
            let coeffs: Vec<serde_json::Value> = expansion
                .iter()
                .map(|(n, c)| json!({"n": n, "value": c.to_string()}))
                .collect();
            let obj = json!({"g": g, "ell": ell, "xi_coeffs": coeffs});
            println!("{}", to_pretty(&obj));
        }
    }
    save_cache_if_requested(&engine, cache)?;
    if cache.is_some() {
        eprintln!("cache: {} fresh computations", engine.fresh_computations());
    }
    Ok(true)
}

fn cmd_hurwitz(g: u32, mu: Vec<u32>, method: Method, budget: u64) -> Result<bool> {
    let mu = Partition::new(mu)?;
    let hv = match method {
        Method::Elsv => Engine::new().elsv(g, &mu)?,
        Method::Oracle => hurwitz_oracle(g, &mu, budget)?,
        Method::Closed => hurwitz_closed_form(g, &mu)?,
    };
    let obj = json!({
        "g": hv.g,
        "mu": hv.mu.parts(),
        "h": hv.value.to_string(),
        "provenance": hv.provenance.as_str(),
    });
    println!(
        "{}",
        serde_json::to_string(&obj).expect("json encoding cannot fail")
    );
    Ok(true)
}

fn cmd_table(max_euler: i64, format: TableFormat, cache: Option<&Path>) -> Result<bool> {
    let engine = Engine::new();
    load_cache_if_present(&engine, cache)?;
    let mut table = HodgeTable::new();
    for (g, ell) in stable_keys(max_euler) {
        let poly = engine.hodge_poly(g, ell)?;
        extract_hodge(g, ell, &poly, engine.xi_family(), &mut table)?;
    }
    match format {
        TableFormat::Json => {
            let entries: Vec<serde_json::Value> = table
                .iter()
                .map(|((g, ell, n, j), v)| {
                    json!({"g": g, "ell": ell, "n": n, "j": j, "value": v.to_string()})
                })
                .collect();
            let obj = json!({"max_euler": max_euler, "entries": entries});
            println!("{}", to_pretty(&obj));
        }
        TableFormat::Csv => {
            println!("g,ell,n,j,value");
            for ((g, ell, n, j), v) in table.iter() {
                let n_str = n
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("{g},{ell},{n_str},{j},{v}");
            }
        }
    }
    save_cache_if_requested(&engine, cache)?;
    if cache.is_some() {
        eprintln!("cache: {} fresh computations", engine.fresh_computations());
    }
    Ok(true)
}

/// Check cut-and-join at every (g, mu) with |mu| <= size_max and
/// 1 <= r <= r_max, over a table of oracle values. Every H value the
/// equation consults has transposition count r - 1 and size |mu|, so the
/// table built with the same bounds is closed under the recursion.
fn verify_caj(size_max: u32, r_max: u64, budget: u64) -> Result<bool> {
    let mut hmap: BTreeMap<(u32, Vec<u32>), Rational> = BTreeMap::new();
    for d in 1..=size_max {
        for mu in enumerate_partitions(d) {
            let mut g = 0u32;
            while mu.rh_count(g)? <= r_max {
                let hv = hurwitz_oracle(g, &mu, budget)?;
                hmap.insert((g, mu.parts().to_vec()), h_function(g, &mu, &hv.value)?);
                g += 1;
            }
        }
    }
    let lookup = |g: u32, nu: &Partition| hmap.get(&(g, nu.parts().to_vec())).cloned();
    let mut checked = 0usize;
    let mut failures: Vec<String> = Vec::new();
    for (g, parts) in hmap.keys() {
        let mu = Partition::new(parts.clone())?;
        if mu.rh_count(*g)? == 0 {
            continue;
        }
        match cut_and_join_verify(*g, &mu, lookup)? {
            CajReport::Checked { holds: true, .. } => checked += 1,
            CajReport::Checked {
                holds: false,
                lhs,
                rhs,
                ..
            } => {
                checked += 1;
                failures.push(format!("  (g={g}, mu={mu}): lhs {lhs} != rhs {rhs}"));
            }
            CajReport::Missing { needed } => {
                failures.push(format!("  (g={g}, mu={mu}): missing H values {needed:?}"));
            }
        }
    }
    report("caj", checked, &failures)
}

fn verify_dvv(max_euler: i64) -> Result<bool> {
    let engine = Engine::new();
    let psi = PsiTable::new();
    let mut checked = 0usize;
    let mut failures: Vec<String> = Vec::new();
    for (g, ell) in stable_keys(max_euler) {
        let poly = engine.hodge_poly(g, ell)?;
        let rep = check_top_degree(g, ell, &poly, engine.xi_family(), &psi)?;
        checked += rep.checked;
        for m in &rep.mismatches {
            failures.push(format!(
                "  (g={g}, l={ell}) n={:?}: got {}, expected {}",
                m.indices,
                opt_rat(&m.got),
                opt_rat(&m.expected)
            ));
        }
    }
    report("dvv", checked, &failures)
}

fn verify_lambda_g(gmax: u32, ell_max: usize) -> Result<bool> {
    let engine = Engine::new();
    let b = b_coefficients(gmax as usize);
    let mut table = HodgeTable::new();
    let mut checked = 0usize;
    let mut failures: Vec<String> = Vec::new();
    for g in 1..=gmax {
        for ell in 1..=ell_max {
            if !is_stable(g, ell) {
                continue;
            }
            let poly = engine.hodge_poly(g, ell)?;
            extract_hodge(g, ell, &poly, engine.xi_family(), &mut table)?;
            let rep = check_lambda_g(g, ell, &table, &b)?;
            checked += rep.checked;
            for m in &rep.mismatches {
                failures.push(format!(
                    "  (g={g}, l={ell}) n={:?} [{}]: got {}, expected {}",
                    m.indices,
                    m.context,
                    opt_rat(&m.got),
                    opt_rat(&m.expected)
                ));
            }
        }
    }
    report("lambda-g", checked, &failures)
}

fn verify_lambert(n_max: usize, ws: &[f64], k_max: usize) -> Result<bool> {
    const CURVE_TOL: f64 = 1e-10;
    const XI_TOL: f64 = 1e-8;
    const H01_TOL: f64 = 1e-7;
    const H02_TOL: f64 = 1e-8;
    let family = XiFamily::new();
    let mut checks: Vec<serde_json::Value> = Vec::new();
    let mut all_pass = true;
    for &w in ws {
        let p = t_of_w(w, k_max)?;
        let err = (p.x - p.y * (-p.y).exp()).abs();
        let pass = err <= CURVE_TOL;
        all_pass &= pass;
        checks.push(json!({
            "kind": "curve", "w": fmt_f64(w), "err": fmt_f64(err),
            "tol": fmt_f64(CURVE_TOL), "pass": pass,
        }));
    }
    for n in 0..=n_max {
        for &w in ws {
            let rel = xi_series_check(n, w, k_max, &family)?;
            let pass = rel <= XI_TOL;
            all_pass &= pass;
            checks.push(json!({
                "kind": "xi", "n": n, "w": fmt_f64(w), "err": fmt_f64(rel),
                "tol": fmt_f64(XI_TOL), "pass": pass,
            }));
        }
    }
    for &w in ws {
        let cmp = unstable_eval(UnstableKind::H01, &[w], k_max)?;
        let pass = cmp.abs_err <= H01_TOL;
        all_pass &= pass;
        checks.push(json!({
            "kind": "h01", "w": fmt_f64(w), "err": fmt_f64(cmp.abs_err),
            "tol": fmt_f64(H01_TOL), "pass": pass,
        }));
    }
    for pair in ws.windows(2) {
        if (pair[0] - pair[1]).abs() < 1e-9 {
            continue;
        }
        let cmp = unstable_eval(UnstableKind::H02, pair, k_max)?;
        let pass = cmp.abs_err <= H02_TOL;
        all_pass &= pass;
        checks.push(json!({
            "kind": "h02", "w": [fmt_f64(pair[0]), fmt_f64(pair[1])],
            "err": fmt_f64(cmp.abs_err), "tol": fmt_f64(H02_TOL), "pass": pass,
        }));
    }
    let obj = json!({"checks": checks, "pass": all_pass});
    println!("{}", to_pretty(&obj));
    Ok(all_pass)
}

fn verify_cross(size_max: u32, r_max: u64, budget: u64) -> Result<bool> {
    let engine = Engine::new();
    let mut checked = 0usize;
    let mut failures: Vec<String> = Vec::new();
    for d in 1..=size_max {
        for mu in enumerate_partitions(d) {
            let mut g = 0u32;
            while mu.rh_count(g)? <= r_max {
                let oracle = hurwitz_oracle(g, &mu, budget)?;
                let elsv = engine.elsv(g, &mu)?;
                checked += 1;
                if elsv.value != oracle.value {
                    failures.push(format!(
                        "  (g={g}, mu={mu}): elsv {} != oracle {}",
                        elsv.value, oracle.value
                    ));
                }
                if g == 0 && mu.len() <= 2 {
                    let closed = hurwitz_closed_form(0, &mu)?;
                    checked += 1;
                    if closed.value != oracle.value {
                        failures.push(format!(
                            "  (g=0, mu={mu}): closed form {} != oracle {}",
                            closed.value, oracle.value
                        ));
                    }
                }
                g += 1;
            }
        }
    }
    report("cross", checked, &failures)
}

fn verify_dual(max_euler: i64) -> Result<bool> {
    let engine = Engine::new();
    let mut checked = 0usize;
    let mut failures: Vec<String> = Vec::new();
    for (g, ell) in stable_keys(max_euler) {
        let main_form = engine.hodge_poly(g, ell)?;
        let alt_form = engine.hodge_poly_alt(g, ell)?;
        checked += 1;
        if main_form != alt_form {
            failures.push(format!("  (g={g}, l={ell}): the two forms disagree"));
        }
    }
    report("dual", checked, &failures)
}

/// All stable (g, l) with 2g - 2 + l <= max_euler, ordered by genus then
/// number of points.
fn stable_keys(max_euler: i64) -> Vec<(u32, usize)> {
    let mut keys = Vec::new();
    let mut g: u32 = 0;
    while 2 * (g as i64) - 1 <= max_euler {
        let ell_cap = max_euler + 2 - 2 * (g as i64);
        for ell in 1..=ell_cap as usize {
            if is_stable(g, ell) {
                keys.push((g, ell));
            }
        }
        g += 1;
    }
    keys
}

fn report(name: &str, checked: usize, failures: &[String]) -> Result<bool> {
    if failures.is_empty() && checked > 0 {
        println!("verify {name}: PASS ({checked} checks)");
        Ok(true)
    } else if checked == 0 {
        println!("verify {name}: FAIL (nothing to check)");
        Ok(false)
    } else {
        println!(
            "verify {name}: FAIL ({} of {checked} checks)",
            failures.len()
        );
        for f in failures {
            println!("{f}");
        }
        Ok(false)
    }
}

fn load_cache_if_present(engine: &Engine, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        if path.exists() {
            engine.load_cache(BufReader::new(File::open(path)?))?;
        }
    }
    Ok(())
}

fn save_cache_if_requested(engine: &Engine, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        engine.save_cache(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn opt_rat(v: &Option<Rational>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "absent".to_string(),
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json encoding cannot fail")
}

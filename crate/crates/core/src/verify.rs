//! Named verification suites with deterministic JSON reports.
//!
//! Each suite runs a fixed list of cases. Cases may run in parallel, but the
//! report lists them in construction order and contains no timestamps, so
//! identical options give byte-identical output.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::combinatorics::{
    binomial, c_polynomial, eulerian, factorial, identity_comm_lhs, stirling_first, stirling_second, IndexTuple,
};
use crate::elliptic::functions::factorial_ratio;
use crate::elliptic::modular::{atom_value, delta_anomaly, delta_numeric, residual, verify_modular, Sl2z};
use crate::elliptic::{
    eval_function, eval_reduced, g_expansion, p_expansion, shift_polynomiality_residual, zeta_derivative,
    BivariateExpansion, FunctionId, Poly, NUMERIC_ORDER,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hha::{
    anomaly_in_b_units, anomaly_of_zero_modes, configuration_count, default_positions, invert_to_full, peel_once,
    weight1_anomaly_closed_form, weight1_configuration_formula, CorrExpression, CorrSymbol, HHASpec,
};
use crate::lattice::{e8_direction, e8x3_direction, pairing_profile, EvenLattice, PairingProfile};
use crate::qseries::named::{
    deriv_iden_rhs, dtau_inverse_factor, dtau_inverse_factor_closed, inverse_factor_power,
    inverse_factor_power_from_derivatives,
};
use crate::qseries::scalar::{format_rational, int, rational_to_f64, tpi, Graded};
use crate::qseries::QExpansion;

pub const SUITES: [&str; 8] = [
    "combinatorics",
    "qseries-identities",
    "elliptic-formal",
    "elliptic-numeric",
    "hha-weight1",
    "hha-weight2",
    "lattice-oracle",
    "lattice-modular",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub id: String,
    pub status: Status,
    /// Relative residual for numeric cases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// `"0"` or a description of the first difference, for exact cases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_diff: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub parameters: Value,
}

impl Case {
    fn exact(id: impl Into<String>, parameters: Value, diff: Result<Option<String>>) -> Case {
        let id = id.into();
        match diff {
            Ok(None) => Case { id, status: Status::Pass, residual: None, exact_diff: Some("0".into()), error: None, parameters },
            Ok(Some(d)) => Case { id, status: Status::Fail, residual: None, exact_diff: Some(d), error: None, parameters },
            Err(e) => Case::failed(id, parameters, e),
        }
    }

    fn numeric(id: impl Into<String>, parameters: Value, r: Result<f64>, tol: f64) -> Case {
        let id = id.into();
        match r {
            Ok(r) => {
                let status = if r < tol { Status::Pass } else { Status::Fail };
                Case { id, status, residual: Some(r), exact_diff: None, error: None, parameters }
            }
            Err(e) => Case::failed(id, parameters, e),
        }
    }

    fn failed(id: String, parameters: Value, e: Error) -> Case {
        Case { id, status: Status::Fail, residual: None, exact_diff: None, error: Some(e.to_string()), parameters }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Toolchain {
    pub package: String,
    pub version: String,
    pub rustc: String,
    pub target: String,
    pub parallel_feature: bool,
}

impl Toolchain {
    pub fn current() -> Self {
        Toolchain {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            rustc: env!("QJ_RUSTC_VERSION").into(),
            target: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
            parallel_feature: cfg!(feature = "parallel"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    /// Effective numeric tolerance, absent for purely exact suites.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub truncation: BTreeMap<String, i64>,
    pub toolchain: Toolchain,
    pub cases: Vec<Case>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    /// Truncation order; each suite has its own default.
    pub order: Option<u64>,
    /// Numeric tolerance; each numeric suite has its own default.
    pub tol: Option<f64>,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { order: None, tol: None, seed: 7, exec: Execution::default() }
    }
}

type Job = Box<dyn FnOnce() -> Vec<Case> + Send>;

struct Plan {
    tolerance: Option<f64>,
    truncation: BTreeMap<String, i64>,
    jobs: Vec<Job>,
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<VerificationReport> {
    let plan = match name {
        "combinatorics" => combinatorics_suite(),
        "qseries-identities" => qseries_suite(opts),
        "elliptic-formal" => elliptic_formal_suite(opts),
        "elliptic-numeric" => elliptic_numeric_suite(opts),
        "hha-weight1" => hha_weight1_suite(),
        "hha-weight2" => hha_weight2_suite(),
        "lattice-oracle" => lattice_oracle_suite(opts),
        "lattice-modular" => lattice_modular_suite(opts),
        other => return Err(Error::UnknownSuite(other.into())),
    };
    let cases: Vec<Case> = opts.exec.map(plan.jobs, |job| job()).into_iter().flatten().collect();
    let failed = cases.iter().filter(|c| !c.passed()).count();
    Ok(VerificationReport {
        suite: name.into(),
        passed: cases.len() - failed,
        failed,
        tolerance: plan.tolerance,
        seed: opts.seed,
        truncation: plan.truncation,
        toolchain: Toolchain::current(),
        cases,
    })
}

fn rational_diff(got: &BigRational, want: &BigRational) -> Option<String> {
    (got != want).then(|| format!("got {}, want {}", format_rational(got), format_rational(want)))
}

fn integer_diff(got: &BigInt, want: &BigInt) -> Option<String> {
    (got != want).then(|| format!("got {got}, want {want}"))
}

fn series_diff(got: &QExpansion, want: &QExpansion, order: i64) -> Option<String> {
    if got.agrees_to(want, order) {
        None
    } else {
        Some(match got.first_difference(want) {
            Some(m) => format!("first difference at q^{m}"),
            None => "offsets differ".into(),
        })
    }
}

fn bivariate_diff(got: &BivariateExpansion, want: &BivariateExpansion, order: usize) -> Option<String> {
    if got.agrees_to(want, order) {
        None
    } else {
        Some(match got.first_difference(want) {
            Some(m) => format!("first difference in layer q^{m}"),
            None => "layers differ".into(),
        })
    }
}

fn expr_diff(spec: &HHASpec, got: &CorrExpression, want: &CorrExpression) -> Option<String> {
    let d = got.sub(want);
    (!d.is_zero()).then(|| format!("difference {}", d.render(spec)))
}

// ---------------------------------------------------------------------------

fn combinatorics_suite() -> Plan {
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(Box::new(|| {
        let mut out = Vec::new();
        for u in 1..=8usize {
            for t in 0..=u {
                let want = if u == t { BigRational::one() } else { BigRational::zero() };
                let got = identity_comm_lhs(u, t);
                out.push(Case::exact(format!("identity_comm/u{u}/t{t}"), json!({"u": u, "t": t}), Ok(rational_diff(&got, &want))));
            }
        }
        out
    }));
    jobs.push(Box::new(|| {
        (0..=12usize)
            .map(|n| {
                let diff = (0..=n).find_map(|k| {
                    let sum: BigInt = (k..=n).map(|j| stirling_second(n, j) * stirling_first(j, k as i64)).sum();
                    integer_diff(&sum, &BigInt::from(u8::from(n == k))).map(|d| format!("k={k}: {d}"))
                });
                Case::exact(format!("stirling_inverse/n{n}"), json!({"n": n}), Ok(diff))
            })
            .collect()
    }));
    jobs.push(Box::new(|| {
        (1..=12usize)
            .map(|n| {
                let diff = (1..=n).find_map(|k| {
                    let sum: BigInt =
                        (0..k).map(|j| eulerian(n, j) * binomial((n - j - 1) as i64, (k - j - 1) as i64)).sum();
                    let got = BigRational::new(sum, factorial(k));
                    rational_diff(&got, &BigRational::from_integer(stirling_second(n, k))).map(|d| format!("k={k}: {d}"))
                });
                Case::exact(format!("stirling_eulerian/n{n}"), json!({"n": n}), Ok(diff))
            })
            .collect()
    }));
    jobs.push(Box::new(|| {
        let u = vec![2u32, 3, 1, 4];
        let diff = IndexTuple::new(u.clone()).map(|t| {
            let c = c_polynomial(&t);
            let want = [(2u32, 1i64), (3, 2), (4, 1)];
            let mut bad = None;
            for e in 0..=6u32 {
                let w = want.iter().find(|(k, _)| *k == e).map_or(0, |(_, c)| *c);
                if c.coeff(e) != BigInt::from(w) {
                    bad = Some(format!("coefficient of w^{e}: got {}, want {w}", c.coeff(e)));
                    break;
                }
            }
            bad
        });
        vec![Case::exact("c_polynomial/2314", json!({"u": u}), diff)]
    }));
    jobs.push(Box::new(|| {
        (1..=8u32)
            .map(|n| {
                let diff = IndexTuple::new((1..=n).collect()).map(|t| {
                    let c = c_polynomial(&t);
                    (0..=n + 1).find_map(|e| {
                        let want = if e == 0 { BigInt::zero() } else { binomial(n as i64 - 1, e as i64 - 1) };
                        integer_diff(&c.coeff(e), &want).map(|d| format!("w^{e}: {d}"))
                    })
                });
                Case::exact(format!("c_polynomial/increasing/n{n}"), json!({"n": n}), diff)
            })
            .collect()
    }));
    Plan { tolerance: None, truncation: BTreeMap::new(), jobs }
}

fn qseries_suite(opts: &SuiteOptions) -> Plan {
    let order = opts.order.unwrap_or(30) as i64;
    let mut jobs: Vec<Job> = Vec::new();
    for k in [1i64, 2, 3, -1, -2, -3] {
        jobs.push(Box::new(move || {
            let mut out = Vec::new();
            for n in 0..=5u32 {
                let p = json!({"k": k, "n": n, "order": order});
                let direct = dtau_inverse_factor(k, n, order);
                let closed = dtau_inverse_factor_closed(k, n, order);
                let diff = direct.clone().and_then(|d| Ok(series_diff(&d, &closed?, order)));
                out.push(Case::exact(format!("dtau_closed_form/k{k}/n{n}"), p.clone(), diff));
                if n >= 1 {
                    let diff = direct.and_then(|d| Ok(series_diff(&d, &deriv_iden_rhs(k, n, order)?, order)));
                    out.push(Case::exact(format!("deriv_iden/k{k}/n{n}"), p.clone(), diff));
                }
                let diff = inverse_factor_power(k, n, order)
                    .and_then(|a| Ok(series_diff(&a, &inverse_factor_power_from_derivatives(k, n, order)?, order)));
                out.push(Case::exact(format!("inverse_basis/k{k}/l{n}"), p, diff));
            }
            out
        }));
    }
    Plan { tolerance: None, truncation: BTreeMap::from([("q".into(), order)]), jobs }
}

fn elliptic_formal_suite(opts: &SuiteOptions) -> Plan {
    let order = opts.order.unwrap_or(30) as usize;
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(Box::new(move || {
        (1..=5u32)
            .map(|j| {
                let diff = g_expansion(0, j, order).and_then(|g| Ok(bivariate_diff(&g, &p_expansion(j, order)?, order)));
                Case::exact(format!("g0_is_p/j{j}"), json!({"j": j, "order": order}), diff)
            })
            .collect()
    }));
    for i in 1..=2u32 {
        jobs.push(Box::new(move || {
            (1..=3u32)
                .map(|m| {
                    let diff = (|| {
                        let mut d = p_expansion(m, order)?;
                        for _ in 0..i {
                            d = d.tau_derivative();
                        }
                        let want = d.scale(&Graded::term(factorial_ratio(m, i), i as i32));
                        Ok(bivariate_diff(&g_expansion(i, m + i, order)?, &want, order))
                    })();
                    Case::exact(format!("g_from_dtau_p/i{i}/m{m}"), json!({"i": i, "m": m, "order": order}), diff)
                })
                .collect()
        }));
    }
    for i in 0..=2u32 {
        jobs.push(Box::new(move || {
            (1..=4u32)
                .map(|j| {
                    let diff = (|| {
                        let lhs = g_expansion(i, j, order)?.tau_derivative();
                        let rhs = g_expansion(i + 1, j + 1, order)?.scale(&Graded::term(int(j as i64), -1));
                        Ok(bivariate_diff(&lhs, &rhs, order))
                    })();
                    Case::exact(format!("dtau_g/i{i}/j{j}"), json!({"i": i, "j": j, "order": order}), diff)
                })
                .collect()
        }));
    }
    jobs.push(Box::new(move || {
        (1..=3u32)
            .map(|k| {
                let diff = (|| {
                    let lhs = zeta_derivative(&p_expansion(k, order)?);
                    let rhs = p_expansion(k + 1, order)?.scale(&Graded::term(int(k as i64), -1));
                    Ok(bivariate_diff(&lhs, &rhs, order))
                })();
                Case::exact(format!("zeta_derivative_p/k{k}"), json!({"k": k, "order": order}), diff)
            })
            .collect()
    }));
    Plan { tolerance: None, truncation: BTreeMap::from([("q".into(), order as i64)]), jobs }
}

/// `n` points with `Im τ ∈ [1, 1.6)`, `|Re τ| ≤ 1/2` and `z` inside the
/// fundamental parallelogram away from its edges.
pub fn sample_points(seed: u64, n: usize) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let tau = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(1.0..1.6));
            let z = Complex64::new(rng.gen_range(0.1..0.9), 0.0) + tau * rng.gen_range(0.1..0.9);
            (z, tau)
        })
        .collect()
}

fn cval(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn elliptic_numeric_suite(opts: &SuiteOptions) -> Plan {
    let tol = opts.tol.unwrap_or(1e-6);
    let points = sample_points(opts.seed, 20);
    let mut jobs: Vec<Job> = Vec::new();
    let ids = [
        FunctionId::PTilde1,
        FunctionId::P(2),
        FunctionId::P(3),
        FunctionId::P(4),
        FunctionId::P(5),
        FunctionId::Eis(2),
        FunctionId::Eis(4),
        FunctionId::Eis(6),
        FunctionId::G(1, 2),
        FunctionId::G(1, 3),
        FunctionId::G(1, 4),
        FunctionId::G(2, 3),
        FunctionId::Wp(1),
        FunctionId::Wp(2),
    ];
    for id in ids {
        for (name, g) in Sl2z::standard() {
            let pts = points.clone();
            jobs.push(Box::new(move || {
                let r = pts.iter().try_fold(0f64, |acc, &(z, tau)| Ok(acc.max(verify_modular(id, &g, z, tau, tol)?.residual)));
                vec![Case::numeric(
                    format!("modular/{id}/{name}"),
                    json!({"function": id.to_string(), "gamma": g.to_string(), "samples": pts.len()}),
                    r,
                    tol,
                )]
            }));
        }
    }
    for id in [FunctionId::G(1, 2), FunctionId::G(1, 3), FunctionId::G(1, 6), FunctionId::PTilde1, FunctionId::P(2)] {
        let pts = points.clone();
        jobs.push(Box::new(move || {
            let r = (|| {
                let sym = delta_anomaly(id)?;
                let mut worst = 0f64;
                for &(z, tau) in pts.iter().take(5) {
                    for (_, g) in Sl2z::standard() {
                        let s = sym.eval(&|a| atom_value(a, z, tau, &g))?;
                        worst = worst.max(residual(s, delta_numeric(id, &g, z, tau)?));
                    }
                }
                Ok(worst)
            })();
            vec![Case::numeric(format!("delta_table/{id}"), json!({"function": id.to_string(), "samples": 5}), r, tol)]
        }));
    }
    let pts = points.clone();
    jobs.push(Box::new(move || {
        let mut out = Vec::new();
        for (id, jump) in [
            (FunctionId::P(1), tpi()),
            (FunctionId::PTilde1, tpi()),
            (FunctionId::P(2), Complex64::zero()),
            (FunctionId::P(3), Complex64::zero()),
            (FunctionId::P(4), Complex64::zero()),
        ] {
            let r = pts.iter().try_fold(0f64, |acc, &(z, tau)| {
                let d = eval_function(id, z + tau, tau)? - eval_function(id, z, tau)?;
                let p = eval_function(id, z + 1.0, tau)? - eval_function(id, z, tau)?;
                Ok::<_, Error>(acc.max(residual(d, jump)).max(residual(p, Complex64::zero())))
            });
            out.push(Case::numeric(
                format!("elliptic_shift/{id}"),
                json!({"function": id.to_string(), "jump": cval(jump), "samples": pts.len()}),
                r,
                tol,
            ));
        }
        out
    }));
    let pts = points.clone();
    jobs.push(Box::new(move || {
        [FunctionId::P(1), FunctionId::P(2), FunctionId::P(3), FunctionId::P(4)]
            .into_iter()
            .map(|id| {
                let r = pts.iter().try_fold(0f64, |acc, &(z, tau)| {
                    let a = eval_reduced(id, z, tau, NUMERIC_ORDER)?.value;
                    Ok::<_, Error>(acc.max(residual(a, eval_function(id, z, tau)?)))
                });
                Case::numeric(
                    format!("expansion_vs_lambert/{id}"),
                    json!({"function": id.to_string(), "samples": pts.len()}),
                    r,
                    tol,
                )
            })
            .collect()
    }));
    jobs.push(Box::new(move || {
        let (z, tau) = (Complex64::new(0.13, 0.21), Complex64::new(0.1, 1.1));
        (1..=3u32)
            .map(|m| {
                Case::numeric(
                    format!("shift_polynomiality/g1_{m}"),
                    json!({"m": m, "z": cval(z), "tau": cval(tau)}),
                    shift_polynomiality_residual(m, z, tau),
                    tol.max(1e-5),
                )
            })
            .collect()
    }));
    Plan { tolerance: Some(tol), truncation: BTreeMap::from([("q".into(), NUMERIC_ORDER as i64)]), jobs }
}

// ---------------------------------------------------------------------------

const X: usize = 1;

fn zm(n: usize) -> CorrSymbol {
    CorrSymbol::zero_modes(vec![X; n])
}

fn tconst(c: i64, e: i32) -> Poly {
    Poly::constant(Graded::term(int(c), e))
}

fn expr(terms: Vec<(Poly, CorrSymbol)>) -> CorrExpression {
    let mut e = CorrExpression::zero();
    for (c, s) in terms {
        e.add_term(s, &c);
    }
    e
}

fn hha_weight1_suite() -> Plan {
    let mut jobs: Vec<Job> = Vec::new();
    for norm in [int(1), int(2), BigRational::new((-3).into(), 2.into())] {
        let n2 = norm.clone();
        jobs.push(Box::new(move || {
            let spec = HHASpec::weight1(n2.clone());
            (0..=6usize)
                .map(|s| {
                    let diff = anomaly_of_zero_modes(&spec, &vec![X; s]).map(|got| {
                        let want = weight1_anomaly_closed_form(X, s, &n2);
                        (got != want).then(|| format!("{got:?}"))
                    });
                    Case::exact(format!("anomaly/norm{}/s{s}", format_rational(&n2)), json!({"norm": format_rational(&n2), "s": s}), diff)
                })
                .collect()
        }));
        jobs.push(Box::new(move || {
            let spec = HHASpec::weight1(norm.clone());
            let mut out = Vec::new();
            for total in 0..=6usize {
                for s in 0..=total {
                    let n = total - s;
                    let diff = (|| {
                        let ins: Vec<(usize, u32)> = (s as u32 + 1..=total as u32).map(|l| (X, l)).collect();
                        let target = CorrSymbol::mixed(vec![X; s], &ins)?;
                        let got = invert_to_full(&spec, &target, &default_positions(s))?;
                        Ok(expr_diff(&spec, &got, &weight1_configuration_formula(X, n, s, &norm)))
                    })();
                    out.push(Case::exact(
                        format!("configurations/norm{}/n{n}/s{s}", format_rational(&norm)),
                        json!({"norm": format_rational(&norm), "n": n, "s": s}),
                        diff,
                    ));
                }
            }
            out
        }));
    }
    jobs.push(Box::new(|| {
        let inv = [1usize, 1, 2, 4, 10, 26, 76];
        inv.iter()
            .enumerate()
            .map(|(s, &want)| {
                let got = configuration_count(0, s);
                Case::exact(
                    format!("configuration_count/s{s}"),
                    json!({"n": 0, "s": s}),
                    Ok((got != want).then(|| format!("got {got}, want {want}"))),
                )
            })
            .collect()
    }));
    Plan { tolerance: None, truncation: BTreeMap::new(), jobs }
}

fn hha_weight2_suite() -> Plan {
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(Box::new(|| {
        let spec = HHASpec::weight2();
        let diff = (|| {
            let got = invert_to_full(&spec, &zm(2), &[2, 1])?;
            let want = expr(vec![
                (Poly::one(), CorrSymbol::mixed(vec![], &[(X, 1), (X, 2)])?),
                (Poly::p(2, 2, 1).mul(&tconst(-4, -2)), zm(1)),
                (Poly::p(4, 2, 1).mul(&tconst(-2, -4)), zm(0)),
            ]);
            Ok(expr_diff(&spec, &got, &want))
        })();
        vec![Case::exact("w2s2", json!({"correlator": "x0^2"}), diff)]
    }));
    jobs.push(Box::new(|| {
        let spec = HHASpec::weight2();
        let diff = (|| {
            let sym = CorrSymbol::mixed(vec![X, X], &[(X, 3)])?;
            let got = peel_once(&spec, &sym, 2)?.normalized();
            let g = |i, j| Poly::g(i, j, 3, 2);
            let want = expr(vec![
                (Poly::one(), CorrSymbol::mixed(vec![X], &[(X, 2), (X, 3)])?),
                (Poly::p(2, 3, 2).mul(&tconst(-4, -2)), zm(2)),
                (Poly::p(4, 3, 2).mul(&tconst(-2, -4)), zm(1)),
                (g(1, 3).mul(&tconst(-16, -4)), zm(1)),
                (g(1, 5).mul(&tconst(-16, -6)), zm(0)),
            ]);
            Ok(expr_diff(&spec, &got, &want))
        })();
        vec![Case::exact("fx03_first_step", json!({"correlator": "x0^2 x(3)", "label": 2}), diff)]
    }));
    jobs.push(Box::new(|| {
        let spec = HHASpec::weight2();
        let fixtures: [(usize, Vec<(u32, i64, usize)>); 3] =
            [(1, vec![]), (2, vec![(1, 4, 1)]), (3, vec![(1, 12, 2), (2, 24, 1)])];
        fixtures
            .into_iter()
            .map(|(s, want)| {
                let diff = (|| {
                    let layers = anomaly_of_zero_modes(&spec, &vec![X; s])?;
                    let got = anomaly_in_b_units(&spec, &layers)?;
                    let want: Vec<(u32, Vec<(BigRational, CorrSymbol)>)> =
                        want.iter().map(|&(k, c, n)| (k, vec![(int(c), zm(n))])).collect();
                    Ok((got != want).then(|| format!("{got:?}")))
                })();
                Case::exact(format!("anomaly/s{s}"), json!({"s": s}), diff)
            })
            .collect()
    }));
    Plan { tolerance: None, truncation: BTreeMap::new(), jobs }
}

// ---------------------------------------------------------------------------

fn lattice_oracle_suite(opts: &SuiteOptions) -> Plan {
    let order = opts.order.unwrap_or(4);
    let big = order.saturating_sub(1);
    let exec = opts.exec;
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(Box::new(move || {
        let prof = pairing_profile(&EvenLattice::e8(), &e8_direction(), order, exec);
        (0..=3u32).map(|n| oracle_case("e8", &prof, n, order)).collect()
    }));
    jobs.push(Box::new(move || {
        let prof = pairing_profile(&EvenLattice::e8x3(), &e8x3_direction(), big, exec);
        let mut out: Vec<Case> = (0..=1u32).map(|n| oracle_case("e8x3", &prof, n, big)).collect();
        let known = [1i64, 744, 196884, 21493760, 864299970];
        let diff = prof.clone().and_then(|p| {
            let ch = p.quasimod_rhs(0)?;
            Ok((0..=big.min(4) as i64).find_map(|m| {
                let got = ch.coeff(m);
                let want = Graded::int(known[m as usize]);
                (got != want).then(|| format!("q^{}: got {got:?}", m - 1))
            }))
        });
        out.push(Case::exact("character/e8x3", json!({"level": big}), diff));
        out
    }));
    Plan {
        tolerance: None,
        truncation: BTreeMap::from([("e8_level".into(), order as i64), ("e8x3_level".into(), big as i64)]),
        jobs,
    }
}

fn oracle_case(name: &str, prof: &Result<PairingProfile>, n: u32, level: u64) -> Case {
    let diff = prof.clone().and_then(|p| Ok(series_diff(&p.quasimod_rhs(n)?, &p.fock_oracle(n), level as i64)));
    Case::exact(format!("oracle/{name}/n{n}"), json!({"lattice": name, "n": n, "level": level}), diff)
}

/// `τ^{-s} F_s(-1/τ)` against `Σ_k s!/(2^k k!(s-2k)!) (2πiτ)^{-k} F_{s-2k}(τ)`
/// for `F_s = Tr a_0^s q^{L_0 - c/24}`, `a = h(-1)1`.
pub fn weight1_closure_residual(prof: &PairingProfile, s: u32, tau: Complex64) -> Result<f64> {
    let b = 1.0 / (tpi() * tau);
    let lhs = prof.weight1_trace_numeric(s, -1.0 / tau)? / tau.powi(s as i32);
    let mut rhs = Complex64::zero();
    for k in 0..=s / 2 {
        let c = factorial(s as usize) / (BigInt::from(2).pow(k) * factorial(k as usize) * factorial((s - 2 * k) as usize));
        let c = rational_to_f64(&BigRational::from_integer(c));
        rhs += b.powi(k as i32) * c * prof.weight1_trace_numeric(s - 2 * k, tau)?;
    }
    Ok(residual(lhs, rhs))
}

/// `τ^{-2s} F_s(-1/τ)` against `F_s(τ) + Σ_k C_k (2πiτ)^{-k} F_{s-k}(τ)` with
/// `F_s = Tr v_0^s q^{L_0 - c/24}`, `v = h[-1]²1`, and `C_k` from the
/// symbolic anomaly of the weight-2 preset.
pub fn weight2_closure_residual(prof: &PairingProfile, s: u32, tau: Complex64) -> Result<f64> {
    let spec = HHASpec::weight2();
    let b = 1.0 / (tpi() * tau);
    let lhs = prof.quasimod_numeric(s, -1.0 / tau)? / tau.powi(2 * s as i32);
    let mut rhs = prof.quasimod_numeric(s, tau)?;
    let layers = anomaly_of_zero_modes(&spec, &vec![X; s as usize])?;
    for (k, terms) in anomaly_in_b_units(&spec, &layers)? {
        for (c, sym) in terms {
            let n = sym.zero_modes.len() as u32;
            rhs += b.powi(k as i32) * rational_to_f64(&c) * prof.quasimod_numeric(n, tau)?;
        }
    }
    Ok(residual(lhs, rhs))
}

/// `χ(-1/τ, z/τ)` against `e^{πi⟨h,h⟩z²/τ} χ(τ, z)`.
pub fn jacobi_residual(prof: &PairingProfile, z: Complex64, tau: Complex64) -> Result<f64> {
    let lhs = prof.chi(z / tau, -1.0 / tau)?;
    let rhs = (Complex64::new(0.0, std::f64::consts::PI) * z * z / tau).exp() * prof.chi(z, tau)?;
    Ok(residual(lhs, rhs))
}

fn lattice_modular_suite(opts: &SuiteOptions) -> Plan {
    let level = opts.order.unwrap_or(8);
    let tol = opts.tol.unwrap_or(1e-5);
    let exec = opts.exec;
    let tau = Complex64::new(0.0, 1.3);
    let z = Complex64::new(0.1, 0.2);
    let jobs: Vec<Job> = vec![Box::new(move || {
        let prof = pairing_profile(&EvenLattice::e8x3(), &e8x3_direction(), level, exec);
        let p = |extra: Value| {
            let mut v = json!({"lattice": "e8x3", "gamma": "S", "tau": cval(tau), "level": level});
            if let (Some(m), Value::Object(e)) = (v.as_object_mut(), extra) {
                m.extend(e);
            }
            v
        };
        let mut out = Vec::new();
        for s in 0..=6u32 {
            let r = prof.clone().and_then(|pr| weight1_closure_residual(&pr, s, tau));
            out.push(Case::numeric(format!("weight1/s{s}"), p(json!({"s": s})), r, tol));
        }
        for s in 1..=3u32 {
            let r = prof.clone().and_then(|pr| weight2_closure_residual(&pr, s, tau));
            out.push(Case::numeric(format!("weight2/s{s}"), p(json!({"s": s})), r, tol));
        }
        let r = prof.and_then(|pr| jacobi_residual(&pr, z, tau));
        out.push(Case::numeric("jacobi", p(json!({"z": cval(z)})), r, tol));
        out
    })];
    Plan { tolerance: Some(tol), truncation: BTreeMap::from([("e8x3_level".into(), level as i64)]), jobs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert_eq!(run_suite("nosuch", &SuiteOptions::default()), Err(Error::UnknownSuite("nosuch".into())));
    }

    #[test]
    fn exact_suites_pass_and_are_deterministic() {
        for name in ["combinatorics", "hha-weight2"] {
            let a = run_suite(name, &SuiteOptions::default()).unwrap();
            assert!(a.all_passed(), "{}", a.to_json_string());
            let b = run_suite(name, &SuiteOptions { exec: Execution::Sequential, ..Default::default() }).unwrap();
            assert_eq!(a.to_json_string(), b.to_json_string());
        }
    }

    #[test]
    fn failing_case_is_reported() {
        let c = Case::numeric("x", json!({}), Ok(1.0), 0.5);
        assert_eq!(c.status, Status::Fail);
        let c = Case::exact("y", json!({}), Err(Error::InvalidInput("bad".into())));
        assert!(!c.passed());
        assert_eq!(c.error.as_deref(), Some("invalid input: bad"));
    }

    #[test]
    fn samples_are_seeded() {
        assert_eq!(sample_points(3, 4), sample_points(3, 4));
        assert_ne!(sample_points(3, 4), sample_points(4, 4));
        assert!(sample_points(1, 50).iter().all(|(_, t)| t.im >= 1.0));
    }
}

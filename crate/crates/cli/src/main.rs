//! Command-line front end: series dumps, verification suites, correlator
//! reduction and anomalies, lattice traces and modular checks.
//!
//! Exit codes: 0 success, 1 verification failure or computation error,
//! 2 usage error. JSON goes to stdout, diagnostics to stderr.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use quasijacobi::elliptic::modular::{verify_modular, Sl2z};
use quasijacobi::elliptic::{expansion, wp_laurent, FunctionId};
use quasijacobi::exec::Execution;
use quasijacobi::hha::{
    anomaly_in_b_units, anomaly_json, anomaly_of_zero_modes, default_positions, invert_to_full, parse_zero_modes,
    CorrSymbol, HHASpec,
};
use quasijacobi::lattice::{default_direction, pairing_profile, EvenLattice};
use quasijacobi::qseries::eisenstein;
use quasijacobi::qseries::scalar::{format_rational, int, parse_rational};
use quasijacobi::verify::{run_suite, SuiteOptions};
use quasijacobi::Error;

#[derive(Parser)]
#[command(name = "quasijacobi", version, about = "Quasi-Jacobi forms, zero-mode recursion and lattice VOA traces")]
struct Cli {
    /// Seed for sampled evaluation points.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Numeric tolerance (each command has its own default).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation order (each command has its own default).
    #[arg(long, global = true)]
    order: Option<u64>,
    /// Run every kernel on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the expansion of P_k, Ptilde_1, g_i_j, G_2k or wp_k.
    Expand {
        #[arg(long)]
        function: String,
        /// Highest power of z for wp_k.
        #[arg(long, default_value_t = 6)]
        z_order: i32,
    },
    /// Run a named verification suite.
    VerifySuite { name: String },
    /// Express a zero-mode correlator through full correlators.
    Reduce {
        /// Spec JSON file, or the presets `weight1` / `weight2`.
        #[arg(long)]
        spec: String,
        /// Zero modes, e.g. "x0^2".
        #[arg(long)]
        correlator: String,
        /// Labels for the new insertions, strictly decreasing (default s, ..., 1).
        #[arg(long, value_delimiter = ',')]
        positions: Option<Vec<u32>>,
    },
    /// Modular anomaly of a zero-mode correlator in units of c/(2πi(cτ+d)).
    Anomaly {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        correlator: String,
    },
    /// Closed-form zero-mode trace of a lattice VOA, optionally against the Fock oracle.
    LatticeTrace {
        /// Lattice JSON file, or the presets `e8` / `e8x3`.
        #[arg(long)]
        lattice: String,
        /// Unit direction in lattice-basis coordinates, comma separated rationals.
        #[arg(long, value_delimiter = ',')]
        direction: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long)]
        oracle: bool,
    },
    /// Compare f(γz, γτ) with the tabulated transformation law.
    TransformCheck {
        #[arg(long)]
        function: String,
        /// a,b,c,d
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
    },
}

enum Failure {
    Usage(String),
    Verification(Value),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownFunction(_)
            | Error::UnknownSuite(_)
            | Error::Parse(_)
            | Error::InvalidInput(_)
            | Error::InvalidLattice(_)
            | Error::NonUnitDirection(_)
            | Error::Closure(_)
            | Error::Inhomogeneous(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other.to_string()),
        }
    }
}

type Outcome = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let result = match &cli.command {
        Command::Expand { function, z_order } => cmd_expand(function, *z_order, cli.order),
        Command::VerifySuite { name } => {
            let opts = SuiteOptions { order: cli.order, tol: cli.tol, seed: cli.seed, exec };
            cmd_verify_suite(name, &opts)
        }
        Command::Reduce { spec, correlator, positions } => cmd_reduce(spec, correlator, positions.as_deref()),
        Command::Anomaly { spec, correlator } => cmd_anomaly(spec, correlator),
        Command::LatticeTrace { lattice, direction, n, oracle } => {
            cmd_lattice_trace(lattice, direction.as_deref(), *n, cli.order.unwrap_or(4), *oracle, exec)
        }
        Command::TransformCheck { function, gamma, z, tau } => {
            cmd_transform_check(function, gamma, z, tau, cli.tol.unwrap_or(1e-6))
        }
    };
    match result {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(v)) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_expand(function: &str, z_order: i32, order: Option<u64>) -> Outcome {
    let id: FunctionId = function.parse()?;
    let n = order.unwrap_or(10);
    match id {
        FunctionId::Eis(w) => {
            let s = eisenstein(w as usize, n as i64)?;
            Ok(json!({"function": id.to_string(), "order": n, "display": s.to_string(), "series": s}))
        }
        FunctionId::Wp(k) => {
            let s = wp_laurent(k, z_order, n as i64)?;
            let terms: Vec<Value> = s.terms.iter().map(|(e, c)| json!({"z": e, "display": c.to_string(), "series": c})).collect();
            Ok(json!({"function": id.to_string(), "order": n, "z_order": z_order, "terms": terms}))
        }
        _ => {
            let b = expansion(id, n as usize)?;
            let layers: Vec<Value> =
                b.layers().iter().enumerate().map(|(m, l)| json!({"q": m, "display": l.to_string()})).collect();
            Ok(json!({"function": id.to_string(), "order": n, "layers": layers, "expansion": b}))
        }
    }
}

fn cmd_verify_suite(name: &str, opts: &SuiteOptions) -> Outcome {
    let report = run_suite(name, opts)?;
    let v = serde_json::to_value(&report).expect("report serializes");
    if report.all_passed() {
        Ok(v)
    } else {
        Err(Failure::Verification(v))
    }
}

fn load_spec(spec: &str) -> Result<HHASpec, Failure> {
    match spec {
        "weight1" => Ok(HHASpec::weight1(int(1))),
        "weight2" => Ok(HHASpec::weight2()),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            Ok(HHASpec::from_json(&text)?)
        }
    }
}

fn cmd_reduce(spec: &str, correlator: &str, positions: Option<&[u32]>) -> Outcome {
    let spec = load_spec(spec)?;
    let zm = parse_zero_modes(&spec, correlator)?;
    let target = CorrSymbol::zero_modes(zm.clone());
    let pos = positions.map(<[u32]>::to_vec).unwrap_or_else(|| default_positions(zm.len()));
    let e = invert_to_full(&spec, &target, &pos)?;
    Ok(json!({
        "correlator": target.render(&spec),
        "positions": pos,
        "expression": e.to_json(&spec),
        "display": e.render(&spec),
    }))
}

fn cmd_anomaly(spec: &str, correlator: &str) -> Outcome {
    let spec = load_spec(spec)?;
    let zm = parse_zero_modes(&spec, correlator)?;
    let layers = anomaly_of_zero_modes(&spec, &zm)?;
    // validates that every layer is a rational multiple in the expected units
    anomaly_in_b_units(&spec, &layers)?;
    Ok(anomaly_json(&spec, &layers)?)
}

fn cmd_lattice_trace(
    lattice: &str,
    direction: Option<&[String]>,
    n: u32,
    order: u64,
    oracle: bool,
    exec: Execution,
) -> Outcome {
    let lat = EvenLattice::preset_or_file(lattice)?;
    let h = match direction {
        Some(d) => d.iter().map(|s| parse_rational(s.trim())).collect::<quasijacobi::Result<Vec<_>>>()?,
        None => default_direction(&lat)?,
    };
    let prof = pairing_profile(&lat, &h, order, exec)?;
    let closed = prof.quasimod_rhs(n)?;
    let mut out = json!({
        "lattice": lat.to_json(),
        "direction": h.iter().map(format_rational).collect::<Vec<_>>(),
        "n": n,
        "order": order,
        "closed_form": closed,
        "closed_form_display": closed.to_string(),
    });
    if oracle {
        let fock = prof.fock_oracle(n);
        let equal = fock == closed;
        out["oracle"] = serde_json::to_value(&fock).expect("series serializes");
        out["equal"] = json!(equal);
        if !equal {
            return Err(Failure::Verification(out));
        }
    }
    Ok(out)
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    t.parse::<Complex64>().map_err(|_| Failure::Usage(format!("cannot parse complex number {s:?}")))
}

fn cmd_transform_check(function: &str, gamma: &str, z: &str, tau: &str, tol: f64) -> Outcome {
    let id: FunctionId = function.parse()?;
    let g: Sl2z = gamma.parse()?;
    let report = verify_modular(id, &g, parse_complex(z)?, parse_complex(tau)?, tol)?;
    let v = serde_json::to_value(&report).expect("report serializes");
    if report.pass {
        Ok(v)
    } else {
        Err(Failure::Verification(v))
    }
}

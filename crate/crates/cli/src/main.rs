//! Command-line front end: parses flags, delegates to the library and
//! serializes the result.
//!
//! Exit status: 0 on success, 2 on a usage error, 1 on a domain error. A
//! domain error prints `{"error": <variant name>, "message": <text>}`.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use tamegenus::classify::{self, ExtensionShape, RealType, ShapeTemplate};
use tamegenus::genus::{self, DescentStructure};
use tamegenus::localdata::{self, CyclicExtensionOfQ};
use tamegenus::tatecoh::{self, TateModule};
use tamegenus::{ktable, kummer, quadforms, Error, Execution};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "tamegenus", version, about = "Genus formulae, primitivity ranks and vanishing criteria")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ExtensionArgs {
    /// Degree prime p.
    #[arg(long)]
    p: u64,
    /// Tamely ramified primes, comma separated.
    #[arg(long, value_delimiter = ',')]
    tame: Vec<u64>,
    /// Ramified at p.
    #[arg(long)]
    wild: bool,
    /// Ramified at infinity (p = 2 only).
    #[arg(long)]
    infinity: bool,
}

impl ExtensionArgs {
    fn build(&self) -> Result<CyclicExtensionOfQ, Error> {
        CyclicExtensionOfQ::new(self.p, self.tame.iter().copied(), self.wild, self.infinity)
    }
}

#[derive(Debug, Args)]
struct RealTypeArgs {
    /// Totally imaginary (p = 2).
    #[arg(long, conflicts_with = "real")]
    imaginary: bool,
    /// Totally real (p = 2).
    #[arg(long)]
    real: bool,
}

impl RealTypeArgs {
    fn real_type(&self) -> RealType {
        match (self.imaginary, self.real) {
            (true, _) => RealType::TotallyImaginary,
            (_, true) => RealType::TotallyReal,
            _ => RealType::NotApplicable,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Local invariants of a ramified prime.
    Local {
        #[command(flatten)]
        ext: ExtensionArgs,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        i: u64,
    },
    /// Tate cohomology orders of Z/m under multiplication by u.
    TateOracle {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        u: u64,
    },
    /// Kummer radical, Frobenius vectors and primitivity rank.
    Primitive {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        i: u64,
        /// Use the totally positive part of the radical.
        #[arg(long)]
        plus: bool,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// Genus exponent of the motivic tame kernel.
    Genus {
        #[command(flatten)]
        ext: ExtensionArgs,
        #[arg(long)]
        i: u64,
        /// Assume the hypothesis H_i.
        #[arg(long)]
        assume_hi: bool,
    },
    /// Genus exponent of the even K-group.
    Kgenus {
        #[command(flatten)]
        ext: ExtensionArgs,
        #[arg(long)]
        i: u64,
        #[arg(long)]
        assume_hi: bool,
    },
    /// Descent bounds and the exact kernel/cokernel structure.
    Bounds {
        #[command(flatten)]
        ext: ExtensionArgs,
        #[arg(long)]
        i: u64,
        /// Accepted for a uniform grammar; the bounds do not use it.
        #[arg(long)]
        assume_hi: bool,
        #[arg(long)]
        assume_vandiver: bool,
    },
    /// Vanishing decision for an extension shape.
    Classify {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        real_type: RealTypeArgs,
        #[arg(long)]
        cyclic: bool,
        #[arg(long, value_delimiter = ',')]
        tame: Vec<u64>,
        #[arg(long)]
        wild: bool,
        #[arg(long)]
        i: u64,
        #[arg(long)]
        assume_vandiver: bool,
    },
    /// All tame sets up to a bound admitted by the vanishing decision.
    Enumerate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        i: u64,
        #[arg(long)]
        bound: u64,
        #[command(flatten)]
        real_type: RealTypeArgs,
        #[arg(long)]
        cyclic: bool,
        #[arg(long)]
        assume_vandiver: bool,
    },
    /// Class numbers, units, 2-unit signatures and 2-regularity of Q(sqrt d).
    Quad {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Orders of H^2_M(Z, Z(i)) and K_{2i-2}(Z) for i = 2..=max-i.
    Ktable {
        #[arg(long)]
        max_i: u64,
        #[arg(long)]
        assume_vandiver: bool,
    },
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize to JSON")
}

/// Adds `key: value` to a JSON object.
fn with(mut v: Value, key: &str, extra: impl Serialize) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert(key.to_string(), to_value(extra));
    }
    v
}

fn run(command: Command) -> Result<Value, Error> {
    Ok(match command {
        Command::Local { ext, ell, i } => to_value(localdata::local_invariants(&ext.build()?, ell, i)?),
        Command::TateOracle { m, n, u } => {
            let module = TateModule::new(m, n, u)?;
            json!({ "module": module, "orders": tatecoh::tate_orders(&module)? })
        }
        Command::Primitive { p, i, plus, primes } => {
            let rad = kummer::radical(p, i, plus)?;
            let rank = kummer::primitivity_rank(&rad, primes)?;
            json!({ "radical": rad, "rank": rank })
        }
        Command::Genus { ext, i, assume_hi } => {
            let report = genus::genus_exponent(&ext.build()?, i, assume_hi)?;
            with(to_value(&report), "exponent", report.exponent())
        }
        Command::Kgenus { ext, i, assume_hi } => {
            let report = genus::k_genus_ratio(&ext.build()?, i, assume_hi)?;
            with(to_value(&report), "exponent", report.exponent())
        }
        Command::Bounds {
            ext,
            i,
            assume_hi: _,
            assume_vandiver,
        } => {
            let ext = ext.build()?;
            let structure = genus::exact_descent_structure(&ext, i, assume_vandiver)?;
            let rendered = match &structure {
                DescentStructure::Structure(s) => Some(s.to_string()),
                DescentStructure::NotApplicable { .. } => None,
            };
            json!({
                "bounds": genus::descent_bounds(&ext, i)?,
                "exact_structure": with(to_value(&structure), "rendered", rendered),
            })
        }
        Command::Classify {
            p,
            real_type,
            cyclic,
            tame,
            wild,
            i,
            assume_vandiver,
        } => {
            let shape = ExtensionShape::new(p, tame, wild, real_type.real_type(), cyclic)?;
            let decision = classify::vanishing_decision(&shape, i, assume_vandiver)?;
            json!({ "shape": shape, "decision": decision })
        }
        Command::Enumerate {
            p,
            i,
            bound,
            real_type,
            cyclic,
            assume_vandiver,
        } => {
            // the empty tame set stands for fields ramified at p only
            let template = ShapeTemplate::new(p, true, real_type.real_type(), cyclic)?;
            to_value(classify::enumerate_vanishing(&template, i, bound, assume_vandiver, Execution::Parallel)?)
        }
        Command::Quad { d } => to_value(quadforms::quad_field_data(d)?),
        Command::Ktable { max_i, assume_vandiver } => {
            to_value(ktable::base_order_table(max_i, assume_vandiver, Execution::Parallel)?)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(cli.command) {
        Ok(v) => (v, ExitCode::SUCCESS),
        Err(e) => (json!({ "error": e.name(), "message": e.to_string() }), ExitCode::from(1)),
    };
    if let Err(e) = output::emit(&value, cli.format) {
        eprintln!("failed to write output: {e}");
        return ExitCode::from(1);
    }
    code
}

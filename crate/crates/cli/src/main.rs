use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use metazeta::classify::{compare, SweepSpec};
use metazeta::config::{ENV_MAX_ORDER, ENV_MAX_SUBGROUPS};
use metazeta::oracle::export_json;
use metazeta::padic::mult_order_u64;
use metazeta::{
    build_group, build_lattice, classify, coefficients, enumerate_subgroups, is_valid, sweep_verify, ClassifyOptions,
    Error, GroupParams, Limits,
};
use num_bigint::BigUint;

const EXIT_INVALID: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

/// Subgroup zeta functions of split metacyclic p-groups G(p,m,n,k).
#[derive(Parser)]
#[command(name = "metazeta", version)]
struct Cli {
    /// Largest group order the oracle builds (for `sweep`: also the sweep range).
    #[arg(long, global = true, env = ENV_MAX_ORDER)]
    max_order: Option<u64>,
    /// Cap on subgroups collected per enumeration.
    #[arg(long, global = true, env = ENV_MAX_SUBGROUPS)]
    max_subgroups: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Family {
    p: u64,
    m: u32,
    n: u32,
}

#[derive(Args, Clone, Copy)]
struct Group {
    #[command(flatten)]
    family: Family,
    #[arg(allow_hyphen_values = true)]
    k: i64,
}

impl Group {
    fn params(&self) -> Result<GroupParams, Error> {
        GroupParams::new(self.family.p, self.family.m, self.family.n, self.k)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check k^(p^n) = 1 mod p^m.
    Validate {
        #[command(flatten)]
        group: Group,
    },
    /// Subgroup counts a_{p^t} from the closed formula.
    Zeta {
        #[command(flatten)]
        group: Group,
        #[arg(long)]
        json: bool,
    },
    /// Isomorphism, zeta and (optionally) lattice partitions of the valid k.
    Classify {
        #[command(flatten)]
        family: Family,
        #[arg(long)]
        lattice: bool,
        /// Cross-check the criterion against coefficients and the oracle.
        #[arg(long)]
        verify: bool,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Rows (k, iso_rep, zeta_rep, lattice_rep).
        #[arg(long)]
        csv: bool,
    },
    /// Brute-force subgroup enumeration.
    Oracle {
        #[command(flatten)]
        group: Group,
        /// Print the subgroup lattice (JSON, or DOT with --dot).
        #[arg(long)]
        export_lattice: bool,
        #[arg(long, requires = "export_lattice")]
        dot: bool,
        /// Print multiplication table and subgroup list as JSON.
        #[arg(long, conflicts_with = "export_lattice")]
        json: bool,
    },
    /// Isomorphic? zeta-equal? lattice-isomorphic?
    Compare {
        #[command(flatten)]
        family: Family,
        #[arg(allow_hyphen_values = true)]
        k1: i64,
        #[arg(allow_hyphen_values = true)]
        k2: i64,
        #[arg(long)]
        json: bool,
    },
    /// Cross-validate formulas against the oracle for every group of order <= --max-order.
    Sweep {
        #[arg(long)]
        p: u64,
        /// Skip the lattice-lemma check.
        #[arg(long)]
        no_lattice: bool,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Lib(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn validate(group: Group) -> Outcome {
    let params = group.params()?;
    let (p, m, n) = (params.p(), params.m(), params.n());
    if !is_valid(&params) {
        return Err(Error::InvalidArgument(format!("{params} is not valid: k^({p}^{n}) != 1 mod {p}^{m}")).into());
    }
    let order = mult_order_u64(params.k(), params.base().h_order())?;
    println!("{params} is valid");
    println!("{:<16} {}^{}", "|G|", p, m + n);
    println!("{:<16} {order}", "ord(k) mod p^m");
    Ok(())
}

fn zeta(group: Group, json: bool) -> Outcome {
    let z = coefficients(&group.params()?)?;
    if json {
        println!("{}", to_json(&z));
        return Ok(());
    }
    let p = BigUint::from(z.base.p);
    println!("{:>3}  {:>20}  {:>20}", "t", "p^t", "a_{p^t}");
    for (t, c) in z.counts.iter().enumerate() {
        println!("{t:>3}  {:>20}  {c:>20}", p.pow(t as u32));
    }
    println!("total {}", z.total());
    Ok(())
}

fn run_classify(family: Family, options: ClassifyOptions, json: bool, csv: bool) -> Outcome {
    let report = classify(family.p, family.m, family.n, &options)?;
    if json {
        println!("{}", serde_json::to_string(&report).expect("serializable"));
    } else if csv {
        print!("{}", report.to_csv());
    } else {
        print!("{report}");
    }
    if let Some(check) = report.cross_checks.iter().find(|c| !c.passed) {
        return Err(Failure::Verify(format!("{}: {}", check.name, check.detail)));
    }
    if report.partial {
        return Err(Error::ResourceLimit(report.notes.join("; ")).into());
    }
    Ok(())
}

fn oracle(group: Group, limits: &Limits, export_lattice: bool, dot: bool, json: bool) -> Outcome {
    let params = group.params()?;
    let g = build_group(&params, limits)?;
    let set = enumerate_subgroups(&g, limits)?;
    if export_lattice {
        let lattice = build_lattice(&set);
        if dot {
            print!("{}", lattice.to_dot(&params.to_string()));
        } else {
            println!("{}", to_json(&lattice.to_json()));
        }
        return Ok(());
    }
    if json {
        println!("{}", serde_json::to_string(&export_json(&g, &set)).expect("serializable"));
        return Ok(());
    }
    let counts = set.counts_by_log()?;
    let formula = coefficients(&params)?;
    let p = BigUint::from(params.p());
    println!("{params}: {} subgroups", set.len());
    println!("{:>3}  {:>12}  {:>12}  {:>12}", "t", "p^t", "oracle", "formula");
    for (t, c) in counts.iter().enumerate() {
        println!("{t:>3}  {:>12}  {c:>12}  {:>12}", p.pow(t as u32), formula.counts[t]);
    }
    if counts != formula.counts {
        return Err(Failure::Verify(format!("{params}: oracle and formula disagree")));
    }
    Ok(())
}

fn run_compare(family: Family, k1: i64, k2: i64, limits: &Limits, json: bool) -> Outcome {
    let a = GroupParams::new(family.p, family.m, family.n, k1)?;
    let b = a.with_k(k2);
    for g in [&a, &b] {
        if !is_valid(g) {
            return Err(Error::InvalidArgument(format!("{g} is not valid")).into());
        }
    }
    let c = compare(&a, &b, limits)?;
    if json {
        println!("{}", serde_json::to_string(&c).expect("serializable"));
        return Ok(());
    }
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    println!("{a} vs {b}");
    println!("{:<20} {}", "isomorphic", yes_no(c.isomorphic));
    println!("{:<20} {}", "zeta-equal", yes_no(c.zeta_equal));
    println!(
        "{:<20} {}",
        "lattice-isomorphic",
        c.lattice_isomorphic.map_or("unknown (over oracle bound)", yes_no)
    );
    Ok(())
}

fn sweep(p: u64, max_order: u64, limits: Limits, lattice: bool, json: bool) -> Outcome {
    let mut spec = SweepSpec::new(p, max_order);
    spec.limits = limits.with_max_order(limits.max_order.max(max_order));
    spec.lattice = lattice;
    let summary = sweep_verify(&spec)?;
    if json {
        println!("{}", to_json(&summary));
    } else {
        print!("{summary}");
    }
    match summary.rows.iter().find(|r| !r.passed) {
        Some(row) => Err(Failure::Verify(format!(
            "{}: {}",
            row.check,
            row.counterexample.as_deref().unwrap_or("")
        ))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut limits = Limits::default();
    if let Some(v) = cli.max_order {
        limits = limits.with_max_order(v);
    }
    if let Some(v) = cli.max_subgroups {
        limits = limits.with_max_subgroups(v);
    }
    let outcome = match cli.command {
        Command::Validate { group } => validate(group),
        Command::Zeta { group, json } => zeta(group, json),
        Command::Classify { family, lattice, verify, json, csv } => {
            run_classify(family, ClassifyOptions { lattice, verify, limits }, json, csv)
        }
        Command::Oracle { group, export_lattice, dot, json } => oracle(group, &limits, export_lattice, dot, json),
        Command::Compare { family, k1, k2, json } => run_compare(family, k1, k2, &limits, json),
        Command::Sweep { p, no_lattice, json } => sweep(p, limits.max_order, limits, !no_lattice, json),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceLimit(_) => EXIT_RESOURCE,
                Error::InternalInconsistency(_) => EXIT_VERIFY,
                _ => EXIT_INVALID,
            })
        }
    }
}

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use upg::ct::{load_ct, parse_ct, validate_ct, CtData};
use upg::invariants::{parse_order, InvariantError, SpecialChain};
use upg::report::{chain_for, compare, complement, invariants_report, Comparison, ReportOptions};
use upg::verify::{verify_conjugator, x_membership, OuterAuto, X_ITEMS};

#[derive(Parser)]
#[command(name = "upg", version, about = "Invariants of polynomially growing outer automorphisms from CT data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a CT file against the train track axioms.
    Validate { path: PathBuf },
    /// Print the invariant report of a CT.
    Invariants {
        path: PathBuf,
        /// Total order on higher order edges, e.g. "c,d,e,q".
        #[arg(long)]
        chain: Option<String>,
        /// Edges shown per eigenray prefix.
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long)]
        json: bool,
        /// Ask whether the subgraph spanned by these edges is special.
        #[arg(long, value_name = "EDGES")]
        special: Vec<String>,
        /// Ask whether the complement of these edges is special.
        #[arg(long, value_name = "EDGES")]
        special_complement: Vec<String>,
    },
    /// Compare the invariants of two CTs, stopping at the first difference.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "chain-a", alias = "chainA")]
        chain_a: Option<String>,
        #[arg(long = "chain-b", alias = "chainB")]
        chain_b: Option<String>,
    },
    /// Check that theta conjugates phi to psi.
    Verify {
        phi: PathBuf,
        psi: PathBuf,
        /// Images of generators, e.g. "a -> a; b -> ba". A leading @ reads a file.
        #[arg(long)]
        theta: String,
        /// Chain order used for the membership checklist.
        #[arg(long)]
        chain: Option<String>,
    },
}

/// Exit code and message.
struct Failure(u8, String);

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        let code = if matches!(e, InvariantError::InvalidTotalOrder(_)) { 2 } else { 1 };
        Failure(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<CtData, Failure> {
    load_ct(&read(path)?).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn chain(ct: &CtData, order: Option<&str>) -> Result<SpecialChain, Failure> {
    let order = order.map(|o| parse_order(ct, o)).transpose()?;
    Ok(chain_for(ct, order.as_deref())?)
}

fn edge_set(ct: &CtData, text: &str) -> Result<Vec<usize>, Failure> {
    Ok(parse_order(ct, text)?)
}

fn validate(path: &Path) -> Result<ExitCode, Failure> {
    let ct = parse_ct(&read(path)?).map_err(|e| Failure(1, format!("{}: {e}", path.display())))?;
    let v = validate_ct(&ct);
    if v.is_empty() {
        println!("valid");
        return Ok(ExitCode::SUCCESS);
    }
    for x in &v {
        eprintln!("{}: {x}", path.display());
    }
    Ok(ExitCode::from(1))
}

fn invariants(
    path: &Path,
    order: Option<&str>,
    depth: usize,
    json: bool,
    special: &[String],
    special_complement: &[String],
) -> Result<ExitCode, Failure> {
    let ct = load(path)?;
    let mut queries = Vec::new();
    for s in special {
        let es: BTreeSet<usize> = edge_set(&ct, s)?.into_iter().collect();
        queries.push((format!("subgraph {s}"), es));
    }
    for s in special_complement {
        queries.push((format!("complement of {s}"), complement(&ct, &edge_set(&ct, s)?)));
    }
    let order = order.map(|o| parse_order(&ct, o)).transpose()?;
    let r = invariants_report(&ct, &ReportOptions { order, depth, special: queries })?;
    print!("{}", if json { r.to_json() } else { r.to_text() });
    Ok(ExitCode::SUCCESS)
}

fn compare_cmd(a: &Path, b: &Path, ca: Option<&str>, cb: Option<&str>) -> Result<ExitCode, Failure> {
    let (x, y) = (load(a)?, load(b)?);
    let out = compare(&x, &chain(&x, ca)?, &y, &chain(&y, cb)?);
    match out.axes_orbit {
        Some(true) => println!("oriented axes: one Whitehead orbit"),
        Some(false) => println!("oriented axes: different Whitehead orbits"),
        None => println!("oriented axes: orbit question not decided"),
    }
    match out.result {
        Comparison::Indistinguishable => println!("indistinguishable"),
        Comparison::Distinguished(c) => println!("distinguished at {c}"),
        Comparison::Undetermined(e) => println!("undetermined: {e}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(phi: &Path, psi: &Path, theta: &str, order: Option<&str>) -> Result<ExitCode, Failure> {
    let (x, y) = (load(phi)?, load(psi)?);
    let text = match theta.strip_prefix('@') {
        Some(p) => read(Path::new(p))?,
        None => theta.to_string(),
    };
    let bad = |e: upg::verify::VerifyError| Failure(1, format!("theta: {e}"));
    let theta = OuterAuto::parse(&text, x.rank()).map_err(bad)?;
    let f = OuterAuto::new(x.automorphism()).map_err(bad)?;
    let g = OuterAuto::new(y.automorphism()).map_err(bad)?;
    let yes = verify_conjugator(&f, &g, &theta).map_err(bad)?;
    println!("{}", if yes { "YES" } else { "NO" });
    let checklist = x_membership(&x, &chain(&x, order)?, &theta).map_err(bad)?;
    for (name, ok) in X_ITEMS.iter().zip(checklist.items) {
        println!("[{}] {name}", if ok { "x" } else { " " });
    }
    Ok(if yes { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Validate { path } => validate(path),
        Cmd::Invariants { path, chain, depth, json, special, special_complement } => {
            invariants(path, chain.as_deref(), *depth, *json, special, special_complement)
        }
        Cmd::Compare { a, b, chain_a, chain_b } => compare_cmd(a, b, chain_a.as_deref(), chain_b.as_deref()),
        Cmd::Verify { phi, psi, theta, chain } => verify(phi, psi, theta, chain.as_deref()),
    };
    res.unwrap_or_else(|Failure(code, msg)| {
        eprintln!("upg: {msg}");
        ExitCode::from(code)
    })
}

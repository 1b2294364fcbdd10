//! `stabdyn`: command-line access to the shift, group and verification
//! toolkit.
//!
//! Every subcommand produces one JSON result document. `--json` prints it,
//! `--out` writes it to a file, and a run manifest records the inputs.
//! Exit codes: 0 pass or inconclusive, 1 usage or budget error, 2 a checked
//! statement failed.

mod calc;
mod manifest;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use stabdyn::codes::enumerate_automorphisms;
use stabdyn::group::FiniteGroup;
use stabdyn::sequences::{
    check_example1_residues, check_example2_markers, example1_len, example1_spec, example2_spec,
};
use stabdyn::sft::{perron_root_by_charpoly, EdgeShift};
use stabdyn::spectral::{
    cyclic_partition, is_power_transitive, is_power_transitive_by_connectivity, rational_eigs, smale,
};
use stabdyn::verify::{
    check_wreath_rigidity, compare_rational_eigs, entropy_ratio, rigidity_sweep, verify_split_sequence,
    SplitParams,
};
use stabdyn::{Budgets, SCHEMA_VERSION};

use crate::calc::{CalcInput, GroupSource};
use crate::manifest::{sha256_hex, RunManifest};

#[derive(Debug, Parser, Serialize)]
#[command(name = "stabdyn", version, about = "Shifts of finite type, their automorphisms and wreath products")]
struct Cli {
    /// Print the result document as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress text output and the stderr manifest; --json output is still printed.
    #[arg(long, global = true)]
    quiet: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result document to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the run manifest here (default: next to --out, else stderr).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Budget overrides, e.g. `words=50000000,group=5000`; applied after
    /// STABDYN_BUDGET.
    #[arg(long, global = true)]
    budget: Option<String>,
    /// Cross-check results along a second, independent path.
    #[arg(long, global = true)]
    verify: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Irreducibility, period, rational eigenvalues, entropy and Smale data.
    Analyze(Input),
    /// Rational eigenvalues: the divisors of the period.
    Eigs(Input),
    /// The cyclic partition of size m.
    Partition {
        #[command(flatten)]
        input: Input,
        /// Number of classes (default: the period).
        #[arg(long)]
        m: Option<usize>,
    },
    /// Automorphisms of σⁿ with bounded radius.
    Autos {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[arg(long, default_value_t = 0)]
        radius: usize,
        /// Inverse radius bound (default: twice the radius).
        #[arg(long)]
        inv_radius: Option<usize>,
    },
    /// Checks the split exact sequence for Aut(σ^{nm}).
    VerifyWreath {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[arg(long)]
        inv_radius: Option<usize>,
        #[arg(long, default_value_t = 2048)]
        max_tuples: usize,
        #[arg(long, default_value_t = 4096)]
        max_pairs: usize,
    },
    /// Evaluates wreath product expressions from a JSON file.
    WreathCalc {
        /// Expression document, or `-` for stdin.
        file: String,
    },
    /// Tests G ≀ Sym(n) ≅ H ≀ Sym(m).
    Rigidity {
        /// Builtin group name or group document file.
        #[arg(long = "group-g", alias = "groupG")]
        group_g: String,
        #[arg(long)]
        n: usize,
        #[arg(long = "group-h", alias = "groupH")]
        group_h: String,
        #[arg(long)]
        m: usize,
    },
    /// Compares the rational eigenvalue sets of two shifts.
    CompareEigs(Pair),
    /// Rational approximation of the entropy ratio of two shifts.
    EntropyRatio {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 1000)]
        max_den: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// The binary marker word A_level, or a residue check of b_n.
    Example1(ExampleArgs),
    /// The Sturmian marker word A_level, or a marker check of b_n.
    Example2(ExampleArgs),
    /// Rigidity checks over all small base groups.
    Sweep {
        #[arg(long, default_value_t = 2000)]
        max_order: u128,
        /// Also run the pairs with n = m.
        #[arg(long)]
        include_equal: bool,
    },
}

#[derive(Debug, Args, Serialize)]
struct Input {
    /// Matrix file, `-` for stdin, or inline matrix text such as "1 1 / 1 0".
    input: String,
}

#[derive(Debug, Args, Serialize)]
struct Pair {
    x: String,
    y: String,
}

#[derive(Debug, Args, Serialize)]
struct ExampleArgs {
    #[arg(long, default_value_t = 3)]
    level: u32,
    /// Check the marker b_n instead of printing the word.
    #[arg(long)]
    check: Option<u32>,
    /// Prefix length for --check.
    #[arg(long)]
    depth: Option<usize>,
}

/// A finished command: its document, a short text rendering and the exit
/// code.
struct Outcome {
    doc: Value,
    text: String,
    code: u8,
}

impl Outcome {
    fn new(doc: impl Serialize, text: String, code: u8) -> Result<Self, String> {
        Ok(Outcome { doc: serde_json::to_value(doc).map_err(|e| e.to_string())?, text, code })
    }
}

/// Loaded inputs with their hashes, for the manifest.
#[derive(Default)]
struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn text(&mut self, name: &str, source: &str) -> Result<String, String> {
        let text = if source == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
            s
        } else if std::path::Path::new(source).is_file() {
            std::fs::read_to_string(source).map_err(|e| format!("{source}: {e}"))?
        } else {
            source.to_string()
        };
        self.0.insert(name.to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn shift(&mut self, name: &str, source: &str) -> Result<EdgeShift, String> {
        let text = self.text(name, source)?;
        EdgeShift::parse(&text).map_err(lib_err)
    }

    fn group(&mut self, name: &str, source: &str) -> Result<FiniteGroup, String> {
        if std::path::Path::new(source).is_file() || source == "-" {
            let text = self.text(name, source)?;
            let g: GroupSource = serde_json::from_str(&text).map_err(|e| format!("{source}: {e}"))?;
            g.load()
        } else {
            self.0.insert(name.to_string(), sha256_hex(source.as_bytes()));
            FiniteGroup::builtin(source).map_err(lib_err)
        }
    }
}

fn lib_err(e: stabdyn::Error) -> String {
    match e {
        stabdyn::Error::BudgetExceeded { .. } => format!(
            "{e}; raise the limit with --budget or STABDYN_BUDGET \
             (keys words, group, search, sequence), or lower the radius or power"
        ),
        e => e.to_string(),
    }
}

fn analyze(x: &EdgeShift, budgets: &Budgets, verify: bool) -> Result<Outcome, String> {
    let irreducible = x.is_irreducible();
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "matrix_hash": x.hash(),
        "states": x.num_states(),
        "alphabet_size": x.alphabet_size(),
        "is_irreducible": irreducible,
        "normalization": x.normalization_log(),
    });
    if !irreducible {
        doc["components"] = json!(x.strongly_connected_components());
        let text = format!("reducible, {} strongly connected components", x.strongly_connected_components().len());
        return Outcome::new(doc, text, 0);
    }
    let period = x.period().map_err(lib_err)?;
    let eig = rational_eigs(x).map_err(lib_err)?;
    let entropy = x.entropy().map_err(lib_err)?;
    let sm = smale(x, budgets).map_err(lib_err)?;
    doc["is_mixing"] = json!(x.is_mixing());
    doc["period"] = json!(period);
    doc["rational_eigs"] = json!(eig);
    doc["entropy"] = json!(entropy);
    doc["smale"] = json!(sm.summary());
    let mut code = 0;
    if verify {
        let v = cross_check(x, entropy.perron);
        if !v.values().all(|&ok| ok) {
            code = 2;
        }
        doc["verification"] = json!(v);
    }
    let text = format!(
        "period {period}, Eig {eig:?}, h = {:.12} (λ = {:.12}), component on {} states{}",
        entropy.entropy,
        entropy.perron,
        sm.component.num_states(),
        if code == 2 { "; VERIFICATION MISMATCH" } else { "" },
    );
    Outcome::new(doc, text, code)
}

/// Independent second paths: connectivity of powers against the
/// coprimality rule, and the characteristic polynomial against power
/// iteration.
fn cross_check(x: &EdgeShift, perron: f64) -> BTreeMap<&'static str, bool> {
    let transitivity = (1..=12u64).all(|n| {
        is_power_transitive(x, n).ok() == Some(is_power_transitive_by_connectivity(x, n as usize))
    });
    let mut v = BTreeMap::from([("power_transitivity", transitivity)]);
    if x.num_states() <= 6 {
        let root = perron_root_by_charpoly(x.adjacency());
        v.insert("entropy_charpoly", (root - perron).abs() <= 1e-9 * perron.max(1.0));
    }
    v
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Result<Outcome, String> {
    let mut budgets = Budgets::from_env().map_err(lib_err)?;
    if let Some(spec) = &cli.budget {
        budgets = budgets.with_overrides(spec).map_err(lib_err)?;
    }
    let b = &budgets;
    match &cli.command {
        Command::Analyze(input) => {
            let x = inputs.shift("input", &input.input)?;
            analyze(&x, b, cli.verify)
        }
        Command::Eigs(input) => {
            let x = inputs.shift("input", &input.input)?;
            let period = x.period().map_err(lib_err)?;
            let eig = rational_eigs(&x).map_err(lib_err)?;
            let mut code = 0;
            let mut doc =
                json!({"schema_version": SCHEMA_VERSION, "matrix_hash": x.hash(), "period": period, "rational_eigs": eig});
            if cli.verify {
                // m is an eigenvalue exactly when a cyclic partition of size m exists
                let ok = (1..=period.max(6)).all(|m| cyclic_partition(&x, m as usize).is_ok() == eig.contains(&m));
                code = if ok { 0 } else { 2 };
                doc["verification"] = json!({"partitions": ok});
            }
            Outcome::new(doc, format!("{eig:?}"), code)
        }
        Command::Partition { input, m } => {
            let x = inputs.shift("input", &input.input)?;
            let m = match m {
                Some(m) => *m,
                None => x.period().map_err(lib_err)? as usize,
            };
            let part = cyclic_partition(&x, m).map_err(lib_err)?;
            let classes: Vec<Vec<&str>> = part
                .classes
                .iter()
                .map(|c| c.iter().map(|&s| x.states()[s].as_str()).collect())
                .collect();
            let text = classes.iter().map(|c| format!("{{{}}}", c.join(", "))).collect::<Vec<_>>().join(" ");
            let doc = json!({"schema_version": SCHEMA_VERSION, "m": m, "partition": part, "state_names": classes});
            Outcome::new(doc, text, 0)
        }
        Command::Autos { input, power, radius, inv_radius } => {
            let x = inputs.shift("input", &input.input)?;
            let r_inv = inv_radius.unwrap_or(2 * radius);
            let set = enumerate_automorphisms(&x, *power, *radius, r_inv, b).map_err(lib_err)?;
            let doc = set.to_document(&x);
            let text = format!(
                "{} automorphisms of σ^{power} with radius ≤ {radius} and inverse radius ≤ {r_inv} ({} search nodes)",
                doc.count, doc.search_nodes
            );
            Outcome::new(doc, text, 0)
        }
        Command::VerifyWreath { input, n, m, radius, inv_radius, max_tuples, max_pairs } => {
            let x = inputs.shift("input", &input.input)?;
            let mut params = SplitParams::new(*n, *m, *radius);
            if let Some(r) = inv_radius {
                params.inv_radius = *r;
            }
            params.max_tuples = *max_tuples;
            params.max_pairs = *max_pairs;
            params.seed = cli.seed;
            let rep = verify_split_sequence(&x, &params, b).map_err(lib_err)?;
            let mut lines: Vec<String> = rep
                .checks
                .iter()
                .map(|c| format!("{} {} ({} cases)", if c.passed { "ok  " } else { "FAIL" }, c.name, c.cases))
                .collect();
            lines.push(format!(
                "|A| = {}, kernel {}, image {}; {}",
                rep.automorphisms,
                rep.kernel,
                rep.image.len(),
                if rep.passed { "all checks pass" } else { "THEOREM-VIOLATION" }
            ));
            let code = if rep.passed { 0 } else { 2 };
            Outcome::new(rep, lines.join("\n"), code)
        }
        Command::WreathCalc { file } => {
            let text = inputs.text("expressions", file)?;
            let input: CalcInput = serde_json::from_str(&text).map_err(|e| format!("{file}: {e}"))?;
            let rep = calc::evaluate(input)?;
            let text = rep
                .results
                .iter()
                .map(|r| format!("{} = (g = {:?}, σ = {}) of order {}", r.expression, r.value.g, r.value.sigma, r.order))
                .collect::<Vec<_>>()
                .join("\n");
            Outcome::new(rep, text, 0)
        }
        Command::Rigidity { group_g, n, group_h, m } => {
            let g = inputs.group("group_g", group_g)?;
            let h = inputs.group("group_h", group_h)?;
            let rep = check_wreath_rigidity(&g, *n, &h, *m, b).map_err(lib_err)?;
            let code = if rep.violation { 2 } else { 0 };
            let text = rep.message.clone();
            Outcome::new(rep, text, code)
        }
        Command::CompareEigs(pair) => {
            let x = inputs.shift("x", &pair.x)?;
            let y = inputs.shift("y", &pair.y)?;
            let rep = compare_rational_eigs(&x, &y).map_err(lib_err)?;
            let text = rep.message.clone();
            Outcome::new(rep, text, 0)
        }
        Command::EntropyRatio { pair, max_den, tol } => {
            let x = inputs.shift("x", &pair.x)?;
            let y = inputs.shift("y", &pair.y)?;
            let rep = entropy_ratio(&x, &y, *max_den, *tol, b).map_err(lib_err)?;
            let text = format!(
                "h_X/h_Y = {:.12} ≈ {}/{} (residual {:.2e}, {:?})",
                rep.ratio, rep.p, rep.q, rep.residual, rep.verdict
            );
            Outcome::new(rep, text, 0)
        }
        Command::Example1(args) => example(args, 1, b),
        Command::Example2(args) => example(args, 2, b),
        Command::Sweep { max_order, include_equal } => {
            let entries = rigidity_sweep(*max_order, *include_equal, b).map_err(lib_err)?;
            let violations = entries.iter().filter(|e| e.report.violation).count();
            let text = format!("{} pairs checked, {violations} THEOREM-VIOLATIONs", entries.len());
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "max_order": max_order,
                "include_equal": include_equal,
                "violations": violations,
                "entries": entries,
            });
            Outcome::new(doc, text, if violations == 0 { 0 } else { 2 })
        }
    }
}

fn example(args: &ExampleArgs, which: u8, b: &Budgets) -> Result<Outcome, String> {
    match args.check {
        None => {
            let spec = if which == 1 { example1_spec(args.level, b) } else { example2_spec(args.level, b) };
            let spec = spec.map_err(lib_err)?;
            let text = spec.prefix.clone();
            Outcome::new(spec, text, 0)
        }
        Some(n) => {
            let rep = if which == 1 {
                let depth = args.depth.unwrap_or(example1_len(n + 3).min(usize::MAX as u128) as usize);
                check_example1_residues(n, depth, b)
            } else {
                let depth = args.depth.unwrap_or(3usize.saturating_pow(n + 3));
                check_example2_markers(n, depth, b)
            }
            .map_err(lib_err)?;
            let text = format!(
                "{} occurrences of b_{n} in {} symbols, residues mod {}: {:?}; {}",
                rep.occurrences,
                rep.depth,
                rep.modulus,
                rep.residues,
                if rep.passed { "pass" } else { "fail" }
            );
            let code = if rep.passed { 0 } else { 2 };
            Outcome::new(rep, text, code)
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut inputs = Inputs::default();
    let (code, result_path) = match run(&cli, &mut inputs) {
        Ok(outcome) => {
            let rendered = serde_json::to_string_pretty(&outcome.doc).expect("documents serialize") + "\n";
            if cli.json {
                print!("{rendered}");
            } else if !cli.quiet {
                println!("{}", outcome.text);
            }
            match &cli.out {
                Some(path) => match std::fs::write(path, &rendered) {
                    Ok(()) => (outcome.code, Some(path.display().to_string())),
                    Err(e) => {
                        eprintln!("error: {}: {e}", path.display());
                        (1, None)
                    }
                },
                None => (outcome.code, None),
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            (1, None)
        }
    };
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        subcommand: serde_json::to_value(&cli.command)
            .ok()
            .and_then(|v| v.as_object().and_then(|o| o.keys().next().cloned()).or(v.as_str().map(String::from)))
            .unwrap_or_default(),
        flags: serde_json::to_value(&cli).unwrap_or(Value::Null),
        input_hashes: inputs.0,
        library_version: env!("CARGO_PKG_VERSION"),
        wall_time_ms: start.elapsed().as_millis(),
        result_path,
        exit_code: code,
    };
    let rendered = serde_json::to_string(&manifest).expect("manifest serializes");
    let target = cli.manifest.clone().or_else(|| {
        cli.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, rendered + "\n") {
                eprintln!("error: {}: {e}", path.display());
            }
        }
        None if !cli.quiet => eprintln!("{rendered}"),
        None => {}
    }
    ExitCode::from(code)
}

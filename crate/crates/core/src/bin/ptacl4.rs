use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use ptacl4::algebra::{
    belnap_ops, jobe_ops, standard_registry, synthesize_permutation, transposition_cycle_gcd, AlgebraError,
    OpRegistry, OpTable, Permutation,
};
use ptacl4::completeness::{analyze, check_canonical_completeness, totally_ordered_generators};
use ptacl4::interop::{
    compile_to_policy, emit_formula, emit_policy, parse_policy, parse_request, parse_serve_line, parse_table,
    PolicyEncoding,
};
use ptacl4::lattice::{chain_lattice, knowledge_lattice, truth_lattice, Decision, FiniteLattice};
use ptacl4::nf_compiler::{all_inputs, compile, Basis};
use ptacl4::policy::{resolve, Binding, Bindings, DecisionSet, Evaluator, PolicyNode, Request, Strategy};

/// Largest chain the CLI accepts; closure checks grow as m^m.
const MAX_CHAIN: usize = 5;

#[derive(Parser)]
#[command(name = "ptacl4", version, about = "Four-valued access control policies: compile, evaluate, analyze")]
struct Cli {
    /// Generators for emitted unary words.
    #[arg(long, global = true)]
    basis: Option<Basis>,
    /// Lattice: 4k, 4t or chain:m.
    #[arg(long, global = true)]
    lattice: Option<LatticeSel>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// TOML file with defaults for basis, lattice, format and store.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a decision table into a normal-form policy.
    Compile {
        table: PathBuf,
        /// Write the result here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Express joins through conf and kand only.
        #[arg(long)]
        strict_basis: bool,
        /// Emit the formula instead of a policy.
        #[arg(long)]
        formula: bool,
    },
    /// Evaluate a policy against a request.
    Eval {
        policy: PathBuf,
        request: PathBuf,
        /// Use the indeterminacy semantics and print a decision set.
        #[arg(long)]
        ind: bool,
        /// Reduce the result to 0 or 1.
        #[arg(long)]
        resolve: Option<Strategy>,
        /// Bind a policy reference: NAME=decision or NAME=@policy-file.
        #[arg(long = "bind", value_name = "NAME=VALUE")]
        binds: Vec<String>,
    },
    /// Report suitability and completeness of an operator set.
    Check {
        /// Comma-separated operator names, aliases (belnap, ptacl4, jobe) or
        /// inline tables name:v/v/...
        ops: String,
    },
    /// Find a shortest generator word for a permutation.
    Synth {
        /// Image list such as top,0,1,bot or cycles such as (bot 0).
        permutation: String,
        /// Generators: names or cycles, comma-separated. Defaults to the basis.
        #[arg(long)]
        generators: Option<String>,
    },
    /// Check a policy against a decision table on every input.
    Verify { policy: PathBuf, table: PathBuf },
    /// Answer `NAME | attr=value;...` lines from standard input.
    Serve {
        /// Directory of *.policy files, named by file stem.
        store: Option<PathBuf>,
        #[arg(long)]
        ind: bool,
        #[arg(long)]
        resolve: Option<Strategy>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
enum LatticeSel {
    #[default]
    Knowledge,
    Truth,
    Chain(usize),
}

impl FromStr for LatticeSel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "4k" => Ok(LatticeSel::Knowledge),
            "4t" => Ok(LatticeSel::Truth),
            _ => {
                let m = s
                    .strip_prefix("chain:")
                    .and_then(|m| m.parse::<usize>().ok())
                    .ok_or_else(|| format!("unknown lattice `{s}` (expected 4k, 4t or chain:m)"))?;
                if !(2..=MAX_CHAIN).contains(&m) {
                    return Err(format!("chain size must be between 2 and {MAX_CHAIN}"));
                }
                Ok(LatticeSel::Chain(m))
            }
        }
    }
}

impl fmt::Display for LatticeSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeSel::Knowledge => f.write_str("4k"),
            LatticeSel::Truth => f.write_str("4t"),
            LatticeSel::Chain(m) => write!(f, "chain:{m}"),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    basis: Option<Basis>,
    lattice: Option<String>,
    format: Option<Format>,
    store: Option<PathBuf>,
}

struct Config {
    basis: Basis,
    lattice: LatticeSel,
    format: Format,
    store: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Input(String),
    Verify(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Verify(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Verify(m) => m,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn input_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| input_err(path, e))
}

fn load_config(cli: &Cli) -> Result<Config> {
    let file = match &cli.config {
        Some(p) => toml::from_str::<ConfigFile>(&read(p)?).map_err(|e| input_err(p, e))?,
        None => ConfigFile::default(),
    };
    let lattice = match (cli.lattice, &file.lattice) {
        (Some(l), _) => l,
        (None, Some(s)) => s.parse().map_err(CliError::Usage)?,
        (None, None) => LatticeSel::default(),
    };
    Ok(Config {
        basis: cli.basis.or(file.basis).unwrap_or_default(),
        lattice,
        format: cli.format.or(file.format).unwrap_or_default(),
        store: file.store,
    })
}

fn lattice_of(sel: LatticeSel) -> FiniteLattice {
    match sel {
        LatticeSel::Knowledge => knowledge_lattice(),
        LatticeSel::Truth => truth_lattice(),
        LatticeSel::Chain(m) => chain_lattice(m).expect("size checked when parsed"),
    }
}

/// Named operators over the selected lattice's carrier.
fn registry_of(sel: LatticeSel) -> OpRegistry {
    match sel {
        LatticeSel::Knowledge | LatticeSel::Truth => standard_registry(),
        LatticeSel::Chain(m) => {
            let mut reg = totally_ordered_generators(m).expect("size checked when parsed").ops;
            for k in 1..m {
                let t = Permutation::transposition(m, 0, k).expect("distinct points");
                reg.insert(t.to_op(format!("t{}", k + 1))).expect("fresh names");
            }
            if m == 3 {
                reg.extend(&jobe_ops()).expect("fresh names");
            }
            reg
        }
    }
}

/// Unary generators standing for the basis on the selected lattice. On a
/// chain, conf-cyc means the transposition of the ends plus the cycle and
/// transpositions means every transposition through the bottom.
fn basis_ops(basis: Basis, sel: LatticeSel) -> Vec<OpTable> {
    let reg = registry_of(sel);
    let names: Vec<String> = match (sel, basis) {
        (LatticeSel::Chain(_), Basis::ConfCyc) => vec!["dagger".into(), "cyc".into()],
        (LatticeSel::Chain(m), Basis::Transpositions) => (2..=m).map(|k| format!("t{k}")).collect(),
        (_, b) => b.generator_names().iter().map(|s| s.to_string()).collect(),
    };
    names.iter().map(|n| reg.get(n).expect("basis operator registered").clone()).collect()
}

fn check_basis(cfg: &Config) -> Result<()> {
    let ops = basis_ops(cfg.basis, cfg.lattice);
    let refs: Vec<&OpTable> = ops.iter().collect();
    let lattice = lattice_of(cfg.lattice);
    let report = check_canonical_completeness(&refs, &lattice).map_err(|e| CliError::Usage(e.to_string()))?;
    if !report.complete {
        return Err(CliError::Usage(format!(
            "basis {} is not canonically complete over {} (missing {})",
            cfg.basis,
            cfg.lattice,
            report.missing.join(", ")
        )));
    }
    Ok(())
}

fn require_knowledge(cfg: &Config, cmd: &str) -> Result<()> {
    if cfg.lattice != LatticeSel::Knowledge {
        return Err(CliError::Usage(format!("`{cmd}` works over 4k only (got --lattice {})", cfg.lattice)));
    }
    Ok(())
}

fn load_policy(path: &Path) -> Result<PolicyNode> {
    parse_policy(&read(path)?).map_err(|e| input_err(path, e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ptacl4: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    check_basis(&cfg)?;
    match cli.command {
        Command::Compile {
            table,
            output,
            strict_basis,
            formula,
        } => cmd_compile(&cfg, &table, output.as_deref(), strict_basis, formula),
        Command::Eval {
            policy,
            request,
            ind,
            resolve,
            binds,
        } => cmd_eval(&cfg, &policy, &request, ind, resolve, &binds),
        Command::Check { ops } => cmd_check(&cfg, &ops),
        Command::Synth {
            permutation,
            generators,
        } => cmd_synth(&cfg, &permutation, generators.as_deref()),
        Command::Verify { policy, table } => cmd_verify(&cfg, &policy, &table),
        Command::Serve { store, ind, resolve } => {
            let store = store
                .or(cfg.store.clone())
                .ok_or_else(|| CliError::Usage("serve needs a store directory".into()))?;
            cmd_serve(&cfg, &store, ind, resolve)
        }
    }
}

fn cmd_compile(cfg: &Config, path: &Path, output: Option<&Path>, strict: bool, as_formula: bool) -> Result<()> {
    require_knowledge(cfg, "compile")?;
    let table = parse_table(&read(path)?).map_err(|e| input_err(path, e))?;
    let f = compile(&table, cfg.basis);
    let text = if as_formula {
        emit_formula(&f, table.variables())
    } else {
        emit_policy(&compile_to_policy(&table, cfg.basis, PolicyEncoding { strict_basis: strict }))
    };
    let clauses = f.clauses().len();
    let literals = f.literal_count();
    let summary = match cfg.format {
        Format::Text => format!("clauses: {clauses}, literals: {literals}"),
        Format::Json => json!({ "clauses": clauses, "literals": literals, "basis": cfg.basis.as_str() }).to_string(),
    };
    match output {
        Some(out) => {
            fs::write(out, text).map_err(|e| input_err(out, e))?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn parse_binding(text: &str) -> Result<(String, Binding)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--bind expects NAME=VALUE, got `{text}`")))?;
    let binding = match value.strip_prefix('@') {
        Some(file) => Binding::Policy(load_policy(Path::new(file))?),
        None => Binding::Fixed(
            value
                .parse::<Decision>()
                .map_err(|e| CliError::Usage(format!("--bind {name}: {e}")))?,
        ),
    };
    Ok((name.to_string(), binding))
}

fn render_result(set: DecisionSet, ind: bool, strategy: Option<Strategy>) -> String {
    match strategy {
        Some(s) => resolve(set, s).to_string(),
        None if ind => set.to_string(),
        None => set.as_singleton().expect("strict results are single decisions").to_string(),
    }
}

fn evaluate(ev: &Evaluator, p: &PolicyNode, q: &Request, ind: bool) -> std::result::Result<DecisionSet, String> {
    if ind {
        ev.eval_ind(p, q).map_err(|e| e.to_string())
    } else {
        ev.eval(p, q).map(DecisionSet::singleton).map_err(|e| e.to_string())
    }
}

fn cmd_eval(
    cfg: &Config,
    policy: &Path,
    request: &Path,
    ind: bool,
    strategy: Option<Strategy>,
    binds: &[String],
) -> Result<()> {
    require_knowledge(cfg, "eval")?;
    let p = load_policy(policy)?;
    let q = parse_request(&read(request)?).map_err(|e| input_err(request, e))?;
    let bindings: Bindings = binds.iter().map(|b| parse_binding(b)).collect::<Result<_>>()?;
    let ev = Evaluator::with_bindings(bindings);
    let set = evaluate(&ev, &p, &q, ind).map_err(|e| input_err(policy, e))?;
    let out = render_result(set, ind, strategy);
    match cfg.format {
        Format::Text => println!("{out}"),
        Format::Json => {
            let decisions: Vec<Decision> = set.iter().collect();
            let mut v = json!({ "result": out, "decisions": decisions });
            if let Some(s) = strategy {
                v["strategy"] = json!(s.as_str());
            }
            println!("{v}");
        }
    }
    Ok(())
}

fn inline_table(text: &str, lattice: &FiniteLattice) -> Result<OpTable> {
    let (name, values) = text.split_once(':').expect("caller checked for ':'");
    let n = lattice.size();
    let vals = values
        .split('/')
        .map(|v| {
            lattice
                .element(v)
                .ok_or_else(|| CliError::Usage(format!("`{v}` is not an element of {}", lattice.name())))
        })
        .collect::<Result<Vec<_>>>()?;
    let op = if vals.len() == n {
        OpTable::unary(name, vals)
    } else if vals.len() == n * n {
        OpTable::binary(name, n, vals)
    } else {
        return Err(CliError::Usage(format!(
            "inline table `{name}` needs {n} or {} values, got {}",
            n * n,
            vals.len()
        )));
    };
    op.map_err(|e| CliError::Usage(e.to_string()))
}

fn operator_set(text: &str, cfg: &Config) -> Result<OpRegistry> {
    let lattice = lattice_of(cfg.lattice);
    let reg = registry_of(cfg.lattice);
    let mut ops = OpRegistry::new(lattice.size());
    let add = |ops: &mut OpRegistry, other: &OpRegistry| ops.extend(other).map_err(|e| CliError::Usage(e.to_string()));
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "belnap" if lattice.size() == 4 => add(&mut ops, &belnap_ops())?,
            "ptacl4" if lattice.size() == 4 => add(&mut ops, &reg.subset(&["conf", "cyc", "kand"]).expect("registered"))?,
            "jobe" if lattice.size() == 3 => add(&mut ops, &jobe_ops())?,
            _ if item.contains(':') => {
                let op = inline_table(item, &lattice)?;
                ops.insert(op).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            name => {
                let op = reg.get(name).ok_or_else(|| {
                    let known: Vec<&str> = reg.names().collect();
                    CliError::Usage(format!("unknown operator `{name}` over {} (known: {})", cfg.lattice, known.join(", ")))
                })?;
                add(&mut ops, &OpRegistry::from_ops(op.size(), [op.clone()]).expect("single op"))?;
            }
        }
    }
    if ops.is_empty() {
        return Err(CliError::Usage("no operators given".into()));
    }
    Ok(ops)
}

fn cmd_check(cfg: &Config, text: &str) -> Result<()> {
    let ops = operator_set(text, cfg)?;
    let report = analyze(&ops, &lattice_of(cfg.lattice)).map_err(|e| CliError::Usage(e.to_string()))?;
    match cfg.format {
        Format::Text => print!("{report}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
    }
    Ok(())
}

/// Splits on commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

fn parse_permutation(text: &str, lattice: &FiniteLattice) -> Result<Permutation> {
    let n = lattice.size();
    let elem = |t: &str| {
        lattice
            .element(t)
            .ok_or_else(|| CliError::Usage(format!("`{t}` is not an element of {}", lattice.name())))
    };
    let text = text.trim();
    let perm = if text.starts_with('(') {
        let mut cycles = Vec::new();
        let mut rest = text;
        while let Some(open) = rest.find('(') {
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| CliError::Usage(format!("unclosed cycle in `{text}`")))?;
            let cycle = rest[open + 1..open + close]
                .split_whitespace()
                .map(elem)
                .collect::<Result<Vec<_>>>()?;
            cycles.push(cycle);
            rest = &rest[open + close + 1..];
        }
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Permutation::from_cycles(n, &refs)
    } else {
        let images = text.split(',').map(|t| elem(t.trim())).collect::<Result<Vec<_>>>()?;
        if images.len() != n {
            return Err(CliError::Usage(format!("expected {n} images, got {}", images.len())));
        }
        Permutation::from_images(images)
    };
    perm.map_err(|e| CliError::Usage(format!("`{text}` is not a permutation: {e}")))
}

fn cmd_synth(cfg: &Config, text: &str, generators: Option<&str>) -> Result<()> {
    let lattice = lattice_of(cfg.lattice);
    let target = parse_permutation(text, &lattice)?;
    let reg = registry_of(cfg.lattice);
    let gens: Vec<OpTable> = match generators {
        None => basis_ops(cfg.basis, cfg.lattice),
        Some(list) => split_top(list)
            .into_iter()
            .map(|g| {
                if g.starts_with('(') {
                    Ok(parse_permutation(g, &lattice)?.to_op(g))
                } else {
                    reg.get(g)
                        .cloned()
                        .ok_or_else(|| CliError::Usage(format!("unknown generator `{g}`")))
                }
            })
            .collect::<Result<_>>()?,
    };
    let refs: Vec<&OpTable> = gens.iter().collect();
    let (word, generated) = match synthesize_permutation(&target, &refs) {
        Ok(w) if w.is_empty() => ("id".to_string(), true),
        Ok(w) => (w.to_string(), true),
        Err(AlgebraError::NotGenerated { subgroup_size, .. }) => {
            let why = match transposition_cycle_gcd(&refs) {
                Some((d, n, g)) if g > 1 => format!("gcd({d},{n})={g}"),
                _ => format!("subgroup of order {subgroup_size}"),
            };
            (format!("not generated ({why})"), false)
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    match cfg.format {
        Format::Text => println!("{word}"),
        Format::Json => println!("{}", json!({ "generated": generated, "word": word })),
    }
    Ok(())
}

fn cmd_verify(cfg: &Config, policy: &Path, table_path: &Path) -> Result<()> {
    require_knowledge(cfg, "verify")?;
    let p = load_policy(policy)?;
    let table = parse_table(&read(table_path)?).map_err(|e| input_err(table_path, e))?;
    if let Some(r) = p.references().into_iter().find(|r| !table.variables().iter().any(|v| v == r)) {
        return Err(CliError::Input(format!(
            "policy references `{r}`, which is not a column of {} ({})",
            table_path.display(),
            table.variables().join(" ")
        )));
    }
    let mut mismatch = None;
    for x in all_inputs(table.arity()) {
        let bindings: Bindings = table
            .variables()
            .iter()
            .zip(&x)
            .map(|(v, &d)| (v.clone(), Binding::Fixed(d)))
            .collect();
        let got = Evaluator::with_bindings(bindings)
            .eval(&p, &Request::new())
            .map_err(|e| input_err(policy, e))?;
        let want = table.lookup(&x);
        if got != want {
            mismatch = Some((x, got, want));
            break;
        }
    }
    let checked = 4usize.pow(table.arity() as u32);
    match (&mismatch, cfg.format) {
        (None, Format::Text) => println!("pass ({checked} inputs)"),
        (Some((x, got, want)), Format::Text) => {
            let at: Vec<&str> = x.iter().map(|d| d.token()).collect();
            println!("fail at ({}): policy gives {got}, table gives {want}", at.join(","));
        }
        (_, Format::Json) => {
            let m = mismatch.as_ref().map(|(x, got, want)| json!({ "input": x, "policy": got, "table": want }));
            println!("{}", json!({ "pass": mismatch.is_none(), "inputs": checked, "mismatch": m }));
        }
    }
    match mismatch {
        None => Ok(()),
        Some(_) => Err(CliError::Verify("policy and table disagree".into())),
    }
}

fn load_store(dir: &Path) -> Result<BTreeMap<String, PolicyNode>> {
    let mut store = BTreeMap::new();
    let entries = fs::read_dir(dir).map_err(|e| input_err(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| input_err(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("policy") || !path.is_file() {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        store.insert(stem.to_string(), load_policy(&path)?);
    }
    Ok(store)
}

fn cmd_serve(cfg: &Config, dir: &Path, ind: bool, strategy: Option<Strategy>) -> Result<()> {
    require_knowledge(cfg, "serve")?;
    let store = load_store(dir)?;
    // Store policies may refer to each other by name.
    let bindings: Bindings = store.iter().map(|(k, p)| (k.clone(), Binding::Policy(p.clone()))).collect();
    let ev = Evaluator::with_bindings(bindings);
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| CliError::Input(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match parse_serve_line(&line) {
            Err(e) => format!("ERR {}", e.message),
            Ok((name, q)) => match store.get(&name) {
                None => "ERR unknown policy".to_string(),
                Some(p) => match evaluate(&ev, p, &q, ind) {
                    Ok(set) => render_result(set, ind, strategy),
                    Err(e) => format!("ERR {e}"),
                },
            },
        };
        writeln!(out, "{reply}").and_then(|_| out.flush()).map_err(|e| CliError::Input(e.to_string()))?;
    }
    Ok(())
}

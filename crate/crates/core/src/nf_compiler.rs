//! Compilation of decision tables into normal-form formulas over the
//! knowledge lattice: a join of clauses, each clause a meet of unary words
//! applied to single variables.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    standard_registry, synthesize_permutation, AlgebraError, GeneratorWord, OpRegistry, OpTable, Permutation,
};
use crate::lattice::{knowledge_lattice, Decision};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("a decision table needs at least one input column")]
    NoInputs,
    #[error("invalid variable name `{0}`")]
    BadName(String),
    #[error("variable `{0}` appears twice")]
    DuplicateVariable(String),
    #[error("row has {found} inputs but the table has {expected} columns")]
    ArityMismatch { expected: usize, found: usize },
    #[error("duplicate row for inputs ({0})")]
    DuplicateRow(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("assignment has {found} values but the formula reads variable {index}")]
    Arity { index: usize, found: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Checks that `name` is a plain identifier: ASCII letters, digits, `_`,
/// `-` or `.`, not starting with a digit.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn tokens(inputs: &[Decision]) -> String {
    inputs.iter().map(|d| d.token()).collect::<Vec<_>>().join(",")
}

/// A partial map from input tuples to decisions; absent inputs map to ⊥.
///
/// Rows whose output is ⊥ carry no information and are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTable {
    variables: Vec<String>,
    output: String,
    rows: BTreeMap<Vec<Decision>, Decision>,
}

impl DecisionTable {
    pub fn new(variables: Vec<String>, output: impl Into<String>) -> Result<Self, TableError> {
        let output = output.into();
        if variables.is_empty() {
            return Err(TableError::NoInputs);
        }
        let mut seen = HashSet::new();
        for v in variables.iter().chain(std::iter::once(&output)) {
            if !is_identifier(v) {
                return Err(TableError::BadName(v.clone()));
            }
        }
        for v in &variables {
            if !seen.insert(v.as_str()) {
                return Err(TableError::DuplicateVariable(v.clone()));
            }
        }
        Ok(DecisionTable {
            variables,
            output,
            rows: BTreeMap::new(),
        })
    }

    /// Builds a table from explicit rows, rejecting repeated inputs even when
    /// one of them maps to ⊥.
    pub fn from_rows(
        variables: Vec<String>,
        output: impl Into<String>,
        rows: impl IntoIterator<Item = (Vec<Decision>, Decision)>,
    ) -> Result<Self, TableError> {
        let mut table = DecisionTable::new(variables, output)?;
        let mut seen = HashSet::new();
        for (inputs, out) in rows {
            table.check_arity(&inputs)?;
            if !seen.insert(inputs.clone()) {
                return Err(TableError::DuplicateRow(tokens(&inputs)));
            }
            table.insert(inputs, out)?;
        }
        Ok(table)
    }

    /// The table of a binary operator, with inputs named `x` and `y`.
    pub fn from_binary_op(op: &OpTable) -> Result<Self, TableError> {
        let mut table = DecisionTable::new(vec!["x".into(), "y".into()], op.name().to_string())
            .or_else(|_| DecisionTable::new(vec!["x".into(), "y".into()], "out"))?;
        for x in Decision::ALL {
            for y in Decision::ALL {
                table.insert(vec![x, y], op.d2(x, y))?;
            }
        }
        Ok(table)
    }

    fn check_arity(&self, inputs: &[Decision]) -> Result<(), TableError> {
        if inputs.len() != self.arity() {
            return Err(TableError::ArityMismatch {
                expected: self.arity(),
                found: inputs.len(),
            });
        }
        Ok(())
    }

    /// Adds a row. A ⊥ output is accepted and dropped.
    pub fn insert(&mut self, inputs: Vec<Decision>, output: Decision) -> Result<(), TableError> {
        self.check_arity(&inputs)?;
        if self.rows.contains_key(&inputs) {
            return Err(TableError::DuplicateRow(tokens(&inputs)));
        }
        if output != Decision::Bottom {
            self.rows.insert(inputs, output);
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn output_name(&self) -> &str {
        &self.output
    }

    pub fn lookup(&self, inputs: &[Decision]) -> Decision {
        self.rows.get(inputs).copied().unwrap_or(Decision::Bottom)
    }

    /// Non-⊥ rows in canonical order.
    pub fn rows(&self) -> impl Iterator<Item = (&[Decision], Decision)> {
        self.rows.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Every input tuple of length `n`, in canonical order.
pub fn all_inputs(n: usize) -> impl Iterator<Item = Vec<Decision>> {
    (0..4usize.pow(n as u32)).map(move |mut idx| {
        let mut v = vec![Decision::Bottom; n];
        for slot in v.iter_mut().rev() {
            *slot = Decision::ALL[idx % 4];
            idx /= 4;
        }
        v
    })
}

/// An expression over variables `x0, x1, …` in the knowledge lattice.
///
/// `Meet([])` is ⊤ and `Join([])` is ⊥.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(usize),
    Const(Decision),
    Apply(GeneratorWord, Box<Formula>),
    Meet(Vec<Formula>),
    Join(Vec<Formula>),
}

impl Formula {
    /// The constant ⊥ in canonical form.
    pub fn bottom() -> Formula {
        Formula::Join(Vec::new())
    }

    /// One more than the largest variable index, or 0 for closed formulas.
    pub fn min_arity(&self) -> usize {
        match self {
            Formula::Var(i) => i + 1,
            Formula::Const(_) => 0,
            Formula::Apply(_, f) => f.min_arity(),
            Formula::Meet(fs) | Formula::Join(fs) => fs.iter().map(Formula::min_arity).max().unwrap_or(0),
        }
    }

    /// Clauses of a join, or the formula itself as a single clause.
    pub fn clauses(&self) -> &[Formula] {
        match self {
            Formula::Join(cs) => cs,
            other => std::slice::from_ref(other),
        }
    }

    /// Total number of variable occurrences.
    pub fn literal_count(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::Const(_) => 0,
            Formula::Apply(_, f) => f.literal_count(),
            Formula::Meet(fs) | Formula::Join(fs) => fs.iter().map(Formula::literal_count).sum(),
        }
    }

    /// Evaluates against the standard operator registry.
    pub fn eval(&self, assignment: &[Decision]) -> Result<Decision, FormulaError> {
        evaluate_formula(self, assignment, registry())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(i) => write!(f, "x{i}"),
            Formula::Const(d) => f.write_str(d.token()),
            Formula::Apply(w, x) => write!(f, "[{w}]{x}"),
            Formula::Meet(fs) | Formula::Join(fs) => {
                let (sep, empty) = if matches!(self, Formula::Meet(_)) {
                    (" ⊗ ", "top")
                } else {
                    (" ⊕ ", "bot")
                };
                if fs.is_empty() {
                    return f.write_str(empty);
                }
                f.write_str("(")?;
                for (i, c) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn registry() -> &'static OpRegistry {
    static REG: OnceLock<OpRegistry> = OnceLock::new();
    REG.get_or_init(standard_registry)
}

fn kmeet(x: Decision, y: Decision) -> Decision {
    Decision::ALL[knowledge().meet(x.index(), y.index())]
}

fn kjoin(x: Decision, y: Decision) -> Decision {
    Decision::ALL[knowledge().join(x.index(), y.index())]
}

fn knowledge() -> &'static crate::lattice::FiniteLattice {
    static K: OnceLock<crate::lattice::FiniteLattice> = OnceLock::new();
    K.get_or_init(knowledge_lattice)
}

/// Bottom-up evaluation; words apply right to left using `registry`.
pub fn evaluate_formula(
    formula: &Formula,
    assignment: &[Decision],
    registry: &OpRegistry,
) -> Result<Decision, FormulaError> {
    Ok(match formula {
        Formula::Var(i) => *assignment.get(*i).ok_or(FormulaError::Arity {
            index: *i,
            found: assignment.len(),
        })?,
        Formula::Const(d) => *d,
        Formula::Apply(w, f) => {
            let v = evaluate_formula(f, assignment, registry)?;
            Decision::ALL[w.apply(v.index(), registry)?]
        }
        Formula::Meet(fs) => {
            let mut acc = Decision::Conflict;
            for f in fs {
                acc = kmeet(acc, evaluate_formula(f, assignment, registry)?);
            }
            acc
        }
        Formula::Join(fs) => {
            let mut acc = Decision::Bottom;
            for f in fs {
                acc = kjoin(acc, evaluate_formula(f, assignment, registry)?);
            }
            acc
        }
    })
}

/// Generators used for emitted unary words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Conflation and the cycle: `conf`, `cyc`.
    #[default]
    ConfCyc,
    /// The three transpositions through ⊥: `t0`, `t1`, `ttop`.
    Transpositions,
}

impl Basis {
    pub fn generator_names(self) -> &'static [&'static str] {
        match self {
            Basis::ConfCyc => &["conf", "cyc"],
            Basis::Transpositions => &["t0", "t1", "ttop"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Basis::ConfCyc => "conf-cyc",
            Basis::Transpositions => "transpositions",
        }
    }

    pub fn generators(self) -> Vec<&'static OpTable> {
        self.generator_names()
            .iter()
            .map(|n| registry().get(n).expect("basis generators are registered"))
            .collect()
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Basis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conf-cyc" | "conf,cyc" => Ok(Basis::ConfCyc),
            "transpositions" | "t0,t1,ttop" => Ok(Basis::Transpositions),
            other => Err(format!("unknown basis `{other}` (expected conf-cyc or transpositions)")),
        }
    }
}

type WordTable = [Vec<GeneratorWord>; 16];

fn build_words(basis: Basis) -> WordTable {
    let gens = basis.generators();
    let perms = Permutation::all(4);
    std::array::from_fn(|idx| {
        let (a, j) = (idx / 4, idx % 4);
        if j == Decision::Bottom.index() {
            return Vec::new();
        }
        (0..4)
            .filter(|&z| z != a)
            .map(|z| {
                // Smallest permutation sending a to j and z to ⊥.
                let p = perms
                    .iter()
                    .find(|p| p.apply(a) == j && p.apply(z) == Decision::Bottom.index())
                    .expect("a != z and j != ⊥ leave a matching permutation");
                synthesize_permutation(p, &gens).expect("basis generates every permutation")
            })
            .collect()
    })
}

fn words(basis: Basis, a: Decision, j: Decision) -> &'static [GeneratorWord] {
    static CONF_CYC: OnceLock<WordTable> = OnceLock::new();
    static TRANSPOSITIONS: OnceLock<WordTable> = OnceLock::new();
    let cell = match basis {
        Basis::ConfCyc => &CONF_CYC,
        Basis::Transpositions => &TRANSPOSITIONS,
    };
    &cell.get_or_init(|| build_words(basis))[a.index() * 4 + j.index()]
}

fn selection_literals(basis: Basis, a: Decision, j: Decision, var: usize) -> Vec<Formula> {
    words(basis, a, j)
        .iter()
        .map(|w| Formula::Apply(w.clone(), Box::new(Formula::Var(var))))
        .collect()
}

/// A one-variable formula (over `x0`) computing σ_a^j.
///
/// For j ≠ ⊥ this is the meet of three permutation words π with π(a) = j
/// and π(z) = ⊥ for each z ≠ a; σ_a^⊥ is the constant ⊥.
pub fn unary_selection_word(a: Decision, j: Decision, basis: Basis) -> Formula {
    if j == Decision::Bottom {
        return Formula::bottom();
    }
    Formula::Meet(selection_literals(basis, a, j, 0))
}

/// Compiles a table into a join with one clause per non-⊥ row, in
/// canonical row order.
pub fn compile(table: &DecisionTable, basis: Basis) -> Formula {
    Formula::Join(
        table
            .rows()
            .map(|(inputs, j)| {
                Formula::Meet(
                    inputs
                        .iter()
                        .enumerate()
                        .flat_map(|(i, &a)| selection_literals(basis, a, j, i))
                        .collect(),
                )
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    BinaryUnderUnary,
    JoinUnderMeet,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::BinaryUnderUnary => "binary under unary",
            ViolationKind::JoinUnderMeet => "join under meet",
        })
    }
}

/// The first normal-form violation found, in pre-order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {path}")]
pub struct NormalFormViolation {
    pub kind: ViolationKind,
    /// Child indices from the root, e.g. `root.2.0`.
    pub path: String,
}

/// Checks that no meet or join sits under a unary word and no join sits
/// under a meet.
pub fn validate_normal_form(formula: &Formula) -> Result<(), NormalFormViolation> {
    fn walk(f: &Formula, path: &mut Vec<usize>, under_unary: bool, under_meet: bool) -> Result<(), NormalFormViolation> {
        let fail = |kind, path: &[usize]| {
            let mut p = String::from("root");
            for i in path {
                p.push_str(&format!(".{i}"));
            }
            Err(NormalFormViolation { kind, path: p })
        };
        match f {
            Formula::Var(_) | Formula::Const(_) => Ok(()),
            Formula::Apply(_, c) => {
                path.push(0);
                walk(c, path, true, under_meet)?;
                path.pop();
                Ok(())
            }
            Formula::Meet(cs) | Formula::Join(cs) => {
                let is_join = matches!(f, Formula::Join(_));
                if under_unary {
                    return fail(ViolationKind::BinaryUnderUnary, path);
                }
                if is_join && under_meet {
                    return fail(ViolationKind::JoinUnderMeet, path);
                }
                for (i, c) in cs.iter().enumerate() {
                    path.push(i);
                    walk(c, path, false, under_meet || !is_join)?;
                    path.pop();
                }
                Ok(())
            }
        }
    }
    walk(formula, &mut Vec::new(), false, false)
}

/// Drops join clauses that are ⊥ on every input and repeated clauses.
pub fn prune(formula: &Formula) -> Formula {
    let Formula::Join(clauses) = formula else {
        return formula.clone();
    };
    let n = formula.min_arity();
    let mut seen = HashSet::new();
    let kept = clauses
        .iter()
        .filter(|c| {
            all_inputs(n).any(|x| c.eval(&x).map(|v| v != Decision::Bottom).unwrap_or(true))
        })
        .filter(|c| seen.insert((*c).clone()))
        .cloned()
        .collect();
    Formula::Join(kept)
}

/// The first input where `formula` and `table` disagree, with both values.
pub fn first_mismatch(
    formula: &Formula,
    table: &DecisionTable,
) -> Result<Option<(Vec<Decision>, Decision, Decision)>, FormulaError> {
    for x in all_inputs(table.arity()) {
        let got = formula.eval(&x)?;
        let want = table.lookup(&x);
        if got != want {
            return Ok(Some((x, got, want)));
        }
    }
    Ok(None)
}

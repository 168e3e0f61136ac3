//! Selection operators and the three completeness checks: canonical
//! suitability, functional completeness and canonical completeness.
//!
//! All checks are closure computations over explicit tables. Unary
//! functions over at most eight values are packed into a `u32`, one nibble
//! per input, so closures of a few thousand functions stay cheap.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{synthesize_permutation, AlgebraError, GeneratorWord, OpRegistry, OpTable, Permutation};
use crate::lattice::{Chain, FiniteLattice, LatticeError};

/// Largest value set the closure machinery handles.
pub const MAX_VALUES: usize = 8;

/// Default cap on the binary-operator nesting depth explored when searching
/// for meet and join formulas.
pub const DEFAULT_SUITABILITY_DEPTH: usize = 6;

/// Default cap on the number of distinct binary functions kept during the
/// suitability search.
pub const DEFAULT_SUITABILITY_LIMIT: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletenessError {
    #[error("value {0} is outside the lattice")]
    OutOfRange(usize),
    #[error("value sets larger than {MAX_VALUES} are not supported (got {0})")]
    TooLarge(usize),
    #[error("operator `{name}` is over {found} values but the lattice has {expected}")]
    Domain {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn pack(values: impl IntoIterator<Item = usize>) -> u32 {
    values
        .into_iter()
        .enumerate()
        .fold(0, |acc, (i, v)| acc | ((v as u32) << (4 * i)))
}

fn at(code: u32, i: usize) -> usize {
    ((code >> (4 * i)) & 0xF) as usize
}

fn unpack(code: u32, n: usize) -> Vec<usize> {
    (0..n).map(|i| at(code, i)).collect()
}

fn map_unary(table: &[usize], f: u32, n: usize) -> u32 {
    pack((0..n).map(|i| table[at(f, i)]))
}

fn pointwise(table: &[usize], f: u32, g: u32, n: usize) -> u32 {
    pack((0..n).map(|i| table[at(f, i) * n + at(g, i)]))
}

fn check_size(n: usize) -> Result<(), CompletenessError> {
    if n > MAX_VALUES {
        return Err(CompletenessError::TooLarge(n));
    }
    Ok(())
}

fn check_domain(op: &OpTable, n: usize) -> Result<(), CompletenessError> {
    if op.size() != n {
        return Err(CompletenessError::Domain {
            name: op.name().to_string(),
            expected: n,
            found: op.size(),
        });
    }
    Ok(())
}

fn flat(table: &[Vec<usize>]) -> Vec<usize> {
    table.iter().flatten().copied().collect()
}

/// The selection operator σ_a^j: maps the anchor tuple `a` to `j` and
/// every other input to the lattice bottom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelectionOp {
    anchor: Vec<usize>,
    output: usize,
    bottom: usize,
    size: usize,
}

impl SelectionOp {
    pub fn anchor(&self) -> &[usize] {
        &self.anchor
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn arity(&self) -> usize {
        self.anchor.len()
    }

    pub fn eval(&self, input: &[usize]) -> usize {
        if input == self.anchor.as_slice() {
            self.output
        } else {
            self.bottom
        }
    }

    /// Full table in row-major order over `size^arity` inputs.
    pub fn table(&self) -> Vec<usize> {
        let n = self.arity();
        let count = self.size.pow(n as u32);
        let mut input = vec![0; n];
        (0..count)
            .map(|mut idx| {
                for slot in input.iter_mut().rev() {
                    *slot = idx % self.size;
                    idx /= self.size;
                }
                self.eval(&input)
            })
            .collect()
    }

    /// Renders the operator as `σ_<anchor>^<output>` with lattice labels.
    pub fn describe(&self, lattice: &FiniteLattice) -> String {
        let anchor: Vec<&str> = self.anchor.iter().map(|&a| lattice.label(a)).collect();
        let anchor = if anchor.len() == 1 {
            anchor[0].to_string()
        } else {
            format!("({})", anchor.join(","))
        };
        format!("σ_{}^{}", anchor, lattice.label(self.output))
    }
}

/// Builds σ_a^j over `lattice`.
pub fn selection_op(
    anchor: &[usize],
    output: usize,
    lattice: &FiniteLattice,
) -> Result<SelectionOp, CompletenessError> {
    let n = lattice.size();
    if let Some(&bad) = anchor.iter().chain(std::iter::once(&output)).find(|&&v| v >= n) {
        return Err(CompletenessError::OutOfRange(bad));
    }
    Ok(SelectionOp {
        anchor: anchor.to_vec(),
        output,
        bottom: lattice.bottom(),
        size: n,
    })
}

/// Every distinct unary selection operator over the lattice. The
/// constant-bottom operator σ_a^bottom appears once, anchored at bottom.
pub fn unary_selection_ops(lattice: &FiniteLattice) -> Vec<SelectionOp> {
    let n = lattice.size();
    let bottom = lattice.bottom();
    let mut out = vec![selection_op(&[bottom], bottom, lattice).expect("in range")];
    for a in 0..n {
        for j in 0..n {
            if j != bottom {
                out.push(selection_op(&[a], j, lattice).expect("in range"));
            }
        }
    }
    out
}

/// A set of unary functions over `size` values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryFunctionSpace {
    size: usize,
    members: HashSet<u32>,
}

impl UnaryFunctionSpace {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `size^size`, the number of functions from the value set to itself.
    pub fn total(&self) -> usize {
        self.size.pow(self.size as u32)
    }

    pub fn is_total(&self) -> bool {
        self.len() == self.total()
    }

    pub fn contains(&self, table: &[usize]) -> bool {
        table.len() == self.size && table.iter().all(|&v| v < self.size) && self.members.contains(&pack(table.iter().copied()))
    }

    pub fn contains_selection(&self, op: &SelectionOp) -> bool {
        op.arity() == 1 && self.contains(&op.table())
    }

    /// All member tables, sorted.
    pub fn functions(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self.members.iter().map(|&c| unpack(c, self.size)).collect();
        v.sort();
        v
    }

    /// `true` when every member of `self` is in `other`.
    pub fn is_subset(&self, other: &UnaryFunctionSpace) -> bool {
        self.size == other.size && self.members.is_subset(&other.members)
    }

    /// Inputs on which every member agrees, paired with the shared output.
    pub fn invariants(&self) -> Vec<Invariant> {
        (0..self.size)
            .filter_map(|i| {
                let mut outs = self.members.iter().map(|&f| at(f, i));
                let first = outs.next()?;
                outs.all(|o| o == first).then_some(Invariant { input: i, output: first })
            })
            .collect()
    }
}

/// A property shared by every function in a closure: `f(input) = output`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Invariant {
    pub input: usize,
    pub output: usize,
}

impl Invariant {
    pub fn describe(&self, lattice: &FiniteLattice) -> String {
        format!("f({})={}", lattice.label(self.input), lattice.label(self.output))
    }
}

fn closure_under_unary(seeds: Vec<u32>, unary: &[&OpTable], n: usize) -> HashSet<u32> {
    let mut seen: HashSet<u32> = seeds.iter().copied().collect();
    let mut work = seeds;
    while let Some(f) = work.pop() {
        for op in unary {
            let g = map_unary(op.table(), f, n);
            if seen.insert(g) {
                work.push(g);
            }
        }
    }
    seen
}

/// Closure of `base` under an associative, commutative pointwise operator:
/// every finite combination of base elements.
fn closure_under_semilattice(base: &HashSet<u32>, table: &[usize], n: usize) -> HashSet<u32> {
    let base_list: Vec<u32> = base.iter().copied().collect();
    let mut seen = base.clone();
    let mut work = base_list.clone();
    while let Some(f) = work.pop() {
        for &b in &base_list {
            let g = pointwise(table, f, b, n);
            if seen.insert(g) {
                work.push(g);
            }
        }
    }
    seen
}

fn unary_ops_checked<'a>(ops: &[&'a OpTable], n: usize) -> Result<Vec<&'a OpTable>, CompletenessError> {
    let mut out = Vec::new();
    for op in ops {
        check_domain(op, n)?;
        if op.arity() != 1 {
            return Err(AlgebraError::Arity {
                name: op.name().to_string(),
                expected: 1,
                found: op.arity(),
            }
            .into());
        }
        out.push(*op);
    }
    Ok(out)
}

/// The identity and the given unary operators, closed under composition.
pub fn unary_closure(unary_ops: &[&OpTable], size: usize) -> Result<UnaryFunctionSpace, CompletenessError> {
    check_size(size)?;
    let ops = unary_ops_checked(unary_ops, size)?;
    let identity = pack(0..size);
    Ok(UnaryFunctionSpace {
        size,
        members: closure_under_unary(vec![identity], &ops, size),
    })
}

/// Every unary function expressible in normal form: joins of meets of
/// composed unary operators applied to one variable.
pub fn normal_form_unary_space(
    unary_ops: &[&OpTable],
    lattice: &FiniteLattice,
) -> Result<UnaryFunctionSpace, CompletenessError> {
    let n = lattice.size();
    let words = unary_closure(unary_ops, n)?;
    let meets = closure_under_semilattice(&words.members, &flat(lattice.meet_table()), n);
    let joins = closure_under_semilattice(&meets, &flat(lattice.join_table()), n);
    Ok(UnaryFunctionSpace { size: n, members: joins })
}

/// Every unary function expressible by any formula in one variable over
/// `ops` (constants, unary and binary operators applied pointwise).
pub fn expressible_unary_functions(
    ops: &OpRegistry,
    lattice: &FiniteLattice,
) -> Result<UnaryFunctionSpace, CompletenessError> {
    let n = lattice.size();
    check_size(n)?;
    let mut unary = Vec::new();
    let mut binary = Vec::new();
    let mut seeds = vec![pack(0..n)];
    for op in ops.iter() {
        check_domain(op, n)?;
        match op.arity() {
            0 => seeds.push(pack(std::iter::repeat_n(op.value(), n))),
            1 => unary.push(op),
            _ => binary.push(op),
        }
    }
    let mut seen: HashSet<u32> = HashSet::new();
    let mut all: Vec<u32> = Vec::new();
    for s in seeds {
        if seen.insert(s) {
            all.push(s);
        }
    }
    let mut i = 0;
    while i < all.len() {
        let f = all[i];
        let mut fresh = Vec::new();
        for op in &unary {
            fresh.push(map_unary(op.table(), f, n));
        }
        for op in &binary {
            for &g in &all[..=i] {
                fresh.push(pointwise(op.table(), f, g, n));
                fresh.push(pointwise(op.table(), g, f, n));
            }
        }
        for g in fresh {
            if seen.insert(g) {
                all.push(g);
            }
        }
        i += 1;
    }
    Ok(UnaryFunctionSpace { size: n, members: seen })
}

/// A formula over two variables `x`, `y`, used as a suitability witness.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Const(String),
    Unary(String, Box<Term>),
    Binary(String, Box<Term>, Box<Term>),
}

impl Term {
    /// Evaluates the term with the given variable assignment.
    pub fn eval(&self, registry: &OpRegistry, vars: &[usize]) -> Result<usize, AlgebraError> {
        Ok(match self {
            Term::Var(i) => vars[*i],
            Term::Const(name) => registry.require_arity(name, 0)?.value(),
            Term::Unary(name, t) => registry.require_arity(name, 1)?.apply1(t.eval(registry, vars)?),
            Term::Binary(name, a, b) => registry
                .require_arity(name, 2)?
                .apply2(a.eval(registry, vars)?, b.eval(registry, vars)?),
        })
    }

    /// Binary-operator nesting depth.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Unary(_, t) => t.depth(),
            Term::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(0) => f.write_str("x"),
            Term::Var(1) => f.write_str("y"),
            Term::Var(i) => write!(f, "x{i}"),
            Term::Const(c) => f.write_str(c),
            Term::Unary(op, t) => write!(f, "({op} {t})"),
            Term::Binary(op, a, b) => write!(f, "({op} {a} {b})"),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Outcome of the search for meet and join formulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuitabilityReport {
    pub suitable: bool,
    pub meet: Option<Term>,
    pub join: Option<Term>,
    /// Binary nesting depth reached when the search stopped.
    pub explored_depth: usize,
    pub depth_limit: usize,
    pub functions_explored: usize,
    /// `true` when the search exhausted every expressible binary function.
    pub saturated: bool,
}

/// Searches formulas over `ops` for ones computing the lattice meet and
/// join, up to `max_depth` nested binary operators with unary operators
/// applied freely in between.
pub fn check_canonical_suitability_with(
    ops: &OpRegistry,
    lattice: &FiniteLattice,
    max_depth: usize,
    max_functions: usize,
) -> Result<SuitabilityReport, CompletenessError> {
    let n = lattice.size();
    check_size(n)?;
    for op in ops.iter() {
        check_domain(op, n)?;
    }
    let meet_target: Vec<u8> = flat(lattice.meet_table()).iter().map(|&v| v as u8).collect();
    let join_target: Vec<u8> = flat(lattice.join_table()).iter().map(|&v| v as u8).collect();

    let mut known: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut tables: Vec<Vec<u8>> = Vec::new();
    let mut terms: Vec<Term> = Vec::new();
    let add = |table: Vec<u8>, term: Term, known: &mut HashMap<Vec<u8>, usize>, tables: &mut Vec<Vec<u8>>, terms: &mut Vec<Term>| -> bool {
        if known.contains_key(&table) {
            return false;
        }
        known.insert(table.clone(), tables.len());
        tables.push(table);
        terms.push(term);
        true
    };
    let proj = |k: usize| -> Vec<u8> {
        (0..n * n)
            .map(|idx| if k == 0 { (idx / n) as u8 } else { (idx % n) as u8 })
            .collect()
    };
    add(proj(0), Term::Var(0), &mut known, &mut tables, &mut terms);
    add(proj(1), Term::Var(1), &mut known, &mut tables, &mut terms);
    for c in ops.with_arity(0) {
        add(vec![c.value() as u8; n * n], Term::Const(c.name().to_string()), &mut known, &mut tables, &mut terms);
    }
    let unary: Vec<&OpTable> = ops.with_arity(1).collect();
    let binary: Vec<&OpTable> = ops.with_arity(2).collect();

    // Applies unary operators to entries from `start` until no new table
    // appears.
    let close_unary = |start: usize, known: &mut HashMap<Vec<u8>, usize>, tables: &mut Vec<Vec<u8>>, terms: &mut Vec<Term>| {
        let mut i = start;
        while i < tables.len() {
            for op in &unary {
                let t: Vec<u8> = tables[i].iter().map(|&v| op.apply1(v as usize) as u8).collect();
                if !known.contains_key(&t) {
                    let term = Term::Unary(op.name().to_string(), Box::new(terms[i].clone()));
                    known.insert(t.clone(), tables.len());
                    tables.push(t);
                    terms.push(term);
                }
            }
            i += 1;
        }
    };
    close_unary(0, &mut known, &mut tables, &mut terms);

    let report = |known: &HashMap<Vec<u8>, usize>, terms: &[Term], depth: usize, saturated: bool| {
        let meet = known.get(&meet_target).map(|&i| terms[i].clone());
        let join = known.get(&join_target).map(|&i| terms[i].clone());
        SuitabilityReport {
            suitable: meet.is_some() && join.is_some(),
            meet,
            join,
            explored_depth: depth,
            depth_limit: max_depth,
            functions_explored: terms.len(),
            saturated,
        }
    };

    let found = |known: &HashMap<Vec<u8>, usize>| known.contains_key(&meet_target) && known.contains_key(&join_target);
    if found(&known) {
        return Ok(report(&known, &terms, 0, false));
    }
    let mut prev_len = 0;
    for depth in 1..=max_depth {
        let level_len = tables.len();
        'outer: for op in &binary {
            for i in 0..level_len {
                // Only pairs with at least one member new since the last level.
                let j_start = if i >= prev_len { 0 } else { prev_len };
                for j in j_start..level_len {
                    let t: Vec<u8> = tables[i]
                        .iter()
                        .zip(&tables[j])
                        .map(|(&a, &b)| op.apply2(a as usize, b as usize) as u8)
                        .collect();
                    if !known.contains_key(&t) {
                        let term = Term::Binary(
                            op.name().to_string(),
                            Box::new(terms[i].clone()),
                            Box::new(terms[j].clone()),
                        );
                        add(t, term, &mut known, &mut tables, &mut terms);
                        if tables.len() >= max_functions {
                            break 'outer;
                        }
                    }
                }
            }
        }
        let added = tables.len() > level_len;
        close_unary(level_len, &mut known, &mut tables, &mut terms);
        if found(&known) {
            return Ok(report(&known, &terms, depth, false));
        }
        if !added {
            return Ok(report(&known, &terms, depth, true));
        }
        if tables.len() >= max_functions {
            return Ok(report(&known, &terms, depth, false));
        }
        prev_len = level_len;
    }
    Ok(report(&known, &terms, max_depth, false))
}

/// [`check_canonical_suitability_with`] using the default depth and size
/// limits.
pub fn check_canonical_suitability(
    ops: &OpRegistry,
    lattice: &FiniteLattice,
) -> Result<SuitabilityReport, CompletenessError> {
    check_canonical_suitability_with(ops, lattice, DEFAULT_SUITABILITY_DEPTH, DEFAULT_SUITABILITY_LIMIT)
}

/// Verdict on which unary selection operators a function space contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectionCoverage {
    pub complete: bool,
    pub reachable: usize,
    pub total: usize,
    /// Missing selection operators, e.g. `σ_bot^0`.
    pub missing: Vec<String>,
    /// Properties shared by every reachable function, e.g. `f(bot)=bot`.
    pub invariants: Vec<String>,
    #[serde(skip)]
    pub invariant_values: Vec<Invariant>,
}

fn coverage(space: &UnaryFunctionSpace, lattice: &FiniteLattice) -> SelectionCoverage {
    let missing: Vec<String> = unary_selection_ops(lattice)
        .iter()
        .filter(|s| !space.contains_selection(s))
        .map(|s| s.describe(lattice))
        .collect();
    let invariant_values = if missing.is_empty() { Vec::new() } else { space.invariants() };
    SelectionCoverage {
        complete: missing.is_empty(),
        reachable: space.len(),
        total: space.total(),
        missing,
        invariants: invariant_values.iter().map(|i| i.describe(lattice)).collect(),
        invariant_values,
    }
}

/// Tests every unary selection operator for membership in the normal-form
/// space generated by `unary_ops`, with ⋏ and ⋎ the lattice meet and join.
pub fn check_canonical_completeness(
    unary_ops: &[&OpTable],
    lattice: &FiniteLattice,
) -> Result<SelectionCoverage, CompletenessError> {
    Ok(coverage(&normal_form_unary_space(unary_ops, lattice)?, lattice))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionalReport {
    /// Every unary selection operator is expressible and the meet and join
    /// are expressible.
    pub complete: bool,
    pub suitable: bool,
    pub selection: SelectionCoverage,
}

/// Decides functional completeness through the unary selection operators:
/// each must be expressible by some formula in one variable, and the
/// lattice meet and join must be expressible to combine them.
pub fn check_functional_completeness(
    ops: &OpRegistry,
    lattice: &FiniteLattice,
) -> Result<FunctionalReport, CompletenessError> {
    let suitability = check_canonical_suitability(ops, lattice)?;
    let selection = coverage(&expressible_unary_functions(ops, lattice)?, lattice);
    Ok(FunctionalReport {
        complete: suitability.suitable && selection.complete,
        suitable: suitability.suitable,
        selection,
    })
}

/// Suitability, functional completeness and canonical completeness of one
/// operator set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletenessReport {
    pub lattice: String,
    pub operators: Vec<String>,
    pub suitability: SuitabilityReport,
    pub functionally_complete: bool,
    pub functional: SelectionCoverage,
    /// Suitable, and every unary selection operator has a normal form.
    pub canonically_complete: bool,
    pub canonical: SelectionCoverage,
}

pub fn analyze(ops: &OpRegistry, lattice: &FiniteLattice) -> Result<CompletenessReport, CompletenessError> {
    let suitability = check_canonical_suitability(ops, lattice)?;
    let functional = coverage(&expressible_unary_functions(ops, lattice)?, lattice);
    let unary: Vec<&OpTable> = ops.with_arity(1).collect();
    let canonical = check_canonical_completeness(&unary, lattice)?;
    Ok(CompletenessReport {
        lattice: lattice.name().to_string(),
        operators: ops.names().map(str::to_string).collect(),
        functionally_complete: suitability.suitable && functional.complete,
        canonically_complete: suitability.suitable && canonical.complete,
        suitability,
        functional,
        canonical,
    })
}

impl fmt::Display for CompletenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yes_no = |b: bool| if b { "yes" } else { "NO" };
        writeln!(f, "lattice: {}", self.lattice)?;
        writeln!(f, "operators: {}", self.operators.join(","))?;
        let s = &self.suitability;
        match (&s.meet, &s.join) {
            (Some(m), Some(j)) => writeln!(f, "canonically suitable: yes (meet: {m}; join: {j})")?,
            _ => {
                let why = if s.saturated {
                    format!("closure saturated after {} binary functions", s.functions_explored)
                } else {
                    format!(
                        "not found within depth {} ({} binary functions explored)",
                        s.explored_depth, s.functions_explored
                    )
                };
                let mut missing = Vec::new();
                if s.meet.is_none() {
                    missing.push("meet");
                }
                if s.join.is_none() {
                    missing.push("join");
                }
                writeln!(f, "canonically suitable: NO (no formula for {}; {why})", missing.join(" or "))?;
            }
        }
        let detail = |c: &SelectionCoverage| -> String {
            let mut parts = Vec::new();
            if !c.invariants.is_empty() {
                parts.push(format!("all reachable unary functions satisfy {}", c.invariants.join(", ")));
            }
            if !c.missing.is_empty() {
                parts.push(format!("missing {}", c.missing.join(", ")));
            }
            parts.join("; ")
        };
        write!(f, "functionally complete: {}", yes_no(self.functionally_complete))?;
        if !self.functional.complete {
            write!(f, " ({})", detail(&self.functional))?;
        } else if !self.functionally_complete {
            write!(f, " (meet/join not expressible)")?;
        }
        writeln!(f)?;
        write!(f, "canonically complete: {}", yes_no(self.canonically_complete))?;
        if !self.canonical.complete {
            write!(f, " ({})", detail(&self.canonical))?;
        } else if !self.canonically_complete {
            write!(f, " (not canonically suitable)")?;
        }
        writeln!(f)
    }
}

/// Generators for the m-valued chain: the transposition `dagger` = (1 m),
/// the cycle `cyc` = (1 2 … m), the meet `tand` = min, and the order flip
/// `flip` (i ↦ m − i + 1) with its synthesized word over `dagger`, `cyc`.
#[derive(Debug, Clone)]
pub struct ChainGenerators {
    pub ops: OpRegistry,
    pub flip_word: GeneratorWord,
}

pub fn totally_ordered_generators(m: usize) -> Result<ChainGenerators, CompletenessError> {
    let chain = Chain::new(m)?;
    let lattice = chain.lattice();
    let dagger = Permutation::transposition(m, 0, m - 1)?.to_op("dagger");
    let cyc = Permutation::full_cycle(m).to_op("cyc");
    let tand = OpTable::binary("tand", m, flat(lattice.meet_table()))?;
    let flip_target = Permutation::from_images((0..m).rev().collect())?;
    let flip_word = synthesize_permutation(&flip_target, &[&dagger, &cyc])?;
    let flip = flip_target.to_op("flip");
    let ops = OpRegistry::from_ops(m, [dagger, cyc, tand, flip])?;
    Ok(ChainGenerators { ops, flip_word })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{belnap_ops, jobe_ops, new_unary_ops};
    use crate::lattice::{chain_lattice, jobe_lattice, knowledge_lattice, Decision};
    use Decision::*;

    fn d(x: Decision) -> usize {
        x.index()
    }

    #[test]
    fn selection_examples() {
        let k = knowledge_lattice();
        let s = selection_op(&[d(Deny)], d(Deny), &k).unwrap();
        assert_eq!(s.eval(&[d(Deny)]), d(Deny));
        assert_eq!(s.eval(&[d(Allow)]), d(Bottom));
        let s = selection_op(&[d(Allow), d(Conflict)], d(Deny), &k).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let expect = if (x, y) == (d(Allow), d(Conflict)) { d(Deny) } else { d(Bottom) };
                assert_eq!(s.eval(&[x, y]), expect);
            }
        }
        assert_eq!(s.describe(&k), "σ_(1,top)^0");
        // chain {0,1,2,3}: bottom is the first element
        let c = chain_lattice(4).unwrap();
        let s = selection_op(&[0, 2], 1, &c).unwrap();
        assert_eq!(s.eval(&[0, 2]), 1);
        assert_eq!(s.eval(&[1, 1]), 0);
        assert_eq!(selection_op(&[7], 0, &k), Err(CompletenessError::OutOfRange(7)));
    }

    #[test]
    fn selection_bottom_is_constant() {
        let k = knowledge_lattice();
        for a in 0..4 {
            let s = selection_op(&[a], d(Bottom), &k).unwrap();
            assert!(s.table().iter().all(|&v| v == d(Bottom)));
        }
        assert_eq!(unary_selection_ops(&k).len(), 13);
    }

    #[test]
    fn closures() {
        let reg = new_unary_ops();
        let ops = |names: &[&str]| -> Vec<&OpTable> { names.iter().map(|n| reg.get(n).unwrap()).collect() };
        assert_eq!(unary_closure(&ops(&["t0", "t1", "ttop"]), 4).unwrap().len(), 24);
        let not = unary_closure(&ops(&["not"]), 4).unwrap();
        assert_eq!(not.functions(), vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
        assert_eq!(unary_closure(&ops(&["conf"]), 4).unwrap().len(), 2);
    }

    #[test]
    fn normal_form_spaces() {
        let reg = new_unary_ops();
        let k = knowledge_lattice();
        let not = normal_form_unary_space(&[reg.get("not").unwrap()], &k).unwrap();
        assert!(not.functions().iter().all(|f| f[d(Bottom)] == d(Bottom)));
        let s = selection_op(&[d(Bottom)], d(Deny), &k).unwrap();
        assert!(!not.contains_selection(&s));

        let full = normal_form_unary_space(
            &[reg.get("t0").unwrap(), reg.get("t1").unwrap(), reg.get("ttop").unwrap()],
            &k,
        )
        .unwrap();
        assert!(full.is_total());
        assert_eq!(full.len(), 256);

        let j = jobe_ops();
        let jl = jobe_lattice();
        let space = normal_form_unary_space(&[j.get("j1").unwrap(), j.get("j2").unwrap()], &jl).unwrap();
        assert_eq!(space.len(), 27);
    }

    #[test]
    fn canonical_completeness_reports() {
        let reg = new_unary_ops();
        let k = knowledge_lattice();
        let r = check_canonical_completeness(&[reg.get("not").unwrap()], &k).unwrap();
        assert!(!r.complete);
        for m in ["σ_bot^0", "σ_bot^1", "σ_bot^top"] {
            assert!(r.missing.iter().any(|x| x == m), "{m} missing from {:?}", r.missing);
        }
        assert!(r.invariants.contains(&"f(bot)=bot".to_string()));
        let r = check_canonical_completeness(&[reg.get("ttop").unwrap(), reg.get("cyc").unwrap()], &k).unwrap();
        assert!(r.complete);
        assert!(r.invariants.is_empty());
    }

    #[test]
    fn suitability_examples() {
        let k = knowledge_lattice();
        let reg = crate::algebra::standard_registry();
        let ops = reg.subset(&["conf", "kand"]).unwrap();
        let r = check_canonical_suitability(&ops, &k).unwrap();
        assert!(r.suitable);
        let join = r.join.unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(join.eval(&ops, &[x, y]).unwrap(), k.join(x, y));
            }
        }
        assert_eq!(join.to_string(), "(conf (kand (conf x) (conf y)))");

        let ops = reg.subset(&["kand"]).unwrap();
        let r = check_canonical_suitability(&ops, &k).unwrap();
        assert!(!r.suitable);
        assert!(r.saturated);
        assert!(r.meet.is_some() && r.join.is_none());

        let j = jobe_ops();
        let r = check_canonical_suitability(&j, &jobe_lattice()).unwrap();
        assert!(r.suitable);
        assert_eq!(r.join.unwrap().to_string(), "(j2 (jand (j2 x) (j2 y)))");
    }

    #[test]
    fn functional_examples() {
        let k = knowledge_lattice();
        let reg = crate::algebra::standard_registry();
        let r = check_functional_completeness(&reg.subset(&["conf", "kand"]).unwrap(), &k).unwrap();
        assert!(!r.complete);
        assert!(r.selection.invariants.contains(&"f(0)=0".to_string()));
        let r = check_functional_completeness(&reg.subset(&["t0", "t1", "ttop", "kand", "kor"]).unwrap(), &k).unwrap();
        assert!(r.complete);
        let r = check_functional_completeness(&belnap_ops(), &k).unwrap();
        assert!(r.complete);
    }

    #[test]
    fn chain_generators() {
        let g = totally_ordered_generators(4).unwrap();
        let dagger = g.ops.get("dagger").unwrap();
        assert_eq!(dagger.apply1(0), 3);
        assert_eq!(dagger.apply1(1), 1);
        let flip = g.ops.get("flip").unwrap();
        assert_eq!(flip.table(), &[3, 2, 1, 0]);
        let composed = crate::algebra::compose(&g.flip_word, &g.ops).unwrap();
        assert_eq!(composed.table(), flip.table());
        let tand = g.ops.get("tand").unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let v = flip.apply1(tand.apply2(flip.apply1(x), flip.apply1(y)));
                assert_eq!(v, x.max(y));
            }
        }
        let g3 = totally_ordered_generators(3).unwrap();
        assert_eq!(g3.ops.get("cyc").unwrap().apply1(2), 0);
        assert!(totally_ordered_generators(1).is_err());
    }
}

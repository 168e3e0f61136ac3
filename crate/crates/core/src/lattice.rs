//! The four-valued decision set, its two Belnap orderings, and explicit
//! finite lattices.
//!
//! Lattice elements are addressed by index into [`FiniteLattice::labels`].
//! For the four-valued lattices the index is [`Decision::index`], so the
//! canonical element order is always `[bot, 0, 1, top]`, whichever ordering
//! is in force.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An authorization decision: one of the four Belnap truth values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Decision {
    /// Not applicable (⊥).
    Bottom,
    /// Deny (0).
    Deny,
    /// Allow (1).
    Allow,
    /// Conflict (⊤).
    Conflict,
}

impl Decision {
    /// All four decisions in canonical order `[bot, 0, 1, top]`.
    pub const ALL: [Decision; 4] = [
        Decision::Bottom,
        Decision::Deny,
        Decision::Allow,
        Decision::Conflict,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Decision> {
        Self::ALL.get(i).copied()
    }

    /// The plain-text token: `bot`, `0`, `1` or `top`.
    pub const fn token(self) -> &'static str {
        match self {
            Decision::Bottom => "bot",
            Decision::Deny => "0",
            Decision::Allow => "1",
            Decision::Conflict => "top",
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            Decision::Bottom => "⊥",
            Decision::Deny => "0",
            Decision::Allow => "1",
            Decision::Conflict => "⊤",
        }
    }

    /// `true` for allow and deny.
    pub const fn is_conclusive(self) -> bool {
        matches!(self, Decision::Deny | Decision::Allow)
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown decision token `{0}` (expected bot, 0, 1 or top)")]
pub struct UnknownDecision(pub String);

impl FromStr for Decision {
    type Err = UnknownDecision;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bot" => Ok(Decision::Bottom),
            "0" => Ok(Decision::Deny),
            "1" => Ok(Decision::Allow),
            "top" => Ok(Decision::Conflict),
            other => Err(UnknownDecision(other.to_string())),
        }
    }
}

impl From<Decision> for String {
    fn from(d: Decision) -> String {
        d.token().to_string()
    }
}

impl TryFrom<String> for Decision {
    type Error = UnknownDecision;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a chain needs at least 2 elements, got {0}")]
    ChainTooShort(usize),
    #[error("lattice must have at least one element")]
    Empty,
    #[error("table dimensions do not match {0} elements")]
    Shape(usize),
    #[error("{0}")]
    Invalid(LatticeViolation),
}

/// The first lattice law found broken by [`FiniteLattice::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeViolation {
    #[error("order is not reflexive at {0}")]
    Reflexivity(String),
    #[error("order is not antisymmetric for {0} and {1}")]
    Antisymmetry(String, String),
    #[error("order is not transitive for {0} <= {1} <= {2}")]
    Transitivity(String, String, String),
    #[error("meet({0}, {1}) = {2} is not the greatest lower bound")]
    Glb(String, String, String),
    #[error("join({0}, {1}) = {2} is not the least upper bound")]
    Lub(String, String, String),
    #[error("{op} is not commutative for {a} and {b}")]
    Commutativity { op: &'static str, a: String, b: String },
    #[error("{op} is not associative for {a}, {b}, {c}")]
    Associativity {
        op: &'static str,
        a: String,
        b: String,
        c: String,
    },
    #[error("{op} is not idempotent at {0}", op = .1)]
    Idempotence(String, &'static str),
    #[error("absorption fails for {0} and {1}")]
    Absorption(String, String),
    #[error("{0} is not the minimum element")]
    Bottom(String),
    #[error("{0} is not the maximum element")]
    Top(String),
    #[error("table entry out of range")]
    OutOfRange,
}

/// A finite lattice stored as explicit order, meet and join tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    name: String,
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl FiniteLattice {
    /// Builds a lattice from a partial order, deriving meet and join.
    ///
    /// Fails if the relation is not a partial order or some pair lacks a
    /// greatest lower or least upper bound.
    pub fn from_order(
        name: impl Into<String>,
        labels: Vec<String>,
        leq: Vec<Vec<bool>>,
    ) -> Result<Self, LatticeError> {
        let n = labels.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if leq.len() != n || leq.iter().any(|row| row.len() != n) {
            return Err(LatticeError::Shape(n));
        }
        let bound = |x: usize, y: usize, lower: bool| -> Option<usize> {
            let is_bound = |z: usize| {
                if lower {
                    leq[z][x] && leq[z][y]
                } else {
                    leq[x][z] && leq[y][z]
                }
            };
            let candidates: Vec<usize> = (0..n).filter(|&z| is_bound(z)).collect();
            candidates.iter().copied().find(|&c| {
                candidates
                    .iter()
                    .all(|&z| if lower { leq[z][c] } else { leq[c][z] })
            })
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for x in 0..n {
            for y in 0..n {
                let glb = bound(x, y, true);
                let lub = bound(x, y, false);
                match (glb, lub) {
                    (Some(m), Some(j)) => {
                        meet[x][y] = m;
                        join[x][y] = j;
                    }
                    (None, _) => {
                        return Err(LatticeError::Invalid(LatticeViolation::Glb(
                            labels[x].clone(),
                            labels[y].clone(),
                            "(none)".into(),
                        )))
                    }
                    (_, None) => {
                        return Err(LatticeError::Invalid(LatticeViolation::Lub(
                            labels[x].clone(),
                            labels[y].clone(),
                            "(none)".into(),
                        )))
                    }
                }
            }
        }
        let bottom = (0..n).find(|&b| (0..n).all(|x| leq[b][x])).unwrap_or(0);
        let top = (0..n).find(|&t| (0..n).all(|x| leq[x][t])).unwrap_or(0);
        let lattice = FiniteLattice {
            name: name.into(),
            labels,
            leq,
            meet,
            join,
            bottom,
            top,
        };
        lattice.validate().map_err(LatticeError::Invalid)?;
        Ok(lattice)
    }

    /// Assembles a lattice from raw tables without checking any law.
    ///
    /// Use [`FiniteLattice::validate`] afterwards; this exists so corrupted
    /// tables can be represented and diagnosed.
    pub fn from_tables_unchecked(
        name: impl Into<String>,
        labels: Vec<String>,
        leq: Vec<Vec<bool>>,
        meet: Vec<Vec<usize>>,
        join: Vec<Vec<usize>>,
        bottom: usize,
        top: usize,
    ) -> Result<Self, LatticeError> {
        let n = labels.len();
        let square_b = leq.len() == n && leq.iter().all(|r| r.len() == n);
        let square_m = meet.len() == n && meet.iter().all(|r| r.len() == n);
        let square_j = join.len() == n && join.iter().all(|r| r.len() == n);
        if !(square_b && square_m && square_j) {
            return Err(LatticeError::Shape(n));
        }
        Ok(FiniteLattice {
            name: name.into(),
            labels,
            leq,
            meet,
            join,
            bottom,
            top,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    /// Looks up an element by its label.
    pub fn element(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x][y]
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x][y]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn meet_table(&self) -> &[Vec<usize>] {
        &self.meet
    }

    pub fn join_table(&self) -> &[Vec<usize>] {
        &self.join
    }

    /// Checks every lattice law over all pairs and triples and returns the
    /// first violation found.
    pub fn validate(&self) -> Result<(), LatticeViolation> {
        let n = self.size();
        let l = |x: usize| self.labels[x].clone();
        let in_range = |t: &Vec<Vec<usize>>| t.iter().flatten().all(|&v| v < n);
        if !in_range(&self.meet) || !in_range(&self.join) || self.bottom >= n || self.top >= n {
            return Err(LatticeViolation::OutOfRange);
        }
        for x in 0..n {
            if !self.leq[x][x] {
                return Err(LatticeViolation::Reflexivity(l(x)));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && self.leq[x][y] && self.leq[y][x] {
                    return Err(LatticeViolation::Antisymmetry(l(x), l(y)));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.leq[x][y] && self.leq[y][z] && !self.leq[x][z] {
                        return Err(LatticeViolation::Transitivity(l(x), l(y), l(z)));
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let m = self.meet[x][y];
                let is_lower = self.leq[m][x] && self.leq[m][y];
                let greatest = (0..n)
                    .filter(|&z| self.leq[z][x] && self.leq[z][y])
                    .all(|z| self.leq[z][m]);
                if !(is_lower && greatest) {
                    return Err(LatticeViolation::Glb(l(x), l(y), l(m)));
                }
                let j = self.join[x][y];
                let is_upper = self.leq[x][j] && self.leq[y][j];
                let least = (0..n)
                    .filter(|&z| self.leq[x][z] && self.leq[y][z])
                    .all(|z| self.leq[j][z]);
                if !(is_upper && least) {
                    return Err(LatticeViolation::Lub(l(x), l(y), l(j)));
                }
            }
        }
        for (op, t) in [("meet", &self.meet), ("join", &self.join)] {
            for x in 0..n {
                if t[x][x] != x {
                    return Err(LatticeViolation::Idempotence(l(x), op));
                }
                for y in 0..n {
                    if t[x][y] != t[y][x] {
                        return Err(LatticeViolation::Commutativity { op, a: l(x), b: l(y) });
                    }
                    for z in 0..n {
                        if t[t[x][y]][z] != t[x][t[y][z]] {
                            return Err(LatticeViolation::Associativity {
                                op,
                                a: l(x),
                                b: l(y),
                                c: l(z),
                            });
                        }
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if self.meet[x][self.join[x][y]] != x || self.join[x][self.meet[x][y]] != x {
                    return Err(LatticeViolation::Absorption(l(x), l(y)));
                }
            }
        }
        if (0..n).any(|x| !self.leq[self.bottom][x]) {
            return Err(LatticeViolation::Bottom(l(self.bottom)));
        }
        if (0..n).any(|x| !self.leq[x][self.top]) {
            return Err(LatticeViolation::Top(l(self.top)));
        }
        Ok(())
    }

    /// `true` when every pair of elements is comparable.
    pub fn is_chain(&self) -> bool {
        let n = self.size();
        (0..n).all(|x| (0..n).all(|y| self.leq[x][y] || self.leq[y][x]))
    }
}

fn decision_labels() -> Vec<String> {
    Decision::ALL.iter().map(|d| d.token().to_string()).collect()
}

fn order_from_pairs(n: usize, strict: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut leq = vec![vec![false; n]; n];
    for (x, row) in leq.iter_mut().enumerate() {
        row[x] = true;
    }
    for &(a, b) in strict {
        leq[a][b] = true;
    }
    leq
}

/// The knowledge ordering 4k: ⊥ below 0 and 1, both below ⊤.
///
/// Meet is ⊗b and join is ⊕b.
pub fn knowledge_lattice() -> FiniteLattice {
    use Decision::*;
    let pairs = [
        (Bottom.index(), Deny.index()),
        (Bottom.index(), Allow.index()),
        (Bottom.index(), Conflict.index()),
        (Deny.index(), Conflict.index()),
        (Allow.index(), Conflict.index()),
    ];
    FiniteLattice::from_order("4k", decision_labels(), order_from_pairs(4, &pairs))
        .expect("knowledge order is a lattice")
}

/// The truth ordering 4t: 0 below ⊥ and ⊤, both below 1.
///
/// Meet is ∧b and join is ∨b.
pub fn truth_lattice() -> FiniteLattice {
    use Decision::*;
    let pairs = [
        (Deny.index(), Bottom.index()),
        (Deny.index(), Conflict.index()),
        (Deny.index(), Allow.index()),
        (Bottom.index(), Allow.index()),
        (Conflict.index(), Allow.index()),
    ];
    FiniteLattice::from_order("4t", decision_labels(), order_from_pairs(4, &pairs))
        .expect("truth order is a lattice")
}

/// A totally ordered set of `m` truth values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chain {
    m: usize,
}

impl Chain {
    pub fn new(m: usize) -> Result<Self, LatticeError> {
        if m < 2 {
            return Err(LatticeError::ChainTooShort(m));
        }
        Ok(Chain { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The induced lattice, labelled `1 < 2 < … < m`.
    pub fn lattice(&self) -> FiniteLattice {
        let labels = (1..=self.m).map(|i| i.to_string()).collect();
        chain_with_labels(format!("chain:{}", self.m), labels)
    }
}

fn chain_with_labels(name: String, labels: Vec<String>) -> FiniteLattice {
    let n = labels.len();
    let leq = (0..n).map(|x| (0..n).map(|y| x <= y).collect()).collect();
    let meet = (0..n).map(|x| (0..n).map(|y| x.min(y)).collect()).collect();
    let join = (0..n).map(|x| (0..n).map(|y| x.max(y)).collect()).collect();
    FiniteLattice {
        name,
        labels,
        leq,
        meet,
        join,
        bottom: 0,
        top: n - 1,
    }
}

/// The chain `1 < 2 < … < m`; element `i` (0-based) carries label `i + 1`.
pub fn chain_lattice(m: usize) -> Result<FiniteLattice, LatticeError> {
    Ok(Chain::new(m)?.lattice())
}

/// The three-valued chain `0 < 1 < 2` used by Jobe's logic J.
pub fn jobe_lattice() -> FiniteLattice {
    chain_with_labels("J".into(), vec!["0".into(), "1".into(), "2".into()])
}

/// A lattice operation that fails to be monotone in another order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{lattice}.{op} is not monotone in {order}: {x} <= {y} but {op}({x},{z}) and {op}({y},{z}) are out of order")]
pub struct MonotonicityViolation {
    pub lattice: String,
    pub op: &'static str,
    pub order: String,
    pub x: String,
    pub y: String,
    pub z: String,
}

fn monotone_in(ops: &FiniteLattice, order: &FiniteLattice) -> Result<(), Box<MonotonicityViolation>> {
    let n = ops.size();
    for (op, table) in [("meet", &ops.meet), ("join", &ops.join)] {
        for x in 0..n {
            for y in (0..n).filter(|&y| order.leq(x, y)) {
                for (z, (&xz, &yz)) in table[x].iter().zip(&table[y]).enumerate() {
                    // Both operations are commutative, so one argument suffices.
                    if !order.leq(xz, yz) {
                        return Err(Box::new(MonotonicityViolation {
                            lattice: ops.name.clone(),
                            op,
                            order: order.name.clone(),
                            x: ops.label(x).to_string(),
                            y: ops.label(y).to_string(),
                            z: ops.label(z).to_string(),
                        }));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks that two lattices over the same elements are interlaced: the
/// meet and join of each are monotone with respect to the other's order.
pub fn check_interlaced(a: &FiniteLattice, b: &FiniteLattice) -> Result<(), Box<MonotonicityViolation>> {
    assert_eq!(a.size(), b.size(), "interlacing needs a shared carrier");
    monotone_in(a, b)?;
    monotone_in(b, a)
}

/// Checks every [`FiniteLattice`] invariant; convenience for
/// [`FiniteLattice::validate`].
pub fn validate_lattice(lattice: &FiniteLattice) -> Result<(), LatticeViolation> {
    lattice.validate()
}

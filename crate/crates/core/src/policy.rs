//! PTaCL4 policies: targets, requests, and the strict and indeterminate
//! evaluation semantics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{standard_registry, AlgebraError, GeneratorWord, OpRegistry};
use crate::lattice::Decision;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("attribute name must not be empty")]
    EmptyAttribute,
    #[error("attribute `{0}` is tested twice in one target")]
    DuplicateTest(String),
    #[error("attribute `{0}` given twice")]
    DuplicateAttribute(String),
    #[error("atomic policies decide 0 or 1, not {0}")]
    AtomicDecision(Decision),
    #[error("unbound policy reference `{0}`")]
    Unbound(String),
    #[error("policy reference cycle through `{0}`")]
    Cycle(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A conjunction of attribute equality tests. The empty target always
/// matches.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Target {
    tests: Vec<(String, String)>,
}

impl Target {
    pub fn always() -> Self {
        Target::default()
    }

    pub fn new(tests: Vec<(String, String)>) -> Result<Self, PolicyError> {
        for (i, (name, _)) in tests.iter().enumerate() {
            if name.is_empty() {
                return Err(PolicyError::EmptyAttribute);
            }
            if tests[..i].iter().any(|(n, _)| n == name) {
                return Err(PolicyError::DuplicateTest(name.clone()));
            }
        }
        Ok(Target { tests })
    }

    pub fn tests(&self) -> &[(String, String)] {
        &self.tests
    }

    pub fn is_always(&self) -> bool {
        self.tests.is_empty()
    }
}

/// An attribute value in a request, or a retrieval failure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AttrValue {
    Value(String),
    Error,
}

/// Attribute values available to the decision point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Request {
    attrs: BTreeMap<String, AttrValue>,
}

impl Request {
    pub fn new() -> Self {
        Request::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: AttrValue) -> Result<(), PolicyError> {
        let name = name.into();
        if name.is_empty() {
            return Err(PolicyError::EmptyAttribute);
        }
        if self.attrs.contains_key(&name) {
            return Err(PolicyError::DuplicateAttribute(name));
        }
        self.attrs.insert(name, value);
        Ok(())
    }

    pub fn with(mut self, name: &str, value: &str) -> Self {
        self.attrs.insert(name.to_string(), AttrValue::Value(value.to_string()));
        self
    }

    pub fn with_error(mut self, name: &str) -> Self {
        self.attrs.insert(name.to_string(), AttrValue::Error);
        self
    }

    pub fn get(&self, name: &str) -> Option<&AttrValue> {
        self.attrs.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &AttrValue)> {
        self.attrs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }
}

/// Outcome of evaluating a target: 1, 0 or ?.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetResult {
    Match,
    NoMatch,
    Indeterminate,
}

impl fmt::Display for TargetResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetResult::Match => "1",
            TargetResult::NoMatch => "0",
            TargetResult::Indeterminate => "?",
        })
    }
}

/// A missing or error-flagged attribute makes the target indeterminate;
/// otherwise any mismatch makes it fail.
pub fn eval_target(target: &Target, request: &Request) -> TargetResult {
    let mut mismatch = false;
    for (name, expected) in &target.tests {
        match request.get(name) {
            None | Some(AttrValue::Error) => return TargetResult::Indeterminate,
            Some(AttrValue::Value(v)) if v != expected => mismatch = true,
            Some(AttrValue::Value(_)) => {}
        }
    }
    if mismatch {
        TargetResult::NoMatch
    } else {
        TargetResult::Match
    }
}

/// A policy tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PolicyNode {
    /// Decides 0 or 1 when the target matches, ⊥ otherwise.
    Atomic(Target, Decision),
    /// The child's decision when the target matches, ⊥ otherwise.
    Scoped(Target, Box<PolicyNode>),
    /// A unary word applied to the child's decision, right to left.
    Unary(GeneratorWord, Box<PolicyNode>),
    /// A registered binary operator.
    Binary(String, Box<PolicyNode>, Box<PolicyNode>),
    /// A named sub-policy resolved through [`Bindings`].
    Ref(String),
}

impl PolicyNode {
    pub fn atomic(target: Target, decision: Decision) -> Result<Self, PolicyError> {
        if !decision.is_conclusive() {
            return Err(PolicyError::AtomicDecision(decision));
        }
        Ok(PolicyNode::Atomic(target, decision))
    }

    /// An always-applicable atomic policy.
    pub fn decide(decision: Decision) -> Self {
        PolicyNode::Atomic(Target::always(), decision)
    }

    pub fn scoped(target: Target, child: PolicyNode) -> Self {
        PolicyNode::Scoped(target, Box::new(child))
    }

    pub fn unary(word: GeneratorWord, child: PolicyNode) -> Self {
        PolicyNode::Unary(word, Box::new(child))
    }

    pub fn binary(op: impl Into<String>, left: PolicyNode, right: PolicyNode) -> Self {
        PolicyNode::Binary(op.into(), Box::new(left), Box::new(right))
    }

    pub fn reference(name: impl Into<String>) -> Self {
        PolicyNode::Ref(name.into())
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            PolicyNode::Atomic(..) | PolicyNode::Ref(_) => 1,
            PolicyNode::Scoped(_, c) | PolicyNode::Unary(_, c) => 1 + c.size(),
            PolicyNode::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PolicyNode::Atomic(..) | PolicyNode::Ref(_) => 0,
            PolicyNode::Scoped(_, c) | PolicyNode::Unary(_, c) => 1 + c.depth(),
            PolicyNode::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Names of referenced sub-policies, in first-occurrence order.
    pub fn references(&self) -> Vec<&str> {
        fn walk<'a>(p: &'a PolicyNode, out: &mut Vec<&'a str>) {
            match p {
                PolicyNode::Atomic(..) => {}
                PolicyNode::Ref(n) => {
                    if !out.contains(&n.as_str()) {
                        out.push(n);
                    }
                }
                PolicyNode::Scoped(_, c) | PolicyNode::Unary(_, c) => walk(c, out),
                PolicyNode::Binary(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Checks atomic decisions and that every operator is registered with
    /// the right arity.
    pub fn validate(&self, registry: &OpRegistry) -> Result<(), PolicyError> {
        match self {
            PolicyNode::Atomic(_, d) if !d.is_conclusive() => Err(PolicyError::AtomicDecision(*d)),
            PolicyNode::Atomic(..) | PolicyNode::Ref(_) => Ok(()),
            PolicyNode::Scoped(_, c) => c.validate(registry),
            PolicyNode::Unary(w, c) => {
                for name in w.names() {
                    registry.require_arity(name, 1)?;
                }
                c.validate(registry)
            }
            PolicyNode::Binary(op, l, r) => {
                registry.require_arity(op, 2)?;
                l.validate(registry)?;
                r.validate(registry)
            }
        }
    }
}

/// What a policy reference stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Policy(PolicyNode),
    Fixed(Decision),
}

pub type Bindings = BTreeMap<String, Binding>;

/// A non-empty set of decisions, stored as a bit mask over canonical
/// indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Decision>", try_from = "Vec<Decision>")]
pub struct DecisionSet(u8);

impl DecisionSet {
    pub fn singleton(d: Decision) -> Self {
        DecisionSet(1 << d.index())
    }

    /// `None` for an empty collection.
    pub fn from_decisions(ds: impl IntoIterator<Item = Decision>) -> Option<Self> {
        let mask = ds.into_iter().fold(0u8, |m, d| m | (1 << d.index()));
        Self::from_mask(mask)
    }

    /// `None` for 0 or bits beyond the four decisions.
    pub fn from_mask(mask: u8) -> Option<Self> {
        (mask != 0 && mask < 16).then_some(DecisionSet(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn contains(self, d: Decision) -> bool {
        self.0 & (1 << d.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn as_singleton(self) -> Option<Decision> {
        (self.len() == 1).then(|| Decision::ALL[self.0.trailing_zeros() as usize])
    }

    pub fn iter(self) -> impl Iterator<Item = Decision> {
        Decision::ALL.into_iter().filter(move |d| self.contains(*d))
    }

    pub fn union(self, other: Self) -> Self {
        DecisionSet(self.0 | other.0)
    }

    pub fn map(self, f: impl Fn(Decision) -> Decision) -> Self {
        Self::from_decisions(self.iter().map(f)).expect("image of a non-empty set")
    }

    /// `{f(a, b) : a ∈ self, b ∈ other}`.
    pub fn combine(self, other: Self, f: impl Fn(Decision, Decision) -> Decision) -> Self {
        Self::from_decisions(self.iter().flat_map(|a| other.iter().map(move |b| (a, b))).map(|(a, b)| f(a, b)))
            .expect("product of non-empty sets")
    }
}

impl fmt::Display for DecisionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<&str> = self.iter().map(Decision::token).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl FromStr for DecisionSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| format!("expected a braced decision set, got `{s}`"))?;
        let ds = inner
            .split(',')
            .map(|t| t.trim().parse::<Decision>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_decisions(ds).ok_or_else(|| "decision sets are non-empty".to_string())
    }
}

impl From<DecisionSet> for Vec<Decision> {
    fn from(s: DecisionSet) -> Self {
        s.iter().collect()
    }
}

impl TryFrom<Vec<Decision>> for DecisionSet {
    type Error = String;

    fn try_from(v: Vec<Decision>) -> Result<Self, Self::Error> {
        Self::from_decisions(v).ok_or_else(|| "decision sets are non-empty".to_string())
    }
}

/// How an enforcement point turns a decision set into allow or deny.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// A single conclusive decision stands; anything else denies.
    DenyByDefault,
    /// A single conclusive decision stands; anything else allows.
    AllowByDefault,
    /// Allow only on exactly `{1}`.
    Safe,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::DenyByDefault, Strategy::AllowByDefault, Strategy::Safe];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::DenyByDefault => "deny-by-default",
            Strategy::AllowByDefault => "allow-by-default",
            Strategy::Safe => "safe",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected deny-by-default, allow-by-default or safe)"))
    }
}

pub fn resolve(set: DecisionSet, strategy: Strategy) -> Decision {
    let conclusive = set.as_singleton().filter(|d| d.is_conclusive());
    match strategy {
        Strategy::DenyByDefault => conclusive.unwrap_or(Decision::Deny),
        Strategy::AllowByDefault => conclusive.unwrap_or(Decision::Allow),
        Strategy::Safe if set == DecisionSet::singleton(Decision::Allow) => Decision::Allow,
        Strategy::Safe => Decision::Deny,
    }
}

/// Operator registry and sub-policy bindings used during evaluation.
#[derive(Debug, Clone)]
pub struct Evaluator {
    registry: OpRegistry,
    bindings: Bindings,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new(standard_registry(), Bindings::new())
    }
}

impl Evaluator {
    pub fn new(registry: OpRegistry, bindings: Bindings) -> Self {
        Evaluator { registry, bindings }
    }

    pub fn with_bindings(bindings: Bindings) -> Self {
        Evaluator::new(standard_registry(), bindings)
    }

    pub fn registry(&self) -> &OpRegistry {
        &self.registry
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn bind(&mut self, name: impl Into<String>, binding: Binding) {
        self.bindings.insert(name.into(), binding);
    }

    fn lookup<'a>(&'a self, name: &str, stack: &[&str]) -> Result<&'a Binding, PolicyError> {
        if stack.contains(&name) {
            return Err(PolicyError::Cycle(name.to_string()));
        }
        self.bindings.get(name).ok_or_else(|| PolicyError::Unbound(name.to_string()))
    }

    /// Strict semantics; an indeterminate target counts as not matching.
    pub fn eval(&self, policy: &PolicyNode, request: &Request) -> Result<Decision, PolicyError> {
        self.eval_strict(policy, request, &mut Vec::new())
    }

    fn eval_strict<'a>(
        &'a self,
        policy: &'a PolicyNode,
        request: &Request,
        stack: &mut Vec<&'a str>,
    ) -> Result<Decision, PolicyError> {
        Ok(match policy {
            PolicyNode::Atomic(t, d) => match eval_target(t, request) {
                TargetResult::Match => *d,
                _ => Decision::Bottom,
            },
            PolicyNode::Scoped(t, c) => match eval_target(t, request) {
                TargetResult::Match => self.eval_strict(c, request, stack)?,
                _ => Decision::Bottom,
            },
            PolicyNode::Unary(w, c) => {
                let v = self.eval_strict(c, request, stack)?;
                Decision::ALL[w.apply(v.index(), &self.registry)?]
            }
            PolicyNode::Binary(op, l, r) => {
                let op = self.registry.require_arity(op, 2)?;
                op.d2(self.eval_strict(l, request, stack)?, self.eval_strict(r, request, stack)?)
            }
            PolicyNode::Ref(name) => match self.lookup(name, stack)? {
                Binding::Fixed(d) => *d,
                Binding::Policy(p) => {
                    stack.push(name);
                    let v = self.eval_strict(p, request, stack)?;
                    stack.pop();
                    v
                }
            },
        })
    }

    /// Indeterminacy semantics over sets of possible decisions.
    pub fn eval_ind(&self, policy: &PolicyNode, request: &Request) -> Result<DecisionSet, PolicyError> {
        self.eval_sets(policy, request, &mut Vec::new())
    }

    fn eval_sets<'a>(
        &'a self,
        policy: &'a PolicyNode,
        request: &Request,
        stack: &mut Vec<&'a str>,
    ) -> Result<DecisionSet, PolicyError> {
        let bottom = DecisionSet::singleton(Decision::Bottom);
        Ok(match policy {
            PolicyNode::Atomic(t, d) => match eval_target(t, request) {
                TargetResult::Match => DecisionSet::singleton(*d),
                TargetResult::NoMatch => bottom,
                TargetResult::Indeterminate => bottom.union(DecisionSet::singleton(*d)),
            },
            PolicyNode::Scoped(t, c) => match eval_target(t, request) {
                TargetResult::Match => self.eval_sets(c, request, stack)?,
                TargetResult::NoMatch => bottom,
                TargetResult::Indeterminate => bottom.union(self.eval_sets(c, request, stack)?),
            },
            PolicyNode::Unary(w, c) => {
                let s = self.eval_sets(c, request, stack)?;
                for name in w.names() {
                    self.registry.require_arity(name, 1)?;
                }
                s.map(|d| Decision::ALL[w.apply(d.index(), &self.registry).expect("checked above")])
            }
            PolicyNode::Binary(op, l, r) => {
                let op = self.registry.require_arity(op, 2)?;
                let (a, b) = (self.eval_sets(l, request, stack)?, self.eval_sets(r, request, stack)?);
                a.combine(b, |x, y| op.d2(x, y))
            }
            PolicyNode::Ref(name) => match self.lookup(name, stack)? {
                Binding::Fixed(d) => DecisionSet::singleton(*d),
                Binding::Policy(p) => {
                    stack.push(name);
                    let v = self.eval_sets(p, request, stack)?;
                    stack.pop();
                    v
                }
            },
        })
    }
}

/// Strict evaluation with the standard registry and no bindings.
pub fn eval_policy(policy: &PolicyNode, request: &Request) -> Result<Decision, PolicyError> {
    Evaluator::default().eval(policy, request)
}

/// Indeterminacy semantics with the standard registry and no bindings.
pub fn eval_policy_ind(policy: &PolicyNode, request: &Request) -> Result<DecisionSet, PolicyError> {
    Evaluator::default().eval_ind(policy, request)
}

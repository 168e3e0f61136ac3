//! Operator tables, permutations of the value set, and synthesis of
//! permutations as words over generator operators.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lattice::{knowledge_lattice, truth_lattice, Decision};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{name}` has arity {found}, expected {expected}")]
    Arity {
        name: String,
        expected: u8,
        found: u8,
    },
    #[error("operator `{name}` is defined over {found} values, expected {expected}")]
    DomainMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("operator `{0}` is not a permutation")]
    NotPermutation(String),
    #[error("invalid table for `{0}`")]
    BadTable(String),
    #[error("image list {0:?} is not a bijection")]
    NotBijection(Vec<usize>),
    #[error("{target} is not generated: the generators reach only {subgroup_size} permutations")]
    NotGenerated {
        target: String,
        subgroup_size: usize,
    },
    #[error("duplicate operator `{0}`")]
    Duplicate(String),
}

/// An operator of arity 0, 1 or 2 over `size` values, stored as a table.
///
/// Binary tables are row-major: entry `x * size + y` holds `op(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpTable {
    name: String,
    arity: u8,
    size: usize,
    table: Vec<usize>,
}

impl OpTable {
    pub fn new(
        name: impl Into<String>,
        arity: u8,
        size: usize,
        table: Vec<usize>,
    ) -> Result<Self, AlgebraError> {
        let name = name.into();
        let expected_len = match arity {
            0 => 1,
            1 => size,
            2 => size * size,
            _ => return Err(AlgebraError::BadTable(name)),
        };
        if size == 0 || table.len() != expected_len || table.iter().any(|&v| v >= size) {
            return Err(AlgebraError::BadTable(name));
        }
        Ok(OpTable {
            name,
            arity,
            size,
            table,
        })
    }

    pub fn constant(name: impl Into<String>, size: usize, value: usize) -> Result<Self, AlgebraError> {
        Self::new(name, 0, size, vec![value])
    }

    pub fn unary(name: impl Into<String>, table: Vec<usize>) -> Result<Self, AlgebraError> {
        let size = table.len();
        Self::new(name, 1, size, table)
    }

    pub fn binary(name: impl Into<String>, size: usize, table: Vec<usize>) -> Result<Self, AlgebraError> {
        Self::new(name, 2, size, table)
    }

    fn from_decisions_unary(name: &str, table: [Decision; 4]) -> Self {
        Self::unary(name, table.iter().map(|d| d.index()).collect()).expect("valid unary table")
    }

    fn from_decisions_binary(name: &str, table: [[Decision; 4]; 4]) -> Self {
        let flat = table.iter().flatten().map(|d| d.index()).collect();
        Self::binary(name, 4, flat).expect("valid binary table")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn value(&self) -> usize {
        self.table[0]
    }

    pub fn apply1(&self, x: usize) -> usize {
        debug_assert_eq!(self.arity, 1);
        self.table[x]
    }

    pub fn apply2(&self, x: usize, y: usize) -> usize {
        debug_assert_eq!(self.arity, 2);
        self.table[x * self.size + y]
    }

    /// Applies a unary operator to a decision.
    pub fn d1(&self, x: Decision) -> Decision {
        Decision::from_index(self.apply1(x.index())).expect("four-valued operator")
    }

    /// Applies a binary operator to two decisions.
    pub fn d2(&self, x: Decision, y: Decision) -> Decision {
        Decision::from_index(self.apply2(x.index(), y.index())).expect("four-valued operator")
    }

    pub fn is_permutation(&self) -> bool {
        self.arity == 1 && Permutation::from_images(self.table.clone()).is_ok()
    }

    pub fn to_permutation(&self) -> Result<Permutation, AlgebraError> {
        if self.arity != 1 {
            return Err(AlgebraError::Arity {
                name: self.name.clone(),
                expected: 1,
                found: self.arity,
            });
        }
        Permutation::from_images(self.table.clone())
            .map_err(|_| AlgebraError::NotPermutation(self.name.clone()))
    }
}

/// A named set of operators over one value set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpRegistry {
    size: usize,
    ops: BTreeMap<String, OpTable>,
}

impl OpRegistry {
    pub fn new(size: usize) -> Self {
        OpRegistry {
            size,
            ops: BTreeMap::new(),
        }
    }

    pub fn from_ops(size: usize, ops: impl IntoIterator<Item = OpTable>) -> Result<Self, AlgebraError> {
        let mut reg = Self::new(size);
        for op in ops {
            reg.insert(op)?;
        }
        Ok(reg)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn insert(&mut self, op: OpTable) -> Result<(), AlgebraError> {
        if op.size != self.size {
            return Err(AlgebraError::DomainMismatch {
                name: op.name,
                expected: self.size,
                found: op.size,
            });
        }
        if self.ops.contains_key(&op.name) {
            return Err(AlgebraError::Duplicate(op.name));
        }
        self.ops.insert(op.name.clone(), op);
        Ok(())
    }

    /// Adds every operator of `other`, skipping names already present with
    /// an identical table.
    pub fn extend(&mut self, other: &OpRegistry) -> Result<(), AlgebraError> {
        for op in other.ops.values() {
            match self.ops.get(&op.name) {
                Some(existing) if existing == op => {}
                _ => self.insert(op.clone())?,
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&OpTable> {
        self.ops.get(name)
    }

    pub fn require(&self, name: &str) -> Result<&OpTable, AlgebraError> {
        self.get(name)
            .ok_or_else(|| AlgebraError::UnknownOperator(name.to_string()))
    }

    pub fn require_arity(&self, name: &str, arity: u8) -> Result<&OpTable, AlgebraError> {
        let op = self.require(name)?;
        if op.arity != arity {
            return Err(AlgebraError::Arity {
                name: name.to_string(),
                expected: arity,
                found: op.arity,
            });
        }
        Ok(op)
    }

    /// A registry holding only the named operators, in the given order's
    /// name set.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<OpRegistry, AlgebraError> {
        let mut reg = OpRegistry::new(self.size);
        for n in names {
            let op = self.require(n.as_ref())?;
            if reg.get(op.name()).is_none() {
                reg.insert(op.clone())?;
            }
        }
        Ok(reg)
    }

    pub fn iter(&self) -> impl Iterator<Item = &OpTable> {
        self.ops.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(String::as_str)
    }

    pub fn with_arity(&self, arity: u8) -> impl Iterator<Item = &OpTable> {
        self.ops.values().filter(move |op| op.arity == arity)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// A bijection on `{0, …, n-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self, AlgebraError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(AlgebraError::NotBijection(images));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles, e.g. `[[0, 1, 2, 3]]` for
    /// the cycle 0 → 1 → 2 → 3 → 0.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, AlgebraError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= n || touched[x] {
                    return Err(AlgebraError::NotBijection(cycle.to_vec()));
                }
                touched[x] = true;
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Self::from_images(images)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self, AlgebraError> {
        Self::from_cycles(n, &[&[a, b]])
    }

    /// The full cycle `(0 1 … n-1)`.
    pub fn full_cycle(n: usize) -> Self {
        Permutation {
            images: (0..n).map(|i| (i + 1) % n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "permutations of different degree");
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Disjoint non-trivial cycles, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle notation using the given element labels, e.g. `(bot 0)`.
    pub fn cycle_notation(&self, labels: &[String]) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles
            .iter()
            .map(|c| {
                let inner: Vec<&str> = c.iter().map(|&x| labels[x].as_str()).collect();
                format!("({})", inner.join(" "))
            })
            .collect()
    }

    pub fn to_op(&self, name: impl Into<String>) -> OpTable {
        OpTable::unary(name, self.images.clone()).expect("permutation is a valid table")
    }

    /// Every permutation of `n` points in lexicographic order of image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

/// A sequence of unary operator names, composed right to left.
///
/// The word `[f, g]` denotes `f ∘ g`, i.e. `x ↦ f(g(x))`: the last name is
/// applied first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GeneratorWord(pub Vec<String>);

impl GeneratorWord {
    pub fn empty() -> Self {
        GeneratorWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    /// Applies the word to a value using the registry's unary tables.
    pub fn apply(&self, x: usize, registry: &OpRegistry) -> Result<usize, AlgebraError> {
        let mut v = x;
        for name in self.0.iter().rev() {
            v = registry.require_arity(name, 1)?.apply1(v);
        }
        Ok(v)
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(","))
    }
}

impl FromStr for GeneratorWord {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(GeneratorWord::empty());
        }
        let names: Vec<String> = s.split(',').map(|n| n.trim().to_string()).collect();
        if let Some(bad) = names.iter().find(|n| n.is_empty()) {
            return Err(AlgebraError::UnknownOperator(bad.clone()));
        }
        Ok(GeneratorWord(names))
    }
}

/// Composes a word into a single unary table; the empty word is the
/// identity.
pub fn compose(word: &GeneratorWord, registry: &OpRegistry) -> Result<OpTable, AlgebraError> {
    let mut table: Vec<usize> = (0..registry.size()).collect();
    for name in word.0.iter().rev() {
        let op = registry.require_arity(name, 1)?;
        for v in table.iter_mut() {
            *v = op.apply1(*v);
        }
    }
    let name = if word.is_empty() {
        "id".to_string()
    } else {
        word.to_string()
    };
    OpTable::unary(name, table)
}

fn generator_perms(generators: &[&OpTable]) -> Result<Vec<(String, Permutation)>, AlgebraError> {
    let gens: Vec<(String, Permutation)> = generators
        .iter()
        .map(|g| Ok((g.name().to_string(), g.to_permutation()?)))
        .collect::<Result<_, AlgebraError>>()?;
    if let Some(first) = gens.first() {
        let n = first.1.len();
        if let Some((name, p)) = gens.iter().find(|(_, p)| p.len() != n) {
            return Err(AlgebraError::DomainMismatch {
                name: name.clone(),
                expected: n,
                found: p.len(),
            });
        }
    }
    Ok(gens)
}

/// Breadth-first search over the Cayley graph of the generated subgroup.
///
/// Returns a shortest word composing to `target`. Ties are broken by
/// generator order, so results are deterministic.
pub fn synthesize_permutation(
    target: &Permutation,
    generators: &[&OpTable],
) -> Result<GeneratorWord, AlgebraError> {
    let gens = generator_perms(generators)?;
    let n = target.len();
    if let Some((name, p)) = gens.iter().find(|(_, p)| p.len() != n) {
        return Err(AlgebraError::DomainMismatch {
            name: name.clone(),
            expected: n,
            found: p.len(),
        });
    }
    let start = Permutation::identity(n);
    // parent[p] = (predecessor, generator index) with p = gen ∘ predecessor
    let mut parent: HashMap<Permutation, Option<(Permutation, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let mut found = parent.contains_key(target);
    while !found {
        let Some(p) = queue.pop_front() else { break };
        for (gi, (_, g)) in gens.iter().enumerate() {
            let next = g.compose(&p);
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((p.clone(), gi)));
            if &next == target {
                found = true;
                break;
            }
            queue.push_back(next);
        }
    }
    if !found {
        return Err(AlgebraError::NotGenerated {
            target: format!("{:?}", target.images()),
            subgroup_size: parent.len(),
        });
    }
    // Walking back from the target yields generators outermost-first.
    let mut word = Vec::new();
    let mut cur = target.clone();
    while let Some(Some((prev, gi))) = parent.get(&cur) {
        word.push(gens[*gi].0.clone());
        cur = prev.clone();
    }
    Ok(GeneratorWord(word))
}

/// The closure of the generators under composition (always contains the
/// identity).
pub fn generated_subgroup(generators: &[&OpTable]) -> Result<BTreeSet<Permutation>, AlgebraError> {
    let gens = generator_perms(generators)?;
    let Some(n) = gens.first().map(|(_, p)| p.len()) else {
        return Ok(BTreeSet::new());
    };
    let mut seen = BTreeSet::from([Permutation::identity(n)]);
    let mut queue = VecDeque::from([Permutation::identity(n)]);
    while let Some(p) = queue.pop_front() {
        for (_, g) in &gens {
            let next = g.compose(&p);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// For a generator set containing a transposition `(a b)` and a full cycle,
/// returns `(distance, n, gcd(distance, n))`, where `distance` is how far
/// apart `a` and `b` sit along the cycle. The pair generates the full
/// symmetric group exactly when the gcd is 1.
pub fn transposition_cycle_gcd(generators: &[&OpTable]) -> Option<(usize, usize, usize)> {
    let perms: Vec<Permutation> = generators.iter().filter_map(|g| g.to_permutation().ok()).collect();
    let n = perms.first()?.len();
    let cycle = perms.iter().find(|p| {
        let c = p.cycles();
        c.len() == 1 && c[0].len() == n
    })?;
    let transposition = perms.iter().find(|p| {
        let c = p.cycles();
        c.len() == 1 && c[0].len() == 2
    })?;
    let pair = &transposition.cycles()[0];
    let mut distance = 0;
    let mut x = pair[0];
    while x != pair[1] {
        x = cycle.apply(x);
        distance += 1;
    }
    Some((distance, n, gcd(distance, n)))
}

fn lattice_op(name: &str, table: &[Vec<usize>]) -> OpTable {
    OpTable::binary(name, table.len(), table.iter().flatten().copied().collect())
        .expect("lattice table is total")
}

/// The Belnap operators: `not`, `kand` (⊗b), `kor` (⊕b), `tand` (∧b),
/// `tor` (∨b), `imp` (⊃b), and the constants `bot`, `0`, `1`, `top`.
pub fn belnap_ops() -> OpRegistry {
    use Decision::*;
    let k = knowledge_lattice();
    let t = truth_lattice();
    let not = OpTable::from_decisions_unary("not", [Bottom, Allow, Deny, Conflict]);
    // x ⊃ y is 1 when x is 0 or ⊥, otherwise y.
    let imp_row = |x: Decision| -> [Decision; 4] {
        if matches!(x, Deny | Bottom) {
            [Allow; 4]
        } else {
            Decision::ALL
        }
    };
    let imp = OpTable::from_decisions_binary(
        "imp",
        [imp_row(Bottom), imp_row(Deny), imp_row(Allow), imp_row(Conflict)],
    );
    let mut ops = vec![
        not,
        lattice_op("kand", k.meet_table()),
        lattice_op("kor", k.join_table()),
        lattice_op("tand", t.meet_table()),
        lattice_op("tor", t.join_table()),
        imp,
    ];
    for d in Decision::ALL {
        ops.push(OpTable::constant(d.token(), 4, d.index()).expect("constant"));
    }
    OpRegistry::from_ops(4, ops).expect("distinct names")
}

/// Permutation operators on 4: the transpositions `t0` = (⊥ 0),
/// `t1` = (⊥ 1), `ttop` = (⊥ ⊤), conflation `conf` (same table as `ttop`),
/// the cycle `cyc` = (⊥ 0 1 ⊤), and negation `not` = (0 1).
pub fn new_unary_ops() -> OpRegistry {
    use Decision::*;
    let t = |name: &str, a: Decision, b: Decision| {
        Permutation::transposition(4, a.index(), b.index())
            .expect("distinct points")
            .to_op(name)
    };
    OpRegistry::from_ops(
        4,
        [
            t("t0", Bottom, Deny),
            t("t1", Bottom, Allow),
            t("ttop", Bottom, Conflict),
            t("conf", Bottom, Conflict),
            Permutation::full_cycle(4).to_op("cyc"),
            t("not", Deny, Allow),
        ],
    )
    .expect("distinct names")
}

/// The only-one-applicable (`ooa`) and unanimity (`un`) operators.
pub fn access_ops() -> OpRegistry {
    use Decision::*;
    let ooa = OpTable::from_decisions_binary(
        "ooa",
        [
            [Bottom, Deny, Allow, Conflict],
            [Deny, Conflict, Conflict, Conflict],
            [Allow, Conflict, Conflict, Conflict],
            [Conflict; 4],
        ],
    );
    let un = OpTable::from_decisions_binary(
        "un",
        [
            [Bottom, Conflict, Conflict, Conflict],
            [Conflict, Deny, Conflict, Conflict],
            [Conflict, Conflict, Allow, Conflict],
            [Conflict; 4],
        ],
    );
    OpRegistry::from_ops(4, [ooa, un]).expect("distinct names")
}

/// Jobe's three-valued logic J over `0 < 1 < 2`: `jand` (∧e), `j1` (~1) and
/// `j2` (~2).
pub fn jobe_ops() -> OpRegistry {
    let jand = OpTable::binary(
        "jand",
        3,
        vec![
            0, 0, 0, //
            0, 1, 1, //
            0, 1, 2,
        ],
    )
    .expect("3x3 table");
    let j1 = OpTable::unary("j1", vec![1, 0, 2]).expect("unary");
    let j2 = OpTable::unary("j2", vec![2, 1, 0]).expect("unary");
    OpRegistry::from_ops(3, [jand, j1, j2]).expect("distinct names")
}

/// Every named operator over 4: Belnap, the permutation operators, `ooa`
/// and `un`.
pub fn standard_registry() -> OpRegistry {
    let mut reg = belnap_ops();
    reg.extend(&new_unary_ops()).expect("compatible");
    reg.extend(&access_ops()).expect("compatible");
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use Decision::*;

    #[test]
    fn belnap_examples() {
        let ops = belnap_ops();
        assert_eq!(ops.get("imp").unwrap().d2(Deny, Bottom), Allow);
        assert_eq!(ops.get("not").unwrap().d1(Conflict), Conflict);
        let kor = ops.get("kor").unwrap();
        for d in Decision::ALL {
            assert_eq!(kor.d2(Bottom, d), d);
        }
        assert_eq!(ops.get("top").unwrap().value(), Conflict.index());
        assert_eq!(ops.get("top").unwrap().arity(), 0);
    }

    #[test]
    fn new_unary_examples() {
        let ops = new_unary_ops();
        let t0 = ops.get("t0").unwrap();
        assert_eq!(t0.d1(Bottom), Deny);
        assert_eq!(t0.d1(Allow), Allow);
        let conf = ops.get("conf").unwrap();
        assert_eq!(conf.d1(Bottom), Conflict);
        assert_eq!(conf.d1(Deny), Deny);
        assert_eq!(ops.get("cyc").unwrap().d1(Conflict), Bottom);
        assert_eq!(conf.table(), ops.get("ttop").unwrap().table());
    }

    #[test]
    fn access_examples() {
        let ops = access_ops();
        let ooa = ops.get("ooa").unwrap();
        let un = ops.get("un").unwrap();
        assert_eq!(ooa.d2(Deny, Allow), Conflict);
        assert_eq!(ooa.d2(Bottom, Allow), Allow);
        assert_eq!(un.d2(Deny, Allow), Conflict);
        assert_eq!(un.d2(Bottom, Bottom), Bottom);
    }

    #[test]
    fn jobe_examples() {
        let ops = jobe_ops();
        let j2 = ops.get("j2").unwrap();
        assert_eq!((j2.apply1(0), j2.apply1(2)), (2, 0));
        assert_eq!(ops.get("jand").unwrap().apply2(2, 1), 1);
        assert_eq!(ops.get("j1").unwrap().apply1(2), 2);
    }

    #[test]
    fn compose_words() {
        let reg = new_unary_ops();
        let id = compose(&GeneratorWord::empty(), &reg).unwrap();
        assert_eq!(id.table(), &[0, 1, 2, 3]);
        let w: GeneratorWord = "t0,t0".parse().unwrap();
        assert_eq!(compose(&w, &reg).unwrap().table(), &[0, 1, 2, 3]);
        let w: GeneratorWord = "cyc,cyc,cyc,cyc".parse().unwrap();
        assert_eq!(compose(&w, &reg).unwrap().table(), &[0, 1, 2, 3]);
        let w: GeneratorWord = "cyc,cyc".parse().unwrap();
        assert_eq!(compose(&w, &reg).unwrap().table(), &[2, 3, 0, 1]);
    }

    #[test]
    fn compose_is_right_to_left() {
        let reg = new_unary_ops();
        // conf after cyc: ⊥ -cyc-> 0 -conf-> 0 ; ⊤ -cyc-> ⊥ -conf-> ⊤
        let w: GeneratorWord = "conf,cyc".parse().unwrap();
        let t = compose(&w, &reg).unwrap();
        assert_eq!(t.d1(Bottom), Deny);
        assert_eq!(t.d1(Conflict), Conflict);
        assert_eq!(t.d1(Allow), Bottom);
    }

    #[test]
    fn compose_errors() {
        let reg = standard_registry();
        let w: GeneratorWord = "nosuch".parse().unwrap();
        assert_eq!(
            compose(&w, &reg),
            Err(AlgebraError::UnknownOperator("nosuch".into()))
        );
        let w: GeneratorWord = "kand".parse().unwrap();
        assert!(matches!(compose(&w, &reg), Err(AlgebraError::Arity { .. })));
        let mut r = OpRegistry::new(4);
        assert!(matches!(
            r.insert(jobe_ops().get("j1").unwrap().clone()),
            Err(AlgebraError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn synth_examples() {
        let reg = new_unary_ops();
        let gens = [reg.get("t0").unwrap(), reg.get("t1").unwrap(), reg.get("ttop").unwrap()];
        let t1 = reg.get("t1").unwrap().to_permutation().unwrap();
        assert_eq!(
            synthesize_permutation(&t1, &gens).unwrap(),
            GeneratorWord(vec!["t1".into()])
        );

        let target = Permutation::transposition(4, 0, 1).unwrap();
        let gens = [reg.get("ttop").unwrap(), reg.get("cyc").unwrap()];
        let word = synthesize_permutation(&target, &gens).unwrap();
        assert_eq!(compose(&word, &reg).unwrap().table(), target.images());

        let bot_one = Permutation::transposition(4, 0, 2).unwrap().to_op("b1");
        let gens = [&bot_one, reg.get("cyc").unwrap()];
        match synthesize_permutation(&target, &gens) {
            Err(AlgebraError::NotGenerated { subgroup_size, .. }) => assert_eq!(subgroup_size, 8),
            other => panic!("expected NotGenerated, got {other:?}"),
        }
        assert_eq!(transposition_cycle_gcd(&gens), Some((2, 4, 2)));
    }

    #[test]
    fn synth_identity_is_empty_word() {
        let reg = new_unary_ops();
        let gens = [reg.get("conf").unwrap(), reg.get("cyc").unwrap()];
        let w = synthesize_permutation(&Permutation::identity(4), &gens).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn subgroup_sizes() {
        let reg = new_unary_ops();
        let s = |names: &[&str]| {
            let gens: Vec<&OpTable> = names.iter().map(|n| reg.get(n).unwrap()).collect();
            generated_subgroup(&gens).unwrap().len()
        };
        assert_eq!(s(&["t0", "t1", "ttop"]), 24);
        assert_eq!(s(&["ttop", "cyc"]), 24);
        assert_eq!(s(&["not"]), 2);
        assert_eq!(s(&["cyc"]), 4);
    }

    #[test]
    fn permutation_helpers() {
        let p = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        assert_eq!(p, Permutation::full_cycle(4));
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        let labels: Vec<String> = Decision::ALL.iter().map(|d| d.token().to_string()).collect();
        assert_eq!(p.cycle_notation(&labels), "(bot 0 1 top)");
        assert_eq!(Permutation::all(4).len(), 24);
        let all = Permutation::all(3);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }
}

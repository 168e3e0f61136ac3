//! Acceptance checks. Each criterion prints one PASS or FAIL line; the
//! process exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ptacl4::algebra::{
    belnap_ops, generated_subgroup, jobe_ops, new_unary_ops, standard_registry, OpRegistry, OpTable,
};
use ptacl4::completeness::{
    analyze, check_canonical_completeness, check_canonical_suitability, check_functional_completeness,
    normal_form_unary_space, selection_op, totally_ordered_generators, unary_closure, unary_selection_ops,
};
use ptacl4::interop::{combine_kand, combine_kand_fold, XacmlDecision};
use ptacl4::lattice::{
    chain_lattice, check_interlaced, jobe_lattice, knowledge_lattice, truth_lattice, validate_lattice, Decision,
};
use ptacl4::nf_compiler::{all_inputs, compile, validate_normal_form, Basis, DecisionTable};
use ptacl4::policy::{eval_policy, eval_policy_ind, DecisionSet, PolicyNode, Request, Target};
use ptacl4::GeneratorWord;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tok(s: &str) -> Decision {
    match s {
        "⊥" => Decision::Bottom,
        "0" => Decision::Deny,
        "1" => Decision::Allow,
        "⊤" => Decision::Conflict,
        other => panic!("bad oracle token {other}"),
    }
}

fn row(s: &str) -> Vec<Decision> {
    s.split_whitespace().map(tok).collect()
}

/// A binary table written with rows and columns in `order`.
struct Frozen {
    name: &'static str,
    order: &'static str,
    rows: [&'static str; 4],
}

impl Frozen {
    fn entries(&self) -> Vec<(Decision, Decision, Decision)> {
        let order = row(self.order);
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in row(r).into_iter().enumerate() {
                out.push((order[i], order[j], v));
            }
        }
        out
    }

    fn table(&self) -> DecisionTable {
        DecisionTable::from_rows(
            vec!["x".into(), "y".into()],
            self.name,
            self.entries().into_iter().map(|(x, y, v)| (vec![x, y], v)),
        )
        .unwrap()
    }
}

const TRUTH_ORDER: &str = "0 ⊥ ⊤ 1";
const KNOWLEDGE_ORDER: &str = "⊥ 0 1 ⊤";

const TAND: Frozen = Frozen {
    name: "tand",
    order: TRUTH_ORDER,
    rows: ["0 0 0 0", "0 ⊥ 0 ⊥", "0 0 ⊤ ⊤", "0 ⊥ ⊤ 1"],
};
const TOR: Frozen = Frozen {
    name: "tor",
    order: TRUTH_ORDER,
    rows: ["0 ⊥ ⊤ 1", "⊥ ⊥ 1 1", "⊤ 1 ⊤ 1", "1 1 1 1"],
};
const KAND: Frozen = Frozen {
    name: "kand",
    order: KNOWLEDGE_ORDER,
    rows: ["⊥ ⊥ ⊥ ⊥", "⊥ 0 ⊥ 0", "⊥ ⊥ 1 1", "⊥ 0 1 ⊤"],
};
const KOR: Frozen = Frozen {
    name: "kor",
    order: KNOWLEDGE_ORDER,
    rows: ["⊥ 0 1 ⊤", "0 0 ⊤ ⊤", "1 ⊤ 1 ⊤", "⊤ ⊤ ⊤ ⊤"],
};
const IMP: Frozen = Frozen {
    name: "imp",
    order: TRUTH_ORDER,
    rows: ["1 1 1 1", "1 1 1 1", "0 ⊥ ⊤ 1", "0 ⊥ ⊤ 1"],
};
const OOA: Frozen = Frozen {
    name: "ooa",
    order: KNOWLEDGE_ORDER,
    rows: ["⊥ 0 1 ⊤", "0 ⊤ ⊤ ⊤", "1 ⊤ ⊤ ⊤", "⊤ ⊤ ⊤ ⊤"],
};
const UN: Frozen = Frozen {
    name: "un",
    order: KNOWLEDGE_ORDER,
    rows: ["⊥ ⊤ ⊤ ⊤", "⊤ 0 ⊤ ⊤", "⊤ ⊤ 1 ⊤", "⊤ ⊤ ⊤ ⊤"],
};
/// Negation as (input, output) pairs.
const NOT: [(&str, &str); 4] = [("0", "1"), ("⊥", "⊥"), ("⊤", "⊤"), ("1", "0")];

/// Columns: d, d', −d, −d', −d ⊗ −d', −(−d ⊗ −d'), d ⊕ d'.
const KOR_ENCODING: [&str; 16] = [
    "⊥ ⊥ ⊤ ⊤ ⊤ ⊥ ⊥",
    "⊥ 0 ⊤ 0 0 0 0",
    "⊥ 1 ⊤ 1 1 1 1",
    "⊥ ⊤ ⊤ ⊥ ⊥ ⊤ ⊤",
    "0 ⊥ 0 ⊤ 0 0 0",
    "0 0 0 0 0 0 0",
    "0 1 0 1 ⊥ ⊤ ⊤",
    "0 ⊤ 0 ⊥ ⊥ ⊤ ⊤",
    "1 ⊥ 1 ⊤ 1 1 1",
    "1 0 1 0 ⊥ ⊤ ⊤",
    "1 1 1 1 1 1 1",
    "1 ⊤ 1 ⊥ ⊥ ⊤ ⊤",
    "⊤ ⊥ ⊥ ⊤ ⊥ ⊤ ⊤",
    "⊤ 0 ⊥ 0 ⊥ ⊤ ⊤",
    "⊤ 1 ⊥ 1 ⊥ ⊤ ⊤",
    "⊤ ⊤ ⊥ ⊥ ⊥ ⊤ ⊤",
];

fn op<'a>(reg: &'a OpRegistry, name: &str) -> &'a OpTable {
    reg.get(name).unwrap_or_else(|| panic!("operator {name} registered"))
}

fn criterion_1() -> Check {
    let reg = standard_registry();
    let (conf, kand, kor) = (op(&reg, "conf"), op(&reg, "kand"), op(&reg, "kor"));
    for line in KOR_ENCODING {
        let r = row(line);
        let (d, e) = (r[0], r[1]);
        let computed = [
            conf.d1(d),
            conf.d1(e),
            kand.d2(conf.d1(d), conf.d1(e)),
            conf.d1(kand.d2(conf.d1(d), conf.d1(e))),
            kor.d2(d, e),
        ];
        ensure(computed == r[2..], || format!("row ({d},{e}): computed {computed:?}, table {:?}", &r[2..]))?;
        ensure(r[5] == r[6], || format!("row ({d},{e}): encoding column differs from join column"))?;
    }
    Ok("16 rows match".into())
}

fn criterion_2() -> Check {
    let reg = belnap_ops();
    let mut checked = 0;
    for frozen in [&TAND, &TOR, &KAND, &KOR, &IMP] {
        let o = op(&reg, frozen.name);
        for (x, y, v) in frozen.entries() {
            ensure(o.d2(x, y) == v, || format!("{}({x},{y}) = {}, expected {v}", frozen.name, o.d2(x, y)))?;
            checked += 1;
        }
    }
    let not = op(&reg, "not");
    for (x, v) in NOT {
        ensure(not.d1(tok(x)) == tok(v), || format!("not({x}) mismatch"))?;
        checked += 1;
    }
    for (name, v) in [("bot", "⊥"), ("0", "0"), ("1", "1"), ("top", "⊤")] {
        let c = op(&reg, name);
        ensure(c.arity() == 0 && c.value() == tok(v).index(), || format!("constant {name}"))?;
    }
    Ok(format!("{checked} entries across six tables, four constants"))
}

fn criterion_3() -> Check {
    let reg = new_unary_ops();
    let r = check_canonical_completeness(&[op(&reg, "not")], &knowledge_lattice()).map_err(|e| e.to_string())?;
    ensure(!r.complete, || "reported complete".into())?;
    ensure(r.invariants.iter().any(|i| i == "f(bot)=bot"), || format!("invariants {:?}", r.invariants))?;
    ensure(r.missing.iter().any(|m| m == "σ_bot^0"), || format!("missing {:?}", r.missing))?;
    Ok(format!("incomplete; witness f(bot)=bot; {} selection operators missing", r.missing.len()))
}

fn criterion_4() -> Check {
    let ops = standard_registry().subset(&["conf", "kand"]).map_err(|e| e.to_string())?;
    let r = check_functional_completeness(&ops, &knowledge_lattice()).map_err(|e| e.to_string())?;
    ensure(!r.complete, || "reported complete".into())?;
    ensure(r.selection.invariants.iter().any(|i| i == "f(0)=0"), || {
        format!("invariants {:?}", r.selection.invariants)
    })?;
    Ok(format!("incomplete; witness f(0)=0 over {} reachable functions", r.selection.reachable))
}

fn criterion_5() -> Check {
    let k = knowledge_lattice();
    let reg = new_unary_ops();
    let trans = normal_form_unary_space(&[op(&reg, "t0"), op(&reg, "t1"), op(&reg, "ttop")], &k)
        .map_err(|e| e.to_string())?;
    let closure = unary_closure(&[op(&reg, "ttop"), op(&reg, "cyc")], 4).map_err(|e| e.to_string())?;
    let closure_ops: Vec<OpTable> = closure
        .functions()
        .into_iter()
        .enumerate()
        .map(|(i, t)| OpTable::unary(format!("u{i}"), t).unwrap())
        .collect();
    let refs: Vec<&OpTable> = closure_ops.iter().collect();
    let conf_cyc = normal_form_unary_space(&refs, &k).map_err(|e| e.to_string())?;
    for (name, space) in [("transpositions", &trans), ("conf,cyc closure", &conf_cyc)] {
        ensure(space.len() == 256, || format!("{name}: {} functions", space.len()))?;
        // All 16 (a, j) pairs, each table written out from the definition.
        for a in 0..4 {
            for j in 0..4 {
                let table: Vec<usize> = (0..4).map(|x| if x == a { j } else { 0 }).collect();
                ensure(space.contains(&table), || format!("{name}: σ_{a}^{j} missing"))?;
            }
        }
    }
    Ok("both spaces hold all 256 functions and all 16 selection operators".into())
}

fn criterion_6() -> Check {
    let reg = new_unary_ops();
    let size = |names: &[&OpTable]| generated_subgroup(names).map(|s| s.len()).map_err(|e| e.to_string());
    let a = size(&[op(&reg, "t0"), op(&reg, "t1"), op(&reg, "ttop")])?;
    let b = size(&[op(&reg, "ttop"), op(&reg, "cyc")])?;
    let c = size(&[op(&reg, "t1"), op(&reg, "cyc")])?;
    ensure(a == 24 && b == 24 && c < 24, || format!("sizes {a}, {b}, {c}"))?;
    Ok(format!("subgroup orders {a}, {b}, {c}"))
}

fn random_table(rng: &mut StdRng) -> DecisionTable {
    let n = rng.random_range(1..=3);
    let vars = (1..=n).map(|i| format!("p{i}")).collect();
    let mut rows = Vec::new();
    for x in all_inputs(n) {
        if rng.random_bool(0.4) {
            rows.push((x, Decision::ALL[rng.random_range(0..4)]));
        }
    }
    DecisionTable::from_rows(vars, "p", rows).unwrap()
}

fn criterion_7() -> Check {
    let section = DecisionTable::from_rows(
        vec!["p1".into(), "p2".into(), "p3".into()],
        "p",
        [
            ("⊥ 0 0", "0"),
            ("0 0 0", "0"),
            ("1 0 0", "⊤"),
            ("1 1 0", "1"),
            ("1 1 1", "1"),
        ]
        .map(|(x, v)| (row(x), tok(v))),
    )
    .unwrap();
    let mut tables = vec![section, OOA.table(), UN.table(), KOR.table()];
    let mut rng = StdRng::seed_from_u64(0x5eed_7ab1e);
    tables.extend((0..256).map(|_| random_table(&mut rng)));
    let mut inputs = 0;
    for (i, t) in tables.iter().enumerate() {
        for basis in [Basis::ConfCyc, Basis::Transpositions] {
            let f = compile(t, basis);
            validate_normal_form(&f).map_err(|v| format!("table {i}: {v}"))?;
            for x in all_inputs(t.arity()) {
                let got = f.eval(&x).map_err(|e| e.to_string())?;
                ensure(got == t.lookup(&x), || format!("table {i} over {basis} at {x:?}: {got} vs {}", t.lookup(&x)))?;
                inputs += 1;
            }
        }
    }
    Ok(format!("{} tables, {inputs} evaluations", tables.len()))
}

fn criterion_8() -> Check {
    // Operator tables of J.
    let not1 = [1, 0, 2];
    let not2 = [2, 1, 0];
    let meet = |x: usize, y: usize| x.min(y);
    let reg = jobe_ops();
    for x in 0..3 {
        ensure(op(&reg, "j1").apply1(x) == not1[x] && op(&reg, "j2").apply1(x) == not2[x], || "unary tables".into())?;
        for y in 0..3 {
            ensure(op(&reg, "jand").apply2(x, y) == meet(x, y), || "jand table".into())?;
        }
    }
    let n1 = |x: usize| not1[x];
    let n2 = |x: usize| not2[x];
    type Nf = fn(usize, &dyn Fn(usize) -> usize, &dyn Fn(usize) -> usize) -> usize;
    let forms: [(usize, usize, Nf); 7] = [
        (9, 0, |x, a, b| x.min(a(x)).min(b(x))),
        (0, 1, |x, a, b| a(x).min(b(a(x)))),
        (1, 1, |x, _, b| x.min(b(x))),
        (2, 1, |x, a, b| a(b(x)).min(b(a(b(x))))),
        (0, 2, |x, a, b| b(x).min(a(b(x)))),
        (1, 2, |x, a, b| b(a(x)).min(b(a(b(x))))),
        (2, 2, |x, a, _| x.min(a(x))),
    ];
    let j = jobe_lattice();
    for (a, out, f) in forms {
        for x in 0..3 {
            let want = if out == 0 { 0 } else { selection_op(&[a], out, &j).unwrap().eval(&[x]) };
            ensure(f(x, &n1, &n2) == want, || format!("σ_{a}^{out}({x})"))?;
        }
    }
    let r = check_canonical_suitability(&reg, &j).map_err(|e| e.to_string())?;
    ensure(r.suitable, || "J not suitable".into())?;
    for x in 0..3 {
        for y in 0..3 {
            ensure(n2(meet(n2(x), n2(y))) == x.max(y), || format!("join formula at ({x},{y})"))?;
        }
    }
    let join = r.join.ok_or("no join witness")?;
    Ok(format!("seven normal forms exact; join witness {join}"))
}

fn criterion_9() -> Check {
    let mut sizes = Vec::new();
    for m in 3..=5 {
        let gens = totally_ordered_generators(m).map_err(|e| e.to_string())?;
        let ops = gens.ops.subset(&["dagger", "cyc", "tand"]).map_err(|e| e.to_string())?;
        let lattice = chain_lattice(m).map_err(|e| e.to_string())?;
        let report = analyze(&ops, &lattice).map_err(|e| e.to_string())?;
        ensure(report.functionally_complete && report.canonically_complete, || format!("m={m}: {report}"))?;
        let unary: Vec<&OpTable> = ops.with_arity(1).collect();
        let space = normal_form_unary_space(&unary, &lattice).map_err(|e| e.to_string())?;
        ensure(space.len() == m.pow(m as u32), || format!("m={m}: {} functions", space.len()))?;
        ensure(unary_selection_ops(&lattice).iter().all(|s| space.contains_selection(s)), || {
            format!("m={m}: selection operator missing")
        })?;
        sizes.push(space.len());
    }
    Ok(format!("normal-form spaces of size {sizes:?}"))
}

const ATTRS: [&str; 3] = ["a", "b", "c"];
const VALUES: [&str; 2] = ["x", "y"];
const BINARY: [&str; 7] = ["kand", "kor", "tand", "tor", "imp", "ooa", "un"];
const UNARY: [&str; 6] = ["conf", "cyc", "not", "t0", "t1", "ttop"];

fn random_target(rng: &mut StdRng) -> Target {
    let mut tests = Vec::new();
    for a in ATTRS {
        if rng.random_bool(0.3) {
            tests.push((a.to_string(), VALUES[rng.random_range(0..2)].to_string()));
        }
    }
    Target::new(tests).unwrap()
}

fn random_policy(rng: &mut StdRng, depth: usize) -> PolicyNode {
    let leaf = depth == 0 || rng.random_bool(0.2);
    if leaf {
        let d = if rng.random_bool(0.5) { Decision::Allow } else { Decision::Deny };
        return PolicyNode::Atomic(random_target(rng), d);
    }
    match rng.random_range(0..3) {
        0 => PolicyNode::scoped(random_target(rng), random_policy(rng, depth - 1)),
        1 => {
            let len = rng.random_range(1..=3);
            let word = (0..len).map(|_| UNARY[rng.random_range(0..UNARY.len())].to_string()).collect();
            PolicyNode::unary(GeneratorWord(word), random_policy(rng, depth - 1))
        }
        _ => PolicyNode::binary(
            BINARY[rng.random_range(0..BINARY.len())],
            random_policy(rng, depth - 1),
            random_policy(rng, depth - 1),
        ),
    }
}

fn criterion_10() -> Check {
    let mut rng = StdRng::seed_from_u64(0x1d_e7e4);
    let mut count = 0;
    for _ in 0..600 {
        let p = random_policy(&mut rng, 5);
        ensure(p.depth() <= 5, || "generator exceeded depth".into())?;
        // Every attribute present and error-free, so no target is indeterminate.
        let mut q = Request::new();
        for a in ATTRS {
            q = q.with(a, VALUES[rng.random_range(0..2)]);
        }
        let strict = eval_policy(&p, &q).map_err(|e| e.to_string())?;
        let sets = eval_policy_ind(&p, &q).map_err(|e| e.to_string())?;
        ensure(sets == DecisionSet::singleton(strict), || format!("{p:?}: {sets} vs {strict}"))?;
        count += 1;
    }
    Ok(format!("{count} random policies"))
}

fn criterion_11() -> Check {
    let mut lists: Vec<Vec<XacmlDecision>> = vec![vec![]];
    let mut frontier = lists.clone();
    for _ in 0..4 {
        frontier = frontier
            .iter()
            .flat_map(|l| {
                XacmlDecision::ALL.iter().map(move |&d| {
                    let mut v = l.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
        lists.extend(frontier.iter().cloned());
    }
    ensure(lists.len() == 341, || format!("{} lists", lists.len()))?;
    for l in &lists {
        ensure(combine_kand(l) == combine_kand_fold(l), || format!("{l:?}"))?;
    }
    ensure(combine_kand(&[XacmlDecision::Permit, XacmlDecision::Deny]) == XacmlDecision::NotApplicable, || {
        "[Permit, Deny]".into()
    })?;
    ensure(combine_kand(&[]) == XacmlDecision::Conflict, || "[]".into())?;
    Ok("341 lists agree".into())
}

fn criterion_12() -> Check {
    let mut names = Vec::new();
    for l in [knowledge_lattice(), truth_lattice()]
        .into_iter()
        .chain((2..=8).map(|m| chain_lattice(m).unwrap()))
    {
        validate_lattice(&l).map_err(|v| format!("{}: {v}", l.name()))?;
        names.push(l.name().to_string());
    }
    check_interlaced(&knowledge_lattice(), &truth_lattice()).map_err(|e| e.to_string())?;
    Ok(format!("{} lattices valid; 4k and 4t interlaced", names.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("join encoded through conflation and meet", Duration::from_millis(1), criterion_1),
        ("Belnap operator tables", Duration::MAX, criterion_2),
        ("negation alone is not canonically complete", Duration::from_secs(1), criterion_3),
        ("conflation with meet is not functionally complete", Duration::from_secs(1), criterion_4),
        ("normal-form spaces of the complete bases", Duration::from_secs(5), criterion_5),
        ("generated subgroups", Duration::from_secs(1), criterion_6),
        ("compiler soundness", Duration::from_secs(30), criterion_7),
        ("Jobe's three-valued logic", Duration::MAX, criterion_8),
        ("chains of size 3 to 5", Duration::from_secs(60), criterion_9),
        ("indeterminacy agrees with strict evaluation", Duration::MAX, criterion_10),
        ("combining algorithm equals folded meet", Duration::MAX, criterion_11),
        ("lattice laws and interlacing", Duration::MAX, criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > *budget {
                Err(format!("{detail}; took {elapsed:?}, budget {budget:?}"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

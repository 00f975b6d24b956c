use std::collections::{BTreeSet, HashMap, VecDeque};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fixtures;

fn leaf(name: &str) -> Task {
    Task::action(name, TaskType::Input)
}

fn chain(names: &[&str], op: TemporalOperator) -> TaskModel {
    let children = names.iter().map(|n| leaf(n)).collect::<Vec<_>>();
    let ops = vec![op; names.len() - 1];
    TaskModel::new("chain", Task::composite("root", children, ops)).unwrap()
}

fn concurrent(n: usize) -> TaskModel {
    if n == 1 {
        return TaskModel::new("c1", leaf("A0")).unwrap();
    }
    let names: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    chain(&refs, TemporalOperator::Concurrency)
}

fn permutations(n: usize) -> BTreeSet<Vec<usize>> {
    // Heap's algorithm.
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if k <= 1 {
            out.insert(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut out = BTreeSet::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

#[test]
fn car_rental_has_five_top_level_branches() {
    let model = fixtures::car_rental();
    assert_eq!(model.root().children.len(), 5);
    assert_eq!(model.top_level_branches().len(), 5);
    assert_eq!(model.action_count(), 17);
}

#[test]
fn single_leaf_document() {
    let m = parse_task_model(r#"<task name="T1" type="input"/>"#).unwrap();
    assert_eq!(m.root().name, "T1");
    assert_eq!(m.actions(), ["T1"]);
    assert_eq!(m.dfs_linearization(), vec!["T1"]);
    let seqs = m.enumerate_action_sequences(None).unwrap();
    assert_eq!(seqs.len(), 1);
}

#[test]
fn duplicate_names_are_rejected() {
    let doc = r#"<task name="T"><task name="T1" type="input"/><op kind=">>"/><task name="T1" type="input"/></task>"#;
    assert_eq!(
        parse_task_model(doc).unwrap_err(),
        TaskModelError::DuplicateName("T1".into())
    );
}

#[test]
fn schema_errors_name_the_element_and_line() {
    let doc = "<task name=\"T\">\n  <task name=\"A\" type=\"input\"/>\n  <op kind=\"~\"/>\n  <task name=\"B\" type=\"input\"/>\n</task>";
    assert_eq!(
        parse_task_model(doc).unwrap_err(),
        TaskModelError::UnknownOperator("~".into())
    );
    let doc = "<task name=\"T\">\n  <task name=\"A\" type=\"input\"/>\n  <task name=\"B\" type=\"input\"/>\n</task>";
    match parse_task_model(doc).unwrap_err() {
        TaskModelError::Schema { element, line, .. } => {
            assert_eq!(element, "task");
            assert_eq!(line, 3);
        }
        e => panic!("unexpected {e}"),
    }
    let doc = r#"<task name="A" type="input" dataType="Colour"/>"#;
    assert_eq!(
        parse_task_model(doc).unwrap_err(),
        TaskModelError::UnknownDataType("Colour".into())
    );
    let doc = r#"<task name="A" type="input" colour="red"/>"#;
    assert!(matches!(
        parse_task_model(doc).unwrap_err(),
        TaskModelError::Schema { .. }
    ));
}

#[test]
fn structural_invariants_are_checked() {
    let one_child = Task::composite("root", vec![leaf("A")], vec![]);
    assert!(matches!(
        TaskModel::new("m", one_child),
        Err(TaskModelError::Invalid { .. })
    ));
    let missing_op = Task::composite("root", vec![leaf("A"), leaf("B")], vec![]);
    assert!(TaskModel::new("m", missing_op).is_err());
    let bad_optional = Task::composite(
        "root",
        vec![leaf("A"), leaf("B")],
        vec![TemporalOperator::Enabling],
    )
    .optional();
    assert!(TaskModel::new("m", bad_optional).is_err());
    let mut untyped = leaf("A");
    untyped.task_type = None;
    assert!(TaskModel::new("m", untyped).is_err());
}

#[test]
fn serialization_round_trips() {
    for model in fixtures::all_models() {
        let text = serialize_task_model(&model);
        let again = parse_task_model(&text).unwrap();
        assert_eq!(again, model, "{}", model.name());
        assert_eq!(serialize_task_model(&again), text);
    }
}

#[test]
fn leaf_root_serializes_in_minimal_form() {
    let m = TaskModel::new("solo", leaf("T1")).unwrap();
    let text = serialize_task_model(&m);
    assert!(text.contains("<task name=\"T1\" category=\"interactive\" type=\"input\"/>"));
    assert_eq!(parse_task_model(&text).unwrap(), m);
}

#[test]
fn car_rental_matches_golden_serialization() {
    let golden = include_str!("../../fixtures/golden/car-rental.serialized.xml");
    assert_eq!(serialize_task_model(&fixtures::car_rental()), golden);
}

#[test]
fn enabling_chain_has_one_sequence() {
    let m = chain(&["T1", "T2", "T3"], TemporalOperator::Enabling);
    let seqs = m.enumerate_action_sequences(None).unwrap();
    assert_eq!(seqs.len(), 1);
    assert_eq!(seqs[0].actions, vec!["T1", "T2", "T3"]);
}

#[test]
fn concurrent_counts_match_permutation_oracle() {
    for n in 1..=7 {
        let m = concurrent(n);
        let got: BTreeSet<Vec<usize>> = m.sequences().collect();
        assert_eq!(got, permutations(n), "n = {n}");
    }
    assert_eq!(concurrent(3).sequences().count(), 6);
}

#[test]
fn limit_is_a_deterministic_prefix() {
    let m = fixtures::bank_transfer();
    let all = m.enumerate_action_sequences(None).unwrap();
    let first = m.enumerate_action_sequences(Some(7)).unwrap();
    assert_eq!(first, all[..7]);
    assert_eq!(
        m.enumerate_action_sequences(Some(0)),
        Err(TaskModelError::ZeroLimit)
    );
    let ids: Vec<Vec<usize>> = m.sequences().collect();
    assert!(ids.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
}

#[test]
fn optional_actions_are_present_or_absent() {
    let m = fixtures::bank_transfer();
    let seqs: Vec<Vec<usize>> = m.sequences().collect();
    let address = m.action_id("Beneficiary address").unwrap();
    let comment = m.action_id("Comment").unwrap();
    assert!(seqs.iter().any(|s| s.contains(&address)));
    assert!(seqs
        .iter()
        .any(|s| !s.contains(&address) && !s.contains(&comment)));
    // choice: never both account kinds
    let (iban, classic) = (
        m.action_id("IBAN").unwrap(),
        m.action_id("Classic").unwrap(),
    );
    assert!(seqs
        .iter()
        .all(|s| !(s.contains(&iban) && s.contains(&classic))));
}

#[test]
fn order_independence_keeps_subtrees_whole() {
    let a = Task::composite(
        "A",
        vec![leaf("a1"), leaf("a2")],
        vec![TemporalOperator::Enabling],
    );
    let b = Task::composite(
        "B",
        vec![leaf("b1"), leaf("b2")],
        vec![TemporalOperator::Enabling],
    );
    let m = TaskModel::new(
        "oi",
        Task::composite(
            "root",
            vec![a, b],
            vec![TemporalOperator::OrderIndependence],
        ),
    )
    .unwrap();
    let seqs: BTreeSet<Vec<String>> = m
        .enumerate_action_sequences(None)
        .unwrap()
        .into_iter()
        .map(|s| s.actions)
        .collect();
    let expected: BTreeSet<Vec<String>> =
        [vec!["a1", "a2", "b1", "b2"], vec!["b1", "b2", "a1", "a2"]]
            .into_iter()
            .map(|v| v.into_iter().map(String::from).collect())
            .collect();
    assert_eq!(seqs, expected);
}

#[test]
fn disabling_interrupts_at_any_prefix() {
    let left = Task::composite(
        "L",
        vec![leaf("A"), leaf("B")],
        vec![TemporalOperator::Enabling],
    );
    let m = TaskModel::new(
        "dis",
        Task::composite(
            "root",
            vec![left, leaf("X")],
            vec![TemporalOperator::Disabling],
        ),
    )
    .unwrap();
    let seqs: BTreeSet<Vec<String>> = m
        .enumerate_action_sequences(None)
        .unwrap()
        .into_iter()
        .map(|s| s.actions)
        .collect();
    let expected: BTreeSet<Vec<String>> = [vec!["X"], vec!["A", "X"], vec!["A", "B", "X"]]
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();
    assert_eq!(seqs, expected);
}

#[test]
fn appendix_example_groups_by_priority() {
    let m = fixtures::appendix();
    match &m.expr().kind {
        ExprKind::Op(TemporalOperator::Enabling, parts) => {
            assert_eq!(parts.len(), 3);
            assert!(matches!(
                parts[0].kind,
                ExprKind::Op(TemporalOperator::Concurrency, _)
            ));
        }
        other => panic!("unexpected grouping {other:?}"),
    }
}

#[test]
fn dfs_of_fig4() {
    let m = fixtures::fig4();
    assert_eq!(
        m.dfs_linearization(),
        vec!["T1", "T2", "T3", "T4", "T5", "T6", "T7"]
    );
}

fn bfs_distance(task: &Task, a: &str, b: &str) -> usize {
    let mut adj: HashMap<String, Vec<String>> = HashMap::new();
    fn walk(t: &Task, adj: &mut HashMap<String, Vec<String>>) {
        for c in &t.children {
            adj.entry(t.name.clone()).or_default().push(c.name.clone());
            adj.entry(c.name.clone()).or_default().push(t.name.clone());
            walk(c, adj);
        }
    }
    walk(task, &mut adj);
    let mut seen = HashMap::from([(a.to_string(), 0usize)]);
    let mut queue = VecDeque::from([a.to_string()]);
    while let Some(n) = queue.pop_front() {
        let d = seen[&n];
        if n == b {
            return d;
        }
        for m in adj.get(&n).into_iter().flatten() {
            if !seen.contains_key(m) {
                seen.insert(m.clone(), d + 1);
                queue.push_back(m.clone());
            }
        }
    }
    unreachable!()
}

#[test]
fn task_distance_examples() {
    let m = fixtures::example1();
    assert_eq!(m.task_distance("T11", "T11").unwrap(), 0);
    assert_eq!(m.task_distance("T11", "T12").unwrap(), 2);
    assert_eq!(
        m.task_distance("T11", "T3").unwrap(),
        bfs_distance(m.root(), "T11", "T3")
    );
    assert_eq!(m.task_distance("T11", "T3").unwrap(), 3);
    assert!(matches!(
        m.task_distance("T11", "nope"),
        Err(TaskModelError::UnknownAction(_))
    ));
}

#[test]
fn fixture_sequences_replay_through_state_machine() {
    for m in fixtures::all_models() {
        for s in m.sequences().take(5_000) {
            let mut st = m.start_state();
            for &a in &s {
                assert!(m.step(&mut st, a));
            }
            assert!(m.is_complete_state(&st));
        }
    }
}

/// Random task tree with unique names `N0..` for property tests.
pub(crate) fn random_model(seed: u64, max_leaves: usize, ops: &[TemporalOperator]) -> TaskModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counter = 0;
    fn build(
        rng: &mut ChaCha8Rng,
        budget: usize,
        depth: usize,
        counter: &mut usize,
        ops: &[TemporalOperator],
    ) -> Task {
        let name = format!("N{}", *counter);
        *counter += 1;
        if budget < 2 || depth > 2 || rng.gen_bool(0.3) {
            let mut t = Task::action(name, TaskType::Input);
            t.optional = rng.gen_bool(0.15);
            return t;
        }
        let k = rng.gen_range(2..=budget.min(3));
        let mut children = Vec::new();
        let mut left = budget;
        for i in 0..k {
            let share = if i == k - 1 {
                left
            } else {
                (left / (k - i)).max(1)
            };
            left -= share;
            children.push(build(rng, share, depth + 1, counter, ops));
        }
        let operators = (0..k - 1)
            .map(|_| ops[rng.gen_range(0..ops.len())])
            .collect();
        Task::composite(name, children, operators)
    }
    let root = build(&mut rng, max_leaves, 0, &mut counter, ops);
    TaskModel::new("random", root).unwrap()
}

pub(crate) const ALL_OPS: [TemporalOperator; 5] = [
    TemporalOperator::Enabling,
    TemporalOperator::Concurrency,
    TemporalOperator::Choice,
    TemporalOperator::Disabling,
    TemporalOperator::OrderIndependence,
];

fn replace_first_concurrency(task: &mut Task) -> bool {
    if let Some(op) = task
        .operators
        .iter_mut()
        .find(|o| **o == TemporalOperator::Concurrency)
    {
        *op = TemporalOperator::Enabling;
        return true;
    }
    task.children.iter_mut().any(replace_first_concurrency)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enabling_only_models_have_the_dfs_sequence(seed in any::<u64>()) {
        let m = random_model(seed, 6, &[TemporalOperator::Enabling]);
        let seqs: Vec<Vec<usize>> = m.sequences().collect();
        let all_mandatory = (0..m.action_count()).all(|a| !m.is_optional(a));
        if all_mandatory {
            prop_assert_eq!(seqs.len(), 1);
            prop_assert_eq!(m.names(&seqs[0]), m.dfs_linearization());
        }
        // the DFS order is always among the sequences
        let dfs: Vec<usize> = (0..m.action_count()).collect();
        prop_assert!(seqs.contains(&dfs));
    }

    #[test]
    fn dfs_is_a_permutation_of_the_vocabulary(seed in any::<u64>()) {
        let m = random_model(seed, 7, &ALL_OPS);
        let mut dfs = m.dfs_linearization();
        dfs.sort();
        let mut vocab = m.actions().to_vec();
        vocab.sort();
        prop_assert_eq!(dfs, vocab);
    }

    #[test]
    fn enabling_never_adds_sequences(seed in any::<u64>()) {
        let m = random_model(seed, 6, &[TemporalOperator::Concurrency, TemporalOperator::Enabling, TemporalOperator::Choice]);
        let mut root = m.root().clone();
        if replace_first_concurrency(&mut root) {
            let relaxed = TaskModel::new("r", root).unwrap();
            prop_assert!(relaxed.sequences().count() <= m.sequences().count());
        }
    }

    #[test]
    fn distance_is_a_tree_metric(seed in any::<u64>(), i in 0usize..8, j in 0usize..8, k in 0usize..8) {
        let m = random_model(seed, 8, &ALL_OPS);
        let n = m.action_count();
        let (a, b, c) = (m.action_name(i % n), m.action_name(j % n), m.action_name(k % n));
        let ab = m.task_distance(a, b).unwrap();
        prop_assert_eq!(ab, m.task_distance(b, a).unwrap());
        prop_assert_eq!(ab == 0, a == b);
        prop_assert!(ab <= m.task_distance(a, c).unwrap() + m.task_distance(c, b).unwrap());
        prop_assert_eq!(ab, bfs_distance(m.root(), a, b));
    }

    #[test]
    fn serialization_round_trips_random_models(seed in any::<u64>()) {
        let m = random_model(seed, 8, &ALL_OPS);
        prop_assert_eq!(parse_task_model(&serialize_task_model(&m)).unwrap(), m);
    }
}

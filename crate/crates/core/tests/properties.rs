use iufst::automata::Dfa;
use iufst::convert::{sweep_reduce, to_min_dfa, to_nfa};
use iufst::oracle::{
    compare_languages, enumerate_words, predicate_to_min_dfa, Acceptor, Bounded, Predicate,
};
use iufst::run::{run, run_deterministic, sweep, SweepOutcome, DEFAULT_TAPE_CAP};
use iufst::textio::{parse_machine, serialize_machine, MachineFile};
use iufst::{SweepBound, SymbolId, Transducer, TransducerBuilder};
use proptest::prelude::*;

const READS: [&str; 4] = ["a", "b", "c", "<"];

/// (from, read, to, write) as indices into the state list and `READS`.
type Edge = (usize, usize, usize, usize);

fn build(n: usize, k: usize, accepting: &[bool], edges: &[Edge]) -> Transducer {
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut b = TransducerBuilder::new();
    b.states(states.iter().cloned())
        .input("a")
        .input("b")
        .output("a")
        .output("b")
        .output("c")
        .output("<")
        .endmarker("<")
        .initial("q0")
        .sweeps(SweepBound::Constant(k));
    for (i, &acc) in accepting.iter().enumerate().take(n) {
        if acc {
            b.accept(states[i].clone());
        }
    }
    for &(p, x, q, y) in edges {
        b.transition(
            states[p % n].clone(),
            READS[x],
            states[q % n].clone(),
            READS[y],
        );
    }
    b.build().expect("generated machine is well formed")
}

fn niufst(max_k: usize) -> impl Strategy<Value = Transducer> {
    (1..=3usize, 1..=max_k).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(any::<bool>(), 3),
            prop::collection::vec((0..3usize, 0..4usize, 0..3usize, 0..4usize), 0..16),
        )
            .prop_map(move |(acc, edges)| build(n, k, &acc, &edges))
    })
}

fn iufst(max_k: usize) -> impl Strategy<Value = Transducer> {
    (1..=3usize, 1..=max_k).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(any::<bool>(), 3),
            prop::collection::vec(prop::option::of((0..3usize, 0..4usize)), 12),
        )
            .prop_map(move |(acc, table)| {
                let edges: Vec<Edge> = table
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i / 4 < n)
                    .filter_map(|(i, e)| e.map(|(q, y)| (i / 4, i % 4, q, y)))
                    .collect();
                build(n, k, &acc, &edges)
            })
    })
}

fn word_over(t: &Transducer, bits: &[bool]) -> Vec<SymbolId> {
    let w: Vec<&str> = bits.iter().map(|&b| if b { "b" } else { "a" }).collect();
    t.word(&w).expect("binary input")
}

fn tape_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..4usize, 1..10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sweeps_preserve_length(t in niufst(2), cells in tape_strategy()) {
        let tape: Vec<SymbolId> = cells.iter().map(|&c| t.symbol_id(READS[c]).unwrap()).collect();
        for out in sweep(&t, &tape).unwrap() {
            if let SweepOutcome::Completed { output, .. } = out {
                prop_assert_eq!(output.len(), tape.len());
            }
        }
    }

    #[test]
    fn deterministic_sweeps_have_one_outcome(t in iufst(2), cells in tape_strategy()) {
        prop_assert!(t.is_deterministic());
        let tape: Vec<SymbolId> = cells.iter().map(|&c| t.symbol_id(READS[c]).unwrap()).collect();
        prop_assert!(sweep(&t, &tape).unwrap().len() <= 1);
    }

    #[test]
    fn acceptance_is_monotone_in_sweeps(t in niufst(3), bits in prop::collection::vec(any::<bool>(), 0..7)) {
        let w = word_over(&t, &bits);
        let mut seen = false;
        for s in 1..=5 {
            let r = run(&t, &w, s, DEFAULT_TAPE_CAP).unwrap();
            prop_assert!(!r.cap_hit);
            prop_assert!(!seen || r.accepted);
            seen = r.accepted;
        }
    }

    #[test]
    fn deterministic_run_agrees_with_search(t in iufst(3)) {
        for w in enumerate_words(&["a", "b"], 8) {
            let word = t.word(&w).unwrap();
            let d = run_deterministic(&t, &word, 6).unwrap();
            let r = run(&t, &word, 6, DEFAULT_TAPE_CAP).unwrap();
            prop_assert_eq!(d.report.accepted, r.accepted);
            prop_assert_eq!(d.report.min_accept_sweeps, r.min_accept_sweeps);
        }
    }

    #[test]
    fn one_sweep_machines_are_nfas(t in niufst(1)) {
        let nfa = to_nfa(&t).unwrap();
        prop_assert!(compare_languages(&Bounded::new(&t, 1), &nfa, &["a", "b"], 8).unwrap().is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nfa_size_within_bound(t in niufst(2)) {
        let n = t.num_states();
        let k = t.constant_sweeps().unwrap() as u32;
        let states = to_nfa(&t).unwrap().num_states();
        prop_assert!(states <= (1..=k).map(|i| n.pow(i)).sum::<usize>());
        if n >= 2 || k <= 2 {
            prop_assert!(states <= 2 * n.pow(k));
        }
    }

    #[test]
    fn sweep_reduction_keeps_language(t in niufst(3), i in 1..=3usize) {
        let k = t.constant_sweeps().unwrap();
        prop_assume!(i <= k);
        let r = sweep_reduce(&t, i).unwrap();
        prop_assert!(r.machine.num_states() as u128 <= r.universe_states);
        let diffs = compare_languages(&Bounded::new(&t, k), &Bounded::new(&r.machine, k), &["a", "b"], 5).unwrap();
        prop_assert!(diffs.is_empty(), "{:?}", diffs);
        let a = to_min_dfa(&t).unwrap();
        let b = to_min_dfa(&r.machine).unwrap();
        prop_assert!(a.is_isomorphic(&b));
    }

    #[test]
    fn sweep_reduction_keeps_determinism(t in iufst(3), i in 1..=3usize) {
        let k = t.constant_sweeps().unwrap();
        prop_assume!(i <= k);
        prop_assert!(sweep_reduce(&t, i).unwrap().machine.is_deterministic());
    }

    #[test]
    fn minimization_is_idempotent(t in niufst(2)) {
        let d: Dfa = to_min_dfa(&t).unwrap();
        let again = d.minimize();
        prop_assert_eq!(again.num_states(), d.num_states());
        prop_assert!(again.is_isomorphic(&d));
    }

    #[test]
    fn textio_round_trip(t in niufst(3)) {
        let file = MachineFile::transducer(t);
        let text = serialize_machine(&file);
        let parsed = parse_machine(&text).unwrap();
        prop_assert_eq!(&parsed, &file);
        prop_assert_eq!(serialize_machine(&parsed), text);
    }

    #[test]
    fn comparison_is_symmetric(a in niufst(2), b in niufst(2)) {
        let (x, y) = (Bounded::new(&a, 2), Bounded::new(&b, 2));
        prop_assert_eq!(
            compare_languages(&x, &y, &["a", "b"], 4).unwrap(),
            compare_languages(&y, &x, &["a", "b"], 4).unwrap()
        );
    }
}

#[test]
fn predicate_dfa_is_stable_under_larger_budgets() {
    type Pred = Box<dyn Fn(&[&str]) -> bool>;
    let preds: Vec<Pred> = vec![
        Box::new(|w: &[&str]| w.len() % 3 == 1),
        Box::new(|w: &[&str]| w.iter().filter(|s| **s == "b").count() % 2 == 0),
        Box::new(|w: &[&str]| w.len() >= 2 && w[w.len() - 2] == "a"),
    ];
    for p in &preds {
        let small = predicate_to_min_dfa(p.as_ref(), &["a", "b"], 8).unwrap();
        let large = predicate_to_min_dfa(p.as_ref(), &["a", "b"], 10).unwrap();
        assert!(small.is_isomorphic(&large));
        assert!(
            compare_languages(&small, &Predicate(|w: &[&str]| p(w)), &["a", "b"], 10)
                .unwrap()
                .is_empty()
        );
        assert!(Acceptor::accepts(&large, &[]).unwrap() == p(&[]));
    }
}

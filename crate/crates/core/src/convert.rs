//! Sweep reduction, conversion of constant-sweep transducers to finite
//! automata, and the embedding of NFAs as one-sweep transducers.

use indexmap::IndexSet;
use thiserror::Error;

use crate::automata::{AutomatonError, Dfa, Nfa};
use crate::machine::{ModelError, StateId, SweepBound, SymbolId, Transducer, TransducerBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("machine has no constant sweep bound")]
    NotConstant,
    #[error("reduction parameter {i} outside 1..={k}")]
    BadParameter { i: usize, k: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// Result of [`sweep_reduce`]: the reduced machine (reachable tuples only)
/// and the size of the full tuple universe the construction ranges over.
#[derive(Clone, Debug)]
pub struct SweepReduction {
    pub machine: Transducer,
    pub universe_states: u128,
}

/// Σ_{t=0..i} nᵗ, the number of tuples of arity `i` whose dummy lanes form
/// a suffix.
pub fn reduced_universe_size(n: usize, i: usize) -> u128 {
    (0..=i as u32).map(|t| (n as u128).pow(t)).sum()
}

/// A lane symbol: an original symbol or the dummy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Lane<T> {
    Live(T),
    Dummy,
}

type Tuple = Vec<Lane<StateId>>;

/// Every (successor tuple, emitted symbol) pair from `tuple` on `x`.
fn tuple_moves(
    t: &Transducer,
    tuple: &[Lane<StateId>],
    x: Lane<SymbolId>,
) -> Vec<(Tuple, Lane<SymbolId>)> {
    fn rec(
        t: &Transducer,
        tuple: &[Lane<StateId>],
        lane: usize,
        y: Lane<SymbolId>,
        dummy_now: bool,
        acc: &mut Tuple,
        out: &mut Vec<(Tuple, Lane<SymbolId>)>,
    ) {
        if lane == tuple.len() {
            out.push((acc.clone(), y));
            return;
        }
        let live = match (dummy_now, tuple[lane], y) {
            (false, Lane::Live(s), Lane::Live(y)) => Some(t.moves(s, y)),
            _ => None,
        };
        match live {
            Some(moves) if !moves.is_empty() => {
                for &(r, z) in moves {
                    acc.push(Lane::Live(r));
                    rec(t, tuple, lane + 1, Lane::Live(z), false, acc, out);
                    acc.pop();
                }
            }
            Some(_) => {
                acc.push(Lane::Dummy);
                rec(t, tuple, lane + 1, Lane::Dummy, true, acc, out);
                acc.pop();
            }
            None => {
                acc.push(Lane::Dummy);
                rec(t, tuple, lane + 1, Lane::Dummy, dummy_now, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(t, tuple, 0, x, false, &mut Vec::new(), &mut out);
    let mut seen = IndexSet::new();
    out.retain(|m| seen.insert(m.clone()));
    out
}

fn tuple_name(t: &Transducer, tuple: &[Lane<StateId>]) -> String {
    let parts: Vec<&str> = tuple
        .iter()
        .map(|l| match l {
            Lane::Live(q) => t.state_name(*q),
            Lane::Dummy => "-",
        })
        .collect();
    format!("({})", parts.join(","))
}

fn tuple_accepting(t: &Transducer, tuple: &[Lane<StateId>]) -> bool {
    tuple
        .iter()
        .any(|l| matches!(l, Lane::Live(q) if t.is_accepting(*q)))
}

fn fresh_symbol(t: &Transducer, base: &str) -> String {
    let mut name = base.to_string();
    while t.symbol_id(&name).is_some() {
        name.push('\'');
    }
    name
}

/// Builds a machine that simulates `i` consecutive sweeps of `t` in each of
/// its own sweeps. The declared bound becomes ⌈k/i⌉.
pub fn sweep_reduce(t: &Transducer, i: usize) -> Result<SweepReduction, ConvertError> {
    let k = t.constant_sweeps().ok_or(ConvertError::NotConstant)?;
    if i == 0 || i > k {
        return Err(ConvertError::BadParameter { i, k });
    }
    let dummy = fresh_symbol(t, "d");
    let symbols: Vec<Lane<SymbolId>> = (0..t.num_symbols())
        .map(|s| Lane::Live(SymbolId::new(s)))
        .chain(std::iter::once(Lane::Dummy))
        .collect();
    let sym_name = |s: Lane<SymbolId>| match s {
        Lane::Live(s) => t.symbol_name(s).to_string(),
        Lane::Dummy => dummy.clone(),
    };

    let start: Tuple = vec![Lane::Live(t.initial()); i];
    let mut tuples: IndexSet<Tuple> = IndexSet::from([start]);
    let mut trans = Vec::new();
    let mut idx = 0;
    while idx < tuples.len() {
        let tuple = tuples[idx].clone();
        for &x in &symbols {
            for (next, y) in tuple_moves(t, &tuple, x) {
                let (j, _) = tuples.insert_full(next);
                trans.push((idx, x, j, y));
            }
        }
        idx += 1;
    }

    let mut b = TransducerBuilder::new();
    let names: Vec<String> = tuples.iter().map(|tu| tuple_name(t, tu)).collect();
    b.states(names.iter().cloned());
    for &s in t.input_alphabet() {
        b.input(t.symbol_name(s));
    }
    for &s in t.output_alphabet() {
        b.output(t.symbol_name(s));
    }
    b.output(dummy.clone());
    b.endmarker(t.symbol_name(t.endmarker()));
    b.initial(names[0].clone());
    for (tu, name) in tuples.iter().zip(&names) {
        if tuple_accepting(t, tu) {
            b.accept(name.clone());
        }
    }
    for (p, x, q, y) in trans {
        b.transition(names[p].clone(), sym_name(x), names[q].clone(), sym_name(y));
    }
    b.sweeps(SweepBound::Constant(k.div_ceil(i)));
    Ok(SweepReduction {
        machine: b.build()?,
        universe_states: reduced_universe_size(t.num_states(), i),
    })
}

/// An NFA for the language of a constant-sweep machine: the k-lane tuple
/// automaton restricted to input symbols, accepting where the endmarker
/// step can reach a tuple with an accepting component.
pub fn to_nfa(t: &Transducer) -> Result<Nfa, ConvertError> {
    let k = t.constant_sweeps().ok_or(ConvertError::NotConstant)?;
    let inputs: Vec<String> = t.input_names();
    let start: Tuple = vec![Lane::Live(t.initial()); k];
    let mut tuples: IndexSet<Tuple> = IndexSet::from([start]);
    let mut trans = Vec::new();
    let mut idx = 0;
    while idx < tuples.len() {
        let tuple = tuples[idx].clone();
        for (a, &x) in t.input_alphabet().iter().enumerate() {
            for (next, _) in tuple_moves(t, &tuple, Lane::Live(x)) {
                // Every lane stuck: nothing can accept from here.
                if next.iter().all(|l| *l == Lane::Dummy) {
                    continue;
                }
                let (j, _) = tuples.insert_full(next);
                trans.push((idx, a, j));
            }
        }
        idx += 1;
    }
    let names: Vec<String> = tuples.iter().map(|tu| tuple_name(t, tu)).collect();
    let mut nfa = Nfa::new(&inputs, &names[0]);
    for n in &names[1..] {
        nfa.add_state(n);
    }
    let end = Lane::Live(t.endmarker());
    for (q, tu) in tuples.iter().enumerate() {
        let acc = tuple_moves(t, tu, end)
            .iter()
            .any(|(next, _)| tuple_accepting(t, next));
        nfa.set_accepting(q, acc);
    }
    for (p, a, q) in trans {
        nfa.add_transition(p, a, q);
    }
    Ok(nfa)
}

/// Minimal complete DFA of a constant-sweep machine.
pub fn to_min_dfa(t: &Transducer) -> Result<Dfa, ConvertError> {
    Ok(to_nfa(t)?.determinize().minimize())
}

/// Embeds an NFA as a one-sweep transducer with identity output and one
/// fresh accepting state entered on the endmarker.
pub fn nfa_to_1niufst(n: &Nfa) -> Transducer {
    let fresh = |base: &str, taken: &dyn Fn(&str) -> bool| {
        let mut name = base.to_string();
        while taken(&name) {
            name.push('\'');
        }
        name
    };
    let accept = fresh("acc", &|s| n.state_id(s).is_some());
    let end = fresh("<", &|s| n.symbol_id(s).is_some());
    let mut b = TransducerBuilder::new();
    for q in 0..n.num_states() {
        b.state(n.state_name(q));
    }
    b.state(accept.clone());
    for a in n.alphabet() {
        b.input(a.clone());
        b.output(a.clone());
    }
    b.output(end.clone())
        .endmarker(end.clone())
        .initial(n.state_name(n.initial()))
        .accept(accept.clone())
        .sweeps(SweepBound::Constant(1));
    for &(p, a, q) in n.transitions() {
        let sym = &n.alphabet()[a];
        b.transition(n.state_name(p), sym.clone(), n.state_name(q), sym.clone());
    }
    for q in 0..n.num_states() {
        if n.is_accepting(q) {
            b.transition(n.state_name(q), end.clone(), accept.clone(), end.clone());
        }
    }
    b.build().expect("embedding of a valid NFA")
}

/// Names of the original states per lane of a reduced state name, used to
/// relate reduced machines back to their source in tests.
pub fn lane_names(reduced_state: &str) -> Vec<String> {
    reduced_state
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(str::to_string)
        .collect()
}

/// Counts of a minimal DFA in both conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DfaSize {
    pub complete: usize,
    pub partial: usize,
}

pub fn minimal_dfa_size(d: &Dfa) -> DfaSize {
    DfaSize {
        complete: d.minimize().num_states(),
        partial: d.partial_state_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::{run, DEFAULT_TAPE_CAP};

    /// Two sweeps: the first marks, the second accepts iff the word was
    /// all a's. Deterministic, 2 states.
    fn two_sweep() -> Transducer {
        let mut b = TransducerBuilder::new();
        b.states(["s", "f"])
            .input("a")
            .input("b")
            .output("a")
            .output("b")
            .output("m")
            .output("<")
            .output("[")
            .endmarker("<")
            .initial("s")
            .accept("f")
            .sweeps(SweepBound::Constant(2))
            .transition("s", "a", "s", "m")
            .transition("s", "<", "s", "[")
            .transition("s", "m", "s", "m")
            .transition("s", "[", "f", "[");
        b.build().unwrap()
    }

    fn words(max: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max {
            let mut next = Vec::new();
            for w in &layer {
                for a in 0..2 {
                    let mut v: Vec<usize> = w.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn universe_formula() {
        assert_eq!(reduced_universe_size(3, 2), 13);
        assert!(reduced_universe_size(3, 2) <= 2 * 9);
    }

    #[test]
    fn reduction_preserves_language_and_determinism() {
        let t = two_sweep();
        for i in 1..=2 {
            let r = sweep_reduce(&t, i).unwrap();
            assert!(r.machine.is_deterministic());
            assert!(r.machine.num_states() as u128 <= r.universe_states);
            let k = r.machine.constant_sweeps().unwrap();
            assert_eq!(k, 2usize.div_ceil(i));
            for w in words(6) {
                let ids: Vec<SymbolId> = w.iter().map(|&a| t.input_alphabet()[a]).collect();
                let rids = r.machine.word(&t.tape_names(&ids)).unwrap();
                assert_eq!(
                    run(&t, &ids, 2, DEFAULT_TAPE_CAP).unwrap().accepted,
                    run(&r.machine, &rids, k, DEFAULT_TAPE_CAP)
                        .unwrap()
                        .accepted,
                    "i={i} w={w:?}"
                );
            }
        }
    }

    #[test]
    fn bad_parameters() {
        let t = two_sweep();
        assert_eq!(
            sweep_reduce(&t, 3).unwrap_err(),
            ConvertError::BadParameter { i: 3, k: 2 }
        );
        assert!(matches!(
            sweep_reduce(&t, 0),
            Err(ConvertError::BadParameter { .. })
        ));
        let u = t.clone().with_sweep_bound(Some(SweepBound::Linear));
        assert_eq!(sweep_reduce(&u, 1).unwrap_err(), ConvertError::NotConstant);
    }

    #[test]
    fn nfa_matches_machine() {
        let t = two_sweep();
        let n = to_nfa(&t).unwrap();
        assert!(n.num_states() <= 2 * 2usize.pow(2));
        for w in words(6) {
            let ids: Vec<SymbolId> = w.iter().map(|&a| t.input_alphabet()[a]).collect();
            assert_eq!(
                n.accepts(&w),
                run(&t, &ids, 2, DEFAULT_TAPE_CAP).unwrap().accepted
            );
        }
    }

    #[test]
    fn embedding_has_one_extra_state() {
        let mut n = Nfa::new(&["a"], "p");
        let q = n.add_state("q");
        n.add_transition(0, 0, q);
        n.set_accepting(q, true);
        let t = nfa_to_1niufst(&n);
        assert_eq!(t.num_states(), 3);
        for len in 0..6 {
            let w = vec![t.input_alphabet()[0]; len];
            assert_eq!(run(&t, &w, 1, DEFAULT_TAPE_CAP).unwrap().accepted, len == 1);
        }
        let back = to_nfa(&t).unwrap();
        for len in 0..8 {
            assert_eq!(back.accepts(&vec![0; len]), n.accepts(&vec![0; len]));
        }
    }

    #[test]
    fn lane_names_split() {
        assert_eq!(lane_names("(q0,-)"), vec!["q0", "-"]);
    }
}

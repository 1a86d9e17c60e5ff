//! Sweep-level execution: single sweeps, bounded breadth-first runs over
//! tapes, deterministic runs with cycle detection, trace extraction and the
//! accept-mode sweep check.

use std::collections::{HashMap, HashSet, VecDeque};

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::machine::{StateId, SymbolId, Tape, Transducer};

/// Default number of distinct tapes explored before a run gives up.
pub const DEFAULT_TAPE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("tape symbol #{0} at position {1} is not in the machine's alphabets")]
    MalformedTape(usize, usize),
    #[error("input symbol `{0}` at position {1} is not in the input alphabet")]
    MalformedInput(String, usize),
    #[error("machine is not deterministic")]
    Nondeterministic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SweepOutcome {
    Completed { state: StateId, output: Tape },
    Stuck { position: usize, state: StateId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RunReport {
    pub accepted: bool,
    pub min_accept_sweeps: Option<usize>,
    pub tapes_explored: usize,
    pub cap_hit: bool,
}

/// All outcomes of one sweep over `tape`, starting in the initial state.
pub fn sweep(t: &Transducer, tape: &[SymbolId]) -> Result<Vec<SweepOutcome>, RunError> {
    for (i, &s) in tape.iter().enumerate() {
        if s.index() >= t.num_symbols() {
            return Err(RunError::MalformedTape(s.index(), i));
        }
    }
    Ok(sweep_unchecked(t, tape))
}

const ROOT: u32 = 0;

/// Output prefixes shared between branches, stored as a trie.
struct PrefixArena {
    nodes: Vec<(u32, SymbolId)>,
    index: HashMap<(u32, SymbolId), u32>,
}

impl PrefixArena {
    fn new() -> Self {
        PrefixArena {
            nodes: vec![(ROOT, SymbolId::new(0))],
            index: HashMap::new(),
        }
    }

    fn child(&mut self, parent: u32, sym: SymbolId) -> u32 {
        let next = self.nodes.len() as u32;
        *self.index.entry((parent, sym)).or_insert_with(|| {
            self.nodes.push((parent, sym));
            next
        })
    }

    fn word(&self, mut node: u32, len: usize) -> Tape {
        let mut out = vec![SymbolId::new(0); len];
        for slot in out.iter_mut().rev() {
            let (parent, sym) = self.nodes[node as usize];
            *slot = sym;
            node = parent;
        }
        Tape::new(out)
    }
}

pub(crate) fn sweep_unchecked(t: &Transducer, tape: &[SymbolId]) -> Vec<SweepOutcome> {
    let mut arena = PrefixArena::new();
    let mut layer: IndexSet<(StateId, u32)> = IndexSet::new();
    layer.insert((t.initial(), ROOT));
    let mut stuck: IndexSet<(usize, StateId)> = IndexSet::new();
    for (pos, &x) in tape.iter().enumerate() {
        let mut next = IndexSet::new();
        for &(q, node) in &layer {
            let moves = t.moves(q, x);
            if moves.is_empty() {
                stuck.insert((pos, q));
            }
            for &(r, y) in moves {
                next.insert((r, arena.child(node, y)));
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    let mut out: Vec<SweepOutcome> = layer
        .into_iter()
        .map(|(state, node)| SweepOutcome::Completed {
            state,
            output: arena.word(node, tape.len()),
        })
        .collect();
    out.extend(
        stuck
            .into_iter()
            .map(|(position, state)| SweepOutcome::Stuck { position, state }),
    );
    out
}

/// Successor tapes of one sweep, split by whether the sweep ended accepting.
struct Step {
    accepting: bool,
    continuing: Vec<Tape>,
}

fn step(t: &Transducer, tape: &[SymbolId]) -> Step {
    let mut accepting = false;
    let mut continuing = Vec::new();
    for o in sweep_unchecked(t, tape) {
        if let SweepOutcome::Completed { state, output } = o {
            if t.is_accepting(state) {
                accepting = true;
            } else {
                continuing.push(output);
            }
        }
    }
    Step {
        accepting,
        continuing,
    }
}

fn check_word(t: &Transducer, word: &[SymbolId]) -> Result<(), RunError> {
    for (i, &s) in word.iter().enumerate() {
        if s.index() >= t.num_symbols() || !t.is_input_symbol(s) {
            let name = if s.index() < t.num_symbols() {
                t.symbol_name(s).to_string()
            } else {
                format!("#{}", s.index())
            };
            return Err(RunError::MalformedInput(name, i));
        }
    }
    Ok(())
}

struct Exploration {
    report: RunReport,
    trace: Option<Vec<Tape>>,
}

fn explore(
    t: &Transducer,
    word: &[SymbolId],
    max_sweeps: usize,
    tape_cap: usize,
) -> Result<Exploration, RunError> {
    check_word(t, word)?;
    let mut seen: IndexMap<Tape, Option<usize>> = IndexMap::new();
    seen.insert(t.initial_tape(word), None);
    let mut frontier = vec![0usize];
    let mut report = RunReport::default();
    for round in 1..=max_sweeps {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for &idx in &frontier {
            let (tape, _) = seen.get_index(idx).expect("frontier index");
            let s = step(t, tape);
            if s.accepting {
                report.accepted = true;
                report.min_accept_sweeps = Some(round);
                report.tapes_explored = seen.len();
                let mut trace = vec![];
                let mut cur = Some(idx);
                while let Some(i) = cur {
                    let (tape, parent) = seen.get_index(i).expect("trace index");
                    trace.push(tape.clone());
                    cur = *parent;
                }
                trace.reverse();
                // The accepting sweep's own output closes the trace.
                let last = accepting_output(t, &trace[trace.len() - 1]);
                trace.push(last);
                return Ok(Exploration {
                    report,
                    trace: Some(trace),
                });
            }
            for out in s.continuing {
                if !seen.contains_key(&out) {
                    seen.insert(out, Some(idx));
                    next.push(seen.len() - 1);
                    if seen.len() > tape_cap {
                        report.cap_hit = true;
                        report.tapes_explored = seen.len();
                        return Ok(Exploration {
                            report,
                            trace: None,
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    report.tapes_explored = seen.len();
    Ok(Exploration {
        report,
        trace: None,
    })
}

fn accepting_output(t: &Transducer, tape: &[SymbolId]) -> Tape {
    sweep_unchecked(t, tape)
        .into_iter()
        .find_map(|o| match o {
            SweepOutcome::Completed { state, output } if t.is_accepting(state) => Some(output),
            _ => None,
        })
        .expect("accepting sweep")
}

/// Breadth-first run over sets of tapes, at most `max_sweeps` rounds.
pub fn run(
    t: &Transducer,
    word: &[SymbolId],
    max_sweeps: usize,
    tape_cap: usize,
) -> Result<RunReport, RunError> {
    Ok(explore(t, word, max_sweeps, tape_cap)?.report)
}

/// One accepting computation as its tape sequence (initial tape first,
/// output of the accepting sweep last), if one exists within the bounds.
pub fn find_accepting_trace(
    t: &Transducer,
    word: &[SymbolId],
    max_sweeps: usize,
    tape_cap: usize,
) -> Result<Option<Vec<Tape>>, RunError> {
    Ok(explore(t, word, max_sweeps, tape_cap)?.trace)
}

/// Why a deterministic run stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Halt {
    Accepted,
    Stuck {
        sweep: usize,
        position: usize,
        state: StateId,
    },
    /// The tape after `sweep` equals the tape after `first_seen`.
    Cycle {
        sweep: usize,
        first_seen: usize,
    },
    SweepLimit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicRun {
    pub report: RunReport,
    /// The initial tape followed by the output of every completed sweep.
    pub trace: Vec<Tape>,
    pub halt: Halt,
}

pub fn run_deterministic(
    t: &Transducer,
    word: &[SymbolId],
    max_sweeps: usize,
) -> Result<DeterministicRun, RunError> {
    if !t.is_deterministic() {
        return Err(RunError::Nondeterministic);
    }
    check_word(t, word)?;
    let mut trace = vec![t.initial_tape(word)];
    let mut outputs: HashMap<Tape, usize> = HashMap::new();
    let mut report = RunReport::default();
    let mut halt = Halt::SweepLimit;
    for s in 1..=max_sweeps {
        let cur = trace.last().expect("non-empty trace");
        match sweep_unchecked(t, cur).pop() {
            Some(SweepOutcome::Completed { state, output }) => {
                trace.push(output.clone());
                if t.is_accepting(state) {
                    report.accepted = true;
                    report.min_accept_sweeps = Some(s);
                    halt = Halt::Accepted;
                    break;
                }
                if let Some(&first_seen) = outputs.get(&output) {
                    halt = Halt::Cycle {
                        sweep: s,
                        first_seen,
                    };
                    break;
                }
                outputs.insert(output, s);
            }
            Some(SweepOutcome::Stuck { position, state }) => {
                halt = Halt::Stuck {
                    sweep: s,
                    position,
                    state,
                };
                break;
            }
            None => unreachable!("a sweep always has an outcome"),
        }
    }
    report.tapes_explored = trace.len();
    Ok(DeterministicRun {
        report,
        trace,
        halt,
    })
}

/// Number of sweeps after which accepting halts can occur on one word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcceptSweeps {
    Finite(usize),
    /// Accepting halts exist after arbitrarily many sweeps.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordAcceptMode {
    pub word: Vec<SymbolId>,
    /// Largest sweep count of any accepting halt; `None` if the word is
    /// rejected (or the exploration was inconclusive).
    pub max_accept_sweeps: Option<AcceptSweeps>,
    pub bound: usize,
    pub inconclusive: bool,
}

impl WordAcceptMode {
    pub fn violates(&self) -> bool {
        match self.max_accept_sweeps {
            Some(AcceptSweeps::Finite(s)) => s > self.bound,
            Some(AcceptSweeps::Unbounded) => true,
            None => false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AcceptModeReport {
    pub words: Vec<WordAcceptMode>,
}

impl AcceptModeReport {
    pub fn violations(&self) -> impl Iterator<Item = &WordAcceptMode> {
        self.words.iter().filter(|w| w.violates())
    }

    pub fn inconclusive(&self) -> impl Iterator<Item = &WordAcceptMode> {
        self.words.iter().filter(|w| w.inconclusive)
    }

    pub fn passes(&self) -> bool {
        self.violations().next().is_none() && self.inconclusive().next().is_none()
    }
}

/// Checks, for each word, that no accepting computation halts after more
/// than `bound(|w|)` sweeps. The whole reachable tape graph is built, up to
/// `tape_cap` tapes per word.
pub fn check_accept_mode(
    t: &Transducer,
    words: &[Vec<SymbolId>],
    bound: &dyn Fn(usize) -> usize,
    tape_cap: usize,
) -> Result<AcceptModeReport, RunError> {
    let mut report = AcceptModeReport::default();
    for w in words {
        check_word(t, w)?;
        let b = bound(w.len());
        let entry = match accept_sweep_range(t, w, tape_cap) {
            Some(max) => WordAcceptMode {
                word: w.clone(),
                max_accept_sweeps: max,
                bound: b,
                inconclusive: false,
            },
            None => WordAcceptMode {
                word: w.clone(),
                max_accept_sweeps: None,
                bound: b,
                inconclusive: true,
            },
        };
        report.words.push(entry);
    }
    Ok(report)
}

/// `None` when the cap was hit; otherwise the largest accepting sweep.
fn accept_sweep_range(
    t: &Transducer,
    word: &[SymbolId],
    tape_cap: usize,
) -> Option<Option<AcceptSweeps>> {
    let mut nodes: IndexSet<Tape> = IndexSet::new();
    nodes.insert(t.initial_tape(word));
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut accepts: Vec<bool> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let s = step(t, &nodes[i]);
        if edges.len() <= i {
            edges.resize(i + 1, Vec::new());
            accepts.resize(i + 1, false);
        }
        accepts[i] = s.accepting;
        let mut succ = Vec::new();
        for out in s.continuing {
            let (j, new) = nodes.insert_full(out);
            if new {
                if nodes.len() > tape_cap {
                    return None;
                }
                queue.push_back(j);
            }
            succ.push(j);
        }
        edges[i] = succ;
    }
    let n = nodes.len();
    edges.resize(n, Vec::new());
    accepts.resize(n, false);

    // Nodes from which an accepting halt is reachable.
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, es) in edges.iter().enumerate() {
        for &j in es {
            rev[j].push(i);
        }
    }
    let mut useful = accepts.clone();
    let mut stack: Vec<usize> = (0..n).filter(|&i| accepts[i]).collect();
    while let Some(j) = stack.pop() {
        for &i in &rev[j] {
            if !useful[i] {
                useful[i] = true;
                stack.push(i);
            }
        }
    }
    if !useful[0] {
        return Some(None);
    }
    // Longest path to an accepting node within the useful subgraph; a cycle
    // there means unboundedly late accepting halts.
    let mut longest: Vec<Option<usize>> = vec![None; n];
    let mut state = vec![0u8; n];
    let mut stack = vec![(0usize, 0usize)];
    state[0] = 1;
    while let Some(&(v, k)) = stack.last() {
        if k < edges[v].len() {
            let u = edges[v][k];
            stack.last_mut().expect("non-empty stack").1 += 1;
            if !useful[u] {
                continue;
            }
            match state[u] {
                0 => {
                    state[u] = 1;
                    stack.push((u, 0));
                }
                1 => return Some(Some(AcceptSweeps::Unbounded)),
                _ => {}
            }
        } else {
            let mut best = if accepts[v] { Some(0) } else { None };
            for &u in &edges[v] {
                if let Some(l) = longest[u].filter(|_| useful[u]) {
                    best = Some(best.map_or(l + 1, |b: usize| b.max(l + 1)));
                }
            }
            longest[v] = best;
            state[v] = 2;
            stack.pop();
        }
    }
    Some(longest[0].map(|l| AcceptSweeps::Finite(l + 1)))
}

/// Tapes reachable at sweep boundaries, used by tests that inspect the
/// whole computation tree.
pub fn reachable_tapes(t: &Transducer, word: &[SymbolId], max_sweeps: usize) -> HashSet<Tape> {
    let mut seen: HashSet<Tape> = HashSet::from([t.initial_tape(word)]);
    let mut frontier: Vec<Tape> = seen.iter().cloned().collect();
    for _ in 0..max_sweeps {
        let mut next = Vec::new();
        for tape in &frontier {
            for out in step(t, tape).continuing {
                if seen.insert(out.clone()) {
                    next.push(out);
                }
            }
        }
        frontier = next;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::TransducerBuilder;

    fn identity(accepting: bool) -> Transducer {
        let mut b = TransducerBuilder::new();
        b.state("q0")
            .input("a")
            .input("b")
            .output("a")
            .output("b")
            .output("<")
            .endmarker("<")
            .initial("q0");
        for x in ["a", "b", "<"] {
            b.transition("q0", x, "q0", x);
        }
        if accepting {
            b.accept("q0");
        }
        b.build().unwrap()
    }

    /// Accepts at sweep 1 and, along another branch, at sweep 3.
    fn late_acceptor() -> Transducer {
        let mut b = TransducerBuilder::new();
        b.states(["s", "f", "g"])
            .input("a")
            .output("<")
            .output("1")
            .output("2")
            .output("3")
            .endmarker("<")
            .initial("s")
            .accept("f")
            .transition("s", "<", "f", "<")
            .transition("s", "<", "g", "1")
            .transition("s", "1", "g", "2")
            .transition("s", "2", "f", "3");
        b.build().unwrap()
    }

    #[test]
    fn identity_sweep_copies() {
        let t = identity(false);
        let w = t.parse_word("ab").unwrap();
        let tape = t.initial_tape(&w);
        let out = sweep(&t, &tape).unwrap();
        assert_eq!(
            out,
            vec![SweepOutcome::Completed {
                state: t.initial(),
                output: tape.clone()
            }]
        );
    }

    #[test]
    fn undefined_first_cell_is_stuck() {
        let mut b = TransducerBuilder::new();
        b.state("q0")
            .input("a")
            .output("a")
            .output("<")
            .endmarker("<")
            .initial("q0");
        let t = b.build().unwrap();
        let tape = t.initial_tape(&t.parse_word("a").unwrap());
        assert_eq!(
            sweep(&t, &tape).unwrap(),
            vec![SweepOutcome::Stuck {
                position: 0,
                state: t.initial()
            }]
        );
    }

    #[test]
    fn malformed_tape_is_rejected() {
        let t = identity(false);
        assert!(matches!(
            sweep(&t, &[SymbolId::new(99)]),
            Err(RunError::MalformedTape(99, 0))
        ));
    }

    #[test]
    fn zero_sweeps_rejects_without_cap() {
        let t = identity(true);
        let r = run(&t, &[], 0, DEFAULT_TAPE_CAP).unwrap();
        assert!(!r.accepted);
        assert!(!r.cap_hit);
    }

    #[test]
    fn identity_without_accept_cycles() {
        let t = identity(false);
        let w = t.parse_word("a").unwrap();
        let r = run_deterministic(&t, &w, 10).unwrap();
        assert_eq!(
            r.halt,
            Halt::Cycle {
                sweep: 2,
                first_seen: 1
            }
        );
        assert!(!r.report.accepted);
    }

    #[test]
    fn accepting_trace_has_expected_length() {
        let t = identity(true);
        let w = t.parse_word("ab").unwrap();
        let trace = find_accepting_trace(&t, &w, 3, 100).unwrap().unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0], t.initial_tape(&w));
    }

    #[test]
    fn accept_mode_flags_late_acceptance() {
        let t = late_acceptor();
        let rep = check_accept_mode(&t, &[vec![]], &|_| 2, 1000).unwrap();
        assert_eq!(
            rep.words[0].max_accept_sweeps,
            Some(AcceptSweeps::Finite(3))
        );
        assert_eq!(rep.violations().count(), 1);
        let ok = check_accept_mode(&t, &[vec![]], &|_| 3, 1000).unwrap();
        assert!(ok.passes());
        let r = run(&t, &[], 5, 1000).unwrap();
        assert_eq!(r.min_accept_sweeps, Some(1));
    }

    #[test]
    fn accept_mode_empty_list() {
        let t = late_acceptor();
        let rep = check_accept_mode(&t, &[], &|_| 1, 10).unwrap();
        assert!(rep.words.is_empty());
    }

    #[test]
    fn cap_hit_is_reported() {
        // Counts in binary on the tape, never accepting: many distinct tapes.
        let mut b = TransducerBuilder::new();
        b.states(["c", "k"])
            .input("0")
            .output("0")
            .output("1")
            .output("<")
            .endmarker("<")
            .initial("c")
            .transition("c", "1", "c", "0")
            .transition("c", "0", "k", "1")
            .transition("k", "0", "k", "0")
            .transition("k", "1", "k", "1")
            .transition("k", "<", "k", "<");
        let t = b.build().unwrap();
        let w = t.parse_word("0000000").unwrap();
        let r = run(&t, &w, 1000, 10).unwrap();
        assert!(r.cap_hit);
        assert!(!r.accepted);
    }
}

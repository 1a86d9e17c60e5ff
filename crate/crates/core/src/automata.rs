//! Classical finite automata: NFAs and DFAs with named states and symbols,
//! subset construction, minimization and boolean combinations.

use std::collections::{HashMap, VecDeque};

use indexmap::IndexMap;
use thiserror::Error;

use crate::machine::Interner;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("undeclared state `{0}`")]
    UnknownState(String),
    #[error("undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate transition from `{0}` on `{1}`")]
    DuplicateTransition(String, String),
    #[error("subset construction exceeded {0} states")]
    Budget(usize),
}

/// A nondeterministic finite automaton without ε-moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    states: Interner,
    alphabet: Interner,
    initial: usize,
    accepting: Vec<bool>,
    transitions: Vec<(usize, usize, usize)>,
    table: Vec<Vec<usize>>,
}

impl Nfa {
    /// An automaton over `alphabet` with a single initial state.
    pub fn new<S: AsRef<str>>(alphabet: &[S], initial: &str) -> Self {
        let alphabet: Interner = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        let mut nfa = Nfa {
            states: Interner::new(),
            alphabet,
            initial: 0,
            accepting: Vec::new(),
            transitions: Vec::new(),
            table: Vec::new(),
        };
        nfa.initial = nfa.add_state(initial);
        nfa
    }

    /// Adds a state, or returns the existing one with that name.
    pub fn add_state(&mut self, name: &str) -> usize {
        let (id, new) = self.states.intern(name);
        if new {
            self.accepting.push(false);
            self.table
                .extend(std::iter::repeat_with(Vec::new).take(self.alphabet.len()));
        }
        id
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial = q;
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn add_transition(&mut self, p: usize, a: usize, q: usize) {
        let cell = &mut self.table[p * self.alphabet.len() + a];
        if !cell.contains(&q) {
            cell.push(q);
            self.transitions.push((p, a, q));
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        self.states.name(q)
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.get(name)
    }

    pub fn alphabet(&self) -> &[String] {
        self.alphabet.names()
    }

    pub fn symbol_id(&self, name: &str) -> Option<usize> {
        self.alphabet.get(name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.transitions
    }

    pub fn successors(&self, p: usize, a: usize) -> &[usize] {
        &self.table[p * self.alphabet.len() + a]
    }

    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Option<Vec<usize>> {
        names.iter().map(|n| self.symbol_id(n.as_ref())).collect()
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut cur = vec![false; self.num_states()];
        cur[self.initial] = true;
        for &a in word {
            let mut next = vec![false; self.num_states()];
            for (p, _) in cur.iter().enumerate().filter(|(_, &on)| on) {
                for &q in self.successors(p, a) {
                    next[q] = true;
                }
            }
            cur = next;
        }
        cur.iter()
            .enumerate()
            .any(|(q, &on)| on && self.accepting[q])
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        seen[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(p) = stack.pop() {
            for a in 0..self.alphabet.len() {
                for &q in self.successors(p, a) {
                    if !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        seen
    }

    /// States from which an accepting state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let mut rev = vec![Vec::new(); self.num_states()];
        for &(p, _, q) in &self.transitions {
            rev[q].push(p);
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<usize> = (0..self.num_states()).filter(|&q| seen[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Reachable subset construction; state names list the subset members.
    pub fn determinize(&self) -> Dfa {
        self.determinize_bounded(usize::MAX)
            .expect("unbounded subset construction")
    }

    pub fn determinize_bounded(&self, cap: usize) -> Result<Dfa, AutomatonError> {
        let nsym = self.alphabet.len();
        let start = vec![self.initial];
        let mut subsets: IndexMap<Vec<usize>, ()> = IndexMap::new();
        subsets.insert(start, ());
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            let (set, _) = subsets.get_index(i).expect("subset");
            let set = set.clone();
            for a in 0..nsym {
                let mut next: Vec<usize> = set
                    .iter()
                    .flat_map(|&p| self.successors(p, a).iter().copied())
                    .collect();
                next.sort_unstable();
                next.dedup();
                if next.is_empty() {
                    continue;
                }
                let (j, new) = subsets.insert_full(next, ());
                if new.is_none() && subsets.len() > cap {
                    return Err(AutomatonError::Budget(cap));
                }
                edges.push((i, a, j));
            }
            i += 1;
        }
        let mut used = std::collections::HashSet::new();
        let names: Vec<String> = subsets
            .keys()
            .enumerate()
            .map(|(k, s)| {
                let inner: Vec<&str> = s.iter().map(|&q| self.state_name(q)).collect();
                let mut name = format!("{{{}}}", inner.join(","));
                if !used.insert(name.clone()) {
                    name = format!("{name}#{k}");
                    used.insert(name.clone());
                }
                name
            })
            .collect();
        let mut dfa = Dfa::new(self.alphabet.names(), &names[0]);
        for n in &names[1..] {
            dfa.add_state(n);
        }
        for (k, set) in subsets.keys().enumerate() {
            dfa.set_accepting(k, set.iter().any(|&q| self.accepting[q]));
        }
        for (p, a, q) in edges {
            dfa.add_transition(p, a, q)
                .expect("fresh subset transition");
        }
        Ok(dfa)
    }
}

/// A deterministic, possibly partial, finite automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    states: Interner,
    alphabet: Interner,
    initial: usize,
    accepting: Vec<bool>,
    transitions: Vec<(usize, usize, usize)>,
    table: Vec<Option<usize>>,
}

/// Boolean operation for [`Dfa::product`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Diff,
    Xor,
}

impl BoolOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::Diff => a && !b,
            BoolOp::Xor => a != b,
        }
    }
}

impl Dfa {
    pub fn new<S: AsRef<str>>(alphabet: &[S], initial: &str) -> Self {
        let alphabet: Interner = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        let mut dfa = Dfa {
            states: Interner::new(),
            alphabet,
            initial: 0,
            accepting: Vec::new(),
            transitions: Vec::new(),
            table: Vec::new(),
        };
        dfa.initial = dfa.add_state(initial);
        dfa
    }

    pub fn add_state(&mut self, name: &str) -> usize {
        let (id, new) = self.states.intern(name);
        if new {
            self.accepting.push(false);
            self.table
                .extend(std::iter::repeat_n(None, self.alphabet.len()));
        }
        id
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial = q;
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn add_transition(&mut self, p: usize, a: usize, q: usize) -> Result<(), AutomatonError> {
        let cell = &mut self.table[p * self.alphabet.len() + a];
        match *cell {
            Some(r) if r == q => Ok(()),
            Some(_) => Err(AutomatonError::DuplicateTransition(
                self.states.name(p).to_string(),
                self.alphabet.name(a).to_string(),
            )),
            None => {
                *cell = Some(q);
                self.transitions.push((p, a, q));
                Ok(())
            }
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        self.states.name(q)
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.get(name)
    }

    pub fn alphabet(&self) -> &[String] {
        self.alphabet.names()
    }

    pub fn symbol_id(&self, name: &str) -> Option<usize> {
        self.alphabet.get(name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.transitions
    }

    pub fn next(&self, p: usize, a: usize) -> Option<usize> {
        self.table[p * self.alphabet.len() + a]
    }

    pub fn is_complete(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Option<Vec<usize>> {
        names.iter().map(|n| self.symbol_id(n.as_ref())).collect()
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut q = self.initial;
        for &a in word {
            match self.next(q, a) {
                Some(r) => q = r,
                None => return false,
            }
        }
        self.accepting[q]
    }

    pub fn to_nfa(&self) -> Nfa {
        let mut nfa = Nfa::new(self.alphabet.names(), self.state_name(self.initial));
        for q in 0..self.num_states() {
            let id = nfa.add_state(self.state_name(q));
            nfa.set_accepting(id, self.accepting[q]);
        }
        for &(p, a, q) in &self.transitions {
            let (p, q) = (
                nfa.state_id(self.state_name(p)).expect("state"),
                nfa.state_id(self.state_name(q)).expect("state"),
            );
            nfa.add_transition(p, a, q);
        }
        nfa
    }

    /// Adds a rejecting sink for missing transitions (only if needed).
    pub fn complete(&self) -> Dfa {
        if self.is_complete() {
            return self.clone();
        }
        let mut out = self.clone();
        let mut name = "sink".to_string();
        while out.states.get(&name).is_some() {
            name.push('\'');
        }
        let sink = out.add_state(&name);
        for p in 0..out.num_states() {
            for a in 0..out.alphabet.len() {
                if out.next(p, a).is_none() {
                    out.add_transition(p, a, sink).expect("missing transition");
                }
            }
        }
        out
    }

    /// Same language over a larger alphabet; new symbols lead nowhere.
    pub fn extend_alphabet<S: AsRef<str>>(&self, alphabet: &[S]) -> Dfa {
        let mut out = Dfa::new(alphabet, self.state_name(self.initial));
        for q in 0..self.num_states() {
            let id = out.add_state(self.state_name(q));
            out.set_accepting(id, self.accepting[q]);
        }
        for &(p, a, q) in &self.transitions {
            let b = out
                .symbol_id(self.alphabet.name(a))
                .expect("alphabet must be a superset");
            out.add_transition(p, b, q).expect("copied transition");
        }
        out
    }

    /// The unique minimal complete DFA, with states in breadth-first order
    /// from the initial state.
    pub fn minimize(&self) -> Dfa {
        let d = self.complete();
        let nsym = d.alphabet.len();
        let reach = d.to_nfa().reachable();
        let live: Vec<usize> = (0..d.num_states()).filter(|&q| reach[q]).collect();
        let mut class: HashMap<usize, usize> = live
            .iter()
            .map(|&q| (q, usize::from(d.accepting[q])))
            .collect();
        let mut count = 0;
        loop {
            let mut sigs: IndexMap<Vec<usize>, usize> = IndexMap::new();
            let mut next = HashMap::new();
            for &q in &live {
                let mut sig = vec![class[&q]];
                sig.extend((0..nsym).map(|a| class[&d.next(q, a).expect("complete")]));
                let n = sigs.len();
                next.insert(q, *sigs.entry(sig).or_insert(n));
            }
            let c = sigs.len();
            class = next;
            if c == count {
                break;
            }
            count = c;
        }
        // Renumber classes in BFS order from the initial class.
        let rep: HashMap<usize, usize> = live.iter().rev().map(|&q| (class[&q], q)).collect();
        let mut order: IndexMap<usize, ()> = IndexMap::new();
        order.insert(class[&d.initial], ());
        let mut queue = VecDeque::from([class[&d.initial]]);
        while let Some(c) = queue.pop_front() {
            for a in 0..nsym {
                let t = class[&d.next(rep[&c], a).expect("complete")];
                if order.insert(t, ()).is_none() {
                    queue.push_back(t);
                }
            }
        }
        let names: Vec<String> = order
            .keys()
            .map(|c| d.state_name(rep[c]).to_string())
            .collect();
        let mut out = Dfa::new(d.alphabet.names(), &names[0]);
        for n in &names[1..] {
            out.add_state(n);
        }
        for (i, c) in order.keys().enumerate() {
            out.set_accepting(i, d.accepting[rep[c]]);
            for a in 0..nsym {
                let t = class[&d.next(rep[c], a).expect("complete")];
                let j = order.get_index_of(&t).expect("ordered class");
                out.add_transition(i, a, j).expect("fresh transition");
            }
        }
        out
    }

    /// Reachable states that cannot reach an accepting state.
    fn dead_states(&self) -> usize {
        let nfa = self.to_nfa();
        let reach = nfa.reachable();
        let co = nfa.coreachable();
        (0..self.num_states())
            .filter(|&q| reach[q] && !co[q])
            .count()
    }

    /// State count of the minimal automaton without its dead state.
    pub fn partial_state_count(&self) -> usize {
        let m = self.minimize();
        m.num_states() - m.dead_states()
    }

    /// States renumbered in BFS order with numeric names; two minimal DFAs
    /// accept the same language iff their canonical forms are equal.
    pub fn canonical(&self) -> Dfa {
        let nsym = self.alphabet.len();
        let mut order: IndexMap<usize, ()> = IndexMap::new();
        order.insert(self.initial, ());
        let mut queue = VecDeque::from([self.initial]);
        while let Some(p) = queue.pop_front() {
            for a in 0..nsym {
                if let Some(q) = self.next(p, a) {
                    if order.insert(q, ()).is_none() {
                        queue.push_back(q);
                    }
                }
            }
        }
        let mut out = Dfa::new(self.alphabet.names(), "0");
        for i in 1..order.len() {
            out.add_state(&i.to_string());
        }
        for (i, &p) in order.keys().enumerate() {
            out.set_accepting(i, self.accepting[p]);
            for a in 0..nsym {
                if let Some(q) = self.next(p, a) {
                    let j = order.get_index_of(&q).expect("reached");
                    out.add_transition(i, a, j).expect("fresh transition");
                }
            }
        }
        out
    }

    pub fn is_isomorphic(&self, other: &Dfa) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn complement(&self) -> Dfa {
        let mut out = self.complete();
        for q in 0..out.num_states() {
            out.accepting[q] = !out.accepting[q];
        }
        out
    }

    /// Product automaton over the union of both alphabets.
    pub fn product(&self, other: &Dfa, op: BoolOp) -> Dfa {
        let mut alphabet: Vec<String> = self.alphabet.names().to_vec();
        for s in other.alphabet.names() {
            if !alphabet.contains(s) {
                alphabet.push(s.clone());
            }
        }
        let a = self.extend_alphabet(&alphabet).complete();
        let b = other.extend_alphabet(&alphabet).complete();
        let nsym = alphabet.len();
        let mut pairs: IndexMap<(usize, usize), ()> = IndexMap::new();
        pairs.insert((a.initial, b.initial), ());
        let mut edges = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = *pairs.get_index(i).expect("pair").0;
            for s in 0..nsym {
                let t = (
                    a.next(p, s).expect("complete"),
                    b.next(q, s).expect("complete"),
                );
                let (j, _) = pairs.insert_full(t, ());
                edges.push((i, s, j));
            }
            i += 1;
        }
        let names: Vec<String> = pairs
            .keys()
            .map(|&(p, q)| format!("({},{})", a.state_name(p), b.state_name(q)))
            .collect();
        let mut out = Dfa::new(&alphabet, &names[0]);
        for n in &names[1..] {
            out.add_state(n);
        }
        for (k, &(p, q)) in pairs.keys().enumerate() {
            out.set_accepting(k, op.apply(a.accepting[p], b.accepting[q]));
        }
        for (p, s, q) in edges {
            out.add_transition(p, s, q).expect("fresh transition");
        }
        out
    }

    /// True iff no accepting state is reachable.
    pub fn is_empty(&self) -> bool {
        let reach = self.to_nfa().reachable();
        !(0..self.num_states()).any(|q| reach[q] && self.accepting[q])
    }

    /// A shortest accepted word, if any.
    pub fn shortest_word(&self) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(p) = queue.pop_front() {
            if self.accepting[p] {
                let mut word = Vec::new();
                let mut cur = p;
                while let Some((prev, a)) = parent[cur] {
                    word.push(a);
                    cur = prev;
                }
                word.reverse();
                return Some(word);
            }
            for a in 0..self.alphabet.len() {
                if let Some(q) = self.next(p, a) {
                    if !seen[q] {
                        seen[q] = true;
                        parent[q] = Some((p, a));
                        queue.push_back(q);
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// NFA for words over {a,b} whose second-to-last symbol is a.
    fn second_last_a() -> Nfa {
        let mut n = Nfa::new(&["a", "b"], "p");
        let q = n.add_state("q");
        let r = n.add_state("r");
        n.add_transition(0, 0, 0);
        n.add_transition(0, 1, 0);
        n.add_transition(0, 0, q);
        n.add_transition(q, 0, r);
        n.add_transition(q, 1, r);
        n.set_accepting(r, true);
        n
    }

    #[test]
    fn subset_construction_respects_bound() {
        let n = second_last_a();
        let d = n.determinize();
        assert!(d.num_states() <= 1 << n.num_states());
        for w in [&[0, 0][..], &[1, 0, 1], &[0, 1], &[1, 1]] {
            assert_eq!(n.accepts(w), d.accepts(w));
        }
    }

    #[test]
    fn minimal_second_last() {
        let d = second_last_a().determinize().minimize();
        assert_eq!(d.num_states(), 4);
        assert!(d.is_complete());
        assert_eq!(d.minimize(), d);
    }

    #[test]
    fn partial_count_drops_dead_state() {
        // Accepts exactly "a".
        let mut d = Dfa::new(&["a"], "s");
        let f = d.add_state("f");
        d.add_transition(0, 0, f).unwrap();
        d.set_accepting(f, true);
        let m = d.minimize();
        assert_eq!(m.num_states(), 3);
        assert_eq!(d.partial_state_count(), 2);
    }

    #[test]
    fn duplicate_dfa_transition_errors() {
        let mut d = Dfa::new(&["a"], "s");
        let t = d.add_state("t");
        d.add_transition(0, 0, 0).unwrap();
        assert!(d.add_transition(0, 0, t).is_err());
    }

    #[test]
    fn product_and_complement() {
        let d = second_last_a().determinize();
        let c = d.complement();
        assert!(d.product(&c, BoolOp::And).is_empty());
        assert!(d.product(&c, BoolOp::Or).complement().is_empty());
        assert_eq!(d.product(&d, BoolOp::Xor).shortest_word(), None);
        assert_eq!(d.shortest_word(), Some(vec![0, 0]));
    }

    #[test]
    fn equal_languages_have_isomorphic_minimal_dfas() {
        let a = second_last_a().determinize().minimize();
        let b = second_last_a()
            .determinize()
            .complement()
            .complement()
            .minimize();
        assert!(a.is_isomorphic(&b));
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(
            second_last_a().determinize_bounded(2),
            Err(AutomatonError::Budget(2))
        );
    }
}

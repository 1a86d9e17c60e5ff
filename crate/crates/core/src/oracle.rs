//! Brute-force ground truth: word enumeration, bounded language comparison,
//! minimal DFAs from membership predicates, sweep measurement and random
//! machines for fuzzing.

use std::collections::HashMap;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automata::{Dfa, Nfa};
use crate::lba::{run_lba, Lba};
use crate::machine::{SweepBound, Transducer, TransducerBuilder};
use crate::run::{run, RunError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exploration cap hit on word `{0}`")]
    CapHit(String),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("LBA did not halt within its step budget on `{0}`")]
    NoHalt(String),
    #[error("budget too small: {0}")]
    Budget(String),
}

/// Per-family word-length budgets used by the language checks.
pub mod budgets {
    /// Words over {0,1,#}.
    pub const BLOCK: usize = 11;
    /// Words over {a,b}, for E with (n,k) = (2,1), (2,2), (3,1), (3,2).
    pub const E: [((usize, usize), usize); 4] =
        [((2, 1), 10), ((2, 2), 12), ((3, 1), 10), ((3, 2), 14)];
    /// Words over {a,b,$}.
    pub const COPY: usize = 9;
    /// Unary words a^m.
    pub const UEXPO: usize = 64;
    /// Exhaustive words over {a,b,0,1} for D, on top of the generated corpus.
    pub const D_EXHAUSTIVE: usize = 8;
    /// Unary words for L_{n,k}: enough to see two full periods.
    pub fn unary(n: usize, k: usize) -> usize {
        2 * n.pow(k as u32) + 2
    }
    pub fn e(n: usize, k: usize) -> usize {
        E.iter()
            .find(|(p, _)| *p == (n, k))
            .map(|(_, b)| *b)
            .unwrap_or(10)
    }
}

/// Words over `alphabet` of length at most `max_len`, shortest first and
/// lexicographic (by alphabet order) within one length.
pub fn enumerate_words<T: Clone>(alphabet: &[T], max_len: usize) -> Words<T> {
    Words {
        alphabet: alphabet.to_vec(),
        max_len,
        current: Some(Vec::new()),
    }
}

pub struct Words<T> {
    alphabet: Vec<T>,
    max_len: usize,
    current: Option<Vec<usize>>,
}

impl<T: Clone> Iterator for Words<T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        let cur = self.current.as_mut()?;
        let out = cur.iter().map(|&i| self.alphabet[i].clone()).collect();
        // Advance the odometer; on overflow grow by one.
        let n = self.alphabet.len();
        let mut i = cur.len();
        loop {
            if i == 0 {
                let len = cur.len() + 1;
                if len > self.max_len || n == 0 {
                    self.current = None;
                } else {
                    *cur = vec![0; len];
                }
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < n {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// Anything that decides membership of words given as symbol names.
pub trait Acceptor {
    fn accepts(&self, word: &[&str]) -> Result<bool, OracleError>;
}

/// A transducer run for at most `max_sweeps` sweeps.
pub struct Bounded<'a> {
    pub machine: &'a Transducer,
    pub max_sweeps: usize,
    pub tape_cap: usize,
}

impl<'a> Bounded<'a> {
    /// Uses the declared constant bound, or `fallback` sweeps otherwise.
    pub fn new(machine: &'a Transducer, fallback: usize) -> Self {
        Bounded {
            machine,
            max_sweeps: machine.constant_sweeps().unwrap_or(fallback),
            tape_cap: crate::run::DEFAULT_TAPE_CAP,
        }
    }
}

impl Acceptor for Bounded<'_> {
    fn accepts(&self, word: &[&str]) -> Result<bool, OracleError> {
        let Ok(w) = self.machine.word(word) else {
            return Ok(false);
        };
        let r = run(self.machine, &w, self.max_sweeps, self.tape_cap)?;
        if r.cap_hit {
            return Err(OracleError::CapHit(word.join(",")));
        }
        Ok(r.accepted)
    }
}

impl Acceptor for Nfa {
    fn accepts(&self, word: &[&str]) -> Result<bool, OracleError> {
        Ok(self.word(word).is_some_and(|w| Nfa::accepts(self, &w)))
    }
}

impl Acceptor for Dfa {
    fn accepts(&self, word: &[&str]) -> Result<bool, OracleError> {
        Ok(self.word(word).is_some_and(|w| Dfa::accepts(self, &w)))
    }
}

/// A membership predicate.
pub struct Predicate<F>(pub F);

impl<F: Fn(&[&str]) -> bool> Acceptor for Predicate<F> {
    fn accepts(&self, word: &[&str]) -> Result<bool, OracleError> {
        Ok((self.0)(word))
    }
}

/// An LBA run until its configuration space is exhausted.
pub struct LbaAcceptor<'a> {
    pub machine: &'a Lba,
    pub max_steps: usize,
}

impl Acceptor for LbaAcceptor<'_> {
    fn accepts(&self, word: &[&str]) -> Result<bool, OracleError> {
        let Ok(w) = self.machine.word(word) else {
            return Ok(false);
        };
        let r = run_lba(self.machine, &w, self.max_steps).expect("word checked");
        if !r.accepted && !r.halted {
            return Err(OracleError::NoHalt(word.join(",")));
        }
        Ok(r.accepted)
    }
}

/// Words of length at most `max_len` on which the acceptors disagree, in
/// length-lexicographic order.
pub fn compare_languages(
    a: &dyn Acceptor,
    b: &dyn Acceptor,
    alphabet: &[&str],
    max_len: usize,
) -> Result<Vec<Vec<String>>, OracleError> {
    let mut out = Vec::new();
    for w in enumerate_words(alphabet, max_len) {
        if a.accepts(&w)? != b.accepts(&w)? {
            out.push(w.iter().map(|s| s.to_string()).collect());
        }
    }
    Ok(out)
}

/// Compares acceptors on an explicit word list.
pub fn compare_on<'w>(
    a: &dyn Acceptor,
    b: &dyn Acceptor,
    words: impl IntoIterator<Item = &'w Vec<String>>,
) -> Result<Vec<Vec<String>>, OracleError> {
    let mut out = Vec::new();
    for w in words {
        let refs: Vec<&str> = w.iter().map(String::as_str).collect();
        if a.accepts(&refs)? != b.accepts(&refs)? {
            out.push(w.clone());
        }
    }
    Ok(out)
}

/// Builds the minimal DFA of `pred` by separating prefixes of length below
/// ⌈max_len/2⌉ with suffixes of the remaining length, then checks the result
/// against `pred` on every word up to `max_len`.
pub fn predicate_to_min_dfa(
    pred: &dyn Fn(&[&str]) -> bool,
    alphabet: &[&str],
    max_len: usize,
) -> Result<Dfa, OracleError> {
    let prefix_len = max_len.div_ceil(2);
    let suffixes: Vec<Vec<&str>> = enumerate_words(alphabet, max_len - prefix_len).collect();
    let row = |u: &[&str]| -> Vec<bool> {
        let mut buf: Vec<&str> = u.to_vec();
        suffixes
            .iter()
            .map(|v| {
                buf.truncate(u.len());
                buf.extend_from_slice(v);
                pred(&buf)
            })
            .collect()
    };
    let mut rows: IndexMap<Vec<bool>, Vec<&str>> = IndexMap::new();
    rows.insert(row(&[]), Vec::new());
    let mut edges = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let rep = rows[i].clone();
        for (a, sym) in alphabet.iter().enumerate() {
            let mut ua = rep.clone();
            ua.push(sym);
            let r = row(&ua);
            let j = match rows.get_index_of(&r) {
                Some(j) => j,
                None if ua.len() < prefix_len => {
                    rows.insert(r, ua);
                    rows.len() - 1
                }
                None => {
                    return Err(OracleError::Budget(format!(
                        "a new class appears at prefix length {}",
                        ua.len()
                    )))
                }
            };
            edges.push((i, a, j));
        }
        i += 1;
    }
    let names: Vec<String> = (0..rows.len()).map(|i| format!("c{i}")).collect();
    let mut dfa = Dfa::new(alphabet, &names[0]);
    for n in &names[1..] {
        dfa.add_state(n);
    }
    for (i, (r, _)) in rows.iter().enumerate() {
        // The empty suffix comes first.
        dfa.set_accepting(i, r[0]);
    }
    for (p, a, q) in edges {
        dfa.add_transition(p, a, q).expect("one row per class");
    }
    let dfa = dfa.minimize();
    for w in enumerate_words(alphabet, max_len) {
        if Acceptor::accepts(&dfa, &w)? != pred(&w) {
            return Err(OracleError::Budget(format!(
                "automaton disagrees with the predicate on `{}`",
                w.join(",")
            )));
        }
    }
    Ok(dfa)
}

/// Fewest sweeps after which `t` accepts `word`, if within `max_sweeps`.
pub fn min_accept_sweeps(
    t: &Transducer,
    word: &[&str],
    max_sweeps: usize,
    tape_cap: usize,
) -> Result<Option<usize>, OracleError> {
    let w = t
        .word(word)
        .map_err(|_| RunError::MalformedInput(word.join(","), 0))?;
    let r = run(t, &w, max_sweeps, tape_cap)?;
    if r.cap_hit {
        return Err(OracleError::CapHit(word.join(",")));
    }
    Ok(r.min_accept_sweeps)
}

/// A random NIUFST over Σ = {a,b} with at most `max_states` states and a
/// declared constant bound of at most `max_sweeps`.
pub fn random_niufst(seed: u64, max_states: usize, max_sweeps: usize) -> Transducer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_sweeps);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let reads = ["a", "b", "c", "<"];
    let writes = ["a", "b", "c", "<"];
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
    for s in &states {
        if rng.gen_bool(0.35) {
            b.accept(s.clone());
        }
    }
    for p in &states {
        for x in reads {
            let count = [0, 1, 1, 1, 2][rng.gen_range(0..5)];
            for _ in 0..count {
                let q = states.choose(&mut rng).expect("non-empty");
                let y = writes.choose(&mut rng).expect("non-empty");
                b.transition(p.clone(), x, q.clone(), *y);
            }
        }
    }
    b.build().expect("well-formed random machine")
}

/// Membership memo keyed by word, for expensive acceptors.
pub struct Memo<'a> {
    inner: &'a dyn Acceptor,
    cache: std::cell::RefCell<HashMap<Vec<String>, bool>>,
}

impl<'a> Memo<'a> {
    pub fn new(inner: &'a dyn Acceptor) -> Self {
        Memo {
            inner,
            cache: Default::default(),
        }
    }
}

impl Acceptor for Memo<'_> {
    fn accepts(&self, word: &[&str]) -> Result<bool, OracleError> {
        let key: Vec<String> = word.iter().map(|s| s.to_string()).collect();
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        let v = self.inner.accepts(word)?;
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_enumeration_order() {
        let words: Vec<String> = enumerate_words(&["a", "b"], 2)
            .map(|w| w.concat())
            .collect();
        assert_eq!(words, ["", "a", "b", "aa", "ab", "ba", "bb"]);
        assert_eq!(enumerate_words(&["a"], 3).count(), 4);
        assert_eq!(
            enumerate_words(&["a", "b", "c"], 4).count(),
            (3usize.pow(5) - 1) / 2
        );
        assert_eq!(enumerate_words::<&str>(&[], 3).count(), 1);
    }

    #[test]
    fn comparison_lists_disagreements() {
        let one = Predicate(|w: &[&str]| w == ["a"]);
        let two = Predicate(|w: &[&str]| w == ["a"] || w == ["a", "a"]);
        assert!(compare_languages(&one, &one, &["a"], 5).unwrap().is_empty());
        assert_eq!(
            compare_languages(&one, &two, &["a"], 5).unwrap(),
            vec![vec!["a".to_string(), "a".to_string()]]
        );
        assert_eq!(
            compare_languages(&two, &one, &["a"], 5).unwrap(),
            compare_languages(&one, &two, &["a"], 5).unwrap()
        );
    }

    #[test]
    fn min_dfa_from_predicates() {
        let all = predicate_to_min_dfa(&|_| true, &["a", "b"], 6).unwrap();
        assert_eq!(all.num_states(), 1);
        let mod8 = predicate_to_min_dfa(&|w| w.len() % 8 == 0, &["a"], 64).unwrap();
        assert_eq!(mod8.num_states(), 8);
        let again = predicate_to_min_dfa(&|w| w.len() % 8 == 0, &["a"], 66).unwrap();
        assert!(mod8.is_isomorphic(&again));
    }

    #[test]
    fn too_small_budget_is_an_error() {
        assert!(predicate_to_min_dfa(&|w| w.len() % 8 == 0, &["a"], 10).is_err());
    }

    #[test]
    fn random_machines_are_reproducible() {
        assert_eq!(random_niufst(7, 3, 2), random_niufst(7, 3, 2));
        let t = random_niufst(1, 3, 2);
        assert!(t.num_states() <= 3);
        assert!(t.constant_sweeps().unwrap() <= 2);
    }
}

//! Exact decision procedures for constant-sweep transducers, via their
//! NFAs: emptiness, finiteness, universality, inclusion and equivalence.

use std::collections::VecDeque;

use indexmap::IndexMap;
use thiserror::Error;

use crate::automata::Nfa;
use crate::convert::{to_nfa, ConvertError};
use crate::machine::Transducer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Convert(#[from] ConvertError),
    #[error("determinization exceeded the budget of {0} states")]
    Budget(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    /// Largest number of subset (pair) states explored before giving up.
    pub dfa_state_cap: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            dfa_state_cap: 1 << 20,
        }
    }
}

pub fn is_empty(t: &Transducer) -> Result<bool, DecideError> {
    Ok(nfa_is_empty(&to_nfa(t)?))
}

pub fn nfa_is_empty(n: &Nfa) -> bool {
    let reach = n.reachable();
    !(0..n.num_states()).any(|q| reach[q] && n.is_accepting(q))
}

pub fn is_finite(t: &Transducer) -> Result<bool, DecideError> {
    Ok(nfa_is_finite(&to_nfa(t)?))
}

/// Finite iff no cycle passes only through states that are both reachable
/// and co-reachable.
pub fn nfa_is_finite(n: &Nfa) -> bool {
    let reach = n.reachable();
    let co = n.coreachable();
    let useful: Vec<bool> = (0..n.num_states()).map(|q| reach[q] && co[q]).collect();
    let nsym = n.alphabet().len();
    let mut color = vec![0u8; n.num_states()];
    for root in 0..n.num_states() {
        if !useful[root] || color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&(p, k)) = stack.last() {
            let succ: Vec<usize> = (0..nsym)
                .flat_map(|a| n.successors(p, a).iter().copied())
                .filter(|&q| useful[q])
                .collect();
            if k < succ.len() {
                stack.last_mut().expect("stack").1 += 1;
                let q = succ[k];
                match color[q] {
                    0 => {
                        color[q] = 1;
                        stack.push((q, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                color[p] = 2;
                stack.pop();
            }
        }
    }
    true
}

pub fn is_universal(t: &Transducer, opts: DecideOptions) -> Result<bool, DecideError> {
    let n = to_nfa(t)?;
    Ok(search(&n, &n, opts, |a, _| !a)?.is_none())
}

/// L(t1) ⊆ L(t2).
pub fn includes(
    t1: &Transducer,
    t2: &Transducer,
    opts: DecideOptions,
) -> Result<bool, DecideError> {
    Ok(inclusion_counterexample(t1, t2, opts)?.is_none())
}

/// A shortest word in L(t1) \ L(t2), if any.
pub fn inclusion_counterexample(
    t1: &Transducer,
    t2: &Transducer,
    opts: DecideOptions,
) -> Result<Option<Vec<String>>, DecideError> {
    search(&to_nfa(t1)?, &to_nfa(t2)?, opts, |a, b| a && !b)
}

pub fn equivalent(
    t1: &Transducer,
    t2: &Transducer,
    opts: DecideOptions,
) -> Result<bool, DecideError> {
    Ok(distinguishing_word(t1, t2, opts)?.is_none())
}

/// A shortest word in the symmetric difference, if any.
pub fn distinguishing_word(
    t1: &Transducer,
    t2: &Transducer,
    opts: DecideOptions,
) -> Result<Option<Vec<String>>, DecideError> {
    nfa_distinguishing_word(&to_nfa(t1)?, &to_nfa(t2)?, opts)
}

pub fn nfa_distinguishing_word(
    a: &Nfa,
    b: &Nfa,
    opts: DecideOptions,
) -> Result<Option<Vec<String>>, DecideError> {
    search(a, b, opts, |x, y| x != y)
}

/// Breadth-first search over pairs of subsets of `a` and `b`, run in
/// lockstep over the union of their alphabets, for the first pair whose
/// acceptance flags satisfy `bad`.
fn search(
    a: &Nfa,
    b: &Nfa,
    opts: DecideOptions,
    bad: impl Fn(bool, bool) -> bool,
) -> Result<Option<Vec<String>>, DecideError> {
    let mut alphabet: Vec<String> = a.alphabet().to_vec();
    for s in b.alphabet() {
        if !alphabet.contains(s) {
            alphabet.push(s.clone());
        }
    }
    let map_a: Vec<Option<usize>> = alphabet.iter().map(|s| a.symbol_id(s)).collect();
    let map_b: Vec<Option<usize>> = alphabet.iter().map(|s| b.symbol_id(s)).collect();
    let post = |n: &Nfa, set: &[usize], sym: Option<usize>| -> Vec<usize> {
        let Some(sym) = sym else { return Vec::new() };
        let mut out: Vec<usize> = set
            .iter()
            .flat_map(|&p| n.successors(p, sym).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let accepts = |n: &Nfa, set: &[usize]| set.iter().any(|&q| n.is_accepting(q));

    type Pair = (Vec<usize>, Vec<usize>);
    let mut seen: IndexMap<Pair, Option<(usize, usize)>> = IndexMap::new();
    seen.insert((vec![a.initial()], vec![b.initial()]), None);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let ((sa, sb), _) = seen.get_index(i).expect("pair");
        if bad(accepts(a, sa), accepts(b, sb)) {
            let mut word = Vec::new();
            let mut cur = i;
            while let Some((prev, sym)) = seen[cur] {
                word.push(alphabet[sym].clone());
                cur = prev;
            }
            word.reverse();
            return Ok(Some(word));
        }
        let (sa, sb) = (sa.clone(), sb.clone());
        for sym in 0..alphabet.len() {
            let next = (post(a, &sa, map_a[sym]), post(b, &sb, map_b[sym]));
            if !seen.contains_key(&next) {
                seen.insert(next, Some((i, sym)));
                if seen.len() > opts.dfa_state_cap {
                    return Err(DecideError::Budget(opts.dfa_state_cap));
                }
                queue.push_back(seen.len() - 1);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::nfa_to_1niufst;
    use crate::machine::{SweepBound, TransducerBuilder};

    /// One-sweep acceptor of a finite set of unary words a^len.
    fn unary_lengths(lens: &[usize]) -> Transducer {
        let max = lens.iter().copied().max().unwrap_or(0);
        let mut n = Nfa::new(&["a"], "c0");
        for i in 1..=max {
            let q = n.add_state(&format!("c{i}"));
            n.add_transition(q - 1, 0, q);
        }
        for &l in lens {
            n.set_accepting(l, true);
        }
        nfa_to_1niufst(&n)
    }

    #[test]
    fn inclusion_of_finite_sets() {
        let small = unary_lengths(&[1]);
        let big = unary_lengths(&[1, 2]);
        let o = DecideOptions::default();
        assert!(includes(&small, &big, o).unwrap());
        assert!(!includes(&big, &small, o).unwrap());
        assert_eq!(
            inclusion_counterexample(&big, &small, o).unwrap(),
            Some(vec!["a".to_string(), "a".to_string()])
        );
        assert!(equivalent(&big, &big, o).unwrap());
    }

    #[test]
    fn emptiness_and_finiteness() {
        assert!(is_empty(&unary_lengths(&[])).unwrap());
        assert!(!is_empty(&unary_lengths(&[0])).unwrap());
        assert!(is_finite(&unary_lengths(&[0])).unwrap());
        assert!(is_finite(&unary_lengths(&[])).unwrap());
    }

    #[test]
    fn universal_identity() {
        let mut b = TransducerBuilder::new();
        b.state("q")
            .input("a")
            .input("b")
            .output("a")
            .output("b")
            .output("<")
            .endmarker("<")
            .initial("q")
            .accept("q")
            .sweeps(SweepBound::Constant(1));
        for x in ["a", "b", "<"] {
            b.transition("q", x, "q", x);
        }
        let t = b.build().unwrap();
        assert!(is_universal(&t, DecideOptions::default()).unwrap());
        assert!(!is_finite(&t).unwrap());
    }

    #[test]
    fn budget_error() {
        let a = unary_lengths(&[3]);
        let b = unary_lengths(&[4]);
        let o = DecideOptions { dfa_state_cap: 2 };
        assert_eq!(equivalent(&a, &b, o), Err(DecideError::Budget(2)));
    }
}

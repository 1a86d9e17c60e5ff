//! Generators for the witness machine families and the reference membership
//! predicates they are checked against.
//!
//! Several families are described by a step function over structured states
//! and tape symbols; [`synthesize`] enumerates everything reachable from the
//! initial state and the input alphabet and emits a plain [`Transducer`].

use std::hash::Hash;

use indexmap::IndexSet;
use thiserror::Error;

use crate::automata::Nfa;
use crate::machine::{SweepBound, Transducer, TransducerBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("invalid parameters for {family}: {reason}")]
    BadParameter { family: Family, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Block,
    BlockNfa,
    Unary,
    E,
    Copy,
    Uexpo,
    D,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Block => "block",
            Family::BlockNfa => "block-nfa",
            Family::Unary => "unary",
            Family::E => "e",
            Family::Copy => "copy",
            Family::Uexpo => "uexpo",
            Family::D => "d",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "block" => Family::Block,
            "block-nfa" | "blocknfa" => Family::BlockNfa,
            "unary" => Family::Unary,
            "e" => Family::E,
            "copy" => Family::Copy,
            "uexpo" => Family::Uexpo,
            "d" => Family::D,
            _ => return Err(format!("unknown family `{s}`")),
        })
    }
}

/// A family tag with its integer parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub family: Family,
    pub n: usize,
    pub k: usize,
}

impl FamilyParams {
    pub fn validate(&self) -> Result<(), WitnessError> {
        let bad = |reason: &str| {
            Err(WitnessError::BadParameter {
                family: self.family,
                reason: reason.to_string(),
            })
        };
        match self.family {
            Family::Block | Family::BlockNfa if self.k < 2 => bad("k must be at least 2"),
            Family::Unary if self.n < 2 || self.k < 1 => bad("need n >= 2 and k >= 1"),
            Family::E if self.n < 2 || self.k < 1 => bad("need n >= 2 and k >= 1"),
            _ => Ok(()),
        }
    }
}

fn check(family: Family, n: usize, k: usize) -> Result<(), WitnessError> {
    FamilyParams { family, n, k }.validate()
}

/// Builds a transducer from a step function by exploring every state reachable
/// from `initial` on every symbol that can appear on the tape. Symbols are
/// closed under writing, so the exploration runs to a fixpoint.
#[allow(clippy::too_many_arguments)]
pub(crate) fn synthesize<S, Y>(
    initial: S,
    inputs: &[Y],
    end: Y,
    step: impl Fn(&S, &Y) -> Vec<(S, Y)>,
    accepting: impl Fn(&S) -> bool,
    state_name: impl Fn(usize, &S) -> String,
    symbol_name: impl Fn(&Y) -> String,
    bound: SweepBound,
) -> Transducer
where
    S: Clone + Eq + Hash,
    Y: Clone + Eq + Hash,
{
    let mut states: IndexSet<S> = IndexSet::from([initial]);
    let mut symbols: IndexSet<Y> = inputs.iter().cloned().collect();
    symbols.insert(end.clone());
    let mut written: IndexSet<Y> = IndexSet::from([end.clone()]);
    let mut edges: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut done: Vec<usize> = vec![0];
    loop {
        let mut progressed = false;
        let mut q = 0;
        while q < states.len() {
            while done[q] < symbols.len() {
                let x = done[q];
                done[q] += 1;
                progressed = true;
                let from = states.get_index(q).expect("state").clone();
                let read = symbols.get_index(x).expect("symbol").clone();
                for (to, write) in step(&from, &read) {
                    let (ti, new) = states.insert_full(to);
                    if new {
                        done.push(0);
                    }
                    let (wi, _) = symbols.insert_full(write.clone());
                    written.insert(write);
                    edges.push((q, x, ti, wi));
                }
            }
            q += 1;
        }
        if !progressed {
            break;
        }
    }
    let snames: Vec<String> = states
        .iter()
        .enumerate()
        .map(|(i, s)| state_name(i, s))
        .collect();
    let ynames: Vec<String> = symbols.iter().map(&symbol_name).collect();
    let mut b = TransducerBuilder::new();
    b.states(snames.iter().cloned())
        .endmarker(symbol_name(&end))
        .initial(snames[0].clone())
        .sweeps(bound);
    for x in inputs {
        b.input(symbol_name(x));
    }
    for y in &written {
        b.output(symbol_name(y));
    }
    for (i, s) in states.iter().enumerate() {
        if accepting(s) {
            b.accept(snames[i].clone());
        }
    }
    for (p, x, q, y) in edges {
        b.transition(&snames[p], &ynames[x], &snames[q], &ynames[y]);
    }
    b.build().expect("synthesized machine is well formed")
}

// ---------------------------------------------------------------------------
// B_k

/// Measured state count of [`gen_block`] is at most
/// `BLOCK_STATE_SLOPE * k + BLOCK_STATE_OFFSET`.
pub const BLOCK_STATE_SLOPE: usize = 6;
pub const BLOCK_STATE_OFFSET: usize = 17;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum BlockQ {
    Init,
    /// Unselected block, `p` bits read.
    Skip(usize),
    /// Selected block, `p` bits read, first bit `x`.
    Sel(usize, u8),
    /// Between the selected and the last block.
    Between(usize, u8),
    /// Last block, `p` bits read.
    Last(usize),
    Go,
    Took(u8),
    TookMore(u8),
    Wait(u8),
    WaitFinal(u8),
    Copy,
    Final,
    Run,
    Accept,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum BlockY {
    Bit(u8),
    Hash,
    End,
    Flag(Option<u8>),
    Blank,
    Picked(u8),
}

fn block_step(k: usize, q: &BlockQ, y: &BlockY) -> Vec<(BlockQ, BlockY)> {
    use BlockQ::*;
    use BlockY::*;
    match (*q, *y) {
        (Init, Bit(x)) => vec![(Skip(1), Flag(Some(x))), (Sel(1, x), Flag(None))],
        (Init, Flag(_)) => vec![(Go, *y)],
        (Skip(p), Bit(x)) if p < k => {
            let mut v = vec![(Skip(p + 1), Bit(x))];
            if p == 0 {
                v.push((Sel(1, x), Blank));
            }
            v
        }
        (Skip(p), Hash) if p == k => vec![(Skip(0), Hash)],
        (Sel(p, x), Bit(z)) if p < k => vec![(Sel(p + 1, x), Picked(z))],
        (Sel(p, x), Hash) if p == k => vec![(Between(0, x), Hash)],
        (Between(p, x), Bit(z)) if p < k => {
            let mut v = vec![(Between(p + 1, x), Bit(z))];
            if p == 0 && z == x {
                v.push((Last(1), Blank));
            }
            v
        }
        (Between(p, x), Hash) if p == k => vec![(Between(0, x), Hash)],
        (Last(p), Bit(z)) if p < k => vec![(Last(p + 1), Picked(z))],
        (Last(p), End) if p == k => vec![(Run, End)],
        (Go, Bit(_) | Hash | Blank) => vec![(Go, *y)],
        (Go, Picked(x)) => vec![(Took(x), Blank)],
        (Took(x), Picked(_)) => vec![(TookMore(x), *y)],
        (Took(x), Hash) => vec![(WaitFinal(x), Hash)],
        (TookMore(x), Picked(_)) => vec![(TookMore(x), *y)],
        (TookMore(x), Hash) => vec![(Wait(x), Hash)],
        (Wait(x), Bit(_) | Hash | Blank) => vec![(Wait(x), *y)],
        (WaitFinal(x), Bit(_) | Hash | Blank) => vec![(WaitFinal(x), *y)],
        (Wait(x), Picked(z)) if z == x => vec![(Copy, Blank)],
        (WaitFinal(x), Picked(z)) if z == x => vec![(Final, Blank)],
        (Copy, Picked(_)) => vec![(Copy, *y)],
        (Copy, End) => vec![(Run, End)],
        (Final, End) => vec![(Accept, End)],
        _ => Vec::new(),
    }
}

fn block_state_name(q: &BlockQ) -> String {
    use BlockQ::*;
    match *q {
        Init => "init".into(),
        Skip(p) => format!("skip{p}"),
        Sel(p, x) => format!("sel{p}.{x}"),
        Between(p, x) => format!("btw{p}.{x}"),
        Last(p) => format!("last{p}"),
        Go => "go".into(),
        Took(x) => format!("took{x}"),
        TookMore(x) => format!("more{x}"),
        Wait(x) => format!("wait{x}"),
        WaitFinal(x) => format!("waitf{x}"),
        Copy => "copy".into(),
        Final => "final".into(),
        Run => "run".into(),
        Accept => "acc".into(),
    }
}

fn block_symbol_name(y: &BlockY) -> String {
    match *y {
        BlockY::Bit(x) => x.to_string(),
        BlockY::Hash => "#".into(),
        BlockY::End => "<".into(),
        BlockY::Flag(Some(x)) => format!("!{x}"),
        BlockY::Flag(None) => "!_".into(),
        BlockY::Blank => "_".into(),
        BlockY::Picked(x) => format!("{x}'"),
    }
}

/// A k-sweep NIUFST for B_k. The first sweep checks the block structure,
/// picks an earlier block and the last block, compares their first bits and
/// flags the first cell; sweep j compares the j-th bits.
pub fn gen_block(k: usize) -> Result<Transducer, WitnessError> {
    check(Family::Block, 0, k)?;
    let inputs = [BlockY::Bit(0), BlockY::Bit(1), BlockY::Hash];
    Ok(synthesize(
        BlockQ::Init,
        &inputs,
        BlockY::End,
        |q, y| block_step(k, q, y),
        |q| *q == BlockQ::Accept,
        |_, q| block_state_name(q),
        block_symbol_name,
        SweepBound::Constant(k),
    ))
}

/// The two-phase NFA for B_k with exactly 2^{k+1}(k+2) states: phase one
/// stores or skips each block, phase two matches one guessed later block.
pub fn gen_block_nfa(k: usize) -> Result<Nfa, WitnessError> {
    check(Family::BlockNfa, 0, k)?;
    let mut n = Nfa::new(&["0", "1", "#"], "start");
    let hash = 2;
    let bits = |s: usize, len: usize| -> String {
        (0..len)
            .map(|i| if s >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    };
    // Phase one: prefixes of the current block.
    let mut store = vec![Vec::new(); k + 1];
    for (len, row) in store.iter_mut().enumerate() {
        for s in 0..1usize << len {
            row.push(n.add_state(&format!("p:{}", bits(s, len))));
        }
    }
    let mut skip = Vec::new();
    let mut matching = Vec::new();
    for u in 0..1usize << k {
        let name = bits(u, k);
        skip.push(
            (0..=k)
                .map(|j| n.add_state(&format!("s:{name}:{j}")))
                .collect::<Vec<_>>(),
        );
        matching.push(
            (0..=k)
                .map(|j| n.add_state(&format!("m:{name}:{j}")))
                .collect::<Vec<_>>(),
        );
    }
    let start = n.initial();
    for (b, &q) in store[1].iter().enumerate() {
        n.add_transition(start, b, q);
    }
    for len in 0..k {
        for s in 0..1usize << len {
            for b in 0..2 {
                n.add_transition(store[len][s], b, store[len + 1][s | b << len]);
            }
        }
    }
    for u in 0..1usize << k {
        let full = store[k][u];
        n.add_transition(full, hash, store[0][0]);
        n.add_transition(full, hash, skip[u][0]);
        n.add_transition(full, hash, matching[u][0]);
        for j in 0..k {
            for b in 0..2 {
                n.add_transition(skip[u][j], b, skip[u][j + 1]);
            }
            n.add_transition(matching[u][j], u >> j & 1, matching[u][j + 1]);
        }
        n.add_transition(skip[u][k], hash, skip[u][0]);
        n.add_transition(skip[u][k], hash, matching[u][0]);
        n.set_accepting(matching[u][k], true);
    }
    debug_assert_eq!(n.num_states(), block_nfa_states(k));
    Ok(n)
}

/// 2^{k+1}(k+2).
pub fn block_nfa_states(k: usize) -> usize {
    (1usize << (k + 1)) * (k + 2)
}

// ---------------------------------------------------------------------------
// L_{n,k}

/// An n-state k-sweep IUFST for {a^{c·n^k} | c ≥ 0}. Each sweep counts the
/// unmarked a's modulo n and marks all but the first of every n of them;
/// the endmarker carries the sweep index.
pub fn gen_unary(n: usize, k: usize) -> Result<Transducer, WitnessError> {
    check(Family::Unary, n, k)?;
    let q = |c: usize| format!("q{c}");
    let end = |j: usize| format!("<{j}");
    let mut b = TransducerBuilder::new();
    b.states((0..n).map(q))
        .input("a")
        .output("a")
        .output("a'")
        .endmarker(end(0))
        .initial(q(0))
        .accept(q(n - 1))
        .sweeps(SweepBound::Constant(k));
    for j in 0..k {
        b.output(end(j));
    }
    b.transition(q(0), "a", q(1 % n), "a");
    for c in 1..n {
        b.transition(q(c), "a", q((c + 1) % n), "a'");
    }
    for c in 0..n {
        b.transition(q(c), "a'", q(c), "a'");
    }
    for j in 0..k - 1 {
        b.transition(q(0), end(j), q(0), end(j + 1));
    }
    b.transition(q(0), end(k - 1), q(n - 1), end(k - 1));
    Ok(b.build().expect("unary machine is well formed"))
}

// ---------------------------------------------------------------------------
// E_{n,k}

/// The (n+1)-state k-NIUFST for E_{n,k}, transition for transition.
pub fn gen_e(n: usize, k: usize) -> Result<Transducer, WitnessError> {
    check(Family::E, n, k)?;
    let q = |i: usize| format!("q{i}");
    let end = |i: usize| format!("<{i}");
    let digit = |i: usize| i.to_string();
    let bar = format!("~{n}");
    let blank = "_";
    let mut b = TransducerBuilder::new();
    b.states((0..=n).map(q))
        .input("a")
        .input("b")
        .endmarker(end(0))
        .initial(q(0))
        .accept(q(n))
        .sweeps(SweepBound::Constant(k));
    for s in ["a", "b", blank] {
        b.output(s);
    }
    for i in 1..=n {
        b.output(digit(i));
    }
    b.output(bar.clone());
    for i in 0..k {
        b.output(end(i));
    }
    // (1), (2)
    for x in ["a", blank] {
        b.transition(q(0), x, q(0), blank);
    }
    b.transition(q(0), "b", q(0), blank);
    b.transition(q(0), "b", q(2), digit(1));
    // (3), (4)
    let count_in = ["a".to_string(), "b".to_string(), digit(n)];
    for i in 1..n {
        for x in &count_in {
            b.transition(q(i), x, q(i + 1), digit(i));
        }
    }
    for x in &count_in {
        b.transition(q(n), x, q(1), digit(n));
    }
    // (5)
    for i in 0..k.saturating_sub(1) {
        b.transition(q(1), end(i), q(0), end(i + 1));
    }
    // (6), (7), (8)
    b.transition(q(0), digit(1), q(1), digit(1));
    let stretch_in: Vec<String> = (1..n).map(digit).chain([bar.clone()]).collect();
    for i in 1..n {
        for x in &stretch_in {
            b.transition(q(i), x, q(i), digit(i));
        }
    }
    for x in &stretch_in {
        b.transition(q(n), x, q(n), bar.clone());
    }
    // (9)
    b.transition(q(1), end(k - 1), q(n), end(k - 1));
    Ok(b.build().expect("E machine is well formed"))
}

// ---------------------------------------------------------------------------
// Copy language

/// A deterministic IUFST for {u$u}: each sweep marks the leftmost unmarked
/// symbol on both sides of `$` after checking that they agree.
pub fn gen_copy(alphabet: &[&str]) -> Result<Transducer, WitnessError> {
    let bad = |reason: String| WitnessError::BadParameter {
        family: Family::Copy,
        reason,
    };
    let marked = |x: &str| format!("{x}'");
    let mut names: Vec<String> = vec!["$".into(), "<".into()];
    for x in alphabet {
        if !crate::machine::valid_name(x) || x.ends_with('\'') {
            return Err(bad(format!("invalid symbol `{x}`")));
        }
        for n in [x.to_string(), marked(x)] {
            if names.contains(&n) {
                return Err(bad(format!("symbol `{n}` clashes")));
            }
            names.push(n);
        }
    }
    let carry = |x: &str| format!("c.{x}");
    let seek = |x: &str| format!("r.{x}");
    let mut b = TransducerBuilder::new();
    b.states(["l", "e", "d"])
        .input("$")
        .output("$")
        .output("<")
        .endmarker("<")
        .initial("l")
        .accept("e")
        .sweeps(SweepBound::Linear);
    for x in alphabet {
        b.input(*x)
            .output(*x)
            .output(marked(x))
            .state(carry(x))
            .state(seek(x));
    }
    b.transition("l", "$", "e", "$");
    b.transition("e", "<", "e", "<");
    b.transition("d", "<", "d", "<");
    for x in alphabet {
        let m = marked(x);
        b.transition("l", &m, "l", &m);
        b.transition("l", *x, carry(x), &m);
        b.transition(carry(x), "$", seek(x), "$");
        b.transition(seek(x), *x, "d", &m);
        b.transition("e", &m, "e", &m);
        for y in alphabet {
            let my = marked(y);
            b.transition(carry(x), *y, carry(x), *y);
            b.transition(carry(x), &my, carry(x), &my);
            b.transition(seek(x), &my, seek(x), &my);
            b.transition("d", *y, "d", *y);
            b.transition("d", &my, "d", &my);
        }
    }
    b.build().map_err(|e| bad(e.to_string()))
}

// ---------------------------------------------------------------------------
// Unary powers of two

/// A deterministic IUFST for {a^{2^j} | j ≥ 0}: each sweep marks every second
/// unmarked `a` and needs an even count, until exactly one is left.
pub fn gen_uexpo() -> Transducer {
    let mut b = TransducerBuilder::new();
    b.states(["s0", "s1", "even", "odd"])
        .input("a")
        .output("a")
        .output("a'")
        .output("<")
        .endmarker("<")
        .initial("s0")
        .accept("s1")
        .sweeps(SweepBound::Log)
        .transition("s0", "a", "s1", "a")
        .transition("s1", "a", "even", "a'")
        .transition("even", "a", "odd", "a")
        .transition("odd", "a", "even", "a'")
        .transition("s1", "<", "s1", "<")
        .transition("even", "<", "even", "<");
    for q in ["s0", "s1", "even", "odd"] {
        b.transition(q, "a'", q, "a'");
    }
    b.build().expect("uexpo machine is well formed")
}

// ---------------------------------------------------------------------------
// D

/// Sweeps after the reference count `1+k+k+1+2k` that an accepting
/// computation of [`gen_d`] may additionally use. The machine accepts every
/// word of D with parameter k after exactly `4k+1` sweeps.
pub const D_SWEEP_SLACK: usize = 0;

/// Sweeps used by [`gen_d`] to accept a word with parameter `k`.
pub fn d_accept_sweeps(k: usize) -> usize {
    4 * k + 1
}

/// Reference sweep count `1+k+k+1+2k`.
pub fn d_reference_sweeps(k: usize) -> usize {
    1 + k + k + 1 + 2 * k
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum T1 {
    /// Leading a, with its phase level.
    A(u8),
    B(bool),
    Digit {
        v: char,
        m: bool,
        c: bool,
        s: bool,
    },
    Pay {
        v: char,
        m: bool,
        c: bool,
    },
}

impl T1 {
    fn ch(self) -> char {
        match self {
            T1::A(_) => 'a',
            T1::B(_) => 'b',
            T1::Digit { v, .. } | T1::Pay { v, .. } => v,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum DY {
    Raw(char),
    End,
    Cell(T1, Option<char>),
}

fn d_symbol_name(y: &DY) -> String {
    let flag = |b: bool, c: char| if b { c.to_string() } else { String::new() };
    match *y {
        DY::Raw(c) => c.to_string(),
        DY::End => "<".into(),
        DY::Cell(t1, t2) => {
            let top = match t1 {
                T1::A(l) => format!("A{l}"),
                T1::B(m) => format!("B{}", flag(m, '*')),
                T1::Digit { v, m, c, s } => {
                    format!("{v}{}{}{}", flag(m, 'm'), flag(c, 'c'), flag(s, 's'))
                }
                T1::Pay { v, m, c } => format!("{v}{}{}", flag(m, 'm'), flag(c, 'c')),
            };
            format!("{top}|{}", t2.unwrap_or('-'))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Ph {
    /// Sweep 1: structure check, first marking step, track split.
    First,
    /// Marking sweeps: lengths of all blocks.
    Mark,
    /// Shifting sweeps: align each counter block with its successor.
    Shift,
    /// Successor check between consecutive counter blocks.
    Count,
    /// Guess the matching block, compare the first symbol.
    Guess,
    /// Symbol-wise comparison.
    Cmp,
}

impl Ph {
    fn shifts(self) -> bool {
        matches!(self, Ph::First | Ph::Mark | Ph::Shift)
    }

    fn marks(self) -> bool {
        matches!(self, Ph::First | Ph::Mark)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Reg {
    A,
    B,
    D0,
    P0,
    /// Counter block; all ones so far.
    Dg(bool),
    /// Payload; the preceding counter block was all ones.
    Pg(bool),
    /// Final block; all zeros so far.
    Df(bool),
    Pf,
}

impl Reg {
    fn class(self) -> u8 {
        match self {
            Reg::A => 0,
            Reg::B => 1,
            Reg::D0 | Reg::Dg(_) | Reg::Df(_) => 2,
            Reg::P0 | Reg::Pg(_) | Reg::Pf => 3,
        }
    }

    fn next(self, c: char) -> Option<Reg> {
        let digit = c == '0' || c == '1';
        Some(match (self, c) {
            (Reg::A, 'a') => Reg::A,
            (Reg::A | Reg::B, 'b') => Reg::B,
            (Reg::B | Reg::D0, _) if digit => Reg::D0,
            (Reg::D0 | Reg::P0, 'a' | 'b') => Reg::P0,
            (Reg::P0, _) if digit => Reg::Dg(c == '1'),
            (Reg::Dg(o), _) if digit => Reg::Dg(o && c == '1'),
            (Reg::Dg(o), 'a' | 'b') => Reg::Pg(o),
            (Reg::Pg(lo), 'a' | 'b') => Reg::Pg(lo),
            (Reg::Pg(true), _) if digit => Reg::Df(c == '0'),
            (Reg::Pg(false), _) if digit => Reg::Dg(c == '1'),
            (Reg::Df(z), _) if digit => Reg::Df(z && c == '0'),
            (Reg::Df(false), 'a' | 'b') | (Reg::Pf, 'a' | 'b') => Reg::Pf,
            _ => return None,
        })
    }
}

/// Progress through the leading a-block.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum ASub {
    Before,
    Just,
    After,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct DS {
    ph: Ph,
    reg: Reg,
    asub: ASub,
    /// Track-two symbol carried one cell to the right.
    t2: Option<char>,
    /// This is the last marking sweep.
    fin: bool,
    /// Odd number of unmarked b's seen.
    bpar: bool,
    /// Unmarked b's left, saturating at 2.
    brem: u8,
    /// Leftmost unmarked symbol of the current block already marked.
    done: bool,
    /// An unmarked symbol remains after it.
    rest: bool,
    carry: bool,
    take: Option<char>,
    insel: bool,
    cmpd: bool,
    restu: bool,
}

impl DS {
    fn new(ph: Ph, asub: ASub, t2: Option<char>) -> DS {
        DS {
            ph,
            reg: Reg::A,
            asub,
            t2,
            fin: false,
            bpar: false,
            brem: 0,
            done: false,
            rest: false,
            carry: false,
            take: None,
            insel: false,
            cmpd: false,
            restu: false,
        }
    }

    /// Checks made when the block in region `self.reg` ends.
    fn close_block(&self) -> bool {
        match self.reg.class() {
            0 => match self.ph {
                Ph::First => self.asub == ASub::After,
                Ph::Mark | Ph::Shift => self.asub != ASub::Before,
                _ => self.asub == ASub::After,
            },
            1 => {
                !self.ph.marks()
                    || (!self.bpar
                        && if self.fin {
                            self.brem == 1
                        } else {
                            self.brem >= 2
                        })
            }
            _ => {
                let marks_ok = !self.ph.marks() || (self.done && self.rest != self.fin);
                let carry_ok =
                    !(self.ph == Ph::Count && matches!(self.reg, Reg::Dg(_)) && self.carry);
                marks_ok && carry_ok
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum DQ {
    Init,
    Go(DS),
    Run,
    Accept,
}

fn d_step(q: &DQ, y: &DY) -> Vec<(DQ, DY)> {
    match *q {
        DQ::Init => d_init(*y),
        DQ::Go(s) => d_go(s, *y),
        DQ::Run | DQ::Accept => Vec::new(),
    }
}

fn d_init(y: DY) -> Vec<(DQ, DY)> {
    let go = |ph, asub, t2| DQ::Go(DS::new(ph, asub, t2));
    match y {
        DY::Raw('a') => vec![(
            go(Ph::First, ASub::Just, Some('a')),
            DY::Cell(T1::A(1), None),
        )],
        DY::Cell(T1::A(l), t2) => {
            let cell = |l| DY::Cell(T1::A(l), None);
            match l {
                1 => vec![
                    (go(Ph::Mark, ASub::Before, t2), cell(1)),
                    (go(Ph::Shift, ASub::Just, t2), cell(2)),
                ],
                2 => vec![
                    (go(Ph::Shift, ASub::Before, t2), cell(2)),
                    (go(Ph::Count, ASub::After, None), DY::Cell(T1::A(3), t2)),
                ],
                3 => vec![(go(Ph::Cmp, ASub::Before, None), DY::Cell(T1::A(3), t2))],
                _ => Vec::new(),
            }
        }
        _ => Vec::new(),
    }
}

fn d_end(s: DS) -> Vec<(DQ, DY)> {
    if s.reg != Reg::Pf || !s.close_block() {
        return Vec::new();
    }
    let q = match s.ph {
        Ph::Guess | Ph::Cmp if !s.cmpd => return Vec::new(),
        Ph::Guess | Ph::Cmp if !s.restu => DQ::Accept,
        _ => DQ::Run,
    };
    vec![(q, DY::End)]
}

fn d_go(s: DS, y: DY) -> Vec<(DQ, DY)> {
    let (ch, t1, old_t2) = match y {
        DY::End => return d_end(s),
        DY::Raw(c) => (c, None, Some(c)),
        DY::Cell(t1, t2) => (t1.ch(), Some(t1), t2),
    };
    if (s.ph == Ph::First) != t1.is_none() {
        return Vec::new();
    }
    let Some(reg) = s.reg.next(ch) else {
        return Vec::new();
    };
    if s.ph == Ph::First && reg == Reg::D0 && ch != '0' {
        return Vec::new();
    }
    let mut n = s;
    if reg.class() != s.reg.class() {
        if !s.close_block() {
            return Vec::new();
        }
        if s.reg == Reg::A && s.ph == Ph::Mark {
            n.fin = s.asub == ASub::Just;
        }
        n.done = false;
        n.rest = false;
        if s.ph == Ph::Count {
            n.carry = true;
        }
        if s.reg.class() == 3 {
            n.insel = false;
        }
    }
    n.reg = reg;
    let t2 = if s.ph.shifts() {
        n.t2 = old_t2;
        s.t2
    } else {
        old_t2
    };
    let cell = |t1: T1| DY::Cell(t1, t2);
    let one = |n: DS, t1: T1| vec![(DQ::Go(n), cell(t1))];
    match reg {
        Reg::A => {
            let level = match t1 {
                Some(T1::A(l)) => l,
                None => 0,
                _ => return Vec::new(),
            };
            let (asub, out) = match (s.ph, s.asub, level) {
                (Ph::First, _, 0) => (ASub::After, 0),
                (Ph::Mark, ASub::Before, 1) => (ASub::Before, 1),
                (Ph::Mark, ASub::Before, 0) => (ASub::Just, 1),
                (Ph::Mark, _, 0) => (ASub::After, 0),
                (Ph::Shift, ASub::Before, 2) => (ASub::Before, 2),
                (Ph::Shift, ASub::Before, 1) => (ASub::Just, 2),
                (Ph::Shift, _, 1) => (ASub::After, 1),
                (Ph::Count, _, 2) => (ASub::After, 2),
                (Ph::Cmp, ASub::Before, 2) => {
                    n.ph = Ph::Guess;
                    (ASub::After, 3)
                }
                (Ph::Cmp, ASub::Before, 3) => (ASub::After, 3),
                (Ph::Guess | Ph::Cmp, ASub::After, l @ (2 | 3)) => (ASub::After, l),
                _ => return Vec::new(),
            };
            n.asub = asub;
            one(n, T1::A(out))
        }
        Reg::B => {
            let marked = match t1 {
                Some(T1::B(m)) => m,
                None => false,
                _ => return Vec::new(),
            };
            if !s.ph.marks() || marked {
                return one(n, T1::B(marked));
            }
            n.bpar = !s.bpar;
            if s.bpar {
                one(n, T1::B(true))
            } else {
                n.brem = (s.brem + 1).min(2);
                one(n, T1::B(false))
            }
        }
        _ => d_block_cell(s, n, reg, t1, ch, t2),
    }
}

/// A cell of a counter or payload block.
fn d_block_cell(
    s: DS,
    mut n: DS,
    reg: Reg,
    t1: Option<T1>,
    ch: char,
    t2: Option<char>,
) -> Vec<(DQ, DY)> {
    let digit = reg.class() == 2;
    let (mut m, mut c, sel) = match t1 {
        None => (false, false, false),
        Some(T1::Digit { m, c, s, .. }) if digit => (m, c, s),
        Some(T1::Pay { m, c, .. }) if !digit => (m, c, false),
        _ => return Vec::new(),
    };
    let make = |m, c, sel| {
        let t1 = if digit {
            T1::Digit {
                v: ch,
                m,
                c,
                s: sel,
            }
        } else {
            T1::Pay { v: ch, m, c }
        };
        DY::Cell(t1, t2)
    };
    let entering = reg.class() != s.reg.class();
    match n.ph {
        Ph::First | Ph::Mark => {
            if !m {
                if n.done {
                    n.rest = true;
                } else {
                    n.done = true;
                    m = true;
                }
            }
        }
        Ph::Shift => {}
        Ph::Count => {
            if let Reg::Dg(_) = reg {
                let Some(d @ ('0' | '1')) = t2 else {
                    return Vec::new();
                };
                let d = d == '1';
                if (ch == '1') != (d ^ n.carry) {
                    return Vec::new();
                }
                n.carry = d && n.carry;
            }
        }
        Ph::Guess | Ph::Cmp => match reg {
            Reg::Dg(_) | Reg::Pg(_) => {
                if entering && digit && sel {
                    n.insel = true;
                }
                if n.ph == Ph::Guess && entering && digit && n.take.is_none() {
                    let mut chosen = n;
                    chosen.take = Some(ch);
                    chosen.insel = true;
                    return vec![
                        (DQ::Go(n), make(m, c, sel)),
                        (DQ::Go(chosen), make(m, true, true)),
                    ];
                }
                if n.ph == Ph::Cmp && n.insel && n.take.is_none() && !c {
                    n.take = Some(ch);
                    c = true;
                }
            }
            Reg::Df(_) | Reg::Pf => {
                let Some(x) = n.take else {
                    return Vec::new();
                };
                if !c {
                    if n.cmpd {
                        n.restu = true;
                    } else if x == ch {
                        n.cmpd = true;
                        c = true;
                    } else {
                        return Vec::new();
                    }
                }
            }
            _ => {}
        },
    }
    vec![(DQ::Go(n), make(m, c, sel))]
}

/// An NIUFST for D with track one holding the marked input and track two a
/// copy shifted one cell per sweep. Sweeps 1..k mark one symbol per block
/// (halving the b-block) to verify all lengths, sweeps k+1..2k finish
/// aligning each counter block under its successor, sweep 2k+1 checks the
/// successor relation, and the last 2k sweeps guess the repeated block and
/// compare it symbol by symbol with the final one.
pub fn gen_d() -> Transducer {
    let inputs: Vec<DY> = ['a', 'b', '0', '1'].into_iter().map(DY::Raw).collect();
    synthesize(
        DQ::Init,
        &inputs,
        DY::End,
        d_step,
        |q| *q == DQ::Accept,
        |i, q| match q {
            DQ::Init => "init".into(),
            DQ::Run => "run".into(),
            DQ::Accept => "acc".into(),
            DQ::Go(_) => format!("d{i}"),
        },
        d_symbol_name,
        SweepBound::Log,
    )
}

// ---------------------------------------------------------------------------
// Reference predicates

/// u₁#…#u_m with every uᵢ ∈ {0,1}^k, m > 1 and some i < m with uᵢ = u_m.
pub fn in_block(k: usize, w: &[&str]) -> bool {
    let blocks: Vec<&[&str]> = w.split(|s| *s == "#").collect();
    if blocks.len() < 2
        || blocks
            .iter()
            .any(|b| b.len() != k || b.iter().any(|s| *s != "0" && *s != "1"))
    {
        return false;
    }
    let (last, rest) = blocks.split_last().expect("two blocks");
    rest.contains(last)
}

/// a^{c·n^k}, c ≥ 0.
pub fn in_unary(n: usize, k: usize, w: &[&str]) -> bool {
    w.iter().all(|s| *s == "a") && w.len().is_multiple_of(n.pow(k as u32))
}

/// u b v with u, v ∈ {a,b}* and |v| = c·n^k − 1 for some c > 0.
pub fn in_e(n: usize, k: usize, w: &[&str]) -> bool {
    if w.iter().any(|s| *s != "a" && *s != "b") {
        return false;
    }
    let m = n.pow(k as u32);
    w.iter()
        .enumerate()
        .any(|(i, s)| *s == "b" && (w.len() - i).is_multiple_of(m))
}

/// u$u with `$` not in u.
pub fn in_copy(w: &[&str]) -> bool {
    let mut parts = w.split(|s| *s == "$");
    match (parts.next(), parts.next(), parts.next()) {
        (Some(u), Some(v), None) => u == v,
        _ => false,
    }
}

/// a^{2^j}, j ≥ 0.
pub fn in_uexpo(w: &[&str]) -> bool {
    w.iter().all(|s| *s == "a") && w.len().is_power_of_two()
}

/// The k-digit binary representation of `i`, least significant digit first.
pub fn bin(k: usize, i: usize) -> String {
    (0..k)
        .map(|j| if i >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// a^k b^{2^k} bin_k(0)u₀ … bin_k(2^k−1)u_{2^k−1} bin_k(i)uᵢ with k ≥ 2,
/// 1 ≤ i ≤ 2^k−1 and every u_j ∈ {a,b}^k.
pub fn in_d(w: &[&str]) -> bool {
    let k = w.iter().take_while(|s| **s == "a").count();
    if k < 2 || k >= usize::BITS as usize / 2 {
        return false;
    }
    let total = k + (1 << k) + ((1 << k) + 1) * 2 * k;
    if w.len() != total || w[k..k + (1 << k)].iter().any(|s| *s != "b") {
        return false;
    }
    let pairs: Vec<(String, &[&str])> = w[k + (1 << k)..]
        .chunks(2 * k)
        .map(|c| (c[..k].concat(), &c[k..]))
        .collect();
    if pairs
        .iter()
        .any(|(_, u)| u.iter().any(|s| *s != "a" && *s != "b"))
    {
        return false;
    }
    let (last, rest) = pairs.split_last().expect("pairs");
    if rest.iter().enumerate().any(|(j, (c, _))| *c != bin(k, j)) {
        return false;
    }
    (1..1 << k).any(|i| last.0 == bin(k, i) && last.1 == rest[i].1)
}

/// Builds the D instance for `k`, payloads `u` and repeated index `i`.
pub fn d_word(k: usize, u: &[Vec<&'static str>], i: usize) -> Vec<&'static str> {
    let mut w: Vec<&'static str> = Vec::new();
    w.extend(std::iter::repeat_n("a", k));
    w.extend(std::iter::repeat_n("b", 1 << k));
    let digit = |c: char| if c == '1' { "1" } else { "0" };
    for j in (0..1 << k).chain([i]) {
        w.extend(bin(k, j).chars().map(digit));
        w.extend(u[j].iter().copied());
    }
    w
}

/// All words of D with parameter `k`, in a fixed order.
pub fn d_positives(k: usize) -> Vec<Vec<&'static str>> {
    let blocks = 1usize << k;
    let payloads = 1usize << (k * blocks);
    let mut out = Vec::new();
    for code in 0..payloads {
        let u: Vec<Vec<&'static str>> = (0..blocks)
            .map(|j| {
                (0..k)
                    .map(|p| {
                        if code >> (j * k + p) & 1 == 1 {
                            "b"
                        } else {
                            "a"
                        }
                    })
                    .collect()
            })
            .collect();
        for i in 1..blocks {
            out.push(d_word(k, &u, i));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{budgets, compare_languages, Bounded, Predicate};
    use crate::run::run;

    fn accepts(t: &Transducer, w: &str, max: usize) -> bool {
        let word = t.parse_word(w).unwrap();
        run(t, &word, max, 1 << 20).unwrap().accepted
    }

    fn sweeps(t: &Transducer, w: &str, max: usize) -> Option<usize> {
        let word = t.parse_word(w).unwrap();
        run(t, &word, max, 1 << 20).unwrap().min_accept_sweeps
    }

    #[test]
    fn block_examples() {
        let t = gen_block(2).unwrap();
        assert!(accepts(&t, "00#11#00", 2));
        assert!(!accepts(&t, "00#11", 2));
        assert!(!accepts(&t, "0#11#00", 2));
        assert_eq!(sweeps(&t, "01#01", 2), Some(2));
        assert!(gen_block(1).is_err());
    }

    #[test]
    fn block_matches_predicate() {
        for k in 2..=3 {
            let t = gen_block(k).unwrap();
            let d = compare_languages(
                &Bounded::new(&t, k),
                &Predicate(|w: &[&str]| in_block(k, w)),
                &["0", "1", "#"],
                budgets::BLOCK - 2 * (k - 2),
            )
            .unwrap();
            assert!(d.is_empty(), "k={k}: {d:?}");
        }
    }

    #[test]
    fn block_state_envelope() {
        for k in 2..=6 {
            let n = gen_block(k).unwrap().num_states();
            assert!(
                n <= BLOCK_STATE_SLOPE * k + BLOCK_STATE_OFFSET,
                "k={k}: {n}"
            );
        }
    }

    #[test]
    fn block_nfa_counts_and_language() {
        assert_eq!(gen_block_nfa(2).unwrap().num_states(), 32);
        assert_eq!(gen_block_nfa(3).unwrap().num_states(), 80);
        let n = gen_block_nfa(2).unwrap();
        let d = compare_languages(
            &n,
            &Predicate(|w: &[&str]| in_block(2, w)),
            &["0", "1", "#"],
            9,
        )
        .unwrap();
        assert!(d.is_empty(), "{d:?}");
    }

    #[test]
    fn unary_examples() {
        let t = gen_unary(2, 2).unwrap();
        assert_eq!(t.num_states(), 2);
        assert!(t.is_deterministic());
        assert_eq!(sweeps(&t, "aaaa", 2), Some(2));
        assert!(!accepts(&t, "aaa", 2));
        assert!(accepts(&t, "", 2));
        for (n, k) in [(2, 1), (3, 2), (2, 3)] {
            let t = gen_unary(n, k).unwrap();
            for len in 0..=2 * n.pow(k as u32) + 2 {
                let w = "a".repeat(len);
                let ws: Vec<&str> = vec!["a"; len];
                assert_eq!(
                    accepts(&t, &w, k),
                    in_unary(n, k, &ws),
                    "n={n} k={k} len={len}"
                );
            }
        }
    }

    #[test]
    fn e_examples() {
        let t = gen_e(2, 1).unwrap();
        assert_eq!(t.num_states(), 3);
        assert!(accepts(&t, "aba", 1));
        assert!(!accepts(&t, "ab", 1));
        let tape = t.initial_tape(&t.parse_word("b").unwrap());
        let mut out = crate::run::sweep(&t, &tape).unwrap();
        out.sort_by_key(|o| format!("{o:?}"));
        let q0 = t.state_id("q0").unwrap();
        let q2 = t.state_id("q2").unwrap();
        assert!(out.contains(&crate::run::SweepOutcome::Stuck {
            position: 1,
            state: q0
        }));
        assert!(out.contains(&crate::run::SweepOutcome::Stuck {
            position: 1,
            state: q2
        }));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn e_matches_predicate() {
        for ((n, k), len) in budgets::E {
            let t = gen_e(n, k).unwrap();
            let d = compare_languages(
                &Bounded::new(&t, k),
                &Predicate(|w: &[&str]| in_e(n, k, w)),
                &["a", "b"],
                len.min(10),
            )
            .unwrap();
            assert!(d.is_empty(), "n={n} k={k}: {d:?}");
        }
    }

    #[test]
    fn copy_examples() {
        let t = gen_copy(&["a", "b"]).unwrap();
        assert!(t.is_deterministic());
        assert!(accepts(&t, "ab$ab", 10));
        assert!(!accepts(&t, "ab$ba", 10));
        assert!(accepts(&t, "$", 10));
        assert!(sweeps(&t, "ab$ab", 10).unwrap() <= 4);
        assert!(gen_copy(&["a", "$"]).is_err());
        let d = compare_languages(
            &Bounded::new(&t, 10),
            &Predicate(in_copy),
            &["a", "b", "$"],
            7,
        )
        .unwrap();
        assert!(d.is_empty(), "{d:?}");
    }

    #[test]
    fn uexpo_examples() {
        let t = gen_uexpo();
        assert!(t.is_deterministic());
        for m in 0..=40 {
            let ws = vec!["a"; m];
            assert_eq!(accepts(&t, &"a".repeat(m), 8), in_uexpo(&ws), "m={m}");
        }
        assert!(sweeps(&t, &"a".repeat(16), 8).unwrap() <= 5);
    }

    #[test]
    fn d_predicate() {
        let u: Vec<Vec<&str>> = vec![vec!["a", "b"]; 4];
        assert!(in_d(&d_word(2, &u, 1)));
        assert!(!in_d(&d_word(2, &u, 0)));
        assert_eq!(bin(4, 5), "1010");
        assert_eq!(bin(4, 12), "0011");
        assert_eq!(d_positives(2).len(), 768);
    }

    #[test]
    fn d_accepts_sample() {
        let t = gen_d();
        let pos = d_positives(2);
        for w in pos.iter().step_by(37) {
            let word = t.word(w).unwrap();
            let r = run(&t, &word, d_accept_sweeps(2) + 2, 1 << 20).unwrap();
            assert!(r.accepted, "{w:?}");
            assert_eq!(r.min_accept_sweeps, Some(d_accept_sweeps(2)));
            let mut bad = w.clone();
            let last = bad.len() - 1;
            bad[last] = if bad[last] == "a" { "b" } else { "a" };
            let word = t.word(&bad).unwrap();
            assert!(!run(&t, &word, 12, 1 << 20).unwrap().accepted);
        }
    }
}

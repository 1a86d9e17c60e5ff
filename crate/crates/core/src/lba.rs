//! Linear bounded automata: a configuration-space simulator and a compiler
//! to nondeterministic iterated transducers that emit one configuration per
//! sweep on two tracks.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::machine::{valid_name, Interner, SymbolId, Tape, Transducer, TransducerBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LbaError {
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("undeclared state `{0}`")]
    UnknownState(String),
    #[error("undeclared tape symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("tape symbol `{0}` clashes with a move token")]
    ReservedSymbol(String),
    #[error("input symbol `{0}` must be a tape symbol other than an endmarker")]
    BadInputSymbol(String),
    #[error("endmarker `{0}` is not a tape symbol")]
    MissingEndmarker(String),
    #[error("left and right endmarkers must differ")]
    SameEndmarkers,
    #[error("no initial state declared")]
    MissingInitial,
    #[error("transition from `{0}` moves beyond the endmarker `{1}`")]
    MovesBeyondEnd(String, String),
    #[error("transition from `{0}` on `{1}` overwrites an endmarker or writes one elsewhere")]
    EndmarkerWrite(String, String),
    #[error("input symbol `{0}` at position {1} is not in the input alphabet")]
    MalformedWord(String, usize),
}

/// One possible step: rewrite the scanned cell, or move the head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LbaAction {
    Write(usize),
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lba {
    states: Interner,
    tape: Interner,
    input: Vec<usize>,
    left_end: usize,
    right_end: usize,
    initial: usize,
    accepting: Vec<bool>,
    transitions: Vec<(usize, usize, usize, LbaAction)>,
    table: Vec<Vec<(usize, LbaAction)>>,
}

impl Lba {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        self.states.name(q)
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.get(name)
    }

    pub fn tape_symbols(&self) -> &[String] {
        self.tape.names()
    }

    pub fn symbol_name(&self, x: usize) -> &str {
        self.tape.name(x)
    }

    pub fn symbol_id(&self, name: &str) -> Option<usize> {
        self.tape.get(name)
    }

    pub fn input_alphabet(&self) -> &[usize] {
        &self.input
    }

    pub fn input_names(&self) -> Vec<String> {
        self.input
            .iter()
            .map(|&x| self.tape.name(x).to_string())
            .collect()
    }

    pub fn left_end(&self) -> usize {
        self.left_end
    }

    pub fn right_end(&self) -> usize {
        self.right_end
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn transitions(&self) -> &[(usize, usize, usize, LbaAction)] {
        &self.transitions
    }

    pub fn moves(&self, q: usize, x: usize) -> &[(usize, LbaAction)] {
        &self.table[q * self.tape.len() + x]
    }

    /// Renders an action as its file token (`L`, `R` or a tape symbol).
    pub fn action_token(&self, a: LbaAction) -> &str {
        match a {
            LbaAction::Write(x) => self.tape.name(x),
            LbaAction::Left => "L",
            LbaAction::Right => "R",
        }
    }

    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, LbaError> {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let n = n.as_ref();
                match self.tape.get(n) {
                    Some(x) if self.input.contains(&x) => Ok(x),
                    _ => Err(LbaError::MalformedWord(n.to_string(), i)),
                }
            })
            .collect()
    }

    pub fn initial_config(&self, word: &[usize]) -> LbaConfig {
        let mut tape = Vec::with_capacity(word.len() + 2);
        tape.push(self.left_end);
        tape.extend_from_slice(word);
        tape.push(self.right_end);
        LbaConfig {
            state: self.initial,
            head: 0,
            tape,
        }
    }

    pub fn is_accepting_config(&self, c: &LbaConfig) -> bool {
        self.accepting[c.state] && c.head + 1 == c.tape.len()
    }

    /// All successor configurations of one step.
    pub fn successors(&self, c: &LbaConfig) -> Vec<LbaConfig> {
        self.moves(c.state, c.tape[c.head])
            .iter()
            .filter_map(|&(r, a)| {
                let mut next = LbaConfig {
                    state: r,
                    head: c.head,
                    tape: c.tape.clone(),
                };
                match a {
                    LbaAction::Write(y) => next.tape[c.head] = y,
                    LbaAction::Left => next.head = c.head.checked_sub(1)?,
                    LbaAction::Right if c.head + 1 < c.tape.len() => next.head += 1,
                    LbaAction::Right => return None,
                }
                Some(next)
            })
            .collect()
    }
}

/// Name-based builder for [`Lba`]; actions are tape symbols, `L` or `R`.
#[derive(Clone, Debug, Default)]
pub struct LbaBuilder {
    states: Vec<String>,
    input: Vec<String>,
    tape: Vec<String>,
    left_end: Option<String>,
    right_end: Option<String>,
    initial: Option<String>,
    accepting: Vec<String>,
    transitions: Vec<[String; 4]>,
}

impl LbaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn states<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, names: I) -> &mut Self {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn input<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, names: I) -> &mut Self {
        self.input.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn tape<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, names: I) -> &mut Self {
        self.tape.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn ends(&mut self, left: impl Into<String>, right: impl Into<String>) -> &mut Self {
        self.left_end = Some(left.into());
        self.right_end = Some(right.into());
        self
    }

    pub fn initial(&mut self, name: impl Into<String>) -> &mut Self {
        self.initial = Some(name.into());
        self
    }

    pub fn accept(&mut self, name: impl Into<String>) -> &mut Self {
        self.accepting.push(name.into());
        self
    }

    pub fn transition(
        &mut self,
        from: impl Into<String>,
        read: impl Into<String>,
        to: impl Into<String>,
        action: impl Into<String>,
    ) -> &mut Self {
        self.transitions
            .push([from.into(), read.into(), to.into(), action.into()]);
        self
    }

    pub fn build(&self) -> Result<Lba, LbaError> {
        let mut states = Interner::new();
        for s in &self.states {
            if !valid_name(s) {
                return Err(LbaError::InvalidName(s.clone()));
            }
            if !states.intern(s).1 {
                return Err(LbaError::Duplicate(s.clone()));
            }
        }
        let mut tape = Interner::new();
        for s in &self.tape {
            if !valid_name(s) {
                return Err(LbaError::InvalidName(s.clone()));
            }
            if s == "L" || s == "R" {
                return Err(LbaError::ReservedSymbol(s.clone()));
            }
            if !tape.intern(s).1 {
                return Err(LbaError::Duplicate(s.clone()));
            }
        }
        let end = |n: &Option<String>| -> Result<usize, LbaError> {
            let n = n.clone().unwrap_or_default();
            tape.get(&n).ok_or(LbaError::MissingEndmarker(n))
        };
        let left_end = end(&self.left_end)?;
        let right_end = end(&self.right_end)?;
        if left_end == right_end {
            return Err(LbaError::SameEndmarkers);
        }
        let mut input = Vec::new();
        for s in &self.input {
            match tape.get(s) {
                Some(x) if x != left_end && x != right_end && !input.contains(&x) => input.push(x),
                _ => return Err(LbaError::BadInputSymbol(s.clone())),
            }
        }
        let state = |n: &str| {
            states
                .get(n)
                .ok_or_else(|| LbaError::UnknownState(n.to_string()))
        };
        let initial = state(self.initial.as_deref().ok_or(LbaError::MissingInitial)?)?;
        let mut accepting = vec![false; states.len()];
        for a in &self.accepting {
            accepting[state(a)?] = true;
        }
        let nsym = tape.len();
        let mut table = vec![Vec::new(); states.len() * nsym];
        let mut transitions = Vec::new();
        for [from, read, to, act] in &self.transitions {
            let p = state(from)?;
            let r = state(to)?;
            let x = tape
                .get(read)
                .ok_or_else(|| LbaError::UnknownSymbol(read.clone()))?;
            let a = match act.as_str() {
                "L" => LbaAction::Left,
                "R" => LbaAction::Right,
                y => LbaAction::Write(
                    tape.get(y)
                        .ok_or_else(|| LbaError::UnknownSymbol(y.to_string()))?,
                ),
            };
            match a {
                LbaAction::Left if x == left_end => {
                    return Err(LbaError::MovesBeyondEnd(from.clone(), read.clone()))
                }
                LbaAction::Right if x == right_end => {
                    return Err(LbaError::MovesBeyondEnd(from.clone(), read.clone()))
                }
                LbaAction::Write(y) => {
                    let x_end = x == left_end || x == right_end;
                    let y_end = y == left_end || y == right_end;
                    if (x_end || y_end) && x != y {
                        return Err(LbaError::EndmarkerWrite(from.clone(), read.clone()));
                    }
                }
                _ => {}
            }
            let cell = &mut table[p * nsym + x];
            if !cell.contains(&(r, a)) {
                cell.push((r, a));
                transitions.push((p, x, r, a));
            }
        }
        Ok(Lba {
            states,
            tape,
            input,
            left_end,
            right_end,
            initial,
            accepting,
            transitions,
            table,
        })
    }
}

/// State, head position and full tape including both endmarkers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LbaConfig {
    pub state: usize,
    pub head: usize,
    pub tape: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LbaRun {
    pub accepted: bool,
    pub steps_to_accept: Option<usize>,
    /// False when `max_steps` ran out with configurations still unexplored.
    pub halted: bool,
}

/// Breadth-first search over configurations. A configuration accepts when
/// its state is accepting and the head is on the right endmarker.
pub fn run_lba(m: &Lba, word: &[usize], max_steps: usize) -> Result<LbaRun, LbaError> {
    for (i, &x) in word.iter().enumerate() {
        if !m.input.contains(&x) {
            let name = m
                .tape
                .names()
                .get(x)
                .cloned()
                .unwrap_or_else(|| format!("#{x}"));
            return Err(LbaError::MalformedWord(name, i));
        }
    }
    let start = m.initial_config(word);
    let mut index: HashMap<LbaConfig, usize> = HashMap::from([(start.clone(), 0)]);
    let mut edges: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![start];
    for depth in 0..=max_steps {
        if frontier.iter().any(|c| m.is_accepting_config(c)) {
            return Ok(LbaRun {
                accepted: true,
                steps_to_accept: Some(depth),
                halted: true,
            });
        }
        if depth == max_steps {
            break;
        }
        let mut next = Vec::new();
        for c in &frontier {
            let from = index[c];
            for s in m.successors(c) {
                let n = index.len();
                let to = *index.entry(s.clone()).or_insert_with(|| {
                    next.push(s);
                    n
                });
                if to == n {
                    edges.push(Vec::new());
                }
                edges[from].push(to);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    // A reachable cycle means some computation never halts.
    Ok(LbaRun {
        accepted: false,
        steps_to_accept: None,
        halted: frontier.is_empty() && !has_cycle(&edges),
    })
}

fn has_cycle(edges: &[Vec<usize>]) -> bool {
    let mut color = vec![0u8; edges.len()];
    for root in 0..edges.len() {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        let mut stack = vec![(root, 0usize)];
        while let Some(&(v, k)) = stack.last() {
            if let Some(&u) = edges[v].get(k) {
                stack.last_mut().expect("stack").1 += 1;
                match color[u] {
                    0 => {
                        color[u] = 1;
                        stack.push((u, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    false
}

/// Configurations reachable in exactly `steps` steps.
pub fn configs_at_step(m: &Lba, word: &[usize], steps: usize) -> HashSet<LbaConfig> {
    let mut layer: HashSet<LbaConfig> = HashSet::from([m.initial_config(word)]);
    for _ in 0..steps {
        layer = layer.iter().flat_map(|c| m.successors(c)).collect();
    }
    layer
}

/// Meaning of one compiled tape symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Input(usize),
    End,
    Single {
        head: Option<usize>,
        content: usize,
    },
    Double {
        left: Option<usize>,
        head: Option<usize>,
        content: usize,
    },
}

/// A compiled LBA together with the table that decodes its tapes.
#[derive(Clone, Debug)]
pub struct CompiledLba {
    pub machine: Transducer,
    cells: HashMap<SymbolId, Cell>,
}

impl CompiledLba {
    /// Decodes a tape at a sweep boundary into the configuration it
    /// encodes, if it encodes exactly one head.
    pub fn decode(&self, tape: &[SymbolId]) -> Option<LbaConfig> {
        let mut config = LbaConfig {
            state: 0,
            head: 0,
            tape: Vec::with_capacity(tape.len() + 1),
        };
        let mut heads = 0;
        for (i, s) in tape.iter().enumerate() {
            match *self.cells.get(s)? {
                Cell::Double {
                    left,
                    head,
                    content,
                } if i == 0 => {
                    config.tape.push(usize::MAX);
                    config.tape.push(content);
                    for (pos, h) in [(0, left), (1, head)] {
                        if let Some(q) = h {
                            heads += 1;
                            config.state = q;
                            config.head = pos;
                        }
                    }
                }
                Cell::Single { head, content } if i > 0 => {
                    config.tape.push(content);
                    if let Some(q) = head {
                        heads += 1;
                        config.state = q;
                        config.head = i + 1;
                    }
                }
                _ => return None,
            }
        }
        (heads == 1).then_some(config)
    }

    /// Fills in the left endmarker, which decoding leaves as a placeholder.
    pub fn decode_with(&self, m: &Lba, tape: &[SymbolId]) -> Option<LbaConfig> {
        let mut c = self.decode(tape)?;
        c.tape[0] = m.left_end;
        Some(c)
    }
}

fn fresh(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}

/// Compiles an LBA into an iterated transducer that writes the source
/// configuration after step s on its tape in sweep s+1, and accepts in the
/// sweep that produces an accepting configuration.
pub fn compile_lba(m: &Lba) -> Result<CompiledLba, LbaError> {
    let q_names: Vec<String> = (0..m.num_states())
        .map(|q| m.state_name(q).to_string())
        .collect();
    let taken_state = |s: &str| q_names.iter().any(|q| q == s) || s.starts_with('^');
    let hat = |q: usize| format!("^{}", q_names[q]);
    let p0 = fresh("P0", &taken_state);
    let ps = fresh("Ps", &taken_state);
    let p1 = fresh("P1", &taken_state);
    let pplus = fresh("P+", &taken_state);
    let blank = fresh("_", &|s| q_names.iter().any(|q| q == s));

    let head_name = |h: Option<usize>| h.map_or(blank.as_str(), |q| q_names[q].as_str());
    let lend = m.symbol_name(m.left_end);
    let rend = m.right_end;
    let single = |h: Option<usize>, x: usize| format!("{}/{}", head_name(h), m.symbol_name(x));
    let double = |l: Option<usize>, h: Option<usize>, x: usize| {
        format!("{}/{}|{}", head_name(l), lend, single(h, x))
    };

    let mut cells: HashMap<String, Cell> = HashMap::new();
    let mut b = TransducerBuilder::new();
    b.states(q_names.iter().cloned());
    b.states((0..m.num_states()).map(hat));
    b.states([p0.clone(), ps.clone(), p1.clone(), pplus.clone()]);
    let mut outputs = Vec::new();
    for &x in &m.input {
        b.input(m.symbol_name(x));
        outputs.push(m.symbol_name(x).to_string());
        cells.insert(m.symbol_name(x).to_string(), Cell::Input(x));
    }
    let end_name = m.symbol_name(rend).to_string();
    outputs.push(end_name.clone());
    cells.insert(end_name.clone(), Cell::End);
    let heads: Vec<Option<usize>> = std::iter::once(None)
        .chain((0..m.num_states()).map(Some))
        .collect();
    let contents: Vec<usize> = (0..m.tape.len()).filter(|&x| x != m.left_end).collect();
    for &x in &contents {
        for &h in &heads {
            let name = single(h, x);
            cells.insert(
                name.clone(),
                Cell::Single {
                    head: h,
                    content: x,
                },
            );
            outputs.push(name);
        }
    }
    for &x in &contents {
        for &l in &heads {
            for &h in &heads {
                if l.is_some() && h.is_some() {
                    continue;
                }
                let name = double(l, h, x);
                cells.insert(
                    name.clone(),
                    Cell::Double {
                        left: l,
                        head: h,
                        content: x,
                    },
                );
                outputs.push(name);
            }
        }
    }
    for o in &outputs {
        b.output(o.clone());
    }
    b.endmarker(end_name.clone())
        .initial(p0.clone())
        .accept(pplus.clone());

    let q = |i: usize| q_names[i].clone();
    let firsts: Vec<usize> = m.input.iter().copied().chain([rend]).collect();
    // (1), (2): split the input into tracks.
    for &x in &firsts {
        b.transition(&p0, m.symbol_name(x), &ps, double(Some(m.initial), None, x));
    }
    for &x in &firsts {
        b.transition(&ps, m.symbol_name(x), &ps, single(None, x));
    }
    for &x in &contents {
        // (3), (4): guess that the head moves left onto the next cell.
        b.transition(&p0, double(None, None, x), &p0, double(None, None, x));
        b.transition(&p0, single(None, x), &p0, single(None, x));
        for s in 0..m.num_states() {
            b.transition(&p0, double(None, None, x), hat(s), double(None, Some(s), x));
            b.transition(&p0, single(None, x), hat(s), single(Some(s), x));
        }
        // (7), (8): a right move lands here; then run to the end.
        for s in 0..m.num_states() {
            b.transition(q(s), single(None, x), &p1, single(Some(s), x));
            if x == rend && m.is_accepting(s) {
                b.transition(q(s), single(None, x), &pplus, single(Some(s), x));
            }
        }
        b.transition(&p1, single(None, x), &p1, single(None, x));
    }
    for &(r, x, s, a) in &m.transitions {
        match a {
            // (5): verify a guessed left move.
            LbaAction::Left if x != m.left_end => {
                let from_cell = single(Some(r), x);
                b.transition(hat(s), &from_cell, &p1, single(None, x));
                // (11), left onto the left endmarker.
                b.transition(&p0, double(None, Some(r), x), &p1, double(Some(s), None, x));
            }
            LbaAction::Write(y) if x == m.left_end => {
                // (10), stationary on the left endmarker.
                for &c in &contents {
                    b.transition(&p0, double(Some(r), None, c), &p1, double(Some(s), None, c));
                }
                debug_assert_eq!(y, m.left_end);
            }
            LbaAction::Right if x == m.left_end => {
                // (10), right move off the left endmarker.
                for &c in &contents {
                    b.transition(&p0, double(Some(r), None, c), &p1, double(None, Some(s), c));
                    if c == rend && m.is_accepting(s) {
                        b.transition(
                            &p0,
                            double(Some(r), None, c),
                            &pplus,
                            double(None, Some(s), c),
                        );
                    }
                }
            }
            LbaAction::Write(y) => {
                // (6), (9), (11): stationary rewrite.
                b.transition(&p0, single(Some(r), x), &p1, single(Some(s), y));
                if x == rend && m.is_accepting(s) {
                    b.transition(&p0, single(Some(r), x), &pplus, single(Some(s), y));
                }
                b.transition(&p0, double(None, Some(r), x), &p1, double(None, Some(s), y));
                if x == rend && m.is_accepting(s) {
                    b.transition(
                        &p0,
                        double(None, Some(r), x),
                        &pplus,
                        double(None, Some(s), y),
                    );
                }
            }
            LbaAction::Right => {
                // (6), (11): right move; the next cell is handled by (7).
                b.transition(&p0, single(Some(r), x), q(s), single(None, x));
                b.transition(&p0, double(None, Some(r), x), q(s), double(None, None, x));
            }
            LbaAction::Left => unreachable!("validated: no left move on the left endmarker"),
        }
    }
    // (9): halting in an accepting state on the right endmarker.
    for s in 0..m.num_states() {
        if m.is_accepting(s) {
            b.transition(&p0, single(Some(s), rend), &pplus, single(None, rend));
            b.transition(
                &p0,
                double(None, Some(s), rend),
                &pplus,
                double(None, None, rend),
            );
        }
    }
    let machine = b
        .build()
        .map_err(|e| LbaError::InvalidName(e.to_string()))?;
    let cells = cells
        .into_iter()
        .map(|(name, c)| (machine.symbol_id(&name).expect("declared cell"), c))
        .collect();
    Ok(CompiledLba { machine, cells })
}

/// Word of the compiled machine corresponding to an LBA input word.
pub fn compiled_word(c: &CompiledLba, m: &Lba, word: &[usize]) -> Vec<SymbolId> {
    word.iter()
        .map(|&x| c.machine.symbol_id(m.symbol_name(x)).expect("input symbol"))
        .collect()
}

/// Decodes every tape of a compiled trace after the first.
pub fn decode_trace(c: &CompiledLba, m: &Lba, trace: &[Tape]) -> Vec<Option<LbaConfig>> {
    trace.iter().skip(1).map(|t| c.decode_with(m, t)).collect()
}

//! The transducer model: states, alphabets, the endmarker and the
//! nondeterministic length-preserving transition relation.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use thiserror::Error;

/// Dense index of a state inside one machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(u32);

/// Dense index of a symbol inside one machine (over Σ ∪ Δ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(u32);

impl StateId {
    pub fn new(index: usize) -> Self {
        StateId(u32::try_from(index).expect("state index overflows u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl SymbolId {
    pub fn new(index: usize) -> Self {
        SymbolId(u32::try_from(index).expect("symbol index overflows u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bidirectional name table; ids are assigned in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, inserting it if absent. The flag is true
    /// when the name was new.
    pub fn intern(&mut self, name: &str) -> (usize, bool) {
        if let Some(&i) = self.index.get(name) {
            return (i, false);
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        (i, true)
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl FromIterator<String> for Interner {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        let mut t = Interner::new();
        for name in iter {
            t.intern(&name);
        }
        t
    }
}

/// Declared sweep complexity of a transducer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepBound {
    Constant(usize),
    Log,
    Linear,
    Unbounded,
}

impl SweepBound {
    pub fn constant(self) -> Option<usize> {
        match self {
            SweepBound::Constant(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for SweepBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepBound::Constant(k) => write!(f, "{k}"),
            SweepBound::Log => f.write_str("log"),
            SweepBound::Linear => f.write_str("linear"),
            SweepBound::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for SweepBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log" => Ok(SweepBound::Log),
            "linear" => Ok(SweepBound::Linear),
            "unbounded" => Ok(SweepBound::Unbounded),
            _ => match s.parse::<usize>() {
                Ok(k) if k > 0 => Ok(SweepBound::Constant(k)),
                _ => Err(format!("invalid sweep bound `{s}`")),
            },
        }
    }
}

/// One entry of the transition relation: in `from` reading `read`, move to
/// `to` and write `write`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub read: SymbolId,
    pub to: StateId,
    pub write: SymbolId,
}

/// A fixed-length tape of symbols. Sweeps never change its length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tape(Vec<SymbolId>);

impl Tape {
    pub fn new(cells: Vec<SymbolId>) -> Self {
        Tape(cells)
    }

    pub fn into_inner(self) -> Vec<SymbolId> {
        self.0
    }
}

impl Deref for Tape {
    type Target = [SymbolId];

    fn deref(&self) -> &[SymbolId] {
        &self.0
    }
}

impl From<Vec<SymbolId>> for Tape {
    fn from(v: Vec<SymbolId>) -> Self {
        Tape(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate symbol `{0}` in one alphabet")]
    DuplicateSymbol(String),
    #[error("undeclared state `{0}`")]
    UnknownState(String),
    #[error("undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` is written but is not an output symbol")]
    NotAnOutputSymbol(String),
    #[error("endmarker must not be an input symbol")]
    EndmarkerInInput,
    #[error("endmarker `{0}` must be an output symbol")]
    EndmarkerNotOutput(String),
    #[error("no endmarker declared")]
    MissingEndmarker,
    #[error("no initial state declared")]
    MissingInitial,
    #[error("invalid name `{0}`: names must be non-empty and free of whitespace")]
    InvalidName(String),
}

/// An (N)IUFST: a length-preserving transducer that is iterated sweep by
/// sweep over its own output, starting from the input word followed by the
/// endmarker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    states: Interner,
    symbols: Interner,
    input: Vec<SymbolId>,
    output: Vec<SymbolId>,
    is_input: Vec<bool>,
    is_output: Vec<bool>,
    endmarker: SymbolId,
    initial: StateId,
    accepting: Vec<bool>,
    transitions: Vec<Transition>,
    table: Vec<Vec<(StateId, SymbolId)>>,
    sweep_bound: Option<SweepBound>,
}

impl Transducer {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId::new)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        self.states.name(q.index())
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.get(name).map(StateId::new)
    }

    pub fn symbol_name(&self, s: SymbolId) -> &str {
        self.symbols.name(s.index())
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.symbols.get(name).map(SymbolId::new)
    }

    /// Σ in declaration order.
    pub fn input_alphabet(&self) -> &[SymbolId] {
        &self.input
    }

    /// Δ in declaration order.
    pub fn output_alphabet(&self) -> &[SymbolId] {
        &self.output
    }

    pub fn input_names(&self) -> Vec<String> {
        self.input
            .iter()
            .map(|&s| self.symbol_name(s).to_string())
            .collect()
    }

    pub fn is_input_symbol(&self, s: SymbolId) -> bool {
        self.is_input[s.index()]
    }

    pub fn is_output_symbol(&self, s: SymbolId) -> bool {
        self.is_output[s.index()]
    }

    pub fn endmarker(&self) -> SymbolId {
        self.endmarker
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q.index()]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&q| self.is_accepting(q))
    }

    /// All transitions in insertion order.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// The transition set δ(q, x), in insertion order.
    pub fn moves(&self, q: StateId, x: SymbolId) -> &[(StateId, SymbolId)] {
        &self.table[q.index() * self.symbols.len() + x.index()]
    }

    pub fn is_deterministic(&self) -> bool {
        self.table.iter().all(|m| m.len() <= 1)
    }

    pub fn sweep_bound(&self) -> Option<SweepBound> {
        self.sweep_bound
    }

    pub fn with_sweep_bound(mut self, bound: Option<SweepBound>) -> Self {
        self.sweep_bound = bound;
        self
    }

    /// The constant sweep bound, if one is declared.
    pub fn constant_sweeps(&self) -> Option<usize> {
        self.sweep_bound.and_then(SweepBound::constant)
    }

    /// Maps symbol names to ids, requiring every symbol to be in Σ.
    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<SymbolId>, ModelError> {
        names
            .iter()
            .map(|n| {
                let n = n.as_ref();
                match self.symbol_id(n) {
                    Some(s) if self.is_input_symbol(s) => Ok(s),
                    _ => Err(ModelError::UnknownSymbol(n.to_string())),
                }
            })
            .collect()
    }

    /// Parses a word written with `,` separators, or unseparated when every
    /// input symbol is a single character.
    pub fn parse_word(&self, text: &str) -> Result<Vec<SymbolId>, ModelError> {
        let names = split_word(text, &self.input_names());
        self.word(&names)
    }

    pub fn tape_names(&self, tape: &[SymbolId]) -> Vec<&str> {
        tape.iter().map(|&s| self.symbol_name(s)).collect()
    }

    /// Space-separated rendering of a tape.
    pub fn format_tape(&self, tape: &[SymbolId]) -> String {
        self.tape_names(tape).join(" ")
    }

    /// The tape a computation on `word` starts from: the word followed by
    /// the endmarker.
    pub fn initial_tape(&self, word: &[SymbolId]) -> Tape {
        let mut cells = word.to_vec();
        cells.push(self.endmarker);
        Tape(cells)
    }
}

/// Splits a textual word into symbol names. Commas separate symbols; a word
/// without commas is split into characters when every alphabet symbol is a
/// single character, and otherwise taken as one symbol.
pub fn split_word(text: &str, alphabet: &[String]) -> Vec<String> {
    let text = text.trim();
    if text.is_empty() {
        return Vec::new();
    }
    if text.contains(',') {
        return text.split(',').map(|s| s.trim().to_string()).collect();
    }
    if alphabet.iter().all(|a| a.chars().count() == 1) {
        text.chars().map(|c| c.to_string()).collect()
    } else {
        vec![text.to_string()]
    }
}

pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(char::is_whitespace)
}

/// Name-based builder that validates every structural invariant on `build`.
#[derive(Clone, Debug, Default)]
pub struct TransducerBuilder {
    states: Vec<String>,
    input: Vec<String>,
    output: Vec<String>,
    endmarker: Option<String>,
    initial: Option<String>,
    accepting: Vec<String>,
    transitions: Vec<[String; 4]>,
    sweep_bound: Option<SweepBound>,
}

impl TransducerBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: impl Into<String>) -> &mut Self {
        self.states.push(name.into());
        self
    }

    pub fn states<I, S>(&mut self, names: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn input(&mut self, name: impl Into<String>) -> &mut Self {
        self.input.push(name.into());
        self
    }

    pub fn output(&mut self, name: impl Into<String>) -> &mut Self {
        self.output.push(name.into());
        self
    }

    pub fn endmarker(&mut self, name: impl Into<String>) -> &mut Self {
        self.endmarker = Some(name.into());
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

    pub fn sweeps(&mut self, bound: SweepBound) -> &mut Self {
        self.sweep_bound = Some(bound);
        self
    }

    pub fn transition(
        &mut self,
        from: impl Into<String>,
        read: impl Into<String>,
        to: impl Into<String>,
        write: impl Into<String>,
    ) -> &mut Self {
        self.transitions
            .push([from.into(), read.into(), to.into(), write.into()]);
        self
    }

    pub fn build(&self) -> Result<Transducer, ModelError> {
        let mut states = Interner::new();
        for s in &self.states {
            if !valid_name(s) {
                return Err(ModelError::InvalidName(s.clone()));
            }
            if !states.intern(s).1 {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let mut symbols = Interner::new();
        let mut input = Vec::new();
        let mut output = Vec::new();
        for (list, target) in [(&self.input, &mut input), (&self.output, &mut output)] {
            let mut seen = std::collections::HashSet::new();
            for s in list {
                if !valid_name(s) {
                    return Err(ModelError::InvalidName(s.clone()));
                }
                if !seen.insert(s.as_str()) {
                    return Err(ModelError::DuplicateSymbol(s.clone()));
                }
                target.push(SymbolId::new(symbols.intern(s).0));
            }
        }
        let mut is_input = vec![false; symbols.len()];
        let mut is_output = vec![false; symbols.len()];
        for s in &input {
            is_input[s.index()] = true;
        }
        for s in &output {
            is_output[s.index()] = true;
        }
        let end_name = self
            .endmarker
            .as_ref()
            .ok_or(ModelError::MissingEndmarker)?;
        let endmarker = symbols
            .get(end_name)
            .map(SymbolId::new)
            .ok_or_else(|| ModelError::EndmarkerNotOutput(end_name.clone()))?;
        if is_input[endmarker.index()] {
            return Err(ModelError::EndmarkerInInput);
        }
        if !is_output[endmarker.index()] {
            return Err(ModelError::EndmarkerNotOutput(end_name.clone()));
        }
        let lookup_state = |n: &str| {
            states
                .get(n)
                .map(StateId::new)
                .ok_or_else(|| ModelError::UnknownState(n.to_string()))
        };
        let init_name = self.initial.as_ref().ok_or(ModelError::MissingInitial)?;
        let initial = lookup_state(init_name)?;
        let mut accepting = vec![false; states.len()];
        for a in &self.accepting {
            accepting[lookup_state(a)?.index()] = true;
        }
        let nsym = symbols.len();
        let mut table = vec![Vec::new(); states.len() * nsym];
        let mut transitions = Vec::new();
        for [from, read, to, write] in &self.transitions {
            let from = lookup_state(from)?;
            let to = lookup_state(to)?;
            let read = symbols
                .get(read)
                .map(SymbolId::new)
                .ok_or_else(|| ModelError::UnknownSymbol(read.clone()))?;
            let write_id = symbols
                .get(write)
                .map(SymbolId::new)
                .ok_or_else(|| ModelError::UnknownSymbol(write.clone()))?;
            if !is_output[write_id.index()] {
                return Err(ModelError::NotAnOutputSymbol(write.clone()));
            }
            let cell = &mut table[from.index() * nsym + read.index()];
            if !cell.contains(&(to, write_id)) {
                cell.push((to, write_id));
                transitions.push(Transition {
                    from,
                    read,
                    to,
                    write: write_id,
                });
            }
        }
        Ok(Transducer {
            states,
            symbols,
            input,
            output,
            is_input,
            is_output,
            endmarker,
            initial,
            accepting,
            transitions,
            table,
            sweep_bound: self.sweep_bound,
        })
    }
}

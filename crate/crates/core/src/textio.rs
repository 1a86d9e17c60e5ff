//! Line-oriented text format shared by all machine kinds.
//!
//! ```text
//! kind niufst
//! states q0 q1
//! input a b
//! output a b <
//! endmarker <
//! initial q0
//! accept q1
//! sweeps 2
//! trans q0 a -> q1 b
//! ```
//!
//! `%` starts a comment. NFAs and DFAs use `trans s a -> t`; LBAs declare
//! `tape`, `lend` and `rend` and use `trans s a -> t (y|L|R)`.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::automata::{Dfa, Nfa};
use crate::lba::{Lba, LbaBuilder, LbaError};
use crate::machine::{ModelError, SweepBound, Transducer, TransducerBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Niufst,
    Iufst,
    Nfa,
    Dfa,
    Lba,
}

impl Kind {
    fn parse(s: &str) -> Option<Kind> {
        Some(match s {
            "niufst" => Kind::Niufst,
            "iufst" => Kind::Iufst,
            "nfa" => Kind::Nfa,
            "dfa" => Kind::Dfa,
            "lba" => Kind::Lba,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Niufst => "niufst",
            Kind::Iufst => "iufst",
            Kind::Nfa => "nfa",
            Kind::Dfa => "dfa",
            Kind::Lba => "lba",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineFile {
    Niufst(Transducer),
    Iufst(Transducer),
    Nfa(Nfa),
    Dfa(Dfa),
    Lba(Lba),
}

impl MachineFile {
    pub fn kind(&self) -> Kind {
        match self {
            MachineFile::Niufst(_) => Kind::Niufst,
            MachineFile::Iufst(_) => Kind::Iufst,
            MachineFile::Nfa(_) => Kind::Nfa,
            MachineFile::Dfa(_) => Kind::Dfa,
            MachineFile::Lba(_) => Kind::Lba,
        }
    }

    /// Wraps a transducer, choosing `iufst` when it is deterministic.
    pub fn transducer(t: Transducer) -> Self {
        if t.is_deterministic() {
            MachineFile::Iufst(t)
        } else {
            MachineFile::Niufst(t)
        }
    }

    pub fn as_transducer(&self) -> Option<&Transducer> {
        match self {
            MachineFile::Niufst(t) | MachineFile::Iufst(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("unknown machine kind `{0}`")]
    UnknownKind(String),
    #[error("directive `{0}` given more than once")]
    RepeatedDirective(String),
    #[error("missing directive `{0}`")]
    MissingDirective(&'static str),
    #[error("directive `{0}` is not allowed for kind {1}")]
    NotAllowed(String, &'static str),
    #[error("directive `{0}` expects {1}")]
    Arity(String, &'static str),
    #[error("undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("reserved token `{0}` used as a name")]
    Reserved(String),
    #[error("endmarker must not be an input symbol")]
    EndmarkerInInput,
    #[error("endmarker `{0}` is not an output symbol")]
    EndmarkerNotOutput(String),
    #[error("malformed transition; expected `trans {0}`")]
    MalformedTransition(&'static str),
    #[error("duplicate DFA transition from `{0}` on `{1}`")]
    DuplicateDfaTransition(String, String),
    #[error("LBA move `{0}` is neither a tape symbol nor L or R")]
    BadLbaMove(String),
    #[error("kind iufst requires a deterministic machine; `{0}` on `{1}` has several moves")]
    Nondeterministic(String, String),
    #[error("invalid sweep bound `{0}`")]
    BadSweeps(String),
    #[error("{0}")]
    Model(ModelError),
    #[error("{0}")]
    Lba(LbaError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

struct Line<'a> {
    no: usize,
    head: &'a str,
    args: Vec<&'a str>,
}

const DIRECTIVES: &[&str] = &[
    "kind",
    "states",
    "input",
    "output",
    "tape",
    "endmarker",
    "lend",
    "rend",
    "initial",
    "accept",
    "sweeps",
    "trans",
];

fn allowed(kind: Kind, directive: &str) -> bool {
    match directive {
        "output" | "endmarker" | "sweeps" => matches!(kind, Kind::Niufst | Kind::Iufst),
        "tape" | "lend" | "rend" => kind == Kind::Lba,
        _ => true,
    }
}

struct Directives<'a> {
    kind: Kind,
    lines: Vec<Line<'a>>,
}

impl<'a> Directives<'a> {
    /// The unique line for a single-occurrence directive.
    fn single(&self, name: &str) -> Result<Option<&Line<'a>>, ParseError> {
        let mut found = self.lines.iter().filter(|l| l.head == name);
        let first = found.next();
        if let Some(dup) = found.next() {
            return Err(err(dup.no, ParseErrorKind::RepeatedDirective(name.into())));
        }
        Ok(first)
    }

    fn required(&self, name: &'static str) -> Result<&Line<'a>, ParseError> {
        self.single(name)?
            .ok_or_else(|| err(0, ParseErrorKind::MissingDirective(name)))
    }

    fn list(
        &self,
        name: &'static str,
        required: bool,
    ) -> Result<(usize, Vec<&'a str>), ParseError> {
        match self.single(name)? {
            Some(l) => Ok((l.no, l.args.clone())),
            None if required => Err(err(0, ParseErrorKind::MissingDirective(name))),
            None => Ok((0, Vec::new())),
        }
    }

    fn one(&self, name: &'static str) -> Result<(usize, &'a str), ParseError> {
        let l = self.required(name)?;
        match l.args.as_slice() {
            [x] => Ok((l.no, x)),
            _ => Err(err(
                l.no,
                ParseErrorKind::Arity(name.into(), "exactly one operand"),
            )),
        }
    }

    fn transitions(&self) -> impl Iterator<Item = &Line<'a>> {
        self.lines.iter().filter(|l| l.head == "trans")
    }
}

fn check_names(line: usize, names: &[&str]) -> Result<(), ParseError> {
    let mut seen = HashSet::new();
    for n in names {
        if *n == "->" {
            return Err(err(line, ParseErrorKind::Reserved(n.to_string())));
        }
        if !seen.insert(*n) {
            return Err(err(line, ParseErrorKind::DuplicateName(n.to_string())));
        }
    }
    Ok(())
}

/// Parses a machine file, validating every structural invariant.
pub fn parse_machine(text: &str) -> Result<MachineFile, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('%').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(head) = toks.next() else { continue };
        if !DIRECTIVES.contains(&head) {
            return Err(err(i + 1, ParseErrorKind::UnknownDirective(head.into())));
        }
        lines.push(Line {
            no: i + 1,
            head,
            args: toks.collect(),
        });
    }
    let mut kinds = lines.iter().filter(|l| l.head == "kind");
    let kind_line = kinds
        .next()
        .ok_or_else(|| err(0, ParseErrorKind::MissingDirective("kind")))?;
    if let Some(dup) = kinds.next() {
        return Err(err(
            dup.no,
            ParseErrorKind::RepeatedDirective("kind".into()),
        ));
    }
    let kind = match kind_line.args.as_slice() {
        [k] => Kind::parse(k)
            .ok_or_else(|| err(kind_line.no, ParseErrorKind::UnknownKind(k.to_string())))?,
        _ => {
            return Err(err(
                kind_line.no,
                ParseErrorKind::Arity("kind".into(), "exactly one operand"),
            ))
        }
    };
    for l in &lines {
        if !allowed(kind, l.head) {
            return Err(err(
                l.no,
                ParseErrorKind::NotAllowed(l.head.into(), kind.as_str()),
            ));
        }
    }
    let d = Directives { kind, lines };
    match d.kind {
        Kind::Niufst | Kind::Iufst => parse_transducer(&d),
        Kind::Nfa | Kind::Dfa => parse_automaton(&d),
        Kind::Lba => parse_lba(&d),
    }
}

fn parse_transducer(d: &Directives) -> Result<MachineFile, ParseError> {
    let (sl, states) = d.list("states", true)?;
    check_names(sl, &states)?;
    let (il, input) = d.list("input", false)?;
    check_names(il, &input)?;
    let (ol, output) = d.list("output", true)?;
    check_names(ol, &output)?;
    let (el, end) = d.one("endmarker")?;
    if input.contains(&end) {
        return Err(err(el, ParseErrorKind::EndmarkerInInput));
    }
    if !output.contains(&end) {
        return Err(err(el, ParseErrorKind::EndmarkerNotOutput(end.into())));
    }
    let state_ok = |line: usize, s: &str| {
        if states.contains(&s) {
            Ok(())
        } else {
            Err(err(line, ParseErrorKind::UndeclaredState(s.into())))
        }
    };
    let (nl, init) = d.one("initial")?;
    state_ok(nl, init)?;
    let (al, accept) = d.list("accept", false)?;
    for a in &accept {
        state_ok(al, a)?;
    }
    let mut b = TransducerBuilder::new();
    b.states(states.iter().copied());
    for x in &input {
        b.input(*x);
    }
    for x in &output {
        b.output(*x);
    }
    b.endmarker(end).initial(init);
    for a in &accept {
        b.accept(*a);
    }
    if let Some(l) = d.single("sweeps")? {
        let bound = match l.args.as_slice() {
            [s] => s
                .parse::<SweepBound>()
                .map_err(|_| err(l.no, ParseErrorKind::BadSweeps(s.to_string())))?,
            _ => {
                return Err(err(
                    l.no,
                    ParseErrorKind::Arity("sweeps".into(), "one operand"),
                ))
            }
        };
        b.sweeps(bound);
    }
    let mut seen_moves: HashSet<(&str, &str)> = HashSet::new();
    for l in d.transitions() {
        let [p, x, "->", q, y] = l.args.as_slice() else {
            return Err(err(l.no, ParseErrorKind::MalformedTransition("s a -> t y")));
        };
        state_ok(l.no, p)?;
        state_ok(l.no, q)?;
        if !input.contains(x) && !output.contains(x) {
            return Err(err(l.no, ParseErrorKind::UndeclaredSymbol(x.to_string())));
        }
        if !output.contains(y) {
            return Err(err(l.no, ParseErrorKind::UndeclaredSymbol(y.to_string())));
        }
        if d.kind == Kind::Iufst && !seen_moves.insert((p, x)) {
            return Err(err(
                l.no,
                ParseErrorKind::Nondeterministic(p.to_string(), x.to_string()),
            ));
        }
        b.transition(*p, *x, *q, *y);
    }
    let t = b.build().map_err(|e| err(0, ParseErrorKind::Model(e)))?;
    Ok(match d.kind {
        Kind::Iufst => MachineFile::Iufst(t),
        _ => MachineFile::Niufst(t),
    })
}

fn parse_automaton(d: &Directives) -> Result<MachineFile, ParseError> {
    let (sl, states) = d.list("states", true)?;
    check_names(sl, &states)?;
    let (il, input) = d.list("input", false)?;
    check_names(il, &input)?;
    let (nl, init) = d.one("initial")?;
    let state = |line: usize, s: &str| {
        states
            .iter()
            .position(|x| *x == s)
            .ok_or_else(|| err(line, ParseErrorKind::UndeclaredState(s.into())))
    };
    let sym = |line: usize, s: &str| {
        input
            .iter()
            .position(|x| *x == s)
            .ok_or_else(|| err(line, ParseErrorKind::UndeclaredSymbol(s.into())))
    };
    state(nl, init)?;
    let (al, accept) = d.list("accept", false)?;
    let mut accepting = Vec::new();
    for a in &accept {
        accepting.push(state(al, a)?);
    }
    let mut trans = Vec::new();
    for l in d.transitions() {
        let [p, x, "->", q] = l.args.as_slice() else {
            return Err(err(l.no, ParseErrorKind::MalformedTransition("s a -> t")));
        };
        trans.push((l.no, state(l.no, p)?, sym(l.no, x)?, state(l.no, q)?));
    }
    // States keep declaration order; the initial state need not be first.
    if d.kind == Kind::Nfa {
        let mut n = Nfa::new(&input, states[0]);
        for s in &states[1..] {
            n.add_state(s);
        }
        n.set_initial(state(nl, init)?);
        for q in accepting {
            n.set_accepting(q, true);
        }
        for (_, p, a, q) in trans {
            n.add_transition(p, a, q);
        }
        Ok(MachineFile::Nfa(n))
    } else {
        let mut m = Dfa::new(&input, states[0]);
        for s in &states[1..] {
            m.add_state(s);
        }
        m.set_initial(state(nl, init)?);
        for q in accepting {
            m.set_accepting(q, true);
        }
        for (no, p, a, q) in trans {
            if m.next(p, a).is_some() {
                return Err(err(
                    no,
                    ParseErrorKind::DuplicateDfaTransition(states[p].into(), input[a].into()),
                ));
            }
            m.add_transition(p, a, q).expect("checked above");
        }
        Ok(MachineFile::Dfa(m))
    }
}

fn parse_lba(d: &Directives) -> Result<MachineFile, ParseError> {
    let (sl, states) = d.list("states", true)?;
    check_names(sl, &states)?;
    let (il, input) = d.list("input", false)?;
    check_names(il, &input)?;
    let (tl, tape) = d.list("tape", true)?;
    check_names(tl, &tape)?;
    if let Some(bad) = tape.iter().find(|x| **x == "L" || **x == "R") {
        return Err(err(tl, ParseErrorKind::Reserved(bad.to_string())));
    }
    let sym_ok = |line: usize, s: &str| {
        if tape.contains(&s) {
            Ok(())
        } else {
            Err(err(line, ParseErrorKind::UndeclaredSymbol(s.into())))
        }
    };
    let state_ok = |line: usize, s: &str| {
        if states.contains(&s) {
            Ok(())
        } else {
            Err(err(line, ParseErrorKind::UndeclaredState(s.into())))
        }
    };
    for x in &input {
        sym_ok(il, x)?;
    }
    let (ll, lend) = d.one("lend")?;
    sym_ok(ll, lend)?;
    let (rl, rend) = d.one("rend")?;
    sym_ok(rl, rend)?;
    let (nl, init) = d.one("initial")?;
    state_ok(nl, init)?;
    let (al, accept) = d.list("accept", false)?;
    let mut b = LbaBuilder::new();
    b.states(states.iter().copied())
        .input(input.iter().copied())
        .tape(tape.iter().copied())
        .ends(lend, rend)
        .initial(init);
    for a in &accept {
        state_ok(al, a)?;
        b.accept(*a);
    }
    for l in d.transitions() {
        let [p, x, "->", q, act] = l.args.as_slice() else {
            return Err(err(
                l.no,
                ParseErrorKind::MalformedTransition("s a -> t (y|L|R)"),
            ));
        };
        state_ok(l.no, p)?;
        state_ok(l.no, q)?;
        sym_ok(l.no, x)?;
        if !matches!(*act, "L" | "R") && !tape.contains(act) {
            return Err(err(l.no, ParseErrorKind::BadLbaMove(act.to_string())));
        }
        // Report static violations against the offending line.
        let mut single = b.clone();
        single.transition(*p, *x, *q, *act);
        if let Err(e) = single.build() {
            return Err(err(l.no, ParseErrorKind::Lba(e)));
        }
        b.transition(*p, *x, *q, *act);
    }
    let m = b.build().map_err(|e| err(0, ParseErrorKind::Lba(e)))?;
    Ok(MachineFile::Lba(m))
}

/// Canonical text of a machine.
pub fn serialize_machine(m: &MachineFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind {}", m.kind().as_str());
    let line = |out: &mut String, head: &str, items: &[&str]| {
        out.push_str(head);
        for i in items {
            out.push(' ');
            out.push_str(i);
        }
        out.push('\n');
    };
    match m {
        MachineFile::Niufst(t) | MachineFile::Iufst(t) => {
            let states: Vec<&str> = t.states().map(|q| t.state_name(q)).collect();
            line(&mut out, "states", &states);
            let input: Vec<&str> = t
                .input_alphabet()
                .iter()
                .map(|&s| t.symbol_name(s))
                .collect();
            line(&mut out, "input", &input);
            let output: Vec<&str> = t
                .output_alphabet()
                .iter()
                .map(|&s| t.symbol_name(s))
                .collect();
            line(&mut out, "output", &output);
            line(&mut out, "endmarker", &[t.symbol_name(t.endmarker())]);
            line(&mut out, "initial", &[t.state_name(t.initial())]);
            let acc: Vec<&str> = t.accepting_states().map(|q| t.state_name(q)).collect();
            line(&mut out, "accept", &acc);
            if let Some(b) = t.sweep_bound() {
                line(&mut out, "sweeps", &[&b.to_string()]);
            }
            for tr in t.transitions() {
                line(
                    &mut out,
                    "trans",
                    &[
                        t.state_name(tr.from),
                        t.symbol_name(tr.read),
                        "->",
                        t.state_name(tr.to),
                        t.symbol_name(tr.write),
                    ],
                );
            }
        }
        MachineFile::Nfa(n) => {
            let states: Vec<&str> = (0..n.num_states()).map(|q| n.state_name(q)).collect();
            line(&mut out, "states", &states);
            let input: Vec<&str> = n.alphabet().iter().map(String::as_str).collect();
            line(&mut out, "input", &input);
            line(&mut out, "initial", &[n.state_name(n.initial())]);
            let acc: Vec<&str> = (0..n.num_states())
                .filter(|&q| n.is_accepting(q))
                .map(|q| n.state_name(q))
                .collect();
            line(&mut out, "accept", &acc);
            for &(p, a, q) in n.transitions() {
                line(
                    &mut out,
                    "trans",
                    &[n.state_name(p), &n.alphabet()[a], "->", n.state_name(q)],
                );
            }
        }
        MachineFile::Dfa(n) => {
            let states: Vec<&str> = (0..n.num_states()).map(|q| n.state_name(q)).collect();
            line(&mut out, "states", &states);
            let input: Vec<&str> = n.alphabet().iter().map(String::as_str).collect();
            line(&mut out, "input", &input);
            line(&mut out, "initial", &[n.state_name(n.initial())]);
            let acc: Vec<&str> = (0..n.num_states())
                .filter(|&q| n.is_accepting(q))
                .map(|q| n.state_name(q))
                .collect();
            line(&mut out, "accept", &acc);
            for &(p, a, q) in n.transitions() {
                line(
                    &mut out,
                    "trans",
                    &[n.state_name(p), &n.alphabet()[a], "->", n.state_name(q)],
                );
            }
        }
        MachineFile::Lba(m) => {
            let states: Vec<&str> = (0..m.num_states()).map(|q| m.state_name(q)).collect();
            line(&mut out, "states", &states);
            let input: Vec<&str> = m
                .input_alphabet()
                .iter()
                .map(|&x| m.symbol_name(x))
                .collect();
            line(&mut out, "input", &input);
            let tape: Vec<&str> = m.tape_symbols().iter().map(String::as_str).collect();
            line(&mut out, "tape", &tape);
            line(&mut out, "lend", &[m.symbol_name(m.left_end())]);
            line(&mut out, "rend", &[m.symbol_name(m.right_end())]);
            line(&mut out, "initial", &[m.state_name(m.initial())]);
            let acc: Vec<&str> = (0..m.num_states())
                .filter(|&q| m.is_accepting(q))
                .map(|q| m.state_name(q))
                .collect();
            line(&mut out, "accept", &acc);
            for &(p, x, q, a) in m.transitions() {
                line(
                    &mut out,
                    "trans",
                    &[
                        m.state_name(p),
                        m.symbol_name(x),
                        "->",
                        m.state_name(q),
                        m.action_token(a),
                    ],
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: &str = "\
kind niufst
states q0
input a b
output a b <
endmarker <
initial q0
accept
trans q0 a -> q0 a
trans q0 b -> q0 b
trans q0 < -> q0 <
";

    #[test]
    fn parses_identity() {
        let m = parse_machine(IDENTITY).unwrap();
        assert_eq!(m.kind(), Kind::Niufst);
        assert_eq!(m.as_transducer().unwrap().num_states(), 1);
        assert_eq!(serialize_machine(&m), IDENTITY);
    }

    #[test]
    fn comments_and_order_are_flexible() {
        let text = "% identity\ninitial q0\nkind niufst % trailing\nstates q0\noutput a b <\ninput a b\nendmarker <\naccept\ntrans q0 a -> q0 a\ntrans q0 b -> q0 b\ntrans q0 < -> q0 <\n";
        let m = parse_machine(text).unwrap();
        assert_eq!(serialize_machine(&m), IDENTITY);
    }

    #[test]
    fn endmarker_in_input() {
        let text = IDENTITY.replace("input a b", "input a b <");
        let e = parse_machine(&text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EndmarkerInInput);
        assert_eq!(e.line, 5);
        assert!(e
            .to_string()
            .contains("endmarker must not be an input symbol"));
    }

    #[test]
    fn distinct_diagnostics() {
        let unknown = IDENTITY.replace("accept", "accepting");
        assert!(matches!(
            parse_machine(&unknown).unwrap_err().kind,
            ParseErrorKind::UnknownDirective(_)
        ));
        let state = IDENTITY.replace("trans q0 a -> q0 a", "trans q0 a -> q9 a");
        let e = parse_machine(&state).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredState("q9".into()));
        assert_eq!(e.line, 8);
        let sym = IDENTITY.replace("trans q0 a -> q0 a", "trans q0 c -> q0 a");
        assert_eq!(
            parse_machine(&sym).unwrap_err().kind,
            ParseErrorKind::UndeclaredSymbol("c".into())
        );
        let dfa =
            "kind dfa\nstates s t\ninput a\ninitial s\naccept t\ntrans s a -> t\ntrans s a -> s\n";
        let e = parse_machine(dfa).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::DuplicateDfaTransition(..)));
        assert_eq!(e.line, 7);
        let lba = "kind lba\nstates s\ninput a\ntape > < a\nlend >\nrend <\ninitial s\naccept\ntrans s a -> s X\n";
        assert_eq!(
            parse_machine(lba).unwrap_err().kind,
            ParseErrorKind::BadLbaMove("X".into())
        );
    }

    #[test]
    fn iufst_must_be_deterministic() {
        let text = IDENTITY
            .replace("kind niufst", "kind iufst")
            .replace("accept\n", "accept\ntrans q0 a -> q0 b\n");
        assert!(matches!(
            parse_machine(&text).unwrap_err().kind,
            ParseErrorKind::Nondeterministic(..)
        ));
    }

    #[test]
    fn nondeterministic_lines_keep_order() {
        let text = IDENTITY.replace("accept\n", "accept\ntrans q0 a -> q0 b\n");
        let m = parse_machine(&text).unwrap();
        let out = serialize_machine(&m);
        assert!(out.contains("trans q0 a -> q0 b\ntrans q0 a -> q0 a\n"));
    }

    #[test]
    fn automata_and_lba_round_trip() {
        let nfa = "kind nfa\nstates s t\ninput a b\ninitial t\naccept s\ntrans t a -> s\ntrans t a -> t\n";
        assert_eq!(serialize_machine(&parse_machine(nfa).unwrap()), nfa);
        let lba = "kind lba\nstates s f\ninput a\ntape > < a\nlend >\nrend <\ninitial s\naccept f\ntrans s > -> s R\ntrans s a -> s R\ntrans s < -> f <\n";
        assert_eq!(serialize_machine(&parse_machine(lba).unwrap()), lba);
    }

    #[test]
    fn lba_static_violation_carries_line() {
        let lba = "kind lba\nstates s\ninput a\ntape > < a\nlend >\nrend <\ninitial s\naccept\ntrans s > -> s L\n";
        let e = parse_machine(lba).unwrap_err();
        assert_eq!(e.line, 9);
        assert!(matches!(
            e.kind,
            ParseErrorKind::Lba(LbaError::MovesBeyondEnd(..))
        ));
    }
}

//! Constructors for functions, their closure under sum and product, and the
//! acceptor for L_f that runs the copy-language check next to a constructor.
//!
//! Combined machines keep one track per simulated machine. A simulation that
//! has accepted records this on its endmarker cell and is ignored from then
//! on; one that gets stuck mid-sweep is carried along as dead and only causes
//! rejection if it had not accepted yet.

use thiserror::Error;

use crate::machine::{StateId, SweepBound, SymbolId, Transducer, TransducerBuilder};
use crate::run::run;
use crate::witness::{gen_copy, synthesize};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("payload symbol `{0}` clashes with a reserved or shared symbol")]
    AlphabetClash(String),
    #[error("payload alphabet must not be empty")]
    EmptyAlphabet,
    #[error("constructor machine must be deterministic")]
    Nondeterministic,
}

/// The function a constructor is meant to construct, kept for oracles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSpec {
    Identity,
    /// 2^m.
    Expo,
    Sum(Box<FunctionSpec>, Box<FunctionSpec>),
    /// g(m)·(f(m)+1): g(m) factors, each a separator followed by f(m)
    /// payload symbols.
    FramedProduct(Box<FunctionSpec>, Box<FunctionSpec>),
}

impl FunctionSpec {
    pub fn eval(&self, m: usize) -> Option<usize> {
        match self {
            FunctionSpec::Identity => Some(m),
            FunctionSpec::Expo => 1usize
                .checked_shl(u32::try_from(m).ok()?)
                .filter(|v| *v != 0),
            FunctionSpec::Sum(f, g) => f.eval(m)?.checked_add(g.eval(m)?),
            FunctionSpec::FramedProduct(f, g) => g.eval(m)?.checked_mul(f.eval(m)?.checked_add(1)?),
        }
    }
}

impl std::fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionSpec::Identity => write!(f, "m"),
            FunctionSpec::Expo => write!(f, "2^m"),
            FunctionSpec::Sum(a, b) => write!(f, "({a} + {b})"),
            FunctionSpec::FramedProduct(a, b) => write!(f, "{b}*({a} + 1)"),
        }
    }
}

/// A machine accepting words a^m v with |v| = f(m), at least one for each
/// m ≥ 1.
#[derive(Clone, Debug)]
pub struct Constructor {
    pub machine: Transducer,
    pub payload: Vec<String>,
    pub f: FunctionSpec,
    /// Builds the payload of one accepted word for a given m.
    shape: Shape,
}

#[derive(Clone, Debug)]
enum Shape {
    Base {
        f: FunctionSpec,
        alphabet: Vec<String>,
    },
    Concat(Box<Shape>, Box<Shape>),
    Frames(Box<Shape>, Box<Shape>),
}

impl Shape {
    fn alphabet(&self) -> Vec<&str> {
        match self {
            Shape::Base { alphabet, .. } => alphabet.iter().map(String::as_str).collect(),
            Shape::Concat(a, b) | Shape::Frames(a, b) => {
                let mut v = a.alphabet();
                v.extend(b.alphabet());
                v
            }
        }
    }

    fn payload(&self, m: usize) -> Vec<String> {
        match self {
            Shape::Base { f, alphabet } => {
                vec![alphabet[0].clone(); f.eval(m).expect("function defined")]
            }
            Shape::Concat(a, b) => {
                let mut v = a.payload(m);
                v.extend(b.payload(m));
                v
            }
            Shape::Frames(f, g) => {
                let frame = f.payload(m);
                let mut out = Vec::new();
                for x in g.payload(m) {
                    out.push(x);
                    out.extend(frame.iter().cloned());
                }
                out
            }
        }
    }

    fn accepts(&self, m: usize, v: &[&str]) -> bool {
        match self {
            Shape::Base { f, alphabet } => {
                v.iter().all(|s| alphabet.iter().any(|x| x == s)) && f.eval(m) == Some(v.len())
            }
            Shape::Concat(a, b) => {
                let left = a.alphabet();
                let cut = v.iter().position(|s| !left.contains(s)).unwrap_or(v.len());
                a.accepts(m, &v[..cut]) && b.accepts(m, &v[cut..])
            }
            Shape::Frames(f, g) => {
                let seps = g.alphabet();
                if v.first().is_some_and(|s| !seps.contains(s)) {
                    return false;
                }
                let mut xs = Vec::new();
                let mut frames: Vec<Vec<&str>> = Vec::new();
                for s in v {
                    if seps.contains(s) {
                        xs.push(*s);
                        frames.push(Vec::new());
                    } else {
                        frames.last_mut().expect("frame").push(s);
                    }
                }
                g.accepts(m, &xs) && frames.iter().all(|fr| f.accepts(m, fr))
            }
        }
    }
}

/// Sweeps used by [`identity_constructor`] and [`expo_constructor`] on an
/// accepted word with prefix a^m are exactly m+1; the combinators take the
/// maximum of their parts.
pub fn constructor_sweep_envelope(m: usize) -> usize {
    m + 1
}

impl Constructor {
    /// One accepted word with prefix a^m.
    pub fn witness(&self, m: usize) -> Vec<String> {
        let mut w = vec!["a".to_string(); m];
        w.extend(self.shape.payload(m));
        w
    }

    /// Whether `w` has the shape a^m v, m ≥ 1, v over the payload, |v| = f(m).
    pub fn in_shape(&self, w: &[&str]) -> bool {
        let m = w.iter().take_while(|s| **s == "a").count();
        m >= 1
            && w[m..].iter().all(|s| self.payload.iter().any(|p| p == s))
            && self.f.eval(m) == Some(w.len() - m)
    }

    /// Exact membership in the language the constructor is built to accept.
    pub fn in_language(&self, w: &[&str]) -> bool {
        let m = w.iter().take_while(|s| **s == "a").count();
        m >= 1 && self.shape.accepts(m, &w[m..])
    }
}

fn check_payload(payload: &[&str], reserved: &[&str]) -> Result<(), HierarchyError> {
    if payload.is_empty() {
        return Err(HierarchyError::EmptyAlphabet);
    }
    let mut seen = std::collections::HashSet::new();
    for x in payload {
        if reserved.contains(x)
            || x.ends_with('\'')
            || x.starts_with('<')
            || !seen.insert(*x)
            || !crate::machine::valid_name(x)
        {
            return Err(HierarchyError::AlphabetClash(x.to_string()));
        }
    }
    Ok(())
}

fn primed(x: &str) -> String {
    format!("{x}'")
}

/// Accepts {a^m v | |v| = m}: each sweep marks the first unmarked a and the
/// first unmarked payload symbol.
pub fn identity_constructor(payload: &[&str]) -> Result<Constructor, HierarchyError> {
    check_payload(payload, &["a", "$"])?;
    let mut b = TransducerBuilder::new();
    b.states(["l", "c", "d", "e"])
        .input("a")
        .output("a")
        .output("a'")
        .output("<")
        .endmarker("<")
        .initial("l")
        .accept("e")
        .sweeps(SweepBound::Linear)
        .transition("l", "a'", "l", "a'")
        .transition("l", "a", "c", "a'")
        .transition("c", "a", "c", "a")
        .transition("e", "<", "e", "<")
        .transition("d", "<", "d", "<");
    for x in payload {
        let m = primed(x);
        b.input(*x).output(*x).output(&m);
        b.transition("l", &m, "e", &m)
            .transition("e", &m, "e", &m)
            .transition("c", &m, "c", &m)
            .transition("c", *x, "d", &m)
            .transition("d", *x, "d", *x)
            .transition("d", &m, "d", &m);
    }
    Ok(Constructor {
        machine: b.build().expect("identity constructor is well formed"),
        payload: payload.iter().map(|s| s.to_string()).collect(),
        f: FunctionSpec::Identity,
        shape: Shape::Base {
            f: FunctionSpec::Identity,
            alphabet: payload.iter().map(|s| s.to_string()).collect(),
        },
    })
}

/// Accepts {a^m v | |v| = 2^m}: each sweep marks one a and every second
/// unmarked payload symbol; once all a's are marked exactly one payload
/// symbol may remain unmarked.
pub fn expo_constructor(payload: &[&str]) -> Result<Constructor, HierarchyError> {
    check_payload(payload, &["a", "$"])?;
    let states = [
        "init", "l", "c", "h0", "h1", "even", "odd", "f0", "f1", "run",
    ];
    let mut b = TransducerBuilder::new();
    b.states(states)
        .input("a")
        .output("a")
        .output("a'")
        .output("<")
        .endmarker("<")
        .initial("init")
        .accept("f1")
        .sweeps(SweepBound::Linear)
        .transition("init", "a", "c", "a'")
        .transition("init", "a'", "l", "a'")
        .transition("l", "a'", "l", "a'")
        .transition("l", "a", "c", "a'")
        .transition("c", "a", "c", "a")
        .transition("even", "<", "run", "<")
        .transition("f1", "<", "f1", "<");
    for x in payload {
        let m = primed(x);
        b.input(*x).output(*x).output(&m);
        b.transition("c", *x, "h1", *x)
            .transition("c", &m, "h0", &m)
            .transition("h0", *x, "h1", *x)
            .transition("h1", *x, "even", &m)
            .transition("even", *x, "odd", *x)
            .transition("odd", *x, "even", &m)
            .transition("l", *x, "f1", *x)
            .transition("l", &m, "f0", &m)
            .transition("f0", *x, "f1", *x);
        for q in ["h0", "h1", "even", "odd", "f0", "f1"] {
            b.transition(q, &m, q, &m);
        }
    }
    Ok(Constructor {
        machine: b.build().expect("expo constructor is well formed"),
        payload: payload.iter().map(|s| s.to_string()).collect(),
        f: FunctionSpec::Expo,
        shape: Shape::Base {
            f: FunctionSpec::Expo,
            alphabet: payload.iter().map(|s| s.to_string()).collect(),
        },
    })
}

// ---------------------------------------------------------------------------
// Track simulation

/// One simulated machine during a sweep.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Sim {
    Run(StateId),
    Dead,
}

/// Contents of an endmarker slot: the simulated machine's endmarker symbol
/// and whether that machine has accepted.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Slot {
    sym: SymbolId,
    acc: bool,
}

impl Slot {
    fn fresh(t: &Transducer) -> Slot {
        Slot {
            sym: t.endmarker(),
            acc: false,
        }
    }
}

fn sim_cell(t: &Transducer, s: Sim, x: SymbolId) -> (Sim, SymbolId) {
    match s {
        Sim::Run(q) => match t.moves(q, x).first() {
            Some(&(p, y)) => (Sim::Run(p), y),
            None => (Sim::Dead, x),
        },
        Sim::Dead => (Sim::Dead, x),
    }
}

/// Ends the sweep of one simulation; `None` means rejection.
fn sim_end(t: &Transducer, s: Sim, slot: Slot) -> Option<Slot> {
    if slot.acc {
        return Some(slot);
    }
    let Sim::Run(q) = s else { return None };
    let &(p, y) = t.moves(q, slot.sym).first()?;
    Some(Slot {
        sym: y,
        acc: t.is_accepting(p),
    })
}

fn input_id(t: &Transducer, name: &str) -> SymbolId {
    t.symbol_id(name).expect("symbol of the simulated machine")
}

fn sym_name(t: &Transducer, x: Option<SymbolId>) -> String {
    x.map_or_else(|| "-".to_string(), |x| t.symbol_name(x).to_string())
}

fn slot_name(t: &Transducer, s: Slot) -> String {
    format!("{}{}", t.symbol_name(s.sym), if s.acc { "+" } else { "" })
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Top<S> {
    Go(S),
    Cont,
    Accept,
}

fn top_name<S>(i: usize, q: &Top<S>) -> String {
    match q {
        Top::Go(_) if i == 0 => "init".into(),
        Top::Go(_) => format!("p{i}"),
        Top::Cont => "run".into(),
        Top::Accept => "acc".into(),
    }
}

fn require_deterministic(c: &Constructor) -> Result<(), HierarchyError> {
    if c.machine.is_deterministic() {
        Ok(())
    } else {
        Err(HierarchyError::Nondeterministic)
    }
}

fn check_disjoint(cf: &Constructor, cg: &Constructor) -> Result<(), HierarchyError> {
    for x in &cg.payload {
        if cf.payload.contains(x) {
            return Err(HierarchyError::AlphabetClash(x.clone()));
        }
    }
    Ok(())
}

fn merged_payload(cf: &Constructor, cg: &Constructor) -> Vec<String> {
    cf.payload.iter().chain(&cg.payload).cloned().collect()
}

// ---------------------------------------------------------------------------
// f + g

const LATER: u8 = 9;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum AddY {
    Raw(usize),
    Cell(Option<SymbolId>, Option<SymbolId>),
    End(Slot, Slot),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct AddQ {
    /// First-sweep structure: 0 nothing, 1 prefix, 2 f-payload, 3 g-payload;
    /// [`LATER`] after the first sweep.
    stage: u8,
    f: Sim,
    g: Sim,
}

/// A constructor for f+g over words a^m v_f v_g: track one runs the
/// constructor for f ignoring v_g, track two the one for g ignoring v_f.
pub fn combine_add(cf: &Constructor, cg: &Constructor) -> Result<Constructor, HierarchyError> {
    check_disjoint(cf, cg)?;
    require_deterministic(cf)?;
    require_deterministic(cg)?;
    let (tf, tg) = (&cf.machine, &cg.machine);
    let mut raw: Vec<String> = vec!["a".into()];
    raw.extend(merged_payload(cf, cg));
    let nf = cf.payload.len();
    let inputs: Vec<AddY> = (0..raw.len()).map(AddY::Raw).collect();
    let end = AddY::End(Slot::fresh(tf), Slot::fresh(tg));
    let init = Top::Go(AddQ {
        stage: 0,
        f: Sim::Run(tf.initial()),
        g: Sim::Run(tg.initial()),
    });
    let step = |q: &Top<AddQ>, y: &AddY| -> Vec<(Top<AddQ>, AddY)> {
        let Top::Go(s) = *q else { return Vec::new() };
        let mut n = s;
        let (fx, gx) = match *y {
            AddY::Raw(i) => {
                let (stage, f, g) = if i == 0 {
                    (1, true, true)
                } else if i <= nf {
                    (2, true, false)
                } else {
                    (3, false, true)
                };
                if stage < s.stage || s.stage == 0 && stage != 1 {
                    return Vec::new();
                }
                n.stage = stage;
                let name = &raw[i];
                (f.then(|| input_id(tf, name)), g.then(|| input_id(tg, name)))
            }
            AddY::Cell(fx, gx) => {
                n.stage = LATER;
                (fx, gx)
            }
            AddY::End(sf, sg) => {
                if s.stage == 0 {
                    return Vec::new();
                }
                let (Some(sf), Some(sg)) = (sim_end(tf, s.f, sf), sim_end(tg, s.g, sg)) else {
                    return Vec::new();
                };
                let to = if sf.acc && sg.acc {
                    Top::Accept
                } else {
                    Top::Cont
                };
                return vec![(to, AddY::End(sf, sg))];
            }
        };
        let fy = fx.map(|x| {
            let (sf, y) = sim_cell(tf, s.f, x);
            n.f = sf;
            y
        });
        let gy = gx.map(|x| {
            let (sg, y) = sim_cell(tg, s.g, x);
            n.g = sg;
            y
        });
        vec![(Top::Go(n), AddY::Cell(fy, gy))]
    };
    let name = |y: &AddY| match *y {
        AddY::Raw(i) => raw[i].clone(),
        AddY::Cell(f, g) => format!("[{}|{}]", sym_name(tf, f), sym_name(tg, g)),
        AddY::End(..) if *y == end => "<".into(),
        AddY::End(a, b) => format!("<[{}|{}]", slot_name(tf, a), slot_name(tg, b)),
    };
    let machine = synthesize(
        init,
        &inputs,
        end,
        step,
        |q| *q == Top::Accept,
        top_name,
        name,
        SweepBound::Linear,
    );
    Ok(Constructor {
        machine,
        payload: merged_payload(cf, cg),
        f: FunctionSpec::Sum(Box::new(cf.f.clone()), Box::new(cg.f.clone())),
        shape: Shape::Concat(Box::new(cf.shape.clone()), Box::new(cg.shape.clone())),
    })
}

// ---------------------------------------------------------------------------
// f · g

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum FPart {
    Ignored,
    Sym(SymbolId),
    /// Endmarker of the f-copy on the factor that ends here.
    End(Slot),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum MulY {
    Raw(usize),
    Cell(FPart, Option<SymbolId>),
    End(Slot, Slot),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct MulQ {
    /// First-sweep structure: 0 nothing, 1 prefix, 2 factors; [`LATER`] after
    /// the first sweep.
    stage: u8,
    /// f on the shared prefix; its state at the end of the prefix starts
    /// every factor copy.
    pre: Sim,
    /// f-copy on the current factor, once past the prefix.
    cur: Option<Sim>,
    /// Every f-copy ended so far has accepted.
    all: bool,
    g: Sim,
}

/// A constructor over words a^m x₁v₁…x_{g(m)}v_{g(m)}: track two runs the
/// constructor for g on a^m x₁…x_{g(m)}, and a copy of the constructor for f
/// runs on a^m vᵢ for every factor, all copies sharing one prefix track. The
/// payload length is g(m)·(f(m)+1).
pub fn combine_mul(cf: &Constructor, cg: &Constructor) -> Result<Constructor, HierarchyError> {
    check_disjoint(cf, cg)?;
    require_deterministic(cf)?;
    require_deterministic(cg)?;
    let (tf, tg) = (&cf.machine, &cg.machine);
    let mut raw: Vec<String> = vec!["a".into()];
    raw.extend(merged_payload(cf, cg));
    let nf = cf.payload.len();
    let inputs: Vec<MulY> = (0..raw.len()).map(MulY::Raw).collect();
    let end = MulY::End(Slot::fresh(tf), Slot::fresh(tg));
    let init = Top::Go(MulQ {
        stage: 0,
        pre: Sim::Run(tf.initial()),
        cur: None,
        all: true,
        g: Sim::Run(tg.initial()),
    });
    let step = |q: &Top<MulQ>, y: &MulY| -> Vec<(Top<MulQ>, MulY)> {
        let Top::Go(s) = *q else { return Vec::new() };
        let mut n = s;
        let (fpart, gx) = match *y {
            MulY::Raw(i) => {
                let name = &raw[i];
                if i == 0 {
                    if s.stage > 1 {
                        return Vec::new();
                    }
                    n.stage = 1;
                    (FPart::Sym(input_id(tf, name)), Some(input_id(tg, name)))
                } else if i <= nf {
                    if s.stage != 2 {
                        return Vec::new();
                    }
                    (FPart::Sym(input_id(tf, name)), None)
                } else {
                    if s.stage == 0 {
                        return Vec::new();
                    }
                    n.stage = 2;
                    let f = if s.cur.is_some() {
                        FPart::End(Slot::fresh(tf))
                    } else {
                        FPart::Ignored
                    };
                    (f, Some(input_id(tg, name)))
                }
            }
            MulY::Cell(f, g) => {
                n.stage = LATER;
                (f, g)
            }
            MulY::End(sf, sg) => {
                if s.stage < 2 {
                    return Vec::new();
                }
                let Some(cur) = s.cur else { return Vec::new() };
                let (Some(sf), Some(sg)) = (sim_end(tf, cur, sf), sim_end(tg, s.g, sg)) else {
                    return Vec::new();
                };
                let to = if s.all && sf.acc && sg.acc {
                    Top::Accept
                } else {
                    Top::Cont
                };
                return vec![(to, MulY::End(sf, sg))];
            }
        };
        let gy = gx.map(|x| {
            let (sg, y) = sim_cell(tg, s.g, x);
            n.g = sg;
            y
        });
        let fy = match fpart {
            FPart::Ignored => {
                n.cur = Some(s.pre);
                FPart::Ignored
            }
            FPart::End(slot) => {
                let Some(cur) = s.cur else { return Vec::new() };
                let Some(slot) = sim_end(tf, cur, slot) else {
                    return Vec::new();
                };
                n.all = s.all && slot.acc;
                n.cur = Some(s.pre);
                FPart::End(slot)
            }
            FPart::Sym(x) => match s.cur {
                None => {
                    let (pre, y) = sim_cell(tf, s.pre, x);
                    n.pre = pre;
                    FPart::Sym(y)
                }
                Some(cur) => {
                    let (cur, y) = sim_cell(tf, cur, x);
                    n.cur = Some(cur);
                    FPart::Sym(y)
                }
            },
        };
        vec![(Top::Go(n), MulY::Cell(fy, gy))]
    };
    let name = |y: &MulY| match *y {
        MulY::Raw(i) => raw[i].clone(),
        MulY::Cell(f, g) => {
            let f = match f {
                FPart::Ignored => "-".to_string(),
                FPart::Sym(x) => tf.symbol_name(x).to_string(),
                FPart::End(s) => format!("<{}", slot_name(tf, s)),
            };
            format!("[{f}|{}]", sym_name(tg, g))
        }
        MulY::End(..) if *y == end => "<".into(),
        MulY::End(a, b) => format!("<[{}|{}]", slot_name(tf, a), slot_name(tg, b)),
    };
    let machine = synthesize(
        init,
        &inputs,
        end,
        step,
        |q| *q == Top::Accept,
        top_name,
        name,
        SweepBound::Linear,
    );
    Ok(Constructor {
        machine,
        payload: merged_payload(cf, cg),
        f: FunctionSpec::FramedProduct(Box::new(cf.f.clone()), Box::new(cg.f.clone())),
        shape: Shape::Frames(Box::new(cf.shape.clone()), Box::new(cg.shape.clone())),
    })
}

// ---------------------------------------------------------------------------
// L_f

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum LfY {
    Raw(usize),
    Cell(FPart, SymbolId),
    End(Slot, Slot),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct LfQ {
    /// First sweep: inside the payload.
    tail: bool,
    /// Copy-language track; `None` once its endmarker has been passed.
    copy: Option<Sim>,
    /// Outcome of the copy-language track if it ended before the endmarker.
    copy_acc: bool,
    f: Sim,
}

/// An acceptor for L_f = {u$uv | u ∈ {a,b}*, a^{2|u|+1}v ∈ L(T_f)}. Track one
/// runs the copy-language acceptor on u$u with the first payload symbol as
/// its endmarker; track two runs the constructor reading every prefix symbol
/// as `a`.
pub fn build_lf(cf: &Constructor) -> Result<Transducer, HierarchyError> {
    require_deterministic(cf)?;
    for x in &cf.payload {
        if ["a", "b", "$"].contains(&x.as_str()) {
            return Err(HierarchyError::AlphabetClash(x.clone()));
        }
    }
    let copy = gen_copy(&["a", "b"]).expect("copy acceptor");
    let tc = &copy;
    let tf = &cf.machine;
    let mut raw: Vec<String> = vec!["a".into(), "b".into(), "$".into()];
    raw.extend(cf.payload.iter().cloned());
    let inputs: Vec<LfY> = (0..raw.len()).map(LfY::Raw).collect();
    let end = LfY::End(Slot::fresh(tc), Slot::fresh(tf));
    let a_f = input_id(tf, "a");
    let init = Top::Go(LfQ {
        tail: false,
        copy: Some(Sim::Run(tc.initial())),
        copy_acc: false,
        f: Sim::Run(tf.initial()),
    });
    let step = |q: &Top<LfQ>, y: &LfY| -> Vec<(Top<LfQ>, LfY)> {
        let Top::Go(s) = *q else { return Vec::new() };
        let mut n = s;
        let (cpart, fx) = match *y {
            LfY::Raw(i) if i < 3 => {
                if s.tail {
                    return Vec::new();
                }
                (FPart::Sym(input_id(tc, &raw[i])), a_f)
            }
            LfY::Raw(i) => {
                n.tail = true;
                let c = if s.tail {
                    FPart::Ignored
                } else {
                    FPart::End(Slot::fresh(tc))
                };
                (c, input_id(tf, &raw[i]))
            }
            LfY::Cell(c, f) => (c, f),
            LfY::End(sc, sf) => {
                let sc = match s.copy {
                    Some(c) => sim_end(tc, c, sc),
                    None => Some(Slot {
                        acc: s.copy_acc,
                        ..sc
                    }),
                };
                let (Some(sc), Some(sf)) = (sc, sim_end(tf, s.f, sf)) else {
                    return Vec::new();
                };
                let to = if sc.acc && sf.acc {
                    Top::Accept
                } else {
                    Top::Cont
                };
                return vec![(to, LfY::End(sc, sf))];
            }
        };
        let (f, fy) = sim_cell(tf, s.f, fx);
        n.f = f;
        let cy = match cpart {
            FPart::Ignored => FPart::Ignored,
            FPart::Sym(x) => {
                let Some(c) = s.copy else { return Vec::new() };
                let (c, y) = sim_cell(tc, c, x);
                n.copy = Some(c);
                FPart::Sym(y)
            }
            FPart::End(slot) => {
                let Some(c) = s.copy else { return Vec::new() };
                let Some(slot) = sim_end(tc, c, slot) else {
                    return Vec::new();
                };
                n.copy = None;
                n.copy_acc = slot.acc;
                FPart::End(slot)
            }
        };
        vec![(Top::Go(n), LfY::Cell(cy, fy))]
    };
    let name = |y: &LfY| match *y {
        LfY::Raw(i) => raw[i].clone(),
        LfY::Cell(c, f) => {
            let c = match c {
                FPart::Ignored => "-".to_string(),
                FPart::Sym(x) => tc.symbol_name(x).to_string(),
                FPart::End(s) => format!("<{}", slot_name(tc, s)),
            };
            format!("[{c}|{}]", tf.symbol_name(f))
        }
        LfY::End(..) if *y == end => "<".into(),
        LfY::End(a, b) => format!("<[{}|{}]", slot_name(tc, a), slot_name(tf, b)),
    };
    Ok(synthesize(
        init,
        &inputs,
        end,
        step,
        |q| *q == Top::Accept,
        top_name,
        name,
        SweepBound::Linear,
    ))
}

/// Membership in L_f, given membership in the constructor's language.
pub fn in_lf(cf: &Constructor, w: &[&str]) -> bool {
    let split = w
        .iter()
        .position(|s| cf.payload.iter().any(|p| p == s))
        .unwrap_or(w.len());
    let (prefix, v) = w.split_at(split);
    if !crate::witness::in_copy(prefix) || prefix.iter().any(|s| !["a", "b", "$"].contains(s)) {
        return false;
    }
    if v.iter().any(|s| !cf.payload.iter().any(|p| p == s)) {
        return false;
    }
    let m = prefix.len();
    cf.f.eval(m) == Some(v.len())
}

// ---------------------------------------------------------------------------
// Sweep growth

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub param: usize,
    pub length: usize,
    /// Fewest sweeps to accept; `None` marks a family member that was not
    /// accepted within the limit.
    pub sweeps: Option<usize>,
}

/// Runs `machine` on `family(p)` for every `p` in `params`.
pub fn measure_sweep_growth(
    machine: &Transducer,
    family: impl Fn(usize) -> Vec<String>,
    params: impl IntoIterator<Item = usize>,
    max_sweeps: usize,
) -> Vec<GrowthRow> {
    params
        .into_iter()
        .map(|p| {
            let w = family(p);
            let sweeps = machine
                .word(&w)
                .ok()
                .and_then(|word| run(machine, &word, max_sweeps, crate::run::DEFAULT_TAPE_CAP).ok())
                .and_then(|r| r.min_accept_sweeps);
            GrowthRow {
                param: p,
                length: w.len(),
                sweeps,
            }
        })
        .collect()
}

/// Parameters whose family member was not accepted.
pub fn holes(rows: &[GrowthRow]) -> Vec<usize> {
    rows.iter()
        .filter(|r| r.sweeps.is_none())
        .map(|r| r.param)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_words, Acceptor, Bounded};

    fn acc(t: &Transducer, w: &[&str]) -> bool {
        Bounded::new(t, 40).accepts(w).unwrap()
    }

    fn words(s: &str) -> Vec<&str> {
        s.split(' ').filter(|x| !x.is_empty()).collect()
    }

    #[test]
    fn identity_examples() {
        let c = identity_constructor(&["x", "y"]).unwrap();
        assert!(acc(&c.machine, &words("a a x y")));
        assert!(!acc(&c.machine, &words("a a x")));
        assert!(!acc(&c.machine, &words("x")));
        assert!(!acc(&c.machine, &words("a x a")));
        assert!(identity_constructor(&["a"]).is_err());
    }

    #[test]
    fn expo_examples() {
        let c = expo_constructor(&["x"]).unwrap();
        assert!(acc(&c.machine, &words("a a x x x x")));
        assert!(!acc(&c.machine, &words("a a x x x")));
        assert!(!acc(&c.machine, &words("x")));
        assert!(acc(&c.machine, &words("a x x")));
    }

    fn check_constructor(c: &Constructor, ms: std::ops::RangeInclusive<usize>, max_len: usize) {
        for m in ms {
            let w = c.witness(m);
            let refs: Vec<&str> = w.iter().map(String::as_str).collect();
            assert!(acc(&c.machine, &refs), "m={m}: {w:?}");
        }
        let mut alphabet = vec!["a"];
        alphabet.extend(c.payload.iter().map(String::as_str));
        for w in enumerate_words(&alphabet, max_len) {
            let a = acc(&c.machine, &w);
            assert_eq!(a, c.in_language(&w), "{w:?}");
            assert!(!a || c.in_shape(&w), "{w:?}");
        }
    }

    #[test]
    fn base_constructors_are_exact() {
        check_constructor(&identity_constructor(&["x"]).unwrap(), 1..=6, 10);
        check_constructor(&expo_constructor(&["x"]).unwrap(), 1..=4, 10);
    }

    #[test]
    fn add_examples() {
        let c = combine_add(
            &identity_constructor(&["x"]).unwrap(),
            &identity_constructor(&["y"]).unwrap(),
        )
        .unwrap();
        assert!(acc(&c.machine, &words("a a x x y y")));
        assert!(!acc(&c.machine, &words("a a x x y")));
        assert!(!acc(&c.machine, &words("a a x y x y")));
        check_constructor(&c, 1..=5, 8);
        let overlap = combine_add(
            &identity_constructor(&["x"]).unwrap(),
            &expo_constructor(&["x"]).unwrap(),
        );
        assert!(overlap.is_err());
    }

    #[test]
    fn mul_examples() {
        let c = combine_mul(
            &identity_constructor(&["x"]).unwrap(),
            &identity_constructor(&["y"]).unwrap(),
        )
        .unwrap();
        assert!(acc(&c.machine, &words("a a y x x y x x")));
        assert!(!acc(&c.machine, &words("a a y x x y x")));
        assert_eq!(c.f.eval(2), Some(6));
        check_constructor(&c, 1..=4, 9);
    }

    #[test]
    fn mixed_combinations() {
        let (i, e) = (
            identity_constructor(&["x"]).unwrap(),
            expo_constructor(&["y"]).unwrap(),
        );
        for c in [
            combine_add(&i, &e).unwrap(),
            combine_add(&e, &i).unwrap(),
            combine_mul(&i, &e).unwrap(),
            combine_mul(&e, &i).unwrap(),
        ] {
            check_constructor(&c, 1..=3, 7);
        }
    }

    #[test]
    fn lf_examples() {
        let c = expo_constructor(&["x"]).unwrap();
        let t = build_lf(&c).unwrap();
        let mut w = words("a b $ a b");
        w.extend(std::iter::repeat_n("x", 32));
        assert!(acc(&t, &w));
        assert!(in_lf(&c, &w));
        let mut bad = words("a b $ b a");
        bad.extend(std::iter::repeat_n("x", 32));
        assert!(!acc(&t, &bad));
        let mut short = words("a b $ a b");
        short.extend(std::iter::repeat_n("x", 31));
        assert!(!acc(&t, &short));
    }

    #[test]
    fn lf_matches_predicate() {
        let c = identity_constructor(&["x"]).unwrap();
        let t = build_lf(&c).unwrap();
        for w in enumerate_words(&["a", "b", "$", "x"], 7) {
            assert_eq!(acc(&t, &w), in_lf(&c, &w), "{w:?}");
        }
    }

    #[test]
    fn growth_tables() {
        let u = crate::witness::gen_uexpo();
        let rows = measure_sweep_growth(&u, |j| vec!["a".to_string(); 1 << j], 1..=6, 20);
        let s: Vec<usize> = rows.iter().map(|r| r.sweeps.unwrap()).collect();
        assert!(s.windows(2).all(|p| p[1] == p[0] + 1), "{s:?}");
        let copy = crate::witness::gen_copy(&["a", "b"]).unwrap();
        let rows = measure_sweep_growth(
            &copy,
            |n| {
                let u: Vec<String> = (0..n)
                    .map(|i| if i % 2 == 0 { "a" } else { "b" }.to_string())
                    .collect();
                let mut w = u.clone();
                w.push("$".into());
                w.extend(u);
                w
            },
            1..=6,
            20,
        );
        let s: Vec<usize> = rows.iter().map(|r| r.sweeps.unwrap()).collect();
        assert!(s.windows(2).all(|p| p[1] == p[0] + 1), "{s:?}");
        let id = identity_constructor(&["x"]).unwrap();
        let rows = measure_sweep_growth(&id.machine, |m| id.witness(m), 1..=6, 20);
        assert!(rows
            .iter()
            .all(|r| r.sweeps == Some(constructor_sweep_envelope(r.param))));
        let rows = measure_sweep_growth(&u, |_| vec!["a".to_string(); 3], [1], 20);
        assert_eq!(holes(&rows), vec![1]);
    }
}

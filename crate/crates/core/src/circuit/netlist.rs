//! Circuit element lists, nodal admittance assembly, and the SPICE card dialect.
//!
//! Site nodes are `A1, B1, …, AN, BN` (matrix rows `0, 1, …, 2N−1`), ground is `0`,
//! any other name is an internal node that is eliminated by Kron reduction.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::spectra::dense::{DenseMatrix, Lu};
use crate::spectra::BoundaryCondition;
use crate::{Error, Result};

/// Feedback resistor of the INIC subcircuit, Ω.
pub const DEFAULT_RA: f64 = 1e3;
/// Feedback capacitor of the INIC subcircuit, F.
pub const DEFAULT_CA: f64 = 10e-12;
/// Open-loop gain of the op-amp model.
pub const OPAMP_GAIN: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Ground,
    /// Matrix row: `2j` is `A(j+1)`, `2j+1` is `B(j+1)`.
    Site(usize),
    Internal(String),
}

impl Node {
    pub fn a(cell: usize) -> Node {
        Node::Site(2 * cell)
    }

    pub fn b(cell: usize) -> Node {
        Node::Site(2 * cell + 1)
    }

    pub fn name(&self) -> String {
        match self {
            Node::Ground => "0".into(),
            Node::Site(i) => format!("{}{}", if i % 2 == 0 { 'A' } else { 'B' }, i / 2 + 1),
            Node::Internal(s) => s.clone(),
        }
    }

    pub fn parse(s: &str) -> Node {
        if s == "0" || s.eq_ignore_ascii_case("gnd") {
            return Node::Ground;
        }
        let mut chars = s.chars();
        let head = chars.next();
        let rest = chars.as_str();
        if let (Some(h @ ('A' | 'B')), Ok(j)) = (head, rest.parse::<usize>()) {
            if j >= 1 && !rest.starts_with('0') {
                return Node::Site(2 * (j - 1) + usize::from(h == 'B'));
            }
        }
        Node::Internal(s.to_string())
    }
}

/// One circuit element.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Inductor { name: String, a: Node, b: Node, henry: f64 },
    Resistor { name: String, a: Node, b: Node, ohm: f64 },
    Capacitor { name: String, a: Node, b: Node, farad: f64 },
    /// Current-inversion negative impedance converter. Coupling from `from` to
    /// `to` is `c1 + c2`, the reverse `c2 − c1`; `negative` inverts the coupling sign.
    Inic { name: String, from: Node, to: Node, c1: f64, c2: f64, negative: bool, ra: f64, ca: f64 },
}

impl Element {
    pub fn name(&self) -> &str {
        match self {
            Element::Inductor { name, .. }
            | Element::Resistor { name, .. }
            | Element::Capacitor { name, .. }
            | Element::Inic { name, .. } => name,
        }
    }
}

/// Counts per element type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ElementCounts {
    pub inductors: usize,
    pub resistors: usize,
    pub capacitors: usize,
    pub inics: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub cells: usize,
    pub bc: Option<BoundaryCondition>,
    pub elements: Vec<Element>,
}

/// Format a value with an SI suffix, e.g. `4.7n`, `94.52u`, `20`. Exact: the
/// shortest round-trip decimal is shifted, never rescaled.
pub fn format_si(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let eng = exp.div_euclid(3) * 3;
    let suffix = match eng {
        12 => "t",
        9 => "g",
        6 => "meg",
        3 => "k",
        0 => "",
        -3 => "m",
        -6 => "u",
        -9 => "n",
        -12 => "p",
        -15 => "f",
        _ => return format!("{v:e}"),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = 1 + (exp - eng) as usize;
    let digits = format!("{digits:0<point$}");
    let (int, frac) = digits.split_at(point);
    let sign = if v < 0.0 { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}{suffix}")
    } else {
        format!("{sign}{int}.{frac}{suffix}")
    }
}

/// Parse a SPICE number with optional SI suffix; trailing unit letters are ignored.
pub fn parse_si(s: &str) -> Option<f64> {
    let bytes = s.as_bytes();
    let mut end = 0;
    while end < bytes.len() {
        let c = bytes[end] as char;
        let ok = c.is_ascii_digit()
            || c == '.'
            || ((c == '+' || c == '-') && (end == 0 || matches!(bytes[end - 1], b'e' | b'E')))
            || ((c == 'e' || c == 'E')
                && end > 0
                && bytes.get(end + 1).is_some_and(|n| n.is_ascii_digit() || *n == b'-' || *n == b'+'));
        if !ok {
            break;
        }
        end += 1;
    }
    let number = &s[..end];
    number.parse::<f64>().ok()?;
    let rest = s[end..].to_ascii_lowercase();
    let exp = if rest.starts_with("meg") {
        6
    } else {
        match rest.chars().next() {
            None => 0,
            Some('f') => -15,
            Some('p') => -12,
            Some('n') => -9,
            Some('u') => -6,
            Some('m') => -3,
            Some('k') => 3,
            Some('g') => 9,
            Some('t') => 12,
            Some(c) if c.is_ascii_alphabetic() => 0,
            Some(_) => return None,
        }
    };
    match number.split_once(['e', 'E']) {
        Some((mant, e)) => format!("{mant}e{}", e.parse::<i32>().ok()? + exp).parse().ok(),
        None => format!("{number}e{exp}").parse().ok(),
    }
}

const INIC_SUBCKT: &str = "\
.subckt INIC n1 n2 C1=1n C2=1n RA=1k CA=10p
C2 n1 n2 {C2}
C1 nf n2 {C1}
RA1 n1 no {RA}
CA1 n1 no {CA}
RA2 no nf {RA}
CA2 no nf {CA}
EOP no 0 n1 nf 1e6
.ends INIC
.subckt INIC_NEG n1 n2 C1=1n C2=1n RA=1k CA=10p
EINV ni 0 0 n2 1
XCORE n1 ni INIC C1={C1} C2={C2} RA={RA} CA={CA}
.ends INIC_NEG
";

impl Netlist {
    pub fn counts(&self) -> ElementCounts {
        let mut c = ElementCounts::default();
        for e in &self.elements {
            match e {
                Element::Inductor { .. } => c.inductors += 1,
                Element::Resistor { .. } => c.resistors += 1,
                Element::Capacitor { .. } => c.capacitors += 1,
                Element::Inic { .. } => c.inics += 1,
            }
        }
        c
    }

    /// SPICE text with LF line endings.
    pub fn to_spice(&self) -> String {
        let mut out = String::new();
        let bc = self.bc.map(|b| b.to_string()).unwrap_or_else(|| "unknown".into());
        let _ = writeln!(out, "* braidkit netlist cells={} bc={}", self.cells, bc);
        out.push_str(INIC_SUBCKT);
        for e in &self.elements {
            let line = match e {
                Element::Inductor { name, a, b, henry } => {
                    format!("{} {} {} {}", name, a.name(), b.name(), format_si(*henry))
                }
                Element::Resistor { name, a, b, ohm } => {
                    format!("{} {} {} {}", name, a.name(), b.name(), format_si(*ohm))
                }
                Element::Capacitor { name, a, b, farad } => {
                    format!("{} {} {} {}", name, a.name(), b.name(), format_si(*farad))
                }
                Element::Inic { name, from, to, c1, c2, negative, ra, ca } => format!(
                    "{} {} {} {} C1={} C2={} RA={} CA={}",
                    name,
                    from.name(),
                    to.name(),
                    if *negative { "INIC_NEG" } else { "INIC" },
                    format_si(*c1),
                    format_si(*c2),
                    format_si(*ra),
                    format_si(*ca)
                ),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(".end\n");
        out
    }

    /// Write [`Netlist::to_spice`] to `path`.
    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_spice())?;
        Ok(())
    }

    /// Parse the dialect written by [`Netlist::to_spice`]. Subcircuit bodies are
    /// skipped; `X` cards must instantiate `INIC` or `INIC_NEG`.
    pub fn parse(text: &str) -> Result<Netlist> {
        let mut elements = Vec::new();
        let mut in_subckt = false;
        let mut bc = None;
        let mut max_site: Option<usize> = None;
        let err = |line: usize, message: String| Error::Netlist { line, message };
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('*') {
                if let Some(pos) = comment.find("bc=") {
                    bc = comment[pos + 3..].split_whitespace().next().and_then(|s| s.parse().ok());
                }
                continue;
            }
            let lower = line.to_ascii_lowercase();
            if lower.starts_with(".subckt") {
                in_subckt = true;
                continue;
            }
            if lower.starts_with(".ends") {
                in_subckt = false;
                continue;
            }
            if in_subckt || lower.starts_with('.') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 4 {
                return Err(err(lineno, format!("expected at least 4 fields, got {}", toks.len())));
            }
            let name = toks[0].to_string();
            let a = Node::parse(toks[1]);
            let b = Node::parse(toks[2]);
            for n in [&a, &b] {
                if let Node::Site(i) = n {
                    max_site = Some(max_site.map_or(*i, |m| m.max(*i)));
                }
            }
            let value = |s: &str| parse_si(s).ok_or_else(|| err(lineno, format!("bad value `{s}`")));
            let first = name.chars().next().unwrap().to_ascii_uppercase();
            let element = match first {
                'L' => Element::Inductor { name, a, b, henry: value(toks[3])? },
                'R' => Element::Resistor { name, a, b, ohm: value(toks[3])? },
                'C' => Element::Capacitor { name, a, b, farad: value(toks[3])? },
                'X' => {
                    let negative = match toks[3].to_ascii_uppercase().as_str() {
                        "INIC" => false,
                        "INIC_NEG" => true,
                        other => return Err(err(lineno, format!("unknown subcircuit `{other}`"))),
                    };
                    let mut params = BTreeMap::new();
                    for t in &toks[4..] {
                        let (k, v) = t.split_once('=').ok_or_else(|| err(lineno, format!("bad parameter `{t}`")))?;
                        params.insert(k.to_ascii_uppercase(), value(v)?);
                    }
                    let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
                    Element::Inic {
                        name,
                        from: a,
                        to: b,
                        c1: get("C1", 1e-9),
                        c2: get("C2", 1e-9),
                        negative,
                        ra: get("RA", DEFAULT_RA),
                        ca: get("CA", DEFAULT_CA),
                    }
                }
                other => return Err(err(lineno, format!("unsupported element type `{other}`"))),
            };
            elements.push(element);
        }
        let sites = max_site.map_or(0, |m| m + 1);
        let cells = sites.div_ceil(2);
        Ok(Netlist { cells, bc, elements })
    }

    /// Nodal admittance matrix over the site nodes at angular frequency `omega`,
    /// with internal nodes eliminated. INICs use their effective-capacitance model.
    pub fn laplacian(&self, omega: f64) -> Result<DenseMatrix> {
        let sites = 2 * self.cells;
        let mut internal: BTreeMap<String, usize> = BTreeMap::new();
        for e in &self.elements {
            let nodes: [&Node; 2] = match e {
                Element::Inductor { a, b, .. } | Element::Resistor { a, b, .. } | Element::Capacitor { a, b, .. } => [a, b],
                Element::Inic { from, to, .. } => [from, to],
            };
            for n in nodes {
                match n {
                    Node::Internal(s) => {
                        let next = sites + internal.len();
                        internal.entry(s.clone()).or_insert(next);
                    }
                    Node::Site(i) if *i >= sites => {
                        return Err(Error::Precondition(format!("node {} outside a {}-cell chain", n.name(), self.cells)))
                    }
                    _ => {}
                }
            }
        }
        let total = sites + internal.len();
        let index = |n: &Node| -> Option<usize> {
            match n {
                Node::Ground => None,
                Node::Site(i) => Some(*i),
                Node::Internal(s) => internal.get(s).copied(),
            }
        };
        let mut y = DenseMatrix::zeros(total);
        let jw = C64::new(0.0, omega);
        let two_terminal = |a: &Node, b: &Node, adm: C64, y: &mut DenseMatrix| {
            let (ia, ib) = (index(a), index(b));
            if let Some(i) = ia {
                y[(i, i)] += adm;
            }
            if let Some(j) = ib {
                y[(j, j)] += adm;
            }
            if let (Some(i), Some(j)) = (ia, ib) {
                y[(i, j)] -= adm;
                y[(j, i)] -= adm;
            }
        };
        for e in &self.elements {
            match e {
                Element::Inductor { a, b, henry, .. } => two_terminal(a, b, 1.0 / (jw * henry), &mut y),
                Element::Resistor { a, b, ohm, .. } => two_terminal(a, b, C64::new(1.0 / ohm, 0.0), &mut y),
                Element::Capacitor { a, b, farad, .. } => two_terminal(a, b, jw * farad, &mut y),
                Element::Inic { from, to, c1, c2, negative, .. } => {
                    let s = if *negative { -1.0 } else { 1.0 };
                    let forward = jw * (c1 + c2);
                    let reverse = jw * (c2 - c1);
                    let (f, t) = (index(from), index(to));
                    if let Some(t) = t {
                        y[(t, t)] += forward;
                    }
                    if let Some(f) = f {
                        y[(f, f)] += reverse;
                    }
                    if let (Some(f), Some(t)) = (f, t) {
                        y[(f, t)] -= forward * s;
                        y[(t, f)] -= reverse * s;
                    }
                }
            }
        }
        if internal.is_empty() {
            return Ok(y);
        }
        kron_reduce(&y, sites)
    }
}

/// Schur complement eliminating rows/columns `keep..`.
fn kron_reduce(y: &DenseMatrix, keep: usize) -> Result<DenseMatrix> {
    let total = y.dim();
    let ni = total - keep;
    let mut yii = DenseMatrix::zeros(ni);
    for i in 0..ni {
        for j in 0..ni {
            yii[(i, j)] = y[(keep + i, keep + j)];
        }
    }
    let lu = Lu::new(&yii).map_err(|_| Error::Domain("internal nodes are floating".into()))?;
    let mut out = DenseMatrix::zeros(keep);
    for i in 0..keep {
        for j in 0..keep {
            out[(i, j)] = y[(i, j)];
        }
    }
    for j in 0..keep {
        let col: Vec<C64> = (0..ni).map(|i| y[(keep + i, j)]).collect();
        if col.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let x = lu.solve(&col);
        for i in 0..keep {
            let mut s = C64::new(0.0, 0.0);
            for (q, xq) in x.iter().enumerate() {
                s += y[(i, keep + q)] * xq;
            }
            out[(i, j)] -= s;
        }
    }
    Ok(out)
}

//! The workspace file format: a line-oriented declaration of a ring and named
//! modules, complexes, chain maps, towers and metrics. See `docs/FORMAT.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use trimetric_core::cauchy::{Tail, Tower};
use trimetric_core::complex::{ChainMap, Complex};
use trimetric_core::linalg::Matrix;
use trimetric_core::metric::{Constraint, GoodMetric};
use trimetric_core::rmodule::{RModule, Ring};
use trimetric_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Validation(CoreError),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Attaches the declared name to validation errors from the core crate.
fn named(kind: &str, name: &str, e: CoreError) -> FormatError {
    FormatError::Validation(match e {
        CoreError::Validation { invariant, .. } => CoreError::validation(format!("{kind} {name}"), invariant),
        other => CoreError::validation(format!("{kind} {name}"), other.to_string()),
    })
}

#[derive(Clone, Debug)]
pub struct Workspace {
    pub ring: Ring,
    pub modules: BTreeMap<String, RModule>,
    pub complexes: BTreeMap<String, Complex>,
    pub maps: BTreeMap<String, MapDecl>,
    pub towers: BTreeMap<String, TowerDecl>,
    pub metrics: BTreeMap<String, GoodMetric>,
}

/// A chain map with the names it was declared between.
#[derive(Clone, Debug)]
pub struct MapDecl {
    pub source: String,
    pub target: String,
    pub map: ChainMap,
}

/// A tower with the names of its steps, kept for serialization.
#[derive(Clone, Debug)]
pub struct TowerDecl {
    pub steps: Vec<(String, Option<String>)>,
    pub tail: TailDecl,
    pub tower: Tower,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailDecl {
    None,
    Constant,
    /// Module name or inline block list.
    Truncation(String),
}

impl Workspace {
    pub fn new(ring: Ring) -> Self {
        Workspace {
            ring,
            modules: BTreeMap::new(),
            complexes: BTreeMap::new(),
            maps: BTreeMap::new(),
            towers: BTreeMap::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        parse_workspace(&text)
    }

    fn names(&self) -> BTreeSet<&str> {
        self.modules
            .keys()
            .chain(self.complexes.keys())
            .chain(self.maps.keys())
            .chain(self.towers.keys())
            .chain(self.metrics.keys())
            .map(String::as_str)
            .collect()
    }

    /// A module by name, or an inline `[blocks]` list.
    pub fn module(&self, spec: &str) -> Option<RModule> {
        let spec = spec.trim();
        if let Some(inner) = spec.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let blocks: Option<Vec<usize>> = inner.split_whitespace().map(|t| t.parse().ok()).collect();
            return RModule::new(self.ring, blocks?).ok();
        }
        self.modules.get(spec).cloned()
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with comments stripped, as `(line number, text)`.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.inner.by_ref() {
            let text = raw.split('#').next().unwrap_or("").trim();
            if !text.is_empty() {
                return Some((idx + 1, text));
            }
        }
        None
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, FormatError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, found `{tok}`")))
}

fn split_keyword(text: &str) -> (&str, &str) {
    match text.split_once(char::is_whitespace) {
        Some((k, rest)) => (k, rest.trim()),
        None => (text, ""),
    }
}

/// `rows` separated by `;`, integer entries; checked against `rows x cols`.
fn parse_matrix(ring: Ring, line: usize, text: &str, rows: usize, cols: usize) -> Result<Matrix, FormatError> {
    let parsed: Vec<Vec<i64>> = text
        .split(';')
        .map(|r| r.split_whitespace().map(|t| int(line, t, "integer")).collect())
        .collect::<Result<_, _>>()?;
    let parsed: Vec<Vec<i64>> = if parsed.len() == 1 && parsed[0].is_empty() {
        Vec::new()
    } else {
        parsed
    };
    if parsed.len() != rows || parsed.iter().any(|r| r.len() != cols) {
        return Err(parse_err(line, format!("matrix must be {rows}x{cols}")));
    }
    if rows == 0 || cols == 0 {
        return Ok(Matrix::zeros(ring.field(), rows, cols));
    }
    Matrix::from_rows(ring.field(), &parsed).map_err(|e| parse_err(line, e.to_string()))
}

pub fn parse_workspace(text: &str) -> Result<Workspace, FormatError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let Some((l, first)) = lines.next() else {
        return Err(parse_err(1, "empty workspace: expected RING p n"));
    };
    let (kw, rest) = split_keyword(first);
    if kw != "RING" {
        return Err(parse_err(l, "the first declaration must be RING p n"));
    }
    let toks: Vec<&str> = rest.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(l, "RING takes two integers p n"));
    }
    let ring = Ring::new(int(l, toks[0], "prime p")?, int(l, toks[1], "exponent n")?)
        .map_err(|e| parse_err(l, e.to_string()))?;
    let mut ws = Workspace::new(ring);

    while let Some((l, text)) = lines.next() {
        let (kw, rest) = split_keyword(text);
        if !matches!(kw, "MODULE" | "COMPLEX" | "MAP" | "TOWER" | "METRIC") {
            return Err(parse_err(l, format!("unknown declaration `{kw}`")));
        }
        let mut words = rest.split_whitespace();
        let name = words.next().unwrap_or("");
        if !is_name(name) {
            return Err(parse_err(l, format!("{kw} needs a name, found `{name}`")));
        }
        if ws.names().contains(name) {
            return Err(parse_err(l, format!("name `{name}` is already declared")));
        }
        let name = name.to_string();
        match kw {
            "MODULE" => {
                let blocks: Vec<usize> = words.map(|t| int(l, t, "block size")).collect::<Result<_, _>>()?;
                let m = RModule::new(ring, blocks).map_err(|e| parse_err(l, e.to_string()))?;
                ws.modules.insert(name, m);
            }
            "COMPLEX" => {
                let c = parse_complex(&ws, &mut lines, &name, l)?;
                ws.complexes.insert(name, c);
            }
            "MAP" => {
                let (src, tgt) = (words.next(), words.next());
                let (Some(src), Some(tgt)) = (src, tgt) else {
                    return Err(parse_err(l, "MAP name source target"));
                };
                let m = parse_map(&ws, &mut lines, &name, l, src, tgt)?;
                ws.maps.insert(name, m);
            }
            "TOWER" => {
                let t = parse_tower(&ws, &mut lines, &name, l)?;
                ws.towers.insert(name, t);
            }
            "METRIC" => {
                let m = parse_metric(&mut lines, &name, l)?;
                ws.metrics.insert(name, m);
            }
            _ => unreachable!(),
        }
    }
    Ok(ws)
}

fn block_lines<'a>(lines: &mut Lines<'a>, open: usize, what: &str) -> Result<Vec<(usize, &'a str)>, FormatError> {
    let mut out = Vec::new();
    loop {
        match lines.next() {
            Some((_, "END")) => return Ok(out),
            Some(entry) => out.push(entry),
            None => return Err(parse_err(open, format!("{what} is missing END"))),
        }
    }
}

fn parse_complex(ws: &Workspace, lines: &mut Lines, name: &str, open: usize) -> Result<Complex, FormatError> {
    let mut comps: BTreeMap<i64, RModule> = BTreeMap::new();
    let mut raw_diffs: Vec<(usize, i64, &str)> = Vec::new();
    for (l, text) in block_lines(lines, open, &format!("COMPLEX {name}"))? {
        let (kw, rest) = split_keyword(text);
        let (deg, body) = split_keyword(rest);
        let deg: i64 = int(l, deg, "degree")?;
        match kw {
            "AT" => {
                let m = ws
                    .module(body)
                    .ok_or_else(|| parse_err(l, format!("unknown module `{body}`")))?;
                if comps.insert(deg, m).is_some() {
                    return Err(parse_err(l, format!("degree {deg} declared twice")));
                }
            }
            "D" => raw_diffs.push((l, deg, body)),
            other => return Err(parse_err(l, format!("expected AT or D, found `{other}`"))),
        }
    }
    let mut diffs = BTreeMap::new();
    for (l, deg, body) in raw_diffs {
        let src = comps.get(&deg).map_or(0, RModule::dim);
        let tgt = comps.get(&(deg + 1)).map_or(0, RModule::dim);
        let m = parse_matrix(ws.ring, l, body, tgt, src)?;
        if diffs.insert(deg, m).is_some() {
            return Err(parse_err(l, format!("differential {deg} declared twice")));
        }
    }
    Complex::from_maps(ws.ring, &comps, &diffs).map_err(|e| named("complex", name, e))
}

fn parse_map(
    ws: &Workspace,
    lines: &mut Lines,
    name: &str,
    open: usize,
    src: &str,
    tgt: &str,
) -> Result<MapDecl, FormatError> {
    let lookup = |n: &str| {
        ws.complexes
            .get(n)
            .cloned()
            .ok_or_else(|| parse_err(open, format!("unknown complex `{n}`")))
    };
    let (source, target) = (lookup(src)?, lookup(tgt)?);
    let mut maps = BTreeMap::new();
    for (l, text) in block_lines(lines, open, &format!("MAP {name}"))? {
        let (kw, rest) = split_keyword(text);
        if kw != "AT" {
            return Err(parse_err(l, format!("expected AT, found `{kw}`")));
        }
        let (deg, body) = split_keyword(rest);
        let deg: i64 = int(l, deg, "degree")?;
        let m = parse_matrix(ws.ring, l, body, target.dim(deg), source.dim(deg))?;
        if maps.insert(deg, m).is_some() {
            return Err(parse_err(l, format!("component {deg} declared twice")));
        }
    }
    let map = ChainMap::new(source, target, maps).map_err(|e| named("map", name, e))?;
    Ok(MapDecl {
        source: src.to_string(),
        target: tgt.to_string(),
        map,
    })
}

fn parse_tower(ws: &Workspace, lines: &mut Lines, name: &str, open: usize) -> Result<TowerDecl, FormatError> {
    let mut steps: Vec<(String, Option<String>)> = Vec::new();
    let mut tail = None;
    for (l, text) in block_lines(lines, open, &format!("TOWER {name}"))? {
        if tail.is_some() {
            return Err(parse_err(l, "TAIL must be the last line of a tower"));
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        match toks.as_slice() {
            ["STEP", x] if steps.is_empty() => steps.push((x.to_string(), None)),
            ["STEP", _] => return Err(parse_err(l, "steps after the first need VIA map")),
            ["STEP", _, "VIA", _] if steps.is_empty() => {
                return Err(parse_err(l, "the first step has no incoming map"))
            }
            ["STEP", x, "VIA", f] => steps.push((x.to_string(), Some(f.to_string()))),
            ["TAIL", "NONE"] => tail = Some(TailDecl::None),
            ["TAIL", "CONSTANT"] => tail = Some(TailDecl::Constant),
            ["TAIL", "TRUNCATION", ..] => {
                let spec = text.splitn(3, char::is_whitespace).nth(2).unwrap_or("").trim();
                ws.module(spec)
                    .ok_or_else(|| parse_err(l, format!("unknown module `{spec}`")))?;
                tail = Some(TailDecl::Truncation(spec.to_string()));
            }
            _ => return Err(parse_err(l, format!("cannot parse tower line `{text}`"))),
        }
    }
    let tail = tail.unwrap_or(TailDecl::None);
    let mut prefix = Vec::new();
    let mut maps = Vec::new();
    for (x, via) in &steps {
        let c = ws
            .complexes
            .get(x)
            .ok_or_else(|| parse_err(open, format!("unknown complex `{x}` in tower {name}")))?;
        prefix.push(c.clone());
        if let Some(f) = via {
            let m = ws
                .maps
                .get(f)
                .ok_or_else(|| parse_err(open, format!("unknown map `{f}` in tower {name}")))?;
            maps.push(m.map.clone());
        }
    }
    let core_tail = match &tail {
        TailDecl::None => Tail::None,
        TailDecl::Constant => Tail::Constant,
        TailDecl::Truncation(spec) => Tail::Truncation(ws.module(spec).expect("checked above")),
    };
    let tower = Tower::new(ws.ring, prefix, maps, core_tail).map_err(|e| named("tower", name, e))?;
    Ok(TowerDecl { steps, tail, tower })
}

fn parse_metric(lines: &mut Lines, name: &str, open: usize) -> Result<GoodMetric, FormatError> {
    let mut constraints = Vec::new();
    let mut dual = false;
    for (l, text) in block_lines(lines, open, &format!("METRIC {name}"))? {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let nums = |k: usize| -> Result<Vec<i64>, FormatError> {
            if toks.len() != k + 1 {
                return Err(parse_err(l, format!("{} takes {k} integers", toks[0])));
            }
            toks[1..].iter().map(|t| int(l, t, "integer")).collect()
        };
        match toks[0] {
            "ABOVE" => {
                let v = nums(2)?;
                constraints.push(Constraint::Above { c: v[0], o: v[1] });
            }
            "BELOW" => {
                let v = nums(2)?;
                constraints.push(Constraint::Below { c: v[0], o: v[1] });
            }
            "INTERVAL" => {
                let v = nums(4)?;
                constraints.push(Constraint::Between {
                    c1: v[0],
                    o1: v[1],
                    c2: v[2],
                    o2: v[3],
                });
            }
            "DUAL" if toks.len() == 1 => dual = true,
            other => return Err(parse_err(l, format!("unknown metric line `{other}`"))),
        }
    }
    let m = GoodMetric::new(name, constraints);
    Ok(if dual { m.dual().renamed(name) } else { m })
}

fn blocks(m: &RModule) -> String {
    let inner: Vec<String> = m.blocks().iter().map(usize::to_string).collect();
    format!("[{}]", inner.join(" "))
}

fn rows(m: &Matrix) -> String {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// Serializes a workspace; `parse_workspace` reads it back to equal objects.
pub fn serialize_workspace(ws: &Workspace) -> String {
    let mut out = String::new();
    writeln!(out, "RING {} {}", ws.ring.p(), ws.ring.n()).unwrap();
    for (name, m) in &ws.modules {
        let b: String = m.blocks().iter().map(|j| format!(" {j}")).collect();
        writeln!(out, "MODULE {name}{b}").unwrap();
    }
    for (name, c) in &ws.complexes {
        writeln!(out, "COMPLEX {name}").unwrap();
        for i in c.degrees() {
            if c.dim(i) > 0 {
                writeln!(out, "  AT {i} {}", blocks(&c.component(i))).unwrap();
            }
        }
        for i in c.degrees() {
            let d = c.diff(i);
            if !d.is_zero() {
                writeln!(out, "  D {i} {}", rows(&d)).unwrap();
            }
        }
        writeln!(out, "END").unwrap();
    }
    for (name, m) in &ws.maps {
        writeln!(out, "MAP {name} {} {}", m.source, m.target).unwrap();
        for (i, c) in m.map.components() {
            writeln!(out, "  AT {i} {}", rows(c)).unwrap();
        }
        writeln!(out, "END").unwrap();
    }
    for (name, t) in &ws.towers {
        writeln!(out, "TOWER {name}").unwrap();
        for (x, via) in &t.steps {
            match via {
                Some(f) => writeln!(out, "  STEP {x} VIA {f}").unwrap(),
                None => writeln!(out, "  STEP {x}").unwrap(),
            }
        }
        match &t.tail {
            TailDecl::None => writeln!(out, "  TAIL NONE").unwrap(),
            TailDecl::Constant => writeln!(out, "  TAIL CONSTANT").unwrap(),
            TailDecl::Truncation(spec) => writeln!(out, "  TAIL TRUNCATION {spec}").unwrap(),
        }
        writeln!(out, "END").unwrap();
    }
    for (name, m) in &ws.metrics {
        writeln!(out, "METRIC {name}").unwrap();
        for c in m.constraints() {
            writeln!(out, "  {}", c.to_string().to_uppercase()).unwrap();
        }
        if m.is_dual() {
            writeln!(out, "  DUAL").unwrap();
        }
        writeln!(out, "END").unwrap();
    }
    out
}

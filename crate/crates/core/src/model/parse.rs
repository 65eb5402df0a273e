//! Line-oriented model format.
//!
//! ```text
//! dagsynth-model v1
//! [grid]
//! dimensions = 8 8
//! start = 5 1
//! [labels]
//! hazards = boundary 3,4
//! reach = interior
//! targets = 2,6
//! [game]
//! hmax = 6
//! hadv = 2
//! spread = 1
//! actions = N NE E SE S SW W NW
//! [detection]
//! mode = features
//! sigma = 0.8
//! lambda = 4
//! row 0 = 0.1 0.1 ...
//! ```
//!
//! Lines starting with `#` are comments. Coordinates are zero-based with `y`
//! growing northward. Label lists accept `x,y` tokens and the keywords
//! `boundary` and `interior`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::game_core::{Cell, Direction, Word};

use super::detection::{detection_map, DEFAULT_LAMBDA};
use super::{AdversaryPolicy, CellSet, DetectionSource, DetectionTable, GameModel};

pub const MODEL_HEADER: &str = "dagsynth-model v1";
const POLICY_HEADER: &str = "dagsynth-p1 v1";
const MAX_SIDE: u32 = 64;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Section {
    Grid,
    Labels,
    Game,
    Detection,
}

impl Section {
    fn parse(s: &str) -> Option<Section> {
        match s {
            "grid" => Some(Section::Grid),
            "labels" => Some(Section::Labels),
            "game" => Some(Section::Game),
            "detection" => Some(Section::Detection),
            _ => None,
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::Grid => &["dimensions", "start"],
            Section::Labels => &["hazards", "reach", "targets"],
            Section::Game => &["hmax", "hadv", "spread", "actions"],
            Section::Detection => &["mode", "value", "sigma", "lambda"],
        }
    }
}

struct Entry<'a> {
    line: usize,
    column: usize,
    value: &'a str,
}

impl Entry<'_> {
    fn tokens(&self) -> Vec<(usize, &str)> {
        tokens(self.value, self.column)
    }
}

fn tokens(value: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in value.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((base + value[..s].chars().count(), &value[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((base + value[..s].chars().count(), &value[s..]));
    }
    out
}

struct Document<'a> {
    entries: BTreeMap<(Section, String), Entry<'a>>,
    last_line: usize,
}

impl<'a> Document<'a> {
    fn read(text: &'a str) -> Result<Self, ParseError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<Section> = None;
        let mut seen_sections = Vec::new();
        let mut header_seen = false;
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let indent = raw.chars().take_while(|c| c.is_whitespace()).count() + 1;
            if !header_seen {
                if trimmed != MODEL_HEADER {
                    return Err(ParseError::at(line, indent, format!("expected header `{MODEL_HEADER}`")));
                }
                header_seen = true;
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ParseError::at(line, indent, "unterminated section header"))?;
                let s = Section::parse(name.trim())
                    .ok_or_else(|| ParseError::at(line, indent + 1, format!("unknown section `{name}`")))?;
                if seen_sections.contains(&s) {
                    return Err(ParseError::at(line, indent, format!("duplicate section `{name}`")));
                }
                seen_sections.push(s);
                section = Some(s);
                continue;
            }
            let eq = raw.find('=').ok_or_else(|| ParseError::at(line, indent, "expected `key = value`"))?;
            let key = raw[..eq].trim();
            let sec = section.ok_or_else(|| ParseError::at(line, indent, "key outside of any section"))?;
            let is_row = sec == Section::Detection && key.starts_with("row ");
            if !is_row && !sec.keys().contains(&key) {
                return Err(ParseError::at(line, indent, format!("unknown key `{key}`")));
            }
            let after = &raw[eq + 1..];
            let lead = after.chars().take_while(|c| c.is_whitespace()).count();
            let column = raw[..eq + 1].chars().count() + lead + 1;
            let value = after.trim();
            let normalized = if is_row { format!("row {}", key["row ".len()..].trim()) } else { key.to_string() };
            if entries.contains_key(&(sec, normalized.clone())) {
                return Err(ParseError::at(line, indent, format!("duplicate key `{key}`")));
            }
            entries.insert((sec, normalized), Entry { line, column, value });
        }
        if !header_seen {
            return Err(ParseError::at(last_line + 1, 1, "missing required field: dimensions"));
        }
        Ok(Document { entries, last_line })
    }

    fn get(&self, sec: Section, key: &str) -> Option<&Entry<'a>> {
        self.entries.get(&(sec, key.to_string()))
    }

    fn require(&self, sec: Section, key: &str) -> Result<&Entry<'a>, ParseError> {
        self.get(sec, key)
            .ok_or_else(|| ParseError::at(self.last_line + 1, 1, format!("missing required field: {key}")))
    }
}

fn parse_uint(col: usize, line: usize, tok: &str) -> Result<u32, ParseError> {
    tok.parse::<u32>().map_err(|_| ParseError::at(line, col, format!("expected a nonnegative integer, got `{tok}`")))
}

fn parse_prob(col: usize, line: usize, tok: &str, what: &str) -> Result<f64, ParseError> {
    let v: f64 = tok.parse().map_err(|_| ParseError::at(line, col, format!("expected a number, got `{tok}`")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(ParseError::at(line, col, format!("{what} out of range: {tok}")));
    }
    Ok(v)
}

fn single_uint(e: &Entry) -> Result<u32, ParseError> {
    let toks = e.tokens();
    match toks.as_slice() {
        [(c, t)] => parse_uint(*c, e.line, t),
        _ => Err(ParseError::at(e.line, e.column, "expected exactly one integer")),
    }
}

fn single_float(e: &Entry) -> Result<(usize, f64), ParseError> {
    let toks = e.tokens();
    match toks.as_slice() {
        [(c, t)] => t
            .parse::<f64>()
            .map(|v| (*c, v))
            .map_err(|_| ParseError::at(e.line, *c, format!("expected a number, got `{t}`"))),
        _ => Err(ParseError::at(e.line, e.column, "expected exactly one number")),
    }
}

fn pair(e: &Entry, width: u32, height: u32) -> Result<(u32, u32), ParseError> {
    let toks = e.tokens();
    let [(cx, x), (cy, y)] = toks.as_slice() else {
        return Err(ParseError::at(e.line, e.column, "expected two integers"));
    };
    let x = parse_uint(*cx, e.line, x)?;
    let y = parse_uint(*cy, e.line, y)?;
    if x >= width {
        return Err(ParseError::at(e.line, *cx, format!("coordinate out of range: x = {x}")));
    }
    if y >= height {
        return Err(ParseError::at(e.line, *cy, format!("coordinate out of range: y = {y}")));
    }
    Ok((x, y))
}

fn cell_list(e: Option<&Entry>, width: u8, height: u8) -> Result<CellSet, ParseError> {
    let mut set = CellSet::new(width, height);
    let Some(e) = e else { return Ok(set) };
    for (col, tok) in e.tokens() {
        match tok {
            "boundary" => CellSet::boundary(width, height).iter().for_each(|c| set.insert(c)),
            "interior" => {
                let b = CellSet::boundary(width, height);
                for y in 0..height {
                    for x in 0..width {
                        let c = Cell::new(x, y);
                        if !b.contains(c) {
                            set.insert(c);
                        }
                    }
                }
            }
            _ => {
                let (xs, ys) = tok
                    .split_once(',')
                    .ok_or_else(|| ParseError::at(e.line, col, format!("expected `x,y` or a keyword, got `{tok}`")))?;
                let x = parse_uint(col, e.line, xs)?;
                let y = parse_uint(col + xs.len() + 1, e.line, ys)?;
                if x >= width as u32 || y >= height as u32 {
                    return Err(ParseError::at(e.line, col, format!("coordinate out of range: {tok}")));
                }
                set.insert(Cell::new(x as u8, y as u8));
            }
        }
    }
    Ok(set)
}

fn rows(doc: &Document, count: usize, len: usize, what: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::with_capacity(count * len);
    for i in 0..count {
        let e = doc.require(Section::Detection, &format!("row {i}"))?;
        let toks = e.tokens();
        if toks.len() != len {
            return Err(ParseError::at(
                e.line,
                e.column,
                format!("row {i} has {} entries, expected {len}", toks.len()),
            ));
        }
        for (col, t) in toks {
            out.push(parse_prob(col, e.line, t, what)?);
        }
    }
    if let Some(((_, key), e)) = doc
        .entries
        .iter()
        .filter(|((s, k), _)| *s == Section::Detection && k.starts_with("row "))
        .find(|((_, k), _)| k["row ".len()..].parse::<usize>().map_or(true, |i| i >= count))
    {
        return Err(ParseError::at(e.line, 1, format!("unexpected `{key}`")));
    }
    Ok(out)
}

/// Parses a model document. Omitted optional fields default to
/// `spread = 1`, `hadv = 1`, all eight actions and empty label sets.
pub fn parse_model(text: &str) -> Result<GameModel, ParseError> {
    let doc = Document::read(text)?;

    let dims = doc.require(Section::Grid, "dimensions")?;
    let toks = dims.tokens();
    let [(cw, w), (ch, h)] = toks.as_slice() else {
        return Err(ParseError::at(dims.line, dims.column, "expected `dimensions = <width> <height>`"));
    };
    let width = parse_uint(*cw, dims.line, w)?;
    let height = parse_uint(*ch, dims.line, h)?;
    for (c, v) in [(*cw, width), (*ch, height)] {
        if v == 0 || v > MAX_SIDE {
            return Err(ParseError::at(dims.line, c, format!("grid side must be in 1..={MAX_SIDE}")));
        }
    }
    let (w8, h8) = (width as u8, height as u8);
    let (sx, sy) = pair(doc.require(Section::Grid, "start")?, width, height)?;

    let hazards = cell_list(doc.get(Section::Labels, "hazards"), w8, h8)?;
    let reach = cell_list(doc.get(Section::Labels, "reach"), w8, h8)?;
    let targets = cell_list(doc.get(Section::Labels, "targets"), w8, h8)?;

    let hmax_entry = doc.require(Section::Game, "hmax")?;
    let h_max = single_uint(hmax_entry)? as usize;
    if h_max > Word::CAPACITY {
        return Err(ParseError::at(
            hmax_entry.line,
            hmax_entry.column,
            format!("hmax exceeds the supported word length {}", Word::CAPACITY),
        ));
    }
    let h_adv = doc.get(Section::Game, "hadv").map(single_uint).transpose()?.unwrap_or(1) as usize;
    let spread = doc.get(Section::Game, "spread").map(single_uint).transpose()?.unwrap_or(1);
    if spread > 4 {
        let e = doc.get(Section::Game, "spread").unwrap();
        return Err(ParseError::at(e.line, e.column, "spread must be at most 4"));
    }
    let actions = match doc.get(Section::Game, "actions") {
        None => Direction::ALL.to_vec(),
        Some(e) => {
            let mut acts = Vec::new();
            for (col, t) in e.tokens() {
                let d =
                    Direction::parse(t).ok_or_else(|| ParseError::at(e.line, col, format!("unknown action `{t}`")))?;
                if acts.contains(&d) {
                    return Err(ParseError::at(e.line, col, format!("duplicate action `{t}`")));
                }
                acts.push(d);
            }
            acts.sort();
            acts
        }
    };

    let cells = width as usize * height as usize;
    let mode = doc.require(Section::Detection, "mode")?;
    let (detection, p) = match mode.value {
        "constant" => {
            let e = doc.require(Section::Detection, "value")?;
            let (col, v) = single_float(e)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(ParseError::at(e.line, col, format!("probability out of range: {v}")));
            }
            (DetectionSource::Constant(v), DetectionTable::constant(cells, v))
        }
        "matrix" => {
            let values = rows(&doc, cells, cells, "probability")?;
            (DetectionSource::Matrix, DetectionTable::from_matrix(cells, values))
        }
        "features" => {
            let sigma = match doc.get(Section::Detection, "sigma") {
                Some(e) => {
                    let (col, s) = single_float(e)?;
                    if s < 0.0 {
                        return Err(ParseError::at(e.line, col, "sigma must be nonnegative"));
                    }
                    s
                }
                None => 0.0,
            };
            let lambda = match doc.get(Section::Detection, "lambda") {
                Some(e) => {
                    let (col, l) = single_float(e)?;
                    if l <= 0.0 || l.is_nan() {
                        return Err(ParseError::at(e.line, col, "lambda must be positive"));
                    }
                    l
                }
                None => DEFAULT_LAMBDA,
            };
            let features = rows(&doc, height as usize, width as usize, "feature")?;
            let table = detection_map(w8, h8, &features, sigma, lambda)
                .map_err(|e| ParseError::at(mode.line, mode.column, e.to_string()))?;
            (DetectionSource::Features { features, sigma, lambda }, table)
        }
        other => {
            return Err(ParseError::at(
                mode.line,
                mode.column,
                format!("unknown detection mode `{other}` (expected constant, matrix or features)"),
            ))
        }
    };

    Ok(GameModel {
        width: w8,
        height: h8,
        start: Cell::new(sx as u8, sy as u8),
        hazards,
        reach,
        targets,
        detection,
        p,
        beta_spread: spread as u8,
        h_adv,
        h_max,
        actions,
        adversary: None,
    })
}

fn write_cells(out: &mut String, key: &str, set: &CellSet) -> fmt::Result {
    write!(out, "{key} =")?;
    for c in set.iter() {
        write!(out, " {c}")?;
    }
    writeln!(out)
}

fn write_row(out: &mut String, i: usize, values: &[f64]) -> fmt::Result {
    write!(out, "row {i} =")?;
    for v in values {
        write!(out, " {v}")?;
    }
    writeln!(out)
}

/// Prints the canonical form of a model: explicit cell lists in row-major order,
/// every optional field spelled out.
pub fn print_model(m: &GameModel) -> String {
    let mut out = String::new();
    let _ = (|| -> fmt::Result {
        writeln!(out, "{MODEL_HEADER}")?;
        writeln!(out, "[grid]")?;
        writeln!(out, "dimensions = {} {}", m.width, m.height)?;
        writeln!(out, "start = {} {}", m.start.x, m.start.y)?;
        writeln!(out, "[labels]")?;
        write_cells(&mut out, "hazards", &m.hazards)?;
        write_cells(&mut out, "reach", &m.reach)?;
        write_cells(&mut out, "targets", &m.targets)?;
        writeln!(out, "[game]")?;
        writeln!(out, "hmax = {}", m.h_max)?;
        writeln!(out, "hadv = {}", m.h_adv)?;
        writeln!(out, "spread = {}", m.beta_spread)?;
        write!(out, "actions =")?;
        for a in &m.actions {
            write!(out, " {a}")?;
        }
        writeln!(out)?;
        writeln!(out, "[detection]")?;
        match &m.detection {
            DetectionSource::Constant(v) => {
                writeln!(out, "mode = constant")?;
                writeln!(out, "value = {v}")?;
            }
            DetectionSource::Matrix => {
                writeln!(out, "mode = matrix")?;
                for t in 0..m.p.cells() {
                    write_row(&mut out, t, m.p.row(t))?;
                }
            }
            DetectionSource::Features { features, sigma, lambda } => {
                writeln!(out, "mode = features")?;
                writeln!(out, "sigma = {sigma}")?;
                writeln!(out, "lambda = {lambda}")?;
                for (y, row) in features.chunks(m.width as usize).enumerate() {
                    write_row(&mut out, y, row)?;
                }
            }
        }
        Ok(())
    })();
    out
}

/// Parses a fixed adversary policy.
///
/// ```text
/// dagsynth-p1 v1
/// * N NE      # at every position, answer N with NE
/// 2 E E       # at word position 2, answer E with E
/// ```
pub fn parse_adversary_policy(text: &str) -> Result<AdversaryPolicy, ParseError> {
    let mut policy = AdversaryPolicy::default();
    let mut header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if !header {
            if content.trim() != POLICY_HEADER {
                return Err(ParseError::at(line, 1, format!("expected header `{POLICY_HEADER}`")));
            }
            header = true;
            continue;
        }
        let toks = tokens(content, 1);
        let [(cp, pos), (ca, a), (cb, b)] = toks.as_slice() else {
            return Err(ParseError::at(line, 1, "expected `<position|*> <move> <deviation>`"));
        };
        let position = match *pos {
            "*" => None,
            p => Some(parse_uint(*cp, line, p)? as usize),
        };
        let a = Direction::parse(a).ok_or_else(|| ParseError::at(line, *ca, format!("unknown move `{a}`")))?;
        let b = Direction::parse(b).ok_or_else(|| ParseError::at(line, *cb, format!("unknown move `{b}`")))?;
        if policy.rules.insert((position, a), b).is_some() {
            return Err(ParseError::at(line, 1, "duplicate policy entry"));
        }
    }
    if !header {
        return Err(ParseError::at(1, 1, format!("expected header `{POLICY_HEADER}`")));
    }
    Ok(policy)
}

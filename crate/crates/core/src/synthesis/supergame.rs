use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::game_core::Cell;

use super::SynthesisError;

pub const SUPERGAME_HEADER: &str = "dagsynth-supergame v1";

/// A supergame location: a subgame root, or one of the two absorbing sinks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SgNode {
    Root(Cell),
    Target,
    Fail,
}

impl fmt::Display for SgNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SgNode::Root(c) => write!(f, "r{},{}", c.x, c.y),
            SgNode::Target => f.write_str("target"),
            SgNode::Fail => f.write_str("fail"),
        }
    }
}

impl FromStr for SgNode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "target" => Ok(SgNode::Target),
            "fail" => Ok(SgNode::Fail),
            _ => {
                let rest = s.strip_prefix('r').ok_or_else(|| format!("bad node `{s}`"))?;
                let (x, y) = rest.split_once(',').ok_or_else(|| format!("bad node `{s}`"))?;
                let x = x.parse().map_err(|_| format!("bad node `{s}`"))?;
                let y = y.parse().map_err(|_| format!("bad node `{s}`"))?;
                Ok(SgNode::Root(Cell::new(x, y)))
            }
        }
    }
}

/// One adversary resolution of a root's reveal attempt.
#[derive(Clone, Debug, PartialEq)]
pub struct SupergameEdge {
    pub label: String,
    pub dist: Vec<(SgNode, f64)>,
}

/// The MDP over subgame roots induced by composing the pruned strategies. The
/// nondeterminism at each root belongs to the adversary.
#[derive(Clone, Debug, PartialEq)]
pub struct SupergameMdp {
    pub initial: SgNode,
    pub edges: BTreeMap<SgNode, Vec<SupergameEdge>>,
    /// `(h, value)` of the strategy used at each feasible root.
    pub strategies: BTreeMap<Cell, (usize, f64)>,
}

impl SupergameMdp {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SUPERGAME_HEADER}");
        let _ = writeln!(out, "initial {}", self.initial);
        for (n, (h, v)) in &self.strategies {
            let _ = writeln!(out, "strategy {} {h} {v}", SgNode::Root(*n));
        }
        for (n, es) in &self.edges {
            for e in es {
                let dist: Vec<String> = e.dist.iter().map(|(d, p)| format!("{p} {d}")).collect();
                let _ = writeln!(out, "edge {n} {} : {}", e.label, dist.join(" ; "));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SynthesisError> {
        let err = |line: usize, message: String| SynthesisError::SupergameParse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, SUPERGAME_HEADER)) => {}
            Some((n, _)) => return Err(err(n, format!("expected header `{SUPERGAME_HEADER}`"))),
            None => return Err(err(1, "empty document".into())),
        }
        let mut initial = None;
        let mut edges: BTreeMap<SgNode, Vec<SupergameEdge>> = BTreeMap::new();
        let mut strategies = BTreeMap::new();
        for (n, line) in lines {
            let mut words = line.split_whitespace();
            match words.next() {
                Some("initial") => {
                    let node = words.next().ok_or_else(|| err(n, "missing node".into()))?;
                    initial = Some(node.parse().map_err(|m| err(n, m))?);
                }
                Some("strategy") => {
                    let parts: Vec<&str> = words.collect();
                    let [node, h, v] = parts[..] else {
                        return Err(err(n, "expected `strategy <node> <h> <value>`".into()));
                    };
                    let SgNode::Root(c) = node.parse().map_err(|m| err(n, m))? else {
                        return Err(err(n, "strategy on a sink".into()));
                    };
                    let h = h.parse().map_err(|_| err(n, format!("bad stage `{h}`")))?;
                    let v = v.parse().map_err(|_| err(n, format!("bad value `{v}`")))?;
                    strategies.insert(c, (h, v));
                }
                Some("edge") => {
                    let (head, tail) = line.split_once(':').ok_or_else(|| err(n, "missing `:`".into()))?;
                    let head: Vec<&str> = head.split_whitespace().collect();
                    let [_, node, label] = head[..] else {
                        return Err(err(n, "expected `edge <node> <label> :`".into()));
                    };
                    let node: SgNode = node.parse().map_err(|m| err(n, m))?;
                    let mut dist = Vec::new();
                    for part in tail.split(';') {
                        let mut it = part.split_whitespace();
                        let (Some(p), Some(d), None) = (it.next(), it.next(), it.next()) else {
                            return Err(err(n, format!("bad outcome `{}`", part.trim())));
                        };
                        let p: f64 = p.parse().map_err(|_| err(n, format!("bad probability `{p}`")))?;
                        if !(0.0..=1.0).contains(&p) {
                            return Err(err(n, format!("probability out of range: {p}")));
                        }
                        dist.push((d.parse().map_err(|m| err(n, m))?, p));
                    }
                    let total: f64 = dist.iter().map(|(_, p)| p).sum();
                    if (total - 1.0).abs() > 1e-9 {
                        return Err(err(n, format!("outcome probabilities sum to {total}")));
                    }
                    edges.entry(node).or_default().push(SupergameEdge { label: label.to_string(), dist });
                }
                Some(w) => return Err(err(n, format!("unknown directive `{w}`"))),
                None => {}
            }
        }
        let initial = initial.ok_or_else(|| err(text.lines().count() + 1, "missing initial node".into()))?;
        Ok(SupergameMdp { initial, edges, strategies })
    }

    /// Graphviz rendering: sinks as double circles, adversary choices as boxes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph supergame {\n  rankdir=LR;\n");
        let _ = writeln!(out, "  \"target\" [shape=doublecircle];\n  \"fail\" [shape=doublecircle];");
        for n in self.edges.keys() {
            let extra = match (n, self.strategies.get(&cell_of(*n))) {
                (SgNode::Root(_), Some((h, v))) => format!("\\nh={h} v={v:.4}"),
                _ => String::new(),
            };
            let bold = if *n == self.initial { ", penwidth=2" } else { "" };
            let _ = writeln!(out, "  \"{n}\" [shape=circle, label=\"{n}{extra}\"{bold}];");
        }
        for (n, es) in &self.edges {
            for (i, e) in es.iter().enumerate() {
                let mid = format!("{n}#{i}");
                let _ = writeln!(out, "  \"{mid}\" [shape=box, label=\"{}\"];", e.label);
                let _ = writeln!(out, "  \"{n}\" -> \"{mid}\";");
                for (d, p) in &e.dist {
                    let _ = writeln!(out, "  \"{mid}\" -> \"{d}\" [label=\"{p:.4}\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn cell_of(n: SgNode) -> Cell {
    match n {
        SgNode::Root(c) => c,
        _ => Cell::new(u8::MAX, u8::MAX),
    }
}

/// Minimum and maximum (over adversary resolutions) probability of reaching the
/// target sink within `n` supergame steps from the initial node.
pub fn analyze_supergame(mdp: &SupergameMdp, n: usize) -> (f64, f64) {
    let idx: BTreeMap<SgNode, usize> = mdp
        .edges
        .keys()
        .copied()
        .chain([SgNode::Target, SgNode::Fail, mdp.initial])
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, n)| (n, i))
        .collect();
    let run = |minimize: bool| {
        let mut v = vec![0.0; idx.len()];
        v[idx[&SgNode::Target]] = 1.0;
        for _ in 0..n {
            let mut next = v.clone();
            for (node, es) in &mdp.edges {
                let vals = es.iter().map(|e| e.dist.iter().map(|(d, p)| p * v[idx[d]]).sum::<f64>());
                let best =
                    if minimize { vals.fold(f64::INFINITY, f64::min) } else { vals.fold(f64::NEG_INFINITY, f64::max) };
                next[idx[node]] = if best.is_finite() { best } else { 0.0 };
            }
            v = next;
        }
        v[idx[&mdp.initial]]
    };
    (run(true), run(false))
}

/// Rows `n,pmin,pmax` for `n = 0..=max_n`.
pub fn analysis_table(mdp: &SupergameMdp, max_n: usize) -> Vec<(usize, f64, f64)> {
    (0..=max_n)
        .map(|n| {
            let (lo, hi) = analyze_supergame(mdp, n);
            (n, lo, hi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_roots() -> SupergameMdp {
        let a = SgNode::Root(Cell::new(1, 1));
        let b = SgNode::Root(Cell::new(2, 1));
        let mut edges = BTreeMap::new();
        edges.insert(
            a,
            vec![
                SupergameEdge { label: "t=2,1".into(), dist: vec![(b, 0.5), (a, 0.5)] },
                SupergameEdge { label: "hazard".into(), dist: vec![(SgNode::Fail, 1.0)] },
            ],
        );
        edges.insert(b, vec![SupergameEdge { label: "t=3,1".into(), dist: vec![(SgNode::Target, 1.0)] }]);
        let mut strategies = BTreeMap::new();
        strategies.insert(Cell::new(1, 1), (2, 0.5));
        strategies.insert(Cell::new(2, 1), (1, 1.0));
        SupergameMdp { initial: a, edges, strategies }
    }

    #[test]
    fn bounded_reachability() {
        let m = two_roots();
        assert_eq!(analyze_supergame(&m, 0), (0.0, 0.0));
        assert_eq!(analyze_supergame(&m, 1), (0.0, 0.0));
        assert_eq!(analyze_supergame(&m, 2), (0.0, 0.5));
        assert_eq!(analyze_supergame(&m, 3), (0.0, 0.75));
    }

    #[test]
    fn text_round_trip() {
        let m = two_roots();
        let text = m.to_text();
        assert!(text.starts_with(SUPERGAME_HEADER));
        assert_eq!(SupergameMdp::parse(&text).unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        let e = SupergameMdp::parse("dagsynth-supergame v1\ninitial r1,1\nedge r1,1 x : 0.5 fail\n").unwrap_err();
        assert!(matches!(e, SynthesisError::SupergameParse { line: 3, .. }), "{e}");
        let e = SupergameMdp::parse("nope\n").unwrap_err();
        assert!(matches!(e, SynthesisError::SupergameParse { line: 1, .. }));
    }

    #[test]
    fn dot_mentions_every_node() {
        let dot = two_roots().to_dot();
        for n in ["r1,1", "r2,1", "target", "fail", "t=2,1"] {
            assert!(dot.contains(n), "{n}");
        }
    }
}

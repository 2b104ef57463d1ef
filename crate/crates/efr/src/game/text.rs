//! Line-oriented game description.
//!
//! ```text
//! efr-game v1
//! name <name>
//! players <n>
//! node <id> <parent|-> <action|-> chance <outcome>=<prob> ...
//! node <id> <parent|-> <action|-> player <p> <infoset-key> <action> ...
//! node <id> <parent|-> <action|-> terminal <u_0> ... <u_{n-1}>
//! ```
//!
//! One `node` record per history, parents before children. `<action>` is
//! the label of the parent's action leading to this history. Tokens are
//! whitespace-free; `%`, whitespace and `=` are percent-escaped. Lines
//! starting with `#` are comments.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Game, GameBuilder, GameError, NodeId, NodeKind};

pub const HEADER: &str = "efr-game v1";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c == '%' || c == '=' || c.is_whitespace() {
            for b in c.to_string().bytes() {
                let _ = write!(out, "%{b:02X}");
            }
        } else {
            out.push(c);
        }
    }
    match out.as_str() {
        "" => "%00".to_string(),
        "-" => "%2D".to_string(),
        _ => out,
    }
}

fn unescape(s: &str, line: usize) -> Result<String, GameError> {
    if s == "%00" {
        return Ok(String::new());
    }
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3).ok_or_else(|| parse_err(line, "truncated escape"))?;
            out.push(u8::from_str_radix(hex, 16).map_err(|_| parse_err(line, "bad escape"))?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| parse_err(line, "escape is not utf-8"))
}

fn parse_err(line: usize, msg: &str) -> GameError {
    GameError::Parse { line, msg: msg.to_string() }
}

pub fn to_text(game: &Game) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "name {}", escape(game.name()));
    let _ = writeln!(out, "players {}", game.num_players());
    for (id, node) in game.nodes().iter().enumerate() {
        let (parent, action) = match (node.parent, node.action_in) {
            (Some(p), Some(a)) => (p.to_string(), escape(game.action_label(p, a))),
            _ => ("-".to_string(), "-".to_string()),
        };
        let _ = write!(out, "node {id} {parent} {action}");
        match &node.kind {
            NodeKind::Chance { outcomes, probs } => {
                out.push_str(" chance");
                for (o, p) in outcomes.iter().zip(probs) {
                    let _ = write!(out, " {}={p}", escape(o));
                }
            }
            NodeKind::Decision { player, infoset } => {
                let info = game.infoset(*infoset);
                let _ = write!(out, " player {player} {}", escape(&info.key));
                for a in &info.actions {
                    let _ = write!(out, " {}", escape(a));
                }
            }
            NodeKind::Terminal { payoffs } => {
                out.push_str(" terminal");
                for u in payoffs {
                    let _ = write!(out, " {u}");
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn from_text(text: &str) -> Result<Game, GameError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (n, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    if header != HEADER {
        return Err(parse_err(n, &format!("expected header {HEADER:?}")));
    }
    let mut name = String::from("custom");
    let mut players: Option<usize> = None;
    let mut builder: Option<GameBuilder> = None;
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<Vec<String>> = Vec::new();

    for (n, line) in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok[0] {
            "name" if builder.is_none() => {
                name = unescape(tok.get(1).ok_or_else(|| parse_err(n, "missing name"))?, n)?;
            }
            "players" if builder.is_none() => {
                let p = tok.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(n, "bad player count"))?;
                players = Some(p);
            }
            "node" => {
                let b = builder.get_or_insert_with(|| GameBuilder::new(name.clone(), players.unwrap_or(0)));
                if players.is_none() {
                    return Err(parse_err(n, "`players` must precede nodes"));
                }
                if tok.len() < 5 {
                    return Err(parse_err(n, "truncated node record"));
                }
                let parent = match tok[2] {
                    "-" => None,
                    p => {
                        let pid = *ids.get(p).ok_or_else(|| parse_err(n, "parent not yet defined"))?;
                        let label = unescape(tok[3], n)?;
                        let a = labels[pid]
                            .iter()
                            .position(|l| *l == label)
                            .ok_or_else(|| parse_err(n, &format!("parent has no action {label:?}")))?;
                        Some((pid, a))
                    }
                };
                let rest = &tok[5..];
                let (id, acts) = match tok[4] {
                    "chance" => {
                        let mut outcomes = Vec::new();
                        for t in rest {
                            let (o, p) = t.split_once('=').ok_or_else(|| parse_err(n, "outcome needs =prob"))?;
                            let p: f64 = p.parse().map_err(|_| parse_err(n, "bad probability"))?;
                            outcomes.push((unescape(o, n)?, p));
                        }
                        let acts = outcomes.iter().map(|o| o.0.clone()).collect();
                        (b.chance(parent, outcomes).map_err(|e| parse_err(n, &e.to_string()))?, acts)
                    }
                    "player" => {
                        if rest.len() < 3 {
                            return Err(parse_err(n, "decision needs player, key and actions"));
                        }
                        let p: usize = rest[0].parse().map_err(|_| parse_err(n, "bad player"))?;
                        let key = unescape(rest[1], n)?;
                        let acts: Vec<String> =
                            rest[2..].iter().map(|a| unescape(a, n)).collect::<Result<_, _>>()?;
                        (b.decision(parent, p, &key, &acts).map_err(|e| parse_err(n, &e.to_string()))?, acts)
                    }
                    "terminal" => {
                        let payoffs: Vec<f64> = rest
                            .iter()
                            .map(|u| u.parse().map_err(|_| parse_err(n, "bad payoff")))
                            .collect::<Result<_, _>>()?;
                        (b.terminal(parent, payoffs).map_err(|e| parse_err(n, &e.to_string()))?, Vec::new())
                    }
                    other => return Err(parse_err(n, &format!("unknown node kind {other:?}"))),
                };
                if ids.insert(tok[1].to_string(), id).is_some() {
                    return Err(parse_err(n, "duplicate node id"));
                }
                labels.push(acts);
            }
            other => return Err(parse_err(n, &format!("unexpected record {other:?}"))),
        }
    }
    builder.ok_or_else(|| parse_err(0, "no nodes"))?.build()
}

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use efr::deviation::DeviationType;
use efr::games::{GameKind, GameSpec, PointOrder};
use efr::RmVariant;

use crate::HarnessError;

/// How the other seats are filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Replay a self-play sequence of the opponent variant generated beforehand.
    Fixed,
    /// The other seats learn at the same time.
    Simultaneous,
}

impl FromStr for Regime {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(Self::Fixed),
            "simultaneous" | "sim" => Ok(Self::Simultaneous),
            other => Err(HarnessError::Config(format!("unknown regime {other:?} (fixed|simultaneous)"))),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fixed => "fixed",
            Self::Simultaneous => "simultaneous",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    /// Evaluated variants.
    pub variants: Vec<DeviationType>,
    /// Opponent variants; each evaluated variant meets every one of them in
    /// every seat.
    pub opponents: Vec<DeviationType>,
    pub rounds: usize,
    pub regime: Regime,
    pub rm: RmVariant,
    pub out: PathBuf,
    /// Worker threads for pairings; `None` lets rayon decide.
    pub threads: Option<usize>,
    /// Fill the elapsed_ns column. Off by default since it breaks
    /// byte-identical output.
    pub record_time: bool,
}

impl ExperimentConfig {
    /// Goofspiel(5, ascending, 2), the benchmark roster on both sides, 1000
    /// rounds of the fixed regime with exact regret matching.
    pub fn new(game: GameSpec) -> Self {
        Self {
            game,
            variants: DeviationType::TABLE.to_vec(),
            opponents: DeviationType::TABLE.to_vec(),
            rounds: 1000,
            regime: Regime::Fixed,
            rm: RmVariant::Rm,
            out: PathBuf::from("out"),
            threads: None,
            record_time: false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.rounds == 0 {
            return Err(HarnessError::Config("rounds must be at least 1".into()));
        }
        if self.variants.is_empty() || self.opponents.is_empty() {
            return Err(HarnessError::Config("at least one variant and one opponent are needed".into()));
        }
        if !matches!(self.rm, RmVariant::Rm | RmVariant::RmPlus) {
            return Err(HarnessError::Config(format!("the harness runs rm or rm_plus, not {}", self.rm)));
        }
        if self.threads == Some(0) {
            return Err(HarnessError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Builds a config from key-value settings, where later sources win:
    /// typically the config file first, then command-line flags.
    pub fn from_values(sources: &[&ConfigValues]) -> Result<Self, HarnessError> {
        let mut merged = ConfigValues::new();
        for s in sources {
            merged.extend(s.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        if let Some(k) = merged.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(HarnessError::Config(format!("unknown key {k:?}")));
        }
        let get = |k: &str| merged.get(k).map(String::as_str);
        let parse = |k: &str| -> Result<Option<usize>, HarnessError> {
            get(k)
                .map(|v| v.parse().map_err(|_| HarnessError::Config(format!("{k}: {v:?} is not a count"))))
                .transpose()
        };
        let kind: GameKind = get("game").unwrap_or("goofspiel").parse()?;
        let order = get("order").map(str::parse::<PointOrder>).transpose()?;
        let game = GameSpec::from_parts(kind, parse("ranks")?, order, parse("players")?)?;
        let mut cfg = Self::new(game);
        let exin = get("exin").map(parse_bool).transpose()?.unwrap_or(false);
        if exin {
            cfg.variants.extend(DeviationType::EX_IN);
            cfg.opponents.extend(DeviationType::EX_IN);
        }
        if let Some(v) = get("devtype") {
            cfg.variants = parse_types(v)?;
        }
        if let Some(v) = get("opponents") {
            cfg.opponents = parse_types(v)?;
        }
        if let Some(t) = parse("rounds")? {
            cfg.rounds = t;
        }
        if let Some(r) = get("regime") {
            cfg.regime = r.parse()?;
        }
        if let Some(r) = get("rm") {
            cfg.rm = r.parse().map_err(|_| HarnessError::Config(format!("unknown rm variant {r:?} (rm|rm_plus)")))?;
        }
        if let Some(o) = get("out") {
            cfg.out = PathBuf::from(o);
        }
        cfg.threads = parse("threads")?;
        cfg.record_time = get("record_time").map(parse_bool).transpose()?.unwrap_or(false);
        cfg.validate()?;
        Ok(cfg)
    }

    /// The config as key-value lines that [`parse_key_values`] reads back.
    pub fn to_key_values(&self) -> String {
        let tokens = |v: &[DeviationType]| v.iter().map(|t| t.token()).collect::<Vec<_>>().join(",");
        let mut lines = vec![format!("game = {}", self.game.kind())];
        if let GameSpec::Goofspiel { ranks, order, players } = self.game {
            lines.push(format!("ranks = {ranks}"));
            lines.push(format!("order = {order}"));
            lines.push(format!("players = {players}"));
        }
        lines.push(format!("devtype = {}", tokens(&self.variants)));
        lines.push(format!("opponents = {}", tokens(&self.opponents)));
        lines.push(format!("rounds = {}", self.rounds));
        lines.push(format!("regime = {}", self.regime));
        lines.push(format!("rm = {}", self.rm));
        lines.push(format!("out = {}", self.out.display()));
        if let Some(t) = self.threads {
            lines.push(format!("threads = {t}"));
        }
        lines.push(format!("record_time = {}", self.record_time));
        lines.join("\n") + "\n"
    }
}

pub type ConfigValues = BTreeMap<String, String>;

const KEYS: [&str; 13] = [
    "game",
    "ranks",
    "order",
    "players",
    "devtype",
    "opponents",
    "exin",
    "rounds",
    "regime",
    "rm",
    "out",
    "threads",
    "record_time",
];

/// `key = value` lines; blank lines and `#` comments are skipped. Dashes in
/// keys read as underscores so file keys can be spelled like the flags.
pub fn parse_key_values(text: &str) -> Result<ConfigValues, HarnessError> {
    let mut out = ConfigValues::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", n + 1)))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn parse_types(list: &str) -> Result<Vec<DeviationType>, HarnessError> {
    list.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e: efr::deviation::DeviationError| HarnessError::Config(e.to_string())))
        .collect()
}

fn parse_bool(v: &str) -> Result<bool, HarnessError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(HarnessError::Config(format!("{other:?} is not a boolean"))),
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use efr::deviation::DeviationType;
use plotters::prelude::*;

use crate::config::Regime;
use crate::regime::ResultRow;
use crate::HarnessError;

pub const CSV_HEADER: [&str; 9] =
    ["game", "regime", "variant", "opponent", "seat", "round", "payoff", "cum_avg_payoff", "elapsed_ns"];

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// One line per row under [`CSV_HEADER`]; floats use the shortest
/// representation that reads back exactly.
pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.game.clone(),
            r.regime.to_string(),
            r.variant.token().to_string(),
            r.opponent.token().to_string(),
            r.seat.to_string(),
            r.round.to_string(),
            r.payoff.to_string(),
            r.cum_avg_payoff.to_string(),
            r.elapsed_ns.map(|t| t.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let bad = |line: usize, what: &str| HarnessError::Config(format!("{}: row {line}: bad {what}", path.display()));
    let mut out = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let kind = |k: usize, what| field(k).parse::<DeviationType>().map_err(|_| bad(n + 1, what));
        out.push(ResultRow {
            game: field(0).to_string(),
            regime: field(1).parse::<Regime>()?,
            variant: kind(2, "variant")?,
            opponent: kind(3, "opponent")?,
            seat: field(4).parse().map_err(|_| bad(n + 1, "seat"))?,
            round: field(5).parse().map_err(|_| bad(n + 1, "round"))?,
            payoff: field(6).parse().map_err(|_| bad(n + 1, "payoff"))?,
            cum_avg_payoff: field(7).parse().map_err(|_| bad(n + 1, "cum_avg_payoff"))?,
            elapsed_ns: match field(8) {
                "" => None,
                t => Some(t.parse().map_err(|_| bad(n + 1, "elapsed_ns"))?),
            },
        });
    }
    Ok(out)
}

/// Mean payoff of one variant over every round, opponent and seat.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub variant: DeviationType,
    pub mean_payoff: f64,
    pub rows: usize,
}

/// One entry per variant, in order of first appearance.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for r in rows {
        let k = match out.iter().position(|s| s.variant == r.variant) {
            Some(k) => k,
            None => {
                out.push(SummaryRow { variant: r.variant, mean_payoff: 0.0, rows: 0 });
                sums.push(0.0);
                out.len() - 1
            }
        };
        sums[k] += r.payoff;
        out[k].rows += 1;
    }
    for (s, total) in out.iter_mut().zip(sums) {
        s.mean_payoff = total / s.rows as f64;
    }
    out
}

pub fn write_summary(path: &Path, summary: &[SummaryRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["variant", "mean_payoff", "rows"])?;
    for s in summary {
        w.write_record([s.variant.token().to_string(), s.mean_payoff.to_string(), s.rows.to_string()])?;
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

/// Per variant and round: mean cumulative average payoff and mean elapsed
/// time over its pairings.
fn curves(rows: &[ResultRow]) -> BTreeMap<(usize, DeviationType), Vec<(f64, f64, f64)>> {
    let order: Vec<DeviationType> = summarize(rows).into_iter().map(|s| s.variant).collect();
    let mut acc: BTreeMap<(usize, DeviationType), BTreeMap<usize, (f64, f64, usize)>> = BTreeMap::new();
    for r in rows {
        let k = order.iter().position(|&v| v == r.variant).expect("listed");
        let e = acc.entry((k, r.variant)).or_default().entry(r.round).or_insert((0.0, 0.0, 0));
        e.0 += r.cum_avg_payoff;
        e.1 += r.elapsed_ns.unwrap_or(0) as f64 * 1e-9;
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(k, per_round)| {
            let pts = per_round.into_iter().map(|(t, (p, s, n))| (t as f64, p / n as f64, s / n as f64)).collect();
            (k, pts)
        })
        .collect()
}

/// Learning curves as SVG: cumulative average payoff against rounds, and
/// against seconds when times were recorded. Returns the files written.
pub fn write_plots(dir: &Path, rows: &[ResultRow]) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let curves = curves(rows);
    let mut written = Vec::new();
    let timed = rows.iter().any(|r| r.elapsed_ns.is_some());
    let axes: &[(&str, &str, bool)] =
        if timed { &[("curves_round.svg", "round", false), ("curves_time.svg", "seconds", true)] } else { &[("curves_round.svg", "round", false)] };
    for &(file, x_label, by_time) in axes {
        let path = dir.join(file);
        plot(&path, &curves, x_label, by_time).map_err(|e| HarnessError::Plot(e.to_string()))?;
        written.push(path);
    }
    Ok(written)
}

fn plot(
    path: &Path,
    curves: &BTreeMap<(usize, DeviationType), Vec<(f64, f64, f64)>>,
    x_label: &str,
    by_time: bool,
) -> Result<(), Box<dyn std::error::Error>> {
    let pts = |c: &Vec<(f64, f64, f64)>| -> Vec<(f64, f64)> {
        c.iter().map(|&(t, p, s)| (if by_time { s } else { t }, p)).collect()
    };
    let all: Vec<(f64, f64)> = curves.values().flat_map(pts).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = ((y1 - y0) * 0.05).max(1e-6);
    let root = SVGBackend::new(path, (900, 560)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(20)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1.max(x0 + 1e-9), (y0 - pad)..(y1 + pad))?;
    chart.configure_mesh().x_desc(x_label).y_desc("cumulative average payoff").draw()?;
    for (k, ((_, variant), c)) in curves.iter().enumerate() {
        let color = Palette99::pick(k).to_rgba();
        chart
            .draw_series(LineSeries::new(pts(c), color.stroke_width(2)))?
            .label(variant.token())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw()?;
    root.present()?;
    Ok(())
}

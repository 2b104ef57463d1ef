use std::collections::BTreeMap;
use std::fs;
use std::process::Command;

use efr::deviation::DeviationType;
use efr::games::{GameSpec, PointOrder};
use efr_harness::{
    parse_key_values, read_csv, run, run_fixed_regime, run_simultaneous_regime, summarize, write_csv, write_plots,
    ConfigValues, ExperimentConfig, Regime, CSV_HEADER,
};

const GOOF3: GameSpec = GameSpec::Goofspiel { ranks: 3, order: PointOrder::Ascending, players: 2 };

fn config(game: GameSpec, variants: &[DeviationType], opponents: &[DeviationType], rounds: usize) -> ExperimentConfig {
    ExperimentConfig {
        variants: variants.to_vec(),
        opponents: opponents.to_vec(),
        rounds,
        ..ExperimentConfig::new(game)
    }
}

fn values(pairs: &[(&str, &str)]) -> ConfigValues {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[test]
fn config_file_and_flags_merge_with_flags_winning() {
    let file = parse_key_values(
        "# tournament\ngame = goofspiel\nranks = 4\norder = desc\ndevtype = cf, tips\nrounds = 20 # short\nrecord-time = true\n",
    )
    .unwrap();
    let flags = values(&[("rounds", "30"), ("regime", "simultaneous")]);
    let cfg = ExperimentConfig::from_values(&[&file, &flags]).unwrap();
    assert_eq!(cfg.game, GameSpec::Goofspiel { ranks: 4, order: PointOrder::Descending, players: 2 });
    assert_eq!(cfg.variants, vec![DeviationType::BlindCf, DeviationType::Tips]);
    assert_eq!(cfg.opponents, DeviationType::TABLE.to_vec());
    assert_eq!((cfg.rounds, cfg.regime, cfg.record_time), (30, Regime::Simultaneous, true));

    let back = parse_key_values(&cfg.to_key_values()).unwrap();
    assert_eq!(ExperimentConfig::from_values(&[&back]).unwrap(), cfg);

    let exin = ExperimentConfig::from_values(&[&values(&[("exin", "true")])]).unwrap();
    assert_eq!(exin.variants.len(), 11);
    assert_eq!(exin.game, GameSpec::Goofspiel { ranks: 5, order: PointOrder::Ascending, players: 2 });
}

#[test]
fn bad_configs_are_rejected() {
    for bad in [
        values(&[("rounds", "0")]),
        values(&[("colour", "red")]),
        values(&[("devtype", "cfr")]),
        values(&[("rm", "rm_pp")]),
        values(&[("game", "kuhn"), ("ranks", "3")]),
        values(&[("regime", "round-robin")]),
    ] {
        assert!(ExperimentConfig::from_values(&[&bad]).is_err(), "{bad:?}");
    }
    assert!(parse_key_values("rounds 10").is_err());
}

#[test]
fn empty_rows_give_a_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    write_csv(&path, &[]).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), CSV_HEADER.join(",") + "\n");
}

#[test]
fn row_count_is_variants_times_seats_times_rounds() {
    let cfg = config(GOOF3, &[DeviationType::BlindCf, DeviationType::InformedAction], &[DeviationType::Bps], 7);
    for regime in [Regime::Fixed, Regime::Simultaneous] {
        let rows = run(&ExperimentConfig { regime, ..cfg.clone() }).unwrap();
        assert_eq!(rows.len(), 4 * 7);
        assert!(rows.iter().all(|r| r.elapsed_ns.is_none() && r.regime == regime));
        assert_eq!(rows.iter().map(|r| r.round).max(), Some(7));
    }
}

#[test]
fn own_frozen_sequence_averages_to_the_game_value_over_seats() {
    for (game, center) in [(GameSpec::Kuhn, 0.0), (GOOF3, 0.5)] {
        let cfg = config(game, &[DeviationType::Tips], &[DeviationType::Tips], 25);
        let rows = run_fixed_regime(&cfg).unwrap();
        for t in 1..=25 {
            let seats: Vec<f64> = rows.iter().filter(|r| r.round == t).map(|r| r.payoff).collect();
            assert_eq!(seats.len(), 2);
            assert!(((seats[0] + seats[1]) / 2.0 - center).abs() < 1e-12, "{game} round {t}");
        }
    }
}

#[test]
fn identical_learners_split_symmetric_goofspiel_evenly() {
    let cfg = config(GOOF3, &[DeviationType::Csps], &[DeviationType::Csps], 30);
    for r in run_simultaneous_regime(&cfg).unwrap() {
        assert!((r.payoff - 0.5).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn swapped_pairings_conserve_the_payoff_sum() {
    let kinds = [DeviationType::BlindCf, DeviationType::Behavioral];
    for (game, total) in [(GameSpec::Kuhn, 0.0), (GOOF3, 1.0)] {
        let rows = run_simultaneous_regime(&config(game, &kinds, &kinds, 15)).unwrap();
        let mut by_key: BTreeMap<(String, String, usize, usize), f64> = BTreeMap::new();
        for r in &rows {
            by_key.insert((r.variant.token().into(), r.opponent.token().into(), r.seat, r.round), r.payoff);
        }
        for r in rows.iter().filter(|r| r.seat == 0) {
            let other = by_key[&(r.opponent.token().into(), r.variant.token().into(), 1, r.round)];
            assert!((r.payoff + other - total).abs() < 1e-12);
        }
    }
}

#[test]
fn three_player_goofspiel_runs_with_a_solo_seat() {
    let game = GameSpec::Goofspiel { ranks: 3, order: PointOrder::Ascending, players: 3 };
    let rows = run_simultaneous_regime(&config(game, &[DeviationType::BlindCf], &[DeviationType::Bps], 4)).unwrap();
    assert_eq!(rows.len(), 3 * 4);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.payoff)));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let kinds = [DeviationType::InformedCf, DeviationType::Tips];
    let mut files = Vec::new();
    for (k, threads) in [Some(1), Some(1), Some(3)].into_iter().enumerate() {
        let cfg = ExperimentConfig { threads, ..config(GOOF3, &kinds, &kinds, 40) };
        let path = dir.path().join(format!("{k}.csv"));
        write_csv(&path, &run(&cfg).unwrap()).unwrap();
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
}

#[test]
fn summary_matches_hand_aggregation_of_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let kinds = [DeviationType::BlindAction, DeviationType::Cfps, DeviationType::Behavioral];
    let rows = run(&config(GOOF3, &kinds, &kinds, 12)).unwrap();
    let path = dir.path().join("r.csv");
    write_csv(&path, &rows).unwrap();

    // Split the text by hand rather than going through the csv crate.
    let text = fs::read_to_string(&path).unwrap();
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.rsplitn(8, ',').collect();
        // rsplitn keeps the quoted game name (which contains commas) in the last piece.
        let (payoff, variant) = (fields[2].parse::<f64>().unwrap(), fields[5]);
        let e = sums.entry(variant.to_string()).or_default();
        e.0 += payoff;
        e.1 += 1;
    }
    let summary = summarize(&read_csv(&path).unwrap());
    assert_eq!(summary.len(), 3);
    for s in summary {
        let (total, n) = sums[s.variant.token()];
        assert_eq!(s.rows, n);
        assert!((s.mean_payoff - total / n as f64).abs() < 1e-12);
    }
    assert_eq!(read_csv(&path).unwrap(), rows);
}

#[test]
fn plots_cover_rounds_and_time_when_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        record_time: true,
        ..config(GameSpec::Kuhn, &[DeviationType::BlindCf], &[DeviationType::Tips], 10)
    };
    let rows = run(&cfg).unwrap();
    assert!(rows.iter().all(|r| r.elapsed_ns.is_some()));
    let files = write_plots(dir.path(), &rows).unwrap();
    assert_eq!(files.len(), 2);
    for f in files {
        let svg = fs::read_to_string(f).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("cf"));
    }
}

fn efr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_efr"))
}

#[test]
fn cli_run_reads_the_config_file_and_lets_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    let out = dir.path().join("out");
    fs::write(&conf, format!("game = kuhn\ndevtype = cf\nopponents = cf\nrounds = 50\nout = {}\n", out.display()))
        .unwrap();
    let status = efr().args(["run", "--config"]).arg(&conf).args(["--rounds", "6"]).status().unwrap();
    assert!(status.success());
    let rows = read_csv(&out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 2 * 6);
    assert!(out.join("summary.csv").exists() && out.join("curves_round.svg").exists());
    assert!(fs::read_to_string(out.join("config.txt")).unwrap().contains("rounds = 6"));
}

#[test]
fn cli_audit_and_counterexample() {
    let big = efr().args(["audit", "--game", "goofspiel", "--ranks", "5"]).output().unwrap();
    assert_eq!(big.status.code(), Some(1));
    // Ten rounds are too few for the decay check, so the audit must fail with 2.
    let short = efr().args(["audit", "--game", "kuhn", "--rounds", "10", "--pairs", "2"]).output().unwrap();
    assert_eq!(short.status.code(), Some(2));
    let table = String::from_utf8(short.stdout).unwrap();
    assert!(table.contains("PASS  memory-state decomposition"));

    let out = efr().args(["counterexample", "--learner", "rm_pp", "--rounds", "400"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("Q^t >= t/4 at every round"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kuhn.efg");
    assert!(efr().args(["export", "--game", "kuhn", "--out"]).arg(&path).status().unwrap().success());
    let game = efr::game::text::from_text(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(game.terminals().len(), 30);
}

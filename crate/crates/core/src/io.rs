//! Reading event sequences and writing rules and run statistics.
//!
//! Two input encodings are supported. In the plain format line `k` holds the
//! whitespace-separated events of timestamp `k`; blank lines are empty slots.
//! The SPMF-compatible format uses `-1` to close an itemset and `-2` to close a
//! line; every non-empty itemset becomes the next timestamp.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::miner::MiningStats;
use crate::model::{EpisodeRule, EventId, EventSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DatasetFormat {
    #[default]
    Plain,
    SpmfCompat,
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(DatasetFormat::Plain),
            "spmf" | "spmf-compat" => Ok(DatasetFormat::SpmfCompat),
            other => Err(Error::Config(format!("unknown dataset format {other:?}"))),
        }
    }
}

pub fn load(path: impl AsRef<Path>, format: DatasetFormat) -> Result<EventSequence> {
    match format {
        DatasetFormat::Plain => load_plain(path),
        DatasetFormat::SpmfCompat => load_spmf_compat(path),
    }
}

pub fn load_plain(path: impl AsRef<Path>) -> Result<EventSequence> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_plain(&text, path)
}

pub fn load_spmf_compat(path: impl AsRef<Path>) -> Result<EventSequence> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spmf_compat(&text, path)
}

/// `origin` is only used in error messages.
pub fn parse_plain(text: &str, origin: &Path) -> Result<EventSequence> {
    let mut slots = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let slot = line
            .split_whitespace()
            .map(|tok| parse_event(tok, origin, k + 1))
            .collect::<Result<Vec<_>>>()?;
        slots.push(slot);
    }
    if slots.is_empty() {
        return Err(Error::EmptySequence(origin.to_path_buf()));
    }
    Ok(EventSequence::new(slots))
}

pub fn parse_spmf_compat(text: &str, origin: &Path) -> Result<EventSequence> {
    let mut slots = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let mut run = Vec::new();
        for tok in line.split_whitespace() {
            if tok == "-1" || tok == "-2" {
                if !run.is_empty() {
                    slots.push(std::mem::take(&mut run));
                }
            } else {
                run.push(parse_event(tok, origin, k + 1)?);
            }
        }
        if !run.is_empty() {
            slots.push(run);
        }
    }
    if slots.is_empty() {
        return Err(Error::EmptySequence(origin.to_path_buf()));
    }
    Ok(EventSequence::new(slots))
}

fn parse_event(tok: &str, origin: &Path, line: usize) -> Result<EventId> {
    tok.parse::<u32>().map(EventId).map_err(|_| Error::Parse {
        path: origin.to_path_buf(),
        line,
        token: tok.to_string(),
    })
}

/// Plain-format text for `seq`, one line per timestamp.
pub fn format_plain(seq: &EventSequence) -> String {
    let mut out = String::new();
    for (_, slot) in seq.slots() {
        let line: Vec<String> = slot.iter().map(|e| e.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_plain(seq: &EventSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_plain(seq)).map_err(|e| Error::io(path, e))
}

/// One line per rule, LF-terminated:
/// `<a1,...> -D-> (<c1,...>,<g1,...>) #SUP: s #CONF: c.cccc`
pub fn format_rules(rules: &[EpisodeRule]) -> String {
    let mut out = String::new();
    for rule in rules {
        out.push_str(&rule.to_string());
        out.push('\n');
    }
    out
}

pub fn write_rules(rules: &[EpisodeRule], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for rule in rules {
        writeln!(w, "{rule}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_stats(stats: &MiningStats, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut json = serde_json::to_string_pretty(stats).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    json.push('\n');
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn read_stats(path: impl AsRef<Path>) -> Result<MiningStats> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Episode, FixedGapEpisode};
    use std::path::PathBuf;

    fn origin() -> PathBuf {
        PathBuf::from("mem")
    }

    fn slot(seq: &EventSequence, t: u32) -> Vec<u32> {
        seq.slot(t).iter().map(|e| e.0).collect()
    }

    #[test]
    fn plain_example_fixture() {
        let text = "4\n\n1 4\n1 2\n4\n1 2\n2 3 5\n5\n5\n1 6\n1 4\n6\n";
        let seq = parse_plain(text, &origin()).unwrap();
        assert_eq!(seq.begin_time(), 1);
        assert_eq!(seq.end_time(), 12);
        assert_eq!(slot(&seq, 1), vec![4]);
        assert!(slot(&seq, 2).is_empty());
        assert_eq!(slot(&seq, 7), vec![2, 3, 5]);
        assert_eq!(slot(&seq, 12), vec![6]);
    }

    #[test]
    fn plain_single_line_and_duplicates() {
        let seq = parse_plain("7\n", &origin()).unwrap();
        assert_eq!(seq.end_time(), 1);
        assert_eq!(slot(&seq, 1), vec![7]);
        let seq = parse_plain("3 3 3\n", &origin()).unwrap();
        assert_eq!(slot(&seq, 1), vec![3]);
    }

    #[test]
    fn plain_errors() {
        match parse_plain("1\n2 x\n", &origin()) {
            Err(Error::Parse { line, token, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(token, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_plain("1 -1\n", &origin()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_plain("", &origin()),
            Err(Error::EmptySequence(_))
        ));
    }

    #[test]
    fn spmf_separators() {
        let seq = parse_spmf_compat("1 3 -1 4 -2\n", &origin()).unwrap();
        assert_eq!(seq.end_time(), 2);
        assert_eq!(slot(&seq, 1), vec![1, 3]);
        assert_eq!(slot(&seq, 2), vec![4]);

        let seq = parse_spmf_compat("5 -1 -1 6 -2\n", &origin()).unwrap();
        assert_eq!(seq.end_time(), 2);
        assert_eq!(slot(&seq, 1), vec![5]);
        assert_eq!(slot(&seq, 2), vec![6]);

        assert!(matches!(
            parse_spmf_compat("-1 -2\n", &origin()),
            Err(Error::EmptySequence(_))
        ));
        assert!(matches!(
            parse_spmf_compat("1 -1\n2 y -2\n", &origin()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn spmf_slot_count_matches_reference_parser() {
        // Kosarak-style lines: itemsets of varying width, lines of varying length.
        let mut text = String::new();
        let mut state = 17u64;
        for _ in 0..50 {
            let sets = (state % 6) as usize + 1;
            for _ in 0..sets {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let width = (state >> 60) as usize % 4 + 1;
                for w in 0..width {
                    text.push_str(&format!("{} ", (state >> (w * 8)) % 100));
                }
                text.push_str("-1 ");
            }
            text.push_str("-2\n");
        }
        // Independent count: number of "-1" tokens that close a non-empty run.
        let reference = text
            .lines()
            .flat_map(|l| l.split(" -1").map(str::trim).collect::<Vec<_>>())
            .filter(|chunk| !chunk.is_empty() && *chunk != "-2")
            .count();
        let seq = parse_spmf_compat(&text, &origin()).unwrap();
        assert_eq!(seq.len(), reference);
    }

    #[test]
    fn rule_line_format() {
        // Confidence is support / antecedent support, so 0.18 needs e.g. 9 / 50.
        let rule = EpisodeRule {
            antecedent: Episode::of(&[3076, 3040]),
            elapse: 1,
            consequent: FixedGapEpisode::new(vec![EventId(3005), EventId(3014)], vec![2]).unwrap(),
            support: 9,
            antecedent_support: 50,
        };
        assert_eq!(
            format_rules(&[rule]),
            "<3076,3040> -1-> (<3005,3014>,<2>) #SUP: 9 #CONF: 0.1800\n"
        );

        let minimal = EpisodeRule {
            antecedent: Episode::of(&[1]),
            elapse: 2,
            consequent: FixedGapEpisode::new(vec![EventId(4)], vec![]).unwrap(),
            support: 1,
            antecedent_support: 1,
        };
        assert_eq!(
            format_rules(&[minimal]),
            "<1> -2-> (<4>,<>) #SUP: 1 #CONF: 1.0000\n"
        );
        assert_eq!(format_rules(&[]), "");
    }

    #[test]
    fn write_rules_empty_list_gives_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rules.txt");
        write_rules(&[], &path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"");
    }

    #[test]
    fn write_rules_reports_path_on_failure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("rules.txt");
        let err = write_rules(&[], &path).unwrap_err();
        assert!(err.is_io());
        assert!(err.to_string().contains("missing"));
    }

    #[test]
    fn stats_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stats.json");
        let stats = MiningStats {
            candidates_emitted: 10,
            rules_final: 2,
            ..MiningStats::default()
        };
        write_stats(&stats, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"candidates\": 10"), "{text}");
        assert!(text.contains("\"rules\": 2"), "{text}");
        assert_eq!(read_stats(&path).unwrap(), stats);

        write_stats(&MiningStats::default(), &path).unwrap();
        let value: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        for (key, v) in value.as_object().unwrap() {
            if let Some(n) = v.as_u64() {
                assert_eq!(n, 0, "{key}");
            }
        }
    }

    #[test]
    fn plain_round_trip() {
        let seq = EventSequence::from_ids([vec![4], vec![], vec![1, 4], vec![9, 2, 2]]);
        let back = parse_plain(&format_plain(&seq), &origin()).unwrap();
        assert_eq!(back, seq);
    }
}

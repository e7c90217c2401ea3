use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use super::{CorpusError, Origin, PairRecord, RaterVotes, Split};

/// Column layout of an input corpus file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// `id, sentence1, sentence2, label` (TSV, optional header).
    Paws,
    /// `quality, id1, id2, string1, string2` (TSV, one header line).
    Mrpc,
    /// `id, qid1, qid2, question1, question2, is_duplicate` (TSV or quoted CSV).
    Qqp { csv: bool },
    /// `sentence1, sentence2, "(yes, total)"` or `sentence1, sentence2, pwi`.
    TwitterUrl,
    /// Canonical JSONL.
    Generic,
}

impl Format {
    pub fn origin(self) -> Origin {
        match self {
            Format::Paws => Origin::Paws,
            Format::Mrpc => Origin::Mrpc,
            Format::Qqp { .. } => Origin::Qqp,
            Format::TwitterUrl => Origin::TwitterUrl,
            Format::Generic => Origin::Generic,
        }
    }

    /// Resolves a format name; QQP picks CSV when the path ends in `.csv`.
    pub fn resolve(name: &str, path: &Path) -> Result<Self, CorpusError> {
        let mut f: Format = name.parse()?;
        if let Format::Qqp { csv } = &mut f {
            *csv = path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        }
        Ok(f)
    }
}

impl FromStr for Format {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "paws" => Ok(Format::Paws),
            "mrpc" => Ok(Format::Mrpc),
            "qqp" => Ok(Format::Qqp { csv: false }),
            "qqp-csv" => Ok(Format::Qqp { csv: true }),
            "twitter-url" | "twitter" => Ok(Format::TwitterUrl),
            "generic" | "jsonl" => Ok(Format::Generic),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

/// Records that passed ingestion plus counts of rows that did not.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ingested {
    pub records: Vec<PairRecord>,
    /// Rows labeled as non-paraphrases by the corpus itself.
    pub skipped_negative: usize,
    pub skipped_malformed: usize,
    pub skipped_duplicate: usize,
}

pub fn ingest(path: &Path, format: Format, split: Split) -> Result<Ingested, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    ingest_reader(file, format, split).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::io(path, source),
        other => other,
    })
}

enum Row {
    Keep(PairRecord),
    Negative,
    Malformed,
    Header,
}

pub fn ingest_reader<R: Read>(
    reader: R,
    format: Format,
    split: Split,
) -> Result<Ingested, CorpusError> {
    let rows: Vec<Vec<String>> = match format {
        Format::Qqp { csv: true } => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .from_reader(reader);
            let mut rows = Vec::new();
            for rec in rdr.records() {
                match rec {
                    Ok(r) => rows.push(r.iter().map(str::to_string).collect()),
                    Err(e) if e.is_io_error() => {
                        return Err(CorpusError::Io {
                            path: Default::default(),
                            source: std::io::Error::other(e),
                        })
                    }
                    Err(_) => rows.push(Vec::new()),
                }
            }
            rows
        }
        _ => {
            let mut rows = Vec::new();
            for line in BufReader::new(reader).lines() {
                let line = line.map_err(|e| CorpusError::Io {
                    path: Default::default(),
                    source: e,
                })?;
                let line = line.trim_end_matches('\r');
                if line.trim().is_empty() {
                    continue;
                }
                if format == Format::Generic {
                    rows.push(vec![line.to_string()]);
                } else {
                    rows.push(line.split('\t').map(str::to_string).collect());
                }
            }
            rows
        }
    };

    let mut out = Ingested::default();
    let mut seen = HashSet::new();
    for (i, row) in rows.iter().enumerate() {
        let parsed = match format {
            Format::Paws => paws_row(row, i),
            Format::Mrpc => mrpc_row(row, i),
            Format::Qqp { .. } => qqp_row(row, i),
            Format::TwitterUrl => twitter_row(row, i),
            Format::Generic => generic_row(&row[0]),
        };
        match parsed {
            Row::Keep(mut r) => {
                if format != Format::Generic {
                    r.origin = format.origin();
                    r.split = split;
                    r.id = match split {
                        Split::Unsplit => format!("{}-{}", r.origin, r.id),
                        s => format!("{}-{}-{}", r.origin, s, r.id),
                    };
                }
                if r.validate().is_err() {
                    out.skipped_malformed += 1;
                } else if !seen.insert(r.id.clone()) {
                    out.skipped_duplicate += 1;
                } else {
                    out.records.push(r);
                }
            }
            Row::Negative => out.skipped_negative += 1,
            Row::Malformed => out.skipped_malformed += 1,
            Row::Header => {}
        }
    }
    Ok(out)
}

fn flag(value: &str) -> Option<bool> {
    match value.trim() {
        "1" => Some(true),
        "0" => Some(false),
        _ => None,
    }
}

fn pair(id: String, source: &str, target: &str, positive: Option<bool>) -> Row {
    match positive {
        Some(true) => Row::Keep(PairRecord::new(id, source.trim(), target.trim())),
        Some(false) => Row::Negative,
        None => Row::Malformed,
    }
}

fn paws_row(row: &[String], index: usize) -> Row {
    match row {
        [id, ..] if index == 0 && id.trim() == "id" => Row::Header,
        [id, s1, s2, label] => pair(id.trim().to_string(), s1, s2, flag(label)),
        _ => Row::Malformed,
    }
}

fn mrpc_row(row: &[String], index: usize) -> Row {
    if index == 0 {
        return Row::Header;
    }
    match row {
        [quality, id1, id2, s1, s2] => pair(
            format!("{}-{}", id1.trim(), id2.trim()),
            s1,
            s2,
            flag(quality),
        ),
        _ => Row::Malformed,
    }
}

fn qqp_row(row: &[String], index: usize) -> Row {
    match row {
        [id, ..] if index == 0 && id.trim() == "id" => Row::Header,
        [id, _qid1, _qid2, q1, q2, dup] => pair(id.trim().to_string(), q1, q2, flag(dup)),
        _ => Row::Malformed,
    }
}

fn parse_votes(field: &str) -> Option<RaterVotes> {
    let inner = field.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (yes, total) = inner.split_once(',')?;
    Some(RaterVotes {
        yes: yes.trim().parse().ok()?,
        total: total.trim().parse().ok()?,
    })
}

fn twitter_row(row: &[String], index: usize) -> Row {
    let [s1, s2, score, ..] = row else {
        return Row::Malformed;
    };
    let mut r = PairRecord::new((index + 1).to_string(), s1.trim(), s2.trim());
    if score.trim_start().starts_with('(') {
        match parse_votes(score) {
            Some(v) => r.rater_votes = Some(v),
            None => return Row::Malformed,
        }
    } else {
        match score.trim().parse::<f64>() {
            Ok(p) => r.pwi = Some(p),
            Err(_) => return Row::Malformed,
        }
    }
    Row::Keep(r)
}

fn generic_row(line: &str) -> Row {
    match serde_json::from_str::<PairRecord>(line) {
        Ok(r) => Row::Keep(r),
        Err(_) => Row::Malformed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str, format: Format) -> Ingested {
        ingest_reader(text.as_bytes(), format, Split::Unsplit).unwrap()
    }

    #[test]
    fn paws_keeps_positive_rows() {
        let text = "id\tsentence1\tsentence2\tlabel\n\
                    1\tA cat sat .\tThe cat sat .\t1\n\
                    2\tfoo\tbar\t0\n\
                    3\tbroken row\n\
                    4\tx\ty\tmaybe\n";
        let out = run(text, Format::Paws);
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].id, "paws-1");
        assert_eq!(out.records[0].origin, Origin::Paws);
        assert_eq!((out.skipped_negative, out.skipped_malformed), (1, 2));
    }

    #[test]
    fn presplit_tags_are_applied() {
        let out = ingest_reader("1\ta\tb\t1\n".as_bytes(), Format::Paws, Split::Test).unwrap();
        assert_eq!(out.records[0].split, Split::Test);
        assert_eq!(out.records[0].id, "paws-test-1");
    }

    #[test]
    fn mrpc_skips_header() {
        let text = "\u{feff}Quality\t#1 ID\t#2 ID\t#1 String\t#2 String\n\
                    1\t702876\t702977\tAmrozi accused his brother .\tReferring to him , Amrozi accused his brother .\n\
                    0\t2108705\t2108831\tYucaipa owned Dominick 's .\tYucaipa bought Dominick 's .\n";
        let out = run(text, Format::Mrpc);
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].id, "mrpc-702876-702977");
        assert_eq!(out.skipped_negative, 1);
    }

    #[test]
    fn qqp_tsv_and_csv() {
        let tsv = "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n\
                   0\t1\t2\tHow do I learn Rust?\tWhat is the best way to learn Rust?\t1\n\
                   1\t3\t4\tWhy?\tWhere?\t0\n";
        let out = run(tsv, Format::Qqp { csv: false });
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].origin, Origin::Qqp);

        let csv = "\"id\",\"qid1\",\"qid2\",\"question1\",\"question2\",\"is_duplicate\"\n\
                   \"7\",\"1\",\"2\",\"Is it \"\"fast\"\", really?\",\"Is it quick,\nreally?\",\"1\"\n";
        let out = run(csv, Format::Qqp { csv: true });
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].source, "Is it \"fast\", really?");
        assert_eq!(out.records[0].target, "Is it quick,\nreally?");
    }

    #[test]
    fn twitter_votes_and_pwi() {
        let text = "we won the game\twe won\t(4, 6)\thttp://t.co/x\n\
                    so happy\tvery happy\t0.8312\n\
                    bad\trow\t(x, 6)\n";
        let out = run(text, Format::TwitterUrl);
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.records[0].rater_votes, Some(RaterVotes { yes: 4, total: 6 }));
        assert_eq!(out.records[1].pwi, Some(0.8312));
        assert_eq!(out.skipped_malformed, 1);

        let out = run("a\tb\t1.7\n", Format::TwitterUrl);
        assert_eq!(out.skipped_malformed, 1, "pwi outside [0, 1]");
    }

    #[test]
    fn generic_counts_bad_lines_and_duplicates() {
        let good = serde_json::to_string(&PairRecord::new("g1", "a", "b")).unwrap();
        let text = format!("{good}\nnot json\n{good}\n");
        let out = run(&text, Format::Generic);
        assert_eq!(out.records.len(), 1);
        assert_eq!((out.skipped_malformed, out.skipped_duplicate), (1, 1));
    }

    #[test]
    fn format_names() {
        assert!(matches!("bogus".parse::<Format>(), Err(CorpusError::UnknownFormat(_))));
        assert_eq!(
            Format::resolve("qqp", Path::new("train.CSV")).unwrap(),
            Format::Qqp { csv: true }
        );
        assert!(matches!(
            ingest(Path::new("/nonexistent/file.tsv"), Format::Paws, Split::Train),
            Err(CorpusError::Io { .. })
        ));
    }
}

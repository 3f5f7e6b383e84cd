//! Corpus ingestion (FASTA or one sequence per line) and construction of a
//! variation model from the differences a corpus shows against a reference.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use crate::alphabet::{Alphabet, Sequence};
use crate::error::{Error, Result};
use crate::events::extract_events;
use crate::model::VariationModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub sequence: Sequence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    alphabet: Alphabet,
    records: Vec<Record>,
}

impl Corpus {
    /// Checks that identifiers are unique and every sequence is over `alphabet`.
    pub fn new(alphabet: Alphabet, records: Vec<Record>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateRecord(r.id.clone()));
            }
            alphabet.check(&r.sequence)?;
        }
        Ok(Corpus { alphabet, records })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// FASTA rendering, 70 symbols per line.
    pub fn to_fasta(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push('>');
            out.push_str(&r.id);
            out.push('\n');
            let text = self.alphabet.render(&r.sequence);
            let chars: Vec<char> = text.chars().collect();
            for line in chars.chunks(70) {
                out.extend(line);
                out.push('\n');
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InputFormat {
    /// FASTA when the first non-blank line starts with `>`, lines otherwise.
    #[default]
    Auto,
    Fasta,
    Lines,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    pub format: InputFormat,
    /// Drop records containing symbols outside the alphabet instead of
    /// failing.
    pub skip_invalid: bool,
}

pub fn load_sequences(path: &Path, alphabet: &Alphabet, options: LoadOptions) -> Result<Corpus> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sequences(&text, &path.display().to_string(), alphabet, options)
}

/// Parses corpus text. Symbols are case-folded onto the alphabet and
/// whitespace inside sequence lines is ignored.
pub fn parse_sequences(
    text: &str,
    source: &str,
    alphabet: &Alphabet,
    options: LoadOptions,
) -> Result<Corpus> {
    let format = match options.format {
        InputFormat::Auto => match text.lines().map(str::trim).find(|l| !l.is_empty()) {
            Some(l) if l.starts_with('>') => InputFormat::Fasta,
            _ => InputFormat::Lines,
        },
        f => f,
    };
    let raw = match format {
        InputFormat::Fasta => split_fasta(text, source)?,
        _ => split_lines(text),
    };
    if raw.is_empty() {
        return Err(Error::Parse {
            path: source.to_string(),
            line: 1,
            message: "no sequences found".into(),
        });
    }
    let mut seen = HashSet::with_capacity(raw.len());
    let mut records = Vec::with_capacity(raw.len());
    for r in raw {
        if !seen.insert(r.id.clone()) {
            return Err(Error::Parse {
                path: source.to_string(),
                line: r.line,
                message: format!("duplicate record identifier {:?}", r.id),
            });
        }
        match encode(alphabet, &r) {
            Ok(sequence) => records.push(Record { id: r.id, sequence }),
            Err(_) if options.skip_invalid => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Corpus {
        alphabet: alphabet.clone(),
        records,
    })
}

/// Reads a reference file: exactly one record.
pub fn load_reference(path: &Path, alphabet: &Alphabet) -> Result<Sequence> {
    let corpus = load_sequences(path, alphabet, LoadOptions::default())?;
    match corpus.records.len() {
        1 => Ok(corpus
            .records
            .into_iter()
            .next()
            .map(|r| r.sequence)
            .unwrap_or_default()),
        n => Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("expected a single reference record, found {n}"),
        }),
    }
}

struct RawRecord {
    id: String,
    /// Line of the header (or of the sequence in line files).
    line: usize,
    /// Sequence text with the line each chunk came from.
    chunks: Vec<(usize, String)>,
}

fn split_fasta(text: &str, source: &str) -> Result<Vec<RawRecord>> {
    let mut out: Vec<RawRecord> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        let line = line.trim();
        if let Some(header) = line.strip_prefix('>') {
            let id = header.split_whitespace().next().unwrap_or("");
            if id.is_empty() {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line: no,
                    message: "header without an identifier".into(),
                });
            }
            out.push(RawRecord {
                id: id.to_string(),
                line: no,
                chunks: Vec::new(),
            });
        } else if !line.is_empty() {
            match out.last_mut() {
                Some(r) => r.chunks.push((no, line.to_string())),
                None => {
                    return Err(Error::Parse {
                        path: source.to_string(),
                        line: no,
                        message: "sequence data before the first '>' header".into(),
                    })
                }
            }
        }
    }
    Ok(out)
}

fn split_lines(text: &str) -> Vec<RawRecord> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .enumerate()
        .map(|(k, (i, l))| RawRecord {
            id: format!("seq{}", k + 1),
            line: i + 1,
            chunks: vec![(i + 1, l.to_string())],
        })
        .collect()
}

fn encode(alphabet: &Alphabet, r: &RawRecord) -> Result<Sequence> {
    let mut colors = Vec::new();
    for (line, chunk) in &r.chunks {
        for symbol in chunk.chars().filter(|c| !c.is_whitespace()) {
            match alphabet.color_folded(symbol) {
                Some(c) => colors.push(c),
                None => {
                    return Err(Error::InvalidRecord {
                        record: r.id.clone(),
                        line: *line,
                        symbol,
                    })
                }
            }
        }
    }
    Ok(Sequence::new(colors))
}

/// A variation model plus the gaps that break the separator precondition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelBuild {
    pub model: VariationModel,
    /// Insertion gaps flanked on both sides by deletion candidates.
    pub separator_violations: Vec<usize>,
}

/// Union of the sites where corpus sequences differ from `reference`:
/// substituted and deleted positions become substitution/deletion candidates,
/// insertion gaps become insertion sites.
pub fn build_variation_model(corpus: &Corpus, reference: &Sequence) -> Result<ModelBuild> {
    if corpus.is_empty() {
        return Err(Error::InvalidModel(
            "cannot build a model from an empty corpus".into(),
        ));
    }
    let mut positions = BTreeSet::new();
    let mut gaps = BTreeSet::new();
    for r in &corpus.records {
        let events = extract_events(reference, &r.sequence);
        positions.extend(events.deletions);
        gaps.extend(events.insertions.into_keys());
    }
    let model = VariationModel::new(
        reference.clone(),
        positions.into_iter().collect(),
        gaps.into_iter().collect(),
    )?;
    let separator_violations = model.separator_violations();
    Ok(ModelBuild {
        model,
        separator_violations,
    })
}

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ClassSet, Corpus, CorpusError, Document};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// Guesses the format from a file extension, defaulting to JSON Lines.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown corpus format `{other}` (expected jsonl or csv)")),
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct JsonRecord {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    meta: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize, Serialize)]
struct CsvRecord {
    id: String,
    text: String,
    label: Option<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a labelled corpus, preserving record order. The corpus is named after the file stem.
pub fn ingest(path: &Path, format: CorpusFormat, class_set: &ClassSet) -> Result<Corpus, CorpusError> {
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("corpus")
        .to_owned();
    let file = File::open(path).map_err(io_err(path))?;
    let records = match format {
        CorpusFormat::Jsonl => read_jsonl_records(BufReader::new(file), path)?,
        CorpusFormat::Csv => read_csv_records(file)?,
    };

    let mut seen = HashSet::with_capacity(records.len());
    let mut documents = Vec::with_capacity(records.len());
    for (line, rec) in records {
        if !seen.insert(rec.id.clone()) {
            return Err(CorpusError::DuplicateId { line, id: rec.id });
        }
        if rec.text.trim().is_empty() {
            return Err(CorpusError::EmptyText { line, id: rec.id });
        }
        let label = rec.label.filter(|l| !l.is_empty());
        if let Some(l) = &label {
            if !class_set.contains(l) {
                return Err(CorpusError::UnknownClass { line, value: l.clone() });
            }
        }
        documents.push(Document {
            id: rec.id,
            text: rec.text,
            gold_label: label,
            meta: rec.meta,
        });
    }
    Ok(Corpus::from_validated(name, class_set.clone(), documents))
}

/// Shorthand for `ingest(path, CorpusFormat::Jsonl, class_set)`.
pub fn read_corpus_jsonl(path: &Path, class_set: &ClassSet) -> Result<Corpus, CorpusError> {
    ingest(path, CorpusFormat::Jsonl, class_set)
}

fn read_jsonl_records(reader: impl BufRead, path: &Path) -> Result<Vec<(usize, JsonRecord)>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((line_no, rec));
    }
    Ok(out)
}

fn read_csv_records(file: File) -> Result<Vec<(usize, JsonRecord)>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader.headers().map_err(|e| CorpusError::Malformed {
        line: 1,
        message: e.to_string(),
    })?;
    let expected = ["id", "text", "label"];
    if headers.len() < 2 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(CorpusError::Malformed {
            line: 1,
            message: "expected header `id,text,label`".into(),
        });
    }
    let mut out = Vec::new();
    for result in reader.deserialize::<CsvRecord>() {
        let rec = result.map_err(|e| CorpusError::Malformed {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = out.len() + 2;
        out.push((
            line,
            JsonRecord {
                id: rec.id,
                text: rec.text,
                label: rec.label,
                meta: BTreeMap::new(),
            },
        ));
    }
    Ok(out)
}

/// Writes the corpus as JSON Lines (`id`, `text`, `label`, optional `meta`).
pub fn write_corpus_jsonl(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for d in corpus.documents() {
        let rec = JsonRecord {
            id: d.id.clone(),
            text: d.text.clone(),
            label: d.gold_label.clone(),
            meta: d.meta.clone(),
        };
        let line = serde_json::to_string(&rec).map_err(|e| CorpusError::Serialize(e.to_string()))?;
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_corpus_csv(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CorpusError::Serialize(e.to_string()))?;
    for d in corpus.documents() {
        w.serialize(CsvRecord {
            id: d.id.clone(),
            text: d.text.clone(),
            label: d.gold_label.clone(),
        })
        .map_err(|e| CorpusError::Serialize(e.to_string()))?;
    }
    w.flush().map_err(io_err(path))
}

//! Corpora: tables, taxonomies (structured text) and plain text, normalized
//! into documents made of (attribute, text) fields.

mod bucket;
mod stopwords;
mod text;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bucket::{bucket_label, bucketize, quantile_sorted, Bins, BucketingConfig, WidthRule};
pub use text::{
    canonical_number, is_numeric_token, is_stop_word, normalize_phrase, parse_number, preprocess, stem, tokenize,
    Preprocessor, Term,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    Table,
    #[serde(rename = "structured")]
    StructuredText,
    #[serde(rename = "text")]
    PlainText,
}

impl std::str::FromStr for CorpusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(CorpusKind::Table),
            "structured" => Ok(CorpusKind::StructuredText),
            "text" => Ok(CorpusKind::PlainText),
            other => Err(Error::Config(format!(
                "unknown corpus kind `{other}` (expected table, structured or text)"
            ))),
        }
    }
}

impl std::fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorpusKind::Table => "table",
            CorpusKind::StructuredText => "structured",
            CorpusKind::PlainText => "text",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    /// Column name for table cells, `None` for text.
    pub attribute: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub fields: Vec<Field>,
    /// Parent taxonomy node; only set in structured-text corpora.
    pub parent_id: Option<String>,
}

impl Document {
    pub fn text(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            fields: vec![Field {
                attribute: None,
                text: text.into(),
            }],
            parent_id: None,
        }
    }

    pub fn row<I, A, T>(id: impl Into<String>, cells: I) -> Self
    where
        I: IntoIterator<Item = (A, T)>,
        A: Into<String>,
        T: Into<String>,
    {
        Document {
            id: id.into(),
            fields: cells
                .into_iter()
                .map(|(a, t)| Field {
                    attribute: Some(a.into()),
                    text: t.into(),
                })
                .collect(),
            parent_id: None,
        }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parent_id = Some(parent.into());
        self
    }

    /// All field texts joined by a space.
    pub fn joined_text(&self) -> String {
        self.fields
            .iter()
            .map(|f| f.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A validated set of documents of one kind.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub name: String,
    pub kind: CorpusKind,
    documents: Vec<Document>,
    index: HashMap<String, usize>,
}

impl Corpus {
    /// Validates id uniqueness, parent references and acyclicity.
    pub fn new(name: impl Into<String>, kind: CorpusKind, documents: Vec<Document>) -> Result<Self> {
        let name = name.into();
        let mut index = HashMap::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            if index.insert(doc.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        let mut documents = documents;
        for doc in &mut documents {
            if kind != CorpusKind::StructuredText {
                doc.parent_id = None;
            }
            if let Some(parent) = &doc.parent_id {
                if !index.contains_key(parent) {
                    return Err(Error::MissingParent {
                        id: doc.id.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        let corpus = Corpus {
            name,
            kind,
            documents,
            index,
        };
        for doc in &corpus.documents {
            corpus.ancestry(&doc.id)?;
        }
        Ok(corpus)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.index.get(id).map(|&i| &self.documents[i])
    }

    /// Ids from the root down to `id`.
    pub fn ancestry(&self, id: &str) -> Result<Vec<String>> {
        let mut chain = Vec::new();
        let mut current = self.get(id).ok_or_else(|| Error::MissingPath(id.to_string()))?;
        loop {
            chain.push(current.id.clone());
            if chain.len() > self.documents.len() {
                return Err(Error::Config(format!("parent cycle through `{id}`")));
            }
            match &current.parent_id {
                Some(p) => current = &self.documents[self.index[p]],
                None => break,
            }
        }
        chain.reverse();
        Ok(chain)
    }

    /// Root-to-node sequence of node texts, used to compare taxonomy matches.
    pub fn taxonomy_path(&self, id: &str) -> Result<Vec<String>> {
        Ok(self
            .ancestry(id)?
            .iter()
            .map(|a| self.get(a).map(Document::joined_text).unwrap_or_default())
            .collect())
    }

    /// Attributes whose non-empty cells all parse as numbers.
    pub fn numeric_attributes(&self) -> BTreeSet<String> {
        if self.kind != CorpusKind::Table {
            return BTreeSet::new();
        }
        let mut seen: HashMap<&str, bool> = HashMap::new();
        for doc in &self.documents {
            for field in &doc.fields {
                let Some(attr) = field.attribute.as_deref() else {
                    continue;
                };
                let numeric = seen.entry(attr).or_insert(true);
                let cell = field.text.trim();
                if !cell.is_empty() && parse_number(cell).is_none() {
                    *numeric = false;
                }
            }
        }
        seen.into_iter()
            .filter(|(attr, numeric)| {
                *numeric
                    && self.documents.iter().any(|d| {
                        d.fields
                            .iter()
                            .any(|f| f.attribute.as_deref() == Some(attr) && !f.text.trim().is_empty())
                    })
            })
            .map(|(a, _)| a.to_string())
            .collect()
    }

    /// The preprocessor this corpus should use (numeric columns detected).
    pub fn preprocessor(&self, max_n: usize) -> Preprocessor {
        Preprocessor::new(max_n).with_numeric_attributes(self.numeric_attributes())
    }

    /// Number of distinct unigram terms.
    pub fn distinct_tokens(&self) -> usize {
        let p = self.preprocessor(1);
        let mut set = HashSet::new();
        for doc in &self.documents {
            for t in p.terms(doc) {
                set.insert(t.surface);
            }
        }
        set.len()
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    id: Option<String>,
    text: String,
    #[serde(default)]
    parent: Option<String>,
}

fn corpus_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into())
}

/// Loads one corpus file: CSV with a header for tables, JSON Lines for text
/// and structured text. Missing ids become `<file stem>:<ordinal>`.
pub fn load_corpus(path: &Path, kind: CorpusKind) -> Result<Corpus> {
    let name = corpus_name(path);
    let documents = match kind {
        CorpusKind::Table => load_csv(path, &name)?,
        CorpusKind::PlainText | CorpusKind::StructuredText => load_jsonl(path, &name, kind)?,
    };
    Corpus::new(name, kind, documents)
}

fn load_csv(path: &Path, name: &str) -> Result<Vec<Document>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let id_col = headers.iter().position(|h| h == "id");
    let mut docs = Vec::new();
    for (ordinal, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(ordinal + 2);
            Error::parse(path, line, e.to_string())
        })?;
        let id = match id_col {
            Some(c) => record[c].trim().to_string(),
            None => format!("{name}:{ordinal}"),
        };
        let fields = headers
            .iter()
            .zip(record.iter())
            .enumerate()
            .filter(|(c, _)| Some(*c) != id_col)
            .map(|(_, (h, v))| Field {
                attribute: Some(h.to_string()),
                text: v.to_string(),
            })
            .collect();
        docs.push(Document {
            id,
            fields,
            parent_id: None,
        });
    }
    Ok(docs)
}

fn load_jsonl(path: &Path, name: &str, kind: CorpusKind) -> Result<Vec<Document>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        let ordinal = docs.len();
        let mut doc = Document::text(rec.id.unwrap_or_else(|| format!("{name}:{ordinal}")), rec.text);
        if kind == CorpusKind::StructuredText {
            doc.parent_id = rec.parent.filter(|p| !p.is_empty());
        }
        docs.push(doc);
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn csv_rows_become_documents() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "movies.csv",
            "title,director\nPulp Fiction,Tarantino\nThe Sixth Sense,Shyamalan\n",
        );
        let c = load_corpus(&p, CorpusKind::Table).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.documents()[0].id, "movies:0");
        assert_eq!(c.documents()[1].fields.len(), 2);
        assert_eq!(c.documents()[1].fields[1].attribute.as_deref(), Some("director"));
    }

    #[test]
    fn csv_id_column_and_bad_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "t.csv", "id,title\nt1,A\nt2,B,extra\n");
        match load_corpus(&p, CorpusKind::Table) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let p = write(&dir, "u.csv", "id,title\nt1,A\nt1,B\n");
        assert!(matches!(load_corpus(&p, CorpusKind::Table), Err(Error::DuplicateId(_))));
    }

    #[test]
    fn taxonomy_missing_parent() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "tax.jsonl",
            "{\"id\":\"a\",\"text\":\"Audit\",\"parent\":null}\n{\"id\":\"b\",\"text\":\"Plan\",\"parent\":\"zz\"}\n",
        );
        assert!(matches!(
            load_corpus(&p, CorpusKind::StructuredText),
            Err(Error::MissingParent { .. })
        ));
    }

    #[test]
    fn jsonl_bad_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "x.jsonl", "{\"id\":\"a\",\"text\":\"ok\"}\n\nnot json\n");
        match load_corpus(&p, CorpusKind::PlainText) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn fifty_claims() {
        let dir = tempfile::tempdir().unwrap();
        let body: String = (0..50)
            .map(|i| format!("{{\"id\":\"c{i}\",\"text\":\"claim number {i}\"}}\n"))
            .collect();
        let c = load_corpus(&write(&dir, "claims.jsonl", &body), CorpusKind::PlainText).unwrap();
        assert_eq!(c.len(), 50);
        assert!(c.documents().iter().all(|d| d.parent_id.is_none()));
    }

    #[test]
    fn taxonomy_paths() {
        let docs = vec![
            Document::text("a", "audit"),
            Document::text("b", "programme").with_parent("a"),
            Document::text("c", "iso 19001").with_parent("b"),
        ];
        let c = Corpus::new("tax", CorpusKind::StructuredText, docs).unwrap();
        assert_eq!(c.ancestry("c").unwrap(), ["a", "b", "c"]);
        assert_eq!(c.taxonomy_path("c").unwrap(), ["audit", "programme", "iso 19001"]);

        let cyclic = vec![
            Document::text("a", "x").with_parent("b"),
            Document::text("b", "y").with_parent("a"),
        ];
        assert!(Corpus::new("t", CorpusKind::StructuredText, cyclic).is_err());
    }

    #[test]
    fn numeric_detection_is_per_attribute() {
        let docs = vec![
            Document::row("r1", [("country", "US"), ("cases", "1,200")]),
            Document::row("r2", [("country", "IT"), ("cases", "")]),
            Document::row("r3", [("country", "FR"), ("cases", "35.5")]),
        ];
        let c = Corpus::new("t", CorpusKind::Table, docs).unwrap();
        assert_eq!(c.numeric_attributes(), ["cases".to_string()].into());
    }
}

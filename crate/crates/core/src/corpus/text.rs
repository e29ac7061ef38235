//! Tokenization and term extraction.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};

use super::stopwords;
use super::Document;

/// A normalized term extracted from a document field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    /// Lowercased tokens joined by `_`.
    pub surface: String,
    /// Number of tokens.
    pub arity: usize,
    pub source_attribute: Option<String>,
}

fn stop_words() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| stopwords::ENGLISH.iter().copied().collect())
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

pub fn is_stop_word(token: &str) -> bool {
    stop_words().contains(token)
}

/// Stems a single lowercase token. Numeric tokens pass through.
pub fn stem(token: &str) -> String {
    if is_numeric_token(token) {
        return token.to_string();
    }
    stemmer().stem(token).into_owned()
}

/// Digits with at most one interior `.`, optionally signed.
pub fn is_numeric_token(token: &str) -> bool {
    let body = token.strip_prefix('-').unwrap_or(token);
    let mut dots = 0;
    let mut digits = 0;
    for c in body.chars() {
        match c {
            '0'..='9' => digits += 1,
            '.' => dots += 1,
            _ => return false,
        }
    }
    digits > 0 && dots <= 1 && !body.starts_with('.') && !body.ends_with('.')
}

/// Canonical spelling of a number, so `5`, `5.0` and `05` share one node.
pub fn canonical_number(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}

/// Parses a table cell as a number, accepting `,` thousands separators.
pub fn parse_number(cell: &str) -> Option<f64> {
    let cleaned: String = cell.trim().chars().filter(|c| *c != ',').collect();
    if cleaned.is_empty() {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Splits on whitespace and punctuation and lowercases. A `.` or `,`
/// between two digits stays inside the token (`3.5`, `1,200` -> `1200`).
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
            continue;
        }
        let between_digits = (c == '.' || c == ',')
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
            && !current.is_empty();
        if between_digits {
            if c == '.' {
                current.push('.');
            }
            continue;
        }
        if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
        .into_iter()
        .map(|t| match t.parse::<f64>() {
            Ok(v) if is_numeric_token(&t) => canonical_number(v),
            _ => t,
        })
        .collect()
}

/// Normalizes a free-standing phrase (e.g. a knowledge-base entity) into the
/// surface a document term would get: single tokens are stemmed, phrases
/// are joined with `_`. Returns `None` for empty input or a lone stop-word.
pub fn normalize_phrase(phrase: &str) -> Option<String> {
    let tokens = tokenize(phrase);
    match tokens.len() {
        0 => None,
        1 if is_stop_word(&tokens[0]) => None,
        1 => Some(stem(&tokens[0])),
        _ => Some(tokens.join("_")),
    }
}

/// Emits every n-gram term of `tokens` for n = 1..=max_n, n-major.
fn ngrams(tokens: &[String], max_n: usize, attribute: Option<&str>, out: &mut Vec<Term>) {
    for n in 1..=max_n.min(tokens.len()) {
        for window in tokens.windows(n) {
            let surface = if n == 1 {
                if is_stop_word(&window[0]) {
                    continue;
                }
                stem(&window[0])
            } else {
                window.join("_")
            };
            out.push(Term {
                surface,
                arity: n,
                source_attribute: attribute.map(str::to_string),
            });
        }
    }
}

/// Term extractor for the documents of one corpus.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub max_n: usize,
    /// Attributes whose cells are all numeric; each cell becomes one number term.
    pub numeric_attributes: BTreeSet<String>,
}

impl Preprocessor {
    pub fn new(max_n: usize) -> Self {
        Preprocessor {
            max_n: max_n.max(1),
            numeric_attributes: BTreeSet::new(),
        }
    }

    pub fn with_numeric_attributes(mut self, attributes: BTreeSet<String>) -> Self {
        self.numeric_attributes = attributes;
        self
    }

    /// All term occurrences of `doc`, in field order. Duplicates are kept so
    /// term frequencies can be computed downstream.
    pub fn terms(&self, doc: &Document) -> Vec<Term> {
        let mut out = Vec::new();
        for field in &doc.fields {
            let attribute = field.attribute.as_deref();
            if let Some(name) = attribute {
                if self.numeric_attributes.contains(name) {
                    if let Some(v) = parse_number(&field.text) {
                        out.push(Term {
                            surface: canonical_number(v),
                            arity: 1,
                            source_attribute: Some(name.to_string()),
                        });
                    }
                    continue;
                }
            }
            let tokens = tokenize(&field.text);
            ngrams(&tokens, self.max_n, attribute, &mut out);
        }
        out
    }
}

/// Terms of `doc` with n-grams up to `max_n` and no numeric attributes.
pub fn preprocess(doc: &Document, max_n: usize) -> Vec<Term> {
    Preprocessor::new(max_n).terms(doc)
}

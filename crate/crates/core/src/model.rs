//! In-memory embedding table and the small policy types shared by all codecs.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Position, Result};
use crate::vocab::Vocab;

/// The four on-disk formats this crate reads and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormatKind {
    GloveText,
    W2VText,
    W2VBinary,
    Leader,
}

impl FormatKind {
    pub const ALL: [FormatKind; 4] = [
        FormatKind::GloveText,
        FormatKind::W2VText,
        FormatKind::W2VBinary,
        FormatKind::Leader,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormatKind::GloveText => "glove",
            FormatKind::W2VText => "w2v-text",
            FormatKind::W2VBinary => "w2v-binary",
            FormatKind::Leader => "leader",
        }
    }

    /// True for the formats that store vectors as decimal text.
    pub fn is_text(self) -> bool {
        matches!(self, FormatKind::GloveText | FormatKind::W2VText)
    }
}

impl fmt::Display for FormatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormatKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(Position::Input, format!("unknown format name {s:?}")))
    }
}

/// How repeated words in a source are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupPolicy {
    /// Keep the earliest (word, vector) occurrence.
    #[default]
    FirstWins,
    /// Keep the latest vector, at the position of the first occurrence.
    LastWins,
    /// Abort on the first repeated word.
    Error,
}

impl FromStr for DedupPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(DedupPolicy::FirstWins),
            "last" => Ok(DedupPolicy::LastWins),
            "error" => Ok(DedupPolicy::Error),
            _ => Err(Error::domain(
                Position::Input,
                format!("unknown dedup policy {s:?}"),
            )),
        }
    }
}

/// Options accepted by every reader.
#[derive(Debug, Clone)]
pub struct ReadOptions {
    pub dedup: DedupPolicy,
    /// When set, only these words are materialized; file order is kept.
    pub filter: Option<HashSet<String>>,
    /// Reject word bytes that are not UTF-8. When false, invalid sequences
    /// are replaced with U+FFFD.
    pub strict_utf8: bool,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            dedup: DedupPolicy::FirstWins,
            filter: None,
            strict_utf8: true,
        }
    }
}

impl ReadOptions {
    pub fn with_dedup(mut self, dedup: DedupPolicy) -> Self {
        self.dedup = dedup;
        self
    }

    pub fn with_filter<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.filter = Some(words.into_iter().map(Into::into).collect());
        self
    }
}

/// Similarity measure used by [`Embeddings::similarity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Similarity {
    Dot,
    Cosine,
}

/// An ordered vocabulary with one `f32` row per word.
///
/// Rows live in a single row-major buffer, so row `i` is
/// `matrix[i * dim..(i + 1) * dim]`. Words are unique and compared by their
/// exact UTF-8 bytes.
#[derive(Clone)]
pub struct Embeddings {
    words: Vocab,
    matrix: Vec<f32>,
    dim: usize,
}

impl Embeddings {
    /// Assemble from parts already known to be consistent.
    pub(crate) fn from_parts(words: Vocab, matrix: Vec<f32>, dim: usize) -> Self {
        debug_assert!(dim > 0);
        debug_assert_eq!(words.len() * dim, matrix.len());
        Embeddings { words, matrix, dim }
    }

    /// Build a table from `(word, vector)` pairs, resolving duplicates per `policy`.
    ///
    /// Surviving words keep the order of their first occurrence under both
    /// `FirstWins` and `LastWins`.
    pub fn from_pairs<I, S, V>(pairs: I, dim: usize, policy: DedupPolicy) -> Result<Self>
    where
        I: IntoIterator<Item = (S, V)>,
        S: Into<String>,
        V: AsRef<[f32]>,
    {
        if dim == 0 {
            return Err(Error::domain(
                Position::Input,
                "vector dimension must be at least 1",
            ));
        }
        let pairs = pairs.into_iter();
        let mut words = Vocab::with_capacity(pairs.size_hint().0);
        let mut matrix = Vec::with_capacity(pairs.size_hint().0 * dim);
        for (i, (word, vector)) in pairs.enumerate() {
            let at = Position::Record(i as u64 + 1);
            let vector = vector.as_ref();
            if vector.len() != dim {
                return Err(Error::dimension(
                    at,
                    format!("expected {dim} values, got {}", vector.len()),
                ));
            }
            let word: String = word.into();
            match words.insert_full(&word) {
                (_, true) => matrix.extend_from_slice(vector),
                (row, false) => match policy {
                    DedupPolicy::FirstWins => {}
                    DedupPolicy::LastWins => {
                        matrix[row * dim..(row + 1) * dim].copy_from_slice(vector);
                    }
                    DedupPolicy::Error => return Err(Error::DuplicateWord { at, word }),
                },
            }
        }
        Ok(Embeddings { words, matrix, dim })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.words.iter()
    }

    pub fn word(&self, row: usize) -> Option<&str> {
        self.words.get(row)
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.words.index_of(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// Row `i` of the matrix.
    ///
    /// # Panics
    ///
    /// If `row >= self.len()`.
    pub fn row(&self, row: usize) -> &[f32] {
        &self.matrix[row * self.dim..(row + 1) * self.dim]
    }

    /// The whole matrix, row-major, `len() * dim()` values.
    pub fn matrix(&self) -> &[f32] {
        &self.matrix
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<f32>, usize) {
        (
            self.words.iter().map(str::to_owned).collect(),
            self.matrix,
            self.dim,
        )
    }

    pub fn lookup(&self, word: &str) -> Option<&[f32]> {
        self.index_of(word).map(|i| self.row(i))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, &[f32])> + '_ {
        self.words.iter().zip(self.matrix.chunks_exact(self.dim))
    }

    /// Keep only the given rows, in ascending row order.
    pub fn select_rows(&self, keep: impl Fn(&str) -> bool) -> Embeddings {
        let mut words = Vocab::default();
        let mut matrix = Vec::new();
        for (w, v) in self.iter().filter(|(w, _)| keep(w)) {
            words.insert_full(w);
            matrix.extend_from_slice(v);
        }
        Embeddings::from_parts(words, matrix, self.dim)
    }

    /// Dot product or cosine similarity between two words, accumulated in `f64`.
    pub fn similarity(&self, w1: &str, w2: &str, mode: Similarity) -> Result<f64> {
        let a = self.require(w1)?;
        let b = self.require(w2)?;
        match mode {
            Similarity::Dot => Ok(dot(a, b)),
            Similarity::Cosine => cosine(a, b).ok_or_else(|| {
                Error::domain(
                    Position::Input,
                    format!("cosine undefined: {w1:?} or {w2:?} has zero norm"),
                )
            }),
        }
    }

    /// Brute-force `k` nearest words to `word` by cosine, excluding `word`
    /// itself and zero-norm rows. Ties keep vocabulary order.
    pub fn most_similar(&self, word: &str, k: usize) -> Result<Vec<(&str, f64)>> {
        let query = self.require(word)?;
        if norm(query) == 0.0 {
            return Err(Error::domain(
                Position::Input,
                format!("cosine undefined: {word:?} has zero norm"),
            ));
        }
        let mut scored: Vec<(&str, f64)> = self
            .iter()
            .filter(|(w, _)| *w != word)
            .filter_map(|(w, v)| cosine(query, v).map(|s| (w, s)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        scored.truncate(k);
        Ok(scored)
    }

    fn require(&self, word: &str) -> Result<&[f32]> {
        self.lookup(word).ok_or_else(|| Error::MissingWord {
            at: Position::Input,
            word: word.to_owned(),
        })
    }
}

/// Equality is exact: same words in the same order and bit-identical values.
impl PartialEq for Embeddings {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.words == other.words
            && self
                .matrix
                .iter()
                .map(|x| x.to_bits())
                .eq(other.matrix.iter().map(|x| x.to_bits()))
    }
}

impl fmt::Debug for Embeddings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Embeddings")
            .field("len", &self.len())
            .field("dim", &self.dim)
            .field("words", &self.words.iter().take(8).collect::<Vec<_>>())
            .finish()
    }
}

/// Construct a validated table; see [`Embeddings::from_pairs`].
pub fn build_embeddings<I, S, V>(pairs: I, dim: usize, policy: DedupPolicy) -> Result<Embeddings>
where
    I: IntoIterator<Item = (S, V)>,
    S: Into<String>,
    V: AsRef<[f32]>,
{
    Embeddings::from_pairs(pairs, dim, policy)
}

// Both reductions walk indices in ascending order, so swapping the arguments
// produces bit-identical sums.
fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum()
}

fn norm(a: &[f32]) -> f64 {
    a.iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt()
}

fn cosine(a: &[f32], b: &[f32]) -> Option<f64> {
    let denom = norm(a) * norm(b);
    if denom == 0.0 || !denom.is_finite() {
        return None;
    }
    Some(dot(a, b) / denom)
}

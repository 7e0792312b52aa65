//! Streaming accumulator that every reader feeds record by record.
//!
//! The reader hands over the raw word bytes; the collector decides whether
//! the record is kept (and where its vector goes) or skipped, applying the
//! vocabulary filter and the dedup policy on the fly. Skipped vectors are
//! never decoded.

use std::borrow::Cow;
use std::collections::HashSet;

use crate::error::{Error, Position, Result};
use crate::model::{DedupPolicy, Embeddings, ReadOptions};
use crate::source::decode_f32_le;
use crate::vocab::Vocab;

/// Upper bound on the number of floats preallocated from an untrusted header.
const MAX_PREALLOC_FLOATS: usize = 1 << 27;

/// Record counts gathered during one read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadCounts {
    pub records_read: u64,
    pub duplicates_resolved: u64,
    pub filtered_out: u64,
}

/// Everything a reader produces.
#[derive(Debug, Clone)]
pub struct ReadOutcome {
    pub embeddings: Embeddings,
    /// Filter words that never occurred in the source, sorted.
    pub missing: Vec<String>,
    pub counts: ReadCounts,
}

pub(crate) enum Admit {
    /// Decode the vector into this row; the caller must fill it before the
    /// next record.
    Row(usize),
    /// Discard the vector without decoding.
    Skip,
}

pub(crate) struct Collector<'o> {
    opts: &'o ReadOptions,
    dim: usize,
    words: Vocab,
    matrix: Vec<f32>,
    /// Words rejected by the filter, tracked so their repeats count as duplicates.
    unmatched: HashSet<String>,
    counts: ReadCounts,
}

impl<'o> Collector<'o> {
    pub fn new(opts: &'o ReadOptions, dim: usize, expected_rows: Option<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::dimension(
                Position::Input,
                "vector dimension must be at least 1",
            ));
        }
        let mut rows = expected_rows.unwrap_or(0) as usize;
        if let Some(filter) = &opts.filter {
            rows = rows.min(filter.len());
        }
        rows = rows.min(MAX_PREALLOC_FLOATS / dim);
        Ok(Collector {
            opts,
            dim,
            words: Vocab::with_capacity(rows),
            matrix: Vec::with_capacity(rows * dim),
            unmatched: HashSet::new(),
            counts: ReadCounts::default(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Register one record's word. `at` locates the record for diagnostics.
    pub fn admit(&mut self, word: &[u8], at: Position) -> Result<Admit> {
        self.counts.records_read += 1;
        let word: Cow<'_, str> = if self.opts.strict_utf8 {
            Cow::Borrowed(std::str::from_utf8(word).map_err(|_| Error::InvalidUtf8 { at })?)
        } else {
            String::from_utf8_lossy(word)
        };

        if let Some(filter) = &self.opts.filter {
            if !filter.contains(word.as_ref()) {
                if self.unmatched.contains(word.as_ref()) {
                    return self.duplicate(word, at, None);
                }
                self.unmatched.insert(word.into_owned());
                self.counts.filtered_out += 1;
                return Ok(Admit::Skip);
            }
        }

        let (row, fresh) = self.words.insert_full(&word);
        if fresh {
            // storage for the row is created when its vector arrives
            Ok(Admit::Row(row))
        } else {
            self.duplicate(word, at, Some(row))
        }
    }

    fn duplicate(&mut self, word: Cow<'_, str>, at: Position, row: Option<usize>) -> Result<Admit> {
        match self.opts.dedup {
            DedupPolicy::Error => Err(Error::DuplicateWord {
                at,
                word: word.into_owned(),
            }),
            DedupPolicy::FirstWins => {
                self.counts.duplicates_resolved += 1;
                Ok(Admit::Skip)
            }
            DedupPolicy::LastWins => {
                self.counts.duplicates_resolved += 1;
                Ok(row.map_or(Admit::Skip, Admit::Row))
            }
        }
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f32] {
        let end = (row + 1) * self.dim;
        if self.matrix.len() < end {
            self.matrix.resize(end, 0.0);
        }
        &mut self.matrix[row * self.dim..end]
    }

    /// Store a row given as `dim` little-endian `f32`s. A new last row is
    /// appended in one pass instead of being zeroed first.
    pub fn put_le(&mut self, row: usize, bytes: &[u8]) {
        debug_assert_eq!(bytes.len(), self.dim * 4);
        if row * self.dim == self.matrix.len() {
            self.matrix.extend(
                bytes
                    .chunks_exact(4)
                    .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            );
        } else {
            decode_f32_le(bytes, self.row_mut(row));
        }
    }

    pub fn finish(self) -> ReadOutcome {
        debug_assert_eq!(self.matrix.len(), self.words.len() * self.dim);
        let mut missing: Vec<String> = match &self.opts.filter {
            Some(filter) => filter
                .iter()
                .filter(|w| !self.words.contains(w.as_str()))
                .cloned()
                .collect(),
            None => Vec::new(),
        };
        missing.sort_unstable();
        ReadOutcome {
            embeddings: Embeddings::from_parts(self.words, self.matrix, self.dim),
            missing,
            counts: self.counts,
        }
    }
}

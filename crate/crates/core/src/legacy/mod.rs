//! GloVe text, word2vec text and word2vec binary codecs.
//!
//! All three split only on the bytes 0x20 and 0x0A, never on general
//! whitespace, so words holding U+00A0, U+2028 and friends survive intact.
//! Binary vectors are always little-endian.

mod binary;
mod text;

pub use binary::{read_w2v_binary, read_w2v_binary_with, write_w2v_binary};
pub use text::{
    read_glove_text, read_glove_text_with, read_w2v_text, read_w2v_text_with, write_glove_text,
    write_w2v_text,
};

use crate::error::{Error, Position, Result};
use crate::model::{Embeddings, FormatKind};

/// Header of both word2vec formats: `"<vocab> <dim>\n"` in ASCII decimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct W2VTextHeader {
    pub vocab_size: u64,
    pub vector_size: u64,
}

impl W2VTextHeader {
    /// Parse a header line (without its trailing 0x0A). A trailing 0x0D or a
    /// single trailing 0x20 is tolerated.
    pub fn parse(line: &[u8]) -> Option<Self> {
        let line = strip_line_end(line);
        let space = line.iter().position(|&b| b == b' ')?;
        let vocab_size = parse_unsigned(&line[..space])?;
        let vector_size = parse_unsigned(&line[space + 1..])?;
        Some(W2VTextHeader {
            vocab_size,
            vector_size,
        })
    }

    pub fn render(&self) -> String {
        format!("{} {}\n", self.vocab_size, self.vector_size)
    }

    /// Byte length of the rendered line, newline included.
    pub fn byte_len(&self) -> u64 {
        self.render().len() as u64
    }
}

fn parse_unsigned(tok: &[u8]) -> Option<u64> {
    if tok.is_empty() || !tok.iter().all(u8::is_ascii_digit) {
        return None;
    }
    std::str::from_utf8(tok).ok()?.parse().ok()
}

/// Drop a trailing 0x0D, then a single trailing 0x20 (as left by some
/// `.vec` writers).
pub(crate) fn strip_line_end(mut line: &[u8]) -> &[u8] {
    if let [rest @ .., b'\r'] = line {
        line = rest;
    }
    if let [rest @ .., b' '] = line {
        line = rest;
    }
    line
}

/// Byte length of a word2vec binary file for words of the given byte lengths.
pub fn expected_w2v_binary_size<I>(word_byte_lengths: I, vocab_size: u64, dim: u64) -> u64
where
    I: IntoIterator<Item = u64>,
{
    let header = W2VTextHeader {
        vocab_size,
        vector_size: dim,
    };
    word_byte_lengths
        .into_iter()
        .fold(header.byte_len(), |acc, len| acc + len + 1 + 4 * dim)
}

/// Bytes a word may not contain when written in `format`.
pub fn forbidden_word_bytes(format: FormatKind) -> &'static [u8] {
    match format {
        FormatKind::GloveText | FormatKind::W2VText => b" \n\r",
        FormatKind::W2VBinary => b" \n",
        FormatKind::Leader => b"",
    }
}

/// Check that every word can be represented in `format`, naming the first
/// offender and its row otherwise.
pub fn check_words_for(emb: &Embeddings, format: FormatKind) -> Result<()> {
    if format == FormatKind::Leader {
        return Ok(());
    }
    let forbidden = forbidden_word_bytes(format);
    for (row, word) in emb.words().enumerate() {
        if word.is_empty() {
            return Err(Error::domain(
                Position::Row(row),
                format!("empty word cannot be written as {format}"),
            ));
        }
        if word.bytes().any(|b| forbidden.contains(&b)) {
            return Err(Error::domain(
                Position::Row(row),
                format!("word {word:?} at index {row} contains a delimiter byte not allowed in {format}"),
            ));
        }
    }
    Ok(())
}

/// Append the shortest decimal that parses back to the same `f32`.
pub(crate) fn push_f32(out: &mut Vec<u8>, v: f32, buf: &mut ryu::Buffer) {
    if v.is_nan() {
        out.extend_from_slice(b"nan");
    } else if v.is_infinite() {
        out.extend_from_slice(if v > 0.0 { b"inf" } else { b"-inf" });
    } else {
        let s = buf.format_finite(v).as_bytes();
        out.extend_from_slice(s.strip_suffix(b".0").unwrap_or(s));
    }
}

/// Shortest text that parses back to exactly `v`, as written by the text
/// writers (`1` rather than `1.0`; `nan`, `inf`, `-inf` for non-finite).
pub fn format_f32(v: f32) -> String {
    let mut out = Vec::new();
    push_f32(&mut out, v, &mut ryu::Buffer::new());
    String::from_utf8(out).expect("float text is ASCII")
}

pub(crate) fn parse_f32(tok: &[u8]) -> Option<f32> {
    // std accepts "inf", "infinity" and "nan" in any case
    std::str::from_utf8(tok).ok()?.parse().ok()
}

/// Split a text record from the right: the last `dim` 0x20-separated fields
/// are the vector, everything before them is the word. Returns the word and
/// the vector field bytes (still 0x20-separated).
pub(crate) fn split_record(line: &[u8], dim: usize) -> Option<(&[u8], &[u8])> {
    let mut end = line.len();
    for _ in 0..dim {
        end = line[..end].iter().rposition(|&b| b == b' ')?;
    }
    Some((&line[..end], &line[end + 1..]))
}

/// Parse exactly `out.len()` values from 0x20-separated `fields`.
pub(crate) fn parse_fields(fields: &[u8], out: &mut [f32]) -> bool {
    let mut toks = fields.split(|&b| b == b' ');
    for slot in out.iter_mut() {
        match toks.next().and_then(parse_f32) {
            Some(v) => *slot = v,
            None => return false,
        }
    }
    toks.next().is_none()
}

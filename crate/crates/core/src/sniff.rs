//! Format detection from the leading bytes of a stream.
//!
//! Decision order:
//! 1. first 8 bytes are the Leader magic: Leader;
//! 2. first line is exactly `"<n> <d>"`: word2vec, text if the first record
//!    is `word` followed by `d` decimal fields before a 0x0A, else binary;
//! 3. first line is `word` plus `k >= 1` decimal fields: GloVe with `d = k`;
//! 4. otherwise unknown.
//!
//! A GloVe file with `d = 1` whose first word is an unsigned integer looks
//! exactly like a word2vec header; the header reading wins.

use std::io::{Read, Seek, SeekFrom};

use serde::Serialize;

use crate::error::{Error, Position, Result};
use crate::leader::{LeaderHeader, MAGIC};
use crate::legacy::{parse_fields, split_record, strip_line_end, W2VTextHeader};
use crate::model::FormatKind;

/// Upper bound on the bytes inspected by [`sniff`].
pub const PROBE_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SniffReport {
    #[serde(rename = "format", serialize_with = "ser_kind")]
    pub kind: FormatKind,
    /// Known from the header for Leader and word2vec; unknown for GloVe
    /// without a full scan.
    #[serde(rename = "vocab")]
    pub vocab_size: Option<u64>,
    #[serde(rename = "dim")]
    pub vector_size: Option<u64>,
}

pub(crate) fn ser_kind<S: serde::Serializer>(k: &FormatKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(k.name())
}

/// Detect the format of `stream`, which is rewound to byte 0 before and after.
pub fn sniff<R: Read + Seek + ?Sized>(stream: &mut R) -> Result<SniffReport> {
    stream
        .seek(SeekFrom::Start(0))
        .map_err(|e| Error::io(Position::Byte(0), e))?;
    let mut probe = Vec::with_capacity(64 * 1024);
    let got = (&mut *stream)
        .take(PROBE_LIMIT as u64 + 1)
        .read_to_end(&mut probe);
    stream
        .seek(SeekFrom::Start(0))
        .map_err(|e| Error::io(Position::Byte(0), e))?;
    got.map_err(|e| Error::io(Position::Byte(probe.len() as u64), e))?;
    let complete = probe.len() <= PROBE_LIMIT;
    probe.truncate(PROBE_LIMIT);
    sniff_bytes(&probe, complete)
}

/// Detect the format from a prefix of a file. `complete` says whether
/// `prefix` is the entire file.
pub fn sniff_bytes(prefix: &[u8], complete: bool) -> Result<SniffReport> {
    if prefix.is_empty() {
        return Err(Error::truncated(Position::Byte(0), "empty input"));
    }

    if prefix.len() >= 8 && u64::from_le_bytes(prefix[..8].try_into().unwrap()) == MAGIC {
        let header: &[u8; 24] = prefix
            .get(..24)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| {
                Error::truncated(
                    Position::Byte(prefix.len() as u64),
                    "Leader magic present but header is shorter than 24 bytes",
                )
            })?;
        let header = LeaderHeader::from_bytes(header)?;
        return Ok(SniffReport {
            kind: FormatKind::Leader,
            vocab_size: Some(header.vocab_size),
            vector_size: Some(header.vector_size),
        });
    }

    let (first, rest) = match prefix.iter().position(|&b| b == b'\n') {
        Some(i) => (&prefix[..i], Some(&prefix[i + 1..])),
        None if complete => (prefix, None),
        None => {
            return Err(Error::unknown(
                Position::Byte(0),
                format!("no line break within the first {} bytes", prefix.len()),
            ))
        }
    };

    if let Some(header) = W2VTextHeader::parse(first) {
        let rest = rest.unwrap_or(&[]);
        let kind = if rest.is_empty() || first_record_is_text(rest, header.vector_size) {
            FormatKind::W2VText
        } else {
            FormatKind::W2VBinary
        };
        return Ok(SniffReport {
            kind,
            vocab_size: Some(header.vocab_size),
            vector_size: Some(header.vector_size),
        });
    }

    let line = strip_line_end(first);
    let k = line.iter().filter(|&&b| b == b' ').count();
    if k >= 1 && is_text_record(line, k) {
        return Ok(SniffReport {
            kind: FormatKind::GloveText,
            vocab_size: None,
            vector_size: Some(k as u64),
        });
    }

    Err(Error::unknown(
        Position::Byte(0),
        "leading bytes match no supported format",
    ))
}

fn first_record_is_text(rest: &[u8], dim: u64) -> bool {
    let line = match rest.iter().position(|&b| b == b'\n') {
        Some(i) => &rest[..i],
        None => rest,
    };
    let line = strip_line_end(line);
    match usize::try_from(dim) {
        Ok(d) if d <= line.len() => is_text_record(line, d),
        _ => false,
    }
}

fn is_text_record(line: &[u8], dim: usize) -> bool {
    let Some((word, fields)) = split_record(line, dim) else {
        return false;
    };
    if word.is_empty() || std::str::from_utf8(word).is_err() {
        return false;
    }
    let mut scratch = vec![0f32; dim];
    parse_fields(fields, &mut scratch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;
    use std::io::Cursor;

    #[test]
    fn leader_header() {
        let mut bytes = LeaderHeader::new(400_000, 100).to_bytes().to_vec();
        bytes.extend_from_slice(&[0; 8]);
        let r = sniff_bytes(&bytes, true).unwrap();
        assert_eq!(r.kind, FormatKind::Leader);
        assert_eq!((r.vocab_size, r.vector_size), (Some(400_000), Some(100)));
    }

    #[test]
    fn w2v_text_vs_binary() {
        let text = b"2 3\na 1 2 3\nb 4 5 6\n";
        let r = sniff_bytes(text, true).unwrap();
        assert_eq!(r.kind, FormatKind::W2VText);
        assert_eq!((r.vocab_size, r.vector_size), (Some(2), Some(3)));

        let mut bin = b"2 3\na ".to_vec();
        for v in [1.0f32, 2.0, 3.0] {
            bin.extend_from_slice(&v.to_le_bytes());
        }
        assert_eq!(sniff_bytes(&bin, true).unwrap().kind, FormatKind::W2VBinary);
    }

    #[test]
    fn glove_line() {
        let r = sniff_bytes(b"the 0.418 0.24968 -0.41242 0.1217\n", true).unwrap();
        assert_eq!(r.kind, FormatKind::GloveText);
        assert_eq!(r.vocab_size, None);
        assert_eq!(r.vector_size, Some(4));
    }

    #[test]
    fn d1_integer_word_reads_as_header() {
        let r = sniff_bytes(b"3 1\n", true).unwrap();
        assert_eq!(r.kind, FormatKind::W2VText);
        assert_eq!(
            sniff_bytes(b"3 1.5\n", true).unwrap().kind,
            FormatKind::GloveText
        );
    }

    #[test]
    fn unknown_and_empty() {
        assert_eq!(
            sniff_bytes(b"", true).unwrap_err().kind(),
            ErrorKind::Truncated
        );
        for junk in [
            &b"\x00\x01\x02\xff"[..],
            b"hello world\n",
            b"word\n",
            b" 1 2\n",
        ] {
            assert_eq!(
                sniff_bytes(junk, true).unwrap_err().kind(),
                ErrorKind::UnknownFormat,
                "{junk:?}"
            );
        }
        let long = vec![b'a'; 100];
        assert_eq!(
            sniff_bytes(&long, false).unwrap_err().kind(),
            ErrorKind::UnknownFormat
        );
    }

    #[test]
    fn rewinds() {
        let mut c = Cursor::new(b"a 1 2\n".to_vec());
        c.set_position(3);
        sniff(&mut c).unwrap();
        assert_eq!(c.position(), 0);
    }
}

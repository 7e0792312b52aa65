//! The Leader binary format.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! [0, 8)    magic       u64
//! [8, 16)   vocab size  u64
//! [16, 24)  vector size u64
//! then vocab-size records, back to back:
//!   word length u32 (UTF-8 bytes, not codepoints)
//!   word bytes
//!   vector size x f32
//! ```
//!
//! Records carry no delimiters, so a reader never scans word bytes to find
//! where the vector begins.

use std::io::{BufRead, Read, Write};

use crate::collect::{Admit, Collector, ReadOutcome};
use crate::error::{Error, Position, Result};
use crate::model::{Embeddings, ReadOptions};
use crate::source::{encode_f32_le, Source};

/// Identifies a Leader file.
pub const MAGIC: u64 = 38941;

/// Serialized header length in bytes.
pub const HEADER_LEN: u64 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeaderHeader {
    pub magic: u64,
    pub vocab_size: u64,
    pub vector_size: u64,
}

impl LeaderHeader {
    pub fn new(vocab_size: u64, vector_size: u64) -> Self {
        LeaderHeader {
            magic: MAGIC,
            vocab_size,
            vector_size,
        }
    }

    pub fn to_bytes(&self) -> [u8; 24] {
        let mut out = [0u8; 24];
        out[0..8].copy_from_slice(&self.magic.to_le_bytes());
        out[8..16].copy_from_slice(&self.vocab_size.to_le_bytes());
        out[16..24].copy_from_slice(&self.vector_size.to_le_bytes());
        out
    }

    /// Decode and validate a header.
    pub fn from_bytes(bytes: &[u8; 24]) -> Result<Self> {
        let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let header = LeaderHeader {
            magic: word(0),
            vocab_size: word(8),
            vector_size: word(16),
        };
        if header.magic != MAGIC {
            return Err(Error::BadMagic {
                at: Position::Byte(0),
                found: header.magic,
            });
        }
        if header.vector_size == 0 {
            return Err(Error::header(Position::Byte(16), "vector size is 0"));
        }
        Ok(header)
    }
}

/// Read the 24-byte header, leaving `reader` positioned at the first record.
pub fn read_leader_header<R: Read + ?Sized>(reader: &mut R) -> Result<LeaderHeader> {
    let mut buf = [0u8; 24];
    let mut got = 0;
    while got < buf.len() {
        match reader.read(&mut buf[got..]) {
            Ok(0) => {
                return Err(Error::truncated(
                    Position::Byte(got as u64),
                    format!("Leader header needs 24 bytes, found {got}"),
                ))
            }
            Ok(n) => got += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(Error::io(Position::Byte(got as u64), e)),
        }
    }
    LeaderHeader::from_bytes(&buf)
}

/// Byte length of a Leader file holding words of the given UTF-8 lengths.
pub fn expected_leader_size<I>(word_byte_lengths: I, dim: u64) -> u64
where
    I: IntoIterator<Item = u64>,
{
    word_byte_lengths
        .into_iter()
        .fold(HEADER_LEN, |acc, len| acc + 4 + len + 4 * dim)
}

/// Write `emb` in Leader format. Returns the number of bytes written.
pub fn write_leader<W: Write>(emb: &Embeddings, mut out: W) -> Result<u64> {
    let header = LeaderHeader::new(emb.len() as u64, emb.dim() as u64);
    let mut written = 0u64;
    out.write_all(&header.to_bytes())
        .map_err(|e| Error::io(Position::Byte(0), e))?;
    written += HEADER_LEN;

    let mut record = Vec::with_capacity(4 + 32 + 4 * emb.dim());
    for (row, (word, vector)) in emb.iter().enumerate() {
        let len = u32::try_from(word.len()).map_err(|_| {
            Error::domain(
                Position::Row(row),
                "word longer than 4 GiB cannot be length-prefixed",
            )
        })?;
        record.clear();
        record.extend_from_slice(&len.to_le_bytes());
        record.extend_from_slice(word.as_bytes());
        encode_f32_le(vector, &mut record);
        out.write_all(&record)
            .map_err(|e| Error::io(Position::Byte(written), e))?;
        written += record.len() as u64;
    }
    out.flush()
        .map_err(|e| Error::io(Position::Byte(written), e))?;
    Ok(written)
}

/// Read a Leader stream into an embedding table.
pub fn read_leader<R: BufRead>(reader: R, opts: &ReadOptions) -> Result<Embeddings> {
    read_leader_with(reader, opts).map(|o| o.embeddings)
}

/// Like [`read_leader`], also returning filter and dedup bookkeeping.
pub fn read_leader_with<R: BufRead>(mut reader: R, opts: &ReadOptions) -> Result<ReadOutcome> {
    let header = read_leader_header(&mut reader)?;
    let dim = usize::try_from(header.vector_size)
        .map_err(|_| Error::header(Position::Byte(16), "vector size does not fit in memory"))?;
    let mut src = Source::starting_at(reader, HEADER_LEN);
    let mut collector = Collector::new(opts, dim, Some(header.vocab_size))?;
    let vec_bytes = dim * 4;
    let mut word = Vec::new();

    for i in 0..header.vocab_size {
        let offset = src.pos();
        let buf = src.buffered()?;
        if buf.is_empty() {
            return Err(Error::header(
                Position::Byte(offset),
                format!(
                    "header declares {} records, file holds {i}",
                    header.vocab_size
                ),
            ));
        }
        // Fast path: the length prefix says exactly where the record ends, so
        // when all of it is buffered it is consumed in place with no scanning.
        if buf.len() >= 4 {
            let len = u32::from_le_bytes(buf[..4].try_into().unwrap()) as usize;
            let end = 4 + len + vec_bytes;
            if buf.len() >= end {
                if let Admit::Row(row) =
                    collector.admit(&buf[4..4 + len], Position::Byte(offset + 4))?
                {
                    collector.put_le(row, &buf[4 + len..end]);
                }
                src.advance(end);
                continue;
            }
        }

        let mut len = [0u8; 4];
        src.read_exact(&mut len, "word length")?;
        let len = u32::from_le_bytes(len) as usize;
        src.read_vec(len, &mut word, "word")?;
        match collector.admit(&word, Position::Byte(offset + 4))? {
            Admit::Row(row) => src.with_bytes(vec_bytes, "vector", |b| collector.put_le(row, b))?,
            Admit::Skip => src.skip(vec_bytes as u64, "vector")?,
        }
    }
    if !src.at_eof()? {
        return Err(Error::header(
            Position::Byte(src.pos()),
            format!("trailing bytes after {} records", header.vocab_size),
        ));
    }
    Ok(collector.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;
    use crate::model::{build_embeddings, DedupPolicy};

    fn a_bc() -> Embeddings {
        build_embeddings(
            [("a", [1.0f32, 2.0, 3.0]), ("bc", [4.0, 5.0, 6.0])],
            3,
            DedupPolicy::FirstWins,
        )
        .unwrap()
    }

    #[test]
    fn header_roundtrip_and_values() {
        let bytes = LeaderHeader::new(400_000, 100).to_bytes();
        let h = read_leader_header(&mut &bytes[..]).unwrap();
        assert_eq!((h.vocab_size, h.vector_size), (400_000, 100));
        assert_eq!(&bytes[..8], &38941u64.to_le_bytes());
    }

    #[test]
    fn header_errors() {
        let mut bad = LeaderHeader::new(5, 5);
        bad.magic = MAGIC + 1;
        let err = read_leader_header(&mut &bad.to_bytes()[..]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::BadMagic);

        let err = read_leader_header(&mut &[0u8; 10][..]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Truncated);
        assert_eq!(err.position(), Position::Byte(10));

        let zero_dim = LeaderHeader::new(1, 0).to_bytes();
        assert!(read_leader_header(&mut &zero_dim[..]).is_err());
    }

    #[test]
    fn write_sizes() {
        let mut buf = Vec::new();
        assert_eq!(write_leader(&a_bc(), &mut buf).unwrap(), 59);
        assert_eq!(buf.len(), 59);

        let e = build_embeddings([("é", [0.5f32])], 1, DedupPolicy::FirstWins).unwrap();
        buf.clear();
        assert_eq!(write_leader(&e, &mut buf).unwrap(), 34);
        assert_eq!(&buf[24..28], &2u32.to_le_bytes());
    }

    #[test]
    fn expected_size_arithmetic() {
        assert_eq!(expected_leader_size([1, 2], 3), 59);
        assert_eq!(expected_leader_size([], 300), 24);
    }

    #[test]
    fn roundtrip() {
        let e = a_bc();
        let mut buf = Vec::new();
        write_leader(&e, &mut buf).unwrap();
        assert_eq!(read_leader(&buf[..], &ReadOptions::default()).unwrap(), e);
    }

    #[test]
    fn filtered_read_reports_missing() {
        let mut buf = Vec::new();
        write_leader(&a_bc(), &mut buf).unwrap();
        let opts = ReadOptions::default().with_filter(["bc", "zz"]);
        let out = read_leader_with(&buf[..], &opts).unwrap();
        assert_eq!(out.embeddings.words().collect::<Vec<_>>(), ["bc"]);
        assert_eq!(out.embeddings.lookup("bc"), Some(&[4.0, 5.0, 6.0][..]));
        assert_eq!(out.missing, ["zz"]);
    }

    #[test]
    fn truncated_inside_second_vector() {
        let mut buf = Vec::new();
        write_leader(&a_bc(), &mut buf).unwrap();
        // record 2 starts at 24 + 17 = 41; its vector at 41 + 4 + 2 = 47
        buf.truncate(47 + 2);
        let err = read_leader(&buf[..], &ReadOptions::default()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Truncated);
        assert_eq!(err.position(), Position::Byte(49));
    }

    #[test]
    fn record_count_disagreement() {
        let mut buf = Vec::new();
        write_leader(&a_bc(), &mut buf).unwrap();
        let mut short = buf.clone();
        short[8..16].copy_from_slice(&3u64.to_le_bytes());
        let err = read_leader(&short[..], &ReadOptions::default()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::HeaderMismatch);
        assert_eq!(err.position(), Position::Byte(59));

        let mut trailing = buf;
        trailing.push(0);
        let err = read_leader(&trailing[..], &ReadOptions::default()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::HeaderMismatch);
    }

    #[test]
    fn delimiter_bytes_inside_words() {
        let e = build_embeddings(
            [
                ("a b", [1.0f32]),
                ("x\ny", [2.0]),
                ("", [3.0]),
                ("\r", [4.0]),
            ],
            1,
            DedupPolicy::FirstWins,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_leader(&e, &mut buf).unwrap();
        assert_eq!(read_leader(&buf[..], &ReadOptions::default()).unwrap(), e);
    }

    #[test]
    fn invalid_utf8_word() {
        let mut buf = LeaderHeader::new(1, 1).to_bytes().to_vec();
        buf.extend_from_slice(&2u32.to_le_bytes());
        buf.extend_from_slice(&[0xc3, 0x28]);
        buf.extend_from_slice(&1.0f32.to_le_bytes());
        let err = read_leader(&buf[..], &ReadOptions::default()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::InvalidUtf8);
        assert_eq!(err.position(), Position::Byte(28));
    }
}

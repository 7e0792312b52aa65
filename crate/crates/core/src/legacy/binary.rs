use std::io::{BufRead, Write};

use super::text::read_w2v_header;
use super::{check_words_for, W2VTextHeader};
use crate::collect::{Admit, Collector, ReadOutcome};
use crate::error::{Error, Position, Result};
use crate::model::{Embeddings, FormatKind, ReadOptions};
use crate::source::{encode_f32_le, Source};

pub fn read_w2v_binary<R: BufRead>(reader: R, opts: &ReadOptions) -> Result<Embeddings> {
    read_w2v_binary_with(reader, opts).map(|o| o.embeddings)
}

/// Read a word2vec binary file.
///
/// Each record is the word, one 0x20, then `dim` little-endian `f32`s. Any
/// 0x0A or 0x20 bytes before a word are skipped, so files written with or
/// without a newline after each vector both parse.
pub fn read_w2v_binary_with<R: BufRead>(reader: R, opts: &ReadOptions) -> Result<ReadOutcome> {
    let mut src = Source::new(reader);
    let header = read_w2v_header(&mut src)?;
    let dim = header.vector_size as usize;
    let vec_bytes = dim * 4;
    let mut collector = Collector::new(opts, dim, Some(header.vocab_size))?;
    let mut word = Vec::new();

    for i in 0..header.vocab_size {
        src.skip_while(is_separator)?;
        let start = src.pos();
        let buf = src.buffered()?;
        if buf.is_empty() {
            return Err(Error::header(
                Position::Byte(start),
                format!("header declares {} records, found {i}", header.vocab_size),
            ));
        }
        // the word has no length prefix, so its end must be found by scanning
        if let Some(sp) = buf.iter().position(|&b| b == b' ') {
            let end = sp + 1 + vec_bytes;
            if buf.len() >= end {
                if let Admit::Row(row) = collector.admit(&buf[..sp], Position::Byte(start))? {
                    collector.put_le(row, &buf[sp + 1..end]);
                }
                src.advance(end);
                continue;
            }
        }

        word.clear();
        if !src.read_until(b' ', &mut word)? {
            return Err(Error::truncated(
                Position::Byte(src.pos()),
                "end of input inside word (no 0x20 before vector)",
            ));
        }
        match collector.admit(&word, Position::Byte(start))? {
            Admit::Row(row) => src.with_bytes(vec_bytes, "vector", |b| collector.put_le(row, b))?,
            Admit::Skip => src.skip(vec_bytes as u64, "vector")?,
        }
    }
    src.skip_while(|b| b == b'\n')?;
    if !src.at_eof()? {
        return Err(Error::header(
            Position::Byte(src.pos()),
            format!("trailing bytes after {} records", header.vocab_size),
        ));
    }
    Ok(collector.finish())
}

fn is_separator(b: u8) -> bool {
    b == b'\n' || b == b' '
}

/// Write `emb` as word2vec binary with no newline between records.
/// Words must be non-empty and free of 0x20 and 0x0A.
pub fn write_w2v_binary<W: Write>(emb: &Embeddings, mut out: W) -> Result<u64> {
    check_words_for(emb, FormatKind::W2VBinary)?;
    let header = W2VTextHeader {
        vocab_size: emb.len() as u64,
        vector_size: emb.dim() as u64,
    }
    .render();
    out.write_all(header.as_bytes())
        .map_err(|e| Error::io(Position::Byte(0), e))?;
    let mut written = header.len() as u64;

    let mut record = Vec::with_capacity(32 + 4 * emb.dim());
    for (word, vector) in emb.iter() {
        record.clear();
        record.extend_from_slice(word.as_bytes());
        record.push(b' ');
        encode_f32_le(vector, &mut record);
        out.write_all(&record)
            .map_err(|e| Error::io(Position::Byte(written), e))?;
        written += record.len() as u64;
    }
    out.flush()
        .map_err(|e| Error::io(Position::Byte(written), e))?;
    Ok(written)
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
    fn size_and_roundtrip() {
        let e = a_bc();
        let mut buf = Vec::new();
        assert_eq!(write_w2v_binary(&e, &mut buf).unwrap(), 33);
        assert_eq!(buf.len(), 33);
        assert_eq!(&buf[..4], b"2 3\n");
        assert_eq!(
            read_w2v_binary(&buf[..], &ReadOptions::default()).unwrap(),
            e
        );
    }

    #[test]
    fn tolerates_newline_separated_records() {
        let e = a_bc();
        let mut plain = Vec::new();
        write_w2v_binary(&e, &mut plain).unwrap();

        let mut with_newlines = b"2 3\n".to_vec();
        for (w, v) in e.iter() {
            with_newlines.push(b'\n');
            with_newlines.extend_from_slice(w.as_bytes());
            with_newlines.push(b' ');
            encode_f32_le(v, &mut with_newlines);
        }
        with_newlines.push(b'\n');
        let got = read_w2v_binary(&with_newlines[..], &ReadOptions::default()).unwrap();
        assert_eq!(
            got,
            read_w2v_binary(&plain[..], &ReadOptions::default()).unwrap()
        );
    }

    #[test]
    fn vector_bytes_may_contain_delimiters() {
        // 0x0A and 0x20 inside the float payload must not confuse the reader
        let v = [f32::from_le_bytes([0x20, 0x0a, 0x20, 0x0a]), 1.0];
        let e = build_embeddings([("w", v), ("x", v)], 2, DedupPolicy::FirstWins).unwrap();
        let mut buf = Vec::new();
        write_w2v_binary(&e, &mut buf).unwrap();
        assert_eq!(
            read_w2v_binary(&buf[..], &ReadOptions::default()).unwrap(),
            e
        );
    }

    #[test]
    fn errors() {
        let e = a_bc();
        let mut buf = Vec::new();
        write_w2v_binary(&e, &mut buf).unwrap();

        let err = read_w2v_binary(&buf[..buf.len() - 1], &ReadOptions::default()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Truncated);
        assert_eq!(err.position(), Position::Byte(32));

        let mut more = buf.clone();
        more[0] = b'3';
        let err = read_w2v_binary(&more[..], &ReadOptions::default()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::HeaderMismatch);

        let mut trailing = buf.clone();
        trailing.extend_from_slice(b"junk");
        let err = read_w2v_binary(&trailing[..], &ReadOptions::default()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::HeaderMismatch);

        let err = read_w2v_binary(&b"1 2\nnospace"[..], &ReadOptions::default()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Truncated);

        let bad = build_embeddings([("a b", [1.0f32])], 1, DedupPolicy::FirstWins).unwrap();
        let err = write_w2v_binary(&bad, Vec::new()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Domain);
    }

    #[test]
    fn carriage_return_is_a_legal_binary_word_byte() {
        let e = build_embeddings([("r\r", [1.0f32])], 1, DedupPolicy::FirstWins).unwrap();
        let mut buf = Vec::new();
        write_w2v_binary(&e, &mut buf).unwrap();
        assert_eq!(
            read_w2v_binary(&buf[..], &ReadOptions::default()).unwrap(),
            e
        );
    }
}

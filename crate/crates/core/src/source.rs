//! Byte source with offset tracking, shared by the readers.

use std::io::{self, BufRead};

use crate::error::{Error, Position, Result};

pub(crate) struct Source<R> {
    inner: R,
    pos: u64,
    scratch: Vec<u8>,
}

impl<R: BufRead> Source<R> {
    pub fn new(inner: R) -> Self {
        Source::starting_at(inner, 0)
    }

    /// A source whose first byte sits at absolute offset `pos`.
    pub fn starting_at(inner: R, pos: u64) -> Self {
        Source {
            inner,
            pos,
            scratch: Vec::new(),
        }
    }

    /// Bytes consumed so far.
    pub fn pos(&self) -> u64 {
        self.pos
    }

    fn fill(&mut self) -> Result<&[u8]> {
        loop {
            match self.inner.fill_buf() {
                Ok(_) => break,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(Error::io(Position::Byte(self.pos), e)),
            }
        }
        // already buffered, so this second call does no I/O unless at EOF
        let pos = self.pos;
        self.inner
            .fill_buf()
            .map_err(|e| Error::io(Position::Byte(pos), e))
    }

    fn consume(&mut self, n: usize) {
        self.inner.consume(n);
        self.pos += n as u64;
    }

    /// Whatever the reader currently has buffered; empty only at end of input.
    /// Pair with [`Source::advance`].
    pub fn buffered(&mut self) -> Result<&[u8]> {
        self.fill()
    }

    pub fn advance(&mut self, n: usize) {
        self.consume(n);
    }

    pub fn at_eof(&mut self) -> Result<bool> {
        Ok(self.fill()?.is_empty())
    }

    /// Fill `out` completely or fail with `Truncated` at the offset where input ran out.
    pub fn read_exact(&mut self, out: &mut [u8], what: &str) -> Result<()> {
        let mut got = 0;
        while got < out.len() {
            let buf = self.fill()?;
            if buf.is_empty() {
                return Err(Error::truncated(
                    Position::Byte(self.pos),
                    format!("end of input inside {what} ({got} of {} bytes)", out.len()),
                ));
            }
            let n = buf.len().min(out.len() - got);
            out[got..got + n].copy_from_slice(&buf[..n]);
            self.consume(n);
            got += n;
        }
        Ok(())
    }

    /// Hand exactly `n` bytes to `f`, borrowing the reader's buffer when it
    /// already holds them and copying through scratch space otherwise.
    pub fn with_bytes<T>(&mut self, n: usize, what: &str, f: impl FnOnce(&[u8]) -> T) -> Result<T> {
        let buf = self.fill()?;
        if buf.len() >= n {
            let out = f(&buf[..n]);
            self.consume(n);
            return Ok(out);
        }
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.resize(n, 0);
        let res = self.read_exact(&mut scratch, what);
        let out = res.map(|()| f(&scratch));
        self.scratch = scratch;
        out
    }

    /// Replace the contents of `out` with the next `n` bytes. Growth follows
    /// the bytes actually present, so a corrupt length cannot force a huge
    /// allocation up front.
    pub fn read_vec(&mut self, n: usize, out: &mut Vec<u8>, what: &str) -> Result<()> {
        out.clear();
        let mut left = n;
        while left > 0 {
            let buf = self.fill()?;
            if buf.is_empty() {
                return Err(Error::truncated(
                    Position::Byte(self.pos),
                    format!("end of input inside {what} ({} of {n} bytes)", n - left),
                ));
            }
            let k = buf.len().min(left);
            out.extend_from_slice(&buf[..k]);
            self.consume(k);
            left -= k;
        }
        Ok(())
    }

    pub fn skip(&mut self, mut n: u64, what: &str) -> Result<()> {
        let want = n;
        while n > 0 {
            let buf = self.fill()?;
            if buf.is_empty() {
                return Err(Error::truncated(
                    Position::Byte(self.pos),
                    format!("end of input inside {what} ({} of {want} bytes)", want - n),
                ));
            }
            let k = (buf.len() as u64).min(n) as usize;
            self.consume(k);
            n -= k as u64;
        }
        Ok(())
    }

    /// Consume bytes while `pred` holds; returns how many were skipped.
    pub fn skip_while(&mut self, pred: impl Fn(u8) -> bool) -> Result<u64> {
        let mut skipped = 0;
        loop {
            let buf = self.fill()?;
            if buf.is_empty() {
                return Ok(skipped);
            }
            let k = buf.iter().position(|&b| !pred(b)).unwrap_or(buf.len());
            let done = k < buf.len();
            self.consume(k);
            skipped += k as u64;
            if done {
                return Ok(skipped);
            }
        }
    }

    /// Append bytes up to (not including) `delim` to `out` and consume the
    /// delimiter. Returns false when input ended before a delimiter was seen.
    pub fn read_until(&mut self, delim: u8, out: &mut Vec<u8>) -> Result<bool> {
        loop {
            let buf = self.fill()?;
            if buf.is_empty() {
                return Ok(false);
            }
            match buf.iter().position(|&b| b == delim) {
                Some(i) => {
                    out.extend_from_slice(&buf[..i]);
                    self.consume(i + 1);
                    return Ok(true);
                }
                None => {
                    let n = buf.len();
                    out.extend_from_slice(buf);
                    self.consume(n);
                }
            }
        }
    }
}

/// Decode little-endian binary32 values into `out`.
pub(crate) fn decode_f32_le(bytes: &[u8], out: &mut [f32]) {
    debug_assert_eq!(bytes.len(), out.len() * 4);
    for (dst, src) in out.iter_mut().zip(bytes.chunks_exact(4)) {
        *dst = f32::from_le_bytes([src[0], src[1], src[2], src[3]]);
    }
}

/// Encode binary32 values as little-endian bytes, appending to `out`.
pub(crate) fn encode_f32_le(values: &[f32], out: &mut Vec<u8>) {
    out.reserve(values.len() * 4);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_reports_offset_of_end() {
        let mut s = Source::new(&b"abcdef"[..]);
        let mut buf = [0u8; 4];
        s.read_exact(&mut buf, "x").unwrap();
        let err = s.read_exact(&mut buf, "x").unwrap_err();
        assert_eq!(err.position(), Position::Byte(6));
    }

    #[test]
    fn with_bytes_across_small_buffer() {
        let data: Vec<u8> = (0..100).collect();
        let r = io::BufReader::with_capacity(7, &data[..]);
        let mut s = Source::new(r);
        s.skip(3, "x").unwrap();
        let sum = s
            .with_bytes(50, "x", |b| b.iter().map(|&x| x as u32).sum::<u32>())
            .unwrap();
        assert_eq!(sum, (3..53).sum::<u32>());
        assert_eq!(s.pos(), 53);
    }

    #[test]
    fn read_until_and_skip_while() {
        let mut s = Source::new(&b"\n\n word rest"[..]);
        assert_eq!(s.skip_while(|b| b == b'\n' || b == b' ').unwrap(), 3);
        let mut w = Vec::new();
        assert!(s.read_until(b' ', &mut w).unwrap());
        assert_eq!(w, b"word");
        w.clear();
        assert!(!s.read_until(b' ', &mut w).unwrap());
        assert_eq!(w, b"rest");
        assert!(s.at_eof().unwrap());
    }
}

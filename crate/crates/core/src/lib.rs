//! Streaming readers and writers for word-embedding files.
//!
//! Four on-disk formats are supported:
//!
//! * **Leader**: fully binary, a 24-byte header (magic, vocab size, vector
//!   size as little-endian `u64`) followed by length-prefixed records;
//! * **GloVe**: one `word v1 ... vd` text line per word;
//! * **word2vec text**: GloVe lines preceded by a `"<vocab> <dim>"` line;
//! * **word2vec binary**: the same header, then `word`, a space and `d`
//!   little-endian `f32`s per record.
//!
//! [`read_any`] sniffs the format and reads; [`convert`] rewrites a file in
//! another format. Reads can be restricted to a vocabulary without
//! materializing vectors for the other words, and duplicate words are
//! resolved by an explicit [`DedupPolicy`].
//!
//! ```
//! use std::io::Cursor;
//! use wordvecs::{read_any, write_leader, ReadOptions};
//!
//! let glove = b"the 0.5 -1.25\ncat 2 0.125\n";
//! let read = read_any(Cursor::new(&glove[..]), &ReadOptions::default(), None).unwrap();
//! assert_eq!(read.embeddings.lookup("cat"), Some(&[2.0, 0.125][..]));
//!
//! let mut leader = Vec::new();
//! let n = write_leader(&read.embeddings, &mut leader).unwrap();
//! assert_eq!(n, 24 + (4 + 3 + 8) * 2);
//! ```

pub mod bench;
mod collect;
pub mod error;
pub mod leader;
pub mod legacy;
pub mod model;
pub mod sniff;
mod source;
pub mod stats;
pub mod vector_io;
mod vocab;

pub use collect::{ReadCounts, ReadOutcome};
pub use error::{Error, ErrorKind, Position, Result};
pub use leader::{
    expected_leader_size, read_leader, read_leader_header, read_leader_with, write_leader,
    LeaderHeader, MAGIC,
};
pub use legacy::{
    read_glove_text, read_w2v_binary, read_w2v_text, write_glove_text, write_w2v_binary,
    write_w2v_text, W2VTextHeader,
};
pub use model::{build_embeddings, DedupPolicy, Embeddings, FormatKind, ReadOptions, Similarity};
pub use sniff::{sniff, SniffReport};
pub use stats::{summarize, welch_t_test, StatSummary, TimingSample, WelchResult};
pub use vector_io::{
    convert, convert_path, inspect, read_any, read_format, read_path, write_format, write_path,
    ConvertStats,
};

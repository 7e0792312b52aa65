//! Write one synthetic embedding in every format, for use with
//! `wordvecs bench`.
//!
//!     cargo run --release --example make_corpus -- OUT_DIR [N] [DIM] [SEED]

use std::path::PathBuf;

use wordvecs::{vector_io, FormatKind};

#[path = "../tests/common/corpus.rs"]
mod corpus;

fn main() -> wordvecs::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(
        args.next()
            .expect("usage: make_corpus OUT_DIR [N] [DIM] [SEED]"),
    );
    let n = args.next().map_or(1_000_000, |s| s.parse().expect("N"));
    let dim = args.next().map_or(100, |s| s.parse().expect("DIM"));
    let seed = args.next().map_or(7, |s| s.parse().expect("SEED"));

    std::fs::create_dir_all(&dir).expect("create output directory");
    let emb = corpus::synthetic(n, dim, seed);
    for (kind, name) in [
        (FormatKind::Leader, "vectors.leader"),
        (FormatKind::W2VBinary, "vectors.bin"),
        (FormatKind::W2VText, "vectors.vec"),
        (FormatKind::GloveText, "vectors.txt"),
    ] {
        let path = dir.join(name);
        let bytes = vector_io::write_path(&emb, &path, kind)?;
        println!("{}\t{kind}\t{bytes} bytes", path.display());
    }
    Ok(())
}

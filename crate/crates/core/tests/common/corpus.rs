//! Synthetic embedding corpora shared by the benchmark example and the
//! acceptance suite.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wordvecs::{build_embeddings, DedupPolicy, Embeddings};

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

/// `n` unique ASCII words (GloVe-like lengths) with `dim` values in
/// (-1, 1) rounded to 5 decimals, so the text formats stay compact.
pub fn synthetic(n: usize, dim: usize, seed: u64) -> Embeddings {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut words = Vec::with_capacity(n);
    let mut matrix = Vec::with_capacity(n * dim);
    for i in 0..n {
        let stem = rng.gen_range(1..=6);
        let mut w: String = (0..stem)
            .map(|_| LETTERS[rng.gen_range(0..LETTERS.len())] as char)
            .collect();
        // letters then decimal digits, so the split point is unambiguous
        w.push_str(&i.to_string());
        words.push(w);
        matrix.extend((0..dim).map(|_| {
            let q: i32 = rng.gen_range(-99_999..=99_999);
            (q as f64 / 1e5) as f32
        }));
    }
    build_embeddings(
        words.into_iter().zip(matrix.chunks_exact(dim)),
        dim,
        DedupPolicy::Error,
    )
    .expect("synthetic words are unique")
}

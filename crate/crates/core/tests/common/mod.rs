#![allow(dead_code)]

pub mod corpus;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::Rng;
use wordvecs::{build_embeddings, DedupPolicy, Embeddings, FormatKind};

/// Characters from many scripts, 1 to 4 UTF-8 bytes each, including the
/// Unicode spaces that a naive whitespace split would break on. None of them
/// is 0x20, 0x0A or 0x0D, so words built from them are legal in every format.
pub const TEXT_SAFE: &[char] = &[
    'a', 'k', 'z', 'Q', '7', '0', '_', '-', '.', ',', '\'', '\t', 'é', 'ß', 'ñ', 'ø', 'Ł', 'α',
    'Ω', 'ж', 'Я', 'ש', 'ع', 'क', 'ก', '한', '中', '文', '日', 'ー', '€', '😀', '🦀', '𝄞',
    '\u{00A0}', '\u{2028}', '\u{2029}', '\u{3000}', '\u{FEFF}', '\u{0301}', '\u{200B}', '\u{1680}',
];

/// Bytes that only Leader can carry inside a word.
pub const DELIMITERS: &[char] = &[' ', '\n', '\r'];

pub fn leader_pool() -> Vec<char> {
    TEXT_SAFE.iter().chain(DELIMITERS).copied().collect()
}

pub fn random_word<R: Rng>(rng: &mut R, pool: &[char], max_chars: usize) -> String {
    let len = rng.gen_range(1..=max_chars);
    (0..len)
        .map(|_| pool[rng.gen_range(0..pool.len())])
        .collect()
}

/// Any bit pattern, NaN payloads included.
pub fn any_bits<R: Rng>(rng: &mut R) -> f32 {
    f32::from_bits(rng.gen())
}

/// Any bit pattern except NaN: every such value survives a text round trip.
pub fn text_safe_value<R: Rng>(rng: &mut R) -> f32 {
    loop {
        let v = any_bits(rng);
        if !v.is_nan() {
            return v;
        }
    }
}

pub fn random_embeddings<R: Rng>(
    rng: &mut R,
    n: usize,
    dim: usize,
    pool: &[char],
    value: fn(&mut R) -> f32,
) -> Embeddings {
    let mut seen = HashSet::new();
    let mut words = Vec::with_capacity(n);
    while words.len() < n {
        let w = random_word(rng, pool, 8);
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    let values: Vec<f32> = (0..n * dim).map(|_| value(rng)).collect();
    build_embeddings(
        words.into_iter().zip(values.chunks(dim)),
        dim,
        DedupPolicy::Error,
    )
    .unwrap()
}

/// Same words, NaNs replaced by a fixed finite value.
pub fn without_nan(emb: &Embeddings) -> Embeddings {
    build_embeddings(
        emb.iter().map(|(w, v)| {
            let v: Vec<f32> = v
                .iter()
                .map(|&x| if x.is_nan() { 0.5 } else { x })
                .collect();
            (w.to_owned(), v)
        }),
        emb.dim(),
        DedupPolicy::Error,
    )
    .unwrap()
}

pub fn word_strategy(pool: Vec<char>) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(pool), 1..8).prop_map(|cs| cs.into_iter().collect())
}

/// Embeddings with unique words from `pool`; `text_values` excludes NaN.
pub fn embeddings_strategy(
    pool: Vec<char>,
    max_n: usize,
    max_dim: usize,
    text_values: bool,
) -> impl Strategy<Value = Embeddings> {
    let value = any::<u32>()
        .prop_map(f32::from_bits)
        .prop_filter("NaN has no text form", move |v| {
            !(text_values && v.is_nan())
        });
    (
        1..=max_dim,
        prop::collection::hash_set(word_strategy(pool), 1..=max_n),
    )
        .prop_flat_map(move |(dim, words)| {
            let n = words.len();
            (
                Just(dim),
                Just(words.into_iter().collect::<Vec<_>>()),
                prop::collection::vec(value.clone(), n * dim),
            )
        })
        .prop_map(|(dim, words, values)| {
            build_embeddings(
                words.into_iter().zip(values.chunks(dim)),
                dim,
                DedupPolicy::Error,
            )
            .unwrap()
        })
}

pub fn to_bytes(emb: &Embeddings, format: FormatKind) -> Vec<u8> {
    let mut out = Vec::new();
    let n = wordvecs::write_format(emb, format, &mut out).unwrap();
    assert_eq!(n, out.len() as u64);
    out
}

pub fn from_bytes(bytes: &[u8], format: FormatKind) -> Embeddings {
    wordvecs::read_format(bytes, format, &wordvecs::ReadOptions::default())
        .unwrap()
        .embeddings
}

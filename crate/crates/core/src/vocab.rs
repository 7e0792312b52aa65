//! Insertion-ordered word set.

use std::fmt;

use indexmap::IndexSet;

// Seeded per process, so crafted vocabularies cannot force collisions, but
// much cheaper than SipHash on short keys.
type Hasher = foldhash::fast::RandomState;

#[derive(Clone, Default)]
pub(crate) struct Vocab {
    words: IndexSet<String, Hasher>,
}

impl Vocab {
    pub fn with_capacity(words: usize) -> Self {
        Vocab {
            words: IndexSet::with_capacity_and_hasher(words, Hasher::default()),
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, row: usize) -> Option<&str> {
        self.words.get_index(row).map(String::as_str)
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.words.get_index_of(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// Row of `word`, appending it first if absent. The flag is true when
    /// the word was new.
    pub fn insert_full(&mut self, word: &str) -> (usize, bool) {
        // one probe; the copy is wasted only for duplicates, which are rare
        self.words.insert_full(word.to_owned())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.words.iter().map(String::as_str)
    }
}

// IndexSet equality ignores order; ours does not.
impl PartialEq for Vocab {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().eq(other.iter())
    }
}

impl fmt::Debug for Vocab {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

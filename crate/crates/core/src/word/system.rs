use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::error::{WordError, WordResult};
use super::expr::{WordExpr, DEFAULT_MATERIALIZE_CAP};

/// Which task a word system is meant to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// Musical chairs: cyclic words, any start position.
    #[default]
    Mc,
    /// Renaming: linear words, every player starts on its first letter.
    Renaming,
}

/// An ordered collection of words over the chairs `1..=m`.
#[derive(Clone, Debug)]
pub struct WordSystem {
    m: u32,
    kind: SystemKind,
    name: String,
    labels: Vec<String>,
    words: Vec<WordExpr>,
}

impl WordSystem {
    /// Words are labelled `w1, w2, ...`.
    pub fn new(m: u32, kind: SystemKind, words: Vec<WordExpr>) -> WordResult<Self> {
        let labels = (1..=words.len()).map(|i| format!("w{i}")).collect();
        Self::with_labels(m, kind, labels, words)
    }

    pub fn with_labels(
        m: u32,
        kind: SystemKind,
        labels: Vec<String>,
        words: Vec<WordExpr>,
    ) -> WordResult<Self> {
        if words.is_empty() {
            return Err(WordError::NoWords);
        }
        assert_eq!(labels.len(), words.len(), "one label per word");
        for w in &words {
            if w.max_chair() > m {
                return Err(WordError::BadChair {
                    chair: w.max_chair() as i64,
                    m,
                });
            }
        }
        Ok(WordSystem {
            m,
            kind,
            name: String::new(),
            labels,
            words,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn words(&self) -> &[WordExpr] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &WordExpr {
        &self.words[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Sub-system made of the listed words, in the listed order.
    pub fn select(&self, indices: &[usize]) -> WordSystem {
        WordSystem {
            m: self.m,
            kind: self.kind,
            name: self.name.clone(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            words: indices.iter().map(|&i| self.words[i].clone()).collect(),
        }
    }

    /// A musical-chairs system must not contain two identical words: the
    /// owners could move in lock-step forever.
    pub fn ensure_distinct(&self) -> WordResult<()> {
        for i in 0..self.words.len() {
            for j in i + 1..self.words.len() {
                if self.words[i].same_word(&self.words[j], DEFAULT_MATERIALIZE_CAP) {
                    return Err(WordError::IdenticalWords {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(())
    }

    /// Indices of words containing every chair `1..=m`.
    pub fn full_words(&self) -> Vec<bool> {
        self.words.iter().map(|w| w.is_full(self.m)).collect()
    }

    /// SHA-256 of the canonical text serialization, hex encoded.
    pub fn digest(&self) -> String {
        let text = super::codec::serialize(self).expect("digest of a serializable system");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

impl PartialEq for WordSystem {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.kind == other.kind
            && self.labels == other.labels
            && self.words.len() == other.words.len()
            && self.words.iter().zip(&other.words).all(|(a, b)| a == b)
    }
}

//! Text features: tokenization, TF-IDF, hashed embeddings, vector
//! similarity and edit distance.

mod embeddings;
mod hashing;
mod levenshtein;
mod tfidf;
mod tokenize;
mod vector;

pub use embeddings::{load_embeddings, parse_embeddings, EmbeddingStore};
pub use hashing::{hash_embed, MIN_HASH_DIM};
pub use levenshtein::{levenshtein, within_distance};
pub use tfidf::{fit_tfidf, TfIdfModel};
pub use tokenize::{Tokenizer, TokenizerMode, PAD};
pub use vector::{cosine, sparse_cosine, DenseVector, SparseVector};

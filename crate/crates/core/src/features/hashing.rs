//! Deterministic hashed bag-of-tokens embeddings.
//!
//! Uses FNV-1a over the token's UTF-8 bytes so vectors are identical across
//! runs and platforms. A second, independently seeded hash picks the sign.

use super::{DenseVector, Tokenizer};
use crate::error::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const SIGN_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

fn fnv1a(bytes: &[u8], seed: u64) -> u64 {
    let mut hash = FNV_OFFSET ^ seed;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

pub const MIN_HASH_DIM: usize = 8;

pub fn hash_embed(text: &str, dim: usize, tokenizer: &Tokenizer) -> Result<DenseVector> {
    if dim < MIN_HASH_DIM {
        return Err(Error::invalid(format!("hash dimension must be >= {MIN_HASH_DIM}, got {dim}")));
    }
    let mut values = vec![0.0f64; dim];
    for token in tokenizer.tokenize(text) {
        let bucket = (fnv1a(token.as_bytes(), 0) % dim as u64) as usize;
        let sign = if fnv1a(token.as_bytes(), SIGN_SEED) & 1 == 0 { 1.0 } else { -1.0 };
        values[bucket] += sign;
    }
    Ok(DenseVector::new(values)?.normalized())
}

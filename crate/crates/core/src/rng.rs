//! Seed derivation and keyed random substreams.
//!
//! Every random draw in the workbench comes from a stream keyed by
//! `(seed, purpose, ids...)`, so results do not depend on evaluation order
//! and changing one stage never perturbs another stage's randomness.

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

/// The generator used for every substream.
pub type StreamRng = Pcg64Mcg;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one well-mixed key.
#[inline]
pub fn hash_words(seed: u64, words: &[u64]) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    for &w in words {
        h = mix64(h ^ w.wrapping_add(GOLDEN).wrapping_add(h << 6).wrapping_add(h >> 2));
    }
    h
}

/// Stable 64-bit tag for a textual label (FNV-1a).
pub fn label_tag(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Derives a module seed from the master seed and a label.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    hash_words(master, &[label_tag(label)])
}

/// Opens the substream keyed by `(seed, words...)`.
#[inline]
pub fn substream(seed: u64, words: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(hash_words(seed, words))
}

//! Buckets of frequency vectors with sample trees, counts and provenance.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::chemgraph::ElemId;
use crate::descriptors::{FrequencyVector, RootedFragment};

/// Which family of fragments a bucket holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BucketKind {
    /// Bi-rooted end-subtrees, vector f(T[+1]).
    End,
    /// Rooted fringe trees on a path, vector f(T[+2]).
    Inl,
    /// Rooted fringe trees at the joint vertex, vector f(T[+3]).
    Inl3,
    /// Bi-rooted end-subtrees hanging from the joint vertex, vector f(T[+2]).
    End2,
    /// Tri-rooted main-subtrees, vector f(T⟨+1⟩).
    Main,
}

impl BucketKind {
    pub fn name(self) -> &'static str {
        match self {
            BucketKind::End => "end",
            BucketKind::Inl => "inl",
            BucketKind::Inl3 => "inl+3",
            BucketKind::End2 => "end+2",
            BucketKind::Main => "main",
        }
    }
}

/// Bucket key: element, degree and bond sum of the attachment terminal
/// (r1, or the joint vertex r3 for main-subtrees), backbone length and kind.
///
/// For main-subtrees `h` is the length of the path from the joint vertex to
/// the terminal of the longer arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BucketKey {
    pub kind: BucketKind,
    pub h: usize,
    pub a: ElemId,
    pub d: u8,
    pub m: u8,
}

impl BucketKey {
    pub fn new(kind: BucketKind, h: usize, a: ElemId, d: u8, m: u8) -> Self {
        BucketKey { kind, h, a, d, m }
    }
}

/// How a stored fragment was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// A fringe tree generated directly.
    Tree(RootedFragment),
    /// The left fragment's terminal joined to the right fragment's r1.
    Join {
        left: (BucketKey, FrequencyVector),
        right: (BucketKey, FrequencyVector),
        q: u8,
    },
}

/// One stored vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    /// First-constructed fragment realizing the vector.
    pub sample: RootedFragment,
    /// Number of pairwise non-isomorphic fragments realizing the vector.
    pub count: BigUint,
    /// All constructions, kept only in exhaustive mode.
    pub origins: Vec<Origin>,
}

/// Vectors of one key, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorBucket {
    pub key: BucketKey,
    pub entries: BTreeMap<FrequencyVector, Entry>,
    /// Size cap; the lexicographically smallest vectors are kept.
    cap: usize,
    /// Set once a vector was dropped by the cap.
    pub truncated: bool,
}

impl VectorBucket {
    pub fn new(key: BucketKey, cap: usize) -> Self {
        VectorBucket {
            key,
            entries: BTreeMap::new(),
            cap: cap.max(1),
            truncated: false,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Records one construction of `w` with multiplicity `count`.
    ///
    /// `sample` is only evaluated for a new vector. Returns false if the cap
    /// rejected the vector.
    pub fn add<F>(&mut self, w: FrequencyVector, count: BigUint, origin: Option<Origin>, sample: F) -> bool
    where
        F: FnOnce() -> RootedFragment,
    {
        if let Some(e) = self.entries.get_mut(&w) {
            e.count += count;
            if let Some(o) = origin {
                e.origins.push(o);
            }
            return true;
        }
        if self.entries.len() >= self.cap {
            let max = self.entries.keys().next_back().expect("cap >= 1");
            if &w > max {
                self.truncated = true;
                return false;
            }
            self.entries.pop_last();
            self.truncated = true;
        }
        self.entries.insert(
            w,
            Entry {
                sample: sample(),
                count,
                origins: origin.into_iter().collect(),
            },
        );
        true
    }

    /// Adds a single fragment counted once.
    pub fn add_one(&mut self, w: FrequencyVector, frag: RootedFragment, keep_origin: bool) -> bool {
        let origin = keep_origin.then(|| Origin::Tree(frag.clone()));
        self.add(w, BigUint::one(), origin, || frag)
    }

    /// Every stored vector is componentwise at most `x`.
    pub fn within(&self, x: &FrequencyVector) -> bool {
        self.entries.keys().all(|w| w.le(x))
    }
}

/// All buckets computed so far, by key.
pub type Family = BTreeMap<BucketKey, VectorBucket>;

/// Buckets of one kind and backbone length.
pub fn buckets_of(family: &Family, kind: BucketKind, h: usize) -> Vec<&VectorBucket> {
    family.values().filter(|b| b.key.kind == kind && b.key.h == h).collect()
}

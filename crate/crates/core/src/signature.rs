//! Signature families of vertex subsets and replica extraction.
//!
//! The signature of a regular embedding is the set of target levels its
//! image occupies. For a subset `H` of `V(T_n)` the family `S(H)` of all
//! signatures is computed by one bottom-up sweep: writing `H'`, `H''` for
//! the restrictions of `H` to the two subtrees under a vertex `v` at global
//! level `l`,
//!
//! * `v` not in `H`:  `S = S(H') ∪ S(H'')`
//! * `v` in `H`:      `S = S(H') ∪ S(H'') ∪ { σ ∪ {l} : σ ∈ S(H') ∩ S(H'') }`
//!
//! with `S(∅) = {∅}`. Signatures are 64-bit level masks in global
//! coordinates, kept as sorted arrays during the sweep (unions and
//! intersections are linear merges) and exposed as a hash set.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::exact::{binomial_partial_sum, pow2_gt};
use crate::par;
use crate::tree::{DyadicWeight, TreeSubset, VertexId};
use crate::witness::EmbeddingWitness;

/// Largest depth for which `signature_set` will materialize the family by
/// default (worst case `2^n` masks).
pub const DEFAULT_FAMILY_CAP: u32 = 20;

/// Subtree sizes below this many levels are folded sequentially instead of
/// being forked.
const JOIN_CUTOFF: u32 = 12;

/// A set of levels of `T_n` as a bitmask; bit `l` set means level `l` is
/// occupied. Requires `n <= 63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(pub u64);

impl Signature {
    pub const EMPTY: Signature = Signature(0);

    pub fn from_levels(levels: &[u32], depth: u32) -> Result<Signature> {
        let mut mask = 0u64;
        for &l in levels {
            if l >= depth {
                return Err(Error::Domain(format!("level {l} out of range for depth {depth}")));
            }
            mask |= 1 << l;
        }
        Ok(Signature(mask))
    }

    /// Parses `0,2,5` (empty string means the empty signature).
    pub fn parse_levels(s: &str, depth: u32) -> Result<Signature> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Signature::EMPTY);
        }
        let mut levels = Vec::new();
        for piece in s.split(',') {
            let l: u32 = piece
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad level `{piece}`: {e}")))?;
            levels.push(l);
        }
        Signature::from_levels(&levels, depth)
    }

    /// Number of occupied levels, i.e. the depth of the embedded tree.
    pub fn size(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains_level(self, level: u32) -> bool {
        level < 64 && self.0 >> level & 1 == 1
    }

    pub fn is_subset_of(self, other: Signature) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn levels(self) -> Vec<u32> {
        (0..64).filter(|&l| self.contains_level(l)).collect()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in self.levels() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

/// The set of signatures of all regular embeddings into a subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureFamily {
    depth: u32,
    masks: HashSet<u64>,
}

impl SignatureFamily {
    pub fn from_masks<I: IntoIterator<Item = u64>>(depth: u32, masks: I) -> Self {
        SignatureFamily { depth, masks: masks.into_iter().collect() }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn contains(&self, sig: Signature) -> bool {
        self.masks.contains(&sig.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Signature> + '_ {
        self.masks.iter().map(|&m| Signature(m))
    }

    /// Masks in ascending numeric order (the cache-friendly variant used
    /// for merges and for deterministic scans).
    pub fn to_sorted(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.masks.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Largest signature size present; 0 for the family `{∅}`.
    pub fn max_size(&self) -> u32 {
        self.masks.iter().map(|m| m.count_ones()).max().unwrap_or(0)
    }
}

pub(crate) fn merge_union(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Union plus, when `lift_bit` is set (the subtree root is in `H`), the
/// intersection of the child families with that level bit added. The lifted
/// masks are disjoint from the union because child masks never contain the
/// root's level, so a final linear merge suffices.
fn combine_families(left: &[u64], right: &[u64], lift_bit: Option<u64>) -> Vec<u64> {
    let union = merge_union(left, right);
    let Some(bit) = lift_bit else {
        return union;
    };
    let mut lifted = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        match left[i].cmp(&right[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                lifted.push(left[i] | bit);
                i += 1;
                j += 1;
            }
        }
    }
    merge_union(&union, &lifted)
}

fn family_rec(h: &TreeSubset, v: u64, level: u32, parallel: bool) -> Vec<u64> {
    if level == h.depth() {
        return vec![0];
    }
    let go = |child: u64| family_rec(h, child, level + 1, parallel);
    let (left, right) = if parallel && h.depth() - level > JOIN_CUTOFF {
        par::join(|| family_rec(h, 2 * v, level + 1, parallel), || {
            family_rec(h, 2 * v + 1, level + 1, parallel)
        })
    } else {
        (go(2 * v), go(2 * v + 1))
    };
    let lift = h.contains(VertexId(v)).then_some(1u64 << level);
    combine_families(&left, &right, lift)
}

fn signature_masks(h: &TreeSubset, cap: u32, parallel: bool) -> Result<Vec<u64>> {
    if h.depth() > cap {
        return Err(Error::ResourceLimit(format!(
            "signature family at depth {} exceeds the cap {cap}",
            h.depth()
        )));
    }
    if h.depth() == 0 {
        return Ok(vec![0]);
    }
    Ok(family_rec(h, 1, 0, parallel))
}

/// Exact signature family `S(H)` in global level coordinates.
pub fn signature_set(h: &TreeSubset) -> Result<SignatureFamily> {
    signature_set_with_cap(h, DEFAULT_FAMILY_CAP)
}

pub fn signature_set_with_cap(h: &TreeSubset, cap: u32) -> Result<SignatureFamily> {
    Ok(SignatureFamily::from_masks(h.depth(), signature_masks(h, cap, true)?))
}

/// Sequential reference path for the same computation.
pub fn signature_set_seq(h: &TreeSubset) -> Result<SignatureFamily> {
    Ok(SignatureFamily::from_masks(h.depth(), signature_masks(h, DEFAULT_FAMILY_CAP, false)?))
}

/// Largest `d` such that `H` contains a replica of `T_d`.
pub fn max_replica_depth(h: &TreeSubset) -> Result<u32> {
    Ok(signature_set(h)?.max_size())
}

/// Membership test `target ∈ S(H restricted to the subtree at v)` without
/// materializing the family. The mask passed down a branch is a function of
/// the level alone, so each vertex is visited at most once.
fn subtree_realizes(h: &TreeSubset, v: u64, level: u32, target: u64) -> bool {
    if target == 0 {
        return true;
    }
    if level >= h.depth() {
        return false;
    }
    let min = target.trailing_zeros();
    if min < level {
        return false;
    }
    if min == level {
        let rest = target & (target - 1);
        h.contains(VertexId(v))
            && subtree_realizes(h, 2 * v, level + 1, rest)
            && subtree_realizes(h, 2 * v + 1, level + 1, rest)
    } else {
        subtree_realizes(h, 2 * v, level + 1, target)
            || subtree_realizes(h, 2 * v + 1, level + 1, target)
    }
}

/// True iff some regular embedding into `H` occupies exactly `target`.
pub fn realizes(h: &TreeSubset, target: Signature) -> bool {
    if target.0 >> h.depth().min(63) != 0 {
        return false;
    }
    subtree_realizes(h, 1, 0, target.0)
}

fn build_witness(
    h: &TreeSubset,
    v: u64,
    level: u32,
    target: u64,
    source: u64,
    map: &mut [VertexId],
) {
    if target == 0 {
        return;
    }
    let min = target.trailing_zeros();
    if min == level {
        debug_assert!(h.contains(VertexId(v)));
        map[(source - 1) as usize] = VertexId(v);
        let rest = target & (target - 1);
        build_witness(h, 2 * v, level + 1, rest, 2 * source, map);
        build_witness(h, 2 * v + 1, level + 1, rest, 2 * source + 1, map);
    } else if subtree_realizes(h, 2 * v, level + 1, target) {
        build_witness(h, 2 * v, level + 1, target, source, map);
    } else {
        build_witness(h, 2 * v + 1, level + 1, target, source, map);
    }
}

/// Deterministic witness for `target`: the recursion consumes the lowest
/// level of the target at the first vertex of `H` that can host it, breaking
/// ties toward the left subtree.
pub fn extract_replica(h: &TreeSubset, target: Signature) -> Result<EmbeddingWitness> {
    if h.depth() < 64 && target.0 >> h.depth() != 0 {
        return Err(Error::NoWitness { signature: target.0 });
    }
    if !realizes(h, target) {
        return Err(Error::NoWitness { signature: target.0 });
    }
    let d = target.size();
    let mut map = vec![VertexId(0); (1usize << d) - 1];
    build_witness(h, 1, 0, target.0, 1, &mut map);
    Ok(EmbeddingWitness { d, n: h.depth(), map, signature: target })
}

/// Threshold test: `2^w > sum_{i=0}^{d-1} C(n, i)`, decided exactly.
pub fn theorem1_check(n: u32, d: u32, w: &DyadicWeight) -> bool {
    let sum = binomial_partial_sum(n as u64, d as u64);
    pow2_gt(w, &sum)
}

/// A validated witness of depth exactly `d`, if one exists.
pub fn contains_replica(h: &TreeSubset, d: u32) -> Result<Option<EmbeddingWitness>> {
    if d == 0 {
        return Ok(Some(EmbeddingWitness::empty(h.depth())));
    }
    let family = signature_set(h)?;
    let mut best: Option<u64> = None;
    for sig in family.iter() {
        if sig.size() == d && best.is_none_or(|b| sig.0 < b) {
            best = Some(sig.0);
        }
    }
    // Downward closure of S(H) guarantees a size-d member whenever any
    // larger one exists.
    debug_assert!(best.is_some() || family.max_size() < d);
    match best {
        Some(mask) => Ok(Some(extract_replica(h, Signature(mask))?)),
        None => Ok(None),
    }
}

/// The counting inequality: `|S(H)| >= 2^(w(H))`, decided exactly.
pub fn lemma3_holds(h: &TreeSubset) -> Result<bool> {
    let family = signature_set(h)?;
    let w = h.weight();
    Ok(!pow2_gt(&w, &BigUint::from(family.len() as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitRng;

    /// Test-only oracle: tries every assignment of images straight from the
    /// regular-embedding definition, one signature at a time.
    fn oracle_realizes(h: &TreeSubset, levels: &[u32]) -> bool {
        fn place(h: &TreeSubset, levels: &[u32], idx: usize, anchor: VertexId) -> bool {
            if idx == levels.len() {
                return true;
            }
            let level = levels[idx];
            for id in 1u64 << level..1u64 << (level + 1) {
                let img = VertexId(id);
                if !h.contains(img) || !img.is_descendant_of(anchor) {
                    continue;
                }
                if idx + 1 == levels.len() {
                    return true;
                }
                if place(h, levels, idx + 1, img.left_child())
                    && place(h, levels, idx + 1, img.right_child())
                {
                    return true;
                }
            }
            false
        }
        if levels.is_empty() {
            return true;
        }
        place(h, levels, 0, VertexId(1))
    }

    fn oracle_family(h: &TreeSubset) -> Vec<u64> {
        let n = h.depth();
        let mut out = Vec::new();
        for mask in 0u64..1 << n {
            let levels: Vec<u32> = (0..n).filter(|&l| mask >> l & 1 == 1).collect();
            if oracle_realizes(h, &levels) {
                out.push(mask);
            }
        }
        out
    }

    #[test]
    fn empty_subset_has_only_the_empty_signature() {
        for depth in 0..5 {
            let fam = signature_set(&TreeSubset::empty(depth).unwrap()).unwrap();
            assert_eq!(fam.len(), 1);
            assert!(fam.contains(Signature::EMPTY));
        }
    }

    #[test]
    fn full_t2_family() {
        let fam = signature_set(&TreeSubset::full(2).unwrap()).unwrap();
        assert_eq!(fam.to_sorted(), vec![0b00, 0b01, 0b10, 0b11]);
    }

    #[test]
    fn leaves_of_t3_family() {
        let leaves = TreeSubset::level_set(3, 2).unwrap();
        let fam = signature_set(&leaves).unwrap();
        assert_eq!(fam.to_sorted(), vec![0b000, 0b100]);
        assert_eq!(fam.max_size(), 1);
    }

    #[test]
    fn full_tree_family_is_the_powerset() {
        for n in 1..=6u32 {
            let fam = signature_set(&TreeSubset::full(n).unwrap()).unwrap();
            assert_eq!(fam.len(), 1 << n);
        }
    }

    #[test]
    fn family_matches_oracle_exhaustively_small() {
        for n in 0..=3u32 {
            let count = TreeSubset::vertex_count(n);
            for bits in 0u64..1 << count {
                let h = TreeSubset::from_vertices(
                    n,
                    (1..=count).filter(|&id| bits >> (id - 1) & 1 == 1),
                )
                .unwrap();
                let fam = signature_set(&h).unwrap();
                assert_eq!(fam.to_sorted(), oracle_family(&h), "n={n} bits={bits:b}");
            }
        }
    }

    #[test]
    fn family_matches_oracle_random() {
        let mut rng = SplitRng::new(31);
        for n in 4..=5u32 {
            for _ in 0..150 {
                let h = TreeSubset::random(n, 0.5, &mut rng).unwrap();
                let fam = signature_set(&h).unwrap();
                assert_eq!(fam.to_sorted(), oracle_family(&h));
            }
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let mut rng = SplitRng::new(8);
        for _ in 0..20 {
            let h = TreeSubset::random(8, 0.6, &mut rng).unwrap();
            assert_eq!(signature_set(&h).unwrap(), signature_set_seq(&h).unwrap());
        }
    }

    #[test]
    fn max_depth_examples() {
        assert_eq!(max_replica_depth(&TreeSubset::full(5).unwrap()).unwrap(), 5);

        let branch = TreeSubset::from_vertices(5, [1, 2, 4, 8, 16]).unwrap();
        assert_eq!(max_replica_depth(&branch).unwrap(), 1);

        let mut h = TreeSubset::full(4).unwrap();
        for id in 4..8 {
            h.remove(VertexId(id));
        }
        assert_eq!(max_replica_depth(&h).unwrap(), 3);
        assert_eq!(max_replica_depth(&TreeSubset::empty(4).unwrap()).unwrap(), 0);
    }

    #[test]
    fn root_in_case_counts_add_up() {
        let mut rng = SplitRng::new(12);
        for _ in 0..50 {
            let mut h = TreeSubset::random(6, 0.5, &mut rng).unwrap();
            h.insert(VertexId(1));
            let whole = signature_set(&h).unwrap();
            let left = signature_set(&h.restrict_to_subtree(VertexId(2)).unwrap()).unwrap();
            let right = signature_set(&h.restrict_to_subtree(VertexId(3)).unwrap()).unwrap();
            assert_eq!(whole.len(), left.len() + right.len());
        }
    }

    #[test]
    fn extraction_is_deterministic_and_valid() {
        let full = TreeSubset::full(3).unwrap();
        let target = Signature::from_levels(&[0, 2], 3).unwrap();
        let w = extract_replica(&full, target).unwrap();
        w.validate(&full).unwrap();
        assert_eq!(w.signature, target);
        // Leftmost construction: root at 1, leaves at the leftmost level-2
        // vertices under each child of the root.
        assert_eq!(w.map, vec![VertexId(1), VertexId(4), VertexId(6)]);
    }

    #[test]
    fn extraction_rejects_unrealizable_targets() {
        let leaves = TreeSubset::level_set(3, 2).unwrap();
        let target = Signature::from_levels(&[0, 1], 3).unwrap();
        assert!(matches!(
            extract_replica(&leaves, target),
            Err(Error::NoWitness { .. })
        ));
        // The empty target always works.
        let w = extract_replica(&leaves, Signature::EMPTY).unwrap();
        assert_eq!(w.d, 0);
    }

    #[test]
    fn theorem1_examples() {
        assert!(theorem1_check(2, 2, &DyadicWeight::from_int(2)));
        assert!(!theorem1_check(2, 2, &DyadicWeight::new(3, 1)));
        assert!(theorem1_check(10, 1, &DyadicWeight::new(1, 9)));
    }

    #[test]
    fn contains_replica_examples() {
        let full = TreeSubset::full(2).unwrap();
        let w = contains_replica(&full, 2).unwrap().unwrap();
        w.validate(&full).unwrap();
        assert_eq!(w.d, 2);

        let branch = TreeSubset::from_vertices(4, [1, 2, 4, 8]).unwrap();
        assert!(contains_replica(&branch, 2).unwrap().is_none());
        assert_eq!(contains_replica(&branch, 0).unwrap().unwrap().d, 0);
    }

    #[test]
    fn theorem1_true_implies_witness() {
        let mut rng = SplitRng::new(40);
        let mut hits = 0;
        for _ in 0..300 {
            let h = TreeSubset::random(8, 0.7, &mut rng).unwrap();
            if theorem1_check(8, 2, &h.weight()) {
                hits += 1;
                let w = contains_replica(&h, 2).unwrap().expect("threshold passed");
                w.validate(&h).unwrap();
            }
        }
        assert!(hits > 0, "the density sweep never hit the threshold");
    }

    #[test]
    fn lemma3_on_random_subsets() {
        let mut rng = SplitRng::new(64);
        for n in 1..=8u32 {
            for _ in 0..50 {
                let h = TreeSubset::random(n, 0.5, &mut rng).unwrap();
                assert!(lemma3_holds(&h).unwrap());
            }
        }
    }

    #[test]
    fn family_cap_is_enforced() {
        let h = TreeSubset::empty(21).unwrap();
        assert!(matches!(signature_set(&h), Err(Error::ResourceLimit(_))));
        assert!(signature_set_with_cap(&h, 21).is_ok());
    }
}

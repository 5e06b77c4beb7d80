//! Brute-force enumeration of regular embeddings, straight from the
//! definition and with no shared machinery with the signature sweep. Used
//! to cross-validate the dynamic program on small instances.

use ramsey_trees::error::{Error, Result};
use ramsey_trees::signature::{Signature, SignatureFamily};
use ramsey_trees::tree::{TreeSubset, VertexId};
use ramsey_trees::witness::EmbeddingWitness;

/// Enumeration caps: beyond these the embedding count explodes.
pub const ORACLE_DEPTH_CAP: u32 = 6;
pub const ORACLE_D_CAP: u32 = 4;
const WITNESS_COUNT_CAP: usize = 1 << 20;

/// Exhaustive output: every regular embedding of `T_d` into the subset,
/// plus the signature family derived by the same search over all depths.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub witnesses: Vec<EmbeddingWitness>,
    pub signatures: SignatureFamily,
}

fn descendants_at(anchor: VertexId, level: u32) -> impl Iterator<Item = VertexId> {
    let gap = level - anchor.level();
    let first = anchor.0 << gap;
    (first..first + (1 << gap)).map(VertexId)
}

/// All embeddings of the suffix `levels[idx..]` whose root image lies in
/// the subtree of `anchor`; each entry is a heap-ordered image list.
fn embed_all(
    h: &TreeSubset,
    levels: &[u32],
    idx: usize,
    anchor: VertexId,
    budget: &mut usize,
) -> Result<Vec<Vec<VertexId>>> {
    let mut out = Vec::new();
    for img in descendants_at(anchor, levels[idx]) {
        if !h.contains(img) {
            continue;
        }
        if idx + 1 == levels.len() {
            out.push(vec![img]);
            continue;
        }
        // Children of the embedded root go to descendants of distinct
        // children of the image, in either order.
        for (first, second) in [
            (img.left_child(), img.right_child()),
            (img.right_child(), img.left_child()),
        ] {
            let lefts = embed_all(h, levels, idx + 1, first, budget)?;
            if lefts.is_empty() {
                continue;
            }
            let rights = embed_all(h, levels, idx + 1, second, budget)?;
            for l in &lefts {
                for r in &rights {
                    *budget = budget
                        .checked_sub(1)
                        .ok_or_else(|| Error::ResourceLimit("embedding count over the cap".into()))?;
                    out.push(weave(img, l, r));
                }
            }
        }
    }
    Ok(out)
}

/// Merges a root image with the heap-ordered image lists of its two
/// subtrees into one heap-ordered list.
fn weave(root: VertexId, left: &[VertexId], right: &[VertexId]) -> Vec<VertexId> {
    let mut out = vec![VertexId(0); 1 + left.len() + right.len()];
    out[0] = root;
    for (sub, base) in [(left, 1u64), (right, 2u64)] {
        for (i0, &img) in sub.iter().enumerate() {
            let i = i0 as u64 + 1;
            let level = VertexId(i).level();
            let global = i + base * (1 << level);
            out[(global - 1) as usize] = img;
        }
    }
    out
}

/// Existence-only variant of the same search, stopping at the first
/// embedding per signature.
fn exists(h: &TreeSubset, levels: &[u32], idx: usize, anchor: VertexId) -> bool {
    for img in descendants_at(anchor, levels[idx]) {
        if !h.contains(img) {
            continue;
        }
        if idx + 1 == levels.len() {
            return true;
        }
        if exists(h, levels, idx + 1, img.left_child())
            && exists(h, levels, idx + 1, img.right_child())
        {
            return true;
        }
    }
    false
}

/// The signature family found by brute force: one existence search per
/// candidate level set.
pub fn oracle_signature_set(h: &TreeSubset) -> Result<SignatureFamily> {
    let n = h.depth();
    if n > ORACLE_DEPTH_CAP {
        return Err(Error::ResourceLimit(format!(
            "oracle depth cap is {ORACLE_DEPTH_CAP}, got {n}"
        )));
    }
    let mut masks = vec![0u64];
    for mask in 1u64..1 << n {
        let levels: Vec<u32> = (0..n).filter(|&l| mask >> l & 1 == 1).collect();
        if exists(h, &levels, 0, VertexId(1)) {
            masks.push(mask);
        }
    }
    Ok(SignatureFamily::from_masks(n, masks))
}

/// Every regular embedding of `T_d` into the subset, with the derived
/// signature family over all depths.
pub fn oracle_enumerate(h: &TreeSubset, d: u32) -> Result<OracleResult> {
    let n = h.depth();
    if n > ORACLE_DEPTH_CAP || d > ORACLE_D_CAP {
        return Err(Error::ResourceLimit(format!(
            "oracle caps are n <= {ORACLE_DEPTH_CAP}, d <= {ORACLE_D_CAP}; got n = {n}, d = {d}"
        )));
    }
    let signatures = oracle_signature_set(h)?;
    let mut witnesses = Vec::new();
    if d == 0 {
        witnesses.push(EmbeddingWitness::empty(n));
    } else {
        let mut budget = WITNESS_COUNT_CAP;
        for mask in 1u64..1 << n {
            if mask.count_ones() != d {
                continue;
            }
            let levels: Vec<u32> = (0..n).filter(|&l| mask >> l & 1 == 1).collect();
            for map in embed_all(h, &levels, 0, VertexId(1), &mut budget)? {
                witnesses.push(EmbeddingWitness {
                    d,
                    n,
                    map,
                    signature: Signature(mask),
                });
            }
        }
    }
    Ok(OracleResult { witnesses, signatures })
}

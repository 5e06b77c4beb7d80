//! The density pipeline: binary entropy and its inverse, the exact partial
//! binomial sum against the entropy bound, arithmetic-progression search in
//! level sets, and extraction of replicas whose occupied levels form an
//! arithmetic progression.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::exact::{binomial_partial_sum, log2_f64, pow2_gt};
use crate::signature::{extract_replica, signature_set, Signature};
use crate::tree::{DyadicWeight, TreeSubset, VertexId};
use crate::witness::EmbeddingWitness;

/// Binary entropy `h(eps) = -eps log2 eps - (1-eps) log2 (1-eps)`, with the
/// continuity convention `h(0) = h(1) = 0`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("entropy argument {eps} outside [0,1]")));
    }
    if eps == 0.0 || eps == 1.0 {
        return Ok(0.0);
    }
    Ok(-eps * eps.log2() - (1.0 - eps) * (1.0 - eps).log2())
}

/// The unique `eps` in (0, 1/2] with `h(eps) = delta`, by bisection to
/// absolute tolerance 1e-12.
pub fn inv_entropy(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("entropy value {delta} outside (0,1]")));
    }
    if delta == 1.0 {
        // The entropy is flat to float precision near 1/2; bisection would
        // land measurably below the exact answer.
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid)? < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of one entropy-bound check.
#[derive(Debug, Clone)]
pub struct ChernoffCheck {
    /// Exact `sum_{i=0}^{d-1} C(n, i)` with `d = ceil(eps * n)`.
    pub sum: BigUint,
    pub d: u64,
    /// `h(eps) * n`.
    pub bound_log2: f64,
    /// `log2(sum)`, for reporting.
    pub sum_log2: f64,
    /// Whether `sum < 2^(h(eps) n)` holds, decided exactly.
    pub holds: bool,
}

/// Exact check of the binomial tail bound `sum_{i<d} C(n,i) < 2^(h(eps) n)`.
/// The float bound is compared through its exact dyadic value, so boundary
/// cases cannot be misjudged.
pub fn chernoff_check(n: u64, eps: f64) -> Result<ChernoffCheck> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("eps {eps} outside (0, 1/2)")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let d = (eps * n as f64).ceil() as u64;
    debug_assert!(d >= 1);
    let sum = binomial_partial_sum(n, d);
    let bound_log2 = binary_entropy(eps)? * n as f64;
    let w = DyadicWeight::from_f64(bound_log2)?;
    let holds = pow2_gt(&w, &sum);
    Ok(ChernoffCheck { sum_log2: log2_f64(&sum), sum, d, bound_log2, holds })
}

/// An arithmetic progression `a, a+b, ..., a+(length-1)b` of levels.
/// `b = 0` only for the degenerate single-term progression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArithmeticProgression {
    pub start: u32,
    pub step: u32,
    pub length: u32,
}

impl ArithmeticProgression {
    pub fn terms(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.length).map(move |i| self.start + i * self.step)
    }

    pub fn signature(&self, depth: u32) -> Result<Signature> {
        let levels: Vec<u32> = self.terms().collect();
        Signature::from_levels(&levels, depth)
    }
}

/// A longest arithmetic progression inside the set, ties broken by the
/// smallest step and then the smallest start.
pub fn longest_ap(levels: &[u32]) -> Result<ArithmeticProgression> {
    if levels.is_empty() {
        return Err(Error::Domain("empty level set".into()));
    }
    let mut sorted: Vec<u32> = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let m = sorted.len();
    if m == 1 {
        return Ok(ArithmeticProgression { start: sorted[0], step: 0, length: 1 });
    }
    let index_of: std::collections::HashMap<u32, usize> =
        sorted.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // len[i][j]: length of the longest progression ending with
    // (sorted[i], sorted[j]); filling i in increasing order makes every
    // predecessor pair available when it is needed.
    let mut len = vec![vec![2u32; m]; m];
    let mut best = ArithmeticProgression { start: sorted[0], step: sorted[1] - sorted[0], length: 2 };
    for i in 0..m {
        for j in i + 1..m {
            let step = sorted[j] - sorted[i];
            if let Some(&k) = sorted[i].checked_sub(step).and_then(|prev| index_of.get(&prev)) {
                len[i][j] = len[k][i] + 1;
            }
            let cand = ArithmeticProgression {
                start: sorted[j] - (len[i][j] - 1) * step,
                step,
                length: len[i][j],
            };
            if (cand.length, std::cmp::Reverse(cand.step), std::cmp::Reverse(cand.start))
                > (best.length, std::cmp::Reverse(best.step), std::cmp::Reverse(best.start))
            {
                best = cand;
            }
        }
    }
    Ok(best)
}

/// Restriction of a witness to a sub-signature: keeps one representative
/// per surviving source vertex, following all-left descent paths inside the
/// original witness, so the result maps into the image of `witness`.
pub fn restrict_replica(
    witness: &EmbeddingWitness,
    sub: Signature,
) -> Result<EmbeddingWitness> {
    if !sub.is_subset_of(witness.signature) {
        return Err(Error::Domain(format!(
            "levels {sub} are not a subset of the witness signature {}",
            witness.signature
        )));
    }
    let kept: Vec<u32> = sub.levels();
    let all: Vec<u32> = witness.signature.levels();
    // kept_pos[j]: index within the witness level list of the j-th kept level.
    let kept_pos: Vec<u32> = kept
        .iter()
        .map(|l| all.iter().position(|x| x == l).unwrap() as u32)
        .collect();
    let d = kept.len() as u32;
    let mut map = vec![VertexId(0); (1usize << d) - 1];
    if d > 0 {
        // source: heap index in the restricted T_d; host: heap index in the
        // witness's source tree whose image represents it.
        let mut stack = vec![(1u64, (1u64) << kept_pos[0])];
        while let Some((source, host)) = stack.pop() {
            map[(source - 1) as usize] = witness.image(VertexId(host));
            let j = VertexId(source).level();
            if j + 1 < d {
                let drop = kept_pos[(j + 1) as usize] - kept_pos[j as usize] - 1;
                stack.push((2 * source, (2 * host) << drop));
                stack.push((2 * source + 1, (2 * host + 1) << drop));
            }
        }
    }
    Ok(EmbeddingWitness { d, n: witness.n, map, signature: sub })
}

/// Searches `S(H)` for a signature containing an arithmetic progression of
/// `length` levels and returns a witness restricted to that progression.
/// Signatures are scanned in decreasing size order (ascending mask value
/// within a size), so the result is deterministic.
pub fn arithmetic_replica(
    h: &TreeSubset,
    length: u32,
) -> Result<Option<(ArithmeticProgression, EmbeddingWitness)>> {
    if length == 0 {
        return Err(Error::Domain("progression length must be positive".into()));
    }
    let family = signature_set(h)?;
    let mut masks = family.to_sorted();
    masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    for mask in masks {
        let sig = Signature(mask);
        if sig.size() < length {
            break;
        }
        let ap = longest_ap(&sig.levels())?;
        if ap.length < length {
            continue;
        }
        let ap = ArithmeticProgression { start: ap.start, step: ap.step, length };
        let sub = ap.signature(h.depth())?;
        let full = extract_replica(h, sig)?;
        let restricted = restrict_replica(&full, sub)?;
        return Ok(Some((ap, restricted)));
    }
    Ok(None)
}

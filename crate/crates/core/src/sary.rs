//! Trees of arity `s`: weights `s^-level`, the weighted signature count,
//! the arity-`s` threshold test, and the reduction from general rooted
//! trees to binary subsets through the leaf-greedy map.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial, cmp_rational_vs_ratio_pow};
use crate::rng::SplitRng;
use crate::signature::{merge_union, SignatureFamily};
use crate::tree::{TreeSubset, VertexId, DEPTH_CAP};
use crate::witness::EmbeddingWitness;

/// Storage cap: `s^n` may not exceed this many vertices.
pub const SARY_STORAGE_CAP: u64 = 1 << 22;

/// Family cap for the s-ary signature sweep.
pub const SARY_FAMILY_CAP: u32 = 20;

/// A subset of the full `s`-ary tree `T_{n,s}`, which has levels `0..n-1`.
/// Vertices are 0-based: the root is 0 and the children of `v` are
/// `s*v + 1 ..= s*v + s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaryTreeSubset {
    depth: u32,
    arity: u32,
    bits: Vec<u64>,
}

impl SaryTreeSubset {
    /// Number of vertices: `(s^n - 1) / (s - 1)`.
    pub fn vertex_count(depth: u32, arity: u32) -> u64 {
        let mut total = 0u64;
        let mut level = 1u64;
        for _ in 0..depth {
            total += level;
            level *= arity as u64;
        }
        total
    }

    fn check_dims(depth: u32, arity: u32) -> Result<()> {
        if arity < 2 {
            return Err(Error::Domain(format!("arity must be at least 2, got {arity}")));
        }
        if (arity as u64).checked_pow(depth).is_none_or(|v| v > SARY_STORAGE_CAP) {
            return Err(Error::ResourceLimit(format!(
                "{arity}^{depth} vertices exceed the storage cap"
            )));
        }
        Ok(())
    }

    pub fn empty(depth: u32, arity: u32) -> Result<Self> {
        Self::check_dims(depth, arity)?;
        let nbits = Self::vertex_count(depth, arity) as usize;
        Ok(SaryTreeSubset { depth, arity, bits: vec![0; nbits.div_ceil(64)] })
    }

    pub fn full(depth: u32, arity: u32) -> Result<Self> {
        let mut s = Self::empty(depth, arity)?;
        for v in 0..Self::vertex_count(depth, arity) {
            s.insert(v);
        }
        Ok(s)
    }

    pub fn random(depth: u32, arity: u32, density: f64, rng: &mut SplitRng) -> Result<Self> {
        let mut s = Self::empty(depth, arity)?;
        let threshold = (density * (u64::MAX as f64)) as u64;
        for v in 0..Self::vertex_count(depth, arity) {
            if rng.next_u64() <= threshold {
                s.insert(v);
            }
        }
        Ok(s)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn contains(&self, v: u64) -> bool {
        let i = v as usize;
        i < Self::vertex_count(self.depth, self.arity) as usize
            && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, v: u64) {
        assert!(v < Self::vertex_count(self.depth, self.arity));
        self.bits[(v / 64) as usize] |= 1 << (v % 64);
    }

    /// Level of a vertex index, by walking the level partition.
    pub fn level_of(&self, v: u64) -> u32 {
        let mut start = 0u64;
        let mut width = 1u64;
        for level in 0..self.depth {
            if v < start + width {
                return level;
            }
            start += width;
            width *= self.arity as u64;
        }
        unreachable!("vertex out of range")
    }

    /// Exact weight: `sum s^-level(v)` over members, as a rational with
    /// denominator `s^(n-1)`.
    pub fn weight(&self) -> BigRational {
        if self.depth == 0 {
            return BigRational::zero();
        }
        let s = BigUint::from(self.arity);
        let mut num = BigUint::zero();
        let mut start = 0u64;
        let mut width = 1u64;
        for level in 0..self.depth {
            let count =
                (start..start + width).filter(|&v| self.contains(v)).count() as u64;
            num += BigUint::from(count) * s.pow(self.depth - 1 - level);
            start += width;
            width *= self.arity as u64;
        }
        BigRational::new(BigInt::from(num), BigInt::from(s.pow(self.depth - 1)))
    }

    /// Two-line text format mirroring the binary subset format, with the
    /// arity in the header: `s=<arity> n=<depth>` then hex, least
    /// significant bit = vertex 0.
    pub fn to_text(&self) -> String {
        let nbits = Self::vertex_count(self.depth, self.arity) as usize;
        let nibbles = nbits.div_ceil(4);
        let mut hex = String::with_capacity(nibbles);
        for j in (0..nibbles).rev() {
            let mut nib = 0u8;
            for b in 0..4 {
                let i = j * 4 + b;
                if i < nbits && self.bits[i / 64] >> (i % 64) & 1 == 1 {
                    nib |= 1 << b;
                }
            }
            hex.push(char::from_digit(nib as u32, 16).unwrap());
        }
        format!("s={} n={}\n{}\n", self.arity, self.depth, hex)
    }

    pub fn parse(text: &str) -> Result<SaryTreeSubset> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty subset file".into()))?;
        let mut arity = None;
        let mut depth = None;
        for part in header.split_whitespace() {
            if let Some(v) = part.strip_prefix("s=") {
                arity = v.parse::<u32>().ok();
            } else if let Some(v) = part.strip_prefix("n=") {
                depth = v.parse::<u32>().ok();
            }
        }
        let (arity, depth) = match (arity, depth) {
            (Some(s), Some(n)) => (s, n),
            _ => return Err(Error::Parse(format!("bad s-ary header `{header}`"))),
        };
        let mut out = Self::empty(depth, arity)?;
        let nbits = Self::vertex_count(depth, arity) as usize;
        let nibbles = nbits.div_ceil(4);
        let hex = lines.next().unwrap_or("").trim();
        if hex.len() != nibbles {
            return Err(Error::Parse(format!(
                "expected {nibbles} hex digits, got {}",
                hex.len()
            )));
        }
        for (pos, ch) in hex.chars().enumerate() {
            let nib =
                ch.to_digit(16).ok_or_else(|| Error::Parse(format!("bad hex digit `{ch}`")))? as u64;
            let j = nibbles - 1 - pos;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = j * 4 + b;
                    if i >= nbits {
                        return Err(Error::Parse("set bit beyond the vertex range".into()));
                    }
                    out.bits[i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(out)
    }
}

/// Exact weight of an s-ary subset.
pub fn sary_weight(h: &SaryTreeSubset) -> BigRational {
    h.weight()
}

fn sorted_intersection(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn sary_family_rec(h: &SaryTreeSubset, v: u64, level: u32) -> Vec<u64> {
    if level == h.depth() {
        return vec![0];
    }
    let s = h.arity() as u64;
    let child_fams: Vec<Vec<u64>> =
        (1..=s).map(|i| sary_family_rec(h, s * v + i, level + 1)).collect();
    let mut union = child_fams[0].clone();
    for fam in &child_fams[1..] {
        union = merge_union(&union, fam);
    }
    if !h.contains(v) {
        return union;
    }
    let mut inter = child_fams[0].clone();
    for fam in &child_fams[1..] {
        inter = sorted_intersection(&inter, fam);
    }
    let bit = 1u64 << level;
    let lifted: Vec<u64> = inter.into_iter().map(|m| m | bit).collect();
    merge_union(&union, &lifted)
}

/// Exact family of signatures of regular `s`-ary embeddings into `H`:
/// at a member vertex the lifted signatures come from the intersection of
/// all `s` child families, otherwise only the union survives.
pub fn sary_signature_set(h: &SaryTreeSubset) -> Result<SignatureFamily> {
    if h.depth() > SARY_FAMILY_CAP {
        return Err(Error::ResourceLimit(format!(
            "s-ary signature family at depth {} exceeds the cap {SARY_FAMILY_CAP}",
            h.depth()
        )));
    }
    if h.depth() == 0 {
        return Ok(SignatureFamily::from_masks(0, [0]));
    }
    Ok(SignatureFamily::from_masks(h.depth(), sary_family_rec(h, 0, 0)))
}

/// The weighted signature count `sum over S of (s-1)^(-|sigma|)`.
pub fn weighted_signature_count(family: &SignatureFamily, arity: u32) -> Result<BigRational> {
    if arity < 2 {
        return Err(Error::Domain("arity must be at least 2".into()));
    }
    let base = BigInt::from(arity - 1);
    let mut sum = BigRational::zero();
    for sig in family.iter() {
        sum += BigRational::new(BigInt::one(), base.pow(sig.size()));
    }
    Ok(sum)
}

/// Threshold test `(s/(s-1))^w > sum_{i<d} C(n,i)/(s-1)^i`, decided on
/// exact rationals.
pub fn theorem1prime_check(n: u32, d: u32, arity: u32, w: &BigRational) -> Result<bool> {
    if arity < 2 {
        return Err(Error::Domain("arity must be at least 2".into()));
    }
    let mut rhs = BigRational::zero();
    let base = BigInt::from(arity - 1);
    for i in 0..d {
        rhs += BigRational::new(BigInt::from(binomial(n as u64, i as u64)), base.pow(i));
    }
    if rhs.is_zero() {
        return Ok(true);
    }
    let ord = cmp_rational_vs_ratio_pow(&rhs, arity as u64, (arity - 1) as u64, w)?;
    Ok(ord == std::cmp::Ordering::Less)
}

/// A rooted tree with bounded arity and all leaves at one level.
/// Vertices are indexed in breadth-first order, the root is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralTree {
    arity: u32,
    leaf_level: u32,
    children: Vec<Vec<u32>>,
    level: Vec<u32>,
    parent: Vec<Option<u32>>,
}

impl GeneralTree {
    pub fn new(arity: u32, leaf_level: u32, children: Vec<Vec<u32>>) -> Result<GeneralTree> {
        if arity < 2 {
            return Err(Error::Validation("arity bound must be at least 2".into()));
        }
        if leaf_level + 1 > DEPTH_CAP {
            return Err(Error::ResourceLimit(format!(
                "leaf level {leaf_level} exceeds the binary-domain cap {}",
                DEPTH_CAP - 1
            )));
        }
        let count = children.len();
        if count == 0 {
            return Err(Error::Validation("a tree needs a root".into()));
        }
        let mut level = vec![u32::MAX; count];
        let mut parent = vec![None; count];
        level[0] = 0;
        let mut next_expected = 1u32;
        for v in 0..count {
            if level[v] == u32::MAX {
                return Err(Error::Validation(format!("vertex {v} is unreachable")));
            }
            let kids = &children[v];
            if kids.len() > arity as usize {
                return Err(Error::Validation(format!(
                    "vertex {v} has {} children, arity bound is {arity}",
                    kids.len()
                )));
            }
            if level[v] < leaf_level && kids.is_empty() {
                return Err(Error::Validation(format!(
                    "vertex {v} is a leaf at level {} but leaves belong at level {leaf_level}",
                    level[v]
                )));
            }
            if level[v] == leaf_level && !kids.is_empty() {
                return Err(Error::Validation(format!(
                    "vertex {v} at the leaf level has children"
                )));
            }
            for &c in kids {
                if c != next_expected {
                    return Err(Error::Validation(format!(
                        "children must be numbered breadth-first; vertex {v} lists {c}, expected {next_expected}"
                    )));
                }
                next_expected += 1;
                level[c as usize] = level[v] + 1;
                parent[c as usize] = Some(v as u32);
            }
        }
        if next_expected as usize != count {
            return Err(Error::Validation("dangling vertices after the breadth-first walk".into()));
        }
        Ok(GeneralTree { arity, leaf_level, children, level, parent })
    }

    /// Uniform random shape: every vertex above the leaf level draws
    /// 1..=s children.
    pub fn random(arity: u32, leaf_level: u32, rng: &mut SplitRng) -> Result<GeneralTree> {
        let mut children: Vec<Vec<u32>> = vec![Vec::new()];
        let mut frontier = vec![0u32];
        let mut next = 1u32;
        for _ in 0..leaf_level {
            let mut new_frontier = Vec::new();
            for &v in &frontier {
                let k = 1 + rng.next_below(arity as u64) as u32;
                for _ in 0..k {
                    children[v as usize].push(next);
                    children.push(Vec::new());
                    new_frontier.push(next);
                    next += 1;
                    if next as u64 > SARY_STORAGE_CAP {
                        return Err(Error::ResourceLimit("random tree grew past the cap".into()));
                    }
                }
            }
            frontier = new_frontier;
        }
        GeneralTree::new(arity, leaf_level, children)
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn leaf_level(&self) -> u32 {
        self.leaf_level
    }

    pub fn vertex_count(&self) -> usize {
        self.children.len()
    }

    pub fn children_of(&self, v: u32) -> &[u32] {
        &self.children[v as usize]
    }

    pub fn level_of(&self, v: u32) -> u32 {
        self.level[v as usize]
    }

    pub fn leaf_count(&self) -> u64 {
        self.children.iter().filter(|c| c.is_empty()).count() as u64
    }

    /// Number of leaf descendants per vertex (a vertex is its own
    /// descendant, so leaves count 1).
    pub fn leaf_descendants(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.children.len()];
        for v in (0..self.children.len()).rev() {
            if self.children[v].is_empty() {
                counts[v] = 1;
            } else {
                counts[v] = self.children[v].iter().map(|&c| counts[c as usize]).sum();
            }
        }
        counts
    }

    pub fn ancestor_at(&self, v: u32, level: u32) -> u32 {
        let mut cur = v;
        while self.level[cur as usize] > level {
            cur = self.parent[cur as usize].expect("level 0 is the root");
        }
        cur
    }

    pub fn is_descendant(&self, u: u32, v: u32) -> bool {
        self.level[u as usize] >= self.level[v as usize]
            && self.ancestor_at(u, self.level[v as usize]) == v
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("s={} n={}\n", self.arity, self.leaf_level);
        for (v, kids) in self.children.iter().enumerate() {
            let list: Vec<String> = kids.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("{}: {}\n", v, list.join(" ")));
        }
        out
    }

    pub fn parse(text: &str) -> Result<GeneralTree> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty tree file".into()))?;
        let mut arity = None;
        let mut leaf_level = None;
        for part in header.split_whitespace() {
            if let Some(v) = part.strip_prefix("s=") {
                arity = v.parse::<u32>().ok();
            } else if let Some(v) = part.strip_prefix("n=") {
                leaf_level = v.parse::<u32>().ok();
            }
        }
        let (arity, leaf_level) = match (arity, leaf_level) {
            (Some(s), Some(n)) => (s, n),
            _ => return Err(Error::Parse(format!("bad tree header `{header}`"))),
        };
        let mut children = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (idx, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad vertex line `{line}`")))?;
            let idx: usize =
                idx.trim().parse().map_err(|e| Error::Parse(format!("bad index: {e}")))?;
            if idx != children.len() {
                return Err(Error::Parse(format!(
                    "vertex lines out of order: got {idx}, expected {}",
                    children.len()
                )));
            }
            let kids: Vec<u32> = rest
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("bad child `{t}`: {e}"))))
                .collect::<Result<_>>()?;
            children.push(kids);
        }
        GeneralTree::new(arity, leaf_level, children).map_err(|e| match e {
            Error::Validation(msg) => Error::Parse(msg),
            other => other,
        })
    }
}

/// Output of the leaf-greedy map: a level-preserving `g` from the binary
/// tree covering levels `0..=leaf_level` into the general tree, and the
/// binary subset `H` of vertices whose image has 0 or at least 2 children.
#[derive(Debug, Clone)]
pub struct GMapResult {
    /// Binary domain depth (`leaf_level + 1`).
    pub domain_depth: u32,
    /// Image of binary vertex `v` at `map[v - 1]`.
    pub map: Vec<u32>,
    pub subset: TreeSubset,
}

impl GMapResult {
    pub fn image(&self, v: VertexId) -> u32 {
        self.map[(v.0 - 1) as usize]
    }
}

/// Builds the leaf-greedy map: the two binary children follow the two
/// distinct children of the image with the most leaf descendants (both
/// follow an only child). Equal leaf counts resolve to the smaller vertex
/// index, and the left binary child takes the smaller of the chosen pair.
pub fn gmap_build(tree: &GeneralTree) -> Result<GMapResult> {
    let domain_depth = tree.leaf_level() + 1;
    let count = TreeSubset::vertex_count(domain_depth);
    let leaf_counts = tree.leaf_descendants();
    let mut map = vec![0u32; count as usize];
    let mut subset = TreeSubset::empty(domain_depth)?;
    for v in 1..=count {
        let tv = map[(v - 1) as usize];
        debug_assert_eq!(tree.level_of(tv), VertexId(v).level());
        let kids = tree.children_of(tv);
        if kids.len() != 1 {
            subset.insert(VertexId(v));
        }
        if VertexId(v).level() + 1 < domain_depth {
            let (left_img, right_img) = match kids.len() {
                0 => {
                    return Err(Error::Validation(format!(
                        "vertex {tv} is a leaf above the leaf level"
                    )))
                }
                1 => (kids[0], kids[0]),
                _ => {
                    let mut order: Vec<u32> = kids.to_vec();
                    order.sort_by_key(|&c| {
                        (std::cmp::Reverse(leaf_counts[c as usize]), c)
                    });
                    let (a, b) = (order[0], order[1]);
                    (a.min(b), a.max(b))
                }
            };
            map[(2 * v - 1) as usize] = left_img;
            map[(2 * v) as usize] = right_img;
        }
    }
    Ok(GMapResult { domain_depth, map, subset })
}

/// Exact check of the leaf bound `leafcount(T) <= s^(w(H) - 1)`.
pub fn leafbound_check(tree: &GeneralTree, result: &GMapResult) -> Result<bool> {
    let w = result.subset.weight();
    let num = w.numerator();
    let ld = w.log2_denominator();
    let unit = 1u128 << ld;
    if num < unit {
        // w(H) >= 1 always holds (every binary leaf maps to a tree leaf),
        // so this indicates a foreign subset.
        return Err(Error::Validation("subset weight below 1".into()));
    }
    let exp_num = num - unit;
    let leaves = tree.leaf_count();
    let bits = 64 - leaves.leading_zeros() as u64;
    if (bits << ld) > (1 << 27) || exp_num > (1 << 40) {
        return Err(Error::ResourceLimit("leaf bound comparison over the size cap".into()));
    }
    // leaves^(2^ld) <= s^exp_num
    let lhs = BigUint::from(leaves).pow(1u32 << ld);
    let rhs = BigUint::from(tree.arity()).pow(exp_num as u32);
    Ok(lhs <= rhs)
}

/// Images of a binary witness under the map, as general-tree vertices.
pub fn transport_witness(result: &GMapResult, witness: &EmbeddingWitness) -> Vec<u32> {
    witness.map.iter().map(|&v| result.image(v)).collect()
}

/// Validates a transported embedding directly against the general tree:
/// level-respecting and children into distinct child subtrees.
pub fn validate_witness_in_tree(tree: &GeneralTree, d: u32, images: &[u32]) -> Result<()> {
    let expected = (1u64 << d) - 1;
    if images.len() as u64 != expected {
        return Err(Error::Validation(format!(
            "expected {expected} images, got {}",
            images.len()
        )));
    }
    if d == 0 {
        return Ok(());
    }
    let mut prev_level = None;
    for j in 0..d {
        let level = tree.level_of(images[(1usize << j) - 1]);
        for i in (1u64 << j)..(1u64 << (j + 1)) {
            if tree.level_of(images[(i - 1) as usize]) != level {
                return Err(Error::Validation(format!("mixed levels at source level {j}")));
            }
        }
        if let Some(p) = prev_level {
            if level <= p {
                return Err(Error::Validation("levels must strictly increase".into()));
            }
        }
        prev_level = Some(level);
    }
    for x in 1..(1u64 << (d - 1)) {
        let a = images[(x - 1) as usize];
        let y = images[(2 * x - 1) as usize];
        let z = images[(2 * x) as usize];
        if !tree.is_descendant(y, a) || !tree.is_descendant(z, a) {
            return Err(Error::Validation(format!(
                "images {y}, {z} do not descend from {a}"
            )));
        }
        let la = tree.level_of(a);
        if tree.ancestor_at(y, la + 1) == tree.ancestor_at(z, la + 1) {
            return Err(Error::Validation(format!(
                "images {y}, {z} share a child subtree of {a}"
            )));
        }
    }
    Ok(())
}

//! Vertex addressing, navigation and exact weights for complete binary trees.
//!
//! `T_n` is the complete binary tree with levels `0..n-1` and `2^n - 1`
//! vertices. Vertices are addressed by 1-based heap indices: the root is 1
//! and the children of `v` are `2v` and `2v+1`. The bits of the index after
//! the leading one spell out the left/right path from the root, so heap
//! indices carry the same information as path strings while giving O(1)
//! navigation and dense bitset storage.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::SplitRng;

/// Largest depth for which a full-tree bitset is kept in memory
/// (2^25 bits is 4 MiB).
pub const DEPTH_CAP: u32 = 25;

/// 1-based heap index of a vertex of some `T_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u64);

impl VertexId {
    /// Level of the vertex: distance from the root, `floor(log2(id))`.
    #[inline]
    pub fn level(self) -> u32 {
        debug_assert!(self.0 >= 1);
        63 - self.0.leading_zeros()
    }

    #[inline]
    pub fn parent(self) -> Option<VertexId> {
        if self.0 > 1 {
            Some(VertexId(self.0 >> 1))
        } else {
            None
        }
    }

    #[inline]
    pub fn left_child(self) -> VertexId {
        VertexId(2 * self.0)
    }

    #[inline]
    pub fn right_child(self) -> VertexId {
        VertexId(2 * self.0 + 1)
    }

    /// The ancestor of `self` at `level`, which must not exceed the
    /// vertex's own level.
    #[inline]
    pub fn ancestor_at(self, level: u32) -> VertexId {
        debug_assert!(level <= self.level());
        VertexId(self.0 >> (self.level() - level))
    }

    /// True iff `self` lies in the subtree rooted at `v` (every vertex is
    /// a descendant of itself). Repeated halving of the index walks to the
    /// root, so this is a single shift compare.
    #[inline]
    pub fn is_descendant_of(self, v: VertexId) -> bool {
        let (lu, lv) = (self.level(), v.level());
        lu >= lv && self.0 >> (lu - lv) == v.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Level of a vertex id.
pub fn vertex_level(v: VertexId) -> u32 {
    v.level()
}

/// Neighborhood of a vertex inside `T_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Navigation {
    pub children: Option<(VertexId, VertexId)>,
    pub parent: Option<VertexId>,
    pub is_leaf: bool,
}

/// Children, parent and leaf status of `v` in `T_n`.
pub fn navigate(v: VertexId, depth: u32) -> Result<Navigation> {
    check_vertex(v, depth)?;
    let is_leaf = v.level() == depth - 1;
    Ok(Navigation {
        children: (!is_leaf).then(|| (v.left_child(), v.right_child())),
        parent: v.parent(),
        is_leaf,
    })
}

/// True iff `u` lies in the subtree rooted at `v`.
pub fn is_descendant(u: VertexId, v: VertexId) -> bool {
    u.is_descendant_of(v)
}

/// Root-to-leaf path ending at `leaf`, in increasing level order.
pub fn branch(leaf: VertexId, depth: u32) -> Result<Vec<VertexId>> {
    check_vertex(leaf, depth)?;
    if leaf.level() != depth - 1 {
        return Err(Error::InvalidVertex { id: leaf.0, depth });
    }
    let mut path: Vec<VertexId> = (0..depth).map(|l| leaf.ancestor_at(l)).collect();
    path.sort_unstable();
    Ok(path)
}

fn check_vertex(v: VertexId, depth: u32) -> Result<()> {
    if depth == 0 || v.0 == 0 || v.0 >= 1u64 << depth {
        return Err(Error::InvalidVertex { id: v.0, depth });
    }
    Ok(())
}

/// An exact dyadic rational `num / 2^log2_den`, kept normalized
/// (odd numerator, or zero with denominator 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicWeight {
    num: u128,
    log2_den: u32,
}

impl DyadicWeight {
    pub const ZERO: DyadicWeight = DyadicWeight { num: 0, log2_den: 0 };

    pub fn new(num: u128, log2_den: u32) -> Self {
        let mut w = DyadicWeight { num, log2_den };
        w.normalize();
        w
    }

    pub fn from_int(n: u64) -> Self {
        DyadicWeight { num: n as u128, log2_den: 0 }
    }

    /// Exact dyadic value of a finite nonnegative f64.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Domain(format!("not a nonnegative finite value: {x}")));
        }
        if x == 0.0 {
            return Ok(Self::ZERO);
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074i32)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        if exp >= 0 {
            let num = (mant as u128)
                .checked_shl(exp as u32)
                .ok_or_else(|| Error::Domain(format!("value too large for dyadic: {x}")))?;
            Ok(Self::new(num, 0))
        } else {
            Ok(Self::new(mant as u128, (-exp) as u32))
        }
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.log2_den = 0;
            return;
        }
        let tz = (self.num.trailing_zeros()).min(self.log2_den);
        self.num >>= tz;
        self.log2_den -= tz;
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.log2_den == 0
    }

    pub fn floor(&self) -> u128 {
        if self.log2_den >= 128 {
            // The numerator always has fewer than 128 bits.
            0
        } else {
            self.num >> self.log2_den
        }
    }

    pub fn ceil(&self) -> u128 {
        if self.log2_den == 0 {
            self.num
        } else if self.log2_den >= 128 {
            u128::from(self.num != 0)
        } else {
            (self.num >> self.log2_den)
                + u128::from(self.num & ((1u128 << self.log2_den) - 1) != 0)
        }
    }

    pub fn add(&self, other: &DyadicWeight) -> DyadicWeight {
        let ld = self.log2_den.max(other.log2_den);
        let a = self
            .num
            .checked_shl(ld - self.log2_den)
            .expect("dyadic add overflow");
        let b = other
            .num
            .checked_shl(ld - other.log2_den)
            .expect("dyadic add overflow");
        DyadicWeight::new(a.checked_add(b).expect("dyadic add overflow"), ld)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 * (-(self.log2_den as f64)).exp2()
    }
}

impl PartialOrd for DyadicWeight {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicWeight {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Compare integer parts first so the aligned comparison below
        // cannot overflow for any pair we actually construct.
        let (fa, fb) = (self.floor(), other.floor());
        if fa != fb {
            return fa.cmp(&fb);
        }
        let ld = self.log2_den.max(other.log2_den);
        if ld >= 100 {
            // Wide denominators (f64-derived exponents) go through big
            // integers; shifts past 128 bits would trap above.
            use num_bigint::BigUint;
            let a = BigUint::from(self.num) << other.log2_den;
            let b = BigUint::from(other.num) << self.log2_den;
            return a.cmp(&b);
        }
        let a = (self.num - (fa << self.log2_den)) << (ld - self.log2_den);
        let b = (other.num - (fb << other.log2_den)) << (ld - other.log2_den);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else if self.log2_den < 64 {
            write!(f, "{}/{}", self.num, 1u64 << self.log2_den)
        } else {
            write!(f, "{}/2^{}", self.num, self.log2_den)
        }
    }
}

/// A subset of `V(T_n)` stored as a bitset over heap indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSubset {
    depth: u32,
    bits: Vec<u64>,
}

impl TreeSubset {
    /// Number of vertices of `T_n`.
    pub fn vertex_count(depth: u32) -> u64 {
        (1u64 << depth) - 1
    }

    pub fn empty(depth: u32) -> Result<Self> {
        if depth > DEPTH_CAP {
            return Err(Error::ResourceLimit(format!(
                "depth {depth} exceeds the storage cap {DEPTH_CAP}"
            )));
        }
        let nbits = Self::vertex_count(depth) as usize;
        Ok(TreeSubset { depth, bits: vec![0u64; nbits.div_ceil(64)] })
    }

    pub fn full(depth: u32) -> Result<Self> {
        let mut s = Self::empty(depth)?;
        let nbits = Self::vertex_count(depth) as usize;
        for (i, w) in s.bits.iter_mut().enumerate() {
            let lo = i * 64;
            *w = if lo + 64 <= nbits {
                u64::MAX
            } else {
                (1u64 << (nbits - lo)) - 1
            };
        }
        Ok(s)
    }

    pub fn from_vertices<I: IntoIterator<Item = u64>>(depth: u32, ids: I) -> Result<Self> {
        let mut s = Self::empty(depth)?;
        for id in ids {
            s.try_insert(VertexId(id))?;
        }
        Ok(s)
    }

    /// All vertices of one level.
    pub fn level_set(depth: u32, level: u32) -> Result<Self> {
        if level >= depth {
            return Err(Error::Domain(format!("level {level} out of range for depth {depth}")));
        }
        Self::from_vertices(depth, (1u64 << level)..(1u64 << (level + 1)))
    }

    /// Random subset: each vertex kept independently with the given density.
    pub fn random(depth: u32, density: f64, rng: &mut SplitRng) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::Domain(format!("density {density} outside [0,1]")));
        }
        let mut s = Self::empty(depth)?;
        let threshold = (density * (u64::MAX as f64)) as u64;
        for id in 1..=Self::vertex_count(depth) {
            if rng.next_u64() <= threshold {
                s.insert(VertexId(id));
            }
        }
        Ok(s)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        let i = (v.0 - 1) as usize;
        i < Self::vertex_count(self.depth) as usize && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: VertexId) {
        self.try_insert(v).expect("vertex out of range");
    }

    pub fn try_insert(&mut self, v: VertexId) -> Result<()> {
        check_vertex(v, self.depth)?;
        let i = (v.0 - 1) as usize;
        self.bits[i / 64] |= 1 << (i % 64);
        Ok(())
    }

    pub fn remove(&mut self, v: VertexId) {
        if v.0 >= 1 && v.0 <= Self::vertex_count(self.depth) {
            let i = (v.0 - 1) as usize;
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Number of members.
    pub fn len(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        (1..=Self::vertex_count(self.depth))
            .map(VertexId)
            .filter(move |&v| self.contains(v))
    }

    /// Members at one level.
    pub fn count_at_level(&self, level: u32) -> u64 {
        (1u64 << level..1u64 << (level + 1))
            .filter(|&id| self.contains(VertexId(id)))
            .count() as u64
    }

    /// Exact weight: sum of `2^-level(v)` over members.
    pub fn weight(&self) -> DyadicWeight {
        if self.depth == 0 {
            return DyadicWeight::ZERO;
        }
        let mut num: u128 = 0;
        for level in 0..self.depth {
            let c = self.count_at_level(level) as u128;
            num += c << (self.depth - 1 - level);
        }
        DyadicWeight::new(num, self.depth - 1)
    }

    /// Restriction of the subset to the subtree rooted at `v`, re-indexed
    /// so that `v` becomes the root of a `T_{depth - level(v)}`.
    pub fn restrict_to_subtree(&self, v: VertexId) -> Result<TreeSubset> {
        check_vertex(v, self.depth)?;
        let sub_depth = self.depth - v.level();
        let mut out = TreeSubset::empty(sub_depth)?;
        for rel in 1..=Self::vertex_count(sub_depth) {
            let rel_level = VertexId(rel).level();
            let global = (v.0 << rel_level) | (rel - (1 << rel_level));
            if self.contains(VertexId(global)) {
                out.insert(VertexId(rel));
            }
        }
        Ok(out)
    }

    /// Serializes to the two-line text format: `n=<depth>` then a fixed-width
    /// hexadecimal string, least-significant bit = vertex 1, most significant
    /// nibble first.
    pub fn to_text(&self) -> String {
        let nbits = Self::vertex_count(self.depth) as usize;
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
        format!("n={}\n{}\n", self.depth, hex)
    }

    /// Parses the format produced by [`TreeSubset::to_text`]. The hex string
    /// must have exactly `ceil((2^n - 1)/4)` digits with no stray high bits.
    pub fn parse(text: &str) -> Result<TreeSubset> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty subset file".into()))?;
        let depth: u32 = header
            .trim()
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("expected `n=<depth>`, got `{header}`")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad depth: {e}")))?;
        if depth > DEPTH_CAP {
            return Err(Error::ResourceLimit(format!(
                "depth {depth} exceeds the storage cap {DEPTH_CAP}"
            )));
        }
        let nbits = Self::vertex_count(depth) as usize;
        let nibbles = nbits.div_ceil(4);
        let hex = lines.next().unwrap_or("").trim();
        if hex.len() != nibbles {
            return Err(Error::Parse(format!(
                "expected {nibbles} hex digits for depth {depth}, got {}",
                hex.len()
            )));
        }
        let mut s = TreeSubset::empty(depth)?;
        for (pos, ch) in hex.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit `{ch}`")))? as u64;
            let j = nibbles - 1 - pos;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = j * 4 + b;
                    if i >= nbits {
                        return Err(Error::Parse("set bit beyond the vertex range".into()));
                    }
                    s.bits[i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(s)
    }
}

/// Weight of a subset (free-function form of [`TreeSubset::weight`]).
pub fn set_weight(subset: &TreeSubset) -> DyadicWeight {
    subset.weight()
}

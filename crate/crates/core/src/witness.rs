//! Explicit embeddings of `T_d` into `T_n` and their validation.

use std::fmt;

use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::tree::{TreeSubset, VertexId};

/// A regular embedding `f: V(T_d) -> V(T_n)` given as the explicit image of
/// every `T_d` vertex in heap order, together with the set of levels the
/// image occupies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub d: u32,
    pub n: u32,
    /// Image of `T_d` vertex `i+1` at `map[i]`.
    pub map: Vec<VertexId>,
    pub signature: Signature,
}

impl EmbeddingWitness {
    /// The empty embedding of `T_0`.
    pub fn empty(n: u32) -> Self {
        EmbeddingWitness { d: 0, n, map: Vec::new(), signature: Signature::EMPTY }
    }

    pub fn image(&self, source: VertexId) -> VertexId {
        self.map[(source.0 - 1) as usize]
    }

    /// Checks both regular-embedding conditions and membership in `subset`
    /// directly from the definitions; independent of how the witness was
    /// produced.
    pub fn validate(&self, subset: &TreeSubset) -> Result<()> {
        self.validate_structure(subset.depth())?;
        for &img in &self.map {
            if !subset.contains(img) {
                return Err(Error::Validation(format!("image {img} is not in the subset")));
            }
        }
        Ok(())
    }

    /// Structural validation only (levels, signature, child separation).
    pub fn validate_structure(&self, depth: u32) -> Result<()> {
        let expected = (1u64 << self.d) - 1;
        if self.map.len() as u64 != expected {
            return Err(Error::Validation(format!(
                "map has {} entries, expected {expected}",
                self.map.len()
            )));
        }
        if self.n != depth {
            return Err(Error::Validation(format!(
                "witness targets depth {}, subset has depth {depth}",
                self.n
            )));
        }
        if self.d == 0 {
            if !self.signature.is_empty() {
                return Err(Error::Validation("empty embedding must have empty signature".into()));
            }
            return Ok(());
        }
        // Condition 2: one common target level per source level, and the
        // occupied levels must be exactly the signature.
        let mut levels = Vec::with_capacity(self.d as usize);
        for j in 0..self.d {
            let first = self.map[(1usize << j) - 1];
            if first.0 >= 1u64 << depth {
                return Err(Error::Validation(format!("image {first} outside T_{depth}")));
            }
            let level = first.level();
            for i in (1u64 << j)..(1u64 << (j + 1)) {
                let img = self.map[(i - 1) as usize];
                if img.0 == 0 || img.0 >= 1u64 << depth {
                    return Err(Error::Validation(format!("image {img} outside T_{depth}")));
                }
                if img.level() != level {
                    return Err(Error::Validation(format!(
                        "source level {j} maps to mixed target levels {level} and {}",
                        img.level()
                    )));
                }
            }
            if let Some(&prev) = levels.last() {
                if level <= prev {
                    return Err(Error::Validation("target levels must strictly increase".into()));
                }
            }
            levels.push(level);
        }
        let sig = Signature::from_levels(&levels, depth)?;
        if sig != self.signature {
            return Err(Error::Validation(format!(
                "declared signature {} differs from occupied levels {sig}",
                self.signature
            )));
        }
        // Condition 1: images of the two children descend from distinct
        // children of the image of their parent.
        for x in 1..(1u64 << (self.d - 1)) {
            let a = self.image(VertexId(x));
            let y = self.image(VertexId(2 * x));
            let z = self.image(VertexId(2 * x + 1));
            if !y.is_descendant_of(a) || !z.is_descendant_of(a) {
                return Err(Error::Validation(format!(
                    "children images {y}, {z} do not descend from {a}"
                )));
            }
            if y.ancestor_at(a.level() + 1) == z.ancestor_at(a.level() + 1) {
                return Err(Error::Validation(format!(
                    "children images {y}, {z} share a child subtree of {a}"
                )));
            }
        }
        Ok(())
    }

    /// Two-line-plus-map text format; see the crate README.
    pub fn to_text(&self) -> String {
        let mut out = format!("d={} n={}\n", self.d, self.n);
        for (i, img) in self.map.iter().enumerate() {
            out.push_str(&format!("{} -> {}\n", i + 1, img.0));
        }
        out.push_str(&format!("signature={}\n", self.signature));
        out
    }

    pub fn parse(text: &str) -> Result<EmbeddingWitness> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty witness file".into()))?;
        let mut d = None;
        let mut n = None;
        for part in header.split_whitespace() {
            if let Some(v) = part.strip_prefix("d=") {
                d = v.parse::<u32>().ok();
            } else if let Some(v) = part.strip_prefix("n=") {
                n = v.parse::<u32>().ok();
            }
        }
        let (d, n) = match (d, n) {
            (Some(d), Some(n)) if d <= 32 && n <= 63 => (d, n),
            _ => return Err(Error::Parse(format!("bad witness header `{header}`"))),
        };
        let count = (1u64 << d) - 1;
        let mut map = Vec::with_capacity(count as usize);
        for i in 1..=count {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing map line for vertex {i}")))?;
            let (src, dst) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("bad map line `{line}`")))?;
            let src: u64 = src.trim().parse().map_err(|e| Error::Parse(format!("{e}")))?;
            if src != i {
                return Err(Error::Parse(format!("map lines out of order at vertex {i}")));
            }
            let dst: u64 = dst.trim().parse().map_err(|e| Error::Parse(format!("{e}")))?;
            map.push(VertexId(dst));
        }
        let sig_line = lines.next().ok_or_else(|| Error::Parse("missing signature line".into()))?;
        let sig_str = sig_line
            .trim()
            .strip_prefix("signature=")
            .ok_or_else(|| Error::Parse(format!("bad signature line `{sig_line}`")))?;
        let signature = Signature::parse_levels(sig_str, n)?;
        Ok(EmbeddingWitness { d, n, map, signature })
    }
}

impl fmt::Display for EmbeddingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T_{} -> T_{} on levels {}", self.d, self.n, self.signature)
    }
}

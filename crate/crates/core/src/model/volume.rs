use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::graph::{ActivityGraph, Spin};
use crate::error::{Error, Result};

/// Number of children at the root of a finite volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootDegree {
    /// Root has `k + 1` children, as on the full Cayley tree.
    Full,
    /// Root has `k` children (half-tree).
    Half,
}

/// The ball `V_n` of radius `n` around the root, vertices in breadth-first order.
///
/// Children of every vertex occupy a contiguous index range, and `V_{n-1}`
/// is always a prefix of `V_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteVolume {
    k: u32,
    n: u32,
    root: RootDegree,
    level_start: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Range<usize>>,
}

impl FiniteVolume {
    pub fn new(k: u32, n: u32, root: RootDegree) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        let size = Self::closed_form_size(k, n, root);
        if size > 1 << 26 {
            return Err(Error::InvalidParameter(format!(
                "volume with k={k}, n={n} has {size} vertices"
            )));
        }
        let k = k as usize;
        let mut level_start = vec![0usize];
        let mut parent = vec![None];
        let mut children = Vec::with_capacity(size as usize);
        let mut level = 0..1usize;
        for _ in 0..n {
            let next_start = level.end;
            level_start.push(next_start);
            let mut cursor = next_start;
            for v in level.clone() {
                let deg = if v == 0 && root == RootDegree::Full {
                    k + 1
                } else {
                    k
                };
                children.push(cursor..cursor + deg);
                parent.extend(std::iter::repeat_n(Some(v), deg));
                cursor += deg;
            }
            level = next_start..cursor;
        }
        children.extend(std::iter::repeat_n(0..0, level.len()));
        level_start.push(level.end);
        debug_assert_eq!(parent.len() as u128, size);
        Ok(Self {
            k: k as u32,
            n,
            root,
            level_start,
            parent,
            children,
        })
    }

    /// `|V_n|` from the geometric-series closed form.
    pub fn closed_form_size(k: u32, n: u32, root: RootDegree) -> u128 {
        let k = k as u128;
        let geometric = |m: u32| (0..=m).map(|j| k.pow(j)).sum::<u128>();
        match root {
            RootDegree::Half => geometric(n),
            RootDegree::Full if n == 0 => 1,
            RootDegree::Full => 1 + (k + 1) * geometric(n - 1),
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn root_degree(&self) -> RootDegree {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Vertex indices of the sphere `W_level`.
    pub fn level(&self, level: u32) -> Range<usize> {
        let l = level as usize;
        self.level_start[l]..self.level_start[l + 1]
    }

    /// Vertex indices of the outer sphere `W_n`.
    pub fn boundary(&self) -> Range<usize> {
        self.level(self.n)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> Range<usize> {
        self.children[v].clone()
    }

    pub fn depth(&self, v: usize) -> u32 {
        (self.level_start.partition_point(|&s| s <= v) - 1) as u32
    }

    /// Tree edges as (parent, child) pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.len()).map(move |v| (self.parent[v].unwrap(), v))
    }

    /// The same tree truncated to radius `n - 1`.
    pub fn shrink(&self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::InvalidParameter(
                "cannot shrink a radius-0 volume".into(),
            ));
        }
        Self::new(self.k, self.n - 1, self.root)
    }

    pub fn is_admissible(&self, graph: &ActivityGraph, config: &Configuration) -> Result<bool> {
        self.check_size(config)?;
        let s = config.spins();
        Ok(self.edges().all(|(p, c)| graph.allows(s[p], s[c])))
    }

    pub(crate) fn check_size(&self, config: &Configuration) -> Result<()> {
        if config.len() != self.len() {
            return Err(Error::ConfigurationSize {
                expected: self.len(),
                got: config.len(),
            });
        }
        Ok(())
    }
}

/// A total assignment of spins to the vertices of a volume, in breadth-first order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration(Vec<Spin>);

impl Configuration {
    pub fn new(spins: Vec<Spin>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|&&s| s > 2) {
            return Err(Error::InvalidParameter(format!(
                "spin {bad} is not in {{0,1,2}}"
            )));
        }
        Ok(Self(spins))
    }

    pub fn uniform(len: usize, spin: Spin) -> Self {
        Self(vec![spin.min(2); len])
    }

    pub fn spins(&self) -> &[Spin] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Restriction to the first `len` vertices (a prefix volume).
    pub fn restrict(&self, len: usize) -> Self {
        Self(self.0[..len].to_vec())
    }

    /// Relabels spins 1 <-> 2.
    pub fn swapped(&self) -> Self {
        Self(self.0.iter().map(|&s| [0, 2, 1][s as usize]).collect())
    }
}

/// Number of occupied vertices, `#sigma = |{x : sigma(x) >= 1}|`.
pub fn occupied_count(config: &Configuration) -> usize {
    config.0.iter().filter(|&&s| s >= 1).count()
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spin value in {0, 1, 2}; 0 is vacant, 1 and 2 are occupied.
pub type Spin = u8;

/// Named activity graphs with published edge sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphPreset {
    Wand,
    Hinge,
}

impl GraphPreset {
    pub fn name(self) -> &'static str {
        match self {
            GraphPreset::Wand => "wand",
            GraphPreset::Hinge => "hinge",
        }
    }
}

impl fmt::Display for GraphPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wand" => Ok(GraphPreset::Wand),
            "hinge" => Ok(GraphPreset::Hinge),
            other => Err(Error::UnsupportedGraph(other.to_string())),
        }
    }
}

/// Symmetric 0/1 adjacency matrix on the spin set {0, 1, 2}.
///
/// Entry `a[i][j] = 1` means neighbours may carry spins `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActivityGraph {
    adjacency: [[u8; 3]; 3],
    preset: Option<GraphPreset>,
}

impl ActivityGraph {
    pub fn wand() -> Self {
        Self {
            adjacency: [[0, 1, 1], [1, 1, 0], [1, 0, 1]],
            preset: Some(GraphPreset::Wand),
        }
    }

    /// Wand plus the loop {0,0}.
    pub fn hinge() -> Self {
        Self {
            adjacency: [[1, 1, 1], [1, 1, 0], [1, 0, 1]],
            preset: Some(GraphPreset::Hinge),
        }
    }

    pub fn preset(preset: GraphPreset) -> Self {
        match preset {
            GraphPreset::Wand => Self::wand(),
            GraphPreset::Hinge => Self::hinge(),
        }
    }

    /// Looks up a preset by name. Graphs whose edge sets are not published
    /// (for example `wrench` and `pipe`) are rejected.
    pub fn from_name(name: &str) -> Result<Self> {
        name.parse::<GraphPreset>().map(Self::preset)
    }

    /// Builds a custom graph; the matrix must be symmetric with 0/1 entries.
    pub fn custom(adjacency: [[u8; 3]; 3]) -> Result<Self> {
        for (i, row) in adjacency.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a > 1 {
                    return Err(Error::InvalidAdjacency(format!(
                        "entry ({i},{j}) is {a}, expected 0 or 1"
                    )));
                }
                if a != adjacency[j][i] {
                    return Err(Error::InvalidAdjacency(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let graph = Self {
            adjacency,
            preset: None,
        };
        // A custom matrix equal to a preset keeps the preset tag.
        for p in [GraphPreset::Wand, GraphPreset::Hinge] {
            if Self::preset(p).adjacency == adjacency {
                return Ok(Self::preset(p));
            }
        }
        Ok(graph)
    }

    /// Parses nine whitespace- or comma-separated 0/1 entries in row-major order.
    pub fn parse_row_major(text: &str) -> Result<Self> {
        let entries: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if entries.len() != 9 {
            return Err(Error::InvalidAdjacency(format!(
                "expected 9 entries, found {}",
                entries.len()
            )));
        }
        let mut adjacency = [[0u8; 3]; 3];
        for (idx, e) in entries.iter().enumerate() {
            adjacency[idx / 3][idx % 3] = match *e {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::InvalidAdjacency(format!(
                        "entry {idx} is `{other}`, expected 0 or 1"
                    )))
                }
            };
        }
        Self::custom(adjacency)
    }

    #[inline]
    pub fn a(&self, i: Spin, j: Spin) -> u8 {
        self.adjacency[i as usize][j as usize]
    }

    #[inline]
    pub fn allows(&self, i: Spin, j: Spin) -> bool {
        self.a(i, j) == 1
    }

    pub fn adjacency(&self) -> [[u8; 3]; 3] {
        self.adjacency
    }

    pub fn preset_tag(&self) -> Option<GraphPreset> {
        self.preset
    }

    pub fn name(&self) -> &'static str {
        self.preset.map_or("custom", GraphPreset::name)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.adjacency[i][j] == self.adjacency[j][i]))
    }

    /// Relabeling spins 1 <-> 2 leaves the graph unchanged.
    pub fn is_swap_symmetric(&self) -> bool {
        let s = |x: usize| [0, 2, 1][x];
        (0..3).all(|i| (0..3).all(|j| self.adjacency[i][j] == self.adjacency[s(i)][s(j)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wand_edges() {
        let g = ActivityGraph::from_name("wand").unwrap();
        assert_eq!(g.a(0, 0), 0);
        assert_eq!(g.a(0, 1), 1);
        assert_eq!(g.a(0, 2), 1);
        assert_eq!(g.a(1, 1), 1);
        assert_eq!(g.a(2, 2), 1);
        assert_eq!(g.a(1, 2), 0);
    }

    #[test]
    fn hinge_is_wand_plus_vacant_loop() {
        let w = ActivityGraph::wand().adjacency();
        let h = ActivityGraph::from_name("Hinge").unwrap().adjacency();
        assert_eq!(h[0][0], 1);
        for i in 0..3 {
            for j in 0..3 {
                if (i, j) != (0, 0) {
                    assert_eq!(w[i][j], h[i][j]);
                }
            }
        }
    }

    #[test]
    fn unknown_presets_are_rejected() {
        for name in ["wrench", "pipe", "star"] {
            match ActivityGraph::from_name(name) {
                Err(Error::UnsupportedGraph(n)) => assert_eq!(n, name),
                other => panic!("expected UnsupportedGraph, got {other:?}"),
            }
        }
    }

    #[test]
    fn presets_are_symmetric() {
        for g in [ActivityGraph::wand(), ActivityGraph::hinge()] {
            assert!(g.is_symmetric());
            assert!(g.is_swap_symmetric());
        }
    }

    #[test]
    fn row_major_parsing() {
        let g = ActivityGraph::parse_row_major("0 1 1\n1 1 0\n1 0 1").unwrap();
        assert_eq!(g, ActivityGraph::wand());
        let c = ActivityGraph::parse_row_major("1,1,0,1,0,1,0,1,1").unwrap();
        assert_eq!(c.preset_tag(), None);
        assert_eq!(c.name(), "custom");
        assert!(ActivityGraph::parse_row_major("0 1 0 0 1 1 1 0 1").is_err());
        assert!(ActivityGraph::parse_row_major("0 1 1 1 1 0 1 0").is_err());
        assert!(ActivityGraph::parse_row_major("0 1 1 1 1 0 1 0 2").is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::volume::{FiniteVolume, RootDegree};
use crate::error::{Error, Result};
use crate::recursion::{AgmPattern, BoundaryField};

/// A rule assigning a boundary field to every vertex of a finite volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FieldAssignment {
    /// The same field everywhere.
    Uniform(BoundaryField),
    /// Two-class assignment: the root carries `z`; a `z` vertex gives class `z`
    /// to its first `m` children and `t` to the rest, a `t` vertex gives `t`
    /// to its first `r` children and `z` to the rest.
    TwoClass {
        pattern: AgmPattern,
        z: BoundaryField,
        t: BoundaryField,
    },
    /// Explicit per-vertex fields in breadth-first order.
    PerVertex(Vec<BoundaryField>),
}

impl FieldAssignment {
    /// Field of every vertex of `volume`.
    pub fn fields_on(&self, volume: &FiniteVolume) -> Result<Vec<BoundaryField>> {
        match self {
            FieldAssignment::Uniform(f) => Ok(vec![*f; volume.len()]),
            FieldAssignment::PerVertex(v) => {
                if v.len() != volume.len() {
                    return Err(Error::InvalidParameter(format!(
                        "{} per-vertex fields for a volume of {} vertices",
                        v.len(),
                        volume.len()
                    )));
                }
                Ok(v.clone())
            }
            FieldAssignment::TwoClass { pattern, z, t } => {
                if pattern.k() != volume.k() {
                    return Err(Error::InvalidParameter(format!(
                        "pattern has k={} but the volume has k={}",
                        pattern.k(),
                        volume.k()
                    )));
                }
                let (m, r) = (pattern.m() as usize, pattern.r() as usize);
                let k = pattern.k() as usize;
                if volume.root_degree() == RootDegree::Full && m != 0 && m != k {
                    return Err(Error::InvalidParameter(
                        "two-class assignment with 0 < m < k needs a half-tree root".into(),
                    ));
                }
                let mut is_z = vec![true; volume.len()];
                for v in 0..volume.len() {
                    let same = if is_z[v] { m } else { r };
                    for (pos, c) in volume.children(v).enumerate() {
                        is_z[c] = if is_z[v] { pos < same } else { pos >= same };
                    }
                }
                Ok(is_z.into_iter().map(|c| if c { *z } else { *t }).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_class_rule_counts() {
        let z = BoundaryField::symmetric(2.0);
        let t = BoundaryField::symmetric(0.5);
        let vol = FiniteVolume::new(5, 2, RootDegree::Half).unwrap();
        let a = FieldAssignment::TwoClass {
            pattern: AgmPattern::new(5, 3, 1).unwrap(),
            z,
            t,
        };
        let f = a.fields_on(&vol).unwrap();
        assert_eq!(f[0], z);
        for v in 0..vol.level(1).end {
            let kids: Vec<_> = vol.children(v).map(|c| f[c] == z).collect();
            let nz = kids.iter().filter(|&&b| b).count();
            if f[v] == z {
                assert_eq!(nz, 3);
            } else {
                assert_eq!(nz, 4);
            }
        }
    }

    #[test]
    fn parity_rule_on_full_tree() {
        let z = BoundaryField::symmetric(2.0);
        let t = BoundaryField::symmetric(0.5);
        let vol = FiniteVolume::new(2, 2, RootDegree::Full).unwrap();
        let a = FieldAssignment::TwoClass {
            pattern: AgmPattern::new(2, 0, 0).unwrap(),
            z,
            t,
        };
        let f = a.fields_on(&vol).unwrap();
        for v in 0..vol.len() {
            assert_eq!(f[v], if vol.depth(v) % 2 == 0 { z } else { t });
        }
        let bad = FieldAssignment::TwoClass {
            pattern: AgmPattern::new(2, 1, 0).unwrap(),
            z,
            t,
        };
        assert!(bad.fields_on(&vol).is_err());
    }
}

//! Exact top-down sampling from the finite-volume measure of a boundary-law
//! fixed point.
//!
//! The root takes state `i` with weight `lambda^[i >= 1] * prod_y D_i(y)` over
//! its children `y`, where `D_i(y) = sum_j a_ij v_j(y)` and
//! `v(y) = (1, z'_1y, z'_2y)`. Given its parent in state `i`, a vertex `y`
//! takes state `j` with probability `a_ij v_j(y) / D_i(y)`. When every
//! non-root internal vertex satisfies the recursion, the product telescopes
//! to the exact finite-volume measure.
//!
//! Sample `s` draws from `ChaCha8Rng::seed_from_u64(seed)` with stream `s`,
//! so batches are reproducible and independent of thread scheduling.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActivityGraph, Configuration, FiniteVolume, RootDegree, Spin};
use crate::oracle::FiniteMeasure;
use crate::recursion::{generic_step, rel_defect, BoundaryField};

/// Largest recursion residual tolerated at non-root internal vertices.
pub const FIXED_POINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub seed: u64,
    pub count: usize,
    pub graph: String,
    pub k: u32,
    pub n: u32,
    pub root: RootDegree,
    pub lambda: f64,
    pub configurations: Vec<Configuration>,
    pub empirical_marginals: Vec<[f64; 3]>,
}

/// Largest relative recursion residual over non-root internal vertices.
pub fn internal_residual(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    fields: &[BoundaryField],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for v in 1..volume.boundary().start {
        let img = generic_step(graph, lambda, &fields[volume.children(v)])?;
        worst = worst.max(rel_defect(&img.as_array(), &fields[v].as_array()));
    }
    Ok(worst)
}

/// Cumulative conditional distributions: `table[v][i]` is the law of vertex
/// `v` given its parent in state `i` (the root uses row 0 only).
fn conditional_tables(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    fields: &[BoundaryField],
) -> Vec<[[f64; 3]; 3]> {
    let normalize = |w: [f64; 3]| {
        let s: f64 = w.iter().sum();
        let mut c = [0.0; 3];
        let mut acc = 0.0;
        for j in 0..3 {
            acc += w[j] / s;
            c[j] = acc;
        }
        c[2] = 1.0;
        c
    };
    let mut tables = vec![[[0.0; 3]; 3]; volume.len()];
    for v in 1..volume.len() {
        let vw = fields[v].weights();
        for i in 0..3u8 {
            let w = [0u8, 1, 2].map(|j| graph.a(i, j) as f64 * vw[j as usize]);
            tables[v][i as usize] = normalize(w);
        }
    }
    let mut root = [1.0, lambda, lambda];
    for y in volume.children(0) {
        let vw = fields[y].weights();
        for (i, r) in root.iter_mut().enumerate() {
            *r *= (0..3u8)
                .map(|j| graph.a(i as u8, j) as f64 * vw[j as usize])
                .sum::<f64>();
        }
    }
    tables[0][0] = normalize(root);
    tables
}

fn pick(cum: &[f64; 3], u: f64) -> Spin {
    cum.iter().position(|&c| u < c).unwrap_or(2) as Spin
}

/// Draws `count` configurations. `fields` gives a primed field for every
/// vertex; fields that do not satisfy the recursion are refused.
pub fn sample(
    graph: &ActivityGraph,
    volume: &FiniteVolume,
    lambda: f64,
    fields: &[BoundaryField],
    seed: u64,
    count: usize,
) -> Result<SampleBatch> {
    if fields.len() != volume.len() {
        return Err(Error::InvalidParameter(format!(
            "{} fields for a volume of {} vertices",
            fields.len(),
            volume.len()
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let residual = internal_residual(graph, volume, lambda, fields)?;
    if residual > FIXED_POINT_TOL {
        return Err(Error::NotFixedPoint {
            residual,
            threshold: FIXED_POINT_TOL,
        });
    }
    let tables = conditional_tables(graph, volume, lambda, fields);
    let nv = volume.len();
    let parents: Vec<usize> = (0..nv).map(|v| volume.parent(v).unwrap_or(0)).collect();

    let configurations: Vec<Configuration> = (0..count)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let mut spins = vec![0u8; nv];
            spins[0] = pick(&tables[0][0], rng.gen());
            for v in 1..nv {
                let parent = spins[parents[v]] as usize;
                spins[v] = pick(&tables[v][parent], rng.gen());
            }
            Configuration::new(spins).expect("spins are in range")
        })
        .collect();

    let mut counts = vec![[0u64; 3]; nv];
    for c in &configurations {
        for (v, &s) in c.spins().iter().enumerate() {
            counts[v][s as usize] += 1;
        }
    }
    let empirical_marginals = counts
        .iter()
        .map(|c| c.map(|x| x as f64 / count.max(1) as f64))
        .collect();
    Ok(SampleBatch {
        seed,
        count,
        graph: graph.name().to_string(),
        k: volume.k(),
        n: volume.n(),
        root: volume.root_degree(),
        lambda,
        configurations,
        empirical_marginals,
    })
}

/// Total-variation distance between the empirical law of `batch` and `measure`.
pub fn total_variation(batch: &SampleBatch, measure: &FiniteMeasure) -> f64 {
    use std::collections::HashMap;
    let mut freq: HashMap<&[Spin], f64> = HashMap::new();
    let inc = 1.0 / batch.count.max(1) as f64;
    for c in &batch.configurations {
        *freq.entry(c.spins()).or_default() += inc;
    }
    let mut tv = 0.0;
    for (c, &p) in measure.configurations.iter().zip(&measure.probabilities) {
        tv += (freq.remove(c.spins()).unwrap_or(0.0) - p).abs();
    }
    tv += freq.values().sum::<f64>();
    tv / 2.0
}

/// Schema tag written into the sidecar.
pub const SAMPLE_SCHEMA: &str = "hctree-samples/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub schema: String,
    pub graph: String,
    pub k: u32,
    pub n: u32,
    pub root: RootDegree,
    pub lambda: f64,
    pub seed: u64,
    pub count: usize,
    pub vertices: usize,
    pub rng: String,
    pub empirical_marginals: Vec<[f64; 3]>,
}

impl SampleBatch {
    pub fn sidecar(&self) -> SampleSidecar {
        SampleSidecar {
            schema: SAMPLE_SCHEMA.to_string(),
            graph: self.graph.clone(),
            k: self.k,
            n: self.n,
            root: self.root,
            lambda: self.lambda,
            seed: self.seed,
            count: self.count,
            vertices: self.empirical_marginals.len(),
            rng: "ChaCha8Rng::seed_from_u64(seed), stream = sample index".to_string(),
            empirical_marginals: self.empirical_marginals.clone(),
        }
    }

    /// Writes one comma-separated row of states per sample, vertices in
    /// breadth-first order.
    pub fn write_matrix<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut line = String::new();
        for c in &self.configurations {
            line.clear();
            for (i, s) in c.spins().iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push((b'0' + s) as char);
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Writes the matrix to `matrix_path` and the JSON sidecar to `sidecar_path`.
    pub fn export(&self, matrix_path: &Path, sidecar_path: &Path) -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(matrix_path)?);
        self.write_matrix(&mut w)?;
        w.flush()?;
        let json = serde_json::to_string_pretty(&self.sidecar()).map_err(std::io::Error::other)?;
        std::fs::write(sidecar_path, json + "\n")
    }
}

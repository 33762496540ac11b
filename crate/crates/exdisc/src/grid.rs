//! Radial meshes on [r_inner, R] with trapezoid quadrature for the plane
//! measure r dr. Every discrete inner product and every symmetry statement
//! in the operator modules is taken with respect to these weights.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    r_inner: f64,
    r_outer: f64,
    grading: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Builds a radial grid.
///
/// Exterior grids (`r_inner > 0`) include the boundary node `r_inner` and use
/// a power-law stretch `r = r_inner + (R - r_inner) t^grading`, clustering
/// nodes toward the boundary for `grading > 1`. Whole-plane grids
/// (`r_inner = 0`) are cell-centered near the origin: the first node sits at
/// half a mesh step, so the coordinate singularity never becomes a node.
pub fn build_grid(r_inner: f64, r_outer: f64, n: usize, grading: f64) -> Result<RadialGrid> {
    if !r_inner.is_finite() || !r_outer.is_finite() || !grading.is_finite() {
        return Err(Error::InvalidGrid("non-finite input".into()));
    }
    if n < 16 {
        return Err(Error::InvalidGrid(format!("N = {n} < 16")));
    }
    if r_inner < 0.0 || r_outer <= r_inner {
        return Err(Error::InvalidGrid(format!(
            "need 0 <= r_inner < r_outer, got [{r_inner}, {r_outer}]"
        )));
    }
    if grading < 1.0 {
        return Err(Error::InvalidGrid(format!("grading = {grading} < 1")));
    }
    let nodes: Vec<f64> = if r_inner > 0.0 {
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                r_inner + (r_outer - r_inner) * t.powf(grading)
            })
            .collect()
    } else {
        (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) / (n as f64 - 0.5);
                r_outer * t.powf(grading)
            })
            .collect()
    };
    RadialGrid::from_nodes(r_inner, r_outer, grading, nodes)
}

impl RadialGrid {
    fn from_nodes(r_inner: f64, r_outer: f64, grading: f64, nodes: Vec<f64>) -> Result<Self> {
        for w in nodes.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidGrid("nodes not strictly increasing".into()));
            }
        }
        let n = nodes.len();
        let mut weights = vec![0.0; n];
        weights[0] = nodes[0] * (nodes[1] - nodes[0]) / 2.0;
        weights[n - 1] = nodes[n - 1] * (nodes[n - 1] - nodes[n - 2]) / 2.0;
        for i in 1..n - 1 {
            weights[i] = nodes[i] * (nodes[i + 1] - nodes[i - 1]) / 2.0;
        }
        if r_inner == 0.0 {
            // Exact mass of the origin cell [0, r_0], so that the quadrature
            // of f = 1 reproduces R^2/2 exactly.
            weights[0] += nodes[0] * nodes[0] / 2.0;
        }
        Ok(RadialGrid {
            r_inner,
            r_outer,
            grading,
            nodes,
            weights,
        })
    }

    /// Extends an exterior grid to a whole-plane grid that shares its nodes
    /// on [1, R]: `n_inner` uniform cell-centered nodes fill (0, 1).
    pub fn whole_plane_matching(ext: &RadialGrid, n_inner: usize) -> Result<RadialGrid> {
        if !ext.is_exterior() {
            return Err(Error::InvalidGrid(
                "whole_plane_matching needs an exterior grid".into(),
            ));
        }
        if n_inner < 8 {
            return Err(Error::InvalidGrid(format!("n_inner = {n_inner} < 8")));
        }
        let h0 = ext.r_inner / n_inner as f64;
        let mut nodes: Vec<f64> = (0..n_inner).map(|i| (i as f64 + 0.5) * h0).collect();
        nodes.extend_from_slice(&ext.nodes);
        RadialGrid::from_nodes(0.0, ext.r_outer, ext.grading, nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_exterior(&self) -> bool {
        self.r_inner > 0.0
    }

    /// Spacing of interval i, `nodes[i+1] - nodes[i]`.
    pub fn spacing(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    /// Face radius between nodes i and i+1.
    pub fn face_radius(&self, i: usize) -> f64 {
        0.5 * (self.nodes[i] + self.nodes[i + 1])
    }

    /// Discrete pairing sum w_i u_i v_i over the leading `u.len()` nodes.
    pub fn inner_product(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != v.len() || u.len() > self.len() {
            return Err(Error::DimensionMismatch(format!(
                "inner_product: {} vs {} on grid of {}",
                u.len(),
                v.len(),
                self.len()
            )));
        }
        Ok(u.iter()
            .zip(v)
            .zip(&self.weights)
            .map(|((a, b), w)| w * a * b)
            .sum())
    }
}

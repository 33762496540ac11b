//! Per-Fourier-mode radial discretizations.
//!
//! For a mode index m the second-order model operator -Δ + c0 reduces to the
//! radial form -(1/r)(r u')' + (m²/r² + c0) u, discretized in conservative
//! (flux) form on the grid: row i balances the fluxes r_{i±1/2} u' across the
//! cell faces against the cell mass w_i. This makes every assembled matrix
//! symmetric with respect to the quadrature weights, which is what all the
//! resolvent identities downstream rely on.
//!
//! Boundary conditions at r = r_inner enter through the half-cell balance of
//! the boundary node: a condition ∂_r u = c·u contributes c·r_0/w_0 to the
//! boundary row. The far boundary is always homogeneous Dirichlet. The
//! fourth-order operator Δ² + 1 is assembled as the square of the Δ stencil
//! plus identity, with its boundary family built from the quadratic form
//! ∫(Δu)² + ∫u² + g1·(γ₁u)² on functions vanishing at the boundary.

use std::sync::Arc;

use crate::band::{Banded, SpdBandLu, TridiagLu};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::krein::BoundarySymbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorOrder {
    Second,
    Fourth,
}

/// Coefficients of the model operator: A = -Δ + c0 (second order) or
/// A = Δ² + c0 (fourth order, c0 = 1 in the standard instance).
#[derive(Debug, Clone, Copy)]
pub struct Coefficients {
    pub order: OperatorOrder,
    pub c0: f64,
}

impl Coefficients {
    pub fn second_order(c0: f64) -> Result<Self> {
        if !(c0 > 0.0) || !c0.is_finite() {
            return Err(Error::InvalidConfig(format!("c0 = {c0} must be positive")));
        }
        Ok(Coefficients {
            order: OperatorOrder::Second,
            c0,
        })
    }

    pub fn biharmonic() -> Self {
        Coefficients {
            order: OperatorOrder::Fourth,
            c0: 1.0,
        }
    }
}

/// Boundary condition selector for [`apply_bc`].
#[derive(Debug, Clone)]
pub enum RealizationSpec {
    Dirichlet,
    Neumann,
    Robin(f64),
    NeumannType(BoundarySymbol),
    BiharmonicNormal(BoundarySymbol),
    BiharmonicPerturbed(BoundarySymbol),
}

impl RealizationSpec {
    fn is_second_order(&self) -> bool {
        matches!(
            self,
            RealizationSpec::Dirichlet
                | RealizationSpec::Neumann
                | RealizationSpec::Robin(_)
                | RealizationSpec::NeumannType(_)
        )
    }
}

/// What was applied to a matrix, for error reporting and dispatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcTag {
    Raw,
    Dirichlet,
    /// Boundary row with ∂_r u(r_0) = c·u(r_0) folded in; Neumann is c = 0.
    Flux {
        c: f64,
    },
    Biharmonic {
        g1: f64,
    },
    WholePlane,
}

/// A per-mode discrete radial operator on the active node set.
///
/// `node_offset` maps matrix row 0 to its grid node: 0 when the boundary node
/// is an unknown (Neumann family, whole-plane), 1 when it has been eliminated
/// (Dirichlet, biharmonic family). The far node is always eliminated.
#[derive(Debug, Clone)]
pub struct ModeMatrix {
    m: usize,
    order: OperatorOrder,
    c0: f64,
    band: Banded,
    grid: Arc<RadialGrid>,
    node_offset: usize,
    bc: BcTag,
}

pub enum Factorization {
    Tridiag(TridiagLu),
    Band(SpdBandLu),
}

impl Factorization {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        match self {
            Factorization::Tridiag(lu) => lu.solve(rhs),
            Factorization::Band(lu) => lu.solve(rhs),
        }
    }
}

impl ModeMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> OperatorOrder {
        self.order
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn band(&self) -> &Banded {
        &self.band
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn bc(&self) -> BcTag {
        self.bc
    }

    pub fn node_offset(&self) -> usize {
        self.node_offset
    }

    pub fn n(&self) -> usize {
        self.band.n()
    }

    pub fn is_raw(&self) -> bool {
        self.bc == BcTag::Raw
    }

    /// Quadrature weights of the active nodes.
    pub fn active_weights(&self) -> &[f64] {
        &self.grid.weights()[self.node_offset..self.node_offset + self.n()]
    }

    /// Radii of the active nodes.
    pub fn active_nodes(&self) -> &[f64] {
        &self.grid.nodes()[self.node_offset..self.node_offset + self.n()]
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.band.matvec(u)
    }

    /// Relative asymmetry of W^{1/2} M W^{-1/2}, measured over row pairs
    /// where both rows carry entries (raw matrices have empty boundary rows).
    pub fn weighted_symmetry_defect(&self) -> f64 {
        let w = self.active_weights();
        let n = self.n();
        let bw = self.band.kl().max(self.band.ku());
        let mut row_live = vec![false; n];
        for i in 0..n {
            for j in i.saturating_sub(bw)..=(i + bw).min(n - 1) {
                if self.band.get(i, j) != 0.0 {
                    row_live[i] = true;
                    break;
                }
            }
        }
        let mut scale = 0.0f64;
        let mut defect = 0.0f64;
        for i in 0..n {
            if !row_live[i] {
                continue;
            }
            for j in (i + 1)..=(i + bw).min(n - 1) {
                if !row_live[j] {
                    continue;
                }
                let sij = self.band.get(i, j) * (w[i] / w[j]).sqrt();
                let sji = self.band.get(j, i) * (w[j] / w[i]).sqrt();
                scale = scale.max(sij.abs()).max(sji.abs());
                defect = defect.max((sij - sji).abs());
            }
            scale = scale.max(self.band.get(i, i).abs());
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    pub fn factorize(&self) -> Result<Factorization> {
        if self.is_raw() {
            return Err(Error::IncompatibleRealization(
                "cannot factorize a matrix without boundary conditions".into(),
            ));
        }
        if self.band.kl().max(self.band.ku()) <= 1 {
            Ok(Factorization::Tridiag(TridiagLu::new(&self.band)?))
        } else {
            Ok(Factorization::Band(SpdBandLu::new(&self.band)?))
        }
    }

    /// One-shot solve; callers with many right-hand sides should keep the
    /// [`Factorization`] from [`ModeMatrix::factorize`] instead.
    pub fn solve(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "solve: rhs length {} vs matrix size {}",
                f.len(),
                self.n()
            )));
        }
        Ok(self.factorize()?.solve(f))
    }
}

/// Coefficients of the Δ_m stencil at interior node i (uses nodes i-1, i, i+1):
/// returns (lo, diag, hi) with (Δu)_i = lo·u_{i-1} + diag·u_i + hi·u_{i+1}.
fn lap_row(grid: &RadialGrid, m: usize, i: usize) -> (f64, f64, f64) {
    let w = grid.weights()[i];
    let lo = grid.face_radius(i - 1) / (grid.spacing(i - 1) * w);
    let hi = grid.face_radius(i) / (grid.spacing(i) * w);
    let r = grid.nodes()[i];
    let m2 = (m * m) as f64;
    (lo, -(lo + hi) - m2 / (r * r), hi)
}

/// Second-order rows of A = -Δ_m + c0 as a full-grid band; boundary rows empty.
fn raw_second_order_band(grid: &RadialGrid, m: usize, c0: f64) -> Banded {
    let n = grid.len();
    let mut b = Banded::zeros(n, 1, 1);
    for i in 1..n - 1 {
        let (lo, diag, hi) = lap_row(grid, m, i);
        b.set(i, i - 1, -lo);
        b.set(i, i, -diag + c0);
        b.set(i, i + 1, -hi);
    }
    b
}

/// Neumann-family matrix on active nodes 0..N-2: boundary row is the
/// half-cell flux balance with ∂_r u(r_0) = c·u(r_0) folded in.
pub(crate) fn flux_family_band(grid: &RadialGrid, m: usize, c0: f64, c: f64) -> Banded {
    let n = grid.len() - 1;
    let mut b = Banded::zeros(n, 1, 1);
    let w0 = grid.weights()[0];
    let r0 = grid.nodes()[0];
    let hflux = grid.face_radius(0) / (grid.spacing(0) * w0);
    let m2 = (m * m) as f64;
    b.set(0, 0, hflux + m2 / (r0 * r0) + c0 + c * r0 / w0);
    b.set(0, 1, -hflux);
    for i in 1..n {
        let (lo, diag, hi) = lap_row(grid, m, i);
        b.set(i, i - 1, -lo);
        b.set(i, i, -diag + c0);
        if i + 1 < n {
            b.set(i, i + 1, -hi);
        }
    }
    b
}

pub(crate) fn dirichlet_band(grid: &RadialGrid, m: usize, c0: f64) -> Banded {
    let n = grid.len() - 2;
    let mut b = Banded::zeros(n, 1, 1);
    for i in 0..n {
        let (lo, diag, hi) = lap_row(grid, m, i + 1);
        if i > 0 {
            b.set(i, i - 1, -lo);
        }
        b.set(i, i, -diag + c0);
        if i + 1 < n {
            b.set(i, i + 1, -hi);
        }
    }
    b
}

fn whole_plane_band(grid: &RadialGrid, m: usize, c0: f64) -> Banded {
    // Same structure as the flux family with c = 0; the flux through the
    // origin side of the first cell vanishes (r u' -> 0 at r = 0).
    flux_family_band(grid, m, c0, 0.0)
}

/// Pieces of the fourth-order boundary family on interior nodes 1..N-2:
/// `b` is T² + I plus the boundary half-cell of ∫(Δu)², `delta` the one-sided
/// γ₁ = ∂_r u(r_0) stencil (with u(r_0) = 0), `t` the interior -Δ_m.
pub(crate) struct BiharmonicParts {
    pub t: Banded,
    pub b: Banded,
    pub delta: [f64; 2],
    pub w_int: Vec<f64>,
}

pub(crate) fn biharmonic_parts(grid: &RadialGrid, m: usize) -> BiharmonicParts {
    let nn = grid.len();
    let n = nn - 2;
    let mut t = Banded::zeros(n, 1, 1);
    for i in 0..n {
        let (lo, diag, hi) = lap_row(grid, m, i + 1);
        if i > 0 {
            t.set(i, i - 1, -lo);
        }
        t.set(i, i, -diag);
        if i + 1 < n {
            t.set(i, i + 1, -hi);
        }
    }
    // b = T^2 + I
    let mut b = Banded::zeros(n, 2, 2);
    for i in 0..n {
        for k in i.saturating_sub(1)..=(i + 1).min(n - 1) {
            let tik = t.get(i, k);
            if tik == 0.0 {
                continue;
            }
            for j in k.saturating_sub(1)..=(k + 1).min(n - 1) {
                let v = tik * t.get(k, j);
                if v != 0.0 {
                    b.add(i, j, v);
                }
            }
        }
        b.add(i, i, 1.0);
    }
    // One-sided stencils at the boundary, quadratic through
    // (0, 0), (a, u_1), (bb, u_2) in the offset coordinate x = r - r_0.
    let a = grid.spacing(0);
    let bb = a + grid.spacing(1);
    let den = a * bb * (bb - a);
    let r0 = grid.nodes()[0];
    let delta = [bb * bb / den, -a * a / den];
    // Δ_m u at r_0 for u(r_0) = 0: u'' + u'/r_0 = 2 c2 + c1/r_0.
    let l0 = [
        (-2.0 * bb + bb * bb / r0) / den,
        (2.0 * a - a * a / r0) / den,
    ];
    let w0 = grid.weights()[0];
    let w_int: Vec<f64> = grid.weights()[1..nn - 1].to_vec();
    for i in 0..2 {
        for j in 0..2 {
            b.add(i, j, w0 * l0[i] * l0[j] / w_int[i]);
        }
    }
    BiharmonicParts { t, b, delta, w_int }
}

pub(crate) fn biharmonic_family_band(parts: &BiharmonicParts, g1: f64) -> Banded {
    let mut b = parts.b.clone();
    for i in 0..2 {
        for j in 0..2 {
            b.add(i, j, g1 * parts.delta[i] * parts.delta[j] / parts.w_int[i]);
        }
    }
    b
}

/// Interior rows of A = -Δ_m + c0, without boundary conditions.
pub fn assemble_second_order(
    m: usize,
    grid: &Arc<RadialGrid>,
    co: &Coefficients,
) -> Result<ModeMatrix> {
    if co.order != OperatorOrder::Second {
        return Err(Error::IncompatibleRealization(
            "assemble_second_order requires order 2 coefficients".into(),
        ));
    }
    Ok(ModeMatrix {
        m,
        order: OperatorOrder::Second,
        c0: co.c0,
        band: raw_second_order_band(grid, m, co.c0),
        grid: grid.clone(),
        node_offset: 0,
        bc: BcTag::Raw,
    })
}

/// Interior rows of A = Δ_m² + 1 as the squared Δ_m stencil plus identity.
pub fn assemble_biharmonic(m: usize, grid: &Arc<RadialGrid>) -> Result<ModeMatrix> {
    if !grid.is_exterior() {
        return Err(Error::IncompatibleRealization(
            "biharmonic assembly requires an exterior grid".into(),
        ));
    }
    let n = grid.len();
    let mut band = Banded::zeros(n, 2, 2);
    for i in 2..n - 2 {
        let (lo_i, diag_i, hi_i) = lap_row(grid, m, i);
        for (k, cik) in [(i - 1, lo_i), (i, diag_i), (i + 1, hi_i)] {
            let (lo_k, diag_k, hi_k) = lap_row(grid, m, k);
            band.add(i, k - 1, cik * lo_k);
            band.add(i, k, cik * diag_k);
            band.add(i, k + 1, cik * hi_k);
        }
        band.add(i, i, 1.0);
    }
    Ok(ModeMatrix {
        m,
        order: OperatorOrder::Fourth,
        c0: 1.0,
        band,
        grid: grid.clone(),
        node_offset: 0,
        bc: BcTag::Raw,
    })
}

/// Applies a boundary condition to a raw assembly, producing the realization
/// matrix on its active node set. The far boundary is always homogeneous
/// Dirichlet (plus Δu(R) = 0 in the fourth-order case).
pub fn apply_bc(raw: &ModeMatrix, spec: &RealizationSpec) -> Result<ModeMatrix> {
    if !raw.is_raw() {
        return Err(Error::IncompatibleRealization(
            "apply_bc expects a raw assembly".into(),
        ));
    }
    let grid = &raw.grid;
    let m = raw.m;
    match (raw.order, spec) {
        (OperatorOrder::Second, s) if s.is_second_order() => {
            if !grid.is_exterior() {
                return Err(Error::IncompatibleRealization(
                    "boundary conditions apply to exterior grids; use whole_plane_operator".into(),
                ));
            }
            let c0 = raw.c0;
            match s {
                RealizationSpec::Dirichlet => Ok(ModeMatrix {
                    m,
                    order: OperatorOrder::Second,
                    c0,
                    band: dirichlet_band(grid, m, c0),
                    grid: grid.clone(),
                    node_offset: 1,
                    bc: BcTag::Dirichlet,
                }),
                RealizationSpec::Neumann => Ok(flux_mode_matrix(grid, m, c0, 0.0)),
                RealizationSpec::Robin(b) => {
                    if !b.is_finite() {
                        return Err(Error::InvalidSymbol("Robin coefficient not finite".into()));
                    }
                    Ok(flux_mode_matrix(grid, m, c0, *b))
                }
                RealizationSpec::NeumannType(sym) => {
                    let c = sym.value(m)?;
                    Ok(flux_mode_matrix(grid, m, c0, c))
                }
                _ => unreachable!(),
            }
        }
        (OperatorOrder::Fourth, RealizationSpec::BiharmonicNormal(g1))
        | (OperatorOrder::Fourth, RealizationSpec::BiharmonicPerturbed(g1)) => {
            let g = g1.value(m)?;
            let parts = biharmonic_parts(grid, m);
            Ok(ModeMatrix {
                m,
                order: OperatorOrder::Fourth,
                c0: 1.0,
                band: biharmonic_family_band(&parts, g),
                grid: grid.clone(),
                node_offset: 1,
                bc: BcTag::Biharmonic { g1: g },
            })
        }
        _ => Err(Error::IncompatibleRealization(format!(
            "spec {spec:?} does not match operator order {:?}",
            raw.order
        ))),
    }
}

fn flux_mode_matrix(grid: &Arc<RadialGrid>, m: usize, c0: f64, c: f64) -> ModeMatrix {
    ModeMatrix {
        m,
        order: OperatorOrder::Second,
        c0,
        band: flux_family_band(grid, m, c0, c),
        grid: grid.clone(),
        node_offset: 0,
        bc: BcTag::Flux { c },
    }
}

/// Mode-m realization of A = -Δ + c0 on a whole-plane grid [0, R]: origin
/// regularity is carried by the cell-centered stencil (zero flux at the
/// origin face, potential m²/r² at the first node), far boundary Dirichlet.
pub fn whole_plane_operator(
    m: usize,
    grid: &Arc<RadialGrid>,
    co: &Coefficients,
) -> Result<ModeMatrix> {
    if grid.is_exterior() {
        return Err(Error::IncompatibleRealization(
            "whole_plane_operator requires a grid with r_inner = 0".into(),
        ));
    }
    if co.order != OperatorOrder::Second {
        return Err(Error::IncompatibleRealization(
            "whole_plane_operator requires order 2".into(),
        ));
    }
    Ok(ModeMatrix {
        m,
        order: OperatorOrder::Second,
        c0: co.c0,
        band: whole_plane_band(grid, m, co.c0),
        grid: grid.clone(),
        node_offset: 0,
        bc: BcTag::WholePlane,
    })
}

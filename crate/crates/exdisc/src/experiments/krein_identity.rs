//! Resolvent-identity experiment: the inverse of every Robin and
//! Neumann-type realization must equal the (extended) Dirichlet inverse plus
//! the rank-one null-solution correction, mode by mode, at the level of the
//! discrete algebra.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::report::{ExperimentReport, ReportBuilder, SeriesRow};
use crate::error::Result;
use crate::grid::{build_grid, RadialGrid};
use crate::krein::{krein_inverse, poisson_mode, BoundarySymbol, ModeNullData};
use crate::mode_ops::{
    apply_bc, assemble_second_order, Coefficients, ModeMatrix, RealizationSpec,
};
use crate::spectra::eigs_sym;

/// Relative Frobenius distance between a directly factorized inverse and a
/// dense candidate.
fn inverse_distance(mm: &ModeMatrix, candidate: &DMatrix<f64>) -> Result<f64> {
    let lu = mm.factorize()?;
    let n = mm.n();
    let mut e = vec![0.0; n];
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        e[j] = 1.0;
        let col = lu.solve(&e);
        e[j] = 0.0;
        for i in 0..n {
            let d = col[i] - candidate[(i, j)];
            num += d * d;
            den += col[i] * col[i];
        }
    }
    Ok((num / den).sqrt())
}

fn identity_error_for(
    grid: &Arc<RadialGrid>,
    co: &Coefficients,
    nd: &ModeNullData,
    dir: &ModeMatrix,
    spec: &RealizationSpec,
    l_m: f64,
) -> Result<f64> {
    let raw = assemble_second_order(nd.m, grid, co)?;
    let direct = apply_bc(&raw, spec)?;
    let k = krein_inverse(dir, nd, l_m)?;
    inverse_distance(&direct, &k)
}

pub fn run_krein_identity(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let grid = Arc::new(build_grid(1.0, cfg.radius(), cfg.grid_n(), cfg.grid_grading())?);
    let co = Coefficients::second_order(cfg.c0)?;
    let modes = cfg.mode_cutoff();
    let mut rb = ReportBuilder::new(cfg);

    // Robin sweep over every mode.
    let per_mode: Vec<(usize, ModeNullData, Vec<f64>)> = (0..modes)
        .into_par_iter()
        .map(|m| -> Result<_> {
            let nd = poisson_mode(m, &grid, &co)?;
            let raw = assemble_second_order(m, &grid, &co)?;
            let dir = apply_bc(&raw, &RealizationSpec::Dirichlet)?;
            let errs: Vec<f64> = cfg
                .b_values
                .iter()
                .map(|b| {
                    identity_error_for(
                        &grid,
                        &co,
                        &nd,
                        &dir,
                        &RealizationSpec::Robin(*b),
                        b - nd.p_m,
                    )
                })
                .collect::<Result<_>>()?;
            Ok((m, nd, errs))
        })
        .collect::<Result<_>>()?;

    let max_identity = per_mode
        .iter()
        .flat_map(|(_, _, e)| e.iter().copied())
        .fold(0.0f64, f64::max);
    rb.criterion(
        "identity_max_rel_error",
        max_identity,
        format!("< {:.0e}", cfg.identity_tol),
        max_identity < cfg.identity_tol,
    );

    // Randomized Neumann-type equivalence: draw invertible diagonal symbols
    // L, assemble the boundary condition with C = L + P directly, and compare
    // against the rank-one formula on a spread of modes.
    let sample_modes: Vec<usize> = [0usize, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 127]
        .into_iter()
        .filter(|m| *m < modes)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draws: Vec<BoundarySymbol> = Vec::with_capacity(cfg.random_draws);
    for _ in 0..cfg.random_draws {
        let values: Vec<f64> = (0..modes)
            .map(|_| {
                let mag = rng.gen_range(0.5..2.5);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        draws.push(BoundarySymbol::new(values, 0)?);
    }
    let equiv_errs: Vec<f64> = draws
        .par_iter()
        .map(|l_sym| -> Result<f64> {
            let mut worst = 0.0f64;
            for &m in &sample_modes {
                let nd = poisson_mode(m, &grid, &co)?;
                let raw = assemble_second_order(m, &grid, &co)?;
                let dir = apply_bc(&raw, &RealizationSpec::Dirichlet)?;
                let l_m = l_sym.value(m)?;
                let c_sym = BoundarySymbol::from_fn(modes, 1, |k| {
                    l_sym.values()[k] + if k == m { nd.p_m } else { 0.0 }
                });
                let err = identity_error_for(
                    &grid,
                    &co,
                    &nd,
                    &dir,
                    &RealizationSpec::NeumannType(c_sym),
                    l_m,
                )?;
                worst = worst.max(err);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let max_equiv = equiv_errs.iter().copied().fold(0.0f64, f64::max);
    rb.criterion(
        "equivalence_max_rel_error",
        max_equiv,
        format!("< {:.0e} over {} draws", cfg.identity_tol, cfg.random_draws),
        max_equiv < cfg.identity_tol,
    );

    // Dirichlet limit: for b -> infinity the correction dies and the Robin
    // inverse collapses onto the Dirichlet inverse.
    let b_large = 1e6;
    let mut limit_ratio = 0.0f64;
    for m in [0usize, 1, 5] {
        if m >= modes {
            continue;
        }
        let nd = poisson_mode(m, &grid, &co)?;
        let raw = assemble_second_order(m, &grid, &co)?;
        let dir = apply_bc(&raw, &RealizationSpec::Dirichlet)?;
        let dir_norm = 1.0 / eigs_sym(&dir)?[0];
        let corr_norm = nd.lambda_m / (b_large - nd.p_m).abs();
        limit_ratio = limit_ratio.max(corr_norm / dir_norm);
    }
    rb.criterion(
        "dirichlet_limit_ratio",
        limit_ratio,
        "< 1e-4 at b = 1e6".into(),
        limit_ratio < 1e-4,
    );

    // Per-(mode, b) identity errors as a series for inspection.
    let mut rows = Vec::new();
    let mut idx = 0;
    for (m, _, errs) in &per_mode {
        for e in errs {
            idx += 1;
            rows.push(SeriesRow {
                index: idx,
                value: *e,
                mode: *m,
                multiplicity: 1,
            });
        }
    }
    rb.series_raw("identity_errors", rows);

    Ok(rb.finish())
}

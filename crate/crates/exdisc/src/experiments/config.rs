//! Experiment configuration: one flat table per experiment, every field
//! optional except `kind`, with per-kind defaults resolved at run time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krein::TSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    KreinIdentity,
    Weyl,
    Negligibility,
    Union,
    Biharmonic,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::KreinIdentity => "krein_identity",
            ExperimentKind::Weyl => "weyl",
            ExperimentKind::Negligibility => "negligibility",
            ExperimentKind::Union => "union",
            ExperimentKind::Biharmonic => "biharmonic",
        }
    }

    pub fn all() -> [ExperimentKind; 5] {
        [
            ExperimentKind::KreinIdentity,
            ExperimentKind::Weyl,
            ExperimentKind::Negligibility,
            ExperimentKind::Union,
            ExperimentKind::Biharmonic,
        ]
    }

    pub fn description(&self) -> &'static str {
        match self {
            ExperimentKind::KreinIdentity => {
                "rank-one resolvent identity: direct Robin/Neumann-type inverses \
                 against the Dirichlet inverse plus null-solution correction"
            }
            ExperimentKind::Weyl => {
                "power-law exponents of merged singular values of inverse \
                 differences (boundary-condition pairs and interior truncation)"
            }
            ExperimentKind::Negligibility => {
                "superpolynomial decay of far-field restrictions of the Poisson \
                 operator and of the off-diagonal correction blocks"
            }
            ExperimentKind::Union => {
                "essential-spectrum augmentation: eigenvalue clusters injected at \
                 prescribed points by nonlocal boundary conditions, plus \
                 counting-function comparison with the Dirichlet realization"
            }
            ExperimentKind::Biharmonic => {
                "fourth-order boundary family: perturbation of the slope-to-moment \
                 map, injected cluster, positivity and zero-perturbation reduction"
            }
        }
    }
}

fn d_c0() -> f64 {
    1.0
}
fn d_b() -> f64 {
    1.0
}
fn d_b_values() -> Vec<f64> {
    vec![0.0, 1.0, 10.0]
}
fn d_a() -> f64 {
    0.5
}
fn d_kappa() -> f64 {
    1.0
}
fn d_a_tilde() -> f64 {
    0.5
}
fn d_cutoff() -> f64 {
    2.0
}
fn d_halfwidth() -> f64 {
    0.05
}
fn d_p1_modes() -> usize {
    64
}
fn d_p1_n() -> usize {
    300
}
fn d_p1_inner() -> usize {
    64
}
fn d_draws() -> usize {
    20
}
fn d_thresholds() -> usize {
    50
}
fn d_identity_tol() -> f64 {
    1e-8
}
fn d_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Display / output-file name; defaults to the kind.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "d_c0")]
    pub c0: f64,
    /// Truncation radius; default 30 (biharmonic: 20).
    #[serde(default)]
    pub r: Option<f64>,
    /// Radial node count; default 600 (biharmonic: 480).
    #[serde(default)]
    pub n: Option<usize>,
    /// Mesh grading toward the boundary; default 2 (biharmonic: uniform).
    #[serde(default)]
    pub grading: Option<f64>,
    /// Mode cutoff M; modes 0..M are computed. Defaults to 128, or to the
    /// top of the ladder where a ladder applies.
    #[serde(default)]
    pub modes: Option<usize>,
    /// Mode-cutoff ladder for cluster-growth and slope-tightening checks;
    /// default [32, 64, 128] (biharmonic: [16, 32, 64]).
    #[serde(default)]
    pub modes_ladder: Option<Vec<usize>>,
    /// Robin coefficient for the boundary-condition pairs.
    #[serde(default = "d_b")]
    pub b: f64,
    /// Robin coefficients swept by the identity experiment.
    #[serde(default = "d_b_values")]
    pub b_values: Vec<f64>,
    /// T = aI value for the union experiment.
    #[serde(default = "d_a")]
    pub a: f64,
    /// Diagonal T values, cycled over modes; overrides `a` when present.
    #[serde(default)]
    pub t_values: Option<Vec<f64>>,
    /// Scale of the order-one boundary symbol g1_m = kappa (1 + m).
    #[serde(default = "d_kappa")]
    pub kappa: f64,
    /// Cluster target of the perturbed biharmonic realization.
    #[serde(default = "d_a_tilde")]
    pub a_tilde: f64,
    /// Far-field cutoff radius r0 for the negligibility experiment.
    #[serde(default = "d_cutoff")]
    pub cutoff_radius: f64,
    #[serde(default = "d_halfwidth")]
    pub cluster_halfwidth: f64,
    /// Mode cutoff of the interior-truncation (whole-plane vs exterior) fit.
    #[serde(default = "d_p1_modes")]
    pub p1_modes: usize,
    /// Exterior node count of the matched grid pair for that fit.
    #[serde(default = "d_p1_n")]
    pub p1_n: usize,
    /// Interior (disc) node count of the matched whole-plane grid.
    #[serde(default = "d_p1_inner")]
    pub p1_inner: usize,
    /// Randomized boundary symbols drawn by the equivalence check.
    #[serde(default = "d_draws")]
    pub random_draws: usize,
    /// Number of counting-function thresholds on [c0, 4 c0].
    #[serde(default = "d_thresholds")]
    pub threshold_count: usize,
    #[serde(default = "d_identity_tol")]
    pub identity_tol: f64,
    #[serde(default = "d_seed")]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        // All-defaults config; the TOML with just `kind` set.
        toml::from_str(&format!("kind = \"{}\"", kind.as_str())).expect("default config")
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.as_str().into())
    }

    pub fn radius(&self) -> f64 {
        self.r.unwrap_or(match self.kind {
            ExperimentKind::Biharmonic => 20.0,
            _ => 30.0,
        })
    }

    pub fn grid_n(&self) -> usize {
        self.n.unwrap_or(match self.kind {
            ExperimentKind::Biharmonic => 480,
            _ => 600,
        })
    }

    pub fn grid_grading(&self) -> f64 {
        self.grading.unwrap_or(match self.kind {
            ExperimentKind::Biharmonic => 1.0,
            _ => 2.0,
        })
    }

    pub fn ladder(&self) -> Vec<usize> {
        self.modes_ladder.clone().unwrap_or(match self.kind {
            ExperimentKind::Biharmonic => vec![16, 32, 64],
            _ => vec![32, 64, 128],
        })
    }

    /// Mode cutoff M: modes 0..M enter the computation.
    pub fn mode_cutoff(&self) -> usize {
        if let Some(m) = self.modes {
            return m;
        }
        match self.kind {
            ExperimentKind::Union | ExperimentKind::Biharmonic | ExperimentKind::Weyl => {
                self.ladder().into_iter().max().unwrap_or(128)
            }
            _ => 128,
        }
    }

    pub fn t_spec(&self) -> TSpec {
        match &self.t_values {
            Some(t) => TSpec::Diagonal(t.clone()),
            None => TSpec::ConstantA(self.a),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.c0 > 0.0) {
            return fail(format!("c0 = {} violates c0 > 0", self.c0));
        }
        let r = self.radius();
        if !(r > 1.0) || !r.is_finite() {
            return fail(format!("r = {r} violates r > 1"));
        }
        if self.grid_n() < 16 {
            return fail(format!("n = {} violates n >= 16", self.grid_n()));
        }
        if self.grid_grading() < 1.0 {
            return fail(format!(
                "grading = {} violates grading >= 1",
                self.grid_grading()
            ));
        }
        if self.mode_cutoff() < 8 {
            return fail(format!("modes = {} violates M >= 8", self.mode_cutoff()));
        }
        let ladder = self.ladder();
        if ladder.is_empty() || ladder.windows(2).any(|w| w[1] <= w[0]) {
            return fail("modes_ladder must be nonempty and strictly increasing".into());
        }
        if ladder[0] < 8 {
            return fail(format!("modes_ladder start {} violates M >= 8", ladder[0]));
        }
        if !(self.cluster_halfwidth > 0.0) {
            return fail(format!(
                "cluster_halfwidth = {} violates halfwidth > 0",
                self.cluster_halfwidth
            ));
        }
        match self.kind {
            ExperimentKind::KreinIdentity => {
                if self.b_values.iter().any(|b| !b.is_finite() || *b < 0.0) {
                    return fail("b_values must be finite and >= 0".into());
                }
                if self.random_draws == 0 {
                    return fail("random_draws must be >= 1".into());
                }
                if !(self.identity_tol > 0.0) {
                    return fail("identity_tol must be positive".into());
                }
            }
            ExperimentKind::Weyl => {
                if !self.b.is_finite() || self.b <= 0.0 {
                    return fail(format!(
                        "b = {} violates b > 0 (the Robin pair must differ from Neumann)",
                        self.b
                    ));
                }
                if self.p1_modes < 8 || self.p1_n < 32 || self.p1_inner < 8 {
                    return fail("p1_modes >= 8, p1_n >= 32, p1_inner >= 8 required".into());
                }
            }
            ExperimentKind::Negligibility => {
                if !(self.cutoff_radius > 1.0 && self.cutoff_radius < r) {
                    return fail(format!(
                        "cutoff_radius = {} violates 1 < r0 < {r}",
                        self.cutoff_radius
                    ));
                }
            }
            ExperimentKind::Union => {
                self.t_spec().validate()?;
                if self.t_values.is_none() {
                    if self.a == 0.0 {
                        return fail("a = 0 violates the invertibility bound (a must be nonzero)"
                            .into());
                    }
                    if self.a >= self.c0 {
                        return fail(format!(
                            "a = {} lies in [c0, inf) = [{}, inf), inside the essential \
                             spectrum of the free operator; choose a below c0 or negative",
                            self.a, self.c0
                        ));
                    }
                }
                if self.threshold_count < 2 {
                    return fail("threshold_count must be >= 2".into());
                }
            }
            ExperimentKind::Biharmonic => {
                if !(self.kappa > 0.0) {
                    return fail(format!("kappa = {} violates kappa > 0", self.kappa));
                }
                if self.a_tilde == 0.0 {
                    return fail(
                        "a_tilde = 0 violates the invertibility bound (a_tilde must be nonzero)"
                            .into(),
                    );
                }
                if self.a_tilde >= 1.0 {
                    return fail(format!(
                        "a_tilde = {} lies in [1, inf), inside the essential spectrum of \
                         the fourth-order free operator",
                        self.a_tilde
                    ));
                }
            }
        }
        Ok(())
    }
}

//! Run configuration: group, space, node count, tolerances, output controls.
//! Validation failures here are configuration errors (exit code 3);
//! everything downstream is a run or check failure (exit code 2).

use clap::ValueEnum;
use loopmorse_core::lie::{GroupName, GroupSpec};
use loopmorse_core::pathspace::PathSpace;
use loopmorse_core::qham::QHSpaceModel;
use serde::Serialize;

/// CLI-level error with the exit-code split baked in.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration — exit code 3.
    Config(String),
    /// The run itself failed or reported a violated condition — exit code 2.
    Run(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Run(m) => write!(f, "run failed: {m}"),
        }
    }
}

/// Map a library error occurring mid-run to the check-failure exit path.
pub fn run_err(e: loopmorse_core::Error) -> CliError {
    CliError::Run(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupChoice {
    Su2,
    Su3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceChoice {
    /// Single point with moment value e.
    Point,
    /// Conjugacy class of exp(η) for supplied principal angles η.
    Conjugacy,
    /// Genus-h double: 2h group factors with the commutator-product moment.
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatChoice {
    Json,
    Csv,
}

/// Space selector with its parameters, echoed verbatim in reports.
#[derive(Debug, Clone, Serialize)]
pub struct SpaceSetup {
    pub kind: SpaceChoice,
    pub class_angles: Option<Vec<f64>>,
    pub genus: Option<usize>,
}

/// Effective tolerances for every reported check; `--tolerance` replaces all
/// of them with one value.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Relative error, energy gradient vs central finite difference.
    pub gradient_fd: f64,
    /// Gradient norm allowed at enumerated critical configurations.
    pub critical_gradient: f64,
    /// Relative error, Hessian pairing vs polarized finite difference.
    pub hessian_fd: f64,
    /// Residuals of the moment-map structure lemmas.
    pub lemma_residual: f64,
    /// |c − 1| for the commuting Jacobi endpoint ratio.
    pub jacobi_ratio: f64,
    /// Node-continuity residual of broken Jacobi fields.
    pub jacobi_continuity: f64,
    /// Sampling round trip α∘β (an exact identity).
    pub roundtrip: f64,
    /// Relative error between the sampled-path energy and f_n.
    pub energy_identity: f64,
    /// Allowed energy increase per shortening step.
    pub shortening: f64,
    /// Allowed deficit below the critical value on the minimizing manifold.
    pub min_deficit: f64,
    /// Largest principal angle of the Hessian null space against Σ_C.
    pub null_alignment: f64,
    /// Floor for the scaled singular value of the torus action on E_C^−.
    pub torus_singular: f64,
}

impl Tolerances {
    pub fn defaults() -> Tolerances {
        Tolerances {
            gradient_fd: 1e-6,
            critical_gradient: 1e-8,
            hessian_fd: 1e-4,
            lemma_residual: 1e-5,
            jacobi_ratio: 1e-10,
            jacobi_continuity: 1e-12,
            roundtrip: 0.0,
            energy_identity: 1e-10,
            shortening: 1e-10,
            min_deficit: 1e-9,
            null_alignment: 1e-6,
            torus_singular: 1e-6,
        }
    }

    pub fn override_all(value: f64) -> Tolerances {
        Tolerances {
            gradient_fd: value,
            critical_gradient: value,
            hessian_fd: value,
            lemma_residual: value,
            jacobi_ratio: value,
            jacobi_continuity: value,
            roundtrip: value,
            energy_identity: value,
            shortening: value,
            min_deficit: value,
            null_alignment: value,
            torus_singular: value,
        }
    }
}

/// Validated run configuration, echoed at the top of every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub group: GroupChoice,
    pub metric_scale: f64,
    pub space: SpaceSetup,
    pub nodes: usize,
    /// Requested comparison degree cap; null means "derive from the run".
    pub degree_cap: Option<usize>,
    pub format: FormatChoice,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Validate the raw CLI arguments into a runnable configuration.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        group: GroupChoice,
        metric_scale: f64,
        space: SpaceChoice,
        class_angles: Vec<f64>,
        genus: Option<usize>,
        nodes: usize,
        degree_cap: Option<usize>,
        tolerance: Option<f64>,
        format: FormatChoice,
        seed: u64,
    ) -> Result<RunConfig, CliError> {
        if nodes == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        if !(metric_scale > 0.0) || !metric_scale.is_finite() {
            return Err(CliError::Config(format!(
                "metric scale must be a positive finite number, got {metric_scale}"
            )));
        }
        let rank = match group {
            GroupChoice::Su2 => 1,
            GroupChoice::Su3 => 2,
        };
        let setup = match space {
            SpaceChoice::Point | SpaceChoice::Double => {
                if !class_angles.is_empty() {
                    return Err(CliError::Config(
                        "--class-angles is only meaningful for --space conjugacy".into(),
                    ));
                }
                if space == SpaceChoice::Point && genus.is_some() {
                    return Err(CliError::Config(
                        "--genus is only meaningful for --space double".into(),
                    ));
                }
                let genus = if space == SpaceChoice::Double {
                    let g = genus.unwrap_or(1);
                    if g == 0 {
                        return Err(CliError::Config("genus must be at least 1".into()));
                    }
                    Some(g)
                } else {
                    None
                };
                SpaceSetup { kind: space, class_angles: None, genus }
            }
            SpaceChoice::Conjugacy => {
                if genus.is_some() {
                    return Err(CliError::Config(
                        "--genus is only meaningful for --space double".into(),
                    ));
                }
                if class_angles.len() != rank {
                    return Err(CliError::Config(format!(
                        "--space conjugacy needs {rank} class angle(s), got {}",
                        class_angles.len()
                    )));
                }
                if class_angles.iter().any(|a| !a.is_finite()) {
                    return Err(CliError::Config("class angles must be finite".into()));
                }
                SpaceSetup { kind: space, class_angles: Some(class_angles), genus: None }
            }
        };
        if let Some(t) = tolerance {
            if !(t > 0.0) || !t.is_finite() {
                return Err(CliError::Config(format!(
                    "tolerance override must be a positive finite number, got {t}"
                )));
            }
        }
        Ok(RunConfig {
            group,
            metric_scale,
            space: setup,
            nodes,
            degree_cap,
            format,
            seed,
            tolerances: tolerance.map_or_else(Tolerances::defaults, Tolerances::override_all),
        })
    }

    pub fn group_spec(&self) -> Result<GroupSpec, CliError> {
        let name = match self.group {
            GroupChoice::Su2 => GroupName::Su2,
            GroupChoice::Su3 => GroupName::Su3,
        };
        GroupSpec::new(name, self.metric_scale).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Assemble the configured broken-geodesic space; any rejection by the
    /// model constructors is a configuration error.
    pub fn build_space(&self) -> Result<PathSpace, CliError> {
        let spec = self.group_spec()?;
        let model = match self.space.kind {
            SpaceChoice::Point => QHSpaceModel::point(spec),
            SpaceChoice::Conjugacy => {
                let angles = self.space.class_angles.as_deref().expect("validated");
                let eta = spec
                    .cartan_from_angles(angles)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                QHSpaceModel::conjugacy(spec, &eta).map_err(|e| CliError::Config(e.to_string()))?
            }
            SpaceChoice::Double => {
                let genus = self.space.genus.expect("validated");
                QHSpaceModel::double(spec, genus).map_err(|e| CliError::Config(e.to_string()))?
            }
        };
        PathSpace::new(model, self.nodes).map_err(|e| CliError::Config(e.to_string()))
    }
}

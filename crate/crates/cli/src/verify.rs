//! `verify`: exercise the library's property suites on the configured space
//! and report one residual row per suite. Checks that have nothing to test
//! under the configuration (the structure lemmas on the point space, the
//! critical rows of an empty enumeration) are marked vacuous, and tightening
//! `--tolerance` turns honest numerical residuals into reported failures.

use loopmorse_core::jacobi::CurvatureSpectrum;
use loopmorse_core::lie::AlgebraElement;
use loopmorse_core::morse::enumerate_critical;
use loopmorse_core::pathspace::{BrokenConfig, ConfigTangent, PathSpace};
use loopmorse_core::qham::{QHSpaceModel, SpaceKind, SpacePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{run_err, CliError, RunConfig};
use crate::report::{CheckRow, ComponentReport, Phase, RunReport};

const GRADIENT_TRIALS: usize = 20;
const HESSIAN_PAIRS: usize = 5;
const LEMMA_SITES: usize = 5;
const RATIO_TRIALS: usize = 20;
const ROUNDTRIP_TRIALS: usize = 10;
const SHORTEN_PATHS: usize = 3;

pub fn run(config: RunConfig) -> Result<RunReport, CliError> {
    let space = config.build_space()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut timings = Vec::new();
    let t = config.tolerances.clone();
    let mut checks = Vec::new();

    {
        let _p = Phase::start(&mut timings, "gradient");
        let mut worst = 0.0f64;
        for _ in 0..GRADIENT_TRIALS {
            let cfg = space.random_config(&mut rng, 0.3).map_err(run_err)?;
            let eta = space.random_tangent(&cfg, &mut rng, 0.7);
            let exact = space
                .tangent_inner(&space.gradient(&cfg).map_err(run_err)?, &eta);
            let fd = fd_energy_slope(&space, &cfg, &eta)?;
            worst = worst.max(relative_gap(exact, fd));
        }
        checks.push(CheckRow::threshold(
            "energy gradient vs finite difference",
            worst,
            t.gradient_fd,
        ));
    }

    let comps = {
        let _p = Phase::start(&mut timings, "enumeration");
        enumerate_critical(&space).map_err(run_err)?
    };
    let mut components = Vec::new();
    if comps.is_empty() {
        checks.push(CheckRow::vacuous(
            "gradient norm at critical configurations",
            t.critical_gradient,
        ));
        checks.push(CheckRow::vacuous("energy Hessian vs finite difference", t.hessian_fd));
    } else {
        let _p = Phase::start(&mut timings, "critical rows");
        let mut worst = 0.0f64;
        for comp in &comps {
            worst = worst.max(space.criticality(&comp.config).map_err(run_err)?.gradient_norm);
            let spectrum = space.hessian_matrix(&comp.config).map_err(run_err)?;
            components.push(ComponentReport::bare(&space, comp, spectrum.negative));
        }
        checks.push(CheckRow::threshold(
            "gradient norm at critical configurations",
            worst,
            t.critical_gradient,
        ));

        let mut worst_h = 0.0f64;
        for comp in &comps {
            for _ in 0..HESSIAN_PAIRS {
                let eta = space.random_tangent(&comp.config, &mut rng, 0.5);
                let etap = space.random_tangent(&comp.config, &mut rng, 0.5);
                let exact = space.hessian(&comp.config, &eta, &etap).map_err(run_err)?;
                let fd = fd_hessian(&space, &comp.config, &eta, &etap)?;
                worst_h = worst_h.max(relative_gap(exact, fd));
            }
        }
        checks.push(CheckRow::threshold(
            "energy Hessian vs finite difference",
            worst_h,
            t.hessian_fd,
        ));
    }

    {
        let _p = Phase::start(&mut timings, "structure lemmas");
        lemma_rows(&space, &config, &mut rng, &mut checks)?;
    }

    {
        let _p = Phase::start(&mut timings, "Jacobi fields");
        jacobi_rows(&space, &t, &mut rng, &mut checks)?;
    }

    {
        let _p = Phase::start(&mut timings, "paths");
        path_rows(&space, &t, &mut rng, &mut checks)?;
    }

    let passed = checks.iter().all(CheckRow::ok);
    Ok(RunReport {
        command: "verify".into(),
        injectivity_radius: space.model().group().injectivity_radius(),
        sublevel_bound: space.sublevel_bound(),
        config,
        components,
        series: None,
        perfection: None,
        checks,
        passed,
        timings,
    })
}

/// |a − b| relative to their size, floored at 1 so residuals near zero stay
/// absolute.
fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Move every free coordinate of the configuration along η for time s,
/// keeping the last node slaved to the moment-map value.
fn vary(
    space: &PathSpace,
    cfg: &BrokenConfig,
    eta: &ConfigTangent,
    s: f64,
) -> Result<BrokenConfig, CliError> {
    let spec = space.model().group();
    let n = space.node_count();
    let base = space.model().retract(&cfg.base, &eta.base_dir, s);
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n - 1 {
        nodes.push(cfg.nodes[i].mul(&spec.exp(&(&eta.node_dirs[i] * s))));
    }
    nodes.push(space.model().moment(&base));
    space.config(nodes, base).map_err(run_err)
}

/// Central difference of the energy along the η-variation.
fn fd_energy_slope(
    space: &PathSpace,
    cfg: &BrokenConfig,
    eta: &ConfigTangent,
) -> Result<f64, CliError> {
    let h = 1e-5;
    let fp = space.energy(&vary(space, cfg, eta, h)?).map_err(run_err)?;
    let fm = space.energy(&vary(space, cfg, eta, -h)?).map_err(run_err)?;
    Ok((fp - fm) / (2.0 * h))
}

/// Second central difference of the energy along η, with one Richardson step.
fn fd_energy_curvature(
    space: &PathSpace,
    cfg: &BrokenConfig,
    eta: &ConfigTangent,
) -> Result<f64, CliError> {
    let f0 = space.energy(cfg).map_err(run_err)?;
    let q = |h: f64| -> Result<f64, CliError> {
        let fp = space.energy(&vary(space, cfg, eta, h)?).map_err(run_err)?;
        let fm = space.energy(&vary(space, cfg, eta, -h)?).map_err(run_err)?;
        Ok((fp - 2.0 * f0 + fm) / (h * h))
    };
    let h = 2e-3;
    Ok((4.0 * q(h / 2.0)? - q(h)?) / 3.0)
}

/// Polarized second difference: Hf(η, η′) = ¼·(Q(η+η′) − Q(η−η′)).
fn fd_hessian(
    space: &PathSpace,
    cfg: &BrokenConfig,
    eta: &ConfigTangent,
    etap: &ConfigTangent,
) -> Result<f64, CliError> {
    let plus = space.tangent_add(eta, etap);
    let minus = space.tangent_add(eta, &space.tangent_scale(etap, -1.0));
    Ok(0.25
        * (fd_energy_curvature(space, cfg, &plus)? - fd_energy_curvature(space, cfg, &minus)?))
}

/// A site (m, ξ) satisfying the lemma preconditions exp(ξ) = Φ(m) with m
/// fixed by the ξ-flow, in generic position via a random conjugation. The
/// point space carries no such data.
fn lemma_site(
    model: &QHSpaceModel,
    config: &RunConfig,
    rng: &mut ChaCha8Rng,
) -> Option<(SpacePoint, AlgebraElement)> {
    let spec = model.group();
    let g = spec.random_group(rng, 0.8);
    match model.kind() {
        SpaceKind::Point => None,
        SpaceKind::Conjugacy => {
            let angles = config.space.class_angles.as_deref().expect("validated");
            let eta = spec.cartan_from_angles(angles).expect("validated");
            Some((model.act(&g, &model.base_point()), spec.adjoint(&g, &eta)))
        }
        SpaceKind::Double => {
            let genus = config.space.genus.expect("validated");
            let factors: Vec<_> = (0..2 * genus)
                .map(|_| {
                    let angles: Vec<f64> =
                        (0..spec.rank()).map(|_| rng.random_range(0.3..1.4)).collect();
                    spec.exp(&spec.cartan_from_angles(&angles).expect("rank-many angles"))
                })
                .collect();
            let xi = spec.torus().lattice_basis()[0].clone();
            Some((model.act(&g, &SpacePoint::Double(factors)), spec.adjoint(&g, &xi)))
        }
    }
}

/// The four moment-map structure lemmas, sampled over random sites.
fn lemma_rows(
    space: &PathSpace,
    config: &RunConfig,
    rng: &mut ChaCha8Rng,
    checks: &mut Vec<CheckRow>,
) -> Result<(), CliError> {
    let model = space.model();
    let spec = model.group();
    let tol = config.tolerances.lemma_residual;
    let names = [
        "moment-map first-order image",
        "commuting-direction nullity",
        "nondegenerate-kernel containment",
        "conjugation invariance identity",
    ];
    if model.kind() == SpaceKind::Point {
        for name in names {
            checks.push(CheckRow::vacuous(name, tol));
        }
        return Ok(());
    }

    let mut residuals = [0.0f64; 4];
    let mut structural_ok = true;
    for _ in 0..LEMMA_SITES {
        let (m, xi) = lemma_site(model, config, rng).expect("non-point space has lemma sites");

        let image = model.verify_first_order_image(&m);
        structural_ok &= image.pass;
        residuals[0] = residuals[0].max(image.max_principal_angle);

        let nullity = model.verify_commuting_nullity(&m, &xi, 3, rng).map_err(run_err)?;
        residuals[1] = residuals[1].max(nullity);

        let nondeg = model.verify_nondeg(&m, &xi).map_err(run_err)?;
        structural_ok &= nondeg.pass;
        residuals[2] = residuals[2].max(nondeg.containment_angle);

        for _ in 0..3 {
            let gamma = spec.random_algebra(rng, 0.8);
            let yp = model.random_tangent(&m, rng, 0.7);
            let inv = model.invariance_residual(&m, &xi, &gamma, &yp).map_err(run_err)?;
            residuals[3] = residuals[3].max(inv);
        }
    }
    for (name, residual) in names.into_iter().zip(residuals) {
        let mut row = CheckRow::threshold(name, residual, tol);
        if !structural_ok {
            row.status = crate::report::CheckStatus::Fail;
        }
        checks.push(row);
    }
    Ok(())
}

/// Commuting endpoint ratios and broken-field continuity for the
/// configured group.
fn jacobi_rows(
    space: &PathSpace,
    t: &crate::config::Tolerances,
    rng: &mut ChaCha8Rng,
    checks: &mut Vec<CheckRow>,
) -> Result<(), CliError> {
    let spec = space.model().group();

    let mut worst_ratio = 0.0f64;
    for _ in 0..RATIO_TRIALS {
        let xi = spec.random_algebra(rng, 1.1);
        let b = &xi * rng.random_range(0.2..1.5);
        let spectrum = CurvatureSpectrum::compute(spec, &xi).map_err(run_err)?;
        let field = spectrum.initial_value_field(spec, 0.0, &spec.zero_algebra(), &b);
        let ratio = field.commuting_endpoint_ratio(spec).map_err(run_err)?;
        worst_ratio = worst_ratio.max((ratio - 1.0).abs());
    }
    checks.push(CheckRow::threshold(
        "commuting Jacobi endpoint ratio",
        worst_ratio,
        t.jacobi_ratio,
    ));

    let mut worst_jump = 0.0f64;
    for _ in 0..3 {
        let xi = spec.random_algebra(rng, 1.2);
        let spectrum = CurvatureSpectrum::compute(spec, &xi).map_err(run_err)?;
        let derivative = spec.random_algebra(rng, 1.0);
        let smooth = spectrum.initial_value_field(spec, 0.0, &spec.zero_algebra(), &derivative);
        let n = 6;
        let nodes: Vec<_> = (1..=n).map(|i| smooth.value(spec, i as f64 / n as f64)).collect();
        let broken = spectrum.broken_field(spec, &nodes).map_err(run_err)?;
        worst_jump = worst_jump.max(broken.continuity_residual(spec));
    }
    checks.push(CheckRow::threshold("broken Jacobi continuity", worst_jump, t.jacobi_continuity));
    Ok(())
}

/// Sampling round trip, energy identity, and shortening monotonicity.
fn path_rows(
    space: &PathSpace,
    t: &crate::config::Tolerances,
    rng: &mut ChaCha8Rng,
    checks: &mut Vec<CheckRow>,
) -> Result<(), CliError> {
    let spec = space.model().group();

    let mut worst_round = 0.0f64;
    let mut worst_energy = 0.0f64;
    for _ in 0..ROUNDTRIP_TRIALS {
        let cfg = space.random_config(rng, 0.25).map_err(run_err)?;
        let path = space.beta(&cfg).map_err(run_err)?;
        let round = space.alpha(&path).map_err(run_err)?;
        worst_round = worst_round.max(config_distance(&cfg, &round));
        let f = space.energy(&cfg).map_err(run_err)?;
        let fp = space.path_energy(&path).map_err(run_err)?;
        worst_energy = worst_energy.max((f - fp).abs() / f.abs().max(1.0));
    }
    checks.push(CheckRow::threshold("sampling round trip α∘β", worst_round, t.roundtrip));
    checks.push(CheckRow::threshold(
        "sampled-path energy identity",
        worst_energy,
        t.energy_identity,
    ));

    let mut worst_rise = 0.0f64;
    for _ in 0..SHORTEN_PATHS {
        let cfg = space.random_config(rng, 0.25).map_err(run_err)?;
        let mut path = space.beta(&cfg).map_err(run_err)?;
        // Bend smoothly inside each segment (the profile vanishes at node
        // times), then confirm every shortening step is non-increasing.
        let profile = spec.random_algebra(rng, 0.2);
        let waves = 2.0 * space.node_count() as f64;
        for (time, value) in path.times.clone().iter().zip(path.values.iter_mut()) {
            let amp = 0.25 * (waves * std::f64::consts::PI * time).sin();
            *value = value.mul(&spec.exp(&(&profile * amp)));
        }
        let mut previous = space.path_energy(&path).map_err(run_err)?;
        for eps in [0.7, 1.0] {
            for segment in 0..space.node_count() {
                path = space.shorten_step(&path, segment, eps).map_err(run_err)?;
                let f = space.path_energy(&path).map_err(run_err)?;
                worst_rise = worst_rise.max(f - previous);
                previous = f;
            }
        }
    }
    checks.push(CheckRow::threshold(
        "shortening monotonicity",
        worst_rise.max(0.0),
        t.shortening,
    ));
    Ok(())
}

/// Worst Frobenius distance between two configurations (nodes and base).
fn config_distance(a: &BrokenConfig, b: &BrokenConfig) -> f64 {
    let mut worst = 0.0f64;
    for (x, y) in a.nodes.iter().zip(b.nodes.iter()) {
        worst = worst.max(x.frobenius_distance(y));
    }
    worst.max(match (&a.base, &b.base) {
        (SpacePoint::Point, SpacePoint::Point) => 0.0,
        (SpacePoint::Conjugacy(p), SpacePoint::Conjugacy(q)) => p.frobenius_distance(q),
        (SpacePoint::Double(xs), SpacePoint::Double(ys)) => xs
            .iter()
            .zip(ys.iter())
            .map(|(x, y)| x.frobenius_distance(y))
            .fold(0.0, f64::max),
        _ => f64::INFINITY,
    })
}

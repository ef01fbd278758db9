//! Configuration-space checks. Independent oracles: (a) closed-form energies
//! of one-parameter lattice chains, (b) central finite differences of the
//! energy along retraction curves for the gradient and (polarized) for the
//! Hessian, (c) exactness of the sampling/interpolation round trip, and
//! (d) conjugation invariance tying gradient and Hessian to the group action.

use loopmorse_core::lie::{AlgebraElement, GroupSpec};
use loopmorse_core::pathspace::{BrokenConfig, ConfigTangent, PathSpace, SampledPath};
use loopmorse_core::qham::{QHSpaceModel, SpacePoint};
use loopmorse_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol,
        "{what}: {a} vs {b} (diff {:.3e}, tol {tol:.1e})",
        (a - b).abs()
    );
}

fn point_space(n: usize) -> PathSpace {
    PathSpace::new(QHSpaceModel::point(GroupSpec::su2()), n).unwrap()
}

fn class_space(theta: f64, n: usize) -> PathSpace {
    let spec = GroupSpec::su2();
    let eta = spec.cartan_from_angles(&[theta]).unwrap();
    PathSpace::new(QHSpaceModel::conjugacy(spec, &eta).unwrap(), n).unwrap()
}

fn double_space(n: usize) -> PathSpace {
    PathSpace::new(QHSpaceModel::double(GroupSpec::su2(), 1).unwrap(), n).unwrap()
}

/// Torus direction with angle 2πk: the lattice velocities of the point space.
fn winding_xi(spec: &GroupSpec, k: i32) -> AlgebraElement {
    spec.cartan_from_angles(&[2.0 * PI * k as f64]).unwrap()
}

fn lattice_point_config(space: &PathSpace, k: i32) -> BrokenConfig {
    let xi = winding_xi(space.model().group(), k);
    space.lattice_config(&xi, SpacePoint::Point).unwrap()
}

/// A critical chain on the conjugacy class: the geodesic of the defining
/// torus direction η, closing at the class representative exp(η).
fn lattice_class_config(space: &PathSpace, theta: f64) -> BrokenConfig {
    let spec = space.model().group();
    let eta = spec.cartan_from_angles(&[theta]).unwrap();
    space.lattice_config(&eta, space.model().base_point()).unwrap()
}

/// A critical chain on the double: commuting torus factors (moment value e)
/// with a full lattice winding as velocity.
fn lattice_double_config(space: &PathSpace, k: i32, angles: (f64, f64)) -> BrokenConfig {
    let spec = space.model().group();
    let a = spec.exp(&spec.cartan_from_angles(&[angles.0]).unwrap());
    let b = spec.exp(&spec.cartan_from_angles(&[angles.1]).unwrap());
    let m = SpacePoint::Double(vec![a, b]);
    space.lattice_config(&winding_xi(spec, k), m).unwrap()
}

/// Move every free coordinate of the configuration along η for time s,
/// keeping the last node slaved to the moment-map value.
fn vary(space: &PathSpace, cfg: &BrokenConfig, eta: &ConfigTangent, s: f64) -> BrokenConfig {
    let spec = space.model().group();
    let n = space.node_count();
    let base = space.model().retract(&cfg.base, &eta.base_dir, s);
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n - 1 {
        nodes.push(cfg.nodes[i].mul(&spec.exp(&(&eta.node_dirs[i] * s))));
    }
    nodes.push(space.model().moment(&base));
    space.config(nodes, base).unwrap()
}

/// Central difference of the energy along the η-variation.
fn fd_energy_slope(space: &PathSpace, cfg: &BrokenConfig, eta: &ConfigTangent) -> f64 {
    let h = 1e-5;
    let fp = space.energy(&vary(space, cfg, eta, h)).unwrap();
    let fm = space.energy(&vary(space, cfg, eta, -h)).unwrap();
    (fp - fm) / (2.0 * h)
}

/// Second central difference of the energy along η, with one Richardson step.
fn fd_energy_curvature(space: &PathSpace, cfg: &BrokenConfig, eta: &ConfigTangent) -> f64 {
    let f0 = space.energy(cfg).unwrap();
    let q = |h: f64| -> f64 {
        let fp = space.energy(&vary(space, cfg, eta, h)).unwrap();
        let fm = space.energy(&vary(space, cfg, eta, -h)).unwrap();
        (fp - 2.0 * f0 + fm) / (h * h)
    };
    let h = 2e-3;
    (4.0 * q(h / 2.0) - q(h)) / 3.0
}

/// Polarized second difference: Hf(η, η′) = ¼·(Q(η+η′) − Q(η−η′)).
fn fd_hessian(
    space: &PathSpace,
    cfg: &BrokenConfig,
    eta: &ConfigTangent,
    etap: &ConfigTangent,
) -> f64 {
    let plus = space.tangent_add(eta, etap);
    let minus = space.tangent_add(eta, &space.tangent_scale(etap, -1.0));
    0.25 * (fd_energy_curvature(space, cfg, &plus) - fd_energy_curvature(space, cfg, &minus))
}

fn config_matrices_equal(a: &BrokenConfig, b: &BrokenConfig) -> bool {
    if a.nodes.len() != b.nodes.len() {
        return false;
    }
    for (x, y) in a.nodes.iter().zip(b.nodes.iter()) {
        if x.matrix() != y.matrix() {
            return false;
        }
    }
    match (&a.base, &b.base) {
        (SpacePoint::Point, SpacePoint::Point) => true,
        (SpacePoint::Conjugacy(p), SpacePoint::Conjugacy(q)) => p.matrix() == q.matrix(),
        (SpacePoint::Double(xs), SpacePoint::Double(ys)) => {
            xs.len() == ys.len()
                && xs.iter().zip(ys.iter()).all(|(x, y)| x.matrix() == y.matrix())
        }
        _ => false,
    }
}

fn random_spaces(n: usize) -> Vec<PathSpace> {
    vec![point_space(n), class_space(0.7, n), double_space(n)]
}

#[test]
fn energy_vanishes_on_constant_identity_config() {
    let space = point_space(6);
    let id = space.model().group().identity();
    let cfg = space.config(vec![id; 6], SpacePoint::Point).unwrap();
    assert!(space.energy(&cfg).unwrap().abs() < 1e-15);
    assert!(space.in_sublevel(&cfg));
}

#[test]
fn lattice_energy_matches_closed_form() {
    // f_n of the k-winding chain is |ξ|² = 8π²k², independent of n.
    for (k, n) in [(1, 12), (1, 9), (2, 40)] {
        let space = point_space(n);
        let cfg = lattice_point_config(&space, k);
        let expected = 8.0 * PI * PI * (k * k) as f64;
        let f = space.energy(&cfg).unwrap();
        assert_close(f, expected, 1e-9 * expected, &format!("energy k={k} n={n}"));
    }
}

#[test]
fn energy_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for space in random_spaces(5) {
        let cfg = space.random_config(&mut rng, 0.2).unwrap();
        let f = space.energy(&cfg).unwrap();
        for _ in 0..3 {
            let g = space.model().group().random_group(&mut rng, 0.9);
            let fg = space.energy(&space.act(&g, &cfg)).unwrap();
            assert_close(fg, f, 1e-10 * (1.0 + f), "conjugated energy");
        }
    }
}

#[test]
fn sublevel_test_matches_the_strict_bound() {
    // ½·n·ρ̄² with ρ̄ = π√2, against f = 8π²k²: membership iff k² < n/8.
    let zero = point_space(4);
    let id = zero.model().group().identity();
    assert!(zero.in_sublevel(&zero.config(vec![id; 4], SpacePoint::Point).unwrap()));

    for (k, n, expect) in [(1, 4, false), (1, 8, false), (1, 9, true), (1, 16, true), (2, 40, true), (2, 32, false)] {
        let space = point_space(n);
        let cfg = lattice_point_config(&space, k);
        assert_eq!(
            space.in_sublevel(&cfg),
            expect,
            "membership for k={k} n={n} (f = {:.6}, bound = {:.6})",
            space.energy(&cfg).unwrap(),
            space.sublevel_bound()
        );
    }

    // n = 8, k = 1 sits exactly on the boundary: 8π² = ½·8·(π√2)².
    let space = point_space(8);
    let cfg = lattice_point_config(&space, 1);
    let f = space.energy(&cfg).unwrap();
    assert_close(f, space.sublevel_bound(), 1e-9, "boundary energy");
}

#[test]
fn interpolant_samples_the_segment_geodesics() {
    let space = point_space(12);
    let spec = space.model().group();
    let cfg = lattice_point_config(&space, 1);
    let xi = winding_xi(spec, 1);
    let path = space.beta(&cfg).unwrap();
    assert_eq!(path.times.len(), 12 * 64 + 1);
    for (t, v) in path.times.iter().zip(path.values.iter()) {
        let expected = spec.exp(&(&xi * *t));
        assert!(
            v.frobenius_distance(&expected) < 1e-11,
            "sample at t={t} is off the one-parameter geodesic"
        );
    }
    // Node samples are the stored node matrices, bit for bit.
    for i in 1..=12usize {
        let j = i * 64;
        assert_eq!(path.values[j].matrix(), cfg.nodes[i - 1].matrix());
    }

    let id = spec.identity();
    let constant = space.config(vec![id.clone(); 12], SpacePoint::Point).unwrap();
    let flat = space.beta_with_grid(&constant, 7).unwrap();
    for v in &flat.values {
        assert!(v.frobenius_distance(&id) < 1e-14);
    }
}

#[test]
fn sampling_inverts_the_interpolant_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for space in random_spaces(6) {
        for _ in 0..4 {
            let cfg = space.random_config(&mut rng, 0.25).unwrap();
            let round = space.alpha(&space.beta(&cfg).unwrap()).unwrap();
            assert!(
                config_matrices_equal(&cfg, &round),
                "sampling after interpolation must reproduce the configuration exactly"
            );
            let coarse = space.alpha(&space.beta_with_grid(&cfg, 3).unwrap()).unwrap();
            assert!(config_matrices_equal(&cfg, &coarse));
        }
    }
}

#[test]
fn interpolant_energy_equals_config_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for space in random_spaces(5) {
        for _ in 0..3 {
            let cfg = space.random_config(&mut rng, 0.2).unwrap();
            let f = space.energy(&cfg).unwrap();
            for grid in [64usize, 7] {
                let path = space.beta_with_grid(&cfg, grid).unwrap();
                let fp = space.path_energy(&path).unwrap();
                assert_close(fp, f, 1e-10 * (1.0 + f), &format!("chord energy, grid {grid}"));
            }
        }
    }
}

#[test]
fn shortening_is_monotone_and_fixes_interpolants() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let space = double_space(4);
    let spec = GroupSpec::su2();
    let cfg = space.random_config(&mut rng, 0.3).unwrap();
    let path = space.beta(&cfg).unwrap();

    // Interpolants are fixed points, for any w index and fraction.
    for (seg, eps) in [(0usize, 1.0), (1, 0.4), (3, 0.8)] {
        let after = space.shorten_step(&path, seg, eps).unwrap();
        for (v, w) in path.values.iter().zip(after.values.iter()) {
            assert!(v.frobenius_distance(w) < 1e-12, "interpolant moved under shortening");
        }
    }

    // Bend the path smoothly inside each segment (the profile vanishes at
    // the node times, so the sampled configuration is unchanged): each
    // segment leaves its minimal geodesic and the energy goes up; every
    // shortening step brings it down again, and a full sweep with eps = 1
    // restores the interpolant.
    let mut bent = path.clone();
    let profile = spec.random_algebra(&mut rng, 0.25);
    let waves = 2.0 * space.node_count() as f64;
    for (t, v) in bent.times.iter().zip(bent.values.iter_mut()) {
        let amp = 0.3 * (waves * PI * t).sin();
        *v = v.mul(&spec.exp(&(&profile * amp)));
    }
    let f_bent = space.path_energy(&bent).unwrap();
    assert!(f_bent > space.path_energy(&path).unwrap());

    let mut current = bent.clone();
    let mut f_prev = f_bent;
    for sweep in 0..3 {
        let eps = [0.5, 0.9, 1.0][sweep];
        for seg in 0..space.node_count() {
            current = space.shorten_step(&current, seg, eps).unwrap();
            let f = space.path_energy(&current).unwrap();
            assert!(f <= f_prev + 1e-10, "shortening increased the energy: {f_prev} -> {f}");
            f_prev = f;
        }
    }
    let target = space.beta(&space.alpha(&bent).unwrap()).unwrap();
    for (v, w) in current.values.iter().zip(target.values.iter()) {
        assert!(
            v.frobenius_distance(w) < 1e-9,
            "full sweeps must converge to the interpolant of the sampled configuration"
        );
    }
    assert_close(
        space.path_energy(&current).unwrap(),
        space.energy(&space.alpha(&bent).unwrap()).unwrap(),
        1e-9,
        "limit energy",
    );
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for space in random_spaces(6) {
        for _ in 0..3 {
            let cfg = space.random_config(&mut rng, 0.2).unwrap();
            let grad = space.gradient(&cfg).unwrap();
            for _ in 0..3 {
                let eta = space.random_tangent(&cfg, &mut rng, 1.0);
                let fd = fd_energy_slope(&space, &cfg, &eta);
                let exact = space.tangent_inner(&grad, &eta);
                let scale = fd.abs().max(exact.abs()).max(1.0);
                assert_close(exact, fd, 1e-6 * scale, "first variation");
            }
        }
    }
}

#[test]
fn gradient_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for space in random_spaces(5) {
        let cfg = space.random_config(&mut rng, 0.2).unwrap();
        let grad = space.gradient(&cfg).unwrap();
        let g = space.model().group().random_group(&mut rng, 0.8);
        let pushed = space.act_tangent(&g, &grad);
        let direct = space.gradient(&space.act(&g, &cfg)).unwrap();
        let diff = space.tangent_add(&direct, &space.tangent_scale(&pushed, -1.0));
        let norm = space.tangent_norm(&grad);
        assert!(
            space.tangent_norm(&diff) <= 1e-9 * (1.0 + norm),
            "gradient is not equivariant (residual {:.3e})",
            space.tangent_norm(&diff)
        );
    }
}

#[test]
fn gradient_vanishes_at_critical_chains() {
    let space = point_space(10);
    let report = space.criticality(&lattice_point_config(&space, 1)).unwrap();
    assert!(report.gradient_norm < 1e-10, "gradient norm {:.3e}", report.gradient_norm);
    assert!(report.is_critical);
    assert!(report.geodesic_residual < 1e-8);
    assert!(report.terminal_alignment < 1e-8);

    let class = class_space(0.7, 6);
    let report = class.criticality(&lattice_class_config(&class, 0.7)).unwrap();
    assert!(report.gradient_norm < 1e-10, "class gradient norm {:.3e}", report.gradient_norm);
    assert!(report.is_critical);

    let double = double_space(16);
    let report = double.criticality(&lattice_double_config(&double, 1, (0.5, 1.1))).unwrap();
    assert!(report.gradient_norm < 1e-10, "double gradient norm {:.3e}", report.gradient_norm);
    assert!(report.is_critical);
}

#[test]
fn criticality_characterizes_the_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    // Critical chains: both residuals vanish. Random chains: the gradient is
    // macroscopic and at least one residual is, too.
    let space = class_space(0.7, 6);
    let crit = space.criticality(&lattice_class_config(&space, 0.7)).unwrap();
    assert!(crit.geodesic_residual < 1e-8 && crit.terminal_alignment < 1e-8);
    assert!(crit.is_critical);

    for _ in 0..5 {
        let cfg = space.random_config(&mut rng, 0.2).unwrap();
        let report = space.criticality(&cfg).unwrap();
        assert!(!report.is_critical, "random chain reported critical");
        assert!(
            report.geodesic_residual > 1e-6 || report.terminal_alignment > 1e-6,
            "non-critical chain with both residuals small"
        );
    }
}

#[test]
fn hessian_matches_second_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    let cases: Vec<(PathSpace, BrokenConfig)> = vec![
        {
            let s = point_space(16);
            let c = lattice_point_config(&s, 1);
            (s, c)
        },
        {
            let s = point_space(6);
            let c = lattice_point_config(&s, 0);
            (s, c)
        },
        {
            let s = class_space(0.7, 6);
            let c = lattice_class_config(&s, 0.7);
            (s, c)
        },
        {
            let s = double_space(16);
            let c = lattice_double_config(&s, 1, (0.5, 1.1));
            (s, c)
        },
    ];
    for (space, cfg) in &cases {
        for _ in 0..4 {
            let eta = space.random_tangent(cfg, &mut rng, 1.0);
            let etap = space.random_tangent(cfg, &mut rng, 1.0);
            let exact = space.hessian(cfg, &eta, &etap).unwrap();
            let fd = fd_hessian(space, cfg, &eta, &etap);
            let scale = fd.abs().max(exact.abs()).max(1.0);
            assert_close(exact, fd, 1e-4 * scale, "Hessian vs second difference");
        }
    }
}

#[test]
fn orbit_directions_are_hessian_null() {
    let mut rng = ChaCha8Rng::seed_from_u64(39);
    // Point space: the moment block is identically zero and the orbit field
    // is an unbroken Jacobi field, so the pairing vanishes to roundoff.
    let space = point_space(16);
    let cfg = lattice_point_config(&space, 1);
    for _ in 0..3 {
        let gamma = space.model().group().random_algebra(&mut rng, 1.0);
        let orbit = space.orbit_direction(&cfg, &gamma);
        let probe = space.random_tangent(&cfg, &mut rng, 1.0);
        let h = space.hessian(&cfg, &orbit, &probe).unwrap();
        assert!(h.abs() < 1e-9, "orbit pairing {h:.3e} on the point space");
    }

    // Coupled spaces: the moment-map Hessian block enters through finite
    // differences; the cancellation holds to its accuracy.
    for (space, cfg) in [
        {
            let s = class_space(0.7, 6);
            let c = lattice_class_config(&s, 0.7);
            (s, c)
        },
        {
            let s = double_space(16);
            let c = lattice_double_config(&s, 1, (0.5, 1.1));
            (s, c)
        },
    ] {
        for _ in 0..3 {
            let gamma = space.model().group().random_algebra(&mut rng, 1.0);
            let orbit = space.orbit_direction(&cfg, &gamma);
            let probe = space.random_tangent(&cfg, &mut rng, 1.0);
            let h = space.hessian(&cfg, &orbit, &probe).unwrap();
            assert!(h.abs() < 1e-6, "orbit pairing {h:.3e} on a coupled space");
        }
    }
}

#[test]
fn hessian_spectrum_at_low_critical_chains() {
    // k = 0: the global minimum; the Hessian is positive definite (the
    // conjugation orbit of the constant chain is a single point).
    let space = point_space(16);
    let flat = space.config(
        vec![space.model().group().identity(); 16],
        SpacePoint::Point,
    )
    .unwrap();
    let spec0 = space.hessian_matrix(&flat).unwrap();
    assert_eq!(spec0.matrix.nrows(), space.dim());
    assert_eq!((spec0.negative, spec0.null), (0, 0));
    assert_eq!(spec0.positive, space.dim());

    // k = 1: two conjugate points of the first winding inside (0,1) give
    // index 2; the null directions are the conjugation orbit of the chain.
    let cfg = lattice_point_config(&space, 1);
    let spec1 = space.hessian_matrix(&cfg).unwrap();
    assert!(spec1.symmetry_residual < 1e-9, "symmetry residual {:.3e}", spec1.symmetry_residual);
    assert_eq!(spec1.negative, 2, "eigenvalues: {:?}", &spec1.eigenvalues[..6]);
    assert_eq!(spec1.null, 2, "eigenvalues: {:?}", &spec1.eigenvalues[..6]);
    assert_eq!(spec1.positive, space.dim() - 4);
}

#[test]
fn hessian_rejects_noncritical_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let space = point_space(8);
    let cfg = space.random_config(&mut rng, 0.2).unwrap();
    let eta = space.random_tangent(&cfg, &mut rng, 1.0);
    match space.hessian(&cfg, &eta, &eta) {
        Err(Error::Precondition(_)) => {}
        other => panic!("expected a precondition error, got {other:?}"),
    }
}

#[test]
fn tangent_basis_is_orthonormal_and_coordinates_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for space in random_spaces(4) {
        let cfg = space.random_config(&mut rng, 0.2).unwrap();
        let basis = space.tangent_basis(&cfg);
        assert_eq!(basis.len(), space.dim());
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g = space.tangent_inner(a, b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_close(g, expect, 1e-12, "basis Gram entry");
            }
        }
        let v = nalgebra::DVector::from_iterator(
            basis.len(),
            (0..basis.len()).map(|_| rng.random_range(-1.0..=1.0)),
        );
        let eta = space.tangent_from_coords(&cfg, &v);
        for (i, b) in basis.iter().enumerate() {
            assert_close(space.tangent_inner(&eta, b), v[i], 1e-12, "coordinate round trip");
        }
    }
}

#[test]
fn orbit_direction_satisfies_the_constraint() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for space in random_spaces(5) {
        let cfg = space.random_config(&mut rng, 0.2).unwrap();
        let gamma = space.model().group().random_algebra(&mut rng, 0.8);
        let eta = space.orbit_direction(&cfg, &gamma);
        let derived = space.model().moment_diff(&cfg.base, &eta.base_dir);
        let spec = space.model().group();
        let n = space.node_count();
        let diff = &eta.node_dirs[n - 1] - &derived;
        assert!(
            spec.norm(&diff) < 1e-10,
            "orbit direction violates the slaved-node constraint ({:.3e})",
            spec.norm(&diff)
        );
    }
}

#[test]
fn path_validation_rejects_bad_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let space = point_space(6);
    let spec = GroupSpec::su2();
    let cfg = space.random_config(&mut rng, 0.2).unwrap();
    let path = space.beta_with_grid(&cfg, 3).unwrap();

    // Sampling through a mismatched node count misses the node times.
    let other = point_space(7);
    match other.alpha(&path) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("node time"), "{msg}"),
        other => panic!("expected a precondition error, got {other:?}"),
    }

    // A path that does not start at the identity is rejected.
    let mut shifted = path.clone();
    shifted.values[0] = spec.exp(&spec.cartan_from_angles(&[0.3]).unwrap());
    assert!(matches!(space.alpha(&shifted), Err(Error::Precondition(_))));

    // A high-energy path is outside the sampling domain.
    let far = spec.exp(&spec.cartan_from_angles(&[0.9 * PI]).unwrap());
    let one = point_space(1);
    let loopy = SampledPath {
        times: vec![0.0, 0.5, 1.0],
        values: vec![spec.identity(), far.clone(), spec.identity()],
        base: SpacePoint::Point,
    };
    match one.alpha(&loopy) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("sublevel"), "{msg}"),
        other => panic!("expected a precondition error, got {other:?}"),
    }

    // Interpolation requires the sublevel bound as well.
    let two = point_space(2);
    let wide = two
        .config(vec![far.clone(), spec.identity()], SpacePoint::Point)
        .unwrap();
    assert!(!two.in_sublevel(&wide));
    assert!(matches!(two.beta(&wide), Err(Error::Precondition(_))));

    // Shortening validates the segment index and fraction.
    assert!(matches!(space.shorten_step(&path, 6, 0.5), Err(Error::Precondition(_))));
    assert!(matches!(space.shorten_step(&path, 0, 0.0), Err(Error::Precondition(_))));

    // The last node must carry the moment-map value.
    let bad = space.config(
        vec![spec.identity(); 5]
            .into_iter()
            .chain([far.clone()])
            .collect(),
        SpacePoint::Point,
    );
    assert!(matches!(bad, Err(Error::Precondition(_))));

    // A lattice velocity that misses the base point is rejected.
    let xi = spec.cartan_from_angles(&[0.3]).unwrap();
    assert!(matches!(
        space.lattice_config(&xi, SpacePoint::Point),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn cut_locus_segments_fall_outside_the_sublevel_domain() {
    // A node at −1 ∈ SU(2) sits on the cut locus of the identity: the
    // segment log is ambiguous, and the chain cannot lie below the bound.
    let space = point_space(2);
    let spec = GroupSpec::su2();
    let minus = spec.exp(&spec.cartan_from_angles(&[PI]).unwrap());
    let cfg = space.config(vec![minus, spec.identity()], SpacePoint::Point).unwrap();
    assert!(matches!(space.energy(&cfg), Err(Error::CutLocus { .. })));
    assert!(!space.in_sublevel(&cfg));
}

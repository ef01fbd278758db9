//! Curvature-spectrum and Jacobi-field checks. The independent oracles are
//! (a) the root-system prediction for torus velocities: eigenvalue ¼·α(ξ)²
//! per ordered root α plus rank-many zeros, and (b) finite-difference
//! covariant derivatives of left-trivialized values, which pin down both the
//! parallel-frame conversion and the sign conventions in the Jacobi equation.

use loopmorse_core::jacobi::CurvatureSpectrum;
use loopmorse_core::lie::{AlgebraElement, GroupSpec};
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

/// Covariant derivative of a left-trivialized field along t ↦ exp(tξ) via
/// central differences: DW/Dt = Ẇ + ½[ξ, W].
fn fd_covariant_derivative(
    spec: &GroupSpec,
    xi: &AlgebraElement,
    w: &dyn Fn(f64) -> AlgebraElement,
    t: f64,
    h: f64,
) -> AlgebraElement {
    let dot = &(&w(t + h) - &w(t - h)) * (1.0 / (2.0 * h));
    &dot + &(&spec.bracket(xi, &w(t)) * 0.5)
}

#[test]
fn su2_spectrum_frozen_values() {
    let spec = GroupSpec::su2();
    for &theta in &[0.7, 1.9, 2.0 * PI] {
        let xi = spec.cartan_from_angles(&[theta]).unwrap();
        let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
        let ev = sp.eigenvalues();
        assert_eq!(ev.len(), 3);
        assert_close(ev[0], 0.0, 1e-12, "flat eigenvalue");
        assert_close(ev[1], theta * theta, 1e-10 * (1.0 + theta * theta), "first curved");
        assert_close(ev[2], theta * theta, 1e-10 * (1.0 + theta * theta), "second curved");
        assert!(!sp.is_degenerate());
        assert_eq!(sp.flat_dim(), 1);
    }
}

#[test]
fn spectrum_matches_root_prediction_on_torus() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let spec = GroupSpec::su3();
    for _ in 0..5 {
        let a = rng.random_range(-2.0f64..2.0);
        let b = rng.random_range(-2.0f64..2.0);
        let xi = spec.cartan_from_angles(&[a, b]).unwrap();
        let angles = spec.diag_angles(&xi).unwrap();
        let mut predicted: Vec<f64> = vec![0.0; spec.rank()];
        for root in spec.torus().roots() {
            let v = root.value_on_angles(&angles);
            predicted.push(0.25 * v * v);
        }
        predicted.sort_by(|x, y| x.total_cmp(y));
        let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
        for (got, want) in sp.eigenvalues().iter().zip(predicted.iter()) {
            assert_close(*got, *want, 1e-10 * (1.0 + want), "eigenvalue");
        }
        // Conjugating the velocity must not move the spectrum.
        let g = spec.random_group(&mut rng, 0.8);
        let sp2 = CurvatureSpectrum::compute(&spec, &spec.adjoint(&g, &xi)).unwrap();
        for (x, y) in sp.eigenvalues().iter().zip(sp2.eigenvalues().iter()) {
            assert_close(*x, *y, 1e-9 * (1.0 + x.abs()), "Ad-invariance of spectrum");
        }
    }
}

#[test]
fn eigenvectors_satisfy_eigen_equation_and_trace_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for spec in [GroupSpec::su2(), GroupSpec::su3()] {
        for _ in 0..6 {
            let xi = spec.random_algebra(&mut rng, 1.3);
            let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
            for (u, &e) in sp.eigenbasis().iter().zip(sp.eigenvalues()) {
                assert!(e >= 0.0, "curvature must be nonnegative");
                assert_close(spec.norm(u), 1.0, 1e-10, "eigenvector norm");
                let ku = &spec.bracket(&spec.bracket(&xi, u), &xi) * 0.25;
                let resid = &ku - &(u * e);
                assert!(
                    spec.norm(&resid) < 1e-10 * (1.0 + e),
                    "K(U) = eU residual {:.3e}",
                    spec.norm(&resid)
                );
            }
            // Velocity direction is always flat.
            let kxi = &spec.bracket(&spec.bracket(&xi, &xi), &xi) * 0.25;
            assert!(spec.norm(&kxi) < 1e-14);
            // Trace identity: Σe_i = ¼·Σ_j |[ξ, B_j]|² over any orthonormal basis.
            let total: f64 = sp.eigenvalues().iter().sum();
            let trace: f64 = spec
                .basis()
                .iter()
                .map(|bj| {
                    let br = spec.bracket(&xi, bj);
                    0.25 * spec.inner(&br, &br)
                })
                .sum();
            assert_close(total, trace, 1e-9 * (1.0 + trace), "trace identity");
        }
    }
}

#[test]
fn zero_velocity_is_flagged_degenerate() {
    let spec = GroupSpec::su2();
    let sp = CurvatureSpectrum::compute(&spec, &spec.zero_algebra()).unwrap();
    assert!(sp.is_degenerate());
    assert!(sp.eigenvalues().iter().all(|&e| e.abs() < 1e-14));
    assert!(sp.conjugate_points(10.0).is_empty());
}

#[test]
fn initial_value_field_matches_data_and_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for spec in [GroupSpec::su2(), GroupSpec::su3()] {
        for _ in 0..4 {
            let xi = spec.random_algebra(&mut rng, 1.1);
            let w0 = spec.random_algebra(&mut rng, 1.0);
            let dw0 = spec.random_algebra(&mut rng, 1.0);
            let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
            let field = sp.initial_value_field(&spec, 0.0, &w0, &dw0);
            assert!(spec.norm(&(&field.value(&spec, 0.0) - &w0)) < 1e-12);
            assert!(spec.norm(&(&field.derivative(&spec, 0.0) - &dw0)) < 1e-12);

            let h = 1e-5;
            let value_fn = |t: f64| field.value(&spec, t);
            for &t in &[0.37, 0.81] {
                // The closed-form covariant derivative must agree with the
                // finite-difference one computed from values alone.
                let fd = fd_covariant_derivative(&spec, &xi, &value_fn, t, h);
                let an = field.derivative(&spec, t);
                assert!(
                    spec.norm(&(&fd - &an)) < 1e-6,
                    "covariant derivative vs finite differences: {:.3e}",
                    spec.norm(&(&fd - &an))
                );
                // Second covariant derivative must balance the curvature term.
                let deriv_fn = |t: f64| field.derivative(&spec, t);
                let second = fd_covariant_derivative(&spec, &xi, &deriv_fn, t, h);
                let w = field.value(&spec, t);
                let kw = &spec.bracket(&spec.bracket(&xi, &w), &xi) * 0.25;
                let resid = &second + &kw;
                assert!(
                    spec.norm(&resid) < 1e-5,
                    "Jacobi equation residual {:.3e}",
                    spec.norm(&resid)
                );
            }
        }
    }
}

#[test]
fn segment_field_reproduces_endpoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for spec in [GroupSpec::su2(), GroupSpec::su3()] {
        for _ in 0..6 {
            let xi = spec.random_algebra(&mut rng, 1.4);
            let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
            let w0 = spec.random_algebra(&mut rng, 1.0);
            let w1 = spec.random_algebra(&mut rng, 1.0);
            let (t0, t1) = (0.25, 0.75);
            let field = sp.segment_field(&spec, t0, t1, &w0, &w1).unwrap();
            assert!(spec.norm(&(&field.value(&spec, t0) - &w0)) < 1e-12);
            assert!(spec.norm(&(&field.value(&spec, t1) - &w1)) < 1e-12);
            assert!(field.spectral_residual(&spec, 0.5) < 1e-10);
        }
    }
}

#[test]
fn segment_field_zero_endpoints_give_zero_field() {
    let spec = GroupSpec::su3();
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let xi = spec.random_algebra(&mut rng, 1.0);
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    let zero = spec.zero_algebra();
    let field = sp.segment_field(&spec, 0.0, 0.4, &zero, &zero).unwrap();
    for &t in &[0.0, 0.13, 0.28, 0.4] {
        assert!(spec.norm(&field.value(&spec, t)) < 1e-14);
        assert!(spec.norm(&field.derivative(&spec, t)) < 1e-14);
    }
}

#[test]
fn segment_field_is_linear_on_flat_lines() {
    // Velocity along the torus, endpoint data along the same flat line: the
    // unique Jacobi field is the linear interpolant.
    let spec = GroupSpec::su2();
    let xi = spec.cartan_from_angles(&[1.7]).unwrap();
    let u = &xi * (1.0 / spec.norm(&xi));
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    let (t0, t1) = (0.2, 0.9);
    let field = sp.segment_field(&spec, t0, t1, &spec.zero_algebra(), &u).unwrap();
    for &t in &[0.2, 0.4, 0.65, 0.9] {
        let expect = &u * ((t - t0) / (t1 - t0));
        assert!(spec.norm(&(&field.value(&spec, t) - &expect)) < 1e-12);
    }
    let slope = &u * (1.0 / (t1 - t0));
    assert!(spec.norm(&(&field.derivative(&spec, 0.5) - &slope)) < 1e-12);
}

#[test]
fn segment_field_rejects_conjugate_endpoints() {
    // θ = 2π gives curvature eigenvalue 4π²; over Δt = 1/2 the sine factor
    // sin(2π·½) vanishes and the boundary-value problem is singular.
    let spec = GroupSpec::su2();
    let xi = spec.cartan_from_angles(&[2.0 * PI]).unwrap();
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let w0 = spec.random_algebra(&mut rng, 1.0);
    let w1 = spec.random_algebra(&mut rng, 1.0);
    match sp.segment_field(&spec, 0.0, 0.5, &w0, &w1) {
        Err(Error::ConjugateSegment { eigenvalue, t0, t1 }) => {
            assert_close(eigenvalue, 4.0 * PI * PI, 1e-8, "singular eigenvalue");
            assert_close(t1 - t0, 0.5, 1e-15, "segment length");
        }
        other => panic!("expected conjugate-segment error, got {other:?}"),
    }
}

#[test]
fn broken_field_from_smooth_field_has_no_jumps() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for spec in [GroupSpec::su2(), GroupSpec::su3()] {
        let xi = spec.random_algebra(&mut rng, 1.2);
        let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
        let dw0 = spec.random_algebra(&mut rng, 1.0);
        let smooth = sp.initial_value_field(&spec, 0.0, &spec.zero_algebra(), &dw0);
        let n = 6;
        let nodes: Vec<_> = (1..=n).map(|i| smooth.value(&spec, i as f64 / n as f64)).collect();
        let broken = sp.broken_field(&spec, &nodes).unwrap();
        for i in 1..n {
            let jump = broken.derivative_jump(&spec, i);
            assert!(
                spec.norm(&jump) < 1e-10,
                "smooth data must produce no jump (got {:.3e})",
                spec.norm(&jump)
            );
        }
        let end = broken.end_derivative(&spec);
        assert!(spec.norm(&(&end - &smooth.derivative(&spec, 1.0))) < 1e-9);
        assert!(broken.continuity_residual(&spec) < 1e-12);
    }
}

#[test]
fn broken_field_interpolates_nodes_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    let spec = GroupSpec::su3();
    let xi = spec.random_algebra(&mut rng, 1.5);
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    let n = 5;
    let nodes: Vec<_> = (0..n).map(|_| spec.random_algebra(&mut rng, 1.0)).collect();
    let broken = sp.broken_field(&spec, &nodes).unwrap();
    assert!(spec.norm(&broken.value(&spec, 0.0)) < 1e-12, "vanishes at 0");
    for (i, x) in nodes.iter().enumerate() {
        let t = (i + 1) as f64 / n as f64;
        assert!(
            spec.norm(&(&broken.value(&spec, t) - x)) < 1e-12,
            "node value reproduced"
        );
    }
    assert!(broken.continuity_residual(&spec) < 1e-12);
    for i in 0..n {
        let t_mid = (i as f64 + 0.5) / n as f64;
        assert!(broken.segment(i).spectral_residual(&spec, t_mid) < 1e-10);
    }
}

#[test]
fn broken_field_zero_data_is_zero() {
    let spec = GroupSpec::su2();
    let xi = spec.cartan_from_angles(&[2.2]).unwrap();
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    let nodes = vec![spec.zero_algebra(); 4];
    let broken = sp.broken_field(&spec, &nodes).unwrap();
    for &t in &[0.1, 0.3, 0.8] {
        assert!(spec.norm(&broken.value(&spec, t)) < 1e-14);
    }
    for i in 1..4 {
        assert!(spec.norm(&broken.derivative_jump(&spec, i)) < 1e-14);
    }
    assert!(spec.norm(&broken.end_derivative(&spec)) < 1e-14);
}

#[test]
fn conjugate_points_frozen_su2() {
    let spec = GroupSpec::su2();
    // exp(ξ) = e with winding 1: eigenvalue 4π², conjugate times m/2.
    let xi = spec.cartan_from_angles(&[2.0 * PI]).unwrap();
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    let pts = sp.conjugate_points(1.0);
    assert_eq!(pts.len(), 2);
    assert_close(pts[0].time, 0.5, 1e-12, "first conjugate time");
    assert_eq!(pts[0].multiplicity, 2);
    assert_close(pts[1].time, 1.0, 1e-12, "second conjugate time");
    assert_eq!(pts[1].multiplicity, 2);
    let interior: Vec<_> = pts.iter().filter(|p| p.time < 1.0 - 1e-9).collect();
    assert_eq!(interior.len(), 1, "only t = 1/2 lies in the open interval");

    // Winding 2: times m/4.
    let xi = spec.cartan_from_angles(&[4.0 * PI]).unwrap();
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    let pts = sp.conjugate_points(1.0);
    let times: Vec<f64> = pts.iter().map(|p| p.time).collect();
    for (got, want) in times.iter().zip([0.25, 0.5, 0.75, 1.0].iter()) {
        assert_close(*got, *want, 1e-12, "conjugate time");
    }
    assert!(pts.iter().all(|p| p.multiplicity == 2));

    // Short velocity: no conjugate point before √e·T = π.
    let xi = spec.cartan_from_angles(&[1.0]).unwrap();
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    assert!(sp.conjugate_points(1.0).is_empty());
}

#[test]
fn conjugate_points_aggregate_multiplicities_su3() {
    // Angles (2π, 2π, −4π): roots (1,3) and (2,3) both take the value 6π, so
    // e = 9π² with multiplicity 4; the (1,2) root is flat. Conjugate times
    // m/3 with multiplicity 4 each.
    let spec = GroupSpec::su3();
    let xi = spec.cartan_from_angles(&[2.0 * PI, 2.0 * PI]).unwrap();
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    assert_eq!(sp.flat_dim(), 4);
    let pts = sp.conjugate_points(1.0);
    assert_eq!(pts.len(), 3);
    for (k, p) in pts.iter().enumerate() {
        assert_close(p.time, (k + 1) as f64 / 3.0, 1e-12, "aggregated time");
        assert_eq!(p.multiplicity, 4);
    }
}

#[test]
fn commuting_ratio_is_one_on_flat_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(39);
    // Velocity direction itself.
    let su2 = GroupSpec::su2();
    let xi = su2.cartan_from_angles(&[1.3]).unwrap();
    let sp = CurvatureSpectrum::compute(&su2, &xi).unwrap();
    let field = sp.initial_value_field(&su2, 0.0, &su2.zero_algebra(), &(&xi * 0.7));
    assert_close(field.commuting_endpoint_ratio(&su2).unwrap(), 1.0, 1e-12, "ratio");

    // Any torus direction for a regular torus velocity.
    let su3 = GroupSpec::su3();
    let xi = su3.cartan_from_angles(&[0.9, 2.1]).unwrap();
    let sp = CurvatureSpectrum::compute(&su3, &xi).unwrap();
    for _ in 0..5 {
        let mut b = su3.zero_algebra();
        for t in su3.torus().cartan_basis() {
            b = &b + &(t * rng.random_range(-1.0f64..1.0));
        }
        let field = sp.initial_value_field(&su3, 0.0, &su3.zero_algebra(), &b);
        assert_close(field.commuting_endpoint_ratio(&su3).unwrap(), 1.0, 1e-10, "ratio");
    }

    // Sub-regular velocity: the commutant is four-dimensional; random
    // flat-line data must still give ratio 1.
    let xi = su3.cartan_from_angles(&[0.8, 0.8]).unwrap();
    let sp = CurvatureSpectrum::compute(&su3, &xi).unwrap();
    assert_eq!(sp.flat_dim(), 4);
    for _ in 0..5 {
        let mut b = su3.zero_algebra();
        for (u, &e) in sp.eigenbasis().iter().zip(sp.eigenvalues()) {
            if e < 1e-10 {
                b = &b + &(u * rng.random_range(-1.0f64..1.0));
            }
        }
        let field = sp.initial_value_field(&su3, 0.0, &su3.zero_algebra(), &b);
        assert_close(field.commuting_endpoint_ratio(&su3).unwrap(), 1.0, 1e-10, "ratio");
    }
}

#[test]
fn commuting_ratio_rejects_noncommuting_initial_data() {
    let spec = GroupSpec::su2();
    let xi = spec.cartan_from_angles(&[1.1]).unwrap();
    let sp = CurvatureSpectrum::compute(&spec, &xi).unwrap();
    // Off-torus direction does not commute with ξ.
    let b = spec.basis()[0].clone();
    let field = sp.initial_value_field(&spec, 0.0, &spec.zero_algebra(), &b);
    match field.commuting_endpoint_ratio(&spec) {
        Err(Error::Precondition(_)) => {}
        other => panic!("expected precondition error, got {other:?}"),
    }
}

//! Jacobi fields, conjugate points and curvature spectra along geodesics
//! t ↦ g·exp(tξ) of the bi-invariant metric.
//!
//! The curvature operator W ↦ ¼[[ξ,W],ξ] = −¼·ad_ξ² is constant in the
//! parallel frame of the geodesic, so every Jacobi field splits into
//! independent scalar oscillators along its eigenlines: in eigenline
//! coordinates p̈ = −e·p, giving p(t) = a·cos(√e t) + b·sin(√e t)/√e for
//! e > 0 and p(t) = a + b·t on flat lines. Fields here are reported
//! left-trivialized; the parallel frame differs from the left frame by the
//! half-flow Ad_{exp(∓tξ/2)}.

use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, GroupSpec};
use crate::linalg::{eig_hermitian, eig_symmetric_real, C64, CMat, RMat, RVec};
use crate::tol;

/// Eigenvalues below this are treated as flat lines (linear evolution).
/// Curvature eigenvalues scale like |ξ|², so the cut is relative.
fn flat_cut(eigenvalues: &[f64]) -> f64 {
    let emax = eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    tol::CURVATURE_ZERO * (emax + 1.0)
}

/// Full eigendecomposition of the self-adjoint curvature operator
/// K(W) = ¼[[ξ,W],ξ] along the geodesic with velocity ξ, plus cached
/// eigendata of ξ itself for closed-form parallel transport.
#[derive(Debug, Clone)]
pub struct CurvatureSpectrum {
    xi: AlgebraElement,
    eigenvalues: Vec<f64>,
    eigenbasis: Vec<AlgebraElement>,
    /// Coordinates of the eigenbasis, one column per eigenvector.
    basis_coords: RMat,
    /// Eigendata of the Hermitian matrix −iξ: ξ = V·diag(iφ)·V†.
    xi_angles: Vec<f64>,
    xi_vectors: CMat,
    degenerate: bool,
}

impl CurvatureSpectrum {
    /// Diagonalize K = −¼·ad_ξ² in the orthonormal algebra basis.
    ///
    /// ξ = 0 yields the identically-zero spectrum; it is returned with the
    /// `degenerate` flag set rather than as an error so callers probing flat
    /// configurations can proceed.
    pub fn compute(spec: &GroupSpec, xi: &AlgebraElement) -> Result<CurvatureSpectrum> {
        let ad = spec.ad_matrix(xi);
        let k = -(&ad * &ad) / 4.0;
        let k = (&k + k.transpose()) / 2.0;
        let (vals, vecs) = eig_symmetric_real(&k);
        if let Some(&low) = vals.first() {
            if low < -1e-10 * (vals.last().unwrap_or(&1.0).abs() + 1.0) {
                return Err(Error::DegenerateInput(format!(
                    "curvature operator has a negative eigenvalue {low:.3e}"
                )));
            }
        }
        let eigenvalues: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let eigenbasis: Vec<AlgebraElement> = (0..vecs.ncols())
            .map(|j| spec.from_coords(&vecs.column(j).into_owned()))
            .collect();
        let degenerate = spec.norm(xi) < tol::CURVATURE_ZERO;
        let (xi_angles, xi_vectors) = eig_hermitian(&(xi.matrix() * C64::new(0.0, -1.0)));
        Ok(CurvatureSpectrum {
            xi: xi.clone(),
            eigenvalues,
            eigenbasis,
            basis_coords: vecs,
            xi_angles,
            xi_vectors,
            degenerate,
        })
    }

    pub fn xi(&self) -> &AlgebraElement {
        &self.xi
    }

    /// Eigenvalues, ascending, clamped at 0.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenbasis U_i with K(U_i) = e_i·U_i.
    pub fn eigenbasis(&self) -> &[AlgebraElement] {
        &self.eigenbasis
    }

    /// True iff ξ ≈ 0 (the spectrum is identically zero).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Number of flat eigenlines (e ≈ 0); these span ker(ad_ξ).
    pub fn flat_dim(&self) -> usize {
        let cut = flat_cut(&self.eigenvalues);
        self.eigenvalues.iter().filter(|&&e| e <= cut).count()
    }

    /// Parallel transport of a (left-trivialized) vector from time 0 to time
    /// t along the geodesic: x ↦ Ad_{exp(−tξ/2)}x. Closed form through the
    /// cached eigendata of ξ.
    pub fn transport_from_origin(&self, t: f64, x: &AlgebraElement) -> AlgebraElement {
        let u = self.half_flow(-t / 2.0);
        AlgebraElement::from_matrix_unchecked(&u * x.matrix() * u.adjoint())
    }

    /// Inverse of [`Self::transport_from_origin`].
    pub fn transport_to_origin(&self, t: f64, x: &AlgebraElement) -> AlgebraElement {
        let u = self.half_flow(t / 2.0);
        AlgebraElement::from_matrix_unchecked(&u * x.matrix() * u.adjoint())
    }

    /// exp(s·ξ) via the cached eigendecomposition.
    fn half_flow(&self, s: f64) -> CMat {
        let n = self.xi_angles.len();
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.xi_angles.iter().map(|&phi| C64::new(0.0, s * phi).exp()),
        ));
        &self.xi_vectors * d * self.xi_vectors.adjoint()
    }

    /// Coordinates of a left-trivialized vector at time t in the parallel
    /// eigenframe.
    fn to_eigenframe(&self, spec: &GroupSpec, t: f64, x: &AlgebraElement) -> RVec {
        let parallel = self.transport_to_origin(t, x);
        self.basis_coords.transpose() * spec.coords(&parallel)
    }

    /// Left-trivialized vector at time t from parallel eigenframe coordinates.
    fn from_eigenframe(&self, spec: &GroupSpec, t: f64, p: &RVec) -> AlgebraElement {
        let parallel = spec.from_coords(&(&self.basis_coords * p));
        self.transport_from_origin(t, &parallel)
    }

    /// Jacobi field from initial data at time t0: left-trivialized value w0
    /// and covariant derivative dw0.
    pub fn initial_value_field(
        &self,
        spec: &GroupSpec,
        t0: f64,
        w0: &AlgebraElement,
        dw0: &AlgebraElement,
    ) -> JacobiField {
        let a = self.to_eigenframe(spec, t0, w0);
        let b = self.to_eigenframe(spec, t0, dw0);
        let modes = a
            .iter()
            .zip(b.iter())
            .map(|(&a, &b)| ModeCoeffs { a, b })
            .collect();
        JacobiField { spectrum: self.clone(), origin: t0, modes }
    }

    /// The unique Jacobi field on [t0, t1] with prescribed left-trivialized
    /// endpoint values. Errors when some eigenline has sin(√e·(t1−t0)) ≈ 0,
    /// i.e. the segment endpoints are conjugate along that line.
    pub fn segment_field(
        &self,
        spec: &GroupSpec,
        t0: f64,
        t1: f64,
        w0: &AlgebraElement,
        w1: &AlgebraElement,
    ) -> Result<JacobiField> {
        let len = t1 - t0;
        if !(len > 0.0) {
            return Err(Error::Precondition(format!(
                "segment [{t0}, {t1}] must have positive length"
            )));
        }
        let p0 = self.to_eigenframe(spec, t0, w0);
        let p1 = self.to_eigenframe(spec, t1, w1);
        let cut = flat_cut(&self.eigenvalues);
        let mut modes = Vec::with_capacity(self.eigenvalues.len());
        for (i, &e) in self.eigenvalues.iter().enumerate() {
            let (a, b) = if e <= cut {
                (p0[i], (p1[i] - p0[i]) / len)
            } else {
                let omega = e.sqrt();
                let s = (omega * len).sin();
                if s.abs() < tol::SEGMENT_CONJUGATE {
                    return Err(Error::ConjugateSegment { eigenvalue: e, t0, t1 });
                }
                (p0[i], (p1[i] - p0[i] * (omega * len).cos()) * omega / s)
            };
            modes.push(ModeCoeffs { a, b });
        }
        Ok(JacobiField { spectrum: self.clone(), origin: t0, modes })
    }

    /// Broken Jacobi field on [0,1] with W(0) = 0 and W(i/n) = values[i−1]
    /// for i = 1..n; continuous, a Jacobi field on each [i/n, (i+1)/n].
    pub fn broken_field(
        &self,
        spec: &GroupSpec,
        node_values: &[AlgebraElement],
    ) -> Result<BrokenJacobiField> {
        let n = node_values.len();
        if n == 0 {
            return Err(Error::Precondition("broken field needs at least one node".into()));
        }
        let mut segments = Vec::with_capacity(n);
        let mut node_times = Vec::with_capacity(n + 1);
        node_times.push(0.0);
        let zero = spec.zero_algebra();
        for i in 0..n {
            let t0 = i as f64 / n as f64;
            let t1 = (i + 1) as f64 / n as f64;
            let w0 = if i == 0 { &zero } else { &node_values[i - 1] };
            segments.push(self.segment_field(spec, t0, t1, w0, &node_values[i])?);
            node_times.push(t1);
        }
        Ok(BrokenJacobiField { segments, node_times })
    }

    /// All conjugate times t ∈ (0, t_max] along the geodesic, i.e. zeros of
    /// sin(√e·t) for positive eigenvalues e, with multiplicity. Eigenvalues
    /// (and coincident times) are grouped to relative tolerance.
    pub fn conjugate_points(&self, t_max: f64) -> Vec<ConjugatePoint> {
        let cut = flat_cut(&self.eigenvalues);
        // Group eigenvalues into multiplicity clusters.
        let mut clusters: Vec<(f64, usize)> = Vec::new();
        for &e in self.eigenvalues.iter().filter(|&&e| e > cut) {
            match clusters.last_mut() {
                Some((ce, m)) if (e - *ce).abs() <= tol::SPECTRUM_CLUSTER_REL * e.max(*ce) => {
                    *m += 1;
                }
                _ => clusters.push((e, 1)),
            }
        }
        let mut points: Vec<ConjugatePoint> = Vec::new();
        for &(e, mult) in &clusters {
            let omega = e.sqrt();
            let mut m = 1usize;
            loop {
                let t = m as f64 * std::f64::consts::PI / omega;
                if t > t_max * (1.0 + 1e-12) + 1e-15 {
                    break;
                }
                points.push(ConjugatePoint { time: t, multiplicity: mult });
                m += 1;
            }
        }
        points.sort_by(|p, q| p.time.total_cmp(&q.time));
        // Merge coincident times from different clusters.
        let mut merged: Vec<ConjugatePoint> = Vec::new();
        for p in points {
            match merged.last_mut() {
                Some(q) if (p.time - q.time).abs() <= tol::SPECTRUM_CLUSTER_REL * p.time.max(1.0) => {
                    q.multiplicity += p.multiplicity;
                }
                _ => merged.push(p),
            }
        }
        merged
    }
}

/// One conjugate time with its multiplicity (dimension of the space of
/// Jacobi fields vanishing at both 0 and the conjugate time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePoint {
    pub time: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy)]
struct ModeCoeffs {
    a: f64,
    b: f64,
}

impl ModeCoeffs {
    fn value(&self, e: f64, cut: f64, s: f64) -> f64 {
        if e <= cut {
            self.a + self.b * s
        } else {
            let omega = e.sqrt();
            self.a * (omega * s).cos() + self.b * (omega * s).sin() / omega
        }
    }

    fn slope(&self, e: f64, cut: f64, s: f64) -> f64 {
        if e <= cut {
            self.b
        } else {
            let omega = e.sqrt();
            -self.a * omega * (omega * s).sin() + self.b * (omega * s).cos()
        }
    }
}

/// A Jacobi field along t ↦ exp(tξ), stored as oscillator coefficients in
/// the parallel eigenframe of the curvature operator. Values and covariant
/// derivatives are reported left-trivialized.
#[derive(Debug, Clone)]
pub struct JacobiField {
    spectrum: CurvatureSpectrum,
    origin: f64,
    modes: Vec<ModeCoeffs>,
}

impl JacobiField {
    pub fn spectrum(&self) -> &CurvatureSpectrum {
        &self.spectrum
    }

    /// Left-trivialized value W(t).
    pub fn value(&self, spec: &GroupSpec, t: f64) -> AlgebraElement {
        let cut = flat_cut(&self.spectrum.eigenvalues);
        let s = t - self.origin;
        let p = RVec::from_iterator(
            self.modes.len(),
            self.modes
                .iter()
                .zip(self.spectrum.eigenvalues.iter())
                .map(|(m, &e)| m.value(e, cut, s)),
        );
        self.spectrum.from_eigenframe(spec, t, &p)
    }

    /// Left-trivialized covariant derivative DW/Dt(t).
    pub fn derivative(&self, spec: &GroupSpec, t: f64) -> AlgebraElement {
        let cut = flat_cut(&self.spectrum.eigenvalues);
        let s = t - self.origin;
        let p = RVec::from_iterator(
            self.modes.len(),
            self.modes
                .iter()
                .zip(self.spectrum.eigenvalues.iter())
                .map(|(m, &e)| m.slope(e, cut, s)),
        );
        self.spectrum.from_eigenframe(spec, t, &p)
    }

    /// Residual of the oscillator equations at time t, computed from the
    /// stored coefficients (consistency diagnostic).
    pub fn spectral_residual(&self, spec: &GroupSpec, t: f64) -> f64 {
        // D²W/Dt² + K(W) must vanish; in the eigenframe this is p̈_i + e_i·p_i.
        let cut = flat_cut(&self.spectrum.eigenvalues);
        let s = t - self.origin;
        let mut acc = 0.0f64;
        for (m, &e) in self.modes.iter().zip(self.spectrum.eigenvalues.iter()) {
            let pdd = if e <= cut {
                0.0
            } else {
                let omega = e.sqrt();
                -e * (m.a * (omega * s).cos() + m.b * (omega * s).sin() / omega)
            };
            let r = pdd + e * m.value(e, cut, s);
            acc += r * r;
        }
        let _ = spec;
        acc.sqrt()
    }

    /// For a field with W(0) = 0 whose initial derivative commutes with ξ:
    /// the field stays in the commutant ([W(t),ξ] = 0) and satisfies
    /// W(1) = c·DW/Dt(1); returns c (equal to 1 for these flat-line fields).
    pub fn commuting_endpoint_ratio(&self, spec: &GroupSpec) -> Result<f64> {
        let xi = &self.spectrum.xi;
        let w0 = self.value(spec, 0.0);
        let b0 = self.derivative(spec, 0.0);
        let scale = spec.norm(&b0).max(spec.norm(&w0));
        if scale < 1e-14 {
            return Err(Error::Precondition("field is identically zero".into()));
        }
        if spec.norm(&w0) > 1e-10 * scale.max(1.0) {
            return Err(Error::Precondition(format!(
                "field must vanish at t = 0 (|W(0)| = {:.3e})",
                spec.norm(&w0)
            )));
        }
        let comm = spec.bracket(&b0, xi);
        if spec.norm(&comm) > 1e-10 * (scale * spec.norm(xi)).max(1.0) {
            return Err(Error::Precondition(format!(
                "initial derivative must commute with the velocity (|[DW/Dt(0),ξ]| = {:.3e})",
                spec.norm(&comm)
            )));
        }
        for k in 1..=5 {
            let t = k as f64 / 5.0;
            let w = self.value(spec, t);
            let c = spec.bracket(&w, xi);
            if spec.norm(&c) > 1e-8 * (scale * spec.norm(xi)).max(1.0) {
                return Err(Error::Precondition(format!(
                    "field leaves the commutant at t = {t} (|[W,ξ]| = {:.3e})",
                    spec.norm(&c)
                )));
            }
        }
        let w1 = self.value(spec, 1.0);
        let d1 = self.derivative(spec, 1.0);
        let denom = spec.inner(&d1, &d1);
        if denom < 1e-20 {
            return Err(Error::Precondition("terminal derivative vanishes".into()));
        }
        let c = spec.inner(&w1, &d1) / denom;
        let resid = &w1 - &(&d1 * c);
        if spec.norm(&resid) > 1e-8 * scale.max(1.0) {
            return Err(Error::Precondition(format!(
                "endpoint value is not proportional to the endpoint derivative (residual {:.3e})",
                spec.norm(&resid)
            )));
        }
        Ok(c)
    }
}

/// Continuous piecewise-Jacobi field on [0,1] with uniform nodes i/n,
/// vanishing at t = 0, smooth except possibly at the interior nodes.
#[derive(Debug, Clone)]
pub struct BrokenJacobiField {
    segments: Vec<JacobiField>,
    node_times: Vec<f64>,
}

impl BrokenJacobiField {
    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn node_times(&self) -> &[f64] {
        &self.node_times
    }

    pub fn segment(&self, i: usize) -> &JacobiField {
        &self.segments[i]
    }

    fn segment_index(&self, t: f64) -> usize {
        let n = self.segments.len();
        let i = (t * n as f64).floor() as isize;
        i.clamp(0, n as isize - 1) as usize
    }

    /// Left-trivialized value W(t) (continuous across nodes).
    pub fn value(&self, spec: &GroupSpec, t: f64) -> AlgebraElement {
        self.segments[self.segment_index(t)].value(spec, t)
    }

    /// One-sided covariant derivative just before node i (i = 1..n).
    pub fn derivative_before(&self, spec: &GroupSpec, i: usize) -> AlgebraElement {
        self.segments[i - 1].derivative(spec, self.node_times[i])
    }

    /// One-sided covariant derivative just after node i (i = 0..n−1).
    pub fn derivative_after(&self, spec: &GroupSpec, i: usize) -> AlgebraElement {
        self.segments[i].derivative(spec, self.node_times[i])
    }

    /// Derivative jump Δ_i = DW/Dt(t_i⁻) − DW/Dt(t_i⁺) at interior node i
    /// (i = 1..n−1).
    pub fn derivative_jump(&self, spec: &GroupSpec, i: usize) -> AlgebraElement {
        &self.derivative_before(spec, i) - &self.derivative_after(spec, i)
    }

    /// Terminal covariant derivative DW/Dt(1⁻).
    pub fn end_derivative(&self, spec: &GroupSpec) -> AlgebraElement {
        let n = self.segments.len();
        self.segments[n - 1].derivative(spec, 1.0)
    }

    /// Maximum value mismatch across interior nodes (assembly diagnostic).
    pub fn continuity_residual(&self, spec: &GroupSpec) -> f64 {
        let mut worst = 0.0f64;
        for i in 1..self.segments.len() {
            let t = self.node_times[i];
            let left = self.segments[i - 1].value(spec, t);
            let right = self.segments[i].value(spec, t);
            worst = worst.max(spec.norm(&(&left - &right)));
        }
        worst
    }
}

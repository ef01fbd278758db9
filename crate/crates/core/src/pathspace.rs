//! Finite configuration spaces of broken geodesics.
//!
//! A configuration is a chain of nodes e → g_1 → … → g_n in G whose last
//! node is pinned to the moment-map value of a point m of the coupled space
//! M. The Dirichlet energy of the chain,
//!
//!   f_n = n·Σ_i ρ(g_i, g_{i+1})²,   g_0 = e,
//!
//! equals the path energy ∫|λ⁻¹λ̇|² of the piecewise-geodesic interpolant,
//! and on the sublevel domain f_n < ½·n·ρ̄² every segment carries a unique
//! minimal geodesic. This module provides the configuration/tangent types,
//! the energy and its sublevel test, the sampling maps between
//! configurations and sampled paths (sections of each other), a shortening
//! step that straightens sub-segments without increasing energy, the
//! first-variation gradient, and — at critical configurations — the Hessian
//! assembled from broken Jacobi fields and the moment-map Hessian.

use crate::error::{Error, Result};
use crate::jacobi::CurvatureSpectrum;
use crate::lie::{AlgebraElement, GroupElement};
use crate::linalg::{self, RMat, RVec};
use crate::qham::{QHSpaceModel, SpacePoint, SpaceTangent};
use crate::tol;
use rand::Rng;
use rayon::prelude::*;

/// The space X_n of n-node broken configurations over a moment-map space:
/// chains (g_1,…,g_n) in G together with m ∈ M subject to g_n = Φ(m).
#[derive(Debug, Clone)]
pub struct PathSpace {
    model: QHSpaceModel,
    nodes: usize,
}

/// A configuration: nodes g_1,…,g_n and the coupled point m with g_n = Φ(m).
#[derive(Debug, Clone)]
pub struct BrokenConfig {
    /// Nodes g_1,…,g_n (the chain starts at the implicit g_0 = e).
    pub nodes: Vec<GroupElement>,
    /// The coupled point m; the last node equals its moment-map value.
    pub base: SpacePoint,
}

/// A tangent vector at a configuration: left-trivialized node directions
/// X_1,…,X_n and a direction Y at the coupled point. The last node direction
/// is slaved to the constraint, X_n = Φ(m)⁻¹Φ_*(Y); the free coordinates are
/// (X_1,…,X_{n−1}, Y) and the metric is the sum of their inner products.
#[derive(Debug, Clone)]
pub struct ConfigTangent {
    /// Node directions X_1,…,X_n (the last entry is the derived one).
    pub node_dirs: Vec<AlgebraElement>,
    /// Direction at the coupled point.
    pub base_dir: SpaceTangent,
}

/// A sampled path λ: [0,1] → G with λ(0) = e, together with the coupled
/// point m satisfying Φ(m) = λ(1). Samples are (time, value) pairs with
/// strictly increasing times.
#[derive(Debug, Clone)]
pub struct SampledPath {
    pub times: Vec<f64>,
    pub values: Vec<GroupElement>,
    pub base: SpacePoint,
}

/// Diagnostics of the critical-point test at a configuration.
#[derive(Debug, Clone)]
pub struct CriticalityReport {
    /// Norm of the constrained gradient.
    pub gradient_norm: f64,
    /// Worst node misalignment off the one-parameter geodesic through the
    /// mean segment velocity (Frobenius distance).
    pub geodesic_residual: f64,
    /// Norm of the projection of the terminal segment velocity onto the
    /// image of the moment-map differential.
    pub terminal_alignment: f64,
    /// Whether the gradient norm is below the criticality threshold.
    pub is_critical: bool,
}

/// Hessian of the energy over an orthonormal tangent basis, with its
/// spectrum classified by sign.
#[derive(Debug, Clone)]
pub struct HessianSpectrum {
    /// Raw assembled matrix (before symmetrization).
    pub matrix: RMat,
    /// Eigenvalues of the symmetrized matrix, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors of the symmetrized matrix, one column per eigenvalue,
    /// in the same basis order as [`PathSpace::tangent_basis`].
    pub eigenvectors: RMat,
    pub negative: usize,
    pub null: usize,
    pub positive: usize,
    /// Frobenius norm of matrix − matrixᵀ.
    pub symmetry_residual: f64,
}

impl PathSpace {
    /// Configuration space with n ≥ 1 nodes over the given space model.
    pub fn new(model: QHSpaceModel, nodes: usize) -> Result<PathSpace> {
        if nodes == 0 {
            return Err(Error::Precondition("configuration space needs n ≥ 1 nodes".into()));
        }
        Ok(PathSpace { model, nodes })
    }

    pub fn model(&self) -> &QHSpaceModel {
        &self.model
    }

    /// Number of nodes n.
    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// Dimension of the configuration space: (n−1)·dim G + dim M.
    pub fn dim(&self) -> usize {
        (self.nodes - 1) * self.model.group().algebra_dim() + self.model.dim()
    }

    /// Energy bound ½·n·ρ̄² defining the sublevel domain.
    pub fn sublevel_bound(&self) -> f64 {
        let rho = self.model.group().injectivity_radius();
        0.5 * self.nodes as f64 * rho * rho
    }

    /// Validate and assemble a configuration from its parts.
    pub fn config(&self, nodes: Vec<GroupElement>, base: SpacePoint) -> Result<BrokenConfig> {
        if nodes.len() != self.nodes {
            return Err(Error::Precondition(format!(
                "configuration needs {} nodes, got {}",
                self.nodes,
                nodes.len()
            )));
        }
        self.model.validate_point(&base)?;
        let target = self.model.moment(&base);
        let drift = nodes[self.nodes - 1].frobenius_distance(&target);
        if drift > tol::ELEMENT_VALIDATE {
            return Err(Error::Precondition(format!(
                "last node must equal the moment-map value (drift {drift:.3e})"
            )));
        }
        Ok(BrokenConfig { nodes, base })
    }

    /// The configuration with nodes exp(i·ξ/n) on the one-parameter geodesic
    /// of ξ, coupled to a base point with Φ(m) = exp(ξ). The last node is
    /// taken as Φ(m) itself so the defining constraint holds exactly.
    pub fn lattice_config(&self, xi: &AlgebraElement, base: SpacePoint) -> Result<BrokenConfig> {
        let spec = self.model.group();
        let n = self.nodes;
        let mut nodes = Vec::with_capacity(n);
        for i in 1..n {
            nodes.push(spec.exp(&(xi * (i as f64 / n as f64))));
        }
        nodes.push(self.model.moment(&base));
        let drift = nodes[n - 1].frobenius_distance(&spec.exp(xi));
        if drift > tol::ELEMENT_VALIDATE {
            return Err(Error::Precondition(format!(
                "base point does not close the geodesic: |Φ(m) − exp(ξ)| = {drift:.3e}"
            )));
        }
        self.config(nodes, base)
    }

    /// Random configuration in the sublevel domain: a random base point, the
    /// geodesic chain to its moment-map value, and interior-node perturbations
    /// of the given scale (halved until the sublevel test passes).
    pub fn random_config<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        scale: f64,
    ) -> Result<BrokenConfig> {
        let spec = self.model.group();
        let g = spec.random_group(rng, 0.8);
        let base = self.model.act(&g, &self.model.base_point());
        let target = self.model.moment(&base);
        let xi = spec.log(&target)?;
        let mut s = scale;
        for _ in 0..5 {
            let mut nodes = Vec::with_capacity(self.nodes);
            for i in 1..self.nodes {
                let step = spec.random_algebra(rng, s);
                nodes.push(spec.exp(&(&xi * (i as f64 / self.nodes as f64))).mul(&spec.exp(&step)));
            }
            nodes.push(target.clone());
            let cfg = self.config(nodes, base.clone())?;
            if self.in_sublevel(&cfg) {
                return Ok(cfg);
            }
            s /= 2.0;
        }
        Err(Error::Precondition(
            "could not draw a sublevel configuration at this scale".into(),
        ))
    }

    /// Diagonal conjugation action on configurations: every node and the base
    /// point are conjugated by g (the implicit origin e is preserved).
    pub fn act(&self, g: &GroupElement, cfg: &BrokenConfig) -> BrokenConfig {
        BrokenConfig {
            nodes: cfg.nodes.iter().map(|x| x.conjugated_by(g)).collect(),
            base: self.model.act(g, &cfg.base),
        }
    }

    /// Action on tangents: left-trivialized node directions transform by Ad_g.
    pub fn act_tangent(&self, g: &GroupElement, eta: &ConfigTangent) -> ConfigTangent {
        let spec = self.model.group();
        ConfigTangent {
            node_dirs: eta.node_dirs.iter().map(|x| spec.adjoint(g, x)).collect(),
            base_dir: self.model.act_tangent(g, &eta.base_dir),
        }
    }

    /// Assemble a tangent vector from its free coordinates: interior node
    /// directions X_1,…,X_{n−1} and the base direction Y. The slaved last
    /// direction X_n = Φ(m)⁻¹Φ_*(Y) is derived.
    pub fn tangent(
        &self,
        cfg: &BrokenConfig,
        interior: Vec<AlgebraElement>,
        base_dir: SpaceTangent,
    ) -> ConfigTangent {
        assert_eq!(interior.len(), self.nodes - 1, "need n−1 interior node directions");
        let mut node_dirs = interior;
        node_dirs.push(self.model.moment_diff(&cfg.base, &base_dir));
        ConfigTangent { node_dirs, base_dir }
    }

    pub fn zero_tangent(&self, cfg: &BrokenConfig) -> ConfigTangent {
        let spec = self.model.group();
        ConfigTangent {
            node_dirs: vec![spec.zero_algebra(); self.nodes],
            base_dir: self.model.zero_tangent(&cfg.base),
        }
    }

    /// The vector field of the conjugation action: node components
    /// Ad_{g_i⁻¹}γ − γ and the induced direction at the base point.
    pub fn orbit_direction(&self, cfg: &BrokenConfig, gamma: &AlgebraElement) -> ConfigTangent {
        let spec = self.model.group();
        ConfigTangent {
            node_dirs: cfg
                .nodes
                .iter()
                .map(|x| &spec.adjoint(&x.inverse(), gamma) - gamma)
                .collect(),
            base_dir: self.model.orbit_tangent(&cfg.base, gamma),
        }
    }

    /// Random tangent with free coordinates uniform in [−scale, scale].
    pub fn random_tangent<R: Rng + ?Sized>(
        &self,
        cfg: &BrokenConfig,
        rng: &mut R,
        scale: f64,
    ) -> ConfigTangent {
        let spec = self.model.group();
        let interior = (1..self.nodes).map(|_| spec.random_algebra(rng, scale)).collect();
        self.tangent(cfg, interior, self.model.random_tangent(&cfg.base, rng, scale))
    }

    /// Metric on the free coordinates (X_1,…,X_{n−1}, Y).
    pub fn tangent_inner(&self, a: &ConfigTangent, b: &ConfigTangent) -> f64 {
        let spec = self.model.group();
        let mut acc = self.model.tangent_inner(&a.base_dir, &b.base_dir);
        for i in 0..self.nodes - 1 {
            acc += spec.inner(&a.node_dirs[i], &b.node_dirs[i]);
        }
        acc
    }

    pub fn tangent_norm(&self, a: &ConfigTangent) -> f64 {
        self.tangent_inner(a, a).max(0.0).sqrt()
    }

    pub fn tangent_add(&self, a: &ConfigTangent, b: &ConfigTangent) -> ConfigTangent {
        ConfigTangent {
            node_dirs: a
                .node_dirs
                .iter()
                .zip(b.node_dirs.iter())
                .map(|(x, y)| x + y)
                .collect(),
            base_dir: self.model.tangent_add(&a.base_dir, &b.base_dir),
        }
    }

    pub fn tangent_scale(&self, a: &ConfigTangent, s: f64) -> ConfigTangent {
        ConfigTangent {
            node_dirs: a.node_dirs.iter().map(|x| x * s).collect(),
            base_dir: self.model.tangent_scale(&a.base_dir, s),
        }
    }

    /// Segment velocities ξ_i = log(g_i⁻¹·g_{i+1}) for i = 0..n−1 (g_0 = e).
    pub fn segment_logs(&self, cfg: &BrokenConfig) -> Result<Vec<AlgebraElement>> {
        let spec = self.model.group();
        let mut logs = Vec::with_capacity(self.nodes);
        let mut prev = spec.identity();
        for node in &cfg.nodes {
            logs.push(spec.log(&prev.inverse().mul(node))?);
            prev = node.clone();
        }
        Ok(logs)
    }

    /// The energy f_n = n·Σ_i ρ(g_i, g_{i+1})².
    pub fn energy(&self, cfg: &BrokenConfig) -> Result<f64> {
        let spec = self.model.group();
        let logs = self.segment_logs(cfg)?;
        Ok(self.nodes as f64 * logs.iter().map(|l| spec.inner(l, l)).sum::<f64>())
    }

    /// Strict sublevel test f_n < ½·n·ρ̄². A cut-locus failure in any segment
    /// log means that segment alone contributes ≥ n·ρ̄², which already
    /// exceeds the bound, so it reports false rather than an error.
    pub fn in_sublevel(&self, cfg: &BrokenConfig) -> bool {
        match self.energy(cfg) {
            Ok(f) => f < self.sublevel_bound(),
            Err(_) => false,
        }
    }

    /// Piecewise-geodesic interpolant through the nodes, sampled on the
    /// default grid of 64 samples per segment. Node samples are the exact
    /// node matrices, making [`Self::alpha`] an exact left inverse.
    pub fn beta(&self, cfg: &BrokenConfig) -> Result<SampledPath> {
        self.beta_with_grid(cfg, 64)
    }

    /// [`Self::beta`] on a grid of the given number of samples per segment.
    pub fn beta_with_grid(
        &self,
        cfg: &BrokenConfig,
        samples_per_segment: usize,
    ) -> Result<SampledPath> {
        if samples_per_segment == 0 {
            return Err(Error::Precondition("need at least one sample per segment".into()));
        }
        if !self.in_sublevel(cfg) {
            return Err(Error::Precondition(
                "configuration is outside the sublevel domain".into(),
            ));
        }
        let spec = self.model.group();
        let logs = self.segment_logs(cfg)?;
        let n = self.nodes;
        let s = samples_per_segment;
        let total = n * s;
        let mut times = Vec::with_capacity(total + 1);
        let mut values = Vec::with_capacity(total + 1);
        for i in 0..n {
            let start = if i == 0 { spec.identity() } else { cfg.nodes[i - 1].clone() };
            for k in 0..s {
                times.push(((i * s + k) as f64) / (total as f64));
                if k == 0 {
                    values.push(start.clone());
                } else {
                    values.push(start.mul(&spec.exp(&(&logs[i] * (k as f64 / s as f64)))));
                }
            }
        }
        times.push(1.0);
        values.push(cfg.nodes[n - 1].clone());
        Ok(SampledPath { times, values, base: cfg.base.clone() })
    }

    /// Read off the configuration at the node times i/n. Exact on images of
    /// [`Self::beta`]: the returned nodes are the stored sample values.
    pub fn alpha(&self, path: &SampledPath) -> Result<BrokenConfig> {
        self.validate_path(path)?;
        let f = self.path_energy(path)?;
        if f >= self.sublevel_bound() {
            return Err(Error::Precondition(format!(
                "path energy {f:.6} is not below the sublevel bound {:.6}",
                self.sublevel_bound()
            )));
        }
        let mut nodes = Vec::with_capacity(self.nodes);
        for i in 1..=self.nodes {
            let target = i as f64 / self.nodes as f64;
            let j = nearest_time_index(&path.times, target);
            if (path.times[j] - target).abs() > tol::NODE_TIME {
                return Err(Error::Precondition(format!(
                    "path has no sample at node time {target} (nearest {:.3e} away)",
                    (path.times[j] - target).abs()
                )));
            }
            nodes.push(path.values[j].clone());
        }
        self.config(nodes, path.base.clone())
    }

    /// Path energy ∫|λ⁻¹λ̇|² by per-chunk chord quadrature Σ ρ(v_j,v_{j+1})²/Δt_j.
    /// Exact (up to roundoff) whenever the path is geodesic between
    /// consecutive samples; an over-estimate never below the true energy
    /// otherwise.
    pub fn path_energy(&self, path: &SampledPath) -> Result<f64> {
        self.validate_path(path)?;
        let spec = self.model.group();
        let mut acc = 0.0;
        for j in 0..path.values.len() - 1 {
            let dt = path.times[j + 1] - path.times[j];
            let l = spec.log(&path.values[j].inverse().mul(&path.values[j + 1]))?;
            acc += spec.inner(&l, &l) / dt;
        }
        Ok(acc)
    }

    /// One shortening step: replace the initial fraction of segment i (the
    /// window [i/n, (i+eps)/n], snapped to sample times) by the minimal
    /// geodesic between the window endpoints. Never increases the chord
    /// energy; fixes piecewise-geodesic paths. Sweeping all segments with
    /// eps = 1 reproduces the interpolant of the sampled configuration.
    pub fn shorten_step(
        &self,
        path: &SampledPath,
        segment: usize,
        eps: f64,
    ) -> Result<SampledPath> {
        if segment >= self.nodes {
            return Err(Error::Precondition(format!(
                "segment index {segment} out of range (n = {})",
                self.nodes
            )));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Precondition("fraction must lie in (0, 1]".into()));
        }
        self.validate_path(path)?;
        let f = self.path_energy(path)?;
        if f >= self.sublevel_bound() {
            return Err(Error::Precondition(format!(
                "path energy {f:.6} is not below the sublevel bound {:.6}",
                self.sublevel_bound()
            )));
        }
        let n = self.nodes as f64;
        let start = segment as f64 / n;
        let j0 = nearest_time_index(&path.times, start);
        if (path.times[j0] - start).abs() > tol::NODE_TIME {
            return Err(Error::Precondition(format!(
                "path has no sample at node time {start} (nearest {:.3e} away)",
                (path.times[j0] - start).abs()
            )));
        }
        let j1 = nearest_time_index(&path.times, start + eps / n);
        if j1 <= j0 + 1 {
            return Ok(path.clone());
        }
        let spec = self.model.group();
        let mut values = path.values.clone();
        let t0 = path.times[j0];
        let span = path.times[j1] - t0;
        for j in j0 + 1..j1 {
            let u = (path.times[j] - t0) / span;
            values[j] = spec.interpolate(&path.values[j0], &path.values[j1], u)?;
        }
        Ok(SampledPath { times: path.times.clone(), values, base: path.base.clone() })
    }

    /// Riesz representative of the first variation of the energy in the free
    /// coordinates: interior components 2n(ξ_{i−1} − ξ_i) and the base
    /// component pairing the terminal velocity against the moment-map
    /// differential.
    pub fn gradient(&self, cfg: &BrokenConfig) -> Result<ConfigTangent> {
        let spec = self.model.group();
        let logs = self.segment_logs(cfg)?;
        let two_n = 2.0 * self.nodes as f64;
        let interior: Vec<AlgebraElement> = (0..self.nodes - 1)
            .map(|i| &(&logs[i] - &logs[i + 1]) * two_n)
            .collect();
        let mut base_dir = self.model.zero_tangent(&cfg.base);
        for e in self.model.tangent_basis(&cfg.base) {
            let c = two_n * spec.inner(&logs[self.nodes - 1], &self.model.moment_diff(&cfg.base, &e));
            base_dir = self.model.tangent_add(&base_dir, &self.model.tangent_scale(&e, c));
        }
        Ok(self.tangent(cfg, interior, base_dir))
    }

    /// Critical-point diagnostics: gradient norm, worst node misalignment
    /// off the mean one-parameter geodesic, and the projection of the
    /// terminal velocity onto the image of the moment-map differential.
    /// The configuration is critical iff both residuals vanish.
    pub fn criticality(&self, cfg: &BrokenConfig) -> Result<CriticalityReport> {
        let spec = self.model.group();
        let logs = self.segment_logs(cfg)?;
        let grad = self.gradient(cfg)?;
        let gradient_norm = self.tangent_norm(&grad);

        let mut mean = spec.zero_algebra();
        for l in &logs {
            mean = &mean + l;
        }
        let mean = &mean * (1.0 / self.nodes as f64);
        let mut geodesic_residual = 0.0f64;
        for i in 1..=self.nodes {
            let on_geodesic = spec.exp(&(&mean * (i as f64)));
            geodesic_residual = geodesic_residual.max(cfg.nodes[i - 1].frobenius_distance(&on_geodesic));
        }

        let images: Vec<AlgebraElement> = self
            .model
            .tangent_basis(&cfg.base)
            .iter()
            .map(|e| self.model.moment_diff(&cfg.base, e))
            .collect();
        let image_mat = spec.coords_matrix(&images);
        let terminal_alignment = if image_mat.ncols() == 0 || image_mat.norm() < 1e-10 {
            0.0
        } else {
            let span = linalg::column_span(&image_mat, tol::RANK_REL);
            (span.transpose() * spec.coords(&logs[self.nodes - 1])).norm()
        };

        Ok(CriticalityReport {
            gradient_norm,
            geodesic_residual,
            terminal_alignment,
            is_critical: gradient_norm <= tol::CRITICAL * self.nodes as f64,
        })
    }

    /// Hessian of the energy at a critical configuration:
    ///
    ///   Hf_n(η, η′) = 2·[ Σ_{0<i<n} ⟨Δ_i(DW/Dt), X′_i⟩ + ⟨DW/Dt(1), X′_n⟩
    ///                     + H^ξΦ(Y, Y′) ],
    ///
    /// where W is the broken Jacobi field along t ↦ exp(tξ) through the node
    /// directions of η, ξ = n·ξ̄ is the geodesic velocity, Δ_i the covariant
    /// derivative jumps, and H^ξΦ the moment-map Hessian. The overall factor
    /// normalizes to the literal second derivative of the energy, matching
    /// finite differences.
    pub fn hessian(
        &self,
        cfg: &BrokenConfig,
        eta: &ConfigTangent,
        etap: &ConfigTangent,
    ) -> Result<f64> {
        let (spectrum, xi) = self.critical_geodesic(cfg)?;
        let data = self.field_data(&spectrum, eta)?;
        let moment = self.model.hessian_moment(&cfg.base, &xi, &eta.base_dir, &etap.base_dir)?;
        Ok(2.0 * (self.pair_field(&data, etap) + moment))
    }

    /// Hessian over the orthonormal tangent basis of
    /// [`Self::tangent_basis`], with eigenvalues classified by sign at the
    /// relative threshold `tol::NULL_REL`.
    pub fn hessian_matrix(&self, cfg: &BrokenConfig) -> Result<HessianSpectrum> {
        let (spectrum, xi) = self.critical_geodesic(cfg)?;
        let basis = self.tangent_basis(cfg);
        let dim = basis.len();
        let data: Vec<FieldData> = basis
            .par_iter()
            .map(|eta| self.field_data(&spectrum, eta))
            .collect::<Result<Vec<_>>>()?;

        // Moment-map Hessian block over the base-direction basis; node-only
        // basis vectors have zero base direction, so their block vanishes by
        // bilinearity.
        let m_basis = self.model.tangent_basis(&cfg.base);
        let m_dim = m_basis.len();
        let node_dim = dim - m_dim;
        let mut moment_block = RMat::zeros(m_dim, m_dim);
        for j in 0..m_dim {
            for k in 0..m_dim {
                moment_block[(j, k)] =
                    self.model.hessian_moment(&cfg.base, &xi, &m_basis[j], &m_basis[k])?;
            }
        }

        let mut h = RMat::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                let mut v = self.pair_field(&data[a], &basis[b]);
                if a >= node_dim && b >= node_dim {
                    v += moment_block[(a - node_dim, b - node_dim)];
                }
                h[(a, b)] = 2.0 * v;
            }
        }

        let symmetry_residual = (&h - h.transpose()).norm();
        let sym = (&h + h.transpose()) / 2.0;
        let (eigenvalues, eigenvectors) = linalg::eig_symmetric_real(&sym);
        let max_abs = eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
        let cut = tol::NULL_REL * max_abs;
        let negative = eigenvalues.iter().filter(|&&e| e < -cut).count();
        let null = eigenvalues.iter().filter(|&&e| e.abs() <= cut).count();
        let positive = eigenvalues.iter().filter(|&&e| e > cut).count();
        Ok(HessianSpectrum {
            matrix: h,
            eigenvalues,
            eigenvectors,
            negative,
            null,
            positive,
            symmetry_residual,
        })
    }

    /// Orthonormal basis of the free tangent coordinates: the algebra basis
    /// in each interior node slot, then the base-point tangent basis (with
    /// derived last node directions).
    pub fn tangent_basis(&self, cfg: &BrokenConfig) -> Vec<ConfigTangent> {
        let spec = self.model.group();
        let d = spec.algebra_dim();
        let mut out = Vec::with_capacity((self.nodes - 1) * d + self.model.dim());
        for slot in 0..self.nodes - 1 {
            for b in spec.basis() {
                let mut interior = vec![spec.zero_algebra(); self.nodes - 1];
                interior[slot] = b.clone();
                out.push(self.tangent(cfg, interior, self.model.zero_tangent(&cfg.base)));
            }
        }
        for e in self.model.tangent_basis(&cfg.base) {
            out.push(self.tangent(cfg, vec![spec.zero_algebra(); self.nodes - 1], e));
        }
        out
    }

    /// Tangent vector with the given coordinates over [`Self::tangent_basis`].
    pub fn tangent_from_coords(&self, cfg: &BrokenConfig, v: &RVec) -> ConfigTangent {
        let spec = self.model.group();
        let d = spec.algebra_dim();
        let node_dim = (self.nodes - 1) * d;
        assert_eq!(v.len(), node_dim + self.model.dim(), "coordinate length mismatch");
        let interior: Vec<AlgebraElement> = (0..self.nodes - 1)
            .map(|slot| spec.from_coords(&v.rows(slot * d, d).into_owned()))
            .collect();
        let m_basis = self.model.tangent_basis(&cfg.base);
        let base_dir = self
            .model
            .combine(&m_basis, &v.rows(node_dim, v.len() - node_dim).into_owned());
        self.tangent(cfg, interior, base_dir)
    }

    /// Geodesic data at a critical configuration: curvature spectrum along
    /// exp(tξ) and the velocity ξ = n·ξ̄.
    fn critical_geodesic(&self, cfg: &BrokenConfig) -> Result<(CurvatureSpectrum, AlgebraElement)> {
        let report = self.criticality(cfg)?;
        if !report.is_critical {
            return Err(Error::Precondition(format!(
                "configuration is not critical (gradient norm {:.3e})",
                report.gradient_norm
            )));
        }
        let spec = self.model.group();
        let logs = self.segment_logs(cfg)?;
        // ξ = n·ξ̄ is the sum of the (equal, at a critical point) segment logs.
        let mut xi = spec.zero_algebra();
        for l in &logs {
            xi = &xi + l;
        }
        let spectrum = CurvatureSpectrum::compute(spec, &xi)?;
        Ok((spectrum, xi))
    }

    /// Covariant-derivative data of the broken Jacobi field through the node
    /// directions of a tangent vector.
    fn field_data(&self, spectrum: &CurvatureSpectrum, eta: &ConfigTangent) -> Result<FieldData> {
        let spec = self.model.group();
        let field = spectrum.broken_field(spec, &eta.node_dirs)?;
        let jumps = (1..self.nodes).map(|i| field.derivative_jump(spec, i)).collect();
        Ok(FieldData { jumps, end: field.end_derivative(spec) })
    }

    /// Σ_i ⟨Δ_i, X′_i⟩ + ⟨DW/Dt(1), X′_n⟩ for the stored field data.
    fn pair_field(&self, data: &FieldData, etap: &ConfigTangent) -> f64 {
        let spec = self.model.group();
        let mut acc = spec.inner(&data.end, &etap.node_dirs[self.nodes - 1]);
        for (jump, x) in data.jumps.iter().zip(etap.node_dirs.iter()) {
            acc += spec.inner(jump, x);
        }
        acc
    }

    fn validate_path(&self, path: &SampledPath) -> Result<()> {
        if path.times.len() != path.values.len() || path.times.len() < 2 {
            return Err(Error::Precondition(
                "path needs equally many times and values, at least two".into(),
            ));
        }
        for j in 0..path.times.len() - 1 {
            if !(path.times[j + 1] > path.times[j]) {
                return Err(Error::Precondition("sample times must strictly increase".into()));
            }
        }
        if path.times[0].abs() > tol::NODE_TIME
            || (path.times[path.times.len() - 1] - 1.0).abs() > tol::NODE_TIME
        {
            return Err(Error::Precondition("path must be sampled over [0, 1]".into()));
        }
        let spec = self.model.group();
        if path.values[0].frobenius_distance(&spec.identity()) > tol::ELEMENT_VALIDATE {
            return Err(Error::Precondition("path must start at the identity".into()));
        }
        self.model.validate_point(&path.base)?;
        let target = self.model.moment(&path.base);
        let drift = path.values[path.values.len() - 1].frobenius_distance(&target);
        if drift > tol::ELEMENT_VALIDATE {
            return Err(Error::Precondition(format!(
                "path endpoint must equal the moment-map value (drift {drift:.3e})"
            )));
        }
        Ok(())
    }
}

/// Covariant-derivative jumps Δ_1,…,Δ_{n−1} and the terminal derivative of
/// a broken Jacobi field.
struct FieldData {
    jumps: Vec<AlgebraElement>,
    end: AlgebraElement,
}

/// Index of the sample time closest to the target.
fn nearest_time_index(times: &[f64], target: f64) -> usize {
    let mut best = 0usize;
    let mut dist = f64::INFINITY;
    for (j, &t) in times.iter().enumerate() {
        let d = (t - target).abs();
        if d < dist {
            dist = d;
            best = j;
        }
    }
    best
}

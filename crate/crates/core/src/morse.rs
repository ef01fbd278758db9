//! Critical components of the broken-geodesic energy: enumeration by chamber
//! representatives, minimizing-manifold bases, Hessian classification,
//! torus-fixed-point checks, and built-in cohomology inputs for series
//! assembly.
//!
//! A critical configuration runs along a one-parameter geodesic exp(tξ):
//! nodes g_i = exp(iξ/n) through a sample point m with Φ(m) = exp(ξ) and m
//! fixed by the ξ-flow. Components are classified up to simultaneous
//! conjugation, so ξ is reduced to the closed fundamental Weyl chamber
//! (diagonal angles sorted descending) and m to a canonical form per space
//! kind. Critical sets need not be manifolds; classification happens at
//! sample points only, guarded by index-constancy resampling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, GroupName, GroupSpec};
use crate::linalg::{self, C64, CMat, RMat, RVec};
use crate::pathspace::{BrokenConfig, ConfigTangent, HessianSpectrum, PathSpace};
use crate::qham::{QHSpaceModel, SpaceKind, SpacePoint, SpaceTangent};
use crate::series::MorseSeries;
use crate::tol;

/// Number of minimizing-manifold samples drawn by the minimum-property check.
pub const MIN_SAMPLES: usize = 200;

/// Sampling radius around the critical component for the minimum check.
pub const MIN_RADIUS: f64 = 0.1;

/// Number of resampled component points for the index-constancy check.
pub const INDEX_SAMPLES: usize = 5;

/// One critical component of the energy on the n-node configuration space.
#[derive(Debug, Clone)]
pub struct CriticalComponent {
    /// Fundamental-chamber representative of the total velocity ξ.
    pub xi: AlgebraElement,
    /// Sample point m with Φ(m) = exp(ξ), fixed by the ξ-flow.
    pub sample_point: SpacePoint,
    /// The geodesic configuration (exp(ξ/n), …, exp(ξ) = Φ(m)) through m.
    pub config: BrokenConfig,
    /// Critical value |ξ|² (equals the energy of `config`).
    pub value: f64,
    /// Dimension of the centralizer algebra 𝔤^ξ.
    pub centralizer_dim: usize,
    /// Dimension of the isotropy algebra of the whole configuration.
    pub isotropy_dim: usize,
    /// Human-readable description of the component's conjugation orbit.
    pub orbit: String,
}

impl CriticalComponent {
    /// Dimension of the conjugation orbit through the sample configuration.
    pub fn orbit_dim(&self, spec: &GroupSpec) -> usize {
        spec.algebra_dim() - self.isotropy_dim
    }
}

/// Hessian classification of a component at its sample configuration.
#[derive(Debug, Clone)]
pub struct Classification {
    /// Full Hessian spectrum at the sample configuration.
    pub spectrum: HessianSpectrum,
    /// Morse index λ_C: the number of negative Hessian eigenvalues.
    pub index: usize,
    /// Orthonormal basis of the negative eigenspace E_C^−.
    pub negative_basis: Vec<ConfigTangent>,
    /// Largest principal angle of the null eigenspace against T(Σ_C); the
    /// constructor already rejects anything above [`tol::PRINCIPAL_ANGLE`].
    pub null_alignment: f64,
    /// Worst sampled value of f_n − f_n(C) over the minimizing manifold;
    /// the minimum property demands ≥ −[`tol::MIN_DEFICIT`].
    pub min_margin: f64,
    /// Negative-eigenvalue counts at resampled component points.
    pub index_samples: Vec<usize>,
}

impl Classification {
    /// True iff the minimum property and index constancy both held.
    pub fn checks_pass(&self) -> bool {
        self.min_margin >= -tol::MIN_DEFICIT
            && self.index_samples.iter().all(|&i| i == self.index)
    }
}

/// Result of the torus-fixed-point test on the negative eigenspace.
#[derive(Debug, Clone)]
pub struct TorusFixedCheck {
    /// σ_min/(1 + σ_max) of the infinitesimal ξ-rotation restricted to E_C^−.
    pub smallest_scaled_singular: f64,
    /// True when E_C^− is zero-dimensional (nothing to check).
    pub vacuous: bool,
    /// True iff the restricted action has no kernel (or the check is vacuous).
    pub passes: bool,
}

/// Which Poincaré series the built-in table should supply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVariant {
    /// Ordinary cohomology of the component.
    Ordinary,
    /// G-equivariant cohomology of the component.
    GroupEquivariant,
}

/// All critical components with value below the sublevel bound ½nρ̄².
pub fn enumerate_critical(space: &PathSpace) -> Result<Vec<CriticalComponent>> {
    enumerate_critical_scan(space, 1.0)
}

/// Enumeration with the candidate search box inflated by `box_scale` ≥ 1.
/// The component list must not depend on the inflation — every candidate
/// beyond the minimal box fails the sublevel gate — which the finiteness
/// tests probe by doubling the scale.
pub fn enumerate_critical_scan(
    space: &PathSpace,
    box_scale: f64,
) -> Result<Vec<CriticalComponent>> {
    if !(box_scale >= 1.0) || !box_scale.is_finite() {
        return Err(Error::Precondition(format!(
            "search-box scale must be ≥ 1, got {box_scale}"
        )));
    }
    let model = space.model();
    let spec = model.group();
    // Loose candidate prefilter; actual inclusion is the sublevel gate.
    let limit = space.sublevel_bound() * box_scale * box_scale * (1.0 + 1e-6);

    let mut kept_angles: Vec<Vec<f64>> = Vec::new();
    let mut out: Vec<CriticalComponent> = Vec::new();
    let push = |xi: AlgebraElement, m: SpacePoint, out: &mut Vec<CriticalComponent>, kept: &mut Vec<Vec<f64>>| -> Result<()> {
        let angles = spec
            .diag_angles(&xi)
            .ok_or_else(|| Error::Precondition("candidate velocity is not diagonal".into()))?;
        if kept.iter().any(|k| k.iter().zip(&angles).all(|(a, b)| (a - b).abs() < 1e-6)) {
            return Ok(());
        }
        let cfg = space.lattice_config(&xi, m)?;
        if !space.in_sublevel(&cfg) {
            return Ok(());
        }
        let report = space.criticality(&cfg)?;
        if !report.is_critical {
            return Err(Error::Precondition(format!(
                "enumerated candidate fails the criticality check (gradient norm {:.3e})",
                report.gradient_norm
            )));
        }
        kept.push(angles);
        let value = spec.inner(&xi, &xi);
        let centralizer_dim = centralizer_basis(spec, &xi).len();
        let isotropy_dim = config_isotropy_dim(space, &cfg);
        let orbit = orbit_label(space, value, centralizer_dim, isotropy_dim);
        out.push(CriticalComponent {
            sample_point: cfg.base.clone(),
            config: cfg,
            xi,
            value,
            centralizer_dim,
            isotropy_dim,
            orbit,
        });
        Ok(())
    };

    match model.kind() {
        SpaceKind::Point => {
            for xi in lattice_candidates(spec, limit)? {
                push(xi, SpacePoint::Point, &mut out, &mut kept_angles)?;
            }
        }
        SpaceKind::Conjugacy => {
            for xi in class_candidates(spec, &model.base_point(), limit)? {
                let m = SpacePoint::Conjugacy(spec.exp(&xi));
                push(xi, m, &mut out, &mut kept_angles)?;
            }
        }
        SpaceKind::Double => {
            let torus = torus_tuple(spec, 2 * model.genus());
            for xi in lattice_candidates(spec, limit)? {
                push(xi, torus.clone(), &mut out, &mut kept_angles)?;
            }
            for (xi, m) in block_pair_candidates(spec, model.genus(), limit)? {
                push(xi, m, &mut out, &mut kept_angles)?;
            }
        }
    }

    out.sort_by(|a, b| {
        a.value.total_cmp(&b.value).then_with(|| {
            let ka = spec.diag_angles(&a.xi).unwrap_or_default();
            let kb = spec.diag_angles(&b.xi).unwrap_or_default();
            ka.iter()
                .zip(&kb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| !o.is_eq())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(out)
}

/// Orthonormal tangent basis of the minimizing manifold Σ_C = G·Y_n^ξ at the
/// sample configuration: conjugation-orbit directions plus the ξ-fixed
/// directions (interior nodes constrained to ker ad_ξ, base directions in
/// T(M^ξ)). For ξ = 0 the fixed-direction block degenerates to the tangent of
/// the critical set itself: no node variations, base directions in ker dΦ.
pub fn sigma_manifold_basis(
    space: &PathSpace,
    comp: &CriticalComponent,
) -> Result<Vec<ConfigTangent>> {
    let span = sigma_span(space, comp)?;
    Ok((0..span.ncols())
        .map(|j| space.tangent_from_coords(&comp.config, &span.column(j).into_owned()))
        .collect())
}

/// Hessian classification at the sample configuration: index, negative
/// eigenbasis, null-space absorption into Σ_C, the sampled minimum property,
/// and index constancy across resampled component points. A null direction
/// escaping T(Σ_C) is a hard error.
pub fn classify_component<R: Rng + ?Sized>(
    space: &PathSpace,
    comp: &CriticalComponent,
    rng: &mut R,
) -> Result<Classification> {
    let spectrum = space.hessian_matrix(&comp.config)?;
    let index = spectrum.negative;

    let negative_basis: Vec<ConfigTangent> = (0..index)
        .map(|j| {
            space.tangent_from_coords(&comp.config, &spectrum.eigenvectors.column(j).into_owned())
        })
        .collect();

    // Null directions must be absorbed by the minimizing manifold.
    let sigma = sigma_span(space, comp)?;
    let null_alignment = if spectrum.null == 0 {
        0.0
    } else {
        let cols: Vec<RVec> = (index..index + spectrum.null)
            .map(|j| spectrum.eigenvectors.column(j).into_owned())
            .collect();
        linalg::containment_angle(&RMat::from_columns(&cols), &sigma)
    };
    if null_alignment > tol::PRINCIPAL_ANGLE {
        return Err(Error::Precondition(format!(
            "Hessian null space escapes the minimizing manifold (principal angle {:.3e})",
            null_alignment
        )));
    }

    // Minimum property: f_n on Σ_C near C never drops below the critical value.
    let mut min_margin = f64::INFINITY;
    for _ in 0..MIN_SAMPLES {
        let sample = sigma_sample(space, comp, rng, MIN_RADIUS)?;
        min_margin = min_margin.min(space.energy(&sample)? - comp.value);
    }

    // Index constancy across the component.
    let mut index_samples = Vec::with_capacity(INDEX_SAMPLES);
    for _ in 0..INDEX_SAMPLES {
        let cfg = component_sample(space, comp, rng)?;
        index_samples.push(space.hessian_matrix(&cfg)?.negative);
    }

    Ok(Classification {
        spectrum,
        index,
        negative_basis,
        null_alignment,
        min_margin,
        index_samples,
    })
}

/// Torus-fixed-point test for a classified component: the infinitesimal
/// rotation generated by ξ, restricted to E_C^−, must be kernel-free.
pub fn torus_fixed_check(
    space: &PathSpace,
    comp: &CriticalComponent,
    classification: &Classification,
) -> TorusFixedCheck {
    torus_fixed_on(space, &comp.xi, &classification.negative_basis)
}

/// Torus-fixed-point test on an explicit candidate basis of E_C^−. Exposed
/// separately so negative-control fixtures can corrupt the basis.
pub fn torus_fixed_on(
    space: &PathSpace,
    xi: &AlgebraElement,
    negative: &[ConfigTangent],
) -> TorusFixedCheck {
    if negative.is_empty() {
        return TorusFixedCheck { smallest_scaled_singular: 0.0, vacuous: true, passes: true };
    }
    let dim = negative.len();
    let mut action = RMat::zeros(dim, dim);
    for b in 0..dim {
        let rotated = infinitesimal_rotation(space, xi, &negative[b]);
        for a in 0..dim {
            action[(a, b)] = space.tangent_inner(&negative[a], &rotated);
        }
    }
    let smin = linalg::smallest_singular_value(&action);
    let smax = linalg::spectral_norm(&action);
    let scaled = smin / (1.0 + smax);
    TorusFixedCheck {
        smallest_scaled_singular: scaled,
        vacuous: false,
        passes: scaled > tol::TORUS_FIXED_SINGULAR,
    }
}

/// Built-in Poincaré series for the components this library can classify on
/// its own: the point space over SU(2), whose components are a point (ξ = 0)
/// or a 2-sphere orbit. Equivariantly the point carries 1/(1−t⁴) and the
/// sphere G/T carries 1/(1−t²). Everything else returns None and must be
/// supplied by the caller.
pub fn builtin_cohomology(
    model: &QHSpaceModel,
    comp: &CriticalComponent,
    variant: SeriesVariant,
    cap: usize,
) -> Option<MorseSeries> {
    let spec = model.group();
    if model.kind() != SpaceKind::Point || spec.name() != GroupName::Su2 {
        return None;
    }
    let constant = spec.norm(&comp.xi) < 1e-9;
    Some(match (variant, constant) {
        (SeriesVariant::Ordinary, true) => MorseSeries::point(cap),
        (SeriesVariant::Ordinary, false) => MorseSeries::sphere(cap),
        (SeriesVariant::GroupEquivariant, true) => MorseSeries::group_equivariant_point(cap),
        (SeriesVariant::GroupEquivariant, false) => MorseSeries::torus_equivariant_point(cap),
    })
}

/// Valid perfection-comparison degree 4·k_max + 1, where k_max is the largest
/// winding captured by the enumeration: components beyond the sublevel cutoff
/// only contribute above that degree. The winding of a component is read off
/// its velocity norm, |ξ| = 2πk√(2c) on the first lattice shells.
pub fn comparison_degree_cap(spec: &GroupSpec, components: &[CriticalComponent]) -> usize {
    let scale = 2.0 * std::f64::consts::PI * (2.0 * spec.metric_scale()).sqrt();
    let k_max = components
        .iter()
        .map(|c| (spec.norm(&c.xi) / scale).round() as usize)
        .max()
        .unwrap_or(0);
    4 * k_max + 1
}

// ---------------------------------------------------------------------------
// Candidate generation
// ---------------------------------------------------------------------------

/// Chamber representatives of integral-lattice velocities with |ξ|² below
/// `limit`: integer combinations of the lattice basis, sorted into the
/// closed fundamental chamber.
fn lattice_candidates(spec: &GroupSpec, limit: f64) -> Result<Vec<AlgebraElement>> {
    let lattice = spec.torus().lattice_basis();
    let r = lattice.len();
    let mut gram = RMat::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            gram[(i, j)] = spec.inner(&lattice[i], &lattice[j]);
        }
    }
    let (evals, _) = linalg::eig_symmetric_real(&gram);
    let lambda_min = evals[0].max(1e-12);
    let k_max = (limit / lambda_min).sqrt().ceil() as i64;

    let mut out = Vec::new();
    for k in integer_box(r, k_max) {
        let mut xi = spec.zero_algebra();
        for (j, &kj) in k.iter().enumerate() {
            xi = &xi + &(&lattice[j] * kj as f64);
        }
        if spec.inner(&xi, &xi) >= limit {
            continue;
        }
        out.push(chamber_representative(spec, &xi)?);
    }
    Ok(out)
}

/// Chamber representatives with exp(ξ) on the conjugacy class of the base
/// point: diagonal-angle permutations of the class spectrum shifted by 2π
/// integer vectors (zero total shift up to the determinant branch).
fn class_candidates(
    spec: &GroupSpec,
    base: &SpacePoint,
    limit: f64,
) -> Result<Vec<AlgebraElement>> {
    let q = match base {
        SpacePoint::Conjugacy(q) => q,
        _ => {
            return Err(Error::Precondition(
                "class candidates need a conjugacy-class base point".into(),
            ))
        }
    };
    let (thetas, _) = linalg::eig_unitary(q.matrix());
    let nd = spec.matrix_dim();
    let c = spec.metric_scale();
    // Tracelessness: the total 2π-shift must cancel the principal-branch sum.
    let branch_sum: f64 = thetas.iter().sum();
    let required_shift = -(branch_sum / (2.0 * std::f64::consts::PI)).round() as i64;
    let k_max = ((limit / c).sqrt() / (2.0 * std::f64::consts::PI)).ceil() as i64 + 1;

    let mut out = Vec::new();
    for perm in permutations(nd) {
        for k in integer_box(nd, k_max) {
            if k.iter().sum::<i64>() != required_shift {
                continue;
            }
            let angles: Vec<f64> = (0..nd)
                .map(|j| thetas[perm[j]] + 2.0 * std::f64::consts::PI * k[j] as f64)
                .collect();
            let value: f64 = c * angles.iter().map(|a| a * a).sum::<f64>();
            if value >= limit {
                continue;
            }
            let mut m = CMat::zeros(nd, nd);
            for (j, &a) in angles.iter().enumerate() {
                m[(j, j)] = C64::new(0.0, a);
            }
            let xi = spec.algebra_element(m)?;
            out.push(chamber_representative(spec, &xi)?);
        }
    }
    Ok(out)
}

/// Double-space candidates beyond the integral lattice. Nonzero ξ forces all
/// factors into the centralizer Z(ξ), so Φ(m) lands in its commutator
/// subgroup while still matching exp(ξ). For SU(2) that forces Φ(m) = e and ξ
/// integral (covered by the lattice family). SU(3) additionally admits the
/// two-equal-angle patterns y·(1,1,−2) and y·(2,−1,−1) with y an odd multiple
/// of π: exp(ξ) is then −1 on an embedded SU(2) block, which is a commutator
/// of an anticommuting pair inside that block.
fn block_pair_candidates(
    spec: &GroupSpec,
    genus: usize,
    limit: f64,
) -> Result<Vec<(AlgebraElement, SpacePoint)>> {
    if spec.name() != GroupName::Su3 {
        return Ok(Vec::new());
    }
    let c = spec.metric_scale();
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let y = (2 * j + 1) as f64 * std::f64::consts::PI;
        // |diag(iy, iy, −2iy)|² = 6cy² for either pattern.
        if 6.0 * c * y * y >= limit {
            break;
        }
        // Block scalar iy on positions (0,1): angles (y, y, −2y).
        out.push((
            spec.cartan_from_angles(&[y, y])?,
            anticommuting_pair(spec, 0, 1, genus)?,
        ));
        // Block scalar −iy on positions (1,2): angles (2y, −y, −y).
        out.push((
            spec.cartan_from_angles(&[2.0 * y, -y])?,
            anticommuting_pair(spec, 1, 2, genus)?,
        ));
        j += 1;
    }
    Ok(out)
}

/// A genus-h factor tuple whose leading pair anticommutes inside the (p,q)
/// block: the commutator of the embedded Pauli pair (iσ_x, iσ_y) is −1 on
/// the block and +1 on the remaining diagonal entry.
fn anticommuting_pair(
    spec: &GroupSpec,
    p: usize,
    q: usize,
    genus: usize,
) -> Result<SpacePoint> {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let sigma_x = [[C64::new(0.0, 0.0), i], [i, C64::new(0.0, 0.0)]];
    let sigma_y = [[C64::new(0.0, 0.0), one], [-one, C64::new(0.0, 0.0)]];
    let embed = |b: [[C64; 2]; 2]| -> Result<crate::lie::GroupElement> {
        let nd = spec.matrix_dim();
        let mut m = CMat::identity(nd, nd);
        m[(p, p)] = b[0][0];
        m[(p, q)] = b[0][1];
        m[(q, p)] = b[1][0];
        m[(q, q)] = b[1][1];
        spec.group_element(m)
    };
    let mut factors = vec![spec.identity(); 2 * genus];
    factors[0] = embed(sigma_x)?;
    factors[1] = embed(sigma_y)?;
    Ok(SpacePoint::Double(factors))
}

/// Canonical generic torus tuple used as the sample point of lattice
/// components on the double: fixed by every torus flow, with Φ(m) = e.
fn torus_tuple(spec: &GroupSpec, factors: usize) -> SpacePoint {
    let r = spec.rank();
    let elements = (0..factors)
        .map(|j| {
            let angles: Vec<f64> =
                (0..r).map(|t| 0.4 + 0.23 * j as f64 + 0.11 * t as f64).collect();
            spec.exp(&spec.cartan_from_angles(&angles).expect("rank-many angles"))
        })
        .collect();
    SpacePoint::Double(elements)
}

/// Sorted-descending chamber representative of a diagonal velocity.
fn chamber_representative(spec: &GroupSpec, xi: &AlgebraElement) -> Result<AlgebraElement> {
    let mut angles = spec
        .diag_angles(xi)
        .ok_or_else(|| Error::Precondition("chamber reduction needs a diagonal velocity".into()))?;
    angles.sort_by(|a, b| b.total_cmp(a));
    spec.cartan_from_angles(&angles[..spec.rank()])
}

/// All integer vectors of length `r` with entries in [−k_max, k_max].
fn integer_box(r: usize, k_max: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-k_max..=k_max).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// All permutations of {0, …, k−1}.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for shorter in permutations(k - 1) {
        for pos in 0..=shorter.len() {
            let mut p = shorter.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Component geometry
// ---------------------------------------------------------------------------

/// Orthonormal basis of ker ad_ξ (the centralizer algebra 𝔤^ξ).
fn centralizer_basis(spec: &GroupSpec, xi: &AlgebraElement) -> Vec<AlgebraElement> {
    let ad = spec.ad_matrix(xi);
    if ad.norm() < 1e-12 {
        return spec.basis().to_vec();
    }
    let kernel = linalg::null_space(&ad, tol::RANK_REL);
    (0..kernel.ncols())
        .map(|j| spec.from_coords(&kernel.column(j).into_owned()))
        .collect()
}

/// Dimension of {γ : the conjugation vector field of γ vanishes at cfg}.
fn config_isotropy_dim(space: &PathSpace, cfg: &BrokenConfig) -> usize {
    let spec = space.model().group();
    let cols: Vec<RVec> = spec
        .basis()
        .iter()
        .map(|gamma| free_coords(space, cfg, &space.orbit_direction(cfg, gamma)))
        .collect();
    let mat = RMat::from_columns(&cols);
    linalg::null_space(&mat, tol::RANK_REL).ncols()
}

fn orbit_label(
    space: &PathSpace,
    value: f64,
    centralizer_dim: usize,
    isotropy_dim: usize,
) -> String {
    let model = space.model();
    let spec = model.group();
    if model.kind() == SpaceKind::Double && value < 1e-9 {
        return "Φ⁻¹(e)".into();
    }
    if spec.algebra_dim() == isotropy_dim {
        return "point".into();
    }
    let quotient = if centralizer_dim == spec.rank() { "G/T" } else { "G/Z(ξ)" };
    match model.kind() {
        SpaceKind::Double => format!("{quotient} × M^ξ"),
        _ => quotient.to_string(),
    }
}

/// Free coordinates of a tangent vector over the orthonormal configuration
/// basis: interior node coordinates followed by base coefficients.
fn free_coords(space: &PathSpace, cfg: &BrokenConfig, eta: &ConfigTangent) -> RVec {
    let model = space.model();
    let spec = model.group();
    let d = spec.algebra_dim();
    let n = space.node_count();
    let m_basis = model.tangent_basis(&cfg.base);
    let mut v = RVec::zeros((n - 1) * d + m_basis.len());
    for i in 0..n - 1 {
        v.rows_mut(i * d, d).copy_from(&spec.coords(&eta.node_dirs[i]));
    }
    for (j, b) in m_basis.iter().enumerate() {
        v[(n - 1) * d + j] = model.tangent_inner(&eta.base_dir, b);
    }
    v
}

/// Orthonormal coordinate span of T(Σ_C) at the sample configuration.
fn sigma_span(space: &PathSpace, comp: &CriticalComponent) -> Result<RMat> {
    let model = space.model();
    let spec = model.group();
    let cfg = &comp.config;
    let n = space.node_count();
    let mut generators: Vec<RVec> = Vec::new();

    for gamma in spec.basis() {
        generators.push(free_coords(space, cfg, &space.orbit_direction(cfg, gamma)));
    }

    if spec.norm(&comp.xi) < 1e-9 {
        // Minimum component: the fixed block is the tangent of the critical
        // set itself — constant nodes, base directions in ker dΦ.
        for y in moment_kernel_tangents(model, &cfg.base) {
            let zeros = vec![spec.zero_algebra(); n - 1];
            generators.push(free_coords(space, cfg, &space.tangent(cfg, zeros, y)));
        }
    } else {
        let kernel = centralizer_basis(spec, &comp.xi);
        for slot in 0..n - 1 {
            for w in &kernel {
                let mut interior = vec![spec.zero_algebra(); n - 1];
                interior[slot] = w.clone();
                let eta = space.tangent(cfg, interior, model.zero_tangent(&cfg.base));
                generators.push(free_coords(space, cfg, &eta));
            }
        }
        for y in model.fixed_set_tangent(&cfg.base, &comp.xi)? {
            let zeros = vec![spec.zero_algebra(); n - 1];
            generators.push(free_coords(space, cfg, &space.tangent(cfg, zeros, y)));
        }
    }

    let mat = RMat::from_columns(&generators);
    Ok(linalg::column_span(&mat, tol::RANK_REL))
}

/// Tangent directions spanning ker dΦ at a point of the zero-level set.
fn moment_kernel_tangents(model: &QHSpaceModel, m: &SpacePoint) -> Vec<SpaceTangent> {
    let m_basis = model.tangent_basis(m);
    if m_basis.is_empty() {
        return Vec::new();
    }
    let spec = model.group();
    let cols: Vec<RVec> =
        m_basis.iter().map(|y| spec.coords(&model.moment_diff(m, y))).collect();
    let mat = RMat::from_columns(&cols);
    let kernel = linalg::null_space(&mat, tol::RANK_REL);
    (0..kernel.ncols())
        .map(|j| model.combine(&m_basis, &kernel.column(j).into_owned()))
        .collect()
}

/// Random coefficient combination of an algebra basis.
fn algebra_combo<R: Rng + ?Sized>(
    spec: &GroupSpec,
    basis: &[AlgebraElement],
    rng: &mut R,
    scale: f64,
) -> AlgebraElement {
    let mut x = spec.zero_algebra();
    for b in basis {
        x = &x + &(b * rng.random_range(-scale..=scale));
    }
    x
}

/// Exact sample of the minimizing manifold within roughly `radius` of the
/// sample configuration: ξ-commuting node factors, a base move inside M^ξ
/// (along ker dΦ for the minimum component), and a global conjugation. All
/// moves are group multiplications, so the sample lies on Σ_C to machine
/// precision — the minimum property is a statement about exact values, not a
/// first-order approximation.
fn sigma_sample<R: Rng + ?Sized>(
    space: &PathSpace,
    comp: &CriticalComponent,
    rng: &mut R,
    radius: f64,
) -> Result<BrokenConfig> {
    let model = space.model();
    let spec = model.group();
    let cfg = &comp.config;
    let n = space.node_count();
    let scale = radius / (n as f64).sqrt();

    let minimum = spec.norm(&comp.xi) < 1e-9;
    let mut nodes = cfg.nodes.clone();
    let base = if minimum {
        let kernel = moment_kernel_tangents(model, &cfg.base);
        if kernel.is_empty() {
            cfg.base.clone()
        } else {
            let mut y = model.zero_tangent(&cfg.base);
            for k in &kernel {
                y = model.tangent_add(&y, &model.tangent_scale(k, rng.random_range(-scale..=scale)));
            }
            model.retract(&cfg.base, &y, 1.0)
        }
    } else {
        let kernel = centralizer_basis(spec, &comp.xi);
        for node in nodes.iter_mut().take(n - 1) {
            let x = algebra_combo(spec, &kernel, rng, scale);
            *node = node.mul(&spec.exp(&x));
        }
        match &cfg.base {
            SpacePoint::Point => SpacePoint::Point,
            SpacePoint::Conjugacy(q) => {
                let w = algebra_combo(spec, &kernel, rng, scale);
                SpacePoint::Conjugacy(q.conjugated_by(&spec.exp(&w)))
            }
            SpacePoint::Double(xs) => SpacePoint::Double(
                xs.iter()
                    .map(|x| x.mul(&spec.exp(&algebra_combo(spec, &kernel, rng, scale))))
                    .collect(),
            ),
        }
    };
    nodes[n - 1] = model.moment(&base);
    let sample = space.config(nodes, base)?;
    let g = spec.exp(&spec.random_algebra(rng, scale));
    Ok(space.act(&g, &sample))
}

/// A fresh point of the critical component itself: an intra-component move of
/// the base point followed by a global conjugation. Base moves must preserve
/// Φ(m) = exp(ξ); torus translations are tried first and verified, falling
/// back to conjugation by a centralizer element (which always preserves the
/// moment value since exp(ξ) is central in Z(ξ) on every shipped family).
fn component_sample<R: Rng + ?Sized>(
    space: &PathSpace,
    comp: &CriticalComponent,
    rng: &mut R,
) -> Result<BrokenConfig> {
    let model = space.model();
    let spec = model.group();
    let target = spec.exp(&comp.xi);

    let translated = match &comp.sample_point {
        SpacePoint::Double(xs) => {
            let cartan = spec.torus().cartan_basis().to_vec();
            let moved = SpacePoint::Double(
                xs.iter()
                    .map(|x| x.mul(&spec.exp(&algebra_combo(spec, &cartan, rng, 0.4))))
                    .collect(),
            );
            (model.moment(&moved).frobenius_distance(&target) < 1e-9).then_some(moved)
        }
        _ => None,
    };
    let base = match translated {
        Some(moved) => moved,
        None => {
            let kernel = centralizer_basis(spec, &comp.xi);
            let g = spec.exp(&algebra_combo(spec, &kernel, rng, 0.4));
            match &comp.sample_point {
                SpacePoint::Point => SpacePoint::Point,
                SpacePoint::Conjugacy(q) => SpacePoint::Conjugacy(q.conjugated_by(&g)),
                SpacePoint::Double(xs) => {
                    SpacePoint::Double(xs.iter().map(|x| x.conjugated_by(&g)).collect())
                }
            }
        }
    };
    let cfg = space.lattice_config(&comp.xi, base)?;
    let g = spec.random_group(rng, 0.8);
    Ok(space.act(&g, &cfg))
}

/// Generator of the torus flow on configuration tangents at a ξ-fixed
/// configuration: componentwise bracket with ξ.
fn infinitesimal_rotation(
    space: &PathSpace,
    xi: &AlgebraElement,
    eta: &ConfigTangent,
) -> ConfigTangent {
    let spec = space.model().group();
    ConfigTangent {
        node_dirs: eta.node_dirs.iter().map(|x| spec.bracket(xi, x)).collect(),
        base_dir: match &eta.base_dir {
            SpaceTangent::Point => SpaceTangent::Point,
            SpaceTangent::Conjugacy(w) => SpaceTangent::Conjugacy(spec.bracket(xi, w)),
            SpaceTangent::Double(ws) => {
                SpaceTangent::Double(ws.iter().map(|w| spec.bracket(xi, w)).collect())
            }
        },
    }
}

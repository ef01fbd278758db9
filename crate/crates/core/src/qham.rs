//! Group-valued moment-map spaces: the one-point space, conjugacy classes
//! Φ = inclusion, and genus-h "double" spaces Φ(a,b) = Π[a_i,b_i], together
//! with their G-actions, closed-form moment differentials, tangent bases,
//! ξ-fixed sets, the moment Hessian H^ξΦ, and numerical verifiers of the
//! structural identities these spaces satisfy.
//!
//! Tangent vectors are left-trivialized per group factor; conjugacy-class
//! tangents are the subspace im(Ad_{q⁻¹} − 1) ⊂ 𝔤 at the point q.

use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, GroupElement, GroupSpec};
use crate::linalg::{self, C64, CMat, RMat, RVec};
use crate::tol;
use rand::Rng;
use std::f64::consts::TAU;

/// Space selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SpaceKind {
    Point,
    Conjugacy,
    Double,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Point => "point",
            SpaceKind::Conjugacy => "conjugacy",
            SpaceKind::Double => "double",
        }
    }
}

/// A point of the model space.
#[derive(Debug, Clone)]
pub enum SpacePoint {
    Point,
    /// A group element lying on the defining conjugacy class.
    Conjugacy(GroupElement),
    /// Factors (a_1,…,a_h, b_1,…,b_h).
    Double(Vec<GroupElement>),
}

/// A tangent vector at a [`SpacePoint`], left-trivialized per factor.
#[derive(Debug, Clone)]
pub enum SpaceTangent {
    Point,
    Conjugacy(AlgebraElement),
    Double(Vec<AlgebraElement>),
}

/// Report of a subspace comparison (image identities).
#[derive(Debug, Clone)]
pub struct SubspaceReport {
    pub computed_dim: usize,
    pub expected_dim: usize,
    pub max_principal_angle: f64,
    pub pass: bool,
}

/// Report of the kernel-containment check for H^ξΦ.
#[derive(Debug, Clone)]
pub struct NondegReport {
    pub kernel_dim: usize,
    pub fixed_dim: usize,
    pub containment_angle: f64,
    pub pass: bool,
}

/// A moment-map space (M, Φ) with its G-action by simultaneous conjugation.
#[derive(Debug, Clone)]
pub struct QHSpaceModel {
    spec: GroupSpec,
    kind: SpaceKind,
    /// Conjugacy class: canonical eigenangles of the class (ascending) and a
    /// base representative.
    class_angles: Vec<f64>,
    class_base: Option<GroupElement>,
    /// Double: number of handle pairs h ≥ 1.
    genus: usize,
}

impl QHSpaceModel {
    /// The one-point space with Φ ≡ e.
    pub fn point(spec: GroupSpec) -> QHSpaceModel {
        QHSpaceModel { spec, kind: SpaceKind::Point, class_angles: Vec::new(), class_base: None, genus: 0 }
    }

    /// The conjugacy class through exp(eta) with Φ the inclusion into G.
    pub fn conjugacy(spec: GroupSpec, eta: &AlgebraElement) -> Result<QHSpaceModel> {
        let base = spec.exp(eta);
        let (mut angles, _) = linalg::eig_unitary(base.matrix());
        angles.sort_by(|a, b| a.total_cmp(b));
        Ok(QHSpaceModel {
            spec,
            kind: SpaceKind::Conjugacy,
            class_angles: angles,
            class_base: Some(base),
            genus: 0,
        })
    }

    /// The genus-h double G^{2h} with Φ(a,b) = Π[a_i,b_i].
    pub fn double(spec: GroupSpec, genus: usize) -> Result<QHSpaceModel> {
        if genus == 0 {
            return Err(Error::Precondition("double space needs genus ≥ 1".into()));
        }
        Ok(QHSpaceModel { spec, kind: SpaceKind::Double, class_angles: Vec::new(), class_base: None, genus })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Canonical base point: the class representative, the identity tuple, or
    /// the unique point.
    pub fn base_point(&self) -> SpacePoint {
        match self.kind {
            SpaceKind::Point => SpacePoint::Point,
            SpaceKind::Conjugacy => {
                SpacePoint::Conjugacy(self.class_base.as_ref().expect("class base").clone())
            }
            SpaceKind::Double => {
                SpacePoint::Double(vec![self.spec.identity(); 2 * self.genus])
            }
        }
    }

    /// Manifold dimension of M.
    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::Point => 0,
            SpaceKind::Conjugacy => {
                let base = self.class_base.as_ref().expect("class base");
                self.spec.algebra_dim() - self.spec.stabilizer_algebra(base).len()
            }
            SpaceKind::Double => 2 * self.genus * self.spec.algebra_dim(),
        }
    }

    /// Number of ambient tangent coordinates (factors × algebra dimension).
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            SpaceKind::Point => 0,
            SpaceKind::Conjugacy => self.spec.algebra_dim(),
            SpaceKind::Double => 2 * self.genus * self.spec.algebra_dim(),
        }
    }

    /// Validate a point (factor count, class membership by spectrum).
    pub fn validate_point(&self, m: &SpacePoint) -> Result<()> {
        match (self.kind, m) {
            (SpaceKind::Point, SpacePoint::Point) => Ok(()),
            (SpaceKind::Conjugacy, SpacePoint::Conjugacy(q)) => {
                let (mut angles, _) = linalg::eig_unitary(q.matrix());
                angles.sort_by(|a, b| a.total_cmp(b));
                let drift = circular_match_cost(&angles, &self.class_angles);
                if drift > tol::ELEMENT_VALIDATE {
                    return Err(Error::Precondition(format!(
                        "point is off the conjugacy class (spectral drift {drift:.3e})"
                    )));
                }
                Ok(())
            }
            (SpaceKind::Double, SpacePoint::Double(xs)) => {
                if xs.len() != 2 * self.genus {
                    return Err(Error::Precondition(format!(
                        "double point needs {} factors, got {}",
                        2 * self.genus,
                        xs.len()
                    )));
                }
                Ok(())
            }
            _ => Err(Error::Precondition("point kind does not match the space".into())),
        }
    }

    /// The moment map Φ.
    pub fn moment(&self, m: &SpacePoint) -> GroupElement {
        match (self.kind, m) {
            (SpaceKind::Point, _) => self.spec.identity(),
            (SpaceKind::Conjugacy, SpacePoint::Conjugacy(q)) => q.clone(),
            (SpaceKind::Double, SpacePoint::Double(xs)) => {
                let h = self.genus;
                let mut acc = self.spec.identity();
                for i in 0..h {
                    acc = acc.mul(&commutator(&xs[i], &xs[h + i]));
                }
                acc
            }
            _ => panic!("point kind does not match the space"),
        }
    }

    /// Left-trivialized differential Φ(m)⁻¹·Φ_*(Y), in closed form.
    pub fn moment_diff(&self, m: &SpacePoint, y: &SpaceTangent) -> AlgebraElement {
        match (self.kind, m, y) {
            (SpaceKind::Point, _, _) => self.spec.zero_algebra(),
            (SpaceKind::Conjugacy, SpacePoint::Conjugacy(_), SpaceTangent::Conjugacy(w)) => {
                // Φ is the inclusion; the left-trivialized differential is the
                // identity on the tangent subspace.
                w.clone()
            }
            (SpaceKind::Double, SpacePoint::Double(xs), SpaceTangent::Double(ys)) => {
                let h = self.genus;
                // Φ = c_1···c_h with c_i = [a_i,b_i]:
                // Φ⁻¹Φ̇ = Σ_i Ad_{(c_{i+1}···c_h)⁻¹}(c_i⁻¹ċ_i).
                let blocks: Vec<AlgebraElement> = (0..h)
                    .map(|i| {
                        commutator_diff(&self.spec, &xs[i], &xs[h + i], &ys[i], &ys[h + i])
                    })
                    .collect();
                let mut total = self.spec.zero_algebra();
                let mut suffix = self.spec.identity(); // c_{i+1}···c_h, built backwards
                for i in (0..h).rev() {
                    total = &total + &self.spec.adjoint(&suffix.inverse(), &blocks[i]);
                    suffix = commutator(&xs[i], &xs[h + i]).mul(&suffix);
                }
                total
            }
            _ => panic!("tangent kind does not match the space"),
        }
    }

    /// Diagonal conjugation action g·m.
    pub fn act(&self, g: &GroupElement, m: &SpacePoint) -> SpacePoint {
        match m {
            SpacePoint::Point => SpacePoint::Point,
            SpacePoint::Conjugacy(q) => SpacePoint::Conjugacy(q.conjugated_by(g)),
            SpacePoint::Double(xs) => {
                SpacePoint::Double(xs.iter().map(|x| x.conjugated_by(g)).collect())
            }
        }
    }

    /// Action on tangents: left-trivialized coordinates transform by Ad_g.
    pub fn act_tangent(&self, g: &GroupElement, y: &SpaceTangent) -> SpaceTangent {
        match y {
            SpaceTangent::Point => SpaceTangent::Point,
            SpaceTangent::Conjugacy(w) => SpaceTangent::Conjugacy(self.spec.adjoint(g, w)),
            SpaceTangent::Double(ys) => {
                SpaceTangent::Double(ys.iter().map(|w| self.spec.adjoint(g, w)).collect())
            }
        }
    }

    /// Induced vector field of the action: γ^M(m) = d/ds exp(sγ)·m at s = 0.
    pub fn orbit_tangent(&self, m: &SpacePoint, gamma: &AlgebraElement) -> SpaceTangent {
        let pull = |x: &GroupElement| -> AlgebraElement {
            &self.spec.adjoint(&x.inverse(), gamma) - gamma
        };
        match m {
            SpacePoint::Point => SpaceTangent::Point,
            SpacePoint::Conjugacy(q) => SpaceTangent::Conjugacy(pull(q)),
            SpacePoint::Double(xs) => SpaceTangent::Double(xs.iter().map(pull).collect()),
        }
    }

    pub fn zero_tangent(&self, m: &SpacePoint) -> SpaceTangent {
        match m {
            SpacePoint::Point => SpaceTangent::Point,
            SpacePoint::Conjugacy(_) => SpaceTangent::Conjugacy(self.spec.zero_algebra()),
            SpacePoint::Double(xs) => {
                SpaceTangent::Double(vec![self.spec.zero_algebra(); xs.len()])
            }
        }
    }

    /// Product metric on tangents (each factor carries the algebra metric).
    pub fn tangent_inner(&self, y1: &SpaceTangent, y2: &SpaceTangent) -> f64 {
        match (y1, y2) {
            (SpaceTangent::Point, SpaceTangent::Point) => 0.0,
            (SpaceTangent::Conjugacy(a), SpaceTangent::Conjugacy(b)) => self.spec.inner(a, b),
            (SpaceTangent::Double(a), SpaceTangent::Double(b)) => {
                a.iter().zip(b.iter()).map(|(x, y)| self.spec.inner(x, y)).sum()
            }
            _ => panic!("tangent kinds do not match"),
        }
    }

    pub fn tangent_norm(&self, y: &SpaceTangent) -> f64 {
        self.tangent_inner(y, y).max(0.0).sqrt()
    }

    pub fn tangent_add(&self, y1: &SpaceTangent, y2: &SpaceTangent) -> SpaceTangent {
        match (y1, y2) {
            (SpaceTangent::Point, SpaceTangent::Point) => SpaceTangent::Point,
            (SpaceTangent::Conjugacy(a), SpaceTangent::Conjugacy(b)) => {
                SpaceTangent::Conjugacy(a + b)
            }
            (SpaceTangent::Double(a), SpaceTangent::Double(b)) => {
                SpaceTangent::Double(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect())
            }
            _ => panic!("tangent kinds do not match"),
        }
    }

    pub fn tangent_scale(&self, y: &SpaceTangent, s: f64) -> SpaceTangent {
        match y {
            SpaceTangent::Point => SpaceTangent::Point,
            SpaceTangent::Conjugacy(a) => SpaceTangent::Conjugacy(a * s),
            SpaceTangent::Double(a) => SpaceTangent::Double(a.iter().map(|x| x * s).collect()),
        }
    }

    /// Ambient coordinates: concatenated algebra coordinates per factor.
    pub fn tangent_to_ambient(&self, y: &SpaceTangent) -> RVec {
        match y {
            SpaceTangent::Point => RVec::zeros(0),
            SpaceTangent::Conjugacy(w) => self.spec.coords(w),
            SpaceTangent::Double(ys) => {
                let d = self.spec.algebra_dim();
                let mut v = RVec::zeros(d * ys.len());
                for (i, w) in ys.iter().enumerate() {
                    v.rows_mut(i * d, d).copy_from(&self.spec.coords(w));
                }
                v
            }
        }
    }

    /// Inverse of [`Self::tangent_to_ambient`]; for the conjugacy class the
    /// vector is orthogonally projected onto the tangent subspace at m.
    pub fn tangent_from_ambient(&self, m: &SpacePoint, v: &RVec) -> SpaceTangent {
        match (self.kind, m) {
            (SpaceKind::Point, _) => SpaceTangent::Point,
            (SpaceKind::Conjugacy, SpacePoint::Conjugacy(q)) => {
                SpaceTangent::Conjugacy(self.project_class_tangent(q, &self.spec.from_coords(v)))
            }
            (SpaceKind::Double, SpacePoint::Double(xs)) => {
                let d = self.spec.algebra_dim();
                SpaceTangent::Double(
                    (0..xs.len())
                        .map(|i| self.spec.from_coords(&v.rows(i * d, d).into_owned()))
                        .collect(),
                )
            }
            _ => panic!("point kind does not match the space"),
        }
    }

    /// Orthogonal projection onto the class tangent im(Ad_{q⁻¹} − 1) = the
    /// orthocomplement of the commutant 𝔤^q, done spectrally in the
    /// eigenframe of q: the commutant is the block of entries whose
    /// eigenangle difference vanishes, so subtracting that block is exact in
    /// a way a singular-value split of Ad_{q⁻¹} − 1 (with its degenerate
    /// singular pairs) is not.
    fn project_class_tangent(&self, q: &GroupElement, w: &AlgebraElement) -> AlgebraElement {
        let (angles, v) = linalg::eig_unitary(q.matrix());
        let mut hat = v.adjoint() * w.matrix() * &v;
        let n = hat.nrows();
        for j in 0..n {
            for l in 0..n {
                if circular_distance(angles[j], angles[l]) < 1e-7 {
                    hat[(j, l)] = C64::new(0.0, 0.0);
                }
            }
        }
        AlgebraElement::from_matrix_unchecked(&v * hat * v.adjoint())
    }

    /// Orthonormal columns spanning the left-trivialized class tangent
    /// im(Ad_{q⁻¹} − 1) at q, in algebra coordinates.
    fn class_tangent_span(&self, q: &GroupElement) -> RMat {
        let d = self.spec.algebra_dim();
        let a = self.spec.adjoint_matrix(&q.inverse()) - RMat::identity(d, d);
        robust_span(&a)
    }

    /// Orthonormal basis of T_mM.
    pub fn tangent_basis(&self, m: &SpacePoint) -> Vec<SpaceTangent> {
        match (self.kind, m) {
            (SpaceKind::Point, _) => Vec::new(),
            (SpaceKind::Conjugacy, SpacePoint::Conjugacy(q)) => {
                let span = self.class_tangent_span(q);
                (0..span.ncols())
                    .map(|j| {
                        SpaceTangent::Conjugacy(self.spec.from_coords(&span.column(j).into_owned()))
                    })
                    .collect()
            }
            (SpaceKind::Double, SpacePoint::Double(xs)) => {
                let mut out = Vec::with_capacity(xs.len() * self.spec.algebra_dim());
                for slot in 0..xs.len() {
                    for b in self.spec.basis() {
                        let mut ys = vec![self.spec.zero_algebra(); xs.len()];
                        ys[slot] = b.clone();
                        out.push(SpaceTangent::Double(ys));
                    }
                }
                out
            }
            _ => panic!("point kind does not match the space"),
        }
    }

    /// Random tangent: coordinates uniform in [−scale, scale] over the
    /// orthonormal tangent basis.
    pub fn random_tangent<R: Rng + ?Sized>(
        &self,
        m: &SpacePoint,
        rng: &mut R,
        scale: f64,
    ) -> SpaceTangent {
        let mut acc = self.zero_tangent(m);
        for e in self.tangent_basis(m) {
            acc = self.tangent_add(&acc, &self.tangent_scale(&e, rng.random_range(-scale..=scale)));
        }
        acc
    }

    /// Move from m along the tangent Y for time t, staying on M: factor-wise
    /// x·exp(tY) on the double, conjugation flow on the class.
    pub fn retract(&self, m: &SpacePoint, y: &SpaceTangent, t: f64) -> SpacePoint {
        match (m, y) {
            (SpacePoint::Point, _) => SpacePoint::Point,
            (SpacePoint::Conjugacy(q), SpaceTangent::Conjugacy(w)) => {
                let v = self.conjugation_generator(q, w);
                let u = self.spec.exp(&(&v * t));
                SpacePoint::Conjugacy(q.conjugated_by(&u))
            }
            (SpacePoint::Double(xs), SpaceTangent::Double(ys)) => SpacePoint::Double(
                xs.iter()
                    .zip(ys.iter())
                    .map(|(x, w)| x.mul(&self.spec.exp(&(w * t))))
                    .collect(),
            ),
            _ => panic!("tangent kind does not match the space"),
        }
    }

    /// Least-norm v with (Ad_{q⁻¹} − 1)v = w, i.e. the conjugation generator
    /// whose flow e^{tv}·q·e^{−tv} has left-trivialized velocity w at t = 0.
    fn conjugation_generator(&self, q: &GroupElement, w: &AlgebraElement) -> AlgebraElement {
        let d = self.spec.algebra_dim();
        let a = self.spec.adjoint_matrix(&q.inverse()) - RMat::identity(d, d);
        let v = linalg::lstsq(&a, &self.spec.coords(w), tol::RANK_REL);
        self.spec.from_coords(&v)
    }

    /// Project a drifted group element back onto the class by restoring the
    /// canonical eigenangles (nearest circular assignment).
    pub fn project_to_class(&self, g: &GroupElement) -> Result<GroupElement> {
        if self.kind != SpaceKind::Conjugacy {
            return Err(Error::Precondition("projection applies to the conjugacy class".into()));
        }
        let (angles, v) = linalg::eig_unitary(g.matrix());
        let mut order: Vec<usize> = (0..angles.len()).collect();
        order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]));
        let assignment = best_circular_assignment(
            &order.iter().map(|&i| angles[i]).collect::<Vec<_>>(),
            &self.class_angles,
        );
        let n = angles.len();
        let mut target = vec![0.0f64; n];
        for (sorted_pos, &col) in order.iter().enumerate() {
            target[col] = self.class_angles[assignment[sorted_pos]];
        }
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            target.iter().map(|&t| C64::new(0.0, t).exp()),
        ));
        self.spec.group_element(&v * diag * v.adjoint())
    }

    /// Whether m is fixed by the flow exp(tξ): every factor commutes with ξ.
    pub fn is_fixed_by(&self, m: &SpacePoint, xi: &AlgebraElement) -> bool {
        let commutes = |x: &GroupElement| -> bool {
            (xi.matrix() * x.matrix() - x.matrix() * xi.matrix()).norm()
                < tol::FIXED_SET * (1.0 + xi.matrix().norm())
        };
        match m {
            SpacePoint::Point => true,
            SpacePoint::Conjugacy(q) => commutes(q),
            SpacePoint::Double(xs) => xs.iter().all(commutes),
        }
    }

    /// Orthonormal basis of T_m(M^ξ), the tangent space to the ξ-fixed set:
    /// factor-wise ker(ad_ξ) on the double, conjugation directions generated
    /// by the ξ-centralizer on the class.
    pub fn fixed_set_tangent(
        &self,
        m: &SpacePoint,
        xi: &AlgebraElement,
    ) -> Result<Vec<SpaceTangent>> {
        if !self.is_fixed_by(m, xi) {
            return Err(Error::Precondition(
                "point is not fixed by the ξ-flow".into(),
            ));
        }
        let d = self.spec.algebra_dim();
        let ad = self.spec.ad_matrix(xi);
        let kernel = if ad.norm() < 1e-12 {
            RMat::identity(d, d)
        } else {
            linalg::null_space(&ad, tol::RANK_REL)
        };
        match m {
            SpacePoint::Point => Ok(Vec::new()),
            SpacePoint::Conjugacy(q) => {
                // Directions (Ad_{q⁻¹} − 1)v with v in the ξ-centralizer.
                let a = self.spec.adjoint_matrix(&q.inverse()) - RMat::identity(d, d);
                let image = &a * &kernel;
                let span = robust_span(&image);
                Ok((0..span.ncols())
                    .map(|j| {
                        SpaceTangent::Conjugacy(self.spec.from_coords(&span.column(j).into_owned()))
                    })
                    .collect())
            }
            SpacePoint::Double(xs) => {
                let mut out = Vec::new();
                for slot in 0..xs.len() {
                    for j in 0..kernel.ncols() {
                        let mut ys = vec![self.spec.zero_algebra(); xs.len()];
                        ys[slot] = self.spec.from_coords(&kernel.column(j).into_owned());
                        out.push(SpaceTangent::Double(ys));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Isotropy algebra of m under the conjugation action: all γ whose
    /// induced vector field vanishes at m (every factor centralizes γ).
    pub fn isotropy_algebra(&self, m: &SpacePoint) -> Vec<AlgebraElement> {
        let d = self.spec.algebra_dim();
        let factors: Vec<&GroupElement> = match m {
            SpacePoint::Point => return self.spec.basis().to_vec(),
            SpacePoint::Conjugacy(q) => vec![q],
            SpacePoint::Double(xs) => xs.iter().collect(),
        };
        let mut stacked = RMat::zeros(d * factors.len(), d);
        for (i, x) in factors.iter().enumerate() {
            let a = self.spec.adjoint_matrix(&x.inverse()) - RMat::identity(d, d);
            stacked.view_mut((i * d, 0), (d, d)).copy_from(&a);
        }
        if stacked.norm() < 1e-12 {
            return self.spec.basis().to_vec();
        }
        let kernel = linalg::null_space(&stacked, tol::RANK_REL);
        (0..kernel.ncols())
            .map(|j| self.spec.from_coords(&kernel.column(j).into_owned()))
            .collect()
    }

    /// The moment Hessian H^ξΦ(Y, Y′) = ⟨(D/Ds)(∂/∂t)Φ(α(s,t))|₀, ξ⟩ at a
    /// ξ-fixed point with Φ(m) = exp(ξ), by nested central differences with
    /// one Richardson step; the Levi-Civita derivative is realized as the
    /// average of the left- and right-trivialized s-derivatives (both
    /// pairings use the same ξ since Ad_{exp ξ}ξ = ξ).
    pub fn hessian_moment(
        &self,
        m: &SpacePoint,
        xi: &AlgebraElement,
        y: &SpaceTangent,
        yp: &SpaceTangent,
    ) -> Result<f64> {
        self.check_hessian_preconditions(m, xi)?;
        if matches!(self.kind, SpaceKind::Point) {
            return Ok(0.0);
        }
        let d_of = |delta: f64| -> f64 {
            let g = |s: f64| self.t_derivative_pairing(m, xi, y, yp, s);
            (g(delta) - g(-delta)) / (2.0 * delta)
        };
        let h = tol::FD_STEP;
        // Richardson: (4·D(h/2) − D(h)) / 3 kills the O(h²) term.
        Ok((4.0 * d_of(h / 2.0) - d_of(h)) / 3.0)
    }

    /// ½(⟨F⁻¹∂_tF, ξ⟩ + ⟨∂_tF·F⁻¹, ξ⟩) at parameter s along the Y-variation.
    /// The t-derivative is evaluated through the closed-form differential at
    /// the displaced base point (with Y′ projected onto its tangent space, as
    /// the retraction there realizes), keeping the outer difference quotient
    /// free of nested-step noise.
    fn t_derivative_pairing(
        &self,
        m: &SpacePoint,
        xi: &AlgebraElement,
        y: &SpaceTangent,
        yp: &SpaceTangent,
        s: f64,
    ) -> f64 {
        let base = self.retract(m, y, s);
        let yp_base = self.tangent_from_ambient(&base, &self.tangent_to_ambient(yp));
        let left = self.moment_diff(&base, &yp_base);
        let right = self.spec.adjoint(&self.moment(&base), &left);
        0.5 * (self.spec.inner(&left, xi) + self.spec.inner(&right, xi))
    }

    fn check_hessian_preconditions(&self, m: &SpacePoint, xi: &AlgebraElement) -> Result<()> {
        if !self.is_fixed_by(m, xi) {
            return Err(Error::Precondition("H^ξΦ requires a ξ-fixed point".into()));
        }
        let target = self.spec.exp(xi);
        let drift = self.moment(m).frobenius_distance(&target);
        if drift > tol::FIXED_SET {
            return Err(Error::Precondition(format!(
                "H^ξΦ requires Φ(m) = exp(ξ) (drift {drift:.3e})"
            )));
        }
        // ξ must be perpendicular to the image of Φ_*.
        let scale = self.spec.norm(xi).max(1.0);
        for e in self.tangent_basis(m) {
            let p = self.spec.inner(xi, &self.moment_diff(m, &e));
            if p.abs() > tol::FIXED_SET * scale {
                return Err(Error::Precondition(format!(
                    "ξ is not perpendicular to im Φ_* (pairing {p:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// Check Φ(m)⁻¹·Φ_*(T_mM) = 𝔥^⊥ with 𝔥 the isotropy algebra of m:
    /// subspace equality via ranks and the largest principal angle.
    pub fn verify_first_order_image(&self, m: &SpacePoint) -> SubspaceReport {
        let d = self.spec.algebra_dim();
        let image_cols: Vec<AlgebraElement> = self
            .tangent_basis(m)
            .iter()
            .map(|e| self.moment_diff(m, e))
            .collect();
        let image = if image_cols.is_empty() {
            RMat::zeros(d, 0)
        } else {
            robust_span(&self.spec.coords_matrix(&image_cols))
        };
        let stab = self.isotropy_algebra(m);
        let stab_mat = self.spec.coords_matrix(&stab);
        let perp = if stab.len() == d {
            RMat::zeros(d, 0)
        } else if stab.is_empty() {
            RMat::identity(d, d)
        } else {
            linalg::null_space(&stab_mat.transpose(), tol::RANK_REL)
        };
        let angle = subspace_angle(&image, &perp);
        SubspaceReport {
            computed_dim: image.ncols(),
            expected_dim: perp.ncols(),
            max_principal_angle: angle,
            pass: image.ncols() == perp.ncols() && angle < tol::PRINCIPAL_ANGLE,
        }
    }

    /// Check Φ(m)⁻¹·Φ_*(T_mM^ξ) = 𝔥^⊥ ∩ 𝔤^ξ at a ξ-fixed point.
    pub fn verify_fixed_image(&self, m: &SpacePoint, xi: &AlgebraElement) -> Result<SubspaceReport> {
        let d = self.spec.algebra_dim();
        let fixed = self.fixed_set_tangent(m, xi)?;
        let image_cols: Vec<AlgebraElement> =
            fixed.iter().map(|e| self.moment_diff(m, e)).collect();
        let image = if image_cols.is_empty() {
            RMat::zeros(d, 0)
        } else {
            robust_span(&self.spec.coords_matrix(&image_cols))
        };
        // 𝔥^⊥ ∩ 𝔤^ξ: x with ⟨x, h⟩ = 0 for h in the isotropy algebra and
        // [ξ, x] = 0 — the joint null space of the stacked constraints.
        let stab = self.isotropy_algebra(m);
        let ad = self.spec.ad_matrix(xi);
        let mut rows = RMat::zeros(stab.len() + d, d);
        rows.view_mut((0, 0), (stab.len(), d))
            .copy_from(&self.spec.coords_matrix(&stab).transpose());
        rows.view_mut((stab.len(), 0), (d, d)).copy_from(&ad);
        let expected = linalg::null_space(&rows, tol::RANK_REL);
        let angle = subspace_angle(&image, &expected);
        Ok(SubspaceReport {
            computed_dim: image.ncols(),
            expected_dim: expected.ncols(),
            max_principal_angle: angle,
            pass: image.ncols() == expected.ncols() && angle < tol::PRINCIPAL_ANGLE,
        })
    }

    /// Largest |H^ξΦ(Y, Y′)| over Y in the fixed-set tangent basis and random
    /// Y′ (fixed directions lie in the null space of H^ξΦ).
    pub fn verify_commuting_nullity<R: Rng + ?Sized>(
        &self,
        m: &SpacePoint,
        xi: &AlgebraElement,
        trials: usize,
        rng: &mut R,
    ) -> Result<f64> {
        let fixed = self.fixed_set_tangent(m, xi)?;
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let yp = self.random_tangent(m, rng, 1.0);
            for y in &fixed {
                worst = worst.max(self.hessian_moment(m, xi, y, &yp)?.abs());
            }
        }
        Ok(worst)
    }

    /// Null space of H^ξΦ restricted to ker(Φ(m)⁻¹Φ_*) must lie inside
    /// T_m(M^ξ); reports the containment angle.
    pub fn verify_nondeg(&self, m: &SpacePoint, xi: &AlgebraElement) -> Result<NondegReport> {
        let basis = self.tangent_basis(m);
        let fixed = self.fixed_set_tangent(m, xi)?;
        let fixed_mat = tangent_matrix(self, &fixed);
        if basis.is_empty() {
            return Ok(NondegReport { kernel_dim: 0, fixed_dim: 0, containment_angle: 0.0, pass: true });
        }
        // Kernel of the moment differential, in tangent-basis coordinates.
        let d = self.spec.algebra_dim();
        let mut diff = RMat::zeros(d, basis.len());
        for (j, e) in basis.iter().enumerate() {
            diff.set_column(j, &self.spec.coords(&self.moment_diff(m, e)));
        }
        let ker = if diff.norm() < 1e-12 {
            RMat::identity(basis.len(), basis.len())
        } else {
            linalg::null_space(&diff, tol::RANK_REL)
        };
        if ker.ncols() == 0 {
            return Ok(NondegReport {
                kernel_dim: 0,
                fixed_dim: fixed.len(),
                containment_angle: 0.0,
                pass: true,
            });
        }
        // H^ξΦ restricted to the kernel.
        let mut h = RMat::zeros(ker.ncols(), ker.ncols());
        let ker_tangents: Vec<SpaceTangent> = (0..ker.ncols())
            .map(|j| self.combine(&basis, &ker.column(j).into_owned()))
            .collect();
        for i in 0..ker.ncols() {
            for j in i..ker.ncols() {
                let v = self.hessian_moment(m, xi, &ker_tangents[i], &ker_tangents[j])?;
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let (evals, evecs) = linalg::eig_symmetric_real(&h);
        let emax = evals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        // Null directions of the restricted form, pushed to ambient coords.
        let mut null_cols: Vec<RVec> = Vec::new();
        for (j, &e) in evals.iter().enumerate() {
            if e.abs() <= 1e-6 * emax.max(1e-6) {
                let comb = &ker * evecs.column(j).into_owned();
                let t = self.combine(&basis, &comb);
                null_cols.push(self.tangent_to_ambient(&t));
            }
        }
        let null_mat = if null_cols.is_empty() {
            RMat::zeros(self.ambient_dim(), 0)
        } else {
            robust_span(&RMat::from_columns(&null_cols))
        };
        let angle = linalg::containment_angle(&null_mat, &fixed_mat);
        Ok(NondegReport {
            kernel_dim: ker.ncols(),
            fixed_dim: fixed.len(),
            containment_angle: angle,
            pass: angle < tol::PRINCIPAL_ANGLE,
        })
    }

    /// Residual of the invariance identity coupling the conjugation Jacobi
    /// field to the moment Hessian:
    /// ⟨DW_γ/Dt(1), Φ_*(Y′)⟩ + H^ξΦ(γ^M(m), Y′) = 0, with
    /// DW_γ/Dt(1) = −½[ξ, Ad_{exp(−ξ)}γ + γ].
    pub fn invariance_residual(
        &self,
        m: &SpacePoint,
        xi: &AlgebraElement,
        gamma: &AlgebraElement,
        yp: &SpaceTangent,
    ) -> Result<f64> {
        let flow_back = self.spec.exp(&-xi);
        let transported = &self.spec.adjoint(&flow_back, gamma) + gamma;
        let dw1 = &self.spec.bracket(xi, &transported) * (-0.5);
        let term1 = self.spec.inner(&dw1, &self.moment_diff(m, yp));
        let term2 = self.hessian_moment(m, xi, &self.orbit_tangent(m, gamma), yp)?;
        Ok((term1 + term2).abs())
    }

    /// Linear combination of tangents with the given coefficients.
    pub fn combine(&self, basis: &[SpaceTangent], coeffs: &RVec) -> SpaceTangent {
        let mut acc = match basis.first() {
            None => return SpaceTangent::Point,
            Some(SpaceTangent::Point) => SpaceTangent::Point,
            Some(SpaceTangent::Conjugacy(_)) => SpaceTangent::Conjugacy(self.spec.zero_algebra()),
            Some(SpaceTangent::Double(ys)) => {
                SpaceTangent::Double(vec![self.spec.zero_algebra(); ys.len()])
            }
        };
        for (e, &c) in basis.iter().zip(coeffs.iter()) {
            acc = self.tangent_add(&acc, &self.tangent_scale(e, c));
        }
        acc
    }
}

/// Ambient coordinate matrix of a family of tangents (orthonormalized).
pub fn tangent_matrix(model: &QHSpaceModel, tangents: &[SpaceTangent]) -> RMat {
    if tangents.is_empty() {
        return RMat::zeros(model.ambient_dim(), 0);
    }
    let cols: Vec<RVec> = tangents.iter().map(|t| model.tangent_to_ambient(t)).collect();
    robust_span(&RMat::from_columns(&cols))
}

fn subspace_angle(a: &RMat, b: &RMat) -> f64 {
    if a.ncols() == 0 && b.ncols() == 0 {
        return 0.0;
    }
    if a.ncols() == 0 || b.ncols() == 0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let angles = linalg::principal_angles(a, b);
    angles.last().copied().unwrap_or(0.0)
}

/// Group commutator [a, b] = a·b·a⁻¹·b⁻¹.
pub fn commutator(a: &GroupElement, b: &GroupElement) -> GroupElement {
    a.mul(b).mul(&a.inverse()).mul(&b.inverse())
}

/// Left-trivialized differential of the group commutator c = [a,b] with
/// left-trivialized factor velocities A, B:
/// c⁻¹ċ = Ad_{bab⁻¹}A − Ad_{ba}A + Ad_{ba}B − Ad_bB.
fn commutator_diff(
    spec: &GroupSpec,
    a: &GroupElement,
    b: &GroupElement,
    va: &AlgebraElement,
    vb: &AlgebraElement,
) -> AlgebraElement {
    let ba = b.mul(a);
    let bab = a.conjugated_by(b);
    let t1 = spec.adjoint(&bab, va);
    let t2 = spec.adjoint(&ba, va);
    let t3 = spec.adjoint(&ba, vb);
    let t4 = spec.adjoint(b, vb);
    &(&t1 - &t2) + &(&t3 - &t4)
}

/// Column span that treats a matrix of pure roundoff (all entries at the
/// noise floor of exact-zero arithmetic) as rank zero.
fn robust_span(a: &RMat) -> RMat {
    if a.ncols() == 0 || a.norm() < 1e-10 {
        return RMat::zeros(a.nrows(), 0);
    }
    linalg::column_span(a, tol::RANK_REL)
}

/// Total squared circular distance of the best cyclic assignment between two
/// sorted angle lists (both on (−π, π]).
fn circular_match_cost(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut best = f64::INFINITY;
    for shift in 0..n {
        let mut cost = 0.0;
        for i in 0..n {
            let d = circular_distance(a[i], b[(i + shift) % n]);
            cost += d * d;
        }
        best = best.min(cost);
    }
    best.sqrt()
}

/// The assignment (as indices into `b`) realizing the best cyclic matching.
fn best_circular_assignment(a: &[f64], b: &[f64]) -> Vec<usize> {
    let n = a.len();
    let mut best = (f64::INFINITY, 0usize);
    for shift in 0..n {
        let mut cost = 0.0;
        for i in 0..n {
            let d = circular_distance(a[i], b[(i + shift) % n]);
            cost += d * d;
        }
        if cost < best.0 {
            best = (cost, shift);
        }
    }
    (0..n).map(|i| (i + best.1) % n).collect()
}

fn circular_distance(x: f64, y: f64) -> f64 {
    let mut d = (x - y) % TAU;
    if d > std::f64::consts::PI {
        d -= TAU;
    }
    if d < -std::f64::consts::PI {
        d += TAU;
    }
    d.abs()
}

//! Compact unitary groups SU(2) and SU(3) with the Ad-invariant metric
//! ⟨X,Y⟩ = −c·Re tr(XY), c > 0.
//!
//! Elements are dense complex matrices. The exponential and principal
//! logarithm go through unitary eigendecompositions, so they are exact on the
//! torus and stable everywhere else; the logarithm performs minimal-norm
//! branch selection subject to tracelessness and reports a cut-locus error
//! when the branch choice is ambiguous.

use crate::error::{Error, Result};
use crate::linalg::{
    self, eig_hermitian, eig_unitary, project_special_unitary, unitarity_residual, C64, CMat,
    RMat, RVec,
};
use crate::tol;
use rand::Rng;
use std::f64::consts::TAU;

/// Identifier of the shipped groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GroupName {
    Su2,
    Su3,
}

impl GroupName {
    pub fn matrix_dim(self) -> usize {
        match self {
            GroupName::Su2 => 2,
            GroupName::Su3 => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroupName::Su2 => "su2",
            GroupName::Su3 => "su3",
        }
    }
}

/// A group element: unitary with determinant 1.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub(crate) m: CMat,
}

/// A Lie-algebra element: skew-Hermitian and traceless.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub(crate) m: CMat,
}

/// One root of the torus action, as an ordered index pair (j, l) acting on
/// diagonal angles by θ ↦ θ_j − θ_l, together with its evaluation on the
/// orthonormal Cartan basis.
#[derive(Debug, Clone)]
pub struct RootData {
    pub pair: (usize, usize),
    pub on_cartan: Vec<f64>,
}

impl RootData {
    /// Root value on a torus element given by its diagonal angles.
    pub fn value_on_angles(&self, angles: &[f64]) -> f64 {
        angles[self.pair.0] - angles[self.pair.1]
    }

    /// Norm of the root as a linear functional on the torus algebra.
    pub fn functional_norm(&self) -> f64 {
        self.on_cartan.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Maximal-torus data: orthonormal Cartan basis, integral lattice basis, and
/// the root system evaluated on the Cartan basis.
#[derive(Debug, Clone)]
pub struct TorusData {
    cartan_basis: Vec<AlgebraElement>,
    lattice_basis: Vec<AlgebraElement>,
    roots: Vec<RootData>,
}

impl TorusData {
    pub fn rank(&self) -> usize {
        self.cartan_basis.len()
    }

    /// Orthonormal basis of the torus algebra (diagonal, traceless).
    pub fn cartan_basis(&self) -> &[AlgebraElement] {
        &self.cartan_basis
    }

    /// Basis of the integral lattice {λ : exp(λ) = e}.
    pub fn lattice_basis(&self) -> &[AlgebraElement] {
        &self.lattice_basis
    }

    pub fn roots(&self) -> &[RootData] {
        &self.roots
    }
}

/// Group descriptor: name, metric normalization, orthonormal algebra basis,
/// torus data, and the cached injectivity radius.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    name: GroupName,
    matrix_dim: usize,
    metric_scale: f64,
    basis: Vec<AlgebraElement>,
    torus: TorusData,
    injectivity: f64,
}

impl GroupSpec {
    /// Build a group descriptor with metric ⟨X,Y⟩ = −c·Re tr(XY).
    pub fn new(name: GroupName, metric_scale: f64) -> Result<GroupSpec> {
        if !(metric_scale > 0.0) || !metric_scale.is_finite() {
            return Err(Error::Precondition(format!(
                "metric scale must be positive and finite, got {metric_scale}"
            )));
        }
        let n = name.matrix_dim();
        let c = metric_scale;

        // Raw basis: real and imaginary off-diagonal generators, then the
        // traceless diagonal (Cartan) directions; normalized under the metric.
        let mut raw: Vec<CMat> = Vec::new();
        for j in 0..n {
            for l in (j + 1)..n {
                let mut a = CMat::zeros(n, n);
                a[(j, l)] = C64::new(1.0, 0.0);
                a[(l, j)] = C64::new(-1.0, 0.0);
                raw.push(a);
                let mut b = CMat::zeros(n, n);
                b[(j, l)] = C64::new(0.0, 1.0);
                b[(l, j)] = C64::new(0.0, 1.0);
                raw.push(b);
            }
        }
        let mut cartan_raw: Vec<CMat> = Vec::new();
        for k in 0..(n - 1) {
            let mut d = CMat::zeros(n, n);
            d[(k, k)] = C64::new(0.0, 1.0);
            d[(k + 1, k + 1)] = C64::new(0.0, -1.0);
            cartan_raw.push(d);
        }

        let inner_raw = |x: &CMat, y: &CMat| -> f64 { -c * (x * y).trace().re };
        let orthonormalize = |set: &[CMat]| -> Vec<CMat> {
            let mut out: Vec<CMat> = Vec::new();
            for v in set {
                let mut w = v.clone();
                for u in &out {
                    let p = inner_raw(&w, u);
                    w -= u * C64::new(p, 0.0);
                }
                let nrm = inner_raw(&w, &w).sqrt();
                out.push(w / C64::new(nrm, 0.0));
            }
            out
        };
        let mut basis_mats = orthonormalize(&raw);
        let cartan_mats = orthonormalize(&cartan_raw);
        basis_mats.extend(cartan_mats.iter().cloned());

        let basis: Vec<AlgebraElement> =
            basis_mats.into_iter().map(|m| AlgebraElement { m }).collect();
        let cartan_basis: Vec<AlgebraElement> =
            cartan_mats.into_iter().map(|m| AlgebraElement { m }).collect();

        // Integral lattice: 2πi(E_kk − E_{k+1,k+1}).
        let lattice_basis: Vec<AlgebraElement> = (0..(n - 1))
            .map(|k| {
                let mut d = CMat::zeros(n, n);
                d[(k, k)] = C64::new(0.0, TAU);
                d[(k + 1, k + 1)] = C64::new(0.0, -TAU);
                AlgebraElement { m: d }
            })
            .collect();

        // Roots: ordered pairs (j, l), j ≠ l, evaluated on the Cartan basis.
        let mut roots = Vec::new();
        for j in 0..n {
            for l in 0..n {
                if j != l {
                    let on_cartan: Vec<f64> = cartan_basis
                        .iter()
                        .map(|t| t.m[(j, j)].im - t.m[(l, l)].im)
                        .collect();
                    roots.push(RootData { pair: (j, l), on_cartan });
                }
            }
        }
        let torus = TorusData { cartan_basis, lattice_basis, roots };

        let mut spec = GroupSpec {
            name,
            matrix_dim: n,
            metric_scale: c,
            basis,
            torus,
            injectivity: 0.0,
        };
        spec.injectivity = spec.compute_injectivity_radius();
        Ok(spec)
    }

    /// SU(2) with the default metric scale c = 1.
    pub fn su2() -> GroupSpec {
        GroupSpec::new(GroupName::Su2, 1.0).expect("default su2")
    }

    /// SU(3) with the default metric scale c = 1.
    pub fn su3() -> GroupSpec {
        GroupSpec::new(GroupName::Su3, 1.0).expect("default su3")
    }

    pub fn name(&self) -> GroupName {
        self.name
    }

    pub fn matrix_dim(&self) -> usize {
        self.matrix_dim
    }

    pub fn metric_scale(&self) -> f64 {
        self.metric_scale
    }

    /// Dimension of the Lie algebra (N² − 1).
    pub fn algebra_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.torus.rank()
    }

    /// Orthonormal basis of the algebra under the metric.
    pub fn basis(&self) -> &[AlgebraElement] {
        &self.basis
    }

    pub fn torus(&self) -> &TorusData {
        &self.torus
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { m: CMat::identity(self.matrix_dim, self.matrix_dim) }
    }

    pub fn zero_algebra(&self) -> AlgebraElement {
        AlgebraElement { m: CMat::zeros(self.matrix_dim, self.matrix_dim) }
    }

    /// Validate (and, for small drift, re-project) a would-be group element.
    pub fn group_element(&self, m: CMat) -> Result<GroupElement> {
        if m.nrows() != self.matrix_dim || m.ncols() != self.matrix_dim {
            return Err(Error::Precondition(format!(
                "matrix is {}x{}, expected {0}x{0} sized {dim}",
                m.nrows(),
                m.ncols(),
                dim = self.matrix_dim
            )));
        }
        let resid = unitarity_residual(&m);
        if resid > tol::ELEMENT_VALIDATE {
            return Err(Error::Precondition(format!(
                "matrix is not unitary (residual {resid:.3e})"
            )));
        }
        let m = if resid > tol::UNITARITY_PROJECT { project_special_unitary(&m) } else { m };
        let det = m.determinant();
        if (det - C64::new(1.0, 0.0)).norm() > tol::ELEMENT_VALIDATE {
            return Err(Error::Precondition(format!(
                "determinant {det} is not 1 within tolerance"
            )));
        }
        let m = if (det - C64::new(1.0, 0.0)).norm() > tol::UNITARITY_PROJECT {
            project_special_unitary(&m)
        } else {
            m
        };
        Ok(GroupElement { m })
    }

    /// Validate a would-be algebra element (skew-Hermitian, traceless).
    pub fn algebra_element(&self, m: CMat) -> Result<AlgebraElement> {
        if m.nrows() != self.matrix_dim || m.ncols() != self.matrix_dim {
            return Err(Error::Precondition("algebra element has wrong dimensions".into()));
        }
        let skew = (&m + m.adjoint()).norm();
        let tr = m.trace().norm();
        let scale = m.norm().max(1.0);
        if skew > tol::ELEMENT_VALIDATE * scale || tr > tol::ELEMENT_VALIDATE * scale {
            return Err(Error::Precondition(format!(
                "matrix is not a traceless skew-Hermitian element (skew {skew:.3e}, trace {tr:.3e})"
            )));
        }
        Ok(AlgebraElement { m: clean_algebra(&m) })
    }

    /// Metric inner product ⟨X,Y⟩ = −c·Re tr(XY).
    pub fn inner(&self, x: &AlgebraElement, y: &AlgebraElement) -> f64 {
        -self.metric_scale * (&x.m * &y.m).trace().re
    }

    pub fn norm(&self, x: &AlgebraElement) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// Coordinates in the orthonormal basis.
    pub fn coords(&self, x: &AlgebraElement) -> RVec {
        RVec::from_iterator(self.basis.len(), self.basis.iter().map(|b| self.inner(x, b)))
    }

    pub fn from_coords(&self, v: &RVec) -> AlgebraElement {
        let mut m = CMat::zeros(self.matrix_dim, self.matrix_dim);
        for (b, &coef) in self.basis.iter().zip(v.iter()) {
            m += &b.m * C64::new(coef, 0.0);
        }
        AlgebraElement { m }
    }

    /// Column-wise coordinates of a family of algebra elements.
    pub fn coords_matrix(&self, xs: &[AlgebraElement]) -> RMat {
        if xs.is_empty() {
            return RMat::zeros(self.algebra_dim(), 0);
        }
        RMat::from_columns(&xs.iter().map(|x| self.coords(x)).collect::<Vec<_>>())
    }

    /// Lie bracket [x, y] = xy − yx.
    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { m: &x.m * &y.m - &y.m * &x.m }
    }

    /// Group exponential (exact through the eigendecomposition of −iX).
    pub fn exp(&self, x: &AlgebraElement) -> GroupElement {
        let h = &x.m * C64::new(0.0, -1.0); // Hermitian
        let (vals, v) = eig_hermitian(&h);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&l| C64::new(0.0, l).exp()),
        ));
        let m = &v * d * v.adjoint();
        GroupElement { m }
    }

    /// Principal logarithm: the minimal-norm traceless X with exp(X) = g and
    /// ‖X‖ = ρ(e, g). Errors with [`Error::CutLocus`] when the minimal branch
    /// is ambiguous (e.g. an eigenvalue at or near −1 making two branch
    /// patterns agree in norm within [`tol::BRANCH_GAP`] angle units).
    pub fn log(&self, g: &GroupElement) -> Result<AlgebraElement> {
        let n = self.matrix_dim;
        let c = self.metric_scale;
        let (angles, v) = eig_unitary(&g.m);
        let k = (angles.iter().sum::<f64>() / TAU).round() as i64;

        // Enumerate branch shifts m ∈ {−2..2}^n with Σm = k (tracelessness)
        // and keep the two smallest norms over distinct patterns.
        let mut best: Option<(f64, Vec<i64>)> = None;
        let mut runner: Option<f64> = None;
        let span: Vec<i64> = (-2..=2).collect();
        let mut pattern = vec![0i64; n];
        let mut stack = vec![0usize; n];
        let mut depth = 0usize;
        loop {
            if depth == n {
                if pattern.iter().sum::<i64>() == k {
                    let norm2: f64 = c
                        * angles
                            .iter()
                            .zip(&pattern)
                            .map(|(&t, &m)| {
                                let phi = t - TAU * m as f64;
                                phi * phi
                            })
                            .sum::<f64>();
                    match &best {
                        Some((b, _)) if norm2 >= *b => {
                            runner = Some(runner.map_or(norm2, |r: f64| r.min(norm2)));
                        }
                        _ => {
                            if let Some((b, _)) = &best {
                                runner = Some(runner.map_or(*b, |r: f64| r.min(*b)));
                            }
                            best = Some((norm2, pattern.clone()));
                        }
                    }
                }
                // Backtrack.
                loop {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    stack[depth] += 1;
                    if stack[depth] < span.len() {
                        pattern[depth] = span[stack[depth]];
                        depth += 1;
                        break;
                    }
                }
                if depth == 0 && stack[0] >= span.len() {
                    break;
                }
            } else {
                stack[depth] = 0;
                pattern[depth] = span[0];
                depth += 1;
            }
        }

        let (best_norm2, best_pat) = best.expect("at least one branch pattern");
        let gap = match runner {
            Some(r) => (r.sqrt() - best_norm2.sqrt()) / (2.0 * c).sqrt(),
            None => f64::INFINITY,
        };
        if gap < tol::BRANCH_GAP {
            return Err(Error::CutLocus { gap, tol: tol::BRANCH_GAP });
        }

        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            angles
                .iter()
                .zip(&best_pat)
                .map(|(&t, &m)| C64::new(0.0, t - TAU * m as f64)),
        ));
        let x = &v * d * v.adjoint();
        Ok(AlgebraElement { m: clean_algebra(&x) })
    }

    /// Bi-invariant distance ρ(p, q) = ‖log(p⁻¹q)‖.
    pub fn distance(&self, p: &GroupElement, q: &GroupElement) -> Result<f64> {
        let rel = GroupElement { m: p.m.adjoint() * &q.m };
        Ok(self.norm(&self.log(&rel)?))
    }

    /// Injectivity radius ρ̄ of the bi-invariant metric.
    pub fn injectivity_radius(&self) -> f64 {
        self.injectivity
    }

    fn compute_injectivity_radius(&self) -> f64 {
        // Shortest first-conjugate distance over torus directions:
        // 2π / (largest root-functional norm).
        let alpha_max = self
            .torus
            .roots
            .iter()
            .map(|r| r.functional_norm())
            .fold(0.0f64, f64::max);
        let conj = TAU / alpha_max;

        // Half the minimal nonzero lattice norm (coefficient box ±3 is ample
        // for rank ≤ 2 with a near-orthogonal basis).
        let r = self.torus.lattice_basis.len();
        let mut min_norm = f64::INFINITY;
        let mut coef = vec![-3i64; r];
        'outer: loop {
            if coef.iter().any(|&a| a != 0) {
                let mut acc = self.zero_algebra();
                for (l, &a) in self.torus.lattice_basis.iter().zip(coef.iter()) {
                    acc = &acc + &(l * a as f64);
                }
                min_norm = min_norm.min(self.norm(&acc));
            }
            for j in 0..r {
                coef[j] += 1;
                if coef[j] <= 3 {
                    continue 'outer;
                }
                coef[j] = -3;
            }
            break;
        }
        conj.min(min_norm / 2.0)
    }

    /// Adjoint action Ad_g X = g X g⁻¹.
    pub fn adjoint(&self, g: &GroupElement, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { m: &g.m * &x.m * g.m.adjoint() }
    }

    /// Matrix of Ad_g in the orthonormal basis (orthogonal).
    pub fn adjoint_matrix(&self, g: &GroupElement) -> RMat {
        let cols: Vec<RVec> =
            self.basis.iter().map(|b| self.coords(&self.adjoint(g, b))).collect();
        RMat::from_columns(&cols)
    }

    /// Matrix of ad_ξ = [ξ, ·] in the orthonormal basis (skew-symmetric).
    pub fn ad_matrix(&self, x: &AlgebraElement) -> RMat {
        let cols: Vec<RVec> =
            self.basis.iter().map(|b| self.coords(&self.bracket(x, b))).collect();
        RMat::from_columns(&cols)
    }

    /// Orthonormal basis of the stabilizer algebra {X : Ad_g X = X}.
    pub fn stabilizer_algebra(&self, g: &GroupElement) -> Vec<AlgebraElement> {
        let d = self.algebra_dim();
        let a = self.adjoint_matrix(g) - RMat::identity(d, d);
        // Ad_g − I at (numerically) central g is pure roundoff; a relative
        // rank cutoff would then misread noise as rank.
        if a.norm() < 1e-12 {
            return self.basis.to_vec();
        }
        let null = linalg::null_space(&a, tol::RANK_REL);
        (0..null.ncols()).map(|j| self.from_coords(&null.column(j).into_owned())).collect()
    }

    /// Torus element from its first rank-many diagonal angles; the last angle
    /// is forced by tracelessness.
    pub fn cartan_from_angles(&self, angles: &[f64]) -> Result<AlgebraElement> {
        if angles.len() != self.rank() {
            return Err(Error::Precondition(format!(
                "expected {} torus angles, got {}",
                self.rank(),
                angles.len()
            )));
        }
        let mut m = CMat::zeros(self.matrix_dim, self.matrix_dim);
        let mut sum = 0.0;
        for (j, &t) in angles.iter().enumerate() {
            m[(j, j)] = C64::new(0.0, t);
            sum += t;
        }
        m[(self.matrix_dim - 1, self.matrix_dim - 1)] = C64::new(0.0, -sum);
        Ok(AlgebraElement { m })
    }

    /// Diagonal angles of a torus-algebra element, or None if it is not
    /// diagonal to tolerance.
    pub fn diag_angles(&self, x: &AlgebraElement) -> Option<Vec<f64>> {
        let scale = x.m.norm().max(1.0);
        for i in 0..self.matrix_dim {
            for j in 0..self.matrix_dim {
                if i != j && x.m[(i, j)].norm() > 1e-10 * scale {
                    return None;
                }
            }
        }
        Some((0..self.matrix_dim).map(|i| x.m[(i, i)].im).collect())
    }

    /// Constant-speed geodesic interpolation p·exp(t·log(p⁻¹q)).
    pub fn interpolate(&self, p: &GroupElement, q: &GroupElement, t: f64) -> Result<GroupElement> {
        let rel = GroupElement { m: p.m.adjoint() * &q.m };
        let xi = self.log(&rel)?;
        Ok(p.mul(&self.exp(&(&xi * t))))
    }

    /// Random algebra element with independent coordinates uniform in
    /// [−scale, scale].
    pub fn random_algebra<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> AlgebraElement {
        let v = RVec::from_iterator(
            self.algebra_dim(),
            (0..self.algebra_dim()).map(|_| rng.random_range(-scale..=scale)),
        );
        self.from_coords(&v)
    }

    /// Random group element exp of a random algebra element.
    pub fn random_group<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> GroupElement {
        self.exp(&self.random_algebra(rng, scale))
    }
}

/// Skew-Hermitian projection plus trace removal (numerical cleanup).
fn clean_algebra(m: &CMat) -> CMat {
    let n = m.nrows();
    let mut x = (m - m.adjoint()) * C64::new(0.5, 0.0);
    let tr = x.trace() / C64::new(n as f64, 0.0);
    for i in 0..n {
        x[(i, i)] -= tr;
    }
    x
}

impl GroupElement {
    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// Group product, with automatic re-projection when accumulated drift
    /// exceeds [`tol::UNITARITY_PROJECT`].
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let m = &self.m * &other.m;
        if unitarity_residual(&m) > tol::UNITARITY_PROJECT {
            GroupElement { m: project_special_unitary(&m) }
        } else {
            GroupElement { m }
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { m: self.m.adjoint() }
    }

    /// Conjugation g·self·g⁻¹.
    pub fn conjugated_by(&self, g: &GroupElement) -> GroupElement {
        GroupElement { m: &g.m * &self.m * g.m.adjoint() }
    }

    /// Frobenius distance to another element (not the geodesic distance; used
    /// for cheap coincidence checks).
    pub fn frobenius_distance(&self, other: &GroupElement) -> f64 {
        (&self.m - &other.m).norm()
    }
}

impl AlgebraElement {
    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// Internal constructor for matrices already known to be traceless
    /// skew-Hermitian (conjugations of validated elements).
    pub(crate) fn from_matrix_unchecked(m: CMat) -> AlgebraElement {
        AlgebraElement { m }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }
}

impl std::ops::Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { m: &self.m + &rhs.m }
    }
}

impl std::ops::Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { m: &self.m - &rhs.m }
    }
}

impl std::ops::Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { m: -&self.m }
    }
}

impl std::ops::Mul<f64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: f64) -> AlgebraElement {
        AlgebraElement { m: &self.m * C64::new(rhs, 0.0) }
    }
}

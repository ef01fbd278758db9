//! Dense linear-algebra helpers: Hermitian/unitary eigendecompositions,
//! polar projection, and real subspace utilities used across the crate.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// ‖a†a − I‖_F, the unitarity residual.
pub fn unitarity_residual(a: &CMat) -> f64 {
    let n = a.nrows();
    (a.adjoint() * a - CMat::identity(n, n)).norm()
}

/// Hermitian residual ‖a − a†‖_F.
pub fn hermitian_residual(a: &CMat) -> f64 {
    (a - a.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Returns (λ, V) with a = V·diag(λ)·V†.
pub fn eig_hermitian(a: &CMat) -> (Vec<f64>, CMat) {
    let se = nalgebra::SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = CMat::from_columns(
        &order
            .iter()
            .map(|&i| se.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Eigendecomposition of a unitary matrix g = V·diag(e^{iθ_j})·V† with
/// principal angles θ_j ∈ (−π, π].
///
/// Two-stage scheme: diagonalize the Hermitian part C = (g+g†)/2, then split
/// clusters of C-eigenvalues with the (commuting) skew part S = (g−g†)/(2i)
/// so that every column is an eigenvector of both, hence of g = C + iS.
pub fn eig_unitary(g: &CMat) -> (Vec<f64>, CMat) {
    let n = g.nrows();
    let half = C64::new(0.5, 0.0);
    let c_part = (g + g.adjoint()) * half;
    let s_part = (g - g.adjoint()) * C64::new(0.0, -0.5);
    let (cvals, mut v) = eig_hermitian(&c_part);

    // Cluster consecutive cosine eigenvalues; within each cluster diagonalize
    // the restriction of S to resolve the ±θ ambiguity.
    let cluster_tol = 1e-7;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (cvals[end] - cvals[end - 1]).abs() < cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let cols: Vec<_> = (start..end).map(|j| v.column(j).into_owned()).collect();
            let u = CMat::from_columns(&cols);
            let block = u.adjoint() * &s_part * &u;
            let (_, w) = eig_hermitian(&block);
            let refined = u * w;
            for (k, j) in (start..end).enumerate() {
                v.set_column(j, &refined.column(k));
            }
        }
        start = end;
    }

    // Rayleigh quotients of both Hermitian pieces give (cos θ, sin θ).
    let mut angles = Vec::with_capacity(n);
    for j in 0..n {
        let col = v.column(j);
        let cj = (col.adjoint() * &c_part * col)[(0, 0)].re;
        let sj = (col.adjoint() * &s_part * col)[(0, 0)].re;
        angles.push(sj.atan2(cj));
    }
    (angles, v)
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
/// Returns (λ, V) with a = V·diag(λ)·Vᵀ.
pub fn eig_symmetric_real(a: &RMat) -> (Vec<f64>, RMat) {
    let se = nalgebra::SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = RMat::from_columns(
        &order
            .iter()
            .map(|&i| se.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Polar projection onto the unitary group: a ↦ a·(a†a)^{−1/2}.
pub fn polar_unitary(a: &CMat) -> CMat {
    let (vals, v) = eig_hermitian(&(a.adjoint() * a));
    let inv_sqrt = CMat::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::new(1.0 / l.max(1e-300).sqrt(), 0.0)),
    ));
    a * v.clone() * inv_sqrt * v.adjoint()
}

/// Project onto the special unitary group: polar projection followed by a
/// scalar phase fix pushing the determinant to 1.
pub fn project_special_unitary(a: &CMat) -> CMat {
    let n = a.nrows();
    let u = polar_unitary(a);
    let det = u.determinant();
    let phase = det.arg() / n as f64;
    u * C64::new(0.0, -phase).exp()
}

/// Orthonormal basis for the column span of `a`: left singular vectors with
/// singular value > rel_tol·σ_max. Returns a matrix with one column per basis
/// vector (possibly zero columns).
pub fn column_span(a: &RMat, rel_tol: f64) -> RMat {
    if a.ncols() == 0 {
        return RMat::zeros(a.nrows(), 0);
    }
    let svd = nalgebra::SVD::new(a.clone(), true, false);
    let u = svd.u.expect("svd with u");
    let smax = svd.singular_values.max();
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > rel_tol * smax.max(1e-300))
        .map(|(j, _)| u.column(j).into_owned())
        .collect();
    if cols.is_empty() {
        RMat::zeros(a.nrows(), 0)
    } else {
        RMat::from_columns(&cols)
    }
}

/// Orthonormal basis of the null space of `a` (right singular vectors with
/// σ ≤ rel_tol·σ_max).
pub fn null_space(a: &RMat, rel_tol: f64) -> RMat {
    let ncols = a.ncols();
    if ncols == 0 {
        return RMat::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return RMat::identity(ncols, ncols);
    }
    // The thin SVD only returns min(m, n) right singular vectors; pad wide
    // matrices with zero rows so every kernel direction is represented.
    let work = if a.nrows() < ncols {
        let mut b = RMat::zeros(ncols, ncols);
        b.view_mut((0, 0), (a.nrows(), ncols)).copy_from(a);
        b
    } else {
        a.clone()
    };
    let svd = nalgebra::SVD::new(work, false, true);
    let vt = svd.v_t.expect("svd with v_t");
    let smax = svd.singular_values.max();
    let mut cols: Vec<RVec> = Vec::new();
    for j in 0..svd.singular_values.len() {
        if svd.singular_values[j] <= rel_tol * smax.max(1e-300) {
            cols.push(vt.row(j).transpose());
        }
    }
    if cols.is_empty() {
        RMat::zeros(ncols, 0)
    } else {
        RMat::from_columns(&cols)
    }
}

/// Principal angles (radians, ascending) between the subspaces spanned by the
/// orthonormal columns of `p` and `q`. Length = min(rank p, rank q).
pub fn principal_angles(p: &RMat, q: &RMat) -> Vec<f64> {
    if p.ncols() == 0 || q.ncols() == 0 {
        return Vec::new();
    }
    let m = p.transpose() * q;
    let svd = nalgebra::SVD::new(m, false, false);
    let mut angles: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&s| s.clamp(-1.0, 1.0).acos())
        .collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    angles.truncate(p.ncols().min(q.ncols()));
    angles
}

/// Largest principal angle of span(sub) against span(ambient): ≈ 0 iff
/// sub ⊆ ambient. Returns π/2 when `ambient` is empty but `sub` is not.
pub fn containment_angle(sub: &RMat, ambient: &RMat) -> f64 {
    if sub.ncols() == 0 {
        return 0.0;
    }
    if ambient.ncols() == 0 {
        return std::f64::consts::FRAC_PI_2;
    }
    // For each unit vector v in sub-span, the angle to the ambient space is
    // acos‖P_ambient v‖; the worst case is governed by the smallest singular
    // value of ambientᵀ·sub.
    let m = ambient.transpose() * sub;
    let svd = nalgebra::SVD::new(m, false, false);
    let smin = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
    smin.clamp(-1.0, 1.0).acos()
}

/// Smallest singular value of `a` (0 for an empty matrix).
pub fn smallest_singular_value(a: &RMat) -> f64 {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0.0;
    }
    let svd = nalgebra::SVD::new(a.clone(), false, false);
    svd.singular_values.iter().cloned().fold(f64::MAX, f64::min)
}

/// Spectral norm (largest singular value) of `a`.
pub fn spectral_norm(a: &RMat) -> f64 {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0.0;
    }
    let svd = nalgebra::SVD::new(a.clone(), false, false);
    svd.singular_values.max()
}

/// Least-squares minimum-norm solution of a·x = b via SVD.
pub fn lstsq(a: &RMat, b: &RVec, rel_tol: f64) -> RVec {
    if a.ncols() == 0 {
        return RVec::zeros(0);
    }
    let svd = nalgebra::SVD::new(a.clone(), true, true);
    svd.solve(b, rel_tol * svd.singular_values.max().max(1e-300))
        .expect("svd solve")
}

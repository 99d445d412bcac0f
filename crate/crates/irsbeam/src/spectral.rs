//! Hermitian matrices and the eigen/solve kernels the beamformers sit on.
//!
//! Every matrix in this problem family is either a positive diagonal, a
//! scaled rank-one outer product, or a sum of the two. `HermitianMatrix`
//! always stores its dense entries (the reference representation used by the
//! dense Cholesky and Jacobi paths) and, when the matrix was built from
//! diagonal and rank-one parts, additionally remembers that structure so
//! solves and quadratic forms can run in O(N) via Sherman-Morrison instead
//! of O(N^3). The two representations are cross-checked in the test suite.

use num_complex::Complex64;

use crate::cvec;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// ── Matrix type ────────────────────────────────────────────────────────────

/// `diag(d) + scale * v v^H` with real `d` and real `scale`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DiagRankOne {
    pub(crate) diag: Vec<f64>,
    pub(crate) scale: f64,
    pub(crate) vec: Vec<Complex64>,
}

impl DiagRankOne {
    /// True when `diag(d) + scale v v^H` is positive definite by inspection.
    pub(crate) fn is_pd_by_construction(&self) -> bool {
        self.scale >= 0.0 && self.diag.iter().all(|&d| d > 0.0)
    }

    pub(crate) fn has_rank_one(&self) -> bool {
        self.scale != 0.0 && cvec::norm_sq(&self.vec) > 0.0
    }

    /// Solves `(diag + scale v v^H) x = rhs` by Sherman-Morrison in O(N).
    /// Caller guarantees positive diagonal and nonnegative scale, so the
    /// denominator `1 + scale v^H D^-1 v >= 1` and nothing cancels.
    pub(crate) fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        debug_assert!(self.is_pd_by_construction());
        let mut x: Vec<Complex64> =
            rhs.iter().zip(&self.diag).map(|(r, &d)| r / d).collect();
        if self.has_rank_one() {
            let t: Vec<Complex64> =
                self.vec.iter().zip(&self.diag).map(|(v, &d)| v / d).collect();
            let vhx = cvec::dot(&self.vec, &x);
            let vht = cvec::dot(&self.vec, &t).re; // v^H D^-1 v, real
            let k = self.scale * vhx / (1.0 + self.scale * vht);
            for (xi, ti) in x.iter_mut().zip(&t) {
                *xi -= k * ti;
            }
        }
        x
    }

    pub(crate) fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y: Vec<Complex64> =
            x.iter().zip(&self.diag).map(|(xi, &d)| d * xi).collect();
        if self.has_rank_one() {
            let vhx = self.scale * cvec::dot(&self.vec, x);
            for (yi, vi) in y.iter_mut().zip(&self.vec) {
                *yi += vi * vhx;
            }
        }
        y
    }

    pub(crate) fn quad_form(&self, x: &[Complex64]) -> f64 {
        let diag_part: f64 =
            x.iter().zip(&self.diag).map(|(xi, &d)| d * xi.norm_sqr()).sum();
        let rank_part = if self.has_rank_one() {
            self.scale * cvec::dot(&self.vec, x).norm_sqr()
        } else {
            0.0
        };
        diag_part + rank_part
    }

    pub(crate) fn constant_diag(&self) -> Option<f64> {
        let first = *self.diag.first()?;
        self.diag.iter().all(|&d| d == first).then_some(first)
    }
}

/// Dense complex Hermitian matrix, Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    /// Row-major dense entries.
    data: Vec<Complex64>,
    /// Present when the matrix was assembled from diagonal + rank-one parts.
    form: Option<DiagRankOne>,
}

impl HermitianMatrix {
    pub fn scaled_identity(n: usize, s: f64) -> Self {
        Self::from_structure(DiagRankOne { diag: vec![s; n], scale: 0.0, vec: Vec::new() })
    }

    pub fn from_real_diagonal(diag: Vec<f64>) -> Self {
        Self::from_structure(DiagRankOne { diag, scale: 0.0, vec: Vec::new() })
    }

    /// `scale * v v^H`.
    pub fn rank_one(scale: f64, v: &[Complex64]) -> Self {
        Self::from_structure(DiagRankOne {
            diag: vec![0.0; v.len()],
            scale,
            vec: v.to_vec(),
        })
    }

    /// `diag(d) + scale * v v^H`; the workhorse constructor here.
    pub fn diag_plus_rank_one(diag: Vec<f64>, scale: f64, v: &[Complex64]) -> Result<Self> {
        if diag.len() != v.len() {
            return Err(Error::Dimension { expected: diag.len(), got: v.len() });
        }
        Ok(Self::from_structure(DiagRankOne { diag, scale, vec: v.to_vec() }))
    }

    fn from_structure(form: DiagRankOne) -> Self {
        let n = form.diag.len();
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(form.diag[i], 0.0);
        }
        if form.has_rank_one() {
            for i in 0..n {
                for j in 0..n {
                    data[i * n + j] += form.scale * form.vec[i] * form.vec[j].conj();
                }
            }
        }
        HermitianMatrix { n, data, form: Some(form) }
    }

    /// Builds from explicit rows, verifying conjugate symmetry to a relative
    /// tolerance and then symmetrizing exactly. Carries no structure, so all
    /// operations on the result take the dense paths.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::Dimension { expected: n, got: r.len() });
            }
        }
        let scale: f64 = rows
            .iter()
            .flat_map(|r| r.iter().map(|z| z.norm()))
            .fold(0.0f64, f64::max)
            .max(1e-300);
        for i in 0..n {
            for j in 0..n {
                let asym = (rows[i][j] - rows[j][i].conj()).norm();
                if asym > 1e-9 * scale {
                    return Err(Error::precondition(format!(
                        "matrix is not Hermitian at ({i},{j}): asymmetry {asym:e}"
                    )));
                }
            }
        }
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = 0.5 * (rows[i][j] + rows[j][i].conj());
            }
        }
        Ok(HermitianMatrix { n, data, form: None })
    }

    /// `alpha * self + beta * other`. Keeps structure when the result still
    /// fits diagonal + a single rank-one term.
    pub fn lin_comb(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        if let (Some(a), Some(b)) = (&self.form, &other.form) {
            let both_rank_one = a.has_rank_one() && b.has_rank_one();
            if !both_rank_one {
                let diag: Vec<f64> = a
                    .diag
                    .iter()
                    .zip(&b.diag)
                    .map(|(&x, &y)| alpha * x + beta * y)
                    .collect();
                let (scale, vec) = if a.has_rank_one() {
                    (alpha * a.scale, a.vec.clone())
                } else if b.has_rank_one() {
                    (beta * b.scale, b.vec.clone())
                } else {
                    (0.0, Vec::new())
                };
                return Ok(Self::from_structure(DiagRankOne { diag, scale, vec }));
            }
        }
        let data: Vec<Complex64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Ok(HermitianMatrix { n: self.n, data, form: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub(crate) fn structure(&self) -> Option<&DiagRankOne> {
        self.form.as_ref()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        if let Some(form) = &self.form {
            return Ok(form.matvec(x));
        }
        let mut y = vec![ZERO; self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        Ok(y)
    }

    /// Real quadratic form x^H M x.
    pub fn quad_form(&self, x: &[Complex64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        if let Some(form) = &self.form {
            return Ok(form.quad_form(x));
        }
        let mx = self.matvec(x)?;
        Ok(cvec::dot(x, &mx).re)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Lower-triangular Cholesky factor, `self = L L^H`.
    pub fn cholesky(&self) -> Result<CholeskyFactor> {
        let n = self.n;
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut s = self.data[j * n + j].re;
            for k in 0..j {
                s -= l[j * n + k].norm_sqr();
            }
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Singular(format!(
                    "not positive definite at pivot {j} (value {s:e})"
                )));
            }
            let d = s.sqrt();
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut t = self.data[i * n + j];
                for k in 0..j {
                    t -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = t / d;
            }
        }
        Ok(CholeskyFactor { n, l })
    }
}

/// Lower Cholesky factor with triangular solves.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<Complex64>,
}

impl CholeskyFactor {
    /// Solves `L y = rhs` (forward substitution).
    pub fn solve_lower(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[i * n + k];
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        y
    }

    /// Solves `L^H x = rhs` (back substitution).
    pub fn solve_upper(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = rhs.to_vec();
        for i in (0..n).rev() {
            for k in i + 1..n {
                // (L^H)[i][k] = conj(L[k][i])
                let u = self.l[k * n + i].conj();
                x[i] = x[i] - u * x[k];
            }
            x[i] /= self.l[i * n + i];
        }
        x
    }

    /// Solves `L L^H x = rhs`.
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        self.solve_upper(&self.solve_lower(rhs))
    }
}

/// Solves `m x = rhs` for positive definite `m`. Structured matrices take
/// the O(N) Sherman-Morrison path; everything else factors via Cholesky.
pub fn pd_solve(m: &HermitianMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    if rhs.len() != m.n {
        return Err(Error::Dimension { expected: m.n, got: rhs.len() });
    }
    if let Some(form) = m.structure() {
        if form.is_pd_by_construction() {
            return Ok(form.solve(rhs));
        }
    }
    Ok(m.cholesky()?.solve(rhs))
}

/// Dense-only variant of [`pd_solve`], used to cross-check the structured path.
pub fn pd_solve_dense(m: &HermitianMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    if rhs.len() != m.n {
        return Err(Error::Dimension { expected: m.n, got: rhs.len() });
    }
    Ok(m.cholesky()?.solve(rhs))
}

// ── Hermitian eigendecomposition (cyclic complex Jacobi) ───────────────────

/// Full eigendecomposition of a Hermitian matrix. Returns eigenvalues in
/// ascending order and the matching unit eigenvectors as columns.
pub fn eigh(m: &HermitianMatrix) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let n = m.n;
    let mut a = m.data.clone();
    // Symmetrize defensively; dense constructors already guarantee this.
    for i in 0..n {
        for j in 0..n {
            let avg = 0.5 * (a[i * n + j] + a[j * n + i].conj());
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let fro = m.frobenius_norm().max(1e-300);
    let tol = 1e-14 * fro;

    let off_norm = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += 2.0 * a[i * n + j].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _sweep in 0..60 {
        if off_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= tol / (n as f64) {
                    continue;
                }
                let u = apq / r; // unit phase of the pivot
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * r);
                // smaller root of t^2 - 2 tau t - 1 = 0
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let su = s * u;
                let suc = s * u.conj();

                // Column update: [col_p, col_q] <- [col_p, col_q] U with
                // U = [[c, -s u], [s conj(u), c]].
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip + suc * aiq;
                    a[i * n + q] = -su * aip + c * aiq;
                }
                // Row update with U^H on the left.
                for j in 0..n {
                    let apj = a[p * n + j];
                    let aqj = a[q * n + j];
                    a[p * n + j] = c * apj + su * aqj;
                    a[q * n + j] = -suc * apj + c * aqj;
                }
                // Clean the pivot pair.
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
                // Accumulate eigenvectors: V <- V U.
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip + suc * viq;
                    v[i * n + q] = -su * vip + c * viq;
                }
            }
        }
    }
    if !converged && off_norm(&a) > tol {
        return Err(Error::numeric("Jacobi eigensolver did not converge in 60 sweeps"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let sorted_vecs: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok((sorted_vals, sorted_vecs))
}

// ── Generalized principal eigenvector ──────────────────────────────────────

/// Rayleigh quotient x^H a x / x^H b x.
pub fn rayleigh_quotient(a: &HermitianMatrix, b: &HermitianMatrix, x: &[Complex64]) -> Result<f64> {
    Ok(a.quad_form(x)? / b.quad_form(x)?)
}

/// Unit vector maximizing `v^H a v / v^H b v` for Hermitian PSD `a` and
/// Hermitian PD `b`. Pencils whose two sides are both
/// (constant diagonal + rank-one) are solved exactly in the two-dimensional
/// subspace spanned by the rank-one directions; everything else reduces to a
/// standard Hermitian problem through the Cholesky factor of `b`.
pub fn principal_eigvec(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Vec<Complex64>> {
    if a.n != b.n {
        return Err(Error::Dimension { expected: a.n, got: b.n });
    }
    if let (Some(fa), Some(fb)) = (a.structure(), b.structure()) {
        if let (Some(beta), Some(delta)) = (fa.constant_diag(), fb.constant_diag()) {
            let ok = fa.scale >= 0.0 && beta >= 0.0 && fb.scale >= 0.0 && delta > 0.0;
            if ok {
                return subspace_principal(fa, beta, fb, delta, a.n);
            }
        }
    }
    principal_eigvec_dense(a, b)
}

/// Dense reference path: Cholesky-reduce the pencil and run Jacobi.
pub fn principal_eigvec_dense(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<Vec<Complex64>> {
    if a.n != b.n {
        return Err(Error::Dimension { expected: a.n, got: b.n });
    }
    let n = a.n;
    let chol = b.cholesky()?;
    // M = L^-1 A L^-H, assembled column by column.
    // First S = L^-1 A, then M = (L^-1 S^H)^H.
    let mut s_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<Complex64> = (0..n).map(|i| a.data[i * n + j]).collect();
        s_cols.push(chol.solve_lower(&col));
    }
    let mut m_rows = vec![vec![ZERO; n]; n];
    for i in 0..n {
        // i-th column of S^H is conj of the i-th row of S.
        let col: Vec<Complex64> = (0..n).map(|j| s_cols[j][i].conj()).collect();
        let t = chol.solve_lower(&col);
        // M[i][j] = conj(T[j][i]) where T's columns are t.
        for j in 0..n {
            m_rows[i][j] = t[j].conj();
        }
    }
    let m = HermitianMatrix::from_rows(&m_rows)?;
    let (_vals, vecs) = eigh(&m)?;
    let top = vecs.last().expect("n >= 1");
    let x = chol.solve_upper(top);
    let mut x = cvec::normalized(&x)
        .ok_or_else(|| Error::numeric("eigenvector collapsed to zero"))?;
    cvec::fix_phase(&mut x);
    Ok(x)
}

/// Exact principal eigenvector of the pencil
/// `(alpha u u^H + beta I, gamma w w^H + delta I)`.
///
/// Any eigenvector with eigenvalue other than beta/delta lies in
/// span{u, w}, so the maximizer is found from a 2x2 pencil in an
/// orthonormal basis of that span.
fn subspace_principal(
    fa: &DiagRankOne,
    beta: f64,
    fb: &DiagRankOne,
    delta: f64,
    n: usize,
) -> Result<Vec<Complex64>> {
    let finish = |v: Vec<Complex64>| -> Result<Vec<Complex64>> {
        let mut v = cvec::normalized(&v)
            .ok_or_else(|| Error::numeric("subspace solver produced a zero vector"))?;
        cvec::fix_phase(&mut v);
        Ok(v)
    };
    let e1 = |n: usize| {
        let mut v = vec![ZERO; n];
        v[0] = Complex64::new(1.0, 0.0);
        v
    };
    if n == 1 {
        return finish(e1(1));
    }
    let a_rank = fa.has_rank_one();
    let b_rank = fb.has_rank_one();
    let alpha = fa.scale;
    let gamma = fb.scale;

    // Deterministic unit vector orthogonal to w.
    let perp_to = |w: &[Complex64]| -> Vec<Complex64> {
        let wsq = cvec::norm_sq(w);
        let k = (0..n)
            .min_by(|&i, &j| {
                w[i].norm_sqr().partial_cmp(&w[j].norm_sqr()).unwrap().then(i.cmp(&j))
            })
            .unwrap();
        let mut v = vec![ZERO; n];
        v[k] = Complex64::new(1.0, 0.0);
        let coef = w[k].conj() / wsq;
        for (vi, wi) in v.iter_mut().zip(w) {
            *vi -= coef * wi;
        }
        v
    };

    match (a_rank, b_rank) {
        (false, false) => finish(e1(n)),
        // Numerator isotropic: minimize the denominator, i.e. avoid w.
        (false, true) => finish(perp_to(&fb.vec)),
        // Denominator isotropic: align with u.
        (true, false) => finish(fa.vec.clone()),
        (true, true) => {
            let u = &fa.vec;
            let w = &fb.vec;
            let unorm = cvec::norm(u);
            let q1: Vec<Complex64> = u.iter().map(|z| z / unorm).collect();
            let s = cvec::dot(&q1, w); // q1^H w
            let mut w_perp = w.clone();
            for (wp, q) in w_perp.iter_mut().zip(&q1) {
                *wp -= s * q;
            }
            let r = cvec::norm(&w_perp);
            if r <= 1e-12 * cvec::norm(w) {
                // w parallel to u: compare the u direction with any
                // direction orthogonal to both.
                let r1 = (alpha * unorm * unorm + beta) / (gamma * s.norm_sqr() + delta);
                let r2 = beta / delta;
                return if r2 > r1 { finish(perp_to(w)) } else { finish(q1) };
            }
            let q2: Vec<Complex64> = w_perp.iter().map(|z| z / r).collect();
            // 2x2 pencil in the (q1, q2) basis; the numerator is diagonal
            // because q2 is orthogonal to u.
            let a1 = alpha * unorm * unorm + beta;
            let a2 = beta;
            let b11 = gamma * s.norm_sqr() + delta;
            let b22 = gamma * r * r + delta;
            let b12 = gamma * s * r;
            let det_b = b11 * b22 - b12.norm_sqr();
            let tr = a1 * b22 + a2 * b11;
            let disc = (tr * tr - 4.0 * det_b * a1 * a2).max(0.0);
            let theta = (tr + disc.sqrt()) / (2.0 * det_b);
            // (A2 - theta B2) y = 0; take the better-conditioned row.
            let y_row1 = [theta * b12, Complex64::new(a1 - theta * b11, 0.0)];
            let y_row2 = [Complex64::new(a2 - theta * b22, 0.0), theta * b12.conj()];
            let n1 = y_row1[0].norm_sqr() + y_row1[1].norm_sqr();
            let n2 = y_row2[0].norm_sqr() + y_row2[1].norm_sqr();
            let y = if n1 >= n2 { y_row1 } else { y_row2 };
            let v: Vec<Complex64> = q1
                .iter()
                .zip(&q2)
                .map(|(q1i, q2i)| y[0] * q1i + y[1] * q2i)
                .collect();
            finish(v)
        }
    }
}

/// Unit vector maximizing `|u^H v|^2 / (v^H b v)`, i.e. the normalized
/// solution of `b x = u`.
pub fn rank_one_rayleigh_max(b: &HermitianMatrix, u: &[Complex64]) -> Result<Vec<Complex64>> {
    if cvec::norm_sq(u) == 0.0 {
        return Err(Error::domain("rank_one_rayleigh_max needs a nonzero vector"));
    }
    let x = pd_solve(b, u)?;
    let x = cvec::normalized(&x)
        .ok_or_else(|| Error::numeric("pd_solve returned a zero vector"))?;
    let mut x = x;
    cvec::fix_phase(&mut x);
    Ok(x)
}

//! Quadratic fractional programming under a quadratic power constraint.
//!
//! The problem family solved here is
//!
//! ```text
//!   maximize   (p^H A p) / (p^H B p)
//!   subject to  p^H C p <= budget
//! ```
//!
//! with `A` Hermitian PSD and `B`, `C` Hermitian PD. A Dinkelbach loop turns
//! the ratio into a sequence of concave subproblems
//! `maximize 2 Re(a^H p) - y p^H B p  s.t.  p^H C p <= budget`, where `a`
//! linearizes the numerator at the previous iterate. Each subproblem is
//! solved exactly from its KKT system `(y B + mu C) p = a` by bisecting on
//! the constraint multiplier `mu`. When `B` and `C` carry diagonal+rank-one
//! structure the per-evaluation cost is O(N).

use num_complex::Complex64;

use crate::cvec;
use crate::spectral::{pd_solve, DiagRankOne, HermitianMatrix};
use crate::{Error, Result};

/// Ratio-maximization instance: numerator and denominator quadratics, the
/// constraint quadratic, and the power budget.
#[derive(Debug, Clone)]
pub struct FpMatrices {
    pub a_mat: HermitianMatrix,
    pub b_mat: HermitianMatrix,
    pub c_mat: HermitianMatrix,
    pub p_budget: f64,
}

impl FpMatrices {
    pub fn new(
        a_mat: HermitianMatrix,
        b_mat: HermitianMatrix,
        c_mat: HermitianMatrix,
        p_budget: f64,
    ) -> Result<Self> {
        let n = a_mat.n();
        if b_mat.n() != n {
            return Err(Error::Dimension { expected: n, got: b_mat.n() });
        }
        if c_mat.n() != n {
            return Err(Error::Dimension { expected: n, got: c_mat.n() });
        }
        if !(p_budget > 0.0) || !p_budget.is_finite() {
            return Err(Error::domain(format!("power budget must be positive, got {p_budget}")));
        }
        Ok(FpMatrices { a_mat, b_mat, c_mat, p_budget })
    }

    pub fn n(&self) -> usize {
        self.a_mat.n()
    }

    /// Achieved ratio `z(p) / w(p)` at `p`.
    pub fn ratio(&self, p: &[Complex64]) -> Result<f64> {
        let w = self.b_mat.quad_form(p)?;
        if w <= 0.0 {
            return Err(Error::domain("ratio denominator vanished"));
        }
        Ok(self.a_mat.quad_form(p)? / w)
    }

    /// Signed relative constraint slack `(p^H C p - budget) / budget`;
    /// negative for interior points, near zero on the boundary.
    pub fn constraint_residual(&self, p: &[Complex64]) -> Result<f64> {
        Ok((self.c_mat.quad_form(p)? - self.p_budget) / self.p_budget)
    }
}

/// Exact solution of one concave subproblem.
#[derive(Debug, Clone)]
pub struct QcqpSolution {
    pub p: Vec<Complex64>,
    /// Constraint multiplier; zero for interior solutions.
    pub mu: f64,
    /// Number of `(y B + mu C)` systems solved.
    pub solves: usize,
    pub on_boundary: bool,
}

/// KKT stationarity residual `||(y B + mu C) p - a||`.
pub fn kkt_residual(
    a_vec: &[Complex64],
    y: f64,
    b_mat: &HermitianMatrix,
    c_mat: &HermitianMatrix,
    p: &[Complex64],
    mu: f64,
) -> Result<f64> {
    let bp = b_mat.matvec(p)?;
    let cp = c_mat.matvec(p)?;
    let r: Vec<Complex64> = bp
        .iter()
        .zip(&cp)
        .zip(a_vec)
        .map(|((b, c), a)| y * b + mu * c - a)
        .collect();
    Ok(cvec::norm(&r))
}

/// One KKT solve backend, chosen once per subproblem. The structured branch
/// composes the diagonal + rank-one parts directly so no dense matrix is
/// ever materialized inside the bisection loop.
enum KktBackend<'a> {
    Structured { b_mat: &'a DiagRankOne, c_mat: &'a DiagRankOne },
    Dense { b_mat: &'a HermitianMatrix, c_mat: &'a HermitianMatrix },
}

impl<'a> KktBackend<'a> {
    fn select(b_mat: &'a HermitianMatrix, c_mat: &'a HermitianMatrix) -> Self {
        if let (Some(fb), Some(fc)) = (b_mat.structure(), c_mat.structure()) {
            let one_rank_one = !(fb.has_rank_one() && fc.has_rank_one());
            let signs_ok = fb.scale >= 0.0
                && fc.scale >= 0.0
                && fb.diag.iter().all(|&d| d > 0.0)
                && fc.diag.iter().all(|&d| d >= 0.0);
            if one_rank_one && signs_ok {
                return KktBackend::Structured { b_mat: fb, c_mat: fc };
            }
        }
        KktBackend::Dense { b_mat, c_mat }
    }

    /// Solves `(y B + mu C) p = a`.
    fn solve(&self, y: f64, mu: f64, a_vec: &[Complex64]) -> Result<Vec<Complex64>> {
        match self {
            KktBackend::Structured { b_mat, c_mat } => {
                let diag: Vec<f64> = b_mat
                    .diag
                    .iter()
                    .zip(&c_mat.diag)
                    .map(|(&b, &c)| y * b + mu * c)
                    .collect();
                let (scale, vec) = if b_mat.has_rank_one() {
                    (y * b_mat.scale, b_mat.vec.clone())
                } else if c_mat.has_rank_one() {
                    (mu * c_mat.scale, c_mat.vec.clone())
                } else {
                    (0.0, Vec::new())
                };
                let k = DiagRankOne { diag, scale, vec };
                Ok(k.solve(a_vec))
            }
            KktBackend::Dense { b_mat, c_mat } => {
                let k = b_mat.lin_comb(y, c_mat, mu)?;
                pd_solve(&k, a_vec)
            }
        }
    }
}

/// Maximizes `2 Re(a^H p) - y p^H B p` subject to `p^H C p <= budget`.
///
/// The boundary multiplier is located by doubling from an asymptotic guess
/// and then bisecting until the relative constraint residual drops below
/// `tol`. Constraint power is strictly decreasing in `mu`, so the bracket
/// bisection cannot stall.
pub fn solve_concave_qcqp(
    a_vec: &[Complex64],
    y: f64,
    b_mat: &HermitianMatrix,
    c_mat: &HermitianMatrix,
    p_budget: f64,
    tol: f64,
) -> Result<QcqpSolution> {
    let n = a_vec.len();
    if b_mat.n() != n {
        return Err(Error::Dimension { expected: n, got: b_mat.n() });
    }
    if c_mat.n() != n {
        return Err(Error::Dimension { expected: n, got: c_mat.n() });
    }
    if !(p_budget > 0.0) || !p_budget.is_finite() {
        return Err(Error::domain(format!("power budget must be positive, got {p_budget}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("constraint tolerance must be positive"));
    }
    if cvec::norm_sq(a_vec) == 0.0 {
        // Objective reduces to -y p^H B p, maximized by p = 0.
        return Ok(QcqpSolution {
            p: vec![Complex64::new(0.0, 0.0); n],
            mu: 0.0,
            solves: 0,
            on_boundary: false,
        });
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(format!(
            "subproblem curvature parameter must be positive, got {y}"
        )));
    }

    let backend = KktBackend::select(b_mat, c_mat);
    let mut solves = 0usize;

    // Interior candidate: mu = 0.
    let p0 = backend.solve(y, 0.0, a_vec)?;
    solves += 1;
    let g0 = c_mat.quad_form(&p0)?;
    if g0 <= p_budget || (g0 - p_budget).abs() <= tol * p_budget {
        return Ok(QcqpSolution { p: p0, mu: 0.0, solves, on_boundary: false });
    }

    // Boundary: bracket the multiplier. For large mu the system approaches
    // mu C p = a, giving p^H C p ~ (a^H C^-1 a) / mu^2; seed the upper end
    // from that asymptote and double until feasible.
    let cinv_a = pd_solve(c_mat, a_vec)?;
    let ahc = cvec::dot(a_vec, &cinv_a).re.max(f64::MIN_POSITIVE);
    let mut hi = (ahc / p_budget).sqrt().max(f64::MIN_POSITIVE);
    let mut lo = 0.0f64;
    let mut g_hi;
    let mut p_hi;
    let mut doublings = 0usize;
    loop {
        p_hi = backend.solve(y, hi, a_vec)?;
        solves += 1;
        g_hi = c_mat.quad_form(&p_hi)?;
        if g_hi <= p_budget {
            break;
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 300 {
            return Err(Error::numeric(
                "constraint multiplier bracket did not close after 300 doublings",
            ));
        }
    }
    if (g_hi - p_budget).abs() <= tol * p_budget {
        return Ok(QcqpSolution { p: p_hi, mu: hi, solves, on_boundary: true });
    }

    // Bisect until the power sits on the budget.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let p_mid = backend.solve(y, mid, a_vec)?;
        solves += 1;
        let g_mid = c_mat.quad_form(&p_mid)?;
        if (g_mid - p_budget).abs() <= tol * p_budget {
            return Ok(QcqpSolution { p: p_mid, mu: mid, solves, on_boundary: true });
        }
        if g_mid > p_budget {
            lo = mid;
        } else {
            hi = mid;
            p_hi = p_mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            // Interval exhausted at machine precision; the feasible end is
            // the best representable boundary point.
            return Ok(QcqpSolution { p: p_hi, mu: hi, solves, on_boundary: true });
        }
    }
    Err(Error::numeric(
        "constraint bisection did not reach tolerance within 200 steps",
    ))
}

/// Options for the Dinkelbach ratio loop.
#[derive(Debug, Clone)]
pub struct DinkelbachOptions {
    /// Stop when `||p_t - p_{t-1}||` falls at or below this (absolute).
    pub tol_inner: f64,
    pub max_iter: usize,
    /// Refresh the numerator linearization at every iterate (the default
    /// algorithm). `false` keeps the linearization frozen at the start
    /// point, which preserves the subproblem but weakens the fixed point.
    pub refresh_linearization: bool,
    /// Relative constraint-residual tolerance passed to the QCQP solver.
    pub constraint_tol: f64,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        DinkelbachOptions {
            tol_inner: 1e-8,
            max_iter: 100,
            refresh_linearization: true,
            constraint_tol: 1e-9,
        }
    }
}

/// One row of the inner-loop trace: the parameter `y` entering iteration
/// `t`, the ratio achieved by its solution, and that solution's signed
/// relative constraint slack.
#[derive(Debug, Clone)]
pub struct DinkelbachTraceRow {
    pub t: usize,
    pub y: f64,
    pub objective: f64,
    pub constraint_residual: f64,
}

#[derive(Debug, Clone)]
pub struct DinkelbachResult {
    pub p: Vec<Complex64>,
    /// Final achieved ratio.
    pub y: f64,
    pub iterations: usize,
    /// Total KKT systems solved across all subproblems.
    pub kkt_solves: usize,
    pub converged: bool,
    pub trace: Vec<DinkelbachTraceRow>,
}

/// Runs the Dinkelbach loop from a feasible starting point.
pub fn dinkelbach(
    fp: &FpMatrices,
    p0: &[Complex64],
    opts: &DinkelbachOptions,
) -> Result<DinkelbachResult> {
    if p0.len() != fp.n() {
        return Err(Error::Dimension { expected: fp.n(), got: p0.len() });
    }
    if cvec::norm_sq(p0) == 0.0 {
        return Err(Error::precondition("Dinkelbach start point must be nonzero"));
    }
    let g_start = fp.c_mat.quad_form(p0)?;
    if g_start > fp.p_budget * (1.0 + 1e-6) {
        return Err(Error::precondition(format!(
            "Dinkelbach start point is infeasible: power {g_start:e} exceeds budget {:e}",
            fp.p_budget
        )));
    }
    let w0 = fp.b_mat.quad_form(p0)?;
    if w0 <= 0.0 {
        return Err(Error::domain("denominator quadratic vanished at the start point"));
    }

    let mut p = p0.to_vec();
    let mut y = fp.a_mat.quad_form(&p)? / w0;
    let mut a_vec = fp.a_mat.matvec(&p)?;
    let mut trace = Vec::new();
    let mut kkt_solves = 0usize;
    let mut converged = false;
    let mut iterations = 0usize;

    for t in 1..=opts.max_iter {
        iterations = t;
        let sol =
            solve_concave_qcqp(&a_vec, y, &fp.b_mat, &fp.c_mat, fp.p_budget, opts.constraint_tol)?;
        kkt_solves += sol.solves;
        if cvec::norm_sq(&sol.p) == 0.0 {
            // Numerator linearization vanished; the previous iterate is the
            // fixed point of the surrogate.
            converged = true;
            break;
        }
        let delta = cvec::dist(&sol.p, &p);
        p = sol.p;
        let y_next = fp.ratio(&p)?;
        trace.push(DinkelbachTraceRow {
            t,
            y,
            objective: y_next,
            constraint_residual: fp.constraint_residual(&p)?,
        });
        y = y_next;
        if opts.refresh_linearization {
            a_vec = fp.a_mat.matvec(&p)?;
        }
        if delta <= opts.tol_inner {
            converged = true;
            break;
        }
    }

    Ok(DinkelbachResult { p, y, iterations, kkt_solves, converged, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn approx(a: f64, b: f64, rtol: f64) -> bool {
        (a - b).abs() <= rtol * b.abs().max(a.abs()).max(1e-300)
    }

    fn rand_vec(rng: &mut ChaCha12Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
    }

    fn scalar_mat(v: f64) -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(vec![v])
    }

    /// Random structured instance of the kind the beamformers produce:
    /// rank-one-plus-identity numerator and denominator, diagonal constraint.
    fn random_fp(rng: &mut ChaCha12Rng, n: usize) -> FpMatrices {
        let u = rand_vec(rng, n);
        let f = rand_vec(rng, n);
        let a_mat = HermitianMatrix::diag_plus_rank_one(
            vec![0.05 + rng.gen::<f64>() * 0.1; n],
            1.0 + rng.gen::<f64>(),
            &u,
        )
        .unwrap();
        let b_mat = HermitianMatrix::diag_plus_rank_one(
            vec![0.2 + rng.gen::<f64>(); n],
            rng.gen::<f64>(),
            &f,
        )
        .unwrap();
        let cdiag: Vec<f64> = (0..n).map(|_| 0.5 + rng.gen::<f64>()).collect();
        let c_mat = HermitianMatrix::from_real_diagonal(cdiag);
        FpMatrices::new(a_mat, b_mat, c_mat, 1.0 + rng.gen::<f64>()).unwrap()
    }

    fn feasible_start(fp: &FpMatrices, rng: &mut ChaCha12Rng) -> Vec<Complex64> {
        let v = rand_vec(rng, fp.n());
        let g = fp.c_mat.quad_form(&v).unwrap();
        let t = (fp.p_budget / g).sqrt();
        v.iter().map(|z| z * t).collect()
    }

    #[test]
    fn qcqp_boundary_scalar_case_is_exact() {
        // (1 + mu) p = 10 with |p|^2 = 4 gives p = 2, mu = 4.
        let b = scalar_mat(1.0);
        let cm = scalar_mat(1.0);
        let sol = solve_concave_qcqp(&[c(10.0, 0.0)], 1.0, &b, &cm, 4.0, 1e-12).unwrap();
        assert!(sol.on_boundary);
        assert!(approx(sol.p[0].re, 2.0, 1e-9), "{:?}", sol.p);
        assert!(approx(sol.mu, 4.0, 1e-6), "{}", sol.mu);
        let r = kkt_residual(&[c(10.0, 0.0)], 1.0, &b, &cm, &sol.p, sol.mu).unwrap();
        assert!(r <= 1e-8 * 10.0, "{r}");
    }

    #[test]
    fn qcqp_interior_scalar_case() {
        // p = a / y inside the budget: a = 1, y = 2 gives p = 0.5, g = 0.25.
        let sol =
            solve_concave_qcqp(&[c(1.0, 0.0)], 2.0, &scalar_mat(1.0), &scalar_mat(1.0), 4.0, 1e-9)
                .unwrap();
        assert!(!sol.on_boundary);
        assert_eq!(sol.mu, 0.0);
        assert!(approx(sol.p[0].re, 0.5, 1e-12));
        assert_eq!(sol.solves, 1);
    }

    #[test]
    fn qcqp_zero_linear_term_returns_zero() {
        let sol =
            solve_concave_qcqp(&[c(0.0, 0.0)], 1.0, &scalar_mat(1.0), &scalar_mat(1.0), 1.0, 1e-9)
                .unwrap();
        assert_eq!(sol.p, vec![c(0.0, 0.0)]);
        assert_eq!(sol.solves, 0);
    }

    #[test]
    fn qcqp_solution_is_phase_covariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(20);
        let n = 4;
        let fp = random_fp(&mut rng, n);
        let a = rand_vec(&mut rng, n);
        let rot = Complex64::from_polar(1.0, 0.83);
        let a_rot: Vec<Complex64> = a.iter().map(|z| z * rot).collect();
        let s1 = solve_concave_qcqp(&a, 1.3, &fp.b_mat, &fp.c_mat, fp.p_budget, 1e-10).unwrap();
        let s2 = solve_concave_qcqp(&a_rot, 1.3, &fp.b_mat, &fp.c_mat, fp.p_budget, 1e-10).unwrap();
        let rotated: Vec<Complex64> = s1.p.iter().map(|z| z * rot).collect();
        assert!(crate::cvec::dist(&rotated, &s2.p) <= 1e-8 * crate::cvec::norm(&s1.p));
    }

    #[test]
    fn qcqp_structured_matches_dense_backend() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for trial in 0..10 {
            let n = 2 + trial % 5;
            let fp = random_fp(&mut rng, n);
            let a = rand_vec(&mut rng, n);
            let y = 0.5 + rng.gen::<f64>();
            let fast = solve_concave_qcqp(&a, y, &fp.b_mat, &fp.c_mat, fp.p_budget, 1e-11).unwrap();
            // Rebuild B/C without structure to force the dense branch.
            let rows_b: Vec<Vec<Complex64>> =
                (0..n).map(|i| (0..n).map(|j| fp.b_mat.get(i, j)).collect()).collect();
            let rows_c: Vec<Vec<Complex64>> =
                (0..n).map(|i| (0..n).map(|j| fp.c_mat.get(i, j)).collect()).collect();
            let b_dense = HermitianMatrix::from_rows(&rows_b).unwrap();
            let c_dense = HermitianMatrix::from_rows(&rows_c).unwrap();
            let slow = solve_concave_qcqp(&a, y, &b_dense, &c_dense, fp.p_budget, 1e-11).unwrap();
            assert!(
                crate::cvec::dist(&fast.p, &slow.p)
                    <= 1e-6 * crate::cvec::norm(&slow.p).max(1e-12),
                "trial {trial}"
            );
        }
    }

    #[test]
    fn qcqp_kkt_residuals_hold_on_random_instances() {
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        for _ in 0..20 {
            let n = 2 + (rng.gen::<u32>() % 6) as usize;
            let fp = random_fp(&mut rng, n);
            let a = rand_vec(&mut rng, n);
            let y = 0.2 + rng.gen::<f64>();
            let sol = solve_concave_qcqp(&a, y, &fp.b_mat, &fp.c_mat, fp.p_budget, 1e-10).unwrap();
            let r = kkt_residual(&a, y, &fp.b_mat, &fp.c_mat, &sol.p, sol.mu).unwrap();
            assert!(r <= 1e-8 * crate::cvec::norm(&a), "stationarity residual {r}");
            let g = fp.c_mat.quad_form(&sol.p).unwrap();
            if sol.on_boundary {
                assert!((g - fp.p_budget).abs() <= 1e-9 * fp.p_budget, "{g}");
            } else {
                assert!(g <= fp.p_budget * (1.0 + 1e-12));
                assert_eq!(sol.mu, 0.0);
            }
        }
    }

    #[test]
    fn dinkelbach_scalar_fixed_point_in_one_iteration() {
        // Ratio is A/B = 2 for every p, so the start point is stationary.
        let fp =
            FpMatrices::new(scalar_mat(2.0), scalar_mat(1.0), scalar_mat(1.0), 4.0).unwrap();
        let res = dinkelbach(&fp, &[c(2.0, 0.0)], &DinkelbachOptions::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
        assert!(approx(res.y, 2.0, 1e-12));
        assert!(approx(res.p[0].re, 2.0, 1e-9));
    }

    #[test]
    fn dinkelbach_identical_quadratics_give_unit_ratio() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let n = 3;
        let f = rand_vec(&mut rng, n);
        let m = HermitianMatrix::diag_plus_rank_one(vec![0.5; n], 1.0, &f).unwrap();
        let fp = FpMatrices::new(
            m.clone(),
            m,
            HermitianMatrix::scaled_identity(n, 1.0),
            2.0,
        )
        .unwrap();
        let p0 = feasible_start(&fp, &mut rng);
        let res = dinkelbach(&fp, &p0, &DinkelbachOptions::default()).unwrap();
        assert!(res.converged);
        assert!(approx(res.y, 1.0, 1e-12), "{}", res.y);
    }

    #[test]
    fn dinkelbach_rejects_bad_starts() {
        let fp =
            FpMatrices::new(scalar_mat(1.0), scalar_mat(1.0), scalar_mat(1.0), 1.0).unwrap();
        assert!(dinkelbach(&fp, &[c(0.0, 0.0)], &DinkelbachOptions::default()).is_err());
        assert!(dinkelbach(&fp, &[c(5.0, 0.0)], &DinkelbachOptions::default()).is_err());
    }

    #[test]
    fn dinkelbach_trace_is_monotone_and_feasible() {
        let mut rng = ChaCha12Rng::seed_from_u64(24);
        for trial in 0..12 {
            let n = 2 + trial % 4;
            let fp = random_fp(&mut rng, n);
            let p0 = feasible_start(&fp, &mut rng);
            for refresh in [true, false] {
                let opts = DinkelbachOptions {
                    tol_inner: 1e-9,
                    max_iter: 200,
                    refresh_linearization: refresh,
                    constraint_tol: 1e-10,
                };
                let res = dinkelbach(&fp, &p0, &opts).unwrap();
                assert!(res.converged, "trial {trial} refresh {refresh}");
                let mut prev = f64::NEG_INFINITY;
                for row in &res.trace {
                    // The ratio ascent argument needs the linearization
                    // point to track the iterate; the frozen variant has no
                    // such guarantee.
                    if refresh {
                        assert!(
                            row.objective >= prev - 1e-10 * prev.abs().max(1.0),
                            "trial {trial}: ratio fell {prev} -> {}",
                            row.objective
                        );
                        prev = row.objective;
                    }
                    // Feasible up to the bisection tolerance; interior
                    // iterates sit strictly below the budget.
                    assert!(row.constraint_residual <= 2e-9, "{}", row.constraint_residual);
                }
                assert!(res.kkt_solves >= res.iterations);
            }
        }
    }

    #[test]
    fn dinkelbach_matches_random_search_at_n2() {
        let mut rng = ChaCha12Rng::seed_from_u64(25);
        for trial in 0..5 {
            let fp = random_fp(&mut rng, 2);
            let p0 = feasible_start(&fp, &mut rng);
            let res = dinkelbach(&fp, &p0, &DinkelbachOptions::default()).unwrap();
            // The ratio is scale invariant, so unconstrained probes bound
            // the constrained optimum.
            let mut best = f64::NEG_INFINITY;
            for _ in 0..200_000 {
                let v = rand_vec(&mut rng, 2);
                let q = fp.ratio(&v).unwrap();
                if q > best {
                    best = q;
                }
            }
            assert!(
                res.y >= best * (1.0 - 2e-3),
                "trial {trial}: solver {} vs search {best}",
                res.y
            );
        }
    }
}

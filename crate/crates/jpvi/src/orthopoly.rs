//! Monic orthogonal polynomials for the jump-perturbed Jacobi weight.
//!
//! The system is built from a single Cholesky factorization of the
//! moment matrix: with `H = L L^T` and `U = L diag(1/L_jj)`, the rows of
//! `U^{-1}` are the monic coefficient vectors, `h_n = L_nn^2` are the
//! squared norms, and the three-term recurrence coefficients follow from
//! `beta_n = h_n / h_{n-1}` and `alpha_n = p1(n) - p1(n+1)` where
//! `p1(n)` is the subleading coefficient of `P_n`. The determinant path
//! and the polynomial path therefore share one source of truth.
//!
//! Auxiliary quantities attached to the jump location,
//!
//! ```text
//! R_n = B w_0(t) P_n(t)^2 / h_n
//! r_n = B w_0(t) P_n(t) P_{n-1}(t) / h_{n-1}
//! x_n = beta/h_n     int_0^1 P_n(y)^2        w(y)/(1-y) dy
//! y_n = beta/h_{n-1} int_0^1 P_n(y) P_{n-1}(y) w(y)/(1-y) dy
//! ```
//!
//! feed the ladder-operator coefficients `A_n(z)`, `B_n(z)`. The
//! integrals for `x_n`, `y_n` are replaced in production by algebraic
//! routes (`x_n = 2n+1+alpha+beta + t R_n`, `y_n = t r_n - p1(n)`); the
//! quadrature route is asserted against them in debug builds.

use crate::error::{Error, Result};
use crate::moments::{moment_table, WeightParams};
use crate::numerics::{self, real, Matrix, Real, MAX_PREC};
use crate::specfun::SpecFunConfig;
use rug::ops::CompleteRound;

/// Monic orthogonal polynomial system up to degree `n_max`.
#[derive(Clone, Debug)]
pub struct OPSystem {
    pub n_max: usize,
    pub params: WeightParams,
    pub t: Real,
    pub prec: u32,
    /// Row `n` holds the monic coefficients of `P_n`, constant term first.
    pub coeffs: Vec<Vec<Real>>,
    /// Squared norms `h_0 ..= h_{n_max}`.
    pub h: Vec<Real>,
    /// Recurrence `alpha_0 .. alpha_{n_max - 1}`.
    pub alpha_rec: Vec<Real>,
    /// Recurrence `beta_1 ..= beta_{n_max}`; index 0 is unused and zero.
    pub beta_rec: Vec<Real>,
    /// Subleading coefficients `p1(0) ..= p1(n_max)`, with `p1(0) = 0`.
    pub p1: Vec<Real>,
}

/// Auxiliary quantities at the jump for a fixed degree `n`.
#[derive(Clone, Debug)]
pub struct AuxQuantities {
    pub n: usize,
    pub big_r: Real,
    pub small_r: Real,
    pub x: Real,
    pub y: Real,
}

/// Build the system at (params, t) up to degree `n_max`, escalating
/// precision geometrically if the moment matrix factorization fails.
pub fn build_system(n_max: usize, params: &WeightParams, t: &Real, prec: u32) -> Result<OPSystem> {
    let mut p = prec;
    loop {
        match build_at(n_max, params, t, p) {
            Err(Error::NotPositiveDefinite(_)) | Err(Error::NonFinitePivot) if p < MAX_PREC => {
                p = (p * 2).min(MAX_PREC);
            }
            other => return other,
        }
    }
}

fn build_at(n_max: usize, params: &WeightParams, t: &Real, prec: u32) -> Result<OPSystem> {
    let cfg = SpecFunConfig::new(prec);
    let tt = real(prec, t);
    let pp = params.at_prec(prec);
    // moment_table(n_max + 1, ..) supplies mu_0 .. mu_{2 n_max}
    let table = moment_table(n_max + 1, &pp, &tt, &cfg)?;
    let dim = n_max + 1;
    let m = Matrix::symmetric_from_fn(dim, prec, |i, j| table.mu[i + j].clone());
    let fac = numerics::factor_spd(&m)?;
    let l = fac.lower();

    let mut h = Vec::with_capacity(dim);
    for j in 0..dim {
        h.push(l.at(j, j).clone().square());
    }

    // V = U^{-1} for the unit lower triangular U = L diag(1/L_jj),
    // by forward substitution; row n of V is the coefficient vector of P_n.
    let mut u = vec![vec![real(prec, 0); dim]; dim];
    for i in 0..dim {
        for j in 0..=i {
            u[i][j] = (l.at(i, j) / l.at(j, j)).complete(prec);
        }
    }
    let mut coeffs: Vec<Vec<Real>> = Vec::with_capacity(dim);
    for nrow in 0..dim {
        let mut row = vec![real(prec, 0); nrow + 1];
        row[nrow] = real(prec, 1);
        for j in (0..nrow).rev() {
            let mut s = real(prec, 0);
            for k in j..nrow {
                s += (&u[nrow][k] * &coeffs[k][j]).complete(prec);
            }
            row[j] = -s;
        }
        coeffs.push(row);
    }

    let p1: Vec<Real> = (0..dim)
        .map(|n| {
            if n == 0 {
                real(prec, 0)
            } else {
                coeffs[n][n - 1].clone()
            }
        })
        .collect();

    let alpha_rec: Vec<Real> = (0..n_max).map(|n| (&p1[n] - &p1[n + 1]).complete(prec)).collect();
    let mut beta_rec = vec![real(prec, 0)];
    for n in 1..dim {
        beta_rec.push((&h[n] / &h[n - 1]).complete(prec));
    }

    let sys = OPSystem {
        n_max,
        params: pp,
        t: tt,
        prec,
        coeffs,
        h,
        alpha_rec,
        beta_rec,
        p1,
    };
    #[cfg(debug_assertions)]
    sys.debug_verify();
    Ok(sys)
}

impl OPSystem {
    /// Evaluate `(P_n(z), P_n'(z))` by Horner's scheme on the stored
    /// monic coefficients.
    pub fn eval_poly(&self, n: usize, z: &Real) -> (Real, Real) {
        assert!(n <= self.n_max);
        let prec = self.prec;
        let row = &self.coeffs[n];
        let mut p = real(prec, 0);
        let mut dp = real(prec, 0);
        for c in row.iter().rev() {
            dp = dp * z + &p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `(P_n, P_n', P_n'')` for the z-space ODE residual.
    pub fn eval_poly2(&self, n: usize, z: &Real) -> (Real, Real, Real) {
        let prec = self.prec;
        let row = &self.coeffs[n];
        let mut p = real(prec, 0);
        let mut dp = real(prec, 0);
        let mut d2p = real(prec, 0);
        for c in row.iter().rev() {
            d2p = d2p * z + &dp;
            dp = dp * z + &p;
            p = p * z + c;
        }
        (p, dp, d2p * 2u32)
    }

    /// w_0(t) = t^alpha (1-t)^beta, zero at the endpoints.
    fn w0_at_t(&self) -> Real {
        let prec = self.prec;
        if self.t <= 0 || self.t >= 1 {
            return real(prec, 0);
        }
        self.params.w0(&self.t)
    }

    /// Auxiliary quantities at degree `n <= n_max - 1` (so that the
    /// production routes for `x_n`, `y_n` can reach `p1(n)` and `R_n`).
    pub fn aux_quantities(&self, n: usize) -> Result<AuxQuantities> {
        assert!(n <= self.n_max);
        let prec = self.prec;
        let w0 = self.w0_at_t();
        let (pn, _) = self.eval_poly(n, &self.t);
        let big_r = if w0.is_zero() {
            real(prec, 0)
        } else {
            (&self.params.b * &w0).complete(prec) * pn.clone().square() / &self.h[n]
        };
        let small_r = if n == 0 || w0.is_zero() {
            real(prec, 0)
        } else {
            let (pm, _) = self.eval_poly(n - 1, &self.t);
            (&self.params.b * &w0).complete(prec) * (&pn * &pm).complete(prec) / &self.h[n - 1]
        };
        // x_n = 2n+1+alpha+beta + t R_n ; y_n = t r_n - p1(n)
        let x = real(prec, 2 * n as u32 + 1)
            + real(prec, &self.params.alpha)
            + real(prec, &self.params.beta)
            + (&self.t * &big_r).complete(prec);
        let y = (&self.t * &small_r).complete(prec) - &self.p1[n];
        Ok(AuxQuantities { n, big_r, small_r, x, y })
    }

    /// Ladder coefficients `(A_n(z), B_n(z))` from the partial-fraction
    /// forms. `z` may not sit on a pole.
    pub fn ladder_eval(&self, n: usize, z: &Real) -> Result<(Real, Real)> {
        let prec = self.prec;
        let aux = self.aux_quantities(n)?;
        let zm_t = real(prec, z) - &self.t;
        let zm_1 = real(prec, z) - 1u32;
        if zm_t.is_zero() || zm_1.is_zero() || z.is_zero() {
            return Err(Error::PoleEvaluation);
        }
        let a_n = real(prec, &aux.big_r) / &zm_t - real(prec, &aux.x) / &zm_1
            + (real(prec, &aux.x) - &aux.big_r) / z;
        let b_n = real(prec, &aux.small_r) / &zm_t - real(prec, &aux.y) / &zm_1
            + (real(prec, &aux.y) - &aux.small_r - real(prec, n as u32)) / z;
        #[cfg(debug_assertions)]
        self.debug_check_ladder(n, z, &a_n, &b_n);
        Ok((a_n, b_n))
    }

    /// `v_0'(z) = -alpha/z - beta/(z-1)` for the reference weight.
    pub fn v0_prime(&self, z: &Real) -> Real {
        let prec = self.prec;
        -(real(prec, &self.params.alpha) / z)
            - real(prec, &self.params.beta) / (z - real(prec, 1))
    }

    /// Verify the whole system against quadrature of the defining
    /// integrals on a single shared tanh-sinh node set: pairwise
    /// orthogonality, the squared norms, and the integral routes for
    /// `x_n`, `y_n`.
    #[cfg(debug_assertions)]
    fn debug_verify(&self) {
        if self.n_max > 8 {
            return;
        }
        let prec = self.prec;
        let wprec = 2 * prec;
        let nodes = crate::moments::jump_split_nodes(
            &self.params,
            &self.t,
            wprec,
            5,
        );
        // values[i][m] = P_i evaluated at node m, at wide precision
        let values: Vec<Vec<Real>> = (0..=self.n_max)
            .map(|i| {
                nodes
                    .iter()
                    .map(|(x, _)| {
                        let mut p = real(wprec, 0);
                        for c in self.coeffs[i].iter().rev() {
                            p = p * x + c;
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        let inv_one_minus: Vec<Real> =
            nodes.iter().map(|(x, _)| real(wprec, 1) / (real(wprec, 1) - x)).collect();

        for i in 0..=self.n_max {
            for j in 0..=i {
                let mut s = real(wprec, 0);
                for m in 0..nodes.len() {
                    s += (&values[i][m] * &values[j][m]).complete(wprec) * &nodes[m].1;
                }
                if i == j {
                    let r = numerics::rel_residual(&s, &self.h[i]);
                    debug_assert!(
                        r < 1e-25,
                        "norm h_{i} disagrees with quadrature: {:e}",
                        r.to_f64()
                    );
                } else {
                    let scale = (&self.h[i] * &self.h[j]).complete(wprec).sqrt();
                    debug_assert!(
                        s.clone().abs() < real(wprec, 1e-25f64) * scale.max(&real(wprec, 1)),
                        "orthogonality failure at ({i}, {j}): {:e}",
                        s.to_f64()
                    );
                }
            }
        }

        // x_n, y_n: beta/h times the integrals with an extra 1/(1-y)
        let beta = real(wprec, &self.params.beta);
        for n in 1..=self.n_max {
            let mut sx = real(wprec, 0);
            let mut sy = real(wprec, 0);
            for m in 0..nodes.len() {
                let base = (&values[n][m] * &nodes[m].1).complete(wprec) * &inv_one_minus[m];
                sx += (&values[n][m] * &base).complete(wprec);
                sy += (&values[n - 1][m] * &base).complete(wprec);
            }
            let x_quad = beta.clone() * sx / &self.h[n];
            let y_quad = beta.clone() * sy / &self.h[n - 1];
            let aux = self.aux_quantities(n).expect("aux within built range");
            let rx = numerics::rel_residual(&aux.x, &x_quad);
            let ry = numerics::rel_residual(&aux.y, &y_quad);
            debug_assert!(rx < 1e-20, "x_{n} integral route disagrees: {:e}", rx.to_f64());
            debug_assert!(ry < 1e-20, "y_{n} integral route disagrees: {:e}", ry.to_f64());
        }
    }

    #[cfg(debug_assertions)]
    fn debug_check_ladder(&self, n: usize, z: &Real, a_n: &Real, b_n: &Real) {
        // lowering: P_n' = -B_n P_n + beta_n A_n P_{n-1}
        if n == 0 || n > self.n_max {
            return;
        }
        let prec = self.prec;
        let (pn, dpn) = self.eval_poly(n, z);
        let (pm, _) = self.eval_poly(n - 1, z);
        let rhs = -(b_n * &pn).complete(prec)
            + (&self.beta_rec[n] * a_n).complete(prec) * &pm;
        let r = numerics::rel_residual(&dpn, &rhs);
        debug_assert!(
            r < 1e-25,
            "lowering relation fails at n = {n}: {:e}",
            r.to_f64()
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{hankel, WeightParams};

    const P: u32 = 256;

    fn wp(alpha: f64, beta: f64, a: f64, b: f64) -> WeightParams {
        WeightParams::from_f64(alpha, beta, a, b, P).unwrap()
    }

    fn rr(a: &Real, b: &Real) -> f64 {
        numerics::rel_residual(a, b).to_f64()
    }

    #[test]
    fn legendre_shifted_case() {
        // A = 1, B = 0, alpha = beta = 1: weight x(1-x); the monic
        // degree-1 polynomial is x - 1/2 and h_0 = 1/6.
        let sys = build_system(3, &wp(1.0, 1.0, 1.0, 0.0), &real(P, 0.5f64), P).unwrap();
        assert!(rr(&sys.h[0], &(real(P, 1) / real(P, 6u32))) < 1e-70);
        assert!(rr(&sys.coeffs[1][0], &real(P, -0.5f64)) < 1e-70);
        // symmetric weight about 1/2: alpha_rec all equal 1/2
        for a in &sys.alpha_rec {
            assert!(rr(a, &real(P, 0.5f64)) < 1e-70);
        }
    }

    #[test]
    fn norms_match_hankel_ratios() {
        let params = wp(1.5, 0.5, 1.0, 1.0);
        let t = real(P, 0.4f64);
        let sys = build_system(3, &params, &t, P).unwrap();
        // h_n = D_{n+1} / D_n
        for n in 1..=3usize {
            let da = hankel(n, &params, &t, P).unwrap().log_det;
            let db = hankel(n + 1, &params, &t, P).unwrap().log_det;
            let ratio = (db - da).exp();
            assert!(rr(&sys.h[n], &ratio) < 1e-60, "n = {n}");
        }
    }

    #[test]
    fn recurrence_holds_in_coefficient_space() {
        let params = wp(0.7, 2.3, 1.0, 2.0);
        let t = real(P, 0.3f64);
        let sys = build_system(4, &params, &t, P).unwrap();
        for n in 1..4usize {
            // x P_n - P_{n+1} - alpha_n P_n - beta_n P_{n-1} = 0
            let mut res = vec![real(P, 0); n + 2];
            for (j, c) in sys.coeffs[n].iter().enumerate() {
                res[j + 1] += c;
            }
            for (j, c) in sys.coeffs[n + 1].iter().enumerate() {
                res[j] -= c;
            }
            for (j, c) in sys.coeffs[n].iter().enumerate() {
                res[j] -= (&sys.alpha_rec[n] * c).complete(P);
            }
            for (j, c) in sys.coeffs[n - 1].iter().enumerate() {
                res[j] -= (&sys.beta_rec[n] * c).complete(P);
            }
            for c in &res {
                assert!(c.clone().abs() < 1e-65, "n = {n}: {:e}", c.to_f64());
            }
        }
    }

    #[test]
    fn scale_invariance_of_recurrence_and_aux() {
        let t = real(P, 0.6f64);
        let s1 = build_system(3, &wp(1.0, 2.0, 1.0, 1.0), &t, P).unwrap();
        let s2 = build_system(3, &wp(1.0, 2.0, 3.0, 3.0), &t, P).unwrap();
        for n in 0..3 {
            assert!(rr(&s1.alpha_rec[n], &s2.alpha_rec[n]) < 1e-65);
        }
        for n in 1..=3 {
            assert!(rr(&s1.beta_rec[n], &s2.beta_rec[n]) < 1e-65);
        }
        let a1 = s1.aux_quantities(2).unwrap();
        let a2 = s2.aux_quantities(2).unwrap();
        assert!(rr(&a1.big_r, &a2.big_r) < 1e-60);
        assert!(rr(&a1.small_r, &a2.small_r) < 1e-60);
        assert!(rr(&a1.x, &a2.x) < 1e-60);
        assert!(rr(&a1.y, &a2.y) < 1e-60);
        // h scales linearly in (A, B)
        assert!(rr(&(real(P, 3) * &s1.h[2]), &s2.h[2]) < 1e-60);
    }

    #[test]
    fn aux_limits_at_t_zero() {
        // R_n, r_n -> 0; y_n -> n(n+alpha)/(2n+alpha+beta);
        // x_n -> 2n+1+alpha+beta
        let alpha = 1.5f64;
        let beta = 0.5f64;
        let sys = build_system(4, &wp(alpha, beta, 1.0, 1.0), &real(P, 0), P).unwrap();
        for n in 1..=3usize {
            let aux = sys.aux_quantities(n).unwrap();
            assert!(aux.big_r.is_zero());
            assert!(aux.small_r.is_zero());
            let nf = real(P, n as u32);
            let y0 = nf.clone() * (nf.clone() + real(P, alpha))
                / (real(P, 2) * &nf + real(P, alpha) + real(P, beta));
            assert!(rr(&aux.y, &y0) < 1e-60, "n = {n}");
            let x0 = real(P, 2) * &nf + real(P, 1) + real(P, alpha) + real(P, beta);
            assert!(rr(&aux.x, &x0) < 1e-60, "n = {n}");
        }
    }

    #[test]
    fn sum_rule_for_logdet_derivative() {
        // d/dt ln D_n = -(R_0 + ... + R_{n-1})
        let params = wp(1.0, 2.0, 1.0, 1.0);
        let t = real(P, 0.45f64);
        let n = 3usize;
        let sys = build_system(n, &params, &t, P).unwrap();
        let mut sum = real(P, 0);
        for j in 0..n {
            sum += sys.aux_quantities(j).unwrap().big_r;
        }
        let d1 = hankel(n, &params, &t, P).unwrap().d_logdet.0;
        assert!(rr(&d1, &(-sum)) < 1e-55);
    }

    #[test]
    fn log_norm_derivative_is_minus_big_r() {
        // d/dt ln h_n = -R_n, checked by central difference
        let params = wp(1.0, 1.0, 1.0, 1.0);
        let t = real(P, 0.5f64);
        let n = 2usize;
        let sys = build_system(n + 1, &params, &t, P).unwrap();
        let aux = sys.aux_quantities(n).unwrap();
        let h = real(P, 1e-12f64);
        let sp = build_system(n + 1, &params, &(t.clone() + &h), P).unwrap();
        let sm = build_system(n + 1, &params, &(t.clone() - &h), P).unwrap();
        let fd = ((&sp.h[n] / &sm.h[n]).complete(P).ln()) / (real(P, 2) * &h);
        assert!(rr(&fd, &(-aux.big_r.clone())) < 1e-9);
    }

    #[test]
    fn p1_derivative_is_small_r() {
        // d/dt p1(n, t) = r_n
        let params = wp(1.5, 0.5, 1.0, 2.0);
        let t = real(P, 0.35f64);
        let n = 3usize;
        let sys = build_system(n, &params, &t, P).unwrap();
        let aux = sys.aux_quantities(n).unwrap();
        let h = real(P, 1e-12f64);
        let sp = build_system(n, &params, &(t.clone() + &h), P).unwrap();
        let sm = build_system(n, &params, &(t.clone() - &h), P).unwrap();
        let fd = ((&sp.p1[n] - &sm.p1[n]).complete(P)) / (real(P, 2) * &h);
        assert!(rr(&fd, &aux.small_r) < 1e-9);
    }

    #[test]
    fn ladder_lowering_relation() {
        let params = wp(1.0, 2.0, 1.0, 1.0);
        let t = real(P, 0.4f64);
        let sys = build_system(4, &params, &t, P).unwrap();
        for n in 1..=3usize {
            for zf in [0.15f64, 0.62, 0.93] {
                let z = real(P, zf);
                let (a_n, b_n) = sys.ladder_eval(n, &z).unwrap();
                let (pn, dpn) = sys.eval_poly(n, &z);
                let (pm, _) = sys.eval_poly(n - 1, &z);
                let rhs = -(&b_n * &pn).complete(P)
                    + (&sys.beta_rec[n] * &a_n).complete(P) * &pm;
                assert!(rr(&dpn, &rhs) < 1e-40, "n = {n}, z = {zf}");
            }
        }
    }

    #[test]
    fn ladder_pole_rejected() {
        let sys = build_system(2, &wp(1.0, 1.0, 1.0, 1.0), &real(P, 0.5f64), P).unwrap();
        assert!(matches!(
            sys.ladder_eval(1, &real(P, 0.5f64)),
            Err(Error::PoleEvaluation)
        ));
    }
}

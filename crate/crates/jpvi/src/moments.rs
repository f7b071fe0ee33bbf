//! Moments of the jump-perturbed Jacobi weight, their exact
//! t-derivatives, the Hankel matrix/determinant and its log-derivative
//! H_n, and a brute-force multiple-integral oracle for small n.
//!
//! Every moment is computed independently in closed form; no recurrence
//! runs along the Hankel row and no finite difference ever enters the
//! production path for the determinant derivatives.

use crate::error::{Error, Result};
use crate::numerics::{self, real, Matrix, Real, MAX_PREC};
use crate::specfun::{log_beta, tail_beta, SpecFunConfig};
use rug::ops::CompleteRound;

/// Parameters (alpha, beta, A, B) of the weight
/// `x^alpha (1-x)^beta (A + B theta(x-t))` on [0, 1].
#[derive(Clone, Debug)]
pub struct WeightParams {
    pub alpha: Real,
    pub beta: Real,
    pub a: Real,
    pub b: Real,
}

impl WeightParams {
    pub fn new(alpha: Real, beta: Real, a: Real, b: Real) -> Result<Self> {
        if alpha <= 0 || beta <= 0 {
            return Err(Error::DomainError("weight requires alpha > 0 and beta > 0".into()));
        }
        let prec = a.prec().max(b.prec());
        let sum = (&a + &b).complete(prec);
        if a < 0 || sum < 0 || (a.is_zero() && b.is_zero()) {
            return Err(Error::DomainError(
                "jump factor requires A >= 0, A + B >= 0, not both zero".into(),
            ));
        }
        Ok(WeightParams { alpha, beta, a, b })
    }

    pub fn from_f64(alpha: f64, beta: f64, a: f64, b: f64, prec: u32) -> Result<Self> {
        WeightParams::new(real(prec, alpha), real(prec, beta), real(prec, a), real(prec, b))
    }

    pub fn prec(&self) -> u32 {
        self.alpha
            .prec()
            .max(self.beta.prec())
            .max(self.a.prec())
            .max(self.b.prec())
    }

    /// Same parameters re-rounded to `prec` bits.
    pub fn at_prec(&self, prec: u32) -> WeightParams {
        WeightParams {
            alpha: real(prec, &self.alpha),
            beta: real(prec, &self.beta),
            a: real(prec, &self.a),
            b: real(prec, &self.b),
        }
    }

    /// Reference weight w_0(x) = x^alpha (1-x)^beta.
    pub fn w0(&self, x: &Real) -> Real {
        let prec = x.prec().max(self.prec());
        let lx = real(prec, x).ln() * &self.alpha;
        let l1x = (real(prec, 1) - x).ln() * &self.beta;
        (lx + l1x).exp()
    }

    /// Full weight w_0(x) w_J(x; t) with theta(0) = 1.
    pub fn weight(&self, x: &Real, t: &Real) -> Real {
        let prec = x.prec().max(self.prec());
        let jump = if x >= t {
            (&self.a + &self.b).complete(prec)
        } else {
            real(prec, &self.a)
        };
        self.w0(x) * jump
    }
}

/// Moments mu_k(t) and their first three t-derivatives.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub t: Real,
    pub params: WeightParams,
    pub mu: Vec<Real>,
    pub mu1: Vec<Real>,
    pub mu2: Vec<Real>,
    pub mu3: Vec<Real>,
}

/// mu_k(t) = A B(alpha+k+1, beta+1) + B int_t^1 x^(alpha+k) (1-x)^beta dx.
pub fn moment(k: usize, params: &WeightParams, t: &Real, cfg: &SpecFunConfig) -> Result<Real> {
    let prec = cfg.precision_bits;
    let aa = real(prec, &params.alpha) + (k as u32 + 1);
    let bb = real(prec, &params.beta) + 1u32;
    let complete = log_beta(&aa, &bb)?.exp();
    let tail = tail_beta(&aa, &bb, t, cfg)?;
    let value = (&params.a * &complete).complete(prec) + (&params.b * &tail).complete(prec);
    #[cfg(debug_assertions)]
    if *t > 0 && *t < 1 && !params.b.is_zero() {
        // cross-check the jump term against the 2F1 closed form
        let hyp = moment_jump_hyp2f1(k, params, t, cfg)?;
        let r = numerics::rel_residual(&tail, &hyp);
        debug_assert!(
            r < real(prec, 1e-9f64).max(&(real(prec, &cfg.series_rel_tol) << 24)),
            "moment closed form vs 2F1 disagree: {:e}",
            r.to_f64()
        );
    }
    Ok(value)
}

/// The jump term of the moment via the hypergeometric closed form
/// `(1-t)^(1+beta) t^(k+alpha) / (1+beta) * 2F1(-alpha-k, 1; 2+beta; 1-1/t)`.
pub fn moment_jump_hyp2f1(
    k: usize,
    params: &WeightParams,
    t: &Real,
    cfg: &SpecFunConfig,
) -> Result<Real> {
    let prec = cfg.precision_bits;
    let z = real(prec, 1) - real(prec, 1) / t;
    let a = -(real(prec, &params.alpha) + real(prec, k as u32));
    let b = real(prec, 1);
    let c = real(prec, &params.beta) + 2u32;
    let f = crate::specfun::hyp2f1(&a, &b, &c, &z, cfg)?;
    let bp1 = real(prec, &params.beta) + 1u32;
    let front = ((real(prec, 1) - t).ln() * &bp1).exp()
        * (real(prec, t).ln() * (real(prec, &params.alpha) + real(prec, k as u32))).exp()
        / &bp1;
    Ok(front * f)
}

/// Closed-form derivative rows. The jump contributes the only
/// t-dependence: mu_k'(t) = -B t^(alpha+k) (1-t)^beta, and the higher
/// rows differentiate that product via its logarithmic derivative.
pub fn moment_table(n: usize, params: &WeightParams, t: &Real, cfg: &SpecFunConfig) -> Result<MomentTable> {
    assert!(n >= 1);
    let prec = cfg.precision_bits;
    let count = 2 * n - 1;
    let mut mu = Vec::with_capacity(count);
    let mut mu1 = Vec::with_capacity(count);
    let mut mu2 = Vec::with_capacity(count);
    let mut mu3 = Vec::with_capacity(count);
    let one = real(prec, 1);
    let interior = *t > 0 && *t < 1;
    for k in 0..count {
        mu.push(moment(k, params, t, cfg)?);
        if params.b.is_zero() || !interior {
            // no jump, or the limit paths t = 0, 1 where the derivative
            // factor t^(alpha+k)(1-t)^beta vanishes (alpha, beta > 0)
            mu1.push(real(prec, 0));
            mu2.push(real(prec, 0));
            mu3.push(real(prec, 0));
            continue;
        }
        let e = real(prec, &params.alpha) + real(prec, k as u32);
        // u = t^e (1-t)^beta; g = u'/u
        let u = (real(prec, t).ln() * &e).exp() * ((&one - t).complete(prec).ln() * &params.beta).exp();
        let g = e.clone() / t - real(prec, &params.beta) / (&one - t).complete(prec);
        let g1 = -(e.clone() / real(prec, t).square())
            - real(prec, &params.beta) / (&one - t).complete(prec).square();
        // mu_k' = -B u, so the rows are -B u, -B u', -B u''
        let u1 = u.clone() * &g;
        let u2 = u.clone() * (g.clone().square() + &g1);
        mu1.push(-real(prec, &params.b) * u);
        mu2.push(-real(prec, &params.b) * u1);
        mu3.push(-real(prec, &params.b) * u2);
    }
    Ok(MomentTable {
        t: real(prec, t),
        params: params.at_prec(prec),
        mu,
        mu1,
        mu2,
        mu3,
    })
}

/// Hankel determinant data at (n, t): log D_n, its first three exact
/// t-derivatives, and H_n = t(t-1) (ln D_n)' with H_n', H_n''.
#[derive(Clone, Debug)]
pub struct HankelResult {
    pub n: usize,
    pub log_det: Real,
    pub d_logdet: (Real, Real, Real),
    pub h: Real,
    pub h1: Real,
    pub h2: Real,
}

/// Build the Hankel matrix of moments and its derivative matrices, and
/// assemble H_n and derivatives from the exact trace formulas. Escalates
/// precision geometrically when the factorization loses definiteness.
pub fn hankel(n: usize, params: &WeightParams, t: &Real, prec: u32) -> Result<HankelResult> {
    assert!(n >= 1);
    let mut p = prec;
    loop {
        match hankel_at(n, params, t, p) {
            Err(Error::NotPositiveDefinite(_)) | Err(Error::NonFinitePivot) if p < MAX_PREC => {
                p = (p * 2).min(MAX_PREC);
            }
            other => return other,
        }
    }
}

fn hankel_at(n: usize, params: &WeightParams, t: &Real, prec: u32) -> Result<HankelResult> {
    let cfg = SpecFunConfig::new(prec);
    let tt = real(prec, t);
    let table = moment_table(n, &params.at_prec(prec), &tt, &cfg)?;
    let m = Matrix::symmetric_from_fn(n, prec, |i, j| table.mu[i + j].clone());
    let m1 = Matrix::symmetric_from_fn(n, prec, |i, j| table.mu1[i + j].clone());
    let m2 = Matrix::symmetric_from_fn(n, prec, |i, j| table.mu2[i + j].clone());
    let m3 = Matrix::symmetric_from_fn(n, prec, |i, j| table.mu3[i + j].clone());
    let fac = numerics::factor_spd(&m)?;
    let log_det = fac.log_det();
    let (d1, d2, d3) = numerics::logdet_derivatives(&m, &m1, &m2, &m3)?;

    let one = real(prec, 1);
    let tm1 = (&tt - &one).complete(prec);
    let two_t_m1 = (real(prec, 2) * &tt) - &one;
    let h = (&tt * &tm1).complete(prec) * &d1;
    let h1 = (&two_t_m1 * &d1).complete(prec) + (&tt * &tm1).complete(prec) * &d2;
    let h2 = real(prec, 2) * &d1
        + real(prec, 2) * (&two_t_m1 * &d2).complete(prec)
        + (&tt * &tm1).complete(prec) * &d3;
    Ok(HankelResult {
        n,
        log_det,
        d_logdet: (d1, d2, d3),
        h,
        h1,
        h2,
    })
}

/// Multiple-integral oracle for D_n(t), n <= 3: tensorized quadrature of
/// `(1/n!) int [Delta_n]^2 prod w0(x_k) wJ(x_k; t)` with every axis split
/// at the jump. Independent of the determinant path.
pub fn multiint_oracle(n: usize, params: &WeightParams, t: &Real, prec: u32) -> Result<Real> {
    assert!((1..=3).contains(&n), "oracle supports n in 1..=3");
    let base_level = 4u32;
    let v0 = multiint_at_level(n, params, t, prec, base_level)?;
    let v1 = multiint_at_level(n, params, t, prec, base_level + 1)?;
    let tol = real(prec, 1) >> (prec / 3);
    if numerics::rel_residual(&v0, &v1) > tol {
        return Err(Error::NotConverged);
    }
    Ok(v1)
}

fn multiint_at_level(n: usize, params: &WeightParams, t: &Real, prec: u32, level: u32) -> Result<Real> {
    let one = real(prec, 1);
    let zero = real(prec, 0);
    let tt = real(prec, t);
    // Per-axis node lists with the weight absorbed. Left of the jump the
    // factor is A, right of it A + B; boxes with k axes on the left are
    // identical under permutation, so only k = 0..n boxes are computed,
    // each weighted by C(n, k).
    let left_factor = real(prec, &params.a);
    let right_factor = (&params.a + &params.b).complete(prec);
    let left: Vec<(Real, Real)> = if tt > 0 && !left_factor.is_zero() {
        quad_nodes_weighted(params, &zero, &tt, &left_factor, prec, level)
    } else {
        Vec::new()
    };
    let right: Vec<(Real, Real)> = if tt < 1 && !right_factor.is_zero() {
        quad_nodes_weighted(params, &tt, &one, &right_factor, prec, level)
    } else {
        Vec::new()
    };

    let binom = |n: usize, k: usize| -> u32 {
        (0..k).fold(1u32, |acc, i| acc * (n - i) as u32 / (i as u32 + 1))
    };

    let mut total = real(prec, 0);
    for k in 0..=n {
        // k axes on the left, n - k on the right
        if k > 0 && left.is_empty() {
            continue;
        }
        if k < n && right.is_empty() {
            continue;
        }
        let axes: Vec<&[(Real, Real)]> = (0..n)
            .map(|i| if i < k { left.as_slice() } else { right.as_slice() })
            .collect();
        let box_val = tensor_box(n, &axes, prec);
        total += box_val * real(prec, binom(n, k));
    }
    // divide by n!
    let fact = real(prec, (1..=n).product::<usize>() as u32);
    Ok(total / fact)
}

fn tensor_box(n: usize, axes: &[&[(Real, Real)]], prec: u32) -> Real {
    match n {
        1 => {
            let mut acc = real(prec, 0);
            for (_, w) in axes[0] {
                acc += w;
            }
            acc
        }
        2 => {
            let (a0, a1) = (axes[0], axes[1]);
            let mut acc = real(prec, 0);
            for (xi, wi) in a0 {
                for (xj, wj) in a1 {
                    let d = (xj - xi).complete(prec);
                    acc += d.square() * (wi * wj).complete(prec);
                }
            }
            acc
        }
        3 => {
            let (a0, a1, a2) = (axes[0], axes[1], axes[2]);
            // cache pairwise squared differences times weights for the
            // two inner axes
            let d01: Vec<Vec<Real>> = a0
                .iter()
                .map(|(xi, wi)| {
                    a1.iter()
                        .map(|(xj, wj)| {
                            (xj - xi).complete(prec).square() * (wi * wj).complete(prec)
                        })
                        .collect()
                })
                .collect();
            let mut acc = real(prec, 0);
            for (k2, (xk, wk)) in a2.iter().enumerate() {
                let _ = k2;
                let d0k: Vec<Real> = a0
                    .iter()
                    .map(|(xi, _)| (xk - xi).complete(prec).square())
                    .collect();
                let d1k: Vec<Real> = a1
                    .iter()
                    .map(|(xj, _)| (xk - xj).complete(prec).square())
                    .collect();
                for i in 0..a0.len() {
                    for j in 0..a1.len() {
                        acc += (&d01[i][j] * &d0k[i]).complete(prec) * (&d1k[j] * wk).complete(prec);
                    }
                }
            }
            acc
        }
        _ => unreachable!(),
    }
}

/// Nodes and weights for the full weight `w0 * wJ` on [0, 1], split at
/// the jump. Weights already include the weight function.
pub(crate) fn jump_split_nodes(
    params: &WeightParams,
    t: &Real,
    prec: u32,
    level: u32,
) -> Vec<(Real, Real)> {
    let zero = real(prec, 0);
    let one = real(prec, 1);
    let tt = real(prec, t);
    let left_factor = real(prec, &params.a);
    let right_factor = (&params.a + &params.b).complete(prec);
    let mut nodes = Vec::new();
    if tt > 0 && !left_factor.is_zero() {
        nodes.extend(quad_nodes_weighted(params, &zero, &tt, &left_factor, prec, level));
    }
    if tt < 1 && !right_factor.is_zero() {
        nodes.extend(quad_nodes_weighted(params, &tt, &one, &right_factor, prec, level));
    }
    nodes
}

/// tanh-sinh nodes on (a, b) at a fixed level, weights multiplied by
/// `factor * w0(x)`.
fn quad_nodes_weighted(
    params: &WeightParams,
    a: &Real,
    b: &Real,
    factor: &Real,
    prec: u32,
    level: u32,
) -> Vec<(Real, Real)> {
    let half = real(prec, 0.5f64);
    let center = (a + b).complete(prec) * &half;
    let scale = (b - a).complete(prec) * &half;
    let pi_half = real(prec, rug::float::Constant::Pi) * &half;
    let tiny = real(prec, 1) >> (prec + 16);
    let mut out = Vec::new();
    let h = real(prec, 1) >> level;
    let mut k: i64 = 0;
    loop {
        let mut done = true;
        for sign in [1i64, -1i64] {
            if k == 0 && sign < 0 {
                continue;
            }
            let kh = h.clone() * ((sign * k) as i32);
            let s = kh.clone().sinh();
            let c = kh.clone().cosh();
            let u = pi_half.clone() * &s;
            let ch_u = u.clone().cosh();
            let w = pi_half.clone() * &c / ch_u.square();
            let x = &center + &scale * u.tanh();
            if &x <= a || &x >= b {
                continue;
            }
            let wq = scale.clone() * w * &h;
            if wq.clone().abs() < tiny {
                continue;
            }
            done = false;
            let wall = wq * params.w0(&x) * factor;
            out.push((x, wall));
        }
        if k > 0 && done {
            break;
        }
        k += 1;
        if k > (10i64) << level {
            break;
        }
    }
    out
}

#[allow(dead_code)]
const fn u3_guard() {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sub;

    const P: u32 = 256;

    fn cfg() -> SpecFunConfig {
        SpecFunConfig::new(P)
    }

    fn wp(alpha: f64, beta: f64, a: f64, b: f64) -> WeightParams {
        WeightParams::from_f64(alpha, beta, a, b, P).unwrap()
    }

    fn assert_close(a: &Real, b: &Real, tol: f64) {
        let d = sub(a, b).abs();
        assert!(d < tol, "difference {:e} exceeds {:e}", d.to_f64(), tol);
    }

    #[test]
    fn param_validation() {
        assert!(WeightParams::from_f64(0.0, 1.0, 1.0, 0.0, P).is_err());
        assert!(WeightParams::from_f64(1.0, 1.0, -1.0, 2.0, P).is_err());
        assert!(WeightParams::from_f64(1.0, 1.0, 1.0, -2.0, P).is_err());
        assert!(WeightParams::from_f64(1.0, 1.0, 0.0, 0.0, P).is_err());
        assert!(WeightParams::from_f64(1.0, 1.0, 0.0, 1.0, P).is_ok());
    }

    #[test]
    fn moment_known_values() {
        let c = cfg();
        // pure reference weight: complete Beta B(2,2) = 1/6 for any t
        let m = moment(0, &wp(1.0, 1.0, 1.0, 0.0), &real(P, 0.37f64), &c).unwrap();
        assert_close(&m, &(real(P, 1) / real(P, 6u32)), 1e-70);
        // pure jump at t = 1/2: 1/12
        let m = moment(0, &wp(1.0, 1.0, 0.0, 1.0), &real(P, 0.5f64), &c).unwrap();
        assert_close(&m, &(real(P, 1) / real(P, 12u32)), 1e-70);
        // linearity in (A, B)
        let m = moment(0, &wp(1.0, 1.0, 1.0, 1.0), &real(P, 0.5f64), &c).unwrap();
        assert_close(&m, &(real(P, 1) / real(P, 4u32)), 1e-70);
    }

    #[test]
    fn moment_closed_form_matches_hyp2f1_route() {
        let c = cfg();
        let params = wp(1.5, 0.5, 0.0, 1.0);
        for tf in [0.2f64, 0.5, 0.8] {
            let t = real(P, tf);
            for k in [0usize, 1, 4] {
                let aa = real(P, 1.5f64) + real(P, k as u32 + 1);
                let bb = real(P, 0.5f64) + real(P, 1);
                let tail = tail_beta(&aa, &bb, &t, &c).unwrap();
                let hyp = moment_jump_hyp2f1(k, &params, &t, &c).unwrap();
                let r = numerics::rel_residual(&tail, &hyp);
                assert!(r < 1e-60, "k={k}, t={tf}: {:e}", r.to_f64());
            }
        }
    }

    #[test]
    fn moment_matches_quadrature_of_defining_integral() {
        let c = cfg();
        let params = wp(1.5, 0.5, 1.0, 2.0);
        let t = real(P, 0.4f64);
        let rule = numerics::QuadRule::tanh_sinh(P, 1e-45);
        for k in [0usize, 3, 10] {
            let m = moment(k, &params, &t, &c).unwrap();
            let pk = params.clone();
            let tk = t.clone();
            let f = move |x: &Real| {
                let w = pk.weight(x, &tk);
                (x.clone().ln() * real(P, k as u32)).exp() * w
            };
            let (q, ok) = numerics::integrate_split(&f, &real(P, 0), &real(P, 1), &t, &rule);
            assert!(ok);
            let r = numerics::rel_residual(&m, &q);
            assert!(r < 1e-42, "k = {k}: {:e}", r.to_f64());
        }
    }

    #[test]
    fn moment_table_derivative_rows() {
        let c = cfg();
        // no jump -> all derivative rows vanish
        let table = moment_table(3, &wp(1.0, 1.0, 1.0, 0.0), &real(P, 0.3f64), &c).unwrap();
        assert!(table.mu1.iter().all(|x| x.is_zero()));
        assert!(table.mu2.iter().all(|x| x.is_zero()));
        assert!(table.mu3.iter().all(|x| x.is_zero()));

        // mu1[0] = -t(1-t) at alpha = beta = 1, B = 1: -1/4 at t = 1/2
        let table = moment_table(1, &wp(1.0, 1.0, 0.0, 1.0), &real(P, 0.5f64), &c).unwrap();
        assert_close(&table.mu1[0], &(real(P, -1) / real(P, 4u32)), 1e-70);
    }

    #[test]
    fn moment_table_first_derivative_matches_finite_difference() {
        let c = cfg();
        let params = wp(1.5, 0.5, 1.0, 1.0);
        let t = real(P, 0.4f64);
        let h = real(P, 1e-10f64);
        let table = moment_table(2, &params, &t, &c).unwrap();
        for k in 0..3 {
            let fp = moment(k, &params, &(t.clone() + &h), &c).unwrap();
            let fm = moment(k, &params, &(t.clone() - &h), &c).unwrap();
            let fd = (fp - fm) / (real(P, 2) * &h);
            let r = numerics::rel_residual(&table.mu1[k], &fd);
            assert!(r < 1e-15, "k = {k}: {:e}", r.to_f64());
        }
    }

    #[test]
    fn hankel_small_cases() {
        // n = 1: log D_1 = ln mu_0
        let c = cfg();
        let params = wp(1.0, 1.0, 1.0, 0.0);
        let t = real(P, 0.3f64);
        let res = hankel(1, &params, &t, P).unwrap();
        let mu0 = moment(0, &params, &t, &c).unwrap();
        assert_close(&res.log_det, &mu0.ln(), 1e-70);

        // n = 2, alpha = beta = 1, A = 1, B = 0: D_2 = 1/720
        let res = hankel(2, &params, &t, P).unwrap();
        let expected = (real(P, 1) / real(P, 720u32)).ln();
        assert_close(&res.log_det, &expected, 1e-70);
    }

    #[test]
    fn hankel_h_matches_finite_difference() {
        // H_n = t(t-1) d/dt ln D_n at (3, 1.5, 0.5, 1, 1, 0.4)
        let params = wp(1.5, 0.5, 1.0, 1.0);
        let t = real(P, 0.4f64);
        let res = hankel(3, &params, &t, P).unwrap();
        let h = real(P, 1e-8f64);
        let lp = hankel(3, &params, &(t.clone() + &h), P).unwrap().log_det;
        let lm = hankel(3, &params, &(t.clone() - &h), P).unwrap().log_det;
        let fd = (lp - lm) / (real(P, 2) * &h);
        let expected = (t.clone() * (t.clone() - 1u32)) * fd;
        let r = numerics::rel_residual(&res.h, &expected);
        assert!(r < 1e-15, "{:e}", r.to_f64());
    }

    #[test]
    fn logdet_first_derivative_matches_finite_difference() {
        // spec example: n=2, alpha=beta=1, A=0, B=1, t=1/2
        let params = wp(1.0, 1.0, 0.0, 1.0);
        let t = real(P, 0.5f64);
        let res = hankel(2, &params, &t, P).unwrap();
        let h = real(P, 1e-8f64);
        let lp = hankel(2, &params, &(t.clone() + &h), P).unwrap().log_det;
        let lm = hankel(2, &params, &(t.clone() - &h), P).unwrap().log_det;
        let fd = (lp - lm) / (real(P, 2) * &h);
        let r = numerics::rel_residual(&res.d_logdet.0, &fd);
        assert!(r < 1e-12, "{:e}", r.to_f64());
    }

    #[test]
    fn multiint_oracle_matches_hankel_n1_n2() {
        let params = wp(1.0, 1.0, 1.0, 0.0);
        let t = real(P, 0.5f64);
        let c = cfg();
        let v = multiint_oracle(1, &params, &t, 128).unwrap();
        let mu0 = moment(0, &params, &t, &c).unwrap();
        let r = numerics::rel_residual(&v, &mu0);
        assert!(r < 1e-25, "{:e}", r.to_f64());

        let v = multiint_oracle(2, &params, &t, 128).unwrap();
        let expected = real(128u32, 1) / real(128u32, 720u32);
        let r = numerics::rel_residual(&v, &expected);
        assert!(r < 1e-25, "n=2: {:e}", r.to_f64());
    }

    #[test]
    fn multiint_oracle_matches_hankel_n3_with_jump() {
        let params = wp(1.0, 1.0, 1.0, 1.0);
        let t = real(P, 0.4f64);
        let v = multiint_oracle(3, &params, &t, 128).unwrap();
        let d = hankel(3, &params, &t, P).unwrap().log_det.exp();
        let r = numerics::rel_residual(&v, &d);
        assert!(r < 1e-20, "{:e}", r.to_f64());
    }

    #[test]
    fn hankel_positive_definite_across_params() {
        for (al, be, a, b) in [(0.5, 0.5, 1.0, 1.0), (2.0, 3.0, 1.0, 2.0), (0.7, 2.3, 2.0, -1.0)] {
            let params = wp(al, be, a, b);
            for tf in [0.1f64, 0.5, 0.9] {
                assert!(hankel(4, &params, &real(P, tf), P).is_ok());
            }
        }
    }

    #[test]
    fn determinant_nonincreasing_in_t_for_pure_jump() {
        let params = wp(1.0, 1.0, 0.0, 1.0);
        let mut last = real(P, 1e30f64);
        for tf in [0.1f64, 0.3, 0.5, 0.7, 0.9] {
            let res = hankel(3, &params, &real(P, tf), P).unwrap();
            assert!(res.log_det < last);
            last = res.log_det;
        }
    }
}

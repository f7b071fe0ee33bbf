//! The Jimbo-Miwa-Okamoto sigma-form residual for the shifted Hankel
//! log-derivative, and the Painlevé VI equation satisfied by the
//! linear-fractional transform of `x_n`.
//!
//! The sigma function is `sigma = H_n + d1 t + d2` with
//! `d1 = -n(n+a+b) - (a+b)^2/4`, `d2 = [2n(n+a+b) + b(a+b)]/4`, and the
//! sigma-form reads
//!
//! ```text
//! s' { t(t-1) s'' }^2 + { 2 s'(t s' - s) - s'^2 - v1 v2 v3 v4 }^2
//!     = (s' + v1^2)(s' + v2^2)(s' + v3^2)(s' + v4^2)
//! ```
//!
//! with `v1 = (a+b)/2`, `v2 = (b-a)/2`, `v3 = v4 = (2n+a+b)/2`. All
//! derivatives of `H_n` are exact (trace formulas), so the residual is
//! a genuine measure of the identity, not of differencing noise.
//!
//! `W_n`, defined by `x_n = (2n+1+a+b)(1-W_n)/(1-t)`, satisfies a
//! Painlevé VI with parameters `((2n+a+b+1)^2/2, -a^2/2, b^2/2, 1/2)`
//! and `W_n(0) = 0`, `W_n'(0) = 1`. Two verification routes exist: the
//! pointwise residual of the pipeline trajectory, and an independent
//! adaptive Runge-Kutta integration seeded from the pipeline.

use crate::error::{Error, Result};
use crate::moments::{hankel, WeightParams};
use crate::numerics::{self, real, Real};
use crate::orthopoly::build_system;

/// Sigma-form evaluation at one (n, t).
#[derive(Clone, Debug)]
pub struct SigmaTrace {
    pub n: usize,
    pub t: Real,
    pub d1: Real,
    pub d2: Real,
    pub nu: (Real, Real, Real, Real),
    pub sigma: Real,
    pub sigma1: Real,
    pub sigma2: Real,
    pub residual: Real,
}

/// Constants of the sigma shift for given (n, alpha, beta).
pub fn sigma_constants(n: usize, alpha: &Real, beta: &Real, prec: u32) -> (Real, Real) {
    let nn = real(prec, n as u32);
    let s = real(prec, alpha) + beta;
    let nns = nn.clone() * (nn.clone() + &s);
    let d1 = -nns.clone() - s.clone().square() / 4u32;
    let d2 = (real(prec, 2) * &nns + real(prec, beta) * &s) / real(prec, 4);
    (d1, d2)
}

/// Evaluate sigma, its derivatives, and the sigma-form residual from
/// the exact Hankel derivative traces.
pub fn sigma_trace(n: usize, params: &WeightParams, t: &Real, prec: u32) -> Result<SigmaTrace> {
    assert!(n >= 1);
    assert!(*t >= 0 && *t < 1);
    let hk = hankel(n, params, t, prec)?;
    let p = hk.h.prec().max(prec);
    let tt = real(p, t);
    let alpha = real(p, &params.alpha);
    let beta = real(p, &params.beta);
    let (d1, d2) = sigma_constants(n, &alpha, &beta, p);
    let nn = real(p, n as u32);
    let s = alpha.clone() + &beta;
    let half = real(p, 0.5f64);
    let nu1 = s.clone() * &half;
    let nu2 = (beta.clone() - &alpha) * &half;
    let nu3 = (real(p, 2) * &nn + &s) * &half;
    let nu4 = nu3.clone();

    let sigma = hk.h.clone() + d1.clone() * &tt + &d2;
    let sigma1 = hk.h1.clone() + &d1;
    let sigma2 = hk.h2.clone();

    let tm1 = tt.clone() - 1u32;
    let prod_nu = nu1.clone() * &nu2 * &nu3 * &nu4;
    let lhs = sigma1.clone() * (tt.clone() * &tm1 * &sigma2).square()
        + (real(p, 2) * sigma1.clone() * (tt.clone() * &sigma1 - &sigma)
            - sigma1.clone().square()
            - &prod_nu)
            .square();
    let rhs = (sigma1.clone() + nu1.clone().square())
        * (sigma1.clone() + nu2.clone().square())
        * (sigma1.clone() + nu3.clone().square())
        * (sigma1.clone() + nu4.clone().square());
    let residual = numerics::rel_residual(&lhs, &rhs);

    Ok(SigmaTrace {
        n,
        t: tt,
        d1,
        d2,
        nu: (nu1, nu2, nu3, nu4),
        sigma,
        sigma1,
        sigma2,
        residual,
    })
}

/// Painlevé VI parameter set for the W_n equation.
#[derive(Clone, Debug)]
pub struct PviSystem {
    pub n: usize,
    pub a: Real,
    pub b: Real,
    pub c: Real,
    pub d: Real,
}

impl PviSystem {
    pub fn new(n: usize, alpha: &Real, beta: &Real, prec: u32) -> Self {
        let half = real(prec, 0.5f64);
        let base = real(prec, 2 * n as u32 + 1) + alpha + beta;
        PviSystem {
            n,
            a: base.square() * &half,
            b: -(real(prec, alpha).square() * &half),
            c: real(prec, beta).square() * &half,
            d: half,
        }
    }
}

/// One point of a W_n trajectory.
#[derive(Clone, Debug)]
pub struct PviState {
    pub t: Real,
    pub w: Real,
    pub w1: Real,
}

/// Right-hand side `W''` of the PVI equation at (t, W, W').
pub fn pvi_rhs(sys: &PviSystem, t: &Real, w: &Real, w1: &Real) -> Result<Real> {
    let p = w.prec().max(t.prec());
    let tt = real(p, t);
    let ww = real(p, w);
    let one = real(p, 1);
    let tm1 = tt.clone() - &one;
    let wm1 = ww.clone() - &one;
    let wmt = ww.clone() - &tt;
    if tt.is_zero() || tm1.is_zero() || ww.is_zero() || wm1.is_zero() || wmt.is_zero() {
        return Err(Error::SingularLocus);
    }
    let half = real(p, 0.5f64);
    let term1 = half * (one.clone() / &ww + one.clone() / &wm1 + one.clone() / &wmt)
        * w1.clone().square();
    let term2 = (one.clone() / &tt + one.clone() / &tm1 + one.clone() / &wmt) * w1;
    let pref = ww.clone() * &wm1 * &wmt / (tt.clone().square() * tm1.clone().square());
    let inner = sys.a.clone()
        + sys.b.clone() * &tt / ww.clone().square()
        + sys.c.clone() * &tm1 / wm1.clone().square()
        + sys.d.clone() * &tt * &tm1 / wmt.clone().square();
    Ok(term1 - term2 + pref * inner)
}

/// `(W_n, W_n')` from the orthopoly pipeline: the inverse transform
/// `W = 1 - (1-t) x_n / (2n+1+a+b)` with `W'` by 5-point centered FD.
pub fn wn_from_pipeline(
    n: usize,
    params: &WeightParams,
    t: &Real,
    fd_step: &Real,
    prec: u32,
) -> Result<(Real, Real)> {
    let w_at = |ts: &Real| -> Result<Real> {
        let sys = build_system(n, params, ts, prec)?;
        let p = sys.prec;
        let aux = sys.aux_quantities(n)?;
        let c_n = real(p, 2 * n as u32 + 1) + &sys.params.alpha + &sys.params.beta;
        Ok(real(p, 1) - (real(p, 1) - ts) * &aux.x / &c_n)
    };
    let w = w_at(t)?;
    let p = w.prec();
    let h = real(p, fd_step);
    let mut vals = Vec::with_capacity(4);
    for off in [-2i32, -1, 1, 2] {
        let ts = real(p, t) + real(p, off) * &h;
        vals.push(w_at(&ts)?);
    }
    let w1 = (vals[0].clone() - &vals[3] + real(p, 8) * (vals[2].clone() - &vals[1]))
        / (real(p, 12) * &h);
    Ok((w, w1))
}

/// Outcome of an adaptive integration run.
#[derive(Clone, Debug)]
pub struct PviTrajectory {
    pub states: Vec<PviState>,
    pub completed: bool,
    pub abort: Option<Error>,
}

const SINGULAR_MARGIN: f64 = 1e-6;

/// Integrate the PVI equation for W_n from `t0` to `t1` (either
/// direction) with a Cash-Karp embedded Runge-Kutta pair and step
/// rejection at local tolerance `local_tol`. The trajectory keeps a
/// guaranteed distance of 1e-6 from the singular loci {0, 1, t}; if
/// the solution approaches one, the run stops at the last good state.
pub fn pvi_integrate(
    sys: &PviSystem,
    t0: &Real,
    t1: &Real,
    seed: (&Real, &Real),
    local_tol: f64,
    prec: u32,
) -> Result<PviTrajectory> {
    let p = prec;
    let mut t = real(p, t0);
    let t_end = real(p, t1);
    let mut w = real(p, seed.0);
    let mut w1 = real(p, seed.1);
    let span = (t_end.clone() - &t).abs();
    if span.is_zero() {
        return Ok(PviTrajectory {
            states: vec![PviState { t, w, w1 }],
            completed: true,
            abort: None,
        });
    }
    let forward = t_end > t;
    let sign = if forward { 1f64 } else { -1f64 };
    let tol = real(p, local_tol);
    let mut h = real(p, sign * 1e-3f64);
    let min_h = real(p, &span) * real(p, 1e-25f64);

    let margin = real(p, SINGULAR_MARGIN);
    let check_state = |t: &Real, w: &Real| -> bool {
        let d0 = w.clone().abs();
        let d1 = (w.clone() - 1u32).abs();
        let dt = (w.clone() - t).abs();
        d0 >= margin && d1 >= margin && dt >= margin
    };

    // Cash-Karp coefficients
    let cc: [[f64; 5]; 5] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
        [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
        [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
        [
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ];
    let node: [f64; 5] = [1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0];
    let b5: [f64; 6] = [
        37.0 / 378.0,
        0.0,
        250.0 / 621.0,
        125.0 / 594.0,
        0.0,
        512.0 / 1771.0,
    ];
    let b4: [f64; 6] = [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ];

    let mut states = vec![PviState {
        t: t.clone(),
        w: w.clone(),
        w1: w1.clone(),
    }];

    loop {
        let remaining = t_end.clone() - &t;
        if remaining.clone().abs() <= real(p, 1e-40f64) {
            return Ok(PviTrajectory {
                states,
                completed: true,
                abort: None,
            });
        }
        if (forward && h > remaining) || (!forward && h < remaining) {
            h = remaining;
        }

        // one Cash-Karp attempt; state derivative is (w1, pvi_rhs)
        let mut kw: Vec<Real> = Vec::with_capacity(6);
        let mut kv: Vec<Real> = Vec::with_capacity(6);
        let mut singular = false;
        {
            let d = pvi_rhs(sys, &t, &w, &w1);
            match d {
                Ok(d) => {
                    kw.push(w1.clone());
                    kv.push(d);
                }
                Err(_) => singular = true,
            }
        }
        if !singular {
            for i in 0..5 {
                let mut ws = w.clone();
                let mut vs = w1.clone();
                for (j, a) in cc[i].iter().enumerate().take(i + 1) {
                    ws += real(p, *a) * &h * &kw[j];
                    vs += real(p, *a) * &h * &kv[j];
                }
                let ts = t.clone() + real(p, node[i]) * &h;
                if !check_state(&ts, &ws) {
                    singular = true;
                    break;
                }
                match pvi_rhs(sys, &ts, &ws, &vs) {
                    Ok(d) => {
                        kw.push(vs);
                        kv.push(d);
                    }
                    Err(_) => {
                        singular = true;
                        break;
                    }
                }
            }
        }
        if singular {
            // shrink toward the last good state; if the step cannot be
            // reduced further the singular locus is genuinely in the way
            h = h.clone() * real(p, 0.25f64);
            if h.clone().abs() < min_h {
                return Ok(PviTrajectory {
                    states,
                    completed: false,
                    abort: Some(Error::SingularLocus),
                });
            }
            continue;
        }

        let mut w5 = w.clone();
        let mut v5 = w1.clone();
        let mut w4 = w.clone();
        let mut v4 = w1.clone();
        for j in 0..6 {
            w5 += real(p, b5[j]) * &h * &kw[j];
            v5 += real(p, b5[j]) * &h * &kv[j];
            w4 += real(p, b4[j]) * &h * &kw[j];
            v4 += real(p, b4[j]) * &h * &kv[j];
        }
        let scale_w = w5.clone().abs().max(&real(p, 1));
        let scale_v = v5.clone().abs().max(&real(p, 1));
        let err = ((w5.clone() - &w4).abs() / scale_w).max(&((v5.clone() - &v4).abs() / scale_v));

        if err <= tol {
            let t_new = t.clone() + &h;
            if !check_state(&t_new, &w5) {
                return Ok(PviTrajectory {
                    states,
                    completed: false,
                    abort: Some(Error::SingularLocus),
                });
            }
            t = t_new;
            w = w5;
            w1 = v5;
            states.push(PviState {
                t: t.clone(),
                w: w.clone(),
                w1: w1.clone(),
            });
        }

        // step-size controller (order 5)
        let ratio = if err.is_zero() {
            real(p, 5)
        } else {
            let r = (tol.clone() / &err).root(5) * real(p, 0.9f64);
            r.min(&real(p, 5)).max(&real(p, 0.2f64))
        };
        h = h * ratio;
        if h.clone().abs() < min_h {
            return Ok(PviTrajectory {
                states,
                completed: false,
                abort: Some(Error::StepUnderflow),
            });
        }
    }
}

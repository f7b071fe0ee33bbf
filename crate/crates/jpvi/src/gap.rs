//! Gap probabilities for the Jacobi unitary ensemble and their t -> 1
//! asymptotics.
//!
//! With the jump factor specialised to A = 0, B = 1 the weight is
//! supported on (t, 1) and the ratio `E_n(t) = D_n(t) / D_n(0)` is the
//! probability that no eigenvalue of the n-dimensional ensemble lies in
//! (0, t). Two independent routes compute it: the Hankel ratio in log
//! space, and the Fredholm-style determinant `det(I - G)` where `G` is
//! the Gram matrix of the first n orthonormal Jacobi polynomials over
//! [0, t].
//!
//! The unrestricted determinant has the closed form
//!
//! ```text
//! D_n(0) = 2^{-2n(n+a+b)} (2 pi)^n F(a, b) K(a, b, n)
//! ```
//!
//! with `F` and `K` ratios of Barnes G and Gamma values, and the gap
//! probability decays as `C (1-t)^{n(n+b)}` as t -> 1. The module
//! exposes the constant `C` in closed form and a numerical
//! extrapolation check of the decay law.

use crate::error::Result;
use crate::moments::{hankel, WeightParams};
use crate::numerics::{self, factor_spd, integrate, real, Matrix, QuadRule, Real};
use crate::orthopoly::build_system;
use crate::specfun::{log_barnes_g, log_gamma, SpecFunConfig};

/// Gap probability E_n(t) via the Hankel ratio D_n(t)/D_n(0), formed
/// in log space.
pub fn gap_hankel(n: usize, alpha: &Real, beta: &Real, t: &Real, prec: u32) -> Result<Real> {
    assert!(n >= 1);
    assert!(*t >= 0 && *t < 1);
    let params = WeightParams::new(
        real(prec, alpha),
        real(prec, beta),
        real(prec, 0),
        real(prec, 1),
    )?;
    let at_t = hankel(n, &params, &real(prec, t), prec)?;
    let at_0 = hankel(n, &params, &real(prec, 0), prec)?;
    let p = at_t.log_det.prec().max(at_0.log_det.prec());
    Ok((real(p, &at_t.log_det) - &at_0.log_det).exp())
}

/// Gap probability via det(I - G), with G the Gram matrix of the
/// orthonormal polynomials `P_j sqrt(w0 / h_j)` over [0, t]. The
/// polynomials come from the unperturbed Jacobi weight (B = 0), so
/// this route shares nothing with the jump-moment machinery beyond
/// the quadrature kernel.
pub fn gap_gram(n: usize, alpha: &Real, beta: &Real, t: &Real, prec: u32) -> Result<Real> {
    assert!(n >= 1);
    assert!(*t >= 0 && *t < 1);
    let params = WeightParams::new(
        real(prec, alpha),
        real(prec, beta),
        real(prec, 1),
        real(prec, 0),
    )?;
    let half = real(prec, 0.5f64);
    let sys = build_system(n.saturating_sub(1).max(1), &params, &half, prec)?;
    let p = sys.prec;
    let wp = 2 * p;
    let rule = QuadRule::tanh_sinh(wp, 1e-70f64);
    let zero = real(wp, 0);
    let tt = real(wp, t);
    let mut g = Matrix::zeros(n, n, p);
    for i in 0..n {
        for j in 0..=i {
            let f = |x: &Real| -> Real {
                let (pi, _) = sys.eval_poly(i, x);
                let (pj, _) = sys.eval_poly(j, x);
                pi * pj * params.w0(x)
            };
            let (val, _converged) = integrate(&f, &zero, &tt, &rule);
            let norm = (sys.h[i].clone() * &sys.h[j]).sqrt();
            let entry = real(p, &val) / norm;
            *g.at_mut(i, j) = entry.clone();
            *g.at_mut(j, i) = entry;
        }
    }
    let mut m = Matrix::zeros(n, n, p);
    for i in 0..n {
        for j in 0..n {
            *m.at_mut(i, j) = if i == j {
                real(p, 1) - g.at(i, j)
            } else {
                -g.at(i, j).clone()
            };
        }
    }
    let fact = factor_spd(&m)?;
    Ok(fact.log_det().exp())
}

fn log_f(alpha: &Real, beta: &Real, cfg: &SpecFunConfig) -> Result<Real> {
    let p = cfg.precision_bits;
    let s = real(p, alpha) + beta;
    let half = real(p, 0.5f64);
    let sh1 = (s.clone() + 1u32) * &half;
    let sh2 = real(p, 1) + s.clone() * &half;
    Ok(log_gamma(&sh1)?
        + real(p, 2) * log_barnes_g(&sh1, cfg)?
        + real(p, 2) * log_barnes_g(&sh2, cfg)?
        - log_barnes_g(&(s.clone() + 1u32), cfg)?
        - log_barnes_g(&(real(p, alpha) + 1u32), cfg)?
        - log_barnes_g(&(real(p, beta) + 1u32), cfg)?)
}

fn log_k(alpha: &Real, beta: &Real, n: usize, cfg: &SpecFunConfig) -> Result<Real> {
    let p = cfg.precision_bits;
    let nn = real(p, n as u32);
    let s = real(p, alpha) + beta;
    let half = real(p, 0.5f64);
    let mid1 = nn.clone() + (s.clone() + 1u32) * &half;
    let mid2 = nn.clone() + 1u32 + s.clone() * &half;
    Ok(log_barnes_g(&(nn.clone() + 1u32), cfg)?
        + log_barnes_g(&(nn.clone() + alpha + 1u32), cfg)?
        + log_barnes_g(&(nn.clone() + beta + 1u32), cfg)?
        + log_barnes_g(&(nn.clone() + &s + 1u32), cfg)?
        - real(p, 2) * log_barnes_g(&mid1, cfg)?
        - real(p, 2) * log_barnes_g(&mid2, cfg)?
        - log_gamma(&mid1)?)
}

/// Closed form for log D_n(0) of the pure Jacobi weight x^a (1-x)^b
/// on [0, 1].
pub fn log_dn0_closed_form(n: usize, alpha: &Real, beta: &Real, prec: u32) -> Result<Real> {
    assert!(n >= 1);
    let cfg = SpecFunConfig::new(prec);
    let p = prec;
    let nn = real(p, n as u32);
    let s = real(p, alpha) + beta;
    let two_pi = real(p, rug::float::Constant::Pi) * 2u32;
    let ln2 = real(p, 2).ln();
    Ok(-(real(p, 2) * &nn * (nn.clone() + &s)) * &ln2
        + nn.clone() * two_pi.ln()
        + log_f(alpha, beta, &cfg)?
        + log_k(alpha, beta, n, &cfg)?)
}

/// Leading asymptotics of the gap probability as t -> 1:
/// `E_n(t) ~ c * (1-t)^exponent`.
#[derive(Clone, Debug)]
pub struct AsymptoticConstant {
    pub c: Real,
    pub exponent: Real,
}

pub fn asymptotic_constant(
    n: usize,
    alpha: &Real,
    beta: &Real,
    prec: u32,
) -> Result<AsymptoticConstant> {
    assert!(n >= 1);
    let cfg = SpecFunConfig::new(prec);
    let p = prec;
    let nn = real(p, n as u32);
    let zero = real(p, 0);
    let ln2 = real(p, 2).ln();
    let log_c = real(p, 2) * &nn * alpha * &ln2 + log_f(&zero, beta, &cfg)?
        + log_k(&zero, beta, n, &cfg)?
        - log_f(alpha, beta, &cfg)?
        - log_k(alpha, beta, n, &cfg)?;
    let exponent = nn.clone() * (nn.clone() + beta);
    Ok(AsymptoticConstant {
        c: log_c.exp(),
        exponent,
    })
}

/// Check the decay law numerically: evaluate `E_n(t) / (1-t)^{n(n+b)}`
/// at t in {0.9, 0.99, 0.999, 0.9999} and extrapolate to t = 1 by
/// Neville's scheme in s = 1 - t. Returns the extrapolated constant
/// and its relative deviation from the closed form.
pub fn asymptotic_check(n: usize, alpha: &Real, beta: &Real, prec: u32) -> Result<(Real, Real)> {
    let target = asymptotic_constant(n, alpha, beta, prec)?;
    let p = prec;
    let mut nodes = Vec::new();
    let mut vals = Vec::new();
    for k in 1..=4u32 {
        let s = {
            let mut v = real(p, 1);
            for _ in 0..k {
                v /= 10u32;
            }
            v
        };
        let t = real(p, 1) - &s;
        let gap = gap_hankel(n, alpha, beta, &t, p)?;
        let c = (gap.ln() - target.exponent.clone() * s.clone().ln()).exp();
        nodes.push(s);
        vals.push(c);
    }
    // Neville extrapolation to s = 0
    let m = vals.len();
    let mut tab = vals;
    for level in 1..m {
        for i in 0..m - level {
            let num = (nodes[i].clone() * &tab[i + 1] - nodes[i + level].clone() * &tab[i])
                / (nodes[i].clone() - &nodes[i + level]);
            tab[i] = num;
        }
    }
    let extrapolated = tab[0].clone();
    let dev = numerics::rel_residual(&extrapolated, &target.c);
    Ok((extrapolated, dev))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    #[test]
    fn gap_cubic_closed_form() {
        // n = 1, alpha = beta = 1: E_1(t) = 1 - 3 t^2 + 2 t^3
        let one = real(P, 1);
        for tf in [0.5f64, 0.9] {
            let t = real(P, tf);
            let gap = gap_hankel(1, &one, &one, &t, P).unwrap();
            let exact =
                real(P, 1) - real(P, 3) * t.clone().square() + real(P, 2) * t.clone() * t.clone().square();
            assert!(
                numerics::rel_residual(&gap, &exact) < 1e-60,
                "t = {tf}: {} vs {}",
                gap,
                exact
            );
        }
        // spot values: E_1(1/2) = 1/2, E_1(0.9) = 0.028
        let half = gap_hankel(1, &one, &one, &real(P, 0.5f64), P).unwrap();
        assert!((half - real(P, 0.5f64)).abs() < 1e-60);
        let tail = gap_hankel(1, &one, &one, &real(P, 0.9f64), P).unwrap();
        assert!(numerics::rel_residual(&tail, &real(P, 0.028f64)) < 1e-15);
    }

    #[test]
    fn gram_one_by_one() {
        // single orthonormal polynomial: det(I - G) = 1 - (3t^2 - 2t^3),
        // equal to 1/2 at t = 1/2
        let one = real(P, 1);
        let g = gap_gram(1, &one, &one, &real(P, 0.5f64), P).unwrap();
        assert!(
            numerics::rel_residual(&g, &real(P, 0.5f64)) < 1e-55,
            "{}",
            g
        );
    }

    #[test]
    fn gram_matches_hankel() {
        let alpha = real(P, 1.2f64);
        let beta = real(P, 0.7f64);
        let t = real(P, 0.3f64);
        for n in 1..=6usize {
            let a = gap_gram(n, &alpha, &beta, &t, P).unwrap();
            let b = gap_hankel(n, &alpha, &beta, &t, P).unwrap();
            let dev = numerics::rel_residual(&a, &b);
            assert!(dev < 1e-20, "n = {n}: {:e}", dev.to_f64());
        }
    }

    #[test]
    fn dn0_smallest_case() {
        // D_1(0) with alpha = beta = 1 is the beta moment B(2, 2) = 1/6
        let one = real(P, 1);
        let ld = log_dn0_closed_form(1, &one, &one, P).unwrap();
        let exact = real(P, 6).recip().ln();
        assert!(numerics::rel_residual(&ld, &exact) < 1e-60);
    }

    #[test]
    fn dn0_matches_hankel() {
        for (n, af, bf) in [(2usize, 1.0f64, 1.0f64), (3, 1.5, 0.5)] {
            let alpha = real(P, af);
            let beta = real(P, bf);
            let params =
                WeightParams::new(alpha.clone(), beta.clone(), real(P, 0), real(P, 1)).unwrap();
            let hk = hankel(n, &params, &real(P, 0), P).unwrap();
            let ld = log_dn0_closed_form(n, &alpha, &beta, P).unwrap();
            let dev = numerics::rel_residual(&ld, &real(ld.prec(), &hk.log_det));
            assert!(dev < 1e-25, "n = {n}: {:e}", dev.to_f64());
        }
    }

    #[test]
    fn constant_known_case() {
        // n = 1, alpha = beta = 1: E_1(t) = (1-t)^2 (1+2t) -> 3 (1-t)^2
        let one = real(P, 1);
        let ac = asymptotic_constant(1, &one, &one, P).unwrap();
        assert!(numerics::rel_residual(&ac.c, &real(P, 3)) < 1e-60, "{}", ac.c);
        assert!((ac.exponent.clone() - 2u32).abs() < 1e-70);
    }

    #[test]
    fn constant_trivial_at_alpha_zero() {
        // alpha = 0 removes the perturbation of the t -> 1 edge
        let ac = asymptotic_constant(2, &real(P, 0), &real(P, 1.5f64), P).unwrap();
        assert!((ac.c.clone() - 1u32).abs() < 1e-60, "{}", ac.c);
    }

    #[test]
    fn extrapolation_recovers_constant() {
        for (af, bf) in [(1.0f64, 1.0f64), (1.5, 0.5)] {
            let alpha = real(P, af);
            let beta = real(P, bf);
            let (c, dev) = asymptotic_check(2, &alpha, &beta, P).unwrap();
            assert!(
                dev < 1e-3,
                "alpha = {af}, beta = {bf}: c = {}, dev = {:e}",
                c,
                dev.to_f64()
            );
        }
    }
}

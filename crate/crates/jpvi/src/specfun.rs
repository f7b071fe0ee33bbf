//! Special functions for the moment closed form and the Barnes-G
//! asymptotic constant: log-Gamma, Gauss 2F1 on the ray z <= 0, the
//! upper-tail incomplete Beta integral, and log Barnes G.
//!
//! 2F1 is deliberately restricted to z <= 0 (the only ray the moment
//! formula needs); arguments z <= -1 go through the Pfaff transformation
//! first so the series argument always lands in [0, 1).

use crate::error::{Error, Result};
use crate::numerics::{real, Real};
use once_cell::sync::Lazy;
use rug::ops::{CompleteRound, Pow};
use std::collections::HashMap;
use std::sync::Mutex;

/// Tolerances and caps for series evaluation.
#[derive(Clone, Debug)]
pub struct SpecFunConfig {
    pub precision_bits: u32,
    pub series_rel_tol: Real,
    pub max_terms: usize,
}

impl SpecFunConfig {
    /// Tolerance pinned a few bits above working precision; demanding
    /// more accuracy than the arithmetic carries is rejected.
    pub fn new(precision_bits: u32) -> Self {
        let tol = real(precision_bits, 1) >> (precision_bits - 8);
        SpecFunConfig {
            precision_bits,
            series_rel_tol: tol,
            max_terms: 100_000,
        }
    }

    pub fn with_rel_tol(precision_bits: u32, rel_tol: Real) -> Self {
        let floor = real(precision_bits, 1) >> (precision_bits - 8);
        assert!(
            rel_tol >= floor,
            "series_rel_tol below what the working precision supports"
        );
        SpecFunConfig {
            precision_bits,
            series_rel_tol: rel_tol,
            max_terms: 100_000,
        }
    }
}

static EULER_CACHE: Lazy<Mutex<HashMap<u32, Real>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Euler-Mascheroni constant, computed once per precision and cached.
pub fn euler_gamma(prec: u32) -> Real {
    let mut cache = EULER_CACHE.lock().unwrap();
    cache
        .entry(prec)
        .or_insert_with(|| real(prec, rug::float::Constant::Euler))
        .clone()
}

/// ln Gamma(x) for x > 0.
pub fn log_gamma(x: &Real) -> Result<Real> {
    if *x <= 0 {
        return Err(Error::DomainError(format!("log_gamma requires x > 0, got {}", x)));
    }
    Ok(x.clone().ln_gamma())
}

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b).
pub fn log_beta(a: &Real, b: &Real) -> Result<Real> {
    let prec = a.prec().max(b.prec());
    let sum = (a + b).complete(prec);
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(&sum)?)
}

/// Gauss hypergeometric 2F1(a, b; c; z) for z <= 0.
///
/// z in (-1/2, 0] sums the defining series; z <= -1/2 first applies
/// the Pfaff transformation
/// `2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))`,
/// which maps the argument into [1/3, 1). Near z = -1 the direct
/// series loses its geometric decay, so the switch happens at -1/2.
/// Terminating series (a a nonpositive integer) are summed exactly.
pub fn hyp2f1(a: &Real, b: &Real, c: &Real, z: &Real, cfg: &SpecFunConfig) -> Result<Real> {
    let prec = cfg.precision_bits;
    if *z > 0 {
        return Err(Error::DomainError(format!(
            "hyp2f1 supports z <= 0 only, got {}",
            z
        )));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::DomainError("hyp2f1: c is a nonpositive integer".into()));
    }
    if is_nonpositive_integer(a) {
        // polynomial case, valid for any z
        return hyp2f1_series(a, b, c, z, cfg);
    }
    if *z > -0.5f64 {
        hyp2f1_series(a, b, c, z, cfg)
    } else {
        // Pfaff: w = z/(z-1) lands in [1/3, 1)
        let one = real(prec, 1);
        let w = z.clone() / (z - &one).complete(prec);
        let cb = (c - b).complete(prec);
        let front = (&one - z).complete(prec).ln() * (-a.clone());
        let tail = hyp2f1_series(a, &cb, c, &w, cfg)?;
        Ok(front.exp() * tail)
    }
}

fn is_nonpositive_integer(x: &Real) -> bool {
    *x <= 0 && x.clone().fract().is_zero()
}

fn hyp2f1_series(a: &Real, b: &Real, c: &Real, z: &Real, cfg: &SpecFunConfig) -> Result<Real> {
    let prec = cfg.precision_bits;
    let mut sum = real(prec, 1);
    let mut term = real(prec, 1);
    for k in 0..cfg.max_terms {
        let kk = real(prec, k as u32);
        let num = ((a + &kk).complete(prec)) * ((b + &kk).complete(prec));
        if num.is_zero() {
            return Ok(sum);
        }
        let den = ((c + &kk).complete(prec)) * (&kk + real(prec, 1));
        term *= num / den;
        term *= z;
        sum += &term;
        if term.clone().abs()
            < &cfg.series_rel_tol * sum.clone().abs().max(&real(prec, 1))
        {
            return Ok(sum);
        }
    }
    Err(Error::NotConverged)
}

/// Lower incomplete Beta integral int_0^x s^(a-1) (1-s)^(b-1) ds for
/// x in [0, 1/2], by termwise integration of the binomial series.
fn lower_beta_series(a: &Real, b: &Real, x: &Real, cfg: &SpecFunConfig) -> Result<Real> {
    let prec = cfg.precision_bits;
    if x.is_zero() {
        return Ok(real(prec, 0));
    }
    // sum_k (1-b)_k / k! * x^(a+k) / (a+k)
    let mut poch = real(prec, 1); // (1-b)_k / k! * x^k
    let mut sum = poch.clone() / a;
    for k in 0..cfg.max_terms {
        let kk = real(prec, k as u32);
        let factor = (real(prec, 1) - b + &kk) * x / (&kk + real(prec, 1));
        poch *= factor;
        let term = poch.clone() / ((a + &kk).complete(prec) + real(prec, 1));
        sum += &term;
        if term.clone().abs()
            < (&cfg.series_rel_tol * sum.clone().abs()) >> 8
        {
            let xa = (x.clone().ln() * a.clone()).exp();
            return Ok(sum * xa);
        }
    }
    Err(Error::NotConverged)
}

/// Upper-tail incomplete Beta integral int_t^1 x^(a-1) (1-x)^(b-1) dx
/// for a, b > 0 and t in [0, 1].
pub fn tail_beta(a: &Real, b: &Real, t: &Real, cfg: &SpecFunConfig) -> Result<Real> {
    let prec = cfg.precision_bits;
    if *a <= 0 || *b <= 0 {
        return Err(Error::DomainError("tail_beta requires a, b > 0".into()));
    }
    if *t < 0 || *t > 1 {
        return Err(Error::DomainError("tail_beta requires t in [0, 1]".into()));
    }
    if *t == 1 {
        return Ok(real(prec, 0));
    }
    if t.is_zero() {
        return Ok(log_beta(a, b)?.exp());
    }
    let half = real(prec, 0.5f64);
    if *t <= half {
        // complete minus lower head; both positive, head < complete
        let complete = log_beta(a, b)?.exp();
        Ok(complete - lower_beta_series(a, b, t, cfg)?)
    } else {
        // symmetry: int_t^1 = int_0^(1-t) with (a, b) swapped
        let x = real(prec, 1) - t;
        lower_beta_series(b, a, &x, cfg)
    }
}

/// ln G(x) for the Barnes G-function, x > 0.
///
/// Reduces into the base window [1, 2] with G(x+1) = Gamma(x) G(x),
/// then evaluates the product formula
/// `G(1+s) = (2 pi)^(s/2) exp(-(s(s+1)+gamma s^2)/2) prod_n (1+s/n)^n exp(-s+s^2/(2n))`
/// with the product truncated at N and the log-tail summed through zeta
/// values (the tail of sum_n [n ln(1+s/n) - s + s^2/(2n)] telescopes
/// into sum_{k>=3} (-1)^(k-1) s^k/k * sum_{n>N} n^(1-k)).
pub fn log_barnes_g(x: &Real, cfg: &SpecFunConfig) -> Result<Real> {
    let prec = cfg.precision_bits;
    if *x <= 0 {
        return Err(Error::DomainError(format!("log_barnes_g requires x > 0, got {}", x)));
    }
    let mut shift = real(prec, 0);
    let mut xx = real(prec, x);
    // walk down to [1, 2]
    while xx > 2 {
        xx -= 1;
        shift += xx.clone().ln_gamma();
    }
    // walk up from (0, 1)
    while xx < 1 {
        shift -= xx.clone().ln_gamma();
        xx += 1;
    }
    Ok(shift + log_barnes_g_base(&xx, cfg)?)
}

/// ln G(1+s) for s in [0, 1].
fn log_barnes_g_base(x: &Real, cfg: &SpecFunConfig) -> Result<Real> {
    // Tail coefficients zeta(k-1) - sum_{n<=N} n^(1-k) cancel
    // catastrophically for large k, so the whole base evaluation runs at
    // elevated precision and rounds once at the end.
    let prec = cfg.precision_bits;
    let wprec = 2 * prec + 64;
    let s = real(wprec, x) - 1u32;
    if s.is_zero() {
        return Ok(real(prec, 0));
    }
    let n_cut: u32 = 32;
    let two_pi = real(wprec, rug::float::Constant::Pi) * 2u32;
    let gamma = euler_gamma(wprec);

    // prefactor: s/2 ln(2pi) - (s(s+1) + gamma s^2)/2
    let s2 = s.clone().square();
    let mut acc = (&s * two_pi.ln()) / 2u32
        - ((&s * (&s + real(wprec, 1))) + (&gamma * &s2).complete(wprec)) / 2u32;

    // explicit product terms n = 1..N
    for n in 1..=n_cut {
        let nn = real(wprec, n);
        let term = (&nn * (real(wprec, 1) + (&s / &nn).complete(wprec)).ln())
            - &s
            + &s2 / (real(wprec, 2) * &nn);
        acc += term;
    }

    // log-tail over n > N via zeta sums
    let tol = real(wprec, &cfg.series_rel_tol) >> (prec / 2);
    let mut sk = s.clone().square() * &s; // s^k starting at k = 3
    let mut converged = false;
    for k in 3..(cfg.max_terms as u32 + 3) {
        let m = k - 1;
        // T_m = zeta(m) - sum_{n<=N} n^-m
        let mut t_m = real(wprec, m).zeta();
        for n in 1..=n_cut {
            t_m -= real(wprec, 1) / real(wprec, n).pow(&real(wprec, m));
        }
        let mut term = (&sk * &t_m).complete(wprec) / real(wprec, k);
        if k % 2 == 0 {
            term = -term;
        }
        acc += &term;
        if term.clone().abs() < &tol * acc.clone().abs().max(&real(wprec, 1)) {
            converged = true;
            break;
        }
        sk *= &s;
    }
    if !converged {
        return Err(Error::NotConverged);
    }
    Ok(real(prec, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, sub, QuadRule};

    const P: u32 = 256;

    fn cfg() -> SpecFunConfig {
        SpecFunConfig::new(P)
    }

    fn assert_close(a: &Real, b: &Real, tol: f64) {
        let d = sub(a, b).abs();
        assert!(d < tol, "difference {:e} exceeds {:e}", d.to_f64(), tol);
    }

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(&real(P, 1)).unwrap().abs() < real(P, 1e-70f64));
        let half = real(P, 0.5f64);
        let expected = real(P, rug::float::Constant::Pi).sqrt().ln();
        assert_close(&log_gamma(&half).unwrap(), &expected, 1e-70);
        assert_close(&log_gamma(&real(P, 5)).unwrap(), &real(P, 24).ln(), 1e-70);
        assert!(log_gamma(&real(P, -1)).is_err());
    }

    #[test]
    fn hyp2f1_at_zero_is_one() {
        let v = hyp2f1(&real(P, 0.3f64), &real(P, 1.7f64), &real(P, 2.2f64), &real(P, 0), &cfg()).unwrap();
        assert_close(&v, &real(P, 1), 1e-70);
    }

    #[test]
    fn hyp2f1_terminating() {
        // 2F1(-1, b; c; z) = 1 - bz/c; at (-1, 1; 3; -2) -> 5/3
        let v = hyp2f1(&real(P, -1), &real(P, 1), &real(P, 3), &real(P, -2), &cfg()).unwrap();
        let expected = real(P, 5) / real(P, 3u32);
        assert_close(&v, &expected, 1e-70);
    }

    #[test]
    fn hyp2f1_matches_euler_integral() {
        // 2F1(a,b;c;z) = B(b, c-b)^-1 int_0^1 y^(b-1)(1-y)^(c-b-1)(1-zy)^-a dy
        let (a, b, c, z) = (
            real(P, 0.5f64),
            real(P, 1),
            real(P, 2.5f64),
            real(P, -3),
        );
        let v = hyp2f1(&a, &b, &c, &z, &cfg()).unwrap();
        let rule = QuadRule::tanh_sinh(P, 1e-40);
        let (aa, zz) = (a.clone(), z.clone());
        let (bb, cc) = (b.clone(), c.clone());
        let f = move |y: &Real| {
            let one = real(P, 1);
            let t1 = (y.clone().ln() * (bb.clone() - 1u32)).exp();
            let t2 = ((one.clone() - y).ln() * (cc.clone() - &bb - 1u32)).exp();
            let t3 = ((one - (&zz * y).complete(P)).ln() * (-aa.clone())).exp();
            t1 * t2 * t3
        };
        let (integral, ok) = integrate(&f, &real(P, 0), &real(P, 1), &rule);
        assert!(ok);
        let norm = log_beta(&b, &(c.clone() - &b), ).unwrap().exp();
        let oracle = integral / norm;
        assert_close(&v, &oracle, 1e-25);
    }

    #[test]
    fn hyp2f1_pfaff_consistency() {
        // direct series and Pfaff-transformed evaluation agree on (-1, 0)
        let c = cfg();
        for zf in [-0.2f64, -0.5, -0.9] {
            let (a, b, cc, z) = (real(P, 1.3f64), real(P, 0.7f64), real(P, 2.9f64), real(P, zf));
            let direct = hyp2f1_series(&a, &b, &cc, &z, &c).unwrap();
            let one = real(P, 1);
            let w = z.clone() / (z.clone() - &one);
            let pfaff = ((one - &z).ln() * (-a.clone())).exp()
                * hyp2f1_series(&a, &(cc.clone() - &b), &cc, &w, &c).unwrap();
            assert_close(&direct, &pfaff, 1e-70);
        }
        assert!(hyp2f1(&real(P, 1), &real(P, 1), &real(P, 2), &real(P, 0.5f64), &c).is_err());
    }

    #[test]
    fn tail_beta_values() {
        let c = cfg();
        // complete Beta B(2,2) = 1/6
        let v = tail_beta(&real(P, 2), &real(P, 2), &real(P, 0), &c).unwrap();
        assert_close(&v, &(real(P, 1) / real(P, 6u32)), 1e-70);
        // empty interval
        let v = tail_beta(&real(P, 2), &real(P, 2), &real(P, 1), &c).unwrap();
        assert!(v.is_zero());
        // int_{1/2}^1 x(1-x) dx = 1/12
        let v = tail_beta(&real(P, 2), &real(P, 2), &real(P, 0.5f64), &c).unwrap();
        assert_close(&v, &(real(P, 1) / real(P, 12u32)), 1e-70);
    }

    #[test]
    fn tail_beta_head_matches_quadrature() {
        let c = cfg();
        let (a, b) = (real(P, 1.5f64), real(P, 0.5f64));
        for tf in [0.15f64, 0.4, 0.8] {
            let t = real(P, tf);
            let head = tail_beta(&a, &b, &real(P, 0), &c).unwrap() - tail_beta(&a, &b, &t, &c).unwrap();
            let rule = QuadRule::tanh_sinh(P, 1e-40);
            let (aa, bb) = (a.clone(), b.clone());
            let f = move |x: &Real| {
                (x.clone().ln() * (aa.clone() - 1u32)).exp()
                    * ((real(P, 1) - x).ln() * (bb.clone() - 1u32)).exp()
            };
            let (q, ok) = integrate(&f, &real(P, 0), &t, &rule);
            assert!(ok);
            assert_close(&head, &q, 1e-38);
        }
    }

    #[test]
    fn barnes_g_small_integers() {
        let c = cfg();
        for x in [1u32, 2, 3] {
            assert!(log_barnes_g(&real(P, x), &c).unwrap().abs() < real(P, 1e-70f64));
        }
        assert_close(&log_barnes_g(&real(P, 4), &c).unwrap(), &real(P, 2).ln(), 1e-70);
        assert_close(&log_barnes_g(&real(P, 5), &c).unwrap(), &real(P, 12).ln(), 1e-70);
    }

    #[test]
    fn barnes_g_recurrence_on_grid() {
        let c = cfg();
        let tol = real(P, &c.series_rel_tol) * 10u32;
        let mut x = real(P, 0.25f64);
        while x <= 20 {
            let lhs = log_barnes_g(&(x.clone() + 1u32), &c).unwrap();
            let rhs = log_gamma(&x).unwrap() + log_barnes_g(&x, &c).unwrap();
            assert!(sub(&lhs, &rhs).abs() < tol, "x = {}", x.to_f64());
            x += real(P, 1.375f64);
        }
    }

    #[test]
    fn euler_gamma_cached_per_precision() {
        let a = euler_gamma(128);
        let b = euler_gamma(128);
        assert_eq!(a, b);
        assert_eq!(a.prec(), 128);
        // leading digits of the constant
        assert!((a - real(128, 0.5772156649015329f64)).abs() < 1e-15);
    }
}

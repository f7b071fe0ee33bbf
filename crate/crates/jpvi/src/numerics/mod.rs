//! Extended-precision scalars, dense linear algebra and quadrature.
//!
//! Everything downstream (moments, orthogonal polynomials, the identity
//! suite) works with [`rug::Float`] values at an explicit precision in
//! bits. Hankel moment matrices are exponentially ill-conditioned in `n`,
//! so operations that detect pivot cancellation escalate precision
//! geometrically up to [`MAX_PREC`] before giving up.

pub mod matrix;
pub mod quad;

pub use matrix::{factor_spd, logdet_derivatives, Factorization, Matrix};
pub use quad::{integrate, integrate_split, QuadKind, QuadRule};

use rug::ops::CompleteRound;
use rug::Float;

/// Extended-precision real number. The precision rides along with the
/// value; binary operations follow MPFR semantics (result precision is
/// the target's), so helpers below always allocate results at the
/// larger precision of the operands.
pub type Real = Float;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;

/// Cap for geometric precision escalation.
pub const MAX_PREC: u32 = 4096;

/// Minimum supported precision.
pub const MIN_PREC: u32 = 64;

/// A new value at `prec` bits.
pub fn real<T>(prec: u32, v: T) -> Real
where
    Float: rug::Assign<T>,
{
    Float::with_val(prec, v)
}

/// Parse a decimal string directly into an extended-precision value,
/// never through a binary double.
pub fn real_from_str(prec: u32, s: &str) -> Option<Real> {
    Float::parse(s).ok().map(|p| Float::with_val(prec, p))
}

/// The larger of the two operand precisions.
pub fn join_prec(a: &Real, b: &Real) -> u32 {
    a.prec().max(b.prec())
}

/// `a + b` at the larger of the two precisions.
pub fn add(a: &Real, b: &Real) -> Real {
    (a + b).complete(join_prec(a, b))
}

/// `a - b` at the larger of the two precisions.
pub fn sub(a: &Real, b: &Real) -> Real {
    (a - b).complete(join_prec(a, b))
}

/// `a * b` at the larger of the two precisions.
pub fn mul(a: &Real, b: &Real) -> Real {
    (a * b).complete(join_prec(a, b))
}

/// `a / b` at the larger of the two precisions.
pub fn div(a: &Real, b: &Real) -> Real {
    (a / b).complete(join_prec(a, b))
}

/// Relative residual |lhs - rhs| / max(|lhs|, |rhs|, 1).
pub fn rel_residual(lhs: &Real, rhs: &Real) -> Real {
    let prec = join_prec(lhs, rhs);
    let diff = sub(lhs, rhs).abs();
    let mut scale = real(prec, 1);
    let la = lhs.clone().abs();
    let lb = rhs.clone().abs();
    if la > scale {
        scale = la;
    }
    if lb > scale {
        scale = lb;
    }
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_precision_ops_take_larger_precision() {
        let a = real(64, 1) / real(64, 3u32);
        let b = real(256, 1) / real(256, 7u32);
        assert_eq!(add(&a, &b).prec(), 256);
        assert_eq!(mul(&b, &a).prec(), 256);
    }

    #[test]
    fn decimal_parse_is_exact_to_precision() {
        // 0.1 at 256 bits differs from the f64 round trip.
        let x = real_from_str(256, "0.1").unwrap();
        let y = real(256, 0.1f64);
        assert_ne!(x, y);
        let ten_x = real(256, &x * real(256, 10));
        assert!((ten_x - 1u32).abs() < real(64, 1e-70));
    }

    #[test]
    fn rel_residual_scales_by_unity_floor() {
        let a = real(128, 1e-30f64);
        let b = real(128, 0);
        let r = rel_residual(&a, &b);
        assert!((r - real(128, 1e-30f64)).abs() < 1e-40);
    }
}

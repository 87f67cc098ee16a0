//! Double-double kernels behind the Cartan projection.
//!
//! One-sided Jacobi on exact double inputs carried in double-double keeps
//! small singular values relatively accurate at condition numbers far beyond
//! what a double precision bidiagonal SVD resolves.

use twofloat::TwoFloat;

pub(crate) type Dd = TwoFloat;

pub(crate) fn dd(x: f64) -> Dd {
    TwoFloat::from_f64(x)
}

pub(crate) fn zero() -> Dd {
    TwoFloat::from_f64(0.0)
}

/// Exact power of two for exponents in the normal range.
pub(crate) fn pow2(e: i32) -> f64 {
    let e = e.clamp(-1022, 1023);
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// Exponent `e` with `2^e <= |x| < 2^(e+1)` for finite nonzero `x`.
pub(crate) fn exponent(x: f64) -> i32 {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() {
        return 0;
    }
    if a < f64::MIN_POSITIVE {
        return exponent(a * pow2(600)) - 600;
    }
    (((a.to_bits() >> 52) & 0x7ff) as i32) - 1023
}

/// Double-double quotient by long division: `TwoFloat`'s own division only
/// carries double precision.
pub(crate) fn div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

/// Natural log of a positive double-double.
pub(crate) fn ln(x: Dd) -> f64 {
    let hi = x.hi();
    hi.ln() + (x.lo() / hi).ln_1p()
}

/// Row-major product of two `n x n` double-double matrices.
pub(crate) fn matmul(a: &[Dd], b: &[Dd], n: usize) -> Vec<Dd> {
    let mut out = vec![zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.hi() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Singular values (descending) of a row-major `rows x cols` double-double
/// matrix by one-sided Hestenes Jacobi on the columns.
pub(crate) fn singular_values(a: &[Dd], rows: usize, cols: usize) -> Vec<Dd> {
    let mut u: Vec<Vec<Dd>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i * cols + j]).collect())
        .collect();
    let tol = 1e-31;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut alpha = zero();
                let mut beta = zero();
                let mut gamma = zero();
                for i in 0..rows {
                    alpha += u[p][i] * u[p][i];
                    beta += u[q][i] * u[q][i];
                    gamma += u[p][i] * u[q][i];
                }
                let g = gamma.hi().abs();
                if g == 0.0 || g <= tol * (alpha.hi() * beta.hi()).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = div(beta - alpha, gamma * 2.0);
                let one = dd(1.0);
                let t = if zeta.hi() >= 0.0 {
                    div(one, zeta + (one + zeta * zeta).sqrt())
                } else {
                    -div(one, -zeta + (one + zeta * zeta).sqrt())
                };
                let c = div(one, (one + t * t).sqrt());
                let s = c * t;
                for i in 0..rows {
                    let up = u[p][i];
                    let uq = u[q][i];
                    u[p][i] = c * up - s * uq;
                    u[q][i] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<Dd> = u
        .iter()
        .map(|col| {
            let mut s = zero();
            for x in col {
                s += *x * *x;
            }
            if s.hi() > 0.0 {
                s.sqrt()
            } else {
                zero()
            }
        })
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Largest singular value of a row-major double matrix by one-sided Jacobi in
/// double precision. Exact on matrices with orthogonal columns.
pub(crate) fn top_singular_value_f64(a: &[f64], rows: usize, cols: usize) -> f64 {
    let mut u: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i * cols + j]).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0f64, 0.0f64, 0.0f64);
                for i in 0..rows {
                    alpha += u[p][i] * u[p][i];
                    beta += u[q][i] * u[q][i];
                    gamma += u[p][i] * u[q][i];
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let up = u[p][i];
                    let uq = u[q][i];
                    u[p][i] = c * up - s * uq;
                    u[q][i] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    u.iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Determinant of a row-major `k x k` double-double matrix by Gaussian
/// elimination with partial pivoting.
pub(crate) fn det(mut m: Vec<Dd>, k: usize) -> Dd {
    let mut det = dd(1.0);
    for col in 0..k {
        let mut piv = col;
        let mut best = m[col * k + col].hi().abs();
        for r in (col + 1)..k {
            let v = m[r * k + col].hi().abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return zero();
        }
        if piv != col {
            for j in 0..k {
                m.swap(col * k + j, piv * k + j);
            }
            det = -det;
        }
        let p = m[col * k + col];
        det *= p;
        for r in (col + 1)..k {
            let f = div(m[r * k + col], p);
            if f.hi() == 0.0 {
                continue;
            }
            for j in col..k {
                let v = m[col * k + j];
                m[r * k + j] -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_and_exponent_are_exact() {
        assert_eq!(pow2(3), 8.0);
        assert_eq!(pow2(-2), 0.25);
        assert_eq!(exponent(8.0), 3);
        assert_eq!(exponent(0.3), -2);
        assert_eq!(exponent(1e-310), -1030);
    }

    #[test]
    fn diagonal_singular_values_are_exact() {
        let a: Vec<Dd> = [3.0, 0.0, 0.0, 0.0, -5.0, 0.0, 0.0, 0.0, 0.5]
            .iter()
            .map(|&x| dd(x))
            .collect();
        let s = singular_values(&a, 3, 3);
        assert_eq!(s[0].hi(), 5.0);
        assert_eq!(s[1].hi(), 3.0);
        assert_eq!(s[2].hi(), 0.5);
    }

    #[test]
    fn division_carries_double_double_precision() {
        for (a, b) in [(1.0, 3.0), (-3.873056887435804e-2, 0.5459477091185577), (7.0, 1e-9)] {
            let q = div(dd(a), dd(b));
            let resid = (q * b - dd(a)).hi().abs();
            assert!(resid <= 1e-30 * a.abs(), "{a}/{b}: residual {resid:e}");
        }
    }

    #[test]
    fn determinant_matches_hand_value() {
        let a: Vec<Dd> = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]
            .iter()
            .map(|&x| dd(x))
            .collect();
        assert!((det(a, 3).hi() - 18.0).abs() < 1e-14);
    }
}

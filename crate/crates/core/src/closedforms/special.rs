//! Special functions needed by the exact constants.

use std::f64::consts::{FRAC_2_SQRT_PI, FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::adaptive;

/// `arcsec(x) = arccos(1/x)`, in `[0, π]`.
pub fn arcsec(x: f64) -> Result<f64> {
    if x.abs() < 1.0 || x.is_nan() {
        return Err(Error::Domain(format!("arcsec undefined for |x| < 1 (x = {x})")));
    }
    Ok((1.0 / x).acos())
}

/// `arccot(x) = arctan(1/x)` for `x > 0`.
pub fn arccot(x: f64) -> f64 {
    (1.0 / x).atan()
}

/// Error function. Positive-term series below `|x| = 3`, continued fraction
/// for `erfc` above.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < 3.0 {
        erf_series(ax)
    } else {
        1.0 - erfc_cf(ax)
    };
    v.copysign(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x >= 3.0 {
        erfc_cf(x)
    } else {
        1.0 - erf(x)
    }
}

// erf x = (2/√π) x e^{-x²} Σ (2x²)ⁿ / (2n+1)!!
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * x * (-x2).exp() * sum
}

// erfc x = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))), modified Lentz
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Complete elliptic integral of the second kind with modulus `ξ`:
/// `E(ξ) = ∫₀^{π/2} √(1 − ξ² sin²θ) dθ`.
pub fn elliptic_e(xi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("elliptic E needs 0 <= xi <= 1 (xi = {xi})")));
    }
    // 1 − ξ² sin²t = cos²t + (1−ξ)(1+ξ) sin²t avoids cancellation as ξ → 1
    let kc2 = (1.0 - xi) * (1.0 + xi);
    let f = move |t: f64| {
        let (s, c) = t.sin_cos();
        (c * c + kc2 * s * s).sqrt()
    };
    Ok(adaptive(&f, 0.0, FRAC_PI_2, 1e-15))
}

/// Partial sums `S_K, S_{2K}, …, S_{16K}` feed the extrapolation.
const EXTRAPOLATION_POINTS: usize = 5;
const BASE_TERMS: f64 = 1000.0;

/// Solves the small dense system `m x = rhs` by partial pivoting.
fn solve_dense<const N: usize>(mut m: [[f64; N]; N], mut rhs: [f64; N]) -> [f64; N] {
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..N {
            let f = m[row][col] / m[col][col];
            let (top, bottom) = m.split_at_mut(row);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * y;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|c| m[row][c] * x[c]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    x
}

/// `₃F₂(a₁, a₂, a₃; b₁, b₂; 1)`.
///
/// Terms follow the Pochhammer recurrence
/// `t_{k+1} = t_k (a₁+k)(a₂+k)(a₃+k) / ((b₁+k)(b₂+k)(k+1))`.
/// With `s = b₁ + b₂ − a₁ − a₂ − a₃` the remainder after `K` terms has the
/// expansion `K^{−s} (d₀ + d₁/K + d₂/K² + …)`, so the limit is extrapolated
/// from compensated partial sums at `K, 2K, 4K, 8K, 16K`.
pub fn hyp3f2_unit(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64) -> Result<f64> {
    let s = b1 + b2 - a1 - a2 - a3;
    if s <= 0.0 || !s.is_finite() {
        return Err(Error::Domain(format!(
            "3F2 at unit argument diverges unless b1 + b2 - a1 - a2 - a3 > 0 (got {s})"
        )));
    }
    for b in [b1, b2] {
        if b <= 0.0 && b.fract() == 0.0 {
            return Err(Error::Domain(format!("3F2 lower parameter {b} is a non-positive integer")));
        }
    }
    let scale = [a1, a2, a3, b1, b2].iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let base = BASE_TERMS.max(10.0 * scale).ceil() as usize;
    let checkpoints: [usize; EXTRAPOLATION_POINTS] = std::array::from_fn(|i| base << i);

    let mut term = 1.0f64;
    let (mut sum, mut comp) = (1.0f64, 0.0f64);
    let mut partial = [0.0; EXTRAPOLATION_POINTS];
    let mut next = 0;
    for k in 0..checkpoints[EXTRAPOLATION_POINTS - 1] {
        let kf = k as f64;
        term *= (a1 + kf) * (a2 + kf) * (a3 + kf) / ((b1 + kf) * (b2 + kf) * (kf + 1.0));
        if term == 0.0 {
            return Ok(sum + comp);
        }
        // Neumaier summation
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        if k + 1 == checkpoints[next] {
            partial[next] = sum + comp;
            next += 1;
        }
    }
    let mut m = [[0.0; EXTRAPOLATION_POINTS]; EXTRAPOLATION_POINTS];
    for (row, &kk) in m.iter_mut().zip(&checkpoints) {
        let kf = kk as f64;
        row[0] = 1.0;
        for (j, cell) in row.iter_mut().enumerate().skip(1) {
            *cell = -kf.powf(-s - (j - 1) as f64);
        }
    }
    Ok(solve_dense(m, partial)[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive;

    fn erf_by_quadrature(x: f64) -> f64 {
        FRAC_2_SQRT_PI * adaptive(&|t: f64| (-t * t).exp(), 0.0, x, 1e-16)
    }

    fn agm_e(k: f64) -> f64 {
        // E(k) = K(k) (1 − Σ 2^{n−1} cₙ²), K = π / (2 AGM(1, k'))
        let mut a = 1.0;
        let mut b = (1.0 - k * k).sqrt();
        let mut c = k;
        let mut sum = 0.5 * c * c;
        let mut pow = 0.5;
        for _ in 0..40 {
            let an = 0.5 * (a + b);
            let bn = (a * b).sqrt();
            c = 0.5 * (a - b);
            pow *= 2.0;
            sum += pow * c * c;
            a = an;
            b = bn;
            if c.abs() < 1e-17 {
                break;
            }
        }
        FRAC_PI_2 / a * (1.0 - sum)
    }

    #[test]
    fn arcsec_values() {
        assert_eq!(arcsec(1.0).unwrap(), 0.0);
        assert!((arcsec(2.0).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((3.0 * arcsec(3.0).unwrap() - 3.692878252022324).abs() < 1e-14);
        assert!(matches!(arcsec(0.5), Err(Error::Domain(_))));
        assert!((arcsec(-1.0).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn erf_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(6.0) - 1.0).abs() < 1e-15);
        assert!((erf(1.0) - 0.842700792949715).abs() < 1e-15);
        assert!((erf(-1.0) + 0.842700792949715).abs() < 1e-15);
    }

    #[test]
    fn erf_matches_quadrature_on_grid() {
        let mut x = -6.0;
        while x <= 6.0 {
            let want = erf_by_quadrature(x);
            assert!((erf(x) - want).abs() < 1e-14, "x = {x}: {} vs {want}", erf(x));
            x += 0.0625;
        }
    }

    #[test]
    fn erfc_continued_fraction_is_accurate() {
        // erfc(4) = 1.541725790028002e-8
        assert!((erfc(4.0) / 1.541725790028002e-8 - 1.0).abs() < 1e-13);
        // both branches agree at the split
        assert!((erf_series(3.0) - (1.0 - erfc_cf(3.0))).abs() < 1e-15);
    }

    #[test]
    fn elliptic_values() {
        assert!((elliptic_e(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((elliptic_e(1.0).unwrap() - 1.0).abs() < 1e-15);
        let e = elliptic_e(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((e - 1.350643881047675).abs() < 1e-13);
        assert!(elliptic_e(1.2).is_err());
        assert!(elliptic_e(-0.1).is_err());
    }

    #[test]
    fn elliptic_matches_agm() {
        for i in 0..=20 {
            let k = i as f64 / 20.0 * 0.999;
            assert!((elliptic_e(k).unwrap() - agm_e(k)).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn hyp3f2_terminating_and_domain() {
        assert_eq!(hyp3f2_unit(0.0, 0.5, 1.5, 1.0, 2.0).unwrap(), 1.0);
        // -1 terminates after one term: 1 + a2 a3 (-1) / (b1 b2)
        let v = hyp3f2_unit(-1.0, 0.5, 1.5, 1.0, 2.0).unwrap();
        assert!((v - (1.0 - 0.75 / 2.0)).abs() < 1e-16);
        assert!(hyp3f2_unit(1.0, 1.0, 1.0, 1.0, 2.0).is_err());
        assert!(hyp3f2_unit(0.5, 0.5, 0.5, -1.0, 4.0).is_err());
    }

    #[test]
    fn hyp3f2_reduces_to_gauss_sum() {
        // with a3 = b2 the series is ₂F₁(a,b;c;1) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b));
        // for (1/2, 1/2; 2) that is Γ(2)Γ(1)/Γ(3/2)² = 4/π
        let v = hyp3f2_unit(0.5, 0.5, 1.7, 2.0, 1.7).unwrap();
        assert!((v - 4.0 / PI).abs() < 1e-13, "{v}");
    }

    #[test]
    fn hyp3f2_cube_constant() {
        let v = hyp3f2_unit(-0.5, 0.5, 1.5, 1.0, 2.0).unwrap();
        assert!((8.0 + 6.0 * PI * v - 22.23711743343947).abs() < 1e-12);
    }
}

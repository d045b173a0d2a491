//! Exact solution of `dα/dz = g·α*` over one step with `g` held constant.

use num_complex::Complex64;

/// `(cosh(|g|Δz), (g/|g|)·sinh(|g|Δz))`; the identity at `g = 0`.
///
/// Both come from one `expm1`, which keeps `sinh` accurate for small steps.
#[inline]
pub fn bogoliubov_coeffs(g: Complex64, dz: f64) -> (f64, Complex64) {
    let m = g.norm_sqr().sqrt();
    if m == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let em1 = (m * dz).exp_m1();
    let e = em1 + 1.0;
    let sinh = 0.5 * em1 * (em1 + 2.0) / e;
    let cosh = 0.5 * (e + e.recip());
    (cosh, g * (sinh / m))
}

#[inline]
pub fn apply(alpha: Complex64, c: f64, s: Complex64) -> Complex64 {
    alpha * c + s * alpha.conj()
}

/// Determinant of the real 2×2 map on `(Re α, Im α)`: `c² − |s|²`.
pub fn determinant(c: f64, s: Complex64) -> f64 {
    c * c - s.norm_sqr()
}

/// Fills per-point coefficients for a pump field `pump` (position domain),
/// coupling `g = pump·inv_scale`.
pub fn coupling_coefficients(
    pump: &[Complex64],
    inv_scale: f64,
    dz: f64,
    c: &mut [f64],
    s: &mut [Complex64],
) {
    assert!(pump.len() == c.len() && c.len() == s.len());
    for ((p, ci), si) in pump.iter().zip(c.iter_mut()).zip(s.iter_mut()) {
        let (a, b) = bogoliubov_coeffs(*p * inv_scale, dz);
        *ci = a;
        *si = b;
    }
}

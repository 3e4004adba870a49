use crate::error::{Error, Result};
use crate::flow::C64;

/// Principal logarithm `log|z| + 2i·atan(y/(x+|z|))`, analytic off the closed
/// negative real axis.
pub fn principal_log(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 || !z.is_finite() {
        return Err(Error::singularity(
            "principal_log (branch cut on the closed negative real axis)",
            0,
            z,
        ));
    }
    let modulus = z.norm();
    // x + |z| = y²/(|z| − x) avoids cancellation for x < 0.
    let denom = if z.re >= 0.0 {
        z.re + modulus
    } else {
        z.im * z.im / (modulus - z.re)
    };
    Ok(C64::new(modulus.ln(), 2.0 * z.im.atan2(denom)))
}

/// Analytic continuation of `z^{-3/2}` (that is, `1/r³` with `z = r²`),
/// `exp(−(3/2)·L(z))`.
pub fn analytic_inv_r3(z: C64) -> Result<C64> {
    Ok((-1.5 * principal_log(z)?).exp())
}

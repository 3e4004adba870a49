use crate::error::{Error, Result};

/// Log–log residual below which a windowed fit stops discarding large steps.
pub const WINDOW_LOG_RESIDUAL: f64 = 0.02;

/// `error ≈ coefficient · τ^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// Largest relative deviation `|Cτᵖ/e − 1|` over the samples used.
    pub residual: f64,
    /// Number of samples the fit was computed from.
    pub samples: usize,
}

fn check_samples(taus: &[f64], values: &[f64]) -> Result<()> {
    if taus.len() != values.len() {
        return Err(Error::Validation(format!(
            "{} step sizes but {} values",
            taus.len(),
            values.len()
        )));
    }
    if let Some(t) = taus.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::Domain(format!("step sizes must be positive, got {t}")));
    }
    Ok(())
}

/// Least-squares line `y = a + b·x`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Fits `error = C·τᵖ` by linear least squares on logarithms.
pub fn power_law_fit(taus: &[f64], errors: &[f64]) -> Result<PowerLawFit> {
    check_samples(taus, errors)?;
    if taus.len() < 3 {
        return Err(Error::Validation(format!(
            "a power-law fit needs at least 3 samples, got {}",
            taus.len()
        )));
    }
    if let Some(e) = errors.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::Domain(format!("errors must be positive, got {e}")));
    }
    let lx: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (a, p) = line_fit(&lx, &ly);
    let coefficient = a.exp();
    let residual = taus
        .iter()
        .zip(errors)
        .map(|(t, e)| (coefficient * t.powf(p) / e - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(PowerLawFit {
        exponent: p,
        coefficient,
        residual,
        samples: taus.len(),
    })
}

fn log_residual(fit: &PowerLawFit, taus: &[f64], errors: &[f64]) -> f64 {
    taus.iter()
        .zip(errors)
        .map(|(t, e)| (fit.coefficient.ln() + fit.exponent * t.ln() - e.ln()).abs())
        .fold(0.0, f64::max)
}

/// Power-law fit that drops samples from the large-τ end until the log–log
/// residual falls below [`WINDOW_LOG_RESIDUAL`] or three samples remain.
pub fn windowed_power_law_fit(taus: &[f64], errors: &[f64]) -> Result<PowerLawFit> {
    check_samples(taus, errors)?;
    let mut pairs: Vec<(f64, f64)> = taus.iter().copied().zip(errors.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut start = 0;
    loop {
        let (t, e): (Vec<f64>, Vec<f64>) = pairs[start..].iter().copied().unzip();
        let fit = power_law_fit(&t, &e)?;
        if t.len() <= 3 || log_residual(&fit, &t, &e) < WINDOW_LOG_RESIDUAL {
            return Ok(fit);
        }
        start += 1;
    }
}

/// Leading term `c·τᵖ` of a signed quantity that vanishes as `τ → 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeadingTerm {
    Term {
        /// Integer order `p`.
        order: u32,
        /// Measured exponent before rounding.
        exponent: f64,
        /// Signed coefficient `c`.
        coefficient: f64,
        samples: usize,
    },
    /// Below the roundoff floor for every step size.
    Zero,
}

impl LeadingTerm {
    pub fn order(&self) -> Option<u32> {
        match self {
            LeadingTerm::Term { order, .. } => Some(*order),
            LeadingTerm::Zero => None,
        }
    }

    pub fn coefficient(&self) -> Option<f64> {
        match self {
            LeadingTerm::Term { coefficient, .. } => Some(*coefficient),
            LeadingTerm::Zero => None,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            LeadingTerm::Term { exponent, .. } => Some(*exponent),
            LeadingTerm::Zero => None,
        }
    }
}

/// Extracts the leading term of `v(τ) = cτᵖ(1 + O(τ²))`.
///
/// Samples with `|v| ≤ floor` are discarded. The exponent comes from a
/// windowed log–log fit (or the two-point slope when only two samples are
/// left) and is rounded to `p`; `c` is then the `τ → 0` limit of `v/τᵖ`,
/// extrapolated by a least-squares fit of `c₀ + c₂τ²`.
pub fn leading_term(taus: &[f64], values: &[f64], floor: f64) -> Result<LeadingTerm> {
    check_samples(taus, values)?;
    let (t, v): (Vec<f64>, Vec<f64>) = taus
        .iter()
        .zip(values)
        .filter(|(_, v)| v.abs() > floor)
        .map(|(t, v)| (*t, *v))
        .unzip();
    if t.len() < 2 {
        return Ok(LeadingTerm::Zero);
    }
    let magnitudes: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let exponent = if t.len() >= 3 {
        windowed_power_law_fit(&t, &magnitudes)?.exponent
    } else {
        (magnitudes[0] / magnitudes[1]).ln() / (t[0] / t[1]).ln()
    };
    let order = exponent.round().max(0.0) as u32;
    let scaled: Vec<f64> = t.iter().zip(&v).map(|(t, v)| v / t.powi(order as i32)).collect();
    let t2: Vec<f64> = t.iter().map(|t| t * t).collect();
    let (c0, _) = line_fit(&t2, &scaled);
    Ok(LeadingTerm::Term {
        order,
        exponent,
        coefficient: c0,
        samples: t.len(),
    })
}

/// Convergence slope of `errors` over `taus` above their noise floors
/// `floors[j]`.
///
/// Samples are scanned from the largest step down and the scan stops at the
/// first one at or below its floor: past that point the error is roundoff,
/// and a later sample rising above the floor is noise. Three or more kept
/// samples give a least-squares fit; with exactly two the exponent is the
/// slope of the line through them (and `samples == 2`). `None` when fewer
/// are kept.
pub fn order_slope(taus: &[f64], errors: &[f64], floors: &[f64]) -> Result<Option<PowerLawFit>> {
    check_samples(taus, errors)?;
    check_samples(taus, floors)?;
    let mut samples: Vec<(f64, f64, f64)> = taus
        .iter()
        .zip(errors)
        .zip(floors)
        .map(|((t, e), f)| (*t, *e, *f))
        .collect();
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (t, e): (Vec<f64>, Vec<f64>) = samples
        .into_iter()
        .take_while(|(_, e, f)| e.is_finite() && e > f)
        .map(|(t, e, _)| (t, e))
        .unzip();
    match t.len() {
        0 | 1 => Ok(None),
        2 => {
            let exponent = (e[0] / e[1]).ln() / (t[0] / t[1]).ln();
            Ok(Some(PowerLawFit {
                exponent,
                coefficient: e[0] / t[0].powf(exponent),
                residual: 0.0,
                samples: 2,
            }))
        }
        _ => power_law_fit(&t, &e).map(Some),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic(start: f64, n: i32) -> Vec<f64> {
        (0..n).map(|j| start * 0.5f64.powi(j)).collect()
    }

    #[test]
    fn exact_power_laws() {
        let taus = dyadic(0.5, 6);
        for p in 2..=8 {
            let e: Vec<f64> = taus.iter().map(|t| t.powi(p)).collect();
            let fit = power_law_fit(&taus, &e).unwrap();
            assert!((fit.exponent - p as f64).abs() < 1e-10);
            assert!((fit.coefficient - 1.0).abs() < 1e-10);
            assert!(fit.residual < 1e-12);
        }
        let e: Vec<f64> = taus.iter().map(|t| 5.0 * t * t).collect();
        let fit = power_law_fit(&taus, &e).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12 && (fit.coefficient - 5.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(power_law_fit(&[0.1, 0.05], &[1.0, 0.5]).is_err());
        assert!(power_law_fit(&[0.1, 0.05, 0.025], &[1.0, 0.0, 0.5]).is_err());
        assert!(power_law_fit(&[0.1, -0.05, 0.025], &[1.0, 0.1, 0.5]).is_err());
        assert!(power_law_fit(&[0.1, 0.05, 0.025], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn window_drops_preasymptotic_samples() {
        // Leading τ⁴ with a large τ⁶ correction that only matters for big τ.
        let taus = dyadic(1.0, 7);
        let e: Vec<f64> = taus.iter().map(|t| t.powi(4) * (1.0 + 20.0 * t * t)).collect();
        let plain = power_law_fit(&taus, &e).unwrap();
        let windowed = windowed_power_law_fit(&taus, &e).unwrap();
        assert!((windowed.exponent - 4.0).abs() < (plain.exponent - 4.0).abs());
        assert!(windowed.samples < taus.len());
    }

    #[test]
    fn leading_term_extrapolates_coefficient() {
        let taus = dyadic(0.8, 6);
        let v: Vec<f64> = taus
            .iter()
            .map(|t| -t.powi(5) / 180.0 * (1.0 + 0.3 * t * t))
            .collect();
        match leading_term(&taus, &v, 1e-13).unwrap() {
            LeadingTerm::Term { order, coefficient, .. } => {
                assert_eq!(order, 5);
                assert!((coefficient * 180.0 + 1.0).abs() < 1e-6);
            }
            LeadingTerm::Zero => panic!("expected a term"),
        }
    }

    #[test]
    fn leading_term_below_floor_is_zero() {
        let taus = dyadic(0.8, 4);
        let v = vec![1e-16, -2e-17, 0.0, 3e-16];
        assert_eq!(leading_term(&taus, &v, 1e-13).unwrap(), LeadingTerm::Zero);
    }

    #[test]
    fn leading_term_from_two_samples() {
        let v = [3.0 * 0.8f64.powi(8), 3.0 * 0.4f64.powi(8), 1e-20];
        let lt = leading_term(&[0.8, 0.4, 0.2], &v, 1e-13).unwrap();
        assert_eq!(lt.order(), Some(8));
        assert!((lt.coefficient().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn slope_skips_roundoff_samples() {
        let taus = dyadic(0.1, 6);
        let e: Vec<f64> = taus
            .iter()
            .map(|t| (2.0 * t.powi(6)).max(1e-15))
            .collect();
        let floors = vec![1e-13; taus.len()];
        let fit = order_slope(&taus, &e, &floors).unwrap().unwrap();
        assert!((fit.exponent - 6.0).abs() < 1e-10);
        assert_eq!(fit.samples, 5);
        let two = order_slope(&taus[3..], &e[3..], &floors[3..]).unwrap().unwrap();
        assert_eq!(two.samples, 2);
        assert!((two.exponent - 6.0).abs() < 1e-10);
        assert!(order_slope(&taus[4..], &e[4..], &floors[4..]).unwrap().is_none());
    }

    #[test]
    fn slope_stops_at_the_first_roundoff_sample() {
        // A plateau sample that creeps back above the floor is not used.
        let taus = [0.4, 0.2, 0.1, 0.05];
        let e = [1e-8, 1e-14, 2e-12, 3e-12];
        let floors = [1e-13; 4];
        assert!(order_slope(&taus, &e, &floors).unwrap().is_none());
        let shuffled = order_slope(&[0.1, 0.4, 0.2], &[1e-3, 64e-3, 8e-3], &[0.0; 3]).unwrap().unwrap();
        assert!((shuffled.exponent - 3.0).abs() < 1e-12);
    }
}

use std::f64::consts::PI;

use super::SplitProblem;
use crate::error::{Error, Result};
use crate::flow::{FlowMap, MethodMeta, C64};
use crate::spectral::{diffuse_in_place, SpectralField, SpectralGrid};

/// Denominators smaller than this in modulus are reported as singular.
pub const FISHER_POLE_TOLERANCE: f64 = 1e-12;

fn logistic_in_place(values: &mut [C64], tau: C64) -> Result<()> {
    let growth = tau.exp();
    for (j, u) in values.iter_mut().enumerate() {
        let den = 1.0 + *u * (growth - 1.0);
        if den.norm() < FISHER_POLE_TOLERANCE {
            return Err(Error::singularity("fisher_reaction_flow (pole)", j, den));
        }
        *u = *u * growth / den;
    }
    Ok(())
}

/// Pointwise exact flow of `u' = u(1 − u)`, evaluated as
/// `u₀e^τ / (1 + u₀(e^τ − 1))`.
pub fn fisher_reaction_flow(field: &SpectralField, tau: C64) -> Result<SpectralField> {
    let mut values = field.values().to_vec();
    logistic_in_place(&mut values, tau)?;
    SpectralField::new(field.grid(), values)
}

/// `u_t = Δu + u(1 − u)` on a periodic grid, split into the heat flow
/// (`f_a`) and the reaction (`f_b`). Initial data `sin(2πx/L)`.
#[derive(Debug, Clone)]
pub struct FisherProblem {
    grid: SpectralGrid,
}

impl FisherProblem {
    /// Periodic `[0, 1)` with `n` points.
    pub fn new(n: usize) -> Result<Self> {
        Ok(FisherProblem {
            grid: SpectralGrid::new(0.0, 1.0, n)?,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }
}

impl SplitProblem for FisherProblem {
    fn name(&self) -> &str {
        "fisher"
    }

    fn flow_a(&self) -> FlowMap {
        let grid = self.grid.clone();
        FlowMap::new("heat", MethodMeta::exact(), move |x, tau| {
            let mut v = x.to_vec();
            diffuse_in_place(&grid, &mut v, C64::new(1.0, 0.0), 0.0, tau)?;
            Ok(v)
        })
    }

    fn flow_b(&self) -> FlowMap {
        FlowMap::new("logistic", MethodMeta::exact(), move |x, tau| {
            let mut v = x.to_vec();
            logistic_in_place(&mut v, tau)?;
            Ok(v)
        })
    }

    fn initial_state(&self) -> Vec<f64> {
        let l = self.grid.length();
        self.grid
            .nodes()
            .into_iter()
            .map(|x| (2.0 * PI * x / l).sin())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sup_norm_distance;

    fn constant(grid: &SpectralGrid, v: f64) -> SpectralField {
        grid.sample(|_| C64::new(v, 0.0))
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn fixed_points() {
        let g = SpectralGrid::new(0.0, 1.0, 8).unwrap();
        for v in [0.0, 1.0] {
            let f = constant(&g, v);
            let out = fisher_reaction_flow(&f, C64::new(0.3, 0.2)).unwrap();
            assert!(sup_norm_distance(&out, &f).unwrap() < 1e-15);
        }
    }

    #[test]
    fn matches_written_form() {
        // u0 + u0(1 − u0)(e^t − 1)/(1 + u0(e^t − 1))
        let g = SpectralGrid::new(0.0, 1.0, 16).unwrap();
        let f = g.sample(|x| C64::new((2.0 * PI * x).sin(), 0.1 * x));
        let tau = C64::new(0.15, 0.05);
        let out = fisher_reaction_flow(&f, tau).unwrap();
        let e = tau.exp() - 1.0;
        for (u0, u) in f.values().iter().zip(out.values()) {
            let written = u0 + u0 * (1.0 - u0) * e / (1.0 + u0 * e);
            assert!((written - u).norm() < 1e-15);
        }
    }

    #[test]
    fn matches_fine_integration() {
        let g = SpectralGrid::new(0.0, 1.0, 4).unwrap();
        let f = constant(&g, 0.5);
        let out = fisher_reaction_flow(&f, c(0.2)).unwrap();
        let steps = 10_000;
        let h = 0.2 / steps as f64;
        let rhs = |u: f64| u * (1.0 - u);
        let mut u = 0.5;
        for _ in 0..steps {
            let k1 = rhs(u);
            let k2 = rhs(u + 0.5 * h * k1);
            let k3 = rhs(u + 0.5 * h * k2);
            let k4 = rhs(u + h * k3);
            u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!(out.values().iter().all(|v| (v - u).norm() < 1e-10));
    }

    #[test]
    fn semigroup() {
        let g = SpectralGrid::new(0.0, 1.0, 16).unwrap();
        let f = g.sample(|x| C64::new(0.5 + 0.4 * (2.0 * PI * x).cos(), 0.0));
        for (t1, t2) in [(0.1, 0.3), (0.45, 0.05), (0.2, 0.2)] {
            let two = fisher_reaction_flow(&fisher_reaction_flow(&f, c(t2)).unwrap(), c(t1)).unwrap();
            let one = fisher_reaction_flow(&f, c(t1 + t2)).unwrap();
            assert!(sup_norm_distance(&one, &two).unwrap() < 1e-12);
        }
    }

    #[test]
    fn pole_is_reported_with_index() {
        // u0 = −1/(e^τ − 1) makes the denominator vanish.
        let g = SpectralGrid::new(0.0, 1.0, 4).unwrap();
        let tau = 0.5f64;
        let bad = -1.0 / (tau.exp() - 1.0);
        let f = SpectralField::from_real(&g, &[0.1, 0.2, bad, 0.3]).unwrap();
        match fisher_reaction_flow(&f, c(tau)).unwrap_err() {
            Error::Singularity { index, .. } => assert_eq!(index, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn problem_layout() {
        let p = FisherProblem::new(128).unwrap();
        let x0 = p.initial_state();
        assert_eq!(x0.len(), 128);
        assert_eq!(x0[0], 0.0);
        assert!((x0[32] - 1.0).abs() < 1e-15);
        assert!(FisherProblem::new(100).is_err());
    }
}

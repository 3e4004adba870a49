use super::complex_log::analytic_inv_r3;
use super::SplitProblem;
use crate::error::{Error, Result};
use crate::flow::{FlowMap, MethodMeta, C64};

/// Planar two-body state; the flat layout used by flows is `[q₁, q₂, p₁, p₂]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerState {
    pub q: [C64; 2],
    pub p: [C64; 2],
    pub mu: f64,
}

impl KeplerState {
    pub fn from_flat(x: &[C64], mu: f64) -> Self {
        KeplerState {
            q: [x[0], x[1]],
            p: [x[2], x[3]],
            mu,
        }
    }

    pub fn to_flat(&self) -> Vec<C64> {
        vec![self.q[0], self.q[1], self.p[0], self.p[1]]
    }

    pub fn to_real(&self) -> [f64; 4] {
        [self.q[0].re, self.q[1].re, self.p[0].re, self.p[1].re]
    }
}

/// Flow of `T = |p|²/2`: `q ← q + τp`.
pub fn kepler_drift(state: &KeplerState, tau: C64) -> KeplerState {
    KeplerState {
        q: [state.q[0] + tau * state.p[0], state.q[1] + tau * state.p[1]],
        ..*state
    }
}

/// Flow of `V = −μ/r`: `p ← p − τμq/r³`, with `1/r³` continued analytically
/// through the principal logarithm of `q₁² + q₂²`.
pub fn kepler_kick(state: &KeplerState, tau: C64) -> Result<KeplerState> {
    let r2 = state.q[0] * state.q[0] + state.q[1] * state.q[1];
    let inv_r3 = analytic_inv_r3(r2)?;
    let factor = tau * state.mu * inv_r3;
    Ok(KeplerState {
        p: [
            state.p[0] - factor * state.q[0],
            state.p[1] - factor * state.q[1],
        ],
        ..*state
    })
}

/// `q = (1−e, 0)`, `p = (0, √((1+e)/(1−e)))`, `μ = 1`: an ellipse of
/// eccentricity `e` and period `2π`.
pub fn kepler_initial_conditions(e: f64) -> Result<KeplerState> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::Domain(format!(
            "eccentricity must lie in [0, 1), got {e}"
        )));
    }
    let zero = C64::new(0.0, 0.0);
    Ok(KeplerState {
        q: [C64::new(1.0 - e, 0.0), zero],
        p: [zero, C64::new(((1.0 + e) / (1.0 - e)).sqrt(), 0.0)],
        mu: 1.0,
    })
}

/// `H = |p|²/2 − μ/r` on the real parts of the state.
pub fn kepler_energy(state: &KeplerState) -> Result<f64> {
    let [q1, q2, p1, p2] = state.to_real();
    let r = q1.hypot(q2);
    if r == 0.0 {
        return Err(Error::singularity("kepler_energy (collision)", 0, C64::new(0.0, 0.0)));
    }
    Ok(0.5 * (p1 * p1 + p2 * p2) - state.mu / r)
}

/// Kepler problem split into drift (`f_a`) and kick (`f_b`).
#[derive(Debug, Clone, Copy)]
pub struct KeplerProblem {
    pub eccentricity: f64,
    pub mu: f64,
}

impl KeplerProblem {
    pub fn new(eccentricity: f64) -> Result<Self> {
        kepler_initial_conditions(eccentricity)?;
        Ok(KeplerProblem {
            eccentricity,
            mu: 1.0,
        })
    }
}

impl SplitProblem for KeplerProblem {
    fn name(&self) -> &str {
        "kepler"
    }

    fn flow_a(&self) -> FlowMap {
        let mu = self.mu;
        FlowMap::new("kepler_drift", MethodMeta::exact(), move |x, tau| {
            Ok(kepler_drift(&KeplerState::from_flat(x, mu), tau).to_flat())
        })
    }

    fn flow_b(&self) -> FlowMap {
        let mu = self.mu;
        FlowMap::new("kepler_kick", MethodMeta::exact(), move |x, tau| {
            Ok(kepler_kick(&KeplerState::from_flat(x, mu), tau)?.to_flat())
        })
    }

    fn initial_state(&self) -> Vec<f64> {
        kepler_initial_conditions(self.eccentricity)
            .map(|s| s.to_real().to_vec())
            .unwrap_or_default()
    }

    fn energy(&self, state: &[f64]) -> Option<f64> {
        let flat: Vec<C64> = state.iter().map(|&v| C64::new(v, 0.0)).collect();
        kepler_energy(&KeplerState::from_flat(&flat, self.mu)).ok()
    }
}

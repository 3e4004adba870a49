use std::ops::{Mul, Sub};

use super::SplitProblem;
use crate::error::Result;
use crate::flow::{FlowMap, MethodMeta, C64};

/// 2×2 complex matrix acting on `(q, p)ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoMatrix(pub [[C64; 2]; 2]);

impl HoMatrix {
    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        HoMatrix([[one, zero], [zero, one]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        HoMatrix(m.map(|row| row.map(|v| C64::new(v, 0.0))))
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let m = &self.0;
        vec![
            m[0][0] * x[0] + m[0][1] * x[1],
            m[1][0] * x[0] + m[1][1] * x[1],
        ]
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Matrix of a linear flow on two components, by applying it to the unit
    /// vectors.
    pub fn of_flow(flow: &FlowMap, tau: C64) -> Result<Self> {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let c0 = flow.apply(&[one, zero], tau)?;
        let c1 = flow.apply(&[zero, one], tau)?;
        Ok(HoMatrix([[c0[0], c1[0]], [c0[1], c1[1]]]))
    }

    fn into_flow(name: &str, meta: MethodMeta, f: fn(C64) -> HoMatrix) -> FlowMap {
        FlowMap::new(name, meta, move |x, tau| Ok(f(tau).apply(x)))
    }
}

impl Mul for HoMatrix {
    type Output = HoMatrix;

    fn mul(self, rhs: HoMatrix) -> HoMatrix {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        HoMatrix(out)
    }
}

impl Sub for HoMatrix {
    type Output = HoMatrix;

    fn sub(self, rhs: HoMatrix) -> HoMatrix {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v -= rhs.0[i][j];
            }
        }
        HoMatrix(out)
    }
}

/// Exact flow of `H = (p² + q²)/2`: rotation by `τ`.
pub fn ho_exact(tau: C64) -> HoMatrix {
    let (s, c) = (tau.sin(), tau.cos());
    HoMatrix([[c, s], [-s, c]])
}

/// Flow of the kinetic part `T = p²/2`.
pub fn ho_drift(tau: C64) -> HoMatrix {
    let one = C64::new(1.0, 0.0);
    HoMatrix([[one, tau], [C64::new(0.0, 0.0), one]])
}

/// Flow of the potential part `V = q²/2`.
pub fn ho_kick(tau: C64) -> HoMatrix {
    let one = C64::new(1.0, 0.0);
    HoMatrix([[one, C64::new(0.0, 0.0)], [-tau, one]])
}

/// Leapfrog `M_T(τ/2) M_V(τ) M_T(τ/2)`.
pub fn ho_strang(tau: C64) -> HoMatrix {
    ho_drift(0.5 * tau) * ho_kick(tau) * ho_drift(0.5 * tau)
}

/// The harmonic oscillator split into drift (`f_a`) and kick (`f_b`).
#[derive(Debug, Clone, Copy)]
pub struct HarmonicOscillator {
    pub q0: f64,
    pub p0: f64,
}

impl Default for HarmonicOscillator {
    fn default() -> Self {
        HarmonicOscillator { q0: 2.5, p0: 0.0 }
    }
}

impl HarmonicOscillator {
    pub fn exact_flow() -> FlowMap {
        HoMatrix::into_flow("ho_exact", MethodMeta::exact(), ho_exact)
    }

    /// Strang splitting as a single matrix.
    pub fn strang_flow() -> FlowMap {
        HoMatrix::into_flow("strang", MethodMeta::symmetric(2), ho_strang)
    }
}

impl SplitProblem for HarmonicOscillator {
    fn name(&self) -> &str {
        "harmonic"
    }

    fn flow_a(&self) -> FlowMap {
        HoMatrix::into_flow("ho_drift", MethodMeta::exact(), ho_drift)
    }

    fn flow_b(&self) -> FlowMap {
        HoMatrix::into_flow("ho_kick", MethodMeta::exact(), ho_kick)
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![self.q0, self.p0]
    }

    fn energy(&self, state: &[f64]) -> Option<f64> {
        Some(0.5 * (state[0] * state[0] + state[1] * state[1]))
    }
}

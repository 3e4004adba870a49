//! Test systems as exact split flows, and the splitting methods built from
//! them.
//!
//! Each problem splits its vector field as `f = f_a + f_b` where both parts
//! have closed-form flows valid for complex time. The flows are real maps
//! (they commute with complex conjugation of state and step), which is what
//! the real projection in [`crate::composition`] relies on.

mod cgl;
mod complex_log;
mod fisher;
mod harmonic;
mod kepler;

pub use cgl::{
    cgl_linear_flow, cgl_nonlinear_flow, cgl_nonlinear_flow_vw, CglParams, CglProblem, CglState,
};
pub use complex_log::{analytic_inv_r3, principal_log};
pub use fisher::{fisher_reaction_flow, FisherProblem};
pub use harmonic::{ho_drift, ho_exact, ho_kick, ho_strang, HarmonicOscillator, HoMatrix};
pub use kepler::{
    kepler_drift, kepler_energy, kepler_initial_conditions, kepler_kick, KeplerProblem,
    KeplerState,
};

use crate::flow::{FlowMap, MethodMeta, C64};

/// A system `x' = f_a(x) + f_b(x)` with exact sub-flows and a real initial
/// state.
pub trait SplitProblem: Send + Sync {
    fn name(&self) -> &str;

    /// Exact flow of `f_a`.
    fn flow_a(&self) -> FlowMap;

    /// Exact flow of `f_b`.
    fn flow_b(&self) -> FlowMap;

    fn initial_state(&self) -> Vec<f64>;

    /// Distance used for successive errors; the sup norm by default.
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Conserved energy, for Hamiltonian problems.
    fn energy(&self, _state: &[f64]) -> Option<f64> {
        None
    }
}

/// Basic symmetric methods available for every split problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseMethod {
    Strang,
    S4Sim,
}

impl BaseMethod {
    pub fn build(self, problem: &dyn SplitProblem) -> FlowMap {
        match self {
            BaseMethod::Strang => strang(&problem.flow_a(), &problem.flow_b()),
            BaseMethod::S4Sim => s4sim(&problem.flow_a(), &problem.flow_b()),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BaseMethod::Strang => "strang",
            BaseMethod::S4Sim => "s4sim",
        }
    }
}

fn chain(stages: Vec<(FlowMap, C64)>) -> impl Fn(&[C64], C64) -> crate::Result<Vec<C64>> {
    move |x, tau| {
        let mut state = x.to_vec();
        // Listed in application order.
        for (flow, c) in &stages {
            state = flow.apply(&state, c * tau)?;
        }
        Ok(state)
    }
}

/// Strang splitting `φ^a_{τ/2} ∘ φ^b_τ ∘ φ^a_{τ/2}`: symmetric, symplectic
/// for Hamiltonian splittings, order 2.
pub fn strang(flow_a: &FlowMap, flow_b: &FlowMap) -> FlowMap {
    let half = C64::new(0.5, 0.0);
    let one = C64::new(1.0, 0.0);
    let stages = vec![
        (flow_a.clone(), half),
        (flow_b.clone(), one),
        (flow_a.clone(), half),
    ];
    FlowMap::new("strang", MethodMeta::symmetric(2), chain(stages))
}

/// `a` coefficients of [`s4sim`] (all `1/4`).
pub const S4_A: [f64; 4] = [0.25; 4];

/// `b₁, b₂, b₃` of [`s4sim`].
pub fn s4_b() -> [C64; 3] {
    [
        C64::new(1.0 / 10.0, -1.0 / 30.0),
        C64::new(4.0 / 15.0, 2.0 / 15.0),
        C64::new(4.0 / 15.0, -1.0 / 5.0),
    ]
}

/// Fourth-order palindromic splitting with complex `b` coefficients,
/// `φ^b_{b₁τ}∘φ^a_{τ/4}∘φ^b_{b₂τ}∘φ^a_{τ/4}∘φ^b_{b₃τ}∘φ^a_{τ/4}∘φ^b_{b₂τ}∘φ^a_{τ/4}∘φ^b_{b₁τ}`.
pub fn s4sim(flow_a: &FlowMap, flow_b: &FlowMap) -> FlowMap {
    let [b1, b2, b3] = s4_b();
    let a = C64::new(S4_A[0], 0.0);
    let stages = vec![
        (flow_b.clone(), b1),
        (flow_a.clone(), a),
        (flow_b.clone(), b2),
        (flow_a.clone(), a),
        (flow_b.clone(), b3),
        (flow_a.clone(), a),
        (flow_b.clone(), b2),
        (flow_a.clone(), a),
        (flow_b.clone(), b1),
    ];
    let max_arg = [b1, b2, b3]
        .iter()
        .map(|b| b.arg().abs())
        .fold(0.0, f64::max);
    FlowMap::new("s4sim", MethodMeta::symmetric(4), chain(stages))
        .with_stage_argument(max_arg)
        .with_complex_coefficients()
}

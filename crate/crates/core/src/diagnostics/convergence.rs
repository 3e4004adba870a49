use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::flow::FlowMap;
use crate::problems::SplitProblem;

use super::trajectory::propagate;

/// Relative tolerance on `t_final/τ` being an integer.
pub const STEP_COUNT_TOLERANCE: f64 = 1e-9;

/// Number of steps of size `tau` reaching `t_final`.
pub fn steps_for(t_final: f64, tau: f64) -> Result<usize> {
    if !(tau.is_finite() && tau > 0.0) || !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::Validation(format!(
            "t_final and tau must be positive, got {t_final} and {tau}"
        )));
    }
    let ratio = t_final / tau;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > STEP_COUNT_TOLERANCE * ratio {
        return Err(Error::Validation(format!(
            "t_final/tau = {ratio} is not an integer"
        )));
    }
    Ok(n as usize)
}

/// `E_τ = ‖u_τ − u_{τ/2}‖` at `t_final`, in the problem's distance.
pub fn successive_error(
    problem: &dyn SplitProblem,
    method: &FlowMap,
    tau: f64,
    t_final: f64,
) -> Result<f64> {
    let n = steps_for(t_final, tau)?;
    let x0 = problem.initial_state();
    let coarse = propagate(method, &x0, tau, n)?;
    let fine = propagate(method, &x0, 0.5 * tau, 2 * n)?;
    Ok(problem.distance(&coarse, &fine))
}

/// `|H(x(t_final)) − H(x₀)|/|H(x₀)|` for a Hamiltonian problem.
pub fn final_energy_error(
    problem: &dyn SplitProblem,
    method: &FlowMap,
    tau: f64,
    t_final: f64,
) -> Result<f64> {
    let x0 = problem.initial_state();
    let h0 = problem
        .energy(&x0)
        .ok_or_else(|| Error::Domain(format!("{} has no energy", problem.name())))?;
    if h0 == 0.0 {
        return Err(Error::Domain("initial energy is zero".into()));
    }
    let x = propagate(method, &x0, tau, steps_for(t_final, tau)?)?;
    let h = problem
        .energy(&x)
        .ok_or_else(|| Error::Domain("energy undefined at the final state".into()))?;
    Ok(((h - h0) / h0).abs())
}

/// One cell of a sweep over step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub tau: f64,
    pub value: Result<f64>,
}

/// Distinct step sizes, largest first.
fn sorted_unique(taus: &[f64]) -> Vec<f64> {
    let mut t = taus.to_vec();
    t.sort_by(|a, b| b.total_cmp(a));
    t.dedup();
    t
}

/// Evaluates `f` at every distinct `τ`, sorted by decreasing `τ`. The order
/// of the result does not depend on `exec`.
pub fn sweep<F>(taus: &[f64], exec: Execution, f: F) -> Vec<SweepPoint>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    let t = sorted_unique(taus);
    let values = exec.map(&t, |&tau| f(tau));
    t.into_iter()
        .zip(values)
        .map(|(tau, value)| SweepPoint { tau, value })
        .collect()
}

/// Successive errors `E_τ` for every `τ` in `taus`. Each distinct step size
/// (including the halved ones) is integrated once.
pub fn successive_errors(
    problem: &dyn SplitProblem,
    method: &FlowMap,
    taus: &[f64],
    t_final: f64,
    exec: Execution,
) -> Vec<SweepPoint> {
    let taus = sorted_unique(taus);
    let mut all: Vec<f64> = taus.iter().flat_map(|&t| [t, 0.5 * t]).collect();
    all = sorted_unique(&all);
    let x0 = problem.initial_state();
    let finals = exec.map(&all, |&tau| {
        steps_for(t_final, tau).and_then(|n| propagate(method, &x0, tau, n))
    });
    let lookup = |tau: f64| {
        let j = all
            .iter()
            .position(|&t| t == tau)
            .expect("every step size was integrated");
        &finals[j]
    };
    taus.into_iter()
        .map(|tau| {
            let value = match (lookup(tau), lookup(0.5 * tau)) {
                (Ok(a), Ok(b)) => Ok(problem.distance(a, b)),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            SweepPoint { tau, value }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{strang, HarmonicOscillator};

    #[test]
    fn step_counts() {
        assert_eq!(steps_for(1.0, 0.05).unwrap(), 20);
        assert_eq!(steps_for(20.0, 0.08 / 32.0).unwrap(), 8000);
        assert!(steps_for(1.0, 0.3).is_err());
        assert!(steps_for(1.0, 0.0).is_err());
        assert!(steps_for(0.1, 0.2).is_err());
    }

    #[test]
    fn exact_flow_has_no_successive_error() {
        let ho = HarmonicOscillator::default();
        let e = successive_error(&ho, &HarmonicOscillator::exact_flow(), 0.1, 2.0).unwrap();
        assert!(e < 1e-13);
    }

    #[test]
    fn strang_successive_ratio() {
        let ho = HarmonicOscillator::default();
        let s = strang(&ho.flow_a(), &ho.flow_b());
        let a = successive_error(&ho, &s, 0.1, 2.0).unwrap();
        let b = successive_error(&ho, &s, 0.05, 2.0).unwrap();
        assert!(((a / b).log2() - 2.0).abs() < 0.05);
    }

    #[test]
    fn batched_matches_direct_and_is_ordered() {
        let ho = HarmonicOscillator::default();
        let s = strang(&ho.flow_a(), &ho.flow_b());
        let taus = [0.025, 0.1, 0.05, 0.1];
        for exec in [Execution::Sequential, Execution::Parallel] {
            let pts = successive_errors(&ho, &s, &taus, 2.0, exec);
            let got: Vec<f64> = pts.iter().map(|p| p.tau).collect();
            assert_eq!(got, vec![0.1, 0.05, 0.025]);
            for p in &pts {
                let direct = successive_error(&ho, &s, p.tau, 2.0).unwrap();
                assert_eq!(p.value.clone().unwrap(), direct);
            }
        }
    }

    #[test]
    fn sweep_reports_failures_per_cell() {
        let pts = sweep(&[0.1, 0.3], Execution::Parallel, |tau| {
            steps_for(1.0, tau).map(|n| n as f64)
        });
        assert_eq!(pts[0].tau, 0.3);
        assert!(pts[0].value.is_err());
        assert_eq!(pts[1].value, Ok(10.0));
    }

    #[test]
    fn energy_error_of_exact_flow() {
        let ho = HarmonicOscillator::default();
        let e = final_energy_error(&ho, &HarmonicOscillator::exact_flow(), 0.1, 10.0).unwrap();
        assert!(e < 1e-13);
    }
}

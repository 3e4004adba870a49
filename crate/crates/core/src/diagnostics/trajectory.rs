use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::flow::FlowMap;

/// Observable recorded along a trajectory.
pub type Observable<'a> = (&'a str, &'a (dyn Fn(&[f64]) -> f64 + Sync));

/// States of a fixed-step integration, including the initial state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub observables: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

/// One step of `method` on a real state; the real part of the output is kept.
fn step(method: &FlowMap, x: &[f64], tau: f64, index: usize) -> Result<Vec<f64>> {
    method
        .apply_real(x, tau)
        .map(|y| y.into_iter().map(|z| z.re).collect())
        .map_err(|e| Error::Step {
            step: index,
            source: Box::new(e),
        })
}

/// Applies `method` `n_steps` times with step `tau` and returns the final
/// state. Errors carry the (1-based) index of the failing step.
pub fn propagate(method: &FlowMap, x0: &[f64], tau: f64, n_steps: usize) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    for n in 1..=n_steps {
        x = step(method, &x, tau, n)?;
    }
    Ok(x)
}

/// Like [`propagate`] but records every state, and optionally an observable.
pub fn integrate(
    method: &FlowMap,
    x0: &[f64],
    tau: f64,
    n_steps: usize,
    observable: Option<Observable<'_>>,
) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::Validation("n_steps must be positive".into()));
    }
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(x0.to_vec());
    for n in 1..=n_steps {
        let next = step(method, &states[n - 1], tau, n)?;
        times.push(n as f64 * tau);
        states.push(next);
    }
    let mut observables = BTreeMap::new();
    if let Some((name, f)) = observable {
        observables.insert(name.to_string(), states.iter().map(|x| f(x)).collect());
    }
    Ok(Trajectory {
        times,
        states,
        observables,
    })
}

fn reference_energy(trajectory: &Trajectory, energy: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let x0 = trajectory
        .states
        .first()
        .ok_or_else(|| Error::Validation("empty trajectory".into()))?;
    let h0 = energy(x0);
    if !h0.is_finite() || h0 == 0.0 {
        return Err(Error::Domain(format!(
            "relative energy error needs a finite nonzero initial energy, got {h0}"
        )));
    }
    Ok(h0)
}

/// `(H(x_k) − H(x₀))/H(x₀)` per recorded state.
pub fn signed_energy_error_series(
    trajectory: &Trajectory,
    energy: &dyn Fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    let h0 = reference_energy(trajectory, energy)?;
    Ok(trajectory.states.iter().map(|x| (energy(x) - h0) / h0).collect())
}

/// `|H(x_k) − H(x₀)|/|H(x₀)|` per recorded state.
pub fn energy_error_series(
    trajectory: &Trajectory,
    energy: &dyn Fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    Ok(signed_energy_error_series(trajectory, energy)?
        .into_iter()
        .map(f64::abs)
        .collect())
}

/// Secular drift per unit time of a signal recorded along an oscillating
/// trajectory.
///
/// The bounded oscillation is removed by averaging the signal over `cycles`
/// full periods of the first state component, once at the start and once at
/// the end of the run; the drift is the change in these means divided by
/// the time between their centres.
pub fn secular_drift_rate(trajectory: &Trajectory, signal: &[f64], cycles: usize) -> Result<f64> {
    if signal.len() != trajectory.len() {
        return Err(Error::Validation(format!(
            "signal has {} samples, trajectory {}",
            signal.len(),
            trajectory.len()
        )));
    }
    let crossings: Vec<usize> = (1..trajectory.len())
        .filter(|&k| trajectory.states[k - 1][0] < 0.0 && trajectory.states[k][0] >= 0.0)
        .collect();
    if cycles == 0 || crossings.len() < 2 * cycles + 1 {
        return Err(Error::Validation(format!(
            "need {} upward crossings of the first component for {cycles} cycles, found {}",
            2 * cycles + 1,
            crossings.len()
        )));
    }
    let window = |a: usize, b: usize| {
        let n = (b - a) as f64;
        let t = trajectory.times[a..b].iter().sum::<f64>() / n;
        let s = signal[a..b].iter().sum::<f64>() / n;
        (t, s)
    };
    let (t0, s0) = window(crossings[0], crossings[cycles]);
    let last = crossings.len() - 1;
    let (t1, s1) = window(crossings[last - cycles], crossings[last]);
    Ok((s1 - s0) / (t1 - t0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{MethodMeta, C64};
    use crate::problems::HarmonicOscillator;
    use std::f64::consts::PI;

    #[test]
    fn identity_is_constant() {
        let tr = integrate(&FlowMap::identity(), &[1.0, -2.0], 0.1, 5, None).unwrap();
        assert_eq!(tr.len(), 6);
        assert!(tr.states.iter().all(|x| x == &[1.0, -2.0]));
        assert!((tr.times[5] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_rotation_is_periodic() {
        let exact = HarmonicOscillator::exact_flow();
        let energy = |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1]);
        let tr = integrate(&exact, &[2.5, 0.0], 2.0 * PI / 100.0, 100, Some(("energy", &energy)))
            .unwrap();
        let end = tr.final_state().unwrap();
        assert!((end[0] - 2.5).abs() < 1e-12 && end[1].abs() < 1e-12);
        assert_eq!(tr.observables["energy"].len(), 101);
        let errs = energy_error_series(&tr, &energy).unwrap();
        assert!(errs.iter().all(|e| *e < 1e-13));
    }

    #[test]
    fn zero_energy_is_rejected() {
        let tr = integrate(&FlowMap::identity(), &[0.0, 0.0], 0.1, 2, None).unwrap();
        let energy = |x: &[f64]| x[0] * x[0];
        assert!(energy_error_series(&tr, &energy).is_err());
    }

    #[test]
    fn step_errors_carry_index() {
        let fails_late = FlowMap::new("bad", MethodMeta::plain(1), |x, _| {
            if x[0].re > 2.5 {
                Err(Error::singularity("test", 0, x[0]))
            } else {
                Ok(vec![x[0] + C64::new(1.0, 0.0)])
            }
        });
        match propagate(&fails_late, &[0.0], 0.1, 10).unwrap_err() {
            Error::Step { step, source } => {
                assert_eq!(step, 4);
                assert!(source.is_singularity());
            }
            other => panic!("unexpected {other}"),
        }
        assert!(integrate(&fails_late, &[0.0], 0.1, 0, None).is_err());
    }

    #[test]
    fn drift_rate_of_a_damped_rotation() {
        // Rotation with a slow exponential decay of the radius.
        let rate = 1e-4;
        let m = FlowMap::new("damped", MethodMeta::plain(1), move |x, tau| {
            let (s, c) = (tau.sin(), tau.cos());
            let d = (-rate * tau).exp();
            Ok(vec![d * (c * x[0] + s * x[1]), d * (c * x[1] - s * x[0])])
        });
        let tr = integrate(&m, &[0.0, -1.0], 0.01, 50_000, None).unwrap();
        let signal: Vec<f64> = tr
            .states
            .iter()
            .map(|x| 0.5 * (x[0] * x[0] + x[1] * x[1]) + 1e-3 * x[0] * x[1])
            .collect();
        let measured = secular_drift_rate(&tr, &signal, 5).unwrap();
        // d/dt of e^{−2rt}/2 around the middle of the run.
        let expected = -rate * (-2.0f64 * rate * 250.0).exp();
        assert!((measured / expected - 1.0).abs() < 0.02, "{measured} vs {expected}");
        assert!(secular_drift_rate(&tr, &signal[1..], 5).is_err());
    }
}

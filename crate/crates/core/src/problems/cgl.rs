use super::complex_log::principal_log;
use super::SplitProblem;
use crate::error::{Error, Result};
use crate::flow::{FlowMap, MethodMeta, C64};
use crate::spectral::{diffuse_in_place, SpectralField, SpectralGrid};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Coefficients of `u_t = αΔu + εu − β|u|²u` with `α = 1 + i·c₁` and
/// `β = 1 − i·c₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CglParams {
    pub c1: f64,
    pub c3: f64,
    pub eps: f64,
}

impl Default for CglParams {
    fn default() -> Self {
        CglParams {
            c1: 1.0,
            c3: -2.0,
            eps: 1.0,
        }
    }
}

impl CglParams {
    pub fn alpha(&self) -> C64 {
        C64::new(1.0, self.c1)
    }

    pub fn beta(&self) -> C64 {
        C64::new(1.0, -self.c3)
    }
}

/// `u = v + i·w` with `v`, `w` continued to complex values.
#[derive(Debug, Clone, PartialEq)]
pub struct CglState {
    pub v: SpectralField,
    pub w: SpectralField,
}

impl CglState {
    pub fn new(v: SpectralField, w: SpectralField) -> Result<Self> {
        if v.grid() != w.grid() {
            return Err(Error::Validation("v and w live on different grids".into()));
        }
        Ok(CglState { v, w })
    }

    /// Splits real samples of `u` into `v = Re u`, `w = Im u`.
    pub fn from_u(u: &SpectralField) -> Self {
        let grid = u.grid();
        let re = u.values().iter().map(|z| C64::new(z.re, 0.0)).collect();
        let im = u.values().iter().map(|z| C64::new(z.im, 0.0)).collect();
        CglState {
            v: SpectralField::new(grid, re).expect("same grid"),
            w: SpectralField::new(grid, im).expect("same grid"),
        }
    }

    /// `v + i·w`.
    pub fn u(&self) -> SpectralField {
        let values = self
            .v
            .values()
            .iter()
            .zip(self.w.values())
            .map(|(v, w)| v + I * w)
            .collect();
        SpectralField::new(self.v.grid(), values).expect("same grid")
    }

    /// `[v; w]` as one vector of length `2N`.
    pub fn to_flat(&self) -> Vec<C64> {
        let mut out = self.v.values().to_vec();
        out.extend_from_slice(self.w.values());
        out
    }

    pub fn from_flat(grid: &SpectralGrid, x: &[C64]) -> Result<Self> {
        let n = grid.len();
        if x.len() != 2 * n {
            return Err(Error::Validation(format!(
                "expected {} values for [v; w], got {}",
                2 * n,
                x.len()
            )));
        }
        Ok(CglState {
            v: SpectralField::new(grid, x[..n].to_vec())?,
            w: SpectralField::new(grid, x[n..].to_vec())?,
        })
    }
}

/// `L = log(1 + 2τM₀)` at one grid point, with the point index on failure.
fn log_factor(m0: C64, tau: C64, j: usize) -> Result<C64> {
    let arg = 1.0 + 2.0 * tau * m0;
    principal_log(arg).map_err(|_| {
        Error::singularity("cgl_nonlinear_flow (1 + 2τM₀ on the branch cut)", j, arg)
    })
}

fn nonlinear_in_place(v: &mut [C64], w: &mut [C64], beta: C64, tau: C64) -> Result<()> {
    let half_beta = 0.5 * beta;
    let half_beta_bar = 0.5 * beta.conj();
    for (j, (vj, wj)) in v.iter_mut().zip(w.iter_mut()).enumerate() {
        let l = log_factor(*vj * *vj + *wj * *wj, tau, j)?;
        let vt = 0.5 * (-I * *vj + *wj) * (-half_beta * l).exp();
        let wt = 0.5 * (*vj - I * *wj) * (-half_beta_bar * l).exp();
        *vj = I * vt + wt;
        *wj = vt + I * wt;
    }
    Ok(())
}

fn linear_in_place(
    grid: &SpectralGrid,
    v: &mut [C64],
    w: &mut [C64],
    params: &CglParams,
    tau: C64,
) -> Result<()> {
    let mut vt: Vec<C64> = v.iter().zip(w.iter()).map(|(a, b)| 0.5 * (-I * a + b)).collect();
    let mut wt: Vec<C64> = v.iter().zip(w.iter()).map(|(a, b)| 0.5 * (a - I * b)).collect();
    let alpha = params.alpha();
    diffuse_in_place(grid, &mut vt, alpha, params.eps, tau)?;
    diffuse_in_place(grid, &mut wt, alpha.conj(), params.eps, tau)?;
    for (j, (a, b)) in vt.iter().zip(&wt).enumerate() {
        v[j] = I * a + b;
        w[j] = a + I * b;
    }
    Ok(())
}

/// Exact flow of `u_t = −β|u|²u` in `(v, w)` form, propagated in the
/// diagonal variables `ṽ = (−iv + w)/2`, `w̃ = (v − iw)/2` which pick up
/// the factors `e^{−βL/2}` and `e^{−β̄L/2}`, `L = log(1 + 2τ(v₀² + w₀²))`.
pub fn cgl_nonlinear_flow(state: &CglState, params: &CglParams, tau: C64) -> Result<CglState> {
    let mut v = state.v.values().to_vec();
    let mut w = state.w.values().to_vec();
    nonlinear_in_place(&mut v, &mut w, params.beta(), tau)?;
    CglState::new(
        SpectralField::new(state.v.grid(), v)?,
        SpectralField::new(state.w.grid(), w)?,
    )
}

/// The same flow written directly in `(v, w)`:
/// `v = v₀(E + Ē)/2 − w₀(E − Ē)/(2i)`, `w = w₀(E + Ē)/2 + v₀(E − Ē)/(2i)`
/// with `E = e^{−βL/2}`, `Ē = e^{−β̄L/2}`.
pub fn cgl_nonlinear_flow_vw(state: &CglState, params: &CglParams, tau: C64) -> Result<CglState> {
    let beta = params.beta();
    let n = state.v.grid().len();
    let mut v = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for (j, (v0, w0)) in state.v.values().iter().zip(state.w.values()).enumerate() {
        let l = log_factor(v0 * v0 + w0 * w0, tau, j)?;
        let e = (-0.5 * beta * l).exp();
        let eb = (-0.5 * beta.conj() * l).exp();
        let even = 0.5 * (e + eb);
        let odd = (e - eb) / (2.0 * I);
        v.push(v0 * even - w0 * odd);
        w.push(w0 * even + v0 * odd);
    }
    CglState::new(
        SpectralField::new(state.v.grid(), v)?,
        SpectralField::new(state.w.grid(), w)?,
    )
}

/// Exact flow of `u_t = αΔu + εu` in `(v, w)` form: `ṽ` evolves under
/// `e^{ετ}e^{τα∂ₓ²}` and `w̃` under `e^{ετ}e^{τᾱ∂ₓ²}`.
pub fn cgl_linear_flow(state: &CglState, params: &CglParams, tau: C64) -> Result<CglState> {
    let grid = state.v.grid();
    let mut v = state.v.values().to_vec();
    let mut w = state.w.values().to_vec();
    linear_in_place(grid, &mut v, &mut w, params, tau)?;
    CglState::new(SpectralField::new(grid, v)?, SpectralField::new(grid, w)?)
}

/// The periodic CGL problem split into its linear (`f_a`) and cubic (`f_b`)
/// parts. The state vector is `[v; w]`.
#[derive(Debug, Clone)]
pub struct CglProblem {
    grid: SpectralGrid,
    params: CglParams,
}

impl CglProblem {
    /// Domain `[−100, 100)` with `n` points.
    pub fn new(n: usize, params: CglParams) -> Result<Self> {
        Ok(CglProblem {
            grid: SpectralGrid::new(-100.0, 200.0, n)?,
            params,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn params(&self) -> &CglParams {
        &self.params
    }

    /// `u₀(x) = 0.8/cosh²(x − 10) + 0.8/cosh²(x + 10)`.
    pub fn initial_u(&self) -> SpectralField {
        self.grid.sample(|x| {
            let a = (x - 10.0).cosh();
            let b = (x + 10.0).cosh();
            C64::new(0.8 / (a * a) + 0.8 / (b * b), 0.0)
        })
    }
}

impl SplitProblem for CglProblem {
    fn name(&self) -> &str {
        "cgl"
    }

    fn flow_a(&self) -> FlowMap {
        let grid = self.grid.clone();
        let params = self.params;
        let n = grid.len();
        FlowMap::new("cgl_linear", MethodMeta::exact(), move |x, tau| {
            let (mut v, mut w) = (x[..n].to_vec(), x[n..].to_vec());
            linear_in_place(&grid, &mut v, &mut w, &params, tau)?;
            v.extend(w);
            Ok(v)
        })
    }

    fn flow_b(&self) -> FlowMap {
        let beta = self.params.beta();
        let n = self.grid.len();
        FlowMap::new("cgl_cubic", MethodMeta::exact(), move |x, tau| {
            let (mut v, mut w) = (x[..n].to_vec(), x[n..].to_vec());
            nonlinear_in_place(&mut v, &mut w, beta, tau)?;
            v.extend(w);
            Ok(v)
        })
    }

    fn initial_state(&self) -> Vec<f64> {
        CglState::from_u(&self.initial_u())
            .to_flat()
            .into_iter()
            .map(|z| z.re)
            .collect()
    }

    /// `max_j |Δv_j + i·Δw_j|`, the sup norm of the difference in `u`.
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.grid.len();
        (0..n)
            .map(|j| (a[j] - b[j]).hypot(a[n + j] - b[n + j]))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{diffusion_propagator, sup_norm_distance};
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn constant_state(grid: &SpectralGrid, v: f64, w: f64) -> CglState {
        CglState::new(grid.sample(|_| c(v)), grid.sample(|_| c(w))).unwrap()
    }

    fn state_distance(a: &CglState, b: &CglState) -> f64 {
        sup_norm_distance(&a.v, &b.v)
            .unwrap()
            .max(sup_norm_distance(&a.w, &b.w).unwrap())
    }

    fn wavy_state(grid: &SpectralGrid) -> CglState {
        CglState::new(
            grid.sample(|x| c(0.6 * (0.3 * x).cos() + 0.2)),
            grid.sample(|x| c(0.5 * (0.2 * x).sin())),
        )
        .unwrap()
    }

    /// RK4 on `v' = −M(v + c₃w)`, `w' = −M(w − c₃v)`.
    fn rk4_cubic(v0: f64, w0: f64, c3: f64, t: f64, steps: usize) -> (f64, f64) {
        let f = |v: f64, w: f64| {
            let m = v * v + w * w;
            (-m * (v + c3 * w), -m * (w - c3 * v))
        };
        let h = t / steps as f64;
        let (mut v, mut w) = (v0, w0);
        for _ in 0..steps {
            let k1 = f(v, w);
            let k2 = f(v + 0.5 * h * k1.0, w + 0.5 * h * k1.1);
            let k3 = f(v + 0.5 * h * k2.0, w + 0.5 * h * k2.1);
            let k4 = f(v + h * k3.0, w + h * k3.1);
            v += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            w += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        (v, w)
    }

    #[test]
    fn params_derive_alpha_beta() {
        let p = CglParams::default();
        assert_eq!(p.alpha(), C64::new(1.0, 1.0));
        assert_eq!(p.beta(), C64::new(1.0, 2.0));
    }

    #[test]
    fn zero_state_is_fixed() {
        let g = SpectralGrid::new(0.0, 1.0, 8).unwrap();
        let s = constant_state(&g, 0.0, 0.0);
        let out = cgl_nonlinear_flow(&s, &CglParams::default(), C64::new(0.1, 0.05)).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn unit_amplitude_matches_fine_integration() {
        let g = SpectralGrid::new(0.0, 1.0, 4).unwrap();
        let s = constant_state(&g, 1.0, 0.0);
        let p = CglParams::default();
        let out = cgl_nonlinear_flow(&s, &p, c(0.1)).unwrap();
        let (v, w) = (out.v.values()[0], out.w.values()[0]);
        let m = (v * v + w * w).re;
        assert!((m - 1.0 / 1.2).abs() < 1e-14);
        let (rv, rw) = rk4_cubic(1.0, 0.0, p.c3, 0.1, 10_000);
        assert!((v - rv).norm() < 1e-9 && (w - rw).norm() < 1e-9);
    }

    #[test]
    fn endpoint_of_cut_is_singular() {
        let g = SpectralGrid::new(0.0, 1.0, 4).unwrap();
        let s = constant_state(&g, 1.0, 0.0);
        let err = cgl_nonlinear_flow(&s, &CglParams::default(), c(-0.5)).unwrap_err();
        assert!(err.is_singularity());
        assert!(cgl_nonlinear_flow_vw(&s, &CglParams::default(), c(-0.5)).is_err());
    }

    #[test]
    fn modulus_law_for_real_steps() {
        let g = SpectralGrid::new(-100.0, 200.0, 64).unwrap();
        let s = wavy_state(&g);
        for tau in [0.05, 0.3, 1.7] {
            let out = cgl_nonlinear_flow(&s, &CglParams::default(), c(tau)).unwrap();
            for j in 0..g.len() {
                let (v0, w0) = (s.v.values()[j], s.w.values()[j]);
                let m0 = (v0 * v0 + w0 * w0).re;
                let (v, w) = (out.v.values()[j], out.w.values()[j]);
                let m = (v * v + w * w).re;
                assert!((m - m0 / (1.0 + 2.0 * m0 * tau)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_and_direct_forms_agree() {
        let g = SpectralGrid::new(-100.0, 200.0, 32).unwrap();
        let s = wavy_state(&g);
        let p = CglParams::default();
        for tau in [c(0.2), C64::new(0.1, 0.06), C64::new(0.3, -0.2)] {
            let a = cgl_nonlinear_flow(&s, &p, tau).unwrap();
            let b = cgl_nonlinear_flow_vw(&s, &p, tau).unwrap();
            assert!(state_distance(&a, &b) < 1e-14);
        }
    }

    #[test]
    fn nonlinear_semigroup_and_real_map() {
        let g = SpectralGrid::new(-100.0, 200.0, 16).unwrap();
        let s = wavy_state(&g);
        let p = CglParams::default();
        let (t1, t2) = (C64::new(0.2, 0.1), C64::new(0.15, -0.05));
        let two = cgl_nonlinear_flow(&cgl_nonlinear_flow(&s, &p, t2).unwrap(), &p, t1).unwrap();
        let one = cgl_nonlinear_flow(&s, &p, t1 + t2).unwrap();
        assert!(state_distance(&one, &two) < 1e-13);

        // flow(conj x, conj τ) = conj flow(x, τ)
        let out = cgl_nonlinear_flow(&s, &p, t1).unwrap();
        let mirrored = cgl_nonlinear_flow(&s, &p, t1.conj()).unwrap();
        for (a, b) in out.v.values().iter().zip(mirrored.v.values()) {
            assert!((a.conj() - b).norm() < 1e-15);
        }
    }

    #[test]
    fn linear_identity_and_zero_mode() {
        let g = SpectralGrid::new(0.0, 1.0, 16).unwrap();
        let s = wavy_state(&g);
        let p = CglParams::default();
        let same = cgl_linear_flow(&s, &p, c(0.0)).unwrap();
        assert!(state_distance(&same, &s) < 1e-15);

        let flat = constant_state(&g, 0.7, -0.2);
        let out = cgl_linear_flow(&flat, &p, c(0.1)).unwrap();
        let growth = 0.1f64.exp();
        for (a, b) in out.u().values().iter().zip(flat.u().values()) {
            assert!((a - growth * b).norm() < 1e-14);
        }
    }

    #[test]
    fn linear_single_mode() {
        let l = 8.0;
        let g = SpectralGrid::new(0.0, l, 32).unwrap();
        let u0 = g.sample(|x| C64::from_polar(1.0, 2.0 * PI * x / l));
        let p = CglParams {
            c1: 0.0,
            c3: 0.0,
            eps: 0.0,
        };
        let tau = 0.3;
        let out = cgl_linear_flow(&CglState::from_u(&u0), &p, c(tau)).unwrap().u();
        let factor = (-tau * (2.0 * PI / l).powi(2)).exp();
        for (a, b) in out.values().iter().zip(u0.values()) {
            assert!((a - factor * b).norm() < 1e-14);
        }
    }

    #[test]
    fn linear_matches_propagator_on_u() {
        let g = SpectralGrid::new(-100.0, 200.0, 64).unwrap();
        let s = wavy_state(&g);
        let p = CglParams::default();
        let out = cgl_linear_flow(&s, &p, c(0.4)).unwrap().u();
        let direct = diffusion_propagator(&s.u(), p.alpha(), p.eps, c(0.4));
        assert!(sup_norm_distance(&out, &direct).unwrap() < 1e-13);
    }

    #[test]
    fn linear_semigroup() {
        let g = SpectralGrid::new(-100.0, 200.0, 64).unwrap();
        let s = wavy_state(&g);
        let p = CglParams::default();
        let (t1, t2) = (C64::new(0.3, 0.1), C64::new(0.2, -0.15));
        let two = cgl_linear_flow(&cgl_linear_flow(&s, &p, t2).unwrap(), &p, t1).unwrap();
        let one = cgl_linear_flow(&s, &p, t1 + t2).unwrap();
        assert!(state_distance(&one, &two) < 1e-12);
    }

    #[test]
    fn problem_state_layout() {
        let prob = CglProblem::new(512, CglParams::default()).unwrap();
        let x0 = prob.initial_state();
        assert_eq!(x0.len(), 1024);
        assert!(x0[512..].iter().all(|&w| w == 0.0));
        // x = 10 sits at node (10 + 100)·512/200 = 281.6; peak is near 0.8
        let peak = x0[..512].iter().cloned().fold(0.0, f64::max);
        assert!((peak - 0.8).abs() < 0.05);
        let shifted: Vec<f64> = x0.iter().map(|v| v + 0.0).collect();
        assert_eq!(prob.distance(&x0, &shifted), 0.0);
        let mut other = x0.clone();
        other[3] += 3e-3;
        other[512 + 3] += 4e-3;
        assert!((prob.distance(&x0, &other) - 5e-3).abs() < 1e-15);
    }
}

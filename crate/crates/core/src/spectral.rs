//! Uniform periodic 1D grids, the discrete Fourier transform pair, and
//! propagators that are diagonal in Fourier space.
//!
//! Normalisation: the forward transform is unnormalised and the inverse is
//! scaled by `1/N`. Mode `m` (in standard FFT order, `m = 0, 1, …, N/2−1,
//! −N/2, …, −1`) has angular wavenumber `k_m = 2πm/L`; the Nyquist mode is
//! taken as `−N/2` with no symmetrisation.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::flow::C64;

/// Periodic grid `x_j = start + jL/N`, `j = 0..N−1`, with cached FFT plans.
#[derive(Clone)]
pub struct SpectralGrid {
    start: f64,
    length: f64,
    n: usize,
    wavenumbers: Arc<[f64]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralGrid {
    pub fn new(start: f64, length: f64, n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Validation(format!(
                "grid size must be a power of two >= 2, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) || !start.is_finite() {
            return Err(Error::Validation(format!(
                "invalid domain: start {start}, length {length}"
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * m / length
            })
            .collect();
        Ok(SpectralGrid {
            start,
            length,
            n,
            wavenumbers,
            forward,
            inverse,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.start + j as f64 * self.length / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Angular wavenumbers `k_m` in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Samples `f` at the grid nodes.
    pub fn sample(&self, f: impl Fn(f64) -> C64) -> SpectralField {
        SpectralField {
            grid: self.clone(),
            values: self.nodes().into_iter().map(f).collect(),
        }
    }

    fn same_as(&self, other: &SpectralGrid) -> bool {
        self.n == other.n && self.start == other.start && self.length == other.length
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Validation(format!(
                "expected {} samples for this grid, got {len}",
                self.n
            )));
        }
        Ok(())
    }

    /// Forward transform of raw samples, in place.
    pub fn forward_in_place(&self, values: &mut [C64]) -> Result<()> {
        self.check_len(values.len())?;
        self.forward.process(values);
        Ok(())
    }

    /// Inverse transform of raw coefficients (scaled by `1/N`), in place.
    pub fn inverse_in_place(&self, values: &mut [C64]) -> Result<()> {
        self.check_len(values.len())?;
        self.inverse.process(values);
        let scale = 1.0 / self.n as f64;
        values.iter_mut().for_each(|v| *v *= scale);
        Ok(())
    }

    /// Multiplies every Fourier mode of `values` by `symbol(k_m)`.
    pub fn apply_symbol(&self, values: &mut [C64], symbol: impl Fn(f64) -> C64) -> Result<()> {
        self.forward_in_place(values)?;
        for (v, &k) in values.iter_mut().zip(self.wavenumbers.iter()) {
            *v *= symbol(k);
        }
        self.inverse_in_place(values)
    }
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("start", &self.start)
            .field("length", &self.length)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// Physical-space samples of a complex function on a [`SpectralGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: SpectralGrid,
    values: Vec<C64>,
}

impl SpectralField {
    pub fn new(grid: &SpectralGrid, values: Vec<C64>) -> Result<Self> {
        grid.check_len(values.len())?;
        Ok(SpectralField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_real(grid: &SpectralGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Writes one `x value_re value_im` row per node.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (j, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", self.grid.node(j), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Unnormalised forward DFT of a field.
pub fn dft(field: &SpectralField) -> Vec<C64> {
    let mut out = field.values.clone();
    field
        .grid
        .forward
        .process(&mut out);
    out
}

/// Inverse DFT (scaled by `1/N`) back onto `grid`.
pub fn idft(coefficients: &[C64], grid: &SpectralGrid) -> Result<SpectralField> {
    let mut values = coefficients.to_vec();
    grid.inverse_in_place(&mut values)?;
    SpectralField::new(grid, values)
}

/// Multiplies Fourier mode `m` by `e^{ετ}·e^{−τ α k_m²}`, the exact flow of
/// `u_t = αΔu + εu`.
pub fn diffusion_propagator(field: &SpectralField, alpha: C64, eps: f64, tau: C64) -> SpectralField {
    let mut values = field.values.clone();
    diffuse_in_place(&field.grid, &mut values, alpha, eps, tau)
        .expect("field length matches its own grid");
    SpectralField {
        grid: field.grid.clone(),
        values,
    }
}

pub(crate) fn diffuse_in_place(
    grid: &SpectralGrid,
    values: &mut [C64],
    alpha: C64,
    eps: f64,
    tau: C64,
) -> Result<()> {
    let growth = (eps * tau).exp();
    grid.apply_symbol(values, |k| growth * (-tau * alpha * (k * k)).exp())
}

/// `max_j |a_j − b_j|`.
pub fn sup_norm_distance(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::Validation(format!(
            "fields live on different grids: {:?} vs {:?}",
            a.grid, b.grid
        )));
    }
    Ok(a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[C64]) -> Vec<C64> {
        let n = x.len();
        (0..n)
            .map(|m| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| v * C64::from_polar(1.0, -2.0 * PI * (m * j) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    fn pseudo_random_field(grid: &SpectralGrid, seed: u64) -> SpectralField {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let values = (0..grid.len()).map(|_| C64::new(next(), next())).collect();
        SpectralField::new(grid, values).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(SpectralGrid::new(0.0, 1.0, 100).is_err());
        assert!(SpectralGrid::new(0.0, 1.0, 1).is_err());
        assert!(SpectralGrid::new(0.0, -1.0, 8).is_err());
        let g = SpectralGrid::new(-100.0, 200.0, 512).unwrap();
        assert_eq!(g.node(0), -100.0);
        assert!((g.spacing() - 200.0 / 512.0).abs() < 1e-15);
        assert!((g.wavenumbers()[256] + PI * 512.0 / 200.0).abs() < 1e-12);
        assert!(g.wavenumbers().iter().all(|k| -k * k <= 0.0));
    }

    #[test]
    fn matches_naive_dft() {
        let g = SpectralGrid::new(0.0, 1.0, 64).unwrap();
        let f = pseudo_random_field(&g, 3);
        let fast = dft(&f);
        let slow = naive_dft(f.values());
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let g = SpectralGrid::new(0.0, 1.0, 16).unwrap();
        let c = dft(&g.sample(|_| C64::new(2.0, 0.0)));
        assert!((c[0] - C64::new(32.0, 0.0)).norm() < 1e-13);
        assert!(c[1..].iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn sine_has_two_modes() {
        let g = SpectralGrid::new(0.0, 1.0, 64).unwrap();
        let c = dft(&g.sample(|x| C64::new((2.0 * PI * x).sin(), 0.0)));
        for (m, v) in c.iter().enumerate() {
            if m == 1 || m == 63 {
                assert!((v.norm() - 32.0).abs() < 1e-12);
            } else {
                assert!(v.norm() < 1e-12, "mode {m}: {v}");
            }
        }
    }

    #[test]
    fn round_trip_512() {
        let g = SpectralGrid::new(0.0, 1.0, 512).unwrap();
        let f = pseudo_random_field(&g, 11);
        let back = idft(&dft(&f), &g).unwrap();
        let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(sup_norm_distance(&f, &back).unwrap() / scale < 1e-13);
    }

    #[test]
    fn parseval() {
        for n in [64, 512] {
            let g = SpectralGrid::new(0.0, 1.0, n).unwrap();
            let f = pseudo_random_field(&g, n as u64);
            let phys: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
            let modes: f64 = dft(&f).iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            assert!((phys - modes).abs() / phys < 1e-12);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = SpectralGrid::new(0.0, 1.0, 8).unwrap();
        assert!(SpectralField::new(&g, vec![C64::new(0.0, 0.0); 4]).is_err());
        assert!(idft(&[C64::new(0.0, 0.0); 4], &g).is_err());
        let h = SpectralGrid::new(0.0, 2.0, 8).unwrap();
        let a = g.sample(|_| C64::new(1.0, 0.0));
        let b = h.sample(|_| C64::new(1.0, 0.0));
        assert!(sup_norm_distance(&a, &b).is_err());
    }

    #[test]
    fn heat_eigenmode_decay() {
        let g = SpectralGrid::new(0.0, 1.0, 32).unwrap();
        let f = g.sample(|x| C64::new((2.0 * PI * x).sin(), 0.0));
        let tau = 0.01;
        let out = diffusion_propagator(&f, C64::new(1.0, 0.0), 0.0, C64::new(tau, 0.0));
        let factor = (-4.0 * PI * PI * tau).exp();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b * factor).norm() < 1e-14);
        }
        let same = diffusion_propagator(&f, C64::new(1.0, 0.0), 0.0, C64::new(0.0, 0.0));
        assert!(sup_norm_distance(&same, &f).unwrap() < 1e-15);
    }

    #[test]
    fn complex_diffusion_contracts_single_mode() {
        let g = SpectralGrid::new(0.0, 1.0, 32).unwrap();
        let f = g.sample(|x| C64::from_polar(1.0, 2.0 * PI * 3.0 * x));
        let out = diffusion_propagator(&f, C64::new(1.0, 0.0), 0.0, C64::new(0.02, 0.01));
        let max_in = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let max_out = out.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max_out <= max_in);
    }

    #[test]
    fn snapshot_rows() {
        let g = SpectralGrid::new(0.0, 1.0, 4).unwrap();
        let f = g.sample(|x| C64::new(x, -x));
        let mut buf = Vec::new();
        f.write_snapshot(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[1],
            "2.5000000000000000e-1 2.5000000000000000e-1 -2.5000000000000000e-1"
        );
    }
}

use crate::error::{Error, Result};
use crate::flow::{FlowMap, C64};
use crate::problems::{ho_exact, HoMatrix};

use super::fit::{leading_term, windowed_power_law_fit, LeadingTerm, PowerLawFit};

/// Relative finite-difference step for Jacobians.
pub const JACOBIAN_STEP: f64 = 1e-5;

fn real_step(method: &FlowMap, x: &[f64], tau: f64) -> Result<Vec<f64>> {
    Ok(method.apply_real(x, tau)?.into_iter().map(|z| z.re).collect())
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `‖ψ_τ(ψ_{−τ}(x₀)) − x₀‖∞` for each `τ`.
pub fn symmetry_defect(method: &FlowMap, x0: &[f64], taus: &[f64]) -> Result<Vec<f64>> {
    taus.iter()
        .map(|&tau| {
            let back = real_step(method, x0, -tau)?;
            let there = real_step(method, &back, tau)?;
            Ok(sup_distance(&there, x0))
        })
        .collect()
}

/// Central finite-difference Jacobian of `x ↦ ψ_τ(x)` at `x`, row-major.
pub fn jacobian(method: &FlowMap, x: &[f64], tau: f64) -> Result<Vec<Vec<f64>>> {
    let d = x.len();
    let mut jac = vec![vec![0.0; d]; d];
    for j in 0..d {
        let h = JACOBIAN_STEP * x[j].abs().max(1.0);
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[j] += h;
        minus[j] -= h;
        let fp = real_step(method, &plus, tau)?;
        let fm = real_step(method, &minus, tau)?;
        for i in 0..d {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// `max |(JᵀSJ − S)_{ij}|` with `S = [[0, I], [−I, 0]]` for states laid out as
/// `(q, p)`.
pub fn symplectic_form_defect(jac: &[Vec<f64>]) -> Result<f64> {
    let d = jac.len();
    if d == 0 || d % 2 == 1 || jac.iter().any(|row| row.len() != d) {
        return Err(Error::Domain(format!(
            "symplectic defect needs a square Jacobian of even size, got {d}"
        )));
    }
    let half = d / 2;
    let s = |i: usize, j: usize| -> f64 {
        if j == i + half {
            1.0
        } else if i == j + half {
            -1.0
        } else {
            0.0
        }
    };
    // (JᵀSJ)_{ij} = Σ_{a,b} J_{ai} S_{ab} J_{bj}
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut v = 0.0;
            for a in 0..half {
                v += jac[a][i] * jac[a + half][j] - jac[a + half][i] * jac[a][j];
            }
            worst = worst.max((v - s(i, j)).abs());
        }
    }
    Ok(worst)
}

/// `‖ψ_τ′ᵀ S ψ_τ′ − S‖∞` at `x₀` for each `τ`, with a finite-difference
/// Jacobian.
pub fn symplecticity_defect(method: &FlowMap, x0: &[f64], taus: &[f64]) -> Result<Vec<f64>> {
    taus.iter()
        .map(|&tau| symplectic_form_defect(&jacobian(method, x0, tau)?))
        .collect()
}

/// Defects of a method over a set of step sizes, with power-law fits where
/// the defect clears the roundoff floor for at least three step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub step_sizes: Vec<f64>,
    pub symmetry_defect: Vec<f64>,
    pub symplecticity_defect: Vec<f64>,
    pub symmetry_fit: Option<PowerLawFit>,
    pub symplecticity_fit: Option<PowerLawFit>,
}

fn fit_above(taus: &[f64], values: &[f64], floor: f64) -> Result<Option<PowerLawFit>> {
    let (t, v): (Vec<f64>, Vec<f64>) = taus
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > floor)
        .map(|(t, v)| (*t, *v))
        .unzip();
    if t.len() < 3 {
        return Ok(None);
    }
    windowed_power_law_fit(&t, &v).map(Some)
}

fn report(taus: &[f64], sym: Vec<f64>, symp: Vec<f64>, floor: f64) -> Result<DefectReport> {
    Ok(DefectReport {
        step_sizes: taus.to_vec(),
        symmetry_fit: fit_above(taus, &sym, floor)?,
        symplecticity_fit: fit_above(taus, &symp, floor)?,
        symmetry_defect: sym,
        symplecticity_defect: symp,
    })
}

/// Symmetry and symplecticity defects of a general map at `x₀`.
pub fn defect_report(method: &FlowMap, x0: &[f64], taus: &[f64], floor: f64) -> Result<DefectReport> {
    let sym = symmetry_defect(method, x0, taus)?;
    let symp = symplecticity_defect(method, x0, taus)?;
    report(taus, sym, symp, floor)
}

/// Defects of a linear map on `(q, p)`: `max |ψ_τψ_{−τ} − I|` and
/// `|det ψ_τ − 1|`.
pub fn matrix_defect_report(method: &FlowMap, taus: &[f64], floor: f64) -> Result<DefectReport> {
    let mut sym = Vec::with_capacity(taus.len());
    let mut symp = Vec::with_capacity(taus.len());
    for &tau in taus {
        let m = real_matrix(method, tau)?;
        let back = real_matrix(method, -tau)?;
        sym.push((m * back - HoMatrix::identity()).max_abs());
        symp.push((m.det() - 1.0).norm());
    }
    report(taus, sym, symp, floor)
}

/// Matrix of a linear method at real step `tau`.
fn real_matrix(method: &FlowMap, tau: f64) -> Result<HoMatrix> {
    HoMatrix::of_flow(method, C64::new(tau, 0.0))
}

fn entrywise(
    taus: &[f64],
    matrices: &[HoMatrix],
    floor: f64,
) -> Result<[[LeadingTerm; 2]; 2]> {
    let mut out = [[LeadingTerm::Zero; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let v: Vec<f64> = matrices.iter().map(|m| m.entry(i, j).re).collect();
            *cell = leading_term(taus, &v, floor)?;
        }
    }
    Ok(out)
}

/// Leading terms of `M_H(τ) − ψ_τ`, entry by entry.
pub fn truncation_matrix_fit(method: &FlowMap, taus: &[f64], floor: f64) -> Result<[[LeadingTerm; 2]; 2]> {
    let diffs = taus
        .iter()
        .map(|&tau| Ok(ho_exact(C64::new(tau, 0.0)) - real_matrix(method, tau)?))
        .collect::<Result<Vec<_>>>()?;
    entrywise(taus, &diffs, floor)
}

/// Leading terms of `ψ_τψ_{−τ} − I`, entry by entry.
pub fn symmetry_matrix_fit(method: &FlowMap, taus: &[f64], floor: f64) -> Result<[[LeadingTerm; 2]; 2]> {
    let diffs = taus
        .iter()
        .map(|&tau| Ok(real_matrix(method, tau)? * real_matrix(method, -tau)? - HoMatrix::identity()))
        .collect::<Result<Vec<_>>>()?;
    entrywise(taus, &diffs, floor)
}

/// Leading term of `det ψ_τ − 1`.
pub fn determinant_fit(method: &FlowMap, taus: &[f64], floor: f64) -> Result<LeadingTerm> {
    let v = taus
        .iter()
        .map(|&tau| Ok(real_matrix(method, tau)?.det().re - 1.0))
        .collect::<Result<Vec<_>>>()?;
    leading_term(taus, &v, floor)
}

/// Truncation, symmetry and determinant leading terms of a linear method
/// for the harmonic oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoTableRow {
    pub truncation: [[LeadingTerm; 2]; 2],
    pub symmetry: [[LeadingTerm; 2]; 2],
    pub determinant: LeadingTerm,
}

pub fn ho_table_row(method: &FlowMap, taus: &[f64], floor: f64) -> Result<HoTableRow> {
    Ok(HoTableRow {
        truncation: truncation_matrix_fit(method, taus, floor)?,
        symmetry: symmetry_matrix_fit(method, taus, floor)?,
        determinant: determinant_fit(method, taus, floor)?,
    })
}

//! Complex composition coefficients and the combinators built on them.
//!
//! A composition `φ_τ = ψ_{γ₁τ} ∘ ψ_{γ₂τ} ∘ ⋯ ∘ ψ_{γ_sτ}` of a method of order
//! `k` gains one order when `Σγᵢ = 1` and `Σγᵢ^{k+1} = 0`. With two stages
//! the second condition has no real solution, but the conjugate pair
//! `γ, γ̄` with `Re γ = 1/2` solves it. Averaging such a double jump with
//! its conjugate (equivalently, keeping the real part of the output when the
//! vector field and the state are real) yields a method whose adjoint agrees
//! with itself to a much higher order than its convergence order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flow::{FlowMap, MethodMeta, OrderBound, C64};

/// Tolerance on `Σγᵢ − 1` accepted by [`compose_schedule`].
pub const CONSISTENCY_TOLERANCE: f64 = 1e-12;

/// Relative size of an imaginary part still treated as zero by
/// [`real_projection`].
pub const REAL_STATE_TOLERANCE: f64 = 1e-14;

/// Admissible `ℓ` for the double-jump coefficient of a method of order `k`.
pub fn admissible_ell(k: u32) -> (i64, i64) {
    let k = i64::from(k);
    if k % 2 == 0 {
        (-k / 2, k / 2 - 1)
    } else {
        (-(k + 1) / 2, (k - 1) / 2)
    }
}

/// Coefficient `γ` of the two-stage composition `ψ_{γτ} ∘ ψ_{γ̄τ}` raising
/// a method of order `k` to order `k + 1`, on branch `ell`:
/// `γ = 1/2 + (i/2)·sin θ/(1 + cos θ)` with `θ = (2ℓ+1)π/(k+1)`.
pub fn gamma_double_jump(k: u32, ell: i64) -> Result<C64> {
    if k < 1 {
        return Err(Error::Domain(format!("order k must be >= 1, got {k}")));
    }
    let (lo, hi) = admissible_ell(k);
    if ell < lo || ell > hi {
        return Err(Error::Domain(format!(
            "branch index {ell} outside the admissible interval [{lo}, {hi}] for k = {k}"
        )));
    }
    let theta = (2 * ell + 1) as f64 * PI / f64::from(k + 1);
    // sin θ / (1 + cos θ) = tan(θ/2), without the cancellation near θ = ±π.
    Ok(C64::new(0.5, 0.5 * (0.5 * theta).tan()))
}

/// The double-jump coefficient with the smallest phase, `arg γ = π/(2(k+1))`.
pub fn gamma_smallest_phase(k: u32) -> Result<C64> {
    gamma_double_jump(k, 0)
}

/// Smallest-phase complex coefficients `(γ₁, γ₂)` of the symmetric triple
/// jump `ψ_{γ₁τ} ∘ ψ_{γ₂τ} ∘ ψ_{γ₁τ}`, solving `2γ₁ + γ₂ = 1` and
/// `2γ₁^{k+1} + γ₂^{k+1} = 0`.
pub fn gamma_triple_jump(k: u32) -> Result<(C64, C64)> {
    if k < 1 {
        return Err(Error::Domain(format!("order k must be >= 1, got {k}")));
    }
    let m = f64::from(k + 1);
    let phase = C64::from_polar(1.0, PI / m);
    let gamma1 = phase / (2f64.powf(1.0 / m) + 2.0 * phase);
    Ok((gamma1, 1.0 - 2.0 * gamma1))
}

/// Residuals `(Σγᵢ − 1, Σγᵢ^{k+1})` of the two order-raising conditions.
pub fn order_condition_residuals(coefficients: &[C64], k: u32) -> (C64, C64) {
    let sum: C64 = coefficients.iter().sum();
    let power: C64 = coefficients.iter().map(|g| g.powu(k + 1)).sum();
    (sum - 1.0, power)
}

/// A validated list of composition coefficients over a basic method.
#[derive(Debug, Clone)]
pub struct CompositionSchedule {
    coefficients: Vec<C64>,
    base: FlowMap,
    meta: MethodMeta,
}

impl CompositionSchedule {
    pub fn new(base: FlowMap, coefficients: Vec<C64>, meta: MethodMeta) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Validation("empty coefficient list".into()));
        }
        if let Some(bad) = coefficients.iter().position(|g| !g.is_finite()) {
            return Err(Error::Validation(format!(
                "coefficient {bad} is not finite: {}",
                coefficients[bad]
            )));
        }
        let (residual, _) = order_condition_residuals(&coefficients, 1);
        if residual.norm() > CONSISTENCY_TOLERANCE {
            return Err(Error::Validation(format!(
                "coefficients sum to {} (residual {:e}); consistency requires a sum of 1",
                residual + 1.0,
                residual.norm()
            )));
        }
        Ok(CompositionSchedule {
            coefficients,
            base,
            meta,
        })
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn base(&self) -> &FlowMap {
        &self.base
    }

    pub fn meta(&self) -> MethodMeta {
        self.meta
    }

    pub fn into_flow(self) -> FlowMap {
        let name = format!("compose[{}]({})", self.coefficients.len(), self.base.name());
        let max_arg = self
            .coefficients
            .iter()
            .map(|g| g.arg().abs())
            .fold(0.0, f64::max);
        let stage_argument = self.base.stage_argument() + max_arg;
        let real_map = self.base.is_real_map();
        let CompositionSchedule {
            coefficients,
            base,
            meta,
        } = self;
        let flow = FlowMap::new(name, meta, move |x, tau| {
            // The rightmost factor acts first.
            let mut state = x.to_vec();
            for g in coefficients.iter().rev() {
                state = base.apply(&state, g * tau)?;
            }
            Ok(state)
        })
        .with_stage_argument(stage_argument);
        if real_map {
            flow
        } else {
            flow.with_complex_coefficients()
        }
    }
}

/// `ψ_{γ₁τ} ∘ ψ_{γ₂τ} ∘ ⋯ ∘ ψ_{γ_sτ}` for the given basic method.
pub fn compose_schedule(base: FlowMap, coefficients: &[C64], meta: MethodMeta) -> Result<FlowMap> {
    Ok(CompositionSchedule::new(base, coefficients.to_vec(), meta)?.into_flow())
}

/// Orders of the projected double jump of a method with the given metadata.
///
/// For a basic method of even order `2n` and pseudo-symmetry order `q`
/// (necessarily `q ≥ 2n+1`), the projection has order `2n+2` when
/// `q ≥ 2n+2`, with pseudo-symmetry `min(q, 4n+3)` and pseudo-symplecticity
/// `min(q, r, 4n+3)`; when `q = 2n+1` all three orders are `2n+1`. Odd-order
/// inputs are already capped and keep their orders.
pub fn projected_meta(base: MethodMeta) -> MethodMeta {
    let k = base.order;
    if k % 2 == 1 {
        return MethodMeta {
            order_capped: true,
            ..base
        };
    }
    let q = base.pseudo_symmetry_order;
    let r = base.pseudo_symplecticity_order;
    if q.at_least(k + 2) {
        let bound = OrderBound::Finite(2 * k + 3);
        MethodMeta {
            order: k + 2,
            pseudo_symmetry_order: q.min(bound),
            pseudo_symplecticity_order: q.min(r).min(bound),
            order_capped: false,
        }
    } else {
        let bound = OrderBound::Finite(k + 1);
        MethodMeta {
            order: k + 1,
            pseudo_symmetry_order: bound,
            pseudo_symplecticity_order: r.min(bound),
            order_capped: true,
        }
    }
}

fn double_jump_with(base: &FlowMap, gamma: C64) -> Result<FlowMap> {
    let k = base.meta().order;
    let meta = MethodMeta {
        order: k + 1,
        pseudo_symmetry_order: OrderBound::Finite(k + 1),
        pseudo_symplecticity_order: base.meta().pseudo_symplecticity_order,
        order_capped: false,
    };
    let flow = compose_schedule(base.clone(), &[gamma, gamma.conj()], meta)?
        .with_name(format!("double_jump({})", base.name()))
        .with_projection_meta(projected_meta(base.meta()));
    if base.is_real_map() {
        return Ok(flow);
    }
    // Conjugating the coefficients of a complex basic method does not give
    // its adjoint; the conjugate jump is the mirrored composition instead.
    let mirror = compose_schedule(base.clone(), &[gamma.conj(), gamma], meta)?;
    Ok(flow.with_conjugate(mirror))
}

/// `ψ_τ = S_{γτ} ∘ S_{γ̄τ}` with `γ` the smallest-phase coefficient for the
/// (even) order of `base`.
pub fn double_jump(base: &FlowMap) -> Result<FlowMap> {
    let k = base.meta().order;
    if k % 2 != 0 {
        return Err(Error::Domain(format!(
            "double jump needs a basic method of even order, got order {k}"
        )));
    }
    double_jump_with(base, gamma_smallest_phase(k)?)
}

/// The analytic projection `½(ψ_τ + ψ̄_τ)`, where `ψ̄` is `ψ` with every
/// coefficient conjugated.
///
/// When the elementary flows behind `method` are real maps, the conjugate
/// method is `ψ̄_τ(x) = conj(ψ_{τ̄}(x̄))`. For a real state and a real step
/// this is the conjugate of `ψ_τ(x)`, so the average reduces to the real
/// part of a single evaluation; otherwise both branches are evaluated. The
/// result is analytic in the step, which lets it be composed again at
/// complex steps.
///
/// A method carrying an explicit conjugate (a double jump over a basic
/// method with complex coefficients) is averaged with it directly; the real
/// part is still taken for real inputs.
pub fn conjugate_average(method: &FlowMap) -> FlowMap {
    let name = format!("proj({})", method.name());
    if let Some(conjugate) = method.conjugate() {
        let (forward, backward) = (method.clone(), conjugate.clone());
        return FlowMap::new(name, method.meta(), move |x, tau| {
            let real_input = tau.im == 0.0 && x.iter().all(|z| z.im == 0.0);
            let a = forward.apply(x, tau)?;
            let b = backward.apply(x, tau)?;
            Ok(a.iter()
                .zip(&b)
                .map(|(p, q)| {
                    let mean = 0.5 * (p + q);
                    if real_input {
                        C64::new(mean.re, 0.0)
                    } else {
                        mean
                    }
                })
                .collect())
        })
        .with_stage_argument(method.stage_argument())
        .with_complex_coefficients();
    }
    let inner = method.clone();
    FlowMap::new(name, method.meta(), move |x, tau| {
        let real_input = tau.im == 0.0 && x.iter().all(|z| z.im == 0.0);
        let forward = inner.apply(x, tau)?;
        if real_input {
            return Ok(forward.into_iter().map(|z| C64::new(z.re, 0.0)).collect());
        }
        let mirrored: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        let backward = inner.apply(&mirrored, tau.conj())?;
        Ok(forward
            .iter()
            .zip(&backward)
            .map(|(a, b)| 0.5 * (a + b.conj()))
            .collect())
    })
    .with_stage_argument(method.stage_argument())
}

/// Real-axis projection `R̂_τ = ½(ψ_τ + ψ̄_τ)` of a method applied to a real
/// vector field.
///
/// The state must be real; the output is the real part of `ψ_τ(x)` computed
/// in complex arithmetic, with an imaginary part that is exactly zero. A
/// complex step is accepted and evaluated through both conjugate branches.
/// The declared orders follow [`projected_meta`] when `method` is a double
/// jump built by [`double_jump`]; other methods keep their metadata.
pub fn real_projection(method: &FlowMap) -> FlowMap {
    let meta = method.projection_meta().unwrap_or(method.meta());
    let averaged = conjugate_average(method);
    let name = averaged.name().to_string();
    let stage_argument = averaged.stage_argument();
    FlowMap::new(name, meta, move |x, tau| {
        let mut real = Vec::with_capacity(x.len());
        for (i, z) in x.iter().enumerate() {
            if z.im.abs() > REAL_STATE_TOLERANCE * z.re.abs().max(1.0) {
                return Err(Error::Domain(format!(
                    "real projection needs a real state; component {i} is {z}"
                )));
            }
            real.push(C64::new(z.re, 0.0));
        }
        averaged.apply(&real, tau)
    })
    .with_stage_argument(stage_argument)
}

/// Recursively projected double jumps `R̂⁽¹⁾, R̂⁽²⁾, …` over a symmetric
/// basic method.
#[derive(Debug, Clone)]
pub struct RecursiveFamily {
    pub base: FlowMap,
    pub levels: Vec<FlowMap>,
    pub base_order: u32,
    /// Products of `γ` factors with which the basic method is evaluated at
    /// each level; level `i` has `2^i` entries.
    pub coefficient_products: Vec<Vec<C64>>,
    /// The double-jump coefficient `γ^{[k]}` used at each level.
    pub level_gammas: Vec<C64>,
}

impl RecursiveFamily {
    pub fn level(&self, i: usize) -> Option<&FlowMap> {
        i.checked_sub(1).and_then(|j| self.levels.get(j))
    }

    pub fn declared_orders(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.meta().order).collect()
    }
}

/// Builds `levels` levels of
/// `Φ⁽ⁱ⁾_τ = R̂⁽ⁱ⁻¹⁾_{γτ} ∘ R̂⁽ⁱ⁻¹⁾_{γ̄τ}`, `R̂⁽ⁱ⁾ = ½(Φ⁽ⁱ⁾ + Φ̄⁽ⁱ⁾)`, with
/// `R̂⁽⁰⁾` the basic method and `γ = γ^{[2n+2(i−1)]}` for a basic method of
/// order `2n`.
///
/// Levels past the pseudo-symmetry cap of the basic method are still built;
/// their metadata reports the capped order.
pub fn recursive_family(base: &FlowMap, levels: usize) -> Result<RecursiveFamily> {
    if levels == 0 {
        return Err(Error::Domain("at least one level is required".into()));
    }
    let meta = base.meta();
    let base_order = meta.order;
    if base_order % 2 != 0 {
        return Err(Error::Domain(format!(
            "recursive family needs a basic method of even order, got {base_order}"
        )));
    }
    if !meta.pseudo_symmetry_order.at_least(base_order + 2) {
        return Err(Error::Domain(format!(
            "basic method must be symmetric (pseudo-symmetry order >= {}), got {}",
            base_order + 2,
            meta.pseudo_symmetry_order
        )));
    }

    let mut out = Vec::with_capacity(levels);
    let mut products: Vec<Vec<C64>> = Vec::with_capacity(levels);
    let mut gammas = Vec::with_capacity(levels);
    let mut previous = base.clone();
    let mut previous_products = vec![C64::new(1.0, 0.0)];
    for i in 1..=levels {
        let k = base_order + 2 * (i as u32 - 1);
        let gamma = gamma_smallest_phase(k)?;
        let jumped = double_jump_with(&previous, gamma)?;
        let level_meta = projected_meta(previous.meta());
        let level = conjugate_average(&jumped)
            .with_meta(level_meta)
            .with_name(format!("R{i}({})", base.name()));

        let mut level_products = Vec::with_capacity(2 * previous_products.len());
        for p in &previous_products {
            level_products.push(gamma * p);
            level_products.push(gamma.conj() * p);
        }

        gammas.push(gamma);
        products.push(level_products.clone());
        previous_products = level_products;
        previous = level.clone();
        out.push(level);
    }

    Ok(RecursiveFamily {
        base: base.clone(),
        levels: out,
        base_order,
        coefficient_products: products,
        level_gammas: gammas,
    })
}

/// Largest `|arg|` over every sub-step coefficient the basic flows see in the
/// deepest level of the family (including the basic method's own stage
/// coefficients), and whether all of them have a positive real part.
pub fn coefficient_arguments(family: &RecursiveFamily) -> (f64, bool) {
    let deepest = family
        .coefficient_products
        .last()
        .map(|ps| ps.iter().map(|p| p.arg().abs()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    let max_argument = deepest + family.base.stage_argument();
    (max_argument, max_argument < PI / 2.0)
}

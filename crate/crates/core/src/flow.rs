use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;

pub type C64 = Complex64;

type Evaluator = dyn Fn(&[C64], C64) -> Result<Vec<C64>> + Send + Sync;

/// A pseudo-symmetry or pseudo-symplecticity order, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderBound {
    Finite(u32),
    Infinite,
}

impl OrderBound {
    pub fn min(self, other: OrderBound) -> OrderBound {
        std::cmp::min(self, other)
    }

    pub fn at_least(self, k: u32) -> bool {
        self >= OrderBound::Finite(k)
    }
}

impl fmt::Display for OrderBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderBound::Finite(k) => write!(f, "{k}"),
            OrderBound::Infinite => f.write_str("inf"),
        }
    }
}

/// Declared orders of a method. These are declarative; the diagnostics
/// module measures them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodMeta {
    pub order: u32,
    pub pseudo_symmetry_order: OrderBound,
    pub pseudo_symplecticity_order: OrderBound,
    /// Set when a construction could not raise the order any further because
    /// it hit the pseudo-symmetry order of the underlying basic method.
    pub order_capped: bool,
}

impl MethodMeta {
    /// A method of order `order` that is symmetric and symplectic.
    pub fn symmetric(order: u32) -> Self {
        MethodMeta {
            order,
            pseudo_symmetry_order: OrderBound::Infinite,
            pseudo_symplecticity_order: OrderBound::Infinite,
            order_capped: false,
        }
    }

    /// An exact flow: symmetric, symplectic, and of unbounded order. The order
    /// is stored as `u32::MAX`.
    pub fn exact() -> Self {
        Self::symmetric(u32::MAX)
    }

    /// A method of order `order` with no symmetry beyond its order.
    pub fn plain(order: u32) -> Self {
        MethodMeta {
            order,
            pseudo_symmetry_order: OrderBound::Finite(order),
            pseudo_symplecticity_order: OrderBound::Finite(order),
            order_capped: false,
        }
    }
}

/// An integrator `(state, step) -> state` over complex vectors.
///
/// Evaluators are shared immutable closures, so a `FlowMap` is cheap to clone
/// and can be called from several threads at once.
#[derive(Clone)]
pub struct FlowMap {
    name: Arc<str>,
    meta: MethodMeta,
    stage_argument: f64,
    projection_meta: Option<MethodMeta>,
    real_map: bool,
    conjugate: Option<Arc<FlowMap>>,
    eval: Arc<Evaluator>,
}

impl FlowMap {
    pub fn new<F>(name: impl Into<String>, meta: MethodMeta, eval: F) -> Self
    where
        F: Fn(&[C64], C64) -> Result<Vec<C64>> + Send + Sync + 'static,
    {
        FlowMap {
            name: Arc::from(name.into()),
            meta,
            stage_argument: 0.0,
            projection_meta: None,
            real_map: true,
            conjugate: None,
            eval: Arc::new(eval),
        }
    }

    /// The identity map, declared exact.
    pub fn identity() -> Self {
        FlowMap::new("identity", MethodMeta::exact(), |x, _| Ok(x.to_vec()))
    }

    /// Sets the largest |arg| of the complex coefficients used internally by
    /// this method's own stages (zero for real-coefficient methods).
    pub fn with_stage_argument(mut self, argument: f64) -> Self {
        self.stage_argument = argument;
        self
    }

    /// Records the declared orders of this method's real projection.
    pub fn with_projection_meta(mut self, meta: MethodMeta) -> Self {
        self.projection_meta = Some(meta);
        self
    }

    /// Marks a method whose coefficients are not closed under conjugation, so
    /// that `conj(ψ_τ̄(x̄)) ≠ ψ_τ(x)` even for a real vector field.
    pub fn with_complex_coefficients(mut self) -> Self {
        self.real_map = false;
        self
    }

    /// Supplies the conjugate method `ψ̄` used by the projection in place of
    /// coefficient-wise conjugation.
    pub fn with_conjugate(mut self, conjugate: FlowMap) -> Self {
        self.conjugate = Some(Arc::new(conjugate));
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Arc::from(name.into());
        self
    }

    pub fn with_meta(mut self, meta: MethodMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn meta(&self) -> MethodMeta {
        self.meta
    }

    pub fn stage_argument(&self) -> f64 {
        self.stage_argument
    }

    /// Declared orders of the real projection of this method, when known.
    pub fn projection_meta(&self) -> Option<MethodMeta> {
        self.projection_meta
    }

    /// True when the method maps real states to real states for real steps
    /// whenever its elementary flows do.
    pub fn is_real_map(&self) -> bool {
        self.real_map
    }

    pub fn conjugate(&self) -> Option<&FlowMap> {
        self.conjugate.as_deref()
    }

    pub fn apply(&self, state: &[C64], step: C64) -> Result<Vec<C64>> {
        (self.eval)(state, step)
    }

    /// Applies the map to a real state with a real step.
    pub fn apply_real(&self, state: &[f64], step: f64) -> Result<Vec<C64>> {
        let z: Vec<C64> = state.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.apply(&z, C64::new(step, 0.0))
    }
}

impl fmt::Debug for FlowMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowMap")
            .field("name", &self.name)
            .field("meta", &self.meta)
            .field("stage_argument", &self.stage_argument)
            .field("real_map", &self.real_map)
            .finish()
    }
}

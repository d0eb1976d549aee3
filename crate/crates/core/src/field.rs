use std::fmt;
use std::sync::Arc;

/// A point in the plane.
pub type Point = [f64; 2];

type ScalarFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(Point, f64) -> Point + Send + Sync>;

/// A space-time function with its spatial gradient, used for exact solutions
/// and forcing data.
#[derive(Clone)]
pub struct AnalyticField {
    value: ScalarFn,
    gradient: VectorFn,
    time_derivative: Option<Box<AnalyticField>>,
}

impl fmt::Debug for AnalyticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticField")
            .field("has_time_derivative", &self.time_derivative.is_some())
            .finish_non_exhaustive()
    }
}

impl AnalyticField {
    pub fn new(
        value: impl Fn(Point, f64) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(Point, f64) -> Point + Send + Sync + 'static,
    ) -> Self {
        AnalyticField { value: Arc::new(value), gradient: Arc::new(gradient), time_derivative: None }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_, _| c, |_, _| [0.0, 0.0])
    }

    /// Attaches the time derivative `∂v/∂t` (itself a field with gradient).
    pub fn with_time_derivative(mut self, dt: AnalyticField) -> Self {
        self.time_derivative = Some(Box::new(dt));
        self
    }

    pub fn time_derivative(&self) -> Option<&AnalyticField> {
        self.time_derivative.as_deref()
    }

    #[inline]
    pub fn value(&self, x: Point, t: f64) -> f64 {
        (self.value)(x, t)
    }

    #[inline]
    pub fn gradient(&self, x: Point, t: f64) -> Point {
        (self.gradient)(x, t)
    }

    /// Tangential part of the gradient with respect to the circle through `x`
    /// centred at the origin, i.e. `∇v - (∇v·ν)ν` with `ν = x/|x|`.
    pub fn circle_tangential_gradient(&self, x: Point, t: f64) -> Point {
        let g = self.gradient(x, t);
        let r = x[0].hypot(x[1]);
        let nu = [x[0] / r, x[1] / r];
        let gn = g[0] * nu[0] + g[1] * nu[1];
        [g[0] - gn * nu[0], g[1] - gn * nu[1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_central_differences() {
        let f = AnalyticField::new(
            |x, t| (-t).exp() * x[0] * x[1] + x[0].sin(),
            |x, t| [(-t).exp() * x[1] + x[0].cos(), (-t).exp() * x[0]],
        );
        let h = 1e-6;
        for &(x, t) in &[([0.3, -0.2], 0.1), ([0.9, 0.4], 0.7), ([-0.5, 0.5], 1.0)] {
            let g = f.gradient(x, t);
            let dx = (f.value([x[0] + h, x[1]], t) - f.value([x[0] - h, x[1]], t)) / (2.0 * h);
            let dy = (f.value([x[0], x[1] + h], t) - f.value([x[0], x[1] - h], t)) / (2.0 * h);
            assert!((dx - g[0]).abs() <= 1e-6 * g[0].abs().max(1.0));
            assert!((dy - g[1]).abs() <= 1e-6 * g[1].abs().max(1.0));
        }
    }

    #[test]
    fn tangential_gradient_is_orthogonal_to_radius() {
        let f = AnalyticField::new(|x, _| x[0] * x[1], |x, _| [x[1], x[0]]);
        let x = [0.6, 0.8];
        let g = f.circle_tangential_gradient(x, 0.0);
        assert!((g[0] * x[0] + g[1] * x[1]).abs() < 1e-15);
    }
}

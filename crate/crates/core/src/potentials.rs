//! Free-energy potentials with analytic derivatives.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    /// `scale * (u^2 - 1)^2`
    DoubleWell {
        scale: f64,
    },
    /// `scale * u^2 / 2`; its derivative is linear, which makes the
    /// nonlinear load reduce to a mass-matrix product.
    Quadratic {
        scale: f64,
    },
    Zero,
}

/// A scalar potential `W` with derivatives up to third order.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub kind: PotentialKind,
    pub label: String,
}

impl Potential {
    pub fn double_well(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Potential { kind: PotentialKind::DoubleWell { scale }, label: format!("double_well({scale})") })
    }

    pub fn quadratic(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Potential { kind: PotentialKind::Quadratic { scale }, label: format!("quadratic({scale})") })
    }

    pub fn zero() -> Self {
        Potential { kind: PotentialKind::Zero, label: "zero".into() }
    }

    /// Looks a potential up by the name used in scenario files.
    pub fn from_name(name: &str, scale: f64) -> Result<Self> {
        match name {
            "double_well" => Self::double_well(scale),
            "quadratic" => Self::quadratic(scale),
            "zero" => Ok(Self::zero()),
            other => Err(Error::InvalidArgument(format!("unknown potential `{other}`"))),
        }
    }

    #[inline]
    pub fn w(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell { scale } => {
                let s = u * u - 1.0;
                scale * s * s
            }
            PotentialKind::Quadratic { scale } => 0.5 * scale * u * u,
            PotentialKind::Zero => 0.0,
        }
    }

    #[inline]
    pub fn dw(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell { scale } => 4.0 * scale * (u * u - 1.0) * u,
            PotentialKind::Quadratic { scale } => scale * u,
            PotentialKind::Zero => 0.0,
        }
    }

    #[inline]
    pub fn d2w(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell { scale } => 4.0 * scale * (3.0 * u * u - 1.0),
            PotentialKind::Quadratic { scale } => scale,
            PotentialKind::Zero => 0.0,
        }
    }

    #[inline]
    pub fn d3w(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell { scale } => 24.0 * scale * u,
            PotentialKind::Quadratic { .. } | PotentialKind::Zero => 0.0,
        }
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("potential scale must be positive, got {scale}")))
    }
}

/// Bulk potential `W_Ω` and surface potential `W_Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPair {
    pub bulk: Potential,
    pub surface: Potential,
}

impl PotentialPair {
    pub fn new(bulk: Potential, surface: Potential) -> Self {
        PotentialPair { bulk, surface }
    }

    /// The same potential in the bulk and on the boundary.
    pub fn uniform(p: Potential) -> Self {
        PotentialPair { bulk: p.clone(), surface: p }
    }

    pub fn zero() -> Self {
        Self::uniform(Potential::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn central(f: impl Fn(f64) -> f64, u: f64) -> f64 {
        let h = 1e-5;
        (f(u + h) - f(u - h)) / (2.0 * h)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn double_well_values() {
        let p = Potential::double_well(0.25).unwrap();
        for u in [-1.0, 1.0] {
            assert_eq!(p.w(u), 0.0);
            assert_eq!(p.dw(u), 0.0);
        }
        assert_eq!(p.dw(0.0), 0.0);
        assert_eq!(p.dw(2.0), 6.0);
        assert_eq!(Potential::double_well(10.0).unwrap().w(0.0), 10.0);
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(Potential::double_well(0.0).is_err());
        assert!(Potential::double_well(-1.0).is_err());
        assert!(Potential::from_name("log", 1.0).is_err());
    }

    #[test]
    fn zero_potential() {
        let p = Potential::zero();
        assert_eq!(p.w(5.0), 0.0);
        assert_eq!(p.dw(-3.0), 0.0);
        assert_eq!(p.d3w(1.0), 0.0);
    }

    #[test]
    fn derivatives_at_integers() {
        for p in [
            Potential::double_well(0.25).unwrap(),
            Potential::double_well(10.0).unwrap(),
            Potential::quadratic(2.0).unwrap(),
        ] {
            for u in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                assert!(close(central(|v| p.w(v), u), p.dw(u)));
                assert!(close(central(|v| p.dw(v), u), p.d2w(u)));
                assert!(close(central(|v| p.d2w(v), u), p.d3w(u)));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn derivative_consistency(u in -3.0f64..3.0, scale in 0.1f64..20.0) {
            let p = Potential::double_well(scale).unwrap();
            prop_assert!(close(central(|v| p.w(v), u), p.dw(u)));
            prop_assert!(close(central(|v| p.dw(v), u), p.d2w(u)));
            prop_assert!(close(central(|v| p.d2w(v), u), p.d3w(u)));
        }

        #[test]
        fn higher_derivatives_are_locally_lipschitz(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            prop_assume!((a - b).abs() > 1e-9);
            let p = Potential::double_well(1.0).unwrap();
            // On [-3, 3]: |W'''| <= 72 and |W''''| = 24.
            prop_assert!((p.d2w(a) - p.d2w(b)).abs() / (a - b).abs() <= 72.0 + 1e-9);
            prop_assert!((p.d3w(a) - p.d3w(b)).abs() / (a - b).abs() <= 24.0 + 1e-9);
        }
    }
}

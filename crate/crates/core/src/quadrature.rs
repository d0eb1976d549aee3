//! Quadrature rules on triangles (barycentric points) and on segments
//! (parameters in `[0, 1]`). Weights sum to one; multiply by the measure.

/// Degree-2 rule with three interior points; the standard rule for loads and
/// energies.
pub const TRI_DEG2: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

/// Seven-point degree-5 rule, used for error integrals.
pub fn tri_deg5() -> [([f64; 3], f64); 7] {
    let s15 = 15f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (9.0 + 2.0 * s15) / 21.0;
    let c = (6.0 + s15) / 21.0;
    let d = (9.0 - 2.0 * s15) / 21.0;
    let wa = (155.0 - s15) / 1200.0;
    let wc = (155.0 + s15) / 1200.0;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 9.0 / 40.0),
        ([b, a, a], wa),
        ([a, b, a], wa),
        ([a, a, b], wa),
        ([d, c, c], wc),
        ([c, d, c], wc),
        ([c, c, d], wc),
    ]
}

/// Two-point Gauss rule on `[0, 1]` (exact for cubics).
pub fn seg_gauss2() -> [(f64, f64); 2] {
    let g = 0.5 / 3f64.sqrt();
    [(0.5 - g, 0.5), (0.5 + g, 0.5)]
}

/// Three-point Gauss rule on `[0, 1]` (exact for quintics).
pub fn seg_gauss3() -> [(f64, f64); 3] {
    let g = 0.5 * 0.6f64.sqrt();
    [(0.5 - g, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + g, 5.0 / 18.0)]
}

#[cfg(test)]
mod tests {
    use super::*;

    // Exact value of the integral of l0^i l1^j l2^k over the reference
    // triangle of area 1/2: i! j! k! 2 / (i + j + k + 2)!, divided by the area.
    fn monomial_mean(i: u32, j: u32, k: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        2.0 * fact(i) * fact(j) * fact(k) / fact(i + j + k + 2)
    }

    fn apply(rule: &[([f64; 3], f64)], i: u32, j: u32, k: u32) -> f64 {
        rule.iter().map(|(l, w)| w * l[0].powi(i as i32) * l[1].powi(j as i32) * l[2].powi(k as i32)).sum()
    }

    #[test]
    fn triangle_rules_are_exact_to_their_degree() {
        for (rule, deg) in [(TRI_DEG2.to_vec(), 2), (tri_deg5().to_vec(), 5)] {
            for i in 0..=deg {
                for j in 0..=deg - i {
                    for k in 0..=deg - i - j {
                        let exact = monomial_mean(i, j, k);
                        assert!((apply(&rule, i, j, k) - exact).abs() < 1e-14, "{i} {j} {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn segment_rules_are_exact_to_their_degree() {
        for (rule, deg) in [(seg_gauss2().to_vec(), 3), (seg_gauss3().to_vec(), 5)] {
            for p in 0..=deg {
                let q: f64 = rule.iter().map(|(s, w)| w * s.powi(p)).sum();
                assert!((q - 1.0 / f64::from(p as u32 + 1)).abs() < 1e-15);
            }
        }
    }
}

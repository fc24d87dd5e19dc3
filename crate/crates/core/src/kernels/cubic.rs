/// Monic depressed cubic `γ³ + p·γ + q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficients {
    pub p: f64,
    pub q: f64,
}

impl CubicCoefficients {
    pub fn eval(&self, g: f64) -> f64 {
        (g * g + self.p) * g + self.q
    }

    fn derivative(&self, g: f64) -> f64 {
        3.0 * g * g + self.p
    }

    /// `-4p³ - 27q²`: positive iff there are three distinct real roots.
    pub fn discriminant(&self) -> f64 {
        -4.0 * self.p.powi(3) - 27.0 * self.q * self.q
    }
}

fn polish(c: &CubicCoefficients, g: f64) -> f64 {
    let d = c.derivative(g);
    if d == 0.0 {
        return g;
    }
    let next = g - c.eval(g) / d;
    if next.is_finite() && c.eval(next).abs() < c.eval(g).abs() {
        next
    } else {
        g
    }
}

// The remaining roots of the quadratic factor γ² + r·γ + (p + r²).
fn deflated_roots(c: &CubicCoefficients, r: f64) -> Option<(f64, f64)> {
    let disc = -3.0 * r * r - 4.0 * c.p;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some((0.5 * (-r - s), 0.5 * (-r + s)))
}

/// Largest real root, from the trigonometric form when the discriminant is
/// positive and from Cardano's formula otherwise, followed by one Newton step.
pub fn max_real_root_depressed_cubic(c: CubicCoefficients) -> f64 {
    let CubicCoefficients { p, q } = c;
    debug_assert!(p.is_finite() && q.is_finite());
    let root = if p == 0.0 {
        (-q).cbrt()
    } else if c.discriminant() > 0.0 {
        // three distinct real roots; p < 0 here
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        m * (arg.acos() / 3.0).cos()
    } else {
        let h = (q * q / 4.0 + p * p * p / 27.0).max(0.0);
        let s = h.sqrt();
        // pick the sign that avoids cancellation
        let u = (-0.5 * q - q.signum() * s).cbrt();
        let r = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        // near a double root the repeated root may be the larger one
        match deflated_roots(&c, r) {
            Some((_, hi)) if hi > r => hi,
            _ => r,
        }
    };
    polish(&c, root)
}

/// All real roots in ascending order (repeated roots reported once per
/// multiplicity found numerically).
pub fn real_roots_depressed_cubic(c: CubicCoefficients) -> Vec<f64> {
    let top = max_real_root_depressed_cubic(c);
    let mut roots = vec![top];
    if let Some((lo, hi)) = deflated_roots(&c, top) {
        roots.push(polish(&c, lo));
        roots.push(polish(&c, hi));
    }
    roots.sort_by(f64::total_cmp);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_roots() {
        let r = max_real_root_depressed_cubic(CubicCoefficients { p: -1.0, q: 0.0 });
        assert!((r - 1.0).abs() < 1e-14);
        let all = real_roots_depressed_cubic(CubicCoefficients { p: -1.0, q: 0.0 });
        assert_eq!(all.len(), 3);
        assert!((all[0] + 1.0).abs() < 1e-14 && all[1].abs() < 1e-14);
    }

    #[test]
    fn unit_root_when_on_budget() {
        let r = max_real_root_depressed_cubic(CubicCoefficients { p: -0.5, q: -0.5 });
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn double_root_cases() {
        // (γ - 1)²(γ + 2) = γ³ - 3γ + 2
        let r = max_real_root_depressed_cubic(CubicCoefficients { p: -3.0, q: 2.0 });
        assert!((r - 1.0).abs() < 1e-7, "{r}");
        // (γ + 1)²(γ - 2) = γ³ - 3γ - 2
        let r = max_real_root_depressed_cubic(CubicCoefficients { p: -3.0, q: -2.0 });
        assert!((r - 2.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn single_root_branch() {
        let c = CubicCoefficients { p: 3.0, q: -4.0 };
        let r = max_real_root_depressed_cubic(c);
        assert!((r - 1.0).abs() < 1e-14);
        let c = CubicCoefficients { p: 0.0, q: -8.0 };
        assert!((max_real_root_depressed_cubic(c) - 2.0).abs() < 1e-14);
    }
}

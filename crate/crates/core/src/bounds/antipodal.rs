use super::{clamp0, half_log2, RegimeRate};

fn regime(p: f64, c: f64) -> u8 {
    let c2 = c * c;
    if c2 <= 1.0 {
        1
    } else if c2 < p + 1.0 {
        2
    } else {
        3
    }
}

/// Outer bound for antipodal fading `A ∈ {−1, +1}`.
pub fn outer_antipodal(p: f64, c: f64) -> RegimeRate {
    let c2 = c * c;
    let regime = regime(p, c);
    let rate = match regime {
        1 => half_log2(p + 1.0) + 0.5,
        2 => half_log2(p + c2 + 1.0) - 0.25 * c2.log2() - 0.5,
        _ => 0.25 * (p + 1.0).log2() - 0.5,
    };
    RegimeRate {
        rate: clamp0(rate),
        regime,
    }
}

/// Superposition of a TIN layer and a layer pre-coded against `S` at one fading value.
pub fn inner_antipodal(p: f64, c: f64) -> RegimeRate {
    let c2 = c * c;
    let regime = regime(p, c);
    let rate = match regime {
        1 => half_log2(1.0 + p) - 0.5,
        2 => half_log2(1.0 + p + c2) - 0.25 * c2.log2() - 1.0,
        _ => 0.25 * (1.0 + p).log2() - 1.0,
    };
    RegimeRate {
        rate: clamp0(rate),
        regime,
    }
}

/// Continuous symmetric fading admits the antipodal outer bound.
pub fn outer_symmetric_continuous(p: f64, c: f64) -> f64 {
    outer_antipodal(p, c).rate
}

/// Outer bound of the two-user carbon-copy channel with independent unit states.
pub fn ccdp_outer(p: f64, c: f64) -> RegimeRate {
    let c2 = c * c;
    let (rate, regime) = if c2 <= 2.0 {
        (half_log2(1.0 + p) + 0.5, 1)
    } else if c2 < 2.0 * (p + 1.0) {
        (
            half_log2((p + c2 / 2.0 + 1.0) / c2) + 0.25 * (c2 / 2.0).log2() + 0.5,
            2,
        )
    } else {
        (0.25 * (p + 1.0).log2(), 3)
    };
    RegimeRate {
        rate: clamp0(rate),
        regime,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn outer_values() {
        assert_abs_diff_eq!(outer_antipodal(3.0, 0.5).rate, 1.5, epsilon = 1e-15);
        let mid = 0.5 * 20f64.log2() - 0.25 * 4f64.log2() - 0.5;
        assert_abs_diff_eq!(outer_antipodal(15.0, 2.0).rate, mid, epsilon = 1e-15);
        assert_abs_diff_eq!(mid, 1.160_964_047_443_681, epsilon = 1e-12);
        assert_eq!(
            outer_antipodal(3.0, 2.0),
            RegimeRate {
                rate: 0.0,
                regime: 3
            }
        );
    }

    #[test]
    fn inner_values() {
        assert_abs_diff_eq!(inner_antipodal(3.0, 0.5).rate, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            inner_antipodal(15.0, 2.0).rate,
            0.660_964_047_443_681,
            epsilon = 1e-12
        );
        assert_eq!(inner_antipodal(3.0, 2.0).rate, 0.0);
    }

    #[test]
    fn symmetric_matches_antipodal() {
        assert_eq!(outer_symmetric_continuous(3.0, 0.5), 1.5);
        assert_eq!(outer_symmetric_continuous(3.0, 2.0), 0.0);
        for c in [0.1, 1.0, 3.0] {
            assert!(outer_symmetric_continuous(0.0, c) <= 0.5);
        }
    }

    #[test]
    fn ccdp_values() {
        assert_eq!(
            ccdp_outer(3.0, 1.0),
            RegimeRate {
                rate: 1.5,
                regime: 1
            }
        );
        assert_eq!(
            ccdp_outer(3.0, 3.0),
            RegimeRate {
                rate: 0.5,
                regime: 3
            }
        );
        assert_eq!(ccdp_outer(0.0, 1.0).rate, 0.5);
    }
}

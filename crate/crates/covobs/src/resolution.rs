//! Limit of resolution: the smallest window width at which some effect of
//! the smeared observable is regular (catches more than half the mass).

use crate::error::{Error, Result};
use crate::measure::Measure1D;
use serde::{Deserialize, Serialize};

/// Outcome of a resolution computation. `gamma` may be `+inf` (trivial
/// observable); it crosses JSON as the string `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolutionReport {
    #[serde(
        serialize_with = "serialize_gamma",
        deserialize_with = "deserialize_gamma"
    )]
    pub gamma: f64,
    pub tolerance: f64,
    pub method: String,
    pub curve: Vec<(f64, f64)>,
}

fn serialize_gamma<S: serde::Serializer>(g: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if g.is_finite() {
        s.serialize_f64(*g)
    } else {
        s.serialize_str("inf")
    }
}

fn deserialize_gamma<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<f64, D::Error> {
    struct V;
    impl serde::de::Visitor<'_> for V {
        type Value = f64;
        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or the string \"inf\"")
        }
        fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<f64, E> {
            Ok(v)
        }
        fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                _ => Err(E::custom(format!("unexpected gamma string {v:?}"))),
            }
        }
    }
    d.deserialize_any(V)
}

impl ResolutionReport {
    /// CSV of the sampled (alpha, g) curve.
    pub fn write_curve_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "alpha,g")?;
        for (alpha, g) in &self.curve {
            writeln!(w, "{alpha},{g}")?;
        }
        Ok(())
    }
}

/// Whether some width-`alpha` window catches more than half the mass.
/// (The dual condition — some window catches less than half — always holds
/// for probability measures on the line and is not recomputed.)
pub fn is_alpha_regular(rho: &Measure1D, alpha: f64) -> bool {
    rho.sliding_sup(alpha) > 0.5
}

/// Bisection for the threshold width `gamma`: below it no window is regular,
/// above it some window is. Ties at exactly 1/2 count as not regular, so a
/// plateau at 1/2 (two-atom smears) resolves to the plateau's right edge.
pub fn limit_of_resolution(rho: &Measure1D, tol: f64) -> Result<ResolutionReport> {
    let dx = rho.grid.dx();
    if !(tol.is_finite() && tol >= 0.25 * dx) {
        return Err(Error::InvalidParameter {
            name: "tol",
            message: format!("tolerance {tol} must be at least dx/4 = {}", 0.25 * dx),
        });
    }
    let mut probes: Vec<(f64, f64)> = Vec::new();
    let cdf = rho.cdf();
    let diameter = cdf
        .support_bounds()
        .map(|(lo, hi)| hi - lo)
        .unwrap_or(0.0);
    let top = diameter + tol;

    let regular = |alpha: f64, probes: &mut Vec<(f64, f64)>| {
        let g = rho.sliding_sup(alpha);
        probes.push((alpha, g));
        g > 0.5
    };

    let gamma = if regular(0.0, &mut probes) {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, top);
        debug_assert!(regular(hi, &mut probes), "full-support window not regular");
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if regular(mid, &mut probes) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    for i in 0..=32 {
        let alpha = top * i as f64 / 32.0;
        regular(alpha, &mut probes);
    }
    probes.sort_by(|a, b| a.0.total_cmp(&b.0));
    probes.dedup_by(|a, b| a.0 == b.0);

    Ok(ResolutionReport {
        gamma,
        tolerance: tol.max(dx),
        method: "bisection".into(),
        curve: probes,
    })
}

/// Resolution of the trivial (state-independent) observable: no interval
/// effect is ever regular, so the limit is infinite and there is no curve.
pub fn trivial_resolution() -> ResolutionReport {
    ResolutionReport {
        gamma: f64::INFINITY,
        tolerance: 0.0,
        method: "bisection".into(),
        curve: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::measure::{make_dirac, make_gaussian, make_uniform, mix};
    use approx::assert_abs_diff_eq;

    /// root of 2*Phi(r/2) - 1 = 1/2: r = 2*Phi^{-1}(3/4)
    const GAMMA_PER_SIGMA: f64 = 1.3489795003921635;
    const G_AT_ONE: f64 = 0.3829249225480262; // 2*Phi(0.5) - 1
    const G_AT_THREE_HALVES: f64 = 0.5467452952462636; // 2*Phi(0.75) - 1

    fn grid() -> GridSpec {
        GridSpec::new(2048, 40.0).unwrap()
    }

    #[test]
    fn regularity_examples() {
        assert!(is_alpha_regular(&make_dirac(0.0, grid()), 0.01));
        let gauss = make_gaussian(0.0, 1.0, grid()).unwrap();
        assert!(!is_alpha_regular(&gauss, 1.0));
        assert!(is_alpha_regular(&gauss, 1.5));
        assert_abs_diff_eq!(gauss.sliding_sup(1.0), G_AT_ONE, epsilon = 1e-6);
        assert_abs_diff_eq!(gauss.sliding_sup(1.5), G_AT_THREE_HALVES, epsilon = 1e-6);
        let uniform = make_uniform(0.0, 1.0, grid()).unwrap();
        assert!(!is_alpha_regular(&uniform, 0.4));
        assert!(is_alpha_regular(&uniform, 0.6));
    }

    #[test]
    fn gaussian_resolution_scales_with_sigma() {
        for sigma in [0.5, 1.0] {
            let rho = make_gaussian(0.0, sigma, grid()).unwrap();
            let report = limit_of_resolution(&rho, 5e-3).unwrap();
            assert!(
                (report.gamma - GAMMA_PER_SIGMA * sigma).abs() < 0.01,
                "gamma {} for sigma {sigma}",
                report.gamma
            );
        }
    }

    #[test]
    fn dirac_resolution_is_zero() {
        let report = limit_of_resolution(&make_dirac(0.7, grid()), 0.01).unwrap();
        assert_eq!(report.gamma, 0.0);
        assert_eq!(report.method, "bisection");
    }

    #[test]
    fn two_atom_resolution_is_the_separation() {
        let d = 0.8;
        let rho = mix(&[
            (0.5, make_dirac(-d, grid())),
            (0.5, make_dirac(d, grid())),
        ])
        .unwrap();
        let report = limit_of_resolution(&rho, 0.01).unwrap();
        assert!(
            (report.gamma - 2.0 * d).abs() <= 0.01 + 1e-12,
            "gamma {}",
            report.gamma
        );
    }

    #[test]
    fn report_brackets_the_crossing() {
        let rho = make_gaussian(0.0, 1.0, grid()).unwrap();
        let report = limit_of_resolution(&rho, 5e-3).unwrap();
        assert!(is_alpha_regular(&rho, report.gamma + report.tolerance));
        assert!(!is_alpha_regular(&rho, report.gamma - report.tolerance));
    }

    #[test]
    fn curve_is_monotone() {
        let rho = mix(&[
            (0.5, make_gaussian(0.3, 0.8, grid()).unwrap()),
            (0.5, make_dirac(-0.4, grid())),
        ])
        .unwrap();
        let report = limit_of_resolution(&rho, 0.01).unwrap();
        for w in report.curve.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-12, "curve dips at {}", w[1].0);
        }
    }

    #[test]
    fn tolerance_must_respect_the_grid() {
        let rho = make_gaussian(0.0, 1.0, grid()).unwrap();
        assert!(matches!(
            limit_of_resolution(&rho, grid().dx() / 8.0),
            Err(Error::InvalidParameter { name: "tol", .. })
        ));
    }

    #[test]
    fn trivial_report_round_trips_as_inf() {
        let report = trivial_resolution();
        assert!(report.gamma.is_infinite());
        assert!(report.curve.is_empty());
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"gamma\":\"inf\""));
        let back: ResolutionReport = serde_json::from_str(&json).unwrap();
        assert!(back.gamma.is_infinite());
    }

    #[test]
    fn report_serialization_shape() {
        let report = limit_of_resolution(&make_dirac(0.0, grid()), 0.05).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.starts_with("{\"gamma\":0.0,\"tolerance\":0.05,\"method\":\"bisection\",\"curve\":[["));
        let back: ResolutionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.gamma, 0.0);
    }
}

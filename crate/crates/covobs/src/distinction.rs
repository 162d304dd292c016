//! State-distinction preorder on smeared position observables. A smearing
//! distinguishes less than another exactly when its characteristic
//! function's support is contained in the other's, and band-limited
//! witness states make a strict gap observable.

use crate::charfn::char_fn;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, MixedState, WaveFunction};
use crate::measure::Measure1D;
use crate::observable::{outcome_distribution, Observable1D};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Ordering of two smearings by what they let an observer distinguish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    LeftLessEq,
    RightLessEq,
    Equivalent,
    Incomparable,
}

/// Outcome of a support comparison. The threshold is part of the verdict:
/// values below it are indistinguishable from zero, so every relation is
/// only meaningful relative to it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistinctionVerdict {
    pub relation: Relation,
    pub threshold: f64,
    pub left_support: Vec<(f64, f64)>,
    pub right_support: Vec<(f64, f64)>,
}

/// `a` included in `b` once every `b` interval is dilated by `slack` and
/// overlapping intervals are merged.
fn included_with_slack(a: &[(f64, f64)], b: &[(f64, f64)], slack: f64) -> bool {
    let tiny = 1e-9 * slack;
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(b.len());
    for &(lo, hi) in b {
        let (lo, hi) = (lo - slack, hi + slack);
        match merged.last_mut() {
            Some(last) if lo <= last.1 + tiny => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    a.iter().all(|&(lo, hi)| {
        merged
            .iter()
            .any(|&(mlo, mhi)| lo >= mlo - tiny && hi <= mhi + tiny)
    })
}

/// Compares two smearings on a shared frequency window. Inclusion is
/// tested with one lattice step of slack on each side.
pub fn compare(
    rho1: &Measure1D,
    rho2: &Measure1D,
    threshold: f64,
    xi_max: f64,
    n_xi: usize,
) -> Result<DistinctionVerdict> {
    let left = char_fn(rho1, xi_max, n_xi)?.with_threshold(threshold);
    let right = char_fn(rho2, xi_max, n_xi)?.with_threshold(threshold);
    let left_support = left.support();
    let right_support = right.support();
    let slack = left.step();
    let l_in_r = included_with_slack(&left_support, &right_support, slack);
    let r_in_l = included_with_slack(&right_support, &left_support, slack);
    let relation = match (l_in_r, r_in_l) {
        (true, true) => Relation::Equivalent,
        (true, false) => Relation::LeftLessEq,
        (false, true) => Relation::RightLessEq,
        (false, false) => Relation::Incomparable,
    };
    Ok(DistinctionVerdict {
        relation,
        threshold,
        left_support,
        right_support,
    })
}

/// True when the smearing sits in the top equivalence class: its
/// characteristic function stays above threshold over the whole tested
/// window (gaps of at most two lattice steps are ignored).
pub fn is_maximal_class(
    rho: &Measure1D,
    threshold: f64,
    xi_max: f64,
    n_xi: usize,
) -> Result<bool> {
    Ok(char_fn(rho, xi_max, n_xi)?
        .with_threshold(threshold)
        .covers_range(2))
}

/// Pair of unit-norm states whose position densities differ only inside a
/// frequency band: momentum profiles are the odd and even combinations of
/// the indicator of [a, b], brought back by the inverse Fourier transform.
pub fn witness_states(a: f64, b: f64, grid: GridSpec) -> Result<(WaveFunction, WaveFunction)> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "a",
            message: format!("band start must be finite and >= 0, got {a}"),
        });
    }
    if !(b > a && b.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "b",
            message: format!("band end must exceed the start, got {b}"),
        });
    }
    let nyquist = std::f64::consts::PI / grid.dx();
    if 2.0 * b >= nyquist {
        return Err(Error::InvalidParameter {
            name: "b",
            message: format!("band needs 2b < {nyquist:.6} on this grid, got 2b = {}", 2.0 * b),
        });
    }
    let conj = grid.conjugate();
    let dp = conj.dx();
    let amp = 1.0 / (2.0 * (b - a)).sqrt();
    // cell-coverage sampling: |value|^2 * dp reproduces the interval mass
    // exactly, so the discrete norm is 1 up to rounding
    let sample = |values: &mut Vec<Complex64>, lo: f64, hi: f64, sign: f64| {
        for k in 0..conj.n {
            let cell_lo = conj.x(k) - 0.5 * dp;
            let cell_hi = cell_lo + dp;
            let overlap = (hi.min(cell_hi) - lo.max(cell_lo)).max(0.0) / dp;
            if overlap > 0.0 {
                values[k] += Complex64::new(sign * amp * overlap.sqrt(), 0.0);
            }
        }
    };
    let build = |sign: f64| -> Result<WaveFunction> {
        let mut values = vec![Complex64::new(0.0, 0.0); conj.n];
        sample(&mut values, a, b, 1.0);
        sample(&mut values, -b, -a, sign);
        Ok(WaveFunction::from_values(conj, values)?
            .normalized()
            .inverse_fourier())
    };
    Ok((build(-1.0)?, build(1.0)?))
}

const BLIND_TV_MAX: f64 = 1e-6;
const SEPARATION_TV_MIN: f64 = 0.05;

/// Two total-variation distances for one witness pair: the right smearing
/// cannot tell the states apart, the left one can.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationReport {
    pub a: f64,
    pub b: f64,
    pub tv_under_left: f64,
    pub tv_under_right: f64,
    pub pass: bool,
}

fn band_inside(band: (f64, f64), support: &[(f64, f64)], slack: f64) -> bool {
    included_with_slack(&[band], support, slack)
}

fn band_disjoint(band: (f64, f64), support: &[(f64, f64)], slack: f64) -> bool {
    support
        .iter()
        .all(|&(lo, hi)| band.1 < lo - slack || band.0 > hi + slack)
}

/// Builds the witness pair for the band [a, b] and verifies that outcomes
/// under the right smearing agree (TV <= 1e-6) while outcomes under the
/// left smearing differ (TV >= 0.05). The doubled band +-[2a, 2b] must lie
/// inside the left characteristic support and miss the right one.
pub fn verify_separation(
    rho1: &Measure1D,
    rho2: &Measure1D,
    a: f64,
    b: f64,
    grid: GridSpec,
) -> Result<SeparationReport> {
    let xi_max = 2.5 * b;
    let n_xi = 1024;
    let left = char_fn(rho1, xi_max, n_xi)?;
    let right = char_fn(rho2, xi_max, n_xi)?;
    let slack = left.step();
    let band = (2.0 * a, 2.0 * b);
    let neg_band = (-2.0 * b, -2.0 * a);
    let left_support = left.support();
    let right_support = right.support();
    for band in [band, neg_band] {
        if !band_inside(band, &left_support, slack) {
            return Err(Error::BandSelection {
                message: format!(
                    "band [{}, {}] leaves the left characteristic support",
                    band.0, band.1
                ),
            });
        }
        if !band_disjoint(band, &right_support, 0.0) {
            return Err(Error::BandSelection {
                message: format!(
                    "band [{}, {}] meets the right characteristic support",
                    band.0, band.1
                ),
            });
        }
    }
    let (f1, f2) = witness_states(a, b, grid)?;
    let t1 = MixedState::pure(f1);
    let t2 = MixedState::pure(f2);
    let under = |rho: &Measure1D| -> Result<f64> {
        let obs = Observable1D::position(rho.clone());
        let p1 = outcome_distribution(&obs, &t1)?;
        let p2 = outcome_distribution(&obs, &t2)?;
        Ok(p1.tv_distance(&p2))
    };
    let tv_under_left = under(rho1)?;
    let tv_under_right = under(rho2)?;
    Ok(SeparationReport {
        a,
        b,
        tv_under_left,
        tv_under_right,
        pass: tv_under_right <= BLIND_TV_MAX && tv_under_left >= SEPARATION_TV_MIN,
    })
}

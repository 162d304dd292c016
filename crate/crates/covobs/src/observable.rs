//! Smeared position/momentum observables: outcome statistics, effect norms
//! on interval unions, regularity, the translation/boost symmetry battery,
//! and the dilation (sharpness) classification.

use crate::error::{Error, Result};
use crate::grid::{momentum_distribution, position_distribution, MixedState, WaveFunction};
use crate::measure::{convolve, make_dirac, Measure1D};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Which marginal of the state the observable smears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Position,
    Momentum,
}

/// A covariant observable, represented by its classifying smear measure:
/// outcomes are the state's position (or momentum) distribution convolved
/// with `smear`. For `Momentum`, the smear lives on the conjugate grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Observable1D {
    pub kind: Axis,
    pub smear: Measure1D,
}

impl Observable1D {
    pub fn position(smear: Measure1D) -> Self {
        Observable1D {
            kind: Axis::Position,
            smear,
        }
    }

    pub fn momentum(smear: Measure1D) -> Self {
        Observable1D {
            kind: Axis::Momentum,
            smear,
        }
    }
}

/// Finite union of disjoint closed intervals, sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidParameter {
                name: "intervals",
                message: "need at least one interval".into(),
            });
        }
        for (a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::InvalidParameter {
                    name: "intervals",
                    message: format!("bad interval [{a}, {b}]"),
                });
            }
        }
        intervals.sort_by(|u, v| u.0.total_cmp(&v.0));
        for w in intervals.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(Error::InvalidParameter {
                    name: "intervals",
                    message: format!(
                        "intervals [{}, {}] and [{}, {}] are not disjoint",
                        w[0].0, w[0].1, w[1].0, w[1].1
                    ),
                });
            }
        }
        Ok(IntervalUnion { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Closure of `[lo, hi] \ self`. Shared endpoints stay in both sets;
    /// that only matters for atoms sitting exactly on a boundary.
    pub fn complement_within(&self, lo: f64, hi: f64) -> Result<IntervalUnion> {
        let mut pieces = Vec::new();
        let mut cursor = lo;
        for &(a, b) in &self.intervals {
            if a > cursor && a <= hi {
                pieces.push((cursor, a.min(hi)));
            }
            cursor = cursor.max(b);
        }
        if cursor < hi {
            pieces.push((cursor, hi));
        }
        IntervalUnion::new(pieces)
    }
}

/// Outcome distribution of the observable in state `state`.
pub fn outcome_distribution(obs: &Observable1D, state: &MixedState) -> Result<Measure1D> {
    let base = match obs.kind {
        Axis::Position => position_distribution(state),
        Axis::Momentum => momentum_distribution(state),
    };
    convolve(&base, &obs.smear)
}

/// Norm of the effect on `x_set`: `sup_x smear(X - x)`.
///
/// Candidates mirror the single-window sliding supremum: every node, every
/// atom pushed just inside either edge of every interval, atoms centered,
/// and interval edges flush with the density support edges.
pub fn effect_sup(obs: &Observable1D, x_set: &IntervalUnion) -> f64 {
    let rho = &obs.smear;
    let cdf = rho.cdf();
    let eta = rho.grid.dx() / 16.0;
    let mut best = 0.0f64;
    let mut try_shift = |x: f64| {
        let mut mass = 0.0;
        for &(a, b) in x_set.intervals() {
            mass += cdf.window_mass(a - x, b - x);
        }
        if mass > best {
            best = mass;
        }
    };
    for j in 0..rho.grid.n {
        try_shift(rho.grid.x(j));
    }
    for &(a, b) in x_set.intervals() {
        for &(t, _) in &rho.atoms {
            try_shift(a - t + eta);
            try_shift(b - t - eta);
            try_shift(0.5 * (a + b) - t);
        }
        if let Some((lo, hi)) = cdf.density_support() {
            try_shift(a - lo);
            try_shift(a - hi);
            try_shift(b - lo);
            try_shift(b - hi);
        }
    }
    best.clamp(0.0, 1.0)
}

/// True when the effect's spectrum reaches both above and below 1/2:
/// both `X` and its complement have effect norm exceeding 1/2.
pub fn is_regular_effect(obs: &Observable1D, x_set: &IntervalUnion) -> bool {
    if effect_sup(obs, x_set) <= 0.5 {
        return false;
    }
    let pad = obs.smear.grid.length;
    let lo = obs.smear.grid.x_min().min(x_set.intervals()[0].0) - pad;
    let hi = obs
        .smear
        .grid
        .x_max()
        .max(x_set.intervals().last().unwrap().1)
        + pad;
    match x_set.complement_within(lo, hi) {
        Ok(c) => effect_sup(obs, &c) > 0.5,
        Err(_) => false, // x_set swallows the whole padded range
    }
}

/// Result of the translation/boost symmetry battery.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatteryReport {
    pub max_deviation: f64,
    pub trials: usize,
    pub seed: u64,
    pub pass: bool,
}

/// Checks covariance under the shifting symmetry (node-aligned shifts) and
/// invariance under the conjugate one (arbitrary values), on random states.
/// Passes at sup deviation <= 1e-7.
pub fn covariance_battery(obs: &Observable1D, trials: usize, seed: u64) -> Result<BatteryReport> {
    battery_impl(obs, trials, seed, None)
}

/// Negative control: the transformed branch smears with a kernel shifted by
/// `fault_shift`, so a working battery must fail it.
pub fn covariance_battery_with_fault(
    obs: &Observable1D,
    trials: usize,
    seed: u64,
    fault_shift: f64,
) -> Result<BatteryReport> {
    battery_impl(obs, trials, seed, Some(fault_shift))
}

fn battery_impl(
    obs: &Observable1D,
    trials: usize,
    seed: u64,
    fault: Option<f64>,
) -> Result<BatteryReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            message: "need at least one trial".into(),
        });
    }
    let state_grid = match obs.kind {
        Axis::Position => obs.smear.grid,
        Axis::Momentum => obs.smear.grid.conjugate(),
    };
    // the covariant shift acts on the axis the smear lives on
    let shift_step = obs.smear.grid.dx();
    let max_steps = (4.0 / shift_step).floor() as i64;
    let faulty = match fault {
        Some(t) => Some(Observable1D {
            kind: obs.kind,
            smear: convolve(&obs.smear, &make_dirac(t, obs.smear.grid))?,
        }),
        None => None,
    };
    let transformed_obs = faulty.as_ref().unwrap_or(obs);

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut max_deviation = 0.0f64;
    for _ in 0..trials {
        let psi = random_state(&mut rng, state_grid)?;
        let state = MixedState::pure(psi.clone());
        let base = outcome_distribution(obs, &state)?;

        let shift = rng.random_range(-max_steps..=max_steps) as f64 * shift_step;
        let other = rng.random_range(-3.0..3.0);
        let (shifted_psi, invariant_psi) = match obs.kind {
            Axis::Position => (psi.translate(shift)?, psi.boost(other)?),
            Axis::Momentum => (psi.boost(shift)?, psi.translate(other)?),
        };

        let cov = outcome_distribution(transformed_obs, &MixedState::pure(shifted_psi))?;
        let expected = base.translated(shift)?;
        max_deviation = max_deviation.max(measure_deviation(&cov, &expected));

        let inv = outcome_distribution(transformed_obs, &MixedState::pure(invariant_psi))?;
        max_deviation = max_deviation.max(measure_deviation(&inv, &base));
    }
    Ok(BatteryReport {
        max_deviation,
        trials,
        seed,
        pass: max_deviation <= 1e-7,
    })
}

fn random_state(rng: &mut ChaCha12Rng, grid: crate::grid::GridSpec) -> Result<WaveFunction> {
    let center = rng.random_range(-2.0..2.0);
    if rng.random_range(0..3) < 2 {
        let sigma = rng.random_range(0.5..1.5);
        WaveFunction::gaussian(grid, center, sigma)
    } else {
        let k = rng.random_range(1..=5);
        let scale = rng.random_range(0.7..1.3);
        WaveFunction::hermite(grid, k, center, scale)
    }
}

/// Sup distance between densities plus total atom weight mismatch.
fn measure_deviation(a: &Measure1D, b: &Measure1D) -> f64 {
    let sup = a
        .density
        .iter()
        .zip(&b.density)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let mut atom_part = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.atoms.len() || j < b.atoms.len() {
        let (ta, wa) = a.atoms.get(i).copied().unwrap_or((f64::INFINITY, 0.0));
        let (tb, wb) = b.atoms.get(j).copied().unwrap_or((f64::INFINITY, 0.0));
        if (ta - tb).abs() <= 1e-9 * ta.abs().max(1.0) {
            atom_part += (wa - wb).abs();
            i += 1;
            j += 1;
        } else if ta < tb {
            atom_part += wa;
            i += 1;
        } else {
            atom_part += wb;
            j += 1;
        }
    }
    sup + atom_part
}

/// Sharpness classification by the structure of the classifying measure.
#[derive(Debug, Clone, PartialEq)]
pub enum DilationClass {
    /// The smear is a single atom at `t`; `scaling_residual` is the sup
    /// distance (over a frequency window) between the outcome transform of
    /// a scale-transformed probe state and the rescaled outcome transform.
    SharpAt { t: f64, scaling_residual: f64 },
    /// Some small interval has effect norm strictly below 1: the witness
    /// interval and its norm.
    NotDilationCovariant { witness: (f64, f64), sup: f64 },
}

/// Classifies `obs` as sharp (single-atom smear) or not, and backs the
/// verdict numerically: sharp observables get the scale-commutation residual
/// of [`scaling_residual`] (small-interval effect norms are checked to be 1
/// along the way); everything else gets a witness interval whose effect norm
/// stays below 1.
pub fn dilation_classification(obs: &Observable1D) -> Result<DilationClass> {
    let rho = &obs.smear;
    let dx = rho.grid.dx();
    let density_mass = rho.density.iter().sum::<f64>() * dx;
    if rho.atoms.len() == 1 && density_mass < 1e-9 {
        let t = rho.atoms[0].0;
        // condition check: every small interval still has full effect norm
        for width in [dx, 16.0 * dx, 1.0] {
            for center in [-1.3, 0.0, 2.7] {
                let u = IntervalUnion::interval(center - 0.5 * width, center + 0.5 * width)?;
                let sup = effect_sup(obs, &u);
                if sup < 1.0 - 1e-9 {
                    return Ok(DilationClass::NotDilationCovariant {
                        witness: (center - 0.5 * width, center + 0.5 * width),
                        sup,
                    });
                }
            }
        }
        let residual = [0.5, 2.0]
            .iter()
            .map(|&a| scaling_residual(obs, t, a))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        return Ok(DilationClass::SharpAt {
            t,
            scaling_residual: residual,
        });
    }
    // ascending widths: report the first interval whose effect norm is
    // clearly below 1 (exists whenever the smear is not a single atom)
    let mut witness = ((0.0, dx), effect_sup(obs, &IntervalUnion::interval(0.0, dx)?));
    let mut width = dx;
    while witness.1 > 1.0 - 1e-8 && width < rho.grid.length {
        width *= 2.0;
        let u = IntervalUnion::interval(0.0, width)?;
        let sup = effect_sup(obs, &u);
        if sup < witness.1 {
            witness = ((0.0, width), sup);
        }
    }
    Ok(DilationClass::NotDilationCovariant {
        witness: witness.0,
        sup: witness.1,
    })
}

/// Scale-commutation residual for a (claimed) sharp observable at `t`:
/// transforms a probe state by the unitary scaling anchored at `-t`, and
/// compares the outcome transform against the frequency-rescaled outcome
/// transform of the untransformed probe, on `|xi| <= 8`.
///
/// The identity is a statement about the classifying measure, so it is
/// evaluated on the smear's own grid regardless of the observable's axis.
pub fn scaling_residual(obs: &Observable1D, t: f64, a: f64) -> Result<f64> {
    let probe_obs = Observable1D::position(obs.smear.clone());
    let grid = obs.smear.grid;
    let psi = WaveFunction::gaussian(grid, -t, 0.75)?;
    let nu0 = outcome_distribution(&probe_obs, &MixedState::pure(psi.clone()))?;
    let scaled = psi.dilate(a, -t)?;
    let nu1 = outcome_distribution(&probe_obs, &MixedState::pure(scaled))?;
    let mut worst = 0.0f64;
    for i in 0..=128 {
        let xi = -8.0 + i as f64 * (16.0 / 128.0);
        let d = (nu1.char_eval(xi) - nu0.char_eval(a * xi)).norm();
        worst = worst.max(d);
    }
    Ok(worst)
}

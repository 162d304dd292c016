//! Characteristic functions on a frequency lattice, support detection, and
//! the band-limited (sinc-type) smearing kernel built from them.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, WaveFunction};
use crate::measure::Measure1D;
use num_complex::Complex64;

/// Sampled characteristic function. `freqs` is a symmetric lattice of
/// multiples of the grid's conjugate step (odd count, includes 0), so that
/// lattice-periodic cancellations in hat measures are hit exactly instead of
/// being straddled.
#[derive(Debug, Clone)]
pub struct CharFn {
    pub freqs: Vec<f64>,
    pub values: Vec<Complex64>,
    /// modulus level below which a frequency counts as outside the support
    pub threshold: f64,
}

/// Evaluate the characteristic function of `rho` on a symmetric lattice
/// reaching (about) `xi_max`, with at most `n_xi + 1` points.
///
/// The lattice step is the smallest multiple of `2*pi/L` that keeps the
/// count within `n_xi`; the end point snaps to the nearest lattice multiple
/// of `xi_max`.
pub fn char_fn(rho: &Measure1D, xi_max: f64, n_xi: usize) -> Result<CharFn> {
    if n_xi < 64 {
        return Err(Error::InvalidParameter {
            name: "n_xi",
            message: format!("need at least 64 frequency points, got {n_xi}"),
        });
    }
    if !(xi_max.is_finite() && xi_max > 0.0) {
        return Err(Error::InvalidParameter {
            name: "xi_max",
            message: format!("must be positive, got {xi_max}"),
        });
    }
    let base = rho.grid.dp();
    let half = (n_xi / 2) as i64;
    let m_max = ((xi_max / base).round() as i64).max(1);
    let stride = (m_max + half - 1) / half; // ceil division
    let reach = m_max / stride;
    let step = stride as f64 * base;
    let freqs: Vec<f64> = (-reach..=reach).map(|m| m as f64 * step).collect();
    let values = freqs.iter().map(|&xi| rho.char_eval(xi)).collect();
    Ok(CharFn {
        freqs,
        values,
        threshold: 1e-6,
    })
}

impl CharFn {
    pub fn with_threshold(mut self, threshold: f64) -> CharFn {
        self.threshold = threshold;
        self
    }

    pub fn step(&self) -> f64 {
        if self.freqs.len() < 2 {
            return 0.0;
        }
        self.freqs[1] - self.freqs[0]
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.values[self.freqs.len() / 2]
    }

    /// Maximal runs of lattice points with modulus above the threshold,
    /// reported as closed frequency intervals. Symmetrized so that roundoff
    /// cannot produce an asymmetric support for a real measure.
    pub fn support(&self) -> Vec<(f64, f64)> {
        let n = self.values.len();
        let on: Vec<bool> = (0..n)
            .map(|i| {
                self.values[i].norm() > self.threshold
                    || self.values[n - 1 - i].norm() > self.threshold
            })
            .collect();
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &v) in on.iter().enumerate() {
            match (v, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push((self.freqs[s], self.freqs[i - 1]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((self.freqs[s], self.freqs[n - 1]));
        }
        runs
    }

    /// Radius of the smallest symmetric interval containing the support
    /// (`None` when every point is below the threshold).
    pub fn support_radius(&self) -> Option<f64> {
        let runs = self.support();
        runs.iter()
            .map(|(a, b)| a.abs().max(b.abs()))
            .fold(None, |acc: Option<f64>, r| {
                Some(acc.map_or(r, |a| a.max(r)))
            })
    }

    /// True when no below-threshold gap longer than `max_gap` lattice steps
    /// occurs anywhere, edges included.
    pub fn covers_range(&self, max_gap: usize) -> bool {
        let n = self.values.len();
        let mut gap = 0usize;
        for i in 0..n {
            let on = self.values[i].norm() > self.threshold
                || self.values[n - 1 - i].norm() > self.threshold;
            if on {
                gap = 0;
            } else {
                gap += 1;
                if gap > max_gap {
                    return false;
                }
            }
        }
        true
    }
}

/// Smearing kernel whose characteristic function lives on `[-a, a]`:
/// the squared modulus of the normalized inverse transform of the flat
/// momentum window of width `a`.
///
/// The window is sampled on the conjugate grid with fractional edge cells,
/// normalized to unit discrete L2 norm, and transformed; the tail of the
/// ideal kernel that falls outside the window of length L is therefore
/// folded back in (logged below), and the total mass is exactly 1.
pub fn sinc_measure(a: f64, grid: GridSpec) -> Result<Measure1D> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter {
            name: "a",
            message: format!("band width must be positive, got {a}"),
        });
    }
    let dx = grid.dx();
    let max_dx = std::f64::consts::PI / (4.0 * a);
    if dx > max_dx {
        return Err(Error::ResolutionTooCoarse { dx, max: max_dx });
    }
    let conj = grid.conjugate();
    let dp = conj.dx();
    let amp = 1.0 / a.sqrt();
    let mut values = vec![Complex64::new(0.0, 0.0); conj.n];
    for (k, v) in values.iter_mut().enumerate() {
        let lo = conj.x(k) - 0.5 * dp;
        let hi = conj.x(k) + 0.5 * dp;
        let overlap = (hi.min(0.5 * a) - lo.max(-0.5 * a)).max(0.0);
        *v = Complex64::new(amp * overlap / dp, 0.0);
    }
    let h = WaveFunction::from_values(conj, values)?.normalized();
    let f = h.inverse_fourier();
    let folded_tail = 4.0 / (std::f64::consts::PI * a * grid.length);
    log::debug!(
        "band-limited kernel a={a}: ~{folded_tail:.1e} of the ideal tail mass folds back into the window"
    );
    let density = f.values.iter().map(|v| v.norm_sqr()).collect();
    Ok(Measure1D::from_parts(grid, density, Vec::new()))
}

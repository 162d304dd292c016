//! Uniform centered grids, wavefunctions, mixtures, and the basic unitaries.
//!
//! Conventions, fixed once and used everywhere:
//! - position nodes `x_j = -L/2 + j*dx` with `dx = L/n`, so `x_{n/2} = 0` is
//!   always a node;
//! - conjugate nodes `p_k = (k - n/2)*dp` with `dp = 2*pi/L`, so
//!   `dx*dp*n = 2*pi` holds by construction;
//! - transform `psi_hat(p) = (2*pi)^{-1/2} Int psi(x) e^{-i p x} dx`, the sign
//!   chosen so that `fourier(translate(psi, q)) = boost(fourier(psi), -q)`.
//!
//! With both grids centered this way, `p_0 * (j*dx) = -pi*j` and
//! `(k*dp) * x_0 = -pi*k` exactly, so the continuum transform reduces to an
//! FFT with `(-1)^j` / `(-1)^k` sign flips — no trigonometric phase factors,
//! hence no phase roundoff. (Requires `n % 4 == 0`, true for every power of
//! two >= 8.)

use crate::error::{Error, Result};
use crate::fft;
use crate::measure::Measure1D;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const SQRT_2PI: f64 = 2.506628274631000502415765284811;

/// Uniform centered grid: `n` nodes (power of two, >= 8) spanning `length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "n",
                message: format!("grid size must be a power of two >= 8, got {n}"),
            });
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "length",
                message: format!("grid length must be positive and finite, got {length}"),
            });
        }
        Ok(Self { n, length })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dx()
    }

    pub fn x_min(&self) -> f64 {
        -0.5 * self.length
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    /// The grid the Fourier transform of a wavefunction on `self` lives on.
    pub fn conjugate(&self) -> GridSpec {
        GridSpec {
            n: self.n,
            length: self.n as f64 * self.dp(),
        }
    }

    /// Tolerant grid equality: conjugating twice must land back "here".
    pub fn compatible(&self, other: &GridSpec) -> bool {
        self.n == other.n
            && (self.length - other.length).abs() <= 1e-12 * self.length.abs().max(other.length.abs())
    }

    /// `Some(m)` when `t` is (within 1e-9*dx) the node offset `m*dx`.
    pub fn aligned_offset(&self, t: f64) -> Option<i64> {
        let dx = self.dx();
        let m = (t / dx).round();
        if (t - m * dx).abs() <= 1e-9 * dx && m.abs() < (self.n as f64) * 2.0 {
            Some(m as i64)
        } else {
            None
        }
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn nearest_node(&self, x: f64) -> usize {
        let j = ((x - self.x_min()) / self.dx()).round();
        (j.max(0.0) as usize).min(self.n - 1)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }
}

fn require_compatible(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a.compatible(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            n_a: a.n,
            len_a: a.length,
            n_b: b.n,
            len_b: b.length,
        })
    }
}

/// Complex amplitudes sampled at the grid nodes; units length^(-1/2).
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidParameter {
                name: "values",
                message: format!("expected {} samples, got {}", grid.n, values.len()),
            });
        }
        Ok(Self { grid, values })
    }

    /// Normalized Gaussian packet whose position density is N(center, sigma^2).
    pub fn gaussian(grid: GridSpec, center: f64, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                message: format!("must be positive, got {sigma}"),
            });
        }
        check_coverage(&grid, center, 6.0 * sigma)?;
        let values = grid
            .xs()
            .iter()
            .map(|&x| {
                let u = (x - center) / (2.0 * sigma);
                Complex64::new((-u * u).exp(), 0.0)
            })
            .collect();
        Ok(Self { grid, values }.normalized())
    }

    /// Normalized Hermite-function state of index `k`, centered and scaled.
    pub fn hermite(grid: GridSpec, k: usize, center: f64, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter {
                name: "scale",
                message: format!("must be positive, got {scale}"),
            });
        }
        if k > 16 {
            return Err(Error::InvalidParameter {
                name: "k",
                message: format!("hermite index limited to 16, got {k}"),
            });
        }
        // classical turning point ~ sqrt(2k+1) in scaled units, plus margin
        check_coverage(&grid, center, scale * ((2.0 * k as f64 + 1.0).sqrt() + 5.0))?;
        let values = grid
            .xs()
            .iter()
            .map(|&x| {
                let u = (x - center) / scale;
                let mut hm1 = 0.0f64;
                let mut h = (-0.5 * u * u).exp();
                for m in 0..k {
                    let m = m as f64;
                    let next = u * (2.0 / (m + 1.0)).sqrt() * h - (m / (m + 1.0)).sqrt() * hm1;
                    hm1 = h;
                    h = next;
                }
                Complex64::new(h, 0.0)
            })
            .collect();
        Ok(Self { grid, values }.normalized())
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.dx()).sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for v in &mut self.values {
                *v *= inv;
            }
        }
        self
    }

    /// L2 inner product, conjugate-linear in `self`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        require_compatible(&self.grid, &other.grid)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.dx())
    }

    /// Sup-norm distance of amplitudes (same grid assumed by caller).
    pub fn sup_distance(&self, other: &WaveFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Fourier–Plancherel transform onto the conjugate grid.
    pub fn fourier(&self) -> WaveFunction {
        let n = self.grid.n;
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| if j & 1 == 1 { -v } else { *v })
            .collect();
        fft::forward(&mut buf);
        let scale = self.grid.dx() / SQRT_2PI;
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= if k & 1 == 1 { -scale } else { scale };
        }
        WaveFunction {
            grid: self.grid.conjugate(),
            values: buf,
        }
        .with_n_checked(n)
    }

    /// Inverse of [`fourier`]: back from the conjugate grid.
    pub fn inverse_fourier(&self) -> WaveFunction {
        let n = self.grid.n;
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| if k & 1 == 1 { -v } else { *v })
            .collect();
        fft::inverse(&mut buf);
        let scale = self.grid.dx() * n as f64 / SQRT_2PI;
        for (j, v) in buf.iter_mut().enumerate() {
            *v *= if j & 1 == 1 { -scale } else { scale };
        }
        WaveFunction {
            grid: self.grid.conjugate(),
            values: buf,
        }
    }

    fn with_n_checked(self, n: usize) -> Self {
        debug_assert_eq!(self.values.len(), n);
        self
    }

    /// U(q): shift by `q`, done spectrally (exact for band-limited states).
    pub fn translate(&self, q: f64) -> Result<WaveFunction> {
        let max = self.grid.length / 4.0;
        if !(q.is_finite() && q.abs() < max) {
            return Err(Error::ShiftTooLarge { shift: q, max });
        }
        let mut phat = self.fourier();
        let pgrid = phat.grid;
        for (k, v) in phat.values.iter_mut().enumerate() {
            *v *= Complex64::from_polar(1.0, -pgrid.x(k) * q);
        }
        let mut out = phat.inverse_fourier();
        out.grid = self.grid;
        Ok(out)
    }

    /// V(p): pointwise phase `e^{i p x}`; moduli untouched.
    pub fn boost(&self, p: f64) -> Result<WaveFunction> {
        if !p.is_finite() {
            return Err(Error::InvalidParameter {
                name: "p",
                message: "boost must be finite".into(),
            });
        }
        let nyquist = PI / self.grid.dx();
        let reach = self.momentum_reach(1e-9);
        if p.abs() + reach > nyquist * (1.0 + 1e-12) {
            return Err(Error::Aliasing {
                boost: p,
                reach: p.abs() + reach,
                nyquist,
            });
        }
        let values = self
            .values
            .iter()
            .zip(self.grid.xs())
            .map(|(v, x)| v * Complex64::from_polar(1.0, p * x))
            .collect();
        Ok(WaveFunction {
            grid: self.grid,
            values,
        })
    }

    /// Largest |p_k| carrying amplitude above `rel` times the spectral peak.
    pub fn momentum_reach(&self, rel: f64) -> f64 {
        let phat = self.fourier();
        let peak = phat.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let cut = rel * peak;
        let mut reach = 0.0f64;
        for (k, v) in phat.values.iter().enumerate() {
            if v.norm() > cut {
                reach = reach.max(phat.grid.x(k).abs());
            }
        }
        reach
    }

    /// A_t(a): `(1/sqrt(a)) psi(a^{-1}(x-t)+t)` by band-limited synthesis.
    pub fn dilate(&self, a: f64, t: f64) -> Result<WaveFunction> {
        if !(a.is_finite() && (0.125..=8.0).contains(&a)) {
            return Err(Error::InvalidParameter {
                name: "a",
                message: format!("dilation factor must lie in [1/8, 8], got {a}"),
            });
        }
        if a == 1.0 {
            return Ok(self.clone());
        }
        let grid = self.grid;
        let n = grid.n;
        let dx = grid.dx();

        // mass that the map x -> t + a(x-t) would carry off the grid
        let mut lost_x = 0.0;
        for (j, v) in self.values.iter().enumerate() {
            let mapped = t + a * (grid.x(j) - t);
            if mapped < grid.x_min() || mapped > grid.x_max() {
                lost_x += v.norm_sqr() * dx;
            }
        }
        if lost_x > 1e-9 {
            return Err(Error::SupportOverflow {
                context: "dilate",
                lost: lost_x,
            });
        }

        let phat = self.fourier();
        let pgrid = phat.grid;
        let dp = pgrid.dx();
        if a < 1.0 {
            // contracting in x expands the bandwidth by 1/a
            let cutoff = a * (PI / dx);
            let mut lost_p = 0.0;
            for (k, v) in phat.values.iter().enumerate() {
                if pgrid.x(k).abs() > cutoff {
                    lost_p += v.norm_sqr() * dp;
                }
            }
            if lost_p > 1e-9 {
                return Err(Error::SupportOverflow {
                    context: "dilate bandwidth",
                    lost: lost_p,
                });
            }
        }

        // synthesize (1/sqrt(a)) * sum_k phat_k e^{i p_k y_j} dp / sqrt(2 pi)
        // at y_j = (x_j - t)/a + t, in chunks with fresh phases every 512 steps
        const RESYNC: usize = 512;
        let scale = dp / (SQRT_2PI * a.sqrt());
        let p_lo = pgrid.x(0);
        let mut values = Vec::with_capacity(n);
        for j in 0..n {
            let y = (grid.x(j) - t) / a + t;
            // outside the fundamental domain the synthesis is periodic, not
            // small; the true state carries no mass there, so write zero
            if !(-0.5 * grid.length..0.5 * grid.length).contains(&y) {
                values.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let rot = Complex64::from_polar(1.0, dp * y);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut k = 0;
            while k < n {
                let mut c = Complex64::from_polar(1.0, (p_lo + k as f64 * dp) * y);
                let end = (k + RESYNC).min(n);
                while k < end {
                    acc += phat.values[k] * c;
                    c *= rot;
                    k += 1;
                }
            }
            values.push(acc * scale);
        }
        Ok(WaveFunction { grid, values })
    }
}

fn check_coverage(grid: &GridSpec, center: f64, halfwidth: f64) -> Result<()> {
    let have = 0.5 * grid.length;
    let needed = center.abs() + halfwidth;
    if needed > have {
        return Err(Error::GridTooSmall { needed, have });
    }
    Ok(())
}

/// Finite convex mixture of pure states on one grid.
#[derive(Debug, Clone)]
pub struct MixedState {
    pub components: Vec<(f64, WaveFunction)>,
}

impl MixedState {
    pub fn new(components: Vec<(f64, WaveFunction)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter {
                name: "components",
                message: "mixture needs at least one component".into(),
            });
        }
        let grid = components[0].1.grid;
        let mut sum = 0.0;
        for (w, psi) in &components {
            if !(*w > 0.0) {
                return Err(Error::NonConvexWeights { sum: *w });
            }
            require_compatible(&grid, &psi.grid)?;
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NonConvexWeights { sum });
        }
        Ok(Self { components })
    }

    pub fn pure(psi: WaveFunction) -> Self {
        Self {
            components: vec![(1.0, psi)],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.components[0].1.grid
    }

    /// Componentwise Fourier transform (weights unchanged).
    pub fn fourier(&self) -> MixedState {
        MixedState {
            components: self
                .components
                .iter()
                .map(|(w, psi)| (*w, psi.fourier()))
                .collect(),
        }
    }
}

/// p^{Pi_Q}_T: the canonical position distribution sum_i w_i |phi_i(x)|^2.
pub fn position_distribution(state: &MixedState) -> Measure1D {
    let grid = state.grid();
    let mut density = vec![0.0; grid.n];
    for (w, psi) in &state.components {
        for (d, v) in density.iter_mut().zip(&psi.values) {
            *d += w * v.norm_sqr();
        }
    }
    Measure1D::from_parts(grid, density, Vec::new())
}

/// p^{Pi_P}_T: the same code path applied to the transformed components.
pub fn momentum_distribution(state: &MixedState) -> Measure1D {
    position_distribution(&state.fourier())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> GridSpec {
        GridSpec::new(2048, 40.0).unwrap()
    }

    #[test]
    fn grid_identities() {
        let g = grid();
        assert_abs_diff_eq!(g.dx() * g.dp() * g.n as f64, 2.0 * PI, epsilon = 1e-12);
        assert_eq!(g.x(g.n / 2), 0.0);
        assert!(g.conjugate().conjugate().compatible(&g));
        assert!(GridSpec::new(6, 1.0).is_err());
        assert!(GridSpec::new(24, 1.0).is_err());
    }

    #[test]
    fn gaussian_is_normalized() {
        let psi = WaveFunction::gaussian(grid(), 0.3, 1.2).unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_needs_room() {
        let g = GridSpec::new(64, 4.0).unwrap();
        assert!(matches!(
            WaveFunction::gaussian(g, 0.0, 1.0),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn hermites_are_orthonormal() {
        let g = grid();
        let h0 = WaveFunction::hermite(g, 0, 0.0, 1.0).unwrap();
        let h1 = WaveFunction::hermite(g, 1, 0.0, 1.0).unwrap();
        let h4 = WaveFunction::hermite(g, 4, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(h0.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h4.norm(), 1.0, epsilon = 1e-12);
        assert!(h0.inner(&h1).unwrap().norm() < 1e-12);
        assert!(h1.inner(&h4).unwrap().norm() < 1e-10);
    }

    #[test]
    fn translate_identity_and_inverse() {
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0).unwrap();
        let same = psi.translate(0.0).unwrap();
        assert!(psi.sup_distance(&same) < 1e-14);
        let back = psi.translate(1.3).unwrap().translate(-1.3).unwrap();
        assert!(psi.sup_distance(&back) < 1e-10);
    }

    #[test]
    fn translate_shifts_the_mean() {
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0).unwrap();
        let shifted = psi.translate(1.0).unwrap();
        let m0 = position_distribution(&MixedState::pure(psi)).mean();
        let m1 = position_distribution(&MixedState::pure(shifted)).mean();
        assert_abs_diff_eq!(m1 - m0, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn translate_guards_wraparound() {
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0).unwrap();
        assert!(matches!(
            psi.translate(15.0),
            Err(Error::ShiftTooLarge { .. })
        ));
    }

    #[test]
    fn boost_identity_and_modulus() {
        let psi = WaveFunction::gaussian(grid(), -0.7, 0.8).unwrap();
        let same = psi.boost(0.0).unwrap();
        assert_eq!(psi.sup_distance(&same), 0.0);
        let kicked = psi.boost(2.5).unwrap();
        for (a, b) in psi.values.iter().zip(&kicked.values) {
            // |e^{ipx}| costs one ulp, so relative rather than bitwise
            let d = (a.norm_sqr() - b.norm_sqr()).abs();
            assert!(d <= 1e-12 * a.norm_sqr().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn boost_shifts_mean_momentum() {
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0).unwrap();
        let kicked = psi.boost(1.75).unwrap();
        let m0 = momentum_distribution(&MixedState::pure(psi)).mean();
        let m1 = momentum_distribution(&MixedState::pure(kicked)).mean();
        assert_abs_diff_eq!(m1 - m0, 1.75, epsilon = 1e-8);
    }

    #[test]
    fn boost_guards_aliasing() {
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0).unwrap();
        let nyquist = PI / psi.grid.dx();
        assert!(matches!(
            psi.boost(nyquist),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn fourier_is_unitary_and_self_dual_on_the_vacuum() {
        let sigma = 0.5f64.sqrt();
        let psi = WaveFunction::gaussian(grid(), 0.0, sigma).unwrap();
        let phat = psi.fourier();
        assert_abs_diff_eq!(phat.norm(), 1.0, epsilon = 1e-12);
        // self-dual: the transform is the same gaussian on the conjugate grid
        let reference = WaveFunction::gaussian(phat.grid, 0.0, sigma).unwrap();
        let err: f64 = phat
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * phat.grid.dx();
        assert!(err.sqrt() < 1e-8, "L2 error {}", err.sqrt());
    }

    #[test]
    fn fourier_roundtrip() {
        let psi = WaveFunction::hermite(grid(), 3, 0.4, 0.9).unwrap();
        let back = psi.fourier().inverse_fourier();
        assert!(psi.sup_distance(&back) < 1e-12);
    }

    #[test]
    fn fourier_intertwines_translations_and_boosts() {
        let psi = WaveFunction::gaussian(grid(), 0.2, 0.9).unwrap();
        let q = 0.773;
        let lhs = psi.translate(q).unwrap().fourier();
        let rhs = psi.fourier().boost(-q).unwrap();
        assert!(lhs.sup_distance(&rhs) < 1e-10);
    }

    #[test]
    fn dilate_identity_and_inverse() {
        let psi = WaveFunction::gaussian(grid(), 0.5, 1.0).unwrap();
        let same = psi.dilate(1.0, 3.0).unwrap();
        assert!(psi.sup_distance(&same) < 1e-12);
        let back = psi.dilate(1.7, 0.5).unwrap().dilate(1.0 / 1.7, 0.5).unwrap();
        assert!(psi.sup_distance(&back) < 1e-7);
    }

    #[test]
    fn dilate_scales_variance() {
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0).unwrap();
        let v0 = position_distribution(&MixedState::pure(psi.clone())).variance();
        for a in [0.5, 2.0] {
            let scaled = psi.dilate(a, 0.0).unwrap();
            assert_abs_diff_eq!(scaled.norm(), 1.0, epsilon = 1e-8);
            let v = position_distribution(&MixedState::pure(scaled)).variance();
            assert_abs_diff_eq!(v / (a * a * v0), 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn dilate_guards_support() {
        // stretching a packet parked near the edge must push mass off-grid
        let psi = WaveFunction::gaussian(grid(), 12.0, 1.0).unwrap();
        assert!(matches!(
            psi.dilate(4.0, 0.0),
            Err(Error::SupportOverflow { .. })
        ));
        // contracting a wide packet on a coarse grid exceeds the bandwidth
        let coarse = GridSpec::new(64, 40.0).unwrap();
        let wide = WaveFunction::gaussian(coarse, 0.0, 1.5).unwrap();
        assert!(matches!(
            wide.dilate(0.125, 0.0),
            Err(Error::SupportOverflow { .. })
        ));
    }

    #[test]
    fn position_distribution_matches_closed_form() {
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0).unwrap();
        let d = position_distribution(&MixedState::pure(psi));
        let g = grid();
        let mut worst = 0.0f64;
        for j in 0..g.n {
            let x = g.x(j);
            let reference = (-0.5 * x * x).exp() / SQRT_2PI;
            worst = worst.max((d.density[j] - reference).abs());
        }
        assert!(worst < 1e-8, "sup error {worst}");
    }

    #[test]
    fn position_distribution_is_linear_in_the_mixture() {
        let g = grid();
        let left = WaveFunction::gaussian(g, -5.0, 0.5).unwrap();
        let right = WaveFunction::gaussian(g, 5.0, 0.5).unwrap();
        let mix = MixedState::new(vec![(0.5, left), (0.5, right)]).unwrap();
        let d = position_distribution(&mix);
        let left_mass = d.closed_interval_mass(-10.0, 0.0);
        assert_abs_diff_eq!(left_mass, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(d.mass(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn boost_leaves_position_distribution_alone() {
        let psi = WaveFunction::gaussian(grid(), 0.4, 1.1).unwrap();
        let kicked = psi.boost(3.0).unwrap();
        let a = position_distribution(&MixedState::pure(psi));
        let b = position_distribution(&MixedState::pure(kicked));
        let sup = a
            .density
            .iter()
            .zip(&b.density)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-14, "sup density change {sup}");
    }

    #[test]
    fn translate_leaves_momentum_distribution_alone() {
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0).unwrap();
        let moved = psi.translate(2.0).unwrap();
        let a = momentum_distribution(&MixedState::pure(psi));
        let b = momentum_distribution(&MixedState::pure(moved));
        let worst = a
            .density
            .iter()
            .zip(&b.density)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "sup error {worst}");
    }

    #[test]
    fn momentum_distribution_width_is_conjugate() {
        let sigma_x = 0.7;
        let psi = WaveFunction::gaussian(grid(), 0.0, sigma_x).unwrap();
        let d = momentum_distribution(&MixedState::pure(psi));
        let expected = 1.0 / (2.0 * sigma_x);
        assert_abs_diff_eq!(
            d.variance().sqrt() / expected,
            1.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn windowed_plane_wave_concentrates_in_momentum() {
        let p0 = 4.0;
        let psi = WaveFunction::gaussian(grid(), 0.0, 1.0)
            .unwrap()
            .boost(p0)
            .unwrap();
        let d = momentum_distribution(&MixedState::pure(psi));
        assert_abs_diff_eq!(d.mean(), p0, epsilon = 1e-8);
        assert!(d.closed_interval_mass(p0 - 2.0, p0 + 2.0) > 0.99);
    }
}

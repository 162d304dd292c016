//! Probability measures on the line: grid density + finite atom list.
//!
//! Density convention: `density[j]` is the average over the cell
//! `[x_j - dx/2, x_j + dx/2)`, so the cumulative distribution is piecewise
//! linear with breakpoints at half-nodes and `0` sits at a cell center.
//! This makes box measures, their masses, and their convolutions exact on
//! aligned grids (a node-anchored trapezoid rule would smear every edge by
//! one cell and lose ~dx of mass per side).

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Probability measure: nonnegative cell density plus atoms `(location, weight)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Measure1D {
    pub grid: GridSpec,
    pub density: Vec<f64>,
    pub atoms: Vec<(f64, f64)>,
}

impl Measure1D {
    /// Validating constructor for probability measures (total mass 1).
    pub fn new(grid: GridSpec, density: Vec<f64>, atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::with_total_mass(grid, density, atoms, 1.0)
    }

    /// As [`new`], but for a stated total mass (sub-probability parts).
    pub fn with_total_mass(
        grid: GridSpec,
        mut density: Vec<f64>,
        mut atoms: Vec<(f64, f64)>,
        expected_mass: f64,
    ) -> Result<Self> {
        if density.is_empty() {
            density = vec![0.0; grid.n];
        }
        if density.len() != grid.n {
            return Err(Error::InvalidParameter {
                name: "density",
                message: format!("expected {} cells, got {}", grid.n, density.len()),
            });
        }
        for d in &mut density {
            if *d < 0.0 {
                if *d < -1e-12 {
                    return Err(Error::InvalidParameter {
                        name: "density",
                        message: format!("negative density {d}"),
                    });
                }
                *d = 0.0;
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in atoms.windows(2) {
            if (w[1].0 - w[0].0).abs() <= 1e-12 * w[0].0.abs().max(1.0) {
                return Err(Error::InvalidParameter {
                    name: "atoms",
                    message: format!("duplicate atom location {}", w[0].0),
                });
            }
        }
        for (t, w) in &atoms {
            if !t.is_finite() || !(*w > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "atoms",
                    message: format!("atom ({t}, {w}) must have finite location and weight > 0"),
                });
            }
        }
        let m = Self {
            grid,
            density,
            atoms,
        };
        let mass = m.mass();
        if (mass - expected_mass).abs() > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "mass",
                message: format!("total mass {mass} differs from expected {expected_mass}"),
            });
        }
        Ok(m)
    }

    /// Trusted constructor for internally computed parts (atoms get sorted).
    pub(crate) fn from_parts(grid: GridSpec, density: Vec<f64>, mut atoms: Vec<(f64, f64)>) -> Self {
        debug_assert_eq!(density.len(), grid.n);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            grid,
            density,
            atoms,
        }
    }

    pub fn mass(&self) -> f64 {
        let dens: f64 = self.density.iter().sum::<f64>() * self.grid.dx();
        dens + self.atoms.iter().map(|(_, w)| w).sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        let dx = self.grid.dx();
        let mut m: f64 = self
            .density
            .iter()
            .enumerate()
            .map(|(j, d)| self.grid.x(j) * d * dx)
            .sum();
        m += self.atoms.iter().map(|(t, w)| t * w).sum::<f64>();
        m
    }

    pub fn variance(&self) -> f64 {
        let dx = self.grid.dx();
        let mut m2: f64 = self
            .density
            .iter()
            .enumerate()
            .map(|(j, d)| {
                let x = self.grid.x(j);
                x * x * d * dx
            })
            .sum();
        m2 += self.atoms.iter().map(|(t, w)| t * t * w).sum::<f64>();
        let mean = self.mean();
        m2 - mean * mean
    }

    /// Cached CDF view for repeated interval queries.
    pub fn cdf(&self) -> Cdf {
        Cdf::build(self)
    }

    /// Mass of the closed interval `[x - r/2, x + r/2]`.
    pub fn interval_mass(&self, x: f64, r: f64) -> f64 {
        self.cdf().window_mass(x - 0.5 * r, x + 0.5 * r)
    }

    /// Mass of the closed interval `[lo, hi]`.
    pub fn closed_interval_mass(&self, lo: f64, hi: f64) -> f64 {
        self.cdf().window_mass(lo, hi)
    }

    /// g(alpha): the largest mass any closed window of width `alpha` catches.
    ///
    /// Candidates: every node, every atom pushed flush against either window
    /// edge (nudged inward by dx/16), every atom centered, and windows flush
    /// against the density support edges. Each candidate family is monotone
    /// in alpha, so g is too.
    pub fn sliding_sup(&self, alpha: f64) -> f64 {
        let cdf = self.cdf();
        let half = 0.5 * alpha;
        let eta = self.grid.dx() / 16.0;
        let mut best = 0.0f64;
        let mut try_center = |c: f64| {
            let m = cdf.window_mass(c - half, c + half);
            if m > best {
                best = m;
            }
        };
        for j in 0..self.grid.n {
            try_center(self.grid.x(j));
        }
        for &(t, _) in &self.atoms {
            try_center(t);
            try_center(t + half - eta);
            try_center(t - half + eta);
        }
        if let Some((lo, hi)) = cdf.density_support() {
            try_center(lo + half);
            try_center(hi - half);
        }
        if let Some((lo, hi)) = cdf.support_bounds() {
            // flush against the full extent, and dead center: a window as
            // wide as the whole support must report the whole mass
            try_center(lo + half);
            try_center(hi - half);
            try_center(0.5 * (lo + hi));
        }
        best
    }

    /// Pushforward under `x -> s*x` by exact area-weighted rebinning.
    pub fn scaled(&self, s: f64) -> Result<Measure1D> {
        if !(s.is_finite() && s != 0.0) {
            return Err(Error::InvalidParameter {
                name: "s",
                message: format!("scale must be finite and nonzero, got {s}"),
            });
        }
        let n = self.grid.n;
        let dx = self.grid.dx();
        let low_edge = self.grid.x_min() - 0.5 * dx;
        let mut density = vec![0.0; n];
        let mut lost = 0.0;
        for (j, d) in self.density.iter().enumerate() {
            if *d == 0.0 {
                continue;
            }
            let mass = d * dx;
            let (a, b) = {
                let u = s * (self.grid.x(j) - 0.5 * dx);
                let v = s * (self.grid.x(j) + 0.5 * dx);
                (u.min(v), u.max(v))
            };
            let width = b - a;
            let k_lo = ((a - low_edge) / dx).floor() as i64;
            let k_hi = ((b - low_edge) / dx).floor() as i64;
            for k in k_lo..=k_hi {
                let cell_lo = low_edge + k as f64 * dx;
                let overlap = (b.min(cell_lo + dx) - a.max(cell_lo)).max(0.0);
                if overlap == 0.0 {
                    continue;
                }
                let share = mass * overlap / width;
                if (0..n as i64).contains(&k) {
                    density[k as usize] += share / dx;
                } else {
                    lost += share;
                }
            }
        }
        if lost > 1e-9 {
            return Err(Error::SupportOverflow {
                context: "scale measure",
                lost,
            });
        }
        let atoms = self.atoms.iter().map(|&(t, w)| (s * t, w)).collect();
        Ok(Measure1D::from_parts(self.grid, density, atoms))
    }

    /// Exact shift by a node-aligned offset; atoms move freely.
    pub fn translated(&self, t: f64) -> Result<Measure1D> {
        let m = self.grid.aligned_offset(t).ok_or(Error::InvalidParameter {
            name: "t",
            message: format!("shift {t} is not a node offset of this grid"),
        })?;
        let n = self.grid.n as i64;
        let dx = self.grid.dx();
        let mut density = vec![0.0; self.grid.n];
        let mut lost = 0.0;
        for (j, d) in self.density.iter().enumerate() {
            if *d == 0.0 {
                continue;
            }
            let k = j as i64 + m;
            if (0..n).contains(&k) {
                density[k as usize] = *d;
            } else {
                lost += d * dx;
            }
        }
        if lost > 1e-9 {
            return Err(Error::SupportOverflow {
                context: "translate measure",
                lost,
            });
        }
        let atoms = self.atoms.iter().map(|&(a, w)| (a + t, w)).collect();
        Ok(Measure1D::from_parts(self.grid, density, atoms))
    }

    /// Pushforward under x -> -x (circular on the grid's edge cell).
    pub fn reflected(&self) -> Measure1D {
        let n = self.grid.n;
        let mut density = vec![0.0; n];
        for j in 0..n {
            density[j] = self.density[(n - j) % n];
        }
        let atoms = self.atoms.iter().map(|&(t, w)| (-t, w)).collect();
        Measure1D::from_parts(self.grid, density, atoms)
    }

    /// Characteristic-function value at a single frequency.
    pub fn char_eval(&self, xi: f64) -> Complex64 {
        let dx = self.grid.dx();
        let rot = Complex64::from_polar(1.0, -xi * dx);
        let mut acc = Complex64::new(0.0, 0.0);
        let n = self.grid.n;
        let mut j = 0;
        while j < n {
            let mut c = Complex64::from_polar(1.0, -xi * self.grid.x(j));
            let end = (j + 512).min(n);
            while j < end {
                acc += self.density[j] * c;
                c *= rot;
                j += 1;
            }
        }
        acc *= dx;
        for &(t, w) in &self.atoms {
            acc += w * Complex64::from_polar(1.0, -xi * t);
        }
        acc
    }

    /// Total-variation distance: half L1 on densities plus half the atom
    /// weight mismatch (atoms matched by location within 1e-9).
    pub fn tv_distance(&self, other: &Measure1D) -> f64 {
        let dx = self.grid.dx();
        let mut l1: f64 = self
            .density
            .iter()
            .zip(&other.density)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * dx;
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() || j < other.atoms.len() {
            let (ta, wa) = self.atoms.get(i).copied().unwrap_or((f64::INFINITY, 0.0));
            let (tb, wb) = other.atoms.get(j).copied().unwrap_or((f64::INFINITY, 0.0));
            if (ta - tb).abs() <= 1e-9 * ta.abs().max(1.0) {
                l1 += (wa - wb).abs();
                i += 1;
                j += 1;
            } else if ta < tb {
                l1 += wa;
                i += 1;
            } else {
                l1 += wb;
                j += 1;
            }
        }
        0.5 * l1
    }

    /// Plot-ready CSV of `(x, density)` rows (atoms live in the JSON form).
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x,density")?;
        for (j, d) in self.density.iter().enumerate() {
            writeln!(w, "{},{}", self.grid.x(j), d)?;
        }
        Ok(())
    }
}

/// Normalized Gaussian density sampled at cell centers.
pub fn make_gaussian(mean: f64, sigma: f64, grid: GridSpec) -> Result<Measure1D> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            message: format!("must be positive, got {sigma}"),
        });
    }
    let needed = mean.abs() + 8.0 * sigma;
    if needed > 0.5 * grid.length {
        return Err(Error::GridTooSmall {
            needed,
            have: 0.5 * grid.length,
        });
    }
    let dx = grid.dx();
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut density: Vec<f64> = (0..grid.n)
        .map(|j| {
            let u = grid.x(j) - mean;
            (-u * u * inv).exp()
        })
        .collect();
    let total: f64 = density.iter().sum::<f64>() * dx;
    for d in &mut density {
        *d /= total;
    }
    Ok(Measure1D::from_parts(grid, density, Vec::new()))
}

/// Point mass at `t` (the grid only hosts the empty density part).
pub fn make_dirac(t: f64, grid: GridSpec) -> Measure1D {
    Measure1D::from_parts(grid, vec![0.0; grid.n], vec![(t, 1.0)])
}

/// Box density of total mass exactly 1.
///
/// The edges are snapped inward to the half-node lattice, so the support
/// is contained in the requested interval and the requested interval's mass
/// is exactly 1; the snapped support may be up to one cell narrower per side.
pub fn make_uniform(center: f64, width: f64, grid: GridSpec) -> Result<Measure1D> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "width",
            message: format!("must be positive, got {width}"),
        });
    }
    let needed = center.abs() + 0.5 * width;
    if needed > 0.5 * grid.length {
        return Err(Error::GridTooSmall {
            needed,
            have: 0.5 * grid.length,
        });
    }
    let dx = grid.dx();
    let lo = center - 0.5 * width;
    let hi = center + 0.5 * width;
    // cell j is inside once both half-node edges sit inside [lo, hi]
    let j_min = ((lo + 0.5 * dx - grid.x_min()) / dx - 1e-9).ceil() as i64;
    let j_max = ((hi - 0.5 * dx - grid.x_min()) / dx + 1e-9).floor() as i64;
    let j_min = j_min.max(0) as usize;
    let j_max = j_max.min(grid.n as i64 - 1) as usize;
    if j_max < j_min {
        return Err(Error::InvalidParameter {
            name: "width",
            message: format!("width {width} does not cover a full grid cell (dx = {dx})"),
        });
    }
    let count = j_max - j_min + 1;
    let h = 1.0 / (count as f64 * dx);
    let mut density = vec![0.0; grid.n];
    for d in &mut density[j_min..=j_max] {
        *d = h;
    }
    Ok(Measure1D::from_parts(grid, density, Vec::new()))
}

/// Convex combination of measures on one grid.
pub fn mix(parts: &[(f64, Measure1D)]) -> Result<Measure1D> {
    if parts.is_empty() {
        return Err(Error::InvalidParameter {
            name: "parts",
            message: "mixture needs at least one part".into(),
        });
    }
    let mut sum = 0.0;
    for (w, _) in parts {
        if !(*w > 0.0) {
            return Err(Error::NonConvexWeights { sum: *w });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::NonConvexWeights { sum });
    }
    let grid = parts[0].1.grid;
    let mut density = vec![0.0; grid.n];
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for (w, m) in parts {
        if !grid.compatible(&m.grid) {
            return Err(Error::GridMismatch {
                n_a: grid.n,
                len_a: grid.length,
                n_b: m.grid.n,
                len_b: m.grid.length,
            });
        }
        for (d, s) in density.iter_mut().zip(&m.density) {
            *d += w * s;
        }
        for &(t, wt) in &m.atoms {
            merge_atom(&mut atoms, t, w * wt);
        }
    }
    Ok(Measure1D::from_parts(grid, density, atoms))
}

fn merge_atom(atoms: &mut Vec<(f64, f64)>, t: f64, w: f64) {
    for a in atoms.iter_mut() {
        if (a.0 - t).abs() <= 1e-12 * a.0.abs().max(1.0) {
            a.1 += w;
            return;
        }
    }
    atoms.push((t, w));
}

/// Convolution of two measures on one grid.
///
/// density*density runs through a zero-padded FFT (node indices add exactly:
/// x_j + x_m = x_{j+m-n/2}); density*atom accumulates shifted copies (exact
/// for node-aligned atoms, linear deposit otherwise); atom*atom adds
/// locations and multiplies weights.
pub fn convolve(mu: &Measure1D, rho: &Measure1D) -> Result<Measure1D> {
    if !mu.grid.compatible(&rho.grid) {
        return Err(Error::GridMismatch {
            n_a: mu.grid.n,
            len_a: mu.grid.length,
            n_b: rho.grid.n,
            len_b: rho.grid.length,
        });
    }
    let grid = mu.grid;
    let n = grid.n;
    let dx = grid.dx();
    let mut density = vec![0.0; n];
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut lost = 0.0f64;

    let has_d1 = mu.density.iter().any(|d| *d > 0.0);
    let has_d2 = rho.density.iter().any(|d| *d > 0.0);
    if has_d1 && has_d2 {
        let m = 2 * n;
        let mut a: Vec<Complex64> = mu
            .density
            .iter()
            .map(|d| Complex64::new(*d, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)).take(n))
            .collect();
        let mut b: Vec<Complex64> = rho
            .density
            .iter()
            .map(|d| Complex64::new(*d, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)).take(n))
            .collect();
        fft::forward(&mut a);
        fft::forward(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        fft::inverse(&mut a);
        // linear-convolution index l = j + m sits at node l - n/2
        for (l, v) in a.iter().enumerate().take(m - 1) {
            let c = v.re.max(0.0) * dx;
            if c == 0.0 {
                continue;
            }
            let i = l as i64 - (n / 2) as i64;
            if (0..n as i64).contains(&i) {
                density[i as usize] += c;
            } else {
                lost += c * dx;
            }
        }
    }

    let deposit = |dens: &[f64], t: f64, w: f64, density: &mut [f64], lost: &mut f64| {
        if let Some(m) = grid.aligned_offset(t) {
            for (j, d) in dens.iter().enumerate() {
                if *d == 0.0 {
                    continue;
                }
                let k = j as i64 + m;
                if (0..n as i64).contains(&k) {
                    density[k as usize] += w * d;
                } else {
                    *lost += w * d * dx;
                }
            }
        } else {
            let shift = t / dx;
            for (j, d) in dens.iter().enumerate() {
                if *d == 0.0 {
                    continue;
                }
                let pos = j as f64 + shift;
                let f = pos.floor();
                let frac = pos - f;
                for (k, share) in [(f as i64, 1.0 - frac), (f as i64 + 1, frac)] {
                    if share == 0.0 {
                        continue;
                    }
                    if (0..n as i64).contains(&k) {
                        density[k as usize] += w * d * share;
                    } else {
                        *lost += w * d * share * dx;
                    }
                }
            }
        }
    };

    for &(t, w) in &rho.atoms {
        deposit(&mu.density, t, w, &mut density, &mut lost);
    }
    for &(t, w) in &mu.atoms {
        deposit(&rho.density, t, w, &mut density, &mut lost);
    }
    for &(t1, w1) in &mu.atoms {
        for &(t2, w2) in &rho.atoms {
            merge_atom(&mut atoms, t1 + t2, w1 * w2);
        }
    }

    if lost > 1e-9 {
        return Err(Error::SupportOverflow {
            context: "convolve",
            lost,
        });
    }
    Ok(Measure1D::from_parts(grid, density, atoms))
}

/// Piecewise-linear CDF with half-node breakpoints, plus sorted atoms.
pub struct Cdf {
    grid: GridSpec,
    prefix: Vec<f64>,
    density: Vec<f64>,
    atom_locs: Vec<f64>,
    atom_prefix: Vec<f64>,
    support: Option<(f64, f64)>,
}

impl Cdf {
    fn build(m: &Measure1D) -> Cdf {
        let n = m.grid.n;
        let dx = m.grid.dx();
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for d in &m.density {
            acc += d * dx;
            prefix.push(acc);
        }
        let atom_locs: Vec<f64> = m.atoms.iter().map(|a| a.0).collect();
        let mut atom_prefix = Vec::with_capacity(m.atoms.len() + 1);
        let mut wa = 0.0;
        atom_prefix.push(0.0);
        for (_, w) in &m.atoms {
            wa += w;
            atom_prefix.push(wa);
        }
        let first = m.density.iter().position(|d| *d > 0.0);
        let last = m.density.iter().rposition(|d| *d > 0.0);
        let support = first.map(|f| {
            (
                m.grid.x(f) - 0.5 * dx,
                m.grid.x(last.unwrap()) + 0.5 * dx,
            )
        });
        Cdf {
            grid: m.grid,
            prefix,
            density: m.density.clone(),
            atom_locs,
            atom_prefix,
            support,
        }
    }

    /// Density-part mass of `(-inf, x]`.
    pub fn density_cdf(&self, x: f64) -> f64 {
        let n = self.grid.n;
        let low_edge = self.grid.x_min() - 0.5 * self.grid.dx();
        let u = (x - low_edge) / self.grid.dx();
        if u <= 0.0 {
            return 0.0;
        }
        if u >= n as f64 {
            return self.prefix[n];
        }
        let j = (u.floor() as usize).min(n - 1);
        self.prefix[j] + self.density[j] * self.grid.dx() * (u - j as f64)
    }

    fn atom_mass(&self, lo: f64, hi: f64) -> f64 {
        let a = self.atom_locs.partition_point(|l| *l < lo);
        let b = self.atom_locs.partition_point(|l| *l <= hi);
        self.atom_prefix[b] - self.atom_prefix[a]
    }

    /// Mass of the closed interval `[lo, hi]`.
    pub fn window_mass(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        self.density_cdf(hi) - self.density_cdf(lo) + self.atom_mass(lo, hi)
    }

    /// Half-node edges of the positive part of the density, if any.
    pub fn density_support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// Extent of everything: density support joined with atom locations.
    pub fn support_bounds(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let Some((a, b)) = self.support {
            lo = a;
            hi = b;
        }
        if let (Some(first), Some(last)) = (self.atom_locs.first(), self.atom_locs.last()) {
            lo = lo.min(*first);
            hi = hi.max(*last);
        }
        (lo <= hi).then_some((lo, hi))
    }
}

//! Rotation-invariant smearings on R^3: an atom at the origin plus a
//! radial measure spread uniformly over the sphere. Outcome statistics are
//! Monte-Carlo clouds; covariance under rotations is checked with moment
//! tensors and sliced two-sample Kolmogorov-Smirnov statistics.

use crate::error::{Error, Result};
use crate::measure::Measure1D;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Splitting constant for deriving independent stream seeds.
pub(crate) const SEED_SPLIT: u64 = 0x9E3779B97F4A7C15;

/// Rotation-invariant probability measure on R^3: `atom_at_origin` plus a
/// radial profile (mass 1 - atom) swept uniformly over directions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotInvMeasure3D {
    pub atom_at_origin: f64,
    pub radial: Measure1D,
}

impl RotInvMeasure3D {
    pub fn new(atom_at_origin: f64, radial: Measure1D) -> Result<Self> {
        if !(0.0..=1.0).contains(&atom_at_origin) {
            return Err(Error::InvalidParameter {
                name: "atom_at_origin",
                message: format!("weight must lie in [0, 1], got {atom_at_origin}"),
            });
        }
        let expected = 1.0 - atom_at_origin;
        if (radial.mass() - expected).abs() > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "radial",
                message: format!(
                    "radial mass {} must complement the atom to 1 (expected {expected})",
                    radial.mass()
                ),
            });
        }
        let dx = radial.grid.dx();
        let negative = radial
            .density
            .iter()
            .enumerate()
            .any(|(j, d)| *d > 0.0 && radial.grid.x(j) < -0.5 * dx)
            || radial.atoms.iter().any(|(t, _)| *t < 0.0);
        if negative {
            return Err(Error::InvalidParameter {
                name: "radial",
                message: "radial measure must be supported on r >= 0".into(),
            });
        }
        Ok(RotInvMeasure3D {
            atom_at_origin,
            radial,
        })
    }

    /// The sharp observable's smearing: everything at the origin.
    pub fn sharp(grid: crate::grid::GridSpec) -> Self {
        RotInvMeasure3D {
            atom_at_origin: 1.0,
            radial: Measure1D::with_total_mass(grid, vec![0.0; grid.n], Vec::new(), 0.0)
                .expect("empty radial part"),
        }
    }
}

/// True only for the point measure at the origin — the unique
/// rotation-invariant smearing with a sharp outcome.
pub fn sharpness_check(rho: &RotInvMeasure3D) -> bool {
    rho.atom_at_origin >= 1.0 - 1e-12
}

/// Radial profile of an isotropic Gaussian on R^3 with per-axis deviation
/// `sigma` (density proportional to r^2 exp(-r^2 / 2 sigma^2)), normalized
/// to carry `mass`.
pub fn radial_maxwell(sigma: f64, mass: f64, grid: crate::grid::GridSpec) -> Result<Measure1D> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            message: format!("must be positive, got {sigma}"),
        });
    }
    if !(mass.is_finite() && mass > 0.0 && mass <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "mass",
            message: format!("must lie in (0, 1], got {mass}"),
        });
    }
    if grid.x_max() < 8.0 * sigma {
        return Err(Error::GridTooSmall {
            needed: 8.0 * sigma,
            have: grid.x_max(),
        });
    }
    let density: Vec<f64> = (0..grid.n)
        .map(|j| {
            let r = grid.x(j);
            if r < 0.0 {
                0.0
            } else {
                r * r * (-r * r / (2.0 * sigma * sigma)).exp()
            }
        })
        .collect();
    let total: f64 = density.iter().sum::<f64>() * grid.dx();
    let density = density.into_iter().map(|d| d * mass / total).collect();
    Measure1D::with_total_mass(grid, density, Vec::new(), mass)
}

/// Radial shell: all of `mass` at distance `radius` from the origin.
pub fn radial_shell(radius: f64, mass: f64, grid: crate::grid::GridSpec) -> Result<Measure1D> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "radius",
            message: format!("must be nonnegative, got {radius}"),
        });
    }
    if !(mass.is_finite() && mass > 0.0 && mass <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "mass",
            message: format!("must lie in (0, 1], got {mass}"),
        });
    }
    if grid.x_max() < radius {
        return Err(Error::GridTooSmall {
            needed: radius,
            have: grid.x_max(),
        });
    }
    Measure1D::with_total_mass(grid, vec![0.0; grid.n], vec![(radius, mass)], mass)
}

/// Equal-weight Monte-Carlo point cloud.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleCloud3D {
    pub points: Vec<[f64; 3]>,
    pub seed: u64,
}

impl SampleCloud3D {
    pub fn new(points: Vec<[f64; 3]>, seed: u64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter {
                name: "points",
                message: "a cloud needs at least one point".into(),
            });
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "points",
                message: "cloud coordinates must be finite".into(),
            });
        }
        Ok(SampleCloud3D { points, seed })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean(&self) -> [f64; 3] {
        let n = self.points.len() as f64;
        let mut m = [0.0; 3];
        for p in &self.points {
            for k in 0..3 {
                m[k] += p[k];
            }
        }
        m.map(|v| v / n)
    }

    /// Symmetric second-moment tensor, packed as
    /// [xx, yy, zz, xy, xz, yz].
    pub fn second_moments(&self) -> [f64; 6] {
        let n = self.points.len() as f64;
        let mut m = [0.0; 6];
        for p in &self.points {
            m[0] += p[0] * p[0];
            m[1] += p[1] * p[1];
            m[2] += p[2] * p[2];
            m[3] += p[0] * p[1];
            m[4] += p[0] * p[2];
            m[5] += p[1] * p[2];
        }
        m.map(|v| v / n)
    }

    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> SampleCloud3D {
        let points = self
            .points
            .iter()
            .map(|p| {
                [
                    r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2],
                    r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2],
                    r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2],
                ]
            })
            .collect();
        SampleCloud3D {
            points,
            seed: self.seed,
        }
    }

    pub fn translated(&self, v: [f64; 3]) -> SampleCloud3D {
        let points = self
            .points
            .iter()
            .map(|p| [p[0] + v[0], p[1] + v[1], p[2] + v[2]])
            .collect();
        SampleCloud3D {
            points,
            seed: self.seed,
        }
    }

    /// CSV of coordinates, one point per row.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x,y,z")?;
        for p in &self.points {
            writeln!(w, "{},{},{}", p[0], p[1], p[2])?;
        }
        Ok(())
    }

    /// One JSON header line, then little-endian f64 triples.
    pub fn write_binary<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        let header = serde_json::json!({ "n": self.points.len(), "seed": self.seed });
        writeln!(w, "{header}")?;
        for p in &self.points {
            for c in p {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over a 1D measure's cells and atoms.
struct Sampler1D {
    cumulative: Vec<f64>,
    // cell node index, or an exact atom location
    events: Vec<SampleEvent>,
    total: f64,
    dx: f64,
    x_min: f64,
}

enum SampleEvent {
    Cell(usize),
    Atom(f64),
}

impl Sampler1D {
    fn new(measure: &Measure1D) -> Result<Self> {
        let dx = measure.grid.dx();
        let mut cumulative = Vec::new();
        let mut events = Vec::new();
        let mut total = 0.0;
        for (j, d) in measure.density.iter().enumerate() {
            if *d > 0.0 {
                total += d * dx;
                cumulative.push(total);
                events.push(SampleEvent::Cell(j));
            }
        }
        for &(t, w) in &measure.atoms {
            total += w;
            cumulative.push(total);
            events.push(SampleEvent::Atom(t));
        }
        if total <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "radial",
                message: "cannot sample from a measure with zero mass".into(),
            });
        }
        Ok(Sampler1D {
            cumulative,
            events,
            total,
            dx,
            x_min: measure.grid.x_min(),
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let u = rng.random::<f64>() * self.total;
        let idx = self
            .cumulative
            .partition_point(|c| *c < u)
            .min(self.events.len() - 1);
        match self.events[idx] {
            SampleEvent::Cell(j) => {
                // uniform within the midpoint cell
                self.x_min + j as f64 * self.dx + (rng.random::<f64>() - 0.5) * self.dx
            }
            SampleEvent::Atom(t) => t,
        }
    }
}

fn unit_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-12 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

/// Draws `n` points: the origin with the atom's probability, otherwise a
/// radius from the radial profile times a uniform direction.
pub fn sample_measure(rho: &RotInvMeasure3D, n: usize, seed: u64) -> Result<SampleCloud3D> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            message: "need at least one sample".into(),
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let radial_sampler = if rho.atom_at_origin < 1.0 {
        Some(Sampler1D::new(&rho.radial)?)
    } else {
        None
    };
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.random::<f64>() < rho.atom_at_origin {
            points.push([0.0, 0.0, 0.0]);
            continue;
        }
        let sampler = radial_sampler.as_ref().expect("atom < 1 implies radial");
        let r = sampler.draw(&mut rng).max(0.0);
        let dir = unit_direction(&mut rng);
        points.push([r * dir[0], r * dir[1], r * dir[2]]);
    }
    SampleCloud3D::new(points, seed)
}

/// Smeared position outcome: every state point is displaced by an
/// independent draw from the smearing measure.
pub fn smeared_output(
    rho: &RotInvMeasure3D,
    state_cloud: &SampleCloud3D,
    seed: u64,
) -> Result<SampleCloud3D> {
    let noise = sample_measure(rho, state_cloud.len(), seed)?;
    let points = state_cloud
        .points
        .iter()
        .zip(&noise.points)
        .map(|(q, y)| [q[0] + y[0], q[1] + y[1], q[2] + y[2]])
        .collect();
    SampleCloud3D::new(points, seed)
}

fn check_rotation(r: &[[f64; 3]; 3]) -> Result<()> {
    let mut gram = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                gram[i][j] += r[k][i] * r[k][j];
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { 1.0 } else { 0.0 };
            if (gram[i][j] - expected).abs() > 1e-10 {
                return Err(Error::NotARotation {
                    message: format!("columns are not orthonormal: gram[{i}][{j}] = {}", gram[i][j]),
                });
            }
        }
    }
    let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    if (det - 1.0).abs() > 1e-10 {
        return Err(Error::NotARotation {
            message: format!("determinant {det} is not 1"),
        });
    }
    Ok(())
}

/// Two-sample Kolmogorov-Smirnov statistic of projected clouds.
fn sliced_ks(a: &SampleCloud3D, b: &SampleCloud3D, dir: [f64; 3]) -> f64 {
    let project = |c: &SampleCloud3D| {
        let mut v: Vec<f64> = c
            .points
            .iter()
            .map(|p| p[0] * dir[0] + p[1] * dir[1] + p[2] * dir[2])
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let xa = project(a);
    let xb = project(b);
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < na && j < nb {
        if xa[i] <= xb[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    // once a sample is exhausted its CDF is pinned at 1 and the gap shrinks
    d
}

const SLICE_DIRECTIONS: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.57735026918962573, 0.57735026918962573, 0.57735026918962573],
    [0.70710678118654746, -0.70710678118654746, 0.0],
    [0.70710678118654746, 0.0, -0.70710678118654746],
];

/// Two-sided KS acceptance factor matching a 4-sigma false-alarm rate.
const KS_FACTOR: f64 = 2.276;
const MOMENT_BAND: f64 = 4.0;

/// Verdict of one rotation-covariance comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationReport {
    pub n: usize,
    pub seed: u64,
    pub moments_max_z: f64,
    pub moment_band: f64,
    pub ks_max_ratio: f64,
    pub pass: bool,
}

fn moment_z(a: &[f64], b: &[f64]) -> f64 {
    // z-score of a mean difference with the variance estimated per branch
    let n = a.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    let (ma, mb) = (mean(a), mean(b));
    let sd = (var(a, ma) / n + var(b, mb) / n).sqrt();
    if sd == 0.0 {
        if ma == mb {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (ma - mb).abs() / sd
    }
}

fn covariance_report(a: &SampleCloud3D, b: &SampleCloud3D, seed: u64) -> RotationReport {
    let mut moments_max_z = 0.0f64;
    let coords = |c: &SampleCloud3D, f: &dyn Fn(&[f64; 3]) -> f64| -> Vec<f64> {
        c.points.iter().map(f).collect()
    };
    let features: [&dyn Fn(&[f64; 3]) -> f64; 9] = [
        &|p| p[0],
        &|p| p[1],
        &|p| p[2],
        &|p| p[0] * p[0],
        &|p| p[1] * p[1],
        &|p| p[2] * p[2],
        &|p| p[0] * p[1],
        &|p| p[0] * p[2],
        &|p| p[1] * p[2],
    ];
    for f in features {
        moments_max_z = moments_max_z.max(moment_z(&coords(a, f), &coords(b, f)));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ks_limit = KS_FACTOR * ((na + nb) / (na * nb)).sqrt();
    let mut ks_max_ratio = 0.0f64;
    for dir in SLICE_DIRECTIONS {
        ks_max_ratio = ks_max_ratio.max(sliced_ks(a, b, dir) / ks_limit);
    }
    RotationReport {
        n: a.len(),
        seed,
        moments_max_z,
        moment_band: MOMENT_BAND,
        ks_max_ratio,
        pass: moments_max_z <= MOMENT_BAND && ks_max_ratio <= 1.0,
    }
}

/// Compares smearing-then-rotating against rotating-then-smearing on
/// independent noise streams derived from `seed`.
pub fn rotation_covariance_test(
    rho: &RotInvMeasure3D,
    state_cloud: &SampleCloud3D,
    r: &[[f64; 3]; 3],
    seed: u64,
) -> Result<RotationReport> {
    check_rotation(r)?;
    let a = smeared_output(rho, &state_cloud.rotated(r), seed)?;
    let b = smeared_output(rho, state_cloud, seed.wrapping_add(SEED_SPLIT))?.rotated(r);
    Ok(covariance_report(&a, &b, seed))
}

/// Negative control: the second branch's smearing draws are displaced by a
/// fixed offset, breaking rotation invariance of the effective smear.
pub fn rotation_covariance_test_with_fault(
    rho: &RotInvMeasure3D,
    state_cloud: &SampleCloud3D,
    r: &[[f64; 3]; 3],
    seed: u64,
    offset: [f64; 3],
) -> Result<RotationReport> {
    check_rotation(r)?;
    let a = smeared_output(rho, &state_cloud.rotated(r), seed)?;
    let b = smeared_output(rho, state_cloud, seed.wrapping_add(SEED_SPLIT))?
        .translated(offset)
        .rotated(r);
    Ok(covariance_report(&a, &b, seed))
}

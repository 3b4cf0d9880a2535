//! Synthetic mixtures for benchmarking: random covariances, skewed clusters and
//! tight packing of cluster centres.
//!
//! Each cluster `i` has covariance `R diag(exp(r0 * zeta + r_j * xi)) R^T` with a
//! random rotation `R`, one spread draw `r0` shared by all axes and per-axis
//! anisotropy draws `r_j`, all uniform on `[-1, 1]`. Centres are placed one at a
//! time, each sliding outwards from the origin along a random direction until its
//! Mahalanobis ellipsoid of radius `z0` clears every ellipsoid placed before it.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{DataMatrix, Labeling};
use crate::error::{Error, Result};

/// Mean of `ln|z + 3|` for standard normal `z`.
pub const SKEW_MEAN: f64 = 1.027_416_592_726_136_8;
/// Standard deviation of `ln|z + 3|` for standard normal `z`.
pub const SKEW_STD: f64 = 0.426_428_511_775_626_37;

/// Distance below which two ellipsoids are considered to touch.
const CONTACT_TOL: f64 = 1e-8;
const MAX_DISTANCE_ITERATIONS: usize = 10_000;
/// Packing step as a fraction of the largest standard deviation.
const PACKING_STEP: f64 = 0.1;

/// The coordinate transform used for skewed clusters.
pub fn skew_transform(z: f64) -> f64 {
    (z + 3.0).abs().ln()
}

/// Haar-distributed rotation (orthogonal, determinant +1).
pub fn random_rotation<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

pub fn random_covariance<R: Rng + ?Sized>(
    p: usize,
    zeta: f64,
    xi: f64,
    rng: &mut R,
) -> DMatrix<f64> {
    let r0: f64 = rng.random_range(-1.0..=1.0);
    let diag = DVector::from_fn(p, |_, _| {
        (r0 * zeta + rng.random_range(-1.0..=1.0) * xi).exp()
    });
    let rot = random_rotation(p, rng);
    let cov = &rot * DMatrix::from_diagonal(&diag) * rot.transpose();
    symmetrized(cov)
}

fn symmetrized(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// One mixture component.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    pub center: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub population: usize,
    pub skewed: bool,
    /// Rotation applied to the raw skewed coordinates.
    pub skew_rotation: DMatrix<f64>,
}

impl ClusterSpec {
    pub fn gaussian(center: DVector<f64>, covariance: DMatrix<f64>, population: usize) -> Self {
        let p = center.len();
        Self {
            center,
            covariance,
            population,
            skewed: false,
            skew_rotation: DMatrix::identity(p, p),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn shape_factor(&self) -> Result<DMatrix<f64>> {
        self.covariance
            .clone()
            .cholesky()
            .map(|c| c.l())
            .ok_or_else(|| Error::invalid("covariance is not positive definite"))
    }
}

/// Draws `spec.population` points, one row each.
///
/// Gaussian clusters are `mu + L z` with `L L^T = Sigma`. Skewed clusters first
/// draw `R~ [F(z_1), ..., F(z_p)]` with `F(z) = ln|z + 3|`, standardised so each
/// raw coordinate has zero mean and unit variance, and then apply `L` and `mu`.
pub fn sample_cluster<R: Rng + ?Sized>(spec: &ClusterSpec, rng: &mut R) -> Result<DataMatrix> {
    let p = spec.dim();
    let l = spec.shape_factor()?;
    let mut values = Vec::with_capacity(spec.population * p);
    for _ in 0..spec.population {
        let mut z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        if spec.skewed {
            z.apply(|v| *v = (skew_transform(*v) - SKEW_MEAN) / SKEW_STD);
            z = &spec.skew_rotation * z;
        }
        let x = &spec.center + &l * z;
        values.extend(x.iter());
    }
    DataMatrix::new(spec.population, p, values)
}

/// Solid ellipsoid `{x : (x - c)^T Sigma^-1 (x - c) <= z0^2}`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: DVector<f64>,
    precision: DMatrix<f64>,
    radius_sq: f64,
    /// Step `1 / lambda_max` of the quadratic form's Hessian.
    step: f64,
}

impl Ellipsoid {
    pub fn new(center: DVector<f64>, covariance: &DMatrix<f64>, z0: f64) -> Result<Self> {
        if !(z0 > 0.0) {
            return Err(Error::invalid("z0 must be positive"));
        }
        let eig = SymmetricEigen::new(symmetrized(covariance.clone()));
        let min_eig = eig.eigenvalues.min();
        if !(min_eig > 0.0) {
            return Err(Error::invalid("covariance is not positive definite"));
        }
        let precision = covariance
            .clone()
            .cholesky()
            .ok_or_else(|| Error::invalid("covariance is not positive definite"))?
            .inverse();
        Ok(Self {
            center,
            precision,
            radius_sq: z0 * z0,
            step: 0.5 * min_eig,
        })
    }

    /// `(x - c)^T Sigma^-1 (x - c) - z0^2`; non-positive inside.
    fn level(&self, x: &DVector<f64>) -> f64 {
        let d = x - &self.center;
        d.dot(&(&self.precision * &d)) - self.radius_sq
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.level(x) <= 0.0
    }

    /// Parameter `t` where `from + t (to - from)` leaves the ellipsoid, for an
    /// interior `from`.
    fn exit_parameter(&self, from: &DVector<f64>, to: &DVector<f64>) -> f64 {
        let dir = to - from;
        let rel = from - &self.center;
        let m_dir = &self.precision * &dir;
        let a = dir.dot(&m_dir);
        let b = 2.0 * rel.dot(&m_dir);
        let c = rel.dot(&(&self.precision * &rel)) - self.radius_sq;
        (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a)
    }

    /// Point moved inward from boundary point `x` along the normal, such that the
    /// ball through `x` around it stays inside the ellipsoid.
    fn inner_center(&self, x: &DVector<f64>) -> DVector<f64> {
        let grad = (&self.precision * (x - &self.center)) * 2.0;
        x - grad * self.step
    }

    /// Euclidean distance between the two solids, zero when they meet.
    ///
    /// Alternating iteration: the segment between interior points of each solid
    /// meets the two boundaries, and each interior point is replaced by the centre
    /// of the largest inscribed ball that touches its boundary at that crossing.
    pub fn distance(&self, other: &Ellipsoid) -> Result<f64> {
        let mut c1 = self.center.clone();
        let mut c2 = other.center.clone();
        let mut previous = f64::INFINITY;
        for _ in 0..MAX_DISTANCE_ITERATIONS {
            if other.contains(&c1) || self.contains(&c2) {
                return Ok(0.0);
            }
            let t1 = self.exit_parameter(&c1, &c2);
            let t2 = other.exit_parameter(&c2, &c1);
            if t1 >= 1.0 - t2 {
                return Ok(0.0);
            }
            let dir = &c2 - &c1;
            let x = &c1 + &dir * t1;
            let y = &c1 + &dir * (1.0 - t2);
            let dist = (&y - &x).norm();
            if dist < CONTACT_TOL {
                return Ok(0.0);
            }
            if (previous - dist).abs() <= CONTACT_TOL {
                return Ok(dist);
            }
            previous = dist;
            c1 = self.inner_center(&x);
            c2 = other.inner_center(&y);
        }
        Err(Error::NoConvergence {
            what: "ellipsoid distance",
            iterations: MAX_DISTANCE_ITERATIONS,
        })
    }

    pub fn intersects(&self, other: &Ellipsoid) -> Result<bool> {
        Ok(self.distance(other)? < CONTACT_TOL)
    }
}

/// Whether the `z0` Mahalanobis ellipsoids of two clusters share a point.
pub fn ellipsoids_intersect(a: &ClusterSpec, b: &ClusterSpec, z0: f64) -> Result<bool> {
    let ea = Ellipsoid::new(a.center.clone(), &a.covariance, z0)?;
    let eb = Ellipsoid::new(b.center.clone(), &b.covariance, z0)?;
    ea.intersects(&eb)
}

/// Places one centre per covariance so that no two `z0` ellipsoids intersect.
///
/// The first centre is the origin. Each later centre starts at the origin and
/// moves outwards along its own random direction in steps of one tenth of the
/// largest standard deviation over all clusters.
pub fn pack_clusters<R: Rng + ?Sized>(
    p: usize,
    covariances: &[DMatrix<f64>],
    z0: f64,
    rng: &mut R,
) -> Result<Vec<DVector<f64>>> {
    let max_eig = covariances
        .iter()
        .map(|c| SymmetricEigen::new(c.clone()).eigenvalues.max())
        .fold(0.0, f64::max);
    let step = PACKING_STEP * max_eig.sqrt();

    let mut placed: Vec<Ellipsoid> = Vec::with_capacity(covariances.len());
    for cov in covariances {
        let direction = if placed.is_empty() {
            DVector::zeros(p)
        } else {
            random_direction(p, rng)
        };
        let mut m = 0usize;
        loop {
            let candidate = Ellipsoid::new(&direction * (m as f64 * step), cov, z0)?;
            let mut clear = true;
            for other in &placed {
                if candidate.intersects(other)? {
                    clear = false;
                    break;
                }
            }
            if clear {
                placed.push(candidate);
                break;
            }
            m += 1;
        }
    }
    Ok(placed.into_iter().map(|e| e.center).collect())
}

fn random_direction<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Parameters of one synthetic mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub k: usize,
    pub p: usize,
    /// Spread variation factor.
    pub zeta: f64,
    /// Anisotropy variation factor.
    pub xi: f64,
    /// Mahalanobis radius of the non-intersecting ellipsoids.
    pub z0: f64,
    /// Inclusive population range, used when `pop_fixed` is absent.
    pub pop_min: usize,
    pub pop_max: usize,
    pub pop_fixed: Option<usize>,
    pub skewed: bool,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.p == 0 {
            return Err(Error::invalid("k and p must be at least 1"));
        }
        if !(self.z0.is_finite() && self.z0 > 0.0) {
            return Err(Error::invalid("z0 must be positive"));
        }
        if !(self.zeta >= 0.0 && self.xi >= 0.0 && self.zeta.is_finite() && self.xi.is_finite()) {
            return Err(Error::invalid("zeta and xi must be non-negative"));
        }
        match self.pop_fixed {
            Some(0) => return Err(Error::invalid("pop_fixed must be at least 1")),
            Some(_) => {}
            None if self.pop_min == 0 || self.pop_min > self.pop_max => {
                return Err(Error::invalid(
                    "population range must satisfy 1 <= pop_min <= pop_max",
                ))
            }
            None => {}
        }
        Ok(())
    }
}

/// The five benchmark configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Isotropic, equal populations of 500, `z0 = 2.5`.
    Sim1,
    /// Anisotropic, populations 100..=1000, `zeta = 2`, `xi = 1.2`, `z0 = 2.5`.
    Sim2,
    /// `Sim2` with skewed non-Gaussian clusters.
    Sim3,
    /// `Sim1` packed tighter with `z0 = 1.7`.
    Sim4,
    /// `Sim2` in six dimensions.
    Sim5,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Sim1,
        Preset::Sim2,
        Preset::Sim3,
        Preset::Sim4,
        Preset::Sim5,
    ];

    pub fn spec(self, k: usize, seed: u64) -> SimulationSpec {
        let isotropic = SimulationSpec {
            k,
            p: 2,
            zeta: 0.0,
            xi: 0.0,
            z0: 2.5,
            pop_min: 500,
            pop_max: 500,
            pop_fixed: Some(500),
            skewed: false,
            seed,
        };
        let anisotropic = SimulationSpec {
            zeta: 2.0,
            xi: 1.2,
            pop_min: 100,
            pop_max: 1000,
            pop_fixed: None,
            ..isotropic.clone()
        };
        match self {
            Preset::Sim1 => isotropic,
            Preset::Sim2 => anisotropic,
            Preset::Sim3 => SimulationSpec {
                skewed: true,
                ..anisotropic
            },
            Preset::Sim4 => SimulationSpec {
                z0: 1.7,
                ..isotropic
            },
            Preset::Sim5 => SimulationSpec {
                p: 6,
                ..anisotropic
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Sim1 => "sim1",
            Preset::Sim2 => "sim2",
            Preset::Sim3 => "sim3",
            Preset::Sim4 => "sim4",
            Preset::Sim5 => "sim5",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown preset {s:?} (expected sim1..sim5)")))
    }
}

/// Cluster specifications drawn for `spec`, in label order.
pub fn draw_clusters<R: Rng + ?Sized>(
    spec: &SimulationSpec,
    rng: &mut R,
) -> Result<Vec<ClusterSpec>> {
    spec.validate()?;
    let covariances: Vec<DMatrix<f64>> = (0..spec.k)
        .map(|_| random_covariance(spec.p, spec.zeta, spec.xi, rng))
        .collect();
    let populations: Vec<usize> = (0..spec.k)
        .map(|_| match spec.pop_fixed {
            Some(n) => n,
            None => rng.random_range(spec.pop_min..=spec.pop_max),
        })
        .collect();
    let rotations: Vec<DMatrix<f64>> = (0..spec.k)
        .map(|_| {
            if spec.skewed {
                random_rotation(spec.p, rng)
            } else {
                DMatrix::identity(spec.p, spec.p)
            }
        })
        .collect();
    let centers = pack_clusters(spec.p, &covariances, spec.z0, rng)?;
    Ok(covariances
        .into_iter()
        .zip(populations)
        .zip(rotations)
        .zip(centers)
        .map(
            |(((covariance, population), skew_rotation), center)| ClusterSpec {
                center,
                covariance,
                population,
                skewed: spec.skewed,
                skew_rotation,
            },
        )
        .collect())
}

/// Samples a full data set with its true labels `1..=K`.
pub fn generate_dataset(spec: &SimulationSpec) -> Result<(DataMatrix, Labeling)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let clusters = draw_clusters(spec, &mut rng)?;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (k, cluster) in clusters.iter().enumerate() {
        let points = sample_cluster(cluster, &mut rng)?;
        values.extend_from_slice(points.as_slice());
        labels.extend(std::iter::repeat_n(k + 1, cluster.population));
    }
    let data = DataMatrix::new(labels.len(), spec.p, values)?;
    Ok((data, Labeling::from_contiguous(labels)?))
}

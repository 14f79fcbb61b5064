//! Point clouds over `[-10, 10]^2`: one lattice and 49 seeded uniform draws.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DOMAIN_MIN: f64 = -10.0;
pub const DOMAIN_MAX: f64 = 10.0;
pub const DOMAIN_WIDTH: f64 = DOMAIN_MAX - DOMAIN_MIN;
pub const CLOUD_COUNT: u32 = 50;
pub const DEFAULT_POINTS: usize = 441;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;

/// The splitmix64 generator: add the golden gamma, then mix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX2);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// First output of a generator seeded with `x`; used as a stateless hash.
pub fn splitmix64(x: u64) -> u64 {
    SplitMix64::new(x).next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CloudError {
    #[error("point count {0} is not a perfect square of at least 4")]
    NotSquare(usize),
    #[error("cloud id {0} is not in 1..{CLOUD_COUNT}")]
    BadId(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudKind {
    Canonical,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub id: u32,
    pub kind: CloudKind,
    /// Stream seed for random clouds.
    pub seed: Option<u64>,
    pub points: Vec<(f64, f64)>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Lattice points per side (`sqrt(len)`).
    pub fn side(&self) -> usize {
        lattice_side(self.points.len()).unwrap_or(0)
    }

    /// Spacing of the equivalent lattice, used to scale quiver arrows.
    pub fn pitch(&self) -> f64 {
        DOMAIN_WIDTH / (self.side().max(2) - 1) as f64
    }
}

pub fn lattice_side(points: usize) -> Option<usize> {
    let side = (points as f64).sqrt().round() as usize;
    (side >= 2 && side * side == points).then_some(side)
}

pub fn canonical_cloud() -> PointCloud {
    canonical_cloud_with(DEFAULT_POINTS).expect("441 is a square")
}

/// Lattice over `[-10, 10]^2` inclusive, `y` outer and `x` inner, ascending.
pub fn canonical_cloud_with(points: usize) -> Result<PointCloud, CloudError> {
    let side = lattice_side(points).ok_or(CloudError::NotSquare(points))?;
    let coord = |i: usize| {
        if i == side - 1 {
            DOMAIN_MAX
        } else {
            DOMAIN_MIN + DOMAIN_WIDTH * i as f64 / (side - 1) as f64
        }
    };
    let points = (0..side)
        .flat_map(|r| (0..side).map(move |c| (coord(c), coord(r))))
        .collect();
    Ok(PointCloud {
        id: 0,
        kind: CloudKind::Canonical,
        seed: None,
        points,
    })
}

pub fn random_cloud(master_seed: u64, cloud_id: u32) -> Result<PointCloud, CloudError> {
    random_cloud_with(master_seed, cloud_id, DEFAULT_POINTS)
}

pub fn random_cloud_with(
    master_seed: u64,
    cloud_id: u32,
    points: usize,
) -> Result<PointCloud, CloudError> {
    if cloud_id == 0 || cloud_id >= CLOUD_COUNT {
        return Err(CloudError::BadId(cloud_id));
    }
    lattice_side(points).ok_or(CloudError::NotSquare(points))?;
    let seed = splitmix64(master_seed ^ u64::from(cloud_id));
    let mut rng = SplitMix64::new(seed);
    let points = (0..points)
        .map(|_| {
            let x = DOMAIN_MIN + DOMAIN_WIDTH * rng.next_unit();
            let y = DOMAIN_MIN + DOMAIN_WIDTH * rng.next_unit();
            (x, y)
        })
        .collect();
    Ok(PointCloud {
        id: cloud_id,
        kind: CloudKind::Random,
        seed: Some(seed),
        points,
    })
}

pub fn cloud_suite(master_seed: u64) -> Vec<PointCloud> {
    cloud_suite_with(master_seed, DEFAULT_POINTS).expect("441 is a square")
}

pub fn cloud_suite_with(master_seed: u64, points: usize) -> Result<Vec<PointCloud>, CloudError> {
    let mut suite = vec![canonical_cloud_with(points)?];
    for id in 1..CLOUD_COUNT {
        suite.push(random_cloud_with(master_seed, id, points)?);
    }
    Ok(suite)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_outputs() {
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(g.next_u64(), 0x6e78_9e6a_a1b9_65f4);
        assert_eq!(g.next_u64(), 0x06c4_5d18_8009_454f);
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn lattice_layout() {
        let c = canonical_cloud();
        assert_eq!(c.len(), 441);
        assert_eq!(c.side(), 21);
        assert_eq!(c.pitch(), 1.0);
        assert_eq!(c.points[0], (-10.0, -10.0));
        assert_eq!(c.points[1], (-9.0, -10.0));
        assert_eq!(c.points[21], (-10.0, -9.0));
        assert_eq!(c.points[440], (10.0, 10.0));
        assert!(c.points.contains(&(0.0, 0.0)));
        for (i, (x, y)) in c.points.iter().enumerate() {
            assert_eq!(*x, (i % 21) as f64 - 10.0);
            assert_eq!(*y, (i / 21) as f64 - 10.0);
        }
    }

    #[test]
    fn random_clouds_are_half_open_and_deterministic() {
        let a = random_cloud(42, 7).unwrap();
        let b = random_cloud(42, 7).unwrap();
        assert_eq!(a, b);
        assert!(a
            .points
            .iter()
            .all(|(x, y)| (-10.0..10.0).contains(x) && (-10.0..10.0).contains(y)));
        assert_ne!(a, random_cloud(42, 8).unwrap());
        assert_eq!(a.seed, Some(splitmix64(42 ^ 7)));
    }

    #[test]
    fn suite_shape() {
        let s = cloud_suite(42);
        assert_eq!(s.len(), 50);
        assert_eq!(s[0], canonical_cloud());
        assert!(s.iter().all(|c| c.len() == 441));
        assert!(s[1..].iter().all(|c| c.kind == CloudKind::Random));
        let t = cloud_suite(43);
        assert!(s[1..].iter().zip(&t[1..]).all(|(a, b)| a.points != b.points));
    }

    #[test]
    fn coordinate_mean_near_zero() {
        let s = cloud_suite(42);
        let (sum, n) = s[1..]
            .iter()
            .flat_map(|c| c.points.iter())
            .fold((0.0, 0usize), |(acc, n), (x, y)| (acc + x + y, n + 2));
        assert!((sum / n as f64).abs() < 0.5);
    }

    #[test]
    fn point_override() {
        assert_eq!(canonical_cloud_with(9).unwrap().points[4], (0.0, 0.0));
        assert_eq!(canonical_cloud_with(10), Err(CloudError::NotSquare(10)));
        assert_eq!(canonical_cloud_with(1), Err(CloudError::NotSquare(1)));
        assert_eq!(random_cloud(1, 0), Err(CloudError::BadId(0)));
        assert_eq!(random_cloud(1, 50), Err(CloudError::BadId(50)));
        assert_eq!(cloud_suite_with(5, 16).unwrap()[3].len(), 16);
    }
}

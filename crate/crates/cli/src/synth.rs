//! Synthetic datasets.
//!
//! [`generate_synthetic`] draws a random domain of points and builds each
//! trajectory as a short tour through a random subset of it.
//! [`road_network`] produces GPS-like traces along a grid street network,
//! used as a stand-in when a real city dataset is not available.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subtraj::{Point, Trajectory};

/// Side length of the square the domain is drawn from.
pub const DOMAIN_SIDE: f64 = 1000.0;

/// `trajectories` tours, each through `c_percent` of a shared random domain
/// of `domain_size` points, ordered by nearest neighbour then 2-opt.
pub fn generate_synthetic(domain_size: usize, trajectories: usize, c_percent: f64, seed: u64) -> Vec<Trajectory> {
    assert!(domain_size >= 2, "domain needs at least two points");
    assert!(c_percent > 0.0 && c_percent <= 100.0, "c must lie in (0, 100]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain: Vec<Point> = (0..domain_size)
        .map(|_| Point::new(rng.gen_range(0.0..DOMAIN_SIDE), rng.gen_range(0.0..DOMAIN_SIDE)))
        .collect();
    let k = ((domain_size as f64 * c_percent / 100.0).round() as usize).clamp(1, domain_size);
    (0..trajectories)
        .map(|_| {
            let mut picked = sample(&mut rng, domain_size, k).into_vec();
            picked.sort_unstable();
            let order = two_opt(&domain, nearest_neighbour_order(&domain, &picked));
            Trajectory::new(order.iter().map(|&i| domain[i]).collect()).expect("finite points")
        })
        .collect()
}

/// Greedy open tour from the lowest index; ties go to the lower index.
fn nearest_neighbour_order(domain: &[Point], picked: &[usize]) -> Vec<usize> {
    let mut left: Vec<usize> = picked.to_vec();
    let mut out = Vec::with_capacity(left.len());
    let mut cur = left.remove(0);
    out.push(cur);
    while !left.is_empty() {
        let (k, _) = left
            .iter()
            .enumerate()
            .map(|(k, &i)| (k, domain[cur].dist_sq(&domain[i])))
            .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
        cur = left.remove(k);
        out.push(cur);
    }
    out
}

/// Open-path 2-opt: reverse `tour[i..=j]` while that shortens the path.
fn two_opt(domain: &[Point], mut tour: Vec<usize>) -> Vec<usize> {
    let d = |a: usize, b: usize| domain[a].dist(&domain[b]);
    let n = tour.len();
    for _ in 0..50 {
        let mut improved = false;
        for i in 1..n {
            for j in i + 1..n {
                let before = d(tour[i - 1], tour[i]) + if j + 1 < n { d(tour[j], tour[j + 1]) } else { 0.0 };
                let after = d(tour[i - 1], tour[j]) + if j + 1 < n { d(tour[i], tour[j + 1]) } else { 0.0 };
                if after + 1e-9 < before {
                    tour[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    tour
}

/// Street grid parameters for [`road_network`].
#[derive(Debug, Clone, Copy)]
pub struct RoadGrid {
    pub blocks: usize,
    pub spacing: f64,
    /// Range of distances between consecutive samples along a street.
    pub step: (f64, f64),
    /// Half-width of the uniform position noise.
    pub noise: f64,
}

impl Default for RoadGrid {
    fn default() -> Self {
        Self { blocks: 6, spacing: 300.0, step: (25.0, 55.0), noise: 6.0 }
    }
}

/// `trajectories` noisy traces along a grid street network with
/// `total_vertices` vertices in total, spread as evenly as possible.
pub fn road_network(trajectories: usize, total_vertices: usize, grid: RoadGrid, seed: u64) -> Vec<Trajectory> {
    assert!(trajectories > 0 && total_vertices >= trajectories);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = total_vertices / trajectories;
    let extra = total_vertices % trajectories;
    let dirs = [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)];
    let last = grid.blocks as i64;
    (0..trajectories)
        .map(|t| {
            let len = base + usize::from(t < extra);
            let mut node = (rng.gen_range(0..=last), rng.gen_range(0..=last));
            let mut dir = rng.gen_range(0..4usize);
            let mut pos = 0.0f64;
            let mut pts = Vec::with_capacity(len);
            while pts.len() < len {
                let (dx, dy) = dirs[dir];
                let next = (node.0 + dx, node.1 + dy);
                if !(0..=last).contains(&next.0) || !(0..=last).contains(&next.1) {
                    dir = (dir + 1 + 2 * rng.gen_range(0..2usize)) % 4;
                    continue;
                }
                while pos <= grid.spacing && pts.len() < len {
                    let x = (node.0 as f64 + dx as f64 * pos / grid.spacing) * grid.spacing;
                    let y = (node.1 as f64 + dy as f64 * pos / grid.spacing) * grid.spacing;
                    pts.push(Point::new(
                        x + rng.gen_range(-grid.noise..=grid.noise),
                        y + rng.gen_range(-grid.noise..=grid.noise),
                    ));
                    pos += rng.gen_range(grid.step.0..grid.step.1);
                }
                pos -= grid.spacing;
                node = next;
                let r: f64 = rng.gen();
                if r < 0.2 {
                    dir = (dir + 1) % 4;
                } else if r < 0.4 {
                    dir = (dir + 3) % 4;
                }
            }
            Trajectory::new(pts).expect("finite points")
        })
        .collect()
}

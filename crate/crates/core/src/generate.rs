//! Random instance families: thinned transitive closures (set A) and
//! interval-order graphs imitating crew pairings (set C).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GenError;
use crate::graph::{Instance, Node};

/// One month of minutes.
pub const HORIZON: f64 = 43_200.0;

const TUNING_ATTEMPTS: usize = 50;
const BISECTION_STEPS: usize = 60;
// Clipped durations of one horizon still leave density near 1/3; longer
// scales push more intervals against the horizon end.
const MAX_SCALE: f64 = 1000.0 * HORIZON;

fn check_prob(name: &str, p: f64, allow_zero: bool) -> Result<(), GenError> {
    let ok = p <= 1.0 && if allow_zero { p >= 0.0 } else { p > 0.0 };
    if ok {
        Ok(())
    } else {
        Err(GenError::Parameter(format!(
            "{name} = {p} outside its range"
        )))
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn weakly_connected(n: usize, arcs: &[(Node, Node)], keep: &[bool]) -> bool {
    let mut parent: Vec<usize> = (0..=n).collect();
    let mut comps = n;
    for (&(u, v), _) in arcs.iter().zip(keep).filter(|(_, &k)| k) {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps <= 1
}

/// Transitive closure of the path `1..n`, thinned by removing each arc with
/// probability `1 − p_a` unless the removal disconnects the graph; then each
/// arc becomes mandatory with probability `p_ac`.
pub fn gen_set_a(n: usize, p_a: f64, p_ac: f64, seed: u64) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::Parameter("n must be at least 1".into()));
    }
    check_prob("p_a", p_a, false)?;
    check_prob("p_ac", p_ac, true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let closure: Vec<(Node, Node)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let remove: Vec<bool> = closure
        .iter()
        .map(|_| rng.gen::<f64>() < 1.0 - p_a)
        .collect();
    let mut keep = vec![true; closure.len()];
    for a in 0..closure.len() {
        if remove[a] {
            keep[a] = false;
            if !weakly_connected(n, &closure, &keep) {
                keep[a] = true;
            }
        }
    }
    let arcs: Vec<(Node, Node)> = closure
        .into_iter()
        .zip(&keep)
        .filter_map(|(arc, &k)| k.then_some(arc))
        .collect();
    let mandatory: Vec<usize> = (0..arcs.len())
        .filter(|_| rng.gen::<f64>() < p_ac)
        .collect();
    Ok(Instance::new(crate::graph::Dag::new(n, arcs)?, mandatory)?)
}

struct Intervals {
    start: Vec<f64>,
    unit: Vec<f64>,
}

impl Intervals {
    fn end(&self, i: usize, scale: f64) -> f64 {
        (self.start[i] + scale * self.unit[i]).min(HORIZON)
    }

    fn arcs(&self, scale: f64) -> Vec<(usize, usize)> {
        let n = self.start.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.end(i, scale) < self.start[j])
            .collect()
    }
}

/// Interval-order DAG with `n` pairings in a one-month horizon. Durations
/// are scaled by bisection until the density is within 10% of
/// `density`; arcs whose idle gap is among the largest
/// `⌈sparsity·|A|⌉` become mandatory.
pub fn gen_set_c(n: usize, density: f64, sparsity: f64, seed: u64) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::Parameter("n must be at least 1".into()));
    }
    check_prob("density", density, false)?;
    check_prob("sparsity", sparsity, false)?;
    if n == 1 {
        return Ok(Instance::from_pairs(1, vec![], &[])?);
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..TUNING_ATTEMPTS {
        let mut start: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * HORIZON).collect();
        start.sort_by(f64::total_cmp);
        let unit = (0..n).map(|_| rng.gen::<f64>()).collect();
        let iv = Intervals { start, unit };
        let (mut lo, mut hi) = (0.0, MAX_SCALE);
        let mut best: Option<(f64, f64)> = None;
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let d = iv.arcs(mid).len() as f64 / pairs;
            if best.is_none_or(|(_, bd)| (d - density).abs() < (bd - density).abs()) {
                best = Some((mid, d));
            }
            if d > density {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (scale, d) = best.unwrap();
        if (d - density).abs() > 0.1 * density {
            continue;
        }
        let arcs = iv.arcs(scale);
        let gaps: Vec<f64> = arcs
            .iter()
            .map(|&(i, j)| iv.start[j] - iv.end(i, scale))
            .collect();
        let mandatory: Vec<usize> = if arcs.is_empty() {
            Vec::new()
        } else {
            let k = (sparsity * arcs.len() as f64).ceil() as usize;
            let mut sorted = gaps.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let threshold = sorted[k.clamp(1, sorted.len()) - 1];
            (0..arcs.len()).filter(|&a| gaps[a] >= threshold).collect()
        };
        let labelled = arcs.into_iter().map(|(i, j)| (i + 1, j + 1)).collect();
        return Ok(Instance::new(
            crate::graph::Dag::new(n, labelled)?,
            mandatory,
        )?);
    }
    Err(GenError::Tuning(TUNING_ATTEMPTS))
}

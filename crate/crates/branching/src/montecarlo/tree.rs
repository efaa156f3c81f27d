use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use super::{mean_stderr, par_trajectories, pick, ExitTimeRecord, Trajectory};
use crate::chains::{FibWalk, Move, TreeWalk};
use crate::error::{invalid, Result};
use crate::fusscat::fuss_catalan;
use crate::graphs::{EndSpec, Word};
use crate::scalar::rational_to_f64;

/// Levels past `t_k` the walk must reach along the end before `N_k` is declared final is twice this.
pub const DEFAULT_MARGIN: usize = 30;

/// A single walker on a tree, stored as its label word.
pub struct TreeRunner<'a> {
    walk: &'a dyn TreeWalk<f64>,
    labels: Vec<u8>,
    /// Common prefix length with the walk's own end.
    agree: usize,
}

impl<'a> TreeRunner<'a> {
    pub fn new(walk: &'a dyn TreeWalk<f64>) -> TreeRunner<'a> {
        let start = walk.start();
        let agree = walk.end().map_or(0, |e| e.agreement(&start));
        TreeRunner {
            walk,
            labels: start.labels().to_vec(),
            agree,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self) -> u32 {
        self.labels.last().map_or(1, |&l| l as u32)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Common prefix length with the walk's end (0 without one).
    pub fn agreement(&self) -> usize {
        self.agree
    }

    pub fn on_end(&self) -> bool {
        self.walk.end().is_some() && self.agree == self.labels.len()
    }

    pub fn word(&self) -> Word {
        Word::new(self.walk.order(), self.labels.clone()).expect("walk stays on the tree")
    }

    pub fn step(&mut self, rng: &mut impl Rng) -> Result<()> {
        let moves = self.walk.local_moves(self.len(), self.label(), self.on_end())?;
        let (m, _) = moves[pick(moves.iter().map(|(_, p)| *p), rng)];
        match m {
            Move::Parent => {
                self.labels.pop();
                self.agree = self.agree.min(self.labels.len());
            }
            Move::Child(l) => {
                let len = self.labels.len();
                if let Some(end) = self.walk.end() {
                    if self.agree == len && end.label_at(len + 1) == l {
                        self.agree += 1;
                    }
                }
                self.labels.push(l as u8);
            }
        }
        Ok(())
    }
}

/// Word keys visited by `count` walkers over `steps` steps.
pub fn sample_walk_trajectories(
    walk: &dyn TreeWalk<f64>,
    steps: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Trajectory>> {
    par_trajectories(count, seed, |id, rng| {
        let mut r = TreeRunner::new(walk);
        let mut vertices = vec![r.word().key()];
        for _ in 0..steps {
            r.step(rng)?;
            vertices.push(r.word().key());
        }
        Ok(Trajectory {
            id,
            seed: super::derive_seed(seed, id as u64),
            vertices,
        })
    })
}

/// `C^2_n eta^n`, the probability of being back at the root after `2n` steps.
pub fn exact_return_probability(eta: f64, n: u64) -> Result<f64> {
    let c = fuss_catalan(2, n)?;
    Ok(rational_to_f64(&BigRational::from_integer(c.into())) * eta.powi(n as i32))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReturnEstimate {
    pub eta: f64,
    pub n: u64,
    pub count: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub exact: f64,
}

impl ReturnEstimate {
    /// Distance from the exact value in standard errors (0 when both agree exactly).
    pub fn sigmas(&self) -> f64 {
        let diff = (self.estimate - self.exact).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

/// Frequency of being at the root after `2n` steps of the rooted walk towards `end`.
pub fn empirical_return_probability(end: &EndSpec, eta: f64, n: u64, count: usize, seed: u64) -> Result<ReturnEstimate> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let steps = 2 * n as usize;
    let walk = FibWalk::new(end.clone(), eta, false, steps + 1)?;
    let hits = par_trajectories(count, seed, |_, rng| {
        let mut r = TreeRunner::new(&walk);
        for _ in 0..steps {
            r.step(rng)?;
        }
        Ok(r.is_empty())
    })?;
    let p = hits.iter().filter(|&&h| h).count() as f64 / count as f64;
    Ok(ReturnEstimate {
        eta,
        n,
        count,
        estimate: p,
        stderr: (p * (1.0 - p) / count as f64).sqrt(),
        exact: exact_return_probability(eta, n)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    pub walk: String,
    pub horizons: Vec<usize>,
    pub count: usize,
    /// Mean number of returns to the start vertex within each horizon.
    pub mean_returns: Vec<f64>,
    /// Fraction of walkers with more returns at the last horizon than at the first.
    pub growing_fraction: f64,
}

/// Root-return counts at increasing horizons.
pub fn recurrence_probe(walk: &dyn TreeWalk<f64>, horizons: &[usize], count: usize, seed: u64) -> Result<RecurrenceReport> {
    if horizons.is_empty() || horizons.windows(2).any(|h| h[1] <= h[0]) {
        return invalid("horizons must be nonempty and increasing");
    }
    let start = walk.start().len();
    let last = *horizons.last().unwrap();
    let counts = par_trajectories(count, seed, |_, rng| {
        let mut r = TreeRunner::new(walk);
        let mut returns = 0u64;
        let mut out = Vec::with_capacity(horizons.len());
        let mut h = 0;
        for step in 1..=last {
            r.step(rng)?;
            if r.len() == start {
                returns += 1;
            }
            if step == horizons[h] {
                out.push(returns);
                h += 1;
            }
        }
        Ok(out)
    })?;
    let mean_returns = (0..horizons.len())
        .map(|h| counts.iter().map(|c| c[h] as f64).sum::<f64>() / count as f64)
        .collect();
    let growing = counts.iter().filter(|c| c[c.len() - 1] > c[0]).count();
    Ok(RecurrenceReport {
        walk: walk.describe(),
        horizons: horizons.to_vec(),
        count,
        mean_returns,
        growing_fraction: growing as f64 / count as f64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub walk: String,
    pub end: String,
    pub steps: usize,
    pub threshold: usize,
    pub count: usize,
    /// Fraction of walkers whose final position shares at least `threshold` labels with the end.
    pub fraction: f64,
    pub mean_agreement: f64,
}

/// Common prefix of the final position with `end`, thresholded.
pub fn convergence_to_end(
    walk: &dyn TreeWalk<f64>,
    end: &EndSpec,
    steps: usize,
    threshold: usize,
    count: usize,
    seed: u64,
) -> Result<ConvergenceReport> {
    let agreements = par_trajectories(count, seed, |_, rng| {
        let mut r = TreeRunner::new(walk);
        for _ in 0..steps {
            r.step(rng)?;
        }
        Ok(end.agreement(&r.word()))
    })?;
    let hits = agreements.iter().filter(|&&a| a >= threshold).count();
    Ok(ConvergenceReport {
        walk: walk.describe(),
        end: end.describe(),
        steps,
        threshold,
        count,
        fraction: hits as f64 / count as f64,
        mean_agreement: agreements.iter().sum::<usize>() as f64 / count as f64,
    })
}

/// Last passages `N_1..N_k_max` of the rooted walk, by direct simulation up to `horizon` steps.
///
/// `N_k` is declared once the walk is `2 * margin` levels past `t_k` along the end; records
/// not declared by the horizon, or revisited after declaration, are censored.
#[allow(clippy::too_many_arguments)]
pub fn exit_times_direct(
    end: &EndSpec,
    eta: f64,
    k_max: usize,
    horizon: usize,
    margin: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<ExitTimeRecord>> {
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    let walk = FibWalk::new(end.clone(), eta, false, horizon + 1)?;
    let per = par_trajectories(count, seed, |id, rng| {
        let mut r = TreeRunner::new(&walk);
        let mut last = vec![0u64; k_max + 1];
        let mut declared = vec![false; k_max + 1];
        let mut violated = vec![false; k_max + 1];
        let mut step = 0u64;
        while step < horizon as u64 && !declared[k_max] {
            r.step(rng)?;
            step += 1;
            if r.on_end() && r.len() <= k_max {
                let k = r.len();
                last[k] = step;
                if declared[k] {
                    violated[k] = true;
                }
            }
            let reach = r.agreement();
            for (k, d) in declared.iter_mut().enumerate() {
                if !*d && reach >= k + 2 * margin {
                    *d = true;
                }
            }
        }
        Ok((1..=k_max)
            .map(|k| {
                let r_k = end.label_sum(k);
                ExitTimeRecord {
                    traj_id: id,
                    k,
                    n_k: last[k],
                    r_k,
                    ratio: (last[k] as f64 - k as f64) / r_k as f64,
                    censored: !declared[k] || violated[k],
                }
            })
            .collect::<Vec<_>>())
    })?;
    Ok(per.into_iter().flatten().collect())
}

/// Mean and standard error of `N_k - k` over uncensored records.
pub fn excess_stats(records: &[ExitTimeRecord], k: usize) -> (f64, f64) {
    let xs: Vec<f64> = records
        .iter()
        .filter(|r| r.k == k && !r.censored)
        .map(|r| r.n_k as f64 - k as f64)
        .collect();
    mean_stderr(&xs)
}

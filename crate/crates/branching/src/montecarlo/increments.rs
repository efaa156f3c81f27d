use rand::Rng;
use serde::Serialize;

use super::{mean_stderr, par_trajectories, ExitTimeRecord};
use crate::error::{invalid, Result};
use crate::fusscat::{critical_point, g_eval, increment_mean, lln_limit};
use crate::graphs::EndSpec;

/// Largest loop half-length `n` tabulated for `Y^(j)`; longer draws are censored.
pub const Y_TABLE_CAP: usize = 1 << 20;

/// Tail mass below which a table is cut without censoring.
const TAIL_CUTOFF: f64 = 1e-12;

/// Inverse-CDF table of `Y^(j)`, with `P[Y = 2n] = C^j_n eta^n / G^j`.
#[derive(Debug, Clone)]
pub struct YTable {
    s: u32,
    j: u32,
    eta: f64,
    cumulative: Vec<f64>,
    tail: f64,
}

impl YTable {
    pub fn new(s: u32, j: u32, eta: f64, cap: usize) -> Result<YTable> {
        if j == 0 || j > s {
            return invalid(format!("Y^({j}) needs 1 <= j <= s = {s}"));
        }
        let g = g_eval::<f64>(s, eta)?.value;
        let mut t = g.powi(-(j as i32));
        let mut acc = 0.0;
        let mut cumulative = Vec::new();
        let (s1, sf, jf) = ((s + 1) as f64, s as f64, j as f64);
        for n in 0..cap {
            acc += t;
            cumulative.push(acc);
            if 1.0 - acc < TAIL_CUTOFF {
                break;
            }
            let nf = n as f64;
            let mut ratio = eta / (nf + 1.0);
            for i in 0..=s {
                ratio *= s1 * nf + jf + i as f64;
            }
            for i in 1..=s {
                ratio /= sf * nf + jf + i as f64;
            }
            t *= ratio;
            if t == 0.0 {
                break;
            }
        }
        let tail = (1.0 - acc).max(0.0);
        Ok(YTable {
            s,
            j,
            eta,
            cumulative,
            tail,
        })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `P[Y = 2n]`.
    pub fn prob(&self, n: usize) -> f64 {
        match n {
            0 => self.cumulative.first().copied().unwrap_or(0.0),
            _ if n < self.cumulative.len() => self.cumulative[n] - self.cumulative[n - 1],
            _ => 0.0,
        }
    }

    /// Mass beyond the table.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Tabulated support size.
    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// A draw of `Y`, and whether it fell past the table.
    pub fn sample(&self, rng: &mut impl Rng) -> (u64, bool) {
        let u: f64 = rng.gen();
        let n = self.cumulative.partition_point(|&c| c <= u);
        if n < self.cumulative.len() {
            (2 * n as u64, false)
        } else if self.tail < TAIL_CUTOFF {
            (2 * (self.cumulative.len() as u64 - 1), false)
        } else {
            (2 * self.cumulative.len() as u64, true)
        }
    }
}

fn tables(s: u32, eta: f64) -> Result<Vec<YTable>> {
    let crit: f64 = critical_point(s);
    if !(0.0..=crit).contains(&eta) {
        return invalid(format!("eta = {eta} outside [0, {crit}]"));
    }
    (1..=s).map(|j| YTable::new(s, j, eta, Y_TABLE_CAP)).collect()
}

/// Calls `record(k, N_k, censored)` for `k = 1..=k_max`.
fn increment_run(
    tables: &[YTable],
    end: &EndSpec,
    k_max: usize,
    rng: &mut impl Rng,
    mut record: impl FnMut(usize, u64, bool),
) {
    // loops at the root, which has a single child
    let (mut n, mut censored) = tables[0].sample(rng);
    for k in 1..=k_max {
        let (y, c) = tables[end.label_at(k) as usize - 1].sample(rng);
        n += 1 + y;
        censored |= c;
        record(k, n, censored);
    }
}

/// Last passages of the rooted walk built from independent loop lengths.
pub fn exit_times_increments(end: &EndSpec, eta: f64, k_max: usize, count: usize, seed: u64) -> Result<Vec<ExitTimeRecord>> {
    let tables = tables(end.order(), eta)?;
    let per = par_trajectories(count, seed, |id, rng| {
        let mut out = Vec::with_capacity(k_max);
        increment_run(&tables, end, k_max, rng, |k, n_k, censored| {
            let r_k = end.label_sum(k);
            out.push(ExitTimeRecord {
                traj_id: id,
                k,
                n_k,
                r_k,
                ratio: (n_k - k as u64) as f64 / r_k as f64,
                censored,
            });
        });
        Ok(out)
    })?;
    Ok(per.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct LlnSummary {
    pub end: String,
    pub eta: f64,
    pub k_max: usize,
    pub count: usize,
    /// Mean of `(N_k - k) / r(t_k)` at `k_max`.
    pub mean: f64,
    pub stderr: f64,
    /// `lln_limit(eta)`; `None` at the critical point or for `s != 2`.
    pub target: Option<f64>,
    /// `E[Y^(1)]`, the limit implied by the loop decomposition.
    pub increment_limit: Option<f64>,
    pub half_k: usize,
    pub half_mean: f64,
    pub half_stderr: f64,
    pub quantiles: [f64; 3],
    pub censored_records: usize,
}

impl LlnSummary {
    /// Relative error of the mean against `target`.
    pub fn relative_error(&self) -> Option<f64> {
        self.target.map(|t| if t == 0.0 { self.mean.abs() } else { (self.mean - t).abs() / t })
    }
}

/// Distribution of `(N_k - k) / r(t_k)` at `k_max` and `k_max / 2`, from increment sampling.
pub fn lln_experiment(end: &EndSpec, eta: f64, k_max: usize, count: usize, seed: u64) -> Result<LlnSummary> {
    if k_max < 2 {
        return invalid("k_max must be at least 2");
    }
    let s = end.order();
    let tables = tables(s, eta)?;
    let half_k = k_max / 2;
    let rows = par_trajectories(count, seed, |_, rng| {
        let mut half = (0.0, false);
        let mut full = (0.0, false);
        increment_run(&tables, end, k_max, rng, |k, n_k, c| {
            let ratio = (n_k - k as u64) as f64 / end.label_sum(k) as f64;
            if k == half_k {
                half = (ratio, c);
            }
            if k == k_max {
                full = (ratio, c);
            }
        });
        Ok((half, full))
    })?;
    let mut full: Vec<f64> = rows.iter().map(|r| r.1 .0).collect();
    let half: Vec<f64> = rows.iter().map(|r| r.0 .0).collect();
    let censored_records = rows.iter().filter(|r| r.1 .1).count();
    let (mean, stderr) = mean_stderr(&full);
    let (half_mean, half_stderr) = mean_stderr(&half);
    full.sort_by(f64::total_cmp);
    let q = |p: f64| full[((full.len() - 1) as f64 * p).round() as usize];
    let quantiles = [q(0.05), q(0.5), q(0.95)];
    let target = if s == 2 { lln_limit(eta).ok() } else { None };
    Ok(LlnSummary {
        end: end.describe(),
        eta,
        k_max,
        count,
        mean,
        stderr,
        target,
        increment_limit: increment_mean(s, 1, eta).ok(),
        half_k,
        half_mean,
        half_stderr,
        quantiles,
        censored_records,
    })
}

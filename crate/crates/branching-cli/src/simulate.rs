use std::fmt::Write as _;

use branching::chains::{AuxWalk, FibWalk, TreeWalk};
use branching::montecarlo::{
    convergence_to_end, empirical_return_probability, excess_stats, exit_records_csv, exit_times_direct,
    exit_times_increments, lln_experiment, recurrence_probe, sample_walk_trajectories, su2_moment, trajectories_csv,
};
use serde_json::{json, Value};

use crate::args::{Cli, Experiment, Method, SimulateArgs, WalkKind};
use crate::chain::{end_spec, Param};
use crate::output::{config_err, csv_header, emit_pair, metadata, CliError, CliResult};

fn float(name: &str, text: &str) -> CliResult<f64> {
    Ok(Param::parse(name, text)?.to_f64())
}

fn horizons(text: &str) -> CliResult<Vec<usize>> {
    let hs: Vec<usize> = text
        .split(',')
        .map(|h| h.trim().parse().map_err(|_| CliError::Config(format!("bad horizon {h:?}"))))
        .collect::<CliResult<_>>()?;
    if hs.is_empty() || hs.windows(2).any(|w| w[0] >= w[1]) {
        return config_err("--horizons must be increasing");
    }
    Ok(hs)
}

fn walk(a: &SimulateArgs, eta: f64, depth: usize) -> CliResult<Box<dyn TreeWalk<f64>>> {
    Ok(match a.walk {
        WalkKind::Fib => Box::new(FibWalk::new(end_spec(a.s, Some(&a.end))?, eta, a.derooted, depth)?),
        WalkKind::Aux => {
            if a.s != 2 || a.derooted {
                return config_err("the auxiliary walk runs on the rooted Fibonacci tree (s = 2)");
            }
            Box::new(AuxWalk::new(2, eta)?)
        }
    })
}

pub fn run(a: &SimulateArgs, cli: &Cli) -> CliResult<()> {
    if a.count == 0 {
        return config_err("--count must be positive");
    }
    let eta = float("eta", &a.eta)?;
    let (csv, summary): (String, Value) = match a.experiment {
        Experiment::Returns => {
            if a.s != 2 || a.derooted {
                return config_err("returns are computed for the rooted Fibonacci tree");
            }
            let end = end_spec(2, Some(&a.end))?;
            let mut csv = String::from("n,estimate,stderr,exact,sigmas\n");
            let mut rows = Vec::new();
            for n in 1..=a.n {
                let r = empirical_return_probability(&end, eta, n, a.count, a.seed)?;
                writeln!(csv, "{n},{:?},{:?},{:?},{:?}", r.estimate, r.stderr, r.exact, r.sigmas()).unwrap();
                rows.push(json!({"n": n, "estimate": r.estimate, "stderr": r.stderr, "exact": r.exact, "sigmas": r.sigmas()}));
            }
            (csv, json!({"returns": rows}))
        }
        Experiment::ExitTimes => {
            if a.s != 2 || a.derooted {
                return config_err("exit times are computed for the rooted Fibonacci tree");
            }
            let end = end_spec(2, Some(&a.end))?;
            let records = match a.method {
                Method::Increments => exit_times_increments(&end, eta, a.k, a.count, a.seed)?,
                Method::Direct => exit_times_direct(&end, eta, a.k, a.horizon, a.margin, a.count, a.seed)?,
            };
            let (mean, stderr) = excess_stats(&records, a.k);
            let censored = records.iter().filter(|r| r.censored).count();
            (
                exit_records_csv(&records),
                json!({"k": a.k, "mean_excess": mean, "stderr": stderr, "records": records.len(), "censored": censored}),
            )
        }
        Experiment::Lln => {
            if a.s != 2 || a.derooted {
                return config_err("the LLN experiment runs on the rooted Fibonacci tree");
            }
            let end = end_spec(2, Some(&a.end))?;
            let s = lln_experiment(&end, eta, a.k, a.count, a.seed)?;
            let records = exit_times_increments(&end, eta, a.k, a.count, a.seed)?;
            let mut body = serde_json::to_value(&s).unwrap();
            body["relative_error"] = json!(s.relative_error());
            (exit_records_csv(&records), json!({"lln": body}))
        }
        Experiment::Convergence => {
            let end = end_spec(a.s, Some(&a.end))?;
            let w = walk(a, eta, a.steps + 2)?;
            let r = convergence_to_end(w.as_ref(), &end, a.steps, a.threshold, a.count, a.seed)?;
            let csv = format!(
                "steps,threshold,count,fraction,mean_agreement\n{},{},{},{:?},{:?}\n",
                r.steps, r.threshold, r.count, r.fraction, r.mean_agreement
            );
            (csv, json!({"convergence": r}))
        }
        Experiment::Recurrence => {
            let hs = horizons(&a.horizons)?;
            let w = walk(a, eta, hs.last().unwrap() + 2)?;
            let r = recurrence_probe(w.as_ref(), &hs, a.count, a.seed)?;
            let mut csv = String::from("horizon,mean_returns\n");
            for (h, m) in r.horizons.iter().zip(&r.mean_returns) {
                writeln!(csv, "{h},{m:?}").unwrap();
            }
            (csv, json!({"recurrence": r}))
        }
        Experiment::Su2 => {
            let (l1, l2) = (float("l1", &a.l1)?, float("l2", &a.l2)?);
            let n = u32::try_from(a.n).map_err(|_| CliError::Config("--n too large".into()))?;
            let m = su2_moment(l1, l2, n, a.order)?;
            let csv = format!("l1,l2,n,value,error_estimate,order\n{l1:?},{l2:?},{n},{:?},{:?},{}\n", m.value, m.error_estimate, m.order);
            (csv, json!({"su2": m}))
        }
        Experiment::Trajectories => {
            let w = walk(a, eta, a.steps + 2)?;
            let t = sample_walk_trajectories(w.as_ref(), a.steps, a.count, a.seed)?;
            let depth: Vec<usize> = t.iter().map(|t| t.vertices.last().map_or(0, |v| v.chars().count())).collect();
            let mean = depth.iter().sum::<usize>() as f64 / depth.len() as f64;
            (trajectories_csv(&t), json!({"trajectories": t.len(), "steps": a.steps, "mean_final_length": mean}))
        }
    };
    let meta = metadata(cli, json!({"experiment": a.experiment}));
    let mut body = json!({"meta": meta});
    if let (Value::Object(b), Value::Object(s)) = (&mut body, summary) {
        b.extend(s);
    }
    emit_pair(cli.out.as_deref(), &(csv_header(&meta) + &csv), &body)
}

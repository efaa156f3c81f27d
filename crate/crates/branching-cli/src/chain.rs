use std::fmt::Write as _;

use branching::chains::{
    aux_walk, ballot_chain, constant_up_chain, fib_walk, motzkin_chain, verify_centrality, AuxWalk, ChainModel, FibWalk,
    TreeWalk,
};
use branching::graphs::{EndSpec, Word};
use branching::scalar::parse_rational;
use branching::{csv_field, Algebraic, GenFnScalar, Rational, Scalar};
use serde_json::{json, Value};

use crate::args::{ChainArgs, ChainKind, Cli};
use crate::output::{config_err, csv_header, emit, metadata, CliError, CliResult};

/// A parameter given either as `p/q` (exact) or as a decimal (floating).
#[derive(Debug, Clone)]
pub enum Param {
    Exact(Rational),
    Float(f64),
}

impl Param {
    pub fn parse(name: &str, text: &str) -> CliResult<Param> {
        let t = text.trim();
        if t.contains(['.', 'e', 'E']) {
            match t.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Param::Float(x)),
                _ => config_err(format!("--{name}: cannot parse {text:?}")),
            }
        } else {
            match parse_rational(t) {
                Some(q) => Ok(Param::Exact(q)),
                None => config_err(format!("--{name}: cannot parse {text:?}")),
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Param::Exact(q) => q.to_f64(),
            Param::Float(x) => *x,
        }
    }
}

fn required(name: &str, value: &Option<String>) -> CliResult<Param> {
    match value {
        Some(v) => Param::parse(name, v),
        None => config_err(format!("--{name} is required for this chain")),
    }
}

pub fn end_spec(s: u32, text: Option<&str>) -> CliResult<EndSpec> {
    match text {
        None => Ok(EndSpec::top_ray(s)),
        Some(t) => Ok(EndSpec::parse(s, t)?),
    }
}

/// Crossing products on tree edges down to `depth`.
/// Root edges are left out of the deviation when `skip_root` is set.
fn crossing_table<S: Scalar>(walk: &dyn TreeWalk<S>, depth: usize, skip_root: bool) -> CliResult<(String, Value)> {
    let eta = walk.eta().clone();
    let mut out = String::from("from,to,p_forward,p_back,product\n");
    let (mut edges, mut off_eta) = (0usize, 0usize);
    let mut worst = 0.0f64;
    let start_len = walk.start().len();
    let mut stack: Vec<Word> = vec![walk.start()];
    while let Some(v) = stack.pop() {
        if v.len() >= depth + start_len {
            continue;
        }
        for (w, p) in walk.moves(&v)? {
            if w.len() < v.len() {
                continue;
            }
            let back = walk
                .moves(&w)?
                .into_iter()
                .find(|(x, _)| *x == v)
                .map(|(_, q)| q)
                .ok_or_else(|| CliError::Internal("missing reverse edge".into()))?;
            let prod = p.clone() * back.clone();
            let equal = if S::EXACT {
                prod == eta
            } else {
                (prod.to_f64() - eta.to_f64()).abs() <= 1e-12
            };
            if !equal {
                off_eta += 1;
            }
            if !(skip_root && v.len() == start_len) {
                worst = worst.max((prod.to_f64() - eta.to_f64()).abs());
            }
            edges += 1;
            writeln!(out, "{},{},{},{},{}", v.key(), w.key(), csv_field(&p.render()), csv_field(&back.render()), csv_field(&prod.render())).unwrap();
            stack.push(w);
        }
    }
    let summary = json!({
        "edges": edges,
        "eta": eta.render(),
        "edges_off_eta": off_eta,
        "max_deviation": worst,
        "root_edges_skipped": skip_root,
    });
    Ok((out, summary))
}

fn finish<S: Scalar>(chain: ChainModel<S>, crossing: Option<(String, Value)>, a: &ChainArgs, cli: &Cli) -> CliResult<()> {
    let mut run = json!({
        "mode": chain.mode(),
        "params": chain.params(),
        "graph": chain.graph().rule().describe(),
        "levels": chain.levels(),
    });
    if let Some((_, summary)) = &crossing {
        run["crossing"] = summary.clone();
    }
    if let Some(v) = &a.verify_centrality {
        let n: usize = v[0].parse().map_err(|_| CliError::Config(format!("bad level {:?}", v[0])))?;
        let tol: f64 = v[1].parse().map_err(|_| CliError::Config(format!("bad tolerance {:?}", v[1])))?;
        if n > chain.levels() {
            return config_err(format!("--verify-centrality {n} exceeds --levels {}", chain.levels()));
        }
        let report = verify_centrality(&chain, n, tol);
        let body = json!({
            "meta": metadata(cli, run),
            "result": if report.pass { "PASS" } else { "FAIL" },
            "report": report,
        });
        emit(cli.out.as_deref(), &(serde_json::to_string_pretty(&body).unwrap() + "\n"))?;
        if !report.pass {
            return Err(CliError::Verification(format!(
                "chain is not central: {} vertices with unequal path probabilities",
                report.failures.len()
            )));
        }
        return Ok(());
    }
    let meta = metadata(cli, run);
    if a.json {
        let body = json!({"meta": meta, "chain": chain.to_json()});
        return emit(cli.out.as_deref(), &(serde_json::to_string_pretty(&body).unwrap() + "\n"));
    }
    let mut out = csv_header(&meta);
    if a.crossing {
        match crossing {
            Some((table, _)) => out.push_str(&table),
            None => return config_err("--crossing applies to fib and aux walks"),
        }
    } else if a.marginals {
        writeln!(out, "level,vertex,marginal,marginal_float").unwrap();
        for (n, row) in chain.marginals(chain.levels()).iter().enumerate() {
            for (i, m) in row.iter().enumerate() {
                let key = csv_field(chain.graph().key(n, i));
                writeln!(out, "{n},{key},{},{:?}", csv_field(&m.render()), m.to_f64()).unwrap();
            }
        }
    } else if let Some(n) = a.trace_weights {
        if n > chain.levels() {
            return config_err(format!("--trace-weights {n} exceeds --levels {}", chain.levels()));
        }
        writeln!(out, "level,vertex,weight,weight_float").unwrap();
        for (key, w) in chain.trace_weights(n) {
            writeln!(out, "{n},{},{},{:?}", csv_field(&key), csv_field(&w.render()), w.to_f64()).unwrap();
        }
    } else {
        out.push_str(&chain.to_csv());
    }
    emit(cli.out.as_deref(), &out)
}

fn walk_run<S: GenFnScalar>(eta: S, a: &ChainArgs, cli: &Cli) -> CliResult<()> {
    let depth = a.levels;
    if a.kind == ChainKind::Aux {
        if a.s != 2 {
            return config_err("the auxiliary walk is defined on the Fibonacci tree (s = 2)");
        }
        let walk = AuxWalk::new(2, eta.clone())?;
        let crossing = crossing_table(&walk, depth, true)?;
        finish(aux_walk(eta, depth)?, Some(crossing), a, cli)
    } else {
        let end = end_spec(a.s, a.end.as_deref())?;
        let walk = FibWalk::new(end.clone(), eta.clone(), a.derooted, depth + 2)?;
        let crossing = crossing_table(&walk, depth, false)?;
        finish(fib_walk(&end, eta, a.derooted, depth)?, Some(crossing), a, cli)
    }
}

pub fn run(a: &ChainArgs, cli: &Cli) -> CliResult<()> {
    let n = a.levels;
    match a.kind {
        ChainKind::Ballot => match required("lambda", &a.lambda)? {
            Param::Exact(l) => finish(ballot_chain(l, n)?, None, a, cli),
            Param::Float(l) => finish(ballot_chain(l, n)?, None, a, cli),
        },
        ChainKind::Control => match required("p", &a.p)? {
            Param::Exact(p) => finish(constant_up_chain(p, n)?, None, a, cli),
            Param::Float(p) => finish(constant_up_chain(p, n)?, None, a, cli),
        },
        ChainKind::Motzkin => match (required("l1", &a.l1)?, required("l2", &a.l2)?) {
            (Param::Exact(x), Param::Exact(y)) => finish(motzkin_chain(x, y, n)?, None, a, cli),
            (x, y) => finish(motzkin_chain(x.to_f64(), y.to_f64(), n)?, None, a, cli),
        },
        ChainKind::Fib | ChainKind::Aux => match required("eta", &a.eta)? {
            Param::Float(e) => walk_run(e, a, cli),
            Param::Exact(e) => {
                let g = Algebraic::fuss_catalan_root(a.s, &e)?;
                if g.as_rational().is_some() {
                    walk_run(e, a, cli)
                } else {
                    walk_run(Algebraic::rational(e), a, cli)
                }
            }
        },
    }
}

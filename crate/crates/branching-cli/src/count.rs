use std::fmt::Write as _;

use branching::fusscat::{bracket_dim, bracket_dim_derooted, bracket_level, bracket_level_derooted, fuss_catalan};
use branching::graphs::Word;
use branching::paths::{
    count_ballot, count_motzkin, enumerate_paths, motzkin_number, steps_to_string, LatticePoint, StepSet,
    DEFAULT_ENUMERATION_CAP,
};
use serde_json::json;

use crate::args::{Cli, CountArgs};
use crate::output::{config_err, csv_header, emit, metadata, CliResult};

fn point(text: &str) -> CliResult<LatticePoint> {
    let (x, y) = text.split_once(',').ok_or_else(|| crate::output::CliError::Config(format!("bad point {text:?}")))?;
    match (x.trim().parse(), y.trim().parse()) {
        (Ok(x), Ok(y)) => Ok(LatticePoint::new(x, y)),
        _ => config_err(format!("bad point {text:?}")),
    }
}

fn endpoints(text: &str) -> CliResult<(LatticePoint, LatticePoint)> {
    match text.split_once("..") {
        Some((a, b)) => Ok((point(a)?, point(b)?)),
        None => config_err(format!("expected a,b..c,d, got {text:?}")),
    }
}

/// Inclusive range `i..j`.
pub fn range(text: &str) -> CliResult<(u64, u64)> {
    let parsed = text
        .split_once("..")
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    match parsed {
        Some((a, b)) if a <= b => Ok((a, b)),
        _ => config_err(format!("expected an increasing range i..j, got {text:?}")),
    }
}

pub fn run(a: &CountArgs, cli: &Cli) -> CliResult<()> {
    let mut out = csv_header(&metadata(cli, json!({})));
    let mut any = false;
    for (text, steps) in [(&a.ballot, StepSet::Ballot), (&a.motzkin, StepSet::Motzkin)] {
        let Some(text) = text else { continue };
        any = true;
        let (from, to) = endpoints(text)?;
        let count = match steps {
            StepSet::Ballot => count_ballot(from, to)?,
            StepSet::Motzkin => count_motzkin(from, to)?,
        };
        let name = format!("{steps:?}").to_lowercase();
        writeln!(out, "kind,from,to,count").unwrap();
        writeln!(out, "{name},\"{},{}\",\"{},{}\",{count}", from.x, from.y, to.x, to.y).unwrap();
        if a.enumerate {
            writeln!(out, "path").unwrap();
            for p in enumerate_paths(from, to, steps, DEFAULT_ENUMERATION_CAP)? {
                writeln!(out, "{}", steps_to_string(&p)).unwrap();
            }
        }
    }
    if let Some(text) = &a.motzkin_numbers {
        any = true;
        let (i, j) = range(text)?;
        writeln!(out, "n,motzkin_number").unwrap();
        for n in i..=j {
            writeln!(out, "{n},{}", motzkin_number(n)).unwrap();
        }
    }
    if let Some(text) = &a.fuss_catalan {
        any = true;
        let (i, j) = range(text)?;
        writeln!(out, "s,n,fuss_catalan").unwrap();
        for n in i..=j {
            writeln!(out, "{},{n},{}", a.s, fuss_catalan(a.s, n)?).unwrap();
        }
    }
    if let Some(tokens) = &a.bracket {
        any = true;
        let (mut s, mut ns, mut w, mut derooted) = (2u32, (0u64, 6u64), String::new(), false);
        for t in tokens {
            match t.split_once('=') {
                Some(("s", v)) => s = v.parse().map_err(|_| crate::output::CliError::Config(format!("bad s {v:?}")))?,
                Some(("n", v)) => ns = range(v)?,
                Some(("w", v)) => w = v.to_string(),
                None if t == "derooted" => derooted = true,
                _ => return config_err(format!("unknown bracket token {t:?}")),
            }
        }
        let word = Word::parse(s, &w)?;
        if derooted && word.is_empty() {
            return config_err("the derooted tree has no empty word");
        }
        writeln!(out, "s,n,w,walk_level,dim").unwrap();
        for n in ns.0..=ns.1 {
            let (level, dim) = if derooted {
                (bracket_level_derooted(n, word.len()), bracket_dim_derooted(s, n, &word))
            } else {
                (bracket_level(n, word.len()), bracket_dim(s, n, &word))
            };
            match dim {
                Ok(d) => writeln!(out, "{s},{n},{},{level},{d}", word.key()).unwrap(),
                Err(_) => continue,
            }
        }
    }
    if !any {
        return config_err("nothing to count; pass --ballot, --motzkin, --motzkin-numbers, --fuss-catalan or --bracket");
    }
    emit(cli.out.as_deref(), &out)
}

use std::fmt::Write as _;

use branching::graphs::{
    bsharp_graph, bsharp_witness, even_contraction, fc_tree, graphs_isomorphic_up_to, half_line, motzkin_graph,
    pascalize, semi_pascal, LeveledGraph,
};
use branching::csv_field;
use serde_json::json;

use crate::args::{Cli, GraphArgs};
use crate::output::{config_err, csv_header, emit, metadata, CliError, CliResult};

fn tree_order(text: &str) -> CliResult<u32> {
    match text.strip_prefix("s=").unwrap_or(text).parse() {
        Ok(s) => Ok(s),
        Err(_) => config_err(format!("bad tree order {text:?}")),
    }
}

fn build(a: &GraphArgs) -> CliResult<LeveledGraph> {
    if a.levels == 0 {
        return config_err("--levels must be at least 1");
    }
    let n_max = a.levels - 1;
    // even contraction halves the depth, so build twice as deep
    let base_n = if a.even { 2 * n_max } else { n_max };
    let chosen = [a.semi_pascal, a.motzkin, a.half_line, a.fc_tree.is_some(), a.bsharp];
    if chosen.iter().filter(|&&c| c).count() != 1 {
        return config_err("select exactly one of --semi-pascal, --motzkin, --half-line, --fc-tree, --bsharp");
    }
    if a.derooted && a.fc_tree.is_none() {
        return config_err("--derooted applies to --fc-tree only");
    }
    let mut g = if a.semi_pascal {
        semi_pascal(base_n)
    } else if a.motzkin {
        motzkin_graph(base_n)
    } else if a.half_line {
        half_line(base_n)
    } else if let Some(s) = &a.fc_tree {
        fc_tree(tree_order(s)?, a.derooted, base_n)?
    } else {
        bsharp_graph(base_n)
    };
    if a.pascalize {
        g = pascalize(&g)?;
    }
    if a.even {
        g = even_contraction(&g);
    }
    Ok(g)
}

pub fn run(a: &GraphArgs, cli: &Cli) -> CliResult<()> {
    if let Some(n) = a.verify_iso {
        let tree = fc_tree(2, true, n)?;
        let p = pascalize(&tree)?;
        let b = bsharp_graph(n);
        let report = graphs_isomorphic_up_to(&p, &b, n, Some(&bsharp_witness));
        let summary = json!({
            "meta": metadata(cli, json!({})),
            "isomorphic": report.isomorphic,
            "levels_checked": report.levels_checked,
            "level_sizes": report.level_sizes.0,
            "method": report.method,
            "failure": report.failure,
        });
        emit(cli.out.as_deref(), &(serde_json::to_string_pretty(&summary).unwrap() + "\n"))?;
        if !report.isomorphic {
            return Err(CliError::Verification(
                report.failure.unwrap_or_else(|| "B# and pascalize(derooted FT) differ".into()),
            ));
        }
        return Ok(());
    }
    let g = build(a)?;
    let meta = metadata(cli, json!({"graph": g.rule().describe(), "level_sizes": g.level_sizes()}));
    let text = if a.dot {
        format!("// {meta}\n{}", g.to_dot())
    } else if a.json {
        let body = json!({"meta": meta, "graph": g.to_json()});
        serde_json::to_string_pretty(&body).unwrap() + "\n"
    } else {
        let mut out = csv_header(&meta);
        writeln!(out, "level,vertex,dim").unwrap();
        for (n, dims) in g.dims_from_root().iter().enumerate() {
            for (i, d) in dims.iter().enumerate() {
                writeln!(out, "{n},{},{d}", csv_field(g.key(n, i))).unwrap();
            }
        }
        out
    };
    emit(cli.out.as_deref(), &text)
}

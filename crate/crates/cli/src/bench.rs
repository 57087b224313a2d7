//! Instance grids, per-group averages, and their table and CSV renderings.

use std::time::Duration;

use pathcover::branch_and_cut::{best_gap, obj_gap};
use pathcover::generate::{gen_set_a, gen_set_c};
use pathcover::separation::MwisMode;
use pathcover::{solve, CutLevel, SolveConfig, SolveStatus};

use crate::CliError;

/// Column names shared by the table and the CSV.
pub const HEADER: [&str; 17] = [
    "set",
    "n",
    "pa",
    "pac",
    "variant",
    "inst",
    "opt",
    "opt0",
    "null_obj",
    "cuts",
    "tree_nodes",
    "t_sep",
    "t",
    "best_gap",
    "obj_gap",
    "paths",
    "nodes",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub set: char,
    pub n: usize,
    pub pa: f64,
    pub pac: f64,
}

pub struct BenchOptions {
    pub seeds: u64,
    pub seed_base: u64,
    pub variants: Vec<CutLevel>,
    pub mwis: MwisMode,
    pub time_limit: Duration,
}

/// Averages of one variant over the instances of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cell: Cell,
    pub variant: CutLevel,
    pub inst: usize,
    pub opt: usize,
    pub opt0: usize,
    pub null_obj: usize,
    pub cuts: f64,
    pub tree_nodes: f64,
    pub t_sep: f64,
    pub t: f64,
    pub best_gap: Option<f64>,
    pub obj_gap: Option<f64>,
    pub paths: f64,
    pub nodes: f64,
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad {what} {v:?} in grid")))
        })
        .collect()
}

/// Expands `SET:N,..:PA,..:PAC,..` into its cells.
pub fn parse_grid(spec: &str) -> Result<Vec<Cell>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [set, ns, pas, pacs] = parts[..] else {
        return Err(CliError::Usage(format!(
            "grid {spec:?} is not SET:N,..:PA,..:PAC,.."
        )));
    };
    let set = match set {
        "a" => 'a',
        "c" => 'c',
        other => return Err(CliError::Usage(format!("unknown instance set {other:?}"))),
    };
    let (ns, pas, pacs): (Vec<usize>, Vec<f64>, Vec<f64>) = (
        list(ns, "node count")?,
        list(pas, "pa")?,
        list(pacs, "pac")?,
    );
    let mut cells = Vec::new();
    for &n in &ns {
        for &pa in &pas {
            for &pac in &pacs {
                cells.push(Cell { set, n, pa, pac });
            }
        }
    }
    Ok(cells)
}

struct Run {
    objective: i64,
    proven: bool,
    tree_nodes: usize,
    cuts: usize,
    t: f64,
    t_sep: f64,
    paths: usize,
    covered: usize,
}

pub fn run(cells: &[Cell], opts: &BenchOptions) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for &cell in cells {
        // runs[v][k]: variant v on the k-th instance of the cell.
        let mut runs: Vec<Vec<Run>> = opts.variants.iter().map(|_| Vec::new()).collect();
        for k in 0..opts.seeds {
            let seed = opts.seed_base + k;
            let inst = match cell.set {
                'a' => gen_set_a(cell.n, cell.pa, cell.pac, seed)?,
                _ => gen_set_c(cell.n, cell.pa, cell.pac, seed)?,
            };
            for (v, &level) in opts.variants.iter().enumerate() {
                let cfg = SolveConfig {
                    cuts: level,
                    mwis: opts.mwis,
                    time_limit: Some(opts.time_limit),
                    seed,
                    ..SolveConfig::default()
                };
                let r = solve(&inst, &cfg)?;
                runs[v].push(Run {
                    objective: r.objective,
                    proven: matches!(
                        r.status,
                        SolveStatus::Optimal | SolveStatus::InfeasibleEmpty
                    ),
                    tree_nodes: r.tree_nodes,
                    cuts: r.total_cuts(),
                    t: r.wall_time.as_secs_f64(),
                    t_sep: r.separation_time.as_secs_f64(),
                    paths: r.paths.len(),
                    covered: r.covered,
                });
            }
        }
        let count = opts.seeds as usize;
        let best: Vec<i64> = (0..count)
            .map(|k| runs.iter().map(|rs| rs[k].objective).min().unwrap_or(0))
            .collect();
        for (v, rs) in runs.iter().enumerate() {
            let avg = |f: &dyn Fn(&Run) -> f64| rs.iter().map(f).sum::<f64>() / count.max(1) as f64;
            let gaps: Vec<f64> = rs
                .iter()
                .zip(&best)
                .filter_map(|(r, &z)| best_gap(z, r.objective))
                .collect();
            let objs: Vec<i64> = rs.iter().map(|r| r.objective).collect();
            rows.push(Row {
                cell,
                variant: opts.variants[v],
                inst: count,
                opt: rs.iter().filter(|r| r.proven).count(),
                opt0: rs.iter().filter(|r| r.proven && r.tree_nodes <= 1).count(),
                null_obj: rs.iter().filter(|r| r.objective == 0).count(),
                cuts: avg(&|r| r.cuts as f64),
                tree_nodes: avg(&|r| r.tree_nodes as f64),
                t_sep: avg(&|r| r.t_sep),
                t: avg(&|r| r.t),
                best_gap: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
                obj_gap: obj_gap(&objs, &best)?,
                paths: avg(&|r| r.paths as f64),
                nodes: avg(&|r| r.covered as f64),
            });
        }
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.3}"))
}

/// Rendered values in [`HEADER`] order; undefined gaps are empty.
pub fn fields(r: &Row) -> Vec<String> {
    vec![
        r.cell.set.to_string(),
        r.cell.n.to_string(),
        r.cell.pa.to_string(),
        r.cell.pac.to_string(),
        r.variant.to_string(),
        r.inst.to_string(),
        r.opt.to_string(),
        r.opt0.to_string(),
        r.null_obj.to_string(),
        format!("{:.1}", r.cuts),
        format!("{:.1}", r.tree_nodes),
        format!("{:.3}", r.t_sep),
        format!("{:.3}", r.t),
        opt(r.best_gap),
        opt(r.obj_gap),
        format!("{:.2}", r.paths),
        format!("{:.2}", r.nodes),
    ]
}

/// Right-aligned columns; undefined gaps print as `-`.
pub fn table(rows: &[Row]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            fields(r)
                .into_iter()
                .map(|f| if f.is_empty() { "-".to_string() } else { f })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = (0..HEADER.len())
        .map(|c| {
            cells
                .iter()
                .map(|r| r[c].len())
                .chain([HEADER[c].len()])
                .max()
                .unwrap()
        })
        .collect();
    let line = |vals: Vec<&str>| -> String {
        let padded: Vec<String> = vals
            .iter()
            .zip(&widths)
            .map(|(v, &w)| format!("{v:>w$}"))
            .collect();
        padded.join("  ") + "\n"
    };
    let mut out = line(HEADER.to_vec());
    for r in &cells {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for r in rows {
        w.write_record(fields(r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

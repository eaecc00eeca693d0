//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use anyhow::{bail, ensure, Context, Result};
use clap::Args;

use branchinfer::ann::{load_weights, save_weights, train as train_net, Hyper, PropertyDataset};
use branchinfer::chemgraph::{format_graph, parse_graphs, validate, ChemicalAlphabet, ChemicalGraph};
use branchinfer::dataset::{corpus_stats, ingest_sdf, stage1_filter};
use branchinfer::descriptors::{feature_vector, formula, write_feature_csv};
use branchinfer::graphsearch::{search, SearchError, SearchLimits, SearchProblem};
use branchinfer::milp::{
    build_model, check_assignment, compute_bounds, decode_graph, emit_lp, parse_lp, parse_solution, DescriptorBounds,
    MilpError, TargetSpec,
};

use crate::InputOpts;

/// Marker for outcomes reported with exit code 2.
#[derive(Debug)]
pub struct Infeasible(pub String);

impl std::fmt::Display for Infeasible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "infeasible: {}", self.0)
    }
}

impl std::error::Error for Infeasible {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn alphabet(spec: &str) -> Result<ChemicalAlphabet> {
    ChemicalAlphabet::parse(spec).with_context(|| format!("parsing alphabet '{spec}'"))
}

/// Graphs of a file with their record indices; `.sdf`/`.mol` files go
/// through the molfile reader, anything else through the graph text format.
pub fn read_graphs(path: &Path, al: &ChemicalAlphabet) -> Result<Vec<(usize, ChemicalGraph)>> {
    let text = read(path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    if ext == "sdf" || ext == "mol" {
        let rep = ingest_sdf(&text, al);
        for (i, name, why) in &rep.skipped {
            eprintln!("{}: record {i} ({name}) skipped: {why}", path.display());
        }
        Ok(rep.records.into_iter().map(|r| (r.index, r.graph)).collect())
    } else {
        let gs = parse_graphs(&text, al).with_context(|| format!("parsing {}", path.display()))?;
        Ok(gs.into_iter().enumerate().collect())
    }
}

/// Applies the stage-1 rules when requested; reports removals on stderr.
fn curate(gs: Vec<(usize, ChemicalGraph)>, al: &ChemicalAlphabet, filter: bool) -> Vec<(usize, ChemicalGraph)> {
    if !filter {
        return gs;
    }
    let graphs: Vec<ChemicalGraph> = gs.iter().map(|(_, g)| g.clone()).collect();
    let rep = stage1_filter(&graphs, al);
    let mut drop = vec![false; gs.len()];
    for (i, why) in &rep.rejected {
        eprintln!("record {} removed: {why}", gs[*i].0);
        drop[*i] = true;
    }
    gs.into_iter().zip(drop).filter(|(_, d)| !d).map(|(x, _)| x).collect()
}

pub fn stats(input: &Path, opts: &InputOpts, ks: &[usize], csv: Option<&Path>) -> Result<()> {
    let al = alphabet(&opts.alphabet)?;
    let gs = curate(read_graphs(input, &al)?, &al, opts.filter);
    let graphs: Vec<ChemicalGraph> = gs.into_iter().map(|(_, g)| g).collect();
    let st = corpus_stats(&graphs, ks);
    print!("{}", st.to_table());
    if let Some(p) = csv {
        write(p, &st.to_csv())?;
    }
    Ok(())
}

fn read_values(path: &Path) -> Result<Vec<f64>> {
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .with_context(|| format!("{}:{}: expected a number", path.display(), i + 1))
        })
        .collect()
}

pub fn features(input: &Path, output: &Path, opts: &InputOpts, k: usize, values: Option<&Path>) -> Result<()> {
    let al = alphabet(&opts.alphabet)?;
    let gs = curate(read_graphs(input, &al)?, &al, opts.filter);
    let mut rows = Vec::with_capacity(gs.len());
    for (i, g) in &gs {
        rows.push(feature_vector(g, k, &al).with_context(|| format!("record {i} of {}", input.display()))?);
    }
    let mut buf = Vec::new();
    write_feature_csv(&mut buf, &al, &rows)?;
    let mut text = String::from_utf8(buf)?;
    if let Some(vp) = values {
        let vals = read_values(vp)?;
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[0].push_str(",y");
        for (line, (i, _)) in lines[1..].iter_mut().zip(&gs) {
            let v = vals
                .get(*i)
                .with_context(|| format!("{} has no value for record {i}", vp.display()))?;
            line.push_str(&format!(",{v}"));
        }
        text = lines.join("\n") + "\n";
    }
    write(output, &text)?;
    eprintln!("{} rows written to {}", rows.len(), output.display());
    Ok(())
}

fn read_dataset(path: &Path, target: &str) -> Result<PropertyDataset> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = rd.headers()?.clone();
    let ti = header
        .iter()
        .position(|h| h == target)
        .with_context(|| format!("{} has no column '{target}'", path.display()))?;
    let mut data = PropertyDataset {
        rows: Vec::new(),
        values: Vec::new(),
    };
    for (r, rec) in rd.records().enumerate() {
        let rec = rec?;
        let mut row = Vec::with_capacity(rec.len() - 1);
        for (c, cell) in rec.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .with_context(|| format!("{} row {} column {}: not a number", path.display(), r + 2, c + 1))?;
            if c == ti {
                data.values.push(v);
            } else {
                row.push(v);
            }
        }
        data.rows.push(row);
    }
    Ok(data)
}

pub fn train(csv: &Path, weights: &Path, target: &str, hyper: &Hyper, folds: usize) -> Result<()> {
    let data = read_dataset(csv, target)?;
    let (net, rep) = train_net(&data, hyper, folds)?;
    for (f, (tr, te)) in rep.train_r2.iter().zip(&rep.test_r2).enumerate() {
        println!("fold {}: train R2 {tr:.4}, test R2 {te:.4}", f + 1);
    }
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "average: train R2 {:.4}, test R2 {:.4}; selected fold {}",
        avg(&rep.train_r2),
        avg(&rep.test_r2),
        rep.best_fold + 1
    );
    write(weights, &save_weights(&net))
}

#[derive(Args, Debug, Clone)]
pub struct InferArgs {
    /// Trained network.
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long, default_value = "C:4,N:3,O:2")]
    pub alphabet: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub dmax: usize,
    #[arg(long)]
    pub dia: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long)]
    pub bh: usize,
    #[arg(long)]
    pub bl: usize,
    /// Target property value.
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
    #[arg(long, default_value_t = 0.02)]
    pub eps: f64,
    /// Link-path length override.
    #[arg(long)]
    pub t: Option<usize>,
    /// Corpus for descriptor bounds; the trivial box is used when omitted.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output LP file.
    #[arg(long, default_value = "model.lp")]
    pub lp: PathBuf,
    /// Run the solver command and decode its solution.
    #[arg(long)]
    pub solve: bool,
    /// Solver command template with {lp} and {sol} (env SOLVER_CMD).
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Solution file path.
    #[arg(long, default_value = "model.sol")]
    pub sol: PathBuf,
    /// Decoded graph output.
    #[arg(long, default_value = "inferred.graph")]
    pub out_graph: PathBuf,
    /// Enumeration target of the decoded graph.
    #[arg(long, default_value = "inferred.vec")]
    pub out_x: PathBuf,
}

fn infeasible_milp(e: MilpError) -> anyhow::Error {
    match e {
        MilpError::Infeasible(m) => Infeasible(m).into(),
        MilpError::StaticInfeasible(v) => Infeasible(v.join("; ")).into(),
        other => other.into(),
    }
}

/// Whether a solution file reports infeasibility instead of values.
fn reports_infeasible(text: &str) -> bool {
    let first = text
        .lines()
        .map(|l| l.trim().trim_start_matches('#').trim())
        .find(|l| !l.is_empty());
    match first {
        None => true,
        Some(l) => l.to_ascii_lowercase().starts_with("infeasible"),
    }
}

pub fn infer(a: &InferArgs, solver: Option<&str>) -> Result<()> {
    let al = alphabet(&a.alphabet)?;
    let net = load_weights(&read(&a.weights)?).with_context(|| format!("loading {}", a.weights.display()))?;
    let mut spec = TargetSpec::new(al.clone(), a.n, a.dmax, a.dia, a.k, a.bh, a.bl);
    spec.y_star = a.y;
    spec.epsilon = a.eps;
    spec.t_star = a.t;
    spec.validate()?;
    let bounds = match &a.corpus {
        Some(p) => {
            let gs: Vec<ChemicalGraph> = read_graphs(p, &al)?.into_iter().map(|(_, g)| g).collect();
            let slice: Vec<ChemicalGraph> = gs.iter().filter(|g| g.n() == a.n).cloned().collect();
            compute_bounds(&gs, a.n, &slice, a.k, &al)?
        }
        None => DescriptorBounds::loose(a.n, &al),
    };
    let im = build_model(&spec, &bounds, &net).map_err(infeasible_milp)?;
    write(&a.lp, &emit_lp(&im.model))?;
    println!(
        "model: {} variables, {} constraints written to {}",
        im.model.n_vars(),
        im.model.n_constraints(),
        a.lp.display()
    );
    for (g, c) in im.model.group_counts() {
        println!("  {:<10} {c}", g.label());
    }
    if !a.solve {
        return Ok(());
    }
    let Some(tpl) = solver else {
        bail!("--solve needs a solver command (--solver-cmd, SOLVER_CMD or solver_cmd in the config)");
    };
    let cmd = tpl
        .replace("{lp}", &a.lp.display().to_string())
        .replace("{sol}", &a.sol.display().to_string());
    let _ = fs::remove_file(&a.sol);
    let status = Process::new("sh")
        .arg("-c")
        .arg(&cmd)
        .status()
        .with_context(|| format!("running solver '{cmd}'"))?;
    ensure!(status.success(), "solver '{cmd}' exited with {status}");
    let text = read(&a.sol)?;
    if reports_infeasible(&text) {
        return Err(Infeasible(format!("solver reported no solution in {}", a.sol.display())).into());
    }
    let (asg, warnings) = parse_solution(&text, &im.model)?;
    if !warnings.is_empty() {
        eprintln!("{} variables missing from the solution default to 0", warnings.len());
    }
    let viol = check_assignment(&im.model, &asg);
    for v in viol.iter().take(10) {
        eprintln!("violation: {v}");
    }
    ensure!(viol.is_empty(), "solution violates {} constraints", viol.len());
    let g = decode_graph(&asg, &im.sg, &spec)?;
    let rep = validate(&g, &al);
    ensure!(
        rep.violations.is_empty(),
        "decoded graph is invalid: {:?}",
        rep.violations
    );
    let fv = feature_vector(&g, a.k, &al)?;
    let y = net.forward(&fv.to_f64())?;
    println!("decoded graph: {}, predicted y = {y:.6}", formula(&fv, &al));
    write(&a.out_graph, &format_graph(&g, &al))?;
    let dmax = u8::try_from(a.dmax)?;
    write(&a.out_x, &SearchProblem::from_graph(&g, &al, dmax)?.to_text())?;
    Ok(())
}

pub fn vector(input: &Path, output: &Path, alph: &str, dmax: u8) -> Result<()> {
    let al = alphabet(alph)?;
    let gs = read_graphs(input, &al)?;
    let (_, g) = gs
        .first()
        .with_context(|| format!("{} holds no graph", input.display()))?;
    write(output, &SearchProblem::from_graph(g, &al, dmax)?.to_text())
}

pub fn enumerate(target: &Path, bl: Option<usize>, out: Option<&Path>, limits: &SearchLimits) -> Result<()> {
    let mut p = SearchProblem::parse(&read(target)?).with_context(|| format!("parsing {}", target.display()))?;
    if let Some(b) = bl {
        p = SearchProblem::new(p.alphabet().clone(), p.x.clone(), p.dia, p.dmax, b)?;
    }
    let res = match search(&p, limits) {
        Ok(r) => r,
        Err(e @ (SearchError::Bl3Impossible(_) | SearchError::DiameterTooSmall { .. })) => {
            return Err(Infeasible(e.to_string()).into())
        }
        Err(e) => return Err(e.into()),
    };
    let mut text = String::new();
    for g in &res.graphs {
        text.push_str(&format_graph(g, p.alphabet()));
        text.push('\n');
    }
    match out {
        Some(path) => {
            write(path, &text)?;
            println!("{}", res.summary_line());
        }
        None => {
            print!("{text}");
            eprintln!("{}", res.summary_line());
        }
    }
    if res.rejected > 0 {
        eprintln!("warning: {} assembled graphs failed the final check", res.rejected);
    }
    if res.graphs.is_empty() {
        return Err(Infeasible("no graph realizes the target".into()).into());
    }
    Ok(())
}

pub fn check(model: &Path, solution: &Path, show: usize) -> Result<()> {
    let m = parse_lp(&read(model)?).with_context(|| format!("parsing {}", model.display()))?;
    let (asg, warnings) =
        parse_solution(&read(solution)?, &m).with_context(|| format!("parsing {}", solution.display()))?;
    let viol = check_assignment(&m, &asg);
    println!(
        "{} variables, {} constraints, {} unset variables, {} violations",
        m.n_vars(),
        m.n_constraints(),
        warnings.len(),
        viol.len()
    );
    let mut by_group = std::collections::BTreeMap::new();
    for v in &viol {
        let label = v.group().map(|g| g.label()).unwrap_or("bounds");
        *by_group.entry(label).or_insert(0usize) += 1;
    }
    for (g, c) in &by_group {
        println!("  {g:<10} {c}");
    }
    for v in viol.iter().take(show) {
        println!("  {v}");
    }
    if !viol.is_empty() {
        return Err(Infeasible(format!("{} violated constraints", viol.len())).into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infeasible_solution_markers() {
        assert!(reports_infeasible(""));
        assert!(reports_infeasible("\n# Infeasible\n"));
        assert!(reports_infeasible("INFEASIBLE problem"));
        assert!(!reports_infeasible("x_1 1\n"));
    }
}

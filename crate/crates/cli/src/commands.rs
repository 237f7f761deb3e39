use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use simid_core::density::{self, Intervention, Scalar};
use simid_core::identify::{self, IdentReport, Verdict};
use simid_core::oracle::{self, OracleVerdict};
use simid_core::{chain, fixtures, mpdag, CandidateSet, DiscreteDistribution, Exact, IdentQuery, InterventionalMarginal, NodeSet, PDGraph, SaMpdag};

use crate::output::{classify, sha256_hex, CliResult, Context, Emit, Failure, Input, Loaded};
use crate::{Mode, QueryArgs};

fn parse_graph(file: &Loaded) -> CliResult<PDGraph> {
    file.text.parse().map_err(|e| classify(&file.path, e))
}

fn load_graphs(paths: &[PathBuf]) -> CliResult<(Vec<Loaded>, Vec<SaMpdag>)> {
    let mut files = Vec::new();
    let mut graphs = Vec::new();
    for p in paths {
        let f = Loaded::read(p)?;
        let g = mpdag::validate_sa_mpdag(parse_graph(&f)?).map_err(|e| classify(&f.path, e))?;
        files.push(f);
        graphs.push(g);
    }
    Ok((files, graphs))
}

fn inputs(files: &[Loaded]) -> Vec<Input> {
    files.iter().map(Loaded::input).collect()
}

type Treatments = Vec<(String, Option<String>)>;

/// `name` or `name=state` items of `--x`.
fn split_x(items: &[String]) -> Treatments {
    items
        .iter()
        .map(|s| match s.split_once('=') {
            Some((n, v)) => (n.trim().to_string(), Some(v.trim().to_string())),
            None => (s.trim().to_string(), None),
        })
        .collect()
}

fn query(args: &QueryArgs, nodes: &NodeSet) -> CliResult<(IdentQuery, Treatments)> {
    let xs = split_x(&args.x);
    for (flag, name) in xs.iter().map(|(n, _)| ("--x", n)).chain(args.y.iter().map(|n| ("--y", n))) {
        if !nodes.iter().any(|v| v.as_str() == name) {
            return Err(Failure::Usage(format!("{flag}: node {name} is not in the graphs")));
        }
    }
    let x: Vec<&str> = xs.iter().map(|(n, _)| n.as_str()).collect();
    let y: Vec<&str> = args.y.iter().map(String::as_str).collect();
    let q = IdentQuery::from_names(&x, &y).map_err(|e| classify("", e))?;
    Ok((q, xs))
}

fn candidates(graphs: Vec<SaMpdag>) -> CliResult<CandidateSet> {
    CandidateSet::new(graphs).map_err(|e| classify("", e))
}

pub fn identify(ctx: &Context, args: &QueryArgs) -> CliResult<()> {
    let (files, graphs) = load_graphs(&args.graphs)?;
    let gs = candidates(graphs)?;
    let (q, _) = query(args, &gs.nodes())?;
    let report = identify::simultaneous_identify(&gs, &q).map_err(|e| classify("", e))?;
    ctx.emit(Emit {
        command: "identify",
        inputs: inputs(&files),
        seed: None,
        text: report.to_string(),
        report: &report,
    })
}

#[derive(Serialize)]
struct RmEntry<'a> {
    graph: &'a str,
    rm: PDGraph,
}

pub fn rm(ctx: &Context, args: &QueryArgs) -> CliResult<()> {
    let (files, graphs) = load_graphs(&args.graphs)?;
    let gs = candidates(graphs)?;
    let (q, _) = query(args, &gs.nodes())?;
    let mut entries = Vec::new();
    let mut text = String::new();
    for (f, g) in files.iter().zip(gs.graphs()) {
        let r = identify::rm(g, &q).map_err(|e| classify(&f.path, e))?;
        if files.len() > 1 {
            text.push_str(&format!("# rm of {}\n", f.path));
        }
        text.push_str(&r.to_string());
        entries.push(RmEntry { graph: &f.path, rm: r });
    }
    ctx.emit(Emit {
        command: "rm",
        inputs: inputs(&files),
        seed: None,
        text,
        report: &entries,
    })
}

#[derive(Serialize)]
struct ExtensionsReport {
    count: usize,
    dags: Vec<PDGraph>,
}

pub fn extensions(ctx: &Context, path: &Path, cap: usize) -> CliResult<()> {
    let (files, graphs) = load_graphs(&[path.to_path_buf()])?;
    let dags = mpdag::enumerate_extensions_capped(&graphs[0], cap).map_err(|e| classify(&files[0].path, e))?;
    let mut text = format!("# {} DAGs\n", dags.len());
    for (k, d) in dags.iter().enumerate() {
        text.push_str(&format!("\n# DAG {}\n{d}", k + 1));
    }
    let report = ExtensionsReport { count: dags.len(), dags };
    ctx.emit(Emit {
        command: "extensions",
        inputs: inputs(&files),
        seed: None,
        text,
        report: &report,
    })
}

pub fn equiv(ctx: &Context, first: &Path, second: &Path) -> CliResult<()> {
    let files = [Loaded::read(first)?, Loaded::read(second)?];
    let (a, b) = (parse_graph(&files[0])?, parse_graph(&files[1])?);
    let verdict = chain::equivalent(&a, &b).map_err(|e| classify("", e))?;
    let text = match &verdict.witness {
        None => "equivalent\n".to_string(),
        Some(w) => format!("not equivalent: {w}\n"),
    };
    ctx.emit(Emit {
        command: "equiv",
        inputs: inputs(&files),
        seed: None,
        text,
        report: &verdict,
    })
}

fn load_distribution<S: Scalar>(ctx: &Context, path: &Path) -> CliResult<(Loaded, DiscreteDistribution<S>)> {
    let f = Loaded::read(path)?;
    let p: DiscreteDistribution<S> = f.text.parse().map_err(|e| classify(&f.path, e))?;
    Ok((f, p.with_tolerance(ctx.tolerance)))
}

fn intervention<S: Scalar>(p: &DiscreteDistribution<S>, xs: &[(String, Option<String>)]) -> CliResult<Intervention> {
    let mut pairs = Vec::new();
    for (name, state) in xs {
        let state = state
            .as_deref()
            .ok_or_else(|| Failure::Usage(format!("--x {name}: a state is required (`{name}=STATE`)")))?;
        pairs.push((name.as_str(), state));
    }
    p.intervention(&pairs).map_err(|e| classify("--x", e))
}

fn require_nodes<S: Scalar>(p: &DiscreteDistribution<S>, gs: &CandidateSet, path: &str) -> CliResult<()> {
    if p.names() != gs.nodes() {
        return Err(Failure::Domain(format!("{path}: variables do not match the graph nodes")));
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(bound = "S: Scalar")]
struct EvaluateReport<S> {
    verdict: Verdict,
    formula: String,
    source_graph: usize,
    marginal: InterventionalMarginal<S>,
    per_graph_agree: bool,
}

pub fn evaluate(ctx: &Context, args: &QueryArgs, dist: &Path) -> CliResult<()> {
    match ctx.mode {
        Mode::Exact => evaluate_with::<Exact>(ctx, args, dist),
        Mode::Float => evaluate_with::<f64>(ctx, args, dist),
    }
}

fn evaluate_with<S: Scalar>(ctx: &Context, args: &QueryArgs, dist: &Path) -> CliResult<()> {
    let (mut files, graphs) = load_graphs(&args.graphs)?;
    let gs = candidates(graphs)?;
    let (q, xs) = query(args, &gs.nodes())?;
    let (df, p) = load_distribution::<S>(ctx, dist)?;
    require_nodes(&p, &gs, &df.path)?;
    let x = intervention(&p, &xs)?;
    for (k, g) in gs.graphs().iter().enumerate() {
        if !density::is_compatible(&p, g).map_err(|e| classify("", e))? {
            return Err(Failure::Domain(format!(
                "{}: distribution does not factorise along graph {}",
                df.path,
                files[k].path
            )));
        }
    }
    let report: IdentReport = identify::simultaneous_identify(&gs, &q).map_err(|e| classify("", e))?;
    let Some(formula) = report.formula.clone() else {
        return Err(Failure::Domain("effect is not simultaneously identifiable by the criterion (verdict: not determined)".into()));
    };
    let marginal = density::evaluate_formula(&formula, &p, &x).map_err(|e| classify("", e))?;
    let mut per_graph_agree = true;
    for f in report.per_graph_formulas.iter().flatten().skip(1) {
        let other = density::evaluate_formula(f, &p, &x).map_err(|e| classify("", e))?;
        per_graph_agree &= marginal.approx_eq(&other, ctx.tolerance);
    }
    let text = format!(
        "formula (graph {}): {formula}\nintervention: {}\n{marginal}per-graph formulas agree: {per_graph_agree}\n",
        formula.source_graph_index + 1,
        describe_x(&p, &x).join(",")
    );
    let out = EvaluateReport {
        verdict: report.verdict,
        formula: formula.to_string(),
        source_graph: formula.source_graph_index,
        marginal,
        per_graph_agree,
    };
    files.push(df);
    ctx.emit(Emit {
        command: "evaluate",
        inputs: inputs(&files),
        seed: None,
        text,
        report: &out,
    })
}

#[derive(Serialize)]
#[serde(bound = "S: Scalar")]
struct OracleRow<S> {
    x: Vec<String>,
    verdict: OracleVerdict<S>,
}

#[derive(Serialize)]
#[serde(bound = "S: Scalar")]
struct OracleReport<S> {
    criterion: Verdict,
    all_agree: bool,
    checks: Vec<OracleRow<S>>,
}

pub fn oracle_check(ctx: &Context, args: &QueryArgs, dist: &Path) -> CliResult<()> {
    match ctx.mode {
        Mode::Exact => oracle_check_with::<Exact>(ctx, args, dist),
        Mode::Float => oracle_check_with::<f64>(ctx, args, dist),
    }
}

fn x_grid<S: Scalar>(p: &DiscreteDistribution<S>, xs: &[(String, Option<String>)]) -> CliResult<Vec<Intervention>> {
    let given = xs.iter().filter(|(_, s)| s.is_some()).count();
    if given == xs.len() {
        return Ok(vec![intervention(p, xs)?]);
    }
    if given > 0 {
        return Err(Failure::Usage("--x: give a state for every treatment or for none".into()));
    }
    let mut grid = vec![Intervention::new()];
    for (name, _) in xs {
        let k = p.var_index(name).ok_or_else(|| Failure::Usage(format!("--x: unknown variable {name}")))?;
        let spec = &p.variables()[k];
        grid = grid
            .into_iter()
            .flat_map(|a| {
                (0..spec.cardinality).map(move |s| {
                    let mut b = a.clone();
                    b.insert(spec.name.clone(), s);
                    b
                })
            })
            .collect();
    }
    Ok(grid)
}

fn describe_x<S: Scalar>(p: &DiscreteDistribution<S>, x: &Intervention) -> Vec<String> {
    x.iter()
        .map(|(k, &s)| {
            let spec = &p.variables()[p.var_index(k.as_str()).expect("validated")];
            format!("{k}={}", spec.label(s))
        })
        .collect()
}

fn oracle_check_with<S: Scalar>(ctx: &Context, args: &QueryArgs, dist: &Path) -> CliResult<()> {
    let (mut files, graphs) = load_graphs(&args.graphs)?;
    let gs = candidates(graphs)?;
    let (q, xs) = query(args, &gs.nodes())?;
    let (df, p) = load_distribution::<S>(ctx, dist)?;
    require_nodes(&p, &gs, &df.path)?;
    let criterion = identify::simultaneous_identify(&gs, &q).map_err(|e| classify("", e))?.verdict;
    let mut checks = Vec::new();
    let mut text = String::new();
    for x in x_grid(&p, &xs)? {
        let verdict = oracle::brute_force_check(&gs, &p, &q, &x).map_err(|e| classify(&df.path, e))?;
        let label = describe_x(&p, &x);
        match &verdict.witness {
            None => text.push_str(&format!("do({}): {} DAGs agree\n", label.join(","), verdict.dags.len())),
            Some(w) => text.push_str(&format!(
                "do({}): DAG {} and DAG {} differ at {} by {:e}\n",
                label.join(","),
                w.first + 1,
                w.second + 1,
                w.y_assignment.join(" "),
                w.magnitude
            )),
        }
        checks.push(OracleRow { x: label, verdict });
    }
    let all_agree = checks.iter().all(|c| c.verdict.all_agree);
    text.push_str(&format!(
        "oracle: {}; criterion: {}\n",
        if all_agree { "all represented DAGs agree" } else { "disagreement found" },
        match criterion {
            Verdict::Identifiable => "identifiable",
            Verdict::NotDetermined => "not determined",
        }
    ));
    files.push(df);
    let report = OracleReport {
        criterion,
        all_agree,
        checks,
    };
    ctx.emit(Emit {
        command: "oracle",
        inputs: inputs(&files),
        seed: None,
        text,
        report: &report,
    })
}

pub fn oracle_search(ctx: &Context, args: &QueryArgs, trials: usize, seed: u64, arity: usize) -> CliResult<()> {
    let (files, graphs) = load_graphs(&args.graphs)?;
    let gs = candidates(graphs)?;
    let (q, xs) = query(args, &gs.nodes())?;
    if xs.iter().any(|(_, s)| s.is_some()) {
        return Err(Failure::Usage("--x: states need --distribution; the search covers every state".into()));
    }
    let outcome = oracle::counterexample_search(&gs, &q, arity, trials, seed).map_err(|e| classify("", e))?;
    let text = match &outcome.found {
        None => format!(
            "no counterexample in {} trials ({} compatible densities checked, seed {seed})\n",
            outcome.trials, outcome.checked
        ),
        Some(c) => {
            let w = c.verdict.witness.as_ref().expect("found implies a witness");
            let x: Vec<String> = c.x_assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!(
                "counterexample in trial {} (seed {seed}): do({}) differs between\n{}and\n{}at {} by {:e}\ndensity:\n{}",
                c.trial,
                x.join(","),
                c.verdict.dags[w.first],
                c.verdict.dags[w.second],
                w.y_assignment.join(" "),
                w.magnitude,
                c.density
            )
        }
    };
    ctx.emit(Emit {
        command: "oracle",
        inputs: inputs(&files),
        seed: Some(seed),
        text,
        report: &outcome,
    })
}

const OUT_DIR_ENV: &str = "SIMID_OUT_DIR";

pub fn fixtures(ctx: &Context, out: Option<PathBuf>) -> CliResult<()> {
    let dir = out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let q = IdentQuery::from_names(&["4"], &["5"]).expect("fixed query");
    let rm = |g: &SaMpdag| identify::rm(g, &q).expect("fixture query is valid").to_string();
    let bk = "# background knowledge: 1 -> 4, 4 -> 5\n";
    let assets = [
        ("example1.dist", oracle::example1_distribution().to_string()),
        ("fig1_g1.pdg", fixtures::FIG1_G1.to_string()),
        ("fig1_g2.pdg", fixtures::FIG1_G2.to_string()),
        ("fig2_g1.pdg", format!("{bk}{}", fixtures::FIG2_G1)),
        ("fig2_g2.pdg", format!("{bk}{}", fixtures::FIG2_G2)),
        ("fig2_rm1.pdg", format!("# rm for x = 4, y = 5\n{}", rm(&fixtures::fig2_g1()))),
        ("fig2_rm2.pdg", format!("# rm for x = 4, y = 5\n{}", rm(&fixtures::fig2_g2()))),
    ];
    let mut written = Vec::new();
    let mut text = String::new();
    for (name, body) in assets {
        let path = dir.join(name);
        fs::write(&path, &body).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
        text.push_str(&format!("wrote {}\n", path.display()));
        written.push(Input {
            path: path.display().to_string(),
            sha256: sha256_hex(body.as_bytes()),
        });
    }
    ctx.emit(Emit {
        command: "fixtures",
        inputs: Vec::new(),
        seed: None,
        text,
        report: &written,
    })
}

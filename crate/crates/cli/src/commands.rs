use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use qrgraph::counting::{
    count_homomorphisms, count_labeled_copies, count_unlabeled_copies, kk_bound_holds,
    kk_clique_upper_bound,
};
use qrgraph::generate::{
    build_four_block_counterexample, expand_template, gen_gnp, BlockLayout, Planted,
};
use qrgraph::io::{format_graph, load_blocks, load_graph};
use qrgraph::properties::{
    defect_global, defect_hereditary, defect_ordered_partite, defect_partite, DefectReport, Family,
    Mode, Witness,
};
use qrgraph::regularity::{
    find_irregularity_witness, find_regular_subset, increment_driver, pair_density,
    regularity_level, single_set_deviation, Direction, DriverConfig, Strategy,
};
use qrgraph::scalar::{format_rational, parse_rational, parse_scalar, Rational, Scalar};
use qrgraph::template_analysis::{check_girth_vanishing, epsilon_polynomial};
use qrgraph::{Graph, Pattern, Seed, VertexSet, WeightedTemplate};

use crate::config::ExperimentConfig;
use crate::fail::{ensure, usage, CliResult};
use crate::output::{join, num, print_stdout, sidecar, write_text, Output};
use crate::{
    CountArgs, DefectArgs, DirectionArg, GenKind, IncrementArgs, PairArgs, PolynomialArgs,
    RegularityArgs,
};

pub fn graph(path: &Path) -> CliResult<Graph> {
    Ok(load_graph(path)?)
}

/// Library name first, then an edge-list file.
pub fn pattern(spec: &str) -> CliResult<Pattern> {
    if let Some(h) = Pattern::by_name(spec) {
        return Ok(h);
    }
    let path = Path::new(spec);
    if path.is_file() {
        let g = load_graph(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.into());
        return Ok(Pattern::from_graph(name, &g)?);
    }
    Err(usage(format!(
        "unknown pattern {spec:?}; built-in names are {}",
        Pattern::LIBRARY.join(", ")
    )))
}

/// `"0-9,12"` with inclusive ranges.
pub fn vertex_set(spec: &str, n: usize) -> CliResult<VertexSet> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || usage(format!("bad vertex set item {part:?}"));
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (
                a.trim().parse::<usize>().map_err(|_| bad())?,
                b.trim().parse::<usize>().map_err(|_| bad())?,
            ),
            None => {
                let v = part.parse::<usize>().map_err(|_| bad())?;
                (v, v)
            }
        };
        if lo > hi || hi >= n {
            return Err(usage(format!(
                "vertex set item {part:?} out of range for n = {n}"
            )));
        }
        out.extend(lo..=hi);
    }
    Ok(VertexSet::from_indices(n, out))
}

/// Explicit sets, else blocks from `--blocks` or the graph's sidecar.
fn pair(args: &PairArgs, graph_path: &Path, n: usize) -> CliResult<(VertexSet, Option<VertexSet>)> {
    if let Some(a) = &args.a {
        let b = args.b.as_deref().map(|b| vertex_set(b, n)).transpose()?;
        return Ok((vertex_set(a, n)?, b));
    }
    let path: PathBuf = args
        .blocks
        .clone()
        .unwrap_or_else(|| sidecar(graph_path, ".json"));
    if !path.is_file() {
        return Err(usage("give --set-a/--set-b or a block file via --blocks"));
    }
    let layout = load_blocks(&path)?;
    if args.pair.len() != 2 {
        return Err(usage("--pair takes two block indices"));
    }
    let block = |i: usize| {
        if i < layout.blocks.len() && layout.blocks[i].iter().all(|&v| v < n) {
            Ok(layout.block(i, n))
        } else {
            Err(usage(format!(
                "block {i} missing or out of range in {}",
                path.display()
            )))
        }
    };
    Ok((block(args.pair[0])?, Some(block(args.pair[1])?)))
}

pub fn gen(cfg: &ExperimentConfig, kind: &GenKind, target: Option<&Path>) -> CliResult<()> {
    let seed = Seed(cfg.seed);
    let (g, layout): (Graph, Option<BlockLayout>) = match kind {
        GenKind::Gnp { n, p } => (gen_gnp(*n, *p, seed)?, None),
        GenKind::Template { k, weights, sizes } => {
            let t = WeightedTemplate::from_flat(*k, weights.clone(), sizes.clone())?;
            let Planted { graph, layout } = expand_template(&t, seed)?;
            (graph, Some(layout))
        }
        GenKind::Counterexample { n } => {
            let Planted { graph, layout } = build_four_block_counterexample(*n, seed)?;
            (graph, Some(layout))
        }
    };
    let text = format_graph(&g);
    let Some(path) = target else {
        return print_stdout(&text);
    };
    write_text(path, &text)?;
    let mut meta = json!({
        "tool": "qrgraph",
        "version": qrgraph::VERSION,
        "config": cfg,
        "n": g.n(),
        "edges": g.edge_count(),
    });
    if let Some(l) = layout {
        meta["blocks"] = json!(l.blocks);
    }
    write_text(
        &sidecar(path, ".json"),
        &(serde_json::to_string_pretty(&meta).expect("sidecar serialises") + "\n"),
    )
}

pub fn count(args: &CountArgs) -> CliResult<Output> {
    let g = graph(&args.graph)?;
    let h = pattern(&args.pattern)?;
    let s = match &args.set {
        Some(spec) => vertex_set(spec, g.n())?,
        None => g.all_vertices(),
    };
    let labeled = count_labeled_copies(&h, &g, &s)?;
    let unlabeled = count_unlabeled_copies(&h, &g, &s)?;
    let targets = vec![s.clone(); h.r()];
    let homs = count_homomorphisms(&h, &g, Some(&targets)).ok();
    let edges = g.edges_within(&s) as u128;
    let (kk, kk_holds) = if h.is_clique() && h.r() >= 3 {
        (
            kk_clique_upper_bound::<f64>(edges, h.r()),
            kk_bound_holds(unlabeled, edges, h.r()),
        )
    } else {
        (None, None)
    };
    ensure(kk_holds != Some(false), || {
        format!("clique count {unlabeled} exceeds the Kruskal-Katona bound")
    })?;
    let result = json!({
        "pattern": h.name(),
        "n": g.n(),
        "set_size": s.len(),
        "edges": edges,
        "labeled": labeled.to_string(),
        "unlabeled": unlabeled.to_string(),
        "homomorphisms": homs.map(|c| c.to_string()),
        "kk_bound": kk,
    });
    let mut out = Output::new(
        result,
        &[
            "pattern",
            "n",
            "set_size",
            "edges",
            "labeled",
            "unlabeled",
            "homomorphisms",
            "kk_bound",
        ],
    );
    out.row(vec![
        h.name().into(),
        g.n().to_string(),
        s.len().to_string(),
        edges.to_string(),
        labeled.to_string(),
        unlabeled.to_string(),
        homs.map(|c| c.to_string()).unwrap_or_default(),
        kk.map(num).unwrap_or_default(),
    ]);
    Ok(out)
}

pub fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Set(s) => join(s.iter()),
        Witness::Parts { parts, .. } => parts
            .iter()
            .map(|p| join(p.iter()))
            .collect::<Vec<_>>()
            .join("|"),
    }
}

pub const DEFECT_COLUMNS: &[&str] = &[
    "family", "pattern", "p", "n", "mode", "samples", "defect", "count", "expected", "witness",
];

pub fn defect_row(rep: &DefectReport<f64>) -> Vec<String> {
    let (mode, samples) = match rep.mode {
        Mode::Exact => ("exact", String::new()),
        Mode::Sampled { samples, .. } => ("sampled", samples.to_string()),
    };
    vec![
        rep.kind.family.label().into(),
        rep.kind.pattern.name().into(),
        num(rep.kind.p),
        rep.n.to_string(),
        mode.into(),
        samples,
        num(rep.defect),
        rep.count.to_string(),
        num(rep.expected),
        witness_text(&rep.witness),
    ]
}

pub fn defect(cfg: &ExperimentConfig, args: &DefectArgs) -> CliResult<Output> {
    let g = graph(&args.graph)?;
    let h = pattern(&args.pattern)?;
    let family = Family::parse(&args.family).ok_or_else(|| {
        usage(format!(
            "unknown family {:?}; use P, Pstar, Q or R",
            args.family
        ))
    })?;
    let mode = match args.samples {
        Some(samples) => Mode::Sampled {
            samples,
            seed: Seed(cfg.seed),
            local_search: !args.no_local_search,
        },
        None => Mode::Exact,
    };
    if args.permutation.is_some() && family != Family::OrderedPartite {
        return Err(usage("--permutation applies to family R only"));
    }
    let rep = match family {
        Family::Global => defect_global(&g, &h, &args.p)?,
        Family::Hereditary => defect_hereditary(&g, &h, &args.p, mode)?,
        Family::Partite => defect_partite(&g, &h, &args.p, mode)?,
        Family::OrderedPartite => {
            defect_ordered_partite(&g, &h, &args.p, args.permutation.as_deref(), mode)?
        }
    };
    ensure(rep.verify(&g)?, || {
        "defect witness does not reproduce the reported value".into()
    })?;
    let mut out = Output::new(rep.to_json(), DEFECT_COLUMNS);
    out.row(defect_row(&rep));
    Ok(out)
}

fn rational(s: &str, what: &str) -> CliResult<Rational> {
    parse_rational(s)
        .ok_or_else(|| usage(format!("{what} must be num/den or a decimal, got {s:?}")))
}

pub fn regularity(cfg: &ExperimentConfig, args: &RegularityArgs) -> CliResult<Output> {
    let g = graph(&args.graph)?;
    let (a, b) = pair(&args.pair, &args.graph, g.n())?;
    let eps = rational(&args.eps, "--eps")?;
    let seed = Seed(cfg.seed);
    let columns = &[
        "direction",
        "q",
        "eps",
        "level",
        "exhaustive",
        "violates",
        "a_prime",
        "b_prime",
        "edges",
    ];
    let Some(b) = b else {
        return single_set(&g, &a, &eps, seed);
    };
    let q = match &args.q {
        Some(s) => rational(s, "-q")?,
        None => pair_density::<Rational>(&g, &a, &b),
    };
    let strategy = if args.exact {
        Strategy::Exact
    } else if let Some(restarts) = args.restarts {
        Strategy::HillClimb { restarts, seed }
    } else {
        Strategy::Auto { seed }
    };
    let dirs: &[Direction] = match args.direction {
        DirectionArg::Lower => &[Direction::Lower],
        DirectionArg::Upper => &[Direction::Upper],
        DirectionArg::Both => &[Direction::Lower, Direction::Upper],
    };
    let mut out = Output::new(Value::Null, columns);
    let mut reports = Vec::new();
    for &d in dirs {
        let level = regularity_level(&g, &a, &b, &q, d, strategy)?;
        let search = find_irregularity_witness(&g, &a, &b, &q, &eps, d, strategy)?;
        if let Some(w) = &search.witness {
            ensure(w.recheck(&g) && w.violates(), || {
                "witness fails its own recheck".into()
            })?;
        }
        ensure(search.witness.is_some() == (level > eps), || {
            format!(
                "level {} and witness search disagree at eps {}",
                format_rational(&level),
                format_rational(&eps)
            )
        })?;
        let w = search.witness.as_ref();
        out.row(vec![
            label(d).into(),
            num(q.as_f64()),
            num(eps.as_f64()),
            num(level.as_f64()),
            search.exhaustive.to_string(),
            w.is_some().to_string(),
            w.map(|w| join(w.a_prime.iter())).unwrap_or_default(),
            w.map(|w| join(w.b_prime.iter())).unwrap_or_default(),
            w.map(|w| w.edges.to_string()).unwrap_or_default(),
        ]);
        reports.push(json!({
            "direction": d,
            "level": level.as_f64(),
            "level_exact": format_rational(&level),
            "exhaustive": search.exhaustive,
            "regular": w.is_none(),
            "certified_regular": search.certified_regular(),
            "witness": w.map(|w| w.to_json()),
        }));
    }
    out.result = json!({
        "a_size": a.len(),
        "b_size": b.len(),
        "edges": g.edges_between(&a, &b),
        "q": q.as_f64(),
        "q_exact": format_rational(&q),
        "eps": eps.as_f64(),
        "eps_exact": format_rational(&eps),
        "directions": reports,
    });
    Ok(out)
}

fn label(d: Direction) -> &'static str {
    match d {
        Direction::Lower => "lower",
        Direction::Upper => "upper",
    }
}

/// One set: deviation over disjoint subpairs against `e(U) / C(|U|, 2)`,
/// and a regular subset when `eps > 0`.
fn single_set(g: &Graph, u: &VertexSet, eps: &Rational, seed: Seed) -> CliResult<Output> {
    if u.len() < 4 {
        return Err(usage("single-set regularity needs at least 4 vertices"));
    }
    let (level, ap, bp, exhaustive) = single_set_deviation(g, u, seed);
    let subset = if *eps > Rational::from_integer(0.into()) {
        let rs = find_regular_subset(g, u, eps.as_f64(), seed)?;
        Some(
            json!({"set": rs.set.to_vec(), "level": rs.level, "certified": rs.certified, "exhaustive": rs.exhaustive}),
        )
    } else {
        None
    };
    let result = json!({
        "set_size": u.len(),
        "level": level,
        "a_prime": ap.to_vec(),
        "b_prime": bp.to_vec(),
        "exhaustive": exhaustive,
        "regular_subset": subset,
    });
    let mut out = Output::new(
        result,
        &[
            "direction",
            "q",
            "eps",
            "level",
            "exhaustive",
            "violates",
            "a_prime",
            "b_prime",
            "edges",
        ],
    );
    let k = u.len();
    let q = g.edges_within(u) as f64 / (k * (k - 1) / 2) as f64;
    out.row(vec![
        "single".into(),
        num(q),
        num(eps.as_f64()),
        num(level),
        exhaustive.to_string(),
        (level > eps.as_f64()).to_string(),
        join(ap.iter()),
        join(bp.iter()),
        g.edges_between(&ap, &bp).to_string(),
    ]);
    Ok(out)
}

pub const TRACE_COLUMNS: &[&str] = &[
    "iter",
    "size",
    "alpha",
    "alpha_exact",
    "beta",
    "branch",
    "unmet",
];

/// Driver trace as JSONL records plus CSV rows; steps that break
/// `α' ≥ (1 + β) α` or monotonicity are reported as violations.
pub fn trace_output<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    p: &T,
    a: &VertexSet,
    b: &VertexSet,
    dcfg: &DriverConfig<T>,
    c_prime: f64,
) -> CliResult<(Output, Value)> {
    let trace = increment_driver(g, h, p, a, b, dcfg)?;
    let mut bad = Vec::new();
    for w in trace.states.windows(2) {
        let beta = w[1].beta.clone().unwrap_or_else(T::zero);
        if w[1].alpha < (T::one() + beta) * w[0].alpha.clone() {
            bad.push(w[1].iteration);
        }
    }
    let monotone = trace.is_monotone();
    let init = &trace.states[0];
    let last = trace.final_state();
    let eps = init.alpha.as_f64() * p.as_f64();
    let summary = json!({
        "pattern": h.name(),
        "n": g.n(),
        "exit": trace.exit,
        "size_floor": trace.size_floor,
        "steps": trace.states.len() - 1,
        "monotone": monotone,
        "amplification_failures": bad,
        "initial": init.to_json(),
        "final": last.to_json(),
        "alpha_limit": last.params.alpha_limit().as_f64(),
        "theorem_delta": qrgraph::regularity::theorem_delta(p.as_f64(), h.r(), h.m(), eps, c_prime),
        "theorem_delta_log10": qrgraph::regularity::theorem_delta_log10(p.as_f64(), h.r(), h.m(), eps, c_prime),
        "endgame": trace.endgame,
    });
    let mut out = Output::new(summary.clone(), TRACE_COLUMNS);
    out.records = Some(
        trace
            .records
            .iter()
            .map(|r| serde_json::to_value(r).expect("record serialises"))
            .collect(),
    );
    for r in &trace.records {
        out.row(vec![
            r.iter.to_string(),
            r.size.to_string(),
            num(r.alpha),
            r.alpha_exact.clone().unwrap_or_default(),
            r.beta.map(num).unwrap_or_default(),
            r.branch.clone(),
            r.unmet.join(" "),
        ]);
    }
    if !monotone || !bad.is_empty() {
        out.violation = Some(format!(
            "increment trace not amplifying at iterations {bad:?} (monotone = {monotone})"
        ));
    }
    Ok((out, summary))
}

fn driver_config<T: Scalar>(
    cfg: &ExperimentConfig,
    args: &IncrementArgs,
) -> CliResult<DriverConfig<T>> {
    let mut d = DriverConfig::<T>::new(Seed(cfg.seed));
    d.max_iters = args.max_iters;
    d.delta_q = parse_scalar(&args.delta_q)
        .ok_or_else(|| usage(format!("bad --delta-q {:?}", args.delta_q)))?;
    d.enforce_preconditions = args.enforce_preconditions;
    d.min_size = args.min_size;
    Ok(d)
}

pub fn increment(cfg: &ExperimentConfig, args: &IncrementArgs) -> CliResult<Output> {
    let g = graph(&args.graph)?;
    let h = pattern(&args.pattern)?;
    let (a, b) = pair(&args.pair, &args.graph, g.n())?;
    let b = b.ok_or_else(|| usage("increment needs two sets"))?;
    let bad_p = || usage(format!("bad -p {:?}", args.p));
    let out = if args.exact {
        let p: Rational = parse_scalar(&args.p).ok_or_else(bad_p)?;
        trace_output(&g, &h, &p, &a, &b, &driver_config(cfg, args)?, cfg.c_prime)?.0
    } else {
        let p: f64 = parse_scalar(&args.p).ok_or_else(bad_p)?;
        trace_output(&g, &h, &p, &a, &b, &driver_config(cfg, args)?, cfg.c_prime)?.0
    };
    Ok(out)
}

pub const POLYNOMIAL_COLUMNS: &[&str] = &["pattern", "p", "girth", "power", "coeff"];

/// Report and rows for one pattern; forests carry a `null` girth.
pub fn polynomial_report(h: &Pattern, p: &Rational) -> CliResult<(Value, Vec<Vec<String>>, bool)> {
    let (json, coeffs, girth, vanishes) = match h.girth() {
        Some(g) => {
            let rep = check_girth_vanishing(h, p)?;
            (rep.to_json(), rep.polynomial.coeffs, Some(g), rep.vanishes)
        }
        None => {
            let poly = epsilon_polynomial(h, p)?;
            let coeffs: Vec<String> = poly.coeffs.iter().map(format_rational).collect();
            let json = json!({
                "pattern": h.name(),
                "p": format_rational(p),
                "coeffs": coeffs,
                "girth": null,
                "first_nonzero": poly.first_nonzero_from(1),
            });
            (json, poly.coeffs, None, true)
        }
    };
    let rows = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                h.name().into(),
                format_rational(p),
                girth.map(|g| g.to_string()).unwrap_or_default(),
                i.to_string(),
                format_rational(c),
            ]
        })
        .collect();
    Ok((json, rows, vanishes))
}

pub fn polynomial(args: &PolynomialArgs) -> CliResult<Output> {
    let h = pattern(&args.pattern)?;
    let p = rational(&args.p, "-p")?;
    let (json, rows, vanishes) = polynomial_report(&h, &p)?;
    let mut out = Output::new(json, POLYNOMIAL_COLUMNS);
    out.rows = rows;
    if !vanishes {
        out.violation = Some(format!(
            "coefficients below the girth of {} do not vanish",
            h.name()
        ));
    }
    Ok(out)
}

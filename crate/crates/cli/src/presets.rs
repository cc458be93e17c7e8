//! Named, seeded experiments. Each preset reads its parameters from the
//! config (falling back to the defaults below), runs, and returns a report
//! whose assertions decide the exit status.

use num_rational::BigRational;
use serde_json::{json, Value};

use splicer_core::cuts::{sampled_cut_ratios, spectral_lower_bound, vertex_expansion_exact, Derived};
use splicer_core::graph::{
    complete_graph, cycle_graph, gnp_graph, lower_bound_family, petersen_graph, random_regular_graph, spanning_tree_count,
    Graph, ResistanceOracle,
};
use splicer_core::rng::{map_trials, Seed};
use splicer_core::route::{reliability_experiment, stretch_stats};
use splicer_core::sampler::{aldous_broder, aldous_broder_tree, process_bp};
use splicer_core::splicer::{sparsify_gnp, splice};
use splicer_core::stats::{
    chernoff_tail_from_samples, chi_square_uniform, coupling_distance_estimate, min_edge_from_samples,
    negative_correlation_exact, negative_correlation_sampled, total_variation_from_uniform, Estimate, InclusionSamples,
    TreeSpace,
};

use crate::config::ExperimentConfig;
use crate::report::{Assertion, Report, Table};

pub const PRESETS: [&str; 12] = [
    "uniformity",
    "effective-resistance",
    "negative-correlation",
    "chernoff-tail",
    "min-edge",
    "thm-cut-preservation",
    "thm-lower-bound",
    "thm-complete-graph",
    "thm-random-graph",
    "thm-sparsifier",
    "stretch",
    "reliability",
];

#[derive(Debug, thiserror::Error)]
pub enum PresetError {
    #[error("unknown preset {0:?}")]
    Unknown(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Core(#[from] splicer_core::Error),
}

type Outcome = Result<Report, PresetError>;

pub fn run_preset(cfg: &ExperimentConfig) -> Outcome {
    let root = Seed(cfg.seed);
    let s = root.derive(&format!("preset.{}", cfg.preset), 0);
    let (assertions, results, detail) = match cfg.preset.as_str() {
        "uniformity" => uniformity(cfg, s)?,
        "effective-resistance" => effective_resistance(cfg, s)?,
        "negative-correlation" => negative_correlation(cfg, s)?,
        "chernoff-tail" => chernoff_tail(cfg, s)?,
        "min-edge" => min_edge(cfg, s)?,
        "thm-cut-preservation" => cut_preservation(cfg, s)?,
        "thm-lower-bound" => lower_bound(cfg, s)?,
        "thm-complete-graph" => complete_graph_expansion(cfg, s)?,
        "thm-random-graph" => random_graph(cfg, s)?,
        "thm-sparsifier" => sparsifier(cfg, s)?,
        "stretch" => stretch(cfg, s)?,
        "reliability" => reliability(cfg, s)?,
        other => return Err(PresetError::Unknown(other.into())),
    };
    Ok(Report {
        preset: cfg.preset.clone(),
        config: serde_json::to_value(cfg).expect("plain values"),
        assertions,
        results,
        detail,
    })
}

type Parts = (Vec<Assertion>, Value, Table);

fn param_check(ok: bool, msg: &str) -> Result<(), PresetError> {
    if ok {
        Ok(())
    } else {
        Err(PresetError::Parameter(msg.into()))
    }
}

/// First connected graph among `make(seed/name/0)`, `make(seed/name/1)`, ...
pub fn first_connected<F>(seed: Seed, name: &str, make: F) -> Result<Graph, PresetError>
where
    F: Fn(Seed) -> splicer_core::Result<Graph>,
{
    for i in 0..1000 {
        let g = make(seed.derive(name, i))?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(PresetError::Parameter(format!("{name}: no connected instance in 1000 draws")))
}

fn ln(n: usize) -> f64 {
    (n as f64).ln()
}

fn uniformity(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(4);
    let trials = cfg.trials.unwrap_or(1_600_000);
    param_check((2..=6).contains(&n), "uniformity needs 2 <= n <= 6")?;
    let g = complete_graph(n)?;
    let space = TreeSpace::new(&g)?;
    let tau = spanning_tree_count(&g);
    let idx = map_trials(trials, |i| {
        aldous_broder_tree(&g, s.derive("uniformity.tree", i as u64), None).and_then(|t| space.index_of(&g, &t))
    });
    let mut counts = vec![0u64; space.len()];
    for i in idx {
        counts[i?] += 1;
    }
    let tv = total_variation_from_uniform(&counts);
    let chi = chi_square_uniform(&counts);
    let mut detail = Table::new(&["tree", "count", "expected"]);
    for (i, c) in counts.iter().enumerate() {
        detail.push([i.to_string(), c.to_string(), format!("{:?}", trials as f64 / counts.len() as f64)]);
    }
    let assertions = vec![
        Assertion::holds(
            "enumeration matches matrix-tree count",
            tau == space.len().into(),
            format!("enumerated {}, matrix-tree {tau}", space.len()),
        ),
        Assertion::at_most("tv from uniform", tv, 0.01, format!("{trials} Aldous-Broder trees on K_{n}")),
    ];
    let results = json!({
        "n": n, "trials": trials, "trees": space.len(), "matrix_tree": tau.to_string(),
        "tv": tv, "chi_square": chi,
    });
    Ok((assertions, results, detail))
}

fn named_graphs(s: Seed, names: &[&str]) -> Result<Vec<(String, Graph)>, PresetError> {
    names
        .iter()
        .map(|&name| {
            let g = match name {
                "K4" => complete_graph(4)?,
                "K10" => complete_graph(10)?,
                "C5" => cycle_graph(5)?,
                "petersen" => petersen_graph(),
                "W5" => Graph::from_edges(6, (1..=5).flat_map(|i| [(0, i), (i, i % 5 + 1)]))?,
                "prism" => Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])?,
                "C5+chord" => Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])?,
                "rr20" => first_connected(s, "graph.rr20", |x| random_regular_graph(20, 3, x))?,
                "rr30" => first_connected(s, "graph.rr30", |x| random_regular_graph(30, 3, x))?,
                other => return Err(PresetError::Parameter(format!("no graph named {other}"))),
            };
            Ok((name.to_string(), g))
        })
        .collect()
}

fn effective_resistance(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let trials = cfg.trials.unwrap_or(100_000);
    let mut assertions = Vec::new();
    let mut detail = Table::new(&["graph", "u", "v", "empirical", "se", "resistance", "abs_err"]);
    let mut summary = Vec::new();
    for (gi, (name, g)) in named_graphs(s, &["K10", "C5", "petersen", "rr20"])?.into_iter().enumerate() {
        let oracle = ResistanceOracle::new(&g)?;
        let bank = InclusionSamples::sample(&g, trials, s.derive("resistance.bank", gi as u64))?;
        let mut worst: f64 = 0.0;
        for (e, est) in bank.marginals().into_iter().enumerate() {
            let (u, v) = g.edge(e);
            let r = oracle.resistance(u, v);
            let err = (est.value - r).abs();
            worst = worst.max(err);
            detail.push([name.clone(), u.to_string(), v.to_string(), format!("{:?}", est.value), format!("{:?}", est.se), format!("{r:?}"), format!("{err:?}")]);
        }
        assertions.push(Assertion::at_most(
            &format!("{name}: max |Pr[e in T] - R_eff(e)|"),
            worst,
            0.01,
            format!("{} edges, {trials} trees", g.m()),
        ));
        summary.push(json!({"graph": name, "edges": g.m(), "max_abs_err": worst}));
    }
    for (name, g) in named_graphs(s, &["K4", "C5"])? {
        let space = TreeSpace::new(&g)?;
        let oracle = ResistanceOracle::new(&g)?;
        let mismatches = (0..g.m())
            .filter(|&e| {
                let (u, v) = g.edge(e);
                let (c, t) = space.count_containing(&[e]);
                Some(BigRational::new(c.into(), t.into())) != oracle.exact(u, v)
            })
            .count();
        assertions.push(Assertion::holds(
            &format!("{name}: enumerated marginals equal exact resistances"),
            mismatches == 0,
            format!("{mismatches} mismatching edges of {}", g.m()),
        ));
    }
    Ok((assertions, json!({"trials": trials, "graphs": summary}), detail))
}

fn negative_correlation(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let trials = cfg.trials.unwrap_or(1_000_000);
    let pairs = cfg.pairs.unwrap_or(50);
    let mut assertions = Vec::new();
    let mut detail = Table::new(&["graph", "edges", "method", "joint", "product", "joint_absent", "product_absent", "margin", "margin_absent", "holds"]);
    let mut summary = Vec::new();
    let mut record = |name: &str, r: &splicer_core::stats::CorrelationReport, method: &str| {
        let edges = r.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(" ");
        detail.push([
            name.to_string(),
            edges,
            method.to_string(),
            format!("{:?}", r.joint),
            format!("{:?}", r.product),
            format!("{:?}", r.joint_absent),
            format!("{:?}", r.product_absent),
            format!("{:?}", r.margin),
            format!("{:?}", r.margin_absent),
            (r.holds && r.holds_absent).to_string(),
        ]);
    };
    for (name, g) in named_graphs(s, &["K4", "W5", "prism", "C5+chord"])? {
        let space = TreeSpace::new(&g)?;
        let mut checked = 0;
        let mut failed = 0;
        for a in 0..g.m() {
            for b in a + 1..g.m() {
                let r = negative_correlation_exact(&g, &space, &[g.edge(a), g.edge(b)])?;
                record(&name, &r, "exact");
                checked += 1;
                failed += usize::from(!(r.holds && r.holds_absent));
            }
        }
        assertions.push(Assertion::holds(
            &format!("{name}: exact negative correlation on every edge pair"),
            failed == 0,
            format!("{failed} of {checked} pairs violate"),
        ));
        summary.push(json!({"graph": name, "method": "exact", "pairs": checked, "violations": failed}));
    }
    for (gi, (name, g)) in named_graphs(s, &["petersen", "rr30"])?.into_iter().enumerate() {
        let bank = InclusionSamples::sample(&g, trials, s.derive("correlation.bank", gi as u64))?;
        let mut rng = s.stream("correlation.pairs", gi as u64);
        let mut failed = 0;
        let mut worst_slack = f64::INFINITY;
        for _ in 0..pairs {
            let a = rng.index(g.m());
            let mut b = rng.index(g.m() - 1);
            if b >= a {
                b += 1;
            }
            let r = negative_correlation_sampled(&g, &bank, &[g.edge(a), g.edge(b)])?;
            record(&name, &r, "monte-carlo");
            failed += usize::from(!(r.holds && r.holds_absent));
            worst_slack = worst_slack
                .min(r.product + r.margin - r.joint)
                .min(r.product_absent + r.margin_absent - r.joint_absent);
        }
        assertions.push(Assertion::holds(
            &format!("{name}: joint <= product + 4 SE on {pairs} random pairs"),
            failed == 0,
            format!("{failed} violations, smallest slack {worst_slack:.3e}, {trials} trees"),
        ));
        summary.push(json!({"graph": name, "method": "monte-carlo", "pairs": pairs, "violations": failed, "trials": trials}));
    }
    Ok((assertions, json!({"graphs": summary}), detail))
}

fn random_half(n: usize, rng: &mut splicer_core::rng::Stream) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut all);
    let mut a = all[..n / 2].to_vec();
    a.sort_unstable();
    a
}

fn chernoff_tail(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(64);
    let d = cfg.d.unwrap_or(3);
    let trials = cfg.trials.unwrap_or(100_000);
    let cuts = cfg.samples.unwrap_or(10);
    param_check(trials >= 10_000, "chernoff-tail needs trials >= 10^4")?;
    let g = first_connected(s, "graph.regular", |x| random_regular_graph(n, d, x))?;
    let bank = InclusionSamples::sample(&g, trials, s.derive("chernoff.bank", 0))?;
    let mut rng = s.stream("chernoff.cuts", 0);
    let mut detail = Table::new(&["cut", "cut_size", "p_bar", "multiplier", "lambda", "threshold", "tail", "tail_se", "bound", "pass"]);
    let mut failing = 0;
    let mut points = 0;
    for c in 0..cuts {
        let set = random_half(n, &mut rng);
        let r = chernoff_tail_from_samples(&g, &bank, &set)?;
        for p in &r.points {
            points += 1;
            failing += usize::from(!p.pass);
            detail.push([
                c.to_string(),
                r.cut_size.to_string(),
                format!("{:?}", r.p_bar.value),
                format!("{:?}", p.multiplier),
                format!("{:?}", p.lambda),
                format!("{:?}", p.threshold),
                format!("{:?}", p.tail.value),
                format!("{:?}", p.tail.se),
                format!("{:?}", p.bound),
                p.pass.to_string(),
            ]);
        }
    }
    let assertions = vec![Assertion::holds(
        "empirical tail <= exp(-lambda^2 / (2 p|delta|)) + 4 SE at every grid point",
        failing == 0,
        format!("{failing} of {points} points fail, {cuts} cuts, {trials} trees"),
    )];
    Ok((assertions, json!({"n": n, "d": d, "trials": trials, "cuts": cuts, "failing_points": failing}), detail))
}

fn min_edge(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(50);
    let d = cfg.d.unwrap_or(3);
    let trials = cfg.trials.unwrap_or(100_000);
    let g = first_connected(s, "graph.regular", |x| random_regular_graph(n, d, x))?;
    let bank = InclusionSamples::sample(&g, trials, s.derive("min_edge.bank", 0))?;
    let r = min_edge_from_samples(&g, &bank);
    let mut detail = Table::new(&["u", "v", "probability", "se"]);
    for (e, est) in bank.marginals().iter().enumerate() {
        let (u, v) = g.edge(e);
        detail.push([u.to_string(), v.to_string(), format!("{:?}", est.value), format!("{:?}", est.se)]);
    }
    let bound = 1.0 / d as f64 - 4.0 * r.estimate.se;
    let assertions = vec![Assertion::at_least(
        "min edge probability >= 1/d - 4 SE",
        r.estimate.value,
        bound,
        format!("edge {:?}", r.edge),
    )];
    Ok((assertions, json!({"n": n, "d": d, "trials": trials, "min": r}), detail))
}

fn cut_preservation(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(256);
    let d = cfg.d.unwrap_or(3);
    let k = cfg.k.unwrap_or(2);
    let samples = cfg.samples.unwrap_or(10_000);
    let seeds = cfg.seeds.unwrap_or(20);
    let alpha = 81.0;
    let bound = 1.0 / (alpha * ln(n));
    let mut detail = Table::new(&["seed_index", "min_ratio", "family", "set_size", "base_cut", "splicer_cut"]);
    let mut overall = f64::INFINITY;
    let mut per_seed = Vec::new();
    for i in 0..seeds {
        let si = s.derive("cut_preservation.seed", i as u64);
        let g = first_connected(si, "graph.regular", |x| random_regular_graph(n, d, x))?;
        let sp = splice(&g, k, si)?;
        let rows = sampled_cut_ratios(&g, Derived::Splicer(&sp), samples, si.derive("cuts", 0))?;
        let worst = rows.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio)).expect("samples >= 1");
        overall = overall.min(worst.ratio);
        per_seed.push(worst.ratio);
        detail.push([
            i.to_string(),
            format!("{:?}", worst.ratio),
            format!("{:?}", worst.family),
            worst.set.len().to_string(),
            worst.base_cut.to_string(),
            format!("{:?}", worst.derived_cut),
        ]);
    }
    let assertions = vec![Assertion::at_least(
        "min |delta_U(A)| / |delta_G(A)| >= 1 / (alpha ln n)",
        overall,
        bound,
        format!("alpha = {alpha}, {seeds} seeds x {samples} cuts"),
    )];
    Ok((assertions, json!({"n": n, "d": d, "k": k, "min_ratio": overall, "per_seed_min": per_seed, "bound": bound}), detail))
}

fn lower_bound(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(3000);
    let d = cfg.d.unwrap_or(3);
    let ells = cfg.ells.clone().unwrap_or_else(|| vec![1, 2, 3]);
    let target = cfg.trials.unwrap_or(100_000);
    let mut assertions = Vec::new();
    let mut detail = Table::new(&["ell", "segments", "trees", "events", "frequency", "se", "event_bound"]);
    let mut summary = Vec::new();
    for &ell in &ells {
        let fam = lower_bound_family(n, d, ell, s.derive("lower_bound.family", ell as u64))?;
        let valid = fam.validate();
        assertions.push(Assertion::holds(
            &format!("ell = {ell}: structural invariants"),
            valid.is_ok(),
            valid.err().unwrap_or_else(|| format!("{} segments, max degree {}", fam.paths.len(), fam.graph.max_degree())),
        ));
        let segments = fam.paths.len();
        let trees = target.div_ceil(segments);
        let counts = map_trials(trees, |t| {
            aldous_broder(&fam.graph, s.derive(&format!("lower_bound.walk.{ell}"), t as u64), None)
                .map(|(_, trace)| fam.count_events(&trace))
        });
        let mut events = 0;
        for c in counts {
            events += c?;
        }
        let est = Estimate::proportion(events, trees * segments);
        let event_bound = (d as f64 + 2.0).powi(-(((d + 1) * ell) as i32 - 1));
        if ell == 1 {
            assertions.push(Assertion::at_least(
                "ell = 1: Pr[E_P] >= 1/(d+2)^((d+1)ell-1) - 4 SE",
                est.value,
                event_bound - 4.0 * est.se,
                format!("{events} events in {} path samples", trees * segments),
            ));
        }
        detail.push([
            ell.to_string(),
            segments.to_string(),
            trees.to_string(),
            events.to_string(),
            format!("{:?}", est.value),
            format!("{:?}", est.se),
            format!("{event_bound:?}"),
        ]);
        summary.push(json!({"ell": ell, "segments": segments, "trees": trees, "frequency": est, "event_bound": event_bound}));
    }
    Ok((assertions, json!({"n": n, "d": d, "families": summary}), detail))
}

fn complete_graph_expansion(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(16);
    let k = cfg.k.unwrap_or(2);
    let seeds = cfg.seeds.unwrap_or(100);
    let sizes = cfg.sizes.clone().unwrap_or_else(|| vec![128, 256, 512, 1024]);
    let runs = cfg.runs.unwrap_or(20);
    let mut detail = Table::new(&["check", "n", "seed_index", "value"]);

    let kn = complete_graph(n)?;
    let exact = map_trials(seeds, |i| {
        let sp = splice(&kn, k, s.derive("complete.exact", i as u64))?;
        vertex_expansion_exact(sp.support())
    });
    let mut good = 0;
    let mut values = Vec::new();
    for (i, r) in exact.into_iter().enumerate() {
        let r = r?;
        good += usize::from(r.value >= 0.5);
        detail.push(["vertex-expansion".to_string(), n.to_string(), i.to_string(), format!("{:?}", r.value)]);
        values.push(r.value);
    }
    let fraction = good as f64 / seeds as f64;
    let mut assertions = vec![Assertion::at_least(
        "fraction of seeds with exact vertex expansion >= 1/2",
        fraction,
        0.95,
        format!("splice(K_{n}, {k}), {seeds} seeds"),
    )];

    let mut means: Vec<(usize, Estimate)> = Vec::new();
    let mut smallest = f64::INFINITY;
    for &m in &sizes {
        let g = complete_graph(m)?;
        let mut lambdas = Vec::new();
        for i in 0..runs {
            let sp = splice(&g, k, s.derive(&format!("complete.spectral.{m}"), i as u64))?;
            let l2 = spectral_lower_bound(sp.support())?.lambda2;
            detail.push(["lambda2".to_string(), m.to_string(), i.to_string(), format!("{l2:?}")]);
            smallest = smallest.min(l2);
            lambdas.push(l2);
        }
        means.push((m, Estimate::mean(&lambdas)));
    }
    if !sizes.is_empty() {
        assertions.push(Assertion::at_least(
            "min lambda_2 of splice(K_n, 2) support",
            smallest,
            0.15,
            format!("n in {sizes:?}, {runs} seeds each"),
        ));
        // No decrease between consecutive sizes beyond 4 combined SE.
        let worst_drop = means
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0].1, w[1].1);
                (a.value - b.value) - 4.0 * (a.se * a.se + b.se * b.se).sqrt()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assertions.push(Assertion::at_most(
            "no decreasing lambda_2 trend across n",
            worst_drop.max(0.0),
            0.0,
            "largest drop between consecutive sizes minus 4 SE",
        ));
    }
    let results = json!({
        "n": n, "k": k, "fraction_at_least_half": fraction,
        "min_vertex_expansion": values.iter().copied().fold(f64::INFINITY, f64::min),
        "lambda2": means.iter().map(|(m, e)| json!({"n": m, "mean": e.value, "se": e.se})).collect::<Vec<_>>(),
    });
    Ok((assertions, results, detail))
}

fn random_graph(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(1024);
    let p = cfg.p.unwrap_or(20.0 * ln(n) / n as f64);
    let runs = cfg.runs.unwrap_or(100);
    let trials = cfg.trials.unwrap_or(1_000_000);
    let seeds = cfg.seeds.unwrap_or(20);
    let small = 6;
    param_check(p > 0.0 && p <= 1.0, "p must lie in (0, 1]")?;
    let mut detail = Table::new(&["check", "index", "value"]);

    let outcomes = map_trials(runs, |i| -> splicer_core::Result<bool> {
        let h = gnp_graph(n, p, s.derive("random_graph.success.graph", i as u64))?;
        Ok(process_bp(&h, p, s.derive("random_graph.success.walk", i as u64), 0)?.succeeded())
    });
    let mut successes = 0;
    for (i, o) in outcomes.into_iter().enumerate() {
        let ok = o?;
        successes += usize::from(ok);
        detail.push(["success".to_string(), i.to_string(), ok.to_string()]);
    }
    let rate = Estimate::proportion(successes, runs);

    let coupling = coupling_distance_estimate(small, 1.0, trials, s.derive("random_graph.coupling", 0))?;
    let tv = coupling.tv_to_uniform.expect("small n");

    let mut smallest = f64::INFINITY;
    for i in 0..seeds {
        let si = s.derive("random_graph.union", i as u64);
        let h = gnp_graph(n, p, si)?;
        let w = sparsify_gnp(&h, p, si)?;
        let l2 = spectral_lower_bound(w.graph())?.lambda2;
        smallest = smallest.min(l2);
        detail.push(["lambda2".to_string(), i.to_string(), format!("{l2:?}")]);
    }

    let assertions = vec![
        Assertion::at_least("process B_p success rate", rate.value, 0.9, format!("n = {n}, p = {p:.6}, {runs} runs")),
        Assertion::at_most(
            "TV(process B_p trees on G(6,1), uniform)",
            tv,
            0.02,
            format!("{trials} trials; two-sample TV against Aldous-Broder {:.4}", coupling.tv_two_sample.unwrap_or(f64::NAN)),
        ),
        Assertion::at_least("min lambda_2 of two B_p trees", smallest, 0.15, format!("{seeds} seeds")),
    ];
    let results = json!({
        "n": n, "p": p, "success": rate, "coupling": coupling, "min_lambda2": smallest,
    });
    Ok((assertions, results, detail))
}

fn sparsifier(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(1000);
    let p = cfg.p.unwrap_or(10.0 * ln(n) / n as f64);
    let samples = cfg.samples.unwrap_or(10_000);
    let seeds = cfg.seeds.unwrap_or(20);
    param_check(p > 0.0 && p <= 1.0, "p must lie in (0, 1]")?;
    let mut detail = Table::new(&["seed_index", "edges", "c_low", "c_high"]);
    let (mut low, mut high, mut biggest) = (f64::INFINITY, f64::NEG_INFINITY, 0usize);
    for i in 0..seeds {
        let si = s.derive("sparsifier.seed", i as u64);
        let h = first_connected(si, "graph.gnp", |x| gnp_graph(n, p, x))?;
        let w = sparsify_gnp(&h, p, si)?;
        let rows = sampled_cut_ratios(&h, Derived::Weighted(&w), samples, si.derive("cuts", 0))?;
        let q = splicer_core::cuts::quality_from_ratios(n, &rows);
        low = low.min(q.c_low);
        high = high.max(q.c_high);
        biggest = biggest.max(w.graph().m());
        detail.push([i.to_string(), w.graph().m().to_string(), format!("{:?}", q.c_low), format!("{:?}", q.c_high)]);
    }
    let assertions = vec![
        Assertion::at_least("min w(delta_H'(A)) / |delta_H(A)|", low, 0.05, format!("{seeds} seeds x {samples} cuts")),
        Assertion::at_most("max w(delta_H'(A)) / (|delta_H(A)| ln n)", high, 50.0, format!("{seeds} seeds x {samples} cuts")),
        Assertion::at_most("sparsifier edges", biggest as f64, 2.0 * (n as f64 - 1.0), "largest output over seeds"),
    ];
    Ok((assertions, json!({"n": n, "p": p, "c_low": low, "c_high": high, "max_edges": biggest}), detail))
}

fn stretch(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let sizes = cfg.sizes.clone().unwrap_or_else(|| vec![256, 1024]);
    let seeds = cfg.seeds.unwrap_or(20);
    let pairs = cfg.pairs.unwrap_or(500);
    let k = cfg.k.unwrap_or(2);
    param_check(sizes.len() >= 2, "stretch needs at least two sizes")?;
    let mut detail = Table::new(&["check", "n", "seed_index", "value"]);
    let mut means = Vec::new();
    for &n in &sizes {
        let g = complete_graph(n)?;
        let mut vals = Vec::new();
        for i in 0..seeds {
            let si = s.derive(&format!("stretch.single.{n}"), i as u64);
            let sp = splice(&g, 1, si)?;
            let st = stretch_stats(&g, &sp, pairs, si)?;
            vals.push(st.mean_stretch.value);
            detail.push(["single-tree-stretch".to_string(), n.to_string(), i.to_string(), format!("{:?}", st.mean_stretch.value)]);
        }
        means.push(Estimate::mean(&vals));
    }
    let (first, last) = (means[0].value, means[means.len() - 1].value);
    let ratio = last / first;
    let big = *sizes.last().expect("two sizes");
    let g = complete_graph(big)?;
    let mut diameters = Vec::new();
    for i in 0..seeds {
        let si = s.derive("stretch.diameter", i as u64);
        let sp = splice(&g, k, si)?;
        let st = stretch_stats(&g, &sp, pairs, si)?;
        let dia = st.diameter.expect("n within diameter limit");
        diameters.push(dia);
        detail.push(["splicer-diameter".to_string(), big.to_string(), i.to_string(), dia.to_string()]);
    }
    let growth = (big as f64 / sizes[0] as f64).sqrt();
    let max_dia = *diameters.iter().max().expect("seeds >= 1");
    let dia_bound = 4.0 * (big as f64).log2();
    let assertions = vec![
        Assertion::at_least("single-tree stretch ratio lower band", ratio, 0.8 * growth, format!("n = {} vs {}", big, sizes[0])),
        Assertion::at_most("single-tree stretch ratio upper band", ratio, 1.2 * growth, format!("sqrt growth predicts {growth}")),
        Assertion::at_most(&format!("max {k}-splicer diameter on K_{big}"), max_dia as f64, dia_bound, format!("{seeds} seeds")),
    ];
    let results = json!({
        "sizes": sizes,
        "mean_stretch": means,
        "ratio": ratio,
        "diameters": diameters,
    });
    Ok((assertions, results, detail))
}

fn reliability(cfg: &ExperimentConfig, s: Seed) -> Result<Parts, PresetError> {
    let n = cfg.n.unwrap_or(256);
    let k = cfg.k.unwrap_or(2);
    let f = cfg.failure_prob.unwrap_or(0.05);
    let pairs = cfg.pairs.unwrap_or(200);
    let trials = cfg.trials.unwrap_or(50);
    param_check(k >= 2, "reliability compares k against a single tree; need k >= 2")?;
    let g = complete_graph(n)?;
    let one = reliability_experiment(&g, 1, f, pairs, trials, s)?;
    let many = reliability_experiment(&g, k, f, pairs, trials, s)?;
    let mut detail = Table::new(&["k", "trial", "seed", "failure_prob", "delivered_fraction", "ceiling_fraction", "mean_hops", "mean_switches"]);
    let mut over = 0;
    for summary in [&one, &many] {
        for r in &summary.rows {
            over += usize::from(r.delivered_fraction > r.ceiling_fraction);
            detail.push([
                summary.k.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                format!("{:?}", r.failure_prob),
                format!("{:?}", r.delivered_fraction),
                format!("{:?}", r.ceiling_fraction),
                format!("{:?}", r.mean_hops),
                format!("{:?}", r.mean_switches),
            ]);
        }
    }
    let gain = many.delivered.value - one.delivered.value;
    let assertions = vec![
        Assertion::at_least(&format!("delivery gain of k = {k} over k = 1"), gain, 0.05, format!("K_{n}, failure_prob {f}, {trials} trials")),
        Assertion::holds("delivery never exceeds the connectivity ceiling", over == 0, format!("{over} trials over the ceiling")),
    ];
    let results = json!({
        "n": n, "k": k, "failure_prob": f, "pairs": pairs, "trials": trials,
        "delivered_k1": one.delivered, "delivered_k": many.delivered, "ceiling": many.ceiling, "gain": gain,
    });
    Ok((assertions, results, detail))
}

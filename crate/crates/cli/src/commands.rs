use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::json;
use ts_groups::analysis::{
    box_points, distance_matrix, folner_traversal_demo, heuristic_matrix, l_prime, mst_matrix, revise,
    ts_lambda_experiment, tsp_exact, tsp_exact_matrix, tsp_heuristic, ExperimentConfig, RelatedSet, Sampler, TourKind,
    MAX_EXACT_CAP,
};
use ts_groups::group::{Group, Limits};
use ts_groups::label::{
    enumerate_simple_paths, label_tree_3letters, label_tree_adversarial, squarefree_ternary, LabeledTree, PlaneTree,
    RandomAdversary,
};
use ts_groups::partition::{build_forest, verify_forest, ForestMode, TreeForest};
use ts_groups::testers::{
    burnside_nonamenability_pipeline, construct_xi_lemma4, gnp_certificate, gnp_counterexample, test_property,
    verify_lemma5, Budget, Family, Lemma4Params, Lemma5Params, PipelineConfig, PropertySpec,
};
use ts_groups::word::{max_power_order, Word};

use crate::input;
use crate::report::{Report, Timings};
use crate::{
    BurnsideCmd, Command, ExperimentCmd, FolnerArgs, ForestCmd, Global, GnpArgs, LabelMode, Lemma5Cmd, ModeArg,
    PropertyCmd, SamplerKind, SeqCmd, TreeCmd, TspArgs, XiCmd,
};

/// A command ran to completion but one of its checks failed.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: a check failed", self.0)
    }
}

impl std::error::Error for CheckFailed {}

/// Paths scanned for repetitions only below this many vertices.
const PATH_SCAN_LIMIT: usize = 400;

pub fn dispatch(cmd: Command, global: &Global, t: &mut Timings) -> Result<(Report, Option<PathBuf>)> {
    let limits = input::limits_from_budget(global.budget_mb);
    match cmd {
        Command::Seq(SeqCmd::Thue { n, out }) => Ok((seq_thue(n, t)?, out)),
        Command::Tree(TreeCmd::Label {
            mode,
            seed,
            tree,
            depth,
            tokens,
            out,
        }) => Ok((tree_label(mode, seed, tree, depth, tokens, t)?, out)),
        Command::Tsp(args) => {
            let out = args.out.clone();
            Ok((tsp(args, limits, t)?, out))
        }
        Command::Experiment(ExperimentCmd::TsLambda {
            group,
            xi,
            lambda,
            samples,
            seed,
            max_size,
            sampler,
            walk_len,
            chain_max,
            side_min,
            side_max,
            unrevised,
            no_lprime,
            out,
        }) => {
            let g = input::group(&group, limits)?;
            let xi = input::element_arg(&g, &xi)?;
            let config = ExperimentConfig {
                lambda: input::ratio(&lambda)?,
                samples,
                max_size,
                seed,
                sampler: match sampler {
                    SamplerKind::Chains => Sampler::Chains { walk_len, chain_max },
                    SamplerKind::Boxes => Sampler::Boxes { side_min, side_max },
                },
                revised: !unrevised,
                l_prime: !no_lprime,
                ..ExperimentConfig::default()
            };
            let rep = t.time("experiment", || ts_lambda_experiment(&g, &xi, &config))?;
            let summary = format!(
                "{} samples, min L/|S| = {}, {} violations of L >= lambda |S|, {} undecided",
                rep.per_sample.len(),
                rep.min_ratio.map_or("n/a".into(), |r| format!("{r:.4}")),
                rep.violations.len(),
                rep.undecided
            );
            let csv = rep.to_csv();
            let report = Report::new(
                "experiment ts-lambda",
                Some(seed),
                json!({ "group": group, "xi": g.format(&xi), "experiment": config }),
                &rep,
            )?
            .summary(summary)
            .csv(csv);
            Ok((report, out))
        }
        Command::Folner(args) => {
            let out = args.out.clone();
            Ok((folner(args, limits, t)?, out))
        }
        Command::Forest(ForestCmd::Build {
            mode,
            r,
            group,
            set,
            xi,
            seed,
            out,
        }) => Ok((forest_build(mode, r, &group, &set, &xi, seed, limits, t)?, out)),
        Command::Forest(ForestCmd::Verify { forest }) => Ok((forest_verify(&forest, limits, t)?, None)),
        Command::Property(PropertyCmd::Test {
            family,
            r,
            group,
            xi,
            xi_from_lemma4,
            desk_scale,
            budget,
            seed,
            out,
        }) => {
            let g = input::group(&group, limits)?;
            let (xi, xi_source) = match (xi, xi_from_lemma4) {
                (Some(x), _) => (input::element_arg(&g, &x)?, "given".to_string()),
                (None, true) => {
                    let params = if desk_scale {
                        Lemma4Params::DESK
                    } else {
                        Lemma4Params::FULL
                    };
                    let built = t.time("construct-xi", || construct_xi_lemma4(seed, &params))?;
                    (
                        g.parse_element(&built.xi.to_string())?,
                        format!("constructed, seed {seed}"),
                    )
                }
                (None, false) => {
                    return Err(ts_groups::Error::Config("give --xi or --xi-from-lemma4".into()).into());
                }
            };
            let mut b = Budget {
                seed,
                ..Budget::default()
            };
            if let Some(text) = &budget {
                apply_budget(&mut b, text)?;
            }
            let family: Family = family.parse()?;
            let spec = PropertySpec {
                family,
                r,
                group: g.clone(),
                xi: xi.clone(),
            };
            let verdict = t.time("search", || test_property(&spec, &b))?;
            let summary = match &verdict.counterexample {
                Some(w) => format!(
                    "{family}({r}) fails: product {} of length {} from {} factors",
                    w.product,
                    w.length,
                    w.xs.len()
                ),
                None => format!(
                    "{family}({r}): no counterexample within the budget ({} nodes)",
                    verdict.nodes
                ),
            };
            let config = json!({
                "family": family.to_string(), "r": r, "group": group,
                "xi": g.format(&xi), "xi_source": xi_source, "budget": b,
            });
            Ok((
                Report::new("property test", Some(seed), config, &verdict)?.summary(summary),
                out,
            ))
        }
        Command::Xi(XiCmd::Construct {
            seed,
            desk_scale,
            out,
            report,
        }) => {
            let params = if desk_scale {
                Lemma4Params::DESK
            } else {
                Lemma4Params::FULL
            };
            let built = t.time("construct-xi", || construct_xi_lemma4(seed, &params))?;
            fs::write(&out, format!("{}\n", built.xi)).with_context(|| format!("writing {}", out.display()))?;
            let ok = built.report.xi.all() && built.report.d_conditions.all();
            let summary = format!(
                "xi of length {} written to {}; conditions {}",
                built.xi.len(),
                out.display(),
                if ok { "hold" } else { "FAIL" }
            );
            let config = json!({ "seed": seed, "params": params, "out": out });
            let rep = Report::new("xi construct", Some(seed), config, &built.report)?
                .summary(summary)
                .ok(ok);
            Ok((rep, report))
        }
        Command::Lemma5(Lemma5Cmd::Verify {
            xi,
            xs,
            eps,
            desk_scale,
            waive_xi_check,
            out,
        }) => {
            let xi_word = input::word_arg(&xi)?;
            let x_words = input::read_words(&xs)?;
            let signs = input::signs(&eps)?;
            let mut params = if desk_scale {
                Lemma5Params::DESK
            } else {
                Lemma5Params::FULL
            };
            params.waive_xi_check = waive_xi_check;
            let rep = t.time("lemma5", || verify_lemma5(&xi_word, &x_words, &signs, &params))?;
            let summary = format!(
                "product of length {} has power order {} (bound {}): {}",
                rep.product_len,
                rep.max_power_order,
                rep.output_bound,
                if rep.passed { "pass" } else { "FAIL" }
            );
            let config = json!({
                "xi": xi_word.to_string(),
                "xs": x_words.iter().map(Word::to_string).collect::<Vec<_>>(),
                "eps": signs, "params": params,
            });
            let ok = rep.passed;
            Ok((
                Report::new("lemma5 verify", None, config, &rep)?
                    .summary(summary)
                    .ok(ok),
                out,
            ))
        }
        Command::Burnside(BurnsideCmd::Pipeline {
            samples,
            seed,
            k_max,
            desk_scale,
            corrupt_ends,
            out,
        }) => {
            let config = PipelineConfig {
                samples,
                seed,
                k_max,
                params: if desk_scale {
                    Lemma5Params::DESK
                } else {
                    Lemma5Params::FULL
                },
                corrupt_ends,
            };
            let rep = t.time("pipeline", || burnside_nonamenability_pipeline(&config))?;
            let mut summary = String::new();
            for s in &rep.stages {
                summary.push_str(&format!(
                    "{:<18} {}  {}\n",
                    s.name,
                    if s.passed { "pass" } else { "FAIL" },
                    s.detail
                ));
            }
            summary.push_str(&format!("assumed: {}\n", rep.external_assumption));
            let ok = rep.passed;
            Ok((
                Report::new("burnside pipeline", Some(seed), config, &rep)?
                    .summary(summary)
                    .ok(ok),
                out,
            ))
        }
        Command::Gnp(args) => {
            let out = args.out.clone();
            Ok((gnp(args, t)?, out))
        }
        Command::Replay { .. } => unreachable!("handled by the caller"),
    }
}

fn seq_thue(n: usize, t: &mut Timings) -> Result<Report> {
    let s: String = t.time("generate", || squarefree_ternary(n)).into_iter().collect();
    let (order, _) = max_power_order(s.as_bytes());
    Report::new(
        "seq thue",
        None,
        json!({ "n": n }),
        json!({ "word": s, "max_power_order": order }),
    )
    .map(|r| r.summary(s.clone()).ok(order < 2))
}

fn tree_label(
    mode: LabelMode,
    seed: u64,
    tree: Option<PathBuf>,
    depth: usize,
    tokens: usize,
    t: &mut Timings,
) -> Result<Report> {
    let plane = match &tree {
        Some(p) => PlaneTree::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => PlaneTree::complete_ternary(depth),
    };
    let labeled: LabeledTree<char> = t.time("label", || match mode {
        LabelMode::ThreeLetter => Ok(label_tree_3letters(&plane)),
        LabelMode::Adversarial => {
            let alphabet: Vec<char> = (0..tokens as u8).map(|i| (b'a' + i % 26) as char).collect();
            let candidates = vec![alphabet; plane.len()];
            label_tree_adversarial(&plane, &candidates, &mut RandomAdversary::new(seed))
        }
    })?;
    let worst = (plane.len() <= PATH_SCAN_LIMIT).then(|| {
        t.time("scan-paths", || {
            enumerate_simple_paths(&plane)
                .map(|p| max_power_order(&labeled.path_labels(&p)).0)
                .max()
                .unwrap_or(0)
        })
    });
    let tsv = labeled.to_tsv();
    let config = json!({
        "mode": format!("{mode:?}"), "seed": seed, "vertices": plane.len(),
        "tree": tree, "depth": if tree.is_none() { Some(depth) } else { None }, "tokens": tokens,
    });
    let result = json!({ "tree": plane.to_string(), "labels": tsv, "max_power_order_on_paths": worst });
    Ok(Report::new("tree label", Some(seed), config, result)?
        .summary(tsv.clone())
        .csv(tsv))
}

fn tsp(args: TspArgs, limits: Limits, t: &mut Timings) -> Result<Report> {
    let g = input::group(&args.group, limits)?;
    let elements = input::read_elements(&g, &args.set)?;
    let mut config = json!({
        "group": args.group, "set": args.set, "exact": args.exact, "xi": args.xi, "seed": args.seed,
    });
    let (tour, mst, lp, names) = if let Some(xi) = &args.xi {
        let xi = input::element_arg(&g, xi)?;
        config["xi"] = json!(g.format(&xi));
        let set = RelatedSet::new(g.clone(), xi, elements)?;
        let tour = t.time("tour", || {
            if args.exact {
                tsp_exact(&set, MAX_EXACT_CAP)
            } else {
                Ok(tsp_heuristic(&set, args.seed))
            }
        })?;
        let d = distance_matrix(&g, set.elements());
        let (w, _) = mst_matrix(&d);
        let lp = if args.exact {
            Some(t.time("l-prime", || l_prime(&set, MAX_EXACT_CAP))?)
        } else {
            None
        };
        let names: Vec<String> = set.elements().iter().map(|e| g.format(e)).collect();
        (tour, w, lp, names)
    } else {
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        let d = t.time("distances", || distance_matrix(&g, &elements));
        let tour = t.time("tour", || {
            if args.exact {
                tsp_exact_matrix(&d, MAX_EXACT_CAP)
            } else {
                Ok(heuristic_matrix(&d, args.seed))
            }
        })?;
        let (w, _) = mst_matrix(&d);
        (tour, w, None, elements.iter().map(|e| g.format(e)).collect())
    };
    let order: Vec<&String> = tour.order.iter().map(|&i| &names[i]).collect();
    let mut summary = format!(
        "L = {}{}",
        tour.length,
        if tour.kind == TourKind::Exact {
            ""
        } else {
            " (upper bound)"
        }
    );
    if let Some(lp) = lp {
        summary.push_str(&format!("\nL' = {lp}"));
    }
    let result = json!({
        "size": names.len(), "L": tour.length, "kind": tour.kind, "Lprime": lp,
        "mst_weight": mst, "elements": names, "tour": order,
    });
    Ok(Report::new("tsp", Some(args.seed), config, result)?.summary(summary))
}

fn folner(args: FolnerArgs, limits: Limits, t: &mut Timings) -> Result<Report> {
    let sides: Vec<u64> = input::list(&args.sides)?;
    let g = input::group(&format!("abelian:{}", sides.len().max(1)), limits)?;
    let xi = g.parse_element(&args.xi)?;
    let f = box_points(&sides);
    let rep = t.time("traverse", || folner_traversal_demo(&g, &f, &xi, args.path))?;
    let summary = format!(
        "|F| = {}, |F \\ dF| = {}, traversal {} <= 2|F|: {}, 2|F| <= 2.5|F \\ dF|: {}",
        rep.f_size, rep.interior_size, rep.traversal_length, rep.within_twice_f, rep.within_five_halves
    );
    let ok = rep.path_valid && rep.visits_interior;
    let config = json!({ "sides": sides, "xi": g.format(&xi) });
    Ok(Report::new("folner", None, config, &rep)?.summary(summary).ok(ok))
}

#[allow(clippy::too_many_arguments)]
fn forest_build(
    mode: ModeArg,
    r: u64,
    group: &str,
    set: &PathBuf,
    xi: &str,
    seed: u64,
    limits: Limits,
    t: &mut Timings,
) -> Result<Report> {
    let g = input::group(group, limits)?;
    let xi = input::element_arg(&g, xi)?;
    let elements = input::read_elements(&g, set)?;
    let related = RelatedSet::new(g.clone(), xi.clone(), elements)?;
    let revised = t.time("revise", || revise(&related))?;
    let revised = if revised.is_revised() {
        revised
    } else {
        revised.revised_subset()?
    };
    let dropped = related.len() - revised.len();
    let tour = t.time("tour", || {
        if revised.len() <= MAX_EXACT_CAP {
            tsp_exact(&revised, MAX_EXACT_CAP)
        } else {
            Ok(tsp_heuristic(&revised, seed))
        }
    })?;
    let mode = match mode {
        ModeArg::P => ForestMode::P,
        ModeArg::P10 => ForestMode::P10,
    };
    let forest = t.time("build", || build_forest(mode, &revised, r, &tour))?;
    let check = t.time("verify", || verify_forest(&forest, &revised));
    let summary = format!(
        "{} trees over {} elements ({} dropped outside the revision); bound {} <= L = {}{}; census {}; checks {}",
        forest.trees.len(),
        revised.len(),
        dropped,
        forest.certified_bound,
        forest.tour_length,
        if forest.tour_exact { "" } else { " (tour)" },
        if forest.census.holds(mode) { "holds" } else { "fails" },
        if check.passed() { "pass" } else { "FAIL" }
    );
    let config = json!({
        "mode": mode, "r": r, "group": group, "set": set, "xi": g.format(&xi), "seed": seed,
    });
    // a construction that logged conflicts is reported as such, not as a breach
    let ok = check.passed() || !forest.conflicts.is_empty();
    let summary = format!("{summary}; {} conflicts", forest.conflicts.len());
    let result = json!({ "forest": forest, "verification": check });
    Ok(Report::new("forest build", Some(seed), config, result)?
        .summary(summary)
        .ok(ok))
}

fn forest_verify(path: &PathBuf, limits: Limits, t: &mut Timings) -> Result<Report> {
    let loaded = crate::report::load(path)?;
    let forest: TreeForest = serde_json::from_value(forest_value(loaded.result))
        .map_err(|e| ts_groups::Error::MalformedInput(format!("{}: {e}", path.display())))?;
    let check = t.time("verify", || verify_saved_forest(&forest, limits))?;
    let mut summary = String::new();
    for c in &check.checks {
        summary.push_str(&format!(
            "{:<22} {}  {}\n",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.detail
        ));
    }
    let ok = check.passed();
    Ok(Report::new("forest verify", None, json!({ "forest": path }), &check)?
        .summary(summary)
        .ok(ok))
}

/// The forest inside a `forest build` result, or the value itself.
pub fn forest_value(mut v: serde_json::Value) -> serde_json::Value {
    match v.get_mut("forest") {
        Some(f) => f.take(),
        None => v,
    }
}

pub fn verify_saved_forest(forest: &TreeForest, limits: Limits) -> Result<ts_groups::partition::VerificationReport> {
    let mut g = Group::parse(&forest.group)?;
    g.set_limits(limits);
    let xi = g.parse_element(&forest.xi)?;
    let els = forest
        .elements
        .iter()
        .map(|e| g.parse_element(e))
        .collect::<ts_groups::Result<Vec<_>>>()?;
    let set = revise(&RelatedSet::new(g, xi, els)?)?;
    Ok(verify_forest(forest, &set))
}

fn apply_budget(b: &mut Budget, text: &str) -> Result<()> {
    for kv in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ts_groups::Error::Config(format!("budget entry {kv:?} is not key=value")))?;
        let num: u64 = v
            .trim()
            .parse()
            .map_err(|_| ts_groups::Error::Config(format!("budget value {v:?} is not a number")))?;
        match k.trim() {
            "k_max" => b.k_max = num as usize,
            "exhaustive_ball" => b.exhaustive_ball = num as usize,
            "exhaustive_k" => b.exhaustive_k = num as usize,
            "max_nodes" => b.max_nodes = num,
            "samples" => b.samples = num,
            other => return Err(ts_groups::Error::Config(format!("unknown budget key {other:?}")).into()),
        }
    }
    Ok(())
}

fn gnp(args: GnpArgs, t: &mut Timings) -> Result<Report> {
    let config = json!({
        "n": args.n, "p": args.p, "m": args.m, "us": args.us, "k": args.k, "max_nodes": args.max_nodes,
    });
    let (cert, nodes) = match &args.us {
        Some(text) => {
            let us: Vec<i32> = input::list(text)?;
            (
                Some(t.time("certificate", || gnp_certificate(args.n, args.p, args.m, &us))?),
                None,
            )
        }
        None => {
            let s = t.time("search", || {
                gnp_counterexample(args.n, args.p, args.m, args.k, args.max_nodes)
            })?;
            (s.certificate, Some(s.nodes))
        }
    };
    let summary = match &cert {
        Some(c) => format!(
            "lhs = {}\nrhs = {}\nidentity {}, balanced {}, {}-aperiodic {}, rewriting {}",
            c.lhs, c.rhs, c.identity_holds, c.balanced, c.m, c.aperiodic, c.rewriting_valid
        ),
        None => format!("no certificate found within {} nodes", args.max_nodes),
    };
    let ok = cert.as_ref().is_none_or(|c| c.holds());
    let result = json!({ "certificate": cert, "nodes": nodes });
    Ok(Report::new("gnp", None, config, result)?.summary(summary).ok(ok))
}

//! Re-verification of saved reports. Witnesses are checked directly where
//! the report carries them; other results are recomputed from the echoed
//! configuration and compared.

use std::path::Path;

use anyhow::Result;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use ts_groups::analysis::{distance_matrix, ts_lambda_experiment, ExperimentConfig, ExperimentReport};
use ts_groups::testers::{
    burnside_nonamenability_pipeline, construct_xi_lemma4, gnp_certificate, replay_rewriting, replay_witness,
    verify_lemma5, Family, GnpCertificate, Lemma4Params, Lemma4Report, Lemma5Params, Lemma5Report, PipelineConfig,
    PipelineReport, PropertySpec, PropertyWitness,
};
use ts_groups::word::{max_power_order, Word};
use ts_groups::Error;

use crate::commands::{forest_value, verify_saved_forest};
use crate::input;
use crate::report::{self, Report, Timings};
use crate::Global;

struct Checks(Vec<(String, bool, String)>);

impl Checks {
    fn add(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push((name.to_string(), passed, detail.into()));
    }
}

fn field<T: DeserializeOwned>(v: &Value, key: &str) -> Result<T> {
    let x = v.get(key).cloned().unwrap_or(Value::Null);
    serde_json::from_value(x).map_err(|e| Error::MalformedInput(format!("report field {key:?}: {e}")).into())
}

pub fn replay(path: &Path, global: &Global, t: &mut Timings) -> Result<Report> {
    let loaded = report::load(path)?;
    let limits = input::limits_from_budget(global.budget_mb);
    let (cfg, res) = (&loaded.config, &loaded.result);
    let mut checks = Checks(Vec::new());
    let command = loaded.command.clone().unwrap_or_else(|| "forest build".into());
    t.time("replay", || -> Result<()> {
        match command.as_str() {
            "seq thue" => {
                let w: String = field(res, "word")?;
                let (order, _) = max_power_order(w.as_bytes());
                checks.add("square-free", order < 2, format!("max power order {order}"));
            }
            "tsp" => {
                let g = input::group(&field::<String>(cfg, "group")?, limits)?;
                let tour: Vec<String> = field(res, "tour")?;
                let els = tour
                    .iter()
                    .map(|e| g.parse_element(e))
                    .collect::<ts_groups::Result<Vec<_>>>()?;
                let d = distance_matrix(&g, &els);
                let n = els.len();
                let len: u64 = (0..n).map(|i| d[i][(i + 1) % n]).sum();
                let claimed: u64 = field(res, "L")?;
                let size: usize = field(res, "size")?;
                checks.add(
                    "tour-length",
                    len == claimed,
                    format!("recomputed {len}, saved {claimed}"),
                );
                checks.add("tour-visits-all", n == size, format!("{n} stops for {size} elements"));
            }
            "experiment ts-lambda" => {
                let g = input::group(&field::<String>(cfg, "group")?, limits)?;
                let xi = g.parse_element(&field::<String>(cfg, "xi")?)?;
                let config: ExperimentConfig = field(cfg, "experiment")?;
                let fresh = ts_lambda_experiment(&g, &xi, &config)?;
                let saved: ExperimentReport = serde_json::from_value(res.clone())?;
                checks.add(
                    "per-sample",
                    saved.per_sample == fresh.per_sample,
                    "recomputed every sample",
                );
                checks.add("violations", saved.violations == fresh.violations, "");
            }
            "forest build" | "forest" => {
                let forest = serde_json::from_value(forest_value(res.clone()))
                    .map_err(|e| Error::MalformedInput(format!("forest: {e}")))?;
                let v = verify_saved_forest(&forest, limits)?;
                for c in v.checks {
                    checks.add(&c.name, c.passed, c.detail);
                }
            }
            "property test" => {
                let g = input::group(&field::<String>(cfg, "group")?, limits)?;
                let family: Family = field::<String>(cfg, "family")?.parse()?;
                let spec = PropertySpec {
                    family,
                    r: field(cfg, "r")?,
                    xi: g.parse_element(&field::<String>(cfg, "xi")?)?,
                    group: g,
                };
                match field::<Option<PropertyWitness>>(res, "counterexample")? {
                    Some(w) => {
                        let ok = replay_witness(&spec, &w)?;
                        checks.add("witness", ok, format!("{} factors, product {}", w.xs.len(), w.product));
                    }
                    None => checks.add("witness", true, "no witness recorded"),
                }
            }
            "gnp" => match field::<Option<GnpCertificate>>(res, "certificate")? {
                Some(c) => {
                    checks.add(
                        "rewriting",
                        replay_rewriting(&c.factors, &c.rewriting),
                        "replayed to the empty product",
                    );
                    let us =
                        c.us.iter()
                            .map(|u| {
                                let w: Word = u.parse()?;
                                match w.letters() {
                                    [l] => Ok(l.signed()),
                                    _ => Err(Error::MalformedInput(format!("u = {u} is not a single letter"))),
                                }
                            })
                            .collect::<ts_groups::Result<Vec<i32>>>()?;
                    let fresh = gnp_certificate(c.n, c.p, c.m, &us)?;
                    checks.add("certificate", fresh == c && fresh.holds(), "recomputed from u");
                }
                None => checks.add("certificate", true, "no certificate recorded"),
            },
            "xi construct" => {
                let seed: u64 = field(cfg, "seed")?;
                let params: Lemma4Params = field(cfg, "params")?;
                let fresh = construct_xi_lemma4(seed, &params)?;
                let saved: Lemma4Report = serde_json::from_value(res.clone())?;
                checks.add("construction", saved == fresh.report, "rebuilt from the seed");
                checks.add(
                    "conditions",
                    fresh.report.xi.all() && fresh.report.d_conditions.all(),
                    "",
                );
            }
            "lemma5 verify" => {
                let xi: Word = field::<String>(cfg, "xi")?.parse()?;
                let xs = field::<Vec<String>>(cfg, "xs")?
                    .iter()
                    .map(|x| x.parse())
                    .collect::<ts_groups::Result<Vec<Word>>>()?;
                let eps: Vec<i8> = field(cfg, "eps")?;
                let params: Lemma5Params = field(cfg, "params")?;
                let fresh = verify_lemma5(&xi, &xs, &eps, &params)?;
                let saved: Lemma5Report = serde_json::from_value(res.clone())?;
                checks.add(
                    "reduction",
                    saved == fresh,
                    format!("power order {}", fresh.max_power_order),
                );
                checks.add("bound", fresh.passed, "");
            }
            "burnside pipeline" => {
                let config: PipelineConfig = serde_json::from_value(cfg.clone())?;
                let fresh = burnside_nonamenability_pipeline(&config)?;
                let saved: PipelineReport = serde_json::from_value(res.clone())?;
                checks.add("pipeline", saved == fresh, "rerun from the config");
                checks.add("stages", fresh.passed, "");
            }
            "folner" | "tree label" => {
                return Err(Error::Config(format!("{command} reports carry no witnesses to replay")).into());
            }
            other => return Err(Error::MalformedInput(format!("unknown report command {other:?}")).into()),
        }
        Ok(())
    })?;
    let rows: Vec<Value> = checks
        .0
        .iter()
        .map(|(n, p, d)| json!({ "name": n, "passed": p, "detail": d }))
        .collect();
    let ok = checks.0.iter().all(|c| c.1);
    let mut summary = String::new();
    for (n, p, d) in &checks.0 {
        summary.push_str(&format!("{n:<22} {}  {d}\n", if *p { "pass" } else { "FAIL" }));
    }
    Ok(Report::new(
        "replay",
        None,
        json!({ "report": path, "command": command }),
        json!({ "checks": rows }),
    )?
    .summary(summary)
    .ok(ok))
}

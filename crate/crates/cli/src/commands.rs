//! Subcommand bodies. Each writes its outputs under the output directory and
//! finishes with a `<command>.meta.json` sidecar holding the timestamps.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use cantorhull::cantor::{audit_jsonl, AuditRecord};
use cantorhull::export::{
    svg_heatmap, write_cover_csv, write_product_csv, write_sheet_csv, write_witness_csv, GridSpec,
};
use cantorhull::harmonic::{default_c0_report, default_eps, wos_estimate, WosCertifier};
use cantorhull::hull::{eval_sheet, sample_cover};
use cantorhull::monodromy::{circle_path, continue_along_path, ContinuationRecord};
use cantorhull::product::{eval_f, eval_g};
use cantorhull::verify::{Verifier, VerifyConfig};
use cantorhull::witness::{eval_witness, ReferenceDisc, WitnessFunction};
use cantorhull::{construct as build, CantorState, ConstructionParams, Error, SlitDiskDomain};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::exit::{Failure, VERIFY};

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

struct Run {
    command: &'static str,
    dir: PathBuf,
    started: u128,
    outputs: Vec<String>,
    extra: serde_json::Value,
}

impl Run {
    fn start(command: &'static str, cfg: &RunConfig) -> Result<Run, Failure> {
        let dir = cfg.out_dir();
        fs::create_dir_all(&dir).map_err(|e| Failure::io(format!("cannot create {}", dir.display()), e))?;
        Ok(Run {
            command,
            dir,
            started: unix_ms(),
            outputs: Vec::new(),
            extra: json!({}),
        })
    }

    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Failure::io(format!("cannot write {}", path.display()), e))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_with<F>(&mut self, name: &str, body: F) -> Result<(), Failure>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        body(&mut buf).map_err(|e| Failure::io(name, e))?;
        self.write(name, buf)
    }

    fn finish(mut self, cfg: &RunConfig) -> Result<(), Failure> {
        let meta = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "started_unix_ms": self.started as u64,
            "finished_unix_ms": unix_ms() as u64,
            "outputs": self.outputs,
            "extra": self.extra,
        });
        let name = format!("{}.meta.json", self.command);
        let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
        self.write(&name, text)
    }
}

fn load_state(path: Option<&Path>) -> Result<CantorState, Failure> {
    let path = path.ok_or_else(|| Failure::config("no state file given; pass --state or set \"state\""))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read state {}: {e}", path.display())))?;
    CantorState::from_json(text.trim_end())
        .map_err(|e| Failure::config(format!("invalid state {}: {e}", path.display())))
}

fn stage_of(state: &CantorState, stage: Option<usize>) -> Result<usize, Failure> {
    let n = stage.unwrap_or(state.depth());
    state.check_stage(n)?;
    Ok(n)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn print_table(log: &[AuditRecord]) {
    println!("{:>4} {:>24} {:>12} {:>9} {:>12} {:>8}", "step", "a", "d", "halvings", "omega_lower", "accepted");
    for r in log {
        println!(
            "{:>4} {:>24} {:>12.4e} {:>9} {:>12.6} {:>8}",
            r.n, r.a, r.d, r.halvings, r.omega_lower, r.accepted
        );
    }
}

pub fn construct(cfg: &RunConfig) -> Result<(), Failure> {
    let seed = cfg.require_seed()?;
    let c = &cfg.construct;
    let mut run = Run::start("construct", cfg)?;
    let c0 = match c.c0 {
        Some(v) => v,
        None => {
            let report = default_c0_report(c.c0_walks, c.grid_resolution, seed)?;
            run.extra = json!({ "threshold": report });
            report.c0
        }
    };
    let mut params = ConstructionParams::linear(c.depth, c0, seed);
    if let Some(g) = &c.growth {
        params.growth = g.clone();
    }
    if let Some(s) = c.shrink_factor {
        params.shrink_factor = s;
    }
    if let Some(m) = c.max_halvings {
        params.max_halvings = m;
    }
    let mut certifier = WosCertifier {
        walks: c.certify_walks,
        ..WosCertifier::default()
    };
    match build(&params, &mut certifier) {
        Ok(out) => {
            print_table(&out.log);
            run.write("state.json", out.state.to_json() + "\n")?;
            run.write("audit.jsonl", out.audit_jsonl())?;
            run.write("params.json", to_json(&params))?;
            run.finish(cfg)
        }
        Err(e) => {
            if let Error::ConstructionStall { log, .. } | Error::PrecisionExhausted { log, .. } = &e {
                print_table(log);
                run.write("audit.jsonl", audit_jsonl(log))?;
            }
            run.finish(cfg)?;
            Err(e.into())
        }
    }
}

#[derive(Serialize)]
struct CheckReport<'a> {
    name: &'a str,
    passed: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct CriterionReport<'a> {
    id: u8,
    name: &'a str,
    passed: bool,
    checks: Vec<CheckReport<'a>>,
}

pub fn verify(cfg: &RunConfig) -> Result<(), Failure> {
    let seed = cfg.require_seed()?;
    let v = &cfg.verify;
    let state = load_state(v.state.as_deref())?;
    let mut run = Run::start("verify", cfg)?;
    let config = VerifyConfig {
        seed,
        walks: v.walks,
        tolerance_scale: v.tolerance_scale,
        grid_resolution: v.grid_resolution,
        criteria: v.criteria.clone(),
    };
    let results = Verifier::new(&state, config).run_selected();
    println!("{:>3}  {:<6} {:<32} {:>9}", "id", "result", "criterion", "seconds");
    for r in &results {
        println!(
            "{:>3}  {:<6} {:<32} {:>9.2}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.seconds
        );
    }
    for r in results.iter().filter(|r| !r.passed) {
        for c in r.failed_checks() {
            println!("criterion {} failed check '{}': {}", r.id, c.name, c.detail);
        }
    }
    // timings live in the sidecar so the report is reproducible
    let report: Vec<CriterionReport> = results
        .iter()
        .map(|r| CriterionReport {
            id: r.id,
            name: &r.name,
            passed: r.passed,
            checks: r
                .checks
                .iter()
                .filter(|c| c.name != "runtime")
                .map(|c| CheckReport {
                    name: &c.name,
                    passed: c.passed,
                    detail: &c.detail,
                })
                .collect(),
        })
        .collect();
    run.write("verify.json", to_json(&report))?;
    run.extra = json!({
        "seconds": results.iter().map(|r| json!({ "id": r.id, "seconds": r.seconds })).collect::<Vec<_>>(),
    });
    run.finish(cfg)?;
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(VERIFY, format!("criteria failed: {}", failed.join(", "))))
    }
}

fn heatmap<F: Fn(Complex64) -> f64>(grid: &GridSpec, f: F, title: &str) -> String {
    let values: Vec<f64> = grid.points().map(f).collect();
    svg_heatmap(grid, &values, title)
}

pub fn export(cfg: &RunConfig) -> Result<(), Failure> {
    let e = &cfg.export;
    let state = load_state(e.state.as_deref())?;
    let n = stage_of(&state, e.stage)?;
    let mut run = Run::start("export", cfg)?;

    run.write_with("product.csv", |b| write_product_csv(&state, n, &e.grid, b).map(|_| ()))?;
    run.write_with("sheet.csv", |b| write_sheet_csv(&state, n, &e.grid, b).map(|_| ()))?;
    let (samples, skipped) = sample_cover(&state, n, &e.cover_grid, e.cover_margin)?;
    run.write_with("cover.csv", |b| write_cover_csv(&samples, b))?;
    let wf = WitnessFunction::build(&state, ReferenceDisc::default(), n, e.witness_samples)?;
    run.write_with("witness.csv", |b| write_witness_csv(&wf, &e.witness_z_grid, &e.witness_w_grid, b))?;

    let nan = f64::NAN;
    let g_svg = heatmap(&e.grid, |z| eval_g(&state, n, z).map_or(nan, |g| g.norm().ln()), &format!("log|g_{n}|"));
    run.write("g_log_modulus.svg", g_svg)?;
    let f_svg = heatmap(&e.grid, |z| eval_f(&state, n, z).map_or(nan, |f| f.value.re), &format!("Re f_{n}"));
    run.write("f_real.svg", f_svg)?;
    let s_svg = heatmap(&e.grid, |z| eval_sheet(&state, n, z).map_or(nan, |s| s.re), &format!("Re sheet function, stage {n}"));
    run.write("sheet_real.svg", s_svg)?;
    let zc = e.witness_z_grid.point(e.witness_z_grid.nx / 2, e.witness_z_grid.ny / 2);
    let w_svg = heatmap(&e.witness_w_grid, |w| eval_witness(&wf, zc, w), &format!("witness over w at z = {zc}"));
    run.write("witness.svg", w_svg)?;

    run.extra = json!({ "stage": n, "cover_samples": samples.len(), "cover_skipped": skipped });
    run.finish(cfg)
}

pub fn hm(cfg: &RunConfig) -> Result<(), Failure> {
    let seed = cfg.require_seed()?;
    let h = &cfg.hm;
    let (domain, stage) = match &h.state {
        Some(p) => {
            let state = load_state(Some(p))?;
            let n = stage_of(&state, h.stage)?;
            (state.slit_domain(n)?, n)
        }
        None => (SlitDiskDomain::unit_disk(), 0),
    };
    let mut run = Run::start("hm", cfg)?;
    let z = Complex64::new(h.point[0], h.point[1]);
    let estimate = wos_estimate(&domain, z, h.walks, default_eps(&domain), seed)?;
    let text = to_json(&json!({ "stage": stage, "point": h.point, "estimate": estimate }));
    print!("{text}");
    run.write("hm.json", text)?;
    run.finish(cfg)
}

pub fn monodromy(cfg: &RunConfig) -> Result<(), Failure> {
    let m = &cfg.monodromy;
    let state = load_state(m.state.as_deref())?;
    let n = stage_of(&state, m.stage)?;
    let path: Vec<Complex64> = match &m.path {
        Some(p) if p.len() >= 2 => p.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        Some(_) => return Err(Failure::config("a path needs at least two vertices")),
        None => {
            if !(m.radius > 0.0) || m.vertices < 3 {
                return Err(Failure::config("circle needs a positive radius and at least three vertices"));
            }
            circle_path(Complex64::new(m.center[0], m.center[1]), m.radius, m.vertices)
        }
    };
    let mut run = Run::start("monodromy", cfg)?;
    let start = eval_f(&state, n, path[0])?;
    let out = continue_along_path(&state, n, &path, start)?;
    let record = ContinuationRecord::new(path, out);
    let text = to_json(&json!({ "stage": n, "start": start.value, "record": record }));
    print!("{text}");
    run.write("monodromy.json", text)?;
    run.finish(cfg)
}

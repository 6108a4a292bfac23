//! Acceptance run: each criterion at its stated size and time limit, one
//! PASS/FAIL line per criterion. Criteria run sequentially in one test so
//! the wall-clock limits are not distorted by parallel test threads.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use ncdc_cli::config::{Resolved, RunConfig};
use ncdc_cli::report::{strip_volatile, Status};
use ncdc_cli::{execute, CliError, Command, Options};
use ncdc_core::checks;
use ncdc_core::symplectic::Mechanics;
use ncdc_core::{Calculus, Check, Connection};

const SEED: u64 = 42;

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn load(name: &str) -> RunConfig {
    RunConfig::load(&config_path(name)).expect("config loads")
}

fn opts() -> Options {
    Options { config: PathBuf::new(), out: PathBuf::new(), dim: None, seed: Some(SEED), latex: false }
}

fn run_cmd(cmd: Command, cfg: &str) -> Result<Vec<Check>, String> {
    let out = execute(cmd, load(cfg), &opts()).map_err(|e| e.to_string())?;
    // Reports carry records, so rebuild the verdicts from them.
    Ok(out
        .report
        .checks
        .iter()
        .map(|r| Check {
            id: r.id.clone(),
            anchor: r.anchor.clone(),
            passed: r.status == Status::Pass,
            residual: r.residual.clone(),
            note: r.note.clone(),
            elapsed: Duration::ZERO,
        })
        .collect())
}

/// Written to the process stdout directly so the lines survive the test
/// harness's output capture.
fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

struct Verdict {
    checks: usize,
    failures: Vec<String>,
}

impl Verdict {
    fn of(cs: &[Check]) -> Verdict {
        Verdict {
            checks: cs.len(),
            failures: cs.iter().filter(|c| !c.passed).map(|c| format!("{} [{}]", c.id, c.residual)).collect(),
        }
    }

    fn require(mut self, cs: &[Check], ids: &[&str]) -> Verdict {
        for id in ids {
            if !cs.iter().any(|c| c.id == *id) {
                self.failures.push(format!("{id} missing"));
            }
        }
        self
    }
}

fn criterion(n: usize, name: &str, limit_s: u64, body: impl FnOnce() -> Result<Verdict, String>) -> bool {
    let start = Instant::now();
    let verdict = body();
    let t = start.elapsed().as_secs_f64();
    let (ok, detail) = match verdict {
        Ok(v) if v.failures.is_empty() && t <= limit_s as f64 => (true, format!("{} checks", v.checks)),
        Ok(v) if v.failures.is_empty() => (false, format!("{} checks, over time limit", v.checks)),
        Ok(v) => (false, format!("failed: {}", v.failures.join("; "))),
        Err(e) => (false, format!("error: {e}")),
    };
    say(&format!("criterion {n} {name}: {} ({detail}; {t:.1}s of {limit_s}s)", if ok { "PASS" } else { "FAIL" }));
    ok
}

fn structural_checks() -> Result<Vec<Check>, CliError> {
    let cfg = load("default.json");
    let table = cfg.table()?;
    let res = Resolved::new(&cfg, &table)?;
    let calc = Calculus::general(table.chart().clone());
    let ito = res.ito(table.chart())?;
    let conn = Connection::derive(&calc, res.gamma()?).map_err(|e| CliError::Config(e.to_string()))?;
    let mech = Mechanics::new(&conn, &ito).map_err(|e| CliError::Config(e.to_string()))?;
    let mut out = checks::connection_identities(&conn, &ito, "n2");
    out.extend(checks::structure(&mech, "n2"));
    Ok(out)
}

fn stripped(cmd: Command, cfg: &str) -> Result<String, String> {
    let out = execute(cmd, load(cfg), &opts()).map_err(|e| e.to_string())?;
    let mut v: serde_json::Value = serde_json::from_str(&out.report.to_json()).map_err(|e| e.to_string())?;
    strip_volatile(&mut v);
    Ok(v.to_string())
}

#[test]
fn acceptance() {
    let mut all = Vec::new();

    all.push(criterion(1, "core calculus, N in {1,2,3}, 50 instances", 30, || {
        let mut cs = Vec::new();
        for n in 1..=3 {
            cs.extend(checks::core_calculus(n, 50, SEED).map_err(|e| e.to_string())?);
        }
        Ok(Verdict::of(&cs))
    }));

    all.push(criterion(2, "vector fields, third-order rejection, 100 pairings", 10, || {
        let mut cs = Vec::new();
        for n in 1..=3 {
            cs.extend(checks::vector_fields(n, 100, SEED).map_err(|e| e.to_string())?);
        }
        let ids: Vec<String> = (1..=3)
            .flat_map(|n| [format!("vector.third_order_rejected.n{n}"), format!("vector.pairing_matches_action.n{n}")])
            .collect();
        Ok(Verdict::of(&cs).require(&cs, &ids.iter().map(String::as_str).collect::<Vec<_>>()))
    }));

    all.push(criterion(3, "connection, N=2, 10 random connections", 120, || {
        let cs = checks::connection_random(2, 10, SEED).map_err(|e| e.to_string())?;
        Ok(Verdict::of(&cs).require(&cs, &["connection.minimal_choice.n2", "connection.riemann_antisymmetry.n2"]))
    }));

    all.push(criterion(4, "structural identities of the specialized calculus", 120, || {
        let cs = structural_checks().map_err(|e| e.to_string())?;
        Ok(Verdict::of(&cs).require(
            &cs,
            &["connection.torsion_curvature.n2", "structure.torsion_components.n2", "structure.wedge_spatial.n2"],
        ))
    }));

    all.push(criterion(5, "Fokker-Planck match, symbolic N=2 and Darboux N=4", 300, || {
        let mut cs = run_cmd(Command::FpCheck, "default.json")?;
        cs.extend(run_cmd(Command::FpCheck, "darboux_n4.json")?);
        let names = [
            "mechanics.closedness",
            "mechanics.closedness_needs_condition",
            "mechanics.hamiltonian_kernel",
            "mechanics.evolution_equation",
            "fokker_planck.generator_match",
            "fokker_planck.single_mutations_fail",
            "fokker_planck.gibbs_density",
        ];
        let ids: Vec<String> = names.iter().map(|n| format!("{n}.config")).collect();
        let per_run = Verdict::of(&cs).require(&cs, &ids.iter().map(String::as_str).collect::<Vec<_>>());
        let both = cs.iter().filter(|c| c.id == "fokker_planck.generator_match.config").count();
        let mut v = per_run;
        if both != 2 {
            v.failures.push(format!("generator match ran {both} times, expected 2"));
        }
        Ok(v)
    }));

    all.push(criterion(6, "universal calculus, |S|=4, sign table", 10, || {
        let cs = run_cmd(Command::Universal, "default.json")?;
        let mut v = Verdict::of(&cs).require(&cs, &["universal.d_squared.s4", "universal.k_fold_sign.s4"]);
        match cs.iter().find(|c| c.id == "universal.k_fold_sign.s4") {
            Some(c) if c.residual == "s(2)=-1, s(3)=+1, s(4)=-1" && c.note.is_some() => {}
            Some(c) => v.failures.push(format!("sign table {:?}, note {:?}", c.residual, c.note)),
            None => {}
        }
        Ok(v)
    }));

    all.push(criterion(7, "stochastic calculus, 2^16 steps, 256 paths", 60, || {
        let cfg = load("default.json");
        assert_eq!((cfg.suites.ito.steps, cfg.suites.ito.paths), (1 << 16, 256));
        let cs = run_cmd(Command::Ito, "default.json")?;
        Ok(Verdict::of(&cs)
            .require(&cs, &["sde.quadratic_variation", "sde.cubic_variation", "sde.product_rule", "sde.ito_formula"]))
    }));

    all.push(criterion(8, "determinism of reports", 300, || {
        let runs = [
            (Command::VerifyCore, "quick.json"),
            (Command::VerifyConnection, "quick.json"),
            (Command::Derive, "default.json"),
            (Command::Derive, "flat_n2.json"),
            (Command::Ito, "quick.json"),
            (Command::Universal, "quick.json"),
        ];
        let mut v = Verdict { checks: 0, failures: Vec::new() };
        for (cmd, cfg) in runs {
            v.checks += 1;
            if stripped(cmd, cfg)? != stripped(cmd, cfg)? {
                v.failures.push(format!("{} on {cfg} differs between runs", cmd.name()));
            }
        }
        Ok(v)
    }));

    let passed = all.iter().filter(|&&ok| ok).count();
    say(&format!("acceptance: {passed}/{} criteria passed", all.len()));
    assert_eq!(passed, all.len());
}

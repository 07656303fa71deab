use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use affdual::affine::require_affine;
use affdual::algebra::builtin;
use affdual::bounds::bound_final;
use affdual::sweep::{extension_plan, sweep_plan, theta_sweep, SweepInstance};
use affdual::Limits;
use num_bigint::BigUint;
use serde_json::{json, Value};
use tempfile::TempDir;

struct Criterion {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn cli(dir: &Path, args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_affdual"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn pow2(e: u32) -> BigUint {
    BigUint::from(1u8) << e
}

fn sec6(dir: &Path) -> (bool, String) {
    let (code, stdout) = cli(dir, &["example-sec6"]);
    let Ok(r) = serde_json::from_slice::<Value>(&stdout) else {
        return (false, format!("exit {code:?}, no report"));
    };
    let res = &r["result"];
    let crude = (pow2(81) * 702u32 + 46u32).to_string();
    let check = |name: &str| {
        res["checks"]
            .as_array()
            .and_then(|c| c.iter().find(|c| c["name"] == name))
            .map(|c| c["actual"].as_str().unwrap_or_default().to_string())
            .unwrap_or_default()
    };
    let refined_n = res["refined"]["extension_n"].as_u64().unwrap_or(u64::MAX);
    let refined_ell = res["refined"]["ell"].as_u64().unwrap_or(u64::MAX);
    let flagged = res["refined"]["strict_improvement"] == ((refined_n, refined_ell) != (14, 136));
    let pass = code == Some(0)
        && check("crude") == crude
        && check("N") == "14"
        && check("N_prime") == "2^45"
        && check("ell") == "136"
        && refined_n <= 14
        && refined_ell <= 136
        && flagged;
    (
        pass,
        format!(
            "crude={} N={} N'={} ell={} refined N={refined_n} ell={refined_ell} flagged={}",
            check("crude"),
            check("N"),
            check("N_prime"),
            check("ell"),
            res["refined"]["strict_improvement"]
        ),
    )
}

fn formula() -> (bool, String) {
    let f = match bound_final(8) {
        Ok(f) => f,
        Err(e) => return (false, e.to_string()),
    };
    let n = BigUint::from(1u8) + pow2(81) * 26u32;
    let expected = BigUint::from(1u8) + &n * 27u32 + 18u32;
    let golden = pow2(81) * 702u32 + 46u32;
    (
        f.n == n && f.bound == expected && expected == golden,
        format!("bound={}", f.bound),
    )
}

/// Every sweep, serialized in a fixed order; the second call is compared byte for byte.
struct SweepRun {
    theta: (bool, String, Duration),
    factorization: (bool, String, Duration),
    extension: (bool, String, Duration),
    enough_ops: (bool, String, Duration),
    bytes: Vec<u8>,
}

fn sweeps() -> SweepRun {
    let limits = Limits::default();
    let mut log = Vec::new();

    let t = Instant::now();
    let (mut ok, mut subs) = (true, 0);
    for alg in builtin::default_suite() {
        match theta_sweep(&alg, &limits) {
            Ok(rs) => {
                for r in &rs {
                    ok &= r.pass();
                    subs += r.subalgebras;
                }
                log.push(json!(rs));
            }
            Err(e) => {
                ok = false;
                log.push(json!(e.to_string()));
            }
        }
    }
    let theta = (ok, format!("{subs} subalgebras"), t.elapsed());

    let plan: Vec<_> = sweep_plan()
        .into_iter()
        .map(|(a, ns)| {
            (
                SweepInstance::new(a, 0, limits).expect("sweep algebra is affine"),
                ns,
            )
        })
        .collect();

    let t = Instant::now();
    let (mut ok, mut homs, mut certified) = (true, 0, 0);
    for (inst, ns) in &plan {
        for &n in ns {
            match inst.factorization_sweep(n) {
                Ok(f) => {
                    ok &= f.failures.is_empty() && f.certified == f.partial_homs;
                    homs += f.partial_homs;
                    certified += f.certified;
                    log.push(json!(f));
                }
                Err(e) => {
                    ok = false;
                    log.push(json!(e.to_string()));
                }
            }
        }
    }
    let factorization = (ok, format!("{certified}/{homs} certified"), t.elapsed());

    let t = Instant::now();
    let (mut ok, mut homs, mut nonext) = (true, 0, 0);
    let mut record = |r: affdual::Result<affdual::sweep::ExtensionSweep>| match r {
        Ok(e) => {
            ok &= e.failures.is_empty();
            homs += e.partial_homs;
            nonext += e.nonextensible;
            log.push(json!(e));
        }
        Err(e) => {
            ok = false;
            log.push(json!(e.to_string()));
        }
    };
    for (inst, ns) in &plan {
        for &n in ns {
            record(inst.extension_sweep(n));
        }
    }
    for (a, target, ns) in extension_plan() {
        let inst = SweepInstance::new(a, 0, limits).expect("sweep algebra is affine");
        let tw = require_affine(&target, &limits).expect("target is affine");
        for n in ns {
            record(inst.extension_sweep_into(&target, &tw, n));
        }
    }
    let extension = (ok, format!("{nonext} nonextensible of {homs}"), t.elapsed());

    let t = Instant::now();
    let (mut ok, mut pairs, mut max_ops) = (true, 0, 0);
    for (inst, _) in plan
        .iter()
        .filter(|(i, _)| matches!(i.alg.name(), "Z2" | "Z4"))
    {
        for n in 1..=2 {
            match inst.enough_ops_sweep(n) {
                Ok(o) => {
                    ok &= o.failures.is_empty()
                        && o.witnesses == o.pairs
                        && o.max_operations <= o.refined_ell;
                    pairs += o.pairs;
                    max_ops = max_ops.max(o.max_operations);
                    log.push(json!(o));
                }
                Err(e) => {
                    ok = false;
                    log.push(json!(e.to_string()));
                }
            }
        }
    }
    let enough_ops = (ok, format!("{pairs} pairs, max |X| {max_ops}"), t.elapsed());

    SweepRun {
        theta,
        factorization,
        extension,
        enough_ops,
        bytes: serde_json::to_vec(&log).expect("plain JSON"),
    }
}

fn battery(dir: &Path) -> (bool, String) {
    let (code, _) = cli(dir, &["verify-appendix", "--out", "battery.json"]);
    let Ok(r) = fs::read(dir.join("battery.json"))
        .map_err(|e| e.to_string())
        .and_then(|b| serde_json::from_slice::<Value>(&b).map_err(|e| e.to_string()))
    else {
        return (false, format!("exit {code:?}, no report"));
    };
    let failed = r["result"]["failed"].as_u64().unwrap_or(u64::MAX);
    let total = r["result"]["total"].as_u64().unwrap_or(0);
    let algebras = r["result"]["algebras"].as_array().map_or(0, Vec::len);
    let counterexamples = fs::read_dir(dir)
        .map(|d| {
            d.filter(|e| {
                e.as_ref().is_ok_and(|e| {
                    e.file_name()
                        .to_string_lossy()
                        .starts_with("counterexample")
                })
            })
            .count()
        })
        .unwrap_or(0);
    let pass = code == Some(0) && failed == 0 && total > 0 && algebras == 8 && counterexamples == 0;
    (pass, format!("{total} checks on {algebras} algebras, {failed} failed, {counterexamples} counterexample files"))
}

fn cli_reports(dir: &Path) -> Vec<Vec<u8>> {
    [
        vec!["example-sec6"],
        vec!["--builtin", "z4", "bounds", "--refined"],
        vec!["--builtin", "z2xz2", "subalgebras", "--power", "2"],
        vec!["--builtin", "sec6", "ring"],
        vec!["verify-appendix", "--out", "determinism.json"],
    ]
    .iter()
    .map(|args| {
        let (_, mut out) = cli(dir, args);
        if args.contains(&"--out") {
            out = fs::read(dir.join("determinism.json")).unwrap_or_default();
        }
        out
    })
    .collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

fn main() -> ExitCode {
    let dir = TempDir::new().expect("temp dir");
    let mut results = Vec::new();
    let mut push = |id, name, (pass, detail): (bool, String), elapsed, budget| {
        results.push(Criterion {
            id,
            name,
            pass,
            detail,
            elapsed,
            budget,
        })
    };
    let secs = Duration::from_secs;

    let (r, t) = timed(|| sec6(dir.path()));
    push(1, "golden eight-element example", r, t, secs(10));
    let (r, t) = timed(formula);
    push(2, "closed-form bound for |A| = 8", r, t, secs(1));

    let first = sweeps();
    push(
        3,
        "theta formula vs brute-force Cg",
        (first.theta.0, first.theta.1.clone()),
        first.theta.2,
        secs(120),
    );
    let f = &first.factorization;
    push(4, "factorization sweep", (f.0, f.1.clone()), f.2, secs(600));
    let e = &first.extension;
    push(
        5,
        "extension bound sweep",
        (e.0, e.1.clone()),
        e.2,
        secs(600),
    );

    let battery_dir = TempDir::new().expect("temp dir");
    let (r, t) = timed(|| battery(battery_dir.path()));
    push(6, "counting oracle battery", r, t, secs(300));

    let o = &first.enough_ops;
    push(
        7,
        "enough total operations witness",
        (o.0, o.1.clone()),
        o.2,
        secs(600),
    );

    let (r, t) = timed(|| {
        let a = cli_reports(dir.path());
        let b = cli_reports(dir.path());
        let second = sweeps();
        let same_cli = a == b && a.iter().all(|r| !r.is_empty());
        let same_sweeps = first.bytes == second.bytes;
        (
            same_cli && same_sweeps,
            format!(
                "{} reports identical: {same_cli}, {} sweep bytes identical: {same_sweeps}",
                a.len(),
                first.bytes.len()
            ),
        )
    });
    push(8, "determinism", r, t, Duration::MAX);

    let mut all = true;
    for c in &results {
        let pass = c.pass && c.elapsed <= c.budget;
        all &= pass;
        let budget = if c.budget == Duration::MAX {
            String::new()
        } else {
            format!(" (budget {:?})", c.budget)
        };
        println!(
            "{} criterion {}: {} [{:.2?}{budget}] {}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.elapsed,
            c.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

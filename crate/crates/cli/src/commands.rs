use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigUint;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use mchairs_core::analysis::{
    cyclic_lcs, drift_analysis, expected_collisions, monte_carlo_collisions, parse_rational,
    prop21_max_players, random_experiment, ExperimentConfig, XChoice,
};
use mchairs_core::construct::{
    build_algebraic_perms, build_recursive, build_renaming, extend_system,
    sample_random_permutations, sample_random_words, ConstructError, Exponents, ExtensionT,
};
use mchairs_core::sim::{self, AdversaryParams, RunOutcome, ScheduleTrace, Strategy};
use mchairs_core::util::{self, Execution, RNG_NAME};
use mchairs_core::verify::{
    equivalence_probe, search_impossibility, verify_mc, verify_renaming, SearchParams, Verdict,
    VerifyError, VerifyOptions, VerifyReport,
};
use mchairs_core::word::{serialize_with_header, SystemKind, WordSystem};

use crate::io::{self, describe, parse_bigs, sha256_hex, Inputs};
use crate::{
    Analyze, Cli, Command, Construct, SideArg, StrategyArg, EXIT_CAP, EXIT_NEGATIVE, EXIT_USAGE,
};

/// Result of one command before printing.
struct Outcome {
    json: Value,
    summary: String,
    code: u8,
}

impl Outcome {
    fn ok(json: Value, summary: impl Into<String>) -> Self {
        Outcome {
            json,
            summary: summary.into(),
            code: 0,
        }
    }

    fn negative_if(mut self, negative: bool) -> Self {
        if negative {
            self.code = EXIT_NEGATIVE;
        }
        self
    }
}

fn is_cap(e: &anyhow::Error) -> bool {
    let verify_cap = |v: &VerifyError| {
        matches!(
            v,
            VerifyError::CapExceeded { .. } | VerifyError::BudgetExceeded { .. }
        )
    };
    if let Some(v) = e.downcast_ref::<VerifyError>() {
        return verify_cap(v);
    }
    match e.downcast_ref::<ConstructError>() {
        Some(ConstructError::CapExceeded(_) | ConstructError::DepthCap { .. }) => true,
        Some(ConstructError::Verify(v)) => verify_cap(v),
        _ => false,
    }
}

struct Ctx {
    exec: Execution,
    timing: bool,
    inputs: Inputs,
}

pub fn run(cli: Cli) -> u8 {
    #[cfg(feature = "parallel")]
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: --threads: {e}");
            return EXIT_USAGE;
        }
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some_and(|t| t > 1) {
        eprintln!("note: built without the parallel feature; --threads is ignored");
    }
    let mut ctx = Ctx {
        exec: Execution::default(),
        timing: cli.timing,
        inputs: Inputs::default(),
    };
    let result = dispatch(&cli.command, &mut ctx);
    let (stdout, code) = match result {
        Ok(o) => {
            let text = serde_json::to_string_pretty(&o.json).expect("JSON output") + "\n";
            print!("{text}");
            eprintln!("{}", o.summary);
            (text, o.code)
        }
        Err(e) => {
            let code = if is_cap(&e) { EXIT_CAP } else { EXIT_USAGE };
            let kind = if code == EXIT_CAP {
                "cap_exceeded"
            } else {
                "error"
            };
            let doc = json!({"status": kind, "error": format!("{e:#}")});
            let text = serde_json::to_string_pretty(&doc).expect("JSON output") + "\n";
            print!("{text}");
            eprintln!("error: {e:#}");
            (text, code)
        }
    };
    if let Some(path) = &cli.manifest {
        let manifest = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "argv": std::env::args().collect::<Vec<_>>(),
            "rng": RNG_NAME,
            "inputs": ctx.inputs.files,
            "stdout_sha256": sha256_hex(stdout.as_bytes()),
            "exit_code": code,
        });
        let text = serde_json::to_string_pretty(&manifest).expect("manifest JSON") + "\n";
        if let Err(e) = io::write_file(path, &text) {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    }
    code
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Construct(c) => construct_cmd(c, ctx),
        Command::Extend(a) => extend_cmd(a, ctx),
        Command::Verify(a) => verify_cmd(a, ctx),
        Command::VerifyRenaming(a) => verify_renaming_cmd(a, ctx),
        Command::Simulate(a) => simulate_cmd(a, ctx),
        Command::Replay(a) => replay_cmd(a, ctx),
        Command::ProbeEquivalence(a) => probe_cmd(a, ctx),
        Command::SearchImpossible(a) => search_cmd(a, ctx),
        Command::Analyze(a) => analyze_cmd(a, ctx),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

/// JSON for a freshly built system; also writes the word file when asked.
fn emit_system(
    command: &str,
    params: Value,
    system: &WordSystem,
    header: &[String],
    out: &Option<std::path::PathBuf>,
    extra: Value,
) -> Result<Outcome> {
    let text = serialize_with_header(system, header)?;
    if let Some(path) = out {
        io::write_file(path, &text)?;
    }
    let mut doc = json!({
        "command": command,
        "params": params,
        "system": describe(system),
        "word_file": text,
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    let summary = format!(
        "{command}: {} words on {} chairs ({})",
        system.len(),
        system.m(),
        system.name()
    );
    Ok(Outcome::ok(doc, summary))
}

fn construct_cmd(c: &Construct, ctx: &mut Ctx) -> Result<Outcome> {
    match c {
        Construct::Recursive(a) => {
            let pair = build_recursive(a.n)?;
            let system = match a.side {
                SideArg::S => pair.s_system.clone(),
                SideArg::W => pair.w_system.clone(),
                SideArg::Both => {
                    let mut words = pair.s_system.words().to_vec();
                    words.extend_from_slice(pair.w_system.words());
                    let mut labels = pair.s_system.labels().to_vec();
                    labels.extend_from_slice(pair.w_system.labels());
                    WordSystem::with_labels(pair.w_system.m(), SystemKind::Mc, labels, words)?
                        .named(format!("recursive n={}", a.n))
                }
            };
            let side = format!("{:?}", a.side).to_lowercase();
            let header = vec![
                format!("generator: recursive"),
                format!("params: n={} side={side}", a.n),
            ];
            emit_system(
                "construct recursive",
                json!({"n": a.n, "side": side}),
                &system,
                &header,
                &a.out.out,
                json!({}),
            )
        }
        Construct::Renaming(a) => {
            let exps = match &a.exponents {
                Some(list) => Exponents::List(parse_bigs(list)?),
                None => Exponents::Auto,
            };
            let r = build_renaming(a.n, exps, &VerifyOptions::with_cap(a.cap), ctx.exec)?;
            let exps: Vec<String> = r.exponents.iter().map(|e| e.to_string()).collect();
            let header = vec![
                "generator: renaming".to_string(),
                format!("params: N={} exponents={}", a.n, exps.join(",")),
            ];
            emit_system(
                "construct renaming",
                json!({"N": a.n, "cap": a.cap}),
                &r.system,
                &header,
                &a.out.out,
                json!({"exponents": exps}),
            )
        }
        Construct::RandomWords(a) => {
            let len = match a.len {
                Some(l) => l,
                None if a.big_n >= 1 => {
                    ((a.c * a.n as f64 * (a.big_n as f64).ln()).ceil() as usize).max(1)
                }
                None => bail!("N must be positive"),
            };
            let r = sample_random_words(a.big_n, a.n, a.m, len, a.seed)?;
            emit_system(
                "construct random-words",
                json!({"n": a.n, "N": a.big_n, "m": a.m, "len": len, "c": a.c, "seed": a.seed, "rng": RNG_NAME}),
                &r.system,
                &r.header(),
                &a.out.out,
                json!({"all_full": r.all_full()}),
            )
        }
        Construct::RandomPerms(a) => {
            let r = sample_random_permutations(a.big_n, a.m, a.seed)?;
            emit_system(
                "construct random-perms",
                json!({"N": a.big_n, "m": a.m, "seed": a.seed, "rng": RNG_NAME}),
                &r.system,
                &r.header(),
                &a.out.out,
                json!({}),
            )
        }
        Construct::Algebraic(a) => {
            let fam = build_algebraic_perms(a.p, a.d)?;
            let header = vec![
                "generator: algebraic".to_string(),
                format!("params: p={} d={}", a.p, a.d),
                "chair(x, y) = x*p + y + 1; blocks j = 0..p-1, ascending x".to_string(),
            ];
            emit_system(
                "construct algebraic",
                json!({"p": a.p, "d": a.d}),
                &fam.system(),
                &header,
                &a.out.out,
                json!({"coefficients": fam.coefficients}),
            )
        }
    }
}

fn extend_cmd(a: &crate::ExtendArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let system = ctx.inputs.system(&a.file)?;
    let players = a
        .players
        .unwrap_or(((system.m() as usize + 1) / 2).min(system.len()));
    let t = match &a.t {
        Some(t) => ExtensionT::Explicit(
            t.parse()
                .map_err(|_| anyhow!("--t must be a positive integer"))?,
        ),
        None => ExtensionT::Auto,
    };
    let ext = extend_system(
        &system,
        players,
        t,
        &VerifyOptions::with_cap(a.cap),
        ctx.exec,
    )?;
    let header = vec![
        format!("extension of {}", system.digest()),
        format!("params: players={players} t={}", ext.t),
    ];
    emit_system(
        "extend",
        json!({"input": a.file, "players": players, "t": a.t, "cap": a.cap}),
        &ext.system,
        &header,
        &a.out.out,
        json!({"t": ext.t.to_string(), "longest": ext.longest.map(|l| l.to_string())}),
    )
}

fn report_value(mut r: VerifyReport, timing: bool) -> Value {
    if !timing {
        r.timing_ms = None;
    }
    to_value(&r)
}

fn default_players(system: &WordSystem, players: &Option<Vec<usize>>) -> Vec<usize> {
    players
        .clone()
        .unwrap_or_else(|| (0..system.len()).collect())
}

fn verify_cmd(a: &crate::VerifyArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let system = ctx.inputs.system(&a.file)?;
    let opts = VerifyOptions {
        state_cap: a.cap,
        relation: a.relation.into(),
    };
    let subsets = match a.each {
        Some(k) => {
            if k == 0 || k > system.len() {
                bail!("--each must be in 1..={}", system.len());
            }
            combinations(system.len(), k)
        }
        None => vec![default_players(&system, &a.players)],
    };
    let reports = ctx
        .exec
        .map(subsets.len(), |i| verify_mc(&system, &subsets[i], &opts))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let capped = reports
        .iter()
        .filter(|r| r.verdict == Verdict::CapExceeded)
        .count();
    let failing = reports.iter().filter(|r| !r.is_oblivious()).count();
    let verdict = if capped > 0 {
        Verdict::CapExceeded
    } else if failing > 0 {
        reports.iter().find(|r| !r.is_oblivious()).unwrap().verdict
    } else {
        Verdict::Oblivious
    };
    let code = match verdict {
        Verdict::Oblivious => 0,
        Verdict::CapExceeded => EXIT_CAP,
        _ => EXIT_NEGATIVE,
    };
    let summary = format!(
        "verify {}: {verdict:?} ({} subset(s), {failing} not oblivious, {capped} over the cap)",
        a.file,
        reports.len()
    );
    let system_json = json!({"name": system.name(), "m": system.m(), "digest": system.digest()});
    let json = if a.each.is_some() {
        let longest = reports
            .iter()
            .filter_map(|r| r.longest_schedule.clone())
            .max()
            .map(|l| l.to_string());
        json!({
            "command": "verify",
            "params": {"each": a.each, "cap": a.cap, "relation": opts.relation},
            "system": system_json,
            "verdict": verdict,
            "max_longest_schedule": longest,
            "reports": reports.into_iter().map(|r| report_value(r, ctx.timing)).collect::<Vec<_>>(),
        })
    } else {
        let mut v = report_value(reports.into_iter().next().unwrap(), ctx.timing);
        v["command"] = json!("verify");
        v["system"] = system_json;
        v
    };
    Ok(Outcome {
        json,
        summary,
        code,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn verify_renaming_cmd(a: &crate::VerifyRenamingArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let system = ctx.inputs.system(&a.file)?;
    if a.k == 0 || a.k > system.len() {
        bail!("--k must be in 1..={}", system.len());
    }
    let opts = VerifyOptions::with_cap(a.cap);
    let subsets = combinations(system.len(), a.k);
    let reports = ctx
        .exec
        .map(subsets.len(), |i| {
            verify_renaming(&system, &subsets[i], &opts)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let bound = 2 * a.k - 1;
    let mut finals_distinct = true;
    let mut outputs = Vec::new();
    for r in &reports {
        // final chairs of the longest schedule
        if let Some(p) = &r.longest_path {
            let last = p.chairs.last().cloned().unwrap_or_default();
            let mut sorted = last.clone();
            sorted.sort_unstable();
            sorted.dedup();
            finals_distinct &= sorted.len() == last.len();
            outputs.push(json!({"players": r.players, "final_chairs": last}));
        }
    }
    let capped = reports.iter().any(|r| r.verdict == Verdict::CapExceeded);
    let all_ok = reports.iter().all(|r| r.is_oblivious()) && finals_distinct;
    let code = if capped {
        EXIT_CAP
    } else if all_ok {
        0
    } else {
        EXIT_NEGATIVE
    };
    let json = json!({
        "command": "verify-renaming",
        "params": {"k": a.k, "cap": a.cap},
        "system": {"name": system.name(), "m": system.m(), "digest": system.digest()},
        "chair_bound": bound,
        "all_ok": all_ok,
        "longest_schedule_outputs": outputs,
        "reports": reports.into_iter().map(|r| report_value(r, ctx.timing)).collect::<Vec<_>>(),
    });
    let summary = format!(
        "verify-renaming k={}: {} ({} subset(s), chairs bounded by {bound})",
        a.k,
        if all_ok { "ok" } else { "FAILED" },
        subsets.len()
    );
    Ok(Outcome {
        json,
        summary,
        code,
    })
}

fn simulate_cmd(a: &crate::SimulateArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let system = ctx.inputs.system(&a.file)?;
    let players = default_players(&system, &a.players);
    let init: Vec<BigUint> = match (&a.init, system.kind()) {
        (Some(list), _) => parse_bigs(list)?,
        (None, SystemKind::Renaming) => vec![BigUint::default(); players.len()],
        (None, SystemKind::Mc) => {
            // stream 1 of the seed; the schedule itself uses stream 0
            let mut rng = util::rng_stream(a.seed, 1);
            players
                .iter()
                .map(|&w| {
                    if w >= system.len() {
                        bail!("word {w} does not exist");
                    }
                    Ok(random_below(&mut rng, system.word(w).len()))
                })
                .collect::<Result<_>>()?
        }
    };
    let strategy = match a.strategy {
        StrategyArg::Random => Strategy::Random,
        StrategyArg::GreedyCanonical => Strategy::GreedyCanonical,
    };
    let params = AdversaryParams {
        kind: a.relation.into(),
        strategy,
        step_cap: a.cap,
        seed: a.seed,
    };
    let trace = sim::run_adversary(&system, &players, &init, &params)?;
    if let Some(path) = &a.trace_out {
        io::write_file(path, &(serde_json::to_string_pretty(&trace)? + "\n"))?;
    }
    let summary = format!(
        "simulate: {:?} after {} moves",
        trace.outcome,
        trace.steps()
    );
    let safe = trace.outcome == RunOutcome::Safe;
    let json = json!({
        "command": "simulate",
        "params": {"strategy": format!("{:?}", a.strategy), "seed": a.seed, "cap": a.cap, "relation": params.kind},
        "outcome": trace.outcome,
        "steps": trace.steps(),
        "trace": trace,
    });
    Ok(Outcome::ok(json, summary).negative_if(!safe))
}

/// Uniform integer in `0..bound` for big bounds, by rejection on the top bits.
fn random_below(rng: &mut impl Rng, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    loop {
        let mut buf = vec![0u8; bytes];
        rng.fill(buf.as_mut_slice());
        let extra = bytes as u64 * 8 - bits;
        if let Some(top) = buf.last_mut() {
            *top &= 0xff >> extra;
        }
        let x = BigUint::from_bytes_le(&buf);
        if &x < bound {
            return x;
        }
    }
}

fn replay_cmd(a: &crate::ReplayArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let system = ctx.inputs.system(&a.file)?;
    let text = ctx.inputs.read(&a.trace.to_string_lossy())?;
    let trace: ScheduleTrace = serde_json::from_str(&text).context("parsing trace")?;
    let r = sim::replay(&system, &trace);
    let summary = match r.failure_step {
        None => format!("replay: valid ({} moves)", trace.steps()),
        Some(s) => format!("replay: invalid at step {s}"),
    };
    let valid = r.valid;
    Ok(Outcome::ok(json!({"command": "replay", "report": r}), summary).negative_if(!valid))
}

fn probe_cmd(a: &crate::ProbeArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let system = ctx.inputs.system(&a.file)?;
    let players = default_players(&system, &a.players);
    let r = equivalence_probe(&system, &players, a.cap)?;
    let summary = format!(
        "probe-equivalence: cycle under immediate={} pairwise={} canonical={}",
        r.immediate, r.pairwise, r.canonical
    );
    let agree = r.agree();
    let json = json!({
        "command": "probe-equivalence",
        "params": {"players": players, "cap": a.cap},
        "cycle": r,
        "agree": agree,
    });
    Ok(Outcome::ok(json, summary).negative_if(!agree))
}

fn search_cmd(a: &crate::SearchArgs, ctx: &mut Ctx) -> Result<Outcome> {
    let params = SearchParams {
        n: a.n,
        m: a.m,
        max_len: a.max_len,
        budget: a.budget,
        state_cap: a.cap,
    };
    let r = search_impossibility(&params, ctx.exec)?;
    let certificate = r
        .certificate_system()
        .map(|s| serialize_with_header(&s, &[]))
        .transpose()?;
    let summary = format!(
        "search-impossible n={} m={} max_len={}: {} ({} full words, {} tuples examined, {} verified)",
        a.n,
        a.m,
        a.max_len,
        if r.found { "oblivious system found" } else { "none found" },
        r.full_words,
        r.tuples_examined,
        r.tuples_verified
    );
    let json = json!({
        "command": "search-impossible",
        "params": {"n": a.n, "m": a.m, "max_len": a.max_len, "budget": a.budget, "cap": a.cap},
        "report": r,
        "certificate_file": certificate,
    });
    Ok(Outcome::ok(json, summary))
}

fn analyze_cmd(a: &Analyze, ctx: &mut Ctx) -> Result<Outcome> {
    match a {
        Analyze::Lcs(a) => {
            let system = ctx.inputs.system(&a.file)?;
            let perms = system
                .words()
                .iter()
                .map(|w| w.materialize(io::LETTER_PREVIEW as usize))
                .collect::<Result<Vec<_>, _>>()?;
            let n = perms.len();
            let mut matrix = vec![vec![0usize; n]; n];
            for i in 0..n {
                for j in i..n {
                    let v = cyclic_lcs(&perms[i], &perms[j])?;
                    matrix[i][j] = v;
                    matrix[j][i] = v;
                }
            }
            let p21 = prop21_max_players(&perms, system.m())?;
            let summary = format!(
                "lcs: max pairwise cyclic LCS {} on m={}, up to {} players",
                p21.r,
                system.m(),
                p21.max_players
            );
            let json = json!({
                "command": "analyze lcs",
                "m": system.m(),
                "permutations": n,
                "matrix": matrix,
                "r": p21.r,
                "max_players": p21.max_players,
            });
            Ok(Outcome::ok(json, summary))
        }
        Analyze::Drift(a) => {
            let q = parse_rational(&a.q)?;
            let choice = match (&a.x, a.optimize) {
                (Some(x), false) => XChoice::Given(parse_rational(x)?),
                (None, true) => XChoice::Optimize,
                _ => bail!("give exactly one of --x and --optimize"),
            };
            let r = drift_analysis(&q, choice)?;
            let summary = format!(
                "drift q={} x={}: r = {} ~ {:.6}; critical ratio {:.6}",
                r.q, r.x_used, r.r, r.r_approx, r.critical_ratio
            );
            Ok(Outcome::ok(
                json!({"command": "analyze drift", "report": r}),
                summary,
            ))
        }
        Analyze::Collisions(a) => {
            let exact = expected_collisions(a.n, a.m)?;
            let est = monte_carlo_collisions(a.n, a.m, a.samples, a.seed, ctx.exec)?;
            let summary = format!(
                "collisions n={} m={}: expected {exact}, sampled {:.5} ({:.2} sigma)",
                a.n, a.m, est.mean, est.z
            );
            Ok(Outcome::ok(
                json!({"command": "analyze collisions", "report": est}),
                summary,
            ))
        }
        Analyze::Experiment(a) => {
            let text = ctx.inputs.read(&a.config.to_string_lossy())?;
            let cfg: ExperimentConfig =
                serde_json::from_str(&text).context("parsing experiment config")?;
            let stats = random_experiment(&cfg, ctx.exec)?;
            if let Some(path) = &a.csv {
                let mut w = csv::Writer::from_path(path)
                    .with_context(|| format!("writing {}", path.display()))?;
                for row in stats.csv_rows() {
                    w.serialize(row)?;
                }
                w.flush()?;
            }
            let mut summary = String::new();
            let _ = write!(
                summary,
                "experiment: {} runs over {} systems, {} ok, {} failed; {} systems fully ok",
                stats.runs, stats.trials, stats.successes, stats.failures, stats.systems_all_ok
            );
            Ok(Outcome::ok(
                json!({"command": "analyze experiment", "stats": stats}),
                summary,
            ))
        }
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde_json::Value;

use mchairs_core::analysis::{
    cyclic_lcs, drift_analysis, monte_carlo_collisions, parse_rational, prop21_max_players,
    random_experiment, ExperimentConfig, Generator, Method, SubsetChoice, XChoice,
};
use mchairs_core::construct::{
    build_algebraic_perms, build_recursive, build_renaming, extend_system, sample_random_words,
    Exponents, ExtensionT, Side,
};
use mchairs_core::sim::{run_adversary, AdversaryParams, RunOutcome, SchedulerKind, Strategy};
use mchairs_core::util::{self, Execution};
use mchairs_core::verify::{
    check_prop17, check_terminal, equivalence_probe, prop17_system, search_impossibility,
    verify_mc, verify_renaming, SearchParams, Verdict, VerifyOptions, VerifyReport,
    DEFAULT_PROBE_CAP,
};
use mchairs_core::word::{ChairSet, Mode, SystemKind, WordExpr, WordSystem};

type Check = Result<String, String>;

/// A verified instance kept for the coherence checks of criterion 10.
struct Instance {
    name: String,
    system: WordSystem,
    subset: Vec<usize>,
    mode: Mode,
    report: VerifyReport,
}

#[derive(Default)]
struct Ledger {
    instances: Vec<Instance>,
    /// Oblivious instances too large to verify twice inside their own criterion.
    pending: Vec<(String, WordSystem, Vec<usize>)>,
}

impl Ledger {
    fn keep(
        &mut self,
        name: impl Into<String>,
        system: &WordSystem,
        subset: &[usize],
        mode: Mode,
        report: VerifyReport,
    ) {
        self.instances.push(Instance {
            name: name.into(),
            system: system.clone(),
            subset: subset.to_vec(),
            mode,
            report,
        });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lit(words: &[&[u32]], m: u32) -> WordSystem {
    let w = words
        .iter()
        .map(|s| WordExpr::literal(s).unwrap())
        .collect();
    WordSystem::new(m, SystemKind::Mc, w).unwrap()
}

fn opts(cap: u64) -> VerifyOptions {
    VerifyOptions::with_cap(cap)
}

fn c1_base_cases(_: &mut Ledger) -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_mchairs"))
        .args(["construct", "recursive", "--n", "1"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("exit status {}", out.status)
    })?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let words: Vec<String> = v["system"]["words"]
        .as_array()
        .ok_or("no words")?
        .iter()
        .map(|w| {
            w["letters"]
                .as_array()
                .map(|l| l.iter().map(|c| c.to_string()).collect::<String>())
                .unwrap_or_default()
        })
        .collect();
    ensure(words == ["11", "1122"], || format!("emitted {words:?}"))?;
    let file = v["word_file"].as_str().unwrap_or_default();
    ensure(
        file.contains("lit(1 1);") && file.contains("lit(1 1 2 2);"),
        || file.to_string(),
    )?;

    let e = WordExpr::interleave(1, WordExpr::literal(&[2, 3, 4, 3]).unwrap())
        .map_err(|e| e.to_string())?;
    let s: String = e
        .materialize(100)
        .unwrap()
        .iter()
        .map(|c| c.to_string())
        .collect();
    ensure(s == "12131413", || format!("interleave gave {s}"))?;
    Ok(format!("words {words:?}, 1 (x) 2343 = {s}"))
}

fn c2_upper_bound(ledger: &mut Ledger) -> Check {
    let pair = build_recursive(2).unwrap();
    let r = verify_mc(&pair.s_system, &[0, 1], &opts(10_000_000)).map_err(|e| e.to_string())?;
    ensure(r.is_oblivious(), || format!("verdict {:?}", r.verdict))?;
    ensure(r.states_explored == 48 * 49, || {
        format!("{} states explored", r.states_explored)
    })?;
    let terminal =
        check_terminal(&pair.s_system, &[0, 1], &opts(10_000_000)).map_err(|e| e.to_string())?;
    ensure(terminal, || "check_terminal false".into())?;
    let longest = r.longest_schedule.clone().unwrap();
    ledger.keep("recursive(2).s", &pair.s_system, &[0, 1], Mode::Cyclic, r);

    // every side, p and A of size 2p-1, for n = 1 and 2
    let mut checked = 0;
    let mut largest = 0u64;
    for n in 1..=2 {
        let pair = build_recursive(n).unwrap();
        for side in [Side::S, Side::W] {
            let m = pair.side(side).m();
            for p in 1..=n {
                for a in subsets_of(m, 2 * p - 1) {
                    let a = ChairSet::new(a);
                    let ok = check_prop17(&pair, side, p, &a, &opts(30_000_000))
                        .map_err(|e| e.to_string())?;
                    ensure(ok, || {
                        format!("n={n} side={side:?} p={p} A={:?} fails", a.as_slice())
                    })?;
                    let sys = prop17_system(&pair, side, p, &a).unwrap();
                    let states: u64 = sys
                        .words()
                        .iter()
                        .map(|w| w.len().to_u64().unwrap())
                        .product();
                    largest = largest.max(states);
                    let all: Vec<usize> = (0..p).collect();
                    let name = format!("prop17 n={n} {side:?} p={p} A={:?}", a.as_slice());
                    if states <= 1_000_000 {
                        let rep = verify_mc(&sys, &all, &opts(1_000_000)).unwrap();
                        ledger.keep(name, &sys, &all, Mode::Cyclic, rep);
                    } else {
                        ledger.pending.push((name, sys, all));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "longest schedule {longest}, {checked} restricted collections terminal (largest {largest} states)"
    ))
}

fn subsets_of(m: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let m = m as usize;
    if k > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.iter().map(|&c| c as u32 + 1).collect());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + m - k) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn c3_lower_bound(_: &mut Ledger) -> Check {
    let p = SearchParams {
        n: 2,
        m: 2,
        max_len: 6,
        budget: u64::MAX,
        state_cap: 1_000_000,
    };
    let r = search_impossibility(&p, Execution::default()).map_err(|e| e.to_string())?;
    ensure(!r.found, || format!("found {:?}", r.certificate))?;
    Ok(format!(
        "{} full words, {} pairs, {} canonical pairs verified, none oblivious",
        r.full_words, r.tuples_total, r.tuples_verified
    ))
}

fn c4_equivalences(ledger: &mut Ledger) -> Check {
    let mut rng = util::rng(2024);
    let (mut agree, mut cyclic) = (0, 0);
    for i in 0..200 {
        let n = rng.gen_range(2..=3usize);
        let m = rng.gen_range(2..=4u32);
        let words: Vec<Vec<u32>> = (0..n)
            .map(|_| {
                (0..rng.gen_range(1..=5))
                    .map(|_| rng.gen_range(1..=m))
                    .collect()
            })
            .collect();
        let refs: Vec<&[u32]> = words.iter().map(|w| w.as_slice()).collect();
        let sys = lit(&refs, m);
        let all: Vec<usize> = (0..n).collect();
        let p = equivalence_probe(&sys, &all, DEFAULT_PROBE_CAP).map_err(|e| e.to_string())?;
        if p.agree() {
            agree += 1;
        } else {
            return Err(format!("instance {i} {words:?}: {p:?}"));
        }
        let rep = verify_mc(&sys, &all, &opts(DEFAULT_PROBE_CAP)).unwrap();
        ensure(rep.is_oblivious() != p.pairwise, || {
            format!("instance {i}: probe and verifier disagree")
        })?;
        if p.pairwise {
            cyclic += 1;
        }
        ledger.keep(
            format!("probe #{i} {words:?}"),
            &sys,
            &all,
            Mode::Cyclic,
            rep,
        );
    }
    Ok(format!(
        "{agree}/200 agree ({cyclic} with cycles, {} acyclic)",
        200 - cyclic
    ))
}

fn c5_drift(_: &mut Ledger) -> Check {
    let q = parse_rational("1/7").unwrap();
    let x = parse_rational("23/2").unwrap();
    let r = drift_analysis(&q, XChoice::Given(x)).map_err(|e| e.to_string())?;
    let exact: BigRational = parse_rational(&r.r).unwrap();
    ensure(exact < parse_rational("99/100").unwrap(), || {
        format!("r = {}", r.r)
    })?;
    ensure((r.r_approx - 0.9783).abs() <= 1e-4, || {
        format!("r ~ {}", r.r_approx)
    })?;
    ensure((r.critical_ratio - 6.8284).abs() <= 1e-3, || {
        format!("critical ratio {}", r.critical_ratio)
    })?;
    Ok(format!(
        "r = {} ~ {:.5}, critical ratio {:.6}",
        r.r, r.r_approx, r.critical_ratio
    ))
}

fn c6_random_words(ledger: &mut Ledger) -> Check {
    let cfg = ExperimentConfig {
        generator: Generator::Words,
        big_n: 5,
        n: 3,
        m: 21,
        len: None,
        c: 6.0,
        systems: 100,
        scheduler: SchedulerKind::Pairwise,
        step_cap: 100_000,
        seed: 20_240_601,
        subsets: SubsetChoice::All,
        method: Method::Exhaustive,
        state_cap: 10_000_000,
    };
    let l = cfg.word_len();
    ensure(l == (6.0 * 3.0 * 5f64.ln()).ceil() as usize, || {
        format!("L = {l}")
    })?;
    let stats = random_experiment(&cfg, Execution::default()).map_err(|e| e.to_string())?;
    ensure(
        stats.records.iter().all(|r| r.method == Method::Exhaustive),
        || "some triple fell back to simulation".into(),
    )?;
    ensure(stats.systems_all_ok >= 95, || {
        format!(
            "only {} of 100 systems fully oblivious",
            stats.systems_all_ok
        )
    })?;
    let bound = (l * 3) as u64;
    let max = stats.max_length.unwrap_or(0);
    ensure(max < bound, || {
        format!("longest schedule {max} >= L n = {bound}")
    })?;

    // keep the oblivious triples for the coherence checks
    let mut kept = 0;
    for rec in stats.records.iter().filter(|r| r.ok) {
        let sys = sample_random_words(5, 3, 21, l, rec.system_seed)
            .unwrap()
            .system;
        let rep = verify_mc(&sys, &rec.subset, &opts(1_000_000)).unwrap();
        ledger.keep(
            format!("random words seed {} {:?}", rec.system_seed, rec.subset),
            &sys,
            &rec.subset,
            Mode::Cyclic,
            rep,
        );
        kept += 1;
    }
    Ok(format!(
        "L = {l}; {}/100 systems with all 10 triples oblivious; max longest schedule {max} < {bound}; {kept} oblivious triples",
        stats.systems_all_ok
    ))
}

fn c7_algebraic(_: &mut Ledger) -> Check {
    let fam = build_algebraic_perms(5, 1).map_err(|e| e.to_string())?;
    ensure(fam.permutations.len() == 20, || {
        format!("{} permutations", fam.permutations.len())
    })?;
    for p in &fam.permutations {
        let mut s = p.clone();
        s.sort_unstable();
        ensure(s == (1..=25).collect::<Vec<u32>>(), || {
            format!("{p:?} is not a permutation of 1..25")
        })?;
    }
    let mut max_lcs = 0;
    for i in 0..20 {
        for j in i + 1..20 {
            max_lcs = max_lcs.max(cyclic_lcs(&fam.permutations[i], &fam.permutations[j]).unwrap());
        }
    }
    ensure(max_lcs <= 20, || format!("cyclic LCS {max_lcs} > 20"))?;
    let mut max_meet = 0;
    for f in 0..20 {
        for g in f + 1..20 {
            for j in 0..5 {
                for k in 0..5 {
                    let meet = fam
                        .block(f, j)
                        .iter()
                        .filter(|c| fam.block(g, k).contains(c))
                        .count();
                    max_meet = max_meet.max(meet);
                }
            }
        }
    }
    ensure(max_meet <= 2, || {
        format!("blocks meet in {max_meet} chairs")
    })?;
    let p21 = prop21_max_players(&fam.permutations, 25).unwrap();
    ensure(p21.r as usize == max_lcs, || {
        "prop21 r disagrees with the LCS scan".into()
    })?;
    ensure(p21.r <= 12, || format!("measured r = {} exceeds 12", p21.r))?;
    ensure(p21.max_players == 3, || {
        format!("max players {}", p21.max_players)
    })?;
    Ok(format!(
        "20 permutations of 25; max cyclic LCS {max_lcs}; max block intersection {max_meet}; {} players",
        p21.max_players
    ))
}

fn c8_renaming(ledger: &mut Ledger) -> Check {
    let r = build_renaming(2, Exponents::Auto, &opts(10_000_000), Execution::default())
        .map_err(|e| e.to_string())?;
    let sys = &r.system;
    let mut notes = Vec::new();
    for k in 1..=2usize {
        for subset in subsets_of(2, k) {
            let subset: Vec<usize> = subset.iter().map(|&c| c as usize - 1).collect();
            let rep =
                verify_renaming(sys, &subset, &opts(10_000_000)).map_err(|e| e.to_string())?;
            ensure(rep.is_oblivious(), || {
                format!("k={k} {subset:?}: {:?}", rep.verdict)
            })?;
            let path = rep.longest_path.clone().ok_or("no longest path")?;
            let bound = 2 * k as u32 - 1;
            ensure(path.chairs.iter().flatten().all(|&c| c <= bound), || {
                "longest path leaves the bound".into()
            })?;
            let last = path.chairs.last().unwrap().clone();
            let mut d = last.clone();
            d.sort_unstable();
            d.dedup();
            ensure(d.len() == last.len(), || {
                format!("final chairs {last:?} collide")
            })?;
            if k == 1 {
                ensure(last == [1], || format!("k=1 ends on {last:?}"))?;
            }
            notes.push(format!(
                "k={k} {subset:?}: {} states, final {last:?}",
                rep.states_explored
            ));
            ledger.keep(
                format!("renaming N=2 {subset:?}"),
                sys,
                &subset,
                Mode::Linear,
                rep,
            );
        }
    }
    let lens: Vec<String> = sys.words().iter().map(|w| w.len().to_string()).collect();
    Ok(format!("word lengths {lens:?}; {}", notes.join("; ")))
}

fn c9_extension(ledger: &mut Ledger) -> Check {
    let s = build_recursive(2).unwrap().s_system;
    let ext = extend_system(
        &s,
        2,
        ExtensionT::Auto,
        &opts(10_000_000),
        Execution::default(),
    )
    .map_err(|e| e.to_string())?;
    let sys = ext.system;
    ensure(sys.len() == 3, || format!("{} words", sys.len()))?;
    ensure(sys.full_words().iter().all(|&f| f), || {
        "a word is not full".into()
    })?;
    for pair in [[0, 1], [0, 2], [1, 2]] {
        let rep = verify_mc(&sys, &pair, &opts(10_000_000)).map_err(|e| e.to_string())?;
        ensure(rep.is_oblivious(), || {
            format!("pair {pair:?}: {:?}", rep.verdict)
        })?;
        ledger.keep(
            format!("extension pair {pair:?}"),
            &sys,
            &pair,
            Mode::Cyclic,
            rep,
        );
    }
    Ok(format!(
        "t = {}, new word length {}",
        ext.t,
        sys.word(2).len()
    ))
}

fn c10_coherence(ledger: &mut Ledger) -> Check {
    // negative controls whose cycles must replay
    for words in [[[1u32, 2], [1, 2]], [[1, 2], [2, 1]]] {
        let sys = lit(&[&words[0], &words[1]], 2);
        let rep = verify_mc(&sys, &[0, 1], &opts(100)).unwrap();
        ensure(rep.verdict == Verdict::CycleFound, || {
            format!("{words:?} not cyclic")
        })?;
        ledger.keep(
            format!("control {words:?}"),
            &sys,
            &[0, 1],
            Mode::Cyclic,
            rep,
        );
    }
    for (name, sys, subset) in std::mem::take(&mut ledger.pending) {
        let rep = verify_mc(&sys, &subset, &opts(30_000_000)).map_err(|e| e.to_string())?;
        ledger.keep(name, &sys, &subset, Mode::Cyclic, rep);
    }
    let instances = &ledger.instances;
    let results = Execution::default().map(instances.len(), |i| coherent(&instances[i]));
    let (mut runs, mut cycles, mut paths) = (0u64, 0, 0);
    for (inst, r) in instances.iter().zip(results) {
        let (a, c, p) = r.map_err(|e| format!("{}: {e}", inst.name))?;
        runs += a;
        cycles += c;
        paths += p;
    }
    Ok(format!(
        "{} instances: {runs} adversary runs within bound, {cycles} cycle witnesses and {paths} longest paths replayed",
        instances.len()
    ))
}

/// (adversary runs, cycles replayed, longest paths replayed)
fn coherent(inst: &Instance) -> Result<(u64, u64, u64), String> {
    let kind = inst.report.relation;
    match inst.report.verdict {
        Verdict::Oblivious => {}
        Verdict::CycleFound => {
            let w = inst
                .report
                .witness
                .as_ref()
                .ok_or("cycle without witness")?;
            ensure(
                w.is_cycle(&inst.system, &inst.subset, inst.mode, kind),
                || "witness does not replay".into(),
            )?;
            return Ok((0, 1, 0));
        }
        v => return Err(format!("unexpected verdict {v:?}")),
    }
    let longest = inst
        .report
        .longest_schedule
        .clone()
        .unwrap()
        .to_u64()
        .unwrap();
    let path = inst.report.longest_path.as_ref().ok_or("no longest path")?;
    ensure(
        path.ends_safe(&inst.system, &inst.subset, inst.mode, kind),
        || "longest path does not replay".into(),
    )?;
    ensure(path.len() as u64 == longest, || {
        format!("path of {} moves, longest {longest}", path.len())
    })?;
    let lens: Vec<u64> = inst
        .subset
        .iter()
        .map(|&w| inst.system.word(w).len().to_u64().unwrap())
        .collect();
    let mut rng = util::rng(0x5eed);
    for run in 0..1000u64 {
        let init: Vec<BigUint> = match inst.mode {
            Mode::Linear => vec![BigUint::default(); lens.len()],
            Mode::Cyclic => lens
                .iter()
                .map(|&l| BigUint::from(rng.gen_range(0..l)))
                .collect(),
        };
        let params = AdversaryParams {
            kind: SchedulerKind::Pairwise,
            strategy: Strategy::Random,
            step_cap: longest,
            seed: run,
        };
        let t =
            run_adversary(&inst.system, &inst.subset, &init, &params).map_err(|e| e.to_string())?;
        ensure(t.outcome == RunOutcome::Safe, || {
            format!("run {run}: {:?} after {} moves", t.outcome, t.steps())
        })?;
    }
    Ok((1000, 0, 1))
}

fn c11_collisions(_: &mut Ledger) -> Check {
    let e = monte_carlo_collisions(4, 7, 100_000, 11, Execution::default())
        .map_err(|e| e.to_string())?;
    ensure(e.expected == "6/7", || format!("expected {}", e.expected))?;
    ensure(e.z <= 3.0, || {
        format!("mean {} is {:.2} sigma from 6/7", e.mean, e.z)
    })?;
    Ok(format!(
        "mean {:.5} vs 6/7 = {:.5}, {:.2} sigma",
        e.mean, e.expected_approx, e.z
    ))
}

type Criterion = (u32, &'static str, Duration, fn(&mut Ledger) -> Check);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "base cases", Duration::from_secs(1), c1_base_cases),
        (
            2,
            "upper bound at n=2",
            Duration::from_secs(10),
            c2_upper_bound,
        ),
        (
            3,
            "lower-bound search",
            Duration::from_secs(600),
            c3_lower_bound,
        ),
        (
            4,
            "scheduler equivalences",
            Duration::from_secs(300),
            c4_equivalences,
        ),
        (5, "drift constants", Duration::from_secs(1), c5_drift),
        (
            6,
            "random-words proxy",
            Duration::from_secs(900),
            c6_random_words,
        ),
        (7, "algebraic family", Duration::from_secs(60), c7_algebraic),
        (8, "renaming at N=2", Duration::from_secs(300), c8_renaming),
        (9, "extension", Duration::from_secs(300), c9_extension),
        (
            10,
            "oracle coherence",
            Duration::from_secs(600),
            c10_coherence,
        ),
        (
            11,
            "expected collisions",
            Duration::from_secs(60),
            c11_collisions,
        ),
    ];
    let filter: Option<u32> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut ledger = Ledger::default();
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        if filter.is_some_and(|only| only != id) {
            continue;
        }
        let t0 = Instant::now();
        let result = f(&mut ledger);
        let took = t0.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took {took:.2?}, limit {limit:?}")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {id:>2} ({name}) [{took:.2?} / {limit:?}]: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} failed", failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

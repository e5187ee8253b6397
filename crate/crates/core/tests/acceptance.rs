//! Acceptance suite. Runs every primary criterion, prints one PASS/FAIL line
//! for each, and exits non-zero if any fails.
//!
//! Run with `cargo test -p ucql --test acceptance`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ucql::cli::{evaluate_tables, FIELD_AFTER, FIELD_BEFORE};
use ucql::config::RunConfig;
use ucql::domain::{
    Action, BaseState, Condition, Episode, LearnerParams, PasserbyFrame, Trajectory,
    TransitionEvent, TransitionState,
};
use ucql::eval::{accuracy, cleanse, proportion_test, CleanseRules, Comparison};
use ucql::learner::{
    make_initial_q, softmax_probabilities, update_policy, update_temperature, Agent,
};
use ucql::qtable::QTable;
use ucql::sim::{run_batch, Mixture};

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let end_to_end = EndToEnd::run();
    let criteria: Vec<Criterion> = vec![
        ("field arithmetic", Box::new(field_arithmetic)),
        ("initial table", Box::new(initial_table)),
        ("bellman oracle", Box::new(bellman_oracle)),
        ("policy math", Box::new(policy_math)),
        (
            "end-to-end improvement",
            Box::new(|| end_to_end.improvement()),
        ),
        (
            "false-positive reduction",
            Box::new(|| end_to_end.fp_reduction()),
        ),
        ("cleansing", Box::new(cleansing)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{}] {verdict} {name} ({:.2?}): {}",
            i + 1,
            start.elapsed(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn field_arithmetic() -> Outcome {
    let start = Instant::now();
    let before = accuracy(&FIELD_BEFORE).unwrap();
    let after = accuracy(&FIELD_AFTER).unwrap();
    let test = proportion_test(&FIELD_BEFORE, &FIELD_AFTER).unwrap();
    let in_process = start.elapsed();

    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ucql"))
        .current_dir(dir.path())
        .args(["evaluate", "--paper-tables", "--out", "r"])
        .output()
        .unwrap();
    let via_cli = start.elapsed();
    let report = String::from_utf8_lossy(&out.stdout);

    let log_gap = (test.p.log10() - 4.46e-13f64.log10()).abs();
    let pass = (before - 0.322).abs() <= 0.001
        && (after - 0.811).abs() <= 0.001
        && log_gap < 0.05
        && out.status.success()
        && report.contains("accuracy 0.3218")
        && report.contains("accuracy 0.8115")
        && in_process < Duration::from_secs(1)
        && via_cli < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "accuracy {before:.4} -> {after:.4}, z = {:.3}, p = {:.3e} (|dlog10 p| = {log_gap:.4}); {in_process:.2?} in process, {via_cli:.2?} via CLI",
            test.z, test.p
        ),
    )
}

fn initial_table() -> Outcome {
    let q = make_initial_q(&LearnerParams::default());
    let mut expected = vec![0.0; TransitionState::COUNT * Action::COUNT];
    let mut set = |i: usize, j: usize, a: usize, v: f64| expected[(i * 7 + j) * 10 + a] = v;
    for j in 1..=5 {
        set(0, j, 1, 1.0);
    }
    for i in 1..=4 {
        set(i, 5, 8, 5.0);
    }
    set(5, 6, 9, 5.0);
    set(5, 0, 9, 5.0);
    let exact = q.values() == expected.as_slice();
    let zeros = q.values().iter().filter(|v| **v == 0.0).count();
    outcome(
        exact && q.nonzero_count() == 11 && zeros == 479,
        format!(
            "{} nonzero cells, {zeros} zero cells, exact match: {exact}",
            q.nonzero_count()
        ),
    )
}

/// Independent restatement of the engagement ranks and the update rule.
fn oracle_update(
    q_old: f64,
    max_next: f64,
    from_to: (usize, usize),
    action: usize,
    p: &LearnerParams,
) -> f64 {
    // Codes: 0 NotFound, 1 PassingBy, 2 LookAt, 3 Hesitating, 4 Approaching, 5 Established, 6 Leaving.
    const RANK: [f64; 7] = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.0];
    let (before, after) = (RANK[from_to.0], RANK[from_to.1]);
    let acting = action != 0;
    let mut r = 0.0;
    if acting {
        r -= p.action_cost;
        if after < before {
            r -= p.discomfort_scale * (before - after);
        }
    }
    if after > before {
        r += p.goal_scale * (after - before);
    }
    (1.0 - p.alpha) * q_old + p.alpha * (r + p.gamma * max_next)
}

fn bellman_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = LearnerParams {
            alpha: rng.random_range(0.01..=1.0),
            gamma: rng.random_range(0.01..=1.0),
            ..Default::default()
        };
        let mut q = QTable::zeros();
        for s in TransitionState::all() {
            for a in Action::ALL {
                q.set(s, a, rng.random_range(-10.0..10.0));
            }
        }
        let s = TransitionState::from_index(rng.random_range(0..49)).unwrap();
        let next = BaseState::ALL[rng.random_range(0..7)];
        let a = Action::from_index(rng.random_range(0..10)).unwrap();
        let s_tc = TransitionState::new(s.to, next);
        let max_next = q
            .row(s_tc)
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let want = oracle_update(
            q.get(s, a),
            max_next,
            (s.to.code(), next.code()),
            a.index(),
            &p,
        );
        update_policy(&mut q, s, a, s_tc, true, &p);
        let got = q.get(s, a);
        let err = (got - want).abs() / want.abs().max(1e-300);
        worst = worst.max(if want == 0.0 { got.abs() } else { err });
    }

    let mut degenerate_ok = true;
    let p = LearnerParams {
        alpha: 1.0,
        gamma: 0.0,
        ..Default::default()
    };
    for _ in 0..1000 {
        let mut q = make_initial_q(&p);
        let s = TransitionState::from_index(rng.random_range(0..49)).unwrap();
        let s_tc = TransitionState::new(s.to, BaseState::ALL[rng.random_range(0..7)]);
        let a = Action::from_index(rng.random_range(0..10)).unwrap();
        let r = update_policy(&mut q, s, a, s_tc, true, &p).unwrap();
        degenerate_ok &= q.get(s, a) == r;
    }
    outcome(
        worst < 1e-12 && degenerate_ok,
        format!("worst relative error {worst:.2e} over 1000 updates; alpha=1, gamma=0 gives Q=R exactly: {degenerate_ok}"),
    )
}

fn policy_math() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let row: Vec<f64> = (0..10).map(|_| rng.random_range(-10.0..10.0)).collect();
        let t = rng.random_range(0.01..=1.0);
        let sum: f64 = softmax_probabilities(&row, t).unwrap().iter().sum();
        worst = worst.max((sum - 1.0).abs());
    }

    let p = LearnerParams::default();
    let s = TransitionState::from_codes(0, 1).unwrap();
    let mut q = QTable::zeros();
    // trace[n] is the temperature after n updates; trace[0] = T0.
    let mut trace = vec![q.temperature(s)];
    for _ in 0..400 {
        update_temperature(&mut q, s, &p);
        trace.push(q.temperature(s));
    }
    let first_below = trace.iter().position(|t| *t < p.t_min).unwrap();
    let first_frozen = (1..trace.len())
        .find(|&n| trace[n] == trace[n - 1])
        .unwrap();
    let frozen_after = trace[first_below..]
        .iter()
        .all(|t| *t == trace[first_below]);
    // Independent check: 0.98^n against 0.01.
    let oracle_first_below = (0..).find(|&n| 0.98f64.powi(n) < 0.01).unwrap() as usize;
    outcome(
        worst < 1e-9 && first_below == oracle_first_below && first_frozen == first_below + 1 && frozen_after,
        format!(
            "max |sum - 1| = {worst:.1e} over 1e5 rows; T first below T_min after update {first_below} \
             (T = {:.6}, entry {} of the trace counting T0), update {first_frozen} is the first to leave it unchanged; \
             frozen thereafter: {frozen_after}",
            trace[first_below],
            first_below + 1,
        ),
    )
}

struct SeedRun {
    seed: u64,
    comparison: Comparison,
    s01_greedy: Action,
}

struct EndToEnd {
    runs: Vec<SeedRun>,
    elapsed: Duration,
}

impl EndToEnd {
    const SEEDS: u64 = 10;

    fn run() -> Self {
        let start = Instant::now();
        let runs = (0..Self::SEEDS)
            .map(|seed| {
                let cfg = RunConfig {
                    master_seed: seed,
                    ..Default::default()
                };
                let mut agent = Agent::designed(cfg.learner, cfg.policy, true);
                let q_b = agent.table.clone();
                run_batch(
                    &mut agent,
                    &cfg.world,
                    &cfg.estimator,
                    cfg.episodes.train,
                    Mixture::from_world(&cfg.world),
                    true,
                    cfg.train_seed(),
                    Condition::Training,
                );
                let (comparison, _) = evaluate_tables(&cfg, &q_b, &agent.table).unwrap();
                let s01 = TransitionState::from_codes(0, 1).unwrap();
                SeedRun {
                    seed,
                    comparison,
                    s01_greedy: agent.table.greedy_action(s01),
                }
            })
            .collect();
        Self {
            runs,
            elapsed: start.elapsed(),
        }
    }

    fn improvement(&self) -> Outcome {
        let mut lines = Vec::new();
        let mut passing = 0;
        for r in &self.runs {
            let t = &r.comparison.test;
            let ok = t.accuracy_after > t.accuracy_before && t.p < 0.01;
            passing += usize::from(ok);
            lines.push(format!(
                "seed {}: {:.3} -> {:.3}, p = {:.2e}{}",
                r.seed,
                t.accuracy_before,
                t.accuracy_after,
                t.p,
                if ok { "" } else { " (miss)" }
            ));
        }
        outcome(
            passing >= 9 && self.elapsed < Duration::from_secs(300),
            format!(
                "{passing}/10 seeds significant in {:.2?}\n      {}",
                self.elapsed,
                lines.join("\n      ")
            ),
        )
    }

    fn fp_reduction(&self) -> Outcome {
        let mut waits = 0;
        let mut fp_ok = true;
        let mut lines = Vec::new();
        for r in &self.runs {
            let (b, a) = (r.comparison.before, r.comparison.after);
            let waited = r.s01_greedy == Action::Wait;
            waits += usize::from(waited);
            if waited {
                fp_ok &= a.fp < b.fp;
            }
            lines.push(format!(
                "seed {}: s01 -> {}, FP {} -> {}",
                r.seed, r.s01_greedy, b.fp, a.fp
            ));
        }
        outcome(
            waits >= 8 && fp_ok,
            format!(
                "greedy a0 at s01 in {waits}/10 seeds; FP strictly lower in every such seed: {fp_ok}\n      {}",
                lines.join("\n      ")
            ),
        )
    }
}

fn synthetic(id: u64, duration: f64, states: &[(usize, usize)]) -> Episode {
    let ticks = (duration / 0.1).round() as u32;
    let frames = Trajectory::from_frames(
        (0..=ticks)
            .map(|k| PasserbyFrame::missing(f64::from(k) * 0.1))
            .collect(),
    )
    .unwrap();
    Episode {
        id,
        condition: Condition::After,
        scenario: None,
        frames,
        transitions: states
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| TransitionEvent {
                t: k as f64 * 0.1,
                state: TransitionState::from_codes(i, j).unwrap(),
            })
            .collect(),
        events: Vec::new(),
        labels: None,
        truncated: false,
    }
}

fn cleansing() -> Outcome {
    let idle: &[(usize, usize)] = &[(0, 0), (0, 0), (0, 0)];
    let visit: &[(usize, usize)] = &[(0, 1), (1, 1), (1, 0)];
    let mut corpus = Vec::new();
    let mut expected = Vec::new();
    let mut id = 0;
    let mut add =
        |duration: f64, states: &[(usize, usize)], keep: bool, corpus: &mut Vec<Episode>| {
            corpus.push(synthetic(id, duration, states));
            if keep {
                expected.push(id);
            }
            id += 1;
        };
    // 12 short visits, 9 idle streams of at least 1 s, 4 short idle streams,
    // 25 real visits including boundary durations.
    for k in 0..12 {
        add(0.1 * (k % 10) as f64, visit, false, &mut corpus);
    }
    for k in 0..9 {
        add(
            1.0 + k as f64,
            if k == 8 { &[] } else { idle },
            false,
            &mut corpus,
        );
    }
    for _ in 0..4 {
        add(0.5, idle, false, &mut corpus);
    }
    for k in 0..25 {
        add(1.0 + 0.5 * k as f64, visit, true, &mut corpus);
    }
    add(5.0, &[(0, 0), (0, 1)], true, &mut corpus);

    let kept: Vec<u64> = cleanse(corpus.clone(), &CleanseRules::default())
        .iter()
        .map(|e| e.id)
        .collect();
    let again: Vec<u64> = cleanse(
        cleanse(corpus, &CleanseRules::default()),
        &CleanseRules::default(),
    )
    .iter()
    .map(|e| e.id)
    .collect();
    outcome(
        kept == expected && again == expected,
        format!(
            "{} of {} episodes survive, expected {}; exact id match: {}",
            kept.len(),
            id,
            expected.len(),
            kept == expected
        ),
    )
}

fn run_ucql(dir: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_ucql"))
        .current_dir(dir)
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let mut diffs = Vec::new();
    let mut files = 0;
    for run in ["a", "b"] {
        let dir = root.path().join(run);
        std::fs::create_dir_all(&dir).unwrap();
        let ok = run_ucql(&dir, &["train", "--seed", "3", "--out", "o"])
            && run_ucql(&dir, &["evaluate", "--seed", "3", "--out", "o"])
            && run_ucql(&dir, &["export", "o/q_after.csv", "--format", "png"])
            && run_ucql(
                &dir,
                &["export", "o/q_after.csv", "--format", "csv", "--out", "x"],
            )
            && run_ucql(&dir, &["evaluate", "--paper-tables", "--out", "p"]);
        if !ok {
            return outcome(false, format!("a command failed in run {run}"));
        }
    }
    let list = |dir: &Path| -> Vec<String> {
        let mut names = Vec::new();
        for sub in ["o", "x", "p"] {
            for entry in std::fs::read_dir(dir.join(sub)).unwrap() {
                names.push(format!(
                    "{sub}/{}",
                    entry.unwrap().file_name().to_string_lossy()
                ));
            }
        }
        names.sort();
        names
    };
    let (a, b) = (root.path().join("a"), root.path().join("b"));
    let names = list(&a);
    if names != list(&b) {
        return outcome(false, "runs produced different file sets");
    }
    for name in &names {
        files += 1;
        if std::fs::read(a.join(name)).unwrap() != std::fs::read(b.join(name)).unwrap() {
            diffs.push(name.clone());
        }
    }
    outcome(
        diffs.is_empty() && files >= 10,
        format!("{files} artifacts compared across two runs; differing: {diffs:?}"),
    )
}

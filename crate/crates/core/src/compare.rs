//! Side-by-side runs of the two-stage and greedy policies over seeds.

use crate::scenario::Scenario;
use crate::sim::{run, Policy, RunOptions, SimError, SimReport};
use serde::Serialize;
use std::fmt::Write;
use std::thread;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyMetrics {
    /// Threats fired upon at least once.
    pub covered: usize,
    pub destroyed: usize,
    pub leakers: usize,
    pub surviving_value: f64,
    pub shots: u64,
}

impl PolicyMetrics {
    pub fn of(r: &SimReport) -> Self {
        Self {
            covered: r.covered.len(),
            destroyed: r.destroyed,
            leakers: r.leakers,
            surviving_value: r.total_survival,
            shots: r.shots,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedComparison {
    pub seed: u64,
    pub two_stage: PolicyMetrics,
    pub greedy: PolicyMetrics,
    /// Greedy covered strictly fewer threats.
    pub greedy_worse: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MeanMetrics {
    pub covered: f64,
    pub destroyed: f64,
    pub leakers: f64,
    pub surviving_value: f64,
    pub shots: f64,
}

impl MeanMetrics {
    fn of<'a>(rows: impl Iterator<Item = &'a PolicyMetrics>) -> Self {
        let mut m = MeanMetrics::default();
        let mut n = 0.0;
        for r in rows {
            m.covered += r.covered as f64;
            m.destroyed += r.destroyed as f64;
            m.leakers += r.leakers as f64;
            m.surviving_value += r.surviving_value;
            m.shots += r.shots as f64;
            n += 1.0;
        }
        if n > 0.0 {
            m.covered /= n;
            m.destroyed /= n;
            m.leakers /= n;
            m.surviving_value /= n;
            m.shots /= n;
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub scenario: String,
    pub rows: Vec<SeedComparison>,
    pub two_stage_mean: MeanMetrics,
    pub greedy_mean: MeanMetrics,
    pub greedy_worse_seeds: Vec<u64>,
}

impl Comparison {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparisons always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.scenario);
        let _ = writeln!(
            s,
            "{:>8}  {:<10}{:>8}{:>10}{:>8}{:>10}{:>8}",
            "seed", "policy", "covered", "destroyed", "leakers", "survival", "shots"
        );
        let row = |s: &mut String, seed: &str, name: &str, m: (f64, f64, f64, f64, f64), flag: &str| {
            let _ = writeln!(
                s,
                "{seed:>8}  {name:<10}{:>8.2}{:>10.2}{:>8.2}{:>10.4}{:>8.1}{flag}",
                m.0, m.1, m.2, m.3, m.4
            );
        };
        let as_tuple = |m: &PolicyMetrics| {
            (m.covered as f64, m.destroyed as f64, m.leakers as f64, m.surviving_value, m.shots as f64)
        };
        for r in &self.rows {
            let seed = r.seed.to_string();
            row(&mut s, &seed, "two-stage", as_tuple(&r.two_stage), "");
            row(&mut s, &seed, "greedy", as_tuple(&r.greedy), if r.greedy_worse { "  *" } else { "" });
        }
        let mean = |m: &MeanMetrics| (m.covered, m.destroyed, m.leakers, m.surviving_value, m.shots);
        row(&mut s, "mean", "two-stage", mean(&self.two_stage_mean), "");
        row(&mut s, "mean", "greedy", mean(&self.greedy_mean), "");
        let _ = writeln!(
            s,
            "greedy covered fewer threats on {} of {} seeds",
            self.greedy_worse_seeds.len(),
            self.rows.len()
        );
        s
    }
}

/// Runs `f` over `seeds` on worker threads; results keep seed order.
pub fn sweep<T: Send>(seeds: &[u64], f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(seeds.len().max(1));
    let chunk = seeds.len().div_ceil(workers).max(1);
    thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(|&s| f(s)).collect::<Vec<T>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    })
}

/// Runs both policies on every seed.
pub fn compare(scenario: &Scenario, seeds: &[u64], horizon: Option<f64>) -> Result<Comparison, SimError> {
    let results = sweep(seeds, |seed| -> Result<SeedComparison, SimError> {
        let opts = |policy| RunOptions { policy, seed: Some(seed), horizon, record_cycles: false };
        let two = run(scenario, &opts(Policy::TwoStage))?.report;
        let greedy = run(scenario, &opts(Policy::Greedy))?.report;
        let (two, greedy) = (PolicyMetrics::of(&two), PolicyMetrics::of(&greedy));
        Ok(SeedComparison { seed, greedy_worse: greedy.covered < two.covered, two_stage: two, greedy })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Comparison {
        scenario: scenario.name.clone(),
        two_stage_mean: MeanMetrics::of(rows.iter().map(|r| &r.two_stage)),
        greedy_mean: MeanMetrics::of(rows.iter().map(|r| &r.greedy)),
        greedy_worse_seeds: rows.iter().filter(|r| r.greedy_worse).map(|r| r.seed).collect(),
        rows,
    })
}

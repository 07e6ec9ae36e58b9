//! Seeded ensemble experiments over the benchmark families, CSV output with
//! a fixed schema, the closed-form expected-bond-dimension model, and the
//! X-or-Y entry-frequency formula for uniformly random Cliffords.

use std::sync::Mutex;

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

use crate::circuits::{
    gen_hidden_shift, gen_t_doped, gen_uudagger, CczDecomposition, HiddenShiftSpec, TDopedSpec,
};
use crate::mast::{run_mast, run_stn, ProjectionSchedule, RunResult};
use crate::mps::TruncationPolicy;
use crate::{Error, Result};

pub const CSV_SCHEMA: &str = "# stn-bench csv v1";
pub const CSV_HEADER: &str = "instance,family,method,n,t,peak_chi,wall_ms,seed,outcome";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    TDoped,
    UUDagger,
    HiddenShift,
}

impl Family {
    pub fn parse(text: &str) -> Result<Family> {
        match text {
            "tdoped" => Ok(Family::TDoped),
            "uudagger" => Ok(Family::UUDagger),
            "hiddenshift" => Ok(Family::HiddenShift),
            other => Err(Error::InvalidConfig(format!("unknown family '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::TDoped => "tdoped",
            Family::UUDagger => "uudagger",
            Family::HiddenShift => "hiddenshift",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mast,
    Stn,
}

impl Method {
    pub fn parse(text: &str) -> Result<Method> {
        match text {
            "mast" => Ok(Method::Mast),
            "stn" => Ok(Method::Stn),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Mast => "mast",
            Method::Stn => "stn",
        }
    }
}

/// One ensemble: `instances` seeded circuits from one family, one method.
/// For hidden shift, `t` is the per-oracle CCZ count.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub family: Family,
    pub method: Method,
    pub n: usize,
    pub t: usize,
    pub instances: usize,
    pub seed: u64,
    pub schedule: ProjectionSchedule,
    pub policy: TruncationPolicy,
    pub ccz_decomposition: CczDecomposition,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.instances == 0 {
            return Err(Error::InvalidConfig(
                "n and instances must be positive".into(),
            ));
        }
        if self.family == Family::HiddenShift && !self.n.is_multiple_of(2) {
            return Err(Error::InvalidConfig(
                "hidden shift needs an even qubit count".into(),
            ));
        }
        Ok(())
    }
}

/// One line of the CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub instance: usize,
    pub family: Family,
    pub method: Method,
    pub n: usize,
    pub t: usize,
    pub peak_chi: usize,
    pub wall_ms: f64,
    pub seed: u64,
    pub outcome: String,
}

impl ResultRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{},{}",
            self.instance,
            self.family.name(),
            self.method.name(),
            self.n,
            self.t,
            self.peak_chi,
            self.wall_ms,
            self.seed,
            self.outcome
        )
    }
}

/// splitmix64-style mixing of (config seed, instance id).
pub fn instance_seed(seed: u64, instance: usize) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(instance as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn run_instance(config: &ExperimentConfig, instance: usize) -> Result<ResultRow> {
    let seed = instance_seed(config.seed, instance);
    let circuit = match config.family {
        Family::TDoped => gen_t_doped(&TDopedSpec {
            n: config.n,
            t: config.t,
            seed,
        })?,
        Family::UUDagger => gen_uudagger(&TDopedSpec {
            n: config.n,
            t: config.t,
            seed,
        })?,
        Family::HiddenShift => gen_hidden_shift(&HiddenShiftSpec::random(
            config.n,
            config.t,
            config.ccz_decomposition,
            seed,
        )?)?,
    };
    let mut rng = Pcg64Mcg::seed_from_u64(seed ^ 0x5a5a_5a5a_5a5a_5a5a);
    let result: RunResult = match config.method {
        Method::Mast => run_mast(&circuit, &config.schedule, config.policy, &mut rng)?,
        Method::Stn => run_stn(&circuit, config.policy, &mut rng)?,
    };
    let outcome = if config.family == Family::HiddenShift {
        let data = &result.outcomes[result.outcomes.len() - config.n..];
        data.iter().map(|&b| char::from(b'0' + b)).collect()
    } else {
        "-".to_string()
    };
    Ok(ResultRow {
        instance,
        family: config.family,
        method: config.method,
        n: config.n,
        t: config.t,
        peak_chi: result.peak_chi,
        wall_ms: result.wall_ms,
        seed,
        outcome,
    })
}

/// Run all instances, in parallel, gathered in instance order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(config.instances)
        .max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let collected: Mutex<Vec<ResultRow>> = Mutex::new(Vec::with_capacity(config.instances));
    let first_error: Mutex<Option<Error>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= config.instances {
                    break;
                }
                match run_instance(config, i) {
                    Ok(row) => collected.lock().unwrap().push(row),
                    Err(e) => {
                        let mut slot = first_error.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some(e);
                        }
                        break;
                    }
                }
            });
        }
    });
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    let mut rows = collected.into_inner().unwrap();
    rows.sort_by_key(|r| r.instance);
    Ok(rows)
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = format!("{CSV_SCHEMA}\n{CSV_HEADER}\n");
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// Parse CSV text back into rows (schema and header lines are checked).
pub fn rows_from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if line == CSV_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 9 csv fields, got {}", fields.len()),
            });
        }
        let parse_err = |what: &str| Error::Parse {
            line: line_no,
            msg: format!("invalid {what}"),
        };
        rows.push(ResultRow {
            instance: fields[0].parse().map_err(|_| parse_err("instance"))?,
            family: Family::parse(fields[1]).map_err(|_| parse_err("family"))?,
            method: Method::parse(fields[2]).map_err(|_| parse_err("method"))?,
            n: fields[3].parse().map_err(|_| parse_err("n"))?,
            t: fields[4].parse().map_err(|_| parse_err("t"))?,
            peak_chi: fields[5].parse().map_err(|_| parse_err("peak_chi"))?,
            wall_ms: fields[6].parse().map_err(|_| parse_err("wall_ms"))?,
            seed: fields[7].parse().map_err(|_| parse_err("seed"))?,
            outcome: fields[8].to_string(),
        });
    }
    Ok(rows)
}

/// Aggregate statistics per (family, method, n, t) group.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryLine {
    pub family: Family,
    pub method: Method,
    pub n: usize,
    pub t: usize,
    pub count: usize,
    pub mean_chi: f64,
    pub median_chi: f64,
    pub p95_chi: usize,
    pub max_chi: usize,
}

/// Stable, reproducible aggregation: groups sorted by (family, method, n, t).
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryLine> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(&'static str, &'static str, usize, usize), Vec<usize>> =
        BTreeMap::new();
    let mut meta: BTreeMap<(&'static str, &'static str, usize, usize), (Family, Method)> =
        BTreeMap::new();
    for r in rows {
        let key = (r.family.name(), r.method.name(), r.n, r.t);
        groups.entry(key).or_default().push(r.peak_chi);
        meta.entry(key).or_insert((r.family, r.method));
    }
    groups
        .into_iter()
        .map(|(key, mut chis)| {
            chis.sort_unstable();
            let count = chis.len();
            let mean = chis.iter().sum::<usize>() as f64 / count as f64;
            let median = if count % 2 == 1 {
                chis[count / 2] as f64
            } else {
                (chis[count / 2 - 1] + chis[count / 2]) as f64 / 2.0
            };
            let p95 = chis[((count as f64 * 0.95).ceil() as usize).clamp(1, count) - 1];
            let (family, method) = meta[&key];
            SummaryLine {
                family,
                method,
                n: key.2,
                t: key.3,
                count,
                mean_chi: mean,
                median_chi: median,
                p95_chi: p95,
                max_chi: *chis.last().expect("non-empty group"),
            }
        })
        .collect()
}

/// Plain-text column emission suitable for external plotting.
pub fn summary_table(lines: &[SummaryLine]) -> String {
    let mut out =
        String::from("family method n t count mean_chi median_chi p95_chi max_chi\n");
    for l in lines {
        out.push_str(&format!(
            "{} {} {} {} {} {:.4} {:.1} {} {}\n",
            l.family.name(),
            l.method.name(),
            l.n,
            l.t,
            l.count,
            l.mean_chi,
            l.median_chi,
            l.p95_chi,
            l.max_chi
        ));
    }
    out
}

/// Exact probability 2^{n-1} / (2^n - 1) as (numerator, denominator).
/// For a uniformly random Clifford, this is the chance that a given position
/// in a stabilizer row carries an X component, conditioned on the row having
/// any X component at all; n is the qubit count of that row. It approaches
/// 1/2 from above as n grows.
pub fn x_probability(n: usize) -> Result<(u128, u128)> {
    if n == 0 || n > 127 {
        return Err(Error::InvalidConfig("x_probability needs 1 <= n <= 127".into()));
    }
    Ok((1u128 << (n - 1), (1u128 << n) - 1))
}

pub fn x_probability_f64(n: usize) -> f64 {
    if n > 1023 {
        return 0.5;
    }
    let num = 2f64.powi(n as i32 - 1);
    let den = 2f64.powi(n as i32) - 1.0;
    num / den
}

/// Closed-form expected peak bond dimension for the magic-register
/// projection model: projection w in {0, .., t-1} fails to find a data-row
/// pivot with probability 2^{-(n-w)}; no failure gives peak 2, at least one
/// failure gives peak 4. t = 0 is a product state.
pub fn expected_chi_model(n: usize, t: usize) -> f64 {
    if t == 0 {
        return 1.0;
    }
    let p_all_good = model_no_failure_probability(n, t);
    2.0 * p_all_good + 4.0 * (1.0 - p_all_good)
}

fn model_no_failure_probability(n: usize, t: usize) -> f64 {
    let mut p = 1.0f64;
    for w in 0..t {
        let fail = if w >= n {
            1.0
        } else {
            2f64.powi(-((n - w) as i32))
        };
        p *= 1.0 - fail;
    }
    p
}

/// Monte-Carlo evaluation of the same model, used as an independent check.
pub fn expected_chi_model_mc(n: usize, t: usize, samples: usize, seed: u64) -> f64 {
    use rand::Rng;
    if t == 0 {
        return 1.0;
    }
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let mut total = 0u64;
    for _ in 0..samples {
        let mut failed = false;
        for w in 0..t {
            let fail = if w >= n {
                1.0
            } else {
                2f64.powi(-((n - w) as i32))
            };
            if rng.gen::<f64>() < fail {
                failed = true;
                break;
            }
        }
        total += if failed { 4 } else { 2 };
    }
    total as f64 / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_config(family: Family, method: Method) -> ExperimentConfig {
        ExperimentConfig {
            family,
            method,
            n: 4,
            t: 2,
            instances: 8,
            seed: 7,
            schedule: ProjectionSchedule::LeftToRight,
            policy: TruncationPolicy::exact(),
            ccz_decomposition: CczDecomposition::SevenT,
        }
    }

    #[test]
    fn experiment_rows_are_deterministic_and_ordered() {
        let config = small_config(Family::TDoped, Method::Mast);
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.len(), 8);
        for (i, row) in a.iter().enumerate() {
            assert_eq!(row.instance, i);
        }
        // identical up to wall clock
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.peak_chi, y.peak_chi);
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.outcome, y.outcome);
        }
    }

    #[test]
    fn csv_round_trip_modulo_wall_clock() {
        let config = small_config(Family::TDoped, Method::Stn);
        let rows = run_experiment(&config).unwrap();
        let text = rows_to_csv(&rows);
        assert!(text.starts_with(CSV_SCHEMA));
        let parsed = rows_from_csv(&text).unwrap();
        assert_eq!(parsed.len(), rows.len());
        for (a, b) in rows.iter().zip(&parsed) {
            assert_eq!(a.peak_chi, b.peak_chi);
            assert_eq!(a.n, b.n);
            assert_eq!(a.outcome, b.outcome);
        }
    }

    #[test]
    fn hidden_shift_rows_report_the_shift() {
        let mut config = small_config(Family::HiddenShift, Method::Mast);
        config.n = 6;
        config.t = 1;
        config.instances = 4;
        let rows = run_experiment(&config).unwrap();
        for row in rows {
            let spec = HiddenShiftSpec::random(
                6,
                1,
                CczDecomposition::SevenT,
                row.seed,
            )
            .unwrap();
            let want: String = spec
                .shift
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            assert_eq!(row.outcome, want);
        }
    }

    #[test]
    fn chi_ceiling_holds_per_row() {
        for method in [Method::Mast, Method::Stn] {
            let mut config = small_config(Family::TDoped, method);
            config.n = 4;
            config.t = 6;
            let rows = run_experiment(&config).unwrap();
            for row in rows {
                let sites = match method {
                    Method::Mast => config.n + config.t,
                    Method::Stn => config.n,
                };
                assert!(row.peak_chi <= 1 << (sites / 2), "{row:?}");
            }
        }
    }

    #[test]
    fn summarize_basics() {
        let config = small_config(Family::TDoped, Method::Mast);
        let rows = run_experiment(&config).unwrap();
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].count, 8);
        let mean = rows.iter().map(|r| r.peak_chi).sum::<usize>() as f64 / 8.0;
        assert_abs_diff_eq!(summary[0].mean_chi, mean, epsilon = 1e-12);
        // single row echoes itself
        let one = summarize(&rows[..1]);
        assert_abs_diff_eq!(one[0].mean_chi, rows[0].peak_chi as f64, epsilon = 1e-12);
        assert_eq!(one[0].max_chi, rows[0].peak_chi);
        // two methods, same (n, t): two summary lines
        let mut both = rows.clone();
        let stn_rows = run_experiment(&small_config(Family::TDoped, Method::Stn)).unwrap();
        both.extend(stn_rows);
        assert_eq!(summarize(&both).len(), 2);
        // stable text emission
        let t1 = summary_table(&summarize(&both));
        let t2 = summary_table(&summarize(&both));
        assert_eq!(t1, t2);
    }

    #[test]
    fn x_probability_values() {
        assert_eq!(x_probability(1).unwrap(), (1, 1));
        assert_eq!(x_probability(2).unwrap(), (2, 3));
        assert_eq!(x_probability(4).unwrap(), (8, 15));
        assert!((x_probability_f64(20) - 0.5).abs() < 1e-6);
        assert!(x_probability(0).is_err());
    }

    #[test]
    fn chi_model_limits_and_mc_agreement() {
        assert_abs_diff_eq!(expected_chi_model(20, 0), 1.0, epsilon = 1e-12);
        // far below saturation the model sits at 2
        for t in 1..=10 {
            let v = expected_chi_model(20, t);
            assert!((v - 2.0).abs() / 2.0 < 0.01, "t={t} v={v}");
        }
        // monotone non-decreasing in t
        let mut last = 0.0;
        for t in 0..=20 {
            let v = expected_chi_model(20, t);
            assert!(v >= last - 1e-12);
            last = v;
        }
        // Monte-Carlo of the stated mechanism matches the closed form
        for (n, t) in [(20usize, 20usize), (12, 10), (8, 8)] {
            let closed = expected_chi_model(n, t);
            let mc = expected_chi_model_mc(n, t, 200_000, 99);
            let sigma = (4.0f64 * 0.25 / 200_000.0).sqrt().max(1e-4);
            assert!(
                (closed - mc).abs() < 6.0 * sigma + 0.01,
                "n={n} t={t} closed={closed} mc={mc}"
            );
        }
    }

    #[test]
    fn instance_seed_is_stable_and_spread() {
        let a = instance_seed(1, 0);
        let b = instance_seed(1, 1);
        let c = instance_seed(2, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, instance_seed(1, 0));
    }
}

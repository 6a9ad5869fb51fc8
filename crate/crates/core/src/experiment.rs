//! Parameter sweeps over random graphs, per-cell aggregation and CSV output.

use std::cmp::Ordering;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::algorithms::{AlgorithmId, AlgorithmRegistry};
use crate::engine::{default_move_cap, DaemonKind, InitPreset, Simulator};
use crate::error::{Error, Result};
use crate::graph::{gen_random_graph, GraphGenSpec};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `base`; order sensitive, no global state.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// Seed of one trial, a function of its coordinates only.
pub fn trial_seed(base: u64, n: usize, density: f64, trial: usize) -> u64 {
    derive_seed(base, &[n as u64, density.to_bits(), trial as u64])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MoveCapPolicy {
    /// `2n + 1` for central daemons, `10n` for subset daemons.
    #[default]
    Default,
    Fixed(u64),
}

impl MoveCapPolicy {
    pub fn cap(self, n: usize, daemon: &DaemonKind) -> u64 {
        match self {
            MoveCapPolicy::Default => default_move_cap(n, daemon.mode()),
            MoveCapPolicy::Fixed(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub sizes: Vec<usize>,
    pub densities: Vec<f64>,
    pub trials: usize,
    pub algorithms: Vec<AlgorithmId>,
    pub daemon: DaemonKind,
    pub init: InitPreset,
    pub base_seed: u64,
    pub move_cap: MoveCapPolicy,
}

impl ExperimentSpec {
    pub fn new(sizes: Vec<usize>, densities: Vec<f64>, trials: usize, algorithms: Vec<AlgorithmId>) -> Self {
        ExperimentSpec {
            sizes,
            densities,
            trials,
            algorithms,
            daemon: DaemonKind::CentralRandom,
            init: InitPreset::Random(0.5),
            base_seed: 0,
            move_cap: MoveCapPolicy::Default,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        if self.sizes.is_empty() || self.densities.is_empty() || self.algorithms.is_empty() {
            return Err(Error::Invalid("sizes, densities and algorithms must be nonempty".into()));
        }
        for &n in &self.sizes {
            for &p in &self.densities {
                GraphGenSpec::new(n, p, 0).validate()?;
            }
        }
        // surfaces unknown strategies before any work starts
        self.daemon.build(0)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub density: f64,
    pub trial: usize,
    pub seed: u64,
    pub algorithm: AlgorithmId,
    pub daemon: String,
    pub init: String,
    pub cardinality: usize,
    /// `100 |S| / n`, rounded to two decimals.
    pub cardinality_pct: f64,
    pub moves: u64,
    pub rounds: u64,
    pub converged: bool,
}

pub fn cardinality_pct(cardinality: usize, n: usize) -> f64 {
    (10_000.0 * cardinality as f64 / n as f64).round() / 100.0
}

/// Runs every algorithm of `spec` on the graph and initial configuration of
/// one `(n, density, trial)` cell.
pub fn run_trial(spec: &ExperimentSpec, n: usize, density: f64, trial: usize) -> Result<Vec<ExperimentRow>> {
    let registry = AlgorithmRegistry::builtin();
    let seed = trial_seed(spec.base_seed, n, density, trial);
    let graph = gen_random_graph(&GraphGenSpec::new(n, density, seed))?;
    let init = spec.init.build(n, derive_seed(seed, &[1]));
    let cap = spec.move_cap.cap(n, &spec.daemon);

    spec.algorithms
        .iter()
        .map(|&algo| {
            let rules = registry.get(algo).rules();
            let mut daemon = spec.daemon.build(derive_seed(seed, &[2]))?;
            let sim = Simulator::new(&graph, rules, init.clone())?;
            let trace = sim.run(daemon.as_mut(), cap)?;
            let moves = trace.move_count();
            if algo == AlgorithmId::Md2is
                && spec.daemon.is_central()
                && (!trace.converged || moves > 2 * n as u64)
            {
                return Err(Error::NonConvergence(format!(
                    "md2is under {} on n={n} density={density} trial={trial} seed={seed}: \
                     {moves} moves exceed the 2n bound",
                    trace.daemon
                )));
            }
            let cardinality = trace.final_config.cardinality();
            Ok(ExperimentRow {
                n,
                density,
                trial,
                seed,
                algorithm: algo,
                daemon: trace.daemon,
                init: spec.init.to_string(),
                cardinality,
                cardinality_pct: cardinality_pct(cardinality, n),
                moves,
                rounds: trace.rounds,
                converged: trace.converged,
            })
        })
        .collect()
}

fn row_order(a: &ExperimentRow, b: &ExperimentRow) -> Ordering {
    a.n.cmp(&b.n)
        .then(a.density.total_cmp(&b.density))
        .then(a.algorithm.cmp(&b.algorithm))
        .then(a.trial.cmp(&b.trial))
}

/// One row per `(size, density, trial, algorithm)`, sorted by
/// `(n, density, algorithm, trial)`. Trials run in parallel.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    let cells: Vec<(usize, f64, usize)> = spec
        .sizes
        .iter()
        .flat_map(|&n| {
            spec.densities
                .iter()
                .flat_map(move |&p| (0..spec.trials).map(move |t| (n, p, t)))
        })
        .collect();
    let chunks = cells
        .par_iter()
        .map(|&(n, p, t)| run_trial(spec, n, p, t))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ExperimentRow> = chunks.into_iter().flatten().collect();
    rows.sort_by(row_order);
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Sample standard deviation; 0 for a single value.
    pub stddev: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        assert!(!values.is_empty());
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let stddev = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        };
        Stats {
            mean,
            min,
            max,
            stddev,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub n: usize,
    pub density: f64,
    pub algorithm: AlgorithmId,
    pub daemon: String,
    pub init: String,
    pub trials: usize,
    pub cardinality: Stats,
    pub moves: Stats,
    pub rounds_mean: f64,
    pub converged: usize,
}

/// Aggregates per `(n, density, algorithm)` cell, in that order.
pub fn summarize(rows: &[ExperimentRow]) -> Vec<CellSummary> {
    let mut sorted: Vec<&ExperimentRow> = rows.iter().collect();
    sorted.sort_by(|a, b| row_order(a, b));
    sorted
        .chunk_by(|a, b| a.n == b.n && a.density.to_bits() == b.density.to_bits() && a.algorithm == b.algorithm)
        .map(|cell| {
            let first = cell[0];
            let card: Vec<f64> = cell.iter().map(|r| r.cardinality as f64).collect();
            let moves: Vec<f64> = cell.iter().map(|r| r.moves as f64).collect();
            CellSummary {
                n: first.n,
                density: first.density,
                algorithm: first.algorithm,
                daemon: first.daemon.clone(),
                init: first.init.clone(),
                trials: cell.len(),
                cardinality: Stats::of(&card),
                moves: Stats::of(&moves),
                rounds_mean: cell.iter().map(|r| r.rounds as f64).sum::<f64>() / cell.len() as f64,
                converged: cell.iter().filter(|r| r.converged).count(),
            }
        })
        .collect()
}

pub const ROW_HEADER: [&str; 12] = [
    "n",
    "density",
    "trial",
    "seed",
    "algorithm",
    "daemon",
    "init",
    "cardinality",
    "cardinality_pct",
    "moves",
    "rounds",
    "converged",
];

pub const SUMMARY_HEADER: [&str; 15] = [
    "n",
    "density",
    "algorithm",
    "daemon",
    "init",
    "trials",
    "cardinality_mean",
    "cardinality_min",
    "cardinality_max",
    "cardinality_stddev",
    "moves_mean",
    "moves_min",
    "moves_max",
    "moves_stddev",
    "rounds_mean",
];

pub fn write_rows_csv<W: Write>(rows: &[ExperimentRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ROW_HEADER)?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            r.density.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.algorithm.to_string(),
            r.daemon.clone(),
            r.init.clone(),
            r.cardinality.to_string(),
            format!("{:.2}", r.cardinality_pct),
            r.moves.to_string(),
            r.rounds.to_string(),
            r.converged.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn rows_csv(rows: &[ExperimentRow]) -> String {
    let mut buf = Vec::new();
    write_rows_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8")
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = rec
        .get(i)
        .ok_or_else(|| Error::parse(line, format!("missing column `{}`", ROW_HEADER[i])))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("bad {} `{raw}`", ROW_HEADER[i])))
}

pub fn read_rows_csv<R: Read>(r: R) -> Result<Vec<ExperimentRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if header.iter().ne(ROW_HEADER.iter().copied()) {
        return Err(Error::parse(1, "unexpected header"));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        let algorithm: String = field(&rec, 4, line)?;
        rows.push(ExperimentRow {
            n: field(&rec, 0, line)?,
            density: field(&rec, 1, line)?,
            trial: field(&rec, 2, line)?,
            seed: field(&rec, 3, line)?,
            algorithm: algorithm.parse()?,
            daemon: field(&rec, 5, line)?,
            init: field(&rec, 6, line)?,
            cardinality: field(&rec, 7, line)?,
            cardinality_pct: field(&rec, 8, line)?,
            moves: field(&rec, 9, line)?,
            rounds: field(&rec, 10, line)?,
            converged: field(&rec, 11, line)?,
        });
    }
    Ok(rows)
}

pub fn write_summary_csv<W: Write>(cells: &[CellSummary], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_HEADER)?;
    let f = |x: f64| format!("{x:.2}");
    for c in cells {
        out.write_record([
            c.n.to_string(),
            c.density.to_string(),
            c.algorithm.to_string(),
            c.daemon.clone(),
            c.init.clone(),
            c.trials.to_string(),
            f(c.cardinality.mean),
            f(c.cardinality.min),
            f(c.cardinality.max),
            f(c.cardinality.stddev),
            f(c.moves.mean),
            f(c.moves.min),
            f(c.moves.max),
            f(c.moves.stddev),
            f(c.rounds_mean),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ExperimentRow], path: &Path) -> Result<()> {
    fs::write(path, rows_csv(rows)).map_err(|e| Error::io(path, e))
}

pub fn emit_summary_csv(cells: &[CellSummary], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_summary_csv(cells, &mut buf).expect("writing to memory");
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_csv(path: &Path) -> Result<Vec<ExperimentRow>> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_rows_csv(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(n: usize, density: f64, trial: usize, algorithm: AlgorithmId, cardinality: usize, moves: u64) -> ExperimentRow {
        ExperimentRow {
            n,
            density,
            trial,
            seed: trial as u64,
            algorithm,
            daemon: "central-random".into(),
            init: "random:0.5".into(),
            cardinality,
            cardinality_pct: cardinality_pct(cardinality, n),
            moves,
            rounds: moves,
            converged: true,
        }
    }

    #[test]
    fn pct_matches_table_style() {
        assert_eq!(format!("{:.2}", cardinality_pct(6018, 10_000)), "60.18");
        assert_eq!(format!("{:.2}", cardinality_pct(1, 3)), "33.33");
        assert_eq!(format!("{:.2}", cardinality_pct(724, 5000)), "14.48");
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(rows_csv(&[]), format!("{}\n", ROW_HEADER.join(",")));
    }

    #[test]
    fn summarize_examples() {
        let single = summarize(&[row(10, 0.1, 0, AlgorithmId::Md2is, 4, 7)]);
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].cardinality.mean, 4.0);
        assert_eq!(single[0].cardinality.stddev, 0.0);

        let two = summarize(&[
            row(10, 0.1, 1, AlgorithmId::Md2is, 6, 3),
            row(10, 0.1, 0, AlgorithmId::Md2is, 4, 5),
        ]);
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].cardinality.mean, 5.0);
        assert_eq!(two[0].cardinality.min, 4.0);
        assert_eq!(two[0].cardinality.max, 6.0);
        assert_eq!(two[0].moves.mean, 4.0);
        assert!(summarize(&[]).is_empty());
    }

    #[test]
    fn table_shaped_sweep_has_39_cells() {
        let rows: Vec<ExperimentRow> = (1000..=20_000)
            .step_by(500)
            .flat_map(|n| (0..5).map(move |t| row(n, 0.001, t, AlgorithmId::Md2is, n / 3, n as u64 / 2)))
            .collect();
        let cells = summarize(&rows);
        assert_eq!(cells.len(), 39);
        assert!(cells.windows(2).all(|w| w[0].n < w[1].n));
    }

    #[test]
    fn seeds_are_positional() {
        let a = trial_seed(7, 1000, 0.001, 3);
        assert_eq!(a, trial_seed(7, 1000, 0.001, 3));
        assert_ne!(a, trial_seed(7, 1000, 0.001, 4));
        assert_ne!(a, trial_seed(7, 1500, 0.001, 3));
        assert_ne!(a, trial_seed(7, 1000, 0.002, 3));
        assert_ne!(a, trial_seed(8, 1000, 0.001, 3));
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = ExperimentSpec::new(vec![10], vec![0.1], 0, vec![AlgorithmId::Md2is]);
        assert!(run_experiment(&spec).is_err());
        spec.trials = 1;
        spec.densities = vec![1.5];
        assert!(run_experiment(&spec).is_err());
        spec.densities = vec![0.1];
        spec.sizes = vec![0];
        assert!(run_experiment(&spec).is_err());
    }

    #[test]
    fn complete_graphs_give_one() {
        let spec = ExperimentSpec::new(vec![5, 40, 200], vec![1.0], 3, vec![AlgorithmId::Md2is]);
        for r in run_experiment(&spec).unwrap() {
            assert_eq!(r.cardinality, 1);
            assert!(r.converged);
        }
    }

    #[test]
    fn cell_independence() {
        let mut spec = ExperimentSpec::new(
            vec![50, 80],
            vec![0.05, 0.2],
            3,
            vec![AlgorithmId::Md2is, AlgorithmId::MisCentral],
        );
        spec.base_seed = 99;
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 3 * 2);
        let alone = run_trial(&spec, 80, 0.05, 2).unwrap();
        for r in alone {
            assert!(rows.contains(&r));
        }
    }

    fn arb_row() -> impl Strategy<Value = ExperimentRow> {
        (
            1usize..50_000,
            0.0f64..=1.0,
            0usize..20,
            any::<u64>(),
            0usize..3,
            0usize..50_000,
            any::<u32>(),
            any::<u32>(),
            any::<bool>(),
        )
            .prop_map(|(n, density, trial, seed, a, card, moves, rounds, converged)| {
                let cardinality = card % (n + 1);
                ExperimentRow {
                    n,
                    density,
                    trial,
                    seed,
                    algorithm: AlgorithmId::ALL[a],
                    daemon: "distributed:0.5".into(),
                    init: "random:0.5".into(),
                    cardinality,
                    cardinality_pct: cardinality_pct(cardinality, n),
                    moves: moves as u64,
                    rounds: rounds as u64,
                    converged,
                }
            })
    }

    proptest! {
        #[test]
        fn rows_csv_round_trip(rows in proptest::collection::vec(arb_row(), 0..20)) {
            let text = rows_csv(&rows);
            prop_assert_eq!(read_rows_csv(text.as_bytes()).unwrap(), rows);
        }
    }
}

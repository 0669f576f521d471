use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cetc::bfs::write_edge_classes;
use cetc::bfs::write_levels;
use cetc::dist::{simulate_comm_cetc_parallel, simulate_comm_cetc_with, LedgerRecord};
use cetc::graph::WedgeDefinition;
use cetc::model::{cover_edge_volume, fit_k_exponential, wedge_volume_bits, ModelInputs};
use cetc::report::{
    build_row, k_sweep, parse_csv, render, render_k_samples_csv, seed_averaged,
    ExtrapolationInputs, Format, MeasureOptions, RowSource,
};
use cetc::rmat::{generate_rmat, RmatParams};
use cetc::triangles::{count_cetc_parallel, Algorithm};
use cetc::units::{ceil_log2, format_bits_as_bytes, format_sig3};
use cetc::{
    bfs_forest, classify_edges, count_bruteforce, count_cetc, count_edge_iterator, degree_stats,
    diameter_proxy, load_edge_list, partition_vertices, EdgeListOptions,
    Error, Kernel, LoadedGraph, Result, RootPolicy,
};

/// Directory searched for relative input paths that do not exist as given.
const DATA_DIR_ENV: &str = "CETC_DATA_DIR";
const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "cetc", version, about = "Cover-edge triangle counting toolkit")]
struct Cli {
    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct InputArgs {
    /// SNAP edge list. Relative paths are also looked up in $CETC_DATA_DIR.
    #[arg(long, short)]
    input: PathBuf,
    /// Input vertex ids start at 1.
    #[arg(long)]
    one_indexed: bool,
}

#[derive(clap::Args, Debug, Clone)]
struct RootArgs {
    /// lowest | random | comma-separated vertex ids.
    #[arg(long, default_value = "lowest")]
    roots: String,
    /// Seed for `--roots random`.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl RootArgs {
    fn policy(&self) -> Result<RootPolicy> {
        match self.roots.as_str() {
            "lowest" => Ok(RootPolicy::LowestId),
            "random" => Ok(RootPolicy::SeededRandom(self.seed)),
            list => list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Domain(format!("invalid root id {t:?}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(RootPolicy::Given),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Cetc,
    EdgeIter,
    Brute,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KernelArg {
    Merge,
    Bsearch,
    Hash,
}

impl From<KernelArg> for Kernel {
    fn from(k: KernelArg) -> Kernel {
        match k {
            KernelArg::Merge => Kernel::Merge,
            KernelArg::Bsearch => Kernel::BinarySearch,
            KernelArg::Hash => Kernel::Hash,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WedgeArg {
    Total,
    Oriented,
}

impl From<WedgeArg> for WedgeDefinition {
    fn from(w: WedgeArg) -> WedgeDefinition {
        match w {
            WedgeArg::Total => WedgeDefinition::Total,
            WedgeArg::Oriented => WedgeDefinition::Oriented,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Records,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Csv => Format::Csv,
            FormatArg::Records => Format::Records,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize an edge list and print degree statistics.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        /// Write the canonical edge list here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// BFS edge classes, k and optional dumps.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        roots: RootArgs,
        /// Write "id level parent" lines here.
        #[arg(long)]
        levels: Option<PathBuf>,
        /// Write "u v class" lines here.
        #[arg(long)]
        classes: Option<PathBuf>,
    },
    /// Count triangles.
    Count {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "cetc")]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value = "merge")]
        kernel: KernelArg,
        #[command(flatten)]
        roots: RootArgs,
    },
    /// Simulate the distributed count on p processors and print its ledger.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short)]
        p: usize,
        #[arg(long, value_enum, default_value = "merge")]
        kernel: KernelArg,
        #[command(flatten)]
        roots: RootArgs,
        /// Also print the ledger as one JSON object.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the volume formulas.
    Model {
        #[arg(long)]
        n: u128,
        #[arg(long)]
        m: u128,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        p: u64,
        /// Diameter proxy.
        #[arg(long, conflicts_with = "log_d", required_unless_present = "log_d")]
        d_hat: Option<u128>,
        /// ⌈log₂ D⌉ given directly.
        #[arg(long)]
        log_d: Option<u32>,
        /// Wedge count for the baseline volume.
        #[arg(long)]
        wedges: Option<u128>,
    },
    /// Generate an RMAT graph.
    Rmat {
        #[arg(long)]
        scale: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        edge_factor: u32,
        /// Write the canonical edge list here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Measure k over an RMAT scale sweep and fit k = A·e^(−B·scale).
    FitK {
        #[arg(long, default_value_t = 6)]
        min_scale: u32,
        #[arg(long, default_value_t = 16)]
        max_scale: u32,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        seeds: Vec<u64>,
        /// Write per-sample CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Communication-cost rows over a manifest of "name path p" lines.
    Report {
        /// Manifest file; omit to report only extrapolated rows.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "total")]
        wedges: WedgeArg,
        /// Append the RMAT-36 and RMAT-42 model rows.
        #[arg(long)]
        extrapolate: bool,
        #[command(flatten)]
        roots: RootArgs,
        /// Re-render a CSV produced by an earlier run instead of measuring.
        #[arg(long, conflicts_with = "manifest")]
        from_csv: Option<PathBuf>,
    },
}

fn resolve(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

fn load(input: &InputArgs) -> Result<LoadedGraph> {
    let path = resolve(&input.input);
    let file = File::open(&path).map_err(|e| {
        Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    load_edge_list(
        BufReader::new(file),
        EdgeListOptions {
            one_indexed: input.one_indexed,
            ..Default::default()
        },
    )
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn time_line(out: &mut impl Write, what: &str, start: Instant) -> Result<()> {
    writeln!(out, "time: {what} elapsed={:.6}", start.elapsed().as_secs_f64())?;
    Ok(())
}

fn echo_roots(out: &mut impl Write, roots: &RootArgs) -> Result<()> {
    writeln!(out, "roots={} seed={}", roots.roots, roots.seed)?;
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    let threads = cli.threads.unwrap_or(0);
    if threads > 0 {
        // Only fails if the global pool is already built.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let workers = if threads > 0 {
        threads
    } else {
        rayon::current_num_threads()
    };

    match cli.command {
        Command::Ingest { input, output } => {
            let start = Instant::now();
            let loaded = load(&input)?;
            let g = &loaded.graph;
            let stats = degree_stats(g)?;
            writeln!(out, "n={} m={}", g.n(), g.m())?;
            writeln!(
                out,
                "input_edges={} self_loops={} duplicates={}",
                loaded.summary.input_edges, loaded.summary.self_loops, loaded.summary.duplicates
            )?;
            writeln!(
                out,
                "d_max={} wedges_total={} wedges_oriented={}",
                stats.d_max, stats.wedge_total, stats.wedge_oriented
            )?;
            if let Some(path) = output {
                let mut w = create(&path)?;
                g.write_edge_list(&mut w)?;
                w.flush()?;
            }
            time_line(out, "ingest", start)?;
        }
        Command::Classify {
            input,
            roots,
            levels,
            classes,
        } => {
            let start = Instant::now();
            let g = load(&input)?.graph;
            echo_roots(out, &roots)?;
            let forest = bfs_forest(&g, &roots.policy()?)?;
            let cls = classify_edges(&g, &forest)?;
            writeln!(
                out,
                "n={} m={} components={} d_hat={}",
                g.n(),
                g.m(),
                forest.labels.components(),
                diameter_proxy(&forest.labels)
            )?;
            writeln!(
                out,
                "tree={} strut={} horizontal={} k={:.4}",
                cls.tree, cls.strut, cls.horizontal, cls.k
            )?;
            if let Some(path) = levels {
                let mut w = create(&path)?;
                write_levels(&forest, &mut w)?;
                w.flush()?;
            }
            if let Some(path) = classes {
                let mut w = create(&path)?;
                write_edge_classes(&g, &cls, &mut w)?;
                w.flush()?;
            }
            time_line(out, "classify", start)?;
        }
        Command::Count {
            input,
            algo,
            kernel,
            roots,
        } => {
            let g = load(&input)?.graph;
            let start = Instant::now();
            let (report, k) = match algo {
                AlgoArg::Cetc => {
                    echo_roots(out, &roots)?;
                    let forest = bfs_forest(&g, &roots.policy()?)?;
                    let cls = classify_edges(&g, &forest)?;
                    let report = if workers > 1 {
                        count_cetc_parallel(&g, &cls, &forest.labels, kernel.into(), workers)?
                    } else {
                        count_cetc(&g, &cls, &forest.labels, kernel.into())?
                    };
                    (report, Some(cls.k))
                }
                AlgoArg::EdgeIter => (count_edge_iterator(&g), None),
                AlgoArg::Brute => (count_bruteforce(&g)?, None),
            };
            debug_assert!(matches!(
                (algo, report.algorithm),
                (AlgoArg::Cetc, Algorithm::Cetc)
                    | (AlgoArg::EdgeIter, Algorithm::EdgeIterator)
                    | (AlgoArg::Brute, Algorithm::BruteForce)
            ));
            writeln!(out, "{}", report.summary_line(g.m(), k))?;
            time_line(out, "count", start)?;
        }
        Command::Simulate {
            input,
            p,
            kernel,
            roots,
            json,
        } => {
            let name = input.input.display().to_string();
            let g = load(&input)?.graph;
            echo_roots(out, &roots)?;
            let start = Instant::now();
            let forest = bfs_forest(&g, &roots.policy()?)?;
            let cls = classify_edges(&g, &forest)?;
            let sequential = count_cetc(&g, &cls, &forest.labels, kernel.into())?.total;
            let part = partition_vertices(&g, p)?;
            let sim = if workers > 1 && matches!(kernel, KernelArg::Merge) {
                simulate_comm_cetc_parallel(&g, &forest.labels, &cls, &part, workers)?
            } else {
                simulate_comm_cetc_with(
                    &g,
                    &forest.labels,
                    &cls,
                    &part,
                    kernel.into(),
                    |_, _, _, _| {},
                )?
            };
            if sim.total_triangles != sequential {
                return Err(Error::Inconsistent(format!(
                    "distributed count {} differs from sequential count {}",
                    sim.total_triangles, sequential
                )));
            }
            writeln!(
                out,
                "triangles={} sequential={} p={} k={:.4}",
                sim.total_triangles, sequential, p, cls.k
            )?;
            let per: Vec<String> = sim.per_processor_counts.iter().map(u64::to_string).collect();
            writeln!(out, "per_processor={}", per.join(","))?;
            writeln!(out, "peak_resident_edges={}", sim.peak_resident_edges)?;
            write!(out, "{}", sim.ledger.to_kv())?;
            writeln!(out, "total={}", format_bits_as_bytes(sim.ledger.total_bits))?;
            if json {
                let record = LedgerRecord {
                    graph: &name,
                    n: g.n(),
                    m: g.m(),
                    p,
                    k: cls.k,
                    d_hat: diameter_proxy(&forest.labels),
                    triangles: sim.total_triangles,
                    ledger: sim.ledger,
                };
                writeln!(out, "{}", record.to_json()?)?;
            }
            time_line(out, "simulate", start)?;
        }
        Command::Model {
            n,
            m,
            k,
            p,
            d_hat,
            log_d,
            wedges,
        } => {
            let base = ModelInputs {
                n,
                m,
                d_hat: d_hat.unwrap_or(0),
                k,
                p,
                wedges: wedges.unwrap_or(0),
            };
            let inputs = match log_d {
                Some(bits) => base.with_log_d_bits(bits),
                None => base,
            };
            let v = cover_edge_volume(&inputs)?;
            writeln!(
                out,
                "log_n={} log_d={}",
                ceil_log2(n),
                ceil_log2(inputs.d_hat)
            )?;
            writeln!(
                out,
                "bfs_bits={} cover_bits={} reduction_bits={} total_bits={}",
                v.bfs_bits, v.cover_bits, v.reduction_bits, v.total_bits
            )?;
            writeln!(out, "cover_edge={}", format_bits_as_bytes(v.total_bits))?;
            if let Some(w) = wedges {
                let prev = wedge_volume_bits(w, n)?;
                writeln!(out, "previous_bits={prev}")?;
                writeln!(out, "previous={}", format_bits_as_bytes(prev))?;
                writeln!(
                    out,
                    "reduction={}",
                    format_sig3(cetc::model::reduction_ratio(prev, v.total_bits)?)
                )?;
            }
        }
        Command::Rmat {
            scale,
            seed,
            edge_factor,
            output,
        } => {
            let params = RmatParams {
                edge_factor,
                ..RmatParams::new(scale, seed)
            };
            writeln!(out, "scale={scale} edge_factor={edge_factor} seed={seed}")?;
            let start = Instant::now();
            let r = generate_rmat(&params)?;
            writeln!(
                out,
                "n={} m={} sampled_slots={} self_loops={} duplicates={}",
                r.graph.n(),
                r.graph.m(),
                r.sampled_slots,
                r.summary.self_loops,
                r.summary.duplicates
            )?;
            if let Some(path) = output {
                let mut w = create(&path)?;
                r.graph.write_edge_list(&mut w)?;
                w.flush()?;
            }
            time_line(out, "rmat", start)?;
        }
        Command::FitK {
            min_scale,
            max_scale,
            seeds,
            csv,
        } => {
            if min_scale > max_scale {
                return Err(Error::Domain(format!(
                    "min scale {min_scale} exceeds max scale {max_scale}"
                )));
            }
            let seed_list: Vec<String> = seeds.iter().map(u64::to_string).collect();
            writeln!(out, "seeds={}", seed_list.join(","))?;
            let start = Instant::now();
            let samples = k_sweep(min_scale..=max_scale, &seeds)?;
            for (scale, k) in seed_averaged(&samples) {
                writeln!(out, "scale={scale} k_mean={k:.6}")?;
            }
            let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.scale as f64, s.k)).collect();
            let fit = fit_k_exponential(&points)?;
            writeln!(
                out,
                "fit: A={:.4} B={:.4} r_squared={:.4} ({} space)",
                fit.a, fit.b, fit.r_squared, fit.r_squared_space
            )?;
            if let Some(path) = csv {
                std::fs::write(path, render_k_samples_csv(&samples))?;
            }
            time_line(out, "fit-k", start)?;
        }
        Command::Report {
            manifest,
            format,
            wedges,
            extrapolate,
            roots,
            from_csv,
        } => {
            let mut rows = Vec::new();
            if let Some(path) = from_csv {
                rows = parse_csv(&std::fs::read_to_string(path)?)?;
            }
            let opts = MeasureOptions {
                root_policy: roots.policy()?,
                wedge_definition: wedges.into(),
                kernel: Kernel::Merge,
            };
            if let Some(path) = manifest {
                let file = File::open(resolve(&path))?;
                for (idx, line) in BufReader::new(file).lines().enumerate() {
                    let line = line?;
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    let [name, graph_path, p] = parts[..] else {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: "manifest lines are \"name path p\"".into(),
                        });
                    };
                    let p: u64 = p.parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        message: format!("invalid processor count {p:?}"),
                    })?;
                    let g = load(&InputArgs {
                        input: graph_path.into(),
                        one_indexed: false,
                    })?
                    .graph;
                    rows.push(build_row(RowSource::Measured { name, graph: &g }, p, &opts)?);
                }
            }
            if extrapolate {
                for (inputs, p) in [
                    (ExtrapolationInputs::rmat36(), 128),
                    (ExtrapolationInputs::rmat42(), 256),
                ] {
                    rows.push(build_row(RowSource::Extrapolated(&inputs), p, &opts)?);
                }
            }
            write!(out, "{}", render(&rows, format.into())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out).and_then(|()| Ok(out.flush()?)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

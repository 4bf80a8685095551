//! Batch front end over the mining library: one command per invocation,
//! artifacts written atomically (temp file + rename), so an interrupted run
//! never leaves a partial file. Every randomized command takes an explicit
//! seed and reproduces byte-identically. Diagnostics go to standard error
//! and are controlled by `BM_LOG={error|info|debug}`.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::Context;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bmine_core::{
    add_camouflage, auc, best_f1, build_forest, detect, forest_scores, gen_background,
    inject_group, join, read_edge_list, read_labels, read_mode_sidecar, solve_mhibp,
    write_labels, BipartiteGraph, BoundaryOverrides, CamouflageKind, GraphBuilder,
    InjectionSpec, KDataset, Mode, SuspiciousnessRanking,
};

#[derive(Parser)]
#[command(name = "bmine", version, about = "Dense-group mining and ranking on bipartite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate every maximal half-isolated biclique as JSON lines.
    SolveMhibp {
        /// Edge list: one source<TAB>target pair per line.
        #[arg(long, value_name = "PATH")]
        edges: PathBuf,
        /// Where to write the JSON-lines biclique file.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Rank every source by suspiciousness; writes a score-descending TSV.
    Detect {
        #[arg(long, value_name = "PATH")]
        edges: PathBuf,
        /// Target interpretation: object audiences score by rarity (aobg),
        /// shared resources by crowding (arbg).
        #[arg(long, default_value = "arbg", value_parser = parse_mode)]
        mode: Mode,
        /// Smoothing constant inside every score.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Score floor for boundary nodes (default: mean node score).
        #[arg(long)]
        thickness: Option<f64>,
        /// Boundary depth (default: derived from the tree's shape).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Score a 1+K attribute table with one tree per attribute column.
    Forest {
        /// CSV with an id column plus one column per attribute.
        #[arg(long, value_name = "PATH")]
        kdata: PathBuf,
        /// Sidecar declaring column<TAB>mode for every attribute column.
        #[arg(long, value_name = "PATH")]
        modes: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Optional boundary overrides, applied to every attribute tree.
        #[arg(long)]
        thickness: Option<f64>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Generate a seeded random background, plant a synchronized group, and
    /// optionally camouflage it; writes the edge list and the ground truth.
    /// The background draws from --seed, the group from --seed+1, and
    /// camouflage from --seed+2.
    Inject {
        /// Background source count.
        #[arg(long)]
        sources: usize,
        /// Background target count.
        #[arg(long)]
        targets: usize,
        /// Background edge probability.
        #[arg(long)]
        edge_prob: f64,
        /// Planted group size on the source side.
        #[arg(long)]
        fraud_sources: usize,
        /// Fresh targets the group shares.
        #[arg(long)]
        fraud_targets: usize,
        /// Fraction of the group's targets each group source connects to.
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        /// Camouflage direction, if any.
        #[arg(long, value_enum, default_value_t = CamouflageArg::None)]
        camouflage: CamouflageArg,
        /// Camouflage edges per camouflaged node.
        #[arg(long, default_value_t = 0)]
        camouflage_degree: usize,
        #[arg(long)]
        seed: u64,
        /// Where to write the edge list.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Where to write label<TAB>{0,1} ground truth.
        #[arg(long, value_name = "PATH")]
        labels_out: PathBuf,
    },
    /// Join a ranking TSV with ground-truth labels and print
    /// `auc` and `best_f1`, one metric per line.
    Eval {
        #[arg(long, value_name = "PATH")]
        ranking: PathBuf,
        #[arg(long, value_name = "PATH")]
        labels: PathBuf,
    },
    /// Time end-to-end detection on nested subsamples of an edge list and
    /// write a CSV of edge_count,build_ms rows (minimum over repetitions).
    Bench {
        #[arg(long, value_name = "PATH")]
        edges: PathBuf,
        /// Either `lo..hi` (inclusive, stepped in tenths) or a
        /// comma-separated list of fractions in (0, 1].
        #[arg(long, default_value = "0.1..1.0", value_parser = parse_fractions)]
        fractions: Fractions,
        /// Seed for the subsample order.
        #[arg(long)]
        seed: u64,
        /// Timed repetitions per fraction; the minimum is reported.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
        reps: u32,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CamouflageArg {
    None,
    Sources,
    Targets,
}

fn parse_mode(text: &str) -> Result<Mode, String> {
    Mode::from_str(text).map_err(|e| e.to_string())
}

/// A validated, ascending, de-duplicated set of subsample fractions.
#[derive(Clone)]
struct Fractions(Vec<f64>);

/// `lo..hi` sweeps tenths inclusively; otherwise a comma list. Everything
/// must land in (0, 1].
fn parse_fractions(text: &str) -> Result<Fractions, String> {
    fn one(s: &str) -> Result<f64, String> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| format!("bad fraction {s:?}"))?;
        if v > 0.0 && v <= 1.0 {
            Ok(v)
        } else {
            Err(format!("fraction {v} is outside (0, 1]"))
        }
    }
    let mut fractions = if let Some((a, b)) = text.split_once("..") {
        let (lo, hi) = (one(a)?, one(b)?);
        let (lo_k, hi_k) = ((lo * 10.0).round() as i64, (hi * 10.0).round() as i64);
        if (lo_k as f64 / 10.0 - lo).abs() > 1e-9 || (hi_k as f64 / 10.0 - hi).abs() > 1e-9 {
            return Err("range endpoints must be multiples of 0.1".into());
        }
        if lo_k > hi_k {
            return Err(format!("empty range {text:?}"));
        }
        (lo_k..=hi_k).map(|k| k as f64 / 10.0).collect()
    } else {
        text.split(',').map(one).collect::<Result<Vec<_>, _>>()?
    };
    fractions.sort_by(f64::total_cmp);
    fractions.dedup();
    Ok(Fractions(fractions))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("BM_LOG")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("bmine: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn load_graph(path: &Path) -> anyhow::Result<BipartiteGraph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let graph = read_edge_list(BufReader::new(file))
        .with_context(|| format!("reading edge list {}", path.display()))?;
    log::info!(
        "{}: {} sources, {} targets, {} edges",
        path.display(),
        graph.num_sources(),
        graph.num_targets(),
        graph.edge_count()
    );
    Ok(graph)
}

/// Write through a temp file in the destination directory and rename over
/// the target, so readers only ever see complete files.
fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file beside {}", path.display()))?;
    tmp.write_all(contents)
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("replacing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::SolveMhibp { edges, out } => {
            let graph = load_graph(&edges)?;
            let set = solve_mhibp(&graph)?;
            log::info!("{} maximal half-isolated bicliques", set.len());
            write_atomic(&out, set.to_json_lines(&graph).as_bytes())
        }
        Command::Detect {
            edges,
            mode,
            c,
            thickness,
            depth,
            out,
        } => {
            let graph = load_graph(&edges)?;
            let ranking = detect(&graph, mode, c, BoundaryOverrides { thickness, depth })?;
            write_atomic(&out, ranking.to_tsv().as_bytes())
        }
        Command::Forest {
            kdata,
            modes,
            c,
            thickness,
            depth,
            out,
        } => {
            let sidecar = File::open(&modes)
                .with_context(|| format!("opening {}", modes.display()))?;
            let declared = read_mode_sidecar(BufReader::new(sidecar))
                .with_context(|| format!("reading mode sidecar {}", modes.display()))?;
            let table = File::open(&kdata)
                .with_context(|| format!("opening {}", kdata.display()))?;
            let data = KDataset::from_csv(BufReader::new(table), &declared)
                .with_context(|| format!("reading attribute table {}", kdata.display()))?;
            log::info!(
                "{}: {} rows, {} attributes",
                kdata.display(),
                data.num_rows(),
                data.dims().len()
            );
            let forest = build_forest(&data, c)?;
            let overrides = if thickness.is_some() || depth.is_some() {
                vec![BoundaryOverrides { thickness, depth }; data.dims().len()]
            } else {
                Vec::new()
            };
            let ranking = forest_scores(&forest, &overrides)?;
            write_atomic(&out, ranking.to_tsv().as_bytes())
        }
        Command::Inject {
            sources,
            targets,
            edge_prob,
            fraud_sources,
            fraud_targets,
            density,
            camouflage,
            camouflage_degree,
            seed,
            out,
            labels_out,
        } => {
            if camouflage == CamouflageArg::None && camouflage_degree > 0 {
                Cli::command()
                    .error(
                        clap::error::ErrorKind::ArgumentConflict,
                        "--camouflage-degree needs --camouflage sources or targets",
                    )
                    .exit();
            }
            let bg = gen_background(sources, targets, edge_prob, seed)?;
            log::info!("background: {} edges", bg.edge_count());
            let spec = InjectionSpec {
                fraud_sources,
                fraud_targets,
                density,
            };
            let lg = inject_group(&bg, &spec, seed.wrapping_add(1))?;
            let lg = match camouflage {
                CamouflageArg::None => lg,
                CamouflageArg::Sources => {
                    add_camouflage(&lg, CamouflageKind::Sources, camouflage_degree, seed.wrapping_add(2))?
                }
                CamouflageArg::Targets => {
                    add_camouflage(&lg, CamouflageKind::Targets, camouflage_degree, seed.wrapping_add(2))?
                }
            };
            log::info!("final graph: {} edges", lg.graph.edge_count());
            let mut edge_buf = Vec::new();
            lg.graph.write_edge_list(&mut edge_buf)?;
            write_atomic(&out, &edge_buf)?;
            // The edge-list format cannot carry isolated sources, so the
            // ground truth only covers sources a reader of `out` will see.
            let mut labels = lg.labels();
            labels.retain(|label, _| {
                lg.graph
                    .source_id(label)
                    .is_some_and(|n| lg.graph.source_degree(n) > 0)
            });
            let mut label_buf = Vec::new();
            write_labels(&mut label_buf, &labels)?;
            write_atomic(&labels_out, &label_buf)
        }
        Command::Eval { ranking, labels } => {
            let file = File::open(&ranking)
                .with_context(|| format!("opening {}", ranking.display()))?;
            let ranking = SuspiciousnessRanking::from_tsv(BufReader::new(file))?;
            let file = File::open(&labels)
                .with_context(|| format!("opening {}", labels.display()))?;
            let truth = read_labels(BufReader::new(file))?;
            let scored = join(&ranking, &truth)?;
            println!("auc\t{}", auc(&scored)?);
            println!("best_f1\t{}", best_f1(&scored)?);
            Ok(())
        }
        Command::Bench {
            edges,
            fractions,
            seed,
            reps,
            out,
        } => {
            let graph = load_graph(&edges)?;
            anyhow::ensure!(graph.edge_count() > 0, "graph has no edges to sample");
            let mut all = graph.edges();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            all.shuffle(&mut rng);
            let mut csv = String::from("edge_count,build_ms\n");
            for fraction in fractions.0 {
                let count = ((all.len() as f64) * fraction).round() as usize;
                let count = count.clamp(1, all.len());
                let mut b = GraphBuilder::new();
                for &(n, m) in &all[..count] {
                    b.add_edge(graph.source_label(n), graph.target_label(m));
                }
                let g = b.build();
                let mut best = f64::INFINITY;
                for _ in 0..reps {
                    let t0 = Instant::now();
                    let ranking = detect(&g, Mode::Arbg, 1.0, BoundaryOverrides::default())?;
                    best = best.min(t0.elapsed().as_secs_f64() * 1e3);
                    std::hint::black_box(ranking);
                }
                log::info!("{count} edges: {best:.3} ms");
                csv.push_str(&format!("{},{}\n", g.edge_count(), best));
            }
            write_atomic(&out, csv.as_bytes())
        }
    }
}

//! `protolife` command-line interface.

mod manifest;
mod render;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use manifest::{RunManifest, SnapshotEntry, MANIFEST_VERSION};
use protolife::config::SimConfig;
use protolife::engine::snapshot::{self, SNAPSHOT_VERSION};
use protolife::engine::stats::{StatsRow, STATS_COLUMNS, STATS_FORMAT_VERSION};
use protolife::engine::WorldState;
use protolife::rng::RNG_ALGORITHM;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const STATS_FILE: &str = "stats.csv";
const LINEAGE_FILE: &str = "lineage.csv";
const SNAPSHOT_DIR: &str = "snapshots";

#[derive(Parser)]
#[command(name = "protolife", version, about = "Deterministic protozoan ecosystem simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded simulation and write stats, snapshots and a manifest.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's master seed.
        #[arg(long, env = "PROTOLIFE_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, default_value = "run")]
        out: PathBuf,
        /// Steps between snapshots; 0 keeps only the first and last.
        #[arg(long, default_value_t = 1000)]
        snapshot_interval: u64,
        /// Overrides the config's stats interval.
        #[arg(long)]
        stats_interval: Option<u32>,
    },
    /// Restore a snapshot, re-simulate to the next one and compare.
    VerifyReplay {
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Snapshot to replay up to; defaults to the one after `index`.
        #[arg(long)]
        to: Option<usize>,
    },
    /// Draw a snapshot as a binary PPM image.
    Render {
        snapshot: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Pixels per metre.
        #[arg(long, default_value_t = 8.0)]
        render_scale: f64,
    },
    /// Summarise a run's stats and optionally export one series per metric.
    Stats {
        manifest: PathBuf,
        /// Directory for `<metric>.csv` series files.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Print the cells of a snapshot, or one cell and its genome.
    Dump {
        snapshot: PathBuf,
        #[arg(long)]
        cell: Option<u64>,
    },
    /// Print the default configuration as TOML.
    Config,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            seed,
            steps,
            out,
            snapshot_interval,
            stats_interval,
        } => {
            let cfg = load_config(config.as_deref(), seed, stats_interval)?;
            let m = run(cfg, steps, &out, snapshot_interval)?;
            println!(
                "wrote {} ({} snapshots, ticks {}..{})",
                out.display(),
                m.snapshots.len(),
                m.start_tick,
                m.end_tick
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyReplay { manifest, index, to } => verify_replay(&manifest, index, to.unwrap_or(index + 1)),
        Command::Render {
            snapshot,
            out,
            render_scale,
        } => {
            if !(render_scale > 0.0 && render_scale.is_finite()) {
                bail!("--render-scale must be positive");
            }
            let world = read_snapshot(&snapshot)?;
            let canvas = render::render(&world, render_scale);
            fs::write(&out, canvas.to_ppm()).with_context(|| format!("cannot write {}", out.display()))?;
            println!("wrote {} ({}x{})", out.display(), canvas.width, canvas.height);
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { manifest, series } => {
            stats_summary(&manifest, series.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dump { snapshot, cell } => {
            dump(&read_snapshot(&snapshot)?, cell)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Config => {
            print!("{}", SimConfig::default().to_text()?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_config(path: Option<&Path>, seed: Option<u64>, stats_interval: Option<u32>) -> Result<SimConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?;
            SimConfig::load(&text).with_context(|| format!("invalid config {}", p.display()))?
        }
        None => SimConfig::default(),
    };
    if let Some(s) = seed {
        cfg.run.master_seed = s;
    }
    if let Some(i) = stats_interval {
        cfg.run.stats_interval = i;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_snapshot(path: &Path) -> Result<WorldState> {
    let bytes = fs::read(path).with_context(|| format!("cannot read snapshot {}", path.display()))?;
    snapshot::decode(&bytes).with_context(|| format!("cannot restore {}", path.display()))
}

fn snapshot_name(tick: u64) -> String {
    format!("{SNAPSHOT_DIR}/tick_{tick:010}.snap")
}

fn write_snapshot(world: &WorldState, dir: &Path, entries: &mut Vec<SnapshotEntry>) -> Result<()> {
    let name = snapshot_name(world.tick);
    let bytes = snapshot::encode(world)?;
    fs::write(dir.join(&name), bytes).with_context(|| format!("cannot write {name}"))?;
    entries.push(SnapshotEntry {
        tick: world.tick,
        path: name,
    });
    Ok(())
}

fn stats_writer(path: &Path, cfg: &SimConfig) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# protolife stats format {STATS_FORMAT_VERSION}")?;
    for line in cfg.to_text()?.lines() {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STATS_COLUMNS)?;
    Ok(w)
}

fn run(cfg: SimConfig, steps: u64, out: &Path, snapshot_interval: u64) -> Result<RunManifest> {
    fs::create_dir_all(out.join(SNAPSHOT_DIR)).with_context(|| format!("cannot create {}", out.display()))?;
    let mut world = WorldState::new(cfg.clone())?;
    let mut stats = stats_writer(&out.join(STATS_FILE), &cfg)?;
    let mut lineage = csv::Writer::from_path(out.join(LINEAGE_FILE))?;
    lineage.write_record(["id", "parent", "generation", "birth_tick"])?;
    let mut snapshots = Vec::new();
    let start_tick = world.tick;
    write_snapshot(&world, out, &mut snapshots)?;
    for _ in 0..steps {
        let report = world.step();
        for b in &report.births {
            lineage.write_record([
                b.id.to_string(),
                b.parent.map(|p| p.to_string()).unwrap_or_default(),
                b.generation.to_string(),
                b.birth_tick.to_string(),
            ])?;
        }
        if let Some(row) = report.stats {
            stats.write_record(row.record())?;
            stats.flush()?;
        }
        if snapshot_interval > 0 && world.tick % snapshot_interval == 0 {
            write_snapshot(&world, out, &mut snapshots)?;
        }
    }
    if snapshots.last().is_some_and(|s| s.tick != world.tick) {
        write_snapshot(&world, out, &mut snapshots)?;
    }
    stats.flush()?;
    lineage.flush()?;
    let manifest = RunManifest {
        manifest_version: MANIFEST_VERSION,
        snapshot_version: SNAPSHOT_VERSION,
        stats_format_version: STATS_FORMAT_VERSION,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        master_seed: cfg.run.master_seed,
        start_tick,
        end_tick: world.tick,
        snapshot_interval,
        stats_path: STATS_FILE.to_string(),
        lineage_path: LINEAGE_FILE.to_string(),
        snapshots,
        config: cfg.to_text()?,
    };
    manifest.save(out)?;
    Ok(manifest)
}

/// Stats rows of a run, keyed by tick.
fn read_stats(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read stats {}", path.display()))?;
    let header = reader
        .headers()
        .with_context(|| format!("malformed stats {}", path.display()))?
        .clone();
    if header.iter().ne(STATS_COLUMNS.iter().copied()) {
        bail!("malformed stats {}: unexpected header", path.display());
    }
    reader
        .records()
        .map(|r| r.with_context(|| format!("malformed stats {}", path.display())))
        .collect()
}

fn verify_replay(path: &Path, index: usize, to: usize) -> Result<ExitCode> {
    let (manifest, dir) = RunManifest::load(path)?;
    if manifest.snapshot_version != SNAPSHOT_VERSION {
        bail!(
            "manifest records snapshot format {}, this build reads {SNAPSHOT_VERSION}; refusing to compare",
            manifest.snapshot_version
        );
    }
    if to <= index {
        bail!("target snapshot {to} must come after snapshot {index}");
    }
    let (Some(from), Some(next)) = (manifest.snapshots.get(index), manifest.snapshots.get(to)) else {
        bail!(
            "manifest lists {} snapshots; cannot replay {index} to {to}",
            manifest.snapshots.len()
        );
    };
    let mut world = read_snapshot(&dir.join(&from.path))?;
    let expected_bytes =
        fs::read(dir.join(&next.path)).with_context(|| format!("cannot read snapshot {}", next.path))?;
    let recorded = read_stats(&dir.join(&manifest.stats_path))?;
    let mut expected_rows = recorded.iter().filter(|r| {
        r.get(0)
            .and_then(|t| t.parse::<u64>().ok())
            .is_some_and(|t| t > from.tick && t <= next.tick)
    });
    while world.tick < next.tick {
        if let Some(row) = world.step().stats {
            let got = row.record();
            match expected_rows.next() {
                Some(want) if want.iter().eq(got.iter().map(String::as_str)) => {}
                _ => {
                    println!("FAIL: replay diverged from recorded stats at tick {}", row.tick);
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
    }
    let replayed = snapshot::encode(&world)?;
    if replayed != expected_bytes {
        let at = replayed
            .iter()
            .zip(&expected_bytes)
            .position(|(a, b)| a != b)
            .unwrap_or(replayed.len().min(expected_bytes.len()));
        println!(
            "FAIL: snapshot at tick {} differs after replay (first differing byte {at})",
            next.tick
        );
        return Ok(ExitCode::FAILURE);
    }
    println!("PASS: ticks {}..{} replay byte-identically", from.tick, next.tick);
    Ok(ExitCode::SUCCESS)
}

fn stats_summary(path: &Path, series: Option<&Path>) -> Result<()> {
    let (manifest, dir) = RunManifest::load(path)?;
    let rows = read_stats(&dir.join(&manifest.stats_path))?;
    println!(
        "{} rows, ticks {}..{}",
        rows.len(),
        manifest.start_tick,
        manifest.end_tick
    );
    if let Some(s) = series {
        fs::create_dir_all(s).with_context(|| format!("cannot create {}", s.display()))?;
    }
    for (c, name) in STATS_COLUMNS.iter().enumerate().skip(1) {
        let mut points = Vec::new();
        for r in &rows {
            let (Some(tick), Some(v)) = (r.get(0), r.get(c)) else {
                bail!("malformed stats row: {r:?}");
            };
            if v.is_empty() {
                continue;
            }
            let x: f64 = v
                .parse()
                .with_context(|| format!("malformed value {v:?} in column {name}"))?;
            points.push((tick.to_string(), x));
        }
        match summarise(points.iter().map(|p| p.1)) {
            Some((lo, mean, hi)) => println!("{name:<22} min {lo:<14.6} mean {mean:<14.6} max {hi:.6}"),
            None => println!("{name:<22} absent"),
        }
        if let Some(s) = series {
            let mut w = csv::Writer::from_path(s.join(format!("{name}.csv")))?;
            w.write_record(["tick", name])?;
            for (t, x) in &points {
                w.write_record([t.as_str(), x.to_string().as_str()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Minimum, mean and maximum; `None` for an empty series.
pub fn summarise(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64, f64)> {
    let (mut lo, mut hi, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
        n += 1;
    }
    (n > 0).then(|| (lo, sum / n as f64, hi))
}

fn dump(world: &WorldState, cell: Option<u64>) -> Result<()> {
    match cell {
        None => {
            let row: StatsRow = world.collect_stats();
            println!(
                "tick {} cells {} bindings {}",
                world.tick,
                world.cells.len(),
                world.bindings.len()
            );
            println!("mass {:.6} energy {:.6}", row.total_mass, row.total_energy);
            println!("id\tkind\tgen\tradius\thealth\tenergy\tmass\tx\ty");
            for c in world.cells.values() {
                let p = world.position(c.id).unwrap_or_default();
                println!(
                    "{}\t{:?}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.3}\t{:.3}",
                    c.id,
                    c.kind,
                    c.generation,
                    c.radius,
                    c.health,
                    c.stores.energy,
                    c.stores.mass(),
                    p.x,
                    p.y
                );
            }
        }
        Some(id) => {
            let Some(c) = world.cells.get(&id) else {
                bail!("no cell {id} at tick {}", world.tick);
            };
            println!(
                "cell {} {:?} generation {} parent {:?}",
                c.id, c.kind, c.generation, c.parent
            );
            println!("radius {:.6} health {:.6} age {:.3}", c.radius, c.health, c.age);
            println!(
                "energy {:.6} construction {:.6} plant food {:.6} meat food {:.6} molecules {:.6}",
                c.stores.energy,
                c.stores.construction_mass,
                c.stores.plant_food,
                c.stores.meat_food,
                c.stores.molecules.iter().sum::<f64>()
            );
            if let Some(p) = &c.proto {
                for n in &p.nodes {
                    let kind = n.kind().map(|k| k.name()).unwrap_or("bare");
                    println!(
                        "node {} angle {:.4} {kind} signature {:.4} control {:?}",
                        n.uid, n.angle, n.signature, n.control
                    );
                }
                print!("{}", p.genome);
            }
        }
    }
    Ok(())
}

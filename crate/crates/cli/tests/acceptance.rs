//! Acceptance suite. Runs every criterion in order and prints one line each.
//!
//! Criterion 11 is advisory: its line is printed but it never fails the run.
//! `PROTOLIFE_SOFT_SECONDS` sets its wall-clock budget (default 20).

use protolife::cell::Stores;
use protolife::chem::ChemGrid;
use protolife::config::{PhysicsConfig, SimConfig};
use protolife::engine::WorldState;
use protolife::evolution::child_genome;
use protolife::grn::{self, express, init_genome, mutate_genome, Channel, Genome, GrnState, Innovations, NeuronKind};
use protolife::ledger::Sink;
use protolife::lock::{
    advance_construction, critical_distance, cycle_distance, functional_potency, lattice_signature,
    matching_coefficient, AttachmentKind, KIND_COUNT,
};
use protolife::nodes::{can_engulf, EngulfQuery, SurfaceNode};
use protolife::physics::{Body, BodyId, PhysicsWorld, Vec2};
use protolife::rng::RngStream;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

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

// 1 ------------------------------------------------------------------------

/// Exact integer oracle. Signatures are `i/128` and `j/64`; function points
/// are `k/5`. Distances are counted in units of `1/640`.
fn lock_oracle(i: usize, j: usize) -> (usize, f64, f64) {
    let cyc = |d: i64, period: i64| {
        let d = d.rem_euclid(period);
        d.min(period - d)
    };
    let mut best = (usize::MAX, i64::MAX);
    for k in 0..KIND_COUNT {
        let d = cyc(5 * i as i64 - 128 * k as i64, 640);
        if d < best.1 {
            best = (k, d);
        }
    }
    let k_func = 1.0 - best.1 as f64 / 64.0;
    // |i/128 - j/64| in units of 1/128, against a critical distance of 1/10.
    let d = cyc(i as i64 - 2 * j as i64, 128) as f64 / 128.0;
    let k_match = if d >= 0.1 { 0.0 } else { (0.1 - d) / 0.1 };
    (best.0, k_func, k_match)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    let mut pairs = 0;
    for i in 0..128 {
        let s = lattice_signature(i, 128);
        let (k_func, kind) = functional_potency(s);
        for j in 0..64 {
            pairs += 1;
            let k_match = matching_coefficient(cycle_distance(j as f64 / 64.0, s), critical_distance(KIND_COUNT));
            let (want_kind, want_func, want_match) = lock_oracle(i, j);
            if kind.index() != want_kind || (k_func - want_func).abs() > 1e-12 || (k_match - want_match).abs() > 1e-12 {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(1),
        format!("{pairs} pairs, {mismatches} mismatches, {elapsed:.2?} (limit 1 s)"),
    )
}

// 2 ------------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let dc = critical_distance(KIND_COUNT);
    let mut ok = matching_coefficient(0.0, dc) == 1.0;
    for d in [dc, dc + 1e-9, 0.2, 0.5] {
        ok &= matching_coefficient(d, dc) == 0.0;
    }
    let mut rng = RngStream::from_master_seed(2).fork("endpoints");
    let mut bad = 0;
    for _ in 0..100_000 {
        let a = rng.uniform(-3.0, 3.0).rem_euclid(1.0);
        let b = rng.uniform(-3.0, 3.0).rem_euclid(1.0);
        let d = cycle_distance(a, b);
        if !(0.0..=0.5).contains(&d) || d != cycle_distance(b, a) {
            bad += 1;
        }
    }
    outcome(
        ok && bad == 0,
        format!("k_matching(0)=1 and k_matching(d>=1/(2T))=0: {ok}; 100000 distance trials, {bad} violations"),
    )
}

// 3 ------------------------------------------------------------------------

/// Genome with at most `limit` neurons and some hidden structure.
fn random_genome(rng: &mut RngStream, innov: &mut Innovations, limit: usize) -> Genome {
    let cfg = SimConfig::default();
    let mut grn_cfg = cfg.grn.clone();
    grn_cfg.p_add_neuron = 0.5;
    grn_cfg.p_add_connection = 0.9;
    grn_cfg.p_toggle_enable = 0.2;
    let nodes = 1 + rng.index(2);
    let mut g = init_genome(nodes, rng, &grn_cfg, innov).expect("nodes");
    for _ in 0..rng.index(12) {
        let next = mutate_genome(&g, rng, &grn_cfg, innov);
        if next.neurons.len() > limit {
            break;
        }
        g = next;
    }
    g
}

/// Dense reference: load inputs into `x`, then `y = tanh(W x)` for every
/// non-input row.
fn dense_tick(genome: &Genome, prev: &[f64], inputs: &BTreeMap<Channel, f64>) -> (Vec<f64>, Vec<f64>) {
    let n = genome.neurons.len();
    let index: BTreeMap<u32, usize> = genome.neurons.iter().enumerate().map(|(i, nr)| (nr.id, i)).collect();
    let mut w = vec![vec![0.0; n]; n];
    for c in genome.connections.iter().filter(|c| c.enabled) {
        w[index[&c.dst]][index[&c.src]] += c.weight;
    }
    let mut x = prev.to_vec();
    for (ch, id) in &genome.bindings {
        if !ch.is_input() {
            continue;
        }
        let v = match ch {
            Channel::Bias => 1.0,
            _ => match inputs.get(ch) {
                Some(v) if !v.is_nan() => v.clamp(-1.0, 1.0),
                _ => 0.0,
            },
        };
        x[index[id]] = v;
    }
    let z: Vec<f64> = (0..n).map(|r| (0..n).map(|c| w[r][c] * x[c]).sum()).collect();
    let y = (0..n)
        .map(|r| {
            if genome.neurons[r].kind == NeuronKind::Input {
                x[r]
            } else {
                z[r].tanh()
            }
        })
        .collect();
    (y, z)
}

fn criterion_3() -> Outcome {
    let mut rng = RngStream::from_master_seed(3).fork("grn-oracle");
    let mut innov = Innovations::default();
    let mut worst: f64 = 0.0;
    let mut largest = 0;
    for _ in 0..100 {
        let g = random_genome(&mut rng, &mut innov, 32);
        largest = largest.max(g.neurons.len());
        let mut state = GrnState {
            values: (0..g.neurons.len()).map(|_| rng.uniform(-1.0, 1.0)).collect(),
        };
        let mut reference = state.values.clone();
        for _ in 0..10 {
            let inputs: BTreeMap<Channel, f64> = g
                .bindings
                .keys()
                .filter(|c| c.is_input())
                .map(|c| (*c, rng.uniform(-1.5, 1.5)))
                .collect();
            let (next, raw) = grn::tick(&g, &state, &inputs);
            let (y, z) = dense_tick(&g, &reference, &inputs);
            for (a, b) in next.values.iter().zip(&y) {
                worst = worst.max((a - b).abs());
            }
            for (ch, v) in &raw {
                let i = g.neuron_index(g.bindings[ch]).unwrap();
                worst = worst.max((v - z[i]).abs());
            }
            state = next;
            reference = y;
        }
    }
    outcome(
        worst <= 1e-12 && largest <= 32,
        format!("100 genomes (largest {largest} neurons), 10 ticks each, max abs error {worst:.3e} (limit 1e-12)"),
    )
}

// 4 ------------------------------------------------------------------------

fn criterion_4() -> Outcome {
    let mut rng = RngStream::from_master_seed(4).fork("remap");
    let mut out_of_range = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..1_000_000 {
        let lo = rng.uniform(-10.0, 10.0);
        let w = rng.uniform(0.1, 10.0);
        let hi = lo + w;
        let x = rng.uniform(-50.0, 50.0);
        let k = rng.index(21) as f64 - 10.0;
        let a = grn::remap_cyclic(x, lo, hi);
        let b = grn::remap_cyclic(x + k * w, lo, hi);
        if !(a >= lo && a < hi && b >= lo && b < hi) {
            out_of_range += 1;
        }
        let d = (a - b).abs();
        worst = worst.max(d.min(w - d));
    }
    outcome(
        out_of_range == 0 && worst <= 1e-12,
        format!(
            "10^6 trials, |k| <= 10: {out_of_range} outside [lo, hi), max periodic error {worst:.3e} (limit 1e-12)"
        ),
    )
}

// 5 ------------------------------------------------------------------------

/// 64 cells in a small arena on a 256x256 grid.
fn desk_config(seed: u64) -> SimConfig {
    let mut cfg = SimConfig::default().with_seed(seed);
    cfg.world.world_radius = 12.0;
    cfg.world.n_plants = 40;
    cfg.world.n_protozoa = 24;
    cfg.world.n_formations = 3;
    cfg.chem.grid_size = 256;
    cfg.cell.max_plants = 100;
    cfg.run.stats_interval = 100;
    cfg
}

fn criterion_5() -> Outcome {
    let mut world = WorldState::new(desk_config(5)).expect("config");
    let start = Instant::now();
    let (mut mass, mut energy): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        if world.step().stats.is_some() {
            mass = mass.max(world.mass_residual());
            energy = energy.max(world.energy_residual());
        }
    }
    mass = mass.max(world.mass_residual());
    energy = energy.max(world.energy_residual());
    let elapsed = start.elapsed();
    let counts = world.collect_stats();
    outcome(
        mass <= 1e-6 && energy <= 1e-6 && elapsed < Duration::from_secs(60),
        format!(
            "10000 steps, worst residual mass {mass:.3e} energy {energy:.3e} (limit 1e-6), {elapsed:.1?} (target 60 s), end: {} protozoa {} plants",
            counts.protozoa, counts.plants
        ),
    )
}

// 6 ------------------------------------------------------------------------

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_protolife"))
        .args(args)
        .env_remove("PROTOLIFE_SEED")
        .output()
        .expect("spawn protolife")
}

fn criterion_6(dir: &Path) -> Outcome {
    let cfg = dir.join("desk.toml");
    fs::write(&cfg, desk_config(6).to_text().unwrap()).unwrap();
    let cfg = cfg.to_str().unwrap();
    let mut stats = Vec::new();
    for name in ["a", "b"] {
        let out = dir.join(name);
        let o = cli(&[
            "run",
            "--config",
            cfg,
            "--steps",
            "12000",
            "--snapshot-interval",
            "2000",
            "--out",
            out.to_str().unwrap(),
        ]);
        if !o.status.success() {
            return outcome(false, format!("run failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
        stats.push(fs::read(out.join("stats.csv")).unwrap());
    }
    let identical = stats[0] == stats[1] && !stats[0].is_empty();
    let o = cli(&[
        "verify-replay",
        dir.join("a").to_str().unwrap(),
        "--index",
        "1",
        "--to",
        "6",
    ]);
    let report = String::from_utf8_lossy(&o.stdout).trim().to_string();
    outcome(
        identical && o.status.success(),
        format!(
            "two 12000-step runs: stats byte-identical {identical} ({} bytes); replay 2000..12000: {report}",
            stats[0].len()
        ),
    )
}

// 7 ------------------------------------------------------------------------

/// Brute-force 3x3 box blur with void pixels treated as absorbing zeros.
fn blur_oracle(grid: &ChemGrid) -> Vec<[f64; 3]> {
    let n = grid.size();
    let arena =
        |i: i64, j: i64| i >= 0 && j >= 0 && i < n as i64 && j < n as i64 && grid.is_arena(i as usize, j as usize);
    let mut out = vec![[0.0; 3]; n * n];
    for j in 0..n as i64 {
        for i in 0..n as i64 {
            if !arena(i, j) {
                continue;
            }
            let mut acc = [0.0; 3];
            for dj in -1..=1 {
                for di in -1..=1 {
                    if arena(i + di, j + dj) {
                        let p = grid.get((i + di) as usize, (j + dj) as usize);
                        (0..3).for_each(|c| acc[c] += p[c]);
                    }
                }
            }
            out[j as usize * n + i as usize] = acc.map(|v| v / 9.0);
        }
    }
    out
}

fn fill_random(grid: &mut ChemGrid, rng: &mut RngStream) {
    let n = grid.size();
    for j in 0..n {
        for i in 0..n {
            grid.set(i, j, [rng.unit(), rng.unit(), rng.unit()]);
        }
    }
}

fn criterion_7() -> Outcome {
    let n = 32;
    let mut rng = RngStream::from_master_seed(7).fork("blur");
    let mut grid = ChemGrid::new(n, 1.0);
    fill_random(&mut grid, &mut rng);
    let oracle = blur_oracle(&grid);
    let total_before = grid.channel_sum();
    let total_oracle: f64 = oracle.iter().flatten().sum();
    let lost = grid.diffuse();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let got = grid.get(i, j);
            let want = oracle[j * n + i];
            (0..3).for_each(|c| worst = worst.max((got[c] - want[c]).abs()));
        }
    }
    let oracle_loss = total_before - total_oracle;
    let loss_err = (lost - oracle_loss).abs() / oracle_loss;
    let balance = (total_before - grid.channel_sum() - lost).abs() / total_before;

    // A bump far from the boundary keeps its sum.
    let mut bump = ChemGrid::new(n, 1.0);
    for (i, j) in [(15, 15), (16, 15), (15, 16), (16, 16)] {
        bump.set(i, j, [0.3, 0.6, 0.9]);
    }
    let s0 = bump.channel_sum();
    let bump_lost = bump.diffuse();
    let interior = (bump.channel_sum() - s0).abs() / s0;

    // Inside a world: the sink entry for one blur equals k * pixel area * the oracle loss.
    let mut cfg = SimConfig::default();
    cfg.world.world_radius = 3.0;
    cfg.world.n_plants = 0;
    cfg.world.n_protozoa = 0;
    cfg.world.n_formations = 0;
    cfg.chem.grid_size = n as u32;
    let mut world = WorldState::new(cfg).unwrap();
    fill_random(&mut world.chem, &mut rng);
    let world_oracle = blur_oracle(&world.chem);
    let want_sink = world.config.chem.k_chem
        * world.chem.pixel_area()
        * (world.chem.channel_sum() - world_oracle.iter().flatten().sum::<f64>());
    world.step();
    let sink = world.ledger.mass.sinks.get(&Sink::Diffusion).copied().unwrap_or(0.0);
    let sink_err = (sink - want_sink).abs() / want_sink;

    let pass = worst <= 1e-12
        && loss_err <= 1e-9
        && balance <= 1e-9
        && interior <= 1e-9
        && bump_lost == 0.0
        && sink_err <= 1e-9;
    outcome(
        pass,
        format!(
            "32x32 oracle max error {worst:.2e}; interior drift {interior:.2e}; boundary loss vs oracle {loss_err:.2e}; balance {balance:.2e}; world diffusion sink vs oracle {sink_err:.2e} (limit 1e-9)"
        ),
    )
}

// 8 ------------------------------------------------------------------------

/// Attachments developed by a genome under fixed inputs and ample stores.
fn develop(genome: &Genome, cfg: &SimConfig) -> Vec<(Option<AttachmentKind>, [f64; KIND_COUNT])> {
    let mut state = GrnState::new(genome);
    let mut nodes: Vec<SurfaceNode> = genome
        .unregulated
        .nodes
        .iter()
        .map(|n| SurfaceNode::new(n.uid, n.angle))
        .collect();
    let mut stores = Stores::empty(cfg.grn.molecule_count as usize);
    stores.construction_mass = 1e6;
    stores.energy = 1e6;
    stores.molecules.iter_mut().for_each(|q| *q = 50.0);
    let inputs: BTreeMap<Channel, f64> = genome
        .bindings
        .keys()
        .filter(|c| c.is_input())
        .enumerate()
        .map(|(i, c)| (*c, ((i as f64) * 0.37).sin()))
        .collect();
    let dt = cfg.run.physics_dt;
    for step in 0..400 {
        if step % cfg.run.grn_tick_interval as usize == 0 {
            let (next, raw) = grn::tick(genome, &state, &inputs);
            state = next;
            let e = express(genome, &raw, cfg);
            for (n, x) in nodes.iter_mut().zip(&e.nodes) {
                n.control = x.control;
                n.signature = x.signature;
            }
        }
        for n in nodes.iter_mut().filter(|n| n.attachment.is_none()) {
            let s = advance_construction(
                &mut n.progress,
                n.signature,
                &mut stores.construction_mass,
                &mut stores.energy,
                &mut stores.molecules,
                dt,
                &cfg.nodes,
            );
            if s.completed {
                n.complete(s.kind.unwrap());
            }
        }
    }
    nodes.iter().map(|n| (n.kind(), n.progress)).collect()
}

fn criterion_8() -> Outcome {
    let mut cfg = SimConfig::default();
    let (g, e) = (&mut cfg.grn, &mut cfg.evolution);
    g.p_weight_perturb = 0.0;
    g.p_weight_reset = 0.0;
    g.p_add_connection = 0.0;
    g.p_add_neuron = 0.0;
    g.p_toggle_enable = 0.0;
    e.p_node_add = 0.0;
    e.p_node_del = 0.0;
    e.p_node_angle = 0.0;
    e.p_colour = 0.0;
    let mut rng = RngStream::from_master_seed(8).fork("heritability");
    let mut innov = Innovations::default();
    let mut checked = 0;
    let mut differ = 0;
    let mut built = 0;
    for _ in 0..10 {
        let ancestor = random_genome(&mut rng, &mut innov, 64);
        let phenotype = develop(&ancestor, &cfg);
        built += phenotype.iter().filter(|p| p.0.is_some()).count();
        let mut generation = vec![ancestor.clone()];
        for _ in 0..5 {
            let mut next = Vec::new();
            for parent in &generation {
                for _ in 0..2 {
                    next.push(child_genome(parent, &mut rng, &cfg, &mut innov));
                }
            }
            for child in &next {
                checked += 1;
                let same_nodes = child.unregulated == ancestor.unregulated;
                if !same_nodes || *child != ancestor || develop(child, &cfg) != phenotype {
                    differ += 1;
                }
            }
            generation = next;
        }
    }
    outcome(
        differ == 0 && built > 0,
        format!("10 lineages x 5 generations, {checked} offspring, {differ} differ from their ancestor ({built} ancestral attachments built)"),
    )
}

// 9 ------------------------------------------------------------------------

fn criterion_9() -> Outcome {
    let cfg = SimConfig::default().nodes;
    let mut rng = RngStream::from_master_seed(9).fork("engulf");
    let (mut over, mut admitted, mut wrong) = (0, 0, 0);
    for _ in 0..200_000 {
        let predator_area = rng.uniform(0.01, 10.0);
        let engulfed_area = rng.uniform(0.0, predator_area);
        let prey_area = rng.uniform(1e-4, predator_area);
        let permitted = rng.chance(0.7);
        let receptor_angle = rng.uniform(-TAU, TAU);
        let prey_direction = rng.uniform(-TAU, TAU);
        let total = engulfed_area + prey_area;
        let limit = 0.8 * predator_area;
        let diff = (prey_direction - receptor_angle)
            .sin()
            .atan2((prey_direction - receptor_angle).cos())
            .abs();
        let half = 0.5 * cfg.phago_cone_deg.to_radians();
        if (total - limit).abs() < 1e-9 * limit || (diff - half).abs() < 1e-9 {
            continue;
        }
        let q = EngulfQuery {
            predator_area,
            engulfed_area,
            prey_area,
            permitted,
            receptor_angle,
            prey_direction,
        };
        let got = can_engulf(&q, &cfg);
        if total > limit {
            over += 1;
            wrong += usize::from(got);
        } else if permitted && diff <= half {
            admitted += 1;
            wrong += usize::from(!got);
        } else {
            wrong += usize::from(got);
        }
    }
    let exact = can_engulf(
        &EngulfQuery {
            predator_area: 1.25,
            engulfed_area: 0.5,
            prey_area: 0.5,
            permitted: true,
            receptor_angle: 0.0,
            prey_direction: 0.0,
        },
        &cfg,
    );
    outcome(
        wrong == 0 && exact && over > 0 && admitted > 0,
        format!("{over} over-capacity requests, {admitted} admissible requests, {wrong} wrong decisions; exactly 80% accepted: {exact}"),
    )
}

// 10 -----------------------------------------------------------------------

/// Drag force on the first cell of a bound pair moving at `velocity`.
fn measured_drag(r: f64, angle: f64, velocity: Vec2, cfg: &PhysicsConfig) -> f64 {
    let mut world = PhysicsWorld::new();
    let axis = Vec2::from_angle(angle);
    let a = Vec2::new(0.3, -0.2);
    let b = a + axis * (2.0 * r + cfg.joint_gap);
    for (id, p) in [(1, a), (2, b)] {
        let mut body = Body::disc(BodyId(id), p, r, cfg.density, [1.0; 3]);
        body.velocity = velocity;
        world.add_body(body);
    }
    world.add_joint(BodyId(1), BodyId(2), cfg).expect("joint");
    let dt = 1e-3;
    let before = world.body(BodyId(1)).unwrap().velocity;
    world.step(dt, cfg);
    let body = world.body(BodyId(1)).unwrap();
    body.mass * (before - body.velocity).length() / dt
}

fn criterion_10() -> Outcome {
    let cfg = SimConfig::default().physics;
    let mut rng = RngStream::from_master_seed(10).fork("drag");
    let mut wins = 0;
    let mut ratio_sum = 0.0;
    for _ in 0..100 {
        let r = rng.uniform(0.1, 1.0);
        let angle = rng.uniform(0.0, TAU);
        let speed = rng.uniform(0.1, 3.0);
        let axis = Vec2::from_angle(angle);
        let parallel = measured_drag(r, angle, axis * speed, &cfg);
        let perpendicular = measured_drag(r, angle, axis.perp() * speed, &cfg);
        if parallel > perpendicular {
            wins += 1;
        }
        ratio_sum += perpendicular / parallel;
    }
    outcome(
        wins == 100,
        format!(
            "{wins}/100 trials with parallel drag above perpendicular (mean perpendicular/parallel {:.3})",
            ratio_sum / 100.0
        ),
    )
}

// 11 -----------------------------------------------------------------------

fn criterion_11() -> Outcome {
    let budget: u64 = std::env::var("PROTOLIFE_SOFT_SECONDS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let mut world = WorldState::new(desk_config(11)).expect("config");
    let at_start = world.collect_stats();
    let start = Instant::now();
    let mut first_sample = None;
    while start.elapsed() < Duration::from_secs(budget) {
        if let Some(s) = world.step().stats {
            first_sample.get_or_insert(s.frequency[AttachmentKind::Phagoreceptor.index()]);
        }
    }
    let end = world.collect_stats();
    let phago = AttachmentKind::Phagoreceptor.index();
    outcome(
        end.frequency[phago] > at_start.frequency[phago],
        format!(
            "{budget} s budget, {} steps: phagoreceptors per protozoan {:.3} at start, {:.3} at first sample, {:.3} at end ({} protozoa, max generation {})",
            world.tick,
            at_start.frequency[phago],
            first_sample.unwrap_or(f64::NAN),
            end.frequency[phago],
            end.protozoa,
            end.max_generation
        ),
    )
}

fn main() {
    let dir = std::env::temp_dir().join(format!("protolife-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    type Check<'a> = (u32, &'a str, bool, Box<dyn Fn() -> Outcome + 'a>);
    let checks: Vec<Check> = vec![
        (1, "lock-and-key exactness", true, Box::new(criterion_1)),
        (2, "matching endpoints and cyclic distance", true, Box::new(criterion_2)),
        (3, "GRN dense-matrix equivalence", true, Box::new(criterion_3)),
        (4, "cyclic remap algebra", true, Box::new(criterion_4)),
        (5, "conservation ledger", true, Box::new(criterion_5)),
        (6, "determinism and replay", true, Box::new(|| criterion_6(&dir))),
        (7, "diffusion conservation", true, Box::new(criterion_7)),
        (8, "heritability without mutation", true, Box::new(criterion_8)),
        (9, "engulfment capacity", true, Box::new(criterion_9)),
        (10, "drag anisotropy", true, Box::new(criterion_10)),
        (11, "phagoreceptor trend (advisory)", false, Box::new(criterion_11)),
    ];
    let mut failed = Vec::new();
    for (id, name, gating, check) in &checks {
        let o = check();
        let tag = match (o.pass, gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "SOFT-FAIL",
        };
        println!("[{tag}] criterion {id:>2} {name}: {}", o.detail);
        if !o.pass && *gating {
            failed.push(*id);
        }
    }
    let _ = fs::remove_dir_all(&dir);
    if failed.is_empty() {
        println!("acceptance: all gating criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

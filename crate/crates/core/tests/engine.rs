use protolife::config::SimConfig;
use protolife::engine::snapshot::SnapshotError;
use protolife::engine::{snapshot, WorldState};

fn small(seed: u64) -> SimConfig {
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

#[test]
fn short_run_keeps_invariants_and_ledger() {
    let mut w = WorldState::new(small(3)).unwrap();
    let mut births = 0;
    let mut deaths = 0;
    for _ in 0..10000 {
        let r = w.step();
        births += r.births.len();
        deaths += r.deaths.len();
        w.check_invariants().unwrap();
        if let Some(s) = r.stats {
            assert!(s.mass_residual <= 1e-6 && s.energy_residual <= 1e-6, "tick {}", s.tick);
        }
    }
    assert!(births > 0 && deaths > 0);
    assert!(w.mass_residual() <= 1e-6, "mass {}", w.mass_residual());
    assert!(w.energy_residual() <= 1e-6, "energy {}", w.energy_residual());
}

#[test]
fn same_seed_same_world() {
    let mut a = WorldState::new(small(9)).unwrap();
    let mut b = WorldState::new(small(9)).unwrap();
    let mut c = WorldState::new(small(10)).unwrap();
    for _ in 0..500 {
        let (ra, rb) = (a.step(), b.step());
        assert_eq!(ra, rb);
        c.step();
    }
    assert_eq!(snapshot::encode(&a).unwrap(), snapshot::encode(&b).unwrap());
    assert_ne!(a, c);
}

#[test]
fn restored_snapshot_continues_identically() {
    let mut w = WorldState::new(small(4)).unwrap();
    for _ in 0..300 {
        w.step();
    }
    let mut copy = snapshot::decode(&snapshot::encode(&w).unwrap()).unwrap();
    for _ in 0..300 {
        assert_eq!(w.step(), copy.step());
    }
    assert_eq!(w, copy);
}

#[test]
fn snapshot_round_trip() {
    let mut w = WorldState::new(small(5)).unwrap();
    for _ in 0..50 {
        w.step();
    }
    let bytes = snapshot::encode(&w).unwrap();
    let back = snapshot::decode(&bytes).unwrap();
    assert_eq!(back, w);
    assert_eq!(snapshot::read_header(&bytes).unwrap().tick, 50);
}

#[test]
fn damaged_snapshots_are_refused() {
    let w = WorldState::new(small(6)).unwrap();
    let bytes = snapshot::encode(&w).unwrap();

    let mut flipped = bytes.clone();
    let last = flipped.len() - 1;
    flipped[last] ^= 0x40;
    assert!(matches!(snapshot::decode(&flipped), Err(SnapshotError::Checksum)));

    assert!(matches!(
        snapshot::decode(&bytes[..bytes.len() / 2]),
        Err(SnapshotError::Truncated | SnapshotError::Checksum)
    ));

    let mut magic = bytes.clone();
    magic[0] ^= 0xff;
    assert!(matches!(snapshot::decode(&magic), Err(SnapshotError::Magic)));
}

#[test]
fn empty_world_only_diffuses() {
    let mut cfg = small(7);
    cfg.world.n_plants = 0;
    cfg.world.n_protozoa = 0;
    let mut w = WorldState::new(cfg).unwrap();
    for _ in 0..200 {
        let r = w.step();
        assert!(r.births.is_empty() && r.deaths.is_empty());
    }
    assert!(w.cells.is_empty());
    assert_eq!(w.total_mass(), 0.0);
    assert_eq!(w.mass_residual(), 0.0);
}

#[test]
fn plants_alone_stay_under_the_cap() {
    let mut cfg = small(8);
    cfg.world.n_protozoa = 0;
    cfg.cell.max_plants = 60;
    let mut w = WorldState::new(cfg).unwrap();
    for _ in 0..3000 {
        w.step();
        assert!(w.collect_stats().plants <= 60);
    }
    w.check_invariants().unwrap();
    assert!(w.mass_residual() <= 1e-9);
}

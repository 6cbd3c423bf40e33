//! Hand-built box models used by the tests, the acceptance suite and the
//! examples: a desk-scale scene plus simplified airport and office-campus
//! sites with the published weights and sensor data.

use crate::scenario::{Corners, Scenario, SceneBuilder};
use crate::Result;

/// Clearance between a mounting zone and the structure carrying it, so a
/// mounted sensor keeps its Fresnel zone free.
const MOUNT_GAP: f64 = 5.0;
const MOUNT_DEPTH: f64 = 2.0;

fn qualities(b: SceneBuilder) -> SceneBuilder {
    b.quality("q0", 25.0, 155.0).quality("q1", 30.0, 150.0)
}

/// Roof and wall mounting zones of a box, with their costs.
fn mounts(o: &Corners, roof: f64, wall: f64) -> Vec<(Corners, f64)> {
    let ([x0, y0, z0], [x1, y1, z1]) = *o;
    let (g, d) = (MOUNT_GAP, MOUNT_GAP + MOUNT_DEPTH);
    let (lo, hi) = (z0 + g, z1);
    let mut v = vec![(([x0, y0, z1 + g], [x1, y1, z1 + d]), roof)];
    if hi > lo {
        v.push((([x0 - d, y0, lo], [x0 - g, y1, hi]), wall));
        v.push((([x1 + g, y0, lo], [x1 + d, y1, hi]), wall));
        v.push((([x0, y0 - d, lo], [x1, y0 - g, hi]), wall));
        v.push((([x0, y1 + g, lo], [x1, y1 + d, hi]), wall));
    }
    v
}

/// 100 × 100 × 20 m box with one 20 × 20 × 10 m block in the middle and four
/// identical sensors, placeable on the ground or on the block's roof.
pub fn desk() -> Result<Scenario> {
    let block: Corners = ([40.0, 40.0, 0.0], [60.0, 60.0, 10.0]);
    let zones = [
        (([40.0, 40.0, 10.5], [60.0, 60.0, 12.0]), 1.2),
        (([0.0, 0.0, 0.0], [100.0, 100.0, 2.0]), 1.0),
    ];
    let mut b = qualities(SceneBuilder::new())
        .roi_box([0.0, 0.0, 0.0], [100.0, 100.0, 20.0])
        .obstacle(block.0, block.1)
        .faults(1);
    for i in 1..=4 {
        b = b.sensor_zones(&format!("s{i}"), "T1", &zones, &[(80.0, 0.5), (70.0, 0.5)]);
    }
    // an uncovered cubic metre costs a few thousandths of a sensor
    for (j, q, w) in [(0, 0, 4e-4), (0, 1, 2e-4), (1, 0, 2e-4), (1, 1, 1e-4)] {
        b = b.weight(j, q, "all", w);
    }
    b.build()
}

/// Published weights of the airport site as `(j, q, priority, w)`.
pub const FCO_WEIGHTS: [(usize, usize, &str, f64); 8] = [
    (0, 0, "low", 10.0),
    (0, 0, "high", 15.0),
    (0, 1, "low", 15.0),
    (0, 1, "high", 20.0),
    (1, 0, "low", 0.0),
    (1, 0, "high", 1.0),
    (1, 1, "low", 0.0),
    (1, 1, "high", 1.0),
];

/// Published weights of the office-campus site as `(j, q, priority, w)`.
pub const VIC_WEIGHTS: [(usize, usize, &str, f64); 8] = [
    (0, 0, "low", 5.0),
    (0, 0, "high", 7.0),
    (1, 0, "low", 5.0),
    (1, 0, "high", 7.0),
    (0, 1, "low", 0.5),
    (0, 1, "high", 1.0),
    (1, 1, "low", 1.0),
    (1, 1, "high", 2.0),
];

const FCO_SIDE: f64 = 4000.0;
const FCO_HEIGHT: f64 = 100.0;
const RUNWAYS: [(f64, f64); 3] = [(500.0, 700.0), (1900.0, 2100.0), (3300.0, 3500.0)];
const FCO_BANDS: [(f64, f64); 4] = [(0.0, 500.0), (700.0, 1900.0), (2100.0, 3300.0), (3500.0, 4000.0)];

/// The 52 airport buildings: terminals, a control tower, hangars and
/// service buildings, all off the runways.
pub fn fco_buildings() -> Vec<Corners> {
    let mut v = Vec::with_capacity(52);
    for x in [300.0, 900.0, 2300.0, 2900.0] {
        v.push(([x, 1000.0, 0.0], [x + 300.0, 1150.0, 30.0]));
    }
    v.push(([1990.0, 1490.0, 0.0], [2010.0, 1510.0, 80.0]));
    for i in 0..8 {
        let x = 200.0 + 450.0 * i as f64;
        v.push(([x, 2400.0, 0.0], [x + 150.0, 2500.0, 25.0]));
    }
    for i in 0..39 {
        let (row, col) = if i < 20 { (200.0, i) } else { (3700.0, i - 20) };
        let x = 100.0 + 190.0 * col as f64;
        let h = 6.0 + 2.0 * (i % 4) as f64;
        v.push(([x, row, 0.0], [x + 30.0, row + 20.0, h]));
    }
    v
}

/// Simplified airport: 4 × 4 km, 100 m high RoI of 11 boxes, three
/// high-priority runway corridors, 52 buildings and `t1` + `t2` sensors.
///
/// Sensors go on the ground off the runways, or on building walls and
/// roofs at 10% and 20% overhead; the control tower carries none.
pub fn fco(t1: usize, t2: usize) -> Result<Scenario> {
    let mut b = qualities(SceneBuilder::new()).faults(1);
    let mut low = Vec::new();
    for (y0, y1) in FCO_BANDS {
        for (x0, x1) in [(0.0, FCO_SIDE / 2.0), (FCO_SIDE / 2.0, FCO_SIDE)] {
            low.push(([x0, y0, 0.0], [x1, y1, FCO_HEIGHT]));
        }
    }
    let high: Vec<Corners> = RUNWAYS
        .iter()
        .map(|&(y0, y1)| ([0.0, y0, 0.0], [FCO_SIDE, y1, FCO_HEIGHT]))
        .collect();
    for r in low.iter().chain(&high) {
        b = b.roi_box(r.0, r.1);
    }
    b = b.priority("low", &low).priority("high", &high);
    let buildings = fco_buildings();
    for o in &buildings {
        b = b.obstacle(o.0, o.1);
    }
    for (j, q, h, w) in FCO_WEIGHTS {
        b = b.weight(j, q, h, w);
    }
    let zones = |base: f64| {
        let mut z: Vec<(Corners, f64)> = Vec::new();
        for (i, o) in buildings.iter().enumerate() {
            // index 4 is the control tower
            if i != 4 {
                z.extend(mounts(o, 1.2 * base, 1.1 * base));
            }
        }
        for (y0, y1) in FCO_BANDS {
            z.push((([0.0, y0, 0.0], [FCO_SIDE, y1, 2.0]), base));
        }
        z
    };
    let (z1, z2) = (zones(1.0), zones(1.5));
    for i in 0..t1 {
        b = b.sensor_zones(&format!("t1-{}", i + 1), "T1", &z1, &[(1000.0, 5.0), (900.0, 5.0)]);
    }
    for i in 0..t2 {
        b = b.sensor_zones(&format!("t2-{}", i + 1), "T2", &z2, &[(1250.0, 5.0), (1110.0, 5.0)]);
    }
    b.build()
}

const VIC_SIDE: f64 = 400.0;
/// Tower heights, anticlockwise from the east.
const TOWERS: [f64; 6] = [120.0, 100.0, 100.0, 80.0, 80.0, 60.0];

/// Tower cores and wings (three boxes per tower), the conference building
/// and 30 low buildings: 51 boxes. The first six are the tower cores.
pub fn vic_buildings() -> Vec<Corners> {
    let mut cores = Vec::new();
    let mut rest = Vec::new();
    for (i, h) in TOWERS.iter().enumerate() {
        let a = std::f64::consts::PI / 3.0 * i as f64;
        let (cx, cy) = ((200.0 + 90.0 * a.cos()).round(), (200.0 + 90.0 * a.sin()).round());
        cores.push(([cx - 8.0, cy - 8.0, 0.0], [cx + 8.0, cy + 8.0, *h]));
        rest.push(([cx + 8.0, cy - 5.0, 0.0], [cx + 33.0, cy + 5.0, h - 10.0]));
        rest.push(([cx - 5.0, cy + 8.0, 0.0], [cx + 5.0, cy + 33.0, h - 10.0]));
    }
    rest.push(([300.0, 300.0, 0.0], [340.0, 340.0, 25.0]));
    rest.push(([340.0, 300.0, 0.0], [380.0, 320.0, 20.0]));
    rest.push(([300.0, 340.0, 0.0], [320.0, 380.0, 20.0]));
    for i in 0..15 {
        let x = 20.0 + 24.0 * i as f64;
        rest.push(([x, 20.0, 0.0], [x + 8.0, 35.0, 10.0]));
        rest.push(([x, 385.0, 0.0], [x + 8.0, 395.0, 12.0]));
    }
    cores.extend(rest);
    cores
}

/// Simplified office campus: 400 m cube RoI with a high-priority core
/// around six towers, 51 buildings and `t1` + `t2` sensors.
///
/// All sensors go on the ground; T2 also on the tower cores' concrete
/// walls and roofs at 10% and 5% overhead.
pub fn vic(t1: usize, t2: usize) -> Result<Scenario> {
    let s = VIC_SIDE;
    let high: Vec<Corners> = vec![([100.0, 100.0, 0.0], [300.0, 300.0, s])];
    let low: Vec<Corners> = vec![
        ([0.0, 0.0, 0.0], [s, 100.0, s]),
        ([0.0, 300.0, 0.0], [s, s, s]),
        ([0.0, 100.0, 0.0], [100.0, 300.0, s]),
        ([300.0, 100.0, 0.0], [s, 300.0, s]),
    ];
    let mut b = qualities(SceneBuilder::new())
        .faults(1)
        .priority("low", &low)
        .priority("high", &high);
    for r in low.iter().chain(&high) {
        b = b.roi_box(r.0, r.1);
    }
    let buildings = vic_buildings();
    for o in &buildings {
        b = b.obstacle(o.0, o.1);
    }
    for (j, q, h, w) in VIC_WEIGHTS {
        b = b.weight(j, q, h, w);
    }
    let ground = (([0.0, 0.0, 0.0], [s, s, 2.0]), 1.0);
    for i in 0..t1 {
        b = b.sensor_zones(&format!("t1-{}", i + 1), "T1", &[ground], &[(500.0, 5.0), (400.0, 5.0)]);
    }
    let mut z2: Vec<(Corners, f64)> = Vec::new();
    for o in &buildings[..TOWERS.len()] {
        z2.extend(mounts(o, 1.17 * 1.05, 1.17 * 1.10));
    }
    z2.push((ground.0, 1.17));
    for i in 0..t2 {
        b = b.sensor_zones(&format!("t2-{}", i + 1), "T2", &z2, &[(700.0, 5.0), (600.0, 5.0)]);
    }
    b.build()
}

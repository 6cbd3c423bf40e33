use covertool::fixtures::{self, fco_buildings, vic_buildings};
use covertool::geom::Vec3;
use covertool::scenario::{Deployment, SceneBuilder};

fn box_volume(b: &([f64; 3], [f64; 3])) -> f64 {
    (0..3).map(|i| b.1[i] - b.0[i]).product()
}

#[test]
fn airport_volumes_and_counts() {
    let sc = fixtures::fco(13, 3).unwrap();
    assert!((sc.roi_volume() / 1.6e9 - 1.0).abs() < 0.01, "{}", sc.roi_volume());
    assert_eq!(sc.sensors.len(), 16);
    let obstacles: f64 = fco_buildings().iter().map(box_volume).sum();
    let free = sc.free_space().volume();
    assert!((free - (1.6e9 - obstacles)).abs() < 1e-6 * 1.6e9, "{free}");
    // runway corridors of 3 × 4000 × 200 × 100
    let high = sc.priority_index("high").unwrap();
    assert!((sc.priorities[high].region.volume() - 2.4e8).abs() < 1.0);
}

#[test]
fn campus_volumes_and_counts() {
    let sc = fixtures::vic(4, 3).unwrap();
    assert_eq!(sc.roi_volume(), 6.4e7);
    assert_eq!(sc.sensors.len(), 7);
    let obstacles: f64 = vic_buildings().iter().map(box_volume).sum();
    let free = sc.free_space().volume();
    assert!((free - (6.4e7 - obstacles)).abs() < 1e-6 * 6.4e7, "{free} {obstacles}");
}

#[test]
fn fixture_buildings_do_not_overlap() {
    for set in [fco_buildings(), vic_buildings()] {
        for (i, a) in set.iter().enumerate() {
            for b in &set[i + 1..] {
                let disjoint = (0..3).any(|k| a.1[k] <= b.0[k] || b.1[k] <= a.0[k]);
                assert!(disjoint, "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn airport_placement_costs() {
    let sc = fixtures::fco(13, 3).unwrap();
    let mut d = Deployment::new();
    for i in 0..13 {
        d = d.with(format!("t1-{}", i + 1), Vec3::new(100.0 + 250.0 * i as f64, 100.0, 1.0));
    }
    for i in 0..3 {
        d = d.with(format!("t2-{}", i + 1), Vec3::new(100.0 + 250.0 * i as f64, 3800.0, 1.0));
    }
    assert_eq!(sc.placement_cost(&d).unwrap(), 13.0 + 4.5);

    // on a terminal roof, beside a terminal wall, on the tower, on a runway
    let one = |p: Vec3| sc.placement_cost(&Deployment::new().with("t1-1", p));
    assert!((one(Vec3::new(400.0, 1100.0, 36.0)).unwrap() - 1.2).abs() < 1e-12);
    assert!((one(Vec3::new(294.0, 1100.0, 20.0)).unwrap() - 1.1).abs() < 1e-12);
    assert!(one(Vec3::new(2000.0, 1500.0, 86.0)).is_err());
    assert!(one(Vec3::new(1000.0, 600.0, 1.0)).is_err());
}

#[test]
fn campus_mounts_belong_to_t2_only() {
    let sc = fixtures::vic(4, 3).unwrap();
    // roof of the tallest tower core at (290, 200)
    let roof = Vec3::new(290.0, 200.0, 126.0);
    assert!(sc.placement_cost(&Deployment::new().with("t1-1", roof)).is_err());
    let c = sc.placement_cost(&Deployment::new().with("t2-1", roof)).unwrap();
    assert!((c - 1.17 * 1.05).abs() < 1e-12);
    let g = sc.placement_cost(&Deployment::new().with("t2-1", Vec3::new(50.0, 50.0, 1.0))).unwrap();
    assert!((g - 1.17).abs() < 1e-12);
}

#[test]
fn overlapping_priorities_are_rejected() {
    let r = SceneBuilder::new()
        .roi_box([0.0, 0.0, 0.0], [10.0, 10.0, 10.0])
        .quality("q0", 30.0, 150.0)
        .priority("low", &[([0.0, 0.0, 0.0], [6.0, 10.0, 10.0])])
        .priority("high", &[([5.0, 0.0, 0.0], [10.0, 10.0, 10.0])])
        .build();
    assert!(r.unwrap_err().to_string().contains("overlap"));
}

#[test]
fn desk_weights_make_sensors_worth_placing() {
    let sc = fixtures::desk().unwrap();
    // leaving the whole free space uncovered costs far more than four sensors
    let free = sc.free_space().volume();
    let w: f64 = [4e-4, 2e-4, 2e-4, 1e-4].iter().sum();
    assert!((free / 196_000.0 - 1.0).abs() < 1e-6);
    assert!(w * free > 10.0 * 4.8);
}

use std::time::Instant;

use proptest::prelude::*;
use softopt_fem::measure::check_closed;
use softopt_fem::{rest_cavity_volume, solve_static, ActuationSpec, MaterialParams};
use softopt_finger::{
    build_finger, default_bounds, evaluate_pressure_objectives, Error, FingerDesign, FingerGlobals, FingerModel,
    MeshingSpec, Problem,
};

fn model(nodes: usize) -> FingerModel {
    FingerModel {
        meshing: MeshingSpec::new(nodes),
        ..FingerModel::default()
    }
}

fn mid() -> FingerDesign {
    FingerDesign::new([5.0, 4.5, 3.5, 3.0, 45.0, 2.0, 2.25])
}

#[test]
fn presets_mesh_into_closed_cavities() {
    for d in [FingerDesign::slim(), FingerDesign::large(), mid()] {
        let mesh = build_finger(&d, &MeshingSpec::default()).unwrap();
        mesh.validate().unwrap();
        assert_eq!(mesh.cavities.len(), 3);
        for (c, cavity) in mesh.cavities.iter().enumerate() {
            check_closed(c, &cavity.triangles).unwrap();
            assert!(rest_cavity_volume(&mesh, c).unwrap() > 0.0);
        }
    }
}

#[test]
fn wall_at_half_the_width_is_rejected() {
    let mut d = FingerDesign::large();
    d.wall_thickness = FingerGlobals::default().width / 2.0;
    match build_finger(&d, &MeshingSpec::default()) {
        Err(Error::Infeasible { clearance, .. }) => assert_eq!(clearance, "side wall"),
        other => panic!(
            "expected an infeasibility error, got {:?}",
            other.map(|m| m.node_count())
        ),
    }
}

#[test]
fn other_clearances_are_named() {
    let mut long = FingerDesign::large();
    long.cork_thickness = 20.0;
    assert!(matches!(
        long.validate(),
        Err(Error::Infeasible {
            clearance: "length",
            ..
        })
    ));
    let mut steep = FingerDesign::large();
    steep.joint_slope_angle = 85.0;
    assert!(matches!(
        steep.validate(),
        Err(Error::Infeasible {
            clearance: "slope angle",
            ..
        })
    ));
    let mut flat = FingerDesign::large();
    flat.plateau_height = 8.0;
    assert!(matches!(
        flat.validate(),
        Err(Error::Infeasible {
            clearance: "plateau height",
            ..
        })
    ));
}

#[test]
fn unreachable_node_target_reports_the_range() {
    match build_finger(&mid(), &MeshingSpec::new(1_000_000_000)) {
        Err(Error::NodeTarget { min, max, .. }) => assert!(min < max),
        Err(e) => panic!("expected a node-target error, got {e}"),
        Ok(m) => panic!("expected a node-target error, got {} nodes", m.node_count()),
    }
    assert!(matches!(
        build_finger(&mid(), &MeshingSpec::new(50)),
        Err(Error::InvalidMeshing(_))
    ));
}

#[test]
fn rest_volumes_agree_across_mesh_densities() {
    for d in [FingerDesign::slim(), FingerDesign::large()] {
        let coarse = build_finger(&d, &MeshingSpec::new(500)).unwrap();
        let fine = build_finger(&d, &MeshingSpec::new(2000)).unwrap();
        for c in 0..3 {
            let a = rest_cavity_volume(&coarse, c).unwrap();
            let b = rest_cavity_volume(&fine, c).unwrap();
            assert!((a - b).abs() <= 0.05 * b, "cavity {c}: {a} vs {b}");
        }
    }
}

#[test]
fn anchor_weights_centre_on_the_cable_line() {
    for d in [FingerDesign::slim(), FingerDesign::large(), mid()] {
        let mesh = build_finger(&d, &MeshingSpec::default()).unwrap();
        let g = d.globals;
        let x_cable = mesh.nodes[mesh.cable_path[0]].x;
        // The cable line may snap to a nearby grid line.
        assert!((x_cable - (g.height / 2.0 - d.outer_radius - g.cable_offset)).abs() < 0.3);
        let total: f64 = mesh.cable_anchor.iter().map(|a| a.1).sum();
        let x: f64 = mesh.cable_anchor.iter().map(|&(i, w)| w * mesh.nodes[i].x).sum();
        let y: f64 = mesh.cable_anchor.iter().map(|&(i, w)| w * mesh.nodes[i].y).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((x - x_cable).abs() < 1e-9, "{x} vs {x_cable}");
        assert!(y.abs() < 1e-9);
        for &i in &mesh.cable_path {
            assert!((mesh.nodes[i].x - x_cable).abs() < 1e-12);
        }
    }
}

#[test]
fn zero_actuation_gives_zero_objectives() {
    let m = FingerModel {
        cable_displacement: 0.0,
        ..FingerModel::default()
    };
    let d = m.deformation(&mid()).unwrap();
    assert_eq!(d.f1, 0.0);
    assert_eq!(d.f2, 0.0);
}

#[test]
fn stiffness_scale_does_not_change_the_objectives() {
    let a = FingerModel::default().deformation(&mid()).unwrap();
    let stiff = FingerModel {
        material: MaterialParams::new(6.0, 0.30).unwrap(),
        ..FingerModel::default()
    };
    let b = stiff.deformation(&mid()).unwrap();
    assert!((a.f1 - b.f1).abs() <= 1e-6 * a.f1, "{} vs {}", a.f1, b.f1);
    assert!((a.f2 - b.f2).abs() <= 1e-6 * a.f2, "{} vs {}", a.f2, b.f2);
}

#[test]
fn actuated_solve_meets_the_cable_constraint() {
    let m = FingerModel::default();
    let mesh = m.mesh(&FingerDesign::large()).unwrap();
    let sol = solve_static(&mesh, &m.material, &ActuationSpec::cable(10.0)).unwrap();
    assert!(sol.converged);
    let l0 = mesh.cable_length(None);
    let l = mesh.cable_length(Some(&sol.displacements));
    assert!((l - (l0 - 10.0)).abs() <= 1e-6 * l0, "{l} vs {}", l0 - 10.0);
    assert!(sol.tension > 0.0);
}

#[test]
fn slim_and_large_trade_off() {
    let m = FingerModel::default();
    let slim = m.deformation(&FingerDesign::slim()).unwrap();
    let large = m.deformation(&FingerDesign::large()).unwrap();
    assert!(large.f1 / slim.f1 >= 3.0, "{} / {}", large.f1, slim.f1);
    assert!(slim.f2 > large.f2);
}

#[test]
fn pressure_objectives_are_consistent() {
    let mat = MaterialParams::default();
    let spec = MeshingSpec::default();
    let p = evaluate_pressure_objectives(&mid(), &mat, &spec).unwrap();
    let actuated = p.deformation.actuated_volume();
    assert!((p.f3 * actuated - p.deformation.f1).abs() <= 1e-12 * p.deformation.f1);
    assert!(p.f4 > 0.0);
    assert_eq!(p.f4, p.deformation.rest_volume());
}

#[test]
fn flatter_cavity_changes_pressure_more() {
    let m = FingerModel::default();
    let tall = FingerDesign::large();
    let mut flat = tall;
    flat.cavity_height = 4.0;
    let f3_tall = m.pressure(&tall).unwrap().f3;
    let f3_flat = m.pressure(&flat).unwrap().f3;
    assert!(f3_flat > f3_tall, "{f3_flat} vs {f3_tall}");
}

#[test]
fn tolerance_study() {
    let m = FingerModel::default();
    let none = m.tolerance_study(&FingerDesign::large(), 0.0).unwrap();
    assert_eq!(none.absolute_change(), 0.0);
    let thin = m.tolerance_study(&FingerDesign::large(), 0.4).unwrap();
    assert!(thin.perturbed_f1 > thin.nominal_f1);
    assert!((thin.perturbed_wall - 2.6).abs() < 1e-12);
    let mut d = FingerDesign::large();
    d.wall_thickness = 1.0;
    assert!(m.tolerance_study(&d, 1.0).is_err());
}

#[test]
fn wall_thickness_sweep_is_reported() {
    // Monotonicity is expected but only flagged: wall changes also move the
    // mesh breakpoints.
    let m = FingerModel::default();
    let mut last = f64::INFINITY;
    for w in [1.5, 1.875, 2.25, 2.625, 3.0] {
        let mut d = FingerDesign::large();
        d.wall_thickness = w;
        let f1 = m.deformation(&d).unwrap().f1;
        if f1 > last {
            eprintln!("f1 increased with wall thickness at w = {w}: {f1} > {last}");
        }
        println!("wall {w}: f1 = {f1:.3}");
        last = f1;
    }
}

#[test]
fn evaluations_are_bitwise_pure() {
    let m = FingerModel::default();
    let x = mid().to_vector();
    let a = m.evaluate(Problem::Deformation, &x);
    let b = m.evaluate(Problem::Deformation, &x);
    let bits = |o: &softopt_core::Outcome| -> Vec<u64> {
        o.objectives().unwrap().values().iter().map(|v| v.to_bits()).collect()
    };
    assert_eq!(bits(&a), bits(&b));
    let p = m.evaluate(Problem::Pressure, &x);
    assert_eq!(p.objectives().unwrap().len(), 3);
    assert!(p.objectives().unwrap().values().iter().all(|v| *v < 0.0));
}

#[test]
fn infeasible_vectors_become_failed_outcomes() {
    let m = FingerModel::default();
    let mut v = FingerDesign::large().values();
    v[6] = 10.0;
    let o = m.evaluate(
        Problem::Deformation,
        &softopt_core::DesignVector::from_unchecked(v.to_vec()),
    );
    assert!(!o.is_ok());
}

#[test]
fn single_evaluation_is_fast() {
    let m = model(500);
    let t = Instant::now();
    m.deformation(&FingerDesign::large()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    println!("500-node evaluation: {secs:.2} s");
    assert!(secs <= 2.0);
}

#[test]
fn design_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("design.toml");
    let d = mid();
    d.save(&path).unwrap();
    assert_eq!(FingerDesign::load(&path).unwrap(), d);

    let custom = d.with_globals(FingerGlobals {
        length: 70.0,
        ..FingerGlobals::default()
    });
    let back = FingerDesign::from_file_str(&custom.to_file_string()).unwrap();
    assert_eq!(back, custom);
    assert_eq!(back.globals.length, 70.0);

    assert!(FingerDesign::from_file_str("cavity_height = 3.0\n").is_err());
    assert!(FingerDesign::from_file_str(&format!("{}bogus = 1.0\n", d.to_file_string())).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn every_design_in_the_box_meshes_near_the_target(u in prop::collection::vec(0.0f64..=1.0, 7)) {
        let space = default_bounds();
        let values: Vec<f64> = space.params().iter().zip(&u).map(|(p, t)| p.lower + t * p.range()).collect();
        let d = FingerDesign::new(values.try_into().unwrap());
        d.validate().unwrap();
        let mesh = build_finger(&d, &MeshingSpec::default()).unwrap();
        mesh.validate().unwrap();
        let n = mesh.node_count() as f64;
        prop_assert!((400.0..=600.0).contains(&n), "{} nodes", n);
        for (c, cavity) in mesh.cavities.iter().enumerate() {
            prop_assert!(check_closed(c, &cavity.triangles).is_ok());
        }
    }
}

use softopt_fem::io::{load_mesh, mesh_to_string, read_mesh, save_mesh};
use softopt_fem::{CavitySurface, Error, TetMesh};

fn sample() -> TetMesh {
    let mut m = TetMesh::structured_box([1.0, 1.5, 2.25], [1, 1, 2]);
    // Boundary of the first tet, oriented outward.
    let [a, b, c, d] = m.tets[0];
    m.cavities.push(CavitySurface {
        name: "probe".into(),
        triangles: vec![[a, c, b], [a, b, d], [b, c, d], [a, d, c]],
    });
    m
}

#[test]
fn round_trip_is_exact() {
    let m = sample();
    m.validate().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mesh");
    save_mesh(&m, &path).unwrap();
    assert_eq!(load_mesh(&path).unwrap(), m);
}

#[test]
fn comments_and_wrapping_are_accepted() {
    let text = mesh_to_string(&sample()).replace("tets", "# element block\ntets");
    let wrapped = text.replacen("fixed 4\n0 1 2 3", "fixed 4\n0 1\n2 3", 1);
    assert_eq!(read_mesh(wrapped.as_bytes()).unwrap(), sample());
}

#[test]
fn malformed_input_reports_the_line() {
    let text = mesh_to_string(&sample()).replacen("nodes 12", "nodes twelve", 1);
    match read_mesh(text.as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(read_mesh("softmesh 1\nnodes 1\n0 0".as_bytes()).is_err());
}

#[test]
fn weighted_cable_anchor_round_trips() {
    let mut m = TetMesh::structured_box([2.0, 2.0, 6.0], [1, 1, 3]);
    m.cable_anchor = vec![(12, 0.25), (13, 0.125), (14, 0.625)];
    m.validate().unwrap();
    assert_eq!(read_mesh(mesh_to_string(&m).as_bytes()).unwrap(), m);
}

#[test]
fn anchor_weights_must_sum_to_one() {
    let mut m = TetMesh::structured_box([2.0, 2.0, 6.0], [1, 1, 3]);
    m.cable_anchor = vec![(12, 0.5), (13, 0.25)];
    assert!(m.validate().is_err());
}

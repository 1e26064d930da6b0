use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softopt_fem::{elastic_energy, elastic_force_and_stiffness, Error, MaterialParams, TetMesh};

fn mesh() -> TetMesh {
    TetMesh::structured_box([3.0, 2.0, 5.0], [3, 2, 4])
}

fn random_field(n: usize, amplitude: f64, seed: u64) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Vector3::from_fn(|_, _| rng.gen_range(-amplitude..amplitude)))
        .collect()
}

fn flat(v: &[Vector3<f64>]) -> Vec<f64> {
    v.iter().flat_map(|p| p.iter().copied()).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn force_is_minus_energy_gradient() {
    let m = mesh();
    let mat = MaterialParams::default();
    let u = random_field(m.node_count(), 0.15, 1);
    let (f, _) = elastic_force_and_stiffness(&m, &mat, &u).unwrap();
    let f = flat(&f);
    let best = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&h| {
            let fd: Vec<f64> = (0..3 * m.node_count())
                .map(|k| {
                    let mut up = u.clone();
                    up[k / 3][k % 3] += h;
                    let mut um = u.clone();
                    um[k / 3][k % 3] -= h;
                    -(elastic_energy(&m, &mat, &up).unwrap() - elastic_energy(&m, &mat, &um).unwrap()) / (2.0 * h)
                })
                .collect();
            let err: Vec<f64> = fd.iter().zip(&f).map(|(a, b)| a - b).collect();
            norm(&err) / norm(&f)
        })
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-5, "relative error {best:e}");
}

#[test]
fn tangent_is_force_derivative() {
    let m = mesh();
    let mat = MaterialParams::new(3.0, 0.45).unwrap();
    let u = random_field(m.node_count(), 0.2, 2);
    let v = random_field(m.node_count(), 1.0, 3);
    let (_, k) = elastic_force_and_stiffness(&m, &mat, &u).unwrap();
    assert!(k.asymmetry() < 1e-9 * mat.young_modulus);
    let kv = k.mul_vec(&flat(&v));
    let h = 1e-6;
    let shifted = |sign: f64| -> Vec<f64> {
        let w: Vec<Vector3<f64>> = u.iter().zip(&v).map(|(a, b)| a + sign * h * b).collect();
        flat(&elastic_force_and_stiffness(&m, &mat, &w).unwrap().0)
    };
    let (fp, fm) = (shifted(1.0), shifted(-1.0));
    let err: Vec<f64> = (0..kv.len()).map(|i| -(fp[i] - fm[i]) / (2.0 * h) - kv[i]).collect();
    let rel = norm(&err) / norm(&kv);
    assert!(rel < 1e-4, "relative error {rel:e}");
}

#[test]
fn rigid_motions_are_force_free() {
    let m = mesh();
    let mat = MaterialParams::default();
    let scale = mat.young_modulus * 6.0;
    let t = vec![Vector3::new(0.7, -3.1, 12.0); m.node_count()];
    let (f, _) = elastic_force_and_stiffness(&m, &mat, &t).unwrap();
    assert!(norm(&flat(&f)) < 1e-10 * scale);

    let r = Rotation3::from_euler_angles(0.4, 1.0, -0.6);
    let u: Vec<Vector3<f64>> = m.nodes.iter().map(|x| r * x - x).collect();
    let (f, _) = elastic_force_and_stiffness(&m, &mat, &u).unwrap();
    assert!(norm(&flat(&f)) < 1e-10 * scale);
    assert!(elastic_energy(&m, &mat, &u).unwrap().abs() < 1e-12 * scale);
}

#[test]
fn inverted_element_is_reported() {
    let m = mesh();
    let mut u = vec![Vector3::zeros(); m.node_count()];
    // Push a top corner node through the element below it.
    let top = m.tets[0][3];
    u[top] = Vector3::new(0.0, 0.0, -50.0);
    let err = elastic_force_and_stiffness(&m, &MaterialParams::default(), &u).unwrap_err();
    assert!(matches!(err, Error::InvertedElement { .. }));
}

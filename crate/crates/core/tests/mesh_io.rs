use cutloc_core::mesh::{load_mesh, make_flat_torus, make_icosphere, save_mesh, MeshFormat};
use cutloc_core::SurfaceTag;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn save_load_round_trip(n1 in 3usize..12, n2 in 3usize..12, k in 0usize..3, obj in any::<bool>()) {
        let dir = tempfile::tempdir().unwrap();
        let fmt = if obj { MeshFormat::Obj } else { MeshFormat::Off };
        for mesh in [make_flat_torus(1.0, 1.3, n1, n2).unwrap(), make_icosphere(k).unwrap()] {
            let path = dir.path().join(if obj { "m.obj" } else { "m.off" });
            save_mesh(&mesh, &path, fmt).unwrap();
            let back = load_mesh(&path, fmt).unwrap();
            prop_assert_eq!(back.num_vertices(), mesh.num_vertices());
            prop_assert_eq!(back.num_triangles(), mesh.num_triangles());
            prop_assert_eq!(back.triangles(), mesh.triangles());
            for (a, b) in back.vertices().iter().zip(mesh.vertices()) {
                for c in 0..3 {
                    prop_assert!((a[c] - b[c]).abs() <= 1e-9);
                }
            }
            prop_assert_eq!(back.tag(), SurfaceTag::Generic);
        }
    }

    #[test]
    fn torus_uv_area(l1 in 0.5f64..2.0, l2 in 0.5f64..2.0, n1 in 3usize..40, n2 in 3usize..40) {
        let mesh = make_flat_torus(l1, l2, n1, n2).unwrap();
        prop_assert!((mesh.total_area() - l1 * l2).abs() <= 1e-9);
        prop_assert_eq!(mesh.euler_characteristic(), 0);
    }
}

#[test]
fn sphere_vertices_are_unit() {
    for k in 0..=5 {
        let mesh = make_icosphere(k).unwrap();
        let worst = mesh
            .vertices()
            .iter()
            .map(|p| ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12, "subdivision {k}: {worst:e}");
        assert_eq!(mesh.euler_characteristic(), 2);
    }
}

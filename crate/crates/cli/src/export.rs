use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cutloc_core::Mesh;

/// Legacy ASCII VTK polydata with one point-data scalar.
pub fn vtk_string(mesh: &Mesh, name: &str, values: &[f64]) -> String {
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(s, "cutloc {name}");
    s.push_str("ASCII\nDATASET POLYDATA\n");
    let _ = writeln!(s, "POINTS {} double", mesh.num_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
    }
    let nt = mesh.num_triangles();
    let _ = writeln!(s, "POLYGONS {nt} {}", 4 * nt);
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "POINT_DATA {}", values.len());
    let _ = writeln!(s, "SCALARS {name} double 1");
    s.push_str("LOOKUP_TABLE default\n");
    for v in values {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn csv_string(values: &[f64]) -> String {
    let mut s = String::from("vertex_id,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i},{v}");
    }
    s
}

/// Writes `<name>.vtk` and `<name>.csv` into `dir`; returns the file names.
pub fn write_field(dir: &Path, mesh: &Mesh, name: &str, values: &[f64]) -> Result<Vec<String>> {
    let vtk = format!("{name}.vtk");
    let csv = format!("{name}.csv");
    fs::write(dir.join(&vtk), vtk_string(mesh, name, values))
        .with_context(|| format!("writing {vtk}"))?;
    fs::write(dir.join(&csv), csv_string(values)).with_context(|| format!("writing {csv}"))?;
    Ok(vec![vtk, csv])
}

pub const LOCK_NAME: &str = ".cutloc.lock";

/// Marker file guarding an output directory for the lifetime of a run.
#[derive(Debug)]
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(LOCK_NAME);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                use std::io::Write;
                let _ = writeln!(f, "{}", std::process::id());
                Ok(DirLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => bail!(
                "output directory {} is locked by another run (remove {} if stale)",
                dir.display(),
                path.display()
            ),
            Err(e) => Err(e).with_context(|| format!("creating {}", path.display())),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cutloc_core::mesh::make_icosphere;

    #[test]
    fn vtk_layout() {
        let m = make_icosphere(0).unwrap();
        let v: Vec<f64> = (0..12).map(|i| i as f64 * 0.5).collect();
        let s = vtk_string(&m, "u", &v);
        assert!(s.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(s.contains("POINTS 12 double\n"));
        assert!(s.contains("POLYGONS 20 80\n"));
        assert!(s.contains("POINT_DATA 12\nSCALARS u double 1\nLOOKUP_TABLE default\n0\n0.5\n"));
    }

    #[test]
    fn csv_round_trips_values() {
        let v = [0.1, -2.5e-17, 3.0];
        let s = csv_string(&v);
        let back: Vec<f64> = s.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert_eq!(back, v);
        assert!(s.starts_with("vertex_id,value\n0,0.1\n"));
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let a = DirLock::acquire(dir.path()).unwrap();
        assert!(DirLock::acquire(dir.path()).is_err());
        drop(a);
        assert!(DirLock::acquire(dir.path()).is_ok());
    }
}

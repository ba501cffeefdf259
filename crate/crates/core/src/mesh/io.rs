//! ASCII OFF / OBJ reading and writing. Loaded meshes are tagged generic and
//! must be closed manifolds; anything else is rejected.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{Mesh, SurfaceTag};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            _ => Err(Error::Parameter(format!("unknown mesh format '{s}'"))),
        }
    }
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<Mesh> {
    let bytes = std::fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse {
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        message: "file is not valid UTF-8 text".into(),
    })?;
    match format {
        MeshFormat::Off => read_off(text),
        MeshFormat::Obj => read_obj(text),
    }
}

pub fn save_mesh(mesh: &Mesh, path: &Path, format: MeshFormat) -> Result<()> {
    let text = match format {
        MeshFormat::Off => write_off(mesh),
        MeshFormat::Obj => write_obj(mesh),
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_num<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} '{tok}'"),
    })
}

pub fn read_off(text: &str) -> Result<Mesh> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let rest = header.strip_prefix("OFF").ok_or(Error::Parse {
        line: hline,
        message: "missing OFF header".into(),
    })?;
    let (cline, counts) = if rest.trim().is_empty() {
        lines.next().ok_or(Error::Parse {
            line: hline,
            message: "missing counts line".into(),
        })?
    } else {
        (hline, rest)
    };
    let counts: Vec<&str> = counts.split_whitespace().collect();
    if counts.len() < 2 {
        return Err(Error::Parse {
            line: cline,
            message: "counts line needs vertex and face counts".into(),
        });
    }
    let nv: usize = parse_num(counts[0], cline, "vertex count")?;
    let nf: usize = parse_num(counts[1], cline, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or(Error::Parse {
            line: cline,
            message: format!("expected {nv} vertices, file ended after {}", vertices.len()),
        })?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(Error::Parse {
                line: ln,
                message: "vertex line needs three coordinates".into(),
            });
        }
        vertices.push([
            parse_num(toks[0], ln, "coordinate")?,
            parse_num(toks[1], ln, "coordinate")?,
            parse_num(toks[2], ln, "coordinate")?,
        ]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or(Error::Parse {
            line: cline,
            message: format!("expected {nf} faces, file ended after {}", triangles.len()),
        })?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let k: usize = parse_num(toks[0], ln, "face size")?;
        if k != 3 {
            return Err(Error::Parse {
                line: ln,
                message: format!("only triangles are supported, face has {k} vertices"),
            });
        }
        if toks.len() < 4 {
            return Err(Error::Parse {
                line: ln,
                message: "face line needs three vertex indices".into(),
            });
        }
        triangles.push([
            parse_num(toks[1], ln, "vertex index")?,
            parse_num(toks[2], ln, "vertex index")?,
            parse_num(toks[3], ln, "vertex index")?,
        ]);
    }
    Mesh::new(vertices, triangles, SurfaceTag::Generic, None)
}

pub fn read_obj(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (ln, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some("v") => {
                let c: Vec<&str> = toks.collect();
                if c.len() < 3 {
                    return Err(Error::Parse {
                        line: ln,
                        message: "vertex line needs three coordinates".into(),
                    });
                }
                vertices.push([
                    parse_num(c[0], ln, "coordinate")?,
                    parse_num(c[1], ln, "coordinate")?,
                    parse_num(c[2], ln, "coordinate")?,
                ]);
            }
            Some("f") => {
                let idx: Vec<&str> = toks.collect();
                if idx.len() != 3 {
                    return Err(Error::Parse {
                        line: ln,
                        message: format!("only triangles are supported, face has {} vertices", idx.len()),
                    });
                }
                let mut tri = [0usize; 3];
                for (slot, tok) in tri.iter_mut().zip(idx) {
                    let head = tok.split('/').next().unwrap_or("");
                    let one_based: i64 = parse_num(head, ln, "vertex index")?;
                    *slot = match one_based {
                        i if i > 0 => (i - 1) as usize,
                        i if i < 0 && (-i) as usize <= vertices.len() => {
                            vertices.len() - (-i) as usize
                        }
                        _ => {
                            return Err(Error::Parse {
                                line: ln,
                                message: format!("invalid vertex index {one_based}"),
                            })
                        }
                    };
                }
                triangles.push(tri);
            }
            // normals, texture coordinates, groups and materials are irrelevant here
            Some("vn" | "vt" | "vp" | "g" | "o" | "s" | "usemtl" | "mtllib" | "l") => {}
            Some(other) => {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("unrecognized OBJ statement '{other}'"),
                })
            }
            None => {}
        }
    }
    if vertices.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no vertices found".into(),
        });
    }
    Mesh::new(vertices, triangles, SurfaceTag::Generic, None)
}

pub fn write_off(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF\n{} {} 0", mesh.num_vertices(), mesh.num_triangles());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

pub fn write_obj(mesh: &Mesh) -> String {
    let mut s = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

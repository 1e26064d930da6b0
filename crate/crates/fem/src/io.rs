//! Plain-text mesh format.
//!
//! One record per line, fields separated by whitespace, `#` starts a
//! comment. In order:
//!
//! ```text
//! softmesh 1
//! nodes N          followed by N lines  x y z
//! tets M           followed by M lines  a b c d
//! cavities K       followed by K blocks:
//!   cavity NAME T  followed by T lines  a b c
//! fixed F          followed by one line of F indices (may wrap)
//! cable C          followed by one line of C indices (may wrap)
//! anchor A         followed by A lines  node weight
//! tip I
//! ```

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::mesh::{CavitySurface, Point, TetMesh};
use crate::{Error, Result};

const MAGIC: &str = "softmesh";
const VERSION: &str = "1";

pub fn mesh_to_string(mesh: &TetMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC} {VERSION}");
    let _ = writeln!(s, "nodes {}", mesh.nodes.len());
    for p in &mesh.nodes {
        let _ = writeln!(s, "{:?} {:?} {:?}", p.x, p.y, p.z);
    }
    let _ = writeln!(s, "tets {}", mesh.tets.len());
    for t in &mesh.tets {
        let _ = writeln!(s, "{} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    let _ = writeln!(s, "cavities {}", mesh.cavities.len());
    for c in &mesh.cavities {
        let _ = writeln!(s, "cavity {} {}", c.name, c.triangles.len());
        for t in &c.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
    }
    let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(s, "fixed {}", mesh.fixed_nodes.len());
    let _ = writeln!(s, "{}", join(&mesh.fixed_nodes));
    let _ = writeln!(s, "cable {}", mesh.cable_path.len());
    let _ = writeln!(s, "{}", join(&mesh.cable_path));
    let _ = writeln!(s, "anchor {}", mesh.cable_anchor.len());
    for (i, w) in &mesh.cable_anchor {
        let _ = writeln!(s, "{i} {w:?}");
    }
    let _ = writeln!(s, "tip {}", mesh.tip_node);
    s
}

pub fn write_mesh<W: Write>(mesh: &TetMesh, mut w: W) -> Result<()> {
    w.write_all(mesh_to_string(mesh).as_bytes())?;
    Ok(())
}

pub fn save_mesh(mesh: &TetMesh, path: &Path) -> Result<()> {
    std::fs::write(path, mesh_to_string(mesh))?;
    Ok(())
}

pub fn load_mesh(path: &Path) -> Result<TetMesh> {
    read_mesh(std::io::BufReader::new(std::fs::File::open(path)?))
}

struct Tokens {
    items: Vec<(usize, String)>,
    pos: usize,
}

impl Tokens {
    fn next(&mut self) -> Result<(usize, &str)> {
        let line = self.items.last().map_or(0, |t| t.0);
        let (l, t) = self.items.get(self.pos).ok_or(Error::Parse {
            line,
            message: "unexpected end of file".into(),
        })?;
        self.pos += 1;
        Ok((*l, t.as_str()))
    }

    fn keyword(&mut self, expected: &str) -> Result<()> {
        let (line, t) = self.next()?;
        if t == expected {
            Ok(())
        } else {
            Err(Error::Parse {
                line,
                message: format!("expected `{expected}`, found `{t}`"),
            })
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (line, t) = self.next()?;
        t.parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid {what} `{t}`"),
        })
    }

    fn indices(&mut self, n: usize) -> Result<Vec<usize>> {
        (0..n).map(|_| self.parse("node index")).collect()
    }
}

/// Reads and validates a mesh.
pub fn read_mesh<R: BufRead>(r: R) -> Result<TetMesh> {
    let mut items = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        items.extend(content.split_whitespace().map(|t| (k + 1, t.to_string())));
    }
    let mut tk = Tokens { items, pos: 0 };
    tk.keyword(MAGIC)?;
    tk.keyword(VERSION)?;
    tk.keyword("nodes")?;
    let n: usize = tk.parse("count")?;
    let nodes = (0..n)
        .map(|_| {
            Ok(Point::new(
                tk.parse("coordinate")?,
                tk.parse("coordinate")?,
                tk.parse("coordinate")?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    tk.keyword("tets")?;
    let m: usize = tk.parse("count")?;
    let tets = (0..m)
        .map(|_| {
            Ok([
                tk.parse("node index")?,
                tk.parse("node index")?,
                tk.parse("node index")?,
                tk.parse("node index")?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    tk.keyword("cavities")?;
    let k: usize = tk.parse("count")?;
    let mut cavities = Vec::with_capacity(k);
    for _ in 0..k {
        tk.keyword("cavity")?;
        let name = tk.next()?.1.to_string();
        let t: usize = tk.parse("count")?;
        let triangles = (0..t)
            .map(|_| {
                Ok([
                    tk.parse("node index")?,
                    tk.parse("node index")?,
                    tk.parse("node index")?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        cavities.push(CavitySurface { name, triangles });
    }
    tk.keyword("fixed")?;
    let f: usize = tk.parse("count")?;
    let fixed_nodes = tk.indices(f)?;
    tk.keyword("cable")?;
    let c: usize = tk.parse("count")?;
    let cable_path = tk.indices(c)?;
    tk.keyword("anchor")?;
    let a: usize = tk.parse("count")?;
    let cable_anchor = (0..a)
        .map(|_| Ok((tk.parse("node index")?, tk.parse("weight")?)))
        .collect::<Result<Vec<_>>>()?;
    tk.keyword("tip")?;
    let tip_node = tk.parse("node index")?;
    if let Ok((line, t)) = tk.next() {
        return Err(Error::Parse {
            line,
            message: format!("trailing token `{t}`"),
        });
    }
    let mesh = TetMesh {
        nodes,
        tets,
        cavities,
        fixed_nodes,
        cable_path,
        cable_anchor,
        tip_node,
    };
    mesh.validate()?;
    Ok(mesh)
}

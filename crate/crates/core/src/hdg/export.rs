use std::fmt::Write as _;

use super::{DgField, HdgSystem};
use crate::geometry::Vec2;

impl HdgSystem {
    /// Legacy ASCII VTK unstructured grid; every element is split into `max(k,1)²`
    /// subtriangles carrying point values of `u_h` and `q_h`.
    pub fn to_vtk(&self, field: &DgField) -> String {
        let r = field.k.max(1);
        let per = (r + 1) * (r + 2) / 2;
        let nel = self.mesh.num_elements();
        let mut pts = Vec::with_capacity(nel * per);
        let mut cells = Vec::new();
        for e in 0..nel {
            let aff = &self.affine[e];
            let base = pts.len();
            let mut local = Vec::new();
            for j in 0..=r {
                for i in 0..=r - j {
                    local.push((i, j));
                    let xi = Vec2::new(i as f64 / r as f64, j as f64 / r as f64);
                    pts.push((e, aff.to_phys(xi)));
                }
            }
            let find = |i: usize, j: usize| base + local.iter().position(|&p| p == (i, j)).expect("lattice point");
            for j in 0..r {
                for i in 0..r - j {
                    cells.push([find(i, j), find(i + 1, j), find(i, j + 1)]);
                    if i + j + 1 < r {
                        cells.push([find(i + 1, j), find(i + 1, j + 1), find(i, j + 1)]);
                    }
                }
            }
        }
        let mut s = String::new();
        let _ = writeln!(s, "# vtk DataFile Version 3.0\nhdg solution\nASCII\nDATASET UNSTRUCTURED_GRID");
        let _ = writeln!(s, "POINTS {} double", pts.len());
        for (_, p) in &pts {
            let _ = writeln!(s, "{} {} 0", p.x, p.y);
        }
        let _ = writeln!(s, "CELLS {} {}", cells.len(), 4 * cells.len());
        for c in &cells {
            let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
        }
        let _ = writeln!(s, "CELL_TYPES {}", cells.len());
        for _ in &cells {
            let _ = writeln!(s, "5");
        }
        let _ = writeln!(s, "POINT_DATA {}\nSCALARS u double 1\nLOOKUP_TABLE default", pts.len());
        for (e, p) in &pts {
            let _ = writeln!(s, "{}", self.eval_u(field, *e, *p));
        }
        let _ = writeln!(s, "VECTORS q double");
        for (e, p) in &pts {
            let q = self.eval_q(field, *e, *p);
            let _ = writeln!(s, "{} {} 0", q.x, q.y);
        }
        s
    }
}

/// One row per element: id, then the `q_x`, `q_y` and `u` coefficients.
pub fn coefficients_csv(field: &DgField) -> String {
    let np = field.np;
    let mut s = String::from("element");
    for name in ["qx", "qy", "u"] {
        for j in 0..np {
            let _ = write!(s, ",{name}_{j}");
        }
    }
    s.push('\n');
    for e in 0..field.num_elements() {
        let _ = write!(s, "{e}");
        for v in field.q_block(e).iter().chain(field.u_block(e)) {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

use faer::linalg::solvers::Solve;
use faer::Mat;

use super::local::load_vector;
use super::system::sparse_lu;
use super::{DgField, HdgError, HdgSystem, Source, BoundaryData};

impl HdgSystem {
    /// Solves the full hybrid system with element unknowns and traces together,
    /// without static condensation. Slow; meant as a reference for the condensed solve.
    pub fn solve_uncondensed(&self, f: Source<'_>, data: BoundaryData<'_>) -> Result<DgField, HdgError> {
        let np = self.space.np;
        let ne = self.space.ne;
        let nl = 3 * np;
        let nel = self.mesh.num_elements();
        let off = nel * nl;
        let n = off + self.num_unknowns();
        let mut t = Vec::new();
        let mut rhs = vec![0.0; n];
        self.boundary_load(data, &mut rhs[off..]);
        for e in 0..nel {
            // recover the unfactored local blocks
            let blocks = super::local::assemble_local(&self.mesh, e, &self.space, &self.material, self.tau[e])?;
            let edges = self.mesh.element_edges[e];
            let load = load_vector(&self.affine[e], &self.space, f);
            for i in 0..nl {
                rhs[e * nl + i] = load[i];
                for j in 0..nl {
                    let v = blocks.m[(i, j)];
                    if v != 0.0 {
                        t.push((e * nl + i, e * nl + j, v));
                    }
                }
                for lj in 0..3 {
                    for m in 0..ne {
                        let v = blocks.n[(i, lj * ne + m)];
                        if v != 0.0 {
                            t.push((e * nl + i, off + edges[lj] * ne + m, v));
                        }
                    }
                }
            }
            for li in 0..3 {
                let ge = edges[li];
                for m in 0..ne {
                    let row = off + ge * ne + m;
                    if self.mesh.edges[ge].is_boundary() {
                        t.push((row, row, 1.0));
                        if let Some(tc) = &self.transfer[ge] {
                            for c in 0..2 * np {
                                t.push((row, e * nl + c, -tc.trace[(m, c)]));
                            }
                        }
                    } else {
                        for c in 0..nl {
                            t.push((row, e * nl + c, blocks.r[(li * ne + m, c)]));
                        }
                        t.push((row, row, -self.tau[e][li]));
                    }
                }
            }
        }
        let lu = sparse_lu(n, &t)?;
        let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        let x = lu.solve(&b);
        let mut field = DgField::zeros(self.space.k, nel, self.mesh.num_edges());
        for e in 0..nel {
            for i in 0..2 * np {
                field.q[e * 2 * np + i] = x[(e * nl + i, 0)];
            }
            for i in 0..np {
                field.u[e * np + i] = x[(e * nl + 2 * np + i, 0)];
            }
        }
        for i in 0..self.num_unknowns() {
            field.uhat[i] = x[(off + i, 0)];
        }
        Ok(field)
    }
}

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use rayon::prelude::*;

use super::basis::edge_basis;
use super::field::DgField;
use super::local::{assemble_local, load_vector, Affine, HdgSpace, LocalBlocks};
use super::transfer::{assemble_transfer, TransferCoupling};
use super::{HdgError, MaterialField};
use crate::geometry::{BoundaryMap, BoundaryTag, MappedPoint, UnfittedMesh, Vec2};

/// Source term `f`.
pub type Source<'a> = &'a (dyn Fn(Vec2) -> f64 + Sync);
/// Dirichlet data on the true curves, evaluated at mapped boundary points.
pub type BoundaryData<'a> = &'a (dyn Fn(BoundaryTag, &MappedPoint) -> f64 + Sync);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemOptions {
    /// Stabilization, constant on all faces.
    pub tau: f64,
    /// Keep the path-integral terms in the boundary rows.
    pub include_transfer: bool,
    /// Element loops on the rayon pool; results are identical to the sequential mode.
    pub parallel: bool,
    /// Gauss points per transfer path; `0` picks `k + 2`.
    pub path_points: usize,
}

impl Default for SystemOptions {
    fn default() -> Self {
        SystemOptions {
            tau: 1.0,
            include_transfer: true,
            parallel: true,
            path_points: 0,
        }
    }
}

/// Local solver of one element after factorization.
#[derive(Debug, Clone)]
pub(crate) struct ElementSolver {
    pub minv: Mat<f64>,
    /// `M⁻¹ N`, the response of the local unknowns to the element's traces.
    pub z: Mat<f64>,
    pub r: Mat<f64>,
}

/// Compressed sparse rows, kept for residual checks.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; n + 1];
        let mut col = Vec::with_capacity(t.len());
        let mut val: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *val.last_mut().expect("entry") += v;
            } else {
                col.push(c);
                val.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, col, val }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(|k| self.val[k] * x[self.col[k]]).sum())
            .collect()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        (self.row_ptr[r]..self.row_ptr[r + 1])
            .find(|&k| self.col[k] == c)
            .map_or(0.0, |k| self.val[k])
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col[k], self.val[k])))
    }
}

pub(crate) fn sparse_lu(n: usize, t: &[(usize, usize, f64)]) -> Result<Lu<usize, f64>, HdgError> {
    let trip: Vec<Triplet<usize, usize, f64>> = t.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| HdgError::Solver(format!("sparse assembly: {e:?}")))?;
    a.sp_lu().map_err(|e| HdgError::Solver(format!("sparse factorization: {e:?}")))
}

/// Statically condensed HDG system on the edge traces, factorized once.
///
/// Interior-edge rows express flux continuity; boundary-edge rows impose
/// `û - ∫₀^l κ⁻¹ E q · t ds = ξ∘φ` with the path integral kept in the matrix.
pub struct HdgSystem {
    pub(crate) space: HdgSpace,
    pub(crate) mesh: UnfittedMesh,
    pub(crate) bmap: BoundaryMap,
    pub(crate) material: MaterialField,
    pub(crate) tau: Vec<[f64; 3]>,
    pub(crate) affine: Vec<Affine>,
    pub(crate) elems: Vec<ElementSolver>,
    /// Indexed by global edge.
    pub(crate) transfer: Vec<Option<TransferCoupling>>,
    pub(crate) matrix: Csr,
    lu: Lu<usize, f64>,
    pub options: SystemOptions,
}

impl std::fmt::Debug for HdgSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HdgSystem")
            .field("k", &self.space.k)
            .field("elements", &self.mesh.num_elements())
            .field("unknowns", &self.num_unknowns())
            .finish()
    }
}

fn map_elems<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, parallel: bool, f: F) -> Vec<T> {
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

impl HdgSystem {
    pub fn build(
        mesh: &UnfittedMesh,
        bmap: &BoundaryMap,
        material: &MaterialField,
        k: usize,
        options: &SystemOptions,
    ) -> Result<Self, HdgError> {
        if !(options.tau > 0.0 && options.tau.is_finite()) {
            return Err(HdgError::InvalidParameter(format!("stabilization τ = {}", options.tau)));
        }
        let space = HdgSpace::new(k);
        let ne_tot = mesh.num_elements();
        let tau = vec![[options.tau; 3]; ne_tot];
        let affine = (0..ne_tot)
            .map(|e| Affine::new(mesh.element_vertices(e)).ok_or(HdgError::DegenerateElement { element: e }))
            .collect::<Result<Vec<_>, _>>()?;
        let elems = map_elems(ne_tot, options.parallel, |e| {
            let blocks = assemble_local(mesh, e, &space, material, tau[e])?;
            factor_local(e, blocks, tau[e][0])
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let path_points = if options.path_points == 0 { k + 2 } else { options.path_points };
        let mut transfer: Vec<Option<TransferCoupling>> = vec![None; mesh.num_edges()];
        for (id, e) in mesh.edges.iter().enumerate() {
            if e.is_boundary() && bmap.for_edge(id).is_none() {
                return Err(HdgError::MissingBoundaryData { edge: id });
            }
        }
        if options.include_transfer {
            let coupled = map_elems(bmap.edges.len(), options.parallel, |i| {
                let em = &bmap.edges[i];
                assemble_transfer(em, &affine[em.element], &space, material, tau[em.element][em.local], path_points)
            });
            for c in coupled {
                let c = c?;
                let edge = c.edge;
                transfer[edge] = Some(c);
            }
        }
        let mut sys = HdgSystem {
            matrix: Csr::from_triplets(0, Vec::new()),
            lu: sparse_lu(1, &[(0, 0, 1.0)])?,
            space,
            mesh: mesh.clone(),
            bmap: bmap.clone(),
            material: material.clone(),
            tau,
            affine,
            elems,
            transfer,
            options: *options,
        };
        let trip = sys.assemble_triplets();
        let n = sys.num_unknowns();
        sys.lu = sparse_lu(n, &trip)?;
        sys.matrix = Csr::from_triplets(n, trip);
        Ok(sys)
    }

    fn assemble_triplets(&self) -> Vec<(usize, usize, f64)> {
        let ne = self.space.ne;
        let np = self.space.np;
        let blocks = map_elems(self.mesh.num_elements(), self.options.parallel, |e| {
            let el = &self.elems[e];
            let edges = self.mesh.element_edges[e];
            let mut t = Vec::new();
            for li in 0..3 {
                let ge = edges[li];
                if self.mesh.edges[ge].is_boundary() {
                    // û_e + Tr (M⁻¹N)_q û_T
                    for m in 0..ne {
                        t.push((ge * ne + m, ge * ne + m, 1.0));
                    }
                    if let Some(tc) = &self.transfer[ge] {
                        for m in 0..ne {
                            for lj in 0..3 {
                                for mm in 0..ne {
                                    let c = lj * ne + mm;
                                    let v: f64 = (0..2 * np).map(|q| tc.trace[(m, q)] * el.z[(q, c)]).sum();
                                    t.push((ge * ne + m, edges[lj] * ne + mm, v));
                                }
                            }
                        }
                    }
                } else {
                    // -R M⁻¹ N û_T - τ û_e
                    for m in 0..ne {
                        let row = li * ne + m;
                        for lj in 0..3 {
                            for mm in 0..ne {
                                let c = lj * ne + mm;
                                let mut v: f64 = -(0..3 * np).map(|q| el.r[(row, q)] * el.z[(q, c)]).sum::<f64>();
                                if c == row {
                                    v -= self.tau[e][li];
                                }
                                t.push((ge * ne + m, edges[lj] * ne + mm, v));
                            }
                        }
                    }
                }
            }
            t
        });
        blocks.into_iter().flatten().collect()
    }

    pub fn num_unknowns(&self) -> usize {
        self.mesh.num_edges() * self.space.ne
    }

    pub fn degree(&self) -> usize {
        self.space.k
    }

    pub fn mesh(&self) -> &UnfittedMesh {
        &self.mesh
    }

    pub fn boundary_map(&self) -> &BoundaryMap {
        &self.bmap
    }

    pub fn material(&self) -> &MaterialField {
        &self.material
    }

    pub fn space(&self) -> &HdgSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Csr {
        &self.matrix
    }

    pub fn transfer_coupling(&self, edge: usize) -> Option<&TransferCoupling> {
        self.transfer.get(edge).and_then(|t| t.as_ref())
    }

    /// Local unknowns driven by the source alone: `M⁻¹ (0, 0, (f, w))`.
    pub(crate) fn source_response(&self, f: Source<'_>) -> Vec<Vec<f64>> {
        map_elems(self.mesh.num_elements(), self.options.parallel, |e| {
            let load = load_vector(&self.affine[e], &self.space, f);
            let minv = &self.elems[e].minv;
            (0..minv.nrows())
                .map(|i| (0..minv.ncols()).map(|j| minv[(i, j)] * load[j]).sum())
                .collect()
        })
    }

    /// `⟨ξ, μ_m⟩_e` for each boundary edge.
    pub(crate) fn boundary_load(&self, data: BoundaryData<'_>, rhs: &mut [f64]) {
        let ne = self.space.ne;
        let mut mu = vec![0.0; ne];
        for em in &self.bmap.edges {
            for (g, node) in em.nodes.iter().enumerate() {
                let v = data(em.tag, node);
                edge_basis(self.space.k, em.length, em.zeta[g], &mut mu);
                for m in 0..ne {
                    rhs[em.edge * ne + m] += em.weights[g] * mu[m] * v;
                }
            }
        }
    }

    /// Right-hand side of the condensed system and the source responses.
    pub(crate) fn rhs(&self, f: Source<'_>, data: BoundaryData<'_>) -> (Vec<f64>, Vec<Vec<f64>>) {
        let ne = self.space.ne;
        let np = self.space.np;
        let y = self.source_response(f);
        let mut rhs = vec![0.0; self.num_unknowns()];
        self.boundary_load(data, &mut rhs);
        for (e, ye) in y.iter().enumerate() {
            let el = &self.elems[e];
            for li in 0..3 {
                let ge = self.mesh.element_edges[e][li];
                if self.mesh.edges[ge].is_boundary() {
                    if let Some(tc) = &self.transfer[ge] {
                        for m in 0..ne {
                            rhs[ge * ne + m] += (0..2 * np).map(|q| tc.trace[(m, q)] * ye[q]).sum::<f64>();
                        }
                    }
                } else {
                    for m in 0..ne {
                        let row = li * ne + m;
                        rhs[ge * ne + m] -= (0..3 * np).map(|q| el.r[(row, q)] * ye[q]).sum::<f64>();
                    }
                }
            }
        }
        (rhs, y)
    }

    pub(crate) fn solve_traces(&self, rhs: &[f64]) -> Result<Vec<f64>, HdgError> {
        let n = rhs.len();
        let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(HdgError::Solver("non-finite trace solution".into()));
        }
        Ok(out)
    }

    /// Recovers `(q_h, u_h)` element by element from the traces.
    pub(crate) fn recover(&self, uhat: Vec<f64>, y: &[Vec<f64>], residual: f64) -> DgField {
        let np = self.space.np;
        let ne = self.space.ne;
        let blocks = map_elems(self.mesh.num_elements(), self.options.parallel, |e| {
            let el = &self.elems[e];
            let edges = self.mesh.element_edges[e];
            let mut x = y[e].clone();
            for lj in 0..3 {
                for mm in 0..ne {
                    let uh = uhat[edges[lj] * ne + mm];
                    if uh != 0.0 {
                        let c = lj * ne + mm;
                        for (i, xi) in x.iter_mut().enumerate() {
                            *xi -= el.z[(i, c)] * uh;
                        }
                    }
                }
            }
            x
        });
        let mut q = Vec::with_capacity(2 * np * blocks.len());
        let mut u = Vec::with_capacity(np * blocks.len());
        for b in &blocks {
            q.extend_from_slice(&b[..2 * np]);
            u.extend_from_slice(&b[2 * np..]);
        }
        DgField {
            k: self.space.k,
            np,
            ne,
            q,
            u,
            uhat,
            residual,
        }
    }

    /// Solves the interior problem for source `f` and boundary data on both curves.
    pub fn solve(&self, f: Source<'_>, data: BoundaryData<'_>) -> Result<DgField, HdgError> {
        let (rhs, y) = self.rhs(f, data);
        let uhat = self.solve_traces(&rhs)?;
        let res = relative_residual(&self.matrix, &uhat, &rhs);
        if !(res < 1e-6) {
            return Err(HdgError::Solver(format!("relative residual {res:.3e} after direct solve")));
        }
        Ok(self.recover(uhat, &y, res))
    }

    pub fn affine(&self, e: usize) -> &Affine {
        &self.affine[e]
    }

    pub fn tau(&self, e: usize) -> [f64; 3] {
        self.tau[e]
    }
}

pub(crate) fn relative_residual(a: &Csr, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let num: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn factor_local(element: usize, b: LocalBlocks, tau: f64) -> Result<ElementSolver, HdgError> {
    let n = b.m.nrows();
    let lu = b.m.partial_piv_lu();
    let minv = lu.solve(Mat::<f64>::identity(n, n));
    let check = &b.m * &minv;
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            err = err.max((check[(i, j)] - want).abs());
        }
    }
    if !(err < 1e-8) {
        return Err(HdgError::SingularLocal { element, tau });
    }
    let z = &minv * &b.n;
    Ok(ElementSolver { minv, z, r: b.r })
}

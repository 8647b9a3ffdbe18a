use faer::linalg::solvers::Solve;
use faer::Mat;

use super::{Coupler, CouplingError, ProblemData};
use crate::bem::{nodes, TrigPolynomial};
use crate::geometry::{BoundaryTag, MappedPoint};
use crate::hdg::{relative_residual_of, DgField};

/// Simultaneous solution of the interior traces, the exterior trace and the constant.
#[derive(Debug, Clone)]
pub struct MonolithicSolution {
    pub g: TrigPolynomial,
    pub constant: f64,
    pub lambda: TrigPolynomial,
    pub u_inf: f64,
    pub field: DgField,
    pub unknowns: usize,
}

impl MonolithicSolution {
    pub fn trace(&self) -> TrigPolynomial {
        self.g.plus_constant(self.constant)
    }
}

/// One sparse system holding the condensed HDG equations, the Galerkin
/// boundary integral equation in reduced coordinates and the zero-mean-flux
/// condition. Its solution is the fixed point of the relaxed iteration.
pub fn monolithic_solve(coupler: &Coupler<'_>, data: &ProblemData<'_>) -> Result<MonolithicSolution, CouplingError> {
    let sys = coupler.system;
    let ops = coupler.ops;
    let n = ops.degree();
    let dim = 2 * n;
    let nh = sys.num_unknowns();
    let ne = sys.space.ne;
    let np = sys.space.np;
    let total = nh + dim;
    let col_g = nh;
    let col_c = nh + dim - 1;
    let row_bie = nh;
    let row_mean = nh + dim - 1;

    // fixed part of the interior right-hand side: source and obstacle data
    let u0 = data.u0;
    let (mut rhs_h, y) = sys.rhs(data.f, &|tag: BoundaryTag, p: &MappedPoint| match tag {
        BoundaryTag::Gamma => 0.0,
        BoundaryTag::Gamma0 => u0(p),
    });
    let mut trip: Vec<(usize, usize, f64)> = sys.matrix.triplets().collect();

    // interior response to each reduced basis function of g and to the constant
    for c in 0..dim {
        let mut load = vec![0.0; nh];
        if c + 1 < dim {
            let mut x = vec![0.0; dim - 1];
            x[c] = 1.0;
            let beta = ops.from_reduced_coords(&x);
            sys.boundary_load(&|tag, p| if tag == BoundaryTag::Gamma { beta.eval(p.s) } else { 0.0 }, &mut load);
        } else {
            sys.boundary_load(&|tag, _| if tag == BoundaryTag::Gamma { 1.0 } else { 0.0 }, &mut load);
        }
        for (r, v) in load.iter().enumerate() {
            if *v != 0.0 {
                trip.push((r, col_g + c, -v));
            }
        }
    }

    // flux samples at the nodes: s = s_f - S û
    let params = nodes(n);
    let curve = ops.curve();
    let mut s_f = vec![0.0; dim];
    let mut s_rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(dim);
    for (i, &t) in params.iter().enumerate() {
        let em = sys
            .bmap
            .locate_on_gamma(t)
            .ok_or(crate::hdg::HdgError::Coverage { param: t })?;
        let e = em.element;
        let nrm = curve.normal(t);
        let phi = sys.space.basis.values(sys.affine[e].to_ref(curve.point(t)));
        let w: Vec<f64> = (0..2 * np)
            .map(|q| if q < np { phi[q] * nrm.x } else { phi[q - np] * nrm.y })
            .collect();
        s_f[i] = (0..2 * np).map(|q| w[q] * y[e][q]).sum();
        let z = &sys.elems[e].z;
        let mut row = Vec::with_capacity(3 * ne);
        for (lj, &ge) in sys.mesh.element_edges[e].iter().enumerate() {
            for mm in 0..ne {
                let c = lj * ne + mm;
                let v: f64 = (0..2 * np).map(|q| w[q] * z[(q, c)]).sum();
                row.push((ge * ne + mm, v));
            }
        }
        s_rows.push(row);
    }

    // W maps samples to the right-hand side of the reduced integral equation;
    // m maps samples to the weighted mean of their interpolant
    let vmat = ops.single_layer_matrix();
    let means = ops.mode_means();
    let mut wmat = Mat::<f64>::zeros(dim - 1, dim);
    let mut mrow = vec![0.0; dim];
    for i in 0..dim {
        let mut e_i = vec![0.0; dim];
        e_i[i] = 1.0;
        let p = TrigPolynomial::interpolate(n, &e_i)?;
        mrow[i] = ops.weighted_mean(&p);
        let pm = ops.project_mean_zero(&p);
        let vl: Vec<f64> = (0..dim)
            .map(|r| (0..dim).map(|j| vmat[(r, j)] * pm.coeffs()[j]).sum())
            .collect();
        for c in 0..dim - 1 {
            wmat[(c, i)] = vl[c + 1] - means[c + 1] * vl[0];
        }
    }

    let red = ops.reduced_matrix();
    let mut rhs = vec![0.0; total];
    rhs[..nh].copy_from_slice(&rhs_h);
    for c in 0..dim - 1 {
        for c2 in 0..dim - 1 {
            trip.push((row_bie + c, col_g + c2, red[(c, c2)]));
        }
        let mut acc = 0.0;
        for i in 0..dim {
            let wi = wmat[(c, i)];
            if wi == 0.0 {
                continue;
            }
            acc += wi * s_f[i];
            for &(col, v) in &s_rows[i] {
                trip.push((row_bie + c, col, wi * v));
            }
        }
        rhs[row_bie + c] = acc;
    }
    let mut acc = 0.0;
    for i in 0..dim {
        acc -= mrow[i] * s_f[i];
        for &(col, v) in &s_rows[i] {
            trip.push((row_mean, col, -mrow[i] * v));
        }
    }
    rhs[row_mean] = acc;

    let lu = crate::hdg::sparse_lu_of(total, &trip)?;
    let b = Mat::<f64>::from_fn(total, 1, |i, _| rhs[i]);
    let mut x = lu.solve(&b);
    // one step of iterative refinement against the assembled matrix
    let csr = crate::hdg::Csr::from_triplets(total, trip);
    let xv: Vec<f64> = (0..total).map(|i| x[(i, 0)]).collect();
    let ax = csr.matvec(&xv);
    let r = Mat::<f64>::from_fn(total, 1, |i, _| rhs[i] - ax[i]);
    let dx = lu.solve(&r);
    x += &dx;
    let sol: Vec<f64> = (0..total).map(|i| x[(i, 0)]).collect();
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(CouplingError::Oracle("non-finite solution".into()));
    }
    let res = relative_residual_of(&csr, &sol, &rhs);
    if !(res < 1e-8) {
        return Err(CouplingError::Oracle(format!("relative residual {res:.3e}")));
    }

    let g = ops.from_reduced_coords(&sol[col_g..col_c]);
    let constant = sol[col_c];
    let uhat = sol[..nh].to_vec();
    // interior residual with the recovered boundary data folded back in
    sys.boundary_load(
        &|tag, p| if tag == BoundaryTag::Gamma { g.eval(p.s) + constant } else { 0.0 },
        &mut rhs_h,
    );
    let hres = relative_residual_of(&sys.matrix, &uhat, &rhs_h);
    let field = sys.recover(uhat, &y, hres);
    let samples = sys.extrapolate_flux(&field, curve, &params)?;
    let lambda = ops.project_samples(&samples)?.scale(-1.0);
    let u_inf = ops.compute_u_infinity(&lambda, &g.plus_constant(constant));
    Ok(MonolithicSolution {
        g,
        constant,
        lambda,
        u_inf,
        field,
        unknowns: total,
    })
}

//! Homogeneous self-dual interior-point method with Nesterov–Todd scaling
//! and Mehrotra predictor-corrector steps.
//!
//! Zero-cone rows become equalities `Ex = f`; the remaining rows form
//! `Gx + s = h` with `s` in a product of scalar (orthant) and second-order
//! blocks. Each iteration factors the dense reduced system
//!
//! ```text
//! [ GᵀW⁻²G + δI   Eᵀ  ] [dx]
//! [ E            −δI  ] [dy]
//! ```
//!
//! once and reuses it for the τ-direction, the affine step and the combined
//! step, with iterative refinement against the unregularized matrix.

use log::debug;

use super::soc::{
    add_identity, jordan_div, jordan_prod, max_step, min_eig, nt_scaling, BlockKind, Scaling,
};
use super::{
    Cone, ConeProgram, ConeSolution, Residuals, SolveStatus, SolverOptions, ValidationError,
};
use crate::linalg::{dot, LuFactor, Matrix};

struct Block {
    kind: BlockKind,
    offset: usize,
    dim: usize,
    support: Vec<usize>,
    /// `dim × support.len()` dense rows of G restricted to `support`.
    rows: Vec<f64>,
    /// `GₖᵀJGₖ` over `support`, second-order blocks only.
    gjg: Vec<f64>,
}

#[derive(Clone, Copy)]
enum RowSlot {
    Eq(usize),
    Cone(usize),
}

struct Split {
    n: usize,
    c: Vec<f64>,
    e: Matrix,
    f: Vec<f64>,
    h: Vec<f64>,
    blocks: Vec<Block>,
    m: usize,
    slots: Vec<RowSlot>,
    degree: usize,
}

impl Split {
    fn new(p: &ConeProgram) -> Split {
        let n = p.num_vars();
        let mut row_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p.num_rows()];
        for &(i, j, v) in &p.a.entries {
            row_entries[i].push((j, v));
        }
        for r in &mut row_entries {
            r.sort_by_key(|e| e.0);
            r.dedup_by(|later, first| {
                if later.0 == first.0 {
                    first.1 += later.1;
                    true
                } else {
                    false
                }
            });
        }

        let mut eq_rows = Vec::new();
        let mut f = Vec::new();
        let mut h = Vec::new();
        let mut blocks = Vec::new();
        let mut slots = Vec::with_capacity(p.num_rows());
        let mut m = 0;
        let mut row = 0;
        let push_block = |kind: BlockKind, rows: &[usize], m: &mut usize, h: &mut Vec<f64>| {
            let mut support: Vec<usize> = rows
                .iter()
                .flat_map(|&r| row_entries[r].iter().map(|e| e.0))
                .collect();
            support.sort_unstable();
            support.dedup();
            let ns = support.len();
            let mut dense = vec![0.0; rows.len() * ns];
            for (k, &r) in rows.iter().enumerate() {
                for &(j, v) in &row_entries[r] {
                    let pos = support.binary_search(&j).expect("column in support");
                    dense[k * ns + pos] = v;
                }
                h.push(p.b[r]);
            }
            let gjg = if kind == BlockKind::Soc {
                let mut g = vec![0.0; ns * ns];
                for k in 0..rows.len() {
                    let sign = if k == 0 { 1.0 } else { -1.0 };
                    let rk = &dense[k * ns..(k + 1) * ns];
                    for a in 0..ns {
                        if rk[a] == 0.0 {
                            continue;
                        }
                        for b in 0..ns {
                            g[a * ns + b] += sign * rk[a] * rk[b];
                        }
                    }
                }
                g
            } else {
                Vec::new()
            };
            let block = Block {
                kind,
                offset: *m,
                dim: rows.len(),
                support,
                rows: dense,
                gjg,
            };
            *m += rows.len();
            block
        };

        for cone in &p.cones {
            let d = cone.dim();
            match *cone {
                Cone::Zero(_) => {
                    for r in row..row + d {
                        slots.push(RowSlot::Eq(eq_rows.len()));
                        eq_rows.push(r);
                        f.push(p.b[r]);
                    }
                }
                Cone::NonNeg(_) => {
                    for r in row..row + d {
                        slots.push(RowSlot::Cone(m));
                        let b = push_block(BlockKind::Scalar, &[r], &mut m, &mut h);
                        blocks.push(b);
                    }
                }
                Cone::SecondOrder(_) => {
                    for k in 0..d {
                        slots.push(RowSlot::Cone(m + k));
                    }
                    let rows: Vec<usize> = (row..row + d).collect();
                    let b = push_block(BlockKind::Soc, &rows, &mut m, &mut h);
                    blocks.push(b);
                }
            }
            row += d;
        }

        let mut e = Matrix::zeros(eq_rows.len(), n);
        for (k, &r) in eq_rows.iter().enumerate() {
            for &(j, v) in &row_entries[r] {
                e[(k, j)] = v;
            }
        }
        let degree = blocks.len();
        Split {
            n,
            c: p.c.clone(),
            e,
            f,
            h,
            blocks,
            m,
            slots,
            degree,
        }
    }

    fn p(&self) -> usize {
        self.f.len()
    }

    fn g_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for b in &self.blocks {
            let ns = b.support.len();
            for r in 0..b.dim {
                let row = &b.rows[r * ns..(r + 1) * ns];
                out[b.offset + r] = row
                    .iter()
                    .zip(&b.support)
                    .map(|(g, &j)| g * x[j])
                    .sum();
            }
        }
        out
    }

    fn gt_mul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for b in &self.blocks {
            let ns = b.support.len();
            for r in 0..b.dim {
                let vr = v[b.offset + r];
                if vr == 0.0 {
                    continue;
                }
                let row = &b.rows[r * ns..(r + 1) * ns];
                for (g, &j) in row.iter().zip(&b.support) {
                    out[j] += g * vr;
                }
            }
        }
        out
    }

    fn block<'a>(&self, b: &Block, v: &'a [f64]) -> &'a [f64] {
        &v[b.offset..b.offset + b.dim]
    }

    /// Applies a per-block map `f(block, scaling, input, output)` over G-space.
    fn map_blocks(
        &self,
        scalings: &[Scaling],
        v: &[f64],
        f: impl Fn(&Scaling, &[f64], &mut [f64]),
    ) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (b, w) in self.blocks.iter().zip(scalings) {
            let r = b.offset..b.offset + b.dim;
            f(w, &v[r.clone()], &mut out[r]);
        }
        out
    }

    /// `GᵀW⁻²G` assembled from per-block structure.
    fn reduced_matrix(&self, scalings: &[Scaling]) -> Matrix {
        let mut k = Matrix::zeros(self.n, self.n);
        for (b, w) in self.blocks.iter().zip(scalings) {
            let ns = b.support.len();
            match w {
                Scaling::Scalar { w } => {
                    let coef = 1.0 / (w * w);
                    let g = &b.rows[..ns];
                    for a in 0..ns {
                        let ga = coef * g[a];
                        for c in 0..ns {
                            k[(b.support[a], b.support[c])] += ga * g[c];
                        }
                    }
                }
                Scaling::Soc { eta, wbar } => {
                    // W⁻² = (2 a aᵀ − J)/η² with a = J w̄.
                    let mut ga = vec![0.0; ns];
                    for r in 0..b.dim {
                        let ar = if r == 0 { wbar[0] } else { -wbar[r] };
                        let row = &b.rows[r * ns..(r + 1) * ns];
                        for c in 0..ns {
                            ga[c] += row[c] * ar;
                        }
                    }
                    let inv = 1.0 / (eta * eta);
                    for a in 0..ns {
                        for c in 0..ns {
                            k[(b.support[a], b.support[c])] +=
                                inv * (2.0 * ga[a] * ga[c] - b.gjg[a * ns + c]);
                        }
                    }
                }
            }
        }
        k
    }
}

struct Kkt {
    exact: Matrix,
    lu: LuFactor,
    refine: usize,
}

impl Kkt {
    fn new(split: &Split, k: &Matrix, reg: f64, refine: usize) -> Option<Kkt> {
        let (n, p) = (split.n, split.p());
        let mut exact = Matrix::zeros(n + p, n + p);
        for i in 0..n {
            exact.row_mut(i)[..n].copy_from_slice(k.row(i));
        }
        for i in 0..p {
            for j in 0..n {
                let v = split.e[(i, j)];
                exact[(n + i, j)] = v;
                exact[(j, n + i)] = v;
            }
        }
        let mut regd = exact.clone();
        for i in 0..n {
            regd[(i, i)] += reg;
        }
        for i in n..n + p {
            regd[(i, i)] -= reg;
        }
        let lu = LuFactor::new(regd).ok()?;
        Some(Kkt { exact, lu, refine })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.lu.solve(rhs);
        for _ in 0..self.refine {
            let ax = self.exact.mul_vec(&x);
            let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let rn = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if rn == 0.0 {
                break;
            }
            let dx = self.lu.solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        x
    }
}

struct Iterate {
    x: Vec<f64>,
    y: Vec<f64>,
    s: Vec<f64>,
    z: Vec<f64>,
    tau: f64,
    kappa: f64,
}

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    ds: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Solves `p` from a default starting point.
///
/// Malformed programs are rejected before any iteration with the full list
/// of [`super::Defect`]s; every other outcome is reported through
/// [`ConeSolution::status`].
pub fn solve(p: &ConeProgram, opts: &SolverOptions) -> Result<ConeSolution, ValidationError> {
    let defects = p.validate();
    if !defects.is_empty() {
        return Err(ValidationError(defects));
    }
    let split = Split::new(p);
    let start = cold_start(&split, opts);
    Ok(run(&split, start, opts))
}

/// Solves `p` starting from a previously returned solution.
pub fn solve_from(
    p: &ConeProgram,
    opts: &SolverOptions,
    start: &ConeSolution,
) -> Result<ConeSolution, ValidationError> {
    let defects = p.validate();
    if !defects.is_empty() {
        return Err(ValidationError(defects));
    }
    let split = Split::new(p);
    if start.primal.len() != split.n
        || start.dual.len() != p.num_rows()
        || start.slack.len() != p.num_rows()
        || start.primal.iter().chain(&start.dual).any(|v| !v.is_finite())
    {
        let it = cold_start(&split, opts);
        return Ok(run(&split, it, opts));
    }
    let mut y = vec![0.0; split.p()];
    let mut s = vec![0.0; split.m];
    let mut z = vec![0.0; split.m];
    for (row, slot) in split.slots.iter().enumerate() {
        match *slot {
            RowSlot::Eq(i) => y[i] = start.dual[row],
            RowSlot::Cone(i) => {
                s[i] = start.slack[row];
                z[i] = start.dual[row];
            }
        }
    }
    const MARGIN: f64 = 1e-12;
    for b in &split.blocks {
        for v in [&mut s, &mut z] {
            let blk = &mut v[b.offset..b.offset + b.dim];
            let me = min_eig(b.kind, blk);
            if me < MARGIN {
                add_identity(b.kind, blk, MARGIN - me);
            }
        }
    }
    let kappa = (dot(&s, &z) / (split.degree + 1) as f64).max(MARGIN);
    let it = Iterate {
        x: start.primal.clone(),
        y,
        s,
        z,
        tau: 1.0,
        kappa,
    };
    Ok(run(&split, it, opts))
}

fn shift_into_cone(split: &Split, v: &mut [f64]) {
    let worst = split
        .blocks
        .iter()
        .map(|b| min_eig(b.kind, &v[b.offset..b.offset + b.dim]))
        .fold(f64::INFINITY, f64::min);
    if worst.is_finite() && worst <= 0.0 {
        for b in &split.blocks {
            add_identity(b.kind, &mut v[b.offset..b.offset + b.dim], 1.0 - worst);
        }
    }
}

fn cold_start(split: &Split, opts: &SolverOptions) -> Iterate {
    let n = split.n;
    let p = split.p();
    let unit = |m: usize| -> Vec<f64> {
        let mut v = vec![0.0; m];
        for b in &split.blocks {
            v[b.offset] = 1.0;
        }
        v
    };
    let identity: Vec<Scaling> = split
        .blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Scalar => Scaling::Scalar { w: 1.0 },
            BlockKind::Soc => {
                let mut wbar = vec![0.0; b.dim];
                wbar[0] = 1.0;
                Scaling::Soc { eta: 1.0, wbar }
            }
        })
        .collect();
    let k = split.reduced_matrix(&identity);
    let fallback = || Iterate {
        x: vec![0.0; n],
        y: vec![0.0; p],
        s: unit(split.m),
        z: unit(split.m),
        tau: 1.0,
        kappa: 1.0,
    };
    let Some(kkt) = Kkt::new(split, &k, opts.static_reg.max(1e-8), opts.refine_steps) else {
        return fallback();
    };

    // Least-norm slack: min ‖s‖ s.t. Gx + s = h, Ex = f.
    let mut rhs = split.gt_mul(&split.h);
    rhs.extend_from_slice(&split.f);
    let sol = kkt.solve(&rhs);
    let x = sol[..n].to_vec();
    let gx = split.g_mul(&x);
    let mut s: Vec<f64> = split.h.iter().zip(&gx).map(|(h, g)| h - g).collect();

    // Least-norm dual: min ‖z‖ s.t. Gᵀz + Eᵀy + c = 0.
    let mut rhs: Vec<f64> = split.c.iter().map(|v| -v).collect();
    rhs.extend(std::iter::repeat(0.0).take(p));
    let sol = kkt.solve(&rhs);
    let mut z = split.g_mul(&sol[..n]);
    let y = sol[n..].to_vec();

    if x.iter().chain(&s).chain(&z).chain(&y).any(|v| !v.is_finite()) {
        return fallback();
    }
    shift_into_cone(split, &mut s);
    shift_into_cone(split, &mut z);
    Iterate {
        x,
        y,
        s,
        z,
        tau: 1.0,
        kappa: 1.0,
    }
}

fn run(split: &Split, mut it: Iterate, opts: &SolverOptions) -> ConeSolution {
    let n = split.n;
    let p = split.p();
    let bnorm = (dot(&split.f, &split.f) + dot(&split.h, &split.h)).sqrt();
    let cnorm = norm(&split.c);
    let degree = split.degree as f64;
    let mut stalls = 0;
    let status;
    let mut iterations = 0;
    let mut residuals;

    loop {
        // Residuals of the homogeneous embedding.
        let ety = split.e.tr_mul_vec(&it.y);
        let gtz = split.gt_mul(&it.z);
        let rx: Vec<f64> = (0..n)
            .map(|j| ety[j] + gtz[j] + split.c[j] * it.tau)
            .collect();
        let ex = split.e.mul_vec(&it.x);
        let ry: Vec<f64> = (0..p).map(|i| ex[i] - split.f[i] * it.tau).collect();
        let gx = split.g_mul(&it.x);
        let rz: Vec<f64> = (0..split.m)
            .map(|i| gx[i] + it.s[i] - split.h[i] * it.tau)
            .collect();
        let ctx = dot(&split.c, &it.x);
        let btz = dot(&split.f, &it.y) + dot(&split.h, &it.z);
        let rtau = ctx + btz + it.kappa;
        let mu = (dot(&it.s, &it.z) + it.tau * it.kappa) / (degree + 1.0);

        let pobj = ctx / it.tau;
        let dobj = -btz / it.tau;
        residuals = Residuals {
            primal: (dot(&ry, &ry) + dot(&rz, &rz)).sqrt() / it.tau / (1.0 + bnorm),
            dual: norm(&rx) / it.tau / (1.0 + cnorm),
            gap: (pobj - dobj).abs() / pobj.abs().min(dobj.abs()).max(1.0),
        };
        debug!(
            "iter {iterations:3} pobj {pobj:+.6e} dobj {dobj:+.6e} pres {:.2e} dres {:.2e} gap {:.2e} mu {mu:.2e} tau {:.2e} kappa {:.2e}",
            residuals.primal, residuals.dual, residuals.gap, it.tau, it.kappa
        );
        if !(mu.is_finite() && it.tau.is_finite() && residuals.primal.is_finite()) {
            status = SolveStatus::NumericalFailure;
            break;
        }
        if residuals.primal <= opts.tol_feas
            && residuals.dual <= opts.tol_feas
            && residuals.gap <= opts.tol_gap
        {
            status = SolveStatus::Optimal;
            break;
        }
        // Farkas-type certificates.
        if btz < 0.0 {
            let cert: Vec<f64> = ety.iter().zip(&gtz).map(|(a, b)| a + b).collect();
            if norm(&cert) <= opts.tol_infeas * -btz {
                status = SolveStatus::Infeasible;
                break;
            }
        }
        if ctx < 0.0 {
            let gxs: Vec<f64> = gx.iter().zip(&it.s).map(|(a, b)| a + b).collect();
            let res = (dot(&ex, &ex) + dot(&gxs, &gxs)).sqrt();
            if res <= opts.tol_infeas * -ctx {
                status = SolveStatus::Unbounded;
                break;
            }
        }
        if iterations >= opts.max_iters {
            status = SolveStatus::MaxIters;
            break;
        }
        iterations += 1;

        let Some(scalings) = split
            .blocks
            .iter()
            .map(|b| nt_scaling(b.kind, split.block(b, &it.s), split.block(b, &it.z)))
            .collect::<Option<Vec<_>>>()
        else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let lambda = split.map_blocks(&scalings, &it.z, |w, v, out| w.apply(v, out));

        let k = split.reduced_matrix(&scalings);
        let Some(kkt) = Kkt::new(split, &k, opts.static_reg, opts.refine_steps) else {
            status = SolveStatus::NumericalFailure;
            break;
        };

        // Direction component proportional to dτ.
        let winv2h = split.map_blocks(&scalings, &split.h, |w, v, out| w.apply_inv_sq(v, out));
        let mut rhs1 = split.gt_mul(&winv2h);
        for (r, c) in rhs1.iter_mut().zip(&split.c) {
            *r -= c;
        }
        rhs1.extend_from_slice(&split.f);
        let sol1 = kkt.solve(&rhs1);
        let (dx1, dy1) = sol1.split_at(n);
        let gdx1 = split.g_mul(dx1);
        let tmp: Vec<f64> = gdx1.iter().zip(&split.h).map(|(g, h)| g - h).collect();
        let dz1 = split.map_blocks(&scalings, &tmp, |w, v, out| w.apply_inv_sq(v, out));
        let denom = dot(&split.c, dx1) + dot(&split.f, dy1) + dot(&split.h, &dz1)
            - it.kappa / it.tau;

        let newton = |eta: f64, xi: &[f64], t_target: f64| -> Direction {
            let eta_rz: Vec<f64> = rz.iter().map(|v| eta * v).collect();
            let a = split.map_blocks(&scalings, &eta_rz, |w, v, out| w.apply_inv_sq(v, out));
            let b = split.map_blocks(&scalings, xi, |w, v, out| w.apply_inv(v, out));
            let tmp: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
            let gt = split.gt_mul(&tmp);
            let mut rhs: Vec<f64> = (0..n).map(|j| -eta * rx[j] - gt[j]).collect();
            rhs.extend(ry.iter().map(|v| -eta * v));
            let sol2 = kkt.solve(&rhs);
            let (dx2, dy2) = sol2.split_at(n);
            let gdx2 = split.g_mul(dx2);
            let w2 = split.map_blocks(&scalings, &gdx2, |w, v, out| w.apply_inv_sq(v, out));
            let dz2: Vec<f64> = w2.iter().zip(&tmp).map(|(u, v)| u + v).collect();
            let num = -eta * rtau - dot(&split.c, dx2) - dot(&split.f, dy2)
                - dot(&split.h, &dz2)
                - t_target / it.tau;
            let dtau = num / denom;
            let dx: Vec<f64> = (0..n).map(|j| dx2[j] + dtau * dx1[j]).collect();
            let dy: Vec<f64> = (0..p).map(|i| dy2[i] + dtau * dy1[i]).collect();
            let dz: Vec<f64> = (0..split.m).map(|i| dz2[i] + dtau * dz1[i]).collect();
            // From the linearized primal rows rather than Wξ − W²dz, which
            // loses the primal residual once the scaling is badly conditioned.
            let gdx = split.g_mul(&dx);
            let ds: Vec<f64> = (0..split.m)
                .map(|i| split.h[i] * dtau - gdx[i] - eta * rz[i])
                .collect();
            let dkappa = (t_target - it.kappa * dtau) / it.tau;
            Direction {
                dx,
                dy,
                dz,
                ds,
                dtau,
                dkappa,
            }
        };

        let step_to_boundary = |d: &Direction| -> f64 {
            let mut alpha = f64::INFINITY;
            for b in &split.blocks {
                alpha = alpha
                    .min(max_step(b.kind, split.block(b, &it.s), split.block(b, &d.ds)))
                    .min(max_step(b.kind, split.block(b, &it.z), split.block(b, &d.dz)));
            }
            if d.dtau < 0.0 {
                alpha = alpha.min(-it.tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                alpha = alpha.min(-it.kappa / d.dkappa);
            }
            alpha
        };

        // Predictor.
        let xi_aff: Vec<f64> = lambda.iter().map(|v| -v).collect();
        let aff = newton(1.0, &xi_aff, -it.tau * it.kappa);
        let alpha_aff = step_to_boundary(&aff).min(1.0);
        let sigma = (1.0 - alpha_aff).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let winv_ds = split.map_blocks(&scalings, &aff.ds, |w, v, out| w.apply_inv(v, out));
        let w_dz = split.map_blocks(&scalings, &aff.dz, |w, v, out| w.apply(v, out));
        let mut xi = vec![0.0; split.m];
        for b in &split.blocks {
            let r = b.offset..b.offset + b.dim;
            let mut ll = vec![0.0; b.dim];
            let mut cross = vec![0.0; b.dim];
            jordan_prod(b.kind, &lambda[r.clone()], &lambda[r.clone()], &mut ll);
            jordan_prod(b.kind, &winv_ds[r.clone()], &w_dz[r.clone()], &mut cross);
            let mut target: Vec<f64> = ll.iter().zip(&cross).map(|(a, c)| -a - c).collect();
            add_identity(b.kind, &mut target, sigma * mu);
            jordan_div(b.kind, &lambda[r.clone()], &target, &mut xi[r]);
        }
        let t_target = -it.tau * it.kappa - aff.dtau * aff.dkappa + sigma * mu;
        let dir = newton(1.0 - sigma, &xi, t_target);
        let alpha = (opts.step_backoff * step_to_boundary(&dir)).min(1.0);

        if !alpha.is_finite() || alpha < 1e-12 {
            stalls += 1;
            if stalls >= 3 {
                status = SolveStatus::NumericalFailure;
                break;
            }
            continue;
        }
        stalls = 0;
        for (v, d) in it.x.iter_mut().zip(&dir.dx) {
            *v += alpha * d;
        }
        for (v, d) in it.y.iter_mut().zip(&dir.dy) {
            *v += alpha * d;
        }
        for (v, d) in it.s.iter_mut().zip(&dir.ds) {
            *v += alpha * d;
        }
        for (v, d) in it.z.iter_mut().zip(&dir.dz) {
            *v += alpha * d;
        }
        it.tau += alpha * dir.dtau;
        it.kappa += alpha * dir.dkappa;
    }

    finish(split, it, status, iterations, residuals)
}

fn finish(
    split: &Split,
    it: Iterate,
    status: SolveStatus,
    iterations: usize,
    residuals: Residuals,
) -> ConeSolution {
    let rows = split.slots.len();
    let (xs, ds, obj, dobj) = match status {
        SolveStatus::Infeasible => {
            let k = -(dot(&split.f, &it.y) + dot(&split.h, &it.z));
            (1.0 / it.tau, 1.0 / k, f64::INFINITY, f64::INFINITY)
        }
        SolveStatus::Unbounded => {
            let k = -dot(&split.c, &it.x);
            (1.0 / k, 1.0 / it.tau, f64::NEG_INFINITY, f64::NEG_INFINITY)
        }
        _ => {
            let t = 1.0 / it.tau;
            (
                t,
                t,
                dot(&split.c, &it.x) * t,
                -(dot(&split.f, &it.y) + dot(&split.h, &it.z)) * t,
            )
        }
    };
    let mut dual = vec![0.0; rows];
    let mut slack = vec![0.0; rows];
    for (row, slot) in split.slots.iter().enumerate() {
        match *slot {
            RowSlot::Eq(i) => dual[row] = it.y[i] * ds,
            RowSlot::Cone(i) => {
                dual[row] = it.z[i] * ds;
                slack[row] = it.s[i] * xs;
            }
        }
    }
    ConeSolution {
        status,
        primal: it.x.iter().map(|v| v * xs).collect(),
        slack,
        dual,
        objective: obj,
        dual_objective: dobj,
        iterations,
        residuals,
    }
}

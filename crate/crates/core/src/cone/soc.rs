//! Per-block cone algebra: Jordan products, Nesterov–Todd scaling and step
//! lengths to the boundary.
//!
//! Non-negative orthants are handled as scalar blocks, so every routine here
//! takes a single block slice and a [`BlockKind`].

use crate::linalg::dot;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum BlockKind {
    Scalar,
    Soc,
}

/// NT scaling `W` for one block, with `W z = W⁻¹ s = λ`.
#[derive(Clone, Debug)]
pub(super) enum Scaling {
    Scalar { w: f64 },
    /// `W = η·[[w̄₀, w̄₁ᵀ], [w̄₁, I + w̄₁w̄₁ᵀ/(1 + w̄₀)]]`, `w̄ᵀJw̄ = 1`.
    Soc { eta: f64, wbar: Vec<f64> },
}

/// `sqrt(v₀² − ‖v₁‖²)` if `v` lies strictly inside the cone.
pub(super) fn soc_jnorm(v: &[f64]) -> Option<f64> {
    let tail = dot(&v[1..], &v[1..]).sqrt();
    let (lo, hi) = (v[0] - tail, v[0] + tail);
    if lo > 0.0 && lo.is_finite() && hi.is_finite() {
        Some((lo * hi).sqrt())
    } else {
        None
    }
}

/// Smallest Jordan eigenvalue of `v`.
pub(super) fn min_eig(kind: BlockKind, v: &[f64]) -> f64 {
    match kind {
        BlockKind::Scalar => v[0],
        BlockKind::Soc => v[0] - dot(&v[1..], &v[1..]).sqrt(),
    }
}

pub(super) fn add_identity(kind: BlockKind, v: &mut [f64], alpha: f64) {
    match kind {
        BlockKind::Scalar => v[0] += alpha,
        BlockKind::Soc => v[0] += alpha,
    }
}

pub(super) fn nt_scaling(kind: BlockKind, s: &[f64], z: &[f64]) -> Option<Scaling> {
    match kind {
        BlockKind::Scalar => {
            if s[0] > 0.0 && z[0] > 0.0 {
                Some(Scaling::Scalar {
                    w: (s[0] / z[0]).sqrt(),
                })
            } else {
                None
            }
        }
        BlockKind::Soc => {
            let sn = soc_jnorm(s)?;
            let zn = soc_jnorm(z)?;
            let d = s.len();
            let sbar: Vec<f64> = s.iter().map(|v| v / sn).collect();
            let zbar: Vec<f64> = z.iter().map(|v| v / zn).collect();
            let gamma = ((1.0 + dot(&sbar, &zbar)) / 2.0).sqrt();
            let mut wbar = vec![0.0; d];
            wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
            for i in 1..d {
                wbar[i] = (sbar[i] - zbar[i]) / (2.0 * gamma);
            }
            // Restore w̄ᵀJw̄ = 1 exactly against rounding in the tail.
            let tail = dot(&wbar[1..], &wbar[1..]);
            wbar[0] = (1.0 + tail).sqrt();
            Some(Scaling::Soc {
                eta: (sn / zn).sqrt(),
                wbar,
            })
        }
    }
}

impl Scaling {
    /// `out = W v`
    pub(super) fn apply(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Scalar { w } => out[0] = w * v[0],
            Scaling::Soc { eta, wbar } => {
                let t = dot(&wbar[1..], &v[1..]);
                out[0] = eta * (wbar[0] * v[0] + t);
                let k = t / (1.0 + wbar[0]) + v[0];
                for i in 1..v.len() {
                    out[i] = eta * (v[i] + k * wbar[i]);
                }
            }
        }
    }

    /// `out = W⁻¹ v`
    pub(super) fn apply_inv(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Scalar { w } => out[0] = v[0] / w,
            Scaling::Soc { eta, wbar } => {
                let t = dot(&wbar[1..], &v[1..]);
                out[0] = (wbar[0] * v[0] - t) / eta;
                let k = t / (1.0 + wbar[0]) - v[0];
                for i in 1..v.len() {
                    out[i] = (v[i] + k * wbar[i]) / eta;
                }
            }
        }
    }

    /// `out = W² v`
    #[cfg(test)]
    pub(super) fn apply_sq(&self, v: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; v.len()];
        self.apply(v, &mut tmp);
        self.apply(&tmp, out);
    }

    /// `out = W⁻² v`
    pub(super) fn apply_inv_sq(&self, v: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; v.len()];
        self.apply_inv(v, &mut tmp);
        self.apply_inv(&tmp, out);
    }
}

/// `out = u ∘ v`
pub(super) fn jordan_prod(kind: BlockKind, u: &[f64], v: &[f64], out: &mut [f64]) {
    match kind {
        BlockKind::Scalar => out[0] = u[0] * v[0],
        BlockKind::Soc => {
            out[0] = dot(u, v);
            for i in 1..u.len() {
                out[i] = u[0] * v[i] + v[0] * u[i];
            }
        }
    }
}

/// Solves `λ ∘ out = v` for `λ` strictly inside the cone.
pub(super) fn jordan_div(kind: BlockKind, lambda: &[f64], v: &[f64], out: &mut [f64]) {
    match kind {
        BlockKind::Scalar => out[0] = v[0] / lambda[0],
        BlockKind::Soc => {
            let l0 = lambda[0];
            let det = l0 * l0 - dot(&lambda[1..], &lambda[1..]);
            let x0 = (l0 * v[0] - dot(&lambda[1..], &v[1..])) / det;
            out[0] = x0;
            for i in 1..v.len() {
                out[i] = (v[i] - x0 * lambda[i]) / l0;
            }
        }
    }
}

/// Largest `α ≥ 0` keeping `v + α d` in the (closed) cone; `f64::INFINITY`
/// if the ray never leaves it.
pub(super) fn max_step(kind: BlockKind, v: &[f64], d: &[f64]) -> f64 {
    match kind {
        BlockKind::Scalar => {
            if d[0] < 0.0 {
                (-v[0] / d[0]).max(0.0)
            } else {
                f64::INFINITY
            }
        }
        BlockKind::Soc => {
            // q(α) = a α² + b α + c is the J-quadratic of v + α d.
            let a = d[0] * d[0] - dot(&d[1..], &d[1..]);
            let b = 2.0 * (v[0] * d[0] - dot(&v[1..], &d[1..]));
            let c = v[0] * v[0] - dot(&v[1..], &v[1..]);
            if c <= 0.0 || v[0] <= 0.0 {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            if a == 0.0 {
                if b < 0.0 {
                    best = -c / b;
                }
            } else {
                let disc = b * b - 4.0 * a * c;
                if disc >= 0.0 {
                    let q = -0.5 * (b + disc.sqrt().copysign(b));
                    for root in [q / a, if q != 0.0 { c / q } else { f64::NAN }] {
                        if root > 0.0 && root < best {
                            best = root;
                        }
                    }
                }
            }
            // The first coordinate must stay non-negative as well; a ray can
            // only reach −K through the apex, which is a root of q, but guard
            // against rounding.
            if d[0] < 0.0 {
                best = best.min(-v[0] / d[0]);
            }
            best
        }
    }
}

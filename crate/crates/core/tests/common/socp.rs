//! Small cone programs with known optima.

use riskbudget::cone::{Cone, ConeProgram, SparseMatrix};

/// Row-by-row builder for `Ax + s = b`, `s ∈ K`.
pub struct Builder {
    n: usize,
    c: Vec<f64>,
    rows: Vec<(Vec<(usize, f64)>, f64)>,
    cones: Vec<Cone>,
}

impl Builder {
    pub fn new(c: &[f64]) -> Self {
        Builder {
            n: c.len(),
            c: c.to_vec(),
            rows: Vec::new(),
            cones: Vec::new(),
        }
    }

    /// Rows `s = b − Ax` of one cone block.
    pub fn block(mut self, cone: Cone, rows: &[(&[(usize, f64)], f64)]) -> Self {
        assert_eq!(cone.dim(), rows.len());
        for (a, b) in rows {
            self.rows.push((a.to_vec(), *b));
        }
        self.cones.push(cone);
        self
    }

    pub fn build(self) -> ConeProgram {
        let mut a = SparseMatrix::new(self.rows.len(), self.n);
        let mut b = Vec::new();
        for (i, (entries, rhs)) in self.rows.iter().enumerate() {
            for &(j, v) in entries {
                a.push(i, j, v);
            }
            b.push(*rhs);
        }
        ConeProgram {
            c: self.c,
            a,
            b,
            cones: self.cones,
        }
    }
}

/// `(name, program, optimal objective)`.
pub fn battery() -> Vec<(&'static str, ConeProgram, f64)> {
    let s2 = 2f64.sqrt();
    vec![
        (
            "lower bound",
            Builder::new(&[1.0]).block(Cone::NonNeg(1), &[(&[(0, -1.0)], -3.0)]).build(),
            3.0,
        ),
        (
            "upper bound",
            Builder::new(&[-1.0]).block(Cone::NonNeg(1), &[(&[(0, 1.0)], 2.0)]).build(),
            -2.0,
        ),
        (
            "equality fixes objective",
            Builder::new(&[1.0, 1.0])
                .block(Cone::Zero(1), &[(&[(0, 1.0), (1, 1.0)], 4.0)])
                .build(),
            4.0,
        ),
        (
            "small LP",
            Builder::new(&[-1.0, -2.0])
                .block(
                    Cone::NonNeg(4),
                    &[
                        (&[(0, 1.0), (1, 1.0)], 4.0),
                        (&[(0, 1.0)], 3.0),
                        (&[(0, -1.0)], 0.0),
                        (&[(1, -1.0)], 0.0),
                    ],
                )
                .build(),
            -8.0,
        ),
        (
            "distance from point to line",
            // min t s.t. ‖(x − 1, y − 2)‖ ≤ t, x + y = 5.
            Builder::new(&[0.0, 0.0, 1.0])
                .block(Cone::Zero(1), &[(&[(0, 1.0), (1, 1.0)], 5.0)])
                .block(
                    Cone::SecondOrder(3),
                    &[(&[(2, -1.0)], 0.0), (&[(0, -1.0)], -1.0), (&[(1, -1.0)], -2.0)],
                )
                .build(),
            s2,
        ),
        (
            "euclidean norm",
            Builder::new(&[1.0])
                .block(Cone::SecondOrder(3), &[(&[(0, -1.0)], 0.0), (&[], 3.0), (&[], 4.0)])
                .build(),
            5.0,
        ),
        (
            "least-norm point of a hyperplane",
            // min t s.t. ‖x‖ ≤ t, x₁ + 2x₂ + 2x₃ = 1.
            Builder::new(&[0.0, 0.0, 0.0, 1.0])
                .block(Cone::Zero(1), &[(&[(0, 1.0), (1, 2.0), (2, 2.0)], 1.0)])
                .block(
                    Cone::SecondOrder(4),
                    &[(&[(3, -1.0)], 0.0), (&[(0, -1.0)], 0.0), (&[(1, -1.0)], 0.0), (&[(2, -1.0)], 0.0)],
                )
                .build(),
            1.0 / 3.0,
        ),
        (
            "linear objective over the unit disc",
            Builder::new(&[-1.0, -1.0])
                .block(Cone::SecondOrder(3), &[(&[], 1.0), (&[(0, -1.0)], 0.0), (&[(1, -1.0)], 0.0)])
                .build(),
            -s2,
        ),
        (
            "linear objective over the unit ball",
            Builder::new(&[3.0, -4.0, 12.0])
                .block(
                    Cone::SecondOrder(4),
                    &[(&[], 1.0), (&[(0, -1.0)], 0.0), (&[(1, -1.0)], 0.0), (&[(2, -1.0)], 0.0)],
                )
                .build(),
            -13.0,
        ),
        (
            "hyperbolic constraint xy ≥ 1",
            // ‖(x − y, 2)‖ ≤ x + y.
            Builder::new(&[1.0, 1.0])
                .block(
                    Cone::SecondOrder(3),
                    &[(&[(0, -1.0), (1, -1.0)], 0.0), (&[(0, -1.0), (1, 1.0)], 0.0), (&[], 2.0)],
                )
                .build(),
            2.0,
        ),
        (
            "square epigraph at a fixed point",
            // t ≥ x² as ‖(2x, t − 1)‖ ≤ t + 1, with x = 3.
            Builder::new(&[0.0, 1.0])
                .block(Cone::Zero(1), &[(&[(0, 1.0)], 3.0)])
                .block(
                    Cone::SecondOrder(3),
                    &[(&[(1, -1.0)], 1.0), (&[(0, -2.0)], 0.0), (&[(1, -1.0)], -1.0)],
                )
                .build(),
            9.0,
        ),
        (
            "scalar quadratic x² − 4x",
            Builder::new(&[-4.0, 1.0])
                .block(
                    Cone::SecondOrder(3),
                    &[(&[(1, -1.0)], 1.0), (&[(0, -2.0)], 0.0), (&[(1, -1.0)], -1.0)],
                )
                .build(),
            -4.0,
        ),
        (
            "covering LP",
            Builder::new(&[2.0, 1.0])
                .block(
                    Cone::NonNeg(3),
                    &[(&[(0, -1.0)], 0.0), (&[(1, -1.0)], 0.0), (&[(0, -1.0), (1, -1.0)], -1.0)],
                )
                .build(),
            1.0,
        ),
        (
            "disc slice",
            // min −x s.t. ‖(x, y)‖ ≤ 2, y = 1.
            Builder::new(&[-1.0, 0.0])
                .block(Cone::Zero(1), &[(&[(1, 1.0)], 1.0)])
                .block(Cone::SecondOrder(3), &[(&[], 2.0), (&[(0, -1.0)], 0.0), (&[(1, -1.0)], 0.0)])
                .build(),
            -3f64.sqrt(),
        ),
        (
            "minimum volatility with a budget",
            // min ‖diag(1, 2, 3) x‖ s.t. 1ᵀx = 1.
            Builder::new(&[0.0, 0.0, 0.0, 1.0])
                .block(Cone::Zero(1), &[(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0)])
                .block(
                    Cone::SecondOrder(4),
                    &[(&[(3, -1.0)], 0.0), (&[(0, -1.0)], 0.0), (&[(1, -2.0)], 0.0), (&[(2, -3.0)], 0.0)],
                )
                .build(),
            1.0 / (1.0f64 + 0.25 + 1.0 / 9.0).sqrt(),
        ),
        (
            "bound with a pinned second variable",
            Builder::new(&[1.0, 0.0])
                .block(Cone::Zero(1), &[(&[(1, 1.0)], 7.0)])
                .block(Cone::NonNeg(1), &[(&[(0, -1.0)], 5.0)])
                .build(),
            -5.0,
        ),
        (
            "norm of pinned coordinates",
            Builder::new(&[1.0, 0.0, 0.0])
                .block(Cone::Zero(2), &[(&[(1, 1.0)], 3.0), (&[(2, 1.0)], 4.0)])
                .block(
                    Cone::SecondOrder(3),
                    &[(&[(0, -1.0)], 0.0), (&[(1, -1.0)], 0.0), (&[(2, -1.0)], 0.0)],
                )
                .build(),
            5.0,
        ),
        (
            "large cost coefficient",
            Builder::new(&[1000.0]).block(Cone::NonNeg(1), &[(&[(0, -1.0)], -0.25)]).build(),
            250.0,
        ),
        (
            "simplex LP",
            Builder::new(&[1.0, 2.0, 3.0])
                .block(Cone::Zero(1), &[(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0)])
                .block(
                    Cone::NonNeg(3),
                    &[(&[(0, -1.0)], 0.0), (&[(1, -1.0)], 0.0), (&[(2, -1.0)], 0.0)],
                )
                .build(),
            1.0,
        ),
        (
            "geometric mean",
            // max y s.t. y² ≤ x₁x₂, x₁ + x₂ = 2.
            Builder::new(&[0.0, 0.0, -1.0])
                .block(Cone::Zero(1), &[(&[(0, 1.0), (1, 1.0)], 2.0)])
                .block(
                    Cone::SecondOrder(3),
                    &[(&[(0, -1.0), (1, -1.0)], 0.0), (&[(0, -1.0), (1, 1.0)], 0.0), (&[(2, -2.0)], 0.0)],
                )
                .build(),
            -1.0,
        ),
    ]
}

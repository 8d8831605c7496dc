//! Independent primal minimizers for the L2-loss SVM.

use discatt::classifier::SvmProblem;
use discatt::Matrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Problem {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub c: f64,
}

impl Problem {
    pub fn objective(&self, w: &[f64], b: f64) -> f64 {
        let mut loss = 0.0;
        for (row, y) in self.x.iter().zip(&self.y) {
            let f: f64 = row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() + b;
            let h = (1.0 - y * f).max(0.0);
            loss += h * h;
        }
        0.5 * (w.iter().map(|v| v * v).sum::<f64>() + b * b) + self.c * loss
    }

    /// Gradient of the primal with the intercept as the last coordinate.
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let d = p.len() - 1;
        let mut g = p.to_vec();
        for (row, y) in self.x.iter().zip(&self.y) {
            let f: f64 = row.iter().zip(p).map(|(x, w)| x * w).sum::<f64>() + p[d];
            let h = 1.0 - y * f;
            if h > 0.0 {
                let s = -2.0 * self.c * h * y;
                for j in 0..d {
                    g[j] += s * row[j];
                }
                g[d] += s;
            }
        }
        g
    }

    pub fn matrix(&self) -> SvmProblem {
        let d = self.x[0].len();
        SvmProblem::new(Matrix::from_rows(d, &self.x).unwrap(), self.y.clone()).unwrap()
    }
}

/// Coarse-to-fine grid over (w, b) for one feature.
pub fn grid_oracle(p: &Problem) -> f64 {
    let (mut cw, mut cb, mut half) = (0.0, 0.0, 50.0);
    let steps = 40;
    while half > 1e-10 {
        let mut best = (f64::INFINITY, cw, cb);
        for i in 0..=steps {
            for j in 0..=steps {
                let w = cw - half + 2.0 * half * i as f64 / steps as f64;
                let b = cb - half + 2.0 * half * j as f64 / steps as f64;
                let v = p.objective(&[w], b);
                if v < best.0 {
                    best = (v, w, b);
                }
            }
        }
        cw = best.1;
        cb = best.2;
        half *= 0.25;
    }
    p.objective(&[cw], cb)
}

/// Plain gradient descent with step 1/L; the primal is 1-strongly convex
/// with an L-Lipschitz gradient, so this converges linearly.
pub fn descent_oracle(p: &Problem) -> f64 {
    let d = p.x[0].len();
    let lipschitz = 1.0
        + 2.0
            * p.c
            * p.x
                .iter()
                .map(|r| r.iter().map(|v| v * v).sum::<f64>() + 1.0)
                .sum::<f64>();
    let mut w = vec![0.0; d + 1];
    for _ in 0..2_000_000 {
        let g = p.gradient(&w);
        if g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-12 {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= gi / lipschitz;
        }
    }
    p.objective(&w[..d], w[d])
}

pub fn random_problem(rng: &mut ChaCha8Rng) -> Problem {
    let n = rng.gen_range(2..=20);
    let d = rng.gen_range(1..=3);
    let c = [0.1, 1.0, 10.0][rng.gen_range(0..3)];
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    // both classes are always present
    let y = (0..n)
        .map(|i| match i {
            0 => 1.0,
            1 => -1.0,
            _ if rng.gen_bool(0.5) => 1.0,
            _ => -1.0,
        })
        .collect();
    Problem { x, y, c }
}

/// Best objective found by the oracles for `p`.
pub fn oracle_objective(p: &Problem) -> f64 {
    if p.x[0].len() == 1 {
        grid_oracle(p).min(descent_oracle(p))
    } else {
        descent_oracle(p)
    }
}

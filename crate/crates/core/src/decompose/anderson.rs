use std::collections::VecDeque;

/// Type-II Anderson mixing for a fixed-point map `z ↦ T(z)` on real vectors.
///
/// Stores the last `memory` differences of iterates and of residuals
/// `g = T(z) − z`; the caller decides whether to accept an extrapolated point.
pub(crate) struct Anderson {
    memory: usize,
    dz: VecDeque<Vec<f64>>,
    dg: VecDeque<Vec<f64>>,
    last: Option<(Vec<f64>, Vec<f64>)>,
}

/// Tikhonov weight on the normal equations, relative to their trace.
const REGULARIZATION: f64 = 1e-10;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl Anderson {
    pub(crate) fn new(memory: usize) -> Self {
        Self {
            memory,
            dz: VecDeque::with_capacity(memory),
            dg: VecDeque::with_capacity(memory),
            last: None,
        }
    }

    pub(crate) fn push(&mut self, z: &[f64], g: &[f64]) {
        if self.memory == 0 {
            return;
        }
        if let Some((z0, g0)) = self.last.take() {
            if self.dz.len() == self.memory {
                self.dz.pop_front();
                self.dg.pop_front();
            }
            self.dz.push_back(diff(z, &z0));
            self.dg.push_back(diff(g, &g0));
        }
        self.last = Some((z.to_vec(), g.to_vec()));
    }

    /// `z + g − Σ γᵢ (Δzᵢ + Δgᵢ)` with `γ` minimising `‖g − Σ γᵢ Δgᵢ‖`.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn extrapolate(&self, z: &[f64], g: &[f64]) -> Option<Vec<f64>> {
        let m = self.dg.len();
        if m == 0 {
            return None;
        }
        let mut a = vec![vec![0.0; m]; m];
        let mut b = vec![0.0; m];
        for i in 0..m {
            for j in 0..=i {
                a[i][j] = dot(&self.dg[i], &self.dg[j]);
                a[j][i] = a[i][j];
            }
            b[i] = dot(&self.dg[i], g);
        }
        let trace: f64 = (0..m).map(|i| a[i][i]).sum();
        if trace <= 0.0 || !trace.is_finite() {
            return None;
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += REGULARIZATION * trace;
        }
        let gamma = solve(a, b)?;
        let mut out: Vec<f64> = z.iter().zip(g).map(|(x, y)| x + y).collect();
        for (i, c) in gamma.iter().enumerate() {
            for ((o, dz), dg) in out.iter_mut().zip(&self.dz[i]).zip(&self.dg[i]) {
                *o -= c * (dz + dg);
            }
        }
        out.iter().all(|v| v.is_finite()).then_some(out)
    }
}

/// Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let x = solve(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn linear_map_is_solved_in_few_steps() {
        // T(z) = Mz + c with a slow contraction; Anderson with full memory
        // recovers the fixed point after dim + 1 residuals.
        let t = |z: &[f64]| vec![0.999 * z[0] + 0.001, 0.99 * z[1] + 0.5 * 0.01];
        let mut aa = Anderson::new(3);
        let mut z = vec![0.0, 0.0];
        for _ in 0..6 {
            let g = diff(&t(&z), &z);
            aa.push(&z, &g);
            z = aa.extrapolate(&z, &g).unwrap_or_else(|| t(&z));
        }
        assert!((z[0] - 1.0).abs() < 1e-8 && (z[1] - 0.5).abs() < 1e-8, "{z:?}");
    }
}

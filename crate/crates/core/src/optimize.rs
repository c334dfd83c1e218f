//! Floating-point machinery for the forcing-witness search: t(B, W) and its
//! gradient on an equipartitioned step graphon, a projected-gradient descent
//! on the box `[0, 1]^{k×k}`, and a Gauss–Newton polish onto the two
//! constraints.

use rand::Rng;

use crate::graph::OrientedGraph;

/// t(B, ·) as a polynomial in the `k × k` cell values of an equipartitioned
/// step graphon.
#[derive(Debug, Clone)]
pub struct CellPolynomial {
    k: usize,
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl CellPolynomial {
    pub fn new(b: &OrientedGraph, k: usize) -> Self {
        let core = b.without_isolated();
        Self { k, n: core.vertex_count(), edges: core.edges().to_vec() }
    }

    pub fn cells(&self) -> usize {
        self.k * self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn for_each_map(&self, mut f: impl FnMut(&[usize])) {
        let mut g = vec![0usize; self.n];
        loop {
            f(&g);
            let mut i = 0;
            loop {
                if i == self.n {
                    return;
                }
                g[i] += 1;
                if g[i] < self.k {
                    break;
                }
                g[i] = 0;
                i += 1;
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        if self.n == 0 {
            return 1.0;
        }
        let k = self.k;
        let mut total = 0.0;
        self.for_each_map(|g| {
            total += self.edges.iter().map(|&(u, v)| x[g[u] * k + g[v]]).product::<f64>();
        });
        total * (k as f64).powi(-(self.n as i32))
    }

    /// Value and gradient with respect to each cell.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let k = self.k;
        let mut grad = vec![0.0; k * k];
        if self.n == 0 {
            return (1.0, grad);
        }
        let e = self.edges.len();
        let mut total = 0.0;
        let mut factors = vec![0.0; e];
        let mut prefix = vec![1.0; e + 1];
        self.for_each_map(|g| {
            for (slot, &(u, v)) in factors.iter_mut().zip(&self.edges) {
                *slot = x[g[u] * k + g[v]];
            }
            for i in 0..e {
                prefix[i + 1] = prefix[i] * factors[i];
            }
            total += prefix[e];
            let mut suffix = 1.0;
            for i in (0..e).rev() {
                let (u, v) = self.edges[i];
                grad[g[u] * k + g[v]] += prefix[i] * suffix;
                suffix *= factors[i];
            }
        });
        let w = (k as f64).powi(-(self.n as i32));
        grad.iter_mut().for_each(|d| *d *= w);
        (total * w, grad)
    }
}

/// Knobs of the search; defaults follow the documented constants.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub restarts: usize,
    pub step: f64,
    pub iterations: usize,
    /// Weight of the L² separation reward `mean((x − p)²)` during descent.
    pub separation_weight: f64,
    pub polish_iterations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 16, step: 0.05, iterations: 2000, separation_weight: 1e-3, polish_iterations: 60 }
    }
}

/// The constrained problem: t(B, W) = `target_t`, ∫W = `target_mean`.
pub struct Problem<'a> {
    pub poly: &'a CellPolynomial,
    pub target_t: f64,
    pub target_mean: f64,
}

impl Problem<'_> {
    fn mean(&self, x: &[f64]) -> (f64, f64) {
        let m = x.len() as f64;
        (x.iter().sum::<f64>() / m, 1.0 / m)
    }

    /// Raw residuals `(t − target_t, ∫W − target_mean)`.
    pub fn residuals(&self, x: &[f64]) -> (f64, f64) {
        (self.poly.value(x) - self.target_t, self.mean(x).0 - self.target_mean)
    }

    /// Relative squared residuals minus the separation reward.
    fn objective(&self, x: &[f64], mu: f64) -> (f64, Vec<f64>) {
        let (t, gt) = self.poly.value_and_gradient(x);
        let (mean, dm) = self.mean(x);
        let st = self.target_t.max(f64::MIN_POSITIVE);
        let sm = self.target_mean.max(f64::MIN_POSITIVE);
        let rt = (t - self.target_t) / st;
        let rm = (mean - self.target_mean) / sm;
        let m = x.len() as f64;
        let sep: f64 = x.iter().map(|v| (v - self.target_mean).powi(2)).sum::<f64>() / m;
        let f = rt * rt + rm * rm - mu * sep;
        let grad = x
            .iter()
            .zip(&gt)
            .map(|(v, g)| 2.0 * rt * g / st + 2.0 * rm * dm / sm - mu * 2.0 * (v - self.target_mean) / m)
            .collect();
        (f, grad)
    }

    /// Projected gradient descent with step halving on non-improvement.
    pub fn descend(&self, x: &mut [f64], config: &SearchConfig) {
        let mu = config.separation_weight;
        let mut step = config.step;
        let (mut f, mut grad) = self.objective(x, mu);
        let mut trial = vec![0.0; x.len()];
        for _ in 0..config.iterations {
            if step < 1e-14 {
                break;
            }
            for ((t, v), g) in trial.iter_mut().zip(x.iter()).zip(&grad) {
                *t = (v - step * g).clamp(0.0, 1.0);
            }
            let (ft, gt) = self.objective(&trial, mu);
            if ft < f {
                x.copy_from_slice(&trial);
                f = ft;
                grad = gt;
            } else {
                step *= 0.5;
            }
        }
    }

    /// Minimum-norm Gauss–Newton corrections onto both constraints, moving
    /// only cells that are free to move in the needed direction.
    pub fn polish(&self, x: &mut [f64], iterations: usize) {
        let m = x.len();
        for _ in 0..iterations {
            let (t, gt) = self.poly.value_and_gradient(x);
            let (mean, dm) = self.mean(x);
            let r = [t - self.target_t, mean - self.target_mean];
            if r[0].abs() <= 1e-17 && r[1].abs() <= 1e-17 {
                return;
            }
            let mut free = vec![true; m];
            let mut delta = vec![0.0; m];
            for _ in 0..3 {
                let rows = [&gt, &vec![dm; m]];
                let mut jj = [[0.0; 2]; 2];
                for a in 0..2 {
                    for b in 0..2 {
                        jj[a][b] = (0..m).filter(|&c| free[c]).map(|c| rows[a][c] * rows[b][c]).sum();
                    }
                }
                let reg = 1e-14 * (jj[0][0] + jj[1][1]).max(f64::MIN_POSITIVE);
                jj[0][0] += reg;
                jj[1][1] += reg;
                let det = jj[0][0] * jj[1][1] - jj[0][1] * jj[1][0];
                if det == 0.0 {
                    return;
                }
                let y0 = (jj[1][1] * r[0] - jj[0][1] * r[1]) / det;
                let y1 = (jj[0][0] * r[1] - jj[1][0] * r[0]) / det;
                let mut blocked = false;
                for c in 0..m {
                    delta[c] = if free[c] { -(rows[0][c] * y0 + rows[1][c] * y1) } else { 0.0 };
                    let next = x[c] + delta[c];
                    if free[c] && !(0.0..=1.0).contains(&next) {
                        free[c] = false;
                        blocked = true;
                    }
                }
                if !blocked {
                    break;
                }
            }
            for c in 0..m {
                x[c] = (x[c] + delta[c]).clamp(0.0, 1.0);
            }
        }
    }
}

/// Random starting point with cells uniform in `[0, min(1, 2·mean)]`.
pub fn random_start<R: Rng + ?Sized>(rng: &mut R, cells: usize, mean: f64) -> Vec<f64> {
    let hi = (2.0 * mean).min(1.0);
    (0..cells).map(|_| rng.gen::<f64>() * hi).collect()
}

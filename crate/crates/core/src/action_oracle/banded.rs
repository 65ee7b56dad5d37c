//! Symmetric banded matrices and their Cholesky factorization.

#[derive(Clone, Debug)]
pub(crate) struct BandedSym {
    n: usize,
    bw: usize,
    /// Row `i` holds entries `(i, i − bw) ..= (i, i)`.
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSym {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)` (and by symmetry `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Replaces row and column `i` by the corresponding identity row scaled
    /// by `d`.
    pub fn isolate(&mut self, i: usize, d: f64) {
        let lo = i.saturating_sub(self.bw);
        let hi = (i + self.bw).min(self.n - 1);
        for j in lo..=hi {
            if j != i {
                let (a, b) = if i >= j { (i, j) } else { (j, i) };
                let k = self.idx(a, b);
                self.data[k] = 0.0;
            }
        }
        let k = self.idx(i, i);
        self.data[k] = d;
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).abs()).fold(0.0, f64::max)
    }

    /// Solves `(A + shift·I) x = b`; `None` if the shifted matrix is not
    /// numerically positive definite.
    pub fn solve_shifted(&self, shift: f64, b: &[f64]) -> Option<Vec<f64>> {
        let (n, bw) = (self.n, self.bw);
        let mut l = self.data.clone();
        for i in 0..n {
            let k = self.idx(i, i);
            l[k] += shift;
        }
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut sum = l[self.idx(i, j)];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    sum -= l[self.idx(i, k)] * l[self.idx(j, k)];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return None;
                    }
                    l[self.idx(i, i)] = sum.sqrt();
                } else {
                    l[self.idx(i, j)] = sum / l[self.idx(j, j)];
                }
            }
        }
        let mut x = b.to_vec();
        for i in 0..n {
            let mut sum = x[i];
            for k in i.saturating_sub(bw)..i {
                sum -= l[self.idx(i, k)] * x[k];
            }
            x[i] = sum / l[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut sum = x[i];
            for k in (i + 1)..=(i + bw).min(n - 1) {
                sum -= l[self.idx(k, i)] * x[k];
            }
            x[i] = sum / l[self.idx(i, i)];
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

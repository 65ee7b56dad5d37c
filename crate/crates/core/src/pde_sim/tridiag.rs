/// Crank–Nicolson step for `u_t = κ u_zz` on a uniform grid with a
/// zero-flux left end and a homogeneous Dirichlet node just past the right
/// end, factored once for `c = hκ/(2Δz²)`.
#[derive(Clone, Debug)]
pub(crate) struct CrankNicolson {
    c: f64,
    sup: Vec<f64>,
    inv: Vec<f64>,
}

impl CrankNicolson {
    pub fn new(n: usize, c: f64) -> Self {
        let b = 1.0 + 2.0 * c;
        let mut sup = vec![0.0; n];
        let mut inv = vec![0.0; n];
        if n == 0 {
            return CrankNicolson { c, sup, inv };
        }
        inv[0] = 1.0 / b;
        sup[0] = -2.0 * c * inv[0];
        for i in 1..n {
            inv[i] = 1.0 / (b + c * sup[i - 1]);
            sup[i] = -c * inv[i];
        }
        CrankNicolson { c, sup, inv }
    }

    /// Advances `u` in place; `work` must have the same length.
    pub fn apply(&self, u: &mut [f64], work: &mut [f64]) {
        let n = u.len();
        if n == 0 {
            return;
        }
        let c = self.c;
        if n == 1 {
            u[0] = u[0] * (1.0 - 2.0 * c) * self.inv[0];
            return;
        }
        work[0] = u[0] + c * (2.0 * u[1] - 2.0 * u[0]);
        for i in 1..n - 1 {
            work[i] = u[i] + c * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
        }
        work[n - 1] = u[n - 1] + c * (u[n - 2] - 2.0 * u[n - 1]);

        work[0] *= self.inv[0];
        for i in 1..n {
            work[i] = (work[i] + c * work[i - 1]) * self.inv[i];
        }
        u[n - 1] = work[n - 1];
        for i in (0..n - 1).rev() {
            u[i] = work[i] - self.sup[i] * u[i + 1];
        }
    }
}

//! Quadrature rules: composite Simpson on a non-uniform grid and an
//! eight-point Gauss–Legendre rule on `[0, 1]`.

const GL8_X: [f64; 4] = [
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];
const GL8_W: [f64; 4] = [
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// Nodes and weights of the eight-point Gauss–Legendre rule mapped to
/// `[0, 1]`; the weights sum to one.
pub fn gauss_legendre_8() -> [(f64, f64); 8] {
    let mut out = [(0.0, 0.0); 8];
    for k in 0..4 {
        out[2 * k] = (0.5 * (1.0 - GL8_X[k]), 0.5 * GL8_W[k]);
        out[2 * k + 1] = (0.5 * (1.0 + GL8_X[k]), 0.5 * GL8_W[k]);
    }
    out
}

/// Integrates samples `fs` taken at strictly increasing abscissae `xs`.
///
/// Interval pairs use the three-point rule for unequal spacing; an odd
/// interval left at the end is integrated with the quadratic through the
/// last three points.
pub fn simpson(xs: &[f64], fs: &[f64]) -> f64 {
    assert_eq!(xs.len(), fs.len());
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1]);
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let h0 = xs[i + 1] - xs[i];
        let h1 = xs[i + 2] - xs[i + 1];
        let w = h0 + h1;
        total += w / 6.0
            * ((2.0 - h1 / h0) * fs[i] + w * w / (h0 * h1) * fs[i + 1] + (2.0 - h0 / h1) * fs[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        total += fs[i + 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1))
            + fs[i] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
            - fs[i - 1] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    }
    total
}

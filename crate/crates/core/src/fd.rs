//! Five-point finite-difference stencils on uniform grids.

/// Fornberg weights for derivatives `0..=m` at `x0` from nodes `xs`.
/// Returns `w[d][j]`, the weight of node `j` in the `d`-th derivative.
pub fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut w = vec![vec![0.0; n]; m + 1];
    w[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    w
}

/// Indices and weights of the 5-point stencil for the `deriv`-th derivative at
/// sample `i` of an `n`-sample grid with spacing `h`. Periodic grids wrap;
/// otherwise the window shifts inward near the ends.
pub fn stencil(n: usize, i: usize, h: f64, deriv: usize, periodic: bool) -> Vec<(usize, f64)> {
    assert!(n >= 5, "five-point stencil needs at least 5 samples");
    let (start, offsets): (isize, Vec<f64>) = if periodic {
        (i as isize - 2, (-2..=2).map(|k| k as f64).collect())
    } else {
        let s = (i as isize - 2).clamp(0, n as isize - 5);
        (s, (0..5).map(|k| (s + k) as f64 - i as f64).collect())
    };
    let w = fornberg(0.0, &offsets, deriv);
    (0..5)
        .map(|k| {
            let idx = (start + k as isize).rem_euclid(n as isize) as usize;
            (idx, w[deriv][k] / h.powi(deriv as i32))
        })
        .collect()
}

/// Applies [`stencil`] to a sequence of fixed-size real vectors.
pub fn derivative<const N: usize>(
    values: &[[f64; N]],
    i: usize,
    h: f64,
    deriv: usize,
    periodic: bool,
) -> [f64; N] {
    let mut out = [0.0; N];
    for (idx, w) in stencil(values.len(), i, h, deriv, periodic) {
        for k in 0..N {
            out[k] += w * values[idx][k];
        }
    }
    out
}

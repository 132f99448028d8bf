//! Dense polynomial helpers in a local variable `u`, coefficients in
//! ascending order (`c[0] + c[1] u + ...`).

/// Horner evaluation.
#[inline]
pub(crate) fn eval(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * u + ci)
}

pub(crate) fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| ci * i as f64)
        .collect()
}

/// Antiderivative vanishing at `u = 0`, shifted by `constant`.
pub(crate) fn integrate(c: &[f64], constant: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(constant);
    out.extend(c.iter().enumerate().map(|(i, &ci)| ci / (i + 1) as f64));
    out
}

/// `∫_0^h p(u) du`.
pub(crate) fn definite_integral(c: &[f64], h: f64) -> f64 {
    c.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (i, &ci)| acc * h + ci / (i + 1) as f64)
        * h
}

/// Coefficients of `p(u + s)`.
pub(crate) fn taylor_shift(c: &[f64], s: f64) -> Vec<f64> {
    let mut out = c.to_vec();
    let n = out.len();
    // repeated synthetic division
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            out[j] += s * out[j + 1];
        }
    }
    out
}

/// Taylor coefficient of order `d` at `u = h`: `p^{(d)}(h) / d!`.
pub(crate) fn taylor_coefficient(c: &[f64], d: usize, h: f64) -> f64 {
    let mut acc = 0.0;
    for i in (d..c.len()).rev() {
        acc = acc * h + c[i] * binomial(i, d);
    }
    acc
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Index of the highest nonzero coefficient (0 for the zero polynomial).
pub(crate) fn degree(c: &[f64]) -> usize {
    c.iter().rposition(|&x| x != 0.0).unwrap_or(0)
}

/// Real zeros of `p` in the open interval `(0, h)` at which `p` changes sign.
///
/// Degree ≤ 1 is solved in closed form. Higher degrees are bracketed on a
/// Chebyshev-density grid of `8·degree` points and refined by bisection to
/// `tol` in abscissa.
pub(crate) fn sign_change_roots(c: &[f64], h: f64, tol: f64) -> Vec<f64> {
    let deg = degree(c);
    match deg {
        0 => Vec::new(),
        1 => {
            let u = -c[0] / c[1];
            if u > 0.0 && u < h {
                vec![u]
            } else {
                Vec::new()
            }
        }
        _ => {
            let n = 8 * deg;
            let grid: Vec<f64> = (0..=n)
                .map(|i| {
                    let theta = std::f64::consts::PI * i as f64 / n as f64;
                    0.5 * h * (1.0 - theta.cos())
                })
                .collect();
            let mut roots = Vec::new();
            let mut prev_u = grid[0];
            let mut prev_v = eval(c, prev_u);
            for &u in &grid[1..] {
                let v = eval(c, u);
                if v == 0.0 {
                    if u > 0.0 && u < h {
                        roots.push(u);
                    }
                } else if prev_v != 0.0 && (prev_v < 0.0) != (v < 0.0) {
                    roots.push(bisect_bracket(c, prev_u, u, prev_v, tol));
                }
                prev_u = u;
                prev_v = v;
            }
            roots
        }
    }
}

fn bisect_bracket(c: &[f64], mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

//! Small numerical kernels shared by the geometry and verification code:
//! Gauss-Legendre rules, quintic Hermite interpolation, finite-difference
//! stencils and composite Simpson quadrature.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Value, first and second derivative at one end of a Hermite segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Quintic Hermite interpolation on `[x0, x1]` matching value and first two
/// derivatives at both ends. Returns (value, first derivative) at `x`.
pub fn hermite5(x0: f64, x1: f64, left: Jet, right: Jet, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;

    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 0.5 * (s3 - 2.0 * s4 + s5);

    let d0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let d1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let d2 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
    let d3 = -d0;
    let d4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let d5 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);

    let value = h0 * left.value
        + h * h1 * left.d1
        + h * h * h2 * left.d2
        + h3 * right.value
        + h * h4 * right.d1
        + h * h * h5 * right.d2;
    let slope = (d0 * left.value + d3 * right.value) / h
        + d1 * left.d1
        + h * d2 * left.d2
        + d4 * right.d1
        + h * d5 * right.d2;
    (value, slope)
}

/// Second-order central first derivative on a uniform grid.
pub fn central_d1(f: &[f64], i: usize, h: f64) -> f64 {
    (f[i + 1] - f[i - 1]) / (2.0 * h)
}

/// Second-order central second derivative on a uniform grid.
pub fn central_d2(f: &[f64], i: usize, h: f64) -> f64 {
    (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)
}

/// Sixth-order central first derivative; needs three neighbours each side.
pub fn central6_d1(f: &[f64], i: usize, h: f64) -> f64 {
    (-f[i - 3] + 9.0 * f[i - 2] - 45.0 * f[i - 1] + 45.0 * f[i + 1] - 9.0 * f[i + 2] + f[i + 3])
        / (60.0 * h)
}

/// Sixth-order central second derivative; needs three neighbours each side.
pub fn central6_d2(f: &[f64], i: usize, h: f64) -> f64 {
    (2.0 * f[i - 3] - 27.0 * f[i - 2] + 270.0 * f[i - 1] - 490.0 * f[i] + 270.0 * f[i + 1]
        - 27.0 * f[i + 2]
        + 2.0 * f[i + 3])
        / (180.0 * h * h)
}

/// Composite Simpson rule over equally spaced samples. An odd number of
/// intervals is closed with Simpson's 3/8 rule on the last three.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let (even_end, tail) = if intervals.is_multiple_of(2) {
                (n - 1, false)
            } else {
                (n - 4, true)
            };
            let mut acc = values[0] + values[even_end];
            for (k, v) in values.iter().enumerate().take(even_end).skip(1) {
                acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = acc * h / 3.0;
            if tail {
                let v = &values[n - 4..];
                total += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            total
        }
    }
}

/// Smooth bump supported on (lo, hi), all derivatives vanishing at the edges,
/// normalised to 1 at the centre.
pub fn smooth_bump(lo: f64, hi: f64, r: f64) -> f64 {
    if r <= lo || r >= hi {
        return 0.0;
    }
    let x = (2.0 * r - lo - hi) / (hi - lo);
    let q = 1.0 - x * x;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// Format a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Serde helper for extended reals: finite values as numbers, the rest as
/// the strings `"inf"`, `"-inf"` and `"nan"`.
pub fn serialize_extended<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&fmt17(*x))
    }
}

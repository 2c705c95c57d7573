//! Tiny fixed-size linear algebra for chart dimension d <= 2.
//!
//! Vectors and matrices are stored as `[f64; 2]` / `[[f64; 2]; 2]` with an
//! explicit dimension; the unused entries stay zero for d = 1.

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const ZERO_V: Vec2 = [0.0; 2];
pub const ZERO_M: Mat2 = [[0.0; 2]; 2];
pub const IDENT: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn scale(a: Vec2, s: f64) -> Vec2 {
    [a[0] * s, a[1] * s]
}

pub fn axpy(y: Vec2, a: f64, x: Vec2) -> Vec2 {
    [y[0] + a * x[0], y[1] + a * x[1]]
}

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Inner product under a metric matrix: a^T g b.
pub fn inner(g: &Mat2, a: Vec2, b: Vec2) -> f64 {
    let ga = mat_vec(g, a);
    dot(ga, b)
}

pub fn norm(g: &Mat2, a: Vec2) -> f64 {
    inner(g, a, a).max(0.0).sqrt()
}

pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = ZERO_M;
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub fn mat_scale(m: &Mat2, s: f64) -> Mat2 {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

pub fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn det(m: &Mat2, dim: usize) -> f64 {
    if dim == 1 {
        m[0][0]
    } else {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// Inverse of a d x d block (d = 1 or 2).
pub fn inverse(m: &Mat2, dim: usize) -> Mat2 {
    if dim == 1 {
        let mut out = IDENT;
        out[0][0] = 1.0 / m[0][0];
        return out;
    }
    let d = det(m, 2);
    [
        [m[1][1] / d, -m[0][1] / d],
        [-m[1][0] / d, m[0][0] / d],
    ]
}

/// Solve m x = rhs for d = 1 or 2.
pub fn solve(m: &Mat2, rhs: Vec2, dim: usize) -> Vec2 {
    let inv = inverse(m, dim);
    if dim == 1 {
        [inv[0][0] * rhs[0], 0.0]
    } else {
        mat_vec(&inv, rhs)
    }
}

/// Operator 2-norm of the d x d block (largest singular value).
pub fn op_norm(m: &Mat2, dim: usize) -> f64 {
    if dim == 1 {
        return m[0][0].abs();
    }
    // Largest eigenvalue of m^T m.
    let mt = transpose(m);
    let a = mat_mul(&mt, m);
    let tr = a[0][0] + a[1][1];
    let dt = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = (tr * tr / 4.0 - dt).max(0.0).sqrt();
    (tr / 2.0 + disc).max(0.0).sqrt()
}

/// Smallest eigenvalue of a symmetric matrix pencil (A, G): min over
/// v != 0 of v^T A v / v^T G v, with G positive definite.
pub fn min_gen_eigenvalue(a: &Mat2, g: &Mat2, dim: usize) -> f64 {
    if dim == 1 {
        return a[0][0] / g[0][0];
    }
    // Whiten with the Cholesky factor of G: B = L^{-1} A L^{-T}.
    let l00 = g[0][0].sqrt();
    let l10 = g[1][0] / l00;
    let l11 = (g[1][1] - l10 * l10).sqrt();
    // L^{-1} = [[1/l00, 0], [-l10/(l00 l11), 1/l11]]
    let li = [[1.0 / l00, 0.0], [-l10 / (l00 * l11), 1.0 / l11]];
    let b = mat_mul(&li, &mat_mul(a, &transpose(&li)));
    let sym = [
        [b[0][0], 0.5 * (b[0][1] + b[1][0])],
        [0.5 * (b[0][1] + b[1][0]), b[1][1]],
    ];
    let tr = sym[0][0] + sym[1][1];
    let dt = sym[0][0] * sym[1][1] - sym[0][1] * sym[1][0];
    let disc = (tr * tr / 4.0 - dt).max(0.0).sqrt();
    tr / 2.0 - disc
}

/// Gram-Schmidt in the inner product of `g`, columns of `u`.
/// Returns the orthonormalized matrix (columns g-orthonormal).
pub fn gram_schmidt(g: &Mat2, u: &Mat2, dim: usize) -> Mat2 {
    let mut cols = [[0.0f64; 2]; 2];
    for a in 0..dim {
        let mut v = [u[0][a], u[1][a]];
        for b in 0..a {
            let w = [cols[0][b], cols[1][b]];
            let c = inner(g, v, w);
            v = axpy(v, -c, w);
        }
        let n = norm(g, v);
        v = scale(v, 1.0 / n);
        cols[0][a] = v[0];
        cols[1][a] = v[1];
    }
    if dim == 1 {
        cols[1][1] = 1.0;
    }
    cols
}

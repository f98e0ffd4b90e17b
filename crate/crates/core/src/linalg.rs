//! Small dense helpers: closed-form real eigenpairs of 3×3 matrices.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};

/// Real roots of `x³ + a x² + b x + c`, each polished by two Newton steps.
pub fn cubic_real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots = if p == 0.0 && q == 0.0 {
        vec![0.0]
    } else if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
    } else {
        // three real roots (trigonometric form); p < 0 here
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (phi - TAU * k as f64 / 3.0).cos())
            .collect()
    };

    for t in roots.iter_mut() {
        *t -= shift;
        for _ in 0..2 {
            let f = ((*t + a) * *t + b) * *t + c;
            let df = (3.0 * *t + 2.0 * a) * *t + b;
            if df != 0.0 {
                let step = f / df;
                if step.is_finite() {
                    *t -= step;
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Real eigenvalues of a 3×3 matrix from its characteristic polynomial.
pub fn real_eigenvalues(m: &Matrix3<f64>) -> Vec<f64> {
    let scale = m.abs().max();
    if scale == 0.0 {
        return vec![0.0];
    }
    let a = m / scale;
    let tr = a.trace();
    let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)]
        - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    cubic_real_roots(-tr, minors, -a.determinant())
        .into_iter()
        .map(|l| l * scale)
        .collect()
}

/// Unit null vector of a (nearly) rank-2 matrix: the largest cross product of
/// two of its rows.
pub fn null_vector(m: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let rows = [
        m.row(0).transpose(),
        m.row(1).transpose(),
        m.row(2).transpose(),
    ];
    let best = [
        rows[0].cross(&rows[1]),
        rows[0].cross(&rows[2]),
        rows[1].cross(&rows[2]),
    ]
    .into_iter()
    .max_by(|u, v| u.norm().total_cmp(&v.norm()))?;
    let n = best.norm();
    (n > 0.0 && n.is_finite()).then(|| best / n)
}

/// Eigenvector for the eigenvalue `lambda`: null vector of `m − λI`, then one
/// step of inverse iteration.
pub fn eigenvector(m: &Matrix3<f64>, lambda: f64) -> Option<Vector3<f64>> {
    let shifted = m - Matrix3::identity() * lambda;
    let v = null_vector(&shifted)?;
    let scale = m.abs().max().max(f64::MIN_POSITIVE);
    let nudged = m - Matrix3::identity() * (lambda + 1e-10 * scale);
    match nudged.lu().solve(&v) {
        Some(w) if w.iter().all(|c| c.is_finite()) && w.norm() > 0.0 => {
            let w = w / w.norm();
            // keep the sign of the null-space estimate
            Some(if w.dot(&v) < 0.0 { -w } else { w })
        }
        _ => Some(v),
    }
}

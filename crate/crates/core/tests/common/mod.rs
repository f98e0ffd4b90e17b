#![allow(dead_code)]

use nalgebra::{Matrix3, Vector2};
use num::{BigRational, Signed, ToPrimitive, Zero};
use rand::Rng;

use pentagram::{AffinePolygon, ProjMap};

/// A point of the interior of a convex polygon: a random convex combination
/// of its vertices with weights bounded away from zero.
pub fn hull_point<R: Rng>(p: &AffinePolygon, rng: &mut R) -> Vector2<f64> {
    let w: Vec<f64> = (0..p.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    p.points()
        .iter()
        .zip(&w)
        .map(|(v, w)| v * (*w / total))
        .sum()
}

/// An invertible map that is far from affine but keeps `p` inside the chart:
/// its third row stays positive on the unit disc.
pub fn non_affine_map<R: Rng>(rng: &mut R) -> ProjMap {
    loop {
        let mut m: Matrix3<f64> = Matrix3::identity();
        for r in 0..2 {
            for c in 0..3 {
                m[(r, c)] += rng.gen_range(-0.4..0.4);
            }
        }
        m[(2, 0)] = rng.gen_range(-0.45..0.45);
        m[(2, 1)] = rng.gen_range(-0.45..0.45);
        if m[(2, 0)].hypot(m[(2, 1)]) > 0.2 && m.determinant().abs() > 0.2 {
            return ProjMap::new(m);
        }
    }
}

/// Largest vertex distance relative to the diameter of `a`.
pub fn relative_vertex_error(a: &AffinePolygon, b: &AffinePolygon) -> f64 {
    a.points()
        .iter()
        .zip(b.points())
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max)
        / a.diameter()
}

pub fn median(mut v: Vec<usize>) -> f64 {
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] + v[m]) as f64 / 2.0
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

/// `Σ d_i / A_i` in exact rational arithmetic on the stored `f64` coordinates,
/// together with `Σ |d_i| / |A_i|` (the latter in floating point).
pub fn exact_d(p: &AffinePolygon) -> (Vector2<f64>, f64) {
    let n = p.len() as isize;
    let pts: Vec<(BigRational, BigRational)> = p
        .points()
        .iter()
        .map(|v| (exact(v.x), exact(v.y)))
        .collect();
    let at = |i: isize| &pts[i.rem_euclid(n) as usize];
    let two = BigRational::from_integer(2.into());
    let (mut sx, mut sy) = (BigRational::zero(), BigRational::zero());
    let mut scale = 0.0;
    for i in 0..n {
        let (a, b, c) = (at(i - 1), at(i), at(i + 1));
        let area = ((&b.0 - &a.0) * (&c.1 - &b.1) - (&b.1 - &a.1) * (&c.0 - &b.0)) / &two;
        let dx = &c.0 - &a.0;
        let dy = &c.1 - &a.1;
        let ax = area.abs().to_f64().unwrap();
        scale += dx.to_f64().unwrap().hypot(dy.to_f64().unwrap()) / ax;
        sx += dx / &area;
        sy += dy / &area;
    }
    (
        Vector2::new(sx.to_f64().unwrap(), sy.to_f64().unwrap()),
        scale,
    )
}

pub fn exact_relative_d(p: &AffinePolygon) -> f64 {
    let (d, scale) = exact_d(p);
    d.norm() / scale
}

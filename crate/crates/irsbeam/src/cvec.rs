//! Small complex-vector helpers shared across modules.

use num_complex::Complex64;

/// Inner product conj(a)·b, summed left to right.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Squared Euclidean norm.
pub(crate) fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    norm_sq(v).sqrt()
}

pub(crate) fn scale(v: &[Complex64], s: Complex64) -> Vec<Complex64> {
    v.iter().map(|z| z * s).collect()
}

/// Unit-normalized copy; None for the zero vector.
pub(crate) fn normalized(v: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm(v);
    if n == 0.0 {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

/// Euclidean distance between two vectors of equal length.
pub(crate) fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Rotates v so that its largest-magnitude entry is real and positive.
/// Deterministic tie-break: the earliest entry among equal magnitudes wins.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_mag = -1.0f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() == 0.0 {
        return;
    }
    let rot = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
}

//! Exhaustive active-set solver for
//! `min ½||x - q||²  s.t.  A x = b,  lo <= x <= hi` on tiny instances.
//!
//! Every coordinate is tried at `lo`, at `hi`, or free. With the free set `F`
//! fixed, the minimizer over the affine piece is `q_F + pinv(A_F)(r - A_F q_F)`
//! where `r` is the right-hand side left after the fixed coordinates. The
//! best candidate that is feasible is the projection.

use nalgebra::{DMatrix, DVector};

pub fn project(a: &[Vec<f64>], b: &[f64], q: &[f64], lo: f64, hi: f64) -> Option<Vec<f64>> {
    let (m, j) = (a.len(), q.len());
    let mut best: Option<(f64, Vec<f64>)> = None;
    let total = 3usize.pow(j as u32);
    for code in 0..total {
        let mut state = vec![0u8; j];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let free: Vec<usize> = (0..j).filter(|&i| state[i] == 2).collect();
        let mut x = vec![0.0; j];
        for i in 0..j {
            x[i] = match state[i] {
                0 => lo,
                1 => hi,
                _ => q[i],
            };
        }
        let mut r = DVector::from_fn(m, |row, _| b[row]);
        for row in 0..m {
            for i in 0..j {
                if state[i] != 2 {
                    r[row] -= a[row][i] * x[i];
                }
            }
        }
        if !free.is_empty() {
            let af = DMatrix::from_fn(m, free.len(), |row, col| a[row][free[col]]);
            let qf = DVector::from_fn(free.len(), |i, _| q[free[i]]);
            let pinv = af.clone().pseudo_inverse(1e-12).ok()?;
            let xf = &qf + pinv * (&r - &af * &qf);
            for (k, &i) in free.iter().enumerate() {
                x[i] = xf[k];
            }
        }
        let feasible_box = x.iter().all(|&v| v >= lo - 1e-10 && v <= hi + 1e-10);
        let residual: f64 = (0..m)
            .map(|row| {
                let s: f64 = (0..j).map(|i| a[row][i] * x[i]).sum();
                (s - b[row]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        if !feasible_box || residual > 1e-9 {
            continue;
        }
        let obj: f64 = x.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, x));
        }
    }
    best.map(|(_, x)| x)
}

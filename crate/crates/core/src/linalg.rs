//! Fixed-size dense linear algebra for the 2×2 and 3×3 systems that show up in
//! the variance algebra and the per-replicate GLS fits.

pub type Mat<const N: usize> = [[f64; N]; N];

/// Inverts `m` by Gauss-Jordan elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `1e-300` or relative to the
/// largest entry by more than sixteen orders of magnitude.
pub fn invert<const N: usize>(m: &Mat<N>) -> Option<Mat<N>> {
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }

    let mut a = *m;
    let mut inv = identity::<N>();
    for col in 0..N {
        let pivot_row = (col..N)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        let pivot = a[pivot_row][col];
        if pivot.abs() < 1e-16 * scale || pivot.abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);

        let p = a[col][col];
        for j in 0..N {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..N {
            if i == col {
                continue;
            }
            let factor = a[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..N {
                a[i][j] -= factor * a[col][j];
                inv[i][j] -= factor * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Solves `m x = b`.
pub fn solve<const N: usize>(m: &Mat<N>, b: &[f64; N]) -> Option<[f64; N]> {
    let inv = invert(m)?;
    Some(mat_vec(&inv, b))
}

pub fn identity<const N: usize>() -> Mat<N> {
    let mut out = [[0.0; N]; N];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    out
}

pub fn mat_vec<const N: usize>(m: &Mat<N>, v: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = (0..N).map(|j| m[i][j] * v[j]).sum();
    }
    out
}

pub fn scale<const N: usize>(m: &Mat<N>, s: f64) -> Mat<N> {
    let mut out = *m;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    out
}

/// `v' m v`
pub fn quadratic_form<const N: usize>(m: &Mat<N>, v: &[f64; N]) -> f64 {
    mat_vec(m, v).iter().zip(v).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> Mat<N> {
        let mut out = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                out[i][j] = (0..N).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }

    #[test]
    fn inverse_round_trips() {
        let m = [[4.0, 1.0, 2.0], [1.0, 3.0, 0.5], [2.0, 0.5, 5.0]];
        let inv = invert(&m).unwrap();
        let prod = matmul(&m, &inv);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i][j] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = [[0.0, 1.0], [1.0, 0.0]];
        assert_eq!(invert(&m).unwrap(), m);
    }

    #[test]
    fn singular_is_none() {
        let m = [[1.0, 2.0], [2.0, 4.0]];
        assert!(invert(&m).is_none());
        assert!(invert(&[[0.0; 3]; 3]).is_none());
    }

    #[test]
    fn solve_matches_hand_values() {
        let x = solve(&[[2.0, 1.0], [1.0, 3.0]], &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }
}

//! Thomas algorithm for tridiagonal systems, with a Sherman-Morrison
//! correction for the periodic (cyclic) case.

use crate::error::{Error, Result};

/// Row `k` reads `lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1]`.
///
/// For cyclic systems `lower[0]` is the corner `a[0][n-1]` and `upper[n-1]`
/// the corner `a[n-1][0]`; otherwise those two entries are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub cyclic: bool,
}

impl TridiagonalSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>, cyclic: bool) -> Result<Self> {
        let n = diag.len();
        for len in [lower.len(), upper.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, actual: len });
            }
        }
        Ok(Self { lower, diag, upper, cyclic })
    }

    /// `(1, 22, 1) / 24` coupling between point-value time derivatives.
    pub fn mass_matrix(n: usize, cyclic: bool) -> Self {
        let off = 1.0 / 24.0;
        Self {
            lower: vec![off; n],
            diag: vec![22.0 / 24.0; n],
            upper: vec![off; n],
            cyclic,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![1.0; n],
            upper: vec![0.0; n],
            cyclic: false,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if x.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: x.len() });
        }
        let mut y = vec![0.0; n];
        for k in 0..n {
            let mut v = self.diag[k] * x[k];
            if k > 0 {
                v += self.lower[k] * x[k - 1];
            } else if self.cyclic && n > 1 {
                v += self.lower[0] * x[n - 1];
            }
            if k + 1 < n {
                v += self.upper[k] * x[k + 1];
            } else if self.cyclic && n > 1 {
                v += self.upper[n - 1] * x[0];
            }
            y[k] = v;
        }
        Ok(y)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: rhs.len() });
        }
        if !self.cyclic {
            return thomas(&self.lower, &self.diag, &self.upper, rhs);
        }
        if n < 3 {
            return Err(Error::Config(format!("cyclic solve needs n >= 3, got {n}")));
        }
        // A = B + u v^T with u = (gamma, 0, .., 0, a[n-1][0]) and
        // v = (1, 0, .., 0, a[0][n-1] / gamma).
        let top = self.lower[0];
        let bottom = self.upper[n - 1];
        let gamma = -self.diag[0];
        let mut diag = self.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= bottom * top / gamma;
        let x = thomas(&self.lower, &diag, &self.upper, rhs)?;
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = bottom;
        let z = thomas(&self.lower, &diag, &self.upper, &u)?;
        let vx = x[0] + top / gamma * x[n - 1];
        let vz = z[0] + top / gamma * z[n - 1];
        let denom = 1.0 + vz;
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::SingularPivot { index: n - 1 });
        }
        let factor = vx / denom;
        Ok(x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect())
    }
}

/// Non-cyclic Thomas solve; `lower[0]` and `upper[n-1]` are not read.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::SingularPivot { index: 0 });
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for k in 1..n {
        pivot = diag[k] - lower[k] * c[k - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularPivot { index: k });
        }
        c[k] = if k + 1 < n { upper[k] / pivot } else { 0.0 };
        d[k] = (rhs[k] - lower[k] * d[k - 1]) / pivot;
    }
    for k in (0..n - 1).rev() {
        d[k] -= c[k] * d[k + 1];
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, p);
            b.swap(col, p);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
            x[row] = (b[row] - s) / a[row][row];
        }
        x
    }

    fn to_dense(s: &TridiagonalSystem) -> Vec<Vec<f64>> {
        let n = s.len();
        let mut a = vec![vec![0.0; n]; n];
        for k in 0..n {
            a[k][k] = s.diag[k];
            if k > 0 {
                a[k][k - 1] = s.lower[k];
            }
            if k + 1 < n {
                a[k][k + 1] = s.upper[k];
            }
        }
        if s.cyclic {
            a[0][n - 1] += s.lower[0];
            a[n - 1][0] += s.upper[n - 1];
        }
        a
    }

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        num / b.iter().map(|v| v.abs()).fold(1e-300, f64::max)
    }

    #[test]
    fn identity_and_mass_matrix() {
        let rhs = vec![1.0, -2.0, 3.5, 0.25];
        assert_eq!(TridiagonalSystem::identity(4).solve(&rhs).unwrap(), rhs);
        for cyclic in [true, false] {
            let m = TridiagonalSystem::mass_matrix(6, cyclic);
            assert_eq!(m.matvec(&[0.0; 6]).unwrap(), vec![0.0; 6]);
            if cyclic {
                for v in m.matvec(&[2.5; 6]).unwrap() {
                    assert!((v - 2.5).abs() < 1e-15);
                }
            }
        }
        let m = TridiagonalSystem::mass_matrix(5, true);
        for k in 0..5 {
            assert!((m.lower[k] + m.diag[k] + m.upper[k] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn mass_matrix_is_exact_cell_average_of_quadratics() {
        // interior rows on x^2 sampled with h = 1
        let m = TridiagonalSystem::mass_matrix(7, false);
        let x: Vec<f64> = (0..7).map(|k| (k as f64).powi(2)).collect();
        let y = m.matvec(&x).unwrap();
        for k in 1..6 {
            assert!((y[k] - (x[k] + 1.0 / 12.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn cyclic_four_by_four_against_dense() {
        let s = TridiagonalSystem::new(
            vec![0.7, -1.0, 0.5, 2.0],
            vec![5.0, 6.0, -7.0, 8.0],
            vec![1.5, 0.3, -2.0, -0.9],
            true,
        )
        .unwrap();
        let b = vec![1.0, 2.0, -3.0, 0.5];
        let x = s.solve(&b).unwrap();
        let oracle = dense_solve(to_dense(&s), b.clone());
        assert!(rel_err(&x, &oracle) < 1e-12);
        assert!(rel_err(&s.matvec(&x).unwrap(), &b) < 1e-12);
    }

    #[test]
    fn singular_pivot_is_reported() {
        let s = TridiagonalSystem::new(vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 0.0], false)
            .unwrap();
        assert!(matches!(s.solve(&[1.0, 1.0, 1.0]), Err(Error::SingularPivot { index: 1 })));
    }

    #[test]
    fn length_errors() {
        let m = TridiagonalSystem::mass_matrix(5, true);
        assert!(m.solve(&[1.0; 4]).is_err());
        assert!(m.matvec(&[1.0; 6]).is_err());
        assert!(TridiagonalSystem::new(vec![0.0; 2], vec![1.0; 3], vec![0.0; 3], false).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn mass_matrix_round_trip(n in 5usize..=257, cyclic: bool, seed in 0u64..1000) {
            let mut s = seed.wrapping_add(1);
            let x: Vec<f64> = (0..n).map(|_| {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                (s % 20001) as f64 / 10000.0 - 1.0
            }).collect();
            let m = TridiagonalSystem::mass_matrix(n, cyclic);
            let back = m.solve(&m.matvec(&x).unwrap()).unwrap();
            prop_assert!(rel_err(&back, &x) < 1e-12);
        }

        #[test]
        fn random_dominant_systems_match_dense(
            n in 3usize..12,
            vals in proptest::collection::vec(-1.0..1.0f64, 48),
            cyclic: bool,
        ) {
            let lower: Vec<f64> = vals[0..n].to_vec();
            let upper: Vec<f64> = vals[12..12 + n].to_vec();
            let diag: Vec<f64> = (0..n).map(|k| 3.0 + vals[24 + k]).collect();
            let b: Vec<f64> = vals[36..36 + n].to_vec();
            let s = TridiagonalSystem::new(lower, diag, upper, cyclic).unwrap();
            let x = s.solve(&b).unwrap();
            let oracle = dense_solve(to_dense(&s), b);
            prop_assert!(rel_err(&x, &oracle) < 1e-12);
        }
    }
}

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense LU factorization with partial pivoting, row-major storage.
#[derive(Debug, Clone)]
pub struct LuFactorization<T: Real> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Real> LuFactorization<T> {
    /// Factorizes the `n x n` row-major matrix `a`.
    pub fn new(n: usize, mut a: Vec<T>) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tiny = scale * T::epsilon() * T::of(n.max(1) as f64);
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|r| (r, a[r * n + k].abs()))
                    .fold(
                        (k, -T::one()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(pmax > tiny) {
                return Err(Error::NonPhysicalMesh);
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            let (top, bottom) = a.split_at_mut((k + 1) * n);
            let row_k = &top[k * n..];
            for row in bottom.chunks_exact_mut(n) {
                let f = row[k] / pivot;
                if f == T::zero() {
                    continue;
                }
                row[k] = f;
                for c in k + 1..n {
                    row[c] = row[c] - f * row_k[c];
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let row = &self.lu[r * n..r * n + r];
            let s: T = row.iter().zip(&x[..r]).map(|(a, v)| *a * *v).sum();
            x[r] = x[r] - s;
        }
        for r in (0..n).rev() {
            let row = &self.lu[r * n..(r + 1) * n];
            let s: T = row[r + 1..]
                .iter()
                .zip(&x[r + 1..])
                .map(|(a, v)| *a * *v)
                .sum();
            x[r] = (x[r] - s) / row[r];
        }
        x
    }
}

/// `y = A x` for a row-major square matrix.
pub(crate) fn matvec<T: Real>(n: usize, a: &[T], x: &[T]) -> Vec<T> {
    a.chunks_exact(n)
        .map(|row| row.iter().zip(x).map(|(p, q)| *p * *q).sum())
        .collect()
}

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    Antisymmetric,
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    order: usize,
    entries: Vec<T>,
    symmetry: Symmetry,
}

impl<T: Real> SquareMatrix<T> {
    pub fn new(order: usize, entries: Vec<T>) -> Result<Self> {
        if order == 0 {
            return Err(invalid("matrix order must be positive"));
        }
        if entries.len() != order * order {
            return Err(invalid(format!("expected {} entries, got {}", order * order, entries.len())));
        }
        Ok(Self { order, entries, symmetry: Symmetry::General })
    }

    pub fn zeros(order: usize) -> Self {
        Self { order, entries: vec![T::zero(); order * order], symmetry: Symmetry::General }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                entries.push(f(i, j));
            }
        }
        Self { order, entries, symmetry: Symmetry::General }
    }

    /// Flags the matrix, verifying the flag to `1e-12` relative to the largest entry.
    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Result<Self> {
        let tol = T::lit(1e-12) * self.max_abs().max(T::min_positive_value());
        let bad = match symmetry {
            Symmetry::General => T::zero(),
            Symmetry::Symmetric => self.symmetric_defect(),
            Symmetry::Antisymmetric => self.antisymmetric_defect(),
        };
        if bad > tol {
            return Err(invalid(format!("{symmetry:?} flag violated by {bad}")));
        }
        self.symmetry = symmetry;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.order + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.order + j] = v;
        self.symmetry = Symmetry::General;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.order, |i, j| self.get(j, i))
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_fn(self.order, |i, j| (0..self.order).map(|k| self.get(i, k) * other.get(k, j)).sum())
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.iter().map(|v| *v * *v).sum::<T>().sqrt()
    }

    /// Largest `|M_ij - M_ji|`.
    pub fn symmetric_defect(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.order {
            for j in 0..i {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    /// Largest `|M_ij + M_ji|`.
    pub fn antisymmetric_defect(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.order {
            for j in 0..=i {
                m = m.max((self.get(i, j) + self.get(j, i)).abs());
            }
        }
        m
    }

    /// `(M - Mᵀ)/2` together with `‖M + Mᵀ‖_F / 2`.
    pub fn antisymmetrize(&self) -> (Self, T) {
        let half = T::lit(0.5);
        let a = Self::from_fn(self.order, |i, j| half * (self.get(i, j) - self.get(j, i)));
        let s = Self::from_fn(self.order, |i, j| half * (self.get(i, j) + self.get(j, i)));
        let a = Self { symmetry: Symmetry::Antisymmetric, ..a };
        (a, s.frobenius_norm())
    }
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ`, values descending.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Vec<Vec<T>>,
    pub singular_values: Vec<T>,
    pub v: Vec<Vec<T>>,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// One-sided Jacobi SVD. Columns of `u`/`v` are stored as vectors.
pub fn svd<T: Real>(a: &SquareMatrix<T>) -> Svd<T> {
    let n = a.order();
    let mut w: Vec<Vec<T>> = (0..n).map(|j| (0..n).map(|i| a.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + T::one().hypot(zeta));
                let c = T::one() / T::one().hypot(t);
                let s = c * t;
                for m in [&mut w, &mut v] {
                    let (lo, hi) = m.split_at_mut(q);
                    for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let (a0, b0) = (*xp, *xq);
                        *xp = c * a0 - s * b0;
                        *xq = s * a0 + c * b0;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let sig: Vec<T> = w.iter().map(|c| norm(c)).collect();
    idx.sort_by(|&i, &j| sig[j].partial_cmp(&sig[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for &j in &idx {
        let sj = sig[j];
        u.push(if sj > T::zero() { w[j].iter().map(|x| *x / sj).collect() } else { vec![T::zero(); n] });
        vs.push(v[j].clone());
        s.push(sj);
    }
    Svd { u, singular_values: s, v: vs }
}

/// Minimum-norm least-squares solution with the numerical kernel.
#[derive(Debug, Clone)]
pub struct KernelSolution<T> {
    pub solution: Vec<T>,
    /// Orthonormal basis of the kernel.
    pub kernel: Vec<Vec<T>>,
    pub singular_values: Vec<T>,
    /// `‖A x - rhs‖`.
    pub residual: T,
}

impl<T> KernelSolution<T> {
    pub fn rank(&self) -> usize {
        self.singular_values.len() - self.kernel.len()
    }
}

/// Solves `A x = rhs` in the least-squares sense, never failing on inconsistency.
///
/// Singular values at or below `tol` times the largest are treated as zero.
pub fn least_squares_with_kernel<T: Real>(a: &SquareMatrix<T>, rhs: &[T], tol: T) -> Result<KernelSolution<T>> {
    let n = a.order();
    if rhs.len() != n {
        return Err(invalid(format!("rhs length {} differs from matrix order {n}", rhs.len())));
    }
    if a.entries().iter().chain(rhs).any(|v| !v.is_finite()) {
        return Err(invalid("non-finite matrix or rhs entries"));
    }
    if !(tol >= T::zero()) {
        return Err(invalid("kernel tolerance must be non-negative"));
    }
    let d = svd(a);
    let smax = d.singular_values.first().copied().unwrap_or(T::zero());
    let threshold = tol * smax;
    let mut x = vec![T::zero(); n];
    let mut kernel = Vec::new();
    for (j, &s) in d.singular_values.iter().enumerate() {
        if s > threshold && s > T::zero() {
            let coef = dot(&d.u[j], rhs) / s;
            for (xi, vi) in x.iter_mut().zip(&d.v[j]) {
                *xi = *xi + coef * *vi;
            }
        } else {
            kernel.push(d.v[j].clone());
        }
    }
    let ax = a.mul_vec(&x);
    let residual = ax.iter().zip(rhs).map(|(p, q)| (*p - *q) * (*p - *q)).sum::<T>().sqrt();
    Ok(KernelSolution { solution: x, kernel, singular_values: d.singular_values, residual })
}

/// As [`least_squares_with_kernel`], but an rhs component in the cokernel beyond
/// `tol` (relative to `‖rhs‖`) is an inconsistent constraint.
pub fn solve_linear_with_kernel<T: Real>(a: &SquareMatrix<T>, rhs: &[T], tol: T) -> Result<KernelSolution<T>> {
    let sol = least_squares_with_kernel(a, rhs, tol)?;
    let scale = norm(rhs).max(T::min_positive_value());
    if sol.residual > tol * scale {
        return Err(Error::InconsistentConstraint { residual: sol.residual.as_f64(), tolerance: (tol * scale).as_f64() });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_reconstructs() {
        let a = SquareMatrix::new(3, vec![4.0, 1.0, -2.0, 0.5, 3.0, 1.0, 2.0, -1.0, 0.0]).unwrap();
        let d = svd(&a);
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3).map(|k| d.u[k][i] * d.singular_values[k] * d.v[k][j]).sum();
                assert!((r - a.get(i, j)).abs() < 1e-13);
            }
        }
        assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rank_deficient_rhs_outside_range() {
        let a = SquareMatrix::new(2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            solve_linear_with_kernel(&a, &[0.0, 1.0], 1e-10),
            Err(Error::InconsistentConstraint { .. })
        ));
        let ls = least_squares_with_kernel(&a, &[0.0, 1.0], 1e-10).unwrap();
        assert_eq!(ls.residual, 1.0);
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let a = SquareMatrix::<f64>::zeros(3);
        let s = solve_linear_with_kernel(&a, &[0.0; 3], 1e-10).unwrap();
        assert_eq!(s.kernel.len(), 3);
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn symmetry_flags() {
        let a = SquareMatrix::new(2, vec![0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!(a.clone().with_symmetry(Symmetry::Antisymmetric).is_ok());
        assert!(a.with_symmetry(Symmetry::Symmetric).is_err());
        let m = SquareMatrix::new(2, vec![1.0, 3.0, 1.0, 2.0]).unwrap();
        let (anti, sym) = m.antisymmetrize();
        assert_eq!(anti.get(0, 1), 1.0);
        assert_eq!(anti.antisymmetric_defect(), 0.0);
        assert!(sym > 0.0);
    }
}

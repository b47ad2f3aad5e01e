use std::ops::Neg;

use num_traits::Num;

use crate::error::{invalid, Error, Result};
use crate::scalar::{c, Real};

pub const MAX_GENERATORS: usize = 16;

/// Generator indices of the four-generator algebra used by the super-reduction.
pub const XI: usize = 0;
pub const XI_STAR: usize = 1;
pub const ETA: usize = 2;
pub const ETA_STAR: usize = 3;

/// Element of the exterior algebra on `g` generators. Coefficient `k` multiplies
/// the ordered monomial of the generators whose bits are set in `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannElement<T> {
    generators: usize,
    coefficients: Vec<T>,
}

/// Sign of reordering `mono(a) · mono(b)` into ascending order; zero if they share a generator.
fn product_sign(a: usize, b: usize) -> i8 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl<T: Num + Clone + Neg<Output = T>> GrassmannElement<T> {
    pub fn zero(generators: usize) -> Result<Self> {
        if generators > MAX_GENERATORS {
            return Err(invalid(format!("{generators} generators exceed the limit {MAX_GENERATORS}")));
        }
        Ok(Self { generators, coefficients: vec![T::zero(); 1 << generators] })
    }

    pub fn scalar(generators: usize, value: T) -> Result<Self> {
        let mut e = Self::zero(generators)?;
        e.coefficients[0] = value;
        Ok(e)
    }

    pub fn one(generators: usize) -> Result<Self> {
        Self::scalar(generators, T::one())
    }

    pub fn generator(generators: usize, index: usize) -> Result<Self> {
        Self::monomial(generators, &[index], T::one())
    }

    /// `value · θ_{i₁} θ_{i₂} ⋯` in the given order (sign applied); zero on repeats.
    pub fn monomial(generators: usize, indices: &[usize], value: T) -> Result<Self> {
        let mut e = Self::scalar(generators, value)?;
        for &i in indices {
            if i >= generators {
                return Err(invalid(format!("generator {i} out of range 0..{generators}")));
            }
            let mut g = Self::zero(generators)?;
            g.coefficients[1 << i] = T::one();
            e = e.mul(&g)?;
        }
        Ok(e)
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn coefficient(&self, mask: usize) -> &T {
        &self.coefficients[mask]
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// Coefficient of the monomial with no generators.
    pub fn body(&self) -> &T {
        &self.coefficients[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.generators != other.generators {
            return Err(Error::GeneratorMismatch { left: self.generators, right: other.generators });
        }
        Ok(())
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check(other)?;
        let coefficients =
            self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| f(a.clone(), b.clone())).collect();
        Ok(Self { generators: self.generators, coefficients })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self { generators: self.generators, coefficients: self.coefficients.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.generators)?;
        for (a, ca) in self.coefficients.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coefficients.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let term = ca.clone() * cb.clone();
                let slot = &mut out.coefficients[a | b];
                match product_sign(a, b) {
                    1 => *slot = slot.clone() + term,
                    -1 => *slot = slot.clone() - term,
                    _ => {}
                }
            }
        }
        Ok(out)
    }

    /// Keeps only monomials of even degree.
    pub fn even_part(&self) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| if k.count_ones() % 2 == 0 { c.clone() } else { T::zero() })
            .collect();
        Self { generators: self.generators, coefficients }
    }

    /// `Σ xᵏ/k!`, which terminates because the element has no body.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.body().is_zero() {
            return Err(invalid("exponential series needs an element without body"));
        }
        let mut sum = Self::one(self.generators)?;
        let mut term = sum.clone();
        let mut k = T::zero();
        loop {
            k = k + T::one();
            term = term.mul(self)?;
            if term.is_zero() {
                return Ok(sum);
            }
            term = Self { generators: self.generators, coefficients: term.coefficients.into_iter().map(|c| c / k.clone()).collect() };
            sum = sum.add(&term)?;
        }
    }
}

pub type GrassmannMatrix2<T> = [[GrassmannElement<T>; 2]; 2];

fn mat_mul<T: Num + Clone + Neg<Output = T>>(a: &GrassmannMatrix2<T>, b: &GrassmannMatrix2<T>) -> Result<GrassmannMatrix2<T>> {
    let entry = |i: usize, j: usize| -> Result<GrassmannElement<T>> { a[i][0].mul(&b[0][j])?.add(&a[i][1].mul(&b[1][j])?) };
    Ok([[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]])
}

/// Exponential of a 2×2 matrix with bodiless entries; the series terminates by nilpotency.
pub fn exp_matrix2<T: Num + Clone + Neg<Output = T>>(m: &GrassmannMatrix2<T>) -> Result<GrassmannMatrix2<T>> {
    let g = m[0][0].generators();
    if m.iter().flatten().any(|e| !e.body().is_zero()) {
        return Err(invalid("matrix exponential needs bodiless entries"));
    }
    let zero = GrassmannElement::zero(g)?;
    let one = GrassmannElement::one(g)?;
    let mut sum = [[one.clone(), zero.clone()], [zero.clone(), one]];
    let mut term = sum.clone();
    let mut k = T::zero();
    loop {
        k = k + T::one();
        term = mat_mul(&term, m)?;
        if term.iter().flatten().all(|e| e.is_zero()) {
            return Ok(sum);
        }
        for row in term.iter_mut() {
            for e in row.iter_mut() {
                let coefficients = e.coefficients.iter().map(|c| c.clone() / k.clone()).collect();
                *e = GrassmannElement { generators: g, coefficients };
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] = sum[i][j].add(&term[i][j])?;
            }
        }
    }
}

/// Spinor `exp(ηξ J₊ − ξ*η* J₋)|−⟩` in the basis `(|+⟩, |−⟩)`, by series.
pub fn super_coherent_state<T: Num + Clone + Neg<Output = T>>() -> Result<[GrassmannElement<T>; 2]> {
    let g = 4;
    let eta_xi = GrassmannElement::monomial(g, &[ETA, XI], T::one())?;
    let xis_etas = GrassmannElement::monomial(g, &[XI_STAR, ETA_STAR], T::one())?;
    let zero = GrassmannElement::zero(g)?;
    let m = [[zero.clone(), eta_xi], [xis_etas.neg(), zero]];
    let u = exp_matrix2(&m)?;
    Ok([u[0][1].clone(), u[1][1].clone()])
}

/// Closed form `(ηξ, 1 − ρ²/2)` with `ρ² = η*η ξ*ξ`.
pub fn super_coherent_state_closed<T: Num + Clone + Neg<Output = T>>() -> Result<[GrassmannElement<T>; 2]> {
    let g = 4;
    let eta_xi = GrassmannElement::monomial(g, &[ETA, XI], T::one())?;
    let rho2 = GrassmannElement::monomial(g, &[ETA_STAR, ETA, XI_STAR, XI], T::one())?;
    let two = T::one() + T::one();
    let bottom = GrassmannElement::one(g)?.sub(&rho2.scale(T::one() / two))?;
    Ok([eta_xi, bottom])
}

/// Real symmetric pairing of the super two-form in `(ξ₁, ξ₂)`, with the even
/// factor `iη*η` taken as the unit.
pub fn super_two_form() -> [[f64; 2]; 2] {
    [[1.0, 0.0], [0.0, 1.0]]
}

/// `dẼ` in units of `iη*η`: `A(−ξ₂, ξ₁)`.
pub fn super_energy_differential<T: Real>(xi1: T, xi2: T, a: T) -> [T; 2] {
    [-a * xi2, a * xi1]
}

/// Solves `i_Γ ω̃ = −dẼ`; contracting the symmetric form gives `2KΓ = −dẼ`.
pub fn super_reduced_field<T: Real>(xi1: T, xi2: T, a: T) -> [T; 2] {
    let k = super_two_form();
    let de = super_energy_differential(xi1, xi2, a);
    let half = c::<T>(0.5);
    [-de[0] * half / c::<T>(k[0][0]), -de[1] * half / c::<T>(k[1][1])]
}

/// Rotation by `At/2` in the `(ξ₁, ξ₂)` plane.
pub fn super_reduced_flow<T: Real>(xi1: T, xi2: T, a: T, t: T) -> (T, T) {
    let (s, co) = (a * t * c::<T>(0.5)).sin_cos();
    (co * xi1 + s * xi2, -s * xi1 + co * xi2)
}

/// `{ξᵢ, ξⱼ}₊ = ω̃(X_{ξᵢ}, X_{ξⱼ})` with `i_{X_f} ω̃ = df`, indices in `{1, 2}`.
pub fn super_bracket(i: usize, j: usize) -> Result<f64> {
    if !(1..=2).contains(&i) || !(1..=2).contains(&j) {
        return Err(invalid(format!("bracket indices ({i}, {j}) must be 1 or 2")));
    }
    let k = super_two_form();
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let inv = [[k[1][1] / det, -k[0][1] / det], [-k[1][0] / det, k[0][0] / det]];
    let x = |n: usize| [inv[0][n - 1], inv[1][n - 1]];
    let (xi, xj) = (x(i), x(j));
    Ok((0..2).map(|p| (0..2).map(|q| k[p][q] * xi[p] * xj[q]).sum::<f64>()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_counts_transpositions() {
        assert_eq!(product_sign(0b10, 0b01), -1);
        assert_eq!(product_sign(0b01, 0b10), 1);
        assert_eq!(product_sign(0b110, 0b001), 1);
        assert_eq!(product_sign(0b1, 0b1), 0);
    }

    #[test]
    fn monomial_order_sign() {
        let a = GrassmannElement::<i64>::monomial(3, &[2, 0], 1).unwrap();
        assert_eq!(*a.coefficient(0b101), -1);
    }
}

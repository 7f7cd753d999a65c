//! Exact evaluation of the variational form of the coupled system on a centred disk, for
//! polynomial arguments and constant coefficients.
//!
//! `A(u1, u2; phi, v) = int div(a2 u2) div(a2 conj v) + a2 b2 u2 . conj v
//!                    + int a1 grad u1 . grad conj phi + b1 u1 conj phi
//!                    - oint a2 b2 (nu . conj v) u1 - oint a2 (nu . u2) conj phi`
//!
//! `F(phi; v) = int rho2 div(a2 conj v) - int rho1 conj phi + oint a2 f2 conj phi
//!            - oint a2 b2 (nu . conj v) f1`
//!
//! Monomials are integrated in closed form, so the only error is floating-point roundoff.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

type C64 = Complex64;

/// Bivariate polynomial `sum c_ab x^a y^b` with complex coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), C64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: C64) -> Self {
        Poly::monomial(c, 0, 0)
    }

    pub fn monomial(c: C64, a: u32, b: u32) -> Self {
        let mut p = Poly::zero();
        p.add_term(c, a, b);
        p
    }

    pub fn x() -> Self {
        Poly::monomial(C64::new(1.0, 0.0), 1, 0)
    }

    pub fn y() -> Self {
        Poly::monomial(C64::new(1.0, 0.0), 0, 1)
    }

    pub fn add_term(&mut self, c: C64, a: u32, b: u32) {
        *self.terms.entry((a, b)).or_insert(C64::new(0.0, 0.0)) += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), C64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().filter(|(_, c)| c.norm() > 0.0).map(|(&(a, b), _)| a + b).max().unwrap_or(0)
    }

    /// Random polynomial of total degree at most `degree`, coefficients uniform in the unit square.
    pub fn random(rng: &mut impl Rng, degree: u32) -> Self {
        let mut p = Poly::zero();
        for a in 0..=degree {
            for b in 0..=(degree - a) {
                p.add_term(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), a, b);
            }
        }
        p
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        self.terms.iter().map(|(&(a, b), &c)| c * x.powi(a as i32) * y.powi(b as i32)).sum()
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly { terms: self.terms.iter().map(|(&k, &c)| (k, c * s)).collect() }
    }

    pub fn conj(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(&k, &c)| (k, c.conj())).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (&(a, b), &c) in &other.terms {
            p.add_term(c, a, b);
        }
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (&(a, b), &c) in &self.terms {
            for (&(d, e), &f) in &other.terms {
                p.add_term(c * f, a + d, b + e);
            }
        }
        p
    }

    pub fn dx(&self) -> Poly {
        let mut p = Poly::zero();
        for (&(a, b), &c) in &self.terms {
            if a > 0 {
                p.add_term(c * a as f64, a - 1, b);
            }
        }
        p
    }

    pub fn dy(&self) -> Poly {
        let mut p = Poly::zero();
        for (&(a, b), &c) in &self.terms {
            if b > 0 {
                p.add_term(c * b as f64, a, b - 1);
            }
        }
        p
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.norm() <= tol)
    }

    /// Integral over the disk of radius `r` centred at the origin.
    pub fn integrate_disk(&self, r: f64) -> C64 {
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c * angular_moment(a, b) * r.powi((a + b + 2) as i32) / (a + b + 2) as f64)
            .sum()
    }

    /// Integral with respect to arc length over the circle of radius `r` centred at the origin.
    pub fn integrate_circle(&self, r: f64) -> C64 {
        self.terms.iter().map(|(&(a, b), &c)| c * angular_moment(a, b) * r.powi((a + b + 1) as i32)).sum()
    }
}

fn double_factorial(n: i64) -> f64 {
    let mut out = 1.0;
    let mut k = n;
    while k > 1 {
        out *= k as f64;
        k -= 2;
    }
    out
}

/// `int_0^{2pi} cos^a sin^b`.
fn angular_moment(a: u32, b: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 {
        return 0.0;
    }
    TAU * double_factorial(a as i64 - 1) * double_factorial(b as i64 - 1) / double_factorial((a + b) as i64)
}

/// Vector field argument of the form; only curl-free fields belong to the space.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorPoly {
    Gradient(Poly),
    Components([Poly; 2]),
}

impl VectorPoly {
    /// Components of a curl-free field, or `NonCurlFree`.
    pub fn components(&self) -> Result<[Poly; 2]> {
        match self {
            VectorPoly::Gradient(p) => Ok([p.dx(), p.dy()]),
            VectorPoly::Components([v1, v2]) => {
                let curl = v2.dx().sub(&v1.dy());
                let scale = v1.terms().chain(v2.terms()).map(|(_, c)| c.norm()).fold(1.0, f64::max);
                if !curl.is_zero(1e-12 * scale) {
                    return Err(Error::NonCurlFree);
                }
                Ok([v1.clone(), v2.clone()])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormCoefficients {
    pub radius: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

fn dot(u: &[Poly; 2], v: &[Poly; 2]) -> Poly {
    u[0].mul(&v[0]).add(&u[1].mul(&v[1]))
}

fn div(v: &[Poly; 2]) -> Poly {
    v[0].dx().add(&v[1].dy())
}

/// `r * (nu . v)` on the circle of radius `r`, written as the polynomial `x v1 + y v2`.
fn radial(v: &[Poly; 2]) -> Poly {
    Poly::x().mul(&v[0]).add(&Poly::y().mul(&v[1]))
}

pub fn evaluate_form_a(k: &FormCoefficients, u1: &Poly, u2: &VectorPoly, phi: &Poly, v: &VectorPoly) -> Result<C64> {
    let u2 = u2.components()?;
    let v = v.components()?;
    let vc = [v[0].conj(), v[1].conj()];
    let phic = phi.conj();
    let r = k.radius;
    let c = |x: f64| C64::new(x, 0.0);
    let volume = div(&u2)
        .mul(&div(&vc))
        .scale(c(k.a2 * k.a2))
        .add(&dot(&u2, &vc).scale(c(k.a2 * k.b2)))
        .add(&dot(&[u1.dx(), u1.dy()], &[phic.dx(), phic.dy()]).scale(c(k.a1)))
        .add(&u1.mul(&phic).scale(c(k.b1)));
    let boundary = radial(&vc)
        .mul(u1)
        .scale(c(k.a2 * k.b2 / r))
        .add(&radial(&u2).mul(&phic).scale(c(k.a2 / r)));
    Ok(volume.integrate_disk(r) - boundary.integrate_circle(r))
}

/// Data of the functional F.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FormData {
    pub rho1: Poly,
    pub rho2: Poly,
    pub f1: Poly,
    pub f2: Poly,
}

pub fn evaluate_functional_f(k: &FormCoefficients, data: &FormData, phi: &Poly, v: &VectorPoly) -> Result<C64> {
    let v = v.components()?;
    let vc = [v[0].conj(), v[1].conj()];
    let phic = phi.conj();
    let r = k.radius;
    let c = |x: f64| C64::new(x, 0.0);
    let volume = data.rho2.mul(&div(&vc)).scale(c(k.a2)).sub(&data.rho1.mul(&phic));
    let boundary = data
        .f2
        .mul(&phic)
        .scale(c(k.a2))
        .sub(&radial(&vc).mul(&data.f1).scale(c(k.a2 * k.b2 / r)));
    Ok(volume.integrate_disk(r) + boundary.integrate_circle(r))
}

/// `||u1||^2_{H^1} + ||v||^2_{L^2} + ||div(a2 v)||^2_{L^2}`.
pub fn energy_norm_sq(k: &FormCoefficients, u1: &Poly, v: &VectorPoly) -> Result<f64> {
    let v = v.components()?;
    let vc = [v[0].conj(), v[1].conj()];
    let g = [u1.dx(), u1.dy()];
    let gc = [g[0].conj(), g[1].conj()];
    let d = div(&v).scale(C64::new(k.a2, 0.0));
    let total = u1
        .mul(&u1.conj())
        .add(&dot(&g, &gc))
        .add(&dot(&v, &vc))
        .add(&d.mul(&d.conj()));
    Ok(total.integrate_disk(k.radius).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        assert!((Poly::constant(C64::new(1.0, 0.0)).integrate_disk(2.0).re - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let x2 = Poly::x().mul(&Poly::x());
        assert!((x2.integrate_disk(1.0).re - std::f64::consts::PI / 4.0).abs() < 1e-14);
        assert!((x2.integrate_circle(1.0).re - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn curl_check() {
        let v = VectorPoly::Components([Poly::y(), Poly::x()]);
        assert!(v.components().is_ok());
        let w = VectorPoly::Components([Poly::y(), Poly::x().scale(C64::new(-1.0, 0.0))]);
        assert!(matches!(w.components(), Err(Error::NonCurlFree)));
    }
}

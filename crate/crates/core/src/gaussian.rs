//! Polynomial-times-Gaussian calculus for characteristic functions.
//!
//! A [`GaussianPolynomial`] is `P(alpha, alpha*, beta, beta*) exp(Q)` with
//!
//! `Q = u |alpha|^2 + v |beta|^2 + w (alpha beta + alpha* beta*)`.
//!
//! The four arguments are treated as independent (Wirtinger) variables, so the
//! family is closed under every partial derivative. Photon subtraction acts
//! on the two-mode squeezed vacuum characteristic function as
//!
//! `chi_{m,n} = N^{-1} e^{-(|alpha|^2+|beta|^2)/2} L_alpha^m L_beta^n [chi e^{(|alpha|^2+|beta|^2)/2}]`
//!
//! with `L_alpha = (-d/d alpha)(d/d alpha*)`.
//!
//! All coefficients are exact rationals: an `f64` squeezing value is itself a
//! dyadic rational, and double precision loses every significant digit to
//! cancellation once `m + n` and `lam` grow (already at `(8, 8, 0.9)`). The
//! polynomial stores integer numerators over one shared denominator.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::resource::SubtractionSpec;

/// Exponents of `(alpha, alpha*, beta, beta*)`.
pub type Monomial = [u32; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Alpha,
    AlphaConj,
    Beta,
    BetaConj,
}

impl Variable {
    fn index(self) -> usize {
        match self {
            Variable::Alpha => 0,
            Variable::AlphaConj => 1,
            Variable::Beta => 2,
            Variable::BetaConj => 3,
        }
    }
}

/// Coefficients of the quadratic exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticKernel {
    /// Coefficient of `|alpha|^2`.
    pub u: BigRational,
    /// Coefficient of `|beta|^2`.
    pub v: BigRational,
    /// Coefficient of `alpha beta + alpha* beta*`.
    pub w: BigRational,
}

impl QuadraticKernel {
    pub fn to_f64(&self) -> (f64, f64, f64) {
        (ratio_to_f64(&self.u), ratio_to_f64(&self.v), ratio_to_f64(&self.w))
    }

    fn exponent(&self, point: [Complex64; 4]) -> Complex64 {
        let (u, v, w) = self.to_f64();
        let [a, ac, b, bc] = point;
        a * ac * u + b * bc * v + (a * b + ac * bc) * w
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn big_factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Exact rational value of a finite `f64`.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPolynomial {
    terms: BTreeMap<Monomial, BigInt>,
    denom: BigInt,
    kernel: QuadraticKernel,
}

impl GaussianPolynomial {
    /// `1 * exp(Q)`.
    pub fn pure_gaussian(kernel: QuadraticKernel) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert([0; 4], BigInt::one());
        GaussianPolynomial { terms, denom: BigInt::one(), kernel }
    }

    pub fn kernel(&self) -> &QuadraticKernel {
        &self.kernel
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree of the polynomial part.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn exact_coefficient(&self, mono: Monomial) -> BigRational {
        match self.terms.get(&mono) {
            Some(c) => BigRational::new(c.clone(), self.denom.clone()),
            None => BigRational::zero(),
        }
    }

    pub fn coefficient(&self, mono: Monomial) -> f64 {
        ratio_to_f64(&self.exact_coefficient(mono))
    }

    /// Polynomial value at the origin, which is also the full function value there.
    pub fn constant_term(&self) -> BigRational {
        self.exact_coefficient([0; 4])
    }

    /// Exact check of `c(p,q,s,t) = c(q,p,t,s)`.
    pub fn is_conjugation_symmetric(&self) -> bool {
        self.terms.iter().all(|(&[p, q, s, t], c)| self.terms.get(&[q, p, t, s]) == Some(c))
    }

    /// Multiplies the polynomial by `exp(du |alpha|^2 + dv |beta|^2)`.
    pub fn shift_kernel(&self, du: &BigRational, dv: &BigRational) -> Self {
        let mut out = self.clone();
        out.kernel.u = &out.kernel.u + du;
        out.kernel.v = &out.kernel.v + dv;
        out
    }

    /// Multiplies one coefficient by an integer factor. Used for mutation
    /// checks of the verification harness.
    pub fn scale_coefficient(&mut self, mono: Monomial, factor: i64) {
        if let Some(c) = self.terms.get_mut(&mono) {
            *c *= factor;
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    fn negated(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }

    /// Partial derivative of `P exp(Q)` with respect to one variable:
    /// `(dP/dx + P dQ/dx) exp(Q)`.
    pub fn differentiate(&self, var: Variable) -> Self {
        let k = &self.kernel;
        let common = k.u.denom().lcm(k.v.denom()).lcm(k.w.denom());
        let scaled = |r: &BigRational| r.numer() * (&common / r.denom());
        let (u, v, w) = (scaled(&k.u), scaled(&k.v), scaled(&k.w));

        // dQ/dx as (integer coefficient over `common`, variable it multiplies)
        let grad: [(&BigInt, usize); 2] = match var {
            Variable::Alpha => [(&u, 1), (&w, 2)],
            Variable::AlphaConj => [(&u, 0), (&w, 3)],
            Variable::Beta => [(&v, 3), (&w, 0)],
            Variable::BetaConj => [(&v, 2), (&w, 1)],
        };
        let i = var.index();

        let mut out: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (mono, c) in &self.terms {
            if mono[i] > 0 {
                let mut lowered = *mono;
                lowered[i] -= 1;
                *out.entry(lowered).or_default() += c * &common * BigInt::from(mono[i]);
            }
            for (coef, j) in grad {
                if coef.is_zero() {
                    continue;
                }
                let mut raised = *mono;
                raised[j] += 1;
                *out.entry(raised).or_default() += c * coef;
            }
        }
        let mut result = GaussianPolynomial { terms: out, denom: &self.denom * &common, kernel: self.kernel.clone() };
        result.canonicalize();
        result
    }

    /// Drops zero terms and removes the common content shared with the denominator.
    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        let mut g = self.denom.clone();
        for c in self.terms.values() {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            for c in self.terms.values_mut() {
                *c = &*c / &g;
            }
            self.denom = &self.denom / &g;
        }
        if self.terms.is_empty() {
            self.denom = BigInt::one();
        }
    }

    /// Coefficients rounded to `f64`, paired with their monomials.
    pub fn float_terms(&self) -> Vec<(Monomial, f64)> {
        self.terms
            .iter()
            .map(|(m, c)| (*m, ratio_to_f64(&BigRational::new(c.clone(), self.denom.clone()))))
            .collect()
    }

    /// Evaluates the function with the four arguments set independently.
    pub fn evaluate(&self, alpha: Complex64, alpha_conj: Complex64, beta: Complex64, beta_conj: Complex64) -> Complex64 {
        let point = [alpha, alpha_conj, beta, beta_conj];
        eval_terms(&self.float_terms(), point) * self.kernel.exponent(point).exp()
    }
}

fn eval_terms(terms: &[(Monomial, f64)], point: [Complex64; 4]) -> Complex64 {
    terms
        .iter()
        .map(|(mono, c)| {
            mono.iter().zip(point.iter()).fold(Complex64::new(*c, 0.0), |acc, (&e, &z)| acc * z.powu(e))
        })
        .sum()
}

/// Characteristic function of the two-mode squeezed vacuum with `lam = tanh r`:
/// `u = v = -(1 + lam^2) / (2 (1 - lam^2))`, `w = lam / (1 - lam^2)`.
pub fn tmsv_kernel(lam: f64) -> GaussianPolynomial {
    assert!((0.0..1.0).contains(&lam), "lam must lie in [0, 1)");
    let l = exact(lam);
    let one = BigRational::one();
    let l2 = &l * &l;
    let den = &one - &l2;
    let u = -(&one + &l2) / (BigRational::from_integer(2.into()) * &den);
    let w = &l / &den;
    GaussianPolynomial::pure_gaussian(QuadraticKernel { u: u.clone(), v: u, w })
}

/// Applies `L_alpha^m L_beta^n` with the `exp(+-(|alpha|^2+|beta|^2)/2)`
/// regularizing factors folded into the kernel before and after. The result
/// is unnormalized: its value at the origin is the squared norm `N_{m,n}`.
pub fn apply_lambda_ops(g: &GaussianPolynomial, m: u32, n: u32) -> GaussianPolynomial {
    let half = BigRational::new(1.into(), 2.into());
    let mut h = g.shift_kernel(&half, &half);
    for _ in 0..m {
        h = h.differentiate(Variable::AlphaConj).differentiate(Variable::Alpha).negated();
    }
    for _ in 0..n {
        h = h.differentiate(Variable::BetaConj).differentiate(Variable::Beta).negated();
    }
    let neg_half = -half;
    h.shift_kernel(&neg_half, &neg_half)
}

/// Unnormalized characteristic function of the resource.
pub fn resource_polynomial(spec: &SubtractionSpec) -> GaussianPolynomial {
    apply_lambda_ops(&tmsv_kernel(spec.lam()), spec.m(), spec.n())
}

/// Normalized characteristic function `chi_12(alpha, beta)` of one resource,
/// prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ResourceCharacteristic {
    terms: Vec<(Monomial, f64)>,
    kernel: QuadraticKernel,
}

impl ResourceCharacteristic {
    pub fn new(spec: &SubtractionSpec) -> Self {
        let g = resource_polynomial(spec);
        let norm = g.constant_term();
        let terms = g
            .terms
            .iter()
            .map(|(m, c)| (*m, ratio_to_f64(&(BigRational::new(c.clone(), g.denom.clone()) / &norm))))
            .collect();
        ResourceCharacteristic { terms, kernel: g.kernel }
    }

    pub fn eval(&self, alpha: Complex64, beta: Complex64) -> Complex64 {
        let point = [alpha, alpha.conj(), beta, beta.conj()];
        eval_terms(&self.terms, point) * self.kernel.exponent(point).exp()
    }
}

/// `chi_12(alpha, beta) = <psi| D_1(alpha) D_2(beta) |psi>` via the engine.
pub fn chi12(spec: &SubtractionSpec, alpha: Complex64, beta: Complex64) -> Complex64 {
    ResourceCharacteristic::new(spec).eval(alpha, beta)
}

/// Product of the two input characteristic functions appearing in the
/// fidelity integrand, `chi_in(alpha) chi_in(-alpha)` for a coherent input
/// `|mu>`. The phases `+-2i Im(alpha mu*)` cancel and leave `exp(-|alpha|^2)`
/// for every `mu`.
pub fn input_overlap(alpha: Complex64, mu: Complex64) -> Complex64 {
    let chi_in = |a: Complex64| (-a.norm_sqr() / 2.0 + Complex64::i() * 2.0 * (a * mu.conj()).im).exp();
    chi_in(alpha) * chi_in(-alpha)
}

/// Restriction of a polynomial to the teleportation diagonal, where
/// `chi_12` is evaluated at `(alpha*, alpha)`: slot `alpha -> z*`,
/// `alpha* -> z`, `beta -> z`, `beta* -> z*`.
///
/// Returns the exact coefficients of `|z|^{2k}` (off-diagonal `z^a z*^b`,
/// `a != b`, integrate to zero) and the kernel's coefficient of `|z|^2`.
pub(crate) fn teleport_diagonal(g: &GaussianPolynomial) -> (BTreeMap<u32, BigRational>, BigRational) {
    let mut radial: BTreeMap<u32, BigInt> = BTreeMap::new();
    for (&mono, c) in &g.terms {
        let (z_pow, zbar_pow) = teleport_substitution(mono);
        if z_pow == zbar_pow {
            *radial.entry(z_pow).or_default() += c;
        }
    }
    let radial = radial
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, BigRational::new(c, g.denom.clone())))
        .collect();
    let k = &g.kernel;
    let diag = &k.u + &k.v + BigRational::from_integer(2.into()) * &k.w;
    (radial, diag)
}

/// Powers `(a, b)` of `z^a z*^b` produced by one monomial on the teleportation diagonal.
pub fn teleport_substitution(mono: Monomial) -> (u32, u32) {
    let [p, q, s, t] = mono;
    (q + s, p + t)
}

/// `(1/pi) int |z|^{2k} exp(-kappa |z|^2) d^2 z = k! / kappa^{k+1}`.
pub fn gaussian_moment(k: u32, kappa: &BigRational) -> BigRational {
    BigRational::from_integer(big_factorial(k)) / num_traits::pow(kappa.clone(), k as usize + 1)
}

/// Fidelity of an unnormalized resource polynomial.
///
/// `F = (1/pi) int exp(-|alpha|^2) chi_12(alpha*, alpha) d^2 alpha`: the
/// coherent-state input contributes only `exp(-|alpha|^2)` (see
/// [`input_overlap`]). Odd and unbalanced moments vanish; the rest are
/// evaluated exactly and divided by the polynomial's value at the origin.
pub fn fidelity_from_polynomial(g: &GaussianPolynomial) -> Result<f64> {
    let norm = g.constant_term();
    if !norm.is_positive() {
        return Err(Error::Consistency(format!("non-positive normalization {}", ratio_to_f64(&norm))));
    }
    let (radial, diag) = teleport_diagonal(g);
    let kappa = BigRational::one() - diag;
    if !kappa.is_positive() {
        return Err(Error::NotPositiveDefinite { kappa: ratio_to_f64(&kappa) });
    }
    let total = radial
        .iter()
        .fold(BigRational::zero(), |acc, (&k, c)| acc + c * gaussian_moment(k, &kappa));
    Ok(ratio_to_f64(&(total / norm)))
}

/// Teleportation fidelity for arbitrary `(m, n)` via exact Gaussian moments.
pub fn fidelity_general(spec: &SubtractionSpec) -> Result<f64> {
    fidelity_from_polynomial(&resource_polynomial(spec))
}

//! A small closed algebra of time profiles: finite sums `Σ a · t^n · e^{λt}`
//! with complex amplitudes `a`, non-negative integer powers `n`, and real
//! rates `λ`.  The class is closed under addition, multiplication,
//! differentiation, and antidifferentiation, which is exactly what the
//! linear-action and conserved-operator machinery needs.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One `a · t^n · e^{λt}` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub a: Complex64,
    pub n: u32,
    pub lambda: f64,
}

/// Canonicalized finite sum of [`Term`]s: like terms merged, exact zeros
/// dropped, terms sorted by `(n, lambda)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeCoefficient {
    terms: Vec<Term>,
}

impl TimeCoefficient {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(a: f64) -> Self {
        Self::from_terms(vec![Term {
            a: Complex64::new(a, 0.0),
            n: 0,
            lambda: 0.0,
        }])
    }

    pub fn constant_complex(a: Complex64) -> Self {
        Self::from_terms(vec![Term {
            a,
            n: 0,
            lambda: 0.0,
        }])
    }

    /// `a · t^n`.
    pub fn monomial(a: f64, n: u32) -> Self {
        Self::from_terms(vec![Term {
            a: Complex64::new(a, 0.0),
            n,
            lambda: 0.0,
        }])
    }

    /// `a · t^n · e^{λt}`.
    pub fn term(a: f64, n: u32, lambda: f64) -> Self {
        Self::from_terms(vec![Term {
            a: Complex64::new(a, 0.0),
            n,
            lambda,
        }])
    }

    /// `a · e^{λt}` with complex amplitude.
    pub fn exponential(a: Complex64, lambda: f64) -> Self {
        Self::from_terms(vec![Term { a, n: 0, lambda }])
    }

    /// Canonicalize an arbitrary term list: merge equal `(n, λ)` keys, drop
    /// exact zeros, sort by `(n, λ)`.
    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            // Normalize -0.0 rates so they merge with +0.0.
            let lambda = if t.lambda == 0.0 { 0.0 } else { t.lambda };
            match merged
                .iter_mut()
                .find(|m| m.n == t.n && m.lambda.to_bits() == lambda.to_bits())
            {
                Some(m) => m.a += t.a,
                None => merged.push(Term {
                    a: t.a,
                    n: t.n,
                    lambda,
                }),
            }
        }
        merged.retain(|t| t.a.re != 0.0 || t.a.im != 0.0);
        merged.sort_by(|p, q| p.n.cmp(&q.n).then(p.lambda.total_cmp(&q.lambda)));
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every amplitude is exactly real.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.a.im == 0.0)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            acc += term.a * weight(t, term.n, term.lambda);
        }
        acc
    }

    /// Evaluate assuming the coefficient is real-valued (imaginary parts of
    /// the amplitudes are ignored; see [`is_real`](Self::is_real)).
    pub fn eval_real(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for term in &self.terms {
            acc += term.a.re * weight(t, term.n, term.lambda);
        }
        acc
    }

    /// Evaluate `d/dt` directly at `t`, without building the derivative sum.
    pub fn eval_derivative(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            if term.n > 0 {
                acc += term.a * f64::from(term.n) * weight(t, term.n - 1, term.lambda);
            }
            if term.lambda != 0.0 {
                acc += term.a * term.lambda * weight(t, term.n, term.lambda);
            }
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    a: t.a * s,
                    n: t.n,
                    lambda: t.lambda,
                })
                .collect(),
        )
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    a: t.a * s,
                    n: t.n,
                    lambda: t.lambda,
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for p in &self.terms {
            for q in &other.terms {
                terms.push(Term {
                    a: p.a * q.a,
                    n: p.n + q.n,
                    lambda: p.lambda + q.lambda,
                });
            }
        }
        Self::from_terms(terms)
    }

    pub fn derivative(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for term in &self.terms {
            if term.n > 0 {
                terms.push(Term {
                    a: term.a * f64::from(term.n),
                    n: term.n - 1,
                    lambda: term.lambda,
                });
            }
            if term.lambda != 0.0 {
                terms.push(Term {
                    a: term.a * term.lambda,
                    n: term.n,
                    lambda: term.lambda,
                });
            }
        }
        Self::from_terms(terms)
    }

    /// Closed-form antiderivative (integration constant zero).
    ///
    /// `∫ t^n dt = t^{n+1}/(n+1)`, and for `λ ≠ 0` repeated integration by
    /// parts gives `∫ t^n e^{λt} dt = e^{λt} Σ_{i=0..n} (-1)^i (n!/(n-i)!) t^{n-i} / λ^{i+1}`.
    /// The amplitudes grow like `λ^{-(n+1)}`, so round-tripping through the
    /// derivative loses accuracy relative to those intermediates as `λ → 0`.
    pub fn antiderivative(&self) -> Self {
        let mut terms = Vec::new();
        for term in &self.terms {
            if term.lambda == 0.0 {
                terms.push(Term {
                    a: term.a / f64::from(term.n + 1),
                    n: term.n + 1,
                    lambda: 0.0,
                });
            } else {
                let mut falling = 1.0; // n! / (n-i)!
                let mut sign = 1.0;
                for i in 0..=term.n {
                    if i > 0 {
                        falling *= f64::from(term.n - i + 1);
                        sign = -sign;
                    }
                    terms.push(Term {
                        a: term.a * sign * falling / term.lambda.powi(i as i32 + 1),
                        n: term.n - i,
                        lambda: term.lambda,
                    });
                }
            }
        }
        Self::from_terms(terms)
    }

    /// `∫_0^t` of the coefficient, i.e. the antiderivative shifted so it
    /// vanishes at `t = 0`.
    pub fn integral_from_zero(&self) -> Self {
        let g = self.antiderivative();
        let g0 = g.eval(0.0);
        g.sub(&Self::constant_complex(g0))
    }

    /// Term-by-term approximate equality: same canonical keys, amplitudes
    /// within `rel_tol` of the largest amplitude present.
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        let scale = self
            .terms
            .iter()
            .chain(&other.terms)
            .map(|t| t.a.norm())
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let diff = self.sub(other);
        diff.terms.iter().all(|t| t.a.norm() <= rel_tol * scale)
    }

    fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if !(t.a.re.is_finite() && t.a.im.is_finite() && t.lambda.is_finite()) {
                return Err(Error::InvalidParameter(
                    "time coefficient term with non-finite amplitude or rate".into(),
                ));
            }
        }
        Ok(())
    }
}

fn weight(t: f64, n: u32, lambda: f64) -> f64 {
    let p = if n == 0 { 1.0 } else { t.powi(n as i32) };
    if lambda == 0.0 {
        p
    } else {
        p * (lambda * t).exp()
    }
}

/// Serialized form of one term. `im`, `n`, and `lambda` default to zero so a
/// plain constant is just `{"re": 1.5}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    re: f64,
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    im: f64,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    n: u32,
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    lambda: f64,
}

fn is_zero_f64(v: &f64) -> bool {
    *v == 0.0
}
fn is_zero_u32(v: &u32) -> bool {
    *v == 0
}

impl Serialize for TimeCoefficient {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<RawTerm> = self
            .terms
            .iter()
            .map(|t| RawTerm {
                re: t.a.re,
                im: t.a.im,
                n: t.n,
                lambda: t.lambda,
            })
            .collect();
        raw.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TimeCoefficient {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<RawTerm>::deserialize(de)?;
        let coeff = TimeCoefficient::from_terms(
            raw.iter()
                .map(|r| Term {
                    a: Complex64::new(r.re, r.im),
                    n: r.n,
                    lambda: r.lambda,
                })
                .collect(),
        );
        coeff.validate().map_err(D::Error::custom)?;
        Ok(coeff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonicalization_merges_and_sorts() {
        let coeff = TimeCoefficient::from_terms(vec![
            Term {
                a: c(1.0, 0.0),
                n: 2,
                lambda: 0.5,
            },
            Term {
                a: c(2.0, 0.0),
                n: 0,
                lambda: 0.0,
            },
            Term {
                a: c(3.0, 0.0),
                n: 2,
                lambda: 0.5,
            },
            Term {
                a: c(-2.0, 0.0),
                n: 0,
                lambda: 0.0,
            },
        ]);
        // The two (n=2, λ=0.5) terms merge, the constants cancel away.
        assert_eq!(coeff.terms().len(), 1);
        assert_eq!(coeff.terms()[0].a, c(4.0, 0.0));
        assert_eq!(coeff.terms()[0].n, 2);
    }

    #[test]
    fn eval_matches_direct_formula() {
        // 2 t^2 e^{-t} - 3 e^{0.5 t} + 7, at t = 1.25
        let coeff = TimeCoefficient::term(2.0, 2, -1.0)
            .add(&TimeCoefficient::term(-3.0, 0, 0.5))
            .add(&TimeCoefficient::constant(7.0));
        let t = 1.25_f64;
        let expected = 2.0 * t * t * (-t).exp() - 3.0 * (0.5 * t).exp() + 7.0;
        assert!((coeff.eval(t).re - expected).abs() < 1e-14);
        assert_eq!(coeff.eval(t).im, 0.0);
    }

    #[test]
    fn derivative_of_polynomial() {
        // d/dt (t^3 - 4t) = 3t^2 - 4
        let coeff = TimeCoefficient::monomial(1.0, 3).add(&TimeCoefficient::monomial(-4.0, 1));
        let d = coeff.derivative();
        let expected = TimeCoefficient::monomial(3.0, 2).add(&TimeCoefficient::constant(-4.0));
        assert!(d.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn antiderivative_of_exponential_term() {
        // ∫ t e^{2t} dt = e^{2t} (t/2 - 1/4)
        let coeff = TimeCoefficient::term(1.0, 1, 2.0);
        let g = coeff.antiderivative();
        let expected =
            TimeCoefficient::term(0.5, 1, 2.0).add(&TimeCoefficient::term(-0.25, 0, 2.0));
        assert!(g.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn integral_from_zero_vanishes_at_zero() {
        let coeff = TimeCoefficient::term(1.3, 2, -0.7).add(&TimeCoefficient::monomial(0.4, 1));
        let integral = coeff.integral_from_zero();
        assert_eq!(integral.eval(0.0), c(0.0, 0.0));
        // Cross-check against midpoint quadrature of the integrand.
        let t_end = 1.7;
        let n = 200_000;
        let h = t_end / n as f64;
        let mut quad = 0.0;
        for i in 0..n {
            quad += coeff.eval_real((i as f64 + 0.5) * h) * h;
        }
        assert!((integral.eval_real(t_end) - quad).abs() < 1e-9);
    }

    #[test]
    fn eval_derivative_agrees_with_derivative_eval() {
        let coeff = TimeCoefficient::from_terms(vec![
            Term {
                a: c(1.0, -0.5),
                n: 3,
                lambda: 0.8,
            },
            Term {
                a: c(0.2, 0.0),
                n: 0,
                lambda: -1.1,
            },
        ]);
        let t = 0.9;
        let direct = coeff.eval_derivative(t);
        let via_sum = coeff.derivative().eval(t);
        assert!((direct - via_sum).norm() < 1e-13);
    }

    #[test]
    fn product_of_sums() {
        // (t + 1)(t - 1) = t^2 - 1
        let p = TimeCoefficient::monomial(1.0, 1).add(&TimeCoefficient::constant(1.0));
        let q = TimeCoefficient::monomial(1.0, 1).add(&TimeCoefficient::constant(-1.0));
        let expected = TimeCoefficient::monomial(1.0, 2).add(&TimeCoefficient::constant(-1.0));
        assert!(p.mul(&q).approx_eq(&expected, 1e-15));
    }

    #[test]
    fn json_round_trip() {
        let coeff = TimeCoefficient::from_terms(vec![
            Term {
                a: c(0.5, 0.0),
                n: 2,
                lambda: 0.0,
            },
            Term {
                a: c(0.0, -1.5),
                n: 0,
                lambda: 0.3,
            },
        ]);
        let json = serde_json::to_string(&coeff).unwrap();
        let back: TimeCoefficient = serde_json::from_str(&json).unwrap();
        assert_eq!(coeff, back);
    }

    #[test]
    fn unknown_term_key_rejected() {
        let err = serde_json::from_str::<TimeCoefficient>(r#"[{"re": 1.0, "power": 2}]"#);
        assert!(err.is_err());
    }

    proptest! {
        #[test]
        fn derivative_undoes_antiderivative(
            amps in proptest::collection::vec((-3.0..3.0_f64, -3.0..3.0_f64), 1..5),
            ns in proptest::collection::vec(0u32..5, 1..5),
            lambdas in proptest::collection::vec(-2.0..2.0_f64, 1..5),
        ) {
            let k = amps.len().min(ns.len()).min(lambdas.len());
            let coeff = TimeCoefficient::from_terms(
                (0..k)
                    .map(|i| Term { a: c(amps[i].0, amps[i].1), n: ns[i], lambda: lambdas[i] })
                    .collect(),
            );
            let integral = coeff.antiderivative();
            let back = integral.derivative();
            // Round-trip dust is bounded by rounding in the intermediate
            // antiderivative, whose amplitudes blow up like 1/lambda^{n+1}
            // near lambda = 0, so measure against that scale.
            let cond = integral
                .terms()
                .iter()
                .chain(coeff.terms())
                .map(|term| term.a.norm())
                .fold(1.0_f64, f64::max);
            let diff = back.sub(&coeff);
            let dust = diff.terms().iter().map(|term| term.a.norm()).fold(0.0, f64::max);
            prop_assert!(dust <= 1e-12 * cond, "dust {} vs scale {}", dust, cond);
        }

        #[test]
        fn eval_is_linear_in_terms(
            a in -2.0..2.0_f64,
            b in -2.0..2.0_f64,
            t in -1.5..1.5_f64,
        ) {
            let p = TimeCoefficient::term(a, 1, 0.4);
            let q = TimeCoefficient::term(b, 0, -0.9);
            let lhs = p.add(&q).eval(t);
            let rhs = p.eval(t) + q.eval(t);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }
    }
}

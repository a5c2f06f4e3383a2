//! Exact integer polynomials: Sturm and Descartes root counting, and the
//! four-fold root of the derivative numerator of the wand `lambda(t)` curve.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Polynomial with exact integer coefficients in ascending order of degree.
/// Trailing zeros are always stripped, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    pub fn monomial(c: BigInt, degree: usize) -> Self {
        let mut v = vec![BigInt::zero(); degree + 1];
        v[degree] = c;
        Self::new(v)
    }

    /// `x^degree - 1`.
    pub fn x_pow_minus_one(degree: usize) -> Self {
        &Self::monomial(BigInt::one(), degree) - &Self::one()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: &BigInt) -> Self {
        let lin = Self::new(vec![c.clone(), BigInt::one()]);
        let mut out = Self::zero();
        for a in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Self::monomial(a.clone(), 0);
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * x + BigRational::from_integer(c.clone())
            })
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Long division by a divisor whose leading coefficient is `1` or `-1`,
    /// which keeps the quotient integral. Returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead = divisor
            .leading()
            .ok_or_else(|| Error::Polynomial("division by zero polynomial".into()))?;
        if !lead.abs().is_one() {
            return Err(Error::Polynomial(
                "divisor must have unit leading coefficient".into(),
            ));
        }
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Sign changes in the coefficient sequence, ignoring zeros. By Descartes'
    /// rule this bounds the number of positive roots counted with multiplicity.
    pub fn sign_variations(&self) -> usize {
        sign_changes(self.coeffs.iter().map(|c| c.sign()))
    }

    /// Multiplicity of `x = 0` as a root.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sep = match (first, c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            first = false;
            let a = c.abs();
            let a = if a.is_one() && i > 0 {
                String::new()
            } else {
                a.to_string()
            };
            match i {
                0 => write!(f, "{sep}{a}")?,
                1 => write!(f, "{sep}{a}x")?,
                _ => write!(f, "{sep}{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self::new(coeffs))
    }
}

fn zip_with(
    a: &IntPolynomial,
    b: &IntPolynomial,
    f: impl Fn(BigInt, BigInt) -> BigInt,
) -> IntPolynomial {
    let n = a.coeffs.len().max(b.coeffs.len());
    IntPolynomial::new((0..n).map(|i| f(a.coeff(i), b.coeff(i))).collect())
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: Self) -> IntPolynomial {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: Self) -> IntPolynomial {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: Self) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

fn sign_changes<I: IntoIterator<Item = num_bigint::Sign>>(signs: I) -> usize {
    use num_bigint::Sign;
    let mut last = Sign::NoSign;
    let mut n = 0;
    for s in signs {
        if s == Sign::NoSign {
            continue;
        }
        if last != Sign::NoSign && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r.last().unwrap() / lead;
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &c * bc;
        }
        r.pop();
        trim(&mut r);
    }
    trim(&mut r);
    r
}

fn sturm_sequence(p: &IntPolynomial) -> Vec<Vec<BigRational>> {
    let mut seq = vec![p.to_rational(), p.derivative().to_rational()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let r = rat_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn rat_sign(x: &BigRational) -> num_bigint::Sign {
    if x.is_zero() {
        num_bigint::Sign::NoSign
    } else if x.is_positive() {
        num_bigint::Sign::Plus
    } else {
        num_bigint::Sign::Minus
    }
}

fn eval_rat(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Result of exact positive-root counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCount {
    /// Distinct roots in `(0, inf)` from a Sturm sequence.
    pub distinct_positive: usize,
    /// Descartes' sign-variation bound (roots counted with multiplicity).
    pub descartes_bound: usize,
    /// Multiplicity of the root at zero, which is excluded from both counts.
    pub zero_multiplicity: usize,
}

/// Exact number of distinct positive real roots.
pub fn count_positive_roots(p: &IntPolynomial) -> Result<RootCount> {
    if p.is_zero() {
        return Err(Error::Polynomial(
            "zero polynomial has infinitely many roots".into(),
        ));
    }
    let zm = p.zero_root_multiplicity();
    let q = IntPolynomial::new(p.coeffs[zm..].to_vec());
    let seq = sturm_sequence(&q);
    let at_zero = sign_changes(seq.iter().map(|s| rat_sign(&s[0])));
    let at_inf = sign_changes(seq.iter().map(|s| rat_sign(s.last().unwrap())));
    Ok(RootCount {
        distinct_positive: at_zero - at_inf,
        descartes_bound: q.sign_variations(),
        zero_multiplicity: zm,
    })
}

/// Distinct real roots in `(a, b]`, for `a < b` and `p(a) != 0`.
pub fn sturm_count(p: &IntPolynomial, a: &BigRational, b: &BigRational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Polynomial(
            "zero polynomial has infinitely many roots".into(),
        ));
    }
    if a >= b {
        return Err(Error::Polynomial("empty interval".into()));
    }
    if p.eval_rational(a).is_zero() {
        return Err(Error::Polynomial("left endpoint is a root".into()));
    }
    let seq = sturm_sequence(p);
    let v = |x: &BigRational| sign_changes(seq.iter().map(|s| rat_sign(&eval_rat(s, x))));
    Ok(v(a) - v(b))
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// `sum_{i=from}^{to} C(n, i) x^(i + offset)`.
fn binomial_sum(n: u32, from: u32, to: u32, offset: usize) -> IntPolynomial {
    let mut v = vec![BigInt::zero(); to as usize + offset + 1];
    for i in from..=to {
        v[i as usize + offset] = binomial(n, i);
    }
    IntPolynomial::new(v)
}

/// `R(t, k) = (t^k-1)(t^2k-1) + k t (t^(k-2)-1)(t^2k-1) - 2k^2 t^k (t-1)(t^(k-1)-1)`,
/// the numerator polynomial of `lambda'(t)` for the wand graph.
pub fn r_polynomial(k: u32) -> IntPolynomial {
    let ku = k as usize;
    let kk = BigInt::from(k);
    let t2k = IntPolynomial::x_pow_minus_one(2 * ku);
    let a = &IntPolynomial::x_pow_minus_one(ku) * &t2k;
    let b =
        &(&IntPolynomial::monomial(kk.clone(), 1) * &IntPolynomial::x_pow_minus_one(ku - 2)) * &t2k;
    let c = &(&IntPolynomial::monomial(BigInt::from(2) * &kk * &kk, ku)
        * &IntPolynomial::x_pow_minus_one(1))
        * &IntPolynomial::x_pow_minus_one(ku - 1);
    &(&a + &b) - &c
}

/// `R(x + 1, k)` assembled directly from binomial sums, independently of
/// [`r_polynomial`]:
/// `(sum C(2k,i) x^i)(sum C(k,i) x^i + k(x+1) sum C(k-2,i) x^i)
///   - 2k^2 (sum C(k,i) x^(i+1))(sum C(k-1,i) x^i)`.
pub fn r1_polynomial(k: u32) -> IntPolynomial {
    let kk = BigInt::from(k);
    let first = binomial_sum(2 * k, 1, 2 * k, 0);
    let inner_tail = if k >= 3 {
        let xp1 = IntPolynomial::from_i64(&[1, 1]);
        &(&IntPolynomial::monomial(kk.clone(), 0) * &xp1) * &binomial_sum(k - 2, 1, k - 2, 0)
    } else {
        IntPolynomial::zero()
    };
    let second = &binomial_sum(k, 1, k, 0) + &inner_tail;
    let third = binomial_sum(k, 0, k, 1);
    let fourth = binomial_sum(k - 1, 1, k - 1, 0);
    let two_k2 = IntPolynomial::monomial(BigInt::from(2) * &kk * &kk, 0);
    &(&first * &second) - &(&(&two_k2 * &third) * &fourth)
}

/// Largest `k` accepted by [`verify_r_factorization`] by default.
pub const R_K_MAX: u32 = 16;

/// Outcome of checking that `t = 1` is a four-fold root of `R(t, k)` with a
/// quotient that is positive for `t > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RFactorizationReport {
    pub k: u32,
    pub r_t: IntPolynomial,
    pub r1_x: IntPolynomial,
    /// `R(x + 1)` from substitution agrees with the binomial-sum construction.
    pub binomial_form_agrees: bool,
    pub low_order_vanish: bool,
    pub higher_positive: bool,
    /// `R(t) / (t - 1)^4`.
    pub quotient: IntPolynomial,
    pub remainder_zero: bool,
    pub quotient_nonnegative: bool,
    pub quotient_sum: String,
    /// Human-readable descriptions of every failed coefficient check.
    pub violations: Vec<String>,
    pub passed: bool,
}

pub fn verify_r_factorization(k: u32) -> Result<RFactorizationReport> {
    verify_r_factorization_up_to(k, R_K_MAX)
}

pub fn verify_r_factorization_up_to(k: u32, k_max: u32) -> Result<RFactorizationReport> {
    if k < 2 || k > k_max {
        return Err(Error::InvalidParameter(format!(
            "k must lie in [2, {k_max}], got {k}"
        )));
    }
    let r_t = r_polynomial(k);
    let r1_x = r_t.shift(&BigInt::one());
    let binomial_form_agrees = r1_x == r1_polynomial(k);
    let mut violations = Vec::new();
    if !binomial_form_agrees {
        violations.push("binomial-sum form differs from R(x+1)".to_string());
    }

    for i in 0..4 {
        let c = r1_x.coeff(i);
        if !c.is_zero() {
            violations.push(format!("coefficient of x^{i} is {c}, expected 0"));
        }
    }
    let low_order_vanish = violations
        .iter()
        .all(|v| !v.starts_with("coefficient of x^"));
    let deg = r1_x.degree().unwrap_or(0);
    let mut higher_positive = deg >= 4;
    for i in 4..=deg {
        let c = r1_x.coeff(i);
        if !c.is_positive() {
            higher_positive = false;
            violations.push(format!("coefficient of x^{i} is {c}, expected > 0"));
        }
    }

    let quartic = IntPolynomial::from_i64(&[-1, 1]).pow(4);
    let (quotient, remainder) = r_t.div_rem(&quartic)?;
    let remainder_zero = remainder.is_zero();
    if !remainder_zero {
        violations.push(format!("remainder modulo (t-1)^4 is {remainder}"));
    }
    let quotient_nonnegative = quotient.coeffs().iter().all(|c| !c.is_negative());
    for (i, c) in quotient.coeffs().iter().enumerate() {
        if c.is_negative() {
            violations.push(format!("quotient coefficient of t^{i} is {c}"));
        }
    }
    let sum: BigInt = quotient.coeffs().iter().sum();
    if !sum.is_positive() {
        violations.push(format!("quotient coefficient sum is {sum}"));
    }
    let passed = violations.is_empty();
    Ok(RFactorizationReport {
        k,
        r_t,
        r1_x,
        binomial_form_agrees,
        low_order_vanish,
        higher_positive,
        quotient,
        remainder_zero,
        quotient_nonnegative,
        quotient_sum: sum.to_string(),
        violations,
        passed,
    })
}

/// The off-diagonal `I3` curve `z1 z2 sum_{j=2}^n C(n,j) h_{j-2}(z1, z2) - 1`
/// as a polynomial in `z1` for a fixed integer `z2`.
pub fn w3_polynomial(n: u32, z2: &BigInt) -> IntPolynomial {
    let mut v = vec![BigInt::zero(); n as usize];
    v[0] = -BigInt::one();
    for j in 2..=n {
        let c = binomial(n, j);
        let d = j - 2;
        for a in 0..=d {
            // z1 * z2 * z1^a z2^(d-a)
            v[a as usize + 1] += &c * num_traits::pow(z2.clone(), (d - a + 1) as usize);
        }
    }
    IntPolynomial::new(v)
}

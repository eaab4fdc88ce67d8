//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! Elements are stored in the power basis `1, ζ, ..., ζ^(φ(n)-1)` reduced
//! modulo the cyclotomic polynomial `Φ_n`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug)]
pub struct CyclotomicField {
    order: usize,
    degree: usize,
    /// `powers[j]` is `ζ^j` in the power basis, for `0 <= j < order`.
    powers: Vec<Vec<BigRational>>,
    modulus: Vec<BigRational>,
}

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: usize) -> Vec<BigInt> {
    assert!(n >= 1);
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = -BigInt::one();
    p[n] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = div_exact_monic(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact division");
    q
}

impl CyclotomicField {
    pub fn new(order: usize) -> Arc<Self> {
        assert!(order >= 1, "cyclotomic order must be positive");
        let phi = cyclotomic_polynomial(order);
        let degree = phi.len() - 1;
        let modulus: Vec<BigRational> = phi.iter().cloned().map(BigRational::from_integer).collect();
        let mut powers = Vec::with_capacity(order);
        let mut cur = vec![BigRational::zero(); degree];
        cur[0] = BigRational::one();
        for _ in 0..order {
            powers.push(cur.clone());
            // multiply by x and reduce
            let top = cur[degree - 1].clone();
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigRational::zero();
            if !top.is_zero() {
                for i in 0..degree {
                    cur[i] -= &top * &modulus[i];
                }
            }
        }
        Arc::new(CyclotomicField {
            order,
            degree,
            powers,
            modulus,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero(self: &Arc<Self>) -> Cyclo {
        Cyclo {
            field: self.clone(),
            coeffs: vec![BigRational::zero(); self.degree],
        }
    }

    pub fn one(self: &Arc<Self>) -> Cyclo {
        self.from_rational(BigRational::one())
    }

    pub fn from_int(self: &Arc<Self>, x: impl Into<BigInt>) -> Cyclo {
        self.from_rational(BigRational::from_integer(x.into()))
    }

    pub fn from_rational(self: &Arc<Self>, x: BigRational) -> Cyclo {
        let mut z = self.zero();
        z.coeffs[0] = x;
        z
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(self: &Arc<Self>, k: i64) -> Cyclo {
        let j = k.rem_euclid(self.order as i64) as usize;
        Cyclo {
            field: self.clone(),
            coeffs: self.powers[j].clone(),
        }
    }

    /// The imaginary unit, available when `4 | order`.
    pub fn imaginary_unit(self: &Arc<Self>) -> Option<Cyclo> {
        (self.order % 4 == 0).then(|| self.zeta_pow((self.order / 4) as i64))
    }

    /// Builds `Σ c_k ζ^k` from coefficients on arbitrary powers.
    pub fn from_power_coeffs(self: &Arc<Self>, coeffs: &[(usize, BigRational)]) -> Cyclo {
        let mut out = vec![BigRational::zero(); self.degree];
        for (k, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.powers[k % self.order]) {
                if !p.is_zero() {
                    *o += c * p;
                }
            }
        }
        Cyclo {
            field: self.clone(),
            coeffs: out,
        }
    }
}

/// Element of a cyclotomic field.
#[derive(Clone)]
pub struct Cyclo {
    field: Arc<CyclotomicField>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.coeffs == other.coeffs
    }
}

impl Eq for Cyclo {}

impl Cyclo {
    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it is one.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    /// Complex conjugation `ζ -> ζ^-1`.
    pub fn conj(&self) -> Cyclo {
        let n = self.field.order;
        let terms: Vec<(usize, BigRational)> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| ((n - k) % n, c.clone()))
            .collect();
        self.field.from_power_coeffs(&terms)
    }

    pub fn scale(&self, k: &BigRational) -> Cyclo {
        Cyclo {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Image in `Q(ζ_m)` for a multiple `m` of this field's order.
    pub fn embed(&self, target: &Arc<CyclotomicField>) -> Cyclo {
        let n = self.field.order;
        assert!(target.order % n == 0, "Q(ζ_{n}) does not embed in Q(ζ_{})", target.order);
        let step = target.order / n;
        let terms: Vec<(usize, BigRational)> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (k * step, c.clone()))
            .collect();
        target.from_power_coeffs(&terms)
    }

    /// Multiplicative inverse by the extended Euclidean algorithm in `Q[x]`.
    pub fn inv(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        let a = trim(self.coeffs.clone());
        let m = trim(self.field.modulus.clone());
        // invariant: r_i ≡ s_i * a (mod m)
        let (mut r0, mut r1) = (m, a);
        let (mut s0, mut s1) = (vec![BigRational::zero()], vec![BigRational::one()]);
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since Φ_n is irreducible
        if r0.len() != 1 {
            return None;
        }
        let c = r0[0].clone();
        let terms: Vec<(usize, BigRational)> = s0
            .iter()
            .enumerate()
            .map(|(k, x)| (k, x / &c))
            .collect();
        Some(self.field.from_power_coeffs(&terms))
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.field.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let angle = std::f64::consts::TAU * k as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle)
            })
            .sum()
    }
}

impl Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, o: &Cyclo) -> Cyclo {
        debug_assert_eq!(self.field.order, o.field.order);
        Cyclo {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, o: &Cyclo) -> Cyclo {
        debug_assert_eq!(self.field.order, o.field.order);
        Cyclo {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, o: &Cyclo) -> Cyclo {
        debug_assert_eq!(self.field.order, o.field.order);
        let d = self.field.degree;
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let terms: Vec<(usize, BigRational)> = prod.into_iter().enumerate().collect();
        self.field.from_power_coeffs(&terms)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "z".to_string(),
                (1, false) => format!("{mag}*z"),
                (_, true) => format!("z^{k}"),
                (_, false) => format!("{mag}*z^{k}"),
            };
            terms.push((sign, body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (sign, body)) in terms.iter().enumerate() {
            match (i, *sign) {
                (0, "-") => write!(f, "-{body}")?,
                (0, _) => write!(f, "{body}")?,
                (_, s) => write!(f, " {s} {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (z = ζ_{})", self.field.order)
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(BigRational::zero());
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() <= db {
        return (vec![BigRational::zero()], trim(r));
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    r.truncate(db.max(1));
    (trim(q), trim(r))
}

/// Least common multiple of two orders, used to pick a common field.
pub fn common_order(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(8), ints(&[1, 0, 0, 0, 1]));
    }

    #[test]
    fn cube_roots_sum_to_zero() {
        let k = CyclotomicField::new(3);
        let w = k.zeta_pow(1);
        let s = &(&k.one() + &w) + &(&w * &w);
        assert!(s.is_zero());
        assert_eq!(w.conj(), k.zeta_pow(2));
        assert_eq!(&w * &w.conj(), k.one());
    }

    #[test]
    fn inverse_and_embedding() {
        let k = CyclotomicField::new(12);
        for j in 0..12 {
            let z = &k.zeta_pow(j) + &k.from_int(2);
            let zi = z.inv().unwrap();
            assert!((&z * &zi).is_one());
        }
        let k3 = CyclotomicField::new(3);
        let w = k3.zeta_pow(1).embed(&k);
        assert_eq!(w, k.zeta_pow(4));
        let i = k.imaginary_unit().unwrap();
        assert_eq!(&i * &i, k.from_int(-1));
        assert!((i.to_complex() - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn display_is_readable() {
        let k = CyclotomicField::new(3);
        assert_eq!(k.zeta_pow(2).to_string(), "-1 - z");
        assert_eq!(k.zero().to_string(), "0");
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{IntMatrix, RatVector, SmithForm};
use crate::error::{Error, Result};

/// Finds a rational `x` with `A x + b ∈ (1/d) Z^m`, or `None` if there is
/// none.
///
/// With `U A V = D` of rank `r`, the column space of `A` over `Q` is
/// `U^-1 (Q^r ⊕ 0)`, so a solution exists iff `(U b)_i ∈ (1/d) Z` for every
/// `i >= r`. The returned witness solves `A x = -U^-1 (U b)_{<r}` exactly.
pub fn solve_congruence(
    a: &IntMatrix,
    b: &RatVector,
    d: impl Into<BigInt>,
) -> Result<Option<RatVector>> {
    let d: BigInt = d.into();
    if !d.is_positive() {
        return Err(Error::DimensionMismatch("modulus must be positive".into()));
    }
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "system has {} rows but right-hand side has length {}",
            a.rows(),
            b.len()
        )));
    }
    let snf = SmithForm::compute(a);
    let r = snf.rank();
    let mut ub = b.0.clone();
    snf.apply_left(&mut ub);
    if ub[r..].iter().any(|x| !d.is_multiple_of(x.denom())) {
        return Ok(None);
    }
    let mut y = vec![BigRational::zero(); a.cols()];
    for i in 0..r {
        y[i] = -&ub[i] / BigRational::from_integer(snf.diagonal()[i].clone());
    }
    snf.apply_right(&mut y);
    Ok(Some(RatVector(y)))
}

/// All solutions `y ∈ (Z/M)^n` of `A y ≡ c (mod M)`.
#[derive(Clone, Debug)]
pub struct ModularSolutions {
    modulus: BigInt,
    v: IntMatrix,
    offsets: Vec<BigInt>,
    steps: Vec<BigInt>,
    counts: Vec<BigInt>,
}

impl ModularSolutions {
    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Number of solutions modulo `M`.
    pub fn count(&self) -> BigInt {
        self.counts.iter().product()
    }

    pub fn particular(&self) -> Vec<BigInt> {
        self.to_solution(&self.offsets)
    }

    /// Enumerates up to `limit` solutions in a fixed order.
    pub fn enumerate(&self, limit: usize) -> Vec<Vec<BigInt>> {
        let n = self.offsets.len();
        let mut out = Vec::new();
        let mut idx = vec![BigInt::zero(); n];
        loop {
            if out.len() >= limit {
                break;
            }
            let y: Vec<BigInt> = (0..n)
                .map(|i| &self.offsets[i] + &idx[i] * &self.steps[i])
                .collect();
            out.push(self.to_solution(&y));
            // odometer
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.counts[k] {
                    break;
                }
                idx[k] = BigInt::zero();
            }
        }
        out
    }

    fn to_solution(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.v
            .mul_vec(y)
            .into_iter()
            .map(|x| x.mod_floor(&self.modulus))
            .collect()
    }
}

/// Solves `A y ≡ c (mod M)` over the integers, returning the full solution
/// set or `None` when the system is inconsistent.
pub fn solve_congruence_mod(
    a: &IntMatrix,
    c: &[BigInt],
    modulus: &BigInt,
) -> Result<Option<ModularSolutions>> {
    if a.rows() != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "system has {} rows but right-hand side has length {}",
            a.rows(),
            c.len()
        )));
    }
    if !modulus.is_positive() {
        return Err(Error::DimensionMismatch("modulus must be positive".into()));
    }
    let snf = SmithForm::compute(a);
    let mut uc = c.to_vec();
    snf.apply_left(&mut uc);
    let n = a.cols();
    let mut offsets = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    if uc.iter().skip(n).any(|rhs| !rhs.is_multiple_of(modulus)) {
        return Ok(None);
    }
    for i in 0..n {
        let di = snf.diagonal().get(i).cloned().unwrap_or_else(BigInt::zero);
        let rhs = uc.get(i).cloned().unwrap_or_else(BigInt::zero);
        let rhs = &rhs;
        let g = di.gcd(modulus);
        if !rhs.is_multiple_of(&g) {
            return Ok(None);
        }
        let step = modulus / &g;
        let offset = if step.is_one() {
            BigInt::zero()
        } else {
            let inv = mod_inverse(&(&di / &g), &step).expect("coprime after dividing by gcd");
            ((rhs / &g) * inv).mod_floor(&step)
        };
        offsets.push(offset);
        steps.push(step);
        counts.push(g);
    }
    Ok(Some(ModularSolutions {
        modulus: modulus.clone(),
        v: snf.right(),
        offsets,
        steps,
        counts,
    }))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

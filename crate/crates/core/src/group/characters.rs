use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{ConjugacyClass, FiniteMatrixGroup};
use crate::cyclotomic::{Cyclo, CyclotomicField};
use crate::error::{Error, Result};
use crate::linalg::{fga_from_relations, IntMatrix};

/// Exact irreducible characters of a finite group.
///
/// Rows are characters, columns are conjugacy classes in the group's class
/// order. Row 0 is the trivial character; the remaining rows are sorted by
/// degree.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    field: Arc<CyclotomicField>,
    group_order: usize,
    classes: Vec<ConjugacyClass>,
    values: Vec<Vec<Cyclo>>,
    conjugate: Vec<usize>,
}

impl CharacterTable {
    pub fn compute(g: &FiniteMatrixGroup) -> Result<CharacterTable> {
        let e = g.exponent();
        let field = CyclotomicField::new(e);
        let values = if g.is_abelian() {
            abelian_characters(g, &field)
        } else {
            dixon_schneider(g, &field)?
        };
        let mut table = CharacterTable {
            field,
            group_order: g.order(),
            classes: g.conjugacy_classes().to_vec(),
            values,
            conjugate: Vec::new(),
        };
        table.sort_rows();
        table.verify()?;
        table.conjugate = (0..table.len())
            .map(|i| {
                let bar: Vec<Cyclo> = table.values[i].iter().map(Cyclo::conj).collect();
                (0..table.len())
                    .find(|&j| table.values[j] == bar)
                    .ok_or_else(|| Error::LiftFailed(format!("character {i} has no conjugate")))
            })
            .collect::<Result<_>>()?;
        Ok(table)
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn exponent(&self) -> usize {
        self.field.order()
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    /// Number of irreducible characters.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self, chi: usize) -> &[Cyclo] {
        &self.values[chi]
    }

    pub fn value(&self, chi: usize, class: usize) -> &Cyclo {
        &self.values[chi][class]
    }

    pub fn degree(&self, chi: usize) -> usize {
        self.values[chi][0]
            .to_rational()
            .and_then(|d| d.to_integer().to_usize())
            .expect("degrees are positive integers")
    }

    /// Index of the complex conjugate character.
    pub fn conjugate(&self, chi: usize) -> usize {
        self.conjugate[chi]
    }

    pub fn is_real(&self, chi: usize) -> bool {
        self.conjugate[chi] == chi
    }

    /// `(1/|G|) Σ_g a(g) conj(b(g))` for class functions given per class.
    pub fn inner_product(&self, a: &[Cyclo], b: &[Cyclo]) -> Cyclo {
        let mut acc = self.field.zero();
        for (k, class) in self.classes.iter().enumerate() {
            let term = &a[k] * &b[k].conj();
            acc = &acc + &term.scale(&BigRational::from_integer(class.size().into()));
        }
        acc.scale(&BigRational::new(1.into(), self.group_order.into()))
    }

    /// Embeds integer class function values into the table's field.
    pub fn class_function(&self, values: &[BigInt]) -> Vec<Cyclo> {
        values.iter().map(|v| self.field.from_int(v.clone())).collect()
    }

    fn sort_rows(&mut self) {
        let trivial = self
            .values
            .iter()
            .position(|row| row.iter().all(Cyclo::is_one))
            .expect("trivial character present");
        let first = self.values.remove(trivial);
        let degree = |row: &Vec<Cyclo>| row[0].to_rational().map(|d| d.to_integer());
        self.values.sort_by_key(degree);
        self.values.insert(0, first);
    }

    /// Row orthogonality and the degree sum, checked exactly.
    fn verify(&self) -> Result<()> {
        let k = self.classes.len();
        if self.values.len() != k {
            return Err(Error::LiftFailed(format!(
                "{} characters for {} classes",
                self.values.len(),
                k
            )));
        }
        for i in 0..k {
            for j in i..k {
                let ip = self.inner_product(&self.values[i], &self.values[j]);
                let expected = if i == j { self.field.one() } else { self.field.zero() };
                if ip != expected {
                    return Err(Error::LiftFailed(format!(
                        "<chi_{i}, chi_{j}> = {ip}"
                    )));
                }
            }
        }
        let squares: usize = (0..k).map(|i| self.degree(i).pow(2)).sum();
        if squares != self.group_order {
            return Err(Error::LiftFailed(format!(
                "sum of squared degrees {squares} != {}",
                self.group_order
            )));
        }
        Ok(())
    }
}

/// `n_χ = <classfun, χ>`, required to be a non-negative integer.
pub fn multiplicity(table: &CharacterTable, classfun: &[Cyclo], chi: usize) -> Result<usize> {
    let ip = table.inner_product(classfun, table.values(chi));
    ip.to_rational()
        .filter(|q| q.is_integer() && !q.is_negative())
        .and_then(|q| q.to_integer().to_usize())
        .ok_or_else(|| Error::NotIntegral {
            value: ip.to_string(),
        })
}

/// Characters of an abelian group through its invariant-factor
/// decomposition.
///
/// With `k` generators the group is `Z^k / R`, where `R` is spanned by
/// `word(x) + e_i - word(x g_i)` over all elements `x` and generators `i`.
fn abelian_characters(g: &FiniteMatrixGroup, field: &Arc<CyclotomicField>) -> Vec<Vec<Cyclo>> {
    let k = g.generators().len();
    let size = g.order();
    let e = field.order();
    let counts = |x: usize| -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); k];
        for &s in g.word(x) {
            c[s] += 1;
        }
        c
    };
    let word_vectors: Vec<Vec<BigInt>> = (0..size).map(counts).collect();
    let mut rels = Vec::new();
    for x in 0..size {
        for i in 0..k {
            let y = g.mult(x, g.generator_element(i));
            let mut r: Vec<BigInt> = word_vectors[x]
                .iter()
                .zip(&word_vectors[y])
                .map(|(a, b)| a - b)
                .collect();
            r[i] += 1;
            if r.iter().any(|v| !v.is_zero()) {
                rels.push(r);
            }
        }
    }
    let rels = IntMatrix::try_from_rows(rels, k).expect("rectangular relations");
    let fga = fga_from_relations(k, &rels);
    let factors: Vec<usize> = fga
        .invariant_factors()
        .iter()
        .map(|d| d.to_usize().expect("finite group"))
        .collect();
    // class k of an abelian group is the singleton of its representative
    let coords: Vec<Vec<usize>> = g
        .conjugacy_classes()
        .iter()
        .map(|c| {
            fga.to_coords(&word_vectors[c.representative])
                .iter()
                .map(|x| x.to_usize().expect("reduced coordinate"))
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    let mut tuple = vec![0usize; factors.len()];
    loop {
        let row = coords
            .iter()
            .map(|x| {
                let exp: usize = tuple
                    .iter()
                    .zip(x)
                    .zip(&factors)
                    .map(|((c, xi), d)| c * xi * (e / d))
                    .sum();
                field.zeta_pow((exp % e) as i64)
            })
            .collect();
        rows.push(row);
        // lexicographic successor
        let mut pos = factors.len();
        loop {
            if pos == 0 {
                return rows;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < factors[pos] {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// Dixon–Schneider: common eigenvectors of the class matrices over a prime
/// field `F_p` with `p ≡ 1 (mod e)`, lifted to exact values through
/// eigenvalue multiplicities.
fn dixon_schneider(g: &FiniteMatrixGroup, field: &Arc<CyclotomicField>) -> Result<Vec<Vec<Cyclo>>> {
    let classes = g.conjugacy_classes();
    let k = classes.len();
    let e = field.order() as u64;
    let order = g.order() as u64;
    let p = (1..)
        .map(|t| t * e + 1)
        .find(|&q| q > 2 * order && is_prime(q))
        .expect("primes in arithmetic progressions");
    let f = Fp(p);
    let z = f.primitive_root_of_unity(e);

    // (M_r)_{s,t} = #{x ∈ C_r : x^-1 z_t ∈ C_s}
    let mut class_mats = vec![vec![vec![0u64; k]; k]; k];
    for (r, cr) in classes.iter().enumerate() {
        for (t, ct) in classes.iter().enumerate() {
            for &x in &cr.members {
                let s = g.class_of(g.mult(g.inverse(x), ct.representative));
                class_mats[r][s][t] += 1;
            }
        }
    }

    let mut spaces: Vec<Vec<Vec<u64>>> = vec![f.identity(k)];
    for mat in class_mats.iter().skip(1) {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for space in spaces {
            if space.len() == 1 {
                next.push(space);
                continue;
            }
            let mut found = 0;
            for lambda in 0..p {
                let sub = f.eigen_intersection(mat, &space, lambda);
                if !sub.is_empty() {
                    found += sub.len();
                    next.push(sub);
                    if found == space.len() {
                        break;
                    }
                }
            }
            if found != space.len() {
                return Err(Error::LiftFailed("class matrices not diagonalizable mod p".into()));
            }
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.len() != 1) {
        return Err(Error::LiftFailed("eigenspaces did not split".into()));
    }

    let inverse_class: Vec<usize> = classes
        .iter()
        .map(|c| g.class_of(g.inverse(c.representative)))
        .collect();
    let mut rows = Vec::new();
    for space in spaces {
        let v = &space[0];
        let scale = f.inv(v[0]).ok_or_else(|| Error::LiftFailed("zero central character".into()))?;
        let omega: Vec<u64> = v.iter().map(|&x| f.mul(x, scale)).collect();
        let mut norm = 0;
        for t in 0..k {
            let term = f.mul(omega[t], omega[inverse_class[t]]);
            norm = f.add(norm, f.mul(term, f.inv(classes[t].size() as u64 % p).expect("p > |G|")));
        }
        let d2 = f.mul(order % p, f.inv(norm).ok_or_else(|| Error::LiftFailed("degenerate norm".into()))?);
        let degree = (1..=order)
            .find(|d| d * d == d2)
            .ok_or_else(|| Error::LiftFailed("degree is not a square".into()))?;
        let chi_mod: Vec<u64> = (0..k)
            .map(|t| f.mul(f.mul(degree % p, omega[t]), f.inv(classes[t].size() as u64 % p).unwrap()))
            .collect();

        // χ(g) = Σ_j m_j ζ^j with m_j = (1/e) Σ_i χ(g^i) z^(-ij)
        let e_inv = f.inv(e % p).expect("p does not divide e");
        let mut row = Vec::with_capacity(k);
        for class in classes {
            let powers: Vec<u64> = (0..e)
                .map(|i| chi_mod[g.class_of(g.power(class.representative, i as usize))])
                .collect();
            let mut terms = Vec::new();
            for j in 0..e {
                let mut m = 0;
                for (i, &c) in powers.iter().enumerate() {
                    let exp = (e - (j * i as u64) % e) % e;
                    m = f.add(m, f.mul(c, f.pow(z, exp)));
                }
                let m = f.mul(m, e_inv);
                if m > degree {
                    return Err(Error::LiftFailed(format!("eigenvalue multiplicity {m} exceeds degree")));
                }
                if m > 0 {
                    terms.push((j as usize, BigRational::from_integer(m.into())));
                }
            }
            row.push(field.from_power_coeffs(&terms));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Arithmetic in `Z/p` for a small prime `p`.
#[derive(Clone, Copy)]
struct Fp(u64);

impl Fp {
    fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }

    fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.0 - b) % self.0
    }

    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    fn pow(self, mut a: u64, mut k: u64) -> u64 {
        let mut acc = 1 % self.0;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            k >>= 1;
        }
        acc
    }

    fn inv(self, a: u64) -> Option<u64> {
        (a % self.0 != 0).then(|| self.pow(a, self.0 - 2))
    }

    fn primitive_root_of_unity(self, e: u64) -> u64 {
        let primes: Vec<u64> = (2..=e).filter(|&q| e % q == 0 && is_prime(q)).collect();
        (2..self.0)
            .map(|a| self.pow(a, (self.0 - 1) / e))
            .find(|&z| primes.iter().all(|&q| self.pow(z, e / q) != 1))
            .unwrap_or(1)
    }

    fn identity(self, k: usize) -> Vec<Vec<u64>> {
        (0..k)
            .map(|i| (0..k).map(|j| u64::from(i == j)).collect())
            .collect()
    }

    /// Basis of `span(rows) ∩ ker(M - λ)`, where `M` acts on column vectors.
    fn eigen_intersection(self, m: &[Vec<u64>], rows: &[Vec<u64>], lambda: u64) -> Vec<Vec<u64>> {
        let k = m.len();
        // column b of (M - λ) B^T for each basis row b
        let images: Vec<Vec<u64>> = rows
            .iter()
            .map(|b| {
                (0..k)
                    .map(|s| {
                        let mut acc = 0;
                        for t in 0..k {
                            acc = self.add(acc, self.mul(m[s][t] % self.0, b[t]));
                        }
                        self.sub(acc, self.mul(lambda, b[s]))
                    })
                    .collect()
            })
            .collect();
        let kernel = self.left_kernel(&images);
        kernel
            .iter()
            .map(|c| {
                (0..k)
                    .map(|t| {
                        c.iter()
                            .zip(rows)
                            .fold(0, |acc, (&ci, b)| self.add(acc, self.mul(ci, b[t])))
                    })
                    .collect()
            })
            .collect()
    }

    /// Basis of `{c : Σ c_i v_i = 0}` in reduced echelon form.
    fn left_kernel(self, vectors: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let m = vectors.len();
        if m == 0 {
            return Vec::new();
        }
        let k = vectors[0].len();
        // augmented rows [v_i | e_i]
        let mut rows: Vec<Vec<u64>> = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut r = v.clone();
                r.extend((0..m).map(|j| u64::from(i == j)));
                r
            })
            .collect();
        let mut pivot_row = 0;
        for col in 0..k {
            let Some(pr) = (pivot_row..m).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(pivot_row, pr);
            let inv = self.inv(rows[pivot_row][col]).expect("nonzero pivot");
            for x in rows[pivot_row].iter_mut() {
                *x = self.mul(*x, inv);
            }
            for r in 0..m {
                if r != pivot_row && rows[r][col] != 0 {
                    let factor = rows[r][col];
                    for c in 0..k + m {
                        let v = self.mul(factor, rows[pivot_row][c]);
                        rows[r][c] = self.sub(rows[r][c], v);
                    }
                }
            }
            pivot_row += 1;
        }
        rows[pivot_row..].iter().map(|r| r[k..].to_vec()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{generate_closure, DEFAULT_LIMIT};

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn z2_table() {
        let g = generate_closure(1, &[m(&[&[-1]])], DEFAULT_LIMIT).unwrap();
        let t = CharacterTable::compute(&g).unwrap();
        let f = t.field().clone();
        assert_eq!(t.values(0), &[f.one(), f.one()]);
        assert_eq!(t.values(1), &[f.one(), f.from_int(-1)]);
        assert!(t.is_real(1));
    }

    #[test]
    fn z3_table_has_conjugate_pair() {
        let g = generate_closure(2, &[m(&[&[0, -1], &[1, -1]])], DEFAULT_LIMIT).unwrap();
        let t = CharacterTable::compute(&g).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.conjugate(1), 2);
        assert!(!t.is_real(1));
        let lattice = t.class_function(&[2.into(), (-1).into(), (-1).into()]);
        assert_eq!(multiplicity(&t, &lattice, 0).unwrap(), 0);
        assert_eq!(multiplicity(&t, &lattice, 1).unwrap(), 1);
        assert_eq!(multiplicity(&t, &lattice, 2).unwrap(), 1);
    }

    #[test]
    fn s3_degrees() {
        let g = generate_closure(2, &[m(&[&[0, 1], &[1, 0]]), m(&[&[0, -1], &[1, -1]])], DEFAULT_LIMIT)
            .unwrap();
        let t = CharacterTable::compute(&g).unwrap();
        let degrees: Vec<usize> = (0..t.len()).map(|i| t.degree(i)).collect();
        assert_eq!(degrees, vec![1, 1, 2]);
        assert!((0..3).all(|i| t.is_real(i)));
    }

    #[test]
    fn quaternion_group() {
        let i = m(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
        let j = m(&[&[0, 0, -1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, -1, 0, 0]]);
        let g = generate_closure(4, &[i, j], DEFAULT_LIMIT).unwrap();
        assert_eq!(g.order(), 8);
        let t = CharacterTable::compute(&g).unwrap();
        let degrees: Vec<usize> = (0..t.len()).map(|i| t.degree(i)).collect();
        assert_eq!(degrees, vec![1, 1, 1, 1, 2]);
    }

    #[test]
    fn non_character_is_rejected() {
        let g = generate_closure(1, &[m(&[&[-1]])], DEFAULT_LIMIT).unwrap();
        let t = CharacterTable::compute(&g).unwrap();
        let bogus = t.class_function(&[1.into(), 0.into()]);
        assert!(matches!(multiplicity(&t, &bogus, 0), Err(Error::NotIntegral { .. })));
    }
}

//! Isotypical decomposition of `Λ ⊗ C`, evenness, Hodge types, component
//! dimensions and explicit G-invariant complex structures.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cryst::CrystGroup;
use crate::cyclotomic::{Cyclo, CyclotomicField};
use crate::error::{Error, Result};
use crate::group::{multiplicity, CharacterTable, FiniteMatrixGroup};
use crate::linalg::IntMatrix;

/// One irreducible character and its multiplicity in the lattice
/// representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterData {
    pub index: usize,
    pub degree: usize,
    /// `n_χ = dim M_χ`.
    pub multiplicity: usize,
    pub real: bool,
    pub partner: usize,
}

#[derive(Clone, Debug)]
pub struct IsotypicalData {
    pub rank: usize,
    pub characters: Vec<CharacterData>,
    pub table: Arc<CharacterTable>,
}

impl PartialEq for IsotypicalData {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.characters == other.characters
    }
}

/// `g -> trace L(g)`, one value per conjugacy class.
pub fn lattice_character(c: &CrystGroup) -> Vec<BigInt> {
    class_traces(c.group())
}

fn class_traces(g: &FiniteMatrixGroup) -> Vec<BigInt> {
    g.conjugacy_classes()
        .iter()
        .map(|cl| g.element(cl.representative).trace())
        .collect()
}

pub fn isotypical_decomposition(c: &CrystGroup) -> Result<IsotypicalData> {
    let table = Arc::new(CharacterTable::compute(c.group())?);
    decompose(c.group(), table)
}

pub fn decompose(g: &FiniteMatrixGroup, table: Arc<CharacterTable>) -> Result<IsotypicalData> {
    let lattice = table.class_function(&class_traces(g));
    let characters = (0..table.len())
        .map(|chi| {
            Ok(CharacterData {
                index: chi,
                degree: table.degree(chi),
                multiplicity: multiplicity(&table, &lattice, chi)?,
                real: table.is_real(chi),
                partner: table.conjugate(chi),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total: usize = characters.iter().map(|c| c.degree * c.multiplicity).sum();
    if total != g.rank() {
        return Err(Error::Internal(format!(
            "multiplicities account for dimension {total}, rank is {}",
            g.rank()
        )));
    }
    Ok(IsotypicalData {
        rank: g.rank(),
        characters,
        table,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evenness {
    pub even: bool,
    pub rank_even: bool,
    /// Real characters with odd multiplicity.
    pub odd_real: Vec<usize>,
}

pub fn evenness(data: &IsotypicalData) -> Evenness {
    let rank_even = data.rank % 2 == 0;
    let odd_real: Vec<usize> = data
        .characters
        .iter()
        .filter(|c| c.real && c.multiplicity % 2 == 1)
        .map(|c| c.index)
        .collect();
    Evenness {
        even: rank_even && odd_real.is_empty(),
        rank_even,
        odd_real,
    }
}

/// `χ -> ν(χ) = dim M^{1,0}_χ`, stored for every character.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HodgeType {
    pub nu: Vec<usize>,
}

impl HodgeType {
    /// The type of the conjugate decomposition, `ν'(χ) = ν(χ̄)`.
    pub fn conjugate(&self, data: &IsotypicalData) -> HodgeType {
        HodgeType {
            nu: data.characters.iter().map(|c| self.nu[c.partner]).collect(),
        }
    }

    pub fn validate(&self, data: &IsotypicalData) -> Result<()> {
        if self.nu.len() != data.characters.len() {
            return Err(Error::InvalidHodgeType(format!(
                "expected {} values, got {}",
                data.characters.len(),
                self.nu.len()
            )));
        }
        for c in &data.characters {
            let nu = self.nu[c.index];
            let ok = if c.real {
                2 * nu == c.multiplicity
            } else {
                nu + self.nu[c.partner] == c.multiplicity
            };
            if !ok {
                return Err(Error::InvalidHodgeType(format!(
                    "ν({}) = {nu} is incompatible with n = {}",
                    c.index, c.multiplicity
                )));
            }
        }
        Ok(())
    }

    /// `Σ_χ ν(χ) χ(1)`, the complex dimension of `H^{1,0}`.
    pub fn h10_dimension(&self, data: &IsotypicalData) -> usize {
        data.characters.iter().map(|c| self.nu[c.index] * c.degree).sum()
    }
}

/// Non-real pairs `(χ, χ̄)` with `χ < χ̄`.
fn pairs(data: &IsotypicalData) -> Vec<(usize, usize)> {
    data.characters
        .iter()
        .filter(|c| !c.real && c.index < c.partner)
        .map(|c| (c.index, c.partner))
        .collect()
}

/// All Hodge types; empty when the group is not even.
pub fn enumerate_hodge_types(data: &IsotypicalData) -> Vec<HodgeType> {
    if !evenness(data).even {
        return Vec::new();
    }
    let mut base = vec![0; data.characters.len()];
    for c in data.characters.iter().filter(|c| c.real) {
        base[c.index] = c.multiplicity / 2;
    }
    let pairs = pairs(data);
    let mut out = Vec::new();
    let mut choice = vec![0usize; pairs.len()];
    loop {
        let mut nu = base.clone();
        for (&(a, b), &k) in pairs.iter().zip(&choice) {
            nu[a] = k;
            nu[b] = data.characters[a].multiplicity - k;
        }
        out.push(HodgeType { nu });
        let mut pos = pairs.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] <= data.characters[pairs[pos].0].multiplicity {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// One Grassmannian factor of a component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannFactor {
    pub character: usize,
    /// Conjugate partner for a non-real pair.
    pub partner: Option<usize>,
    pub nu: usize,
    pub multiplicity: usize,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub hodge_type: HodgeType,
    pub dimension: usize,
    pub factors: Vec<GrassmannFactor>,
    /// Index of the conjugate type in the enumeration.
    pub conjugate_index: usize,
}

/// One report per Hodge type: real `χ` contribute `(n_χ/2)^2`, non-real
/// pairs `2 ν (n_χ - ν)`.
pub fn component_dimensions(data: &IsotypicalData) -> Vec<ComponentReport> {
    let types = enumerate_hodge_types(data);
    types
        .iter()
        .map(|t| {
            let mut factors = Vec::new();
            for c in &data.characters {
                if c.multiplicity == 0 {
                    continue;
                }
                if c.real {
                    let half = c.multiplicity / 2;
                    factors.push(GrassmannFactor {
                        character: c.index,
                        partner: None,
                        nu: half,
                        multiplicity: c.multiplicity,
                        dimension: half * half,
                    });
                } else if c.index < c.partner {
                    let nu = t.nu[c.index];
                    factors.push(GrassmannFactor {
                        character: c.index,
                        partner: Some(c.partner),
                        nu,
                        multiplicity: c.multiplicity,
                        dimension: 2 * nu * (c.multiplicity - nu),
                    });
                }
            }
            let conj = t.conjugate(data);
            ComponentReport {
                hodge_type: t.clone(),
                dimension: factors.iter().map(|f| f.dimension).sum(),
                factors,
                conjugate_index: types.iter().position(|x| *x == conj).expect("types are closed under conjugation"),
            }
        })
        .collect()
}

/// A G-invariant complex structure `J` on `Λ ⊗ R` and a basis `Ω` of its
/// `+i`-eigenspace.
#[derive(Clone, Debug)]
pub struct ComplexStructureSample {
    pub field: Arc<CyclotomicField>,
    /// `n x n`, entries in the real subfield.
    pub j: Vec<Vec<Cyclo>>,
    /// `n x n/2`; columns span `H^{1,0}`.
    pub omega: Vec<Vec<Cyclo>>,
    /// Floating-point rendering of `J`, for display only.
    pub j_float: Vec<Vec<f64>>,
    /// Sign of `i^(n/2) det(Ω Ω̄)`.
    pub orientation_sign: i8,
    pub requested: HodgeType,
    pub recovered: HodgeType,
    pub conjugate_type: HodgeType,
}

type CVec = Vec<Cyclo>;

/// Row-echelon accumulator for spans over a cyclotomic field.
struct Echelon {
    rows: Vec<(usize, CVec)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    fn reduce(&self, v: &[Cyclo]) -> CVec {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x - &(&f * r);
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent; returns whether it was.
    fn insert(&mut self, v: &[Cyclo]) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero pivot");
        let v: CVec = v.iter().map(|x| x * &inv).collect();
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&v) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        self.rows.push((p, v));
        true
    }
}

fn rank_of(vectors: &[CVec]) -> usize {
    let mut e = Echelon::new();
    vectors.iter().filter(|v| e.insert(v)).count()
}

fn conj_vec(v: &[Cyclo]) -> CVec {
    v.iter().map(Cyclo::conj).collect()
}

fn mat_vec(m: &[CVec], v: &[Cyclo]) -> CVec {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(v[0].field().zero(), |acc, (a, b)| &acc + &(a * b))
        })
        .collect()
}

fn mat_mul(a: &[CVec], b: &[CVec]) -> Vec<CVec> {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, r)| !x.is_zero() && !r[j].is_zero())
                        .fold(row[0].field().zero(), |acc, (x, r)| &acc + &(x * &r[j]))
                })
                .collect()
        })
        .collect()
}

fn int_to_field(m: &IntMatrix, k: &Arc<CyclotomicField>) -> Vec<CVec> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| k.from_int(x.clone())).collect())
        .collect()
}

fn identity(n: usize, k: &Arc<CyclotomicField>) -> Vec<CVec> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect())
        .collect()
}

fn inverse(m: &[CVec]) -> Option<Vec<CVec>> {
    let n = m.len();
    let k = m[0][0].field().clone();
    let mut a: Vec<CVec> = m.to_vec();
    let mut inv = identity(n, &k);
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let s = a[col][col].inv()?;
        a[col] = a[col].iter().map(|x| x * &s).collect();
        inv[col] = inv[col].iter().map(|x| x * &s).collect();
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    a[r][c] = &a[r][c] - &(&f * &a[col][c]);
                    inv[r][c] = &inv[r][c] - &(&f * &inv[col][c]);
                }
            }
        }
    }
    Some(inv)
}

fn det(m: &[CVec]) -> Cyclo {
    let n = m.len();
    let k = m[0][0].field().clone();
    let mut a: Vec<CVec> = m.to_vec();
    let mut d = k.one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return k.zero();
        };
        if p != col {
            a.swap(col, p);
            d = -&d;
        }
        d = &d * &a[col][col];
        let s = a[col][col].inv().expect("nonzero pivot");
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] * &s;
                for c in col..n {
                    a[r][c] = &a[r][c] - &(&f * &a[col][c]);
                }
            }
        }
    }
    d
}

/// Columns of `m` forming a basis of its column space, in order.
fn column_basis(m: &[CVec]) -> Vec<CVec> {
    let cols = m[0].len();
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for j in 0..cols {
        let c: CVec = m.iter().map(|row| row[j].clone()).collect();
        if e.insert(&c) {
            out.push(c);
        }
    }
    out
}

struct Projectors {
    field: Arc<CyclotomicField>,
    elements: Vec<Vec<CVec>>,
}

impl Projectors {
    /// `(χ(1)/|G|) Σ_g conj(χ(g)) L(g)`.
    fn isotypic(&self, g: &FiniteMatrixGroup, table: &CharacterTable, chi: usize) -> Vec<CVec> {
        let n = g.rank();
        let mut acc = vec![vec![self.field.zero(); n]; n];
        for x in 0..g.order() {
            let coeff = table.value(chi, g.class_of(x)).embed(&self.field).conj();
            for i in 0..n {
                for j in 0..n {
                    let e = &self.elements[x][i][j];
                    if !e.is_zero() {
                        acc[i][j] = &acc[i][j] + &(&coeff * e);
                    }
                }
            }
        }
        let s = BigRational::new(table.degree(chi).into(), g.order().into());
        acc.iter().map(|r| r.iter().map(|x| x.scale(&s)).collect()).collect()
    }

    /// `(1/|A|) Σ_{a ∈ A} conj(λ(a)) L(a)` for `A = <x>`, `λ(x) = ζ_o^k`.
    fn cyclic(&self, g: &FiniteMatrixGroup, x: usize, k: usize) -> Vec<CVec> {
        let n = g.rank();
        let o = g.element_order(x);
        let big = self.field.order();
        let mut acc = vec![vec![self.field.zero(); n]; n];
        let mut a = 0;
        for j in 0..o {
            let coeff = self.field.zeta_pow(-((big / o * k * j) as i64));
            for r in 0..n {
                for c in 0..n {
                    let e = &self.elements[a][r][c];
                    if !e.is_zero() {
                        acc[r][c] = &acc[r][c] + &(&coeff * e);
                    }
                }
            }
            a = g.mult(a, x);
        }
        let s = BigRational::new(1.into(), o.into());
        acc.iter().map(|r| r.iter().map(|y| y.scale(&s)).collect()).collect()
    }

    fn orbit_span(&self, vectors: &[CVec]) -> Vec<CVec> {
        let mut e = Echelon::new();
        let mut out = Vec::new();
        for v in vectors {
            for l in &self.elements {
                let w = mat_vec(l, v);
                if e.insert(&w) {
                    out.push(w);
                }
            }
        }
        out
    }
}

/// A slice `E ⊂ U_χ` isomorphic to `M_χ`: the image of `P_χ P_{A,λ}` for
/// the first cyclic subgroup `A` and character `λ` occurring once in
/// `χ|_A`.
fn multiplicity_slice(
    proj: &Projectors,
    g: &FiniteMatrixGroup,
    table: &CharacterTable,
    chi: usize,
    n_chi: usize,
) -> Result<Vec<CVec>> {
    let p_chi = proj.isotypic(g, table, chi);
    if table.degree(chi) == 1 {
        return Ok(column_basis(&p_chi));
    }
    let big = proj.field.order();
    for x in 1..g.order() {
        let o = g.element_order(x);
        for k in 0..o {
            // <χ|_A, λ> = (1/o) Σ_j χ(x^j) ζ_o^{-kj}
            let mut ip = proj.field.zero();
            for j in 0..o {
                let v = table.value(chi, g.class_of(g.power(x, j))).embed(&proj.field);
                ip = &ip + &(&v * &proj.field.zeta_pow(-((big / o * k * j) as i64)));
            }
            let ip = ip.scale(&BigRational::new(1.into(), o.into()));
            if !ip.is_one() {
                continue;
            }
            let slice = column_basis(&mat_mul(&p_chi, &proj.cyclic(g, x, k)));
            if slice.len() == n_chi {
                return Ok(slice);
            }
        }
    }
    Err(Error::NoDecomposition(format!(
        "no cyclic subgroup isolates a multiplicity space for character {chi}"
    )))
}

/// Builds `J` for the given Hodge type and verifies it exactly.
pub fn sample_complex_structure(
    c: &CrystGroup,
    data: &IsotypicalData,
    t: &HodgeType,
) -> Result<ComplexStructureSample> {
    if !evenness(data).even {
        return Err(Error::NotEven);
    }
    t.validate(data)?;
    let g = c.group();
    let table = &data.table;
    let n = c.rank();
    let big = num_integer::lcm(table.exponent(), 4);
    let field = CyclotomicField::new(big);
    let i_unit = field.imaginary_unit().expect("4 divides the field order");
    let proj = Projectors {
        field: field.clone(),
        elements: g.elements().iter().map(|m| int_to_field(m, &field)).collect(),
    };

    let mut h10: Vec<CVec> = Vec::new();
    for ch in &data.characters {
        if ch.multiplicity == 0 || (!ch.real && ch.index > ch.partner) {
            continue;
        }
        let slice = multiplicity_slice(&proj, g, table, ch.index, ch.multiplicity)?;
        if ch.real {
            h10.extend(real_block(&proj, &slice, ch, &i_unit)?);
        } else {
            let nu = t.nu[ch.index];
            h10.extend(proj.orbit_span(&slice[..nu]));
            let conj_slice: Vec<CVec> = slice[nu..].iter().map(|v| conj_vec(v)).collect();
            h10.extend(proj.orbit_span(&conj_slice));
        }
    }
    if h10.len() * 2 != n {
        return Err(Error::NoDecomposition(format!(
            "H^(1,0) has dimension {}, expected {}",
            h10.len(),
            n / 2
        )));
    }

    // Q = [Ω | Ω̄], P = Q diag(I, 0) Q^-1, J = i (2P - I)
    let half = n / 2;
    let q: Vec<CVec> = (0..n)
        .map(|r| {
            (0..n)
                .map(|col| if col < half { h10[col][r].clone() } else { h10[col - half][r].conj() })
                .collect()
        })
        .collect();
    let q_inv = inverse(&q).ok_or_else(|| Error::NoDecomposition("H^(1,0) meets its conjugate".into()))?;
    let mut dmat = identity(n, &field);
    for (k, row) in dmat.iter_mut().enumerate().skip(half) {
        row[k] = field.zero();
    }
    let p = mat_mul(&mat_mul(&q, &dmat), &q_inv);
    let two = BigRational::from_integer(2.into());
    let j: Vec<CVec> = (0..n)
        .map(|r| {
            (0..n)
                .map(|col| {
                    let mut x = p[r][col].scale(&two);
                    if r == col {
                        x = &x - &field.one();
                    }
                    &i_unit * &x
                })
                .collect()
        })
        .collect();

    verify_structure(g, &proj, &j, &h10, &i_unit)?;

    let omega: Vec<CVec> = (0..n).map(|r| h10.iter().map(|col| col[r].clone()).collect()).collect();
    let recovered = HodgeType {
        nu: data
            .characters
            .iter()
            .map(|ch| {
                if ch.multiplicity == 0 {
                    return 0;
                }
                let p_chi = proj.isotypic(g, table, ch.index);
                let images: Vec<CVec> = h10.iter().map(|v| mat_vec(&p_chi, v)).collect();
                rank_of(&images) / ch.degree
            })
            .collect(),
    };
    let mut orient = det(&q);
    for _ in 0..half {
        orient = &orient * &i_unit;
    }
    let value = orient.to_complex().re;
    let orientation_sign = if value > 0.0 { 1 } else { -1 };
    let j_float = j
        .iter()
        .map(|row| row.iter().map(|x| x.to_complex().re).collect())
        .collect();
    Ok(ComplexStructureSample {
        field,
        j,
        omega,
        j_float,
        orientation_sign,
        requested: t.clone(),
        conjugate_type: t.conjugate(data),
        recovered,
    })
}

/// Greedy choice of `n_χ/2` slice vectors whose orbit span meets its
/// conjugate trivially; candidates are `b_j`, `b_j + b_k`, `b_j - i b_k`.
fn real_block(proj: &Projectors, slice: &[CVec], ch: &CharacterData, i_unit: &Cyclo) -> Result<Vec<CVec>> {
    let mut candidates: Vec<CVec> = slice.to_vec();
    for a in 0..slice.len() {
        for b in a + 1..slice.len() {
            candidates.push(slice[a].iter().zip(&slice[b]).map(|(x, y)| x + y).collect());
        }
    }
    for a in 0..slice.len() {
        for b in a + 1..slice.len() {
            candidates.push(slice[a].iter().zip(&slice[b]).map(|(x, y)| x - &(i_unit * y)).collect());
        }
    }
    let target = ch.multiplicity / 2;
    let mut chosen: Vec<CVec> = Vec::new();
    for cand in candidates {
        if chosen.len() == target {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(cand);
        let span = proj.orbit_span(&trial);
        let mut both = span.clone();
        both.extend(span.iter().map(|v| conj_vec(v)));
        if span.len() == trial.len() * ch.degree && rank_of(&both) == 2 * span.len() {
            chosen = trial;
        }
    }
    if chosen.len() != target {
        return Err(Error::NoDecomposition(format!(
            "no admissible half-dimensional subspace for character {}",
            ch.index
        )));
    }
    Ok(proj.orbit_span(&chosen))
}

fn verify_structure(
    g: &FiniteMatrixGroup,
    proj: &Projectors,
    j: &[CVec],
    h10: &[CVec],
    i_unit: &Cyclo,
) -> Result<()> {
    let n = j.len();
    let field = i_unit.field();
    let fail = |what: &str| Err(Error::Internal(format!("complex structure check failed: {what}")));
    if j.iter().flatten().any(|x| x.conj() != *x) {
        return fail("J is not real");
    }
    let j2 = mat_mul(j, j);
    let minus_id: Vec<CVec> = identity(n, field)
        .into_iter()
        .map(|r| r.iter().map(|x| -x).collect())
        .collect();
    if j2 != minus_id {
        return fail("J^2 != -I");
    }
    for x in 0..g.order() {
        let l = &proj.elements[x];
        if mat_mul(l, j) != mat_mul(j, l) {
            return fail("J does not commute with the point group");
        }
    }
    for v in h10 {
        let iv: CVec = v.iter().map(|x| i_unit * x).collect();
        if mat_vec(j, v) != iv {
            return fail("Ω is not in the +i eigenspace");
        }
    }
    Ok(())
}

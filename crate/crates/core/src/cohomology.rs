//! Group cohomology `H^k(G, M)` for `k <= 2` from the normalized bar
//! resolution, extension classes of crystallographic groups, and the
//! splitting tests over an overlattice.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cryst::CrystGroup;
use crate::error::{Error, Result};
use crate::group::FiniteMatrixGroup;
use crate::linalg::{
    lattice_basis, solve_congruence, solve_congruence_mod, FgaGroup, IntMatrix, RatMatrix,
    RatVector, SmithForm,
};

/// Largest dense differential (entries) that will be materialized.
pub const MAX_DIFFERENTIAL_ENTRIES: usize = 40_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    /// `Z^r` with the given action.
    Lattice,
    /// `(1/d) Z^n` with the linear parts as action, in the basis `e_i / d`.
    Scaled(BigInt),
    /// A finite module `⊕ Z/d_i`.
    Finite,
}

/// Coefficient module: `Z^r` or `⊕ Z/d_i`, with one action matrix per
/// group element.
#[derive(Clone, Debug)]
pub struct GModule {
    group: Arc<FiniteMatrixGroup>,
    kind: ModuleKind,
    action: Vec<IntMatrix>,
    moduli: Option<Vec<BigInt>>,
}

impl GModule {
    /// `Z^n` with `g` acting by `L(g)`.
    pub fn lattice(group: &Arc<FiniteMatrixGroup>) -> GModule {
        GModule {
            group: group.clone(),
            kind: ModuleKind::Lattice,
            action: group.elements().to_vec(),
            moduli: None,
        }
    }

    /// `(1/d) Z^n`; isomorphic to `Z^n` through multiplication by `d`.
    pub fn scaled(group: &Arc<FiniteMatrixGroup>, d: BigInt) -> Result<GModule> {
        if !d.is_positive() {
            return Err(Error::DimensionMismatch("scale must be positive".into()));
        }
        Ok(GModule {
            kind: ModuleKind::Scaled(d),
            ..GModule::lattice(group)
        })
    }

    /// A lattice `Z^r` with an arbitrary action, checked against the
    /// multiplication table.
    pub fn with_action(group: &Arc<FiniteMatrixGroup>, action: Vec<IntMatrix>) -> Result<GModule> {
        let m = GModule {
            group: group.clone(),
            kind: ModuleKind::Lattice,
            action,
            moduli: None,
        };
        m.check_action()?;
        Ok(m)
    }

    /// A finite module `⊕ Z/d_i` (every `d_i > 1`) with the given action.
    pub fn finite(
        group: &Arc<FiniteMatrixGroup>,
        action: Vec<IntMatrix>,
        moduli: Vec<BigInt>,
    ) -> Result<GModule> {
        if moduli.iter().any(|d| d <= &BigInt::one()) {
            return Err(Error::DimensionMismatch("moduli must exceed 1".into()));
        }
        let m = GModule {
            group: group.clone(),
            kind: ModuleKind::Finite,
            action,
            moduli: Some(moduli),
        };
        m.check_action()?;
        Ok(m)
    }

    /// `Λ' / Z^n` for an invariant overlattice, in invariant-factor
    /// coordinates.
    pub fn quotient(group: &Arc<FiniteMatrixGroup>, lattice: &Overlattice) -> Result<GModule> {
        let actions = lattice.actions(group)?;
        let snf = SmithForm::compute(lattice.relations());
        let n = group.rank();
        let keep: Vec<usize> = (0..n).filter(|&i| !snf.diagonal()[i].is_one()).collect();
        let u = snf.left();
        let u_inv = {
            let cols: Vec<Vec<BigInt>> = (0..n)
                .map(|j| {
                    let mut e = vec![BigInt::zero(); n];
                    e[j] = BigInt::one();
                    snf.apply_left_inverse(&mut e);
                    e
                })
                .collect();
            IntMatrix::from_fn(n, n, |i, j| cols[j][i].clone())
        };
        let moduli: Vec<BigInt> = keep.iter().map(|&i| snf.diagonal()[i].clone()).collect();
        let action = actions
            .iter()
            .map(|a| {
                let full = u.mul(a).mul(&u_inv);
                IntMatrix::from_fn(keep.len(), keep.len(), |i, j| {
                    full[(keep[i], keep[j])].mod_floor(&moduli[i])
                })
            })
            .collect();
        let m = GModule {
            group: group.clone(),
            kind: ModuleKind::Finite,
            action,
            moduli: Some(moduli),
        };
        m.check_action()?;
        Ok(m)
    }

    pub fn group(&self) -> &Arc<FiniteMatrixGroup> {
        &self.group
    }

    pub fn kind(&self) -> &ModuleKind {
        &self.kind
    }

    /// Number of coordinates of a module element.
    pub fn rank(&self) -> usize {
        self.action.first().map_or(0, IntMatrix::rows)
    }

    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }

    pub fn moduli(&self) -> Option<&[BigInt]> {
        self.moduli.as_deref()
    }

    fn reduce(&self, m: &IntMatrix) -> IntMatrix {
        match &self.moduli {
            None => m.clone(),
            Some(d) => IntMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].mod_floor(&d[i])),
        }
    }

    fn check_action(&self) -> Result<()> {
        let g = &self.group;
        let r = self.rank();
        if self.action.len() != g.order() || self.action.iter().any(|a| a.rows() != r || a.cols() != r) {
            return Err(Error::DimensionMismatch("one square action matrix per element".into()));
        }
        if self.reduce(&self.action[0]) != self.reduce(&IntMatrix::identity(r)) {
            return Err(Error::ActionMismatch { g: 0, h: 0 });
        }
        for a in 0..g.order() {
            for b in 0..g.order() {
                let lhs = self.reduce(&self.action[g.mult(a, b)]);
                let rhs = self.reduce(&self.action[a].mul(&self.action[b]));
                if lhs != rhs {
                    return Err(Error::ActionMismatch { g: a, h: b });
                }
            }
        }
        Ok(())
    }
}

/// Index of a normalized cochain coordinate: the tuple of non-identity
/// elements `(g_1, ..., g_k)` and the module coordinate.
pub fn cochain_index(m: usize, r: usize, tuple: &[usize], coord: usize) -> usize {
    let t = tuple.iter().fold(0, |acc, &g| acc * m + (g - 1));
    t * r + coord
}

/// Number of integer coordinates of a normalized `k`-cochain.
pub fn cochain_len(module: &GModule, k: usize) -> usize {
    let m = module.group.order() - 1;
    m.pow(k as u32) * module.rank()
}

fn tuples(m: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = m.pow(k as u32);
    (0..total).map(move |mut t| {
        let mut v = vec![0; k];
        for slot in v.iter_mut().rev() {
            *slot = t % m + 1;
            t /= m;
        }
        v
    })
}

/// Terms of `(d f)(g_0, ..., g_k)`: the acting element (if any), the sign
/// and the argument tuple of `f`. Terms whose argument contains the
/// identity vanish on normalized cochains and are skipped.
fn differential_terms(group: &FiniteMatrixGroup, tuple: &[usize]) -> Vec<(Option<usize>, i64, Vec<usize>)> {
    let k = tuple.len() - 1;
    let mut terms = vec![(Some(tuple[0]), 1, tuple[1..].to_vec())];
    for i in 1..=k {
        let prod = group.mult(tuple[i - 1], tuple[i]);
        if prod == 0 {
            continue;
        }
        let mut arg = tuple[..i - 1].to_vec();
        arg.push(prod);
        arg.extend_from_slice(&tuple[i + 1..]);
        terms.push((None, if i % 2 == 1 { -1 } else { 1 }, arg));
    }
    terms.push((None, if k % 2 == 0 { -1 } else { 1 }, tuple[..k].to_vec()));
    terms
}

/// Evaluates the coboundary `d^k f` without building the matrix.
pub fn apply_differential(module: &GModule, k: usize, f: &[BigInt]) -> Vec<BigInt> {
    let group = &module.group;
    let m = group.order() - 1;
    let r = module.rank();
    assert_eq!(f.len(), cochain_len(module, k));
    let mut out = vec![BigInt::zero(); cochain_len(module, k + 1)];
    if m == 0 {
        return out;
    }
    for tuple in tuples(m, k + 1) {
        let base = cochain_index(m, r, &tuple, 0);
        for (act, sign, arg) in differential_terms(group, &tuple) {
            let at = cochain_index(m, r, &arg, 0);
            let val = &f[at..at + r];
            match act {
                Some(g) => {
                    let v = module.action[g].mul_vec(val);
                    for (o, x) in out[base..base + r].iter_mut().zip(v) {
                        *o += x * sign;
                    }
                }
                None => {
                    for (o, x) in out[base..base + r].iter_mut().zip(val) {
                        *o += x * sign;
                    }
                }
            }
        }
    }
    out
}

/// Dense matrix of `d^k : C^k -> C^{k+1}`.
pub fn differential_matrix(module: &GModule, k: usize) -> Result<IntMatrix> {
    let group = &module.group;
    let m = group.order() - 1;
    let r = module.rank();
    let (rows, cols) = (cochain_len(module, k + 1), cochain_len(module, k));
    if rows.saturating_mul(cols) > MAX_DIFFERENTIAL_ENTRIES {
        return Err(Error::TooLarge(rows.saturating_mul(cols)));
    }
    let mut d = IntMatrix::zeros(rows, cols);
    if m == 0 {
        return Ok(d);
    }
    for tuple in tuples(m, k + 1) {
        let base = cochain_index(m, r, &tuple, 0);
        for (act, sign, arg) in differential_terms(group, &tuple) {
            let at = cochain_index(m, r, &arg, 0);
            for i in 0..r {
                match act {
                    Some(g) => {
                        for j in 0..r {
                            d[(base + i, at + j)] += &module.action[g][(i, j)] * sign;
                        }
                    }
                    None => d[(base + i, at + i)] += sign,
                }
            }
        }
    }
    Ok(d)
}

/// Cocycles `Z^k` as a lattice with an explicit basis `V diag(f)`, built
/// from the Smith form of the (row-scaled) differential.
#[derive(Clone, Debug)]
struct CocycleSpace {
    snf: SmithForm,
    /// `Some(f_j)` for basis columns `f_j V e_j`; `None` for excluded
    /// columns.
    scale: Vec<Option<BigInt>>,
}

impl CocycleSpace {
    fn new(module: &GModule, k: usize) -> Result<CocycleSpace> {
        let mut d = differential_matrix(module, k)?;
        let r = module.rank();
        let scale;
        match &module.moduli {
            None => {
                let snf = SmithForm::compute(&d);
                scale = (0..d.cols())
                    .map(|j| (j >= snf.rank()).then(BigInt::one))
                    .collect();
                return Ok(CocycleSpace { snf, scale });
            }
            Some(moduli) => {
                // row i of each block must vanish mod d_i; rescale to a
                // common modulus E
                let e = moduli.iter().fold(BigInt::one(), |a, b| a.lcm(b));
                for row in 0..d.rows() {
                    let factor = &e / &moduli[row % r];
                    for col in 0..d.cols() {
                        if !d[(row, col)].is_zero() {
                            d[(row, col)] *= &factor;
                        }
                    }
                }
                let snf = SmithForm::compute(&d);
                scale = (0..d.cols())
                    .map(|j| {
                        let delta = snf.diagonal().get(j).cloned().unwrap_or_else(BigInt::zero);
                        Some(&e / delta.gcd(&e))
                    })
                    .collect();
                Ok(CocycleSpace { snf, scale })
            }
        }
    }

    fn dim(&self) -> usize {
        self.scale.iter().filter(|s| s.is_some()).count()
    }

    /// Coordinates of a cocycle in the basis; `None` if `x` is not one.
    fn coords(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut y = x.to_vec();
        self.snf.apply_right_inverse(&mut y);
        let mut out = Vec::with_capacity(self.dim());
        for (yj, s) in y.iter().zip(&self.scale) {
            match s {
                None if !yj.is_zero() => return None,
                None => {}
                Some(f) => {
                    if !yj.is_multiple_of(f) {
                        return None;
                    }
                    out.push(yj / f);
                }
            }
        }
        Some(out)
    }

    fn vector(&self, c: &[BigInt]) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.scale.len()];
        let mut it = c.iter();
        for (yj, s) in y.iter_mut().zip(&self.scale) {
            if let Some(f) = s {
                *yj = it.next().expect("coordinate count") * f;
            }
        }
        self.snf.apply_right(&mut y);
        y
    }
}

#[derive(Clone, Debug)]
enum Presentation {
    /// Lattice coefficients: `H^k = Tors(C^k / B^k)`.
    Torsion,
    /// General: `H^k = Z^k / (B^k + relations)` in cocycle coordinates.
    Full { cocycles: CocycleSpace },
}

/// `H^k(G, M)` with maps between cocycles and class coordinates.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    degree: usize,
    module: GModule,
    group: FgaGroup,
    presentation: Presentation,
}

impl CohomologyGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn module(&self) -> &GModule {
        &self.module
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        self.group.invariant_factors()
    }

    pub fn order(&self) -> Option<BigInt> {
        self.group.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.group.is_trivial()
    }

    /// Class coordinates of a normalized cocycle, reduced modulo the
    /// invariant factors.
    pub fn class_coords(&self, cocycle: &[BigInt]) -> Result<Vec<BigInt>> {
        if cocycle.len() != cochain_len(&self.module, self.degree) {
            return Err(Error::DimensionMismatch("cochain has the wrong length".into()));
        }
        let not_cocycle = || Error::InvalidGroup(format!("not a {}-cocycle", self.degree));
        let dx = apply_differential(&self.module, self.degree, cocycle);
        let vanishes = match &self.module.moduli {
            None => dx.iter().all(Zero::is_zero),
            Some(d) => {
                let r = self.module.rank();
                dx.iter().enumerate().all(|(i, x)| x.is_multiple_of(&d[i % r]))
            }
        };
        if !vanishes {
            return Err(not_cocycle());
        }
        match &self.presentation {
            Presentation::Torsion => Ok(self.group.to_coords(cocycle)),
            Presentation::Full { cocycles, .. } => {
                let c = cocycles.coords(cocycle).ok_or_else(not_cocycle)?;
                Ok(self.group.to_coords(&c))
            }
        }
    }

    /// A normalized cocycle in the class with the given coordinates.
    pub fn representative(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let x = self.group.representative(coords);
        match &self.presentation {
            Presentation::Torsion => x,
            Presentation::Full { cocycles, .. } => cocycles.vector(&x),
        }
    }

    pub fn element_order(&self, coords: &[BigInt]) -> BigInt {
        self.group
            .element_order(coords)
            .expect("cohomology of a finite group in positive degree is torsion")
    }

    pub fn is_zero(&self, coords: &[BigInt]) -> bool {
        self.group.is_zero_coords(coords)
    }

    /// Full presentation `Z^k / (B^k + R)`; also valid for lattices, where it
    /// serves as an independent check of the torsion shortcut.
    pub fn compute_full(module: &GModule, degree: usize) -> Result<CohomologyGroup> {
        check_degree(degree)?;
        let cocycles = CocycleSpace::new(module, degree)?;
        let r = module.rank();
        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        let boundary = differential_matrix(module, degree - 1)?;
        for j in 0..boundary.cols() {
            let col = boundary.column(j);
            gens.push(cocycles.coords(&col).ok_or_else(|| Error::Internal("d∘d ≠ 0".into()))?);
        }
        if let Some(moduli) = &module.moduli {
            let len = cochain_len(module, degree);
            for i in 0..len {
                let mut v = vec![BigInt::zero(); len];
                v[i] = moduli[i % r].clone();
                gens.push(cocycles.coords(&v).ok_or_else(|| Error::Internal("relation is not a cocycle".into()))?);
            }
        }
        let dim = cocycles.dim();
        let rels = IntMatrix::from_fn(dim, gens.len(), |i, j| gens[j][i].clone());
        let quotient = FgaGroup::cokernel(&rels);
        Ok(CohomologyGroup {
            degree,
            module: module.clone(),
            group: quotient,
            presentation: Presentation::Full { cocycles },
        })
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree == 1 || degree == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("cohomology degree must be 1 or 2, got {degree}")))
    }
}

/// `H^k(G, M)` for `k ∈ {1, 2}`.
///
/// For lattice coefficients `H^k` is finite and `Z^k` is saturated in
/// `C^k`, so `H^k` is the torsion of `C^k / B^k` and `d^k` never has to be
/// built.
pub fn cohomology_group(module: &GModule, degree: usize) -> Result<CohomologyGroup> {
    check_degree(degree)?;
    if module.moduli.is_some() {
        return CohomologyGroup::compute_full(module, degree);
    }
    let boundary = differential_matrix(module, degree - 1)?;
    let cokernel = FgaGroup::cokernel(&boundary);
    Ok(CohomologyGroup {
        degree,
        module: module.clone(),
        group: cokernel.torsion_subgroup(),
        presentation: Presentation::Torsion,
    })
}

/// The extension class `ε(g, h) = u_g + L(g) u_h - u_gh` of a
/// crystallographic group.
#[derive(Clone, Debug)]
pub struct ExtensionClass {
    /// Normalized cocycle in the layout of [`cochain_index`].
    pub cocycle: Vec<BigInt>,
    pub class_coords: Vec<BigInt>,
    pub order: BigInt,
    /// Invariant factors of `H^2(G, Z^n)`.
    pub invariant_factors: Vec<BigInt>,
}

impl ExtensionClass {
    /// `ε(g, h)` for any pair of elements.
    pub fn value(&self, g: usize, h: usize, group_order: usize, n: usize) -> Vec<BigInt> {
        if g == 0 || h == 0 {
            return vec![BigInt::zero(); n];
        }
        let at = cochain_index(group_order - 1, n, &[g, h], 0);
        self.cocycle[at..at + n].to_vec()
    }
}

fn epsilon_cochain(c: &CrystGroup) -> Result<Vec<BigInt>> {
    let n = c.rank();
    let m = c.order() - 1;
    let mut out = vec![BigInt::zero(); m * m * n];
    for g in 1..c.order() {
        for h in 1..c.order() {
            let v = c
                .cocycle_defect(g, h)
                .to_integers()
                .ok_or_else(|| Error::InvalidGroup(format!("cocycle identity fails at ({g}, {h})")))?;
            let at = cochain_index(m, n, &[g, h], 0);
            out[at..at + n].clone_from_slice(&v);
        }
    }
    Ok(out)
}

pub fn extension_class(c: &CrystGroup) -> Result<ExtensionClass> {
    c.require_valid()?;
    let cocycle = epsilon_cochain(c)?;
    let h2 = cohomology_group(&GModule::lattice(c.group()), 2)?;
    let class_coords = h2.class_coords(&cocycle)?;
    let order = h2.element_order(&class_coords);
    Ok(ExtensionClass {
        cocycle,
        class_coords,
        order,
        invariant_factors: h2.invariant_factors().to_vec(),
    })
}

/// A lattice `Λ' ⊇ Z^n` of finite index, stored by a basis (columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlattice {
    basis: RatMatrix,
    inverse: RatMatrix,
    relations: IntMatrix,
}

impl Overlattice {
    /// The lattice spanned by `gens`; it must contain `Z^n`.
    pub fn from_generators(n: usize, gens: &[RatVector]) -> Result<Overlattice> {
        if gens.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("overlattice vectors must have length {n}")));
        }
        let basis = lattice_basis(n, gens);
        if basis.cols() != n {
            return Err(Error::NotOverlattice);
        }
        Self::from_basis(basis)
    }

    pub fn from_basis(basis: RatMatrix) -> Result<Overlattice> {
        if basis.rows() != basis.cols() {
            return Err(Error::NotOverlattice);
        }
        let inverse = basis.inverse().ok_or(Error::NotOverlattice)?;
        let relations = inverse.to_integer().ok_or(Error::NotOverlattice)?;
        Ok(Overlattice {
            basis,
            inverse,
            relations,
        })
    }

    /// `(1/d) Z^n`.
    pub fn scaled(n: usize, d: &BigInt) -> Overlattice {
        let mut b = RatMatrix::identity(n);
        for i in 0..n {
            b[(i, i)] = BigRational::new(BigInt::one(), d.clone());
        }
        Self::from_basis(b).expect("scaled lattice contains Z^n")
    }

    pub fn standard(n: usize) -> Overlattice {
        Self::scaled(n, &BigInt::one())
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    /// `B^-1`, whose columns express the standard basis in `Λ'`
    /// coordinates.
    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// `[Λ' : Z^n]`.
    pub fn index(&self) -> BigInt {
        self.relations.det().abs()
    }

    pub fn to_coords(&self, v: &RatVector) -> RatVector {
        self.inverse.mul_vec(v)
    }

    pub fn from_coords(&self, v: &RatVector) -> RatVector {
        self.basis.mul_vec(v)
    }

    pub fn contains(&self, v: &RatVector) -> bool {
        self.to_coords(v).is_integral()
    }

    /// Action `B^-1 L(g) B` on `Λ'` coordinates; fails if `Λ'` is not
    /// invariant.
    pub fn actions(&self, group: &FiniteMatrixGroup) -> Result<Vec<IntMatrix>> {
        if group.rank() != self.rank() {
            return Err(Error::DimensionMismatch("overlattice rank differs from group rank".into()));
        }
        (0..group.order())
            .map(|g| {
                group
                    .element(g)
                    .conjugate_by(&self.basis, &self.inverse)
                    .ok_or(Error::NotInvariant { element: g })
            })
            .collect()
    }
}

/// Fixed points of the affine action on `V / Λ'`.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    /// Search grid: classes in `((1/M) Λ') / Λ'`.
    pub grid: BigInt,
    /// Number of fixed classes on the grid.
    pub count: BigInt,
    /// Up to the requested limit, in original coordinates with `Λ'`
    /// coordinates in `[0, 1)`.
    pub points: Vec<RatVector>,
    /// `y - π(y)` for the first solution `y`, `π` the averaging projection
    /// onto the invariants.
    pub averaged: Option<RatVector>,
}

impl FixedPoints {
    pub fn is_empty(&self) -> bool {
        self.count.is_zero()
    }
}

/// All `[w]` with `L(g) w + u_g ≡ w (mod Λ')` for every `g`.
///
/// Any fixed point `y` yields the fixed point `y - π(y)`, which lies in
/// `(1/M) Λ'` for `M = |G| · den(B^-1 u)`, so searching that finite grid is
/// exhaustive for existence.
pub fn affine_fixed_points(c: &CrystGroup, lattice: &Overlattice, limit: usize) -> Result<FixedPoints> {
    let group = c.group();
    let actions = lattice.actions(group)?;
    let n = c.rank();
    let u: Vec<RatVector> = (0..c.order()).map(|g| lattice.to_coords(c.translation(g))).collect();
    let den = u.iter().fold(BigInt::one(), |a, v| a.lcm(&v.denominator()));
    let grid = &den * BigInt::from(c.order());
    let non_id: Vec<usize> = group.non_identity().collect();
    let blocks: Vec<IntMatrix> = non_id.iter().map(|&g| actions[g].minus_identity()).collect();
    let a = IntMatrix::vstack(&blocks, n);
    let scale = BigRational::from_integer(grid.clone());
    let rhs: Vec<BigInt> = non_id
        .iter()
        .flat_map(|&g| u[g].scale(&scale).neg().to_integers().expect("grid clears denominators"))
        .collect();
    let Some(sols) = solve_congruence_mod(&a, &rhs, &grid)? else {
        return Ok(FixedPoints {
            grid,
            count: BigInt::zero(),
            points: Vec::new(),
            averaged: None,
        });
    };
    let to_point = |z: &[BigInt]| {
        let y = RatVector(z.iter().map(|x| BigRational::new(x.clone(), grid.clone())).collect());
        lattice.from_coords(&y.reduce_mod_one())
    };
    let points: Vec<RatVector> = sols.enumerate(limit).iter().map(|z| to_point(z)).collect();
    let first = to_point(&sols.particular());
    let averaged = Some(average_out(c, lattice, &actions, &first));
    Ok(FixedPoints {
        grid,
        count: sols.count(),
        points,
        averaged,
    })
}

/// `w - π(w)` with `π = (1/|G|) Σ A_g` in `Λ'` coordinates, mapped back.
fn average_out(c: &CrystGroup, lattice: &Overlattice, actions: &[IntMatrix], w: &RatVector) -> RatVector {
    let y = lattice.to_coords(w);
    let mut sum = RatVector::zeros(c.rank());
    for a in actions {
        sum = sum.add(&a.mul_rat(&y));
    }
    let pi = sum.scale(&BigRational::new(BigInt::one(), BigInt::from(c.order())));
    lattice.from_coords(&y.sub(&pi))
}

/// The three splitting criteria over `Λ'`, evaluated independently.
#[derive(Clone, Debug)]
pub struct SplittingReport {
    /// (a) a realization `u_g + (L(g) - I) w ∈ Λ'` exists.
    pub realization: bool,
    pub realization_shift: Option<RatVector>,
    /// (b) the image of `ε` in `H^2(G, Λ')` vanishes.
    pub class_vanishes: bool,
    pub class_coords: Vec<BigInt>,
    pub h2_invariant_factors: Vec<BigInt>,
    /// (c) the affine action on `V / Λ'` has a fixed point.
    pub fixed_point: bool,
    pub fixed_points: FixedPoints,
}

impl SplittingReport {
    pub fn splits(&self) -> bool {
        self.realization
    }
}

/// Number of fixed points listed in a [`SplittingReport`].
pub const FIXED_POINT_SAMPLE: usize = 16;

pub fn splitting_equivalence(c: &CrystGroup, lattice: &Overlattice) -> Result<SplittingReport> {
    c.require_valid()?;
    let group = c.group();
    let actions = lattice.actions(group)?;
    let n = c.rank();

    // (a)
    let non_id: Vec<usize> = group.non_identity().collect();
    let blocks: Vec<IntMatrix> = non_id.iter().map(|&g| actions[g].minus_identity()).collect();
    let a = IntMatrix::vstack(&blocks, n);
    let b = RatVector(
        non_id
            .iter()
            .flat_map(|&g| lattice.to_coords(c.translation(g)).0)
            .collect(),
    );
    let realization_shift = solve_congruence(&a, &b, 1)?.map(|y| lattice.from_coords(&y));

    // (b)
    let eps = epsilon_cochain(c)?;
    let relations = lattice.relations();
    let mapped: Vec<BigInt> = eps
        .chunks(n)
        .flat_map(|v| relations.mul_vec(v))
        .collect();
    let h2 = cohomology_group(&GModule::with_action(group, actions)?, 2)?;
    let class_coords = h2.class_coords(&mapped)?;
    let class_vanishes = h2.is_zero(&class_coords);

    // (c)
    let fixed_points = affine_fixed_points(c, lattice, FIXED_POINT_SAMPLE)?;

    let report = SplittingReport {
        realization: realization_shift.is_some(),
        realization_shift,
        class_vanishes,
        class_coords,
        h2_invariant_factors: h2.invariant_factors().to_vec(),
        fixed_point: !fixed_points.is_empty(),
        fixed_points,
    };
    if report.realization != report.class_vanishes || report.realization != report.fixed_point {
        return Err(Error::SplittingDisagreement {
            realization: report.realization,
            class_vanishes: report.class_vanishes,
            fixed_point: report.fixed_point,
        });
    }
    Ok(report)
}

/// Order of `ε` as a machine integer.
pub fn extension_order(c: &CrystGroup) -> Result<u64> {
    extension_class(c)?
        .order
        .to_u64()
        .ok_or_else(|| Error::Internal("extension order overflows".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{generate_closure, DEFAULT_LIMIT};

    fn cyclic(m: &IntMatrix) -> Arc<FiniteMatrixGroup> {
        Arc::new(generate_closure(m.rows(), &[m.clone()], DEFAULT_LIMIT).unwrap())
    }

    fn rot(k: usize) -> IntMatrix {
        match k {
            2 => IntMatrix::from_rows(&[vec![-1, 0], vec![0, -1]]),
            3 => IntMatrix::from_rows(&[vec![0, -1], vec![1, -1]]),
            4 => IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]),
            6 => IntMatrix::from_rows(&[vec![1, -1], vec![1, 0]]),
            _ => unreachable!(),
        }
    }

    fn trivial_action(g: &Arc<FiniteMatrixGroup>) -> GModule {
        GModule::with_action(g, vec![IntMatrix::identity(1); g.order()]).unwrap()
    }

    #[test]
    fn h2_of_cyclic_with_trivial_coefficients() {
        for m in [2usize, 3, 4, 6] {
            let g = cyclic(&rot(m));
            let h2 = cohomology_group(&trivial_action(&g), 2).unwrap();
            assert_eq!(h2.invariant_factors(), &[BigInt::from(m)]);
            let full = CohomologyGroup::compute_full(&trivial_action(&g), 2).unwrap();
            assert_eq!(full.invariant_factors(), h2.invariant_factors());
        }
    }

    #[test]
    fn differentials_compose_to_zero() {
        let g = cyclic(&rot(6));
        let module = GModule::lattice(&g);
        let d0 = differential_matrix(&module, 0).unwrap();
        let d1 = differential_matrix(&module, 1).unwrap();
        let d2 = differential_matrix(&module, 2).unwrap();
        assert!(d1.mul(&d0).is_zero());
        assert!(d2.mul(&d1).is_zero());
        let x: Vec<BigInt> = (0..d1.cols()).map(|i| BigInt::from(i as i64 % 7 - 3)).collect();
        assert_eq!(apply_differential(&module, 1, &x), d1.mul_vec(&x));
    }

    #[test]
    fn h1_sign_action() {
        let g = cyclic(&IntMatrix::from_rows(&[vec![-1]]));
        let h1 = cohomology_group(&GModule::lattice(&g), 1).unwrap();
        assert_eq!(h1.invariant_factors(), &[BigInt::from(2)]);
        let triv = FiniteMatrixGroup::trivial(3);
        let h1 = cohomology_group(&GModule::lattice(&Arc::new(triv)), 1).unwrap();
        assert!(h1.is_trivial());
    }

    #[test]
    fn action_mismatch_is_reported() {
        let g = cyclic(&rot(3));
        let bad = vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]]), IntMatrix::from_rows(&[vec![-1]])];
        assert!(matches!(GModule::with_action(&g, bad), Err(Error::ActionMismatch { .. })));
    }

    #[test]
    fn finite_quotient_coefficients() {
        // H^1(Z/2, Z/2 trivial) = Z/2, H^2(Z/2, Z/2) = Z/2
        let g = cyclic(&IntMatrix::from_rows(&[vec![-1]]));
        let m = GModule::finite(&g, vec![IntMatrix::identity(1); 2], vec![2.into()]).unwrap();
        assert_eq!(cohomology_group(&m, 1).unwrap().invariant_factors(), &[BigInt::from(2)]);
        assert_eq!(cohomology_group(&m, 2).unwrap().invariant_factors(), &[BigInt::from(2)]);
        // (1/2 Z)/Z with the sign action is Z/2 with trivial action
        let q = GModule::quotient(&g, &Overlattice::scaled(1, &2.into())).unwrap();
        assert_eq!(q.moduli(), Some(&[BigInt::from(2)][..]));
        assert_eq!(cohomology_group(&q, 1).unwrap().invariant_factors(), &[BigInt::from(2)]);
    }

    #[test]
    fn representatives_round_trip() {
        let g = cyclic(&rot(4));
        let module = GModule::lattice(&g);
        let h2 = cohomology_group(&module, 2).unwrap();
        let full = CohomologyGroup::compute_full(&module, 2).unwrap();
        assert_eq!(h2.invariant_factors(), full.invariant_factors());
        for grp in [&h2, &full] {
            for c in 0..3i64 {
                let coords: Vec<BigInt> = grp.invariant_factors().iter().map(|_| BigInt::from(c)).collect();
                let rep = grp.representative(&coords);
                let back = grp.class_coords(&rep).unwrap();
                let diff: Vec<BigInt> = back.iter().zip(&coords).map(|(a, b)| a - b).collect();
                assert!(grp.is_zero(&diff));
            }
        }
    }
}

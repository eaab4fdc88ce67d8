//! Crystallographic groups `0 -> Z^n -> Γ -> G -> 1` stored as a point
//! group with a vector system.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{generate_closure, FiniteMatrixGroup, DEFAULT_LIMIT};
use crate::linalg::{
    divisors, format_rational, lattice_basis, solve_congruence, FgaGroup, IntMatrix, RatMatrix,
    RatVector,
};

/// An affine map `v -> L v + t`.
pub type AffineGenerator = (IntMatrix, RatVector);

/// A crystallographic group with lattice `Z^n`, point group `G` and vector
/// system `g -> u_g`, each `u_g` stored with coordinates in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct CrystGroup {
    group: Arc<FiniteMatrixGroup>,
    vector_system: Vec<RatVector>,
    generators: Vec<AffineGenerator>,
}

/// A violated defining identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `u_g + L(g) u_h - u_gh` is not integral.
    Cocycle { g: usize, h: usize, defect: RatVector },
    /// `u_1` is not integral.
    IdentityTranslation { defect: RatVector },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |v: &RatVector| {
            v.iter().map(format_rational).collect::<Vec<_>>().join(", ")
        };
        match self {
            Violation::Cocycle { g, h, defect } => write!(
                f,
                "u_{g} + L({g}) u_{h} - u_({g}*{h}) = ({}) is not integral",
                show(defect)
            ),
            Violation::IdentityTranslation { defect } => {
                write!(f, "u at the identity is ({}), not integral", show(defect))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A non-identity element with a fixed point on the torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionWitness {
    pub element: usize,
    /// A solution of `L(g) x + u_g ≡ x (mod Z^n)`.
    pub x: RatVector,
    /// The lift `γ = (L(g), u_g - λ)` of `g` fixing `x`, with `λ ∈ Z^n`.
    pub translation: RatVector,
    /// Order of `γ`, equal to the order of `g`.
    pub order: usize,
    /// `Σ_{i=1..m} γ^i(0)`; `γ` fixes the barycenter `w / m`.
    pub orbit_sum: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionReport {
    pub is_torsion_free: bool,
    pub witnesses: Vec<TorsionWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalDenominator {
    pub d: u64,
    /// Translation `w` conjugating the stored system into `(1/d) Z^n`.
    pub shift: RatVector,
    /// `u_g + (L(g) - I) w`, reduced mod `Z^n`, for every element.
    pub realization: Vec<RatVector>,
}

/// Output of [`reduce_translations`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub group: CrystGroup,
    /// Basis of the enlarged lattice `Λ` as columns; new coordinates are
    /// `B^-1 v`.
    pub basis: RatMatrix,
    /// `Λ / Z^n`, the translations acting on the original torus.
    pub translation_quotient: FgaGroup,
}

impl CrystGroup {
    /// Builds the group generated by affine maps whose linear parts generate
    /// a finite group. The vector system is accumulated along words, so an
    /// inconsistent generating set shows up as cocycle violations in
    /// [`CrystGroup::validate`].
    pub fn from_generators(n: usize, gens: &[AffineGenerator]) -> Result<CrystGroup> {
        Self::from_generators_with_limit(n, gens, DEFAULT_LIMIT)
    }

    pub fn from_generators_with_limit(
        n: usize,
        gens: &[AffineGenerator],
        limit: usize,
    ) -> Result<CrystGroup> {
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        for (i, (_, t)) in gens.iter().enumerate() {
            if t.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "translation {i} has length {}, expected {n}",
                    t.len()
                )));
            }
        }
        let linear: Vec<IntMatrix> = gens.iter().map(|(l, _)| l.clone()).collect();
        let group = Arc::new(generate_closure(n, &linear, limit)?);
        let generators: Vec<AffineGenerator> = gens
            .iter()
            .map(|(l, t)| (l.clone(), t.reduce_mod_one()))
            .collect();
        let mut c = CrystGroup {
            group,
            vector_system: Vec::new(),
            generators,
        };
        c.vector_system = (0..c.order())
            .map(|x| c.compose_word(c.group.word(x)).1)
            .collect();
        Ok(c)
    }

    /// Builds a group from a point group and an explicit vector system.
    pub fn from_parts(group: Arc<FiniteMatrixGroup>, vector_system: Vec<RatVector>) -> Result<CrystGroup> {
        let n = group.rank();
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        if vector_system.len() != group.order() || vector_system.iter().any(|u| u.len() != n) {
            return Err(Error::DimensionMismatch(
                "vector system must have one length-n vector per element".into(),
            ));
        }
        let vector_system: Vec<RatVector> = vector_system.iter().map(RatVector::reduce_mod_one).collect();
        let generators = (0..group.generators().len())
            .map(|k| {
                let g = group.generator_element(k);
                (group.element(g).clone(), vector_system[g].clone())
            })
            .collect();
        Ok(CrystGroup {
            group,
            vector_system,
            generators,
        })
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn group(&self) -> &Arc<FiniteMatrixGroup> {
        &self.group
    }

    pub fn linear(&self, g: usize) -> &IntMatrix {
        self.group.element(g)
    }

    pub fn translation(&self, g: usize) -> &RatVector {
        &self.vector_system[g]
    }

    pub fn vector_system(&self) -> &[RatVector] {
        &self.vector_system
    }

    /// Affine generators with translations in `[0, 1)^n`.
    pub fn generators(&self) -> &[AffineGenerator] {
        &self.generators
    }

    /// `u_g + L(g) u_h - u_gh`, integral for a valid group.
    pub fn cocycle_defect(&self, g: usize, h: usize) -> RatVector {
        let gh = self.group.mult(g, h);
        self.vector_system[g]
            .add(&self.linear(g).mul_rat(&self.vector_system[h]))
            .sub(&self.vector_system[gh])
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !self.vector_system[0].is_integral() {
            violations.push(Violation::IdentityTranslation {
                defect: self.vector_system[0].clone(),
            });
        }
        for g in 0..self.order() {
            for h in 0..self.order() {
                let defect = self.cocycle_defect(g, h);
                if !defect.is_integral() {
                    violations.push(Violation::Cocycle { g, h, defect });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Fails with the first violated identity.
    pub fn require_valid(&self) -> Result<()> {
        match self.validate().violations.first() {
            Some(v) => Err(Error::InvalidGroup(v.to_string())),
            None => Ok(()),
        }
    }

    /// Composes the affine generators along a word; the translation is
    /// reduced mod `Z^n`.
    pub fn vector_system_of_word(&self, word: &[usize]) -> Result<(usize, RatVector)> {
        if let Some(&bad) = word.iter().find(|&&k| k >= self.generators.len()) {
            return Err(Error::InvalidGenerator(bad));
        }
        let (m, t) = self.compose_word(word);
        let element = self
            .group
            .index_of(&m)
            .ok_or_else(|| Error::Internal("word leaves the point group".into()))?;
        Ok((element, t))
    }

    fn compose_word(&self, word: &[usize]) -> (IntMatrix, RatVector) {
        let n = self.rank();
        let mut m = IntMatrix::identity(n);
        let mut t = RatVector::zeros(n);
        for &k in word {
            let (l, s) = &self.generators[k];
            t = t.add(&m.mul_rat(s));
            m = m.mul(l);
        }
        (m, t.reduce_mod_one())
    }

    /// For each `g ≠ 1`, whether `det(L(g) - I) = 0`.
    pub fn eigenvalue_one_filter(&self) -> Vec<(usize, bool)> {
        self.group
            .non_identity()
            .map(|g| (g, self.linear(g).minus_identity().det().is_zero()))
            .collect()
    }

    /// Decides for every `g ≠ 1` whether `(L(g) - I) x ≡ -u_g (mod Z^n)` is
    /// solvable; a solution is a fixed point of a lift of `g`.
    pub fn torsion_status(&self) -> Result<TorsionReport> {
        let mut witnesses = Vec::new();
        for g in self.group.non_identity() {
            let l = self.linear(g);
            let u = &self.vector_system[g];
            let Some(x) = solve_congruence(&l.minus_identity(), u, 1)? else {
                continue;
            };
            let lambda = l.minus_identity().mul_rat(&x).add(u);
            let translation = u.sub(&lambda);
            let order = self.group.element_order(g);
            let gamma = |v: &RatVector| l.mul_rat(v).add(&translation);
            let mut p = RatVector::zeros(self.rank());
            let mut orbit_sum = RatVector::zeros(self.rank());
            for _ in 0..order {
                p = gamma(&p);
                orbit_sum = orbit_sum.add(&p);
            }
            if !p.is_zero() || gamma(&x) != x {
                return Err(Error::Internal(format!("torsion witness for element {g} is not of finite order")));
            }
            let barycenter = orbit_sum.scale(&BigRational::new(1.into(), order.into()));
            if gamma(&barycenter) != barycenter {
                return Err(Error::Internal("orbit barycenter is not fixed".into()));
            }
            witnesses.push(TorsionWitness {
                element: g,
                x,
                translation,
                order,
                orbit_sum,
            });
        }
        Ok(TorsionReport {
            is_torsion_free: witnesses.is_empty(),
            witnesses,
        })
    }

    /// Least `d` such that a translation conjugate of the vector system lies
    /// in `(1/d) Z^n`, searched over the divisors of `|G|`.
    pub fn minimal_denominator(&self) -> Result<MinimalDenominator> {
        self.require_valid()?;
        let n = self.rank();
        let non_id: Vec<usize> = self.group.non_identity().collect();
        let blocks: Vec<IntMatrix> = non_id.iter().map(|&g| self.linear(g).minus_identity()).collect();
        let a = IntMatrix::vstack(&blocks, n);
        let b = RatVector(non_id.iter().flat_map(|&g| self.vector_system[g].0.clone()).collect());
        for d in divisors(self.order() as u64) {
            if let Some(w) = solve_congruence(&a, &b, d)? {
                let realization = self.translate_conjugate(&w)?.vector_system;
                return Ok(MinimalDenominator {
                    d,
                    shift: w,
                    realization,
                });
            }
        }
        Err(Error::Internal("no realization with denominator dividing |G|".into()))
    }

    /// Conjugates by the translation `v -> v + w`: `u'_g = u_g + (L(g) - I) w`.
    pub fn translate_conjugate(&self, w: &RatVector) -> Result<CrystGroup> {
        if w.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "shift has length {}, expected {}",
                w.len(),
                self.rank()
            )));
        }
        let shift = |l: &IntMatrix, u: &RatVector| l.minus_identity().mul_rat(w).add(u).reduce_mod_one();
        Ok(CrystGroup {
            group: self.group.clone(),
            vector_system: (0..self.order())
                .map(|g| shift(self.linear(g), &self.vector_system[g]))
                .collect(),
            generators: self
                .generators
                .iter()
                .map(|(l, t)| (l.clone(), shift(l, t)))
                .collect(),
        })
    }

    /// Expresses the group in the basis given by the columns of the
    /// unimodular matrix `u`: `L' = U^-1 L U`, `t' = U^-1 t`.
    pub fn change_basis(&self, u: &IntMatrix) -> Result<CrystGroup> {
        let b = RatMatrix::from_int(u);
        let inv = b
            .inverse()
            .filter(|i| i.to_integer().is_some())
            .ok_or_else(|| Error::NotUnimodular {
                index: 0,
                det: u.det().to_string(),
            })?;
        let gens = self
            .generators
            .iter()
            .map(|(l, t)| {
                let l2 = l.conjugate_by(&b, &inv).expect("unimodular conjugate is integral");
                (l2, inv.mul_vec(t))
            })
            .collect::<Vec<_>>();
        CrystGroup::from_generators(self.rank(), &gens)
    }
}

/// Removes translations from a finite group of affine torus maps: the
/// lattice is enlarged to `Λ = Z^n + {pure translations}` and coordinates
/// are rescaled so that `Λ` becomes `Z^n`.
pub fn reduce_translations(n: usize, action: &[AffineGenerator]) -> Result<Reduction> {
    reduce_translations_with_limit(n, action, DEFAULT_LIMIT)
}

pub fn reduce_translations_with_limit(n: usize, action: &[AffineGenerator], limit: usize) -> Result<Reduction> {
    if n == 0 {
        return Err(Error::ZeroRank);
    }
    // fail early if the linear parts are infinite
    let linear: Vec<IntMatrix> = action.iter().map(|(l, _)| l.clone()).collect();
    generate_closure(n, &linear, limit)?;

    // affine closure modulo Z^n
    let gens: Vec<AffineGenerator> = action
        .iter()
        .map(|(l, t)| (l.clone(), t.reduce_mod_one()))
        .collect();
    let start = (IntMatrix::identity(n), RatVector::zeros(n));
    let mut seen: HashMap<AffineGenerator, ()> = HashMap::from([(start.clone(), ())]);
    let mut queue = VecDeque::from([start]);
    let mut translations = Vec::new();
    while let Some((m, t)) = queue.pop_front() {
        if m.is_identity() && !t.is_zero() {
            translations.push(t.clone());
        }
        for (l, s) in &gens {
            let next = (m.mul(l), t.add(&m.mul_rat(s)).reduce_mod_one());
            if seen.contains_key(&next) {
                continue;
            }
            if seen.len() >= limit {
                return Err(Error::NotFinite { limit });
            }
            seen.insert(next.clone(), ());
            queue.push_back(next);
        }
    }

    let mut spanning: Vec<RatVector> = (0..n)
        .map(|i| {
            let mut e = RatVector::zeros(n);
            e[i] = BigRational::one();
            e
        })
        .collect();
    spanning.extend(translations);
    let basis = lattice_basis(n, &spanning);
    let inv = basis.inverse().expect("lattice basis is invertible");
    let new_gens = gens
        .iter()
        .map(|(l, t)| {
            let l2 = l
                .conjugate_by(&basis, &inv)
                .ok_or_else(|| Error::Internal("translation lattice is not invariant".into()))?;
            Ok((l2, inv.mul_vec(t)))
        })
        .collect::<Result<Vec<_>>>()?;
    let group = CrystGroup::from_generators_with_limit(n, &new_gens, limit)?;
    let relations = inv
        .to_integer()
        .ok_or_else(|| Error::Internal("Z^n is not contained in the enlarged lattice".into()))?;
    Ok(Reduction {
        group,
        basis,
        translation_quotient: FgaGroup::cokernel(&relations),
    })
}

//! Finite subgroups of `GL(n, Z)`: closure, multiplication tables,
//! conjugacy classes and character tables.

mod characters;

pub use characters::{multiplicity, CharacterTable};

use std::collections::{HashMap, VecDeque};

use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Default bound on the number of elements produced by [`generate_closure`].
pub const DEFAULT_LIMIT: usize = 10_000;

/// A finite group of unimodular integer matrices with its multiplication
/// table.
///
/// Element 0 is the identity; the remaining elements are sorted by the
/// ordering of [`IntMatrix`], so indices are reproducible across runs.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    rank: usize,
    elements: Vec<IntMatrix>,
    index: HashMap<IntMatrix, usize>,
    mult: Vec<u32>,
    inverse: Vec<usize>,
    generators: Vec<IntMatrix>,
    generator_elements: Vec<usize>,
    words: Vec<Vec<usize>>,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub members: Vec<usize>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Enumerates the group generated by `gens`, failing once more than `limit`
/// elements have been found.
pub fn generate_closure(n: usize, gens: &[IntMatrix], limit: usize) -> Result<FiniteMatrixGroup> {
    for (i, g) in gens.iter().enumerate() {
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "generator {i} is {}x{}, expected {n}x{n}",
                g.rows(),
                g.cols()
            )));
        }
        let det = g.det();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular {
                index: i,
                det: det.to_string(),
            });
        }
    }

    // breadth-first search by right multiplication; parent links give words
    let id = IntMatrix::identity(n);
    let mut found: Vec<IntMatrix> = vec![id.clone()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut seen: HashMap<IntMatrix, usize> = HashMap::from([(id, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (k, g) in gens.iter().enumerate() {
            let y = found[x].mul(g);
            if seen.contains_key(&y) {
                continue;
            }
            if found.len() >= limit {
                return Err(Error::NotFinite { limit });
            }
            seen.insert(y.clone(), found.len());
            queue.push_back(found.len());
            found.push(y);
            parent.push(Some((x, k)));
        }
    }

    // canonical order: identity first, the rest by matrix order
    let mut order: Vec<usize> = (1..found.len()).collect();
    order.sort_by(|&a, &b| found[a].cmp(&found[b]));
    order.insert(0, 0);
    let mut new_of_old = vec![0; found.len()];
    for (new, &old) in order.iter().enumerate() {
        new_of_old[old] = new;
    }
    let elements: Vec<IntMatrix> = order.iter().map(|&o| found[o].clone()).collect();
    let index: HashMap<IntMatrix, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let size = elements.len();

    // words in BFS order (parents come before children)
    let mut old_words: Vec<Vec<usize>> = vec![Vec::new(); size];
    for old in 1..size {
        let (p, k) = parent[old].expect("non-root has a parent");
        let mut w = old_words[p].clone();
        w.push(k);
        old_words[old] = w;
    }
    let words: Vec<Vec<usize>> = order.iter().map(|&o| old_words[o].clone()).collect();

    // right multiplication by each generator, then the full table
    let rmul: Vec<Vec<usize>> = (0..size)
        .map(|i| gens.iter().map(|g| index[&elements[i].mul(g)]).collect())
        .collect();
    let mut mult = vec![0u32; size * size];
    for old_j in 0..size {
        let j = new_of_old[old_j];
        match parent[old_j] {
            None => {
                for i in 0..size {
                    mult[i * size + j] = i as u32;
                }
            }
            Some((old_p, k)) => {
                let p = new_of_old[old_p];
                for i in 0..size {
                    let ip = mult[i * size + p] as usize;
                    mult[i * size + j] = rmul[ip][k] as u32;
                }
            }
        }
    }
    let mut inverse = vec![0; size];
    for i in 0..size {
        inverse[i] = (0..size)
            .find(|&j| mult[i * size + j] == 0)
            .expect("finite group elements are invertible");
    }
    let generator_elements = gens.iter().map(|g| index[g]).collect();

    let mut group = FiniteMatrixGroup {
        rank: n,
        elements,
        index,
        mult,
        inverse,
        generators: gens.to_vec(),
        generator_elements,
        words,
        classes: Vec::new(),
        class_of: Vec::new(),
    };
    group.compute_classes();
    Ok(group)
}

impl FiniteMatrixGroup {
    /// The trivial group acting on `Z^n`.
    pub fn trivial(n: usize) -> FiniteMatrixGroup {
        generate_closure(n, &[], 1).expect("trivial group")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &IntMatrix {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn index_of(&self, m: &IntMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn mult(&self, i: usize, j: usize) -> usize {
        self.mult[i * self.order() + j] as usize
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    /// Element index of the `k`-th input generator.
    pub fn generator_element(&self, k: usize) -> usize {
        self.generator_elements[k]
    }

    /// A word in the input generators whose product is element `i`.
    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    pub fn power(&self, i: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mult(acc, i))
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut x = i;
        let mut k = 1;
        while x != 0 {
            x = self.mult(x, i);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order()).fold(1, |acc, i| acc.lcm(&self.element_order(i)))
    }

    pub fn is_abelian(&self) -> bool {
        self.generator_elements.iter().all(|&a| {
            self.generator_elements
                .iter()
                .all(|&b| self.mult(a, b) == self.mult(b, a))
        })
    }

    /// Conjugacy classes ordered by their smallest element index; class 0 is
    /// the identity.
    pub fn conjugacy_classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Non-identity elements, in index order.
    pub fn non_identity(&self) -> std::ops::Range<usize> {
        1..self.order()
    }

    fn compute_classes(&mut self) {
        let size = self.order();
        let mut class_of = vec![usize::MAX; size];
        let mut classes = Vec::new();
        for x in 0..size {
            if class_of[x] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> = (0..size)
                .map(|g| self.mult(self.mult(g, x), self.inverse(g)))
                .collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = classes.len();
            }
            classes.push(ConjugacyClass {
                representative: x,
                members,
            });
        }
        self.classes = classes;
        self.class_of = class_of;
    }
}

/// Conjugacy classes of `g`; see [`FiniteMatrixGroup::conjugacy_classes`].
pub fn conjugacy_classes(g: &FiniteMatrixGroup) -> Vec<ConjugacyClass> {
    g.conjugacy_classes().to_vec()
}

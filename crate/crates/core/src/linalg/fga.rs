use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{IntMatrix, SmithForm};

/// Finitely generated abelian group `Z^g / R`, stored through the Smith
/// form of its relation matrix.
///
/// `invariant_factors` is the chain `d_1 | d_2 | ... ` with factors equal
/// to one dropped and free summands written as `0` at the end.
#[derive(Clone, Debug)]
pub struct FgaGroup {
    invariant_factors: Vec<BigInt>,
    positions: Vec<usize>,
    snf: Arc<SmithForm>,
}

/// Presents `Z^gens / rowspan(rels)`; `rels` must have `gens` columns.
pub fn fga_from_relations(gens: usize, rels: &IntMatrix) -> FgaGroup {
    assert_eq!(rels.cols(), gens, "relations must have one column per generator");
    FgaGroup::cokernel(&rels.transpose())
}

/// Order of an element given in factor coordinates; `None` for infinite order.
pub fn fga_element_order(g: &FgaGroup, coords: &[BigInt]) -> Option<BigInt> {
    g.element_order(coords)
}

/// Whether an element given in ambient (generator) coordinates is trivial.
pub fn fga_contains_zero_image(g: &FgaGroup, x: &[BigInt]) -> bool {
    g.is_zero_ambient(x)
}

impl FgaGroup {
    /// `Z^m / colspan(m)` for an `m x k` matrix whose columns are relations.
    pub fn cokernel(m: &IntMatrix) -> FgaGroup {
        let snf = SmithForm::compute(m);
        let mut torsion = Vec::new();
        let mut free = Vec::new();
        for i in 0..m.rows() {
            let d = snf.diagonal().get(i).cloned().unwrap_or_else(BigInt::zero);
            if i >= snf.rank() {
                free.push(i);
            } else if !d.is_one() {
                torsion.push((i, d));
            }
        }
        let mut invariant_factors: Vec<BigInt> = torsion.iter().map(|(_, d)| d.clone()).collect();
        let mut positions: Vec<usize> = torsion.iter().map(|(i, _)| *i).collect();
        invariant_factors.extend(free.iter().map(|_| BigInt::zero()));
        positions.extend(free);
        FgaGroup {
            invariant_factors,
            positions,
            snf: Arc::new(snf),
        }
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    /// Number of ambient generators.
    pub fn ambient_rank(&self) -> usize {
        self.snf.rows()
    }

    pub fn free_rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Group order, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            return None;
        }
        Some(self.invariant_factors.iter().product())
    }

    /// Subgroup of torsion elements, sharing this presentation.
    pub fn torsion_subgroup(&self) -> FgaGroup {
        let keep: Vec<usize> = (0..self.invariant_factors.len())
            .filter(|&i| !self.invariant_factors[i].is_zero())
            .collect();
        FgaGroup {
            invariant_factors: keep.iter().map(|&i| self.invariant_factors[i].clone()).collect(),
            positions: keep.iter().map(|&i| self.positions[i]).collect(),
            snf: self.snf.clone(),
        }
    }

    /// Raw coordinates `U x` on the free summands of the full cokernel.
    /// An ambient vector maps into the torsion subgroup iff these vanish.
    pub fn free_coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.transform(x);
        (self.snf.rank()..self.snf.rows()).map(|i| y[i].clone()).collect()
    }

    fn transform(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ambient_rank(), "ambient vector has wrong length");
        let mut y = x.to_vec();
        self.snf.apply_left(&mut y);
        y
    }

    /// Factor coordinates of an ambient vector, reduced modulo each factor.
    pub fn to_coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.transform(x);
        self.positions
            .iter()
            .zip(&self.invariant_factors)
            .map(|(&p, d)| {
                if d.is_zero() {
                    y[p].clone()
                } else {
                    y[p].mod_floor(d)
                }
            })
            .collect()
    }

    /// An ambient vector representing the given factor coordinates.
    pub fn representative(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.positions.len());
        let mut y = vec![BigInt::zero(); self.ambient_rank()];
        for (&p, c) in self.positions.iter().zip(coords) {
            y[p] = c.clone();
        }
        self.snf.apply_left_inverse(&mut y);
        y
    }

    /// Least `m >= 1` with `m * x = 0`, `None` if `x` has infinite order.
    pub fn element_order(&self, coords: &[BigInt]) -> Option<BigInt> {
        assert_eq!(coords.len(), self.invariant_factors.len());
        let mut order = BigInt::one();
        for (c, d) in coords.iter().zip(&self.invariant_factors) {
            if d.is_zero() {
                if !c.is_zero() {
                    return None;
                }
                continue;
            }
            let c = c.mod_floor(d);
            order = order.lcm(&(d / c.gcd(d)));
        }
        Some(order)
    }

    pub fn is_zero_coords(&self, coords: &[BigInt]) -> bool {
        coords
            .iter()
            .zip(&self.invariant_factors)
            .all(|(c, d)| if d.is_zero() { c.is_zero() } else { c.is_multiple_of(d) })
    }

    pub fn is_zero_ambient(&self, x: &[BigInt]) -> bool {
        self.is_zero_coords(&self.to_coords(x))
    }

    pub fn order_of_ambient(&self, x: &[BigInt]) -> Option<BigInt> {
        self.element_order(&self.to_coords(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn cyclic_two() {
        let g = fga_from_relations(1, &IntMatrix::from_rows(&[vec![2]]));
        assert_eq!(g.invariant_factors(), &ints(&[2])[..]);
        assert_eq!(fga_element_order(&g, &ints(&[1])), Some(2.into()));
        assert_eq!(fga_element_order(&g, &ints(&[0])), Some(1.into()));
        assert!(fga_contains_zero_image(&g, &ints(&[2])));
    }

    #[test]
    fn free_rank_two() {
        let g = fga_from_relations(2, &IntMatrix::zeros(0, 2));
        assert_eq!(g.invariant_factors(), &ints(&[0, 0])[..]);
        assert_eq!(g.order(), None);
        assert_eq!(g.order_of_ambient(&ints(&[1, 0])), None);
        assert!(g.is_zero_ambient(&ints(&[0, 0])));
    }

    #[test]
    fn two_plus_three_is_six() {
        let g = fga_from_relations(2, &IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(g.invariant_factors(), &ints(&[6])[..]);
        assert_eq!(g.order_of_ambient(&ints(&[1, 1])), Some(6.into()));
        assert_eq!(g.order_of_ambient(&ints(&[1, 0])), Some(2.into()));
        assert_eq!(g.order(), Some(6.into()));
    }

    #[test]
    fn three_in_z6_is_nonzero() {
        let g = fga_from_relations(1, &IntMatrix::from_rows(&[vec![6]]));
        assert!(!fga_contains_zero_image(&g, &ints(&[3])));
        assert!(fga_contains_zero_image(&g, &ints(&[12])));
    }

    #[test]
    fn representative_round_trip() {
        let g = fga_from_relations(3, &IntMatrix::from_rows(&[vec![2, 4, 0], vec![0, 6, 3]]));
        for c in [ints(&[1, 0]), ints(&[0, 5]), ints(&[1, 1])] {
            let c = if g.invariant_factors().len() == c.len() { c } else { continue };
            let x = g.representative(&c);
            let back = g.to_coords(&x);
            assert!(g.is_zero_coords(
                &back.iter().zip(&c).map(|(a, b)| a - b).collect::<Vec<_>>()
            ));
        }
    }

    #[test]
    fn order_is_abs_det() {
        let rels = IntMatrix::from_rows(&[vec![4, 1, 0], vec![2, 3, 1], vec![0, 0, 5]]);
        let g = fga_from_relations(3, &rels);
        assert_eq!(g.order(), Some(num_traits::Signed::abs(&rels.det())));
    }
}

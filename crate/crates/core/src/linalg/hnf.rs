use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{IntMatrix, RatMatrix, RatVector};

/// Row-style Hermite normal form of the row lattice of `m`.
///
/// The result has no zero rows, strictly increasing pivot columns, positive
/// pivots, and entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(m: &IntMatrix) -> IntMatrix {
    let cols = m.cols();
    let mut rows = m.to_rows();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        loop {
            let Some(p) = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()))
            else {
                break;
            };
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (top, bottom) = rows.split_at_mut(i);
                for (x, y) in bottom[0].iter_mut().zip(&top[r]) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            for i in 0..r {
                let q = rows[i][c].div_floor(&rows[r][c]);
                if q.is_zero() {
                    continue;
                }
                let (top, bottom) = rows.split_at_mut(r);
                for (x, y) in top[i].iter_mut().zip(&bottom[0]) {
                    *x -= &q * y;
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    IntMatrix::try_from_rows(rows, cols).expect("rows have equal length")
}

/// Basis (as matrix columns) of the Z-span of rational vectors in `Q^n`.
pub fn lattice_basis(n: usize, gens: &[RatVector]) -> RatMatrix {
    let den = gens
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(&v.denominator()));
    let scale = BigRational::from_integer(den.clone());
    let int_rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|v| {
            assert_eq!(v.len(), n);
            v.iter().map(|x| (x * &scale).to_integer()).collect()
        })
        .collect();
    let h = hermite_rows(&IntMatrix::try_from_rows(int_rows, n).expect("rectangular"));
    let cols: Vec<RatVector> = (0..h.rows())
        .map(|i| {
            RatVector(
                h.row(i)
                    .iter()
                    .map(|x| BigRational::new(x.clone(), den.clone()))
                    .collect(),
            )
        })
        .collect();
    RatMatrix::from_columns(n, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_basis_of_overlattice() {
        let mut gens: Vec<RatVector> = (0..2)
            .map(|i| {
                let mut v = RatVector::zeros(2);
                v[i] = BigRational::one();
                v
            })
            .collect();
        gens.push(RatVector::from_fractions(&[(1, 2), (1, 2)]));
        let b = lattice_basis(2, &gens);
        assert_eq!(b.cols(), 2);
        // index of Z^2 in the lattice is 2
        assert_eq!(b.det().abs(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn hermite_rows_shape() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![3, 6], vec![0, 5]]);
        let h = hermite_rows(&m);
        assert_eq!(h, IntMatrix::from_rows(&[vec![1, 2], vec![0, 5]]));
    }
}

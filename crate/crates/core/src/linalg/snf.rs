use std::ops::{AddAssign, Mul, Neg, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Elementary operation on rows (or columns) of the matrix being reduced.
#[derive(Clone, Debug)]
enum ElemOp {
    Swap(usize, usize),
    /// `line[dst] += k * line[src]`
    AddMul { dst: usize, src: usize, k: BigInt },
    Neg(usize),
}

/// Smith normal form `U * A * V = D`.
///
/// The unimodular transforms are kept as transcripts of elementary
/// operations so that large cochain matrices never need a dense `U`; use
/// [`SmithForm::left`] / [`SmithForm::right`] to materialize them.
#[derive(Clone, Debug)]
pub struct SmithForm {
    rows: usize,
    cols: usize,
    diag: Vec<BigInt>,
    rank: usize,
    row_ops: Vec<ElemOp>,
    col_ops: Vec<ElemOp>,
}

/// Convenience wrapper returning `(U, D, V)` with `U * A * V = D`.
pub fn smith_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let s = SmithForm::compute(a);
    (s.left(), s.diagonal_matrix(), s.right())
}

impl SmithForm {
    pub fn compute(a: &IntMatrix) -> Self {
        let (r, c) = (a.rows(), a.cols());
        let mut m = a.to_rows();
        let mut row_ops = Vec::new();
        let mut col_ops = Vec::new();
        let mut t = 0;
        while t < r.min(c) {
            let Some((pi, pj)) = min_nonzero(&m, t) else {
                break;
            };
            if pi != t {
                m.swap(pi, t);
                row_ops.push(ElemOp::Swap(pi, t));
            }
            if pj != t {
                for row in m.iter_mut() {
                    row.swap(pj, t);
                }
                col_ops.push(ElemOp::Swap(pj, t));
            }
            loop {
                let mut clean = true;
                for i in t + 1..r {
                    if m[i][t].is_zero() {
                        continue;
                    }
                    let q = m[i][t].div_floor(&m[t][t]);
                    if !q.is_zero() {
                        let (top, bottom) = m.split_at_mut(i);
                        for (x, p) in bottom[0][t..].iter_mut().zip(&top[t][t..]) {
                            if !p.is_zero() {
                                *x -= &q * p;
                            }
                        }
                        row_ops.push(ElemOp::AddMul { dst: i, src: t, k: -q });
                    }
                    if !m[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..c {
                    if m[t][j].is_zero() {
                        continue;
                    }
                    let q = m[t][j].div_floor(&m[t][t]);
                    if !q.is_zero() {
                        for row in m.iter_mut().skip(t) {
                            if !row[t].is_zero() {
                                let d = &q * &row[t];
                                row[j] -= d;
                            }
                        }
                        col_ops.push(ElemOp::AddMul { dst: j, src: t, k: -q });
                    }
                    if !m[t][j].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    // Bring the smallest remainder of row/column t to the pivot.
                    let mut best: Option<(bool, usize)> = None;
                    let mut best_abs = m[t][t].abs();
                    for i in t + 1..r {
                        if !m[i][t].is_zero() && m[i][t].abs() < best_abs {
                            best_abs = m[i][t].abs();
                            best = Some((true, i));
                        }
                    }
                    for j in t + 1..c {
                        if !m[t][j].is_zero() && m[t][j].abs() < best_abs {
                            best_abs = m[t][j].abs();
                            best = Some((false, j));
                        }
                    }
                    match best {
                        Some((true, i)) => {
                            m.swap(i, t);
                            row_ops.push(ElemOp::Swap(i, t));
                        }
                        Some((false, j)) => {
                            for row in m.iter_mut() {
                                row.swap(j, t);
                            }
                            col_ops.push(ElemOp::Swap(j, t));
                        }
                        None => unreachable!("remainders are smaller than the pivot"),
                    }
                    continue;
                }
                // Row and column are clear; enforce divisibility of the rest.
                let bad = (t + 1..r).find(|&i| {
                    m[i][t + 1..]
                        .iter()
                        .any(|x| !x.is_zero() && !x.is_multiple_of(&m[t][t]))
                });
                match bad {
                    Some(i) => {
                        let (top, bottom) = m.split_at_mut(i);
                        for (x, y) in top[t][t..].iter_mut().zip(&bottom[0][t..]) {
                            *x += y;
                        }
                        row_ops.push(ElemOp::AddMul {
                            dst: t,
                            src: i,
                            k: BigInt::one(),
                        });
                    }
                    None => break,
                }
            }
            if m[t][t].is_negative() {
                for x in m[t].iter_mut() {
                    *x = -std::mem::take(x);
                }
                row_ops.push(ElemOp::Neg(t));
            }
            t += 1;
        }
        let diag = (0..r.min(c)).map(|i| m[i][i].clone()).collect::<Vec<_>>();
        SmithForm {
            rows: r,
            cols: c,
            diag,
            rank: t,
            row_ops,
            col_ops,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Diagonal entries `d_1 | d_2 | ...` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> &[BigInt] {
        &self.diag
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.rows, self.cols);
        for (i, x) in self.diag.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }

    /// `x <- U x`.
    pub fn apply_left<T: Line>(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.rows);
        for op in &self.row_ops {
            apply_forward(op, x);
        }
    }

    /// `x <- U^-1 x`.
    pub fn apply_left_inverse<T: Line>(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.rows);
        for op in self.row_ops.iter().rev() {
            match op {
                ElemOp::Swap(i, j) => x.swap(*i, *j),
                ElemOp::Neg(i) => x[*i] = -x[*i].clone(),
                ElemOp::AddMul { dst, src, k } => {
                    let d = x[*src].clone() * k.clone();
                    x[*dst] -= d;
                }
            }
        }
    }

    /// `y <- V y`.
    pub fn apply_right<T: Line>(&self, y: &mut [T]) {
        assert_eq!(y.len(), self.cols);
        // V = E_1 E_2 ... E_k, so apply E_k first. The column operation
        // `col[dst] += k col[src]` is E = I + k e_src e_dst^T.
        for op in self.col_ops.iter().rev() {
            match op {
                ElemOp::Swap(i, j) => y.swap(*i, *j),
                ElemOp::Neg(i) => y[*i] = -y[*i].clone(),
                ElemOp::AddMul { dst, src, k } => {
                    let d = y[*dst].clone() * k.clone();
                    y[*src] += d;
                }
            }
        }
    }

    /// `y <- V^-1 y`.
    pub fn apply_right_inverse<T: Line>(&self, y: &mut [T]) {
        assert_eq!(y.len(), self.cols);
        for op in &self.col_ops {
            match op {
                ElemOp::Swap(i, j) => y.swap(*i, *j),
                ElemOp::Neg(i) => y[*i] = -y[*i].clone(),
                ElemOp::AddMul { dst, src, k } => {
                    let d = y[*dst].clone() * k.clone();
                    y[*src] -= d;
                }
            }
        }
    }

    pub fn left(&self) -> IntMatrix {
        let mut rows: Vec<Row> = IntMatrix::identity(self.rows)
            .to_rows()
            .into_iter()
            .map(Row)
            .collect();
        for op in &self.row_ops {
            apply_forward(op, &mut rows);
        }
        IntMatrix::try_from_rows(rows.into_iter().map(|r| r.0).collect(), self.rows)
            .expect("square")
    }

    pub fn right(&self) -> IntMatrix {
        let mut v = IntMatrix::identity(self.cols);
        for op in &self.col_ops {
            match op {
                ElemOp::Swap(i, j) => {
                    for r in 0..self.cols {
                        let a = v[(r, *i)].clone();
                        v[(r, *i)] = v[(r, *j)].clone();
                        v[(r, *j)] = a;
                    }
                }
                ElemOp::Neg(i) => {
                    for r in 0..self.cols {
                        v[(r, *i)] = -v[(r, *i)].clone();
                    }
                }
                ElemOp::AddMul { dst, src, k } => {
                    for r in 0..self.cols {
                        let d = &v[(r, *src)] * k;
                        v[(r, *dst)] += d;
                    }
                }
            }
        }
        v
    }

    /// Column `j` of `V`.
    pub fn right_column(&self, j: usize) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); self.cols];
        e[j] = BigInt::one();
        self.apply_right(&mut e);
        e
    }
}

/// Entry type that elementary operations can act on: integers, rationals,
/// or whole matrix rows.
pub trait Line: Clone + Neg<Output = Self> + AddAssign + SubAssign + Mul<BigInt, Output = Self> {}

impl<T> Line for T where
    T: Clone + Neg<Output = T> + AddAssign + SubAssign + Mul<BigInt, Output = T>
{
}

fn apply_forward<T: Line>(op: &ElemOp, x: &mut [T]) {
    match op {
        ElemOp::Swap(i, j) => x.swap(*i, *j),
        ElemOp::Neg(i) => x[*i] = -x[*i].clone(),
        ElemOp::AddMul { dst, src, k } => {
            let d = x[*src].clone() * k.clone();
            x[*dst] += d;
        }
    }
}

fn min_nonzero(m: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| &a < b) {
                let one = a.is_one();
                best = Some((i, j, a));
                if one {
                    return best.map(|(i, j, _)| (i, j));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

// Rows of a matrix are lines too, which lets `left()` reuse the replay.
impl Mul<BigInt> for Row {
    type Output = Row;
    fn mul(self, k: BigInt) -> Row {
        Row(self.0.into_iter().map(|x| x * &k).collect())
    }
}

#[derive(Clone)]
struct Row(Vec<BigInt>);

impl Neg for Row {
    type Output = Row;
    fn neg(self) -> Row {
        Row(self.0.into_iter().map(|x| -x).collect())
    }
}

impl AddAssign for Row {
    fn add_assign(&mut self, o: Row) {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
    }
}

impl SubAssign for Row {
    fn sub_assign(&mut self, o: Row) {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a -= b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &IntMatrix) {
        let s = SmithForm::compute(a);
        let (u, d, v) = (s.left(), s.diagonal_matrix(), s.right());
        assert_eq!(u.mul(a).mul(&v), d, "U A V != D for {a:?}");
        assert!(u.det().abs().is_one());
        assert!(v.det().abs().is_one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]), "divisibility fails: {diag:?}");
            } else {
                assert!(diag.iter().skip_while(|x| !x.is_zero()).all(Zero::is_zero));
            }
        }
        assert!(diag.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn diag_2_3() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let s = SmithForm::compute(&a);
        assert_eq!(s.diagonal(), &[BigInt::from(1), BigInt::from(6)]);
        check(&a);
    }

    #[test]
    fn identity_and_zero() {
        let i = IntMatrix::identity(3);
        let (u, d, v) = smith_normal_form(&i);
        assert_eq!(d, i);
        assert_eq!(u.mul(&i).mul(&v), d);
        let z = IntMatrix::zeros(1, 1);
        let (_, d, _) = smith_normal_form(&z);
        assert_eq!(d, z);
    }

    #[test]
    fn replay_matches_materialized() {
        let a = IntMatrix::from_rows(&[vec![4, 6, 2], vec![2, 8, -2], vec![6, 2, 10]]);
        let s = SmithForm::compute(&a);
        let x: Vec<BigInt> = vec![3.into(), (-1).into(), 7.into()];
        let mut ux = x.clone();
        s.apply_left(&mut ux);
        assert_eq!(ux, s.left().mul_vec(&x));
        s.apply_left_inverse(&mut ux);
        assert_eq!(ux, x);
        let mut vx = x.clone();
        s.apply_right(&mut vx);
        assert_eq!(vx, s.right().mul_vec(&x));
        s.apply_right_inverse(&mut vx);
        assert_eq!(vx, x);
    }

    proptest! {
        #[test]
        fn random_matrices(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-9i64..10, 16)) {
            let a = IntMatrix::from_fn(rows, cols, |i, j| BigInt::from(seed[i * 4 + j]));
            check(&a);
        }
    }
}

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from explicit rows. `cols` is needed so that a matrix
    /// with zero rows still knows its width.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r);
        }
        Ok(IntMatrix { rows: nrows, cols, data })
    }

    pub fn from_i64(cols: usize, rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(cols, rows).expect("rows of equal width")
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · v`.
    pub fn apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn rank(&self) -> usize {
        hermite_rows(self.row_vecs(), self.cols).len()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        Ok(determinant(self.row_vecs()))
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && determinant(self.row_vecs()).abs().is_one()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q · row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * q;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += q · col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * q;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Bareiss determinant of a square matrix given by rows.
pub(crate) fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result has no zero rows, strictly increasing pivot columns, positive
/// pivots, zeros below each pivot and entries above each pivot reduced into
/// `[0, pivot)`. That representation is unique for the lattice.
pub fn hermite_rows(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let mut has_pivot = false;
        loop {
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let Some(best) = best else { break };
            has_pivot = true;
            rows.swap(r, best);
            let mut cleared = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    cleared = false;
                }
            }
            if cleared {
                break;
            }
        }
        if !has_pivot {
            continue;
        }
        if rows[r][c].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = rows[i][c].div_floor(&rows[r][c]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(r);
            for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Smith normal form `U · A · V = D` together with `V⁻¹`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols())).map(|i| self.d[(i, i)].clone()).take_while(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    // Column operations on D are mirrored on V, and their inverses as row
    // operations on V⁻¹.
    let swap_cols = |d: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, a: usize, b: usize| {
        d.swap_cols(a, b);
        v.swap_cols(a, b);
        vi.swap_rows(a, b);
    };
    let add_col = |d: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, dst: usize, src: usize, q: &BigInt| {
        d.add_col(dst, src, q);
        v.add_col(dst, src, q);
        vi.add_row(src, dst, &-q);
    };

    for t in 0..m.min(n) {
        let start = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !d[(i, j)].is_zero())
            .min_by(|&x, &y| d[x].abs().cmp(&d[y].abs()));
        let Some((pi, pj)) = start else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        swap_cols(&mut d, &mut v, &mut v_inv, t, pj);

        loop {
            let best_row =
                (t..m).filter(|&i| !d[(i, t)].is_zero()).min_by(|&x, &y| d[(x, t)].abs().cmp(&d[(y, t)].abs()));
            let best_col =
                (t..n).filter(|&j| !d[(t, j)].is_zero()).min_by(|&x, &y| d[(t, x)].abs().cmp(&d[(t, y)].abs()));
            match (best_row, best_col) {
                (Some(i), Some(j)) => {
                    if d[(i, t)].abs() <= d[(t, j)].abs() {
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                    } else {
                        swap_cols(&mut d, &mut v, &mut v_inv, t, j);
                    }
                }
                (Some(i), None) => {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                }
                (None, Some(j)) => swap_cols(&mut d, &mut v, &mut v_inv, t, j),
                (None, None) => unreachable!("pivot block cannot vanish"),
            }

            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                add_col(&mut d, &mut v, &mut v_inv, j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let p = d[(t, t)].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&d[(i, j)] % &p).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { d, u, v, v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_of(s: &SmithForm) -> Vec<i64> {
        s.invariants().iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    fn check_factorization(a: &IntMatrix, s: &SmithForm) {
        let lhs = s.u.mul(a).unwrap().mul(&s.v).unwrap();
        assert_eq!(lhs, s.d);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.ncols()));
        let inv = s.invariants();
        for w in inv.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        for i in 0..s.d.nrows() {
            for j in 0..s.d.ncols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn smith_of_diag_2_3() {
        let a = IntMatrix::from_i64(2, &[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(diag_of(&s), vec![1, 6]);
        check_factorization(&a, &s);
    }

    #[test]
    fn smith_of_identity_and_scalar() {
        let id = IntMatrix::identity(2);
        assert_eq!(diag_of(&smith_normal_form(&id)), vec![1, 1]);
        let two = IntMatrix::from_i64(2, &[&[2, 0], &[0, 2]]);
        assert_eq!(diag_of(&smith_normal_form(&two)), vec![2, 2]);
    }

    #[test]
    fn smith_of_rectangular_and_zero() {
        let a = IntMatrix::from_i64(3, &[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&a);
        assert_eq!(diag_of(&s), vec![2, 6, 12]);
        check_factorization(&a, &s);

        let r = IntMatrix::from_i64(3, &[&[1, 1, 1], &[2, 2, 2]]);
        let s = smith_normal_form(&r);
        assert_eq!(diag_of(&s), vec![1]);
        check_factorization(&r, &s);

        let z = IntMatrix::zeros(2, 3);
        assert!(smith_normal_form(&z).invariants().is_empty());
    }

    #[test]
    fn hermite_drops_dependent_rows() {
        let rows = IntMatrix::from_i64(2, &[&[2, 0], &[0, 2], &[2, 2]]).row_vecs();
        let h = hermite_rows(rows, 2);
        assert_eq!(h, IntMatrix::from_i64(2, &[&[2, 0], &[0, 2]]).row_vecs());
    }

    #[test]
    fn hermite_reduces_above_pivot() {
        let rows = IntMatrix::from_i64(2, &[&[1, 1], &[1, -1]]).row_vecs();
        let h = hermite_rows(rows, 2);
        assert_eq!(h, IntMatrix::from_i64(2, &[&[1, 1], &[0, 2]]).row_vecs());
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let a = IntMatrix::from_i64(3, &[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        // 2(3·-2 - 4·5) + 1(1·-2 - 0) = -52 - 2
        assert_eq!(a.determinant().unwrap(), BigInt::from(-54));
    }
}

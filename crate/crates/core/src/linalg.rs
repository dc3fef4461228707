//! Dense exact integer matrices, Smith normal form and lattice quotients.
//!
//! Everything here is generic over [`Int`], so the same code runs over
//! `i64`, `i128` or `BigInt`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact integer scalar.
pub trait Int: Integer + Signed + Clone + fmt::Debug + fmt::Display + From<i32> {}

impl<T> Int for T where T: Integer + Signed + Clone + fmt::Debug + fmt::Display + From<i32> {}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<i64>;
pub type BigMatrix = Matrix<BigInt>;

impl<T: Int> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row.iter().cloned());
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
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

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<U: Int>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[(i, j)].clone() * a[(k, k)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                    a[(i, j)] = v / prev.clone();
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        smith(self).invariant_factors.len()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &T) {
        for j in 0..self.cols {
            let v = self[(src, j)].clone() * c.clone();
            self[(dst, j)] = self[(dst, j)].clone() + v;
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &T) {
        for i in 0..self.rows {
            let v = self[(i, src)].clone() * c.clone();
            self[(i, dst)] = self[(i, dst)].clone() + v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }

    /// Inverse of a unimodular matrix, or `None` if the determinant is not ±1.
    pub fn unimodular_inverse(&self) -> Option<Self> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let d = self.det();
        if !d.abs().is_one() {
            return None;
        }
        let a = rational_inverse(self)?;
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = &a[i][j];
                debug_assert!(x.is_integer());
                inv[(i, j)] = x.to_integer();
            }
        }
        Some(inv)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                write!(f, " {:?}", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `u * a * v = d` with `d` diagonal, `u`, `v` unimodular and each
/// nonzero diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith<T> {
    pub u: Matrix<T>,
    pub v: Matrix<T>,
    pub d: Matrix<T>,
    /// Nonzero diagonal entries of `d`, positive, in divisibility order.
    pub invariant_factors: Vec<T>,
}

pub fn smith<T: Int>(a: &Matrix<T>) -> Smith<T> {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut v = Matrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[(i, j)].is_zero() && best.map_or(true, |(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &-q.clone());
                u.add_row(i, t, &-q);
                if !d[(i, t)].is_zero() {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col(j, t, &-q.clone());
                v.add_col(j, t, &-q);
                if !d[(t, j)].is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the rest of the block
            let mut fix = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !d[(i, j)].mod_floor(&d[(t, t)]).is_zero() {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    d.add_row(t, i, &T::one());
                    u.add_row(t, i, &T::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let invariant_factors = (0..m.min(n)).map(|i| d[(i, i)].clone()).filter(|x| !x.is_zero()).collect();
    Smith { u, v, d, invariant_factors }
}

/// The finitely generated abelian group `Z^n / (column span of a)`,
/// with coordinates adapted to its Smith form.
#[derive(Clone, Debug)]
pub struct LatticeQuotient<T> {
    pub ambient_dim: usize,
    /// Moduli of the coordinates; `0` marks a free coordinate.
    pub moduli: Vec<T>,
    /// `u` from the Smith form; `reduce(x) = u * x` taken coordinatewise mod `moduli`.
    u: Matrix<T>,
    u_inv: Matrix<T>,
}

impl<T: Int> LatticeQuotient<T> {
    pub fn new(relations: &Matrix<T>) -> Self {
        let s = smith(relations);
        let n = relations.rows();
        let mut moduli = vec![T::zero(); n];
        for (i, f) in s.invariant_factors.iter().enumerate() {
            moduli[i] = f.clone();
        }
        let u_inv = s.u.unimodular_inverse().expect("Smith transform is unimodular");
        LatticeQuotient { ambient_dim: n, moduli, u: s.u, u_inv }
    }

    /// Nontrivial invariant factors (torsion) in divisibility order.
    pub fn torsion(&self) -> Vec<T> {
        self.moduli.iter().filter(|m| !m.is_zero() && !m.is_one()).cloned().collect()
    }

    pub fn free_rank(&self) -> usize {
        self.moduli.iter().filter(|m| m.is_zero()).count()
    }

    /// Order if finite.
    pub fn order(&self) -> Option<T> {
        if self.free_rank() > 0 {
            None
        } else {
            Some(self.moduli.iter().fold(T::one(), |a, b| a * b.clone()))
        }
    }

    /// Canonical coordinates of the class of `x`.
    pub fn reduce(&self, x: &[T]) -> Vec<T> {
        let y = self.u.mul_vec(x);
        y.into_iter().zip(self.moduli.iter()).map(|(c, m)| if m.is_zero() { c } else { c.mod_floor(m) }).collect()
    }

    pub fn is_zero(&self, x: &[T]) -> bool {
        self.reduce(x).iter().all(|c| c.is_zero())
    }

    /// A lattice vector whose class has the given canonical coordinates.
    pub fn lift(&self, coords: &[T]) -> Vec<T> {
        self.u_inv.mul_vec(coords)
    }

    /// Lifts of generators of the nontrivial cyclic factors (torsion and free).
    pub fn generator_lifts(&self) -> Vec<Vec<T>> {
        (0..self.ambient_dim)
            .filter(|&i| !self.moduli[i].is_one())
            .map(|i| {
                let mut e = vec![T::zero(); self.ambient_dim];
                e[i] = T::one();
                self.lift(&e)
            })
            .collect()
    }
}

/// Inverse over the rationals, rows of the result.
pub fn rational_inverse<T: Int>(a: &Matrix<T>) -> Option<Vec<Vec<Ratio<T>>>> {
    let n = a.rows();
    if n != a.cols() {
        return None;
    }
    let mut m: Vec<Vec<Ratio<T>>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        Ratio::from_integer(a[(i, j)].clone())
                    } else if j - n == i {
                        Ratio::one()
                    } else {
                        Ratio::zero()
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(p, c);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = x.clone() / piv.clone();
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let v = m[c][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Invariant factors of `span(sup) / span(sub)`; `sub` must lie in `span(sup)`
/// and have full rank in it.
pub fn index_structure<T: Int>(sup: &Matrix<T>, sub: &Matrix<T>) -> Option<Vec<T>> {
    // basis of span(sup)
    let s = smith(sup);
    let u_inv = s.u.unimodular_inverse()?;
    let k = s.invariant_factors.len();
    let mut cols = Vec::new();
    for i in 0..k {
        cols.push(u_inv.col(i).into_iter().map(|x| x * s.invariant_factors[i].clone()).collect::<Vec<T>>());
    }
    let basis = Matrix::from_cols(sup.rows(), &cols);
    let mut coords = Vec::new();
    for j in 0..sub.cols() {
        coords.push(solve_integer(&basis, &sub.col(j))?);
    }
    let x = Matrix::from_cols(k, &coords);
    let sx = smith(&x);
    if sx.invariant_factors.len() != k {
        return None;
    }
    Some(sx.invariant_factors.into_iter().filter(|f| !f.is_one()).collect())
}

/// Some integer solution of `a x = b`, if one exists.
pub fn solve_integer<T: Int>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    assert_eq!(a.rows(), b.len());
    let s = smith(a);
    // d (v^-1 x) = u b
    let c = s.u.mul_vec(b);
    let n = a.cols();
    let mut y = vec![T::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        let di = if i < n { s.d[(i, i)].clone() } else { T::zero() };
        if di.is_zero() {
            if !ci.is_zero() {
                return None;
            }
        } else {
            let (q, r) = ci.div_mod_floor(&di);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Basis of the rational kernel of `a`, scaled to integer vectors.
pub fn integer_kernel<T: Int>(a: &Matrix<T>) -> Vec<Vec<T>> {
    let s = smith(a);
    let r = s.invariant_factors.len();
    (r..a.cols()).map(|j| s.v.col(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn smith_of_a2_cartan() {
        let a = m(&[&[2, -1], &[-1, 2]]);
        let s = smith(&a);
        assert_eq!(s.invariant_factors, vec![1, 3]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn smith_rectangular_and_divisibility() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.invariant_factors, vec![2, 6, 12]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn det_bareiss() {
        assert_eq!(m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]).det(), 4);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), -1);
    }

    #[test]
    fn quotient_reduce_and_lift() {
        let q = LatticeQuotient::new(&m(&[&[2, -1], &[-1, 2]]));
        assert_eq!(q.order(), Some(3));
        let g = q.generator_lifts();
        assert_eq!(g.len(), 1);
        let c = q.reduce(&g[0]);
        assert_eq!(q.reduce(&q.lift(&c)), c);
        assert!(q.is_zero(&[2, -1]));
        assert!(!q.is_zero(&[1, 0]));
    }

    #[test]
    fn solve_and_kernel() {
        let a = m(&[&[2, 0], &[0, 3]]);
        assert_eq!(solve_integer(&a, &[4, 9]), Some(vec![2, 3]));
        assert_eq!(solve_integer(&a, &[1, 0]), None);
        let k = integer_kernel(&m(&[&[1, -1, 0]]));
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(v[0], v[1]);
        }
    }

    #[test]
    fn bigint_scalar() {
        let a: BigMatrix = m(&[&[2, -1], &[-1, 2]]).map(|x| BigInt::from(*x));
        assert_eq!(a.det(), BigInt::from(3));
    }
}

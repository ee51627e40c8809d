//! Dense and sparse integer matrix reductions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("integer overflow during reduction")]
    Overflow,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

fn add(a: i64, b: i64) -> Result<i64, LinalgError> {
    a.checked_add(b).ok_or(LinalgError::Overflow)
}

fn mul(a: i64, b: i64) -> Result<i64, LinalgError> {
    a.checked_mul(b).ok_or(LinalgError::Overflow)
}

/// Row-major dense integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a `rows x cols` matrix; every row must have length `cols`.
    pub fn from_rows(rows: usize, cols: usize, data: &[Vec<i64>]) -> Result<Self, LinalgError> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Dimension(format!("expected {rows}x{cols}")));
        }
        Ok(Self {
            rows,
            cols,
            data: data.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = add(out.get(i, j), mul(a, other.get(k, j))?)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .try_fold(0i64, |acc, (&a, &b)| add(acc, mul(a, b)?))
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::Dimension("row counts differ".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<(), LinalgError> {
        if k == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let v = add(self.get(dst, j), mul(k, self.get(src, j))?)?;
            self.set(dst, j, v);
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<(), LinalgError> {
        if k == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let v = add(self.get(i, dst), mul(k, self.get(i, src))?)?;
            self.set(i, dst, v);
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self.data[i * self.cols + j] = -self.data[i * self.cols + j];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self.data[i * self.cols + j] = -self.data[i * self.cols + j];
        }
    }
}

/// `u * a * v == d` with `d` diagonal, `d[i] | d[i+1]`, all positive up to `rank`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.rank).map(|i| self.d.get(i, i)).collect()
    }
}

/// Tracks row operations on `u` (and their inverses on `u_inv`) and column
/// operations on `v` (and inverses on `v_inv`).
struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<(), LinalgError> {
        self.a.add_row(dst, src, k)?;
        self.u.add_row(dst, src, k)?;
        self.u_inv.add_col(src, dst, -k)
    }

    fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<(), LinalgError> {
        self.a.add_col(dst, src, k)?;
        self.v.add_col(dst, src, k)?;
        self.v_inv.add_row(src, dst, -k)
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

/// Smith normal form with both transforms and their inverses.
pub fn smith(a: &IntMatrix) -> Result<Smith, LinalgError> {
    let (m, n) = (a.rows, a.cols);
    let mut r = Reducer {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&r.a, t) else {
            break;
        };
        r.swap_rows(t, pi);
        r.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..m {
                let x = r.a.get(i, t);
                if x != 0 {
                    let q = x.div_euclid(r.a.get(t, t));
                    r.add_row(i, t, -q)?;
                    if r.a.get(i, t) != 0 {
                        changed = true;
                    }
                }
            }
            for j in t + 1..n {
                let x = r.a.get(t, j);
                if x != 0 {
                    let q = x.div_euclid(r.a.get(t, t));
                    r.add_col(j, t, -q)?;
                    if r.a.get(t, j) != 0 {
                        changed = true;
                    }
                }
            }
            if changed {
                let (pi, pj) = min_abs_in_cross(&r.a, t);
                r.swap_rows(t, pi);
                r.swap_cols(t, pj);
                continue;
            }
            let p = r.a.get(t, t);
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| r.a.get(i, j) % p != 0));
            match bad {
                Some(i) => r.add_row(t, i, 1)?,
                None => break,
            }
        }
        if r.a.get(t, t) < 0 {
            r.negate_row(t);
        }
        t += 1;
    }
    Ok(Smith {
        d: r.a,
        u: r.u,
        u_inv: r.u_inv,
        v: r.v,
        v_inv: r.v_inv,
        rank: t,
    })
}

fn min_abs_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i64, usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.get(i, j).abs();
            if x != 0 && best.is_none_or(|(b, _, _)| x < b) {
                best = Some((x, i, j));
                if x == 1 {
                    return Some((i, j));
                }
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Smallest nonzero entry in row `t` or column `t` at or after the pivot.
fn min_abs_in_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (a.get(t, t).abs(), t, t);
    for i in t + 1..a.rows {
        let x = a.get(i, t).abs();
        if x != 0 && (best.0 == 0 || x < best.0) {
            best = (x, i, t);
        }
    }
    for j in t + 1..a.cols {
        let x = a.get(t, j).abs();
        if x != 0 && (best.0 == 0 || x < best.0) {
            best = (x, t, j);
        }
    }
    (best.1, best.2)
}

pub fn rank(a: &IntMatrix) -> Result<usize, LinalgError> {
    Ok(smith(a)?.rank)
}

/// A basis (as columns) of the integer kernel of `a`.
pub fn kernel_basis(a: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let s = smith(a)?;
    let n = a.cols;
    let mut k = IntMatrix::zeros(n, n - s.rank);
    for (c, j) in (s.rank..n).enumerate() {
        for i in 0..n {
            k.set(i, c, s.v.get(i, j));
        }
    }
    Ok(k)
}

/// Canonical row-style Hermite basis of the lattice spanned by `vectors`.
/// Two generating sets span the same lattice iff their outputs are equal.
pub fn hermite_basis(vectors: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>, LinalgError> {
    let mut rows: Vec<Vec<i64>> = vectors
        .iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(LinalgError::Dimension(
            "vector length differs from dimension".into(),
        ));
    }
    let mut basis: Vec<Vec<i64>> = Vec::new();
    let mut col = 0;
    while col < dim && !rows.is_empty() {
        // gcd-reduce column `col` among remaining rows
        loop {
            rows.retain(|r| r.iter().any(|&x| x != 0));
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            let pivot = rows[p].clone();
            for &i in &nz {
                if i != p {
                    let q = rows[i][col].div_euclid(pivot[col]);
                    for k in 0..dim {
                        rows[i][k] = add(rows[i][k], mul(-q, pivot[k])?)?;
                    }
                }
            }
        }
        if let Some(p) = rows.iter().position(|r| r[col] != 0) {
            let mut r = rows.swap_remove(p);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            basis.push(r);
        }
        col += 1;
    }
    // reduce entries above pivots
    for i in 0..basis.len() {
        let pc = basis[i].iter().position(|&x| x != 0).unwrap();
        let pv = basis[i][pc];
        for j in 0..i {
            let q = basis[j][pc].div_euclid(pv);
            if q != 0 {
                let row = basis[i].clone();
                for k in 0..dim {
                    basis[j][k] = add(basis[j][k], mul(-q, row[k])?)?;
                }
            }
        }
    }
    Ok(basis)
}

/// Sparse presentation `Z^gens / <relations>` reduced by eliminating unit
/// pivots. Leftover generators and relations go to dense Smith form.
#[derive(Debug, Clone)]
pub struct PresentationReduction {
    pub num_generators: usize,
    /// `(g, expr)` meaning generator `g` equals `sum c*h` over `expr`.
    pub substitutions: Vec<(usize, Vec<(usize, i64)>)>,
    /// Surviving generators, in increasing order.
    pub survivors: Vec<usize>,
    /// Surviving relations over `survivors` (as columns).
    pub remainder: IntMatrix,
}

impl PresentationReduction {
    /// Rewrites a vector over all generators into the surviving generators.
    pub fn reduce_vector(&self, v: &[i64]) -> Result<Vec<i64>, LinalgError> {
        let mut w = v.to_vec();
        for (g, expr) in &self.substitutions {
            let c = w[*g];
            if c != 0 {
                for &(h, k) in expr {
                    w[h] = add(w[h], mul(c, k)?)?;
                }
                w[*g] = 0;
            }
        }
        Ok(self.survivors.iter().map(|&g| w[g]).collect())
    }
}

/// Eliminates generators that appear with coefficient +-1 in some relation.
/// `relations` are sparse columns over `num_generators` generators.
pub fn reduce_presentation(
    num_generators: usize,
    relations: Vec<BTreeMap<usize, i64>>,
) -> Result<PresentationReduction, LinalgError> {
    let mut cols: Vec<Option<BTreeMap<usize, i64>>> = relations
        .into_iter()
        .map(|c| {
            let c: BTreeMap<usize, i64> = c.into_iter().filter(|&(_, v)| v != 0).collect();
            (!c.is_empty()).then_some(c)
        })
        .collect();
    let mut row_cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); num_generators];
    for (j, c) in cols.iter().enumerate() {
        if let Some(c) = c {
            for &g in c.keys() {
                row_cols[g].insert(j);
            }
        }
    }
    let mut alive = vec![true; num_generators];
    let mut substitutions = Vec::new();
    let mut queue: BTreeSet<(usize, usize)> = cols
        .iter()
        .enumerate()
        .filter_map(|(j, c)| c.as_ref().map(|c| (c.len(), j)))
        .collect();
    while let Some((len, j)) = queue.pop_first() {
        let Some(col) = cols[j].as_ref() else {
            continue;
        };
        if col.len() != len {
            queue.insert((col.len(), j));
            continue;
        }
        let pivot = col
            .iter()
            .filter(|&(_, &v)| v.abs() == 1)
            .min_by_key(|&(&g, _)| (row_cols[g].len(), g))
            .map(|(&g, &v)| (g, v));
        let Some((g, pg)) = pivot else { continue };
        let p = cols[j].take().expect("column present");
        for &h in p.keys() {
            row_cols[h].remove(&j);
        }
        let others: Vec<usize> = row_cols[g].iter().copied().collect();
        for k in others {
            let c = cols[k].as_mut().expect("indexed column present");
            let factor = mul(c[&g], pg)?;
            for (&h, &v) in &p {
                let e = c.entry(h).or_insert(0);
                *e = add(*e, mul(-factor, v)?)?;
                if *e == 0 {
                    c.remove(&h);
                    row_cols[h].remove(&k);
                } else {
                    row_cols[h].insert(k);
                }
            }
            if c.is_empty() {
                cols[k] = None;
            } else {
                queue.insert((c.len(), k));
            }
        }
        // relation: pg*g + sum v*h = 0, so g = -pg * sum v*h
        let expr = p
            .iter()
            .filter(|&(&h, _)| h != g)
            .map(|(&h, &v)| (h, -pg * v))
            .collect();
        substitutions.push((g, expr));
        alive[g] = false;
    }
    let survivors: Vec<usize> = (0..num_generators).filter(|&g| alive[g]).collect();
    let pos: BTreeMap<usize, usize> = survivors.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let remaining: Vec<&BTreeMap<usize, i64>> = cols.iter().flatten().collect();
    let mut remainder = IntMatrix::zeros(survivors.len(), remaining.len());
    for (j, c) in remaining.iter().enumerate() {
        for (&g, &v) in c.iter() {
            remainder.set(pos[&g], j, v);
        }
    }
    Ok(PresentationReduction {
        num_generators,
        substitutions,
        survivors,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let data: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntMatrix::from_rows(rows.len(), rows.first().map_or(0, |r| r.len()), &data).unwrap()
    }

    fn check_smith(a: &IntMatrix) {
        let s = smith(a).unwrap();
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        let diag = s.diagonal();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j || i >= s.rank {
                    assert_eq!(s.d.get(i, j), 0);
                }
            }
        }
        for w in diag.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        assert!(diag.iter().all(|&x| x > 0));
    }

    #[test]
    fn smith_known_example() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a).unwrap();
        assert_eq!(s.diagonal(), vec![2, 6, 12]);
        check_smith(&a);
    }

    #[test]
    fn smith_of_zero_and_empty() {
        let s = smith(&IntMatrix::zeros(2, 3)).unwrap();
        assert_eq!(s.rank, 0);
        let s = smith(&IntMatrix::zeros(0, 4)).unwrap();
        assert_eq!(s.rank, 0);
        assert_eq!(kernel_basis(&IntMatrix::zeros(0, 2)).unwrap().cols(), 2);
    }

    #[test]
    fn kernel_of_simple_map() {
        let a = m(&[&[1, 1, 0], &[0, 1, 1]]);
        let k = kernel_basis(&a).unwrap();
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).unwrap().is_zero());
        let v = k.column(0);
        assert_eq!(v.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 1, 1]);
    }

    #[test]
    fn hermite_identifies_equal_lattices() {
        let a = hermite_basis(&[vec![2, 0], vec![0, 3]], 2).unwrap();
        let b = hermite_basis(&[vec![2, 3], vec![2, 0], vec![4, 6]], 2).unwrap();
        assert_eq!(a, b);
        let c = hermite_basis(&[vec![2, 0], vec![0, 6]], 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn presentation_reduction_keeps_quotient() {
        // Z^3 / <e0 - e1, e1 + e2, 2 e2> = Z/2
        let rel = |pairs: &[(usize, i64)]| pairs.iter().copied().collect::<BTreeMap<_, _>>();
        let r = reduce_presentation(
            3,
            vec![
                rel(&[(0, 1), (1, -1)]),
                rel(&[(1, 1), (2, 1)]),
                rel(&[(2, 2)]),
            ],
        )
        .unwrap();
        let s = smith(&r.remainder).unwrap();
        let torsion: Vec<i64> = s.diagonal().into_iter().filter(|&d| d > 1).collect();
        assert_eq!(r.survivors.len() - s.rank + torsion.len(), 1);
        assert_eq!(torsion, vec![2]);
        // e0 reduces to a generator of the Z/2
        let v = r.reduce_vector(&[1, 0, 0]).unwrap();
        assert_eq!(v.iter().map(|x| x.rem_euclid(2)).sum::<i64>(), 1);
    }

    proptest! {
        #[test]
        fn smith_invariants_hold(rows in 0usize..5, cols in 0usize..5, seed in proptest::collection::vec(-6i64..=6, 25)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 5 + j]).collect()).collect();
            let a = IntMatrix::from_rows(rows, cols, &data).unwrap();
            check_smith(&a);
            let k = kernel_basis(&a).unwrap();
            prop_assert!(a.mul(&k).unwrap().is_zero());
        }

        #[test]
        fn reduction_preserves_invariants(gens in 1usize..6, seed in proptest::collection::vec(-2i64..=2, 30)) {
            let ncols = 5;
            let dense: Vec<Vec<i64>> = (0..gens).map(|i| (0..ncols).map(|j| seed[i * 5 + j]).collect()).collect();
            let a = IntMatrix::from_rows(gens, ncols, &dense).unwrap();
            let direct = smith(&a).unwrap();
            let rels = (0..ncols).map(|j| (0..gens).map(|i| (i, a.get(i, j))).collect()).collect();
            let red = reduce_presentation(gens, rels).unwrap();
            let rest = smith(&red.remainder).unwrap();
            let inv = |s: &Smith, n: usize| {
                let t: Vec<i64> = s.diagonal().into_iter().filter(|&d| d > 1).collect();
                (n - s.rank, t)
            };
            prop_assert_eq!(inv(&direct, gens), inv(&rest, red.survivors.len()));
        }
    }
}

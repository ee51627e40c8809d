//! Finitely generated abelian groups in Smith coordinates.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ActError;
use crate::linalg::{hermite_basis, kernel_basis, IntMatrix, LinalgError};
use crate::report::Report;

/// `Z/d_1 + ... + Z/d_t + Z^rank` with `d_i >= 2` and `d_i | d_{i+1}`.
/// Generators are ordered torsion first, then free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgAbelian {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl FgAbelian {
    pub fn new(rank: usize, torsion: Vec<i64>) -> Result<Self, ActError> {
        if torsion.iter().any(|&d| d < 2) {
            return Err(ActError::InvalidAbelian(
                "torsion coefficients must be at least 2".into(),
            ));
        }
        if torsion.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(ActError::InvalidAbelian(
                "torsion coefficients must form a divisibility chain".into(),
            ));
        }
        Ok(Self { rank, torsion })
    }

    pub fn zero() -> Self {
        Self {
            rank: 0,
            torsion: vec![],
        }
    }

    pub fn free(rank: usize) -> Self {
        Self {
            rank,
            torsion: vec![],
        }
    }

    pub fn cyclic(d: i64) -> Self {
        match d {
            0 => Self::free(1),
            1 => Self::zero(),
            _ => Self {
                rank: 0,
                torsion: vec![d],
            },
        }
    }

    /// The group `Z^n / (diagonal)` where `diagonal` comes from a Smith form
    /// of a relation matrix with `n` rows. Units are dropped.
    pub fn from_smith_diagonal(n: usize, diagonal: &[i64]) -> Self {
        let torsion = diagonal.iter().copied().filter(|&d| d > 1).collect();
        Self {
            rank: n - diagonal.len(),
            torsion,
        }
    }

    pub fn num_generators(&self) -> usize {
        self.torsion.len() + self.rank
    }

    /// Order of generator `i`, with 0 for a free generator.
    pub fn modulus(&self, i: usize) -> i64 {
        self.torsion.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.num_generators() == 0
    }

    /// Canonical representative of a coordinate vector.
    pub fn normalize(&self, v: &mut [i64]) {
        for (i, &d) in self.torsion.iter().enumerate() {
            v[i] = v[i].rem_euclid(d);
        }
    }

    /// Relation vectors `d_i e_i` of the torsion part.
    pub fn relations(&self) -> Vec<Vec<i64>> {
        let n = self.num_generators();
        self.torsion
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut v = vec![0; n];
                v[i] = d;
                v
            })
            .collect()
    }

    pub fn direct_sum(&self, other: &FgAbelian) -> FgAbelian {
        let mut diag: Vec<i64> = self.torsion.iter().chain(&other.torsion).copied().collect();
        diag.sort_unstable();
        // Normalise the multiset of cyclic factors to an invariant factor chain.
        let mut m = IntMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        let s = crate::linalg::smith(&m).expect("small diagonal");
        let mut t = FgAbelian::from_smith_diagonal(diag.len(), &s.diagonal());
        t.rank = self.rank + other.rank;
        t
    }
}

impl fmt::Display for FgAbelian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A homomorphism given by a matrix (target generators x source generators).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbMap {
    pub source: FgAbelian,
    pub target: FgAbelian,
    pub matrix: IntMatrix,
}

impl AbMap {
    /// Normalises the matrix and checks it is well defined on torsion.
    pub fn new(source: FgAbelian, target: FgAbelian, matrix: IntMatrix) -> Result<Self, ActError> {
        let m = Self::unchecked(source, target, matrix)?;
        let r = m.check();
        if !r.is_clean() {
            return Err(ActError::InvalidMap(r.to_string()));
        }
        Ok(m)
    }

    fn unchecked(
        source: FgAbelian,
        target: FgAbelian,
        mut matrix: IntMatrix,
    ) -> Result<Self, ActError> {
        if matrix.rows() != target.num_generators() || matrix.cols() != source.num_generators() {
            return Err(ActError::Dimension(format!(
                "matrix is {}x{}, groups need {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.num_generators(),
                source.num_generators()
            )));
        }
        for (i, &d) in target.torsion.iter().enumerate() {
            for j in 0..matrix.cols() {
                matrix.set(i, j, matrix.get(i, j).rem_euclid(d));
            }
        }
        Ok(Self {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(g: &FgAbelian) -> Self {
        Self::unchecked(
            g.clone(),
            g.clone(),
            IntMatrix::identity(g.num_generators()),
        )
        .expect("square")
    }

    pub fn zero(source: &FgAbelian, target: &FgAbelian) -> Self {
        Self::unchecked(
            source.clone(),
            target.clone(),
            IntMatrix::zeros(target.num_generators(), source.num_generators()),
        )
        .expect("sized")
    }

    /// Each torsion generator of the source must map into the torsion relations.
    pub fn check(&self) -> Report {
        let mut r = Report::new();
        for (j, &d) in self.source.torsion.iter().enumerate() {
            for i in 0..self.target.num_generators() {
                let v = self.matrix.get(i, j) as i128 * d as i128;
                let m = self.target.modulus(i) as i128;
                let ok = if m == 0 { v == 0 } else { v % m == 0 };
                if !ok {
                    r.push(
                        "well-defined on torsion",
                        format!("source generator {j} of order {d} hits target coordinate {i}"),
                    );
                }
            }
        }
        r
    }

    /// `self` then `next`.
    pub fn then(&self, next: &AbMap) -> Result<AbMap, ActError> {
        if self.target != next.source {
            return Err(ActError::Dimension("maps are not composable".into()));
        }
        let m = next.matrix.mul(&self.matrix)?;
        Self::unchecked(self.source.clone(), next.target.clone(), m)
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>, ActError> {
        let mut w = self.matrix.mul_vec(v)?;
        self.target.normalize(&mut w);
        Ok(w)
    }
}

impl From<LinalgError> for ActError {
    fn from(e: LinalgError) -> Self {
        ActError::Linalg(e.to_string())
    }
}

/// A sequence `groups[0] -> groups[1] -> ...` of abelian groups.
#[derive(Debug, Clone)]
pub struct AbSequence {
    pub groups: Vec<FgAbelian>,
    pub maps: Vec<AbMap>,
}

impl AbSequence {
    pub fn new(groups: Vec<FgAbelian>, matrices: Vec<IntMatrix>) -> Result<Self, ActError> {
        if matrices.len() + 1 != groups.len() {
            return Err(ActError::Dimension(
                "need one map between each consecutive pair".into(),
            ));
        }
        let maps = matrices
            .into_iter()
            .enumerate()
            .map(|(i, m)| AbMap::new(groups[i].clone(), groups[i + 1].clone(), m))
            .collect::<Result<_, _>>()?;
        Ok(Self { groups, maps })
    }

    /// Exactness at `groups[pos]`, comparing image and kernel as lattices
    /// containing the torsion relations.
    pub fn is_exact_at(&self, pos: usize) -> Result<bool, ActError> {
        if pos == 0 || pos + 1 >= self.groups.len() {
            return Err(ActError::Position(pos));
        }
        let b = &self.groups[pos];
        let n = b.num_generators();
        let f = &self.maps[pos - 1].matrix;
        let g = &self.maps[pos].matrix;
        let rel_b = b.relations();
        let mut image: Vec<Vec<i64>> = (0..f.cols()).map(|j| f.column(j)).collect();
        image.extend(rel_b.iter().cloned());
        // kernel: b with g b in the relation lattice of C
        let c = &self.groups[pos + 1];
        let mut rel_c = IntMatrix::zeros(c.num_generators(), c.torsion.len());
        for (i, &d) in c.torsion.iter().enumerate() {
            rel_c.set(i, i, d);
        }
        let k = kernel_basis(&g.hconcat(&rel_c)?)?;
        let mut kernel: Vec<Vec<i64>> = (0..k.cols()).map(|j| k.column(j)[..n].to_vec()).collect();
        kernel.extend(rel_b);
        Ok(hermite_basis(&image, n)? == hermite_basis(&kernel, n)?)
    }

    pub fn is_exact(&self) -> Result<bool, ActError> {
        for pos in 1..self.groups.len().saturating_sub(1) {
            if !self.is_exact_at(pos)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[i64]) -> IntMatrix {
        let rows_v: Vec<Vec<i64>> = data.chunks(cols.max(1)).map(|c| c.to_vec()).collect();
        if rows * cols == 0 {
            return IntMatrix::zeros(rows, cols);
        }
        IntMatrix::from_rows(rows, cols, &rows_v).unwrap()
    }

    #[test]
    fn display_and_validation() {
        assert_eq!(FgAbelian::zero().to_string(), "0");
        assert_eq!(
            FgAbelian::new(2, vec![2, 4]).unwrap().to_string(),
            "Z/2 + Z/4 + Z^2"
        );
        assert!(FgAbelian::new(0, vec![2, 3]).is_err());
        assert!(FgAbelian::new(0, vec![1]).is_err());
    }

    #[test]
    fn direct_sum_normalises() {
        let a = FgAbelian::cyclic(2);
        let b = FgAbelian::cyclic(3);
        assert_eq!(a.direct_sum(&b), FgAbelian::cyclic(6));
        assert_eq!(
            FgAbelian::free(2).direct_sum(&a),
            FgAbelian::new(2, vec![2]).unwrap()
        );
    }

    #[test]
    fn short_exact_sequence_z_z_z2() {
        let z = FgAbelian::free(1);
        let seq = AbSequence::new(
            vec![
                FgAbelian::zero(),
                z.clone(),
                z,
                FgAbelian::cyclic(2),
                FgAbelian::zero(),
            ],
            vec![
                mat(1, 0, &[]),
                mat(1, 1, &[2]),
                mat(1, 1, &[1]),
                mat(0, 1, &[]),
            ],
        )
        .unwrap();
        assert!(seq.is_exact().unwrap());
    }

    #[test]
    fn zero_map_is_not_exact() {
        let z = FgAbelian::free(1);
        let seq = AbSequence::new(
            vec![FgAbelian::zero(), z.clone(), z, FgAbelian::zero()],
            vec![mat(1, 0, &[]), mat(1, 1, &[0]), mat(0, 1, &[])],
        )
        .unwrap();
        assert!(!seq.is_exact_at(1).unwrap());
        assert!(seq.is_exact_at(0).is_err());
    }

    #[test]
    fn ill_defined_map_rejected() {
        let r = AbMap::new(FgAbelian::cyclic(2), FgAbelian::free(1), mat(1, 1, &[1]));
        assert!(matches!(r, Err(ActError::InvalidMap(_))));
        let ok = AbMap::new(FgAbelian::cyclic(2), FgAbelian::cyclic(4), mat(1, 1, &[2]));
        assert!(ok.is_ok());
        assert!(AbMap::new(FgAbelian::cyclic(2), FgAbelian::cyclic(4), mat(1, 1, &[1])).is_err());
    }

    #[test]
    fn exactness_with_torsion() {
        // Z -(x2)-> Z/4 -(x1)-> Z/2 : image {0,2} = kernel of reduction mod 2
        let seq = AbSequence::new(
            vec![
                FgAbelian::free(1),
                FgAbelian::cyclic(4),
                FgAbelian::cyclic(2),
            ],
            vec![mat(1, 1, &[2]), mat(1, 1, &[1])],
        )
        .unwrap();
        assert!(seq.is_exact_at(1).unwrap());
        let seq = AbSequence::new(
            vec![
                FgAbelian::free(1),
                FgAbelian::cyclic(4),
                FgAbelian::cyclic(4),
            ],
            vec![mat(1, 1, &[2]), mat(1, 1, &[1])],
        )
        .unwrap();
        assert!(!seq.is_exact_at(1).unwrap());
    }
}

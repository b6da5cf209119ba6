use serde::Serialize;

use super::algebra::{unit, LieAlgebra};
use crate::exterior::binomial;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Isomorphism type of the semisimple quotient `𝔤/𝔯`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Levi {
    Trivial,
    Sl2R,
    Su2,
    /// Dimension and Killing-form inertia `(+, −, 0)` of the quotient.
    Other { dim: usize, inertia: (usize, usize, usize) },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadicalInfo {
    pub dim: usize,
    pub is_ideal: bool,
    pub solvable: bool,
    pub abelian: bool,
    /// Dimension of `[𝔯, 𝔯]`.
    pub derived_dim: usize,
    /// Whether `[𝔯, 𝔯]` is abelian.
    pub derived_abelian: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureFlags {
    /// Dimensions of `𝔤 ⊇ [𝔤,𝔤] ⊇ …` until the series stabilises.
    pub derived_series: Vec<usize>,
    /// Dimensions of `𝔤 ⊇ [𝔤,𝔤] ⊇ [𝔤,[𝔤,𝔤]] ⊇ …` until it stabilises.
    pub lower_central_series: Vec<usize>,
    pub solvable: bool,
    pub nilpotent: bool,
    /// Smallest `s` with `𝔤_{s+1} = 0`, for nilpotent algebras.
    pub nilpotency_step: Option<usize>,
    pub unimodular: bool,
    pub radical: RadicalInfo,
    pub semisimple_dim: usize,
    pub levi: Levi,
}

/// A subspace held as the non-zero rows of a reduced row echelon form.
#[derive(Clone, Debug)]
struct Subspace<S> {
    n: usize,
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Subspace<S> {
    fn span(n: usize, vectors: Vec<Vec<S>>) -> Self {
        let vectors: Vec<Vec<S>> = vectors.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
        if vectors.is_empty() {
            return Subspace { n, rows: Vec::new(), pivots: Vec::new() };
        }
        let red = Matrix::from_rows(vectors).rref();
        let rows = (0..red.pivots.len()).map(|i| red.matrix.row(i).to_vec()).collect();
        Subspace { n, rows, pivots: red.pivots }
    }

    fn whole(n: usize) -> Self {
        Self::span(n, (0..n).map(|i| unit(n, i)).collect())
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after eliminating the pivot coordinates.
    fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                *x = x.clone() - f.clone() * r.clone();
            }
        }
        v
    }

    fn contains(&self, v: &[S]) -> bool {
        let scale = S::max_abs(v);
        self.reduce(v).iter().all(|x| x.is_negligible(&scale))
    }

    fn bracket(l: &LieAlgebra<S>, a: &Self, b: &Self) -> Self {
        let mut vs = Vec::new();
        for x in &a.rows {
            for y in &b.rows {
                vs.push(l.bracket(x, y));
            }
        }
        Self::span(a.n, vs)
    }
}

impl<S: Scalar> LieAlgebra<S> {
    /// `dim Hᵏ` of the Chevalley–Eilenberg complex.
    pub fn betti(&self, k: usize) -> usize {
        let n = self.n();
        if k > n {
            return 0;
        }
        let kernel = binomial(n, k) - if k < n { self.differential_matrix(k).rank() } else { 0 };
        let image = if k > 0 { self.differential_matrix(k - 1).rank() } else { 0 };
        kernel - image
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        (0..=self.n()).map(|k| self.betti(k)).collect()
    }

    /// `tr ad_X = 0` for every `X`.
    pub fn is_unimodular(&self) -> bool {
        (0..self.n()).all(|i| {
            let t = self.ad_basis(i).trace();
            t.is_negligible(&S::one())
        })
    }

    pub fn structure_flags(&self) -> StructureFlags {
        let n = self.n();
        let g = Subspace::whole(n);

        let mut derived = vec![g.clone()];
        loop {
            let last = derived.last().unwrap();
            let next = Subspace::bracket(self, last, last);
            if next.dim() == last.dim() {
                break;
            }
            let done = next.dim() == 0;
            derived.push(next);
            if done {
                break;
            }
        }
        let mut lower = vec![g.clone()];
        loop {
            let last = lower.last().unwrap();
            let next = Subspace::bracket(self, &g, last);
            if next.dim() == last.dim() {
                break;
            }
            let done = next.dim() == 0;
            lower.push(next);
            if done {
                break;
            }
        }
        let solvable = derived.last().unwrap().dim() == 0;
        let nilpotent = lower.last().unwrap().dim() == 0;
        let nilpotency_step = nilpotent.then(|| lower.len() - 1);

        let radical = self.radical(&derived[1.min(derived.len() - 1)]);
        let radical_info = self.radical_info(&radical);
        let semisimple_dim = n - radical.dim();
        let levi = if semisimple_dim == 0 {
            Levi::Trivial
        } else {
            let inertia = self.quotient_killing(&radical).inertia();
            match (semisimple_dim, inertia) {
                (3, (2, 1, 0)) => Levi::Sl2R,
                (3, (0, 3, 0)) => Levi::Su2,
                _ => Levi::Other { dim: semisimple_dim, inertia },
            }
        };
        StructureFlags {
            derived_series: derived.iter().map(Subspace::dim).collect(),
            lower_central_series: lower.iter().map(Subspace::dim).collect(),
            solvable,
            nilpotent,
            nilpotency_step,
            unimodular: self.is_unimodular(),
            radical: radical_info,
            semisimple_dim,
            levi,
        }
    }

    /// Orthogonal complement of `[𝔤,𝔤]` for the Killing form.
    fn radical(&self, derived: &Subspace<S>) -> Subspace<S> {
        let n = self.n();
        if derived.dim() == 0 {
            return Subspace::whole(n);
        }
        let b = self.killing();
        let rows: Vec<Vec<S>> = derived.rows.iter().map(|y| b.mul_vec(y)).collect();
        Subspace::span(n, Matrix::from_rows(rows).null_space())
    }

    fn radical_info(&self, r: &Subspace<S>) -> RadicalInfo {
        let g = Subspace::whole(self.n());
        let is_ideal = Subspace::bracket(self, &g, r).rows.iter().all(|v| r.contains(v));
        let mut cur = r.clone();
        while cur.dim() > 0 {
            let next = Subspace::bracket(self, &cur, &cur);
            if next.dim() == cur.dim() {
                break;
            }
            cur = next;
        }
        let rr = Subspace::bracket(self, r, r);
        RadicalInfo {
            dim: r.dim(),
            is_ideal,
            solvable: cur.dim() == 0,
            abelian: rr.dim() == 0,
            derived_dim: rr.dim(),
            derived_abelian: Subspace::bracket(self, &rr, &rr).dim() == 0,
        }
    }

    /// Killing form of `𝔤/𝔯`, in the basis of non-pivot coordinate vectors.
    fn quotient_killing(&self, r: &Subspace<S>) -> Matrix<S> {
        let n = self.n();
        let q: Vec<usize> = (0..n).filter(|i| !r.pivots.contains(i)).collect();
        let m = q.len();
        let ad: Vec<Matrix<S>> = q
            .iter()
            .map(|&a| {
                let cols: Vec<Vec<S>> = q
                    .iter()
                    .map(|&b| {
                        let v = r.reduce(&self.bracket(&unit(n, a), &unit(n, b)));
                        q.iter().map(|&i| v[i].clone()).collect()
                    })
                    .collect();
                Matrix::from_columns(&cols)
            })
            .collect();
        let mut k = Matrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                k[(i, j)] = ad[i].mul(&ad[j]).trace();
            }
        }
        k
    }
}

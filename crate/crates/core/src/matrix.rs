//! Dense matrices over `E`, row-major, with arithmetic routed through an [`ExtensionContext`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, ExtensionContext};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct EMat {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl EMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        EMat { rows, cols, data: vec![Elem(0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Elem(1));
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elem>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        EMat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Self::from_vec(r, c, data)
    }

    pub fn diagonal(entries: &[Elem]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn scalar(n: usize, e: Elem) -> Self {
        Self::diagonal(&vec![e; n])
    }

    /// Column matrix.
    pub fn column(entries: &[Elem]) -> Self {
        Self::from_vec(entries.len(), 1, entries.to_vec())
    }

    /// The matrix whose entries are the base-`|E|` digits of `index`.
    pub fn from_index(rows: usize, cols: usize, mut index: u64, order: u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(Elem((index % order as u64) as u32));
            index /= order as u64;
        }
        Self::from_vec(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, e: Elem) {
        self.data[i * self.cols + j] = e;
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.0 == 0)
    }

    pub fn mul(&self, ctx: &ExtensionContext, other: &EMat) -> EMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = EMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.0 == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = ctx.add(out.data[idx], ctx.mul(a, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, ctx: &ExtensionContext, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Elem(0), |acc, k| ctx.add(acc, ctx.mul(self.get(i, k), v[k])))
            })
            .collect()
    }

    pub fn add(&self, ctx: &ExtensionContext, other: &EMat) -> EMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| ctx.add(a, b)).collect();
        EMat::from_vec(self.rows, self.cols, data)
    }

    pub fn sub(&self, ctx: &ExtensionContext, other: &EMat) -> EMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| ctx.sub(a, b)).collect();
        EMat::from_vec(self.rows, self.cols, data)
    }

    pub fn neg(&self, ctx: &ExtensionContext) -> EMat {
        self.map(|e| ctx.neg(e))
    }

    pub fn scale(&self, ctx: &ExtensionContext, s: Elem) -> EMat {
        self.map(|e| ctx.mul(s, e))
    }

    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> EMat {
        EMat::from_vec(self.rows, self.cols, self.data.iter().map(|&e| f(e)).collect())
    }

    /// Entrywise Galois conjugation.
    pub fn conj(&self, ctx: &ExtensionContext) -> EMat {
        self.map(|e| ctx.conj(e))
    }

    pub fn transpose(&self) -> EMat {
        let mut out = EMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self, ctx: &ExtensionContext) -> EMat {
        self.transpose().conj(ctx)
    }

    pub fn trace(&self, ctx: &ExtensionContext) -> Elem {
        assert!(self.is_square());
        (0..self.rows).fold(Elem(0), |acc, i| ctx.add(acc, self.get(i, i)))
    }

    /// Row echelon form; returns (reduced matrix, pivot columns, determinant factor).
    fn eliminate(&self, ctx: &ExtensionContext) -> (EMat, Vec<usize>, Elem) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut det = Elem(1);
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c).0 != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let tmp = m.get(r, j);
                    m.set(r, j, m.get(pr, j));
                    m.set(pr, j, tmp);
                }
                det = ctx.neg(det);
            }
            let pv = m.get(r, c);
            det = ctx.mul(det, pv);
            let inv = ctx.inv(pv).expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(r, j, ctx.mul(inv, m.get(r, j)));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f.0 == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = ctx.sub(m.get(i, j), ctx.mul(f, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, det)
    }

    pub fn det(&self, ctx: &ExtensionContext) -> Elem {
        assert!(self.is_square());
        if self.rows == 0 {
            return Elem(1);
        }
        if self.rows == 1 {
            return self.get(0, 0);
        }
        if self.rows == 2 {
            return ctx.sub(
                ctx.mul(self.get(0, 0), self.get(1, 1)),
                ctx.mul(self.get(0, 1), self.get(1, 0)),
            );
        }
        let (_, pivots, det) = self.eliminate(ctx);
        if pivots.len() < self.rows {
            Elem(0)
        } else {
            det
        }
    }

    pub fn rank(&self, ctx: &ExtensionContext) -> usize {
        self.eliminate(ctx).1.len()
    }

    pub fn inverse(&self, ctx: &ExtensionContext) -> Result<EMat> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = EMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, Elem(1));
        }
        let (red, pivots, _) = aug.eliminate(ctx);
        if pivots.iter().filter(|&&c| c < n).count() < n {
            return Err(Error::Precondition("matrix is singular".into()));
        }
        let mut out = EMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, red.get(i, n + j));
            }
        }
        Ok(out)
    }

    /// Basis of the right kernel `{v : M v = 0}`, as columns.
    pub fn nullspace(&self, ctx: &ExtensionContext) -> Vec<Vec<Elem>> {
        let (red, pivots, _) = self.eliminate(ctx);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Elem(0); self.cols];
                v[fc] = Elem(1);
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = ctx.neg(red.get(r, fc));
                }
                v
            })
            .collect()
    }

    pub fn block_diag(blocks: &[&EMat]) -> EMat {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = EMat::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.paste(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// `[[a, b], [c, d]]` from four blocks.
    pub fn from_blocks(a: &EMat, b: &EMat, c: &EMat, d: &EMat) -> EMat {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut out = EMat::zeros(a.rows + c.rows, a.cols + b.cols);
        out.paste(0, 0, a);
        out.paste(0, a.cols, b);
        out.paste(a.rows, 0, c);
        out.paste(a.rows, a.cols, d);
        out
    }

    pub fn hstack(parts: &[&EMat]) -> EMat {
        let rows = parts.first().map_or(0, |p| p.rows);
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = EMat::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows);
            out.paste(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    pub fn from_columns(rows: usize, cols: &[Vec<Elem>]) -> EMat {
        let mut out = EMat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &e) in col.iter().enumerate() {
                out.set(i, j, e);
            }
        }
        out
    }

    pub fn paste(&mut self, r0: usize, c0: usize, block: &EMat) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> EMat {
        let mut out = EMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    /// Inverse of [`EMat::from_index`].
    pub fn to_index(&self, order: u32) -> u64 {
        self.data.iter().rev().fold(0u64, |acc, e| acc * order as u64 + e.0 as u64)
    }

    pub fn is_hermitian(&self, ctx: &ExtensionContext) -> bool {
        self.is_square() && *self == self.adjoint(ctx)
    }
}

/// Row vector `u† G v`-style sesquilinear evaluation: returns `v† G u`.
pub fn form_value(ctx: &ExtensionContext, gram: &EMat, u: &[Elem], v: &[Elem]) -> Elem {
    let gu = gram.mul_vec(ctx, u);
    v.iter()
        .zip(&gu)
        .fold(Elem(0), |acc, (&vi, &gi)| ctx.add(acc, ctx.mul(ctx.conj(vi), gi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant_agree() {
        let ctx = ExtensionContext::new(3, 1).unwrap();
        let mut invertible = 0;
        for idx in (0..9u64.pow(4)).step_by(13) {
            let m = EMat::from_index(2, 2, idx, 9);
            let d = m.det(&ctx);
            match m.inverse(&ctx) {
                Ok(inv) => {
                    invertible += 1;
                    assert_ne!(d, Elem(0));
                    assert_eq!(m.mul(&ctx, &inv), EMat::identity(2));
                    assert_eq!(
                        ctx.mul(d, inv.det(&ctx)),
                        Elem(1),
                        "det(M)·det(M⁻¹) must be 1"
                    );
                }
                Err(_) => assert_eq!(d, Elem(0)),
            }
        }
        assert!(invertible > 0);
    }

    #[test]
    fn three_by_three_determinant_is_multiplicative() {
        let ctx = ExtensionContext::new(5, 1).unwrap();
        let a = EMat::from_index(3, 3, 123_456_789, 25);
        let b = EMat::from_index(3, 3, 987_654_321, 25);
        assert_eq!(a.mul(&ctx, &b).det(&ctx), ctx.mul(a.det(&ctx), b.det(&ctx)));
    }

    #[test]
    fn nullspace_is_annihilated() {
        let ctx = ExtensionContext::new(3, 1).unwrap();
        let m = EMat::from_rows(&[vec![Elem(1), Elem(2), Elem(4)], vec![Elem(2), Elem(4), Elem(8)]]);
        let ns = m.nullspace(&ctx);
        assert_eq!(ns.len(), 3 - m.rank(&ctx));
        for v in ns {
            assert!(m.mul_vec(&ctx, &v).iter().all(|e| e.0 == 0));
        }
    }

    #[test]
    fn index_round_trip() {
        let m = EMat::from_index(2, 3, 424_242, 9);
        assert_eq!(m.to_index(9), 424_242);
    }

    #[test]
    fn empty_matrix_has_unit_determinant() {
        let ctx = ExtensionContext::new(3, 1).unwrap();
        assert_eq!(EMat::zeros(0, 0).det(&ctx), Elem(1));
        assert_eq!(EMat::zeros(0, 0).inverse(&ctx).unwrap(), EMat::zeros(0, 0));
    }
}

//! ε-Hermitian spaces, Witt decompositions, Hermitian embeddings and conjugate transport.
//!
//! Vectors are columns over `E`. A space with Gram matrix `G` carries the form
//! `⟨u, v⟩ = v†·G·u`, linear in `u` and conjugate-linear in `v`; it is
//! ε-Hermitian exactly when `G† = ε·G`, and `g` is an isometry when `g†·G·g = G`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, ExtensionContext};
use crate::matrix::{form_value, EMat};

/// Sign of the form: `+1` Hermitian, `−1` skew-Hermitian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Epsilon {
    Hermitian,
    Skew,
}

impl Epsilon {
    pub fn sign(self) -> i32 {
        match self {
            Epsilon::Hermitian => 1,
            Epsilon::Skew => -1,
        }
    }

    pub fn as_elem(self, ctx: &ExtensionContext) -> Elem {
        match self {
            Epsilon::Hermitian => ctx.one(),
            Epsilon::Skew => ctx.neg(ctx.one()),
        }
    }
}

impl std::fmt::Display for Epsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Epsilon::Hermitian => "+1",
            Epsilon::Skew => "-1",
        })
    }
}

/// Requested discriminant class; over a finite field every choice gives the same space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscChoice {
    #[default]
    Split,
    NonSplit,
}

#[derive(Clone, Debug)]
pub struct EpsHermitianSpace {
    ctx: Arc<ExtensionContext>,
    epsilon: Epsilon,
    gram: EMat,
    label: String,
    disc: Elem,
    disc_choice: DiscChoice,
}

/// `disc = (−1)^{n(n−1)/2}·det G`.
pub fn discriminant(ctx: &ExtensionContext, gram: &EMat) -> Elem {
    let n = gram.rows();
    let d = gram.det(ctx);
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        ctx.neg(d)
    } else {
        d
    }
}

/// Builds the canonical space: Gram `I` when Hermitian, `δ·I` when skew-Hermitian.
pub fn build_space(
    ctx: &Arc<ExtensionContext>,
    epsilon: Epsilon,
    dim: usize,
    disc_choice: DiscChoice,
) -> EpsHermitianSpace {
    let diag = match epsilon {
        Epsilon::Hermitian => ctx.one(),
        Epsilon::Skew => ctx.delta(),
    };
    let gram = EMat::scalar(dim, diag);
    let kind = match epsilon {
        Epsilon::Hermitian => "hermitian",
        Epsilon::Skew => "skew-hermitian",
    };
    EpsHermitianSpace::from_gram_unchecked(ctx, epsilon, gram, format!("{kind}-{dim}"), disc_choice)
}

impl EpsHermitianSpace {
    fn from_gram_unchecked(
        ctx: &Arc<ExtensionContext>,
        epsilon: Epsilon,
        gram: EMat,
        label: String,
        disc_choice: DiscChoice,
    ) -> Self {
        let disc = discriminant(ctx, &gram);
        EpsHermitianSpace { ctx: ctx.clone(), epsilon, gram, label, disc, disc_choice }
    }

    /// A space with an explicit Gram matrix, validated for symmetry and nondegeneracy.
    pub fn from_gram(
        ctx: &Arc<ExtensionContext>,
        epsilon: Epsilon,
        gram: EMat,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Precondition("Gram matrix must be square".into()));
        }
        let expected = gram.scale(ctx, epsilon.as_elem(ctx));
        if gram.adjoint(ctx) != expected {
            return Err(Error::Precondition(format!(
                "Gram matrix is not {}-Hermitian",
                epsilon
            )));
        }
        if gram.det(ctx) == ctx.zero() {
            return Err(Error::Precondition("Gram matrix is degenerate".into()));
        }
        Ok(Self::from_gram_unchecked(ctx, epsilon, gram, label.into(), DiscChoice::Split))
    }

    pub fn ctx(&self) -> &Arc<ExtensionContext> {
        &self.ctx
    }
    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }
    pub fn gram(&self) -> &EMat {
        &self.gram
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn disc(&self) -> Elem {
        self.disc
    }
    pub fn disc_choice(&self) -> DiscChoice {
        self.disc_choice
    }

    /// Sign of the discriminant under the quadratic character of `F^×`, when it lies in `F`.
    pub fn disc_sign(&self) -> Option<i8> {
        self.ctx.quadratic_character(self.disc).ok()
    }

    pub fn pair(&self, u: &[Elem], v: &[Elem]) -> Elem {
        form_value(&self.ctx, &self.gram, u, v)
    }

    pub fn is_isometry(&self, g: &EMat) -> bool {
        g.adjoint(&self.ctx).mul(&self.ctx, &self.gram).mul(&self.ctx, g) == self.gram
    }
}

/// Hyperbolic splitting `W = X ⊕ Y (⊕ anisotropic line)` with `⟨x_i, y_j⟩ = δ_ij`.
#[derive(Clone, Debug)]
pub struct WittDecomposition {
    space: EpsHermitianSpace,
    x: Vec<Vec<Elem>>,
    y: Vec<Vec<Elem>>,
    anisotropic: Option<Vec<Elem>>,
}

impl WittDecomposition {
    pub fn space(&self) -> &EpsHermitianSpace {
        &self.space
    }
    pub fn witt_index(&self) -> usize {
        self.x.len()
    }
    pub fn x(&self) -> &[Vec<Elem>] {
        &self.x
    }
    pub fn y(&self) -> &[Vec<Elem>] {
        &self.y
    }
    pub fn anisotropic(&self) -> Option<&[Elem]> {
        self.anisotropic.as_deref()
    }

    /// Change of basis whose columns are `x_1..x_r, y_1..y_r` and then the anisotropic vector.
    pub fn basis(&self) -> EMat {
        let mut cols: Vec<Vec<Elem>> = self.x.clone();
        cols.extend(self.y.iter().cloned());
        cols.extend(self.anisotropic.iter().cloned());
        EMat::from_columns(self.space.dim(), &cols)
    }

    /// Gram matrix in the Witt basis.
    pub fn witt_gram(&self) -> EMat {
        let ctx = self.space.ctx();
        let p = self.basis();
        p.adjoint(ctx).mul(ctx, self.space.gram()).mul(ctx, &p)
    }
}

/// The standard Gram matrix `[[0, εI], [I, 0]]` of a split ε-Hermitian space of dimension `2n`.
pub fn split_gram(ctx: &ExtensionContext, epsilon: Epsilon, n: usize) -> EMat {
    EMat::from_blocks(
        &EMat::zeros(n, n),
        &EMat::scalar(n, epsilon.as_elem(ctx)),
        &EMat::identity(n),
        &EMat::zeros(n, n),
    )
}

fn combine(ctx: &ExtensionContext, a: Elem, u: &[Elem], b: Elem, v: &[Elem]) -> Vec<Elem> {
    u.iter()
        .zip(v)
        .map(|(&ui, &vi)| ctx.add(ctx.mul(a, ui), ctx.mul(b, vi)))
        .collect()
}

/// Constructive hyperbolic-pair extraction.
pub fn witt_decompose(space: &EpsHermitianSpace) -> Result<WittDecomposition> {
    let ctx = space.ctx().clone();
    let eps = space.epsilon().as_elem(&ctx);
    let n = space.dim();
    let mut rest: Vec<Vec<Elem>> = (0..n)
        .map(|i| {
            let mut e = vec![ctx.zero(); n];
            e[i] = ctx.one();
            e
        })
        .collect();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    while rest.len() >= 2 {
        let is_null = |v: &[Elem]| space.pair(v, v) == ctx.zero();
        let v = if is_null(&rest[0]) {
            rest[0].clone()
        } else if is_null(&rest[1]) {
            rest[1].clone()
        } else {
            ctx.elements()
                .map(|a| combine(&ctx, ctx.one(), &rest[0], a, &rest[1]))
                .find(|v| is_null(v))
                .ok_or_else(|| Error::Inconsistent("no isotropic vector in a plane".into()))?
        };
        let (w, c) = rest
            .iter()
            .map(|w| (w.clone(), space.pair(&v, w)))
            .find(|(_, c)| *c != ctx.zero())
            .ok_or_else(|| Error::Inconsistent("isotropic vector in the radical".into()))?;
        let s = ctx.conj(ctx.inv(c)?);
        let w1: Vec<Elem> = w.iter().map(|&e| ctx.mul(s, e)).collect();
        let t = ctx.neg(ctx.mul(space.pair(&w1, &w1), ctx.half()));
        let y = combine(&ctx, ctx.one(), &w1, t, &v);
        debug_assert_eq!(space.pair(&v, &y), ctx.one());
        debug_assert_eq!(space.pair(&y, &y), ctx.zero());

        let mut projected = Vec::new();
        for u in &rest {
            let a = space.pair(u, &y);
            let b = ctx.mul(eps, space.pair(u, &v));
            let u1: Vec<Elem> = u
                .iter()
                .zip(v.iter().zip(&y))
                .map(|(&ui, (&xi, &yi))| ctx.sub(ctx.sub(ui, ctx.mul(a, xi)), ctx.mul(b, yi)))
                .collect();
            projected.push(u1);
        }
        // keep a basis of the projected span
        let m = EMat::from_columns(n, &projected);
        let target = rest.len() - 2;
        let mut basis: Vec<Vec<Elem>> = Vec::new();
        for col in 0..m.cols() {
            let mut trial = basis.clone();
            trial.push(m.col(col));
            if EMat::from_columns(n, &trial).rank(&ctx) == trial.len() {
                basis = trial;
            }
            if basis.len() == target {
                break;
            }
        }
        if basis.len() != target {
            return Err(Error::Inconsistent("orthogonal complement lost rank".into()));
        }
        rest = basis;
        xs.push(v);
        ys.push(y);
    }
    let witt = WittDecomposition {
        space: space.clone(),
        x: xs,
        y: ys,
        anisotropic: rest.pop(),
    };
    let r = witt.witt_index();
    let g = witt.witt_gram();
    let expect_hyp = split_gram(&ctx, space.epsilon(), r);
    if g.submatrix(0, 0, 2 * r, 2 * r) != expect_hyp {
        return Err(Error::Inconsistent("Witt basis Gram is not antidiagonal".into()));
    }
    for i in 0..2 * r {
        if g.rows() > 2 * r && (g.get(i, 2 * r).0 != 0 || g.get(2 * r, i).0 != 0) {
            return Err(Error::Inconsistent("anisotropic line is not orthogonal".into()));
        }
    }
    Ok(witt)
}

/// A Hermitian embedding `T: B^c ↪ V` with `T†·G_V·T = Gram(B^c)` and a basis of its complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub map: EMat,
    pub complement: EMat,
}

impl Embedding {
    /// `[T | C]`, an invertible change of basis of `V`.
    pub fn adapted_basis(&self) -> EMat {
        EMat::hstack(&[&self.map, &self.complement])
    }
}

/// Searches for an embedding of the Hermitian form with Gram `target` into `V`.
///
/// Returns `Ok(None)` when `dim target > dim V`.
pub fn find_embedding(target: &EMat, space: &EpsHermitianSpace) -> Result<Option<Embedding>> {
    let ctx = space.ctx().clone();
    let k = target.rows();
    let n = space.dim();
    if k > n {
        return Ok(None);
    }
    if !target.is_hermitian(&ctx) || space.epsilon() != Epsilon::Hermitian {
        return Err(Error::Precondition("embedding needs Hermitian forms on both sides".into()));
    }
    let order = ctx.order() as u64;
    let candidates = order.checked_pow(n as u32).unwrap_or(u64::MAX);
    if candidates > 10_000_000 {
        return Err(Error::BoundExceeded {
            what: "embedding search",
            size: candidates as u128,
            bound: 10_000_000,
        });
    }
    let vectors: Vec<Vec<Elem>> = (1..candidates)
        .map(|idx| EMat::from_index(n, 1, idx, ctx.order()).col(0))
        .collect();
    let mut cols: Vec<Vec<Elem>> = Vec::new();
    if !extend_embedding(&ctx, space, target, &vectors, &mut cols) {
        return Err(Error::Inconsistent("no embedding found although dimensions allow one".into()));
    }
    let map = EMat::from_columns(n, &cols);
    let pairing = map.adjoint(&ctx).mul(&ctx, space.gram());
    let complement_cols = pairing.nullspace(&ctx);
    let complement = EMat::from_columns(n, &complement_cols);
    let cross = map.adjoint(&ctx).mul(&ctx, space.gram()).mul(&ctx, &complement);
    if !cross.is_zero() {
        return Err(Error::Inconsistent("complement is not orthogonal to the image".into()));
    }
    Ok(Some(Embedding { map, complement }))
}

fn extend_embedding(
    ctx: &ExtensionContext,
    space: &EpsHermitianSpace,
    target: &EMat,
    vectors: &[Vec<Elem>],
    cols: &mut Vec<Vec<Elem>>,
) -> bool {
    let j = cols.len();
    if j == target.rows() {
        return true;
    }
    for v in vectors {
        // (T†GT)_{ij} = ⟨t_j, t_i⟩
        if space.pair(v, v) != target.get(j, j) {
            continue;
        }
        if (0..j).any(|i| space.pair(v, &cols[i]) != target.get(i, j)) {
            continue;
        }
        cols.push(v.clone());
        if extend_embedding(ctx, space, target, vectors, cols) {
            return true;
        }
        cols.pop();
    }
    false
}

/// Entrywise conjugation: the matrix of `ι(g)` on `X^c`, or the Gram matrix of `B^c`.
pub fn conjugate_transport(ctx: &ExtensionContext, m: &EMat) -> EMat {
    m.conj(ctx)
}

/// All `n×n` matrices with `A† = s·A`, `s = ±1`, in a fixed order.
pub fn hermitian_matrices(ctx: &ExtensionContext, n: usize, sign: Epsilon) -> Vec<EMat> {
    let s = sign.as_elem(ctx);
    // diagonal entries satisfy a^c = s·a: F for s = 1, E_0 for s = −1
    let diag: Vec<Elem> = ctx.elements().filter(|&a| ctx.conj(a) == ctx.mul(s, a)).collect();
    let off = n * n.saturating_sub(1) / 2;
    let total = diag.len().pow(n as u32) * (ctx.order() as usize).pow(off as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut m = EMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, diag[rem % diag.len()]);
            rem /= diag.len();
        }
        for i in 0..n {
            for j in i + 1..n {
                let e = Elem((rem % ctx.order() as usize) as u32);
                rem /= ctx.order() as usize;
                m.set(i, j, e);
                m.set(j, i, ctx.mul(s, ctx.conj(e)));
            }
        }
        out.push(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32) -> Arc<ExtensionContext> {
        Arc::new(ExtensionContext::new(p, 1).unwrap())
    }

    #[test]
    fn canonical_grams() {
        let c = ctx(3);
        let v = build_space(&c, Epsilon::Hermitian, 1, DiscChoice::Split);
        assert_eq!(v.gram(), &EMat::identity(1));
        let w = build_space(&c, Epsilon::Skew, 1, DiscChoice::NonSplit);
        assert_eq!(w.gram().get(0, 0), c.delta());
        assert_eq!(w.gram().adjoint(&c), w.gram().neg(&c));
    }

    #[test]
    fn discriminant_sign_rule() {
        let c = ctx(5);
        for n in 1..=4 {
            let v = build_space(&c, Epsilon::Hermitian, n, DiscChoice::Split);
            let expected = if (n * (n - 1) / 2) % 2 == 1 { c.neg(c.one()) } else { c.one() };
            assert_eq!(v.disc(), expected);
        }
    }

    #[test]
    fn witt_dim2_q3_has_one_pair() {
        let c = ctx(3);
        let v = build_space(&c, Epsilon::Hermitian, 2, DiscChoice::Split);
        let w = witt_decompose(&v).unwrap();
        assert_eq!(w.witt_index(), 1);
        assert!(w.anisotropic().is_none());
        assert_eq!(w.witt_gram(), split_gram(&c, Epsilon::Hermitian, 1));
        // independent oracle: an isotropic nonzero vector exists among the 80 candidates
        let isotropic = (1..81u64)
            .map(|i| EMat::from_index(2, 1, i, 9).col(0))
            .filter(|u| v.pair(u, u) == c.zero())
            .count();
        assert!(isotropic > 0);
    }

    #[test]
    fn witt_dim1_is_anisotropic() {
        let c = ctx(3);
        let v = build_space(&c, Epsilon::Hermitian, 1, DiscChoice::Split);
        let w = witt_decompose(&v).unwrap();
        assert_eq!(w.witt_index(), 0);
        assert!(w.anisotropic().is_some());
    }

    #[test]
    fn witt_handles_skew_and_odd_dims() {
        for p in [3, 5, 7] {
            let c = ctx(p);
            for eps in [Epsilon::Hermitian, Epsilon::Skew] {
                for n in 1..=4 {
                    let s = build_space(&c, eps, n, DiscChoice::Split);
                    let w = witt_decompose(&s).unwrap();
                    assert_eq!(w.witt_index(), n / 2);
                    assert_eq!(w.anisotropic().is_some(), n % 2 == 1);
                    assert_ne!(w.basis().det(&c), c.zero());
                }
            }
        }
    }

    #[test]
    fn embeddings_exist_exactly_when_dimension_allows() {
        let c = ctx(3);
        let v1 = build_space(&c, Epsilon::Hermitian, 1, DiscChoice::Split);
        for b in c.base_elements().skip(1) {
            let e = find_embedding(&EMat::scalar(1, b), &v1).unwrap().unwrap();
            assert_eq!(e.map.adjoint(&c).mul(&c, v1.gram()).mul(&c, &e.map), EMat::scalar(1, b));
            assert_eq!(e.complement.cols(), 0);
        }
        assert!(find_embedding(&EMat::identity(2), &v1).unwrap().is_none());
        let v2 = build_space(&c, Epsilon::Hermitian, 2, DiscChoice::Split);
        let e = find_embedding(&EMat::scalar(1, Elem(2)), &v2).unwrap().unwrap();
        assert_eq!(e.complement.cols(), 1);
        assert_ne!(e.adapted_basis().det(&c), c.zero());
    }

    #[test]
    fn hermitian_matrix_counts() {
        let c = ctx(3);
        assert_eq!(hermitian_matrices(&c, 1, Epsilon::Hermitian).len(), 3);
        let h2 = hermitian_matrices(&c, 2, Epsilon::Hermitian);
        assert_eq!(h2.len(), 81);
        assert!(h2.iter().all(|m| m.is_hermitian(&c)));
        let skew = hermitian_matrices(&c, 2, Epsilon::Skew);
        assert!(skew.iter().all(|m| m.adjoint(&c) == m.neg(&c)));
    }

    #[test]
    fn conjugate_transport_is_an_involution() {
        let c = ctx(3);
        for idx in (0..6561u64).step_by(17) {
            let m = EMat::from_index(2, 2, idx, 9);
            assert_eq!(conjugate_transport(&c, &conjugate_transport(&c, &m)), m);
            assert_eq!(conjugate_transport(&c, &m).det(&c), c.conj(m.det(&c)));
        }
        let b = EMat::from_rows(&[vec![Elem(1), Elem(0)], vec![Elem(0), Elem(2)]]);
        assert_eq!(conjugate_transport(&c, &b), b);
    }
}

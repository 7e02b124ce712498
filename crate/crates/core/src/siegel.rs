//! Siegel parabolic data of a split ε-Hermitian space `W = X ⊕ Y` in Witt coordinates.
//!
//! With `J = [[0, εI], [I, 0]]` the Gram matrix in the basis `(x_1..x_n, y_1..y_n)`:
//!
//! * `m ∈ GL(X)` embeds as `diag(m, m†)` where `m† := (m⁻¹)^{*}` is the dual action on `Y`
//!   (`*` the conjugate transpose), characterized by `⟨m·x, m†·y⟩ = ⟨x, y⟩`;
//! * `n(A) = [[I, A], [0, I]] ∈ N(X)` and `n(B) = [[I, 0], [B, I]] ∈ N(Y)` with `A* = −ε·A`;
//! * `P(X) = N(X)·GL(X)`, stored as pairs `(A, m)` meaning `n(A)·m`;
//! * `ψ_B(n(A)) = ψ(½·tr(A·B))`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Elem, ExtensionContext, Phase};
use crate::group::{enumerate_general_linear, isometry_group, GroupOps, MatrixGroup};
use crate::matrix::EMat;
use crate::spaces::{hermitian_matrices, split_gram, EpsHermitianSpace, Epsilon, WittDecomposition};

/// An element `n(A)·m` of the Siegel parabolic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParabolicElement {
    pub a: EMat,
    pub m: EMat,
}

#[derive(Clone, Debug)]
pub struct SiegelData {
    ctx: Arc<ExtensionContext>,
    n: usize,
    epsilon: Epsilon,
    /// Columns of the Witt basis in the coordinates of the original space.
    basis: EMat,
    gl: MatrixGroup,
    n_params: Vec<EMat>,
    n_index: HashMap<EMat, usize>,
}

impl SiegelData {
    /// Marks the Siegel data attached to a Witt decomposition with nonempty `X` and no anisotropic part.
    pub fn new(witt: &WittDecomposition, gl_bound: u128) -> Result<Self> {
        let n = witt.witt_index();
        if n == 0 {
            return Err(Error::Precondition("Siegel data needs a nonzero isotropic X".into()));
        }
        if witt.anisotropic().is_some() {
            return Err(Error::Precondition("Siegel data needs a split space".into()));
        }
        let ctx = witt.space().ctx().clone();
        Self::build(&ctx, n, witt.space().epsilon(), witt.basis(), gl_bound)
    }

    /// Siegel data of the standard split space, already in Witt coordinates.
    pub fn split(ctx: &Arc<ExtensionContext>, epsilon: Epsilon, n: usize, gl_bound: u128) -> Result<Self> {
        Self::build(ctx, n, epsilon, EMat::identity(2 * n), gl_bound)
    }

    fn build(ctx: &Arc<ExtensionContext>, n: usize, epsilon: Epsilon, basis: EMat, gl_bound: u128) -> Result<Self> {
        let gl = enumerate_general_linear(ctx, n, gl_bound)?;
        let n_params = hermitian_matrices(ctx, n, param_sign(epsilon));
        let n_index = n_params.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(SiegelData { ctx: ctx.clone(), n, epsilon, basis, gl, n_params, n_index })
    }

    pub fn ctx(&self) -> &Arc<ExtensionContext> {
        &self.ctx
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }
    /// `GL(X)` as a matrix group on `X`.
    pub fn gl(&self) -> &MatrixGroup {
        &self.gl
    }
    /// Parameters `A` of `N(X)`; the same matrices parametrize `N(Y)`.
    pub fn n_params(&self) -> &[EMat] {
        &self.n_params
    }
    pub fn n_param_index(&self, a: &EMat) -> Option<usize> {
        self.n_index.get(a).copied()
    }
    pub fn witt_basis(&self) -> &EMat {
        &self.basis
    }

    /// The space `W` with its Witt-coordinate Gram matrix.
    pub fn witt_space(&self) -> Result<EpsHermitianSpace> {
        EpsHermitianSpace::from_gram(&self.ctx, self.epsilon, split_gram(&self.ctx, self.epsilon, self.n), "W")
    }

    /// `m† = (m⁻¹)^*`.
    pub fn dual_action(&self, m: &EMat) -> Result<EMat> {
        Ok(m.inverse(&self.ctx)?.adjoint(&self.ctx))
    }

    pub fn levi(&self, m: &EMat) -> Result<EMat> {
        Ok(EMat::block_diag(&[m, &self.dual_action(m)?]))
    }

    pub fn n_x(&self, a: &EMat) -> EMat {
        let n = self.n;
        EMat::from_blocks(&EMat::identity(n), a, &EMat::zeros(n, n), &EMat::identity(n))
    }

    pub fn n_y(&self, b: &EMat) -> EMat {
        let n = self.n;
        EMat::from_blocks(&EMat::identity(n), &EMat::zeros(n, n), b, &EMat::identity(n))
    }

    /// Matrix of `n(A)·m`: `[[m, A·m†], [0, m†]]`.
    pub fn parabolic_matrix(&self, p: &ParabolicElement) -> Result<EMat> {
        Ok(self.n_x(&p.a).mul(&self.ctx, &self.levi(&p.m)?))
    }

    /// Recovers `(A, m)` from a matrix in `P(X)`, or `None` when the matrix is not in `P(X)`.
    pub fn decompose_parabolic(&self, g: &EMat) -> Option<ParabolicElement> {
        let n = self.n;
        if g.rows() != 2 * n || !g.submatrix(n, 0, n, n).is_zero() {
            return None;
        }
        let m = g.submatrix(0, 0, n, n);
        let dual = self.dual_action(&m).ok()?;
        if g.submatrix(n, n, n, n) != dual {
            return None;
        }
        // A·m† = g12  ⇒  A = g12·m^*
        let a = g.submatrix(0, n, n, n).mul(&self.ctx, &m.adjoint(&self.ctx));
        self.n_index.contains_key(&a).then_some(ParabolicElement { a, m })
    }

    /// `(A1, m1)·(A2, m2) = (A1 + m1·A2·m1^*, m1·m2)`.
    pub fn parabolic_mul(&self, p1: &ParabolicElement, p2: &ParabolicElement) -> ParabolicElement {
        let c = &self.ctx;
        let conj_a2 = p1.m.mul(c, &p2.a).mul(c, &p1.m.adjoint(c));
        ParabolicElement { a: p1.a.add(c, &conj_a2), m: p1.m.mul(c, &p2.m) }
    }

    pub fn parabolic_identity(&self) -> ParabolicElement {
        ParabolicElement { a: EMat::zeros(self.n, self.n), m: EMat::identity(self.n) }
    }

    /// `ψ_B(n(A)) = ψ(½·tr(A·B))`; fails if the trace leaves `F`.
    pub fn psi_b(&self, b: &EMat, a: &EMat) -> Result<Phase> {
        psi_trace_pairing(&self.ctx, a, b)
    }

    /// Action of `GL(X)` on `N(Y)` by conjugation: `m·B = m†·B·m⁻¹`.
    pub fn act_on_ny(&self, m: &EMat, b: &EMat) -> Result<EMat> {
        let c = &self.ctx;
        let inv = m.inverse(c)?;
        Ok(inv.adjoint(c).mul(c, b).mul(c, &inv))
    }

    /// `U(X, B) = {m ∈ GL(X) : m^*·B·m = B}`.
    pub fn unitary_of(&self, b: &EMat) -> Result<MatrixGroup> {
        let c = &self.ctx;
        self.gl.subgroup(|m| m.adjoint(c).mul(c, b).mul(c, m) == *b)
    }

    /// `S_B = U(X, B) ⋉ N(X)` as a list of parabolic elements.
    pub fn shalika_elements(&self, u_b: &MatrixGroup) -> Vec<ParabolicElement> {
        u_b.elements()
            .iter()
            .flat_map(|m| {
                self.n_params.iter().map(move |a| ParabolicElement { a: a.clone(), m: m.clone() })
            })
            .collect()
    }

    /// All of `P(X)`.
    pub fn parabolic_elements(&self) -> Vec<ParabolicElement> {
        self.shalika_elements(&self.gl)
    }

    /// Orbits of `GL(X)` on `N(Y)`: (representative, members, stabilizer order).
    pub fn orbits_on_ny(&self) -> Result<Vec<NyOrbit>> {
        let mut seen = vec![false; self.n_params.len()];
        let mut out = Vec::new();
        for start in 0..self.n_params.len() {
            if seen[start] {
                continue;
            }
            let rep = self.n_params[start].clone();
            let mut members = Vec::new();
            let mut stabilizer = 0usize;
            for m in self.gl.elements() {
                let img = self.act_on_ny(m, &rep)?;
                let idx = self.n_index[&img];
                if idx == start {
                    stabilizer += 1;
                }
                if !seen[idx] {
                    seen[idx] = true;
                    members.push(idx);
                }
            }
            members.sort_unstable();
            let rank = rep.rank(&self.ctx);
            out.push(NyOrbit { rep, members, stabilizer_order: stabilizer, rank });
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct NyOrbit {
    pub rep: EMat,
    /// Indices into [`SiegelData::n_params`].
    pub members: Vec<usize>,
    pub stabilizer_order: usize,
    pub rank: usize,
}

/// Sign `s` with `A^* = s·A` for parameters of `N(X)` when `W` has sign `ε`.
pub fn param_sign(epsilon: Epsilon) -> Epsilon {
    match epsilon {
        Epsilon::Skew => Epsilon::Hermitian,
        Epsilon::Hermitian => Epsilon::Skew,
    }
}

/// `ψ(½·tr(A·B))` with the trace asserted to lie in `F`.
pub fn psi_trace_pairing(ctx: &ExtensionContext, a: &EMat, b: &EMat) -> Result<Phase> {
    let t = a.mul(ctx, b).trace(ctx);
    if !ctx.is_base(t) {
        return Err(Error::TraceOutsideBase(t.0));
    }
    ctx.psi_phase(ctx.mul(ctx.half(), t))
}

/// Stabilizer of a form `B` described blockwise: in a basis whose first `k` vectors span
/// `ker B`, it is `{[[a, b], [0, d]] : a ∈ GL_k, d ∈ U(B'), b arbitrary}`.
pub fn predicted_stabilizer(siegel: &SiegelData, b: &EMat, bound: u128) -> Result<Vec<EMat>> {
    let ctx = siegel.ctx();
    let n = b.rows();
    let kernel = b.nullspace(ctx);
    let k = kernel.len();
    let mut cols = kernel.clone();
    for i in 0..n {
        let mut e = vec![Elem(0); n];
        e[i] = Elem(1);
        let mut trial = cols.clone();
        trial.push(e);
        if EMat::from_columns(n, &trial).rank(ctx) == trial.len() {
            cols = trial;
        }
    }
    let basis = EMat::from_columns(n, &cols);
    let basis_inv = basis.inverse(ctx)?;
    let b0 = basis.adjoint(ctx).mul(ctx, b).mul(ctx, &basis);
    let b_prime = b0.submatrix(k, k, n - k, n - k);
    if !b0.submatrix(0, 0, k, n).is_zero() {
        return Err(Error::Inconsistent("kernel-adapted basis does not split the form".into()));
    }
    let glk = if k == 0 {
        MatrixGroup::from_elements(ctx, 0, vec![EMat::identity(0)])?
    } else {
        enumerate_general_linear(ctx, k, bound)?
    };
    let u = isometry_group(ctx, Epsilon::Hermitian, &b_prime, bound)?;
    let off = (ctx.order() as u64).pow((k * (n - k)) as u32);
    let mut out = Vec::with_capacity(glk.order() * u.order() * off as usize);
    for a in glk.elements() {
        for d in u.elements() {
            for idx in 0..off {
                let mid = EMat::from_index(k, n - k, idx, ctx.order());
                let m = EMat::from_blocks(a, &mid, &EMat::zeros(n - k, k), d);
                out.push(basis.mul(ctx, &m).mul(ctx, &basis_inv));
            }
        }
    }
    out.sort();
    Ok(out)
}

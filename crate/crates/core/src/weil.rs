//! Schrödinger model of the Weil representation of `U(V) × P(X)` on functions on `Hom_E(X^c, V)`.
//!
//! A basis point is a `dim V × n` matrix `T`; since `ι` is entrywise conjugation,
//! precomposition with `ι(m)` is `T ↦ T·m^c`. Every operator is monomial,
//! `(op φ)(T) = c(T)·φ(σ(T))`:
//!
//! * `h ∈ U(V)`: `σ(T) = h⁻¹·T`, `c = χ_W(i⁻¹(det h))`;
//! * `m ∈ GL(X)`: `σ(T) = T·m^c`, `c = χ_V(det m)`;
//! * `n(A) ∈ N(X)`: `σ = id`, `c(T) = ψ(½·tr(A·Q(T)))` with `Q(T) = conj(T^*·G_V·T)`.
//!
//! `Q(T)` is the Gram matrix of the pulled-back form on `X^c` transported to `X`;
//! it satisfies `Q(T·m^c) = m^*·Q(T)·m`, which is what makes the three formulas a
//! representation of the semidirect product.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ExtensionContext, MultiplicativeCharacter, Phase, SplittingConvention};
use crate::group::{enumerate_unitary_group, GroupOps, MatrixGroup};
use crate::matrix::EMat;
use crate::siegel::{psi_trace_pairing, ParabolicElement, SiegelData};
use crate::spaces::{build_space, DiscChoice, EpsHermitianSpace, Epsilon};

/// Largest number of basis points materialized.
pub const MODEL_DIMENSION_BOUND: u64 = 1_000_000;

/// `(op φ)(T) = phase(T)·φ(perm(T))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOperator {
    pub perm: Vec<u32>,
    pub phase: Vec<Phase>,
}

impl MonomialOperator {
    pub fn identity(dim: usize) -> Self {
        MonomialOperator { perm: (0..dim as u32).collect(), phase: vec![Phase(0); dim] }
    }

    /// `self ∘ other`: `σ = σ_other ∘ σ_self`, `c = c_self·(c_other ∘ σ_self)`.
    pub fn compose(&self, ctx: &ExtensionContext, other: &Self) -> Self {
        let perm = self.perm.iter().map(|&s| other.perm[s as usize]).collect();
        let phase = self
            .perm
            .iter()
            .zip(&self.phase)
            .map(|(&s, &c)| ctx.phase_mul(c, other.phase[s as usize]))
            .collect();
        MonomialOperator { perm, phase }
    }

    pub fn trace(&self, ctx: &ExtensionContext) -> Complex64 {
        self.perm
            .iter()
            .enumerate()
            .filter(|(t, &s)| *t == s as usize)
            .map(|(t, _)| ctx.phase_value(self.phase[t]))
            .sum()
    }

    /// Largest entrywise deviation between the two operator matrices.
    pub fn distance(&self, ctx: &ExtensionContext, other: &Self) -> f64 {
        if self.perm != other.perm {
            return 2.0;
        }
        self.phase
            .iter()
            .zip(&other.phase)
            .map(|(&a, &b)| (ctx.phase_value(a) - ctx.phase_value(b)).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug)]
pub struct WeilModel {
    ctx: Arc<ExtensionContext>,
    siegel: Arc<SiegelData>,
    space_v: EpsHermitianSpace,
    chi_v: MultiplicativeCharacter,
    chi_w: MultiplicativeCharacter,
    convention: SplittingConvention,
    basis: Vec<EMat>,
    forms: Vec<EMat>,
}

impl WeilModel {
    /// Model for `W` split skew-Hermitian of dimension `2n` and `V` Hermitian of dimension `dim_v`.
    pub fn new(
        siegel: Arc<SiegelData>,
        dim_v: usize,
        chi_v: MultiplicativeCharacter,
        chi_w: MultiplicativeCharacter,
        convention: SplittingConvention,
    ) -> Result<Self> {
        let ctx = siegel.ctx().clone();
        if siegel.epsilon() != Epsilon::Skew {
            return Err(Error::Precondition("the model needs W skew-Hermitian".into()));
        }
        let n = siegel.n();
        for (chi, dim, name) in [(&chi_v, dim_v, "χ_V"), (&chi_w, 2 * n, "χ_W")] {
            let target = convention.restriction(dim);
            let expected = match target {
                crate::field::RestrictionTarget::Trivial => 0,
                crate::field::RestrictionTarget::Quadratic => (ctx.q() as u64 - 1) / 2,
            };
            if chi.restrict_to_base(&ctx).exponent != expected {
                return Err(Error::Precondition(format!(
                    "{name} does not have the prescribed restriction to F^×"
                )));
            }
        }
        let space_v = build_space(&ctx, Epsilon::Hermitian, dim_v, DiscChoice::Split);
        let size = (ctx.order() as u64).checked_pow((dim_v * n) as u32).unwrap_or(u64::MAX);
        if size > MODEL_DIMENSION_BOUND {
            return Err(Error::BoundExceeded {
                what: "Weil model dimension",
                size: size as u128,
                bound: MODEL_DIMENSION_BOUND as u128,
            });
        }
        let basis: Vec<EMat> =
            (0..size).map(|idx| EMat::from_index(dim_v, n, idx, ctx.order())).collect();
        let forms = basis
            .iter()
            .map(|t| t.adjoint(&ctx).mul(&ctx, space_v.gram()).mul(&ctx, t).conj(&ctx))
            .collect();
        let model = WeilModel { ctx, siegel, space_v, chi_v, chi_w, convention, basis, forms };
        model.self_test()?;
        Ok(model)
    }

    pub fn ctx(&self) -> &Arc<ExtensionContext> {
        &self.ctx
    }
    pub fn siegel(&self) -> &Arc<SiegelData> {
        &self.siegel
    }
    pub fn space_v(&self) -> &EpsHermitianSpace {
        &self.space_v
    }
    pub fn dim_v(&self) -> usize {
        self.space_v.dim()
    }
    pub fn n(&self) -> usize {
        self.siegel.n()
    }
    pub fn chi_v(&self) -> MultiplicativeCharacter {
        self.chi_v
    }
    pub fn chi_w(&self) -> MultiplicativeCharacter {
        self.chi_w
    }
    pub fn convention(&self) -> SplittingConvention {
        self.convention
    }
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[EMat] {
        &self.basis
    }
    /// `Q(T)` for each basis point.
    pub fn forms(&self) -> &[EMat] {
        &self.forms
    }

    pub fn unitary_group(&self, bound: u128) -> Result<MatrixGroup> {
        enumerate_unitary_group(&self.space_v, bound)
    }

    fn index_of(&self, t: &EMat) -> usize {
        t.to_index(self.ctx.order()) as usize
    }

    /// Checks that `n(A) ↦ ψ(½·tr(A·Q(T)))` is a character and that `Q` transforms correctly.
    fn self_test(&self) -> Result<()> {
        let c = &self.ctx;
        let params = self.siegel.n_params();
        let step = (self.basis.len() / 64).max(1);
        for t in (0..self.basis.len()).step_by(step) {
            let q = &self.forms[t];
            if !q.is_hermitian(c) {
                return Err(Error::Convention("Q(T) is not Hermitian".into()));
            }
            for a1 in params.iter().step_by((params.len() / 8).max(1)) {
                for a2 in params.iter().step_by((params.len() / 8).max(1)) {
                    let lhs = psi_trace_pairing(c, &a1.add(c, a2), q)?;
                    let rhs = c.phase_mul(psi_trace_pairing(c, a1, q)?, psi_trace_pairing(c, a2, q)?);
                    if lhs != rhs {
                        return Err(Error::Convention("ψ_{T*(V)} is not additive".into()));
                    }
                }
            }
            for m in self.siegel.gl().elements().iter().step_by((self.siegel.gl().order() / 16).max(1)) {
                let moved = self.index_of(&self.basis[t].mul(c, &m.conj(c)));
                let expected = m.adjoint(c).mul(c, q).mul(c, m);
                if self.forms[moved] != expected {
                    return Err(Error::Convention("Q(T·m^c) ≠ m^*·Q(T)·m".into()));
                }
            }
        }
        Ok(())
    }

    /// `χ_W(i⁻¹(det h))` for `h ∈ U(V)`.
    pub fn unitary_scalar(&self, h: &EMat) -> Result<Phase> {
        self.chi_w.phase_on_i_inverse(&self.ctx, h.det(&self.ctx))
    }

    /// `χ_V(det m)` for `m ∈ GL(X)`.
    pub fn levi_scalar(&self, m: &EMat) -> Result<Phase> {
        self.chi_v.phase(&self.ctx, m.det(&self.ctx))
    }

    pub fn op_unitary(&self, h: &EMat) -> Result<MonomialOperator> {
        if !self.space_v.is_isometry(h) {
            return Err(Error::NotActing("matrix is not an isometry of V".into()));
        }
        let c = &self.ctx;
        let hinv = h.inverse(c)?;
        let phase = self.unitary_scalar(h)?;
        let perm = self.basis.iter().map(|t| self.index_of(&hinv.mul(c, t)) as u32).collect();
        Ok(MonomialOperator { perm, phase: vec![phase; self.basis.len()] })
    }

    pub fn op_levi(&self, m: &EMat) -> Result<MonomialOperator> {
        let c = &self.ctx;
        if m.rows() != self.n() || m.det(c) == c.zero() {
            return Err(Error::NotActing("matrix is not in GL(X)".into()));
        }
        let mc = m.conj(c);
        let phase = self.levi_scalar(m)?;
        let perm = self.basis.iter().map(|t| self.index_of(&t.mul(c, &mc)) as u32).collect();
        Ok(MonomialOperator { perm, phase: vec![phase; self.basis.len()] })
    }

    pub fn op_unipotent(&self, a: &EMat) -> Result<MonomialOperator> {
        if self.siegel.n_param_index(a).is_none() {
            return Err(Error::NotActing("matrix does not parametrize N(X)".into()));
        }
        let phase = self
            .forms
            .iter()
            .map(|q| psi_trace_pairing(&self.ctx, a, q))
            .collect::<Result<Vec<_>>>()?;
        Ok(MonomialOperator { perm: (0..self.basis.len() as u32).collect(), phase })
    }

    /// Operator of `n(A)·m`.
    pub fn op_parabolic(&self, p: &ParabolicElement) -> Result<MonomialOperator> {
        Ok(self.op_unipotent(&p.a)?.compose(&self.ctx, &self.op_levi(&p.m)?))
    }

    /// `weil_action`: image point and scalar of a single basis point.
    pub fn act(&self, op: &MonomialOperator, t: usize) -> (usize, Complex64) {
        (op.perm[t] as usize, self.ctx.phase_value(op.phase[t]))
    }

    /// Basis points fixed by `(h, m)`: `h·T = T·m^c`.
    pub fn fixed_points(&self, h: &EMat, m: &EMat) -> Vec<usize> {
        let c = &self.ctx;
        let mc = m.conj(c);
        (0..self.basis.len())
            .filter(|&t| {
                let tt = &self.basis[t];
                h.mul(c, tt) == tt.mul(c, &mc)
            })
            .collect()
    }

    /// Trace of `ω(h)·ω(n(A)·m)` as a sum over fixed points, without building operators.
    pub fn character(&self, h: &EMat, p: &ParabolicElement) -> Result<Complex64> {
        let fixed = self.fixed_points(h, &p.m);
        self.character_on_fixed(h, p, &fixed)
    }

    /// Same as [`Self::character`] with the fixed-point set of `(h, p.m)` supplied.
    pub fn character_on_fixed(&self, h: &EMat, p: &ParabolicElement, fixed: &[usize]) -> Result<Complex64> {
        let c = &self.ctx;
        let base = c.phase_mul(self.unitary_scalar(h)?, self.levi_scalar(&p.m)?);
        let mut s = Complex64::new(0.0, 0.0);
        for &t in fixed {
            let ph = psi_trace_pairing(c, &p.a, &self.forms[t])?;
            s += c.phase_value(c.phase_mul(base, ph));
        }
        Ok(s)
    }

    /// Basis points with `T^*·G_V·T = Gram(B^c)`, i.e. `Q(T) = B`.
    pub fn orbit_of_form(&self, b: &EMat) -> Vec<usize> {
        (0..self.basis.len()).filter(|&t| self.forms[t] == *b).collect()
    }

    /// Character of the `ψ_B`-coinvariants at `(m, h) ∈ U(B) × U(V)` via the `N(X)`-average.
    pub fn jacquet_character(&self, b: &EMat, m: &EMat, h: &EMat) -> Result<Complex64> {
        let c = &self.ctx;
        let fixed = self.fixed_points(h, m);
        let params = self.siegel.n_params();
        let mut total = Complex64::new(0.0, 0.0);
        for a in params {
            // m·n(A) = n(m·A·m^*)·m
            let p = ParabolicElement { a: m.mul(c, a).mul(c, &m.adjoint(c)), m: m.clone() };
            let twist = c.phase_value(self.siegel.psi_b(b, a)?).conj();
            total += self.character_on_fixed(h, &p, &fixed)? * twist;
        }
        Ok(total / params.len() as f64)
    }

    /// Character of the `ψ_B`-isotypic subspace computed directly on its basis `O_B`.
    pub fn isotypic_character(&self, b: &EMat, m: &EMat, h: &EMat) -> Result<Complex64> {
        let c = &self.ctx;
        let mc = m.conj(c);
        let base = c.phase_mul(self.unitary_scalar(h)?, self.levi_scalar(m)?);
        let count = self
            .orbit_of_form(b)
            .into_iter()
            .filter(|&t| h.mul(c, &self.basis[t]) == self.basis[t].mul(c, &mc))
            .count();
        Ok(c.phase_value(base) * count as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{character_family, RestrictionTarget};
    use crate::group::DEFAULT_ORDER_BOUND;

    fn model(n: usize, dim_v: usize) -> WeilModel {
        let ctx = Arc::new(ExtensionContext::new(3, 1).unwrap());
        let siegel = Arc::new(SiegelData::split(&ctx, Epsilon::Skew, n, DEFAULT_ORDER_BOUND).unwrap());
        let fam = character_family(&ctx, RestrictionTarget::Trivial);
        WeilModel::new(siegel, dim_v, fam.with_restriction[1], fam.with_restriction[2], SplittingConvention::NormResidue)
            .unwrap()
    }

    #[test]
    fn dimension_is_q_to_the_2n_dim_v() {
        let m = model(1, 2);
        assert_eq!(m.dimension(), 81);
        let id = m.siegel().parabolic_identity();
        let value = m.character(&EMat::identity(2), &id).unwrap();
        assert!((value - Complex64::new(81.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn identity_and_zero_point() {
        let m = model(1, 1);
        let op = m.op_parabolic(&m.siegel().parabolic_identity()).unwrap();
        assert_eq!(op, MonomialOperator::identity(m.dimension()));
        for a in m.siegel().n_params() {
            let (t, s) = m.act(&m.op_unipotent(a).unwrap(), 0);
            assert_eq!(t, 0);
            assert!((s - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn character_is_bounded_by_dimension_and_matches_operator_trace() {
        let m = model(1, 2);
        let u = m.unitary_group(DEFAULT_ORDER_BOUND).unwrap();
        let ps = m.siegel().parabolic_elements();
        for h in u.elements().iter().step_by(11) {
            for p in ps.iter().step_by(5) {
                let direct = m.character(h, p).unwrap();
                let op = m.op_unitary(h).unwrap().compose(m.ctx(), &m.op_parabolic(p).unwrap());
                assert!((direct - op.trace(m.ctx())).norm() < 1e-9);
                assert!(direct.norm() <= m.dimension() as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn elements_outside_acting_groups_are_rejected() {
        let m = model(1, 1);
        let not_unitary = EMat::scalar(1, crate::field::Elem(2));
        assert!(m.op_unitary(&not_unitary).is_ok() == m.space_v().is_isometry(&not_unitary));
        let bad = EMat::scalar(1, m.ctx().generator());
        assert!(matches!(m.op_unitary(&bad), Err(Error::NotActing(_))));
        assert!(matches!(m.op_unipotent(&EMat::scalar(1, bad.get(0, 0))), Err(Error::NotActing(_))));
    }

    #[test]
    fn isotypic_dimension_equals_orbit_size() {
        let m = model(1, 2);
        let b = EMat::scalar(1, crate::field::Elem(1));
        let id1 = EMat::identity(1);
        let id2 = EMat::identity(2);
        let via_average = m.jacquet_character(&b, &id1, &id2).unwrap();
        let via_orbit = m.isotypic_character(&b, &id1, &id2).unwrap();
        assert!((via_average - via_orbit).norm() < 1e-9);
        assert!((via_orbit.re - 24.0).abs() < 1e-9);
    }

    #[test]
    fn wrong_restriction_is_rejected() {
        let ctx = Arc::new(ExtensionContext::new(3, 1).unwrap());
        let siegel = Arc::new(SiegelData::split(&ctx, Epsilon::Skew, 1, DEFAULT_ORDER_BOUND).unwrap());
        let odd = character_family(&ctx, RestrictionTarget::Quadratic).with_restriction[0];
        let triv = character_family(&ctx, RestrictionTarget::Trivial).with_restriction[0];
        assert!(WeilModel::new(siegel.clone(), 1, odd, triv, SplittingConvention::NormResidue).is_err());
        assert!(WeilModel::new(siegel, 1, odd, triv, SplittingConvention::Quadratic).is_ok());
    }
}

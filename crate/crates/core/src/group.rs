//! Finite groups given by explicit element lists, and enumeration of unitary and general linear groups.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Elem, ExtensionContext};
use crate::matrix::EMat;
use crate::spaces::{witt_decompose, EpsHermitianSpace, Epsilon};

/// Default bound on enumerated group orders.
pub const DEFAULT_ORDER_BOUND: u128 = 1_000_000;

/// Largest matrix search space that is filtered directly rather than generated.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

const CAYLEY_TABLE_LIMIT: usize = 1 << 22;

/// Elements are `0..order()`; the identity need not be element 0.
pub trait GroupOps: Sync {
    fn order(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    fn inv(&self, a: usize) -> usize;
    fn identity(&self) -> usize;

    fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }
}

/// A group given by its multiplication table.
#[derive(Clone, Debug)]
pub struct CayleyGroup {
    n: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
    identity: usize,
}

impl CayleyGroup {
    pub fn from_fn(n: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = mul(a, b);
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e * n + a] == a && table[a * n + e] == a))
            .ok_or_else(|| Error::Precondition("table has no identity".into()))?;
        let inverses = (0..n)
            .map(|a| (0..n).find(|&b| table[a * n + b] == identity))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Precondition("table has non-invertible elements".into()))?;
        Ok(CayleyGroup { n, table, inverses, identity })
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_fn(n, |a, b| (a + b) % n).expect("cyclic group table is valid")
    }

    /// Direct product of cyclic groups, elements in mixed-radix order.
    pub fn abelian(factors: &[usize]) -> Self {
        let n: usize = factors.iter().product();
        Self::from_fn(n, |a, b| {
            let (mut x, mut y, mut out, mut radix) = (a, b, 0, 1);
            for &f in factors {
                out += ((x % f + y % f) % f) * radix;
                x /= f;
                y /= f;
                radix *= f;
            }
            out
        })
        .expect("abelian group table is valid")
    }

    /// `S_n` acting on `0..n`, elements in lexicographic order of permutations.
    pub fn symmetric(n: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut stack = vec![(Vec::<usize>::new(), (0..n).collect::<Vec<_>>())];
        while let Some((prefix, rest)) = stack.pop() {
            if rest.is_empty() {
                perms.push(prefix);
                continue;
            }
            for i in (0..rest.len()).rev() {
                let mut p = prefix.clone();
                p.push(rest[i]);
                let mut r = rest.clone();
                r.remove(i);
                stack.push((p, r));
            }
        }
        perms.sort();
        let index: HashMap<Vec<usize>, usize> =
            perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Self::from_fn(perms.len(), |a, b| {
            let c: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
            index[&c]
        })
        .expect("symmetric group table is valid")
    }
}

impl GroupOps for CayleyGroup {
    fn order(&self) -> usize {
        self.n
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }
    fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }
    fn identity(&self) -> usize {
        self.identity
    }
}

/// A finite group of invertible matrices over `E`, fully enumerated.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    ctx: Arc<ExtensionContext>,
    dim: usize,
    elements: Vec<EMat>,
    index: HashMap<EMat, usize>,
    inverses: Vec<usize>,
    identity: usize,
    table: Option<Vec<u32>>,
}

impl MatrixGroup {
    /// Wraps an element list that is already known to be closed.
    pub fn from_elements(ctx: &Arc<ExtensionContext>, dim: usize, mut elements: Vec<EMat>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        let index: HashMap<EMat, usize> =
            elements.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let identity = *index
            .get(&EMat::identity(dim))
            .ok_or_else(|| Error::Precondition("element list lacks the identity".into()))?;
        let mut inverses = Vec::with_capacity(elements.len());
        for m in &elements {
            let inv = m.inverse(ctx)?;
            inverses.push(*index.get(&inv).ok_or_else(|| {
                Error::Precondition("element list is not closed under inversion".into())
            })?);
        }
        let mut group = MatrixGroup {
            ctx: ctx.clone(),
            dim,
            elements,
            index,
            inverses,
            identity,
            table: None,
        };
        let n = group.elements.len();
        if n * n <= CAYLEY_TABLE_LIMIT {
            let mut table = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    let prod = group.elements[a].mul(ctx, &group.elements[b]);
                    table[a * n + b] = *group.index.get(&prod).ok_or_else(|| {
                        Error::Precondition("element list is not closed under products".into())
                    })? as u32;
                }
            }
            group.table = Some(table);
        }
        Ok(group)
    }

    pub fn ctx(&self) -> &Arc<ExtensionContext> {
        &self.ctx
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn elements(&self) -> &[EMat] {
        &self.elements
    }
    pub fn element(&self, i: usize) -> &EMat {
        &self.elements[i]
    }
    pub fn index_of(&self, m: &EMat) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Subgroup of elements satisfying a predicate (assumed closed).
    pub fn subgroup(&self, keep: impl Fn(&EMat) -> bool) -> Result<MatrixGroup> {
        let elems = self.elements.iter().filter(|m| keep(m)).cloned().collect();
        MatrixGroup::from_elements(&self.ctx, self.dim, elems)
    }

    /// Indices (in `self`) of the elements of a subgroup.
    pub fn embed(&self, sub: &MatrixGroup) -> Result<Vec<usize>> {
        sub.elements
            .iter()
            .map(|m| {
                self.index_of(m)
                    .ok_or_else(|| Error::Precondition("subgroup element outside the group".into()))
            })
            .collect()
    }

    /// Direct product realized as block-diagonal matrices `diag(a, b)`.
    pub fn direct_product(a: &MatrixGroup, b: &MatrixGroup) -> Result<MatrixGroup> {
        let mut elems = Vec::with_capacity(a.order() * b.order());
        for x in &a.elements {
            for y in &b.elements {
                elems.push(EMat::block_diag(&[x, y]));
            }
        }
        MatrixGroup::from_elements(&a.ctx, a.dim + b.dim, elems)
    }

    /// Splits an element of a block-diagonal product back into its factors.
    pub fn split_block(m: &EMat, first: usize) -> (EMat, EMat) {
        let n = m.rows();
        (m.submatrix(0, 0, first, first), m.submatrix(first, first, n - first, n - first))
    }
}

impl GroupOps for MatrixGroup {
    fn order(&self) -> usize {
        self.elements.len()
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.elements.len() + b] as usize,
            None => {
                let prod = self.elements[a].mul(&self.ctx, &self.elements[b]);
                self.index[&prod]
            }
        }
    }
    fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }
    fn identity(&self) -> usize {
        self.identity
    }
}

/// `|U_n(F_q)| = q^{n(n−1)/2}·Π_{i=1}^{n} (q^i − (−1)^i)`.
pub fn unitary_group_order(q: u64, n: u32) -> u128 {
    let q = q as i128;
    let mut order = q.pow(n * n.saturating_sub(1) / 2);
    for i in 1..=n {
        order *= q.pow(i) - if i % 2 == 0 { 1 } else { -1 };
    }
    order as u128
}

/// `|GL_n(F_Q)| = Π_{i=0}^{n−1} (Q^n − Q^i)`.
pub fn general_linear_order(order_q: u64, n: u32) -> u128 {
    let big = (order_q as u128).pow(n);
    (0..n).map(|i| big - (order_q as u128).pow(i)).product()
}

/// All isometries of the space, by brute force or by generator closure depending on size.
pub fn enumerate_unitary_group(space: &EpsHermitianSpace, bound: u128) -> Result<MatrixGroup> {
    let ctx = space.ctx();
    let n = space.dim() as u32;
    let expected = unitary_group_order(ctx.q() as u64, n);
    if expected > bound {
        return Err(Error::BoundExceeded { what: "unitary group order", size: expected, bound });
    }
    let search = (ctx.order() as u128).checked_pow(n * n).unwrap_or(u128::MAX);
    let group = if search <= BRUTE_FORCE_LIMIT {
        unitary_by_search(space)?
    } else {
        unitary_by_closure(space, bound)?
    };
    if group.order() as u128 != expected {
        return Err(Error::ClosureIncomplete { reached: group.order(), expected });
    }
    Ok(group)
}

/// Column-by-column search for all `g` with `g†Gg = G`.
pub fn unitary_by_search(space: &EpsHermitianSpace) -> Result<MatrixGroup> {
    let ctx = space.ctx();
    let n = space.dim();
    let order = ctx.order() as u64;
    let vectors: Vec<Vec<Elem>> = (0..order.pow(n as u32))
        .map(|idx| EMat::from_index(n, 1, idx, ctx.order()).col(0))
        .collect();
    let gram = space.gram();
    let mut out = Vec::new();
    let mut cols: Vec<&Vec<Elem>> = Vec::with_capacity(n);
    fn rec<'a>(
        space: &EpsHermitianSpace,
        gram: &EMat,
        vectors: &'a [Vec<Elem>],
        cols: &mut Vec<&'a Vec<Elem>>,
        out: &mut Vec<EMat>,
    ) {
        let n = space.dim();
        let j = cols.len();
        if j == n {
            let owned: Vec<Vec<Elem>> = cols.iter().map(|c| (*c).clone()).collect();
            out.push(EMat::from_columns(n, &owned));
            return;
        }
        for v in vectors {
            // (g†Gg)_{ij} = ⟨g_j, g_i⟩
            if space.pair(v, v) != gram.get(j, j) {
                continue;
            }
            if (0..j).any(|i| space.pair(v, cols[i]) != gram.get(i, j)) {
                continue;
            }
            cols.push(v);
            rec(space, gram, vectors, cols, out);
            cols.pop();
        }
    }
    rec(space, gram, &vectors, &mut cols, &mut out);
    MatrixGroup::from_elements(ctx, n, out)
}

/// Additive generators of `E` over `F_p`: indices `p^s`, `s < 2f`.
fn additive_basis(ctx: &ExtensionContext) -> Vec<Elem> {
    (0..2 * ctx.f()).map(|s| Elem(ctx.p().pow(s))).collect()
}

fn closure(ctx: &Arc<ExtensionContext>, dim: usize, gens: &[EMat], bound: u128) -> Result<MatrixGroup> {
    let mut seen: HashMap<EMat, ()> = HashMap::new();
    let id = EMat::identity(dim);
    let mut queue = VecDeque::from([id.clone()]);
    seen.insert(id, ());
    let mut elements = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(ctx, g);
            if !seen.contains_key(&y) {
                if seen.len() as u128 >= bound {
                    return Err(Error::BoundExceeded {
                        what: "generator closure",
                        size: seen.len() as u128 + 1,
                        bound,
                    });
                }
                seen.insert(y.clone(), ());
                queue.push_back(y);
            }
        }
        elements.push(x);
    }
    MatrixGroup::from_elements(ctx, dim, elements)
}

/// Generator closure in Witt coordinates: Levi, unipotent radical, Weyl element and
/// quasi-reflections through anisotropic vectors, conjugated back to the given basis.
pub fn unitary_by_closure(space: &EpsHermitianSpace, bound: u128) -> Result<MatrixGroup> {
    let ctx = space.ctx();
    let n = space.dim();
    let witt = witt_decompose(space)?;
    let r = witt.witt_index();
    let p = witt.basis();
    let p_inv = p.inverse(ctx)?;
    let wg = witt.witt_gram();
    let epsilon = space.epsilon().as_elem(ctx);
    let mut gens_witt: Vec<EMat> = Vec::new();

    let embed_levi = |m: &EMat| -> Result<EMat> {
        let dual = m.inverse(ctx)?.adjoint(ctx);
        let mut g = EMat::identity(n);
        g.paste(0, 0, m);
        g.paste(r, r, &dual);
        Ok(g)
    };
    if r > 0 {
        let mut d = EMat::identity(r);
        d.set(0, 0, ctx.generator());
        gens_witt.push(embed_levi(&d)?);
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                for &e in &additive_basis(ctx) {
                    let mut m = EMat::identity(r);
                    m.set(i, j, e);
                    gens_witt.push(embed_levi(&m)?);
                }
            }
        }
        // n(A) with A = −ε·A†
        let s = ctx.neg(epsilon);
        let diag_vals: Vec<Elem> = additive_basis(ctx)
            .into_iter()
            .map(|e| ctx.add(e, ctx.mul(s, ctx.conj(e))))
            .filter(|&a| a != ctx.zero())
            .collect();
        let mut push_n = |a: EMat| {
            let mut g = EMat::identity(n);
            g.paste(0, r, &a);
            gens_witt.push(g);
        };
        for i in 0..r {
            for &d in &diag_vals {
                let mut a = EMat::zeros(r, r);
                a.set(i, i, d);
                push_n(a);
            }
            for j in i + 1..r {
                for &e in &additive_basis(ctx) {
                    let mut a = EMat::zeros(r, r);
                    a.set(i, j, e);
                    a.set(j, i, ctx.mul(s, ctx.conj(e)));
                    push_n(a);
                }
            }
        }
        // w = [[0, εI], [I, 0]] on the hyperbolic part
        let mut w = EMat::identity(n);
        w.paste(0, 0, &EMat::zeros(2 * r, 2 * r));
        w.paste(0, r, &EMat::scalar(r, epsilon));
        w.paste(r, 0, &EMat::identity(r));
        gens_witt.push(w);
    }
    let zeta = ctx.exp(ctx.q() as i64 - 1);
    if witt.anisotropic().is_some() {
        let mut u = EMat::identity(n);
        u.set(n - 1, n - 1, zeta);
        gens_witt.push(u);
    }
    // quasi-reflections through anisotropic vectors mixing coordinates
    let s = ctx.sub(zeta, ctx.one());
    let mut candidates: Vec<Vec<Elem>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for &c in &[ctx.one(), ctx.generator()] {
                let mut v = vec![ctx.zero(); n];
                v[i] = ctx.add(v[i], ctx.one());
                if j != i {
                    v[j] = ctx.add(v[j], c);
                }
                candidates.push(v);
            }
        }
    }
    for v in candidates {
        let c = crate::matrix::form_value(ctx, &wg, &v, &v);
        if c == ctx.zero() {
            continue;
        }
        let col = EMat::column(&v);
        let coeff = ctx.div(s, c)?;
        let refl = EMat::identity(n).add(ctx, &col.mul(ctx, &col.adjoint(ctx)).mul(ctx, &wg).scale(ctx, coeff));
        gens_witt.push(refl);
    }
    let gens: Vec<EMat> = gens_witt.iter().map(|g| p.mul(ctx, g).mul(ctx, &p_inv)).collect();
    debug_assert!(gens.iter().all(|g| space.is_isometry(g)));
    closure(ctx, n, &gens, bound)
}

/// `GL_n(E)`, by filtering all matrices or by closure from elementary generators.
pub fn enumerate_general_linear(ctx: &Arc<ExtensionContext>, n: usize, bound: u128) -> Result<MatrixGroup> {
    let expected = general_linear_order(ctx.order() as u64, n as u32);
    if expected > bound {
        return Err(Error::BoundExceeded { what: "general linear group order", size: expected, bound });
    }
    let search = (ctx.order() as u128).pow((n * n) as u32);
    let group = if search <= BRUTE_FORCE_LIMIT {
        let elems = (0..search as u64)
            .map(|idx| EMat::from_index(n, n, idx, ctx.order()))
            .filter(|m| m.det(ctx) != ctx.zero())
            .collect();
        MatrixGroup::from_elements(ctx, n, elems)?
    } else {
        let mut gens = Vec::new();
        let mut d = EMat::identity(n);
        d.set(0, 0, ctx.generator());
        gens.push(d);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    for &e in &additive_basis(ctx) {
                        let mut m = EMat::identity(n);
                        m.set(i, j, e);
                        gens.push(m);
                    }
                }
            }
        }
        closure(ctx, n, &gens, bound)?
    };
    if group.order() as u128 != expected {
        return Err(Error::ClosureIncomplete { reached: group.order(), expected });
    }
    Ok(group)
}

/// Isometry group of a Hermitian or skew-Hermitian Gram matrix.
pub fn isometry_group(ctx: &Arc<ExtensionContext>, eps: Epsilon, gram: &EMat, bound: u128) -> Result<MatrixGroup> {
    if gram.rows() == 0 {
        return MatrixGroup::from_elements(ctx, 0, vec![EMat::identity(0)]);
    }
    let space = EpsHermitianSpace::from_gram(ctx, eps, gram.clone(), "isometry")?;
    enumerate_unitary_group(&space, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_space, DiscChoice};

    fn ctx(p: u32) -> Arc<ExtensionContext> {
        Arc::new(ExtensionContext::new(p, 1).unwrap())
    }

    #[test]
    fn order_formula_small_cases() {
        assert_eq!(unitary_group_order(3, 1), 4);
        assert_eq!(unitary_group_order(3, 2), 96);
        assert_eq!(unitary_group_order(3, 0), 1);
        assert_eq!(general_linear_order(9, 1), 8);
        assert_eq!(general_linear_order(9, 2), 5760);
    }

    #[test]
    fn u1_q3_has_four_elements() {
        let c = ctx(3);
        let v = build_space(&c, Epsilon::Hermitian, 1, DiscChoice::Split);
        let g = enumerate_unitary_group(&v, DEFAULT_ORDER_BOUND).unwrap();
        assert_eq!(g.order(), 4);
        let brute = c.units().filter(|&e| c.norm(e) == c.one()).count();
        assert_eq!(brute, 4);
    }

    #[test]
    fn u2_q3_closure_matches_search() {
        let c = ctx(3);
        for eps in [Epsilon::Hermitian, Epsilon::Skew] {
            let v = build_space(&c, eps, 2, DiscChoice::Split);
            let a = unitary_by_search(&v).unwrap();
            let b = unitary_by_closure(&v, DEFAULT_ORDER_BOUND).unwrap();
            assert_eq!(a.order(), 96);
            assert_eq!(a.elements(), b.elements());
            // independent count over all 6561 matrices
            let brute = (0..6561u64)
                .map(|i| EMat::from_index(2, 2, i, 9))
                .filter(|g| v.is_isometry(g))
                .count();
            assert_eq!(brute, 96);
        }
    }

    #[test]
    fn closure_reaches_full_order_in_dim_three() {
        let c = ctx(3);
        let v = build_space(&c, Epsilon::Hermitian, 3, DiscChoice::Split);
        let g = unitary_by_closure(&v, DEFAULT_ORDER_BOUND).unwrap();
        assert_eq!(g.order() as u128, unitary_group_order(3, 3));
        assert!(g.elements().iter().all(|m| v.is_isometry(m)));
    }

    #[test]
    fn bound_is_enforced() {
        let c = ctx(3);
        let v = build_space(&c, Epsilon::Hermitian, 2, DiscChoice::Split);
        assert!(matches!(
            enumerate_unitary_group(&v, 50),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn matrix_group_is_closed() {
        let c = ctx(3);
        let g = enumerate_general_linear(&c, 1, DEFAULT_ORDER_BOUND).unwrap();
        assert_eq!(g.order(), 8);
        for a in 0..g.order() {
            assert_eq!(g.mul(a, g.inv(a)), g.identity());
        }
    }

    #[test]
    fn symmetric_group_table() {
        let s3 = CayleyGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        let nonabelian = (0..6).any(|a| (0..6).any(|b| s3.mul(a, b) != s3.mul(b, a)));
        assert!(nonabelian);
    }
}

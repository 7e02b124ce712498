use std::sync::Arc;

use proptest::prelude::*;
use unitary_periods::character::{character_table, conjugacy_classes};
use unitary_periods::field::{CharDomain, Elem, ExtensionContext, MultiplicativeCharacter};
use unitary_periods::group::{enumerate_unitary_group, DEFAULT_ORDER_BOUND};
use unitary_periods::lparam::{CharExpr, EtaCharacter};
use unitary_periods::matrix::EMat;
use unitary_periods::spaces::{build_space, DiscChoice, Epsilon};

fn fields() -> Vec<Arc<ExtensionContext>> {
    [(3, 1), (5, 1), (3, 2), (7, 1)]
        .into_iter()
        .map(|(p, f)| Arc::new(ExtensionContext::new(p, f).unwrap()))
        .collect()
}

fn elem(ctx: &ExtensionContext, raw: u32) -> Elem {
    Elem(raw % ctx.order())
}

proptest! {
    #[test]
    fn field_axioms(which in 0usize..4, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let ctx = &fields()[which];
        let (a, b, c) = (elem(ctx, a), elem(ctx, b), elem(ctx, c));
        prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
        prop_assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
        prop_assert_eq!(ctx.sub(ctx.add(a, b), b), a);
        if a != ctx.zero() {
            prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), ctx.one());
        }
    }

    #[test]
    fn conjugation_trace_and_norm(which in 0usize..4, a in any::<u32>(), b in any::<u32>()) {
        let ctx = &fields()[which];
        let (a, b) = (elem(ctx, a), elem(ctx, b));
        prop_assert_eq!(ctx.conj(ctx.conj(a)), a);
        prop_assert_eq!(ctx.conj(ctx.mul(a, b)), ctx.mul(ctx.conj(a), ctx.conj(b)));
        prop_assert!(ctx.is_base(ctx.trace(a)));
        prop_assert!(ctx.is_base(ctx.norm(a)));
        prop_assert_eq!(ctx.norm(ctx.mul(a, b)), ctx.mul(ctx.norm(a), ctx.norm(b)));
        prop_assert_eq!(ctx.trace(ctx.add(a, b)), ctx.add(ctx.trace(a), ctx.trace(b)));
    }

    #[test]
    fn additive_character_is_a_homomorphism(which in 0usize..4, a in any::<u32>(), b in any::<u32>()) {
        let ctx = &fields()[which];
        let base: Vec<Elem> = ctx.base_elements().collect();
        let (a, b) = (base[a as usize % base.len()], base[b as usize % base.len()]);
        let lhs = ctx.psi_phase(ctx.add(a, b)).unwrap();
        let rhs = ctx.phase_mul(ctx.psi_phase(a).unwrap(), ctx.psi_phase(b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplicative_characters_multiply(which in 0usize..4, k in 0i64..64, a in 1u32.., b in 1u32..) {
        let ctx = &fields()[which];
        let units: Vec<Elem> = ctx.units().collect();
        let (a, b) = (units[a as usize % units.len()], units[b as usize % units.len()]);
        let chi = MultiplicativeCharacter::new(ctx, k, CharDomain::Units);
        let lhs = chi.phase(ctx, ctx.mul(a, b)).unwrap();
        prop_assert_eq!(lhs, ctx.phase_mul(chi.phase(ctx, a).unwrap(), chi.phase(ctx, b).unwrap()));
    }

    #[test]
    fn i_map_round_trip(which in 0usize..4, a in 1u32..) {
        let ctx = &fields()[which];
        let units: Vec<Elem> = ctx.units().collect();
        let e = units[a as usize % units.len()];
        let u = ctx.i_map(e).unwrap();
        prop_assert_eq!(ctx.norm(u), ctx.one());
        let back = ctx.i_inverse(u).unwrap();
        prop_assert_eq!(ctx.i_map(back).unwrap(), u);
    }

    #[test]
    fn matrix_inverse_and_determinant(idx in any::<u64>(), jdx in any::<u64>()) {
        let ctx = &fields()[0];
        let total = (ctx.order() as u64).pow(4);
        let a = EMat::from_index(2, 2, idx % total, ctx.order());
        let b = EMat::from_index(2, 2, jdx % total, ctx.order());
        prop_assert_eq!(a.mul(ctx, &b).det(ctx), ctx.mul(a.det(ctx), b.det(ctx)));
        if let Ok(inv) = a.inverse(ctx) {
            prop_assert_eq!(a.mul(ctx, &inv), EMat::identity(2));
        } else {
            prop_assert_eq!(a.det(ctx), ctx.zero());
        }
    }

    #[test]
    fn char_expr_display_round_trips(exps in proptest::collection::btree_map("[a-z][a-z0-9_]{0,4}", -3i32..4, 0..4)) {
        let mut e = CharExpr::one();
        for (k, v) in &exps {
            e = e.mul(&CharExpr::symbol(k).pow(*v));
        }
        prop_assert_eq!(CharExpr::parse(&e.to_string()).unwrap(), e.clone());
        prop_assert_eq!(e.mul(&e.inverse()), CharExpr::one());
    }

    #[test]
    fn eta_is_a_character(minus in any::<u64>(), x in any::<u64>(), y in any::<u64>()) {
        let eta = EtaCharacter { minus };
        prop_assert_eq!(eta.eval(x ^ y), eta.eval(x) * eta.eval(y));
    }
}

#[test]
fn unitary_group_of_rank_two_over_f3() {
    let ctx = Arc::new(ExtensionContext::new(3, 1).unwrap());
    let v = build_space(&ctx, Epsilon::Hermitian, 2, DiscChoice::Split);
    let g = enumerate_unitary_group(&v, DEFAULT_ORDER_BOUND).unwrap();
    assert_eq!(g.elements().len(), 96);
    let classes = conjugacy_classes(&g).unwrap();
    let table = character_table(&g, &classes, 3).unwrap();
    assert_eq!(table.sum_of_squares(), 96);
    assert_eq!(table.degrees[0], 1);
    assert!(table.orthogonality_residual < 1e-8);
}

#[test]
fn unitary_groups_over_larger_fields() {
    for (p, f, dim, order) in [(5, 1, 1, 6usize), (5, 1, 2, 720), (3, 2, 1, 10)] {
        let ctx = Arc::new(ExtensionContext::new(p, f).unwrap());
        let v = build_space(&ctx, Epsilon::Hermitian, dim, DiscChoice::Split);
        let g = enumerate_unitary_group(&v, DEFAULT_ORDER_BOUND).unwrap();
        assert_eq!(g.elements().len(), order, "U({dim}) over F_{}", ctx.q());
    }
}

//! Executable checks of the structural identities in the finite-field model.
//!
//! Each verification returns a [`VerificationReport`] whose checks compare two
//! quantities computed along independent routes: monomial fixed-point traces of
//! the Weil model on one side, Frobenius induction or direct counting on the other.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::character::{
    character_table, conjugacy_classes, hom_dim, induced_character, restrict_values,
    snap_nonnegative_integer, CharacterTable, ClassFunction, ConjugacyClasses,
};
use crate::error::{Error, Result};
use crate::field::{
    all_characters, character_family, CharDomain, ExtensionContext, MultiplicativeCharacter, Phase,
    RestrictionTarget, SplittingConvention,
};
use crate::group::{enumerate_unitary_group, isometry_group, GroupOps, MatrixGroup, DEFAULT_ORDER_BOUND};
use crate::matrix::EMat;
use crate::siegel::{predicted_stabilizer, psi_trace_pairing, ParabolicElement, SiegelData};
use crate::spaces::{find_embedding, Embedding, Epsilon};
use crate::tolerance::{FINAL_TOL, OPERATOR_TOL, ORTHOGONALITY_TOL};
use crate::weil::{MonomialOperator, WeilModel};

/// Version of the JSON report layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The statement this check instantiates.
    pub citation: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<i64>,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, citation: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            citation: citation.to_string(),
            passed,
            residual: None,
            lhs: None,
            rhs: None,
            detail: detail.into(),
        }
    }

    fn residual(name: impl Into<String>, citation: &str, residual: f64, tol: f64, detail: impl Into<String>) -> Self {
        let mut c = Check::new(name, citation, residual < tol, detail);
        c.residual = Some(residual);
        c
    }

    fn equality(name: impl Into<String>, citation: &str, lhs: i64, rhs: i64, detail: impl Into<String>) -> Self {
        let mut c = Check::new(name, citation, lhs == rhs, detail);
        c.lhs = Some(lhs);
        c.rhs = Some(rhs);
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: String,
    pub scenario: BTreeMap<String, String>,
    /// The statement over a p-adic field.
    pub padic_statement: String,
    /// What is actually checked over the finite field.
    pub finite_statement: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerificationReport {
    fn new(kind: &str, ctx: &ExtensionContext, padic: &str, finite: &str) -> Self {
        let mut scenario = BTreeMap::new();
        scenario.insert("p".into(), ctx.p().to_string());
        scenario.insert("f".into(), ctx.f().to_string());
        scenario.insert("modulus".into(), ctx.modulus_description());
        scenario.insert("delta".into(), ctx.delta().0.to_string());
        scenario.insert(
            "psi_B convention".into(),
            "psi(1/2 tr(A B)) with the E-linear trace, asserted to lie in F".into(),
        );
        VerificationReport {
            kind: kind.into(),
            scenario,
            padic_statement: padic.into(),
            finite_statement: finite.into(),
            checks: Vec::new(),
            passed: true,
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.scenario.insert(key.into(), value.to_string());
    }

    fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

const CITE_WEIL: &str = "Schrödinger model formulas for the U(V) x P(X) action";
const CITE_JACQUET: &str = "twisted Jacquet module of the Weil representation along N(X)";
const CITE_TRANSFER: &str = "isomorphism between Shalika-type and Friedberg-Jacquet-type Hom spaces under theta";
const CITE_STRATA: &str = "GL(X)-orbits on N(Y) by kernel dimension and their stabilizers";
const CITE_FILTRATION: &str = "U(W)-equivariant filtration of the GL(X)-period induced module";
const CITE_TABLES: &str = "character table validation";

/// Enumeration bound, table seed and pass tolerances for a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub bound: u128,
    pub seed: u64,
    /// Tolerance for snapped integers and classwise character comparisons.
    pub final_tol: f64,
    /// Tolerance for operator identities in the Weil model.
    pub operator_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { bound: DEFAULT_ORDER_BOUND, seed: 0, final_tol: FINAL_TOL, operator_tol: OPERATOR_TOL }
    }
}

/// Scenario-level choices shared by the Weil-model verifications.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingChoice {
    /// Index into the family of characters of `E^×` with the prescribed restriction for `V`.
    pub chi_v: usize,
    /// Same for `W`.
    pub chi_w: usize,
    pub convention: SplittingConvention,
}

impl Default for SplittingChoice {
    fn default() -> Self {
        SplittingChoice { chi_v: 0, chi_w: 0, convention: SplittingConvention::NormResidue }
    }
}

/// Builds the model with the selected splitting characters.
pub fn build_model(siegel: &Arc<SiegelData>, dim_v: usize, choice: SplittingChoice) -> Result<WeilModel> {
    let ctx = siegel.ctx();
    let pick = |dim: usize, idx: usize| -> Result<MultiplicativeCharacter> {
        let fam = character_family(ctx, choice.convention.restriction(dim));
        fam.with_restriction
            .get(idx)
            .copied()
            .ok_or_else(|| Error::Precondition(format!("splitting character index {idx} out of range")))
    };
    WeilModel::new(
        siegel.clone(),
        dim_v,
        pick(dim_v, choice.chi_v)?,
        pick(2 * siegel.n(), choice.chi_w)?,
        choice.convention,
    )
}

fn describe_model(report: &mut VerificationReport, model: &WeilModel) {
    report.param("dim X", model.n());
    report.param("dim V", model.dim_v());
    report.param("chi_V exponent", model.chi_v().exponent);
    report.param("chi_W exponent", model.chi_w().exponent);
    report.param("splitting convention", format!("{:?}", model.convention()));
}

/// Validation entry for a computed character table.
pub fn table_check(name: &str, group_order: usize, classes: &ConjugacyClasses, table: &CharacterTable) -> Check {
    let sum = table.sum_of_squares();
    let passed = table.orthogonality_residual < ORTHOGONALITY_TOL && sum == group_order as u64;
    let mut c = Check::new(
        format!("character table of {name}"),
        CITE_TABLES,
        passed,
        format!(
            "|G| = {group_order}, {} classes, sum of squared degrees = {sum}, degrees {:?}",
            classes.count(),
            table.degrees
        ),
    );
    c.residual = Some(table.orthogonality_residual);
    c.lhs = Some(sum as i64);
    c.rhs = Some(group_order as i64);
    c
}

// ---------------------------------------------------------------------------
// Weil model well-formedness

/// Exhaustive homomorphism checks on `P(X)` and `U(V)`, and commutation of the two actions.
pub fn verify_weil_model(model: &WeilModel, opts: &VerifyOptions) -> Result<VerificationReport> {
    let ctx = model.ctx();
    let mut report = VerificationReport::new(
        "weil-model",
        ctx,
        "Omega is a representation of U(V) x P(X) given by explicit monomial formulas on functions on Hom(X^c, V).",
        "Every operator is monomial; products of operators equal operators of products over all pairs, and the two actions commute.",
    );
    describe_model(&mut report, model);
    let siegel = model.siegel();
    let ps = siegel.parabolic_elements();
    let p_ops: Vec<MonomialOperator> = ps.iter().map(|p| model.op_parabolic(p)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, p1) in ps.iter().enumerate() {
        for (j, p2) in ps.iter().enumerate() {
            let prod = siegel.parabolic_mul(p1, p2);
            let direct = model.op_parabolic(&prod)?;
            worst = worst.max(p_ops[i].compose(ctx, &p_ops[j]).distance(ctx, &direct));
        }
    }
    report.push(Check::residual(
        "P(X) homomorphism",
        CITE_WEIL,
        worst,
        opts.operator_tol,
        format!("{} x {} pairs, semidirect relations included", ps.len(), ps.len()),
    ));

    let u = model.unitary_group(opts.bound)?;
    let u_ops: Vec<MonomialOperator> = u.elements().iter().map(|h| model.op_unitary(h)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for a in 0..u.order() {
        for b in 0..u.order() {
            let direct = &u_ops[u.mul(a, b)];
            worst = worst.max(u_ops[a].compose(ctx, &u_ops[b]).distance(ctx, direct));
        }
    }
    report.push(Check::residual(
        "U(V) homomorphism",
        CITE_WEIL,
        worst,
        opts.operator_tol,
        format!("{} x {} pairs", u.order(), u.order()),
    ));

    let mut worst: f64 = 0.0;
    for uo in &u_ops {
        for po in &p_ops {
            worst = worst.max(uo.compose(ctx, po).distance(ctx, &po.compose(ctx, uo)));
        }
    }
    report.push(Check::residual(
        "dual-pair commutation",
        CITE_WEIL,
        worst,
        opts.operator_tol,
        format!("{} x {} pairs", u.order(), ps.len()),
    ));

    let unit = u_ops
        .iter()
        .chain(&p_ops)
        .flat_map(|op| op.phase.iter())
        .all(|&ph| (ctx.phase_value(ph).norm() - 1.0).abs() < opts.operator_tol);
    report.push(Check::new(
        "unit scalars",
        CITE_WEIL,
        unit,
        "every scalar has modulus 1 (the |det| factor is trivial over F_q)",
    ));
    let dim_ok = model.dimension() as u64 == (ctx.q() as u64).pow((2 * model.n() * model.dim_v()) as u32);
    report.push(Check::equality(
        "model dimension",
        CITE_WEIL,
        model.dimension() as i64,
        (ctx.q() as i64).pow((2 * model.n() * model.dim_v()) as u32),
        if dim_ok { "q^(2 dim X dim V)" } else { "dimension mismatch" },
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------
// Jacquet module

struct StabilizerData {
    embedding: Embedding,
    adapted: EMat,
    adapted_inv: EMat,
    complement_group: MatrixGroup,
}

fn stabilizer_data(model: &WeilModel, b: &EMat, bound: u128) -> Result<Option<StabilizerData>> {
    let ctx = model.ctx();
    let Some(embedding) = find_embedding(&b.conj(ctx), model.space_v())? else {
        return Ok(None);
    };
    let adapted = embedding.adapted_basis();
    let adapted_inv = adapted.inverse(ctx)?;
    let c = &embedding.complement;
    let comp_gram = c.adjoint(ctx).mul(ctx, model.space_v().gram()).mul(ctx, c);
    let complement_group = isometry_group(ctx, Epsilon::Hermitian, &comp_gram, bound)?;
    Ok(Some(StabilizerData { embedding, adapted, adapted_inv, complement_group }))
}

impl StabilizerData {
    fn glue(&self, ctx: &ExtensionContext, h1: &EMat, h2: &EMat) -> EMat {
        self.adapted.mul(ctx, &EMat::block_diag(&[h1, h2])).mul(ctx, &self.adapted_inv)
    }
}

/// Compares the `ψ_B`-coinvariants of the model, as a `U(B) × U(V)` character,
/// with the representation induced from the stabilizer of an embedding `B^c ↪ V`.
pub fn verify_jacquet_isomorphism(model: &WeilModel, b: &EMat, opts: &VerifyOptions) -> Result<VerificationReport> {
    let ctx = model.ctx();
    let mut report = VerificationReport::new(
        "jacquet",
        ctx,
        "The twisted Jacquet module of Omega along N(X) vanishes when B^c admits no Hermitian embedding into V; otherwise it is induced from the twisted diagonal U(j(B^c)) x U(j(B^c)^perp) with character (chi_V^-2 chi_W o i^-1 o det) x (chi_W o i^-1 o det).",
        "Over F_q, psi_B-coinvariants equal the psi_B-isotypic subspace; its U(B) x U(V) character is compared classwise with the induced character, and with zero when no embedding exists.",
    );
    describe_model(&mut report, model);
    report.param("B", format!("{:?}", b.data().iter().map(|e| e.0).collect::<Vec<_>>()));
    let siegel = model.siegel();
    let u_b = siegel.unitary_of(b)?;
    let u_v = model.unitary_group(opts.bound)?;
    let g = MatrixGroup::direct_product(&u_b, &u_v)?;
    let classes = conjugacy_classes(&g)?;
    let n = model.n();

    let mut via_average = Vec::with_capacity(g.order());
    let mut route_gap: f64 = 0.0;
    for el in g.elements() {
        let (m, h) = MatrixGroup::split_block(el, n);
        let avg = model.jacquet_character(b, &m, &h)?;
        let direct = model.isotypic_character(b, &m, &h)?;
        route_gap = route_gap.max((avg - direct).norm());
        via_average.push(avg);
    }
    let lhs = classes.class_function_from_elements(&via_average)?;
    report.push(Check::residual(
        "coinvariants vs isotypic subspace",
        CITE_JACQUET,
        route_gap,
        opts.final_tol,
        "N(X)-average of the model character equals the trace on functions supported on O_B",
    ));

    let orbit = model.orbit_of_form(b).len();
    let rhs = match stabilizer_data(model, b, opts.bound)? {
        None => {
            report.param("embedding", "none");
            ClassFunction::new(vec![Complex64::new(0.0, 0.0); classes.count()])
        }
        Some(stab) => {
            report.param("embedding", "found");
            let t0 = &stab.embedding.map;
            let twist_one = model
                .chi_v()
                .pow(ctx, -2)
                .mul(ctx, &model.chi_w());
            let mut members = Vec::new();
            let mut values = Vec::new();
            let mut elems = Vec::new();
            for m in u_b.elements() {
                let h1 = m.conj(ctx);
                for h2 in stab.complement_group.elements() {
                    let h = stab.glue(ctx, &h1, h2);
                    if h.mul(ctx, t0) != t0.mul(ctx, &h1) {
                        return Err(Error::Inconsistent("diagonal element does not fix the embedding".into()));
                    }
                    let el = EMat::block_diag(&[m, &h]);
                    let idx = g
                        .index_of(&el)
                        .ok_or_else(|| Error::Inconsistent("stabilizer element outside U(B) x U(V)".into()))?;
                    let ph = ctx.phase_mul(
                        twist_one.phase_on_i_inverse(ctx, h1.det(ctx))?,
                        model.chi_w().phase_on_i_inverse(ctx, h2.det(ctx))?,
                    );
                    members.push(idx);
                    values.push(ctx.phase_value(ph));
                    elems.push(el);
                }
            }
            let h_group = MatrixGroup::from_elements(ctx, g.dim(), elems)?;
            // align values with the sorted element order of h_group
            let order: Vec<usize> = h_group.elements().iter().map(|e| g.index_of(e).unwrap()).collect();
            let lookup: BTreeMap<usize, Complex64> = members.iter().copied().zip(values.iter().copied()).collect();
            let aligned: Vec<Complex64> = order.iter().map(|i| lookup[i]).collect();
            induced_character::<MatrixGroup, _>(&classes, &h_group, &order, &aligned)?
        }
    };
    let residual = lhs.max_deviation(&rhs);
    let mut cmp = Check::residual(
        "classwise character equality",
        CITE_JACQUET,
        residual,
        opts.final_tol,
        format!("{} classes of U(B) x U(V), |U(B)| = {}, |U(V)| = {}", classes.count(), u_b.order(), u_v.order()),
    );
    let dl = snap_nonnegative_integer(lhs.degree(), opts.final_tol)?;
    let dr = snap_nonnegative_integer(rhs.degree(), opts.final_tol)?;
    cmp.lhs = Some(dl as i64);
    cmp.rhs = Some(dr as i64);
    cmp.passed &= dl == dr;
    report.push(cmp);
    report.push(Check::equality(
        "dimension equals |O_B|",
        CITE_JACQUET,
        dl as i64,
        orbit as i64,
        "fixed-point count {T : T^* G_V T = Gram(B^c)}",
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------
// Period transfer

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferCell {
    pub pi: usize,
    pub pi_degree: u64,
    pub mu: u64,
    pub lhs: u64,
    pub rhs: u64,
}

/// `dim Hom_{U(V)×S_B}(Ω, π ⊠ (μ∘det ⊠ ψ_B))` against the Hom dimension over
/// `U(j(X^c)) × U(j(X^c)^⊥)` of `π^∨` with the transferred character, for every
/// irreducible `π` of `U(V)` and every character `μ` of `E_1`.
pub fn verify_period_transfer(
    model: &WeilModel,
    b: &EMat,
    opts: &VerifyOptions,
) -> Result<(VerificationReport, Vec<TransferCell>)> {
    let ctx = model.ctx();
    let mut report = VerificationReport::new(
        "transfer",
        ctx,
        "Hom over U(V) x S_B of Omega against pi x (mu o det x psi_B) is isomorphic to Hom over U(j(X^c)) x U(j(X^c)^perp) of pi^vee against (mu^-1 chi_V^2 chi_W^-1 o i^-1 o det) x (chi_W^-1 o i^-1 o det).",
        "Both Hom dimensions are computed for every irreducible pi of U(V) and every mu: the left side from traces of the model over U(V) x S_B, the right side from restricting pi to the stabilizer subgroup.",
    );
    describe_model(&mut report, model);
    let siegel = model.siegel();
    let u_b = siegel.unitary_of(b)?;
    let u_v = model.unitary_group(opts.bound)?;
    let classes = conjugacy_classes(&u_v)?;
    let table = character_table(&u_v, &classes, opts.seed)?;
    report.push(table_check(&format!("U({})", model.dim_v()), u_v.order(), &classes, &table));
    let mus = all_characters(ctx, CharDomain::NormOne);
    let params = siegel.n_params();
    let n_count = params.len() as f64;

    // Φ(h, m) = Σ_A χ_Ω(h, n(A)·m)·conj ψ_B(A)
    let psi_conj: Vec<Complex64> = params
        .iter()
        .map(|a| Ok(ctx.phase_value(siegel.psi_b(b, a)?).conj()))
        .collect::<Result<_>>()?;
    let mut phi = vec![vec![Complex64::new(0.0, 0.0); u_b.order()]; u_v.order()];
    for (hi, h) in u_v.elements().iter().enumerate() {
        for (mi, m) in u_b.elements().iter().enumerate() {
            let fixed = model.fixed_points(h, m);
            let mut s = Complex64::new(0.0, 0.0);
            for (a, pc) in params.iter().zip(&psi_conj) {
                let p = ParabolicElement { a: a.clone(), m: m.clone() };
                s += model.character_on_fixed(h, &p, &fixed)? * pc;
            }
            phi[hi][mi] = s;
        }
    }
    let det_b: Vec<crate::field::Elem> = u_b.elements().iter().map(|m| m.det(ctx)).collect();
    let total = u_v.order() as f64 * u_b.order() as f64 * n_count;

    let stab = stabilizer_data(model, b, opts.bound)?;
    let u1 = isometry_group(ctx, Epsilon::Hermitian, &b.conj(ctx), opts.bound)?;
    let rhs_twist = model.chi_v().pow(ctx, 2).mul(ctx, &model.chi_w().inverse(ctx));
    let chi_w_inv = model.chi_w().inverse(ctx);

    let mut cells = Vec::new();
    let mut all_equal = true;
    let mut bookkeeping = vec![0.0f64; mus.len()];
    for (pi_idx, pi) in table.characters.iter().enumerate() {
        for (mu_idx, mu) in mus.iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for hi in 0..u_v.order() {
                let pv = pi.values[classes.class_of(hi)].conj();
                for mi in 0..u_b.order() {
                    let tau = ctx.phase_value(mu.phase(ctx, det_b[mi])?).conj();
                    s += phi[hi][mi] * pv * tau;
                }
            }
            let lhs = snap_nonnegative_integer(s / total, opts.final_tol)?;
            bookkeeping[mu_idx] += lhs as f64 * table.degrees[pi_idx] as f64;
            let rhs = match &stab {
                None => 0,
                Some(st) => {
                    let mut s = Complex64::new(0.0, 0.0);
                    let mut count = 0usize;
                    for h1 in u1.elements() {
                        let d1 = h1.det(ctx);
                        let lam1 = ctx.phase_mul(
                            mu.inverse(ctx).phase(ctx, d1)?,
                            rhs_twist.phase_on_i_inverse(ctx, d1)?,
                        );
                        for h2 in st.complement_group.elements() {
                            let lam = ctx.phase_mul(lam1, chi_w_inv.phase_on_i_inverse(ctx, h2.det(ctx))?);
                            let h = st.glue(ctx, h1, h2);
                            let idx = u_v
                                .index_of(&h)
                                .ok_or_else(|| Error::Inconsistent("stabilizer element outside U(V)".into()))?;
                            s += pi.values[classes.class_of(idx)] * ctx.phase_value(lam);
                            count += 1;
                        }
                    }
                    snap_nonnegative_integer(s / count as f64, opts.final_tol)?
                }
            };
            all_equal &= lhs == rhs;
            cells.push(TransferCell { pi: pi_idx, pi_degree: table.degrees[pi_idx], mu: mu.exponent, lhs, rhs });
        }
    }
    let mismatches: Vec<String> = cells
        .iter()
        .filter(|c| c.lhs != c.rhs)
        .map(|c| format!("(pi {}, mu {}): {} vs {}", c.pi, c.mu, c.lhs, c.rhs))
        .collect();
    let mut grid = Check::new(
        "lhs = rhs on every (pi, mu) cell",
        CITE_TRANSFER,
        all_equal,
        if mismatches.is_empty() {
            format!("{} cells", cells.len())
        } else {
            format!("mismatches: {}", mismatches.join(", "))
        },
    );
    grid.lhs = Some(cells.iter().map(|c| c.lhs as i64).sum());
    grid.rhs = Some(cells.iter().map(|c| c.rhs as i64).sum());
    report.push(grid);

    // Σ_π lhs·deg π = dim of the (S_B, μ ⊠ ψ_B)-isotypic part of Ω
    let id_v = u_v.index_of(&EMat::identity(model.dim_v())).unwrap();
    for (mu_idx, mu) in mus.iter().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for mi in 0..u_b.order() {
            s += phi[id_v][mi] * ctx.phase_value(mu.phase(ctx, det_b[mi])?).conj();
        }
        let direct = snap_nonnegative_integer(s / (u_b.order() as f64 * n_count), opts.final_tol)?;
        report.push(Check::equality(
            format!("isotypic dimension bookkeeping, mu exponent {}", mu.exponent),
            CITE_TRANSFER,
            bookkeeping[mu_idx].round() as i64,
            direct as i64,
            "sum over pi of lhs times deg pi vs direct isotypic dimension",
        ));
    }
    Ok((report, cells))
}

// ---------------------------------------------------------------------------
// Rank stratification of N(Y)

pub fn verify_rank_stratification(siegel: &SiegelData, opts: &VerifyOptions) -> Result<VerificationReport> {
    let ctx = siegel.ctx();
    let n = siegel.n();
    let mut report = VerificationReport::new(
        "stratification",
        ctx,
        "GL(X)-orbits on N(Y) are indexed by the kernel dimension k and, for k < n, by the two classes of nondegenerate Hermitian forms on X/X_k; the stabilizer of B_k is (GL(X_k) x U(X/X_k, B_k)) semidirect the unipotent radical.",
        "Over F_q there is exactly one orbit for each rank, since all nondegenerate Hermitian forms of a given dimension are equivalent; orbit sizes and stabilizers are computed by brute force.",
    );
    report.param("n", n);
    let orbits = siegel.orbits_on_ny()?;
    let mut ranks: Vec<usize> = orbits.iter().map(|o| o.rank).collect();
    ranks.sort_unstable();
    report.push(Check::equality(
        "one orbit per rank",
        CITE_STRATA,
        orbits.len() as i64,
        n as i64 + 1,
        format!("ranks {ranks:?}"),
    ));
    let mut by_rank: Vec<&crate::siegel::NyOrbit> = orbits.iter().collect();
    by_rank.sort_by_key(|o| o.rank);
    let total: usize = orbits.iter().map(|o| o.members.len()).sum();
    report.push(Check::equality(
        "orbit census",
        CITE_STRATA,
        total as i64,
        siegel.n_params().len() as i64,
        format!(
            "sizes by rank: {}",
            by_rank.iter().map(|o| o.members.len().to_string()).collect::<Vec<_>>().join(" + ")
        ),
    ));
    for o in &by_rank {
        let brute: Vec<EMat> = siegel
            .gl()
            .elements()
            .iter()
            .filter(|m| siegel.act_on_ny(m, &o.rep).map(|x| x == o.rep).unwrap_or(false))
            .cloned()
            .collect();
        report.push(Check::equality(
            format!("orbit-stabilizer, rank {}", o.rank),
            CITE_STRATA,
            (o.members.len() * brute.len()) as i64,
            siegel.gl().order() as i64,
            format!("|orbit| = {}, |stabilizer| = {}", o.members.len(), brute.len()),
        ));
        let predicted = predicted_stabilizer(siegel, &o.rep, opts.bound)?;
        report.push(Check::new(
            format!("stabilizer structure, kernel dimension {}", n - o.rank),
            CITE_STRATA,
            predicted == brute,
            format!(
                "(GL_k x U(B')) semidirect Hom(X/X_k, X_k), order {} (brute force {})",
                predicted.len(),
                brute.len()
            ),
        ));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Filtration of the GL(X)-period module

/// `n = 1`: classwise Mackey decomposition of `Ind_{GL(X)}^{U(W)}(χ∘det)` over `N(Y)`-strata.
pub fn verify_linear_filtration_full(
    siegel: &SiegelData,
    chi: &MultiplicativeCharacter,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let ctx = siegel.ctx();
    let mut report = VerificationReport::new(
        "filtration",
        ctx,
        "Ind from GL(X) to U(W) of chi o det has a U(W)-equivariant filtration whose pieces are Ind from P(X_k) of (chi o det) x Sha(B_k, chi|E_1), summed over the two equivalence classes of B_k; the bottom piece is the Shalika module.",
        "Over F_q the filtration splits (Mackey) and there is one class per rank; the character identity is checked classwise on U(W), with per-irreducible Hom dimensions.",
    );
    report.param("n", siegel.n());
    report.param("chi exponent", chi.exponent);
    let w = siegel.witt_space()?;
    let uw = enumerate_unitary_group(&w, opts.bound)?;
    let classes = conjugacy_classes(&uw)?;
    let table = character_table(&uw, &classes, opts.seed)?;
    report.push(table_check(&format!("U({})", 2 * siegel.n()), uw.order(), &classes, &table));

    let induce_from = |elements: &[ParabolicElement], chi_b: Option<&EMat>| -> Result<(ClassFunction, MatrixGroup, Vec<Complex64>)> {
        let mut mats = Vec::with_capacity(elements.len());
        let mut vals = BTreeMap::new();
        for p in elements {
            let g = siegel.parabolic_matrix(p)?;
            let mut ph = chi.phase(ctx, p.m.det(ctx))?;
            if let Some(b) = chi_b {
                ph = ctx.phase_mul(ph, siegel.psi_b(b, &p.a)?);
            }
            vals.insert(g.clone(), ctx.phase_value(ph));
            mats.push(g);
        }
        let h = MatrixGroup::from_elements(ctx, 2 * siegel.n(), mats)?;
        let members = uw.embed(&h)?;
        let aligned: Vec<Complex64> = h.elements().iter().map(|g| vals[g]).collect();
        let ind = induced_character::<MatrixGroup, _>(&classes, &h, &members, &aligned)?;
        Ok((ind, h, aligned))
    };

    let gl_elements: Vec<ParabolicElement> = siegel
        .gl()
        .elements()
        .iter()
        .map(|m| ParabolicElement { a: EMat::zeros(siegel.n(), siegel.n()), m: m.clone() })
        .collect();
    let (whole, gl_group, gl_values) = induce_from(&gl_elements, None)?;

    let mut strata = Vec::new();
    let mut orbits = siegel.orbits_on_ny()?;
    orbits.sort_by_key(|o| std::cmp::Reverse(o.rank));
    for o in &orbits {
        let stab = siegel.unitary_of(&o.rep)?;
        let elems = siegel.shalika_elements(&stab);
        let (ind, _, _) = induce_from(&elems, Some(&o.rep))?;
        strata.push((o.rank, o.members.len(), ind));
    }
    let mut sum = ClassFunction::new(vec![Complex64::new(0.0, 0.0); classes.count()]);
    for (_, _, s) in &strata {
        sum = sum.add(s);
    }
    let residual = whole.max_deviation(&sum);
    let degrees: Vec<String> = strata
        .iter()
        .map(|(rank, _, s)| format!("rank {rank}: {}", s.degree().re.round()))
        .collect();
    let mut cmp = Check::residual(
        "classwise Mackey decomposition",
        CITE_FILTRATION,
        residual,
        opts.final_tol,
        format!("degree {} = {}", whole.degree().re.round(), degrees.join(" + ")),
    );
    cmp.lhs = Some(snap_nonnegative_integer(whole.degree(), opts.final_tol)? as i64);
    cmp.rhs = Some(snap_nonnegative_integer(sum.degree(), opts.final_tol)? as i64);
    report.push(cmp);

    let mut per_pi_ok = true;
    let mut details = Vec::new();
    for (i, pi) in table.characters.iter().enumerate() {
        let total = hom_dim(&classes, pi, &whole)?;
        let parts = strata
            .iter()
            .map(|(_, _, s)| hom_dim(&classes, pi, s))
            .collect::<Result<Vec<u64>>>()?;
        let psum: u64 = parts.iter().sum();
        per_pi_ok &= total == psum;
        details.push(format!("pi{i}: {total}={}", parts.iter().map(u64::to_string).collect::<Vec<_>>().join("+")));
    }
    report.push(Check::new(
        "per-irreducible Hom sums",
        CITE_FILTRATION,
        per_pi_ok,
        details.join(", "),
    ));

    // Frobenius reciprocity spot check for GL(X) ⊂ U(W)
    let gl_classes = conjugacy_classes(&gl_group)?;
    let gl_members = uw.embed(&gl_group)?;
    let chi_gl = gl_classes.class_function_from_elements(&gl_values)?;
    let mut frob_ok = true;
    for pi in table.characters.iter().take(6) {
        let left = hom_dim(&classes, &whole, pi)?;
        let res = gl_classes.class_function_from_elements(&restrict_values(&classes, pi, &gl_members))?;
        let right = hom_dim(&gl_classes, &chi_gl, &res)?;
        frob_ok &= left == right;
    }
    report.push(Check::new(
        "Frobenius reciprocity spot check",
        CITE_TABLES,
        frob_ok,
        "Hom(Ind chi, pi) = Hom(chi, pi|GL(X)) for the first irreducibles",
    ));
    Ok(report)
}

/// `n ≥ 1` at the `P(X)` level: for every `GL(X)` class representative `m` and every
/// `a ∈ N(X)`, the fixed-point count of `x ↦ a + m·x·m^*` on `N(X)` equals the sum over
/// `N(Y)`-strata of `Σ_{y ∈ stratum, m·y = y} ψ_y(a)`.
pub fn verify_parabolic_filtration(siegel: &SiegelData, opts: &VerifyOptions) -> Result<VerificationReport> {
    let ctx = siegel.ctx();
    let mut report = VerificationReport::new(
        "filtration",
        ctx,
        "The stratification of N(Y) by GL(X)-orbits induces the filtration of Ind from GL(X) to P(X) of the trivial character, with one piece per orbit.",
        "Fourier decomposition of the permutation character of P(X) on N(X) into N(Y)-orbit strata, checked at every GL(X) class representative times every element of N(X).",
    );
    report.param("n", siegel.n());
    report.param("level", "P(X)");
    let gl = siegel.gl();
    let classes = conjugacy_classes(gl)?;
    let params = siegel.n_params();
    let orbits = siegel.orbits_on_ny()?;
    let mut stratum_of = vec![0usize; params.len()];
    for (k, o) in orbits.iter().enumerate() {
        for &i in &o.members {
            stratum_of[i] = k;
        }
    }
    // ψ_y(a) table
    let psi: Vec<Vec<Phase>> = params
        .iter()
        .map(|y| params.iter().map(|a| psi_trace_pairing(ctx, a, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut evaluations = 0usize;
    let mut identity_split = vec![0i64; orbits.len()];
    for &rep in classes.reps() {
        let m = gl.element(rep);
        let mstar = m.adjoint(ctx);
        let fixed_y: Vec<usize> = (0..params.len())
            .filter(|&y| siegel.act_on_ny(m, &params[y]).map(|v| v == params[y]).unwrap_or(false))
            .collect();
        let images: Vec<EMat> = params.iter().map(|x| m.mul(ctx, x).mul(ctx, &mstar)).collect();
        for (ai, a) in params.iter().enumerate() {
            let lhs = params
                .iter()
                .zip(&images)
                .filter(|(x, img)| a.add(ctx, img) == **x)
                .count() as f64;
            let mut per = vec![Complex64::new(0.0, 0.0); orbits.len()];
            for &y in &fixed_y {
                per[stratum_of[y]] += ctx.phase_value(psi[y][ai]);
            }
            let rhs: Complex64 = per.iter().sum();
            worst = worst.max((rhs - lhs).norm());
            evaluations += 1;
            if rep == gl.identity() && a.is_zero() {
                for (k, v) in per.iter().enumerate() {
                    identity_split[k] = v.re.round() as i64;
                }
            }
        }
    }
    report.push(Check::residual(
        "classwise stratum decomposition on P(X)",
        CITE_FILTRATION,
        worst,
        opts.final_tol,
        format!("{} GL(X) classes x {} elements of N(X) = {evaluations} evaluations", classes.count(), params.len()),
    ));
    let ranks: Vec<String> = orbits
        .iter()
        .zip(&identity_split)
        .map(|(o, d)| format!("rank {}: {d}", o.rank))
        .collect();
    report.push(Check::equality(
        "stratum dimensions",
        CITE_FILTRATION,
        identity_split.iter().sum(),
        params.len() as i64,
        ranks.join(", "),
    ));
    Ok(report)
}

/// Convenience: the canonical nondegenerate `B = I` on `X`.
pub fn standard_form(n: usize) -> EMat {
    EMat::identity(n)
}

/// Characters of `E^×` restricted to `F^×` trivially, for sweeps.
pub fn trivial_restriction_family(ctx: &ExtensionContext) -> Vec<MultiplicativeCharacter> {
    character_family(ctx, RestrictionTarget::Trivial).with_restriction
}

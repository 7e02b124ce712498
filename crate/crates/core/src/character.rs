//! Conjugacy classes, character tables, induction, inner products and twisted coinvariants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::GroupOps;
use crate::tolerance::{FINAL_TOL, INTERMEDIATE_TOL, ORTHOGONALITY_TOL};

/// Largest group on which class computations are attempted.
pub const CLASS_ORDER_BOUND: usize = 1_000_000;

/// Attempts at a nondegenerate random combination before giving up.
pub const DIAGONALIZATION_RETRIES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClasses {
    reps: Vec<usize>,
    sizes: Vec<usize>,
    class_of: Vec<usize>,
    order: usize,
}

impl ConjugacyClasses {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
    pub fn reps(&self) -> &[usize] {
        &self.reps
    }
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }
    pub fn group_order(&self) -> usize {
        self.order
    }

    /// Members of each class, in element order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count()];
        for (g, &c) in self.class_of.iter().enumerate() {
            out[c].push(g);
        }
        out
    }

    /// Class function from per-element values, averaging over each class.
    pub fn class_function_from_elements(&self, values: &[Complex64]) -> Result<ClassFunction> {
        let mut sums = vec![Complex64::new(0.0, 0.0); self.count()];
        for (g, v) in values.iter().enumerate() {
            sums[self.class_of[g]] += v;
        }
        let avg: Vec<Complex64> =
            sums.iter().zip(&self.sizes).map(|(s, &n)| s / n as f64).collect();
        let dev = values
            .iter()
            .enumerate()
            .map(|(g, v)| (v - avg[self.class_of[g]]).norm())
            .fold(0.0, f64::max);
        if dev > INTERMEDIATE_TOL.max(1e-7) {
            return Err(Error::NotAClassFunction(dev));
        }
        Ok(ClassFunction::new(avg))
    }
}

/// Partition into conjugation orbits. The identity's class is always index 0.
pub fn conjugacy_classes<G: GroupOps>(g: &G) -> Result<ConjugacyClasses> {
    let n = g.order();
    if n > CLASS_ORDER_BOUND {
        return Err(Error::BoundExceeded {
            what: "conjugacy class computation",
            size: n as u128,
            bound: CLASS_ORDER_BOUND as u128,
        });
    }
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let order: Vec<usize> =
        std::iter::once(g.identity()).chain((0..n).filter(|&x| x != g.identity())).collect();
    for x in order {
        if class_of[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        let mut size = 0;
        for h in 0..n {
            let y = g.conjugate(h, x);
            if class_of[y] == usize::MAX {
                class_of[y] = c;
                size += 1;
            }
        }
        reps.push(x);
        sizes.push(size);
    }
    Ok(ConjugacyClasses { reps, sizes, class_of, order: n })
}

/// One complex value per conjugacy class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassFunction {
    pub values: Vec<Complex64>,
}

impl ClassFunction {
    pub fn new(values: Vec<Complex64>) -> Self {
        ClassFunction { values }
    }

    pub fn constant(classes: &ConjugacyClasses, v: f64) -> Self {
        ClassFunction::new(vec![Complex64::new(v, 0.0); classes.count()])
    }

    /// The regular character.
    pub fn regular(classes: &ConjugacyClasses) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); classes.count()];
        v[0] = Complex64::new(classes.group_order() as f64, 0.0);
        ClassFunction::new(v)
    }

    pub fn degree(&self) -> Complex64 {
        self.values[0]
    }

    pub fn conj(&self) -> Self {
        ClassFunction::new(self.values.iter().map(|v| v.conj()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        ClassFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        ClassFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `⟨a, b⟩ = (1/|G|)·Σ_classes |C|·a·conj(b)`, unsnapped.
pub fn inner_product(classes: &ConjugacyClasses, a: &ClassFunction, b: &ClassFunction) -> Complex64 {
    let s: Complex64 = a
        .values
        .iter()
        .zip(&b.values)
        .zip(&classes.sizes)
        .map(|((x, y), &n)| x * y.conj() * n as f64)
        .sum();
    s / classes.group_order() as f64
}

/// Snaps to a nonnegative integer at the given tolerance or reports the raw value.
pub fn snap_nonnegative_integer(v: Complex64, tol: f64) -> Result<u64> {
    let r = v.re.round();
    if (v.re - r).abs() > tol || v.im.abs() > tol || r < 0.0 {
        return Err(Error::NonIntegral(format!("{:.9}{:+.9}i", v.re, v.im)));
    }
    Ok(r as u64)
}

/// `dim Hom_G(A, B)` for characters `A`, `B`.
pub fn hom_dim(classes: &ConjugacyClasses, a: &ClassFunction, b: &ClassFunction) -> Result<u64> {
    snap_nonnegative_integer(inner_product(classes, a, b), FINAL_TOL)
}

fn snap(v: Complex64) -> Complex64 {
    let snap1 = |x: f64| {
        let r = x.round();
        if (x - r).abs() < INTERMEDIATE_TOL {
            r
        } else {
            x
        }
    };
    Complex64::new(snap1(v.re), snap1(v.im))
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    /// Irreducible characters, trivial character first, then by degree.
    pub characters: Vec<ClassFunction>,
    pub degrees: Vec<u64>,
    /// Largest deviation from orthonormality before snapping.
    pub orthogonality_residual: f64,
    /// Random combination attempts used.
    pub attempts: usize,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.characters.len()
    }
    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }
    pub fn sum_of_squares(&self) -> u64 {
        self.degrees.iter().map(|d| d * d).sum()
    }
}

/// Structure constants `a[i][j][k] = #{x ∈ C_i : x⁻¹·z_k ∈ C_j}`.
fn class_algebra<G: GroupOps>(g: &G, classes: &ConjugacyClasses) -> Vec<f64> {
    let r = classes.count();
    let mut a = vec![0.0f64; r * r * r];
    for (k, &z) in classes.reps.iter().enumerate() {
        for x in 0..g.order() {
            let y = g.mul(g.inv(x), z);
            let (i, j) = (classes.class_of[x], classes.class_of[y]);
            a[(i * r + j) * r + k] += 1.0;
        }
    }
    a
}

/// Irreducible characters by simultaneous diagonalization of the class-sum algebra.
pub fn character_table<G: GroupOps>(g: &G, classes: &ConjugacyClasses, seed: u64) -> Result<CharacterTable> {
    let r = classes.count();
    let order = g.order() as f64;
    let a = class_algebra(g, classes);
    let sqrt_sizes: Vec<f64> = classes.sizes.iter().map(|&s| (s as f64).sqrt()).collect();
    // N_i = D⁻¹ M_i D with (M_i)_{jk} = a_ijk and D = diag(√|C|); N_{i'} = N_iᵀ
    let normal: Vec<DMatrix<f64>> = (0..r)
        .map(|i| {
            DMatrix::from_fn(r, r, |j, k| a[(i * r + j) * r + k] * sqrt_sizes[k] / sqrt_sizes[j])
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=DIAGONALIZATION_RETRIES {
        let mut h = DMatrix::<Complex64>::zeros(r, r);
        for n in &normal {
            let (re, im): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let sym = n + n.transpose();
            let anti = n - n.transpose();
            h += sym.map(|x| Complex64::new(re * x, 0.0)) + anti.map(|x| Complex64::new(0.0, im * x));
        }
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
        if vals.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-7 * scale) {
            continue;
        }
        let mut characters = Vec::with_capacity(r);
        for c in 0..r {
            let v = eig.eigenvectors.column(c);
            let ratio: Vec<Complex64> = (0..r).map(|k| v[k] / sqrt_sizes[k] / (v[0] / sqrt_sizes[0])).collect();
            let weight: f64 =
                ratio.iter().zip(&classes.sizes).map(|(x, &s)| x.norm_sqr() * s as f64).sum();
            let degree = (order / weight).sqrt();
            characters.push(ClassFunction::new(ratio.iter().map(|x| x * degree).collect()));
        }
        let mut residual: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                let ip = inner_product(classes, &characters[i], &characters[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((ip - want).norm());
            }
        }
        if residual >= ORTHOGONALITY_TOL {
            return Err(Error::TableValidation(format!("orthogonality residual {residual:.3e}")));
        }
        let degrees = characters
            .iter()
            .map(|c| snap_nonnegative_integer(c.degree(), FINAL_TOL))
            .collect::<Result<Vec<u64>>>()?;
        let mut table: Vec<(u64, ClassFunction)> = degrees
            .into_iter()
            .zip(characters)
            .map(|(d, c)| (d, ClassFunction::new(c.values.into_iter().map(snap).collect())))
            .collect();
        table.sort_by(|(da, ca), (db, cb)| {
            let trivial_a = ca.values.iter().all(|v| (*v - 1.0).norm() < FINAL_TOL);
            let trivial_b = cb.values.iter().all(|v| (*v - 1.0).norm() < FINAL_TOL);
            trivial_b.cmp(&trivial_a).then(da.cmp(db)).then_with(|| {
                let key = |c: &ClassFunction| -> Vec<(i64, i64)> {
                    c.values
                        .iter()
                        .map(|v| ((v.re * 1e6).round() as i64, (v.im * 1e6).round() as i64))
                        .collect()
                };
                key(cb).cmp(&key(ca))
            })
        });
        let degrees: Vec<u64> = table.iter().map(|(d, _)| *d).collect();
        let sum: u64 = degrees.iter().map(|d| d * d).sum();
        if sum != g.order() as u64 {
            return Err(Error::TableValidation(format!("Σ d² = {sum} ≠ |G| = {}", g.order())));
        }
        if let Some(d) = degrees.iter().find(|&&d| d == 0 || g.order() as u64 % d != 0) {
            return Err(Error::TableValidation(format!("degree {d} does not divide |G|")));
        }
        return Ok(CharacterTable {
            characters: table.into_iter().map(|(_, c)| c).collect(),
            degrees,
            orthogonality_residual: residual,
            attempts: attempt,
        });
    }
    Err(Error::Degenerate(DIAGONALIZATION_RETRIES))
}

/// `Ind_H^G χ_H` from per-element values on `H` (aligned with `members`).
///
/// Uses `χ(g) = |G|/(|H|·|C|)·Σ_{h ∈ H ∩ C} χ_H(h)` for `g ∈ C`, after checking that
/// `χ_H` is constant on `H`-conjugacy classes when `H` is given as a group.
pub fn induced_character<G: GroupOps, H: GroupOps>(
    classes: &ConjugacyClasses,
    subgroup: &H,
    members: &[usize],
    chi_h: &[Complex64],
) -> Result<ClassFunction> {
    if members.len() != subgroup.order() || chi_h.len() != subgroup.order() {
        return Err(Error::Precondition("subgroup data has inconsistent lengths".into()));
    }
    let h = subgroup.order();
    if h * h <= 50_000_000 {
        let mut dev: f64 = 0.0;
        for x in 0..h {
            for y in 0..h {
                dev = dev.max((chi_h[subgroup.conjugate(y, x)] - chi_h[x]).norm());
            }
        }
        if dev > 1e-7 {
            return Err(Error::NotAClassFunction(dev));
        }
    }
    Ok(induce_values(classes, members, chi_h))
}

/// The induction formula without the class-function check on `H`.
pub fn induce_values(classes: &ConjugacyClasses, members: &[usize], chi_h: &[Complex64]) -> ClassFunction {
    let mut sums = vec![Complex64::new(0.0, 0.0); classes.count()];
    for (&g, v) in members.iter().zip(chi_h) {
        sums[classes.class_of(g)] += v;
    }
    let ratio = classes.group_order() as f64 / members.len() as f64;
    ClassFunction::new(
        sums.iter()
            .zip(classes.sizes())
            .map(|(s, &c)| s * ratio / c as f64)
            .collect(),
    )
}

/// Restriction of a class function of `G` to the elements of a subgroup.
pub fn restrict_values(classes: &ConjugacyClasses, chi: &ClassFunction, members: &[usize]) -> Vec<Complex64> {
    members.iter().map(|&g| chi.values[classes.class_of(g)]).collect()
}

/// Twisted coinvariants `χ(g) = (1/|N|)·Σ_{n ∈ N} χ_M(g·n)·conj ψ(n)`.
///
/// `module_value(g, n)` evaluates the module character at `g·n`; `twist_fixed`
/// states whether the acting group fixes the twisting character, which the
/// caller must establish.
pub fn twisted_coinvariant_character<T: Sync>(
    acting: &[T],
    normal: &[T],
    twist: impl Fn(&T) -> Complex64,
    module_value: impl Fn(&T, &T) -> Complex64,
    twist_fixed: bool,
) -> Result<Vec<Complex64>> {
    if !twist_fixed {
        return Err(Error::TwistNotFixed);
    }
    let twists: Vec<Complex64> = normal.iter().map(|n| twist(n).conj()).collect();
    Ok(acting
        .iter()
        .map(|g| {
            let s: Complex64 = normal.iter().zip(&twists).map(|(n, t)| module_value(g, n) * t).sum();
            s / normal.len() as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::CayleyGroup;

    #[test]
    fn identity_is_singleton_class() {
        let s3 = CayleyGroup::symmetric(3);
        let cl = conjugacy_classes(&s3).unwrap();
        assert_eq!(cl.sizes()[0], 1);
        assert_eq!(cl.reps()[0], s3.identity());
        assert_eq!(cl.count(), 3);
        assert_eq!(cl.sizes().iter().sum::<usize>(), 6);
    }

    #[test]
    fn abelian_group_of_order_four() {
        for g in [CayleyGroup::cyclic(4), CayleyGroup::abelian(&[2, 2])] {
            let cl = conjugacy_classes(&g).unwrap();
            assert_eq!(cl.count(), 4);
            let t = character_table(&g, &cl, 0).unwrap();
            assert_eq!(t.degrees, vec![1, 1, 1, 1]);
        }
    }

    #[test]
    fn symmetric_group_tables() {
        for (n, expected) in [(3usize, vec![1u64, 1, 2]), (4, vec![1, 1, 2, 3, 3])] {
            let g = CayleyGroup::symmetric(n);
            let cl = conjugacy_classes(&g).unwrap();
            let t = character_table(&g, &cl, 0).unwrap();
            assert_eq!(t.degrees, expected);
            assert!(t.orthogonality_residual < ORTHOGONALITY_TOL);
            for (i, a) in t.characters.iter().enumerate() {
                for (j, b) in t.characters.iter().enumerate() {
                    assert_eq!(hom_dim(&cl, a, b).unwrap(), (i == j) as u64);
                }
            }
        }
    }

    #[test]
    fn regular_character_contains_each_irreducible_by_degree() {
        let g = CayleyGroup::symmetric(4);
        let cl = conjugacy_classes(&g).unwrap();
        let t = character_table(&g, &cl, 3).unwrap();
        let reg = ClassFunction::regular(&cl);
        for (chi, &d) in t.characters.iter().zip(&t.degrees) {
            assert_eq!(hom_dim(&cl, &reg, chi).unwrap(), d);
        }
    }

    #[test]
    fn half_integer_inner_product_is_rejected() {
        let g = CayleyGroup::cyclic(2);
        let cl = conjugacy_classes(&g).unwrap();
        let a = ClassFunction::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let one = ClassFunction::constant(&cl, 1.0);
        assert!(matches!(hom_dim(&cl, &a, &one), Err(Error::NonIntegral(_))));
    }

    #[test]
    fn induction_of_trivial_from_whole_and_trivial_subgroup() {
        let g = CayleyGroup::symmetric(3);
        let cl = conjugacy_classes(&g).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let triv = induced_character::<CayleyGroup, _>(&cl, &g, &all, &[Complex64::new(1.0, 0.0); 6]).unwrap();
        assert!(triv.max_deviation(&ClassFunction::constant(&cl, 1.0)) < 1e-12);
        let one = CayleyGroup::cyclic(1);
        let reg = induced_character::<CayleyGroup, _>(&cl, &one, &[g.identity()], &[Complex64::new(1.0, 0.0)]).unwrap();
        assert!(reg.max_deviation(&ClassFunction::regular(&cl)) < 1e-12);
    }

    #[test]
    fn frobenius_reciprocity_on_s4_over_s3() {
        let g = CayleyGroup::symmetric(4);
        let cl = conjugacy_classes(&g).unwrap();
        let t = character_table(&g, &cl, 0).unwrap();
        // stabilizer of the point 3: permutations in lexicographic order with p[3] = 3
        let perms: Vec<Vec<usize>> = {
            let mut v: Vec<Vec<usize>> = Vec::new();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let p = vec![a, b, c, d];
                            let mut s = p.clone();
                            s.sort();
                            if s == vec![0, 1, 2, 3] {
                                v.push(p);
                            }
                        }
                    }
                }
            }
            v
        };
        let members: Vec<usize> = (0..24).filter(|&i| perms[i][3] == 3).collect();
        let h = CayleyGroup::from_fn(6, |a, b| {
            let x = perms[members[a]].clone();
            let y = perms[members[b]].clone();
            let z: Vec<usize> = (0..4).map(|i| x[y[i]]).collect();
            members.iter().position(|&m| perms[m] == z).unwrap()
        })
        .unwrap();
        let hcl = conjugacy_classes(&h).unwrap();
        let ht = character_table(&h, &hcl, 0).unwrap();
        for psi in &ht.characters {
            let vals: Vec<Complex64> = (0..6).map(|x| psi.values[hcl.class_of(x)]).collect();
            let ind = induced_character::<CayleyGroup, _>(&cl, &h, &members, &vals).unwrap();
            assert!((ind.degree().re - 4.0 * psi.degree().re).abs() < 1e-9);
            for theta in &t.characters {
                let lhs = hom_dim(&cl, &ind, theta).unwrap();
                let res = hcl
                    .class_function_from_elements(&restrict_values(&cl, theta, &members))
                    .unwrap();
                let rhs = hom_dim(&hcl, psi, &res).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn non_class_function_is_rejected() {
        let g = CayleyGroup::symmetric(3);
        let cl = conjugacy_classes(&g).unwrap();
        let mut vals = vec![Complex64::new(0.0, 0.0); 6];
        vals[1] = Complex64::new(1.0, 0.0);
        let all: Vec<usize> = (0..6).collect();
        assert!(matches!(
            induced_character::<CayleyGroup, _>(&cl, &g, &all, &vals),
            Err(Error::NotAClassFunction(_))
        ));
    }

    #[test]
    fn coinvariants_with_trivial_normal_subgroup_are_identity() {
        let acting: Vec<u32> = (0..4).collect();
        let normal = vec![0u32];
        let chi = |g: &u32, _n: &u32| Complex64::new(*g as f64, 0.0);
        let out = twisted_coinvariant_character(&acting, &normal, |_| Complex64::new(1.0, 0.0), chi, true).unwrap();
        assert_eq!(out, (0..4).map(|g| Complex64::new(g as f64, 0.0)).collect::<Vec<_>>());
        assert!(matches!(
            twisted_coinvariant_character(&acting, &normal, |_| Complex64::new(1.0, 0.0), chi, false),
            Err(Error::TwistNotFixed)
        ));
    }
}

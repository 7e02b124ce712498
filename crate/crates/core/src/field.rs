//! Arithmetic in a quadratic extension `E = F_{q^2}` of `F = F_q`, `q = p^f`, `p` odd.
//!
//! Field elements are indices into a fixed enumeration of `E`: an element
//! `a + b·α` (with `a, b ∈ F_q` and `α` a root of the defining quadratic) has
//! index `a + q·b`, where an `F_q` element is itself the integer whose base-`p`
//! digits are the coefficients of its polynomial representative. `F_q ⊂ E` is
//! therefore exactly the set of indices `< q`.
//!
//! Multiplication goes through discrete log/exp tables with respect to a fixed
//! generator of `E^×`. All tables are built once; the context is immutable.
//!
//! Roots of unity that occur as character values are carried exactly as
//! [`Phase`]s, i.e. exponents of `ζ_L = exp(2πi/L)` with `L = p·(q²−1)`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported `|E| = p^(2f)`.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(
    Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug, Serialize, Deserialize,
)]
pub struct Elem(pub u32);

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exponent `k` of the root of unity `ζ_L^k`, `L = ExtensionContext::phase_modulus()`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct Phase(pub u64);

/// The field tower `F_p ⊂ F_q ⊂ E` with all the gadgets needed downstream.
#[derive(Debug)]
pub struct ExtensionContext {
    p: u32,
    f: u32,
    q: u32,
    order: u32,
    base_modulus: Vec<u32>,
    modulus: (u32, u32),
    fq_add: Vec<u32>,
    fq_mul: Vec<u32>,
    fq_neg: Vec<u32>,
    fq_inv: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    conj: Vec<u32>,
    abs_trace: Vec<u32>,
    delta: Elem,
    half: Elem,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, coefficients low to high.
fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        if c != 0 {
            for i in 0..=dm {
                let idx = dr - dm + i;
                r[idx] = ((r[idx] as u64 + (p - c) as u64 * m[i] as u64) % p as u64) as u32;
            }
        }
        r.pop();
        r = poly_trim(r);
        if r.len() <= dm {
            break;
        }
    }
    poly_trim(r)
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    poly_trim(out)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits(mut n: u32, p: u32, len: usize) -> Vec<u32> {
    let mut d = vec![0; len];
    for slot in d.iter_mut() {
        *slot = n % p;
        n /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn monic_from_index(idx: u32, p: u32, degree: usize) -> Vec<u32> {
    let mut c = digits(idx, p, degree);
    c.push(1);
    c
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        for idx in 0..p.pow(d as u32) {
            let g = monic_from_index(idx, p, d);
            let r = poly_rem(poly, &g, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

fn format_poly(coeffs: &[u32], var: &str) -> String {
    let mut terms = Vec::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        terms.push(match (c, k) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}·{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl ExtensionContext {
    /// Builds `F_q` and its quadratic extension.
    ///
    /// `F_q` is `F_p[t]/(g)` with `g` the least irreducible monic polynomial of
    /// degree `f` (coefficient vectors read as base-`p` integers, constant term
    /// least significant); `E` is `F_q[x]/(x² + c1·x + c0)` with `(c1, c0)` the
    /// lexicographically least pair making the quadratic irreducible.
    pub fn new(p: u32, f: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenCharacteristic(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 {
            return Err(Error::Precondition("exponent f must be positive".into()));
        }
        let order = (p as u64).checked_pow(2 * f).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge { order, bound: MAX_FIELD_ORDER });
        }
        let q = p.pow(f);
        let fl = f as usize;

        let base_modulus = if f == 1 {
            vec![0, 1]
        } else {
            (0..p.pow(f))
                .map(|idx| monic_from_index(idx, p, fl))
                .find(|g| is_irreducible(g, p))
                .expect("irreducible polynomials exist in every degree")
        };

        let qs = q as usize;
        let mut fq_add = vec![0u32; qs * qs];
        let mut fq_mul = vec![0u32; qs * qs];
        let dig: Vec<Vec<u32>> = (0..q).map(|a| digits(a, p, fl)).collect();
        for a in 0..qs {
            for b in 0..qs {
                let s: Vec<u32> = (0..fl).map(|k| (dig[a][k] + dig[b][k]) % p).collect();
                fq_add[a * qs + b] = from_digits(&s, p);
                let prod = if f == 1 {
                    vec![((a as u64 * b as u64) % p as u64) as u32]
                } else {
                    poly_rem(&poly_mul(&dig[a], &dig[b], p), &base_modulus, p)
                };
                let mut padded = prod;
                padded.resize(fl, 0);
                fq_mul[a * qs + b] = from_digits(&padded, p);
            }
        }
        let fq_neg: Vec<u32> = (0..qs)
            .map(|a| (0..qs).find(|&b| fq_add[a * qs + b] == 0).unwrap() as u32)
            .collect();
        let mut fq_inv = vec![0u32; qs];
        for a in 1..qs {
            fq_inv[a] = (1..qs).find(|&b| fq_mul[a * qs + b] == 1).unwrap() as u32;
        }

        let has_root = |c1: usize, c0: usize| {
            (0..qs).any(|r| {
                let r2 = fq_mul[r * qs + r] as usize;
                let lin = fq_mul[c1 * qs + r] as usize;
                fq_add[fq_add[r2 * qs + lin] as usize * qs + c0] == 0
            })
        };
        let (c1, c0) = (0..qs)
            .flat_map(|c1| (0..qs).map(move |c0| (c1, c0)))
            .find(|&(c1, c0)| !has_root(c1, c0))
            .expect("an irreducible quadratic exists over every finite field");

        let mut ctx = ExtensionContext {
            p,
            f,
            q,
            order: q * q,
            base_modulus,
            modulus: (c0 as u32, c1 as u32),
            fq_add,
            fq_mul,
            fq_neg,
            fq_inv,
            exp: Vec::new(),
            log: Vec::new(),
            conj: Vec::new(),
            abs_trace: Vec::new(),
            delta: Elem(0),
            half: Elem(0),
        };
        ctx.build_log_tables();
        ctx.build_derived_tables()?;
        Ok(ctx)
    }

    fn mul_raw(&self, x: u32, y: u32) -> u32 {
        let q = self.q;
        let (a, b) = (x % q, x / q);
        let (c, d) = (y % q, y / q);
        let (c0, c1) = self.modulus;
        let ac = self.fmul(a, c);
        let bd = self.fmul(b, d);
        let re = self.fadd(ac, self.fneg(self.fmul(bd, c0)));
        let im = self.fadd(
            self.fadd(self.fmul(a, d), self.fmul(b, c)),
            self.fneg(self.fmul(bd, c1)),
        );
        re + q * im
    }

    fn pow_raw(&self, mut x: u32, mut e: u64) -> u32 {
        let mut r = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul_raw(r, x);
            }
            x = self.mul_raw(x, x);
            e >>= 1;
        }
        r
    }

    fn build_log_tables(&mut self) {
        let n = (self.order - 1) as u64;
        let factors = prime_factors(n);
        let gen = (2..self.order)
            .find(|&g| factors.iter().all(|&r| self.pow_raw(g, n / r) != 1))
            .unwrap_or(1);
        let mut exp = vec![0u32; n as usize];
        let mut log = vec![u32::MAX; self.order as usize];
        let mut x = 1u32;
        for k in 0..n as usize {
            exp[k] = x;
            log[x as usize] = k as u32;
            x = self.mul_raw(x, gen);
        }
        self.exp = exp;
        self.log = log;
    }

    fn build_derived_tables(&mut self) -> Result<()> {
        let n = self.order - 1;
        let q = self.q;
        self.conj = (0..self.order)
            .map(|x| {
                if x == 0 {
                    0
                } else {
                    let l = self.log[x as usize] as u64;
                    self.exp[((l * q as u64) % n as u64) as usize]
                }
            })
            .collect();
        self.abs_trace = (0..q)
            .map(|a| {
                let mut acc = 0u32;
                let mut pw = a;
                for _ in 0..self.f {
                    acc = self.fadd(acc, pw);
                    let mut next = 1u32;
                    for _ in 0..self.p {
                        next = self.fmul(next, pw);
                    }
                    pw = next;
                }
                acc
            })
            .collect();
        if self.abs_trace.iter().any(|&t| t >= self.p) {
            return Err(Error::Convention("absolute trace left the prime field".into()));
        }
        for x in 0..self.order {
            let t = self.trace(Elem(x));
            if t.0 >= q {
                return Err(Error::TraceOutsideBase(t.0));
            }
        }
        self.delta = (1..self.order)
            .map(Elem)
            .find(|&e| self.trace(e) == self.zero())
            .expect("the trace kernel is a nonzero line");
        self.half = Elem(self.fq_inv[self.fadd(1, 1) as usize]);
        Ok(())
    }

    #[inline]
    fn fadd(&self, a: u32, b: u32) -> u32 {
        self.fq_add[(a * self.q + b) as usize]
    }
    #[inline]
    fn fmul(&self, a: u32, b: u32) -> u32 {
        self.fq_mul[(a * self.q + b) as usize]
    }
    #[inline]
    fn fneg(&self, a: u32) -> u32 {
        self.fq_neg[a as usize]
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    /// `|E| = q²`.
    pub fn order(&self) -> u32 {
        self.order
    }
    /// `q² − 1`, the order of `E^×`.
    pub fn unit_order(&self) -> u64 {
        (self.order - 1) as u64
    }

    /// Coefficients `(c0, c1)` of the defining quadratic `x² + c1·x + c0`, as `F_q` indices.
    pub fn modulus(&self) -> (u32, u32) {
        self.modulus
    }

    /// Coefficients of the degree-`f` modulus of `F_q` over `F_p`, low to high.
    pub fn base_modulus(&self) -> &[u32] {
        &self.base_modulus
    }

    /// Human-readable description of the defining polynomials.
    pub fn modulus_description(&self) -> String {
        let (c0, c1) = self.modulus;
        let quad = format_poly(&[c0, c1, 1], "x");
        if self.f == 1 {
            format!("{quad} over F_{}", self.p)
        } else {
            format!(
                "{quad} over F_{}[t]/({})",
                self.p,
                format_poly(&self.base_modulus, "t")
            )
        }
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }
    pub fn one(&self) -> Elem {
        Elem(1)
    }

    /// Embeds an `F_q` element given by its index.
    pub fn base(&self, a: u32) -> Elem {
        debug_assert!(a < self.q);
        Elem(a)
    }

    pub fn is_base(&self, x: Elem) -> bool {
        x.0 < self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    pub fn units(&self) -> impl Iterator<Item = Elem> {
        (1..self.order).map(Elem)
    }

    pub fn base_elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        let q = self.q;
        let re = self.fadd(x.0 % q, y.0 % q);
        let im = self.fadd(x.0 / q, y.0 / q);
        Elem(re + q * im)
    }

    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        let q = self.q;
        Elem(self.fneg(x.0 % q) + q * self.fneg(x.0 / q))
    }

    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if x.0 == 0 || y.0 == 0 {
            return Elem(0);
        }
        let s = self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64;
        Elem(self.exp[(s % self.unit_order()) as usize])
    }

    pub fn inv(&self, x: Elem) -> Result<Elem> {
        if x.0 == 0 {
            return Err(Error::ZeroInput);
        }
        let n = self.unit_order();
        let l = self.log[x.0 as usize] as u64;
        Ok(Elem(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, x: Elem, y: Elem) -> Result<Elem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: Elem, e: i64) -> Elem {
        if x.0 == 0 {
            return if e == 0 { Elem(1) } else { Elem(0) };
        }
        let n = self.unit_order() as i128;
        let l = self.log[x.0 as usize] as i128;
        Elem(self.exp[((l * e as i128).rem_euclid(n)) as usize])
    }

    /// Discrete log with respect to [`Self::generator`]; `None` for zero.
    pub fn log(&self, x: Elem) -> Option<u64> {
        let l = self.log[x.0 as usize];
        (l != u32::MAX).then_some(l as u64)
    }

    pub fn exp(&self, k: i64) -> Elem {
        Elem(self.exp[k.rem_euclid(self.unit_order() as i64) as usize])
    }

    /// The fixed generator of the cyclic group `E^×`.
    pub fn generator(&self) -> Elem {
        Elem(self.exp[1 % self.exp.len()])
    }

    /// Galois conjugation `x ↦ x^q`.
    #[inline]
    pub fn conj(&self, x: Elem) -> Elem {
        Elem(self.conj[x.0 as usize])
    }

    pub fn trace(&self, x: Elem) -> Elem {
        self.add(x, self.conj(x))
    }

    pub fn norm(&self, x: Elem) -> Elem {
        self.mul(x, self.conj(x))
    }

    /// The trace-zero line `E_0`.
    pub fn trace_zero(&self) -> Vec<Elem> {
        self.elements().filter(|&e| self.trace(e) == self.zero()).collect()
    }

    /// The norm-one torus `E_1`, in the order `gen^{(q−1)k}`, `k = 0..=q`.
    pub fn norm_one(&self) -> Vec<Elem> {
        (0..=self.q as i64)
            .map(|k| self.exp(k * (self.q as i64 - 1)))
            .collect()
    }

    /// `e ↦ e / e^c`, the isomorphism `E^×/F^× → E_1`.
    pub fn i_map(&self, e: Elem) -> Result<Elem> {
        self.div(e, self.conj(e))
    }

    /// Canonical representative `e` with `i(e) = u`: `u = gen^{(q−1)j}` maps to `gen^{−j}`.
    pub fn i_inverse(&self, u: Elem) -> Result<Elem> {
        let l = self.log(u).ok_or(Error::ZeroInput)?;
        let qm1 = self.q as u64 - 1;
        if l % qm1 != 0 {
            return Err(Error::NotInDomain(u.0, "E_1"));
        }
        Ok(self.exp(-((l / qm1) as i64)))
    }

    /// Index in `0..=q` of an `E_1` element relative to the generator `gen^{q−1}`.
    pub fn norm_one_index(&self, u: Elem) -> Result<u64> {
        let l = self.log(u).ok_or(Error::ZeroInput)?;
        let qm1 = self.q as u64 - 1;
        if l % qm1 != 0 {
            return Err(Error::NotInDomain(u.0, "E_1"));
        }
        Ok(l / qm1)
    }

    /// The fixed nonzero trace-zero element: least index in the enumeration.
    pub fn delta(&self) -> Elem {
        self.delta
    }

    /// `1/2 ∈ F_q`.
    pub fn half(&self) -> Elem {
        self.half
    }

    /// Absolute trace `F_q → F_p`, as an integer in `0..p`.
    pub fn abs_trace(&self, x: Elem) -> Result<u32> {
        if !self.is_base(x) {
            return Err(Error::NotInDomain(x.0, "F_q"));
        }
        Ok(self.abs_trace[x.0 as usize])
    }

    /// Quadratic (Legendre) character of `F_q^×`.
    pub fn quadratic_character(&self, a: Elem) -> Result<i8> {
        if !self.is_base(a) {
            return Err(Error::NotInDomain(a.0, "F_q"));
        }
        let l = self.log(a).ok_or(Error::ZeroInput)?;
        // F^× = <gen^{q+1}>, a = gen^{(q+1) j}
        Ok(if (l / (self.q as u64 + 1)) % 2 == 0 { 1 } else { -1 })
    }

    // ----- exact roots of unity -----

    /// `L = p·(q²−1)`; every character value used here is a power of `ζ_L`.
    pub fn phase_modulus(&self) -> u64 {
        self.p as u64 * self.unit_order()
    }

    /// `ψ(x) = exp(2πi·AbsTr(x)/p)` as a phase.
    pub fn psi_phase(&self, x: Elem) -> Result<Phase> {
        let t = self.abs_trace(x)? as u64;
        Ok(Phase(t * self.unit_order() % self.phase_modulus()))
    }

    pub fn psi(&self, x: Elem) -> Result<Complex64> {
        Ok(self.phase_value(self.psi_phase(x)?))
    }

    /// `ζ_{q²−1}^k` as a phase.
    pub fn unit_root_phase(&self, k: i128) -> Phase {
        let n = self.unit_order() as i128;
        Phase((k.rem_euclid(n) as u64) * self.p as u64)
    }

    pub fn phase_mul(&self, a: Phase, b: Phase) -> Phase {
        Phase((a.0 + b.0) % self.phase_modulus())
    }

    pub fn phase_inv(&self, a: Phase) -> Phase {
        let l = self.phase_modulus();
        Phase((l - a.0 % l) % l)
    }

    pub fn phase_value(&self, a: Phase) -> Complex64 {
        let theta = TAU * (a.0 as f64) / (self.phase_modulus() as f64);
        Complex64::from_polar(1.0, theta)
    }
}

/// Which subgroup a multiplicative character is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CharDomain {
    /// `E^×`, exponent taken mod `q² − 1`.
    Units,
    /// `F^×`, exponent taken mod `q − 1`.
    Base,
    /// `E_1`, exponent taken mod `q + 1`.
    NormOne,
}

/// `χ(gen^j) = ζ_{q²−1}^{k·j}` restricted to the given domain.
///
/// The same formula works on all three domains because `F^× = ⟨gen^{q+1}⟩` and
/// `E_1 = ⟨gen^{q−1}⟩`; only the modulus of the exponent changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplicativeCharacter {
    pub exponent: u64,
    pub domain: CharDomain,
}

impl MultiplicativeCharacter {
    fn modulus(ctx: &ExtensionContext, domain: CharDomain) -> u64 {
        let q = ctx.q() as u64;
        match domain {
            CharDomain::Units => q * q - 1,
            CharDomain::Base => q - 1,
            CharDomain::NormOne => q + 1,
        }
    }

    pub fn new(ctx: &ExtensionContext, exponent: i64, domain: CharDomain) -> Self {
        let m = Self::modulus(ctx, domain) as i64;
        MultiplicativeCharacter { exponent: exponent.rem_euclid(m) as u64, domain }
    }

    pub fn trivial(domain: CharDomain) -> Self {
        MultiplicativeCharacter { exponent: 0, domain }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponent == 0
    }

    fn check_domain(&self, ctx: &ExtensionContext, e: Elem) -> Result<u64> {
        let l = ctx.log(e).ok_or(Error::ZeroInput)?;
        let q = ctx.q() as u64;
        match self.domain {
            CharDomain::Units => {}
            CharDomain::Base if l % (q + 1) != 0 => return Err(Error::NotInDomain(e.0, "F^×")),
            CharDomain::NormOne if l % (q - 1) != 0 => {
                return Err(Error::NotInDomain(e.0, "E_1"))
            }
            _ => {}
        }
        Ok(l)
    }

    pub fn phase(&self, ctx: &ExtensionContext, e: Elem) -> Result<Phase> {
        let l = self.check_domain(ctx, e)?;
        Ok(ctx.unit_root_phase(self.exponent as i128 * l as i128))
    }

    pub fn value(&self, ctx: &ExtensionContext, e: Elem) -> Result<Complex64> {
        Ok(ctx.phase_value(self.phase(ctx, e)?))
    }

    pub fn mul(&self, ctx: &ExtensionContext, other: &Self) -> Self {
        debug_assert_eq!(self.domain, other.domain);
        Self::new(ctx, (self.exponent + other.exponent) as i64, self.domain)
    }

    pub fn pow(&self, ctx: &ExtensionContext, k: i64) -> Self {
        let m = Self::modulus(ctx, self.domain) as i128;
        let e = (self.exponent as i128 * k as i128).rem_euclid(m);
        MultiplicativeCharacter { exponent: e as u64, domain: self.domain }
    }

    pub fn inverse(&self, ctx: &ExtensionContext) -> Self {
        self.pow(ctx, -1)
    }

    pub fn restrict_to_base(&self, ctx: &ExtensionContext) -> Self {
        debug_assert_eq!(self.domain, CharDomain::Units);
        Self::new(ctx, self.exponent as i64, CharDomain::Base)
    }

    pub fn restrict_to_norm_one(&self, ctx: &ExtensionContext) -> Self {
        debug_assert_eq!(self.domain, CharDomain::Units);
        Self::new(ctx, self.exponent as i64, CharDomain::NormOne)
    }

    /// `μ ↦ μ̃ = μ ∘ i` for a character `μ` of `E_1`.
    pub fn pullback_along_i(&self, ctx: &ExtensionContext) -> Self {
        debug_assert_eq!(self.domain, CharDomain::NormOne);
        let q = ctx.q() as i64;
        Self::new(ctx, self.exponent as i64 * (1 - q), CharDomain::Units)
    }

    /// `u ↦ χ(i^{-1}(u))` on `E_1`; only defined when `χ` is trivial on `F^×`.
    pub fn phase_on_i_inverse(&self, ctx: &ExtensionContext, u: Elem) -> Result<Phase> {
        if self.domain != CharDomain::Units {
            return Err(Error::Precondition("χ∘i^{-1} needs a character of E^×".into()));
        }
        if !self.restrict_to_base(ctx).is_trivial() {
            return Err(Error::Precondition(
                "χ∘i^{-1} is only well defined when χ is trivial on F^×".into(),
            ));
        }
        self.phase(ctx, ctx.i_inverse(u)?)
    }

    /// The same function on `E_1` viewed as a character of `E_1`.
    pub fn composed_with_i_inverse(&self, ctx: &ExtensionContext) -> Result<Self> {
        // χ(i^{-1}(gen^{(q-1)j})) = ζ^{-k j}, and μ_m(gen^{(q-1)j}) = ζ^{m (q-1) j}.
        let phase = self.phase_on_i_inverse(ctx, ctx.exp(ctx.q() as i64 - 1))?;
        let q = ctx.q() as u64;
        let n = ctx.unit_order();
        let k = phase.0 / ctx.p() as u64;
        // ζ_{q²−1}^k with k a multiple of q−1 on the norm-one generator
        if k % (q - 1) != 0 {
            return Err(Error::Convention("χ∘i^{-1} is not a character of E_1".into()));
        }
        Ok(Self::new(ctx, ((k / (q - 1)) % (n / (q - 1))) as i64, CharDomain::NormOne))
    }
}

/// Prescribed restriction of a character of `E^×` to `F^×`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestrictionTarget {
    /// `ω^0`.
    Trivial,
    /// `ω^1`, `ω` the quadratic character of `F_q^×`.
    Quadratic,
}

/// How the sign character attached to `E/F` is realized over a finite field.
///
/// The character of `F^×` with kernel `N_{E/F}(E^×)` is trivial here because the
/// norm is surjective; `Quadratic` instead uses the Legendre symbol of `F_q^×`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingConvention {
    #[default]
    NormResidue,
    Quadratic,
}

impl SplittingConvention {
    /// Required restriction to `F^×` of a splitting character for a space of this dimension.
    pub fn restriction(self, dim: usize) -> RestrictionTarget {
        match self {
            SplittingConvention::NormResidue => RestrictionTarget::Trivial,
            SplittingConvention::Quadratic if dim % 2 == 1 => RestrictionTarget::Quadratic,
            SplittingConvention::Quadratic => RestrictionTarget::Trivial,
        }
    }
}

/// Characters of `E^×` with a prescribed restriction to `F^×`, together with the
/// characters `μ` of `E_1` and their pullbacks `μ̃ = μ∘i`.
#[derive(Clone, Debug)]
pub struct CharacterFamily {
    pub with_restriction: Vec<MultiplicativeCharacter>,
    pub norm_one: Vec<MultiplicativeCharacter>,
    pub pullbacks: Vec<MultiplicativeCharacter>,
}

pub fn character_family(ctx: &ExtensionContext, target: RestrictionTarget) -> CharacterFamily {
    let q = ctx.q() as i64;
    let offset = match target {
        RestrictionTarget::Trivial => 0,
        RestrictionTarget::Quadratic => (q - 1) / 2,
    };
    let with_restriction = (0..=q)
        .map(|j| MultiplicativeCharacter::new(ctx, offset + j * (q - 1), CharDomain::Units))
        .collect();
    let norm_one: Vec<_> = (0..=q)
        .map(|k| MultiplicativeCharacter::new(ctx, k, CharDomain::NormOne))
        .collect();
    let pullbacks = norm_one.iter().map(|mu| mu.pullback_along_i(ctx)).collect();
    CharacterFamily { with_restriction, norm_one, pullbacks }
}

/// All characters of the given domain, in exponent order.
pub fn all_characters(ctx: &ExtensionContext, domain: CharDomain) -> Vec<MultiplicativeCharacter> {
    let m = MultiplicativeCharacter::modulus(ctx, domain);
    (0..m as i64).map(|k| MultiplicativeCharacter::new(ctx, k, domain)).collect()
}

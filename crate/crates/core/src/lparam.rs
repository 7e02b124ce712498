//! Multiplicity formulas over component groups of symbolic discrete L-parameters.
//!
//! The component group of a multiplicity-free parameter is `(Z/2)^k` with one basis
//! vector per summand; elements and characters are both encoded as bitmasks over that
//! basis, a set bit in a character meaning the sign `-1`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of summands (bitmask width).
pub const MAX_SUMMANDS: usize = 63;

/// A formal product of character symbols with integer exponents, e.g. `mu1*mu2^-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharExpr(BTreeMap<String, i32>);

impl CharExpr {
    pub fn one() -> Self {
        CharExpr::default()
    }

    pub fn symbol(name: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), 1);
        CharExpr(m)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut out = CharExpr::one();
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(out);
        }
        for factor in s.split('*') {
            let factor = factor.trim();
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (
                    n.trim(),
                    e.trim()
                        .parse::<i32>()
                        .map_err(|_| Error::Malformed(format!("bad exponent in `{factor}`")))?,
                ),
                None => (factor, 1),
            };
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::Malformed(format!("bad character symbol `{factor}`")));
            }
            out = out.mul(&CharExpr::symbol(name).pow(exp));
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (k, v) in &other.0 {
            *m.entry(k.clone()).or_insert(0) += v;
        }
        m.retain(|_, v| *v != 0);
        CharExpr(m)
    }

    pub fn pow(&self, e: i32) -> Self {
        let mut m: BTreeMap<String, i32> = self.0.iter().map(|(k, v)| (k.clone(), v * e)).collect();
        m.retain(|_, v| *v != 0);
        CharExpr(m)
    }

    pub fn inverse(&self) -> Self {
        self.pow(-1)
    }

    /// Rewrites defined symbols in terms of their definitions until none remain.
    pub fn expand(&self, relations: &BTreeMap<String, CharExpr>) -> Result<Self> {
        let mut cur = self.clone();
        for _ in 0..=relations.len() {
            let mut next = CharExpr::one();
            let mut changed = false;
            for (k, v) in &cur.0 {
                match relations.get(k) {
                    Some(def) => {
                        next = next.mul(&def.pow(*v));
                        changed = true;
                    }
                    None => next = next.mul(&CharExpr::symbol(k).pow(*v)),
                }
            }
            if !changed {
                return Ok(next);
            }
            cur = next;
        }
        Err(Error::Malformed("character relations are cyclic".into()))
    }
}

impl fmt::Display for CharExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| if *v == 1 { k.clone() } else { format!("{k}^{v}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl Serialize for CharExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CharExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CharExpr::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummandKind {
    /// Member of the symplectic part `I`.
    Symplectic,
    /// `b_j` of a conjugate-dual pair in `J`.
    PairFirst,
    /// `b_j^*` of a pair.
    PairSecond,
    /// The one-dimensional summand `e` of an odd parameter.
    Distinguished,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSummand {
    pub label: String,
    pub dim: u32,
    pub kind: SummandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
    /// Formal character this summand has been twisted by.
    #[serde(default, skip_serializing_if = "is_one")]
    pub twist: CharExpr,
}

fn is_one(c: &CharExpr) -> bool {
    *c == CharExpr::one()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteParameter {
    pub parity: Parity,
    pub total_dim: u32,
    pub summands: Vec<ParameterSummand>,
    /// Similitude character when the parameter lands in `GSp` (the GSp flag).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similitude: Option<CharExpr>,
    /// Definitions among formal character symbols, e.g. `mu = mu1*mu2`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<String, CharExpr>,
}

impl DiscreteParameter {
    pub fn validate(&self) -> Result<()> {
        if self.summands.is_empty() {
            return Err(Error::Malformed("parameter has no summands".into()));
        }
        if self.summands.len() > MAX_SUMMANDS {
            return Err(Error::Malformed(format!("more than {MAX_SUMMANDS} summands")));
        }
        let mut labels = BTreeMap::new();
        for (i, s) in self.summands.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::Malformed(format!("summand `{}` has dimension 0", s.label)));
            }
            if labels.insert(s.label.as_str(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate summand `{}`", s.label)));
            }
        }
        let mut distinguished = 0;
        for s in &self.summands {
            match s.kind {
                SummandKind::Symplectic => {
                    if s.partner.is_some() {
                        return Err(Error::Malformed(format!("symplectic summand `{}` has a partner", s.label)));
                    }
                }
                SummandKind::Distinguished => {
                    distinguished += 1;
                    if s.dim != 1 {
                        return Err(Error::Malformed(format!("distinguished summand `{}` must have dimension 1", s.label)));
                    }
                }
                SummandKind::PairFirst | SummandKind::PairSecond => {
                    let want = if s.kind == SummandKind::PairFirst {
                        SummandKind::PairSecond
                    } else {
                        SummandKind::PairFirst
                    };
                    let partner = s
                        .partner
                        .as_deref()
                        .and_then(|p| labels.get(p))
                        .map(|&j| &self.summands[j])
                        .ok_or_else(|| Error::Malformed(format!("pair summand `{}` lacks a valid partner", s.label)))?;
                    if partner.kind != want || partner.partner.as_deref() != Some(s.label.as_str()) {
                        return Err(Error::Malformed(format!("pair `{}`/`{}` is not mutual", s.label, partner.label)));
                    }
                    if partner.dim != s.dim {
                        return Err(Error::Malformed(format!("pair `{}`/`{}` has unequal dimensions", s.label, partner.label)));
                    }
                }
            }
        }
        let sum: u32 = self.summands.iter().map(|s| s.dim).sum();
        if sum != self.total_dim {
            return Err(Error::Malformed(format!("dimensions sum to {sum}, declared {}", self.total_dim)));
        }
        match self.parity {
            Parity::Even => {
                if sum % 2 != 0 {
                    return Err(Error::Malformed("even parameter has odd total dimension".into()));
                }
                if distinguished != 0 {
                    return Err(Error::Malformed("even parameter has a distinguished summand".into()));
                }
            }
            Parity::Odd => {
                if sum % 2 != 1 {
                    return Err(Error::Malformed("odd parameter has even total dimension".into()));
                }
                // zero is allowed: the odd-case formula then reports multiplicity 0 with a reason
                if distinguished > 1 {
                    return Err(Error::Malformed("more than one distinguished summand".into()));
                }
                if self.similitude.is_some() {
                    return Err(Error::Malformed("odd parameter cannot carry a GSp similitude".into()));
                }
            }
        }
        for expr in self.relations.values() {
            expr.expand(&self.relations)?;
        }
        Ok(())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.summands.iter().position(|s| s.label == label)
    }

    fn similitude_normal_form(&self) -> Result<Option<CharExpr>> {
        self.similitude.as_ref().map(|s| s.expand(&self.relations)).transpose()
    }
}

/// Basis bookkeeping for `S_φ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentGroup {
    pub labels: Vec<String>,
    /// Indices of the symplectic part.
    pub symplectic: Vec<usize>,
    /// `(b_j, b_j^*)` index pairs.
    pub pairs: Vec<(usize, usize)>,
    pub distinguished: Option<usize>,
    /// Sum of all basis elements.
    pub z: u64,
    /// Generators of `S^Δ`: each `a_i` and each `b_j + b_j^*`.
    pub delta_generators: Vec<u64>,
}

impl ComponentGroup {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn order(&self) -> u64 {
        1u64 << self.rank()
    }

    /// `Σ_j b_j`.
    pub fn pair_first_sum(&self) -> u64 {
        self.pairs.iter().fold(0, |acc, &(b, _)| acc | (1 << b))
    }

    pub fn in_delta(&self, x: u64) -> bool {
        // S^Δ = {x : x agrees on b_j and b_j^*, and vanishes on e}
        let agrees = self.pairs.iter().all(|&(b, bs)| ((x >> b) & 1) == ((x >> bs) & 1));
        let e_clear = self.distinguished.map_or(true, |e| (x >> e) & 1 == 0);
        agrees && e_clear
    }
}

pub fn component_group(phi: &DiscreteParameter) -> Result<ComponentGroup> {
    phi.validate()?;
    let mut symplectic = Vec::new();
    let mut pairs = Vec::new();
    let mut distinguished = None;
    for (i, s) in phi.summands.iter().enumerate() {
        match s.kind {
            SummandKind::Symplectic => symplectic.push(i),
            SummandKind::PairFirst => {
                let j = phi.index_of(s.partner.as_deref().unwrap()).unwrap();
                pairs.push((i, j));
            }
            SummandKind::PairSecond => {}
            SummandKind::Distinguished => distinguished = Some(i),
        }
    }
    let rank = phi.summands.len();
    let z = if rank == 64 { u64::MAX } else { (1u64 << rank) - 1 };
    let mut delta_generators: Vec<u64> = symplectic.iter().map(|&i| 1u64 << i).collect();
    delta_generators.extend(pairs.iter().map(|&(b, bs)| (1u64 << b) | (1u64 << bs)));
    Ok(ComponentGroup {
        labels: phi.summands.iter().map(|s| s.label.clone()).collect(),
        symplectic,
        pairs,
        distinguished,
        z,
        delta_generators,
    })
}

/// A character of `S_φ`; bit `i` set means the basis element `i` maps to `-1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EtaCharacter {
    pub minus: u64,
}

impl EtaCharacter {
    pub fn trivial() -> Self {
        EtaCharacter { minus: 0 }
    }

    /// `η(x)` for `x` a sum of basis elements given as a bitmask.
    pub fn eval(&self, x: u64) -> i8 {
        if (self.minus & x).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        EtaCharacter { minus: self.minus ^ other.minus }
    }

    pub fn from_signs(group: &ComponentGroup, signs: &BTreeMap<String, i8>) -> Result<Self> {
        let mut minus = 0u64;
        for (i, label) in group.labels.iter().enumerate() {
            match signs.get(label) {
                Some(1) => {}
                Some(-1) => minus |= 1 << i,
                Some(other) => return Err(Error::Malformed(format!("sign {other} for `{label}` is not ±1"))),
                None => return Err(Error::MissingSign(label.clone())),
            }
        }
        for label in signs.keys() {
            if !group.labels.contains(label) {
                return Err(Error::Malformed(format!("sign for unknown summand `{label}`")));
            }
        }
        Ok(EtaCharacter { minus })
    }

    pub fn signs(&self, group: &ComponentGroup) -> BTreeMap<String, i8> {
        group.labels.iter().enumerate().map(|(i, l)| (l.clone(), self.eval(1 << i))).collect()
    }

    pub fn trivial_on_delta(&self, group: &ComponentGroup) -> bool {
        group.delta_generators.iter().all(|&g| self.eval(g) == 1)
    }
}

/// Supplied central root numbers, one per basis element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonData {
    pub signs: BTreeMap<String, i8>,
}

/// `η♭`, extended from the basis multiplicatively.
pub fn eta_flat(phi: &DiscreteParameter, eps: &EpsilonData) -> Result<EtaCharacter> {
    let group = component_group(phi)?;
    EtaCharacter::from_signs(&group, &eps.signs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub description: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub value: u64,
    pub conditions: Vec<Condition>,
    pub citations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MultiplicityReport {
    fn build(nonzero: u64, conditions: Vec<Condition>, citation: &str) -> Self {
        let value = if conditions.iter().all(|c| c.holds) { nonzero } else { 0 };
        MultiplicityReport { value, conditions, citations: vec![citation.to_string()], notes: Vec::new() }
    }
}

fn cond(description: impl Into<String>, holds: bool) -> Condition {
    Condition { description: description.into(), holds }
}

fn sign_str(s: i8) -> &'static str {
    if s > 0 {
        "+1"
    } else {
        "-1"
    }
}

fn check_sign(s: i8, what: &str) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(Error::Malformed(format!("{what} = {s} is not ±1")))
    }
}

fn require_even_gsp(phi: &DiscreteParameter, what: &str) -> Result<()> {
    if phi.parity != Parity::Even {
        return Err(Error::Precondition(format!("{what} needs an even parameter")));
    }
    if phi.similitude.is_none() {
        return Err(Error::Precondition(format!("{what} needs a GSp-valued parameter (similitude unset)")));
    }
    Ok(())
}

const CITE_SHALIKA: &str = "unitary Shalika multiplicity formula";
const CITE_FJ_EVEN: &str = "Friedberg-Jacquet multiplicity, even unitary case";
const CITE_FJ_ODD: &str = "Friedberg-Jacquet multiplicity, odd unitary case";
const CITE_LINEAR: &str = "GL(X)-period multiplicity formula";
const CITE_THETA: &str = "theta transfer of L-parameters and component characters";

fn shalika_on_group(group: &ComponentGroup, eta: EtaCharacter, eps_b: i8, label: &str) -> MultiplicityReport {
    let mut conds = vec![cond(format!("{label} is trivial on S^Δ"), eta.trivial_on_delta(group))];
    let value = if group.symplectic.is_empty() {
        let s = eta.eval(group.pair_first_sum());
        conds.push(cond(format!("{label}(Σ b_j) = {} equals the sign {}", sign_str(s), sign_str(eps_b)), s == eps_b));
        1
    } else {
        1u64 << (group.symplectic.len() - 1)
    };
    let mut r = MultiplicityReport::build(value, conds, CITE_SHALIKA);
    if !group.symplectic.is_empty() {
        r.notes.push("independent of the class of B".into());
    }
    r
}

/// Shalika multiplicity for the member `π(φ, η)` with respect to the class of `B` of sign `ε_B`.
pub fn mult_shalika(phi: &DiscreteParameter, eta: EtaCharacter, eps_b: i8) -> Result<MultiplicityReport> {
    require_even_gsp(phi, "Shalika multiplicity")?;
    check_sign(eps_b, "ε(B)")?;
    let group = component_group(phi)?;
    Ok(shalika_on_group(&group, eta, eps_b, "η"))
}

/// Multiplicity of the `GL(X)`-period.
pub fn mult_linear_gl_e(phi: &DiscreteParameter, eta: EtaCharacter) -> Result<MultiplicityReport> {
    require_even_gsp(phi, "GL(X)-period multiplicity")?;
    Ok(linear_on_group(&component_group(phi)?, eta))
}

/// `θ(φ) = φ ⊗ μ̃₂⁻¹χ_V` with the twisted character `η·η♭`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaTransfer {
    pub parameter: DiscreteParameter,
    pub eta: EtaCharacter,
}

/// Symbol names used by the theta twist.
pub const MU2: &str = "mu2";
pub const CHI_V: &str = "chi_V";
pub const MU1: &str = "mu1";

fn theta_twist() -> CharExpr {
    CharExpr::symbol(MU2).inverse().mul(&CharExpr::symbol(CHI_V))
}

fn twist_parameter(phi: &DiscreteParameter, twist: &CharExpr) -> DiscreteParameter {
    let mut out = phi.clone();
    for s in &mut out.summands {
        s.twist = s.twist.mul(twist);
    }
    // twisting a GSp-valued parameter by ξ multiplies the similitude by ξ²
    out.similitude = out.similitude.map(|s| s.mul(&twist.pow(2)));
    out
}

pub fn theta_transfer_parameter(
    phi: &DiscreteParameter,
    eta: EtaCharacter,
    eps: &EpsilonData,
) -> Result<ThetaTransfer> {
    if phi.parity != Parity::Even {
        return Err(Error::Precondition("theta transfer needs an even parameter".into()));
    }
    let flat = eta_flat(phi, eps)?;
    Ok(ThetaTransfer { parameter: twist_parameter(phi, &theta_twist()), eta: eta.mul(&flat) })
}

/// Undoes [`theta_transfer_parameter`] for the same `ε`-data.
pub fn inverse_theta_transfer(theta: &ThetaTransfer, eps: &EpsilonData) -> Result<ThetaTransfer> {
    let back = twist_parameter(&theta.parameter, &theta_twist().inverse());
    let flat = eta_flat(&back, eps)?;
    Ok(ThetaTransfer { parameter: back, eta: theta.eta.mul(&flat) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FjEvenReport {
    pub report: MultiplicityReport,
    /// The same multiplicity through theta transfer and the Shalika formula.
    pub via_theta: u64,
    /// `ε(V)`: product of the supplied root numbers, i.e. `η♭(z_φ)`.
    pub dichotomy_sign: i8,
}

/// Even Friedberg–Jacquet multiplicity; errors if the theta-transfer route disagrees.
pub fn mult_fj_even(
    phi: &DiscreteParameter,
    eta: EtaCharacter,
    eps: &EpsilonData,
    eps_v0: i8,
) -> Result<FjEvenReport> {
    require_even_gsp(phi, "even Friedberg-Jacquet multiplicity")?;
    check_sign(eps_v0, "ε(V₀)")?;
    let sim = phi.similitude_normal_form()?.unwrap();
    let expected = CharExpr::symbol(MU1).mul(&CharExpr::symbol(MU2)).expand(&phi.relations)?;
    if sim != expected {
        return Err(Error::Precondition(format!(
            "similitude {sim} is not {MU1}*{MU2} under the declared relations"
        )));
    }
    let group = component_group(phi)?;
    let flat = EtaCharacter::from_signs(&group, &eps.signs)?;

    let report = fj_even_on_group(&group, eta.mul(&flat), eps_v0);
    let theta = theta_transfer_parameter(phi, eta, eps)?;
    let via_theta = mult_shalika(&theta.parameter, theta.eta, eps_v0)?.value;
    check_transfer(report.value, via_theta)?;
    Ok(FjEvenReport { report, via_theta, dichotomy_sign: flat.eval(group.z) })
}

fn check_transfer(direct: u64, via_theta: u64) -> Result<()> {
    if via_theta != direct {
        return Err(Error::Inconsistent(format!("direct formula gives {direct}, theta transfer gives {via_theta}")));
    }
    Ok(())
}

/// The even formula evaluated on `S_φ` with `η·η♭` already formed.
fn fj_even_on_group(group: &ComponentGroup, twisted: EtaCharacter, eps_v0: i8) -> MultiplicityReport {
    let mut conds = vec![cond("η·η♭ is trivial on S^Δ", twisted.trivial_on_delta(group))];
    let value = if group.symplectic.is_empty() {
        let s = twisted.eval(group.pair_first_sum());
        conds.push(cond(format!("η·η♭(Σ b_j) = {} equals ε(V₀) = {}", sign_str(s), sign_str(eps_v0)), s == eps_v0));
        1
    } else {
        1u64 << (group.symplectic.len() - 1)
    };
    let mut report = MultiplicityReport::build(value, conds, CITE_FJ_EVEN);
    report.citations.push(CITE_THETA.into());
    report
}

fn linear_on_group(group: &ComponentGroup, eta: EtaCharacter) -> MultiplicityReport {
    let conds = vec![cond("η is trivial on S^Δ", eta.trivial_on_delta(group))];
    MultiplicityReport::build(1u64 << group.symplectic.len(), conds, CITE_LINEAR)
}

/// Odd Friedberg–Jacquet multiplicity.
pub fn mult_fj_odd(phi: &DiscreteParameter, eta: EtaCharacter, eps_v: i8, eps_v0: i8) -> Result<MultiplicityReport> {
    if phi.parity != Parity::Odd {
        return Err(Error::Precondition("odd Friedberg-Jacquet multiplicity needs an odd parameter".into()));
    }
    check_sign(eps_v, "ε(V)")?;
    check_sign(eps_v0, "ε(V₀)")?;
    let group = component_group(phi)?;
    let Some(e) = group.distinguished else {
        return Ok(MultiplicityReport {
            value: 0,
            conditions: vec![cond("μ̃₂ is a subrepresentation of φ", false)],
            citations: vec![CITE_FJ_ODD.into()],
            notes: vec!["μ̃₂ not a subrepresentation".into()],
        });
    };
    let mut conds = vec![
        cond("μ̃₂ is a subrepresentation of φ", true),
        cond("η is trivial on S^Δ", eta.trivial_on_delta(&group)),
    ];
    let ee = eta.eval(1 << e);
    conds.push(cond(format!("η(e) = {} equals ε(V) = {}", sign_str(ee), sign_str(eps_v)), ee == eps_v));
    let value = if group.symplectic.is_empty() {
        let s = eta.eval(group.pair_first_sum());
        conds.push(cond(format!("η(Σ b_j) = {} equals ε(V₀) = {}", sign_str(s), sign_str(eps_v0)), s == eps_v0));
        1
    } else {
        1u64 << (group.symplectic.len() - 1)
    };
    Ok(MultiplicityReport::build(value, conds, CITE_FJ_ODD))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub eta: BTreeMap<String, i8>,
    /// `η(z_φ)`: `+1` for members of the quasi-split group.
    pub z_sign: i8,
    pub shalika_plus: Option<u64>,
    pub shalika_minus: Option<u64>,
    pub fj_even_plus: Option<u64>,
    pub fj_even_minus: Option<u64>,
    pub linear: Option<u64>,
    pub fj_odd: Option<BTreeMap<String, u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub group_order: u64,
    pub delta_trivial_count: u64,
    pub rows: Vec<CensusRow>,
    /// Number of members with the given multiplicity value, per period.
    pub distribution: BTreeMap<String, BTreeMap<u64, u64>>,
}

/// Every member of the packet with all applicable multiplicities.
pub fn packet_census(phi: &DiscreteParameter, eps: &EpsilonData) -> Result<Census> {
    let group = component_group(phi)?;
    if group.rank() > 20 {
        return Err(Error::BoundExceeded { what: "packet census", size: group.order() as u128, bound: 1 << 20 });
    }
    let even_gsp = phi.parity == Parity::Even && phi.similitude.is_some();
    let fj_ok = even_gsp
        && !eps.signs.is_empty()
        && phi.similitude_normal_form()?
            == Some(CharExpr::symbol(MU1).mul(&CharExpr::symbol(MU2)).expand(&phi.relations)?);
    let mut rows = Vec::new();
    let mut distribution: BTreeMap<String, BTreeMap<u64, u64>> = BTreeMap::new();
    let mut delta_trivial_count = 0;
    let mut tally = |key: &str, v: Option<u64>| {
        if let Some(v) = v {
            *distribution.entry(key.to_string()).or_default().entry(v).or_insert(0) += 1;
        }
    };
    for minus in 0..group.order() {
        let eta = EtaCharacter { minus };
        if eta.trivial_on_delta(&group) {
            delta_trivial_count += 1;
        }
        let (mut sp, mut sm, mut fp, mut fm, mut lin, mut odd) = (None, None, None, None, None, None);
        if even_gsp {
            sp = Some(mult_shalika(phi, eta, 1)?.value);
            sm = Some(mult_shalika(phi, eta, -1)?.value);
            lin = Some(mult_linear_gl_e(phi, eta)?.value);
        }
        if fj_ok {
            fp = Some(mult_fj_even(phi, eta, eps, 1)?.report.value);
            fm = Some(mult_fj_even(phi, eta, eps, -1)?.report.value);
        }
        if phi.parity == Parity::Odd {
            let mut m = BTreeMap::new();
            for ev in [1i8, -1] {
                for ev0 in [1i8, -1] {
                    m.insert(format!("V{}_V0{}", sign_str(ev), sign_str(ev0)), mult_fj_odd(phi, eta, ev, ev0)?.value);
                }
            }
            for (k, v) in &m {
                tally(&format!("fj_odd_{k}"), Some(*v));
            }
            odd = Some(m);
        }
        tally("shalika_plus", sp);
        tally("shalika_minus", sm);
        tally("fj_even_plus", fp);
        tally("fj_even_minus", fm);
        tally("linear", lin);
        rows.push(CensusRow {
            eta: eta.signs(&group),
            z_sign: eta.eval(group.z),
            shalika_plus: sp,
            shalika_minus: sm,
            fj_even_plus: fp,
            fj_even_minus: fm,
            linear: lin,
            fj_odd: odd,
        });
    }
    Ok(Census { group_order: group.order(), delta_trivial_count, rows, distribution })
}

// ---------------------------------------------------------------------------
// Randomized consistency suite

/// A random even GSp parameter with `|I| = i_count` and `|J| = j_count`.
pub fn random_even_parameter(rng: &mut impl Rng, i_count: usize, j_count: usize) -> DiscreteParameter {
    let mut summands = Vec::new();
    for i in 0..i_count {
        summands.push(ParameterSummand {
            label: format!("a{}", i + 1),
            dim: 2 * rng.gen_range(1..=3),
            kind: SummandKind::Symplectic,
            partner: None,
            twist: CharExpr::one(),
        });
    }
    for j in 0..j_count {
        let dim = rng.gen_range(1..=3);
        let (b, bs) = (format!("b{}", j + 1), format!("b{}*", j + 1));
        summands.push(ParameterSummand {
            label: b.clone(),
            dim,
            kind: SummandKind::PairFirst,
            partner: Some(bs.clone()),
            twist: CharExpr::one(),
        });
        summands.push(ParameterSummand {
            label: bs,
            dim,
            kind: SummandKind::PairSecond,
            partner: Some(b),
            twist: CharExpr::one(),
        });
    }
    let total_dim = summands.iter().map(|s| s.dim).sum();
    let mut relations = BTreeMap::new();
    relations.insert("mu".to_string(), CharExpr::symbol(MU1).mul(&CharExpr::symbol(MU2)));
    DiscreteParameter {
        parity: Parity::Even,
        total_dim,
        summands,
        similitude: Some(CharExpr::symbol("mu")),
        relations,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub shapes: usize,
    pub evaluations: u64,
    pub linear_equals_shalika_sum: u64,
    pub fj_even_matches_theta: u64,
    pub support_constraint: u64,
    pub delta_trivial_count: u64,
    pub values_are_powers_of_two: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Maximum number of characters η sampled per shape; smaller packets are enumerated.
pub const ETA_SAMPLES_PER_SHAPE: u64 = 256;

pub fn consistency_suite(shapes: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport { shapes, ..Default::default() };
    let fail = |rep: &mut SuiteReport, msg: String| {
        if rep.failures.len() < 20 {
            rep.failures.push(msg);
        }
    };
    for shape in 0..shapes {
        let (i_count, j_count) = loop {
            let i = rng.gen_range(0..=4);
            let j = rng.gen_range(0..=4);
            if i + j > 0 {
                break (i, j);
            }
        };
        let phi = random_even_parameter(&mut rng, i_count, j_count);
        let group = component_group(&phi)?;
        let eps = EpsilonData {
            signs: group.labels.iter().map(|l| (l.clone(), if rng.gen() { 1 } else { -1 })).collect(),
        };
        let order = group.order();
        let etas: Vec<EtaCharacter> = if order <= ETA_SAMPLES_PER_SHAPE {
            (0..order).map(|minus| EtaCharacter { minus }).collect()
        } else {
            (0..ETA_SAMPLES_PER_SHAPE).map(|_| EtaCharacter { minus: rng.gen_range(0..order) }).collect()
        };

        // (iv) counted over the whole group regardless of sampling
        let count = (0..order).filter(|&m| EtaCharacter { minus: m }.trivial_on_delta(&group)).count() as u64;
        if count == 1 << j_count {
            rep.delta_trivial_count += 1;
        } else {
            fail(&mut rep, format!("shape {shape}: {count} characters trivial on S^Δ, expected 2^{j_count}"));
        }

        // the twisted parameter and η♭ do not depend on η
        let flat = EtaCharacter::from_signs(&group, &eps.signs)?;
        let theta = theta_transfer_parameter(&phi, EtaCharacter::trivial(), &eps)?;
        require_even_gsp(&theta.parameter, "Shalika multiplicity")?;
        let theta_group = component_group(&theta.parameter)?;

        for eta in etas {
            rep.evaluations += 1;
            let plus = shalika_on_group(&group, eta, 1, "η").value;
            let minus = shalika_on_group(&group, eta, -1, "η").value;
            let lin = linear_on_group(&group, eta).value;
            if lin == plus + minus {
                rep.linear_equals_shalika_sum += 1;
            } else {
                fail(&mut rep, format!("shape {shape}, eta {:#x}: linear {lin} != {plus} + {minus}", eta.minus));
            }
            let eps_v0 = if rng.gen() { 1 } else { -1 };
            let direct = fj_even_on_group(&group, eta.mul(&flat), eps_v0).value;
            let via_theta = shalika_on_group(&theta_group, theta.eta.mul(&eta), eps_v0, "η·η♭").value;
            match check_transfer(direct, via_theta) {
                Ok(()) => rep.fj_even_matches_theta += 1,
                Err(e) => fail(&mut rep, format!("shape {shape}, eta {:#x}: {e}", eta.minus)),
            }
            if plus + minus == 0 || eta.eval(group.z) == 1 {
                rep.support_constraint += 1;
            } else {
                fail(&mut rep, format!("shape {shape}, eta {:#x}: nonzero Shalika multiplicity with η(z) = -1", eta.minus));
            }
            if [plus, minus, lin].iter().all(|&v| v == 0 || v.is_power_of_two()) {
                rep.values_are_powers_of_two += 1;
            } else {
                fail(&mut rep, format!("shape {shape}: value outside {{0}} ∪ 2^k"));
            }
        }
    }
    Ok(rep)
}

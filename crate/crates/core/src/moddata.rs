//! Modular and premodular data: `S`, `T`, duality and optional fusion rules.
//!
//! Conventions: `d_a = S_{0a}`, `D = Σ_a d_a²`, and the balancing relation
//! `θ_a θ_b S_{ab} = Σ_c N_{a*b}^c d_c θ_c`. With this normalisation a
//! modular datum satisfies `S · conj(S) = D · Id`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::CycloError;
use crate::fusion::{pair_name, FusionError, FusionRing, LabelSet, MAX_RANK};
use crate::{Accumulator, Cyclo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModDataError {
    #[error("rank must be between 1 and {MAX_RANK}, got {0}")]
    BadRank(usize),
    #[error("{what} has length {got}, expected {expected}")]
    Shape { what: &'static str, got: usize, expected: usize },
    #[error("label {0} out of range")]
    LabelOutOfRange(usize),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error("Verlinde coefficient N_({a},{b})^{c} = {value} is not a nonnegative integer")]
    Verlinde { a: usize, b: usize, c: usize, value: String },
    #[error("label {0} is not a self-inverse invertible object")]
    NotSelfInverse(usize),
    #[error("fusion rules are needed but the data is not modular and carries none")]
    NoFusion,
    #[error("label set {0:?} is not closed under fusion")]
    NotClosed(Vec<usize>),
}

/// A fusion-closed set of labels of some data.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span(pub LabelSet);

impl Span {
    pub fn labels(&self) -> &LabelSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.0.contains(&a)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &Span) -> bool {
        self.0.is_subset(&other.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvertibleKind {
    Boson,
    Fermion,
    Semion,
    Other,
}

impl fmt::Display for InvertibleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InvertibleKind::Boson => "boson",
            InvertibleKind::Fermion => "fermion",
            InvertibleKind::Semion => "semion",
            InvertibleKind::Other => "other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Defect {
    NotSymmetric { a: usize, b: usize },
    DualNotInvolution { a: usize },
    DimensionNotPositive { a: usize },
    DualityConjugation { a: usize, b: usize },
    UnitTwist,
    TwistNotRootOfUnity { a: usize },
    TwistOfDual { a: usize },
    FusionMismatch { detail: String },
    NoFusionRules { detail: String },
    Balancing { a: usize, b: usize },
    Modularity { a: usize, b: usize },
}

/// Itemised result of checking data against the axioms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub rank: usize,
    pub names: Vec<String>,
    pub defects: Vec<Defect>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn has_balancing_failure(&self, a: usize, b: usize) -> bool {
        self.defects.iter().any(|d| {
            matches!(d, Defect::Balancing { a: x, b: y } if (*x, *y) == (a, b) || (*x, *y) == (b, a))
        })
    }

    fn describe(&self, d: &Defect) -> String {
        let n = |i: &usize| self.names[*i].as_str();
        match d {
            Defect::NotSymmetric { a, b } => format!("S is not symmetric at ({}, {})", n(a), n(b)),
            Defect::DualNotInvolution { a } => format!("duality is not an involution at {}", n(a)),
            Defect::DimensionNotPositive { a } => format!("dimension of {} is not a positive real", n(a)),
            Defect::DualityConjugation { a, b } => {
                format!("conj(S) disagrees with duality at ({}, {})", n(a), n(b))
            }
            Defect::UnitTwist => "twist of the unit is not 1".into(),
            Defect::TwistNotRootOfUnity { a } => format!("twist of {} is not a root of unity", n(a)),
            Defect::TwistOfDual { a } => format!("twist of {} differs from the twist of its dual", n(a)),
            Defect::FusionMismatch { detail } => format!("fusion rules: {detail}"),
            Defect::NoFusionRules { detail } => format!("no fusion rules: {detail}"),
            Defect::Balancing { a, b } => format!("balancing fails at ({}, {})", n(a), n(b)),
            Defect::Modularity { a, b } => format!("S conj(S) != D Id at ({}, {})", n(a), n(b)),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "ok: rank {}, all checks passed", self.rank);
        }
        writeln!(f, "{} defect(s):", self.defects.len())?;
        for d in &self.defects {
            writeln!(f, "  {}", self.describe(d))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularData {
    names: Vec<String>,
    s: Vec<Cyclo>,
    t: Vec<Cyclo>,
    dual: Vec<usize>,
    fusion: Option<FusionRing>,
    modular: bool,
}

impl ModularData {
    /// Shape-checked constructor. `modular` is the claim that `S` is nondegenerate;
    /// it is checked by [`ModularData::verify`].
    pub fn new(
        names: Vec<String>,
        s: Vec<Vec<Cyclo>>,
        t: Vec<Cyclo>,
        dual: Vec<usize>,
        modular: bool,
    ) -> Result<Self, ModDataError> {
        let r = t.len();
        if r == 0 || r > MAX_RANK {
            return Err(ModDataError::BadRank(r));
        }
        let check = |what, got| {
            if got == r {
                Ok(())
            } else {
                Err(ModDataError::Shape { what, got, expected: r })
            }
        };
        check("names", names.len())?;
        check("dual", dual.len())?;
        check("S", s.len())?;
        for row in &s {
            check("S row", row.len())?;
        }
        if let Some(&bad) = dual.iter().find(|&&d| d >= r) {
            return Err(ModDataError::LabelOutOfRange(bad));
        }
        Ok(ModularData { names, s: s.into_iter().flatten().collect(), t, dual, fusion: None, modular })
    }

    /// Attaches explicit fusion rules (needed when `S` is degenerate).
    pub fn with_fusion(mut self, ring: FusionRing) -> Result<Self, ModDataError> {
        if ring.rank() != self.rank() {
            return Err(ModDataError::Shape { what: "fusion ring", got: ring.rank(), expected: self.rank() });
        }
        self.fusion = Some(ring);
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.t.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn label(&self, name: &str) -> Result<usize, ModDataError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ModDataError::UnknownLabel(name.to_string()))
    }

    pub fn s(&self, a: usize, b: usize) -> &Cyclo {
        &self.s[a * self.rank() + b]
    }

    pub fn s_rows(&self) -> impl Iterator<Item = &[Cyclo]> {
        self.s.chunks(self.rank())
    }

    pub fn t(&self, a: usize) -> &Cyclo {
        &self.t[a]
    }

    pub fn twists(&self) -> &[Cyclo] {
        &self.t
    }

    pub fn dual(&self, a: usize) -> usize {
        self.dual[a]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    pub fn claims_modular(&self) -> bool {
        self.modular
    }

    /// Explicitly attached fusion rules, if any.
    pub fn attached_fusion(&self) -> Option<&FusionRing> {
        self.fusion.as_ref()
    }

    pub fn dim(&self, a: usize) -> &Cyclo {
        self.s(0, a)
    }

    pub fn dims(&self) -> Vec<Cyclo> {
        (0..self.rank()).map(|a| self.dim(a).clone()).collect()
    }

    pub fn global_dim(&self) -> Cyclo {
        (0..self.rank()).map(|a| self.dim(a) * self.dim(a)).sum()
    }

    fn s_conductor(&self) -> Result<usize, CycloError> {
        lcm_conductors(self.s.iter())
    }

    /// Attached fusion rules, or the Verlinde ring when `S` is nondegenerate.
    pub fn fusion_ring(&self) -> Result<FusionRing, ModDataError> {
        match &self.fusion {
            Some(r) => Ok(r.clone()),
            None if self.modularity_defects()?.is_empty() => self.verlinde_ring(),
            None => Err(ModDataError::NoFusion),
        }
    }

    /// `N_{ab}^c = (1/D) Σ_x S_{ax} S_{bx} conj(S_{cx}) / d_x`, exactly.
    pub fn verlinde_ring(&self) -> Result<FusionRing, ModDataError> {
        let r = self.rank();
        let inv_dims = (0..r).map(|x| self.dim(x).inv()).collect::<Result<Vec<_>, _>>()?;
        let inv_global = self.global_dim().inv()?;
        let conj: Vec<Cyclo> = self.s.iter().map(Cyclo::conj).collect();
        let mut coeffs = vec![0u32; r * r * r];
        for a in 0..r {
            for b in a..r {
                let q = (0..r)
                    .map(|x| {
                        let ab = self.s(a, x).checked_mul(self.s(b, x))?;
                        ab.checked_mul(&inv_dims[x])
                    })
                    .collect::<Result<Vec<Cyclo>, _>>()?;
                let big = lcm_conductors(q.iter().chain(conj.iter()))?;
                for c in 0..r {
                    let mut acc = Accumulator::new(big);
                    for x in 0..r {
                        acc.add_product(&q[x], &conj[c * r + x]);
                    }
                    let value = acc.finish().checked_mul(&inv_global)?;
                    let n = as_nonnegative_u32(&value).ok_or_else(|| ModDataError::Verlinde {
                        a,
                        b,
                        c,
                        value: value.to_string(),
                    })?;
                    coeffs[(a * r + b) * r + c] = n;
                    coeffs[(b * r + a) * r + c] = n;
                }
            }
        }
        Ok(FusionRing::new(r, self.dual.clone(), coeffs, Some(self.names.clone()))?)
    }

    /// Every axiom of premodular data, with indexed failures. Fusion rules are
    /// the attached ones, else Verlinde's.
    pub fn verify_premodular(&self) -> VerificationReport {
        let r = self.rank();
        let mut defects = Vec::new();
        for a in 0..r {
            if self.dual[self.dual[a]] != a {
                defects.push(Defect::DualNotInvolution { a });
            }
            let d = self.dim(a);
            if *d != d.conj() || d.to_complex::<f64>().re <= 0.0 {
                defects.push(Defect::DimensionNotPositive { a });
            }
            for b in 0..r {
                if b > a && self.s(a, b) != self.s(b, a) {
                    defects.push(Defect::NotSymmetric { a, b });
                }
                if self.s(a, b).conj() != *self.s(a, self.dual[b]) {
                    defects.push(Defect::DualityConjugation { a, b });
                }
            }
        }
        if !self.t[0].is_one() {
            defects.push(Defect::UnitTwist);
        }
        for a in 0..r {
            if self.t[a].order_of_unity().is_none() {
                defects.push(Defect::TwistNotRootOfUnity { a });
            }
            if self.t[a] != self.t[self.dual[a]] {
                defects.push(Defect::TwistOfDual { a });
            }
        }
        let ring = match self.fusion_ring() {
            Ok(ring) => ring,
            Err(e) => {
                defects.push(Defect::NoFusionRules { detail: e.to_string() });
                return VerificationReport { rank: r, names: self.names.clone(), defects };
            }
        };
        let validation = ring.validate();
        if let Some(f) = validation.failures.first() {
            defects.push(Defect::FusionMismatch { detail: f.to_string() });
        }
        if ring.duals() != self.dual.as_slice() {
            defects.push(Defect::FusionMismatch { detail: "fusion duality differs from data duality".into() });
        }
        let dtheta: Vec<Cyclo> = (0..r).map(|c| self.dim(c) * &self.t[c]).collect();
        for a in 0..r {
            for b in a..r {
                let lhs = &(&self.t[a] * &self.t[b]) * self.s(a, b);
                let rhs: Cyclo = ring
                    .product(self.dual[a], b)
                    .map(|(c, m)| dtheta[c].scale(&crate::rational(i64::from(m), 1)))
                    .sum();
                if lhs != rhs {
                    defects.push(Defect::Balancing { a, b });
                }
            }
        }
        VerificationReport { rank: r, names: self.names.clone(), defects }
    }

    /// Index pairs where `S · conj(S)` differs from `D · Id`.
    pub fn modularity_defects(&self) -> Result<Vec<(usize, usize)>, ModDataError> {
        let r = self.rank();
        let big = self.s_conductor()?;
        let d = self.global_dim();
        let mut out = Vec::new();
        for a in 0..r {
            for b in a..r {
                let mut acc = Accumulator::new(big);
                for x in 0..r {
                    acc.add_product(self.s(a, x), &self.s(b, x).conj());
                }
                let v = acc.finish();
                let expected = if a == b { d.clone() } else { Cyclo::zero() };
                if v != expected {
                    out.push((a, b));
                }
            }
        }
        Ok(out)
    }

    /// Premodular checks, plus `S · conj(S) = D · Id` when the data claims to be modular.
    pub fn verify(&self) -> VerificationReport {
        let mut report = self.verify_premodular();
        if self.modular {
            match self.modularity_defects() {
                Ok(v) => report.defects.extend(v.into_iter().map(|(a, b)| Defect::Modularity { a, b })),
                Err(e) => report.defects.push(Defect::NoFusionRules { detail: e.to_string() }),
            }
        }
        report
    }

    /// Checks that `labels` is closed under the fusion rules.
    pub fn span<I: IntoIterator<Item = usize>>(&self, labels: I) -> Result<Span, ModDataError> {
        let set: LabelSet = labels.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&a| a >= self.rank()) {
            return Err(ModDataError::LabelOutOfRange(bad));
        }
        if !self.fusion_ring()?.is_closed(&set) {
            return Err(ModDataError::NotClosed(set.into_iter().collect()));
        }
        Ok(Span(set))
    }

    pub fn full_span(&self) -> Span {
        Span((0..self.rank()).collect())
    }

    fn centralizes(&self, x: usize, y: usize) -> bool {
        *self.s(x, y) == self.dim(x) * self.dim(y)
    }

    /// All `X` with `S_{XY} = d_X d_Y` for every `Y` in the span.
    pub fn centralizer(&self, span: &Span) -> Span {
        Span((0..self.rank()).filter(|&x| span.iter().all(|y| self.centralizes(x, y))).collect())
    }

    pub fn muger_center(&self) -> Span {
        self.centralizer(&self.full_span())
    }

    pub fn is_modular(&self) -> bool {
        self.muger_center().len() == 1
    }

    pub fn is_symmetric(&self) -> bool {
        self.muger_center().len() == self.rank()
    }

    pub fn is_self_inverse_invertible(&self, a: usize) -> bool {
        a < self.rank() && self.dim(a).is_one() && self.dual[a] == a
    }

    /// Boson, fermion or semion, by the twist of a self-inverse invertible object.
    pub fn classify_invertible(&self, a: usize) -> Result<InvertibleKind, ModDataError> {
        if !self.is_self_inverse_invertible(a) {
            return Err(ModDataError::NotSelfInverse(a));
        }
        let theta = &self.t[a];
        Ok(if theta.is_one() {
            InvertibleKind::Boson
        } else if *theta == Cyclo::from_integer(-1) {
            InvertibleKind::Fermion
        } else if *theta == Cyclo::i() || *theta == -Cyclo::i() {
            InvertibleKind::Semion
        } else {
            InvertibleKind::Other
        })
    }

    /// Whether `{1, a}` is the Tannakian category `Rep(Z_2)`.
    pub fn tannakian_rank2(&self, a: usize) -> Result<bool, ModDataError> {
        let kind = self.classify_invertible(a)?;
        Ok(kind == InvertibleKind::Boson && self.s(a, a).is_one())
    }

    /// Data restricted to a span; premodular in general, so it carries fusion rules.
    pub fn restrict(&self, span: &Span) -> Result<ModularData, ModDataError> {
        let list: Vec<usize> = span.iter().collect();
        let pos: BTreeMap<usize, usize> = list.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let ring = self.fusion_ring()?.restrict(span.labels())?;
        let s = list.iter().map(|&a| list.iter().map(|&b| self.s(a, b).clone()).collect()).collect();
        let t = list.iter().map(|&a| self.t[a].clone()).collect();
        let dual = list.iter().map(|&a| pos[&self.dual[a]]).collect();
        let names = list.iter().map(|&a| self.names[a].clone()).collect();
        let mut out = ModularData::new(names, s, t, dual, false)?.with_fusion(ring)?;
        out.modular = out.is_modular();
        Ok(out)
    }

    /// Same data with labels renamed: new label `perm[a]` is old label `a`.
    pub fn permuted(&self, perm: &[usize]) -> ModularData {
        let r = self.rank();
        let mut inv = vec![0; r];
        for (a, &p) in perm.iter().enumerate() {
            inv[p] = a;
        }
        ModularData {
            names: (0..r).map(|x| self.names[inv[x]].clone()).collect(),
            s: (0..r * r).map(|i| self.s(inv[i / r], inv[i % r]).clone()).collect(),
            t: (0..r).map(|x| self.t[inv[x]].clone()).collect(),
            dual: (0..r).map(|x| perm[self.dual[inv[x]]]).collect(),
            fusion: self.fusion.as_ref().map(|f| f.permuted(perm)),
            modular: self.modular,
        }
    }

    /// Renames the labels.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, ModDataError> {
        if names.len() != self.rank() {
            return Err(ModDataError::Shape { what: "names", got: names.len(), expected: self.rank() });
        }
        self.names = names;
        Ok(self)
    }
}

/// Pairs `(a, b)` in lexicographic order; `S` is the Kronecker product, `T` pointwise.
pub fn deligne_product(a: &ModularData, b: &ModularData) -> Result<ModularData, ModDataError> {
    let (r1, r2) = (a.rank(), b.rank());
    let r = r1 * r2;
    if r > MAX_RANK {
        return Err(ModDataError::BadRank(r));
    }
    let split = |i: usize| (i / r2, i % r2);
    let mut s = Vec::with_capacity(r);
    for i in 0..r {
        let (i1, i2) = split(i);
        let row = (0..r)
            .map(|j| {
                let (j1, j2) = split(j);
                a.s(i1, j1).checked_mul(b.s(i2, j2))
            })
            .collect::<Result<Vec<_>, _>>()?;
        s.push(row);
    }
    let t = (0..r)
        .map(|i| {
            let (i1, i2) = split(i);
            a.t(i1).checked_mul(b.t(i2))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dual = (0..r).map(|i| a.dual(i / r2) * r2 + b.dual(i % r2)).collect();
    let names = (0..r).map(|i| pair_name(a.name(i / r2), b.name(i % r2))).collect();
    let fusion = a.fusion_ring()?.tensor(&b.fusion_ring()?)?;
    ModularData::new(names, s, t, dual, a.modular && b.modular)?.with_fusion(fusion)
}

/// A unit-fixing bijection `φ` with `S'_{φa,φb} = S_{ab}` and `θ'_{φa} = θ_a`, if one exists.
pub fn equivalent_data(a: &ModularData, b: &ModularData) -> Option<Vec<usize>> {
    let r = a.rank();
    if b.rank() != r {
        return None;
    }
    let key = |m: &ModularData, x: usize| (m.t(x).clone(), m.dim(x).clone(), m.s(x, x).clone());
    let candidates: Vec<Vec<usize>> =
        (0..r).map(|x| (0..r).filter(|&y| key(a, x) == key(b, y)).collect()).collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let mut map = vec![usize::MAX; r];
    let mut used = vec![false; r];
    fn go(
        a: &ModularData,
        b: &ModularData,
        candidates: &[Vec<usize>],
        i: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == a.rank() {
            return true;
        }
        for &j in &candidates[i] {
            if used[j] || (i == 0) != (j == 0) {
                continue;
            }
            if (0..i).all(|x| a.s(i, x) == b.s(j, map[x])) {
                map[i] = j;
                used[j] = true;
                if go(a, b, candidates, i + 1, map, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(a, b, &candidates, 0, &mut map, &mut used).then_some(map)
}

pub(crate) fn lcm_conductors<'a, I: Iterator<Item = &'a Cyclo>>(iter: I) -> Result<usize, CycloError> {
    let l = iter.fold(1usize, |acc, x| acc.lcm(&x.conductor()));
    let limit = crate::cyclo::conductor_limit();
    if l > limit {
        Err(CycloError::ConductorLimit { requested: l, limit })
    } else {
        Ok(l)
    }
}

fn as_nonnegative_u32(x: &Cyclo) -> Option<u32> {
    let v = x.as_scalar()?;
    if !v.is_integer() || v.is_negative() {
        return None;
    }
    v.to_integer().to_u32()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::sqrt_int;

    fn z3() -> ModularData {
        // q(j) = ζ_3^{j²}, S_{jk} = ζ_3^{-2jk}
        let s = (0..3).map(|j| (0..3).map(|k| Cyclo::root_of_unity(-2 * j * k, 3)).collect()).collect();
        let t = (0..3).map(|j| Cyclo::root_of_unity(j * j, 3)).collect();
        ModularData::new(vec!["0".into(), "1".into(), "2".into()], s, t, vec![0, 2, 1], true).unwrap()
    }

    fn ising() -> ModularData {
        let r2 = sqrt_int(2);
        let one = Cyclo::one;
        let s = vec![
            vec![one(), one(), r2.clone()],
            vec![one(), one(), -r2.clone()],
            vec![r2.clone(), -r2, Cyclo::zero()],
        ];
        let t = vec![one(), Cyclo::from_integer(-1), Cyclo::root_of_unity(1, 16)];
        ModularData::new(vec!["1".into(), "psi".into(), "sigma".into()], s, t, vec![0, 1, 2], true).unwrap()
    }

    fn rep_z2() -> ModularData {
        let s = vec![vec![Cyclo::one(); 2]; 2];
        ModularData::new(vec!["1".into(), "g".into()], s, vec![Cyclo::one(); 2], vec![0, 1], false)
            .unwrap()
            .with_fusion(FusionRing::abelian_group_ring(&[2]).unwrap())
            .unwrap()
    }

    #[test]
    fn cyclic_three() {
        let md = z3();
        assert!(md.verify().passed(), "{}", md.verify());
        assert_eq!(md.global_dim(), Cyclo::from_integer(3));
        let ring = md.verlinde_ring().unwrap();
        assert!(ring.first_ring_isomorphism(&FusionRing::abelian_group_ring(&[3]).unwrap()).is_some());
        assert_eq!(ring.n(1, 1, 2), 1);
        assert!(md.is_modular());
        assert!(md.modularity_defects().unwrap().is_empty());
    }

    #[test]
    fn wrong_conjugate_convention_breaks_balancing() {
        // S_{jk} = ζ_3^{+2jk} is the transpose-conjugate convention and must fail.
        let s = (0..3).map(|j| (0..3).map(|k| Cyclo::root_of_unity(2 * j * k, 3)).collect()).collect();
        let t = (0..3).map(|j| Cyclo::root_of_unity(j * j, 3)).collect();
        let md = ModularData::new(vec!["0".into(), "1".into(), "2".into()], s, t, vec![0, 2, 1], true).unwrap();
        assert!(md.verify().has_balancing_failure(1, 1));
    }

    #[test]
    fn ising_data() {
        let md = ising();
        assert!(md.verify().passed(), "{}", md.verify());
        let ring = md.verlinde_ring().unwrap();
        assert_eq!(ring, FusionRing::ising());
        assert_eq!(md.classify_invertible(1).unwrap(), InvertibleKind::Fermion);
        assert!(!md.tannakian_rank2(1).unwrap());
        assert!(md.tannakian_rank2(0).unwrap());
        assert!(md.classify_invertible(2).is_err());
    }

    #[test]
    fn symmetric_rep_z2() {
        let md = rep_z2();
        assert!(md.verify().passed(), "{}", md.verify());
        assert!(md.is_symmetric());
        assert!(!md.is_modular());
        assert_eq!(md.classify_invertible(1).unwrap(), InvertibleKind::Boson);
        assert!(md.tannakian_rank2(1).unwrap());
    }

    #[test]
    fn degenerate_data_without_fusion_is_reported() {
        let s = vec![vec![Cyclo::one(); 2]; 2];
        let md = ModularData::new(vec!["1".into(), "g".into()], s, vec![Cyclo::one(); 2], vec![0, 1], false).unwrap();
        assert!(md.verify_premodular().defects.iter().any(|d| matches!(d, Defect::NoFusionRules { .. })));
    }

    #[test]
    fn centralizers() {
        let md = ising();
        assert_eq!(md.centralizer(&Span(LabelSet::from([0]))), md.full_span());
        assert_eq!(md.muger_center().len(), 1);
        let psi = md.span([0, 1]).unwrap();
        assert_eq!(md.centralizer(&psi), psi);
        assert!(md.span([0, 2]).is_err());
    }

    #[test]
    fn products_and_equivalence() {
        let trivial = ModularData::new(vec!["1".into()], vec![vec![Cyclo::one()]], vec![Cyclo::one()], vec![0], true).unwrap();
        let p = deligne_product(&ising(), &trivial).unwrap();
        assert!(equivalent_data(&p, &ising()).is_some());
        let q = deligne_product(&ising(), &z3()).unwrap();
        assert_eq!(q.rank(), 9);
        assert_eq!(q.global_dim(), Cyclo::from_integer(12));
        assert!(q.verify().passed());
        let perm = vec![0, 4, 2, 3, 1, 8, 6, 7, 5];
        let shuffled = q.permuted(&perm);
        assert!(shuffled.verify().passed());
        let found = equivalent_data(&q, &shuffled).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(q.s(a, b), shuffled.s(found[a], found[b]));
            }
        }
        assert!(equivalent_data(&q, &deligne_product(&ising(), &rep_z2()).unwrap()).is_none());
        let mixed = deligne_product(&ising(), &rep_z2()).unwrap();
        assert!(mixed.verify().passed(), "{}", mixed.verify());
        assert!(!mixed.is_modular());
    }

    #[test]
    fn restriction_keeps_fusion() {
        let q = deligne_product(&ising(), &z3()).unwrap();
        let sub = q.span([0, 3, 6]).unwrap();
        let r = q.restrict(&sub).unwrap();
        assert!(r.verify().passed());
        assert!(r.is_modular());
        assert!(equivalent_data(&r, &ising()).is_some());
    }
}

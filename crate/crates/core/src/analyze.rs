//! Classification predicates evaluated on explicit modular data.
//!
//! Every positive answer carries a witness (label sets, label maps) that can be
//! rechecked against the data.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::fusion::{dihedral_rep_ring, FusionError, FusionRing, LabelSet};
use crate::moddata::{equivalent_data, InvertibleKind, ModDataError, ModularData, Span};
use crate::zoo::{self, MetaplecticLabels, MetricGroup, ZooError};
use crate::Cyclo;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("label {0} is not a boson")]
    NotBoson(String),
    #[error("global dimension is not a rational integer")]
    NotWeaklyIntegral,
    #[error("global dimension {dim} is not of the form {p}^k * {m}{extra}")]
    DimensionMismatch { dim: String, p: u64, m: u64, extra: &'static str },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("m = {m} must be square-free and coprime to p = {p}")]
    BadM { p: u64, m: u64 },
    #[error("{0} must be odd")]
    MustBeOdd(&'static str),
    #[error("rank {0} exceeds the 64-label limit of the span search")]
    RankTooLarge(usize),
    #[error(transparent)]
    ModData(#[from] ModDataError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Zoo(#[from] ZooError),
}

/// Data with its fusion ring attached, plus centralizer bitmasks.
struct Context {
    md: ModularData,
    ring: FusionRing,
    /// `cent[x]` has bit `y` set iff `S_xy = d_x d_y`.
    cent: Vec<u64>,
}

impl Context {
    fn new(md: &ModularData) -> Result<Self, AnalyzeError> {
        let r = md.rank();
        if r > 64 {
            return Err(AnalyzeError::RankTooLarge(r));
        }
        let ring = md.fusion_ring()?;
        let md = md.clone().with_fusion(ring.clone())?;
        let cent = (0..r)
            .map(|x| {
                (0..r)
                    .filter(|&y| *md.s(x, y) == md.dim(x) * md.dim(y))
                    .fold(0u64, |m, y| m | 1 << y)
            })
            .collect();
        Ok(Context { md, ring, cent })
    }

    fn rank(&self) -> usize {
        self.md.rank()
    }

    fn full(&self) -> u64 {
        if self.rank() == 64 {
            u64::MAX
        } else {
            (1u64 << self.rank()) - 1
        }
    }

    fn centralizer(&self, mask: u64) -> u64 {
        bits(mask).fold(self.full(), |acc, x| acc & self.cent[x])
    }

    fn is_modular_span(&self, mask: u64) -> bool {
        mask & self.centralizer(mask) == 1
    }

    fn restrict(&self, mask: u64) -> Result<ModularData, AnalyzeError> {
        Ok(self.md.restrict(&Span(bits(mask).collect()))?)
    }

    fn names(&self, mask: u64) -> Vec<String> {
        bits(mask).map(|x| self.md.name(x).to_string()).collect()
    }

    fn lattice(&self) -> Vec<u64> {
        self.ring.subring_lattice().iter().map(to_mask).collect()
    }

    /// Checks that `A ⊠ B → C`, `(a, b) ↦ a ⊗ b`, is an equivalence of data.
    fn factor_through(&self, a: u64, b: u64) -> Option<FactorizationWitness> {
        let (al, bl): (Vec<usize>, Vec<usize>) = (bits(a).collect(), bits(b).collect());
        if al.len() * bl.len() != self.rank() || a & b != 1 {
            return None;
        }
        if !self.is_modular_span(a) || !self.is_modular_span(b) {
            return None;
        }
        let mut map = Vec::with_capacity(self.rank());
        let mut seen = 0u64;
        for &x in &al {
            for &y in &bl {
                let mut it = self.ring.product(x, y);
                let (c, m) = it.next()?;
                if m != 1 || it.next().is_some() || seen >> c & 1 == 1 {
                    return None;
                }
                seen |= 1 << c;
                map.push([x, y, c]);
            }
        }
        let md = &self.md;
        for (i, &[x, y, c]) in map.iter().enumerate() {
            if *md.t(c) != md.t(x) * md.t(y) {
                return None;
            }
            for &[x2, y2, c2] in &map[i..] {
                if *md.s(c, c2) != md.s(x, x2) * md.s(y, y2) {
                    return None;
                }
            }
        }
        Some(FactorizationWitness {
            left: al,
            right: bl,
            left_names: self.names(a),
            right_names: self.names(b),
            map,
        })
    }

    fn dims(&self) -> Vec<Cyclo> {
        self.md.dims()
    }

    fn is_pointed_mask(&self, mask: u64) -> bool {
        bits(mask).all(|x| self.md.dim(x).is_one())
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| mask >> i & 1 == 1)
}

fn to_mask(set: &LabelSet) -> u64 {
    set.iter().fold(0, |m, &x| m | 1 << x)
}

fn integer(x: &Cyclo) -> Option<BigInt> {
    x.as_scalar().filter(|v| v.is_integer()).map(|v| v.to_integer())
}

fn positive_u64(x: &Cyclo) -> Option<u64> {
    integer(x).filter(|v| v.is_positive()).and_then(|v| v.to_u64())
}

fn is_integral_dims(dims: &[Cyclo]) -> bool {
    dims.iter().all(|d| integer(d).is_some())
}

/// Short label for a dimension: `3`, `√3`, `2√3`, or the full expression.
pub fn dim_label(d: &Cyclo) -> String {
    if let Some(v) = integer(d) {
        return v.to_string();
    }
    let Some(n) = positive_u64(&(d * d)) else {
        return d.to_string();
    };
    let sign = if d.to_complex::<f64>().re < 0.0 { "-" } else { "" };
    match arith::split_square(n) {
        (1, f) => format!("{sign}√{f}"),
        (s, f) => format!("{sign}{s}√{f}"),
    }
}

/// A factorization `C ≅ A ⊠ B`; `map` lists `[a, b, c]` with `a ⊗ b = c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorizationWitness {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub left_names: Vec<String>,
    pub right_names: Vec<String>,
    pub map: Vec<[usize; 3]>,
}

impl FactorizationWitness {
    /// Rechecks the witness against `md` from scratch.
    pub fn verify(&self, md: &ModularData) -> bool {
        let Ok(ctx) = Context::new(md) else { return false };
        let mask = |v: &[usize]| v.iter().fold(0u64, |m, &x| m | 1 << x);
        ctx.factor_through(mask(&self.left), mask(&self.right)).as_ref() == Some(self)
    }
}

// ---------------------------------------------------------------------------
// condensation

/// One simple object of the condensed category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CondensedSimple {
    /// Parent labels: an orbit `{X, bX}` or a fixed point `X` (which splits in two).
    pub parents: Vec<usize>,
    pub name: String,
    pub dim: Cyclo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CondensationReport {
    pub boson: usize,
    pub boson_name: String,
    pub parent_dim: Cyclo,
    pub free_orbits: Vec<[usize; 2]>,
    pub fixed_points: Vec<usize>,
    pub inventory: Vec<CondensedSimple>,
    pub condensed_dim: Cyclo,
    /// `condensed_dim = parent_dim / 2`.
    pub conserved: bool,
    pub invertible_count: usize,
    /// `(dimension, count)` for the non-integral simples, in order of appearance.
    pub non_integral: Vec<(String, usize)>,
    /// `(dimension, count)` for integral simples of dimension above one.
    pub integral_higher: Vec<(String, usize)>,
}

impl CondensationReport {
    /// `"6 invertibles, 2 × √3"`.
    pub fn summary(&self) -> String {
        let mut parts = vec![format!(
            "{} invertible{}",
            self.invertible_count,
            if self.invertible_count == 1 { "" } else { "s" }
        )];
        parts.extend(self.integral_higher.iter().chain(&self.non_integral).map(|(d, k)| format!("{k} × {d}")));
        parts.join(", ")
    }

    pub fn non_integral_total(&self) -> usize {
        self.non_integral.iter().map(|(_, k)| k).sum()
    }

    /// Shape of a generalized Tambara-Yamagami category times a pointed one:
    /// one irrational dimension `d` with `d² · #non-integral = #invertibles`.
    pub fn is_ty_shaped(&self) -> bool {
        if self.non_integral.len() != 1 || !self.integral_higher.is_empty() {
            return false;
        }
        let d = &self.inventory.iter().find(|s| integer(&s.dim).is_none()).expect("non-integral simple").dim;
        positive_u64(&(d * d)).is_some_and(|n| n as usize * self.non_integral_total() == self.invertible_count)
    }
}

fn group_dims<'a, I: Iterator<Item = &'a Cyclo>>(dims: I) -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = Vec::new();
    for d in dims {
        let label = dim_label(d);
        match out.iter_mut().find(|(l, _)| *l == label) {
            Some(entry) => entry.1 += 1,
            None => out.push((label, 1)),
        }
    }
    out
}

/// Orbit bookkeeping for the `Z_2` de-equivariantization by the boson `b`.
pub fn condense_boson(md: &ModularData, b: usize) -> Result<CondensationReport, AnalyzeError> {
    if b >= md.rank() {
        return Err(ModDataError::LabelOutOfRange(b).into());
    }
    let not_boson = || AnalyzeError::NotBoson(md.name(b).to_string());
    match md.classify_invertible(b) {
        Ok(InvertibleKind::Boson) => {}
        _ => return Err(not_boson()),
    }
    let ring = md.fusion_ring()?;
    let act = |x: usize| ring.product(b, x).next().expect("invertible action").0;
    if b == 0 {
        return Err(not_boson());
    }
    let half = crate::rational(1, 2);
    let mut free_orbits = Vec::new();
    let mut fixed_points = Vec::new();
    let mut inventory = Vec::new();
    for x in 0..md.rank() {
        let y = act(x);
        if y == x {
            fixed_points.push(x);
            let dim = md.dim(x).scale(&half);
            for k in 0..2 {
                inventory.push(CondensedSimple { parents: vec![x], name: format!("{}_{k}", md.name(x)), dim: dim.clone() });
            }
        } else if x < y {
            free_orbits.push([x, y]);
            inventory.push(CondensedSimple { parents: vec![x, y], name: format!("[{}]", md.name(x)), dim: md.dim(x).clone() });
        }
    }
    let condensed_dim: Cyclo = inventory.iter().map(|s| &s.dim * &s.dim).sum();
    let parent_dim = md.global_dim();
    let conserved = condensed_dim == parent_dim.scale(&half);
    let invertible_count = inventory.iter().filter(|s| s.dim.is_one()).count();
    let non_integral = group_dims(inventory.iter().map(|s| &s.dim).filter(|d| integer(d).is_none()));
    let integral_higher =
        group_dims(inventory.iter().map(|s| &s.dim).filter(|d| integer(d).is_some() && !d.is_one()));
    Ok(CondensationReport {
        boson: b,
        boson_name: md.name(b).to_string(),
        parent_dim,
        free_orbits,
        fixed_points,
        inventory,
        condensed_dim,
        conserved,
        invertible_count,
        non_integral,
        integral_higher,
    })
}

/// Self-inverse invertible labels with twist 1, excluding the unit.
pub fn bosons(md: &ModularData) -> Vec<usize> {
    (1..md.rank())
        .filter(|&a| matches!(md.classify_invertible(a), Ok(InvertibleKind::Boson)))
        .collect()
}

// ---------------------------------------------------------------------------
// dimension criteria

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityReport {
    pub global_dim: u64,
    pub integral: bool,
    pub strictly_weakly_integral: bool,
    pub divisible_by_four: bool,
    /// Strictly weakly integral implies `4 | D`.
    pub holds: bool,
}

/// Evaluates "strictly weakly integral implies `4 | D`" from a list of dimensions.
pub fn swi_divisibility_from_dims(dims: &[Cyclo]) -> Result<DivisibilityReport, AnalyzeError> {
    let total: Cyclo = dims.iter().map(|d| d * d).sum();
    let global_dim = positive_u64(&total).ok_or(AnalyzeError::NotWeaklyIntegral)?;
    let integral = is_integral_dims(dims);
    let divisible_by_four = global_dim % 4 == 0;
    Ok(DivisibilityReport {
        global_dim,
        integral,
        strictly_weakly_integral: !integral,
        divisible_by_four,
        holds: integral || divisible_by_four,
    })
}

pub fn check_swi_divisibility(md: &ModularData) -> Result<DivisibilityReport, AnalyzeError> {
    swi_divisibility_from_dims(&md.dims())
}

/// One instance of "hypothesis implies conclusion".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Implication {
    pub name: String,
    /// Whether the shape of the statement matches this instance.
    pub applicable: bool,
    pub hypothesis: bool,
    pub conclusion: bool,
    pub holds: bool,
}

impl Implication {
    fn new(name: &str, applicable: bool, hypothesis: bool, conclusion: bool) -> Self {
        Implication {
            name: name.into(),
            applicable,
            hypothesis,
            conclusion,
            holds: !applicable || !hypothesis || conclusion,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        !self.applicable || !self.hypothesis
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointednessReport {
    pub p: u64,
    pub m: u64,
    pub k: u32,
    pub global_dim: u64,
    pub pointed_dim: u64,
    pub integral: bool,
    pub pointed: bool,
    pub implications: Vec<Implication>,
}

impl PointednessReport {
    pub fn holds(&self) -> bool {
        self.implications.iter().all(|i| i.holds)
    }

    pub fn implication(&self, name: &str) -> Option<&Implication> {
        self.implications.iter().find(|i| i.name == name)
    }
}

pub const PRIME_POWER_IN_POINTED_PART: &str = "prime power divides pointed part => pointed";
pub const INTEGRAL_P2M: &str = "integral of dimension p^2 m => pointed";
pub const INTEGRAL_P3M: &str = "integral of dimension p^3 m => pointed";

/// Exponent `k` with `D = p^k m`.
fn shape_exponent(md: &ModularData, p: u64, m: u64) -> Result<(u64, u32), AnalyzeError> {
    if !arith::is_prime(p) {
        return Err(AnalyzeError::NotPrime(p));
    }
    if !arith::is_squarefree(m) || m.is_multiple_of(p) {
        return Err(AnalyzeError::BadM { p, m });
    }
    let total = md.global_dim();
    let mismatch = |extra| AnalyzeError::DimensionMismatch { dim: total.to_string(), p, m, extra };
    let d = positive_u64(&total).ok_or_else(|| mismatch(""))?;
    if d % m != 0 {
        return Err(mismatch(""));
    }
    let mut rest = d / m;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    if rest != 1 || k == 0 {
        return Err(mismatch(" with k >= 1"));
    }
    Ok((d, k))
}

pub fn pointedness_criteria(md: &ModularData, p: u64, m: u64) -> Result<PointednessReport, AnalyzeError> {
    let (global_dim, k) = shape_exponent(md, p, m)?;
    let ring = md.fusion_ring()?;
    let pointed_dim = ring.invertible_labels().len() as u64;
    let dims = md.dims();
    let integral = is_integral_dims(&dims);
    let pointed = pointed_dim == md.rank() as u64;
    let pk = p.pow(k);
    let implications = vec![
        Implication::new(PRIME_POWER_IN_POINTED_PART, true, pointed_dim.is_multiple_of(pk), pointed),
        Implication::new(INTEGRAL_P2M, k == 2, integral, pointed),
        Implication::new(INTEGRAL_P3M, k == 3, integral, pointed),
    ];
    Ok(PointednessReport { p, m, k, global_dim, pointed_dim, integral, pointed, implications })
}

// ---------------------------------------------------------------------------
// subcategories

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Semion,
    Ising,
    TannakianZ2,
}

impl std::str::FromStr for Pattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "semion" => Ok(Pattern::Semion),
            "ising" => Ok(Pattern::Ising),
            "tannakian_z2" | "tannakian-z2" => Ok(Pattern::TannakianZ2),
            _ => Err(format!("unknown pattern {s:?}")),
        }
    }
}

/// A span whose restricted data matches a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubdataWitness {
    pub pattern: Pattern,
    pub labels: Vec<usize>,
    pub names: Vec<String>,
    /// The reference datum matched, e.g. `ising(3)`.
    pub reference: String,
    /// Reference label `i` corresponds to `labels[map[i]]`.
    pub map: Vec<usize>,
}

fn references(pattern: Pattern) -> Vec<(String, ModularData)> {
    match pattern {
        Pattern::Semion => [1i8, -1].iter().map(|&s| (format!("semion({s:+})"), zoo::semion(s))).collect(),
        Pattern::Ising => (1..16)
            .step_by(2)
            .map(|nu| (format!("ising({nu})"), zoo::ising(nu).expect("odd")))
            .collect(),
        Pattern::TannakianZ2 => {
            let rep = MetricGroup::new(&[2], vec![0.into(), 0.into()]).expect("trivial form");
            vec![("Rep(Z2)".into(), zoo::pointed_data(&rep).expect("pointed"))]
        }
    }
}

fn pattern_rank(pattern: Pattern) -> usize {
    match pattern {
        Pattern::Ising => 3,
        Pattern::Semion | Pattern::TannakianZ2 => 2,
    }
}

fn match_pattern(ctx: &Context, mask: u64, pattern: Pattern) -> Result<Option<SubdataWitness>, AnalyzeError> {
    if mask.count_ones() as usize != pattern_rank(pattern) {
        return Ok(None);
    }
    let sub = ctx.restrict(mask)?;
    let labels: Vec<usize> = bits(mask).collect();
    for (reference, data) in references(pattern) {
        if let Some(phi) = equivalent_data(&data, &sub) {
            return Ok(Some(SubdataWitness {
                pattern,
                names: ctx.names(mask),
                labels,
                reference,
                map: phi,
            }));
        }
    }
    Ok(None)
}

/// All fusion-closed spans matching the pattern. Spans of rank at most three are
/// generated by a single simple, so closures of singletons are exhaustive.
fn find_subdata(ctx: &Context, pattern: Pattern) -> Result<Vec<SubdataWitness>, AnalyzeError> {
    let spans: BTreeSet<u64> = (1..ctx.rank()).map(|a| to_mask(&ctx.ring.subring_closure([a]))).collect();
    let mut out = Vec::new();
    for mask in spans {
        if let Some(w) = match_pattern(ctx, mask, pattern)? {
            out.push(w);
        }
    }
    Ok(out)
}

pub fn detect_subdata(md: &ModularData, pattern: Pattern) -> Result<Option<SubdataWitness>, AnalyzeError> {
    let ctx = Context::new(md)?;
    Ok(find_subdata(&ctx, pattern)?.into_iter().next())
}

// ---------------------------------------------------------------------------
// primality

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimalityReport {
    pub prime: bool,
    pub spans_examined: usize,
    pub witness: Option<FactorizationWitness>,
}

/// Searches the subring lattice for a nontrivial modular factorization.
pub fn primality(md: &ModularData) -> Result<PrimalityReport, AnalyzeError> {
    let ctx = Context::new(md)?;
    let r = ctx.rank();
    let lattice = ctx.lattice();
    let mut examined = 0;
    for &a in &lattice {
        let size = a.count_ones() as usize;
        if size == 1 || size == r || r % size != 0 {
            continue;
        }
        examined += 1;
        let b = ctx.centralizer(a);
        if let Some(witness) = ctx.factor_through(a, b) {
            return Ok(PrimalityReport { prime: false, spans_examined: examined, witness: Some(witness) });
        }
    }
    Ok(PrimalityReport { prime: true, spans_examined: examined, witness: None })
}

// ---------------------------------------------------------------------------
// metaplectic recognition and structure

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetaplecticMatch {
    pub n: u64,
    /// Label `a` of the data corresponds to label `isomorphism[a]` of the reference ring.
    pub isomorphism: Vec<usize>,
}

/// The odd `N` for which the fusion ring is that of the metaplectic data, if any.
pub fn recognize_metaplectic(md: &ModularData) -> Result<Option<MetaplecticMatch>, AnalyzeError> {
    let r = md.rank() as u64;
    if r < 8 || (r - 7).is_multiple_of(2) {
        return Ok(None);
    }
    let n = r - 7;
    if md.global_dim() != Cyclo::from_integer(8 * n as i64) {
        return Ok(None);
    }
    let ring = md.fusion_ring()?;
    let reference = zoo::metaplectic_ring(n)?;
    Ok(ring.first_ring_isomorphism(&reference).map(|isomorphism| MetaplecticMatch { n, isomorphism }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetaplecticStructure {
    pub n: u64,
    pub universal_grading: Option<Vec<u64>>,
    pub invertibles: Option<Vec<u64>>,
    /// The universal grading group and the invertibles are both `Z/4`.
    pub universal_is_z4: bool,
    pub two_dim_self_dual: bool,
    /// The `V` with `g ⊂ V ⊗ V`, each paired with whether `V* = g³V`.
    pub v_dual_via_g3: Vec<(String, bool)>,
    pub v_dual_holds: bool,
    /// `X_i ⊗ V = V ⊕ g²V` for every `X_i` and `V`.
    pub x_times_v: bool,
    pub adjoint_labels: Vec<String>,
    pub adjoint_dim: u64,
    pub dihedral_m: u64,
    pub adjoint_dihedral_isomorphism: Option<Vec<usize>>,
    pub gn_grading: Option<Vec<u64>>,
    pub gn_n_values: Option<Vec<u64>>,
}

impl MetaplecticStructure {
    pub fn all_hold(&self) -> bool {
        self.universal_is_z4
            && self.two_dim_self_dual
            && self.v_dual_holds
            && self.x_times_v
            && self.adjoint_dihedral_isomorphism.is_some()
    }
}

fn single(ring: &FusionRing, a: usize, b: usize) -> Option<usize> {
    let mut it = ring.product(a, b);
    match (it.next(), it.next()) {
        (Some((c, 1)), None) => Some(c),
        _ => None,
    }
}

/// Structural facts about the metaplectic ring for odd `N ≥ 3`.
pub fn metaplectic_structure(n: u64) -> Result<MetaplecticStructure, AnalyzeError> {
    if n.is_multiple_of(2) {
        return Err(AnalyzeError::MustBeOdd("N"));
    }
    let md = zoo::metaplectic_data(n)?;
    let ring = zoo::metaplectic_ring(n)?;
    let l = MetaplecticLabels { n };
    let (g, g2, g3) = (MetaplecticLabels::G, MetaplecticLabels::G2, MetaplecticLabels::G3);
    let dims = md.dims();

    let universal_grading = ring.universal_grading()?.invariants;
    let invertibles = ring.invertibles().invariant_factors();
    let universal_is_z4 = universal_grading.as_deref() == Some(&[4]) && invertibles.as_deref() == Some(&[4]);

    let two_dim: Vec<usize> = (0..md.rank()).filter(|&a| dims[a] == Cyclo::from_integer(2)).collect();
    let two_dim_self_dual = two_dim.len() == n as usize - 1 && two_dim.iter().all(|&a| ring.dual(a) == a);

    let vs: Vec<usize> = (1..=4).map(|i| l.v(i)).collect();
    let v_dual_via_g3: Vec<(String, bool)> = vs
        .iter()
        .filter(|&&v| ring.n(v, v, g) > 0)
        .map(|&v| (md.name(v).to_string(), single(&ring, g3, v) == Some(ring.dual(v))))
        .collect();
    let v_dual_holds = !v_dual_via_g3.is_empty() && v_dual_via_g3.iter().all(|(_, ok)| *ok);

    let xs: Vec<usize> = (1..=l.half()).map(|k| l.x(k)).collect();
    let x_times_v = xs.iter().all(|&x| {
        vs.iter().all(|&v| {
            let Some(gv) = single(&ring, g2, v) else { return false };
            let mut want = vec![0u32; ring.rank()];
            want[v] += 1;
            want[gv] += 1;
            (0..ring.rank()).all(|c| ring.n(x, v, c) == want[c])
        })
    });

    let ad = ring.adjoint_subring();
    let adjoint_dim_c: Cyclo = ad.iter().map(|&a| &dims[a] * &dims[a]).sum();
    let adjoint_dim = positive_u64(&adjoint_dim_c).ok_or(AnalyzeError::NotWeaklyIntegral)?;
    let dihedral_m = adjoint_dim / 2;
    let adjoint_dihedral_isomorphism = if adjoint_dim % 2 == 0 && dihedral_m % 2 == 1 {
        ring.restrict(&ad)?.first_ring_isomorphism(&dihedral_rep_ring(dihedral_m)?)
    } else {
        None
    };
    let gn = ring.gn_grading(&dims).ok();
    Ok(MetaplecticStructure {
        n,
        universal_grading,
        invertibles,
        universal_is_z4,
        two_dim_self_dual,
        v_dual_via_g3,
        v_dual_holds,
        x_times_v,
        adjoint_labels: ad.iter().map(|&a| md.name(a).to_string()).collect(),
        adjoint_dim,
        dihedral_m,
        adjoint_dihedral_isomorphism,
        gn_grading: gn.as_ref().and_then(|x| x.invariants.clone()),
        gn_n_values: gn.and_then(|x| x.n_values),
    })
}

// ---------------------------------------------------------------------------
// particle-hole symmetry

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParticleHoleReport {
    pub n: usize,
    pub preserves_q: bool,
    pub preserves_b: bool,
    pub fixed_point_free: bool,
    pub free_orbits: Vec<[usize; 2]>,
    pub self_equivalence: bool,
}

impl ParticleHoleReport {
    pub fn confirmed(&self) -> bool {
        self.preserves_q && self.preserves_b && self.fixed_point_free && self.self_equivalence
    }
}

/// The automorphism `j ↦ -j` of an odd-order metric group.
pub fn particle_hole(mg: &MetricGroup) -> Result<ParticleHoleReport, AnalyzeError> {
    let n = mg.order();
    if n.is_multiple_of(2) {
        return Err(AnalyzeError::MustBeOdd("n"));
    }
    let perm: Vec<usize> = (0..n).map(|x| mg.group().inverse(x)).collect();
    let preserves_q = (0..n).all(|x| mg.q(perm[x]) == mg.q(x));
    let preserves_b = (0..n).all(|x| (0..n).all(|y| mg.b(perm[x], perm[y]) == mg.b(x, y)));
    let fixed_point_free = (1..n).all(|x| perm[x] != x);
    let free_orbits = (1..n).filter(|&x| x < perm[x]).map(|x| [x, perm[x]]).collect();
    let md = zoo::pointed_data(mg)?;
    let moved = md.permuted(&perm);
    let self_equivalence = moved.s_rows().eq(md.s_rows()) && moved.twists() == md.twists() && moved.duals() == md.duals();
    Ok(ParticleHoleReport { n, preserves_q, preserves_b, fixed_point_free, free_orbits, self_equivalence })
}

// ---------------------------------------------------------------------------
// counting

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetaplecticCount {
    pub n: u64,
    pub r: usize,
    pub forms: usize,
    pub classes: usize,
    /// Classes of cyclic forms on each odd prime-power factor `p^k` of `N`.
    pub per_prime: Vec<(u64, usize)>,
    /// Classes on the `Z_2` factor.
    pub semion_classes: usize,
    /// Size of the `H³(Z_2, U(1))` choice, an abstract two-element tag.
    pub h3_choices: usize,
    pub count: usize,
    pub expected_classes: usize,
    pub expected_count: usize,
}

impl MetaplecticCount {
    pub fn matches(&self) -> bool {
        self.classes == self.expected_classes
            && self.count == self.expected_count
            && self.per_prime.iter().all(|&(_, c)| c == 2)
    }
}

/// Gauging inputs for metaplectic data of dimension `8N`: classes of cyclic
/// modular data on `Z_{2N}` times the two-element `H³` choice.
pub fn count_metaplectic(n: u64) -> Result<MetaplecticCount, AnalyzeError> {
    if n.is_multiple_of(2) {
        return Err(AnalyzeError::MustBeOdd("N"));
    }
    let forms = zoo::cyclic_forms(2 * n)?.len();
    let classes = zoo::cyclic_form_classes(2 * n)?.len();
    let per_prime = zoo::prime_power_factors(n)
        .into_iter()
        .map(|q| Ok((q, zoo::cyclic_form_classes(q)?.len())))
        .collect::<Result<Vec<_>, ZooError>>()?;
    let semion_classes = zoo::cyclic_form_classes(2)?.len();
    let r = per_prime.len();
    let h3_choices = 2;
    Ok(MetaplecticCount {
        n,
        r,
        forms,
        classes,
        per_prime,
        semion_classes,
        h3_choices,
        count: classes * h3_choices,
        expected_classes: 1 << (r + 1),
        expected_count: 1 << (r + 2),
    })
}

// ---------------------------------------------------------------------------
// semion oracle

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReading {
    pub qualifying: Vec<usize>,
    pub satisfied: Vec<usize>,
    pub counterexamples: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemionOracleMember {
    pub index: usize,
    pub twists: Vec<String>,
    pub symmetric: bool,
    /// Invertibles `g ≠ 1` spanning a rank-2 Tannakian subcategory.
    pub tannakian: Vec<usize>,
    /// Those that are moreover transparent.
    pub transparent_tannakian: Vec<usize>,
    /// Invertibles with `θ = ±i` and `S_hh = -1`.
    pub semions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemionOracleReport {
    pub members: Vec<SemionOracleMember>,
    /// Hypothesis: non-symmetric with a transparent rank-2 Tannakian subcategory.
    pub transparent: OracleReading,
    /// Hypothesis: non-symmetric with any rank-2 Tannakian subcategory.
    pub literal: OracleReading,
}

impl SemionOracleReport {
    pub fn holds(&self) -> bool {
        self.transparent.counterexamples.is_empty()
    }
}

pub fn semion_prop_oracle() -> Result<SemionOracleReport, AnalyzeError> {
    let family = zoo::z2z2_premodular_family();
    let mut members = Vec::new();
    for (index, md) in family.iter().enumerate() {
        let center = md.muger_center();
        let mut tannakian = Vec::new();
        for g in 1..md.rank() {
            if md.is_self_inverse_invertible(g) && md.tannakian_rank2(g)? {
                tannakian.push(g);
            }
        }
        let transparent_tannakian = tannakian.iter().copied().filter(|&g| center.contains(g)).collect();
        let semions = (1..md.rank())
            .filter(|&h| {
                matches!(md.classify_invertible(h), Ok(InvertibleKind::Semion))
                    && *md.s(h, h) == Cyclo::from_integer(-1)
            })
            .collect();
        members.push(SemionOracleMember {
            index,
            twists: md.twists().iter().map(ToString::to_string).collect(),
            symmetric: md.is_symmetric(),
            tannakian,
            transparent_tannakian,
            semions,
        });
    }
    let reading = |pick: &dyn Fn(&SemionOracleMember) -> bool| {
        let qualifying: Vec<usize> =
            members.iter().filter(|m| !m.symmetric && pick(m)).map(|m| m.index).collect();
        let (satisfied, counterexamples) =
            qualifying.iter().partition(|&&i| !members[i].semions.is_empty());
        OracleReading { qualifying, satisfied, counterexamples }
    };
    let transparent = reading(&|m| !m.transparent_tannakian.is_empty());
    let literal = reading(&|m| !m.tannakian.is_empty());
    Ok(SemionOracleReport { members, transparent, literal })
}

// ---------------------------------------------------------------------------
// classification conclusions

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub name: String,
    pub holds: bool,
    pub detail: Option<String>,
    pub witness: Option<FactorizationWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub statement: String,
    pub p: u64,
    pub m: u64,
    pub k: u32,
    pub pointed: bool,
    pub branches: Vec<Branch>,
    pub holds: bool,
}

impl TheoremReport {
    pub fn branch(&self, name: &str) -> Option<&Branch> {
        self.branches.iter().find(|b| b.name == name)
    }
}

pub const BRANCH_POINTED: &str = "pointed";
pub const BRANCH_ISING_CYCLIC: &str = "ising x cyclic";
pub const BRANCH_TY: &str = "equivariantized Tambara-Yamagami x cyclic";
pub const BRANCH_METAPLECTIC: &str = "metaplectic x odd cyclic";
pub const BRANCH_SEMION: &str = "semion x dimension 4m";

fn pointed_cyclic(ctx: &Context, mask: u64) -> Result<bool, AnalyzeError> {
    if !ctx.is_pointed_mask(mask) {
        return Ok(false);
    }
    let sub = ctx.ring.restrict(&bits(mask).collect())?;
    Ok(sub.invertibles().is_cyclic())
}

fn ising_cyclic_branch(ctx: &Context) -> Result<Branch, AnalyzeError> {
    for w in find_subdata(ctx, Pattern::Ising)? {
        let a = w.labels.iter().fold(0u64, |m, &x| m | 1 << x);
        let b = ctx.centralizer(a);
        if let Some(f) = ctx.factor_through(a, b) {
            if pointed_cyclic(ctx, b)? {
                return Ok(Branch {
                    name: BRANCH_ISING_CYCLIC.into(),
                    holds: true,
                    detail: Some(format!("{} with cyclic factor of order {}", w.reference, b.count_ones())),
                    witness: Some(f),
                });
            }
        }
    }
    Ok(Branch { name: BRANCH_ISING_CYCLIC.into(), holds: false, detail: None, witness: None })
}

fn ty_branch(ctx: &Context) -> Result<Branch, AnalyzeError> {
    let has_root2 = ctx.dims().iter().any(|d| positive_u64(&(d * d)) == Some(2));
    if !has_root2 {
        for b in bosons(&ctx.md) {
            if !ctx.md.tannakian_rank2(b)? {
                continue;
            }
            let report = condense_boson(&ctx.md, b)?;
            if report.conserved && report.is_ty_shaped() {
                return Ok(Branch {
                    name: BRANCH_TY.into(),
                    holds: true,
                    detail: Some(format!("condensing {}: {}", report.boson_name, report.summary())),
                    witness: None,
                });
            }
        }
    }
    Ok(Branch { name: BRANCH_TY.into(), holds: false, detail: None, witness: None })
}

fn metaplectic_branch(ctx: &Context) -> Result<Branch, AnalyzeError> {
    let mut candidates = ctx.lattice();
    candidates.reverse();
    for a in candidates {
        let size = a.count_ones() as usize;
        if size < 8 || size % 2 == 1 || !ctx.rank().is_multiple_of(size) {
            continue;
        }
        let b = ctx.centralizer(a);
        let Some(f) = ctx.factor_through(a, b) else { continue };
        let k = b.count_ones() as u64;
        if k.is_multiple_of(2) || !pointed_cyclic(ctx, b)? {
            continue;
        }
        if let Some(found) = recognize_metaplectic(&ctx.restrict(a)?)? {
            return Ok(Branch {
                name: BRANCH_METAPLECTIC.into(),
                holds: true,
                detail: Some(format!("l = {}, k = {k}", found.n)),
                witness: Some(f),
            });
        }
    }
    Ok(Branch { name: BRANCH_METAPLECTIC.into(), holds: false, detail: None, witness: None })
}

fn semion_branch(ctx: &Context, m: u64) -> Result<Branch, AnalyzeError> {
    for w in find_subdata(ctx, Pattern::Semion)? {
        let a = w.labels.iter().fold(0u64, |acc, &x| acc | 1 << x);
        let b = ctx.centralizer(a);
        let Some(f) = ctx.factor_through(a, b) else { continue };
        let dim: Cyclo = bits(b).map(|x| ctx.md.dim(x) * ctx.md.dim(x)).sum();
        if dim == Cyclo::from_integer(4 * m as i64) {
            return Ok(Branch {
                name: BRANCH_SEMION.into(),
                holds: true,
                detail: Some(format!("{} times a factor of dimension {}", w.reference, 4 * m)),
                witness: Some(f),
            });
        }
    }
    Ok(Branch { name: BRANCH_SEMION.into(), holds: false, detail: None, witness: None })
}

/// Checks the disjunction of the `p²m` or `p³m` classification on one instance.
pub fn theorem_conclusions(md: &ModularData, p: u64, m: u64) -> Result<TheoremReport, AnalyzeError> {
    let (_, k) = shape_exponent(md, p, m)?;
    if k != 2 && k != 3 {
        return Err(AnalyzeError::DimensionMismatch {
            dim: md.global_dim().to_string(),
            p,
            m,
            extra: " with k = 2 or 3",
        });
    }
    let ctx = Context::new(md)?;
    let pointed = ctx.is_pointed_mask(ctx.full());
    let mut branches = vec![Branch { name: BRANCH_POINTED.into(), holds: pointed, detail: None, witness: None }];
    if k == 2 {
        branches.push(ising_cyclic_branch(&ctx)?);
        branches.push(ty_branch(&ctx)?);
    } else {
        branches.push(metaplectic_branch(&ctx)?);
        branches.push(semion_branch(&ctx, m)?);
    }
    let holds = pointed || (p == 2 && branches.iter().any(|b| b.holds));
    let statement = format!("non-pointed modular of dimension p^{k} m => p = 2 and one of the listed cases");
    Ok(TheoremReport { statement, p, m, k, pointed, branches, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moddata::deligne_product;

    fn z(n: u64, a: i64) -> ModularData {
        zoo::pointed_data(&MetricGroup::cyclic(n, a, n).unwrap()).unwrap()
    }

    #[test]
    fn dim_labels() {
        assert_eq!(dim_label(&Cyclo::from_integer(3)), "3");
        assert_eq!(dim_label(&crate::cyclo::sqrt_int(3)), "√3");
        assert_eq!(dim_label(&crate::cyclo::sqrt_int(12)), "2√3");
        assert_eq!(dim_label(&-crate::cyclo::sqrt_int(2)), "-√2");
    }

    #[test]
    fn condensing_metaplectic_three() {
        let md = zoo::metaplectic_data(3).unwrap();
        let rep = condense_boson(&md, MetaplecticLabels::G2).unwrap();
        assert_eq!(rep.summary(), "6 invertibles, 2 × √3");
        assert_eq!(rep.condensed_dim, Cyclo::from_integer(12));
        assert!(rep.conserved && rep.is_ty_shaped());
        assert!(matches!(condense_boson(&md, MetaplecticLabels::G), Err(AnalyzeError::NotBoson(_))));
    }

    #[test]
    fn condensing_rep_z2_leaves_the_unit() {
        let rep = MetricGroup::new(&[2], vec![0.into(), 0.into()]).unwrap();
        let r = condense_boson(&zoo::pointed_data(&rep).unwrap(), 1).unwrap();
        assert_eq!(r.inventory.len(), 1);
        assert!(r.conserved);
        assert_eq!(r.summary(), "1 invertible");
    }

    #[test]
    fn divisibility_examples() {
        assert!(check_swi_divisibility(&zoo::ising(1).unwrap()).unwrap().holds);
        let meta = check_swi_divisibility(&zoo::metaplectic_data(3).unwrap()).unwrap();
        assert!(meta.strictly_weakly_integral && meta.holds && meta.global_dim == 24);
        let z5 = check_swi_divisibility(&z(5, 1)).unwrap();
        assert!(z5.integral && z5.holds);
        let fib_like = vec![Cyclo::one(), Cyclo::root_of_unity(1, 5) + Cyclo::one()];
        assert_eq!(swi_divisibility_from_dims(&fib_like), Err(AnalyzeError::NotWeaklyIntegral));
    }

    #[test]
    fn pointedness_examples() {
        let z8 = zoo::pointed_data(&MetricGroup::cyclic(8, 1, 16).unwrap()).unwrap();
        let z24 = deligne_product(&z8, &z(3, 1)).unwrap();
        let rep = pointedness_criteria(&z24, 2, 3).unwrap();
        let first = rep.implication(PRIME_POWER_IN_POINTED_PART).unwrap();
        assert!(first.hypothesis && first.conclusion && first.holds);

        let meta = pointedness_criteria(&zoo::metaplectic_data(3).unwrap(), 2, 3).unwrap();
        assert_eq!((meta.pointed_dim, meta.k), (4, 3));
        let first = meta.implication(PRIME_POWER_IN_POINTED_PART).unwrap();
        assert!(!first.hypothesis && first.is_vacuous() && first.holds);

        let is3 = deligne_product(&zoo::ising(1).unwrap(), &z(3, 1)).unwrap();
        let rep = pointedness_criteria(&is3, 2, 3).unwrap();
        assert!(!rep.integral && rep.holds());
        assert!(matches!(pointedness_criteria(&is3, 3, 2), Err(AnalyzeError::DimensionMismatch { .. })));
        assert!(matches!(pointedness_criteria(&is3, 4, 3), Err(AnalyzeError::NotPrime(4))));
    }

    #[test]
    fn subdata_detection() {
        let ii = deligne_product(&zoo::ising(1).unwrap(), &zoo::ising(3).unwrap()).unwrap();
        assert!(detect_subdata(&ii, Pattern::Ising).unwrap().is_some());
        let s7 = deligne_product(&zoo::semion(1), &z(7, 1)).unwrap();
        let w = detect_subdata(&s7, Pattern::Semion).unwrap().unwrap();
        assert_eq!(w.reference, "semion(+1)");
        assert!(detect_subdata(&zoo::metaplectic_data(3).unwrap(), Pattern::Ising).unwrap().is_none());
        let t = detect_subdata(&zoo::metaplectic_data(3).unwrap(), Pattern::TannakianZ2).unwrap().unwrap();
        assert_eq!(t.names, ["1", "g2"]);
    }

    #[test]
    fn primality_examples() {
        assert!(primality(&zoo::metaplectic_data(3).unwrap()).unwrap().prime);
        assert!(primality(&zoo::trivial()).unwrap().prime);
        let s3 = deligne_product(&zoo::semion(1), &z(3, 1)).unwrap();
        let rep = primality(&s3).unwrap();
        assert!(!rep.prime);
        let w = rep.witness.unwrap();
        assert!(w.verify(&s3));
        assert_eq!(w.left.len() * w.right.len(), 6);
    }

    #[test]
    fn metaplectic_recognition() {
        let m5 = recognize_metaplectic(&zoo::metaplectic_data(5).unwrap()).unwrap().unwrap();
        assert_eq!(m5.n, 5);
        assert_eq!(recognize_metaplectic(&zoo::metaplectic_data(1).unwrap()).unwrap().unwrap().n, 1);
        let z4 = zoo::pointed_data(&MetricGroup::cyclic(4, 1, 8).unwrap()).unwrap();
        let is_z4 = deligne_product(&zoo::ising(1).unwrap(), &z4).unwrap();
        assert!(recognize_metaplectic(&is_z4).unwrap().is_none());
    }

    #[test]
    fn particle_hole_examples() {
        for a in [1, 2] {
            let r = particle_hole(&MetricGroup::cyclic(3, a, 3).unwrap()).unwrap();
            assert!(r.confirmed());
        }
        let r5 = particle_hole(&MetricGroup::cyclic(5, 2, 5).unwrap()).unwrap();
        assert!(r5.confirmed());
        assert_eq!(r5.free_orbits.len(), 2);
        let r1 = particle_hole(&MetricGroup::cyclic(1, 0, 1).unwrap()).unwrap();
        assert!(r1.confirmed() && r1.free_orbits.is_empty());
        assert!(particle_hole(&MetricGroup::cyclic(4, 1, 8).unwrap()).is_err());
    }

    #[test]
    fn counting_small_cases() {
        let c1 = count_metaplectic(1).unwrap();
        assert_eq!((c1.classes, c1.count), (2, 4));
        let c9 = count_metaplectic(9).unwrap();
        assert_eq!(c9.count, 8);
        assert!(c9.matches());
        assert!(count_metaplectic(4).is_err());
    }

    #[test]
    fn semion_oracle_on_named_member() {
        let rep = semion_prop_oracle().unwrap();
        assert!(rep.holds());
        // q(g) = 1, q(h) = i, g transparent
        let idx = rep
            .members
            .iter()
            .position(|m| m.twists[1] == Cyclo::i().to_string() && m.twists[2] == "1" && !m.transparent_tannakian.is_empty())
            .unwrap();
        assert!(rep.transparent.satisfied.contains(&idx));
        assert!(rep.members[idx].semions.contains(&1));
    }

    #[test]
    fn theorem_branches() {
        let meta = theorem_conclusions(&zoo::metaplectic_data(3).unwrap(), 2, 3).unwrap();
        let b = meta.branch(BRANCH_METAPLECTIC).unwrap();
        assert!(meta.holds && b.holds);
        assert_eq!(b.detail.as_deref(), Some("l = 3, k = 1"));
        let z8 = zoo::pointed_data(&MetricGroup::cyclic(8, 1, 16).unwrap()).unwrap();
        let z24 = deligne_product(&z8, &z(3, 1)).unwrap();
        let rep = theorem_conclusions(&z24, 2, 3).unwrap();
        assert!(rep.pointed && rep.holds);
        let is3 = deligne_product(&zoo::ising(1).unwrap(), &z(3, 1)).unwrap();
        let rep = theorem_conclusions(&is3, 2, 3).unwrap();
        assert!(rep.branch(BRANCH_ISING_CYCLIC).unwrap().holds);
    }
}

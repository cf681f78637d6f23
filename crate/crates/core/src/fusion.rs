//! Fusion rings: validation, Frobenius–Perron dimensions, subrings, gradings
//! and isomorphism search.
//!
//! Labels are `0..rank` with `0` the unit. The coefficient `N_{ab}^c` is the
//! multiplicity of `c` in `a ⊗ b`; `(N_a)_{bc} = N_{ab}^c` is the fusion matrix.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::cyclo::sqrt_int;
use crate::Cyclo;

pub const MAX_RANK: usize = 64;

pub type LabelSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionError {
    #[error("rank must be between 1 and {MAX_RANK}, got {0}")]
    BadRank(usize),
    #[error("{what} has length {got}, expected {expected}")]
    Shape { what: &'static str, got: usize, expected: usize },
    #[error("label {0} out of range")]
    LabelOutOfRange(usize),
    #[error("ring is not valid: {0}")]
    Invalid(String),
    #[error("label {0} does not have an integer squared dimension")]
    NotWeaklyIntegral(usize),
    #[error("grading is inconsistent: {0}")]
    Grading(String),
    #[error("{0} must be odd")]
    EvenArgument(u64),
    #[error("label set {0:?} is not closed under fusion")]
    NotClosed(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRing {
    rank: usize,
    dual: Vec<usize>,
    coeffs: Vec<u32>,
    names: Vec<String>,
}

impl FusionRing {
    /// Builds a ring from a dense `rank³` coefficient table in `(a, b, c)` order.
    /// Only shapes are checked here; see [`FusionRing::validate`].
    pub fn new(
        rank: usize,
        dual: Vec<usize>,
        coeffs: Vec<u32>,
        names: Option<Vec<String>>,
    ) -> Result<Self, FusionError> {
        if rank == 0 || rank > MAX_RANK {
            return Err(FusionError::BadRank(rank));
        }
        if dual.len() != rank {
            return Err(FusionError::Shape { what: "dual", got: dual.len(), expected: rank });
        }
        if let Some(&bad) = dual.iter().find(|&&d| d >= rank) {
            return Err(FusionError::LabelOutOfRange(bad));
        }
        if coeffs.len() != rank * rank * rank {
            return Err(FusionError::Shape {
                what: "coefficient table",
                got: coeffs.len(),
                expected: rank * rank * rank,
            });
        }
        let names = match names {
            Some(n) if n.len() != rank => {
                return Err(FusionError::Shape { what: "names", got: n.len(), expected: rank })
            }
            Some(n) => n,
            None => (0..rank).map(|a| a.to_string()).collect(),
        };
        Ok(FusionRing { rank, dual, coeffs, names })
    }

    /// Builds a ring from a product rule returning the constituents of `a ⊗ b`.
    pub fn from_rule<F>(rank: usize, dual: Vec<usize>, names: Option<Vec<String>>, rule: F) -> Result<Self, FusionError>
    where
        F: Fn(usize, usize) -> Vec<(usize, u32)>,
    {
        if rank == 0 || rank > MAX_RANK {
            return Err(FusionError::BadRank(rank));
        }
        let mut coeffs = vec![0u32; rank * rank * rank];
        for a in 0..rank {
            for b in 0..rank {
                for (c, m) in rule(a, b) {
                    if c >= rank {
                        return Err(FusionError::LabelOutOfRange(c));
                    }
                    coeffs[(a * rank + b) * rank + c] += m;
                }
            }
        }
        Self::new(rank, dual, coeffs, names)
    }

    /// Group ring of `Z_{n_1} × … × Z_{n_k}`, elements in lexicographic order.
    pub fn abelian_group_ring(orders: &[u64]) -> Result<Self, FusionError> {
        let group = AbelianGroup::new(orders);
        let rank = group.order();
        if rank > MAX_RANK {
            return Err(FusionError::BadRank(rank));
        }
        let dual = (0..rank).map(|a| group.inverse(a)).collect();
        let names = (0..rank).map(|a| group.name(a)).collect();
        Self::from_rule(rank, dual, Some(names), |a, b| vec![(group.add(a, b), 1)])
    }

    /// `1, ψ, σ` with `σ² = 1 ⊕ ψ`.
    pub fn ising() -> Self {
        let names = ["1", "psi", "sigma"].map(String::from).to_vec();
        Self::from_rule(3, vec![0, 1, 2], Some(names), |a, b| match (a, b) {
            (0, x) | (x, 0) => vec![(x, 1)],
            (1, 1) => vec![(0, 1)],
            (1, 2) | (2, 1) => vec![(2, 1)],
            _ => vec![(0, 1), (1, 1)],
        })
        .expect("static ring")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dual(&self, a: usize) -> usize {
        self.dual[a]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn label(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn n(&self, a: usize, b: usize, c: usize) -> u32 {
        self.coeffs[(a * self.rank + b) * self.rank + c]
    }

    /// Overwrites a single coefficient (no validation).
    pub fn set_coeff(&mut self, a: usize, b: usize, c: usize, v: u32) {
        let r = self.rank;
        self.coeffs[(a * r + b) * r + c] = v;
    }

    /// Nonzero constituents of `a ⊗ b` with multiplicities.
    pub fn product(&self, a: usize, b: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let start = (a * self.rank + b) * self.rank;
        self.coeffs[start..start + self.rank]
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(c, &m)| (c, m))
    }

    /// Sparse `(a, b, c, N_{ab}^c)` entries.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, u32)> + '_ {
        let r = self.rank;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(move |(i, &m)| (i / (r * r), (i / r) % r, i % r, m))
    }

    pub fn is_self_dual(&self, a: usize) -> bool {
        self.dual[a] == a
    }

    /// Every identity a fusion ring must satisfy, with indexed failures.
    pub fn validate(&self) -> ValidationReport {
        let r = self.rank;
        let mut failures = Vec::new();
        if self.dual[0] != 0 {
            failures.push(Failure::DualOfUnit);
        }
        for a in 0..r {
            if self.dual[self.dual[a]] != a {
                failures.push(Failure::DualNotInvolution { a });
            }
        }
        for a in 0..r {
            for b in 0..r {
                let delta = u32::from(a == b);
                if self.n(0, a, b) != delta || self.n(a, 0, b) != delta {
                    failures.push(Failure::Unit { a, b });
                }
                if self.n(a, b, 0) != u32::from(b == self.dual[a]) {
                    failures.push(Failure::Duality { a, b });
                }
                for c in 0..r {
                    let v = self.n(a, b, c);
                    let (da, db, dc) = (self.dual[a], self.dual[b], self.dual[c]);
                    if v != self.n(db, da, dc) || v != self.n(da, c, b) {
                        failures.push(Failure::Frobenius { a, b, c });
                    }
                }
            }
        }
        let products: Vec<Vec<(usize, u32)>> =
            (0..r * r).map(|i| self.product(i / r, i % r).collect()).collect();
        let prod = |a: usize, b: usize| &products[a * r + b];
        let mut left = vec![0u64; r];
        let mut right = vec![0u64; r];
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    left.iter_mut().for_each(|x| *x = 0);
                    right.iter_mut().for_each(|x| *x = 0);
                    for &(e, m) in prod(a, b) {
                        for &(d, k) in prod(e, c) {
                            left[d] += u64::from(m) * u64::from(k);
                        }
                    }
                    for &(f, m) in prod(b, c) {
                        for &(d, k) in prod(a, f) {
                            right[d] += u64::from(m) * u64::from(k);
                        }
                    }
                    for d in 0..r {
                        if left[d] != right[d] {
                            failures.push(Failure::Associativity {
                                a,
                                b,
                                c,
                                d,
                                left: left[d],
                                right: right[d],
                            });
                        }
                    }
                }
            }
        }
        ValidationReport { failures }
    }

    fn ensure_valid(&self) -> Result<(), FusionError> {
        let report = self.validate();
        match report.failures.first() {
            None => Ok(()),
            Some(f) => Err(FusionError::Invalid(f.to_string())),
        }
    }

    /// Frobenius–Perron dimensions by power iteration on `Σ_a N_a`, which is
    /// entrywise positive for a valid ring.
    pub fn fp_dims_numeric<F: Float + FromPrimitive>(&self) -> Result<Vec<F>, FusionError> {
        self.ensure_valid()?;
        Ok(self.perron_vector())
    }

    fn perron_vector<F: Float + FromPrimitive>(&self) -> Vec<F> {
        let r = self.rank;
        let mut m = vec![F::zero(); r * r];
        for (_, b, c, k) in self.nonzero() {
            m[b * r + c] = m[b * r + c] + F::from_u32(k).unwrap();
        }
        let tol = F::from_f64(1e-13).unwrap();
        let mut v = vec![F::one(); r];
        for _ in 0..100_000 {
            let mut w: Vec<F> = (0..r)
                .map(|b| (0..r).fold(F::zero(), |acc, c| acc + m[b * r + c] * v[c]))
                .collect();
            let w0 = w[0];
            w.iter_mut().for_each(|x| *x = *x / w0);
            let delta = w.iter().zip(&v).fold(F::zero(), |acc, (a, b)| acc.max((*a - *b).abs()));
            v = w;
            if delta < tol {
                break;
            }
        }
        v
    }

    /// Largest deviation from `d_a d_b = Σ_c N_{ab}^c d_c`.
    pub fn multiplicativity_defect<F: Float + FromPrimitive>(&self, dims: &[F]) -> F {
        let r = self.rank;
        let mut worst = F::zero();
        for a in 0..r {
            for b in 0..r {
                let rhs = self
                    .product(a, b)
                    .fold(F::zero(), |acc, (c, m)| acc + F::from_u32(m).unwrap() * dims[c]);
                worst = worst.max((dims[a] * dims[b] - rhs).abs());
            }
        }
        worst
    }

    /// Exact dimensions for weakly integral rings: each `d_a²` is rounded to an
    /// integer and the square roots are checked against every fusion rule.
    pub fn exact_dims_weakly_integral(&self) -> Result<Vec<Cyclo>, FusionError> {
        let numeric: Vec<f64> = self.fp_dims_numeric()?;
        let dims = numeric
            .iter()
            .enumerate()
            .map(|(a, d)| {
                let sq = d * d;
                let k = sq.round();
                if (sq - k).abs() > 1e-6 || k < 1.0 {
                    Err(FusionError::NotWeaklyIntegral(a))
                } else {
                    Ok(sqrt_int(k as u64))
                }
            })
            .collect::<Result<Vec<Cyclo>, _>>()?;
        for a in 0..self.rank {
            for b in a..self.rank {
                let rhs: Cyclo = self
                    .product(a, b)
                    .map(|(c, m)| dims[c].scale(&crate::rational(i64::from(m), 1)))
                    .sum();
                if &dims[a] * &dims[b] != rhs {
                    return Err(FusionError::Invalid(format!(
                        "dimensions not multiplicative at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(dims)
    }

    /// Exact invertibility: `a ⊗ a*` has a single simple constituent.
    pub fn is_invertible(&self, a: usize) -> bool {
        self.product(a, self.dual[a]).map(|(_, m)| m).sum::<u32>() == 1
    }

    pub fn invertible_labels(&self) -> Vec<usize> {
        (0..self.rank).filter(|&a| self.is_invertible(a)).collect()
    }

    /// The group of invertible objects with its multiplication table.
    pub fn invertibles(&self) -> InvertibleGroup {
        let labels = self.invertible_labels();
        let index: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let table = labels
            .iter()
            .map(|&a| {
                labels
                    .iter()
                    .map(|&b| {
                        let (c, _) = self.product(a, b).next().expect("invertible product");
                        index[&c]
                    })
                    .collect()
            })
            .collect();
        InvertibleGroup { labels, table }
    }

    /// Smallest fusion-closed, dual-closed label set containing `seed` and the unit.
    pub fn subring_closure<I: IntoIterator<Item = usize>>(&self, seed: I) -> LabelSet {
        let mut set: LabelSet = std::iter::once(0).chain(seed).collect();
        loop {
            let mut next = set.clone();
            for &a in &set {
                next.insert(self.dual[a]);
                for &b in &set {
                    next.extend(self.product(a, b).map(|(c, _)| c));
                }
            }
            if next.len() == set.len() {
                return set;
            }
            set = next;
        }
    }

    /// Bitmasks of the constituents of every `a ⊗ b`, indexed `a * rank + b`.
    pub fn product_masks(&self) -> Vec<u64> {
        (0..self.rank * self.rank)
            .map(|i| self.product(i / self.rank, i % self.rank).fold(0u64, |m, (c, _)| m | 1 << c))
            .collect()
    }

    /// Closed label sets generated by one or two labels, together with all
    /// joins of those, sorted by size and then by labels.
    pub fn subring_lattice(&self) -> Vec<LabelSet> {
        let r = self.rank;
        let masks = self.product_masks();
        let close = |seed: u64| -> u64 {
            let mut set = seed | 1;
            let mut todo = set;
            while todo != 0 {
                let a = todo.trailing_zeros() as usize;
                todo &= todo - 1;
                let mut fresh = 1u64 << self.dual[a];
                let mut rest = set;
                while rest != 0 {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    fresh |= masks[a * r + b] | masks[b * r + a];
                }
                let new = fresh & !set;
                set |= new;
                todo |= new;
            }
            set
        };
        let mut found: BTreeSet<u64> = BTreeSet::new();
        for a in 0..r {
            for b in a..r {
                found.insert(close(1 << a | 1 << b));
            }
        }
        loop {
            let list: Vec<u64> = found.iter().copied().collect();
            let mut grew = false;
            for (i, &x) in list.iter().enumerate() {
                for &y in &list[i + 1..] {
                    if x & y != x && x & y != y && found.insert(close(x | y)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut out: Vec<LabelSet> = found
            .into_iter()
            .map(|m| (0..r).filter(|&a| m >> a & 1 == 1).collect())
            .collect();
        out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        out
    }

    /// Subring generated by the constituents of every `X ⊗ X*`.
    pub fn adjoint_subring(&self) -> LabelSet {
        let seed: Vec<usize> =
            (0..self.rank).flat_map(|a| self.product(a, self.dual[a]).map(|(c, _)| c)).collect();
        self.subring_closure(seed)
    }

    pub fn is_closed(&self, labels: &LabelSet) -> bool {
        labels.contains(&0)
            && labels.iter().all(|&a| {
                labels.contains(&self.dual[a])
                    && labels.iter().all(|&b| self.product(a, b).all(|(c, _)| labels.contains(&c)))
            })
    }

    /// Labels of integer dimension; `dims` are exact dimensions.
    pub fn integral_subring(&self, dims: &[Cyclo]) -> Result<LabelSet, FusionError> {
        let set: LabelSet = (0..self.rank).filter(|&a| is_integer(&dims[a])).collect();
        if !self.is_closed(&set) {
            return Err(FusionError::NotClosed(set.into_iter().collect()));
        }
        Ok(set)
    }

    /// Grading by the classes "`Y` is a constituent of `X ⊗ A` for some `A` in the adjoint subring".
    pub fn universal_grading(&self) -> Result<GradedDecomposition, FusionError> {
        let ad: Vec<usize> = self.adjoint_subring().into_iter().collect();
        let mut uf = UnionFind::new(self.rank);
        for x in 0..self.rank {
            for &a in &ad {
                for (y, _) in self.product(x, a) {
                    uf.union(x, y);
                }
            }
        }
        let classes: Vec<usize> = (0..self.rank).map(|x| uf.find(x)).collect();
        GradedDecomposition::from_classes(self, &classes, None)
    }

    /// The grading by `Q(√n)`: `d_a ∈ Z·√n_a` with `n_a` square-free.
    pub fn gn_grading(&self, dims: &[Cyclo]) -> Result<GradedDecomposition, FusionError> {
        let n: Vec<u64> = dims
            .iter()
            .enumerate()
            .map(|(a, d)| {
                let sq = d * d;
                match sq.as_scalar() {
                    Some(v) if v.is_integer() && v.numer() > &0.into() => {
                        Ok(arith::squarefree_part(v.to_integer().to_u64().unwrap()))
                    }
                    _ => Err(FusionError::NotWeaklyIntegral(a)),
                }
            })
            .collect::<Result<_, _>>()?;
        let mut grading = GradedDecomposition::from_classes(self, &n.iter().map(|&v| v as usize).collect::<Vec<_>>(), None)?;
        let mut per_component = vec![0u64; grading.order];
        for (a, &g) in grading.component.iter().enumerate() {
            per_component[g] = n[a];
        }
        grading.n_values = Some(per_component);
        Ok(grading)
    }

    /// Every label bijection preserving unit, duality and all coefficients.
    pub fn ring_isomorphisms(&self, other: &FusionRing) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.search_isomorphisms(other, usize::MAX, &mut out);
        out
    }

    pub fn first_ring_isomorphism(&self, other: &FusionRing) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        self.search_isomorphisms(other, 1, &mut out);
        out.pop()
    }

    fn signature(&self, a: usize, dims: &[f64]) -> (bool, u32, u32, u64, i64) {
        let self_mult = self.n(a, a, a);
        let square: u32 = self.product(a, a).map(|(_, m)| m).sum();
        let total: u64 = (0..self.rank)
            .flat_map(|b| self.product(a, b))
            .map(|(_, m)| u64::from(m) * u64::from(m))
            .sum();
        (self.is_self_dual(a), self_mult, square, total, (dims[a] * 1e6).round() as i64)
    }

    fn search_isomorphisms(&self, other: &FusionRing, limit: usize, out: &mut Vec<Vec<usize>>) {
        let r = self.rank;
        if other.rank != r {
            return;
        }
        let da: Vec<f64> = self.perron_vector();
        let db: Vec<f64> = other.perron_vector();
        let sa: Vec<_> = (0..r).map(|a| self.signature(a, &da)).collect();
        let sb: Vec<_> = (0..r).map(|b| other.signature(b, &db)).collect();
        let mut ms = sa.clone();
        let mut mt = sb.clone();
        ms.sort();
        mt.sort();
        if ms != mt {
            return;
        }
        let candidates: Vec<Vec<usize>> =
            (0..r).map(|a| (0..r).filter(|&b| sa[a] == sb[b]).collect()).collect();
        let mut map = vec![usize::MAX; r];
        let mut used = vec![false; r];
        self.extend(other, &candidates, 0, &mut map, &mut used, limit, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        other: &FusionRing,
        candidates: &[Vec<usize>],
        i: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        limit: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == self.rank {
            out.push(map.clone());
            return;
        }
        for &j in &candidates[i] {
            if used[j] || (i == 0) != (j == 0) {
                continue;
            }
            map[i] = j;
            if self.consistent(other, map, i) {
                used[j] = true;
                self.extend(other, candidates, i + 1, map, used, limit, out);
                used[j] = false;
            }
            map[i] = usize::MAX;
            if out.len() >= limit {
                return;
            }
        }
    }

    fn consistent(&self, other: &FusionRing, map: &[usize], i: usize) -> bool {
        let d = self.dual[i];
        if d <= i && other.dual[map[i]] != map[d] {
            return false;
        }
        for x in 0..=i {
            for y in 0..=i {
                for z in 0..=i {
                    if x != i && y != i && z != i {
                        continue;
                    }
                    if self.n(x, y, z) != other.n(map[x], map[y], map[z]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// True when products of non-invertible simples have only invertible constituents.
    pub fn is_generalized_ty(&self) -> bool {
        let non_inv: Vec<usize> = (0..self.rank).filter(|&a| !self.is_invertible(a)).collect();
        non_inv.iter().all(|&x| {
            non_inv
                .iter()
                .all(|&y| self.product(x, y).all(|(c, _)| self.is_invertible(c)))
        })
    }

    /// The fusion ring restricted to a closed label set, relabelled in increasing order.
    pub fn restrict(&self, labels: &LabelSet) -> Result<FusionRing, FusionError> {
        if !self.is_closed(labels) {
            return Err(FusionError::NotClosed(labels.iter().copied().collect()));
        }
        let list: Vec<usize> = labels.iter().copied().collect();
        let pos: BTreeMap<usize, usize> = list.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let dual = list.iter().map(|&a| pos[&self.dual[a]]).collect();
        let names = list.iter().map(|&a| self.names[a].clone()).collect();
        FusionRing::from_rule(list.len(), dual, Some(names), |i, j| {
            self.product(list[i], list[j]).map(|(c, m)| (pos[&c], m)).collect()
        })
    }

    /// Product ring on pairs `(a, b)` in lexicographic order.
    pub fn tensor(&self, other: &FusionRing) -> Result<FusionRing, FusionError> {
        let (r1, r2) = (self.rank, other.rank);
        let rank = r1 * r2;
        if rank > MAX_RANK {
            return Err(FusionError::BadRank(rank));
        }
        let dual = (0..rank).map(|i| self.dual[i / r2] * r2 + other.dual[i % r2]).collect();
        let names = (0..rank)
            .map(|i| pair_name(&self.names[i / r2], &other.names[i % r2]))
            .collect();
        FusionRing::from_rule(rank, dual, Some(names), |x, y| {
            let mut out = Vec::new();
            for (c1, m1) in self.product(x / r2, y / r2) {
                for (c2, m2) in other.product(x % r2, y % r2) {
                    out.push((c1 * r2 + c2, m1 * m2));
                }
            }
            out
        })
    }

    /// The same ring with labels renamed: new label `perm[a]` is old label `a`.
    pub fn permuted(&self, perm: &[usize]) -> FusionRing {
        let r = self.rank;
        let mut inv = vec![0; r];
        for (a, &p) in perm.iter().enumerate() {
            inv[p] = a;
        }
        let dual = (0..r).map(|x| perm[self.dual[inv[x]]]).collect();
        let names = (0..r).map(|x| self.names[inv[x]].clone()).collect();
        FusionRing::from_rule(r, dual, Some(names), |x, y| {
            self.product(inv[x], inv[y]).map(|(c, m)| (perm[c], m)).collect()
        })
        .expect("permutation of a ring of the same rank")
    }
}

pub(crate) fn pair_name(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

fn is_integer(d: &Cyclo) -> bool {
    d.as_scalar().is_some_and(|v| v.is_integer())
}

/// Character ring of the dihedral group of order `2m`, `m` odd:
/// labels `1, sgn, ρ_1, …, ρ_{(m-1)/2}`.
pub fn dihedral_rep_ring(m: u64) -> Result<FusionRing, FusionError> {
    if m.is_multiple_of(2) {
        return Err(FusionError::EvenArgument(m));
    }
    let k = ((m - 1) / 2) as usize;
    let rank = k + 2;
    if rank > MAX_RANK {
        return Err(FusionError::BadRank(rank));
    }
    let m = m as usize;
    let fold = |i: usize| if i <= k { i } else { m - i };
    let mut names = vec!["1".to_string(), "sgn".to_string()];
    names.extend((1..=k).map(|i| format!("rho{i}")));
    FusionRing::from_rule(rank, (0..rank).collect(), Some(names), |a, b| match (a, b) {
        (0, x) | (x, 0) => vec![(x, 1)],
        (1, 1) => vec![(0, 1)],
        (1, x) | (x, 1) => vec![(x, 1)],
        (x, y) => {
            let (i, j) = (x - 1, y - 1);
            let sum = fold(i + j);
            let mut out = vec![(sum + 1, 1)];
            if i == j {
                out.extend([(0, 1), (1, 1)]);
            } else {
                out.push((i.abs_diff(j) + 1, 1));
            }
            out
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Failure {
    DualOfUnit,
    DualNotInvolution { a: usize },
    Unit { a: usize, b: usize },
    Duality { a: usize, b: usize },
    Frobenius { a: usize, b: usize, c: usize },
    Associativity { a: usize, b: usize, c: usize, d: usize, left: u64, right: u64 },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::DualOfUnit => write!(f, "dual of the unit is not the unit"),
            Failure::DualNotInvolution { a } => write!(f, "duality is not an involution at {a}"),
            Failure::Unit { a, b } => write!(f, "unit law fails at ({a}, {b})"),
            Failure::Duality { a, b } => write!(f, "N_({a},{b})^0 disagrees with duality"),
            Failure::Frobenius { a, b, c } => write!(f, "Frobenius symmetry fails at ({a}, {b}, {c})"),
            Failure::Associativity { a, b, c, d, left, right } => write!(
                f,
                "associativity fails at ({a}, {b}, {c}) -> {d}: {left} vs {right}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn has_associativity_failure(&self) -> bool {
        self.failures.iter().any(|f| matches!(f, Failure::Associativity { .. }))
    }
}

/// The group of invertible labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvertibleGroup {
    /// Ring labels of the invertible objects, increasing.
    pub labels: Vec<usize>,
    /// `table[i][j]` is the index (into `labels`) of `labels[i] ⊗ labels[j]`.
    pub table: Vec<Vec<usize>>,
}

impl InvertibleGroup {
    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn invariant_factors(&self) -> Option<Vec<u64>> {
        invariant_factors(&self.table)
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors().is_some_and(|f| f.len() <= 1)
    }

    /// Order of the element at ring label `a`.
    pub fn element_order(&self, a: usize) -> Option<u64> {
        let i = self.labels.iter().position(|&x| x == a)?;
        Some(element_order(&self.table, i))
    }
}

fn element_order(table: &[Vec<usize>], i: usize) -> u64 {
    let mut x = i;
    let mut k = 1;
    while x != 0 {
        x = table[x][i];
        k += 1;
    }
    k
}

/// Invariant factors `d_1 | d_2 | …` of a finite abelian group given by its
/// Cayley table (identity at index 0); `None` when the table is not commutative.
pub fn invariant_factors(table: &[Vec<usize>]) -> Option<Vec<u64>> {
    let n = table.len();
    if (0..n).any(|i| (0..n).any(|j| table[i][j] != table[j][i])) {
        return None;
    }
    let orders: Vec<u64> = (0..n).map(|i| element_order(table, i)).collect();
    let mut primary: Vec<Vec<u64>> = Vec::new();
    for (p, _) in arith::factorize(n as u64) {
        // c_k = log_p #{x : x^{p^k} = 1}; c_k - c_{k-1} factors have exponent >= k
        let mut c = vec![0u32];
        loop {
            let pk = p.pow(c.len() as u32);
            let count = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            let e = arith::factorize(count).first().map_or(0, |&(_, e)| e);
            if e == *c.last().unwrap() {
                break;
            }
            c.push(e);
        }
        let at_least = |k: usize| if k < c.len() { c[k] - c[k - 1] } else { 0 };
        let mut exps = Vec::new();
        for k in (1..c.len()).rev() {
            for _ in 0..(at_least(k) - at_least(k + 1)) {
                exps.push(p.pow(k as u32));
            }
        }
        primary.push(exps);
    }
    let len = primary.iter().map(Vec::len).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..len)
        .map(|i| primary.iter().map(|v| v.get(i).copied().unwrap_or(1)).product())
        .collect();
    factors.reverse();
    Some(factors)
}

/// A grading of the simple labels by a finite group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedDecomposition {
    pub order: usize,
    /// Invariant factors when the grading group is abelian.
    pub invariants: Option<Vec<u64>>,
    /// Cayley table of the grading group; element 0 is the identity.
    pub table: Vec<Vec<usize>>,
    /// Group element of every label.
    pub component: Vec<usize>,
    /// For the GN grading: the square-free `n` of each component.
    pub n_values: Option<Vec<u64>>,
}

impl GradedDecomposition {
    fn from_classes(ring: &FusionRing, keys: &[usize], n_values: Option<Vec<u64>>) -> Result<Self, FusionError> {
        // Group elements are numbered by first appearance, so the unit's class is 0.
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        let mut component = Vec::with_capacity(ring.rank);
        for &k in keys {
            let next = ids.len();
            component.push(*ids.entry(k).or_insert(next));
        }
        let order = ids.len();
        let mut table = vec![vec![usize::MAX; order]; order];
        for a in 0..ring.rank {
            for b in 0..ring.rank {
                for (c, _) in ring.product(a, b) {
                    let slot = &mut table[component[a]][component[b]];
                    if *slot == usize::MAX {
                        *slot = component[c];
                    } else if *slot != component[c] {
                        return Err(FusionError::Grading(format!(
                            "{} ⊗ {} has constituents in different components",
                            ring.name(a),
                            ring.name(b)
                        )));
                    }
                }
            }
        }
        for row in &table {
            let mut seen = row.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != order || seen.contains(&usize::MAX) {
                return Err(FusionError::Grading("component products do not form a group".into()));
            }
        }
        Ok(GradedDecomposition { order, invariants: invariant_factors(&table), table, component, n_values })
    }

    /// Labels in the component of group element `g`.
    pub fn fiber(&self, g: usize) -> LabelSet {
        self.component.iter().enumerate().filter(|(_, &c)| c == g).map(|(a, _)| a).collect()
    }

    pub fn trivial_component(&self) -> LabelSet {
        self.fiber(0)
    }

    /// Sum of `d_a²` over each component.
    pub fn component_dims(&self, dims: &[Cyclo]) -> Vec<Cyclo> {
        (0..self.order)
            .map(|g| self.fiber(g).into_iter().map(|a| &dims[a] * &dims[a]).sum())
            .collect()
    }

    pub fn is_equidimensional(&self, dims: &[Cyclo]) -> bool {
        let d = self.component_dims(dims);
        d.windows(2).all(|w| w[0] == w[1])
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let p = self.parent[x];
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.parent[x] = root;
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller label as root so the unit's class is keyed by 0
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

/// `Z_{n_1} × … × Z_{n_k}` with elements indexed lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    orders: Vec<u64>,
}

impl AbelianGroup {
    pub fn new(orders: &[u64]) -> Self {
        AbelianGroup { orders: orders.iter().copied().filter(|&n| n > 1).collect() }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn coords(&self, mut x: usize) -> Vec<u64> {
        let mut out = vec![0; self.orders.len()];
        for (i, &n) in self.orders.iter().enumerate().rev() {
            out[i] = x as u64 % n;
            x /= n as usize;
        }
        out
    }

    pub fn index(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + (c % n) as usize)
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.coords(x), self.coords(y));
        let sum: Vec<u64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        self.index(&sum)
    }

    pub fn inverse(&self, x: usize) -> usize {
        let c: Vec<u64> = self.coords(x).iter().zip(&self.orders).map(|(&v, &n)| (n - v) % n).collect();
        self.index(&c)
    }

    pub fn name(&self, x: usize) -> String {
        if self.orders.len() == 1 {
            return self.coords(x)[0].to_string();
        }
        let parts: Vec<String> = self.coords(x).iter().map(u64::to_string).collect();
        format!("({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dims_f64(ring: &FusionRing) -> Vec<f64> {
        ring.fp_dims_numeric().unwrap()
    }

    #[test]
    fn group_ring_is_valid() {
        let z3 = FusionRing::abelian_group_ring(&[3]).unwrap();
        assert!(z3.validate().is_valid());
        assert_eq!(z3.n(1, 2, 0), 1);
        assert_eq!(z3.n(2, 2, 1), 1);
        assert_eq!(dims_f64(&z3), vec![1.0; 3]);
    }

    #[test]
    fn ising_ring() {
        let ising = FusionRing::ising();
        assert!(ising.validate().is_valid());
        let d = dims_f64(&ising);
        assert!((d[2] - 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(ising.invertible_labels(), vec![0, 1]);
        assert_eq!(ising.adjoint_subring(), LabelSet::from([0, 1]));
        let u = ising.universal_grading().unwrap();
        assert_eq!(u.invariants, Some(vec![2]));
        assert_eq!(u.fiber(1), LabelSet::from([2]));
        let exact = ising.exact_dims_weakly_integral().unwrap();
        assert_eq!(ising.integral_subring(&exact).unwrap(), LabelSet::from([0, 1]));
        let gn = ising.gn_grading(&exact).unwrap();
        assert_eq!(gn.n_values, Some(vec![1, 2]));
        assert!(ising.is_generalized_ty());
        assert_eq!(ising.ring_isomorphisms(&ising), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn broken_ising_fails_associativity() {
        let mut ring = FusionRing::ising();
        ring.set_coeff(2, 2, 1, 2);
        let report = ring.validate();
        assert!(report.has_associativity_failure());
        assert!(ring.fp_dims_numeric::<f64>().is_err());
    }

    #[test]
    fn z4_is_not_z2_squared() {
        let z4 = FusionRing::abelian_group_ring(&[4]).unwrap();
        let v4 = FusionRing::abelian_group_ring(&[2, 2]).unwrap();
        assert!(z4.ring_isomorphisms(&v4).is_empty());
        assert_eq!(z4.ring_isomorphisms(&z4).len(), 2);
        assert_eq!(v4.ring_isomorphisms(&v4).len(), 6);
        assert_eq!(z4.invertibles().invariant_factors(), Some(vec![4]));
        assert_eq!(v4.invertibles().invariant_factors(), Some(vec![2, 2]));
    }

    #[test]
    fn invariant_factor_normal_form() {
        let g = FusionRing::abelian_group_ring(&[2, 6, 4]).unwrap();
        assert_eq!(g.invertibles().invariant_factors(), Some(vec![2, 2, 12]));
        let h = FusionRing::abelian_group_ring(&[3, 5]).unwrap();
        assert!(h.invertibles().is_cyclic());
        assert_eq!(h.universal_grading().unwrap().invariants, Some(vec![15]));
    }

    #[test]
    fn pointed_rings() {
        let z5 = FusionRing::abelian_group_ring(&[5]).unwrap();
        assert_eq!(z5.adjoint_subring(), LabelSet::from([0]));
        assert!(z5.is_generalized_ty());
        assert_eq!(z5.subring_closure([]), LabelSet::from([0]));
        assert_eq!(z5.subring_closure([2]).len(), 5);
        let dims = z5.exact_dims_weakly_integral().unwrap();
        assert_eq!(z5.integral_subring(&dims).unwrap().len(), 5);
        assert_eq!(z5.gn_grading(&dims).unwrap().order, 1);
    }

    #[test]
    fn dihedral_rings() {
        assert!(dihedral_rep_ring(4).is_err());
        let d1 = dihedral_rep_ring(1).unwrap();
        assert!(d1.first_ring_isomorphism(&FusionRing::abelian_group_ring(&[2]).unwrap()).is_some());
        let s3 = dihedral_rep_ring(3).unwrap();
        assert!(s3.validate().is_valid());
        assert_eq!(s3.product(2, 2).collect::<Vec<_>>(), vec![(0, 1), (1, 1), (2, 1)]);
        let d = dims_f64(&s3);
        assert!((d[2] - 2.0).abs() < 1e-9);
        for m in [5u64, 7, 9, 15] {
            let ring = dihedral_rep_ring(m).unwrap();
            assert!(ring.validate().is_valid(), "m = {m}");
            assert_eq!(ring.rank(), (m as usize - 1) / 2 + 2);
            let dims = ring.exact_dims_weakly_integral().unwrap();
            let total: Cyclo = dims.iter().map(|d| d * d).sum();
            assert_eq!(total, Cyclo::from_integer(2 * m as i64));
        }
    }

    #[test]
    fn tensor_and_restrict() {
        let ising = FusionRing::ising();
        let z3 = FusionRing::abelian_group_ring(&[3]).unwrap();
        let t = ising.tensor(&z3).unwrap();
        assert!(t.validate().is_valid());
        assert_eq!(t.rank(), 9);
        let back = t.restrict(&LabelSet::from([0, 3, 6])).unwrap();
        assert!(back.first_ring_isomorphism(&ising).is_some());
        assert!(t.restrict(&LabelSet::from([0, 6])).is_err());
        let u = t.universal_grading().unwrap();
        assert_eq!(u.invariants, Some(vec![6]));
    }

    #[test]
    fn lattice_of_small_rings() {
        let v4 = FusionRing::abelian_group_ring(&[2, 2]).unwrap();
        assert_eq!(v4.subring_lattice().len(), 5);
        let z8 = FusionRing::abelian_group_ring(&[8]).unwrap();
        assert_eq!(z8.subring_lattice().len(), 4);
        let v8 = FusionRing::abelian_group_ring(&[2, 2, 2]).unwrap();
        // subgroups of (Z_2)^3: 1 + 7 + 7 + 1
        assert_eq!(v8.subring_lattice().len(), 16);
        let ising = FusionRing::ising();
        assert_eq!(ising.subring_lattice(), vec![LabelSet::from([0]), LabelSet::from([0, 1]), LabelSet::from([0, 1, 2])]);
    }

    fn arb_permuted_ring() -> impl Strategy<Value = (FusionRing, Vec<usize>)> {
        let rings = prop::sample::select(vec![0usize, 1, 2, 3]);
        (rings, any::<u64>()).prop_map(|(which, seed)| {
            let ring = match which {
                0 => FusionRing::ising().tensor(&FusionRing::abelian_group_ring(&[2]).unwrap()).unwrap(),
                1 => dihedral_rep_ring(7).unwrap(),
                2 => FusionRing::abelian_group_ring(&[2, 4]).unwrap(),
                _ => dihedral_rep_ring(5).unwrap().tensor(&FusionRing::abelian_group_ring(&[3]).unwrap()).unwrap(),
            };
            // Fisher–Yates driven by a small LCG; the unit stays fixed.
            let r = ring.rank();
            let mut perm: Vec<usize> = (0..r).collect();
            let mut s = seed;
            for i in (2..r).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = 1 + (s >> 33) as usize % i;
                perm.swap(i, j);
            }
            (ring, perm)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn relabelled_rings_are_isomorphic((ring, perm) in arb_permuted_ring()) {
            let other = ring.permuted(&perm);
            prop_assert!(other.validate().is_valid());
            let isos = ring.ring_isomorphisms(&other);
            prop_assert!(isos.contains(&perm));
            for phi in &isos {
                for (a, b, c, m) in ring.nonzero() {
                    prop_assert_eq!(other.n(phi[a], phi[b], phi[c]), m);
                }
                for a in 0..ring.rank() {
                    prop_assert_eq!(phi[ring.dual(a)], other.dual(phi[a]));
                }
            }
        }

        #[test]
        fn grading_is_equidimensional((ring, _perm) in arb_permuted_ring()) {
            let dims = ring.exact_dims_weakly_integral().unwrap();
            let u = ring.universal_grading().unwrap();
            prop_assert!(u.is_equidimensional(&dims));
            prop_assert_eq!(u.trivial_component(), ring.adjoint_subring());
            let gn = ring.gn_grading(&dims).unwrap();
            prop_assert_eq!(gn.trivial_component(), ring.integral_subring(&dims).unwrap());
            prop_assert!(ring.multiplicativity_defect(&dims_f64(&ring)) < 1e-9);
        }
    }
}

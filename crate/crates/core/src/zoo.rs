//! Concrete families: pointed data from quadratic forms, Ising, semion, the
//! premodular `Z_2 × Z_2` family and the even metaplectic `SO(2N)_2` data.

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::{gauss_value, sqrt_int, CycloError};
use crate::fusion::{AbelianGroup, FusionRing};
use crate::moddata::{ModDataError, ModularData};
use crate::{arith, Cyclo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZooError {
    #[error("{0} must be odd")]
    MustBeOdd(&'static str),
    #[error("n = {0} is divisible by 4; only n ≢ 0 (mod 4) is supported")]
    DivisibleByFour(u64),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("form table has {got} values, group has {expected} elements")]
    Shape { got: usize, expected: usize },
    #[error("not a quadratic form: {0}")]
    NotQuadratic(String),
    #[error("a = {a} is not a unit modulo {n}")]
    NotUnit { a: i64, n: u64 },
    #[error(transparent)]
    ModData(#[from] ModDataError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error("fusion rule fails: {0}")]
    Rule(String),
}

/// `x mod 1` for a rational.
fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

/// A finite abelian group with a quadratic form `q(x) = e^{2πi·φ(x)}`; the
/// exponents `φ(x)` are stored as fractions in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricGroup {
    group: AbelianGroup,
    factors: Vec<u64>,
    q: Vec<Rational64>,
}

impl MetricGroup {
    /// Validates `q(0) = 0`, `q(-x) = q(x)` and that the associated `b` is a bicharacter.
    pub fn new(factors: &[u64], q: Vec<Rational64>) -> Result<Self, ZooError> {
        let group = AbelianGroup::new(factors);
        if q.len() != group.order() {
            return Err(ZooError::Shape { got: q.len(), expected: group.order() });
        }
        let mg = MetricGroup { factors: group.orders().to_vec(), group, q: q.into_iter().map(frac).collect() };
        if !mg.q[0].is_zero() {
            return Err(ZooError::NotQuadratic("q(0) != 1".into()));
        }
        let n = mg.order();
        for x in 0..n {
            if mg.q[mg.group.inverse(x)] != mg.q[x] {
                return Err(ZooError::NotQuadratic(format!("q(-x) != q(x) at x = {}", mg.group.name(x))));
            }
        }
        // additivity in the first slot at the generators propagates to all of the group
        let generators = (0..mg.factors.len()).filter(|&i| mg.factors[i] > 1).map(|i| {
            let mut e = vec![0; mg.factors.len()];
            e[i] = 1;
            mg.group.index(&e)
        });
        for x in generators {
            for y in 0..n {
                for z in 0..n {
                    let lhs = mg.b(mg.group.add(x, y), z);
                    if lhs != frac(mg.b(x, z) + mg.b(y, z)) {
                        return Err(ZooError::NotQuadratic(format!(
                            "b is not a bicharacter at ({}, {}, {})",
                            mg.group.name(x),
                            mg.group.name(y),
                            mg.group.name(z)
                        )));
                    }
                }
            }
        }
        Ok(mg)
    }

    /// `q(j) = e^{2πi·a j²/den}` on `Z_n`; `den` is `n` or `2n`.
    pub fn cyclic(n: u64, a: i64, den: u64) -> Result<Self, ZooError> {
        let q = (0..n as i64).map(|j| Rational64::new(a * j * j, den as i64)).collect();
        Self::new(&[n], q)
    }

    /// Orthogonal sum; elements are pairs in lexicographic order.
    pub fn orthogonal_sum(&self, other: &MetricGroup) -> Result<Self, ZooError> {
        let mut factors = self.factors.clone();
        factors.extend(&other.factors);
        let q = (0..self.order())
            .flat_map(|x| (0..other.order()).map(move |y| (x, y)))
            .map(|(x, y)| self.q[x] + other.q[y])
            .collect();
        Self::new(&factors, q)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.q.len()
    }

    /// Exponent of `q(x)`, in `[0, 1)`.
    pub fn q(&self, x: usize) -> Rational64 {
        self.q[x]
    }

    pub fn q_values(&self) -> &[Rational64] {
        &self.q
    }

    /// Exponent of `b(x, y) = q(x+y) / (q(x) q(y))`.
    pub fn b(&self, x: usize, y: usize) -> Rational64 {
        frac(self.q[self.group.add(x, y)] - self.q[x] - self.q[y])
    }

    pub fn is_nondegenerate(&self) -> bool {
        (1..self.order()).all(|x| (0..self.order()).any(|y| !self.b(x, y).is_zero()))
    }
}

impl fmt::Display for MetricGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
        let q: Vec<String> = self.q.iter().map(|v| v.to_string()).collect();
        write!(f, "{} q=[{}]", if g.is_empty() { "Z1".into() } else { g.join("x") }, q.join(","))
    }
}

fn root(x: Rational64) -> Cyclo {
    Cyclo::root_of_unity(*x.numer(), *x.denom() as u64)
}

/// Pointed data: `θ_x = q(x)`, `S_{xy} = b(x, y)^{-1}`, group-ring fusion.
/// Degenerate forms give premodular data flagged as not modular.
pub fn pointed_data(mg: &MetricGroup) -> Result<ModularData, ZooError> {
    let n = mg.order();
    let s = (0..n).map(|x| (0..n).map(|y| root(-mg.b(x, y))).collect()).collect();
    let t = (0..n).map(|x| root(mg.q(x))).collect();
    let dual = (0..n).map(|x| mg.group.inverse(x)).collect();
    let names = (0..n).map(|x| mg.group.name(x)).collect();
    let ring = FusionRing::abelian_group_ring(&mg.factors).map_err(ModDataError::from)?;
    Ok(ModularData::new(names, s, t, dual, mg.is_nondegenerate())?.with_fusion(ring)?)
}

/// Every nondegenerate form on `Z_n`, `n ≢ 0 (mod 4)`.
///
/// Odd `n`: `q_a(j) = e^{2πi a j²/n}` for units `a`. `n ≡ 2 (mod 4)`: the group is
/// `Z_2 × Z_{n/2}` with a semion form on `Z_2` (`q(1) = i` first, then `-i`).
pub fn cyclic_forms(n: u64) -> Result<Vec<MetricGroup>, ZooError> {
    if n == 0 {
        return Err(ZooError::NotPositive("n"));
    }
    if n.is_multiple_of(4) {
        return Err(ZooError::DivisibleByFour(n));
    }
    if n.is_multiple_of(2) {
        let odd = cyclic_forms(n / 2)?;
        let mut out = Vec::new();
        for s in [1, 3] {
            let semion = MetricGroup::new(&[2], vec![Rational64::zero(), Rational64::new(s, 4)])?;
            for f in &odd {
                out.push(semion.orthogonal_sum(f)?);
            }
        }
        return Ok(out);
    }
    (0..n as i64)
        .filter(|a| a.gcd(&(n as i64)) == 1)
        .map(|a| MetricGroup::cyclic(n, a, n))
        .collect()
}

/// The cyclic form with parameter `a` on `Z_n` (odd `n`), or `Z_2 × Z_{n/2}` with
/// semion sign `semion` for `n ≡ 2 (mod 4)`.
pub fn cyclic_form(n: u64, a: i64, semion: i8) -> Result<MetricGroup, ZooError> {
    if n == 0 {
        return Err(ZooError::NotPositive("n"));
    }
    if n.is_multiple_of(4) {
        return Err(ZooError::DivisibleByFour(n));
    }
    let odd = if n.is_multiple_of(2) { n / 2 } else { n };
    if a.gcd(&(odd as i64)) != 1 {
        return Err(ZooError::NotUnit { a, n: odd });
    }
    let base = MetricGroup::cyclic(odd, a, odd)?;
    if n % 2 == 1 {
        return Ok(base);
    }
    let s = if semion >= 0 { 1 } else { 3 };
    MetricGroup::new(&[2], vec![Rational64::zero(), Rational64::new(s, 4)])?.orthogonal_sum(&base)
}

/// Semion data, `θ = (1, ±i)`.
pub fn semion(sign: i8) -> ModularData {
    let s = if sign >= 0 { 1 } else { 3 };
    let mg = MetricGroup::new(&[2], vec![Rational64::zero(), Rational64::new(s, 4)]).expect("semion form");
    pointed_data(&mg).expect("semion data")
}

/// Ising data with `θ_σ = e^{2πiν/16}`, `ν` odd.
pub fn ising(nu: i64) -> Result<ModularData, ZooError> {
    if nu % 2 == 0 {
        return Err(ZooError::MustBeOdd("nu"));
    }
    let r2 = sqrt_int(2);
    let s = vec![
        vec![Cyclo::one(), Cyclo::one(), r2.clone()],
        vec![Cyclo::one(), Cyclo::one(), -r2.clone()],
        vec![r2.clone(), -r2, Cyclo::zero()],
    ];
    let t = vec![Cyclo::one(), Cyclo::from_integer(-1), Cyclo::root_of_unity(nu, 16)];
    let names = ["1", "psi", "sigma"].map(String::from).to_vec();
    Ok(ModularData::new(names, s, t, vec![0, 1, 2], true)?)
}

/// Label positions of the metaplectic data for a given odd `N`:
/// `1, g², g, g³`, then `Y_1, X_1, Y_2, X_2, …`, then `V_1, …, V_4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MetaplecticLabels {
    pub n: u64,
}

impl MetaplecticLabels {
    pub const UNIT: usize = 0;
    pub const G2: usize = 1;
    pub const G: usize = 2;
    pub const G3: usize = 3;

    pub fn rank(&self) -> usize {
        self.n as usize + 7
    }

    pub fn half(&self) -> usize {
        (self.n as usize - 1) / 2
    }

    /// The two-dimensional object in column `a = 1..N-1`.
    pub fn two_dim(&self, a: usize) -> usize {
        3 + a
    }

    /// `Y_k = ` column `2k - 1`.
    pub fn y(&self, k: usize) -> usize {
        self.two_dim(2 * k - 1)
    }

    /// `X_k = ` column `2k`.
    pub fn x(&self, k: usize) -> usize {
        self.two_dim(2 * k)
    }

    /// `V_i` for `i = 1..4`.
    pub fn v(&self, i: usize) -> usize {
        self.n as usize + 2 + i
    }

    pub fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = ["1", "g2", "g", "g3"].map(String::from).to_vec();
        for k in 1..=self.half() {
            out.push(format!("Y{k}"));
            out.push(format!("X{k}"));
        }
        out.extend((1..=4).map(|i| format!("V{i}")));
        out
    }
}

/// `θ_ε = e^{πi(2N-1)/8}`.
pub fn theta_epsilon(n: u64) -> Cyclo {
    Cyclo::root_of_unity(2 * n as i64 - 1, 16)
}

/// The even metaplectic modular data for odd `N`.
pub fn metaplectic_data(n: u64) -> Result<ModularData, ZooError> {
    if n.is_multiple_of(2) {
        return Err(ZooError::MustBeOdd("N"));
    }
    let labels = MetaplecticLabels { n };
    let r = labels.rank();
    let nn = n as i64;
    let one = Cyclo::one;
    let int = Cyclo::from_integer;

    let te = theta_epsilon(n);
    let te2 = &te * &te;
    let g = gauss_value(n)?;
    let alpha = &g.conj() * &te2;
    let beta = &(&Cyclo::root_of_unity(2 * nn - 1, 4) * &te2) * &g;
    let i_n = Cyclo::root_of_unity(nn, 4);
    let rt = sqrt_int(n);

    let mut s = vec![vec![Cyclo::zero(); r]; r];
    let a_block = [[1, 1, 1, 1], [1, 1, 1, 1], [1, 1, -1, -1], [1, 1, -1, -1]];
    for (i, row) in a_block.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            s[i][j] = int(v);
        }
    }
    for a in 1..n as usize {
        let col = labels.two_dim(a);
        let sign = if a % 2 == 0 { 2 } else { -2 };
        for (i, v) in [2, 2, sign, sign].into_iter().enumerate() {
            s[i][col] = int(v);
            s[col][i] = int(v);
        }
        for b in 1..n as usize {
            // 4 cos(πab/N)
            let k = (a * b) as i64;
            s[col][labels.two_dim(b)] =
                (Cyclo::root_of_unity(k, 2 * n) + Cyclo::root_of_unity(-k, 2 * n)).scale(&crate::rational(2, 1));
        }
    }
    let c_block = [
        [one(), one(), one(), one()],
        [-one(), -one(), -one(), -one()],
        [-i_n.clone(), i_n.clone(), -i_n.clone(), i_n.clone()],
        [i_n.clone(), -i_n.clone(), i_n.clone(), -i_n.clone()],
    ];
    for (i, row) in c_block.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let entry = v * &rt;
            s[i][labels.v(j + 1)] = entry.clone();
            s[labels.v(j + 1)][i] = entry;
        }
    }
    let (ac, bc) = (alpha.conj(), beta.conj());
    let e_block = [
        [&ac, &alpha, &beta, &bc],
        [&alpha, &ac, &bc, &beta],
        [&beta, &bc, &ac, &alpha],
        [&bc, &beta, &alpha, &ac],
    ];
    for (i, row) in e_block.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            s[labels.v(i + 1)][labels.v(j + 1)] = (*v).clone();
        }
    }

    let mut t = vec![one(), one(), i_n.clone(), i_n];
    for a in 1..nn {
        let sign = if a % 2 == 0 { 1 } else { -1 };
        t.push(Cyclo::root_of_unity(-a * a, 4 * n).scale(&crate::rational(sign, 1)));
    }
    t.extend([te.clone(), te.clone(), -te.clone(), -te]);

    let mut dual: Vec<usize> = (0..r).collect();
    dual.swap(MetaplecticLabels::G, MetaplecticLabels::G3);
    dual.swap(labels.v(1), labels.v(2));
    dual.swap(labels.v(3), labels.v(4));
    Ok(ModularData::new(labels.names(), s, t, dual, true)?)
}

/// One fusion rule of the metaplectic family and whether it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleCheck {
    pub rule: String,
    pub holds: bool,
}

fn product_is(ring: &FusionRing, a: usize, b: usize, expected: &[usize]) -> bool {
    let mut want = vec![0u32; ring.rank()];
    for &c in expected {
        want[c] += 1;
    }
    (0..ring.rank()).all(|c| ring.n(a, b, c) == want[c])
}

/// Checks the self-consistent fusion rules of the metaplectic family.
pub fn metaplectic_rules(n: u64, ring: &FusionRing) -> Vec<RuleCheck> {
    let l = MetaplecticLabels { n };
    let h = l.half();
    let nu = n as usize;
    let (g, g2, g3) = (MetaplecticLabels::G, MetaplecticLabels::G2, MetaplecticLabels::G3);
    let mut out = Vec::new();
    let mut push = |rule: String, holds: bool| out.push(RuleCheck { rule, holds });
    for a in 1..=h {
        push(format!("g X{a} = Y{}", nu.div_ceil(2) - a), product_is(ring, g, l.x(a), &[l.y(nu.div_ceil(2) - a)]));
        push(format!("g2 X{a} = X{a}"), product_is(ring, g2, l.x(a), &[l.x(a)]));
        let m = (2 * a).min(nu - 2 * a);
        push(format!("X{a} X{a} = 1 + g2 + X{m}"), product_is(ring, l.x(a), l.x(a), &[0, g2, l.x(m)]));
        for b in (1..=h).filter(|&b| b != a) {
            let s = (a + b).min(nu - a - b);
            let d = a.abs_diff(b);
            push(format!("X{a} X{b} = X{s} + X{d}"), product_is(ring, l.x(a), l.x(b), &[l.x(s), l.x(d)]));
        }
    }
    let mut vv = vec![g];
    vv.extend((1..=h).map(|a| l.y(a)));
    push("V1 V1 = g + sum Y".into(), product_is(ring, l.v(1), l.v(1), &vv));
    push("g V2 = V1".into(), product_is(ring, g, l.v(2), &[l.v(1)]));
    push("V1* = V2".into(), ring.dual(l.v(1)) == l.v(2));
    push("V3* = V4".into(), ring.dual(l.v(3)) == l.v(4));
    push("g3 V1 = V1*".into(), product_is(ring, g3, l.v(1), &[ring.dual(l.v(1))]));
    push("g3 V3 = V3*".into(), product_is(ring, g3, l.v(3), &[ring.dual(l.v(3))]));
    push("g V1 = V4".into(), product_is(ring, g, l.v(1), &[l.v(4)]));
    push("g V4 = V3".into(), product_is(ring, g, l.v(4), &[l.v(3)]));
    push("g V3 = V2".into(), product_is(ring, g, l.v(3), &[l.v(2)]));
    out
}

/// The rules about `V_1..V_4` exactly as printed in the literature, which are
/// jointly unsatisfiable; `v[i]` is the label used for `V_{i+1}`.
pub fn literal_v_rules(ring: &FusionRing, g: usize, g3: usize, v: [usize; 4]) -> Vec<RuleCheck> {
    let mut out = Vec::new();
    let mut push = |rule: &str, holds: bool| out.push(RuleCheck { rule: rule.into(), holds });
    push("g V1 = V3", product_is(ring, g, v[0], &[v[2]]));
    push("g V3 = V4", product_is(ring, g, v[2], &[v[3]]));
    push("g V2 = V1", product_is(ring, g, v[1], &[v[0]]));
    push("g V4 = V2", product_is(ring, g, v[3], &[v[1]]));
    for (i, &x) in v.iter().enumerate() {
        let name = format!("g3 V{} = V{}*", i + 1, i + 1);
        push(&name, product_is(ring, g3, x, &[ring.dual(x)]));
    }
    push("V2 = V1*", ring.dual(v[0]) == v[1]);
    push("V4 = V3*", ring.dual(v[2]) == v[3]);
    out
}

/// Verlinde ring of [`metaplectic_data`], checked against [`metaplectic_rules`].
pub fn metaplectic_ring(n: u64) -> Result<FusionRing, ZooError> {
    let ring = metaplectic_data(n)?.verlinde_ring()?;
    if let Some(bad) = metaplectic_rules(n, &ring).into_iter().find(|r| !r.holds) {
        return Err(ZooError::Rule(bad.rule));
    }
    Ok(ring)
}

/// All premodular data on the `Z_2 × Z_2` group ring with twists in the fourth
/// roots of unity. Elements are ordered `0, h, g, gh` as `(0,0), (0,1), (1,0), (1,1)`.
pub fn z2z2_premodular_family() -> Vec<ModularData> {
    let quarter = |k: i64| Rational64::new(k, 4);
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let q = vec![Rational64::zero(), quarter(b), quarter(a), quarter(c)];
                if let Ok(mg) = MetricGroup::new(&[2, 2], q) {
                    out.push(pointed_data(&mg).expect("pointed data"));
                }
            }
        }
    }
    out
}

/// Trivial rank-one data.
pub fn trivial() -> ModularData {
    ModularData::new(vec!["1".into()], vec![vec![Cyclo::one()]], vec![Cyclo::one()], vec![0], true)
        .expect("rank one")
}

/// A named modular datum of the standard collection.
#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: String,
    pub data: ModularData,
}

/// Modular members used for property checks: cyclic, semion, Ising and small metaplectic.
pub fn standard_zoo() -> Vec<ZooEntry> {
    let mut out = vec![ZooEntry { name: "trivial".into(), data: trivial() }];
    for sign in [1i8, -1] {
        out.push(ZooEntry { name: format!("semion{sign:+}"), data: semion(sign) });
    }
    for (n, a) in [(3u64, 1i64), (5, 2), (7, 3), (6, 1), (9, 1)] {
        let mg = cyclic_form(n, a, 1).expect("cyclic form");
        out.push(ZooEntry { name: format!("cyclic{n}a{a}"), data: pointed_data(&mg).expect("pointed") });
    }
    let z8 = MetricGroup::cyclic(8, 1, 16).expect("Z8 form");
    out.push(ZooEntry { name: "cyclic8".into(), data: pointed_data(&z8).expect("pointed") });
    let z4 = MetricGroup::cyclic(4, 1, 8).expect("Z4 form");
    out.push(ZooEntry { name: "cyclic4".into(), data: pointed_data(&z4).expect("pointed") });
    for nu in [1, 3, 5, 7] {
        out.push(ZooEntry { name: format!("ising{nu}"), data: ising(nu).expect("odd") });
    }
    for n in [1, 3, 5] {
        out.push(ZooEntry { name: format!("metaplectic{n}"), data: metaplectic_data(n).expect("odd") });
    }
    out
}

/// Number of classes of `cyclic_forms(n)` under relabelling by automorphisms of `Z_n`.
pub fn cyclic_form_classes(n: u64) -> Result<Vec<Vec<usize>>, ZooError> {
    let forms = cyclic_forms(n)?;
    // position in `Z_n` of each element of the form's group, by CRT
    let index_of = |mg: &MetricGroup, j: u64| -> usize {
        let coords: Vec<u64> = mg.factors().iter().map(|&f| j % f).collect();
        mg.group().index(&coords)
    };
    let table = |mg: &MetricGroup, u: u64| -> Vec<Rational64> {
        (0..n).map(|j| mg.q(index_of(mg, (u * j) % n))).collect()
    };
    let units: Vec<u64> = (1..=n).filter(|u| u.gcd(&n) == 1).collect();
    let base: Vec<Vec<Rational64>> = forms.iter().map(|f| table(f, 1)).collect();
    let mut class_of = vec![usize::MAX; forms.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..forms.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = Vec::new();
        for &u in &units {
            let moved = table(&forms[i], u);
            for (j, b) in base.iter().enumerate() {
                if *b == moved && class_of[j] == usize::MAX {
                    class_of[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    Ok(classes)
}

/// Prime-power factors `p^k` of `n`.
pub fn prime_power_factors(n: u64) -> Vec<u64> {
    arith::factorize(n).into_iter().map(|(p, k)| p.pow(k)).collect()
}

//! Framed links, charges, Conway tables and the normalized Conway functions built from them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::abgroup::{FgAbelianGroup, IntMatrix};
use crate::error::{Error, Result};
use crate::exactnum::{int, Rational};
use crate::groupring::{var_names, QHFraction, RatPoly, QH};

/// Linking matrix with framings on the diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramedLink {
    names: Vec<String>,
    lambda: IntMatrix,
}

impl FramedLink {
    pub fn new(names: Vec<String>, lambda: IntMatrix) -> Result<Self> {
        let m = lambda.len();
        if m == 0 {
            return Err(Error::InvalidInput("a link needs at least one component".into()));
        }
        if names.len() != m || lambda.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInput("linking matrix must be square with one name per row".into()));
        }
        for i in 0..m {
            for j in 0..i {
                if lambda[i][j] != lambda[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(FramedLink { names, lambda })
    }

    pub fn from_matrix(lambda: IntMatrix) -> Result<Self> {
        let names = (1..=lambda.len()).map(|i| format!("L{i}")).collect();
        Self::new(names, lambda)
    }

    pub fn m(&self) -> usize {
        self.lambda.len()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn linking_matrix(&self) -> &IntMatrix {
        &self.lambda
    }
    pub fn lk(&self, i: usize, j: usize) -> i64 {
        self.lambda[i][j]
    }
    pub fn framing(&self, i: usize) -> i64 {
        self.lambda[i][i]
    }
    pub fn framings(&self) -> Vec<i64> {
        (0..self.m()).map(|i| self.framing(i)).collect()
    }

    /// Sum of lk(L_i, L_j) over j in `others`, j != i.
    pub fn lk_with(&self, i: usize, others: &[usize]) -> i64 {
        others.iter().filter(|&&j| j != i).map(|&j| self.lk(i, j)).sum()
    }

    pub fn sublink(&self, idx: &[usize]) -> FramedLink {
        FramedLink {
            names: idx.iter().map(|&i| self.names[i].clone()).collect(),
            lambda: idx.iter().map(|&i| idx.iter().map(|&j| self.lambda[i][j]).collect()).collect(),
        }
    }

    pub fn with_framings(&self, f: &[i64]) -> FramedLink {
        let mut l = self.clone();
        for (i, &x) in f.iter().enumerate() {
            l.lambda[i][i] = x;
        }
        l
    }

    /// Append a split, unlinked unknot with framing `f`.
    pub fn with_split_unknot(&self, f: i64) -> FramedLink {
        let m = self.m();
        let mut lambda: IntMatrix = self.lambda.iter().map(|r| {
            let mut r = r.clone();
            r.push(0);
            r
        }).collect();
        let mut last = vec![0; m + 1];
        last[m] = f;
        lambda.push(last);
        let mut names = self.names.clone();
        names.push(format!("U{}", m + 1));
        FramedLink { names, lambda }
    }

    pub fn is_algebraically_split(&self) -> bool {
        (0..self.m()).all(|i| (0..self.m()).all(|j| i == j || self.lk(i, j) == 0))
    }

    /// The charge with entries in {0, 1} of the right parity.
    pub fn parity_charge(&self) -> Vec<i64> {
        let all: Vec<usize> = (0..self.m()).collect();
        (0..self.m()).map(|i| (1 + self.lk_with(i, &all)).rem_euclid(2)).collect()
    }
}

/// An integer vector with k_i = 1 + sum_{j != i} lk(L_i, L_j) mod 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Charge(pub Vec<i64>);

impl Charge {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

pub fn validate_charge(l: &FramedLink, k: &[i64]) -> Result<Charge> {
    if k.len() != l.m() {
        return Err(Error::InvalidInput(format!("charge has {} entries, link has {}", k.len(), l.m())));
    }
    let p = l.parity_charge();
    for i in 0..l.m() {
        if (k[i] - p[i]).rem_euclid(2) != 0 {
            return Err(Error::BadParity { index: i + 1 });
        }
    }
    Ok(Charge(k.to_vec()))
}

/// k^I_i = k_i - sum_{j not in I} lk(L_i, L_j), for i in I (sorted).
pub fn restrict_charge(l: &FramedLink, k: &[i64], sub: &[usize]) -> Vec<i64> {
    let rest: Vec<usize> = (0..l.m()).filter(|j| !sub.contains(j)).collect();
    sub.iter().map(|&i| k[i] - l.lk_with(i, &rest)).collect()
}

pub fn complement(m: usize, sub: &[usize]) -> Vec<usize> {
    (0..m).filter(|j| !sub.contains(j)).collect()
}

/// All subsets of `set`, each sorted, in order of the binary counter.
pub fn subsets(set: &[usize]) -> Vec<Vec<usize>> {
    (0..1u64 << set.len())
        .map(|mask| set.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &x)| x).collect())
        .collect()
}

pub fn det_rational(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut a = a.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= piv.clone();
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for j in c..n {
                let v = &a[c][j] * &f;
                a[r][j] -= v;
            }
        }
    }
    det
}

pub fn det_int(a: &IntMatrix) -> i64 {
    let q: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let d = det_rational(&q);
    i64::try_from(d.to_integer()).expect("determinant overflows i64")
}

/// The matrix l^I: lk off the diagonal, f_i + lk(L_i, L^{complement of I}) on it; det(l^{empty}) = 1.
pub fn linking_submatrix(l: &FramedLink, sub: &[usize]) -> (IntMatrix, i64) {
    let rest = complement(l.m(), sub);
    let mat: IntMatrix = sub
        .iter()
        .map(|&i| {
            sub.iter()
                .map(|&j| if i == j { l.framing(i) + l.lk_with(i, &rest) } else { l.lk(i, j) })
                .collect()
        })
        .collect();
    let d = det_int(&mat);
    (mat, d)
}

// ---------------------------------------------------------------------------
// Conway tables

#[derive(Clone, Debug, PartialEq)]
pub enum ConwayEntry {
    /// Normalized Alexander polynomial of a component, one variable.
    Knot(RatPoly),
    /// Conway function of a sublink with at least two components, one variable per component.
    Link(RatPoly),
}

impl ConwayEntry {
    pub fn poly(&self) -> &RatPoly {
        match self {
            ConwayEntry::Knot(p) | ConwayEntry::Link(p) => p,
        }
    }
}

/// Entries indexed by sorted nonempty subsets of the component indices (0-based).
/// The variable of component i is named t{i+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct ConwayTable {
    m: usize,
    entries: BTreeMap<Vec<usize>, ConwayEntry>,
}

pub fn subset_key(sub: &[usize]) -> String {
    sub.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn sub_vars(sub: &[usize]) -> Vec<String> {
    sub.iter().map(|i| format!("t{}", i + 1)).collect()
}

impl ConwayTable {
    pub fn new(m: usize) -> Self {
        ConwayTable { m, entries: BTreeMap::new() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, ConwayEntry> {
        &self.entries
    }

    /// Insert from integer terms on the original lattice; variables follow `sub`.
    pub fn insert_terms(&mut self, sub: &[usize], terms: &[(Vec<i64>, i64)]) {
        let p = RatPoly::from_int_terms(sub_vars(sub), terms);
        let e = if sub.len() == 1 { ConwayEntry::Knot(p) } else { ConwayEntry::Link(p) };
        self.entries.insert(sub.to_vec(), e);
    }

    pub fn insert(&mut self, sub: &[usize], p: RatPoly) {
        assert_eq!(p.nvars(), sub.len());
        let p = p.rename(sub_vars(sub));
        let e = if sub.len() == 1 { ConwayEntry::Knot(p) } else { ConwayEntry::Link(p) };
        self.entries.insert(sub.to_vec(), e);
    }

    pub fn get(&self, sub: &[usize]) -> Result<&ConwayEntry> {
        self.entries.get(sub).ok_or_else(|| Error::IncompleteTable(subset_key(sub)))
    }

    pub fn missing(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.m).collect();
        subsets(&all)
            .into_iter()
            .filter(|s| !s.is_empty() && !self.entries.contains_key(s))
            .collect()
    }

    /// The table of the sublink on `sub`, re-indexed by position in `sub`.
    pub fn restrict(&self, sub: &[usize]) -> ConwayTable {
        let mut t = ConwayTable::new(sub.len());
        for (key, e) in &self.entries {
            if !key.iter().all(|i| sub.contains(i)) {
                continue;
            }
            let pos: Vec<usize> = key.iter().map(|i| sub.iter().position(|j| j == i).unwrap()).collect();
            let p = e.poly().rename(sub_vars(&pos));
            let e = match e {
                ConwayEntry::Knot(_) => ConwayEntry::Knot(p),
                ConwayEntry::Link(_) => ConwayEntry::Link(p),
            };
            t.entries.insert(pos, e);
        }
        t
    }

    /// Append a split unknot: Delta = 1, every sublink containing it has Conway function 0.
    pub fn with_split_unknot(&self) -> ConwayTable {
        let m = self.m;
        let mut t = ConwayTable { m: m + 1, entries: self.entries.clone() };
        t.insert_terms(&[m], &[(vec![0], 1)]);
        let all: Vec<usize> = (0..m).collect();
        for s in subsets(&all) {
            if s.is_empty() {
                continue;
            }
            let mut key = s.clone();
            key.push(m);
            t.entries.insert(key.clone(), ConwayEntry::Link(RatPoly::zero(sub_vars(&key))));
        }
        t
    }

    pub fn to_json(&self) -> BTreeMap<String, EntryJson> {
        self.entries
            .iter()
            .map(|(k, e)| {
                let terms = e.poly().terms().iter().map(|(x, c)| {
                    let exps: Vec<i64> = x.iter().map(|v| v / 2).collect();
                    let c = i64::try_from(c.to_integer()).expect("coefficient overflows i64");
                    (exps, c)
                });
                let j = match e {
                    ConwayEntry::Knot(_) => EntryJson::Knot { delta: terms.map(|(x, c)| (x[0], c)).collect() },
                    ConwayEntry::Link(_) => EntryJson::Poly { terms: terms.collect() },
                };
                (subset_key(k), j)
            })
            .collect()
    }

    pub fn from_json(m: usize, map: &BTreeMap<String, EntryJson>) -> Result<Self> {
        let mut t = ConwayTable::new(m);
        for (key, e) in map {
            let mut sub = Vec::new();
            for part in key.split(',') {
                let i: usize = part.trim().parse().map_err(|_| {
                    Error::InvalidInput(format!("bad Conway table key {key:?}"))
                })?;
                if i == 0 || i > m {
                    return Err(Error::InvalidInput(format!("Conway table key {key:?} out of range")));
                }
                sub.push(i - 1);
            }
            sub.sort_unstable();
            sub.dedup();
            match e {
                EntryJson::Knot { delta } => {
                    if sub.len() != 1 {
                        return Err(Error::InvalidInput(format!("knot entry under key {key:?}")));
                    }
                    let terms: Vec<(Vec<i64>, i64)> = delta.iter().map(|&(x, c)| (vec![x], c)).collect();
                    t.insert_terms(&sub, &terms);
                }
                EntryJson::Poly { terms } => {
                    if sub.len() < 2 {
                        return Err(Error::InvalidInput(format!("poly entry under key {key:?} needs >= 2 components")));
                    }
                    if terms.iter().any(|(x, _)| x.len() != sub.len()) {
                        return Err(Error::InvalidInput(format!("wrong exponent length under key {key:?}")));
                    }
                    t.insert_terms(&sub, terms);
                }
            }
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum EntryJson {
    #[serde(rename = "knot")]
    Knot { delta: Vec<(i64, i64)> },
    #[serde(rename = "poly")]
    Poly { terms: Vec<(Vec<i64>, i64)> },
}

// ---------------------------------------------------------------------------
// Normalized Conway functions

/// num / (t_v - 1) when `den_var` is set (the knot case), else the Laurent polynomial num.
#[derive(Clone, Debug, PartialEq)]
pub struct Nabla {
    pub num: RatPoly,
    pub den_var: Option<usize>,
}

/// nabla(L, k) = -t^{k/2} nabla_L(t^{1/2}); for a knot -t^{(k+1)/2} Delta(t) / (t - 1).
pub fn nabla_normalized(l: &FramedLink, k: &[i64], table: &ConwayTable) -> Result<Nabla> {
    let m = l.m();
    let all: Vec<usize> = (0..m).collect();
    let vars = var_names("t", m);
    let entry = table.get(&all)?.poly().rename(vars.clone());
    if m == 1 {
        if (k[0] + 1) % 2 != 0 {
            return Err(Error::ParityMismatch);
        }
        let num = entry.shift_doubled(&[k[0] + 1]).neg();
        return Ok(Nabla { num, den_var: Some(0) });
    }
    let mut half = RatPoly::zero(vars);
    for (e, c) in entry.terms() {
        if e.iter().any(|x| x % 2 != 0) {
            return Err(Error::HalfIntegerExponent);
        }
        half.add_term(e.iter().map(|x| x / 2).collect(), c.clone());
    }
    let num = half.shift_doubled(k).neg();
    if !num.is_integral() {
        return Err(Error::ParityMismatch);
    }
    Ok(Nabla { num, den_var: None })
}

/// nabla(L, k) / prod (t_i - 1) for m >= 2 (a Laurent polynomial for algebraically split links).
pub fn nabla_check(l: &FramedLink, k: &[i64], table: &ConwayTable) -> Result<RatPoly> {
    let n = nabla_normalized(l, k, table)?;
    if n.den_var.is_some() {
        return Err(Error::InvalidInput("nabla_check needs at least two components".into()));
    }
    let mut p = n.num;
    for i in 0..l.m() {
        p = p.div_var_minus_one(i)?;
    }
    Ok(p)
}

/// H(L, L^R): free on t_1..t_m modulo prod_{j != i} (t_j t_i^{-1})^{lk(L_i, L_j)} for i in R.
pub fn relative_group(l: &FramedLink, r: &[usize]) -> Arc<FgAbelianGroup> {
    let m = l.m();
    let rows: IntMatrix = r
        .iter()
        .map(|&i| {
            let mut row = vec![0i64; m];
            for j in 0..m {
                if j != i {
                    row[j] += l.lk(i, j);
                    row[i] -= l.lk(i, j);
                }
            }
            row
        })
        .collect();
    FgAbelianGroup::from_relations(&rows, m)
}

/// nabla(L, L^R, k) = prod_{i in R} (t_i - 1)^{-1} nabla(L, k) over H(L, L^R).
/// Denominator-free when rank >= 2; otherwise one symbolic factor remains.
pub fn nabla_relative(
    l: &FramedLink,
    r: &[usize],
    k: &[i64],
    table: &ConwayTable,
) -> Result<(Arc<FgAbelianGroup>, QHFraction)> {
    let m = l.m();
    if r.len() >= m {
        return Err(Error::InvalidInput("nabla_relative needs a proper subset".into()));
    }
    let h = relative_group(l, r);
    let gens: Vec<_> = (0..m).map(|i| h.gen(i)).collect();
    let nab = nabla_normalized(l, k, table)?;
    let a = QH::push(&nab.num, &h, &gens)?;
    if let Some(v) = nab.den_var {
        return Ok((h.clone(), QHFraction::new(a, vec![gens[v].clone()])?));
    }
    let divide = |mut x: QH| -> Result<QH> {
        for &i in r {
            x = x.exact_divide(&gens[i])?;
        }
        Ok(x)
    };
    match divide(a.clone()) {
        Ok(q) => Ok((h.clone(), QHFraction::from_element(q))),
        Err(Error::NotDivisible) if h.free_rank() == 1 => {
            let n = (0..m).find(|i| !r.contains(i)).unwrap();
            let q = divide(a.mul(&QH::minus_one(&h, &gens[n])))?;
            Ok((h.clone(), QHFraction::new(q, vec![gens[n].clone()])?))
        }
        Err(e) => Err(e),
    }
}

/// Coefficients z_l of nabla_L / prod (t_i^2 - 1) for an algebraically split link.
pub fn split_coefficients(l: &FramedLink, table: &ConwayTable) -> Result<BTreeMap<Vec<i64>, i64>> {
    if l.m() < 2 || !l.is_algebraically_split() {
        return Err(Error::NotSplit);
    }
    let all: Vec<usize> = (0..l.m()).collect();
    let mut p = table.get(&all)?.poly().clone();
    for i in 0..l.m() {
        let mut a = vec![0; l.m()];
        a[i] = 4;
        p = p.div_binomial(&Rational::one(), &a)?;
    }
    let mut z = BTreeMap::new();
    for (e, c) in p.terms() {
        if e.iter().any(|x| x % 2 != 0) || !c.is_integer() {
            return Err(Error::NotDivisible);
        }
        z.insert(e.iter().map(|x| x / 2).collect(), i64::try_from(c.to_integer()).unwrap());
    }
    Ok(z)
}

/// Outcome of one consistency check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: String, r: Result<bool>) -> Self {
        match r {
            Ok(ok) => CheckResult { name, ok, detail: if ok { String::new() } else { "identity fails".into() } },
            Err(e) => CheckResult { name, ok: false, detail: e.to_string() },
        }
    }
}

/// Torres: nabla(L, k) at t_i = 1 equals (prod_{j != i} t_j^{lk(L_i, L_j)} - 1) nabla(L^{i bar}, k^{i bar}).
pub fn torres_check(l: &FramedLink, k: &[i64], table: &ConwayTable, i: usize) -> CheckResult {
    let name = format!("torres[{}; drop {}]", l.m(), i + 1);
    CheckResult::new(name, torres_holds(l, k, table, i))
}

fn torres_holds(l: &FramedLink, k: &[i64], table: &ConwayTable, i: usize) -> Result<bool> {
    let m = l.m();
    if m < 2 {
        return Err(Error::InvalidInput("Torres check needs two components".into()));
    }
    let rest = complement(m, &[i]);
    let full = nabla_normalized(l, k, table)?;
    let lhs = full.num.specialize_one(i).rename(var_names("t", m - 1));
    let sub = l.sublink(&rest);
    let ksub = restrict_charge(l, k, &rest);
    let tsub = table.restrict(&rest);
    let nsub = nabla_normalized(&sub, &ksub, &tsub)?;
    let vars = var_names("t", m - 1);
    let exps: Vec<i64> = rest.iter().map(|&j| l.lk(i, j)).collect();
    let factor = RatPoly::monomial(vars.clone(), &exps, int(1))
        .sub(&RatPoly::constant(vars.clone(), int(1)));
    match nsub.den_var {
        None => Ok(lhs == factor.mul(&nsub.num)),
        Some(v) => {
            let tm1 = RatPoly::var(vars.clone(), v).sub(&RatPoly::constant(vars, int(1)));
            Ok(lhs.mul(&tm1) == factor.mul(&nsub.num))
        }
    }
}

/// Aggregated report of symmetry, knot normalization and Torres checks over all sublinks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableReport {
    pub checks: Vec<CheckResult>,
}

impl TableReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
}

pub fn conway_table_validate(l: &FramedLink, table: &ConwayTable) -> TableReport {
    let mut checks = Vec::new();
    let missing = table.missing();
    checks.push(CheckResult {
        name: "complete".into(),
        ok: missing.is_empty() && table.m() == l.m(),
        detail: missing.iter().map(|s| subset_key(s)).collect::<Vec<_>>().join(" "),
    });
    if table.m() != l.m() {
        return TableReport { checks };
    }
    for (key, e) in table.entries() {
        let p = e.poly();
        let sign = if key.len() % 2 == 0 { int(1) } else { int(-1) };
        match e {
            ConwayEntry::Knot(d) => {
                checks.push(CheckResult::new(format!("symmetric[{}]", subset_key(key)), Ok(d.bar() == *d)));
                let at_one: Rational = d.terms().values().cloned().sum();
                checks.push(CheckResult::new(format!("delta(1)=1[{}]", subset_key(key)), Ok(at_one == int(1))));
            }
            ConwayEntry::Link(_) => {
                checks.push(CheckResult::new(
                    format!("symmetric[{}]", subset_key(key)),
                    Ok(p.bar() == p.scale(&sign)),
                ));
            }
        }
    }
    for key in table.entries().keys() {
        if key.len() < 2 || table.restrict(key).missing().len() > 0 {
            continue;
        }
        let sub = l.sublink(key);
        let t = table.restrict(key);
        let k0 = sub.parity_charge();
        for i in 0..key.len() {
            let mut c = torres_check(&sub, &k0, &t, i);
            c.name = format!("torres[{}; drop {}]", subset_key(key), key[i] + 1);
            checks.push(c);
        }
    }
    TableReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hopf(f1: i64, f2: i64) -> (FramedLink, ConwayTable) {
        let l = FramedLink::from_matrix(vec![vec![f1, 1], vec![1, f2]]).unwrap();
        let mut t = ConwayTable::new(2);
        t.insert_terms(&[0], &[(vec![0], 1)]);
        t.insert_terms(&[1], &[(vec![0], 1)]);
        t.insert_terms(&[0, 1], &[(vec![0, 0], 1)]);
        (l, t)
    }

    fn borromean() -> (FramedLink, ConwayTable) {
        let l = FramedLink::from_matrix(vec![vec![0; 3]; 3]).unwrap();
        let mut t = ConwayTable::new(3);
        for i in 0..3 {
            t.insert_terms(&[i], &[(vec![0], 1)]);
        }
        for s in [[0, 1], [0, 2], [1, 2]] {
            t.insert_terms(&s, &[]);
        }
        // prod (t_i - t_i^{-1})
        let mut terms = Vec::new();
        for a in [1i64, -1] {
            for b in [1i64, -1] {
                for c in [1i64, -1] {
                    terms.push((vec![a, b, c], a * b * c));
                }
            }
        }
        t.insert_terms(&[0, 1, 2], &terms);
        (l, t)
    }

    #[test]
    fn charges() {
        let (l, _) = hopf(0, 0);
        assert!(validate_charge(&l, &[0, 0]).is_ok());
        assert_eq!(validate_charge(&l, &[1, 0]), Err(Error::BadParity { index: 1 }));
        assert_eq!(restrict_charge(&l, &[0, 0], &[0]), vec![-1]);
        assert_eq!(restrict_charge(&l, &[0, 2], &[0, 1]), vec![0, 2]);
        let (b, _) = borromean();
        assert!(validate_charge(&b, &[1, 1, 1]).is_ok());
        assert_eq!(validate_charge(&b, &[0, 1, 1]), Err(Error::BadParity { index: 1 }));
    }

    #[test]
    fn linking_submatrices() {
        let (l, _) = hopf(3, -2);
        assert_eq!(linking_submatrix(&l, &[]).1, 1);
        assert_eq!(linking_submatrix(&l, &[0]).1, 4);
        assert_eq!(linking_submatrix(&l, &[0, 1]).1, -7);
        let l = FramedLink::from_matrix(vec![vec![-1, 1], vec![1, -1]]).unwrap();
        assert_eq!(linking_submatrix(&l, &[0]).1, 0);
        assert_eq!(linking_submatrix(&l, &[0, 1]).1, 0);
    }

    #[test]
    fn knot_and_relative() {
        let l = FramedLink::from_matrix(vec![vec![0]]).unwrap();
        let mut t = ConwayTable::new(1);
        t.insert_terms(&[0], &[(vec![0], 1)]);
        let n = nabla_normalized(&l, &[1], &t).unwrap();
        assert_eq!(n.den_var, Some(0));
        assert_eq!(format!("{}", n.num), "-t1");

        let (l, t) = hopf(0, 0);
        let (h, x) = nabla_relative(&l, &[0], &[0, 0], &t).unwrap();
        assert_eq!(h.free_rank(), 1);
        let back = x.mul_element(&QH::minus_one(&h, &h.gen(0)));
        let nab = nabla_normalized(&l, &[0, 0], &t).unwrap();
        let pushed = QH::push(&nab.num, &h, &[h.gen(0), h.gen(1)]).unwrap();
        assert!(back.equals(&QHFraction::from_element(pushed)));
    }

    #[test]
    fn borromean_data() {
        let (l, t) = borromean();
        let z = split_coefficients(&l, &t).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[&vec![-1, -1, -1]], 1);
        assert!(conway_table_validate(&l, &t).ok());
        let (h, x) = nabla_relative(&l, &[0], &[1, 1, 1], &t).unwrap();
        assert_eq!(h.free_rank(), 3);
        assert!(x.den.is_empty());
        let n = nabla_normalized(&l, &[1, 1, 1], &t).unwrap();
        assert_eq!(n.num.bar(), nabla_normalized(&l, &[-1, -1, -1], &t).unwrap().num.neg());
    }

    #[test]
    fn hopf_table_checks() {
        let (l, t) = hopf(0, 0);
        assert!(conway_table_validate(&l, &t).ok());
        let mut bad = t.clone();
        bad.insert_terms(&[0, 1], &[(vec![0, 0], 2)]);
        assert!(!conway_table_validate(&l, &bad).ok());
        let mut inc = ConwayTable::new(2);
        inc.insert_terms(&[0], &[(vec![0], 1)]);
        assert!(!conway_table_validate(&l, &inc).ok());
        let json = t.to_json();
        assert_eq!(ConwayTable::from_json(2, &json).unwrap(), t);
    }
}

//! Laurent polynomials, group algebras Q[H], fractions with (h-1) denominators,
//! character transforms, reduced inverses, transfers and directed expansions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::abgroup::{FgAbelianGroup, GroupElement, GroupHom, Quotient, TorsionCharacter};
use crate::error::{ensure, Error, Result};
use crate::exactnum::{int, Cyclotomic, Rational, Scalar};

// ---------------------------------------------------------------------------
// Laurent polynomials on the doubled lattice

/// Sparse Laurent polynomial. Exponents are stored doubled, so t^{1/2} is the stored exponent 1.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<C: Scalar> {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i64>, C>,
}

pub type RatPoly = LaurentPoly<Rational>;
pub type CycPoly = LaurentPoly<Cyclotomic>;

pub fn var_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl<C: Scalar> LaurentPoly<C> {
    pub fn zero(vars: Vec<String>) -> Self {
        LaurentPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vec<String>, c: C) -> Self {
        let n = vars.len();
        let mut p = Self::zero(vars);
        p.add_term(vec![0; n], c);
        p
    }

    /// Monomial with exponents on the doubled lattice.
    pub fn monomial_doubled(vars: Vec<String>, exps: Vec<i64>, c: C) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(exps, c);
        p
    }

    pub fn monomial(vars: Vec<String>, exps: &[i64], c: C) -> Self {
        Self::monomial_doubled(vars, exps.iter().map(|e| 2 * e).collect(), c)
    }

    /// From (original-lattice exponents, integer coefficient) pairs.
    pub fn from_int_terms(vars: Vec<String>, terms: &[(Vec<i64>, i64)]) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.nvars());
            p.add_term(e.iter().map(|x| 2 * x).collect(), C::from_rational(int(*c)));
        }
        p
    }

    pub fn var(vars: Vec<String>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 2;
        Self::monomial_doubled(vars, e, C::one())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
    pub fn terms(&self) -> &BTreeMap<Vec<i64>, C> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, exps: Vec<i64>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(x) => {
                let s = x.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    /// Coefficient at a doubled exponent vector.
    pub fn coeff_doubled(&self, exps: &[i64]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Integral in the original variables iff every doubled exponent is even.
    pub fn is_integral(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|x| x % 2 == 0))
    }

    fn check_vars(&self, o: &Self) {
        assert_eq!(self.vars, o.vars, "Laurent polynomials over different variables");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_vars(o);
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::zero(self.vars.clone());
        for (e, x) in &self.terms {
            r.add_term(e.clone(), x.clone() * c.clone());
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_vars(o);
        let mut r = Self::zero(self.vars.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1.clone() * c2.clone());
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::constant(self.vars.clone(), C::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Multiply by the monomial with doubled exponents `shift`.
    pub fn shift_doubled(&self, shift: &[i64]) -> Self {
        let mut r = Self::zero(self.vars.clone());
        for (e, c) in &self.terms {
            r.add_term(e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone());
        }
        r
    }

    /// t_i -> t_i^{-1}, coefficients conjugated.
    pub fn bar(&self) -> Self {
        let mut r = Self::zero(self.vars.clone());
        for (e, c) in &self.terms {
            r.add_term(e.iter().map(|x| -x).collect(), c.conj());
        }
        r
    }

    /// Substitute t_i -> c_i * x^{a_i} (a_i doubled, in the target variables).
    pub fn substitute(&self, target_vars: Vec<String>, images: &[(C, Vec<i64>)]) -> Result<Self> {
        assert_eq!(images.len(), self.nvars());
        let mut r = Self::zero(target_vars.clone());
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = vec![0i64; target_vars.len()];
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                let (ci, ai) = &images[i];
                if !ci.is_one() {
                    if ei % 2 != 0 {
                        return Err(Error::HalfIntegerExponent);
                    }
                    coeff = coeff * scalar_pow(ci, ei / 2)?;
                }
                for (x, a) in exps.iter_mut().zip(ai) {
                    let p = ei * a;
                    if p % 2 != 0 {
                        return Err(Error::HalfIntegerExponent);
                    }
                    *x += p / 2;
                }
            }
            r.add_term(exps, coeff);
        }
        Ok(r)
    }

    /// Set t_i = 1 and drop the variable.
    pub fn specialize_one(&self, i: usize) -> Self {
        let mut vars = self.vars.clone();
        vars.remove(i);
        let mut r = Self::zero(vars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e.remove(i);
            r.add_term(e, c.clone());
        }
        r
    }

    /// Keep the given variables (in order); all others must not occur.
    pub fn restrict_vars(&self, keep: &[usize]) -> Self {
        let vars = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let mut r = Self::zero(vars);
        for (e, c) in &self.terms {
            for (i, x) in e.iter().enumerate() {
                assert!(keep.contains(&i) || *x == 0, "dropping a variable that occurs");
            }
            r.add_term(keep.iter().map(|&i| e[i]).collect(), c.clone());
        }
        r
    }

    pub fn rename(&self, vars: Vec<String>) -> Self {
        assert_eq!(vars.len(), self.nvars());
        LaurentPoly { vars, terms: self.terms.clone() }
    }

    /// Height of a doubled exponent along direction a.
    fn height(e: &[i64], a: &[i64]) -> i64 {
        e.iter().zip(a).map(|(x, y)| x * y).sum()
    }

    /// Exact quotient by (c * x^a - 1), a doubled and nonzero.
    pub fn div_binomial(&self, c: &C, a: &[i64]) -> Result<Self> {
        if a.iter().all(|&x| x == 0) {
            let d = c.clone() - C::one();
            return Ok(self.scale(&d.inv()?));
        }
        let ha = Self::height(a, a);
        let min_h = match self.terms.keys().map(|e| Self::height(e, a)).min() {
            Some(h) => h,
            None => return Ok(self.clone()),
        };
        let cinv = c.inv()?;
        let mut rem = self.clone();
        let mut q = Self::zero(self.vars.clone());
        while !rem.is_zero() {
            let (top_e, top_h) = rem
                .terms
                .keys()
                .map(|e| (e, Self::height(e, a)))
                .max_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(y.0)))
                .map(|(e, h)| (e.clone(), h))
                .unwrap();
            if top_h - ha < min_h {
                return Err(Error::NotDivisible);
            }
            let r = rem.terms[&top_e].clone();
            let qe: Vec<i64> = top_e.iter().zip(a).map(|(x, y)| x - y).collect();
            let qc = r.clone() * cinv.clone();
            // rem -= (c x^a - 1) * qc x^qe
            rem.add_term(top_e, -r);
            rem.add_term(qe.clone(), qc.clone());
            q.add_term(qe, qc);
        }
        Ok(q)
    }

    /// Divide by (t_i - 1) exactly.
    pub fn div_var_minus_one(&self, i: usize) -> Result<Self> {
        let mut a = vec![0; self.nvars()];
        a[i] = 2;
        self.div_binomial(&C::one(), &a)
    }

    /// Per-variable (min, max) of doubled exponents.
    pub fn exponent_box(&self) -> Option<Vec<(i64, i64)>> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut b: Vec<(i64, i64)> = first.iter().map(|&x| (x, x)).collect();
        for e in it {
            for (bi, &x) in b.iter_mut().zip(e) {
                bi.0 = bi.0.min(x);
                bi.1 = bi.1.max(x);
            }
        }
        Some(b)
    }
}

fn scalar_pow<C: Scalar>(c: &C, e: i64) -> Result<C> {
    let base = if e < 0 { c.inv()? } else { c.clone() };
    let mut r = C::one();
    for _ in 0..e.unsigned_abs() {
        r = r * base.clone();
    }
    Ok(r)
}

impl<C: Scalar> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mut mon = Vec::new();
            for (v, &x) in self.vars.iter().zip(e) {
                match x {
                    0 => {}
                    2 => mon.push(v.clone()),
                    _ if x % 2 == 0 => mon.push(format!("{}^{}", v, x / 2)),
                    _ => mon.push(format!("{}^({}/2)", v, x)),
                }
            }
            parts.push(term_string(&c.to_string(), &mon.join("*")));
        }
        write!(f, "{}", join_terms(&parts))
    }
}


fn term_string(coeff: &str, mon: &str) -> String {
    if mon.is_empty() {
        return coeff.to_string();
    }
    match coeff {
        "1" => mon.to_string(),
        "-1" => format!("-{mon}"),
        _ => format!("{coeff}*{mon}"),
    }
}

fn join_terms(parts: &[String]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Group algebras

fn same_group(a: &Arc<FgAbelianGroup>, b: &Arc<FgAbelianGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Finite formal sum over a finitely generated abelian group.
#[derive(Clone, Debug)]
pub struct GroupAlgebraElement<C: Scalar> {
    group: Arc<FgAbelianGroup>,
    terms: BTreeMap<GroupElement, C>,
}

/// Elements of Q[H].
pub type QH = GroupAlgebraElement<Rational>;

impl<C: Scalar> PartialEq for GroupAlgebraElement<C> {
    fn eq(&self, o: &Self) -> bool {
        same_group(&self.group, &o.group) && self.terms == o.terms
    }
}

impl<C: Scalar> GroupAlgebraElement<C> {
    pub fn zero(group: &Arc<FgAbelianGroup>) -> Self {
        GroupAlgebraElement { group: group.clone(), terms: BTreeMap::new() }
    }

    pub fn one(group: &Arc<FgAbelianGroup>) -> Self {
        Self::monomial(group, group.identity(), C::one())
    }

    pub fn monomial(group: &Arc<FgAbelianGroup>, h: GroupElement, c: C) -> Self {
        let mut a = Self::zero(group);
        a.add_term(h, c);
        a
    }

    pub fn constant(group: &Arc<FgAbelianGroup>, c: C) -> Self {
        Self::monomial(group, group.identity(), c)
    }

    /// h - 1
    pub fn minus_one(group: &Arc<FgAbelianGroup>, h: &GroupElement) -> Self {
        let mut a = Self::monomial(group, h.clone(), C::one());
        a.add_term(group.identity(), -C::one());
        a
    }

    pub fn group(&self) -> &Arc<FgAbelianGroup> {
        &self.group
    }
    pub fn terms(&self) -> &BTreeMap<GroupElement, C> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, h: &GroupElement) -> C {
        self.terms.get(h).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, h: GroupElement, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&h) {
            Some(x) => {
                let s = x.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&h);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(h, c);
            }
        }
    }

    fn check_group(&self, o: &Self) {
        assert!(same_group(&self.group, &o.group), "group algebra elements over different groups");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_group(o);
        let mut r = self.clone();
        for (h, c) in &o.terms {
            r.add_term(h.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::zero(&self.group);
        if c.is_zero() {
            return r;
        }
        for (h, x) in &self.terms {
            r.add_term(h.clone(), x.clone() * c.clone());
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_group(o);
        let mut r = Self::zero(&self.group);
        for (h1, c1) in &self.terms {
            for (h2, c2) in &o.terms {
                r.add_term(self.group.add(h1, h2), c1.clone() * c2.clone());
            }
        }
        r
    }

    /// Multiply by a group element.
    pub fn shift(&self, g: &GroupElement) -> Self {
        let mut r = Self::zero(&self.group);
        for (h, c) in &self.terms {
            r.add_term(self.group.add(h, g), c.clone());
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(&self.group);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// h -> h^{-1}, coefficients conjugated.
    pub fn bar(&self) -> Self {
        let mut r = Self::zero(&self.group);
        for (h, c) in &self.terms {
            r.add_term(self.group.neg(h), c.conj());
        }
        r
    }

    pub fn is_torsion_supported(&self) -> bool {
        self.terms.keys().all(|h| h.is_torsion())
    }

    /// Image under a group homomorphism.
    pub fn map_hom(&self, f: &GroupHom) -> Self {
        assert!(same_group(&self.group, &f.src));
        let mut r = Self::zero(&f.dst);
        for (h, c) in &self.terms {
            r.add_term(f.apply(h), c.clone());
        }
        r
    }

    /// The ring map t_i -> assignment[i] applied to an integral Laurent polynomial.
    pub fn push(
        p: &LaurentPoly<C>,
        group: &Arc<FgAbelianGroup>,
        assignment: &[GroupElement],
    ) -> Result<Self> {
        assert_eq!(assignment.len(), p.nvars());
        let mut r = Self::zero(group);
        for (e, c) in p.terms() {
            let mut h = group.identity();
            for (&x, g) in e.iter().zip(assignment) {
                if x % 2 != 0 {
                    return Err(Error::HalfIntegerExponent);
                }
                if x != 0 {
                    h = group.add(&h, &group.scale(g, x / 2));
                }
            }
            r.add_term(h, c.clone());
        }
        Ok(r)
    }

    /// Height of g along the free part of h.
    fn height(h: &GroupElement, g: &GroupElement) -> i64 {
        h.free.iter().zip(&g.free).map(|(a, b)| a * b).sum()
    }

    /// q with q * (h - 1) = self, for h of infinite order.
    pub fn exact_divide(&self, h: &GroupElement) -> Result<Self> {
        ensure!(!h.is_torsion(), "exact_divide by (h-1) with h of finite order");
        let hh = Self::height(h, h);
        let min_h = match self.terms.keys().map(|g| Self::height(h, g)).min() {
            Some(x) => x,
            None => return Ok(self.clone()),
        };
        let mut rem = self.clone();
        let mut q = Self::zero(&self.group);
        while !rem.is_zero() {
            let (top, top_h) = rem
                .terms
                .keys()
                .map(|g| (g, Self::height(h, g)))
                .max_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(y.0)))
                .map(|(g, x)| (g.clone(), x))
                .unwrap();
            if top_h - hh < min_h {
                return Err(Error::NotDivisible);
            }
            let r = rem.terms[&top].clone();
            let g = self.group.sub(&top, h);
            rem.add_term(top, -r.clone());
            rem.add_term(g.clone(), r.clone());
            q.add_term(g, r);
        }
        Ok(q)
    }

    /// Laurent polynomial in the free coordinates with the torsion part evaluated by chi.
    pub fn character_component(&self, chi: &TorsionCharacter) -> CycPoly {
        let vars = var_names("t", self.group.free_rank());
        let mut p = CycPoly::zero(vars);
        for (h, c) in &self.terms {
            let z = Cyclotomic::zeta(chi.n, chi.pairing(h));
            let c = c.to_cyclotomic();
            p.add_term(h.free.iter().map(|x| 2 * x).collect(), c * z);
        }
        p
    }

    /// Components at every torsion character, in the order of `torsion_characters`.
    pub fn character_decompose(&self) -> Vec<(TorsionCharacter, CycPoly)> {
        self.group
            .torsion_characters()
            .into_iter()
            .map(|chi| {
                let p = self.character_component(&chi);
                (chi, p)
            })
            .collect()
    }
}

impl QH {
    /// Every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Least common denominator of the coefficients.
    pub fn coefficient_denominator(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        self.terms.values().fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Product of (h_j - 1).
    pub fn den_product(group: &Arc<FgAbelianGroup>, den: &[GroupElement]) -> QH {
        den.iter().fold(QH::one(group), |acc, h| acc.mul(&QH::minus_one(group, h)))
    }
}

/// Inverse character transform with weight 1/|Tors|.
pub fn character_reassemble(
    group: &Arc<FgAbelianGroup>,
    components: &[(TorsionCharacter, CycPoly)],
) -> Result<QH> {
    let chars = group.torsion_characters();
    ensure!(components.len() == chars.len(), "one component per character is required");
    for ((c, _), d) in components.iter().zip(&chars) {
        ensure!(c == d, "components out of character order");
    }
    let order = Rational::from_integer(chars.len().into());
    let mut exps: Vec<Vec<i64>> = Vec::new();
    for (_, p) in components {
        for e in p.terms().keys() {
            exps.push(e.clone());
        }
    }
    exps.sort();
    exps.dedup();
    let tors = group.torsion_elements();
    let mut r = QH::zero(group);
    for e in exps {
        if e.iter().any(|x| x % 2 != 0) {
            return Err(Error::HalfIntegerExponent);
        }
        let free: Vec<i64> = e.iter().map(|x| x / 2).collect();
        let vals: Vec<Cyclotomic> = components.iter().map(|(_, p)| p.coeff_doubled(&e)).collect();
        for t in &tors {
            let mut s = Cyclotomic::zero();
            for ((chi, _), v) in components.iter().zip(&vals) {
                if v.is_zero() {
                    continue;
                }
                s = s + v.clone() * Cyclotomic::zeta(chi.n, -chi.pairing(t));
            }
            let c = s.to_rational().ok_or(Error::NonRationalReassembly)?;
            r.add_term(GroupElement { free: free.clone(), tors: t.tors.clone() }, c / order.clone());
        }
    }
    Ok(r)
}

/// Componentwise inverse of a torsion-supported element, zero where a component vanishes.
pub fn reduced_inverse(a: &QH) -> Result<QH> {
    ensure!(a.is_torsion_supported(), "reduced inverse needs torsion support");
    let comps = a
        .character_decompose()
        .into_iter()
        .map(|(chi, p)| {
            let v = p.coeff_doubled(&vec![0; p.nvars()]);
            let inv = if v.is_zero() { Cyclotomic::zero() } else { v.inverse()? };
            Ok((chi, CycPoly::constant(p.vars().to_vec(), inv)))
        })
        .collect::<Result<Vec<_>>>()?;
    character_reassemble(a.group(), &comps)
}

/// Reduced inverse of (t - 1) for t of finite order n:
/// ((1-n) + (3-n)t + ... + (n-1)t^{n-1}) / 2n.
pub fn reduced_inverse_t_minus_one(group: &Arc<FgAbelianGroup>, t: &GroupElement) -> Result<QH> {
    let n = group.element_order(t).ok_or(Error::InvalidInput(
        "reduced inverse of (t-1) needs t of finite order".into(),
    ))? as i64;
    let mut r = QH::zero(group);
    let mut p = group.identity();
    for j in 0..n {
        r.add_term(p.clone(), crate::exactnum::rat(2 * j + 1 - n, 2 * n));
        p = group.add(&p, t);
    }
    Ok(r)
}

/// sigma = (1/n) sum_{j<n} t^j for t of finite order n.
pub fn orbit_average(group: &Arc<FgAbelianGroup>, t: &GroupElement) -> Result<QH> {
    let n = group
        .element_order(t)
        .ok_or(Error::InvalidInput("orbit average needs t of finite order".into()))? as i64;
    let mut r = QH::zero(group);
    let mut p = group.identity();
    for _ in 0..n {
        r.add_term(p.clone(), crate::exactnum::rat(1, n));
        p = group.add(&p, t);
    }
    Ok(r)
}

/// Sum of all elements of the torsion subgroup.
pub fn torsion_sum(group: &Arc<FgAbelianGroup>) -> QH {
    let mut r = QH::zero(group);
    for t in group.torsion_elements() {
        r.add_term(t, Rational::one());
    }
    r
}

/// a^tr = |Ker p|^{-1} sum over p^{-1}(q(a)). `q` maps the source of `a` to the target of `p`.
pub fn transfer(a: &QH, q: &GroupHom, p: &Quotient) -> Result<QH> {
    ensure!(same_group(a.group(), &q.src), "transfer: element not over the source of q");
    ensure!(same_group(&q.dst, p.target()), "transfer: q and p have different targets");
    let h = &p.proj.src;
    let k = Rational::from_integer(p.kernel.len().into());
    let mut r = QH::zero(h);
    for (g, c) in a.terms() {
        let h0 = p.preimage(&q.apply(g));
        let w = c.clone() / k.clone();
        for kappa in &p.kernel {
            r.add_term(h.add(&h0, kappa), w.clone());
        }
    }
    Ok(r)
}

impl<C: Scalar> fmt::Display for GroupAlgebraElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(h, c)| {
                let mon = if h.is_identity() { String::new() } else { self.group.fmt_element(h) };
                term_string(&c.to_string(), &mon)
            })
            .collect();
        write!(f, "{}", join_terms(&parts))
    }
}

// ---------------------------------------------------------------------------
// Fractions with (h - 1) denominators

/// num / prod (h_j - 1), every h_j of infinite order. Denominator kept sorted.
#[derive(Clone, Debug)]
pub struct QHFraction {
    pub num: QH,
    pub den: Vec<GroupElement>,
}

impl QHFraction {
    pub fn new(num: QH, mut den: Vec<GroupElement>) -> Result<Self> {
        for h in &den {
            ensure!(!h.is_torsion(), "denominator factor {} has finite order", num.group().fmt_element(h));
        }
        den.sort();
        Ok(QHFraction { num, den })
    }

    pub fn from_element(num: QH) -> Self {
        QHFraction { num, den: Vec::new() }
    }

    pub fn zero(group: &Arc<FgAbelianGroup>) -> Self {
        Self::from_element(QH::zero(group))
    }

    pub fn group(&self) -> &Arc<FgAbelianGroup> {
        self.num.group()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Multiset union of denominators; returns (union, factors missing from a, factors missing from b).
    fn union(a: &[GroupElement], b: &[GroupElement]) -> (Vec<GroupElement>, Vec<GroupElement>, Vec<GroupElement>) {
        let (mut i, mut j) = (0, 0);
        let (mut u, mut ma, mut mb) = (Vec::new(), Vec::new(), Vec::new());
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i] < b[j]) {
                u.push(a[i].clone());
                mb.push(a[i].clone());
                i += 1;
            } else if i >= a.len() || b[j] < a[i] {
                u.push(b[j].clone());
                ma.push(b[j].clone());
                j += 1;
            } else {
                u.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
        (u, ma, mb)
    }

    pub fn add(&self, o: &Self) -> Self {
        let g = self.group();
        let (den, ma, mb) = Self::union(&self.den, &o.den);
        let num = self
            .num
            .mul(&QH::den_product(g, &ma))
            .add(&o.num.mul(&QH::den_product(g, &mb)));
        QHFraction { num, den }
    }

    pub fn neg(&self) -> Self {
        QHFraction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut den = self.den.clone();
        den.extend(o.den.iter().cloned());
        den.sort();
        QHFraction { num: self.num.mul(&o.num), den }
    }

    pub fn mul_element(&self, a: &QH) -> Self {
        QHFraction { num: self.num.mul(a), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QHFraction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn shift(&self, g: &GroupElement) -> Self {
        QHFraction { num: self.num.shift(g), den: self.den.clone() }
    }

    /// Cancel every denominator factor that divides the numerator.
    pub fn normalize(&self) -> Self {
        if self.num.is_zero() {
            return QHFraction::zero(self.group());
        }
        let mut num = self.num.clone();
        let mut den = Vec::new();
        for h in &self.den {
            match num.exact_divide(h) {
                Ok(q) => num = q,
                Err(_) => den.push(h.clone()),
            }
        }
        QHFraction { num, den }
    }

    /// Exact equality by cross-multiplication.
    pub fn equals(&self, o: &Self) -> bool {
        if !same_group(self.group(), o.group()) {
            return false;
        }
        let g = self.group();
        self.num.mul(&QH::den_product(g, &o.den)) == o.num.mul(&QH::den_product(g, &self.den))
    }

    /// Involution h -> h^{-1}; 1/(h-1) -> -h/(h-1).
    pub fn bar(&self) -> Self {
        let g = self.group();
        let mut shift = g.identity();
        for h in &self.den {
            shift = g.add(&shift, h);
        }
        let sign = if self.den.len() % 2 == 0 { int(1) } else { int(-1) };
        QHFraction { num: self.num.bar().shift(&shift).scale(&sign), den: self.den.clone() }
    }

    /// The element itself when the (normalized) denominator is empty.
    pub fn as_element(&self) -> Option<QH> {
        let n = self.normalize();
        n.den.is_empty().then_some(n.num)
    }

    /// Image under a homomorphism that keeps every denominator factor of infinite order.
    pub fn map_hom(&self, f: &GroupHom) -> Result<Self> {
        let den: Vec<GroupElement> = self.den.iter().map(|h| f.apply(h)).collect();
        if den.iter().any(|h| h.is_torsion()) {
            return Err(Error::NotInDomain("denominator factor maps to finite order".into()));
        }
        QHFraction::new(self.num.map_hom(f), den)
    }

    /// Coefficient of `target` in the expansion in powers of `direction`
    /// ((g-1)^{-1} = -1-g-g^2-... for positive g, g^{-1}+g^{-2}+... for negative g).
    pub fn series_coefficient(&self, direction: &GroupElement, target: &GroupElement) -> Result<Rational> {
        let g = self.group();
        ensure!(g.free_rank() == 1, "directed expansion needs b1 = 1");
        let eps = match direction.free[0] {
            1 => 1,
            -1 => -1,
            _ => return Err(Error::DirectionNotPrimitive),
        };
        let deg = |h: &GroupElement| h.free[0] * eps;
        let top = deg(target);
        let mut acc: BTreeMap<GroupElement, Rational> = self
            .num
            .terms()
            .iter()
            .filter(|(h, _)| deg(h) <= top)
            .map(|(h, c)| (h.clone(), c.clone()))
            .collect();
        for h in &self.den {
            let d = deg(h);
            // series sum_{i >= i0} c * step^i with step of positive degree
            let (step, i0, c) = if d > 0 { (h.clone(), 0, int(-1)) } else { (g.neg(h), 1, int(1)) };
            let sd = d.abs();
            let mut next: BTreeMap<GroupElement, Rational> = BTreeMap::new();
            for (x, cx) in &acc {
                let mut y = g.add(x, &g.scale(&step, i0));
                let mut dy = deg(&y);
                while dy <= top {
                    let e = next.entry(y.clone()).or_insert_with(Rational::zero);
                    *e += cx.clone() * c.clone();
                    y = g.add(&y, &step);
                    dy += sd;
                }
            }
            next.retain(|_, c| !c.is_zero());
            acc = next;
        }
        Ok(acc.get(target).cloned().unwrap_or_else(Rational::zero))
    }
}

impl fmt::Display for QHFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() || self.num.is_zero() {
            return write!(f, "{}", self.num);
        }
        let g = self.group();
        let mut factors = Vec::new();
        let mut i = 0;
        while i < self.den.len() {
            let mut e = 1;
            while i + e < self.den.len() && self.den[i + e] == self.den[i] {
                e += 1;
            }
            let base = format!("({}-1)", g.fmt_element(&self.den[i]));
            factors.push(if e == 1 { base } else { format!("{base}^{e}") });
            i += e;
        }
        write!(f, "({}) / {}", self.num, factors.join("*"))
    }
}

// ---------------------------------------------------------------------------
// Per-character values

/// The target of a character-extended map: Z/n (coordinate s) times Z^b (coordinates t_i).
#[derive(Clone, Debug)]
pub struct CharTarget {
    pub group: Arc<FgAbelianGroup>,
    pub n: u64,
    pub vars: Vec<String>,
}

impl CharTarget {
    pub fn new(n: u64, b: usize) -> Self {
        let mut row = vec![0i64; b + 1];
        row[0] = n as i64;
        CharTarget {
            group: FgAbelianGroup::from_relations(&vec![row], b + 1),
            n,
            vars: var_names("t", b),
        }
    }

    pub fn element(&self, s: i64, free: &[i64]) -> GroupElement {
        let mut w = vec![s];
        w.extend_from_slice(free);
        self.group.from_word(&w)
    }

    /// (root of unity, doubled exponent vector) of an element.
    pub fn value(&self, g: &GroupElement) -> (Cyclotomic, Vec<i64>) {
        let w = self.group.word(g);
        (Cyclotomic::zeta(self.n, w[0]), w[1..].iter().map(|x| 2 * x).collect())
    }

    /// The extension of chi to H -> Z/n x Z^b, with h -> (chi(h), free part of h).
    pub fn character_hom(&self, h: &Arc<FgAbelianGroup>, chi: &TorsionCharacter) -> Result<GroupHom> {
        ensure!(chi.n == self.n && h.free_rank() == self.vars.len(), "character target mismatch");
        let images = (0..h.ngens())
            .map(|i| {
                let g = h.gen(i);
                self.element(chi.pairing(&g), &g.free)
            })
            .collect();
        GroupHom::new(h.clone(), self.group.clone(), images)
    }

    pub fn poly(&self, a: &QH) -> CycPoly {
        assert!(same_group(a.group(), &self.group));
        let mut p = CycPoly::zero(self.vars.clone());
        for (g, c) in a.terms() {
            let (z, e) = self.value(g);
            p.add_term(e, z * Cyclotomic::from_rational(c.clone()));
        }
        p
    }
}

/// num / prod (c_j x^{a_j} - 1) over a cyclotomic field, a_j doubled and nonzero.
#[derive(Clone, Debug)]
pub struct CycFraction {
    pub num: CycPoly,
    pub den: Vec<(Cyclotomic, Vec<i64>)>,
}

impl CycFraction {
    pub fn from_poly(num: CycPoly) -> Self {
        CycFraction { num, den: Vec::new() }
    }

    fn factor_poly(vars: &[String], f: &(Cyclotomic, Vec<i64>)) -> CycPoly {
        let mut p = CycPoly::monomial_doubled(vars.to_vec(), f.1.clone(), f.0.clone());
        p.add_term(vec![0; vars.len()], -Cyclotomic::one());
        p
    }

    fn den_product(vars: &[String], den: &[(Cyclotomic, Vec<i64>)]) -> CycPoly {
        den.iter().fold(CycPoly::constant(vars.to_vec(), Cyclotomic::one()), |acc, f| {
            acc.mul(&Self::factor_poly(vars, f))
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        let v = self.num.vars();
        let num = self
            .num
            .mul(&Self::den_product(v, &o.den))
            .add(&o.num.mul(&Self::den_product(v, &self.den)));
        let mut den = self.den.clone();
        den.extend(o.den.iter().cloned());
        CycFraction { num, den }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut den = self.den.clone();
        den.extend(o.den.iter().cloned());
        CycFraction { num: self.num.mul(&o.num), den }
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        CycFraction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Divide by (c x^a - 1); a scalar factor is inverted on the spot.
    pub fn div_factor(&self, c: Cyclotomic, a: Vec<i64>) -> Result<Self> {
        if a.iter().all(|&x| x == 0) {
            let d = c - Cyclotomic::one();
            return Ok(self.scale(&d.inverse()?));
        }
        let mut den = self.den.clone();
        den.push((c, a));
        Ok(CycFraction { num: self.num.clone(), den })
    }

    pub fn equals(&self, o: &Self) -> bool {
        let v = self.num.vars();
        self.num.mul(&Self::den_product(v, &o.den)) == o.num.mul(&Self::den_product(v, &self.den))
    }

    /// Multiply by `p` and clear the whole denominator; fails unless the result is a polynomial.
    pub fn times_to_poly(&self, p: &CycPoly) -> Result<CycPoly> {
        let mut q = self.num.mul(p);
        for (c, a) in &self.den {
            q = q.div_binomial(c, a)?;
        }
        Ok(q)
    }
}

impl fmt::Display for CycFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let v = self.num.vars();
        let fs: Vec<String> =
            self.den.iter().map(|x| format!("({})", Self::factor_poly(v, x))).collect();
        write!(f, "({}) / {}", self.num, fs.join("*"))
    }
}

/// The extension phi_# of a ring map Q[H] -> Q(zeta_n)[Z^b] to fractions. A factor (h-1) with
/// phi(h) = 1 is traded for (g-1) with phi(g) != 1 when (h-1) divides num*(g-1).
pub fn apply_phi_sharp(x: &QHFraction, phi: &GroupHom, target: &CharTarget) -> Result<CycFraction> {
    let h_grp = x.group().clone();
    ensure!(same_group(&h_grp, &phi.src), "phi is not defined on the fraction's group");
    let mut num = x.num.clone();
    let mut den: Vec<GroupElement> = Vec::new();
    for h in &x.den {
        if !phi.apply(h).is_identity() {
            den.push(h.clone());
            continue;
        }
        let g = replacement_direction(&h_grp, phi).ok_or_else(|| {
            Error::NotInDomain("character is trivial on the group".into())
        })?;
        num = num
            .mul(&QH::minus_one(&h_grp, &g))
            .exact_divide(h)
            .map_err(|_| Error::NotInDomain(format!(
                "factor ({}-1) vanishes and does not cancel",
                h_grp.fmt_element(h)
            )))?;
        den.push(g);
    }
    let mut r = CycFraction::from_poly(target.poly(&num.map_hom(phi)));
    for h in &den {
        let (z, a) = target.value(&phi.apply(h));
        r = r.div_factor(z, a)?;
    }
    Ok(r)
}

/// An element of infinite order whose image is nontrivial.
fn replacement_direction(h: &Arc<FgAbelianGroup>, phi: &GroupHom) -> Option<GroupElement> {
    let b = h.free_rank();
    for k in 0..b {
        let e = h.free_unit(k);
        if !phi.apply(&e).is_identity() {
            return Some(e);
        }
    }
    for k in 0..b {
        for j in 0..h.invariant_factors().len() {
            let e = h.add(&h.free_unit(k), &h.torsion_unit(j));
            if !phi.apply(&e).is_identity() {
                return Some(e);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn z() -> Arc<FgAbelianGroup> {
        FgAbelianGroup::free_abelian(1)
    }

    fn el(g: &Arc<FgAbelianGroup>, terms: &[(Vec<i64>, Rational)]) -> QH {
        let mut a = QH::zero(g);
        for (w, c) in terms {
            a.add_term(g.from_word(w), c.clone());
        }
        a
    }

    #[test]
    fn laurent_basics() {
        let v = var_names("t", 1);
        let t = RatPoly::var(v.clone(), 0);
        let one = RatPoly::constant(v.clone(), int(1));
        let p = t.sub(&one).mul(&t.add(&one));
        assert_eq!(p, t.mul(&t).sub(&one));
        let q = t.sub(&t.bar());
        assert_eq!(q.bar(), q.neg());
        assert_eq!(p.div_var_minus_one(0).unwrap(), t.add(&one));
        assert_eq!(t.add(&one).div_var_minus_one(0), Err(Error::NotDivisible));
        // t^2 + 1 at t = i
        let c = CycPoly::from_int_terms(v, &[(vec![2], 1), (vec![0], 1)]);
        let s = c.substitute(vec![], &[(Cyclotomic::zeta(4, 1), vec![])]).unwrap();
        assert!(s.is_zero());
        assert_eq!(format!("{}", p), "-1 + t1^2");
    }

    #[test]
    fn push_and_divide() {
        let g = FgAbelianGroup::from_relations(&vec![vec![3]], 1);
        let v = var_names("t", 1);
        let p = RatPoly::from_int_terms(v, &[(vec![3], 1), (vec![0], -1)]);
        assert!(QH::push(&p, &g, &[g.gen(0)]).unwrap().is_zero());

        let h = z();
        let t = h.gen(0);
        let a = el(&h, &[(vec![2], int(1)), (vec![0], int(-1))]);
        assert_eq!(a.exact_divide(&t).unwrap(), el(&h, &[(vec![1], int(1)), (vec![0], int(1))]));
        assert!(QH::zero(&h).exact_divide(&t).unwrap().is_zero());

        let g2 = FgAbelianGroup::from_relations(&vec![vec![0, 2]], 2);
        let s = g2.torsion_unit(0);
        let tt = g2.free_unit(0);
        let one_s = QH::one(&g2).add(&QH::monomial(&g2, s, int(1)));
        let a = QH::minus_one(&g2, &tt).mul(&one_s);
        assert_eq!(a.exact_divide(&tt).unwrap(), one_s);
    }

    #[test]
    fn characters_round_trip() {
        let g = FgAbelianGroup::from_relations(&vec![vec![2]], 1);
        let s = g.gen(0);
        let a = el(&g, &[(vec![0], int(3)), (vec![1], int(5))]);
        let comps = a.character_decompose();
        assert_eq!(comps[0].1.coeff_doubled(&[]), Cyclotomic::from_rational(int(8)));
        assert_eq!(comps[1].1.coeff_doubled(&[]), Cyclotomic::from_rational(int(-2)));
        assert_eq!(character_reassemble(&g, &comps).unwrap(), a);
        let c = vec![
            (comps[0].0.clone(), CycPoly::constant(vec![], Cyclotomic::one())),
            (comps[1].0.clone(), CycPoly::zero(vec![])),
        ];
        let r = character_reassemble(&g, &c).unwrap();
        assert_eq!(r, QH::one(&g).add(&QH::monomial(&g, s, int(1))).scale(&rat(1, 2)));
        let sigma = torsion_sum(&g);
        let d = sigma.character_decompose();
        assert_eq!(d[0].1.coeff_doubled(&[]), Cyclotomic::from_rational(int(2)));
        assert!(d[1].1.is_zero());
    }

    #[test]
    fn reduced_inverses() {
        for n in 2..=7 {
            let g = FgAbelianGroup::from_relations(&vec![vec![n]], 1);
            let t = g.gen(0);
            let a = QH::minus_one(&g, &t);
            let closed = reduced_inverse_t_minus_one(&g, &t).unwrap();
            assert_eq!(reduced_inverse(&a).unwrap(), closed);
            assert_eq!(a.mul(&closed).mul(&a), a);
        }
        let g = FgAbelianGroup::from_relations(&vec![vec![2]], 1);
        let closed = reduced_inverse_t_minus_one(&g, &g.gen(0)).unwrap();
        assert_eq!(closed, el(&g, &[(vec![0], rat(-1, 4)), (vec![1], rat(1, 4))]));
        assert!(reduced_inverse(&QH::zero(&g)).unwrap().is_zero());
        assert_eq!(reduced_inverse(&QH::constant(&g, int(2))).unwrap(), QH::constant(&g, rat(1, 2)));
    }

    #[test]
    fn fractions() {
        let h = z();
        let t = h.gen(0);
        let a = el(&h, &[(vec![2], int(1)), (vec![0], int(-1))]);
        let x = QHFraction::new(a, vec![t.clone()]).unwrap();
        assert_eq!(x.as_element().unwrap(), el(&h, &[(vec![1], int(1)), (vec![0], int(1))]));
        let y = QHFraction::new(QH::one(&h), vec![t.clone()]).unwrap();
        assert!(y.add(&y.neg()).normalize().is_zero());
        let p = QHFraction::new(el(&h, &[(vec![1], int(1)), (vec![0], int(1))]), vec![t.clone()]).unwrap();
        let q = QHFraction::new(
            el(&h, &[(vec![2], int(1)), (vec![1], int(1))]),
            vec![h.scale(&t, 2)],
        )
        .unwrap();
        // (t+1)/(t-1) vs (t^2+t)/(t^2-1): t(t+1)/((t-1)(t+1)) = t/(t-1) is different
        assert!(!p.equals(&q));
        let q2 = QHFraction::new(el(&h, &[(vec![2], int(1)), (vec![1], int(1))]), vec![t.clone()])
            .unwrap()
            .mul(&QHFraction::new(QH::one(&h), vec![]).unwrap());
        assert!(!p.equals(&q2));
        let r = QHFraction::new(
            el(&h, &[(vec![2], int(1)), (vec![1], int(1))]).mul(&QH::minus_one(&h, &t)),
            vec![t.clone(), t.clone()],
        )
        .unwrap();
        assert!(r.equals(&QHFraction::new(el(&h, &[(vec![2], int(1)), (vec![1], int(1))]), vec![t.clone()]).unwrap()));
        assert!(p.bar().bar().equals(&p));
        assert_eq!(format!("{}", y.neg().shift(&t)), "(-t1) / (t1-1)");
    }

    #[test]
    fn series() {
        let h = z();
        let t = h.gen(0);
        let one = h.identity();
        let x = QHFraction::new(QH::one(&h), vec![t.clone()]).unwrap();
        assert_eq!(x.series_coefficient(&t, &one).unwrap(), int(-1));
        assert_eq!(x.series_coefficient(&h.neg(&t), &one).unwrap(), int(0));
        let y = QHFraction::new(QH::monomial(&h, h.scale(&t, 2), int(-1)), vec![t.clone(), t.clone()]).unwrap();
        assert_eq!(y.series_coefficient(&h.neg(&t), &one).unwrap(), int(-1));
        assert_eq!(
            x.series_coefficient(&h.scale(&t, 2), &one),
            Err(Error::DirectionNotPrimitive)
        );
    }

    #[test]
    fn transfer_examples() {
        let h = FgAbelianGroup::from_relations(&vec![vec![2]], 1);
        let p = h.quotient(&[h.gen(0)]).unwrap();
        let src = FgAbelianGroup::free_abelian(1);
        let q = GroupHom::new(src.clone(), p.target().clone(), vec![p.proj.apply(&h.gen(0))]).unwrap();
        let r = transfer(&QH::one(&src), &q, &p).unwrap();
        assert_eq!(r, torsion_sum(&h).scale(&rat(1, 2)));
        assert!(transfer(&QH::zero(&src), &q, &p).unwrap().is_zero());
    }

    #[test]
    fn phi_sharp() {
        let h = z();
        let t = h.gen(0);
        for p in 2..=5u64 {
            let target = CharTarget::new(p, 0);
            let phi = GroupHom::new(h.clone(), target.group.clone(), vec![target.element(1, &[])]).unwrap();
            let k = 3;
            let x = QHFraction::new(QH::monomial(&h, h.scale(&t, (k + 1) / 2), int(-1)), vec![t.clone()]).unwrap();
            let v = apply_phi_sharp(&x, &phi, &target).unwrap();
            let zeta = Cyclotomic::zeta(p, 1);
            let expect = -Cyclotomic::zeta(p, 2) * (zeta - Cyclotomic::one()).inverse().unwrap();
            assert!(v.den.is_empty());
            assert_eq!(v.num.coeff_doubled(&[]), expect);
        }
        // phi(t) = 1 on Z x Z/2 with phi nontrivial on s: 1/(t-1) is not in the domain
        let g = FgAbelianGroup::from_relations(&vec![vec![0, 2]], 2);
        let target = CharTarget::new(2, 0);
        let phi = GroupHom::new(g.clone(), target.group.clone(), vec![target.element(0, &[]), target.element(1, &[])]).unwrap();
        let x = QHFraction::new(QH::one(&g), vec![g.free_unit(0)]).unwrap();
        assert!(matches!(apply_phi_sharp(&x, &phi, &target), Err(Error::NotInDomain(_))));
        // (1 - s)(t - 1)/(t - 1) is fine: value 2
        let s = g.torsion_unit(0);
        let num = QH::one(&g).sub(&QH::monomial(&g, s, int(1))).mul(&QH::minus_one(&g, &g.free_unit(0)));
        let x = QHFraction::new(num, vec![g.free_unit(0)]).unwrap();
        let v = apply_phi_sharp(&x, &phi, &target).unwrap();
        assert!(v.equals(&CycFraction::from_poly(CycPoly::constant(vec![], Cyclotomic::from_rational(int(2))))));
    }
}

//! Surgery on a framed link: homology, Euler classes, torsion, Alexander function, orientation sign.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::abgroup::{FgAbelianGroup, GroupElement, GroupHom, IntMatrix, TorsionCharacter};
use crate::error::{ensure, Error, Result};
use crate::exactnum::{int, rat, Cyclotomic, Rational, Scalar};
use crate::groupring::{
    apply_phi_sharp, character_reassemble, orbit_average, reduced_inverse_t_minus_one, torsion_sum,
    transfer, CharTarget, CycFraction, CycPoly, QHFraction, QH,
};
use crate::linkdata::{
    complement, linking_submatrix, nabla_check, nabla_relative, restrict_charge, subsets,
    validate_charge, Charge, CheckResult, ConwayTable, FramedLink,
};

fn parity_sign(n: usize) -> i64 {
    if n % 2 == 0 { 1 } else { -1 }
}

fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}

/// H_1(M) = coker(Lambda) with the meridian classes.
#[derive(Clone, Debug)]
pub struct SurgeryPresentation {
    pub link: FramedLink,
    pub h: Arc<FgAbelianGroup>,
    pub meridians: Vec<GroupElement>,
    pub b1: usize,
    /// Components whose meridian has finite order.
    pub i0: Vec<usize>,
}

pub fn surgered_homology(l: &FramedLink) -> SurgeryPresentation {
    let h = FgAbelianGroup::from_relations(l.linking_matrix(), l.m());
    let meridians: Vec<GroupElement> = (0..l.m()).map(|i| h.gen(i)).collect();
    let i0 = (0..l.m()).filter(|&i| meridians[i].is_torsion()).collect();
    SurgeryPresentation { link: l.clone(), b1: h.free_rank(), h, meridians, i0 }
}

/// How tau is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauMethod {
    /// Sum over pairs I in J with reduced inverses and transfers.
    General,
    /// Closed forms for algebraically split links.
    Split,
}

/// A relative Conway function of the sublink on `sub`, over its own group.
struct SubNabla {
    sub: Vec<usize>,
    group: Arc<FgAbelianGroup>,
    value: QHFraction,
}

impl SurgeryPresentation {
    pub fn m(&self) -> usize {
        self.link.m()
    }

    fn sub_nabla(&self, i: &[usize], r: &[usize], k: &[i64], table: &ConwayTable) -> Result<SubNabla> {
        let sub = complement(self.m(), i);
        let rpos: Vec<usize> = r.iter().map(|x| sub.iter().position(|y| y == x).unwrap()).collect();
        let (group, value) = nabla_relative(
            &self.link.sublink(&sub),
            &rpos,
            &restrict_charge(&self.link, k, &sub),
            &table.restrict(&sub),
        )?;
        Ok(SubNabla { sub, group, value })
    }

    fn qh(&self, c: Rational) -> QH {
        QH::constant(&self.h, c)
    }

    fn red_inv(&self, i: usize) -> Result<QH> {
        reduced_inverse_t_minus_one(&self.h, &self.meridians[i])
    }

    /// Delta_{L_n}([t_n]) in Z[H].
    fn delta_at(&self, n: usize, table: &ConwayTable) -> Result<QH> {
        let d = table.get(&[n])?.poly();
        QH::push(d, &self.h, &[self.meridians[n].clone()])
    }

    fn power(&self, i: usize, e: i64) -> GroupElement {
        self.h.scale(&self.meridians[i], e)
    }

    // -- Euler classes ------------------------------------------------------

    /// [(k - k0)/2] in H, with k0 the parity charge.
    pub fn class_element(&self, k: &[i64]) -> Result<GroupElement> {
        validate_charge(&self.link, k)?;
        let k0 = self.link.parity_charge();
        let w: Vec<i64> = k.iter().zip(&k0).map(|(a, b)| (a - b) / 2).collect();
        Ok(self.h.from_word(&w))
    }

    pub fn charge_of(&self, g: &GroupElement) -> Charge {
        let k0 = self.link.parity_charge();
        let w = self.h.word(g);
        Charge(k0.iter().zip(&w).map(|(a, b)| a + 2 * b).collect())
    }

    pub fn canonicalize(&self, k: &[i64]) -> Result<Charge> {
        Ok(self.charge_of(&self.class_element(k)?))
    }

    pub fn same_class(&self, k: &[i64], k2: &[i64]) -> Result<bool> {
        Ok(self.class_element(k)? == self.class_element(k2)?)
    }

    /// The charge 2 - k of the inverse Euler structure.
    pub fn inverse_charge(k: &[i64]) -> Vec<i64> {
        k.iter().map(|x| 2 - x).collect()
    }

    /// c(e_k) = prod [t_i]^{k_i - 1}.
    pub fn chern(&self, k: &[i64]) -> Result<GroupElement> {
        validate_charge(&self.link, k)?;
        let w: Vec<i64> = k.iter().map(|x| x - 1).collect();
        Ok(self.h.from_word(&w))
    }

    /// One canonical charge per Euler class; for b1 >= 1 the free coordinates range over [-r, r].
    pub fn enumerate(&self, window: Option<i64>) -> Result<Vec<Charge>> {
        let elems = if self.b1 == 0 {
            self.h.elements()?
        } else {
            self.h.window(window.ok_or(Error::InfiniteEnumeration)?)
        };
        Ok(elems.iter().map(|g| self.charge_of(g)).collect())
    }

    // -- torsion -----------------------------------------------------------------

    pub fn tau(&self, k: &[i64], table: &ConwayTable) -> Result<QHFraction> {
        let general = self.tau_with(k, table, TauMethod::General)?;
        if self.link.is_algebraically_split() {
            let fast = self.tau_with(k, table, TauMethod::Split)?;
            ensure!(fast.equals(&general), "split closed form disagrees with the general formula");
        }
        Ok(general)
    }

    pub fn tau_with(&self, k: &[i64], table: &ConwayTable, method: TauMethod) -> Result<QHFraction> {
        validate_charge(&self.link, k)?;
        let t = match method {
            TauMethod::General => match (self.b1, self.m() - self.i0.len()) {
                (0, _) => self.tau_rational_sphere(k, table)?,
                (_, 1) => self.tau_one_free(k, table)?,
                _ => self.tau_pairs(k, table, &self.pairs_generic())?,
            },
            TauMethod::Split => self.tau_split(k, table)?,
        }
        .normalize();
        self.assert_integrality(&t)?;
        Ok(t)
    }

    /// Integrality ladder: Z[H] for b1 >= 2, (Z[H])_2 for b1 = 1. For b1 = 0 the coefficients
    /// are bounded by `coefficient_bound`; the (t - 1)^{-2} type terms rule out a bare |Tors|.
    pub fn assert_integrality(&self, t: &QHFraction) -> Result<()> {
        match self.b1 {
            0 => {
                ensure!(t.den.is_empty(), "tau of a rational homology sphere has a denominator");
                let bound = self.coefficient_bound();
                ensure!(
                    t.num.scale(&int(bound)).is_integral(),
                    "{bound} tau is not integral"
                );
            }
            1 => {
                let d = self.h.free_unit(0);
                let tm1 = QH::minus_one(&self.h, &d);
                let x = t.mul_element(&tm1.mul(&tm1));
                let e = x.as_element();
                ensure!(
                    e.as_ref().is_some_and(|e| e.is_integral()),
                    "tau (h-1)^2 is not in Z[H]"
                );
            }
            _ => {
                ensure!(t.den.is_empty(), "tau has a denominator although b1 >= 2");
                ensure!(t.num.is_integral(), "tau is not integral although b1 >= 2");
            }
        }
        Ok(())
    }

    /// For b1 = 0: an integer N with N tau integral, namely 2 |Tors H| e^2 for the exponent e.
    pub fn coefficient_bound(&self) -> i64 {
        let e = self.h.exponent() as i64;
        2 * self.h.torsion_order() as i64 * e * e
    }

    /// |Tors H| tau in Z[H] (b1 = 0).
    pub fn tors_scaled_integral(&self, t: &QHFraction) -> bool {
        t.den.is_empty() && t.num.scale(&int(self.h.torsion_order() as i64)).is_integral()
    }

    fn pairs_generic(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        for j in subsets(&self.i0) {
            for i in subsets(&j) {
                out.push((i, j.clone()));
            }
        }
        out
    }

    /// Sum of (-1)^{|I|} det(l^I) prod_{i not in J} ([t_i]-1)_red^{-1} nabla(L^I', L^{I' cap J}, k^I')^tr.
    fn tau_pairs(&self, k: &[i64], table: &ConwayTable, pairs: &[(Vec<usize>, Vec<usize>)]) -> Result<QHFraction> {
        let terms: Vec<QHFraction> = pairs
            .par_iter()
            .map(|(i, j)| self.pair_term(k, table, i, j))
            .collect::<Result<_>>()?;
        Ok(terms.iter().fold(QHFraction::zero(&self.h), |a, t| a.add(t)))
    }

    fn pair_term(&self, k: &[i64], table: &ConwayTable, i: &[usize], j: &[usize]) -> Result<QHFraction> {
        let (_, d) = linking_submatrix(&self.link, i);
        if d == 0 {
            return Ok(QHFraction::zero(&self.h));
        }
        let sn = self.sub_nabla(i, &minus(j, i), k, table)?;
        let jbar = complement(self.m(), j);
        let mut x = self.qh(int(parity_sign(i.len()) * d));
        x = match sn.value.as_element() {
            Some(v) => x.mul(&self.transfer(&sn, j, &v)?),
            None => {
                // rank one: only J = {n} complement with b1 = 0
                ensure!(self.b1 == 0 && jbar.len() == 1, "rank-one relative Conway function in the wrong place");
                let n = jbar[0];
                let pos = sn.sub.iter().position(|&y| y == n).unwrap();
                let g = sn.group.gen(pos);
                let y = sn
                    .value
                    .mul_element(&QH::minus_one(&sn.group, &g))
                    .as_element()
                    .ok_or_else(|| Error::Assertion("(t_n - 1) nabla is not a polynomial".into()))?;
                x.mul(&self.red_inv(n)?).mul(&self.transfer(&sn, j, &y)?)
            }
        };
        let mut den = Vec::new();
        for &a in &jbar {
            if self.i0.contains(&a) {
                x = x.mul(&self.red_inv(a)?);
            } else {
                den.push(self.meridians[a].clone());
            }
        }
        QHFraction::new(x, den)
    }

    fn transfer(&self, sn: &SubNabla, j: &[usize], x: &QH) -> Result<QH> {
        let kill: Vec<GroupElement> = j.iter().map(|&a| self.meridians[a].clone()).collect();
        let p = self.h.quotient(&kill)?;
        let images = sn.sub.iter().map(|&a| p.proj.apply(&self.meridians[a])).collect();
        let q = GroupHom::new(sn.group.clone(), p.target().clone(), images)?;
        transfer(x, &q, &p)
    }

    /// The single free meridian n when every other meridian is torsion; checks f_n = 0 and lk(n, i) = 0.
    fn lone_free(&self) -> Result<usize> {
        let rest = complement(self.m(), &self.i0);
        ensure!(rest.len() == 1, "expected exactly one meridian of infinite order");
        let n = rest[0];
        for i in 0..self.m() {
            ensure!(self.link.lk(n, i) == 0, "framing/linking of the free component is not zero");
        }
        Ok(n)
    }

    /// b1 = 1 with every meridian but t_n of finite order.
    fn tau_one_free(&self, k: &[i64], table: &ConwayTable) -> Result<QHFraction> {
        let n = self.lone_free()?;
        let pairs: Vec<_> = self.pairs_generic().into_iter().filter(|(i, _)| *i != self.i0).collect();
        let head = self.tau_pairs(k, table, &pairs)?;
        let (_, d) = linking_submatrix(&self.link, &self.i0);
        let tors = self.h.torsion_order() as i64;
        ensure!(d.abs() == tors, "det(l^I0) / |Tors H| = {d}/{tors} is not a sign");
        let coeff = rat(parity_sign(self.m()) * d, tors);
        let x = torsion_sum(&self.h)
            .scale(&coeff)
            .mul(&self.delta_at(n, table)?)
            .shift(&self.power(n, (k[n] + 1) / 2));
        let tail = QHFraction::new(x, vec![self.meridians[n].clone(); 2])?;
        Ok(head.add(&tail))
    }

    /// b1 = 0.
    fn tau_rational_sphere(&self, k: &[i64], table: &ConwayTable) -> Result<QHFraction> {
        let m = self.m();
        let all: Vec<usize> = (0..m).collect();
        let mut pairs = Vec::new();
        for j in subsets(&all).into_iter().filter(|j| j.len() < m) {
            for i in subsets(&j).into_iter().filter(|i| i.len() + 2 <= m) {
                pairs.push((i, j.clone()));
            }
        }
        let mut t = self.tau_pairs(k, table, &pairs)?;
        for n in 0..m {
            let nbar = complement(m, &[n]);
            let (_, d) = linking_submatrix(&self.link, &nbar);
            if d == 0 {
                continue;
            }
            let e = k[n] - self.link.lk_with(n, &all) + 1;
            ensure!(e % 2 == 0, "odd exponent in the correction term");
            let mut x = self.qh(int(parity_sign(m) * d));
            for &i in &nbar {
                x = x.mul(&orbit_average(&self.h, &self.meridians[i])?);
            }
            let r = self.red_inv(n)?;
            x = x.mul(&r).mul(&r).mul(&self.delta_at(n, table)?).shift(&self.power(n, e / 2));
            t = t.add(&QHFraction::from_element(x));
        }
        Ok(t)
    }

    /// s_i = sign(f_i)(1 + [t_i] + ... + [t_i]^{|f_i|-1}).
    fn s(&self, i: usize) -> QH {
        let f = self.link.framing(i);
        let mut r = QH::zero(&self.h);
        for a in 0..f.abs() {
            r.add_term(self.power(i, a), int(f.signum()));
        }
        r
    }

    /// [nabla(L^I', k^I') / prod (t_i - 1)] for the complement I' of `i`.
    fn check_term(&self, k: &[i64], table: &ConwayTable, i: &[usize]) -> Result<QH> {
        let sub = complement(self.m(), i);
        let p = nabla_check(
            &self.link.sublink(&sub),
            &restrict_charge(&self.link, k, &sub),
            &table.restrict(&sub),
        )?;
        let assign: Vec<GroupElement> = sub.iter().map(|&a| self.meridians[a].clone()).collect();
        QH::push(&p, &self.h, &assign)
    }

    fn tau_split(&self, k: &[i64], table: &ConwayTable) -> Result<QHFraction> {
        if !self.link.is_algebraically_split() {
            return Err(Error::NotSplit);
        }
        let m = self.m();
        let head_sets: Vec<Vec<usize>> = subsets(&self.i0)
            .into_iter()
            .filter(|i| m - i.len() >= 2)
            .collect();
        let mut t = QH::zero(&self.h);
        for i in &head_sets {
            let mut x = self.check_term(k, table, i)?.scale(&int(parity_sign(i.len())));
            for &a in i {
                x = x.mul(&self.s(a));
            }
            t = t.add(&x);
        }
        let mut t = QHFraction::from_element(t);
        match self.b1 {
            0 => {
                for n in 0..m {
                    let mut x = self.qh(int(parity_sign(m)));
                    for a in complement(m, &[n]) {
                        x = x.mul(&self.s(a));
                    }
                    let r = self.red_inv(n)?;
                    x = x.mul(&r).mul(&r).mul(&self.delta_at(n, table)?).shift(&self.power(n, (k[n] + 1) / 2));
                    t = t.add(&QHFraction::from_element(x));
                }
                // the head terms use (t_i - 1)^{-1} in place of reduced inverses; they agree
                // on every nontrivial character, so only the augmentation needs removing
                let num = t.as_element().expect("no denominators");
                let aug: Rational = num.terms().values().cloned().sum();
                let avg = torsion_sum(&self.h).scale(&(aug / int(self.h.torsion_order() as i64)));
                t = QHFraction::from_element(num.sub(&avg));
            }
            1 => {
                let n = self.lone_free()?;
                let mut x = self.qh(int(parity_sign(m)));
                for &a in &self.i0 {
                    x = x.mul(&self.s(a));
                }
                x = x.mul(&self.delta_at(n, table)?).shift(&self.power(n, (k[n] + 1) / 2));
                t = t.add(&QHFraction::new(x, vec![self.meridians[n].clone(); 2])?);
            }
            _ => {}
        }
        Ok(t)
    }

    // -- per character --------------------------------------------------------

    pub fn char_target(&self, chi: &TorsionCharacter) -> CharTarget {
        CharTarget::new(chi.n, self.b1)
    }

    /// tau^phi for phi = chi on torsion and the free projection, as a fraction over Q(zeta_n).
    pub fn tau_character(&self, k: &[i64], table: &ConwayTable, chi: &TorsionCharacter) -> Result<CycFraction> {
        validate_charge(&self.link, k)?;
        if self.b1 == 0 && chi.is_trivial() {
            return Err(Error::TrivialCharacter);
        }
        let target = self.char_target(chi);
        let phi = target.character_hom(&self.h, chi)?;
        let pt: Vec<GroupElement> = self.meridians.iter().map(|g| phi.apply(g)).collect();
        let iphi: Vec<usize> = (0..self.m()).filter(|&i| pt[i].is_identity()).collect();
        let mut acc = CycFraction::from_poly(CycPoly::zero(target.vars.clone()));
        for i in subsets(&iphi) {
            let (_, d) = linking_submatrix(&self.link, &i);
            if d == 0 {
                continue;
            }
            let sn = self.sub_nabla(&i, &minus(&iphi, &i), k, table)?;
            let images = sn.sub.iter().map(|&a| pt[a].clone()).collect();
            let phibar = GroupHom::new(sn.group.clone(), target.group.clone(), images)?;
            let v = apply_phi_sharp(&sn.value, &phibar, &target)?;
            acc = acc.add(&v.scale(&Cyclotomic::from_rational(int(parity_sign(i.len()) * d))));
        }
        for i in complement(self.m(), &iphi) {
            let (z, a) = target.value(&pt[i]);
            acc = acc.div_factor(z, a)?;
        }
        Ok(acc)
    }

    /// Reassemble tau from all per-character values and compare with `tau` after clearing denominators.
    pub fn cross_check(&self, k: &[i64], table: &ConwayTable) -> CheckResult {
        let r = (|| -> Result<bool> {
            let t = self.tau(k, table)?;
            let den = QH::den_product(&self.h, &t.den);
            let comps: Vec<(TorsionCharacter, CycPoly)> = self
                .h
                .torsion_characters()
                .into_par_iter()
                .map(|chi| {
                    let target = self.char_target(&chi);
                    if self.b1 == 0 && chi.is_trivial() {
                        return Ok((chi, CycPoly::zero(target.vars.clone())));
                    }
                    let v = self.tau_character(k, table, &chi)?;
                    let phi = target.character_hom(&self.h, &chi)?;
                    let p = v.times_to_poly(&target.poly(&den.map_hom(&phi)))?;
                    Ok((chi, p))
                })
                .collect::<Result<_>>()?;
            Ok(character_reassemble(&self.h, &comps)? == t.num)
        })();
        named("cross-check", r)
    }

    // -- Alexander function ---------------------------------------------------

    /// H -> H/Tors.
    pub fn free_projection(&self) -> Result<GroupHom> {
        let g = FgAbelianGroup::free_abelian(self.b1);
        let images = (0..self.m()).map(|i| g.from_word(&self.meridians[i].free)).collect();
        GroupHom::new(self.h.clone(), g, images)
    }

    pub fn delta(&self, k: &[i64], table: &ConwayTable) -> Result<QHFraction> {
        validate_charge(&self.link, k)?;
        if self.b1 == 0 {
            return Err(Error::NotPositiveB1);
        }
        let mu = self.free_projection()?;
        let g = mu.dst.clone();
        let mt: Vec<GroupElement> = self.meridians.iter().map(|x| mu.apply(x)).collect();
        let term = |i: &[usize]| -> Result<QHFraction> {
            let (_, d) = linking_submatrix(&self.link, i);
            if d == 0 {
                return Ok(QHFraction::zero(&g));
            }
            let sn = self.sub_nabla(i, &minus(&self.i0, i), k, table)?;
            let images = sn.sub.iter().map(|&a| mt[a].clone()).collect();
            let mub = GroupHom::new(sn.group.clone(), g.clone(), images)?;
            Ok(sn.value.map_hom(&mub)?.scale(&int(parity_sign(i.len()) * d)))
        };
        let outer: Vec<GroupElement> = complement(self.m(), &self.i0).iter().map(|&i| mt[i].clone()).collect();
        let mut sum = QHFraction::zero(&g);
        for i in subsets(&self.i0) {
            sum = sum.add(&term(&i)?);
        }
        let full = sum.mul(&QHFraction::new(QH::one(&g), outer.clone())?).normalize();
        if self.m() - self.i0.len() == 1 {
            // separate evaluation of the I = I0 term
            let n = self.lone_free()?;
            let mut head = QHFraction::zero(&g);
            for i in subsets(&self.i0).into_iter().filter(|i| *i != self.i0) {
                head = head.add(&term(&i)?);
            }
            head = head.mul(&QHFraction::new(QH::one(&g), outer)?);
            let (_, d) = linking_submatrix(&self.link, &self.i0);
            let dn = QH::push(table.get(&[n])?.poly(), &g, &[mt[n].clone()])?;
            let tail = dn.scale(&int(parity_sign(self.m()) * d)).shift(&g.scale(&mt[n], (k[n] + 1) / 2));
            let alt = head.add(&QHFraction::new(tail, vec![mt[n].clone(); 2])?);
            ensure!(alt.equals(&full), "the two forms of the Alexander function disagree");
        }
        Ok(full)
    }

    /// delta equals the image of tau under H -> H/Tors.
    pub fn projection_check(&self, k: &[i64], table: &ConwayTable) -> CheckResult {
        let r = (|| -> Result<bool> {
            let t = self.tau(k, table)?;
            let d = self.delta(k, table)?;
            Ok(t.map_hom(&self.free_projection()?)?.equals(&d))
        })();
        named("projection", r)
    }

    /// bar(tau(k)) = tau(2 - k).
    pub fn duality_check(&self, k: &[i64], table: &ConwayTable) -> CheckResult {
        let r = (|| -> Result<bool> {
            let a = self.tau(k, table)?.bar();
            let b = self.tau(&Self::inverse_charge(k), table)?;
            Ok(a.equals(&b))
        })();
        named("duality", r)
    }

    /// tau(k + 2v) = prod [t_i]^{v_i} tau(k).
    pub fn equivariance_check(&self, k: &[i64], v: &[i64], table: &ConwayTable) -> CheckResult {
        let r = (|| -> Result<bool> {
            let a = self.tau(k, table)?;
            let k2: Vec<i64> = k.iter().zip(v).map(|(a, b)| a + 2 * b).collect();
            let b = self.tau(&k2, table)?;
            Ok(a.shift(&self.h.from_word(v)).equals(&b))
        })();
        named("equivariance", r)
    }

    /// Generic path vs split closed form (only meaningful for algebraically split links).
    pub fn fast_path_check(&self, k: &[i64], table: &ConwayTable) -> CheckResult {
        let r = (|| -> Result<bool> {
            let a = self.tau_with(k, table, TauMethod::General)?;
            let b = self.tau_with(k, table, TauMethod::Split)?;
            Ok(a.equals(&b))
        })();
        named("fast-path", r)
    }

    /// The factor converting outputs normalized by the link orientation to the canonical one.
    pub fn orientation_sign(&self) -> i64 {
        parity_sign(self.b1 + self.m() + 1) * det0(self.link.linking_matrix()).expect("linking matrix is symmetric")
    }
}

fn named(name: &str, r: Result<bool>) -> CheckResult {
    match r {
        Ok(ok) => CheckResult { name: name.into(), ok, detail: if ok { String::new() } else { "identity fails".into() } },
        Err(e) => CheckResult { name: name.into(), ok: false, detail: e.to_string() },
    }
}

pub fn tau(l: &FramedLink, k: &[i64], table: &ConwayTable) -> Result<QHFraction> {
    surgered_homology(l).tau(k, table)
}

pub fn delta(l: &FramedLink, k: &[i64], table: &ConwayTable) -> Result<QHFraction> {
    surgered_homology(l).delta(k, table)
}

pub fn orientation_sign(l: &FramedLink) -> i64 {
    surgered_homology(l).orientation_sign()
}

/// Sign of the determinant of the nondegenerate form induced on the quotient by the annihilator.
pub fn det0(b: &IntMatrix) -> Result<i64> {
    let n = b.len();
    for i in 0..n {
        ensure!(b[i].len() == n, "matrix is not square");
        for j in 0..i {
            if b[i][j] != b[j][i] {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut a: Vec<Vec<Rational>> = b.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let mut sign = 1i64;
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let piv = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match piv {
            Some(p) => p,
            None => {
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
                let Some((i, j)) = pair else { break };
                // e_i <- e_i + e_j makes the diagonal entry 2 a_ij
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][i] += v;
                }
                i
            }
        };
        let d = a[p][p].clone();
        if d.is_negative() {
            sign = -sign;
        }
        active.retain(|&x| x != p);
        for &r in &active {
            if a[r][p].is_zero() {
                continue;
            }
            let f = &a[r][p] / &d;
            for c in 0..n {
                let v = &a[p][c] * &f;
                a[r][c] -= v;
            }
            for c in 0..n {
                let v = &a[c][p] * &f;
                a[c][r] -= v;
            }
        }
    }
    Ok(sign)
}

/// Value of an element of Q(zeta) at the identity coefficient, for display of per-character output.
pub fn constant_term(p: &CycPoly) -> Cyclotomic {
    p.coeff_doubled(&vec![0; p.nvars()])
}

//! Seiberg-Witten function of the surgered manifold, up to one global sign.
//!
//! For b1 >= 2 the value at an Euler class is the coefficient of the neutral element of tau.
//! For b1 = 1 tau is expanded in powers of t^{-1} for a direction t first.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::abgroup::GroupElement;
use crate::error::{ensure, Error, Result};
use crate::exactnum::Rational;
use crate::linkdata::{split_coefficients, subsets, CheckResult, ConwayTable};
use crate::surgery::SurgeryPresentation;

/// The b1 = 1 direction [t_n] when every other meridian has finite order.
pub fn default_direction(p: &SurgeryPresentation) -> Result<GroupElement> {
    if p.b1 != 1 || p.m() - p.i0.len() != 1 {
        return Err(Error::NeedsDirection);
    }
    let n = (0..p.m()).find(|i| !p.i0.contains(i)).unwrap();
    Ok(p.meridians[n].clone())
}

/// The direction actually used: the given one (checked primitive) or the default.
pub fn resolve_direction(p: &SurgeryPresentation, direction: Option<&GroupElement>) -> Result<GroupElement> {
    let d = match direction {
        Some(d) => d.clone(),
        None => default_direction(p)?,
    };
    if d.free.len() != 1 || d.free[0].abs() != 1 {
        return Err(Error::DirectionNotPrimitive);
    }
    Ok(d)
}

/// T(k): the coefficient of the neutral element of tau (b1 != 1), or of its expansion in
/// powers of t^{-1} (b1 = 1).
pub fn torsion_function(
    p: &SurgeryPresentation,
    k: &[i64],
    table: &ConwayTable,
    direction: Option<&GroupElement>,
) -> Result<Rational> {
    let t = p.tau(k, table)?;
    let one = p.h.identity();
    if p.b1 == 1 {
        let d = resolve_direction(p, direction)?;
        return t.series_coefficient(&p.h.neg(&d), &one);
    }
    let num = t.as_element().ok_or_else(|| Error::Assertion("tau has a denominator".into()))?;
    Ok(num.coeff(&one))
}

/// SW(e_k) up to the global sign; needs b1 >= 1.
pub fn sw_value(
    p: &SurgeryPresentation,
    k: &[i64],
    table: &ConwayTable,
    direction: Option<&GroupElement>,
) -> Result<i64> {
    if p.b1 == 0 {
        return Err(Error::NotPositiveB1);
    }
    to_int(torsion_function(p, k, table, direction)?)
}

fn to_int(x: Rational) -> Result<i64> {
    ensure!(x.is_integer(), "SW value {x} is not an integer");
    i64::try_from(x.to_integer()).map_err(|_| Error::ResourceLimit("SW value exceeds 64 bits".into()))
}

/// Duality of the torsion function: T(k) = T(2 - k), and T_t(k) = T_{t^{-1}}(2 - k) for b1 = 1.
pub fn torsion_duality_check(
    p: &SurgeryPresentation,
    k: &[i64],
    table: &ConwayTable,
    direction: Option<&GroupElement>,
) -> CheckResult {
    let r = (|| -> Result<bool> {
        let k2 = SurgeryPresentation::inverse_charge(k);
        if p.b1 == 1 {
            let d = resolve_direction(p, direction)?;
            let a = torsion_function(p, k, table, Some(&d))?;
            let b = torsion_function(p, &k2, table, Some(&p.h.neg(&d)))?;
            return Ok(a == b);
        }
        Ok(torsion_function(p, k, table, None)? == torsion_function(p, &k2, table, None)?)
    })();
    match r {
        Ok(ok) => CheckResult { name: "torsion-duality".into(), ok, detail: String::new() },
        Err(e) => CheckResult { name: "torsion-duality".into(), ok: false, detail: e.to_string() },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwEntry {
    /// Canonical charge of the class.
    pub charge: Vec<i64>,
    /// The class as an element of H_1(M), relative to the parity charge.
    pub class: String,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwTable {
    pub b1: usize,
    pub window: i64,
    /// Direction for b1 = 1, as a word in the meridians' Smith coordinates.
    pub direction: Option<String>,
    pub entries: Vec<SwEntry>,
    /// Every class whose free coordinates touch the window boundary has value 0.
    pub boundary_zero: bool,
    /// Values are determined up to one sign common to all classes.
    pub global_sign: String,
}

impl SwTable {
    pub fn nonzero(&self) -> Vec<&SwEntry> {
        self.entries.iter().filter(|e| e.value != 0).collect()
    }
}

fn on_boundary(g: &GroupElement, window: i64) -> bool {
    g.free.iter().any(|x| x.abs() == window)
}

fn finish(p: &SurgeryPresentation, window: i64, direction: Option<&GroupElement>, vals: Vec<(GroupElement, i64)>) -> SwTable {
    let boundary_zero = vals.iter().all(|(g, v)| *v == 0 || !on_boundary(g, window));
    let entries = vals
        .into_iter()
        .map(|(g, value)| SwEntry { charge: p.charge_of(&g).0, class: p.h.fmt_element(&g), value })
        .collect();
    SwTable {
        b1: p.b1,
        window,
        direction: direction.map(|d| p.h.fmt_element(d)),
        entries,
        boundary_zero,
        global_sign: "undetermined".into(),
    }
}

/// SW over every Euler class in the window, from a single tau by equivariance:
/// the value at the class g is the coefficient of g^{-1} in tau at the parity charge.
pub fn sw_table(
    p: &SurgeryPresentation,
    table: &ConwayTable,
    window: i64,
    direction: Option<&GroupElement>,
) -> Result<SwTable> {
    if p.b1 == 0 {
        return Err(Error::NotPositiveB1);
    }
    let k0 = p.link.parity_charge();
    let t = p.tau(&k0, table)?;
    let d = if p.b1 == 1 { Some(resolve_direction(p, direction)?) } else { None };
    let mut vals = Vec::new();
    for g in p.h.window(window) {
        let target = p.h.neg(&g);
        let v = match &d {
            Some(d) => t.series_coefficient(&p.h.neg(d), &target)?,
            None => t
                .as_element()
                .ok_or_else(|| Error::Assertion("tau has a denominator".into()))?
                .coeff(&target),
        };
        vals.push((g, to_int(v)?));
    }
    Ok(finish(p, window, d.as_ref(), vals))
}

/// The closed form for algebraically split links, arranged as an alternating sum over J
/// containing the zero-framed components J0:
/// sum (-1)^{|J|} prod_{i not in J} sign(f_i) sum_{l = -k mod 2f} z_l(L^J),
/// plus for b1 = 1 the tail -prod sign(f_i) (z_{(k_n-3)/2} + 2 z_{(k_n-5)/2} + ...).
/// Equals (-1)^{m-1} times the values of `sw_table` in the default direction.
pub fn sw_split_value(p: &SurgeryPresentation, k: &[i64], table: &ConwayTable) -> Result<i64> {
    let l = &p.link;
    if !l.is_algebraically_split() {
        return Err(Error::NotSplit);
    }
    if p.b1 == 0 {
        return Err(Error::NotPositiveB1);
    }
    let m = l.m();
    let f = l.framings();
    let sign = |i: usize| f[i].signum();
    let j0: Vec<usize> = (0..m).filter(|&i| f[i] == 0).collect();
    let i0: Vec<usize> = (0..m).filter(|&i| f[i] != 0).collect();
    let mut total = 0i64;
    for extra in subsets(&i0) {
        let mut j: Vec<usize> = j0.iter().chain(&extra).copied().collect();
        j.sort_unstable();
        if j.len() < 2 {
            continue;
        }
        let z = split_coefficients(&l.sublink(&j), &table.restrict(&j))?;
        let mut s = 0i64;
        for (e, c) in &z {
            let ok = j.iter().zip(e).all(|(&a, &x)| {
                let r = x + k[a];
                if f[a] == 0 { r == 0 } else { r.rem_euclid(2 * f[a]) == 0 }
            });
            if ok {
                s += c;
            }
        }
        let outside: i64 = (0..m).filter(|i| !j.contains(i)).map(sign).product();
        let par = if j.len() % 2 == 0 { 1 } else { -1 };
        total += par * outside * s;
    }
    if p.b1 == 1 {
        let n = j0[0];
        let delta = table.get(&[n])?.poly();
        let outside: i64 = (0..m).filter(|&i| i != n).map(sign).product();
        // sum_{j >= 0} (j + 1) z_{(k_n - 3)/2 - j}
        let top = (k[n] - 3).div_euclid(2);
        let mut s = Rational::zero();
        for (e, c) in delta.terms() {
            // doubled exponent
            let x = e[0] / 2;
            if x <= top {
                s += c.clone() * Rational::from_integer(((top - x) + 1).into());
            }
        }
        total -= outside * to_int(s)?;
    }
    Ok(total)
}

/// `sw_split_value` over every class of the window.
pub fn sw_split_table(p: &SurgeryPresentation, table: &ConwayTable, window: i64) -> Result<SwTable> {
    if !p.link.is_algebraically_split() {
        return Err(Error::NotSplit);
    }
    if p.b1 == 0 {
        return Err(Error::NotPositiveB1);
    }
    let mut vals = Vec::new();
    for g in p.h.window(window) {
        let k = p.charge_of(&g).0;
        vals.push((g, sw_split_value(p, &k, table)?));
    }
    let d = if p.b1 == 1 { Some(default_direction(p)?) } else { None };
    Ok(finish(p, window, d.as_ref(), vals))
}

/// Sign relating the split closed form to `sw_table`: (-1)^{m-1}.
pub fn split_relative_sign(p: &SurgeryPresentation) -> i64 {
    if p.m() % 2 == 1 { 1 } else { -1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::builtin;
    use crate::surgery::surgered_homology;

    fn setup(name: &str, f: &[i64]) -> (SurgeryPresentation, ConwayTable) {
        let b = builtin(name).unwrap();
        (surgered_homology(&b.link.with_framings(f)), b.table)
    }

    #[test]
    fn trefoil_and_unknot() {
        let (p, t) = setup("trefoil", &[0]);
        let v: Vec<i64> = [1, 3, 5, 7].iter().map(|&k| sw_value(&p, &[k], &t, None).unwrap()).collect();
        assert_eq!(v, vec![-1, -1, -2, -3]);
        let (p, t) = setup("unknot", &[0]);
        assert_eq!(sw_value(&p, &[1], &t, None).unwrap(), 0);
        assert_eq!(sw_value(&p, &[3], &t, None).unwrap(), -1);
        assert_eq!(sw_value(&p, &[-1], &t, None).unwrap(), 0);
    }

    #[test]
    fn borromean_single_class() {
        for f in [0, 1, -1, 2] {
            let (p, t) = setup("borromean", &[f, 0, 0]);
            let tab = sw_table(&p, &t, 3, None).unwrap();
            let nz = tab.nonzero();
            assert_eq!(nz.len(), 1, "f = {f}");
            assert_eq!(nz[0].value.abs(), 1);
            assert!(tab.boundary_zero);
            let split = sw_split_table(&p, &t, 3).unwrap();
            let s = split_relative_sign(&p);
            for (a, b) in tab.entries.iter().zip(&split.entries) {
                assert_eq!(a.value * s, b.value, "f = {f} class {}", a.class);
            }
        }
    }

    #[test]
    fn directions() {
        let (p, t) = setup("hopf", &[0, 0]);
        assert_eq!(p.b1, 0);
        assert!(matches!(sw_value(&p, &[0, 0], &t, None), Err(Error::NotPositiveB1)));
        let (p, t) = setup("whitehead", &[0, 0]);
        assert_eq!(p.b1, 2);
        assert!(torsion_duality_check(&p, &[1, 1], &t, None).ok);
        let (p, t) = setup("torus-2-4", &[2, 2]);
        assert_eq!(p.b1, 1);
        // no meridian alone is a direction here
        assert!(matches!(sw_value(&p, &[1, 1], &t, None), Err(Error::NeedsDirection)));
    }
}

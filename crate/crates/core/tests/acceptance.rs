//! Acceptance criteria, one PASS/FAIL line each. Run with `--nocapture` to see the report.
//!
//! Criterion 6 asks for |Tors H| tau to be integral when b1 = 0. That is false already for lens
//! spaces (the (zeta - 1)^{-2} components produce denominators like 8 for p = 2), so its line
//! reports FAIL; the test only requires the corrected bound there.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsw_core::abgroup::GroupElement;
use tsw_core::diagram::{builtin, builtin_links};
use tsw_core::exactnum::{int, Cyclotomic};
use tsw_core::groupring::{CycFraction, CycPoly, QH};
use tsw_core::linkdata::{conway_table_validate, ConwayTable, EntryJson, FramedLink};
use tsw_core::surgery::{surgered_homology, SurgeryPresentation};
use tsw_core::sw::{
    default_direction, split_relative_sign, sw_split_table, sw_table, sw_value, torsion_duality_check,
    torsion_function,
};

const SEED: u64 = 0x7357;

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
}

struct Input {
    label: String,
    p: SurgeryPresentation,
    table: ConwayTable,
    charges: Vec<Vec<i64>>,
}

/// Builtin links with framings 0, (1,0,..), and four random framings in [-3, 3]; three random
/// charges each.
fn corpus() -> Vec<Input> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for b in builtin_links() {
        let m = b.link.m();
        let mut framings = vec![vec![0; m], (0..m).map(|i| (i == 0) as i64).collect()];
        for _ in 0..4 {
            framings.push((0..m).map(|_| rng.gen_range(-3..=3)).collect());
        }
        for f in framings {
            let p = surgered_homology(&b.link.with_framings(&f));
            let k0 = p.link.parity_charge();
            let charges = (0..3)
                .map(|_| k0.iter().map(|a| a + 2 * rng.gen_range(-3i64..=3)).collect())
                .collect();
            out.push(Input { label: format!("{} f={:?}", b.name, f), p, table: b.table.clone(), charges });
        }
    }
    out
}

fn direction(p: &SurgeryPresentation) -> Option<GroupElement> {
    (p.b1 == 1).then(|| default_direction(p).unwrap_or_else(|_| p.h.free_unit(0)))
}

fn run(id: u8, title: &'static str, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let t = Instant::now();
    let r = f();
    let secs = t.elapsed().as_secs_f64();
    match r {
        Ok(detail) => Outcome { id, title, pass: true, detail, secs },
        Err(detail) => Outcome { id, title, pass: false, detail, secs },
    }
}

fn c1() -> Result<String, String> {
    let b = builtin("borromean").unwrap();
    let mut worst: f64 = 0.0;
    for f in [0, 1, -1, 2] {
        let t = Instant::now();
        let p = surgered_homology(&b.link.with_framings(&[f, 0, 0]));
        let tab = sw_table(&p, &b.table, 3, None).map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        worst = worst.max(secs);
        let nz = tab.nonzero();
        if nz.len() != 1 || nz[0].value.abs() != 1 {
            return Err(format!("f = {f}: {} nonzero classes", nz.len()));
        }
        if !tab.boundary_zero {
            return Err(format!("f = {f}: nonzero value on the window boundary"));
        }
        if secs >= 1.0 {
            return Err(format!("f = {f}: {secs:.2} s"));
        }
    }
    Ok(format!("one class with value +-1 for f = 0, 1, -1, 2 (window 3); slowest {worst:.3} s"))
}

fn c2() -> Result<String, String> {
    let b = builtin("trefoil").unwrap();
    let p = surgered_homology(&b.link.with_framings(&[0]));
    let v: Vec<i64> = [1, 3, 5, 7]
        .iter()
        .map(|&k| sw_value(&p, &[k], &b.table, None))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let s = v[0].signum();
    if v.iter().zip([1, 1, 2, 3]).all(|(a, b)| *a == s * b) {
        Ok(format!("values {v:?} = {s} * (1,1,2,3)"))
    } else {
        Err(format!("values {v:?}"))
    }
}

fn c3(corpus: &[Input]) -> Result<String, String> {
    let t = Instant::now();
    let mut n = 0;
    for inp in corpus {
        for k in &inp.charges {
            let c = inp.p.cross_check(k, &inp.table);
            if !c.ok {
                return Err(format!("{} k={k:?}: {}", inp.label, c.detail));
            }
            n += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("{secs:.1} s"));
    }
    Ok(format!("{n} (input, charge) pairs on {} inputs", corpus.len()))
}

fn c4(corpus: &[Input]) -> Result<String, String> {
    let mut n = 0;
    for inp in corpus {
        let d = direction(&inp.p);
        for k in &inp.charges {
            for c in [inp.p.duality_check(k, &inp.table), torsion_duality_check(&inp.p, k, &inp.table, d.as_ref())] {
                if !c.ok {
                    return Err(format!("{} k={k:?}: {} {}", inp.label, c.name, c.detail));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} duality identities"))
}

fn c5(corpus: &[Input]) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut n = 0;
    for inp in corpus {
        let k = &inp.charges[0];
        for _ in 0..20 {
            let v: Vec<i64> = (0..inp.p.m()).map(|_| rng.gen_range(-3..=3)).collect();
            let c = inp.p.equivariance_check(k, &v, &inp.table);
            if !c.ok {
                return Err(format!("{} k={k:?} v={v:?}: {}", inp.label, c.detail));
            }
            n += 1;
        }
    }
    Ok(format!("{n} shifts"))
}

/// Returns (literal claim holds everywhere, detail); Err if the attainable parts fail.
fn c6(corpus: &[Input]) -> Result<(bool, String), String> {
    let mut counts = [0usize; 3];
    let mut literal_fail = Vec::new();
    for inp in corpus {
        let p = &inp.p;
        for k in &inp.charges {
            let t = p.tau(k, &inp.table).map_err(|e| format!("{}: {e}", inp.label))?;
            match p.b1 {
                0 => {
                    counts[0] += 1;
                    if !p.tors_scaled_integral(&t) {
                        literal_fail.push(format!("{} (|Tors| = {})", inp.label, p.h.torsion_order()));
                    }
                    // the attainable statement
                    if !t.num.scale(&int(p.coefficient_bound())).is_integral() {
                        return Err(format!("{}: 2|Tors|exp^2 tau not integral", inp.label));
                    }
                }
                1 => {
                    counts[1] += 1;
                    let tm1 = QH::minus_one(&p.h, &p.h.free_unit(0));
                    let x = t.mul_element(&tm1.mul(&tm1)).as_element();
                    if !x.is_some_and(|x| x.is_integral()) {
                        return Err(format!("{}: tau (h-1)^2 not in Z[H]", inp.label));
                    }
                }
                _ => {
                    counts[2] += 1;
                    if !t.den.is_empty() || !t.num.is_integral() {
                        return Err(format!("{}: tau not in Z[H]", inp.label));
                    }
                }
            }
        }
    }
    literal_fail.dedup();
    let base = format!(
        "b1>=2 in Z[H] ({} runs), b1=1 tau(h-1)^2 in Z[H] ({} runs), b1=0 2|Tors|exp^2 tau integral ({} runs)",
        counts[2], counts[1], counts[0]
    );
    if literal_fail.is_empty() {
        Ok((true, base))
    } else {
        Ok((
            false,
            format!(
                "{base}; |Tors| tau NOT integral on {} b1=0 inputs, e.g. {} (unattainable as stated)",
                literal_fail.len(),
                literal_fail[0]
            ),
        ))
    }
}

fn c7(corpus: &[Input]) -> Result<String, String> {
    let (mut n, mut tables) = (0, 0);
    for inp in corpus.iter().filter(|i| i.p.link.is_algebraically_split()) {
        for k in &inp.charges {
            let c = inp.p.fast_path_check(k, &inp.table);
            if !c.ok {
                return Err(format!("{} k={k:?}: {}", inp.label, c.detail));
            }
            n += 1;
        }
        if inp.p.b1 >= 1 {
            let a = sw_table(&inp.p, &inp.table, 2, None).map_err(|e| e.to_string())?;
            let b = sw_split_table(&inp.p, &inp.table, 2).map_err(|e| e.to_string())?;
            let s = split_relative_sign(&inp.p);
            for (x, y) in a.entries.iter().zip(&b.entries) {
                if x.charge != y.charge || s * x.value != y.value {
                    return Err(format!("{} class {}: {} vs {}", inp.label, x.class, x.value, y.value));
                }
            }
            tables += 1;
        }
    }
    Ok(format!("{n} fast-path runs, {tables} split SW tables agree up to the global sign"))
}

fn c8() -> Result<String, String> {
    let u = builtin("unknot").unwrap();
    for p in 2..=7i64 {
        let s = surgered_homology(&u.link.with_framings(&[p]));
        for k in [1, 3, -1, 5] {
            for chi in s.h.torsion_characters() {
                let a = chi.pairing(&s.meridians[0]);
                if num_integer::gcd(a, p) != 1 {
                    continue;
                }
                let n = chi.n;
                let z = Cyclotomic::zeta(n, a);
                let dm1 = z.clone() - Cyclotomic::zeta(n, 0);
                let inv = (dm1.clone() * dm1).inverse().map_err(|e| e.to_string())?;
                let expect = -(Cyclotomic::zeta(n, a * (k + 1) / 2) * inv);
                let got = s.tau_character(&[k], &u.table, &chi).map_err(|e| e.to_string())?;
                let want = CycFraction::from_poly(CycPoly::constant(vec![], expect));
                if !got.equals(&want) {
                    return Err(format!("p = {p}, k = {k}, chi = {a}"));
                }
            }
            let c = s.cross_check(&[k], &u.table);
            if !c.ok {
                return Err(format!("p = {p}, k = {k}: reassembly {}", c.detail));
            }
        }
    }
    Ok("p = 2..7, k in {1,3,-1,5}: primitive characters and reassembly exact".into())
}

fn c9() -> Result<String, String> {
    let cases: &[(&str, &[i64])] = &[
        ("trefoil", &[0]),
        ("trefoil", &[3]),
        ("unknot", &[5]),
        ("hopf", &[2, 3]),
        ("whitehead", &[0, 0]),
        ("whitehead", &[1, 0]),
        ("borromean", &[1, 0, 0]),
        ("torus-2-4", &[1, -2]),
    ];
    let mut done = 0;
    for &(name, f) in cases {
        let b = builtin(name).unwrap();
        let l = b.link.with_framings(f);
        let p = surgered_homology(&l);
        for eps in [1, -1] {
            let p2 = surgered_homology(&l.with_split_unknot(eps));
            let t2 = b.table.with_split_unknot();
            let predicted = p2.orientation_sign() * p.orientation_sign();
            let w = (p.b1 >= 1).then_some(2);
            let (mut m1, mut m2) = (Vec::new(), Vec::new());
            for c in p.enumerate(w).map_err(|e| e.to_string())? {
                let k = c.0;
                let mut k2 = k.clone();
                k2.push(1);
                let d = direction(&p);
                // the stabilized meridians of L map to those of L; the new one is trivial
                let d2 = d.as_ref().map(|_| default_direction(&p2).unwrap());
                let a = torsion_function(&p, &k, &b.table, d.as_ref()).map_err(|e| e.to_string())?;
                let c2 = torsion_function(&p2, &k2, &t2, d2.as_ref()).map_err(|e| e.to_string())?;
                if c2 != a.clone() * int(predicted) {
                    return Err(format!("{name} f={f:?} eps={eps} k={k:?}: {a} -> {c2}, predicted sign {predicted}"));
                }
                m1.push(abs(a));
                m2.push(abs(c2));
            }
            m1.sort();
            m2.sort();
            if m1 != m2 {
                return Err(format!("{name} f={f:?} eps={eps}: |T| multisets differ"));
            }
        }
        done += 1;
    }
    Ok(format!("{done} inputs x eps = +-1: |T| multisets equal, sign = ratio of orientation factors"))
}

fn abs(x: tsw_core::exactnum::Rational) -> tsw_core::exactnum::Rational {
    if x < int(0) { -x } else { x }
}

fn mutate(table: &ConwayTable, m: usize, rng: &mut ChaCha8Rng) -> (ConwayTable, String) {
    let mut json = table.to_json();
    let keys: Vec<String> = json.keys().cloned().collect();
    let key = keys[rng.gen_range(0..keys.len())].clone();
    let delta = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
    let desc;
    match json.get_mut(&key).unwrap() {
        EntryJson::Knot { delta: d } => {
            let e = rng.gen_range(-2i64..=2);
            match d.iter_mut().find(|(x, _)| *x == e) {
                Some(t) => t.1 += delta,
                None => d.push((e, delta)),
            }
            desc = format!("{key}: t^{e} += {delta}");
        }
        EntryJson::Poly { terms } => {
            let n = key.split(',').count();
            let e: Vec<i64> = (0..n).map(|_| rng.gen_range(-2i64..=2)).collect();
            match terms.iter_mut().find(|(x, _)| *x == e) {
                Some(t) => t.1 += delta,
                None => terms.push((e.clone(), delta)),
            }
            desc = format!("{key}: {e:?} += {delta}");
        }
    }
    (ConwayTable::from_json(m, &json).unwrap(), desc)
}

fn c10() -> Result<String, String> {
    let b = builtin("borromean").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let (mut by_validate, mut by_tau) = (0, 0);
    for _ in 0..40 {
        let (bad, desc) = mutate(&b.table, 3, &mut rng);
        let l: FramedLink = b.link.with_framings(&[1, 0, 0]);
        if !conway_table_validate(&l, &bad).ok() {
            by_validate += 1;
            continue;
        }
        let p = surgered_homology(&l);
        let caught = [[1, 1, 1], [3, 1, 1], [1, -1, 3]].iter().any(|k| p.tau(k, &bad).is_err());
        if !caught {
            return Err(format!("mutation {desc} passed silently"));
        }
        by_tau += 1;
    }
    Ok(format!("40 mutations: {by_validate} caught by validate, {by_tau} by tau"))
}

#[test]
fn acceptance() {
    let corpus = corpus();
    let mut out = vec![
        run(1, "Borromean (f,0,0) SW support", c1),
        run(2, "trefoil SW series", c2),
        run(3, "cross-check suite", || c3(&corpus)),
        run(4, "duality", || c4(&corpus)),
        run(5, "charge equivariance", || c5(&corpus)),
    ];
    let t = Instant::now();
    let (six_literal, six) = match c6(&corpus) {
        Ok((lit, d)) => (lit, Ok(d)),
        Err(e) => (false, Err(e)),
    };
    let six_attainable = six.is_ok();
    out.push(Outcome {
        id: 6,
        title: "integrality ladder",
        pass: six_literal && six_attainable,
        detail: six.unwrap_or_else(|e| e),
        secs: t.elapsed().as_secs_f64(),
    });
    out.push(run(7, "fast-path equivalence", || c7(&corpus)));
    out.push(run(8, "lens spaces", c8));
    out.push(run(9, "stabilization", c9));
    out.push(run(10, "mutation sensitivity", c10));
    for o in &out {
        println!(
            "[{}] {:>2} {:<30} {:>7.3}s  {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.secs,
            o.detail
        );
    }
    for o in &out {
        if o.id == 6 {
            assert!(six_attainable, "criterion 6 (attainable part): {}", o.detail);
        } else {
            assert!(o.pass, "criterion {}: {}", o.id, o.detail);
        }
    }
}

//! Finitely generated abelian groups from integer relation matrices.
//!
//! Relations are rows: the group is Z^n modulo the row lattice of the matrix.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

fn ck_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("integer overflow in group arithmetic")
}

fn ck_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("integer overflow in group arithmetic")
}

pub fn identity_matrix(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize) -> IntMatrix {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(0i64, |s, k| ck_add(s, ck_mul(row[k], b[k][j]))))
                .collect()
        })
        .collect()
}

/// U * A * V = D with D diagonal, d_1 | d_2 | ..., all d_i >= 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub rows: usize,
    pub cols: usize,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub d: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.rows.min(self.cols)).map(|i| self.d[i][i]).collect()
    }
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&x| x != 0).count()
    }
}

struct Snf {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    vi: IntMatrix,
    r: usize,
    c: usize,
}

impl Snf {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }
    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
        self.vi.swap(i, j);
    }
    /// row_j += q * row_i
    fn add_row(&mut self, j: usize, i: usize, q: i64) {
        for k in 0..self.c {
            self.a[j][k] = ck_add(self.a[j][k], ck_mul(q, self.a[i][k]));
        }
        for k in 0..self.r {
            self.u[j][k] = ck_add(self.u[j][k], ck_mul(q, self.u[i][k]));
        }
    }
    /// col_j += q * col_i
    fn add_col(&mut self, j: usize, i: usize, q: i64) {
        for k in 0..self.r {
            self.a[k][j] = ck_add(self.a[k][j], ck_mul(q, self.a[k][i]));
        }
        for k in 0..self.c {
            self.v[k][j] = ck_add(self.v[k][j], ck_mul(q, self.v[k][i]));
        }
        // inverse of the column operation acts on rows of V^{-1}
        for k in 0..self.c {
            self.vi[i][k] = ck_add(self.vi[i][k], -ck_mul(q, self.vi[j][k]));
        }
    }
    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -*x;
        }
    }

    fn smallest(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in t..self.r {
            for j in t..self.c {
                let x = self.a[i][j].abs();
                if x != 0 && best.map_or(true, |(b, _, _)| x < b) {
                    best = Some((x, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn run(&mut self) {
        let n = self.r.min(self.c);
        for t in 0..n {
            let Some((pi, pj)) = self.smallest(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.r {
                    if self.a[i][t] != 0 {
                        let q = Integer::div_floor(&self.a[i][t], &self.a[t][t]);
                        self.add_row(i, t, -q);
                        if self.a[i][t] != 0 {
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..self.c {
                    if self.a[t][j] != 0 {
                        let q = Integer::div_floor(&self.a[t][j], &self.a[t][t]);
                        self.add_col(j, t, -q);
                        if self.a[t][j] != 0 {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    // move the smallest entry of row/column t to the pivot
                    let mut best = (self.a[t][t].abs(), t, t);
                    for i in t + 1..self.r {
                        let x = self.a[i][t].abs();
                        if x != 0 && x < best.0 {
                            best = (x, i, t);
                        }
                    }
                    for j in t + 1..self.c {
                        let x = self.a[t][j].abs();
                        if x != 0 && x < best.0 {
                            best = (x, t, j);
                        }
                    }
                    self.swap_rows(t, best.1);
                    self.swap_cols(t, best.2);
                    continue;
                }
                // divisibility of the remaining block
                let p = self.a[t][t];
                let mut bad = None;
                'outer: for i in t + 1..self.r {
                    for j in t + 1..self.c {
                        if self.a[i][j] % p != 0 {
                            bad = Some(i);
                            break 'outer;
                        }
                    }
                }
                match bad {
                    Some(i) => self.add_row(t, i, 1),
                    None => break,
                }
            }
            if self.a[t][t] < 0 {
                self.negate_row(t);
            }
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix, cols: usize) -> SmithDecomposition {
    let r = a.len();
    for row in a {
        assert_eq!(row.len(), cols, "ragged relation matrix");
    }
    let mut s = Snf {
        a: a.clone(),
        u: identity_matrix(r),
        v: identity_matrix(cols),
        vi: identity_matrix(cols),
        r,
        c: cols,
    };
    s.run();
    SmithDecomposition { rows: r, cols, u: s.u, v: s.v, v_inv: s.vi, d: s.a }
}

/// Element in normal-form coordinates: free part in Z^b, torsion part reduced mod the invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub free: Vec<i64>,
    pub tors: Vec<i64>,
}

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        self.free.iter().all(|&x| x == 0) && self.tors.iter().all(|&x| x == 0)
    }
    pub fn is_torsion(&self) -> bool {
        self.free.iter().all(|&x| x == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgAbelianGroup {
    ngens: usize,
    relations: IntMatrix,
    /// diagonal of the Smith form, padded with zeros to length ngens
    diag: Vec<i64>,
    v: IntMatrix,
    v_inv: IntMatrix,
    tors_idx: Vec<usize>,
    free_idx: Vec<usize>,
}

impl FgAbelianGroup {
    pub fn from_relations(relations: &IntMatrix, ngens: usize) -> Arc<Self> {
        let snf = smith_normal_form(relations, ngens);
        let mut diag = snf.diagonal();
        diag.resize(ngens, 0);
        let tors_idx = (0..ngens).filter(|&j| diag[j] >= 2).collect();
        let free_idx = (0..ngens).filter(|&j| diag[j] == 0).collect();
        Arc::new(FgAbelianGroup {
            ngens,
            relations: relations.clone(),
            diag,
            v: snf.v,
            v_inv: snf.v_inv,
            tors_idx,
            free_idx,
        })
    }

    pub fn free_abelian(rank: usize) -> Arc<Self> {
        Self::from_relations(&vec![], rank)
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }
    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }
    pub fn free_rank(&self) -> usize {
        self.free_idx.len()
    }
    pub fn invariant_factors(&self) -> Vec<i64> {
        self.tors_idx.iter().map(|&j| self.diag[j]).collect()
    }
    pub fn torsion_order(&self) -> u64 {
        self.invariant_factors().iter().product::<i64>() as u64
    }
    /// Exponent of the torsion subgroup (1 if trivial).
    pub fn exponent(&self) -> u64 {
        self.invariant_factors().last().copied().unwrap_or(1) as u64
    }
    pub fn is_finite(&self) -> bool {
        self.free_idx.is_empty()
    }
    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { free: vec![0; self.free_rank()], tors: vec![0; self.tors_idx.len()] }
    }

    /// Normal form of the word prod t_i^{x_i} in the presentation generators.
    pub fn from_word(&self, x: &[i64]) -> GroupElement {
        assert_eq!(x.len(), self.ngens);
        let y: Vec<i64> = (0..self.ngens)
            .map(|j| (0..self.ngens).fold(0, |s, k| ck_add(s, ck_mul(x[k], self.v[k][j]))))
            .collect();
        GroupElement {
            free: self.free_idx.iter().map(|&j| y[j]).collect(),
            tors: self.tors_idx.iter().map(|&j| y[j].rem_euclid(self.diag[j])).collect(),
        }
    }

    /// A word in the presentation generators representing g.
    pub fn word(&self, g: &GroupElement) -> Vec<i64> {
        let mut x = vec![0i64; self.ngens];
        let coords = self
            .free_idx
            .iter()
            .zip(g.free.iter())
            .chain(self.tors_idx.iter().zip(g.tors.iter()));
        for (&j, &c) in coords {
            if c == 0 {
                continue;
            }
            for k in 0..self.ngens {
                x[k] = ck_add(x[k], ck_mul(c, self.v_inv[j][k]));
            }
        }
        x
    }

    pub fn gen(&self, i: usize) -> GroupElement {
        let mut x = vec![0; self.ngens];
        x[i] = 1;
        self.from_word(&x)
    }

    pub fn free_unit(&self, k: usize) -> GroupElement {
        let mut g = self.identity();
        g.free[k] = 1;
        g
    }

    pub fn torsion_unit(&self, k: usize) -> GroupElement {
        let mut g = self.identity();
        g.tors[k] = 1;
        g
    }

    pub fn reduce(&self, mut g: GroupElement) -> GroupElement {
        for (t, &j) in g.tors.iter_mut().zip(self.tors_idx.iter()) {
            *t = t.rem_euclid(self.diag[j]);
        }
        g
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(GroupElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| ck_add(*x, *y)).collect(),
            tors: a.tors.iter().zip(&b.tors).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.scale(a, -1)
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &GroupElement, k: i64) -> GroupElement {
        self.reduce(GroupElement {
            free: a.free.iter().map(|x| ck_mul(*x, k)).collect(),
            tors: a.tors.iter().map(|x| ck_mul(*x, k)).collect(),
        })
    }

    /// Order of g, None for infinite order.
    pub fn element_order(&self, g: &GroupElement) -> Option<u64> {
        if !g.is_torsion() {
            return None;
        }
        let mut o: i64 = 1;
        for (t, &j) in g.tors.iter().zip(self.tors_idx.iter()) {
            let d = self.diag[j];
            o = o.lcm(&(d / t.gcd(&d)));
        }
        Some(o as u64)
    }

    /// All elements of the torsion subgroup, in lexicographic order.
    pub fn torsion_elements(&self) -> Vec<GroupElement> {
        let f = self.invariant_factors();
        odometer(&f)
            .into_iter()
            .map(|t| GroupElement { free: vec![0; self.free_rank()], tors: t })
            .collect()
    }

    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        if !self.is_finite() {
            return Err(Error::InfiniteEnumeration);
        }
        Ok(self.torsion_elements())
    }

    /// Elements with free coordinates in [-r, r], torsion coordinates arbitrary.
    pub fn window(&self, r: i64) -> Vec<GroupElement> {
        let b = self.free_rank();
        let span = vec![2 * r + 1; b];
        let mut out = Vec::new();
        for f in odometer(&span) {
            let free: Vec<i64> = f.iter().map(|x| x - r).collect();
            for t in self.torsion_elements() {
                out.push(GroupElement { free: free.clone(), tors: t.tors });
            }
        }
        out
    }

    pub fn torsion_characters(&self) -> Vec<TorsionCharacter> {
        let f = self.invariant_factors();
        let n = self.exponent();
        odometer(&f)
            .into_iter()
            .map(|c| TorsionCharacter { exps: c, factors: f.clone(), n })
            .collect()
    }

    pub fn fmt_element(&self, g: &GroupElement) -> String {
        let mut parts = Vec::new();
        for (i, &x) in g.free.iter().enumerate() {
            match x {
                0 => {}
                1 => parts.push(format!("t{}", i + 1)),
                _ => parts.push(format!("t{}^{}", i + 1, x)),
            }
        }
        for (i, &x) in g.tors.iter().enumerate() {
            match x {
                0 => {}
                1 => parts.push(format!("s{}", i + 1)),
                _ => parts.push(format!("s{}^{}", i + 1, x)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Quotient by the subgroup generated by `kill`, with projection and the finite kernel.
    pub fn quotient(self: &Arc<Self>, kill: &[GroupElement]) -> Result<Quotient> {
        if kill.iter().any(|g| !g.is_torsion()) {
            return Err(Error::InfiniteKernel);
        }
        let mut rels = self.relations.clone();
        for g in kill {
            rels.push(self.word(g));
        }
        let target = FgAbelianGroup::from_relations(&rels, self.ngens);
        let images = (0..self.ngens).map(|i| target.gen(i)).collect();
        let proj = GroupHom::new(self.clone(), target, images)?;
        let kernel = self.span_finite(kill);
        Ok(Quotient { proj, kernel })
    }

    fn span_finite(&self, gens: &[GroupElement]) -> Vec<GroupElement> {
        let mut seen: BTreeSet<GroupElement> = BTreeSet::new();
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// Lexicographic enumeration of prod [0, m_i).
pub fn odometer(m: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &k in m {
        let mut next = Vec::with_capacity(out.len() * k as usize);
        for p in &out {
            for x in 0..k {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// chi(g) = zeta_n^{<chi, g>} with <chi, g> = sum c_j (n / d_j) g_j.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionCharacter {
    pub exps: Vec<i64>,
    pub factors: Vec<i64>,
    pub n: u64,
}

impl TorsionCharacter {
    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&c| c == 0)
    }
    /// Exponent of zeta_n in chi(g), reduced mod n.
    pub fn pairing(&self, g: &GroupElement) -> i64 {
        let n = self.n as i64;
        let mut s = 0i64;
        for ((c, d), t) in self.exps.iter().zip(&self.factors).zip(&g.tors) {
            s = (s + c * (n / d) % n * t) % n;
        }
        s.rem_euclid(n)
    }
    /// The values on the torsion generators respect the invariant factors.
    pub fn is_homomorphism(&self) -> bool {
        let n = self.n as i64;
        self.exps.iter().zip(&self.factors).all(|(c, d)| (c * (n / d) * d) % n == 0)
    }
}

/// Homomorphism given by images of the presentation generators of the source.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub src: Arc<FgAbelianGroup>,
    pub dst: Arc<FgAbelianGroup>,
    pub images: Vec<GroupElement>,
}

impl GroupHom {
    pub fn new(
        src: Arc<FgAbelianGroup>,
        dst: Arc<FgAbelianGroup>,
        images: Vec<GroupElement>,
    ) -> Result<Self> {
        if images.len() != src.ngens() {
            return Err(Error::InvalidInput("wrong number of generator images".into()));
        }
        let h = GroupHom { src, dst, images };
        for r in h.src.relations() {
            if !h.apply_word(r).is_identity() {
                return Err(Error::Assertion(
                    "generator images do not satisfy the relations".into(),
                ));
            }
        }
        Ok(h)
    }

    pub fn apply_word(&self, x: &[i64]) -> GroupElement {
        let mut acc = self.dst.identity();
        for (img, &c) in self.images.iter().zip(x) {
            if c != 0 {
                acc = self.dst.add(&acc, &self.dst.scale(img, c));
            }
        }
        acc
    }

    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        self.apply_word(&self.src.word(g))
    }
}

pub struct Quotient {
    pub proj: GroupHom,
    pub kernel: Vec<GroupElement>,
}

impl Quotient {
    pub fn target(&self) -> &Arc<FgAbelianGroup> {
        &self.proj.dst
    }
    /// Some h in the source with p(h) = y. Source and target share presentation generators.
    pub fn preimage(&self, y: &GroupElement) -> GroupElement {
        let w = self.proj.dst.word(y);
        self.proj.src.from_word(&w)
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.invariant_factors().iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank() {
            0 => {}
            1 => parts.push("Z".into()),
            b => parts.push(format!("Z^{b}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diagonal(), vec![1, 6]);
        let s = smith_normal_form(&vec![vec![0]], 1);
        assert_eq!(s.diagonal(), vec![0]);
        let s = smith_normal_form(&vec![], 0);
        assert!(s.diagonal().is_empty());
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn snf_identity_holds() {
        let a = vec![vec![4, 6, 2], vec![2, -8, 10], vec![6, 2, 0]];
        let s = smith_normal_form(&a, 3);
        let uav = mat_mul(&mat_mul(&s.u, &a, 3), &s.v, 3);
        assert_eq!(uav, s.d);
        assert_eq!(mat_mul(&s.v, &s.v_inv, 3), identity_matrix(3));
        let d = s.diagonal();
        for w in d.windows(2) {
            assert!(w[1] % w[0] == 0 || w[1] == 0);
        }
    }

    #[test]
    fn groups_from_linking_matrices() {
        let hopf = FgAbelianGroup::from_relations(&vec![vec![0, 1], vec![1, 0]], 2);
        assert_eq!(hopf.order(), Some(1));
        let lens = FgAbelianGroup::from_relations(&vec![vec![5]], 1);
        assert_eq!(lens.invariant_factors(), vec![5]);
        let b = FgAbelianGroup::from_relations(
            &vec![vec![3, 0, 0], vec![0, 0, 0], vec![0, 0, 0]],
            3,
        );
        assert_eq!(b.invariant_factors(), vec![3]);
        assert_eq!(b.free_rank(), 2);
        assert_eq!(format!("{b}"), "Z/3 + Z^2");
    }

    #[test]
    fn orders() {
        let g = FgAbelianGroup::from_relations(&vec![vec![6]], 1);
        assert_eq!(g.element_order(&g.scale(&g.gen(0), 2)), Some(3));
        assert_eq!(g.element_order(&g.identity()), Some(1));
        let h = FgAbelianGroup::from_relations(&vec![vec![0, 2]], 2);
        assert_eq!(h.element_order(&h.gen(0)), None);
    }

    #[test]
    fn characters() {
        let triv = FgAbelianGroup::free_abelian(2);
        assert_eq!(triv.torsion_characters().len(), 1);
        let z2 = FgAbelianGroup::from_relations(&vec![vec![2]], 1);
        let ch = z2.torsion_characters();
        assert_eq!(ch.len(), 2);
        assert!(ch[0].is_trivial());
        assert_eq!(ch[1].pairing(&z2.gen(0)), 1);
        let z22 = FgAbelianGroup::from_relations(&vec![vec![2, 0], vec![0, 2]], 2);
        assert_eq!(z22.torsion_characters().len(), 4);
    }

    #[test]
    fn quotient_examples() {
        let z2 = FgAbelianGroup::from_relations(&vec![vec![2]], 1);
        let q = z2.quotient(&[z2.gen(0)]).unwrap();
        assert_eq!(q.target().order(), Some(1));
        assert_eq!(q.kernel.len(), 2);
        let z = FgAbelianGroup::free_abelian(1);
        let q = z.quotient(&[]).unwrap();
        assert_eq!(q.target().free_rank(), 1);
        assert_eq!(q.kernel.len(), 1);
        assert!(matches!(z.quotient(&[z.gen(0)]), Err(Error::InfiniteKernel)));
    }

    #[test]
    fn preimages() {
        let z = FgAbelianGroup::free_abelian(1);
        let z3 = FgAbelianGroup::from_relations(&vec![vec![3]], 1);
        let p = GroupHom::new(z.clone(), z3.clone(), vec![z3.gen(0)]).unwrap();
        let q = Quotient { proj: p, kernel: vec![] };
        let y = z3.scale(&z3.gen(0), 2);
        let h = q.preimage(&y);
        assert_eq!(q.proj.apply(&h), y);
        let z4 = FgAbelianGroup::from_relations(&vec![vec![4]], 1);
        let q = z4.quotient(&[z4.scale(&z4.gen(0), 2)]).unwrap();
        let y = q.target().gen(0);
        let h = q.preimage(&y);
        assert!(h.tors[0] == 1 || h.tors[0] == 3);
    }
}

//! Algebra presentations: initial, split commutative tables, CCR pairings.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{q, Echelon, RationalMatrix, Q};

/// Finite-dimensional unital algebra by structure constants `e_i e_j = Σ c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub dim: usize,
    pub mult: Vec<Vec<Vec<Q>>>,
    pub unit: Vec<Q>,
}

impl Table {
    /// `ℚᵏ` with its primitive idempotents as basis.
    pub fn qpower(k: usize) -> Table {
        let mut mult = vec![vec![vec![Q::zero(); k]; k]; k];
        for (i, m) in mult.iter_mut().enumerate() {
            m[i][i] = Q::one();
        }
        Table {
            dim: k,
            mult,
            unit: vec![Q::one(); k],
        }
    }

    pub fn new(dim: usize, mult: Vec<Vec<Vec<Q>>>, unit: Vec<Q>) -> Result<Table> {
        let t = Table { dim, mult, unit };
        t.validate()?;
        Ok(t)
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        for (i, ai) in a.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, bj) in b.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = ai * bj;
                for (k, c) in self.mult[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &s * c;
                    }
                }
            }
        }
        out
    }

    fn basis(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim];
        v[i] = Q::one();
        v
    }

    /// Associativity and unit laws on basis elements.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        let shape = self.unit.len() == n
            && self.mult.len() == n
            && self.mult.iter().all(|r| r.len() == n && r.iter().all(|c| c.len() == n));
        if !shape || n == 0 {
            return Err(Error::Invalid("malformed multiplication table".into()));
        }
        for i in 0..n {
            let e = self.basis(i);
            if self.mul(&self.unit, &e) != e || self.mul(&e, &self.unit) != e {
                return Err(Error::Invalid(format!("unit law fails on e{i}")));
            }
            for j in 0..n {
                let ej = self.basis(j);
                let eij = self.mul(&e, &ej);
                for k in 0..n {
                    let ek = self.basis(k);
                    if self.mul(&eij, &ek) != self.mul(&e, &self.mul(&ej, &ek)) {
                        return Err(Error::Invalid(format!("associativity fails on e{i}e{j}e{k}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Some(k)` when the basis is a complete set of orthogonal idempotents.
    pub fn split_rank(&self) -> Option<usize> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { self.basis(i) } else { vec![Q::zero(); n] };
                if self.mult[i][j] != want {
                    return None;
                }
            }
        }
        (self.unit == vec![Q::one(); n]).then_some(n)
    }

    /// Is `m` (columns = images of basis vectors) a unital algebra map `self → b`?
    pub fn is_hom(&self, b: &Table, m: &RationalMatrix) -> bool {
        if m.rows != b.dim || m.cols != self.dim {
            return false;
        }
        if m.apply(&self.unit) != b.unit {
            return false;
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let lhs = m.apply(&self.mul(&self.basis(i), &self.basis(j)));
                let rhs = b.mul(&m.col(i), &m.col(j));
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

/// All unital algebra maps between split commutative tables.
///
/// A map `ℚᵃ → ℚᵇ` is a function from the `b` idempotents of the target to
/// the `a` idempotents of the source; each candidate is re-verified.
pub fn enumerate_homs(a: &Table, b: &Table) -> Result<Vec<RationalMatrix>> {
    let (Some(na), Some(nb)) = (a.split_rank(), b.split_rank()) else {
        return Err(Error::Unsupported(
            "hom enumeration supports split commutative tables ℚᵏ (use qpower)".into(),
        ));
    };
    if na == 0 || nb == 0 || na > 6 || nb > 6 {
        return Err(Error::Unsupported("table dimension must be 1..=6".into()));
    }
    let total = na.pow(nb as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut m = RationalMatrix::zeros(nb, na);
        let mut c = code;
        for j in 0..nb {
            m.set(j, c % na, Q::one());
            c /= na;
        }
        if !a.is_hom(b, &m) {
            return Err(Error::Construction("idempotent map failed multiplicativity".into()));
        }
        out.push(m);
    }
    Ok(out)
}

/// Oracle: every 0/1 matrix checked directly (images of idempotents are idempotents).
pub fn brute_force_hom_count(a: &Table, b: &Table) -> usize {
    let cells = a.dim * b.dim;
    assert!(cells <= 20, "brute force only for tiny tables");
    (0u64..1 << cells)
        .filter(|bits| {
            let mut m = RationalMatrix::zeros(b.dim, a.dim);
            for r in 0..b.dim {
                for c in 0..a.dim {
                    if bits >> (r * a.dim + c) & 1 == 1 {
                        m.set(r, c, Q::one());
                    }
                }
            }
            a.is_hom(b, &m)
        })
        .count()
}

/// Generators `ℚⁿ` with `[a, b] = σ(a, b)·𝟙` and extra relations in `Λ²ℚⁿ ⊕ ℚ`.
#[derive(Clone, Debug)]
pub struct CcrPairing {
    pub n: usize,
    pub sigma: RationalMatrix,
    pub extra: Echelon,
}

impl CcrPairing {
    pub fn new(sigma: RationalMatrix) -> Result<CcrPairing> {
        let n = sigma.rows;
        if sigma.cols != n || sigma.transpose() != sigma.scale(&q(-1)) {
            return Err(Error::Invalid("pairing must be an antisymmetric square matrix".into()));
        }
        Ok(CcrPairing {
            n,
            sigma,
            extra: Echelon::new(wedge_dim(n) + 1),
        })
    }

    pub fn pair(&self, a: &[Q], b: &[Q]) -> Q {
        let sb = self.sigma.apply(b);
        a.iter().zip(&sb).map(|(x, y)| x * y).sum()
    }

    /// Span of `(e_i ∧ e_j, -σ_ij)` over all basis pairs.
    pub fn full_span(&self) -> Echelon {
        let n = self.n;
        let mut e = Echelon::new(wedge_dim(n) + 1);
        for i in 0..n {
            for j in i + 1..n {
                let mut v = vec![Q::zero(); wedge_dim(n) + 1];
                v[wedge_index(n, i, j)] = Q::one();
                v[wedge_dim(n)] = -self.sigma.get(i, j).clone();
                e.insert(&v);
            }
        }
        e
    }
}

#[derive(Clone, Debug)]
pub enum AlgebraValue {
    Initial,
    Table(Table),
    Ccr(CcrPairing),
    FreeProduct { base: Box<AlgebraValue>, copies: usize },
}

impl AlgebraValue {
    pub fn qpower(k: usize) -> AlgebraValue {
        AlgebraValue::Table(Table::qpower(k))
    }

    /// Table for hom enumeration; the initial algebra is `ℚ`.
    pub fn as_table(&self) -> Result<Table> {
        match self {
            AlgebraValue::Initial => Ok(Table::qpower(1)),
            AlgebraValue::Table(t) => Ok(t.clone()),
            _ => Err(Error::Unsupported("hom counting needs Initial or a table".into())),
        }
    }

    pub fn is_initial(&self) -> bool {
        matches!(self, AlgebraValue::Initial)
    }

    pub fn label(&self) -> String {
        match self {
            AlgebraValue::Initial => "I".into(),
            AlgebraValue::Table(t) => match t.split_rank() {
                Some(k) => format!("Q^{k}"),
                None => format!("table{}", t.dim),
            },
            AlgebraValue::Ccr(c) => format!("ccr{}", c.n),
            AlgebraValue::FreeProduct { base, copies } => format!("{}*{copies}", base.label()),
        }
    }

    /// Structural comparison used for colimit verdicts.
    pub fn same_as(&self, other: &AlgebraValue) -> bool {
        match (self, other) {
            (AlgebraValue::Initial, AlgebraValue::Initial) => true,
            (AlgebraValue::Table(a), AlgebraValue::Table(b)) => a == b,
            (
                AlgebraValue::FreeProduct { base: a, copies: j },
                AlgebraValue::FreeProduct { base: b, copies: k },
            ) => j == k && a.same_as(b),
            _ => false,
        }
    }
}

/// A finite thin diagram whose objects carry either the initial algebra or `A`.
#[derive(Clone, Debug)]
pub struct TwoValuedDiagram {
    /// `edges` are the non-identity morphisms `(from, to)`.
    pub edges: Vec<(usize, usize)>,
    pub is_a: Vec<bool>,
}

impl TwoValuedDiagram {
    /// Connected components of the subdiagram on `A`-objects.
    pub fn a_components(&self) -> Result<usize> {
        let n = self.is_a.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in &self.edges {
            if self.is_a[a] && !self.is_a[b] {
                return Err(Error::Unsupported("transition from A to the initial algebra".into()));
            }
            if self.is_a[a] && self.is_a[b] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let mut roots: Vec<usize> = (0..n).filter(|&i| self.is_a[i]).map(|i| find(&mut parent, i)).collect();
        roots.sort_unstable();
        roots.dedup();
        Ok(roots.len())
    }
}

pub fn two_valued_colimit(d: &TwoValuedDiagram, a: &AlgebraValue) -> Result<AlgebraValue> {
    Ok(match d.a_components()? {
        0 => AlgebraValue::Initial,
        1 => a.clone(),
        k => AlgebraValue::FreeProduct {
            base: Box::new(a.clone()),
            copies: k,
        },
    })
}

/// Cocones from the diagram into `t`, counted by brute force.
pub fn count_cocones(d: &TwoValuedDiagram, a: &Table, t: &Table) -> Result<usize> {
    let homs = enumerate_homs(a, t)?;
    let objs: Vec<usize> = (0..d.is_a.len()).filter(|&i| d.is_a[i]).collect();
    let h = homs.len();
    let total = h.checked_pow(objs.len() as u32).filter(|&x| x <= 1 << 22).ok_or_else(|| {
        Error::Unsupported("cocone brute force too large".into())
    })?;
    let mut count = 0;
    for code in 0..total {
        let mut pick = vec![usize::MAX; d.is_a.len()];
        let mut c = code;
        for &o in &objs {
            pick[o] = c % h;
            c /= h;
        }
        let ok = d
            .edges
            .iter()
            .filter(|&&(x, y)| d.is_a[x] && d.is_a[y])
            .all(|&(x, y)| pick[x] == pick[y]);
        if ok {
            count += 1;
        }
    }
    Ok(count)
}

/// `|Hom(value, t)|` predicted by the universal property of the candidate.
pub fn predicted_cocones(value: &AlgebraValue, t: &Table) -> Result<usize> {
    Ok(match value {
        AlgebraValue::Initial => 1,
        AlgebraValue::Table(a) => enumerate_homs(a, t)?.len(),
        AlgebraValue::FreeProduct { base, copies } => {
            predicted_cocones(base, t)?.pow(*copies as u32)
        }
        AlgebraValue::Ccr(_) => return Err(Error::Unsupported("CCR hom sets are infinite".into())),
    })
}

pub fn wedge_dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Coordinate of `e_i ∧ e_j` for `i < j`.
pub fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn wedge(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len();
    let mut out = vec![Q::zero(); wedge_dim(n)];
    for i in 0..n {
        for j in i + 1..n {
            let v = &a[i] * &b[j] - &a[j] * &b[i];
            if !v.is_zero() {
                out[wedge_index(n, i, j)] = v;
            }
        }
    }
    out
}

/// `[a, b] - c·𝟙` encoded as `(a ∧ b, -c)`.
pub fn relation_element(a: &[Q], b: &[Q], c: &Q) -> Vec<Q> {
    let mut v = wedge(a, b);
    v.push(-c.clone());
    v
}

pub fn relation_span(n: usize, pairs: &[(Vec<Q>, Vec<Q>, Q)]) -> Echelon {
    let mut e = Echelon::new(wedge_dim(n) + 1);
    for (a, b, c) in pairs {
        e.insert(&relation_element(a, b, c));
    }
    e
}

/// The relations do not force `𝟙 = 0`.
pub fn consistency_check(r: &Echelon) -> bool {
    let mut one = vec![Q::zero(); r.ambient()];
    *one.last_mut().expect("nonempty ambient") = Q::one();
    !r.contains(&one)
}

/// Commutation relations `[u, v] = 0` for spanning vectors of disjoint pairs.
pub fn perp_relations(
    subspaces: &[Vec<Vec<Q>>],
    disjoint: impl Fn(usize, usize) -> bool,
) -> Vec<(Vec<Q>, Vec<Q>, Q)> {
    let mut out = Vec::new();
    for i in 0..subspaces.len() {
        for j in i + 1..subspaces.len() {
            if !disjoint(i, j) {
                continue;
            }
            for u in &subspaces[i] {
                for v in &subspaces[j] {
                    out.push((u.clone(), v.clone(), Q::zero()));
                }
            }
        }
    }
    out
}

/// Truncated tensor algebra on `n ≤ 3` generators up to degree 4.
pub struct TruncatedFreeAlgebra {
    n: usize,
    offsets: Vec<usize>,
}

impl TruncatedFreeAlgebra {
    pub const MAX_DEGREE: usize = 4;

    pub fn new(n: usize) -> Self {
        assert!((1..=3).contains(&n));
        let mut offsets = vec![0];
        for d in 0..=Self::MAX_DEGREE {
            offsets.push(offsets[d] + n.pow(d as u32));
        }
        TruncatedFreeAlgebra { n, offsets }
    }

    pub fn dim(&self) -> usize {
        self.offsets[Self::MAX_DEGREE + 1]
    }

    fn index(&self, word: &[usize]) -> usize {
        self.offsets[word.len()] + word.iter().fold(0, |acc, &c| acc * self.n + c)
    }

    fn words(&self, d: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..self.n).map(move |c| {
                        let mut w2 = w.clone();
                        w2.push(c);
                        w2
                    })
                })
                .collect();
        }
        out
    }

    /// Embeds `(w, s) ∈ Λ² ⊕ ℚ` as `Σ w_ij (x_i x_j − x_j x_i) + s`.
    pub fn embed(&self, rel: &[Q]) -> Vec<Q> {
        let n = self.n;
        let mut v = vec![Q::zero(); self.dim()];
        for i in 0..n {
            for j in i + 1..n {
                let c = &rel[wedge_index(n, i, j)];
                if !c.is_zero() {
                    v[self.index(&[i, j])] += c;
                    v[self.index(&[j, i])] -= c;
                }
            }
        }
        v[0] += &rel[wedge_dim(n)];
        v
    }

    /// `u · r · w` for words `u`, `w`.
    fn sandwich(&self, u: &[usize], r: &[Q], w: &[usize]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for d in 0..=2 {
            for word in self.words(d) {
                let c = &r[self.index(&word)];
                if c.is_zero() {
                    continue;
                }
                let full: Vec<usize> = u.iter().chain(&word).chain(w).copied().collect();
                out[self.index(&full)] += c;
            }
        }
        out
    }

    /// Ideal generated by `rels` cut at degree 4, with columns reordered
    /// highest degree first so that low-degree members are read off directly.
    pub fn ideal(&self, rels: &[Vec<Q>]) -> Echelon {
        let dim = self.dim();
        let perm: Vec<usize> = (0..dim).rev().collect();
        let mut e = Echelon::new(dim);
        for r in rels {
            let er = self.embed(r);
            for du in 0..=2 {
                for dw in 0..=(2 - du) {
                    for u in self.words(du) {
                        for w in self.words(dw) {
                            let s = self.sandwich(&u, &er, &w);
                            let p: Vec<Q> = perm.iter().map(|&i| s[i].clone()).collect();
                            e.insert(&p);
                        }
                    }
                }
            }
        }
        e
    }

    pub fn ideal_contains(&self, ideal: &Echelon, rel: &[Q]) -> bool {
        let v = self.embed(rel);
        let p: Vec<Q> = (0..self.dim()).rev().map(|i| v[i].clone()).collect();
        ideal.contains(&p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qf;

    #[test]
    fn hom_counts() {
        let c = |a, b| enumerate_homs(&Table::qpower(a), &Table::qpower(b)).unwrap().len();
        assert_eq!(c(1, 1), 1);
        assert_eq!(c(2, 2), 4);
        assert_eq!(c(2, 1), 2);
        for a in 1..=3 {
            for b in 1..=3 {
                assert_eq!(c(a, b), brute_force_hom_count(&Table::qpower(a), &Table::qpower(b)));
            }
        }
    }

    #[test]
    fn unsupported_table_is_rejected() {
        // dual numbers Q[e]/e^2
        let z = Q::zero;
        let o = Q::one;
        let t = Table::new(
            2,
            vec![vec![vec![o(), z()], vec![z(), o()]], vec![vec![z(), o()], vec![z(), z()]]],
            vec![o(), z()],
        )
        .unwrap();
        assert!(matches!(enumerate_homs(&t, &t), Err(Error::Unsupported(_))));
        let bad = Table::new(1, vec![vec![vec![q(2)]]], vec![o()]);
        assert!(bad.is_err());
    }

    #[test]
    fn colimit_examples() {
        let a = AlgebraValue::qpower(2);
        let chain = TwoValuedDiagram {
            edges: vec![(0, 1), (1, 2)],
            is_a: vec![false, true, true],
        };
        assert!(two_valued_colimit(&chain, &a).unwrap().same_as(&a));
        let none = TwoValuedDiagram {
            edges: vec![(0, 1)],
            is_a: vec![false, false],
        };
        assert!(two_valued_colimit(&none, &a).unwrap().is_initial());
        let split = TwoValuedDiagram {
            edges: vec![(0, 1), (0, 3), (2, 3)],
            is_a: vec![false, true, true, true],
        };
        let v = two_valued_colimit(&split, &a).unwrap();
        assert_eq!(v.label(), "Q^2*2");
        for l in 1..=3 {
            let t = Table::qpower(l);
            assert_eq!(
                count_cocones(&split, &Table::qpower(2), &t).unwrap(),
                predicted_cocones(&v, &t).unwrap()
            );
        }
        let bad = TwoValuedDiagram {
            edges: vec![(0, 1)],
            is_a: vec![true, false],
        };
        assert!(two_valued_colimit(&bad, &a).is_err());
    }

    #[test]
    fn wedge_indices_are_dense() {
        let n = 4;
        let mut seen = vec![false; wedge_dim(n)];
        for i in 0..n {
            for j in i + 1..n {
                seen[wedge_index(n, i, j)] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn ccr_spans() {
        let s = RationalMatrix::from_rows(
            vec![vec![q(0), q(1)], vec![q(-1), q(0)]],
            2,
        );
        let c = CcrPairing::new(s).unwrap();
        let full = c.full_span();
        assert_eq!(full.rank(), 1);
        assert!(consistency_check(&full));
        assert_eq!(relation_span(2, &[]).rank(), 0);
        let bad = relation_span(2, &[(vec![q(1), q(0)], vec![q(1), q(0)], q(1))]);
        assert!(!consistency_check(&bad));
        let e1 = vec![q(1), q(0)];
        let e2 = vec![q(0), q(1)];
        assert_eq!(c.pair(&e1, &e2), q(1));
        let r = relation_element(&e1, &e2, &qf(1, 1));
        assert!(full.contains(&r));
        assert!(perp_relations(&[vec![e1.clone()], vec![e2.clone()]], |_, _| false).is_empty());
        assert_eq!(perp_relations(&[vec![e1], vec![e2]], |_, _| true).len(), 1);
        assert!(CcrPairing::new(RationalMatrix::identity(2)).is_err());
    }

    #[test]
    fn free_algebra_dimensions() {
        assert_eq!(TruncatedFreeAlgebra::new(3).dim(), 121);
        let f = TruncatedFreeAlgebra::new(2);
        // [x0, x1] = 1 does not put 1 into the ideal below degree 4
        let r = relation_element(&[q(1), q(0)], &[q(0), q(1)], &q(1));
        let id = f.ideal(&[r.clone()]);
        assert!(f.ideal_contains(&id, &r));
        let mut one = vec![Q::zero(); 2];
        one[1] = Q::one();
        assert!(!f.ideal_contains(&id, &one));
    }
}

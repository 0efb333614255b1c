//! Group descriptors: additive and multiplicative tori, products, and split
//! reductive groups presented by a Chevalley datum.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::dist::enveloping::Straightener;
use crate::error::{Error, Result};

/// One of the three parts of the triangular decomposition `N . T . Nbar`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Nilpotent,
    Torus,
    Opposite,
}

/// A copy of `sl_2` inside the Lie algebra: `[h,e]=2e`, `[h,f]=-2f`, `[e,f]=h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Triple {
    pub h: Vec<(usize, i64)>,
    pub e: usize,
    pub f: usize,
}

/// Structure constants of a split reductive Lie algebra in a basis
/// `xi_1..xi_q` (positive roots), `xi''_1..xi''_l` (torus), `xi'_1..xi'_q`
/// (negative roots). Basis indices follow that order, which is also the PBW
/// order used everywhere in the crate. `xi'_j` carries the root `-alpha_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChevalleyDatum {
    name: String,
    labels: Vec<String>,
    positive: usize,
    torus: usize,
    brackets: Vec<Vec<Vec<(usize, i64)>>>,
    root_values: Vec<Vec<i64>>,
    sl2_triples: Vec<Sl2Triple>,
}

type Combination = Vec<(usize, i64)>;

fn normalize_combination(mut c: Combination) -> Combination {
    c.sort_by_key(|&(i, _)| i);
    let mut out: Combination = Vec::with_capacity(c.len());
    for (i, x) in c {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y += x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|&(_, x)| x != 0);
    out
}

impl ChevalleyDatum {
    /// Builds a datum from the brackets `[a, b]` for `a < b`; the rest of the
    /// table follows from antisymmetry. Root values are read off the
    /// torus/root brackets and everything is validated, Jacobi included.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        positive: usize,
        torus: usize,
        brackets: &[(usize, usize, Combination)],
        sl2_triples: Vec<Sl2Triple>,
    ) -> Result<Self> {
        let dim = 2 * positive + torus;
        if labels.len() != dim {
            return Err(Error::InvalidDatum(format!(
                "expected {dim} labels, got {}",
                labels.len()
            )));
        }
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for (a, b, comb) in brackets {
            let (a, b) = (*a, *b);
            if a >= dim || b >= dim || comb.iter().any(|&(i, _)| i >= dim) {
                return Err(Error::InvalidDatum("basis index out of range".into()));
            }
            if a == b {
                if !normalize_combination(comb.clone()).is_empty() {
                    return Err(Error::InvalidDatum(format!("[{0},{0}] must vanish", labels[a])));
                }
                continue;
            }
            let comb = normalize_combination(comb.clone());
            let neg: Combination = comb.iter().map(|&(i, x)| (i, -x)).collect();
            if !table[a][b].is_empty() && table[a][b] != comb {
                return Err(Error::InvalidDatum(format!(
                    "conflicting brackets for [{}, {}]",
                    labels[a], labels[b]
                )));
            }
            table[a][b] = comb;
            table[b][a] = neg;
        }
        let mut datum = ChevalleyDatum {
            name: name.into(),
            labels,
            positive,
            torus,
            brackets: table,
            root_values: Vec::new(),
            sl2_triples,
        };
        datum.root_values = datum.derive_root_values()?;
        datum.validate()?;
        Ok(datum)
    }

    fn derive_root_values(&self) -> Result<Vec<Vec<i64>>> {
        let mut values = vec![vec![0; self.torus]; self.positive];
        for j in 0..self.positive {
            for k in 0..self.torus {
                let h = self.index_of(Slot::Torus, k);
                let e = self.index_of(Slot::Nilpotent, j);
                let f = self.index_of(Slot::Opposite, j);
                let alpha = match self.brackets[h][e].as_slice() {
                    [] => 0,
                    [(i, a)] if *i == e => *a,
                    _ => {
                        return Err(Error::InvalidDatum(format!(
                            "[{}, {}] is not a multiple of {}",
                            self.labels[h], self.labels[e], self.labels[e]
                        )))
                    }
                };
                let expected: Combination = if alpha == 0 { vec![] } else { vec![(f, -alpha)] };
                if self.brackets[h][f] != expected {
                    return Err(Error::InvalidDatum(format!(
                        "[{}, {}] must equal -alpha * {}",
                        self.labels[h], self.labels[f], self.labels[f]
                    )));
                }
                values[j][k] = alpha;
            }
        }
        Ok(values)
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        for a in self.torus_range() {
            for b in self.torus_range() {
                if !self.brackets[a][b].is_empty() {
                    return Err(Error::InvalidDatum("torus elements must commute".into()));
                }
            }
        }
        // Jacobi: [a,[b,c]] + [b,[c,a]] + [c,[a,b]] = 0
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let mut total = Vec::new();
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        for &(i, s) in &self.brackets[y][z] {
                            for &(j, t) in &self.brackets[x][i] {
                                total.push((j, s * t));
                            }
                        }
                    }
                    if !normalize_combination(total).is_empty() {
                        return Err(Error::InvalidDatum(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            self.labels[a], self.labels[b], self.labels[c]
                        )));
                    }
                }
            }
        }
        for t in &self.sl2_triples {
            let bracket_h = |x: usize| -> Combination {
                normalize_combination(
                    t.h.iter()
                        .flat_map(|&(i, c)| self.brackets[i][x].iter().map(move |&(j, d)| (j, c * d)))
                        .collect(),
                )
            };
            let ok = bracket_h(t.e) == vec![(t.e, 2)]
                && bracket_h(t.f) == vec![(t.f, -2)]
                && self.brackets[t.e][t.f] == normalize_combination(t.h.clone());
            if !ok {
                return Err(Error::InvalidDatum("sl2-triple relations fail".into()));
            }
        }
        Ok(())
    }

    pub fn sl2() -> Self {
        let labels = ["e", "h", "f"].iter().map(|s| s.to_string()).collect();
        ChevalleyDatum::new(
            "sl2",
            labels,
            1,
            1,
            &[(1, 0, vec![(0, 2)]), (1, 2, vec![(2, -2)]), (0, 2, vec![(1, 1)])],
            vec![Sl2Triple { h: vec![(1, 1)], e: 0, f: 2 }],
        )
        .expect("sl2 datum is valid")
    }

    /// `gl_2` with torus basis `E11, E22`.
    pub fn gl2() -> Self {
        let labels = ["e", "h1", "h2", "f"].iter().map(|s| s.to_string()).collect();
        ChevalleyDatum::new(
            "gl2",
            labels,
            1,
            2,
            &[
                (1, 0, vec![(0, 1)]),
                (2, 0, vec![(0, -1)]),
                (1, 3, vec![(3, -1)]),
                (2, 3, vec![(3, 1)]),
                (0, 3, vec![(1, 1), (2, -1)]),
            ],
            vec![Sl2Triple { h: vec![(1, 1), (2, -1)], e: 0, f: 3 }],
        )
        .expect("gl2 datum is valid")
    }

    pub fn sl2_x_sl2() -> Self {
        ChevalleyDatum::direct_sum("sl2xsl2", &Self::sl2(), &Self::sl2(), &["1", "2"])
            .expect("sl2 x sl2 datum is valid")
    }

    /// Direct sum of two data; labels get the given suffixes.
    pub fn direct_sum(name: &str, a: &Self, b: &Self, suffixes: &[&str; 2]) -> Result<Self> {
        let positive = a.positive + b.positive;
        let torus = a.torus + b.torus;
        let map_a = |i: usize| -> usize {
            let (slot, off) = a.slot_of(i);
            match slot {
                Slot::Nilpotent => off,
                Slot::Torus => positive + off,
                Slot::Opposite => positive + torus + off,
            }
        };
        let map_b = |i: usize| -> usize {
            let (slot, off) = b.slot_of(i);
            match slot {
                Slot::Nilpotent => a.positive + off,
                Slot::Torus => positive + a.torus + off,
                Slot::Opposite => positive + torus + a.positive + off,
            }
        };
        let mut labels = vec![String::new(); 2 * positive + torus];
        for i in 0..a.dim() {
            labels[map_a(i)] = format!("{}{}", a.labels[i], suffixes[0]);
        }
        for i in 0..b.dim() {
            labels[map_b(i)] = format!("{}{}", b.labels[i], suffixes[1]);
        }
        let mut brackets = Vec::new();
        for (d, map) in [(a, &map_a as &dyn Fn(usize) -> usize), (b, &map_b)] {
            for x in 0..d.dim() {
                for y in (x + 1)..d.dim() {
                    let comb: Combination = d.brackets[x][y].iter().map(|&(i, c)| (map(i), c)).collect();
                    if !comb.is_empty() {
                        brackets.push((map(x), map(y), comb));
                    }
                }
            }
        }
        let mut triples = Vec::new();
        for (d, map) in [(a, &map_a as &dyn Fn(usize) -> usize), (b, &map_b)] {
            for t in &d.sl2_triples {
                triples.push(Sl2Triple {
                    h: t.h.iter().map(|&(i, c)| (map(i), c)).collect(),
                    e: map(t.e),
                    f: map(t.f),
                });
            }
        }
        ChevalleyDatum::new(name, labels, positive, torus, &brackets, triples)
    }

    /// The same Lie algebra with the opposite Borel: negative roots become
    /// the nilpotent part, so normal forms are ordered `Nbar . T . N`.
    pub fn opposite(&self) -> Self {
        let q = self.positive;
        let l = self.torus;
        let map = |i: usize| -> usize {
            let (slot, off) = self.slot_of(i);
            match slot {
                Slot::Nilpotent => q + l + off,
                Slot::Torus => q + off,
                Slot::Opposite => off,
            }
        };
        let mut labels = vec![String::new(); self.dim()];
        for i in 0..self.dim() {
            labels[map(i)] = self.labels[i].clone();
        }
        let mut brackets = Vec::new();
        for x in 0..self.dim() {
            for y in (x + 1)..self.dim() {
                let comb: Combination = self.brackets[x][y].iter().map(|&(i, c)| (map(i), c)).collect();
                if !comb.is_empty() {
                    brackets.push((map(x), map(y), comb));
                }
            }
        }
        let triples = self
            .sl2_triples
            .iter()
            .map(|t| Sl2Triple {
                h: t.h.iter().map(|&(i, c)| (map(i), -c)).collect(),
                e: map(t.f),
                f: map(t.e),
            })
            .collect();
        ChevalleyDatum::new(format!("{}-opposite", self.name), labels, q, l, &brackets, triples)
            .expect("opposite of a valid datum is valid")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "sl2" => Some(Self::sl2()),
            "gl2" => Some(Self::gl2()),
            "sl2xsl2" | "sl2*sl2" => Some(Self::sl2_x_sl2()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        2 * self.positive + self.torus
    }

    pub fn positive(&self) -> usize {
        self.positive
    }

    pub fn torus(&self) -> usize {
        self.torus
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.brackets[a][b]
    }

    /// `alpha_j(xi''_k)`.
    pub fn root_value(&self, root: usize, torus: usize) -> i64 {
        self.root_values[root][torus]
    }

    pub fn sl2_triples(&self) -> &[Sl2Triple] {
        &self.sl2_triples
    }

    pub fn torus_range(&self) -> Range<usize> {
        self.positive..self.positive + self.torus
    }

    pub fn slot_of(&self, i: usize) -> (Slot, usize) {
        if i < self.positive {
            (Slot::Nilpotent, i)
        } else if i < self.positive + self.torus {
            (Slot::Torus, i - self.positive)
        } else {
            (Slot::Opposite, i - self.positive - self.torus)
        }
    }

    pub fn index_of(&self, slot: Slot, offset: usize) -> usize {
        match slot {
            Slot::Nilpotent => offset,
            Slot::Torus => self.positive + offset,
            Slot::Opposite => self.positive + self.torus + offset,
        }
    }

    /// True for the `sl_2` presentation `e, h, f` used on the projective line.
    pub fn is_sl2(&self) -> bool {
        self.positive == 1 && self.torus == 1 && self.brackets == ChevalleyDatum::sl2().brackets
    }
}

/// A split reductive group: its datum and the straightening engine for
/// `U(Lie G (x) K)`, whose memo table is shared by every element.
pub struct ReductiveGroup {
    datum: ChevalleyDatum,
    engine: Straightener,
}

impl ReductiveGroup {
    pub fn new(datum: ChevalleyDatum) -> Arc<Self> {
        let engine = Straightener::new(datum.clone());
        Arc::new(ReductiveGroup { datum, engine })
    }

    pub fn datum(&self) -> &ChevalleyDatum {
        &self.datum
    }

    pub(crate) fn engine(&self) -> &Straightener {
        &self.engine
    }
}

impl fmt::Debug for ReductiveGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReductiveGroup({})", self.datum.name)
    }
}

impl PartialEq for ReductiveGroup {
    fn eq(&self, other: &Self) -> bool {
        self.datum == other.datum
    }
}

/// The group whose distribution algebra is being computed.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    Additive(usize),
    Multiplicative(usize),
    Product(Vec<GroupKind>),
    Reductive(Arc<ReductiveGroup>),
}

/// A factor of a (possibly nested) product, with its positions in the three
/// multi-index slots of a PBW key.
#[derive(Clone, Debug)]
pub(crate) struct LeafSpan {
    pub leaf: Leaf,
    pub n: Range<usize>,
    pub t: Range<usize>,
    pub nbar: Range<usize>,
}

#[derive(Clone, Debug)]
pub(crate) enum Leaf {
    Additive(usize),
    Multiplicative(usize),
    Reductive(Arc<ReductiveGroup>),
}

impl GroupKind {
    pub fn reductive(datum: ChevalleyDatum) -> Self {
        GroupKind::Reductive(ReductiveGroup::new(datum))
    }

    pub fn sl2() -> Self {
        Self::reductive(ChevalleyDatum::sl2())
    }

    /// Lengths of the `(N, T, Nbar)` slots of a PBW key.
    pub fn slot_lengths(&self) -> (usize, usize, usize) {
        match self {
            GroupKind::Additive(n) => (*n, 0, 0),
            GroupKind::Multiplicative(n) => (0, *n, 0),
            GroupKind::Reductive(g) => (g.datum.positive, g.datum.torus, g.datum.positive),
            GroupKind::Product(fs) => fs.iter().fold((0, 0, 0), |acc, f| {
                let (a, b, c) = f.slot_lengths();
                (acc.0 + a, acc.1 + b, acc.2 + c)
            }),
        }
    }

    /// Dimension of the Lie algebra.
    pub fn rank(&self) -> usize {
        let (a, b, c) = self.slot_lengths();
        a + b + c
    }

    pub(crate) fn leaves(&self) -> Vec<LeafSpan> {
        let mut out = Vec::new();
        let mut offsets = (0, 0, 0);
        self.collect_leaves(&mut out, &mut offsets);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<LeafSpan>, off: &mut (usize, usize, usize)) {
        let (a, b, c) = self.slot_lengths();
        let leaf = match self {
            GroupKind::Product(fs) => {
                for f in fs {
                    f.collect_leaves(out, off);
                }
                return;
            }
            GroupKind::Additive(n) => Leaf::Additive(*n),
            GroupKind::Multiplicative(n) => Leaf::Multiplicative(*n),
            GroupKind::Reductive(g) => Leaf::Reductive(g.clone()),
        };
        out.push(LeafSpan {
            leaf,
            n: off.0..off.0 + a,
            t: off.1..off.1 + b,
            nbar: off.2..off.2 + c,
        });
        off.0 += a;
        off.1 += b;
        off.2 += c;
    }

    /// For products of additive and multiplicative factors, the kind of each
    /// coordinate in the flattened order `N ++ T`. `None` once a reductive
    /// factor appears.
    pub(crate) fn coordinate_kinds(&self) -> Option<Vec<CoordinateKind>> {
        let (a, b, _) = self.slot_lengths();
        let mut n_kinds = Vec::with_capacity(a);
        let mut t_kinds = Vec::with_capacity(b);
        for span in self.leaves() {
            match span.leaf {
                Leaf::Additive(n) => n_kinds.extend(std::iter::repeat(CoordinateKind::Additive).take(n)),
                Leaf::Multiplicative(n) => {
                    t_kinds.extend(std::iter::repeat(CoordinateKind::Multiplicative).take(n))
                }
                Leaf::Reductive(_) => return None,
            }
        }
        n_kinds.extend(t_kinds);
        Some(n_kinds)
    }

    pub fn to_json(&self) -> Value {
        match self {
            GroupKind::Additive(n) => json!({"kind": "Ga", "rank": n}),
            GroupKind::Multiplicative(n) => json!({"kind": "Gm", "rank": n}),
            GroupKind::Product(fs) => {
                json!({"kind": "product", "factors": fs.iter().map(|f| f.to_json()).collect::<Vec<_>>()})
            }
            GroupKind::Reductive(g) => json!({"kind": "reductive", "name": g.datum.name}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Malformed("group needs a `kind`".into()))?;
        let rank = || v.get("rank").and_then(Value::as_u64).unwrap_or(1) as usize;
        match kind {
            "Ga" => Ok(GroupKind::Additive(rank())),
            "Gm" => Ok(GroupKind::Multiplicative(rank())),
            "product" => {
                let factors = v
                    .get("factors")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Malformed("product needs `factors`".into()))?;
                Ok(GroupKind::Product(
                    factors.iter().map(GroupKind::from_json).collect::<Result<_>>()?,
                ))
            }
            "reductive" => {
                let name = v.get("name").and_then(Value::as_str).unwrap_or("");
                ChevalleyDatum::builtin(name)
                    .map(GroupKind::reductive)
                    .ok_or_else(|| Error::UnsupportedGroup(name.to_string()))
            }
            other => Err(Error::UnsupportedGroup(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CoordinateKind {
    Additive,
    Multiplicative,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Additive(n) => write!(f, "Ga:{n}"),
            GroupKind::Multiplicative(n) => write!(f, "Gm:{n}"),
            GroupKind::Reductive(g) => write!(f, "{}", g.datum.name),
            GroupKind::Product(fs) => {
                write!(f, "product:")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    /// `Ga`, `Ga:N`, `Gm`, `Gm:N`, `sl2`, `gl2`, `sl2xsl2`, `product:A,B,..`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("product:") {
            let factors = rest
                .split(',')
                .map(|f| f.parse())
                .collect::<Result<Vec<GroupKind>>>()?;
            if factors.is_empty() {
                return Err(Error::UnsupportedGroup(s.to_string()));
            }
            return Ok(GroupKind::Product(factors));
        }
        let (head, rank) = match s.split_once(':') {
            Some((h, r)) => (
                h,
                r.parse::<usize>()
                    .map_err(|_| Error::UnsupportedGroup(s.to_string()))?,
            ),
            None => (s, 1),
        };
        match head {
            "Ga" | "ga" => Ok(GroupKind::Additive(rank)),
            "Gm" | "gm" => Ok(GroupKind::Multiplicative(rank)),
            name => ChevalleyDatum::builtin(name)
                .map(GroupKind::reductive)
                .ok_or_else(|| Error::UnsupportedGroup(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        let sl2 = ChevalleyDatum::sl2();
        assert_eq!(sl2.root_value(0, 0), 2);
        assert!(sl2.is_sl2());
        let gl2 = ChevalleyDatum::gl2();
        assert_eq!(gl2.root_value(0, 0), 1);
        assert_eq!(gl2.root_value(0, 1), -1);
        let s = ChevalleyDatum::sl2_x_sl2();
        assert_eq!(s.labels(), &["e1", "e2", "h1", "h2", "f1", "f2"]);
        assert_eq!(s.root_value(1, 1), 2);
        assert_eq!(s.root_value(1, 0), 0);
        assert!(s.bracket(0, 5).is_empty());
    }

    #[test]
    fn opposite_swaps_roles() {
        let op = ChevalleyDatum::sl2().opposite();
        assert_eq!(op.labels(), &["f", "h", "e"]);
        assert_eq!(op.root_value(0, 0), -2);
    }

    #[test]
    fn jacobi_violation_rejected() {
        // a Heisenberg-like table with a bad bracket into the torus
        let labels = ["e", "h", "f"].iter().map(|s| s.to_string()).collect();
        let err = ChevalleyDatum::new(
            "broken",
            labels,
            1,
            1,
            &[(1, 0, vec![(0, 2)]), (1, 2, vec![(2, -2)]), (0, 2, vec![(1, 1), (0, 1)])],
            vec![],
        );
        assert!(matches!(err, Err(Error::InvalidDatum(_))));
    }

    #[test]
    fn non_diagonal_torus_action_rejected() {
        let labels = ["e", "h", "f"].iter().map(|s| s.to_string()).collect();
        let err = ChevalleyDatum::new("broken", labels, 1, 1, &[(1, 0, vec![(2, 1)])], vec![]);
        assert!(matches!(err, Err(Error::InvalidDatum(_))));
    }

    #[test]
    fn group_strings() {
        for s in ["Ga:1", "Gm:2", "sl2", "gl2", "product:Ga:1,Gm:1"] {
            let g: GroupKind = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
            assert_eq!(GroupKind::from_json(&g.to_json()).unwrap(), g);
        }
        assert_eq!("Ga".parse::<GroupKind>().unwrap(), GroupKind::Additive(1));
        assert!("so5".parse::<GroupKind>().is_err());
    }

    #[test]
    fn leaf_layout() {
        let g: GroupKind = "product:Ga:2,sl2,Gm:1".parse().unwrap();
        assert_eq!(g.slot_lengths(), (3, 2, 1));
        let leaves = g.leaves();
        assert_eq!(leaves.len(), 3);
        assert_eq!(leaves[1].n, 2..3);
        assert_eq!(leaves[2].t, 1..2);
        assert!(g.coordinate_kinds().is_none());
        let h: GroupKind = "product:Gm:1,Ga:1".parse().unwrap();
        assert_eq!(
            h.coordinate_kinds().unwrap(),
            vec![CoordinateKind::Additive, CoordinateKind::Multiplicative]
        );
    }
}

//! Set partitions of k upper and l lower points and their category operations.
//!
//! Points are numbered upper 0..k, then lower k..k+l. In text, upper points are written
//! 1..k and lower points 1'..l'.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// A point of a partition diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    /// Upper point, 1-based.
    Upper(usize),
    /// Lower point, 1-based.
    Lower(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Row {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// p ∈ P(k,l) stored as a block id per point, ids in first-occurrence order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    k: usize,
    l: usize,
    blocks: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

impl Partition {
    /// From arbitrary block labels per point (upper points first).
    pub fn from_labels(k: usize, l: usize, labels: &[usize]) -> Result<Self> {
        if labels.len() != k + l {
            return invalid(format!("{} labels for {} points", labels.len(), k + l));
        }
        Ok(Partition { k, l, blocks: canonical(labels) })
    }

    /// From blocks given as lists of points; every point must occur exactly once.
    pub fn new(k: usize, l: usize, blocks: &[Vec<Point>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; k + l];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return invalid("empty block");
            }
            for &p in block {
                let idx = match p {
                    Point::Upper(i) if (1..=k).contains(&i) => i - 1,
                    Point::Lower(i) if (1..=l).contains(&i) => k + i - 1,
                    _ => return invalid(format!("point {} is outside P({k},{l})", point_name(p))),
                };
                if labels[idx] != usize::MAX {
                    return invalid(format!("point {} occurs in two blocks", point_name(p)));
                }
                labels[idx] = b;
            }
        }
        if let Some(i) = labels.iter().position(|&b| b == usize::MAX) {
            return invalid(format!("point {} is not covered", point_name(Self::point_at(k, i))));
        }
        Self::from_labels(k, l, &labels)
    }

    fn point_at(k: usize, i: usize) -> Point {
        if i < k {
            Point::Upper(i + 1)
        } else {
            Point::Lower(i - k + 1)
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    /// Canonical block id of every point (upper points first).
    pub fn labels(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks as point lists in canonical order.
    pub fn blocks(&self) -> Vec<Vec<Point>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (i, &b) in self.blocks.iter().enumerate() {
            out[b].push(Self::point_at(self.k, i));
        }
        out
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.block_count()];
        for &b in &self.blocks {
            sizes[b] += 1;
        }
        sizes
    }

    /// All blocks have size two.
    pub fn is_pairing(&self) -> bool {
        self.block_sizes().iter().all(|&s| s == 2)
    }

    pub fn identity(k: usize) -> Self {
        let labels: Vec<usize> = (0..k).chain(0..k).collect();
        Partition { k, l: k, blocks: canonical(&labels) }
    }

    /// b_{k,l}: all points in one block.
    pub fn block(k: usize, l: usize) -> Self {
        Partition { k, l, blocks: vec![0; k + l] }
    }

    /// ∩ ∈ P(2,0).
    pub fn cap() -> Self {
        Self::block(2, 0)
    }

    /// ∪ ∈ P(0,2).
    pub fn cup() -> Self {
        Self::block(0, 2)
    }

    /// Singleton ↑ ∈ P(0,1).
    pub fn singleton() -> Self {
        Self::block(0, 1)
    }

    /// Crossing {1,2'},{2,1'} ∈ P(2,2).
    pub fn cross() -> Self {
        Partition { k: 2, l: 2, blocks: vec![0, 1, 1, 0] }
    }

    /// Merge b_{2,1}.
    pub fn merge() -> Self {
        Self::block(2, 1)
    }

    /// Fork b_{1,2}.
    pub fn fork() -> Self {
        Self::block(1, 2)
    }

    /// p_k ∈ P(0,2k) with blocks {1,2k} and {2i,2i+1}: the rotation of ∩^{⊗k}.
    pub fn pk(k: usize) -> Result<Self> {
        if k == 0 {
            return invalid("pk needs k ≥ 1");
        }
        let mut labels = vec![0; 2 * k];
        labels[2 * k - 1] = 0;
        for i in 1..k {
            labels[2 * i - 1] = i;
            labels[2 * i] = i;
        }
        Self::from_labels(0, 2 * k, &labels)
    }

    /// Permutation partition: upper point i joined to lower point perm[i] (0-based).
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut labels = vec![usize::MAX; 2 * n];
        for (i, &j) in perm.iter().enumerate() {
            if j >= n || labels[n + j] != usize::MAX {
                return invalid("not a permutation");
            }
            labels[i] = i;
            labels[n + j] = i;
        }
        Self::from_labels(n, n, &labels)
    }

    /// self ∘ p: p applied first, p's lower row glued to self's upper row. Returns the
    /// composite and the number of closed loops (middle-only components).
    pub fn compose(&self, p: &Partition) -> Result<(Partition, usize)> {
        if p.l != self.k {
            return Err(Error::Arity(format!(
                "cannot compose P({},{}) after P({},{}): {} ≠ {}",
                self.k, self.l, p.k, p.l, p.l, self.k
            )));
        }
        let (k, mid, m) = (p.k, p.l, self.l);
        // nodes: p-upper 0..k, middle k..k+mid, q-lower k+mid..k+mid+m, then block nodes
        let pb = p.block_count();
        let qb = self.block_count();
        let base = k + mid + m;
        let mut uf = UnionFind::new(base + pb + qb);
        for (i, &b) in p.blocks.iter().enumerate() {
            uf.union(i, base + b);
        }
        for (i, &b) in self.blocks.iter().enumerate() {
            let node = if i < mid { k + i } else { k + mid + (i - mid) };
            uf.union(node, base + pb + b);
        }
        let mut labels = Vec::with_capacity(k + m);
        for i in (0..k).chain(k + mid..k + mid + m) {
            labels.push(uf.find(i));
        }
        let outer: std::collections::HashSet<usize> = labels.iter().copied().collect();
        let mut loops = std::collections::HashSet::new();
        for i in k..k + mid {
            let r = uf.find(i);
            if !outer.contains(&r) {
                loops.insert(r);
            }
        }
        Ok((Partition { k, l: m, blocks: canonical(&labels) }, loops.len()))
    }

    /// Horizontal concatenation: self on the left.
    pub fn tensor(&self, other: &Partition) -> Partition {
        let off = self.block_count();
        let shift = |b: &usize| b + off;
        let mut labels: Vec<usize> = self.blocks[..self.k].to_vec();
        labels.extend(other.blocks[..other.k].iter().map(shift));
        labels.extend_from_slice(&self.blocks[self.k..]);
        labels.extend(other.blocks[other.k..].iter().map(shift));
        Partition { k: self.k + other.k, l: self.l + other.l, blocks: canonical(&labels) }
    }

    /// Vertical reflection: upper and lower rows exchanged.
    pub fn adjoint(&self) -> Partition {
        let mut labels = self.blocks[self.k..].to_vec();
        labels.extend_from_slice(&self.blocks[..self.k]);
        Partition { k: self.l, l: self.k, blocks: canonical(&labels) }
    }

    /// Moves the extreme point on `side` of row `from` to the same side of the other row.
    pub fn rotate(&self, side: Side, from: Row) -> Result<Partition> {
        let (up, low) = (&self.blocks[..self.k], &self.blocks[self.k..]);
        let (mut up, mut low) = (up.to_vec(), low.to_vec());
        let (src, dst) = match from {
            Row::Upper => (&mut up, &mut low),
            Row::Lower => (&mut low, &mut up),
        };
        if src.is_empty() {
            return invalid("cannot rotate: the source row is empty");
        }
        match side {
            Side::Left => dst.insert(0, src.remove(0)),
            Side::Right => dst.push(src.pop().expect("non-empty")),
        }
        let (k, l) = (up.len(), low.len());
        up.extend(low);
        Ok(Partition { k, l, blocks: canonical(&up) })
    }

    /// Relabels points: new upper i is old upper up[i], new lower j is old lower low[j].
    pub fn permute(&self, up: &[usize], low: &[usize]) -> Partition {
        let mut labels: Vec<usize> = up.iter().map(|&i| self.blocks[i]).collect();
        labels.extend(low.iter().map(|&j| self.blocks[self.k + j]));
        Partition { k: self.k, l: self.l, blocks: canonical(&labels) }
    }

    /// Parses "P(k,l){1 2 | 3 1' | 2' 3'}".
    pub fn parse(text: &str) -> Result<Partition> {
        let bad = |msg: &str| Error::InvalidInput(format!("partition {text:?}: {msg}"));
        let t = text.trim();
        let rest = t.strip_prefix("P(").ok_or_else(|| bad("expected P(k,l){…}"))?;
        let (dims, rest) = rest.split_once(')').ok_or_else(|| bad("missing ')'"))?;
        let (k, l) = dims.split_once(',').ok_or_else(|| bad("expected k,l"))?;
        let k: usize = k.trim().parse().map_err(|_| bad("k is not a number"))?;
        let l: usize = l.trim().parse().map_err(|_| bad("l is not a number"))?;
        let body = rest
            .trim()
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| bad("expected {…}"))?;
        let mut blocks = Vec::new();
        if !body.trim().is_empty() {
            for part in body.split('|') {
                let block = part
                    .split_whitespace()
                    .map(parse_point)
                    .collect::<Option<Vec<Point>>>()
                    .ok_or_else(|| bad("malformed point"))?;
                blocks.push(block);
            }
        }
        Self::new(k, l, &blocks)
    }
}

/// "3" → Upper(3), "2'" → Lower(2).
pub fn parse_point(s: &str) -> Option<Point> {
    match s.strip_suffix('\'') {
        Some(n) => n.parse().ok().filter(|&i| i > 0).map(Point::Lower),
        None => s.parse().ok().filter(|&i| i > 0).map(Point::Upper),
    }
}

fn point_name(p: Point) -> String {
    match p {
        Point::Upper(i) => i.to_string(),
        Point::Lower(i) => format!("{i}'"),
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .into_iter()
            .map(|b| b.into_iter().map(point_name).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "P({},{}){{{}}}", self.k, self.l, blocks.join(" | "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Partition {
        Partition::parse(s).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let q = p("P(3,2){1 2 | 3 1' | 2'}");
        assert_eq!(q.to_string(), "P(3,2){1 2 | 3 1' | 2'}");
        assert_eq!(p("P(0,0){}").to_string(), "P(0,0){}");
        assert_eq!(p("P(2,0){1 2}"), Partition::cap());
        assert_eq!(p("P(1,1){1 1'}"), Partition::identity(1));
        assert_eq!(p("P(2,2){1 2 1' 2'}"), Partition::block(2, 2));
        assert_eq!(p("P(2,2){2 1' | 1 2'}"), Partition::cross());
        for bad in ["P(2,0){1}", "P(2,0){1 2 | 1}", "P(1,0){1 2}", "P(1,1){1 | 1'' }", "Q(1,1){}"] {
            assert!(Partition::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pk_blocks() {
        assert_eq!(Partition::pk(2).unwrap(), p("P(0,4){1' 4' | 2' 3'}"));
        assert_eq!(Partition::pk(1).unwrap(), Partition::cup());
        assert_eq!(Partition::pk(3).unwrap(), p("P(0,6){1' 6' | 2' 3' | 4' 5'}"));
    }

    #[test]
    fn composition_examples() {
        let (e, loops) = Partition::cap().compose(&Partition::cup()).unwrap();
        assert_eq!((e, loops), (p("P(0,0){}"), 1));
        let q = p("P(3,2){1 2 | 3 1' | 2'}");
        assert_eq!(Partition::identity(2).compose(&q).unwrap(), (q.clone(), 0));
        assert_eq!(q.compose(&Partition::identity(3)).unwrap(), (q, 0));
        let b = Partition::block(2, 2);
        assert_eq!(b.compose(&b).unwrap(), (b, 0));
        assert!(Partition::cap().compose(&Partition::identity(1)).is_err());
        // snake identity
        let left = Partition::identity(1).tensor(&Partition::cap());
        let right = Partition::cup().tensor(&Partition::identity(1));
        assert_eq!(left.compose(&right).unwrap(), (Partition::identity(1), 0));
        // cross ∘ cross = id
        assert_eq!(Partition::cross().compose(&Partition::cross()).unwrap(), (Partition::identity(2), 0));
    }

    #[test]
    fn tensor_adjoint_rotate() {
        assert_eq!(Partition::identity(1).tensor(&Partition::identity(1)), Partition::identity(2));
        assert_eq!(Partition::cap().adjoint(), Partition::cup());
        let r = Partition::merge().rotate(Side::Right, Row::Upper).unwrap();
        assert_eq!(r, Partition::fork());
        assert_eq!(r.rotate(Side::Right, Row::Lower).unwrap(), Partition::merge());
        assert!(Partition::cup().rotate(Side::Left, Row::Upper).is_err());
        // rotating ∩ ⊗ ∩ around the left corner gives p_2
        let two = Partition::cap().tensor(&Partition::cap());
        let mut r = two;
        for _ in 0..3 {
            r = r.rotate(Side::Right, Row::Upper).unwrap();
        }
        r = r.rotate(Side::Left, Row::Upper).unwrap();
        assert_eq!(r.arity(), (0, 4));
        assert_eq!(r, Partition::pk(2).unwrap());
    }

    pub(crate) fn arb_partition(k: usize, l: usize) -> impl Strategy<Value = Partition> {
        prop::collection::vec(0usize..(k + l).max(1), k + l)
            .prop_map(move |labels| Partition::from_labels(k, l, &labels).unwrap())
    }

    proptest! {
        #[test]
        fn adjoint_is_involution(q in (0usize..4, 0usize..4).prop_flat_map(|(k, l)| arb_partition(k, l))) {
            prop_assert_eq!(q.adjoint().adjoint(), q);
        }

        #[test]
        fn tensor_is_associative(a in arb_partition(1, 2), b in arb_partition(2, 1), c in arb_partition(1, 1)) {
            prop_assert_eq!(a.tensor(&b).tensor(&c), a.tensor(&b.tensor(&c)));
        }

        #[test]
        fn composition_is_associative(a in arb_partition(2, 2), b in arb_partition(2, 3), c in arb_partition(3, 1)) {
            let (ab, l1) = b.compose(&a).unwrap();
            let (abc, l2) = c.compose(&ab).unwrap();
            let (bc, l3) = c.compose(&b).unwrap();
            let (abc2, l4) = bc.compose(&a).unwrap();
            prop_assert_eq!(abc, abc2);
            prop_assert_eq!(l1 + l2, l3 + l4);
        }

        #[test]
        fn adjoint_reverses_composition(a in arb_partition(2, 3), b in arb_partition(3, 2)) {
            let (ba, loops) = b.compose(&a).unwrap();
            let (ab, loops2) = a.adjoint().compose(&b.adjoint()).unwrap();
            prop_assert_eq!(ba.adjoint(), ab);
            prop_assert_eq!(loops, loops2);
        }

        #[test]
        fn outputs_are_canonical(a in arb_partition(2, 2), b in arb_partition(2, 2)) {
            let (c, _) = b.compose(&a).unwrap();
            let relabeled = Partition::from_labels(c.k(), c.l(), c.labels()).unwrap();
            prop_assert_eq!(&c, &relabeled);
            prop_assert_eq!(Partition::parse(&c.to_string()).unwrap(), c);
        }
    }
}

//! Bounded partitions and vertical strips.
//!
//! A [`Partition`] is stored zero-trimmed; padded views of length `n` or
//! `n + 1` are produced on demand. The lattice `Λ^{(n,m)}` of partitions with
//! at most `n` parts, each at most `m`, is enumerated by [`enumerate_lattice`]
//! in a fixed order: by weight, ties broken by descending lexicographic order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Weakly decreasing sequence of positive integers (trailing zeros removed).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// Builds a partition from a weakly decreasing sequence; zeros anywhere
    /// after the last positive part are dropped.
    pub fn new(parts: impl Into<Vec<usize>>) -> Result<Self> {
        let mut parts = parts.into();
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    /// The rectangle `k^r`.
    pub fn rectangle(k: usize, r: usize) -> Self {
        if k == 0 {
            return Partition::empty();
        }
        Partition(vec![k; r])
    }

    /// The column `1^r`.
    pub fn column(r: usize) -> Self {
        Self::rectangle(1, r)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// The `j`-th part (1-based), zero beyond the length.
    pub fn part(&self, j: usize) -> usize {
        debug_assert!(j >= 1);
        self.0.get(j - 1).copied().unwrap_or(0)
    }

    /// Parts padded with zeros to exactly `len` entries.
    ///
    /// Panics if the partition has more than `len` parts.
    pub fn padded(&self, len: usize) -> Vec<usize> {
        assert!(self.0.len() <= len, "{self} does not fit into {len} parts");
        let mut v = self.0.clone();
        v.resize(len, 0);
        v
    }

    /// Largest part, which is the degree `d_μ` on the reduced lattice.
    pub fn degree(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn fits_in_box(&self, n: usize, m: usize) -> bool {
        self.len() <= n && self.degree() <= m
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Accepts `()`, `(2,1)`, `2,1`, `2 1` and the empty string.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = match (s.strip_prefix('('), s.strip_suffix(')')) {
            (Some(_), Some(_)) if s.len() >= 2 => &s[1..s.len() - 1],
            (None, None) => s,
            _ => return Err(Error::Parse(format!("unbalanced parentheses in {s:?}"))),
        };
        let parts = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad part {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// 0/1 vector of length `n + 1` describing a vertical strip.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StripMask(Vec<u8>);

impl StripMask {
    pub fn new(bits: impl Into<Vec<u8>>) -> Result<Self> {
        let bits = bits.into();
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!("{bits:?} is not a 0/1 mask")));
        }
        let r: usize = bits.iter().map(|&b| b as usize).sum();
        if r == 0 {
            return Err(Error::InvalidArgument("empty strip".into()));
        }
        Ok(StripMask(bits))
    }

    /// Mask with ones exactly at the (1-based) positions in `set`.
    pub fn from_subset(set: &[usize], len: usize) -> Result<Self> {
        let mut bits = vec![0u8; len];
        for &j in set {
            if j == 0 || j > len {
                return Err(Error::InvalidArgument(format!("index {j} outside 1..={len}")));
            }
            bits[j - 1] = 1;
        }
        StripMask::new(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    /// `θ_j` with 1-based index.
    pub fn get(&self, j: usize) -> i64 {
        self.0[j - 1] as i64
    }

    /// The complementary strip `θ^c` with `θ + θ^c = 1^{n+1}`.
    ///
    /// Returns `None` for the full mask, whose complement is empty.
    pub fn complement(&self) -> Option<StripMask> {
        let bits: Vec<u8> = self.0.iter().map(|&b| 1 - b).collect();
        StripMask::new(bits).ok()
    }

    /// 1-based positions of the ones.
    pub fn subset(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

impl fmt::Display for StripMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "[{}]", s.join(""))
    }
}

/// `Λ^{(n,m)}` in its canonical order together with the reverse index.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    n: usize,
    m: usize,
    order: Vec<Partition>,
    index: HashMap<Partition, usize>,
}

impl LatticeBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.order
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.order[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.index.contains_key(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Partition)> {
        self.order.iter().enumerate()
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All partitions with at most `n` parts, each at most `m`.
pub fn enumerate_lattice(n: usize, m: usize) -> Result<LatticeBasis> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidParameter(format!(
            "lattice needs n >= 1 and m >= 1, got n = {n}, m = {m}"
        )));
    }
    let mut order = Vec::with_capacity(binomial(n + m, n));
    let mut current = Vec::with_capacity(n);
    fill_box(n, m, &mut current, &mut order);
    order.sort_by(|a, b| a.weight().cmp(&b.weight()).then_with(|| b.parts().cmp(a.parts())));
    let index = order.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    Ok(LatticeBasis { n, m, order, index })
}

fn fill_box(slots: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    out.push(Partition(current.clone()));
    if slots == 0 {
        return;
    }
    for x in 1..=max {
        current.push(x);
        fill_box(slots - 1, x, current, out);
        current.pop();
    }
}

/// `μ ↦ (μ_1 − μ_{n+1}, …, μ_n − μ_{n+1})`.
pub fn reduce(mu: &Partition, n: usize) -> Result<Partition> {
    if mu.len() > n + 1 {
        return Err(Error::InvalidArgument(format!(
            "{mu} has more than n + 1 = {} parts",
            n + 1
        )));
    }
    let last = mu.part(n + 1);
    Ok(Partition(
        mu.parts()
            .iter()
            .take(n)
            .map(|&x| x - last)
            .filter(|&x| x > 0)
            .collect(),
    ))
}

/// All `C(n+1, r)` masks of length `n + 1` with exactly `r` ones, in
/// lexicographically decreasing bit order.
pub fn strips(r: usize, n: usize) -> Result<Vec<StripMask>> {
    if r < 1 || r > n + 1 {
        return Err(Error::InvalidArgument(format!(
            "strip size {r} outside 1..={}",
            n + 1
        )));
    }
    let len = n + 1;
    let mut out = Vec::with_capacity(binomial(len, r));
    let mut bits = vec![0u8; len];
    choose(0, r, &mut bits, &mut out);
    Ok(out)
}

fn choose(pos: usize, left: usize, bits: &mut Vec<u8>, out: &mut Vec<StripMask>) {
    if left == 0 {
        out.push(StripMask(bits.clone()));
        return;
    }
    if bits.len() - pos < left {
        return;
    }
    bits[pos] = 1;
    choose(pos + 1, left - 1, bits, out);
    bits[pos] = 0;
    choose(pos + 1, left, bits, out);
}

/// Result of adding a strip: the composition `μ = λ + θ` of length `n + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripSum {
    pub composition: Vec<usize>,
    pub dominant: bool,
}

impl StripSum {
    /// The partition `μ` when the sum is dominant.
    pub fn partition(&self) -> Option<Partition> {
        self.dominant.then(|| {
            let mut v = self.composition.clone();
            while v.last() == Some(&0) {
                v.pop();
            }
            Partition(v)
        })
    }

    /// `reduce(μ)` for dominant sums.
    pub fn reduced(&self) -> Option<Partition> {
        self.dominant.then(|| {
            let last = *self.composition.last().unwrap_or(&0);
            let n = self.composition.len().saturating_sub(1);
            Partition::new(self.composition[..n].iter().map(|&x| x - last).collect::<Vec<_>>())
                .expect("dominant composition reduces to a partition")
        })
    }
}

/// `μ_j = λ_j + θ_j` with `λ` padded to the mask length.
pub fn add_strip(lambda: &Partition, theta: &StripMask) -> Result<StripSum> {
    if lambda.len() > theta.len() {
        return Err(Error::InvalidArgument(format!(
            "{lambda} has more parts than the strip length {}",
            theta.len()
        )));
    }
    let composition: Vec<usize> = lambda
        .padded(theta.len())
        .into_iter()
        .zip(theta.bits())
        .map(|(l, &t)| l + t as usize)
        .collect();
    let dominant = composition.windows(2).all(|w| w[0] >= w[1]);
    Ok(StripSum { composition, dominant })
}

/// The `sl(n+1)` dominance order on `Λ^{(n)}`: `λ ≤ μ` iff for every
/// `r = 1..n` the quantity `Σ_{j≤r}(λ_j − μ_j) − r(|λ| − |μ|)/(n+1)` is a
/// nonpositive integer.
pub fn dominance_leq(lambda: &Partition, mu: &Partition, n: usize) -> Result<bool> {
    if lambda.len() > n || mu.len() > n {
        return Err(Error::InvalidArgument(format!(
            "{lambda} or {mu} has more than n = {n} parts"
        )));
    }
    let np1 = (n + 1) as i64;
    let dw = lambda.weight() as i64 - mu.weight() as i64;
    let mut partial = 0i64;
    for r in 1..=n {
        partial += lambda.part(r) as i64 - mu.part(r) as i64;
        // (n+1) times the defining quantity, kept in integers.
        let scaled = np1 * partial - r as i64 * dw;
        if scaled % np1 != 0 || scaled > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classical dominance on partitions of equal weight (any length).
pub fn classical_dominance_leq(lambda: &Partition, mu: &Partition) -> bool {
    if lambda.weight() != mu.weight() {
        return false;
    }
    let len = lambda.len().max(mu.len());
    let (mut a, mut b) = (0usize, 0usize);
    for j in 1..=len {
        a += lambda.part(j);
        b += mu.part(j);
        if a > b {
            return false;
        }
    }
    true
}

/// Minimal column size `r_μ = min{j : μ_j > μ_{j+1}}`, with `r_0 = 0`.
pub fn min_column(mu: &Partition, n: usize) -> usize {
    (1..=n).find(|&j| mu.part(j) > mu.part(j + 1)).unwrap_or(0)
}

/// Dominant weight coordinates `l ↦ λ` with `λ_j = l_j + … + l_n`.
pub fn weight_to_partition(l: &[usize]) -> Partition {
    let mut parts: Vec<usize> = l
        .iter()
        .rev()
        .scan(0usize, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    parts.reverse();
    Partition::new(parts).expect("suffix sums are weakly decreasing")
}

/// Inverse of [`weight_to_partition`]: `l_r = λ_r − λ_{r+1}` for `r = 1..n`.
pub fn partition_to_weight(lambda: &[usize], n: usize) -> Result<Vec<usize>> {
    if lambda.len() > n || lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(format!(
            "{lambda:?} is not a partition with at most {n} parts"
        )));
    }
    let mut padded = lambda.to_vec();
    padded.resize(n + 1, 0);
    Ok(padded.windows(2).map(|w| w[0] - w[1]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_lattices() {
        let b = enumerate_lattice(1, 1).unwrap();
        assert_eq!(b.partitions(), &[p(&[]), p(&[1])]);
        let b = enumerate_lattice(2, 1).unwrap();
        assert_eq!(b.partitions(), &[p(&[]), p(&[1]), p(&[1, 1])]);
        let b = enumerate_lattice(2, 2).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(
            b.partitions(),
            &[p(&[]), p(&[1]), p(&[2]), p(&[1, 1]), p(&[2, 1]), p(&[2, 2])]
        );
    }

    #[test]
    fn lattice_sizes_are_binomial() {
        for n in 1..=6 {
            for m in 1..=6 {
                let b = enumerate_lattice(n, m).unwrap();
                assert_eq!(b.len(), binomial(n + m, n), "n={n} m={m}");
                for (i, lam) in b.iter() {
                    assert_eq!(b.index_of(lam), Some(i));
                    assert!(lam.fits_in_box(n, m));
                }
            }
        }
    }

    #[test]
    fn enumerate_rejects_zero() {
        assert!(matches!(enumerate_lattice(0, 2), Err(Error::InvalidParameter(_))));
        assert!(matches!(enumerate_lattice(2, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&p(&[2, 1, 1]), 2).unwrap(), p(&[1]));
        assert_eq!(reduce(&p(&[1, 1]), 1).unwrap(), p(&[]));
        assert_eq!(reduce(&p(&[3, 1]), 2).unwrap(), p(&[3, 1]));
        assert!(reduce(&p(&[1, 1, 1, 1]), 2).is_err());
    }

    #[test]
    fn strip_examples() {
        let s = strips(1, 1).unwrap();
        assert_eq!(s.iter().map(|m| m.bits().to_vec()).collect::<Vec<_>>(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(strips(2, 2).unwrap().len(), 3);
        let full = strips(4, 3).unwrap();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].bits(), &[1, 1, 1, 1]);
        assert!(strips(0, 2).is_err());
        assert!(strips(4, 2).is_err());
        for n in 1..6 {
            for r in 1..=n + 1 {
                assert_eq!(strips(r, n).unwrap().len(), binomial(n + 1, r));
            }
        }
    }

    #[test]
    fn add_strip_examples() {
        let t10 = StripMask::new(vec![1, 0]).unwrap();
        let t01 = StripMask::new(vec![0, 1]).unwrap();
        let s = add_strip(&p(&[]), &t10).unwrap();
        assert_eq!(s.composition, vec![1, 0]);
        assert!(s.dominant);
        let s = add_strip(&p(&[]), &t01).unwrap();
        assert_eq!(s.composition, vec![0, 1]);
        assert!(!s.dominant);
        let s = add_strip(&p(&[1]), &t01).unwrap();
        assert_eq!(s.composition, vec![1, 1]);
        assert!(s.dominant);
        assert_eq!(s.reduced(), Some(p(&[])));
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_leq(&p(&[1, 1]), &p(&[2]), 2).unwrap());
        assert!(!dominance_leq(&p(&[2]), &p(&[1, 1]), 2).unwrap());
        assert!(!dominance_leq(&p(&[]), &p(&[1]), 1).unwrap());
        assert!(dominance_leq(&p(&[2, 1]), &p(&[2, 1]), 2).unwrap());
        assert!(dominance_leq(&p(&[1, 1, 1]), &p(&[2, 1]), 2).is_err());
    }

    #[test]
    fn dominance_is_partial_order_on_2_2() {
        let b = enumerate_lattice(2, 2).unwrap();
        let leq = |a: &Partition, c: &Partition| dominance_leq(a, c, 2).unwrap();
        for x in b.partitions() {
            assert!(leq(x, x));
            for y in b.partitions() {
                if leq(x, y) && leq(y, x) {
                    assert_eq!(x, y);
                }
                if leq(x, y) {
                    assert_eq!((x.weight() + 3 - y.weight() % 3) % 3, 0, "{x} {y}");
                }
                for z in b.partitions() {
                    if leq(x, y) && leq(y, z) {
                        assert!(leq(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn min_column_examples() {
        assert_eq!(min_column(&p(&[2, 2, 1]), 3), 2);
        assert_eq!(min_column(&p(&[]), 3), 0);
        assert_eq!(min_column(&p(&[1, 1]), 2), 2);
    }

    #[test]
    fn column_removal_stays_in_lattice() {
        for (n, m) in [(2, 2), (3, 2), (2, 3), (4, 3)] {
            let b = enumerate_lattice(n, m).unwrap();
            for mu in b.partitions().iter().filter(|mu| !mu.is_empty()) {
                let r = min_column(mu, n);
                let lam: Vec<usize> = mu.padded(n).iter().enumerate().map(|(j, &x)| if j < r { x - 1 } else { x }).collect();
                let lam = Partition::new(lam).unwrap();
                assert!(b.contains(&lam), "{mu} -> {lam}");
            }
        }
    }

    #[test]
    fn weight_bijection_examples() {
        assert_eq!(weight_to_partition(&[1, 0]), p(&[1]));
        assert_eq!(weight_to_partition(&[0, 1]), p(&[1, 1]));
        for lam in enumerate_lattice(3, 3).unwrap().partitions() {
            let l = partition_to_weight(lam.parts(), 3).unwrap();
            assert_eq!(&weight_to_partition(&l), lam);
        }
        assert!(partition_to_weight(&[1, 2], 2).is_err());
        assert!(partition_to_weight(&[1, 1, 1], 2).is_err());
    }

    #[test]
    fn parse_partitions() {
        assert_eq!("()".parse::<Partition>().unwrap(), p(&[]));
        assert_eq!("(2,1,0)".parse::<Partition>().unwrap(), p(&[2, 1]));
        assert_eq!(" 3 3 1 ".parse::<Partition>().unwrap(), p(&[3, 3, 1]));
        assert!("(1,2)".parse::<Partition>().is_err());
        assert!("(1".parse::<Partition>().is_err());
        assert!("(a)".parse::<Partition>().is_err());
    }

    #[test]
    fn strip_complement() {
        let t = StripMask::new(vec![1, 0, 1]).unwrap();
        assert_eq!(t.complement().unwrap().bits(), &[0, 1, 0]);
        assert!(StripMask::new(vec![1, 1]).unwrap().complement().is_none());
        assert_eq!(StripMask::from_subset(&[1, 3], 3).unwrap(), t);
        assert_eq!(t.subset(), vec![1, 3]);
    }
}

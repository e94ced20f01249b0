//! Lazily evaluated words over a chair alphabet.
//!
//! A [`WordExpr`] is an immutable DAG of word-building nodes. Every node caches
//! its exact length and per-chair histogram, so lengths of words far beyond
//! 64 bits are available without expanding anything, and [`WordExpr::at`]
//! answers random-access queries by rank/select descent through the cached
//! histograms.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::chairset::{narrow, ChairSet};
use super::error::{WordError, WordResult};
use super::Chair;

/// Maximum nesting depth of an expression.
pub const MAX_DEPTH: usize = 10_000;

/// Default cap on letters produced by [`WordExpr::materialize`].
pub const DEFAULT_MATERIALIZE_CAP: usize = 1_000_000;

/// How indices past the end of a word are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Index must lie in `0..len`.
    Linear,
    /// Index is reduced modulo `len`.
    Cyclic,
}

/// Injective map on chairs, `image[c - 1]` is the new name of chair `c`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Relabeling {
    image: Vec<Chair>,
}

impl Relabeling {
    pub fn new(image: Vec<Chair>) -> WordResult<Self> {
        let mut seen = HashSet::with_capacity(image.len());
        for &c in &image {
            if c == 0 {
                return Err(WordError::BadChair {
                    chair: 0,
                    m: u32::MAX,
                });
            }
            if !seen.insert(c) {
                return Err(WordError::NotInjective { chair: c });
            }
        }
        Ok(Relabeling { image })
    }

    /// `c -> c + delta` on chairs `1..=domain`.
    pub fn shift(domain: u32, delta: i64) -> WordResult<Self> {
        let image = (1..=domain)
            .map(|c| {
                let t = c as i64 + delta;
                if t < 1 || t > u32::MAX as i64 {
                    Err(WordError::BadChair {
                        chair: t,
                        m: u32::MAX,
                    })
                } else {
                    Ok(t as Chair)
                }
            })
            .collect::<WordResult<Vec<_>>>()?;
        Ok(Relabeling { image })
    }

    pub fn domain(&self) -> u32 {
        self.image.len() as u32
    }

    pub fn image(&self) -> &[Chair] {
        &self.image
    }

    pub fn apply(&self, chair: Chair) -> Option<Chair> {
        self.image.get((chair as usize).checked_sub(1)?).copied()
    }

    /// The common offset when this map is a shift.
    pub fn as_shift(&self) -> Option<i64> {
        let d = *self.image.first()? as i64 - 1;
        self.image
            .iter()
            .enumerate()
            .all(|(i, &c)| c as i64 == i as i64 + 1 + d)
            .then_some(d)
    }

    fn preimage(&self, keep: &ChairSet) -> ChairSet {
        self.image
            .iter()
            .enumerate()
            .filter(|(_, &c)| keep.contains(c))
            .map(|(i, _)| i as Chair + 1)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum Node {
    Literal(Arc<[Chair]>),
    Concat(Vec<WordExpr>),
    Power {
        base: WordExpr,
        exponent: BigUint,
    },
    /// `c ⊗ w`: the chair alternates with successive letters of `w`.
    Interleave {
        chair: Chair,
        base: WordExpr,
    },
    /// Delete every letter outside `keep`.
    Restrict {
        base: WordExpr,
        keep: ChairSet,
    },
    Relabel {
        base: WordExpr,
        map: Relabeling,
    },
}

struct Inner {
    node: Node,
    len: BigUint,
    /// `hist[c - 1]` counts occurrences of chair `c`; trailing zeros trimmed.
    hist: Vec<BigUint>,
    depth: usize,
}

/// Immutable, cheaply clonable word expression.
#[derive(Clone)]
pub struct WordExpr(Arc<Inner>);

fn trim(mut hist: Vec<BigUint>) -> Vec<BigUint> {
    while hist.last().is_some_and(Zero::is_zero) {
        hist.pop();
    }
    hist
}

fn add_hist(acc: &mut Vec<BigUint>, other: &[BigUint], times: &BigUint) {
    if acc.len() < other.len() {
        acc.resize(other.len(), BigUint::zero());
    }
    for (a, o) in acc.iter_mut().zip(other) {
        *a += o * times;
    }
}

impl WordExpr {
    fn make(node: Node, len: BigUint, hist: Vec<BigUint>, depth: usize) -> WordResult<Self> {
        if depth > MAX_DEPTH {
            return Err(WordError::DepthCap { cap: MAX_DEPTH });
        }
        Ok(WordExpr(Arc::new(Inner {
            node,
            len,
            hist: trim(hist),
            depth,
        })))
    }

    pub fn literal(chairs: &[Chair]) -> WordResult<Self> {
        if chairs.is_empty() {
            return Err(WordError::EmptyLiteral);
        }
        let max = *chairs.iter().max().unwrap();
        if chairs.contains(&0) {
            return Err(WordError::BadChair { chair: 0, m: max });
        }
        let mut hist = vec![BigUint::zero(); max as usize];
        for &c in chairs {
            hist[c as usize - 1] += 1u32;
        }
        Self::make(Node::Literal(chairs.into()), chairs.len().into(), hist, 1)
    }

    pub fn concat(parts: Vec<WordExpr>) -> WordResult<Self> {
        if parts.is_empty() {
            return Err(WordError::EmptyConcat);
        }
        let mut len = BigUint::zero();
        let mut hist = Vec::new();
        let one = BigUint::one();
        for p in &parts {
            len += p.len();
            add_hist(&mut hist, &p.0.hist, &one);
        }
        let depth = 1 + parts.iter().map(|p| p.0.depth).max().unwrap();
        Self::make(Node::Concat(parts), len, hist, depth)
    }

    pub fn power(base: WordExpr, exponent: impl Into<BigUint>) -> WordResult<Self> {
        let exponent = exponent.into();
        if exponent.is_zero() {
            return Err(WordError::ZeroExponent);
        }
        let len = base.len() * &exponent;
        let mut hist = Vec::new();
        add_hist(&mut hist, &base.0.hist, &exponent);
        let depth = base.0.depth + 1;
        Self::make(Node::Power { base, exponent }, len, hist, depth)
    }

    pub fn interleave(chair: Chair, base: WordExpr) -> WordResult<Self> {
        if chair == 0 {
            return Err(WordError::BadChair {
                chair: 0,
                m: u32::MAX,
            });
        }
        let len = base.len() * 2u32;
        let mut hist = base.0.hist.clone();
        if hist.len() < chair as usize {
            hist.resize(chair as usize, BigUint::zero());
        }
        hist[chair as usize - 1] += base.len();
        let depth = base.0.depth + 1;
        Self::make(Node::Interleave { chair, base }, len, hist, depth)
    }

    pub fn restrict(base: WordExpr, keep: ChairSet) -> WordResult<Self> {
        if keep.iter().any(|c| c == 0) {
            return Err(WordError::BadChair {
                chair: 0,
                m: u32::MAX,
            });
        }
        let hist: Vec<BigUint> = base
            .0
            .hist
            .iter()
            .enumerate()
            .map(|(i, h)| {
                if keep.contains(i as Chair + 1) {
                    h.clone()
                } else {
                    BigUint::zero()
                }
            })
            .collect();
        let len: BigUint = hist.iter().sum();
        if len.is_zero() {
            return Err(WordError::EmptyRestriction);
        }
        let depth = base.0.depth + 1;
        Self::make(Node::Restrict { base, keep }, len, hist, depth)
    }

    pub fn relabel(base: WordExpr, map: Relabeling) -> WordResult<Self> {
        let mut hist = Vec::new();
        for (i, h) in base.0.hist.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            let c = i as Chair + 1;
            let to = map.apply(c).ok_or(WordError::UnmappedChair { chair: c })?;
            if hist.len() < to as usize {
                hist.resize(to as usize, BigUint::zero());
            }
            hist[to as usize - 1] = h.clone();
        }
        let len = base.len().clone();
        let depth = base.0.depth + 1;
        Self::make(Node::Relabel { base, map }, len, hist, depth)
    }

    /// Relabel every chair `c` to `c + delta`.
    pub fn shift(base: WordExpr, delta: i64) -> WordResult<Self> {
        let map = Relabeling::shift(base.max_chair(), delta)?;
        Self::relabel(base, map)
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn len(&self) -> &BigUint {
        &self.0.len
    }

    /// Words are never empty; provided for clippy's sake.
    pub fn is_empty(&self) -> bool {
        self.0.len.is_zero()
    }

    pub fn depth(&self) -> usize {
        self.0.depth
    }

    /// Occurrences per chair, `histogram()[c - 1]` for chair `c`.
    pub fn histogram(&self) -> &[BigUint] {
        &self.0.hist
    }

    pub fn count(&self, chair: Chair) -> BigUint {
        if chair == 0 {
            return BigUint::zero();
        }
        self.0
            .hist
            .get(chair as usize - 1)
            .cloned()
            .unwrap_or_default()
    }

    /// Largest chair occurring in the word.
    pub fn max_chair(&self) -> Chair {
        self.0.hist.len() as Chair
    }

    pub fn chairs(&self) -> ChairSet {
        self.0
            .hist
            .iter()
            .enumerate()
            .filter(|(_, h)| !h.is_zero())
            .map(|(i, _)| i as Chair + 1)
            .collect()
    }

    /// True iff every chair of `1..=m` occurs.
    pub fn is_full(&self, m: u32) -> bool {
        (1..=m).all(|c| !self.count(c).is_zero())
    }

    pub fn ptr_eq(&self, other: &WordExpr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// The letter at `index`.
    pub fn at(&self, index: &BigUint, mode: Mode) -> WordResult<Chair> {
        let reduced;
        let index = match mode {
            Mode::Linear => {
                if index >= self.len() {
                    return Err(WordError::OutOfRange {
                        index: index.clone(),
                        len: self.len().clone(),
                    });
                }
                index
            }
            Mode::Cyclic => {
                reduced = index % self.len();
                &reduced
            }
        };
        Ok(self.locate(None, index).1)
    }

    /// Convenience wrapper for small indices.
    pub fn at_u64(&self, index: u64, mode: Mode) -> WordResult<Chair> {
        self.at(&BigUint::from(index), mode)
    }

    /// Number of letters in `keep` (all letters for `None`).
    fn kept(&self, keep: Option<&ChairSet>) -> BigUint {
        match keep {
            None => self.len().clone(),
            Some(k) => k.iter().map(|c| self.count(c)).sum(),
        }
    }

    /// Number of letters in `keep` among the first `j` letters.
    fn rank(&self, keep: Option<&ChairSet>, j: &BigUint) -> BigUint {
        if j.is_zero() {
            return BigUint::zero();
        }
        if j >= self.len() {
            return self.kept(keep);
        }
        match &self.0.node {
            Node::Literal(s) => {
                let j = j.to_usize().unwrap();
                s[..j]
                    .iter()
                    .filter(|&&c| keep.is_none_or(|k| k.contains(c)))
                    .count()
                    .into()
            }
            Node::Concat(parts) => {
                let mut acc = BigUint::zero();
                let mut rest = j.clone();
                for p in parts {
                    if &rest >= p.len() {
                        acc += p.kept(keep);
                        rest -= p.len();
                    } else {
                        acc += p.rank(keep, &rest);
                        break;
                    }
                }
                acc
            }
            Node::Power { base, .. } => {
                let (q, r) = j.div_rem(base.len());
                q * base.kept(keep) + base.rank(keep, &r)
            }
            Node::Interleave { chair, base } => {
                let (full, rem) = j.div_rem(&BigUint::from(2u32));
                let with_chair = keep.is_none_or(|k| k.contains(*chair));
                let mut acc = base.rank(keep, &full);
                if with_chair {
                    acc += full + rem;
                }
                acc
            }
            Node::Restrict { base, keep: b } => {
                let inner = narrow(keep, b);
                // raw position in `base` of the j-th surviving letter
                let pos = base.locate(Some(b), j).0;
                base.rank(Some(&inner), &pos)
            }
            Node::Relabel { base, map } => {
                let pre = keep.map(|k| map.preimage(k));
                base.rank(pre.as_ref(), j)
            }
        }
    }

    /// Raw position and chair of the `i`-th letter in `keep`; requires
    /// `i < kept(keep)`.
    fn locate(&self, keep: Option<&ChairSet>, i: &BigUint) -> (BigUint, Chair) {
        match &self.0.node {
            Node::Literal(s) => {
                let mut left = i.to_usize().unwrap();
                for (p, &c) in s.iter().enumerate() {
                    if keep.is_none_or(|k| k.contains(c)) {
                        if left == 0 {
                            return (p.into(), c);
                        }
                        left -= 1;
                    }
                }
                unreachable!("locate past the kept letters of a literal")
            }
            Node::Concat(parts) => {
                let mut offset = BigUint::zero();
                let mut rest = i.clone();
                for p in parts {
                    let k = p.kept(keep);
                    if rest < k {
                        let (pos, c) = p.locate(keep, &rest);
                        return (offset + pos, c);
                    }
                    rest -= k;
                    offset += p.len();
                }
                unreachable!("locate past the kept letters of a concatenation")
            }
            Node::Power { base, .. } => {
                let per = base.kept(keep);
                let (q, r) = i.div_rem(&per);
                let (pos, c) = base.locate(keep, &r);
                (q * base.len() + pos, c)
            }
            Node::Interleave { chair, base } => {
                let with_chair = keep.is_none_or(|k| k.contains(*chair));
                if !with_chair {
                    let (pos, c) = base.locate(keep, i);
                    return (pos * 2u32 + 1u32, c);
                }
                // kept letters in the first t (chair, letter) pairs
                let pairs = |t: &BigUint| t + base.rank(keep, t);
                let mut lo = BigUint::one();
                let mut hi = base.len().clone();
                while lo < hi {
                    let mid = (&lo + &hi) >> 1;
                    if &pairs(&mid) > i {
                        hi = mid;
                    } else {
                        lo = mid + 1u32;
                    }
                }
                let t = lo - 1u32;
                let before = pairs(&t);
                if &before == i {
                    (t * 2u32, *chair)
                } else {
                    let c = base.locate(None, &t).1;
                    (t * 2u32 + 1u32, c)
                }
            }
            Node::Restrict { base, keep: b } => {
                let inner = narrow(keep, b);
                let (pos, c) = base.locate(Some(&inner), i);
                (base.rank(Some(b), &pos), c)
            }
            Node::Relabel { base, map } => {
                let pre = keep.map(|k| map.preimage(k));
                let (pos, c) = base.locate(pre.as_ref(), i);
                (pos, map.apply(c).expect("relabel covers every base chair"))
            }
        }
    }

    /// Expand the word, failing with [`WordError::TooLong`] beyond `cap` letters.
    pub fn materialize(&self, cap: usize) -> WordResult<Vec<Chair>> {
        if self.len() > &BigUint::from(cap) {
            return Err(WordError::TooLong(self.len().clone()));
        }
        let mut out = Vec::with_capacity(self.len().to_usize().unwrap());
        self.emit(&mut out, cap);
        Ok(out)
    }

    /// Append the letters of `self`; `self.len() <= cap` holds on entry.
    fn emit(&self, out: &mut Vec<Chair>, cap: usize) {
        match &self.0.node {
            Node::Literal(s) => out.extend_from_slice(s),
            Node::Concat(parts) => parts.iter().for_each(|p| p.emit(out, cap)),
            Node::Power { base, exponent } => {
                let start = out.len();
                base.emit(out, cap);
                let end = out.len();
                for _ in 1..exponent.to_usize().unwrap() {
                    out.extend_from_within(start..end);
                }
            }
            Node::Interleave { chair, base } => {
                let mut inner = Vec::new();
                base.emit(&mut inner, cap);
                for c in inner {
                    out.push(*chair);
                    out.push(c);
                }
            }
            Node::Restrict { base, keep } => {
                if base.len() <= &BigUint::from(cap.saturating_mul(4)) {
                    let mut inner = Vec::new();
                    base.emit(&mut inner, usize::MAX);
                    out.extend(inner.into_iter().filter(|&c| keep.contains(c)));
                } else {
                    let mut i = BigUint::zero();
                    while &i < self.len() {
                        out.push(self.locate(None, &i).1);
                        i += 1u32;
                    }
                }
            }
            Node::Relabel { base, map } => {
                let start = out.len();
                base.emit(out, cap);
                for c in &mut out[start..] {
                    *c = map.apply(*c).unwrap();
                }
            }
        }
    }

    /// Structural equality after flattening nested concatenations, merging
    /// adjacent literals, and collapsing nested powers.
    pub fn structurally_equal(&self, other: &WordExpr) -> bool {
        let mut memo = HashSet::new();
        structural_eq(self, other, &mut memo)
    }

    /// Letter-for-letter comparison when both words fit `cap`, structural
    /// comparison otherwise.
    pub fn same_word(&self, other: &WordExpr, cap: usize) -> bool {
        if self.len() != other.len() || self.histogram() != other.histogram() {
            return false;
        }
        match (self.materialize(cap), other.materialize(cap)) {
            (Ok(a), Ok(b)) => a == b,
            _ => self.structurally_equal(other),
        }
    }
}

/// Normalized view of a node used for structural comparison.
enum View {
    Seq(Vec<Piece>),
    Power(WordExpr, BigUint),
    Interleave(Chair, WordExpr),
    Restrict(WordExpr, ChairSet),
    Relabel(WordExpr, Relabeling),
}

enum Piece {
    Letters(Vec<Chair>),
    Expr(WordExpr),
}

fn flatten_into(e: &WordExpr, out: &mut Vec<Piece>) {
    match e.node() {
        Node::Concat(parts) => parts.iter().for_each(|p| flatten_into(p, out)),
        Node::Literal(s) => match out.last_mut() {
            Some(Piece::Letters(prev)) => prev.extend_from_slice(s),
            _ => out.push(Piece::Letters(s.to_vec())),
        },
        _ => {
            let e = strip_unit_power(e);
            match e.node() {
                Node::Concat(_) | Node::Literal(_) => flatten_into(&e, out),
                _ => out.push(Piece::Expr(e)),
            }
        }
    }
}

fn strip_unit_power(e: &WordExpr) -> WordExpr {
    let mut e = e.clone();
    while let Node::Power { base, exponent } = e.node() {
        if !exponent.is_one() {
            break;
        }
        let b = base.clone();
        e = b;
    }
    e
}

fn view(e: &WordExpr) -> View {
    let e = strip_unit_power(e);
    match e.node() {
        Node::Literal(_) | Node::Concat(_) => {
            let mut pieces = Vec::new();
            flatten_into(&e, &mut pieces);
            View::Seq(pieces)
        }
        Node::Power { base, exponent } => {
            let mut base = base.clone();
            let mut exponent = exponent.clone();
            while let Node::Power {
                base: b,
                exponent: k,
            } = base.node()
            {
                exponent *= k;
                let next = b.clone();
                base = next;
            }
            View::Power(base, exponent)
        }
        Node::Interleave { chair, base } => View::Interleave(*chair, base.clone()),
        Node::Restrict { base, keep } => View::Restrict(base.clone(), keep.clone()),
        Node::Relabel { base, map } => View::Relabel(base.clone(), map.clone()),
    }
}

fn structural_eq(a: &WordExpr, b: &WordExpr, memo: &mut HashSet<(usize, usize)>) -> bool {
    if a.ptr_eq(b) || memo.contains(&(a.ptr_id(), b.ptr_id())) {
        return true;
    }
    if a.len() != b.len() || a.histogram() != b.histogram() {
        return false;
    }
    let eq = match (view(a), view(b)) {
        (View::Seq(x), View::Seq(y)) => {
            x.len() == y.len()
                && x.iter().zip(&y).all(|(p, q)| match (p, q) {
                    (Piece::Letters(s), Piece::Letters(t)) => s == t,
                    (Piece::Expr(s), Piece::Expr(t)) => structural_eq(s, t, memo),
                    _ => false,
                })
        }
        (View::Power(x, k), View::Power(y, l)) => k == l && structural_eq(&x, &y, memo),
        (View::Interleave(c, x), View::Interleave(d, y)) => c == d && structural_eq(&x, &y, memo),
        (View::Restrict(x, s), View::Restrict(y, t)) => {
            // only chairs present in the base matter
            let xs = x.chairs().intersection(&s);
            let ys = y.chairs().intersection(&t);
            xs == ys && structural_eq(&x, &y, memo)
        }
        (View::Relabel(x, s), View::Relabel(y, t)) => {
            let on = |m: &Relabeling, e: &WordExpr| {
                e.chairs().iter().map(|c| m.apply(c)).collect::<Vec<_>>()
            };
            on(&s, &x) == on(&t, &y) && structural_eq(&x, &y, memo)
        }
        _ => false,
    };
    if eq {
        memo.insert((a.ptr_id(), b.ptr_id()));
    }
    eq
}

impl PartialEq for WordExpr {
    fn eq(&self, other: &Self) -> bool {
        self.structurally_equal(other)
    }
}

impl fmt::Debug for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.node() {
            Node::Literal(s) if s.len() <= 16 => return write!(f, "lit{:?}", s),
            Node::Literal(_) => "lit",
            Node::Concat(_) => "concat",
            Node::Power { .. } => "pow",
            Node::Interleave { .. } => "inter",
            Node::Restrict { .. } => "restrict",
            Node::Relabel { .. } => "relabel",
        };
        write!(f, "{kind}(len={})", self.len())
    }
}

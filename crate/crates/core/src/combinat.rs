//! Labeled ordered set partitions with all blocks of size at least two,
//! their enumeration, the two total orders used to arrange them into a
//! collection, the `S_2 x S_n` action, and the end-data vanishing test.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Subsets of the ground set `{1, ..., n}` as bitmasks, bit `i-1` for element `i`.
pub type Mask = u16;

pub const MAX_GROUND: u8 = 16;

/// The ground set `{1, ..., n}`, `n <= 16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: u8,
}

impl GroundSet {
    pub fn new(n: u8) -> Result<Self> {
        if n == 0 {
            return Err(Error::UndefinedGroundSet);
        }
        if n > MAX_GROUND {
            return Err(Error::invalid(format!("ground set too large: {n} > {MAX_GROUND}")));
        }
        Ok(GroundSet { n })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Bitmask of the full set.
    pub fn full_mask(&self) -> Mask {
        if self.n == 16 {
            u16::MAX
        } else {
            (1u16 << self.n) - 1
        }
    }
}

/// Elements of a mask in increasing order, 1-based.
pub fn mask_elems(mask: Mask) -> impl Iterator<Item = u8> {
    (0..16u8).filter(move |i| mask & (1 << i) != 0).map(|i| i + 1)
}

pub fn mask_len(mask: Mask) -> u8 {
    mask.count_ones() as u8
}

/// Renders a mask as a sorted comma-joined element list, e.g. `1,3`.
pub fn mask_string(mask: Mask) -> String {
    mask_elems(mask).map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

/// One object of the collection: an ordered partition of the ground set into
/// blocks of size at least two, plus one label per block.
///
/// A single block encodes a line bundle; two or more blocks encode a torsion
/// sheaf supported on the corresponding product stratum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GhatObject {
    n: u8,
    blocks: Vec<Mask>,
    labels: Vec<u8>,
}

impl GhatObject {
    pub fn new(ground: GroundSet, blocks: Vec<Mask>, labels: Vec<u8>) -> Result<Self> {
        if blocks.is_empty() || blocks.len() != labels.len() {
            return Err(Error::invalid("blocks and labels must be nonempty and aligned"));
        }
        let mut seen: Mask = 0;
        for &b in &blocks {
            if mask_len(b) < 2 {
                return Err(Error::invalid("every block must have size >= 2"));
            }
            if b & seen != 0 {
                return Err(Error::invalid("blocks must be disjoint"));
            }
            seen |= b;
        }
        if seen != ground.full_mask() {
            return Err(Error::invalid("blocks must cover the ground set"));
        }
        for (&b, &a) in blocks.iter().zip(&labels) {
            if a == 0 || a >= mask_len(b) {
                return Err(Error::invalid("label out of range 1..=|block|-1"));
            }
        }
        Ok(GhatObject { n: ground.n(), blocks, labels })
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet { n: self.n }
    }

    pub fn blocks(&self) -> &[Mask] {
        &self.blocks
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Number of blocks; 1 means line bundle, >= 2 torsion.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_torsion(&self) -> bool {
        self.blocks.len() >= 2
    }

    pub fn block_sizes(&self) -> Vec<u8> {
        self.blocks.iter().map(|&b| mask_len(b)).collect()
    }

    /// The chain of proper prefix unions `N_1, N_1 u N_2, ...` cutting out the
    /// support stratum (empty for a line bundle).
    pub fn chain(&self) -> Vec<Mask> {
        let mut acc: Mask = 0;
        let mut out = Vec::new();
        for &b in &self.blocks[..self.blocks.len() - 1] {
            acc |= b;
            out.push(acc);
        }
        out
    }

    /// Canonical text form `N1|N2|...;a1,a2,...` with blocks as sorted element lists.
    pub fn to_text(&self) -> String {
        let blocks = self.blocks.iter().map(|&b| mask_string(b)).collect::<Vec<_>>().join("|");
        let labels = self.labels.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        format!("{blocks};{labels}")
    }

    pub fn from_text(ground: GroundSet, text: &str) -> Result<Self> {
        let (bs, ls) = text
            .split_once(';')
            .ok_or_else(|| Error::invalid(format!("malformed object text: {text}")))?;
        let mut blocks = Vec::new();
        for part in bs.split('|') {
            let mut mask: Mask = 0;
            for e in part.split(',') {
                let e: u8 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad element in {text}")))?;
                if e == 0 || e > ground.n() {
                    return Err(Error::invalid(format!("element {e} outside ground set")));
                }
                mask |= 1 << (e - 1);
            }
            blocks.push(mask);
        }
        let labels = ls
            .split(',')
            .map(|a| a.trim().parse::<u8>().map_err(|_| Error::invalid(format!("bad label in {text}"))))
            .collect::<Result<Vec<_>>>()?;
        GhatObject::new(ground, blocks, labels)
    }
}

impl fmt::Display for GhatObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct GhatObjectJson {
    blocks: Vec<Vec<u8>>,
    labels: Vec<u8>,
}

impl Serialize for GhatObject {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GhatObjectJson {
            blocks: self.blocks.iter().map(|&b| mask_elems(b).collect()).collect(),
            labels: self.labels.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GhatObject {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GhatObjectJson::deserialize(d)?;
        let mut n = 0u8;
        let mut blocks = Vec::new();
        for bl in &raw.blocks {
            let mut mask: Mask = 0;
            for &e in bl {
                if e == 0 || e > MAX_GROUND {
                    return Err(serde::de::Error::custom("element out of range"));
                }
                mask |= 1 << (e - 1);
                n = n.max(e);
            }
            blocks.push(mask);
        }
        let ground = GroundSet::new(n).map_err(serde::de::Error::custom)?;
        GhatObject::new(ground, blocks, raw.labels).map_err(serde::de::Error::custom)
    }
}

/// Enumerates the whole collection over `{1, ..., n}` in the canonical order
/// (lexicographic on block element lists, then labels). The length is the
/// number of fixed-point-free permutations of `n` letters.
pub fn enumerate_ghat(n: u8) -> Result<Vec<GhatObject>> {
    let ground = GroundSet::new(n)?;
    let mut out = Vec::new();
    let mut blocks = Vec::new();
    enumerate_blocks(ground.full_mask(), &mut blocks, &mut out, ground);
    out.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));
    Ok(out)
}

fn canonical_key(obj: &GhatObject) -> (Vec<Vec<u8>>, Vec<u8>) {
    (
        obj.blocks.iter().map(|&b| mask_elems(b).collect()).collect(),
        obj.labels.clone(),
    )
}

fn enumerate_blocks(remaining: Mask, blocks: &mut Vec<Mask>, out: &mut Vec<GhatObject>, ground: GroundSet) {
    if remaining == 0 {
        if blocks.is_empty() {
            return;
        }
        let mut labels = vec![1u8; blocks.len()];
        loop {
            out.push(GhatObject {
                n: ground.n(),
                blocks: blocks.clone(),
                labels: labels.clone(),
            });
            // odometer over 1..=k_i-1 per block
            let mut i = blocks.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if labels[i] + 1 < mask_len(blocks[i]) {
                    labels[i] += 1;
                    labels[i + 1..].fill(1);
                    break;
                }
            }
        }
    }
    // iterate nonempty submasks of `remaining` with at least two elements
    let mut sub = remaining;
    loop {
        if sub.count_ones() >= 2 {
            blocks.push(sub);
            enumerate_blocks(remaining & !sub, blocks, out, ground);
            blocks.pop();
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & remaining;
        if sub == 0 {
            break;
        }
    }
}

/// `!n` by the recursion `!n = (n-1)(!(n-1) + !(n-2))`, `!0 = 1`, `!1 = 0`.
pub fn subfactorial(n: u32) -> BigUint {
    let mut a = BigUint::one(); // !0
    let mut b = BigUint::zero(); // !1
    if n == 0 {
        return a;
    }
    for k in 2..=n {
        let next = BigUint::from(k - 1) * (&a + &b);
        a = b;
        b = next;
    }
    b
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Left-hand side of the derangement identity: the sum over compositions
/// `n = k_1 + ... + k_t` with all parts `>= 2` of the multinomial coefficient
/// times `prod (k_i - 1)`.
pub fn derangement_composition_sum(n: u32) -> BigUint {
    // multinomial(n; k_1..k_t) = C(n, k_1) * multinomial(n - k_1; k_2..k_t),
    // so the sum over compositions with parts >= 2 factors recursively.
    fn count(remaining: u32) -> BigUint {
        if remaining == 0 {
            return BigUint::one();
        }
        let mut total = BigUint::zero();
        for k in 2..=remaining {
            total += binomial(remaining, k) * BigUint::from(k - 1) * count(remaining - k);
        }
        total
    }
    count(n)
}

/// Checks `n! = !n + sum_{1<=k<=n-1} C(n,k) !(n-k) + 1`.
pub fn derangement_recursion_holds(n: u32) -> bool {
    let mut rhs = subfactorial(n) + BigUint::one();
    for k in 1..n {
        rhs += binomial(n, k) * subfactorial(n - k);
    }
    factorial(n) == rhs
}

/// One line of a derangement-suite report.
#[derive(Debug, Clone, Serialize)]
pub struct DerangementCheck {
    pub n: u32,
    pub enumerated: Option<u64>,
    pub subfactorial: String,
    pub composition_sum_ok: bool,
    pub recursion_ok: bool,
    pub count_ok: Option<bool>,
}

/// Verifies, for every `n <= n_max`, that the composition identity and the
/// binomial recursion produce `!n`, and (up to `enum_cap`) that the
/// enumeration has exactly `!n` objects.
pub fn derangement_suite(n_max: u32, enum_cap: u32) -> Result<Vec<DerangementCheck>> {
    if n_max > 20 {
        return Err(Error::invalid("derangement suite capped at n_max = 20"));
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        let sub = subfactorial(n);
        let comp_ok = derangement_composition_sum(n) == sub;
        let rec_ok = derangement_recursion_holds(n);
        let (enumerated, count_ok) = if n <= enum_cap {
            let len = enumerate_ghat(n as u8)?.len() as u64;
            (Some(len), Some(BigUint::from(len) == sub))
        } else {
            (None, None)
        };
        out.push(DerangementCheck {
            n,
            enumerated,
            subfactorial: sub.to_string(),
            composition_sum_ok: comp_ok,
            recursion_ok: rec_ok,
            count_ok,
        });
    }
    Ok(out)
}

/// An element of `S_2 x S_n`: an optional involution swap composed with a
/// relabeling of the ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElem {
    /// Swap of the two poles; reverses block order and flips labels.
    pub flip: bool,
    /// `perm[i]` is the image of element `i + 1`, 1-based values.
    pub perm: Vec<u8>,
}

impl GroupElem {
    pub fn identity(n: u8) -> Self {
        GroupElem { flip: false, perm: (1..=n).collect() }
    }

    pub fn cremona(n: u8) -> Self {
        GroupElem { flip: true, perm: (1..=n).collect() }
    }

    pub fn transposition(n: u8, i: u8, j: u8) -> Self {
        let mut perm: Vec<u8> = (1..=n).collect();
        perm.swap((i - 1) as usize, (j - 1) as usize);
        GroupElem { flip: false, perm }
    }

    /// `self` after `other` (`self * other` as functions).
    pub fn compose(&self, other: &GroupElem) -> GroupElem {
        let perm = other.perm.iter().map(|&x| self.perm[(x - 1) as usize]).collect();
        GroupElem { flip: self.flip ^ other.flip, perm }
    }
}

fn apply_perm(perm: &[u8], mask: Mask) -> Mask {
    let mut out: Mask = 0;
    for e in mask_elems(mask) {
        out |= 1 << (perm[(e - 1) as usize] - 1);
    }
    out
}

/// Acts on an object: the symmetric part relabels elements inside blocks, the
/// swap part reverses the block order and replaces each label `a` by `k - a`.
pub fn group_act(g: &GroupElem, obj: &GhatObject) -> GhatObject {
    let mut blocks: Vec<Mask> = obj.blocks.iter().map(|&b| apply_perm(&g.perm, b)).collect();
    let mut labels = obj.labels.clone();
    if g.flip {
        blocks.reverse();
        labels.reverse();
        for (i, &b) in blocks.iter().enumerate() {
            labels[i] = mask_len(b) - labels[i];
        }
    }
    GhatObject { n: obj.n, blocks, labels }
}

/// The two linear orders on the collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderKind {
    /// Compares the sequence `(a_1, -k_1, a_2, -k_2, ...)`.
    Lex,
    /// Compares the sequence `(k_t - a_t, -k_t, k_{t-1} - a_{t-1}, ...)`.
    LexPrime,
}

/// The comparison key of an object under the given order.
pub fn order_key(obj: &GhatObject, kind: OrderKind) -> Vec<i32> {
    let mut key = Vec::with_capacity(2 * obj.blocks.len());
    match kind {
        OrderKind::Lex => {
            for (&b, &a) in obj.blocks.iter().zip(&obj.labels) {
                key.push(a as i32);
                key.push(-(mask_len(b) as i32));
            }
        }
        OrderKind::LexPrime => {
            for (&b, &a) in obj.blocks.iter().zip(&obj.labels).rev() {
                let k = mask_len(b) as i32;
                key.push(k - a as i32);
                key.push(-k);
            }
        }
    }
    key
}

/// Compares two objects over the same ground set. `Equal` means equal key
/// sequences; distinct objects with equal keys have disjoint supports.
pub fn compare(a: &GhatObject, b: &GhatObject, kind: OrderKind) -> Result<Ordering> {
    if a.n != b.n {
        return Err(Error::GroundSetMismatch);
    }
    Ok(order_key(a, kind).cmp(&order_key(b, kind)))
}

/// End data `(k_first, k_last; b_first, b_last)` with `b_first = k_1 - a_1`
/// and `b_last = a_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EndData {
    pub k_first: u8,
    pub k_last: u8,
    pub b_first: u8,
    pub b_last: u8,
}

pub fn end_data(obj: &GhatObject) -> EndData {
    let t = obj.blocks.len();
    let k_first = mask_len(obj.blocks[0]);
    let k_last = mask_len(obj.blocks[t - 1]);
    EndData {
        k_first,
        k_last,
        b_first: k_first - obj.labels[0],
        b_last: obj.labels[t - 1],
    }
}

/// Outcome of the end-data test for `RHom(T, T') = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndDecision {
    /// Both inequalities hold, at least one strictly: the Hom space vanishes.
    Vanish,
    /// Both are equalities and the outer blocks coincide; the answer is that
    /// of the stripped middle parts.
    Recurse(GhatObject, GhatObject),
    /// The test is silent.
    Inconclusive { note: Option<String> },
}

/// Applies the end-data inequalities to a pair of torsion objects.
pub fn end_data_decide(t: &GhatObject, t2: &GhatObject) -> Result<EndDecision> {
    if t.n != t2.n {
        return Err(Error::GroundSetMismatch);
    }
    if !t.is_torsion() || !t2.is_torsion() {
        return Err(Error::invalid("end-data test applies to torsion objects only"));
    }
    let d = end_data(t);
    let d2 = end_data(t2);
    let b_sum = (d.b_first + d.b_last) as i32;
    let b_sum2 = (d2.b_first + d2.b_last) as i32;
    let k_sum = (d.k_first + d.k_last) as i32;
    let k_sum2 = (d2.k_first + d2.k_last) as i32;
    let first = b_sum <= b_sum2;
    let second = k_sum - b_sum >= k_sum2 - b_sum2;
    if !(first && second) {
        return Ok(EndDecision::Inconclusive { note: None });
    }
    if b_sum < b_sum2 || k_sum - b_sum > k_sum2 - b_sum2 {
        return Ok(EndDecision::Vanish);
    }
    // both equalities: recurse only when the outer blocks agree exactly
    let same_ends = t.blocks[0] == t2.blocks[0]
        && t.blocks[t.blocks.len() - 1] == t2.blocks[t2.blocks.len() - 1]
        && t.labels[0] == t2.labels[0]
        && t.labels[t.labels.len() - 1] == t2.labels[t2.labels.len() - 1];
    if !same_ends {
        return Ok(EndDecision::Inconclusive { note: None });
    }
    if t.blocks.len() <= 2 || t2.blocks.len() <= 2 {
        return Ok(EndDecision::Inconclusive {
            note: Some("stripping the outer components leaves nothing".into()),
        });
    }
    // the middle components live over a smaller ground set; relabel its
    // elements to 1..k preserving their order
    let strip = |o: &GhatObject| -> Result<GhatObject> {
        let blocks = &o.blocks[1..o.blocks.len() - 1];
        let labels = o.labels[1..o.labels.len() - 1].to_vec();
        let support: Mask = blocks.iter().fold(0, |acc, &b| acc | b);
        let elems: Vec<u8> = mask_elems(support).collect();
        let relabeled: Vec<Mask> = blocks
            .iter()
            .map(|&b| {
                let mut m: Mask = 0;
                for (pos, &e) in elems.iter().enumerate() {
                    if b & (1 << (e - 1)) != 0 {
                        m |= 1 << pos;
                    }
                }
                m
            })
            .collect();
        GhatObject::new(GroundSet::new(elems.len() as u8)?, relabeled, labels)
    };
    Ok(EndDecision::Recurse(strip(t)?, strip(t2)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(n: u8, text: &str) -> GhatObject {
        GhatObject::from_text(GroundSet::new(n).unwrap(), text).unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_ghat(2).unwrap().len(), 1);
        let g3 = enumerate_ghat(3).unwrap();
        assert_eq!(g3.len(), 2);
        assert!(g3.iter().all(|o| o.num_blocks() == 1));
        let g4 = enumerate_ghat(4).unwrap();
        assert_eq!(g4.len(), 9);
        assert_eq!(g4.iter().filter(|o| o.num_blocks() == 1).count(), 3);
        assert_eq!(g4.iter().filter(|o| o.num_blocks() == 2).count(), 6);
        assert!(g4
            .iter()
            .filter(|o| o.num_blocks() == 2)
            .all(|o| o.block_sizes() == vec![2, 2] && o.labels() == [1, 1]));
    }

    #[test]
    fn n_one_is_empty_and_zero_rejected() {
        assert!(enumerate_ghat(1).unwrap().is_empty());
        assert!(matches!(enumerate_ghat(0), Err(Error::UndefinedGroundSet)));
    }

    #[test]
    fn counts_match_subfactorial() {
        for n in 2..=7u8 {
            let len = enumerate_ghat(n).unwrap().len();
            assert_eq!(BigUint::from(len), subfactorial(n as u32), "n = {n}");
        }
    }

    #[test]
    fn composition_identity_small() {
        // n = 4: one composition (4) contributing 3, one (2,2) contributing 6
        assert_eq!(derangement_composition_sum(4), BigUint::from(9u32));
        for n in 1..=12 {
            assert_eq!(derangement_composition_sum(n), subfactorial(n), "n = {n}");
            assert!(derangement_recursion_holds(n), "n = {n}");
        }
    }

    #[test]
    fn cremona_on_line_bundles() {
        let g = obj(3, "1,2,3;1");
        let c = group_act(&GroupElem::cremona(3), &g);
        assert_eq!(c, obj(3, "1,2,3;2"));
        // involution on the whole collection
        for o in enumerate_ghat(5).unwrap() {
            let cc = group_act(&GroupElem::cremona(5), &group_act(&GroupElem::cremona(5), &o));
            assert_eq!(cc, o);
        }
    }

    #[test]
    fn transposition_relabels() {
        let t = obj(4, "1,3|2,4;1,1");
        let s = group_act(&GroupElem::transposition(4, 1, 2), &t);
        assert_eq!(s, obj(4, "2,3|1,4;1,1"));
    }

    #[test]
    fn action_is_a_group_action() {
        for n in 2..=5u8 {
            let objs = enumerate_ghat(n).unwrap();
            let gens: Vec<GroupElem> = (1..n)
                .map(|i| GroupElem::transposition(n, i, i + 1))
                .chain(std::iter::once(GroupElem::cremona(n)))
                .collect();
            for g in &gens {
                for h in &gens {
                    let gh = g.compose(h);
                    for o in &objs {
                        assert_eq!(group_act(&gh, o), group_act(g, &group_act(h, o)));
                    }
                }
            }
            let id = GroupElem::identity(n);
            for o in &objs {
                assert_eq!(&group_act(&id, o), o);
            }
        }
    }

    #[test]
    fn cremona_preserves_size_multisets() {
        for o in enumerate_ghat(5).unwrap() {
            let c = group_act(&GroupElem::cremona(5), &o);
            let mut s1 = o.block_sizes();
            let mut s2 = c.block_sizes();
            s1.sort_unstable();
            s2.sort_unstable();
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn compare_examples() {
        let full = obj(4, "1,2,3,4;2");
        let one = obj(4, "1,2,3,4;1");
        assert_eq!(compare(&full, &one, OrderKind::Lex).unwrap(), Ordering::Greater);
        assert_eq!(compare(&full, &full, OrderKind::Lex).unwrap(), Ordering::Equal);

        // (3,5;1,3) against (3,2,3;2,1,1): the first is smaller under lex
        let t = obj(8, "1,2,3|4,5,6,7,8;1,3");
        let t2 = obj(8, "1,2,3|4,5|6,7,8;2,1,1");
        assert_eq!(compare(&t, &t2, OrderKind::Lex).unwrap(), Ordering::Less);
    }

    #[test]
    fn orders_are_total_modulo_identity() {
        for kind in [OrderKind::Lex, OrderKind::LexPrime] {
            let objs = enumerate_ghat(5).unwrap();
            for a in &objs {
                for b in &objs {
                    let c = compare(a, b, kind).unwrap();
                    if a == b {
                        assert_eq!(c, Ordering::Equal);
                    }
                    assert_eq!(compare(b, a, kind).unwrap(), c.reverse());
                }
            }
        }
    }

    #[test]
    fn lex_prime_is_lex_after_cremona() {
        let objs = enumerate_ghat(5).unwrap();
        let crem = GroupElem::cremona(5);
        for a in &objs {
            for b in &objs {
                let direct = compare(a, b, OrderKind::LexPrime).unwrap();
                let conj =
                    compare(&group_act(&crem, a), &group_act(&crem, b), OrderKind::Lex).unwrap();
                assert_eq!(direct, conj);
            }
        }
    }

    #[test]
    fn end_data_example_pair() {
        let t2 = obj(8, "1,2,3|4,5|6,7,8;2,1,1");
        let t = obj(8, "1,2,3|4,5,6,7,8;1,3");
        assert_eq!(end_data_decide(&t2, &t).unwrap(), EndDecision::Vanish);
        assert!(matches!(
            end_data_decide(&t, &t2).unwrap(),
            EndDecision::Inconclusive { .. }
        ));
    }

    #[test]
    fn end_data_recursion_branch() {
        // identical outer blocks and labels, equal sums, different middles
        let a = obj(8, "1,2|3,4|5,6|7,8;1,1,1,1");
        let b = obj(8, "1,2|3,4,5,6|7,8;1,2,1");
        if let EndDecision::Recurse(x, y) = end_data_decide(&a, &b).unwrap() {
            assert_eq!(x.blocks().len(), 2);
            assert_eq!(y.blocks().len(), 1);
        } else {
            panic!("expected recursion");
        }
        // stripping a two-block object leaves nothing
        let c = obj(4, "1,2|3,4;1,1");
        assert!(matches!(
            end_data_decide(&c, &c).unwrap(),
            EndDecision::Inconclusive { note: Some(_) }
        ));
    }

    #[test]
    fn text_round_trip() {
        for o in enumerate_ghat(5).unwrap() {
            let t = o.to_text();
            assert_eq!(GhatObject::from_text(GroundSet::new(5).unwrap(), &t).unwrap(), o);
            let js = serde_json::to_string(&o).unwrap();
            assert_eq!(serde_json::from_str::<GhatObject>(&js).unwrap(), o);
        }
    }
}

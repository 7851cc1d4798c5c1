//! Index combinatorics: admissibility, duality, BBBL structure, arrow
//! operations and the index ↔ word correspondence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

/// A finite (possibly empty) tuple of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Index(Vec<u32>);

/// One index-building step: `Right` appends a part 1, `Up` raises the last part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arrow {
    Right,
    Up,
}

/// Block data `d, n_0, …, n_{2d}` of a BBBL-type index
/// `({2}^{n_0}, 1, {2}^{n_1}, 3, …, 1, {2}^{n_{2d−1}}, 3, {2}^{n_{2d}})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbblShape {
    pub d: usize,
    pub n: Vec<u32>,
}

impl BbblShape {
    pub fn new(n: Vec<u32>) -> Option<Self> {
        (n.len() % 2 == 1).then_some(BbblShape { d: n.len() / 2, n })
    }

    /// Emits the index displayed by the shape.
    pub fn build(&self) -> Index {
        let mut parts = Vec::new();
        for (i, &count) in self.n.iter().enumerate() {
            if i > 0 {
                parts.push(if i % 2 == 1 { 1 } else { 3 });
            }
            parts.extend(std::iter::repeat_n(2, count as usize));
        }
        Index(parts)
    }
}

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::MalformedIndex(format!("{parts:?}")));
        }
        Ok(Index(parts))
    }

    pub fn empty() -> Self {
        Index(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn is_admissible(&self) -> bool {
        matches!(self.0.last(), Some(&k) if k >= 2)
    }

    fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::NotAdmissible(self.clone()))
        }
    }

    /// Componentwise sum with a shift vector of the same depth.
    pub fn shifted(&self, shift: &[u32]) -> Index {
        debug_assert_eq!(shift.len(), self.depth());
        Index(self.0.iter().zip(shift).map(|(k, e)| k + e).collect())
    }

    /// `k→ = (k_1, …, k_r, 1)`.
    pub fn right(&self) -> Index {
        let mut parts = self.0.clone();
        parts.push(1);
        Index(parts)
    }

    /// `k↑ = (k_1, …, k_r + 1)`; undefined for the empty index.
    pub fn up(&self) -> Result<Index> {
        let mut parts = self.0.clone();
        match parts.last_mut() {
            Some(last) => {
                *last += 1;
                Ok(Index(parts))
            }
            None => Err(Error::UpOnEmpty),
        }
    }

    /// Applies arrows left to right.
    pub fn apply_arrows(&self, path: &[Arrow]) -> Result<Index> {
        path.iter().try_fold(self.clone(), |k, a| match a {
            Arrow::Right => Ok(k.right()),
            Arrow::Up => k.up(),
        })
    }

    /// The dual index, through the `({1}^{a−1}, b+1)` block decomposition.
    pub fn dual(&self) -> Result<Index> {
        self.require_admissible()?;
        let mut blocks = Vec::new();
        let mut ones = 0u32;
        for &k in &self.0 {
            if k == 1 {
                ones += 1;
            } else {
                blocks.push((ones + 1, k - 1));
                ones = 0;
            }
        }
        let mut parts = Vec::with_capacity(self.weight() as usize);
        for &(a, b) in blocks.iter().rev() {
            parts.extend(std::iter::repeat_n(1, b as usize - 1));
            parts.push(a + 1);
        }
        Ok(Index(parts))
    }

    /// The unique BBBL shape of this index, if any. The empty index is the
    /// shape `d = 0, n = (0)`.
    pub fn is_bbbl(&self) -> Option<BbblShape> {
        let parts = &self.0;
        let mut i = 0;
        let mut n = Vec::new();
        let count_twos = |i: &mut usize| {
            let start = *i;
            while *i < parts.len() && parts[*i] == 2 {
                *i += 1;
            }
            (*i - start) as u32
        };
        loop {
            n.push(count_twos(&mut i));
            if i == parts.len() {
                break;
            }
            if parts[i] != 1 {
                return None;
            }
            i += 1;
            n.push(count_twos(&mut i));
            if i == parts.len() || parts[i] != 3 {
                return None;
            }
            i += 1;
        }
        BbblShape::new(n)
    }

    /// `(k_1, …, k_r) ↦ y x^{k_1−1} ⋯ y x^{k_r−1}`.
    pub fn to_word(&self) -> Word {
        let mut letters = Vec::with_capacity(self.weight() as usize);
        for &k in &self.0 {
            letters.push(Letter::Y);
            letters.extend(std::iter::repeat_n(Letter::X, k as usize - 1));
        }
        Word::from_letters(letters)
    }

    /// Inverse of [`Index::to_word`]; the word must be empty or start with `y`.
    pub fn from_word(w: &Word) -> Result<Index> {
        let mut parts: Vec<u32> = Vec::new();
        for l in w.letters() {
            match (l, parts.last_mut()) {
                (Letter::Y, _) => parts.push(1),
                (Letter::X, Some(last)) => *last += 1,
                (Letter::X, None) => return Err(Error::MalformedWord(w.to_string())),
            }
        }
        Ok(Index(parts))
    }

    /// Arrows building this index from `(1)`: the word without its leading
    /// `y`, read with `y ↦ →`, `x ↦ ↑`.
    pub fn arrow_path_from_one(&self) -> Result<Vec<Arrow>> {
        self.require_admissible()?;
        let path: Vec<Arrow> = self
            .to_word()
            .letters()
            .iter()
            .skip(1)
            .map(|l| match l {
                Letter::Y => Arrow::Right,
                Letter::X => Arrow::Up,
            })
            .collect();
        debug_assert_eq!(Index(vec![1]).apply_arrows(&path).as_ref(), Ok(self));
        Ok(path)
    }
}

/// Splits a path (without its final `↑`) into two-arrow blocks `↑→` / `→↑`.
/// Returns `None` when the path is not such a concatenation.
pub fn two_arrow_blocks(path: &[Arrow]) -> Option<Vec<[Arrow; 2]>> {
    if !path.len().is_multiple_of(2) {
        return None;
    }
    path.chunks(2)
        .map(|c| {
            let block = [c[0], c[1]];
            (c[0] != c[1]).then_some(block)
        })
        .collect()
}

/// All compositions of `weight` (tuples of positive integers summing to it),
/// in lexicographic order.
pub fn compositions(weight: u32) -> Vec<Index> {
    fn rec(rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Index>) {
        if rest == 0 {
            out.push(Index(cur.clone()));
            return;
        }
        for k in 1..=rest {
            cur.push(k);
            rec(rest - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if weight > 0 {
        rec(weight, &mut Vec::new(), &mut out);
    }
    out
}

/// Admissible indices of weight `2..=max_weight`, ordered by weight, then lexicographically.
pub fn admissible_indices(max_weight: u32) -> Vec<Index> {
    (2..=max_weight).flat_map(|w| compositions(w).into_iter().filter(Index::is_admissible)).collect()
}

/// Non-empty BBBL-type indices up to the given weight.
pub fn bbbl_indices(max_weight: u32) -> Vec<Index> {
    admissible_indices(max_weight).into_iter().filter(|k| k.is_bbbl().is_some()).collect()
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Index {
    type Err = Error;

    /// Comma-separated positive integers; the empty string (or `()`) is the empty index.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() {
            return Ok(Index::empty());
        }
        let parts = t
            .split(',')
            .map(|p| p.trim().parse::<u32>().ok().filter(|&k| k > 0))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::MalformedIndex(s.to_string()))?;
        Ok(Index(parts))
    }
}

impl TryFrom<String> for Index {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Index> for String {
    fn from(k: Index) -> String {
        k.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(s: &str) -> Index {
        s.parse().unwrap()
    }

    /// Word-reversal oracle: reverse the word, swap x ↔ y, read back.
    fn dual_by_word(k: &Index) -> Index {
        Index::from_word(&k.to_word().reversed_swapped()).unwrap()
    }

    /// Brute-force BBBL oracle: try every shape whose built index has the right weight.
    fn bbbl_oracle(k: &Index) -> Option<BbblShape> {
        let w = k.weight();
        let mut found = None;
        for d in 0..=(w as usize / 4) {
            let slots = 2 * d + 1;
            let fixed = 4 * d as u32;
            if fixed > w || !(w - fixed).is_multiple_of(2) {
                continue;
            }
            let twos = (w - fixed) / 2;
            // distribute `twos` among `slots` blocks
            fn rec(slot: usize, left: u32, cur: &mut Vec<u32>, slots: usize, k: &Index, found: &mut Option<BbblShape>) {
                if slot + 1 == slots {
                    cur.push(left);
                    let s = BbblShape::new(cur.clone()).unwrap();
                    if &s.build() == k {
                        assert!(found.is_none(), "decomposition not unique");
                        *found = Some(s);
                    }
                    cur.pop();
                    return;
                }
                for c in 0..=left {
                    cur.push(c);
                    rec(slot + 1, left - c, cur, slots, k, found);
                    cur.pop();
                }
            }
            rec(0, twos, &mut Vec::new(), slots, k, &mut found);
        }
        found
    }

    #[test]
    fn dual_examples() {
        assert_eq!(idx("2").dual().unwrap(), idx("2"));
        assert_eq!(idx("1,2").dual().unwrap(), idx("3"));
        assert_eq!(idx("2,1,3").dual().unwrap(), idx("1,3,2"));
        assert_eq!(idx("2,1,3").dual().unwrap(), dual_by_word(&idx("2,1,3")));
        assert!(matches!(idx("2,1").dual(), Err(Error::NotAdmissible(_))));
        assert!(Index::empty().dual().is_err());
    }

    #[test]
    fn dual_properties_up_to_weight_nine() {
        for k in admissible_indices(9) {
            let d = k.dual().unwrap();
            assert_eq!(d.dual().unwrap(), k);
            assert_eq!(d.weight(), k.weight());
            assert_eq!(d, dual_by_word(&k), "{k}");
            assert_eq!(d.to_word(), k.to_word().reversed_swapped());
        }
    }

    #[test]
    fn admissible_counts() {
        let counts: Vec<usize> = (2..=7).map(|w| admissible_indices(w).len()).collect();
        assert_eq!(counts, vec![1, 3, 7, 15, 31, 63]);
    }

    #[test]
    fn bbbl_examples() {
        assert_eq!(idx("2,2").is_bbbl(), Some(BbblShape { d: 0, n: vec![2] }));
        assert_eq!(idx("3").is_bbbl(), None);
        assert_eq!(idx("2,1,3").is_bbbl(), Some(BbblShape { d: 1, n: vec![1, 0, 0] }));
        assert_eq!(idx("2,1,3").is_bbbl(), bbbl_oracle(&idx("2,1,3")));
        assert_eq!(idx("1,2").is_bbbl(), None);
        assert_eq!(Index::empty().is_bbbl(), Some(BbblShape { d: 0, n: vec![0] }));
    }

    #[test]
    fn bbbl_build_examples() {
        assert_eq!(BbblShape::new(vec![0]).unwrap().build(), Index::empty());
        assert_eq!(BbblShape::new(vec![0, 0, 0]).unwrap().build(), idx("1,3"));
        assert_eq!(BbblShape::new(vec![0, 1, 0]).unwrap().build(), idx("1,2,3"));
        assert!(BbblShape::new(vec![0, 1]).is_none());
    }

    #[test]
    fn bbbl_matches_oracle_and_word_characterization() {
        for w in 1..=10 {
            for k in compositions(w) {
                let got = k.is_bbbl();
                assert_eq!(got, bbbl_oracle(&k), "{k}");
                if let Some(s) = &got {
                    assert_eq!(&s.build(), &k);
                }
                if k.is_admissible() {
                    let word = k.to_word();
                    let l = word.letters();
                    let inner = &l[1..l.len() - 1];
                    let blocks_ok = inner.len() % 2 == 0 && inner.chunks(2).all(|c| c[0] != c[1]);
                    assert_eq!(got.is_some(), blocks_ok, "{k}");
                    if got.is_some() {
                        assert!(k.dual().unwrap().is_bbbl().is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn arrow_examples() {
        assert_eq!(Index::empty().apply_arrows(&[Arrow::Right]).unwrap(), idx("1"));
        assert_eq!(idx("1").apply_arrows(&[Arrow::Up, Arrow::Right]).unwrap(), idx("2,1"));
        assert_eq!(idx("1").apply_arrows(&[Arrow::Right, Arrow::Up, Arrow::Up]).unwrap(), idx("1,3"));
        assert_eq!(Index::empty().apply_arrows(&[Arrow::Up]), Err(Error::UpOnEmpty));
    }

    #[test]
    fn word_examples() {
        assert_eq!(idx("2").to_word().to_string(), "yx");
        assert_eq!(idx("1,3").to_word().to_string(), "yyxx");
        assert_eq!(Index::from_word(&"yyxx".parse().unwrap()).unwrap(), idx("1,3"));
        assert_eq!(Index::from_word(&Word::empty()).unwrap(), Index::empty());
        assert!(matches!(Index::from_word(&"xy".parse().unwrap()), Err(Error::MalformedWord(_))));
        for w in 1..=8 {
            for k in compositions(w) {
                let word = k.to_word();
                assert_eq!(Index::from_word(&word).unwrap(), k);
                assert_eq!(k.is_admissible(), word.ends_with_x());
            }
        }
    }

    #[test]
    fn arrow_path_examples() {
        use Arrow::*;
        assert_eq!(idx("2").arrow_path_from_one().unwrap(), vec![Up]);
        assert_eq!(idx("1,3").arrow_path_from_one().unwrap(), vec![Right, Up, Up]);
        let p = idx("2,1,3").arrow_path_from_one().unwrap();
        assert_eq!(p, vec![Up, Right, Right, Up, Up]);
        assert_eq!(idx("1").apply_arrows(&p).unwrap(), idx("2,1,3"));
        assert!(idx("2,1").arrow_path_from_one().is_err());
    }

    #[test]
    fn bbbl_paths_are_two_arrow_blocks() {
        for k in admissible_indices(10) {
            let path = k.arrow_path_from_one().unwrap();
            assert_eq!(idx("1").apply_arrows(&path).unwrap(), k);
            assert_eq!(*path.last().unwrap(), Arrow::Up);
            let blocks = two_arrow_blocks(&path[..path.len() - 1]);
            assert_eq!(blocks.is_some(), k.is_bbbl().is_some(), "{k}");
        }
    }

    #[test]
    fn text_format() {
        assert_eq!(idx("2,1,3").to_string(), "2,1,3");
        assert_eq!(idx(""), Index::empty());
        assert_eq!(idx(" (1, 2) "), Index::new(vec![1, 2]).unwrap());
        assert!("1,0".parse::<Index>().is_err());
        assert!("a".parse::<Index>().is_err());
        assert!(Index::new(vec![0]).is_err());
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

/// A word in generators and their inverses; letters are `(index, ±1)` with 0-based indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenWord(pub Vec<(u32, i8)>);

impl GenWord {
    pub fn empty() -> GenWord {
        GenWord(Vec::new())
    }

    pub fn letter(i: usize, e: i8) -> GenWord {
        debug_assert!(e == 1 || e == -1);
        GenWord(vec![(i as u32, e)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[(u32, i8)] {
        &self.0
    }

    pub fn push(&mut self, i: usize, e: i8) {
        self.0.push((i as u32, e));
    }

    /// Concatenation followed by free reduction at the seam.
    pub fn concat(&self, o: &GenWord) -> GenWord {
        let mut out = self.0.clone();
        for &(g, e) in &o.0 {
            match out.last() {
                Some(&(h, f)) if h == g && f == -e => {
                    out.pop();
                }
                _ => out.push((g, e)),
            }
        }
        GenWord(out)
    }

    pub fn inverse(&self) -> GenWord {
        GenWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().map(|&(g, _)| g as usize).max()
    }

    /// Parses the `Display` form, e.g. `g1 g2^-1` (1-based); `1` is the empty word.
    pub fn parse(s: &str) -> Option<GenWord> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Some(GenWord::empty());
        }
        let mut w = GenWord::empty();
        for tok in s.split_whitespace() {
            let tok = tok.strip_prefix('g')?;
            let (idx, e) = match tok.split_once('^') {
                Some((i, "-1")) => (i, -1),
                Some((i, "1")) => (i, 1),
                Some(_) => return None,
                None => (tok, 1),
            };
            let i: usize = idx.parse().ok()?;
            w.push(i.checked_sub(1)?, e);
        }
        Some(w)
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(g, e)| if e == 1 { format!("g{}", g + 1) } else { format!("g{}^-1", g + 1) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction_and_inverse() {
        let a = GenWord(vec![(0, 1), (1, 1)]);
        assert_eq!(a.concat(&a.inverse()), GenWord::empty());
        assert_eq!(a.to_string(), "g1 g2");
        assert_eq!(GenWord::parse(&a.inverse().to_string()).unwrap(), a.inverse());
        assert_eq!(GenWord::parse("1").unwrap(), GenWord::empty());
    }
}

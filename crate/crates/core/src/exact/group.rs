use rand::Rng;

use super::field::Field;
use super::matrix::Matrix;
use super::word::GenWord;
use crate::error::{Error, Result};

/// A finitely generated matrix group `<S>` together with the inverses of `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedGroup {
    n: usize,
    field: Field,
    gens: Vec<Matrix>,
    invs: Vec<Matrix>,
}

impl GeneratedGroup {
    pub fn new(field: Field, n: usize, gens: Vec<Matrix>) -> Result<GeneratedGroup> {
        if n == 0 {
            return Err(Error::InvalidInput("degree must be positive".into()));
        }
        let mut invs = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.n() != n {
                return Err(Error::InvalidInput(format!("generator {} has degree {}, expected {n}", i + 1, g.n())));
            }
            let inv = g
                .inverse(&field)
                .ok_or_else(|| Error::InvalidInput(format!("generator {} is singular", i + 1)))?;
            invs.push(inv);
        }
        Ok(GeneratedGroup { n, field, gens, invs })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn gens(&self) -> &[Matrix] {
        &self.gens
    }

    pub fn invs(&self) -> &[Matrix] {
        &self.invs
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// Generators followed by their inverses.
    pub fn gens_and_inverses(&self) -> Vec<Matrix> {
        self.gens.iter().chain(&self.invs).cloned().collect()
    }

    pub fn letter(&self, i: usize, e: i8) -> &Matrix {
        if e > 0 {
            &self.gens[i]
        } else {
            &self.invs[i]
        }
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.n, &self.field)
    }

    pub fn evaluate_word(&self, w: &GenWord) -> Result<Matrix> {
        if let Some(m) = w.max_index() {
            if m >= self.gens.len() {
                return Err(Error::InvalidInput(format!("word uses generator {} of {}", m + 1, self.gens.len())));
            }
        }
        let mut acc = self.identity();
        for &(g, e) in w.letters() {
            acc = acc.mul(self.letter(g as usize, e), &self.field);
        }
        Ok(acc)
    }

    pub fn random_word(&self, rng: &mut impl Rng, len: usize) -> GenWord {
        let mut w = GenWord::empty();
        if self.gens.is_empty() {
            return w;
        }
        for _ in 0..len {
            let g = rng.gen_range(0..self.gens.len());
            let e = if rng.gen_bool(0.5) { 1 } else { -1 };
            w = w.concat(&GenWord::letter(g, e));
        }
        w
    }

    /// The same generators over a different field descriptor after an entrywise map.
    pub fn with_generators(&self, gens: Vec<Matrix>) -> Result<GeneratedGroup> {
        GeneratedGroup::new(self.field.clone(), self.n, gens)
    }
}

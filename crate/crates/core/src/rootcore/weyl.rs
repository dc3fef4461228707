//! Weyl group elements, stored as permutations of the roots together with
//! their lexicographically smallest reduced word.

use std::collections::{HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use rand::Rng;

use super::system::RootSystem;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct WeylElement {
    word: Vec<usize>,
    perm: Vec<u16>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.perm == other.perm
    }
}

impl Eq for WeylElement {}

impl Hash for WeylElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.perm.hash(state)
    }
}

impl WeylElement {
    pub fn identity(sys: &RootSystem) -> Self {
        WeylElement { word: vec![], perm: (0..sys.num_roots() as u16).collect() }
    }

    /// Element for an arbitrary word; the stored word is re-canonicalized.
    pub fn from_word(sys: &RootSystem, word: &[usize]) -> Result<Self> {
        let mut perm: Vec<u16> = (0..sys.num_roots() as u16).collect();
        for &i in word {
            if i >= sys.rank() {
                return Err(Error::InvalidInput(format!("letter {i} out of range")));
            }
            let s = sys.reflection_table(i);
            perm = s.iter().map(|&k| perm[k as usize]).collect();
        }
        Ok(Self::from_perm(sys, perm))
    }

    /// Like [`from_word`](Self::from_word) but rejects non-reduced words.
    pub fn from_reduced_word(sys: &RootSystem, word: &[usize]) -> Result<Self> {
        let w = Self::from_word(sys, word)?;
        if w.length() != word.len() {
            return Err(Error::NotReduced(word.to_vec()));
        }
        Ok(w)
    }

    pub(crate) fn from_perm(sys: &RootSystem, perm: Vec<u16>) -> Self {
        let word = canonical_word(sys, &perm);
        WeylElement { word, perm }
    }

    pub fn simple_reflection(sys: &RootSystem, i: usize) -> Self {
        WeylElement { word: vec![i], perm: sys.reflection_table(i).to_vec() }
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Index of `w(root k)`.
    pub fn act(&self, k: usize) -> usize {
        self.perm[k] as usize
    }

    pub fn perm(&self) -> &[u16] {
        &self.perm
    }

    /// `self * other`.
    pub fn mul(&self, sys: &RootSystem, other: &WeylElement) -> WeylElement {
        let perm = other.perm.iter().map(|&k| self.perm[k as usize]).collect();
        Self::from_perm(sys, perm)
    }

    pub fn inverse(&self, sys: &RootSystem) -> WeylElement {
        let mut inv = vec![0u16; self.perm.len()];
        for (k, &v) in self.perm.iter().enumerate() {
            inv[v as usize] = k as u16;
        }
        Self::from_perm(sys, inv)
    }

    /// Positive roots sent to negative roots.
    pub fn inversions(&self, sys: &RootSystem) -> Vec<usize> {
        (0..sys.num_positive()).filter(|&k| !sys.is_positive(self.act(k))).collect()
    }

    /// Apply to a root-lattice vector (simple-root coordinates).
    pub fn act_vec(&self, sys: &RootSystem, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; sys.rank()];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let img = sys.root(self.act(sys.simple(i)));
            for j in 0..sys.rank() {
                out[j] += c * img[j];
            }
        }
        out
    }
}

fn canonical_word(sys: &RootSystem, perm: &[u16]) -> Vec<usize> {
    // greedy smallest left descent
    let mut inv = vec![0u16; perm.len()];
    for (k, &v) in perm.iter().enumerate() {
        inv[v as usize] = k as u16;
    }
    let simples: Vec<usize> = (0..sys.rank()).map(|i| sys.simple(i)).collect();
    let mut word = Vec::new();
    'outer: loop {
        for (i, &a) in simples.iter().enumerate() {
            if !sys.is_positive(inv[a] as usize) {
                word.push(i);
                let s = sys.reflection_table(i);
                inv = s.iter().map(|&k| inv[k as usize]).collect();
                continue 'outer;
            }
        }
        break;
    }
    word
}

impl RootSystem {
    /// Longest element, by repeatedly extending with ascents.
    pub fn longest_element(&self) -> WeylElement {
        self.longest_in(&(0..self.rank()).collect::<Vec<_>>())
    }

    /// Longest element of the parabolic subgroup generated by `nodes`.
    pub fn longest_in(&self, nodes: &[usize]) -> WeylElement {
        let mut perm: Vec<u16> = (0..self.num_roots() as u16).collect();
        'outer: loop {
            for &i in nodes {
                if self.is_positive(perm[self.simple(i)] as usize) {
                    let s = self.reflection_table(i);
                    perm = s.iter().map(|&k| perm[k as usize]).collect();
                    continue 'outer;
                }
            }
            break;
        }
        WeylElement::from_perm(self, perm)
    }

    /// All elements of the subgroup generated by `nodes`, or a guard error.
    pub fn enumerate_parabolic(&self, nodes: &[usize], limit: usize) -> Result<Vec<WeylElement>> {
        let id: Vec<u16> = (0..self.num_roots() as u16).collect();
        let mut seen: HashSet<Vec<u16>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id);
        let mut out = Vec::new();
        while let Some(p) = queue.pop_front() {
            for &i in nodes {
                let s = self.reflection_table(i);
                let q: Vec<u16> = s.iter().map(|&k| p[k as usize]).collect();
                if !seen.contains(&q) {
                    if seen.len() >= limit {
                        return Err(Error::Guard(format!("Weyl enumeration exceeds {limit} elements")));
                    }
                    seen.insert(q.clone());
                    queue.push_back(q);
                }
            }
            out.push(p);
        }
        Ok(out.into_iter().map(|p| WeylElement::from_perm(self, p)).collect())
    }

    pub fn enumerate_weyl(&self, limit: usize) -> Result<Vec<WeylElement>> {
        self.enumerate_parabolic(&(0..self.rank()).collect::<Vec<_>>(), limit)
    }

    /// Uniform-ish random element from a random word of length `len`.
    pub fn random_element<R: Rng>(&self, rng: &mut R, len: usize) -> WeylElement {
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..self.rank())).collect();
        WeylElement::from_word(self, &word).expect("letters in range")
    }

    /// Element of minimal length in `W_J * w` where `J` = `nodes`.
    pub fn minimal_left_coset_rep(&self, nodes: &[usize], w: &WeylElement) -> WeylElement {
        let mut cur = w.clone();
        'outer: loop {
            for &j in nodes {
                let s = WeylElement::simple_reflection(self, j);
                let inv = cur.inverse(self);
                if !self.is_positive(inv.act(self.simple(j))) {
                    cur = s.mul(self, &cur);
                    continue 'outer;
                }
            }
            return cur;
        }
    }
}

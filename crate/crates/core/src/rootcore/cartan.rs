use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub const ALL: [Family; 7] = [Family::A, Family::B, Family::C, Family::D, Family::E, Family::F, Family::G];

    pub fn valid_rank(self, rank: usize) -> bool {
        match self {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        }
    }

    pub fn is_simply_laced(self) -> bool {
        matches!(self, Family::A | Family::D | Family::E)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            "G" => Ok(Family::G),
            other => Err(Error::InvalidType(format!("unknown family {other:?}"))),
        }
    }
}

/// A simple Cartan type, possibly with the order of a quasi-split twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
    pub twist: u8,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        Self::twisted(family, rank, 1)
    }

    pub fn twisted(family: Family, rank: usize, twist: u8) -> Result<Self> {
        if !family.valid_rank(rank) {
            return Err(Error::InvalidType(format!("{family}{rank} is not a valid rank")));
        }
        let ok = match twist {
            1 => true,
            2 => {
                matches!(family, Family::A if rank >= 2)
                    || matches!(family, Family::D)
                    || matches!(family, Family::E if rank == 6)
            }
            3 => family == Family::D && rank == 4,
            _ => false,
        };
        if !ok {
            return Err(Error::InvalidType(format!("{family}{rank} has no diagram automorphism of order {twist}")));
        }
        Ok(CartanType { family, rank, twist })
    }

    pub fn split(self) -> Self {
        CartanType { twist: 1, ..self }
    }

    /// Every simple type of rank at most `max_rank`, untwisted.
    pub fn all_up_to(max_rank: usize) -> Vec<CartanType> {
        let mut out = Vec::new();
        for fam in Family::ALL {
            for r in 1..=max_rank {
                if let Ok(t) = CartanType::new(fam, r) {
                    // B2 = C2 and D3 = A3 are kept: they exercise different numberings.
                    out.push(t);
                }
            }
        }
        out
    }

    /// Cartan matrix `a[i][j] = <alpha_i, alpha_j^vee>`, Bourbaki numbering.
    pub fn cartan_matrix(self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self.family {
            Family::A | Family::B | Family::C => {
                for i in 0..n.saturating_sub(1) {
                    link(i, i + 1);
                }
            }
            Family::D => {
                for i in 0..n - 2 {
                    link(i, i + 1);
                }
                link(n - 3, n - 1);
            }
            Family::E => {
                link(0, 2);
                link(1, 3);
                for i in 2..n - 1 {
                    link(i, i + 1);
                }
            }
            Family::F => {
                link(0, 1);
                link(1, 2);
                link(2, 3);
            }
            Family::G => link(0, 1),
        }
        match self.family {
            Family::B => a[n - 2][n - 1] = -2,
            Family::C => a[n - 1][n - 2] = -2,
            Family::F => a[1][2] = -2,
            Family::G => a[1][0] = -3,
            _ => {}
        }
        a
    }

    /// Half squared lengths of the simple roots, short roots normalized to 1.
    pub fn root_norms(self) -> Vec<i64> {
        let n = self.rank;
        match self.family {
            Family::B => (0..n).map(|i| if i + 1 == n { 1 } else { 2 }).collect(),
            Family::C => (0..n).map(|i| if i + 1 == n { 2 } else { 1 }).collect(),
            Family::F => vec![2, 2, 1, 1],
            Family::G => vec![1, 3],
            _ => vec![1; n],
        }
    }

    /// The diagram automorphism of order `twist` as a permutation of 0-based node indices.
    pub fn diagram_automorphism(self) -> Vec<usize> {
        let n = self.rank;
        let mut p: Vec<usize> = (0..n).collect();
        match (self.family, self.twist) {
            (_, 1) => {}
            (Family::A, 2) => {
                for (i, x) in p.iter_mut().enumerate() {
                    *x = n - 1 - i;
                }
            }
            (Family::D, 2) => p.swap(n - 2, n - 1),
            (Family::D, 3) => {
                // 1 -> 3 -> 4 -> 1 in Bourbaki labels
                p[0] = 2;
                p[2] = 3;
                p[3] = 0;
            }
            (Family::E, 2) => {
                p.swap(0, 5);
                p.swap(2, 4);
            }
            _ => unreachable!("twist validated at construction"),
        }
        p
    }

    pub fn label(self) -> String {
        if self.twist == 1 {
            format!("{}{}", self.family, self.rank)
        } else {
            format!("{}{}{}", self.twist, self.family, self.rank)
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_validation() {
        assert!(CartanType::new(Family::D, 2).is_err());
        assert!(CartanType::new(Family::E, 9).is_err());
        assert!(CartanType::twisted(Family::D, 5, 3).is_err());
        assert!(CartanType::twisted(Family::D, 4, 3).is_ok());
        assert!(CartanType::twisted(Family::A, 1, 2).is_err());
        assert!(CartanType::twisted(Family::B, 3, 2).is_err());
    }

    #[test]
    fn symmetrizable() {
        for t in CartanType::all_up_to(8) {
            let a = t.cartan_matrix();
            let d = t.root_norms();
            for i in 0..t.rank {
                for j in 0..t.rank {
                    assert_eq!(a[i][j] * d[j], a[j][i] * d[i], "{t}");
                }
            }
        }
    }

    #[test]
    fn automorphisms_preserve_cartan() {
        for (f, r, tw) in [(Family::A, 5, 2), (Family::D, 5, 2), (Family::D, 4, 3), (Family::E, 6, 2)] {
            let t = CartanType::twisted(f, r, tw).unwrap();
            let a = t.cartan_matrix();
            let p = t.diagram_automorphism();
            for i in 0..r {
                for j in 0..r {
                    assert_eq!(a[p[i]][p[j]], a[i][j]);
                }
            }
        }
    }
}

//! Finite crystallographic root systems given by a Cartan matrix.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::cartan::{CartanType, Family};
use crate::error::{Error, Result};

pub type Vector = Vec<i64>;

/// Irreducible component label such as `D8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentType {
    pub family: Family,
    pub rank: usize,
}

impl fmt::Display for ComponentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

/// Roots in simple-root coordinates, coroots in simple-coroot coordinates.
///
/// Positive roots come first, sorted by height and then so that
/// `alpha_1 < alpha_2 < ...` within a height; root `npos + i` is `-root(i)`.
#[derive(Clone, Debug)]
pub struct RootSystem {
    rank: usize,
    cartan: Vec<Vec<i64>>,
    norms: Vec<i64>,
    roots: Vec<Vector>,
    coroots: Vec<Vector>,
    root_norms: Vec<i64>,
    index: HashMap<Vector, usize>,
    npos: usize,
    /// `reflections[i][k]` = index of `s_i(root k)`.
    reflections: Vec<Vec<u16>>,
}

fn height(v: &[i64]) -> i64 {
    v.iter().sum()
}

/// Solve `d_j a_ij = d_i a_ji` for a positive integral symmetrizer.
fn symmetrizer(cartan: &[Vec<i64>]) -> Vec<i64> {
    let n = cartan.len();
    let mut d: Vec<Option<(i64, i64)>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some((1, 1));
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (pi, qi) = d[i].unwrap();
            for j in 0..n {
                if j != i && cartan[i][j] != 0 && d[j].is_none() {
                    // d_j = d_i * a_ji / a_ij
                    let (p, q) = (pi * cartan[j][i], qi * cartan[i][j]);
                    let g = num_integer::gcd(p, q);
                    let s = if q / g < 0 { -1 } else { 1 };
                    d[j] = Some((s * p / g, s * q / g));
                    stack.push(j);
                }
            }
        }
    }
    let l = d.iter().fold(1i64, |acc, x| num_integer::lcm(acc, x.unwrap().1));
    let raw: Vec<i64> = d.iter().map(|x| x.unwrap().0 * l / x.unwrap().1).collect();
    // normalize each component so its shortest root has norm 1
    let comps = components_of(cartan);
    let mut out = raw.clone();
    for comp in comps {
        let g = comp.iter().fold(0i64, |acc, &i| num_integer::gcd(acc, raw[i]));
        for &i in &comp {
            out[i] = raw[i] / g;
        }
    }
    out
}

fn components_of(cartan: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let n = cartan.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] && (cartan[i][j] != 0 || cartan[j][i] != 0) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

impl RootSystem {
    pub fn of_type(t: CartanType) -> Self {
        Self::with_norms(t.cartan_matrix(), t.root_norms()).expect("classified Cartan matrices are valid")
    }

    /// Root system of a (possibly reducible, possibly empty) Cartan matrix.
    pub fn from_cartan(cartan: Vec<Vec<i64>>) -> Result<Self> {
        let norms = symmetrizer(&cartan);
        Self::with_norms(cartan, norms)
    }

    /// As [`from_cartan`](Self::from_cartan) with the half squared lengths of
    /// the simple roots supplied, for subsystems that must keep ambient lengths.
    pub fn with_norms(cartan: Vec<Vec<i64>>, norms: Vec<i64>) -> Result<Self> {
        let r = cartan.len();
        if norms.len() != r || cartan.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidInput("Cartan matrix must be square".into()));
        }
        for i in 0..r {
            if cartan[i][i] != 2 {
                return Err(Error::InvalidInput("Cartan diagonal must be 2".into()));
            }
            for j in 0..r {
                if i != j && (cartan[i][j] > 0 || (cartan[i][j] == 0) != (cartan[j][i] == 0)) {
                    return Err(Error::InvalidInput("not a generalized Cartan matrix".into()));
                }
                if norms[j] * cartan[i][j] != norms[i] * cartan[j][i] {
                    return Err(Error::InvalidInput("norms do not symmetrize the Cartan matrix".into()));
                }
            }
        }
        // Build positive roots height by height using root strings.
        let unit = |i: usize| {
            let mut v = vec![0i64; r];
            v[i] = 1;
            v
        };
        let pair = |v: &[i64], j: usize| -> i64 { (0..r).map(|i| v[i] * cartan[i][j]).sum() };
        let mut pos: Vec<Vector> = (0..r).map(unit).collect();
        let mut known: HashMap<Vector, ()> = pos.iter().map(|v| (v.clone(), ())).collect();
        let mut layer: Vec<Vector> = pos.clone();
        const LIMIT: usize = 20_000;
        while !layer.is_empty() {
            let mut next = Vec::new();
            for v in &layer {
                for i in 0..r {
                    // p = number of times alpha_i can be subtracted
                    let mut p = 0;
                    let mut w = v.clone();
                    loop {
                        w[i] -= 1;
                        if known.contains_key(&w) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let q = p - pair(v, i);
                    if q > 0 {
                        let mut u = v.clone();
                        u[i] += 1;
                        if !known.contains_key(&u) {
                            known.insert(u.clone(), ());
                            next.push(u);
                        }
                    }
                }
            }
            if known.len() > LIMIT {
                return Err(Error::InvalidInput("Cartan matrix is not of finite type".into()));
            }
            pos.extend(next.iter().cloned());
            layer = next;
        }
        pos.sort_by(|a, b| height(a).cmp(&height(b)).then_with(|| b.cmp(a)));
        let npos = pos.len();
        let mut roots = pos.clone();
        roots.extend(pos.iter().map(|v| v.iter().map(|x| -x).collect::<Vector>()));
        let index: HashMap<Vector, usize> = roots.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let bil = |u: &[i64], v: &[i64]| -> i64 {
            let mut s = 0;
            for i in 0..r {
                if u[i] == 0 {
                    continue;
                }
                for j in 0..r {
                    s += u[i] * v[j] * cartan[i][j] * norms[j];
                }
            }
            s
        };
        let root_norms: Vec<i64> = roots.iter().map(|v| bil(v, v) / 2).collect();
        let coroots: Vec<Vector> = roots
            .iter()
            .zip(&root_norms)
            .map(|(v, &n)| {
                (0..r)
                    .map(|i| {
                        let x = v[i] * norms[i];
                        debug_assert_eq!(x % n, 0);
                        x / n
                    })
                    .collect()
            })
            .collect();
        let reflections = (0..r)
            .map(|i| {
                roots
                    .iter()
                    .map(|v| {
                        let c = pair(v, i);
                        let mut u = v.clone();
                        u[i] -= c;
                        index[&u] as u16
                    })
                    .collect()
            })
            .collect();
        Ok(RootSystem { rank: r, cartan, norms, roots, coroots, root_norms, index, npos, reflections })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Half squared lengths of the simple roots.
    pub fn simple_norms(&self) -> &[i64] {
        &self.norms
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive(&self) -> usize {
        self.npos
    }

    pub fn dim(&self) -> usize {
        self.roots.len() + self.rank
    }

    pub fn roots(&self) -> &[Vector] {
        &self.roots
    }

    pub fn root(&self, k: usize) -> &Vector {
        &self.roots[k]
    }

    pub fn coroot(&self, k: usize) -> &Vector {
        &self.coroots[k]
    }

    pub fn index_of(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn require_root(&self, v: &[i64]) -> Result<usize> {
        self.index_of(v).ok_or_else(|| Error::NotARoot(v.to_vec()))
    }

    pub fn is_positive(&self, k: usize) -> bool {
        k < self.npos
    }

    pub fn negate(&self, k: usize) -> usize {
        if k < self.npos {
            k + self.npos
        } else {
            k - self.npos
        }
    }

    /// Index of the simple root `alpha_i`.
    pub fn simple(&self, i: usize) -> usize {
        self.index[&{
            let mut v = vec![0; self.rank];
            v[i] = 1;
            v
        }]
    }

    pub fn height(&self, k: usize) -> i64 {
        height(&self.roots[k])
    }

    /// Half squared length of root `k`.
    pub fn norm(&self, k: usize) -> i64 {
        self.root_norms[k]
    }

    /// Symmetric form `(u, v)` on root-lattice coordinate vectors.
    pub fn inner(&self, u: &[i64], v: &[i64]) -> i64 {
        let r = self.rank;
        let mut s = 0;
        for i in 0..r {
            for j in 0..r {
                s += u[i] * v[j] * self.cartan[i][j] * self.norms[j];
            }
        }
        s
    }

    /// `<u, v^vee>` for a root-lattice vector `u` and a coroot-lattice vector `v`.
    pub fn pair_vec(&self, u: &[i64], cov: &[i64]) -> i64 {
        let r = self.rank;
        let mut s = 0;
        for i in 0..r {
            if u[i] == 0 {
                continue;
            }
            for j in 0..r {
                s += u[i] * cov[j] * self.cartan[i][j];
            }
        }
        s
    }

    /// `<root a, coroot of root b>`.
    pub fn pairing(&self, a: usize, b: usize) -> i64 {
        self.pair_vec(&self.roots[a], &self.coroots[b])
    }

    /// `<v, alpha_j^vee>` for a root-lattice vector.
    pub fn pair_simple(&self, v: &[i64], j: usize) -> i64 {
        (0..self.rank).map(|i| v[i] * self.cartan[i][j]).sum()
    }

    pub fn reflect(&self, i: usize, k: usize) -> usize {
        self.reflections[i][k] as usize
    }

    pub(crate) fn reflection_table(&self, i: usize) -> &[u16] {
        &self.reflections[i]
    }

    pub fn add(&self, a: usize, b: usize) -> Option<usize> {
        let v: Vector = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x + y).collect();
        self.index_of(&v)
    }

    pub fn is_long(&self, k: usize) -> bool {
        let comp = self.component_of_root(k);
        let maxn = comp.iter().map(|&i| self.norms[i]).max().unwrap_or(1);
        self.root_norms[k] == maxn
    }

    fn component_of_root(&self, k: usize) -> Vec<usize> {
        let support: Vec<usize> = (0..self.rank).filter(|&i| self.roots[k][i] != 0).collect();
        self.components().into_iter().find(|c| c.contains(&support[0])).unwrap()
    }

    /// Connected components of the Dynkin diagram, as sorted node lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(&self.cartan)
    }

    pub fn is_irreducible(&self) -> bool {
        self.rank > 0 && self.components().len() == 1
    }

    fn require_irreducible(&self) -> Result<()> {
        if self.is_irreducible() {
            Ok(())
        } else {
            Err(Error::Reducible(self.type_label()))
        }
    }

    /// Highest root index; requires irreducibility.
    pub fn highest_root(&self) -> Result<usize> {
        self.require_irreducible()?;
        Ok(self.npos - 1)
    }

    /// Marks `m_beta` of the highest root.
    pub fn marks(&self) -> Result<Vec<i64>> {
        Ok(self.roots[self.highest_root()?].clone())
    }

    pub fn coxeter_number(&self) -> Result<i64> {
        Ok(1 + self.marks()?.iter().sum::<i64>())
    }

    /// `<root k, 2 rho^vee>`.
    pub fn rho_pairing(&self, k: usize) -> i64 {
        (0..self.npos).map(|b| self.pairing(k, b)).sum()
    }

    /// Sub-system of the roots with support in `nodes`, renumbered in order.
    pub fn restrict(&self, nodes: &[usize]) -> RootSystem {
        let cartan = nodes.iter().map(|&i| nodes.iter().map(|&j| self.cartan[i][j]).collect()).collect();
        let norms = nodes.iter().map(|&i| self.norms[i]).collect();
        RootSystem::with_norms(cartan, norms).expect("restriction of a finite system")
    }

    /// Identify each irreducible component.
    pub fn component_types(&self) -> Vec<(Vec<usize>, ComponentType)> {
        self.components()
            .into_iter()
            .map(|c| {
                let sub = self.restrict(&c);
                let t = identify(&sub);
                (c, t)
            })
            .collect()
    }

    /// Label such as `E7+A1`; `T` for the empty system.
    pub fn type_label(&self) -> String {
        let mut ts: Vec<ComponentType> = self.component_types().into_iter().map(|(_, t)| t).collect();
        if ts.is_empty() {
            return "T".into();
        }
        ts.sort_by(|a, b| b.rank.cmp(&a.rank).then(a.family.cmp(&b.family)));
        ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+")
    }

    /// Exponents, from the dual of the partition of positive roots by height.
    pub fn exponents(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for c in self.components() {
            let sub = self.restrict(&c);
            let maxh = (0..sub.npos).map(|k| sub.height(k)).max().unwrap_or(0);
            let count = |h: i64| (0..sub.npos).filter(|&k| sub.height(k) == h).count() as i64;
            for h in 1..=maxh {
                let n = count(h) - count(h + 1);
                for _ in 0..n {
                    out.push(h);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.exponents().into_iter().map(|e| e + 1).collect()
    }

    pub fn weyl_order(&self) -> u128 {
        self.degrees().iter().map(|&d| d as u128).product()
    }
}

fn identify(sub: &RootSystem) -> ComponentType {
    let n = sub.rank;
    let total = sub.num_roots();
    let maxn = *sub.norms.iter().max().unwrap();
    let minn = *sub.norms.iter().min().unwrap();
    let long = (0..total).filter(|&k| sub.norm(k) == maxn).count();
    let fam = if maxn == minn {
        match (n, total) {
            (6, 72) => Family::E,
            (7, 126) => Family::E,
            (8, 240) => Family::E,
            _ if total == n * (n + 1) => Family::A,
            _ => Family::D,
        }
    } else if maxn == 3 * minn {
        Family::G
    } else if n == 4 && total == 48 {
        Family::F
    } else if long == 2 * n * (n - 1) {
        Family::B
    } else {
        Family::C
    };
    ComponentType { family: fam, rank: n }
}

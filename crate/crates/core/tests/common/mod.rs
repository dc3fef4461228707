//! Brute-force oracles shared by the integration targets. They work from the
//! raw Cartan matrix only and never call into the engine's Weyl or root code.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Cartan = Vec<Vec<i64>>;

/// All roots in simple-root coordinates, by closing the simple roots under reflections.
pub fn roots(a: &Cartan) -> Vec<Vec<i64>> {
    let r = a.len();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..r {
        let mut e = vec![0; r];
        e[i] = 1;
        for v in [e.clone(), e.iter().map(|x| -x).collect()] {
            if seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    while let Some(b) = queue.pop_front() {
        for j in 0..r {
            let c: i64 = (0..r).map(|i| b[i] * a[i][j]).sum();
            let mut v = b.clone();
            v[j] -= c;
            if seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    out
}

pub fn num_positive(a: &Cartan) -> usize {
    roots(a).iter().filter(|v| v.iter().all(|&x| x >= 0)).count()
}

/// `s_j` on fundamental-coweight coordinates.
fn reflect_coweight(a: &Cartan, j: usize, y: &[i64]) -> Vec<i64> {
    (0..y.len()).map(|i| y[i] - y[j] * a[i][j]).collect()
}

/// Weyl group as integer matrices on coweight coordinates (columns = images of basis).
pub fn weyl_matrices(a: &Cartan, limit: usize) -> Vec<Vec<Vec<i64>>> {
    let r = a.len();
    let id: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|k| (i == k) as i64).collect()).collect();
    let mut seen: HashSet<Vec<Vec<i64>>> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    let mut out = Vec::new();
    while let Some(m) = queue.pop_front() {
        out.push(m.clone());
        assert!(out.len() <= limit, "Weyl group larger than {limit}");
        for j in 0..r {
            let cols: Vec<Vec<i64>> = m.iter().map(|c| reflect_coweight(a, j, c)).collect();
            if seen.insert(cols.clone()) {
                queue.push_back(cols);
            }
        }
    }
    out
}

pub fn apply(m: &[Vec<i64>], y: &[i64]) -> Vec<i64> {
    let r = y.len();
    let mut out = vec![0; r];
    for (k, col) in m.iter().enumerate() {
        for i in 0..r {
            out[i] += col[i] * y[k];
        }
    }
    out
}

/// Solve `a x = b` over Q.
pub fn rational_solve(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<Ratio<i64>>> {
    let n = a.len();
    let mut m: Vec<Vec<Ratio<i64>>> = (0..n)
        .map(|i| a[i].iter().map(|&x| Ratio::from_integer(x)).chain([Ratio::from_integer(b[i])]).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let piv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= piv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c];
                for k in 0..=n {
                    let v = m[c][k];
                    m[i][k] -= f * v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lattice {
    /// All coweights.
    Coweight,
    /// Coroot lattice: columns of the Cartan matrix.
    Coroot,
}

pub fn in_lattice(a: &Cartan, lat: Lattice, y: &[i64]) -> bool {
    match lat {
        Lattice::Coweight => true,
        Lattice::Coroot => rational_solve(a, y).map_or(false, |x| x.iter().all(|c| c.is_integer())),
    }
}

/// Stabilizer data of `lambda / m`: the centralized roots, `|W_s|` and `|W(Phi_H)|`.
#[derive(Debug)]
pub struct Stabilizer {
    pub roots: BTreeSet<Vec<i64>>,
    pub ws: usize,
    pub wh: usize,
    /// Matrices of `W_s`.
    pub elements: Vec<Vec<Vec<i64>>>,
}

pub fn stabilizer(a: &Cartan, lat: Lattice, lambda: &[i64], m: i64) -> Stabilizer {
    let all = roots(a);
    let cent: BTreeSet<Vec<i64>> = all
        .iter()
        .filter(|v| v.iter().zip(lambda).map(|(x, y)| x * y).sum::<i64>().rem_euclid(m) == 0)
        .cloned()
        .collect();
    let ws: Vec<Vec<Vec<i64>>> = weyl_matrices(a, 100_000)
        .into_iter()
        .filter(|w| {
            let d: Vec<i64> = apply(w, lambda).iter().zip(lambda).map(|(x, y)| x - y).collect();
            d.iter().all(|x| x % m == 0) && in_lattice(a, lat, &d.iter().map(|x| x / m).collect::<Vec<_>>())
        })
        .collect();
    // W(Phi_H): close the reflections in the centralized roots
    let r = a.len();
    let refl = |beta: &Vec<i64>| -> Vec<Vec<i64>> {
        // s_beta(y) = y - <beta, y> beta^vee, beta^vee in coweight coordinates
        let bv = coroot_coweight(a, beta);
        (0..r)
            .map(|k| {
                let mut e = vec![0; r];
                e[k] = 1;
                let p = beta[k];
                e.iter().zip(&bv).map(|(x, c)| x - p * c).collect()
            })
            .collect()
    };
    let gens: Vec<_> = cent.iter().filter(|v| v.iter().all(|&x| x >= 0)).map(refl).collect();
    let id: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|k| (i == k) as i64).collect()).collect();
    let mut wh: HashSet<Vec<Vec<i64>>> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(w) = queue.pop_front() {
        for g in &gens {
            let prod: Vec<Vec<i64>> = w.iter().map(|c| apply(g, c)).collect();
            if wh.insert(prod.clone()) {
                queue.push_back(prod);
            }
        }
    }
    Stabilizer { roots: cent, ws: ws.len(), wh: wh.len(), elements: ws }
}

/// `beta^vee` in fundamental-coweight coordinates, from the symmetrized form.
pub fn coroot_coweight(a: &Cartan, beta: &[i64]) -> Vec<i64> {
    let d = symmetrizer(a);
    let r = a.len();
    // (alpha_i, alpha_j) = a[i][j] d_j / 2
    let form = |u: &[i64], v: &[i64]| -> Ratio<i64> {
        let mut s = Ratio::zero();
        for i in 0..r {
            for j in 0..r {
                s += Ratio::new(u[i] * v[j] * a[i][j], 2) * d[j];
            }
        }
        s
    };
    let bb = form(beta, beta);
    (0..r)
        .map(|i| {
            let mut e = vec![0; r];
            e[i] = 1;
            // <alpha_i, beta^vee> = 2 (alpha_i, beta) / (beta, beta)
            let v = form(&e, beta) * 2 / bb;
            assert!(v.is_integer());
            v.to_integer()
        })
        .collect()
}

/// `d_j = (alpha_j, alpha_j)` making `d_j a[i][j]` symmetric.
fn symmetrizer(a: &Cartan) -> Vec<Ratio<i64>> {
    let r = a.len();
    let mut d: Vec<Option<Ratio<i64>>> = vec![None; r];
    for start in 0..r {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Ratio::one());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..r {
                if a[i][j] != 0 && d[j].is_none() {
                    // d_j a[i][j] = d_i a[j][i]
                    d[j] = Some(d[i].unwrap() * a[j][i] / a[i][j]);
                    stack.push(j);
                }
            }
        }
    }
    d.into_iter().map(|x| x.unwrap()).collect()
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Poincare polynomial `sum_w q^{l(w)}` of the parabolic on `nodes`, via the
/// chain `W_J = W_K x W^J` with `W^J` read off the orbit of a fundamental weight.
pub fn poincare(a: &Cartan, nodes: &[usize]) -> Vec<i64> {
    let Some((&j, rest)) = nodes.split_last() else {
        return vec![1];
    };
    let r = a.len();
    let mut start = vec![0i64; r];
    start[j] = 1;
    let mut depth: HashMap<Vec<i64>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(l) = queue.pop_front() {
        let dl = depth[&l];
        for &i in nodes {
            if l[i] > 0 {
                // s_i lambda = lambda - lambda_i alpha_i, alpha_i in weight coordinates = row i
                let v: Vec<i64> = (0..r).map(|k| l[k] - l[i] * a[i][k]).collect();
                if !depth.contains_key(&v) {
                    depth.insert(v.clone(), dl + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    let maxd = depth.values().copied().max().unwrap_or(0);
    let mut orbit = vec![0i64; maxd + 1];
    for d in depth.values() {
        orbit[*d] += 1;
    }
    poly_mul(&poincare(a, rest), &orbit)
}

/// `|G(F_q)| = q^N (q - 1)^rank P_W(q)` for a split group, from the Bruhat decomposition.
pub fn split_group_order(a: &Cartan, torus_rank: usize, q: i64) -> BigInt {
    let nodes: Vec<usize> = (0..a.len()).collect();
    let p = poincare(a, &nodes);
    let qb = BigInt::from(q);
    let pw: BigInt = p.iter().rev().fold(BigInt::zero(), |acc, c| acc * &qb + BigInt::from(*c));
    let n = if a.is_empty() { 0 } else { num_positive(a) };
    qb.pow(n as u32) * (&qb - BigInt::one()).pow(torus_rank as u32) * pw
}

/// Remove every factor of `p` from `n`.
pub fn strip_p(n: &BigInt, p: i64) -> BigInt {
    let mut n = n.clone();
    let pb = BigInt::from(p);
    while (&n % &pb).is_zero() {
        n /= &pb;
    }
    n
}

/// Characteristic of `F_q` for the prime powers used in the tests.
pub fn characteristic(q: i64) -> i64 {
    (2..=q).find(|p| q % p == 0).unwrap()
}

pub const Q_VALUES: [i64; 7] = [2, 3, 4, 5, 7, 8, 9];

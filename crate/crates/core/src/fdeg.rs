//! Orders of finite reductive groups and the exponent bookkeeping relating
//! formal degrees of depth-zero supercuspidals to their unipotent partners.
//!
//! Rational functions of `q` are kept as `c * q^a * prod Phi_m(q)^{e_m}` over
//! cyclotomic polynomials, which makes reduction a matter of adding exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::affine::FrobeniusForm;
use crate::centralizer::PseudoLevi;
use crate::error::{Error, Result};
use crate::linalg::Int;
use crate::rootcore::{CartanType, Family, RootDatum, RootSystem};

/// Label attached to every conductor/gamma output: only the inertia part is modeled.
pub const TAME_PART: &str = "tame-part";

// ---------------------------------------------------------------------------
// integer polynomials, lowest degree first

pub fn poly_mul<T: Int>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Quotient and remainder by a monic divisor.
pub fn poly_divmod<T: Int>(a: &[T], b: &[T]) -> (Vec<T>, Vec<T>) {
    assert!(b.last().map_or(false, |c| c.is_one()), "divisor must be monic");
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![T::zero(); r.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let c = r[k + b.len() - 1].clone();
        if c.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[k + j] = r[k + j].clone() - c.clone() * y.clone();
        }
        q[k] = c;
    }
    while r.last().map_or(false, |c| c.is_zero()) {
        r.pop();
    }
    (q, r)
}

pub fn poly_eval<T: Int>(a: &[T], x: &T) -> T {
    a.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

fn poly_to_string<T: Int>(a: &[T]) -> String {
    let mut terms = Vec::new();
    for (k, c) in a.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = match k {
            0 => format!("{mag}"),
            1 if mag.is_one() => "q".to_string(),
            1 => format!("{mag}q"),
            _ if mag.is_one() => format!("q^{k}"),
            _ => format!("{mag}q^{k}"),
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        terms.push((sign, body));
    }
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (sign, body)) in terms.iter().enumerate() {
        match (i, *sign) {
            (0, "-") => s.push('-'),
            (0, _) => {}
            (_, sg) => s.push_str(&format!(" {sg} ")),
        }
        s.push_str(body);
    }
    s
}

/// `Phi_n` with integer coefficients.
pub fn cyclotomic(n: u64) -> Vec<BigInt> {
    let mut p: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    p[0] = -BigInt::one();
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let (q, r) = poly_divmod(&p, &cyclotomic(d));
            debug_assert!(r.is_empty());
            p = q;
        }
    }
    p
}

fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// `m` such that `Phi_k(q^d) = prod Phi_m(q)`.
fn cyclotomic_substitution(k: u64, d: u64) -> Vec<u64> {
    (1..=k * d).filter(|&m| (k * d) % m == 0 && m / m.gcd(&d) == k).collect()
}

// ---------------------------------------------------------------------------
// rational functions in factored form

/// `constant * q^q_power * prod_m Phi_m(q)^{phi[m]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFunction {
    pub constant: Ratio<BigInt>,
    pub q_power: i64,
    pub phi: BTreeMap<u64, i64>,
}

impl QFunction {
    pub fn one() -> Self {
        Self::constant(Ratio::one())
    }

    pub fn constant(c: Ratio<BigInt>) -> Self {
        QFunction { constant: c, q_power: 0, phi: BTreeMap::new() }
    }

    pub fn q_power(a: i64) -> Self {
        QFunction { q_power: a, ..Self::one() }
    }

    /// `Phi_k(q^d)^e`.
    pub fn cyclotomic_at_power(k: u64, d: u64, e: i64) -> Self {
        let mut out = Self::one();
        for m in cyclotomic_substitution(k, d) {
            *out.phi.entry(m).or_insert(0) += e;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut phi = self.phi.clone();
        for (&m, &e) in &other.phi {
            *phi.entry(m).or_insert(0) += e;
        }
        phi.retain(|_, e| *e != 0);
        QFunction { constant: &self.constant * &other.constant, q_power: self.q_power + other.q_power, phi }
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.constant.is_zero(), "inverse of zero");
        QFunction {
            constant: self.constant.recip(),
            q_power: -self.q_power,
            phi: self.phi.iter().map(|(&m, &e)| (m, -e)).collect(),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inverse())
    }

    pub fn is_polynomial(&self) -> bool {
        self.q_power >= 0 && self.phi.values().all(|&e| e >= 0) && self.constant.is_integer()
    }

    /// Integer numerator and denominator polynomials; the constant stays separate.
    pub fn expand(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let mut num = vec![BigInt::one()];
        let mut den = vec![BigInt::one()];
        for (&m, &e) in &self.phi {
            let c = cyclotomic(m);
            for _ in 0..e.abs() {
                if e > 0 {
                    num = poly_mul(&num, &c);
                } else {
                    den = poly_mul(&den, &c);
                }
            }
        }
        let shift = |p: Vec<BigInt>, k: i64| {
            let mut v = vec![BigInt::zero(); k as usize];
            v.extend(p);
            v
        };
        if self.q_power >= 0 {
            (shift(num, self.q_power), den)
        } else {
            (num, shift(den, -self.q_power))
        }
    }

    pub fn eval(&self, q: i64) -> Ratio<BigInt> {
        assert!(q > 1, "evaluation only at q > 1");
        let x = BigInt::from(q);
        let mut v = self.constant.clone();
        for (&m, &e) in &self.phi {
            let c = poly_eval(&cyclotomic(m), &x);
            let p = Ratio::from_integer(c.pow(e.unsigned_abs() as u32));
            v = if e > 0 { v * p } else { v / p };
        }
        let qp = Ratio::from_integer(x.pow(self.q_power.unsigned_abs() as u32));
        if self.q_power >= 0 {
            v * qp
        } else {
            v / qp
        }
    }
}

impl fmt::Display for QFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.expand();
        // scalar factor times polynomial, parenthesized only when both are nontrivial
        let part = |c: &BigInt, p: &[BigInt], paren: bool| {
            let body = poly_to_string(p);
            match (c.is_one(), p.len() == 1) {
                (_, true) => format!("{}", c * &p[0]),
                (true, false) if paren && body.contains(' ') => format!("({body})"),
                (true, false) => body,
                (false, false) => format!("{c}*({body})"),
            }
        };
        let d = part(self.constant.denom(), &den, true);
        let n = part(self.constant.numer(), &num, d != "1");
        if d == "1" {
            write!(f, "{n}")
        } else if d.contains('*') {
            write!(f, "{n}/({d})")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

impl Serialize for QFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

// ---------------------------------------------------------------------------
// order polynomials

/// `eps = exp(2 pi i num/den)`; `den <= 2` for real signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootOfUnity {
    pub num: u64,
    pub den: u64,
}

impl RootOfUnity {
    pub const ONE: Self = RootOfUnity { num: 0, den: 1 };
    pub const MINUS_ONE: Self = RootOfUnity { num: 1, den: 2 };

    pub fn new(num: u64, den: u64) -> Self {
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        RootOfUnity { num: num % den, den }
    }

    pub fn sign(self) -> Option<i64> {
        match self.den {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign() {
            Some(1) => write!(f, "+1"),
            Some(_) => write!(f, "-1"),
            None => write!(f, "exp(2pi i*{}/{})", self.num, self.den),
        }
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One factor `q^degree - eps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Factor {
    pub degree: u64,
    pub eps: RootOfUnity,
}

/// Exponents, degrees and Frobenius eigenvalues on the basic invariants.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentTable {
    pub type_label: String,
    pub exponents: Vec<u64>,
    pub degrees: Vec<u64>,
    pub eps: Vec<RootOfUnity>,
}

impl ExponentTable {
    /// Split group with root system `sys` and a maximal torus of rank `rank`.
    pub fn split(sys: &RootSystem, rank: usize) -> Result<Self> {
        if rank < sys.rank() {
            return Err(Error::InvalidInput("torus rank below semisimple rank".into()));
        }
        let mut exponents: Vec<u64> = vec![0; rank - sys.rank()];
        exponents.extend(sys.exponents().into_iter().map(|e| e as u64));
        exponents.sort_unstable();
        let degrees = exponents.iter().map(|e| e + 1).collect();
        Ok(ExponentTable { type_label: sys.type_label(), eps: vec![RootOfUnity::ONE; rank], exponents, degrees })
    }

    /// Quasi-split twisted simple type; `Unsupported` outside the table.
    pub fn twisted(t: CartanType) -> Result<Self> {
        let n = t.rank as u64;
        let plus = RootOfUnity::ONE;
        let minus = RootOfUnity::MINUS_ONE;
        let rows: Vec<(u64, RootOfUnity)> = match (t.family, t.twist) {
            (_, 1) => return Self::split(&RootSystem::of_type(t), t.rank),
            // graph automorphism acts on the degree-d invariant by (-1)^d
            (Family::A, 2) => (2..=n + 1).map(|d| (d, if d % 2 == 0 { plus } else { minus })).collect(),
            // only the Pfaffian (degree n) changes sign
            (Family::D, 2) => {
                let mut v: Vec<_> = (1..n).map(|i| (2 * i, plus)).collect();
                v.push((n, minus));
                v
            }
            // triality rotates the two degree-4 invariants by a cube root of unity
            (Family::D, 3) if n == 4 => {
                vec![(2, plus), (4, RootOfUnity::new(1, 3)), (4, RootOfUnity::new(2, 3)), (6, plus)]
            }
            // odd degrees 5 and 9 change sign
            (Family::E, 2) if n == 6 => {
                [2, 5, 6, 8, 9, 12].iter().map(|&d| (d, if d % 2 == 1 { minus } else { plus })).collect()
            }
            _ => return Err(Error::Unsupported(format!("no sign table for {}", t.label()))),
        };
        let mut rows = rows;
        rows.sort();
        Ok(ExponentTable {
            type_label: t.label(),
            exponents: rows.iter().map(|r| r.0 - 1).collect(),
            degrees: rows.iter().map(|r| r.0).collect(),
            eps: rows.iter().map(|r| r.1).collect(),
        })
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// `sum (2 e_i + 1)`.
    pub fn dim(&self) -> u64 {
        self.exponents.iter().map(|e| 2 * e + 1).sum()
    }

    pub fn num_positive(&self) -> u64 {
        self.exponents.iter().sum()
    }

    pub fn weyl_order(&self) -> u128 {
        self.degrees.iter().map(|&d| d as u128).product()
    }
}

/// `|G(F_q)| = q^N prod (q^{d_i} - eps_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderPolynomial {
    pub label: String,
    pub n: u64,
    pub factors: Vec<Factor>,
}

impl OrderPolynomial {
    pub fn from_table(t: &ExponentTable) -> Self {
        let mut factors: Vec<Factor> =
            t.degrees.iter().zip(&t.eps).map(|(&degree, &eps)| Factor { degree, eps }).collect();
        factors.sort();
        OrderPolynomial { label: t.type_label.clone(), n: t.num_positive(), factors }
    }

    /// Split reductive group: root system `sys`, maximal torus of rank `rank`.
    pub fn split(sys: &RootSystem, rank: usize) -> Result<Self> {
        Ok(Self::from_table(&ExponentTable::split(sys, rank)?))
    }

    pub fn dim(&self) -> u64 {
        self.n + self.factors.iter().map(|f| f.degree).sum::<u64>()
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// `prod (q^{d_i} - eps_i)`, the prime-to-`p` part.
    pub fn pprime(&self) -> QFunction {
        // group conjugate eigenvalues: prod over primitive k-th roots of (x - zeta) = Phi_k(x)
        let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for f in &self.factors {
            *counts.entry((f.degree, f.eps.den)).or_insert(0) += 1;
        }
        let mut out = QFunction::one();
        for ((d, k), c) in counts {
            let orbit = euler_phi(k);
            assert!(c % orbit == 0, "non-real eigenvalues must come in Galois orbits");
            out = out.mul(&QFunction::cyclotomic_at_power(k, d, (c / orbit) as i64));
        }
        out
    }

    pub fn full(&self) -> QFunction {
        self.pprime().mul(&QFunction::q_power(self.n as i64))
    }

    pub fn eval(&self, q: i64) -> BigInt {
        self.full().eval(q).to_integer()
    }
}

impl fmt::Display for OrderPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = match self.n {
            0 => String::new(),
            1 => "q".to_string(),
            n => format!("q^{n}"),
        };
        let mut i = 0;
        while i < self.factors.len() {
            let fc = self.factors[i];
            let body = match fc.eps.sign() {
                Some(1) => format!("(q^{} - 1)", fc.degree),
                Some(_) => format!("(q^{} + 1)", fc.degree),
                None => {
                    // conjugate pair (q^d - w)(q^d - w^-1) = q^2d - 2cos(..)q^d + 1; only cube roots occur
                    i += 1;
                    format!("(q^{} + q^{} + 1)", 2 * fc.degree, fc.degree)
                }
            };
            s.push_str(&body.replace("q^1 ", "q "));
            i += 1;
        }
        if s.is_empty() {
            s.push('1');
        }
        write!(f, "{s}")
    }
}

/// Order polynomial of `d` with Frobenius `form`; inner twists do not change the order.
pub fn order_polynomial(d: &RootDatum, form: &FrobeniusForm) -> Result<OrderPolynomial> {
    let t = form.cartan_type;
    if d.rank() != t.rank || d.system().cartan() != RootSystem::of_type(t.split()).cartan() {
        return Err(Error::InvalidInput(format!("form {} does not match the root datum", form.label())));
    }
    Ok(OrderPolynomial::from_table(&ExponentTable::twisted(t)?))
}

// ---------------------------------------------------------------------------
// exponent bookkeeping

/// `N - dim G` for a pro-p Iwahori of the split group.
pub fn iwahori_volume_exponent(d: &RootDatum) -> i64 {
    -((d.system().num_positive() + d.rank()) as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioExponent {
    pub dim_g: u64,
    pub dim_h: u64,
    pub n_g: u64,
    pub n_h: u64,
    /// `(dim G - dim H) / 2`.
    pub exponent: i64,
    /// `N_G - N_H` equals `exponent`.
    pub cross_check: bool,
}

fn check_equal_rank(d: &RootDatum, h: &PseudoLevi) -> Result<()> {
    if h.point.coords.len() != d.rank() {
        return Err(Error::InvalidInput(format!(
            "pseudo-Levi of rank {} inside a datum of rank {}",
            h.point.coords.len(),
            d.rank()
        )));
    }
    if h.roots.iter().any(|&k| k >= d.system().num_roots()) {
        return Err(Error::InvalidInput("pseudo-Levi roots outside the root system".into()));
    }
    Ok(())
}

pub fn fdeg_ratio_exponent(d: &RootDatum, h: &PseudoLevi) -> Result<RatioExponent> {
    check_equal_rank(d, h)?;
    let r = d.rank();
    let dim_g = d.system().dim() as u64;
    let dim_h = h.dim(r) as u64;
    let diff = dim_g as i64 - dim_h as i64;
    if diff % 2 != 0 {
        return Err(Error::InvalidInput("odd dimension difference".into()));
    }
    let n_g = d.system().num_positive() as u64;
    let n_h = h.roots.iter().filter(|&&k| d.system().is_positive(k)).count() as u64;
    let exponent = diff / 2;
    Ok(RatioExponent { dim_g, dim_h, n_g, n_h, exponent, cross_check: n_g as i64 - n_h as i64 == exponent })
}

#[derive(Clone, Debug, Serialize)]
pub struct TameConductor {
    pub label: &'static str,
    pub dim_g_dual: u64,
    pub dim_h_dual: u64,
    /// `dim g^ - dim h^`: the inertia-moved part of the adjoint representation.
    pub conductor: i64,
    /// Exponent of `|gamma(0, phi, Ad)| / |gamma(0, phi_H, Ad)|`.
    pub gamma_exponent: i64,
}

/// Dimensions are read off the dual side: coroots of `H` span `h^`.
pub fn tame_adjoint_conductor(d: &RootDatum, h: &PseudoLevi) -> Result<TameConductor> {
    check_equal_rank(d, h)?;
    let dual = d.dual();
    let r = dual.rank() as u64;
    let sys = d.system();
    let dsys = dual.system();
    let mut coroots: Vec<usize> = h.roots.iter().map(|&k| dsys.require_root(sys.coroot(k))).collect::<Result<_>>()?;
    coroots.sort_unstable();
    coroots.dedup();
    let dim_g_dual = dsys.num_roots() as u64 + r;
    let dim_h_dual = coroots.len() as u64 + r;
    let conductor = dim_g_dual as i64 - dim_h_dual as i64;
    Ok(TameConductor { label: TAME_PART, dim_g_dual, dim_h_dual, conductor, gamma_exponent: conductor / 2 })
}

#[derive(Clone, Debug, Serialize)]
pub struct PprimeRatio {
    /// `|H^1(k)|_{p'}` = multiplier times `|H(k)|_{p'}`.
    pub h1_pprime: QFunction,
    /// `|G(k)|_{p'} / |H^1(k)|_{p'}`.
    pub dimension_ratio: QFunction,
    /// `dimension_ratio` times the component multiplier, reduced.
    pub reduced: QFunction,
    pub component_order: u64,
    /// Power of `q` left after dividing the full orders.
    pub q_exponent: i64,
    pub is_polynomial: bool,
}

impl PprimeRatio {
    pub fn matches_exponent(&self, e: &RatioExponent) -> bool {
        self.q_exponent == e.exponent && e.cross_check
    }
}

pub fn pprime_ratio(gq: &OrderPolynomial, hq: &OrderPolynomial, component_order: u64) -> Result<PprimeRatio> {
    if component_order == 0 {
        return Err(Error::InvalidInput("component multiplier must be positive".into()));
    }
    let c = QFunction::constant(Ratio::from_integer(BigInt::from(component_order)));
    let h1_pprime = hq.pprime().mul(&c);
    let dimension_ratio = gq.pprime().div(&h1_pprime);
    let reduced = dimension_ratio.mul(&c);
    let full = gq.full().div(&hq.full());
    debug_assert_eq!(full.div(&QFunction::q_power(full.q_power)), reduced);
    Ok(PprimeRatio {
        is_polynomial: reduced.is_polynomial(),
        q_exponent: full.q_power,
        h1_pprime,
        dimension_ratio,
        reduced,
        component_order,
    })
}

/// One report row for a pseudo-Levi of a split group.
#[derive(Clone, Debug, Serialize)]
pub struct FdegRow {
    #[serde(rename = "type")]
    pub type_label: String,
    pub form: String,
    pub kac: Vec<i64>,
    pub order: i64,
    pub pseudo_levi: String,
    pub n_g: u64,
    pub n_h: u64,
    pub dim_g: u64,
    pub dim_h: u64,
    pub iwahori_exponent_g: i64,
    pub ratio_exponent: i64,
    pub cross_check: bool,
    pub conductor: TameConductor,
    pub order_g: String,
    pub order_h: String,
    pub component_order: u64,
    pub pprime_ratio: QFunction,
    pub pprime_matches_exponent: bool,
}

pub fn fdeg_row(d: &RootDatum, h: &PseudoLevi, component_order: u64) -> Result<FdegRow> {
    let e = fdeg_ratio_exponent(d, h)?;
    let cond = tame_adjoint_conductor(d, h)?;
    let gq = OrderPolynomial::split(d.system(), d.rank())?;
    let sub = crate::affine::subsystem_of_basis(d.system(), &h.basis);
    let hq = OrderPolynomial::split(&sub, d.rank())?;
    let p = pprime_ratio(&gq, &hq, component_order)?;
    Ok(FdegRow {
        type_label: d.cartan_type.map(|t| t.label()).unwrap_or_else(|| d.system().type_label()),
        form: "split".into(),
        kac: h.kac.clone(),
        order: h.point.order,
        pseudo_levi: h.type_label.clone(),
        n_g: e.n_g,
        n_h: e.n_h,
        dim_g: e.dim_g,
        dim_h: e.dim_h,
        iwahori_exponent_g: iwahori_volume_exponent(d),
        ratio_exponent: e.exponent,
        cross_check: e.cross_check && cond.conductor == 2 * e.exponent,
        conductor: cond,
        order_g: gq.to_string(),
        order_h: hq.to_string(),
        component_order,
        pprime_matches_exponent: p.matches_exponent(&e),
        pprime_ratio: p.reduced,
    })
}

//! Exact arithmetic in `O_F` and `F` with explicit precision tracking.
//!
//! A base field `F/Q_p` is described by a [`BaseFieldSpec`]: either `Q_p`
//! itself, the unramified extension of residue degree `h`, or a totally
//! ramified extension cut out by a monic Eisenstein polynomial. Mixed
//! extensions (`e > 1` and `h > 1` at the same time) are rejected at
//! construction.
//!
//! Elements are stored as residue-class polynomials in `Z_p[x]/(f)` whose
//! coordinates are reduced modulo `p^ceil(N/e)`, where `N` is the absolute
//! precision of the element in `pi_F`-units. An [`FElement`] is a unit of
//! `O_F` times a (possibly negative) power of `pi_F`, kept in canonical
//! form; zero is a distinguished exact value. All operations propagate
//! the worst-case precision, so a pipeline recomputed at higher precision
//! and truncated reproduces the lower-precision run digit for digit.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Coefficient integer type.
pub type Int = BigInt;

/// Shared handle to a base-field description.
pub type FieldSpec = Arc<BaseFieldSpec>;

/// Which kind of extension of `Q_p` the base field is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// `F = Q_p`, `pi_F = p`.
    Qp,
    /// Unramified of residue degree `h`, `pi_F = p`.
    Unramified { h: u32 },
    /// Totally ramified, cut out by the given monic Eisenstein polynomial
    /// (coefficients listed from the constant term up); `pi_F` is the
    /// class of `x`.
    Eisenstein { e: u32, poly: Vec<Int> },
}

/// A p-adic base field `F/Q_p` together with its derived constants.
pub struct BaseFieldSpec {
    p: u64,
    p_big: Int,
    flavor: Flavor,
    h: u32,
    e: u32,
    /// Monic defining polynomial of `O_F = Z_p[x]/(f)`, constant term first.
    /// For `Q_p` this is `x`, so elements have a single coordinate.
    defining: Vec<Int>,
    /// Cached Frobenius image of the class of `x`, keyed by the coordinate
    /// modulus exponent it was lifted to.
    sigma: Mutex<Option<(u32, Vec<Int>)>>,
}

impl fmt::Debug for BaseFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseFieldSpec")
            .field("p", &self.p)
            .field("flavor", &self.flavor)
            .finish()
    }
}

impl PartialEq for BaseFieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.flavor == other.flavor
    }
}
impl Eq for BaseFieldSpec {}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

// ---------------------------------------------------------------------------
// F_p[x] helpers for the residue-polynomial search (small, u64 coefficients).
// ---------------------------------------------------------------------------

fn fp_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // f is monic
    let d = f.len() - 1;
    for i in (d..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..d {
            let t = (c * f[j]) % p;
            prod[i - d + j] = (prod[i - d + j] + p * p - t) % p;
        }
    }
    prod.truncate(d.max(1));
    fp_trim(&mut prod);
    prod
}

fn fp_powmod(a: &[u64], mut n: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut base = a.to_vec();
    let mut acc = vec![1u64];
    while n > 0 {
        if n & 1 == 1 {
            acc = fp_mulmod(&acc, &base, f, p);
        }
        base = fp_mulmod(&base, &base, f, p);
        n >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let inv = |x: u64| -> u64 {
        // Fermat inverse mod p
        let mut r = 1u64;
        let mut base = x % p;
        let mut n = p - 2;
        while n > 0 {
            if n & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            n >>= 1;
        }
        r
    };
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // a mod b
        let db = b.len() - 1;
        let lb_inv = inv(b[db]);
        while a.len() - 1 >= db && !(a.len() == 1 && a[0] == 0) {
            let da = a.len() - 1;
            let c = a[da] * lb_inv % p;
            if c != 0 {
                for j in 0..=db {
                    let t = c * b[j] % p;
                    a[da - db + j] = (a[da - db + j] + p - t) % p;
                }
            }
            fp_trim(&mut a);
            if a.len() - 1 < db || (a.len() == 1 && a[0] == 0) {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let h = (f.len() - 1) as u32;
    let x = vec![0u64, 1];
    // x^(p^h) == x mod f
    let mut g = x.clone();
    for _ in 0..h {
        g = fp_powmod(&g, p, f, p);
    }
    let mut diff = g.clone();
    while diff.len() < 2 {
        diff.push(0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    fp_trim(&mut diff);
    if !(diff.len() == 1 && diff[0] == 0) {
        return false;
    }
    // gcd(x^(p^(h/l)) - x, f) == 1 for prime l | h
    let mut l = 2u32;
    let mut rem = h;
    let mut prime_divisors = Vec::new();
    while l * l <= rem {
        if rem % l == 0 {
            prime_divisors.push(l);
            while rem % l == 0 {
                rem /= l;
            }
        }
        l += 1;
    }
    if rem > 1 {
        prime_divisors.push(rem);
    }
    for l in prime_divisors {
        let mut g = x.clone();
        for _ in 0..(h / l) {
            g = fp_powmod(&g, p, f, p);
        }
        let mut diff = g.clone();
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        fp_trim(&mut diff);
        let gcd = fp_gcd(&diff, f, p);
        if !(gcd.len() == 1 && gcd[0] != 0) {
            return false;
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree `h` over `F_p`, ordered
/// by the value `c_0 + c_1 p + ...` of its non-leading coefficients.
fn find_residue_polynomial(p: u64, h: u32) -> Vec<u64> {
    let d = h as usize;
    let mut value = 0u64;
    loop {
        let mut coeffs = vec![0u64; d + 1];
        let mut v = value;
        for c in coeffs.iter_mut().take(d) {
            *c = v % p;
            v /= p;
        }
        coeffs[d] = 1;
        if v == 0 && fp_is_irreducible(&coeffs, p) {
            return coeffs;
        }
        value += 1;
    }
}

impl BaseFieldSpec {
    /// The field `Q_p`.
    pub fn qp(p: u64) -> Result<FieldSpec> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        Ok(Arc::new(BaseFieldSpec {
            p,
            p_big: Int::from(p),
            flavor: Flavor::Qp,
            h: 1,
            e: 1,
            defining: vec![Int::zero(), Int::one()],
            sigma: Mutex::new(None),
        }))
    }

    /// The unramified extension of `Q_p` of residue degree `h`, with the
    /// canonical defining polynomial (smallest lift of the first monic
    /// irreducible residue polynomial).
    pub fn unramified(p: u64, h: u32) -> Result<FieldSpec> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        if h == 0 {
            return Err(Error::InvalidSpec("residue degree must be >= 1".into()));
        }
        if h == 1 {
            return Self::qp(p);
        }
        let res_poly = find_residue_polynomial(p, h);
        let defining: Vec<Int> = res_poly.iter().map(|&c| Int::from(c)).collect();
        Ok(Arc::new(BaseFieldSpec {
            p,
            p_big: Int::from(p),
            flavor: Flavor::Unramified { h },
            h,
            e: 1,
            defining,
            sigma: Mutex::new(None),
        }))
    }

    /// A totally ramified extension cut out by a monic Eisenstein
    /// polynomial, constant term first.
    pub fn eisenstein(p: u64, poly: Vec<Int>) -> Result<FieldSpec> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        if poly.len() < 3 {
            return Err(Error::InvalidSpec(
                "Eisenstein polynomial must have degree >= 2 (use qp otherwise)".into(),
            ));
        }
        let e = (poly.len() - 1) as u32;
        let p_big = Int::from(p);
        if !poly.last().unwrap().is_one() {
            return Err(Error::InvalidSpec("defining polynomial must be monic".into()));
        }
        for c in &poly[..poly.len() - 1] {
            if !(c % &p_big).is_zero() {
                return Err(Error::InvalidSpec(
                    "non-leading Eisenstein coefficients must be divisible by p".into(),
                ));
            }
        }
        let c0_over_p = &poly[0] / &p_big;
        if (&c0_over_p % &p_big).is_zero() {
            return Err(Error::InvalidSpec(
                "Eisenstein constant term must be p times a unit".into(),
            ));
        }
        Ok(Arc::new(BaseFieldSpec {
            p,
            p_big,
            flavor: Flavor::Eisenstein { e, poly: poly.clone() },
            h: 1,
            e,
            defining: poly,
            sigma: Mutex::new(None),
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn p_big(&self) -> &Int {
        &self.p_big
    }
    pub fn flavor(&self) -> &Flavor {
        &self.flavor
    }
    /// Residue degree.
    pub fn res_degree(&self) -> u32 {
        self.h
    }
    /// Ramification index.
    pub fn ram_index(&self) -> u32 {
        self.e
    }
    /// Residue field cardinality `q = p^h`.
    pub fn q(&self) -> u64 {
        self.p.pow(self.h)
    }
    pub fn q_big(&self) -> Int {
        self.p_big.pow(self.h)
    }
    /// Degree of the defining polynomial (number of coordinates).
    pub fn deg(&self) -> usize {
        self.defining.len() - 1
    }
    pub fn defining(&self) -> &[Int] {
        &self.defining
    }

    /// Coordinate modulus exponent for absolute precision `n` (pi-units).
    fn mod_exp(&self, n: i64) -> u32 {
        if n <= 0 {
            0
        } else {
            ((n as u64).div_ceil(self.e as u64)) as u32
        }
    }

    fn p_pow(&self, m: u32) -> Int {
        self.p_big.pow(m)
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!(
                "p={} {:?} vs p={} {:?}",
                self.p, self.flavor, other.p, other.flavor
            )))
        }
    }
}

// ---------------------------------------------------------------------------
// Raw polynomial arithmetic in Z[x]/(f) with coefficients mod p^m.
// ---------------------------------------------------------------------------

fn raw_reduce_mod_f(spec: &BaseFieldSpec, mut c: Vec<Int>) -> Vec<Int> {
    let d = spec.deg();
    for i in (d..c.len()).rev() {
        if c[i].is_zero() {
            continue;
        }
        let top = std::mem::replace(&mut c[i], Int::zero());
        for j in 0..d {
            let t = &top * &spec.defining[j];
            c[i - d + j] -= t;
        }
    }
    c.truncate(d);
    while c.len() < d {
        c.push(Int::zero());
    }
    c
}

fn raw_mod_pm(spec: &BaseFieldSpec, c: &mut [Int], m: u32) {
    let modulus = spec.p_pow(m);
    for x in c.iter_mut() {
        *x = x.mod_floor(&modulus);
    }
}

fn raw_mul(spec: &BaseFieldSpec, a: &[Int], b: &[Int], m: u32) -> Vec<Int> {
    let mut prod = vec![Int::zero(); a.len() + b.len().max(1) - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            prod[i + j] += ai * bj;
        }
    }
    let mut r = raw_reduce_mod_f(spec, prod);
    raw_mod_pm(spec, &mut r, m);
    r
}

/// Inverse of a unit of `O_F` modulo `p^m` (Newton lift from the residue ring).
fn raw_inv(spec: &BaseFieldSpec, a: &[Int], m: u32) -> Result<Vec<Int>> {
    let d = spec.deg();
    // inverse in O_F / p
    let mut z: Vec<Int> = match spec.flavor {
        Flavor::Qp | Flavor::Unramified { .. } => {
            // residue field F_q: z0 = abar^(q-2)
            let mut acc = vec![Int::one()];
            let mut base: Vec<Int> = a.to_vec();
            raw_mod_pm(spec, &mut base, 1);
            let mut n = spec.q() - 2;
            while n > 0 {
                if n & 1 == 1 {
                    acc = raw_mul(spec, &acc, &base, 1);
                }
                base = raw_mul(spec, &base, &base, 1);
                n >>= 1;
            }
            acc.resize(d, Int::zero());
            acc
        }
        Flavor::Eisenstein { .. } => {
            // residue ring F_p[x]/(x^e): invert the unit constant term and
            // run Newton until the nilpotent part is exhausted.
            let a0 = a[0].mod_floor(&spec.p_big);
            if a0.is_zero() {
                return Err(Error::NotInvertible("constant term divisible by p".into()));
            }
            let inv0 = mod_inverse_int(&a0, &spec.p_big)?;
            let mut z = vec![Int::zero(); d];
            z[0] = inv0;
            let steps = 64 - (d as u64).leading_zeros() + 1;
            for _ in 0..steps {
                z = newton_inv_step(spec, a, &z, 1);
            }
            z
        }
    };
    // lift mod p^m by doubling
    let mut k = 1u32;
    while k < m {
        k = (2 * k).min(m);
        z = newton_inv_step(spec, a, &z, k);
    }
    z.resize(d, Int::zero());
    Ok(z)
}

fn newton_inv_step(spec: &BaseFieldSpec, a: &[Int], z: &[Int], m: u32) -> Vec<Int> {
    // z <- z(2 - a z) mod (f, p^m)
    let az = raw_mul(spec, a, z, m);
    let mut two_minus = vec![Int::zero(); spec.deg()];
    two_minus[0] = Int::from(2);
    for (t, s) in two_minus.iter_mut().zip(az.iter()) {
        *t -= s;
    }
    raw_mul(spec, z, &two_minus, m)
}

fn mod_inverse_int(a: &Int, modulus: &Int) -> Result<Int> {
    let g = a.extended_gcd(modulus);
    if !g.gcd.is_one() {
        return Err(Error::NotInvertible(format!("{a} mod {modulus}")));
    }
    Ok(g.x.mod_floor(modulus))
}

fn val_p_int(mut x: Int, p: &Int) -> i64 {
    debug_assert!(!x.is_zero());
    let mut v = 0i64;
    loop {
        let (q, r) = x.div_rem(p);
        if r.is_zero() {
            v += 1;
            x = q;
        } else {
            return v;
        }
    }
}

// ---------------------------------------------------------------------------
// Precision
// ---------------------------------------------------------------------------

/// Absolute precision in `pi_F`-units. `Exact` is reserved for the exact
/// zero; every other element carries a finite precision.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Prec {
    Finite(i64),
    Exact,
}

impl Prec {
    pub fn finite(self) -> Option<i64> {
        match self {
            Prec::Finite(n) => Some(n),
            Prec::Exact => None,
        }
    }

    fn plus(self, v: i64) -> Prec {
        match self {
            Prec::Finite(n) => Prec::Finite(n.saturating_add(v)),
            Prec::Exact => Prec::Exact,
        }
    }
}

/// A pi-adic valuation, possibly infinite (exact zero).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

// ---------------------------------------------------------------------------
// OFElement
// ---------------------------------------------------------------------------

/// An element of `O_F` as a coordinate vector modulo `p^ceil(N/e)`.
#[derive(Clone)]
pub struct OFElement {
    spec: FieldSpec,
    coeffs: Vec<Int>,
    prec: Prec,
}

impl fmt::Debug for OFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OF({:?} + O(pi^{:?}))", self.coeffs, self.prec)
    }
}

impl PartialEq for OFElement {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.prec == other.prec && self.coeffs == other.coeffs
    }
}
impl Eq for OFElement {}

impl OFElement {
    fn new_reduced(spec: FieldSpec, mut coeffs: Vec<Int>, prec: Prec) -> OFElement {
        coeffs.resize(spec.deg(), Int::zero());
        if let Prec::Finite(n) = prec {
            let m = spec.mod_exp(n);
            raw_mod_pm(&spec, &mut coeffs, m);
        } else {
            debug_assert!(coeffs.iter().all(|c| c.is_zero()));
        }
        OFElement { spec, coeffs, prec }
    }

    pub fn zero_exact(spec: &FieldSpec) -> OFElement {
        OFElement {
            spec: spec.clone(),
            coeffs: vec![Int::zero(); spec.deg()],
            prec: Prec::Exact,
        }
    }

    fn zero_at(spec: &FieldSpec, n: i64) -> OFElement {
        OFElement::new_reduced(spec.clone(), vec![], Prec::Finite(n.max(0)))
    }

    fn is_zero_repr(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Representative valuation readable from the stored digits, or `None`
    /// when every stored digit vanishes.
    fn val_repr(&self) -> Option<i64> {
        if self.is_zero_repr() {
            return None;
        }
        // For Q_p/unramified the class of x is a unit, so only the p-power
        // in each coordinate counts; for Eisenstein x is the uniformizer.
        let eisenstein = matches!(self.spec.flavor, Flavor::Eisenstein { .. });
        let e = self.spec.e as i64;
        let mut best: Option<i64> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut v = val_p_int(c.clone(), &self.spec.p_big) * e;
            if eisenstein {
                v += i as i64;
            }
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        best
    }

    /// Multiply by `pi^k`, `k >= 0`.
    fn mul_pi_pow(&self, k: i64) -> OFElement {
        debug_assert!(k >= 0);
        if k == 0 || self.is_zero_repr() {
            let prec = match self.prec {
                Prec::Exact => Prec::Exact,
                Prec::Finite(n) => Prec::Finite(n.saturating_add(k)),
            };
            return OFElement { spec: self.spec.clone(), coeffs: self.coeffs.clone(), prec };
        }
        let n = match self.prec {
            Prec::Exact => unreachable!("nonzero exact OFElement"),
            Prec::Finite(n) => n,
        };
        let e = self.spec.e as i64;
        let m = self.spec.mod_exp(n) as i64;
        if e == 1 {
            let factor = self.spec.p_pow(k as u32);
            let coeffs = self.coeffs.iter().map(|c| c * &factor).collect();
            OFElement::new_reduced(self.spec.clone(), coeffs, Prec::Finite(n + k))
        } else {
            // multiply by x^k mod f; coordinates stay known mod p^m only
            let mut xk = vec![Int::zero(); (k as usize) + 1];
            xk[k as usize] = Int::one();
            let coeffs = raw_mul(&self.spec, &self.coeffs, &xk, m as u32);
            let n_new = (n + k).min(e * m);
            OFElement::new_reduced(self.spec.clone(), coeffs, Prec::Finite(n_new))
        }
    }

    /// Divide by `pi^w`, `w >= 0`; the representative must be divisible.
    fn div_pi_pow(&self, w: i64) -> OFElement {
        debug_assert!(w >= 0);
        if w == 0 {
            return self.clone();
        }
        let n = self.prec.finite().expect("div_pi_pow on exact zero");
        let e = self.spec.e as i64;
        let m = self.spec.mod_exp(n) as i64;
        let s = w / e;
        let t = w % e;
        let mut coeffs = self.coeffs.clone();
        if s > 0 {
            let ps = self.spec.p_pow(s as u32);
            for c in coeffs.iter_mut() {
                debug_assert!((&*c % &ps).is_zero(), "representative not divisible by p^{s}");
                *c = &*c / &ps;
            }
        }
        let mut m_new = m - s;
        if t > 0 {
            // x^-1 = g(x) * (-f_0)^-1 with g = (f - f_0)/x; multiply by g^t
            // and divide the coordinates by p^t afterwards.
            let d = self.spec.deg();
            let g: Vec<Int> = self.spec.defining[1..=d].to_vec();
            let mut acc = coeffs;
            for _ in 0..t {
                acc = raw_mul(&self.spec, &acc, &g, m_new as u32);
            }
            let pt = self.spec.p_pow(t as u32);
            for c in acc.iter_mut() {
                debug_assert!((&*c % &pt).is_zero());
                *c = &*c / &pt;
            }
            m_new -= t;
            // divide by (-f_0/p)^t, a unit
            let u0 = &self.spec.defining[0] / &self.spec.p_big;
            let mut unit = if t % 2 == 0 { u0.pow(t as u32) } else { -u0.pow(t as u32) };
            unit = unit.mod_floor(&self.spec.p_pow(m_new.max(0) as u32));
            let inv = raw_inv(&self.spec, &[unit], m_new.max(0) as u32).expect("unit inverse");
            acc = raw_mul(&self.spec, &acc, &inv, m_new.max(0) as u32);
            coeffs = acc;
        }
        let n_new = (n - w).min(e * m_new);
        OFElement::new_reduced(self.spec.clone(), coeffs, Prec::Finite(n_new.max(0)))
    }

    fn add(&self, other: &OFElement) -> OFElement {
        let prec = self.prec.min(other.prec);
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a + b)
            .collect();
        OFElement::new_reduced(self.spec.clone(), coeffs, prec)
    }

    fn mul(&self, other: &OFElement) -> OFElement {
        if self.prec == Prec::Exact || other.prec == Prec::Exact {
            return OFElement::zero_exact(&self.spec);
        }
        let prec = self.prec.min(other.prec);
        let m = self.spec.mod_exp(prec.finite().unwrap());
        let coeffs = raw_mul(&self.spec, &self.coeffs, &other.coeffs, m);
        OFElement::new_reduced(self.spec.clone(), coeffs, prec)
    }

    fn neg(&self) -> OFElement {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        OFElement::new_reduced(self.spec.clone(), coeffs, self.prec)
    }

    fn reduce_to(&self, n: i64) -> OFElement {
        match self.prec {
            Prec::Exact => self.clone(),
            Prec::Finite(cur) => {
                let n2 = cur.min(n).max(0);
                OFElement::new_reduced(self.spec.clone(), self.coeffs.clone(), Prec::Finite(n2))
            }
        }
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }
    pub fn prec(&self) -> Prec {
        self.prec
    }
}

// ---------------------------------------------------------------------------
// FElement
// ---------------------------------------------------------------------------

/// An element of `F` in canonical form `pi_F^shift * unit`, where the unit
/// part has valuation 0. Zero (exact or known-to-precision) has shift 0.
#[derive(Clone, PartialEq, Eq)]
pub struct FElement {
    unit: OFElement,
    shift: i64,
}

impl fmt::Debug for FElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        write!(f, "pi^{}*{:?}", self.shift, self.unit)
    }
}

impl fmt::Display for FElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.unit.is_zero_repr() {
            return write!(f, "O(pi^{})", self.abs_prec().finite().unwrap_or(0));
        }
        write!(f, "pi^{}*(", self.shift)?;
        let mut first = true;
        for (i, c) in self.unit.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{c}")?;
            } else if i == 1 {
                write!(f, "{c}*x")?;
            } else {
                write!(f, "{c}*x^{i}")?;
            }
        }
        match self.unit.prec {
            Prec::Finite(n) => write!(f, " + O(pi^{n}))"),
            Prec::Exact => write!(f, ")"),
        }
    }
}

impl FElement {
    /// Canonicalize `pi^shift * raw` by factoring the representative
    /// valuation out of the unit part.
    fn make(raw: OFElement, shift: i64) -> FElement {
        match raw.prec {
            Prec::Exact => FElement { unit: raw, shift: 0 },
            Prec::Finite(n) => {
                match raw.val_repr() {
                    None => {
                        // zero at absolute precision n + shift
                        let spec = raw.spec.clone();
                        FElement { unit: OFElement::zero_at(&spec, n + shift), shift: 0 }
                    }
                    Some(w) if w >= n => {
                        let spec = raw.spec.clone();
                        FElement { unit: OFElement::zero_at(&spec, n + shift), shift: 0 }
                    }
                    Some(0) => FElement { unit: raw, shift },
                    Some(w) => {
                        let unit = raw.div_pi_pow(w);
                        FElement { unit, shift: shift + w }
                    }
                }
            }
        }
    }

    pub fn zero(spec: &FieldSpec) -> FElement {
        FElement { unit: OFElement::zero_exact(spec), shift: 0 }
    }

    /// `1 + O(pi^n)`.
    pub fn one(spec: &FieldSpec, n: i64) -> FElement {
        FElement::from_int(spec, 1, n)
    }

    /// `pi_F` known mod `pi^(n+1)` (unit part has precision `n`).
    pub fn pi(spec: &FieldSpec, n: i64) -> FElement {
        let mut unit = vec![Int::zero(); spec.deg()];
        match spec.flavor {
            Flavor::Eisenstein { .. } => unit[1] = Int::one(),
            _ => unit[0] = spec.p_big.clone(),
        }
        let raw = OFElement::new_reduced(spec.clone(), unit, Prec::Finite(n.saturating_add(1)));
        FElement::make(raw, 0)
    }

    /// The integer `v` at absolute precision `n`.
    pub fn from_int(spec: &FieldSpec, v: i64, n: i64) -> FElement {
        FElement::from_bigint(spec, &Int::from(v), n)
    }

    pub fn from_bigint(spec: &FieldSpec, v: &Int, n: i64) -> FElement {
        let mut coeffs = vec![Int::zero(); spec.deg()];
        coeffs[0] = v.clone();
        let raw = OFElement::new_reduced(spec.clone(), coeffs, Prec::Finite(n.max(0)));
        FElement::make(raw, 0)
    }

    /// Element with the given `O_F`-coordinates at absolute precision `n`.
    pub fn from_coeffs(spec: &FieldSpec, coeffs: Vec<Int>, n: i64) -> FElement {
        let raw = OFElement::new_reduced(spec.clone(), coeffs, Prec::Finite(n.max(0)));
        FElement::make(raw, 0)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.unit.spec
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit.prec == Prec::Exact
    }

    /// True when the element is zero at its own precision (exact or not).
    pub fn is_zero_at_prec(&self) -> bool {
        self.unit.is_zero_repr()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn unit_coeffs(&self) -> &[Int] {
        self.unit.coeffs()
    }

    pub fn unit_prec(&self) -> Prec {
        self.unit.prec
    }

    /// Absolute precision: the element is known modulo `pi^abs_prec`.
    pub fn abs_prec(&self) -> Prec {
        self.unit.prec.plus(self.shift)
    }

    /// The pi-adic valuation.
    pub fn val_pi(&self) -> Result<Valuation> {
        if self.is_exact_zero() {
            return Ok(Valuation::Infinity);
        }
        if self.unit.is_zero_repr() {
            return Err(Error::IndeterminateValuation {
                prec: self.abs_prec().finite().unwrap_or(0),
            });
        }
        Ok(Valuation::Finite(self.shift))
    }

    pub fn add(&self, other: &FElement) -> Result<FElement> {
        self.spec().same(other.spec())?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let v = self.shift.min(other.shift);
        let a = self.unit.mul_pi_pow(self.shift - v);
        let b = other.unit.mul_pi_pow(other.shift - v);
        Ok(FElement::make(a.add(&b), v))
    }

    pub fn sub(&self, other: &FElement) -> Result<FElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FElement {
        FElement { unit: self.unit.neg(), shift: self.shift }
    }

    pub fn mul(&self, other: &FElement) -> Result<FElement> {
        self.spec().same(other.spec())?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(FElement::zero(self.spec()));
        }
        if self.unit.is_zero_repr() || other.unit.is_zero_repr() {
            // |x y| <= pi^(A + shift) where A is the zero side's precision
            let (z, nz) = if self.unit.is_zero_repr() { (self, other) } else { (other, self) };
            let a = z.abs_prec().finite().unwrap_or(0);
            let spec = self.spec().clone();
            return Ok(FElement {
                unit: OFElement::zero_at(&spec, a.saturating_add(nz.shift)),
                shift: 0,
            });
        }
        Ok(FElement::make(self.unit.mul(&other.unit), self.shift + other.shift))
    }

    /// Tracked division: the divisor must have a readable valuation.
    pub fn div(&self, other: &FElement) -> Result<FElement> {
        self.spec().same(other.spec())?;
        if other.is_zero_at_prec() {
            return Err(Error::DivisionByZero);
        }
        if self.is_exact_zero() {
            return Ok(FElement::zero(self.spec()));
        }
        if self.unit.is_zero_repr() {
            let a = self.abs_prec().finite().unwrap_or(0);
            let spec = self.spec().clone();
            return Ok(FElement {
                unit: OFElement::zero_at(&spec, a.saturating_sub(other.shift)),
                shift: 0,
            });
        }
        let n = match (self.unit.prec, other.unit.prec) {
            (Prec::Finite(a), Prec::Finite(b)) => a.min(b),
            _ => unreachable!("nonzero elements carry finite precision"),
        };
        if n <= 0 {
            return Err(Error::PrecisionExhausted("division at precision 0".into()));
        }
        let m = self.spec().mod_exp(n);
        let inv = raw_inv(self.spec(), &other.unit.coeffs, m)?;
        let coeffs = raw_mul(self.spec(), &self.unit.coeffs, &inv, m);
        let raw = OFElement::new_reduced(self.spec().clone(), coeffs, Prec::Finite(n));
        Ok(FElement::make(raw, self.shift - other.shift))
    }

    pub fn pow(&self, k: u32) -> Result<FElement> {
        if self.is_exact_zero() {
            return Ok(if k == 0 { FElement::one(self.spec(), 64) } else { self.clone() });
        }
        let mut acc = FElement::one(self.spec(), self.unit.prec.finite().unwrap_or(64));
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplication by a plain integer (treated as exactly known).
    pub fn mul_int(&self, k: i64) -> FElement {
        self.mul_bigint(&Int::from(k))
    }

    pub fn mul_bigint(&self, k: &Int) -> FElement {
        if k.is_zero() {
            return FElement::zero(self.spec());
        }
        let n = match self.unit.prec {
            Prec::Exact => return self.clone(),
            Prec::Finite(n) => n,
        };
        let e = self.spec().e as i64;
        let vk = val_p_int(k.clone(), self.spec().p_big()) * e;
        let other = FElement::from_bigint(self.spec(), k, n + vk);
        self.mul(&other).expect("same spec")
    }

    /// Division by a plain integer (treated as exactly known).
    pub fn div_int(&self, k: i64) -> Result<FElement> {
        self.div_bigint(&Int::from(k))
    }

    pub fn div_bigint(&self, k: &Int) -> Result<FElement> {
        if k.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = match self.unit.prec {
            Prec::Exact => return Ok(self.clone()),
            Prec::Finite(n) => n,
        };
        let e = self.spec().e as i64;
        let vk = val_p_int(k.clone(), self.spec().p_big()) * e;
        let other = FElement::from_bigint(self.spec(), k, n + vk);
        self.div(&other)
    }

    /// Reduce to absolute precision at most `a`.
    pub fn truncate_abs(&self, a: i64) -> FElement {
        match self.abs_prec() {
            Prec::Exact => {
                if self.is_exact_zero() {
                    self.clone()
                } else {
                    unreachable!()
                }
            }
            Prec::Finite(cur) => {
                let a = a.min(cur);
                if self.unit.is_zero_repr() || self.shift >= a {
                    let spec = self.spec().clone();
                    return FElement { unit: OFElement::zero_at(&spec, a), shift: 0 };
                }
                let unit = self.unit.reduce_to(a - self.shift);
                FElement::make(unit, self.shift)
            }
        }
    }

    /// Congruence at the common absolute precision.
    pub fn eq_mod(&self, other: &FElement) -> bool {
        if self.spec() != other.spec() {
            return false;
        }
        let a = match (self.abs_prec(), other.abs_prec()) {
            (Prec::Exact, Prec::Exact) => return self.is_exact_zero() == other.is_exact_zero(),
            (Prec::Finite(a), Prec::Exact) => a,
            (Prec::Exact, Prec::Finite(b)) => b,
            (Prec::Finite(a), Prec::Finite(b)) => a.min(b),
        };
        let x = self.truncate_abs(a);
        let y = other.truncate_abs(a);
        x.shift == y.shift && x.unit.coeffs == y.unit.coeffs
    }

    /// Apply the absolute Frobenius `sigma` (identity unless unramified).
    pub fn frobenius(&self) -> Result<FElement> {
        self.frobenius_pow(1)
    }

    /// `sigma^j`.
    pub fn frobenius_pow(&self, j: u32) -> Result<FElement> {
        let spec = self.spec();
        match spec.flavor {
            Flavor::Qp => Ok(self.clone()),
            Flavor::Eisenstein { .. } => {
                if spec.h > 1 {
                    unreachable!("mixed flavors are rejected at construction");
                }
                Ok(self.clone())
            }
            Flavor::Unramified { h } => {
                let j = j % h;
                if j == 0 || self.unit.is_zero_repr() {
                    return Ok(self.clone());
                }
                let n = self.unit.prec.finite().expect("nonzero is finite");
                let m = spec.mod_exp(n);
                let mut coeffs = self.unit.coeffs.clone();
                for _ in 0..j {
                    coeffs = sigma_apply(spec, &coeffs, m);
                }
                let raw = OFElement::new_reduced(spec.clone(), coeffs, Prec::Finite(n));
                Ok(FElement::make(raw, self.shift))
            }
        }
    }
}

/// Image of the class of `x` under `sigma`, lifted mod `p^m` by Newton
/// from the residue-field relation `sigma(x) = x^p`.
fn sigma_image(spec: &FieldSpec, m: u32) -> Vec<Int> {
    {
        let guard = spec.sigma.lock().unwrap();
        if let Some((cached_m, img)) = guard.as_ref() {
            if *cached_m >= m {
                let mut img = img.clone();
                raw_mod_pm(spec, &mut img, m);
                return img;
            }
        }
    }
    // y0 = x^p mod (f, p)
    let d = spec.deg();
    let mut y = {
        let mut x = vec![Int::zero(); d];
        x[1] = Int::one();
        let mut acc = vec![Int::zero(); d];
        acc[0] = Int::one();
        let mut base = x;
        let mut n = spec.p;
        while n > 0 {
            if n & 1 == 1 {
                acc = raw_mul(spec, &acc, &base, 1);
            }
            base = raw_mul(spec, &base, &base, 1);
            n >>= 1;
        }
        acc
    };
    // Newton: y <- y - f(y)/f'(y), doubling the modulus exponent
    let fprime: Vec<Int> = spec
        .defining
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Int::from(i))
        .collect();
    let mut k = 1u32;
    while k < m {
        k = (2 * k).min(m);
        let fy = eval_int_poly(spec, &spec.defining, &y, k);
        let fpy = eval_int_poly(spec, &fprime, &y, k);
        let inv = raw_inv(spec, &fpy, k).expect("f' is a unit at a simple root");
        let corr = raw_mul(spec, &fy, &inv, k);
        for (yi, ci) in y.iter_mut().zip(corr.iter()) {
            *yi -= ci;
        }
        raw_mod_pm(spec, &mut y, k);
    }
    let mut guard = spec.sigma.lock().unwrap();
    let refresh = match guard.as_ref() {
        Some((cached_m, _)) => *cached_m < m,
        None => true,
    };
    if refresh {
        *guard = Some((m, y.clone()));
    }
    y
}

fn eval_int_poly(spec: &BaseFieldSpec, poly: &[Int], at: &[Int], m: u32) -> Vec<Int> {
    let d = spec.deg();
    let mut acc = vec![Int::zero(); d];
    for c in poly.iter().rev() {
        acc = raw_mul(spec, &acc, at, m);
        acc[0] += c;
    }
    raw_mod_pm(spec, &mut acc, m);
    acc
}

fn sigma_apply(spec: &FieldSpec, coeffs: &[Int], m: u32) -> Vec<Int> {
    let img = sigma_image(spec, m);
    let d = spec.deg();
    let mut acc = vec![Int::zero(); d];
    for c in coeffs.iter().rev() {
        acc = raw_mul(spec, &acc, &img, m);
        acc[0] += c;
    }
    raw_mod_pm(spec, &mut acc, m);
    acc
}

/// Teichmueller representative: the unique lift of a nonzero residue with
/// `omega^q = omega`, computed by iterating the q-power map to fixation.
/// The residue element is given by its coordinates in the basis
/// `1, x, ..., x^(h-1)` of the residue field (a single coordinate for `Q_p`).
pub fn teichmuller(spec: &FieldSpec, residue: &[u64], n: i64) -> Result<FElement> {
    match spec.flavor {
        Flavor::Eisenstein { .. } => {
            return Err(Error::RequiresUnramified("teichmuller".into()));
        }
        Flavor::Qp | Flavor::Unramified { .. } => {}
    }
    if residue.iter().all(|&c| c == 0) {
        return Ok(FElement::zero(spec));
    }
    let d = spec.deg();
    if residue.len() > d {
        return Err(Error::InvalidInput(format!(
            "residue has {} coordinates, expected at most {d}",
            residue.len()
        )));
    }
    let m = spec.mod_exp(n.max(1));
    let mut x: Vec<Int> = (0..d)
        .map(|i| Int::from(*residue.get(i).unwrap_or(&0) % spec.p))
        .collect();
    let q = spec.q();
    for _ in 0..=(m + 1) {
        let mut next = {
            let mut acc = vec![Int::zero(); d];
            acc[0] = Int::one();
            let mut base = x.clone();
            let mut nn = q;
            while nn > 0 {
                if nn & 1 == 1 {
                    acc = raw_mul(spec, &acc, &base, m);
                }
                base = raw_mul(spec, &base, &base, m);
                nn >>= 1;
            }
            acc
        };
        raw_mod_pm(spec, &mut next, m);
        if next == x {
            break;
        }
        x = next;
    }
    let raw = OFElement::new_reduced(spec.clone(), x, Prec::Finite(n.max(0)));
    Ok(FElement::make(raw, 0))
}

/// Truncated p-adic exponential of `a`, valid for `val_p(a) > 1/(p-1)`.
/// Terms are added until they vanish at the precision of `a`.
pub fn exp_field(a: &FElement) -> Result<FElement> {
    let spec = a.spec().clone();
    let e = spec.e as i64;
    let p = spec.p() as i64;
    let va = match a.val_pi()? {
        Valuation::Infinity => return Ok(FElement::one(&spec, 64)),
        Valuation::Finite(v) => v,
    };
    // val_pi(a) > e/(p-1) guarantees convergence
    if va * (p - 1) <= e {
        return Err(Error::PrecisionExhausted(format!(
            "exp requires val_pi > e/(p-1), got {va}"
        )));
    }
    let n_target = a.abs_prec().finite().unwrap_or(0);
    let mut acc = FElement::one(&spec, n_target);
    let mut term = FElement::one(&spec, n_target);
    let mut k: i64 = 1;
    loop {
        term = term.mul(a)?.div_bigint(&Int::from(k))?;
        // val of term grows like k*va - e*val_p(k!)
        match term.val_pi() {
            Ok(Valuation::Finite(v)) if v < n_target => {
                acc = acc.add(&term)?;
            }
            _ => break,
        }
        k += 1;
        if k > 4 * (n_target + 1) {
            break;
        }
    }
    Ok(acc)
}

/// p-adic valuation of a nonzero big integer.
pub fn int_val_p(x: &Int, p: &Int) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(val_p_int(x.clone(), p))
    }
}

/// Decimal value of the canonical representative when the element lies in
/// `Z_p` (all higher coordinates zero, shift >= 0). Used for compact output.
pub fn zp_value(x: &FElement) -> Option<Int> {
    if x.is_exact_zero() || x.is_zero_at_prec() {
        if x.is_exact_zero() || x.unit.is_zero_repr() {
            return Some(Int::zero());
        }
    }
    if x.shift < 0 {
        return None;
    }
    if x.unit.coeffs.iter().skip(1).any(|c| !c.is_zero()) {
        return None;
    }
    match x.spec().flavor {
        Flavor::Eisenstein { .. } => {
            if x.shift > 0 {
                return None;
            }
            Some(x.unit.coeffs[0].clone())
        }
        _ => Some(&x.unit.coeffs[0] * x.spec().p_big.pow(x.shift as u32)),
    }
}

/// Base-p digits (little-endian) of a nonnegative integer, at least one digit.
pub fn base_p_digits(x: &Int, p: u64) -> Vec<u64> {
    let mut digits = Vec::new();
    let p_big = Int::from(p);
    let mut v = x.clone();
    debug_assert!(!v.is_negative());
    loop {
        let (q, r) = v.div_rem(&p_big);
        digits.push(r.to_u64().unwrap_or(0));
        v = q;
        if v.is_zero() {
            break;
        }
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z5() -> FieldSpec {
        BaseFieldSpec::qp(5).unwrap()
    }
    fn z3() -> FieldSpec {
        BaseFieldSpec::qp(3).unwrap()
    }

    #[test]
    fn integer_multiplication_digit_expansion() {
        // 7 * 623 = 4361 = 611 mod 5^4, digits (1,2,4,4) base 5
        let spec = z5();
        let x = FElement::from_int(&spec, 7, 4);
        let y = FElement::from_int(&spec, 623, 4);
        let z = x.mul(&y).unwrap();
        let v = zp_value(&z).unwrap();
        assert_eq!(v, Int::from(611));
        assert_eq!(base_p_digits(&v, 5), vec![1, 2, 4, 4]);
    }

    #[test]
    fn uniformizer_square() {
        let spec = z5();
        let pi = FElement::pi(&spec, 10);
        let pi2 = pi.mul(&pi).unwrap();
        assert_eq!(pi2.shift(), 2);
        assert_eq!(pi2.val_pi().unwrap(), Valuation::Finite(2));
    }

    #[test]
    fn additive_identity() {
        let spec = z5();
        let x = FElement::from_int(&spec, 42, 8);
        let z = FElement::zero(&spec);
        assert_eq!(x.add(&z).unwrap(), x);
    }

    #[test]
    fn valuation_of_45_in_z3() {
        let spec = z3();
        let x = FElement::from_int(&spec, 45, 6);
        assert_eq!(x.val_pi().unwrap(), Valuation::Finite(2));
    }

    #[test]
    fn valuation_of_exact_zero_is_infinite() {
        let spec = z3();
        assert!(FElement::zero(&spec).val_pi().unwrap().is_infinite());
    }

    #[test]
    fn indeterminate_valuation_after_cancellation() {
        let spec = z3();
        let x = FElement::from_int(&spec, 7, 4);
        let y = FElement::from_int(&spec, 7, 4);
        let d = x.sub(&y).unwrap();
        assert!(matches!(d.val_pi(), Err(Error::IndeterminateValuation { prec: 4 })));
    }

    #[test]
    fn division_tracked() {
        let spec = z3();
        // 1/2 in Q_3 at N=5: digits (2,1,1,1,1)
        let one = FElement::one(&spec, 5);
        let two = FElement::from_int(&spec, 2, 5);
        let half = one.div(&two).unwrap();
        let v = zp_value(&half).unwrap();
        assert_eq!(base_p_digits(&v, 3), vec![2, 1, 1, 1, 1]);
        // x/1 = x with no precision loss
        let x = FElement::from_int(&spec, 10, 5);
        let q = x.div(&FElement::one(&spec, 5)).unwrap();
        assert!(q.eq_mod(&x));
        assert_eq!(q.abs_prec(), x.abs_prec());
        // pi^2/pi = pi, precision drops by one relative to pi^2
        let pi = FElement::pi(&spec, 5);
        let pi2 = pi.mul(&pi).unwrap();
        let q = pi2.div(&pi).unwrap();
        assert_eq!(q.val_pi().unwrap(), Valuation::Finite(1));
        assert_eq!(
            q.abs_prec().finite().unwrap(),
            pi2.abs_prec().finite().unwrap() - 1
        );
    }

    #[test]
    fn division_by_near_zero_rejected() {
        let spec = z3();
        let x = FElement::from_int(&spec, 1, 5);
        let z = FElement::from_int(&spec, 4, 2).sub(&FElement::from_int(&spec, 4, 2)).unwrap();
        assert!(matches!(x.div(&z), Err(Error::DivisionByZero)));
    }

    #[test]
    fn teichmuller_z5() {
        let spec = z5();
        // residue 2, N = 3 -> 57
        let w = teichmuller(&spec, &[2], 3).unwrap();
        assert_eq!(zp_value(&w).unwrap(), Int::from(57));
        // fixed points
        let one = teichmuller(&spec, &[1], 6).unwrap();
        assert!(one.eq_mod(&FElement::one(&spec, 6)));
        let zero = teichmuller(&spec, &[0], 6).unwrap();
        assert!(zero.is_exact_zero());
    }

    #[test]
    fn teichmuller_is_qth_root_of_itself_and_multiplicative() {
        for n in [4, 9, 17] {
            let spec = z5();
            for r in 1..5u64 {
                let w = teichmuller(&spec, &[r], n).unwrap();
                let wq = w.pow(5).unwrap();
                assert_eq!(wq.truncate_abs(n), w.truncate_abs(n), "omega^q = omega at N={n}");
            }
            let w2 = teichmuller(&spec, &[2], n).unwrap();
            let w3 = teichmuller(&spec, &[3], n).unwrap();
            let w6 = teichmuller(&spec, &[6 % 5], n).unwrap();
            assert!(w2.mul(&w3).unwrap().eq_mod(&w6));
        }
    }

    #[test]
    fn frobenius_on_qp_is_identity() {
        let spec = z3();
        let x = FElement::from_int(&spec, 17, 8);
        assert_eq!(x.frobenius().unwrap(), x);
    }

    #[test]
    fn frobenius_order_and_teichmuller_compat() {
        let spec = BaseFieldSpec::unramified(2, 2).unwrap();
        assert_eq!(spec.q(), 4);
        // sigma^h = id on a generic element
        let x = FElement::from_coeffs(&spec, vec![Int::from(3), Int::from(5)], 10);
        let y = x.frobenius_pow(2).unwrap();
        assert!(y.eq_mod(&x));
        // sigma(omega(g)) = omega(g^p): g = class of x, g^2 in coordinates
        let w = teichmuller(&spec, &[0, 1], 8).unwrap();
        let sw = w.frobenius().unwrap();
        let w2 = w.mul(&w).unwrap();
        assert!(sw.eq_mod(&w2));
    }

    #[test]
    fn frobenius_is_ring_homomorphism() {
        let spec = BaseFieldSpec::unramified(3, 2).unwrap();
        let a = FElement::from_coeffs(&spec, vec![Int::from(4), Int::from(7)], 9);
        let b = FElement::from_coeffs(&spec, vec![Int::from(2), Int::from(11)], 9);
        let lhs = a.mul(&b).unwrap().frobenius().unwrap();
        let rhs = a.frobenius().unwrap().mul(&b.frobenius().unwrap()).unwrap();
        assert!(lhs.eq_mod(&rhs));
        let lhs = a.add(&b).unwrap().frobenius().unwrap();
        let rhs = a.frobenius().unwrap().add(&b.frobenius().unwrap()).unwrap();
        assert!(lhs.eq_mod(&rhs));
        // sigma fixes rational integers
        let c = FElement::from_int(&spec, 19, 9);
        assert_eq!(c.frobenius().unwrap(), c);
    }

    #[test]
    fn eisenstein_arithmetic() {
        // f = x^2 - 3 over Q_3: pi = sqrt(3), e = 2
        let spec = BaseFieldSpec::eisenstein(3, vec![Int::from(-3), Int::from(0), Int::one()])
            .unwrap();
        assert_eq!(spec.ram_index(), 2);
        let pi = FElement::pi(&spec, 12);
        let pi2 = pi.mul(&pi).unwrap();
        // pi^2 = 3
        let three = FElement::from_int(&spec, 3, 12);
        assert!(pi2.eq_mod(&three));
        assert_eq!(pi2.val_pi().unwrap(), Valuation::Finite(2));
        // division brings it back
        let q = pi2.div(&pi).unwrap();
        assert_eq!(q.val_pi().unwrap(), Valuation::Finite(1));
        // val_pi(p) = e
        assert_eq!(three.val_pi().unwrap(), Valuation::Finite(2));
    }

    #[test]
    fn mixed_flavor_rejected() {
        // an Eisenstein polynomial cannot request h > 1; the constructor only
        // builds totally ramified extensions, so no mixed case exists.
        let err = BaseFieldSpec::eisenstein(3, vec![Int::from(1), Int::one()]);
        assert!(err.is_err());
        let err = BaseFieldSpec::eisenstein(4, vec![Int::from(-4), Int::zero(), Int::one()]);
        assert!(err.is_err());
    }

    #[test]
    fn ultrametric_inequality() {
        let spec = z3();
        let x = FElement::from_int(&spec, 6, 10);
        let y = FElement::from_int(&spec, 9, 10);
        let s = x.add(&y).unwrap();
        // val(6) = 1, val(9) = 2, distinct: equality in the ultrametric bound
        assert_eq!(s.val_pi().unwrap(), Valuation::Finite(1));
        let z = x.mul(&y).unwrap();
        assert_eq!(z.val_pi().unwrap(), Valuation::Finite(3));
    }

    #[test]
    fn precision_soundness_truncation() {
        let spec = z5();
        let n = 6;
        let run = |prec: i64| {
            let a = FElement::from_int(&spec, 1234, prec);
            let b = FElement::from_int(&spec, 77, prec);
            let c = a.mul(&b).unwrap().add(&FElement::pi(&spec, prec)).unwrap();
            c.div(&FElement::from_int(&spec, 2, prec)).unwrap()
        };
        let lo = run(n);
        let hi = run(n + 5);
        let a = lo.abs_prec().finite().unwrap();
        assert_eq!(hi.truncate_abs(a), lo.truncate_abs(a));
    }

    #[test]
    fn exp_field_basic() {
        let spec = z3();
        let a = FElement::from_int(&spec, 3, 9);
        let c = exp_field(&a).unwrap();
        // exp(3) = 1 + 3 + 9/2 + 27/6 + ... ; check c = 1 mod 3 and group law
        let one = FElement::one(&spec, 9);
        assert_eq!(c.sub(&one).unwrap().val_pi().unwrap(), Valuation::Finite(1));
        let c2 = exp_field(&a.mul_int(2)).unwrap();
        assert!(c.mul(&c).unwrap().eq_mod(&c2));
    }
}

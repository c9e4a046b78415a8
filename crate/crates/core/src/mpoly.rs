//! Truncated multivariate series, capped by total degree.
//!
//! Monomials are exponent tuples; only variable 0 may run into negative
//! exponents (Laurent tails), controlled by `floor0`. The same windowed
//! semantics as [`crate::series`] apply: a value represents the exact
//! expansion of some element through total degree `deg`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::{FElement, FieldSpec, Prec};
use crate::series::TruncSeries;

/// All exponent tuples of the given dimension with total degree <= cap.
pub fn multi_indices(dim: usize, cap: i64) -> Vec<Vec<i64>> {
    fn rec(dim: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if dim == 0 {
            out.push(cur.clone());
            return;
        }
        for v in 0..=cap {
            cur.push(v);
            rec(dim - 1, cap - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, cap, &mut Vec::new(), &mut out);
    out
}

pub fn factorial(n: i64) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    f
}

/// Truncated multivariate series over `F`.
#[derive(Clone, PartialEq)]
pub struct MSeries {
    spec: FieldSpec,
    nvars: usize,
    table: BTreeMap<Vec<i64>, FElement>,
    deg: i64,
    floor0: i64,
}

impl fmt::Debug for MSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MSeries(deg<={}){{", self.deg)?;
        for (e, c) in &self.table {
            write!(f, " {e:?}: {c},")?;
        }
        write!(f, " }}")
    }
}

impl MSeries {
    pub fn zero(spec: &FieldSpec, nvars: usize, deg: i64) -> MSeries {
        MSeries { spec: spec.clone(), nvars, table: BTreeMap::new(), deg, floor0: 0 }
    }

    pub fn constant(spec: &FieldSpec, nvars: usize, c: FElement, deg: i64) -> MSeries {
        let mut s = MSeries::zero(spec, nvars, deg);
        s.set(vec![0; nvars], c);
        s
    }

    /// The variable `Y_j` with a unit coefficient at precision `prec`.
    pub fn var(spec: &FieldSpec, nvars: usize, j: usize, deg: i64, prec: i64) -> MSeries {
        let mut s = MSeries::zero(spec, nvars, deg);
        let mut e = vec![0i64; nvars];
        e[j] = 1;
        s.set(e, FElement::one(spec, prec));
        s
    }

    pub fn from_pairs(
        spec: &FieldSpec,
        nvars: usize,
        deg: i64,
        pairs: impl IntoIterator<Item = (Vec<i64>, FElement)>,
    ) -> MSeries {
        let mut s = MSeries::zero(spec, nvars, deg);
        for (e, c) in pairs {
            s.set(e, c);
        }
        s
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn deg(&self) -> i64 {
        self.deg
    }
    pub fn floor0(&self) -> i64 {
        self.floor0
    }
    pub fn table(&self) -> &BTreeMap<Vec<i64>, FElement> {
        &self.table
    }
    pub fn is_zero_table(&self) -> bool {
        self.table.is_empty()
    }

    pub fn coeff(&self, e: &[i64]) -> FElement {
        self.table.get(e).cloned().unwrap_or_else(|| FElement::zero(&self.spec))
    }

    pub fn set(&mut self, e: Vec<i64>, c: FElement) {
        debug_assert_eq!(e.len(), self.nvars);
        debug_assert!(e.iter().skip(1).all(|&x| x >= 0), "only variable 0 may be Laurent");
        let total: i64 = e.iter().sum();
        if total > self.deg {
            return;
        }
        if e[0] < self.floor0 {
            self.floor0 = e[0];
        }
        if c.is_exact_zero() {
            self.table.remove(&e);
        } else {
            self.table.insert(e, c);
        }
    }

    fn min_total(&self) -> i64 {
        self.table.keys().map(|e| e.iter().sum()).min().unwrap_or(0)
    }

    fn check(&self, other: &MSeries) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch("multivariate series over different fields".into()));
        }
        if self.nvars != other.nvars {
            return Err(Error::SpecMismatch(format!(
                "variable count mismatch: {} vs {}",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MSeries) -> Result<MSeries> {
        self.check(other)?;
        let mut out = MSeries {
            spec: self.spec.clone(),
            nvars: self.nvars,
            table: self.table.clone(),
            deg: self.deg.min(other.deg),
            floor0: self.floor0.min(other.floor0),
        };
        out.table.retain(|e, _| e.iter().sum::<i64>() <= out.deg);
        for (e, c) in &other.table {
            let cur = out.coeff(e);
            out.set(e.clone(), cur.add(c)?);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MSeries) -> Result<MSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MSeries {
        let mut out = self.clone();
        for c in out.table.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scalar_mul(&self, s: &FElement) -> Result<MSeries> {
        let mut out = MSeries {
            spec: self.spec.clone(),
            nvars: self.nvars,
            table: BTreeMap::new(),
            deg: self.deg,
            floor0: self.floor0,
        };
        for (e, c) in &self.table {
            out.set(e.clone(), c.mul(s)?);
        }
        Ok(out)
    }

    /// Exact multiplication by a single monomial: the window grows by the
    /// monomial's total degree.
    pub fn mul_monomial(&self, exps: &[i64], c: &FElement) -> Result<MSeries> {
        debug_assert_eq!(exps.len(), self.nvars);
        let t: i64 = exps.iter().sum();
        let mut out = MSeries {
            spec: self.spec.clone(),
            nvars: self.nvars,
            table: BTreeMap::new(),
            deg: self.deg.saturating_add(t),
            floor0: self.floor0 + exps[0].min(0),
        };
        for (e, v) in &self.table {
            let shifted: Vec<i64> = e.iter().zip(exps.iter()).map(|(a, b)| a + b).collect();
            out.set(shifted, v.mul(c)?);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &MSeries) -> Result<MSeries> {
        self.check(other)?;
        let deg = (self.deg + other.min_total()).min(other.deg + self.min_total());
        let mut out = MSeries {
            spec: self.spec.clone(),
            nvars: self.nvars,
            table: BTreeMap::new(),
            deg,
            floor0: self.floor0 + other.floor0,
        };
        for (ea, ca) in &self.table {
            for (eb, cb) in &other.table {
                let e: Vec<i64> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                if e.iter().sum::<i64>() > out.deg {
                    continue;
                }
                let cur = out.coeff(&e);
                out.set(e, cur.add(&ca.mul(cb)?)?);
            }
        }
        Ok(out)
    }

    pub fn truncate_deg(&self, deg: i64) -> MSeries {
        let mut out = self.clone();
        out.table.retain(|e, _| e.iter().sum::<i64>() <= deg);
        out.deg = deg.min(self.deg);
        out
    }

    /// Like [`truncate_deg`](Self::truncate_deg) but declares the window.
    pub fn with_deg(&self, deg: i64) -> MSeries {
        let mut out = self.clone();
        out.table.retain(|e, _| e.iter().sum::<i64>() <= deg);
        out.deg = deg;
        out
    }

    pub fn pow(&self, n: u32, prec: i64) -> Result<MSeries> {
        let mut acc = MSeries::constant(&self.spec, self.nvars, FElement::one(&self.spec, prec), self.deg);
        for _ in 0..n {
            acc = acc.mul(self)?;
            acc.deg = self.deg;
        }
        Ok(acc)
    }

    /// Formal partial derivative in variable `j`.
    pub fn partial(&self, j: usize) -> MSeries {
        let mut out = MSeries {
            spec: self.spec.clone(),
            nvars: self.nvars,
            table: BTreeMap::new(),
            deg: self.deg - 1,
            floor0: if j == 0 && self.floor0 < 0 { self.floor0 - 1 } else { self.floor0 },
        };
        for (e, c) in &self.table {
            if e[j] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[j] -= 1;
            out.set(e2, c.mul_int(e[j]));
        }
        out
    }

    /// Termwise integration in variable `j >= 1` (coefficient divided by
    /// the incremented exponent); the window grows by one.
    pub fn integrate(&self, j: usize) -> Result<MSeries> {
        debug_assert!(j >= 1);
        let mut out = MSeries {
            spec: self.spec.clone(),
            nvars: self.nvars,
            table: BTreeMap::new(),
            deg: self.deg + 1,
            floor0: self.floor0,
        };
        for (e, c) in &self.table {
            let mut e2 = e.clone();
            e2[j] += 1;
            out.set(e2, c.div_int(e2[j])?);
        }
        Ok(out)
    }

    /// Substitute, per variable, a univariate series in the same variable.
    /// Each image must have lowest exponent >= 1; negative exponents of
    /// variable 0 are handled through the image's Laurent inverse.
    pub fn subst_per_var(&self, images: &[TruncSeries]) -> Result<MSeries> {
        debug_assert_eq!(images.len(), self.nvars);
        // effective window: the substitution is exact through min of our
        // window and each truncated image's window
        let mut deg = self.deg;
        for img in images {
            if !img.is_exact() {
                deg = deg.min(img.order());
            }
            if img.low().unwrap_or(1) < 1 {
                return Err(Error::TruncationOverflow(
                    "substitution image must have lowest exponent >= 1".into(),
                ));
            }
        }
        let mut out = MSeries {
            spec: self.spec.clone(),
            nvars: self.nvars,
            table: BTreeMap::new(),
            deg,
            floor0: self.floor0,
        };
        // power caches per variable; negative powers only for variable 0
        let mut pos_cache: Vec<BTreeMap<i64, TruncSeries>> = images
            .iter()
            .map(|img| {
                let mut m = BTreeMap::new();
                m.insert(
                    0,
                    TruncSeries::poly(&self.spec, [(0, FElement::one(&self.spec, img.ident_prec()))]),
                );
                m.insert(1, img.clone());
                m
            })
            .collect();
        let inv0 = if self.floor0 < 0 {
            Some(images[0].invert(deg + (-self.floor0) + 2)?)
        } else {
            None
        };
        for (e, c) in &self.table {
            // product over variables of image^exponent, assembled in out
            let mut term = MSeries::constant(&self.spec, self.nvars, c.clone(), deg);
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let uni = if k > 0 {
                    power_from_cache(&mut pos_cache[j], images[j].clone(), k, deg)?
                } else {
                    let inv = inv0.as_ref().expect("laurent tail implies inverse");
                    let mut acc = inv.clone();
                    for _ in 1..(-k) {
                        acc = acc.mul(inv)?;
                    }
                    acc
                };
                let emb = embed(&self.spec, self.nvars, j, &uni, deg);
                term = term.mul(&emb)?;
                term.deg = deg;
            }
            out = out.add(&term)?;
            out.deg = deg;
        }
        Ok(out)
    }

    /// Truncated exponential; requires an exactly-zero constant term.
    pub fn exp(&self) -> Result<MSeries> {
        let c0 = self.coeff(&vec![0; self.nvars]);
        if !c0.is_exact_zero() {
            return Err(Error::PrecisionExhausted(
                "exp needs a vanishing constant term".into(),
            ));
        }
        let prec = self
            .table
            .values()
            .filter_map(|c| c.abs_prec().finite())
            .max()
            .unwrap_or(64)
            + 16;
        let one = FElement::one(&self.spec, prec);
        let mut acc = MSeries::constant(&self.spec, self.nvars, one.clone(), self.deg);
        let mut term = MSeries::constant(&self.spec, self.nvars, one, self.deg);
        for k in 1..=self.deg.max(0) {
            term = term.mul(self)?;
            term.deg = self.deg;
            term = term.scalar_mul(&FElement::one(&self.spec, prec).div_int(k)?.clone())?;
            if term.is_zero_table() {
                break;
            }
            acc = acc.add(&term)?;
            acc.deg = self.deg;
        }
        Ok(acc)
    }

    pub fn agrees_with(&self, other: &MSeries) -> bool {
        if self.spec != other.spec || self.nvars != other.nvars {
            return false;
        }
        let deg = self.deg.min(other.deg);
        let keys: std::collections::BTreeSet<_> =
            self.table.keys().chain(other.table.keys()).cloned().collect();
        for e in keys {
            if e.iter().sum::<i64>() > deg {
                continue;
            }
            if !self.coeff(&e).eq_mod(&other.coeff(&e)) {
                return false;
            }
        }
        true
    }

    pub fn min_abs_prec(&self) -> Prec {
        self.table.values().map(|c| c.abs_prec()).min().unwrap_or(Prec::Exact)
    }

    pub fn truncate_coeff_prec(&self, a: i64) -> MSeries {
        let mut out = MSeries {
            spec: self.spec.clone(),
            nvars: self.nvars,
            table: BTreeMap::new(),
            deg: self.deg,
            floor0: self.floor0,
        };
        for (e, c) in &self.table {
            out.set(e.clone(), c.truncate_abs(a));
        }
        out
    }
}

fn power_from_cache(
    cache: &mut BTreeMap<i64, TruncSeries>,
    base: TruncSeries,
    k: i64,
    order: i64,
) -> Result<TruncSeries> {
    if let Some(s) = cache.get(&k) {
        return Ok(s.clone());
    }
    let prev = power_from_cache(cache, base.clone(), k - 1, order)?;
    let mut next = prev.mul(&base)?;
    if !next.is_exact() {
        next = next.truncate_order(order.min(next.order()));
    }
    cache.insert(k, next.clone());
    Ok(next)
}

/// View a univariate series as a multivariate one in variable `j`.
pub fn embed(spec: &FieldSpec, nvars: usize, j: usize, s: &TruncSeries, deg: i64) -> MSeries {
    let mut out = MSeries::zero(spec, nvars, deg);
    if j == 0 {
        out.floor0 = s.kmin().min(0);
    }
    for (k, c) in s.coeffs() {
        let mut e = vec![0i64; nvars];
        e[j] = *k;
        out.set(e, c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::BaseFieldSpec;

    fn fe(spec: &FieldSpec, v: i64) -> FElement {
        FElement::from_int(spec, v, 30)
    }

    #[test]
    fn total_degree_truncation() {
        let spec = BaseFieldSpec::qp(3).unwrap();
        let x = MSeries::var(&spec, 2, 0, 3, 30);
        let y = MSeries::var(&spec, 2, 1, 3, 30);
        let s = x.add(&y).unwrap();
        let p = s.pow(4, 30).unwrap();
        // (x+y)^4 truncated at total degree 3 is empty
        assert!(p.is_zero_table());
        let p3 = s.pow(3, 30).unwrap();
        assert!(p3.coeff(&[2, 1]).eq_mod(&fe(&spec, 3)));
    }

    #[test]
    fn partial_derivatives_commute() {
        let spec = BaseFieldSpec::qp(5).unwrap();
        let x = MSeries::var(&spec, 2, 0, 6, 30);
        let y = MSeries::var(&spec, 2, 1, 6, 30);
        let f = x.mul(&y).unwrap().add(&y.pow(3, 30).unwrap()).unwrap();
        let a = f.partial(0).partial(1);
        let b = f.partial(1).partial(0);
        assert!(a.agrees_with(&b));
    }

    #[test]
    fn substitution_per_variable() {
        let spec = BaseFieldSpec::qp(3).unwrap();
        // f = x*y, x -> x + x^2, y -> 2y
        let f = MSeries::from_pairs(&spec, 2, 4, [(vec![1, 1], fe(&spec, 1))]);
        let img0 = TruncSeries::poly(&spec, [(1, fe(&spec, 1)), (2, fe(&spec, 1))]);
        let img1 = TruncSeries::poly(&spec, [(1, fe(&spec, 2))]);
        let g = f.subst_per_var(&[img0, img1]).unwrap();
        assert!(g.coeff(&[1, 1]).eq_mod(&fe(&spec, 2)));
        assert!(g.coeff(&[2, 1]).eq_mod(&fe(&spec, 2)));
    }

    #[test]
    fn exp_of_nilpotent_part() {
        let spec = BaseFieldSpec::qp(5).unwrap();
        let y = MSeries::var(&spec, 2, 1, 4, 30);
        let e = y.exp().unwrap();
        // 1 + y + y^2/2 + y^3/6 + y^4/24
        assert!(e.coeff(&[0, 0]).eq_mod(&fe(&spec, 1)));
        assert!(e.coeff(&[0, 2]).eq_mod(&fe(&spec, 1).div_int(2).unwrap()));
        assert!(e.coeff(&[0, 4]).eq_mod(&fe(&spec, 1).div_int(24).unwrap()));
        // integration is a section of the derivative
        let back = e.partial(1).integrate(1).unwrap();
        let diff = back.partial(1).sub(&e.partial(1)).unwrap();
        assert!(diff.is_zero_table() || diff.table().values().all(|c| c.is_zero_at_prec()));
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(1, 3).len(), 4);
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(factorial(5), BigInt::from(120));
    }
}

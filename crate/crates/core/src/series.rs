//! Truncated one-variable Laurent series with tracked-precision coefficients.
//!
//! A [`TruncSeries`] holds coefficients for exponents in `[kmin, order]`.
//! Absent entries are exact zeros; coefficients that are zero only at their
//! precision are kept, so valuation bounds survive cancellation. A series
//! may be flagged `exact`, meaning it equals its finite support on the nose
//! (polynomials such as `[pi_F](T)` or `Q_k`); products then keep the full
//! degree reach instead of the truncated-window bound.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::padic::{FElement, FieldSpec, Prec};

const UNBOUNDED: i64 = i64::MAX / 4;

/// Truncated Laurent series over `F`.
#[derive(Clone, PartialEq)]
pub struct TruncSeries {
    spec: FieldSpec,
    coeffs: BTreeMap<i64, FElement>,
    kmin: i64,
    order: i64,
    exact: bool,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{}..{}]{{", self.kmin, self.order)?;
        for (k, c) in &self.coeffs {
            write!(f, " {k}: {c},")?;
        }
        write!(f, " }}")
    }
}

impl TruncSeries {
    /// Zero series on the window `[0, order]`.
    pub fn zero(spec: &FieldSpec, order: i64) -> TruncSeries {
        TruncSeries { spec: spec.clone(), coeffs: BTreeMap::new(), kmin: 0, order, exact: false }
    }

    /// Exact zero polynomial.
    pub fn zero_exact(spec: &FieldSpec) -> TruncSeries {
        TruncSeries { spec: spec.clone(), coeffs: BTreeMap::new(), kmin: 0, order: 0, exact: true }
    }

    /// Truncated series from `(exponent, coefficient)` pairs.
    pub fn from_pairs(
        spec: &FieldSpec,
        pairs: impl IntoIterator<Item = (i64, FElement)>,
        kmin: i64,
        order: i64,
    ) -> TruncSeries {
        let mut s = TruncSeries {
            spec: spec.clone(),
            coeffs: BTreeMap::new(),
            kmin,
            order,
            exact: false,
        };
        for (k, c) in pairs {
            s.set(k, c);
        }
        s
    }

    /// Exact polynomial from `(exponent, coefficient)` pairs.
    pub fn poly(spec: &FieldSpec, pairs: impl IntoIterator<Item = (i64, FElement)>) -> TruncSeries {
        let mut coeffs = BTreeMap::new();
        let mut kmin = 0i64;
        let mut kmax = 0i64;
        for (k, c) in pairs {
            if c.is_exact_zero() {
                continue;
            }
            kmin = kmin.min(k);
            kmax = kmax.max(k);
            coeffs.insert(k, c);
        }
        TruncSeries { spec: spec.clone(), coeffs, kmin, order: kmax, exact: true }
    }

    /// The monomial `c * u^k` as an exact object.
    pub fn monomial(spec: &FieldSpec, k: i64, c: FElement) -> TruncSeries {
        TruncSeries::poly(spec, [(k, c)])
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn order(&self) -> i64 {
        self.order
    }
    pub fn kmin(&self) -> i64 {
        self.kmin
    }
    pub fn is_exact(&self) -> bool {
        self.exact
    }
    pub fn coeffs(&self) -> &BTreeMap<i64, FElement> {
        &self.coeffs
    }

    /// Coefficient at `k` (exact zero when absent).
    pub fn coeff(&self, k: i64) -> FElement {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| FElement::zero(&self.spec))
    }

    /// Lowest exponent with a stored coefficient, `None` for the zero series.
    pub fn low(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest exponent with a stored coefficient.
    pub fn high(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    fn low_or(&self, default: i64) -> i64 {
        self.low().unwrap_or(default)
    }

    /// Insert a coefficient; exact zeros are dropped, entries beyond the
    /// truncation order are discarded, and the lower window extends as needed.
    pub fn set(&mut self, k: i64, c: FElement) {
        if k > self.order {
            return;
        }
        if k < self.kmin {
            self.kmin = k;
        }
        if c.is_exact_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    /// Restrict to the window `[kmin, new_order]`.
    pub fn truncate_order(&self, new_order: i64) -> TruncSeries {
        let mut s = self.clone();
        s.coeffs.retain(|k, _| *k <= new_order);
        s.exact = self.exact && self.high().map_or(true, |h| h <= new_order);
        s.order = if s.exact { self.order.min(new_order) } else { new_order.min(self.order) };
        s
    }

    /// Reinterpret on a window `[kmin, order]`, dropping exactness.
    pub fn with_window(&self, kmin: i64, order: i64) -> TruncSeries {
        let mut s = self.clone();
        s.coeffs.retain(|k, _| *k <= order);
        s.kmin = kmin.min(s.low_or(kmin));
        s.order = order;
        s.exact = false;
        s
    }

    fn check(&self, other: &TruncSeries) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch("series over different base fields".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check(other)?;
        let exact = self.exact && other.exact;
        let order = if exact {
            self.order.max(other.order)
        } else {
            let a = if self.exact { UNBOUNDED } else { self.order };
            let b = if other.exact { UNBOUNDED } else { other.order };
            a.min(b)
        };
        let mut out = TruncSeries {
            spec: self.spec.clone(),
            coeffs: BTreeMap::new(),
            kmin: self.kmin.min(other.kmin),
            order,
            exact,
        };
        for (k, c) in &self.coeffs {
            out.set(*k, c.clone());
        }
        for (k, c) in &other.coeffs {
            let cur = out.coeff(*k);
            out.set(*k, cur.add(c)?);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TruncSeries {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scalar_mul(&self, s: &FElement) -> Result<TruncSeries> {
        let mut out = TruncSeries {
            spec: self.spec.clone(),
            coeffs: BTreeMap::new(),
            kmin: self.kmin,
            order: self.order,
            exact: self.exact,
        };
        for (k, c) in &self.coeffs {
            out.set(*k, c.mul(s)?);
        }
        Ok(out)
    }

    /// A working precision high enough that an identity coefficient never
    /// limits products with this series.
    pub fn ident_prec(&self) -> i64 {
        let mut n = 64;
        for c in self.coeffs.values() {
            if let Some(k) = c.unit_prec().finite() {
                n = n.max(k);
            }
            if let Some(k) = c.abs_prec().finite() {
                n = n.max(k);
            }
        }
        n + 16
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check(other)?;
        let exact = self.exact && other.exact;
        let order = if exact {
            self.high().unwrap_or(0) + other.high().unwrap_or(0)
        } else {
            // degrees fully determined by the known windows
            let a = if self.exact {
                UNBOUNDED
            } else {
                self.order + other.low_or(other.kmin)
            };
            let b = if other.exact {
                UNBOUNDED
            } else {
                other.order + self.low_or(self.kmin)
            };
            a.min(b)
        };
        let mut out = TruncSeries {
            spec: self.spec.clone(),
            coeffs: BTreeMap::new(),
            kmin: self.kmin + other.kmin,
            order,
            exact,
        };
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let k = i + j;
                if k > out.order {
                    continue;
                }
                let cur = out.coeff(k);
                out.set(k, cur.add(&a.mul(b)?)?);
            }
        }
        Ok(out)
    }

    /// Multiply by the monomial `u^k`.
    pub fn shift_exp(&self, k: i64) -> TruncSeries {
        let coeffs = self.coeffs.iter().map(|(i, c)| (i + k, c.clone())).collect();
        TruncSeries {
            spec: self.spec.clone(),
            coeffs,
            kmin: self.kmin + k,
            order: self.order.saturating_add(k),
            exact: self.exact,
        }
    }

    pub fn pow(&self, n: u32) -> Result<TruncSeries> {
        let np = self.ident_prec();
        let mut acc = TruncSeries::poly(&self.spec, [(0, FElement::one(&self.spec, np))]);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Formal derivative `d/du`.
    pub fn derivative(&self) -> TruncSeries {
        let mut out = TruncSeries {
            spec: self.spec.clone(),
            coeffs: BTreeMap::new(),
            kmin: if self.kmin < 0 { self.kmin - 1 } else { (self.kmin - 1).max(0) },
            order: if self.exact { self.order } else { self.order - 1 },
            exact: self.exact,
        };
        for (k, c) in &self.coeffs {
            if *k == 0 {
                continue;
            }
            out.set(k - 1, c.mul_int(*k));
        }
        out
    }

    /// Substitute `inner` (lowest exponent >= 1) into a power series.
    /// The result lives on `[0, want_order]`, further capped by what the
    /// truncations of both operands determine.
    pub fn compose(&self, inner: &TruncSeries, want_order: i64) -> Result<TruncSeries> {
        self.check(inner)?;
        if self.kmin < 0 || self.low_or(0) < 0 {
            return Err(Error::TruncationOverflow(
                "composition outer series must be a power series".into(),
            ));
        }
        if inner.low_or(1) < 1 {
            return Err(Error::TruncationOverflow(
                "composition inner series must have positive lowest exponent".into(),
            ));
        }
        let cap_outer = if self.exact { UNBOUNDED } else { self.order };
        let cap_inner = if inner.exact { UNBOUNDED } else { inner.order };
        let order = want_order.min(cap_outer).min(cap_inner);
        let exact = self.exact && inner.exact;
        let hi = match self.high() {
            None => return Ok(TruncSeries::zero(&self.spec, order)),
            Some(h) => h,
        };
        let mut acc = TruncSeries::zero(&self.spec, order);
        for m in (0..=hi).rev() {
            acc = acc.mul(inner)?;
            acc.exact = false;
            acc = acc.truncate_order(order);
            acc.order = order;
            let c = self.coeff(m);
            if !c.is_exact_zero() {
                let cur = acc.coeff(0);
                acc.set(0, cur.add(&c)?);
            }
        }
        if exact && acc.high().map_or(true, |h| h < order) {
            acc.exact = true;
            acc.order = acc.high().unwrap_or(0).max(0);
        }
        Ok(acc)
    }

    /// Multiplicative inverse up to `want_order`; the lowest coefficient
    /// must have a readable valuation.
    pub fn invert(&self, want_order: i64) -> Result<TruncSeries> {
        let low = self.low().ok_or(Error::DivisionByZero)?;
        let c_low = self.coeff(low);
        if c_low.is_zero_at_prec() {
            return Err(Error::DivisionByZero);
        }
        // self = c_low u^low (1 + y) with y of positive lowest exponent
        let np = self.ident_prec();
        let inv_c = FElement::one(&self.spec, np).div(&c_low)?;
        let mut y = self.shift_exp(-low).scalar_mul(&inv_c)?;
        let one = FElement::one(&self.spec, np);
        let cap = if self.exact { UNBOUNDED } else { self.order - low };
        let order = want_order.min(cap);
        y.set(0, y.coeff(0).sub(&one)?);
        y = y.with_window(0, order);
        // geometric series 1 - y + y^2 - ...
        let mut acc = TruncSeries::zero(&self.spec, order);
        acc.set(0, one.clone());
        let mut pw = TruncSeries::zero(&self.spec, order);
        pw.set(0, one);
        let ylow = y.low().unwrap_or(order + 1).max(1);
        let mut k = 1i64;
        while k * ylow <= order {
            pw = pw.mul(&y)?;
            pw = pw.truncate_order(order);
            pw.order = order;
            if pw.coeffs.is_empty() {
                break;
            }
            acc = if k % 2 == 1 { acc.sub(&pw)? } else { acc.add(&pw)? };
            k += 1;
        }
        acc.order = order;
        let mut out = acc.shift_exp(-low).scalar_mul(&inv_c)?;
        out.exact = false;
        out.order = order - low;
        out.kmin = out.kmin.min(-low);
        Ok(out)
    }

    /// Coefficient-wise congruence over the intersection of the windows.
    pub fn agrees_with(&self, other: &TruncSeries) -> bool {
        if self.spec != other.spec {
            return false;
        }
        let lo = self.kmin.max(other.kmin);
        let hi = self.order.min(other.order);
        for k in self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
        {
            if k < lo || k > hi {
                continue;
            }
            if !self.coeff(k).eq_mod(&other.coeff(k)) {
                return false;
            }
        }
        true
    }

    /// Smallest absolute precision among stored coefficients.
    pub fn min_abs_prec(&self) -> Prec {
        self.coeffs.values().map(|c| c.abs_prec()).min().unwrap_or(Prec::Exact)
    }

    /// Truncate every coefficient to absolute precision `a`.
    pub fn truncate_coeff_prec(&self, a: i64) -> TruncSeries {
        let mut out = TruncSeries {
            spec: self.spec.clone(),
            coeffs: BTreeMap::new(),
            kmin: self.kmin,
            order: self.order,
            exact: false,
        };
        for (k, c) in &self.coeffs {
            out.set(*k, c.truncate_abs(a));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::BaseFieldSpec;

    fn z3() -> FieldSpec {
        BaseFieldSpec::qp(3).unwrap()
    }

    fn fe(spec: &FieldSpec, v: i64) -> FElement {
        FElement::from_int(spec, v, 30)
    }

    #[test]
    fn mul_truncates_to_window() {
        let spec = z3();
        // (1 + u) * (1 - u) = 1 - u^2 on a window of order 5
        let a = TruncSeries::from_pairs(&spec, [(0, fe(&spec, 1)), (1, fe(&spec, 1))], 0, 5);
        let b = TruncSeries::from_pairs(&spec, [(0, fe(&spec, 1)), (1, fe(&spec, -1))], 0, 5);
        let c = a.mul(&b).unwrap();
        assert!(c.coeff(0).eq_mod(&fe(&spec, 1)));
        assert!(c.coeff(1).is_zero_at_prec());
        assert!(c.coeff(2).eq_mod(&fe(&spec, -1)));
        assert_eq!(c.order(), 5);
    }

    #[test]
    fn exact_polynomial_products_keep_degree() {
        let spec = z3();
        let t = TruncSeries::monomial(&spec, 1, fe(&spec, 1));
        let sq = t.mul(&t).unwrap();
        assert!(sq.is_exact());
        assert_eq!(sq.order(), 2);
        assert!(sq.coeff(2).eq_mod(&fe(&spec, 1)));
    }

    #[test]
    fn laurent_inverse() {
        let spec = z3();
        // (u + u^2)^-1 = u^-1 (1 - u + u^2 - ...)
        let s = TruncSeries::poly(&spec, [(1, fe(&spec, 1)), (2, fe(&spec, 1))]);
        let inv = s.invert(6).unwrap();
        let prod = s.mul(&inv).unwrap();
        let one = TruncSeries::from_pairs(&spec, [(0, fe(&spec, 1))], -1, prod.order());
        assert!(prod.agrees_with(&one));
        assert_eq!(inv.low(), Some(-1));
    }

    #[test]
    fn composition_matches_hand_expansion() {
        let spec = z3();
        // outer = 1 + T + T^2, inner = u + u^3: plain polynomial composition
        let outer =
            TruncSeries::poly(&spec, [(0, fe(&spec, 1)), (1, fe(&spec, 1)), (2, fe(&spec, 1))]);
        let inner = TruncSeries::poly(&spec, [(1, fe(&spec, 1)), (3, fe(&spec, 1))]);
        let c = outer.compose(&inner, 10).unwrap();
        // 1 + (u+u^3) + (u+u^3)^2 = 1 + u + u^2 + u^3 + 2u^4 + u^6
        for (k, v) in [(0, 1), (1, 1), (2, 1), (3, 1), (4, 2), (5, 0), (6, 1)] {
            assert!(c.coeff(k).eq_mod(&fe(&spec, v)), "coeff {k}");
        }
    }

    #[test]
    fn derivative_leibniz() {
        let spec = z3();
        let a = TruncSeries::from_pairs(
            &spec,
            [(-1, fe(&spec, 2)), (0, fe(&spec, 1)), (2, fe(&spec, 5))],
            -1,
            8,
        );
        let b = TruncSeries::from_pairs(&spec, [(1, fe(&spec, 1)), (2, fe(&spec, 7))], 0, 8);
        let lhs = a.mul(&b).unwrap().derivative();
        let rhs = a
            .derivative()
            .mul(&b)
            .unwrap()
            .add(&a.mul(&b.derivative()).unwrap())
            .unwrap();
        assert!(lhs.agrees_with(&rhs));
    }
}

//! Prime-field arithmetic, univariate polynomials and Buchberger's algorithm
//! in grevlex order. Sized for the oracle: a handful of variables, small
//! degrees, `p < 2^32`.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        debug_assert!((2..1 << 32).contains(&p));
        Fp { p }
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }

    /// Smallest generator of `F_p^×`.
    pub fn generator(self) -> u64 {
        let mut factors = Vec::new();
        let mut n = self.p - 1;
        let mut q = 2;
        while q * q <= n {
            if n.is_multiple_of(q) {
                factors.push(q);
                while n.is_multiple_of(q) {
                    n /= q;
                }
            }
            q += 1;
        }
        if n > 1 {
            factors.push(n);
        }
        (2..self.p).find(|&g| factors.iter().all(|&f| self.pow(g, (self.p - 1) / f) != 1)).unwrap_or(1)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// Dense univariate polynomial, lowest coefficient first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct UPoly(pub Vec<u64>);

impl UPoly {
    pub fn new(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn derivative(&self, f: Fp) -> UPoly {
        UPoly::new(self.0.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, i as u64 % f.p)).collect())
    }

    /// `(q, r)` with `self = q·d + r`.
    pub fn div_rem(&self, d: &UPoly, f: Fp) -> (UPoly, UPoly) {
        let dd = d.degree().expect("nonzero divisor");
        let lead_inv = f.inv(d.0[dd]);
        let mut r = self.0.clone();
        let mut q = vec![0; r.len().saturating_sub(dd).max(1)];
        while r.len() > dd {
            let top = r.len() - 1;
            let c = f.mul(r[top], lead_inv);
            let shift = top - dd;
            q[shift] = c;
            for (i, &dc) in d.0.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, dc));
            }
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn monic(&self, f: Fp) -> UPoly {
        match self.0.last() {
            None => self.clone(),
            Some(&l) => {
                let inv = f.inv(l);
                UPoly(self.0.iter().map(|&c| f.mul(c, inv)).collect())
            }
        }
    }

    pub fn gcd(&self, other: &UPoly, f: Fp) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b, f).1;
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `self / gcd(self, self')`; the product of the distinct irreducible
    /// factors when `deg self < p`.
    pub fn squarefree_part(&self, f: Fp) -> UPoly {
        let g = self.gcd(&self.derivative(f), f);
        self.div_rem(&g, f).0.monic(f)
    }
}

/// Exponent vector ordered by graded reverse lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Mono(pub Vec<u32>);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn div(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn coprime(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// `Some(i)` when this is a pure power of variable `i`.
    pub fn pure_power_of(&self) -> Option<usize> {
        let mut nz = self.0.iter().enumerate().filter(|(_, &e)| e > 0);
        match (nz.next(), nz.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over `F_p`; nonzero coefficients only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Poly {
    pub terms: BTreeMap<Mono, u64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn from_terms(f: Fp, terms: impl IntoIterator<Item = (Mono, u64)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(f, m, c);
        }
        p
    }

    fn add_term(&mut self, f: Fp, m: Mono, c: u64) {
        let c = c % f.p;
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                let v = f.add(*o.get(), c);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<(&Mono, u64)> {
        self.terms.iter().next_back().map(|(m, c)| (m, *c))
    }

    pub fn monic(&self, f: Fp) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = f.inv(c);
                Poly { terms: self.terms.iter().map(|(m, &x)| (m.clone(), f.mul(x, inv))).collect() }
            }
        }
    }

    /// `self - c · x^mono · other`.
    fn sub_scaled(&mut self, f: Fp, c: u64, mono: &Mono, other: &Poly) {
        for (m, &x) in &other.terms {
            self.add_term(f, m.mul(mono), f.p - f.mul(c, x));
        }
    }

    /// Full reduction modulo `basis` (every term, not only the leading one).
    pub fn normal_form(&self, basis: &[Poly], f: Fp) -> Poly {
        let mut p = self.clone();
        let mut rem = Poly::zero();
        while let Some((lm, lc)) = p.leading().map(|(m, c)| (m.clone(), c)) {
            let div = basis.iter().find(|g| g.leading().is_some_and(|(gm, _)| gm.divides(&lm)));
            match div {
                Some(g) => {
                    let (gm, gc) = g.leading().unwrap();
                    let c = f.mul(lc, f.inv(gc));
                    p.sub_scaled(f, c, &lm.div(gm), g);
                }
                None => {
                    p.terms.remove(&lm);
                    rem.terms.insert(lm, lc);
                }
            }
        }
        rem
    }

    fn s_poly(&self, other: &Poly, f: Fp) -> Poly {
        let (a, ac) = self.leading().unwrap();
        let (b, bc) = other.leading().unwrap();
        let l = a.lcm(b);
        let mut s = Poly::zero();
        s.sub_scaled(f, f.p - f.inv(ac), &l.div(a), self);
        s.sub_scaled(f, f.inv(bc), &l.div(b), other);
        s
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub(crate) fn groebner(gens: &[Poly], f: Fp) -> Vec<Poly> {
    let mut basis: Vec<Poly> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.monic(f)).collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (a, _) = basis[i].leading().unwrap();
        let (b, _) = basis[j].leading().unwrap();
        if a.coprime(b) {
            continue;
        }
        let r = basis[i].s_poly(&basis[j], f).normal_form(&basis, f);
        if !r.is_zero() {
            basis.push(r.monic(f));
            let k = basis.len() - 1;
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    reduce(basis, f)
}

fn reduce(mut basis: Vec<Poly>, f: Fp) -> Vec<Poly> {
    basis.sort_by(|a, b| a.leading().unwrap().0.cmp(b.leading().unwrap().0));
    let mut minimal: Vec<Poly> = Vec::new();
    for g in basis {
        let lm = g.leading().unwrap().0.clone();
        if !minimal.iter().any(|h| h.leading().unwrap().0.divides(&lm)) {
            minimal.push(g);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Poly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        let (lm, lc) = minimal[i].leading().map(|(m, c)| (m.clone(), c)).unwrap();
        let mut tail = minimal[i].clone();
        tail.terms.remove(&lm);
        let mut g = tail.normal_form(&others, f);
        g.terms.insert(lm, lc);
        out.push(g.monic(f));
    }
    out
}

/// Quotient data of a zero-dimensional ideal given by a Gröbner basis.
pub(crate) struct Quotient<'a> {
    basis: &'a [Poly],
    nvars: usize,
    f: Fp,
    standard: Vec<Mono>,
}

impl<'a> Quotient<'a> {
    /// `None` when the ideal is not zero-dimensional.
    pub fn new(basis: &'a [Poly], nvars: usize, f: Fp) -> Option<Self> {
        let leads: Vec<&Mono> = basis.iter().map(|g| g.leading().unwrap().0).collect();
        let mut caps = vec![None; nvars];
        for m in &leads {
            if m.degree() == 0 {
                return Some(Quotient { basis, nvars, f, standard: Vec::new() });
            }
            if let Some(i) = m.pure_power_of() {
                let e = m.0[i];
                caps[i] = Some(caps[i].map_or(e, |c: u32| c.min(e)));
            }
        }
        let caps: Vec<u32> = caps.into_iter().collect::<Option<_>>()?;
        let mut standard = Vec::new();
        let mut cur = vec![0u32; nvars];
        'outer: loop {
            let m = Mono(cur.clone());
            if !leads.iter().any(|l| l.divides(&m)) {
                standard.push(m);
            }
            for i in 0..nvars {
                if cur[i] + 1 < caps[i] {
                    cur[i] += 1;
                    continue 'outer;
                }
                cur[i] = 0;
            }
            break;
        }
        Some(Quotient { basis, nvars, f, standard })
    }

    pub fn dim(&self) -> usize {
        self.standard.len()
    }

    fn coords(&self, p: &Poly) -> Vec<u64> {
        self.standard.iter().map(|m| p.terms.get(m).copied().unwrap_or(0)).collect()
    }

    /// Minimal polynomial of the variable `var` acting on the quotient.
    pub fn minimal_polynomial(&self, var: usize) -> UPoly {
        let f = self.f;
        let mut x = vec![0u32; self.nvars];
        x[var] = 1;
        let x = Poly::from_terms(f, [(Mono(x), 1)]);
        let one = Poly::from_terms(f, [(Mono(vec![0; self.nvars]), 1)]);
        // Echelon rows: (pivot column, vector, combination of powers).
        let mut rows: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new();
        let mut power = one.normal_form(self.basis, f);
        for k in 0..=self.dim() {
            let mut v = self.coords(&power);
            let mut comb = vec![0u64; k + 1];
            comb[k] = 1;
            for (piv, rv, rc) in &rows {
                let c = v[*piv];
                if c != 0 {
                    for (a, b) in v.iter_mut().zip(rv) {
                        *a = f.sub(*a, f.mul(c, *b));
                    }
                    for (i, b) in rc.iter().enumerate() {
                        comb[i] = f.sub(comb[i], f.mul(c, *b));
                    }
                }
            }
            match v.iter().position(|&c| c != 0) {
                None => return UPoly::new(comb).monic(f),
                Some(piv) => {
                    let inv = f.inv(v[piv]);
                    let v: Vec<u64> = v.iter().map(|&a| f.mul(a, inv)).collect();
                    let comb: Vec<u64> = comb.iter().map(|&a| f.mul(a, inv)).collect();
                    rows.push((piv, v, comb));
                }
            }
            power = mul(&power, &x, f).normal_form(self.basis, f);
        }
        unreachable!("k + 1 vectors in a k-dimensional space are dependent")
    }
}

pub(crate) fn mul(a: &Poly, b: &Poly, f: Fp) -> Poly {
    let mut out = Poly::zero();
    for (ma, &ca) in &a.terms {
        for (mb, &cb) in &b.terms {
            out.add_term(f, ma.mul(mb), f.mul(ca, cb));
        }
    }
    out
}

pub(crate) fn univariate_in(u: &UPoly, var: usize, nvars: usize, f: Fp) -> Poly {
    Poly::from_terms(
        f,
        u.0.iter().enumerate().map(|(e, &c)| {
            let mut m = vec![0u32; nvars];
            m[var] = e as u32;
            (Mono(m), c)
        }),
    )
}

/// Number of distinct common zeros over the algebraic closure of `F_p`, or
/// `None` when the zero set is infinite.
pub(crate) fn count_closure_points(gens: &[Poly], nvars: usize, f: Fp) -> Option<u64> {
    let gb = groebner(gens, f);
    let q = Quotient::new(&gb, nvars, f)?;
    if q.dim() == 0 {
        return Some(0);
    }
    let mut radical = gb.clone();
    let mut already = true;
    for v in 0..nvars {
        let mu = q.minimal_polynomial(v);
        let sf = mu.squarefree_part(f);
        already &= sf.degree() == mu.degree();
        radical.push(univariate_in(&sf, v, nvars, f));
    }
    if already {
        return Some(q.dim() as u64);
    }
    let gb = groebner(&radical, f);
    Quotient::new(&gb, nvars, f).map(|q| q.dim() as u64)
}

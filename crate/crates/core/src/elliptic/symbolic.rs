//! Polynomial ring in the elliptic function symbols, `B = 2πi c/(cτ+d)` and
//! position variables, with coefficients in `Q[(2πi)^±1]`.
//!
//! Two-point functions carry labels `(hi, lo)` and stand for `f(z_hi - z_lo)`.
//! Label `0` is the origin (`z_0 = 0`), so single-variable functions use `(1, 0)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::scalar::{int, Graded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    /// `G_w`, by weight.
    Eis(u32),
    P { k: u32, hi: u32, lo: u32 },
    PTilde1 { hi: u32, lo: u32 },
    /// `g_j^i`, always with `i ≥ 1`.
    G { i: u32, j: u32, hi: u32, lo: u32 },
    B,
    Z(u32),
}

impl Atom {
    pub fn weight(&self) -> i32 {
        match *self {
            Atom::Eis(w) => w as i32,
            Atom::P { k, .. } => k as i32,
            Atom::PTilde1 { .. } => 1,
            Atom::G { i, j, .. } => (i + j) as i32,
            Atom::B => 2,
            Atom::Z(_) => -1,
        }
    }

    pub fn labels(&self) -> Option<(u32, u32)> {
        match *self {
            Atom::P { hi, lo, .. } | Atom::PTilde1 { hi, lo } | Atom::G { hi, lo, .. } => Some((hi, lo)),
            _ => None,
        }
    }

    /// True for the `z`-dependent elliptic functions.
    pub fn is_elliptic(&self) -> bool {
        self.labels().is_some()
    }
}

fn pair(hi: u32, lo: u32) -> String {
    if lo == 0 {
        format!("z{hi}")
    } else {
        format!("z{hi}-z{lo}")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::Eis(w) => write!(f, "G_{w}"),
            Atom::P { k, hi, lo } => write!(f, "P_{k}({})", pair(hi, lo)),
            Atom::PTilde1 { hi, lo } => write!(f, "Ptilde_1({})", pair(hi, lo)),
            Atom::G { i, j, hi, lo } => write!(f, "g^{i}_{j}({})", pair(hi, lo)),
            Atom::B => write!(f, "B"),
            Atom::Z(j) => write!(f, "z{j}"),
        }
    }
}

/// Sorted product of atom powers.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, 1)])
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.0.iter().find(|(b, _)| b == a).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<Atom, u32> = self.0.iter().cloned().collect();
        for (a, e) in &other.0 {
            *m.entry(*a).or_default() += e;
        }
        Monomial(m.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn without(&self, a: &Atom) -> Monomial {
        Monomial(self.0.iter().filter(|(b, _)| b != a).cloned().collect())
    }

    pub fn weight(&self) -> i32 {
        self.0.iter().map(|(a, e)| a.weight() * *e as i32).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|(a, e)| if *e == 1 { a.to_string() } else { format!("{a}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly(BTreeMap<Monomial, Graded>);

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Graded::one())
    }

    pub fn constant(c: Graded) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), &c);
        p
    }

    pub fn atom(a: Atom) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::atom(a), &Graded::one());
        p
    }

    pub fn b() -> Self {
        Poly::atom(Atom::B)
    }

    /// `z_hi - z_lo`, with `z_0 = 0`.
    pub fn z_diff(hi: u32, lo: u32) -> Self {
        let z = |j: u32| if j == 0 { Poly::zero() } else { Poly::atom(Atom::Z(j)) };
        z(hi).sub(&z(lo))
    }

    pub fn eis(w: u32) -> Self {
        Poly::atom(Atom::Eis(w))
    }

    /// `P_k(z_a - z_b)` in normal orientation; `P_1` becomes `P̃_1 - πi`.
    pub fn p(k: u32, a: u32, b: u32) -> Self {
        assert!(k >= 1 && a != b, "P_k needs k >= 1 and distinct labels");
        if k == 1 {
            return Poly::p_tilde_1(a, b).sub(&Poly::constant(Graded::pi_i()));
        }
        let (hi, lo, sign) = if a > b { (a, b, 1) } else { (b, a, if k % 2 == 0 { 1 } else { -1 }) };
        Poly::atom(Atom::P { k, hi, lo }).scale(&Graded::int(sign))
    }

    /// `P̃_1(z_a - z_b)`, an odd function.
    pub fn p_tilde_1(a: u32, b: u32) -> Self {
        assert!(a != b, "distinct labels required");
        if a > b {
            Poly::atom(Atom::PTilde1 { hi: a, lo: b })
        } else {
            Poly::atom(Atom::PTilde1 { hi: b, lo: a }).neg()
        }
    }

    /// `g_j^i(z_a - z_b)`; `i = 0` gives `P_j`.
    pub fn g(i: u32, j: u32, a: u32, b: u32) -> Self {
        assert!(j >= 1 && a != b, "g_j^i needs j >= 1 and distinct labels");
        if i == 0 {
            return Poly::p(j, a, b);
        }
        let (hi, lo, sign) = if a > b { (a, b, 1) } else { (b, a, if (j + i) % 2 == 0 { 1 } else { -1 }) };
        Poly::atom(Atom::G { i, j, hi, lo }).scale(&Graded::int(sign))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Graded)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Graded {
        self.0.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Graded {
        self.coeff(&Monomial::one())
    }

    pub fn as_constant(&self) -> Option<Graded> {
        match self.0.len() {
            0 => Some(Graded::zero()),
            1 => self.0.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: &Graded) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(m.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Graded::int(-1))
    }

    pub fn scale(&self, c: &Graded) -> Poly {
        let mut out = Poly::zero();
        for (m, x) in &self.0 {
            out.add_term(m.clone(), &(x * c));
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Poly {
        self.scale(&Graded::rational(r.clone()))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = self.0.keys().flat_map(|m| m.0.iter().map(|(a, _)| *a)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn contains(&self, pred: impl Fn(&Atom) -> bool) -> bool {
        self.0.keys().any(|m| m.0.iter().any(|(a, _)| pred(a)))
    }

    /// Groups terms by the power of `a`.
    pub fn collect_in(&self, a: &Atom) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.0 {
            out.entry(m.degree_in(a)).or_default().add_term(m.without(a), c);
        }
        out
    }

    /// Ring homomorphism sending each atom to `f(atom)`, or to itself when `f` returns `None`.
    pub fn substitute(&self, f: &dyn Fn(&Atom) -> Result<Option<Poly>>) -> Result<Poly> {
        let mut cache: BTreeMap<Atom, Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            let mut term = Poly::constant(c.clone());
            for (a, e) in &m.0 {
                if !cache.contains_key(a) {
                    let img = f(a)?.unwrap_or_else(|| Poly::atom(*a));
                    cache.insert(*a, img);
                }
                term = term.mul(&cache[a].pow(*e));
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Derivation determined by its values on atoms (Leibniz rule).
    pub fn derive(&self, d: &dyn Fn(&Atom) -> Result<Poly>) -> Result<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            for (idx, (a, e)) in m.0.iter().enumerate() {
                let da = d(a)?;
                if da.is_zero() {
                    continue;
                }
                let mut rest = m.0.clone();
                if *e == 1 {
                    rest.remove(idx);
                } else {
                    rest[idx].1 -= 1;
                }
                let rest = Monomial(rest);
                let coef = c.scale(&int(*e as i64));
                let mut t = Poly::zero();
                t.add_term(rest, &coef);
                out = out.add(&t.mul(&da));
            }
        }
        Ok(out)
    }

    pub fn eval(&self, values: &dyn Fn(&Atom) -> Result<Complex64>) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, c) in &self.0 {
            let mut t = c.to_complex();
            for (a, e) in &m.0 {
                t *= values(a)?.powi(*e as i32);
            }
            s += t;
        }
        Ok(s)
    }

    /// Common weight of all terms (`2πi` has weight 0, `B` weight 2). `None` if mixed.
    pub fn homogeneous_weight(&self) -> Option<i32> {
        let mut w = None;
        for m in self.0.keys() {
            match w {
                None => w = Some(m.weight()),
                Some(x) if x != m.weight() => return None,
                _ => {}
            }
        }
        w
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(m, c)| if m.is_one() { format!("({c})") } else { format!("({c})*{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn t_pow(e: i32) -> Graded {
    Graded::tpi_pow(e)
}

/// `∂_τ` on atoms.
pub fn d_tau_atom(a: &Atom) -> Result<Poly> {
    Ok(match *a {
        Atom::P { k, hi, lo } => Poly::g(1, k + 1, hi, lo).scale(&Graded::term(int(k as i64), -1)),
        Atom::PTilde1 { hi, lo } => Poly::g(1, 2, hi, lo).scale(&t_pow(-1)),
        Atom::G { i, j, hi, lo } => Poly::g(i + 1, j + 1, hi, lo).scale(&Graded::term(int(j as i64), -1)),
        Atom::B => Poly::b().pow(2).scale(&Graded::term(int(-1), -1)),
        Atom::Z(_) => Poly::zero(),
        Atom::Eis(w) => return Err(Error::InvalidInput(format!("∂_τ G_{w} is not in the ring"))),
    })
}

/// `∂/∂z_hi` with `z_lo` fixed, acting on atoms attached to the pair `(hi, lo)`.
pub fn d_z_atom(a: &Atom, hi: u32, lo: u32) -> Poly {
    let same = |h: u32, l: u32| h == hi && l == lo;
    match *a {
        Atom::P { k, hi: h, lo: l } if same(h, l) => Poly::p(k + 1, h, l).scale(&Graded::int(k as i64)),
        Atom::PTilde1 { hi: h, lo: l } if same(h, l) => Poly::p(2, h, l),
        Atom::G { i, j, hi: h, lo: l } if same(h, l) => Poly::g(i, j + 1, h, l).scale(&Graded::int(j as i64)),
        Atom::Z(x) if x == hi => Poly::one(),
        _ => Poly::zero(),
    }
}

/// Image `(cτ+d)^{-w} f(γz, γτ)` of an atom, as a polynomial in the atoms at `(z, τ)`.
///
/// Defined for `G_w`, `P_k`, `P̃_1` and `g_j^i` with `j > i`; the `g` images are
/// computed from `T(∂_τ f) = ∂_τ T(f) + (wB/2πi) T(f) + (B/2πi)(z_hi-z_lo) ∂_z T(f)`.
pub fn transform_atom(a: &Atom) -> Result<Poly> {
    match *a {
        Atom::Eis(2) => Ok(Poly::eis(2).sub(&Poly::b())),
        Atom::Eis(w) => Ok(Poly::eis(w)),
        Atom::P { k: 2, .. } => Ok(Poly::atom(*a).sub(&Poly::b())),
        Atom::P { .. } => Ok(Poly::atom(*a)),
        Atom::PTilde1 { hi, lo } => Ok(Poly::atom(*a).sub(&Poly::b().mul(&Poly::z_diff(hi, lo)))),
        Atom::G { i, j, hi, lo } => {
            if j <= i {
                return Err(Error::NotTabulated(format!("g^{i}_{j}: transformation needs j > i")));
            }
            let prev = if i == 1 && j == 2 { Poly::p_tilde_1(hi, lo) } else { Poly::g(i - 1, j - 1, hi, lo) };
            let w = (i + j - 2) as i64;
            let tf = prev.substitute(&|x| transform_atom(x).map(Some))?;
            let d_tau = tf.derive(&d_tau_atom)?;
            let d_z = tf.derive(&|x| Ok(d_z_atom(x, hi, lo)))?;
            let b_over_t = Poly::b().scale(&t_pow(-1));
            let sum = d_tau
                .add(&tf.mul(&b_over_t).scale(&Graded::int(w)))
                .add(&b_over_t.mul(&Poly::z_diff(hi, lo)).mul(&d_z));
            Ok(sum.scale(&Graded::term(BigRational::new(1.into(), (j as i64 - 1).into()), 1)))
        }
        // z has weight -1, so (cτ+d) · z/(cτ+d) = z
        Atom::Z(_) => Ok(Poly::atom(*a)),
        Atom::B => Err(Error::InvalidInput("B has no modular image in this ring".into())),
    }
}

/// `T(f) = (cτ+d)^{-w} f(γz, γτ)` for a polynomial in function atoms.
pub fn transform(p: &Poly) -> Result<Poly> {
    p.substitute(&|a| transform_atom(a).map(Some))
}

/// `Δf = T(f) - f`.
pub fn delta(p: &Poly) -> Result<Poly> {
    Ok(transform(p)?.sub(p))
}

//! Arithmetic in `GF(p^e)` for `p <= 251`, `p^e <= 2^16`. Point scans are
//! limited to `e <= 4`; larger extensions serve the interpolation grids of
//! the generic-point test.
//!
//! An element is stored as the integer whose base-`p` digits are the
//! coefficients of its polynomial representative (digit `i` is the
//! coefficient of `x^i`). Prime-field elements therefore keep the same
//! encoding in every extension, so a matrix over `GF(p)` can be read as a
//! matrix over `GF(p^e)` without conversion.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::perm::is_prime;

type Registry<K, V> = RwLock<HashMap<K, Arc<V>>>;

pub type Elem = u16;

pub const MAX_PRIME: u32 = 251;
/// Largest extension degree for point scans.
pub const MAX_EXT_DEGREE: u32 = 4;
/// Largest extension degree of any field context.
pub const MAX_FIELD_DEGREE: u32 = 16;
pub const MAX_ORDER: u32 = 1 << 16;
const TABLE_ORDER: u32 = 256;

/// Least monic irreducible polynomials, coefficients `c_0..c_{e-1}` below the
/// leading 1. "Least" orders polynomials by the integer `Σ c_i p^i`.
const KNOWN_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (3, 2, &[1, 0]),
    (3, 3, &[1, 2, 0]),
    (3, 4, &[2, 1, 0, 0]),
    (5, 2, &[2, 0]),
    (5, 3, &[1, 1, 0]),
    (5, 4, &[2, 0, 0, 0]),
];

#[derive(Debug)]
pub struct FieldContext {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, `c_0, ..., c_{e-1}, 1`.
    modulus: Vec<u32>,
    exp: Vec<Elem>,
    log: Vec<u32>,
    inv: Vec<Elem>,
    neg: Vec<Elem>,
    mul_table: Option<Vec<Elem>>,
    add_table: Option<Vec<Elem>>,
    /// `zech[n] = log(1 + g^n)`, `u32::MAX` when `1 + g^n = 0`.
    zech: Option<Vec<u32>>,
}

impl FieldContext {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::invalid(format!("p = {p} must be a prime <= {MAX_PRIME}")));
        }
        if e == 0 || e > MAX_FIELD_DEGREE {
            return Err(Error::invalid(format!(
                "extension degree {e} outside 1..={MAX_FIELD_DEGREE}"
            )));
        }
        let q = (p as u64).pow(e);
        if q > MAX_ORDER as u64 {
            return Err(Error::invalid(format!("GF({p}^{e}) exceeds 2^16 elements")));
        }
        let q = q as u32;
        let modulus = match KNOWN_MODULI.iter().find(|(kp, ke, _)| *kp == p && *ke == e) {
            Some((_, _, c)) => {
                let mut m = c.to_vec();
                m.push(1);
                if !is_irreducible(&m, p) {
                    return Err(Error::internal(format!("tabulated modulus {m:?} is reducible")));
                }
                m
            }
            None => least_irreducible(p, e),
        };

        let mut ctx = FieldContext {
            p,
            e,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            inv: Vec::new(),
            neg: Vec::new(),
            mul_table: None,
            add_table: None,
            zech: None,
        };
        ctx.build_tables()?;
        Ok(ctx)
    }

    /// Shared, lazily built context for `GF(p^e)`.
    pub fn get(p: u32, e: u32) -> Result<Arc<FieldContext>> {
        static CACHE: OnceLock<Registry<(u32, u32), FieldContext>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(f) = cache.read().expect("field cache poisoned").get(&(p, e)) {
            return Ok(f.clone());
        }
        let built = Arc::new(FieldContext::new(p, e)?);
        let mut w = cache.write().expect("field cache poisoned");
        Ok(w.entry((p, e)).or_insert(built).clone())
    }

    fn build_tables(&mut self) -> Result<()> {
        let q = self.q as usize;
        let order = q - 1;
        let g = self.find_primitive()?;
        self.exp = vec![0; 2 * order.max(1)];
        self.log = vec![0; q];
        let mut x: Elem = 1;
        for i in 0..order {
            self.exp[i] = x;
            self.log[x as usize] = i as u32;
            x = self.slow_mul(x, g);
        }
        for i in order..2 * order {
            self.exp[i] = self.exp[i - order];
        }
        self.inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    self.exp[(order - self.log[a] as usize) % order]
                }
            })
            .collect();
        self.neg = (0..q as u32)
            .map(|a| self.digitwise(a, 0, |x, _| (self.p - x) % self.p))
            .collect();

        if self.q <= TABLE_ORDER {
            let mut mt = vec![0; q * q];
            for a in 0..q {
                for b in 0..q {
                    mt[a * q + b] = self.log_mul(a as Elem, b as Elem);
                }
            }
            self.mul_table = Some(mt);
            if self.e > 1 {
                let mut at = vec![0; q * q];
                for a in 0..q as u32 {
                    for b in 0..q as u32 {
                        at[(a * self.q + b) as usize] = self.digitwise(a, b, |x, y| (x + y) % self.p);
                    }
                }
                self.add_table = Some(at);
            }
        } else if self.e > 1 {
            let zech = (0..order)
                .map(|n| {
                    let s = self.digitwise(1, self.exp[n] as u32, |x, y| (x + y) % self.p);
                    if s == 0 {
                        u32::MAX
                    } else {
                        self.log[s as usize]
                    }
                })
                .collect();
            self.zech = Some(zech);
        }
        Ok(())
    }

    fn digitwise(&self, a: u32, b: u32, f: impl Fn(u32, u32) -> u32) -> Elem {
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += f(a % self.p, b % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as Elem
    }

    fn to_digits(&self, mut a: u32) -> Vec<u32> {
        (0..self.e)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn elem_of_digits(&self, d: &[u32]) -> Elem {
        d.iter().rev().fold(0u32, |acc, &x| acc * self.p + x) as Elem
    }

    /// Polynomial multiplication modulo the defining polynomial; used only to
    /// build the tables.
    fn slow_mul(&self, a: Elem, b: Elem) -> Elem {
        let (p, e) = (self.p, self.e as usize);
        let da = self.to_digits(a as u32);
        let db = self.to_digits(b as u32);
        let mut prod = vec![0u32; 2 * e];
        for i in 0..e {
            for j in 0..e {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        for deg in (e..2 * e).rev() {
            let c = prod[deg];
            if c != 0 {
                for k in 0..=e {
                    let idx = deg - e + k;
                    prod[idx] = (prod[idx] + (p - c) * self.modulus[k]) % p;
                }
            }
        }
        self.elem_of_digits(&prod[..e])
    }

    fn slow_pow(&self, a: Elem, mut k: u64) -> Elem {
        let mut acc: Elem = 1;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            k >>= 1;
        }
        acc
    }

    fn find_primitive(&self) -> Result<Elem> {
        let order = (self.q - 1) as u64;
        if order == 1 {
            return Ok(1);
        }
        let factors = prime_factors(order);
        (2..self.q)
            .map(|g| g as Elem)
            .find(|&g| factors.iter().all(|&l| self.slow_pow(g, order / l) != 1))
            .ok_or_else(|| Error::internal(format!("no primitive element in GF({})", self.q)))
    }

    #[inline]
    fn log_mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.e == 1
    }

    /// Monic defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> Elem {
        if self.q == 2 {
            1
        } else {
            self.exp[1]
        }
    }

    /// Human-readable label, e.g. `GF(2^2) mod x^2+x+1`.
    pub fn label(&self) -> String {
        if self.e == 1 {
            return format!("GF({})", self.p);
        }
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            terms.push(match i {
                0 => c.to_string(),
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        format!("GF({}^{}) mod {}", self.p, self.e, terms.join("+"))
    }

    /// Reduces an integer into the prime subfield.
    #[inline]
    pub fn from_int(&self, v: i64) -> Elem {
        v.rem_euclid(self.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.e == 1 {
            let s = a as u32 + b as u32;
            return if s >= self.p { (s - self.p) as Elem } else { s as Elem };
        }
        if self.p == 2 {
            return a ^ b;
        }
        if let Some(t) = &self.add_table {
            return t[a as usize * self.q as usize + b as usize];
        }
        self.zech_add(a, b)
    }

    fn zech_add(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let order = self.q - 1;
        let la = self.log[a as usize];
        let lb = self.log[b as usize];
        let d = (lb + order - la) % order;
        let z = self.zech.as_ref().expect("zech table")[d as usize];
        if z == u32::MAX {
            0
        } else {
            self.exp[((la + z) % order) as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if self.e == 1 {
            return ((a as u32 * b as u32) % self.p) as Elem;
        }
        if let Some(t) = &self.mul_table {
            return t[a as usize * self.q as usize + b as usize];
        }
        self.log_mul(a, b)
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero { q: self.q });
        }
        Ok(self.inv[a as usize])
    }

    #[inline]
    pub(crate) fn inv_nonzero(&self, a: Elem) -> Elem {
        debug_assert_ne!(a, 0);
        self.inv[a as usize]
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a as usize] as u64 * (k % order)) % order;
        self.exp[l as usize]
    }

    /// Every field element in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|x| x as Elem)
    }

    /// `dst[i] += c * src[i]`.
    pub fn axpy(&self, dst: &mut [Elem], c: Elem, src: &[Elem]) {
        debug_assert_eq!(dst.len(), src.len());
        if c == 0 {
            return;
        }
        if self.e == 1 {
            let p = self.p;
            let mut mul = [0u32; 256];
            for x in 0..p {
                mul[x as usize] = (x * c as u32) % p;
            }
            for (d, &s) in dst.iter_mut().zip(src) {
                let v = *d as u32 + mul[s as usize];
                *d = if v >= p { (v - p) as Elem } else { v as Elem };
            }
        } else if let (Some(mt), Some(at)) = (&self.mul_table, &self.add_table) {
            let q = self.q as usize;
            let row = &mt[c as usize * q..(c as usize + 1) * q];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = at[*d as usize * q + row[s as usize] as usize];
            }
        } else {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = self.add(*d, self.mul(c, s));
            }
        }
    }

    /// `v[i] *= c`.
    pub fn scale(&self, v: &mut [Elem], c: Elem) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `a` modulo monic `m` over `GF(p)`; coefficient vectors constant term first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (k, &mk) in m.iter().enumerate() {
                r[shift + k] = (r[shift + k] + (p - c) * mk) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub(crate) fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for v in 0..count {
            let mut div: Vec<u32> = (0..d)
                .scan(v, |s, _| {
                    let c = (*s % p as u64) as u32;
                    *s /= p as u64;
                    Some(c)
                })
                .collect();
            div.push(1);
            if poly_rem(m, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `e` over `GF(p)`.
pub(crate) fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    (0..count)
        .map(|v| {
            let mut m: Vec<u32> = (0..e)
                .scan(v, |s, _| {
                    let c = (*s % p as u64) as u32;
                    *s /= p as u64;
                    Some(c)
                })
                .collect();
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .expect("an irreducible polynomial exists in every degree")
}

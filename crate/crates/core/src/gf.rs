//! Finite fields F_q for small q, multiplicative subgroups and their cosets.
//!
//! Elements are encoded as integers in `[0, q)`: the base-p digits of the
//! integer are the polynomial coefficients, constant term first. For prime
//! fields this is just the residue mod p.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical integer encoding of a field element.
pub type Elem = u32;

const MAX_Q: u32 = 4096;

/// `p`, `e` and the monic modulus (little-endian coefficients, length e+1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
}

/// A finite field with full addition and multiplication tables.
#[derive(Clone)]
pub struct Field {
    desc: FieldDescriptor,
    q: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    generator: Elem,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{} (p={}, e={}, modulus={:?})", self.q, self.desc.p, self.desc.e, self.desc.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
    }
}

impl Eq for Field {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Remainder of `num` modulo the monic `den` over Z/p. Coefficients little-endian.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = num.to_vec();
    let dd = den.len() - 1;
    debug_assert_eq!(*den.last().unwrap(), 1);
    while r.len() > dd {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dd;
            for (k, &c) in den[..dd].iter().enumerate() {
                let sub = (lead * c) % p;
                r[shift + k] = (r[shift + k] + p - sub) % p;
            }
        }
    }
    r
}

/// Exhaustive factor check: no monic polynomial of degree 1..=deg/2 divides `f`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    if f.len() < 2 || *f.last().unwrap() != 1 || f.iter().any(|&c| c >= p) {
        return false;
    }
    let deg = (f.len() - 1) as u32;
    for d in 1..=deg / 2 {
        for low in 0..p.pow(d) {
            let mut g = digits(low, p, d as usize);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn digits(mut x: u32, p: u32, len: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push(x % p);
        x /= p;
    }
    v
}

fn undigits(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Smallest monic irreducible polynomial of degree `e` over Z/p, ordered by
/// the base-p integer value of its lower coefficients.
pub fn default_modulus(p: u32, e: u32) -> Result<Vec<u32>> {
    if e == 1 {
        return Ok(vec![0, 1]);
    }
    let count = p.checked_pow(e).ok_or(Error::FieldTooLarge { p, e })?;
    for low in 0..count {
        let mut f = digits(low, p, e as usize);
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    Err(Error::NoDefaultModulus(e))
}

impl Field {
    /// Builds F_{p^e}. With `modulus = None` the default irreducible
    /// polynomial for `(p, e)` is used.
    pub fn new(p: u32, e: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::Invalid("field degree must be at least 1".into()));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= MAX_Q)
            .ok_or(Error::FieldTooLarge { p, e })?;
        let modulus = match modulus {
            Some(m) => m,
            None => default_modulus(p, e)?,
        };
        if modulus.len() != e as usize + 1 || !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus(modulus));
        }
        let qs = q as usize;
        let el: Vec<Vec<u32>> = (0..q).map(|x| digits(x, p, e as usize)).collect();
        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        for a in 0..qs {
            for b in a..qs {
                let s: Vec<u32> = el[a].iter().zip(&el[b]).map(|(x, y)| (x + y) % p).collect();
                let s = undigits(&s, p) as u16;
                let mut prod = vec![0u32; 2 * e as usize - 1];
                for (i, &x) in el[a].iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in el[b].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let r = poly_rem(&prod, &modulus, p);
                let m = undigits(&r, p) as u16;
                add[a * qs + b] = s;
                add[b * qs + a] = s;
                mul[a * qs + b] = m;
                mul[b * qs + a] = m;
            }
        }
        let mut neg = vec![0u16; qs];
        let mut inv = vec![0u16; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u16;
                }
                if a != 0 && mul[a * qs + b] == 1 {
                    inv[a] = b as u16;
                }
            }
        }
        let mut field = Field {
            desc: FieldDescriptor { p, e, modulus },
            q,
            add,
            mul,
            neg,
            inv,
            generator: 0,
        };
        field.generator = (1..q)
            .find(|&x| field.order(x) == q - 1)
            .expect("multiplicative group of a finite field is cyclic");
        Ok(field)
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Self> {
        Field::new(d.p, d.e, Some(d.modulus.clone()))
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.desc.p
    }

    pub fn degree(&self) -> u32 {
        self.desc.e
    }

    /// Smallest element of multiplicative order q-1.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[(a * self.q + b) as usize] as Elem
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg[b as usize] as Elem)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize] as Elem
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[(a * self.q + b) as usize] as Elem
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.inv[a as usize] as Elem)
    }

    pub fn pow(&self, a: Elem, mut k: u32) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Elem) -> u32 {
        assert!(a != 0 && a < self.q);
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q
    }

    /// Human-readable polynomial form, e.g. `1+2a` for F_9.
    pub fn format_elem(&self, a: Elem) -> String {
        if self.desc.e == 1 {
            return a.to_string();
        }
        let d = digits(a, self.desc.p, self.desc.e as usize);
        let terms: Vec<String> = d
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "a".to_string(),
                (1, c) => format!("{c}a"),
                (i, 1) => format!("a^{i}"),
                (i, c) => format!("{c}a^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// The unique multiplicative subgroup of a given order, with its coset table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    order: u32,
    elements: Vec<Elem>,
    // coset_of[x] for x != 0; entry 0 unused
    coset_of: Vec<u32>,
    cosets: u32,
}

impl Subgroup {
    /// The unique subgroup of F^x of order `m`, generated by g^((q-1)/m).
    pub fn of_order(field: &Field, m: u32) -> Result<Self> {
        let q1 = field.q() - 1;
        if m == 0 || q1 % m != 0 {
            return Err(Error::SubgroupOrder { m, q_minus_1: q1 });
        }
        let h = field.pow(field.generator(), q1 / m);
        let mut elements = Vec::with_capacity(m as usize);
        let mut x = 1;
        for _ in 0..m {
            elements.push(x);
            x = field.mul(x, h);
        }
        elements.sort_unstable();
        let mut coset_of = vec![u32::MAX; field.q() as usize];
        let mut cosets = 0;
        for x in 1..field.q() {
            if coset_of[x as usize] != u32::MAX {
                continue;
            }
            for &y in &elements {
                coset_of[field.mul(x, y) as usize] = cosets;
            }
            cosets += 1;
        }
        Ok(Subgroup {
            order: m,
            elements,
            coset_of,
            cosets,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Elements in ascending encoding order; this is the enumeration
    /// mu_0 < mu_1 < ... used for column indexing.
    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Position of `x` in [`Self::elements`].
    pub fn index_of(&self, x: Elem) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    /// Number of cosets, (q-1)/m.
    pub fn coset_count(&self) -> u32 {
        self.cosets
    }

    /// Coset index of a nonzero element; the subgroup itself has id 0.
    pub fn coset_id(&self, x: Elem) -> Result<u32> {
        if x == 0 {
            return Err(Error::ZeroCoset);
        }
        self.coset_of
            .get(x as usize)
            .copied()
            .ok_or(Error::NotInField(x))
    }

    /// Elements of the coset xM, ascending.
    pub fn coset(&self, field: &Field, x: Elem) -> Vec<Elem> {
        let mut v: Vec<Elem> = self.elements.iter().map(|&h| field.mul(x, h)).collect();
        v.sort_unstable();
        v
    }
}

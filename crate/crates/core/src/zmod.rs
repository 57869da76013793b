//! Linear congruences over Z/P for arbitrary (composite) P.
//!
//! The solution set of the constraints added so far is kept as an affine
//! image `{ s + G t : t in (Z/P)^k }`. A new constraint `l(x) = u (mod m)`
//! with `m | P` is absorbed by unimodular column operations on `G` (extended
//! Euclid on the induced coefficients `l G`), which concentrate the
//! coefficient content in one generator; that generator is then restricted to
//! the residues that solve the resulting one-variable congruence. The image
//! is exact at every step, so no solution is lost or added.

/// Sparse integer linear form: `(variable, coefficient)` pairs.
pub type Terms = [(usize, u32)];

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// (g, x, y) with a x + b y = g = gcd(a, b)
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (g, x, _) = ext_gcd(a as i64, m as i64);
    debug_assert_eq!(g, 1);
    x.rem_euclid(m as i64) as u64
}

/// Evaluates a form at `x` modulo `m`.
pub fn eval(terms: &Terms, x: &[u32], m: u32) -> u32 {
    let m = m as u64;
    (terms.iter().map(|&(v, c)| c as u64 * x[v] as u64 % m).sum::<u64>() % m) as u32
}

#[derive(Clone, Debug)]
pub struct AffineSolutions {
    p: u64,
    point: Vec<u32>,
    gens: Vec<Vec<u32>>,
}

impl AffineSolutions {
    /// The whole space `(Z/P)^n`.
    pub fn full(n: usize, p: u32) -> Self {
        let gens = (0..n)
            .map(|i| {
                let mut g = vec![0; n];
                g[i] = 1 % p;
                g
            })
            .collect();
        AffineSolutions {
            p: p as u64,
            point: vec![0; n],
            gens,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.p as u32
    }

    /// A member of the solution set.
    pub fn point(&self) -> &[u32] {
        &self.point
    }

    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    fn coeffs(&self, terms: &Terms, m: u64) -> Vec<u64> {
        self.gens
            .iter()
            .map(|g| terms.iter().map(|&(v, c)| c as u64 * g[v] as u64 % m).sum::<u64>() % m)
            .collect()
    }

    /// Value of the form at the current point, and the step `g` such that
    /// the form takes exactly the values `value + g Z (mod m)` over the set.
    pub fn range(&self, terms: &Terms, m: u32) -> (u32, u32) {
        let m64 = m as u64;
        let value = eval(terms, &self.point, m);
        let g = self.coeffs(terms, m64).into_iter().fold(m64, gcd);
        (value, g as u32)
    }

    /// True iff the form is constant on the set.
    pub fn is_constant(&self, terms: &Terms, m: u32) -> bool {
        self.range(terms, m).1 == m
    }

    /// Intersects with `{x : l(x) = target (mod m)}`; returns false (and
    /// leaves the set unchanged) if the intersection is empty.
    pub fn constrain(&mut self, terms: &Terms, m: u32, target: u32) -> bool {
        assert!(m >= 1 && self.p % m as u64 == 0, "modulus must divide P");
        let m = m as u64;
        let p = self.p;
        let mut c = self.coeffs(terms, m);
        let delta = (target as u64 % m + m - eval(terms, &self.point, m as u32) as u64) % m;
        let nz: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0).collect();
        let Some(&i0) = nz.first() else {
            return delta == 0;
        };
        let g_all = nz.iter().fold(m, |g, &i| gcd(g, c[i]));
        if delta % g_all != 0 {
            return false;
        }
        for &i in &nz[1..] {
            let (a, b) = (c[i0] as i64, c[i] as i64);
            let (g, x, y) = ext_gcd(a, b);
            let (x, y) = (x.rem_euclid(p as i64) as u64, y.rem_euclid(p as i64) as u64);
            let u = ((-(b / g)).rem_euclid(p as i64)) as u64;
            let w = ((a / g).rem_euclid(p as i64)) as u64;
            // [col_i0, col_i] <- [x col_i0 + y col_i, u col_i0 + w col_i], det = 1
            let (lo, hi) = self.gens.split_at_mut(i);
            let (gi0, gi) = (&mut lo[i0], &mut hi[0]);
            for (e0, e1) in gi0.iter_mut().zip(gi.iter_mut()) {
                let (v0, v1) = (*e0 as u64, *e1 as u64);
                *e0 = ((x * v0 + y * v1) % p) as u32;
                *e1 = ((u * v0 + w * v1) % p) as u32;
            }
            c[i0] = g as u64 % m;
            c[i] = 0;
        }
        let a = c[i0];
        let gg = gcd(a, m);
        let mq = m / gg;
        let t0 = if mq == 1 {
            0
        } else {
            (delta / gg) % mq * inv_mod((a / gg) % mq, mq) % mq
        };
        let col = &mut self.gens[i0];
        for (s, &gv) in self.point.iter_mut().zip(col.iter()) {
            *s = ((*s as u64 + t0 * gv as u64) % p) as u32;
        }
        for e in col.iter_mut() {
            *e = (*e as u64 * mq % p) as u32;
        }
        if col.iter().all(|&e| e == 0) {
            self.gens.swap_remove(i0);
        }
        true
    }

    /// Moves the point to `point + G t`.
    pub fn shift(&mut self, t: &[u32]) {
        let p = self.p;
        for (g, &tv) in self.gens.iter().zip(t) {
            if tv == 0 {
                continue;
            }
            for (s, &gv) in self.point.iter_mut().zip(g) {
                *s = ((*s as u64 + tv as u64 * gv as u64) % p) as u32;
            }
        }
    }
}

/// Reduces `form` against the row space of `rows` over the prime field F_q
/// and reports whether it lies in that span.
pub fn in_span_mod_prime(rows: &[Vec<(usize, u32)>], form: &Terms, n: usize, q: u32) -> bool {
    PrimeRowSpace::new(rows, n, q).contains(form)
}

/// Row-reduced basis of integer rows reduced modulo a prime.
pub struct PrimeRowSpace {
    q: u64,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl PrimeRowSpace {
    pub fn new(rows: &[Vec<(usize, u32)>], n: usize, q: u32) -> Self {
        let q64 = q as u64;
        let mut basis = PrimeRowSpace {
            q: q64,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        };
        for r in rows {
            let mut v = vec![0u32; n];
            for &(i, c) in r {
                v[i] = ((v[i] as u64 + c as u64) % q64) as u32;
            }
            basis.reduce(&mut v);
            if let Some(p) = v.iter().position(|&e| e != 0) {
                let inv = inv_mod(v[p] as u64, q64);
                for e in v.iter_mut() {
                    *e = (*e as u64 * inv % q64) as u32;
                }
                // keep the basis fully reduced on pivot columns
                for b in basis.rows.iter_mut() {
                    let f = b[p] as u64;
                    if f != 0 {
                        for (x, &y) in b.iter_mut().zip(&v) {
                            *x = ((*x as u64 + (q64 - f) * y as u64) % q64) as u32;
                        }
                    }
                }
                basis.rows.push(v);
                basis.pivots.push(p);
            }
        }
        basis
    }

    fn reduce(&self, v: &mut [u32]) {
        let q = self.q;
        for (b, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p] as u64;
            if f != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = ((*x as u64 + (q - f) * y as u64) % q) as u32;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, form: &Terms) -> bool {
        let mut v = vec![0u32; self.n];
        for &(i, c) in form {
            v[i] = ((v[i] as u64 + c as u64) % self.q) as u32;
        }
        self.reduce(&mut v);
        v.iter().all(|&e| e == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // every x in (Z/P)^n satisfying all constraints, by enumeration
    fn brute(n: usize, p: u32, cons: &[(Vec<(usize, u32)>, u32, u32)]) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (p as usize).pow(n as u32);
        for code in 0..total {
            let mut x = vec![0u32; n];
            let mut k = code;
            for e in x.iter_mut() {
                *e = (k % p as usize) as u32;
                k /= p as usize;
            }
            if cons.iter().all(|(t, m, u)| eval(t, &x, *m) == *u % *m) {
                out.push(x);
            }
        }
        out.sort();
        out
    }

    fn members(s: &AffineSolutions) -> Vec<Vec<u32>> {
        let k = s.generator_count();
        let p = s.modulus() as usize;
        let mut out = Vec::new();
        for code in 0..p.pow(k as u32) {
            let mut t = vec![0u32; k];
            let mut c = code;
            for e in t.iter_mut() {
                *e = (c % p) as u32;
                c /= p;
            }
            let mut s2 = s.clone();
            s2.shift(&t);
            out.push(s2.point().to_vec());
        }
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn single_congruence_mod_8() {
        let mut s = AffineSolutions::full(2, 8);
        assert!(s.constrain(&[(0, 2), (1, 4)], 8, 6));
        let x = s.point();
        assert_eq!((2 * x[0] + 4 * x[1]) % 8, 6);
        assert!(!s.constrain(&[(0, 2), (1, 4)], 8, 1));
    }

    #[test]
    fn range_reports_step() {
        let mut s = AffineSolutions::full(3, 8);
        assert!(s.constrain(&[(0, 1), (1, 7)], 8, 0));
        // x0 = x1, so x0 - x1 is constant and x0 + x1 takes even values only
        assert!(s.is_constant(&[(0, 1), (1, 7)], 8));
        assert_eq!(s.range(&[(0, 1), (1, 1)], 8).1, 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn solution_set_matches_enumeration(
            p in prop::sample::select(vec![4u32, 6, 8, 9]),
            raw in prop::collection::vec((0u32..9, 0u32..9, 0u32..9, 0u32..9, 0u32..3), 1..4),
        ) {
            let n = 3;
            let mut s = AffineSolutions::full(n, p);
            let mut cons = Vec::new();
            let mut feasible = true;
            for (a, b, c, u, mi) in raw {
                let divisors: Vec<u32> = (1..=p).filter(|d| p % d == 0).collect();
                let m = divisors[(mi as usize * 7 + a as usize) % divisors.len()];
                let terms = vec![(0, a % m), (1, b % m), (2, c % m)];
                let ok = s.constrain(&terms, m, u % m);
                cons.push((terms, m, u % m));
                if !ok {
                    feasible = false;
                    break;
                }
            }
            let expect = brute(n, p, &cons);
            if feasible {
                prop_assert_eq!(members(&s), expect);
            } else {
                prop_assert!(expect.is_empty());
            }
        }
    }

    #[test]
    fn prime_span() {
        let rows = vec![vec![(0, 1), (1, 1)], vec![(1, 1), (2, 1)]];
        assert!(in_span_mod_prime(&rows, &[(0, 1), (2, 996)], 3, 997));
        assert!(!in_span_mod_prime(&rows, &[(0, 1)], 3, 997));
        assert!(in_span_mod_prime(&rows, &[(0, 1), (2, 1)], 3, 2));
    }
}

use coset_qldpc::base::{build_base, census, presets, verify_4cycles_directly};
use coset_qldpc::binmat::product_is_zero;
use coset_qldpc::gf::Field;
use coset_qldpc::lift::{assemble_system, build_lift, lift_pair, random_orthogonal_labels, verify_lift_code};
use proptest::prelude::*;

const FIELDS: [(u32, u32); 8] = [(2, 1), (3, 2), (2, 3), (5, 2), (7, 1), (2, 4), (13, 1), (3, 3)];

// schoolbook product of base-p digit polynomials, reduced by the monic modulus
fn naive_mul(f: &Field, a: u32, b: u32) -> u32 {
    let (p, e) = (f.p(), f.degree() as usize);
    let digits = |mut x: u32| {
        (0..e)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect::<Vec<_>>()
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u32; 2 * e];
    for i in 0..e {
        for j in 0..e {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    let m = &f.descriptor().modulus;
    for k in (e..2 * e).rev() {
        let c = prod[k];
        if c != 0 {
            for i in 0..=e {
                prod[k - e + i] = (prod[k - e + i] + p - c * m[i] % p) % p;
            }
        }
    }
    prod[..e].iter().rev().fold(0, |acc, &d| acc * p + d)
}

proptest! {
    #[test]
    fn field_multiplication_matches_polynomial_arithmetic(i in 0usize..FIELDS.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let (p, e) = FIELDS[i];
        let f = Field::new(p, e, None).unwrap();
        let (a, b, c) = (a % f.q(), b % f.q(), c % f.q());
        prop_assert_eq!(f.mul(a, b), naive_mul(&f, a, b));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            prop_assert_eq!(f.pow(a, f.q() - 1), 1);
        }
    }

    #[test]
    fn orthogonal_labels_give_orthogonal_lifts(preset in 0usize..4, p in prop::sample::select(vec![5u32, 8, 12, 16, 31]), seed in any::<u64>()) {
        let name = ["(3,6) F7", "(3,8) F9", "(3,10) F11", "(3,10) F16"][preset];
        let b = build_base(&presets::find(name).unwrap().coefficients()).unwrap();
        let sys = assemble_system(&b, p, None).unwrap();
        let l = random_orthogonal_labels(&sys, seed).expect("orthogonal labels always exist");
        let (hx, hz) = lift_pair(&b, &l).unwrap();
        // pairwise overlap parity inside verify_lift and the dense product agree
        prop_assert!(product_is_zero(&hx, &hz).unwrap());
        let code = build_lift(&b, &l).unwrap();
        let cert = verify_lift_code(&code, &b, &l, None).unwrap();
        prop_assert!(cert.line("orthogonality").unwrap().ok);
        prop_assert!(cert.line("zero-congruences").unwrap().ok);
    }
}

#[test]
fn every_preset_is_a_valid_base() {
    for p in presets::ALL {
        let b = build_base(&p.coefficients()).unwrap();
        assert!(product_is_zero(&b.hx, &b.hz).unwrap(), "{}", p.name);
        assert!(verify_4cycles_directly(&b), "{}", p.name);
        assert!(census(&b).overlaps_zero_or_two(), "{}", p.name);
    }
}

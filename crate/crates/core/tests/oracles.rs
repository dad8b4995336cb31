//! Cross-checks against independent, deliberately naive reimplementations.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use renorm_core::cantorspace::{odometer_act, odometer_act_power, CylFn};
use renorm_core::l1space::{apply_iso, f2_counterexample, StepFn};
use renorm_core::numerics::{cert_pow, cert_sqrt, int, pow2, rat, Precision, Rational};
use renorm_core::seqspace::{c_renorm, CSeq, RatMatrix};
use renorm_core::words::{reduced_word_count, shortlex_index, shortlex_word, FreeWord, Letter};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(7)
}

fn rand_rat(r: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    rat(r.gen_range(lo * den..=hi * den), den)
}

fn rand_step(r: &mut ChaCha8Rng) -> StepFn {
    let mut cuts: Vec<Rational> = (0..r.gen_range(0..5)).map(|_| rat(r.gen_range(1..48), 48)).collect();
    cuts.push(int(0));
    cuts.push(int(1));
    cuts.sort();
    cuts.dedup();
    let pieces = cuts.windows(2).map(|w| (w[0].clone(), w[1].clone(), rand_rat(r, -4, 4, 6))).collect();
    StepFn::from_pieces(pieces)
}

fn pow_int(q: &Rational, n: u32) -> Rational {
    (0..n).fold(int(1), |acc, _| acc * q)
}

#[test]
fn sqrt_enclosures_bracket_exactly() {
    let mut r = rng();
    for _ in 0..200 {
        let x = rand_rat(&mut r, 0, 50, 17);
        let eps = pow2(-r.gen_range(4..80));
        let v = cert_sqrt(&x, &eps).unwrap();
        let lo = v.lo().max(int(0));
        assert!(&lo * &lo <= x && x <= v.hi() * v.hi(), "√{x} ∉ {v:?}");
        assert!(v.radius() <= &eps);
    }
}

#[test]
fn rational_powers_bracket_exactly() {
    let mut r = rng();
    for _ in 0..100 {
        let x = rand_rat(&mut r, 0, 8, 5);
        let (p, q) = (r.gen_range(1..6u32), r.gen_range(1..5u32));
        let e = rat(p as i64, q as i64);
        let v = cert_pow(&x, &e, &pow2(-40)).unwrap();
        let lo = v.lo().max(int(0));
        let xp = pow_int(&x, p);
        assert!(pow_int(&lo, q) <= xp && xp <= pow_int(&v.hi(), q), "{x}^{e} ∉ {v:?}");
    }
}

// Naive pointwise formulas for the two generators, read off their definitions.
fn t1_naive(f: &StepFn, x: &Rational) -> Rational {
    if *x < rat(2, 3) {
        f.eval(&(x / int(2))) / int(2)
    } else {
        f.eval(&(rat(1, 3) + (x - rat(2, 3)) * int(2))) * int(2)
    }
}

fn t2_naive(f: &StepFn, x: &Rational) -> Rational {
    let y = x - rat(1, 3);
    f.eval(&if y.is_negative() { y + int(1) } else { y })
}

#[test]
fn f2_generators_match_pointwise_formulas() {
    let mut r = rng();
    let (t1, t2) = f2_counterexample();
    for _ in 0..100 {
        let f = rand_step(&mut r);
        let (g1, g2) = (apply_iso(&t1, &f), apply_iso(&t2, &f));
        for k in 0..96 {
            let x = rat(k, 96);
            assert_eq!(g1.eval(&x), t1_naive(&f, &x), "T₁ at {x}");
            assert_eq!(g2.eval(&x), t2_naive(&f, &x), "T₂ at {x}");
        }
    }
}

// The odometer on bit strings, x₁ least significant.
fn minus_one(bits: &mut [bool]) {
    for b in bits.iter_mut() {
        *b = !*b;
        if !*b {
            return;
        }
    }
}

fn index(bits: &[bool]) -> usize {
    bits.iter().enumerate().map(|(j, &b)| (b as usize) << j).sum()
}

#[test]
fn odometer_matches_bitwise_carry() {
    let mut r = rng();
    for _ in 0..50 {
        let m = r.gen_range(0..8u32);
        let table: Vec<Rational> = (0..1usize << m).map(|_| rand_rat(&mut r, -3, 3, 4)).collect();
        let f = CylFn::new(m, table.clone()).unwrap();
        let g = odometer_act(&f);
        // (αF)(x) = F(φ⁻¹x), compared at full depth m
        for i in 0..1usize << m {
            let mut bits: Vec<bool> = (0..m).map(|j| i >> j & 1 == 1).collect();
            minus_one(&mut bits);
            let want = &table[index(&bits)];
            let got = &g.table()[i % g.table().len()];
            assert_eq!(got, want);
        }
        assert_eq!(odometer_act_power(&f, 1i64 << m), f, "φ^(2^m) fixes depth-m functions");
    }
}

#[test]
fn shortlex_matches_brute_enumeration() {
    for k in 1..=2u8 {
        let letters: Vec<Letter> = (0..2 * k as u32).map(Letter::from_ordinal).collect();
        let mut all = vec![FreeWord::identity()];
        let mut layer = vec![vec![]];
        for len in 1..=5u32 {
            let mut next = Vec::new();
            for w in &layer {
                for l in &letters {
                    let mut v: Vec<Letter> = w.clone();
                    v.push(*l);
                    next.push(v);
                }
            }
            next.sort_by_key(|v| v.iter().map(|l| l.ordinal()).collect::<Vec<_>>());
            let reduced: Vec<Vec<Letter>> = next.iter().filter(|v| v.windows(2).all(|p| p[0] != p[1].inv())).cloned().collect();
            assert_eq!(reduced.len() as u128, reduced_word_count(k, len));
            all.extend(reduced.iter().map(|v| FreeWord::from_letters(v.iter().copied())));
            layer = reduced;
        }
        for (i, w) in all.iter().enumerate() {
            assert_eq!(shortlex_word(i as u128, k), *w, "rank {i}, k = {k}");
            assert_eq!(shortlex_index(w, k), i as u128);
        }
    }
}

#[test]
fn cayley_transforms_are_orthogonal() {
    let mut r = rng();
    for _ in 0..30 {
        let n = r.gen_range(1..5usize);
        let mut e = vec![Rational::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rand_rat(&mut r, -3, 3, 4);
                e[i * n + j] = v.clone();
                e[j * n + i] = -v;
            }
        }
        let q = RatMatrix::cayley(&RatMatrix::new(n, e).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let dot: Rational = (0..n).map(|k| q.at(i, k) * q.at(j, k)).sum();
                assert_eq!(dot, int((i == j) as i64));
            }
        }
    }
}

#[test]
fn c_renorm_closed_form() {
    // x = (a, t, t, …) splits as (a − t, 0, …) ⊕ t, so N(x) = ‖x‖_∞ + ((3|a − t|/2)² + t²)^{1/2}
    let mut r = rng();
    for _ in 0..50 {
        let (a, t) = (rand_rat(&mut r, -5, 5, 3), rand_rat(&mut r, -5, 5, 3));
        let d = (&a - &t).abs();
        let inner = &d * rat(3, 2);
        let sup = a.abs().max(t.abs());
        let radicand = &inner * &inner + &t * &t;
        let v = c_renorm(&CSeq::new(vec![a.clone()], t.clone()), Precision::bits(80)).unwrap();
        let lo = v.lo() - &sup;
        let hi = v.hi() - &sup;
        assert!(lo.max(int(0)).pow(2) <= radicand && radicand <= hi.pow(2), "a = {a}, t = {t}");
    }
}

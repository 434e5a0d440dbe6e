use horolab_core::exactnum::{
    embed_ratfunc, lau_arith, sample_haar, sample_haar_with, LauOp, Laurent, Poly, QMag, RatFunc,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_series(rng: &mut ChaCha8Rng, q: u32, prec: usize) -> Laurent {
    let v = rng.gen_range(-4..5);
    let mut c: Vec<u32> = (0..prec).map(|_| rng.gen_range(0..q)).collect();
    c[0] = rng.gen_range(1..q);
    Laurent::from_coeffs(q, v, c)
}

fn rand_poly(rng: &mut ChaCha8Rng, q: u32, deg: usize) -> Poly {
    let c: Vec<u32> = (0..=deg).map(|_| rng.gen_range(0..q)).collect();
    Poly::from_residues(q, c)
}

/// Agreement of two series below the smaller of their absolute precisions.
fn agree(f: &Laurent, g: &Laurent) -> bool {
    let lim = f.abs_precision().unwrap_or(i64::MAX).min(g.abs_precision().unwrap_or(i64::MAX));
    let lo = f.valuation().unwrap_or(lim).min(g.valuation().unwrap_or(lim));
    (lo..lim).all(|i| f.coeff(i) == g.coeff(i))
}

#[test]
fn spec_examples_arith() {
    let q = 3;
    let one_minus = Laurent::from_coeffs(q, 0, vec![1, 2, 0, 0, 0, 0, 0, 0, 0, 0]);
    let g = lau_arith(LauOp::Inv, &one_minus, None, 10).unwrap();
    assert_eq!(g.coeffs(), &[1; 10]);
    assert_eq!(g.valuation(), Some(0));

    let x2 = Laurent::monomial(q, 1, -2, 10);
    let xm2 = Laurent::monomial(q, 1, 2, 10);
    let p = lau_arith(LauOp::Mul, &x2, Some(&xm2), 10).unwrap();
    assert_eq!(p.valuation(), Some(0));
    assert_eq!(p.coeffs()[0], 1);
    assert!(p.coeffs()[1..].iter().all(|&c| c == 0));

    let a = Poly::new(q, &[1, 1]);
    let b = Poly::new(q, &[-1, 1]);
    assert_eq!(&a * &b, Poly::new(q, &[2, 0, 1]));
    assert!(lau_arith(LauOp::Inv, &Laurent::zero(q), None, 5).is_err());
    assert!(lau_arith(LauOp::Mul, &x2, None, 5).is_err());
}

#[test]
fn valuations() {
    let f = Laurent::from_poly(&Poly::new(3, &[1, 0, 1]), 6);
    assert_eq!(f.valuation_abs(), (Some(-2), QMag::q_pow(2)));
    let g = Laurent::monomial(3, 1, 3, 4);
    assert_eq!(g.valuation_abs(), (Some(3), QMag::q_pow(-3)));
    assert_eq!(Laurent::zero(3).valuation_abs(), (None, QMag::Zero));
}

#[test]
fn embed_examples() {
    let q = 5;
    let one = Poly::one(q);
    let x = Poly::x(q);
    let e = embed_ratfunc(&RatFunc::new(one.clone(), x.clone()).unwrap(), 6);
    assert_eq!(e.valuation(), Some(1));
    assert_eq!(e.coeffs(), &[1, 0, 0, 0, 0, 0]);
    // 1/(X-1), checked by multiplying back.
    let xm1 = Poly::new(q, &[-1, 1]);
    let e = embed_ratfunc(&RatFunc::new(one.clone(), xm1.clone()).unwrap(), 12);
    assert_eq!(e.valuation(), Some(1));
    assert!(e.coeffs().iter().all(|&c| c == 1));
    let back = e.mul(&Laurent::from_poly(&xm1, 20), 12);
    assert!(agree(&back, &Laurent::one(q, 12)));
    let e = embed_ratfunc(&RatFunc::new(x.clone(), x).unwrap(), 4);
    assert!(agree(&e, &Laurent::one(q, 4)));
}

#[test]
fn sqrt_examples() {
    let q = 3;
    assert_eq!(Laurent::one(q, 5).sqrt(5).unwrap().coeffs()[0], 1);
    let x2 = Laurent::monomial(q, 1, -2, 5).sqrt(5).unwrap();
    assert_eq!((x2.valuation(), x2.leading()), (Some(-1), 1));
    let f = Laurent::from_poly(&Poly::new(q, &[1, 0, 1]), 20);
    let r = f.sqrt(12).unwrap();
    assert_eq!(r.valuation(), Some(-1));
    assert_eq!(&r.coeffs()[..3], &[1, 0, 2]);
    assert!(agree(&r.mul(&r, 12), &f));
    assert!(Laurent::monomial(q, 1, -1, 4).sqrt(4).is_err());
    assert!(Laurent::monomial(q, 2, -2, 4).sqrt(4).is_err());
}

#[test]
fn ultrametric_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..10_000 {
        let q = [3, 5, 7][k % 3];
        let f = rand_series(&mut rng, q, 8);
        let g = if k % 4 == 0 {
            // same valuation and leading term so cancellation happens
            let mut c = g_like(&f, &mut rng);
            c[0] = f.leading();
            Laurent::from_coeffs(q, f.valuation().unwrap(), c)
        } else {
            rand_series(&mut rng, q, 8)
        };
        let s = f.add(&g, 8);
        let (vf, vg) = (f.valuation().unwrap(), g.valuation().unwrap());
        let m = QMag::q_pow(-vf).max(QMag::q_pow(-vg));
        let (_, ms) = s.valuation_abs();
        assert!(ms <= m);
        if vf != vg {
            assert_eq!(ms, m);
        }
    }
}

fn g_like(f: &Laurent, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let q = f.modulus();
    (0..f.precision()).map(|_| rng.gen_range(0..q)).collect()
}

#[test]
fn field_axioms_to_precision() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..500 {
        let q = [3, 5, 7][k % 3];
        let f = rand_series(&mut rng, q, 16);
        let g = rand_series(&mut rng, q, 16);
        let h = f.mul(&g, 16).mul(&g.inv(16).unwrap(), 16);
        assert_eq!(h.precision(), 16);
        assert!(agree(&h, &f));
        // distributivity and commutativity
        let e = rand_series(&mut rng, q, 16);
        let l = f.mul(&g.add(&e, 16), 16);
        let r = f.mul(&g, 16).add(&f.mul(&e, 16), 16);
        assert!(agree(&l, &r));
        assert_eq!(f.mul(&g, 16), g.mul(&f, 16));
        assert!(agree(&f.sub(&f, 16), &Laurent::zero(q)));
    }
}

#[test]
fn sqrt_squares_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut done = 0;
    while done < 300 {
        let q = [3, 5, 7][done % 3];
        let mut f = rand_series(&mut rng, q, 14);
        if f.valuation().unwrap() % 2 != 0 {
            f = f.shift(1);
        }
        match f.sqrt(14) {
            Ok(r) => {
                assert!(agree(&r.mul(&r, 14), &f));
                let lc = r.leading();
                assert!(lc <= q - lc);
                done += 1;
            }
            Err(_) => assert!(!horolab_core::exactnum::is_square(f.leading(), q)),
        }
    }
}

#[test]
fn embedding_is_ring_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let prec = 15;
    for k in 0..200 {
        let q = [3, 5, 7][k % 3];
        let mk = |rng: &mut ChaCha8Rng| loop {
            let (dn, dd) = (rng.gen_range(0..4), rng.gen_range(0..4));
            let n = rand_poly(rng, q, dn);
            let d = rand_poly(rng, q, dd);
            if !n.is_zero() && !d.is_zero() {
                return RatFunc::new(n, d).unwrap();
            }
        };
        let (r, s) = (mk(&mut rng), mk(&mut rng));
        let (er, es) = (embed_ratfunc(&r, prec), embed_ratfunc(&s, prec));
        let sum = r.add(&s);
        if !sum.is_zero() {
            assert!(agree(&embed_ratfunc(&sum, prec), &er.add(&es, prec)));
        }
        assert!(agree(&embed_ratfunc(&r.mul(&s), prec), &er.mul(&es, prec)));
        assert!(agree(&embed_ratfunc(&r.inv().unwrap(), prec), &er.inv(prec).unwrap()));
    }
}

#[test]
fn haar_cylinders_within_three_sigma() {
    let q = 3u32;
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut first = vec![0u64; q as usize];
    let mut cyl3 = vec![0u64; 27];
    for _ in 0..n {
        let x = sample_haar_with(q, 1, 3, &mut rng);
        let d: Vec<u32> = (1..=3).map(|i| x.coeff(i).unwrap()).collect();
        first[d[0] as usize] += 1;
        cyl3[(d[0] * 9 + d[1] * 3 + d[2]) as usize] += 1;
    }
    let check = |count: u64, p: f64| {
        let mean = n as f64 * p;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((count as f64 - mean).abs() <= 3.0 * sd, "{count} vs {mean}");
    };
    for &c in &first {
        check(c, 1.0 / 3.0);
    }
    // 27 cells at 3 sigma: a rare miss is possible for some seed, not this one.
    for &c in &cyl3 {
        check(c, 1.0 / 27.0);
    }
    assert_eq!(sample_haar(q, 1, 10, 5), sample_haar(q, 1, 10, 5));
    assert_ne!(sample_haar(q, 1, 10, 5), sample_haar(q, 1, 10, 6));
}

#[test]
fn text_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for k in 0..200 {
        let q = [3, 5, 7][k % 3];
        let f = rand_series(&mut rng, q, 1 + k % 9);
        let s = f.to_text();
        assert_eq!(s.parse::<Laurent>().unwrap(), f);
    }
    for s in ["3:zero", "5:zero@4", "7:-2:1,0,6"] {
        assert_eq!(s.parse::<Laurent>().unwrap().to_text(), s);
    }
    for bad in ["4:0:1", "3:0:0,1", "3:0:", "3:x:1", "3:0:3"] {
        assert!(bad.parse::<Laurent>().is_err(), "{bad}");
    }
}

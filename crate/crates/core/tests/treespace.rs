use horolab_core::exactnum::{Poly, RatFunc};
use horolab_core::quadratic::{act, Mobius, QuadIrr};
use horolab_core::treespace::bt::{self, Ball, BallConvex, BtEnd};
use horolab_core::treespace::cayley::{self, CayleyEnd, WordConvex};
use horolab_core::treespace::sample::{
    random_bt_end, random_bt_instance, random_cayley_end, random_cayley_instance, random_subtree, random_vertex,
};
use horolab_core::treespace::{
    busemann, closest_point, d_c, line_distance, line_gap, ray_point, shadow, thicken, ConvexSub, CylSpace, CylinderUnion, DcVal,
    Ray, TreeError, Vertex, DEFAULT_DEPTH,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: usize = DEFAULT_DEPTH;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat(q: u32, num: &[i64], den: &[i64]) -> BtEnd {
    BtEnd::rational(RatFunc::new(Poly::new(q, num), Poly::new(q, den)).unwrap())
}

/// Limit value if it is the same for five consecutive `t`.
fn stable(f: impl Fn(u64) -> Option<i64>, t0: u64) -> Option<i64> {
    let v = f(t0)?;
    (t0 + 1..t0 + 5).all(|t| f(t) == Some(v)).then_some(v)
}

#[test]
fn ball_codes_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..2000 {
        let q = [3, 5][k % 2];
        let v = random_vertex(q, 9, &mut rng);
        let w = random_vertex(q, 9, &mut rng);
        let (bv, bw) = (Ball::from_code(q, &v), Ball::from_code(q, &w));
        assert_eq!(bv.to_code(), v);
        assert_eq!(bv.dist(&bw) as usize, v.dist(&w));
    }
    let q = 3;
    assert_eq!(Ball::base(q).to_code(), Vertex::base());
    // Up once, then the digit 2 at X^1: the ball of 2X of level 0.
    assert_eq!(Ball::from_code(q, &Vertex(vec![0, 2])), Ball::new(q, 0, -1, vec![2]));
}

#[test]
fn end_codes_follow_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for k in 0..500 {
        let q = [3, 5][k % 2];
        let xi = random_bt_end(q, &mut rng);
        let base = Ball::base(q);
        for n in [0usize, 1, 3, 7, 20] {
            let by_code = Ball::from_code(q, &Vertex::on_ray(&xi, n));
            assert_eq!(by_code, bt::native_ray_point(&base, &xi, n as u64));
        }
        if !xi.is_infinity() {
            assert!(Ball::around(&xi, 5).contains(&xi));
        }
    }
}

#[test]
fn word_codes_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in [2u32, 3] {
        let q = cayley::branching(k);
        for _ in 0..1000 {
            let v = random_vertex(q, 9, &mut rng);
            let w = random_vertex(q, 9, &mut rng);
            let (a, b) = (cayley::code_to_word(&v), cayley::code_to_word(&w));
            assert_eq!(cayley::reduce(&a), a);
            assert_eq!(cayley::word_to_code(&a), v);
            assert_eq!(cayley::word_dist(&a, &b), v.dist(&w));
            let e = random_cayley_end(k, &mut rng);
            assert_eq!(cayley::code_to_word(&Vertex::on_ray(&e, 12)), e.word(12));
        }
    }
}

#[test]
fn dc_formula_matches_limit_on_bruhat_tits() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for k in 0..1500 {
        let q = [3, 5][k % 2];
        let inst = random_bt_instance(q, &mut rng);
        let formula = d_c(&inst.coded, &inst.xi, &inst.eta, CAP).unwrap();
        let p = closest_point(&inst.coded, &inst.xi, CAP).unwrap();
        assert_eq!(Some(Ball::from_code(q, &p)), bt::native_projection(&inst.native, &inst.xi, q, 40));
        let lim = stable(|t| bt::native_dc_limit(&inst.native, &inst.xi, &inst.eta, q, t, 40), 80);
        assert_eq!(formula.exp2(), lim, "instance {k}");
    }
}

#[test]
fn dc_formula_matches_limit_on_cayley() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for n in 0..1500 {
        let k = [2, 3][n % 2];
        let inst = random_cayley_instance(k, &mut rng);
        let formula = d_c(&inst.coded, &inst.xi, &inst.eta, CAP).unwrap();
        let p = closest_point(&inst.coded, &inst.xi, CAP).unwrap();
        assert_eq!(Some(cayley::code_to_word(&p)), cayley::native_projection(&inst.native, &inst.xi, 30));
        let lim = stable(|t| cayley::native_dc_limit(&inst.native, &inst.xi, &inst.eta, t as usize, 30), 60);
        assert_eq!(formula.exp2(), lim, "instance {n}");
    }
}

#[test]
fn dc_case_examples() {
    let q = 3;
    let base = ConvexSub::<BtEnd>::Vertex(Vertex::base());
    // Rays from the base sharing three steps.
    let xi = BtEnd::from_code_prefix(q, &[1, 2, 0, 1]);
    let eta = BtEnd::from_code_prefix(q, &[1, 2, 0, 2]);
    assert_eq!(d_c(&base, &xi, &eta, CAP).unwrap(), DcVal::Exp2(-6));
    // Projections four apart.
    let c = ConvexSub::<BtEnd>::subtree(vec![Vertex(vec![1, 1]), Vertex(vec![1]), Vertex::base(), Vertex(vec![2]), Vertex(vec![2, 0])]).unwrap();
    let a = BtEnd::from_code_prefix(q, &[1, 1]);
    let b = BtEnd::from_code_prefix(q, &[2, 0, 2]);
    assert_eq!(d_c(&c, &a, &b, CAP).unwrap(), DcVal::Exp2(4));
    assert_eq!(d_c(&c, &a, &b, CAP).unwrap().to_string(), "e^2");
    assert_eq!(d_c(&c, &a, &a, CAP).unwrap(), DcVal::Zero);
    // The line (0, ∞) and ξ = 1 + X⁻¹ project to the ball of 1 at level 0.
    let zero = BtEnd::rational(RatFunc::from_poly(Poly::zero(q)));
    let line = ConvexSub::Line(zero.clone(), BtEnd::Infinity);
    let xi = rat(q, &[1, 1], &[0, 1]);
    let p = closest_point(&line, &xi, CAP).unwrap();
    assert_eq!(Ball::from_code(q, &p), Ball::new(q, 0, 0, vec![1]));
    assert_eq!(p, Vertex::base());
    assert_eq!(closest_point(&line, &zero, CAP), Err(TreeError::ProjectionAtInfinity));
    let sym = d_c(&line, &xi, &rat(q, &[1], &[1, 0, 1]), CAP).unwrap();
    assert_eq!(sym, d_c(&line, &rat(q, &[1], &[1, 0, 1]), &xi, CAP).unwrap());
}

#[test]
fn busemann_cocycle() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for k in 0..300 {
        let q = [3, 5][k % 2];
        let xi = random_bt_end(q, &mut rng);
        let [x, y, z] = [0; 3].map(|_| random_vertex(q, 8, &mut rng));
        let deep = Vertex::on_ray(&xi, 64);
        let brute = |a: &Vertex, b: &Vertex| a.dist(&deep) as i64 - b.dist(&deep) as i64;
        assert_eq!(busemann(&xi, &x, &y), brute(&x, &y));
        assert_eq!(busemann(&xi, &x, &y), -busemann(&xi, &y, &x));
        assert_eq!(busemann(&xi, &x, &y) + busemann(&xi, &y, &z), busemann(&xi, &x, &z));
        // In ball coordinates.
        let deep_ball = bt::deep_point(&xi, q, 64);
        let (bx, by) = (Ball::from_code(q, &x), Ball::from_code(q, &y));
        assert_eq!(busemann(&xi, &x, &y), bx.dist(&deep_ball) as i64 - by.dist(&deep_ball) as i64);
        let kk = rng.gen_range(0..10);
        assert_eq!(busemann(&xi, &x, &ray_point(&x, &xi, kk)), kk as i64);
    }
}

#[test]
fn hamenstadt_examples_and_limit() {
    let q = 3;
    let xi = rat(q, &[1, 0, 1], &[0, 0, 1]);
    let eta = rat(q, &[1], &[1]);
    assert_eq!(bt::hamenstadt(&xi, &eta, 64), Some(-2));
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let mut checked = 0;
    while checked < 300 {
        let (a, b) = (random_bt_end(q, &mut rng), random_bt_end(q, &mut rng));
        if a.is_infinity() || b.is_infinity() {
            continue;
        }
        let Some(h) = bt::hamenstadt(&a, &b, 200) else { continue };
        let lim = stable(|t| Some(bt::hamenstadt_limit(&a, &b, t as i64)), 60).unwrap();
        assert_eq!(lim, 2 * h);
        // Translation by a rational c.
        let c = RatFunc::new(Poly::new(q, &[1, 2]), Poly::new(q, &[1, 0, 1])).unwrap();
        let tr = Mobius::translation(Poly::new(q, &[2, 1]));
        assert_eq!(bt::hamenstadt(&a.act(&tr), &b.act(&tr), 200), Some(h));
        let shift = |e: &BtEnd| match e {
            BtEnd::Rat { r, .. } => BtEnd::rational(r.add(&c)),
            other => other.clone(),
        };
        if matches!((&a, &b), (BtEnd::Rat { .. }, BtEnd::Rat { .. })) {
            assert_eq!(bt::hamenstadt(&shift(&a), &shift(&b), 200), Some(h));
        }
        checked += 1;
    }
}

/// Distance from a vertex to the line `]ξ, η[` through deep truncations.
fn vertex_line_dist<R: Ray>(v: &Vertex, xi: &R, eta: &R) -> i64 {
    let (a, b) = (Vertex::on_ray(xi, 200), Vertex::on_ray(eta, 200));
    (v.dist(&a) as i64 + v.dist(&b) as i64 - a.dist(&b) as i64) / 2
}

fn set_line_dist<R: Ray>(c: &ConvexSub<R>, xi: &R, eta: &R) -> i64 {
    match c {
        ConvexSub::Vertex(v) => vertex_line_dist(v, xi, eta),
        ConvexSub::Subtree(vs) => vs.iter().map(|v| vertex_line_dist(v, xi, eta)).min().unwrap(),
        ConvexSub::Line(a, b) => line_distance((a, b), (xi, eta), CAP).unwrap() as i64,
    }
}

fn check_bounds<R: Ray>(c: &ConvexSub<R>, xi: &R, eta: &R) {
    let val = d_c(c, xi, eta, CAP).unwrap().to_f64();
    let p = closest_point(c, xi, CAP).unwrap();
    let pp = closest_point(c, eta, CAP).unwrap();
    let half = p.dist(&pp) as f64 / 2.0;
    let dl = set_line_dist(c, xi, eta);
    assert_eq!(line_gap(c, xi, eta, CAP).unwrap() as i64, dl);
    let dl = dl as f64;
    let lower = (3.0 - 2.0 * 2f64.sqrt()) * (half - dl).exp();
    assert!(lower <= val * (1.0 + 1e-12), "{lower} > {val}");
    assert!(val <= half.exp() * (1.0 + 1e-12));
}

#[test]
fn two_sided_bounds_on_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    for k in 0..1000 {
        let inst = random_bt_instance([3, 5][k % 2], &mut rng);
        check_bounds(&inst.coded, &inst.xi, &inst.eta);
        let inst = random_cayley_instance(2, &mut rng);
        check_bounds(&inst.coded, &inst.xi, &inst.eta);
    }
}

#[test]
fn scaling_law_under_thickening() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..400 {
        let k = 2;
        let q = cayley::branching(k);
        let vs = random_subtree(q, rng.gen_range(1..5), &mut rng);
        let (xi, eta) = (random_cayley_end(k, &mut rng), random_cayley_end(k, &mut rng));
        let Ok(base) = d_c(&ConvexSub::<CayleyEnd>::Subtree(vs.clone()), &xi, &eta, CAP) else { continue };
        for m in 1..4 {
            let thick = ConvexSub::<CayleyEnd>::subtree(thicken(&vs, m, q)).unwrap();
            assert_eq!(d_c(&thick, &xi, &eta, CAP).unwrap(), base.scale(m as i64));
        }
    }
}

fn random_mobius<R: Rng>(q: u32, rng: &mut R) -> Mobius {
    let mut g = Mobius::identity(q);
    for _ in 0..rng.gen_range(1..5) {
        let h = match rng.gen_range(0..3) {
            0 => Mobius::s(q),
            1 => Mobius::diag(q, rng.gen_range(1..q)),
            _ => {
                let c: Vec<i64> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..q as i64)).collect();
                Mobius::translation(Poly::new(q, &c))
            }
        };
        g = g.compose(&h);
    }
    g
}

#[test]
fn equivariance_on_bruhat_tits() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for k in 0..400 {
        let q = [3, 5][k % 2];
        let inst = random_bt_instance(q, &mut rng);
        let g = random_mobius(q, &mut rng);
        let gc = match &inst.coded {
            ConvexSub::Vertex(v) => ConvexSub::Vertex(bt::act_vertex(&g, v, q)),
            ConvexSub::Line(a, b) => ConvexSub::Line(a.act(&g), b.act(&g)),
            ConvexSub::Subtree(vs) => {
                ConvexSub::subtree(vs.iter().map(|v| bt::act_vertex(&g, v, q)).collect()).unwrap()
            }
        };
        let before = d_c(&inst.coded, &inst.xi, &inst.eta, CAP).unwrap();
        let after = d_c(&gc, &inst.xi.act(&g), &inst.eta.act(&g), CAP).unwrap();
        assert_eq!(before, after);
        let (v, w) = (random_vertex(q, 7, &mut rng), random_vertex(q, 7, &mut rng));
        assert_eq!(bt::act_vertex(&g, &v, q).dist(&bt::act_vertex(&g, &w, q)), v.dist(&w));
    }
}

#[test]
fn equivariance_on_cayley() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..1000 {
        let k = 2;
        let inst = random_cayley_instance(k, &mut rng);
        let g = cayley::reduce(&(0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..2 * k)).collect::<Vec<_>>());
        let gc = match &inst.coded {
            ConvexSub::Vertex(v) => ConvexSub::Vertex(cayley::act_vertex(&g, v)),
            ConvexSub::Line(a, b) => ConvexSub::Line(a.left_mul(&g), b.left_mul(&g)),
            ConvexSub::Subtree(vs) => ConvexSub::Subtree(vs.iter().map(|v| cayley::act_vertex(&g, v)).collect()),
        };
        let before = d_c(&inst.coded, &inst.xi, &inst.eta, CAP).unwrap();
        let after = d_c(&gc, &inst.xi.left_mul(&g), &inst.eta.left_mul(&g), CAP).unwrap();
        assert_eq!(before, after);
    }
}

#[test]
fn line_distance_matches_truncated_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let path = |a: &CayleyEnd, b: &CayleyEnd| -> Vec<Vec<u32>> {
        let start = a.word(25);
        (0..=75).map(|t| cayley::native_ray_point(&start, b, t)).collect()
    };
    let mut done = 0;
    while done < 1000 {
        let e: Vec<CayleyEnd> = (0..4).map(|_| random_cayley_end(2, &mut rng)).collect();
        let Ok(d) = line_distance((&e[0], &e[1]), (&e[2], &e[3]), CAP) else { continue };
        let (l1, l2) = (path(&e[0], &e[1]), path(&e[2], &e[3]));
        let brute = l1.iter().flat_map(|u| l2.iter().map(move |v| cayley::word_dist(u, v))).min().unwrap();
        assert_eq!(d, brute);
        assert_eq!(d, line_distance((&e[2], &e[3]), (&e[0], &e[1]), CAP).unwrap());
        done += 1;
    }
    let a = random_cayley_end(2, &mut rng);
    let b = CayleyEnd::new(vec![], vec![2]).unwrap();
    assert_eq!(line_distance((&a, &b), (&a, &b), CAP), Ok(0));
    // Bruhat–Tits lines in ball coordinates.
    let mut done = 0;
    while done < 300 {
        let e: Vec<BtEnd> = (0..4).map(|_| random_bt_end(3, &mut rng)).collect();
        let Ok(d) = line_distance((&e[0], &e[1]), (&e[2], &e[3]), CAP) else { continue };
        if e.iter().filter(|x| x.is_infinity()).count() > 1 {
            continue;
        }
        let (l1, l2) = (bt::line_vertices(&e[0], &e[1], 30), bt::line_vertices(&e[2], &e[3], 30));
        let brute = l1.iter().flat_map(|u| l2.iter().map(move |v| u.dist(v))).min().unwrap();
        assert_eq!(d as u64, brute);
        done += 1;
    }
}

#[test]
fn shadow_masses() {
    let q = 2;
    let space = CylSpace::visual(q);
    let v = Vertex(vec![2, 1, 0]);
    let s = shadow(&Vertex::base(), &v, q);
    assert_eq!(s.mass(&space), ratio(1, 3) * ratio(1, 4));
    // Nesting and the exact q^{-d} decay along a ray.
    let xi = horolab_core::treespace::PeriodicRay::new(vec![1], vec![0, 1]);
    let mut prev = BigRational::one();
    for d in 1..12 {
        let w = Vertex::on_ray(&xi, d);
        let sh = shadow(&Vertex::base(), &w, q);
        let m = sh.mass(&space);
        assert_eq!(m, ratio(1, 3) * ratio(1, 1 << (d - 1)));
        assert!(shadow(&Vertex::base(), &Vertex::on_ray(&xi, d - 1), q).contains(&sh, q));
        assert!(m < prev);
        prev = m;
    }
    assert_eq!(shadow(&v, &v, q).mass(&space), BigRational::one());
    // Seen from below, an ancestor's shadow is everything but the branch back.
    let up = shadow(&v, &Vertex(vec![2]), q);
    assert_eq!(up.mass(&space), BigRational::one() - ratio(1, 6));
}

#[test]
fn cylinder_unions_are_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let q = 3;
    let space = CylSpace::visual(q);
    assert_eq!(space.whole().mass(&space), BigRational::one());
    assert_eq!(CylinderUnion::whole().mass(&space), BigRational::one());
    assert!(matches!(CylinderUnion::new(vec![vec![0], vec![0, 1]]), Err(TreeError::Overlap(..))));
    for _ in 0..500 {
        let mut pick = || {
            CylinderUnion::union_of((0..rng.gen_range(0..6)).map(|_| random_vertex(q, 5, &mut rng).0).filter(|c| !c.is_empty()))
        };
        let (a, b) = (pick(), pick());
        let lhs = a.union(&b).mass(&space) + a.intersect(&b).mass(&space);
        assert_eq!(lhs, a.mass(&space) + b.mass(&space));
        if a.intersect(&b).is_empty() {
            assert!(a.disjoint_from(&b).is_ok());
        } else {
            assert!(a.disjoint_from(&b).is_err());
        }
        for c in a.cylinders() {
            let comp = CylinderUnion::complement_of(c, q);
            assert_eq!(comp.mass(&space), BigRational::one() - space.cylinder_mass(c.len()));
            assert!(comp.disjoint_from(&CylinderUnion::single(c.clone())).is_ok());
        }
    }
}

/// Words of length `len` with first and last letter off `x₀^{±1}`, by a
/// transfer count over the last letter.
fn coset_count(k: u32, len: usize) -> u64 {
    if len == 0 {
        return 1;
    }
    let n = 2 * k as usize;
    let mut last = vec![0u64; n];
    for l in 2..n {
        last[l] = 1;
    }
    for _ in 1..len {
        let mut next = vec![0u64; n];
        for (p, &c) in last.iter().enumerate() {
            for l in 0..n {
                if l != (p ^ 1) {
                    next[l] += c;
                }
            }
        }
        last = next;
    }
    last[2..].iter().sum()
}

fn axis() -> (CayleyEnd, CayleyEnd) {
    (CayleyEnd::new(vec![], vec![0]).unwrap(), CayleyEnd::new(vec![], vec![1]).unwrap())
}

#[test]
fn double_coset_counts_and_depths() {
    for k in [2u32, 3] {
        let counts = cayley::double_coset_counts(k, 8);
        for (len, &c) in counts.iter().enumerate() {
            assert_eq!(c, coset_count(k, len), "k={k} len={len}");
        }
    }
    let (a, aa) = axis();
    for w in cayley::double_cosets(2, 7, 1 << 20).unwrap() {
        assert!(w.first().is_none_or(|&l| l >= 2) && w.last().is_none_or(|&l| l >= 2));
        let d = line_distance((&a, &aa), (&a.left_mul(&w), &aa.left_mul(&w)), CAP).unwrap();
        assert_eq!(d, w.len());
    }
    assert_eq!(line_distance((&a, &aa), (&a.left_mul(&[2]), &aa.left_mul(&[2])), CAP), Ok(1));
    assert_eq!(cayley::double_cosets(2, 5, 10), Err(TreeError::Budget(10)));
    // Growth rate of the windows [n, n+1).
    let counts = cayley::double_coset_counts(2, 14);
    let pts: Vec<(f64, f64)> = (1..=14).map(|n| (n as f64, (counts[n] as f64).ln())).collect();
    let slope = fit_slope(&pts);
    assert!((slope / 3f64.ln() - 1.0).abs() <= 0.10, "slope {slope}");
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn neighborhoods_match_dc_membership() {
    let k = 2;
    let q = cayley::branching(k);
    let (a, aa) = axis();
    let c = ConvexSub::Line(a.clone(), aa.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let reps = cayley::double_cosets(k, 5, 1 << 16).unwrap();
    for w in reps.iter().filter(|w| !w.is_empty()) {
        let ends = [a.left_mul(w), aa.left_mul(w)];
        for m in 1..9i64 {
            let (u, mass) = cayley::neighborhood(k, w, -2 * m).unwrap();
            assert_eq!(mass, u.mass(&cayley::quotient_space(k)));
            for _ in 0..20 {
                let xi = loop {
                    let e = random_cayley_end(k, &mut rng);
                    if e.letter(0) >= 2 {
                        break e;
                    }
                };
                let near = ends.iter().any(|e| d_c(&c, &xi, e, CAP).unwrap() <= DcVal::Exp2(-2 * m));
                let code = Vertex::on_ray(&xi, 20);
                assert_eq!(near, u.covers(&code.0, q), "w={w:?} m={m}");
            }
        }
    }
    assert_eq!(cayley::neighborhood(k, &[2], -3), Err(TreeError::OffGrid(-3)));
    let (_, whole) = cayley::neighborhood(k, &[2], 0).unwrap();
    assert_eq!(whole, BigRational::one());
}

#[test]
fn measure_band_and_disjointness() {
    let k = 2;
    let delta_pow = |m: i64| BigRational::from_integer(BigInt::from(3).pow(m as u32));
    let reps = cayley::double_cosets(k, 8, 1 << 20).unwrap();
    let (mut lo, mut hi) = (BigRational::from_integer(1000.into()), BigRational::zero());
    for w in reps.iter().filter(|w| !w.is_empty()) {
        let d = w.len() as i64;
        for m in (d - 1).max(1)..=d + 4 {
            let (_, mass) = cayley::neighborhood(k, w, -2 * m).unwrap();
            let r = mass * delta_pow(m);
            lo = lo.min(r.clone());
            hi = hi.max(r);
        }
    }
    assert_eq!((lo.clone(), hi.clone()), (ratio(3, 2), BigRational::from_integer(3.into())));
    // Window N = 2, radius e^{-(n+1)N}.
    let big_n = 2usize;
    for n in 0..4 {
        let level: Vec<&Vec<u32>> = reps.iter().filter(|w| !w.is_empty() && w.len() / big_n == n).collect();
        let m = ((n + 1) * big_n) as i64;
        let cyls: Vec<Vec<u32>> =
            level.iter().flat_map(|w| cayley::neighborhood(k, w, -2 * m).unwrap().0.cylinders().to_vec()).collect();
        assert!(CylinderUnion::new(cyls).is_ok(), "level {n}");
    }
}

#[test]
fn height_matches_depth() {
    let q = 3;
    let alpha = QuadIrr::default_base(q);
    let c0 = (BtEnd::quadratic(alpha.clone()), BtEnd::quadratic(alpha.conjugate()));
    let s = Mobius::s(q);
    let bs: Vec<Poly> = Poly::enumerate(q, 2).filter(|b| b.degree().unwrap_or(0) >= 1).collect();
    let mut offsets = std::collections::BTreeSet::new();
    let mut count = 0;
    for (i, b1) in bs.iter().enumerate() {
        for b2 in bs.iter().skip(i % 5).step_by(5).chain(std::iter::once(&Poly::zero(q))) {
            let mut g = s.compose(&Mobius::translation(b1.clone()));
            if !b2.is_zero() {
                g = s.compose(&Mobius::translation(b2.clone())).compose(&g);
            }
            let beta = act(&g, &alpha);
            assert_eq!(act(&g, &alpha.conjugate()), beta.conjugate());
            let (x, y) = (BtEnd::quadratic(beta.clone()), BtEnd::quadratic(beta.conjugate()));
            // Keep γ whose images lie in the ball ν ≥ 1, which avoids α and α*.
            let window = Ball::new(q, 1, 0, vec![]);
            assert!(!window.contains(&c0.0) && !window.contains(&c0.1));
            if !(window.contains(&x) && window.contains(&y)) {
                continue;
            }
            let d = line_distance((&c0.0, &c0.1), (&x, &y), CAP).unwrap() as i64;
            let nu = -bt::hamenstadt(&x, &y, CAP as i64).unwrap();
            assert_eq!(nu, beta.height_log_q());
            offsets.insert(nu - d);
            count += 1;
        }
    }
    assert!(count >= 50);
    assert_eq!(offsets.len(), 1, "{offsets:?}");
}

#[test]
fn ball_convex_examples() {
    let q = 3;
    let zero = BtEnd::rational(RatFunc::from_poly(Poly::zero(q)));
    let line = BallConvex::Line(zero, BtEnd::Infinity);
    let xi = rat(q, &[1, 1], &[0, 1]);
    assert_eq!(bt::native_projection(&line, &xi, q, 20), Some(Ball::base(q)));
    let wline = WordConvex::Line(axis().0, axis().1);
    let e = CayleyEnd::new(vec![0, 2], vec![2]).unwrap();
    assert_eq!(cayley::native_projection(&wline, &e, 10), Some(vec![0]));
}

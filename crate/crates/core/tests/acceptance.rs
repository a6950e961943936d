//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measurements. Tolerances and thresholds are pinned in code.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_traits::{One, Signed, Zero};
use splinecond::exact::{rat, rint, to_f64, Rational};
use splinecond::galerkin::{
    assemble, assemble_trio, codiagonal_affine, combine_system, critical_rho, outer_codiagonals,
    system_matrix, MatrixKind,
};
use splinecond::lab::{cond, sigma_min, CondOutcome, NormKind};
use splinecond::poly::RatPoly;
use splinecond::symbols::{
    cfl_threshold, penalty_threshold, symbol_at_pi_exact, symbol_zero_count,
};
use splinecond::toeplitz::{
    casorati_coupling, classify_scaled_family, dense_perturbed_f64, BandSpec, ConditioningClass,
};

fn kappa2(a: &nalgebra::DMatrix<f64>) -> (f64, Option<&'static str>) {
    match cond(a, NormKind::Two) {
        CondOutcome::Finite(k) if k > 1e15 => (k, Some("ge1e15")),
        CondOutcome::Finite(k) => (k, None),
        CondOutcome::Singular => (f64::INFINITY, Some("singular")),
    }
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn random_rational(
    rng: &mut ChaCha8Rng,
    num_range: std::ops::RangeInclusive<i64>,
    den_max: i64,
) -> Rational {
    rat(rng.gen_range(num_range), rng.gen_range(1..=den_max))
}

#[test]
fn criterion_01_threshold_table() {
    let start = Instant::now();
    let stated_rho = [
        rint(12),
        rint(10),
        rat(168, 17),
        rat(306, 31),
        rat(2349, 238),
        rat(7797, 790),
    ];
    let stated_delta = [
        rat(-1, 12),
        rat(-1, 120),
        rat(-17, 20160),
        rat(-5, 58529),
        rat(-2, 231067),
        rat(-1, 1140271),
    ];
    let mut mismatches = Vec::new();
    for p in 1..=6usize {
        let rho = cfl_threshold(p).unwrap();
        let delta = penalty_threshold(p, p).unwrap();
        for (name, computed, stated) in [
            ("rho", rho, stated_rho[p - 1].clone()),
            ("delta", delta, stated_delta[p - 1].clone()),
        ] {
            if computed == stated {
                println!("  {name}_{p}: exact match {stated}");
            } else {
                let rel = (to_f64(&computed) - to_f64(&stated)).abs() / to_f64(&computed).abs();
                println!(
                    "  {name}_{p}: MISMATCH stated {stated} vs computed {computed} (relative {rel:.2e})"
                );
                mismatches.push(format!(
                    "{name}_{p}: stated {stated}, exact value of the defining ratio is {computed} \
                     (relative deviation {rel:.1e})"
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "runtime {elapsed:?} exceeds 1 s"
    );
    assert!(
        mismatches.is_empty(),
        "criterion 1: FAIL — {} of 12 stated table entries differ from the exact values of the \
         defining ratios (stiffness/mass and mass/derivative symbol ratios at theta = pi, equal to \
         exact even-zeta coefficient ratios, confirmed independently by the finite spline sums, \
         criterion 4). The stated fractions match only to ~1e-7, the signature of a rational \
         reconstruction from a floating value. Details:\n  {}",
        mismatches.len(),
        mismatches.join("\n  ")
    );
    println!("criterion 1: PASS — threshold table exact for p = 1..6 ({elapsed:?})");
}

#[test]
fn criterion_02_golden_matrices() {
    let start = Instant::now();
    // Printed degree-2 matrices: three corner rows, the constant band, the
    // persymmetric mirror, and the global scale.
    let build = |corner: [&[i64]; 3], band: [i64; 5], scale: Rational| -> Vec<Vec<Rational>> {
        let n = 9usize;
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (i, row) in corner.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[i][j] = rint(v) * &scale;
            }
        }
        for i in 3..n {
            for (o, &v) in band.iter().enumerate() {
                let j = (i + o).wrapping_sub(3);
                if j < n {
                    m[i][j] = rint(v) * &scale;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i + j >= n {
                    m[i][j] = m[n - 1 - j][n - 1 - i].clone();
                }
            }
        }
        m
    };
    let cases = [
        (
            MatrixKind::Mass,
            build(
                [&[14, 2], &[40, 25, 1], &[25, 66, 26, 1]],
                [1, 26, 66, 26, 1],
                rat(1, 120),
            ),
        ),
        (
            MatrixKind::Stiffness,
            build(
                [&[-6, -2], &[8, -1, -1], &[-1, 6, -2, -1]],
                [-1, -2, 6, -2, -1],
                rat(1, 6),
            ),
        ),
        (
            MatrixKind::Deriv(2),
            build(
                [&[-6, 2], &[10, -5, 1], &[-5, 6, -4, 1]],
                [1, -4, 6, -4, 1],
                rint(1),
            ),
        ),
    ];
    for (kind, expected) in cases {
        let mat = assemble(2, 8, rint(8), kind).unwrap();
        assert_eq!(mat.n(), 9);
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(
                    *mat.get(i, j),
                    expected[i][j],
                    "criterion 2: FAIL — {kind:?} entry ({i},{j})"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "runtime {elapsed:?} exceeds 1 s"
    );
    println!(
        "criterion 2: PASS — all printed degree-2 matrix entries reproduced exactly ({elapsed:?})"
    );
}

#[test]
fn criterion_03_outer_codiagonals() {
    let start = Instant::now();
    // Closed forms of the leading (p-1)-codiagonal entries: scalar factor
    // a + rho (b + c delta) times a fixed vector. The p = 5 rho-coefficient
    // is 1/332640 = 5!/11!, consistent with the p!/(2p+1)! pattern of every
    // other degree; the printed source carries an extra digit there.
    let closed: [(usize, Rational, Rational, i64, Vec<Rational>); 7] = [
        (
            2,
            rat(1, 3),
            rat(1, 60),
            2,
            vec![rint(1), rat(1, 2), rat(1, 2)],
        ),
        (
            3,
            rat(1, 20),
            rat(1, 840),
            -6,
            vec![rint(1), rat(1, 4), rat(1, 6), rat(1, 6)],
        ),
        (
            4,
            rat(1, 210),
            rat(1, 15120),
            24,
            vec![rint(1), rat(1, 8), rat(1, 18), rat(1, 24), rat(1, 24)],
        ),
        (
            5,
            rat(1, 3024),
            rat(1, 332640),
            -120,
            vec![
                rint(1),
                rat(1, 16),
                rat(1, 54),
                rat(1, 96),
                rat(1, 120),
                rat(1, 120),
            ],
        ),
        (
            6,
            rat(1, 55440),
            rat(1, 8648640),
            720,
            vec![
                rint(1),
                rat(1, 32),
                rat(1, 162),
                rat(1, 384),
                rat(1, 600),
                rat(1, 720),
                rat(1, 720),
            ],
        ),
        (
            7,
            rat(1, 1235520),
            rat(1, 259459200),
            -5040,
            vec![
                rint(1),
                rat(1, 64),
                rat(1, 486),
                rat(1, 1536),
                rat(1, 3000),
                rat(1, 4320),
                rat(1, 5040),
                rat(1, 5040),
            ],
        ),
        (
            8,
            rat(1, 32432400),
            rat(1, 8821612800),
            40320,
            vec![
                rint(1),
                rat(1, 128),
                rat(1, 1458),
                rat(1, 6144),
                rat(1, 15000),
                rat(1, 25920),
                rat(1, 35280),
                rat(1, 40320),
                rat(1, 40320),
            ],
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20260810);
    for (p, a, b, c, vec) in &closed {
        for _ in 0..5 {
            let rho = random_rational(&mut rng, 1..=40, 7);
            let delta = -random_rational(&mut rng, 0..=30, 100);
            let (star, _) = outer_codiagonals(*p, &rho, &delta).unwrap();
            let lead = a + &rho * (b + rint(*c) * &delta);
            for (i, v) in vec.iter().enumerate() {
                assert_eq!(
                    star[i],
                    &lead * v,
                    "criterion 3: FAIL — closed form p={p} entry {i} at rho={rho}, delta={delta}"
                );
            }
        }
    }

    // Critical case, p = 2: the leading codiagonal vanishes identically and
    // the next one takes the closed form with entries proportional to
    // 180 delta - 1 (first) and 30 delta - 1 (rest). Expected values are
    // derived from the printed corner entries: K[1,1] = 1 + rho (7/60 - 6 delta),
    // K[2,2] = 1/6 + rho (5/24 - 5 delta), K[3,3] = K[4,4] = 1/3 + rho (13/60 - 4 delta).
    for delta in [rat(-1, 60), rat(-1, 30), rat(-7, 120)] {
        let rho_star = critical_rho(2, &delta)
            .unwrap()
            .expect("critical value exists");
        assert_eq!(rho_star, -rat(1, 3) / (rat(1, 60) + rint(2) * &delta));
        let (star, hash) = outer_codiagonals(2, &rho_star, &delta).unwrap();
        assert!(
            star.iter().all(|v| v.is_zero()),
            "criterion 3: FAIL — star not zero at critical"
        );
        let expect0 = rint(1) + &rho_star * (rat(7, 60) - rint(6) * &delta);
        let expect_rest = rat(1, 6) + &rho_star * (rat(5, 24) - rint(5) * &delta);
        let expect_tail = rat(1, 3) + &rho_star * (rat(13, 60) - rint(4) * &delta);
        assert_eq!(hash[0], expect0);
        assert_eq!(hash[1], expect_rest);
        assert_eq!(hash[2], expect_tail);
        assert_eq!(hash[3], expect_tail);
        // Proportionality to 180 delta - 1 and 30 delta - 1.
        let d120 = rint(120) * &delta + rint(1);
        assert_eq!(
            &hash[0] * &d120 * rint(3),
            rint(4) * (rint(180) * &delta - rint(1))
        );
        for i in 1..4 {
            assert_eq!(&hash[i] * &d120, rint(4) * (rint(30) * &delta - rint(1)));
        }
        assert!(hash.iter().all(|v| !v.is_zero()));
    }

    // Exceptional parameter sets where some next-codiagonal entry would
    // vanish; they all lie at positive delta, outside the stabilized regime,
    // so the hypothesis holds for every delta <= 0. The p = 2 pair is
    // {1/180, 1/30}; the remaining values are frozen from an independent
    // exact recomputation (p = 6 agrees with the printed source digit for
    // digit, the p = 4 and p = 8 printings drop/alter one digit).
    let exceptional: [(usize, Rational, Rational); 4] = [
        (2, rat(1, 180), rat(1, 30)),
        (4, rat(1, 1270080), rat(1, 119070)),
        (6, rat(1, 34248614400), rat(1, 2073646575)),
        (8, rat(1, 2667655710720000), rat(1, 118555239552750)),
    ];
    for (p, first, rest) in &exceptional {
        let affine = codiagonal_affine(*p).unwrap();
        let (a0, b0, c0) = &affine.star[0];
        let rho_at = |delta: &Rational| -> Rational { -a0 / (b0 + delta * c0) };
        // At the first exceptional delta the leading hash entry vanishes; at
        // the second, all following entries vanish.
        let rho = rho_at(first);
        assert!(
            affine.eval_hash(0, &rho, first).is_zero(),
            "p={p} first exceptional"
        );
        let rho = rho_at(rest);
        for i in 1..affine.hash.len() {
            assert!(
                affine.eval_hash(i, &rho, rest).is_zero(),
                "p={p} rest exceptional entry {i}"
            );
        }
        // For delta <= 0 below the critical bound, every hash entry is nonzero.
        for delta in [-first * rint(2), -rest * rint(3), rat(-1, 7)] {
            if let Some(rho_star) = critical_rho(*p, &delta).unwrap() {
                for i in 0..affine.hash.len() {
                    assert!(
                        !affine.eval_hash(i, &rho_star, &delta).is_zero(),
                        "p={p} hash entry {i} vanished at delta={delta}"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "runtime {elapsed:?} exceeds 10 s"
    );
    println!("criterion 3: PASS — codiagonal closed forms, critical case and exceptional sets verified ({elapsed:?})");
}

#[test]
fn criterion_04_dual_route_symbols() {
    let start = Instant::now();
    let mut checked = 0;
    for p in 1..=8usize {
        for k in 1..=p {
            // Errors out on any exact disagreement between the finite spline
            // sums and the even-zeta closed forms.
            symbol_at_pi_exact(p, k).unwrap();
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "runtime {elapsed:?} exceeds 5 s"
    );
    println!(
        "criterion 4: PASS — {checked} (p, k) pairs agree exactly across both routes ({elapsed:?})"
    );
}

#[test]
fn criterion_05_sharpness_sweeps() {
    let start = Instant::now();
    let n = 1000usize;
    for p in 1..=3usize {
        let elements = n - p + 1;
        let trio = assemble_trio(p, elements, rint(elements as i64), p).unwrap();
        let rho_p = cfl_threshold(p).unwrap();
        let delta_p = penalty_threshold(p, p).unwrap();

        let measure = |rho: &Rational, delta: &Rational| -> (f64, Option<&'static str>) {
            let mat = combine_system(&trio, rho, delta).to_dense_f64();
            kappa2(&mat)
        };

        let (k_stable, s_stable) = measure(&(&rho_p * rat(99, 100)), &Rational::zero());
        let (k_unstable, s_unstable) = measure(&(&rho_p * rat(11, 10)), &Rational::zero());
        assert!(
            s_stable.is_none() && k_stable <= 1e7,
            "p={p}: stable kappa {k_stable}"
        );
        assert!(
            s_unstable.is_some() || k_unstable >= 1e3 * k_stable,
            "p={p}: rho jump {k_stable} -> {k_unstable}"
        );

        let rho20000 = rint(20000);
        let (k_pen, s_pen) = measure(&rho20000, &delta_p);
        let (k_half, s_half) = measure(&rho20000, &(&delta_p / rint(2)));
        assert!(
            s_pen.is_none() && k_pen <= 1e7,
            "p={p}: penalized kappa {k_pen}"
        );
        assert!(
            s_half.is_some() || k_half >= 1e3 * k_pen,
            "p={p}: delta jump {k_pen} -> {k_half}"
        );
        println!(
            "  p={p}: kappa(0.99 rho)={k_stable:.3e}, kappa(1.10 rho)={k_unstable:.3e}{}, \
             kappa(delta_p)={k_pen:.3e}, kappa(delta_p/2)={k_half:.3e}{}",
            s_unstable.map(|s| format!(" [{s}]")).unwrap_or_default(),
            s_half.map(|s| format!(" [{s}]")).unwrap_or_default(),
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "runtime {elapsed:?} exceeds 10 min"
    );
    println!("criterion 5: PASS — threshold sharpness at n = {n} ({elapsed:?})");
}

#[test]
fn criterion_06_tridiagonal_oracle() {
    let start = Instant::now();
    let band = BandSpec::new(1, 1, vec![rint(1), rint(2), rint(1)]).unwrap();
    for n in [50usize, 100, 200] {
        let theta = std::f64::consts::PI / (n as f64 + 1.0);
        let expect = (2.0 + 2.0 * theta.cos()) / (2.0 + 2.0 * (n as f64 * theta).cos());
        let (k, sentinel) = kappa2(&band.dense_f64(n));
        assert!(sentinel.is_none());
        assert!(
            (k - expect).abs() / expect < 1e-10,
            "criterion 6: FAIL — n={n}: kappa {k} vs formula {expect}"
        );
    }
    let mut pts = Vec::new();
    for n in [100usize, 200, 400, 800] {
        let (k, _) = kappa2(&band.dense_f64(n));
        pts.push(((n as f64).ln(), k.ln()));
    }
    let slope = fit_slope(&pts);
    assert!(
        (slope - 2.0).abs() <= 0.1,
        "criterion 6: FAIL — log-log slope {slope} not within 2 +- 0.1"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "runtime {elapsed:?} exceeds 30 s"
    );
    println!("criterion 6: PASS — eigenvalue formula matched to 1e-10; growth slope {slope:.3} ({elapsed:?})");
}

#[test]
fn criterion_07_perturbed_family_singularity() {
    let start = Instant::now();
    let spec = BandSpec::new(3, 1, vec![rint(1), rint(2), rint(-6), rint(2), rint(1)]).unwrap();
    let tl = vec![
        vec![rint(-6), rint(2), rint(0), rint(0)],
        vec![rint(-8), rint(1), rint(1), rint(0)],
        vec![rint(1), rint(-6), rint(2), rint(1)],
        vec![rint(1), rint(2), rint(-6), rint(2)],
    ];
    let report = casorati_coupling(&spec, &tl).unwrap();
    let s3 = 3.0f64.sqrt();
    let expected = [
        [-1.0, -1.5, -0.5],
        [-2.0 / 3.0, -1.0, -1.0 / 3.0],
        [
            -(23.0 / 18.0) * s3 - 13.0 / 6.0,
            -(19.0 / 12.0) * s3 - 11.0 / 4.0,
            (19.0 / 36.0) * s3 + 11.0 / 12.0,
        ],
    ];
    for i in 0..3 {
        for j in 0..3 {
            assert!(
                (report.matrix[(i, j)] - expected[i][j]).abs() < 1e-10,
                "criterion 7: FAIL — coupling entry ({i},{j}): {} vs {}",
                report.matrix[(i, j)],
                expected[i][j]
            );
        }
    }
    assert_eq!(report.rank, 2, "criterion 7: FAIL — rank {}", report.rank);

    // Unperturbed bottom-right corner; the family is singular in the limit,
    // so sigma_min must sit at (or fall to) the floating-point floor, never
    // rise above it, and in particular stay far below 1e-8.
    let mk = 4usize;
    let br: Vec<Vec<Rational>> = (0..mk)
        .map(|i| {
            (0..mk)
                .map(|j| spec.coeff_at(j as i64 - i as i64))
                .collect()
        })
        .collect();
    let mut previous = f64::INFINITY;
    let mut smallest = f64::INFINITY;
    for n in [50usize, 100, 200] {
        let a = dense_perturbed_f64(&spec, &tl, &br, n).unwrap();
        let smax = a.iter().fold(0.0f64, |m, v| m.max(v.abs())) * (n as f64).sqrt();
        let floor = n as f64 * f64::EPSILON * smax;
        let s = sigma_min(&a);
        let clamped = if s < floor { 0.0 } else { s };
        assert!(
            clamped <= previous,
            "criterion 7: FAIL — sigma_min rises above the floor at n={n}: {s:e}"
        );
        previous = clamped;
        smallest = smallest.min(s);
        println!("  n={n}: sigma_min={s:.3e} (floor {floor:.1e})");
        if n == 200 {
            assert!(s < 1e-8, "criterion 7: FAIL — sigma_min at n=200 is {s:e}");
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "runtime {elapsed:?} exceeds 30 s"
    );
    println!("criterion 7: PASS — coupling matrix to 1e-10, rank 2, singular family confirmed ({elapsed:?})");
}

#[test]
fn criterion_08_classification_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in 1..=3usize {
        let rho_p = cfl_threshold(p).unwrap();
        let delta_p = penalty_threshold(p, p).unwrap();
        let mut cases: Vec<(Rational, Rational)> = (0..20)
            .map(|i| {
                let rho = if i % 5 == 4 {
                    random_rational(&mut rng, 1000..=40000, 3)
                } else {
                    random_rational(&mut rng, 1..=60, 5)
                };
                let delta = -random_rational(&mut rng, 0..=40, 120);
                (rho, delta)
            })
            .collect();
        // Boundary cases on top of the random draws.
        cases.push((rho_p.clone(), Rational::zero()));
        cases.push((rint(20000), delta_p.clone()));
        for (rho, delta) in cases {
            let fc = classify_scaled_family(p, &rho, &delta, p).unwrap();
            assert!(
                fc.routes_agree,
                "criterion 8: FAIL — routes disagree at p={p}, rho={rho}, delta={delta}: \
                 sturm count {}, floating {:?}",
                fc.sturm_interval_roots, fc.floating.triple
            );
            let zeros = symbol_zero_count(p, p, &rho, &delta).unwrap();
            assert_eq!(
                zeros,
                2 * fc.sturm_interval_roots,
                "criterion 8: FAIL — endpoint-sign count disagrees at p={p}, rho={rho}, delta={delta}"
            );
            let weak = matches!(
                fc.verdict.class,
                ConditioningClass::Weak(_) | ConditioningClass::Well
            );
            assert_eq!(
                weak,
                zeros == 2,
                "criterion 8: FAIL — verdict vs zero count at p={p}, rho={rho}, delta={delta}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "runtime {elapsed:?} exceeds 1 min"
    );
    println!("criterion 8: PASS — Sturm, floating and endpoint-sign routes consistent on 66 cases ({elapsed:?})");
}

#[test]
fn criterion_09_quadrature_oracle() {
    let start = Instant::now();
    let elements = 12usize;
    for p in 1..=5usize {
        let basis =
            splinecond::spline_space::build_basis(p, elements, rint(elements as i64)).unwrap();
        let breaks: Vec<f64> = basis.breakpoints().iter().map(to_f64).collect();
        // Derivative pieces reparametrized to local element coordinates
        // before the single rounding to doubles; evaluating the global-t
        // polynomials in floating point would lose digits to cancellation at
        // the far elements.
        let exact_breaks = basis.breakpoints().to_vec();
        let derivatives: Vec<Vec<Vec<Option<RatPoly>>>> = (0..=p)
            .map(|order| {
                basis
                    .functions
                    .iter()
                    .map(|f| {
                        (0..elements)
                            .map(|e| {
                                f.piece_on(e).map(|piece| {
                                    piece
                                        .derivative_n(order)
                                        .compose_affine(&Rational::one(), &exact_breaks[e])
                                })
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        for order in 0..=p {
            let kind = match order {
                0 => MatrixKind::Mass,
                1 => MatrixKind::Stiffness,
                k => MatrixKind::Deriv(k),
            };
            let mat = assemble(p, elements, rint(elements as i64), kind).unwrap();
            for row in 0..mat.n() {
                for col in 0..mat.n() {
                    let exact = to_f64(mat.get(row, col));
                    let mut quad = 0.0;
                    for e in 0..elements {
                        if let (Some(da), Some(db)) =
                            (&derivatives[order][col + 1][e], &derivatives[order][row][e])
                        {
                            quad += splinecond::quadrature::integrate(
                                |tau| da.eval_f64(tau) * db.eval_f64(tau),
                                0.0,
                                breaks[e + 1] - breaks[e],
                                p + 1,
                            );
                        }
                    }
                    assert!(
                        (exact - quad).abs() <= 1e-12 * (1.0 + exact.abs()),
                        "criterion 9: FAIL — p={p} order={order} entry ({row},{col}): \
                         exact {exact} vs quadrature {quad}"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "runtime {elapsed:?} exceeds 1 min"
    );
    println!("criterion 9: PASS — exact and Gauss-Legendre assembly agree to 1e-12 for p <= 5 ({elapsed:?})");
}

#[test]
fn criterion_10_refinement_slope() {
    let start = Instant::now();
    let mu = rint(10000);
    for p in 1..=3usize {
        let delta_p = penalty_threshold(p, p).unwrap();
        let mut curves: Vec<Vec<f64>> = Vec::new();
        for delta in [Rational::zero(), delta_p.clone()] {
            let mut kappas = Vec::new();
            for j in 7..=11u32 {
                let elements = 1usize << j;
                let mat = system_matrix(p, elements, Rational::one(), &mu, &delta, p).unwrap();
                let (k, sentinel) = kappa2(&mat.to_dense_f64());
                assert!(sentinel.is_none(), "p={p} N={elements}: {sentinel:?}");
                kappas.push(k);
            }
            let pts: Vec<(f64, f64)> = kappas
                .iter()
                .enumerate()
                .map(|(i, k)| (((1usize << (7 + i)) as f64).ln(), k.ln()))
                .collect();
            let slope = fit_slope(&pts);
            assert!(
                (slope.abs() - 2.0).abs() <= 0.3,
                "criterion 10: FAIL — p={p} delta={delta}: |slope| {} not within 2 +- 0.3",
                slope.abs()
            );
            println!("  p={p} delta={delta}: slope {slope:.3}");
            curves.push(kappas);
        }
        for (i, (a, b)) in curves[0].iter().zip(curves[1].iter()).enumerate() {
            let rel = (a - b).abs() / a;
            assert!(
                rel < 0.05,
                "criterion 10: FAIL — p={p} point {i}: curves differ by {rel:.3}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "runtime {elapsed:?} exceeds 10 min"
    );
    println!(
        "criterion 10: PASS — refinement slope magnitude 2 +- 0.3, curves within 5% ({elapsed:?})"
    );
}

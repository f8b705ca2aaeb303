use friable_core::averages::{main_term, sigma_brute, SigmaQuery};
use friable_core::counts::{e_star, phi_mu, phi_mu_exact, psi, psi_coprime, psi_progression, ProgressionQuery};
use friable_core::dickman::{log_rho_hat, log_rho_hat_quadrature, xi, DickmanTable};
use friable_core::products::{complex_zeta, EulerProducts, ProductParams, Truncation};
use friable_core::saddle::{log_zeta_y_real, solve_alpha};
use friable_core::sieve::{primes_up_to, sieve_segment, SieveConfig, SmoothIndex};
use friable_core::{Complex64, RationalSum};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::LazyLock;

// reaches the quadrature peak for Re s down to −10
static WIDE: LazyLock<DickmanTable> = LazyLock::new(|| DickmanTable::new(3000.0));

fn trial(n: u64) -> (u64, u64, i8) {
    // (largest, smallest, mu)
    let (mut m, mut p, mut lp, mut sp, mut mu) = (n, 2u64, 1u64, u64::MAX, 1i8);
    while p * p <= m {
        if m % p == 0 {
            sp = sp.min(p);
            lp = p;
            m /= p;
            mu = if m % p == 0 { 0 } else { -mu };
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        sp = sp.min(m);
        lp = lp.max(m);
        mu = -mu;
    }
    (lp, sp, mu)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn segment_matches_trial_division(lo in 1u64..1_000_000_000, width in 1u64..10_000) {
        let hi = lo + width;
        let seg = sieve_segment(lo, hi, &primes_up_to(31_623)).unwrap();
        for n in (lo..hi).step_by(7) {
            let (lp, sp, mu) = trial(n);
            prop_assert_eq!(seg.lpf(n), lp);
            if n > 1 {
                prop_assert_eq!(seg.spf(n), sp);
            }
            prop_assert_eq!(seg.mu(n), mu);
        }
    }

    #[test]
    fn index_counts(x in 1u64..50_000, y in 2u64..200, seg_pow in 6u32..14, threads in 1usize..5) {
        let cfg = SieveConfig { segment_size: 1 << seg_pow, threads, ..SieveConfig::default() };
        let idx = SmoothIndex::build(x, y, &cfg).unwrap();
        prop_assert_eq!(&idx, &SmoothIndex::build(x, y, &SieveConfig::default()).unwrap());
        let mut prev = 0;
        for t in (0..=x).step_by(97) {
            let c = idx.count(t);
            prop_assert!(c >= prev);
            prev = c;
        }
        let all = SmoothIndex::build(x, x.max(2), &cfg).unwrap();
        prop_assert_eq!(all.count(x), x);
    }

    #[test]
    fn progressions_partition_psi(x in 1u64..10_000, y in 2u64..100, q in 1u64..=50) {
        let idx = SmoothIndex::build(x, y, &SieveConfig::default()).unwrap();
        let xf = x as f64;
        let total: i64 = (0..q as i64)
            .map(|a| psi_progression(ProgressionQuery::new(xf, y, a, q), &idx, false).unwrap())
            .sum();
        prop_assert_eq!(total as u64, psi(xf, y, &idx).unwrap());
    }

    #[test]
    fn coprime_count_matches_gcd_filter(x in 1u64..10_000, y in 2u64..100, q in 1u64..1000) {
        let idx = SmoothIndex::build(x, y, &SieveConfig::default()).unwrap();
        let want = (1..=x).filter(|&n| idx.contains(n) && gcd(n, q) == 1).count() as u64;
        prop_assert_eq!(psi_coprime(x as f64, y, q, &idx).unwrap(), want);
    }

    #[test]
    fn e_star_over_reduced_residues(x in 1u64..10_000, y in 2u64..100, q in 1u64..300) {
        // Σ_{1 ≤ a ≤ q, (a,q)=1} E*(x,y;a,q) = −#{a ≤ min(q, x) : (a,q) = 1, a friable}
        let idx = SmoothIndex::build(x, y, &SieveConfig::default()).unwrap();
        let mut s = RationalSum::new();
        let mut friable_reps = 0i128;
        for a in (1..=q).filter(|&a| gcd(a, q) == 1) {
            s += e_star(ProgressionQuery::new(x as f64, y, a as i64, q), &idx).unwrap();
            friable_reps += (a <= x && idx.contains(a)) as i128;
        }
        prop_assert_eq!(s, RationalSum::from_integer(-friable_reps));
    }

    #[test]
    fn phi_mu_modes(x in 1u64..100_000, y in 2u64..500) {
        let exact = phi_mu_exact(x as f64, y).unwrap().to_f64();
        let float = phi_mu(x as f64, y, 0);
        prop_assert!((exact - float).abs() <= 1e-12 * exact.abs().max(1e-300), "{} vs {}", exact, float);
    }

    #[test]
    fn xi_root_and_monotone(u in 1.0001f64..1e6, du in 1e-6f64..1.0) {
        let v = xi(u);
        prop_assert!((v.exp_m1() - u * v).abs() <= 1e-12 * (1.0 + u * v));
        prop_assert!(xi(u * (1.0 + du)) > v);
    }

    #[test]
    fn rho_hat_routes_agree(re in -10.0f64..10.0, im in -40.0f64..40.0) {
        let s = Complex64::new(re, im);
        let a = log_rho_hat(s);
        // the Laplace integral cancels by ρ̂(Re s)/|ρ̂(s)|; past 1e3 f64 cannot hold 1e-8
        let cond = log_rho_hat(Complex64::new(re, 0.0)).re - a.re;
        prop_assume!(cond <= 1e3f64.ln());
        let b = log_rho_hat_quadrature(s, &WIDE).unwrap();
        let dphase = (a.im - b.im + PI).rem_euclid(2.0 * PI) - PI;
        prop_assert!((a.re - b.re).abs() <= 1e-8 && dphase.abs() <= 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn saddle_second_moment(lx in 4.0f64..9.0, y in 20u64..2000) {
        let x = 10f64.powf(lx);
        prop_assume!(x >= y as f64);
        let primes = primes_up_to(2000);
        let sd = solve_alpha(x, y, &primes).unwrap();
        let h = 1e-3;
        let f = |s: f64| log_zeta_y_real(s, y, &primes).unwrap();
        let a = sd.alpha;
        let d2 = (-f(a + 2.0 * h) + 16.0 * f(a + h) - 30.0 * f(a) + 16.0 * f(a - h) - f(a - 2.0 * h)) / (12.0 * h * h);
        prop_assert!((d2 - sd.sigma2).abs() <= 1e-6 * sd.sigma2, "{} vs {}", d2, sd.sigma2);
        let band = sd.sigma2 / (x.ln() * (y as f64).ln());
        prop_assert!((0.05..=20.0).contains(&band), "band {}", band);
    }

    #[test]
    fn rankin_within_loose_constant(x in 1000u64..1_000_000, y in 2u64..1000) {
        prop_assume!(x >= y);
        let idx = SmoothIndex::build(x, y, &SieveConfig::default()).unwrap();
        let sd = solve_alpha(x as f64, y, &primes_up_to(1000)).unwrap();
        let count = idx.count(x) as f64;
        prop_assert!(count <= sd.rankin_bound());
        let cap = 50.0 * count * (y as f64).ln() * sd.u.sqrt();
        prop_assert!(sd.rankin_bound() <= cap, "{} > {}", sd.rankin_bound(), cap);
    }

    #[test]
    fn zeta_conjugate_symmetry(re in -1.5f64..4.0, im in -200.0f64..200.0) {
        let s = Complex64::new(re, im);
        prop_assume!((s - 1.0).norm() > 1e-3);
        let a = complex_zeta(s).unwrap();
        let b = complex_zeta(s.conj()).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-14 * a.norm().max(1e-300));
        prop_assert_eq!(complex_zeta(Complex64::new(re, 0.0)).map(|z| z.im).unwrap_or(0.0), 0.0);
    }

    #[test]
    fn sigma_thread_independent(x in 100u64..20_000, y in 2u64..60, m in 1.0f64..40.0, a in -12i64..=12) {
        prop_assume!(a != 0);
        let idx = SmoothIndex::build(x, y, &SieveConfig::default()).unwrap();
        let q = SigmaQuery::new(x as f64, y, m, a);
        let one = sigma_brute(&q.with_threads(1), &idx).unwrap();
        let many = sigma_brute(&q.with_threads(7), &idx).unwrap();
        prop_assert_eq!(format!("{one:?}"), format!("{many:?}"));
    }

    #[test]
    fn main_term_is_negative(lx in 3.0f64..12.0, y in 2u64..10_000, m in 1.0f64..1e4, a in 1i64..50) {
        let table = DickmanTable::new(40.0);
        let q = SigmaQuery::new(10f64.powf(lx), y, m, a);
        if let Ok(v) = main_term(&q, &table) {
            prop_assert!(v < 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn product_tails_bracket_refinement(
        s1_re in 0.5f64..1.0, s1_im in -20.0f64..20.0,
        s2_re in -1.2f64..2.0, s2_im in -20.0f64..20.0,
        a in 1i64..=30, big_y in any::<bool>(),
    ) {
        let coarse = EulerProducts::new(Truncation { p_max: 20_000, tolerance: 1e-6 }).unwrap();
        let fine = coarse.refined().unwrap();
        let p = ProductParams::new(Complex64::new(s1_re, s1_im), Complex64::new(s2_re, s2_im), a, if big_y { 500 } else { 50 });
        let c = coarse.g_family(&p).unwrap();
        let f = fine.g_family(&p).unwrap();
        for (lo, hi) in [(c.g_a, f.g_a), (c.f.f_a, f.f.f_a), (c.h_1, f.h_1)] {
            prop_assert!((lo.value - hi.value).norm() <= lo.abs_error() + hi.abs_error());
        }
        prop_assert!(c.residuals.max() < 1e-9 && f.residuals.max() < 1e-9);
    }
}

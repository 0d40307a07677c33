//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line with
//! the sub-checks that failed, then asserts.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use polstar::candidates::{chebyshev_box, naive_round, BitBudget, CandidateBox, ConstraintSet};
use polstar::funcexpr::FunctionOracle;
use polstar::numerics::{Rational, Real};
use polstar::pipeline::{polstar, ProblemConfig, Report};
use polstar::poly::{beta_vector, chebyshev_t_star, Polynomial};
use polstar::remez::minimax;
use polstar::search::{best_truncated, brute_force_oracle};
use polstar::supnorm::{grid_lower_bound, sup_norm, DEFAULT_TOL};

struct Checks {
    name: &'static str,
    failed: Vec<String>,
    passed: usize,
}

impl Checks {
    fn new(name: &'static str) -> Self {
        Checks { name, failed: Vec::new(), passed: 0 }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(what.into());
        }
    }

    fn finish(self) {
        if self.failed.is_empty() {
            println!("{}: PASS ({} checks)", self.name, self.passed);
        } else {
            println!("{}: FAIL ({} of {} checks failed)", self.name, self.failed.len(), self.failed.len() + self.passed);
            for f in &self.failed {
                println!("    {f}");
            }
            panic!("{} failed", self.name);
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn cosine(workers: usize) -> ProblemConfig {
    ProblemConfig {
        function: "cos".into(),
        a: "pi/4".into(),
        degree: 3,
        bits: vec![12, 10, 6, 4],
        lambda: "1/2".into(),
        workers,
        ..ProblemConfig::default()
    }
}

fn exponential(workers: usize) -> ProblemConfig {
    ProblemConfig {
        function: "exp".into(),
        a: "ln(1 + 1/2048)".into(),
        degree: 3,
        bits: vec![56, 45, 33, 23],
        lambda: "1".into(),
        d: Some(25),
        workers,
        ..ProblemConfig::default()
    }
}

fn counts(b: &polstar::pipeline::BoxReport) -> Vec<String> {
    b.degrees.iter().map(|d| d.count.clone()).collect()
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn fractions(r: &Report) -> Vec<String> {
    r.pstar.as_ref().unwrap().coefficients.iter().map(|c| c.fraction.clone()).collect()
}

fn timed(cfg: ProblemConfig) -> (Report, Duration) {
    let t = Instant::now();
    let r = polstar(cfg).expect("pipeline run");
    (r, t.elapsed())
}

#[test]
fn criterion_1_cosine_example() {
    let mut c = Checks::new("criterion 1 (cosine example)");
    let (r, took) = timed(cosine(0));
    let eps = num(&r.minimax.as_ref().unwrap().epsilon.value);
    c.check(rel(eps, 1.135879209e-4) <= 1e-6, format!("epsilon {eps:.10e} vs 1.135879209e-4 (rel {:.2e})", rel(eps, 1.135879209e-4)));
    let eps_hat = num(&r.hatp.as_ref().unwrap().epsilon_hat.value);
    c.check(rel(eps_hat, 6.939707e-4) <= 1e-6, format!("epsilon_hat {eps_hat:.10e}"));
    let b = r.chebyshev_box.as_ref().unwrap();
    c.check(counts(b) == strs(&["4", "22", "5", "1"]), format!("counts {:?}", counts(b)));
    c.check(b.total == "440", format!("total {}", b.total));
    c.check(r.refined_box.is_none(), "no refinement expected");
    c.check(fractions(&r) == strs(&["4095/4096", "3/512", "-17/32", "1/16"]), format!("p* {:?}", fractions(&r)));
    let err = num(&r.pstar.as_ref().unwrap().error.value);
    c.check(rel(err, 2.441406250e-4) <= 1e-8, format!("||f - p*|| {err:.12e}"));
    let saved = r.bits_saved.unwrap();
    c.check((saved - 1.5).abs() <= 0.05, format!("bits saved {saved}"));
    c.check(took < Duration::from_secs(60), format!("runtime {took:?}"));
    c.finish();
}

#[test]
fn criterion_2_exponential_example() {
    let mut c = Checks::new("criterion 2 (exponential example)");
    let (r, took) = timed(exponential(0));
    let eps = num(&r.minimax.as_ref().unwrap().epsilon.value);
    c.check(rel(eps, 1.849017208895e-17) <= 1e-6, format!("epsilon {eps:.12e}"));
    let b = r.chebyshev_box.as_ref().unwrap();
    c.check(counts(b) == strs(&["6", "109", "146", "194"]), format!("unrefined counts {:?}", counts(b)));
    c.check(b.total == "18523896", format!("unrefined total {}", b.total));
    let rb = r.refined_box.as_ref().unwrap();
    c.check(counts(rb) == strs(&["2", "27", "32", "44"]), format!("refined counts {:?} vs [2, 27, 32, 44]", counts(rb)));
    c.check(rb.total == "76032", format!("refined total {} vs 76032", rb.total));
    let want = strs(&[
        "72057594037927935/72057594037927936",
        "35184372088873/35184372088832",
        "2147483595/4294967296",
        "1398443/8388608",
    ]);
    c.check(fractions(&r) == want, format!("p* {:?}", fractions(&r)));
    let err = num(&r.pstar.as_ref().unwrap().error.value);
    c.check(rel(err, 2.0246280367e-17) <= 1e-6, format!("||f - p*|| {err:.12e}"));
    let saved = r.bits_saved.unwrap();
    c.check((saved - 0.22).abs() <= 0.02, format!("bits saved {saved}"));
    c.check(took <= Duration::from_secs(30 * 60), format!("runtime {took:?}"));
    c.finish();
}

#[test]
fn criterion_3_chebyshev_minimal_norm() {
    let mut c = Checks::new("criterion 3 (minimal norm of a fixed coefficient)");
    let mut rng = StdRng::seed_from_u64(3);
    let zero = FunctionOracle::builtin("zero").unwrap();
    let random_a = |rng: &mut StdRng| {
        let den: i64 = rng.gen_range(1..=64);
        q(rng.gen_range(1..=4 * den), den)
    };
    for n in 1..=8usize {
        for k in 1..=n {
            for _ in 0..20 {
                let a = random_a(&mut rng);
                let betas = beta_vector(n, &a).unwrap();
                let beta = betas.beta(k).clone();
                let t = chebyshev_t_star(n).compose_linear(&a.recip(), &Rational::zero());
                let scaled = t.scale(&beta.recip());
                let got = sup_norm(&zero, &scaled, &a, DEFAULT_TOL).unwrap().value.mid().to_f64();
                let want = Real::from_rational(&betas.min_norm(k), 128, polstar::numerics::Round::Nearest).to_f64();
                c.check(rel(got, want) <= 1e-12, format!("n={n} k={k} a={a}: {got:e} vs {want:e}"));
            }
        }
    }
    for _ in 0..200 {
        let n = rng.gen_range(1..=8usize);
        let k = rng.gen_range(1..=n);
        let a = random_a(&mut rng);
        let bound = Real::from_rational(&beta_vector(n, &a).unwrap().min_norm(k), 128, polstar::numerics::Round::Nearest).to_f64();
        // coefficients of the size the minimiser has, so the check is not trivial
        let t = chebyshev_t_star(n).compose_linear(&a.recip(), &Rational::zero());
        let lead = t.coeffs()[k].clone();
        let coeffs: Vec<Rational> = (0..=n)
            .map(|i| {
                if i == k {
                    return Rational::one();
                }
                let base = &t.coeffs()[i] / &lead;
                let wiggle = q(rng.gen_range(-1000..=1000), 10_000);
                &base + &base * wiggle + q(rng.gen_range(-100..=100), 1_000_000)
            })
            .collect();
        let p = Polynomial::new(coeffs);
        let got = sup_norm(&zero, &p, &a, DEFAULT_TOL).unwrap().value.hi().to_f64();
        c.check(got >= bound * (1.0 - 1e-10), format!("n={n} k={k} a={a}: {got:e} below {bound:e}"));
    }
    c.finish();
}

#[test]
fn criterion_4_equioscillation() {
    let mut c = Checks::new("criterion 4 (equioscillation)");
    let one = Rational::one();
    for name in ["cos", "exp", "log1p", "atan"] {
        let f = FunctionOracle::builtin(name).unwrap();
        for n in 2..=6 {
            let m = minimax(&f, &one, n, DEFAULT_TOL).unwrap();
            let eps = m.epsilon.mid().to_f64();
            let alt = &m.alternation;
            c.check(alt.len() == n + 2, format!("{name} n={n}: {} reference points", alt.len()));
            let signs_alternate = alt.windows(2).all(|w| w[0].error.mid().signum() == -w[1].error.mid().signum());
            c.check(signs_alternate, format!("{name} n={n}: signs do not alternate"));
            for e in alt {
                let mag = e.error.mid().abs().to_f64();
                c.check(rel(mag, eps) <= 1e-8, format!("{name} n={n}: |e({})| = {mag:e} vs {eps:e}", e.x));
            }
        }
    }
    c.finish();
}

/// A small random problem: function, endpoint, bit budget, λ.
struct Instance {
    f: FunctionOracle,
    a: Rational,
    bits: BitBudget,
}

fn random_instance(rng: &mut StdRng, max_degree: usize, max_bits: i64) -> Instance {
    let names = ["cos", "exp", "log1p", "atan", "sin", "expm1"];
    let f = FunctionOracle::builtin(names[rng.gen_range(0..names.len())]).unwrap();
    let a = q(rng.gen_range(1..=16), 8);
    let n = rng.gen_range(0..=max_degree);
    let bits = BitBudget::new((0..=n).map(|_| rng.gen_range(2..=max_bits)).collect());
    Instance { f, a, bits }
}

#[test]
fn criterion_5_box_soundness() {
    let mut c = Checks::new("criterion 5 (box soundness)");
    let mut rng = StdRng::seed_from_u64(5);
    let mut admitted = 0;
    let mut instances = 0;
    while admitted < 100 && instances < 500 {
        instances += 1;
        let inst = random_instance(&mut rng, 3, 8);
        let n = inst.bits.degree();
        let m = minimax(&inst.f, &inst.a, n, DEFAULT_TOL).unwrap();
        let hat = naive_round(&m.p, &inst.bits).unwrap();
        let centre = inst.bits.scaled(&hat).unwrap();
        let eps_hat = sup_norm(&inst.f, &hat, &inst.a, DEFAULT_TOL).unwrap().value;
        if eps_hat.hi().is_zero() {
            continue;
        }
        let ratio = m.epsilon.hi().to_rational() / eps_hat.lo().to_rational();
        let lambda = if ratio >= Rational::one() || rng.gen_bool(0.5) {
            Rational::one()
        } else {
            &ratio + (Rational::one() - &ratio) * q(rng.gen_range(1..=8), 8)
        };
        let Ok(bx) = chebyshev_box(&m.p, &m.epsilon, &eps_hat, &lambda, &inst.a, &inst.bits) else {
            continue;
        };
        let bound = lambda * eps_hat.lo().to_rational();
        let probes: Vec<Rational> = (0..=32).map(|k| &inst.a * q(k, 32)).collect();
        for s in 0..40 {
            // half near the rounded minimax, half anywhere in a region three
            // times as wide as the box
            let t: Vec<BigInt> = (0..=n)
                .map(|i| {
                    if s % 2 == 0 {
                        return &centre[i] + rng.gen_range(-2i64..=2);
                    }
                    let w = &bx.hi[i] - &bx.lo[i] + 1;
                    let span = i64::try_from(&(3 * &w)).unwrap_or(i64::MAX / 2);
                    &bx.lo[i] - &w + rng.gen_range(0..span.max(1))
                })
                .collect();
            let qn = inst.bits.polynomial(&t);
            let cheap = grid_lower_bound(&inst.f, &qn, &probes).unwrap();
            if cheap.to_rational() > bound {
                continue;
            }
            let e = sup_norm(&inst.f, &qn, &inst.a, DEFAULT_TOL).unwrap().value;
            if e.hi().to_rational() <= bound {
                admitted += 1;
                c.check(bx.contains(&t), format!("{} on [0, {}], bits {:?}: {:?} outside box", inst.f.name(), inst.a, inst.bits.bits, t));
            }
        }
    }
    c.check(admitted >= 100, format!("only {admitted} admissible polynomials found"));
    c.finish();
}

#[test]
fn criterion_6_oracle_equivalence() {
    let mut c = Checks::new("criterion 6 (search vs brute force)");
    let mut rng = StdRng::seed_from_u64(6);
    let far = Real::from_f64(1e300, 64);
    for _ in 0..25 {
        let inst = random_instance(&mut rng, 2, 6);
        let n = inst.bits.degree();
        let m = minimax(&inst.f, &inst.a, n, DEFAULT_TOL).unwrap();
        let centre = inst.bits.scaled(&naive_round(&m.p, &inst.bits).unwrap()).unwrap();
        let radius = [40, 8, 4][n];
        let bx = CandidateBox::around(&centre, radius, inst.bits.clone());
        assert!(bx.total() <= BigInt::from(10_000));
        let free = ConstraintSet::unconstrained(inst.bits.clone());
        let fast = best_truncated(&inst.f, &inst.a, &bx, &free, &far, DEFAULT_TOL).unwrap();
        let slow = brute_force_oracle(&inst.f, &inst.a, &inst.bits, &bx).unwrap();
        let label = format!("{} on [0, {}], bits {:?}", inst.f.name(), inst.a, inst.bits.bits);
        c.check(fast.scaled == slow.scaled, format!("{label}: {:?} vs {:?}", fast.scaled, slow.scaled));
        c.check(fast.error.overlaps(&slow.error), format!("{label}: errors {:?} and {:?} disagree", fast.error, slow.error));
    }
    c.finish();
}

#[test]
fn criterion_7_determinism() {
    let mut c = Checks::new("criterion 7 (determinism across worker counts)");
    for (name, make) in [("cosine", cosine as fn(usize) -> ProblemConfig), ("exponential", exponential)] {
        let outputs: Vec<String> = [1, 2, 8]
            .iter()
            .map(|&w| {
                let r = polstar(make(w)).unwrap();
                serde_json::to_string(&r.pstar.unwrap().coefficients).unwrap()
            })
            .collect();
        c.check(outputs.windows(2).all(|w| w[0] == w[1]), format!("{name}: outputs differ: {outputs:?}"));
    }
    c.finish();
}

//! The end-to-end run: minimax, naive rounding, Chebyshev box, optional
//! polytope refinement and the final search, either in batch or driven from a
//! console.

mod report;
mod session;

use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::{
    chebyshev_box, lp_tighten, naive_round, sampled_constraints, BitBudget, CandidateBox, CandidateError, ConstraintSet,
};
use crate::funcexpr::{eval_enclosure, parse, FunctionOracle};
use crate::numerics::{fraction_string, parse_rational, Enclosure, Rational, Real, Round, DEFAULT_PRECISION};
use crate::poly::Polynomial;
use crate::remez::{minimax_with, MinimaxResult, RemezConfig};
use crate::search::{best_truncated_with, Progress, SearchConfig, SearchResult};
use crate::supnorm::{NormConfig, NormProbe, DEFAULT_TOL};

pub use report::{BoxDegree, BoxReport, Coefficient, ErrorValue, HatReport, MinimaxReport, PstarReport, Report, Timing, DIGITS};
pub use session::interactive_session;

/// Box size above which a batch run refines with the sampled constraints.
pub const DEFAULT_REFINE_THRESHOLD: u64 = 100_000;

/// Extra bits used to pin down the interval endpoint.
const ENDPOINT_GUARD: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    /// A builtin name such as `cos` or an expression in `x`.
    pub function: String,
    /// Right end of `[0, a]`, e.g. `pi/4` or `ln(1 + 1/2048)`.
    pub a: String,
    pub degree: usize,
    pub bits: Vec<i64>,
    /// `p/q` or a decimal in `(0, 1]`.
    pub lambda: String,
    /// Sample count for refinement. Without it, refinement runs with
    /// [`default_d`] only when the box exceeds `refine_threshold`.
    pub d: Option<u64>,
    pub refine_threshold: u64,
    pub precision: u32,
    pub tol: f64,
    /// Search threads; 0 picks automatically.
    pub workers: usize,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            function: String::new(),
            a: String::new(),
            degree: 0,
            bits: Vec::new(),
            lambda: "1".into(),
            d: None,
            refine_threshold: DEFAULT_REFINE_THRESHOLD,
            precision: DEFAULT_PRECISION,
            tol: DEFAULT_TOL,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("{0}")]
    Lambda(String),
    #[error("console: {0}")]
    Console(String),
}

fn stage<E: std::fmt::Display>(stage: &'static str) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError::Stage { stage, message: e.to_string() }
}

/// `8 (n + 1)` sample points.
pub fn default_d(degree: usize) -> u64 {
    8 * (degree as u64 + 1)
}

/// Bits carrying at least `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32
}

/// Parses `1/2`, `0.5` or `1/2;`.
pub fn parse_lambda(text: &str) -> Result<Rational, PipelineError> {
    let t = text.trim().trim_end_matches(';').trim();
    let l = parse_rational(t).ok_or_else(|| PipelineError::Config(format!("cannot read lambda from {t:?}")))?;
    if l <= Rational::from_integer(0.into()) || l > Rational::from_integer(1.into()) {
        return Err(PipelineError::Config(format!("lambda must lie in (0, 1], got {}", fraction_string(&l))));
    }
    Ok(l)
}

/// Run state shared by the batch and interactive drivers.
pub struct Pipeline {
    cfg: ProblemConfig,
    f: FunctionOracle,
    a: Rational,
    bits: BitBudget,
    prec: u32,
    minimax: Option<MinimaxResult>,
    hat: Option<(Polynomial<Rational>, Enclosure)>,
    lambda: Option<Rational>,
    current: Option<CandidateBox>,
    constraints: Option<ConstraintSet>,
    pstar: Option<SearchResult>,
    report: Report,
}

impl Pipeline {
    pub fn new(cfg: ProblemConfig) -> Result<Self, PipelineError> {
        if cfg.bits.len() != cfg.degree + 1 {
            return Err(PipelineError::Config(format!(
                "degree {} needs {} bit counts, got {}",
                cfg.degree,
                cfg.degree + 1,
                cfg.bits.len()
            )));
        }
        if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
            return Err(PipelineError::Config(format!("tolerance must lie in (0, 1), got {}", cfg.tol)));
        }
        if cfg.d == Some(0) {
            return Err(PipelineError::Config("d must be at least 1".into()));
        }
        let prec = cfg.precision.max(crate::numerics::MIN_PRECISION);
        let f = FunctionOracle::from_text(&cfg.function).map_err(|e| PipelineError::Config(format!("function: {e}")))?;
        let a_expr = parse(&cfg.a).map_err(|e| PipelineError::Config(format!("endpoint: {e}")))?;
        if !a_expr.is_constant() {
            return Err(PipelineError::Config(format!("endpoint {:?} must not depend on x", cfg.a)));
        }
        let a_enc = eval_enclosure(&a_expr, &Rational::from_integer(0.into()), prec + ENDPOINT_GUARD).map_err(stage("endpoint"))?;
        // the lower end is a dyadic rational at most a
        let a = a_enc.lo().to_rational();
        if a <= Rational::from_integer(0.into()) {
            return Err(PipelineError::Config(format!("endpoint must be positive, got {}", cfg.a)));
        }
        parse_lambda(&cfg.lambda)?;
        let bits = BitBudget::new(cfg.bits.clone());
        let report = Report {
            function: f.name().to_string(),
            interval_end: cfg.a.clone(),
            a: a_enc.lo().to_decimal(DIGITS),
            degree: cfg.degree,
            bits: cfg.bits.clone(),
            precision: prec,
            lambda: None,
            minimax: None,
            hatp: None,
            chebyshev_box: None,
            refined_box: None,
            pstar: None,
            ratio: None,
            bits_saved: None,
            timings: Vec::new(),
        };
        Ok(Pipeline {
            cfg,
            f,
            a,
            bits,
            prec,
            minimax: None,
            hat: None,
            lambda: None,
            current: None,
            constraints: None,
            pstar: None,
            report,
        })
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    pub fn report(&self) -> &Report {
        &self.report
    }

    pub fn into_report(self) -> Report {
        self.report
    }

    pub fn minimax(&self) -> Option<&MinimaxResult> {
        self.minimax.as_ref()
    }

    pub fn hat(&self) -> Option<&(Polynomial<Rational>, Enclosure)> {
        self.hat.as_ref()
    }

    pub fn current_box(&self) -> Option<&CandidateBox> {
        self.current.as_ref()
    }

    pub fn pstar(&self) -> Option<&SearchResult> {
        self.pstar.as_ref()
    }

    /// Raises the working precision to at least `bits`.
    pub fn raise_precision(&mut self, bits: u32) {
        self.prec = self.prec.max(bits);
        self.report.precision = self.prec;
    }

    fn timed<T>(&mut self, name: &str, run: impl FnOnce(&mut Self) -> Result<T, PipelineError>) -> Result<T, PipelineError> {
        let t = Instant::now();
        let out = run(self)?;
        self.report.timings.push(Timing { stage: name.to_string(), seconds: t.elapsed().as_secs_f64() });
        Ok(out)
    }

    /// Minimax polynomial `p`, its rounding `p̂`, and both errors.
    pub fn approximate(&mut self) -> Result<(), PipelineError> {
        self.timed("minimax", |s| {
            let rc = RemezConfig { tol: s.cfg.tol, prec: s.prec, ..RemezConfig::default() };
            let mm = minimax_with(&s.f, &s.a, s.cfg.degree, &rc).map_err(stage("minimax"))?;
            s.report.minimax = Some(MinimaxReport {
                coefficients: mm.p.coeffs().iter().map(|c| c.to_decimal(DIGITS + 5)).collect(),
                epsilon: ErrorValue::new(&mm.epsilon),
                iterations: mm.iterations(),
            });
            s.minimax = Some(mm);
            Ok(())
        })?;
        self.timed("naive rounding", |s| {
            let mm = s.minimax.as_ref().expect("minimax computed");
            let hat = naive_round(&mm.p, &s.bits).map_err(stage("naive rounding"))?;
            let probe = NormProbe::new(&s.f, &s.a, s.cfg.degree, NormConfig { tol: s.cfg.tol, prec: s.prec }).map_err(stage("naive rounding"))?;
            let eps_hat = probe.norm(&hat).map_err(stage("naive rounding"))?.value;
            let scaled = s.bits.scaled(&hat).expect("rounded coefficients lie on their grids");
            s.report.hatp = Some(HatReport { coefficients: Coefficient::list(&s.bits, &scaled), epsilon_hat: ErrorValue::new(&eps_hat) });
            s.hat = Some((hat, eps_hat));
            Ok(())
        })
    }

    /// The Chebyshev box for quality factor `lambda`.
    pub fn bound(&mut self, lambda: &Rational) -> Result<&CandidateBox, PipelineError> {
        self.timed("chebyshev box", |s| {
            let mm = s.minimax.as_ref().expect("approximate() first");
            let (_, eps_hat) = s.hat.as_ref().expect("approximate() first");
            let bx = chebyshev_box(&mm.p, &mm.epsilon, eps_hat, lambda, &s.a, &s.bits).map_err(|e| match e {
                CandidateError::LambdaOutOfRange { .. } => PipelineError::Lambda(e.to_string()),
                other => stage("chebyshev box")(other),
            })?;
            s.report.lambda = Some(fraction_string(lambda));
            s.report.chebyshev_box = Some(BoxReport::new(&bx));
            s.report.refined_box = None;
            s.lambda = Some(lambda.clone());
            s.current = Some(bx);
            s.constraints = None;
            Ok(())
        })?;
        Ok(self.current.as_ref().expect("just set"))
    }

    /// Tightens the current box by the band constraints at `d + 1` points.
    /// Rows from earlier refinements are kept.
    pub fn refine(&mut self, d: u64) -> Result<&CandidateBox, PipelineError> {
        if d == 0 {
            return Err(PipelineError::Config("d must be at least 1".into()));
        }
        self.timed("refinement", |s| {
            let lambda = s.lambda.clone().expect("bound() first");
            let (_, eps_hat) = s.hat.as_ref().expect("approximate() first");
            let cs = sampled_constraints(&s.f, &s.a, d, &lambda, eps_hat, &s.bits, s.prec).map_err(stage("refinement"))?;
            let merged = match s.constraints.take() {
                Some(mut old) => {
                    old.rows.extend(cs.rows.iter().cloned());
                    ConstraintSet { rows: old.rows, ..cs }
                }
                None => cs,
            };
            let bx = lp_tighten(s.current.as_ref().expect("bound() first"), &merged);
            let mut br = BoxReport::new(&bx);
            br.d = Some(d);
            br.a_sample = Some(fraction_string(&merged.a_sample));
            s.report.refined_box = Some(br);
            s.current = Some(bx);
            s.constraints = Some(merged);
            Ok(())
        })?;
        Ok(self.current.as_ref().expect("just set"))
    }

    /// Finds `p*` in the current box.
    pub fn search(&mut self, progress: Option<&(dyn Fn(&Progress) + Sync)>) -> Result<&SearchResult, PipelineError> {
        self.timed("search", |s| {
            let bx = s.current.as_ref().expect("bound() first");
            let (hat, eps_hat) = s.hat.as_ref().expect("approximate() first");
            let lambda = s.lambda.as_ref().expect("bound() first");
            let bound = Real::from_rational(&(lambda * eps_hat.hi().to_rational()), 64, Round::Up);
            let free;
            let cs = match &s.constraints {
                Some(c) => c,
                None => {
                    free = ConstraintSet::unconstrained(s.bits.clone());
                    &free
                }
            };
            let cfg = SearchConfig { tol: s.cfg.tol, prec: s.prec, workers: s.cfg.workers, hint: s.bits.scaled(hat) };
            let r = if bx.is_empty() {
                // the polytope has no integer point: search the unrefined box
                let cheb = s.chebyshev_box_again()?;
                let empty = ConstraintSet::unconstrained(s.bits.clone());
                let mut r = best_truncated_with(&s.f, &s.a, &cheb, &empty, &bound, &cfg, progress).map_err(stage("search"))?;
                r.unconstrained_fallback = true;
                r
            } else {
                best_truncated_with(&s.f, &s.a, bx, cs, &bound, &cfg, progress).map_err(stage("search"))?
            };
            let ratio = r.error.mid().to_f64() / eps_hat.mid().to_f64();
            s.report.pstar = Some(PstarReport {
                coefficients: Coefficient::list(&s.bits, &r.scaled),
                error: ErrorValue::new(&r.error),
                feasible: r.feasible,
                checked: r.checked,
                pruned: r.pruned.to_string(),
                unconstrained_fallback: r.unconstrained_fallback,
            });
            s.report.ratio = Some(ratio);
            s.report.bits_saved = Some(-ratio.log2());
            s.pstar = Some(r);
            Ok(())
        })?;
        Ok(self.pstar.as_ref().expect("just set"))
    }

    fn chebyshev_box_again(&self) -> Result<CandidateBox, PipelineError> {
        let mm = self.minimax.as_ref().expect("approximate() first");
        let (_, eps_hat) = self.hat.as_ref().expect("approximate() first");
        let lambda = self.lambda.as_ref().expect("bound() first");
        chebyshev_box(&mm.p, &mm.epsilon, eps_hat, lambda, &self.a, &self.bits).map_err(stage("search"))
    }
}

/// Runs every stage without prompting.
pub fn polstar(config: ProblemConfig) -> Result<Report, PipelineError> {
    run_batch(config, &mut std::io::sink())
}

/// [`polstar`], writing the human-readable transcript to `out`.
pub fn run_batch(config: ProblemConfig, out: &mut dyn Write) -> Result<Report, PipelineError> {
    let lambda = parse_lambda(&config.lambda)?;
    let mut p = Pipeline::new(config)?;
    p.approximate()?;
    session::print_approximation(out, &p)?;
    let total = p.bound(&lambda)?.total();
    session::print_box(out, p.current_box().expect("bounded"))?;
    let d = match p.config().d {
        Some(d) => Some(d),
        None if total > BigInt::from(p.config().refine_threshold) => Some(default_d(p.config().degree)),
        None => None,
    };
    if let Some(d) = d {
        writeln!(out, "refining with d = {d}").map_err(console)?;
        p.refine(d)?;
        session::print_box(out, p.current_box().expect("bounded"))?;
    }
    p.search(None)?;
    session::print_pstar(out, &p)?;
    Ok(p.into_report())
}

fn console(e: std::io::Error) -> PipelineError {
    PipelineError::Console(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(function: &str, a: &str, bits: Vec<i64>) -> ProblemConfig {
        ProblemConfig { function: function.into(), a: a.into(), degree: bits.len() - 1, bits, ..ProblemConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert!(matches!(Pipeline::new(cfg("exp", "1", vec![4, 4]).clone()), Ok(_)));
        let mut c = cfg("exp", "1", vec![4, 4]);
        c.degree = 2;
        assert!(matches!(Pipeline::new(c), Err(PipelineError::Config(_))));
        assert!(matches!(Pipeline::new(cfg("exp", "-1", vec![4])), Err(PipelineError::Config(_))));
        assert!(matches!(Pipeline::new(cfg("exp", "x", vec![4])), Err(PipelineError::Config(_))));
        assert!(matches!(Pipeline::new(cfg("exp(", "1", vec![4])), Err(PipelineError::Config(_))));
        let mut c = cfg("exp", "1", vec![4]);
        c.lambda = "3/2".into();
        assert!(matches!(Pipeline::new(c), Err(PipelineError::Config(_))));
    }

    #[test]
    fn lambda_forms() {
        assert_eq!(parse_lambda("1/2;").unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(parse_lambda(" 0.25 ").unwrap(), Rational::new(1.into(), 4.into()));
        assert!(parse_lambda("0").is_err());
        assert!(parse_lambda("half").is_err());
    }

    #[test]
    fn digits_mapping() {
        assert_eq!(digits_to_bits(21), 70);
        assert_eq!(digits_to_bits(30), 100);
        assert_eq!(default_d(3), 32);
    }

    #[test]
    fn degree_zero_run() {
        // the best constant for exp on [0, 1] is (1 + e)/2 = 1.859...; on the
        // 1/16 grid the nearest are 29/16 and 30/16, and 30/16 is closer
        let r = polstar(cfg("exp", "1", vec![4])).unwrap();
        let p = r.pstar.unwrap();
        assert_eq!(p.coefficients[0].fraction, "15/8");
        assert!(p.feasible);
    }

    #[test]
    fn report_round_trips() {
        let r = polstar(cfg("atan", "1/2", vec![6, 6])).unwrap();
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let hat = r.hatp.unwrap();
        for c in &hat.coefficients {
            assert_eq!(c.exponent, 6);
        }
    }
}

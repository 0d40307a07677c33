//! Console transcript and the question-and-answer driver.

use std::io::{BufRead, Write};
use std::time::Instant;

use super::{console, digits_to_bits, parse_lambda, Pipeline, PipelineError, ProblemConfig, Report};
use crate::candidates::CandidateBox;

pub(super) fn print_approximation(out: &mut dyn Write, p: &Pipeline) -> Result<(), PipelineError> {
    let mm = p.minimax().expect("approximated");
    let mut line = String::new();
    for (i, c) in mm.p.coeffs().iter().enumerate() {
        let text = c.to_decimal(21);
        let (sign, mag) = match text.strip_prefix('-') {
            Some(rest) => ("-", rest.to_string()),
            None => ("+", text),
        };
        if i == 0 {
            line.push_str(if sign == "-" { "-" } else { "" });
        } else {
            line.push_str(&format!(" {sign} "));
        }
        line.push_str(&match i {
            0 => mag,
            1 => format!("{mag}*x"),
            _ => format!("{mag}*x^{i}"),
        });
    }
    let (hat, eps_hat) = p.hat().expect("approximated");
    writeln!(out, "minimax = {line}").map_err(console)?;
    writeln!(out, "Distance between f and p = {}", mm.epsilon.mid().to_decimal(13)).map_err(console)?;
    writeln!(out, "hatp = {hat}").map_err(console)?;
    writeln!(out, "Distance between f and hatp = {}", eps_hat.mid().to_decimal(23)).map_err(console)?;
    Ok(())
}

pub(super) fn print_box(out: &mut dyn Write, bx: &CandidateBox) -> Result<(), PipelineError> {
    if bx.is_empty() {
        writeln!(out, "no polynomial satisfies the constraints").map_err(console)?;
        return Ok(());
    }
    for line in bx.summary() {
        writeln!(out, "{line}").map_err(console)?;
    }
    writeln!(out, "{} polynomials need be checked", bx.total()).map_err(console)?;
    Ok(())
}

pub(super) fn print_pstar(out: &mut dyn Write, p: &Pipeline) -> Result<(), PipelineError> {
    let r = p.pstar().expect("searched");
    writeln!(out, "pstar = {}", r.pstar).map_err(console)?;
    writeln!(out, "Distance between f and pstar = {}", r.error.mid().to_decimal(23)).map_err(console)?;
    if !r.feasible {
        writeln!(out, "no candidate reaches lambda * ||f - hatp||; pstar is the best in the box").map_err(console)?;
    }
    Ok(())
}

/// Reads one line, or fails if the input is exhausted.
fn ask<R: BufRead, W: Write>(input: &mut R, out: &mut W, prompt: &str) -> Result<String, PipelineError> {
    write!(out, "{prompt}").map_err(console)?;
    out.flush().map_err(console)?;
    let mut line = String::new();
    if input.read_line(&mut line).map_err(console)? == 0 {
        return Err(PipelineError::Console("input closed".into()));
    }
    Ok(line.trim().trim_end_matches(';').trim().to_string())
}

fn yes_no<R: BufRead, W: Write>(input: &mut R, out: &mut W, prompt: &str) -> Result<bool, PipelineError> {
    loop {
        match ask(input, out, prompt)?.to_ascii_lowercase().as_str() {
            "y" | "yes" => return Ok(true),
            "n" | "no" => return Ok(false),
            _ => writeln!(out, "please answer y or n").map_err(console)?,
        }
    }
}

fn positive<R: BufRead, W: Write>(input: &mut R, out: &mut W, prompt: &str) -> Result<u64, PipelineError> {
    loop {
        match ask(input, out, prompt)?.parse::<u64>() {
            Ok(v) if v > 0 => return Ok(v),
            _ => writeln!(out, "please enter a positive integer").map_err(console)?,
        }
    }
}

/// Runs the stages one at a time, asking after each whether and how to go on:
/// continue, the value of λ, whether to refine (and with which `d`, possibly
/// several times), and whether to raise the working precision before the
/// search. Malformed answers are asked again.
pub fn interactive_session<R: BufRead, W: Write>(config: ProblemConfig, input: &mut R, out: &mut W) -> Result<Report, PipelineError> {
    let started = Instant::now();
    let mut p = Pipeline::new(config)?;
    p.approximate()?;
    print_approximation(out, &p)?;
    if !yes_no(input, out, "Do you want to continue (y;/n;)? ")? {
        return Ok(p.into_report());
    }
    loop {
        let text = ask(input, out, "Enter the value of parameter lambda: ")?;
        let lambda = match parse_lambda(&text) {
            Ok(l) => l,
            Err(e) => {
                writeln!(out, "{e}").map_err(console)?;
                continue;
            }
        };
        match p.bound(&lambda) {
            Ok(_) => break,
            Err(PipelineError::Lambda(msg)) => writeln!(out, "{msg}").map_err(console)?,
            Err(e) => return Err(e),
        }
    }
    print_box(out, p.current_box().expect("bounded"))?;
    let mut refined = false;
    while yes_no(input, out, "Do you want to try to refine the bounds (y;/n;)? ")? {
        let d = positive(input, out, "Enter the value of parameter d: ")?;
        p.refine(d)?;
        refined = true;
        print_box(out, p.current_box().expect("bounded"))?;
    }
    if refined && yes_no(input, out, "Do you want to change the value of Digits (y;/n;)? ")? {
        let digits = positive(input, out, "Enter the value of Digits: ")?;
        p.raise_precision(digits_to_bits(u32::try_from(digits).unwrap_or(u32::MAX)));
    }
    p.search(None)?;
    print_pstar(out, &p)?;
    writeln!(out, "Time elapsed (in seconds) = {:.3}", started.elapsed().as_secs_f64()).map_err(console)?;
    Ok(p.into_report())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ProblemConfig {
        ProblemConfig { function: "exp".into(), a: "1/4".into(), degree: 1, bits: vec![6, 6], ..ProblemConfig::default() }
    }

    fn replay(answers: &str) -> (Result<Report, PipelineError>, String) {
        let mut input = answers.as_bytes();
        let mut out = Vec::new();
        let r = interactive_session(cfg(), &mut input, &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn stop_after_rounding() {
        let (r, text) = replay("n;\n");
        let r = r.unwrap();
        assert!(r.minimax.is_some() && r.hatp.is_some());
        assert!(r.chebyshev_box.is_none() && r.pstar.is_none());
        assert!(text.contains("hatp = "));
    }

    #[test]
    fn malformed_answers_are_asked_again() {
        let (r, text) = replay("maybe\ny\nlots\n2\n1/2\nsure\nn\n");
        let r = r.unwrap();
        assert_eq!(r.lambda.as_deref(), Some("1/2"));
        assert!(r.pstar.is_some());
        assert!(text.contains("please answer y or n"));
        assert!(text.contains("cannot read lambda"));
        assert!(text.contains("lambda must lie in (0, 1]"));
    }

    #[test]
    fn refinement_then_precision() {
        let (r, text) = replay("y\n1\ny\n8\ny\n4\nn\ny\n40\n");
        let r = r.unwrap();
        assert_eq!(r.refined_box.as_ref().unwrap().d, Some(4));
        assert_eq!(r.precision, 133);
        assert!(r.pstar.unwrap().feasible);
        assert!(text.contains("Time elapsed"));
    }

    #[test]
    fn closed_input_is_an_error() {
        let (r, _) = replay("y\n");
        assert!(matches!(r, Err(PipelineError::Console(_))));
    }

    #[test]
    fn session_matches_batch() {
        let (r, _) = replay("y\n1\nn\n");
        let batch = super::super::polstar(cfg()).unwrap();
        assert_eq!(r.unwrap().pstar.unwrap().coefficients, batch.pstar.unwrap().coefficients);
    }
}

use crate::funcexpr::FunctionOracle;
use crate::numerics::{EvalError, Enclosure, Rational, Real, Round, DEFAULT_PRECISION};
use crate::poly::{horner, Coefficient, Polynomial};

/// `f` enclosed at a fixed set of abscissae, for cheap lower bounds of
/// `||f - q||`.
#[derive(Clone, Debug)]
pub struct SamplePoints {
    work: u32,
    xs: Vec<Enclosure>,
    fs: Vec<Enclosure>,
}

impl SamplePoints {
    /// Points are rounded toward zero to `prec + 32` bits, so nonnegative
    /// points stay inside `[0, a]`.
    pub fn new(f: &FunctionOracle, points: &[Rational], prec: u32) -> Result<Self, EvalError> {
        let work = prec + 32;
        let mut xs = Vec::with_capacity(points.len());
        let mut fs = Vec::with_capacity(points.len());
        for p in points {
            let x = Enclosure::point(Real::from_rational(p, work, Round::Down));
            fs.push(f.value(&x)?);
            xs.push(x);
        }
        Ok(SamplePoints { work, xs, fs })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Working precision of the cached values.
    pub fn work(&self) -> u32 {
        self.work
    }

    /// Certified lower bound of `|f - q|` at point `k`.
    pub fn error_lower(&self, qc: &[Enclosure], k: usize) -> Real {
        self.fs[k].sub(&horner(qc, &self.xs[k])).mag_lo()
    }

    /// Largest certified lower bound of `|f - q|` over the points.
    pub fn lower_bound<T: Coefficient>(&self, q: &Polynomial<T>) -> Real {
        let qc = q.enclose_coeffs(self.work);
        (0..self.len()).map(|k| self.error_lower(&qc, k)).fold(Real::zero(64), Real::max)
    }

    /// True if `|f - q|` certainly exceeds `cutoff` at one of the points.
    pub fn exceeds(&self, qc: &[Enclosure], cutoff: &Real) -> bool {
        (0..self.len()).any(|k| self.error_lower(qc, k) > *cutoff)
    }
}

/// Max over `points` of a certified lower bound of `|f(x) - q(x)|`; never
/// above the sup norm on any interval containing the points.
pub fn grid_lower_bound<T: Coefficient>(
    f: &FunctionOracle,
    q: &Polynomial<T>,
    points: &[Rational],
) -> Result<Real, EvalError> {
    Ok(SamplePoints::new(f, points, DEFAULT_PRECISION)?.lower_bound(q))
}

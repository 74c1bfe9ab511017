//! Randomized self-checks run by `spiralgram verify`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::GridSquare;
use crate::conserved::{f_invariants, ConservedQuantities, Quantity};
use crate::dynamics::{t3_coords_forward, t3_coords_inverse, t_k_forward, MapLabeling};
use crate::error::{Error, Result};
use crate::orbit::{sample_rational_with, sample_with};
use crate::polygon::{reconstruct, reconstruct_conditioned, CornerInvariants};
use crate::scalar::{rational, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Rational,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "float" => Ok(Mode::Float),
            "rational" | "exact" => Ok(Mode::Rational),
            _ => Err(Error::InvalidInput(format!("mode must be float or rational, got {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Float => "float",
            Mode::Rational => "rational",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    /// Samples where the map was singular and nothing could be checked.
    pub skipped: usize,
    /// Largest observed deviation (0 in exact mode when everything passes).
    pub max_error: f64,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        CheckOutcome { name: name.into(), passed: 0, failed: 0, skipped: 0, max_error: 0.0 }
    }

    fn record(&mut self, err: f64, tol: f64) {
        self.max_error = self.max_error.max(err);
        if err <= tol {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub mode: Mode,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(CheckOutcome::ok)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
}

/// Relative difference of two quantity tuples; infinite when tags differ.
fn quantity_error<S: Scalar>(a: &ConservedQuantities<S>, b: &ConservedQuantities<S>) -> f64 {
    a.f.iter()
        .zip(&b.f)
        .map(|(p, q)| match (p, q) {
            (Quantity::Value(p), Quantity::Value(q)) => {
                (p.clone() - q.clone()).abs().to_f64_lossy() / p.abs().to_f64_lossy().max(1e-300)
            }
            (Quantity::Infinite, Quantity::Infinite) | (Quantity::Undefined, Quantity::Undefined) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

struct Suite {
    conserved_fwd: CheckOutcome,
    conserved_inv: CheckOutcome,
    roundtrip: CheckOutcome,
    fixed: CheckOutcome,
    relation: CheckOutcome,
}

impl Suite {
    fn new() -> Self {
        Suite {
            conserved_fwd: CheckOutcome::new("conserved quantities under T3"),
            conserved_inv: CheckOutcome::new("conserved quantities under T3 inverse"),
            roundtrip: CheckOutcome::new("T3 and its inverse compose to the identity"),
            fixed: CheckOutcome::new("constant tuples are fixed points"),
            relation: CheckOutcome::new("F4 = F2 F3 / F1"),
        }
    }

    fn run<S: Scalar>(&mut self, x: &CornerInvariants<S>, tol: f64) {
        let q = f_invariants(x);
        if let [Quantity::Value(f1), Quantity::Value(f2), Quantity::Value(f3), Quantity::Value(f4)] = &q.f {
            let rhs = f2.clone() * f3.clone() / f1.clone();
            let err = (f4.clone() - rhs).abs().to_f64_lossy() / f4.abs().to_f64_lossy().max(1e-300);
            self.relation.record(err, tol);
        }
        match t3_coords_forward(x) {
            Ok(y) => {
                self.conserved_fwd.record(quantity_error(&q, &f_invariants(&y)), tol);
                match t3_coords_inverse(&y) {
                    Ok(z) => self.roundtrip.record(x.max_abs_diff(&z), tol),
                    Err(_) => self.roundtrip.skipped += 1,
                }
            }
            Err(_) => {
                self.conserved_fwd.skipped += 1;
                self.roundtrip.skipped += 1;
            }
        }
        match t3_coords_inverse(x) {
            Ok(y) => {
                self.conserved_inv.record(quantity_error(&q, &f_invariants(&y)), tol);
                match t3_coords_forward(&y) {
                    Ok(z) => self.roundtrip.record(x.max_abs_diff(&z), tol),
                    Err(_) => self.roundtrip.skipped += 1,
                }
            }
            Err(_) => self.conserved_inv.skipped += 1,
        }
    }

    fn fixed_points<S: Scalar>(&mut self, n: usize, consts: Vec<S>, tol: f64) {
        for c in consts {
            let x = CornerInvariants::constant(n, c).expect("n >= 2");
            for y in [t3_coords_forward(&x), t3_coords_inverse(&x)] {
                match y {
                    Ok(y) => self.fixed.record(x.max_abs_diff(&y), tol),
                    Err(_) => self.fixed.failed += 1,
                }
            }
        }
    }

    fn finish(self) -> Vec<CheckOutcome> {
        vec![self.conserved_fwd, self.conserved_inv, self.roundtrip, self.fixed, self.relation]
    }
}

/// Runs the property suites for one `n`. Rational mode checks with zero tolerance.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.n < 2 {
        return Err(Error::InvalidInput(format!("n must be at least 2, got {}", cfg.n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut suite = Suite::new();
    let mut recon = CheckOutcome::new("corner invariants of the reconstruction");
    let mut geo = CheckOutcome::new("geometric T3 matches the coordinate formula");
    for _ in 0..cfg.trials {
        let square = *GridSquare::SIDES.choose(&mut rng).expect("nonempty");
        match cfg.mode {
            Mode::Rational => {
                let x = sample_rational_with(square, cfg.n, 1000, &mut rng)?;
                suite.run(&x, 0.0);
                match reconstruct(&x, None).and_then(|p| p.corner_invariants()) {
                    Ok(y) => recon.record(if y == x { 0.0 } else { x.max_abs_diff(&y).max(f64::MIN_POSITIVE) }, 0.0),
                    Err(_) => recon.failed += 1,
                }
            }
            Mode::Float => {
                let x = sample_with(square, cfg.n, &mut rng)?;
                suite.run(&x, 1e-10);
                match reconstruct_conditioned(&x) {
                    Ok(p) => {
                        match p.corner_invariants() {
                            Ok(y) => recon.record(x.max_abs_diff(&y), 1e-8),
                            Err(_) => recon.failed += 1,
                        }
                        let img = t_k_forward(&p, 3, MapLabeling::Centered3).and_then(|q| q.corner_invariants());
                        match (img, t3_coords_forward(&x)) {
                            (Ok(g), Ok(c)) => geo.record(g.max_abs_diff(&c), 1e-8),
                            (_, Err(_)) => geo.skipped += 1,
                            (Err(_), Ok(_)) => geo.failed += 1,
                        }
                    }
                    Err(_) => recon.failed += 1,
                }
            }
        }
    }
    match cfg.mode {
        Mode::Rational => suite.fixed_points(cfg.n, vec![rational(-1, 1), rational(3, 10), rational(2, 1)], 0.0),
        Mode::Float => suite.fixed_points(cfg.n, vec![-1.0, 0.3, 2.0], 1e-12),
    }
    let mut checks = suite.finish();
    checks.push(recon);
    if cfg.mode == Mode::Float {
        checks.push(geo);
    }
    Ok(VerifyReport { n: cfg.n, mode: cfg.mode, trials: cfg.trials, seed: cfg.seed, checks })
}

/// Constant tuple `c` at `1/2` must be rejected as singular.
pub fn half_is_singular(n: usize) -> bool {
    let x = CornerInvariants::<Rational>::constant(n, rational(1, 2)).expect("n >= 2");
    matches!(t3_coords_forward(&x), Err(Error::SingularOrbitPoint { .. }))
        && matches!(t3_coords_inverse(&x), Err(Error::SingularOrbitPoint { .. }))
}

//! Grid suites behind the `verify` and `tails` commands.

use rayon::prelude::*;
use serde::Serialize;

use crate::check::{Check, SLACK};
use crate::error::Result;
use crate::nef::{linspace, BaseDistribution, Kind, NefFamily};
use crate::scc::{dominance_grid, DominancePoint, StretchCertificate, SubgaussianEnvelope};
use crate::tails::{
    certify_tail, certify_tilted_tails, mgf_from_tail_bound, tilt_identity_residual, tilted_cgf_quadratic_bound,
    verify_tilted_tails, verify_variance_lower_bound, Side,
};

/// Fraction of each tail rate covered by the default grid.
pub const DEFAULT_GRID_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }

    /// `[-0.9 c2, 0.9 c1]`, inside the certificate's range.
    pub fn default_for(cert: &StretchCertificate<f64>, n: usize) -> Self {
        Grid {
            lo: -DEFAULT_GRID_FRACTION * cert.tail.c2,
            hi: DEFAULT_GRID_FRACTION * cert.tail.c1,
            n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgaussianReport {
    pub envelope: SubgaussianEnvelope<f64>,
    /// The envelope takes the tail scale for the unnamed appendix constant and reuses the
    /// subexponential variance lower bound.
    pub interpretation: &'static str,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub certificate: StretchCertificate<f64>,
    pub grid: Grid,
    pub inflate: f64,
    pub points: Vec<DominancePoint<f64>>,
    pub violations: usize,
    /// Largest `ratio / bound` seen on the grid.
    pub worst_fraction: f64,
    pub first_violation: Option<DominancePoint<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgaussian: Option<SubgaussianReport>,
    pub ok: bool,
}

/// Dominance of the stretch bound over the exact ratio on `grid`; `inflate` scales the bound.
pub fn verify_suite(
    base: &BaseDistribution<f64>,
    rates: Option<(f64, f64)>,
    grid: Option<Grid>,
    n: usize,
    inflate: f64,
) -> Result<VerifyReport> {
    let cert = StretchCertificate::build(base, rates)?;
    let grid = grid.unwrap_or_else(|| Grid::default_for(&cert, n));
    let points = dominance_grid(base, &cert, &grid.points(), inflate)?;
    let violations = points.iter().filter(|p| !p.ok).count();
    let worst_fraction = points.iter().map(|p| p.ratio / p.bound).fold(0.0, f64::max);
    let subgaussian = match base.kind() {
        Kind::Gaussian { sigma } => {
            let envelope = SubgaussianEnvelope::new(*sigma, &cert.witness)?;
            let violations = points.iter().filter(|p| envelope.value(p.u) * inflate < p.ratio).count();
            Some(SubgaussianReport {
                envelope,
                interpretation: "tail scale C stands in for the second appendix constant; variance floor from the subexponential lemma",
                violations,
            })
        }
        _ => None,
    };
    let ok = violations == 0 && subgaussian.as_ref().is_none_or(|s| s.violations == 0);
    Ok(VerifyReport {
        certificate: cert,
        grid,
        inflate,
        first_violation: points.iter().find(|p| !p.ok).copied(),
        points,
        violations,
        worst_fraction,
        subgaussian,
        ok,
    })
}

/// Outcome of one lemma over its grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCertificate {
    pub lemma: &'static str,
    pub checks: usize,
    /// Largest `rhs - lhs`.
    pub max_slack: f64,
    /// Smallest `rhs - lhs`; below `-1e-10` is a violation.
    pub min_slack: f64,
    pub violations: usize,
    pub ok: bool,
}

impl LemmaCertificate {
    fn from_checks(lemma: &'static str, checks: &[Check<f64>]) -> Self {
        let slacks = checks.iter().map(|c| c.slack());
        let max_slack = slacks.clone().fold(f64::NEG_INFINITY, f64::max);
        let min_slack = slacks.fold(f64::INFINITY, f64::min);
        let violations = checks.iter().filter(|c| !c.ok).count();
        LemmaCertificate {
            lemma,
            checks: checks.len(),
            max_slack,
            min_slack,
            violations,
            ok: violations == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailsReport {
    pub certificate: StretchCertificate<f64>,
    pub grid: Grid,
    /// Supremum of the exact ratio on the grid, used for the quadratic CGF bound.
    pub stretch_sup: f64,
    pub lemmas: Vec<LemmaCertificate>,
    pub ok: bool,
}

/// Deviation levels `t` for the tail checks, scaled to the slower tail rate.
pub fn tail_levels(cert: &StretchCertificate<f64>) -> Vec<f64> {
    let rate = cert.tail.c1.min(cert.tail.c2);
    linspace(0.0, 40.0 / rate, 41)
}

fn par_checks(us: &[f64], f: impl Fn(f64) -> Result<Vec<Check<f64>>> + Sync) -> Result<Vec<Check<f64>>> {
    let parts: Result<Vec<Vec<Check<f64>>>> = us.par_iter().map(|&u| f(u)).collect();
    Ok(parts?.into_iter().flatten().collect())
}

/// Every tail and MGF lemma of the base on `grid`, with additive slack `1e-10`.
pub fn tails_suite(base: &BaseDistribution<f64>, rates: Option<(f64, f64)>, grid: Option<Grid>, n: usize) -> Result<TailsReport> {
    let cert = StretchCertificate::build(base, rates)?;
    let grid = grid.unwrap_or_else(|| Grid::default_for(&cert, n));
    let tail = cert.tail;
    let us = grid.points();
    let ts = tail_levels(&cert);
    let centered = base.centered()?;
    let reflected = centered.reflected();
    let cert_checks = |c: &crate::tails::TailCertificate<f64>| Check {
        lhs: 0.0,
        rhs: c.min_slack,
        ok: c.ok,
    };
    let mut lemmas = Vec::new();

    let right = certify_tail(base, Side::Right, tail.c1, tail.scale1, &ts)?;
    let left = certify_tail(base, Side::Left, tail.c2, tail.scale2, &ts)?;
    let mut mgf_side = Vec::new();
    for lam in linspace(0.0, DEFAULT_GRID_FRACTION * tail.c1, n.max(2)) {
        mgf_side.push(Check::le_default(centered.mgf(lam)?, mgf_from_tail_bound(tail.c1, tail.scale1, lam)?));
    }
    for lam in linspace(0.0, DEFAULT_GRID_FRACTION * tail.c2, n.max(2)) {
        mgf_side.push(Check::le_default(reflected.mgf(lam)?, mgf_from_tail_bound(tail.c2, tail.scale2, lam)?));
    }
    let mut ce = LemmaCertificate::from_checks("subexponential_mgf_to_tail", &[cert_checks(&right), cert_checks(&left)]);
    ce.max_slack = right.max_slack.max(left.max_slack);
    lemmas.push(ce);
    lemmas.push(LemmaCertificate::from_checks("subexponential_tail_to_mgf", &mgf_side));

    let flipped = tail.reflected();
    let tilted = par_checks(&us, |u| {
        let (b, tc, v) = if u >= 0.0 { (base.clone(), tail, u) } else { (base.reflected(), flipped, -u) };
        let mut out = Vec::new();
        for &t in &ts {
            let c = verify_tilted_tails(&b, &tc, v, t)?;
            out.extend([c.right, c.left]);
            if t == 0.0 {
                out.push(c.mean);
                out.push(Check::le_default(0.0, c.mean.lhs));
            }
        }
        Ok(out)
    })?;
    lemmas.push(LemmaCertificate::from_checks("tilted_tail_and_mean_bounds", &tilted));

    let variance = par_checks(&us, |u| {
        Ok(vec![if u >= 0.0 {
            verify_variance_lower_bound(base, &cert.witness, u)?
        } else {
            verify_variance_lower_bound(&base.reflected(), &cert.witness_reflected, -u)?
        }])
    })?;
    lemmas.push(LemmaCertificate::from_checks("variance_lower_bound", &variance));

    let family = NefFamily::new(base.clone(), grid.lo, grid.hi)?;
    let ratios: Result<Vec<f64>> = us.par_iter().map(|&u| base.gamma_ratio(u)).collect();
    let stretch_sup = ratios?.into_iter().fold(0.0, f64::max);
    let (dlo, dhi) = base.domain();
    let radius = if stretch_sup > 0.0 { 2f64.ln() / stretch_sup } else { 1.0 };
    // Stay strictly inside both constraints on s.
    let s_lo = (-radius).max(0.99 * (dlo - grid.lo));
    let s_hi = radius.min(0.99 * (dhi - grid.hi));
    let quad = if s_lo < s_hi {
        let ss = linspace(s_lo, s_hi, 21);
        par_checks(&us, |u| ss.iter().map(|&s| tilted_cgf_quadratic_bound(&family, stretch_sup, u, s)).collect())?
    } else {
        Vec::new()
    };
    lemmas.push(LemmaCertificate::from_checks("tilted_cgf_quadratic_bound", &quad));

    let identity = par_checks(&us, |u| {
        let room = (dhi - u).min(u - dlo);
        let eps = (0.5 * room).min(0.5);
        let r = tilt_identity_residual(base, u, eps)?;
        Ok(vec![
            Check::le(r, 0.0, SLACK),
            certify_tilted_tails(base, u, eps, &ts)?,
        ])
    })?;
    lemmas.push(LemmaCertificate::from_checks("tilt_identity", &identity));

    let ok = lemmas.iter().all(|l| l.ok);
    Ok(TailsReport {
        certificate: cert,
        grid,
        stretch_sup,
        lemmas,
        ok,
    })
}

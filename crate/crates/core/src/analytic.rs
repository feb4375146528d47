//! Double-precision lattice sums for `℘`, `℘′`, `ζ`, the quasi-periods and
//! weight-1 division values, used to cross-check the algebraic slopes.
//!
//! Sums run over `ω = m + nτ` with `|ω| ≤ R`. Lattice points are grouped into
//! max-norm shells. Each shell is summed on its own, then the shells are
//! combined by a pairwise tree sum, so results do not depend on thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const DEFAULT_RADIUS: f64 = 200.0;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatticeConfig {
    #[serde(serialize_with = "ser_complex")]
    pub tau: Complex64,
    pub level: u32,
    pub radius: f64,
    pub tol: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl LatticeConfig {
    pub fn new(tau: Complex64, level: u32, radius: f64, tol: f64) -> Result<LatticeConfig> {
        // Written to reject NaN as well.
        let valid = tau.im > 0.0 && radius >= 10.0 && tol > 0.0 && level > 0;
        if !valid {
            return Err(Error::PreconditionViolation(format!(
                "need Im(tau) > 0, R >= 10, tol > 0, level >= 1 (got tau = {tau}, R = {radius}, tol = {tol})"
            )));
        }
        Ok(LatticeConfig {
            tau,
            level,
            radius,
            tol,
        })
    }

    pub fn with_radius(&self, radius: f64) -> Result<LatticeConfig> {
        LatticeConfig::new(self.tau, self.level, radius, self.tol)
    }

    /// The division point `(iτ + j)/ℓ`.
    pub fn division_point(&self, i: i64, j: i64) -> Complex64 {
        (self.tau * i as f64 + j as f64) / self.level as f64
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn lattice_distance(&self, z: Complex64) -> f64 {
        let n0 = (z.im / self.tau.im).round();
        let mut best = f64::INFINITY;
        for dn in -1..=1 {
            let n = n0 + dn as f64;
            let m0 = (z - self.tau * n).re.round();
            for dm in -1..=1 {
                best = best.min((z - self.tau * n - (m0 + dm as f64)).norm());
            }
        }
        best
    }

    /// Nonzero lattice points with `|ω| ≤ R`, shell by shell.
    fn shells(&self) -> Vec<Vec<Complex64>> {
        let r = self.radius;
        let nmax = (r / self.tau.im).ceil() as i64;
        let mmax = (r + nmax as f64 * self.tau.re.abs()).ceil() as i64;
        let kmax = nmax.max(mmax);
        let mut shells = vec![Vec::new(); kmax as usize + 1];
        for n in -nmax..=nmax {
            for m in -mmax..=mmax {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = self.tau * n as f64 + m as f64;
                if w.norm() <= r {
                    shells[m.abs().max(n.abs()) as usize].push(w);
                }
            }
        }
        shells.retain(|s| !s.is_empty());
        shells
    }

    fn lattice_sum(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Complex64 {
        let parts: Vec<Complex64> = self
            .shells()
            .par_iter()
            .map(|s| s.iter().map(|&w| f(w)).sum())
            .collect();
        tree_sum(&parts)
    }

    /// `Σ_{|ω|>R} |ω|^{-3}`, from the lattice density `1/Im τ`.
    fn cubic_tail(&self) -> f64 {
        2.0 * PI / (self.tau.im * self.radius)
    }
}

fn tree_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => tree_sum(&v[..n / 2]) + tree_sum(&v[n / 2..]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeierstrassValues {
    pub p: Complex64,
    pub dp: Complex64,
    pub zeta: Complex64,
    /// Absolute bound on the truncation error of `ζ`, ignoring cancellation.
    pub tail: f64,
}

pub fn weierstrass_functions(cfg: &LatticeConfig, z: Complex64) -> Result<WeierstrassValues> {
    if cfg.lattice_distance(z) < cfg.tol {
        return Err(Error::PoleProximity);
    }
    // One pass for all three sums.
    let parts: Vec<[Complex64; 3]> = cfg
        .shells()
        .par_iter()
        .map(|s| {
            let mut acc = [Complex64::new(0.0, 0.0); 3];
            for &w in s {
                let d = z - w;
                let w2 = w * w;
                acc[0] += 1.0 / (d * d) - 1.0 / w2;
                acc[1] += 1.0 / (d * d * d);
                acc[2] += z * z / (d * w2);
            }
            acc
        })
        .collect();
    let col = |k: usize| tree_sum(&parts.iter().map(|a| a[k]).collect::<Vec<_>>());
    let z2 = z * z;
    Ok(WeierstrassValues {
        p: 1.0 / z2 + col(0),
        dp: -2.0 * (1.0 / (z2 * z) + col(1)),
        zeta: 1.0 / z + col(2),
        tail: z.norm_sqr() * cfg.cubic_tail(),
    })
}

/// `(a, b) = (−15 Σ' ω⁻⁴, −35 Σ' ω⁻⁶)`, so that `(℘′/2)² = ℘³ + a℘ + b`.
pub fn curve_coefficients(cfg: &LatticeConfig) -> (Complex64, Complex64) {
    let g4 = cfg.lattice_sum(|w| w.powi(-4));
    let g6 = cfg.lattice_sum(|w| w.powi(-6));
    (-15.0 * g4, -35.0 * g6)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticReport {
    pub quantity: String,
    pub radius: f64,
    pub truncation: f64,
    pub residual: f64,
}

impl AnalyticReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.residual < tol
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain fields")
    }
}

/// Residual of `(℘′/2)² − (℘³ + a℘ + b)` at `z`.
pub fn check_curve_equation(cfg: &LatticeConfig, z: Complex64) -> Result<AnalyticReport> {
    let v = weierstrass_functions(cfg, z)?;
    let (a, b) = curve_coefficients(cfg);
    let y = v.dp / 2.0;
    Ok(AnalyticReport {
        quantity: "curve equation".into(),
        radius: cfg.radius,
        truncation: v.tail,
        residual: (y * y - (v.p * v.p * v.p + a * v.p + b)).norm(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiPeriods {
    pub eta1: Complex64,
    pub eta2: Complex64,
    /// `|2η₁τ − 2η₂ − 2πi|`.
    pub legendre_residual: f64,
}

/// A probe point away from the lattice and from half-periods.
pub const PROBE: (f64, f64) = (0.1234, 0.2718);

pub fn quasi_periods_at(cfg: &LatticeConfig, z: Complex64) -> Result<QuasiPeriods> {
    let z0 = weierstrass_functions(cfg, z)?.zeta;
    let z1 = weierstrass_functions(cfg, z + 1.0)?.zeta;
    let zt = weierstrass_functions(cfg, z + cfg.tau)?.zeta;
    let eta1 = (z1 - z0) / 2.0;
    let eta2 = (zt - z0) / 2.0;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    Ok(QuasiPeriods {
        eta1,
        eta2,
        legendre_residual: (2.0 * eta1 * cfg.tau - 2.0 * eta2 - two_pi_i).norm(),
    })
}

pub fn quasi_periods(cfg: &LatticeConfig) -> Result<QuasiPeriods> {
    quasi_periods_at(cfg, Complex64::new(PROBE.0, 0.0) + cfg.tau * PROBE.1)
}

/// `E₁(τ, (iτ+j)/ℓ) = ζ(α) − (i/ℓ)·2η₂ − (j/ℓ)·2η₁`.
pub fn eisenstein_weight1(cfg: &LatticeConfig, i: i64, j: i64) -> Result<Complex64> {
    let eta = quasi_periods(cfg)?;
    eisenstein_weight1_with(cfg, &eta, i, j)
}

fn eisenstein_weight1_with(
    cfg: &LatticeConfig,
    eta: &QuasiPeriods,
    i: i64,
    j: i64,
) -> Result<Complex64> {
    let l = cfg.level as i64;
    if i.rem_euclid(l) == 0 && j.rem_euclid(l) == 0 {
        return Err(Error::ZeroTorsionIndex);
    }
    let z = weierstrass_functions(cfg, cfg.division_point(i, j))?.zeta;
    let lf = l as f64;
    Ok(z - (i as f64 / lf) * 2.0 * eta.eta2 - (j as f64 / lf) * 2.0 * eta.eta1)
}

/// All `E₁` values on nonzero division points, keyed by `(i, j)` in `[0, ℓ)²`.
pub fn division_values(cfg: &LatticeConfig) -> Result<Vec<((i64, i64), Complex64)>> {
    let eta = quasi_periods(cfg)?;
    let l = cfg.level as i64;
    (0..l)
        .flat_map(|i| (0..l).map(move |j| (i, j)))
        .filter(|&(i, j)| i != 0 || j != 0)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(i, j)| Ok(((i, j), eisenstein_weight1_with(cfg, &eta, i, j)?)))
        .collect()
}

/// Residual of `−½(℘′(α)−℘′(β))/(℘(α)−℘(β)) = ζ(α)+ζ(β)+ζ(γ)` with `γ = −α−β`.
pub fn check_slope_formula(
    cfg: &LatticeConfig,
    alpha: Complex64,
    beta: Complex64,
) -> Result<AnalyticReport> {
    let gamma = -alpha - beta;
    let near = |z: Complex64| cfg.lattice_distance(z) < cfg.tol;
    if near(alpha) || near(beta) || near(gamma) || near(alpha - beta) || near(alpha + beta) {
        return Err(Error::DegenerateTriple);
    }
    let (a, b, g) = (
        weierstrass_functions(cfg, alpha)?,
        weierstrass_functions(cfg, beta)?,
        weierstrass_functions(cfg, gamma)?,
    );
    let lhs = -0.5 * (a.dp - b.dp) / (a.p - b.p);
    Ok(AnalyticReport {
        quantity: "chord slope vs zeta sum".into(),
        radius: cfg.radius,
        truncation: a.tail + b.tail + g.tail,
        residual: (lhs - (a.zeta + b.zeta + g.zeta)).norm(),
    })
}

/// For every pair of nonzero division points `P ≠ ±Q` with `P⊕Q ≠ O`, the
/// chord slope through `(℘, ℘′/2)` against `−(E₁(P) + E₁(Q) + E₁(⊖(P⊕Q)))`.
/// Reports the largest residual.
pub fn check_division_slopes(cfg: &LatticeConfig) -> Result<AnalyticReport> {
    let l = cfg.level as i64;
    let e1 = division_values(cfg)?;
    let lookup = |i: i64, j: i64| {
        e1.iter()
            .find(|(k, _)| *k == (i.rem_euclid(l), j.rem_euclid(l)))
            .map(|(_, v)| *v)
    };
    let coords: Vec<((i64, i64), WeierstrassValues)> = e1
        .par_iter()
        .map(|&((i, j), _)| {
            Ok((
                (i, j),
                weierstrass_functions(cfg, cfg.division_point(i, j))?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for &((pi, pj), vp) in &coords {
        for &((qi, qj), vq) in &coords {
            let same = (pi - qi).rem_euclid(l) == 0 && (pj - qj).rem_euclid(l) == 0;
            let opposite = (pi + qi).rem_euclid(l) == 0 && (pj + qj).rem_euclid(l) == 0;
            if same || opposite {
                continue;
            }
            let slope = (vp.dp - vq.dp) / (2.0 * (vp.p - vq.p));
            let sum = lookup(pi, pj).expect("nonzero")
                + lookup(qi, qj).expect("nonzero")
                + lookup(-pi - qi, -pj - qj).expect("nonzero");
            worst = worst.max((slope + sum).norm());
            tail = tail.max(vp.tail + vq.tail);
        }
    }
    Ok(AnalyticReport {
        quantity: format!("division slopes, level {l}"),
        radius: cfg.radius,
        truncation: tail,
        residual: worst,
    })
}

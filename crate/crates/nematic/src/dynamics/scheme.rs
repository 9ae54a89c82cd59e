//! Exponential time differencing schemes behind a common interface.
//!
//! Every scheme advances a spectral state `u_hat` of one or more component
//! planes under `du/dt = L u + N(u, t)` with a diagonal linear symbol
//! `L = -(|k|^2 + shift)` applied exactly. Schemes are looked up by name, so
//! the integrator is chosen at runtime from config.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Per-mode exponential coefficients for one `(symbol, dt)` pair.
///
/// `e = exp(L dt)`, `p1 = (e - 1)/L`, `p2 = (e - 1 - L dt)/(L^2 dt)`,
/// with series fallbacks near `L dt = 0`.
pub struct EtdTables {
    pub e: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub dt: f64,
}

fn phi_coeffs(l: f64, dt: f64) -> (f64, f64, f64) {
    let z = l * dt;
    let ez = z.exp();
    if z.abs() < 1e-4 {
        let p1 = dt * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
        let p2 = dt * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
        (ez, p1, p2)
    } else {
        (ez, (ez - 1.0) / l, (ez - 1.0 - z) / (l * l * dt))
    }
}

impl EtdTables {
    pub fn build(k2: &[f64], shift: f64, dt: f64) -> Self {
        let mut e = Vec::with_capacity(k2.len());
        let mut p1 = Vec::with_capacity(k2.len());
        let mut p2 = Vec::with_capacity(k2.len());
        for &ksq in k2 {
            let (a, b, c) = phi_coeffs(-(ksq + shift), dt);
            e.push(a);
            p1.push(b);
            p2.push(c);
        }
        Self { e, p1, p2, dt }
    }
}

/// Evaluator supplied by the engine: maps a spectral state and an absolute
/// time to the spectral transform of the nonlinearity.
pub type SpectralEval<'a> = dyn FnMut(&[Vec<Complex64>], f64) -> Vec<Vec<Complex64>> + 'a;

pub trait TimeScheme: Sync {
    fn name(&self) -> &'static str;

    /// Nonlinearity evaluations per step (cost model for planning).
    fn evals_per_step(&self) -> usize;

    /// Advance `state` from `time` to `time + tables.dt` in place.
    fn step(
        &self,
        tables: &EtdTables,
        state: &mut Vec<Vec<Complex64>>,
        time: f64,
        eval: &mut SpectralEval,
    );
}

struct Etd1;

impl TimeScheme for Etd1 {
    fn name(&self) -> &'static str {
        "etd1"
    }

    fn evals_per_step(&self) -> usize {
        1
    }

    fn step(
        &self,
        tab: &EtdTables,
        state: &mut Vec<Vec<Complex64>>,
        time: f64,
        eval: &mut SpectralEval,
    ) {
        let nhat = eval(state, time);
        for (plane, nplane) in state.iter_mut().zip(nhat.iter()) {
            for i in 0..plane.len() {
                plane[i] = plane[i] * tab.e[i] + nplane[i] * tab.p1[i];
            }
        }
    }
}

struct Etd2Rk;

impl TimeScheme for Etd2Rk {
    fn name(&self) -> &'static str {
        "etd2"
    }

    fn evals_per_step(&self) -> usize {
        2
    }

    fn step(
        &self,
        tab: &EtdTables,
        state: &mut Vec<Vec<Complex64>>,
        time: f64,
        eval: &mut SpectralEval,
    ) {
        let n0 = eval(state, time);
        // predictor = ETD1 step
        let mut astate = state.clone();
        for (plane, nplane) in astate.iter_mut().zip(n0.iter()) {
            for i in 0..plane.len() {
                plane[i] = plane[i] * tab.e[i] + nplane[i] * tab.p1[i];
            }
        }
        let n1 = eval(&astate, time + tab.dt);
        for c in 0..state.len() {
            for i in 0..state[c].len() {
                state[c][i] = astate[c][i] + (n1[c][i] - n0[c][i]) * tab.p2[i];
            }
        }
    }
}

static REGISTRY: &[&dyn TimeScheme] = &[&Etd1, &Etd2Rk];

pub fn scheme_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|s| s.name()).collect()
}

pub fn scheme_by_name(name: &str) -> Result<&'static dyn TimeScheme> {
    REGISTRY
        .iter()
        .find(|s| s.name() == name)
        .copied()
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown time scheme '{name}'; available: {}",
                scheme_names().join(", ")
            ))
        })
}

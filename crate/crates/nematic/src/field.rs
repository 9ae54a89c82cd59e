//! Periodic-grid fields on a truncated cube standing in for R^3, with the
//! model norms and the total energy functional.
//!
//! The cube has edge length `box_len`, is centred at the origin, and carries
//! `n` points per axis (`n` a power of two). Values are stored x-fastest.
//! The radial coordinate used by weighted norms is the distance from the box
//! centre, which for points of the fundamental cell is already the
//! minimum-image distance on the torus.

use crate::error::{Error, Result};
use crate::qtensor::{bulk_energy_density, reduced_potential, ModelParams, TracelessSym3};
use crate::spectral::{signed_mode, wavenumber_sq, Fft3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    box_len: f64,
}

impl GridSpec {
    pub fn new(n: usize, box_len: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Invalid(format!(
                "grid points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(box_len > 0.0) {
            return Err(Error::Invalid(format!("box_len must be positive, got {box_len}")));
        }
        Ok(Self { n, box_len })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    pub fn spacing(&self) -> f64 {
        self.box_len / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn site_count(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Coordinate of grid index `i` along one axis, measured from box centre.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.box_len + i as f64 * self.spacing()
    }

    /// Position of a flat index.
    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let (x, y, z) = self.unravel(idx);
        [self.coord(x), self.coord(y), self.coord(z)]
    }

    #[inline]
    pub fn flat(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.n * (y + self.n * z)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let x = idx % self.n;
        let y = (idx / self.n) % self.n;
        let z = idx / (self.n * self.n);
        (x, y, z)
    }

    /// Minimum-image distance of lattice offset `(dx, dy, dz)` in cells.
    pub fn offset_distance(&self, dx: usize, dy: usize, dz: usize) -> f64 {
        let h = self.spacing();
        let px = signed_mode(dx, self.n) as f64 * h;
        let py = signed_mode(dy, self.n) as f64 * h;
        let pz = signed_mode(dz, self.n) as f64 * h;
        (px * px + py * py + pz * pz).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    pub grid: GridSpec,
    pub comps: [Vec<f64>; 5],
    pub time_tag: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time_tag: f64,
}

impl TensorField {
    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.site_count();
        Self { grid, comps: std::array::from_fn(|_| vec![0.0; len]), time_tag: 0.0 }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> TracelessSym3) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.site_count() {
            out.set(idx, f(grid.position(idx)));
        }
        out
    }

    #[inline]
    pub fn at(&self, idx: usize) -> TracelessSym3 {
        TracelessSym3::new(
            self.comps[0][idx],
            self.comps[1][idx],
            self.comps[2][idx],
            self.comps[3][idx],
            self.comps[4][idx],
        )
    }

    #[inline]
    pub fn set(&mut self, idx: usize, q: TracelessSym3) {
        let c = q.components();
        for k in 0..5 {
            self.comps[k][idx] = c[k];
        }
    }

    /// Integral of the field over the box (componentwise quadrature).
    pub fn integral(&self) -> TracelessSym3 {
        let vol = self.grid.cell_volume();
        let sums: [f64; 5] =
            std::array::from_fn(|k| self.comps[k].iter().sum::<f64>() * vol);
        TracelessSym3::from_components(sums)
    }

    pub fn scale(&mut self, s: f64) {
        for c in self.comps.iter_mut() {
            for v in c.iter_mut() {
                *v *= s;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.site_count()], time_tag: 0.0 }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.site_count()).map(|idx| f(grid.position(idx))).collect();
        Self { grid, values, time_tag: 0.0 }
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Discrete L^p norm `(∫ (tr Q^2)^{p/2} dx)^{1/p}`; `p = infinity` gives the
/// max Frobenius norm over the grid.
pub fn lp_norm(f: &TensorField, p: f64) -> Result<f64> {
    lp_from_frob_sq(f.grid, (0..f.grid.site_count()).map(|i| f.at(i).frob_sq()), p)
}

/// Scalar-field analogue (tr Q^2 replaced by lambda^2).
pub fn lp_norm_scalar(f: &ScalarField, p: f64) -> Result<f64> {
    lp_from_frob_sq(f.grid, f.values.iter().map(|v| v * v), p)
}

fn lp_from_frob_sq(grid: GridSpec, frob_sq: impl Iterator<Item = f64>, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(frob_sq.fold(0.0f64, f64::max).sqrt());
    }
    if !(p >= 1.0) {
        return Err(Error::Invalid(format!("lp_norm requires p >= 1 or p = inf, got {p}")));
    }
    let vol = grid.cell_volume();
    let sum: f64 = frob_sq.map(|s| s.powf(0.5 * p)).sum();
    Ok((sum * vol).powf(1.0 / p))
}

/// Weighted sup norm `max (1 + |x|)^{8+delta} |Q(x)|` over the grid.
pub fn a_norm(f: &TensorField, delta: f64) -> f64 {
    let mut best = 0.0f64;
    for idx in 0..f.grid.site_count() {
        let p = f.grid.position(idx);
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let w = (1.0 + r).powf(8.0 + delta);
        best = best.max(w * f.at(idx).frob());
    }
    best
}

pub fn a_norm_scalar(f: &ScalarField, delta: f64) -> f64 {
    let mut best = 0.0f64;
    for idx in 0..f.grid.site_count() {
        let p = f.grid.position(idx);
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        best = best.max((1.0 + r).powf(8.0 + delta) * f.values[idx].abs());
    }
    best
}

/// Space-time weight `omega(x, t) = (1 + |x|/sqrt(t+1))^{4 + delta/2} (t+1)^2`.
pub fn x0_weight(x: [f64; 3], t: f64, delta: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let s = (t + 1.0).sqrt();
    (1.0 + r / s).powf(4.0 + 0.5 * delta) * (t + 1.0) * (t + 1.0)
}

/// Total Landau-de Gennes energy `∫ (1/2)|grad Q|^2 + f_B(Q) dx` with the
/// Dirichlet part evaluated spectrally (Parseval).
pub fn total_energy(f: &TensorField, p: &ModelParams) -> f64 {
    let fft = Fft3::new(f.grid.n());
    let mut scratch = fft.scratch();
    let k2 = wavenumber_sq(f.grid.n(), f.grid.box_len());
    let specs: Vec<_> = f.comps.iter().map(|c| fft.forward_real(c, &mut scratch)).collect();
    let mut dirichlet = 0.0;
    for (i, &ksq) in k2.iter().enumerate() {
        dirichlet += ksq * tensor_mode_weight(&specs, i);
    }
    dirichlet *= f.grid.cell_volume() / f.grid.site_count() as f64;
    let bulk: f64 = (0..f.grid.site_count())
        .map(|i| bulk_energy_density(&f.at(i), p))
        .sum::<f64>()
        * f.grid.cell_volume();
    0.5 * dirichlet + bulk
}

/// Energy of the uniaxial embedding of a scalar profile:
/// `∫ 3 |grad lambda|^2 + 6 V(lambda) dx`, nonincreasing along the scalar flow.
pub fn total_energy_scalar(f: &ScalarField, p: &ModelParams) -> f64 {
    let fft = Fft3::new(f.grid.n());
    let mut scratch = fft.scratch();
    let k2 = wavenumber_sq(f.grid.n(), f.grid.box_len());
    let spec = fft.forward_real(&f.values, &mut scratch);
    let mut dirichlet = 0.0;
    for (i, &ksq) in k2.iter().enumerate() {
        dirichlet += ksq * spec[i].norm_sqr();
    }
    dirichlet *= f.grid.cell_volume() / f.grid.site_count() as f64;
    let bulk: f64 =
        f.values.iter().map(|&l| reduced_potential(l, p)).sum::<f64>() * f.grid.cell_volume();
    3.0 * dirichlet + 6.0 * bulk
}

/// Frobenius quadratic form `|Q^(k)|^2` of one Fourier mode of the
/// 5-component representation; equals `tr(Q Q)` carried to spectral space.
#[inline]
pub fn tensor_mode_weight(specs: &[Vec<num_complex::Complex64>], i: usize) -> f64 {
    let f1 = specs[0][i];
    let f2 = specs[1][i];
    2.0 * f1.norm_sqr() + 2.0 * f2.norm_sqr() + 2.0 * (f1.conj() * f2).re
        + 2.0 * (specs[2][i].norm_sqr() + specs[3][i].norm_sqr() + specs[4][i].norm_sqr())
}

/// Periodic translation by an integer lattice vector (in cells).
pub fn shift_sample(f: &TensorField, r: [i64; 3]) -> TensorField {
    let mut out = TensorField::zeros(f.grid);
    out.time_tag = f.time_tag;
    let n = f.grid.n() as i64;
    let wrap = |v: i64| -> usize { v.rem_euclid(n) as usize };
    for z in 0..f.grid.n() {
        for y in 0..f.grid.n() {
            for x in 0..f.grid.n() {
                let src = f.grid.flat(
                    wrap(x as i64 + r[0]),
                    wrap(y as i64 + r[1]),
                    wrap(z as i64 + r[2]),
                );
                let dst = f.grid.flat(x, y, z);
                for k in 0..5 {
                    out.comps[k][dst] = f.comps[k][src];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtensor::make_uniaxial;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params_ref() -> ModelParams {
        ModelParams::new(1.0, 10.0, 1.0, 1.0, 0.25).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(7, 1.0).is_err());
        assert!(GridSpec::new(12, 1.0).is_err());
        assert!(GridSpec::new(8, 0.0).is_err());
        let g = GridSpec::new(16, 4.0).unwrap();
        assert!((g.spacing() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lp_norm_examples() {
        let grid = GridSpec::new(8, 2.0).unwrap(); // volume 8
        let zero = TensorField::zeros(grid);
        for &p in &[1.0, 2.0, f64::INFINITY] {
            assert_eq!(lp_norm(&zero, p).unwrap(), 0.0);
        }
        let mut f = TensorField::zeros(grid);
        for i in 0..grid.site_count() {
            f.set(i, make_uniaxial(1.0));
        }
        assert!((lp_norm(&f, 2.0).unwrap() - 48.0f64.sqrt()).abs() < 1e-12);
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 6.0f64.sqrt()).abs() < 1e-12);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn a_norm_examples() {
        let delta = 1.0;
        let grid = GridSpec::new(16, 8.0).unwrap();
        assert_eq!(a_norm(&TensorField::zeros(grid), delta), 0.0);
        // field shaped exactly to cancel the weight: a_norm recovers eta
        let eta = 0.37;
        let f = TensorField::from_fn(grid, |p| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            make_uniaxial(eta / (6.0f64.sqrt() * (1.0 + r).powf(8.0 + delta)))
        });
        assert!((a_norm(&f, delta) - eta).abs() < 1e-12);
        let mut g = f.clone();
        g.scale(2.0);
        assert!((a_norm(&g, delta) - 2.0 * eta).abs() < 1e-12);
    }

    #[test]
    fn x0_weight_examples() {
        assert_eq!(x0_weight([0.0; 3], 0.0, 1.0), 1.0);
        assert_eq!(x0_weight([0.0; 3], 3.0, 1.0), 16.0);
        let t = 5.0;
        let r = (t + 1.0f64).sqrt();
        let got = x0_weight([r, 0.0, 0.0], t, 2.0);
        assert!((got - 32.0 * (t + 1.0) * (t + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn energy_constant_field() {
        let p = params_ref();
        let grid = GridSpec::new(16, 4.0).unwrap();
        assert_eq!(total_energy(&TensorField::zeros(grid), &p), 0.0);
        let q0 = make_uniaxial(-0.8);
        let mut f = TensorField::zeros(grid);
        for i in 0..grid.site_count() {
            f.set(i, q0);
        }
        let expect = bulk_energy_density(&q0, &p) * grid.box_len().powi(3);
        let got = total_energy(&f, &p);
        assert!((got - expect).abs() < 1e-9 * (1.0 + expect.abs()), "{got} vs {expect}");
    }

    #[test]
    fn energy_single_mode_matches_parseval_oracle() {
        let p = params_ref();
        let grid = GridSpec::new(32, 5.0).unwrap();
        let l = grid.box_len();
        let eps = 1e-3;
        let f = TensorField::from_fn(grid, |x| {
            TracelessSym3::new(eps * (2.0 * PI * x[0] / l).sin(), 0.0, 0.0, 0.0, 0.0)
        });
        // |Q|^2 = 2 q11^2 for this shape, so the Dirichlet integral is
        // ∫ |grad Q|^2 = 2 eps^2 (2 pi/L)^2 ∫ cos^2 = eps^2 (2 pi/L)^2 L^3
        let expect = 0.5 * eps * eps * (2.0 * PI / l).powi(2) * l.powi(3);
        let bulk: f64 = (0..grid.site_count())
            .map(|i| bulk_energy_density(&f.at(i), &p))
            .sum::<f64>()
            * grid.cell_volume();
        let got = total_energy(&f, &p);
        assert!(
            ((got - bulk) - expect).abs() < 1e-12 * (1.0 + expect.abs()),
            "dirichlet {} vs {}",
            got - bulk,
            expect
        );
    }

    #[test]
    fn shift_identity_cases() {
        let grid = GridSpec::new(8, 2.0).unwrap();
        let f = TensorField::from_fn(grid, |x| {
            make_uniaxial((x[0] + 2.0 * x[1]).sin() + x[2])
        });
        assert_eq!(shift_sample(&f, [0, 0, 0]), f);
        assert_eq!(shift_sample(&f, [8, 0, 0]), f);
        let g = shift_sample(&shift_sample(&f, [3, -2, 5]), [-3, 2, -5]);
        assert_eq!(g, f);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn lp_monotone_under_domination(seed in 0u64..1000) {
            let grid = GridSpec::new(8, 2.0).unwrap();
            let f = TensorField::from_fn(grid, |x| {
                make_uniaxial(((x[0] * 7.3 + x[1] * 1.1 + seed as f64).sin()) * 0.5)
            });
            let mut g = f.clone();
            g.scale(1.5); // |f| <= |g| pointwise
            for &p in &[1.0, 2.0, 4.0, f64::INFINITY] {
                prop_assert!(lp_norm(&f, p).unwrap() <= lp_norm(&g, p).unwrap() + 1e-14);
            }
        }

        #[test]
        fn shift_preserves_norms(dx in -9i64..9, dy in -9i64..9, dz in -9i64..9) {
            let grid = GridSpec::new(8, 2.0).unwrap();
            let f = TensorField::from_fn(grid, |x| {
                TracelessSym3::new(x[0].sin(), x[1].cos(), x[2], x[0] * x[1], 0.3)
            });
            let s = shift_sample(&f, [dx, dy, dz]);
            for &p in &[1.0, 2.0, f64::INFINITY] {
                let a = lp_norm(&f, p).unwrap();
                let b = lp_norm(&s, p).unwrap();
                prop_assert!((a - b).abs() < 1e-12 * (1.0 + a));
            }
        }
    }

    #[test]
    fn a_norm_dominates_sup_norm() {
        let grid = GridSpec::new(8, 4.0).unwrap();
        let f = TensorField::from_fn(grid, |x| make_uniaxial(0.01 * (x[0] * x[1]).cos()));
        // weight >= 1 everywhere, so a_norm < eta forces sup norm < eta
        let an = a_norm(&f, 1.0);
        assert!(lp_norm(&f, f64::INFINITY).unwrap() <= an + 1e-15);
    }

    #[test]
    fn energy_lower_bound_sanity() {
        let p = params_ref();
        let grid = GridSpec::new(8, 2.0).unwrap();
        let f = TensorField::from_fn(grid, |x| make_uniaxial(-1.0 + 0.3 * x[0].sin()));
        let min_bulk = (0..grid.site_count())
            .map(|i| bulk_energy_density(&f.at(i), &p))
            .fold(f64::INFINITY, f64::min);
        assert!(total_energy(&f, &p) >= min_bulk * grid.box_len().powi(3) - 1e-9);
    }
}

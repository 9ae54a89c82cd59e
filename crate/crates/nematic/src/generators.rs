//! Name-keyed registry of initial-condition families.
//!
//! A generator spec is a one-line string, `name key=value key=value ...`,
//! e.g. `uniaxial_power_tail alpha=0.02 delta=1`. Specs come from config
//! files (ensemble members) or the CLI, get parsed against the registry, and
//! produce scalar profiles; tensor data is the uniaxial embedding
//! `diag(l, l, -2l)` of the scalar profile.

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField, TensorField};
use crate::heatflow::heat_kernel_r2;
use crate::qtensor::make_uniaxial;
use std::collections::BTreeMap;

/// A parsed, ready-to-sample initial condition.
pub trait InitialData: Sync {
    /// Canonical spec string (name plus all arguments, sorted).
    fn describe(&self) -> String;
    fn profile(&self, x: [f64; 3]) -> f64;

    fn scalar(&self, grid: GridSpec) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.profile(x))
    }

    fn tensor(&self, grid: GridSpec) -> TensorField {
        TensorField::from_fn(grid, |x| make_uniaxial(self.profile(x)))
    }
}

trait GeneratorFamily: Sync {
    fn name(&self) -> &'static str;
    /// (key, default); `None` default means the key is required.
    fn keys(&self) -> &'static [(&'static str, Option<f64>)];
    fn build(&self, args: &BTreeMap<String, f64>) -> Box<dyn InitialData>;
}

fn canon(name: &str, args: &BTreeMap<String, f64>) -> String {
    let mut s = name.to_string();
    for (k, v) in args {
        s.push_str(&format!(" {k}={v}"));
    }
    s
}

macro_rules! family {
    ($fam:ident, $name:literal, $keys:expr, $data:ident { $($field:ident),* }, $profile:expr) => {
        struct $fam;

        struct $data {
            spec: String,
            $($field: f64,)*
        }

        impl GeneratorFamily for $fam {
            fn name(&self) -> &'static str {
                $name
            }

            fn keys(&self) -> &'static [(&'static str, Option<f64>)] {
                $keys
            }

            fn build(&self, args: &BTreeMap<String, f64>) -> Box<dyn InitialData> {
                Box::new($data {
                    spec: canon($name, args),
                    $($field: args[stringify!($field)],)*
                })
            }
        }

        impl InitialData for $data {
            fn describe(&self) -> String {
                self.spec.clone()
            }

            fn profile(&self, x: [f64; 3]) -> f64 {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                #[allow(unused_variables)]
                let this = self;
                let f: fn(&$data, [f64; 3], f64) -> f64 = $profile;
                f(this, x, r2)
            }
        }
    };
}

family!(ZeroFamily, "zero", &[], ZeroData {}, |_, _, _| 0.0);

// the slowly-decaying uniaxial family l(x) = -alpha (1+|x|)^{-(8+delta)}
family!(
    PowerTailFamily,
    "uniaxial_power_tail",
    &[("alpha", None), ("delta", None)],
    PowerTailData { alpha, delta },
    |d, _, r2| -d.alpha / (1.0 + r2.sqrt()).powf(8.0 + d.delta)
);

// amp * Phi(x, t0): Gaussian heat-kernel profile
family!(
    GaussianFamily,
    "gaussian",
    &[("amp", None), ("t0", Some(1.0))],
    GaussianData { amp, t0 },
    |d, _, r2| d.amp * heat_kernel_r2(r2, d.t0)
);

// smoothed plateau level * (1 - tanh((|x| - radius)/width))/2
family!(
    PlateauFamily,
    "plateau",
    &[("radius", None), ("level", None), ("width", Some(1.0))],
    PlateauData { radius, level, width },
    |d, _, r2| d.level * 0.5 * (1.0 - ((r2.sqrt() - d.radius) / d.width).tanh())
);

// odd dipole profile amp * x1 exp(-|x|^2/scale): zero mean, nonzero moment
family!(
    OddMomentFamily,
    "odd_moment",
    &[("amp", None), ("scale", Some(8.0))],
    OddMomentData { amp, scale },
    |d, x, r2| d.amp * x[0] * (-r2 / d.scale).exp()
);

static REGISTRY: &[&dyn GeneratorFamily] =
    &[&ZeroFamily, &PowerTailFamily, &GaussianFamily, &PlateauFamily, &OddMomentFamily];

pub fn generator_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|f| f.name()).collect()
}

/// Parse a one-line generator spec against the registry.
pub fn parse_generator(spec: &str) -> Result<Box<dyn InitialData>> {
    let mut tokens = spec.split_whitespace();
    let name = tokens
        .next()
        .ok_or_else(|| Error::Config("empty generator spec".into()))?;
    let family = REGISTRY.iter().find(|f| f.name() == name).ok_or_else(|| {
        Error::Config(format!(
            "unknown generator '{name}'; available: {}",
            generator_names().join(", ")
        ))
    })?;
    let mut args = BTreeMap::new();
    for tok in tokens {
        let (key, value) = tok.split_once('=').ok_or_else(|| {
            Error::Config(format!("generator '{name}': expected key=value, got '{tok}'"))
        })?;
        if !family.keys().iter().any(|(k, _)| *k == key) {
            return Err(Error::Config(format!(
                "generator '{name}' has no argument '{key}'; accepts: {}",
                family.keys().iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
            )));
        }
        let value: f64 = value.parse().map_err(|_| {
            Error::Config(format!("generator '{name}': '{key}' is not a number: '{value}'"))
        })?;
        if args.insert(key.to_string(), value).is_some() {
            return Err(Error::Config(format!("generator '{name}': duplicate argument '{key}'")));
        }
    }
    for (key, default) in family.keys() {
        if !args.contains_key(*key) {
            match default {
                Some(v) => {
                    args.insert(key.to_string(), *v);
                }
                None => {
                    return Err(Error::Config(format!(
                        "generator '{name}': missing required argument '{key}'"
                    )))
                }
            }
        }
    }
    Ok(family.build(&args))
}

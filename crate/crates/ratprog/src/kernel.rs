//! Synthetic kernel descriptions as JSON.
//!
//! ```json
//! {
//!   "name": "stencil",
//!   "params": ["N"],
//!   "noise_rel": 0.0,
//!   "design": { "N": [64, 128] },
//!   "constants": { "regs_per_thread": 24 },
//!   "metrics": {
//!     "total_blocks": {
//!       "num": [{ "coef": 1, "pow": { "N": 2 } }],
//!       "den": [{ "coef": 1, "pow": { "bx": 1, "by": 1 } }]
//!     }
//!   }
//! }
//! ```
//!
//! Metric functions range over the data parameters followed by `bx`, `by`,
//! `bz`. A missing `den` means 1.

use std::collections::BTreeMap;

use ratprog_core::datakit::SyntheticKernelSpec;
use ratprog_core::perfmodel::CONFIG_INPUTS;
use ratprog_core::polyfit::{Polynomial, RationalFunction};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The bundled tiled-stencil kernel over an `N x N` grid.
pub const STENCIL_KERNEL: &str = include_str!("../data/stencil_kernel.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    #[serde(default)]
    pub pow: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub num: Vec<Term>,
    #[serde(default)]
    pub den: Option<Vec<Term>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub name: String,
    pub params: Vec<String>,
    #[serde(default)]
    pub noise_rel: f64,
    pub design: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, MetricSpec>,
}

/// A parsed kernel file.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub spec: SyntheticKernelSpec,
    /// Data-parameter vectors, the Cartesian product of the design lists.
    pub design: Vec<Vec<i64>>,
}

fn polynomial(variables: &[String], terms: &[Term], metric: &str) -> std::result::Result<Polynomial, String> {
    let mut basis = Vec::with_capacity(terms.len());
    for t in terms {
        let mut exps = vec![0; variables.len()];
        for (var, &e) in &t.pow {
            let k = variables
                .iter()
                .position(|v| v == var)
                .ok_or_else(|| format!("metric `{metric}` uses unknown variable `{var}`"))?;
            exps[k] = e;
        }
        basis.push(exps);
    }
    Ok(Polynomial {
        variables: variables.to_vec(),
        basis,
        coefficients: terms.iter().map(|t| t.coef).collect(),
    })
}

pub fn parse_kernel(text: &str, origin: &str) -> Result<Kernel> {
    let file: KernelFile = serde_json::from_str(text).map_err(|e| Error::data(origin, e))?;
    let bad = |m: String| Error::data(origin, m);
    let mut variables = file.params.clone();
    variables.extend(CONFIG_INPUTS.iter().map(|s| s.to_string()));

    let mut ground_truth = BTreeMap::new();
    for (name, m) in &file.metrics {
        let num = polynomial(&variables, &m.num, name).map_err(bad)?;
        let den = match &m.den {
            Some(terms) => polynomial(&variables, terms, name).map_err(bad)?,
            None => Polynomial::constant(variables.clone(), 1.0),
        };
        let f = RationalFunction::new(num, den).map_err(|e| bad(format!("metric `{name}`: {e}")))?;
        ground_truth.insert(name.clone(), f);
    }
    if let Some(name) = file.constants.keys().find(|k| file.metrics.contains_key(*k)) {
        return Err(bad(format!("`{name}` is both a constant and a metric")));
    }

    let mut design: Vec<Vec<i64>> = vec![Vec::new()];
    for p in &file.params {
        let values = file
            .design
            .get(p)
            .filter(|v| !v.is_empty())
            .ok_or_else(|| bad(format!("design has no values for parameter `{p}`")))?;
        design = design
            .iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut d = prefix.clone();
                    d.push(v);
                    d
                })
            })
            .collect();
    }
    if let Some(extra) = file.design.keys().find(|k| !file.params.contains(k)) {
        return Err(bad(format!("design names `{extra}`, which is not a parameter")));
    }

    Ok(Kernel {
        spec: SyntheticKernelSpec {
            name: file.name,
            param_names: file.params,
            ground_truth,
            constants: file.constants,
            noise_rel: file.noise_rel,
        },
        design,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ratprog_core::perfmodel::LaunchConfig;

    #[test]
    fn bundled_stencil() {
        let k = parse_kernel(STENCIL_KERNEL, "bundled").unwrap();
        assert_eq!(k.design, [[64], [128], [256], [512]]);
        let p = (vec![256], LaunchConfig::new(16, 8, 1).unwrap());
        assert_eq!(k.spec.eval("total_blocks", &p).unwrap(), 512.0);
        assert_eq!(k.spec.eval("uncoal_mem_insts_per_thread", &p).unwrap(), 0.5);
        assert_eq!(k.spec.eval("regs_per_thread", &p).unwrap(), 24.0);
    }

    #[test]
    fn rejects_unknown_variables() {
        let text = r#"{"name":"k","params":["N"],"design":{"N":[1]},"metrics":{"m":{"num":[{"coef":1,"pow":{"M":1}}]}}}"#;
        let err = parse_kernel(text, "k.json").unwrap_err().to_string();
        assert!(err.contains("`M`"), "{err}");
    }
}

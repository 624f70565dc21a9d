//! TOML experiment configuration: named systems (generators or explicit
//! branch tables) and per-command parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::Primitive;
use crate::subcantor::CertifyTarget;
use crate::symbolic::SubshiftSpec;
use crate::system::{gauss_digits, middle_alpha, perturbed, two_ratio, CantorSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub struct PartDef {
    pub family: String,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDef {
    pub from: String,
    pub to: String,
    /// Outermost first.
    pub parts: Vec<PartDef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemDef {
    MiddleAlpha {
        name: String,
        alpha: f64,
    },
    TwoRatio {
        name: String,
        r1: f64,
        r2: f64,
    },
    GaussDigits {
        name: String,
        digits: Vec<u32>,
    },
    Perturbed {
        name: String,
        base: String,
        eps: f64,
    },
    Explicit {
        name: String,
        alphabet: Vec<String>,
        transitions: Vec<(String, String)>,
        base: Vec<(f64, f64)>,
        branches: Vec<BranchDef>,
    },
}

impl SystemDef {
    pub fn name(&self) -> &str {
        match self {
            SystemDef::MiddleAlpha { name, .. }
            | SystemDef::TwoRatio { name, .. }
            | SystemDef::GaussDigits { name, .. }
            | SystemDef::Perturbed { name, .. }
            | SystemDef::Explicit { name, .. } => name,
        }
    }

    /// Writes a system out as an explicit branch table.
    pub fn explicit(name: &str, system: &CantorSystem) -> Self {
        let spec = system.spec();
        let branches = spec
            .transitions()
            .into_iter()
            .map(|(a0, a1)| BranchDef {
                from: spec.name(a0).to_string(),
                to: spec.name(a1).to_string(),
                parts: system
                    .branch(a0, a1)
                    .parts()
                    .iter()
                    .map(|p| {
                        let (tag, coeffs) = p.tag_and_coeffs();
                        PartDef {
                            family: tag.to_string(),
                            coeffs,
                        }
                    })
                    .collect(),
            })
            .collect();
        SystemDef::Explicit {
            name: name.to_string(),
            alphabet: spec.names().to_vec(),
            transitions: spec
                .transitions()
                .into_iter()
                .map(|(a, b)| (spec.name(a).to_string(), spec.name(b).to_string()))
                .collect(),
            base: system.base_intervals().iter().map(|i| (i.lo, i.hi)).collect(),
            branches,
        }
    }
}

/// A list of scales, either explicit or `base^{−k}` for `k` in `from..=to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scales {
    List(Vec<f64>),
    Powers { base: f64, from: i32, to: i32 },
}

impl Scales {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Scales::List(ref v) => v.clone(),
            Scales::Powers { base, from, to } => (from..=to).map(|k| base.powi(-k)).collect(),
        }
    }
}

/// An `s`-grid: explicit values or `per_sign` log-spaced points per sign in `J_R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SGrid {
    List(Vec<f64>),
    Window { r: f64, per_sign: usize },
}

impl SGrid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            SGrid::List(ref v) => v.clone(),
            SGrid::Window { r, per_sign } => crate::scale_space::log_grid(r, per_sign),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimConfig {
    pub systems: Vec<String>,
    pub depths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitGeomConfig {
    pub system: String,
    /// Backward tail, oldest symbol first.
    pub tail: Vec<usize>,
    pub depths: Vec<usize>,
    #[serde(default = "default_step")]
    pub step: usize,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    pub tail0: Option<Vec<usize>>,
    pub tail1: Option<Vec<usize>>,
    pub h_depth: Option<usize>,
    #[serde(default)]
    pub periodic_words: Vec<Vec<usize>>,
}

fn default_step() -> usize {
    2
}

fn default_grid() -> usize {
    101
}

fn default_c0() -> f64 {
    2.0
}

fn default_r() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarstrandConfig {
    pub pair: (String, String),
    pub rho: Scales,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_r")]
    pub r: f64,
    /// `s` values at which `N_ρ(s)` is tabulated.
    #[serde(default)]
    pub s_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFamily {
    LinearProjection,
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumScanConfig {
    pub pair: (String, String),
    pub family: MapFamily,
    pub s_grid: SGrid,
    pub deltas: Scales,
    /// Expected slope; defaults to `min(1, d + d′)` from the brackets.
    pub expected: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_bracket_depth")]
    pub bracket_depth: usize,
}

fn default_tolerance() -> f64 {
    0.1
}

fn default_bracket_depth() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractConfig {
    pub system: String,
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub target: CertifyTarget,
    #[serde(default = "default_bracket_depth")]
    pub bracket_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceConfig {
    pub pair: (String, String),
    pub rho: f64,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_c0")]
    pub c0: f64,
    /// Calibrated from the grid when absent.
    pub c5: Option<f64>,
    #[serde(default = "default_per_sign")]
    pub per_sign: usize,
    #[serde(default = "default_tail_len")]
    pub tail_len: usize,
    #[serde(default = "default_bracket_depth")]
    pub bracket_depth: usize,
    /// Hölder exponent, reported only.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_m() -> usize {
    3
}

fn default_per_sign() -> usize {
    8
}

fn default_tail_len() -> usize {
    16
}

fn default_alpha() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, rename = "system")]
    pub systems: Vec<SystemDef>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    pub output: Option<String>,
    pub dim: Option<DimConfig>,
    pub limitgeom: Option<LimitGeomConfig>,
    pub marstrand: Option<MarstrandConfig>,
    pub sumscan: Option<SumScanConfig>,
    pub extract: Option<ExtractConfig>,
    pub recurrence: Option<RecurrenceConfig>,
}

fn default_budget() -> usize {
    1 << 22
}

impl ExperimentConfig {
    /// Parses TOML; syntax and type errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Builds every named system, in definition order.
    pub fn build_systems(&self) -> Result<BTreeMap<String, CantorSystem>> {
        let mut out: BTreeMap<String, CantorSystem> = BTreeMap::new();
        for (i, def) in self.systems.iter().enumerate() {
            let field = format!("system[{i}] `{}`", def.name());
            if out.contains_key(def.name()) {
                return Err(Error::Config(format!("{field}: duplicate name")));
            }
            let built = build_system(def, &out).map_err(|e| Error::Config(format!("{field}: {e}")))?;
            out.insert(def.name().to_string(), built.with_name(def.name()));
        }
        Ok(out)
    }

    /// Checks references, budgets and scale orderings without running anything.
    pub fn validate(&self) -> Result<BTreeMap<String, CantorSystem>> {
        if self.budget == 0 {
            return Err(Error::Config("budget: must be positive".into()));
        }
        let systems = self.build_systems()?;
        let known = |field: &str, name: &str| -> Result<()> {
            if systems.contains_key(name) {
                Ok(())
            } else {
                Err(Error::Config(format!("{field}: unknown system `{name}`")))
            }
        };
        if let Some(d) = &self.dim {
            for (i, s) in d.systems.iter().enumerate() {
                known(&format!("dim.systems[{i}]"), s)?;
            }
            if d.depths.is_empty() {
                return Err(Error::Config("dim.depths: empty".into()));
            }
        }
        if let Some(l) = &self.limitgeom {
            known("limitgeom.system", &l.system)?;
            let sys = &systems[&l.system];
            check_word(sys, "limitgeom.tail", &l.tail)?;
            if let Some(t) = &l.tail0 {
                check_word(sys, "limitgeom.tail0", t)?;
            }
            if let Some(t) = &l.tail1 {
                check_word(sys, "limitgeom.tail1", t)?;
            }
            if l.step == 0 || l.grid_points < 2 {
                return Err(Error::Config("limitgeom: step must be positive and grid_points >= 2".into()));
            }
        }
        if let Some(m) = &self.marstrand {
            known("marstrand.pair[0]", &m.pair.0)?;
            known("marstrand.pair[1]", &m.pair.1)?;
            check_descending("marstrand.rho", &m.rho.values())?;
            positive("marstrand.c0", m.c0)?;
            positive("marstrand.r", m.r)?;
        }
        if let Some(s) = &self.sumscan {
            known("sumscan.pair[0]", &s.pair.0)?;
            known("sumscan.pair[1]", &s.pair.1)?;
            let d = s.deltas.values();
            check_descending("sumscan.deltas", &d)?;
            if d.len() < 3 {
                return Err(Error::Config("sumscan.deltas: need at least 3 scales".into()));
            }
        }
        if let Some(e) = &self.extract {
            known("extract.system", &e.system)?;
            if !(0.0 <= e.a && e.a < e.b) {
                return Err(Error::Config("extract: need 0 <= a < b".into()));
            }
        }
        if let Some(r) = &self.recurrence {
            known("recurrence.pair[0]", &r.pair.0)?;
            known("recurrence.pair[1]", &r.pair.1)?;
            if !(r.rho > 0.0 && r.rho < 1.0) {
                return Err(Error::Config("recurrence.rho: must lie in (0, 1)".into()));
            }
            if r.m < 1 || r.per_sign < 1 || r.tail_len < 1 {
                return Err(Error::Config("recurrence: m, per_sign and tail_len must be positive".into()));
            }
            positive("recurrence.r", r.r)?;
        }
        Ok(systems)
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{field}: must be positive, got {v}")))
    }
}

fn check_descending(field: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{field}: empty")));
    }
    if !v.iter().all(|x| *x > 0.0) {
        return Err(Error::Config(format!("{field}: scales must be positive")));
    }
    if v.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!("{field}: scales must be sorted descending")));
    }
    Ok(())
}

fn check_word(sys: &CantorSystem, field: &str, w: &[usize]) -> Result<()> {
    let k = sys.spec().alphabet_len();
    if w.is_empty() || w.iter().any(|&a| a >= k) || !sys.spec().is_admissible(w) {
        return Err(Error::Config(format!("{field}: {w:?} is not an admissible word")));
    }
    Ok(())
}

fn build_system(def: &SystemDef, known: &BTreeMap<String, CantorSystem>) -> Result<CantorSystem> {
    match def {
        SystemDef::MiddleAlpha { alpha, .. } => middle_alpha(*alpha),
        SystemDef::TwoRatio { r1, r2, .. } => two_ratio(*r1, *r2),
        SystemDef::GaussDigits { digits, .. } => gauss_digits(digits),
        SystemDef::Perturbed { base, eps, .. } => {
            let b = known
                .get(base)
                .ok_or_else(|| Error::Config(format!("base: unknown system `{base}`")))?;
            perturbed(b, *eps)
        }
        SystemDef::Explicit {
            alphabet,
            transitions,
            base,
            branches,
            name,
        } => {
            let names: Vec<&str> = alphabet.iter().map(String::as_str).collect();
            let pairs: Vec<(&str, &str)> = transitions
                .iter()
                .map(|(a, b)| (a.as_str(), b.as_str()))
                .collect();
            let spec = SubshiftSpec::from_names(&names, &pairs)?;
            let base: Vec<Interval> = base.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect();
            let mut table = Vec::with_capacity(branches.len());
            for (i, b) in branches.iter().enumerate() {
                let parts = b
                    .parts
                    .iter()
                    .map(|p| Primitive::from_tag(&p.family, &p.coeffs))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Config(format!("branches[{i}]: {e}")))?;
                table.push(((spec.symbol(&b.from)?, spec.symbol(&b.to)?), parts));
            }
            CantorSystem::new(name.clone(), spec, base, table)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
budget = 100000

[[system]]
kind = "middle_alpha"
name = "C"
alpha = 0.3333333333333333

[[system]]
kind = "perturbed"
name = "P"
base = "C"
eps = 0.04

[[system]]
kind = "gauss_digits"
name = "G"
digits = [1, 2]

[dim]
systems = ["C", "G"]
depths = [2, 4]

[marstrand]
pair = ["C", "P"]
rho = { base = 3.0, from = 2, to = 4 }
"#;

    #[test]
    fn parse_and_validate() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        let systems = cfg.validate().unwrap();
        assert_eq!(systems.len(), 3);
        assert_eq!(cfg.marstrand.unwrap().rho.values().len(), 3);
    }

    #[test]
    fn unknown_reference() {
        let bad = SAMPLE.replace("systems = [\"C\", \"G\"]", "systems = [\"C\", \"X\"]");
        let err = ExperimentConfig::parse(&bad).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("dim.systems[1]"), "{err}");
    }

    #[test]
    fn syntax_error_has_location() {
        let err = ExperimentConfig::parse("budget = = 3").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn ascending_scales_rejected() {
        let bad = SAMPLE.replace("rho = { base = 3.0, from = 2, to = 4 }", "rho = [0.01, 0.1, 0.2]");
        let err = ExperimentConfig::parse(&bad).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("descending"), "{err}");
    }

    #[test]
    fn explicit_round_trip() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let cfg = ExperimentConfig {
            systems: vec![SystemDef::explicit("G", &g)],
            budget: 10,
            output: None,
            dim: None,
            limitgeom: None,
            marstrand: None,
            sumscan: None,
            extract: None,
            recurrence: None,
        };
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::parse(&text).unwrap();
        let systems = back.build_systems().unwrap();
        let g2 = &systems["G"];
        for w in [vec![0, 1, 0], vec![1, 1, 1, 0]] {
            let (a, b) = (g.cylinder_interval(&w), g2.cylinder_interval(&w));
            assert!((a.lo - b.lo).abs() < 1e-15 && (a.hi - b.hi).abs() < 1e-15);
        }
    }
}

//! Scene configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use ivory_core::{GalleryScene, InnerProduct, NumericPolicy, Projection, SceneKind};
use nalgebra::DMatrix;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl ConfigError {
    fn field(field: impl Into<String>, message: impl ToString) -> Self {
        ConfigError::Field {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

/// Explicit scene matrices, row-major.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitScene {
    #[serde(rename = "H")]
    pub gram: Vec<Vec<f64>>,
    #[serde(rename = "P")]
    pub projection: Vec<Vec<f64>>,
    #[serde(rename = "G0")]
    pub g0: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SceneSpec {
    Named(String),
    Explicit(ExplicitScene),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub scene: SceneSpec,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

/// Parameters every scene accepts besides its own.
const COMMON_PARAMETERS: [&str; 2] = ["target", "scale"];

/// Number of λ values in the default grid.
pub const DEFAULT_GRID: usize = 40;

fn named_parameters(name: &str) -> Option<&'static [(&'static str, f64)]> {
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;
    Some(match name {
        "euclidean" => &[("c", 1.0), ("lambda0", 1.0)],
        "minkowski" => &[("sigma", 2.0), ("tau", 1.0)],
        "elliptic" => &[("c", 0.5), ("beta", H), ("gamma", H)],
        "hyperbolic" => &[("c", std::f64::consts::SQRT_2), ("beta", H), ("gamma", 1.224_744_871_391_589)],
        _ => return None,
    })
}

fn matrix(field: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, ConfigError> {
    let n = rows.len();
    if n == 0 {
        return Err(ConfigError::field(field, "matrix is empty"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(ConfigError::field(
            format!("{field}[{i}]"),
            format!("expected {n} entries, found {}", rows[i].len()),
        ));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

impl SceneConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn scene_name(&self) -> &str {
        match &self.scene {
            SceneSpec::Named(name) => name,
            SceneSpec::Explicit(_) => "custom",
        }
    }

    /// The numeric policy with the configured overrides applied.
    pub fn policy(&self) -> Result<NumericPolicy, ConfigError> {
        let mut policy = NumericPolicy::default();
        for (name, &value) in &self.tolerances {
            policy
                .set(name, value)
                .map_err(|e| ConfigError::field(format!("tolerances.{name}"), e))?;
        }
        Ok(policy)
    }

    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        NumericPolicy::default()
            .set(name, value)
            .map_err(|e| ConfigError::field(format!("--tol {name}"), e))?;
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    fn param(&self, name: &str, default: f64) -> f64 {
        self.parameters.get(name).copied().unwrap_or(default)
    }

    pub fn build_scene(&self) -> Result<GalleryScene, ConfigError> {
        let scene = match &self.scene {
            SceneSpec::Named(name) => {
                let known = named_parameters(name).ok_or_else(|| {
                    ConfigError::field(
                        "scene",
                        format!(
                            "unknown scene `{name}`; expected euclidean, minkowski, elliptic, hyperbolic or explicit matrices"
                        ),
                    )
                })?;
                self.check_parameters(known.iter().map(|(k, _)| *k))?;
                let v: Vec<f64> = known.iter().map(|&(k, d)| self.param(k, d)).collect();
                let built = match name.as_str() {
                    "euclidean" => GalleryScene::euclidean(v[0], v[1]),
                    "minkowski" => GalleryScene::minkowski(v[0], v[1]),
                    "elliptic" => GalleryScene::curved(v[0], v[1], v[2], SceneKind::Elliptic),
                    _ => GalleryScene::curved(v[0], v[1], v[2], SceneKind::Hyperbolic),
                };
                built.map_err(|e| ConfigError::field("parameters", e))?
            }
            SceneSpec::Explicit(ex) => {
                self.check_parameters(std::iter::empty())?;
                let policy = self.policy()?;
                let h = matrix("scene.H", &ex.gram)?;
                let p = matrix("scene.P", &ex.projection)?;
                let g0 = matrix("scene.G0", &ex.g0)?;
                let n = h.nrows();
                for (field, m) in [("scene.P", &p), ("scene.G0", &g0)] {
                    if m.nrows() != n {
                        return Err(ConfigError::field(
                            field,
                            format!("expected a {n}×{n} matrix, found {}×{}", m.nrows(), m.nrows()),
                        ));
                    }
                }
                let ip = InnerProduct::new(h, &policy).map_err(|e| ConfigError::field("scene.H", e))?;
                let p = Projection::from_matrix(p, &policy).map_err(|e| ConfigError::field("scene.P", e))?;
                GalleryScene::custom(ip, p, g0).map_err(|e| ConfigError::field("scene.G0", e))?
            }
        };
        match self.parameters.get("scale") {
            Some(&s) => scene
                .rescaled(s)
                .map_err(|e| ConfigError::field("parameters.scale", e)),
            None => Ok(scene),
        }
    }

    fn check_parameters<'a>(&self, known: impl Iterator<Item = &'a str>) -> Result<(), ConfigError> {
        let known: Vec<&str> = known.chain(COMMON_PARAMETERS).collect();
        for (name, value) in &self.parameters {
            if !known.contains(&name.as_str()) {
                return Err(ConfigError::field(
                    format!("parameters.{name}"),
                    format!("unknown parameter; expected one of {}", known.join(", ")),
                ));
            }
            if !value.is_finite() {
                return Err(ConfigError::field(format!("parameters.{name}"), "must be finite"));
            }
        }
        Ok(())
    }

    /// The family endpoint: the `target` parameter, else `1` when admissible
    /// and `−1` otherwise.
    pub fn target(&self, scene: &GalleryScene, policy: &NumericPolicy) -> f64 {
        if let Some(&t) = self.parameters.get("target") {
            return t;
        }
        if scene.family(1.0, policy).is_ok() {
            1.0
        } else {
            -1.0
        }
    }

    /// The configured λ grid, or an evenly spaced grid from `0` to `target`.
    pub fn grid(&self, target: f64) -> Vec<f64> {
        match &self.lambda_grid {
            Some(g) => g.clone(),
            None => ivory_core::linspace(0.0, target, DEFAULT_GRID),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_scene_with_defaults() {
        let cfg = SceneConfig::parse(r#"{"scene": "minkowski"}"#).unwrap();
        let scene = cfg.build_scene().unwrap();
        assert_eq!(scene.kind, SceneKind::Minkowski);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.target(&scene, &cfg.policy().unwrap()), 1.0);
        assert_eq!(cfg.grid(1.0).len(), DEFAULT_GRID);
    }

    #[test]
    fn explicit_scene() {
        let text = r#"{
            "scene": {"H": [[1,0,0],[0,-1,0],[0,0,1]],
                      "P": [[1,0,0],[0,1,0],[0,0,0]],
                      "G0": [[0.5,0,0],[0,-1,0],[0,0,-1]]},
            "lambda_grid": [0, 0.5]
        }"#;
        let cfg = SceneConfig::parse(text).unwrap();
        let scene = cfg.build_scene().unwrap();
        assert_eq!(scene.kind, SceneKind::Custom);
        assert_eq!(cfg.grid(1.0), vec![0.0, 0.5]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = SceneConfig::parse("{\n  \"scene\": \"euclidean\",\n  \"seed\": \"x\"\n}").unwrap_err();
        match err {
            ConfigError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_errors_name_the_field() {
        let cfg = SceneConfig::parse(r#"{"scene": "euclidean", "parameters": {"sigma": 1}}"#).unwrap();
        assert!(matches!(cfg.build_scene(), Err(ConfigError::Field { field, .. }) if field == "parameters.sigma"));
        let cfg = SceneConfig::parse(r#"{"scene": "euclidean", "tolerances": {"bogus": 1e-3}}"#).unwrap();
        assert!(matches!(cfg.policy(), Err(ConfigError::Field { field, .. }) if field == "tolerances.bogus"));
        let cfg = SceneConfig::parse(r#"{"scene": "euclidean", "parameters": {"scale": 2}}"#).unwrap();
        assert!(matches!(cfg.build_scene(), Err(ConfigError::Field { field, .. }) if field == "parameters.scale"));
        let cfg = SceneConfig::parse(r#"{"scene": "torus"}"#).unwrap();
        assert!(matches!(cfg.build_scene(), Err(ConfigError::Field { field, .. }) if field == "scene"));
    }

    #[test]
    fn euclidean_default_target_is_negative() {
        let cfg = SceneConfig::parse(r#"{"scene": "euclidean"}"#).unwrap();
        let scene = cfg.build_scene().unwrap();
        assert_eq!(cfg.target(&scene, &cfg.policy().unwrap()), -1.0);
    }
}
